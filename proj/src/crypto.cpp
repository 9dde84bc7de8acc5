#define OPENSSL_SUPPRESS_DEPRECATED  // low-level EC used for P-521 scalar control

#include "vmuckle/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>

#include <memory>

#include "vmuckle/errors.hpp"

namespace vmuckle::crypto {

namespace {

[[noreturn]] void ossl_fail(const char* what) {
    raise(Errc::state_error, std::string("openssl: ") + what);
}

Bytes digest(const EVP_MD* md, ByteView data) {
    Bytes out(EVP_MD_size(md));
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1)
        ossl_fail("digest");
    out.resize(len);
    return out;
}

Bytes hmac(const EVP_MD* md, ByteView key, ByteView msg) {
    Bytes out(EVP_MD_size(md));
    unsigned int len = 0;
    if (HMAC(md, key.data(), static_cast<int>(key.size()), msg.data(), msg.size(), out.data(),
             &len) == nullptr)
        ossl_fail("hmac");
    out.resize(len);
    return out;
}

using EvpPkey = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using EvpCtx = std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)>;
using EvpMdCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

EvpPkey raw_private(int type, ByteView sk) {
    EvpPkey key(EVP_PKEY_new_raw_private_key(type, nullptr, sk.data(), sk.size()),
                EVP_PKEY_free);
    if (!key) ossl_fail("raw private key");
    return key;
}

EvpPkey raw_public(int type, ByteView pk) {
    EvpPkey key(EVP_PKEY_new_raw_public_key(type, nullptr, pk.data(), pk.size()), EVP_PKEY_free);
    if (!key) ossl_fail("raw public key");
    return key;
}

Bytes raw_public_of(EVP_PKEY* key) {
    size_t len = 0;
    if (EVP_PKEY_get_raw_public_key(key, nullptr, &len) != 1) ossl_fail("public key length");
    Bytes out(len);
    if (EVP_PKEY_get_raw_public_key(key, out.data(), &len) != 1) ossl_fail("public key export");
    out.resize(len);
    return out;
}

RawKeyPair raw_keygen(int type, RandomSource& rng) {
    Bytes seed = rng.bytes(32);
    auto key = raw_private(type, seed);
    return {raw_public_of(key.get()), std::move(seed)};
}

Bytes evp_derive(EVP_PKEY* priv, EVP_PKEY* peer, Errc on_failure) {
    EvpCtx ctx(EVP_PKEY_CTX_new(priv, nullptr), EVP_PKEY_CTX_free);
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
        EVP_PKEY_derive_set_peer(ctx.get(), peer) != 1)
        raise(on_failure, "key agreement setup failed");
    size_t len = 0;
    if (EVP_PKEY_derive(ctx.get(), nullptr, &len) != 1) raise(on_failure, "derive length");
    Bytes out(len);
    if (EVP_PKEY_derive(ctx.get(), out.data(), &len) != 1)
        raise(on_failure, "key agreement failed");
    out.resize(len);
    return out;
}

using EcKey = std::unique_ptr<EC_KEY, decltype(&EC_KEY_free)>;
using EcPoint = std::unique_ptr<EC_POINT, decltype(&EC_POINT_free)>;
using Bn = std::unique_ptr<BIGNUM, decltype(&BN_free)>;
using BnCtx = std::unique_ptr<BN_CTX, decltype(&BN_CTX_free)>;

EcKey p521_new() {
    EcKey key(EC_KEY_new_by_curve_name(NID_secp521r1), EC_KEY_free);
    if (!key) ossl_fail("P-521 group");
    return key;
}

EcPoint p521_point(const EC_GROUP* group, ByteView encoded, BN_CTX* bnctx) {
    EcPoint point(EC_POINT_new(group), EC_POINT_free);
    if (!point) ossl_fail("point alloc");
    if (encoded.size() != kP521PointLen ||
        EC_POINT_oct2point(group, point.get(), encoded.data(), encoded.size(), bnctx) != 1)
        raise(Errc::malformed_public_key, "invalid P-521 point");
    return point;
}

}  // namespace

Bytes sha384(ByteView data) {
    return digest(EVP_sha384(), data);
}

Bytes sha256(ByteView data) {
    return digest(EVP_sha256(), data);
}

Bytes hmac_sha384(ByteView key, ByteView msg) {
    return hmac(EVP_sha384(), key, msg);
}

Bytes hmac_sha256(ByteView key, ByteView msg) {
    return hmac(EVP_sha256(), key, msg);
}

Bytes aes256gcm_seal(ByteView key, ByteView nonce, ByteView ad, ByteView plaintext) {
    if (key.size() != kGcmKeyLen || nonce.size() != kGcmNonceLen)
        raise(Errc::bad_length, "AES-256-GCM key/nonce length");
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                         EVP_CIPHER_CTX_free);
    if (!ctx) ossl_fail("cipher ctx");
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
        ossl_fail("gcm init");
    int len = 0;
    if (!ad.empty() && EVP_EncryptUpdate(ctx.get(), nullptr, &len, ad.data(),
                                         static_cast<int>(ad.size())) != 1)
        ossl_fail("gcm aad");
    Bytes out(plaintext.size() + kGcmTagLen);
    if (!plaintext.empty() && EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                                                static_cast<int>(plaintext.size())) != 1)
        ossl_fail("gcm encrypt");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) ossl_fail("gcm final");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagLen,
                            out.data() + plaintext.size()) != 1)
        ossl_fail("gcm tag");
    return out;
}

Bytes aes256gcm_open(ByteView key, ByteView nonce, ByteView ad, ByteView sealed) {
    if (key.size() != kGcmKeyLen || nonce.size() != kGcmNonceLen)
        raise(Errc::bad_length, "AES-256-GCM key/nonce length");
    if (sealed.size() < kGcmTagLen) raise(Errc::aead_auth_failure, "ciphertext too short");
    const size_t ct_len = sealed.size() - kGcmTagLen;
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                         EVP_CIPHER_CTX_free);
    if (!ctx) ossl_fail("cipher ctx");
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
        ossl_fail("gcm init");
    int len = 0;
    if (!ad.empty() && EVP_DecryptUpdate(ctx.get(), nullptr, &len, ad.data(),
                                         static_cast<int>(ad.size())) != 1)
        ossl_fail("gcm aad");
    Bytes out(ct_len);
    if (ct_len > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(),
                                        static_cast<int>(ct_len)) != 1)
        ossl_fail("gcm decrypt");
    Bytes tag(sealed.begin() + static_cast<ptrdiff_t>(ct_len), sealed.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagLen, tag.data()) != 1)
        ossl_fail("gcm set tag");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
        raise(Errc::aead_auth_failure, "authentication failed");
    return out;
}

RawKeyPair x25519_keygen(RandomSource& rng) {
    return raw_keygen(EVP_PKEY_X25519, rng);
}

Bytes x25519_derive(ByteView secret_key, ByteView peer_public) {
    if (secret_key.size() != 32 || peer_public.size() != 32)
        raise(Errc::bad_length, "X25519 key length");
    auto priv = raw_private(EVP_PKEY_X25519, secret_key);
    auto peer = raw_public(EVP_PKEY_X25519, peer_public);
    return evp_derive(priv.get(), peer.get(), Errc::decaps_failure);
}

RawKeyPair ed25519_keygen(RandomSource& rng) {
    return raw_keygen(EVP_PKEY_ED25519, rng);
}

Bytes ed25519_sign(ByteView secret_key, ByteView msg) {
    auto key = raw_private(EVP_PKEY_ED25519, secret_key);
    EvpMdCtx ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
        ossl_fail("sign init");
    size_t len = 64;
    Bytes sig(len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, msg.data(), msg.size()) != 1)
        ossl_fail("sign");
    sig.resize(len);
    return sig;
}

bool ed25519_verify(ByteView public_key, ByteView msg, ByteView sig) {
    if (public_key.size() != 32 || sig.size() != 64) return false;
    EvpPkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                            public_key.size()),
                EVP_PKEY_free);
    if (!key) return false;
    EvpMdCtx ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
        return false;
    return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(), msg.data(), msg.size()) == 1;
}

RawKeyPair p521_keygen(RandomSource& rng) {
    EcKey key = p521_new();
    const EC_GROUP* group = EC_KEY_get0_group(key.get());
    BnCtx bnctx(BN_CTX_new(), BN_CTX_free);
    Bn order(BN_new(), BN_free);
    if (!bnctx || !order || EC_GROUP_get_order(group, order.get(), bnctx.get()) != 1)
        ossl_fail("group order");

    // Rejection-sample the scalar from the injected source.
    Bn scalar(BN_new(), BN_free);
    if (!scalar) ossl_fail("scalar alloc");
    for (;;) {
        Bytes candidate = rng.bytes(kP521ScalarLen);
        candidate[0] &= 0x01;  // 521-bit field: clear the top 7 bits
        if (BN_bin2bn(candidate.data(), static_cast<int>(candidate.size()), scalar.get()) ==
            nullptr)
            ossl_fail("scalar parse");
        if (!BN_is_zero(scalar.get()) && BN_cmp(scalar.get(), order.get()) < 0) break;
    }

    EcPoint pub(EC_POINT_new(group), EC_POINT_free);
    if (!pub || EC_POINT_mul(group, pub.get(), scalar.get(), nullptr, nullptr, bnctx.get()) != 1)
        ossl_fail("scalar mult");
    if (EC_KEY_set_private_key(key.get(), scalar.get()) != 1 ||
        EC_KEY_set_public_key(key.get(), pub.get()) != 1)
        ossl_fail("key assembly");

    Bytes pk(kP521PointLen);
    if (EC_POINT_point2oct(group, pub.get(), POINT_CONVERSION_UNCOMPRESSED, pk.data(), pk.size(),
                           bnctx.get()) != kP521PointLen)
        ossl_fail("point encode");
    Bytes sk(kP521ScalarLen);
    if (BN_bn2binpad(scalar.get(), sk.data(), static_cast<int>(sk.size())) < 0)
        ossl_fail("scalar encode");
    return {std::move(pk), std::move(sk)};
}

Bytes p521_derive(ByteView secret_scalar, ByteView peer_point) {
    if (secret_scalar.size() != kP521ScalarLen) raise(Errc::bad_length, "P-521 scalar length");
    EcKey key = p521_new();
    const EC_GROUP* group = EC_KEY_get0_group(key.get());
    BnCtx bnctx(BN_CTX_new(), BN_CTX_free);
    if (!bnctx) ossl_fail("bn ctx");

    Bn scalar(BN_bin2bn(secret_scalar.data(), static_cast<int>(secret_scalar.size()), nullptr),
              BN_free);
    if (!scalar) ossl_fail("scalar parse");
    EcPoint peer = p521_point(group, peer_point, bnctx.get());

    EcPoint shared(EC_POINT_new(group), EC_POINT_free);
    if (!shared ||
        EC_POINT_mul(group, shared.get(), nullptr, peer.get(), scalar.get(), bnctx.get()) != 1)
        raise(Errc::decaps_failure, "P-521 multiply failed");
    if (EC_POINT_is_at_infinity(group, shared.get()))
        raise(Errc::decaps_failure, "degenerate shared point");

    Bn x(BN_new(), BN_free);
    if (!x ||
        EC_POINT_get_affine_coordinates(group, shared.get(), x.get(), nullptr, bnctx.get()) != 1)
        ossl_fail("affine x");
    Bytes out(kP521ScalarLen);
    if (BN_bn2binpad(x.get(), out.data(), static_cast<int>(out.size())) < 0)
        ossl_fail("x encode");
    return out;
}

}  // namespace vmuckle::crypto
