#include "vmuckle/mka.hpp"

#include <algorithm>

#include "vmuckle/crypto.hpp"
#include "vmuckle/errors.hpp"
#include "vmuckle/suite.hpp"

namespace vmuckle::mka {

namespace {

constexpr char kFrameMagic[4] = {'M', 'K', 'P', 'F'};
constexpr size_t kFrameLen = 4 + kMemberIdLen + 1 + 4 + kSciLen + 2 + kSakNonceLen +
                             crypto::kGcmNonceLen + (kSakLen + crypto::kGcmTagLen) + kIcvLen;

const Bytes kKekLabel = to_bytes("IEEE8021 KEK");
const Bytes kIckLabel = to_bytes("IEEE8021 ICK");

}  // namespace

MkaHierarchy derive_hierarchy(ByteView msk, ByteView ckn) {
    if (msk.size() != kMskLen) raise(Errc::bad_length, "MSK must be 48 bytes");
    if (ckn.empty() || ckn.size() > 32) raise(Errc::bad_length, "CKN must be 1..32 bytes");
    MkaHierarchy h;
    h.msk.assign(msk.begin(), msk.end());
    h.ckn.assign(ckn.begin(), ckn.end());
    h.cak = crypto::hmac_sha256(msk, ckn);
    h.kek = crypto::hmac_sha256(h.cak, concat({view(kKekLabel), ckn}));
    h.ick = crypto::hmac_sha256(h.cak, concat({view(kIckLabel), ckn}));
    return h;
}

Bytes elect_key_server(const std::vector<Member>& members) {
    if (members.empty()) raise(Errc::empty_membership, "no members to elect from");
    const Member* best = &members.front();
    for (const Member& m : members) {
        if (m.priority > best->priority ||
            (m.priority == best->priority &&
             std::lexicographical_compare(m.id.begin(), m.id.end(), best->id.begin(),
                                          best->id.end())))
            best = &m;
    }
    return best->id;
}

SakRecord generate_sak(const MkaHierarchy& h, const std::array<uint8_t, kSciLen>& sci,
                       uint32_t key_number, RandomSource& rng) {
    SakRecord rec;
    rec.sci = sci;
    rec.key_number = key_number;
    rec.nonce = rng.bytes(kSakNonceLen);
    Bytes msg(sci.begin(), sci.end());
    append_u32(msg, key_number);
    append(msg, view(rec.nonce));
    rec.sak = crypto::hmac_sha256(view(h.cak), view(msg));
    return rec;
}

Bytes icv(ByteView ick, ByteView frame_prefix) {
    Bytes tag = crypto::hmac_sha256(ick, frame_prefix);
    tag.resize(kIcvLen);
    return tag;
}

Bytes wrap_sak(const MkaHierarchy& h, const SakRecord& rec, const FrameHeader& header,
               RandomSource& rng) {
    if (rec.sak.size() != kSakLen || rec.nonce.size() != kSakNonceLen)
        raise(Errc::bad_length, "SAK record field sizes");
    Bytes frame;
    frame.insert(frame.end(), kFrameMagic, kFrameMagic + 4);
    append(frame, ByteView{header.member_id.data(), header.member_id.size()});
    append_u8(frame, header.key_server_priority);
    append_u32(frame, rec.key_number);
    append(frame, ByteView{rec.sci.data(), rec.sci.size()});
    append_u16(frame, kCipherSuiteGcmAes256);
    append(frame, view(rec.nonce));

    Bytes gcm_nonce = rng.bytes(crypto::kGcmNonceLen);
    // Header (everything so far) doubles as associated data for the wrap.
    Bytes wrapped = aead_seal(view(h.kek), view(gcm_nonce), view(frame), view(rec.sak));
    append(frame, view(gcm_nonce));
    append(frame, view(wrapped));
    append(frame, view(icv(view(h.ick), view(frame))));
    return frame;
}

SakRecord unwrap_sak(const MkaHierarchy& h, ByteView frame) {
    if (frame.size() != kFrameLen) raise(Errc::malformed_message, "bad frame length");

    // ICV is checked before any decryption is attempted.
    ByteView body = frame.first(frame.size() - kIcvLen);
    ByteView tag = frame.subspan(frame.size() - kIcvLen);
    if (!ct_equal(view(icv(view(h.ick), body)), tag))
        raise(Errc::icv_mismatch, "frame integrity check failed");

    ByteReader reader(body);
    Bytes magic = reader.take(4);
    if (!std::equal(magic.begin(), magic.end(), kFrameMagic))
        raise(Errc::malformed_message, "bad frame magic");
    reader.take(kMemberIdLen);
    reader.u8();  // key server priority
    SakRecord rec;
    rec.key_number = reader.u32();
    Bytes sci = reader.take(kSciLen);
    std::copy(sci.begin(), sci.end(), rec.sci.begin());
    if (reader.u16() != kCipherSuiteGcmAes256)
        raise(Errc::malformed_message, "unsupported cipher suite id");
    rec.nonce = reader.take(kSakNonceLen);

    const size_t ad_len = 4 + kMemberIdLen + 1 + 4 + kSciLen + 2 + kSakNonceLen;
    ByteView ad = body.first(ad_len);
    Bytes gcm_nonce = reader.take(crypto::kGcmNonceLen);
    Bytes wrapped = reader.take(kSakLen + crypto::kGcmTagLen);
    reader.expect_end();
    rec.sak = aead_open(view(h.kek), view(gcm_nonce), ad, view(wrapped));
    return rec;
}

}  // namespace vmuckle::mka
