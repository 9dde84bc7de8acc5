#!/usr/bin/env python3
"""Independent reference for the MKA key hierarchy, SAK derivation and ICV.

Generates 100 deterministic cases (plus the all-zero spot check) and prints

    <msk> <ckn> <cak> <kek> <ick> <sci> <key_number> <nonce> <sak> <icv_input> <icv>

per line, all hex. The frozen copy lives in tests/data/mka_kat.txt.
"""

import hashlib
import hmac


def hmac384(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha384).digest()


def hmac256(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha256).digest()


class Drbg:
    """HMAC-SHA-384 counter stream, matching the library's test RNG."""

    def __init__(self, seed: bytes):
        self.seed = seed
        self.counter = 0
        self.buf = b""

    def bytes(self, n: int) -> bytes:
        out = b""
        while len(out) < n:
            if not self.buf:
                self.buf = hmac384(self.seed, self.counter.to_bytes(8, "big"))
                self.counter += 1
            take = min(n - len(out), len(self.buf))
            out += self.buf[:take]
            self.buf = self.buf[take:]
        return out


def case(msk: bytes, ckn: bytes, sci: bytes, key_number: int, nonce: bytes,
         icv_input: bytes) -> str:
    cak = hmac256(msk, ckn)
    kek = hmac256(cak, b"IEEE8021 KEK" + ckn)
    ick = hmac256(cak, b"IEEE8021 ICK" + ckn)
    sak = hmac256(cak, sci + key_number.to_bytes(4, "big") + nonce)
    icv = hmac256(ick, icv_input)[:16]
    return " ".join([
        msk.hex(), ckn.hex(), cak.hex(), kek.hex(), ick.hex(), sci.hex(),
        str(key_number), nonce.hex(), icv_input.hex(), sak.hex(), icv.hex(),
    ])


def main() -> None:
    print(case(bytes(48), bytes([0x01]), bytes(8), 0, bytes(32), bytes(16)))
    drbg = Drbg(b"mka-oracle-seed-0001")
    for _ in range(100):
        msk = drbg.bytes(48)
        ckn = drbg.bytes(1 + drbg.bytes(1)[0] % 32)
        sci = drbg.bytes(8)
        key_number = int.from_bytes(drbg.bytes(4), "big")
        nonce = drbg.bytes(32)
        icv_input = drbg.bytes(16 + drbg.bytes(1)[0] % 64)
        print(case(msk, ckn, sci, key_number, nonce, icv_input))


if __name__ == "__main__":
    main()
