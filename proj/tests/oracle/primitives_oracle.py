#!/usr/bin/env python3
"""Independent reference values for the low-level building blocks.

Prints `name value_hex` lines; the frozen copy lives in
tests/data/primitives_kat.txt. Covers the deterministic RNG stream, the
hash-based test KEM, the QKD simulator derivation and HMAC-SHA-384 vectors.
"""

import hashlib
import hmac


def hmac384(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha384).digest()


class Drbg:
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


def main() -> None:
    out = []

    # Deterministic RNG stream for seed 00..0f.
    drbg = Drbg(bytes(range(16)))
    out.append(("drbg_seed", bytes(range(16))))
    out.append(("drbg_first64", drbg.bytes(64)))

    # TestKEM-32: keygen and encapsulation driven by the same RNG stream the
    # library consumes (sk then r), with explicit-rejection tag.
    kem_rng = Drbg(b"testkem-oracle-seed!")
    sk = kem_rng.bytes(32)
    pk = hmac384(sk, b"TestKEM-32 pk")[:32]
    r = kem_rng.bytes(32)
    tag = hmac384(pk, b"TestKEM-32 ct" + r)[:16]
    ct = r + tag
    ss = hmac384(pk, b"TestKEM-32 ss" + r)[:32]
    out += [("testkem_rng_seed", b"testkem-oracle-seed!"), ("testkem_sk", sk),
            ("testkem_pk", pk), ("testkem_ct", ct), ("testkem_ss", ss)]

    # QKD simulator: HMAC-SHA-384(seed, stream || 0x00 || BE32(index) || BE32(lambda)).
    qkd_seed = b"qkd-simulator-seed-A"
    for index in (0, 1, 7):
        msg = b"alice-bob" + b"\x00" + index.to_bytes(4, "big") + (256).to_bytes(4, "big")
        out.append((f"qkd_key_{index}", hmac384(qkd_seed, msg)[:32]))
    out.append(("qkd_seed", qkd_seed))

    # HMAC-SHA-384 vectors: the RFC 4231 test-case-1 shape with a 20-byte and
    # a 48-byte 0x0b key.
    out.append(("hmac384_rfc4231_tc1", hmac384(bytes([0x0B]) * 20, b"Hi There")))
    out.append(("hmac384_key48", hmac384(bytes([0x0B]) * 48, b"Hi There")))
    out.append(("hmac384_empty_key_eq_zero48",
                hmac384(bytes(48), b"context") ))

    for name, value in out:
        print(f"{name} {value.hex()}")


if __name__ == "__main__":
    main()
