#!/usr/bin/env python3
"""Regenerates the golden vector files in this directory.

Independent reference implementation: plain affine Weierstrass arithmetic on
top of Python integers, no code shared with the C++ library. Vectors are
frozen in the repo; rerun only when adding cases.
"""

import hashlib
import pathlib

HERE = pathlib.Path(__file__).parent

P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8


def ec_add(p1, p2, a, p):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if p1 == p2:
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return (x3, y3)


def ec_mul(k, pt, a, p):
    acc = None
    addend = pt
    while k:
        if k & 1:
            acc = ec_add(acc, addend, a, p)
        addend = ec_add(addend, addend, a, p)
        k >>= 1
    return acc


def fmt_point(pt):
    return f"{pt[0]:064x} {pt[1]:064x}"


def write(name, lines):
    path = HERE / name
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(lines)} lines)")


def secp_mul_vectors():
    # Scalars chosen to cover small values, boundary values near n, and a
    # couple of pseudo-random mid-range values (fixed here, not generated).
    scalars = [
        1,
        2,
        3,
        7,
        0xDEADBEEF,
        2**128,
        2**255,
        N - 1,
        N - 2,
        0x4242424242424242424242424242424242424242424242424242424242424242 % N,
        int.from_bytes(hashlib.sha256(b"vector-a").digest(), "big") % N,
        int.from_bytes(hashlib.sha256(b"vector-b").digest(), "big") % N,
    ]
    lines = ["# k  x(k*G)  y(k*G)   all hex, secp256k1"]
    for k in scalars:
        pt = ec_mul(k, (GX, GY), 0, P)
        lines.append(f"{k:064x} {fmt_point(pt)}")
    write("secp256k1_mul.txt", lines)


def secp_add_vectors():
    # P1 + P2 for generator multiples; includes a doubling case.
    cases = [(1, 1), (1, 2), (2, 3), (5, 11), (123456789, 987654321)]
    lines = ["# x1 y1 x2 y2 x3 y3   (k1*G) + (k2*G), hex"]
    for k1, k2 in cases:
        p1 = ec_mul(k1, (GX, GY), 0, P)
        p2 = ec_mul(k2, (GX, GY), 0, P)
        p3 = ec_add(p1, p2, 0, P)
        lines.append(f"{fmt_point(p1)} {fmt_point(p2)} {fmt_point(p3)}")
    write("secp256k1_add.txt", lines)


def ecdh_vectors():
    # a, b, x-coordinate of a*(b*G) == b*(a*G).
    pairs = [
        (0x1111, 0x2222),
        (12345678901234567890, 98765432109876543210),
        (N - 5, 7),
        (
            int.from_bytes(hashlib.sha256(b"dh-a").digest(), "big") % N,
            int.from_bytes(hashlib.sha256(b"dh-b").digest(), "big") % N,
        ),
    ]
    lines = ["# a b shared_x   hex, secp256k1"]
    for a, b in pairs:
        shared = ec_mul(a, ec_mul(b, (GX, GY), 0, P), 0, P)
        check = ec_mul(b, ec_mul(a, (GX, GY), 0, P), 0, P)
        assert shared == check
        lines.append(f"{a:064x} {b:064x} {shared[0]:064x}")
    write("secp256k1_ecdh.txt", lines)


def sha256_vectors():
    # FIPS 180 examples plus assorted lengths crossing block boundaries.
    msgs = [
        b"",
        b"abc",
        b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
        b"a" * 64,
        b"zaps" * 100,
        bytes(range(256)),
    ]
    lines = ["# msg_hex sha256_hex"]
    for m in msgs:
        lines.append(f"{m.hex() or '-'} {hashlib.sha256(m).hexdigest()}")
    write("sha256.txt", lines)


def tiny17_table():
    # Full multiplication table k -> k*G on y^2 = x^3 + 2x + 2 over F_17.
    lines = ["# k x y   ('inf' for the identity), tiny17"]
    for k in range(0, 21):
        pt = ec_mul(k, (5, 1), 2, 17) if k else None
        if pt is None:
            lines.append(f"{k} inf inf")
        else:
            lines.append(f"{k} {pt[0]} {pt[1]}")
    write("tiny17_mul.txt", lines)


if __name__ == "__main__":
    secp_mul_vectors()
    secp_add_vectors()
    ecdh_vectors()
    sha256_vectors()
    tiny17_table()
