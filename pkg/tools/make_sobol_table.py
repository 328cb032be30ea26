"""Regenerate the bundled Sobol direction-number table.

Writes ``src/adasamp/data/sobol_direction_numbers.txt`` with one line per
dimension from 2 through 64 in the standard published layout

    d s a m_1 ... m_s

where ``s`` is the degree of the dimension's primitive polynomial over GF(2),
``a`` encodes its interior coefficients (most significant first, leading and
constant terms implicit), and ``m_1..m_s`` are the odd initial direction
numbers with ``m_k < 2^k``.  Dimension 1 (the van der Corput sequence, all
m_k = 1) needs no table entry.

Polynomials are enumerated in increasing (degree, a) order and verified
primitive by checking irreducibility (Rabin's test) plus that x generates the
full multiplicative group of GF(2^s).  Initial direction numbers are drawn
from a fixed-seed generator, so the file is reproducible bit for bit; any
choice of odd m_k < 2^k yields a valid Sobol sequence.

Run from the repository root:

    python tools/make_sobol_table.py
"""

from __future__ import annotations

import pathlib

import numpy as np

MAX_DIM = 64
SEED = 20240901


def _poly_mulmod(a: int, b: int, mod: int, deg: int) -> int:
    """Multiply two GF(2) polynomials modulo ``mod`` (degree ``deg``)."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= mod
    return result


def _poly_powmod(base: int, exp: int, mod: int, deg: int) -> int:
    result = 1
    while exp:
        if exp & 1:
            result = _poly_mulmod(result, base, mod, deg)
        base = _poly_mulmod(base, base, mod, deg)
        exp >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def _poly_gcd(a: int, b: int) -> int:
    while b:
        if a.bit_length() < b.bit_length():
            a, b = b, a
            continue
        a ^= b << (a.bit_length() - b.bit_length())
    return a


def is_primitive(poly: int, deg: int) -> bool:
    """Primitivity of a degree-``deg`` polynomial over GF(2) (x generates)."""
    if deg == 1:
        return poly == 0b11  # x + 1, the only degree-1 polynomial with both terms
    # Rabin irreducibility: x^(2^deg) == x mod poly, and for each prime p | deg
    # gcd(x^(2^(deg/p)) - x, poly) == 1.
    if _poly_powmod(2, 1 << deg, poly, deg) != 2:
        return False
    for p in _prime_factors(deg):
        probe = _poly_powmod(2, 1 << (deg // p), poly, deg) ^ 2
        if _poly_gcd(probe, poly) != 1:
            return False
    # Primitive: order of x equals 2^deg - 1.
    group = (1 << deg) - 1
    if _poly_powmod(2, group, poly, deg) != 1:
        return False
    return all(_poly_powmod(2, group // p, poly, deg) != 1 for p in _prime_factors(group))


def primitive_polynomials(count: int):
    """Yield (degree, a) for the first ``count`` primitive polynomials."""
    produced = 0
    deg = 1
    while produced < count:
        for a in range(1 << max(deg - 1, 0)):
            poly = (1 << deg) | (a << 1) | 1
            if is_primitive(poly, deg):
                yield deg, a
                produced += 1
                if produced == count:
                    return
        deg += 1


def main() -> None:
    rng = np.random.default_rng(SEED)
    lines = [
        "# Sobol direction-number table, dimensions 2..%d." % MAX_DIM,
        "# Layout: d s a m_1 ... m_s  (dimension, polynomial degree, encoded",
        "# interior coefficients, odd initial direction numbers m_k < 2^k).",
        "# Generated by tools/make_sobol_table.py (seed %d); regenerate with" % SEED,
        "#     python tools/make_sobol_table.py",
        "d s a m_i",
    ]
    for dim, (deg, a) in enumerate(primitive_polynomials(MAX_DIM - 1), start=2):
        m = [int(2 * rng.integers(0, 1 << (k - 1)) + 1) for k in range(1, deg + 1)]
        lines.append(f"{dim} {deg} {a} " + " ".join(str(v) for v in m))
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "adasamp" / "data" / "sobol_direction_numbers.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({MAX_DIM - 1} rows)")


if __name__ == "__main__":
    main()
