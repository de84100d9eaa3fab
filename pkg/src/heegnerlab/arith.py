"""Exact integer utilities: Kronecker symbols, square roots mod 4N, odd parts,
prime-to-B parts and trial-division factorization.

Everything here is deterministic and desk-scale (|D| <= 10^6, N <= 10^4);
no probabilistic primality or sub-exponential factoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from sympy.ntheory.residue_ntheory import sqrt_mod

from .errors import NoSquareRoot


@dataclass(frozen=True)
class OddPartDecomposition:
    value: int
    odd_part: int
    two_exponent: int


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D|n) for positive n.

    Standard convention at 2: (D|2) = 0 for even D, +1 for D = ±1 mod 8,
    -1 for D = ±3 mod 8.  Zero iff gcd(D, n) > 1.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    # factor of 2 in n
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # n now odd; Jacobi symbol (D|n) with quadratic reciprocity
    a = D % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod_4N(D: int, N: int) -> int:
    """Least b with 0 < b <= 2N and b^2 = D (mod 4N).

    The bound is b < 2N except in the corner case of even D at N = 1,
    where b = 2 is the only representative.  Raises NoSquareRoot when no
    root exists (Heegner condition violated).
    """
    if D >= 0:
        raise ValueError("D must be negative")
    if N <= 0:
        raise ValueError("N must be positive")
    m = 4 * N
    roots = sqrt_mod(D % m, m, all_roots=True) or []
    candidates = [b for b in roots if 0 < b <= 2 * N]
    if not candidates:
        raise NoSquareRoot(f"no b with b^2 = {D} mod {m}")
    return min(candidates)


def odd_part(n: int) -> OddPartDecomposition:
    """Split n = odd * 2^k."""
    if n < 1:
        raise ValueError("n must be positive")
    k = 0
    m = n
    while m % 2 == 0:
        m //= 2
        k += 1
    return OddPartDecomposition(value=n, odd_part=m, two_exponent=k)


def prime_to_B_part(n: int, B: int) -> int:
    """Largest divisor of n coprime to B."""
    if n < 1 or B < 1:
        raise ValueError("n and B must be positive")
    g = math.gcd(n, B)
    while g > 1:
        while n % g == 0:
            n //= g
        g = math.gcd(n, B)
    return n


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization, returned as {prime: exponent}."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(abs(n)).values())


def is_fundamental_discriminant(D: int) -> bool:
    """Fundamental negative discriminants: D = 1 mod 4 squarefree, or D = 4m
    with m = 2, 3 mod 4 squarefree."""
    if D >= 0:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False
