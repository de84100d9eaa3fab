"""Binary quadratic forms of negative discriminant.

Reduction, enumeration of reduced forms, Gauss/Dirichlet composition, class
group structure from the composition table, and ring class numbers of
non-maximal orders.  Forms (a, b, c) are primitive and positive definite;
the reduced representative (|b| <= a <= c, b >= 0 on ties) is the canonical
name of an ideal class of the order of discriminant b^2 - 4ac.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import arith
from .errors import (
    DiscriminantMismatch,
    InvalidDiscriminant,
    InvalidForm,
    NonFundamentalDiscriminant,
)


@dataclass(frozen=True, order=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def validate(self) -> "BinaryQuadraticForm":
        if self.discriminant >= 0:
            raise InvalidForm(f"{self} is not of negative discriminant")
        if self.a <= 0:
            raise InvalidForm(f"{self} is not positive definite")
        if math.gcd(math.gcd(self.a, self.b), self.c) != 1:
            raise InvalidForm(f"{self} is imprimitive")
        return self

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return abs(b) <= a <= c and (b >= 0 or (abs(b) < a and a < c))

    def inverse(self) -> "BinaryQuadraticForm":
        return reduce(BinaryQuadraticForm(self.a, -self.b, self.c))

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


@dataclass(frozen=True)
class ClassGroup:
    discriminant: int
    forms: tuple[BinaryQuadraticForm, ...]
    order: int
    # computed lazily by group_structure(); None until then
    elementary_divisors: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def principal(self) -> BinaryQuadraticForm:
        return principal_form(self.discriminant)


def principal_form(D: int) -> BinaryQuadraticForm:
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidDiscriminant(f"{D} is not a negative discriminant")
    if D % 4 == 0:
        return BinaryQuadraticForm(1, 0, -D // 4)
    return BinaryQuadraticForm(1, 1, (1 - D) // 4)


def reduce(f: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """Unique reduced form properly equivalent to f."""
    f.validate()
    a, b, c = f.a, f.b, f.c
    while True:
        if c < a or (c == a and b < 0):
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            r = b % (2 * a)
            if r > a:
                r -= 2 * a
            c = c + ((r * r - b * b) // (4 * a))
            b = r
            continue
        break
    g = BinaryQuadraticForm(a, b, c)
    return g if g.is_reduced() else reduce(g)


def enumerate_reduced(D: int) -> ClassGroup:
    """All primitive reduced forms of discriminant D; order = h(D).

    Iterates over b of the right parity with 3b^2 <= |D| and splits
    (b^2 - D)/4 into divisor pairs a*c.  Elementary divisors are left
    unset; call group_structure() when they are needed.
    """
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidDiscriminant(f"{D} is not a negative discriminant")
    forms = []
    b = D & 1
    while 3 * b * b <= -D:
        m = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                if math.gcd(math.gcd(a, b), c) == 1:
                    forms.append(BinaryQuadraticForm(a, b, c))
                    if 0 < b < a < c:
                        forms.append(BinaryQuadraticForm(a, -b, c))
            a += 1
        b += 2
    forms.sort()
    return ClassGroup(D, tuple(forms), len(forms))


def _gcdext(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _solve_congruence(r1: int, m1: int, r2: int, m2: int) -> int:
    # x = r1 mod m1, x = r2 mod m2; the system must be consistent
    g = math.gcd(m1, m2)
    if (r1 - r2) % g != 0:
        raise ArithmeticError("inconsistent congruences")
    l = m1 // g * m2
    _, s, _ = _gcdext(m1 // g, m2 // g)
    return (r1 + m1 * ((r2 - r1) // g) * s) % l


def _equivalent_with_leading_coprime_to(
    g: BinaryQuadraticForm, m: int
) -> BinaryQuadraticForm:
    # properly equivalent form whose leading coefficient is coprime to m
    if math.gcd(g.a, m) == 1:
        return g
    bound = 1
    while bound < 64:
        for x in range(-bound, bound + 1):
            for y in range(-bound, bound + 1):
                if math.gcd(x, y) != 1:
                    continue
                val = g.a * x * x + g.b * x * y + g.c * y * y
                if val > 0 and math.gcd(val, m) == 1:
                    _, v, u = _gcdext(x, y)
                    u = -u
                    # matrix [[x, u], [y, v]] has determinant 1
                    a2 = val
                    b2 = 2 * (g.a * x * u + g.c * y * v) + g.b * (x * v + y * u)
                    c2 = g.a * u * u + g.b * u * v + g.c * v * v
                    return BinaryQuadraticForm(a2, b2, c2)
        bound *= 2
    raise InvalidForm(f"no representative of {g} coprime to {m}")


def compose(f: BinaryQuadraticForm, g: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """Reduced Gauss composition of the classes of f and g.

    Dirichlet composition: move g to a representative with leading
    coefficient coprime to f.a, solve B = b1 mod 2a1, B = b2 mod 2a2,
    and read off (a1*a2, B, (B^2-D)/(4*a1*a2)).
    """
    f.validate()
    g.validate()
    D = f.discriminant
    if g.discriminant != D:
        raise DiscriminantMismatch(f"{f} and {g} have different discriminants")
    g = _equivalent_with_leading_coprime_to(g, f.a)
    B = _solve_congruence(f.b, 2 * f.a, g.b, 2 * g.a)
    A = f.a * g.a
    C = (B * B - D) // (4 * A)
    return reduce(BinaryQuadraticForm(A, B, C))


def form_pow(f: BinaryQuadraticForm, n: int) -> BinaryQuadraticForm:
    """n-th composition power of the class of f (n may be negative)."""
    D = f.validate().discriminant
    if n < 0:
        return form_pow(f.inverse(), -n)
    result = principal_form(D)
    base = reduce(f)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def _class_order(f: BinaryQuadraticForm, h: int) -> int:
    # order of the class of f, via the factorization of h
    ident = principal_form(f.discriminant)
    o = h
    for p in arith.prime_divisors(h):
        while o % p == 0 and form_pow(f, o // p) == ident:
            o //= p
    return o


def group_structure(G: ClassGroup) -> tuple[int, ...]:
    """Invariant factors d_1 | d_2 | ... (product = h) of the class group,
    computed from element orders; cached on the ClassGroup."""
    if G.elementary_divisors is not None:
        return G.elementary_divisors
    h = G.order
    if h == 1:
        divisors: tuple[int, ...] = ()
    else:
        orders = [_class_order(f, h) for f in G.forms]
        partitions: dict[int, list[int]] = {}
        for p, e in arith.factorize(h).items():
            cofactor = h // p**e
            partition: list[int] = []
            prev = 0
            for k in range(1, e + 1):
                nk = sum(1 for o in orders if p**k % _p_part(o, p) == 0)
                sk = _exact_log(nk // cofactor, p)
                parts_ge_k = sk - prev
                if parts_ge_k == 0:
                    break
                if k == 1:
                    partition = [1] * parts_ge_k
                else:
                    for i in range(parts_ge_k):
                        partition[i] += 1
                prev = sk
            partitions[p] = partition
        width = max(len(v) for v in partitions.values())
        out = []
        for i in range(width):
            d = 1
            for p, part in partitions.items():
                if i < len(part):
                    d *= p ** part[i]
            out.append(d)
        out.sort()
        assert math.prod(out) == h
        divisors = tuple(out)
    object.__setattr__(G, "elementary_divisors", divisors)
    return divisors


def _p_part(n: int, p: int) -> int:
    r = 1
    while n % p == 0:
        n //= p
        r *= p
    return r


def _exact_log(n: int, p: int) -> int:
    v = 0
    while n > 1:
        if n % p:
            raise ArithmeticError(f"{n} is not a power of {p}")
        n //= p
        v += 1
    return v


def ring_class_number(D: int, c: int) -> int:
    """Class number of the order of conductor c in the field of fundamental
    discriminant D:  h(D) * c / [O_K^* : O^*] * prod_{p|c} (1 - (D|p)/p).
    """
    if not arith.is_fundamental_discriminant(D):
        raise NonFundamentalDiscriminant(f"{D} is not fundamental")
    if c < 1:
        raise ValueError("conductor must be positive")
    h = enumerate_reduced(D).order
    if c == 1:
        return h
    unit_index = {-3: 3, -4: 2}.get(D, 1)
    hc = Fraction(h * c, unit_index)
    for p in arith.prime_divisors(c):
        hc *= Fraction(p - arith.kronecker(D, p), p)
    if hc.denominator != 1 or hc <= 0:
        raise ArithmeticError(f"non-integral ring class number {hc} for ({D}, {c})")
    return int(hc)
