"""Exact numbers of the form sum c_d * sqrt(d) with squarefree d."""

from fractions import Fraction
from math import gcd, isqrt

from .errors import NotDivisible


def squarefree_split(n):
    """n = c*c*d with d squarefree; returns (c, d).  Trial division, which is
    plenty for the parameter values used here (products of small q)."""
    if n <= 0:
        raise ValueError("need a positive integer")
    c, d = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            c *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
        if p > 10**6:
            r = isqrt(n)
            if r * r == n:
                return c * r, d
            raise ValueError("cofactor too large to split")
    return c, d * n


def _primes_of(d):
    out, p = [], 2
    while p * p <= d:
        if d % p == 0:
            out.append(p)
            while d % p == 0:
                d //= p
        p += 1
    if d > 1:
        out.append(d)
    return out


class RadicalNumber:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {d: c for d, c in (terms or {}).items() if c}

    @classmethod
    def integer(cls, n):
        return cls({1: n})

    @classmethod
    def sqrt(cls, n):
        c, d = squarefree_split(n)
        return cls({d: c})

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RadicalNumber):
            return x
        if isinstance(x, int):
            return cls({1: x})
        raise TypeError(f"cannot treat {x!r} as a radical number")

    def __add__(self, other):
        other = RadicalNumber.coerce(other)
        t = dict(self.terms)
        for d, c in other.terms.items():
            t[d] = t.get(d, 0) + c
        return RadicalNumber(t)

    __radd__ = __add__

    def __neg__(self):
        return RadicalNumber({d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-RadicalNumber.coerce(other))

    def __rsub__(self, other):
        return RadicalNumber.coerce(other) - self

    def __mul__(self, other):
        other = RadicalNumber.coerce(other)
        t = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                g = gcd(a, b)
                d = (a // g) * (b // g)
                t[d] = t.get(d, 0) + x * y * g
        return RadicalNumber(t)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = RadicalNumber.integer(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = RadicalNumber.integer(other)
        if not isinstance(other, RadicalNumber):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_rational(self):
        return set(self.terms) <= {1}

    def is_integer(self):
        return self.is_rational()

    def to_int(self):
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.terms.get(1, 0)

    def conjugate(self, p):
        """Image under the field automorphism sqrt(p) -> -sqrt(p)."""
        return RadicalNumber({d: (-c if d % p == 0 else c) for d, c in self.terms.items()})

    def _rationalize(self, other):
        num, den = self, other
        for p in sorted({p for d in other.terms for p in _primes_of(d)}):
            conj = den.conjugate(p)
            num, den = num * conj, den * conj
        assert den.is_rational()
        return num, den.to_int()

    def exact_quotient(self, other):
        """The quotient as {d: Fraction}; raises ZeroDivisionError on 0."""
        other = RadicalNumber.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero radical")
        num, den = self._rationalize(other)
        return {d: Fraction(c, den) for d, c in num.terms.items()}

    def div_exact(self, other):
        q = self.exact_quotient(other)
        if any(f.denominator != 1 for f in q.values()):
            raise NotDivisible(f"{self} / {other} = {format_quotient(q)} is not integral", q)
        return RadicalNumber({d: int(f) for d, f in q.items()})

    def __str__(self):
        return format_quotient(self.terms)

    def __repr__(self):
        return f"RadicalNumber({self})"

    def evaluate(self):
        """Float approximation, only for display and sorting."""
        return sum(c * d**0.5 for d, c in self.terms.items())


def format_quotient(terms):
    if not terms:
        return "0"
    parts = []
    for d in sorted(terms):
        c = terms[d]
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if d == 1:
            body = str(c)
        elif c == 1:
            body = f"√{d}"
        elif isinstance(c, Fraction) and c.denominator != 1:
            body = f"({c})√{d}"
        else:
            body = f"{c}√{d}"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
