"""Exact angular reduction of two-photon dispersion integrals.

The angular part of the integrals

    S_F = int dk1 dk2 (|k1||k2|/(|k1|+|k2|)) e^{i(k1+k2).n} F(k1_hat . k2_hat)

is reduced symbolically.  In polar coordinates k_hat = (Y cos phi, Y sin phi, X)
one has

    k1_hat . k2_hat = cos(phi1 - phi2) Y1 Y2 + X1 X2,

so a polynomial F(u) expands into monomials cos^c(phi) (Y1 Y2)^j X1^a X2^b.
Averaging over phi replaces cos^c by the Wallis factor ((c-1)!!/c!! for even c,
zero for odd c), after which every surviving power of (Y1 Y2) is even and
Y_i^2 = 1 - X_i^2 eliminates the Y's.  Collecting X1^a X2^b then yields an
exact rational coefficient table c_ab such that

    S_F = int_0^inf dt  sum_ab  c_ab <X^a>(t) <X^b>(t),

with the moment functional <A>(t) = 2pi int_0^inf dr r^3 e^{-tr}
int_{-1}^{1} dX e^{irX} A(X) (the 2pi belongs to the functional; see the
kernels module for the table-normalized form).

All arithmetic here is exact rational; no float ever enters this module.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

# The spec's Rational: arbitrary precision, always lowest terms, positive
# denominator.  fractions.Fraction guarantees all three.
Rational = Fraction

RationalLike = Union[Rational, int]

MAX_U_DEGREE = 8


class AngularMonomial(Tuple[int, int, int, int]):
    """Monomial X1^a X2^b (Y1 Y2)^j cos^c(phi), exponents non-negative."""

    __slots__ = ()

    def __new__(cls, a: int, b: int, j: int, c: int) -> "AngularMonomial":
        for e in (a, b, j, c):
            if e < 0:
                raise ValueError("monomial exponents must be non-negative")
        return tuple.__new__(cls, (a, b, j, c))

    @property
    def a(self) -> int:
        return self[0]

    @property
    def b(self) -> int:
        return self[1]

    @property
    def j(self) -> int:
        return self[2]

    @property
    def c(self) -> int:
        return self[3]


class AngularPolynomial:
    """Finite rational combination of AngularMonomials.

    Zero coefficients are never stored and iteration order is lexicographic
    in (a, b, j, c), so equal polynomials are structurally identical.
    """

    def __init__(self, terms: Mapping[AngularMonomial, RationalLike] | None = None):
        clean: Dict[AngularMonomial, Rational] = {}
        if terms:
            for mono, coeff in terms.items():
                q = Fraction(coeff)
                if q != 0:
                    clean[AngularMonomial(*mono)] = q
        self._terms = clean

    def items(self) -> Iterator[Tuple[AngularMonomial, Rational]]:
        for mono in sorted(self._terms):
            yield mono, self._terms[mono]

    def coefficient(self, mono: AngularMonomial) -> Rational:
        return self._terms.get(mono, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AngularPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        body = ", ".join(
            f"X1^{m.a} X2^{m.b} (Y1Y2)^{m.j} c^{m.c}: {q}" for m, q in self.items()
        )
        return f"AngularPolynomial({{{body}}})"


class MomentPairTable:
    """Map (a, b) with a <= b to the exact rational coefficient of <X^a><X^b>.

    Symmetric pairs are merged into the a <= b key with summed coefficient,
    so the table coefficient of an off-diagonal pair already counts both
    orderings.  Every stored pair satisfies a + b even (the phi-average kills
    odd cos powers and Y-elimination adds only even X powers).
    """

    def __init__(self, entries: Mapping[Tuple[int, int], RationalLike] | None = None):
        clean: Dict[Tuple[int, int], Rational] = {}
        if entries:
            for (a, b), coeff in entries.items():
                if a < 0 or b < 0:
                    raise ValueError("moment exponents must be non-negative")
                key = (a, b) if a <= b else (b, a)
                q = clean.get(key, Fraction(0)) + Fraction(coeff)
                if q != 0:
                    clean[key] = q
                elif key in clean:
                    del clean[key]
        for a, b in clean:
            if (a + b) % 2 != 0:
                raise AssertionError(
                    f"internal parity violation: pair ({a},{b}) with odd a+b"
                )
        self._entries = clean

    def items(self) -> Iterator[Tuple[Tuple[int, int], Rational]]:
        for key in sorted(self._entries):
            yield key, self._entries[key]

    def coefficient(self, a: int, b: int) -> Rational:
        key = (a, b) if a <= b else (b, a)
        return self._entries.get(key, Fraction(0))

    def max_exponent(self) -> int:
        return max((b for (_, b) in self._entries), default=0)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MomentPairTable):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __add__(self, other: "MomentPairTable") -> "MomentPairTable":
        merged = dict(self._entries)
        for key, q in other._entries.items():
            merged[key] = merged.get(key, Fraction(0)) + q
        return MomentPairTable(merged)

    def scale(self, factor: RationalLike) -> "MomentPairTable":
        q = Fraction(factor)
        return MomentPairTable({k: q * v for k, v in self._entries.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"({a},{b}): {q}" for (a, b), q in self.items())
        return f"MomentPairTable({{{body}}})"

    def to_json(self) -> str:
        """Serialize with numerator/denominator as decimal strings."""
        entries = [
            {"a": a, "b": b, "num": str(q.numerator), "den": str(q.denominator)}
            for (a, b), q in self.items()
        ]
        return json.dumps({"entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "MomentPairTable":
        data = json.loads(text)
        entries: Dict[Tuple[int, int], Rational] = {}
        for item in data["entries"]:
            key = (int(item["a"]), int(item["b"]))
            entries[key] = Fraction(int(item["num"]), int(item["den"]))
        return cls(entries)


def _normalize_u_coeffs(coeffs: Sequence[RationalLike]) -> List[Rational]:
    if len(coeffs) == 0:
        raise ValueError("u-polynomial must have at least one coefficient")
    out = [Fraction(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    if len(out) - 1 > MAX_U_DEGREE:
        raise ValueError(
            f"unsupported u-polynomial degree {len(out) - 1} (max {MAX_U_DEGREE})"
        )
    return out


def expand_u_polynomial(coeffs: Sequence[RationalLike]) -> AngularPolynomial:
    """Expand sum_n F_n u^n with u = cos(phi) Y1 Y2 + X1 X2.

    The binomial expansion of u^n produces, for each k, the monomial
    cos^k (Y1 Y2)^k X1^{n-k} X2^{n-k} with coefficient C(n, k).
    """
    fs = _normalize_u_coeffs(coeffs)
    terms: Dict[AngularMonomial, Rational] = {}
    for n, fn in enumerate(fs):
        if fn == 0:
            continue
        for k in range(n + 1):
            mono = AngularMonomial(n - k, n - k, k, k)
            terms[mono] = terms.get(mono, Fraction(0)) + fn * comb(n, k)
    return AngularPolynomial(terms)


def wallis_factor(c: int) -> Rational:
    """(1/2pi) int_0^{2pi} cos^c phi dphi: (c-1)!!/c!! for even c, else 0."""
    if c < 0:
        raise ValueError("cosine exponent must be non-negative")
    if c % 2 == 1:
        return Fraction(0)
    num, den = 1, 1
    for m in range(2, c + 1, 2):
        num *= m - 1
        den *= m
    return Fraction(num, den)


def phi_average(poly: AngularPolynomial) -> AngularPolynomial:
    """Replace each cos^c factor by its circle average; output has c = 0."""
    terms: Dict[AngularMonomial, Rational] = {}
    for mono, coeff in poly.items():
        w = wallis_factor(mono.c)
        if w == 0:
            continue
        flat = AngularMonomial(mono.a, mono.b, mono.j, 0)
        terms[flat] = terms.get(flat, Fraction(0)) + coeff * w
    return AngularPolynomial(terms)


def _eliminate_y(poly: AngularPolynomial) -> Dict[Tuple[int, int], Rational]:
    """Substitute (Y1 Y2)^j -> (1 - X1^2)^{j/2} (1 - X2^2)^{j/2}.

    Requires c = 0 and even j everywhere (guaranteed after phi_average; an
    odd survivor would be an internal logic error, not bad input).
    """
    collected: Dict[Tuple[int, int], Rational] = {}
    for mono, coeff in poly.items():
        if mono.c != 0:
            raise AssertionError("Y-elimination called before phi averaging")
        if mono.j % 2 != 0:
            raise AssertionError(
                f"internal parity violation: odd Y-exponent {mono.j} survived"
            )
        half = mono.j // 2
        for p in range(half + 1):
            cp = comb(half, p) * (-1) ** p
            for q in range(half + 1):
                cq = comb(half, q) * (-1) ** q
                key = (mono.a + 2 * p, mono.b + 2 * q)
                collected[key] = collected.get(key, Fraction(0)) + coeff * cp * cq
    return collected


def reduce_to_moments(coeffs: Sequence[RationalLike]) -> MomentPairTable:
    """Full reduction pipeline: expand, phi-average, eliminate Y, collect.

    The returned table satisfies
        S_F = int_0^inf dt sum_{a<=b} c_ab <X^a>(t) <X^b>(t)
    with <.> carrying its 2pi factor (one per moment).
    """
    expanded = expand_u_polynomial(coeffs)
    averaged = phi_average(expanded)
    return MomentPairTable(_eliminate_y(averaged))


# Coefficient families of the three polarization polynomials appearing in the
# dispersion integrals: F1 = 1 + u^2, F2 = u - u^3, F3 = (1 - u^2)^2.
FAMILY_COEFFS: Dict[str, Tuple[Rational, ...]] = {
    "F1": (Fraction(1), Fraction(0), Fraction(1)),
    "F2": (Fraction(0), Fraction(1), Fraction(0), Fraction(-1)),
    "F3": (Fraction(1), Fraction(0), Fraction(-2), Fraction(0), Fraction(1)),
}


def family_table(name: str) -> MomentPairTable:
    """Reduced moment table of a named polynomial family (F1, F2, F3)."""
    try:
        coeffs = FAMILY_COEFFS[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of F1, F2, F3")
    return reduce_to_moments(coeffs)
