"""The two binomial nonhomogeneous linear recursions over GF(q).

NLR1:  Σ_j C(k,j)·u_{i+k-j}        = c·(-1)^i·i
NLR2:  Σ_j (-1)^j C(k,j)·u_{i+k-j} = c·i

Every NLR1 sequence has the closed form u_i = (-1)^i·P(i) and every NLR2
sequence u_i = P(i), with deg P ≤ k + 1.  Recovery therefore works either
by interpolating k + 2 points or by running the recursion forward from k
consecutive terms.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import ConstraintError, InsufficientSharesError, ParameterError


class Variant(enum.Enum):
    NLR1 = 1
    NLR2 = 2


def binomial(k: int, j: int) -> int:
    if not 0 <= j <= k:
        raise ParameterError(f"binomial index j={j} outside [0, {k}]")
    return math.comb(k, j)


def check_modulus(k: int, q: int) -> None:
    """Require q > C(k, j) for every j."""
    for j in range(k + 1):
        if q <= math.comb(k, j):
            raise ConstraintError(f"q={q} must exceed C({k},{j})={math.comb(k, j)}")


def coefficients(variant: Variant, k: int, q: int) -> list[int]:
    """Weights a_j of u_{i+k-j}, j = 0..k, reduced mod q."""
    if variant is Variant.NLR1:
        return [math.comb(k, j) % q for j in range(k + 1)]
    return [(-1) ** j * math.comb(k, j) % q for j in range(k + 1)]


def rhs(variant: Variant, c: int, i: int, q: int) -> int:
    if variant is Variant.NLR1:
        return c * (-1) ** i * i % q
    return c * i % q


@dataclass(frozen=True)
class NlrSpec:
    variant: Variant
    k: int
    c: int
    init: tuple[int, ...]
    q: int

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"order k must be positive, got {self.k}")
        if len(self.init) != self.k:
            raise ParameterError(f"need {self.k} initial values, got {len(self.init)}")
        check_modulus(self.k, self.q)
        if self.c % self.q == 0:
            raise ParameterError("recursion constant c must be nonzero mod q")
        if any(not 0 <= v < self.q for v in self.init):
            raise ParameterError("initial values must lie in [0, q)")


@dataclass(frozen=True)
class SubshadowSequence:
    spec: NlrSpec
    terms: tuple[int, ...]

    def __getitem__(self, i):
        return self.terms[i]

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class RecoveredPolynomial:
    coeffs: tuple[int, ...]


def _step(coef: list[int], window: Sequence[int], variant: Variant, c: int, i: int, q: int) -> int:
    # window = (u_i, ..., u_{i+k-1}); returns u_{i+k}
    k = len(coef) - 1
    acc = rhs(variant, c, i, q)
    for j in range(1, k + 1):
        acc -= coef[j] * window[k - j]
    return acc % q


def _run(variant, terms, start, c, k, q, upto):
    coef = coefficients(variant, k, q)
    terms = list(terms)
    i = start
    while start + len(terms) - 1 < upto:
        terms.append(_step(coef, terms[-k:], variant, c, i, q))
        i += 1
    return terms


def generate(spec: NlrSpec, upto: int) -> SubshadowSequence:
    """Terms u_0..u_upto."""
    if upto < spec.k - 1:
        raise ParameterError(f"upto={upto} is below the initial window")
    terms = _run(spec.variant, spec.init, 0, spec.c, spec.k, spec.q, upto)
    return SubshadowSequence(spec, tuple(terms))


def extend_consecutive(variant: Variant, window: Sequence[int], s: int, c: int, k: int,
                       q: int, upto: int) -> list[int]:
    """Terms u_s..u_upto from the k consecutive terms u_s..u_{s+k-1}."""
    if len(window) != k:
        raise ParameterError(f"window must hold exactly k={k} terms, got {len(window)}")
    if s < 0:
        raise ParameterError("window start must be nonnegative")
    return _run(variant, [v % q for v in window], s, c, k, q, upto)


def recurrence_holds(variant: Variant, terms: Sequence[int], start: int, c: int, k: int,
                     q: int) -> bool:
    """Check every length-(k+1) window of terms u_start.. against the recursion."""
    coef = coefficients(variant, k, q)
    for off in range(len(terms) - k):
        i = start + off
        total = sum(coef[j] * terms[off + k - j] for j in range(k + 1))
        if (total - rhs(variant, c, i, q)) % q:
            return False
    return True


# -- closed form ------------------------------------------------------------

def _sign(variant: Variant, x: int) -> int:
    return -1 if variant is Variant.NLR1 and x % 2 else 1


def _mapped(variant: Variant, points, q):
    return [(x, _sign(variant, x) * u % q) for x, u in points]


def _poly_mul_linear(poly: list[int], root: int, q: int) -> list[int]:
    # poly·(X - root)
    out = [0] * (len(poly) + 1)
    for i, a in enumerate(poly):
        out[i] = (out[i] - root * a) % q
        out[i + 1] = (out[i + 1] + a) % q
    return out


def lagrange_coefficients(points: Sequence[tuple[int, int]], q: int) -> list[int]:
    """Coefficients (low → high) of the interpolating polynomial, via the Lagrange basis."""
    n = len(points)
    total = [0] * n
    for i, (xi, yi) in enumerate(points):
        basis = [1]
        denom = 1
        for j, (xj, _) in enumerate(points):
            if j != i:
                basis = _poly_mul_linear(basis, xj, q)
                denom = denom * (xi - xj) % q
        scale = yi * pow(denom, -1, q) % q
        for d in range(n):
            total[d] = (total[d] + scale * basis[d]) % q
    return total


def solve_linear(matrix: list[list[int]], rhs_vec: list[int], q: int) -> list[int]:
    """Gauss-Jordan elimination over GF(q) for a square nonsingular system."""
    n = len(matrix)
    rows = [[v % q for v in row] + [b % q] for row, b in zip(matrix, rhs_vec)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            raise ParameterError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = pow(rows[col][col], -1, q)
        rows[col] = [v * inv % q for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % q for a, b in zip(rows[r], rows[col])]
    return [row[n] for row in rows]


def vandermonde_coefficients(points: Sequence[tuple[int, int]], q: int) -> list[int]:
    n = len(points)
    matrix = [[pow(x, d, q) for d in range(n)] for x, _ in points]
    return solve_linear(matrix, [y for _, y in points], q)


def recover_polynomial(variant: Variant, points: Sequence[tuple[int, int]], k: int, q: int,
                       method: str = "lagrange") -> RecoveredPolynomial:
    """Coefficients A_0..A_{k+1} of P from exactly k + 2 points (x, u_x).

    For NLR1 the sign (-1)^x is stripped here, so callers always pass raw terms.
    """
    if len(points) < k + 2:
        raise InsufficientSharesError(f"need {k + 2} points, got {len(points)}")
    if len(points) > k + 2:
        raise ParameterError(f"need exactly {k + 2} points, got {len(points)}")
    residues = [x % q for x, _ in points]
    if len(set(residues)) != len(residues):
        raise ParameterError("interpolation points must have distinct x mod q")
    mapped = _mapped(variant, points, q)
    if method == "lagrange":
        coeffs = lagrange_coefficients(mapped, q)
    elif method == "gauss":
        coeffs = vandermonde_coefficients(mapped, q)
    else:
        raise ParameterError(f"unknown interpolation method {method!r}")
    return RecoveredPolynomial(tuple(coeffs))


def eval_closed_form(variant: Variant, poly: RecoveredPolynomial, i: int, q: int) -> int:
    acc = 0
    for a in reversed(poly.coeffs):
        acc = (acc * i + a) % q
    return _sign(variant, i) * acc % q


def completions(variant: Variant, points: Sequence[tuple[int, int]], k: int, q: int,
               target: int) -> list[int]:
    """Values v such that some closed-form sequence (deg P ≤ k + 1) passes through
    the k + 1 given points and (target, v).  Exhaustive over GF(q)."""
    out = []
    for v in range(q):
        extended = list(points) + [(target, v)]
        poly = recover_polynomial(variant, extended, k, q)
        if all(eval_closed_form(variant, poly, x, q) == u % q for x, u in extended):
            out.append(v)
    return out
