"""XTR parameters, the trace ladder c_n = Tr(g^n), keys and scalar encryption.

The ladder works on the triple S_u = (c_{u-1}, c_u, c_{u+1}) using the
standard XTR identities

    c_{2u}   = c_u² - 2·c_u^p
    c_{2u-1} = c_{u-1}·c_u - c^p·c_u^p + c_{u+1}^p
    c_{2u+1} = c_u·c_{u+1} - c·c_u^p + c_{u-1}^p

so only GF(p²) arithmetic is needed.  They hold for the trace of any
element whose order divides p² - p + 1, which is why a public key y can
stand in for c when computing Tr(g^(bx)).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from .errors import (
    BlindingDegenerateError,
    CorruptCiphertextError,
    GenerationError,
    ParameterError,
)
from .gf import Gfp2, Gfp6, Gfp6Field, cubic_irreducible
from .primes import is_prime, prime_factors, random_prime

MIN_LAMBDA = 5
# Up to this size p² - p + 1 is factored directly; above it q is chosen first.
SMALL_LAMBDA = 16
# Large path: q has this many fewer bits than p, leaving room to search p ≡ r (mod q).
Q_BIT_GAP = 10
# Digit width of the fixed-base table behind XtrParams.g_pow.
G_WINDOW = 4


@dataclass(frozen=True)
class XtrParams:
    lam: int
    p: int
    q: int
    field: Gfp6Field
    g: Gfp6

    @property
    def c(self) -> Gfp2:
        return self.field.c

    @property
    def theta_frob(self) -> Gfp6:
        return self.field.theta_frob

    @property
    def cofactor(self) -> int:
        return (self.p * self.p - self.p + 1) // self.q

    @cached_property
    def _g_table(self):
        # row j holds g^(d·16^j) for d = 0..15
        rows = []
        base = self.g
        for _ in range(-(-self.q.bit_length() // G_WINDOW)):
            row = [self.field.one(), base]
            for _ in range((1 << G_WINDOW) - 2):
                row.append(row[-1] * base)
            rows.append(row)
            base = row[-1] * base
        return rows

    def g_pow(self, n: int) -> Gfp6:
        """g^(n mod q) from a fixed-window table of powers of g."""
        n %= self.q
        result = None
        mask = (1 << G_WINDOW) - 1
        for row in self._g_table:
            if not n:
                break
            d = n & mask
            if d:
                result = row[d] if result is None else result * row[d]
            n >>= G_WINDOW
        return result if result is not None else self.field.one()

    def validate(self) -> None:
        p, q = self.p, self.q
        if p <= 3 or p % 3 != 2 or not is_prime(p):
            raise ParameterError(f"p={p} is not a prime ≡ 2 (mod 3)")
        if q <= 3 or not is_prime(q) or (p * p - p + 1) % q:
            raise ParameterError(f"q={q} is not a prime divisor of p^2 - p + 1 above 3")
        if not cubic_irreducible(self.c):
            raise ParameterError("F(c, X) is reducible")
        if self.g.is_one() or not (self.g ** q).is_one():
            raise ParameterError("g does not have order q")
        if self.g.trace() != self.c:
            raise ParameterError("Tr(g) differs from c")


@dataclass(frozen=True)
class XtrKeypair:
    x: int
    y: Gfp2


@dataclass(frozen=True)
class ScalarCiphertext:
    header: Gfp2
    body: int


def trace_ladder(c: Gfp2, n: int) -> Gfp2:
    """c_n = Tr(g^n) where c = Tr(g)."""
    if n < 0:
        return trace_ladder(c, -n).frobenius()
    p = c.p
    if n == 0:
        return Gfp2.from_int(3, p)
    # Coordinates are handled as bare ints: (x1, x2)·(y1, y2) =
    # (x2y2 - x1y2 - x2y1, x1y1 - x1y2 - x2y1), the p-th power swaps them.
    c1, c2 = c.z1, c.z2
    m1, m2 = c1, c2
    t = 2 * c1 * c2
    h1, h2 = (c2 * c2 - t - 2 * c2) % p, (c1 * c1 - t - 2 * c1) % p
    l1 = l2 = (-3) % p
    for bit in bin(n)[3:]:
        t = 2 * m1 * m2
        sq1, sq2 = m2 * m2 - t - 2 * m2, m1 * m1 - t - 2 * m1  # mid² - 2·mid^p
        # mid·hi - c·mid^p + lo^p   (mid^p = (m2, m1), lo^p = (l2, l1))
        u = m1 * h2 + m2 * h1
        v = c1 * m1 + c2 * m2
        mh1 = m2 * h2 - u - (c2 * m1 - v) + l2
        mh2 = m1 * h1 - u - (c1 * m2 - v) + l1
        if bit == "0":
            # lo·mid - c^p·mid^p + hi^p   (c^p = (c2, c1))
            u = l1 * m2 + l2 * m1
            w = c2 * m1 + c1 * m2
            lm1 = l2 * m2 - u - (c1 * m1 - w) + h2
            lm2 = l1 * m1 - u - (c2 * m2 - w) + h1
            l1, l2 = lm1 % p, lm2 % p
            m1, m2, h1, h2 = sq1 % p, sq2 % p, mh1 % p, mh2 % p
        else:
            t = 2 * h1 * h2
            hs1, hs2 = h2 * h2 - t - 2 * h2, h1 * h1 - t - 2 * h1
            l1, l2 = sq1 % p, sq2 % p
            m1, m2, h1, h2 = mh1 % p, mh2 % p, hs1 % p, hs2 % p
    return Gfp2(m1, m2, p)


def trace_ladder_reference(c: Gfp2, n: int) -> Gfp2:
    """The same ladder written with Gfp2 operators; kept as a cross-check."""
    if n < 0:
        return trace_ladder_reference(c, -n).frobenius()
    p = c.p
    if n == 0:
        return Gfp2.from_int(3, p)
    cp = c.frobenius()
    lo, mid, hi = Gfp2.from_int(3, p), c, c * c - 2 * cp
    for bit in bin(n)[3:]:
        mid_p = mid.frobenius()
        if bit == "0":
            lo, mid, hi = (
                lo * mid - cp * mid_p + hi.frobenius(),
                mid * mid - 2 * mid_p,
                mid * hi - c * mid_p + lo.frobenius(),
            )
        else:
            lo, mid, hi = (
                mid * mid - 2 * mid_p,
                mid * hi - c * mid_p + lo.frobenius(),
                hi * hi - 2 * hi.frobenius(),
            )
    return mid


def _find_generator(p: int, q: int, rng: random.Random, attempts: int) -> tuple[Gfp6Field, Gfp6]:
    cofactor = (p * p - p + 1) // q
    for _ in range(attempts):
        c = Gfp2(rng.randrange(p), rng.randrange(p), p)
        if c.in_base_field() or not cubic_irreducible(c):
            continue
        h = Gfp6Field(c).theta()
        g = h ** cofactor
        if g.is_one():
            continue
        # Re-express g as θ over its own minimal polynomial F(Tr(g), X).
        field = Gfp6Field(g.trace())
        return field, field.theta()
    raise GenerationError(f"no generator of order {q} found in {attempts} attempts")


def params_from_primes(p: int, q: int, rng: random.Random, lam: int | None = None,
                       attempts: int = 1000) -> XtrParams:
    """Build parameters for a fixed prime pair, drawing a fresh Tr(g)."""
    if p % 3 != 2 or not is_prime(p) or p <= 3:
        raise ParameterError(f"p={p} must be a prime > 3 with p ≡ 2 (mod 3)")
    if q <= 3 or not is_prime(q) or (p * p - p + 1) % q:
        raise ParameterError(f"q={q} must be a prime > 3 dividing p^2 - p + 1")
    field, g = _find_generator(p, q, rng, attempts)
    params = XtrParams(lam or p.bit_length(), p, q, field, g)
    params.validate()
    return params


def _small_primes(lam: int, rng: random.Random, attempts: int) -> tuple[int, int]:
    for _ in range(attempts):
        p = random_prime(lam, rng, residue=(2, 3), attempts=1000)
        if p is None or p <= 3:
            continue
        candidates = [f for f in prime_factors(p * p - p + 1) if 3 < f < p]
        if candidates:
            return p, max(candidates)
    raise GenerationError(f"no prime pair found for lambda={lam}")


def _large_primes(lam: int, rng: random.Random, attempts: int) -> tuple[int, int]:
    from sympy.ntheory import sqrt_mod

    q_bits = lam - Q_BIT_GAP
    lo, hi = 1 << (lam - 1), (1 << lam) - 1
    for _ in range(attempts):
        q = random_prime(q_bits, rng, residue=(1, 3), attempts=10_000)
        if q is None:
            continue
        s = sqrt_mod(q - 3, q)
        inv2 = pow(2, -1, q)
        roots = [(1 + s) * inv2 % q, (1 - s) * inv2 % q]
        j_lo, j_hi = -(-lo // q), hi // q
        for _ in range(50 * lam):
            r = rng.choice(roots)
            p = r + rng.randint(j_lo, j_hi) * q
            if lo <= p <= hi and p % 3 == 2 and is_prime(p):
                return p, q
    raise GenerationError(f"no prime pair found for lambda={lam}")


def generate_params(lam: int, rng: random.Random, attempts: int = 200) -> XtrParams:
    """Random XTR parameters with a λ-bit p and a prime q | p² - p + 1, q < p."""
    if lam < MIN_LAMBDA:
        raise ParameterError(f"lambda must be at least {MIN_LAMBDA}")
    if lam <= SMALL_LAMBDA:
        p, q = _small_primes(lam, rng, attempts)
    else:
        p, q = _large_primes(lam, rng, attempts)
    return params_from_primes(p, q, rng, lam=lam)


def make_keypair(params: XtrParams, x: int) -> XtrKeypair:
    if not 1 < x < params.q:
        raise ParameterError(f"private key must satisfy 1 < x < q, got {x}")
    return XtrKeypair(x, trace_ladder(params.c, x))


def keygen(params: XtrParams, rng: random.Random) -> XtrKeypair:
    return make_keypair(params, rng.randrange(2, params.q))


def encode_to_zq(t: Gfp2, q: int) -> int:
    return (t.z1 + t.z2 * t.p) % q


def blinding_factor(y: Gfp2, b: int, q: int) -> int:
    """κ = encode(Tr(g^(bx))) computed from the public key y = Tr(g^x)."""
    return encode_to_zq(trace_ladder(y, b), q)


def check_blinding_exponent(params: XtrParams, b: int) -> None:
    if not 1 < b < params.q - 2:
        raise ParameterError(f"blinding exponent must satisfy 1 < b < q - 2, got {b}")


def encrypt_scalar(params: XtrParams, y: Gfp2, b: int, u: int) -> ScalarCiphertext:
    check_blinding_exponent(params, b)
    q = params.q
    if not 0 <= u < q:
        raise ParameterError(f"plaintext must lie in [0, q), got {u}")
    kappa = blinding_factor(y, b, q)
    if kappa == 0:
        raise BlindingDegenerateError("Tr(g^(bx)) encodes to 0 mod q; choose another b")
    return ScalarCiphertext(trace_ladder(params.c, b), kappa * u % q)


def decrypt_scalar(params: XtrParams, ct: ScalarCiphertext, x: int) -> int:
    if not 1 < x < params.q:
        raise ParameterError(f"private key must satisfy 1 < x < q, got {x}")
    q = params.q
    kappa = encode_to_zq(trace_ladder(ct.header, x), q)
    if kappa == 0:
        raise CorruptCiphertextError("blinding factor is 0 mod q")
    return ct.body * pow(kappa, -1, q) % q


def subgroup_check(params: XtrParams, t: Gfp6) -> bool:
    return not t.is_zero() and (t ** params.q).is_one()


# -- parameter file ---------------------------------------------------------

def params_to_text(params: XtrParams) -> str:
    lines = [
        f"lambda={params.lam}",
        f"p={params.p}",
        f"q={params.q}",
        f"c.z1={params.c.z1}",
        f"c.z2={params.c.z2}",
        f"g={params.g.to_str()}",
    ]
    return "\n".join(lines) + "\n"


def parse_key_values(text: str) -> dict[str, str]:
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"malformed line {raw!r}")
        out[key.strip()] = value.strip()
    return out


def params_from_fields(fields: dict[str, str]) -> XtrParams:
    try:
        p, q = int(fields["p"]), int(fields["q"])
        c = Gfp2(int(fields["c.z1"]), int(fields["c.z2"]), p)
        field = Gfp6Field(c)
        params = XtrParams(int(fields["lambda"]), p, q, field, field.parse(fields["g"]))
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc.args[0]!r}") from None
    params.validate()
    return params


def params_from_text(text: str) -> XtrParams:
    return params_from_fields(parse_key_values(text))
