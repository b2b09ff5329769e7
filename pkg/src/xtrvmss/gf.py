"""Field tower GF(p) ⊂ GF(p²) ⊂ GF(p⁶) for primes p ≡ 2 (mod 3).

GF(p²) elements are stored in the basis {α, α²} with α a primitive cube
root of unity, so ``1 = -α - α²`` and the p-th power map is a coordinate
swap.  GF(p⁶) is modelled as GF(p²)[θ]/F(c, θ) with
``F(c, X) = X³ - cX² + c^p X - 1``; each distinct ``c`` gives its own
:class:`Gfp6Field` context.

Elements of GF(p) are plain Python ints reduced mod p.
"""

from __future__ import annotations

from functools import cached_property

from .errors import ParameterError, VmssError


def _mul2(x1, x2, y1, y2):
    # unreduced product in basis {α, α²}: α² = α², α³ = 1, α⁴ = α
    t1 = x1 * y1
    t2 = x2 * y2
    s = (x1 + x2) * (y1 + y2) - t1 - t2
    return t2 - s, t1 - s


class Gfp2:
    """Element z1·α + z2·α² of GF(p²)."""

    __slots__ = ("z1", "z2", "p")

    def __init__(self, z1: int, z2: int, p: int):
        self.z1 = z1 % p
        self.z2 = z2 % p
        self.p = p

    @classmethod
    def from_int(cls, n: int, p: int) -> Gfp2:
        return cls(-n, -n, p)

    @classmethod
    def zero(cls, p: int) -> Gfp2:
        return cls(0, 0, p)

    @classmethod
    def one(cls, p: int) -> Gfp2:
        return cls(-1, -1, p)

    def _check(self, other):
        if not isinstance(other, Gfp2):
            return NotImplemented
        if other.p != self.p:
            raise ParameterError(f"GF(p^2) modulus mismatch: {self.p} vs {other.p}")
        return other

    def __add__(self, other):
        if isinstance(other, int):
            other = Gfp2.from_int(other, self.p)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Gfp2(self.z1 + other.z1, self.z2 + other.z2, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = Gfp2.from_int(other, self.p)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Gfp2(self.z1 - other.z1, self.z2 - other.z2, self.p)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Gfp2(-self.z1, -self.z2, self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return Gfp2(self.z1 * other, self.z2 * other, self.p)
        if self._check(other) is NotImplemented:
            return NotImplemented
        r1, r2 = _mul2(self.z1, self.z2, other.z1, other.z2)
        return Gfp2(r1, r2, self.p)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Gfp2:
        if n < 0:
            return self.inv() ** (-n)
        result = Gfp2.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = Gfp2.from_int(other, self.p)
        if not isinstance(other, Gfp2):
            return NotImplemented
        return self.p == other.p and self.z1 == other.z1 and self.z2 == other.z2

    def __hash__(self):
        return hash((self.z1, self.z2, self.p))

    def __repr__(self):
        return f"Gfp2({self.z1}, {self.z2}, p={self.p})"

    def __bool__(self):
        return bool(self.z1 or self.z2)

    def frobenius(self) -> Gfp2:
        """a^p, which is the coordinate swap because α^p = α² when p ≡ 2 (mod 3)."""
        return Gfp2(self.z2, self.z1, self.p)

    def norm(self) -> int:
        """a^(p+1), an element of GF(p)."""
        z1, z2 = self.z1, self.z2
        return (z1 * z1 + z2 * z2 - z1 * z2) % self.p

    def inv(self) -> Gfp2:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in GF(p^2)")
        n_inv = pow(n, -1, self.p)
        return Gfp2(self.z2 * n_inv, self.z1 * n_inv, self.p)

    def in_base_field(self) -> bool:
        return self.z1 == self.z2

    def to_str(self) -> str:
        return f"{self.z1},{self.z2}"

    @classmethod
    def parse(cls, text: str, p: int) -> Gfp2:
        parts = text.strip().split(",")
        if len(parts) != 2:
            raise ParameterError(f"expected two coordinates, got {text!r}")
        z1, z2 = (int(s) for s in parts)
        if not (0 <= z1 < p and 0 <= z2 < p):
            raise ParameterError(f"coordinate out of range in {text!r}")
        return cls(z1, z2, p)


class Gfp6Field:
    """The ring GF(p²)[θ]/F(c, θ); a field exactly when F(c, X) is irreducible."""

    def __init__(self, c: Gfp2):
        self.p = c.p
        self.c = c
        self.cp = c.frobenius()
        p = self.p
        # θ⁴ = (c² - c^p)θ² + (1 - c^(p+1))θ + c
        self._c = (c.z1, c.z2)
        self._cp = (self.cp.z1, self.cp.z2)
        e1 = Gfp2.one(p) - c * self.cp
        e2 = c * c - self.cp
        self._e1 = (e1.z1, e1.z2)
        self._e2 = (e2.z1, e2.z2)

    def __eq__(self, other):
        return isinstance(other, Gfp6Field) and self.p == other.p and self.c == other.c

    def __hash__(self):
        return hash(("Gfp6Field", self.p, self.c.z1, self.c.z2))

    def __repr__(self):
        return f"Gfp6Field(c={self.c.to_str()}, p={self.p})"

    def element(self, a0: Gfp2, a1: Gfp2, a2: Gfp2) -> Gfp6:
        return Gfp6((a0.z1, a0.z2, a1.z1, a1.z2, a2.z1, a2.z2), self)

    def embed(self, a: Gfp2) -> Gfp6:
        return Gfp6((a.z1, a.z2, 0, 0, 0, 0), self)

    def one(self) -> Gfp6:
        p = self.p
        return Gfp6((p - 1, p - 1, 0, 0, 0, 0), self)

    def zero(self) -> Gfp6:
        return Gfp6((0, 0, 0, 0, 0, 0), self)

    def theta(self) -> Gfp6:
        p = self.p
        return Gfp6((0, 0, p - 1, p - 1, 0, 0), self)

    @cached_property
    def theta_frob(self) -> Gfp6:
        """θ^(p²) mod F(c, θ)."""
        return self.theta() ** (self.p * self.p)

    @cached_property
    def _conjugate_powers(self):
        # (θ^(p²), θ^(2p²)) and (θ^(p⁴), θ^(2p⁴))
        t1 = self.theta_frob
        t2 = t1.frobenius_p2()
        return ((t1, t1 * t1), (t2, t2 * t2))

    def parse(self, text: str) -> Gfp6:
        parts = [int(s) for s in text.strip().split(",")]
        if len(parts) != 6:
            raise ParameterError(f"expected six coordinates, got {text!r}")
        if any(not (0 <= v < self.p) for v in parts):
            raise ParameterError(f"coordinate out of range in {text!r}")
        return Gfp6(tuple(parts), self)


class Gfp6:
    """a0 + a1·θ + a2·θ² with coefficients in GF(p²); stored as six ints."""

    __slots__ = ("v", "field")

    def __init__(self, v: tuple, field: Gfp6Field):
        p = field.p
        self.v = tuple(x % p for x in v)
        self.field = field

    @property
    def a0(self) -> Gfp2:
        return Gfp2(self.v[0], self.v[1], self.field.p)

    @property
    def a1(self) -> Gfp2:
        return Gfp2(self.v[2], self.v[3], self.field.p)

    @property
    def a2(self) -> Gfp2:
        return Gfp2(self.v[4], self.v[5], self.field.p)

    def _check(self, other):
        if not isinstance(other, Gfp6):
            return False
        if other.field is not self.field and other.field != self.field:
            raise ParameterError("GF(p^6) elements built over different F(c, X)")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        return Gfp6(tuple(x + y for x, y in zip(self.v, other.v)), self.field)

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return Gfp6(tuple(x - y for x, y in zip(self.v, other.v)), self.field)

    def __neg__(self):
        return Gfp6(tuple(-x for x in self.v), self.field)

    def scale(self, s: Gfp2) -> Gfp6:
        """Multiply by a GF(p²) scalar."""
        a, b = s.z1, s.z2
        v = self.v
        r0 = _mul2(v[0], v[1], a, b)
        r1 = _mul2(v[2], v[3], a, b)
        r2 = _mul2(v[4], v[5], a, b)
        return Gfp6(r0 + r1 + r2, self.field)

    def __mul__(self, other):
        if isinstance(other, Gfp2):
            return self.scale(other)
        if not self._check(other):
            return NotImplemented
        f = self.field
        a01, a02, a11, a12, a21, a22 = self.v
        b01, b02, b11, b12, b21, b22 = other.v
        d0 = _mul2(a01, a02, b01, b02)
        x = _mul2(a01, a02, b11, b12)
        y = _mul2(a11, a12, b01, b02)
        d1 = (x[0] + y[0], x[1] + y[1])
        x = _mul2(a01, a02, b21, b22)
        y = _mul2(a11, a12, b11, b12)
        z = _mul2(a21, a22, b01, b02)
        d2 = (x[0] + y[0] + z[0], x[1] + y[1] + z[1])
        x = _mul2(a11, a12, b21, b22)
        y = _mul2(a21, a22, b11, b12)
        p = f.p
        d3 = ((x[0] + y[0]) % p, (x[1] + y[1]) % p)
        d4 = _mul2(a21, a22, b21, b22)
        d4 = (d4[0] % p, d4[1] % p)
        # θ³ = cθ² - c^pθ + 1 ;  θ⁴ = e2·θ² + e1·θ + c
        c, cp, e1, e2 = f._c, f._cp, f._e1, f._e2
        t = _mul2(d4[0], d4[1], c[0], c[1])
        r0 = (d0[0] + d3[0] + t[0], d0[1] + d3[1] + t[1])
        t1 = _mul2(d3[0], d3[1], cp[0], cp[1])
        t2 = _mul2(d4[0], d4[1], e1[0], e1[1])
        r1 = (d1[0] - t1[0] + t2[0], d1[1] - t1[1] + t2[1])
        t1 = _mul2(d3[0], d3[1], c[0], c[1])
        t2 = _mul2(d4[0], d4[1], e2[0], e2[1])
        r2 = (d2[0] + t1[0] + t2[0], d2[1] + t1[1] + t2[1])
        return Gfp6((r0[0], r0[1], r1[0], r1[1], r2[0], r2[1]), f)

    def __pow__(self, n: int) -> Gfp6:
        if n < 0:
            raise ParameterError("negative exponent")
        if n == 0:
            return self.field.one()
        base = self
        result = self
        for bit in bin(n)[3:]:
            result = result * result
            if bit == "1":
                result = result * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Gfp6):
            return NotImplemented
        return self.v == other.v and self.field == other.field

    def __hash__(self):
        return hash((self.v, self.field.p))

    def __repr__(self):
        return f"Gfp6({self.to_str()})"

    def is_zero(self) -> bool:
        return not any(self.v)

    def is_one(self) -> bool:
        p = self.field.p
        return self.v == (p - 1, p - 1, 0, 0, 0, 0)

    def frobenius_p2(self) -> Gfp6:
        """a^(p²): GF(p²) coefficients are fixed, θ maps to θ^(p²)."""
        t = self.field.theta_frob
        return self.field.embed(self.a0) + t.scale(self.a1) + (t * t).scale(self.a2)

    def conjugates(self) -> tuple[Gfp6, Gfp6, Gfp6]:
        """(a, a^(p²), a^(p⁴))."""
        f = self.field
        a0 = f.embed(self.a0)
        out = [self]
        for t, t_sq in f._conjugate_powers:
            out.append(a0 + t.scale(self.a1) + t_sq.scale(self.a2))
        return tuple(out)

    def trace(self) -> Gfp2:
        """a + a^(p²) + a^(p⁴), checked to land in GF(p²)."""
        s0, s1, s2 = self.conjugates()
        total = s0 + s1 + s2
        if any(total.v[2:]):
            raise VmssError("trace left GF(p^2): corrupted field context")
        return total.a0

    def to_str(self) -> str:
        return ",".join(str(x) for x in self.v)


def gfp2_mul(a: Gfp2, b: Gfp2) -> Gfp2:
    return a * b


def gfp2_frobenius(a: Gfp2) -> Gfp2:
    return a.frobenius()


def gfp2_inv(a: Gfp2) -> Gfp2:
    return a.inv()


def gfp6_mul(a: Gfp6, b: Gfp6) -> Gfp6:
    return a * b


def gfp6_pow(a: Gfp6, n: int) -> Gfp6:
    return a ** n


def gfp6_trace(a: Gfp6) -> Gfp2:
    return a.trace()


# -- polynomials over GF(p²), coefficient lists low → high -------------------

def _trim(poly):
    while poly and not poly[-1]:
        poly = poly[:-1]
    return poly


def _poly_rem(a, b):
    a = _trim(list(a))
    b = _trim(list(b))
    lead_inv = b[-1].inv()
    while len(a) >= len(b):
        factor = a[-1] * lead_inv
        shift = len(a) - len(b)
        for i, coeff in enumerate(b):
            a[shift + i] = a[shift + i] - factor * coeff
        a = _trim(a)
    return a


def poly_gcd(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_rem(a, b)
    return a


def cubic_coefficients(c: Gfp2) -> list[Gfp2]:
    """F(c, X) = X³ - cX² + c^p X - 1, low → high."""
    p = c.p
    return [-Gfp2.one(p), c.frobenius(), -c, Gfp2.one(p)]


def cubic_irreducible(c: Gfp2) -> bool:
    """True iff F(c, X) has no root in GF(p²), i.e. gcd(X^(p²) - X, F) = 1."""
    ring = Gfp6Field(c)
    h = ring.theta_frob - ring.theta()
    if h.is_zero():
        return False
    g = poly_gcd(cubic_coefficients(c), [h.a0, h.a1, h.a2])
    return len(g) == 1
