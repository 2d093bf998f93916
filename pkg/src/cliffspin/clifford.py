"""Exact complex Clifford algebra Cl_m(C) with e_i e_j + e_j e_i = -2 delta_ij.

Blades are encoded as bitmaps (bit ``i-1`` set for ``e_i``); coefficients are
exact scalars from :mod:`cliffspin.scalars`.  The real algebra Cl_m is the
subset with vanishing imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from . import scalars
from .scalars import ExactComplex, Q, as_scalar, conj, fmt_rational, re_im

__all__ = [
    "Multivector",
    "VersorProduct",
    "blade_sign",
    "geometric_product",
    "reversion",
    "grade_involution",
    "clifford_conjugate",
    "hermitian_dagger",
    "grade_project",
    "reflect_vector",
    "spin_act",
    "witt_frame",
    "spinor_space",
    "primitive_idempotent",
    "blade_indices",
]

_SIGN = {}


def blade_sign(a: int, b: int) -> int:
    """Sign of e_A e_B = sign * e_{A xor B} in the negative-definite algebra."""
    key = (a, b)
    s = _SIGN.get(key)
    if s is None:
        swaps = 0
        t = a >> 1
        while t:
            swaps += (t & b).bit_count()
            t >>= 1
        swaps += (a & b).bit_count()  # each e_i^2 = -1
        s = -1 if swaps & 1 else 1
        _SIGN[key] = s
    return s


def blade_indices(blade: int) -> tuple[int, ...]:
    out = []
    i = 1
    while blade:
        if blade & 1:
            out.append(i)
        blade >>= 1
        i += 1
    return tuple(out)


def blade_from_indices(indices) -> tuple[int, int]:
    """Bitmap and sign of the ordered product e_{i1} e_{i2} ..."""
    blade, sign = 0, 1
    for i in indices:
        b = 1 << (i - 1)
        sign *= blade_sign(blade, b)
        blade ^= b
    return blade, sign


# Raw coefficient dictionaries (blade -> scalar) are the workhorse format shared
# with the fields module; Multivector wraps one of these together with ``dim``.

def mul_raw(a: dict, b: dict) -> dict:
    if len(b) == 1 and 0 in b:
        s = b[0]
        return {k: v * s for k, v in a.items()}
    if len(a) == 1 and 0 in a:
        s = a[0]
        return {k: s * v for k, v in b.items()}
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka ^ kb
            v = va * vb
            if blade_sign(ka, kb) < 0:
                v = -v
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def add_into(acc: dict, b: dict, scale=1):
    for k, v in b.items():
        w = acc.get(k, 0) + (v * scale if scale != 1 else v)
        if w:
            acc[k] = w
        else:
            acc.pop(k, None)
    return acc


def _grade_sign_rev(r):
    return -1 if (r * (r - 1) // 2) & 1 else 1


class Multivector:
    """Immutable element of Cl_m(C)."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        self.dim = dim
        clean = {}
        if terms:
            limit = 1 << dim
            for k, v in terms.items():
                if not 0 <= k < limit:
                    raise ValueError(f"blade {blade_indices(k)} outside Cl_{dim}")
                v = as_scalar(v)
                if v:
                    clean[k] = v
        self.terms = clean

    @classmethod
    def _raw(cls, dim, terms):
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.terms = terms
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def scalar(cls, dim, c=1):
        return cls(dim, {0: c})

    @classmethod
    def basis(cls, dim, i):
        if not 1 <= i <= dim:
            raise ValueError(f"e_{i} is not a generator of Cl_{dim}")
        return cls._raw(dim, {1 << (i - 1): 1})

    @classmethod
    def blade(cls, dim, indices, c=1):
        if any(not 1 <= i <= dim for i in indices):
            raise ValueError(f"blade {tuple(indices)} outside Cl_{dim}")
        b, s = blade_from_indices(indices)
        return cls(dim, {b: s * as_scalar(c)})

    @classmethod
    def vector(cls, dim, comps):
        comps = list(comps)
        if len(comps) != dim:
            raise ValueError("vector length must equal dim")
        return cls(dim, {1 << i: c for i, c in enumerate(comps)})

    def generators(self):
        return [Multivector.basis(self.dim, i) for i in range(1, self.dim + 1)]

    # arithmetic --------------------------------------------------------
    def _check(self, other):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: Cl_{self.dim} vs Cl_{other.dim}")

    def _coerce(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return other
        return Multivector(self.dim, {0: as_scalar(other)})

    def __add__(self, other):
        other = self._coerce(other)
        return Multivector._raw(self.dim, add_into(dict(self.terms), other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Multivector._raw(self.dim, add_into(dict(self.terms), other.terms, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Multivector._raw(self.dim, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector._raw(self.dim, mul_raw(self.terms, other.terms))
        c = as_scalar(other)
        if not c:
            return Multivector._raw(self.dim, {})
        return Multivector._raw(self.dim, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other):
        c = as_scalar(other)
        if not c:
            return Multivector._raw(self.dim, {})
        return Multivector._raw(self.dim, {k: c * v for k, v in self.terms.items()})

    def __truediv__(self, other):
        c = as_scalar(other)
        return Multivector._raw(self.dim, {k: scalars.div(v, c) for k, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        out = Multivector.scalar(self.dim, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return self.dim == other.dim and self.terms == other.terms
        try:
            c = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({0: c} if c else {})

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # involutions --------------------------------------------------------
    def _signed(self, fn):
        return Multivector._raw(self.dim, {k: (v if fn(k.bit_count()) > 0 else -v) for k, v in self.terms.items()})

    def reversion(self):
        return self._signed(_grade_sign_rev)

    def grade_involution(self):
        return self._signed(lambda r: -1 if r & 1 else 1)

    def clifford_conjugate(self):
        return self._signed(lambda r: _grade_sign_rev(r) * (-1 if r & 1 else 1))

    def complex_conjugate(self):
        return Multivector._raw(self.dim, {k: conj(v) for k, v in self.terms.items()})

    def dagger(self):
        """Complex conjugation composed with reversion."""
        return self.reversion().complex_conjugate()

    # parts ---------------------------------------------------------------
    def grade(self, r: int):
        if not 0 <= r <= self.dim:
            raise ValueError(f"grade {r} out of range for Cl_{self.dim}")
        return Multivector._raw(self.dim, {k: v for k, v in self.terms.items() if k.bit_count() == r})

    def grades(self):
        return sorted({k.bit_count() for k in self.terms})

    def scalar_part(self):
        return self.terms.get(0, 0)

    def coefficient(self, indices):
        b, s = blade_from_indices(indices)
        return s * self.terms.get(b, 0)

    def is_vector(self):
        return all(k.bit_count() == 1 for k in self.terms)

    def vector_components(self):
        if not self.is_vector():
            raise ValueError("not a grade-1 element")
        return [self.terms.get(1 << i, 0) for i in range(self.dim)]

    def norm_sq(self):
        """Sum of |coefficient|^2, exact."""
        total = 0
        for v in self.terms.values():
            re, im = re_im(v)
            total += re * re + im * im
        return total

    # output ----------------------------------------------------------------
    def to_json(self):
        out = []
        for k in sorted(self.terms, key=lambda b: (b.bit_count(), blade_indices(b))):
            re, im = re_im(self.terms[k])
            out.append({"blade": list(blade_indices(k)), "re": fmt_rational(re), "im": fmt_rational(im)})
        return {"dim": self.dim, "terms": out}

    @classmethod
    def from_json(cls, data):
        terms = {}
        for t in data["terms"]:
            b, s = blade_from_indices(t["blade"])
            c = ExactComplex.make(Q(t["re"]), Q(t.get("im", "0")))
            terms[b] = terms.get(b, 0) + s * c
        return cls(int(data["dim"]), terms)

    def to_latex(self):
        return format_terms(
            ((k, v) for k, v in sorted(self.terms.items(), key=lambda kv: (kv[0].bit_count(), blade_indices(kv[0])))),
            lambda k: blade_latex(k),
        )

    def __str__(self):
        return self.to_latex()

    def __repr__(self):
        return f"Multivector({self.dim}, {self.to_latex()!r})"


def blade_latex(blade):
    if blade == 0:
        return ""
    return "e_{" + "".join(str(i) if i < 10 else f"({i})" for i in blade_indices(blade)) + "}"


def scalar_latex(c):
    re, im = re_im(c)
    if im == 0:
        return fmt_rational(re)
    if re == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{fmt_rational(im)}i"
    sign = "+" if im > 0 else "-"
    mag = abs(im)
    return f"({fmt_rational(re)}{sign}{'' if mag == 1 else fmt_rational(mag)}i)"


def format_terms(items, body):
    """Join ``coefficient\\,body`` pieces with signs, LaTeX style."""
    parts = []
    for key, c in items:
        b = body(key)
        re, im = re_im(c)
        neg = (im == 0 and re < 0) or (re == 0 and im < 0)
        mag = -c if neg else c
        coeff = scalar_latex(mag)
        if b:
            piece = b if coeff == "1" else f"{coeff}\\,{b}"
        else:
            piece = coeff
        if not parts:
            parts.append(("-" if neg else "") + piece)
        else:
            parts.append((" - " if neg else " + ") + piece)
    return "".join(parts) if parts else "0"


# --- module-level operations named after the contract ----------------------

def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a * b


def reversion(a: Multivector) -> Multivector:
    return a.reversion()


def grade_involution(a: Multivector) -> Multivector:
    return a.grade_involution()


def clifford_conjugate(a: Multivector) -> Multivector:
    return a.clifford_conjugate()


def hermitian_dagger(a: Multivector) -> Multivector:
    return a.dagger()


def grade_project(a: Multivector, r: int) -> Multivector:
    return a.grade(r)


def _vec(dim, a):
    if isinstance(a, Multivector):
        if not a.is_vector():
            raise ValueError("reflector must be a grade-1 element")
        return a
    return Multivector.vector(dim, [as_scalar(c) for c in a])


def reflect_vector(a, x: Multivector) -> Multivector:
    """Reflection ``a x a / |a|^2`` along the (not necessarily unit) vector ``a``."""
    a = _vec(x.dim, a)
    n = a.norm_sq()
    if not n:
        raise ValueError("cannot reflect along the zero vector")
    return (a * x * a) / n


@dataclass(frozen=True)
class VersorProduct:
    """Product y_1 ... y_p of nonzero rational vectors, acting by scaled reflections."""

    dim: int
    factors: tuple

    def __post_init__(self):
        fs = []
        for y in self.factors:
            y = tuple(as_scalar(c) for c in y)
            if len(y) != self.dim:
                raise ValueError("factor length must equal dim")
            if not any(y):
                raise ValueError("versor factors must be nonzero")
            fs.append(y)
        object.__setattr__(self, "factors", tuple(fs))

    @classmethod
    def identity(cls, dim):
        return cls(dim, ())

    @property
    def parity(self):
        return "even" if len(self.factors) % 2 == 0 else "odd"

    def multivector(self) -> Multivector:
        out = Multivector.scalar(self.dim, 1)
        for y in self.factors:
            out = out * Multivector.vector(self.dim, y)
        return out

    def norm_sq(self):
        """Product of |y_i|^2; s s~ = (-1)^p times this."""
        return reduce(lambda acc, y: acc * sum(c * c for c in y), self.factors, 1)

    def reverse(self) -> "VersorProduct":
        return VersorProduct(self.dim, tuple(reversed(self.factors)))

    def matrix(self):
        """Rational orthogonal matrix O with O e_i = s e_i s~ / |s|^2 (columns)."""
        cols = [spin_act(self, Multivector.basis(self.dim, i)).vector_components() for i in range(1, self.dim + 1)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def apply_vector(self, comps):
        x = Multivector.vector(self.dim, comps)
        return spin_act(self, x).vector_components()

    def __mul__(self, other: "VersorProduct") -> "VersorProduct":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return VersorProduct(self.dim, self.factors + other.factors)


def spin_act(s: VersorProduct, x: Multivector) -> Multivector:
    """Twisted adjoint ``s x s~ / |s|^2``, applied one scaled reflection at a time."""
    if s.dim != x.dim:
        raise ValueError("dimension mismatch")
    out = x
    for y in reversed(s.factors):
        yv = Multivector.vector(s.dim, y)
        out = (yv * out * yv) / sum(c * c for c in y)
    return out


def witt_frame(m: int, pairing: str = "split"):
    """Witt basis ``f_j = (e_a - i e_b)/2``, ``f_j^dag = -(e_a + i e_b)/2``.

    ``pairing="split"`` pairs (j, j+n) for m = 2n; ``"adjacent"`` pairs
    (2s-1, 2s).  Returns ``(f, fdag, pairs)``.
    """
    if pairing == "split":
        if m % 2:
            raise ValueError("the (j, j+n) Witt pairing needs even m")
        n = m // 2
        pairs = [(j, j + n) for j in range(1, n + 1)]
    elif pairing == "adjacent":
        if m < 2:
            raise ValueError("need m >= 2")
        pairs = [(2 * s - 1, 2 * s) for s in range(1, m // 2 + 1)]
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    half = Q(1, 2)
    f, fd = [], []
    for a, b in pairs:
        ea, eb = Multivector.basis(m, a), Multivector.basis(m, b)
        f.append((ea - scalars.I * eb) * half)
        fd.append(-(ea + scalars.I * eb) * half)
    return f, fd, pairs


def primitive_idempotent(m: int, pairing: str = "split") -> Multivector:
    f, fd, _ = witt_frame(m, pairing)
    out = Multivector.scalar(m, 1)
    for a, b in zip(f, fd):
        out = out * a * b
    return out


def spinor_space(m: int, pairing: str = "split"):
    """Idempotent ``I`` and a basis of the left ideal Cl_m(C) I (dimension 2^(m/2))."""
    if m % 2:
        raise ValueError("spinor space construction needs even m")
    from .linalg import independent_subset

    idem = primitive_idempotent(m, pairing)
    candidates = [Multivector._raw(m, {b: 1}) * idem for b in range(1 << m)]
    blades = sorted({k for c in candidates for k in c.terms})
    rows = [[c.terms.get(k, 0) for k in blades] for c in candidates]
    keep = independent_subset(rows)
    return idem, [candidates[i] for i in keep]
