"""Clifford-valued functions of (x, u, v) over the radial-Laurent ring.

A :class:`RadialField` is a finite sum ``c * e_A * x^a * u^b * v^g * r^k`` with
``r = |x|`` and ``k`` any integer.  Terms are kept in a canonical reduced form:
the exponent of ``x_m`` is always 0 or 1, every ``x_m^2`` being rewritten as
``r^2 - (x_1^2 + ... + x_{m-1}^2)``.  Over ``Q[x', r, 1/r]`` the ring is free
with basis ``{1, x_m}``, so the reduced form is unique and the zero test is the
empty-term check.

Internally a field is ``dict[code -> scalar]``.  A code packs the blade bitmap
in its low ``m`` bits, then one byte per exponent (x block, u block, v block)
and a biased 16-bit radial power on top, so that multiplying monomials is
integer addition.  Operators (:class:`LinOperator`) act from the left and are
determined by their memoized images on scalar monomials; coefficient blades
are multiplied in on the right.
"""

from __future__ import annotations

import os
import weakref
from functools import lru_cache
from math import comb, factorial

from gmpy2 import is_square, isqrt, mpq

from .clifford import Multivector, VersorProduct, blade_from_indices, blade_latex, blade_sign, format_terms
from .scalars import ExactComplex, as_scalar, div, fmt_rational, re_im

__all__ = [
    "RadialField",
    "LinOperator",
    "builtin",
    "BUILTIN_KINDS",
    "normalize",
    "derive_x",
    "derive_u",
    "substitute_inversion",
    "substitute_linear",
    "substitute_spin_action",
    "spin_substitution_operator",
    "linear_substitution_operator",
    "inversion_operator",
    "eval_numeric",
    "monomials",
    "sweep_fields",
]

_BITS = 8
_EMAX = (1 << _BITS) - 1
_BIAS = 1 << 15


def _compositions(total, parts):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _zero_key(m):
    return (0,) * (3 * m + 1)


class _Layout:
    """Bit layout of term codes for one dimension."""

    def __init__(self, m):
        self.m = m
        self.bmask = (1 << m) - 1
        self.shift = [m + _BITS * i for i in range(3 * m)]  # x_i, u_i, v_i
        self.xs = self.shift[:m]
        self.us = self.shift[m : 2 * m]
        self.vs = self.shift[2 * m :]
        self.rs = m + _BITS * 3 * m
        self.one = _BIAS << self.rs
        self.r2 = 2 << self.rs
        self.xm = self.xs[m - 1]
        self._signs = [None] * (1 << m)
        self._reduce = {}

    def sign_row(self, a):
        row = self._signs[a]
        if row is None:
            row = self._signs[a] = [blade_sign(a, b) for b in range(1 << self.m)]
        return row

    def encode(self, key):
        m = self.m
        if len(key) != 3 * m + 1:
            raise ValueError("malformed monomial key")
        code = 0
        for s, e in zip(self.shift, key[: 3 * m]):
            e = int(e)
            if not 0 <= e <= _EMAX:
                raise ValueError(f"exponent {e} outside 0..{_EMAX}")
            code |= e << s
        rp = int(key[3 * m])
        if not -_BIAS < rp < _BIAS:
            raise ValueError("radial power out of range")
        return code | ((rp + _BIAS) << self.rs)

    def decode(self, code):
        """``(key tuple, blade)`` of a code."""
        key = tuple((code >> s) & _EMAX for s in self.shift) + ((code >> self.rs) - _BIAS,)
        return key, code & self.bmask

    def rad(self, code):
        return (code >> self.rs) - _BIAS

    def xdeg(self, code):
        return sum((code >> s) & _EMAX for s in self.xs)

    def reduce_deltas(self, q):
        """Code offsets and weights for x_m^(2q) = (r^2 - sum_{i<m} x_i^2)^q."""
        out = self._reduce.get(q)
        if out is not None:
            return out
        m = self.m
        out = []
        for t in range(q + 1):
            cq = comb(q, t) * (-1 if t & 1 else 1)
            base = -(2 * q << self.xm) + (2 * (q - t) << self.rs)
            ft = factorial(t)
            for ks in _compositions(t, m - 1):
                w = ft
                d = base
                for i, ki in enumerate(ks):
                    w //= factorial(ki)
                    d += 2 * ki << self.xs[i]
                out.append((d, cq * w))
        out = self._reduce[q] = tuple(out)
        return out


@lru_cache(maxsize=None)
def _layout(m):
    return _Layout(m)


def _acc(L, out, code, c):
    """out[code] += c, reducing the x_m exponent when it reaches 2."""
    e = (code >> L.xm) & _EMAX
    if e >= 2:
        for d, w in L.reduce_deltas(e >> 1):
            k = code + d
            out[k] = out.get(k, 0) + c * w
    else:
        out[code] = out.get(code, 0) + c


def _clean(d):
    return {k: v for k, v in d.items() if v}


def _mul_terms(L, a, b):
    out = {}
    bm = L.bmask
    one = L.one
    for ka, ca in a.items():
        ba = ka & bm
        sa = (ka ^ ba) - one
        row = L.sign_row(ba)
        for kb, cb in b.items():
            bb = kb & bm
            code = sa + (kb ^ bb) | (ba ^ bb)
            c = ca * cb
            _acc(L, out, code, -c if row[bb] < 0 else c)
    return _clean(out)


def _left_mul_const(L, terms, raw):
    if len(raw) == 1 and 0 in raw:
        c = raw[0]
        return _clean({k: c * v for k, v in terms.items()}) if c != 1 else dict(terms)
    out = {}
    bm = L.bmask
    for cb, cv in raw.items():
        row = L.sign_row(cb)
        for k, v in terms.items():
            b = k & bm
            w = cv * v
            code = k ^ cb
            out[code] = out.get(code, 0) + (-w if row[b] < 0 else w)
    return _clean(out)


def _right_mul_const(L, terms, raw):
    if len(raw) == 1 and 0 in raw:
        c = raw[0]
        return _clean({k: v * c for k, v in terms.items()}) if c != 1 else dict(terms)
    out = {}
    bm = L.bmask
    for k, v in terms.items():
        b = k & bm
        row = L.sign_row(b)
        for cb, cv in raw.items():
            w = v * cv
            code = k ^ cb
            out[code] = out.get(code, 0) + (-w if row[cb] < 0 else w)
    return _clean(out)


def _coeff_raw(dim, c):
    if isinstance(c, Multivector):
        if c.dim != dim:
            raise ValueError(f"coefficient lives in Cl_{c.dim}, field in dimension {dim}")
        return dict(c.terms)
    c = as_scalar(c)
    return {0: c} if c else {}


def _sort_key(k):
    return (sum(k), k)


# ---------------------------------------------------------------------------


class RadialField:
    """Immutable Clifford-valued element of the radial-Laurent ring in (x, u, v).

    ``RadialField(m, {key: coeff})`` takes keys ``(a_1..a_m, b_1..b_m, g_1..g_m, k)``
    and Multivector or scalar coefficients; any key is reduced on the way in.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None, *, _canonical=False):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        if _canonical:
            self.terms = terms if terms is not None else {}
            return
        L = _layout(dim)
        acc = {}
        for key, c in (terms or {}).items():
            code = L.encode(tuple(key))
            raw = {b: as_scalar(v) for b, v in c.items()} if isinstance(c, dict) else _coeff_raw(dim, c)
            for b, v in raw.items():
                if v:
                    _acc(L, acc, code | b, v)
        self.terms = _clean(acc)

    @property
    def layout(self):
        return _layout(self.dim)

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, m):
        return cls(m, {}, _canonical=True)

    @classmethod
    def const(cls, m, c=1):
        one = _layout(m).one
        return cls(m, {one | b: v for b, v in _coeff_raw(m, c).items()}, _canonical=True)

    one = const

    @classmethod
    def monomial(cls, m, xexp=None, uexp=None, vexp=None, radpow=0, coeff=1):
        key = list(_zero_key(m))
        for off, exps in ((0, xexp), (m, uexp), (2 * m, vexp)):
            if exps is None:
                continue
            exps = list(exps)
            if len(exps) != m or any(e < 0 for e in exps):
                raise ValueError("exponent vectors must have length m and be nonnegative")
            key[off : off + m] = exps
        key[3 * m] = int(radpow)
        return cls(m, {tuple(key): coeff})

    @classmethod
    def from_terms(cls, m, items):
        """Build from ``(coeff, xexp, uexp, radpow[, vexp])`` tuples."""
        out = cls.zero(m)
        for item in items:
            coeff, xexp, uexp, radpow = item[:4]
            vexp = item[4] if len(item) > 4 else None
            out = out + cls.monomial(m, xexp, uexp, vexp, radpow, coeff)
        return out

    @classmethod
    def _var(cls, m, block, i, power=1):
        if not 1 <= i <= m:
            raise ValueError(f"variable index {i} out of range 1..{m}")
        key = list(_zero_key(m))
        key[block * m + i - 1] = power
        return cls(m, {tuple(key): 1})

    @classmethod
    def x(cls, m, i, power=1):
        return cls._var(m, 0, i, power)

    @classmethod
    def u(cls, m, i, power=1):
        return cls._var(m, 1, i, power)

    @classmethod
    def v(cls, m, i, power=1):
        return cls._var(m, 2, i, power)

    @classmethod
    def radial(cls, m, power):
        L = _layout(m)
        return cls(m, {L.one + (int(power) << L.rs): 1}, _canonical=True)

    @classmethod
    def normsq(cls, m):
        return cls.radial(m, 2)

    @classmethod
    def _vector(cls, m, block):
        L = _layout(m)
        terms = {}
        for i in range(m):
            _acc(L, terms, (L.one + (1 << L.shift[block * m + i])) | (1 << i), 1)
        return cls(m, terms, _canonical=True)

    @classmethod
    def vector_x(cls, m):
        return cls._vector(m, 0)

    @classmethod
    def vector_u(cls, m):
        return cls._vector(m, 1)

    @classmethod
    def vector_v(cls, m):
        return cls._vector(m, 2)

    @classmethod
    def inner(cls, m, a="u", b="x"):
        """Scalar field sum_i a_i b_i for variable blocks a, b in {"x","u","v"}."""
        blocks = {"x": 0, "u": 1, "v": 2}
        L = _layout(m)
        terms = {}
        for i in range(m):
            code = L.one + (1 << L.shift[blocks[a] * m + i]) + (1 << L.shift[blocks[b] * m + i])
            _acc(L, terms, code, 1)
        return cls(m, _clean(terms), _canonical=True)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RadialField):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        return RadialField.const(self.dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return RadialField(self.dim, _clean(acc), _canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return RadialField(self.dim, {k: -v for k, v in self.terms.items()}, _canonical=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        L = _layout(self.dim)
        if isinstance(other, RadialField):
            other = self._coerce(other)
            return RadialField(self.dim, _mul_terms(L, self.terms, other.terms), _canonical=True)
        return RadialField(self.dim, _right_mul_const(L, self.terms, _coeff_raw(self.dim, other)), _canonical=True)

    def __rmul__(self, other):
        L = _layout(self.dim)
        return RadialField(self.dim, _left_mul_const(L, self.terms, _coeff_raw(self.dim, other)), _canonical=True)

    def __truediv__(self, other):
        c = as_scalar(other)
        return RadialField(self.dim, {k: div(v, c) for k, v in self.terms.items()}, _canonical=True)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not supported; use RadialField.radial for r^k")
        out = RadialField.const(self.dim, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, RadialField):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Multivector, ExactComplex)) or other.__class__ is mpq().__class__:
            return self == RadialField.const(self.dim, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # -- inspection ----------------------------------------------------------
    def coefficient_map(self):
        """``{key tuple: {blade: scalar}}`` with keys as in the constructor."""
        L = _layout(self.dim)
        out = {}
        for code, c in self.terms.items():
            key, b = L.decode(code)
            out.setdefault(key, {})[b] = c
        return out

    def items(self):
        """Yield ``(coeff, xexp, uexp, vexp, radpow)`` in canonical order."""
        m = self.dim
        cm = self.coefficient_map()
        for k in sorted(cm, key=_sort_key):
            yield (Multivector._raw(m, cm[k]), k[:m], k[m : 2 * m], k[2 * m : 3 * m], k[3 * m])

    def constant_term(self) -> Multivector:
        """Coefficient of the monomial 1."""
        L = _layout(self.dim)
        return Multivector(self.dim, {code & L.bmask: c for code, c in self.terms.items() if code >> self.dim == L.one >> self.dim})

    def __len__(self):
        return len({code >> self.dim for code in self.terms})

    def _keys(self):
        L = _layout(self.dim)
        return {L.decode(code)[0] for code in self.terms}

    def x_degrees(self):
        """Set of x-homogeneity degrees (|a| + k) over all terms."""
        L = _layout(self.dim)
        return {L.xdeg(c) + L.rad(c) for c in self.terms}

    def u_degrees(self):
        m = self.dim
        return {sum(k[m : 2 * m]) for k in self._keys()}

    def v_degrees(self):
        m = self.dim
        return {sum(k[2 * m : 3 * m]) for k in self._keys()}

    def depends_on_x(self):
        L = _layout(self.dim)
        return any(L.xdeg(c) or L.rad(c) for c in self.terms)

    def is_polynomial(self):
        """True when every radial power is a nonnegative even integer."""
        L = _layout(self.dim)
        return all(L.rad(c) >= 0 and L.rad(c) % 2 == 0 for c in self.terms)

    def left(self, c):
        L = _layout(self.dim)
        return RadialField(self.dim, _left_mul_const(L, self.terms, _coeff_raw(self.dim, c)), _canonical=True)

    def right(self, c):
        L = _layout(self.dim)
        return RadialField(self.dim, _right_mul_const(L, self.terms, _coeff_raw(self.dim, c)), _canonical=True)

    def map_coefficients(self, fn):
        """Apply ``fn: Multivector -> Multivector`` to every coefficient."""
        m = self.dim
        L = _layout(m)
        out = {}
        for key, raw in self.coefficient_map().items():
            w = fn(Multivector._raw(m, raw))
            base = L.encode(key)
            for b, c in w.terms.items():
                out[base | b] = c
        return RadialField(m, out, _canonical=True)

    # -- calculus ------------------------------------------------------------
    def derive_x(self, i):
        return builtin("deriv_x", self.dim, i)(self)

    def derive_u(self, i):
        return builtin("deriv_u", self.dim, i)(self)

    # -- output --------------------------------------------------------------
    def to_json(self):
        out = []
        for coeff, xe, ue, ve, rp in self.items():
            for t in coeff.to_json()["terms"]:
                out.append(dict(t, xexp=list(xe), uexp=list(ue), vexp=list(ve), radpow=rp))
        return {"dim": self.dim, "terms": out}

    @classmethod
    def from_json(cls, data):
        m = int(data["dim"])
        acc = cls.zero(m)
        for t in data["terms"]:
            b, s = blade_from_indices(t["blade"])
            c = ExactComplex.make(as_scalar(t["re"]), as_scalar(t.get("im", "0")))
            acc = acc + cls.monomial(m, t["xexp"], t["uexp"], t.get("vexp"), t.get("radpow", 0), Multivector(m, {b: s * c}))
        return acc

    def to_latex(self):
        m = self.dim
        pieces = []
        cm = self.coefficient_map()
        for k in sorted(cm, key=_sort_key):
            coeff = cm[k]
            body = _monomial_latex(k, m)
            if len(coeff) == 1 and 0 in coeff:
                pieces.append((body, coeff[0]))
            elif len(coeff) == 1:
                ((b, c),) = coeff.items()
                pieces.append((blade_latex(b) + (" " + body if body else ""), c))
            else:
                mv = Multivector._raw(m, dict(coeff)).to_latex()
                pieces.append((f"({mv})" + (" " + body if body else ""), 1))
        return format_terms(pieces, lambda b: b)

    def __str__(self):
        return self.to_latex()

    def __repr__(self):
        return f"RadialField({self.dim}, {self.to_latex()!r})"


def _monomial_latex(key, m):
    parts = []
    for off, name in ((0, "x"), (m, "u"), (2 * m, "v")):
        for i in range(m):
            e = key[off + i]
            if e:
                parts.append(f"{name}_{i + 1}" if e == 1 else f"{name}_{i + 1}^{{{e}}}")
    rp = key[3 * m]
    if rp:
        parts.append("\\|x\\|" if rp == 1 else f"\\|x\\|^{{{rp}}}")
    return " ".join(parts)


def normalize(f: RadialField) -> RadialField:
    """Canonical representative.  Fields are always stored reduced, so this is a copy."""
    return RadialField(f.dim, dict(sorted(f.terms.items())), _canonical=True)


def derive_x(f: RadialField, i: int) -> RadialField:
    return f.derive_x(i)


def derive_u(f: RadialField, i: int) -> RadialField:
    return f.derive_u(i)


# ---------------------------------------------------------------------------
# operators


class _CacheBudget:
    """Global cap on the number of memoized image terms across all operators.

    When the cap is exceeded every operator cache is flushed; images are then
    recomputed on demand.  ``CLIFFSPIN_CACHE_TERMS`` overrides the default.
    """

    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.flushes = 0
        self.live = weakref.WeakSet()

    def charge(self, op, n):
        self.used += n + 1
        self.live.add(op)
        if self.used > self.limit:
            self.flush()

    def flush(self):
        for op in list(self.live):
            op._cache.clear()
        self.live.clear()
        self.used = 0
        self.flushes += 1


CACHE_BUDGET = _CacheBudget(int(os.environ.get("CLIFFSPIN_CACHE_TERMS", 12_000_000)))


class LinOperator:
    """Left-linear operator on RadialFields, determined by its memoized monomial images.

    Images are keyed by scalar monomial codes (blade bits zero).
    """

    __slots__ = ("dim", "descriptor", "_image_fn", "_cache", "_L", "_combo", "_ident", "__weakref__")

    def __init__(self, dim, image_fn, descriptor, combo=None, ident=False):
        self.dim = dim
        self.descriptor = descriptor
        self._image_fn = image_fn
        self._cache = {}
        self._L = _layout(dim)
        self._combo = combo  # [(scalar, op)] when this is a flat linear combination
        self._ident = ident

    def image(self, code):
        img = self._cache.get(code)
        if img is None:
            img = self._image_fn(code)
            CACHE_BUDGET.charge(self, len(img))
            self._cache[code] = img
        return img

    def clear_cache(self):
        self._cache.clear()

    def apply_terms(self, terms):
        # A(sum_b f_b e_b) = sum_b A(f_b) e_b: accumulate each blade group as a
        # scalar sum first, then right-multiply by e_b once per output term.
        L = self._L
        bm = L.bmask
        image = self.image
        groups = {}
        for code, c in terms.items():
            b = code & bm
            g = groups.get(b)
            if g is None:
                groups[b] = [(code ^ b, c)]
            else:
                g.append((code ^ b, c))
        out = None
        for b, g in groups.items():
            acc = {}
            get = acc.get
            for code, c in g:
                img = image(code)
                if c == 1:
                    for k2, c2 in img.items():
                        acc[k2] = get(k2, 0) + c2
                else:
                    for k2, c2 in img.items():
                        acc[k2] = get(k2, 0) + c2 * c
            if b:
                acc = {k ^ b: (-v if L.sign_row(k & bm)[b] < 0 else v) for k, v in acc.items() if v}
            if out is None:
                out = acc
            else:
                oget = out.get
                for k, v in acc.items():
                    out[k] = oget(k, 0) + v
        return _clean(out) if out else {}

    def __call__(self, f: RadialField) -> RadialField:
        if not isinstance(f, RadialField):
            raise TypeError("operators act on RadialField values")
        if f.dim != self.dim:
            raise ValueError(f"dimension mismatch: operator {self.dim}, field {f.dim}")
        return RadialField(self.dim, self.apply_terms(f.terms), _canonical=True)

    # -- combinators -----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LinOperator):
            raise TypeError("expected a LinOperator")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __matmul__(self, other):
        return compose(self, other)

    def _as_combo(self):
        return self._combo if self._combo is not None else [(1, self)]

    def __add__(self, other):
        self._check(other)
        return _linear_combination(self.dim, self._as_combo() + other._as_combo(), ("+", self.descriptor, other.descriptor))

    def __sub__(self, other):
        out = self + other.scale(-1)
        out.descriptor = ("-", self.descriptor, other.descriptor)
        return out

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        """Left multiplication of the output by a scalar or Clifford constant."""
        raw = _coeff_raw(self.dim, c)
        a = self
        L = self._L
        desc = c.to_latex() if isinstance(c, Multivector) else fmt_scalar(as_scalar(c))
        if not raw:
            return LinOperator(self.dim, lambda code: {}, ("*", desc, a.descriptor))
        if len(raw) == 1 and 0 in raw:
            s = raw[0]
            return _linear_combination(self.dim, [(w * s, op) for w, op in a._as_combo()], ("*", desc, a.descriptor))

        def img(code):
            return _left_mul_const(L, a.image(code), raw)

        return LinOperator(self.dim, img, ("*", desc, a.descriptor))

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, n):
        return power(self, n)

    def describe(self):
        return describe(self.descriptor)

    def __repr__(self):
        return f"LinOperator({self.dim}, {self.describe()})"


def fmt_scalar(c):
    re, im = re_im(c)
    if im == 0:
        return fmt_rational(re)
    return f"({fmt_rational(re)}+{fmt_rational(im)}i)"


def describe(desc):
    if isinstance(desc, str):
        return desc
    tag = desc[0]
    if tag == "+":
        return f"({describe(desc[1])} + {describe(desc[2])})"
    if tag == "-":
        return f"({describe(desc[1])} - {describe(desc[2])})"
    if tag == "*":
        return f"{desc[1]}*{describe(desc[2])}"
    if tag == "@":
        return f"{describe(desc[1])} {describe(desc[2])}"
    if tag == "^":
        return f"({describe(desc[1])})^{desc[2]}"
    if tag == "[]":
        return f"[{describe(desc[1])}, {describe(desc[2])}]"
    return f"{tag}({', '.join(describe(d) for d in desc[1:])})"


def compose(a: LinOperator, b: LinOperator) -> LinOperator:
    """(a @ b) f = a(b(f))."""
    a._check(b)
    if a._ident or b._ident:
        inner = b if a._ident else a
        return LinOperator(a.dim, inner.image, ("@", a.descriptor, b.descriptor), inner._combo, inner._ident)
    return LinOperator(a.dim, lambda code: a.apply_terms(b.image(code)), ("@", a.descriptor, b.descriptor))


def _linear_combination(dim, combo, descriptor):
    merged = {}
    for w, op in combo:
        key = id(op)
        if key in merged:
            merged[key] = (merged[key][0] + w, op)
        else:
            merged[key] = (w, op)
    combo = [(w, op) for w, op in merged.values() if w]

    def img(code):
        out = {}
        get = out.get
        for w, op in combo:
            if w == 1:
                for k, v in op.image(code).items():
                    out[k] = get(k, 0) + v
            else:
                for k, v in op.image(code).items():
                    out[k] = get(k, 0) + w * v
        return _clean(out)

    return LinOperator(dim, img, descriptor, combo)


def add(a, b):
    return a + b


def scale(a, c):
    return a.scale(c)


def power(a: LinOperator, n: int) -> LinOperator:
    if n < 0:
        raise ValueError("negative operator power")
    if n == 0:
        return identity(a.dim)
    out = a
    for _ in range(n - 1):
        out = compose(a, out)
    out.descriptor = ("^", a.descriptor, n)
    return out


def commutator(a: LinOperator, b: LinOperator) -> LinOperator:
    out = compose(a, b) - compose(b, a)
    out.descriptor = ("[]", a.descriptor, b.descriptor)
    return out


def identity(m):
    return LinOperator(m, lambda code: {code: 1}, "1", ident=True)


def zero_operator(m):
    return LinOperator(m, lambda code: {}, "0")


# -- primitive monomial images ----------------------------------------------


def _deriv_x_into(L, out, code, i, c, extra=0):
    """out += c * d/dx_i (monomial ``code``), with ``extra`` added to every result code."""
    s = L.xs[i]
    a = (code >> s) & _EMAX
    if a:
        k = code - (1 << s) + extra
        out[k] = out.get(k, 0) + c * a
    p = L.rad(code)
    if p:
        _acc(L, out, code + (1 << s) - L.r2 + extra, c * p)


def _img_deriv_x(L, i):
    def img(code):
        out = {}
        _deriv_x_into(L, out, code, i, 1)
        return _clean(out)

    return img


def _img_dirac_x(L):
    m = L.m

    def img(code):
        out = {}
        for i in range(m):
            _deriv_x_into(L, out, code, i, 1, 1 << i)
        return _clean(out)

    return img


def _img_deriv_u(L, i, blade=0):
    s = L.us[i]

    def img(code):
        b = (code >> s) & _EMAX
        return {code - (1 << s) + blade: b} if b else {}

    return img


def _img_dirac_u(L):
    m = L.m

    def img(code):
        out = {}
        for i in range(m):
            s = L.us[i]
            b = (code >> s) & _EMAX
            if b:
                out[code - (1 << s) + (1 << i)] = b
        return out

    return img


def _img_laplace_x(L):
    m = L.m

    def img(code):
        out = {}
        for s in L.xs:
            a = (code >> s) & _EMAX
            if a >= 2:
                k = code - (2 << s)
                out[k] = out.get(k, 0) + a * (a - 1)
        c = L.rad(code)
        if c:
            w = c * (2 * L.xdeg(code) + c + m - 2)
            if w:
                k = code - L.r2
                out[k] = out.get(k, 0) + w
        return _clean(out)

    return img


def _img_laplace_u(L):
    def img(code):
        out = {}
        for s in L.us:
            b = (code >> s) & _EMAX
            if b >= 2:
                out[code - (2 << s)] = b * (b - 1)
        return out

    return img


def _img_inner_u_Dx(L):
    m = L.m

    def img(code):
        out = {}
        for i in range(m):
            _deriv_x_into(L, out, code, i, 1, 1 << L.us[i])
        return _clean(out)

    return img


def _img_inner_Du_Dx(L):
    m = L.m

    def img(code):
        out = {}
        for i in range(m):
            s = L.us[i]
            b = (code >> s) & _EMAX
            if b:
                _deriv_x_into(L, out, code - (1 << s), i, b)
        return _clean(out)

    return img


def _img_inner_x_Du(L):
    m = L.m

    def img(code):
        out = {}
        for i in range(m):
            s = L.us[i]
            b = (code >> s) & _EMAX
            if b:
                _acc(L, out, code - (1 << s) + (1 << L.xs[i]), b)
        return _clean(out)

    return img


def _img_mult_var(L, shifts, blades):
    def img(code):
        out = {}
        for s, bl in zip(shifts, blades):
            _acc(L, out, code + (1 << s) + bl, 1)
        return _clean(out)

    return img


def _img_mult_const(raw):
    def img(code):
        return {code | b: c for b, c in raw.items()}

    return img


def _img_mult_field(L, g_terms):
    def img(code):
        return _mul_terms(L, g_terms, {code: 1})

    return img


def _img_scalar(fn):
    def img(code):
        w = fn(code)
        return {code: w} if w else {}

    return img


def _img_shift_r(L, p):
    d = p << L.rs

    def img(code):
        return {code + d: 1}

    return img


BUILTIN_KINDS = (
    "identity",
    "deriv_x",
    "deriv_u",
    "dirac_x",
    "dirac_u",
    "laplace_x",
    "laplace_u",
    "euler_x",
    "euler_u",
    "inner_u_Dx",
    "inner_Du_Dx",
    "inner_x_Du",
    "angular_x",
    "angular_u",
    "mult_xj",
    "mult_uj",
    "mult_normsq",
    "mult_radial",
    "mult_vector_x",
    "mult_vector_u",
    "mult_ej",
    "mult_inner_ux",
    "mult_const",
    "mult_field",
)


def _idx(m, j):
    if not isinstance(j, int) or not 1 <= j <= m:
        raise ValueError(f"index {j!r} out of range 1..{m}")
    return j - 1


def builtin(kind: str, m: int, *args) -> LinOperator:
    """Exact building-block operators; see ``BUILTIN_KINDS``."""
    if m < 1:
        raise ValueError("dimension must be positive")
    L = _layout(m)
    if kind == "identity":
        return identity(m)
    if kind == "deriv_x":
        i = _idx(m, *args)
        return LinOperator(m, _img_deriv_x(L, i), f"d/dx{i + 1}")
    if kind == "deriv_u":
        i = _idx(m, *args)
        return LinOperator(m, _img_deriv_u(L, i), f"d/du{i + 1}")
    if kind == "dirac_x":
        return LinOperator(m, _img_dirac_x(L), "D_x")
    if kind == "dirac_u":
        return LinOperator(m, _img_dirac_u(L), "D_u")
    if kind == "laplace_x":
        return LinOperator(m, _img_laplace_x(L), "Lap_x")
    if kind == "laplace_u":
        return LinOperator(m, _img_laplace_u(L), "Lap_u")
    if kind == "euler_x":
        return LinOperator(m, _img_scalar(lambda c: L.xdeg(c) + L.rad(c)), "E_x")
    if kind == "euler_u":
        return LinOperator(m, _img_scalar(lambda c: sum((c >> s) & _EMAX for s in L.us)), "E_u")
    if kind == "inner_u_Dx":
        return LinOperator(m, _img_inner_u_Dx(L), "<u,D_x>")
    if kind == "inner_Du_Dx":
        return LinOperator(m, _img_inner_Du_Dx(L), "<D_u,D_x>")
    if kind == "inner_x_Du":
        return LinOperator(m, _img_inner_x_Du(L), "<x,D_u>")
    if kind in ("angular_x", "angular_u"):
        i, j = (_idx(m, a) + 1 for a in args)
        mult, der = ("mult_xj", "deriv_x") if kind == "angular_x" else ("mult_uj", "deriv_u")
        op = builtin(mult, m, i) @ builtin(der, m, j) - builtin(mult, m, j) @ builtin(der, m, i)
        op.descriptor = f"L^{kind[-1]}_{i}{j}"
        return op
    if kind == "mult_xj":
        i = _idx(m, *args)
        return LinOperator(m, _img_mult_var(L, [L.xs[i]], [0]), f"x{i + 1}")
    if kind == "mult_uj":
        i = _idx(m, *args)
        return LinOperator(m, _img_mult_var(L, [L.us[i]], [0]), f"u{i + 1}")
    if kind == "mult_normsq":
        return LinOperator(m, _img_shift_r(L, 2), "|x|^2")
    if kind == "mult_radial":
        (p,) = args
        return LinOperator(m, _img_shift_r(L, int(p)), f"|x|^{int(p)}")
    if kind == "mult_vector_x":
        return LinOperator(m, _img_mult_var(L, L.xs, [1 << i for i in range(m)]), "x")
    if kind == "mult_vector_u":
        return LinOperator(m, _img_mult_var(L, L.us, [1 << i for i in range(m)]), "u")
    if kind == "mult_ej":
        i = _idx(m, *args)
        return LinOperator(m, _img_mult_const({1 << i: 1}), f"e{i + 1}")
    if kind == "mult_inner_ux":
        return LinOperator(m, _img_mult_field(L, RadialField.inner(m, "u", "x").terms), "<u,x>")
    if kind == "mult_const":
        (c,) = args
        raw = _coeff_raw(m, c)
        desc = c.to_latex() if isinstance(c, Multivector) else fmt_scalar(as_scalar(c))
        return LinOperator(m, _img_mult_const(raw), desc)
    if kind == "mult_field":
        (g,) = args
        if g.dim != m:
            raise ValueError("dimension mismatch")
        return LinOperator(m, _img_mult_field(L, g.terms), f"({g.to_latex()})")
    raise ValueError(f"unknown operator kind {kind!r}")


# ---------------------------------------------------------------------------
# substitutions


def _power_cache(L, base_terms):
    cache = {0: {L.one: 1}, 1: base_terms}

    def get(p):
        if p not in cache:
            cache[p] = _mul_terms(L, get(p - 1), base_terms)
        return cache[p]

    return get


def inversion_operator(m: int, weightpow: int, vectorprefactor: bool) -> LinOperator:
    """f -> r^w (x if vectorprefactor) f(x/r^2, xux/r^2) as a LinOperator."""
    L = _layout(m)
    ux = RadialField.inner(m, "u", "x")
    rinv = RadialField.radial(m, -2)
    uimg = [RadialField.u(m, i) - RadialField.x(m, i) * ux * rinv * 2 for i in range(1, m + 1)]
    upow = [_power_cache(L, f.terms) for f in uimg]
    xvec = RadialField.vector_x(m).terms
    umask = sum(_EMAX << s for s in L.us)

    def img(code):
        key, _ = L.decode(code)
        a = sum(key[:m])
        base = (code & ~umask) + ((-2 * a - 2 * key[3 * m] + weightpow) << L.rs)
        acc = {base: 1}
        for i in range(m):
            b = key[m + i]
            if b:
                acc = _mul_terms(L, acc, upow[i](b))
        if vectorprefactor:
            acc = _mul_terms(L, xvec, acc)
        return acc

    desc = f"J[w={weightpow}{', x' if vectorprefactor else ''}]"
    return LinOperator(m, img, desc)


def substitute_inversion(f: RadialField, weightpow: int, vectorprefactor: bool) -> RadialField:
    return inversion_operator(f.dim, weightpow, vectorprefactor)(f)


def _check_orthogonal(M, m):
    for i in range(m):
        for j in range(m):
            s = sum(M[k][i] * M[k][j] for k in range(m))
            if s != (1 if i == j else 0):
                return False
    return True


def linear_substitution_operator(m, Mx=None, Mu=None, Mv=None, left=None, right=None, desc="subst"):
    """f -> left * f(Mx x, Mu u, Mv v) * right; Mx must be orthogonal when r appears."""
    if Mx is not None and not _check_orthogonal(Mx, m):
        raise ValueError("x-substitution matrix must be orthogonal")
    L = _layout(m)
    blocks = []
    for b, M in enumerate((Mx, Mu, Mv)):
        if M is None:
            continue
        for i in range(m):
            terms = {}
            for j in range(m):
                if M[i][j]:
                    _acc(L, terms, L.one + (1 << L.shift[b * m + j]), as_scalar(M[i][j]))
            blocks.append((L.shift[b * m + i], _power_cache(L, _clean(terms))))
    mask = sum(_EMAX << s for s, _ in blocks)
    lraw = _coeff_raw(m, left) if left is not None else None
    rraw = _coeff_raw(m, right) if right is not None else None

    def img(code):
        acc = {code & ~mask: 1}
        for s, pc in blocks:
            e = (code >> s) & _EMAX
            if e:
                acc = _mul_terms(L, acc, pc(e))
        if lraw is not None:
            acc = _left_mul_const(L, acc, lraw)
        if rraw is not None:
            acc = _right_mul_const(L, acc, rraw)
        return acc

    return LinOperator(m, img, desc)


def substitute_linear(f, Mx=None, Mu=None, Mv=None, left=None, right=None):
    return linear_substitution_operator(f.dim, Mx, Mu, Mv, left, right)(f)


def _transpose(M):
    return [list(r) for r in zip(*M)]


def spin_substitution_operator(m, s: VersorProduct, twist_u=True, twist_v=False, coefficient="none", inverse=False):
    """Operator f -> [s] f(O x, O u, O v) with O the rotation of ``s``.

    ``O y`` is ``s y s~/|s|^2`` or, with ``inverse=True``, ``s~ y s/|s|^2``.
    ``coefficient`` is "none" or "left" (multiply by s); two-sided conjugation
    is not left-linear and lives in :func:`substitute_spin_action`.
    """
    if s.dim != m:
        raise ValueError("dimension mismatch")
    if len(s.factors) % 2:
        raise ValueError("spin action needs an even number of reflections")
    if coefficient not in ("none", "left"):
        raise ValueError(f"unsupported coefficient action {coefficient!r} for a left-linear operator")
    O = s.matrix()
    if inverse:
        O = _transpose(O)
    left = s.multivector() if coefficient == "left" else None
    return linear_substitution_operator(m, O, O if twist_u else None, O if twist_v else None, left, None, desc="spin")


def substitute_spin_action(f: RadialField, s: VersorProduct, twist_u=True, twist_v=False, coefficient="none", inverse=False):
    """Spin action on a field; ``coefficient="conjugate"`` gives s f(O x, ...) s~/|s|^2."""
    if coefficient != "conjugate":
        return spin_substitution_operator(f.dim, s, twist_u, twist_v, coefficient, inverse)(f)
    g = spin_substitution_operator(f.dim, s, twist_u, twist_v, "none", inverse)(f)
    sv = s.multivector()
    right = sv.reversion() / s.norm_sq()
    return g.map_coefficients(lambda c: sv * c * right)


# ---------------------------------------------------------------------------
# evaluation and sweeps


def _rational_sqrt(q):
    q = mpq(q)
    if q < 0 or not (is_square(q.numerator) and is_square(q.denominator)):
        return None
    return mpq(isqrt(q.numerator), isqrt(q.denominator))


def _qpow(base, e):
    if e >= 0:
        return base**e
    if base == 0:
        raise ZeroDivisionError("negative power of |x| at x = 0")
    return div(1, base ** (-e))


def eval_numeric(f: RadialField, x, u=None, v=None) -> Multivector:
    """Exact value of ``f`` at rational points; odd radial powers need a rational |x|."""
    m = f.dim
    x = [as_scalar(c) for c in x]
    u = [as_scalar(c) for c in (u if u is not None else [0] * m)]
    v = [as_scalar(c) for c in (v if v is not None else [0] * m)]
    if len(x) != m or len(u) != m or len(v) != m:
        raise ValueError("point dimension mismatch")
    point = x + u + v
    rsq = sum(c * c for c in x)
    r = None
    out = {}
    L = _layout(m)
    for code, c in f.terms.items():
        k, b = L.decode(code)
        rp = k[3 * m]
        if rp % 2:
            if r is None:
                r = _rational_sqrt(rsq)
                if r is None:
                    raise ValueError("odd power of |x| at a point where |x| is irrational")
            w = _qpow(r, rp)
        else:
            w = _qpow(rsq, rp // 2)
        for p, e in zip(point, k):
            if e:
                w = w * p**e
        if w:
            out[b] = out.get(b, 0) + c * w
    return Multivector(m, out)


def monomials(m, max_degree, min_degree=0):
    """Exponent vectors of all monomials in m variables of degree within the bounds."""
    out = []
    for d in range(min_degree, max_degree + 1):
        out.extend(_compositions(d, m))
    return out


def sweep_fields(m, bound, basis):
    """Pairs ``((alpha, index), x^alpha * b_index)`` for |alpha| <= bound."""
    fields = []
    for a in monomials(m, bound):
        xm = RadialField.monomial(m, a)
        for bi, b in enumerate(basis):
            fields.append(((a, bi), xm * b))
    return fields
