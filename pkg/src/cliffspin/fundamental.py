"""Fundamental solutions of the higher spin operators, up to a constant factor.

The kernel of order k is the inversion of the matching zonal kernel,
``E = J_k[Z(u, v)]``; v is a parameter block that no operator differentiates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .clifford import VersorProduct
from .conformal import build_operator, inversion_J
from .fields import RadialField, eval_numeric, substitute_spin_action
from .report import Report
from .scalars import Q
from .sphere import zonal_harmonic, zonal_monogenic

__all__ = ["FundamentalKernel", "build_E", "verify_annihilation", "verify_homogeneity", "verify_spin_invariance", "naive_kernel_control"]


@dataclass(frozen=True)
class FundamentalKernel:
    m: int
    k: int
    parity: str
    field: RadialField
    scale: str = "1"

    def to_json(self):
        return {"m": self.m, "k": self.k, "parity": self.parity, "scale": self.scale, "field": self.field.to_json()}


def build_E(m: int, k: int) -> FundamentalKernel:
    if not isinstance(m, int) or m < 3:
        raise ValueError("need m >= 3")
    if not isinstance(k, int) or k < 1:
        raise ValueError("need k >= 1")
    z = zonal_harmonic(m) if k % 2 == 0 else zonal_monogenic(m)
    E = inversion_J(m, k)(z)
    return FundamentalKernel(m, k, "even" if k % 2 == 0 else "odd", E, "c_1" if k % 2 == 0 else "c'_1")


def verify_annihilation(kernel: FundamentalKernel) -> Report:
    """D_(1,k) E_(1,k) = 0 as an identity of the radial-Laurent ring (so for every x != 0)."""
    D = build_operator(kernel.m, kernel.k)
    rep = Report("fundamental_annihilation", {"m": kernel.m, "k": kernel.k})
    rep.fields_checked = 1
    out = D(kernel.field)
    if not out.is_zero():
        rep.add_residual("E", out)
    rep.notes["kernel_x_degree"] = sorted(kernel.field.x_degrees())
    rep.notes["u_degree"] = sorted(kernel.field.u_degrees())
    rep.notes["v_degree"] = sorted(kernel.field.v_degrees())
    return rep


def verify_homogeneity(kernel: FundamentalKernel, points=None) -> Report:
    """Every term has x-degree k - m, and E(2x) = 2^(k-m) E(x) at Pythagorean points."""
    m, k = kernel.m, kernel.k
    rep = Report("fundamental_homogeneity", {"m": m, "k": k, "degree": k - m})
    degs = kernel.field.x_degrees()
    if degs != {k - m}:
        rep.residuals.append({"field": "term degrees", "residual": str(sorted(degs))})
    if points is None:
        base = [(3, 4), (1, 2, 2), (2, 3, 6), (1, 4, 8)]
        points = [list(p) + [0] * (m - len(p)) for p in base if len(p) <= m]
    uu = [1] + [0] * (m - 1)
    vv = [0] * (m - 1) + [1]
    uu2 = list(range(1, m + 1))
    vv2 = [(-1) ** i for i in range(m)]
    scale = Q(2 ** max(k - m, 0), 2 ** max(m - k, 0))
    for x in points:
        for u, v in ((uu, vv), (uu2, vv2)):
            rep.fields_checked += 1
            a = eval_numeric(kernel.field, [2 * c for c in x], u, v)
            b = eval_numeric(kernel.field, x, u, v)
            if a != b * scale:
                rep.residuals.append({"field": f"x={x}", "residual": (a - b * scale).to_latex()})
    return rep


def verify_spin_invariance(kernel: FundamentalKernel, s: VersorProduct, orientation="tilde-left") -> Report:
    """s E(s~ x s, s~ u s, s~ v s) s~ / |s|^2 = E.

    ``orientation="tilde-right"`` substitutes ``s y s~`` instead; for the
    Clifford-valued kernels that form only holds for special s.
    """
    inverse = orientation == "tilde-left"
    rep = Report("fundamental_spin_invariance", {"m": kernel.m, "k": kernel.k, "orientation": orientation,
                                                 "versor": [[str(c) for c in y] for y in s.factors]})
    rep.fields_checked = 1
    moved = substitute_spin_action(kernel.field, s, twist_u=True, twist_v=True, coefficient="conjugate", inverse=inverse)
    diff = moved - kernel.field
    if not diff.is_zero():
        rep.add_residual("E", diff)
    return rep


def naive_kernel_control(m: int) -> RadialField:
    """D_(1,2) applied to |x|^(2-m) u_1 (no u-reflection); nonzero."""
    f = RadialField.radial(m, 2 - m) * RadialField.u(m, 1)
    return build_operator(m, 2)(f)
