"""Named verification suites.  Each suite maps one case to a list of Reports.

Operator suites (``lemmas``, ``symmetry``, ``inversion``) run per (m, n, parity);
``fundamental`` per (m, k); ``fischer`` and ``spinor`` per m.
"""

from __future__ import annotations

import random

from . import conformal
from .clifford import Multivector, VersorProduct, blade_indices, primitive_idempotent, reflect_vector, reversion, spinor_space, witt_frame
from .conformal import (
    build_operator,
    default_sweep,
    verify_commutator_lemmas,
    verify_generalized_symmetry,
    verify_inversion_conjugation,
    verify_inversion_square,
    verify_reductions,
)
from .fields import RadialField, builtin, substitute_spin_action
from .fundamental import build_E, verify_annihilation, verify_homogeneity, verify_spin_invariance
from .report import Report, check_operator
from .scalars import Q
from .sphere import almansi_project, basis_H, basis_M, fischer_dagger, highest_weight_vectors, integrate_u, zonal_harmonic, zonal_monogenic

__all__ = ["SUITES", "OPERATOR_SUITES", "sample_versors", "run_case", "plan_cases", "case_group", "clear_caches"]

OPERATOR_SUITES = ("lemmas", "symmetry", "inversion")
SUITES = ("symmetry", "inversion", "lemmas", "fundamental", "fischer", "spinor")


def clear_caches():
    """Drop memoized operators and images; keeps memory flat across cases."""
    for fn in (conformal.blocks, conformal.build_bosonic, conformal.build_fermionic, conformal.inversion_J, conformal.sct_C):
        fn.cache_clear()


def sample_versors(m, count=20, seed=0):
    """Deterministic even versors built from small nonzero integer vectors."""
    rng = random.Random(seed * 7919 + m)
    out = []
    while len(out) < count:
        ys = []
        while len(ys) < 2:
            y = tuple(rng.randint(-3, 3) for _ in range(m))
            if any(y):
                ys.append(y)
        out.append(VersorProduct(m, tuple(ys)))
    return out


def _parity_k(n, parity):
    return 2 * n if parity == "even" else 2 * n - 1


# ---------------------------------------------------------------------------
# operator suites


def suite_lemmas(m, n, parity, bound=None, perturb=0):
    # lemma identities are stated for the unperturbed building blocks
    return verify_commutator_lemmas(m, n, parity, bound=bound)


def suite_symmetry(m, n, parity, bound=None, perturb=0):
    reps = verify_generalized_symmetry(m, n, parity, bound=bound, perturb=perturb)
    D = build_operator(m, _parity_k(n, parity), perturb)
    sweep = default_sweep(m, D.k, bound)
    check = builtin("laplace_u", m) if parity == "even" else builtin("dirac_u", m)
    reps.append(check_operator("target_preserved", {"m": m, "n": n, "k": D.k}, check @ D.op, sweep))
    if n == 1:
        reps.extend(r for r in verify_reductions(m) if r.identity.startswith("fermionic" if parity == "odd" else "bosonic"))
    return reps


def suite_inversion(m, n, parity, bound=None, perturb=0):
    k = _parity_k(n, parity)
    sweep = default_sweep(m, k, bound)
    return [verify_inversion_square(m, k, sweep=sweep), verify_inversion_conjugation(m, n, parity, sweep=sweep, perturb=perturb)]


# ---------------------------------------------------------------------------
# kernels


def suite_fundamental(m, k, versors=3, seed=0):
    E = build_E(m, k)
    reps = [verify_annihilation(E), verify_homogeneity(E)]
    for s in sample_versors(m, versors, seed):
        reps.append(verify_spin_invariance(E, s))
    return reps


def _u_as_v(f: RadialField) -> RadialField:
    """Rename u -> v in an x-free field."""
    m = f.dim
    out = {}
    for key, c in f.coefficient_map().items():
        out[key[:m] + (0,) * m + key[m : 2 * m] + key[3 * m :]] = c
    return RadialField(m, out)


def suite_fischer(m, versors=20, seed=0):
    """Zonal reproducing properties, monogenicity, spin invariance and Almansi-Fischer splits."""
    reps = []
    blades = [Multivector._raw(m, {b: 1}) for b in range(1 << m)]

    zh = zonal_harmonic(m)
    rep = Report("zonal_harmonic_reproducing", {"m": m})
    for i, p in enumerate(basis_H(m, 1).elements):
        rep.fields_checked += 1
        got = integrate_u(zh * p)
        if got != _u_as_v(p):
            rep.add_residual(f"b{i}", got - _u_as_v(p))
    reps.append(rep)

    zm = zonal_monogenic(m)
    zd = fischer_dagger(zm)
    rep = Report("zonal_monogenic_reproducing", {"m": m, "pairing": "I_u[dagger(Z) P]"})
    for i, p in enumerate(basis_M(m, 1).elements):
        for a in blades:
            q = p.right(a)
            rep.fields_checked += 1
            got = integrate_u(zd * q)
            if got != _u_as_v(q):
                rep.add_residual(f"b{i}*e{list(blade_indices(next(iter(a.terms))))}", got - _u_as_v(q))
    reps.append(rep)

    rep = Report("zonal_monogenic_monogenic", {"m": m})
    rep.fields_checked = 1
    du = builtin("dirac_u", m)(zm)
    if not du.is_zero():
        rep.add_residual("Z", du)
    reps.append(rep)

    rep_h = Report("zonal_spin_invariance", {"m": m, "kernel": "harmonic", "versors": versors})
    rep_m = Report("zonal_spin_invariance", {"m": m, "kernel": "monogenic", "versors": versors})
    for s in sample_versors(m, versors, seed):
        for z, r, how in ((zh, rep_h, "none"), (zm, rep_m, "conjugate")):
            r.fields_checked += 1
            moved = substitute_spin_action(z, s, twist_u=True, twist_v=True, coefficient=how, inverse=True)
            if moved != z:
                r.add_residual(str([list(map(str, y)) for y in s.factors]), moved - z)
    reps += [rep_h, rep_m]

    rep = Report("almansi_fischer", {"m": m, "j": 1})
    dirac_u = builtin("dirac_u", m)
    uvec = RadialField.vector_u(m)
    for i, h0 in enumerate(basis_H(m, 1).elements):
        for a in blades:
            h = h0.right(a)
            rep.fields_checked += 1
            p1, p0 = almansi_project(h, m, 1)
            bad = []
            if not dirac_u(p1).is_zero():
                bad.append(("D_u P1 h", dirac_u(p1)))
            if p1 + uvec * p0 != h:
                bad.append(("h - P1 h - u p0", h - p1 - uvec * p0))
            if dirac_u(uvec * p0) != p0 * (-m):
                bad.append(("D_u(u p0) + m p0", dirac_u(uvec * p0) + p0 * m))
            for what, val in bad:
                rep.add_residual(f"u{i + 1}*e{list(blade_indices(next(iter(a.terms))))}: {what}", val)
    reps.append(rep)
    return reps


# ---------------------------------------------------------------------------
# Clifford core


def random_multivector(m, rng, density=0.5, bound=5):
    terms = {b: Q(rng.randint(-bound, bound), rng.randint(1, 3)) for b in range(1 << m) if rng.random() < density}
    return Multivector(m, terms)


def suite_spinor(m, samples=100, seed=0):
    """Anticommutation, reversion, reflections, Witt frame, idempotent and highest weight vectors."""
    reps = []
    e = [Multivector.basis(m, i) for i in range(1, m + 1)]
    one = Multivector.scalar(m, 1)

    rep = Report("anticommutation", {"m": m})
    for i in range(m):
        for j in range(m):
            rep.fields_checked += 1
            val = e[i] * e[j] + e[j] * e[i] + one * (2 if i == j else 0)
            if not val.is_zero():
                rep.add_residual(f"e{i + 1},e{j + 1}", val)
    reps.append(rep)

    rng = random.Random(seed * 31 + m)
    rep = Report("reversion_anti_automorphism", {"m": m, "samples": samples})
    blades = [Multivector._raw(m, {b: 1}) for b in range(1 << m)]
    pairs = [(a, b) for a in blades for b in blades] if m <= 6 else []
    pairs += [(random_multivector(m, rng), random_multivector(m, rng)) for _ in range(samples)]
    for a, b in pairs:
        rep.fields_checked += 1
        if reversion(a * b) != reversion(b) * reversion(a) or reversion(reversion(a)) != a:
            rep.add_residual(f"{a} , {b}", reversion(a * b) - reversion(b) * reversion(a))
    reps.append(rep)

    rep = Report("reflection_isometry", {"m": m})
    for _ in range(samples):
        a = [rng.randint(-4, 4) for _ in range(m)]
        if not any(a):
            continue
        x = Multivector.vector(m, [rng.randint(-4, 4) for _ in range(m)])
        rep.fields_checked += 1
        y = reflect_vector(a, x)
        if not y.is_vector() or y.norm_sq() != x.norm_sq() or reflect_vector(a, y) != x:
            rep.add_residual(f"a={a}", y - x)
    reps.append(rep)

    pairings = ["adjacent"] + (["split"] if m % 2 == 0 else [])
    for pairing in pairings:
        mm = m if m % 2 == 0 else m + 1
        f, fd, _ = witt_frame(mm, pairing)
        idem = primitive_idempotent(mm, pairing)
        rep = Report("witt_frame", {"m": mm, "pairing": pairing})
        one_mm = Multivector.scalar(mm, 1)
        for j, (a, b) in enumerate(zip(f, fd), start=1):
            rep.fields_checked += 1
            for what, val in (("f^2", a * a), ("fdag^2", b * b), ("f fdag + fdag f - 1", a * b + b * a - one_mm), ("f I", a * idem)):
                if not val.is_zero():
                    rep.add_residual(f"j={j}: {what}", val)
        rep.fields_checked += 1
        if idem * idem != idem:
            rep.add_residual("I^2 - I", idem * idem - idem)
        if pairing == "split" or m % 2 == 0:
            _, sb = spinor_space(mm, pairing)
            rep.notes["spinor_dim"] = len(sb)
            if len(sb) != 2 ** (mm // 2):
                rep.residuals.append({"field": "dim S", "residual": str(len(sb))})
        reps.append(rep)

    if m < 3:
        return reps
    rep = Report("highest_weight_vectors", {"m": m})
    for j in (0, 1, 2):
        h, p = highest_weight_vectors(m, j)
        rep.fields_checked += 2
        if not builtin("laplace_u", m)(h).is_zero():
            rep.add_residual(f"Lap_u phi, j={j}", builtin("laplace_u", m)(h))
        if not builtin("dirac_u", p.dim)(p).is_zero():
            rep.add_residual(f"D_u omega, j={j}", builtin("dirac_u", p.dim)(p))
    reps.append(rep)
    return reps


# ---------------------------------------------------------------------------
# planning


def plan_cases(suites, m_list, n_list, parities=("even", "odd")):
    """Ordered list of (suite, kwargs) cases; the order fixes the report order.

    Cases sharing (m, n, parity) are adjacent so their operator caches are
    reused; callers may clear caches whenever that group changes.
    """
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    cases = []
    for m in m_list:
        for name in ("spinor", "fischer"):
            if name in suites:
                cases.append((name, {"m": m}))
        for n in n_list:
            for parity in parities:
                for name in OPERATOR_SUITES:
                    if name in suites:
                        cases.append((name, {"m": m, "n": n, "parity": parity}))
                if "fundamental" in suites:
                    cases.append(("fundamental", {"m": m, "k": _parity_k(n, parity)}))
    return cases


def case_group(case):
    _, kw = case
    k = kw.get("k") or (_parity_k(kw["n"], kw["parity"]) if "n" in kw else None)
    return (kw["m"], k)


_RUNNERS = {
    "lemmas": suite_lemmas,
    "symmetry": suite_symmetry,
    "inversion": suite_inversion,
    "fundamental": suite_fundamental,
    "fischer": suite_fischer,
    "spinor": suite_spinor,
}


def run_case(case, bound=None, perturb=0, seed=0):
    name, kw = case
    if name in OPERATOR_SUITES:
        return _RUNNERS[name](kw["m"], kw["n"], kw["parity"], bound=bound, perturb=perturb)
    if name in ("fundamental", "fischer"):
        return _RUNNERS[name](kw["m"], **({"k": kw["k"]} if "k" in kw else {}), seed=seed)
    return _RUNNERS[name](kw["m"], seed=seed)
