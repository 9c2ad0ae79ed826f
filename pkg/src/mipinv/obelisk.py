"""p-obelisks: non-abelian p-groups with |G : gamma_2(G)| = p^2 and
G^p = gamma_3(G).

The class is only considered for p > 3 (the predicate returns False with a
warning for smaller primes).  The literal definition also admits degenerate
class-2 exponent-p groups in which G^p = gamma_3(G) = 1; these are accepted
and flagged rather than silently excluded.  For genuine obelisks the module
verifies the structural rank pattern, the closed-form description
D_n(G) = gamma_{m(n)}(G) of the dimension subgroups, and the framed
criterion by two independent methods.
"""

from __future__ import annotations

import numpy as np

from .fpalgebra import dimension_series
from .pcgroup import (
    MipError,
    PcGroup,
    PreconditionError,
    Subgroup,
    UsageError,
)


def _series_data(g: PcGroup):
    lcs = g.lower_central_series()
    gamma2 = lcs[1] if len(lcs) > 1 else g.trivial_subgroup()
    gamma3 = lcs[2] if len(lcs) > 2 else g.trivial_subgroup()
    return lcs, gamma2, gamma3


def is_obelisk(g: PcGroup) -> bool:
    """Literal predicate; False (with the standing-assumption warning left to
    the report) whenever p <= 3."""
    if g.p <= 3:
        return False
    return _literal_obelisk(g)


def _literal_obelisk(g: PcGroup) -> bool:
    lcs, gamma2, gamma3 = _series_data(g)
    if len(lcs) <= 1:  # abelian
        return False
    if g.size // gamma2.order != g.p ** 2:
        return False
    return g.agemo() == gamma3


def is_degenerate_obelisk(g: PcGroup) -> bool:
    """The literal definition with gamma_3 = G^p = 1 (class-2 exponent-p)."""
    _, _, gamma3 = _series_data(g)
    return _literal_obelisk(g) and gamma3.order == 1


def m_of_n(n: int, p: int) -> int:
    """Index m(n) with D_n = gamma_{m(n)} on obelisks: write n = a p^l + b
    with 1 <= a <= p-1 and 0 <= b < p^l, then m(n) is 2l+1 when (a, b) =
    (1, 0); 2l+3 when a > 2 or (a = 2 and b >= 1); and 2l+2 otherwise."""
    if n < 1:
        raise UsageError("m(n) needs n >= 1")
    if p <= 3:
        raise UsageError("m(n) is defined for primes p > 3")
    ell = 0
    while p ** (ell + 1) <= n:
        ell += 1
    a = n // p ** ell
    b = n % p ** ell
    if not (1 <= a <= p - 1 and 0 <= b < p ** ell):
        raise MipError("invalid decomposition in m(n)")
    if a == 1 and b == 0:
        return 2 * ell + 1
    if a > 2 or (a == 2 and b >= 1):
        return 2 * ell + 3
    return 2 * ell + 2


def rank_pattern_check(g: PcGroup) -> dict:
    """Layer ranks of a p-obelisk: rank 2 for odd i <= c-1, rank 1 for even
    i <= c; and gamma_i^p = gamma_{i+2} throughout."""
    if not is_obelisk(g):
        raise PreconditionError("rank_pattern_check needs a p-obelisk")
    lcs, _, _ = _series_data(g)
    c = len(lcs) - 1
    failures = []
    ranks = []
    for i in range(1, c + 1):
        layer_rank = len(lcs[i - 1].igs) - len(lcs[i].igs)
        ranks.append(layer_rank)
        if i <= c - 1 and i % 2 == 1 and layer_rank != 2:
            failures.append(f"layer {i} has rank {layer_rank}, expected 2")
        if i <= c and i % 2 == 0 and layer_rank != 1:
            failures.append(f"layer {i} has rank {layer_rank}, expected 1")
    for i in range(1, c + 1):
        sub = lcs[i - 1]
        target = lcs[i + 1] if i + 1 < len(lcs) else g.trivial_subgroup()
        if sub.power_subgroup(g.p) != target:
            failures.append(f"gamma_{i}^p != gamma_{i + 2}")
    return {"pass": not failures, "class": c, "ranks": ranks, "failures": failures}


def dimension_series_check(g: PcGroup) -> dict:
    """Rows (n, m(n), computed D_n, match) until D_n = 1."""
    if not is_obelisk(g):
        raise PreconditionError("dimension_series_check needs a p-obelisk")
    lcs, _, _ = _series_data(g)
    series = dimension_series(g)
    rows = []
    all_match = True
    n = 0
    while True:
        n += 1
        dn = series[min(n, len(series)) - 1]
        mn = m_of_n(n, g.p)
        gamma = lcs[mn - 1] if mn <= len(lcs) else g.trivial_subgroup()
        match = dn == gamma
        all_match = all_match and match
        rows.append(
            {
                "n": n,
                "m(n)": mn,
                "log|D_n|": len(dn.igs),
                "log|gamma_m(n)|": len(gamma.igs),
                "match": bool(match),
            }
        )
        if dn.order == 1:
            break
    return {"pass": bool(all_match), "rows": rows}


def _maximal_subgroups(g: PcGroup):
    """The p+1 maximal subgroups as preimages of hyperplanes of G/Phi(G);
    for an obelisk the Frattini quotient is 2-dimensional."""
    phi = g.frattini()
    gens = g.minimal_generators()
    if len(gens) != 2:
        raise MipError("obelisk expected to be 2-generated")
    x, y = gens
    maxes = []
    for lam in range(g.p):
        u = x * y ** lam
        maxes.append(g.subgroup(list(phi.gens()) + [u]))
    maxes.append(g.subgroup(list(phi.gens()) + [y]))
    return maxes


def is_framed(g: PcGroup) -> dict:
    """Two independent methods: (A) every maximal subgroup is 2-generated;
    (B) the images of M^p and [M, M] in gamma_3/gamma_4 are distinct
    subgroups of order p.  Non-framed obelisks report their exceptional
    maximal subgroups.  Degenerate obelisks only support method A."""
    if not is_obelisk(g):
        raise PreconditionError("is_framed needs a p-obelisk")
    lcs, gamma2, gamma3 = _series_data(g)
    gamma4 = lcs[3] if len(lcs) > 3 else g.trivial_subgroup()
    degenerate = gamma3.order == 1
    maxes = _maximal_subgroups(g)
    ranks = []
    for msub in maxes:
        base = g.subgroup(
            [g.element(g._pow(u, g.p)) for u in msub.igs]
            + [
                g.element(g._comm(u, v))
                for i, u in enumerate(msub.igs)
                for v in msub.igs[i + 1 :]
            ]
        )
        phi_m = base.normal_closure_in(msub)
        ranks.append(len(msub.igs) - len(phi_m.igs))
    method_a = all(r == 2 for r in ranks)
    exceptional = [i for i, r in enumerate(ranks) if r != 2]

    method_b = None
    per_max_b = []
    if not degenerate:
        layer = _Layer34(g, gamma3, gamma4)
        method_b = True
        for msub in maxes:
            mp = msub.power_subgroup(g.p)
            mcomm = _derived_of(g, msub)
            img_p = layer.image(mp)
            img_c = layer.image(mcomm)
            ok = (
                img_p is not None
                and img_c is not None
                and img_p.order == g.p
                and img_c.order == g.p
                and img_p != img_c
            )
            per_max_b.append(ok)
            method_b = method_b and ok
    return {
        "framed": bool(method_a),
        "method_a": bool(method_a),
        "method_b": method_b,
        "methods_agree": (None if degenerate else method_a == method_b),
        "degenerate": degenerate,
        "maximal_ranks": ranks,
        "exceptional_maximals": exceptional,
    }


def _derived_of(g: PcGroup, msub: Subgroup) -> Subgroup:
    gens = [
        g.element(g._comm(u, v))
        for i, u in enumerate(msub.igs)
        for v in msub.igs[i + 1 :]
    ]
    return g.subgroup(gens).normal_closure_in(msub)


class _Layer34:
    """Images of subgroups in gamma_3/gamma_4."""

    def __init__(self, g, gamma3, gamma4):
        self.g = g
        self.gamma3 = gamma3
        h, _, restrict = gamma3.as_group()
        nsub = h.subgroup([restrict(u) for u in gamma4.igs], normal=True)
        self.q, self._proj, _ = h.quotient(nsub)
        self._restrict = restrict

    def image(self, sub: Subgroup):
        if not all(self.gamma3._contains_exps(u) for u in sub.igs):
            return None
        gens = [self._proj(self._restrict(u)) for u in sub.igs]
        return self.q.subgroup(gens)


def obelisk_report(g: PcGroup) -> dict:
    """Everything the battery and the CLI need about obelisk status."""
    literal = _literal_obelisk(g)
    small_prime = g.p <= 3
    ob = literal and not small_prime
    rep = {
        "prime": g.p,
        "is_obelisk": bool(ob),
        "literal_definition_holds": bool(literal),
        "small_prime_warning": bool(small_prime and literal),
        "degenerate": bool(ob and is_degenerate_obelisk(g)),
        "class": g.nilpotency_class(),
        "framed": None,
    }
    if ob:
        framed = is_framed(g)
        rep["framed"] = framed["framed"]
        rep["framed_detail"] = framed
        rep["rank_pattern"] = rank_pattern_check(g)
        rep["dimension_series"] = dimension_series_check(g)
    return rep
