"""The invariant battery: group-theoretical data determined by kG.

Every serialized field is a relabeling-invariant value (orders, ranks,
abelian-type partitions, order histograms, basis-free Lie fingerprints), so
batteries of re-presentations of the same group are byte-identical.
Quotients whose isomorphism type is an invariant (the Sandling quotient,
G/gamma_2^p gamma_4, the Baginski centralizer) are serialized as such
fingerprints; the quotient groups themselves are kept on the in-memory
report so that compare() can run the budgeted isomorphism search on them.
"""

from __future__ import annotations

from . import obelisk as obmod
from .fpalgebra import dimension_series, jen_lie_algebra, jennings_data
from .isosearch import iso_search
from .pcgroup import (
    GroupElement,
    MipError,
    PcGroup,
    PreconditionError,
    ResourceBoundError,
    Subgroup,
    UsageError,
    abelian_invariants_of_group,
    is_abelian,
)

from . import gfp
import numpy as np


# ---------------------------------------------------------------------------
# canonical fingerprints


def group_fingerprint(group: PcGroup) -> dict:
    """Relabeling-invariant summary used for quotient-valued invariants."""
    lcs = group.lower_central_series()
    ucs = group.upper_central_series()
    q_ab, _, _ = group.quotient(lcs[1]) if len(lcs) > 1 else (group, None, None)
    return {
        "order": group.size,
        "class": group.nilpotency_class(),
        "min_generators": group.rank() if group.m else 0,
        "abelianization": abelian_invariants_of_group(q_ab),
        "lower_central_ranks": [
            len(lcs[i].igs) - len(lcs[i + 1].igs) for i in range(len(lcs) - 1)
        ],
        "upper_central_logs": [len(z.igs) for z in ucs],
        "dimension_ranks": jennings_data(group).dims,
        "element_order_histogram": group.element_order_histogram(),
        "jennings_lie": jen_lie_algebra(group).fingerprint(),
    }


def subgroup_type_or_fingerprint(sub: Subgroup) -> dict:
    h, _, _ = sub.as_group()
    if is_abelian(h):
        return {"abelian": True, "type": abelian_invariants_of_group(h)}
    return {"abelian": False, "fingerprint": group_fingerprint(h)}


# ---------------------------------------------------------------------------
# named invariants


def sandling_quotient(group: PcGroup):
    """G / gamma_2(G)^p gamma_3(G)."""
    lcs = group.lower_central_series()
    gamma2 = lcs[1] if len(lcs) > 1 else group.trivial_subgroup()
    gamma3 = lcs[2] if len(lcs) > 2 else group.trivial_subgroup()
    n = _power_times(gamma2, group.p, gamma3)
    q, proj, _ = group.quotient(n)
    return q, proj


def two_gen_quotient(group: PcGroup):
    """G / gamma_2(G)^p gamma_4(G); only an invariant for 2-generated G."""
    if group.rank() != 2:
        raise PreconditionError("two_gen_quotient needs a 2-generated group")
    lcs = group.lower_central_series()
    gamma2 = lcs[1] if len(lcs) > 1 else group.trivial_subgroup()
    gamma4 = lcs[3] if len(lcs) > 3 else group.trivial_subgroup()
    n = _power_times(gamma2, group.p, gamma4)
    q, proj, _ = group.quotient(n)
    return q, proj


def _power_times(sub: Subgroup, k: int, other: Subgroup) -> Subgroup:
    """sub^k * other as a normal subgroup; requires [sub, sub] <= other so
    that igs powers generate sub^k modulo other (true at both call sites:
    [gamma_2, gamma_2] <= gamma_4 <= gamma_3)."""
    g = sub.parent
    for u in sub.igs:
        for v in sub.igs:
            if not other._contains_exps(g._comm(u, v)):
                raise MipError("_power_times precondition [N,N] <= M violated")
    gens = list(other.igs) + [g._pow(u, k) for u in sub.igs]
    return g.subgroup([g.element(e) for e in gens], normal=True)


def baginski_centralizer(group: PcGroup):
    """C_G(gamma_2(G)/Phi(gamma_2(G))) with applicability flag.

    Applicable when G/C is cyclic; then the isomorphism type of C is an
    invariant of kG.
    """
    g = group
    gamma2 = g.derived_subgroup()
    if gamma2.order == 1:
        c = g.whole_subgroup()
        return {"applicable": True, "centralizer": c}
    base = g.subgroup(
        [g.element(g._pow(u, g.p)) for u in gamma2.igs]
        + [g.element(g._comm(u, v)) for u in gamma2.igs for v in gamma2.igs],
    )
    phi2 = base.normal_closure_in(gamma2)
    cent_idxs = []
    for idx in range(g.size):
        x = g.exps_of(idx)
        if all(phi2._contains_exps(g._comm(u, x)) for u in gamma2.igs):
            cent_idxs.append(idx)
    c = g.subgroup_from_indices(np.array(cent_idxs, dtype=np.int64))
    c.normal = True
    q, _, _ = g.quotient(c)
    cyclic = q.rank() <= 1 if q.m else True
    return {"applicable": bool(cyclic), "centralizer": c}


def compute_K_G(group: PcGroup) -> Subgroup:
    """The unique subgroup above Z_2(G) whose wedge square is the kernel of
    the commutator pairing wedge^2(G/Z_2) -> gamma_2/Gamma.

    Requires class 3, elementary abelian gamma_2, and
    |G : Phi(G)| = |G : Z_2(G)| = p^3.
    """
    g = group
    p = g.p
    if g.nilpotency_class() != 3:
        raise PreconditionError("K_G needs a group of class exactly 3")
    gamma2 = g.derived_subgroup()
    h2, _, _ = gamma2.as_group()
    if not is_abelian(h2) or gamma2.agemo().order != 1:
        raise PreconditionError("K_G needs gamma_2(G) elementary abelian")
    phi = g.frattini()
    z2 = g.upper_central_series()[2]
    if g.size // phi.order != p ** 3:
        raise PreconditionError("K_G needs |G : Phi(G)| = p^3")
    if g.size // z2.order != p ** 3:
        raise PreconditionError("K_G needs |G : Z_2(G)| = p^3")
    if phi != z2:
        raise MipError("Phi(G) and Z_2(G) differ despite matching indices")
    gamma_cap = g.gamma_cap()
    idx = gamma2.order // gamma_cap.order
    if idx == p ** 3:
        return z2
    if idx != p ** 2:
        raise MipError(
            f"|gamma_2 : Gamma| = {idx}, outside the {{p^2, p^3}} dichotomy"
        )
    # coordinates on U = G/Phi(G) and on gamma_2/Gamma
    q, proj, lift = g.quotient(phi)
    if q.m != 3:
        raise MipError("G/Phi(G) is not 3-dimensional")
    lifts = [g.element(lift(q.gen(i))) for i in range(3)]
    layer = _LayerCoords(g, gamma2, gamma_cap)
    pairs = [(0, 1), (0, 2), (1, 2)]
    rows = np.stack(
        [layer.coords(lifts[a].comm(lifts[b]).exps) for a, b in pairs]
    )
    aug = np.hstack([rows, np.eye(3, dtype=np.int64)])
    basis, piv = gfp.rref(aug, p)
    kernel = basis[piv >= rows.shape[1]][:, rows.shape[1] :]
    if kernel.shape[0] != 1:
        raise MipError("commutator pairing kernel is not a line")
    k12, k13, k23 = (int(v) for v in kernel[0])
    skew = np.array(
        [[0, k12, k13], [(-k12) % p, 0, k23], [(-k13) % p, (-k23) % p, 0]],
        dtype=np.int64,
    )
    col_basis, _ = gfp.rref(skew.T % p, p)
    if col_basis.shape[0] != 2:
        raise MipError("kernel 2-vector is not decomposable into a plane")
    w_lifts = []
    for row in col_basis:
        x = g.identity_exps
        for a in range(3):
            if row[a]:
                x = g._mul(x, g._pow(lifts[a].exps, int(row[a])))
        w_lifts.append(g.element(x))
    k_g = g.subgroup([g.element(u) for u in z2.igs] + w_lifts)
    # exactness post hoc: K_G is maximal and [w1, w2] lands in Gamma(G)
    if g.size // k_g.order != p:
        raise MipError("constructed K_G is not maximal")
    if not gamma_cap.contains(w_lifts[0].comm(w_lifts[1])):
        raise MipError("wedge^2 W does not map into Gamma(G)")
    return k_g


class _LayerCoords:
    """F_p coordinates on an elementary abelian layer upper/lower."""

    def __init__(self, group, top: Subgroup, bottom: Subgroup):
        h, _, restrict = top.as_group()
        nsub = h.subgroup([restrict(u) for u in bottom.igs], normal=True)
        q, proj, _ = h.quotient(nsub)
        self._restrict = restrict
        self._proj = proj
        self.dim = q.m

    def coords(self, exps):
        return np.array(self._proj(self._restrict(exps)).exps, dtype=np.int64)


def th31_check(group: PcGroup) -> dict:
    """Hypotheses of the maximal-abelian-centralizer theorem: p odd,
    gamma_2^p gamma_4 = 1, and C_G(gamma_2(G)) maximal and abelian."""
    g = group
    out = {"theorem": "maximal abelian centralizer of gamma_2"}
    out["p_odd"] = g.p % 2 == 1
    out["small_hypothesis"] = _gamma2p_gamma4_trivial(g)
    gamma2 = g.derived_subgroup()
    cent = g.centralizer(gamma2)
    h, _, _ = cent.as_group()
    out["centralizer_log_order"] = len(cent.igs)
    out["centralizer_maximal"] = g.size // cent.order == g.p
    out["centralizer_abelian"] = is_abelian(h)
    out["applies"] = bool(
        out["p_odd"]
        and out["small_hypothesis"]
        and out["centralizer_maximal"]
        and out["centralizer_abelian"]
    )
    out["settled_by_sandling"] = _sandling_settles(g)
    out["mip_settled_by_paper"] = bool(out["applies"])
    return out


def th36_check(group: PcGroup) -> dict:
    """Hypotheses of the K_G theorem: p odd, gamma_2^p gamma_4 = 1,
    |G:Phi| = |G:Z_2| = p^3, and for class 3 the bracket condition
    [[K_G, G], G] <= [K_G, gamma_2(G)]."""
    g = group
    out = {"theorem": "K_G"}
    out["p_odd"] = g.p % 2 == 1
    out["small_hypothesis"] = _gamma2p_gamma4_trivial(g)
    phi = g.frattini()
    z2 = g.upper_central_series()[min(2, len(g.upper_central_series()) - 1)]
    out["phi_index_p3"] = g.size // phi.order == g.p ** 3
    out["z2_index_p3"] = g.size // z2.order == g.p ** 3
    out["class"] = g.nilpotency_class()
    out["settled_by_sandling"] = _sandling_settles(g)
    bracket_ok = None
    if (
        out["p_odd"]
        and out["small_hypothesis"]
        and out["phi_index_p3"]
        and out["z2_index_p3"]
    ):
        if out["class"] < 3:
            bracket_ok = True  # gamma_3 = 1 case is covered by Sandling
        elif out["class"] == 3:
            try:
                k_g = compute_K_G(g)
                kgg = _comm_subgroup(g, k_g, g.whole_subgroup())
                kggg = _comm_subgroup(g, kgg, g.whole_subgroup())
                kgamma2 = _comm_subgroup(g, k_g, g.derived_subgroup())
                bracket_ok = kgamma2.contains_subgroup(kggg)
                out["k_g_log_order"] = len(k_g.igs)
            except (PreconditionError, MipError) as err:
                bracket_ok = False
                out["k_g_error"] = str(err)
        else:
            bracket_ok = False
    out["bracket_condition"] = bracket_ok
    out["applies"] = bool(
        out["p_odd"]
        and out["small_hypothesis"]
        and out["phi_index_p3"]
        and out["z2_index_p3"]
        and bracket_ok
    )
    out["mip_settled_by_paper"] = bool(out["applies"])
    return out


def cor_checks(group: PcGroup) -> dict:
    """The p^6 / p^7 corollaries of the K_G machinery."""
    g = group
    p = g.p
    out = {}
    small = _gamma2p_gamma4_trivial(g)
    ucs = g.upper_central_series()
    z2 = ucs[min(2, len(ucs) - 1)]
    phi = g.frattini()
    z2_idx = g.size // z2.order
    phi_idx = g.size // phi.order
    lcs = g.lower_central_series()
    gamma2 = lcs[1] if len(lcs) > 1 else g.trivial_subgroup()
    gamma3 = lcs[2] if len(lcs) > 2 else g.trivial_subgroup()
    gamma_cap = g.gamma_cap()
    gamma3p = {
        "hypotheses": bool(
            g.p % 2 == 1 and small and phi_idx == p ** 3 and z2_idx == p ** 3
        ),
        "case_gamma2_mod_gamma": gamma2.order // gamma_cap.order == p ** 3,
        "case_gamma3_order_p": gamma3.order == p,
    }
    gamma3p["applies"] = bool(
        gamma3p["hypotheses"]
        and (gamma3p["case_gamma2_mod_gamma"] or gamma3p["case_gamma3_order_p"])
    )
    out["gamma3p"] = gamma3p
    out["p6"] = {
        "order_p6": g.size == p ** 6,
        "small_hypothesis": small,
        "z2_index_p3": z2_idx == p ** 3,
    }
    out["p6"]["applies"] = all(out["p6"].values())
    p7 = {
        "order_p7": g.size == p ** 7,
        "small_hypothesis": small,
        "z2_index_p3": z2_idx == p ** 3,
        "phi_index_p3": phi_idx == p ** 3,
        "case_gamma3_order_p": gamma3.order == p,
    }
    if (
        p7["order_p7"]
        and small
        and p7["z2_index_p3"]
        and p7["phi_index_p3"]
        and g.nilpotency_class() == 3
        and not p7["case_gamma3_order_p"]
    ):
        try:
            k_g = compute_K_G(g)
            p7["case_bracket"] = (
                _comm_subgroup(g, k_g, gamma2) == gamma3
            )
        except (PreconditionError, MipError):
            p7["case_bracket"] = False
    else:
        p7["case_bracket"] = None
    p7["applies"] = bool(
        p7["order_p7"]
        and small
        and p7["z2_index_p3"]
        and p7["phi_index_p3"]
        and (p7["case_gamma3_order_p"] or p7["case_bracket"])
    )
    out["p7"] = p7
    return out


def _gamma2p_gamma4_trivial(g: PcGroup) -> bool:
    lcs = g.lower_central_series()
    gamma2 = lcs[1] if len(lcs) > 1 else g.trivial_subgroup()
    gamma4 = lcs[3] if len(lcs) > 3 else g.trivial_subgroup()
    if gamma4.order != 1:
        return False
    return gamma2.order == 1 or gamma2.agemo().order == 1


def _sandling_settles(g: PcGroup) -> bool:
    lcs = g.lower_central_series()
    gamma2 = lcs[1] if len(lcs) > 1 else g.trivial_subgroup()
    gamma3 = lcs[2] if len(lcs) > 2 else g.trivial_subgroup()
    if gamma3.order != 1:
        return False
    return gamma2.order == 1 or gamma2.agemo().order == 1


def _comm_subgroup(g: PcGroup, a: Subgroup, b: Subgroup) -> Subgroup:
    gens = [g._comm(u, v) for u in a.igs for v in b.igs]
    return g.subgroup([g.element(e) for e in gens], normal=True)


def th4_invariant(group: PcGroup):
    """For 2-generated G with gamma_3(G) central of exponent p (p odd): the
    class and the types of all gamma_i(G), i >= 2, are kG-invariants."""
    g = group
    if g.p % 2 == 0 or g.rank() != 2:
        return {"applicable": False}
    lcs = g.lower_central_series()
    gamma3 = lcs[2] if len(lcs) > 2 else g.trivial_subgroup()
    if gamma3.order > 1:
        central = g.center().contains_subgroup(gamma3)
        exp_p = gamma3.agemo().order == 1
        if not (central and exp_p):
            return {"applicable": False}
    types = []
    for i in range(2, len(lcs)):
        sub = lcs[i - 1]
        if sub.order == 1:
            break
        types.append(subgroup_type_or_fingerprint(sub))
    return {
        "applicable": True,
        "class": g.nilpotency_class(),
        "gamma_types": types,
    }


def roggenkamp(group: PcGroup) -> int:
    """Sum over conjugacy classes of log_p |C_G(g) : Phi(C_G(g))|."""
    g = group
    labels, reps = g.class_partition()
    total = 0
    ar = np.arange(g.size, dtype=np.int64)
    for rep in reps:
        exps = g.exps_of(rep)
        perm = g.conj_permutation(exps)
        cent = g.subgroup_from_indices(np.nonzero(perm == ar)[0])
        gens = [g.element(g._pow(u, g.p)) for u in cent.igs]
        gens += [
            g.element(g._comm(u, v))
            for i, u in enumerate(cent.igs)
            for v in cent.igs[i + 1 :]
        ]
        base = g.subgroup(gens)
        phi = base.normal_closure_in(cent)
        total += len(cent.igs) - len(phi.igs)
    return total


def truncated_fingerprint(group: PcGroup, depth: int) -> dict:
    """Graded data of I(kG)/I(kG)^depth: layer dimensions below the cut plus
    the Lie fingerprint in degrees < depth.  A necessary-condition
    fingerprint: equality does not certify algebra isomorphism."""
    if depth < 2:
        raise UsageError("truncated fingerprint needs depth >= 2")
    jd = jennings_data(group)
    dims = jd.graded_dims()
    layer_dims = dims[: depth - 1]
    fp = jen_lie_algebra(group).fingerprint()
    return {
        "depth": depth,
        "layer_dims": [int(d) for d in layer_dims],
        "lie_below": {
            "dims": fp["dims"][: depth - 1],
            "bracket_image_dims": [
                row for row in fp["bracket_image_dims"] if row[0] + row[1] < depth
            ],
            "pmap_stats": [
                row for row in fp["pmap_stats"] if group.p * row[0] < depth
            ],
        },
    }


# ---------------------------------------------------------------------------
# the battery


class InvariantReport:
    def __init__(self, data, quotients):
        self.data = data
        self.quotients = quotients

    def __getitem__(self, key):
        return self.data[key]


def _field(fn):
    try:
        return fn()
    except ResourceBoundError as err:
        return {"unavailable": str(err)}


def battery(group: PcGroup, trunc_depth: int = 6) -> InvariantReport:
    """All battery fields; resource failures mark single fields unavailable."""
    g = group
    quotients = {}
    data = {}
    data["order"] = g.size
    data["prime"] = g.p
    data["class"] = _field(g.nilpotency_class)
    data["min_generators"] = _field(g.rank)

    def _ab():
        lcs = g.lower_central_series()
        q, _, _ = g.quotient(lcs[1]) if len(lcs) > 1 else (g, None, None)
        return abelian_invariants_of_group(q)

    data["abelianization"] = _field(_ab)
    data["frattini_quotient_rank"] = _field(g.rank)
    data["dimension_ranks"] = _field(lambda: jennings_data(g).dims)

    def _derived_ranks():
        h, _, _ = g.derived_subgroup().as_group()
        return jennings_data(h).dims

    data["derived_dimension_ranks"] = _field(_derived_ranks)
    data["gamma_cap_type"] = _field(lambda: g.gamma_cap().abelian_invariants())

    def _sandling():
        q, _ = sandling_quotient(g)
        quotients["sandling"] = q
        return group_fingerprint(q)

    data["sandling_quotient"] = _field(_sandling)
    data["jennings_lie"] = _field(lambda: jen_lie_algebra(g).fingerprint())
    two_gen = g.rank() == 2
    data["two_generated"] = two_gen

    def _two_gen_q():
        if not two_gen:
            return None
        q, _ = two_gen_quotient(g)
        quotients["two_gen"] = q
        return group_fingerprint(q)

    data["two_gen_quotient"] = _field(_two_gen_q)

    def _baginski():
        res = baginski_centralizer(g)
        if not res["applicable"]:
            return {"applicable": False}
        c = res["centralizer"]
        h, _, _ = c.as_group()
        quotients["baginski"] = h
        out = {"applicable": True}
        out.update(subgroup_type_or_fingerprint(c))
        return out

    data["baginski_centralizer"] = _field(_baginski)
    data["lcs_member_types"] = _field(lambda: th4_invariant(g))
    data["roggenkamp"] = _field(lambda: roggenkamp(g))

    def _obelisk():
        rep = obmod.obelisk_report(g)
        return {
            "is_obelisk": rep["is_obelisk"],
            "small_prime_warning": rep["small_prime_warning"],
            "degenerate": rep["degenerate"],
            "framed": rep["framed"],
        }

    data["obelisk"] = _field(_obelisk)
    data["truncated_filtration"] = _field(
        lambda: truncated_fingerprint(g, trunc_depth)
    )
    return InvariantReport(data, quotients)


# ---------------------------------------------------------------------------
# comparison


_QUOTIENT_FIELDS = {"sandling_quotient": "sandling", "two_gen_quotient": "two_gen",
                    "baginski_centralizer": "baginski"}


def compare(rep_g: InvariantReport, rep_h: InvariantReport, iso_budget: int = 200000) -> dict:
    """Field-by-field comparison; `distinguished` needs a provable difference.

    Quotient-valued fields with equal fingerprints additionally get a
    budgeted isomorphism search on the stored quotient groups whose
    `unknown` outcome never contributes to the verdict.
    """
    fields = []
    distinguished = False
    inconclusive = False
    for key in rep_g.data:
        a = rep_g.data[key]
        b = rep_h.data.get(key)
        unavailable = _is_unavailable(a) or _is_unavailable(b)
        if unavailable:
            fields.append({"field": key, "status": "unknown"})
            inconclusive = True
            continue
        if a == b:
            status = "agree"
        else:
            status = "differ"
            distinguished = True
        entry = {"field": key, "status": status}
        if status == "agree" and key in _QUOTIENT_FIELDS:
            qa = rep_g.quotients.get(_QUOTIENT_FIELDS[key])
            qb = rep_h.quotients.get(_QUOTIENT_FIELDS[key])
            if qa is not None and qb is not None:
                res = iso_search(qa, qb, budget=iso_budget)
                entry["iso_search"] = res["verdict"]
                if res["verdict"] == "non-isomorphic":
                    entry["status"] = "differ"
                    distinguished = True
        fields.append(entry)
    if distinguished:
        verdict = "distinguished"
    elif inconclusive:
        verdict = "inconclusive"
    else:
        verdict = "indistinguishable-by-battery"
    return {
        "verdict": verdict,
        "fields": fields,
        "distinguished_fields": [
            f["field"] for f in fields if f["status"] == "differ"
        ],
    }


def _is_unavailable(x):
    return isinstance(x, dict) and "unavailable" in x
