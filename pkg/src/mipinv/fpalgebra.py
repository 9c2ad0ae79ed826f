"""The modular group algebra kG over F_p and its Jennings theory.

Elements of kG are dense F_p coefficient vectors over the group basis,
indexed by the mixed-radix encoding of pc exponent vectors.  The dense
pipelines (ideal powers, Zassenhaus ideals, relative augmentation ideals)
run only for |G| within the brute-force bound; dimension subgroups, Jennings
tuples and graded dimensions are computed group-theoretically and work far
beyond it.

Dimension subgroups D_n(G) = G n (1 + I(kG)^n) support three routes that
must agree: the recursion [G, D_{n-1}] D_ceil(n/p)^p, the brute-force
intersection with I(kG)^n, and the product formula prod_{i p^j >= n}
gamma_i(G)^{p^j}.
"""

from __future__ import annotations

import math

import numpy as np

from . import gfp
from .pcgroup import (
    GroupElement,
    MipError,
    PcGroup,
    PreconditionError,
    ResourceBoundError,
    Subgroup,
    UsageError,
    brute_bound,
)


class GroupAlgebra:
    """kG with dense vectors; built lazily and cached on the group."""

    def __init__(self, group: PcGroup):
        if group.size > brute_bound():
            raise ResourceBoundError(
                f"|G| = {group.size} exceeds the group-algebra brute bound "
                f"{brute_bound()} (set MIPINV_BRUTE_BOUND to override; the "
                f"multiplication table alone needs 8*|G|^2 bytes)"
            )
        self.group = group
        self.p = group.p
        self.dim = group.size
        self._mul_table = None
        self._monomials = None

    def mul_table(self) -> np.ndarray:
        if self._mul_table is None:
            g = self.group
            rmul = g.rmul_tables()
            table = np.empty((self.dim, self.dim), dtype=np.int64)
            base = np.arange(self.dim, dtype=np.int64)
            for j in range(self.dim):
                col = base
                w = g.exps_of(j)
                for k in range(g.m):
                    for _ in range(w[k]):
                        col = rmul[k][col]
                table[:, j] = col
            self._mul_table = table
        return self._mul_table

    # -- element constructors

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.dim, dtype=np.int64))

    def one(self) -> "AlgebraElement":
        v = np.zeros(self.dim, dtype=np.int64)
        v[0] = 1
        return AlgebraElement(self, v)

    def vec(self, g) -> "AlgebraElement":
        """The basis element g as an algebra element."""
        exps = g.exps if isinstance(g, GroupElement) else tuple(g)
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.group.index_of(exps)] = 1
        return AlgebraElement(self, v)

    def bar(self, g) -> "AlgebraElement":
        """g - 1, the augmentation-ideal generator attached to g."""
        exps = g.exps if isinstance(g, GroupElement) else tuple(g)
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.group.index_of(exps)] += 1
        v[0] = (v[0] - 1) % self.p
        return AlgebraElement(self, v)

    def from_coeffs(self, coeffs: dict) -> "AlgebraElement":
        v = np.zeros(self.dim, dtype=np.int64)
        for key, c in coeffs.items():
            idx = key if isinstance(key, int) else self.group.index_of(
                key.exps if isinstance(key, GroupElement) else tuple(key)
            )
            v[idx] = (v[idx] + c) % self.p
        return AlgebraElement(self, v)

    def _mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        ai = np.nonzero(a)[0]
        bi = np.nonzero(b)[0]
        if ai.size and bi.size:
            gfp.mul_accumulate(out, self.mul_table(), ai, a[ai], bi, b[bi], self.p)
        return out

    def right_mul_bar_gen(self, mat: np.ndarray, k: int) -> np.ndarray:
        """Rows of mat, each multiplied on the right by bar(g_k)."""
        rmul = self.group.rmul_tables()[k]
        inv_perm = np.empty(self.dim, dtype=np.int64)
        inv_perm[rmul] = np.arange(self.dim, dtype=np.int64)
        return (mat[:, inv_perm] - mat) % self.p


def group_algebra(group: PcGroup) -> GroupAlgebra:
    alg = group._cache.get("algebra")
    if alg is None:
        alg = GroupAlgebra(group)
        group._cache["algebra"] = alg
    return alg


class AlgebraElement:
    """Sparse-in-spirit F_p vector over the group basis; stored dense."""

    __slots__ = ("algebra", "v")

    def __init__(self, algebra, v):
        self.algebra = algebra
        self.v = v
        v.setflags(write=False)

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra is not self.algebra:
            raise UsageError("algebra elements with different parents")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, (self.v + other.v) % self.algebra.p)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, (self.v - other.v) % self.algebra.p)

    def __neg__(self):
        return AlgebraElement(self.algebra, (-self.v) % self.algebra.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return AlgebraElement(self.algebra, (self.v * (other % self.algebra.p)) % self.algebra.p)
        self._check(other)
        return AlgebraElement(self.algebra, self.algebra._mul_vec(self.v, other.v))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise UsageError("negative algebra powers only via unit inversion")
        res = self.algebra.one()
        base = self
        while k:
            if k & 1:
                res = res * base
            base = base * base
            k >>= 1
        return res

    def is_zero(self):
        return not self.v.any()

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and self.algebra is other.algebra
            and np.array_equal(self.v, other.v)
        )

    def __hash__(self):
        return hash((id(self.algebra), self.v.tobytes()))

    def augmentation(self) -> int:
        return int(self.v.sum() % self.algebra.p)

    def coeffs(self) -> dict:
        """Sparse view: group index -> nonzero scalar."""
        nz = np.nonzero(self.v)[0]
        return {int(i): int(self.v[i]) for i in nz}

    def support(self):
        g = self.algebra.group
        return [GroupElement(g, g.exps_of(int(i))) for i in np.nonzero(self.v)[0]]

    def __repr__(self):
        terms = []
        g = self.algebra.group
        for i, c in sorted(self.coeffs().items()):
            gi = GroupElement(g, g.exps_of(i))
            terms.append(f"{c}*{gi!r}")
        return " + ".join(terms) if terms else "0"


def lie_bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b - b * a


class IdealBasis:
    """Echelonized subspace of kG (rows in rref, pivot indices increasing)."""

    __slots__ = ("algebra", "rows", "pivots", "label")

    def __init__(self, algebra, rows, pivots, label=None):
        self.algebra = algebra
        self.rows = rows
        self.pivots = pivots
        self.label = label

    @property
    def dim(self):
        return self.rows.shape[0]

    def contains(self, x) -> bool:
        v = x.v if isinstance(x, AlgebraElement) else x
        return gfp.in_span(v, self.rows, self.pivots, self.algebra.p)

    def reduce(self, x):
        v = x.v if isinstance(x, AlgebraElement) else x
        res = gfp.reduce_rows(v.reshape(1, -1), self.rows, self.pivots, self.algebra.p)
        return AlgebraElement(self.algebra, res[0])

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"<IdealBasis{tag}: dim {self.dim}>"


def _ideal_chain(algebra: GroupAlgebra):
    """[I^1, I^2, ...] down to the zero ideal, cached on the group."""
    g = algebra.group
    chain = g._cache.get("ideal_chain")
    if chain is None:
        p = algebra.p
        rows = np.zeros((algebra.dim - 1, algebra.dim), dtype=np.int64)
        for idx in range(1, algebra.dim):
            rows[idx - 1, idx] = 1
            rows[idx - 1, 0] = p - 1
        basis, piv = gfp.rref(rows, p)
        chain = [IdealBasis(algebra, basis, piv, label="I^1")]
        # I(kG) is generated as a left ideal by the bar(g_k), so
        # I^{n+1} = sum_k I^n * bar(g_k).
        while chain[-1].dim > 0:
            cur = chain[-1]
            prods = [
                algebra.right_mul_bar_gen(cur.rows, k) for k in range(g.m)
            ]
            stacked = np.vstack(prods) if prods else np.zeros((0, algebra.dim), np.int64)
            basis, piv = gfp.rref(stacked, p)
            chain.append(
                IdealBasis(algebra, basis, piv, label=f"I^{len(chain) + 1}")
            )
        g._cache["ideal_chain"] = chain
    return chain


def ideal_power_basis(group: PcGroup, n: int) -> IdealBasis:
    """Echelonized basis of I(kG)^n (brute force; bounded)."""
    if n < 1:
        raise UsageError("ideal power needs n >= 1")
    algebra = group_algebra(group)
    chain = _ideal_chain(algebra)
    if n <= len(chain):
        return chain[n - 1]
    return IdealBasis(algebra, chain[-1].rows, chain[-1].pivots, label=f"I^{n}")


def weight(x: AlgebraElement):
    """Largest n with x in I(kG)^n; math.inf for x = 0."""
    if x.is_zero():
        return math.inf
    chain = _ideal_chain(x.algebra)
    w = 0
    for basis in chain:
        if basis.contains(x):
            w += 1
        else:
            break
    if w == 0:
        raise UsageError("element outside I(kG) has no weight")
    return w


def weight_via_monomials(x: AlgebraElement):
    """Weight read off the graded Jennings basis; must agree with weight()."""
    if x.is_zero():
        return math.inf
    jd = jennings_data(x.algebra.group)
    mono = jd.monomial_matrix(x.algebra)
    coords = gfp.coordinates(x.v, mono["rows"], mono["pivots"], x.algebra.p)
    if coords is None:
        raise UsageError("element outside I(kG) has no weight")
    lam = (coords @ mono["transform"]) % x.algebra.p
    ws = [mono["weights"][k] for k in np.nonzero(lam)[0]]
    return min(ws)


def weight_of_group_element(group: PcGroup, g) -> object:
    """wt(g) = wt(g - 1): the largest n with g in D_n(G)."""
    exps = g.exps if isinstance(g, GroupElement) else tuple(g)
    if not any(exps):
        return math.inf
    series = dimension_series(group)
    w = 0
    for s in series:
        if s._contains_exps(exps):
            w += 1
        else:
            break
    return w


# ---------------------------------------------------------------------------
# dimension subgroups


def dimension_series(group: PcGroup):
    """[D_1, D_2, ..., D_{t+1} = 1] by the Jennings recursion."""
    series = group._cache.get("dseries")
    if series is None:
        series = [group.whole_subgroup()]
        gens = [group._gen_exps(i) for i in range(group.m)]
        while series[-1].order > 1:
            n = len(series) + 1
            prev = series[-1]
            gen_list = [group._comm(g, u) for g in gens for u in prev.igs]
            k = -(-n // group.p)  # ceil(n / p)
            gen_list += list(_subgroup_agemo(series[k - 1]).igs)
            series.append(
                group.subgroup([group.element(e) for e in gen_list], normal=True)
            )
        if len(series) == 1:
            series.append(group.trivial_subgroup())
        group._cache["dseries"] = series
    return series


def _subgroup_agemo(s: Subgroup):
    g = s.parent
    key = ("sub_agemo", s.igs)
    val = g._cache.get(key)
    if val is None:
        val = s.agemo()
        g._cache[key] = val
    return val


def dimension_subgroup(group: PcGroup, n: int, method: str = "jennings") -> Subgroup:
    """D_n(G) by one of three routes: 'jennings' (recursion), 'brute'
    (G n (1 + I^n), bounded), or 'product' (lower-central power formula)."""
    if n < 1:
        raise UsageError("dimension subgroup needs n >= 1")
    if method == "jennings":
        series = dimension_series(group)
        return series[min(n, len(series)) - 1]
    if method == "brute":
        algebra = group_algebra(group)
        basis = ideal_power_basis(group, n)
        bars = np.zeros((group.size, group.size), dtype=np.int64)
        idxs = np.arange(group.size)
        bars[idxs, idxs] = 1
        bars[:, 0] = (bars[:, 0] - 1) % group.p
        res = gfp.reduce_rows(bars, basis.rows, basis.pivots, group.p)
        member = ~res.any(axis=1)
        return group.subgroup_from_indices(np.nonzero(member)[0])
    if method == "product":
        # gamma_i^{p^(j+1)} <= gamma_i^{p^j}, so per i only the smallest p^j
        # with i p^j >= n contributes.
        lcs = group.lower_central_series()
        gens = []
        for i in range(1, len(lcs)):
            gamma = lcs[i - 1]
            if gamma.order == 1:
                continue
            q = 1
            while i * q < n:
                q *= group.p
            part = gamma if q == 1 else _subgroup_power_cached(gamma, q)
            gens += list(part.igs)
        return group.subgroup([group.element(e) for e in gens], normal=True)
    raise UsageError(f"unknown dimension-subgroup method {method!r}")


def _subgroup_power_cached(s: Subgroup, k: int):
    g = s.parent
    key = ("sub_power", s.igs, k)
    val = g._cache.get(key)
    if val is None:
        val = s.power_subgroup(k)
        g._cache[key] = val
    return val


# ---------------------------------------------------------------------------
# Jennings tuples and bases


class _Block:
    """Linear coordinates on one elementary abelian layer D_n/D_{n+1}."""

    def __init__(self, group, dn, dnext):
        self.group = group
        h, embed, restrict = dn.as_group()
        nsub = h.subgroup([restrict(u) for u in dnext.igs], normal=True)
        q, proj, _ = h.quotient(nsub)
        if q._cw or any(any(w) for w in q._pw):
            raise MipError("dimension-subgroup layer is not elementary abelian")
        self._restrict = restrict
        self._proj = proj
        self.dim = q.m

    def coords(self, exps):
        return np.array(self._proj(self._restrict(exps)).exps, dtype=np.int64)


class JenningsData:
    """Jennings tuple, weights, and layer dimensions of G.

    Tuple tie-breaking inside each weight block: first p-th powers of earlier
    tuple entries (in tuple order), then canonical igs-derived coset
    representatives in depth order.
    """

    def __init__(self, group: PcGroup):
        self.group = group
        series = dimension_series(group)
        self.t = len(series) - 1  # last n with D_n != 1
        self.dims = []
        self.entries = []  # list of (GroupElement, weight)
        for n in range(1, self.t + 1):
            dn, dnext = series[n - 1], series[n]
            block = _Block(group, dn, dnext)
            d_n = block.dim
            self.dims.append(d_n)
            if d_n == 0:
                continue
            rows = np.zeros((0, d_n), dtype=np.int64)
            piv = np.zeros(0, dtype=np.int64)
            picked = []
            candidates = []
            if n % group.p == 0:
                w_lower = n // group.p
                for e, w in self.entries:
                    if w == w_lower:
                        candidates.append(e ** group.p)
            for u in dn.igs:
                d = _exps_depth(u)
                if d not in dnext.depth_set:
                    candidates.append(GroupElement(group, dnext.coset_rep(u)))
            for cand in candidates:
                if len(picked) == d_n:
                    break
                if not dn._contains_exps(cand.exps):
                    continue
                c = block.coords(cand.exps)
                if not c.any():
                    continue
                rows2, piv2, grew = gfp.stack_rref(rows, piv, c.reshape(1, -1), group.p)
                if grew:
                    rows, piv = rows2, piv2
                    picked.append(cand)
            if len(picked) != d_n:
                raise PreconditionError(
                    f"could not complete Jennings block of weight {n}"
                )
            self.entries.extend((e, n) for e in picked)
        self._blocks = None
        assert sum(self.dims) == group.m

    @property
    def weights(self):
        return [w for _, w in self.entries]

    def tuple_elements(self):
        return [e for e, _ in self.entries]

    def block_entries(self, n):
        return [(k, e) for k, (e, w) in enumerate(self.entries) if w == n]

    def _block(self, n):
        if self._blocks is None:
            self._blocks = {}
        if n not in self._blocks:
            series = dimension_series(self.group)
            if n > self.t:
                self._blocks[n] = None
            else:
                block = _Block(self.group, series[n - 1], series[n])
                ids = self.block_entries(n)
                if ids:
                    mat = np.stack([block.coords(e.exps) for _, e in ids])
                    aug = np.hstack([mat, np.eye(len(ids), dtype=np.int64)])
                    basis, piv = gfp.rref(aug, self.group.p)
                    solver = (basis[:, : block.dim], piv, basis[:, block.dim :])
                else:
                    solver = None
                self._blocks[n] = (block, solver)
        return self._blocks[n]

    def block_coords(self, n, exps):
        """Coordinates of an element of D_n over the weight-n tuple entries,
        or None if n exceeds the filtration length."""
        pair = self._block(n)
        if pair is None:
            return None
        block, solver = pair
        target = block.coords(exps)
        if solver is None:
            if target.any():
                raise UsageError("element not in the expected layer")
            return np.zeros(0, dtype=np.int64)
        left, piv, trans = solver
        c = gfp.coordinates(target, left, piv, self.group.p)
        if c is None:
            raise UsageError("element not in the expected layer")
        return (c @ trans) % self.group.p

    # -- monomials

    def iter_monomials(self):
        """(alpha, weight) for all nonzero exponent tuples over the entries,
        in mixed-radix order (first entry most significant)."""
        p, m = self.group.p, self.group.m
        ws = self.weights
        for idx in range(1, p ** m):
            alpha = []
            rem = idx
            for k in range(m):
                q = p ** (m - 1 - k)
                alpha.append(rem // q)
                rem %= q
            yield tuple(alpha), sum(a * w for a, w in zip(alpha, ws))

    def is_factor(self, g, alpha) -> bool:
        """True when some entry t_i with alpha_i != 0 is a p-power g^{p^j}."""
        exps = g.exps if isinstance(g, GroupElement) else tuple(g)
        cur = tuple(exps)
        group = self.group
        while any(cur):
            for i, (e, _) in enumerate(self.entries):
                if alpha[i] and e.exps == cur:
                    return True
            cur = group._pow(cur, group.p)
        return False

    def monomial_matrix(self, algebra: GroupAlgebra):
        """All p^m - 1 Jennings monomials as vectors, with an rref basis and
        the transform expressing rref coordinates over the monomial rows."""
        cached = self._cached_monomials(algebra)
        if cached is not None:
            return cached
        p, m = self.group.p, self.group.m
        bars = [algebra.bar(e) for e, _ in self.entries]
        vecs = {(0,) * m: algebra.one().v}
        rows = []
        weights = []
        alphas = []
        for alpha, w in self.iter_monomials():
            j = max(k for k in range(m) if alpha[k])
            prev = list(alpha)
            prev[j] -= 1
            prev_v = vecs[tuple(prev)]
            v = algebra._mul_vec(prev_v, bars[j].v)
            vecs[alpha] = v
            rows.append(v)
            weights.append(w)
            alphas.append(alpha)
        mat = np.stack(rows)
        aug = np.hstack([mat, np.eye(mat.shape[0], dtype=np.int64)])
        basis, piv = gfp.rref(aug, p)
        ok = all(int(c) < algebra.dim for c in piv)
        res = {
            "rows": basis[:, : algebra.dim],
            "pivots": piv,
            "transform": basis[:, algebra.dim :],
            "weights": weights,
            "alphas": alphas,
            "rank": int((piv < algebra.dim).sum()) if not ok else int(basis.shape[0]),
            "matrix": mat,
        }
        algebra._monomials = (self, res)
        return res

    def _cached_monomials(self, algebra):
        cached = algebra._monomials
        if cached is not None and cached[0] is self:
            return cached[1]
        return None

    def graded_dims(self, upto=None):
        """dim I^n/I^{n+1} for n >= 1, from the weight generating polynomial."""
        p = self.group.p
        poly = np.zeros(1, dtype=object)
        poly[0] = 1
        for w in self.weights:
            step = np.zeros((p - 1) * w + 1, dtype=object)
            for a in range(p):
                step[a * w] = 1
            poly = np.convolve(poly, step)
        dims = [int(c) for c in poly[1:]]
        if upto is not None:
            dims = dims[: upto]
        return dims


def jennings_data(group: PcGroup) -> JenningsData:
    jd = group._cache.get("jennings")
    if jd is None:
        jd = JenningsData(group)
        group._cache["jennings"] = jd
    return jd


def jennings_tuple(group: PcGroup) -> JenningsData:
    return jennings_data(group)


def _exps_depth(exps):
    for i, e in enumerate(exps):
        if e:
            return i
    return None


# ---------------------------------------------------------------------------
# Zassenhaus ideals, relative augmentation ideals, the centre


def zassenhaus_ideal(group: PcGroup, n: int) -> IdealBasis:
    """H_n(kG): span of D_n(G) - 1 plus I(kG)^{n+1}."""
    if n < 1:
        raise UsageError("Zassenhaus ideal needs n >= 1")
    algebra = group_algebra(group)
    series = dimension_series(group)
    dn = series[min(n, len(series)) - 1]
    inext = ideal_power_basis(group, n + 1)
    rows = [algebra.bar(group.element(e)).v for e in dn.elements() if any(e)]
    stacked = (
        np.vstack([np.stack(rows), inext.rows])
        if rows
        else inext.rows
    )
    basis, piv = gfp.rref(stacked, group.p)
    return IdealBasis(algebra, basis, piv, label=f"H_{n}")


def jennings_complement_rows(group: PcGroup):
    """Span of the Jennings monomials not lying in G - 1 (the complement U)."""
    algebra = group_algebra(group)
    jd = jennings_data(group)
    mono = jd.monomial_matrix(algebra)
    # monomials with a single bar factor are exactly the tuple entries g - 1,
    # which lie in G - 1; everything else has larger support
    keep = [r for r, alpha in enumerate(mono["alphas"]) if sum(alpha) >= 2]
    return mono["matrix"][keep], [mono["weights"][r] for r in keep]


def _row_space_intersection(rows_a, basis_b, piv_b, p):
    """Basis of (row space of rows_a) n (span of basis_b)."""
    res = gfp.reduce_rows(rows_a, basis_b, piv_b, p)
    aug = np.hstack([res, np.eye(rows_a.shape[0], dtype=np.int64)])
    basis, piv = gfp.rref(aug, p)
    n = rows_a.shape[1]
    combos = basis[piv >= n][:, n:]
    return (combos @ rows_a) % p


def zassenhaus_decomposition_check(group: PcGroup, n: int) -> bool:
    """I^n/I^{n+1} = H_n/I^{n+1} (+) ((U n I^n) + I^{n+1})/I^{n+1}."""
    algebra = group_algebra(group)
    p = group.p
    i_n = ideal_power_basis(group, n)
    i_next = ideal_power_basis(group, n + 1)
    h_n = zassenhaus_ideal(group, n)
    u_rows, _ = jennings_complement_rows(group)
    u_cap = _row_space_intersection(u_rows, i_n.rows, i_n.pivots, p)
    w_basis, w_piv = gfp.rref(
        np.vstack([u_cap, i_next.rows]) if u_cap.shape[0] else i_next.rows, p
    )
    total, _ = gfp.rref(np.vstack([h_n.rows, w_basis]), p)
    spans = total.shape[0] == i_n.dim
    meet = h_n.dim + w_basis.shape[0] - total.shape[0]
    return spans and meet == i_next.dim


def relative_augmentation_ideal(group: PcGroup, nsub: Subgroup) -> IdealBasis:
    """The ideal kG I(kN) for a normal subgroup N; dim = |G| - |G:N|."""
    group._check_parent(nsub)
    if not nsub.verify_normal():
        raise PreconditionError("relative augmentation ideal needs a normal subgroup")
    algebra = group_algebra(group)
    p = group.p
    size = group.size
    blocks = []
    base = np.arange(size, dtype=np.int64)
    rmul = group.rmul_tables()
    for c in nsub.igs:
        col = base
        for k in range(group.m):
            for _ in range(c[k]):
                col = rmul[k][col]
        block = np.zeros((size, size), dtype=np.int64)
        block[base, col] += 1
        block[base, base] -= 1
        blocks.append(block % p)
    if not blocks:
        basis = np.zeros((0, size), dtype=np.int64)
        return IdealBasis(algebra, basis, np.zeros(0, dtype=np.int64), label="kG*I(kN)")
    basis, piv = gfp.rref(np.vstack(blocks), p)
    expected = size - size // nsub.order
    if basis.shape[0] != expected:
        raise MipErrorLayer(
            f"relative augmentation ideal has dim {basis.shape[0]}, expected {expected}"
        )
    return IdealBasis(algebra, basis, piv, label="kG*I(kN)")


def quotient_is_commutative(group: PcGroup, ideal: IdealBasis) -> bool:
    algebra = ideal.algebra
    for i in range(group.m):
        for j in range(i):
            a = algebra.vec(group.gen(i))
            b = algebra.vec(group.gen(j))
            if not ideal.contains(lie_bracket(a, b)):
                return False
    return True


def center_basis(group: PcGroup) -> IdealBasis:
    """Z(kG), spanned by conjugacy class sums."""
    algebra = group_algebra(group)
    labels, reps = group.class_partition()
    rows = np.zeros((len(reps), group.size), dtype=np.int64)
    rows[labels, np.arange(group.size)] = 1
    basis, piv = gfp.rref(rows, group.p)
    return IdealBasis(algebra, basis, piv, label="Z(kG)")


# ---------------------------------------------------------------------------
# the graded restricted Lie algebra Jen(G)


class JenningsLieAlgebra:
    """Structure constants of Jen(G) = (+) D_n/D_{n+1} on the Jennings tuple.

    The bracket of homogeneous classes is induced by the group commutator and
    the p-operation by x -> x^p; degrees add and multiply by p respectively.
    """

    def __init__(self, group: PcGroup):
        self.group = group
        self.jd = jennings_data(group)
        self.t = self.jd.t
        self._bracket_cache = {}
        self._pmap_cache = {}

    def degree_basis(self, n):
        return self.jd.block_entries(n)

    def bracket(self, i: int, j: int):
        """Coordinates of [t_i, t_j] over the entries of degree w_i + w_j
        (zero vector when the bracket degree exceeds the filtration)."""
        key = (i, j)
        if key not in self._bracket_cache:
            ei, wi = self.jd.entries[i]
            ej, wj = self.jd.entries[j]
            deg = wi + wj
            ids = self.jd.block_entries(deg)
            c = self.group._comm(ei.exps, ej.exps)
            if deg > self.t or not ids:
                coords = np.zeros(len(ids), dtype=np.int64)
            else:
                coords = self.jd.block_coords(deg, c)
            self._bracket_cache[key] = coords
        return self._bracket_cache[key]

    def pmap(self, i: int):
        """Coordinates of t_i^p over the entries of degree p * w_i."""
        if i not in self._pmap_cache:
            ei, wi = self.jd.entries[i]
            deg = self.group.p * wi
            ids = self.jd.block_entries(deg)
            if deg > self.t or not ids:
                coords = np.zeros(len(ids), dtype=np.int64)
            else:
                coords = self.jd.block_coords(deg, self.group._pow(ei.exps, self.group.p))
            self._pmap_cache[i] = coords
        return self._pmap_cache[i]

    def structure(self):
        """All structure constants, keyed by tuple-entry indices."""
        m = self.group.m
        return {
            "weights": self.jd.weights,
            "bracket": {
                (i, j): [int(c) for c in self.bracket(i, j)]
                for i in range(m)
                for j in range(m)
                if i != j
            },
            "pmap": {i: [int(c) for c in self.pmap(i)] for i in range(m)},
        }

    def fingerprint(self, enumeration_cap: int = 20000):
        """Basis-independent numeric invariants of Jen(G).

        dims per degree; dim of the span of [L_i, L_j] per degree pair; and
        for the (non-linear) p-operation on each degree, the number of
        elements with trivial image plus the dimension of the image span,
        obtained by enumerating the full layer when small enough.
        """
        p = self.group.p
        dims = self.jd.dims
        bracket_dims = []
        for wi in range(1, self.t + 1):
            for wj in range(wi, self.t + 1):
                tgt = wi + wj
                ids_i = self.jd.block_entries(wi)
                ids_j = self.jd.block_entries(wj)
                tgt_ids = self.jd.block_entries(tgt) if tgt <= self.t else []
                if not ids_i or not ids_j:
                    continue
                rows = []
                for i, _ in ids_i:
                    for j, _ in ids_j:
                        if i == j:
                            continue
                        rows.append(self.bracket(i, j))
                if rows and tgt_ids:
                    mat = np.stack(rows)
                    basis, _ = gfp.rref(mat, p)
                    d = int(basis.shape[0])
                else:
                    d = 0
                bracket_dims.append([wi, wj, d])
        pmap_stats = []
        for w in range(1, self.t + 1):
            ids = self.jd.block_entries(w)
            if not ids:
                continue
            tgt = p * w
            tgt_ids = self.jd.block_entries(tgt) if tgt <= self.t else []
            layer = p ** len(ids)
            if layer > enumeration_cap:
                pmap_stats.append([w, None, None])
                continue
            kernel = 0
            rows = []
            for code in range(layer):
                exps = self.group.identity_exps
                rem = code
                for k, (i, e) in enumerate(ids):
                    lam = rem % p
                    rem //= p
                    if lam:
                        exps = self.group._mul(exps, self.group._pow(e.exps, lam))
                img = (
                    self.jd.block_coords(tgt, self.group._pow(exps, p))
                    if tgt_ids
                    else np.zeros(0, dtype=np.int64)
                )
                if img.size == 0 or not img.any():
                    kernel += 1
                else:
                    rows.append(img)
            d = 0
            if rows:
                basis, _ = gfp.rref(np.stack(rows), p)
                d = int(basis.shape[0])
            pmap_stats.append([w, kernel, d])
        return {
            "dims": list(dims),
            "bracket_image_dims": bracket_dims,
            "pmap_stats": pmap_stats,
        }


def jen_lie_algebra(group: PcGroup) -> JenningsLieAlgebra:
    jla = group._cache.get("jen_lie")
    if jla is None:
        jla = JenningsLieAlgebra(group)
        group._cache["jen_lie"] = jla
    return jla
