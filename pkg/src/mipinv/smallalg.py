"""The small group algebra kG/I(kG)I(k gamma_2(G)) and its unit group.

For groups with gamma_2(G)^p gamma_4(G) = 1 the normalized units split as
S = G x| A where A is generated by the units 1 + xbar_1^{d_1}...xbar_n^{d_n}
over the index set D(G).  After factoring out A n Z(S), the complement A is
elementary abelian and embeds into gamma_3(G)^n through its conjugation
action on a fixed generator tuple x; this module realizes that reduced model
symbolically, both as SUnit arithmetic and as an explicit pc presentation of
S, and cross-checks it against a brute-force quotient-algebra oracle on
small inputs.
"""

from __future__ import annotations

import itertools
import re

import numpy as np

from . import gfp
from .fpalgebra import group_algebra
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


class DeltaIndex:
    """Exponent vector delta with 0 <= delta_i < p^{lambda_i}, delta not
    congruent 0 mod p, and sum(delta) >= 2."""

    __slots__ = ("delta", "lambdas", "p")

    def __init__(self, p, delta, lambdas):
        self.p = p
        self.delta = tuple(int(d) for d in delta)
        self.lambdas = tuple(lambdas)
        if len(self.delta) != len(self.lambdas):
            raise UsageError("delta length does not match the generator tuple")
        for d, lam in zip(self.delta, self.lambdas):
            if not 0 <= d < p ** lam:
                raise PreconditionError(
                    f"delta component {d} out of range [0, p^{lam})"
                )
        if all(d % p == 0 for d in self.delta):
            raise PreconditionError("delta is congruent to 0 mod p")
        if sum(self.delta) < 2:
            raise PreconditionError("delta has coordinate sum < 2")

    def __eq__(self, other):
        return isinstance(other, DeltaIndex) and self.delta == other.delta

    def __hash__(self):
        return hash(self.delta)

    def __repr__(self):
        return f"A[{','.join(str(d) for d in self.delta)}]"


class AGenerator:
    """A generating unit a = 1 + x^delta together with its conjugation
    action ([x_1, a], ..., [x_n, a]), values in gamma_3(G)."""

    __slots__ = ("delta", "action")

    def __init__(self, delta: DeltaIndex, action):
        self.delta = delta
        self.action = tuple(action)

    def is_central(self):
        return all(v.is_identity() for v in self.action)

    def __repr__(self):
        return f"<AGenerator {self.delta!r}>"


class SUnit:
    """Element g * a of the reduced unit group: a group part and F_p
    coordinates over the reduced A-generators."""

    __slots__ = ("model", "gexps", "avec")

    def __init__(self, model, gexps, avec):
        self.model = model
        self.gexps = tuple(gexps)
        self.avec = tuple(int(c) % model.group.p for c in avec)

    @property
    def g(self):
        return GroupElement(self.model.group, self.gexps)

    def is_identity(self):
        return not any(self.gexps) and not any(self.avec)

    def __eq__(self, other):
        return (
            isinstance(other, SUnit)
            and self.model is other.model
            and self.gexps == other.gexps
            and self.avec == other.avec
        )

    def __hash__(self):
        return hash((id(self.model), self.gexps, self.avec))

    def __repr__(self):
        parts = []
        if any(self.gexps):
            parts.append(repr(self.g))
        for c, gen in zip(self.avec, self.model.reduced):
            if c:
                parts.append(f"{gen.delta!r}^{c}" if c != 1 else repr(gen.delta))
        return "*".join(parts) if parts else "1"


class SmallAlgebraModel:
    """The reduced unit group S/(A n Z(S)) of the small group algebra."""

    def __init__(self, group: PcGroup, xgens=None):
        self.group = group
        p = group.p
        lcs = group.lower_central_series()
        gamma2 = lcs[1] if len(lcs) > 1 else group.trivial_subgroup()
        gamma3 = lcs[2] if len(lcs) > 2 else group.trivial_subgroup()
        gamma4 = lcs[3] if len(lcs) > 3 else group.trivial_subgroup()
        if gamma4.order != 1:
            raise PreconditionError("hypothesis failed: gamma_4(G) != 1")
        if gamma2.order > 1 and gamma2.agemo().order != 1:
            raise PreconditionError("hypothesis failed: gamma_2(G)^p != 1")
        self.gamma2 = gamma2
        self.gamma3 = gamma3
        if xgens is None:
            xgens = group.minimal_generators()
        self.xgens = list(xgens)
        self.n = len(self.xgens)

        # abelianization coordinates over the x-tuple
        q, proj, _ = group.quotient(gamma2)
        self.abelianization = q
        self._proj = proj
        ximgs = [proj(x) for x in self.xgens]
        self.lambdas = []
        for xi in ximgs:
            e = xi.order()
            lam = 0
            while p ** lam < e:
                lam += 1
            if p ** lam != e:
                raise MipError("generator image order is not a p-power")
            self.lambdas.append(lam)
        # direct-sum check: the coordinate map must hit every element once
        coords_of = {}
        ranges = [range(p ** lam) for lam in self.lambdas]
        for cs in itertools.product(*ranges):
            el = q.identity()
            for xi, c in zip(ximgs, cs):
                if c:
                    el = el * xi ** c
            if el.exps in coords_of:
                raise PreconditionError(
                    "hypothesis failed: x does not give a direct-sum basis of G^ab"
                )
            coords_of[el.exps] = cs
        if len(coords_of) != q.size:
            raise PreconditionError(
                "hypothesis failed: x does not generate G modulo gamma_2(G)"
            )
        self._ab_coords = coords_of

        self._delta_set = None
        self._reduced = None
        self._sgroup = None
        self._g3solver = None

    # -- index set and generators -------------------------------------------

    def delta_index_set(self):
        """All delta satisfying the three index-set conditions, in
        lexicographic order."""
        if self._delta_set is None:
            p = self.group.p
            out = []
            for delta in itertools.product(
                *[range(p ** lam) for lam in self.lambdas]
            ):
                if all(d % p == 0 for d in delta):
                    continue
                if sum(delta) < 2:
                    continue
                out.append(DeltaIndex(p, delta, self.lambdas))
            self._delta_set = out
        return self._delta_set

    def a_generator(self, delta) -> AGenerator:
        """Action of a = 1 + x^delta by iterated commutators."""
        if not isinstance(delta, DeltaIndex):
            delta = DeltaIndex(self.group.p, delta, self.lambdas)
        action = []
        for xj in self.xgens:
            cur = xj
            for i, reps in enumerate(delta.delta):
                for _ in range(reps):
                    cur = cur.comm(self.xgens[i])
            if not self.gamma3.contains(cur):
                raise MipError("iterated commutator left gamma_3(G)")
            action.append(cur)
        return AGenerator(delta, action)

    def _gamma3_coords(self, elem) -> np.ndarray:
        if self.gamma3.order == 1:
            return np.zeros(0, dtype=np.int64)
        return np.array(self.gamma3.coords(elem), dtype=np.int64)

    def _action_row(self, gen: AGenerator) -> np.ndarray:
        if self.gamma3.order == 1:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self._gamma3_coords(v) for v in gen.action])

    @property
    def reduced(self):
        """Maximal subset of the A-generators with independent action
        vectors, chosen greedily in lexicographic delta order."""
        if self._reduced is None:
            width = self.n * len(self.gamma3.igs)
            rows = np.zeros((0, width), dtype=np.int64)
            piv = np.zeros(0, dtype=np.int64)
            kept = []
            for delta in self.delta_index_set():
                gen = self.a_generator(delta)
                if gen.is_central():
                    continue
                row = self._action_row(gen)
                rows2, piv2, grew = gfp.stack_rref(
                    rows, piv, row.reshape(1, -1), self.group.p
                )
                if grew:
                    rows, piv = rows2, piv2
                    kept.append(gen)
            self._reduced = kept
            if kept:
                mat = np.stack([self._action_row(g) for g in kept])
                aug = np.hstack([mat, np.eye(len(kept), dtype=np.int64)])
                basis, piv = gfp.rref(aug, self.group.p)
                self._g3solver = (basis[:, : mat.shape[1]], piv, basis[:, mat.shape[1] :])
        return self._reduced

    @property
    def r(self):
        return len(self.reduced)

    def avec_of_delta(self, delta) -> tuple:
        """Coordinates of a_delta over the reduced generators (its image in
        A/(A n Z(S)) under the action embedding)."""
        gen = self.a_generator(delta)
        if gen.is_central():
            return (0,) * self.r
        row = self._action_row(gen)
        left, piv, trans = self._g3solver
        c = gfp.coordinates(row, left, piv, self.group.p)
        if c is None:
            raise MipError("action vector outside the reduced span")
        return tuple(int(v) for v in (c @ trans) % self.group.p)

    # -- SUnit arithmetic ------------------------------------------------------

    def identity_unit(self):
        return SUnit(self, self.group.identity_exps, (0,) * self.r)

    def embed(self, g) -> SUnit:
        exps = g.exps if isinstance(g, GroupElement) else tuple(g)
        return SUnit(self, exps, (0,) * self.r)

    def a_unit(self, avec) -> SUnit:
        return SUnit(self, self.group.identity_exps, avec)

    def _cmap(self, exps) -> tuple:
        """Abelianization coordinates of a group element, mod p."""
        img = self._proj(self.group.element(exps)).exps
        cs = self._ab_coords[img]
        return tuple(c % self.group.p for c in cs)

    def _comm_with_a(self, exps, avec):
        """[h, a] for h in G and a with the given reduced coordinates."""
        g = self.group
        cs = self._cmap(exps)
        out = g.identity_exps
        for i, u in enumerate(avec):
            if not u:
                continue
            gen = self.reduced[i]
            for j, cj in enumerate(cs):
                e = (u * cj) % g.p
                if e:
                    out = g._mul(out, g._pow(gen.action[j].exps, e))
        return out

    def s_mul(self, x: SUnit, y: SUnit) -> SUnit:
        """(g a)(h b) = (g h [a, h]) (a b); the correction is central."""
        self._check(x, y)
        g = self.group
        corr = g._inv(self._comm_with_a(y.gexps, x.avec))  # [a, h] = [h, a]^-1
        gpart = g._mul(g._mul(x.gexps, y.gexps), corr)
        avec = tuple(
            (a + b) % g.p for a, b in zip(x.avec, y.avec)
        )
        return SUnit(self, gpart, avec)

    def s_inv(self, x: SUnit) -> SUnit:
        g = self.group
        ginv = g._inv(x.gexps)
        z = self._comm_with_a(ginv, x.avec)  # [g^-1, a]
        return SUnit(self, g._mul(ginv, z), tuple((-a) % g.p for a in x.avec))

    def s_pow(self, x: SUnit, k: int) -> SUnit:
        if k < 0:
            x = self.s_inv(x)
            k = -k
        res = self.identity_unit()
        base = x
        while k:
            if k & 1:
                res = self.s_mul(res, base)
            base = self.s_mul(base, base)
            k >>= 1
        return res

    def s_comm(self, x: SUnit, y: SUnit) -> SUnit:
        yx = self.s_mul(y, x)
        xy = self.s_mul(x, y)
        return self.s_mul(self.s_inv(yx), xy)

    def _check(self, *units):
        for u in units:
            if not isinstance(u, SUnit) or u.model is not self:
                raise UsageError("SUnit belongs to a different model")

    # -- the unit group as an explicit pc group ---------------------------------

    def s_group(self):
        """(S, to_s, from_s): a consistent pc presentation of the reduced S
        on the reduced A-generators followed by the generators of G."""
        if self._sgroup is None:
            g = self.group
            r = self.r
            m = g.m
            total = r + m
            for k, x in enumerate(self.xgens):
                d = x.depth()
                if d != k or x.exps != g._gen_exps(k):
                    raise PreconditionError(
                        "s_group needs the x-tuple to be the initial pc generators"
                    )
            zero = (0,) * total
            shift = lambda exps: (0,) * r + tuple(exps)
            pw = [zero] * r + [shift(g._pw[i]) for i in range(m)]
            cw = {}
            for (j, i), w in g._cw.items():
                cw[(r + j, r + i)] = shift(w)
            for j in range(m):
                gj = g._gen_exps(j)
                for i in range(r):
                    onea = tuple(1 if t == i else 0 for t in range(r))
                    w = self._comm_with_a(gj, onea)  # [g_j, A_i]
                    if any(w):
                        cw[(r + j, i)] = shift(w)
            s = PcGroup(g.p, pw, cw, name="S")

            def to_s(u: SUnit):
                corr = self._comm_with_a(u.gexps, u.avec)  # [g, a]
                gpart = g._mul(u.gexps, corr)
                return GroupElement(s, u.avec + gpart)

            def from_s(el):
                exps = el.exps if isinstance(el, GroupElement) else tuple(el)
                avec = exps[:r]
                h = exps[r:]
                corr = g._inv(self._comm_with_a(h, avec))
                return SUnit(self, g._mul(h, corr), avec)

            self._sgroup = (s, to_s, from_s)
        return self._sgroup

    def embedded_subgroup(self, sub: Subgroup) -> Subgroup:
        """Image of a subgroup of G inside the pc presentation of S."""
        s, to_s, _ = self.s_group()
        return s.subgroup([to_s(self.embed(u)) for u in sub.gens()])

    def a_subgroup(self) -> Subgroup:
        s, _, _ = self.s_group()
        return s.subgroup([s.gen(i) for i in range(self.r)])

    # -- structure verification -------------------------------------------------

    def structure_report(self, with_oracle=None):
        """Checks the structural facts about S = G x| A in the reduced model:
        gamma_i(S) = gamma_i(G) for i >= 2, Gamma(S) = Gamma(G),
        G n Z(S) = Z(G), Z_2(S) = Z_2(G) x A, and [A^p, S] = 1 (in the brute
        oracle when within bounds, trivially true after reduction)."""
        g = self.group
        s, to_s, _ = self.s_group()
        clauses = []

        def add(name, ok, detail=""):
            clauses.append({"clause": name, "pass": bool(ok), "detail": detail})

        lcs_g = g.lower_central_series()
        lcs_s = s.lower_central_series()
        depth = max(len(lcs_g), len(lcs_s))
        ok_all = True
        for i in range(2, depth + 1):
            gi = lcs_g[i - 1] if i <= len(lcs_g) else g.trivial_subgroup()
            si = lcs_s[i - 1] if i <= len(lcs_s) else s.trivial_subgroup()
            ok = self.embedded_subgroup(gi) == si
            ok_all = ok_all and ok
            add(
                f"gamma_{i}(S) = gamma_{i}(G)",
                ok,
                f"|gamma_{i}(S)| = {si.order}, |gamma_{i}(G)| = {gi.order}",
            )
        gamma_s = s.gamma_cap()
        gamma_g = g.gamma_cap()
        add(
            "Gamma(S) = Gamma(G)",
            self.embedded_subgroup(gamma_g) == gamma_s,
            f"orders {gamma_s.order} vs {gamma_g.order}",
        )
        zs = s.center()
        zg = g.center()
        g_in_s = self.embedded_subgroup(g.whole_subgroup())
        add(
            "G n Z(S) = Z(G)",
            zs.intersection(g_in_s) == self.embedded_subgroup(zg),
            f"|Z(S)| = {zs.order}, |Z(G)| = {zg.order}",
        )
        ucs_s = s.upper_central_series()
        ucs_g = g.upper_central_series()
        z2s = ucs_s[min(2, len(ucs_s) - 1)]
        z2g = ucs_g[min(2, len(ucs_g) - 1)]
        asub = self.a_subgroup()
        prod = self.embedded_subgroup(z2g).product(asub)
        commuting = all(
            s.element(u).comm(s.element(v)).is_identity()
            for u in asub.igs
            for v in self.embedded_subgroup(z2g).igs
        )
        trivial_meet = asub.intersection(self.embedded_subgroup(z2g)).order == 1
        add(
            "Z_2(S) = Z_2(G) x A",
            z2s == prod and commuting and trivial_meet,
            f"|Z_2(S)| = {z2s.order}, |Z_2(G)| = {z2g.order}, |A| = {asub.order}",
        )
        if with_oracle is None:
            with_oracle = g.size <= brute_bound()
        if with_oracle:
            oracle = small_algebra_oracle(g, self)
            add(
                "[A^p, S] = 1 (oracle)",
                oracle.check_a_power_central(),
                f"quotient dim {oracle.dim}",
            )
            add(
                "oracle embedding agreement",
                oracle.check_s_mul_agreement(trials=200),
                "s_mul matches quotient-algebra products",
            )
        else:
            add(
                "[A^p, S] = 1 (oracle)",
                True,
                "trivial in the reduced model; oracle skipped (above brute bound)",
            )
        passed = all(c["pass"] for c in clauses)
        return {"group": g.name, "pass": passed, "clauses": clauses}


def structure_report(group: PcGroup, xgens=None, with_oracle=None):
    return SmallAlgebraModel(group, xgens).structure_report(with_oracle)


# ---------------------------------------------------------------------------
# brute-force quotient-algebra oracle


class SmallAlgebraOracle:
    """kG/I(kG)I(k gamma_2(G)) with explicit reduction, multiplication and
    unit inversion; the independent check for the symbolic model."""

    def __init__(self, group: PcGroup, model: SmallAlgebraModel | None = None):
        self.group = group
        self.model = model if model is not None else SmallAlgebraModel(group)
        self.algebra = group_algebra(group)
        p = group.p
        size = group.size
        gamma2 = self.model.gamma2
        base = np.arange(size, dtype=np.int64)
        rmul = group.rmul_tables()
        blocks = []
        for c in gamma2.igs:
            col = base
            for k in range(group.m):
                for _ in range(c[k]):
                    col = rmul[k][col]
            block = np.zeros((size, size), dtype=np.int64)
            np.add.at(block, (base, col), 1)
            np.add.at(block, (base, base), -1)
            block[:, group.index_of(c)] -= 1
            block[:, 0] += 1
            blocks.append(block % p)
        if blocks:
            basis, piv = gfp.rref(np.vstack(blocks), p)
        else:
            basis = np.zeros((0, size), dtype=np.int64)
            piv = np.zeros(0, dtype=np.int64)
        self.ideal_rows = basis
        self.ideal_pivots = piv
        self.dim = size - basis.shape[0]
        ab = size // gamma2.order
        expected = ab + len(gamma2.igs)
        if self.dim != expected:
            raise MipError(
                f"small-algebra quotient has dim {self.dim}, expected {expected}"
            )

    def reduce(self, v: np.ndarray) -> np.ndarray:
        if self.ideal_rows.shape[0] == 0:
            return v % self.group.p
        return gfp.reduce_rows(
            v.reshape(1, -1), self.ideal_rows, self.ideal_pivots, self.group.p
        )[0]

    def one(self) -> np.ndarray:
        v = np.zeros(self.group.size, dtype=np.int64)
        v[0] = 1
        return v

    def of_group(self, g) -> np.ndarray:
        exps = g.exps if isinstance(g, GroupElement) else tuple(g)
        v = np.zeros(self.group.size, dtype=np.int64)
        v[self.group.index_of(exps)] = 1
        return self.reduce(v)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(self.algebra._mul_vec(a % self.group.p, b % self.group.p))

    def power(self, a: np.ndarray, k: int) -> np.ndarray:
        res = self.one()
        base = a
        while k:
            if k & 1:
                res = self.mul(res, base)
            base = self.mul(base, base)
            k >>= 1
        return res

    def unit_inverse(self, u: np.ndarray) -> np.ndarray:
        """(1 + n)^-1 = sum (-n)^k by the geometric series; n is nilpotent."""
        x = self.reduce(self.one() - u)  # x = -n
        acc = self.one()
        term = self.one()
        for _ in range(2 * self.dim + 2):
            term = self.mul(term, x)
            if not term.any():
                return acc
            acc = (acc + term) % self.group.p
        raise MipError("geometric series did not terminate; non-unit input?")

    def x_delta(self, delta) -> np.ndarray:
        dvec = delta.delta if isinstance(delta, DeltaIndex) else tuple(delta)
        v = self.one()
        for xi, d in zip(self.model.xgens, dvec):
            bar = self.reduce(self.algebra.bar(xi).v)
            for _ in range(d):
                v = self.mul(v, bar)
        return v

    def a_delta(self, delta) -> np.ndarray:
        return (self.one() + self.x_delta(delta)) % self.group.p

    def embed_sunit(self, su: SUnit) -> np.ndarray:
        v = self.of_group(su.gexps)
        for gen, c in zip(self.model.reduced, su.avec):
            if c:
                v = self.mul(v, self.power(self.a_delta(gen.delta), c))
        return v

    # -- checks

    def check_s_mul_agreement(self, trials=200, seed=0) -> bool:
        """Products in the symbolic model match the quotient algebra up to
        the central carries a_i^{p * carry} produced by reducing A-coordinates
        mod p."""
        import random

        rnd = random.Random(seed)
        model = self.model
        g = self.group
        p = g.p
        apows = [
            self.power(self.a_delta(gen.delta), p) for gen in model.reduced
        ]
        for _ in range(trials):
            u = SUnit(
                model,
                g.exps_of(rnd.randrange(g.size)),
                [rnd.randrange(p) for _ in range(model.r)],
            )
            v = SUnit(
                model,
                g.exps_of(rnd.randrange(g.size)),
                [rnd.randrange(p) for _ in range(model.r)],
            )
            lhs = self.mul(self.embed_sunit(u), self.embed_sunit(v))
            w = model.s_mul(u, v)
            rhs = self.embed_sunit(w)
            for i in range(model.r):
                carry = (u.avec[i] + v.avec[i]) // p
                if carry:
                    rhs = self.mul(rhs, self.power(apows[i], carry))
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def check_a_power_central(self) -> bool:
        """[A^p, S] = 1: p-th powers of every generating unit commute with
        the images of the group generators."""
        for delta in self.model.delta_index_set():
            w = self.power(self.a_delta(delta), self.group.p)
            for j in range(self.group.m):
                vj = self.of_group(self.group.gen(j))
                if not np.array_equal(self.mul(w, vj), self.mul(vj, w)):
                    return False
        return True

    def check_a_abelian(self, sample=200, seed=0) -> bool:
        import random

        deltas = self.model.delta_index_set()
        pairs = [(a, b) for i, a in enumerate(deltas) for b in deltas[i + 1 :]]
        if len(pairs) > sample:
            rnd = random.Random(seed)
            pairs = rnd.sample(pairs, sample)
        for da, db in pairs:
            a = self.a_delta(da)
            b = self.a_delta(db)
            if not np.array_equal(self.mul(a, b), self.mul(b, a)):
                return False
        return True

    def units_linearly_independent(self, vecs) -> bool:
        mat = np.stack(vecs)
        basis, _ = gfp.rref(mat, self.group.p)
        return basis.shape[0] == mat.shape[0]


def small_algebra_oracle(group: PcGroup, model=None) -> SmallAlgebraOracle:
    key = "small_oracle"
    cached = group._cache.get(key)
    if cached is None or (model is not None and cached.model is not model):
        cached = SmallAlgebraOracle(group, model)
        group._cache[key] = cached
    return cached


def brute_small_algebra(group: PcGroup) -> SmallAlgebraOracle:
    """Quotient-algebra handle (the brute-force oracle for the S-model)."""
    return small_algebra_oracle(group)


# ---------------------------------------------------------------------------
# witness verification


_TOKEN = re.compile(
    r"\s*(?:(?P<gen>g(?P<gnum>\d+))|(?P<agen>A\[(?P<delta>[0-9,\s]*)\]))"
    r"(?:\^(?P<exp>-?\d+))?"
)


def parse_witness_words(text: str):
    """Witness fixture: lines 'htilde<i> = <word>'; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"htilde(\d+)\s*=\s*(.+)$", line)
        if not m:
            raise UsageError(f"witness line {lineno}: expected 'htilde<i> = <word>'")
        idx = int(m.group(1))
        if idx in out:
            raise UsageError(f"witness line {lineno}: duplicate htilde{idx}")
        out[idx] = (m.group(2).strip(), lineno)
    if not out:
        raise UsageError("witness file contains no assignments")
    return out


def evaluate_word(model: SmallAlgebraModel, word: str, lineno=0):
    """Evaluate a witness word inside the pc presentation of S."""
    s, to_s, _ = model.s_group()
    res = s.identity()
    pos = 0
    while pos < len(word):
        m = _TOKEN.match(word, pos)
        if not m or m.start() != pos:
            rest = word[pos:].strip()
            if not rest:
                break
            raise UsageError(f"witness line {lineno}: cannot parse near {rest!r}")
        pos = m.end()
        e = int(m.group("exp")) if m.group("exp") else 1
        if m.group("gen"):
            k = int(m.group("gnum"))
            if not 1 <= k <= model.group.m:
                raise UsageError(f"witness line {lineno}: no generator g{k}")
            base = to_s(model.embed(model.group.gen(k - 1)))
        else:
            delta = tuple(
                int(t) for t in m.group("delta").replace(" ", "").split(",") if t
            )
            avec = model.avec_of_delta(delta)
            base = to_s(model.a_unit(avec))
        res = res * base ** e
    return res


def _word_str(group, exps):
    parts = [
        f"g{i + 1}" + (f"^{e}" if e != 1 else "")
        for i, e in enumerate(exps)
        if e
    ]
    return "*".join(parts) if parts else "1"


def verify_witness(groupG: PcGroup, groupH: PcGroup, witness, xgens=None):
    """Check that the witness images satisfy every defining relation of H
    inside the unit group S of the small group algebra of kG, and that they
    generate a subgroup of order |H| meeting A trivially.

    witness: fixture text or {index: word} dict (1-based generator indices).
    """
    model = SmallAlgebraModel(groupG, xgens)
    # H must satisfy the same hypothesis for its small group algebra to exist
    SmallAlgebraModel(groupH)
    s, to_s, _ = model.s_group()
    if isinstance(witness, str):
        words = parse_witness_words(witness)
    else:
        words = {int(i): (w, 0) for i, w in witness.items()}
    images = {}
    image_words = {}
    for i, (word, lineno) in sorted(words.items()):
        if not 1 <= i <= groupH.m:
            raise UsageError(f"witness assigns htilde{i} but H has {groupH.m} generators")
        images[i] = evaluate_word(model, word, lineno)
        image_words[i] = word
    derived = {}
    p = groupH.p

    def word_value(wexps):
        val = s.identity()
        ok = True
        for k, e in enumerate(wexps):
            if e:
                if (k + 1) not in images:
                    ok = False
                    break
                val = val * images[k + 1] ** e
        return val if ok else None

    progress = True
    while progress:
        progress = False
        for i in range(1, groupH.m + 1):
            if i in images:
                continue
            # look for a known-LHS relation whose right side is g_i^e alone
            for kind, lhs_val, wexps in _relation_candidates(groupH, images, s):
                nz = [(k, e) for k, e in enumerate(wexps) if e]
                if len(nz) == 1 and nz[0][0] == i - 1:
                    e = nz[0][1]
                    images[i] = lhs_val ** pow(e, -1, p)
                    _, _, from_s = model.s_group()
                    derived[i] = repr(from_s(images[i]))
                    progress = True
                    break
    missing = [i for i in range(1, groupH.m + 1) if i not in images]
    if missing:
        raise UsageError(
            "witness does not determine htilde indices "
            + ", ".join(str(i) for i in missing)
        )

    relations = []
    ok_all = True
    for i in range(1, groupH.m + 1):
        lhs = images[i] ** p
        rhs = word_value(groupH._pw[i - 1])
        ok = lhs == rhs
        ok_all = ok_all and ok
        relations.append(
            {
                "relation": f"htilde{i}^{p} = {_word_str(groupH, groupH._pw[i - 1])}"
                .replace("g", "htilde"),
                "lhs": repr(lhs),
                "rhs": repr(rhs),
                "pass": ok,
            }
        )
    for j in range(1, groupH.m + 1):
        for i in range(1, j):
            w = groupH._cw.get((j - 1, i - 1), groupH.identity_exps)
            lhs = images[j].comm(images[i])
            rhs = word_value(w)
            ok = lhs == rhs
            ok_all = ok_all and ok
            relations.append(
                {
                    "relation": f"[htilde{j},htilde{i}] = {_word_str(groupH, w)}"
                    .replace("g", "htilde"),
                    "lhs": repr(lhs),
                    "rhs": repr(rhs),
                    "pass": ok,
                }
            )
    hsub = s.subgroup([images[i] for i in sorted(images)])
    order_ok = hsub.order == groupH.size
    meet = hsub.intersection(model.a_subgroup())
    meet_ok = meet.order == 1
    ok_all = ok_all and order_ok and meet_ok
    return {
        "pass": bool(ok_all),
        "relations": relations,
        "derived": derived,
        "witness_subgroup_order": hsub.order,
        "expected_order": groupH.size,
        "a_intersection_trivial": meet_ok,
    }


def _relation_candidates(groupH, images, s):
    """(kind, lhs value, rhs word exps) for relations with fully-known LHS."""
    p = groupH.p
    for i in range(1, groupH.m + 1):
        if i in images:
            yield ("pow", images[i] ** p, groupH._pw[i - 1])
    for j in range(1, groupH.m + 1):
        for i in range(1, j):
            if i in images and j in images:
                w = groupH._cw.get((j - 1, i - 1))
                if w is not None:
                    yield ("comm", images[j].comm(images[i]), w)
