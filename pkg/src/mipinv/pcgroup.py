"""Finite p-groups given by consistent power-commutator presentations.

A group of order p^m is presented on generators g_1, ..., g_m with relations

    g_i^p       = pw[i]      (a word in g_{i+1}, ..., g_m)
    [g_j, g_i]  = cw[j][i]   (a word in g_{j+1}, ..., g_m, for j > i)

All relative orders are exactly p, and relation words are supported on
strictly later generators, so the chain G_i = <g_i, ..., g_m> is a central
series and collection from the left terminates.  Elements are exponent
vectors in [0, p)^m; the all-zero vector is the identity.

Conventions: [x, y] = x^-1 y^-1 x y, conjugation x^y = y^-1 x y is a right
action, and [x, y, z] = [[x, y], z].
"""

from __future__ import annotations

import os

import numpy as np

from . import gfp


class MipError(Exception):
    pass


class UsageError(MipError):
    """Mismatched parents, malformed arguments."""


class PreconditionError(MipError):
    """A documented hypothesis of an operation does not hold."""


class ResourceBoundError(MipError):
    """Input exceeds a documented brute-force bound."""


class InconsistentPresentationError(MipError):
    """Overlap check failed; the relations do not define a group of order p^m."""


def _env_bound(name, default):
    raw = os.environ.get(name, "").strip()
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise UsageError(f"{name} must be an integer, got {raw!r}")
    return default


#: Largest |G| for which full element tables (index permutations) are built.
#: 5^6 = 15625 and 7^5 = 16807 both fit; override with MIPINV_ORBIT_BOUND.
def orbit_bound():
    return _env_bound("MIPINV_ORBIT_BOUND", 50000)


#: Largest |G| for which dense group-algebra pipelines run (|G|^2 matrices).
#: Default 3^6 = 729; override with MIPINV_BRUTE_BOUND (memory grows as
#: 12 * |G|^2 bytes for the multiplication table plus echelon workspaces).
def brute_bound():
    return _env_bound("MIPINV_BRUTE_BOUND", 729)


class GroupElement:
    """An element in collected normal form: the exponent vector of
    prod g_i^{e_i}."""

    __slots__ = ("group", "exps")

    def __init__(self, group, exps):
        self.group = group
        self.exps = tuple(exps)

    def __mul__(self, other):
        g = self.group
        g._check_parent(other)
        return GroupElement(g, g._mul(self.exps, other.exps))

    def __pow__(self, k):
        g = self.group
        return GroupElement(g, g._pow(self.exps, k))

    def inverse(self):
        return GroupElement(self.group, self.group._inv(self.exps))

    def comm(self, other):
        g = self.group
        g._check_parent(other)
        return GroupElement(g, g._comm(self.exps, other.exps))

    def conj(self, other):
        g = self.group
        g._check_parent(other)
        return GroupElement(g, g._conj(self.exps, other.exps))

    def is_identity(self):
        return not any(self.exps)

    def order(self):
        return self.group.element_order(self.exps)

    def depth(self):
        return _depth(self.exps)

    @property
    def index(self):
        return self.group.index_of(self.exps)

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.group is other.group
            and self.exps == other.exps
        )

    def __hash__(self):
        return hash((id(self.group), self.exps))

    def __repr__(self):
        if self.is_identity():
            return "1"
        parts = [
            f"g{i + 1}" + (f"^{e}" if e != 1 else "")
            for i, e in enumerate(self.exps)
            if e
        ]
        return "*".join(parts)


def _depth(exps):
    for i, e in enumerate(exps):
        if e:
            return i
    return None


class PcGroup:
    def __init__(self, p, power_words, comm_words, name=None, check=True):
        m = len(power_words)
        self.p = p
        self.m = m
        self.size = p ** m
        self.name = name
        zero = (0,) * m
        pw = []
        for i, w in enumerate(power_words):
            w = zero if w is None else tuple(w)
            if len(w) != m or any(not (0 <= e < p) for e in w):
                raise UsageError(f"bad power word for g{i + 1}")
            if any(w[k] for k in range(i + 1)):
                raise UsageError(
                    f"power word of g{i + 1} not supported on later generators"
                )
            pw.append(w)
        cw = {}
        for (j, i), w in comm_words.items():
            if not (0 <= i < j < m):
                raise UsageError(f"bad commutator index pair {(j, i)}")
            w = tuple(w)
            if len(w) != m or any(not (0 <= e < p) for e in w):
                raise UsageError(f"bad commutator word for [g{j + 1},g{i + 1}]")
            if any(w[k] for k in range(j + 1)):
                raise UsageError(
                    f"commutator word [g{j + 1},g{i + 1}] not supported on later generators"
                )
            if any(w):
                cw[(j, i)] = w
        self._pw = tuple(pw)
        self._cw = cw
        self.identity_exps = zero
        self._conj_gen_cache = {}
        self._cache = {}
        self._idx_weights = tuple(p ** (m - 1 - i) for i in range(m))
        if check:
            self.check_consistency()

    # -- basics ------------------------------------------------------------

    def _check_parent(self, other):
        if isinstance(other, GroupElement):
            if other.group is not self:
                raise UsageError("elements belong to different groups")
        elif isinstance(other, Subgroup):
            if other.parent is not self:
                raise UsageError("subgroup belongs to a different group")

    def element(self, exps):
        exps = tuple(int(e) % self.p for e in exps)
        if len(exps) != self.m:
            raise UsageError(f"expected {self.m} exponents")
        return GroupElement(self, exps)

    def identity(self):
        return GroupElement(self, self.identity_exps)

    def gen(self, i):
        """Generator g_{i+1} (0-based i)."""
        e = [0] * self.m
        e[i] = 1
        return GroupElement(self, tuple(e))

    def gens(self):
        return [self.gen(i) for i in range(self.m)]

    def index_of(self, exps):
        w = self._idx_weights
        return sum(e * w[i] for i, e in enumerate(exps))

    def exps_of(self, idx):
        out = []
        for w in self._idx_weights:
            out.append(idx // w)
            idx %= w
        return tuple(out)

    def elements(self):
        for idx in range(self.size):
            yield GroupElement(self, self.exps_of(idx))

    # -- collection --------------------------------------------------------

    def _mul(self, x, y):
        for i in range(self.m):
            e = y[i]
            if e:
                x = self._mul_syl(x, i, e)
        return x

    def _mul_syl(self, x, i, e):
        """Collected form of x * g_i^e for 0 < e < p."""
        m = self.m
        tail = None
        for k in range(i + 1, m):
            if x[k]:
                tail = k
                break
        if tail is None:
            a = x[i] + e
            r = a % self.p
            res = x[:i] + (r,) + x[i + 1 :]
            if a >= self.p:
                res = self._mul(res, self._pw[i])
            return res
        head = x[: i + 1] + (0,) * (m - i - 1)
        tail_exps = (0,) * (i + 1) + x[i + 1 :]
        conj_tail = self._conj_by_gen(tail_exps, i, e)
        return self._mul(self._mul_syl(head, i, e), conj_tail)

    def _conj_by_gen(self, x, i, e):
        """x^{g_i^e} for x supported on generators with index > i."""
        res = self.identity_exps
        for k in range(i + 1, self.m):
            c = x[k]
            if c:
                res = self._mul(res, self._pow(self._conj_gen(k, i, e), c))
        return res

    def _conj_gen(self, k, i, e):
        """g_k^{g_i^e} for k > i, 1 <= e < p; memoized."""
        key = (k, i, e)
        cached = self._conj_gen_cache.get(key)
        if cached is not None:
            return cached
        if e == 1:
            w = self._cw.get((k, i))
            gk = self.identity_exps[:k] + (1,) + self.identity_exps[k + 1 :]
            res = gk if w is None else self._mul(gk, w)
        else:
            res = self._conj_by_gen(self._conj_gen(k, i, e - 1), i, 1)
        self._conj_gen_cache[key] = res
        return res

    def _inv(self, x):
        # (prod_i g_i^{a_i})^-1 = prod_{i desc} g_i^{-a_i}, and
        # g_i^{-a} = g_i^{p-a} (g_i^p)^{-1}; the recursion moves strictly deeper.
        res = self.identity_exps
        for i in range(self.m - 1, -1, -1):
            a = x[i]
            if a:
                res = self._mul_syl(res, i, self.p - a)
                if any(self._pw[i]):
                    res = self._mul(res, self._inv(self._pw[i]))
        return res

    def _pow(self, x, k):
        if k < 0:
            x = self._inv(x)
            k = -k
        res = self.identity_exps
        base = x
        while k:
            if k & 1:
                res = self._mul(res, base)
            base = self._mul(base, base)
            k >>= 1
        return res

    def _comm(self, x, y):
        return self._mul(self._inv(self._mul(y, x)), self._mul(x, y))

    def _conj(self, x, y):
        return self._mul(self._inv(y), self._mul(x, y))

    def element_order(self, exps):
        n = 1
        while any(exps):
            exps = self._pow(exps, self.p)
            n *= self.p
        return n

    # -- consistency -------------------------------------------------------

    def check_consistency(self):
        """Exhaustive overlap checks: associativity triples g_k(g_j g_i) =
        (g_k g_j) g_i for k > j > i, plus the power overlaps.  A presentation
        passing all of them defines a group of order p^m."""
        gen = lambda i: self.identity_exps[:i] + (1,) + self.identity_exps[i + 1 :]
        p = self.p
        for i in range(self.m):
            gi = gen(i)
            lhs = self._mul(gi, self._pw[i])
            rhs = self._mul(self._pw[i], gi)
            if lhs != rhs:
                raise InconsistentPresentationError(
                    f"power overlap failed at g{i + 1}: g*g^p != g^p*g"
                )
        for j in range(self.m):
            gj = gen(j)
            for i in range(j):
                gi = gen(i)
                lhs = self._mul(self._mul(gj, gi), self._pow(gi, p - 1))
                rhs = self._mul(gj, self._pw[i])
                if lhs != rhs:
                    raise InconsistentPresentationError(
                        f"power overlap failed at (g{j + 1}) (g{i + 1}^p)"
                    )
                lhs = self._mul(self._pow(gj, p - 1), self._mul(gj, gi))
                rhs = self._mul(self._pw[j], gi)
                if lhs != rhs:
                    raise InconsistentPresentationError(
                        f"power overlap failed at (g{j + 1}^p) (g{i + 1})"
                    )
        for k in range(self.m):
            gk = gen(k)
            for j in range(k):
                gj = gen(j)
                kj = self._mul(gk, gj)
                for i in range(j):
                    gi = gen(i)
                    lhs = self._mul(gk, self._mul(gj, gi))
                    rhs = self._mul(kj, gi)
                    if lhs != rhs:
                        raise InconsistentPresentationError(
                            f"associativity overlap failed at g{k + 1} g{j + 1} g{i + 1}"
                        )

    # -- element tables ----------------------------------------------------

    def _require_tables(self):
        if self.size > orbit_bound():
            raise ResourceBoundError(
                f"|G| = {self.size} exceeds the element-table bound "
                f"{orbit_bound()} (set MIPINV_ORBIT_BOUND to override)"
            )

    def digit_table(self):
        tab = self._cache.get("digits")
        if tab is None:
            self._require_tables()
            idx = np.arange(self.size, dtype=np.int64)
            w = np.array(self._idx_weights, dtype=np.int64)
            tab = (idx[:, None] // w[None, :]) % self.p
            self._cache["digits"] = tab
        return tab

    def rmul_tables(self):
        """For each generator j: array R with R[x] = index of x * g_j."""
        tabs = self._cache.get("rmul")
        if tabs is None:
            self._require_tables()
            tabs = []
            for j in range(self.m):
                arr = np.empty(self.size, dtype=np.int64)
                for idx in range(self.size):
                    arr[idx] = self.index_of(self._mul_syl(self.exps_of(idx), j, 1))
                tabs.append(arr)
            self._cache["rmul"] = tabs
        return tabs

    def conj_tables(self):
        """For each generator j: array C with C[x] = index of x^{g_j}."""
        tabs = self._cache.get("conj")
        if tabs is None:
            self._require_tables()
            rmul = self.rmul_tables()
            tabs = []
            for j in range(self.m):
                gj_inv = self._inv(self.exps_of(self._idx_weights[j]))
                linv = np.empty(self.size, dtype=np.int64)
                for idx in range(self.size):
                    linv[idx] = self.index_of(self._mul(gj_inv, self.exps_of(idx)))
                tabs.append(linv[rmul[j]])
            self._cache["conj"] = tabs
        return tabs

    def pow_p_table(self):
        """Array P with P[x] = index of x^p."""
        tab = self._cache.get("powp")
        if tab is None:
            self._require_tables()
            tab = np.empty(self.size, dtype=np.int64)
            for idx in range(self.size):
                tab[idx] = self.index_of(self._pow(self.exps_of(idx), self.p))
            self._cache["powp"] = tab
        return tab

    def order_exponents(self):
        """Array with the exponent t of each element order p^t."""
        arr = self._cache.get("orders")
        if arr is None:
            powp = self.pow_p_table()
            arr = np.zeros(self.size, dtype=np.int64)
            cur = np.arange(self.size, dtype=np.int64)
            alive = cur != 0
            t = 0
            while alive.any():
                t += 1
                cur = powp[cur]
                newly = alive & (cur == 0)
                arr[newly] = t
                alive &= cur != 0
            self._cache["orders"] = arr
        return arr

    def element_order_histogram(self):
        """Sorted list of (order, count) pairs."""
        exps = self.order_exponents()
        vals, counts = np.unique(exps, return_counts=True)
        return [(self.p ** int(v), int(c)) for v, c in zip(vals, counts)]

    def right_mul_index(self, idx, exps):
        """Index of (element idx) * (element exps), chasing rmul tables."""
        rmul = self.rmul_tables()
        for j in range(self.m):
            for _ in range(exps[j]):
                idx = rmul[j][idx]
        return idx

    def conj_permutation(self, exps):
        """Permutation array x -> x^g over all element indices."""
        conj = self.conj_tables()
        perm = np.arange(self.size, dtype=np.int64)
        for j in range(self.m):
            for _ in range(exps[j]):
                perm = conj[j][perm]
        return perm

    # -- conjugacy classes ---------------------------------------------------

    def class_partition(self):
        """(labels, reps): labels[x] = class number; reps = min index per class."""
        cached = self._cache.get("classes")
        if cached is None:
            conj = self.conj_tables()
            labels = np.full(self.size, -1, dtype=np.int64)
            reps = []
            for start in range(self.size):
                if labels[start] >= 0:
                    continue
                cls = len(reps)
                reps.append(start)
                stack = [start]
                labels[start] = cls
                while stack:
                    x = stack.pop()
                    for j in range(self.m):
                        y = int(conj[j][x])
                        if labels[y] < 0:
                            labels[y] = cls
                            stack.append(y)
            cached = (labels, reps)
            self._cache["classes"] = cached
        return cached

    def conjugacy_classes(self):
        """List of (representative, class size), reps by increasing index."""
        labels, reps = self.class_partition()
        counts = np.bincount(labels, minlength=len(reps))
        return [
            (GroupElement(self, self.exps_of(r)), int(counts[i]))
            for i, r in enumerate(reps)
        ]

    def centralizer_indices(self, exps):
        perm = self.conj_permutation(exps)
        return np.nonzero(perm == np.arange(self.size, dtype=np.int64))[0]

    def centralizer(self, target):
        """Centralizer of an element or of a subgroup, by exhaustive test."""
        if isinstance(target, GroupElement):
            self._check_parent(target)
            idxs = self.centralizer_indices(target.exps)
        elif isinstance(target, Subgroup):
            self._check_parent(target)
            fixed = np.ones(self.size, dtype=bool)
            ar = np.arange(self.size, dtype=np.int64)
            for u in target.igs:
                fixed &= self.conj_permutation(u) == ar
            idxs = np.nonzero(fixed)[0]
        else:
            raise UsageError("centralizer expects a GroupElement or Subgroup")
        return self.subgroup_from_indices(idxs)

    def center(self):
        z = self._cache.get("center")
        if z is None:
            fixed = np.ones(self.size, dtype=bool)
            ar = np.arange(self.size, dtype=np.int64)
            for tab in self.conj_tables():
                fixed &= tab == ar
            z = self.subgroup_from_indices(np.nonzero(fixed)[0])
            z.normal = True
            self._cache["center"] = z
        return z

    # -- subgroups -----------------------------------------------------------

    def subgroup(self, gens, normal=False):
        """Smallest subgroup (normal closure if flagged) containing gens."""
        exps = []
        for g in gens:
            self._check_parent(g)
            exps.append(g.exps if isinstance(g, GroupElement) else tuple(g))
        return _close(self, exps, normal)

    def trivial_subgroup(self):
        return _close(self, [], False)

    def whole_subgroup(self):
        s = self._cache.get("whole")
        if s is None:
            s = _close(self, [self.gen(i).exps for i in range(self.m)], True)
            self._cache["whole"] = s
        return s

    def subgroup_from_indices(self, idxs):
        """Subgroup from the full set of its element indices (exact)."""
        idxs = np.asarray(idxs, dtype=np.int64)
        digits = self.digit_table()[idxs]
        nz = digits != 0
        nontriv = nz.any(axis=1)
        depths = np.argmax(nz[nontriv], axis=1)
        sub_idxs = idxs[nontriv]
        table = {}
        for d in np.unique(depths):
            first = sub_idxs[depths == d].min()
            x = self.exps_of(int(first))
            lead = x[int(d)]
            if lead != 1:
                x = self._pow(x, pow(lead, -1, self.p))
            table[int(d)] = x
        if len(idxs) != self.p ** len(table):
            raise UsageError("index set is not a subgroup")
        return _subgroup_from_table(self, table)

    def subgroup_from_elements(self, elems):
        return self.subgroup_from_indices(
            np.array(sorted({self.index_of(e.exps) for e in elems}), dtype=np.int64)
        )

    # -- series ----------------------------------------------------------------

    def lower_central_series(self):
        """gamma_1 = G, gamma_{i+1} = [G, gamma_i]; ends with the trivial group."""
        series = self._cache.get("lcs")
        if series is None:
            series = [self.whole_subgroup()]
            gens = [self.gen(i).exps for i in range(self.m)]
            while True:
                prev = series[-1]
                if prev.order == 1:
                    break
                comms = [
                    self._comm(g, u) for g in gens for u in prev.igs
                ]
                nxt = _close(self, comms, normal=True)
                if nxt.order == prev.order:
                    break
                series.append(nxt)
            if series[-1].order != 1:
                series.append(self.trivial_subgroup())
            self._cache["lcs"] = series
        return series

    def nilpotency_class(self):
        return len(self.lower_central_series()) - 1

    def derived_subgroup(self):
        lcs = self.lower_central_series()
        return lcs[1] if len(lcs) > 1 else self.trivial_subgroup()

    def upper_central_series(self):
        """Z_0 = 1 <= Z_1 = Z(G) <= ...; ascends until it reaches G."""
        series = self._cache.get("ucs")
        if series is None:
            series = [self.trivial_subgroup()]
            while series[-1].order != self.size:
                zi = series[-1]
                if zi.order == 1:
                    nxt = self.center()
                else:
                    q, proj, lift = self.quotient(zi)
                    zq = q.center()
                    gens = list(zi.igs) + [lift(u) for u in zq.igs]
                    nxt = _close(self, gens, normal=True)
                if nxt.order == zi.order:
                    raise MipError("upper central series stalled; group not nilpotent?")
                series.append(nxt)
            self._cache["ucs"] = series
        return series

    def agemo(self):
        """G^p = <x^p | x in G>.

        Groups of class < p are regular, where Hall-Petrescu collapses
        (xy)^p into x^p y^p modulo p-th powers of commutators, so generator
        powers together with gamma_2^p generate; otherwise brute force.
        """
        s = self._cache.get("agemo")
        if s is None:
            if self.nilpotency_class() < self.p:
                gens = [self._pw[i] for i in range(self.m)]
                lcs = self.lower_central_series()
                for sub in lcs[1:]:
                    gens += [self._pow(u, self.p) for u in sub.igs]
                s = _close(self, gens, normal=True)
            else:
                powp = self.pow_p_table()
                gens = [self.exps_of(int(i)) for i in np.unique(powp) if i]
                s = _close(self, gens, normal=True)
            self._cache["agemo"] = s
        return s

    def omega(self):
        """mu_p(G) = <x | x^p = 1>."""
        s = self._cache.get("omega")
        if s is None:
            powp = self.pow_p_table()
            gens = [self.exps_of(int(i)) for i in np.nonzero(powp == 0)[0] if i]
            s = _close(self, gens, normal=True)
            self._cache["omega"] = s
        return s

    def frattini(self):
        """Phi(G) = gamma_2(G) G^p, computed without enumerating G."""
        s = self._cache.get("frattini")
        if s is None:
            gens = list(self.derived_subgroup().igs)
            gens += [self._pw[i] for i in range(self.m)]
            s = _close(self, gens, normal=True)
            self._cache["frattini"] = s
        return s

    def gamma_cap(self):
        """Gamma(G) = Z(G) n gamma_2(G)."""
        return self.center().intersection(self.derived_subgroup())

    def rank(self):
        """Minimal number of generators = dim G/Phi(G)."""
        return self.m - len(self.frattini().depth_set)

    def minimal_generators(self):
        """Pc generators whose images form a basis of G/Phi(G)."""
        phi = self.frattini()
        chosen = []
        span = phi
        for i in range(self.m):
            if span.order == self.size:
                break
            g = self.gen(i)
            if not span.contains(g):
                chosen.append(g)
                span = _close(
                    self, list(span.igs) + [g.exps], normal=False
                )
        return chosen

    # -- quotients ---------------------------------------------------------------

    def quotient(self, n: "Subgroup"):
        """(Q, proj, lift) for a verified-normal subgroup n.

        proj maps GroupElement -> GroupElement of Q; lift is a set-theoretic
        section (exps of Q -> exps of G) with proj(lift(v)) = v.
        """
        self._check_parent(n)
        if not n.verify_normal():
            raise PreconditionError("quotient by a non-normal subgroup")
        key = ("quotient", n.igs)
        cached = self._cache.get(key)
        if cached is None:
            keep = [d for d in range(self.m) if d not in n.depth_set]
            mq = len(keep)
            pos = {d: k for k, d in enumerate(keep)}

            def project_exps(x):
                r = n.coset_rep(x)
                return tuple(r[d] for d in keep)

            pw = []
            for k, d in enumerate(keep):
                w = project_exps(self._pw[d])
                pw.append(w)
            cwq = {}
            for a in range(mq):
                for b in range(a + 1, mq):
                    w = project_exps(self._comm(
                        self._gen_exps(keep[b]), self._gen_exps(keep[a])
                    ))
                    if any(w):
                        cwq[(b, a)] = w
            q = PcGroup(self.p, pw, cwq, name=(f"{self.name}/N" if self.name else None))

            def proj(g):
                if isinstance(g, GroupElement):
                    return GroupElement(q, project_exps(g.exps))
                return project_exps(tuple(g))

            def lift(v):
                if isinstance(v, GroupElement):
                    v = v.exps
                x = [0] * self.m
                for k, d in enumerate(keep):
                    x[d] = v[k]
                return tuple(x)

            for a in range(mq):
                for b in range(mq):
                    ga, gb = self._gen_exps(keep[a]), self._gen_exps(keep[b])
                    lhs = project_exps(self._mul(ga, gb))
                    rhs = q._mul(project_exps(ga), project_exps(gb))
                    if lhs != rhs:
                        raise MipError("quotient projection failed homomorphism spot-check")
            cached = (q, proj, lift)
            self._cache[key] = cached
        return cached

    def _gen_exps(self, i):
        return self.identity_exps[:i] + (1,) + self.identity_exps[i + 1 :]

    # -- rebasing -------------------------------------------------------------

    def rebase(self, sequence):
        """Presentation of the same group on a new pc sequence.

        sequence: m GroupElements whose tails <v_i, ..., v_m> drop by index p
        at every step.  Returns (H, to_new, to_old).
        """
        if len(sequence) != self.m:
            raise UsageError("rebase needs exactly m elements")
        seq = [v.exps if isinstance(v, GroupElement) else tuple(v) for v in sequence]
        chains = []
        cur = _close(self, [], False)
        for i in range(self.m - 1, -1, -1):
            cur = _close(self, list(cur.igs) + [seq[i]], False)
            chains.append(cur)
            if cur.order != self.p ** (self.m - i):
                raise UsageError("sequence is not a polycyclic generating sequence")
        chains.reverse()  # chains[i] = <v_i, ..., v_m>

        def coords(x):
            out = []
            for i in range(self.m):
                nxt = chains[i + 1] if i + 1 < self.m else None
                found = None
                for c in range(self.p):
                    y = self._mul(self._pow(seq[i], -c), x)
                    if (nxt is None and not any(y)) or (nxt is not None and nxt._contains_exps(y)):
                        found = c
                        x = y
                        break
                if found is None:
                    raise MipError("coordinate extraction failed")
                out.append(found)
            return tuple(out)

        pw = [coords(self._pow(seq[i], self.p)) for i in range(self.m)]
        cw = {}
        for j in range(self.m):
            for i in range(j):
                w = coords(self._comm(seq[j], seq[i]))
                if any(w):
                    cw[(j, i)] = w
        h = PcGroup(self.p, pw, cw, name=self.name)

        def to_new(g):
            return GroupElement(h, coords(g.exps if isinstance(g, GroupElement) else g))

        def to_old(v):
            exps = v.exps if isinstance(v, GroupElement) else v
            x = self.identity_exps
            for i, c in enumerate(exps):
                if c:
                    x = self._mul(x, self._pow(seq[i], c))
            return GroupElement(self, x)

        return h, to_new, to_old

    def relabeled_copy(self, rng):
        """Random re-presentation on a perturbed pc sequence (same group)."""
        seq = []
        for i in range(self.m):
            x = self._gen_exps(i)
            a = rng.randrange(1, self.p)
            x = self._pow(x, a)
            for k in range(i + 1, self.m):
                c = rng.randrange(self.p)
                if c:
                    x = self._mul(x, self._pow(self._gen_exps(k), c))
            seq.append(GroupElement(self, x))
        h, _, _ = self.rebase(seq)
        return h

    def __repr__(self):
        label = self.name or "PcGroup"
        return f"<{label}: order {self.p}^{self.m}>"


# ---------------------------------------------------------------------------
# subgroups


class Subgroup:
    """Echelonized induced generating sequence, one entry per occupied depth.

    Entries have leading coefficient 1 and zero coordinates at every other
    occupied depth, which makes the igs canonical: equal subgroups always
    carry identical igs tuples.
    """

    __slots__ = ("parent", "igs", "depth_set", "normal", "_table")

    def __init__(self, parent, table, normal=False):
        self.parent = parent
        self._table = dict(table)
        self.depth_set = frozenset(table)
        self.igs = tuple(table[d] for d in sorted(table))
        self.normal = normal

    @property
    def order(self):
        return self.parent.p ** len(self.igs)

    def gens(self):
        return [GroupElement(self.parent, u) for u in self.igs]

    def _sift(self, x):
        g = self.parent
        while any(x):
            d = _depth(x)
            u = self._table.get(d)
            if u is None:
                return x
            x = g._mul(g._pow(u, g.p - x[d]), x)
        return x

    def _contains_exps(self, x):
        return not any(self._sift(x))

    def contains(self, g):
        if isinstance(g, GroupElement):
            self.parent._check_parent(g)
            return self._contains_exps(g.exps)
        return self._contains_exps(tuple(g))

    def contains_subgroup(self, other):
        return all(self._contains_exps(u) for u in other.igs)

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.igs == other.igs
        )

    def __hash__(self):
        return hash((id(self.parent), self.igs))

    def coords(self, x):
        """x = prod u_d^{c_d} over the igs in depth order; error if outside."""
        if isinstance(x, GroupElement):
            x = x.exps
        g = self.parent
        out = {}
        while any(x):
            d = _depth(x)
            u = self._table.get(d)
            if u is None:
                raise UsageError("element not in subgroup")
            out[d] = x[d]
            x = g._mul(g._pow(u, g.p - x[d]), x)
        return tuple(out.get(d, 0) for d in sorted(self._table))

    def coset_rep(self, x):
        """Canonical coset representative: zero coordinates at all igs depths."""
        if isinstance(x, GroupElement):
            x = x.exps
        g = self.parent
        for d in sorted(self._table):
            c = x[d]
            if c:
                x = g._mul(g._pow(self._table[d], g.p - c), x)
        return x

    def elements(self):
        """All elements, as exps tuples, in deterministic order."""
        g = self.parent
        elems = [g.identity_exps]
        for u in self.igs:
            powers = [g.identity_exps]
            for _ in range(g.p - 1):
                powers.append(g._mul(powers[-1], u))
            elems = [g._mul(e, pw) for e in elems for pw in powers]
        return elems

    def element_indices(self):
        g = self.parent
        return np.array(sorted(g.index_of(e) for e in self.elements()), dtype=np.int64)

    def verify_normal(self):
        if self.normal:
            return True
        g = self.parent
        for u in self.igs:
            for i in range(g.m):
                if not self._contains_exps(g._conj(u, g._gen_exps(i))):
                    return False
        self.normal = True
        return True

    def intersection(self, other):
        """Exact intersection; enumerates the smaller side."""
        g = self.parent
        g._check_parent(other)
        small, big = (self, other) if self.order <= other.order else (other, self)
        if small.order > orbit_bound():
            raise ResourceBoundError(
                f"intersection would enumerate {small.order} elements"
            )
        gens = [e for e in small.elements() if any(e) and big._contains_exps(e)]
        return _close(g, gens, normal=False)

    def product(self, other):
        """Subgroup generated by both (equals the set product when one side
        normalizes the product)."""
        g = self.parent
        g._check_parent(other)
        return _close(g, list(self.igs) + list(other.igs), normal=False)

    def power_subgroup(self, k):
        """<x^k | x in S>; for p-power exponents on regular subgroups this
        iterates the induced group's agemo, otherwise it enumerates."""
        g = self.parent
        if k == 1:
            return _subgroup_from_table(g, dict(self._table))
        j = 0
        kk = k
        while kk and kk % g.p == 0:
            kk //= g.p
            j += 1
        if kk == 1 and j >= 1:
            # iterated agemo equals the p^j-power subgroup on regular groups
            sub = self
            regular = True
            for _ in range(j):
                hh, emb, _ = sub.as_group()
                if hh.nilpotency_class() >= g.p:
                    regular = False
                    break
                inner = hh.agemo()
                sub = _close(g, [emb(u).exps for u in inner.igs], normal=False)
            if regular:
                return sub
        if self.order > orbit_bound():
            raise ResourceBoundError(
                f"power subgroup would enumerate {self.order} elements"
            )
        gens = {g._pow(e, k) for e in self.elements()}
        gens.discard(g.identity_exps)
        return _close(g, sorted(gens), normal=False)

    def agemo(self):
        return self.power_subgroup(self.parent.p)

    def normal_closure_in(self, context):
        """Normal closure under conjugation by the igs of context."""
        g = self.parent
        table = {}
        pending = list(self.igs)
        while pending:
            x = pending.pop()
            x = _sift_table(g, table, x)
            if not any(x):
                continue
            d = _depth(x)
            lead = x[d]
            if lead != 1:
                x = g._pow(x, pow(lead, -1, g.p))
            table[d] = x
            pending.append(g._pow(x, g.p))
            for d2, u in list(table.items()):
                if d2 != d:
                    pending.append(g._comm(x, u))
            for u in context.igs:
                pending.append(g._comm(x, u))
        return _subgroup_from_table(g, table)

    def as_group(self):
        """Induced consistent pc presentation on the igs.

        Returns (H, embed, restrict): embed maps H elements into the parent,
        restrict maps subgroup elements of the parent to H.
        """
        g = self.parent
        cached = g._cache.get(("as_group", self.igs))
        if cached is not None:
            return cached
        r = len(self.igs)
        pw = [self.coords(g._pow(u, g.p)) for u in self.igs]
        cw = {}
        for j in range(r):
            for i in range(j):
                w = self.coords(g._comm(self.igs[j], self.igs[i]))
                if any(w):
                    cw[(j, i)] = w
        h = PcGroup(g.p, pw, cw)

        def embed(x):
            exps = x.exps if isinstance(x, GroupElement) else x
            y = g.identity_exps
            for i, c in enumerate(exps):
                if c:
                    y = g._mul(y, g._pow(self.igs[i], c))
            return GroupElement(g, y)

        def restrict(x):
            exps = x.exps if isinstance(x, GroupElement) else x
            return GroupElement(h, self.coords(exps))

        g._cache[("as_group", self.igs)] = (h, embed, restrict)
        return h, embed, restrict

    def abelian_invariants(self):
        """Exponent partition [e_1 >= e_2 >= ...] with S = (+) C_{p^{e_i}}."""
        h, _, _ = self.as_group()
        if not is_abelian(h):
            raise PreconditionError("abelian_invariants of a non-abelian subgroup")
        return abelian_invariants_of_group(h)

    def __repr__(self):
        return f"<Subgroup of order {self.parent.p}^{len(self.igs)}>"


def _sift_table(g, table, x):
    while any(x):
        d = _depth(x)
        u = table.get(d)
        if u is None:
            return x
        x = g._mul(g._pow(u, g.p - x[d]), x)
    return x


def _subgroup_from_table(g, table):
    # canonical form: reduce each entry against all deeper entries
    depths = sorted(table)
    for i in range(len(depths) - 1, -1, -1):
        u = table[depths[i]]
        for d2 in depths[i + 1 :]:
            c = u[d2]
            if c:
                u = g._mul(u, g._pow(table[d2], g.p - c))
        table[depths[i]] = u
    return Subgroup(g, table)


def _close(g, gens, normal):
    table = {}
    pending = [tuple(x) for x in gens]
    gen_exps = [g._gen_exps(i) for i in range(g.m)] if normal else None
    while pending:
        x = pending.pop()
        x = _sift_table(g, table, x)
        if not any(x):
            continue
        d = _depth(x)
        lead = x[d]
        if lead != 1:
            x = g._pow(x, pow(lead, -1, g.p))
        table[d] = x
        pending.append(g._pow(x, g.p))
        for d2, u in list(table.items()):
            if d2 != d:
                pending.append(g._comm(x, u))
        if normal:
            for ge in gen_exps:
                pending.append(g._comm(x, ge))
    s = _subgroup_from_table(g, table)
    s.normal = normal
    return s


# ---------------------------------------------------------------------------
# helpers on whole groups


def is_abelian(g: PcGroup) -> bool:
    return not g._cw


def abelian_invariants_of_group(g: PcGroup):
    """Exponent partition of an abelian PcGroup from the sizes of G^{p^k}."""
    if not is_abelian(g):
        raise PreconditionError("abelian_invariants of a non-abelian group")
    logs = [g.m]
    cur = g.whole_subgroup()
    while cur.order > 1:
        cur = cur.power_subgroup(g.p)
        logs.append(len(cur.igs))
    # logs[k] = log_p |G^{p^k}|, so counts[k] = logs[k] - logs[k+1] counts the
    # cyclic factors with exponent > k; successive differences give the parts.
    parts = []
    counts = [logs[k] - logs[k + 1] for k in range(len(logs) - 1)]
    for k in range(len(counts) - 1, -1, -1):
        n_here = counts[k] - (counts[k + 1] if k + 1 < len(counts) else 0)
        parts.extend([k + 1] * n_here)
    parts.sort(reverse=True)
    return parts


def abelian_invariants(x):
    if isinstance(x, PcGroup):
        return abelian_invariants_of_group(x)
    if isinstance(x, Subgroup):
        return x.abelian_invariants()
    raise UsageError("abelian_invariants expects a PcGroup or Subgroup")


def direct_product(a: PcGroup, b: PcGroup) -> PcGroup:
    if a.p != b.p:
        raise UsageError("direct product of groups over different primes")
    m = a.m + b.m
    pad_a = lambda w: tuple(w) + (0,) * b.m
    pad_b = lambda w: (0,) * a.m + tuple(w)
    pw = [pad_a(a._pw[i]) for i in range(a.m)] + [pad_b(b._pw[i]) for i in range(b.m)]
    cw = {}
    for (j, i), w in a._cw.items():
        cw[(j, i)] = pad_a(w)
    for (j, i), w in b._cw.items():
        cw[(j + a.m, i + a.m)] = pad_b(w)
    return PcGroup(a.p, pw, cw)
