"""Best-effort isomorphism testing by backtracking over generator images.

Candidates for each minimal generator are filtered by element profiles
(order, dimension-subgroup depth, conjugacy class size); partial maps are
pruned by profile equality of products and commutators and by the order of
the generated subgroup.  A returned map is verified on all defining
relations, so a positive answer is always sound; `non-isomorphic` is only
reported after exhausting the full (pruned) search space; running out of
node budget yields `unknown`.
"""

from __future__ import annotations

from .fpalgebra import dimension_series, jennings_data
from .pcgroup import PcGroup, UsageError


def _element_profiles(group: PcGroup):
    """index -> (order exponent, weight, class size) for every element."""
    orders = group.order_exponents()
    labels, reps = group.class_partition()
    import numpy as np

    sizes = np.bincount(labels, minlength=len(reps))
    series = dimension_series(group)
    weights = np.zeros(group.size, dtype=np.int64)
    for s in series[1:]:
        idxs = s.element_indices()
        weights[idxs] += 1
    return [
        (int(orders[i]), int(weights[i]), int(sizes[labels[i]]))
        for i in range(group.size)
    ]


def _global_invariants(group: PcGroup):
    from .pcgroup import abelian_invariants_of_group

    lcs = group.lower_central_series()
    q, _, _ = group.quotient(lcs[1]) if len(lcs) > 1 else (group, None, None)
    from collections import Counter

    class_hist = Counter(s for _, s in group.conjugacy_classes())
    return {
        "order": group.size,
        "order_histogram": tuple(group.element_order_histogram()),
        "lcs_ranks": tuple(
            len(lcs[i].igs) - len(lcs[i + 1].igs) for i in range(len(lcs) - 1)
        ),
        "jennings_dims": tuple(jennings_data(group).dims),
        "abelianization": tuple(abelian_invariants_of_group(q)),
        "class_size_histogram": tuple(sorted(class_hist.items())),
    }


def _expression_words(group: PcGroup, gens):
    """Express every element as a word over gens, by BFS; word = list of
    generator positions."""
    words = {group.identity_exps: []}
    frontier = [group.identity_exps]
    gen_exps = [g.exps for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for k, ge in enumerate(gen_exps):
                y = group._mul(x, ge)
                if y not in words:
                    words[y] = words[x] + [k]
                    nxt.append(y)
        frontier = nxt
    if len(words) != group.size:
        raise UsageError("generators do not generate the group")
    return words


def iso_search(g: PcGroup, h: PcGroup, budget: int = 200000):
    """Search for an isomorphism G -> H.

    Returns {"verdict": "isomorphic" | "non-isomorphic" | "unknown",
    "images": exps list or None, "nodes": int}.  A verdict of
    'non-isomorphic' certifies exhaustion of the candidate space; any map
    returned has been verified on all defining relations of G.
    """
    if g.size != h.size or g.p != h.p:
        raise UsageError("iso_search needs groups of equal order")
    if _global_invariants(g) != _global_invariants(h):
        return {"verdict": "non-isomorphic", "images": None, "nodes": 0}

    gens = g.minimal_generators()
    r = len(gens)
    prof_g = _element_profiles(g)
    prof_h = _element_profiles(h)
    gen_profiles = [prof_g[x.index] for x in gens]
    pools = []
    for gp in gen_profiles:
        pool = [i for i in range(h.size) if prof_h[i] == gp]
        if not pool:
            return {"verdict": "non-isomorphic", "images": None, "nodes": 0}
        pools.append(pool)

    words = _expression_words(g, gens)
    pc_words = [words[g._gen_exps(i)] for i in range(g.m)]

    # profile tables for pair pruning on G's side
    pair_data = {}
    for a in range(r):
        for b in range(a):
            pair_data[(a, b)] = (
                prof_g[g.index_of(g._comm(gens[a].exps, gens[b].exps))],
                prof_g[g.index_of(g._mul(gens[a].exps, gens[b].exps))],
            )

    nodes = 0
    exhausted = True
    images = [None] * r
    image_exps = [None] * r

    def verify(full_images):
        # induced images of all pc generators, then check every relation
        img_pc = []
        for w in pc_words:
            x = h.identity_exps
            for k in w:
                x = h._mul(x, full_images[k])
            img_pc.append(x)

        def apply_word(exps):
            x = h.identity_exps
            for i, e in enumerate(exps):
                if e:
                    x = h._mul(x, h._pow(img_pc[i], e))
            return x

        for i in range(g.m):
            if h._pow(img_pc[i], g.p) != apply_word(g._pw[i]):
                return None
        for (j, i), w in g._cw.items():
            if h._comm(img_pc[j], img_pc[i]) != apply_word(w):
                return None
        if h.subgroup([h.element(e) for e in full_images]).order != h.size:
            return None
        return img_pc

    def dfs(pos, span):
        nonlocal nodes, exhausted
        if pos == r:
            return verify(image_exps)
        for cand in pools[pos]:
            nodes += 1
            if nodes > budget:
                exhausted = False
                return None
            ce = h.exps_of(cand)
            ok = True
            for b in range(pos):
                cp, pp = pair_data[(pos, b)]
                if prof_h[h.index_of(h._comm(ce, image_exps[b]))] != cp:
                    ok = False
                    break
                if prof_h[h.index_of(h._mul(ce, image_exps[b]))] != pp:
                    ok = False
                    break
            if not ok:
                continue
            new_span = h.subgroup(
                [h.element(e) for e in image_exps[:pos]] + [h.element(ce)]
            )
            want = g.subgroup([x for x in gens[: pos + 1]]).order
            if new_span.order != want:
                continue
            image_exps[pos] = ce
            found = dfs(pos + 1, new_span)
            if found is not None:
                return found
            image_exps[pos] = None
            if not exhausted:
                return None
        return None

    result = dfs(0, None)
    if result is not None:
        return {"verdict": "isomorphic", "images": result, "nodes": nodes}
    if exhausted:
        return {"verdict": "non-isomorphic", "images": None, "nodes": nodes}
    return {"verdict": "unknown", "images": None, "nodes": nodes}
