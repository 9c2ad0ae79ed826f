"""Bounded searches over weighted pc presentations.

Candidates are built from small structured coefficient families and filtered
by the consistency check; the target predicate (obelisk, framed, class-3
shape) is the only ground truth.  Used to populate the catalog with verified
examples that the tests exercise; nothing here trusts a hand-claimed example.
"""

from __future__ import annotations

import itertools

from .obelisk import is_framed, is_obelisk
from .pcgroup import InconsistentPresentationError, PcGroup


def _word(m, **coeffs):
    v = [0] * m
    for k, e in coeffs.items():
        v[int(k)] = e
    return tuple(v)


def _try(p, pw, cw, name):
    try:
        return PcGroup(p, pw, cw, name=name)
    except InconsistentPresentationError:
        return None


def iter_class3_order_p5_obelisks(p):
    """Class-3 candidates of order p^5: gamma_2 = <g3, g4, g5>,
    [g2,g1] = g3, gamma_3 = <g4, g5> hit by both [g3, g_i] and the p-th
    powers of g1, g2."""
    m = 5
    comm_mats = [
        ((1, 0), (0, 1)),
        ((0, 1), (1, 0)),
        ((1, 1), (0, 1)),
    ]
    pow_mats = [
        ((1, 0), (0, 1)),
        ((0, 1), (1, 0)),
        ((0, 1), (p - 1, 0)),
        ((1, 1), (1, p - 1)),
    ]
    for cm in comm_mats:
        for pm in pow_mats:
            cw = {
                (1, 0): _word(m, **{"2": 1}),
                (2, 0): _word(m, **{"3": cm[0][0], "4": cm[0][1]}),
                (2, 1): _word(m, **{"3": cm[1][0], "4": cm[1][1]}),
            }
            cw = {k: w for k, w in cw.items() if any(w)}
            pw = [
                _word(m, **{"3": pm[0][0], "4": pm[0][1]}),
                _word(m, **{"3": pm[1][0], "4": pm[1][1]}),
                None,
                None,
                None,
            ]
            g = _try(p, pw, cw, f"candidate_{p}^5")
            if g is not None and is_obelisk(g):
                yield g, {"comm": cm, "pow": pm}


def iter_class4_order_p6_obelisks(p):
    """Class-4 candidates of order p^6: gamma_2 = <g3,...,g6>,
    gamma_3 = <g4, g5, g6>, gamma_4 = <g6>, gamma_2^p = gamma_4 via
    g3^p = g6.  The Hall-Witt identity forces [g4, g2] = [g5, g1]."""
    m = 6
    pow_mats = [
        ((1, 0), (0, 1)),
        ((0, 1), (1, 0)),
        ((0, 1), (p - 1, 0)),
        ((0, 1), (2, 0)),
        ((1, 0), (0, 2)),
        ((1, 1), (p - 1, 1)),
        ((0, 1), (3, 0)),
    ]
    for a41, a42, a52 in itertools.product(range(p), repeat=3):
        deep = {"41": a41, "42": a42, "51": a42, "52": a52}
        for pm in pow_mats:
            cw = {
                (1, 0): _word(m, **{"2": 1}),
                (2, 0): _word(m, **{"3": 1}),
                (2, 1): _word(m, **{"4": 1}),
                (3, 0): _word(m, **{"5": deep["41"]}),
                (3, 1): _word(m, **{"5": deep["42"]}),
                (4, 0): _word(m, **{"5": deep["51"]}),
                (4, 1): _word(m, **{"5": deep["52"]}),
            }
            cw = {k: w for k, w in cw.items() if any(w)}
            pw = [
                _word(m, **{"3": pm[0][0], "4": pm[0][1]}),
                _word(m, **{"3": pm[1][0], "4": pm[1][1]}),
                _word(m, **{"5": 1}),
                None,
                None,
                None,
            ]
            g = _try(p, pw, cw, f"candidate_{p}^6")
            if g is not None and is_obelisk(g):
                yield g, {"deep": deep, "pow": pm, "g3pow": 1}


def find_obelisk(p, order_exp=5, framed=None, name=None):
    """First search-verified obelisk of order p^order_exp, optionally with
    the requested framed status."""
    it = (
        iter_class3_order_p5_obelisks(p)
        if order_exp == 5
        else iter_class4_order_p6_obelisks(p)
    )
    for g, prov in it:
        if framed is not None:
            fr = is_framed(g)
            if fr["framed"] != framed:
                continue
        if name:
            g.name = name
        return g, prov
    return None, None


def find_2gen_class3(p, order_exp=4, name=None):
    """2-generated class-3 group with gamma_3 central of exponent p."""
    if order_exp == 4:
        for a, b in itertools.product(range(p), range(p)):
            if (a, b) == (0, 0):
                continue
            for p1, p2 in itertools.product(range(p), repeat=2):
                cw = {
                    (1, 0): _word(4, **{"2": 1}),
                    (2, 0): _word(4, **{"3": a}),
                    (2, 1): _word(4, **{"3": b}),
                }
                cw = {k: w for k, w in cw.items() if any(w)}
                pw = [
                    _word(4, **{"3": p1}),
                    _word(4, **{"3": p2}),
                    None,
                    None,
                ]
                g = _try(p, pw, cw, name)
                if g is None:
                    continue
                if g.nilpotency_class() != 3 or g.rank() != 2:
                    continue
                gamma3 = g.lower_central_series()[2]
                if gamma3.order == 1:
                    continue
                if not g.center().contains_subgroup(gamma3):
                    continue
                if gamma3.agemo().order != 1:
                    continue
                return g, {"comm": (a, b), "pow": (p1, p2)}
    if order_exp == 5:
        # gamma_2 = <g3, g4, g5>, [g3,g1] = g4, [g3,g2] = g5: gamma_3 rank 2
        for c3p, p1, p2 in itertools.product(range(2), repeat=3):
            cw = {
                (1, 0): _word(5, **{"2": 1}),
                (2, 0): _word(5, **{"3": 1}),
                (2, 1): _word(5, **{"4": 1}),
            }
            pw = [
                _word(5, **{"3": p1}),
                _word(5, **{"4": p2}),
                _word(5, **{"4": c3p}),
                None,
                None,
            ]
            g = _try(p, pw, cw, name)
            if g is None:
                continue
            if g.nilpotency_class() != 3 or g.rank() != 2:
                continue
            gamma3 = g.lower_central_series()[2]
            if not g.center().contains_subgroup(gamma3):
                continue
            if gamma3.agemo().order != 1:
                continue
            return g, {"g3pow": c3p, "pow": (p1, p2)}
    return None, None
