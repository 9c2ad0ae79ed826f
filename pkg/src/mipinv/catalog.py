"""Built-in catalog of presentations, loaded from packaged .pc files.

Every entry carries expected metadata (order, class, |gamma_2|) that
self_check() re-derives from the parsed group.  Entries whose names start
with `ob` or `cls3_` were produced by the bounded presentation search in
presearch.py and are re-verified by their defining predicates in the tests.
"""

from __future__ import annotations

from importlib import resources

from .pcgroup import PcGroup, UsageError
from .presentation import parse_presentation

METADATA = {
    "5_6_553": {"order": 15625, "class": 3, "gamma2_order": 25},
    "5_6_553_orig": {"order": 15625, "class": 3, "gamma2_order": 25},
    "5_6_554": {"order": 15625, "class": 3, "gamma2_order": 25},
    "5_6_554_orig": {"order": 15625, "class": 3, "gamma2_order": 25},
    "c16": {"order": 16, "class": 1, "gamma2_order": 1},
    "c2": {"order": 2, "class": 1, "gamma2_order": 1},
    "c25": {"order": 25, "class": 1, "gamma2_order": 1},
    "c27": {"order": 27, "class": 1, "gamma2_order": 1},
    "c2xc2": {"order": 4, "class": 1, "gamma2_order": 1},
    "c2xc2xc2": {"order": 8, "class": 1, "gamma2_order": 1},
    "c3": {"order": 3, "class": 1, "gamma2_order": 1},
    "c3xc3": {"order": 9, "class": 1, "gamma2_order": 1},
    "c3xc3xc3": {"order": 27, "class": 1, "gamma2_order": 1},
    "c4": {"order": 4, "class": 1, "gamma2_order": 1},
    "c49": {"order": 49, "class": 1, "gamma2_order": 1},
    "c4xc2": {"order": 8, "class": 1, "gamma2_order": 1},
    "c4xc4": {"order": 16, "class": 1, "gamma2_order": 1},
    "c5": {"order": 5, "class": 1, "gamma2_order": 1},
    "c5xc5": {"order": 25, "class": 1, "gamma2_order": 1},
    "c7": {"order": 7, "class": 1, "gamma2_order": 1},
    "c7xc7": {"order": 49, "class": 1, "gamma2_order": 1},
    "c8": {"order": 8, "class": 1, "gamma2_order": 1},
    "c81": {"order": 81, "class": 1, "gamma2_order": 1},
    "c8xc2": {"order": 16, "class": 1, "gamma2_order": 1},
    "c9": {"order": 9, "class": 1, "gamma2_order": 1},
    "c9xc3": {"order": 27, "class": 1, "gamma2_order": 1},
    "c9xc9": {"order": 81, "class": 1, "gamma2_order": 1},
    "cls3_3_4": {"order": 81, "class": 3, "gamma2_order": 9},
    "cls3_3_5": {"order": 243, "class": 3, "gamma2_order": 27},
    "cls3_5_4": {"order": 625, "class": 3, "gamma2_order": 25},
    "d16": {"order": 16, "class": 3, "gamma2_order": 4},
    "d8": {"order": 8, "class": 2, "gamma2_order": 2},
    "d8xc2": {"order": 16, "class": 2, "gamma2_order": 2},
    "heis3": {"order": 27, "class": 2, "gamma2_order": 3},
    "heis3xc3": {"order": 81, "class": 2, "gamma2_order": 3},
    "heis3xc3xc3": {"order": 243, "class": 2, "gamma2_order": 3},
    "heis5": {"order": 125, "class": 2, "gamma2_order": 5},
    "heis7": {"order": 343, "class": 2, "gamma2_order": 7},
    "ob5_5": {"order": 3125, "class": 3, "gamma2_order": 125},
    "ob5_6_framed": {"order": 15625, "class": 4, "gamma2_order": 625},
    "ob5_6_nonframed": {"order": 15625, "class": 4, "gamma2_order": 625},
    "ob7_5": {"order": 16807, "class": 3, "gamma2_order": 343},
    "q16": {"order": 16, "class": 3, "gamma2_order": 4},
    "q8": {"order": 8, "class": 2, "gamma2_order": 2},
    "q8xc2": {"order": 16, "class": 2, "gamma2_order": 2},
    "sd16": {"order": 16, "class": 3, "gamma2_order": 4},
    "xs3": {"order": 27, "class": 2, "gamma2_order": 3},
    "xs5": {"order": 125, "class": 2, "gamma2_order": 5},
    "xs7": {"order": 343, "class": 2, "gamma2_order": 7},
}

_cache: dict = {}


def names():
    return sorted(METADATA)


def presentation_text(name: str) -> str:
    if name not in METADATA:
        raise UsageError(f"unknown catalog group {name!r}")
    return (
        resources.files("mipinv").joinpath("data", name + ".pc").read_text()
    )


def witness_text(name: str = "553_554") -> str:
    return (
        resources.files("mipinv").joinpath("data", name + ".wit").read_text()
    )


def load(name: str) -> PcGroup:
    if name not in _cache:
        _cache[name] = parse_presentation(presentation_text(name))
    return _cache[name]


def small_groups(max_order_3: int = 243, max_order_2: int = 64):
    """Catalog groups in the desk-scale corpus: |G| <= 3^5, and for p = 2
    also |G| <= 2^6."""
    out = []
    for name in names():
        g = load(name)
        if g.p == 2 and g.size <= max_order_2:
            out.append(g)
        elif g.p != 2 and g.size <= max_order_3:
            out.append(g)
    return out


def self_check():
    """Every entry parses consistently and matches its metadata."""
    results = {}
    for name in names():
        g = load(name)
        meta = METADATA[name]
        ok = (
            g.size == meta["order"]
            and g.nilpotency_class() == meta["class"]
            and g.derived_subgroup().order == meta["gamma2_order"]
        )
        results[name] = ok
        if not ok:
            raise UsageError(f"catalog metadata mismatch for {name}")
    return results
