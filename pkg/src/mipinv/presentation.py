"""Line-oriented text format for power-commutator presentations.

    # comment
    name <identifier>          (optional)
    source <free text>         (optional)
    p <prime>
    gens <m>
    pow g<i> = <word>          (omitted: g_i^p = 1)
    comm g<j> g<i> = <word>    (j > i; omitted: [g_j, g_i] = 1)

A <word> is `1` or a product of `g<k>^<e>` tokens (whitespace separated,
exponent optional, negatives allowed) with k > max(i, j); anything else is
rejected as a non-weighted presentation.  Parsing produces a consistency-
checked PcGroup; serialization emits the canonical form, so
parse(serialize(g)) round-trips.
"""

from __future__ import annotations

import re

from .pcgroup import InconsistentPresentationError, MipError, PcGroup


class ParseError(MipError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_GEN = re.compile(r"^g(\d+)$")
_TOK = re.compile(r"^g(\d+)(?:\^(-?\d+))?$")


def _parse_word(tokens, m, p, floor, lineno):
    """floor = largest generator index (1-based) the word must exceed."""
    exps = [0] * m
    if tokens == ["1"]:
        return tuple(exps)
    for tok in tokens:
        mt = _TOK.match(tok)
        if not mt:
            raise ParseError(lineno, f"bad word token {tok!r}")
        k = int(mt.group(1))
        e = int(mt.group(2)) if mt.group(2) is not None else 1
        if not 1 <= k <= m:
            raise ParseError(lineno, f"generator g{k} out of range")
        if k <= floor:
            raise ParseError(
                lineno,
                f"non-weighted presentation: word references g{k} "
                f"but must be supported on generators beyond g{floor}",
            )
        exps[k - 1] = (exps[k - 1] + e) % p
    return tuple(exps)


def parse_presentation(text: str) -> PcGroup:
    p = None
    m = None
    name = None
    pows = {}
    comms = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "name":
            if len(parts) < 2:
                raise ParseError(lineno, "name line needs a value")
            name = parts[1]
        elif head == "source":
            continue
        elif head == "p":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(lineno, "expected 'p <prime>'")
            p = int(parts[1])
            if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
                raise ParseError(lineno, f"{p} is not prime")
        elif head == "gens":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(lineno, "expected 'gens <m>'")
            m = int(parts[1])
        elif head == "pow":
            if p is None or m is None:
                raise ParseError(lineno, "pow before p/gens header")
            if len(parts) < 4 or parts[2] != "=":
                raise ParseError(lineno, "expected 'pow g<i> = <word>'")
            mg = _GEN.match(parts[1])
            if not mg:
                raise ParseError(lineno, f"bad generator {parts[1]!r}")
            i = int(mg.group(1))
            if not 1 <= i <= m:
                raise ParseError(lineno, f"generator g{i} out of range")
            if i in pows:
                raise ParseError(lineno, f"duplicate pow line for g{i}")
            pows[i] = _parse_word(parts[3:], m, p, i, lineno)
        elif head == "comm":
            if p is None or m is None:
                raise ParseError(lineno, "comm before p/gens header")
            if len(parts) < 5 or parts[3] != "=":
                raise ParseError(lineno, "expected 'comm g<j> g<i> = <word>'")
            mj, mi = _GEN.match(parts[1]), _GEN.match(parts[2])
            if not mj or not mi:
                raise ParseError(lineno, "bad generator token in comm line")
            j, i = int(mj.group(1)), int(mi.group(1))
            if not (1 <= i < j <= m):
                raise ParseError(lineno, f"comm needs j > i, got g{j}, g{i}")
            if (j, i) in comms:
                raise ParseError(lineno, f"duplicate comm line for [g{j},g{i}]")
            comms[(j, i)] = _parse_word(parts[4:], m, p, j, lineno)
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")
    if p is None or m is None:
        raise ParseError(0, "missing 'p' or 'gens' header")
    pw = [pows.get(i + 1) for i in range(m)]
    cw = {(j - 1, i - 1): w for (j, i), w in comms.items() if any(w)}
    try:
        return PcGroup(p, pw, cw, name=name)
    except InconsistentPresentationError as err:
        raise InconsistentPresentationError(f"inconsistent presentation: {err}")


def _word_text(exps):
    toks = [f"g{k + 1}^{e}" for k, e in enumerate(exps) if e]
    return " ".join(toks) if toks else "1"


def serialize_presentation(group: PcGroup, name: str | None = None, source: str | None = None) -> str:
    lines = []
    if name or group.name:
        lines.append(f"name {name or group.name}")
    if source:
        lines.append(f"source {source}")
    lines.append(f"p {group.p}")
    lines.append(f"gens {group.m}")
    for i in range(group.m):
        if any(group._pw[i]):
            lines.append(f"pow g{i + 1} = {_word_text(group._pw[i])}")
    for (j, i) in sorted(group._cw):
        lines.append(f"comm g{j + 1} g{i + 1} = {_word_text(group._cw[(j, i)])}")
    return "\n".join(lines) + "\n"
