"""Post correspondence problem: instances, a bounded match solver and the
reduction from nondeterministic halting.

Words are tuples of symbols, so symbols may be arbitrary strings. Witness
indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import NOT_FOUND, Budget, IndexOutOfRange, InvalidInstance, NotFoundWithinHorizon, as_budget
from .turing import NTM

STAR = "⋆"
BANG = "!"
RESERVED = (STAR, BANG)
ESCAPE = "\\"


def _word(w: str | Sequence[str]) -> tuple[str, ...]:
    return tuple(w)


@dataclass(frozen=True)
class Domino:
    top: tuple[str, ...]
    bottom: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "top", _word(self.top))
        object.__setattr__(self, "bottom", _word(self.bottom))
        if not self.top and not self.bottom:
            raise InvalidInstance("a domino needs at least one non-empty word")


@dataclass(frozen=True)
class PCPInstance:
    alphabet: tuple[str, ...]
    dominoes: tuple[Domino, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "dominoes", tuple(self.dominoes))
        if not self.dominoes:
            raise InvalidInstance("a PCP instance needs at least one domino")
        sigma = set(self.alphabet)
        for d in self.dominoes:
            if not set(d.top) <= sigma or not set(d.bottom) <= sigma:
                raise InvalidInstance(f"domino {d} uses undeclared symbols")

    @classmethod
    def of(cls, *pairs: tuple[str | Sequence[str], str | Sequence[str]]) -> PCPInstance:
        dominoes = tuple(Domino(_word(a), _word(b)) for a, b in pairs)
        alphabet: list[str] = []
        for d in dominoes:
            for s in d.top + d.bottom:
                if s not in alphabet:
                    alphabet.append(s)
        return cls(tuple(alphabet), dominoes)

    @property
    def k(self) -> int:
        return len(self.dominoes)

    @property
    def max_len(self) -> int:
        return max(max(len(d.top), len(d.bottom)) for d in self.dominoes)


def concat(inst: PCPInstance, indices: Sequence[int]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    top: list[str] = []
    bottom: list[str] = []
    for i in indices:
        if not isinstance(i, int) or not 1 <= i <= inst.k:
            raise IndexOutOfRange(f"domino index {i!r} not in [1, {inst.k}]")
        d = inst.dominoes[i - 1]
        top.extend(d.top)
        bottom.extend(d.bottom)
    return tuple(top), tuple(bottom)


def verify_match(inst: PCPInstance, indices: Sequence[int]) -> bool:
    """True iff the (non-empty) index sequence is a match."""
    top, bottom = concat(inst, indices)
    return len(indices) >= 1 and top == bottom


def solve_bpcp(
    inst: PCPInstance, n: int, budget: Budget | int | None = None
) -> tuple[int, ...] | None:
    """Minimal-length, then lexicographically smallest, match of length <= n.

    BFS over overhangs: the state after a prefix is which side is ahead and
    the unmatched suffix of that side. Expansion order within a layer follows
    the lexicographic order of the recorded prefixes, so first-visit dedup on
    overhangs keeps the smallest prefix for each state.
    """
    budget = as_budget(budget)
    codes = {s: chr(0x100 + i) for i, s in enumerate(inst.alphabet)}
    doms = [
        ("".join(codes[s] for s in d.top), "".join(codes[s] for s in d.bottom))
        for d in inst.dominoes
    ]
    cap = inst.max_len
    # state: (top_ahead, overhang); root is (True, "")
    layer: list[tuple[bool, str, tuple[int, ...]]] = [(True, "", ())]
    seen: set[tuple[bool, str]] = set()
    for depth in range(n):
        remaining = n - depth - 1
        nxt_layer = []
        for top_ahead, over, path in layer:
            for i, (a, b) in enumerate(doms, start=1):
                budget.tick()
                if top_ahead:
                    lead, lag = over + a, b
                else:
                    lead, lag = over + b, a
                if len(lead) >= len(lag):
                    if not lead.startswith(lag):
                        continue
                    state = (top_ahead, lead[len(lag):])
                else:
                    if not lag.startswith(lead):
                        continue
                    state = (not top_ahead, lag[len(lead):])
                if not state[1]:
                    return path + (i,)
                if len(state[1]) > remaining * cap:
                    continue
                if state in seen:
                    continue
                seen.add(state)
                nxt_layer.append((state[0], state[1], path + (i,)))
        if not nxt_layer:
            break
        layer = nxt_layer
    return None


def min_match_length(inst: PCPInstance, horizon: int, budget=None) -> int | NotFoundWithinHorizon:
    w = solve_bpcp(inst, horizon, budget)
    return NOT_FOUND if w is None else len(w)


# --- NHALT -> PCP -------------------------------------------------------------

def _escape_map(names: Sequence[str], taken: set[str]) -> dict[str, str]:
    """Prefix colliding names with backslashes until they are fresh."""
    out = {}
    for name in names:
        new = name
        while new in taken:
            new = ESCAPE + new
        taken.add(new)
        out[name] = new
    return out


@dataclass(frozen=True)
class MachineEncoding:
    """Token names used for the tape symbols and states of a machine."""

    symbol: dict[str, str]
    state: dict[str, str]


def machine_tokens(m: NTM) -> MachineEncoding:
    taken = set(RESERVED)
    sym = _escape_map(m.alphabet, taken)
    st = _escape_map(m.states, taken)
    return MachineEncoding(sym, st)


def reduce_nhalt_to_pcp(m: NTM) -> PCPInstance:
    """Dominoes whose matches encode halting computations of m from the empty tape.

    Instantaneous descriptions are written token by token with a star after
    every token on the bottom and before every token on the top; "!" separates
    consecutive descriptions. A computation halting after h steps with L left
    moves yields a match of length (h+1)(h+2) - L, so halting within n steps is
    equivalent to a match of length at most (n+1)(n+2).

    Left moves need to rewrite the symbol left of the head as well, so they
    get one domino per transition tuple and per symbol z in that cell.
    """
    if m.tape != "semi":
        raise InvalidInstance("reduce_nhalt_to_pcp needs a semi-infinite machine; use to_semi_infinite")
    enc = machine_tokens(m)
    S, E = STAR, BANG
    sy, st = enc.symbol, enc.state
    blank = sy[m.blank]
    out: list[Domino] = []
    # (i) initial
    out.append(Domino((E,), (E, S, st[m.initial], S, blank, S, E, S)))
    # (ii) copy
    for x in m.alphabet:
        out.append(Domino((S, sy[x]), (sy[x], S)))
    # (iii) left and (iv) right transitions
    for (q, x), outs in m.delta:
        for t in outs:
            if t.move == "L":
                for z in m.alphabet:
                    out.append(Domino(
                        (S, sy[z], S, st[q], S, sy[x]),
                        (st[t.state], S, sy[z], S, sy[t.symbol], S),
                    ))
            else:
                out.append(Domino((S, st[q], S, sy[x]), (sy[t.symbol], S, st[t.state], S)))
    # (v) tape expander
    out.append(Domino((S, E), (blank, S, E, S)))
    finals = [q for q in m.states if q in m.finals]
    # (vi), (vii) state merge
    for f in finals:
        for y1 in m.alphabet:
            for y2 in m.alphabet:
                out.append(Domino((S, sy[y1], S, st[f], S, sy[y2]), (st[f], S)))
    for f in finals:
        for y1 in m.alphabet:
            for y2 in m.alphabet:
                out.append(Domino((S, st[f], S, sy[y1], S, sy[y2]), (st[f], S)))
    # (viii) final
    for f in finals:
        out.append(Domino((S, st[f], S, blank, S, E, S, E), (E,)))
    alphabet = tuple(sy[x] for x in m.alphabet) + tuple(st[q] for q in m.states) + (S, E)
    return PCPInstance(alphabet, tuple(out))


def pcp_threshold(n: int) -> int:
    return (n + 1) * (n + 2)


# --- JSON -----------------------------------------------------------------------

def _word_json(w: tuple[str, ...]) -> str | list[str]:
    return "".join(w) if all(len(s) == 1 for s in w) else list(w)


def pcp_to_json(inst: PCPInstance) -> dict:
    return {
        "alphabet": list(inst.alphabet),
        "dominoes": [{"top": _word_json(d.top), "bottom": _word_json(d.bottom)} for d in inst.dominoes],
    }


def pcp_from_json(data: dict) -> PCPInstance:
    try:
        dominoes = tuple(Domino(_word(d["top"]), _word(d["bottom"])) for d in data["dominoes"])
        if "alphabet" in data:
            return PCPInstance(tuple(data["alphabet"]), dominoes)
        return PCPInstance.of(*((d.top, d.bottom) for d in dominoes))
    except (KeyError, TypeError) as exc:
        raise InvalidInstance(f"malformed PCP instance: {exc}") from exc
