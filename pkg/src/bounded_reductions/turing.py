"""Nondeterministic Turing machines, bounded halting oracles and machine transformers.

Conventions used throughout:

* A configuration that is not in a final state and has no applicable
  transition is *stuck*. Stuck runs count as non-halting.
* On a semi-infinite tape a left move with the head on cell 0 is not
  applicable.
* Choices along a path are indices into the ordered tuple delta(q, x).
  Witness paths are of minimal length, then lexicographically smallest.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import (
    EXCEEDS_HORIZON,
    NOT_FOUND,
    ExceedsHorizon,
    IllegalConfiguration,
    InvalidInstance,
    InvalidMachine,
    NotFoundWithinHorizon,
)

BLANK = "␣"
TAPES = ("semi", "two-way")


@dataclass(frozen=True)
class Transition:
    state: str
    symbol: str
    move: str  # "L" or "R"

    def as_list(self) -> list[str]:
        return [self.state, self.symbol, self.move]


@dataclass(frozen=True)
class NTM:
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    finals: frozenset[str]
    delta: tuple[tuple[tuple[str, str], tuple[Transition, ...]], ...]
    blank: str = BLANK
    tape: str = "two-way"
    _table: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        sigma, states = set(self.alphabet), set(self.states)
        if len(sigma) != len(self.alphabet) or len(states) != len(self.states):
            raise InvalidMachine("duplicate symbol or state")
        if self.blank not in sigma:
            raise InvalidMachine(f"blank {self.blank!r} missing from the alphabet")
        if self.initial not in states:
            raise InvalidMachine(f"initial state {self.initial!r} is not declared")
        if not self.finals <= states:
            raise InvalidMachine("final states must be declared states")
        if self.tape not in TAPES:
            raise InvalidMachine(f"tape must be one of {TAPES}")
        table: dict[tuple[str, str], tuple[Transition, ...]] = {}
        for (q, x), outs in self.delta:
            if q not in states or x not in sigma:
                raise InvalidMachine(f"transition source ({q}, {x}) is not declared")
            if q in self.finals:
                raise InvalidMachine(f"final state {q!r} must not have transitions")
            if (q, x) in table:
                raise InvalidMachine(f"duplicate transition source ({q}, {x})")
            for t in outs:
                if t.state not in states or t.symbol not in sigma or t.move not in ("L", "R"):
                    raise InvalidMachine(f"bad transition {t} from ({q}, {x})")
            table[(q, x)] = tuple(outs)
        object.__setattr__(self, "_table", table)

    def transitions(self, q: str, x: str) -> tuple[Transition, ...]:
        return self._table.get((q, x), ())

    @property
    def transition_count(self) -> int:
        return sum(len(outs) for _, outs in self.delta)

    @classmethod
    def build(
        cls,
        delta: dict[tuple[str, str], Sequence[tuple[str, str, str]]],
        *,
        finals: Iterable[str],
        initial: str = "q0",
        alphabet: Iterable[str] | None = None,
        states: Iterable[str] | None = None,
        blank: str = BLANK,
        tape: str = "two-way",
    ) -> NTM:
        """Convenience constructor inferring states and symbols from delta."""
        finals = list(finals)
        sym = [blank] if alphabet is None else list(alphabet)
        st = [initial] if states is None else list(states)

        def add(seq: list[str], v: str) -> None:
            if v not in seq:
                seq.append(v)

        rows = []
        for (q, x), outs in delta.items():
            if states is None:
                add(st, q)
            if alphabet is None:
                add(sym, x)
            ts = []
            for q2, y, d in outs:
                if states is None:
                    add(st, q2)
                if alphabet is None:
                    add(sym, y)
                ts.append(Transition(q2, y, d))
            rows.append(((q, x), tuple(ts)))
        if states is None:
            for f in finals:
                add(st, f)
        return cls(tuple(sym), tuple(st), initial, frozenset(finals), tuple(rows), blank, tape)


@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    cells: tuple[tuple[int, str], ...] = ()  # sorted, never stores the blank

    def read(self, pos: int, blank: str = BLANK) -> str:
        for p, s in self.cells:
            if p == pos:
                return s
        return blank

    def write(self, pos: int, sym: str, blank: str = BLANK) -> tuple[tuple[int, str], ...]:
        rest = [(p, s) for p, s in self.cells if p != pos]
        if sym != blank:
            rest.append((pos, sym))
            rest.sort()
        return tuple(rest)

    def tape_dict(self) -> dict[int, str]:
        return dict(self.cells)


def initial_config(m: NTM) -> Configuration:
    return Configuration(m.initial, 0, ())


def _check_config(m: NTM, c: Configuration) -> None:
    if c.state not in m.states:
        raise IllegalConfiguration(f"unknown state {c.state!r}")
    if m.tape == "semi" and (c.head < 0 or any(p < 0 for p, _ in c.cells)):
        raise IllegalConfiguration("semi-infinite configuration touches a negative cell")
    for _, s in c.cells:
        if s == m.blank or s not in m.alphabet:
            raise IllegalConfiguration(f"illegal stored symbol {s!r}")


def apply(m: NTM, c: Configuration, t: Transition) -> Configuration | None:
    """Successor of c under t, or None when the move falls off the left end."""
    head = c.head + (1 if t.move == "R" else -1)
    if m.tape == "semi" and head < 0:
        return None
    return Configuration(t.state, head, c.write(c.head, t.symbol, m.blank))


def successors(m: NTM, c: Configuration) -> list[tuple[int, Configuration]]:
    """(choice index, successor) pairs in canonical order."""
    if c.state in m.finals:
        return []
    out = []
    for i, t in enumerate(m.transitions(c.state, c.read(c.head, m.blank))):
        nxt = apply(m, c, t)
        if nxt is not None:
            out.append((i, nxt))
    return out


def step_all(m: NTM, c: Configuration) -> list[Configuration]:
    """Successors of c, one per applicable transition tuple, in canonical order."""
    _check_config(m, c)
    return [nxt for _, nxt in successors(m, c)]


@dataclass(frozen=True)
class ComputationPath:
    choices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.choices)


def replay(m: NTM, path: ComputationPath | Sequence[int]) -> list[Configuration]:
    """Configurations visited along a path from the empty tape.

    Raises InvalidInstance if some choice is not applicable.
    """
    choices = path.choices if isinstance(path, ComputationPath) else tuple(path)
    c = initial_config(m)
    trace = [c]
    for k, ch in enumerate(choices):
        if c.state in m.finals:
            raise InvalidInstance(f"path continues past a final state at step {k}")
        outs = m.transitions(c.state, c.read(c.head, m.blank))
        if not isinstance(ch, int) or not 0 <= ch < len(outs):
            raise InvalidInstance(f"choice {ch!r} at step {k} is out of range")
        nxt = apply(m, c, outs[ch])
        if nxt is None:
            raise InvalidInstance(f"choice {ch} at step {k} moves off the tape")
        c = nxt
        trace.append(c)
    return trace


def verify_halting_path(m: NTM, path: ComputationPath | Sequence[int]) -> int | None:
    """Length of a valid halting path, or None if it is not one."""
    try:
        trace = replay(m, path)
    except InvalidInstance:
        return None
    return len(trace) - 1 if trace[-1].state in m.finals else None


def halts_exists_within(m: NTM, n: int) -> tuple[bool, ComputationPath | None]:
    """Does some path from the empty tape reach a final state within n steps?

    Layered BFS with first-visit dedup. Layers are kept in lexicographic order
    of the recorded paths, so the first final configuration generated yields
    the minimal, then lexicographically smallest, witness.
    """
    start = initial_config(m)
    if start.state in m.finals:
        return True, ComputationPath(())
    seen = {start}
    layer: list[tuple[Configuration, tuple[int, ...]]] = [(start, ())]
    for _ in range(n):
        nxt_layer = []
        for c, path in layer:
            for i, nxt in successors(m, c):
                if nxt in seen:
                    continue
                seen.add(nxt)
                p = path + (i,)
                if nxt.state in m.finals:
                    return True, ComputationPath(p)
                nxt_layer.append((nxt, p))
        if not nxt_layer:
            break
        layer = nxt_layer
    return False, None


def min_halting_time(m: NTM, horizon: int) -> int | NotFoundWithinHorizon:
    ok, path = halts_exists_within(m, horizon)
    return len(path) if ok else NOT_FOUND


class _AllPaths:
    """Memoized search over the full path tree, keyed on (config, remaining steps)."""

    def __init__(self, m: NTM):
        self.m = m
        self.memo: dict[tuple[Configuration, int], int | None] = {}

    def depth(self, c: Configuration, r: int) -> int | None:
        """Max halting depth from c if every path halts within r steps, else None."""
        if c.state in self.m.finals:
            return 0
        if r == 0:
            return None
        key = (c, r)
        if key in self.memo:
            return self.memo[key]
        kids = successors(self.m, c)
        best: int | None = None if not kids else 0
        for _, nxt in kids:
            d = self.depth(nxt, r - 1)
            if d is None:
                best = None
                break
            best = max(best, d + 1)
        self.memo[key] = best
        return best

    def offending(self, c: Configuration, r: int) -> tuple[int, ...]:
        out: list[int] = []
        while c.state not in self.m.finals and r > 0:
            for i, nxt in successors(self.m, c):
                if self.depth(nxt, r - 1) is None:
                    out.append(i)
                    c, r = nxt, r - 1
                    break
            else:
                break  # stuck
        return tuple(out)


def halts_all_within(m: NTM, n: int) -> tuple[bool, ComputationPath | None]:
    """Do all paths from the empty tape halt within n steps?

    On failure returns the lexicographically smallest offending prefix: a path of
    length n that has not halted, or a shorter path ending in a stuck
    configuration.
    """
    search = _AllPaths(m)
    start = initial_config(m)
    if search.depth(start, n) is not None:
        return True, None
    return False, ComputationPath(search.offending(start, n))


def max_halting_time_all_paths(m: NTM, horizon: int) -> int | ExceedsHorizon:
    d = _AllPaths(m).depth(initial_config(m), horizon)
    return EXCEEDS_HORIZON if d is None else d


def _fresh(taken: set[str], base: str) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def embed_input(m: NTM, x: Sequence[str]) -> NTM:
    """Machine that writes x, walks back to cell 0 and then runs m.

    The prologue takes exactly 2|x| steps.
    """
    x = list(x)
    for s in x:
        if s not in m.alphabet:
            raise InvalidInstance(f"input symbol {s!r} is not in the alphabet")
    if not x:
        return m
    k = len(x)
    taken = set(m.states)
    writers = [_fresh(taken, f"write{i}") for i in range(k)]
    returners = [_fresh(taken, f"return{j}") for j in range(1, k + 1)]  # returners[j-1] = B_j

    rows = []
    for i, s in enumerate(x):
        nxt = writers[i + 1] if i + 1 < k else returners[k - 1]
        rows.append(((writers[i], m.blank), (Transition(nxt, s, "R"),)))
    for j in range(k, 0, -1):
        nxt = returners[j - 2] if j > 1 else m.initial
        for sym in m.alphabet:
            rows.append(((returners[j - 1], sym), (Transition(nxt, sym, "L"),)))
    return NTM(
        m.alphabet,
        tuple(writers) + tuple(returners) + m.states,
        writers[0],
        m.finals,
        tuple(rows) + m.delta,
        m.blank,
        m.tape,
    )


EMBED_OVERHEAD_PER_SYMBOL = 2
HALTIFY_OVERHEAD = 1


def haltify(m: NTM, accepting: Iterable[str], rejecting: Iterable[str]) -> NTM:
    """Make accepting runs halt and rejecting runs loop.

    Each accepting final becomes non-final and steps (on every symbol, writing it
    back and moving right) into one fresh final state, so accepting runs take
    exactly one extra step. Each rejecting final becomes non-final and moves
    right forever. Other finals are left alone.
    """
    acc, rej = set(accepting), set(rejecting)
    if acc & rej:
        raise InvalidInstance(f"states both accepting and rejecting: {sorted(acc & rej)}")
    if not (acc | rej) <= m.finals:
        raise InvalidInstance("accepting and rejecting states must be final")
    taken = set(m.states)
    halt = _fresh(taken, "halt")
    rows = list(m.delta)
    for q in m.states:
        if q in acc:
            rows += [((q, s), (Transition(halt, s, "R"),)) for s in m.alphabet]
        elif q in rej:
            rows += [((q, s), (Transition(q, s, "R"),)) for s in m.alphabet]
    finals = (m.finals - acc - rej) | {halt}
    return NTM(m.alphabet, m.states + (halt,), m.initial, finals, tuple(rows), m.blank, m.tape)


# --- two-track folding onto a semi-infinite tape ---------------------------

def _pair(u: str, d: str, marked: bool = False) -> str:
    return json.dumps([u, d, 0] if marked else [u, d], ensure_ascii=False)


def _st(q: str, tag: str) -> str:
    return json.dumps([q, tag], ensure_ascii=False)


@dataclass(frozen=True)
class FoldedMachine:
    """A semi-infinite machine simulating a two-way machine.

    A run of t steps of the source becomes a run of t' steps with
    t <= t' <= overhead_factor * t, and halting is preserved in both directions.
    """

    machine: NTM
    overhead_factor: int = 2

    def decode(self, c: Configuration, source: NTM) -> tuple[str, int, dict[int, str]]:
        """Map a folded configuration back to (state, head, tape) of the source."""
        q, tag = json.loads(c.state)
        tape: dict[int, str] = {}
        for p, s in c.cells:
            u, d = json.loads(s)[:2]
            if u != source.blank:
                tape[p] = u
            if d != source.blank:
                tape[-p - 1] = d
        head = c.head if tag in ("U", "F", "I") else -c.head - 1
        return q, head, tape


def to_semi_infinite(m: NTM) -> FoldedMachine:
    """Fold a two-way tape onto a semi-infinite one with two tracks.

    Folded cell i holds [cell i, cell -i-1] of the source; cell 0 carries an
    extra mark so the machine knows where the fold is. Crossing the fold costs
    one extra "bounce" step (right, then back left). Moves into a final state
    always go right, since the head position no longer matters. The very first
    step both simulates the source's first step and writes the mark.
    """
    if m.tape == "semi":
        return FoldedMachine(m, 1)
    blank2 = _pair(m.blank, m.blank)
    alphabet = [blank2] + [
        _pair(u, d, mk)
        for mk in (False, True)
        for u in m.alphabet
        for d in m.alphabet
        if (u, d, mk) != (m.blank, m.blank, False)
    ]

    def state(q: str, track: str) -> str:
        return _st(q, "F") if q in m.finals else _st(q, track)

    rows: list = []
    states: list[str] = []
    bounce_targets: set[tuple[str, str]] = set()

    def moves(q: str, track: str, u: str, d: str, marked: bool) -> tuple[Transition, ...]:
        read = u if track == "U" else d
        outs = []
        for t in m.transitions(q, read):
            nu, nd = (t.symbol, d) if track == "U" else (u, t.symbol)
            w = _pair(nu, nd, marked)
            if t.state in m.finals:
                outs.append(Transition(state(t.state, track), w, "R"))
                continue
            # physical direction on the folded tape and whether we cross the fold
            toward_zero = (t.move == "L") == (track == "U")
            if not toward_zero:
                outs.append(Transition(state(t.state, track), w, "R"))
            elif not marked:
                outs.append(Transition(state(t.state, track), w, "L"))
            else:
                other = "D" if track == "U" else "U"
                bounce_targets.add((t.state, other))
                outs.append(Transition(_st(t.state, "b" + other), w, "R"))
        return tuple(outs)

    for q in m.states:
        if q in m.finals:
            states.append(_st(q, "F"))
            continue
        for track in ("U", "D"):
            states.append(_st(q, track))
            for mk in (False, True):
                for u in m.alphabet:
                    for d in m.alphabet:
                        outs = moves(q, track, u, d, mk)
                        if outs:
                            rows.append(((_st(q, track), _pair(u, d, mk)), outs))
    for q, track in sorted(bounce_targets):
        b = _st(q, "b" + track)
        states.append(b)
        for s in alphabet:
            rows.append(((b, s), (Transition(_st(q, track), s, "L"),)))
    if m.initial in m.finals:
        initial = _st(m.initial, "F")
    else:
        initial = _st(m.initial, "I")
        states.append(initial)
        outs = moves(m.initial, "U", m.blank, m.blank, True)
        if outs:
            rows.append(((initial, blank2), outs))
    folded = NTM(
        tuple(alphabet),
        tuple(states),
        initial,
        frozenset(_st(q, "F") for q in m.finals),
        tuple(rows),
        blank2,
        "semi",
    )
    return FoldedMachine(folded, 2)


# --- JSON ------------------------------------------------------------------

def ntm_to_json(m: NTM) -> dict:
    return {
        "alphabet": list(m.alphabet),
        "blank": m.blank,
        "states": list(m.states),
        "initial": m.initial,
        "finals": sorted(m.finals, key=m.states.index),
        "tape": m.tape,
        "delta": [
            {"from": [q, x], "to": [t.as_list() for t in outs]}
            for (q, x), outs in m.delta
        ],
    }


def ntm_from_json(data: dict) -> NTM:
    try:
        rows = tuple(
            (
                (row["from"][0], row["from"][1]),
                tuple(Transition(*t) for t in row["to"]),
            )
            for row in data["delta"]
        )
        return NTM(
            tuple(data["alphabet"]),
            tuple(data["states"]),
            data["initial"],
            frozenset(data["finals"]),
            rows,
            data.get("blank", BLANK),
            data.get("tape", "two-way"),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidMachine(f"malformed machine description: {exc}") from exc


# --- corpus generation -------------------------------------------------------

def _symbols(b: int) -> tuple[str, ...]:
    return (BLANK,) + tuple(str(i) for i in range(1, b))


def _machine(a: int, b: int, choice: Sequence[tuple[int, ...]], pool: list, tape: str) -> NTM:
    states = tuple(f"q{i}" for i in range(a)) + ("qf",)
    sym = _symbols(b)
    keys = [(q, x) for q in states[:a] for x in sym]
    rows = tuple(
        (key, tuple(Transition(*pool[j]) for j in picks))
        for key, picks in zip(keys, choice)
        if picks
    )
    return NTM(sym, states, "q0", frozenset({"qf"}), rows, BLANK, tape)


def _tuple_pool(a: int, b: int) -> list[tuple[str, str, str]]:
    states = [f"q{i}" for i in range(a)] + ["qf"]
    return [(q, y, d) for q in states for y in _symbols(b) for d in ("L", "R")]


def _canonical(a: int, b: int, choice: tuple[tuple[int, ...], ...], pool: list) -> tuple:
    """Lexicographically smallest encoding over relabelings of q1..q_{a-1}."""
    if a <= 2:
        return choice
    index = {t: j for j, t in enumerate(pool)}
    sym = _symbols(b)
    best = None
    for perm in itertools.permutations(range(1, a)):
        ren = {f"q{i}": f"q{perm[i - 1]}" for i in range(1, a)}
        ren["q0"], ren["qf"] = "q0", "qf"
        table = {}
        for k, picks in enumerate(choice):
            q = f"q{k // b}"
            x = sym[k % b]
            table[(ren[q], x)] = tuple(
                sorted(index[(ren[pool[j][0]], pool[j][1], pool[j][2])] for j in picks)
            )
        enc = tuple(table[(f"q{k // b}", sym[k % b])] for k in range(len(choice)))
        if best is None or enc < best:
            best = enc
    return best


def _compositions(total: int, parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def gen_corpus(
    max_states: int,
    max_symbols: int,
    max_branch: int,
    limit: int | None,
    tape: str = "semi",
) -> list[NTM]:
    """Deterministic graded enumeration of small machines, up to state relabeling.

    Machines have non-final states q0..q_{a-1}, one final state qf and alphabet
    ␣, 1, ..., b-1. They are ordered by total number of transition tuples, then
    by (a, b), then lexicographically by encoding. Only the lexicographically
    smallest relabeling of the non-initial non-final states is kept.
    """
    if limit is not None and limit <= 0:
        return []
    if min(max_states, max_symbols, max_branch) < 1:
        raise InvalidInstance("corpus limits must be at least 1")
    out: list[NTM] = []
    pools = {
        (a, b): _tuple_pool(a, b)
        for a in range(1, max_states + 1)
        for b in range(1, max_symbols + 1)
    }
    max_total = max_states * max_symbols * max_branch
    for total in range(max_total + 1):
        for a in range(1, max_states + 1):
            for b in range(1, max_symbols + 1):
                pool = pools[(a, b)]
                keys = a * b
                for sizes in _compositions(total, keys, max_branch):
                    options = [list(itertools.combinations(range(len(pool)), s)) for s in sizes]
                    for choice in itertools.product(*options):
                        if _canonical(a, b, choice, pool) != choice:
                            continue
                        out.append(_machine(a, b, choice, pool, tape))
                        if limit is not None and len(out) >= limit:
                            return out
    return out


def sample_corpus(
    max_states: int,
    max_symbols: int,
    max_branch: int,
    count: int,
    seed: int = 0,
    tape: str = "semi",
) -> list[NTM]:
    """Seeded random machines with the same shape as gen_corpus (duplicates removed)."""
    rng = random.Random(seed)
    seen = set()
    out: list[NTM] = []
    attempts = 0
    while len(out) < count and attempts < 100 * max(count, 1):
        attempts += 1
        a = rng.randint(1, max_states)
        b = rng.randint(1, max_symbols)
        pool = _tuple_pool(a, b)
        choice = []
        for _ in range(a * b):
            size = rng.randint(0, max_branch)
            choice.append(tuple(sorted(rng.sample(range(len(pool)), size))))
        choice = _canonical(a, b, tuple(choice), pool)
        if (a, b, choice) in seen:
            continue
        seen.add((a, b, choice))
        out.append(_machine(a, b, choice, pool, tape))
    return out


def one_step_halter(tape: str = "semi") -> NTM:
    return NTM.build({("q0", BLANK): [("qf", BLANK, "R")]}, finals=["qf"], tape=tape)


def looper(tape: str = "semi") -> NTM:
    return NTM.build({("q0", BLANK): [("q0", BLANK, "R")]}, finals=["qf"], tape=tape)
