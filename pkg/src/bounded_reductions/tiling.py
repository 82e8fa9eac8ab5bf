"""Wang tiles with a fixed origin tile, the reduction from all-paths halting,
and the spin-model (ground-state energy) reduction.

Grids are Z_n^2 = {-n..n}^2 stored row-major from the bottom-left corner:
cell (x, y) has index (y + n) * W + (x + n) with W = 2n + 1. Tile indices
are 0-based internally and 1-based in JSON and in reported assignments;
tile index 0 (t_1) is the origin tile.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import BudgetExceeded, InvalidInstance, as_budget
from .turing import NTM


@dataclass(frozen=True)
class WangTile:
    N: str
    E: str
    S: str
    W: str


@dataclass(frozen=True)
class TileSet:
    palette: tuple[str, ...]
    tiles: tuple[WangTile, ...]
    families: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "palette", tuple(self.palette))
        object.__setattr__(self, "tiles", tuple(self.tiles))
        if not self.tiles:
            raise InvalidInstance("a tile set needs at least one tile")
        colors = set(self.palette)
        for t in self.tiles:
            if not {t.N, t.E, t.S, t.W} <= colors:
                raise InvalidInstance(f"tile {t} uses colors outside the palette")

    @classmethod
    def of(cls, *tiles: WangTile | tuple[str, str, str, str]) -> TileSet:
        ts = tuple(t if isinstance(t, WangTile) else WangTile(*t) for t in tiles)
        palette: list[str] = []
        for t in ts:
            for c in (t.N, t.E, t.S, t.W):
                if c not in palette:
                    palette.append(c)
        return cls(tuple(palette), ts)

    def __len__(self) -> int:
        return len(self.tiles)


def side(n: int) -> int:
    return 2 * n + 1


def cell_index(n: int, x: int, y: int) -> int:
    return (y + n) * side(n) + (x + n)


def origin_index(n: int) -> int:
    return cell_index(n, 0, 0)


@dataclass(frozen=True)
class Violation:
    kind: str  # "horizontal", "vertical" or "origin"
    a: tuple[int, int]
    b: tuple[int, int] | None = None


def _neighbor_pairs(n: int):
    w = side(n)
    for y in range(w):
        for x in range(w):
            p = y * w + x
            if x + 1 < w:
                yield "horizontal", p, p + 1
            if y + 1 < w:
                yield "vertical", p, p + w


def _coords(n: int, p: int) -> tuple[int, int]:
    y, x = divmod(p, side(n))
    return x - n, y - n


def verify_tiling(ts: TileSet, n: int, assignment: Sequence[int]) -> tuple[bool, list[Violation]]:
    """Check a 0-based assignment of the (2n+1)^2 grid."""
    w = side(n)
    if len(assignment) != w * w:
        raise InvalidInstance(f"assignment must cover all {w * w} cells")
    if any(not 0 <= t < len(ts) for t in assignment):
        raise InvalidInstance("tile index out of range")
    out = []
    o = origin_index(n)
    if assignment[o] != 0:
        out.append(Violation("origin", (0, 0)))
    for kind, p, q in _neighbor_pairs(n):
        a, b = ts.tiles[assignment[p]], ts.tiles[assignment[q]]
        bad = a.E != b.W if kind == "horizontal" else a.N != b.S
        if bad:
            out.append(Violation(kind, _coords(n, p), _coords(n, q)))
    return not out, out


class _Compat:
    """Bitmask compatibility tables: which tiles may sit right of / above a tile."""

    def __init__(self, ts: TileSet):
        k = len(ts)
        self.k = k
        self.full = (1 << k) - 1
        by_w: dict[str, int] = {}
        by_s: dict[str, int] = {}
        by_e: dict[str, int] = {}
        by_n: dict[str, int] = {}
        for i, t in enumerate(ts.tiles):
            by_w[t.W] = by_w.get(t.W, 0) | (1 << i)
            by_s[t.S] = by_s.get(t.S, 0) | (1 << i)
            by_e[t.E] = by_e.get(t.E, 0) | (1 << i)
            by_n[t.N] = by_n.get(t.N, 0) | (1 << i)
        self.right = [by_w.get(t.E, 0) for t in ts.tiles]
        self.up = [by_s.get(t.N, 0) for t in ts.tiles]
        self.left = [by_e.get(t.W, 0) for t in ts.tiles]
        self.down = [by_n.get(t.S, 0) for t in ts.tiles]

    def support(self, table: list[int], dom: int) -> int:
        acc = 0
        while dom:
            low = dom & -dom
            acc |= table[low.bit_length() - 1]
            dom ^= low
        return acc


def _neighbors(n: int) -> list[list[tuple[int, str]]]:
    """Per cell: (neighbor, direction of the neighbor seen from the cell)."""
    w = side(n)
    out: list[list[tuple[int, str]]] = [[] for _ in range(w * w)]
    for y in range(w):
        for x in range(w):
            p = y * w + x
            if x + 1 < w:
                out[p].append((p + 1, "right"))
            if x > 0:
                out[p].append((p - 1, "left"))
            if y + 1 < w:
                out[p].append((p + w, "up"))
            if y > 0:
                out[p].append((p - w, "down"))
    return out


def _ac3(doms: list[int], queue: deque[int], comp: _Compat, nbrs, frozen: int = 0) -> bool:
    """Arc consistency; returns False on a domain wipeout. Mutates doms.

    Cells with index below `frozen` are never revised.
    """
    tables = {"right": comp.right, "left": comp.left, "up": comp.up, "down": comp.down}
    queued = set(queue)
    while queue:
        p = queue.popleft()
        queued.discard(p)
        for q, direction in nbrs[p]:
            if q < frozen:
                continue
            # q lies `direction` of p; tiles allowed at q given p's domain
            allowed = comp.support(tables[direction], doms[p])
            new = doms[q] & allowed
            if new != doms[q]:
                if not new:
                    return False
                doms[q] = new
                if q not in queued:
                    queue.append(q)
                    queued.add(q)
    return True


def solve_btile(
    ts: TileSet, n: int, budget=None, initial_domains: Sequence[int] | None = None
) -> tuple[int, ...] | None:
    """Lexicographically smallest valid tiling of Z_n^2 (0-based), or None if impossible.

    Backtracking in row-major order from the bottom-left with ascending tile
    indices, maintaining arc consistency. Propagation only removes values that
    belong to no solution, so the first solution reached is the canonical one
    and exhausting the tree proves impossibility.
    """
    budget = as_budget(budget)
    comp = _Compat(ts)
    w = side(n)
    cells = w * w
    nbrs = _neighbors(n)
    doms = list(initial_domains) if initial_domains is not None else [comp.full] * cells
    o = origin_index(n)
    doms[o] &= 1
    if not doms[o]:
        return None
    if not _ac3(doms, deque(range(cells)), comp, nbrs):
        return None

    def rec(p: int, doms: list[int]) -> list[int] | None:
        while p < cells and doms[p] & (doms[p] - 1) == 0:
            p += 1
        if p == cells:
            return doms
        dom = doms[p]
        while dom:
            low = dom & -dom
            dom ^= low
            budget.tick()
            trial = doms.copy()
            trial[p] = low
            if _ac3(trial, deque([p]), comp, nbrs):
                hit = rec(p + 1, trial)
                if hit is not None:
                    return hit
        return None

    found = rec(0, doms)
    if found is None:
        return None
    return tuple(d.bit_length() - 1 for d in found)


# --- all-paths halting -> tiling ------------------------------------------------------

def _c(*parts: str) -> str:
    return json.dumps(list(parts), ensure_ascii=False)


EMPTY = _c("∅")
EXT_L = _c("ext<")
EXT_R = _c("ext>")
NOSIG = _c("·")


def reduce_nhaltall_to_tile(m: NTM) -> TileSet:
    """Tiles whose valid tilings above the origin row follow computation paths.

    Row 0 holds the empty tape with the head in q0 at the origin; every later
    row performs one step. A head in a final state has no tile above it, so
    Z_{n+1}^2 cannot be tiled iff every path halts within n steps.

    Beyond the classical families (initial, tape extensions, empty, right and
    left transitions, state merges, copies) the set has:

    * directional head signals ("r", q) and ("l", q), so two heads moving
      toward each other cannot cancel;
    * one loop tile per non-final (q, y) without an applicable move, so a
      stuck run counts as non-halting;
    * for semi-infinite machines, marked column-0 colors, with no left moves
      from a marked cell.
    """
    semi = m.tape == "semi"
    sym = m.alphabet
    tiles: list[WangTile] = []
    fams: list[str] = []

    def add(tile: WangTile, fam: str) -> None:
        tiles.append(tile)
        fams.append(fam)

    def s(y: str, marked: bool = False) -> str:
        return _c("s0" if marked else "s", y)

    def h(q: str, y: str, marked: bool = False) -> str:
        return _c("h0" if marked else "h", q, y)

    marks = (False, True) if semi else (False,)
    add(WangTile(h(m.initial, m.blank, semi), EXT_R, EMPTY, EXT_L), "initial")
    add(WangTile(s(m.blank), EXT_L, EMPTY, EXT_L), "extension")
    add(WangTile(s(m.blank), EXT_R, EMPTY, EXT_R), "extension")
    add(WangTile(EMPTY, EMPTY, EMPTY, EMPTY), "empty")
    targets: list[str] = []
    for (q, x), outs in m.delta:
        for t in outs:
            if t.state not in targets:
                targets.append(t.state)
            if t.move == "R":
                for mk in marks:
                    add(WangTile(s(t.symbol, mk), _c("r", t.state), h(q, x, mk), NOSIG), "right")
            else:
                add(WangTile(s(t.symbol), NOSIG, h(q, x), _c("l", t.state)), "left")
    targets = [q for q in m.states if q in targets]
    for q in targets:
        for y in sym:
            add(WangTile(h(q, y), NOSIG, s(y), _c("r", q)), "merge")
            add(WangTile(h(q, y), _c("l", q), s(y), NOSIG), "merge")
            if semi:
                add(WangTile(h(q, y, True), _c("l", q), s(y, True), NOSIG), "merge")
    for mk in marks:
        for y in sym:
            add(WangTile(s(y, mk), NOSIG, s(y, mk), NOSIG), "copy")
    for q in m.states:
        if q in m.finals:
            continue
        for y in sym:
            moves = m.transitions(q, y)
            for mk in marks:
                usable = [t for t in moves if not (mk and t.move == "L")]
                if not usable:
                    add(WangTile(h(q, y, mk), NOSIG, h(q, y, mk), NOSIG), "loop")
    return TileSet(TileSet.of(*tiles).palette, tuple(tiles), tuple(fams))


def family_counts(ts: TileSet) -> dict[str, int]:
    out: dict[str, int] = {}
    for f in ts.families or ():
        out[f] = out.get(f, 0) + 1
    return out


# --- tiling -> spin model ------------------------------------------------------------

@dataclass(frozen=True)
class SpinModel:
    """h^x(left, right), h^y(bottom, top) and h^loc(spin) as non-negative integer tables."""

    hx: tuple[tuple[int, ...], ...]
    hy: tuple[tuple[int, ...], ...]
    hloc: tuple[int, ...]

    def __post_init__(self) -> None:
        k = len(self.hloc)
        if k < 1 or len(self.hx) != k or len(self.hy) != k:
            raise InvalidInstance("coupling tables must be k x k with k >= 1")
        if any(len(r) != k for r in self.hx + self.hy):
            raise InvalidInstance("coupling tables must be square")
        if any(v < 0 for r in self.hx + self.hy for v in r) or any(v < 0 for v in self.hloc):
            raise InvalidInstance("couplings must be non-negative")

    @property
    def k(self) -> int:
        return len(self.hloc)


def reduce_tile_to_gse(ts: TileSet) -> SpinModel:
    t = ts.tiles
    k = len(t)
    hx = tuple(tuple(int(t[a].E != t[b].W) for b in range(k)) for a in range(k))
    hy = tuple(tuple(int(t[a].N != t[b].S) for b in range(k)) for a in range(k))
    hloc = tuple(int(i != 0) for i in range(k))
    return SpinModel(hx, hy, hloc)


def energy(model: SpinModel, n: int, config: Sequence[int]) -> int:
    """H_n on the open grid Z_n^2 (0-based spins, row-major from the bottom-left)."""
    w = side(n)
    if len(config) != w * w:
        raise InvalidInstance(f"configuration must cover all {w * w} sites")
    if any(not 0 <= s < model.k for s in config):
        raise InvalidInstance("spin out of range")
    total = model.hloc[config[origin_index(n)]]
    for kind, p, q in _neighbor_pairs(n):
        table = model.hx if kind == "horizontal" else model.hy
        total += table[config[p]][config[q]]
    return total


EXHAUSTIVE_LIMIT = 1 << 20
TRANSFER_LIMIT = 1 << 20


def _min_energy_exhaustive(model: SpinModel, n: int) -> tuple[int, tuple[int, ...]]:
    w = side(n)
    cells = w * w
    k = model.k
    if k**cells > EXHAUSTIVE_LIMIT:
        raise BudgetExceeded(f"{k}^{cells} configurations exceed the enumeration limit")
    hx, hy, hloc = (np.array(a, dtype=np.int64) for a in (model.hx, model.hy, model.hloc))
    codes = np.arange(k**cells, dtype=np.int64)
    # spins[:, p] for cell p, first cell most significant so index order is lexicographic
    spins = np.empty((codes.size, cells), dtype=np.int64)
    rest = codes
    for p in range(cells - 1, -1, -1):
        spins[:, p] = rest % k
        rest = rest // k
    e = hloc[spins[:, origin_index(n)]].copy()
    for kind, p, q in _neighbor_pairs(n):
        table = hx if kind == "horizontal" else hy
        e += table[spins[:, p], spins[:, q]]
    best = int(np.argmin(e))
    return int(e[best]), tuple(int(v) for v in spins[best])


def _min_energy_transfer(model: SpinModel, n: int) -> tuple[int, tuple[int, ...]]:
    """Broken-profile dynamic programming over a window of the last W sites."""
    w = side(n)
    cells = w * w
    k = model.k
    if k**w > TRANSFER_LIMIT:
        raise BudgetExceeded(f"{k}^{w} profile states exceed the transfer limit")
    hx, hy, hloc = (np.array(a, dtype=np.int64) for a in (model.hx, model.hy, model.hloc))
    o = origin_index(n)
    size = k**w
    tail = k ** (w - 1)
    states = np.arange(size, dtype=np.int64)
    oldest = states // tail          # spin of the site W back (below the next site)
    newest = states % k              # spin of the previous site (left of the next site)
    # cost of the first row for every row configuration
    row = np.empty((size, w), dtype=np.int64)
    rest = states.copy()
    for j in range(w - 1, -1, -1):
        row[:, j] = rest % k
        rest //= k
    first = np.zeros(size, dtype=np.int64)
    for j in range(w - 1):
        first += hx[row[:, j], row[:, j + 1]]
    if o < w:
        first += hloc[row[:, o]]

    def step_cost(p: int, spin: int) -> np.ndarray:
        """Cost of placing `spin` at site p for every window state before p."""
        c = hy[oldest, spin].copy()
        if p % w:
            c += hx[newest, spin]
        if p == o:
            c += hloc[spin]
        return c

    # backward cost-to-go: go[p][state after site p]
    go = [None] * cells
    go[cells - 1] = np.zeros(size, dtype=np.int64)
    for p in range(cells - 2, w - 2, -1):
        nxt = go[p + 1]
        best = np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
        base = (states % tail) * k
        for spin in range(k):
            cand = step_cost(p + 1, spin) + nxt[base + spin]
            np.minimum(best, cand, out=best)
        go[p] = best
    total = first + go[w - 1]
    emin = int(total.min())
    state = int(np.argmax(total == emin))
    config = [int(v) for v in row[state]]
    remaining = emin - int(first[state])
    for p in range(w, cells):
        base = (state % tail) * k
        for spin in range(k):
            c = int(step_cost(p, spin)[state])
            if c + int(go[p][base + spin]) == remaining:
                config.append(spin)
                remaining -= c
                state = base + spin
                break
    return emin, tuple(config)


def _min_energy_bnb(
    model: SpinModel, n: int, budget=None, upper: int | None = None
) -> tuple[int, tuple[int, ...]] | None:
    """Depth-first branch and bound with an incumbent, row-major, ascending spins.

    A partial assignment survives while its partial energy plus a lower bound
    stays below the incumbent. The bound is the larger of two admissible ones:
    the exact rest of the current row given the row below plus every later row
    on its own, and the split of H into independent row chains (horizontal and
    local terms) and column chains (vertical terms). With zero slack the rest
    must cost nothing, which arc consistency checks. The incumbent only moves
    on strict improvement, so the first minimizer met in lexicographic order
    is returned. The cost-to-go of the rows above a completed row depends only
    on that row, so it is memoized as an exact value with its lexicographically
    smallest completion, or as a proven lower bound. With `upper` set, None
    means E_min > upper.
    """
    budget = as_budget(budget)
    w = side(n)
    cells = w * w
    k = model.k
    o = origin_index(n)
    hx, hy, hloc = model.hx, model.hy, model.hloc
    zero_right = [sum(1 << b for b in range(k) if hx[a][b] == 0) for a in range(k)]
    zero_up = [sum(1 << b for b in range(k) if hy[a][b] == 0) for a in range(k)]
    zero_left = [sum(1 << a for a in range(k) if hx[a][b] == 0) for b in range(k)]
    zero_down = [sum(1 << a for a in range(k) if hy[a][b] == 0) for b in range(k)]
    comp = _Compat.__new__(_Compat)
    comp.k, comp.full = k, (1 << k) - 1
    comp.right, comp.up, comp.left, comp.down = zero_right, zero_up, zero_left, zero_down
    nbrs = _neighbors(n)
    zero_loc = sum(1 << s for s in range(k) if hloc[s] == 0)

    def local(p: int, s: int, cfg: list[int]) -> int:
        c = hloc[s] if p == o else 0
        if p % w:
            c += hx[cfg[p - 1]][s]
        if p >= w:
            c += hy[cfg[p - w]][s]
        return c

    def chain_min(y: int, x0: int, left: int | None, cfg: list[int]) -> int:
        """Exact minimum of row y from column x0 on, given the left neighbor and the row below.

        Vertical terms to rows above y are dropped (they are >= 0).
        """
        best = None
        for x in range(x0, w):
            q = y * w + x
            unary = [
                (hloc[s] if q == o else 0) + (hy[cfg[q - w]][s] if y > 0 and q - w < len(cfg) else 0)
                for s in range(k)
            ]
            if best is None:
                best = [unary[s] + (hx[left][s] if left is not None else 0) for s in range(k)]
            else:
                best = [unary[s] + min(best[a] + hx[a][s] for a in range(k)) for s in range(k)]
        return min(best) if best is not None else 0

    def unary(q: int, s: int) -> int:
        return hloc[s] if q == o else 0

    def strip_min(y: int) -> int:
        """Exact minimum of rows y and y+1 on their own, vertical terms between them included."""
        pairs = [(a, b) for a in range(k) for b in range(k)]
        best = {(a, b): unary(y * w, a) + unary((y + 1) * w, b) + hy[a][b] for a, b in pairs}
        for x in range(1, w):
            best = {
                (c, d): unary(y * w + x, c) + unary((y + 1) * w + x, d) + hy[c][d]
                + min(v + hx[a][c] + hx[b][d] for (a, b), v in best.items())
                for c, d in pairs
            }
        return min(best.values())

    # rows_after[y]: bound for rows y.. taken as disjoint two-row strips (a last odd row alone)
    rows_after = [0] * (w + 1)
    for y in range(w - 1, -1, -1):
        if y == w - 1:
            rows_after[y] = chain_min(y, 0, None, [])
        else:
            rows_after[y] = strip_min(y) + rows_after[y + 2]

    # a spin interchangeable with a smaller one never appears in the lexicographically
    # smallest minimizer, so only the smallest spin of each class is tried
    def signature(s: int) -> tuple:
        return (hx[s], tuple(r[s] for r in hx), hy[s], tuple(r[s] for r in hy), hloc[s])

    seen: set[tuple] = set()
    spins = []
    for s in range(k):
        if signature(s) not in seen:
            seen.add(signature(s))
            spins.append(s)

    # H splits into (horizontal + local) and vertical parts, each of which is a sum of
    # independent chains: rows for the first, columns for the second.
    def row_tail(y: int) -> list[list[int]]:
        """tail[x][s]: min horizontal+local cost of cells x+1.. of row y given cell x has spin s."""
        loc = lambda x, s: hloc[s] if y * w + x == o else 0  # noqa: E731
        tail = [[0] * k for _ in range(w)]
        for x in range(w - 2, -1, -1):
            tail[x] = [min(hx[s][t] + loc(x + 1, t) + tail[x + 1][t] for t in range(k)) for s in range(k)]
        return [[loc(x, s) + tail[x][s] for s in range(k)] for x in range(w)]

    row_tails = {y: row_tail(y) for y in {0, n}}

    def hrow(y: int, x0: int, left: int | None) -> int:
        if x0 >= w:
            return 0
        t = row_tails[n if y == n else 0][x0]
        return min((hx[left][s] if left is not None else 0) + t[s] for s in range(k))

    hrows_after = [0] * (w + 1)
    for y in range(w - 1, -1, -1):
        hrows_after[y] = hrows_after[y + 1] + hrow(y, 0, None)
    col_tail = [[0] * k for _ in range(w)]
    for y in range(w - 2, -1, -1):
        col_tail[y] = [min(hy[s][t] + col_tail[y + 1][t] for t in range(k)) for s in range(k)]

    def vcol(y0: int, prev: int | None) -> int:
        if y0 >= w:
            return 0
        return min((hy[prev][s] if prev is not None else 0) + col_tail[y0][s] for s in range(k))

    def lower_bound(p: int, cfg: list[int]) -> int:
        if p >= cells:
            return 0
        y, x = divmod(p, w)
        left = cfg[p - 1] if x else None
        coupled = chain_min(y, x, left, cfg) + rows_after[y + 1]
        split = hrow(y, x, left) + hrows_after[y + 1]
        for cx in range(w):
            if cx < x:
                split += vcol(y + 1, cfg[y * w + cx])
            else:
                split += vcol(y, cfg[(y - 1) * w + cx] if y else None)
        return max(coupled, split)

    def zero_completion_possible(p: int, cfg: list[int]) -> bool:
        doms = [1 << cfg[q] if q < p else comp.full for q in range(cells)]
        if o >= p:
            doms[o] &= zero_loc
            if not doms[o]:
                return False
        return _ac3(doms, deque(range(cells)), comp, nbrs, frozen=p)

    # incumbent: greedy cell-by-cell choice; the search looks for energy <= best - 1
    greedy: list[int] = []
    for q in range(cells):
        greedy.append(min(range(k), key=lambda s: local(q, s, greedy)))
    best = energy(model, n, greedy) + 1
    if upper is not None:
        best = min(best, upper + 1)
    cfg: list[int] = []
    memo: dict[tuple, list] = {}  # (y, row y-1) -> [proven lower bound, exact value or None, completion]

    def rows_from(y: int, limit: int) -> tuple[int, tuple[int, ...] | None]:
        """Cost-to-go of rows y.. given the assigned prefix: (exact, completion) if below limit, else (bound, None)."""
        if y == w:
            return 0, ()
        key = (y, tuple(cfg[(y - 1) * w : y * w]))
        entry = memo.setdefault(key, [0, None, None])
        if entry[1] is not None:
            return (entry[1], entry[2]) if entry[1] < limit else (entry[1], None)
        if entry[0] >= limit:
            return entry[0], None
        best, completion = limit, None

        def row(x: int, spent: int) -> None:
            nonlocal best, completion
            p = y * w + x
            if x == w:
                value, tail = rows_from(y + 1, best - spent)
                if tail is not None:
                    best, completion = spent + value, tuple(cfg[y * w :]) + tail
                return
            if spent == best - 1 and not zero_completion_possible(p, cfg):
                return
            for s in spins:
                budget.tick()
                c = spent + local(p, s, cfg)
                if c >= best:
                    continue
                cfg.append(s)
                if c + lower_bound(p + 1, cfg) < best:
                    row(x + 1, c)
                cfg.pop()

        row(0, 0)
        if completion is None:
            entry[0] = max(entry[0], limit)
            return entry[0], None
        entry[1], entry[2] = best, completion
        return best, completion

    value, found = rows_from(0, best)
    if found is None:
        return None  # only reachable with an explicit upper cap
    return value, found


def min_energy(model: SpinModel, n: int, method: str = "auto", budget=None) -> tuple[int, tuple[int, ...]]:
    """Exact E_min(H_n) and its lexicographically smallest minimizer (0-based spins)."""
    if n < 0:
        raise InvalidInstance("n must be non-negative")
    w = side(n)
    if method == "auto":
        if model.k ** (w * w) <= EXHAUSTIVE_LIMIT:
            method = "exhaustive"
        elif model.k**w <= TRANSFER_LIMIT:
            method = "transfer"
        else:
            method = "bnb"
    if method == "exhaustive":
        return _min_energy_exhaustive(model, n)
    if method == "transfer":
        return _min_energy_transfer(model, n)
    if method == "bnb":
        return _min_energy_bnb(model, n, budget)  # type: ignore[return-value]
    raise InvalidInstance(f"unknown method {method!r}")


def min_energy_at_most(
    model: SpinModel, n: int, upper: int, budget=None
) -> tuple[int, tuple[int, ...]] | None:
    """Branch and bound restricted to energies <= upper; None if E_min(H_n) > upper."""
    if n < 0:
        raise InvalidInstance("n must be non-negative")
    if upper < 0:
        return None
    return _min_energy_bnb(model, n, budget, upper)


def zero_energy_config(model: SpinModel, n: int, budget=None) -> tuple[int, ...] | None:
    """Lexicographically smallest configuration of energy 0, if any."""
    k = model.k
    comp = _Compat.__new__(_Compat)
    comp.k, comp.full = k, (1 << k) - 1
    comp.right = [sum(1 << b for b in range(k) if model.hx[a][b] == 0) for a in range(k)]
    comp.up = [sum(1 << b for b in range(k) if model.hy[a][b] == 0) for a in range(k)]
    comp.left = [sum(1 << a for a in range(k) if model.hx[a][b] == 0) for b in range(k)]
    comp.down = [sum(1 << a for a in range(k) if model.hy[a][b] == 0) for b in range(k)]
    return _solve_zero(comp, model, n, budget)


def _solve_zero(comp: _Compat, model: SpinModel, n: int, budget) -> tuple[int, ...] | None:
    budget = as_budget(budget)
    cells = side(n) ** 2
    nbrs = _neighbors(n)
    doms = [comp.full] * cells
    o = origin_index(n)
    doms[o] &= sum(1 << s for s in range(model.k) if model.hloc[s] == 0)
    if not doms[o] or not _ac3(doms, deque(range(cells)), comp, nbrs):
        return None

    def rec(p: int, doms: list[int]) -> list[int] | None:
        while p < cells and doms[p] & (doms[p] - 1) == 0:
            p += 1
        if p == cells:
            return doms
        dom = doms[p]
        while dom:
            low = dom & -dom
            dom ^= low
            budget.tick()
            trial = doms.copy()
            trial[p] = low
            if _ac3(trial, deque([p]), comp, nbrs):
                hit = rec(p + 1, trial)
                if hit is not None:
                    return hit
        return None

    found = rec(0, doms)
    return None if found is None else tuple(d.bit_length() - 1 for d in found)


def solve_bgse(model: SpinModel, n: int, E: int | Fraction, budget=None) -> tuple[bool, tuple[int, ...] | None]:
    """Is E_min(H_n) > E? On "no" also returns a configuration with energy <= E."""
    E = Fraction(E)
    if E < 0:
        return True, None
    if E < 1:
        cfg = zero_energy_config(model, n, budget)
        return (cfg is None), cfg
    emin, cfg = min_energy(model, n, budget=budget)
    return (emin > E), (None if emin > E else cfg)


def config_from_tiling(assignment: Sequence[int]) -> tuple[int, ...]:
    """The spin configuration of a tiling: spin = tile."""
    return tuple(assignment)


# --- JSON ------------------------------------------------------------------------------

def tileset_to_json(ts: TileSet) -> dict:
    out = {
        "palette": list(ts.palette),
        "tiles": [{"N": t.N, "E": t.E, "S": t.S, "W": t.W} for t in ts.tiles],
    }
    if ts.families:
        out["families"] = list(ts.families)
    return out


def tileset_from_json(data: dict) -> TileSet:
    try:
        tiles = tuple(WangTile(t["N"], t["E"], t["S"], t["W"]) for t in data["tiles"])
        fams = tuple(data["families"]) if "families" in data else None
        palette = tuple(data["palette"]) if "palette" in data else TileSet.of(*tiles).palette
        return TileSet(palette, tiles, fams)
    except (KeyError, TypeError) as exc:
        raise InvalidInstance(f"malformed tile set: {exc}") from exc


def model_to_json(model: SpinModel) -> dict:
    return {"hx": [list(r) for r in model.hx], "hy": [list(r) for r in model.hy], "hloc": list(model.hloc)}


def model_from_json(data: dict) -> SpinModel:
    try:
        return SpinModel(
            tuple(tuple(int(v) for v in r) for r in data["hx"]),
            tuple(tuple(int(v) for v in r) for r in data["hy"]),
            tuple(int(v) for v in data["hloc"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed spin model: {exc}") from exc
