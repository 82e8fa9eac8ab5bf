"""Exact integer matrix semigroups: base-3 word encodings, the reductions
PCP -> ZULC -> MM, and bounded solvers for corner-zero and mortality.

Matrices are tuples of rows of Python ints (or Fractions before clearing).
A product witness lists 1-based factor indices, and its length is the number
of factors.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .core import NOT_FOUND, Budget, IndexOutOfRange, InvalidInstance, NotFoundWithinHorizon, as_budget
from .pcp import PCPInstance

Matrix = tuple[tuple[int, ...], ...]


def matrix(rows: Sequence[Sequence[int | Fraction]]) -> Matrix:
    m = tuple(tuple(r) for r in rows)
    if not m or any(len(r) != len(m) for r in m):
        raise InvalidInstance("matrices must be square and non-empty")
    return m


def identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def zeros(d: int) -> Matrix:
    return tuple((0,) * d for _ in range(d))


def unit(d: int, i: int = 0, j: int = 0) -> Matrix:
    """Matrix with a single 1 at (i, j), 0-based."""
    return tuple(tuple(int((r, c) == (i, j)) for c in range(d)) for r in range(d))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def vecmat(v: Sequence[int], b: Matrix) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(v, col)) for col in zip(*b))


def product(mats: Sequence[Matrix], indices: Sequence[int]) -> Matrix:
    if not indices:
        raise InvalidInstance("a product needs at least one factor")
    out = None
    for i in indices:
        if not isinstance(i, int) or not 1 <= i <= len(mats):
            raise IndexOutOfRange(f"factor index {i!r} not in [1, {len(mats)}]")
        out = mats[i - 1] if out is None else matmul(out, mats[i - 1])
    return out


def det(a: Matrix) -> int | Fraction:
    """Exact determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(a)
    if any(isinstance(x, Fraction) for row in a for x in row):
        scale = common_denominator(a)
        return Fraction(det(clear_denominators(a)), scale**n)
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def common_denominator(a: Matrix) -> int:
    den = 1
    for row in a:
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def scale_matrix(a: Matrix, c: int | Fraction) -> Matrix:
    return tuple(tuple(x * c for x in row) for row in a)


def is_integral(a: Matrix) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for row in a for x in row)


def clear_denominators(a: Matrix) -> Matrix:
    """Multiply by the positive common denominator; the result has int entries.

    Zero corners, zero products and trace signs are all invariant under this.
    """
    c = common_denominator(a)
    return tuple(tuple(int(x * c) for x in row) for row in a)


def check_family(mats: Sequence[Matrix]) -> tuple[Matrix, ...]:
    mats = tuple(matrix(m) for m in mats)
    if not mats:
        raise InvalidInstance("a matrix family must be non-empty")
    d = len(mats[0])
    if any(len(m) != d for m in mats):
        raise InvalidInstance("all matrices of a family must have the same dimension")
    return mats


# --- base-3 encodings ------------------------------------------------------------

def _digits(w: str | Sequence[int]) -> list[int]:
    out = []
    for c in w:
        v = int(c) if isinstance(c, str) and c.isdigit() else c
        if v not in (0, 1, 2):
            raise InvalidInstance(f"digit {c!r} is not in {{0, 1, 2}}")
        out.append(v)
    return out


def sigma(w: str | Sequence[int]) -> int:
    """Value of w read as a base-3 numeral (sigma of the empty word is 0)."""
    acc = 0
    for v in _digits(w):
        acc = 3 * acc + v
    return acc


def gamma(w1: str | Sequence[int], w2: str | Sequence[int]) -> Matrix:
    d1, d2 = _digits(w1), _digits(w2)
    return (
        (3 ** len(d1), 0, 0),
        (0, 3 ** len(d2), 0),
        (sigma(d1), sigma(d2), 1),
    )


X = ((1, 0, 1), (1, 1, 0), (0, 0, 1))
X_INV = ((1, 0, -1), (-1, 1, 1), (0, 0, 1))


def conjugate(g: Matrix) -> Matrix:
    return matmul(matmul(X, g), X_INV)


def letter_codes(alphabet: Sequence[str]) -> dict[str, str]:
    """Fixed-width codes over {1, 2}, each starting with the digit 2."""
    m = len(alphabet)
    width = max(0, (m - 1).bit_length())
    codes = {}
    for j, s in enumerate(alphabet):
        bits = format(j, f"0{width}b") if width else ""
        codes[s] = "2" + bits.replace("1", "2").replace("0", "1")
    return codes


def recode(inst: PCPInstance) -> list[tuple[str, str]]:
    codes = letter_codes(inst.alphabet)
    return [
        ("".join(codes[s] for s in d.top), "".join(codes[s] for s in d.bottom))
        for d in inst.dominoes
    ]


MARKER = "1"


def reduce_pcp_to_zulc(inst: PCPInstance) -> tuple[Matrix, ...]:
    """Family A_1..A_k, B_1..B_k of invertible 3x3 integer matrices.

    A_i = X gamma(a_i, b_i) X^-1 and B_i = X gamma(a_i, "1" b_i) X^-1 after the
    letters are recoded as fixed-width codes over {1, 2} starting with 2. The
    (1,1) entry of X gamma(u, v) X^-1 is sigma("1" u) - sigma(v), so a product
    has a zero corner iff exactly its first factor is a B and the underlying
    index sequence is a match. Minimal match length and minimal corner-zero
    factor count coincide.
    """
    words = recode(inst)
    a_mats = [conjugate(gamma(a, b)) for a, b in words]
    b_mats = [conjugate(gamma(a, MARKER + b)) for a, b in words]
    return tuple(a_mats + b_mats)


def zulc_witness_to_match(k: int, witness: Sequence[int]) -> tuple[int, ...]:
    """Map a corner-zero witness of the reduced family back to domino indices."""
    return tuple(i if i <= k else i - k for i in witness)


# --- solvers ---------------------------------------------------------------------

def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(v)
    lead = next(x for x in v if x)
    if lead < 0:
        g = -g
    return tuple(x // g for x in v)


def _integral_family(mats: Sequence[Matrix]) -> list[Matrix]:
    return [m if all(isinstance(x, int) for r in m for x in r) else clear_denominators(m) for m in check_family(mats)]


def solve_bzulc(
    mats: Sequence[Matrix], n: int, budget: Budget | int | None = None
) -> tuple[int, ...] | None:
    """Minimal, then lexicographically smallest, product of <= n factors with (1,1) entry 0.

    BFS over the first row of the running product, normalized up to a non-zero
    scalar. That row determines every later corner up to the same scalar, so
    first-visit dedup on it preserves minimality and lexicographic order.
    """
    budget = as_budget(budget)
    fam = _integral_family(mats)
    rows0 = [_primitive(m[0]) for m in fam]
    layer: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    seen: set[tuple[int, ...]] = set()
    if n < 1:
        return None
    for i, r in enumerate(rows0, start=1):
        budget.tick()
        if r[0] == 0:
            return (i,)
        if r not in seen:
            seen.add(r)
            layer.append((r, (i,)))
    for _ in range(n - 1):
        nxt = []
        for r, path in layer:
            for i, m in enumerate(fam, start=1):
                budget.tick()
                v = _primitive(vecmat(r, m))
                if v[0] == 0:
                    return path + (i,)
                if v not in seen:
                    seen.add(v)
                    nxt.append((v, path + (i,)))
        if not nxt:
            break
        layer = nxt
    return None


def reduce_zulc_to_mm(mats: Sequence[Matrix]) -> tuple[Matrix, ...]:
    """Append the idempotent E_11; requires every input matrix to be invertible."""
    fam = check_family(mats)
    for idx, m in enumerate(fam, start=1):
        if det(m) == 0:
            raise InvalidInstance(
                f"matrix {idx} is singular; the corner-zero to mortality reduction needs invertible matrices"
            )
    return fam + (unit(len(fam[0])),)


def _rref_basis(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical integer basis of the row space (reduced echelon form, primitive rows)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return ()
    ncols = len(m[0])
    piv_row = 0
    for col in range(ncols):
        pivot = next((r for r in range(piv_row, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[piv_row], m[pivot] = m[pivot], m[piv_row]
        p = m[piv_row][col]
        m[piv_row] = [x / p for x in m[piv_row]]
        for r in range(len(m)):
            if r != piv_row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[piv_row])]
        piv_row += 1
        if piv_row == len(m):
            break
    out = []
    for r in m[:piv_row]:
        den = 1
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append(_primitive([int(x * den) for x in r]))
    return tuple(out)


def solve_bmm(
    mats: Sequence[Matrix], n: int, budget: Budget | int | None = None
) -> tuple[int, ...] | None:
    """Minimal, then lexicographically smallest, zero product of <= n factors.

    BFS over the row space of the running product. P S = 0 depends only on the
    row space of P, and the row space of P M is that of P mapped by M, so
    first-visit dedup on canonical row-space bases is sound.
    """
    budget = as_budget(budget)
    fam = _integral_family(mats)
    if n < 1:
        return None
    layer: list[tuple[tuple, tuple[int, ...]]] = []
    seen: set[tuple] = set()
    for i, m in enumerate(fam, start=1):
        budget.tick()
        basis = _rref_basis(m)
        if not basis:
            return (i,)
        if basis not in seen:
            seen.add(basis)
            layer.append((basis, (i,)))
    for _ in range(n - 1):
        nxt = []
        for basis, path in layer:
            for i, m in enumerate(fam, start=1):
                budget.tick()
                img = _rref_basis([vecmat(r, m) for r in basis])
                if not img:
                    return path + (i,)
                if img not in seen:
                    seen.add(img)
                    nxt.append((img, path + (i,)))
        if not nxt:
            break
        layer = nxt
    return None


def verify_zulc(mats: Sequence[Matrix], witness: Sequence[int]) -> int | None:
    """Factor count of a valid corner-zero witness, else None."""
    try:
        p = product(check_family(mats), witness)
    except (IndexOutOfRange, InvalidInstance):
        return None
    return len(witness) if p[0][0] == 0 else None


def verify_mm(mats: Sequence[Matrix], witness: Sequence[int]) -> int | None:
    try:
        p = product(check_family(mats), witness)
    except (IndexOutOfRange, InvalidInstance):
        return None
    return len(witness) if all(x == 0 for row in p for x in row) else None


def min_factor_count(solver, mats, horizon: int, budget=None) -> int | NotFoundWithinHorizon:
    w = solver(mats, horizon, budget)
    return NOT_FOUND if w is None else len(w)


# --- JSON -------------------------------------------------------------------------

def _entry_json(x: int | Fraction) -> str:
    return str(x)


def _entry_from(x) -> int | Fraction:
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    if isinstance(x, str):
        v = Fraction(x)
        return int(v) if v.denominator == 1 else v
    raise InvalidInstance(f"matrix entries must be decimal strings, got {x!r}")


def family_to_json(mats: Sequence[Matrix], kind: str | None = None) -> dict:
    mats = check_family(mats)
    out = {"dim": len(mats[0]), "matrices": [[[_entry_json(x) for x in r] for r in m] for m in mats]}
    if kind:
        out["kind"] = kind
    return out


def family_from_json(data: dict) -> tuple[Matrix, ...]:
    try:
        mats = check_family([tuple(tuple(_entry_from(x) for x in r) for r in m) for m in data["matrices"]])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidInstance(f"malformed matrix family: {exc}") from exc
    if "dim" in data and data["dim"] != len(mats[0]):
        raise InvalidInstance("declared dim does not match the matrices")
    return mats
