"""Diagonal matrix product operators and their onward reductions.

The diagonal operator rho_n(B) has one entry tr(B_{i_1} ... B_{i_n}) per
index tuple. It is positive semidefinite iff all those traces are >= 0.
From a family B this module builds:

* a family of sum-of-squares polynomials q_{ab}(x) = sum_j (B_j)_{ab} x_j^2,
* a positive map specified by reshuffled matrices C_i, whose tensor powers
  evaluated on the matrix multiplication state chi_n reproduce rho_n(B).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import NOT_FOUND, Budget, IndexOutOfRange, InvalidInstance, NotFoundWithinHorizon, as_budget
from .matsem import Matrix, check_family, is_integral, matmul, unit, zeros

Number = int | Fraction


def _check_indices(k: int, idx: Sequence[int]) -> None:
    if not idx:
        raise InvalidInstance("an index tuple needs at least one entry")
    for i in idx:
        if not isinstance(i, int) or not 1 <= i <= k:
            raise IndexOutOfRange(f"index {i!r} not in [1, {k}]")


def trace(a: Matrix) -> Number:
    return sum(a[i][i] for i in range(len(a)))


def rho_entry(fam: Sequence[Matrix], idx: Sequence[int]) -> Number:
    """Exact trace of B_{i_1} ... B_{i_n}."""
    fam = check_family(fam)
    _check_indices(len(fam), idx)
    p = fam[idx[0] - 1]
    for i in idx[1:]:
        p = matmul(p, fam[i - 1])
    return trace(p)


def _trace_of_product(p: Matrix, b: Matrix) -> Number:
    d = len(p)
    return sum(p[i][j] * b[j][i] for i in range(d) for j in range(d))


def solve_bmpo(
    fam: Sequence[Matrix], n: int, budget: Budget | int | None = None
) -> tuple[int, ...] | None:
    """Minimal, then lexicographically smallest, tuple of length <= n with negative trace.

    Only necklaces (tuples that are their own smallest rotation) are evaluated:
    the smallest rotation of a negative tuple is negative too and is no larger,
    so the first negative necklace in lexicographic order is the answer. The
    necklaces are generated by the FKM prenecklace recursion, which prunes
    whole subtrees.
    """
    budget = as_budget(budget)
    fam = check_family(fam)
    k = len(fam)
    for length in range(1, n + 1):
        found = _necklace_search(fam, k, length, budget)
        if found is not None:
            return found
    return None


def _necklace_search(fam, k: int, length: int, budget: Budget) -> tuple[int, ...] | None:
    seq: list[int] = []

    def rec(prefix: Matrix | None, period: int) -> tuple[int, ...] | None:
        t = len(seq)
        if t == length - 1:
            # last position; candidates keep the prenecklace property
            lo = seq[t - period] if t else 0
            for c in range(lo, k):
                budget.tick()
                p = t + 1 if (t and c > seq[t - period]) else (period if t else 1)
                if length % p:
                    continue
                val = trace(fam[c]) if prefix is None else _trace_of_product(prefix, fam[c])
                if val < 0:
                    return tuple(x + 1 for x in seq) + (c + 1,)
            return None
        lo = seq[t - period] if t else 0
        for c in range(lo, k):
            budget.tick()
            p = t + 1 if (t and c > seq[t - period]) else (period if t else 1)
            seq.append(c)
            nxt = fam[c] if prefix is None else matmul(prefix, fam[c])
            hit = rec(nxt, p)
            seq.pop()
            if hit is not None:
                return hit
        return None

    return rec(None, 1)


def verify_mpo(fam: Sequence[Matrix], idx: Sequence[int]) -> int | None:
    try:
        return len(idx) if rho_entry(fam, idx) < 0 else None
    except (IndexOutOfRange, InvalidInstance):
        return None


def min_negative_length(fam, horizon: int, budget=None) -> int | NotFoundWithinHorizon:
    w = solve_bmpo(fam, horizon, budget)
    return NOT_FOUND if w is None else len(w)


def kron(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(a[i][j] * b[r][c] for j in range(len(a)) for c in range(len(b)))
        for i in range(len(a))
        for r in range(len(b))
    )


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    da, db = len(a), len(b)
    top = tuple(tuple(row) + (0,) * db for row in a)
    bottom = tuple((0,) * da + tuple(row) for row in b)
    return top + bottom


def reduce_zulc_to_mpo(mats: Sequence[Matrix]) -> tuple[Matrix, ...]:
    """B_i = blockdiag(A_i (x) A_i, 1) for each input, then B_{k+1} = blockdiag(E_11, -1).

    tr(B_{i_1} ... B_{i_l} B_{k+1}) = ((A_{i_1} ... A_{i_l})_{11})^2 - 1, which is
    negative iff the corner is zero, because the entries are integers.
    """
    fam = check_family(mats)
    if not all(is_integral(m) for m in fam):
        raise InvalidInstance("reduce_zulc_to_mpo needs integer matrices; clear denominators first")
    fam = tuple(tuple(tuple(int(x) for x in r) for r in m) for m in fam)
    d = len(fam[0])
    one, minus_one = ((1,),), ((-1,),)
    out = [block_diag(kron(a, a), one) for a in fam]
    out.append(block_diag(unit(d * d), minus_one))
    return tuple(out)


# --- polynomials ----------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialFamily:
    """q_{ab}(x) = sum_j coeff[a][b][j] * x_j^2 for a D x D grid and k variables."""

    D: int
    k: int
    coeff: tuple[tuple[tuple[Number, ...], ...], ...]

    def __post_init__(self) -> None:
        if len(self.coeff) != self.D or any(len(r) != self.D for r in self.coeff):
            raise InvalidInstance("coefficient grid must be D x D")
        if any(len(c) != self.k for r in self.coeff for c in r):
            raise InvalidInstance("every grid cell needs k coefficients")

    def q(self, a: int, b: int, x: Sequence[Number]) -> Number:
        return sum(c * xi * xi for c, xi in zip(self.coeff[a][b], x))


def reduce_mpo_to_poly(fam: Sequence[Matrix]) -> PolynomialFamily:
    fam = check_family(fam)
    d, k = len(fam[0]), len(fam)
    coeff = tuple(tuple(tuple(fam[j][a][b] for j in range(k)) for b in range(d)) for a in range(d))
    return PolynomialFamily(d, k, coeff)


def eval_pn(pf: PolynomialFamily, points: Sequence[Sequence[Number]]) -> Number:
    """p_n(x_1, ..., x_n) = sum over a_1..a_n of q_{a_1 a_2}(x_1) ... q_{a_n a_1}(x_n).

    Evaluated as the full cyclic contraction over all index tuples.
    """
    n = len(points)
    if n < 1:
        raise InvalidInstance("p_n needs at least one point")
    for x in points:
        if len(x) != pf.k:
            raise InvalidInstance(f"each point needs {pf.k} coordinates, got {len(x)}")
    qs = [[[pf.q(a, b, x) for b in range(pf.D)] for a in range(pf.D)] for x in points]
    total: Number = 0
    for alpha in itertools.product(range(pf.D), repeat=n):
        term: Number = 1
        for t in range(n):
            term *= qs[t][alpha[t]][alpha[(t + 1) % n]]
            if term == 0:
                break
        total += term
    return total


def basis_point(k: int, i: int) -> tuple[int, ...]:
    """Standard basis vector e_i (1-based) of length k."""
    return tuple(int(j == i - 1) for j in range(k))


def verify_poly(pf: PolynomialFamily, points: Sequence[Sequence[Number]]) -> int | None:
    """Number of points of a certificate point list with p_n < 0, else None."""
    try:
        return len(points) if eval_pn(pf, points) < 0 else None
    except InvalidInstance:
        return None


def solve_bpoly(pf: PolynomialFamily, n: int, budget=None) -> tuple[tuple[int, ...], ...] | None:
    """Smallest list of points (basis points first) with p_l < 0 for some l <= n.

    p_l is sum over index tuples of tr(B_{i_1}...B_{i_l}) prod_t (x_t)_{i_t}^2,
    so it takes a negative value iff it does at some tuple of basis points.
    """
    fam = poly_to_family(pf)
    w = solve_bmpo(fam, n, budget)
    if w is None:
        return None
    return tuple(basis_point(pf.k, i) for i in w)


def poly_to_family(pf: PolynomialFamily) -> tuple[Matrix, ...]:
    return tuple(
        tuple(tuple(pf.coeff[a][b][j] for b in range(pf.D)) for a in range(pf.D))
        for j in range(pf.k)
    )


# --- positive maps ----------------------------------------------------------------

@dataclass(frozen=True)
class PositiveMapSpec:
    """P(X) = sum_i |i><i| tr(C_i X) with C_i acting on C^s (x) C^s."""

    s: int
    C: tuple[Matrix, ...]


def _reshuffle(b: Matrix, s: int) -> Matrix:
    def entry(r: int, c: int) -> Number:
        a1, a2 = divmod(r, s)
        b1, b2 = divmod(c, s)
        return b[a1 * s + b1][a2 * s + b2]

    return tuple(tuple(entry(r, c) for c in range(s * s)) for r in range(s * s))


def reduce_mpo_to_stab(fam: Sequence[Matrix]) -> PositiveMapSpec:
    """(C_i)_{(a1,a2),(b1,b2)} = (B_i)_{(a1,b1),(a2,b2)} with local dimension s = sqrt(D)."""
    fam = check_family(fam)
    d = len(fam[0])
    s = math.isqrt(d)
    if s * s != d:
        raise InvalidInstance(f"dimension {d} is not a perfect square; apply pad_to_square first")
    return PositiveMapSpec(s, tuple(_reshuffle(b, s) for b in fam))


def stab_to_family(spec: PositiveMapSpec) -> tuple[Matrix, ...]:
    """Inverse reshuffle (the reshuffle is an involution)."""
    return tuple(_reshuffle(c, spec.s) for c in spec.C)


def pad_to_square(fam: Sequence[Matrix]) -> tuple[Matrix, ...]:
    fam = check_family(fam)
    d = len(fam[0])
    s = math.isqrt(d)
    target = d if s * s == d else (s + 1) ** 2
    if target == d:
        return fam
    pad = zeros(target - d)
    return tuple(block_diag(m, pad) for m in fam)


STAB_SIZE_LIMIT = 10**7


def chi_support(s: int, n: int) -> list[int]:
    """Basis indices of |chi_n> = sum_a |a_1 a_2> (x) |a_2 a_3> (x) ... (x) |a_n a_1>.

    Each index is a base-(s*s) numeral whose t-th digit is a_t * s + a_{t+1}.
    """
    dd = s * s
    out = []
    for alpha in itertools.product(range(s), repeat=n):
        idx = 0
        for t in range(n):
            idx = idx * dd + alpha[t] * s + alpha[(t + 1) % n]
        out.append(idx)
    return out


def _digits(idx: int, base: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        idx, r = divmod(idx, base)
        out.append(r)
    return out[::-1]


def stab_entry(spec: PositiveMapSpec, idx: Sequence[int]) -> Number:
    """<chi_n| C_{i_1} (x) ... (x) C_{i_n} |chi_n> by explicit summation over the support."""
    _check_indices(len(spec.C), idx)
    n = len(idx)
    dd = spec.s * spec.s
    support = [_digits(v, dd, n) for v in chi_support(spec.s, n)]
    mats = [spec.C[i - 1] for i in idx]
    total: Number = 0
    for u in support:
        for v in support:
            term: Number = 1
            for t in range(n):
                term *= mats[t][u[t]][v[t]]
                if term == 0:
                    break
            total += term
    return total


def apply_stab_diagonal(spec: PositiveMapSpec, n: int) -> list[Number]:
    """Diagonal of P^{(x)n}(chi_n), one entry per tuple in lexicographic order."""
    if n < 1:
        raise InvalidInstance("n must be at least 1")
    k = len(spec.C)
    work = (spec.s ** (2 * n)) * (k**n)
    if work > STAB_SIZE_LIMIT:
        raise InvalidInstance(f"chi_n evaluation would need {work} terms, above {STAB_SIZE_LIMIT}")
    return [stab_entry(spec, idx) for idx in itertools.product(range(1, k + 1), repeat=n)]


def verify_stab(spec: PositiveMapSpec, idx: Sequence[int]) -> int | None:
    try:
        return len(idx) if stab_entry(spec, idx) < 0 else None
    except (IndexOutOfRange, InvalidInstance):
        return None


def solve_bstab(spec: PositiveMapSpec, n: int, budget=None) -> tuple[int, ...] | None:
    return solve_bmpo(stab_to_family(spec), n, budget)


# --- JSON -----------------------------------------------------------------------------

def poly_to_json(pf: PolynomialFamily) -> dict:
    return {
        "D": pf.D,
        "k": pf.k,
        "coeff": [[[str(c) for c in cell] for cell in row] for row in pf.coeff],
    }


def poly_from_json(data: dict) -> PolynomialFamily:
    from .matsem import _entry_from

    try:
        coeff = tuple(tuple(tuple(_entry_from(c) for c in cell) for cell in row) for row in data["coeff"])
        return PolynomialFamily(int(data["D"]), int(data["k"]), coeff)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed polynomial family: {exc}") from exc


def stab_to_json(spec: PositiveMapSpec) -> dict:
    from .matsem import family_to_json

    out = family_to_json(spec.C, kind="stab")
    out["s"] = spec.s
    return out


def stab_from_json(data: dict) -> PositiveMapSpec:
    from .matsem import family_from_json

    mats = family_from_json(data)
    s = int(data.get("s", math.isqrt(len(mats[0]))))
    if s * s != len(mats[0]):
        raise InvalidInstance("s*s must equal the matrix dimension")
    return PositiveMapSpec(s, mats)
