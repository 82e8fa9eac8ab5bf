"""Bounded versions of decision problems and threshold-carrying reductions.

A bounded instance is a pair (x, n). The bound n is stored as an ordinary
integer but is meant with unary size semantics, i.e. the instance is as large
as n itself. A reduction arrow carries an instance map R and a strictly
increasing polynomial p, and lifts (x, n) to (R(x), p(n)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .core import (
    NOT_FOUND,
    ChainMismatch,
    InvalidInstance,
    NotFoundWithinHorizon,
    ProblemMismatch,
    UnregisteredProblem,
)


@dataclass(frozen=True)
class ThresholdPolynomial:
    """Polynomial with non-negative integer coefficients, constant term first."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        if any(c < 0 for c in coeffs):
            raise InvalidInstance("threshold coefficients must be non-negative")
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not any(c > 0 for c in coeffs[1:]):
            raise InvalidInstance("threshold polynomial needs a positive non-constant coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def of(cls, *coefficients: int) -> ThresholdPolynomial:
        return cls(tuple(coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, n: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * n + c
        return acc

    def after(self, inner: ThresholdPolynomial) -> ThresholdPolynomial:
        """Return self(inner(n)) with exact coefficients (Horner on coefficient lists)."""
        acc: list[int] = [0]
        for c in reversed(self.coefficients):
            acc = _poly_add(_poly_mul(acc, list(inner.coefficients)), [c])
        return ThresholdPolynomial(tuple(acc))

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "n" if k == 1 else f"n^{k}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(reversed(terms))


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


IDENTITY = ThresholdPolynomial((0, 1))


@dataclass(frozen=True)
class BoundedInstance:
    problem: str
    payload: Any
    bound: int

    def __post_init__(self) -> None:
        if not isinstance(self.bound, int) or self.bound < 0:
            raise InvalidInstance(f"bound must be a natural number, got {self.bound!r}")


@dataclass(frozen=True)
class ReductionArrow:
    source: str
    target: str
    map_id: str
    instance_map: Callable[[Any], Any] = field(compare=False)
    threshold: ThresholdPolynomial

    def __call__(self, payload: Any) -> Any:
        return self.instance_map(payload)


@dataclass(frozen=True)
class ProblemEntry:
    """Registry binding of a bounded problem.

    ``solve(payload, n)`` returns ``(accepted, certificate)``. The certificate
    certifies the ``certificate_side`` answer ("yes" for NP-style problems
    such as BPCP, "no" for coNP-style problems such as BTILE) and is None on
    the other side. ``verify(payload, certificate)`` rechecks a certificate
    from scratch and returns the size it certifies (e.g. a match length), or
    None when it is invalid.
    """

    id: str
    certificate_kind: str
    solve: Callable[[Any, int], tuple[bool, Any]]
    verify: Callable[[Any, Any], Any]
    certificate_side: str = "yes"
    fast_min_threshold: Callable[[Any, int], Any] | None = None


class Registry:
    def __init__(self) -> None:
        self.problems: dict[str, ProblemEntry] = {}
        self.arrows: dict[tuple[str, str], ReductionArrow] = {}

    def add_problem(self, entry: ProblemEntry) -> None:
        self.problems[entry.id] = entry

    def add_arrow(self, arrow: ReductionArrow) -> None:
        for pid in (arrow.source, arrow.target):
            if pid not in self.problems:
                raise UnregisteredProblem(pid)
        self.arrows[(arrow.source, arrow.target)] = arrow

    def problem(self, pid: str) -> ProblemEntry:
        try:
            return self.problems[pid]
        except KeyError:
            raise UnregisteredProblem(f"no problem registered under {pid!r}") from None

    def path(self, source: str, target: str) -> list[ReductionArrow]:
        """Shortest arrow chain from source to target (BFS over the reduction tree)."""
        self.problem(source)
        self.problem(target)
        if source == target:
            return []
        prev: dict[str, ReductionArrow] = {}
        frontier = [source]
        seen = {source}
        while frontier:
            nxt = []
            for node in frontier:
                for (s, t), arrow in sorted(self.arrows.items()):
                    if s == node and t not in seen:
                        seen.add(t)
                        prev[t] = arrow
                        nxt.append(t)
            frontier = nxt
        if target not in prev:
            raise ChainMismatch(f"no reduction chain from {source} to {target}")
        chain = []
        node = target
        while node != source:
            arrow = prev[node]
            chain.append(arrow)
            node = arrow.source
        return chain[::-1]

    def chain_arrow(self, source: str, target: str) -> ReductionArrow:
        arrows = self.path(source, target)
        if not arrows:
            raise ChainMismatch(f"{source} to itself is not a reduction")
        out = arrows[0]
        for a in arrows[1:]:
            out = compose(out, a)
        return out

    def manifest(self) -> dict:
        return {
            "schema": "registry/1",
            "problems": [
                {"id": p.id, "certificate-kind": p.certificate_kind}
                for p in self.problems.values()
            ],
            "arrows": [
                {
                    "source": a.source,
                    "target": a.target,
                    "map-id": a.map_id,
                    "polynomial": list(a.threshold.coefficients),
                }
                for a in self.arrows.values()
            ],
        }

    def manifest_json(self) -> str:
        return json.dumps(self.manifest(), indent=2, ensure_ascii=False)


def lift(arrow: ReductionArrow, inst: BoundedInstance) -> BoundedInstance:
    if inst.problem != arrow.source:
        raise ProblemMismatch(
            f"arrow {arrow.map_id} expects {arrow.source}, got {inst.problem}"
        )
    return BoundedInstance(arrow.target, arrow(inst.payload), arrow.threshold(inst.bound))


def compose(a1: ReductionArrow, a2: ReductionArrow) -> ReductionArrow:
    """Arrow for a2 after a1: instance map a2∘a1 and threshold p2∘p1."""
    if a1.target != a2.source:
        raise ChainMismatch(f"cannot chain {a1.source}->{a1.target} with {a2.source}->{a2.target}")
    f, g = a1.instance_map, a2.instance_map
    return ReductionArrow(
        source=a1.source,
        target=a2.target,
        map_id=f"{a1.map_id}|{a2.map_id}",
        instance_map=lambda x: g(f(x)),
        threshold=a2.threshold.after(a1.threshold),
    )


def _accepted(entry: ProblemEntry, payload: Any, n: int) -> bool:
    return bool(entry.solve(payload, n)[0])


def min_threshold(
    registry: Registry, problem_id: str, payload: Any, horizon: int
) -> int | NotFoundWithinHorizon:
    """Smallest n <= horizon with (x, n) accepted, else NOT_FOUND.

    NOT_FOUND says nothing about bounds beyond the horizon.
    """
    if horizon < 0:
        raise InvalidInstance("horizon must be non-negative")
    entry = registry.problem(problem_id)
    if entry.fast_min_threshold is not None:
        return entry.fast_min_threshold(payload, horizon)
    for n in range(horizon + 1):
        if _accepted(entry, payload, n):
            return n
    return NOT_FOUND


@dataclass
class AxiomReport:
    problem: str
    horizon: int
    accepted: list[bool]
    violation: int | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None


def check_bounded_axioms(
    registry: Registry, problem_id: str, payload: Any, horizon: int
) -> AxiomReport:
    """Check that acceptance is monotone in n on [0, horizon].

    ``violation`` is the first n with accepted(n) and not accepted(n+1).
    """
    entry = registry.problem(problem_id)
    verdicts = [_accepted(entry, payload, n) for n in range(horizon + 1)]
    report = AxiomReport(problem_id, horizon, verdicts)
    for n in range(horizon):
        if verdicts[n] and not verdicts[n + 1]:
            report.violation = n
            break
    return report


def first_true(flags: Iterable[bool]) -> int | NotFoundWithinHorizon:
    for n, flag in enumerate(flags):
        if flag:
            return n
    return NOT_FOUND
