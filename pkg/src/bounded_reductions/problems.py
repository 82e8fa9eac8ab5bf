"""Registry of the bounded problems and reduction arrows, and the chain report.

Problem ids: nhalt, nhalt-all, pcp, zulc, mm, mpo, poly, stab, tile, gse.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import matsem, mpo, pcp, tiling, turing
from .core import NOT_FOUND, Budget, BudgetExceeded, InvalidInstance, ReductionError
from .framework import ProblemEntry, ReductionArrow, Registry, ThresholdPolynomial

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class GSEInstance:
    model: tiling.SpinModel
    E: Fraction = Fraction(0)


# --- per-problem solve / verify ------------------------------------------------------

def _nhalt_solve(m, n, budget=None):
    ok, path = turing.halts_exists_within(m, n)
    return ok, (path.choices if ok else None)


def _nhalt_verify(m, cert, n) -> bool:
    length = turing.verify_halting_path(m, cert)
    return length is not None and length <= n


def _nhalt_min(m, horizon, budget=None):
    return turing.min_halting_time(m, horizon)


def _nhaltall_solve(m, n, budget=None):
    ok, path = turing.halts_all_within(m, n)
    return ok, (None if ok else path.choices)


def _nhaltall_verify(m, cert, n) -> bool:
    try:
        trace = turing.replay(m, cert)
    except InvalidInstance:
        return False
    last = trace[-1]
    if last.state in m.finals:
        return False
    stuck = not turing.successors(m, last)
    return stuck or len(trace) - 1 >= n


def _nhaltall_min(m, horizon, budget=None):
    d = turing.max_halting_time_all_paths(m, horizon)
    return NOT_FOUND if not isinstance(d, int) else d


def _witness_solver(solver):
    def solve(payload, n, budget=None):
        w = solver(payload, n, budget)
        return w is not None, w

    return solve


def _witness_min(solver):
    def fast(payload, horizon, budget=None):
        w = solver(payload, horizon, budget)
        return NOT_FOUND if w is None else len(w)

    return fast


def _length_verifier(check: Callable[[Any, Sequence], int | None]):
    def verify(payload, cert, n) -> bool:
        try:
            length = check(payload, tuple(cert))
        except ReductionError:
            return False
        return length is not None and 1 <= length <= n

    return verify


def _pcp_check(inst, cert):
    return len(cert) if pcp.verify_match(inst, cert) else None


def _poly_solve(pf, n, budget=None):
    pts = mpo.solve_bpoly(pf, n, budget)
    return pts is not None, pts


def _poly_verify(pf, cert, n) -> bool:
    points = [tuple(Fraction(x) for x in p) for p in cert]
    length = mpo.verify_poly(pf, points)
    return length is not None and 1 <= length <= n


def _poly_min(pf, horizon, budget=None):
    w = mpo.solve_bpoly(pf, horizon, budget)
    return NOT_FOUND if w is None else len(w)


def _tile_solve(ts, n, budget=None):
    a = tiling.solve_btile(ts, n, budget)
    return a is None, a


def _tile_verify(ts, cert, n) -> bool:
    try:
        return tiling.verify_tiling(ts, n, cert)[0]
    except InvalidInstance:
        return False


def _gse_solve(inst: GSEInstance, n, budget=None):
    return tiling.solve_bgse(inst.model, n, inst.E, budget)


def _gse_verify(inst: GSEInstance, cert, n) -> bool:
    try:
        return tiling.energy(inst.model, n, cert) <= inst.E
    except InvalidInstance:
        return False


def _tile_min_scan(solve):
    def fast(payload, horizon, budget=None):
        for n in range(horizon + 1):
            if solve(payload, n, budget)[0]:
                return n
        return NOT_FOUND

    return fast


# --- instance maps ----------------------------------------------------------------------

def _nhalt_to_pcp(m):
    return pcp.reduce_nhalt_to_pcp(m)


def _mpo_to_stab(fam):
    return mpo.reduce_mpo_to_stab(mpo.pad_to_square(fam))


def _tile_to_gse(ts):
    return GSEInstance(tiling.reduce_tile_to_gse(ts), Fraction(0))


ARROWS = [
    ("nhalt", "pcp", "reduce_nhalt_to_pcp", _nhalt_to_pcp, (2, 3, 1)),
    ("pcp", "zulc", "reduce_pcp_to_zulc", matsem.reduce_pcp_to_zulc, (0, 1)),
    ("zulc", "mm", "reduce_zulc_to_mm", matsem.reduce_zulc_to_mm, (2, 1)),
    ("zulc", "mpo", "reduce_zulc_to_mpo", mpo.reduce_zulc_to_mpo, (1, 1)),
    ("mpo", "poly", "reduce_mpo_to_poly", mpo.reduce_mpo_to_poly, (0, 1)),
    ("mpo", "stab", "reduce_mpo_to_stab", _mpo_to_stab, (0, 1)),
    ("nhalt-all", "tile", "reduce_nhaltall_to_tile", tiling.reduce_nhaltall_to_tile, (1, 1)),
    ("tile", "gse", "reduce_tile_to_gse", _tile_to_gse, (0, 1)),
]


def build_registry(budget: int | None = DEFAULT_BUDGET) -> Registry:
    """Registry whose solvers each get a fresh node budget of `budget` per call."""

    def b(fn):
        def run(payload, n):
            return fn(payload, n, Budget(budget))

        return run

    def bm(fn):
        def run(payload, horizon):
            return fn(payload, horizon, Budget(budget))

        return run

    reg = Registry()
    entries = [
        ("nhalt", "halting-path", _nhalt_solve, _nhalt_verify, "yes", _nhalt_min),
        ("nhalt-all", "non-halting-prefix", _nhaltall_solve, _nhaltall_verify, "no", _nhaltall_min),
        ("pcp", "match", _witness_solver(pcp.solve_bpcp), _length_verifier(_pcp_check), "yes",
         _witness_min(pcp.solve_bpcp)),
        ("zulc", "corner-zero-product", _witness_solver(matsem.solve_bzulc),
         _length_verifier(matsem.verify_zulc), "yes", _witness_min(matsem.solve_bzulc)),
        ("mm", "zero-product", _witness_solver(matsem.solve_bmm), _length_verifier(matsem.verify_mm),
         "yes", _witness_min(matsem.solve_bmm)),
        ("mpo", "negative-trace-tuple", _witness_solver(mpo.solve_bmpo),
         _length_verifier(mpo.verify_mpo), "yes", _witness_min(mpo.solve_bmpo)),
        ("poly", "negative-point-list", _poly_solve, _poly_verify, "yes", _poly_min),
        ("stab", "negative-chi-entry", _witness_solver(mpo.solve_bstab),
         _length_verifier(mpo.verify_stab), "yes", _witness_min(mpo.solve_bstab)),
        ("tile", "tiling", _tile_solve, _tile_verify, "no", _tile_min_scan(_tile_solve)),
        ("gse", "low-energy-config", _gse_solve, _gse_verify, "no", _tile_min_scan(_gse_solve)),
    ]
    for pid, kind, solve, verify, side, fast in entries:
        reg.add_problem(ProblemEntry(pid, kind, b(solve), verify, side, bm(fast)))
    for src, dst, name, fn, coeffs in ARROWS:
        reg.add_arrow(ReductionArrow(src, dst, name, fn, ThresholdPolynomial(coeffs)))
    return reg


ALIASES = {"b" + pid: pid for pid in ("nhalt", "nhalt-all", "pcp", "zulc", "mm", "mpo", "poly", "stab", "tile", "gse")}


def canonical_id(pid: str) -> str:
    pid = pid.lower().replace("_", "-")
    return ALIASES.get(pid, pid)


# --- payload and certificate codecs ------------------------------------------------------

def payload_to_json(pid: str, payload: Any) -> dict:
    if pid in ("nhalt", "nhalt-all"):
        return turing.ntm_to_json(payload)
    if pid == "pcp":
        return pcp.pcp_to_json(payload)
    if pid in ("zulc", "mm"):
        return matsem.family_to_json(payload)
    if pid == "mpo":
        return matsem.family_to_json(payload, kind="mpo")
    if pid == "poly":
        return mpo.poly_to_json(payload)
    if pid == "stab":
        return mpo.stab_to_json(payload)
    if pid == "tile":
        return tiling.tileset_to_json(payload)
    if pid == "gse":
        out = tiling.model_to_json(payload.model)
        out["E"] = str(payload.E)
        return out
    raise InvalidInstance(f"unknown problem {pid!r}")


def payload_from_json(pid: str, data: dict) -> Any:
    if pid in ("nhalt", "nhalt-all"):
        return turing.ntm_from_json(data)
    if pid == "pcp":
        return pcp.pcp_from_json(data)
    if pid in ("zulc", "mm", "mpo"):
        return matsem.family_from_json(data)
    if pid == "poly":
        return mpo.poly_from_json(data)
    if pid == "stab":
        return mpo.stab_from_json(data)
    if pid == "tile":
        return tiling.tileset_from_json(data)
    if pid == "gse":
        return GSEInstance(tiling.model_from_json(data), Fraction(str(data.get("E", "0"))))
    raise InvalidInstance(f"unknown problem {pid!r}")


CERT_FIELDS = {
    "nhalt": "choices",
    "nhalt-all": "choices",
    "pcp": "indices",
    "zulc": "indices",
    "mm": "indices",
    "mpo": "indices",
    "stab": "indices",
    "poly": "points",
    "tile": "tiling",
    "gse": "config",
}


def certificate_to_json(pid: str, cert: Any) -> dict:
    """External form: every index list is 1-based (choices, dominoes, factors, tiles, spins)."""
    field = CERT_FIELDS[pid]
    if pid == "poly":
        value = [[str(x) for x in p] for p in cert]
    else:
        value = [int(i) + (1 if pid in ("nhalt", "nhalt-all", "tile", "gse") else 0) for i in cert]
    return {field: value}


def certificate_from_json(pid: str, data: dict) -> Any:
    field = CERT_FIELDS[pid]
    if field not in data:
        raise InvalidInstance(f"certificate for {pid} needs a {field!r} field")
    value = data[field]
    if not isinstance(value, list):
        raise InvalidInstance(f"{field!r} must be a list")
    if pid == "poly":
        return tuple(tuple(Fraction(str(x)) for x in p) for p in value)
    shift = 1 if pid in ("nhalt", "nhalt-all", "tile", "gse") else 0
    if not all(isinstance(i, int) and not isinstance(i, bool) for i in value):
        raise InvalidInstance(f"{field!r} must hold integers")
    return tuple(i - shift for i in value)


# --- chain report ------------------------------------------------------------------------

BRANCHES = [
    ("nhalt", "pcp"),
    ("pcp", "zulc"),
    ("zulc", "mm"),
    ("zulc", "mpo"),
    ("mpo", "poly"),
    ("mpo", "stab"),
    ("nhalt-all", "tile"),
    ("tile", "gse"),
]


def _fmt(v) -> int | str:
    if isinstance(v, int):
        return v
    return str(v)


def iff_verdict(p: ThresholdPolynomial, horizon: int, s, t) -> str:
    """Whether accepted_src(n) <=> accepted_tgt(p(n)) for all n <= horizon.

    s is the source threshold within `horizon`, t the target threshold within
    p(horizon); both sides are monotone in the bound.
    """
    if s is NOT_FOUND:
        return "pass" if t is NOT_FOUND else "fail"
    if t is NOT_FOUND:
        return "fail"
    lower = p(s - 1) if s > 0 else -1
    return "pass" if lower < t <= p(s) else "fail"


def chain_rows(reg: Registry, m: turing.NTM, horizon: int) -> list[dict]:
    """One row per arrow of the reduction tree for one machine."""
    payloads: dict[str, Any] = {"nhalt": m, "nhalt-all": m}
    horizons: dict[str, int] = {"nhalt": horizon, "nhalt-all": horizon}
    thresholds: dict[str, Any] = {}
    status: dict[str, str] = {}

    def threshold(pid: str):
        if pid not in thresholds:
            if pid not in payloads:
                thresholds[pid] = None
                return None
            try:
                thresholds[pid] = reg.problem(pid).fast_min_threshold(payloads[pid], horizons[pid])
                status[pid] = "ok"
            except BudgetExceeded:
                thresholds[pid] = None
                status[pid] = "budget-exceeded"
            except ReductionError as exc:
                thresholds[pid] = None
                status[pid] = f"error: {exc}"
        return thresholds[pid]

    rows = []
    for src, dst in BRANCHES:
        arrow = reg.arrows[(src, dst)]
        row: dict[str, Any] = {"arrow": f"{src}->{dst}", "polynomial": list(arrow.threshold.coefficients)}
        if src not in payloads:
            row.update(status="skipped", iff="undetermined", equality="undetermined")
            rows.append(row)
            continue
        try:
            payloads[dst] = arrow(payloads[src])
            horizons[dst] = arrow.threshold(horizons[src])
        except ReductionError as exc:
            row.update(status=f"error: {exc}", iff="undetermined", equality="undetermined")
            rows.append(row)
            continue
        s, t = threshold(src), threshold(dst)
        row["source_horizon"] = horizons[src]
        row["target_horizon"] = horizons[dst]
        row["source_status"] = status.get(src, "skipped")
        row["target_status"] = status.get(dst, "skipped")
        if s is None or t is None:
            row.update(source_n_min=_fmt(s) if s is not None else None,
                       target_n_min=_fmt(t) if t is not None else None,
                       predicted=None, iff="undetermined", equality="undetermined")
        else:
            predicted = arrow.threshold(s) if isinstance(s, int) else None
            row.update(
                source_n_min=_fmt(s),
                target_n_min=_fmt(t),
                predicted=predicted,
                iff=iff_verdict(arrow.threshold, horizons[src], s, t),
                equality=(
                    "n/a" if predicted is None else ("equal" if t == predicted else "differs")
                ),
            )
        rows.append(row)
    return rows


def run_chain(machines: Sequence[turing.NTM], horizon: int, budget: int | None = DEFAULT_BUDGET) -> dict:
    reg = build_registry(budget)
    report = {"schema": "bounded-reductions/report/1", "horizon": horizon, "budget": budget, "instances": []}
    for idx, m in enumerate(machines):
        try:
            rows = chain_rows(reg, m, horizon)
            report["instances"].append({"index": idx, "rows": rows})
        except ReductionError as exc:  # pragma: no cover - per-instance errors are recorded
            report["instances"].append({"index": idx, "error": str(exc)})
    summary: dict[str, dict[str, int]] = {}
    for inst in report["instances"]:
        for row in inst.get("rows", []):
            cell = summary.setdefault(row["arrow"], {"pass": 0, "fail": 0, "undetermined": 0})
            cell[row["iff"]] += 1
    report["summary"] = summary
    return report
