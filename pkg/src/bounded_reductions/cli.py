"""Command-line front end.

Bounds are decimal integers but carry unary-size semantics: an instance with
bound n is regarded as having size at least n.

Exit codes: 0 yes-instance / valid certificate, 1 no within the bound /
invalid certificate, 2 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import turing
from .core import BudgetExceeded, ReductionError
from .framework import BoundedInstance, lift
from .problems import (
    DEFAULT_BUDGET,
    build_registry,
    canonical_id,
    certificate_from_json,
    certificate_to_json,
    payload_from_json,
    payload_to_json,
    run_chain,
)

SCHEMA_PREFIX = "bounded-reductions"
INSTANCE_SCHEMA = f"{SCHEMA_PREFIX}/instance/1"
CERTIFICATE_SCHEMA = f"{SCHEMA_PREFIX}/certificate/1"
CORPUS_SCHEMA = f"{SCHEMA_PREFIX}/corpus/1"

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class CLIError(Exception):
    pass


def read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read {path}: {exc}") from exc


def write_json(path: str | None, data: Any) -> None:
    text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def instance_document(problem: str, payload: Any, bound: int | None = None) -> dict:
    doc = {"schema": INSTANCE_SCHEMA, "problem": problem, "payload": payload_to_json(problem, payload)}
    if bound is not None:
        doc["bound"] = bound
    return doc


def load_instance(path: str, expected: str | None = None) -> tuple[str, Any, int | None]:
    doc = read_json(path)
    if not isinstance(doc, dict) or doc.get("schema") != INSTANCE_SCHEMA:
        raise CLIError(f"{path}: expected schema {INSTANCE_SCHEMA!r}")
    pid = canonical_id(str(doc.get("problem", "")))
    if expected is not None and pid != expected:
        raise CLIError(f"{path}: holds a {pid!r} instance, expected {expected!r}")
    bound = doc.get("bound")
    if bound is not None and (not isinstance(bound, int) or bound < 0):
        raise CLIError(f"{path}: bound must be a natural number")
    return pid, payload_from_json(pid, doc.get("payload", {})), bound


def certificate_document(problem: str, cert: Any) -> dict:
    doc = {"schema": CERTIFICATE_SCHEMA, "problem": problem}
    doc.update(certificate_to_json(problem, cert))
    return doc


def cmd_reduce(args) -> int:
    reg = build_registry()
    src, dst = canonical_id(args.source), canonical_id(args.target)
    arrow = reg.chain_arrow(src, dst)
    _, payload, bound = load_instance(args.input, src)
    if bound is not None:
        out = lift(arrow, BoundedInstance(src, payload, bound))
        doc = instance_document(dst, out.payload, out.bound)
    else:
        doc = instance_document(dst, arrow(payload))
    doc["chain"] = arrow.map_id.split("|")
    doc["polynomial"] = list(arrow.threshold.coefficients)
    write_json(args.output, doc)
    return EXIT_YES


def cmd_solve(args) -> int:
    pid = canonical_id(args.problem)
    reg = build_registry(args.budget)
    entry = reg.problem(pid)
    _, payload, file_bound = load_instance(args.input, pid)
    bound = args.bound if args.bound is not None else file_bound
    if bound is None or bound < 0:
        raise CLIError("a natural-number bound is required (--bound or a bound in the instance file)")
    accepted, cert = entry.solve(payload, bound)
    result = {"problem": pid, "bound": bound, "accepted": bool(accepted)}
    if cert is not None:
        result["certificate"] = certificate_document(pid, cert)
    if accepted:
        print(json.dumps(result, ensure_ascii=False))
        return EXIT_YES
    print("exhausted bound")
    if cert is not None:
        print(json.dumps(result, ensure_ascii=False))
    return EXIT_NO


def _default_bound(pid: str, cert: Any) -> int:
    if pid in ("tile", "gse"):
        side = round(len(cert) ** 0.5)
        return (side - 1) // 2
    if pid == "nhalt-all":
        return len(cert)
    return len(cert)


def cmd_verify(args) -> int:
    pid = canonical_id(args.problem)
    reg = build_registry()
    entry = reg.problem(pid)
    _, payload, file_bound = load_instance(args.input, pid)
    doc = read_json(args.certificate)
    if not isinstance(doc, dict):
        raise CLIError("certificate must be a JSON object")
    if "schema" in doc and doc["schema"] != CERTIFICATE_SCHEMA:
        raise CLIError(f"expected certificate schema {CERTIFICATE_SCHEMA!r}")
    if "problem" in doc and canonical_id(str(doc["problem"])) != pid:
        raise CLIError(f"certificate is for {doc['problem']!r}, not {pid!r}")
    cert = certificate_from_json(pid, doc)
    bound = args.bound if args.bound is not None else file_bound
    if bound is None:
        bound = _default_bound(pid, cert)
    ok = entry.verify(payload, cert, bound)
    print("valid" if ok else "invalid")
    return EXIT_YES if ok else EXIT_NO


def cmd_chain(args) -> int:
    doc = read_json(args.corpus)
    machines_json = doc.get("machines") if isinstance(doc, dict) else None
    if machines_json is None:
        raise CLIError(f"{args.corpus}: expected a corpus with a 'machines' list")
    machines = [turing.ntm_from_json(m) for m in machines_json]
    report = run_chain(machines, args.horizon, args.budget)
    write_json(args.output, report)
    return EXIT_YES


def cmd_corpus(args) -> int:
    limit = None if args.limit is None or args.limit < 0 else args.limit
    if args.sample:
        machines = turing.sample_corpus(args.states, args.symbols, args.branch, args.sample, args.seed)
        if limit is not None:
            machines = machines[:limit]
    else:
        machines = turing.gen_corpus(args.states, args.symbols, args.branch, limit)
    write_json(args.output, {"schema": CORPUS_SCHEMA, "machines": [turing.ntm_to_json(m) for m in machines]})
    return EXIT_YES


def cmd_manifest(args) -> int:
    write_json(args.output, build_registry().manifest())
    return EXIT_YES


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bounded-reductions",
        description="Reductions between undecidable problems and exact solvers for their bounded versions. "
        "Bounds are decimal integers with unary-size semantics.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="apply a reduction (or a chain of them) to an instance file")
    r.add_argument("--from", dest="source", required=True)
    r.add_argument("--to", dest="target", required=True)
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output", default="-")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="run the bounded solver of a problem")
    s.add_argument("--problem", required=True)
    s.add_argument("--bound", type=_natural)
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--budget", type=_natural, default=None, help="node budget (default: unlimited)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="recheck a certificate from scratch")
    v.add_argument("--problem", required=True)
    v.add_argument("-i", "--input", required=True)
    v.add_argument("-c", "--certificate", required=True)
    v.add_argument("--bound", type=_natural)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("chain", help="run a machine corpus down the reduction tree and report thresholds")
    c.add_argument("--corpus", required=True)
    c.add_argument("--horizon", type=_natural, required=True)
    c.add_argument("-o", "--output", default="-")
    c.add_argument("--budget", type=_natural, default=DEFAULT_BUDGET, help="node budget per solver call")
    c.set_defaults(func=cmd_chain)

    g = sub.add_parser("corpus", help="generate a machine corpus")
    g.add_argument("--states", type=int, required=True)
    g.add_argument("--symbols", type=int, required=True)
    g.add_argument("--branch", type=int, required=True)
    g.add_argument("--limit", type=int, default=None, help="maximum number of machines (omit or -1: all)")
    g.add_argument("--sample", type=_natural, default=0, help="draw this many random machines instead")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_corpus)

    m = sub.add_parser("manifest", help="print the registry manifest")
    m.add_argument("-o", "--output", default="-")
    m.set_defaults(func=cmd_manifest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_YES
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CLIError, ReductionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
