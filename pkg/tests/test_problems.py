from __future__ import annotations

import json
from fractions import Fraction

import pytest

from bounded_reductions import matsem, mpo, pcp, tiling, turing
from bounded_reductions.core import NOT_FOUND, InvalidInstance
from bounded_reductions.framework import ThresholdPolynomial
from bounded_reductions.problems import (
    CERT_FIELDS,
    GSEInstance,
    build_registry,
    canonical_id,
    certificate_from_json,
    certificate_to_json,
    iff_verdict,
    payload_from_json,
    payload_to_json,
    run_chain,
)

B = turing.BLANK
TOY = [
    turing.one_step_halter(),
    turing.looper(),
    turing.NTM.build(
        {("q0", B): [("qf", B, "R"), ("q1", B, "R")], ("q1", B): [("qf", B, "R")]}, finals=["qf"], tape="semi"
    ),
]


def _payloads():
    fam = matsem.reduce_pcp_to_zulc(pcp.PCPInstance.of(("a", "ab"), ("ba", "a")))
    mfam = mpo.reduce_zulc_to_mpo(fam[:1])
    ts = tiling.TileSet.of(("a", "b", "a", "b"))
    return {
        "nhalt": TOY[0],
        "nhalt-all": TOY[2],
        "pcp": pcp.PCPInstance.of(("a", "ab"), ("ba", "a")),
        "zulc": fam,
        "mm": matsem.reduce_zulc_to_mm(fam),
        "mpo": mfam,
        "poly": mpo.reduce_mpo_to_poly(((( -1,),),)),
        "stab": mpo.reduce_mpo_to_stab(mpo.pad_to_square(((( -1,),),))),
        "tile": ts,
        "gse": GSEInstance(tiling.reduce_tile_to_gse(ts), Fraction(0)),
    }


def test_aliases():
    assert canonical_id("BPCP") == "pcp"
    assert canonical_id("bnhalt_all") == "nhalt-all"
    assert canonical_id("gse") == "gse"


@pytest.mark.parametrize("pid", sorted(CERT_FIELDS))
def test_payload_and_certificate_round_trips(pid):
    reg = build_registry()
    payload = _payloads()[pid]
    back = payload_from_json(pid, json.loads(json.dumps(payload_to_json(pid, payload))))
    assert payload_to_json(pid, back) == payload_to_json(pid, payload)
    entry = reg.problem(pid)
    n = 4
    accepted, cert = entry.solve(back, n)
    if cert is not None:
        doc = json.loads(json.dumps(certificate_to_json(pid, cert)))
        cert2 = certificate_from_json(pid, doc)
        assert entry.verify(back, cert2, n)


def test_certificates_are_one_based():
    assert certificate_to_json("nhalt", (0, 1)) == {"choices": [1, 2]}
    assert certificate_to_json("pcp", (1, 2)) == {"indices": [1, 2]}
    assert certificate_to_json("tile", (0, 0)) == {"tiling": [1, 1]}
    assert certificate_from_json("gse", {"config": [1, 2]}) == (0, 1)
    with pytest.raises(InvalidInstance):
        certificate_from_json("pcp", {"choices": [1]})
    with pytest.raises(InvalidInstance):
        certificate_from_json("pcp", {"indices": ["1"]})


def test_witness_soundness_and_monotonicity_per_problem():
    reg = build_registry()
    for pid, payload in _payloads().items():
        entry = reg.problem(pid)
        flags = []
        for n in range(5):
            accepted, cert = entry.solve(payload, n)
            flags.append(accepted)
            if cert is not None:
                assert entry.verify(payload, cert, n), (pid, n)
        assert flags == sorted(flags), pid


def test_verifiers_reject_fabricated_certificates():
    reg = build_registry()
    p = _payloads()
    assert not reg.problem("pcp").verify(p["pcp"], (2, 1), 5)
    assert not reg.problem("pcp").verify(p["pcp"], (1, 2), 1)
    assert not reg.problem("nhalt").verify(p["nhalt"], (1,), 5)
    assert not reg.problem("mpo").verify(((( 1,),),), (1,), 5)
    assert not reg.problem("tile").verify(tiling.TileSet.of(("r", "w", "b", "w")), (0,) * 9, 1)
    assert not reg.problem("gse").verify(p["gse"], (5,), 0)


def test_iff_verdict():
    p = ThresholdPolynomial.of(2, 3, 1)
    assert iff_verdict(p, 3, 1, 6) == "pass"
    assert iff_verdict(p, 3, 1, 3) == "pass"
    assert iff_verdict(p, 3, 1, 2) == "fail"
    assert iff_verdict(p, 3, 1, 7) == "fail"
    assert iff_verdict(p, 3, 0, 2) == "pass"
    assert iff_verdict(p, 3, NOT_FOUND, NOT_FOUND) == "pass"
    assert iff_verdict(p, 3, NOT_FOUND, 5) == "fail"
    assert iff_verdict(p, 3, 1, NOT_FOUND) == "fail"


def test_chain_on_toy_machines():
    report = run_chain(TOY, 3, budget=5000)
    assert report["schema"] == "bounded-reductions/report/1"
    assert len(report["instances"]) == 3
    rows = [row for inst in report["instances"] for row in inst["rows"]]
    assert all(row["iff"] != "fail" for row in rows)
    for arrow in ("nhalt->pcp", "nhalt-all->tile", "tile->gse"):
        assert report["summary"][arrow] == {"pass": 3, "fail": 0, "undetermined": 0}
    first = {row["arrow"]: row for row in report["instances"][0]["rows"]}
    assert first["nhalt->pcp"]["source_n_min"] == 1
    assert first["nhalt->pcp"]["target_n_min"] == 6 == first["nhalt->pcp"]["predicted"]
    assert first["nhalt->pcp"]["equality"] == "equal"
    assert first["nhalt-all->tile"]["target_n_min"] == 2


def test_chain_on_looper_only():
    report = run_chain([turing.looper()], 3, budget=2000)
    for row in report["instances"][0]["rows"]:
        assert row["iff"] in ("pass", "undetermined")
        if row["iff"] == "pass":
            assert row["source_n_min"] == row["target_n_min"] == "NOT_FOUND"


def test_chain_empty_and_reproducible():
    assert run_chain([], 3)["instances"] == []
    a = json.dumps(run_chain(TOY[:2], 2, budget=1000), sort_keys=True)
    b = json.dumps(run_chain(TOY[:2], 2, budget=1000), sort_keys=True)
    assert a == b


def test_chain_records_reduction_errors():
    two_way = turing.one_step_halter("two-way")
    report = run_chain([two_way], 1, budget=1000)
    rows = {row["arrow"]: row for row in report["instances"][0]["rows"]}
    assert rows["nhalt->pcp"]["status"].startswith("error")
    assert rows["pcp->zulc"]["status"] == "skipped"
    assert rows["nhalt-all->tile"]["iff"] == "pass"
