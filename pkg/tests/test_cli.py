from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

from bounded_reductions import mpo, pcp, turing
from bounded_reductions.cli import (
    CERTIFICATE_SCHEMA,
    CORPUS_SCHEMA,
    EXIT_ERROR,
    EXIT_NO,
    EXIT_YES,
    INSTANCE_SCHEMA,
    instance_document,
    main,
)


def _write(path: Path, doc) -> str:
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def _read(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def test_reduce_lifts_bounds(tmp_path):
    src = _write(tmp_path / "m.json", instance_document("nhalt", turing.one_step_halter(), 1))
    out = str(tmp_path / "p.json")
    assert main(["reduce", "--from", "nhalt", "--to", "pcp", "-i", src, "-o", out]) == EXIT_YES
    doc = _read(out)
    assert doc["schema"] == INSTANCE_SCHEMA and doc["problem"] == "pcp" and doc["bound"] == 6
    assert main(["reduce", "--from", "nhalt", "--to", "mm", "-i", src, "-o", out]) == EXIT_YES
    assert _read(out)["bound"] == 8
    z = _write(tmp_path / "z.json", instance_document("zulc", (((1, 0), (0, 1)),), 3))
    assert main(["reduce", "--from", "zulc", "--to", "mm", "-i", z, "-o", out]) == EXIT_YES
    assert _read(out)["bound"] == 5


def test_reduce_errors(tmp_path, capsys):
    src = _write(tmp_path / "m.json", instance_document("nhalt", turing.one_step_halter(), 1))
    assert main(["reduce", "--from", "pcp", "--to", "nhalt", "-i", src]) == EXIT_ERROR
    assert main(["reduce", "--from", "pcp", "--to", "zulc", "-i", src]) == EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["reduce", "--from", "nhalt", "--to", "pcp", "-i", str(bad)]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err


def test_solve_exit_codes(tmp_path, capsys):
    inst = _write(tmp_path / "p.json", instance_document("pcp", pcp.PCPInstance.of(("a", "ab"), ("ba", "a"))))
    assert main(["solve", "--problem", "bpcp", "--bound", "2", "-i", inst]) == EXIT_YES
    result = json.loads(capsys.readouterr().out)
    assert result["certificate"]["indices"] == [1, 2]
    assert main(["solve", "--problem", "bpcp", "--bound", "1", "-i", inst]) == EXIT_NO
    assert capsys.readouterr().out.strip() == "exhausted bound"
    ident = _write(tmp_path / "id.json", instance_document("mm", (((1, 0), (0, 1)),)))
    assert main(["solve", "--problem", "bmm", "--bound", "10", "-i", ident]) == EXIT_NO
    assert main(["solve", "--problem", "bpcp", "-i", inst]) == EXIT_ERROR
    assert main(["solve", "--problem", "bpcp", "--bound", "-3", "-i", inst]) == EXIT_ERROR
    assert main(["solve", "--problem", "mm", "--bound", "2", "-i", inst]) == EXIT_ERROR


def test_solve_budget_exhaustion_is_an_error(tmp_path):
    hard = pcp.PCPInstance.of(("aab", "a"), ("ab", "abb"), ("a", "b"), ("b", "aab"))
    inst = _write(tmp_path / "h.json", instance_document("pcp", hard))
    assert main(["solve", "--problem", "pcp", "--bound", "40", "--budget", "10", "-i", inst]) == EXIT_ERROR


def test_verify(tmp_path, capsys):
    inst = _write(tmp_path / "p.json", instance_document("pcp", pcp.PCPInstance.of(("a", "ab"), ("ba", "a"))))
    good = _write(tmp_path / "c.json", {"schema": CERTIFICATE_SCHEMA, "problem": "pcp", "indices": [1, 2]})
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", good]) == EXIT_YES
    corrupt = _write(tmp_path / "bad.json", {"schema": CERTIFICATE_SCHEMA, "problem": "pcp", "indices": [1, 3]})
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", corrupt]) == EXIT_NO
    swapped = _write(tmp_path / "sw.json", {"indices": [2, 1]})
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", swapped]) == EXIT_NO
    other = _write(tmp_path / "o.json", {"schema": CERTIFICATE_SCHEMA, "problem": "mm", "indices": [1]})
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", other]) == EXIT_ERROR
    wrong_field = _write(tmp_path / "w.json", {"choices": [1]})
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", wrong_field]) == EXIT_ERROR
    fam = _write(tmp_path / "mpo.json", instance_document("mpo", mpo.reduce_zulc_to_mpo((((1, 0), (0, 1)),))))
    nonneg = _write(tmp_path / "n.json", {"indices": [1, 1]})
    assert main(["verify", "--problem", "mpo", "-i", fam, "-c", nonneg]) == EXIT_NO
    capsys.readouterr()


def test_verify_respects_bound(tmp_path):
    inst = _write(tmp_path / "p.json", instance_document("pcp", pcp.PCPInstance.of(("a", "ab"), ("ba", "a")), 1))
    good = _write(tmp_path / "c.json", {"indices": [1, 2]})
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", good]) == EXIT_NO
    assert main(["verify", "--problem", "pcp", "-i", inst, "-c", good, "--bound", "2"]) == EXIT_YES


def test_corpus_and_chain(tmp_path):
    corpus = str(tmp_path / "corpus.json")
    assert main(["corpus", "--states", "1", "--symbols", "1", "--branch", "1", "-o", corpus]) == EXIT_YES
    doc = _read(corpus)
    assert doc["schema"] == CORPUS_SCHEMA and len(doc["machines"]) == 5
    assert main(["corpus", "--states", "2", "--symbols", "2", "--branch", "2", "--limit", "0", "-o", corpus]) == 0
    assert _read(corpus)["machines"] == []
    report = str(tmp_path / "r.json")
    assert main(["chain", "--corpus", corpus, "--horizon", "3", "-o", report]) == EXIT_YES
    assert _read(report)["instances"] == []

    assert main(["corpus", "--states", "1", "--symbols", "1", "--branch", "1", "--limit", "3", "-o", corpus]) == 0
    r1, r2 = str(tmp_path / "r1.json"), str(tmp_path / "r2.json")
    for r in (r1, r2):
        assert main(["chain", "--corpus", corpus, "--horizon", "2", "--budget", "500", "-o", r]) == EXIT_YES
    assert Path(r1).read_bytes() == Path(r2).read_bytes()
    assert main(["chain", "--corpus", report, "--horizon", "2"]) == EXIT_ERROR


def test_sampled_corpus(tmp_path):
    out = str(tmp_path / "s.json")
    args = ["corpus", "--states", "2", "--symbols", "2", "--branch", "2", "--sample", "7", "--seed", "4", "-o", out]
    assert main(args) == EXIT_YES
    first = _read(out)
    assert main(args) == EXIT_YES
    assert _read(out) == first and len(first["machines"]) == 7


def test_manifest(capsys):
    assert main(["manifest"]) == EXIT_YES
    assert json.loads(capsys.readouterr().out)["schema"] == "registry/1"


def test_bad_arguments():
    assert main([]) == EXIT_ERROR
    assert main(["solve", "--problem", "pcp"]) == EXIT_ERROR
    assert main(["--help"]) == EXIT_YES


def test_module_entry_point(tmp_path):
    inst = _write(tmp_path / "p.json", instance_document("pcp", pcp.PCPInstance.of(("a", "ab"), ("ba", "a"))))
    proc = subprocess.run(
        [sys.executable, "-m", "bounded_reductions", "solve", "--problem", "pcp", "--bound", "1", "-i", inst],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_NO
    assert proc.stdout.strip() == "exhausted bound"
