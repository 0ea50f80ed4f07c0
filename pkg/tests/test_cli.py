import json
import logging

import numpy as np
import pytest

from boundinfo import cli
from boundinfo import distribution as dc
from boundinfo import measures as im
from boundinfo import quantum as qc
from boundinfo import tables, verify
from boundinfo.errors import UnknownProtocolError, UnknownTableError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- tables -------------------------------------------------------------------------

def test_tables_text(capsys):
    code, out, _ = run(capsys, "tables", "smolin")
    rows = out.strip().splitlines()[2:]
    assert code == 0 and len(rows) == 8 and all(r.endswith("1/8") for r in rows)
    code, out, _ = run(capsys, "tables", "unlock")
    rows = out.strip().splitlines()[2:]
    assert code == 0 and len(rows) == 4 and all(r.endswith("1/4") for r in rows)


@pytest.mark.parametrize("name", sorted(tables.TABLES))
def test_tables_json_round_trip(capsys, name):
    code, out, _ = run(capsys, "tables", name, "--format", "json")
    assert code == 0
    assert dc.from_json(out) == tables.get_table(name)


def test_tables_csv(capsys):
    code, out, _ = run(capsys, "tables", "csec2", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "A,C,B,D,Eve,p"


def test_dprob_table(capsys):
    code, out, _ = run(capsys, "tables", "dprob", "--format", "csv")
    assert code == 0 and len(out.strip().splitlines()) == 1 + 32768


def test_unknown_table(capsys):
    with pytest.raises(UnknownTableError):
        tables.get_table("nosuch")
    code, _, err = run(capsys, "tables", "nosuch")
    assert code == 2 and "unknown table" in err


# -- measures -------------------------------------------------------------------------

def test_measures_json(capsys):
    code, out, _ = run(capsys, "measures", "--table", "smolin", "--cut", "AB:CD",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["intrinsic_upper"]["value"] == 0.0 and rep["intrinsic_upper"]["exact"]
    assert rep["cmi_identity"]["value"] == pytest.approx(1.0, abs=1e-9)
    witness = im.EveChannel.from_json_obj(rep["intrinsic_upper"]["witness"])
    d = tables.table_7()
    assert im.intrinsic_information_upper(d, ["A", "B"], ["C", "D"], ["Eve"], witness).exact


def test_measures_respects_search_budget(capsys):
    code, _, err = run(capsys, "measures", "--search-budget", "10")
    assert code == 2 and "exceed budget" in err


def test_measures_multi_character_cut(capsys):
    code, out, _ = run(capsys, "measures", "--table", "appendixA-1", "--cut", "A1,C1:B1,D",
                       "--format", "json")
    assert code == 0 and json.loads(out)["intrinsic_upper"]["exact"]


# -- protocols ------------------------------------------------------------------------------

def test_protocol_superactivate(capsys):
    code, out, _ = run(capsys, "protocol", "superactivate")
    assert code == 0
    for line in ("table-10 MATCH", "table-11 MATCH", "table-12 MATCH"):
        assert line in out.splitlines()
    assert "sbit(D',E) PASS" in out


def test_protocol_ghz(capsys):
    code, out, _ = run(capsys, "protocol", "ghz-extend")
    assert code == 0 and "16/16 branches fidelity 1.000000000 PASS" in out.splitlines()


def test_protocol_distribute_secret(capsys):
    code, out, _ = run(capsys, "protocol", "distribute-secret")
    assert code == 0
    assert "David bit == s in all branches PASS; I(s:EveView)=0 exact PASS" in out.splitlines()


@pytest.mark.parametrize("name", ["unlock", "quantum-unlock", "quantum-superactivate"])
def test_other_protocols_pass(capsys, name):
    code, out, _ = run(capsys, "protocol", name, "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and all(c["pass"] for c in rep["checks"])


def test_protocol_json_transcript_round_trips(capsys):
    code, out, _ = run(capsys, "protocol", "unlock", "--format", "json")
    rep = json.loads(out)
    snap = dc.from_json_obj(rep["transcript"]["snapshots"]["equal"])
    assert dc.tables_equal(dc.drop_public(snap), tables.table_8())


def test_failed_check_gives_nonzero_exit(capsys):
    # a tolerance below the float noise floor makes the quantum fidelity checks fail
    code, out, _ = run(capsys, "protocol", "quantum-superactivate", "--tolerance", "1e-300")
    assert code == 1 and "FAIL" in out


def test_unknown_protocol(capsys):
    with pytest.raises(UnknownProtocolError):
        cli.run_protocol("nosuch")
    code, _, err = run(capsys, "protocol", "nosuch")
    assert code == 2 and "unknown protocol" in err


def test_bad_config(capsys):
    assert run(capsys, "tables", "smolin", "--tolerance", "0")[0] == 2
    assert run(capsys, "tables", "smolin", "--search-budget", "-1")[0] == 2


# -- export ---------------------------------------------------------------------------------

def test_export_table_and_out_file(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, out, _ = run(capsys, "export", "table", "appendixB", "--out", str(path))
    assert code == 0 and out == ""
    assert dc.from_json(path.read_text()) == tables.table_22()


def test_export_state(capsys):
    code, out, _ = run(capsys, "export", "state", "smolin")
    back = qc.state_from_json(json.loads(out))
    assert code == 0 and np.allclose(back.matrix, qc.smolin_state().matrix)
    code, _, _ = run(capsys, "export", "state", "nosuch")
    assert code == 2


def test_export_channel(capsys):
    code, out, _ = run(capsys, "export", "channel", "smolin")
    ch = im.EveChannel.from_json(out)
    assert code == 0 and ch.is_deterministic()


def test_export_transcript(capsys):
    code, out, _ = run(capsys, "export", "transcript", "superactivate")
    obj = json.loads(out)
    assert code == 0 and "table-12" in obj["snapshots"]
    code, _, err = run(capsys, "export", "transcript", "ghz-extend")
    assert code == 2 and "no classical transcript" in err


def test_log_level_from_environment(capsys, monkeypatch, caplog):
    monkeypatch.setenv("BOUNDINFO_LOG", "DEBUG")
    with caplog.at_level(logging.NOTSET):
        run(capsys, "protocol", "unlock")
        assert logging.getLogger("boundinfo").level == logging.DEBUG
    assert any("running protocol unlock" in r.message for r in caplog.records)
    monkeypatch.setenv("BOUNDINFO_LOG", "WARNING")
    run(capsys, "tables", "smolin")
    assert logging.getLogger("boundinfo").level == logging.WARNING


# -- verify -----------------------------------------------------------------------------------

def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--format", "json")
    summary = json.loads(out)
    assert code == 0 and len(summary) == len(verify.CRITERIA)
    assert all(set(r) == {"criterion", "expected", "observed", "passed"} for r in summary)
    assert all(r["passed"] for r in summary)


def test_corrupted_fixture_fails_only_its_criterion():
    good = tables.table_8()

    def corrupted():
        return dc.relabel_symbols(good, "Eve", {"e1": "e2", "e2": "e1"})

    results = verify.run_all(fixtures={"table-8": corrupted})
    failed = [r.criterion for r in results if not r.passed]
    assert failed == ["3 unlockability"]
