"""End-to-end CLI coverage through main(), one test per exit path."""

import json

import pytest

from rankfair import fixtures
from rankfair.cli import main
from rankfair.documents import dump_path, load_path, serialize_allocation, \
    serialize_instance


def _write_instance(tmp_path, instance, name="instance.json"):
    path = tmp_path / name
    dump_path(serialize_instance(instance), str(path))
    return str(path)


def _write_allocation(tmp_path, allocation, instance, name="allocation.json"):
    path = tmp_path / name
    dump_path(serialize_allocation(allocation, instance), str(path))
    return str(path)


@pytest.fixture
def fig_pair(tmp_path):
    instance = fixtures.ef1_not_efx0_instance()
    allocation = fixtures.ef1_not_efx0_allocation(instance)
    return (_write_instance(tmp_path, instance),
            _write_allocation(tmp_path, allocation, instance))


def test_solve_usw_ef1_writes_document(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.two_group_matching_instance())
    out = tmp_path / "result.json"
    code = main(["solve", "--algorithm", "usw-ef1", "--input", doc,
                 "--output", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "usw: 6" in text and "ef1: true" in text
    written = load_path(str(out))
    assert written["schema"] == 1
    assert (tmp_path / "result.json.transfers.tsv").exists()


def test_solve_machine_payload(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.ef1_not_efx0_instance())
    code = main(["solve", "--algorithm", "usw-ef1", "--input", doc,
                 "--format", "machine"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == 1
    assert payload["metrics"]["algorithm"] == "usw-ef1"
    assert payload["metrics"]["ef1"] is True
    assert payload["metrics"]["usw"] == "4"


def test_solve_leximin_flow_network_sidecar(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.two_group_matching_instance())
    out = tmp_path / "flow.json"
    code = main(["solve", "--algorithm", "leximin-flow", "--input", doc,
                 "--output", str(out)])
    assert code == 0
    sidecar = tmp_path / "flow.json.network.tsv"
    assert sidecar.read_text().startswith("tail\thead\tcapacity\tcost\tflow")


def test_solve_leximin_flow_refuses_weighted(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.usw_not_ef1_instance())
    code = main(["solve", "--algorithm", "leximin-flow", "--input", doc])
    assert code == 2
    assert "unit weights" in capsys.readouterr().err


def test_solve_eit_general_budget_exhaustion(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.usw_not_ef1_instance())
    out = tmp_path / "partial.json"
    code = main(["solve", "--algorithm", "eit-general", "--input", doc,
                 "--output", str(out), "--budget", "0"])
    assert code == 3
    assert out.exists()
    assert "budget" in capsys.readouterr().err


def test_solve_eit_general_completes(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.usw_not_ef1_instance())
    code = main(["solve", "--algorithm", "eit-general", "--input", doc,
                 "--format", "machine"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["metrics"]["transfers"] == 1
    assert payload["metrics"]["pof"] == "10/9"
    assert payload["metrics"]["waste_count"] == 0


def test_solve_envy_graph(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.baseline_trap_instance())
    code = main(["solve", "--algorithm", "envy-graph", "--input", doc,
                 "--format", "machine"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["metrics"]["ef1"] is True


def test_check_pass_and_fail(fig_pair, capsys):
    instance_path, allocation_path = fig_pair
    code = main(["check", "--input", instance_path,
                 "--allocation", allocation_path,
                 "--properties", "ef1,complete"])
    assert code == 0
    assert "ef1 PASS" in capsys.readouterr().out
    code = main(["check", "--input", instance_path,
                 "--allocation", allocation_path,
                 "--properties", "efx0"])
    assert code == 4
    out = capsys.readouterr().out
    assert "efx0 FAIL" in out and "witness o4 (g1 -> g2)" in out


def test_check_all_expands(fig_pair, capsys):
    instance_path, allocation_path = fig_pair
    code = main(["check", "--input", instance_path,
                 "--allocation", allocation_path,
                 "--properties", "all", "--format", "machine"])
    assert code == 4
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False
    names = [entry["name"] for entry in payload["properties"]]
    assert set(names) >= {"ef", "ef1", "efx0", "mms", "po", "wprop1"}
    verdicts = {entry["name"]: entry["pass"] for entry in payload["properties"]}
    assert verdicts["ef1"] and not verdicts["efx0"]


def test_check_eq_property(fig_pair, capsys):
    instance_path, allocation_path = fig_pair
    assert main(["check", "--input", instance_path,
                 "--allocation", allocation_path,
                 "--properties", "eq2"]) == 0
    capsys.readouterr()
    assert main(["check", "--input", instance_path,
                 "--allocation", allocation_path,
                 "--properties", "eq0"]) == 4


def test_check_unknown_property(fig_pair, capsys):
    instance_path, allocation_path = fig_pair
    code = main(["check", "--input", instance_path,
                 "--allocation", allocation_path,
                 "--properties", "shiny"])
    assert code == 1
    assert "shiny" in capsys.readouterr().err


def test_oracle_text_and_machine(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.leximin_not_usw_instance())
    code = main(["oracle", "--input", doc, "--objective", "usw"])
    assert code == 0
    out = capsys.readouterr().out
    assert 'optimal value: "4.9"' in out
    code = main(["oracle", "--input", doc, "--objective", "leximin",
                 "--format", "machine"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    # vector stays in agent order; the leximin key sorts internally
    assert payload["optimal_vector"] == ["2", "1", "0.1"]
    assert sorted(payload["optimal_vector"]) == ["0.1", "1", "2"]


def test_oracle_budget_refusal(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.two_group_matching_instance())
    code = main(["oracle", "--input", doc, "--objective", "usw",
                 "--budget", "10"])
    assert code == 5
    assert "budget" in capsys.readouterr().err


def test_validate_accepts_and_rejects(tmp_path, capsys):
    good = _write_instance(tmp_path, fixtures.two_group_matching_instance())
    assert main(["validate", "--input", good]) == 0
    assert "OK (exhaustive" in capsys.readouterr().out
    bad = _write_instance(tmp_path, fixtures.nonsubmodular_pair_instance(),
                          name="shoes.json")
    code = main(["validate", "--input", bad])
    assert code == 4
    out = capsys.readouterr().out
    assert "submodularity" in out and "FAIL" in out


def test_validate_spot_check_mode(tmp_path, capsys):
    doc = _write_instance(tmp_path, fixtures.nonsubmodular_pair_instance())
    code = main(["validate", "--input", doc, "--spot-check", "80",
                 "--seed", "3"])
    assert code == 4
    assert "non-conclusive" in capsys.readouterr().out


def test_parse_error_exit_code(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json\n")
    assert main(["oracle", "--input", str(broken),
                 "--objective", "usw"]) == 1
    assert main(["oracle", "--input", str(tmp_path / "missing.json"),
                 "--objective", "usw"]) == 1
    capsys.readouterr()


def test_usage_error_exit_code(capsys):
    assert main(["solve", "--algorithm", "usw-ef1"]) == 1
    assert main(["frobnicate"]) == 1
    capsys.readouterr()


def test_bench_command(tmp_path, capsys, ratings_path, users_path):
    code = main(["bench", "--ratings", ratings_path, "--users", users_path,
                 "--attribute", "gender", "--items", "6", "--runs", "2",
                 "--seed", "7"])
    assert code == 0
    out = capsys.readouterr().out
    assert "envy-graph/ratings" in out and "PoF" in out
    code = main(["bench", "--ratings", ratings_path, "--users", users_path,
                 "--attribute", "gender", "--items", "6", "--runs", "2",
                 "--seed", "7", "--format", "machine"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["runs"] == 2 and len(payload["cells"]) == 4
