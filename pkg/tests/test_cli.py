"""
End-to-end tests of the command-line entry point
"""

import importlib
import json
from pathlib import Path

import pytest

from conftest import write_json
from mackey.main import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def spec(name):
    return str(SPECS / name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.mark.parametrize("name", [
    "config", "errors", "group_core", "lattice_moebius", "abelian_snf", "modular",
    "gmodule_cohomology", "mackey_core", "bley_boltje", "norm_split", "main",
])
def test_every_module_imports(name):
    assert importlib.import_module(f"mackey.{name}")


def test_lattice_on_s3(capsys):
    code, report = run(capsys, "lattice", spec("s3.json"))
    assert code == EXIT_OK
    assert report["command"] == "lattice"
    assert len(report["inputs_digest"]) == 64
    results = report["results"]
    assert results["subgroup_count"] == 6
    assert results["subgroups"][0]["moebius_to_group"] == 3
    top = results["subgroups"][-1]
    assert top["order"] == 6
    assert top["ell_hypoelementary"] == {"2": False, "3": True}
    assert top["hypoelementary"] is True
    assert results["hall_cross_check"]["passed"]
    assert report["passed"]


def test_lattice_on_trivial_group(capsys):
    code, report = run(capsys, "lattice", spec("trivial.json"))
    assert code == EXIT_OK
    assert report["results"]["subgroup_count"] == 1


def test_malformed_json_is_an_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, report = run(capsys, "lattice", str(bad))
    assert code == EXIT_INPUT
    assert report["passed"] is False


def test_schema_errors_are_input_errors(capsys, tmp_path):
    path = write_json(tmp_path / "group.json", {"degree": 0, "generators": []})
    code, _ = run(capsys, "lattice", path)
    assert code == EXIT_INPUT
    path = write_json(tmp_path / "perm.json", {"degree": 3, "generators": [[0, 0, 1]]})
    code, _ = run(capsys, "lattice", path)
    assert code == EXIT_INPUT


def test_missing_file_is_an_input_error(capsys, tmp_path):
    code, _ = run(capsys, "lattice", str(tmp_path / "absent.json"))
    assert code == EXIT_INPUT


def test_mackey_verify_fixed_points(capsys):
    code, report = run(capsys, "mackey-verify", spec("s3.json"), spec("z2_two_generators.json"),
                       "--constructor", "fixed-points", "--opposite")
    assert code == EXIT_OK
    assert report["passed"]
    assert set(report["results"]["axioms"]) == {"functor", "opposite"}
    assert report["witnesses"] == []


def test_mackey_verify_cohomology_of_c2(capsys):
    code, report = run(capsys, "mackey-verify", spec("c2.json"), spec("z2_one_generator.json"),
                       "--constructor", "cohomology", "--degree", "2")
    assert code == EXIT_OK
    assert report["results"]["values"] == ["0", "Z/2"]


def test_mackey_verify_cap(capsys):
    code, report = run(capsys, "mackey-verify", spec("a4.json"), spec("z2_two_generators.json"),
                       "--constructor", "cohomology", "--degree", "2")
    assert code == EXIT_INPUT
    assert report["dimension"] == 12 ** 4


def test_bad_module_spec(capsys, tmp_path):
    path = write_json(tmp_path / "module.json", {"invariant_factors": [1], "generator_actions": [[[1]]]})
    code, _ = run(capsys, "mackey-verify", spec("c2.json"), path)
    assert code == EXIT_INPUT


def test_bley_boltje_on_s3(capsys):
    code, report = run(capsys, "bley-boltje", spec("s3.json"), spec("z2_two_generators.json"), "--ell", "2")
    assert code == EXIT_OK
    chain_sums = report["results"]["chain_sums"]
    assert chain_sums["odd_sum"]["invariant_factors"] == [2] * 10
    assert chain_sums["even_sum"]["invariant_factors"] == [2] * 10
    assert chain_sums["isomorphic"]
    assert set(report["results"]["moebius_sums"].values()) == {0}
    assert report["results"]["hypothesis_flag"] is None


def test_bley_boltje_informational_on_c4(capsys):
    code, report = run(capsys, "bley-boltje", spec("c4.json"), spec("z2_one_generator.json"),
                       "--subgroup", "G", "--ell", "2")
    assert code == EXIT_OK
    assert report["results"]["informational"]
    assert report["results"]["hypothesis_flag"] == "2-hypoelementary"


def test_bley_boltje_integral_on_d6(capsys):
    code, report = run(capsys, "bley-boltje", spec("d6.json"), spec("z4_two_generators.json"), "--integral",
                       "--invariant", "length")
    assert code == EXIT_OK
    assert report["results"]["chain_sums"]["isomorphic"]
    assert report["results"]["moebius_sums"] == {"length": 0}


def test_bley_boltje_with_sign_module(capsys):
    code, report = run(capsys, "bley-boltje", spec("s3.json"), spec("s3_sign_z4.json"), "--ell", "2")
    assert code == EXIT_OK
    assert report["passed"]


@pytest.mark.parametrize("selector", ["99", "abc"])
def test_bley_boltje_bad_selector(capsys, selector):
    code, _ = run(capsys, "bley-boltje", spec("s3.json"), spec("z2_two_generators.json"),
                  "--subgroup", selector, "--ell", "2")
    assert code == EXIT_INPUT


def test_norm_demo(capsys):
    code, report = run(capsys, "norm-demo", "--modulus", "5", "--degree", "3", "--ranks", "2,2,2",
                       "--trials", "10")
    assert code == EXIT_OK
    assert report["results"]["rank"] == 8


def test_norm_demo_degree_one(capsys):
    code, report = run(capsys, "norm-demo", "--modulus", "7", "--degree", "1", "--trials", "5")
    assert code == EXIT_OK
    assert report["passed"]


def test_norm_demo_is_byte_deterministic(capsys):
    argv = ["norm-demo", "--modulus", "9", "--degree", "2", "--ranks", "2,3", "--seed", "7", "--trials", "8"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second


def test_norm_demo_bad_parameters(capsys):
    code, _ = run(capsys, "norm-demo", "--modulus", "1")
    assert code == EXIT_INPUT
    code, _ = run(capsys, "norm-demo", "--degree", "2", "--ranks", "2")
    assert code == EXIT_INPUT


def test_config_check(capsys):
    code, report = run(capsys, "config-check")
    assert code == EXIT_OK
    assert report["results"]["norm_trials"] > 0


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_FAILED, EXIT_INPUT) == (0, 1, 2)
