"""CLI surface: subcommands, exit codes, determinism, cache behaviour."""

import json
import os

import pytest

from gridskein.catalog import write_grid_files
from gridskein.cli import main


@pytest.fixture()
def grids_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("GRIDSKEIN_CACHE", str(tmp_path / "cache"))
    d = tmp_path / "grids"
    write_grid_files(str(d))
    return d


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestHomology:
    def test_unknot_f2(self, grids_dir, capsys):
        code, out = run(capsys, "homology", str(grids_dir / "unknot2.grid"),
                        "--ring", "f2", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["results"]["tilde_total_rank"] == 2

    def test_trefoil_hat_both_rings(self, grids_dir, capsys):
        code, out = run(capsys, "homology", str(grids_dir / "trefoil5.grid"),
                        "--ring", "f2", "--hat", "--json")
        assert code == 0 and json.loads(out)["results"]["hat_total_rank"] == 3
        code, out = run(capsys, "homology", str(grids_dir / "trefoil5.grid"),
                        "--ring", "z", "--hat", "--json")
        report = json.loads(out)
        assert code == 0
        assert report["results"]["hat_total_rank"] == 3
        assert all(not e["torsion"] for e in report["results"]["hat"]["entries"])

    def test_bad_input_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.grid"
        bad.write_text("not a grid\n")
        assert main(["homology", str(bad)]) == 2

    def test_determinism(self, grids_dir, capsys):
        _, out1 = run(capsys, "homology", str(grids_dir / "hopf4.grid"), "--json")
        _, out2 = run(capsys, "homology", str(grids_dir / "hopf4.grid"), "--json")
        assert out1 == out2


class TestSkein:
    def test_twisted_unknot_passes(self, grids_dir, capsys):
        code, out = run(capsys, "skein", str(grids_dir / "twisted_unknot4.grid"),
                        "--ring", "both", "--full-checks", "--json")
        assert code == 0
        report = json.loads(out)
        for ring in ("F2", "Z"):
            assert all(report["results"][ring]["exact"].values())

    def test_cache_miss_then_hit(self, grids_dir, capsys):
        cache = os.environ["GRIDSKEIN_CACHE"]
        assert not os.path.exists(os.path.join(cache, "signs_n4.bin"))
        code, _ = run(capsys, "skein", str(grids_dir / "twisted_unknot4.grid"),
                      "--ring", "z", "--json")
        assert code == 0
        assert os.path.exists(os.path.join(cache, "signs_n4.bin"))
        code, _ = run(capsys, "skein", str(grids_dir / "twisted_unknot4.grid"),
                      "--ring", "z", "--json")
        assert code == 0

    def test_pattern_mismatch_is_input_error(self, grids_dir, capsys):
        assert main(["skein", str(grids_dir / "unknot2.grid")]) == 2


class TestCube:
    def test_m1_report(self, grids_dir, capsys):
        code, out = run(capsys, "cube", str(grids_dir / "twisted_unknot5.grid"),
                        "--relaxed", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["results"]["E_inf_total"] == report["results"]["rank_H_C"] == 16

    def test_strict_block_entry(self, grids_dir, capsys):
        code, out = run(capsys, "cube", str(grids_dir / "blocked_unknot7.grid"), "--json")
        assert code == 0
        report = json.loads(out)
        assert report["results"]["rank_H_CR"] == report["results"]["rank_H_C"] == 64

    def test_sampled_determinism(self, grids_dir, capsys):
        args = ("cube", str(grids_dir / "blocked_unknot14.grid"),
                "--samples", "25", "--seed", "9", "--json")
        code1, out1 = run(capsys, *args)
        code2, out2 = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2


class TestSigns:
    def test_verify_and_compare(self, grids_dir, capsys):
        code, out = run(capsys, "signs", "--n", "3", "--verify", "--compare", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["results"]["axioms"]["violations"] == 0
        assert report["results"]["gauge_found"] is True

    def test_cap_exit_code(self, capsys):
        assert main(["signs", "--n", "20"]) == 3
