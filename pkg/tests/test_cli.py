import json

import pytest

from selbounds import simulate, write_csv, zika_spec
from selbounds.cli import run
from selbounds.dataset import ZIKA_LEARNER_SEED


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(zika_spec().to_dict()))
    return str(path)


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "zika.csv"
    write_csv(simulate(zika_spec(), 5000, ZIKA_LEARNER_SEED), path)
    return str(path)


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSvParams:
    def test_text_output_matches_published_lines(self, capsys, model_file):
        code, out, _ = invoke(
            capsys,
            "sv-params", "--model", model_file, "--estimand", "rr-sub",
            "--py1-t1-s1", "0.286", "--py1-t0-s1", "0.004",
            "--format", "text", "--round", "4",
        )
        assert code == 0
        lines = out.splitlines()
        assert '"BF_U" 1.5625' in lines
        assert '"RR_UY|S=1" 2.7089' in lines
        assert '"RR_TU|S=1" 2.3293' in lines
        assert '"Reverse treatment" TRUE' in lines

    def test_json_output(self, capsys, model_file):
        code, out, _ = invoke(
            capsys,
            "sv-params", "--model", model_file, "--estimand", "RR_sub",
            "--py1-t1-s1", "0.286", "--py1-t0-s1", "0.004",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["reverse_treatment"] is True
        assert payload["BF_U"] == pytest.approx(1.5625, abs=5e-5)

    def test_matches_library_exactly(self, capsys, model_file):
        from selbounds import EstimandKind, sv_bound_parameters_m

        code, out, _ = invoke(
            capsys,
            "sv-params", "--model", model_file, "--estimand", "rr-sub",
            "--py1-t1-s1", "0.286", "--py1-t0-s1", "0.004",
        )
        payload = json.loads(out)
        expected = sv_bound_parameters_m(zika_spec(), EstimandKind.RR_SUB, 0.286, 0.004)
        assert payload["BF_U"] == expected.bounding_factors["BF_U"]
        assert payload["RR_UY|S=1"] == expected.params.rr_uy_s1

    def test_unreadable_model_file(self, capsys):
        code, _, err = invoke(
            capsys,
            "sv-params", "--model", "/nonexistent.json", "--estimand", "rr-sub",
            "--py1-t1-s1", "0.3", "--py1-t0-s1", "0.1",
        )
        assert code == 2
        assert "error" in err


class TestSvBound:
    def test_subpopulation_published_value(self, capsys):
        code, out, _ = invoke(
            capsys,
            "sv-bound", "--estimand", "rr-sub",
            "--rr-uy-s1", "2.71", "--rr-tu-s1", "2.33",
            "--format", "text", "--round", "2",
        )
        assert code == 0
        assert out.strip() == '"SV bound" 1.56'

    def test_domain_error_exit_code(self, capsys):
        code, _, err = invoke(
            capsys,
            "sv-bound", "--estimand", "rr-sub",
            "--rr-uy-s1", "0.5", "--rr-tu-s1", "2.33",
        )
        assert code == 2
        assert "must be" in err

    def test_total_risk_difference_needs_observed(self, capsys):
        code, _, err = invoke(
            capsys,
            "sv-bound", "--estimand", "rd-tot",
            "--rr-uy-t1", "2", "--rr-uy-t0", "2", "--rr-su-t1", "2", "--rr-su-t0", "2",
        )
        assert code == 2

    def test_total_risk_difference_value(self, capsys):
        code, out, _ = invoke(
            capsys,
            "sv-bound", "--estimand", "rd-tot",
            "--rr-uy-t1", "2", "--rr-uy-t0", "2", "--rr-su-t1", "2", "--rr-su-t0", "2",
            "--py1-t1-s1", "0.4", "--py1-t0-s1", "0.1",
        )
        assert code == 0
        payload = json.loads(out)
        bf = 4.0 / 3.0
        assert payload["value"] == pytest.approx(bf - 0.4 / bf + 0.1 * bf, abs=1e-12)


class TestAfBound:
    def test_csv_with_reversal_matches_published_value(self, capsys, data_file):
        code, out, _ = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub", "--csv", data_file,
            "--selection-col", "sel_ind", "--reverse-treatment",
            "--format", "text", "--round", "2",
        )
        assert code == 0
        assert out.strip() == '"AF bound" 3.5'

    def test_selection_probability_variant_agrees(self, capsys, data_file):
        from selbounds import read_csv

        data = read_csv(data_file)
        keep = data.column("sel_ind") == 1
        prob = int(keep.sum()) / data.n
        selected = data_file + ".sel.csv"
        from selbounds.dataset import Dataset, write_csv as wcsv

        sel_cols = {name: col[keep] for name, col in data.columns.items()}
        wcsv(Dataset(columns=sel_cols, selection_cols=data.selection_cols), selected)
        code1, out1, _ = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub", "--csv", data_file,
            "--selection-col", "sel_ind", "--reverse-treatment",
        )
        code2, out2, _ = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub", "--csv", selected,
            "--selection-prob", str(prob), "--reverse-treatment",
        )
        assert code1 == code2 == 0
        assert json.loads(out1)["value"] == json.loads(out2)["value"]

    def test_summary_flags_variant(self, capsys):
        code, out, _ = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub",
            "--py1-t1-s1", "0.5", "--py1-t0-s1", "0.5", "--pt1-s1", "0.5",
        )
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(3.0, abs=1e-12)

    def test_missing_selection_information(self, capsys, data_file):
        code, _, err = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub", "--csv", data_file,
        )
        assert code == 2

    def test_constant_probability_selection_column(self, capsys, tmp_path, data_file):
        # a float selection column carries the probability variant inside
        # the file itself: rows are the pre-selected subpopulation
        import numpy as np

        from selbounds import read_csv

        data = read_csv(data_file)
        keep = data.column("sel_ind") == 1
        prob = int(keep.sum()) / data.n
        path = tmp_path / "prob.csv"
        with open(path, "w") as fh:
            fh.write("mic_ceph,zika,psel\n")
            for y, t in zip(data.column("mic_ceph")[keep], data.column("zika")[keep]):
                fh.write(f"{y},{t},{prob}\n")
        code1, out1, _ = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub", "--csv", str(path),
            "--outcome-col", "mic_ceph", "--treatment-col", "zika",
            "--selection-col", "psel", "--reverse-treatment",
        )
        code2, out2, _ = invoke(
            capsys,
            "af-bound", "--estimand", "rr-sub", "--csv", data_file,
            "--selection-col", "sel_ind", "--reverse-treatment",
        )
        assert code1 == code2 == 0
        assert json.loads(out1)["value"] == json.loads(out2)["value"]


class TestSharp:
    def test_published_verdict_string(self, capsys):
        code, out, _ = invoke(
            capsys,
            "sharp", "--bf-u", "1.56", "--p0", "0.27", "--sv", "1.56", "--af", "3.5",
            "--format", "text",
        )
        assert code == 0
        assert out.strip() == '"SV bound is sharp."'

    def test_json_verdict(self, capsys):
        code, out, _ = invoke(
            capsys, "sharp", "--bf-u", "5", "--p0", "0.5", "--sv", "5", "--af", "3",
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "not_sharp"

    def test_total_population_rejected(self, capsys):
        code, _, err = invoke(
            capsys, "sharp", "--bf-u", "1.5", "--p0", "0.5", "--estimand", "rr-tot",
        )
        assert code == 2
        assert "subpopulation" in err


class TestGrid:
    def test_small_grid_matches_library(self, capsys):
        from selbounds import sharpness_grid

        code, out, _ = invoke(
            capsys,
            "grid", "--uy-min", "1", "--uy-max", "3", "--uy-steps", "3",
            "--tu-min", "1", "--tu-max", "3", "--tu-steps", "3",
            "--p0", "0.5", "--af", "1.8",
        )
        assert code == 0
        payload = json.loads(out)
        expected = sharpness_grid([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 0.5, af_bound=1.8)
        assert payload["bounds"] == [list(r) for r in expected.bounds]
        assert payload["verdicts"] == [[v.value for v in row] for row in expected.verdicts]


class TestSimulateAndSummarize:
    def test_round_trip_through_files(self, capsys, tmp_path):
        out_path = tmp_path / "sim.csv"
        code, out, _ = invoke(
            capsys,
            "simulate", "--zika", "--n", "500", "--seed", "11",
            "--out", str(out_path),
        )
        assert code == 0
        assert json.loads(out)["rows"] == 500

        code, out, _ = invoke(
            capsys, "summarize", "--csv", str(out_path), "--stage", "2",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["stage"] == 2
        assert 0 < payload["n_selected"] < 500

    def test_model_file_variant(self, capsys, tmp_path, model_file):
        out_path = tmp_path / "sim.csv"
        code, _, _ = invoke(
            capsys,
            "simulate", "--model", model_file, "--n", "50", "--seed", "1",
            "--out", str(out_path),
        )
        assert code == 0
        from selbounds import read_csv

        assert read_csv(out_path) == simulate(zika_spec(), 50, 1)

    def test_degenerate_stage_is_computation_error(self, capsys, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text(
            "zika,mic_ceph,birth,hospital,sel_ind,urban,ses\n"
            "0,0,1,1,1,1,0\n"
        )
        code, _, err = invoke(capsys, "summarize", "--csv", str(path), "--stage", "2")
        assert code == 1
        assert "T=1" in err


def test_unknown_flag_exits_two(capsys):
    assert run(["sv-bound", "--estimand", "rr-sub", "--bogus", "1"]) == 2
