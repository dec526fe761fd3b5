import json
import math

import numpy as np
import pytest

from qracsim import cli

GOOD_COUNTS = """a0,a1,y,cc0,cc1
0,0,0,853,147
0,0,1,861,139
0,1,0,849,151
0,1,1,143,857
1,0,0,150,850
1,0,1,858,142
1,1,0,148,852
1,1,1,139,861
"""


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_parse_args_critical_plan():
    plan = cli.parse_args(["critical", "--fa", "0.45", "--fb", "0.45"])
    assert plan.subcommand == "critical"
    assert plan.parameters["fa"] == 0.45
    assert plan.parameters["fb"] == 0.45
    assert plan.parameters["tol"] == 1e-6
    assert plan.output_format == "csv"
    assert plan.destination is None


def test_parse_args_rejects_out_of_range_gamma():
    with pytest.raises(cli.UsageError):
        cli.parse_args(["witness", "--gamma", "1.5"])


def test_witness_ideal_csv_row(capsys):
    code, out, _ = run(capsys, ["witness", "--gamma", "0", "--fa", "0", "--fb", "0"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["gamma", "f_a", "f_b", "W", "P_b", "acceptance_min"]
    assert rows[0] == [
        "0.000000000",
        "0.000000000",
        "0.000000000",
        "2.828427125",
        "0.853553391",
        "1.000000000",
    ]


def test_witness_theta1_matches_gamma(capsys):
    code, via_theta, _ = run(capsys, ["witness", "--theta1", "22.5", "--fa", "0", "--fb", "0"])
    assert code == 0
    code, via_gamma, _ = run(capsys, ["witness", "--gamma", "0.5", "--fa", "0", "--fb", "0"])
    assert code == 0
    # sin^2(45 deg) = 1/2, so both rows except the gamma cell agree
    assert via_theta.splitlines()[1].split(",")[3:] == via_gamma.splitlines()[1].split(",")[3:]


def test_sweep_default_grid_is_five_points(capsys):
    code, out, _ = run(
        capsys,
        ["sweep", "--gamma-start", "0", "--gamma-end", "1", "--steps", "5", "--fa", "0", "--fb", "0"],
    )
    assert code == 0
    _, rows = parse_csv(out)
    gammas = [float(row[0]) for row in rows]
    assert gammas == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert abs(float(rows[1][3]) - 2.285405043) <= 1e-9


def test_classical_bound_json(capsys):
    code, out, _ = run(capsys, ["classical-bound", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["max_witness"] == 2.0
    assert payload["max_asp"] == 0.75
    assert payload["strategies"] == 256
    assert payload["metadata"]["tool"] == "qracsim"
    assert "encoding" in payload["example_strategy"]


def test_critical_csv(capsys):
    code, out, _ = run(capsys, ["critical", "--fa", "0", "--fb", "0"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["f_a", "f_b", "gamma_c", "witness_at_gamma_c"]
    assert abs(float(rows[0][2]) - 0.375830) <= 1e-4
    assert abs(float(rows[0][3]) - 2.0) <= 1e-4


def test_critical_total_filtering_exits_numeric(capsys):
    code, _, err = run(capsys, ["critical", "--fa", "1.0", "--fb", "1.0"])
    assert code == 2
    assert "NoSignChange" in err


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, ["witness", "--gamma", "1.5"])
    assert code == 1
    assert "gamma" in err


def test_unknown_subcommand_exit_code(capsys):
    code, _, _ = run(capsys, ["frobnicate"])
    assert code == 1


def test_missing_required_flag_exit_code(capsys):
    code, _, _ = run(capsys, ["critical", "--fa", "0.4"])
    assert code == 1


def test_ingest_well_formed(tmp_path, capsys):
    path = tmp_path / "counts.csv"
    path.write_text(GOOD_COUNTS)
    code, out, _ = run(capsys, ["ingest", str(path)])
    assert code == 0
    header, rows = parse_csv(out)
    assert header[:5] == ["a0", "a1", "y", "e", "sigma"]
    assert len(rows) == 8
    assert float(rows[0][3]) == 0.853
    witness_value = float(rows[0][5])
    assert abs(witness_value - 2.831) <= 0.05


def test_ingest_missing_cell_exits_numeric(tmp_path, capsys):
    path = tmp_path / "seven.csv"
    path.write_text("\n".join(GOOD_COUNTS.splitlines()[:-1]) + "\n")
    code, _, err = run(capsys, ["ingest", str(path)])
    assert code == 2
    assert "a0=1, a1=1, y=1" in err


def test_ingest_bad_header_names_line(tmp_path, capsys):
    path = tmp_path / "bad_header.csv"
    path.write_text("a,b,c\n1,2,3\n")
    code, _, err = run(capsys, ["ingest", str(path)])
    assert code == 1
    assert ":1:" in err


def test_ingest_bad_row_names_line(tmp_path, capsys):
    path = tmp_path / "bad_row.csv"
    lines = GOOD_COUNTS.splitlines()
    lines[3] = "0,1,0,many,151"
    path.write_text("\n".join(lines) + "\n")
    code, _, err = run(capsys, ["ingest", str(path)])
    assert code == 1
    assert ":4:" in err


def test_ingest_missing_file_exits_io(capsys):
    code, _, err = run(capsys, ["ingest", "/no/such/file.csv"])
    assert code == 3
    assert "file" in err.lower()


def test_ingest_labeled_header_roundtrip(tmp_path):
    path = tmp_path / "labeled.csv"
    lines = ["a0,a1,y,cc0,cc1,gamma_label,fa_label,fb_label"]
    for line in GOOD_COUNTS.splitlines()[1:]:
        lines.append(line + ",0.25,0.44,0.44")
    path.write_text("\n".join(lines) + "\n")
    records = cli.read_counts_csv(str(path))
    assert len(records) == 8
    assert records[0].cc0 == 853 and records[0].cc1 == 147
    assert records[0].gamma_label == 0.25


def test_csv_json_parity(capsys, tmp_path):
    commands = [
        ["witness", "--gamma", "0.3", "--fa", "0.45", "--fb", "0.45"],
        ["sweep", "--steps", "3", "--fa", "0.2", "--fb", "0.2"],
        ["critical", "--fa", "0.45", "--fb", "0.45"],
        ["montecarlo", "--steps", "2", "--samples", "200", "--fa", "0.45", "--fb", "0.45"],
        ["classical-bound"],
    ]
    counts = tmp_path / "counts.csv"
    counts.write_text(GOOD_COUNTS)
    commands.append(["ingest", str(counts)])
    for argv in commands:
        code, csv_text, _ = run(capsys, argv + ["--format", "csv"])
        assert code == 0
        code, json_text, _ = run(capsys, argv + ["--format", "json"])
        assert code == 0
        payload = json.loads(json_text)
        _, csv_rows = parse_csv(csv_text)
        assert len(csv_rows) == len(payload["rows"])
        for csv_row, json_row in zip(csv_rows, payload["rows"]):
            for csv_cell, json_cell in zip(csv_row, json_row):
                if isinstance(json_cell, int):
                    assert csv_cell == str(json_cell)
                else:
                    assert csv_cell == cli._csv_value(float(json_cell))


def test_byte_identical_reruns(capsys, monkeypatch):
    argv = [
        "montecarlo", "--steps", "3", "--samples", "400",
        "--fa", "0.45", "--fb", "0.45", "--seed", "7", "--format", "json",
    ]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second
    monkeypatch.setenv("QRAC_THREADS", "4")
    _, threaded, _ = run(capsys, argv)
    assert first == threaded


def test_angle_units_default_degrees(capsys):
    base = ["montecarlo", "--steps", "2", "--samples", "100", "--seed", "11"]
    _, default_out, _ = run(capsys, base)
    _, explicit_out, _ = run(capsys, base + ["--prep-err", "1", "--meas-err", "1"])
    assert default_out == explicit_out
    radians_value = repr(math.radians(1.0))
    _, radian_out, _ = run(
        capsys,
        base + ["--radians", "--prep-err", radians_value, "--meas-err", radians_value],
    )
    assert default_out == radian_out


def test_output_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, ["witness", "--gamma", "0", "--output", str(target)])
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("gamma,f_a,f_b,W,P_b,acceptance_min")


def test_output_unwritable_exits_io(capsys):
    code, _, _ = run(capsys, ["witness", "--gamma", "0", "--output", "/no/such/dir/out.csv"])
    assert code == 3


def test_dump_samples(tmp_path, capsys):
    dump = tmp_path / "samples.csv"
    code, _, _ = run(
        capsys,
        ["montecarlo", "--steps", "2", "--samples", "50", "--dump-samples", str(dump)],
    )
    assert code == 0
    lines = dump.read_text().strip().splitlines()
    assert lines[0] == "gamma,sample,witness,ok"
    assert len(lines) == 1 + 2 * 50


def test_witness_annihilation_exits_numeric(capsys):
    code, _, err = run(capsys, ["witness", "--gamma", "0.3", "--fa", "1.0"])
    assert code == 2
    assert "FilterAnnihilatesState" in err


def test_montecarlo_annihilation_exits_numeric(capsys):
    code, _, err = run(
        capsys,
        ["montecarlo", "--steps", "1", "--samples", "50", "--fa", "1.0"],
    )
    assert code == 2
    assert "FilterAnnihilatesState" in err


def test_exit_code_contract_on_malformed_inputs(capsys):
    cases = [
        (["witness"], 1),                                     # missing required flag
        (["witness", "--gamma", "abc"], 1),                   # non-numeric
        (["sweep", "--steps", "0"], 1),                       # invalid count
        (["montecarlo", "--percentiles", "95,5"], 1),         # inverted percentiles
        (["montecarlo", "--seed", "-3"], 1),                  # negative seed
        (["critical", "--fa", "1.0", "--fb", "1.0"], 2),      # no bracket
        (["ingest", "/missing/file.csv"], 3),                 # I/O
    ]
    for argv, expected in cases:
        code, _, _ = run(capsys, argv)
        assert code == expected, argv
