import csv
import io
import subprocess
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path

import pytest

from toral_rtf import cli

DATA = str(Path(__file__).resolve().parent.parent / "data" / "eigenforms.txt")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def table(text, header0):
    """Rows of the CSV section that starts with the given first column name."""
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    start = next(i for i, l in enumerate(lines) if l.split(",")[0] == header0)
    rows = []
    for r in csv.reader(io.StringIO("\n".join(lines[start + 1:]))):
        if r and r[0] in ("suite", "lemma", "quantity", "form", "b", "bin_lo"):
            break
        rows.append(r)
    return rows


def values(text):
    return {r[0]: r[1] for r in table(text, "quantity")}


def test_parse_S():
    assert cli.parse_S("2:1, 3:2") == {2: 1, 3: 2}
    assert cli.parse_S("") == {}
    for bad in ("2", "2:x", "2:1,2:2"):
        with pytest.raises(cli.UsageError):
            cli.parse_S(bad)


def test_fmt():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(complex(1.5, -2)) == "1.5-2j"


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 2
    assert run(["geometric", "--weight", "12", "--level", "1"], capsys)[0] == 2
    assert run(["geometric", "--weight", "5", "--level", "1", "--eta", "1"], capsys)[0] == 2
    assert run(["geometric", "--weight", "12", "--level", "1", "--eta", "6"], capsys)[0] == 2
    assert run(["geometric", "--weight", "12", "--level", "1", "--eta", "1", "--S", "4:1"], capsys)[0] == 2
    assert run(["verify-lemmas", "--filter", "nothing-matches"], capsys)[0] == 2
    assert run(["equidist", "--q", "3", "--eta-sign", "?"], capsys)[0] == 2
    assert run(["equidist", "--q", "3", "--eta-sign", "+", "--data", DATA], capsys)[0] == 2
    code, _, err = run(["equidist", "--q", "3", "--eta-sign", "+", "--data", DATA,
                        "--weight", "12", "--level", "1", "--eta", "5"], capsys)
    assert code == 2 and "contradicts" in err


def test_data_errors(tmp_path, capsys):
    missing = str(tmp_path / "none.txt")
    base = ["--weight", "12", "--level", "1", "--eta", "5"]
    assert run(["spectral", *base, "--data", missing], capsys)[0] == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("form x\nweight 12\nconductor 1\nap 2 100000\n", encoding="utf-8")
    code, _, err = run(["spectral", *base, "--data", str(bad)], capsys)
    assert code == 3 and "line 1" in err
    # no data set asserted complete for level 7
    assert run(["rtf", "--weight", "12", "--level", "7", "--eta", "5", "--data", DATA], capsys)[0] == 3


def test_header_and_config(capsys):
    code, out, _ = run(["geometric", "--weight", "12", "--level", "1", "--eta", "5"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# tool toral_rtf ")
    assert lines[1] == "# command geometric"
    conf = [l for l in lines if l.startswith("# config ")]
    assert conf == sorted(conf)
    assert "# config eta=5" in conf and "# config tol=1e-10" in lines
    v = values(out)
    assert float(v["truncation_certificate"]) <= 1e-10


def test_geometric_deterministic_bytes(tmp_path, capsys):
    argv = ["geometric", "--weight", "12", "--level", "1", "--eta", "1", "--S", "2:1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)], capsys)[0] == 0
    assert run(["--threads", "3"] + argv + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_geometric_per_b(capsys):
    code, out, _ = run(["geometric", "--weight", "12", "--level", "1", "--eta", "5", "--per-b"], capsys)
    assert code == 0
    rows = table(out, "b")
    assert rows
    total = sum(complex(r[1].replace("+-", "-")) for r in rows)
    hyp = complex(values(out)["hyperbolic"])
    assert abs(total - hyp) <= 1e-12 * abs(hyp)
    for r in rows:
        Fraction(r[0])


def test_rtf_criterion_run(capsys):
    code, out, _ = run(["rtf", "--weight", "12", "--level", "1", "--eta", "5", "--data", DATA, "--check", "1e-2"], capsys)
    assert code == 0
    v = values(out)
    assert float(v["relative_residual"]) <= 1e-2
    assert "# ingested level1_k12: coefficients from exact q-expansion (4000 terms)" in out
    assert "UNSOUND" not in out


def test_rtf_check_failure(capsys):
    # the level one data set does not describe level 5; force it through
    code, out, _ = run(["rtf", "--weight", "12", "--level", "5", "--eta", "1", "--data", DATA,
                        "--allow-partial", "--check", "1e-6"], capsys)
    assert "UNSOUND" in out
    assert code == 1


def test_rtf_stability_configuration(capsys):
    code, out, _ = run(["rtf", "--weight", "12", "--level", "11", "--eta", "-4", "--data", DATA,
                        "--allow-partial"], capsys)
    assert code == 0
    v = values(out)
    assert v["geometric:hyperbolic"] == "0+0j"
    lhs, uni = complex(v["lhs_spectral"]), complex(v["geometric:unipotent"])
    assert float(v["residual"]) == pytest.approx(abs(lhs - uni), rel=1e-12)


def test_spectral_partial(capsys):
    base = ["spectral", "--weight", "12", "--level", "2", "--eta", "5", "--data", DATA]
    code, out, _ = run(base, capsys)
    assert code == 0 and "UNSOUND" not in out
    assert run(["spectral", "--weight", "14", "--level", "1", "--eta", "5", "--data", DATA], capsys)[0] == 3
    code, out, _ = run(["spectral", "--weight", "14", "--level", "1", "--eta", "5", "--data", DATA,
                        "--allow-partial"], capsys)
    assert code == 0 and "# UNSOUND" in out


def test_verify_lemmas_filter_and_csv(tmp_path, capsys):
    rows_path = tmp_path / "rows.csv"
    code, out, _ = run(["verify-lemmas", "--filter", "spherical", "--csv", str(rows_path)], capsys)
    assert code == 0
    summary = table(out, "suite")
    assert [r[0] for r in summary] == ["spherical"]
    assert summary[0][1] == "PASS"
    rows = list(csv.reader(rows_path.open(encoding="utf-8")))
    assert rows[0] == ["lemma", "case", "closed_form", "oracle", "abs_err"]
    assert len(rows) == 1 + int(summary[0][2])


def test_verify_lemmas_zero_tolerance_fails(capsys):
    code, out, _ = run(["verify-lemmas", "--filter", "c_l,measure,unipotent,duality,characters", "--tol", "0"], capsys)
    assert code == 1
    summary = table(out, "suite")
    # substring filter: c_l also selects c_l_zero and c_l_quadrature
    assert {r[0] for r in summary} == {"c_l", "c_l_zero", "c_l_quadrature", "measure", "unipotent",
                                       "duality", "characters"}
    assert all(r[1] == "FAIL" for r in summary)


def test_equidist_model_only(tmp_path, capsys):
    svg = tmp_path / "mu.svg"
    code, out, _ = run(["equidist", "--q", "5", "--eta-sign", "-", "--bins", "16", "--svg", str(svg)], capsys)
    assert code == 0
    rows = table(out, "bin_lo")
    assert len(rows) == 16
    assert sum(float(r[3]) for r in rows) == pytest.approx(1, abs=1e-9)
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg")


def test_equidist_with_data(tmp_path, capsys):
    svg = tmp_path / "w.svg"
    code, out, _ = run(["equidist", "--q", "3", "--eta-sign", "-", "--data", DATA, "--weight", "12",
                        "--level", "1", "--eta", "5", "--svg", str(svg)], capsys)
    assert code == 0
    rows = table(out, "bin_lo")
    assert sum(float(r[2]) for r in rows) == pytest.approx(1, abs=1e-12)
    assert sum(float(r[3]) for r in rows) == pytest.approx(1, abs=1e-9)
    assert "# discrepancy " in out
    ET.parse(svg)


def test_console_script_module_entry():
    res = subprocess.run([sys.executable, "-m", "toral_rtf.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("toral_rtf ")
