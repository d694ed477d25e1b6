import configparser
import json
import subprocess
from pathlib import Path

import numpy as np
import pytest

import phibv
from phibv.api.cli import _get_arg_parser, parse_config
from phibv.configuration import _default_config, config
from phibv.data_model.report import Verdict
from phibv.io.pandas import load_signal


@pytest.fixture(autouse=True)
def reset_config():
    yield
    config.clear()
    config.read_dict(_default_config)


def write_step(path: Path, n: int = 32, height: float = 1.0) -> Path:
    x = (np.arange(n) + 0.5) / n
    values = height * (x > 0.5)
    path.write_text("".join(f"{float(xi)!r},{float(vi)!r}\n" for xi, vi in zip(x, values)))
    return path


def write_phi(path: Path, phiDict: dict) -> Path:
    path.write_text(json.dumps(phiDict))
    return path


def test_no_subcommand():
    processOut = subprocess.run(["phibv"], capture_output=True, text=True, timeout=10)
    assert processOut.returncode == 2
    assert processOut.stdout == _get_arg_parser().format_help()


def test_version():
    processOut = subprocess.run(["phibv", "--version"], capture_output=True, text=True)
    assert processOut.stdout.strip() == (
        f"phibv {phibv.__version__} (Φ-spec schema {phibv.PHI_SPEC_SCHEMA})"
    )


def test_showconf_command(defaultConfig: configparser.ConfigParser):
    processorOut = subprocess.run(
        ["phibv", "showconf"], capture_output=True, text=True
    ).stdout
    parser = configparser.ConfigParser(allow_no_value=True)
    parser.read_string(processorOut)
    assert parser == defaultConfig


def test_showconf_command_with_cli_args(defaultConfig: configparser.ConfigParser):
    processorOut = subprocess.run(
        ["phibv", "--log_lvl", "ERROR", "showconf"], capture_output=True, text=True
    ).stdout
    parser = configparser.ConfigParser(allow_no_value=True)
    parser.read_string(processorOut)
    defaultConfig.set("debug", "log_lvl", "ERROR")
    assert parser == defaultConfig


def test_showconf_command_with_conf_file(
    defaultConfig: configparser.ConfigParser, tmp_path: Path
):
    confPath = tmp_path / ".phibv.ini"
    defaultConfig.set("duality", "m_points", "9")
    with open(confPath, "w+") as configFile:
        defaultConfig.write(configFile)

    processorOut = subprocess.run(
        ["phibv", "--configuration", str(confPath), "showconf"],
        capture_output=True,
        text=True,
    ).stdout
    parser = configparser.ConfigParser(allow_no_value=True)
    parser.read_string(processorOut)
    assert parser.get("duality", "m_points") == "9"
    assert parser == defaultConfig

    processorOut = subprocess.run(
        ["phibv", "--configuration", str(confPath), "showconf", "--default"],
        capture_output=True,
        text=True,
    ).stdout
    parser = configparser.ConfigParser(allow_no_value=True)
    parser.read_string(processorOut)
    assert parser.get("duality", "m_points") == "25"


@pytest.mark.parametrize(
    "argv",
    [
        ["modular", "--signal", "f.csv"],
        ["modular", "--phi", "missing.json", "--signal", "f.csv"],
        ["denoise", "--phi", "phi.json", "--input", "f.csv", "--p", "1.5", "--out", "no/dir/u.csv"],
        ["modular", "--phi", "phi.json", "--signal", "f.csv", "--unknown"],
    ],
    ids=["missing_phi", "missing_file", "missing_out_dir", "unknown_flag"],
)
def test_usage_errors(argv, tmp_path: Path):
    write_phi(tmp_path / "phi.json", {"family": "linear"})
    write_step(tmp_path / "f.csv")
    processOut = subprocess.run(
        ["phibv"] + argv, capture_output=True, text=True, cwd=tmp_path, timeout=10
    )
    assert processOut.returncode == 2


def test_data_errors(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = tmp_path / "f.csv"
    signal.write_text("0,0\n0.5,abc\n1,0\n")
    processOut = subprocess.run(
        ["phibv", "modular", "--phi", str(phiPath), "--signal", str(signal)],
        capture_output=True,
        text=True,
        timeout=10,
    )
    assert processOut.returncode == 3
    assert f"{signal}, line 2" in processOut.stderr

    badPhi = write_phi(tmp_path / "bad.json", {"family": "spline"})
    processOut = subprocess.run(
        ["phibv", "modular", "--phi", str(badPhi), "--signal", str(write_step(signal))],
        capture_output=True,
        text=True,
        timeout=10,
    )
    assert processOut.returncode == 3


def test_parse_config(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv")
    run = parse_config(
        ["--tol", "1e-6", "modular", "--phi", str(phiPath), "--signal", str(signal), "--seed", "3"]
    )
    assert run.command == "modular"
    assert run.tol == 1e-6
    assert run.seed == 3
    assert not run.strict
    assert run.inputs == {"signal": signal}
    assert config.getfloat("numerics", "tol") == 1e-6


def test_modular_command(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=2.0)
    reports = []
    for name in ["a.json", "b.json"]:
        reportPath = tmp_path / name
        processOut = subprocess.run(
            [
                "phibv",
                "modular",
                "--phi",
                str(phiPath),
                "--signal",
                str(signal),
                "--threshold",
                "0.5",
                "--report",
                str(reportPath),
            ],
            capture_output=True,
            text=True,
            timeout=20,
        )
        assert processOut.returncode == 0
        reports.append(reportPath.read_bytes())

    assert reports[0] == reports[1]
    report = json.loads(reports[0])
    for key in ["ac_part", "singular_part", "total", "atoms", "kind", "version", "schema", "config"]:
        assert key in report
    assert report["kind"] == "modular"
    assert report["total"] == pytest.approx(2.0)
    assert report["total_variation"] == pytest.approx(2.0)
    assert report["space"] == "ClassicalBV"
    assert report["warnings"] == []


def test_conjugate_command(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "autonomous", "coef": 1.0, "exponent": 2.0})
    reportPath = tmp_path / "conjugate.json"
    processOut = subprocess.run(
        [
            "phibv",
            "conjugate",
            "--phi",
            str(phiPath),
            "--x",
            "0.5",
            "--s",
            "0",
            "1",
            "2",
            "--report",
            str(reportPath),
        ],
        capture_output=True,
        text=True,
        timeout=20,
    )
    assert processOut.returncode == 0
    report = json.loads(reportPath.read_text())
    # φ(t) = t² has φ*(s) = s²/4
    assert report["values"] == pytest.approx([0.0, 0.25, 1.0])
    assert report["closed_form"] is True


def test_denoise_command(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=4.0)
    outPath = tmp_path / "u.csv"
    reportPath = tmp_path / "denoise.json"
    processOut = subprocess.run(
        [
            "phibv",
            "denoise",
            "--phi",
            str(phiPath),
            "--input",
            str(signal),
            "--p",
            "1.5",
            "--out",
            str(outPath),
            "--report",
            str(reportPath),
        ],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert processOut.returncode == 0
    u, domain = load_signal(outPath)
    assert domain.n == 32
    assert 0.0 < u[-1] - u[0] < 4.0
    report = json.loads(reportPath.read_text())
    assert report["p"] == 1.5
    assert report["cap_reached"] is False


def test_dualsup_command(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=2.0)
    strategyPath = write_phi(
        tmp_path / "strategy.json",
        {"m_points": 9, "delta_points": 8, "refine_iters": 30, "iters": 2},
    )
    reportPath = tmp_path / "dualsup.json"
    processOut = subprocess.run(
        [
            "phibv",
            "dualsup",
            "--phi",
            str(phiPath),
            "--signal",
            str(signal),
            "--threshold",
            "0.5",
            "--strategy",
            str(strategyPath),
            "--report",
            str(reportPath),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert processOut.returncode == 0
    assert "Dual modular estimate" in processOut.stdout
    report = json.loads(reportPath.read_text())
    for key in ["value", "optimizer", "cap_reached", "evaluations", "strategy"]:
        assert key in report
    assert report["kind"] == "dualsup"
    assert report["strategy"]["m_points"] == 9
    # |w| ≤ 1 against a single jump of height 2
    assert report["value"] == pytest.approx(2.0, rel=0.02)
    assert report["value"] <= 2.0 + 1e-9


def test_dualnorm_command_with_equivalence(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=2.0)
    strategyPath = write_phi(
        tmp_path / "strategy.json",
        {"m_points": 9, "delta_points": 8, "refine_iters": 30, "iters": 2, "equivalence_iters": 20},
    )
    reportPath = tmp_path / "dualnorm.json"
    processOut = subprocess.run(
        [
            "phibv",
            "dualnorm",
            "--phi",
            str(phiPath),
            "--signal",
            str(signal),
            "--threshold",
            "0.5",
            "--strategy",
            str(strategyPath),
            "--equivalence",
            "--report",
            str(reportPath),
        ],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert processOut.returncode == 0
    assert "Equivalence holds" in processOut.stdout
    report = json.loads(reportPath.read_text())
    assert report["kind"] == "dualnorm"
    assert report["value"] == pytest.approx(2.0, rel=0.02)
    equivalence = report["equivalence"]
    for key in ["modular_norm", "dual_norm", "lower_ratio", "upper_ratio", "holds"]:
        assert key in equivalence
    assert equivalence["holds"] is True


def test_gamma_sweep_command(tmp_path: Path):
    from phibv.io.hdf5 import importSweep

    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=4.0)
    reportPath = tmp_path / "sweep.json"
    hdf5Path = tmp_path / "sweep.hdf5"
    processOut = subprocess.run(
        [
            "phibv",
            "gamma-sweep",
            "--phi",
            str(phiPath),
            "--input",
            str(signal),
            "--kmax",
            "3",
            "--hdf5",
            str(hdf5Path),
            "--report",
            str(reportPath),
        ],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert processOut.returncode == 0
    report = json.loads(reportPath.read_text())
    for key in ["schedule", "energies", "lower_bounds", "limit_modular", "jump_atoms", "flags"]:
        assert key in report
    assert report["kind"] == "gamma-sweep"
    assert report["schedule"] == pytest.approx([1.5, 1.25, 1.125])
    assert len(report["energies"]) == 3

    assert hdf5Path.is_file()
    stored = importSweep(hdf5Path)
    assert np.allclose(stored["schedule"], report["schedule"])
    assert np.allclose(stored["energies"], report["energies"])
    assert stored["flags"] == report["flags"]
    assert stored["domain"].n == 32


def test_check_conditions_command(tmp_path: Path):
    phiPath = write_phi(
        tmp_path / "phi.json",
        {
            "family": "power_varexp",
            "p": {"kind": "const", "value": 1.5},
            "domain": {"extent": [0.0, 1.0], "n": 64},
        },
    )
    reportPath = tmp_path / "conditions.json"
    processOut = subprocess.run(
        ["phibv", "check-conditions", "--phi", str(phiPath), "--report", str(reportPath)],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert processOut.returncode == 0
    report = json.loads(reportPath.read_text())
    assert report["kind"] == "check-conditions"
    assert report["family"] == "power_varexp"
    names = [condition["condition"] for condition in report["conditions"]]
    assert names == ["A0", "growth", "A1", "VA1", "log_holder", "strong_log_holder"]
    for condition in report["conditions"]:
        assert condition["verdict"] in [verdict.value for verdict in Verdict]
    # p > 1 everywhere
    assert report["conditions"][-1]["verdict"] == "vacuous"
    assert report["conditions"][-1]["holds"] is True


def test_approx_command(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=2.0)
    reportPath = tmp_path / "approx.json"
    processOut = subprocess.run(
        [
            "phibv",
            "approx",
            "--phi",
            str(phiPath),
            "--signal",
            str(signal),
            "--threshold",
            "0.5",
            "--deltas",
            "0.1",
            "0.01",
            "--report",
            str(reportPath),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert processOut.returncode == 0
    assert "Closed form" in processOut.stdout
    report = json.loads(reportPath.read_text())
    assert report["kind"] == "approx"
    assert report["deltas"] == pytest.approx([0.1, 0.01])
    assert report["shrunk"] is False
    assert report["target"] == pytest.approx(2.0)
    assert report["values"] == pytest.approx([2.0, 2.0], rel=1e-3)


def test_strict_exit_on_iteration_cap(tmp_path: Path):
    phiPath = write_phi(tmp_path / "phi.json", {"family": "linear"})
    signal = write_step(tmp_path / "f.csv", height=4.0)
    confPath = tmp_path / "capped.ini"
    confPath.write_text("[solver]\nmax_iter = 1\n")
    argv = [
        "phibv",
        "--configuration",
        str(confPath),
        "denoise",
        "--phi",
        str(phiPath),
        "--input",
        str(signal),
        "--p",
        "1.5",
        "--out",
        str(tmp_path / "u.csv"),
        "--report",
        str(tmp_path / "denoise.json"),
    ]

    processOut = subprocess.run(argv, capture_output=True, text=True, timeout=60)
    assert processOut.returncode == 0
    assert json.loads((tmp_path / "denoise.json").read_text())["cap_reached"] is True

    processOut = subprocess.run(argv + ["--strict"], capture_output=True, text=True, timeout=60)
    assert processOut.returncode == 4
    assert "iteration cap" in processOut.stderr
    # outputs are written before the cap is enforced
    assert (tmp_path / "u.csv").is_file()
