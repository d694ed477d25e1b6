"""Command line API."""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

import phibv
from phibv.configuration import (
    config,
    read_custom_config,
    read_environ,
    sanitize_config,
    save_to_config,
)
from phibv.data_model.bv import BVFunction, atomize
from phibv.data_model.domain import Domain
from phibv.errors import ConvergenceError, DataFormatError
from phibv.families.base import PhiFunction
from phibv.families.util import phiFromFile
from phibv.io.io import loadSamples, saveSamples
from phibv.io.json import emit_report, read_json

log = logging.getLogger("phibv")

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CONVERGENCE = 4

# option name -> (config section, config option)
_OVERRIDES = {"tol": ("numerics", "tol"), "seed": ("duality", "seed"), "threads": ("numerics", "threads")}


def _common_parser() -> argparse.ArgumentParser:
    """Options accepted before and after the subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--strict",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Exit with code 4 when an iteration cap is reached.",
    )
    parser.add_argument(
        "--tol", type=float, default=argparse.SUPPRESS, help="Tolerance of exact identities."
    )
    parser.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="Seed of the dual searches."
    )
    parser.add_argument(
        "--threads", type=int, default=argparse.SUPPRESS, help="Worker threads, 0 for all cores."
    )
    return parser


def _get_arg_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="phibv",
        description="Generalized Orlicz BV calculus: Φ-functions, dual modulars and Γ-convergent denoising",
        allow_abbrev=False,
        parents=[common],
    )
    parser.add_argument("-c", "--configuration", default="./.phibv.ini")
    parser.add_argument(
        "-l", "--log_lvl", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"phibv {phibv.__version__} (Φ-spec schema {phibv.PHI_SPEC_SCHEMA})",
    )
    subparsers = parser.add_subparsers(dest="subcommand")

    def add(name: str, help: str, func) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help, parents=[common], allow_abbrev=False)
        sub.set_defaults(func=func)
        return sub

    def phiArg(sub: argparse.ArgumentParser):
        sub.add_argument("--phi", type=Path, required=True, help="Φ-spec JSON file.")

    def reportArg(sub: argparse.ArgumentParser):
        sub.add_argument("--report", type=Path, help="Write the JSON report to this path.")

    def signalArgs(sub: argparse.ArgumentParser):
        sub.add_argument("--signal", type=Path, required=True, help="Samples, CSV or PGM.")
        sub.add_argument("--atoms", type=Path, help="Atom CSV, x,jump (1D) or axis,i,j,jump (2D).")
        sub.add_argument(
            "--threshold",
            type=float,
            help="Without --atoms, turn differences above this value into atoms.",
        )

    # showconf
    showconf_parser = add("showconf", "Print phibv configuration in INI format.", showconf)
    showconf_parser.add_argument(
        "--default",
        action="store_true",
        help="Print the default configuration",
        dest="showconf_default",
    )

    # conjugate
    conjugate_parser = add("conjugate", "Evaluate φ*(x, s) on a list or grid of s.", conjugate)
    phiArg(conjugate_parser)
    conjugate_parser.add_argument("--x", type=float, nargs="+", help="Point, default domain centre.")
    grid = conjugate_parser.add_mutually_exclusive_group()
    grid.add_argument("--s", type=float, nargs="+", help="Arguments s ≥ 0.")
    grid.add_argument(
        "--grid", type=float, nargs=3, metavar=("SMIN", "SMAX", "COUNT"), help="Geometric s-grid."
    )
    conjugate_parser.add_argument(
        "--numeric", action="store_true", help="Add the numerical Legendre transform."
    )
    reportArg(conjugate_parser)

    # modular
    modular_parser = add("modular", "Closed-form modular of a decomposed BV function.", modular)
    phiArg(modular_parser)
    signalArgs(modular_parser)
    modular_parser.add_argument("--fidelity", type=Path, help="Target f, adds ‖u − f‖²₂.")
    reportArg(modular_parser)

    # dual estimators
    for name, func, help in [
        ("dualsup", dualsup, "Lower estimate of the dual modular."),
        ("dualnorm", dualnorm, "Lower estimate of the dual norm V_φ."),
    ]:
        sub = add(name, help, func)
        phiArg(sub)
        signalArgs(sub)
        sub.add_argument("--strategy", type=Path, help="Search strategy JSON.")
        reportArg(sub)
        if name == "dualnorm":
            sub.add_argument(
                "--equivalence",
                action="store_true",
                help="Also compare with the Luxemburg norm of the dual modular.",
            )

    # denoise
    denoise_parser = add("denoise", "Minimize F_p for a noisy signal or image.", denoise)
    phiArg(denoise_parser)
    denoise_parser.add_argument("--input", type=Path, required=True, help="Target f, CSV or PGM.")
    denoise_parser.add_argument("--p", type=float, required=True, help="Exponent p > 1.")
    denoise_parser.add_argument("--out", type=Path, required=True, help="Minimizer, CSV or PGM.")
    reportArg(denoise_parser)

    # gamma-sweep
    sweep_parser = add("gamma-sweep", "Minimize F_p along p_k = 1 + 2^-k.", gamma_sweep)
    phiArg(sweep_parser)
    sweep_parser.add_argument("--input", type=Path, required=True, help="Target f, CSV or PGM.")
    sweep_parser.add_argument("--kmax", type=int, default=8, help="Sweep length, at most 12.")
    sweep_parser.add_argument("--hdf5", type=Path, help="Export the sweep to HDF5.")
    reportArg(sweep_parser)

    # check-conditions
    conditions_parser = add(
        "check-conditions", "Estimate (A0), growth, log-Hölder and (VA1).", check_conditions
    )
    phiArg(conditions_parser)
    conditions_parser.add_argument("--K", type=float, default=1.0, help="Constant of (A1)/(VA1).")
    reportArg(conditions_parser)

    # approx
    approx_parser = add("approx", "Modular of mollified approximations.", approx)
    phiArg(approx_parser)
    signalArgs(approx_parser)
    approx_parser.add_argument("--deltas", type=float, nargs="+", help="Mollifier widths.")
    reportArg(approx_parser)
    return parser


@dataclasses.dataclass
class RunConfig:
    """Resolved command line: what to run and on which files."""

    command: str
    args: argparse.Namespace
    phi: Optional[Path] = None
    inputs: Dict[str, Path] = dataclasses.field(default_factory=dict)
    outputs: Dict[str, Path] = dataclasses.field(default_factory=dict)
    strict: bool = False
    tol: float = 1e-8
    seed: int = 0
    threads: int = 0


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse arguments and merge them into the global configuration.

    CLI flags override environment variables, which override the
    configuration file, which overrides the defaults. Unknown flags and
    missing input files are usage errors (exit code 2).
    """
    parser = _get_arg_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_help()
        parser.exit(EXIT_USAGE)

    # 1) Read custom configuration
    if args.configuration:
        read_custom_config(args.configuration)

    # 2) Read environment variables
    read_environ()

    # 3) Command line overrides
    if args.log_lvl:
        save_to_config("log_lvl", args.log_lvl)
    for key in _OVERRIDES:
        if hasattr(args, key):
            section, option = _OVERRIDES[key]
            config.set(section, option, str(getattr(args, key)))

    sanitize_config(config)
    log.setLevel(config.get("debug", "log_lvl"))

    inputs = {
        key: getattr(args, key)
        for key in ["signal", "atoms", "fidelity", "input", "strategy"]
        if getattr(args, key, None) is not None
    }
    phiPath = getattr(args, "phi", None)
    for name, path in [("phi", phiPath)] + list(inputs.items()):
        if path is not None and not Path(path).is_file():
            parser.error(f"argument --{name}: file {path} does not exist")
    outputs = {
        key: getattr(args, key)
        for key in ["report", "out", "hdf5"]
        if getattr(args, key, None) is not None
    }
    for key, path in outputs.items():
        if not Path(path).parent.exists():
            parser.error(f"argument --{key}: directory {Path(path).parent} does not exist")

    return RunConfig(
        args.subcommand,
        args,
        phiPath,
        inputs,
        outputs,
        bool(getattr(args, "strict", False)),
        config.getfloat("numerics", "tol"),
        config.getint("duality", "seed"),
        config.getint("numerics", "threads"),
    )


def cli(argv: Optional[List[str]] = None):
    """Command line entrypoint."""
    run = parse_config(argv)
    try:
        run.args.func(run)
    except ConvergenceError as e:
        log.error(str(e))
        print(f"phibv: {e}", file=sys.stderr)
        sys.exit(EXIT_CONVERGENCE)
    except ValueError as e:
        print(f"phibv: {e}", file=sys.stderr)
        sys.exit(EXIT_DATA)


def _defaultDomain() -> Domain:
    return Domain.interval(
        config.getfloat("domain", "extent_lo"),
        config.getfloat("domain", "extent_hi"),
        config.getint("domain", "n"),
    )


def _loadBV(run: RunConfig) -> Tuple[BVFunction, PhiFunction]:
    """BV function from --signal/--atoms and the Φ-function bound to its grid."""
    from phibv.io.pandas import load_atoms

    samples, domain = loadSamples(run.inputs["signal"])
    phi = phiFromFile(run.phi, domain)
    if "atoms" in run.inputs:
        try:
            u = BVFunction.fromSamples(domain, samples, load_atoms(run.inputs["atoms"], domain))
        except ValueError as e:
            raise DataFormatError(str(run.inputs["atoms"]), str(e)) from e
    elif run.args.threshold is not None:
        u = atomize(domain, samples, run.args.threshold)
    else:
        u = BVFunction.fromSamples(domain, samples)
    return u, phi


def _finish(run: RunConfig, kind: str, body: Dict[str, Any], text: str):
    """Print the text summary and write the JSON report."""
    print(text)
    if "report" in run.outputs:
        emit_report(kind, body, run.outputs["report"])
        log.info(f"Report written to {run.outputs['report']}")


def _checkCap(run: RunConfig, capReached: bool, what: str):
    if capReached and run.strict:
        raise ConvergenceError(f"{what} reached its iteration cap.")


def showconf(run: RunConfig):
    """Print current phibv configuration in INI format."""
    from phibv.configuration import _default_config

    if run.args.showconf_default:
        config.read_dict(_default_config)
        config.write(sys.stdout)
    else:
        config.write(sys.stdout)


def conjugate(run: RunConfig):
    """Evaluate the conjugate at one point."""
    from phibv.conjugate import conjugate_numeric
    from phibv.phi import conjugate_eval

    domain = _defaultDomain()
    phi = phiFromFile(run.phi, domain)
    domain = phi.domain or domain
    if run.args.x is not None:
        x = np.asarray(run.args.x[0] if len(run.args.x) == 1 else run.args.x, dtype=float)
    else:
        x = np.asarray([0.5 * (lo + hi) for lo, hi in domain.extent], dtype=float)
        x = x[0] if x.size == 1 else x
    if run.args.grid is not None:
        smin, smax, count = run.args.grid
        s = np.geomspace(smin, smax, int(count))
    else:
        s = np.asarray(run.args.s if run.args.s is not None else [0.5, 1.0, 2.0], dtype=float)
    xs = np.broadcast_to(x, s.shape + x.shape)
    values = np.asarray(conjugate_eval(phi, xs, s), dtype=float)
    body: Dict[str, Any] = {
        "family": phi.id,
        "x": x,
        "s": s,
        "values": values,
        "closed_form": phi.closedConjugate,
    }
    table = pd.DataFrame({"s": s, "φ*(x, s)": values})
    if run.args.numeric:
        body["numeric"] = conjugate_numeric(phi, xs, s)
        table["numeric"] = body["numeric"]
    _finish(run, "conjugate", body, table.to_markdown(index=False, stralign="right"))


def modular(run: RunConfig):
    """Closed-form modular, with fidelity when --fidelity is given."""
    from phibv.io.text_report import modular_table
    from phibv.modular import classify_space, modular_exact, modular_fidelity, total_variation

    u, phi = _loadBV(run)
    if "fidelity" in run.inputs:
        f, fDomain = loadSamples(run.inputs["fidelity"])
        if fDomain.shape != u.domain.shape:
            raise DataFormatError(str(run.inputs["fidelity"]), "target grid differs from the signal grid")
        report = modular_fidelity(phi, u, f)
    else:
        report = modular_exact(phi, u)
    body = report.toDict()
    body["total_variation"] = total_variation(u)
    if phi.isAutonomous:
        body["space"] = classify_space(phi).value
    _finish(run, "modular", body, modular_table(report))


def _strategy(run: RunConfig):
    from phibv.duality import StrategyConfig

    strategy = StrategyConfig.fromConfig()
    if "strategy" in run.inputs:
        path = run.inputs["strategy"]
        try:
            strategy = strategy.update(read_json(path))
        except DataFormatError:
            raise
        except ValueError as e:
            raise DataFormatError(str(path), str(e)) from e
    return strategy


def dualsup(run: RunConfig):
    """Dual modular estimate."""
    from phibv.duality import dual_sup

    u, phi = _loadBV(run)
    strategy = _strategy(run)
    estimate = dual_sup(phi, u, strategy)
    body = estimate.toDict()
    body["strategy"] = strategy.toDict()
    text = (
        f"Dual modular estimate: {estimate.value:.10g}\n"
        f"Closed-form gap: {estimate.gap_vs_exact}\n"
        f"Evaluations: {estimate.evaluations}"
    )
    _finish(run, "dualsup", body, text)
    _checkCap(run, estimate.capReached, "Dual search")


def dualnorm(run: RunConfig):
    """Dual norm estimate, optionally with the equivalence check."""
    from phibv.duality import dual_norm_V, equivalence_check

    u, phi = _loadBV(run)
    strategy = _strategy(run)
    estimate = dual_norm_V(phi, u, strategy)
    body = estimate.toDict()
    body["strategy"] = strategy.toDict()
    text = f"Dual norm estimate: {estimate.value:.10g}"
    if run.args.equivalence:
        equivalence = equivalence_check(phi, u, strategy)
        body["equivalence"] = equivalence.toDict()
        text += (
            f"\nModular norm: {equivalence.modular_norm:.10g}"
            f"\nEquivalence holds: {equivalence.holds}"
        )
    _finish(run, "dualnorm", body, text)
    _checkCap(run, estimate.capReached, "Dual search")


def denoise(run: RunConfig):
    """Minimize F_p for the input and store the minimizer."""
    from phibv.solver import EnergySpec, minimize_Fp

    f, domain = loadSamples(run.inputs["input"])
    phi = phiFromFile(run.phi, domain)
    spec = EnergySpec(phi, run.args.p, f, domain)
    result = minimize_Fp(spec)
    saveSamples(run.outputs["out"], result.u, domain)
    body = {
        "p": run.args.p,
        "energy": result.energy,
        "iterations": result.iterations,
        "cap_reached": result.capReached,
        "epsilon": spec.epsilon,
    }
    text = f"Energy {result.energy:.10g} after {result.iterations} iterations"
    _finish(run, "denoise", body, text)
    _checkCap(run, result.capReached, "F_p minimization")


def gamma_sweep(run: RunConfig):
    """Γ-sweep toward p = 1."""
    from phibv.io.text_report import sweep_table
    from phibv.solver import gamma_sweep as sweep

    f, domain = loadSamples(run.inputs["input"])
    phi = phiFromFile(run.phi, domain)
    result = sweep(phi, f, domain, run.args.kmax)
    if "hdf5" in run.outputs:
        from phibv.io.hdf5 import exportSweep

        exportSweep(run.outputs["hdf5"], result, domain)
    _finish(run, "gamma-sweep", result.toDict(), sweep_table(result))
    _checkCap(run, "iteration cap reached" in result.flags, "Γ-sweep")


def check_conditions(run: RunConfig):
    """Run the condition estimators on the Φ-function's domain."""
    from phibv.conditions import check_A0, check_A1, check_growth, check_VA1, log_holder_modulus
    from phibv.io.text_report import conditions_table

    phi = phiFromFile(run.phi, _defaultDomain())
    domain = phi.domain
    reports = [
        check_A0(phi, domain),
        check_growth(phi, domain),
        check_A1(phi, domain, run.args.K),
        check_VA1(phi, domain, run.args.K),
    ]
    if "p" in phi.fields:
        reports.append(log_holder_modulus(phi.fields["p"], domain))
        reports.append(log_holder_modulus(phi.fields["p"], domain, strong=True))
    body = {"family": phi.id, "conditions": [report.toDict() for report in reports]}
    _finish(run, "check-conditions", body, conditions_table(reports))


def approx(run: RunConfig):
    """Modular of mollified approximations."""
    from phibv.solver import smooth_approximation

    u, phi = _loadBV(run)
    trace = smooth_approximation(phi, u, run.args.deltas)
    table = pd.DataFrame({"δ": trace.deltas, "ρ_φ(|∇u_δ|)": trace.values}).to_markdown(
        index=False, stralign="right"
    )
    _finish(run, "approx", trace.toDict(), table + f"\n\nClosed form: {trace.target}")
