"""``seirlab`` command line.

Exit codes: 0 success, 1 invalid input, 2 numerical failure. Relative
``--out`` paths are resolved against ``$SEIRLAB_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import io
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .bifurcation import (
    FormKind,
    NormalForm,
    backward4_center_manifold,
    backward4_closed_form,
    seir3_center_manifold,
    seir3_closed_form,
    sweep_diagram,
)
from .csvio import CsvTable, format_number, write_csv
from .equilibria import equilibria_summary, next_generation_matrix, r0
from .errors import InvalidArgumentError, NumericalError
from .integrate import simulate
from .model import BackwardModelParams, ModifiedSeirParams
from .scenario import Scenario, load_scenario
from .sensitivity import DEFAULT_REL_STEP, sensitivity_report
from .stability import (
    DEFAULT_LYAPUNOV_SEED,
    dfe_stability_report,
    ee_stability_report,
    lyapunov_dfe_certificate,
)

OUTPUT_DIR_ENV = "SEIRLAB_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

# Default parameters for ``center-manifold --system backward4`` without a scenario.
BACKWARD4_DEFAULT = BackwardModelParams(
    beta1=0.3, beta2=0.1, epsilon=0.2, phi=0.3, sigma=0.1, gamma=0.2, delta=0.3, alpha=0.1
)


class _ArgumentError(InvalidArgumentError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(f"{self.prog}: {message}")


# -- rendering helpers ---------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        sign = "+" if z.imag >= 0 or np.isnan(z.imag) else "-"
        return f"{format_number(z.real)}{sign}{format_number(abs(z.imag))}j"
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return "[" + ", ".join(_fmt(row) for row in value) + "]"
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, (np.bool_, bool)):
        return "true" if value else "false"
    if isinstance(value, (int, float, np.floating, np.integer)):
        return format_number(value.item() if hasattr(value, "item") else value)
    return str(value)


class _Report:
    """Key/value text output preceded by ``#`` header lines."""

    def __init__(self, command: str, description: str):
        self.lines = [f"# seirlab {__version__} {command}: {description}"]

    def comment(self, text: str):
        self.lines.append(f"# {text}")

    def item(self, key: str, value):
        self.lines.append(f"{key} = {_fmt(value)}")

    def blank(self):
        self.lines.append("")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _output_path(out: str) -> Path:
    path = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit_text(text: str, out: Optional[str], stdout) -> None:
    if out is None:
        stdout.write(text)
        return
    path = _output_path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    stdout.write(f"wrote {path}\n")


def _emit_table(table: CsvTable, out: Optional[str], stdout) -> None:
    buf = io.StringIO()
    write_csv(table, buf)
    _emit_text(buf.getvalue(), out, stdout)


def _modified(scenario: Scenario, command: str) -> ModifiedSeirParams:
    if scenario.model != "seir-modified":
        raise InvalidArgumentError(f"{command} needs model seir-modified, scenario has {scenario.model}")
    return scenario.params


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args, stdout) -> None:
    scenario = load_scenario(args.scenario)
    scenario.require_simulation_inputs()
    if args.stride < 1:
        raise InvalidArgumentError("--stride must be at least 1")
    traj = simulate(scenario.system(), scenario.initial_state, scenario.step)
    keep = list(range(0, len(traj), args.stride))
    if keep[-1] != len(traj) - 1:
        keep.append(len(traj) - 1)
    rows = [[traj.times[i], *traj.states[i]] for i in keep]
    step = scenario.step
    table = CsvTable(
        ("t",) + tuple(scenario.labels),
        rows,
        comments=[
            f"seirlab {__version__} simulate: fixed-step RK4 trajectory",
            f"model={scenario.model} dt={format_number(step.dt)} t_start={format_number(step.t_start)} "
            f"t_end={format_number(step.t_end)} stride={args.stride}",
        ],
    )
    _emit_table(table, args.out, stdout)


def cmd_r0(args, stdout) -> None:
    params = _modified(load_scenario(args.scenario), "r0")
    s0 = params.tau / params.mu if args.s0 is None else args.s0
    ngm = next_generation_matrix(params, s0)
    rep = _Report("r0", "basic reproduction number from the next-generation matrix")
    rep.item("r0", ngm.value)
    rep.item("r0_closed_form", r0(params) * s0 * params.mu / params.tau)
    rep.item("s0", s0)
    rep.item("F", ngm.f_matrix)
    rep.item("V", ngm.v_matrix)
    rep.item("FV^-1", ngm.ngm)
    _emit_text(rep.text(), args.out, stdout)


def cmd_equilibria(args, stdout) -> None:
    params = _modified(load_scenario(args.scenario), "equilibria")
    summary = equilibria_summary(params)
    rep = _Report("equilibria", "disease-free and endemic steady states")
    rep.item("r0", summary["r0"])
    rep.item("dfe", summary["dfe"].state)
    rep.item("dfe_residual", summary["dfe"].residual)
    ee = summary["ee"]
    rep.item("ee", "none" if ee is None else ee.state)
    if ee is not None:
        rep.item("ee_residual", ee.residual)
    _emit_text(rep.text(), args.out, stdout)


def cmd_stability(args, stdout) -> None:
    params = _modified(load_scenario(args.scenario), "stability")
    rep = _Report("stability", "eigenvalues and coefficient criteria at each equilibrium")
    reports = [("dfe", dfe_stability_report(params))]
    if r0(params) > 1:
        reports.append(("ee", ee_stability_report(params)))
    for name, report in reports:
        rep.item(f"{name}.state", report.equilibrium.state)
        rep.item(f"{name}.char_poly", report.char_poly.coefficients)
        rep.item(f"{name}.eigenvalues", report.eigenvalues)
        rep.item(f"{name}.verdict", str(report.verdict))
        for key, value in report.criteria.items():
            rep.item(f"{name}.criterion.{key}", value)
        for key, value in report.coefficients.items():
            rep.item(f"{name}.coefficient.{key}", value)
    _emit_text(rep.text(), args.out, stdout)


def cmd_lyapunov(args, stdout) -> None:
    params = _modified(load_scenario(args.scenario), "lyapunov")
    cert = lyapunov_dfe_certificate(params, samples=args.samples, region_radius=args.radius, seed=args.seed)
    rep = _Report("lyapunov", "V = x+y+z+w sampled around the disease-free state")
    rep.comment(f"seed={cert.seed}")
    rep.item("samples", cert.sample_count)
    rep.item("region_radius", cert.region_radius)
    rep.item("max_minus_V_off_origin", cert.max_V_violation)
    rep.item("max_dVdt", cert.max_dVdt)
    rep.item("max_abs_dVdt_plus_mu_V", cert.identity_residual)
    rep.item("certified", cert.verdict)
    _emit_text(rep.text(), args.out, stdout)


def cmd_sensitivity(args, stdout) -> None:
    params = _modified(load_scenario(args.scenario), "sensitivity")
    entries = sensitivity_report(params, rel_step=args.rel_step, include_tau=args.include_tau)
    rows = []
    for analytic, fd in zip(entries[0::2], entries[1::2]):
        gap = abs(analytic.value - fd.value) / max(abs(fd.value), np.finfo(float).tiny)
        rows.append([analytic.parameter, analytic.value, fd.value, gap])
    convention = "eps*beta*tau/(mu(mu+eps)(mu+gamma))" if args.include_tau else "eps*beta/((mu+eps)(mu+gamma))"
    table = CsvTable(
        ("parameter", "analytic", "finite_difference", "abs_rel_gap"),
        rows,
        comments=[
            f"seirlab {__version__} sensitivity: normalized indices of R0",
            f"r0={convention} rel_step={format_number(args.rel_step)}",
        ],
    )
    _emit_table(table, args.out, stdout)


def _parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidArgumentError(f"--range expects min:max, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidArgumentError(f"--range bounds must be numbers, got {text!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise InvalidArgumentError("--range bounds must be finite")
    return lo, hi


def cmd_bifurcate(args, stdout) -> None:
    lo, hi = _parse_range(args.range)
    form = NormalForm(FormKind(args.form), b=args.b)
    points = sweep_diagram(form, lo, hi, args.n)
    table = CsvTable(
        ("param", "x", "stability"),
        [[p.param, p.x, p.stability] for p in points],
        comments=[
            f"seirlab {__version__} bifurcate: equilibria of the {form.kind} normal form",
            f"range={format_number(lo)}:{format_number(hi)} n={args.n} b={format_number(args.b)}",
        ],
    )
    _emit_table(table, args.out, stdout)


def cmd_center_manifold(args, stdout) -> None:
    scenario = load_scenario(args.scenario) if args.scenario else None
    rep = _Report("center-manifold", f"bifurcation coefficients a, b for {args.system}")
    if args.system == "seir3":
        params = ModifiedSeirParams.table3() if scenario is None else _modified(scenario, "center-manifold")
        coeffs = seir3_center_manifold(params)
        closed = seir3_closed_form(params)
        param_name = "beta"
    else:
        if scenario is not None and scenario.model != "backward4":
            raise InvalidArgumentError(f"--system backward4 needs model backward4, scenario has {scenario.model}")
        params = BACKWARD4_DEFAULT if scenario is None else scenario.params
        coeffs = backward4_center_manifold(params)
        closed = backward4_closed_form(params)
        param_name = "beta2"
    rep.item(f"critical_{param_name}", coeffs.critical_param)
    rep.item("a", coeffs.a)
    rep.item("b", coeffs.b)
    rep.item("classification", str(coeffs.classification))
    rep.item("w", coeffs.w)
    rep.item("v", coeffs.v)
    rep.item("normalization", coeffs.normalization)
    rep.item("eigenvalues", coeffs.eigenvalues)
    rep.item("a_closed_form", closed["a"])
    rep.item("b_closed_form", closed["b"])
    rep.item("w_closed_form", closed["w"])
    rep.item("v_closed_form", closed["v"])
    for note in coeffs.notes:
        rep.comment(note)
    _emit_text(rep.text(), args.out, stdout)


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seirlab", description="Numerical checks for SEIR epidemic models.")
    parser.add_argument("--version", action="version", version=f"seirlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, scenario=True, out=True):
        p = sub.add_parser(name, help=help_, description=help_)
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario file")
        if out:
            p.add_argument("--out", help="output file (default: standard output)")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "integrate a scenario with RK4 and write the trajectory as CSV")
    p.add_argument("--stride", type=int, default=1, help="keep every n-th step (the last point is always kept)")

    p = add("r0", cmd_r0, "basic reproduction number with F, V and FV^-1")
    p.add_argument("--s0", type=float, help="susceptible level (default tau/mu)")

    add("equilibria", cmd_equilibria, "disease-free and endemic equilibria")
    add("stability", cmd_stability, "local stability of each equilibrium")

    p = add("lyapunov", cmd_lyapunov, "sampled Lyapunov check at the disease-free equilibrium")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=DEFAULT_LYAPUNOV_SEED)

    p = add("sensitivity", cmd_sensitivity, "normalized sensitivity indices of R0 as CSV")
    p.add_argument("--include-tau", action="store_true", help="use the recruitment-dependent R0")
    p.add_argument("--rel-step", type=float, default=DEFAULT_REL_STEP)

    p = add("bifurcate", cmd_bifurcate, "sweep a normal form and tabulate its equilibria", scenario=False)
    p.add_argument("--form", required=True, choices=[k.value for k in FormKind])
    p.add_argument("--range", required=True, help="parameter interval min:max")
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--b", type=float, default=1.0, help="quadratic coefficient of the transcritical form")

    p = add("center-manifold", cmd_center_manifold, "center-manifold coefficients a and b", scenario=False)
    p.add_argument("--system", required=True, choices=["seir3", "backward4"])
    p.add_argument("--scenario", help="parameter source (defaults to built-in values)")
    return parser


def _normalize_argv(argv: Sequence[str]) -> List[str]:
    # Let "--range -1:1" through; argparse would read "-1:1" as an option.
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--range":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--range={nxt}")
        else:
            out.append(tok)
    return out


def run_command(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_normalize_argv(argv))
        args.func(args, stdout)
    except NumericalError as exc:
        stderr.write(f"seirlab: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (InvalidArgumentError, OSError) as exc:
        stderr.write(f"seirlab: error: {exc}\n")
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return EXIT_OK


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="seirlab: %(levelname)s: %(message)s")
    sys.exit(run_command())
