"""Command-line harness: ``gblab <subcommand> --config run.json``.

Every subcommand builds a Report of named checks (measured value, tolerance,
pass flag, wall time) and exits 0 iff all of them pass. Configuration or
usage problems exit with status 2 and a diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from . import __version__
from .algebra import (
    hamiltonian,
    is_eta_self_adjoint,
    ladder_commutator_table,
    su2_generators,
    su11_generators,
    verify_algebra,
)
from .coherent import (
    TruncationGuardError,
    coherent_state_displaced,
    coherent_state_series,
    displacement_g0,
    displacement_g3,
    exponential_margin,
    gb_residual,
    gupta_bleuler_operator,
    physical_state,
    r_series_state,
    shifted_operator,
    translation_invariance_check,
)
from .config import DEFAULT_TOLERANCES, ConfigError, RunConfig, load_config
from .expr import EvalError, ParseError, evaluate, ladder_degree, parse, print_canonical
from .field import FLIPPED, MINKOWSKI, ModeSet, check_gauge_split
from .fock import (
    FockError,
    Mode,
    Operator,
    Polarization,
    State,
    annihilator,
    eta_adjoint,
    metric,
    physical_expectation,
    physical_inner,
    safe_projector,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SWEEP_PARAMETERS = ("n_max", "alpha")
# below this a residual is roundoff and the monotone sweep check ignores it
ROUNDOFF_FLOOR = 1e-11

COMPARISONS: dict[str, Callable[[float, float], bool]] = {
    "<": lambda v, t: v < t,
    "<=": lambda v, t: v <= t,
    ">=": lambda v, t: v >= t,
    ">": lambda v, t: v > t,
}


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    comparison: str
    passed: bool
    wall_time: float
    tolerance_key: str
    message: str = ""

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "value": _json_float(self.value),
            "tolerance": self.tolerance,
            "tolerance_key": self.tolerance_key,
            "comparison": self.comparison,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }
        if self.message:
            out["message"] = self.message
        return out


def _json_float(x: float):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@dataclass
class Report:
    command: str
    config: RunConfig
    checks: list[Check] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)
    _clock: float = field(default_factory=time.perf_counter, repr=False)
    _used: set = field(default_factory=set, repr=False)

    def tolerance(self, name: str, kind: str) -> tuple[float, str]:
        key = name if name in self.config.tolerances else kind
        self._used.add(key)
        return self.config.tolerance(name, kind), key

    def lap(self) -> float:
        now = time.perf_counter()
        elapsed, self._clock = now - self._clock, now
        return elapsed

    def add(self, name: str, value: float, kind: str, comparison: str = "<", message: str = "") -> Check:
        if any(c.name == name for c in self.checks):
            raise KeyError(f"duplicate check {name!r}")
        tol, key = self.tolerance(name, kind)
        value = float(value)
        ok = not math.isnan(value) and COMPARISONS[comparison](value, tol)
        check = Check(name, value, tol, comparison, ok, self.lap(), key, message)
        self.checks.append(check)
        return check

    def fail(self, name: str, message: str) -> Check:
        check = Check(name, math.nan, math.nan, "error", False, self.lap(), "", message)
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def tolerances_echo(self) -> dict[str, float]:
        return {**DEFAULT_TOLERANCES, **self.config.tolerances}

    def finish(self):
        unused = sorted(set(self.config.tolerances) - self._used)
        for name in unused:
            self.warnings.append(f"tolerance override {name!r} matched no check")

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "warnings": list(self.warnings),
            "info": self.info,
            "tolerances": self.tolerances_echo(),
            "config": self.config.to_json(),
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            if c.comparison == "error":
                lines.append(f"{tag}  {c.name}: {c.message}")
            else:
                lines.append(f"{tag}  {c.name} = {c.value:.3e} ({c.comparison} {c.tolerance:.1e})")
        lines.extend(f"WARN  {w}" for w in self.warnings)
        lines.append(f"{'PASS' if self.passed else 'FAIL'}  {self.command}: {sum(c.passed for c in self.checks)}/{len(self.checks)} checks")
        return lines


# verify-algebra


def _random_operator(basis, rng: np.random.Generator, per_row: int = 8) -> Operator:
    n = basis.dimension
    nnz = n * min(per_row, n)
    rows, cols = rng.integers(0, n, nnz), rng.integers(0, n, nnz)
    vals = rng.normal(size=nnz) + 1j * rng.normal(size=nnz)
    return Operator(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr(), basis)


def _random_state(basis, rng: np.random.Generator) -> State:
    return State(rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension), basis)


def cmd_verify_algebra(cfg: RunConfig, report: Report, flip: bool = False) -> Report:
    basis = cfg.full_basis()
    if not {1, 2} <= set(cfg.polarizations):
        raise ConfigError("verify-algebra needs all four polarizations")
    if cfg.n_max - cfg.margin <= 0:
        report.warnings.append(
            f"n_max - margin = {cfg.n_max - cfg.margin}: the safe subspace is the vacuum only, identities pass trivially"
        )
    report.info["dimension"] = basis.dimension
    report.info["safe_dimension"] = int(safe_projector(basis, cfg.margin).matrix.nnz)

    for i, k in enumerate(cfg.momenta):
        for (lam, lam2), resid in ladder_commutator_table(basis, k, margin=1).items():
            report.add(f"[a{lam},a{lam2}^dag]+g{lam}{lam2}@k{i}", resid, "exact")

    suite = verify_algebra(basis, cfg.margin)
    for name, resid in suite.residuals.items():
        report.add(name, resid, "exact")

    eta = metric(basis).as_operator()
    report.add("eta^2=I", (eta @ eta - basis.identity()).max_abs(), "exact")
    rng = np.random.default_rng(cfg.seed)
    A, B = _random_operator(basis, rng), _random_operator(basis, rng)
    phi, psi = _random_state(basis, rng), _random_state(basis, rng)
    report.add("A^dag^dag=A", (eta_adjoint(basis, eta_adjoint(basis, A)) - A).max_abs(), "exact")
    report.add(
        "(AB)^dag=B^dag A^dag",
        (eta_adjoint(basis, A @ B) - eta_adjoint(basis, B) @ eta_adjoint(basis, A)).max_abs(),
        "exact",
    )
    lhs = physical_inner(phi, A @ psi)
    rhs = physical_inner(eta_adjoint(basis, A) @ phi, psi)
    report.add("<phi,A psi>=<A^dag phi,psi>", abs(lhs - rhs) / max(1.0, abs(lhs)), "exact")

    spec = hamiltonian(basis)
    H = spec.H
    report.add("H^dag=H", (eta_adjoint(basis, H) - H).max_abs(), "exact")
    offdiag = H.matrix - sp.diags(H.diagonal())
    report.add("H diagonal", abs(offdiag).max() if offdiag.nnz else 0.0, "exact")
    for i, k in enumerate(cfg.momenta):
        J, K = su2_generators(basis, k), su11_generators(basis, k)
        worst = max((eta_adjoint(basis, g) - g).max_abs() for g in (J.three, J.zero, K.three, K.zero))
        report.add(f"J3,J0,K3,K0 self-adjoint@k{i}", worst, "exact")
        worst = max((eta_adjoint(basis, P) - M).max_abs() for P, M in ((J.plus, J.minus), (K.plus, K.minus)))
        report.add(f"J+^dag=J-,K+^dag=K-@k{i}", worst, "exact")

    # a single scalar photon: negative norm and negative energy
    k0 = cfg.momenta[0]
    scalar = Mode(k0, Polarization.SCALAR)
    one = eta_adjoint(basis, annihilator(basis, scalar)) @ basis.vacuum()
    norm = physical_inner(one, one).real
    energy = physical_inner(one, H @ one).real
    omega = scalar.omega
    report.add("scalar photon norm=-1", abs(norm + 1.0), "exact")
    report.add("scalar photon <H>=-omega", abs(energy + omega), "exact")
    report.info["scalar_photon"] = {"norm": norm, "H": energy, "omega": omega}

    factor = spec.casimir_factor()
    report.info["casimir_factor"] = factor
    report.info["casimir_residuals"] = spec.casimir_residuals()
    if abs(factor - 1.0) > 1e-12:
        report.warnings.append(
            f"H = {factor:g} * sum omega (J0 - K0), not 1 * sum omega (J0 - K0); H is built from number operators"
        )
    return report


# gb-check


def _guard(cfg: RunConfig, report: Report, n_max: int) -> bool:
    spec = cfg.coherent_spec()
    try:
        spec.check_guard(n_max)
    except TruncationGuardError as exc:
        report.fail("truncation_guard", str(exc))
        return False
    return True


def _coherent_series_checks(cfg: RunConfig, report: Report, prefix: str = ""):
    spec = cfg.coherent_spec()
    basis = cfg.pair_basis()
    psi = coherent_state_series(basis, spec)
    report.info[f"{prefix}pair_dimension"] = basis.dimension
    report.add(f"{prefix}series.norm", abs(psi.physical_norm2() - 1.0), "exact")
    report.add(f"{prefix}series.gb_residual", gb_residual(basis, psi), "series")
    K0 = sum((su11_generators(basis, k).zero for k in cfg.momenta), basis.zero())
    report.add(f"{prefix}series.K0", abs(physical_expectation(psi, K0)), "series")
    ratio = psi.euclidean_norm() / math.exp(spec.total_intensity)
    report.add(f"{prefix}series.euclidean_norm/exp(sum|alpha|^2)-1", abs(ratio - 1.0), "diagnostic")

    P1 = safe_projector(basis, 1)
    for i, (k, alpha) in enumerate(zip(spec.momenta, spec.alphas)):
        for lam in (Polarization.LONGITUDINAL, Polarization.SCALAR):
            a = annihilator(basis, Mode(k, lam))
            resid = (P1 @ (a @ psi - alpha * psi)).euclidean_norm()
            report.add(f"{prefix}series.a{int(lam)}|alpha>=alpha|alpha>@k{i}", resid, "coherent")

    alphas = [-a for a in spec.alphas]
    r = r_series_state(basis, alphas, basis.n_max, weights="factorial")
    truncated = coherent_state_series(basis, spec, order=basis.n_max)
    report.add(f"{prefix}r_series-series", (r - truncated).euclidean_norm(), "exact")


def _displacement_checks(cfg: RunConfig, report: Report, prefix: str = ""):
    """Exponential-path checks, one momentum at a time.

    Displacements at different momenta act on disjoint modes, so each
    identity factorizes; a per-momentum pair basis keeps the cost linear in
    the number of momenta.
    """
    for i, (k, alpha) in enumerate(zip(cfg.momenta, cfg.alpha)):
        sub = copy.deepcopy(cfg)
        sub.momenta, sub.alpha = [k], [alpha]
        sub.weights, sub.transverse = [1.0], [(0, 0)]
        basis, spec = sub.pair_basis(), sub.coherent_spec()
        tag = f"@k{i}"
        series = coherent_state_series(basis, spec)
        displaced = coherent_state_displaced(basis, spec)
        report.add(f"{prefix}displaced-series{tag}", (displaced - series).euclidean_norm(), "coherent")
        report.add(f"{prefix}displaced.norm{tag}", abs(displaced.physical_norm2() - 1.0), "coherent")
        report.add(f"{prefix}displaced.gb_residual{tag}", gb_residual(basis, displaced), "coherent")

        margin = exponential_margin(basis.n_max)
        P = safe_projector(basis, margin)
        ident = basis.identity()
        for name, g in (("G3", displacement_g3), ("G0", displacement_g0)):
            G = g(basis, spec)
            report.add(f"{prefix}{name}^dag {name}=I{tag}", (P @ (eta_adjoint(basis, G) @ G - ident) @ P).max_abs(), "coherent")
        g3i, g0i = displacement_g3(basis, spec, inverse=True), displacement_g0(basis, spec, inverse=True)
        report.add(f"{prefix}[G3^-1,G0^-1]=0{tag}", (g3i @ g0i - g0i @ g3i).max_abs(), "exact")

        translation = translation_invariance_check(basis, spec, margin)
        for name, resid in translation.residuals.items():
            report.add(f"{prefix}translation.{name.split('@')[0]}{tag}", resid, "coherent")

        a3 = annihilator(basis, Mode(k, Polarization.LONGITUDINAL))
        a0 = annihilator(basis, Mode(k, Polarization.SCALAR))
        a3d = eta_adjoint(basis, a3)
        n3 = a3d @ a3
        expected = {
            "a3": a3 - alpha * ident,
            "a0": a0 - alpha * ident,
            "a3^dag a3": n3 - alpha.conjugate() * a3 - alpha * a3d + abs(alpha) ** 2 * ident,
        }
        shifted_n3 = None
        for name, rhs in expected.items():
            op = {"a3": a3, "a0": a0, "a3^dag a3": n3}[name]
            lhs = shifted_operator(basis, op, spec)
            if name == "a3^dag a3":
                shifted_n3 = lhs
            report.add(f"{prefix}shift.{name}{tag}", (P @ (lhs - rhs) @ P).max_abs(), "coherent")
        vac = basis.vacuum()
        report.add(
            f"{prefix}shift.<0|a3^dag a3|0>=|alpha|^2{tag}",
            abs(physical_inner(vac, shifted_n3 @ vac) - abs(alpha) ** 2),
            "coherent",
        )


def _physical_checks(cfg: RunConfig, report: Report, prefix: str = ""):
    if not {1, 2} <= set(cfg.polarizations):
        report.warnings.append("transverse polarizations absent; physical-state checks skipped")
        return
    basis = cfg.full_basis()
    pspec = cfg.physical_spec()
    psi = physical_state(basis, pspec)
    report.info[f"{prefix}full_dimension"] = basis.dimension
    H = hamiltonian(basis).H
    report.add(f"{prefix}physical.norm", abs(psi.physical_norm2() - 1.0), "coherent")
    energy = physical_expectation(psi, H)
    report.info[f"{prefix}physical.H"] = energy.real
    report.add(f"{prefix}physical.H-transverse", abs(energy - pspec.transverse_energy()), "coherent")
    J0 = sum((su2_generators(basis, k).zero for k in cfg.momenta), basis.zero())
    K0 = sum((su11_generators(basis, k).zero for k in cfg.momenta), basis.zero())
    half = 0.5 * sum(n1 + n2 for n1, n2 in pspec.transverse)
    report.add(f"{prefix}physical.J0-half_transverse", abs(physical_expectation(psi, J0) - half), "exact")
    report.add(f"{prefix}physical.K0", abs(physical_expectation(psi, K0)), "coherent")
    report.add(f"{prefix}physical.gb_residual", gb_residual(basis, psi), "coherent")


def _stage(report: Report, name: str, fn: Callable[[], None]):
    try:
        fn()
    except (FockError, MemoryError) as exc:
        report.fail(name, f"{type(exc).__name__}: {exc}")


def cmd_gb_check(cfg: RunConfig, report: Report, flip: bool = False, prefix: str = "") -> Report:
    if not _guard(cfg, report, cfg.n_max):
        return report
    _stage(report, f"{prefix}series", lambda: _coherent_series_checks(cfg, report, prefix))
    _stage(report, f"{prefix}displacement", lambda: _displacement_checks(cfg, report, prefix))
    _stage(report, f"{prefix}physical", lambda: _physical_checks(cfg, report, prefix))
    return report


# expectation


def cmd_expectation(cfg: RunConfig, report: Report, flip: bool = False) -> Report:
    if not _guard(cfg, report, cfg.n_max):
        return report
    basis = cfg.full_basis()
    pspec = cfg.physical_spec()
    state = physical_state(basis, pspec)
    reference = physical_state(basis, pspec.with_alpha_zero())
    grid = cfg.grid.build()
    split = check_gauge_split(
        basis,
        state,
        reference,
        cfg.modeset(),
        grid,
        pspec.coherent,
        metric=FLIPPED if flip else MINKOWSKI,
        fd_step=cfg.fd_step,
        spatial_ratio=cfg.spatial_ratio,
        gradient_step=cfg.gradient_step,
    )
    if flip:
        report.warnings.append("metric signature flipped for index lowering: negative control, failure expected")
    report.info.update(
        dimension=basis.dimension,
        grid_points=len(grid),
        metric="flipped" if flip else "minkowski",
        box_residual=split.box.residual,
        box_residual_half=split.box.residual_half,
        box_scale=split.box.scale,
        fd_step=cfg.fd_step,
        spatial_step=cfg.fd_step * cfg.spatial_ratio,
    )
    report.add("gauge_split.max_deviation", split.max_deviation, "coherent")
    report.add("box_lambda.relative_residual", split.box.relative, "fd")
    report.add("box_lambda.halving_reduction", split.box.reduction, "fd_reduction", ">=")
    report.add("grad_lambda.relative_error", split.gradient_error, "fd")
    report.rows = list(split.rows())
    return report


# sweep


def _apply_sweep_value(cfg: RunConfig, parameter: str, value: float) -> RunConfig:
    out = copy.deepcopy(cfg)
    if parameter == "n_max":
        if float(value) != int(value) or int(value) < 1:
            raise ConfigError(f"sweep: n_max values must be positive integers, got {value!r}")
        out.n_max = int(value)
        out.margin = min(out.margin, out.n_max)
    else:
        magnitude = float(value)
        if magnitude < 0:
            raise ConfigError("sweep: alpha magnitudes must be nonnegative")
        out.alpha = [magnitude * (a / abs(a)) if a else complex(magnitude) for a in cfg.alpha]
    out.validate()
    return out


def _sweep_point(args: tuple[RunConfig, str, float]) -> tuple[float, list[Check], list[str]]:
    cfg, parameter, value = args
    point = _apply_sweep_value(cfg, parameter, value)
    report = Report("gb-check", point)
    cmd_gb_check(point, report)
    return value, report.checks, report.warnings


def _monotone_warnings(parameter: str, values: Sequence[float], table: list[dict[str, Check]]) -> list[str]:
    if parameter != "n_max":
        return []
    order = np.argsort(values)
    warnings = []
    names = [n for n in table[0] if any(s in n for s in ("displaced", "translation", "shift", "G3^dag", "G0^dag"))]
    for name in names:
        seq = [table[i][name].value for i in order if name in table[i]]
        for prev, nxt in zip(seq, seq[1:]):
            if nxt > prev and nxt > ROUNDOFF_FLOOR:
                warnings.append(f"{name} does not decrease with n_max: {prev:.3e} -> {nxt:.3e}")
                break
    return warnings


def cmd_sweep(cfg: RunConfig, report: Report, parameter: str | None, values: Sequence[float] | None, jobs: int = 1) -> Report:
    parameter = parameter or cfg.sweep.get("parameter")
    values = list(values) if values is not None else list(cfg.sweep.get("values", []))
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"sweep: unknown parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
    if not values:
        raise ConfigError("sweep: empty value list")
    for v in values:
        _apply_sweep_value(cfg, parameter, v)
    tasks = [(cfg, parameter, v) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]

    table, rows = [], []
    for value, checks, warnings in results:
        table.append({c.name: c for c in checks})
        row = {parameter: value, "pass": all(c.passed for c in checks)}
        row.update({c.name: c.value for c in checks})
        rows.append(row)
        for c in checks:
            c.name = f"{parameter}={value}/{c.name}"
            report.checks.append(c)
        report.warnings.extend(f"{parameter}={value}: {w}" for w in warnings)
        for c in checks:
            report._used.add(c.tolerance_key)
    report.warnings.extend(_monotone_warnings(parameter, values, table))
    report.info.update(parameter=parameter, values=values, jobs=jobs)
    report.rows = rows
    return report


# eval


def _operator_summary(op: Operator, margin: int) -> dict:
    basis = op.basis
    P = safe_projector(basis, margin)
    projected = P @ op @ P
    vac = basis.index_of_state([0] * basis.n_modes)
    c = complex(projected.matrix[vac, vac])
    scalar_resid = (projected - c * P).max_abs()
    out = {
        "max_abs": op.max_abs(),
        "nnz": int(op.matrix.nnz),
        "eta_self_adjoint": bool(is_eta_self_adjoint(op)),
        "diagonal": bool(op.is_diagonal()),
        "safe_margin": margin,
        "safe_max_abs": projected.max_abs(),
    }
    if scalar_resid < 1e-12:
        if abs(c - 1) < 1e-12:
            desc = "I"
        elif abs(c + 1) < 1e-12:
            desc = "-I"
        elif abs(c) < 1e-12:
            desc = "0"
        else:
            desc = f"({c.real:.12g}{c.imag:+.12g}j) * I"
        out["summary"] = f"{desc} on safe subspace"
    else:
        out["summary"] = "not a multiple of I on safe subspace"
    return out


def cmd_eval(cfg: RunConfig, report: Report, expression: str, state: str | None = None) -> Report:
    node = parse(expression)
    basis = cfg.full_basis()
    op = evaluate(node, basis, cfg.momenta)
    report.info["expression"] = expression
    report.info["canonical"] = print_canonical(node)
    report.info["ladder_degree"] = ladder_degree(node)
    if state == "physical":
        if not _guard(cfg, report, cfg.n_max):
            return report
        psi = physical_state(basis, cfg.physical_spec())
        value = physical_expectation(psi, op)
        report.info["expectation"] = {"re": value.real, "im": value.imag}
    else:
        report.info.update(_operator_summary(op, max(1, ladder_degree(node))))
    return report


# argument handling


def _parse_tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name!r}: {value!r} is not a number") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} must be positive")
    return name, v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    common.add_argument("--out", type=Path, help="write the JSON report here")
    common.add_argument("--csv", type=Path, help="write plot-ready CSV rows here")
    common.add_argument(
        "--tolerance", action="append", default=[], type=_parse_tolerance, metavar="NAME=VALUE",
        help="override a tolerance class (exact, series, coherent, fd, fd_reduction, diagnostic) or a single check",
    )
    common.add_argument("--flip-signature", action="store_true", help="negative control: lower indices with -g")
    common.add_argument("--quiet", action="store_true", help="suppress the per-check summary")

    parser = argparse.ArgumentParser(prog="gblab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-algebra", parents=[common], help="ladder algebra, su(2) x su(1,1) brackets, metric")
    sub.add_parser("gb-check", parents=[common], help="coherent pair states and the Gupta-Bleuler condition")
    sub.add_parser("expectation", parents=[common], help="gauge split of <A_mu> on a spacetime grid")
    p = sub.add_parser("sweep", parents=[common], help="repeat gb-check over n_max or alpha magnitude")
    p.add_argument("--param", choices=SWEEP_PARAMETERS)
    p.add_argument("--values", type=float, nargs="*")
    p.add_argument("--jobs", type=int, default=1)
    p = sub.add_parser("eval", parents=[common], help="evaluate a ladder-operator expression")
    p.add_argument("expression")
    p.add_argument("--state", choices=("physical",), help="report the expectation on the configured physical state")
    return parser


def _write_csv(path: Path, rows: list[dict]):
    fields: list[str] = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _check_rows(report: Report) -> list[dict]:
    return [
        {"name": c.name, "value": c.value, "tolerance": c.tolerance, "comparison": c.comparison, "pass": c.passed}
        for c in report.checks
    ]


def run(args: argparse.Namespace) -> Report:
    cfg = load_config(args.config)
    for name, value in args.tolerance:
        cfg.tolerances[name] = value
    report = Report(args.command, cfg)
    if args.command == "verify-algebra":
        cmd_verify_algebra(cfg, report)
    elif args.command == "gb-check":
        cmd_gb_check(cfg, report)
    elif args.command == "expectation":
        cmd_expectation(cfg, report, flip=args.flip_signature)
    elif args.command == "sweep":
        cmd_sweep(cfg, report, args.param, args.values, max(1, args.jobs))
    elif args.command == "eval":
        cmd_eval(cfg, report, args.expression, args.state)
    if args.flip_signature and args.command != "expectation":
        report.warnings.append("--flip-signature only affects the expectation subcommand")
    report.finish()
    return report


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except ParseError as exc:
        print(f"gblab: parse error: {exc}", file=sys.stderr)
        print(f"    {args.expression}\n    {' ' * exc.position}^", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, EvalError, FockError, OSError) as exc:
        print(f"gblab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.out:
        args.out.write_text(json.dumps(report.to_json(), indent=2) + "\n")
    if args.csv:
        _write_csv(args.csv, report.rows or _check_rows(report))
    if not args.quiet:
        for line in report.summary_lines():
            print(line)
        if args.command == "eval":
            print(json.dumps(report.info, indent=2))
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
