"""Command-line interface: amplitude tables, convergence reports and identity checks.

Exit status: 0 success, 1 some angle did not converge (or a check failed),
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import coulomb_engine as ce
from .legendre_series import multiply_by_one_minus_x, reduce_series
from .nuclear_coulomb import (
    PhaseShiftFormatError,
    combined_amplitude,
    load_phase_shifts,
    raw_combined_diagnostic,
)
from .special_functions import PoleError

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG = 0, 1, 2
AMPLITUDE_METHODS = ("raw", "reduced1", "reduced2", "closed", "combined")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def fmt(v: float) -> str:
    """15 significant digits."""
    return "%.15g" % v


def num(v: Optional[float]):
    """JSON-side value carrying exactly the digits of `fmt`."""
    if v is None or not math.isfinite(v):
        return None
    return float(fmt(v))


def parse_theta(text: str) -> List[float]:
    """'30,60,90' or 'start:stop:step' (inclusive) in degrees."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(s) for s in text.split(":")]
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = parts
            if step <= 0:
                raise ValueError("step must be > 0")
            n = int(math.floor((stop - start) / step + 1e-9))
            if n < 0:
                raise ValueError("stop < start")
            return [start + i * step for i in range(n + 1)]
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError("--theta", str(exc)) from None


@dataclass
class RunConfig:
    eta: float
    k: float
    theta_deg: List[float]
    method: str = "reduced2"
    tol: float = 1e-6
    L_cap: int = 100_000
    theta_min_deg: float = 1.0
    phase_shift_file: Optional[str] = None
    format: str = "csv"
    out: str = "-"

    def validate(self, command: str) -> None:
        if not math.isfinite(self.eta):
            raise ConfigError("--eta", "must be finite")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ConfigError("--k", "must be > 0")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ConfigError("--tol", "must be > 0")
        if self.L_cap < 1:
            raise ConfigError("--lmax", "must be >= 1")
        if not (0 <= self.theta_min_deg < 180):
            raise ConfigError("--theta-min", "must be in [0, 180)")
        if not self.theta_deg:
            raise ConfigError("--theta", "no angles given")
        for t in self.theta_deg:
            if not (self.theta_min_deg < t <= 180):
                raise ConfigError("--theta", f"{t:g} deg outside ({self.theta_min_deg:g}, 180]")
        allowed = {
            "amplitude": AMPLITUDE_METHODS,
            "converge": ("raw", "reduced1", "reduced2", "combined"),
            "compare": ("reduced2",),
            "identities": AMPLITUDE_METHODS,
        }[command]
        if self.method not in allowed:
            raise ConfigError("--method", f"{self.method!r} not one of {', '.join(allowed)}")
        if self.method == "combined" and command != "identities":
            if not self.phase_shift_file:
                raise ConfigError("--phase-shifts", "required with --method combined")
        elif self.phase_shift_file and command != "identities":
            raise ConfigError("--phase-shifts", "only used with --method combined")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format", "must be csv or json")

    @property
    def params(self) -> ce.ScatteringParams:
        return ce.ScatteringParams(self.eta, self.k)

    @property
    def thetas(self) -> List[float]:
        return [math.radians(t) for t in self.theta_deg]

    def metadata(self) -> dict:
        return {
            "eta": num(self.eta),
            "k": num(self.k),
            "method": self.method,
            "tol": num(self.tol),
            "lmax": self.L_cap,
            "degenerate": self.eta == 0,
        }


def _csv_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _json_value(v):
    return num(v) if isinstance(v, float) else v


def emit(rows: List[dict], metadata: dict, fmt_name: str, out: str, bare_json: bool = False) -> None:
    if fmt_name == "csv":
        buf = io.StringIO()
        for key, val in metadata.items():
            buf.write(f"# {key}={_csv_value(val)}\n")
        columns = list(rows[0].keys()) if rows else []
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_csv_value(r[c]) for c in columns])
        text = buf.getvalue()
    else:
        jrows = [{k: _json_value(v) for k, v in r.items()} for r in rows]
        payload = jrows if bare_json else {"metadata": metadata, "rows": jrows}
        text = json.dumps(payload, indent=2) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _load_deltas(cfg: RunConfig):
    try:
        return load_phase_shifts(cfg.phase_shift_file)
    except (OSError, PhaseShiftFormatError) as exc:
        raise ConfigError("--phase-shifts", str(exc)) from None


def cmd_amplitude(cfg: RunConfig) -> int:
    p = cfg.params
    rows, all_ok = [], True
    if cfg.method == "combined":
        deltas = _load_deltas(cfg)
        for deg, t in zip(cfg.theta_deg, cfg.thetas):
            f = combined_amplitude(p, deltas, t)
            rows.append({"theta_deg": float(deg), "re_f": f.real, "im_f": f.imag,
                         "dsigma": abs(f) ** 2, "converged": True,
                         "L_used": max(len(deltas) - 1, 0)})
    else:
        table, reports = ce.amplitude_table(p, cfg.thetas, cfg.method, cfg.tol, cfg.L_cap,
                                            math.radians(cfg.theta_min_deg))
        for deg, (_, f, ds), rep in zip(cfg.theta_deg, table.rows(), reports):
            row = {"theta_deg": float(deg), "re_f": f.real, "im_f": f.imag, "dsigma": ds}
            if cfg.method != "closed":
                row["converged"] = rep.converged
                row["L_used"] = rep.L_used
            all_ok &= rep.converged
            rows.append(row)
    emit(rows, cfg.metadata(), cfg.format, cfg.out)
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def _report_row(deg: float, rep) -> dict:
    return {
        "theta_deg": float(deg),
        "method": rep.method,
        "m_test_verdict": rep.m_test_verdict,
        "tail_bound": rep.tail_bound,
        "L_used": rep.L_used,
        "converged": rep.converged,
        "oscillation_metric": rep.oscillation_metric,
    }


def cmd_converge(cfg: RunConfig) -> int:
    p = cfg.params
    rows, all_ok = [], True
    deltas = _load_deltas(cfg) if cfg.method == "combined" else None
    for deg, t in zip(cfg.theta_deg, cfg.thetas):
        if deltas is not None:
            rep = raw_combined_diagnostic(p, deltas, t, cfg.L_cap)
        else:
            _, rep = ce.amplitude_at(p, t, cfg.method, cfg.tol, cfg.L_cap)
        rep.method = cfg.method
        all_ok &= rep.converged
        rows.append(_report_row(deg, rep))
    emit(rows, cfg.metadata(), cfg.format, cfg.out, bare_json=True)
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def cmd_compare(cfg: RunConfig) -> int:
    p = cfg.params
    table, reports = ce.amplitude_table(p, cfg.thetas, "reduced2", cfg.tol, cfg.L_cap,
                                        math.radians(cfg.theta_min_deg))
    rows, ok, worst = [], True, 0.0
    for deg, t, f, rep in zip(cfg.theta_deg, cfg.thetas, table.f, reports):
        fc = ce.closed_form_amplitude(p, t)
        rel = abs(f - fc) / abs(fc) if fc != 0 else abs(f - fc)
        worst = max(worst, rel)
        ok &= rep.converged and rel <= cfg.tol
        rows.append({"theta_deg": float(deg), "re_f_reduced2": f.real, "im_f_reduced2": f.imag,
                     "re_f_closed": fc.real, "im_f_closed": fc.imag, "rel_diff": rel,
                     "L_used": rep.L_used, "converged": rep.converged})
    meta = cfg.metadata()
    meta["max_rel_diff"] = num(worst)
    emit(rows, meta, cfg.format, cfg.out)
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_bateman_check(rho_re: float, rho_im: float, L: int, grid: int,
                      tol: Optional[float] = None, format: str = "json", out: str = "-") -> int:
    if L < 0:
        raise ConfigError("--lmax", "must be >= 0")
    if grid < 2:
        raise ConfigError("--grid", "must be >= 2")
    rho = complex(rho_re, rho_im)
    xs = np.linspace(-0.99, 0.99, grid)
    try:
        err = ce.bateman_max_error(rho, L, xs)
    except PoleError as exc:
        raise ConfigError("--rho-re", f"pole: {exc}") from None
    row = {"rho_re": float(rho_re), "rho_im": float(rho_im), "L": L, "n_points": grid,
           "max_error": err}
    passed = tol is None or err <= tol
    if tol is not None:
        row["tol"] = float(tol)
        row["passed"] = passed
    emit([row], {"check": "bateman"}, format, out)
    return EXIT_OK if passed else EXIT_NOT_CONVERGED


def identity_checks(p: ce.ScatteringParams, thetas: List[float]) -> List[dict]:
    """Residuals of the library's identities at (eta, k)."""
    import mpmath as mp

    eta, k = p.eta, p.k
    checks = []

    def add(name, err, tol):
        checks.append({"name": name, "max_error": float(err), "tolerance": tol,
                       "passed": bool(err <= tol)})

    s = ce.s_matrices(10_000, eta)
    add("unitarity", np.max(np.abs(np.abs(s) - 1.0)), 1e-12)
    fr = [ce.closed_form_amplitude(p, t) for t in thetas]
    if p.degenerate:
        add("degenerate_zero_amplitude", max(abs(f) for f in fr), 0.0)
        return checks
    ruth = max(abs(abs(f) ** 2 * 4 * k**2 * math.sin(t / 2) ** 4 - eta**2) / eta**2
               for f, t in zip(fr, thetas))
    add("rutherford_modulus", ruth, 1e-12)
    an = max(abs(ce.analytic_sum_check(p, t) - f) / abs(f) for f, t in zip(fr, thetas))
    add("analytic_sum", an, 1e-10)
    conj = max(abs(ce.closed_form_amplitude(ce.ScatteringParams(-eta, k), t) + np.conj(f)) / abs(f)
               for f, t in zip(fr, thetas))
    add("conjugation_symmetry", conj, 1e-12)
    n = 501
    r1 = ce.reduced1_coefficients(p).block(0, n)
    r2 = ce.reduced2_coefficients(p).block(0, n)
    ls = np.arange(n)
    mod = np.max(np.abs(np.abs(2j * k * r2) - 4 * eta**2 * (1 + eta**2) * ce.m_bound_reduced2(ls, eta))
                 / np.abs(2j * k * r2))
    add("reduced2_modulus", mod, 1e-12)
    with mp.workdps(40):
        raw = ce.raw_coefficients(p, dps=40)
        d1 = multiply_by_one_minus_x(raw).block(0, n).astype(complex)
        d2 = reduce_series(raw, 2).block(0, n).astype(complex)
    add("reduction_once", np.max(np.abs(d1 - r1) / np.abs(r1)), 1e-10)
    add("reduction_twice", np.max(np.abs(d2 - r2) / np.abs(r2)), 1e-10)
    return checks


def cmd_identities(cfg: RunConfig) -> int:
    checks = identity_checks(cfg.params, cfg.thetas)
    emit(checks, cfg.metadata(), cfg.format, cfg.out)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coulomb-pw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, default_method, default_format="csv"):
        sp.add_argument("--eta", type=float, required=True, help="Sommerfeld parameter")
        sp.add_argument("--k", type=float, default=1.0, help="wavenumber (inverse length)")
        sp.add_argument("--theta", default="30:180:30",
                        help="angles in degrees: comma list or start:stop:step")
        sp.add_argument("--method", default=default_method)
        sp.add_argument("--tol", type=float, default=1e-6)
        sp.add_argument("--lmax", type=int, default=100_000, help="highest partial wave summed")
        sp.add_argument("--theta-min", type=float, default=1.0, help="forward cutoff in degrees")
        sp.add_argument("--phase-shifts", default=None, help="file of 'l delta_l' lines")
        sp.add_argument("--format", default=default_format, choices=("csv", "json"))
        sp.add_argument("--out", default="-")

    common(sub.add_parser("amplitude", help="amplitude and cross-section table"), "closed")
    common(sub.add_parser("converge", help="per-angle convergence reports"), "reduced2", "json")
    common(sub.add_parser("compare", help="reduced2 sum against the closed form"), "reduced2")
    common(sub.add_parser("identities", help="residuals of the series identities"), "closed", "json")

    bp = sub.add_parser("bateman-check", help="Legendre expansion of (1-x)^rho")
    bp.add_argument("--rho-re", type=float, required=True)
    bp.add_argument("--rho-im", type=float, default=0.0)
    bp.add_argument("--lmax", type=int, default=2000)
    bp.add_argument("--grid", type=int, default=199, help="sample points on [-0.99, 0.99]")
    bp.add_argument("--tol", type=float, default=None)
    bp.add_argument("--format", default="json", choices=("csv", "json"))
    bp.add_argument("--out", default="-")
    return parser


COMMANDS = {
    "amplitude": cmd_amplitude,
    "converge": cmd_converge,
    "compare": cmd_compare,
    "identities": cmd_identities,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bateman-check":
            return cmd_bateman_check(args.rho_re, args.rho_im, args.lmax, args.grid,
                                     args.tol, args.format, args.out)
        cfg = RunConfig(
            eta=args.eta, k=args.k, theta_deg=parse_theta(args.theta), method=args.method,
            tol=args.tol, L_cap=args.lmax, theta_min_deg=args.theta_min,
            phase_shift_file=args.phase_shifts, format=args.format, out=args.out,
        )
        cfg.validate(args.command)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"coulomb-pw: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
