"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import json
import math
import subprocess
import sys
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from coulomb_pw import coulomb_engine as ce
from coulomb_pw.legendre_series import evaluate_partial_sums, multiply_by_one_minus_x, reduce_series
from coulomb_pw.nuclear_coulomb import PhaseShiftTable, combined_amplitude
from coulomb_pw.special_functions import (
    coulomb_phase_shifts,
    legendre_all,
    log_gamma,
    pochhammer,
)

from conftest import ACCEPTANCE_LINES

ETAS = (0.5, 1.0, 5.0, -1.0)
KS = (0.5, 1.0, 2.0)
THETAS = tuple(math.radians(d) for d in (30, 60, 90, 120, 150, 180))
N_RANDOM = 10_000
SAMPLE = str(Path(__file__).parent / "data" / "sample_phase_shifts.txt")


def verdict(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_central_equivalence():
    t0 = time.perf_counter()
    worst, max_L, all_conv = 0.0, 0, True
    for eta in ETAS:
        for k in KS:
            p = ce.ScatteringParams(eta, k)
            table, reports = ce.amplitude_table(p, THETAS, "reduced2", tol=1e-6)
            for t, f, rep in zip(THETAS, table.f, reports):
                fc = ce.closed_form_amplitude(p, t)
                worst = max(worst, abs(f - fc) / abs(fc))
                max_L = max(max_L, rep.L_used)
                all_conv &= rep.converged
    elapsed = time.perf_counter() - t0
    ok = all_conv and worst <= 1e-6 and max_L <= 10_000 and elapsed < 10
    verdict(1, ok, f"max rel err {worst:.2e} (<= 1e-6), max L_used {max_L} (<= 1e4), "
                   f"{elapsed:.2f} s (< 10 s)")


def test_criterion_02_analytic_sum_identity():
    worst = 0.0
    for eta in ETAS:
        for k in KS:
            p = ce.ScatteringParams(eta, k)
            for t in THETAS:
                fc = ce.closed_form_amplitude(p, t)
                worst = max(worst, abs(ce.analytic_sum_check(p, t) - fc) / abs(fc))
    verdict(2, worst <= 1e-10, f"max rel err {worst:.2e} (<= 1e-10)")


def test_criterion_03_raw_divergence():
    raw = ce.raw_coefficients(ce.ScatteringParams(1.0, 1.0))
    small = evaluate_partial_sums(raw, 0.0, 100)
    big = evaluate_partial_sums(raw, 0.0, 10_000)
    t_small, t_big = abs(small.terms[100]), abs(big.terms[10_000])
    osc_small = float(np.max(np.abs(small.terms[-100:])))
    osc_big = float(np.max(np.abs(big.terms[-100:])))
    ok = t_big > t_small and osc_big >= 0.01 * osc_small
    verdict(3, ok, f"|c_L P_L(0)|: {t_small:.3g} at L=100 -> {t_big:.3g} at L=1e4; "
                   f"last-100 metric {osc_small:.3g} -> {osc_big:.3g}")


def test_criterion_04_m_test_verdicts():
    # comparison against sum 1/l: the once-reduced M_l ~ 4 eta^2 / l, so its
    # partial sums grow like 4 eta^2 ln L and the demanded factor 10 between
    # L = 1e3 and L = 1e6 is not reached; asserted as stated regardless
    l = np.arange(1, 1_000_001, dtype=float)
    ratios = {}
    for eta in (0.5, 1.0, 5.0):
        s = np.cumsum(ce.m_bound_reduced1(l, eta))
        ratios[eta] = s[-1] / s[999]
    part1 = all(r > 10 for r in ratios.values())
    v1 = ce.m_test(ce.ScatteringParams(1.0, 1.0), "reduced1").verdict

    Ls = np.array([1e2, 1e3, 1e4, 1e5])
    tails = []
    for L in Ls.astype(int):
        ll = np.arange(L + 1, 1000 * L + 1, dtype=float)
        # remainder beyond 1000 L is below 1e-6 of the tail
        tails.append(ce.m_bound_reduced2(ll, 1.0).sum())
    slope = np.polyfit(np.log(Ls), np.log(tails), 1)[0]
    v2 = ce.m_test(ce.ScatteringParams(1.0, 1.0), "reduced2").verdict
    part2 = abs(slope + 2) <= 0.2 * 2 and v2 == "convergent"
    ratio_txt = ", ".join(f"eta={e:g}: {r:.2f}" for e, r in ratios.items())
    verdict(4, part1 and v1 == "inconclusive" and part2,
            f"reduced1 sum ratio L=1e6/L=1e3 [{ratio_txt}] (need > 10), verdict {v1}; "
            f"reduced2 tail slope {slope:.3f} (-2 +- 20%), verdict {v2}")


def test_criterion_05_derivation_as_code():
    worst1 = worst2 = 0.0
    n = 501
    for eta, k in ((1.0, 1.0), (-0.5, 2.0)):
        p = ce.ScatteringParams(eta, k)
        r1 = ce.reduced1_coefficients(p).block(0, n)
        r2 = ce.reduced2_coefficients(p).block(0, n)
        # raw coefficients at 40 digits: |raw| ~ l cancels to |reduced2| ~ l^-3
        with mp.workdps(40):
            raw = ce.raw_coefficients(p, dps=40)
            d1 = multiply_by_one_minus_x(raw).block(0, n).astype(complex)
            d2 = reduce_series(raw, 2).block(0, n).astype(complex)
        worst1 = max(worst1, np.max(np.abs(d1 - r1) / np.abs(r1)))
        worst2 = max(worst2, np.max(np.abs(d2 - r2) / np.abs(r2)))
    ok = worst1 <= 1e-10 and worst2 <= 1e-10
    verdict(5, ok, f"once {worst1:.2e}, twice {worst2:.2e} (<= 1e-10, l <= 500)")


def test_criterion_06_bateman():
    xs = np.linspace(-0.99, 0.99, 199)
    e1 = ce.bateman_max_error(1, 1, xs)
    errs = {eta: ce.bateman_max_error(1 - 1j * eta, 2000, xs) for eta in (0.5, 2.0)}
    ok = e1 <= 1e-14 and all(e <= 1e-4 for e in errs.values())
    verdict(6, ok, f"rho=1 n=1: {e1:.2e} (<= 1e-14); rho=1-0.5i: {errs[0.5]:.2e}, "
                   f"rho=1-2i: {errs[2.0]:.2e} (<= 1e-4)")


def test_criterion_07_special_function_properties():
    rng = np.random.default_rng(20261014)
    # gamma recurrence on the stated annulus
    r = rng.uniform(0.5, 100, 3 * N_RANDOM)
    phi = rng.uniform(-math.pi, math.pi, 3 * N_RANDOM)
    z = r * np.exp(1j * phi)
    z = z[(np.abs(z.imag) >= 1e-3) | (z.real > 0)][:N_RANDOM]
    ratio = np.exp(log_gamma(z + 1) - log_gamma(z))
    e_gamma = float(np.max(np.abs(ratio - z) / np.abs(z)))

    # sigma arctan recurrence at random (l, eta)
    etas = rng.choice([0.1, -0.1, 1.0, -1.0, 5.0, -5.0], N_RANDOM)
    ls = rng.integers(1, 10_001, N_RANDOM)
    e_sigma = 0.0
    for eta in np.unique(etas):
        sig = coulomb_phase_shifts(10_000, float(eta))
        sel = ls[etas == eta]
        e_sigma = max(e_sigma, float(np.max(np.abs(sig[sel] - sig[sel - 1] - np.arctan(eta / sel)))))

    # Legendre three-term recurrence and |P_l| <= 1
    lmax = 1000
    xs = rng.uniform(-1, 1, N_RANDOM)
    lsl = rng.integers(1, lmax, N_RANDOM)
    P = legendre_all(lmax, xs)
    cols = np.arange(N_RANDOM)
    resid = (2 * lsl + 1) * xs * P[lsl, cols] - (lsl + 1) * P[lsl + 1, cols] - lsl * P[lsl - 1, cols]
    e_three = float(np.max(np.abs(resid)))
    p_max = float(np.max(np.abs(P)))

    # pochhammer step, exact as computed
    xi = rng.uniform(-20, 20, N_RANDOM) + 1j * rng.uniform(-20, 20, N_RANDOM)
    ns = rng.integers(0, 40, N_RANDOM)
    exact = all(pochhammer(a, int(n) + 1) == pochhammer(a, int(n)) * (a + int(n))
                for a, n in zip(xi, ns))

    ok = e_gamma <= 1e-11 and e_sigma <= 1e-12 and e_three <= 1e-12 and p_max <= 1 + 1e-12 and exact
    verdict(7, ok, f"{N_RANDOM} instances each: gamma {e_gamma:.1e} (<= 1e-11), "
                   f"sigma {e_sigma:.1e} (<= 1e-12), three-term {e_three:.1e} (<= 1e-12), "
                   f"max|P| {p_max:.15g}, pochhammer exact: {exact}")


def test_criterion_08_rutherford():
    worst = 0.0
    for eta in ETAS:
        for k in KS:
            p = ce.ScatteringParams(eta, k)
            for t in np.linspace(math.radians(1), math.pi, 180):
                f = ce.closed_form_amplitude(p, t)
                lhs = abs(f) ** 2 * 4 * k**2 * math.sin(t / 2) ** 4
                worst = max(worst, abs(lhs - eta**2) / eta**2)
    verdict(8, worst <= 1e-12, f"max rel err {worst:.2e} (<= 1e-12)")


def test_criterion_09_nuclear_coulomb_split():
    worst_zero = 0.0
    for eta in ETAS:
        p = ce.ScatteringParams(eta, 1.0)
        for t in THETAS:
            fc = ce.closed_form_amplitude(p, t)
            f = combined_amplitude(p, PhaseShiftTable((0.0,) * 8), t)
            worst_zero = max(worst_zero, abs(f - fc) / abs(fc))
    p0 = ce.ScatteringParams(0.0, 1.0)
    worst_unit = max(abs(combined_amplitude(p0, PhaseShiftTable((math.pi / 2,)), t) - 1j)
                     for t in THETAS)
    ok = worst_zero <= 1e-12 and worst_unit <= 1e-12
    verdict(9, ok, f"zero-delta rel err {worst_zero:.2e}, unitary s-wave |f - i| {worst_unit:.2e} "
                   f"(<= 1e-12)")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "coulomb_pw", *args],
                          capture_output=True, text=True)


def test_criterion_10_cli():
    runs = {
        "amplitude": (["amplitude", "--eta", "1", "--method", "reduced2"], 0),
        "amplitude-raw": (["amplitude", "--eta", "1", "--method", "raw", "--lmax", "500"], 1),
        "converge": (["converge", "--eta", "1", "--method", "reduced2"], 0),
        "compare": (["compare", "--eta", "1", "--theta", "30:180:30", "--tol", "1e-6"], 0),
        "compare-bad-theta": (["compare", "--eta", "1", "--theta", "0.5,30"], 2),
        "identities": (["identities", "--eta", "1"], 0),
        "bateman-check": (["bateman-check", "--rho-re", "1", "--rho-im", "-0.5"], 0),
        "bateman-pole": (["bateman-check", "--rho-re", "-2"], 2),
        "combined": (["amplitude", "--eta", "0.5", "--method", "combined",
                      "--phase-shifts", SAMPLE], 0),
    }
    failures = []
    for name, (argv, want) in runs.items():
        first, second = _cli(*argv), _cli(*argv)
        if first.returncode != want:
            failures.append(f"{name}: exit {first.returncode} != {want}")
        if first.stdout != second.stdout:
            failures.append(f"{name}: output not byte-identical")

    csv_out = _cli("amplitude", "--eta", "-0.5", "--k", "2", "--method", "reduced2").stdout
    json_out = _cli("amplitude", "--eta", "-0.5", "--k", "2", "--method", "reduced2",
                    "--format", "json").stdout
    body = [ln for ln in csv_out.splitlines() if not ln.startswith("#")]
    header = body[0].split(",")
    csv_rows = [dict(zip(header, ln.split(","))) for ln in body[1:]]
    json_rows = json.loads(json_out)["rows"]
    for c, j in zip(csv_rows, json_rows):
        for key in ("theta_deg", "re_f", "im_f", "dsigma", "L_used"):
            if float(c[key]) != j[key]:
                failures.append(f"csv/json mismatch in {key}")
    if len(csv_rows) != len(json_rows):
        failures.append("csv/json row count mismatch")
    verdict(10, not failures, f"{len(runs)} invocations over 5 commands, exit codes 0/1/2, "
                              f"repeat + cross-format checks"
                              + (f"; {failures}" if failures else ""))
