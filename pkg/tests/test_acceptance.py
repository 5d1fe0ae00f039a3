"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they are produced.  Every tolerance is pinned here, none deferred.
"""

import csv
import io
import math
import subprocess
import sys
import time

import numpy as np

from stepliouville.core import ProblemParams, d_lambda, lambda_of_beta, psi, varphi
from stepliouville.noneven import (
    continue_branch,
    even_embedding,
    lemma_bounds,
    matching_residual,
)
from stepliouville.roots import invert_lambda, solve_beta1, solve_beta2
from stepliouville.spectrum import (
    DegenerateSolutionError,
    eigenfunction,
    eigenvalues,
    eigenvalues_matrix,
    morse_index,
)
from stepliouville.verify import check_small_amplitude_uniqueness, verify_solution

P_HALF = ProblemParams(0.5)
BETA1 = solve_beta1()
ALPHAS = (0.1, 0.3, 0.5, 0.7, 0.9)

_cache = {}


def _report(number, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {number}: {status}"
    if detail:
        line += f" — {detail}"
    if failures:
        line += " — " + "; ".join(failures)
    print(line)
    assert not failures, line


def _morse_grid(alpha):
    """200-point beta grid over (beta1/4, 3 beta2) for one alpha."""
    key = ("grid", alpha)
    if key not in _cache:
        beta2 = solve_beta2(ProblemParams(alpha))
        grid = np.linspace(BETA1 / 4, 3 * beta2, 202)[1:-1]
        _cache[key] = (grid, beta2)
    return _cache[key]


def _branch():
    if "branch" not in _cache:
        beta2 = solve_beta2(P_HALF)
        t0 = time.perf_counter()
        branch = continue_branch(P_HALF, max_supnorm=3.05 * beta2, min_lambda=1e-6)
        _cache["branch"] = (branch, time.perf_counter() - t0)
    return _cache["branch"]


def test_criterion_1_fold_amplitude_reproduction(tmp_path):
    failures = []
    out = tmp_path / "sp.csv"
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "stepliouville", "special-points", "--alpha", "0.5",
         "--out", str(out)],
        capture_output=True,
        text=True,
    )
    elapsed = time.perf_counter() - t0
    if proc.returncode != 0:
        failures.append(f"special-points exited {proc.returncode}")
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    beta1 = float(rows[0]["beta1"])
    residual = float(rows[0]["beta1_residual"])
    if residual >= 1e-14:
        failures.append(f"defining-equation residual {residual:.3e} >= 1e-14")
    if elapsed >= 1.0:
        failures.append(f"runtime {elapsed:.2f}s >= 1s")
    if not (1.175 <= beta1 <= 1.185):
        failures.append(
            f"beta1={beta1:.10f} outside [1.175, 1.185] "
            "(the defining equation's unique root is 1.1868..., which matches "
            "the quoted '1.18...' but not this window)"
        )
    _report(1, failures, f"beta1={beta1:.6f}, residual={residual:.1e}, {elapsed:.2f}s")


def test_criterion_2_morse_index_staircase():
    failures = []
    t0 = time.perf_counter()
    for alpha in ALPHAS:
        params = ProblemParams(alpha)
        grid, beta2 = _morse_grid(alpha)
        for beta in grid:
            if abs(beta - BETA1) <= 1e-4 or abs(beta - beta2) <= 1e-4:
                continue  # degeneracy bands are excluded by the criterion
            expected = 0 if beta < BETA1 else (1 if beta < beta2 else 2)
            try:
                got = morse_index(beta, params)
            except DegenerateSolutionError:
                failures.append(f"alpha={alpha}, beta={beta:.6f}: spurious degeneracy")
                continue
            if got != expected:
                failures.append(f"alpha={alpha}, beta={beta:.6f}: m={got} != {expected}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 120.0:
        failures.append(f"runtime {elapsed:.1f}s >= 2min")
    _report(2, failures[:5], f"1000 grid points in {elapsed:.1f}s")


def test_criterion_3_degenerate_eigenfunction_oracles():
    failures = []
    beta2 = solve_beta2(P_HALF)
    grid = np.linspace(-1, 1, 801)

    mu1 = eigenvalues(BETA1, P_HALF, 1).eigenvalues[0]
    if abs(mu1) >= 1e-6:
        failures.append(f"|mu1(beta1)|={abs(mu1):.2e} >= 1e-6")
    phi1 = eigenfunction(BETA1, P_HALF, 1, grid, mu=mu1)
    exact1 = np.asarray(psi(grid, BETA1, P_HALF))
    exact1 = exact1 / np.max(np.abs(exact1))
    err1 = float(np.max(np.abs(phi1 - exact1)))
    if err1 >= 1e-6:
        failures.append(f"k=1 eigenfunction sup error {err1:.2e} >= 1e-6")

    mu2 = eigenvalues(beta2, P_HALF, 2).eigenvalues[1]
    if abs(mu2) >= 1e-6:
        failures.append(f"|mu2(beta2)|={abs(mu2):.2e} >= 1e-6")
    phi2 = eigenfunction(beta2, P_HALF, 2, grid, mu=mu2)
    exact2 = np.asarray(varphi(grid, beta2, P_HALF))
    exact2 = exact2 / np.max(np.abs(exact2))
    err2 = float(min(np.max(np.abs(phi2 - exact2)), np.max(np.abs(phi2 + exact2))))
    if err2 >= 1e-6:
        failures.append(f"k=2 eigenfunction sup error {err2:.2e} >= 1e-6")

    _report(3, failures, f"sup errors {err1:.1e}, {err2:.1e}; |mu|={abs(mu1):.1e}, {abs(mu2):.1e}")


def test_criterion_4_third_eigenvalue_positive():
    failures = []
    t0 = time.perf_counter()
    worst = math.inf
    for alpha in ALPHAS:
        params = ProblemParams(alpha)
        grid, _ = _morse_grid(alpha)
        for beta in grid:
            mu3 = eigenvalues(beta, params, 3).eigenvalues[2]
            worst = min(worst, mu3)
            if mu3 <= 0.0:
                failures.append(f"alpha={alpha}, beta={beta:.6f}: mu3={mu3:.3e} <= 0")
    elapsed = time.perf_counter() - t0
    _report(4, failures[:5], f"min mu3 = {worst:.4f} over 1000 points in {elapsed:.1f}s")


def test_criterion_5_cross_method_spectrum_agreement():
    failures = []
    samples = ((1.0, 0.5), (0.8, 0.3), (1.2, 0.7))
    n_coarse = 399  # 400 intervals; +-alpha on nodes for all three alphas
    n_fine = 2 * n_coarse + 1
    ratios = []
    for beta, alpha in samples:
        params = ProblemParams(alpha)
        spec = eigenvalues(beta, params, 3)
        coarse = eigenvalues_matrix(beta, params, 3, n_grid=n_coarse)
        fine = eigenvalues_matrix(beta, params, 3, n_grid=n_fine)
        for k in range(3):
            e1 = abs(coarse[k] - spec.eigenvalues[k])
            e2 = abs(fine[k] - spec.eigenvalues[k])
            ratio = e1 / e2
            ratios.append(ratio)
            if not (3.5 < ratio < 4.5):
                failures.append(f"(beta={beta}, alpha={alpha}, k={k + 1}): ratio {ratio:.2f}")
            if e2 >= 1e-3 * (1.0 + abs(spec.eigenvalues[k])):
                failures.append(
                    f"(beta={beta}, alpha={alpha}, k={k + 1}): fine-mesh error {e2:.2e} too large"
                )
    _report(5, failures, f"ratios {min(ratios):.2f}..{max(ratios):.2f}")


def test_criterion_6_even_family_exactness():
    failures = []
    rng = np.random.default_rng(20260810)
    betas = rng.uniform(0.2, 6.0, 50)
    alphas = rng.uniform(0.1, 0.9, 50)  # the weight range the criteria exercise
    worst = 0.0
    for beta, alpha in zip(betas, alphas):
        params = ProblemParams(float(alpha))
        emb = even_embedding(float(beta), params)
        report = verify_solution(emb)
        checks = {
            "matching": float(np.max(np.abs(matching_residual(emb)))),
            "ode": report.ode_residual_sup,
            "green": report.green_residual_sup,
        }
        worst = max(worst, *checks.values())
        for name, value in checks.items():
            if value >= 1e-8:
                failures.append(f"(beta={beta:.3f}, alpha={alpha:.3f}) {name}={value:.2e}")
    _report(6, failures[:5], f"50 random pairs, worst residual {worst:.1e}")


def test_criterion_7_noneven_branch_bounds():
    failures = []
    beta2 = solve_beta2(P_HALF)
    branch, trace_time = _branch()
    t0 = time.perf_counter()
    reports = [verify_solution(pt.solution) for pt in branch.points]
    elapsed = trace_time + (time.perf_counter() - t0)

    verified = sum(1 for r in reports if r.verified)
    if verified < 100:
        failures.append(f"only {verified} verified points")
    for pt, rep in zip(branch.points, reports):
        if not rep.verified:
            failures.append(f"s={pt.s:.3f}: unverified (ode={rep.ode_residual_sup:.2e})")
            continue
        bounds = lemma_bounds(pt.solution)
        if not bounds.ok:
            failures.append(f"s={pt.s:.3f}: load bounds violated")
        if bounds.identity_residual >= 1e-8:
            failures.append(f"s={pt.s:.3f}: identity residual {bounds.identity_residual:.2e}")
    sup_max = max(pt.sup_norm for pt in branch.points)
    if sup_max < 3 * beta2:
        failures.append(f"sup-norm only reached {sup_max:.3f} < {3 * beta2:.3f}")
    lam_start = branch.points[0].solution.lam
    lam_final = branch.points[-1].solution.lam
    if not lam_final < lam_start / 10:
        failures.append(f"final lambda {lam_final:.4f} not below start/10 {lam_start / 10:.4f}")
    if elapsed >= 60.0:
        failures.append(f"runtime {elapsed:.1f}s >= 1min")
    _report(
        7,
        failures[:5],
        f"{len(branch.points)} points, sup->{sup_max:.2f}, lambda {lam_start:.3f}->{lam_final:.4f}, {elapsed:.1f}s",
    )


def test_criterion_8_small_amplitude_uniqueness_audit():
    failures = []
    branch, _ = _branch()
    lam_cap = float(lambda_of_beta(1.0, P_HALF))
    for j in range(1, 21):
        lam = lam_cap * j / 20.0
        lo, hi = invert_lambda(lam, P_HALF)
        solutions = [even_embedding(lo, P_HALF), even_embedding(hi, P_HALF)]
        matching = [
            pt.solution
            for pt in branch.points
            if abs(pt.solution.lam - lam) <= 5e-3 * lam
        ]
        solutions.extend(matching)
        if not check_small_amplitude_uniqueness(lam, P_HALF, solutions):
            failures.append(f"lambda={lam:.4f}: more than one small-amplitude solution")
    noneven_small_load = [pt for pt in branch.points if pt.solution.lam <= lam_cap]
    offenders = [pt for pt in noneven_small_load if pt.sup_norm <= 1.0]
    if offenders:
        failures.append(f"{len(offenders)} non-even points with sup-norm <= 1")
    _report(8, failures, f"20 loads audited, {len(noneven_small_load)} non-even points checked")


def test_criterion_9_load_curve_unimodality_and_limits():
    failures = []
    grid = np.arange(1e-3, 3 * solve_beta2(P_HALF), 1e-3)
    signs = np.sign(d_lambda(grid, P_HALF))
    flips = np.nonzero(np.diff(signs) != 0)[0]
    if len(flips) != 1:
        failures.append(f"{len(flips)} sign changes of the load derivative")
    else:
        flip_at = grid[flips[0] + 1]
        if abs(flip_at - BETA1) > 1e-3 + 1e-12:
            failures.append(f"sign change at {flip_at:.6f}, not within 1e-3 of beta1")
    small = float(lambda_of_beta(1e-8, P_HALF))
    large = float(lambda_of_beta(50.0, P_HALF))
    if small >= 1e-7:
        failures.append(f"Lambda(1e-8)={small:.2e} >= 1e-7")
    if large >= 1e-3:
        failures.append(f"Lambda(50)={large:.2e} >= 1e-3")
    _report(9, failures, f"Lambda(1e-8)={small:.1e}, Lambda(50)={large:.1e}")
