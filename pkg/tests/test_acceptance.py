"""Acceptance gate: one test and one printed pass/fail line per criterion.

Each criterion is checked at its stated tolerance and runtime budget; the
summary lines are printed by the terminal-summary hook in conftest.py.
"""

import json
import math
import time

import numpy as np
from scipy import stats

from conftest import ACCEPTANCE_LINES
from depbernstein import bounds, cantor, mixing, models, spectral
from depbernstein.cli import main as cli_main


def record(num, name, failures, elapsed=None, budget=None):
    ok = not failures
    if budget is not None and elapsed is not None and elapsed > budget:
        ok = False
        failures = list(failures) + [f"runtime {elapsed:.1f}s > budget {budget}s"]
    detail = f" ({elapsed:.1f}s)" if elapsed is not None else ""
    line = f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'}{detail}"
    ACCEPTANCE_LINES.append(line)
    assert ok, (line, failures[:10])


def test_criterion_01_cantor_exhaustive():
    t0 = time.monotonic()
    failures = []
    for A in range(2, 5001):
        part = cantor.cantor_set(A)
        p = part.params
        if not (A >= part.card >= A / 2):
            failures.append(("cardinality", A))
        if p.ell > math.log2(A):
            failures.append(("level_ceiling", A))
        n_ell = p.n_seq[p.ell]
        if any(len(leaf) != n_ell for leaf in part.leaves):
            failures.append(("leaf_size", A))
        if len(part.leaves) != 2 ** p.ell:
            failures.append(("leaf_count", A))
        for k in range(p.ell + 1):
            blocks = cantor.level_blocks(part, k)
            if any(len(b) != 2 ** (p.ell - k) * n_ell for b in blocks):
                failures.append(("block_size", A, k))
        for j in range(p.ell):
            if any(len(gap) != p.d_seq[j] for gap in part.remainders[j]):
                failures.append(("gap_size", A, j))
            floor = A * p.delta * (1.0 - p.delta) ** j / 2.0 ** (j + 1)
            if p.d_seq[j] < floor:
                failures.append(("gap_floor", A, j))
        if failures:
            break
    record(1, "cantor-invariants-exhaustive", failures,
           time.monotonic() - t0, budget=30.0)


def test_criterion_02_cantor_spot_values():
    failures = []
    p100 = cantor.cantor_set(100)
    if not (p100.params.ell == 1 and p100.params.n_seq[1] == 47
            and p100.params.d_seq[0] == 6 and p100.card == 94):
        failures.append(("A=100", p100.params))
    p1000 = cantor.cantor_set(1000)
    if not (p1000.params.ell == 4
            and p1000.params.n_seq == (1000, 475, 226, 108, 51)
            and p1000.params.d_seq == (50, 23, 10, 6)
            and p1000.card == 816):
        failures.append(("A=1000", p1000.params))
    record(2, "cantor-spot-values", failures)


def test_criterion_03_g_of_4():
    failures = []
    val = bounds.g(4.0)
    if not (3.099 - 1e-4 <= val <= 3.100 + 1e-4 and val <= 3.1):
        failures.append(("g(4)", val))
    record(3, "g4-constant", failures)


def test_criterion_04_schedule_ceilings():
    t0 = time.monotonic()
    failures = []
    for n in (4, 16, 256, 4096):
        for c in (0.5, 2.0, 10.0):
            for v in (0.1, 1.0, 10.0):
                for M in (0.1, 1.0, 10.0):
                    inp = bounds.BernsteinInputs(n=n, d=2, M=M, v=v, c=c)
                    try:
                        pairs = bounds.sigma_kappa_schedule(inp)
                    except AssertionError:
                        failures.append((n, c, v, M))
                        continue
                    tot = bounds.combine_sigma_kappa(pairs)
                    if tot.sigma > 15.0 * math.sqrt(n) * v + 2.0 * M / math.sqrt(c):
                        failures.append(("sigma", n, c, v, M))
                    if tot.kappa > M * bounds.gamma_cn(c, n):
                        failures.append(("kappa", n, c, v, M))
    record(4, "schedule-ceilings", failures, time.monotonic() - t0, budget=5.0)


def test_criterion_05_split_identity():
    t0 = time.monotonic()
    failures = []
    rng = np.random.default_rng(12345)
    for case in range(1000):
        s0, s1, k0, k1 = rng.uniform(0.05, 5.0, 4)
        p0 = bounds.SigmaKappaPair(s0, k0)
        p1 = bounds.SigmaKappaPair(s1, k1)
        comb = bounds.combine_sigma_kappa([p0, p1])
        t = rng.uniform(0.0, 0.999) / comb.kappa
        u = bounds.split_weight(p0, p1, t)
        lhs = (u * bounds.gamma_majorant(p0, t / u)
               + (1.0 - u) * bounds.gamma_majorant(p1, t / (1.0 - u)))
        rhs = (comb.sigma * t) ** 2 / (1.0 - comb.kappa * t)
        if abs(lhs - rhs) > 1e-12 * (1.0 + abs(rhs)):
            failures.append((case, lhs, rhs))
    record(5, "split-identity", failures, time.monotonic() - t0, budget=1.0)


def test_criterion_06_inequality_fuzz():
    t0 = time.monotonic()
    failures = []
    rng = np.random.default_rng(99)
    for case in range(1000):
        d = int(rng.integers(2, 9))
        a = spectral.SymMatrix(_rand_sym(rng, d))
        b = spectral.SymMatrix(_rand_sym(rng, d))
        if not spectral.check_golden_thompson(a, b)[2]:
            failures.append(("golden_thompson", case))
        for p in (1.5, 2.0, 3.0, 10.0):
            if not spectral.check_trace_holder(a, b, p)[2]:
                failures.append(("trace_holder", p, case))
        lam_sum, sum_lam = spectral.weyl_lambda_max_bound([a, b])
        if lam_sum > sum_lam + 1e-9 * (1.0 + abs(sum_lam)):
            failures.append(("weyl", case))
        spec_norm = spectral.schatten_norm(a, np.inf)
        if spectral.gerschgorin_bound(a) < spec_norm - 1e-9 * (1.0 + spec_norm):
            failures.append(("gerschgorin", case))
        dt, ts = 1e-3, float(rng.uniform(0.1, 1.0))
        second = (spectral.trace_exp(ts + dt, a)
                  - 2.0 * spectral.trace_exp(ts, a)
                  + spectral.trace_exp(ts - dt, a)) / dt ** 2
        if second < -1e-8 * (1.0 + abs(spectral.trace_exp(ts, a))):
            failures.append(("trace_exp_convexity", case))
    record(6, "inequality-fuzz", failures, time.monotonic() - t0, budget=60.0)


def _rand_sym(rng, d):
    m = rng.uniform(-2.0, 2.0, (d, d))
    return (m + m.T) / 2.0


def test_criterion_07_exact_beta():
    failures = []
    chain = mixing.MarkovChain.two_state(0.25, 0.25)
    for k in range(1, 21):
        if abs(mixing.beta_k_exact(chain, k) - 0.5 ** (k + 1)) > 1e-12:
            failures.append(("closed_form", k))
    rng = np.random.default_rng(2024)
    for case in range(200):
        s = int(rng.integers(2, 5))
        P = rng.uniform(0.05, 1.0, (s, s))
        P /= P.sum(axis=1, keepdims=True)
        ch = mixing.MarkovChain.from_transition(P)
        for k in range(1, 7):
            direct = mixing.beta_k_exact(ch, k)
            via_joint = mixing.beta_from_joint(ch.joint_law(k))
            if abs(direct - via_joint) > 1e-10:
                failures.append(("joint_agreement", case, k))
    record(7, "exact-beta", failures)


def test_criterion_08_berbee_coupling():
    failures = []
    joint = mixing.JointLaw(np.array([[0.5, 0.0], [0.0, 0.5]]))  # beta = 1/2
    x, y, ystar = mixing.berbee_coupling(joint, seed=31337).sample(100_000)
    freq = float(np.mean(y != ystar))
    if abs(freq - 0.5) > 0.013:
        failures.append(("mismatch_rate", freq))
    counts = np.bincount(ystar, minlength=2)
    expected = joint.y_marginal * ystar.size
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    if stats.chi2.sf(chi2, df=1) < 1e-3:
        failures.append(("ystar_marginal", chi2))
    table = np.zeros((2, 2))
    np.add.at(table, (x, ystar), 1.0)
    if stats.chi2_contingency(table)[1] < 1e-3:
        failures.append(("independence", table.tolist()))
    record(8, "berbee-coupling", failures)


def _contraction_spec(d):
    chain = mixing.MarkovChain.two_state(0.25, 0.25)
    D = np.diag(np.linspace(1.0, -1.0, d))  # spectral radius M = 1
    tau = np.array([1.0, -1.0])
    return models.ModelSpec(kind="contraction", d=d, chain=chain, D=D, tau_map=tau)


def test_criterion_09_laplace_dominance():
    t0 = time.monotonic()
    failures = []
    spec = _contraction_spec(2)
    for n in (8, 32):
        inputs = models.bernstein_inputs_for(spec, n)
        t_max = 1.0 / (inputs.M * bounds.gamma_cn(inputs.c, n))
        t_grid = np.linspace(0.1, 0.9, 5) * t_max
        for t, est, stderr in models.empirical_laplace(
                spec, n, t_grid, trials=10_000, seed=77):
            if math.log(est) > bounds.master_log_laplace(t, inputs) + 3.0 * stderr / est:
                failures.append((n, t, est, stderr))
    record(9, "laplace-dominance", failures, time.monotonic() - t0, budget=300.0)


def test_criterion_10_tail_dominance():
    t0 = time.monotonic()
    failures = []
    spec = _contraction_spec(4)
    n, trials = 1024, 10_000
    inputs = models.bernstein_inputs_for(spec, n)  # exact v^2, fitted c
    top = n * inputs.M
    x_grid = np.linspace(0.02 * top, 1.2 * top, 12)
    report = models.run_tail_experiment(spec, n, trials=trials, x_grid=x_grid,
                                        seed=88, inputs=inputs)
    for (x, p_hat, lo, hi), (_, b) in zip(report.tail_grid, report.bound_curve):
        if b < 1.0 and p_hat > b:
            failures.append(("tail", x, p_hat, b))
    mean, stderr, bound = models.run_expectation_experiment(
        spec, n, trials=trials, seed=89, inputs=inputs)
    if mean > bound + 3.0 * stderr:
        failures.append(("expectation", mean, stderr, bound))
    record(10, "tail-dominance", failures, time.monotonic() - t0, budget=600.0)


def test_criterion_11_v2_oracles():
    failures = []
    homogeneous = models.ModelSpec(
        kind="contraction", d=2, chain=mixing.MarkovChain.two_state(0.25, 0.25),
        D=np.array([[1.0, 0.25], [0.25, 0.5]]), tau_map=np.array([0.8, 0.8]))
    brute = models.v2_bruteforce(homogeneous, 8, mode="exact").value
    exact = models.v2_exact_contraction(homogeneous)
    if abs(brute - exact) > 1e-10:
        failures.append(("bruteforce_vs_exact", brute, exact))
    rng = np.random.default_rng(555)
    for case in range(20):
        s = int(rng.integers(2, 4))
        P = rng.uniform(0.1, 1.0, (s, s))
        P /= P.sum(axis=1, keepdims=True)
        chain = mixing.MarkovChain.from_transition(P)
        d = int(rng.integers(1, 4))
        D = _rand_sym(rng, d)
        tau = rng.uniform(-1.0, 1.0, s)
        spec = models.ModelSpec(kind="contraction", d=d, chain=chain,
                                D=D, tau_map=tau)
        n = int(rng.integers(2, 9))
        brute = models.v2_bruteforce(spec, n, mode="exact").value
        est = models.v2_interval_estimate(spec, n, trials=400, seed=1000 + case)
        if est.value > brute + 3.0 * est.stderr:
            failures.append(("interval_vs_brute", case, est.value, brute, est.stderr))
    record(11, "v2-oracles", failures)


def test_criterion_12_simulate_determinism(tmp_path, capsys):
    failures = []
    config = tmp_path / "model.json"
    config.write_text(json.dumps({
        "P": [[0.75, 0.25], [0.25, 0.75]],
        "D": [[1.0, 0.0], [0.0, -0.5]],
        "tau_map": [1.0, -1.0],
    }))
    argv = ["simulate", "--model", "contraction", "--config", str(config),
            "--n", "16", "--trials", "200", "--seed", "42",
            "--x-grid", "0.5:16:6"]
    outputs = []
    for workers in ("1", "1", "2", "3"):
        code = cli_main(argv + ["--workers", workers])
        out = capsys.readouterr().out
        if code != 0:
            failures.append(("exit_code", workers, code))
        outputs.append(out.encode())
    if len(set(outputs)) != 1:
        failures.append(("outputs_differ", [len(o) for o in outputs]))
    record(12, "simulate-determinism", failures)
