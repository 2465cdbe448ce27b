"""Command-line entry point wiring the library into reproducible runs.

Exit codes: 0 success, 2 invariant violation (verify), 3 invalid input.
Every randomized command requires an explicit --seed and every output
embeds the resolved configuration, so runs are replayable byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import bounds, cantor, mixing, models
from .spectral import SymMatrix

SCHEMA = models.SCHEMA


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_cantor(args) -> int:
    part = cantor.cantor_set(args.A)
    p = part.params
    payload = {
        "schema": SCHEMA,
        "config": {"command": "cantor", "A": args.A, "level": args.level},
        "A": p.A, "delta": p.delta, "ell": p.ell,
        "n": list(p.n_seq), "d": list(p.d_seq), "K": list(part.K),
    }
    if args.level is not None:
        payload["blocks"] = [list(b) for b in cantor.level_blocks(part, args.level)]
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True), args.out)
    else:
        rows = [("K", i) for i in part.K]
        if args.level is not None:
            for j, b in enumerate(cantor.level_blocks(part, args.level)):
                rows += [(f"block_{j}", i) for i in b]
        _emit(_csv_text(("set", "index"), rows), args.out)
    return 0


def _bound_row(kind, n, d, M, v, c, x, t, C):
    inputs = bounds.BernsteinInputs(n=n, d=d, M=M, v=v, c=c)
    if kind == "tail":
        b, t_star = bounds.tail_bound_certified(x, inputs)
        return {"bound": b, "t_star": t_star}
    if kind == "laplace":
        return {"log_laplace": bounds.master_log_laplace(t, inputs)}
    if kind == "expectation":
        return {"bound": bounds.expectation_bound(inputs)}
    if kind == "theorem1":
        return {"bound": bounds.theorem1_form(x, inputs, C)}
    raise ValueError(f"unknown bound kind {kind!r}")


def cmd_bound(args) -> int:
    if args.batch:
        with open(args.batch) as fh:
            rows = list(csv.DictReader(fh))
        out_rows, extra_cols = [], []
        for row in rows:
            res = _bound_row(
                args.kind, int(row["n"]), int(row["d"]), float(row["M"]),
                float(row["v"]), float(row["c"]),
                float(row.get("x", args.x or 0.0)),
                float(row.get("t", args.t or 0.0)), args.C,
            )
            extra_cols = sorted(res)
            out_rows.append(list(row.values()) + [res[k] for k in extra_cols])
        header = list(rows[0].keys()) + extra_cols
        _emit(_csv_text(header, out_rows), args.out)
        return 0
    res = _bound_row(args.kind, args.n, args.d, args.M, args.v, args.c,
                     args.x, args.t, args.C)
    config = {"command": "bound", "kind": args.kind, "n": args.n, "d": args.d,
              "M": args.M, "v": args.v, "c": args.c, "x": args.x, "t": args.t,
              "C": args.C}
    if args.format == "json":
        _emit(json.dumps({"schema": SCHEMA, "config": config, **res},
                         sort_keys=True), args.out)
    else:
        _emit(_csv_text(sorted(res), [[res[k] for k in sorted(res)]]), args.out)
    return 0


def cmd_mixing(args) -> int:
    with open(args.chain) as fh:
        chain = mixing.MarkovChain.from_json(fh.read())
    k_lo, k_hi = (int(s) for s in args.beta_k.split(".."))
    betas = [(k, mixing.beta_k_exact(chain, k)) for k in range(k_lo, k_hi + 1)]
    c = mixing.fit_geometric_rate(chain, max(k_hi, 2)) if args.fit_c else None
    rows = [(k, bk, math.exp(-c * (k - 1)) if c is not None else "")
            for k, bk in betas]
    if args.format == "json":
        payload = {"schema": SCHEMA,
                   "config": {"command": "mixing", "chain": args.chain,
                              "beta_k": args.beta_k, "fit_c": args.fit_c},
                   "c": c,
                   "beta": [{"k": k, "beta_k": bk, "envelope": env if env != "" else None}
                            for k, bk, env in rows]}
        _emit(json.dumps(payload, sort_keys=True), args.out)
    else:
        _emit(_csv_text(("k", "beta_k", "envelope"), rows), args.out)
    return 0


def _model_from_config(kind: str, config: dict) -> models.ModelSpec:
    chain = mixing.MarkovChain.from_transition(np.asarray(config["P"], dtype=float))
    kind_map = {"contraction": "contraction", "blockcov": "block_covariance",
                "iid": "iid_baseline"}
    spec_kind = kind_map[kind]
    kwargs = {"kind": spec_kind, "chain": chain}
    if spec_kind == "block_covariance":
        kwargs["d"] = int(config["d"])
        kwargs["value_map"] = np.asarray(config["value_map"], dtype=float)
    else:
        D = SymMatrix(np.asarray(config["D"], dtype=float)).entries
        kwargs["d"] = D.shape[0]
        kwargs["D"] = D
        if spec_kind == "contraction":
            kwargs["tau_map"] = np.asarray(config["tau_map"], dtype=float)
    return models.ModelSpec(**kwargs)


def _parse_grid(text: str):
    a, b, steps = text.split(":")
    return np.linspace(float(a), float(b), int(steps)).tolist()


def cmd_simulate(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    spec = _model_from_config(args.model, config)
    report = models.run_tail_experiment(
        spec, n=args.n, trials=args.trials, x_grid=_parse_grid(args.x_grid),
        seed=args.seed, workers=args.workers,
    )
    if args.format == "json":
        _emit(report.to_json(), args.out)
    else:
        rows = [(x, p, lo, hi, b) for (x, p, lo, hi), (_, b)
                in zip(report.tail_grid, report.bound_curve)]
        _emit(_csv_text(("x", "p_hat", "ci_low", "ci_high", "certified_bound"),
                        rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# verify suites


def _suite_inequalities(budget, failures):
    from . import spectral
    rng = np.random.default_rng(20240901)
    deadline = time.monotonic() + budget
    for case in range(1000):
        if time.monotonic() > deadline:
            break
        d = int(rng.integers(2, 9))
        a = SymMatrix(_rand_sym(rng, d))
        b = SymMatrix(_rand_sym(rng, d))
        lhs, rhs, ok = spectral.check_golden_thompson(a, b)
        if not ok:
            failures.append({"invariant": "golden_thompson", "case": case,
                             "lhs": lhs, "rhs": rhs})
        for p in (1.5, 2.0, 3.0, 10.0):
            lhs, rhs, ok = spectral.check_trace_holder(a, b, p)
            if not ok:
                failures.append({"invariant": "trace_holder", "p": p,
                                 "case": case, "lhs": lhs, "rhs": rhs})
        lam_sum, sum_lam = spectral.weyl_lambda_max_bound([a, b])
        if lam_sum > sum_lam + 1e-9 * (1.0 + abs(sum_lam)):
            failures.append({"invariant": "weyl", "case": case})
        if spectral.gerschgorin_bound(a) < spectral.schatten_norm(a, np.inf) - 1e-9:
            failures.append({"invariant": "gerschgorin", "case": case})
        # second difference of t -> Tr exp(tA) must be >= -1e-8
        ts = 0.7
        dt = 1e-3
        second = (spectral.trace_exp(ts + dt, a) - 2 * spectral.trace_exp(ts, a)
                  + spectral.trace_exp(ts - dt, a)) / dt ** 2
        if second < -1e-8:
            failures.append({"invariant": "trace_exp_convexity", "case": case})


def _rand_sym(rng, d):
    m = rng.uniform(-2.0, 2.0, (d, d))
    return (m + m.T) / 2.0


def _suite_cantor(budget, failures):
    deadline = time.monotonic() + budget
    for A in range(2, 5001):
        if time.monotonic() > deadline:
            break
        part = cantor.cantor_set(A)
        p = part.params
        if not (A >= part.card >= A / 2):
            failures.append({"invariant": "kept_cardinality", "A": A})
        if part.card != 2 ** p.ell * p.n_seq[p.ell]:
            failures.append({"invariant": "kept_card_formula", "A": A})
        covered = set(part.K)
        for level in part.remainders:
            for gap in level:
                covered.update(gap)
        if covered != set(range(1, A + 1)):
            failures.append({"invariant": "disjoint_cover", "A": A})
        for j, dj in enumerate(p.d_seq[:-1] if p.ell else []):
            if dj < A * p.delta * (1 - p.delta) ** j / 2 ** (j + 1):
                failures.append({"invariant": "gap_floor", "A": A, "j": j})
        if p.ell > math.log(A) / math.log(2) + 1e-12:
            failures.append({"invariant": "level_ceiling", "A": A})


def _suite_bounds(budget, failures):
    rng = np.random.default_rng(7)
    for _ in range(1000):
        s0, s1 = rng.uniform(0.1, 3.0, 2)
        k0, k1 = rng.uniform(0.1, 3.0, 2)
        p0 = bounds.SigmaKappaPair(s0, k0)
        p1 = bounds.SigmaKappaPair(s1, k1)
        comb = bounds.combine_sigma_kappa([p0, p1])
        t = rng.uniform(0.0, 0.999) / comb.kappa
        u = bounds.split_weight(p0, p1, t)
        lhs = (u * bounds.gamma_majorant(p0, t / u)
               + (1 - u) * bounds.gamma_majorant(p1, t / (1 - u)))
        rhs = bounds.gamma_majorant(comb, t)
        if abs(lhs - rhs) > 1e-12 * (1.0 + abs(rhs)):
            failures.append({"invariant": "split_identity", "lhs": lhs, "rhs": rhs})
    for n in (4, 16, 256, 4096):
        for c in (0.5, 2.0, 10.0):
            for v in (0.1, 1.0, 10.0):
                for M in (0.1, 1.0, 10.0):
                    try:
                        bounds.sigma_kappa_schedule(
                            bounds.BernsteinInputs(n=n, d=2, M=M, v=v, c=c))
                    except AssertionError:
                        failures.append({"invariant": "schedule_ceiling",
                                         "n": n, "c": c, "v": v, "M": M})


def _suite_coupling(budget, failures):
    joint = mixing.JointLaw(pmf=np.array([[0.5, 0.0], [0.0, 0.5]]))
    coupler = mixing.berbee_coupling(joint, seed=123)
    x, y, ystar = coupler.sample(100_000)
    freq = float(np.mean(y != ystar))
    beta = mixing.beta_from_joint(joint)
    if abs(freq - beta) > 0.013:
        failures.append({"invariant": "coupling_mismatch_rate",
                         "freq": freq, "beta": beta})
    counts = np.bincount(ystar, minlength=2)
    expected = joint.y_marginal * ystar.size
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    from scipy.stats import chi2 as chi2_dist
    if chi2_dist.sf(chi2, df=1) < 1e-3:
        failures.append({"invariant": "coupling_marginal", "chi2": chi2})


def _suite_dominance(budget, failures):
    for cfg in shipped_model_configs():
        spec = cfg["spec"]
        inputs = models.bernstein_inputs_for(spec, cfg["n"])
        report = models.run_tail_experiment(
            spec, n=cfg["n"], trials=2000, x_grid=cfg["x_grid"], seed=11)
        for (x, p_hat, lo, hi), (_, b) in zip(report.tail_grid, report.bound_curve):
            if b < 1.0 and lo > b:
                failures.append({"invariant": "tail_dominance",
                                 "model": cfg["name"], "x": x,
                                 "ci_low": lo, "bound": b})


def shipped_model_configs():
    """The three model configurations exercised by `verify dominance`."""
    chain = mixing.MarkovChain.two_state(0.25, 0.25)
    D2 = np.diag([1.0, -0.5])
    D4 = np.diag([1.0, -1.0, 0.5, -0.25])
    tau = np.array([1.0, -1.0])
    specs = [
        ("iid", models.ModelSpec(kind="iid_baseline", d=2, chain=chain, D=D2), 64),
        ("contraction",
         models.ModelSpec(kind="contraction", d=4, chain=chain, D=D4, tau_map=tau),
         256),
        ("blockcov",
         models.ModelSpec(kind="block_covariance", d=2, chain=chain,
                          value_map=np.array([1.0, -1.0])), 64),
    ]
    out = []
    for name, spec, n in specs:
        inputs = models.bernstein_inputs_for(spec, n)
        top = inputs.n * inputs.M
        out.append({"name": name, "spec": spec, "n": n,
                    "x_grid": np.linspace(0.05 * top, 0.9 * top, 8).tolist()})
    return out


_SUITES = {
    "inequalities": _suite_inequalities,
    "cantor": _suite_cantor,
    "bounds": _suite_bounds,
    "coupling": _suite_coupling,
    "dominance": _suite_dominance,
}


def cmd_verify(args) -> int:
    failures = []
    _SUITES[args.suite](args.budget, failures)
    report = {"schema": SCHEMA, "suite": args.suite,
              "config": {"command": "verify", "suite": args.suite,
                         "budget": args.budget},
              "failures": failures, "ok": not failures}
    _emit(json.dumps(report, sort_keys=True), args.out)
    return 0 if not failures else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="depbernstein")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cantor", help="dump the blocking of {1..A}")
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_cantor)

    p = sub.add_parser("bound", help="evaluate a closed-form bound")
    p.add_argument("--kind", choices=("tail", "laplace", "expectation", "theorem1"),
                   required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--M", type=float)
    p.add_argument("--v", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--batch", default=None,
                   help="CSV of parameter rows; bound columns are appended")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("mixing", help="beta profile of a finite chain")
    p.add_argument("--chain", required=True, help="JSON file with the P matrix")
    p.add_argument("--beta-k", default="1..20", dest="beta_k")
    p.add_argument("--fit-c", action="store_true", dest="fit_c")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_mixing)

    p = sub.add_parser("simulate", help="tail experiment for a model")
    p.add_argument("--model", choices=("contraction", "blockcov", "iid"),
                   required=True)
    p.add_argument("--config", required=True, help="model JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--x-grid", required=True, dest="x_grid", help="a:b:steps")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run a named property suite")
    p.add_argument("suite", choices=sorted(_SUITES))
    p.add_argument("--budget", type=float, default=120.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
