"""Command-line front end: fit, cross-validate, predict, simulate,
verify, and micro-benchmarks.

Exit codes: 0 success, 2 data/usage errors, 3 non-convergence under
--strict.  Every subcommand is deterministic given --seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .data_io import (
    ModelFile,
    deserialize_model,
    read_csv,
    read_raw_columns,
    serialize_model,
)
from .design import Design
from .fit import (
    FitConfig,
    bcd_fit,
    cross_validate,
    degrees_of_freedom,
    ebic_select,
    fit_path,
    hierarchical_fit,
    logistic_fit,
    predict,
)
from .penalty import McpPenalty
from .simulate import (
    SimSpec,
    adjusted_rand_index,
    gen_design,
    gen_response,
    mspe,
    selection_rates,
)
from .univariate import WeightedMeans, cluster_ids, solve_exact
from .verify import check_separation, grid_oracle, oracle_least_squares

EXIT_OK = 0
EXIT_DATA = 2
EXIT_NOCONV = 3


def _template(groups) -> np.ndarray:
    return np.concatenate([np.full(c, float(v)) for v, c in groups])


def _zero(K=24):
    return np.zeros(K)


def _hd(signal, base=24):
    out = {}
    for j, groups in signal.items():
        out[j] = _template(groups)
    return out


# Named simulation presets: low-dimensional (n=500, p=10), high-dimensional
# (n=500, p=100), and the univariate four-group illustration.
SETTINGS = {
    "ld1": dict(n=500, p=10, rho=0.0, sigma2=None,
                signal={j: [(-3, 10), (0, 4), (3, 10)] for j in range(3)}),
    "ld2": dict(n=500, p=10, rho=0.0, sigma2=None,
                signal={j: [(-3, 8), (0, 8), (3, 8)] for j in range(3)}),
    "ld3": dict(n=500, p=10, rho=0.8, sigma2=None,
                signal={j: [(-3, 10), (0, 4), (3, 10)] for j in range(3)}),
    "hd1": dict(n=500, p=100, rho=0.0, sigma2=50.0,
                signal={**{j: [(-2, 8), (0, 8), (2, 8)] for j in range(3)},
                        **{j: [(-2, 10), (0, 4), (2, 10)] for j in range(3, 6)}}),
    "hd2": dict(n=500, p=100, rho=0.5, sigma2=50.0,
                signal={**{j: [(-2, 8), (0, 8), (2, 8)] for j in range(3)},
                        **{j: [(-2, 10), (0, 4), (2, 10)] for j in range(3, 6)}}),
    "hd3": dict(n=500, p=100, rho=0.5, sigma2=100.0,
                signal={**{j: [(-2, 8), (0, 8), (2, 8)] for j in range(3)},
                        **{j: [(-2, 16), (3, 8)] for j in range(3, 6)}}),
    "hd4": dict(n=500, p=100, rho=0.0, sigma2=25.0,
                signal={j: [(-2, 5), (-1, 5), (0, 4), (1, 5), (2, 5)]
                        for j in range(5)}),
    "hd5": dict(n=500, p=100, rho=0.0, sigma2=1.0,
                signal={j: [(-2, 16), (3, 8)] for j in range(25)}),
    "hd6": dict(n=500, p=100, rho=0.5, sigma2=1.0,
                signal={j: [(-2, 16), (3, 8)] for j in range(25)}),
    "hd7": dict(n=500, p=100, rho=0.0, sigma2=25.0,
                signal={j: [(-2, 4), (0, 12), (2, 8)] for j in range(10)}),
    "hd8": dict(n=500, p=100, rho=0.0, sigma2=25.0,
                signal={j: [(-3, 6), (-1, 6), (1, 6), (3, 6)] for j in range(5)}),
    "fig2": dict(univariate=True, n_levels=20, sigma2=1.0,
                 groups=[(-6.0, 4), (-2.5, 6), (2.5, 6), (6.0, 4)]),
}


def build_sim_spec(name: str, sigma2: float | None, seed: int) -> SimSpec:
    cfg = SETTINGS[name]
    if cfg.get("univariate"):
        raise ValueError("fig2 is a univariate illustration; handled separately")
    K = 24
    p = cfg["p"]
    templates = [np.zeros(K) for _ in range(p)]
    for j, groups in cfg["signal"].items():
        templates[j] = _template(groups)
        if len(templates[j]) != K:
            raise ValueError("template does not span all levels")
    s2 = cfg["sigma2"] if cfg["sigma2"] is not None else sigma2
    if s2 is None:
        s2 = 1.0
    return SimSpec(
        n=cfg["n"], p=p, rho=cfg["rho"], n_levels=K,
        theta0=templates, sigma2=float(s2), seed=seed,
    )


def load_sim_spec(path: str, seed: int) -> SimSpec:
    with open(path) as fh:
        doc = json.load(fh)
    K = int(doc.get("n_levels", 24))
    p = int(doc["p"])
    templates = [np.zeros(K) for _ in range(p)]
    for key, vals in doc.get("theta0", {}).items():
        templates[int(key)] = np.asarray(vals, dtype=float)
    return SimSpec(
        n=int(doc["n"]), p=p, rho=float(doc.get("rho", 0.0)), n_levels=K,
        theta0=templates, sigma2=float(doc.get("sigma2", 1.0)),
        seed=int(doc.get("seed", seed)),
    )


def _thread_default() -> int:
    env = os.environ.get("CATFUSE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _parse_cols(arg):
    return [c for c in arg.split(",") if c] if arg else None


def _cluster_report(model: ModelFile, out=sys.stdout) -> None:
    print(f"intercept {model.coef.mu:.6g}", file=out)
    for name in model.continuous_names:
        l = model.continuous_names.index(name)
        print(f"{name} {model.coef.beta[l]:.6g}", file=out)
    for j, name in enumerate(model.categorical_names):
        theta = model.coef.theta[j]
        clusters = model.clusters[j]
        print(f"variable {name}: {int(clusters.max()) + 1} group(s)", file=out)
        for cid in sorted(set(clusters.tolist()), key=lambda c: -theta[clusters == c][0]):
            members = [
                model.categorical_levels[j][k]
                for k in np.nonzero(clusters == cid)[0]
            ]
            value = theta[clusters == cid][0]
            print(f"  {value: .6g}  {', '.join(members)}", file=out)


def _model_from_fit(dataset, design, res, family, gamma, lam) -> ModelFile:
    return ModelFile(
        family=family,
        gamma=float(gamma),
        lam=float(lam),
        response_name=dataset.response_name,
        categorical_names=dataset.categorical_names,
        categorical_levels=dataset.categorical_levels,
        continuous_names=dataset.continuous_names,
        continuous_center=design.continuous_means,
        coef=res.coef,
        clusters=[cluster_ids(t) for t in res.coef.theta],
        sweeps=res.sweeps,
        converged=res.converged,
        objective=res.objective,
    )


def cmd_fit(args) -> int:
    try:
        dataset = read_csv(
            args.data, args.response,
            categorical=_parse_cols(args.categorical),
            continuous=_parse_cols(args.continuous),
        )
        hierarchy = None
        cat_order = None
        if args.hierarchy:
            parent, child = args.hierarchy.split(":")
            names = dataset.categorical_names
            if parent not in names or child not in names:
                raise ValueError("hierarchy columns must be categorical")
            cat_order = [names.index(parent), names.index(child)]
            if len(names) != 2:
                raise ValueError("hierarchy fits support exactly two categorical variables")
            pj, cj = cat_order
            pcodes, ccodes = dataset.categorical_codes[pj], dataset.categorical_codes[cj]
            Kp = len(dataset.categorical_levels[pj])
            Kc = len(dataset.categorical_levels[cj])
            groups = [[] for _ in range(Kp)]
            owner = np.full(Kc, -1)
            for pc, cc in zip(pcodes, ccodes):
                if owner[cc] == -1:
                    owner[cc] = pc
                    groups[pc].append(int(cc))
                elif owner[cc] != pc:
                    raise ValueError(f"child level {cc} occurs under two parents")
            dataset.categorical_codes = [pcodes, ccodes]
            dataset.categorical_names = [names[pj], names[cj]]
            dataset.categorical_levels = [
                dataset.categorical_levels[pj], dataset.categorical_levels[cj]
            ]
            hierarchy = groups
        design, y = dataset.to_design(hierarchy=hierarchy)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    for w in dataset.warnings:
        print(f"warning: {w}", file=sys.stderr)

    family = args.family
    cfg = FitConfig(
        family=family,
        path_len=args.path,
        path_ratio=args.ratio,
        alpha=args.alpha,
        seed=args.seed,
    )
    gamma = args.gamma if args.gamma is not None else (100.0 if family == "logistic" else 8.0)

    if hierarchy is not None:
        if args.lam is None:
            print("error: --hierarchy requires --lambda", file=sys.stderr)
            return EXIT_DATA
        child = args.lambda_child if args.lambda_child is not None else args.lam
        res = hierarchical_fit(design, y, gamma, args.lam, child, config=cfg)
        lam = args.lam
    elif args.lam is not None:
        if family == "logistic":
            res = logistic_fit(design, y, gamma, args.lam, config=cfg)
        else:
            res = bcd_fit(design, y, gamma, args.lam, config=cfg)
        lam = args.lam
    else:
        if family == "logistic":
            print(
                "error: logistic fits need --lambda (use the cv subcommand to choose one)",
                file=sys.stderr,
            )
            return EXIT_DATA
        path = fit_path(design, y, replace_gamma(cfg, gamma))
        total_levels = sum(design.n_levels) + design.n_continuous
        entry = ebic_select(path, design.n, total_levels)
        res_entry = entry
        lam = entry.lam

        class _Res:
            coef = res_entry.coef
            converged = res_entry.converged
            sweeps = 0
            objective = res_entry.objective

        res = _Res()

    model = _model_from_fit(dataset, design, res, family, gamma, lam)
    payload = serialize_model(model)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    _cluster_report(model)
    if args.strict and not res.converged:
        print("error: fit did not converge", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def replace_gamma(cfg: FitConfig, gamma: float) -> FitConfig:
    from dataclasses import replace

    return replace(cfg, gamma_grid=(float(gamma),))


def cmd_cv(args) -> int:
    try:
        dataset = read_csv(
            args.data, args.response,
            categorical=_parse_cols(args.categorical),
            continuous=_parse_cols(args.continuous),
        )
        design, y = dataset.to_design()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    gammas = tuple(float(g) for g in args.gammas.split(","))
    cfg = FitConfig(
        family=args.family,
        gamma_grid=gammas,
        path_len=args.path,
        path_ratio=args.ratio,
        alpha=args.alpha,
        cv_folds=args.folds,
        seed=args.seed,
    )
    best_gamma, best_lambda, table = cross_validate(design, y, cfg)
    writer = csv.writer(sys.stdout)
    writer.writerow(["gamma", "lambda", "cv_error"])
    for g in table.gammas:
        for lam, err in zip(table.lambdas[g], table.errors[g]):
            writer.writerow(["%g" % g, "%.10g" % lam, "%.10g" % err])
    print(f"chosen gamma={best_gamma:g} lambda={best_lambda:.10g}")
    if args.refit:
        if args.family == "logistic":
            res = logistic_fit(design, y, best_gamma, best_lambda, config=cfg)
        else:
            res = bcd_fit(design, y, best_gamma, best_lambda, config=cfg)
        model = _model_from_fit(dataset, design, res, args.family, best_gamma, best_lambda)
        with open(args.refit, "wb") as fh:
            fh.write(serialize_model(model))
    return EXIT_OK


def cmd_predict(args) -> int:
    try:
        with open(args.model, "rb") as fh:
            model = deserialize_model(fh.read())
        raw = read_raw_columns(args.data)
        codes, cont, errors = model.encode(raw)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    preds = predict(
        model.coef, codes, cont,
        continuous_center=model.continuous_center,
        family=model.family,
    )
    unseen = sum(int(np.sum(c < 0)) for c in codes)
    bad_rows = {i for i, _ in errors}
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["prediction"])
        for i, p in enumerate(preds):
            writer.writerow(["" if i in bad_rows else "%.17g" % p])
    if unseen:
        print(f"unseen level occurrences: {unseen}", file=sys.stderr)
    for i, msg in errors:
        print(f"row {i}: {msg}", file=sys.stderr)
    return EXIT_OK


def _simulate_rep(payload):
    (name, sigma2, seed, rep, gammas, folds, path_len, n_test) = payload
    spec = build_sim_spec(name, sigma2, seed)
    rng = np.random.default_rng([seed, rep])
    design = gen_design(spec, rng)
    y, truth = gen_response(design, spec, rng)
    cfg = FitConfig(gamma_grid=gammas, path_len=path_len, cv_folds=folds, seed=seed + rep)
    best_gamma, best_lambda, _ = cross_validate(design, y, cfg)
    res = bcd_fit(design, y, best_gamma, best_lambda, config=cfg)
    oracle = spec.oracle()
    aris = []
    for j in range(spec.p):
        if oracle.n_groups(j) > 1:
            aris.append(
                adjusted_rand_index(oracle.groups[j], cluster_ids(res.coef.theta[j]))
            )
    fpr, fnr = selection_rates(res.coef.theta, oracle)
    err = mspe(res.coef, truth, spec, n_test=n_test, seed=seed + 7919 + rep)
    return dict(
        rep=rep, mspe=err, ari=float(np.mean(aris)) if aris else 1.0,
        fpr=fpr, fnr=fnr, df=degrees_of_freedom(res.coef),
        gamma=best_gamma, lam=best_lambda,
    )


def _run_fig2(args) -> list[dict]:
    cfg = SETTINGS["fig2"]
    theta0 = _template(cfg["groups"])
    truth_clusters = np.repeat(np.arange(len(cfg["groups"])), [c for _, c in cfg["groups"]])
    K = cfg["n_levels"]
    rows = []
    for rep in range(args.reps):
        rng = np.random.default_rng([args.seed, rep])
        ybar = theta0 + rng.normal(0.0, np.sqrt(cfg["sigma2"]), K)
        means = WeightedMeans(np.full(K, 1.0 / K), ybar)
        lam_hi = float(np.max(np.abs(ybar - ybar.mean()))) / min(2.0, np.sqrt(args.gamma0))
        lams = lam_hi * (0.01 ** (np.arange(args.path) / max(args.path - 1, 1)))
        best_ari = -1.0
        exact4 = 0
        for lam in lams:
            sol = solve_exact(means, McpPenalty(args.gamma0, float(lam)))
            ari = adjusted_rand_index(truth_clusters, sol.clusters)
            best_ari = max(best_ari, ari)
            if sol.n_clusters == 4 and ari == 1.0:
                exact4 = 1
        rows.append(dict(rep=rep, best_ari=best_ari, recovered=exact4))
    return rows


def cmd_simulate(args) -> int:
    if args.spec:
        # structured-text escape hatch: single named-free configuration
        spec = load_sim_spec(args.spec, args.seed)
        name = "custom"
    else:
        name = args.setting
        if name not in SETTINGS:
            print(f"error: unknown setting {name!r}", file=sys.stderr)
            return EXIT_DATA

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out)
    if name == "fig2":
        rows = _run_fig2(args)
        writer.writerow(["rep", "best_ari", "recovered_4_clusters"])
        for r in rows:
            writer.writerow([r["rep"], "%.6g" % r["best_ari"], r["recovered"]])
        writer.writerow(
            ["mean", "%.6g" % np.mean([r["best_ari"] for r in rows]),
             "%.6g" % np.mean([r["recovered"] for r in rows])]
        )
        if args.out:
            out.close()
        return EXIT_OK

    gammas = tuple(float(g) for g in args.gammas.split(","))
    payloads = [
        (name if not args.spec else args.spec, args.sigma2, args.seed, rep,
         gammas, args.folds, args.path, args.n_test)
        for rep in range(args.reps)
    ]
    if args.spec:
        runner = _simulate_rep_custom
    else:
        runner = _simulate_rep
    if args.threads > 1 and args.reps > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(runner, payloads))
    else:
        rows = [runner(p) for p in payloads]
    rows.sort(key=lambda r: r["rep"])
    cols = ["rep", "mspe", "ari", "fpr", "fnr", "df", "gamma", "lam"]
    writer.writerow(cols)
    for r in rows:
        writer.writerow([("%.6g" % r[c]) if isinstance(r[c], float) else r[c] for c in cols])
    writer.writerow(
        ["mean"]
        + ["%.6g" % np.mean([r[c] for r in rows]) for c in cols[1:]]
    )
    if args.out:
        out.close()
    return EXIT_OK


def _simulate_rep_custom(payload):
    (path, sigma2, seed, rep, gammas, folds, path_len, n_test) = payload
    spec = load_sim_spec(path, seed)
    rng = np.random.default_rng([seed, rep])
    design = gen_design(spec, rng)
    y, truth = gen_response(design, spec, rng)
    cfg = FitConfig(gamma_grid=gammas, path_len=path_len, cv_folds=folds, seed=seed + rep)
    best_gamma, best_lambda, _ = cross_validate(design, y, cfg)
    res = bcd_fit(design, y, best_gamma, best_lambda, config=cfg)
    oracle = spec.oracle()
    aris = [
        adjusted_rand_index(oracle.groups[j], cluster_ids(res.coef.theta[j]))
        for j in range(spec.p)
        if oracle.n_groups(j) > 1
    ]
    fpr, fnr = selection_rates(res.coef.theta, oracle)
    err = mspe(res.coef, truth, spec, n_test=n_test, seed=seed + 7919 + rep)
    return dict(
        rep=rep, mspe=err, ari=float(np.mean(aris)) if aris else 1.0,
        fpr=fpr, fnr=fnr, df=degrees_of_freedom(res.coef),
        gamma=best_gamma, lam=best_lambda,
    )


def cmd_verify(args) -> int:
    name = args.setting
    if name not in SETTINGS or name == "fig2":
        print(f"error: unknown or unsupported setting {name!r}", file=sys.stderr)
        return EXIT_DATA
    spec = build_sim_spec(name, args.sigma2, args.seed)
    rng = np.random.default_rng(args.seed)
    design = gen_design(spec, rng)
    y, truth = gen_response(design, spec, rng)
    oracle_spec = spec.oracle().centered(design)
    sigma = np.sqrt(spec.sigma2)
    report = check_separation(oracle_spec, design, args.gamma, args.lam, sigma)

    print(f"eta {report.eta:.6g}")
    print(
        "var  levels groups  delta      bound_glob  bound_block ok_g ok_b  "
        "prob_nmin  prob_n_over_k"
    )
    for j, v in enumerate(report.variables):
        print(
            f"{j:<4d} {v.n_levels:<6d} {v.n_groups:<6d} {v.delta:<10.4g} "
            f"{v.global_bound:<11.4g} {v.blockwise_bound:<11.4g} "
            f"{str(v.global_ok):<4s} {str(v.blockwise_ok):<5s} "
            f"{min(max(v.prob_bound_nmin, 0.0), 1.0):<10.4g} "
            f"{min(max(v.prob_bound_n_over_k, 0.0), 1.0):<10.4g}"
        )
    print(f"blockwise bound satisfied for all variables: {report.satisfied_blockwise}")
    print(f"multivariate probability bound (raw): {report.multivar_prob_bound:.6g}")

    ols = oracle_least_squares(design, y, oracle_spec)
    res = bcd_fit(design, y, args.gamma, args.lam)
    gap = res.coef.max_abs_diff(ols)
    print(f"fit vs oracle least squares sup-norm gap: {gap:.3e}")
    print(f"matches oracle at 1e-7: {gap <= 1e-7}")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    print("levels  reps  mean_ms  min_ms  max_ms  pieces_max")
    for K in sizes:
        groups = np.array([-2.0, 0.0, 2.0])
        ybar0 = groups[np.arange(K) % 3]
        times = []
        pieces = 0
        for _ in range(args.reps):
            ybar = ybar0 + rng.normal(0.0, args.noise, K)
            means = WeightedMeans(np.full(K, 1.0 / K), ybar)
            t0 = time.perf_counter()
            sol = solve_exact(means, McpPenalty(args.gamma0, args.lam), collect_stats=True)
            times.append((time.perf_counter() - t0) * 1e3)
            pieces = max(pieces, int(sol.stage_pieces.max()))
        print(
            f"{K:<7d} {args.reps:<5d} {np.mean(times):<8.3f} "
            f"{np.min(times):<7.3f} {np.max(times):<7.3f} {pieces:<10d}"
        )
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="catfuse",
        description="regression with automatic fusion of categorical levels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model and write it to disk")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--response", required=True)
    p_fit.add_argument("--categorical", default=None)
    p_fit.add_argument("--continuous", default=None)
    p_fit.add_argument("--family", choices=["linear", "logistic"], default="linear")
    p_fit.add_argument("--gamma", type=float, default=None)
    p_fit.add_argument("--lambda", dest="lam", type=float, default=None)
    p_fit.add_argument("--lambda-child", dest="lambda_child", type=float, default=None)
    p_fit.add_argument("--path", type=int, default=100)
    p_fit.add_argument("--ratio", type=float, default=0.01)
    p_fit.add_argument("--alpha", type=float, default=0.0)
    p_fit.add_argument("--hierarchy", default=None, metavar="PARENT:CHILD")
    p_fit.add_argument("--out", default=None)
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--strict", action="store_true")
    p_fit.set_defaults(func=cmd_fit)

    p_cv = sub.add_parser("cv", help="cross-validate (gamma, lambda)")
    p_cv.add_argument("--data", required=True)
    p_cv.add_argument("--response", required=True)
    p_cv.add_argument("--categorical", default=None)
    p_cv.add_argument("--continuous", default=None)
    p_cv.add_argument("--family", choices=["linear", "logistic"], default="linear")
    p_cv.add_argument("--gammas", default="8,32")
    p_cv.add_argument("--folds", type=int, default=5)
    p_cv.add_argument("--path", type=int, default=100)
    p_cv.add_argument("--ratio", type=float, default=0.01)
    p_cv.add_argument("--alpha", type=float, default=0.0)
    p_cv.add_argument("--seed", type=int, default=0)
    p_cv.add_argument("--refit", default=None, metavar="MODEL_OUT")
    p_cv.set_defaults(func=cmd_cv)

    p_pred = sub.add_parser("predict", help="predict with a saved model")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--out", required=True)
    p_pred.set_defaults(func=cmd_predict)

    p_sim = sub.add_parser("simulate", help="run a named simulation study")
    p_sim.add_argument("--setting", default="hd6",
                       choices=sorted(SETTINGS.keys()))
    p_sim.add_argument("--spec", default=None, help="JSON SimSpec file")
    p_sim.add_argument("--reps", type=int, default=20)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--sigma2", type=float, default=None)
    p_sim.add_argument("--gammas", default="32")
    p_sim.add_argument("--gamma0", type=float, default=8.0,
                       help="concavity scale for fig2")
    p_sim.add_argument("--folds", type=int, default=5)
    p_sim.add_argument("--path", type=int, default=100)
    p_sim.add_argument("--n-test", type=int, default=20000)
    p_sim.add_argument("--threads", type=int, default=_thread_default())
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="separation report and oracle checks")
    p_ver.add_argument("--setting", default="hd6")
    p_ver.add_argument("--gamma", type=float, default=32.0)
    p_ver.add_argument("--lambda", dest="lam", type=float, default=0.05)
    p_ver.add_argument("--sigma2", type=float, default=None)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="univariate solver timings")
    p_bench.add_argument("--sizes", default="50,500,2000")
    p_bench.add_argument("--reps", type=int, default=25)
    p_bench.add_argument("--gamma0", type=float, default=8.0)
    p_bench.add_argument("--lambda", dest="lam", type=float, default=0.2)
    p_bench.add_argument("--noise", type=float, default=0.1)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
