"""Batch front-end: verification suites, CF tables, convergence studies, samplers.

Every command is driven by one JSON config (see config.py), writes its
reports under the output directory with the config hash in the file names,
and returns 0 on success, 1 on a numerical failure, 2 on usage or
configuration errors.
"""

import argparse
import os
import sys

import numpy as np

from . import fock, levy, plots, qsc, serialize, suites
from .config import RunConfig, derive_seed, load_config, parse_cmatrix, parse_cvector

CF_KINDS = ("type1", "type2", "gauss", "poissonfield")
CONVERGENCE_TARGETS = ("weyl-qsde", "fundamental-2")
SAMPLE_KINDS = ("type1", "type2", "combined")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockbench",
        description="Quantum stochastic calculus workbench on truncated Fock spaces",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a JSON run configuration")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--seed", type=int, help="root seed (overrides the config)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p_verify.add_argument("suite", choices=suites.SUITE_NAMES)
    p_verify.add_argument("--drop-correction", action="store_true",
                          help="drop the product-differential correction "
                               "(fundamental-2 only; demonstrates the failure)")

    p_cf = sub.add_parser("cf", parents=[common],
                          help="emit characteristic-function tables")
    p_cf.add_argument("kind", choices=CF_KINDS)

    p_conv = sub.add_parser("convergence", parents=[common],
                            help="grid-refinement study with fitted slope")
    p_conv.add_argument("target", choices=CONVERGENCE_TARGETS)

    p_sample = sub.add_parser("sample", parents=[common], help="draw classical samples")
    p_sample.add_argument("kind", choices=SAMPLE_KINDS)
    p_sample.add_argument("--n", type=int, default=100_000, help="number of draws")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {}
        if args.seed is not None:
            if args.seed < 0:
                print("error: seed must be nonnegative", file=sys.stderr)
                return 2
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["out_dir"] = args.out
        cfg = load_config(args.config, overrides)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "verify":
            return cmd_verify(args.suite, cfg, args.drop_correction)
        if args.command == "cf":
            return cmd_cf(args.kind, cfg)
        if args.command == "convergence":
            return cmd_convergence(args.target, cfg)
        if args.command == "sample":
            return cmd_sample(args.kind, args.n, cfg)
    except (KeyError, ValueError) as exc:
        # scenario blocks are user data; malformed ones are config errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def cmd_verify(suite_name: str, cfg: RunConfig, drop_correction: bool) -> int:
    results = suites.run_suite(suite_name, cfg, drop_correction=drop_correction)
    variant = "-dropped" if drop_correction else ""
    failures = []
    for result in results:
        status = "pass" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: statistic={result.statistic:.3e} "
              f"tolerance={result.tolerance:.3e}")
        doc = result.to_dict()
        doc["config_hash"] = cfg.config_hash
        filename = f"verify_{result.name.replace('/', '_')}{variant}_{cfg.config_hash}.json"
        serialize.write_json(_out_path(cfg, filename), doc)
        if not result.passed:
            failures.append(result.name)
    if failures:
        print(f"verify {suite_name}: FAILED checks: {', '.join(failures)}", file=sys.stderr)
        return 1
    print(f"verify {suite_name}: all {len(results)} checks passed")
    return 0


def _cf_tables(kind: str, cfg: RunConfig):
    xs = cfg.x_grid()
    horizon = cfg.horizon
    tables = []
    notes = {}
    if kind == "gauss":
        scenario = cfg.scenario("gauss")
        u = parse_cvector(scenario["u"])
        norm_sq = float(np.real(np.vdot(u, u)))
        tables.append(levy.CFTable(xs, horizon, np.exp(-0.5 * xs ** 2 * norm_sq), "analytic"))
        basis = fock.FockBasis(u.shape[0], cfg.fock_cutoff)
        if basis.dim <= cfg.dim_limit:
            values = np.array([
                np.vdot(basis.vacuum().coeffs,
                        fock.weyl(basis, x * u).matrix @ basis.vacuum().coeffs)
                for x in xs
            ])
            tables.append(levy.CFTable(xs, horizon, values, "operator"))
        else:
            notes["operator"] = f"refused: dim {basis.dim} exceeds cap {cfg.dim_limit}"
        rng = np.random.default_rng(derive_seed(cfg.seed, "cf/gauss"))
        samples = rng.normal(0.0, np.sqrt(norm_sq), size=100_000)
        tables.append(levy.CFTable(xs, horizon, levy.empirical_cf(samples, xs), "empirical"))
        return tables, notes, None

    if kind == "poissonfield":
        scenario = cfg.scenario("poissonfield")
        u = parse_cvector(scenario["u"])
        ham = parse_cmatrix(scenario["H"])
        ts = cfg.x_grid()
        rate = levy.type1_exponent_rate(ts, u, ham)
        tables.append(levy.CFTable(ts, 1.0, np.exp(rate), "analytic"))
        basis = fock.FockBasis(u.shape[0], cfg.fock_cutoff)
        if basis.dim <= cfg.dim_limit:
            values = np.array([fock.dilated_conservation_cf(basis, u, ham, t) for t in ts])
            tables.append(levy.CFTable(ts, 1.0, values, "operator"))
        else:
            notes["operator"] = f"refused: dim {basis.dim} exceeds cap {cfg.dim_limit}"
        one_slot = qsc.TimeGrid.uniform(1.0, 1)
        data = levy.LevyStrengthData.homogeneous(one_slot, u, ham)
        samples = levy.sample_type1(data, 1.0, derive_seed(cfg.seed, "cf/poissonfield"),
                                    size=100_000)
        tables.append(levy.CFTable(ts, 1.0, levy.empirical_cf(samples, ts), "empirical"))
        return tables, notes, None

    builders = {"type1": (suites.levy_type1_data, levy.type1_cf, levy.sample_type1,
                          levy.bounded_type1_operator),
                "type2": (suites.levy_type2_data, levy.type2_cf, levy.sample_type2,
                          levy.bounded_type2_operator)}
    data_of, cf_of, sampler, op_of = builders[kind]
    data = data_of(cfg)
    tables.append(levy.CFTable(xs, horizon, np.asarray(cf_of(xs, horizon, data)), "analytic"))
    basis = fock.FockBasis(data.modes, max(cfg.fock_cutoff, levy.MIN_OPERATOR_CUTOFF))
    psi = data.psis[0]
    ham = data.hams[0]
    if basis.dim <= cfg.dim_limit and np.linalg.norm(psi) * np.sqrt(horizon) <= 1.0:
        op = op_of(basis, psi, ham, horizon)
        inside = np.abs(xs) <= 2.0
        values = np.full(xs.shape, np.nan + 0j)
        values[inside] = levy.operator_vacuum_cf(op, xs[inside])
        if np.all(inside):
            tables.append(levy.CFTable(xs, horizon, values, "operator"))
        else:
            notes["operator"] = "restricted to |x| <= 2; outside points omitted"
            tables.append(levy.CFTable(xs[inside], horizon, values[inside], "operator"))
    else:
        notes["operator"] = "refused: dimension cap or displacement domain exceeded"
    samples = sampler(data, horizon, derive_seed(cfg.seed, f"cf/{kind}"), size=100_000)
    tables.append(levy.CFTable(xs, horizon, levy.empirical_cf(samples, xs), "empirical"))
    return tables, notes, data


def cmd_cf(kind: str, cfg: RunConfig) -> int:
    tables, notes, _ = _cf_tables(kind, cfg)
    stem = f"cf_{kind}_{cfg.config_hash}"
    rows = []
    for table in tables:
        rows.extend(table.rows())
    serialize.write_csv(_out_path(cfg, stem + ".csv"), ["x", "re", "im", "provenance"], rows)
    doc = {
        "kind": kind,
        "config_hash": cfg.config_hash,
        "tables": [t.to_dict() for t in tables],
        "notes": notes,
    }
    serialize.write_json(_out_path(cfg, stem + ".json"), doc)
    plots.save_cf_figure(_out_path(cfg, stem + ".png"), tables, f"characteristic function: {kind}")
    try:
        for table in tables:
            table.validate()
    except ValueError as exc:
        print(f"cf {kind}: validation failed: {exc}", file=sys.stderr)
        return 1
    print(f"cf {kind}: wrote {stem}.csv/.json/.png ({len(tables)} provenances)")
    return 0


def cmd_convergence(target: str, cfg: RunConfig) -> int:
    slot_counts = [4, 8, 16, 32, 64]
    stem = f"convergence_{target.replace('-', '_')}_{cfg.config_hash}"
    if target == "weyl-qsde":
        scenario = cfg.scenario("weyl")
        phi = parse_cvector(scenario["phi"])
        theta = float(scenario.get("theta", 0.0))
        f_val = parse_cvector(scenario["f"])
        g_val = parse_cvector(scenario["g"])
        rows = []
        for n_slots in slot_counts:
            grid = qsc.TimeGrid.uniform(cfg.horizon, n_slots)
            dim = phi.shape[0]
            u_op = np.exp(1j * theta) * np.eye(dim) if dim == 1 else suites._rotation(dim, theta)
            path = levy.EuclideanPath.constant(grid, phi, u_op)
            f = qsc.StepFunction.constant(grid, f_val)
            g = qsc.StepFunction.constant(grid, g_val)
            closed = levy.weyl_matrix_element(f, g, 0.0, cfg.horizon, path)
            exact = levy.solve_weyl_qsde(f, g, path, scheme="exact")[-1]
            euler = levy.solve_weyl_qsde(f, g, path, scheme="euler")[-1]
            rows.append({"n_slots": n_slots, "dt_max": float(np.max(grid.widths)),
                         "err_exact_scheme": abs(exact - closed),
                         "err_euler": abs(euler - closed)})
        slope = float(np.polyfit(np.log([r["dt_max"] for r in rows]),
                                 np.log([max(r["err_euler"], 1e-300) for r in rows]), 1)[0])
        header = ["n_slots", "dt_max", "err_exact_scheme", "err_euler"]
    else:
        scenario = cfg.scenario("fundamental")
        from .ito_algebra import ito_from_document

        n1 = ito_from_document(scenario["N1"])
        n2 = ito_from_document(scenario["N2"])
        study = qsc.refinement_study_second(
            cfg.horizon, slot_counts, cfg.d, cfg.slot_cutoff,
            parse_cvector(scenario["f"]), parse_cvector(scenario["g"]),
            n1, n2, n1, n2)
        rows = [r.to_dict() for r in study.rows]
        slope = study.slope
        header = ["n_slots", "dt_max", "err_three_term", "err_two_term"]
    serialize.write_csv(
        _out_path(cfg, stem + ".csv"), header,
        [[row["n_slots"]] + [serialize.format_float(row[k]) for k in header[1:]]
         for row in rows])
    serialize.write_json(_out_path(cfg, stem + ".json"),
                         {"target": target, "rows": rows, "slope_estimate": slope,
                          "config_hash": cfg.config_hash})
    plots.save_convergence_figure(_out_path(cfg, stem + ".png"), rows,
                                  f"convergence: {target}", slope)
    print(f"convergence {target}: slope estimate {slope:.3f}; wrote {stem}.csv/.json/.png")
    return 0


def cmd_sample(kind: str, n: int, cfg: RunConfig) -> int:
    if n < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2
    xs = cfg.x_grid()
    horizon = cfg.horizon
    seed = derive_seed(cfg.seed, f"sample/{kind}")
    if kind == "type1":
        data = suites.levy_type1_data(cfg)
        samples = levy.sample_type1(data, horizon, seed, size=n)
        analytic = np.asarray(levy.type1_cf(xs, horizon, data))
    elif kind == "type2":
        data = suites.levy_type2_data(cfg)
        samples = levy.sample_type2(data, horizon, seed, size=n)
        analytic = np.asarray(levy.type2_cf(xs, horizon, data))
    else:
        drift = float(cfg.scenario("combine").get("drift", 0.0))
        combined = levy.combine(suites.levy_type1_data(cfg), suites.levy_type2_data(cfg), drift)
        samples = combined.sample(horizon, seed, size=n)
        analytic = np.asarray(combined.cf(xs, horizon))
    analytic_table = levy.CFTable(xs, horizon, analytic, "analytic")
    empirical_table = levy.CFTable(xs, horizon, levy.empirical_cf(samples, xs), "empirical")
    sup = levy.sup_distance(analytic_table, empirical_table)
    bound = 4.0 / np.sqrt(n)
    stem = f"sample_{kind}_{cfg.config_hash}"
    serialize.write_text(_out_path(cfg, stem + ".txt"),
                         "\n".join(serialize.format_float(s) for s in samples) + "\n")
    serialize.write_json(_out_path(cfg, stem + ".json"), {
        "kind": kind,
        "n": n,
        "sup_distance": sup,
        "clt_bound": bound,
        "passed": bool(sup <= bound),
        "config_hash": cfg.config_hash,
        "tables": [analytic_table.to_dict(), empirical_table.to_dict()],
    })
    plots.save_sample_figure(_out_path(cfg, stem + ".png"), samples, analytic_table,
                             empirical_table, f"samples: {kind} (n={n})")
    status = "pass" if sup <= bound else "FAIL"
    print(f"sample {kind}: sup |empirical - analytic| = {sup:.4f} vs bound {bound:.4f} "
          f"[{status}]; wrote {stem}.txt/.json/.png")
    return 0 if sup <= bound else 1


if __name__ == "__main__":
    sys.exit(main())
