"""Command-line front end.

Subcommands: constants | sample | noise | integrate | solve | glue | tail
| moment | picard | uniqueness | gronwall | check-model | gof.

Exit codes: 0 all verdicts pass, 1 verdict failure (or non-convergence),
2 usage error, 3 inconclusive (under-resolved) experiment.  ``--seed`` is
mandatory for every stochastic subcommand: there is no silent entropy.
Flags override the optional flat key=value config file; unknown config
keys are rejected.  Outputs are byte-identical across identical
invocations.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .constants import constants_report
from .experiments import (
    ExperimentReport,
    HypothesisFailed,
    isotropic_gof_report,
    moment_experiment,
    picard_convergence_experiment,
    random_hypothesis_triples,
    tail_experiment,
    uniqueness_experiment,
    willet_wong_check,
)
from .hilbert import HSMatrix, check_A2, check_A3, check_norm_continuity, heat_preset, parse_model_config
from .integral import StepIntegrand, constant_integrand, integrate, refinement_experiment
from .picard import NonConvergenceError, SolverConfig, binding_time_bound, glue_solve, solve
from .reporting import format_value, write_csv, write_report, write_summary
from .sampling import (
    generate_noise_path,
    noise_path_to_csv,
    sample_isotropic,
    sample_positive_stable,
    sample_scalar_sas,
    AlphaParams,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

STOCHASTIC = {"sample", "noise", "integrate", "solve", "glue", "tail", "moment",
              "picard", "uniqueness", "gof"}


class UsageError(Exception):
    pass


def _read_config_file(path: str, known_keys: set[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known_keys:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _resolve(args: argparse.Namespace, spec: dict[str, tuple]) -> dict:
    """Layer resolution: built-in default < config file < explicit flag."""
    file_values: dict[str, str] = {}
    if args.config is not None:
        file_values = _read_config_file(args.config, set(spec))
    resolved = {}
    for key, (caster, default) in spec.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            resolved[key] = caster(cli_value)
        elif key in file_values:
            resolved[key] = caster(file_values[key])
        else:
            resolved[key] = default
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    for key in keys:
        if resolved.get(key) is None:
            raise UsageError(f"--{key.replace('_', '-')} is required for this subcommand")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in str(text).split(",") if x != "")


def _model_from(resolved: dict):
    if resolved.get("model_config"):
        return parse_model_config(Path(resolved["model_config"]).read_text(encoding="utf-8"))
    preset = resolved.get("preset") or "heat"
    if preset != "heat":
        raise UsageError(f"unknown preset {preset!r}; available: heat")
    return heat_preset(n=resolved["n"], m=resolved.get("m"))


def _report_exit(report: ExperimentReport, out_dir: Path, resolved: dict) -> int:
    paths = write_report(report, out_dir, resolved)
    for verdict in report.verdicts:
        status = "PASS" if verdict.passed else "FAIL"
        print(f"[{status}] {report.name}.{verdict.name}: {verdict.observed} ({verdict.threshold})")
    for note in report.notes:
        print(f"note: {note}")
    print(f"wrote: {', '.join(str(p) for p in paths)}  (runtime {report.runtime:.2f}s)")
    if report.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS if report.passed else EXIT_FAIL


def _r_grid(resolved: dict) -> np.ndarray:
    return np.geomspace(resolved["r_min"], resolved["r_max"], resolved["r_count"])


# ----------------------------------------------------------------- handlers

def cmd_constants(args) -> int:
    spec = {
        "alpha": (float, None), "p": (float, None), "c_f": (float, 1.0), "c_g": (float, 1.0),
        "n": (int, 1), "c_convention": (float, 1.0), "out": (str, "."), "seed": (int, 0),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "p")
    report = constants_report(resolved["alpha"], resolved["p"], resolved["c_f"],
                              resolved["c_g"], resolved["n"], resolved["c_convention"])
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    items = report.as_items()
    for key, value in items:
        print(f"{key}={format_value(value)}")
    write_summary(out / "constants.summary", dict(items), resolved)
    write_csv(out / "constants.csv",
              {"key": [k for k, _ in items], "value": [v for _, v in items]}, resolved)
    return EXIT_PASS


def cmd_sample(args) -> int:
    spec = {
        "kind": (str, "sas"), "alpha": (float, None), "scale": (float, 1.0), "n": (int, 1),
        "N": (int, 10000), "seed": (int, None), "out": (str, "."),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "seed")
    kind = resolved["kind"]
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    if kind == "sas":
        draws = sample_scalar_sas(AlphaParams(resolved["alpha"], resolved["scale"]),
                                  resolved["seed"], size=resolved["N"])
        cols = {"x": draws}
    elif kind == "positive":
        draws = sample_positive_stable(resolved["alpha"] / 2.0, resolved["seed"],
                                       size=resolved["N"])
        cols = {"x": draws}
    elif kind == "isotropic":
        draws = sample_isotropic(resolved["alpha"], resolved["n"], resolved["seed"],
                                 size=resolved["N"])
        cols = {f"x_{j + 1}": draws[:, j] for j in range(resolved["n"])}
    else:
        raise UsageError(f"unknown sample kind {kind!r} (sas | positive | isotropic)")
    write_csv(out / "samples.csv", cols, resolved)
    print(f"wrote {out / 'samples.csv'} ({resolved['N']} draws)")
    return EXIT_PASS


def cmd_noise(args) -> int:
    spec = {
        "alpha": (float, None), "m": (int, 1), "T": (float, 1.0), "M": (int, 100),
        "seed": (int, None), "out": (str, "."),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "seed")
    grid = np.linspace(0.0, resolved["T"], resolved["M"] + 1)
    path = generate_noise_path(resolved["alpha"], resolved["m"], grid, resolved["seed"])
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    header = [f"cylstable version={__version__}"] + [
        f"{k}={format_value(v)}" for k, v in sorted(resolved.items())
    ]
    (out / "noise.csv").write_text(noise_path_to_csv(path, tuple(header)), encoding="utf-8",
                                   newline="\n")
    print(f"wrote {out / 'noise.csv'} ({path.steps} steps x {path.m} coordinates)")
    return EXIT_PASS


def cmd_integrate(args) -> int:
    spec = {
        "alpha": (float, None), "gamma": (_parse_floats, (1.0,)), "profile": (str, "const"),
        "T": (float, 1.0), "M": (int, 100), "seed": (int, None), "out": (str, "."),
        "refinement_levels": (int, None), "replicas": (int, 2000), "epsilon": (float, 0.02),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "seed")
    gamma = np.asarray(resolved["gamma"], dtype=float)
    grid = np.linspace(0.0, resolved["T"], resolved["M"] + 1)
    psi = HSMatrix.diagonal(gamma)
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)

    if resolved["refinement_levels"]:
        # refinement-convergence experiment for the selected profile
        profile = {"const": lambda s: np.ones_like(s), "linear": lambda s: s}.get(
            resolved["profile"]
        )
        if profile is None:
            raise UsageError(f"unknown profile {resolved['profile']!r} (const | linear)")
        result = refinement_experiment(
            profile, psi, resolved["alpha"], resolved["T"], resolved["M"],
            resolved["refinement_levels"], resolved["replicas"], resolved["epsilon"],
            resolved["seed"],
        )
        table = result["table"]
        write_csv(out / "refinement.csv",
                  {k: table[k] for k in ("level", "epsilon", "exceedance", "stderr")},
                  resolved)
        write_summary(out / "refinement.summary",
                      {"monotone": result["monotone"], "replicas": result["replicas"]},
                      resolved)
        print(f"wrote {out / 'refinement.csv'} (monotone={result['monotone']})")
        return EXIT_PASS if result["monotone"] else EXIT_FAIL

    if resolved["profile"] == "const":
        integrand = constant_integrand(psi, grid)
    elif resolved["profile"] == "linear":
        values = grid[:-1, None, None] * psi.entries[None]
        integrand = StepIntegrand(grid, values)
    else:
        raise UsageError(f"unknown profile {resolved['profile']!r} (const | linear)")
    noise = generate_noise_path(resolved["alpha"], gamma.size, grid, resolved["seed"])
    path = integrate(integrand, noise)
    cols = {"t": grid}
    cols.update({f"coord_{j + 1}": path[:, j] for j in range(path.shape[1])})
    write_csv(out / "integral.csv", cols, resolved)
    print(f"wrote {out / 'integral.csv'}")
    return EXIT_PASS


_SOLVER_SPEC = {
    "alpha": (float, 1.5), "preset": (str, "heat"), "model_config": (str, None),
    "T": (float, None), "M": (int, 200), "n": (int, 8), "m": (int, None),
    "N_max": (int, 64), "tol": (float, 1e-12), "seed": (int, None), "out": (str, "."),
    "x0": (_parse_floats, None),
}


def _config_from(resolved: dict, model, horizon: float) -> SolverConfig:
    x0 = np.asarray(resolved["x0"], float) if resolved.get("x0") else None
    return SolverConfig(alpha=resolved["alpha"], T=horizon, M=resolved["M"], n=model.n,
                        m=resolved["m"], N_max=resolved["N_max"], tol=resolved["tol"],
                        seed=resolved["seed"], x0=x0)


def _write_mild_path(path, out: Path, name: str, resolved: dict) -> None:
    from .reporting import header_lines

    with open(out / name, "w", newline="\n") as fh:
        for line in header_lines(resolved):
            fh.write(f"# {line}\n")
        n = path.states.shape[1]
        fh.write("t," + ",".join(f"x_{j + 1}" for j in range(n)) + "\n")
        for k in range(path.grid.size):
            row = [format_value(path.grid[k])] + [format_value(x) for x in path.states[k]]
            fh.write(",".join(row) + "\n")
        fh.write(
            f"# iteration_count={path.iteration_count} "
            f"gap={format_value(path.final_picard_gap)} "
            f"residual={format_value(path.residual)}\n"
        )


def cmd_solve(args) -> int:
    resolved = _resolve(args, _SOLVER_SPEC)
    _require(resolved, "T", "seed")
    model = _model_from(resolved)
    config = _config_from(resolved, model, resolved["T"])
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            path = solve(model, config)
        except NonConvergenceError as exc:
            print(f"FAIL: {exc}", file=sys.stderr)
            return EXIT_FAIL
    for warning in caught:
        print(f"warning: {warning.message}", file=sys.stderr)
    _write_mild_path(path, out, "mild_path.csv", resolved)
    write_summary(out / "mild_path.summary",
                  {"iteration_count": path.iteration_count,
                   "final_picard_gap": path.final_picard_gap,
                   "residual": path.residual,
                   "T_bound": binding_time_bound(model, config.alpha)},
                  resolved)
    print(f"solved in {path.iteration_count} iterations, gap={path.final_picard_gap:.3e}, "
          f"residual={path.residual:.3e}")
    return EXIT_PASS


def cmd_glue(args) -> int:
    spec = dict(_SOLVER_SPEC)
    spec["T_total"] = (float, None)
    resolved = _resolve(args, spec)
    _require(resolved, "T_total", "seed")
    model = _model_from(resolved)
    config = _config_from(resolved, model, resolved["T_total"])
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        path = glue_solve(model, config)
    except NonConvergenceError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write_mild_path(path, out, "glued_path.csv", resolved)
    entries = {"pieces": len(path.piece_residuals), "residual": path.residual}
    for i, res in enumerate(path.piece_residuals):
        entries[f"piece_residual.{i}"] = res
    write_summary(out / "glued_path.summary", entries, resolved)
    print(f"glued {len(path.piece_residuals)} pieces, worst residual {path.residual:.3e}")
    return EXIT_PASS


def cmd_tail(args) -> int:
    spec = {
        "alpha": (float, None), "t": (float, 1.0), "gamma": (_parse_floats, (1.0,)),
        "N": (int, 100_000), "r_min": (float, 10.0), "r_max": (float, 100.0),
        "r_count": (int, 13), "seed": (int, None), "out": (str, "."),
        "integrand": (str, None), "M": (int, 16), "T": (float, 1.0),
        "scale_factor": (float, 2.0), "flatness_max": (float, 1.5),
        "level_frac": (float, 0.15), "slope_tol": (float, 0.1),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "seed")
    gamma = np.asarray(resolved["gamma"], dtype=float)
    if resolved["integrand"] == "const":
        grid = np.linspace(0.0, resolved["T"], resolved["M"] + 1)
        psi = constant_integrand(HSMatrix.diagonal(gamma), grid)
    elif resolved["integrand"] is None:
        psi = HSMatrix.diagonal(gamma)
    else:
        raise UsageError("only --integrand const is supported")
    report = tail_experiment(psi, resolved["alpha"], t=resolved["t"], n_samples=resolved["N"],
                             r_grid=_r_grid(resolved), seed=resolved["seed"],
                             scale_factor=resolved["scale_factor"],
                             flatness_max=resolved["flatness_max"],
                             level_frac=resolved["level_frac"],
                             slope_tol=resolved["slope_tol"])
    return _report_exit(report, Path(resolved["out"]), resolved)


def cmd_moment(args) -> int:
    spec = {
        "alpha": (float, None), "p_list": (_parse_floats, None), "N": (int, 10_000),
        "gamma": (_parse_floats, (1.0,)), "T": (float, 1.0), "M": (int, 16),
        "seed": (int, None), "out": (str, "."), "scale_factor": (float, 2.0),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "seed")
    if resolved["p_list"] is None:
        resolved["p_list"] = (1.0, resolved["alpha"] - 0.3)
    grid = np.linspace(0.0, resolved["T"], resolved["M"] + 1)
    integrand = constant_integrand(HSMatrix.diagonal(np.asarray(resolved["gamma"])), grid)
    report = moment_experiment(integrand, resolved["alpha"], resolved["p_list"], resolved["N"],
                               seed=resolved["seed"], scale_factor=resolved["scale_factor"])
    return _report_exit(report, Path(resolved["out"]), resolved)


def cmd_picard(args) -> int:
    spec = dict(_SOLVER_SPEC)
    spec.update({"iters": (int, 8), "p": (float, 1.0), "replicas": (int, 200)})
    resolved = _resolve(args, spec)
    _require(resolved, "seed")
    model = _model_from(resolved)
    horizon = resolved["T"]
    if horizon is None:
        horizon = 0.9 * binding_time_bound(model, resolved["alpha"])
        resolved["T"] = horizon
    config = _config_from(resolved, model, horizon)
    report = picard_convergence_experiment(model, config, n_iters=resolved["iters"],
                                           p=resolved["p"], replicas=resolved["replicas"],
                                           seed=resolved["seed"])
    return _report_exit(report, Path(resolved["out"]), resolved)


def cmd_uniqueness(args) -> int:
    spec = dict(_SOLVER_SPEC)
    spec.update({"replicas": (int, 100)})
    resolved = _resolve(args, spec)
    _require(resolved, "seed")
    model = _model_from(resolved)
    horizon = resolved["T"]
    if horizon is None:
        horizon = 0.9 * binding_time_bound(model, resolved["alpha"])
        resolved["T"] = horizon
    config = _config_from(resolved, model, horizon)
    report = uniqueness_experiment(model, config, replicas=resolved["replicas"],
                                   seed=resolved["seed"])
    return _report_exit(report, Path(resolved["out"]), resolved)


def cmd_gronwall(args) -> int:
    spec = {
        "case": (str, "near-equality"), "M": (int, 10_000), "count": (int, 100),
        "p": (float, 0.5), "seed": (int, None), "out": (str, "."), "input": (str, None),
    }
    resolved = _resolve(args, spec)
    if resolved["case"] == "random" and not resolved["input"]:
        _require(resolved, "seed")
    if resolved["seed"] is None:
        resolved["seed"] = 0
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    report = ExperimentReport(name="gronwall", parameters={k: v for k, v in resolved.items()
                                                           if k not in ("out", "input")},
                              seed=resolved["seed"])
    if resolved["input"]:
        data = np.genfromtxt(resolved["input"], delimiter=",", names=True, comments="#")
        result = willet_wong_check(data["u"], data["v"], data["w"], resolved["p"], t=data["t"])
        report.add_verdict("margin_nonnegative", result["margin"] >= -1e-6,
                           "margin >= -1e-6", f"{result['margin']:.3e}")
    elif resolved["case"] == "near-equality":
        t = np.linspace(0.0, 1.0, resolved["M"] + 1)
        result = willet_wong_check(t**2 / 4.0, np.zeros_like(t), np.ones_like(t), 0.5, t=t)
        report.add_verdict("near_equality_margin", abs(result["margin"]) < 1e-4,
                           "|margin| < 1e-4", f"{result['margin']:.3e}")
    elif resolved["case"] == "random":
        margins = []
        for t, u, v, w, p in random_hypothesis_triples(resolved["count"], resolved["M"],
                                                       resolved["seed"]):
            margins.append(willet_wong_check(u, v, w, p, t=t)["margin"])
        margins = np.asarray(margins)
        report.tables["margins"] = {"trial": np.arange(margins.size), "margin": margins}
        report.add_verdict("margins_nonnegative", bool(np.all(margins >= -1e-6)),
                           "all margins >= -1e-6", f"min={margins.min():.3e}")
    else:
        raise UsageError(f"unknown case {resolved['case']!r} (near-equality | random)")
    return _report_exit(report, out, resolved)


def cmd_check_model(args) -> int:
    spec = {
        "preset": (str, "heat"), "model_config": (str, None), "n": (int, 8), "m": (int, None),
        "deltas": (_parse_floats, (0.25, 0.5, 1.0)), "out": (str, "."), "seed": (int, 0),
        "T": (float, 1.0),
    }
    resolved = _resolve(args, spec)
    model = _model_from(resolved)
    report = ExperimentReport(name="check_model",
                              parameters={"model": model.name, "n": model.n,
                                          "deltas": resolved["deltas"]},
                              seed=resolved["seed"])
    t_grid = np.geomspace(1e-6, resolved["T"], 25)
    for delta in resolved["deltas"]:
        result = check_norm_continuity(model, delta, t_grid)
        report.add_verdict(f"norm_continuity_delta={delta:g}",
                           result["worst_ratio"] <= 1.0 + 1e-6,
                           "worst ratio <= 1 + 1e-6", f"{result['worst_ratio']:.12f}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(resolved["seed"])))
    trials = [rng.standard_normal(model.n) for _ in range(8)] + [np.zeros(model.n)]
    a2 = check_A2(model, np.geomspace(1e-4, resolved["T"], 12), trials)
    report.add_verdict("A2_bounded", not a2["divergent"],
                       "fractional bound finite as t -> 0",
                       f"M0={a2['M0']:.6g} envelope_sup={a2['series_envelope_sup']:.6g}")
    pairs = [(rng.standard_normal(model.n), rng.standard_normal(model.n)) for _ in range(16)]
    a3 = check_A3(model, pairs, t_grid=(0.0, 0.01, 0.1))
    ok = a3["C_F"] <= a3["bound_C_F"] + 1e-9 and a3["C_G"] <= a3["bound_C_G"] + 1e-9
    report.add_verdict("A3_lipschitz", ok,
                       "estimates below the diagonal bounds",
                       f"C_F={a3['C_F']:.4f}<={a3['bound_C_F']:.4f}, "
                       f"C_G={a3['C_G']:.4f}<={a3['bound_C_G']:.4f}")
    return _report_exit(report, Path(resolved["out"]), resolved)


def cmd_gof(args) -> int:
    spec = {
        "alpha": (float, None), "n": (int, 3), "N": (int, 100_000), "count": (int, 10),
        "seed": (int, None), "out": (str, "."),
    }
    resolved = _resolve(args, spec)
    _require(resolved, "alpha", "seed")
    report = isotropic_gof_report(resolved["alpha"], resolved["n"], resolved["N"],
                                  resolved["seed"], count=resolved["count"])
    return _report_exit(report, Path(resolved["out"]), resolved)


# ------------------------------------------------------------------ parser

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out", help="output directory (default: .)")
    parser.add_argument("--seed", type=int, help="master 64-bit seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cylstable",
                                     description="alpha-stable cylindrical noise laboratory")
    parser.add_argument("--version", action="version", version=f"cylstable {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    specs: dict[str, tuple] = {
        "constants": (cmd_constants, ["alpha:f", "p:f", "c-f:f", "c-g:f", "n:i",
                                      "c-convention:f"]),
        "sample": (cmd_sample, ["kind:s", "alpha:f", "scale:f", "n:i", "N:i"]),
        "noise": (cmd_noise, ["alpha:f", "m:i", "T:f", "M:i"]),
        "integrate": (cmd_integrate, ["alpha:f", "gamma:s", "profile:s", "T:f", "M:i",
                                      "refinement-levels:i", "replicas:i", "epsilon:f"]),
        "solve": (cmd_solve, ["alpha:f", "preset:s", "model-config:s", "T:f", "M:i", "n:i",
                              "m:i", "N-max:i", "tol:f", "x0:s"]),
        "glue": (cmd_glue, ["alpha:f", "preset:s", "model-config:s", "T-total:f", "M:i",
                            "n:i", "m:i", "N-max:i", "tol:f", "x0:s"]),
        "tail": (cmd_tail, ["alpha:f", "t:f", "gamma:s", "N:i", "r-min:f", "r-max:f",
                            "r-count:i", "integrand:s", "M:i", "T:f", "scale-factor:f",
                            "flatness-max:f", "level-frac:f", "slope-tol:f"]),
        "moment": (cmd_moment, ["alpha:f", "p-list:s", "N:i", "gamma:s", "T:f", "M:i",
                                "scale-factor:f"]),
        "picard": (cmd_picard, ["alpha:f", "preset:s", "model-config:s", "T:f", "M:i", "n:i",
                                "m:i", "N-max:i", "tol:f", "iters:i", "p:f", "replicas:i"]),
        "uniqueness": (cmd_uniqueness, ["alpha:f", "preset:s", "model-config:s", "T:f", "M:i",
                                        "n:i", "m:i", "N-max:i", "tol:f", "replicas:i"]),
        "gronwall": (cmd_gronwall, ["case:s", "M:i", "count:i", "p:f", "input:s"]),
        "check-model": (cmd_check_model, ["preset:s", "model-config:s", "n:i", "m:i",
                                          "deltas:s", "T:f"]),
        "gof": (cmd_gof, ["alpha:f", "n:i", "N:i", "count:i"]),
    }
    casters = {"f": float, "i": int, "s": str}
    for name, (handler, options) in specs.items():
        sp = sub.add_parser(name)
        _add_common(sp)
        for option in options:
            opt_name, kind = option.split(":")
            sp.add_argument(f"--{opt_name}", type=casters[kind],
                            dest=opt_name.replace("-", "_"))
        sp.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, FileNotFoundError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisFailed as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NonConvergenceError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
