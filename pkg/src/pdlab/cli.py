"""Command-line orchestration: experiment configs, subcommands, output.

Each subcommand runs one experiment from a flat JSON config (optionally
loaded with --config) with CLI flags overriding config fields one-to-one.
A human-readable table goes to stdout; --out writes the machine report
(JSON, or CSV for sweeps).  The file payload excludes wall time, so for
a fixed seed and config it is byte-identical regardless of --threads.

Exit codes: 0 success, 2 validation error, 3 resource budget exceeded,
4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np
from scipy.integrate import quad

from pdlab import arith, dickman, pdprocess, sequences, stats
from pdlab.boxes import (
    BoxFunction,
    box_correlation_exact,
    box_correlation_quadrature,
)
from pdlab.errors import ResourceBudgetError, ValidationError
from pdlab.report import ExperimentReport, write_csv
from pdlab.sequences import SequenceSpec

DEFAULT_N_SAMPLES = 10**6


# ---------------------------------------------------------------------------
# config plumbing


def _require(config: dict, field: str):
    if field not in config or config[field] is None:
        raise ValidationError(f"missing required config field {field!r}")
    return config[field]


def _as_int(config: dict, field: str, default=None) -> int:
    val = config.get(field, default)
    if val is None:
        raise ValidationError(f"missing required config field {field!r}")
    try:
        ival = int(val)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field {field!r} must be an integer, got {val!r}") from exc
    return ival


def _as_float(config: dict, field: str, default=None) -> float:
    val = config.get(field, default)
    if val is None:
        raise ValidationError(f"missing required config field {field!r}")
    try:
        return float(val)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field {field!r} must be a number, got {val!r}") from exc


def _parse_spec(config: dict) -> SequenceSpec:
    raw = _require(config, "spec")
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict):
        raise ValidationError(f"field 'spec' must be an object or kind string, got {raw!r}")
    return SequenceSpec.from_dict(raw)


def _parse_boxes(config: dict) -> BoxFunction:
    raw = _require(config, "boxes")
    if isinstance(raw, dict):
        return BoxFunction.from_dict(raw)
    if isinstance(raw, list):
        # shorthand: a single box as a list of [a, b] interval pairs
        try:
            ivals = [(float(a), float(b)) for a, b in raw]
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed 'boxes' field: {raw!r}") from exc
        from pdlab.boxes import box

        return box(*ivals)
    raise ValidationError(f"field 'boxes' must be an object or interval list, got {raw!r}")


def _parse_g(config: dict) -> arith.GFunctionSpec:
    if "g" in config and config["g"] is not None:
        raw = config["g"]
        if isinstance(raw, str):
            raw = {"kind": raw}
        if not isinstance(raw, dict):
            raise ValidationError(f"field 'g' must be an object or kind string, got {raw!r}")
        coeffs = tuple(int(c) for c in raw.get("coeffs", ()))
        return arith.GFunctionSpec(kind=raw.get("kind"), coeffs=coeffs)
    if "spec" in config and config["spec"] is not None:
        return _parse_spec(config).g_function()
    raise ValidationError("missing required config field 'g' (or 'spec' to derive it)")


def _seed(config: dict) -> int:
    s = _as_int(config, "seed", 0)
    if not 0 <= s < 1 << 64:
        raise ValidationError(f"field 'seed' must fit in 64 bits, got {s}")
    return s


def _threads(config: dict) -> int:
    t = _as_int(config, "threads", 1)
    if t < 1:
        raise ValidationError(f"field 'threads' must be >= 1, got {t}")
    return t


# ---------------------------------------------------------------------------
# experiment runners


def run_rho(config: dict) -> ExperimentReport:
    u_max = _as_int(config, "u_max", dickman.DEFAULT_U_MAX)
    table = dickman.RhoTable(u_max=u_max)
    if config.get("table_out"):
        table.dump_csv(config["table_out"], step=_as_float(config, "step", 0.01))
    est = table.rho(2.0)
    return ExperimentReport(
        experiment="rho-table",
        config=config,
        estimate=est,
        oracle_value=1.0 - math.log(2.0),
        exhaustive=True,
        extras={
            "u_max": u_max,
            "rho_1": table.rho(1.0),
            "rho_2": est,
            "rho_u_max": table.rho(float(u_max)),
        },
    )


def run_pd(config: dict) -> ExperimentReport:
    n = _as_int(config, "n_samples", DEFAULT_N_SAMPLES)
    seed = _seed(config)
    threads = _threads(config)
    est = pdprocess.joint_cdf_mc([1.0], n, seed, threads=threads)  # validates plumbing
    assert est.value == 1.0, "P(L1 <= 1) must be exactly 1"
    mean_l1 = _mean_l1_mc(n, seed, threads)
    dev = pdprocess.mass_identity_max_deviation(n, seed, threads=threads)
    table = dickman.default_table()
    # E[L1] = 1 - integral of rho(t)/t**2 over t >= 1 (Golomb-Dickman constant),
    # from E[L1] = integral of (1 - P(L1 <= c)) dc with P(L1 <= c) = rho(1/c)
    tail_int, _ = quad(lambda t: table.rho(t) / (t * t), 1.0, float(table.u_max), limit=200)
    oracle = 1.0 - tail_int
    return ExperimentReport(
        experiment="pd-sample",
        config=config,
        seed=seed,
        estimate=mean_l1.value,
        std_error=mean_l1.std_error,
        oracle_value=oracle,
        exhaustive=False,
        extras={"n_samples": n, "mass_identity_max_deviation": dev},
    )


def _mean_l1_mc(n: int, seed: int, threads: int):
    def work(block, size):
        rng = pdprocess._block_rng(seed, block)
        top, _ = pdprocess._topk_block(rng, size, 1, pdprocess.DEFAULT_TRUNCATION)
        return float(top[:, 0].sum()), float(np.square(top[:, 0]).sum()), size

    parts = pdprocess._combine_blocks(n, threads, work)
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    total = sum(p[2] for p in parts)
    mean = s / total
    var = max(s2 / total - mean * mean, 0.0)
    from pdlab.report import Estimate

    return Estimate(value=mean, std_error=math.sqrt(var / total), n=total)


def _corr_oracle(eta: BoxFunction) -> float:
    if len(eta.boxes) == 1 and eta.boxes[0].weight == 1.0:
        try:
            return box_correlation_exact(eta.boxes[0].intervals())
        except ValidationError:
            pass
    return box_correlation_quadrature(eta)


def run_corr(config: dict) -> ExperimentReport:
    eta = _parse_boxes(config)
    oracle = _corr_oracle(eta)
    if config.get("spec") is not None:
        spec = _parse_spec(config)
        x = _as_int(config, "x")
        s = stats.build_sample_set(spec, x)
        est = stats.empirical_corr(s, eta)
        return ExperimentReport(
            experiment="seq-corr",
            config=config,
            spec=spec.to_dict(),
            x=x,
            estimate=est.value,
            std_error=est.std_error,
            oracle_value=oracle,
            exhaustive=s.exhaustive,
            extras={"k": eta.k, "n_members": s.n},
        )
    n = _as_int(config, "n_samples", DEFAULT_N_SAMPLES)
    seed = _seed(config)
    est = pdprocess.corr_mc(eta, n, seed, threads=_threads(config))
    return ExperimentReport(
        experiment="pd-corr",
        config=config,
        seed=seed,
        estimate=est.value,
        std_error=est.std_error,
        oracle_value=oracle,
        exhaustive=False,
        extras={"k": eta.k, "n_samples": n},
    )


def _thresholds(config: dict) -> list[float]:
    raw = _require(config, "c")
    if isinstance(raw, (int, float)):
        raw = [raw]
    try:
        c = [float(v) for v in raw]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field 'c' must be a number or list, got {raw!r}") from exc
    return c


def run_cdf(config: dict) -> ExperimentReport:
    c = _thresholds(config)
    oracle = None
    if len(c) == 1 and 1.0 / c[0] <= dickman.default_table().u_max:
        oracle = dickman.cdf_l1(c[0])
    if config.get("spec") is not None:
        spec = _parse_spec(config)
        x = _as_int(config, "x")
        s = stats.build_sample_set(spec, x)
        est = stats.empirical_joint_cdf(s, c)
        return ExperimentReport(
            experiment="joint-cdf",
            config=config,
            spec=spec.to_dict(),
            x=x,
            estimate=est.value,
            std_error=est.std_error,
            oracle_value=oracle,
            exhaustive=s.exhaustive,
            extras={"c": c, "n_members": s.n},
        )
    n = _as_int(config, "n_samples", DEFAULT_N_SAMPLES)
    seed = _seed(config)
    est = pdprocess.joint_cdf_mc(c, n, seed, threads=_threads(config))
    return ExperimentReport(
        experiment="joint-cdf",
        config=config,
        seed=seed,
        estimate=est.value,
        std_error=est.std_error,
        oracle_value=oracle,
        exhaustive=False,
        extras={"c": c, "n_samples": n},
    )


def run_tail(config: dict) -> ExperimentReport:
    spec = _parse_spec(config)
    x = _as_int(config, "x")
    eps = _as_float(config, "eps")
    s = stats.build_sample_set(spec, x)
    est = stats.tail_frequency(s, eps)
    oracle = None
    if 0 < eps < 1 and 1.0 / (1.0 - eps) <= dickman.default_table().u_max:
        oracle = 1.0 - dickman.cdf_l1(1.0 - eps)
    guard = config.get("guard_band")
    warnings = []
    if guard is not None and oracle is not None and est.value > float(guard) * oracle:
        warnings.append(
            f"estimate {est.value:.6f} exceeds guard band {guard} x oracle {oracle:.6f}"
        )
    return ExperimentReport(
        experiment="tail",
        config=config,
        spec=spec.to_dict(),
        x=x,
        estimate=est.value,
        std_error=est.std_error,
        oracle_value=oracle,
        guard_band=float(guard) if guard is not None else None,
        exhaustive=s.exhaustive,
        extras={"eps": eps, "n_members": s.n},
        warnings=warnings,
    )


def run_lod(config: dict) -> ExperimentReport:
    spec = _parse_spec(config)
    x = _as_int(config, "x")
    c = _as_float(config, "c")
    err, max_r = stats.lod_error_sum(spec, x, c)
    extras = {"c": c, "max_abs_r": max_r}
    oracle = None
    if spec.kind == "uniform":
        oracle = x ** (c - 1.0)  # closed bound, every |r_d| < 1
        assert err <= oracle, "uniform level-of-distribution bound violated"
    return ExperimentReport(
        experiment="lod",
        config=config,
        spec=spec.to_dict(),
        x=x,
        estimate=err,
        oracle_value=oracle,
        exhaustive=True,
        extras=extras,
    )


def run_repeated(config: dict) -> ExperimentReport:
    spec = _parse_spec(config)
    x = _as_int(config, "x")
    alpha = _as_float(config, "alpha")
    c = _as_float(config, "c")
    s = stats.build_sample_set(spec, x)
    est = stats.repeated_factor_frequency(s, alpha, c)
    return ExperimentReport(
        experiment="repeated",
        config=config,
        spec=spec.to_dict(),
        x=x,
        estimate=est.value,
        std_error=est.std_error,
        exhaustive=s.exhaustive,
        extras={"alpha": alpha, "c": c, "n_members": s.n},
    )


def run_sieve(config: dict) -> ExperimentReport:
    spec = _parse_spec(config)
    x = _as_int(config, "x")
    eps = _as_float(config, "eps")
    z0 = _as_float(config, "z0", 2.0)
    delta0 = config.get("delta0")
    res = stats.sieve_survivor_experiment(
        spec, x, eps, z0=z0, delta0=float(delta0) if delta0 is not None else None
    )
    return ExperimentReport(
        experiment="sieve-survivors",
        config=config,
        spec=spec.to_dict(),
        x=x,
        estimate=res.ratio,
        oracle_value=1.0,
        exhaustive=True,
        extras={
            "survivors": res.survivors,
            "n_members": res.n_total,
            "v_product": res.v_product,
            "n_window_primes": res.n_window_primes,
            "window_lo": res.window[0],
            "window_hi": res.window[1],
        },
    )


def run_mertens(config: dict) -> ExperimentReport:
    g = _parse_g(config)
    x = _as_int(config, "x")
    dev = arith.mertens_deviation(g, x)
    return ExperimentReport(
        experiment="mertens",
        config=config,
        x=x,
        estimate=dev,
        oracle_value=0.0,
        exhaustive=True,
        extras={"g_kind": g.kind},
    )


def run_growth(config: dict) -> ExperimentReport:
    g = _parse_g(config)
    x = _as_int(config, "x")
    sum_g, sum_h = arith.partial_sums_gh(g, x)
    extras = {"g_kind": g.kind, "sum_g": sum_g}
    if sum_h is not None:
        extras["sum_h"] = sum_h
    return ExperimentReport(
        experiment="growth",
        config=config,
        x=x,
        estimate=sum_g,
        exhaustive=True,
        extras=extras,
    )


RUNNERS = {
    "rho": run_rho,
    "pd": run_pd,
    "corr": run_corr,
    "cdf": run_cdf,
    "tail": run_tail,
    "lod": run_lod,
    "repeated": run_repeated,
    "sieve": run_sieve,
    "mertens": run_mertens,
    "growth": run_growth,
}


def run(experiment: str, config: dict) -> ExperimentReport:
    """Run a single experiment; the report embeds the config it ran from."""
    if experiment not in RUNNERS:
        raise ValidationError(f"unknown experiment {experiment!r}")
    t0 = time.perf_counter()
    report = RUNNERS[experiment](config)
    report.wall_time = time.perf_counter() - t0
    # threads is scheduling, not experiment identity: estimates never depend
    # on it, and dropping it keeps report payloads identical across --threads
    report.config = {k: v for k, v in config.items() if k != "threads"}
    return report


def sweep(experiment: str, config: dict, axis: str, values) -> list[ExperimentReport]:
    """Run the experiment once per value of config[axis]."""
    if not values:
        raise ValidationError("sweep needs a nonempty 'values' list")
    if not axis:
        raise ValidationError("sweep needs an 'axis' field name")
    reports = []
    for v in values:
        cfg = dict(config)
        cfg[axis] = v
        reports.append(run(experiment, cfg))
    return reports


# ---------------------------------------------------------------------------
# argument parsing

def _json_or_str(text: str):
    """JSON if it parses, else the raw string (lets --spec uniform work)."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


# flag name -> (dest config field, parser) for per-experiment options
_FLAGS = {
    "--x": ("x", int),
    "--eps": ("eps", float),
    "--alpha": ("alpha", float),
    "--c": ("c", json.loads),
    "--z0": ("z0", float),
    "--delta0": ("delta0", float),
    "--n-samples": ("n_samples", int),
    "--u-max": ("u_max", int),
    "--table-out": ("table_out", str),
    "--step": ("step", float),
    "--spec": ("spec", _json_or_str),
    "--boxes": ("boxes", json.loads),
    "--g": ("g", _json_or_str),
    "--guard-band": ("guard_band", float),
    "--experiment": ("experiment", str),
    "--axis": ("axis", str),
    "--values": ("values", json.loads),
}

_SUBCOMMAND_FLAGS = {
    "rho": ["--u-max", "--table-out", "--step"],
    "pd": ["--n-samples"],
    "corr": ["--boxes", "--spec", "--x", "--n-samples"],
    "cdf": ["--c", "--spec", "--x", "--n-samples"],
    "tail": ["--spec", "--x", "--eps", "--guard-band"],
    "lod": ["--spec", "--x", "--c"],
    "repeated": ["--spec", "--x", "--alpha", "--c"],
    "sieve": ["--spec", "--x", "--eps", "--z0", "--delta0"],
    "mertens": ["--g", "--spec", "--x"],
    "growth": ["--g", "--spec", "--x"],
    "sweep": list(_FLAGS),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdlab",
        description="Prime-factor spectra of arithmetic sequences vs the "
        "Poisson-Dirichlet limit: seeded, reproducible experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(RUNNERS) + ["sweep"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="flat JSON config file")
        p.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", type=str, default=None, help="report file path")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        for flag in _SUBCOMMAND_FLAGS[name]:
            field, typ = _FLAGS[flag]
            p.add_argument(flag, dest=f"cfg_{field}", type=typ, default=None)
    return parser


def _load_config(args) -> dict:
    config: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object")
        config.update(loaded)
    for key, val in vars(args).items():
        if key.startswith("cfg_") and val is not None:
            config[key[4:]] = val
    if args.seed is not None:
        config["seed"] = args.seed
    if args.threads is not None:
        config["threads"] = args.threads
    return config


def _emit(reports: list[ExperimentReport], out: str | None, fmt: str | None) -> None:
    for rep in reports:
        print(rep.human_table())
        print(f"wall_time    {rep.wall_time:.3f} s")
        print()
    if out is None:
        return
    if fmt is None:
        fmt = "csv" if out.endswith(".csv") or len(reports) > 1 else "json"
    if fmt == "csv" or len(reports) > 1:
        write_csv(reports, out)
    else:
        with open(out, "w") as fh:
            fh.write(reports[0].to_json(include_wall_time=False))
            fh.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        if args.command == "sweep":
            experiment = config.pop("experiment", None)
            if experiment is None:
                raise ValidationError("sweep needs an 'experiment' field")
            axis = config.pop("axis", None)
            values = config.pop("values", None)
            if values is None:
                raise ValidationError("sweep needs a 'values' list")
            reports = sweep(experiment, config, axis, values)
        else:
            reports = [run(args.command, config)]
        _emit(reports, args.out, args.format)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ResourceBudgetError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return 3
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
