"""Command-line interface.

Exit codes: 0 success, 2 invalid input or arguments, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .anomaly import ccdf, detect_events, fit_interval_exponential, interval_histogram, transition_errors
from .determinism import WaylandConfig, wayland_statistic
from .fitting import Family, analytic_ccdf, fit_all
from .io import read_series, write_csv, write_report, write_series
from .lyapunov import KantzConfig, StretchingCurve, estimate_lyapunov, stretching_curve
from .series import (
    LogisticParams,
    MimicParams,
    add_gaussian_noise,
    generate_mimic,
    generate_trajectory,
    random_initial_value,
    trial_seed,
)
from .surrogate import SurrogateKind, make_surrogate

log = logging.getLogger("nltsa")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
NOISE_VARIANCE = 0.0014
REPRODUCE_TRANSIENT = 100


class InputError(Exception):
    pass


# -- generate ----------------------------------------------------------------

def _base_trajectory(a, x0, length, transient, seed):
    if x0 is None:
        x0 = random_initial_value(seed)
    return generate_trajectory(x0, LogisticParams(a), length, transient), x0


def cmd_generate(args) -> int:
    params = LogisticParams(args.a)
    config = {"kind": args.kind, "a": args.a, "length": args.length, "seed": args.seed}
    if args.kind == "mimic":
        mimic = MimicParams(args.base_noise, args.anomaly_prob, args.anomaly_scale, args.clamp_low, args.clamp_high)
        series = generate_mimic(args.length, params, mimic, args.seed, x0=args.x0)
        config.update(vars_of(mimic))
    else:
        series, x0 = _base_trajectory(args.a, args.x0, args.length, args.transient, args.seed)
        config.update(x0=x0, transient=args.transient)
        if args.kind == "noisy":
            series = add_gaussian_noise(series, args.variance, args.seed)
            config["variance"] = args.variance
    header = None
    if args.header:
        header = "nltsa generate " + " ".join(f"{k}={v!r}" for k, v in sorted(config.items()))
    write_series(args.out, series, header)
    return EXIT_OK


def vars_of(obj) -> dict:
    return dict(obj.__dict__)


# -- surrogate ---------------------------------------------------------------

def cmd_surrogate(args) -> int:
    series = read_series(args.input)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(args.trials - 1)))
    for i in range(args.trials):
        s = make_surrogate(args.kind, series, trial_seed(args.seed, i))
        write_series(out_dir / f"{args.kind}_{i:0{width}d}.txt", s)
    return EXIT_OK


# -- wayland -----------------------------------------------------------------

def wayland_report(series, ms, K, n_refs, seed, theiler=0, per_reference=False):
    results, warnings = {}, []
    for m in ms:
        res = wayland_statistic(series, WaylandConfig(m=m, K=K, n_refs=n_refs, seed=seed, theiler=theiler))
        entry = {
            "median": res.median,
            "n_references": res.n_used,
            "skipped": res.skipped,
        }
        if per_reference:
            entry["per_reference"] = res.per_reference
            entry["references"] = res.references
        results[str(m)] = entry
        warnings.extend(f"m={m}: {w}" for w in res.warnings)
    return results, warnings


def cmd_wayland(args) -> int:
    series = read_series(args.input)
    if len(series) < max(args.m) + 1 + args.K:
        raise InputError(f"series of length {len(series)} too short for m={max(args.m)}, K={args.K}")
    results, warnings = wayland_report(series, args.m, args.K, args.n_refs, args.seed, args.theiler, args.per_reference)
    config = {
        "input": str(args.input), "m": args.m, "K": args.K, "n_refs": args.n_refs,
        "seed": args.seed, "theiler": args.theiler,
    }
    write_report(args.out, "wayland", config, {"medians": results}, warnings)
    return EXIT_OK


# -- lyapunov ----------------------------------------------------------------

def _read_curve_csv(path) -> StretchingCurve:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    ks = rows[:, 0].astype(int)
    if not np.array_equal(ks, np.arange(1, ks.size + 1)):
        raise InputError(f"{path}: k column must run 1..k_max")
    counts = rows[:, 2].astype(np.int64) if rows.shape[1] > 2 else np.ones(ks.size, np.int64)
    return StretchingCurve(s_values=rows[:, 1], reference_counts=counts)


def write_curve_csv(path, curve: StretchingCurve) -> None:
    write_csv(
        path, ["k", "S", "reference_count"],
        [(int(k), float(s), int(c)) for k, s, c in zip(curve.k, curve.s_values, curve.reference_counts)],
    )


def cmd_lyapunov(args) -> int:
    k_min, k_fit = args.fit
    if args.curve_in:
        curve = _read_curve_csv(args.curve_in)
    else:
        series = read_series(args.input)
        cfg = KantzConfig(m=args.m, eps=args.eps, k_max=args.kmax, min_neighbors=args.min_neighbors, theiler=args.theiler)
        curve = stretching_curve(series, cfg)
    est = estimate_lyapunov(curve, k_min, k_fit)
    curve_out = Path(args.curve_out) if args.curve_out else Path(args.out).with_suffix(".csv")
    write_curve_csv(curve_out, curve)
    config = {
        "input": str(args.input) if args.input else None, "curve_in": args.curve_in,
        "m": args.m, "eps": args.eps, "kmax": args.kmax, "fit_range": [k_min, k_fit],
        "min_neighbors": args.min_neighbors, "theiler": args.theiler,
    }
    results = {
        "slope": est.slope, "intercept": est.intercept, "residual_rms": est.residual_rms,
        "fit_range": list(est.fit_range), "eps_used": curve.eps,
        "curve_csv": curve_out.name,
        "reference_counts": curve.reference_counts,
    }
    write_report(args.out, "lyapunov", config, results, curve.warnings)
    return EXIT_OK


# -- anomaly -----------------------------------------------------------------

FAMILIES = (Family.FOLDED_GAUSSIAN, Family.EXPONENTIAL, Family.GAMMA, Family.LOGNORMAL)


def tail_deviation(emp, fit, level: float) -> dict:
    """Compare the empirical CCDF with the fitted exponential at the error
    size where the fitted CCDF equals ``level``."""
    d_star = -np.log(level) / fit.params["rate"]
    p_emp = float(emp(d_star))
    ratio = p_emp / level
    return {
        "level": level, "d": d_star, "empirical": p_emp, "ratio": ratio,
        "direction": "above" if ratio > 1 else "below" if ratio < 1 else "equal",
    }


def anomaly_outputs(series, a, threshold, out_dir, l_min=5, bin_width=1, fit_bin_width=None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    warnings = []
    errs = transition_errors(series, LogisticParams(a))
    emp = ccdf(errs.d_values)
    fits = fit_all(errs.e_values)
    n_zero = int(np.count_nonzero(errs.d_values == 0))
    if not fits:
        warnings.append(f"all {len(errs)} transition errors are zero; distribution fits skipped")

    cols = [emp.d, emp.p]
    header = ["d", "empirical"]
    for fam in FAMILIES:
        if fam in fits:
            header.append(fam.value)
            cols.append(np.atleast_1d(analytic_ccdf(fits[fam], emp.d)))
    write_csv(out_dir / "ccdf.csv", header, zip(*cols))

    fit_report = {}
    for fam in FAMILIES:
        if fam not in fits:
            fit_report[fam.value] = {"skipped": True, "n_excluded": n_zero}
            continue
        f = fits[fam]
        model = np.atleast_1d(analytic_ccdf(f, emp.d))
        ok = model > 0
        dev = np.abs(np.log10(emp.p[ok]) - np.log10(model[ok]))
        fit_report[fam.value] = {
            "params": f.params, "log_likelihood": f.log_likelihood,
            "n_samples": f.n_samples, "n_excluded": f.n_excluded,
            "max_abs_log10_ccdf_deviation": float(dev.max()) if dev.size else None,
        }

    tails = []
    if Family.EXPONENTIAL in fits:
        tails = [tail_deviation(emp, fits[Family.EXPONENTIAL], lvl) for lvl in (1e-3, 1e-4)]

    events = detect_events(errs, threshold)
    hist = interval_histogram(events, bin_width)
    write_csv(out_dir / "intervals.csv", ["low", "high", "count"], hist)
    interval_report = {
        "threshold": threshold, "n_events": events.n_events,
        "n_intervals": int(events.intervals.size), "empty": events.empty,
        "mean_interval": float(events.intervals.mean()) if not events.empty else None,
        "event_times": events.event_times,
    }
    if events.empty:
        warnings.append(f"fewer than 2 events above threshold {threshold}; interval statistics empty")
    else:
        try:
            ifit = fit_interval_exponential(events, l_min=l_min, bin_width=fit_bin_width)
        except ValueError as exc:
            warnings.append(f"interval exponential fit skipped: {exc}")
        else:
            interval_report["exponential_fit"] = {
                "l_min": ifit.l_min, "bin_width": ifit.bin_width, "slope": ifit.line.slope,
                "intercept": ifit.line.intercept, "r_squared": ifit.r_squared,
                "rate": ifit.rate, "n_intervals": ifit.n_intervals, "n_bins": ifit.n_bins,
            }
    results = {
        "n_transitions": len(errs), "n_zero_errors": n_zero,
        "mean_square_error": float(np.mean(errs.e_values ** 2)),
        "fits": fit_report, "tail_vs_exponential": tails, "intervals": interval_report,
    }
    return results, warnings


def cmd_anomaly(args) -> int:
    series = read_series(args.input)
    if len(series) < 2:
        raise InputError("need at least 2 values")
    results, warnings = anomaly_outputs(
        series, args.a, args.threshold, args.out_dir, args.l_min, args.bin_width, args.fit_bin_width
    )
    config = {
        "input": str(args.input), "a": args.a, "threshold": args.threshold,
        "l_min": args.l_min, "bin_width": args.bin_width, "fit_bin_width": args.fit_bin_width,
    }
    write_report(Path(args.out_dir) / "anomaly.json", "anomaly", config, results, warnings)
    return EXIT_OK


# -- reproduce ---------------------------------------------------------------

CONDITIONS = ("noisy", "rs", "ft", "aaft")


def _condition_series(cond, base, seed):
    if cond == "noisy":
        return add_gaussian_noise(base, NOISE_VARIANCE, seed)
    return make_surrogate(SurrogateKind(cond), base, seed)


def reproduce_wayland(out_dir, base, trials, seed, ms=(1, 2, 3, 4, 5), K=50, n_refs=1000):
    rows = []
    for m in ms:
        res = wayland_statistic(base, WaylandConfig(m=m, K=K, n_refs=n_refs, seed=seed))
        rows.append(("original", 0, m, res.median))
    for cond in CONDITIONS:
        for i in range(trials):
            s = _condition_series(cond, base, trial_seed(seed, i))
            for m in ms:
                res = wayland_statistic(s, WaylandConfig(m=m, K=K, n_refs=n_refs, seed=seed))
                rows.append((cond, i, m, res.median))
            log.info("wayland %s trial %d done", cond, i)
    write_csv(Path(out_dir) / "wayland.csv", ["condition", "trial", "m", "median"], rows)
    return rows


def reproduce_lyapunov(out_dir, length, trials, seed, m=2, k_max=10, fit=(1, 5)):
    curve_rows, slope_rows = [], []
    for i in range(trials):
        s_seed = trial_seed(seed, i)
        base, _ = _base_trajectory(4.0, None, length, REPRODUCE_TRANSIENT, s_seed)
        for cond in ("original",) + CONDITIONS:
            s = base if cond == "original" else _condition_series(cond, base, s_seed)
            curve = stretching_curve(s, KantzConfig(m=m, k_max=k_max))
            est = estimate_lyapunov(curve, *fit)
            curve_rows.extend(
                (cond, i, int(k), float(v), int(c)) for k, v, c in zip(curve.k, curve.s_values, curve.reference_counts)
            )
            slope_rows.append((cond, i, est.slope, est.intercept, curve.eps))
        log.info("lyapunov trial %d done", i)
    write_csv(Path(out_dir) / "stretching.csv", ["condition", "trial", "k", "S", "reference_count"], curve_rows)
    write_csv(Path(out_dir) / "lyapunov.csv", ["condition", "trial", "slope", "intercept", "eps"], slope_rows)
    return slope_rows


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    which = set(args.which)
    summary = {}
    warnings = []
    if "wayland" in which:
        base, x0 = _base_trajectory(4.0, None, args.length, REPRODUCE_TRANSIENT, args.seed)
        write_series(out_dir / "logistic.txt", base)
        rows = reproduce_wayland(out_dir, base, args.trials, args.seed, n_refs=args.n_refs)
        summary["wayland"] = {"x0": x0, "rows": len(rows)}
    if "lyapunov" in which:
        rows = reproduce_lyapunov(out_dir, args.length, args.trials, args.seed)
        summary["lyapunov"] = {
            cond: float(np.mean([r[2] for r in rows if r[0] == cond])) for cond in ("original",) + CONDITIONS
        }
    if "anomaly" in which:
        mimic = generate_mimic(args.length, LogisticParams(4.0), MimicParams(), args.seed)
        write_series(out_dir / "mimic.txt", mimic)
        results, w = anomaly_outputs(mimic, 4.0, args.threshold, out_dir / "anomaly")
        warnings.extend(w)
        summary["anomaly"] = {
            "n_events": results["intervals"]["n_events"],
            "tail_vs_exponential": results["tail_vs_exponential"],
        }
    config = {"length": args.length, "trials": args.trials, "seed": args.seed, "which": sorted(which),
              "n_refs": args.n_refs, "threshold": args.threshold}
    write_report(out_dir / "reproduce.json", "reproduce", config, summary, warnings)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return v


def seed_int(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nltsa", description="Nonlinear time-series analysis of chaotic series")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a logistic, noisy or mimic series")
    g.add_argument("kind", choices=["logistic", "noisy", "mimic"])
    g.add_argument("--a", type=float, default=4.0)
    g.add_argument("--x0", type=float, default=None, help="initial value (default: uniform draw from --seed)")
    g.add_argument("--length", type=positive_int, default=100_000)
    g.add_argument("--transient", type=int, default=0)
    g.add_argument("--variance", type=float, default=NOISE_VARIANCE)
    g.add_argument("--base-noise", type=float, default=MimicParams.base_noise_scale)
    g.add_argument("--anomaly-prob", type=float, default=MimicParams.anomaly_prob)
    g.add_argument("--anomaly-scale", type=float, default=MimicParams.anomaly_scale)
    g.add_argument("--clamp-low", type=float, default=MimicParams.clamp_low)
    g.add_argument("--clamp-high", type=float, default=MimicParams.clamp_high)
    g.add_argument("--seed", type=seed_int, default=0)
    g.add_argument("--header", action="store_true", help="write the generation parameters as a comment line")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("surrogate", help="write surrogate series")
    s.add_argument("kind", choices=[k.value for k in SurrogateKind])
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--trials", type=positive_int, default=100)
    s.add_argument("--seed", type=seed_int, default=0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_surrogate)

    w = sub.add_parser("wayland", help="median translation error per embedding dimension")
    w.add_argument("--in", dest="input", required=True)
    w.add_argument("--m", type=positive_int, nargs="+", default=[1, 2, 3, 4, 5])
    w.add_argument("--K", type=positive_int, default=50)
    w.add_argument("--n-refs", type=positive_int, default=1000)
    w.add_argument("--theiler", type=int, default=0)
    w.add_argument("--seed", type=seed_int, default=0)
    w.add_argument("--per-reference", action="store_true")
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_wayland)

    ly = sub.add_parser("lyapunov", help="Kantz stretching curve and slope")
    src = ly.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input")
    src.add_argument("--curve-in", help="fit an existing k,S[,count] CSV instead of computing one")
    ly.add_argument("--m", type=positive_int, default=2)
    ly.add_argument("--eps", type=positive_float, default=None)
    ly.add_argument("--kmax", type=positive_int, default=10)
    ly.add_argument("--fit", type=positive_int, nargs=2, default=[1, 5], metavar=("KMIN", "KMAX"))
    ly.add_argument("--min-neighbors", type=positive_int, default=1)
    ly.add_argument("--theiler", type=int, default=0)
    ly.add_argument("--out", required=True)
    ly.add_argument("--curve-out", default=None, help="S(k) CSV path (default: --out with .csv suffix)")
    ly.set_defaults(func=cmd_lyapunov)

    an = sub.add_parser("anomaly", help="transition errors, CCDF fits and event intervals")
    an.add_argument("--in", dest="input", required=True)
    an.add_argument("--a", type=float, default=4.0)
    an.add_argument("--threshold", type=positive_float, default=0.1)
    an.add_argument("--l-min", type=positive_int, default=5)
    an.add_argument("--bin-width", type=positive_int, default=1)
    an.add_argument("--fit-bin-width", type=positive_int, default=None)
    an.add_argument("--out-dir", required=True)
    an.set_defaults(func=cmd_anomaly)

    r = sub.add_parser("reproduce", help="run the desk-scale determinism, Lyapunov and anomaly recipes")
    r.add_argument("--out-dir", required=True)
    r.add_argument("--length", type=positive_int, default=100_000)
    r.add_argument("--trials", type=positive_int, default=10)
    r.add_argument("--n-refs", type=positive_int, default=1000)
    r.add_argument("--threshold", type=positive_float, default=0.1)
    r.add_argument("--seed", type=seed_int, default=0)
    r.add_argument("--which", nargs="+", choices=["wayland", "lyapunov", "anomaly"],
                   default=["wayland", "lyapunov", "anomaly"])
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ArithmeticError as exc:
        print(f"nltsa {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ValueError, IndexError, OSError) as exc:
        print(f"nltsa {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
