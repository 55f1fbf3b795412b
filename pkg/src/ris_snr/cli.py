"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance failure (``validate`` only).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .analytic import snr_statistics, to_db
from .channel_model import PSDViolationError
from .config import ConfigError, ScenarioConfig, dump_config, load_config
from .insights import GAIN_LIMIT, gain_fav_unfav, optimal_gain_n
from .montecarlo import empirical_cdf, simulate
from .specfun import AccuracyError, SpecialFunctionDomainError

__all__ = ["main", "build_parser", "parse_n_list", "parse_betas", "split_ris", "EXIT_OK", "EXIT_CONFIG",
           "EXIT_NUMERIC", "EXIT_ACCEPTANCE"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_ACCEPTANCE = 4

_NUMERIC_ERRORS = (ArithmeticError, SpecialFunctionDomainError, PSDViolationError, ValueError)


# ----------------------------------------------------------------------------
# Argument helpers
# ----------------------------------------------------------------------------

def split_ris(n: int):
    """(N_y, N_z) for a bare element count: the most square factorisation, N_y >= N_z."""
    if n < 1:
        raise ValueError(f"RIS size must be >= 1, got {n}")
    nz = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return n // nz, nz


def _parse_ris_item(item):
    item = item.strip().lower()
    if "x" in item:
        ny, nz = (int(v) for v in item.split("x", 1))
        if ny < 1 or nz < 1:
            raise ValueError(item)
        return ny, nz
    return split_ris(int(item))


def parse_n_list(text: str):
    """Comma list of RIS sizes; items are ``N``, ``NyxNz`` or a range ``start:stop[:step]`` (inclusive)."""
    out = []
    try:
        for item in text.split(","):
            if ":" in item:
                parts = [int(v) for v in item.split(":")]
                start, stop = parts[0], parts[1]
                step = parts[2] if len(parts) > 2 else 1
                if step < 1:
                    raise ValueError(item)
                out.extend(split_ris(n) for n in range(start, stop + 1, step))
            else:
                out.append(_parse_ris_item(item))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid N list {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty N list")
    return out


def parse_betas(text: str):
    """Semicolon-separated ``beta_d,beta_br,beta_ru`` triples."""
    triples = []
    try:
        for chunk in text.split(";"):
            vals = tuple(float(v) for v in chunk.split(","))
            if len(vals) != 3 or any(not v >= 0 for v in vals):
                raise ValueError(chunk)
            triples.append(vals)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid beta triples {text!r}") from None
    return triples


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _default_gain_n():
    return [int(n) for n in np.unique(np.round(np.logspace(0, 5, 101)).astype(int))]


# ----------------------------------------------------------------------------
# Output helpers
# ----------------------------------------------------------------------------

def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def analysis_record(cfg: ScenarioConfig) -> dict:
    st = snr_statistics(cfg)
    return {
        "mean": st.mean,
        "mean_db": to_db(st.mean),
        "variance": st.variance,
        "gamma_shape": st.gamma_shape,
        "gamma_scale": st.gamma_scale,
        "fr_value": st.fr.value,
        "fr_method": st.fr.method.value,
        "fr_est_error": st.fr.est_error,
        "percentile_95_db": st.percentile_db(0.95),
        "exact_variance": st.exact_variance,
        "y_moment_method": st.y_moment_method,
        "path": st.path,
    }


def cmd_analyze(args):
    rec = analysis_record(_config(args))
    _emit(json.dumps(rec, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args):
    cfg = _config(args)
    st = simulate(cfg, args.trials, cfg.seed, workers=args.workers)
    rec = {
        "trials": st.trials,
        "seed": st.seed,
        "mean": st.mean,
        "mean_db": to_db(st.mean),
        "variance": st.variance,
        "quantiles": {repr(p): v for p, v in st.quantiles.items()},
    }
    _emit(json.dumps(rec, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_cdf(args):
    cfg = _config(args)
    st = snr_statistics(cfg)
    lo, hi = to_db(st.percentile(1e-3)), to_db(st.percentile(1 - 1e-3))
    grid_db = np.linspace(lo, hi, args.points)
    lin = 10.0 ** (grid_db / 10)
    analytic = st.cdf(lin)
    emp = None
    if args.trials > 0:
        emp = empirical_cdf(simulate(cfg, args.trials, cfg.seed, workers=args.workers), lin)
    rows = [(float(x), float(a), None if emp is None else float(e))
            for x, a, e in zip(grid_db, analytic, emp if emp is not None else [None] * len(lin))]
    _emit(_csv_text(["snr_db", "analytic_cdf", "empirical_cdf"], rows), args.out)
    return EXIT_OK


def cmd_sweep(args):
    cfg = _config(args)
    rows = []
    for ny, nz in args.n_list:
        c = cfg.replace(N_y=ny, N_z=nz)
        st = snr_statistics(c)
        mean_mc = var_mc = None
        if args.trials > 0:
            mc = simulate(c, args.trials, c.seed, workers=args.workers)
            mean_mc, var_mc = mc.mean, mc.variance
        rows.append((c.N, st.mean, mean_mc, st.variance, var_mc))
    _emit(_csv_text(["N", "mean_analytic", "mean_mc", "var_analytic", "var_mc"], rows), args.out)
    return EXIT_OK


def cmd_gain(args):
    cfg = _config(args)
    triples = args.betas or [(cfg.beta_d, cfg.beta_br, cfg.beta_ru)]
    ns = [ny * nz for ny, nz in args.n_list] if args.n_list else _default_gain_n()
    multi = len(triples) > 1
    rows = []
    summary = []
    for bd, bbr, bru in triples:
        c = cfg.replace(beta_d=bd, beta_br=bbr, beta_ru=bru)
        for n in ns:
            g = gain_fav_unfav(c, n)
            rows.append(((bd, bbr, bru) if multi else ()) + (n, g, GAIN_LIMIT))
        n_opt = optimal_gain_n(c, max(max(ns), 2))
        summary.append(f"beta=({bd:g}, {bbr:g}, {bru:g}): optimal N = {n_opt}, "
                       f"gain {gain_fav_unfav(c, n_opt):.6f}")
    header = (["beta_d", "beta_br", "beta_ru"] if multi else []) + ["N", "gain", "limit"]
    _emit(_csv_text(header, rows), args.out)
    if args.out:
        print("\n".join(summary))
    return EXIT_OK


def cmd_validate(args):
    from .validation import CRITERIA, run_all

    numbers = args.criteria or sorted(CRITERIA)
    results = run_all(numbers, on_result=lambda r: print(r.line(), flush=True))
    failed = [r for r in results if not r.passed and not r.advisory]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed (advisory failures do not count)")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------

def _criteria_list(text):
    try:
        nums = sorted({int(v) for v in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid criteria list {text!r}") from None
    if any(n < 1 or n > 10 for n in nums):
        raise argparse.ArgumentTypeError("criteria are numbered 1..10")
    return nums


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ris-snr", description="Optimal-SNR statistics of RIS-aided uplinks.",
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dump-defaults", action="store_true", help="print the baseline config and exit")
    p.add_argument("--out", help="output file for --dump-defaults (default stdout)")
    sub = p.add_subparsers(dest="command")

    def common(sp, trials_default=None):
        sp.add_argument("--config", help="scenario config file (default: baseline)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        if trials_default is not None:
            sp.add_argument("--trials", type=_nonneg_int, default=trials_default,
                            help="Monte-Carlo trials (0 disables simulation)")
            sp.add_argument("--workers", type=_positive_int, default=1)
        return sp

    common(sub.add_parser("analyze", help="analytic mean, variance and gamma fit (JSON)"))
    sp = common(sub.add_parser("simulate", help="Monte-Carlo statistics (JSON)"), 10**5)
    sp = common(sub.add_parser("cdf", help="analytic and empirical CDF (CSV)"), 10**5)
    sp.add_argument("--points", type=_positive_int, default=200)
    sp = common(sub.add_parser("sweep", help="mean and variance against RIS size (CSV)"), 10**5)
    sp.add_argument("--n-list", type=parse_n_list, default=parse_n_list("16,32,64"))
    sp = common(sub.add_parser("gain", help="favourable/unfavourable gain curve (CSV)"))
    sp.add_argument("--n-list", type=parse_n_list, default=None)
    sp.add_argument("--betas", type=parse_betas, default=None,
                    help="'beta_d,beta_br,beta_ru' triples separated by ';' (default: config values)")
    sp = sub.add_parser("validate", help="run the acceptance suite")
    sp.add_argument("--criteria", type=_criteria_list, default=None, help="comma list of criterion numbers")
    return p


_COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "cdf": cmd_cdf,
    "sweep": cmd_sweep,
    "gain": cmd_gain,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.dump_defaults:
        _emit(dump_config(), args.out)
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    if args.command == "simulate" and args.trials < 2:
        print("error: simulate needs --trials >= 2", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as err:
        payload = {"error": type(err).__name__, "message": str(err)}
        if isinstance(err, AccuracyError):
            partial = err.partial
            payload["partial"] = None if partial is None else np.asarray(partial).tolist()
            payload["est_error"] = None if err.est_error is None else np.asarray(err.est_error).tolist()
        print(json.dumps(payload), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
