"""Command-line verification front end.

Commands (all emit a JSON report and exit 0 only if no check failed):

  verify-expansions       eigenvalue expansion orders on random instances
  verify-chain-rules      closed-form composite calculus vs sampling oracles
  second-subderivative    full second-order analysis of a scenario file
  check-optimality        stationarity, cone scans, growth probe of a scenario
  paper-examples          fixed regression fixtures with known values

Reports are deterministic under a fixed seed: identical seed and
configuration produce identical bodies apart from the runtime_ms fields.
The seed comes from --seed, else the SPECVARAN_SEED environment variable,
else 0.  Fault-injection flags exist only to prove the harness can fail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import zlib
from typing import Optional

import numpy as np

from . import instances
from .errors import ConfigError, InsufficientData, SpecvaranError
from .eigderiv import lambda_dir, lambda_parabolic
from .symmat import eig_ordered
from .optimality import (
    SamplerConfig,
    SmoothObjective,
    necessary_condition_scan,
    quadratic_growth_probe,
    stationarity_check,
    sufficient_condition_scan,
)
from .oracle import QuotientGrid, numeric_parabolic_subderivative, numeric_second_subderivative, numeric_subderivative, slope_fit
from .scenarios import load_scenario
from .spectral import (
    SpectralFunction,
    dist_dom_g,
    g_critical_cone_contains,
    g_eval,
    g_parabolic_subderivative,
    g_second_subderivative,
    g_subderivative,
    g_subdiff_contains,
    minimizing_parabolic_offset,
    psd_critical_cone_explicit,
    sigma_term,
    spectral_second_tangent_contains,
    spectral_tangent_contains,
    witness_direction,
)
from .symmat import as_symmetric, fan_gap

INF = float("inf")
SCHEMA_VERSION = 1
ENV_SEED = "SPECVARAN_SEED"

FAULT_NAMES = ("parabolic-derivative", "chain-offset")


def _jsonable(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if np.isfinite(f):
            return f
        return "inf" if f > 0 else ("-inf" if f < 0 else "nan")
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    return str(v)


class ReportBuilder:
    def __init__(self, command: str, config: dict, seed: int):
        self.command = command
        self.config = {k: _jsonable(v) for k, v in sorted(config.items())}
        self.seed = seed
        self.records = []
        self._mark = time.perf_counter()

    def check(self, name: str, ok: Optional[bool], computed=None, expected=None, tolerance=None):
        """Append a record; ok None means an informational/skip record.

        The runtime attributed to a record is the wall time elapsed since
        the previous record (the work leading up to this check).
        """
        now = time.perf_counter()
        status = "skip" if ok is None else ("pass" if ok else "fail")
        self.records.append(
            {
                "name": name,
                "status": status,
                "computed": _jsonable(computed),
                "expected": _jsonable(expected),
                "tolerance": _jsonable(tolerance),
                "runtime_ms": (now - self._mark) * 1000.0,
            }
        )
        self._mark = now

    def build(self) -> dict:
        records = sorted(self.records, key=lambda r: r["name"])
        summary = {
            "pass": sum(1 for r in records if r["status"] == "pass"),
            "fail": sum(1 for r in records if r["status"] == "fail"),
            "skip": sum(1 for r in records if r["status"] == "skip"),
        }
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "records": records,
            "summary": summary,
        }


def report_body(report: dict, include_runtime: bool = False) -> bytes:
    """Canonical serialized body; runtimes are excluded by default so
    determinism can be asserted byte-for-byte."""
    if include_runtime:
        return json.dumps(report, indent=2, sort_keys=True).encode()
    scrubbed = dict(report)
    scrubbed["records"] = [{k: v for k, v in r.items() if k != "runtime_ms"} for r in report["records"]]
    return json.dumps(scrubbed, indent=2, sort_keys=True).encode()


def _parse_t_grid(text: Optional[str], default):
    if text is None:
        return tuple(default)
    try:
        ts = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --t-grid: {exc}") from exc
    if not ts:
        raise ConfigError("--t-grid is empty")
    return ts


def _parse_dims(text: Optional[str], default=(2, 3, 4, 5, 6)):
    if text is None:
        return tuple(default)
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --n: {exc}") from exc
    if any(d < 1 for d in dims):
        raise ConfigError("--n entries must be positive")
    return dims


# ---------------------------------------------------------------------------
# verify-expansions


def cmd_verify_expansions(seed: int, dims, trials: int, t_grid, fault: Optional[str]) -> dict:
    rb = ReportBuilder(
        "verify-expansions",
        {"n": list(dims), "trials": trials, "t_grid": list(t_grid), "inject_fault": fault},
        seed,
    )
    slope_grid = tuple(t for t in t_grid if t >= 1e-5)
    ratio_grid = tuple(t for t in t_grid if t >= 1e-3) or t_grid[:3]
    rng = np.random.default_rng(seed)
    corrupt = 0.9 if fault == "parabolic-derivative" else 1.0
    for n in dims:
        patterns = ["distinct"] + (["double"] if n >= 2 else []) + (["triple"] if n >= 3 else [])
        for pattern in patterns:
            slopes, ratios_ok, finals = [], [], []
            for _ in range(trials):
                X, H, W = instances.expansion_instance(rng, n, pattern)
                lam0 = eig_ordered(X).lam
                d1 = lambda_dir(X, H)
                rows = []
                for t in slope_grid:
                    lam_t = eig_ordered(X + t * H).lam
                    rows.append((t, float(np.linalg.norm(lam_t - lam0 - t * d1))))
                try:
                    slopes.append(slope_fit(np.array(rows)))
                except InsufficientData:
                    slopes.append(2.0)  # residuals at noise floor: exact expansion
                d2 = corrupt * lambda_parabolic(X, H, W)
                ratios = []
                for t in ratio_grid:
                    lam_t = eig_ordered(X + t * H + 0.5 * t * t * W).lam
                    res = float(np.linalg.norm(lam_t - lam0 - t * d1 - 0.5 * t * t * d2))
                    ratios.append(res / (t * t))
                slack = 1e-9 * (1.0 + ratios[0])
                ratios_ok.append(all(b <= a + slack for a, b in zip(ratios, ratios[1:])))
                finals.append(ratios[-1])
            min_slope = float(np.min(slopes))
            rb.check(
                f"expansion-first-slope[n={n},{pattern}]",
                min_slope >= 1.8,
                computed=min_slope,
                expected=">= 1.8",
            )
            worst_final = float(np.max(finals))
            rb.check(
                f"expansion-second-ratio[n={n},{pattern}]",
                all(ratios_ok) and worst_final < 1e-3,
                computed=worst_final,
                expected="nonincreasing, < 1e-3 at the finest t",
                tolerance=1e-3,
            )
    return rb.build()


# ---------------------------------------------------------------------------
# verify-chain-rules


def _chain_cases(rng, theta_name: str, count: int):
    cases = []
    for i in range(count):
        n = int(rng.integers(2, 7))
        if theta_name == "max":
            X, H = instances.max_chain_case(rng, n, degenerate_top=bool(i % 3 == 0))
            cases.append((X, H, None))
        else:
            sign = -1.0 if theta_name == "neg-orthant" else 1.0
            mode = ("interior", "strict", "aligned")[i % 3]
            X, H, tangent = instances.orthant_chain_case(rng, n, mode, sign)
            cases.append((X, H, tangent))
    return cases


def cmd_verify_chain_rules(seed: int, trials: int, tol: float, fault: Optional[str]) -> dict:
    rb = ReportBuilder(
        "verify-chain-rules",
        {"trials": trials, "tol": tol, "inject_fault": fault},
        seed,
    )
    offset = 0.1 if fault == "chain-offset" else 0.0
    grid = QuotientGrid.geometric(1e-1, 1e-4, samples=48, seed=seed)
    for theta_name in ("max", "neg-orthant", "pos-orthant"):
        fn = SpectralFunction.by_name(theta_name)
        rng = np.random.default_rng([seed, zlib.crc32(theta_name.encode())])
        devs = []
        for X, H, _ in _chain_cases(rng, theta_name, trials):
            closed = g_subderivative(fn, X, H) + offset
            est = numeric_subderivative(lambda M: g_eval(fn, M), X, H, grid).value
            if np.isfinite(closed) and np.isfinite(est):
                devs.append(abs(closed - est) / max(tol, 0.02 * abs(closed)))
            else:
                devs.append(0.0 if (not np.isfinite(closed) and not np.isfinite(est)) else INF)
        worst = float(np.max(devs))
        rb.check(
            f"subderivative-chain[{theta_name}]",
            worst <= 1.0,
            computed=worst,
            expected="deviation within max(tol, 2% relative), normalized <= 1",
            tolerance=1.0,
        )
        if theta_name != "max":
            sign = -1.0 if theta_name == "neg-orthant" else 1.0
            agree = 0
            total = 0
            for mode, want in (("interior", True), ("strict", True), ("outside", False)):
                for _ in range(max(4, trials // 3)):
                    n = int(rng.integers(2, 7))
                    X, H, tangent = instances.orthant_chain_case(rng, n, mode, sign)
                    verdict = spectral_tangent_contains(fn, X, H)
                    ratios = [dist_dom_g(fn, X + t * H) / t for t in (1e-2, 1e-3, 1e-4)]
                    oracle = ratios[-1] < 1e-6
                    agree += int(verdict == oracle == want)
                    total += 1
            rb.check(
                f"tangent-consistency[{theta_name}]",
                agree == total,
                computed=f"{agree}/{total}",
                expected="membership verdicts match the distance oracle",
            )
        # parabolic chain rule on tangent directions
        pdevs = []
        rng2 = np.random.default_rng([seed + 1, zlib.crc32(theta_name.encode())])
        for _ in range(max(4, trials // 2)):
            n = int(rng2.integers(2, 5))
            if theta_name == "max":
                X, H = instances.max_chain_case(rng2, n, degenerate_top=True)
                W = instances.random_symmetric(rng2, n)
            else:
                sign = -1.0 if theta_name == "neg-orthant" else 1.0
                X, H, _ = instances.orthant_chain_case(rng2, n, "strict", sign)
                W = instances.random_symmetric(rng2, n)
            closed = g_parabolic_subderivative(fn, X, H, W) + offset
            est = numeric_parabolic_subderivative(lambda M: g_eval(fn, M), X, H, W, grid).value
            if np.isfinite(closed) and np.isfinite(est):
                pdevs.append(abs(closed - est) / max(tol, 0.02 * abs(closed)))
            else:
                pdevs.append(0.0 if (not np.isfinite(closed) and not np.isfinite(est)) else INF)
        worst_p = float(np.max(pdevs))
        rb.check(
            f"parabolic-chain[{theta_name}]",
            worst_p <= 1.0,
            computed=worst_p,
            expected="deviation within max(tol, 2% relative), normalized <= 1",
            tolerance=1.0,
        )
    return rb.build()


# ---------------------------------------------------------------------------
# second-subderivative


def cmd_second_subderivative(scenario_path: str, seed: int, tol: float, samples: int) -> dict:
    sc = load_scenario(scenario_path)
    rb = ReportBuilder(
        "second-subderivative",
        {"scenario": scenario_path, "tol": tol, "samples": samples},
        seed,
    )
    if sc.Y is None or sc.H is None:
        raise ConfigError("second-subderivative scenario needs 'Y' and 'H'")
    pair = g_subdiff_contains(sc.fn, sc.X, sc.Y)
    rb.check("subgradient-pair", pair is not None, computed=pair is not None, expected=True)
    if pair is None:
        return rb.build()
    critical = g_critical_cone_contains(pair, sc.H)
    rb.check("critical-cone", True, computed=critical, expected="membership verdict")
    sig = sigma_term(pair, sc.H)
    rb.check("sigma-term", True, computed=sig, expected="curvature term")
    closed = g_second_subderivative(pair, sc.H)
    rb.check("second-subderivative", True, computed=closed, expected="closed form")
    grid = QuotientGrid(ts=(1e-2,), samples=samples, radius_ratio=1.0, seed=seed)
    est = numeric_second_subderivative(lambda M: g_eval(sc.fn, M), sc.X, sc.Y, sc.H, grid).value
    if np.isfinite(closed):
        ok = np.isfinite(est) and abs(est - closed) <= max(0.05 * abs(closed), 0.05)
    else:
        ok = not np.isfinite(est)
    rb.check("oracle-agreement", ok, computed=est, expected=closed, tolerance="5%")
    if critical and pair.fn.theta.is_polyhedral:
        z = minimizing_parabolic_offset(pair, sc.H)
        What = witness_direction(pair, sc.H, z)
        certificate = g_parabolic_subderivative(sc.fn, sc.X, sc.H, What) - float(np.tensordot(pair.Y, What))
        rb.check(
            "witness-certificate",
            abs(certificate - closed) <= 1e-5,
            computed=certificate,
            expected=closed,
            tolerance=1e-5,
        )
    else:
        rb.check("witness-certificate", None, computed="not applicable off the critical cone")
    return rb.build()


# ---------------------------------------------------------------------------
# check-optimality


def cmd_check_optimality(scenario_path: str, seed: int, trials: int) -> dict:
    sc = load_scenario(scenario_path)
    rb = ReportBuilder("check-optimality", {"scenario": scenario_path, "trials": trials}, seed)
    if sc.phi is None:
        raise ConfigError("check-optimality scenario needs 'phi'")
    pair = stationarity_check(sc.phi, sc.fn, sc.X)
    rb.check("stationary", pair is not None, computed=pair is not None, expected=True)
    if pair is None:
        return rb.build()
    cfg = SamplerConfig(count=max(50, trials // 50), seed=seed)
    nec = necessary_condition_scan(sc.phi, pair, cfg)
    rb.check(
        "necessary-condition",
        nec.holds,
        computed={"min": nec.min_value, "samples": nec.samples, "vacuous": nec.vacuous},
        expected=">= 0 over sampled critical directions",
    )
    suf = sufficient_condition_scan(sc.phi, pair, cfg)
    rb.check(
        "sufficient-condition",
        suf.holds,
        computed={"min": suf.min_value, "samples": suf.samples, "vacuous": suf.vacuous},
        expected=">= margin over unit critical directions",
    )
    growth = quadratic_growth_probe(sc.phi, sc.fn, sc.X, radius=1e-2, trials=trials, seed=seed)
    rb.check("growth-violations", growth.violations == 0, computed=growth.violations, expected=0)
    rb.check("growth-modulus", True, computed=growth.l_hat, expected="empirical modulus")
    return rb.build()


# ---------------------------------------------------------------------------
# paper-examples


def _fixture_psd_rejection(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("pos-orthant")
    X = np.diag([1.0, 0.0, 0.0])
    Y = np.diag([0.0, 0.0, -1.0])
    H = np.array([[1.0, 0.0, 0.0], [0.0, 0.5, -0.5], [0.0, -0.5, 0.0]])
    pair = g_subdiff_contains(fn, X, Y)
    rb.check("psd-rejection.pair", pair is not None, computed=pair is not None, expected=True)
    if pair is None:
        return
    verdict = g_critical_cone_contains(pair, H)
    rb.check("psd-rejection.critical", verdict is False, computed=verdict, expected=False)
    explicit = psd_critical_cone_explicit(pair, H)
    rb.check("psd-rejection.explicit", explicit is False, computed=explicit, expected=False)
    gap = fan_gap(np.diag(pair.lam_y[1:]), H[1:, 1:]).gap
    target = (np.sqrt(5.0) - 1.0) / 4.0
    rb.check(
        "psd-rejection.fan-gap",
        abs(gap - target) <= 1e-9,
        computed=gap,
        expected=target,
        tolerance=1e-9,
    )


def _fixture_psd_star(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("pos-orthant")
    X = np.diag([1.0, 0.0, 0.0])
    Y = np.diag([0.0, 0.0, -1.0])
    H = np.array([[0.4, -1.2, 0.8], [-1.2, 0.7, 0.0], [0.8, 0.0, 0.0]])
    pair = g_subdiff_contains(fn, X, Y)
    ok = pair is not None and g_critical_cone_contains(pair, H) and psd_critical_cone_explicit(pair, H)
    rb.check("psd-star.critical", ok, computed=ok, expected=True)
    zero_ok = pair is not None and g_critical_cone_contains(pair, np.zeros((3, 3)))
    rb.check("psd-star.zero", zero_ok, computed=zero_ok, expected=True)


def _fixture_nsd_tangent(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("neg-orthant")
    X = np.diag([0.0, -1.0])
    inside = np.array([[-1.0, 2.0], [2.0, 5.0]])
    outside = np.array([[0.5, 0.0], [0.0, 0.0]])
    v_in = spectral_tangent_contains(fn, X, inside)
    rb.check("nsd-tangent.inside", v_in, computed=v_in, expected=True)
    v_out = spectral_tangent_contains(fn, X, outside)
    rb.check("nsd-tangent.outside", not v_out, computed=v_out, expected=False)


def _fixture_nsd_second_tangent(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("neg-orthant")
    X = np.diag([0.0, -1.0])
    H = np.array([[0.0, 1.0], [1.0, 0.0]])
    # The kernel-block curvature of the parabolic derivative is
    # 2[H (0I - X)^+ H]_11 = +2, so membership requires W_11 <= -2.
    W_in = np.diag([-3.0, 0.0])
    W_out = np.diag([5.0, 0.0])
    d2_in = lambda_parabolic(X, H, W_in)[0]
    rb.check(
        "nsd-second-tangent.inside",
        spectral_second_tangent_contains(fn, X, H, W_in) and abs(d2_in + 1.0) <= 1e-9,
        computed=d2_in,
        expected=-1.0,
        tolerance=1e-9,
    )
    d2_out = lambda_parabolic(X, H, W_out)[0]
    rb.check(
        "nsd-second-tangent.outside",
        (not spectral_second_tangent_contains(fn, X, H, W_out)) and abs(d2_out - 7.0) <= 1e-9,
        computed=d2_out,
        expected=7.0,
        tolerance=1e-9,
    )
    v_zero = spectral_second_tangent_contains(fn, X, np.zeros((2, 2)), np.zeros((2, 2)))
    rb.check("nsd-second-tangent.zero", v_zero, computed=v_zero, expected=True)


def _fixture_spectahedron_tangent(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("spectahedron:1")
    X = np.diag([1.0, 0.0])
    H = np.array([[-1.0, 0.3], [0.3, 1.0]])
    v_in = spectral_tangent_contains(fn, X, H)
    rb.check("spectahedron-tangent.inside", v_in, computed=v_in, expected=True)
    H_bad = np.array([[0.5, 0.0], [0.0, 1.0]])
    v_out = spectral_tangent_contains(fn, X, H_bad)
    rb.check("spectahedron-tangent.outside", not v_out, computed=v_out, expected=False)


def _fixture_lambda_max_d2(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("max")
    X = np.diag([2.0, 0.0])
    Y = np.diag([1.0, 0.0])
    H = np.array([[0.0, 1.0], [1.0, 0.0]])
    pair = g_subdiff_contains(fn, X, Y)
    closed = g_second_subderivative(pair, H)
    rb.check("lambda-max-d2.closed", abs(closed - 1.0) <= 1e-9, computed=closed, expected=1.0, tolerance=1e-9)
    grid = QuotientGrid(ts=(1e-2,), samples=10_000, radius_ratio=1.0, seed=seed)
    est = numeric_second_subderivative(lambda M: g_eval(fn, M), X, Y, H, grid).value
    rb.check("lambda-max-d2.oracle", abs(est - 1.0) <= 0.05, computed=est, expected=1.0, tolerance="5%")


def _fixture_nsd_d2(rb: ReportBuilder, seed: int):
    fn = SpectralFunction.by_name("neg-orthant")
    X = np.diag([0.0, -1.0])
    Y = np.diag([2.0, 0.0])
    H = np.array([[0.0, 1.0], [1.0, 0.0]])
    pair = g_subdiff_contains(fn, X, Y)
    closed = g_second_subderivative(pair, H)
    rb.check("nsd-d2.closed", abs(closed - 4.0) <= 1e-9, computed=closed, expected=4.0, tolerance=1e-9)
    grid = QuotientGrid(ts=(1e-2,), samples=10_000, radius_ratio=1.0, seed=seed)
    est = numeric_second_subderivative(lambda M: g_eval(fn, M), X, Y, H, grid).value
    rb.check("nsd-d2.oracle", abs(est - 4.0) <= 0.2, computed=est, expected=4.0, tolerance="5%")


FIXTURES = {
    "psd-critical-rejection": _fixture_psd_rejection,
    "psd-critical-star": _fixture_psd_star,
    "nsd-tangent": _fixture_nsd_tangent,
    "nsd-second-tangent": _fixture_nsd_second_tangent,
    "spectahedron-tangent": _fixture_spectahedron_tangent,
    "lambda-max-second-subderivative": _fixture_lambda_max_d2,
    "nsd-second-subderivative": _fixture_nsd_d2,
}


def cmd_paper_examples(seed: int, only: Optional[str]) -> dict:
    rb = ReportBuilder("paper-examples", {"fixture": only}, seed)
    if only is not None:
        if only not in FIXTURES:
            raise ConfigError(f"unknown fixture {only!r}; use --list to see the names")
        FIXTURES[only](rb, seed)
        return rb.build()
    for fn in FIXTURES.values():
        fn(rb, seed)
    return rb.build()


# ---------------------------------------------------------------------------
# entry point


def _base_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help=f"PRNG seed (default: ${ENV_SEED} or 0)")
    p.add_argument("--json", type=str, default=None, help="write the JSON report to this path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specvaran", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-expansions", help="eigenvalue expansion orders on random instances")
    _base_flags(p)
    p.add_argument("--n", type=str, default=None, help="comma-separated dimensions (default 2..6)")
    p.add_argument("--trials", type=int, default=5, help="instances per (dimension, pattern)")
    p.add_argument("--t-grid", type=str, default=None, help="comma-separated decreasing t values")
    p.add_argument("--inject-fault", type=str, default=None, choices=FAULT_NAMES)

    p = sub.add_parser("verify-chain-rules", help="closed forms vs sampling oracles across built-ins")
    _base_flags(p)
    p.add_argument("--trials", type=int, default=24, help="cases per symmetric function")
    p.add_argument("--tol", type=float, default=1e-3, help="relative agreement tolerance floor")
    p.add_argument("--inject-fault", type=str, default=None, choices=FAULT_NAMES)

    p = sub.add_parser("second-subderivative", help="second-order analysis of a scenario")
    _base_flags(p)
    p.add_argument("--scenario", type=str, required=True)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--trials", type=int, default=10_000, dest="samples", help="oracle samples")

    p = sub.add_parser("check-optimality", help="optimality battery for a scenario")
    _base_flags(p)
    p.add_argument("--scenario", type=str, required=True)
    p.add_argument("--trials", type=int, default=10_000, help="growth-probe trials")

    p = sub.add_parser("paper-examples", help="fixed regression fixtures")
    _base_flags(p)
    p.add_argument("fixture", nargs="?", default=None, help="run a single fixture by name")
    p.add_argument("--list", action="store_true", help="print fixture names and exit")
    return ap


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"bad {ENV_SEED}={env!r}") from exc
    return 0


def _emit(report: dict, json_path: Optional[str]) -> int:
    for r in report["records"]:
        print(f"{r['status'].upper():4s} {r['name']}: computed={r['computed']} expected={r['expected']}")
    s = report["summary"]
    print(f"summary: {s['pass']} pass, {s['fail']} fail, {s['skip']} skip")
    if json_path:
        with open(json_path, "wb") as fh:
            fh.write(report_body(report, include_runtime=True))
    return 0 if s["fail"] == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        seed = _resolve_seed(args)
        if args.command == "verify-expansions":
            dims = _parse_dims(args.n)
            t_grid = _parse_t_grid(args.t_grid, (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6))
            report = cmd_verify_expansions(seed, dims, args.trials, t_grid, args.inject_fault)
        elif args.command == "verify-chain-rules":
            report = cmd_verify_chain_rules(seed, args.trials, args.tol, args.inject_fault)
        elif args.command == "second-subderivative":
            report = cmd_second_subderivative(args.scenario, seed, args.tol, args.samples)
        elif args.command == "check-optimality":
            report = cmd_check_optimality(args.scenario, seed, args.trials)
        elif args.command == "paper-examples":
            if args.list:
                for name in FIXTURES:
                    print(name)
                return 0
            report = cmd_paper_examples(seed, args.fixture)
        else:  # pragma: no cover
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpecvaranError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _emit(report, args.json)


if __name__ == "__main__":
    sys.exit(main())
