"""Command-line front end: ``twoloop <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 non-convergence, 4 non-finite result.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cft import Trivialization, classify_minimizer, criterion
from .errors import ConvergenceError, DomainError, NonFiniteError, ValidationError
from .loops import TwoLoopConfig, apply_moebius, random_moebius
from .potentials import blm_interaction_circles, grunsky, lpot_two, lpot_two_via_lk
from .uniformize import UniformizeOptions, annulus_uniformize
from .variation import BeltramiBump, variation_check

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_NONFINITE = 0, 2, 3, 4

COMMANDS = ("uniformize", "potential", "scan-tau", "grunsky", "criterion", "variation-check")


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple = ()
    degree: int = 1024
    tol: float = 1e-8
    grid: int = 64
    tau_range: tuple = (0.05, 5.0)
    out: Optional[str] = None
    seed: int = 0
    route: str = "both"
    mode: str = "circles"
    grunsky_n: int = 128
    moebius: int = 0
    bump: tuple = (0.0, 0.0, 0.1, 0.05)
    eps: float = 1e-3

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        for name in ("degree", "tol", "grid", "grunsky_n", "eps"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"--{name.replace('_', '-')} must be positive")
        if self.moebius < 0 or self.seed < 0:
            raise ValidationError("--moebius and --seed must be nonnegative")
        lo, hi = self.tau_range
        if not 0 < lo < hi:
            raise ValidationError(f"--range needs 0 < A < B, got {lo}:{hi}")

    @property
    def options(self):
        return UniformizeOptions(n_max=self.degree, tol=self.tol)


def _parse_range(text):
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"range must look like A:B, got {text!r}") from exc


def _parse_bump(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("bump must be x,y,radius,amplitude") from exc
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("bump must be x,y,radius,amplitude")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", type=int, default=1024, help="maximum boundary resolution")
    common.add_argument("--tol", type=float, default=1e-8, help="boundary residual tolerance")
    common.add_argument("--grid", type=int, default=64, help="tau scan points")
    common.add_argument("--range", type=_parse_range, default=(0.05, 5.0), dest="tau_range",
                        metavar="A:B", help="tau scan range")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="twoloop", description="Two-loop Loewner potential toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("uniformize", parents=[common], help="uniformize a two-loop configuration")
    s.add_argument("config")

    s = sub.add_parser("potential", parents=[common], help="two-loop potential report")
    s.add_argument("config")
    s.add_argument("--route", choices=("preschwarzian", "lk", "both"), default="both")
    s.add_argument("--grunsky-n", type=int, default=128)
    s.add_argument("--moebius", type=int, default=0,
                   help="also evaluate under this many seeded random Moebius maps")

    s = sub.add_parser("scan-tau", parents=[common], help="CSV scan over the modulus")
    s.add_argument("--mode", choices=("circles", "criterion"), default="circles")
    s.add_argument("--trivialization", default=None, help="trivialization JSON (criterion mode)")

    s = sub.add_parser("grunsky", parents=[common], help="multiple Grunsky equality check")
    s.add_argument("config")
    s.add_argument("--grunsky-n", type=int, default=128)

    s = sub.add_parser("criterion", parents=[common], help="classify circle-pair minimizers")
    s.add_argument("trivialization")

    s = sub.add_parser("variation-check", parents=[common], help="Schwarzian variational formula check")
    s.add_argument("config")
    s.add_argument("--bump", type=_parse_bump, default=(0.0, 0.0, 0.1, 0.05),
                   metavar="X,Y,R,A", help="bump center, radius and real amplitude")
    s.add_argument("--eps", type=float, default=1e-3)
    return p


def run_config_from_args(ns) -> RunConfig:
    inputs = tuple(v for v in (getattr(ns, "config", None), getattr(ns, "trivialization", None)) if v)
    return RunConfig(
        command=ns.command, inputs=inputs, degree=ns.degree, tol=ns.tol, grid=ns.grid,
        tau_range=tuple(ns.tau_range), out=ns.out, seed=ns.seed,
        route=getattr(ns, "route", "both"), mode=getattr(ns, "mode", "circles"),
        grunsky_n=getattr(ns, "grunsky_n", 128), moebius=getattr(ns, "moebius", 0),
        bump=tuple(getattr(ns, "bump", (0.0, 0.0, 0.1, 0.05))), eps=getattr(ns, "eps", 1e-3))


def _plain(obj):
    """Recursively convert numpy and complex values to JSON-native types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _check_finite(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, list):
        for v in obj:
            _check_finite(v)
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise NonFiniteError("result contains non-finite values")


def _json_text(obj):
    obj = _plain(obj)
    _check_finite(obj)
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if not all(math.isfinite(v) for v in row):
            raise NonFiniteError("scan produced non-finite values")
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def cmd_uniformize(rc: RunConfig):
    cfg = TwoLoopConfig.load(rc.inputs[0])
    return _json_text(annulus_uniformize(cfg, rc.options).to_json())


def cmd_potential(rc: RunConfig):
    cfg = TwoLoopConfig.load(rc.inputs[0])
    report = {"route": rc.route}
    total = None
    if rc.route in ("preschwarzian", "both"):
        b = lpot_two(cfg, rc.options)
        report["breakdown"] = b.to_json()
        total = b.total
    if rc.route in ("lk", "both"):
        report["lk_total"] = lpot_two_via_lk(cfg, rc.options)
    if rc.route == "both":
        report["route_difference"] = report["lk_total"] - total
    u = annulus_uniformize(cfg, rc.options)
    report["tau"] = u.tau
    report["boundary_residual"] = u.boundary_residual
    report["grunsky_gap"] = grunsky(u, rc.grunsky_n).gap
    if rc.moebius:
        rng = np.random.default_rng(rc.seed)
        route = (lambda c: lpot_two(c, rc.options).total) if total is not None else \
            (lambda c: lpot_two_via_lk(c, rc.options))
        base = total if total is not None else report["lk_total"]
        totals = [route(apply_moebius(random_moebius(rng, cfg), cfg)) for _ in range(rc.moebius)]
        report["moebius_totals"] = totals
        report["moebius_max_deviation"] = max(abs(t - base) for t in totals)
    return _json_text(report)


def _scan_taus(rc: RunConfig, include_one):
    taus = np.geomspace(*rc.tau_range, rc.grid)
    lo, hi = rc.tau_range
    if include_one and lo <= 1.0 <= hi and not np.any(taus == 1.0):
        taus = np.sort(np.append(taus, 1.0))
    return taus


def cmd_scan_tau(rc: RunConfig, trivialization: Optional[str] = None):
    if rc.mode == "circles":
        taus = _scan_taus(rc, include_one=True)
        return _csv_text(["tau", "value"], [(t, blm_interaction_circles(t)) for t in taus])
    if trivialization is None:
        raise ValidationError("criterion mode needs --trivialization")
    t = Trivialization.load(trivialization)
    taus = _scan_taus(rc, include_one=False)
    return _csv_text(["tau", "q", "log_g"], [(x, math.exp(-math.pi / x), criterion(t, x)) for x in taus])


def cmd_grunsky(rc: RunConfig):
    cfg = TwoLoopConfig.load(rc.inputs[0])
    u = annulus_uniformize(cfg, rc.options)
    return _json_text(dict(grunsky(u, rc.grunsky_n).to_json(), tau=u.tau))


def cmd_criterion(rc: RunConfig):
    t = Trivialization.load(rc.inputs[0])
    result = classify_minimizer(t, rc.tau_range, rc.grid)
    return _json_text(dict(result.to_json(), trivialization=t.to_json(), name=t.name))


def cmd_variation_check(rc: RunConfig):
    cfg = TwoLoopConfig.load(rc.inputs[0])
    x, y, r, a = rc.bump
    nu = BeltramiBump(complex(x, y), r, a)
    res = variation_check(cfg, nu, rc.eps, rc.options)
    return _json_text({"fd": res.fd, "rhs": res.rhs, "rel_err": res.rel_err, "side": res.side,
                       "eps": rc.eps, "bump": {"center": [x, y], "radius": r, "amplitude": a}})


def execute(rc: RunConfig, trivialization: Optional[str] = None) -> str:
    if rc.command == "uniformize":
        return cmd_uniformize(rc)
    if rc.command == "potential":
        return cmd_potential(rc)
    if rc.command == "scan-tau":
        return cmd_scan_tau(rc, trivialization)
    if rc.command == "grunsky":
        return cmd_grunsky(rc)
    if rc.command == "criterion":
        return cmd_criterion(rc)
    return cmd_variation_check(rc)


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rc = run_config_from_args(ns)
        text = execute(rc, getattr(ns, "trivialization", None) if ns.command == "scan-tau" else None)
    except (ValidationError, DomainError, OSError) as exc:
        print(f"twoloop: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"twoloop: did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (NonFiniteError, FloatingPointError) as exc:
        print(f"twoloop: non-finite result: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    if rc.out:
        with open(rc.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK
