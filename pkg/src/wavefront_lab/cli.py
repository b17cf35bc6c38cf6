"""Command-line entry points.

Commands: profile, threshold, aux, semiwave, pde, verify, sweep.  Outputs
are deterministic CSV/JSON files plus optional static SVG plots; a summary
JSON object is printed to stdout.  Exit codes: 0 success (profile: a front
was found; verify: all checks passed), 2 failed connection or failed
checks, 3 bisection diagnostics, 1 anything else.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import io as wio
from .pde import FrontTruncationError, run_to_front
from .phaseplane import integrate_z
from .profile import integrate_profile
from .rates import speed_lower_bound, speed_upper_bound
from .semiwave import solve_left_semiwavefront
from .threshold import AuxReaction, find_aux_threshold, find_threshold_bracket, solve_aux
from .types import BisectionError, DomainError, FrontKind, Params, ToleranceSet
from .verify import verify_profile, profile_integrals

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_FRONT = 2
EXIT_DIAGNOSTIC = 3


@dataclass
class RunConfig:
    command: str
    D: float = 1.0
    c: float = 1.0
    eta0: float = 1e-6
    xi_max: float | None = None
    tol: float = 1e-3
    out: str | None = None
    format: str = "csv"
    plot: bool = False
    domain_length: float = 200.0
    t_max: float = 50.0
    cells: int = 4096
    d_list: list = field(default_factory=list)
    threads: int | None = None
    input_path: str | None = None

    def params(self) -> Params:
        return Params(D=self.D, c=self.c, tol=ToleranceSet())

    def out_base(self) -> Path:
        return Path(self.out if self.out else self.command)


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _apply_config_file(path: str, ns: argparse.Namespace, parser) -> None:
    """Apply `key = value` lines as defaults (explicit flags win)."""
    defaults = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            defaults[key.replace("-", "_")] = value
    for key, value in defaults.items():
        if not hasattr(ns, key):
            raise DomainError(f"config key '{key}' does not match any option")
        current = getattr(ns, key)
        default = parser.get_default(key)
        if current == default:  # not explicitly set on the command line
            if isinstance(default, bool):
                setattr(ns, key, value.lower() in ("1", "true", "yes", "on"))
            elif key == "d_list":
                setattr(ns, key, value)
            elif isinstance(default, int) and default is not None:
                setattr(ns, key, int(value))
            else:
                setattr(ns, key, float(value) if _is_number(value) else value)


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def cmd_profile(cfg: RunConfig) -> int:
    params = cfg.params()
    profile = integrate_profile(params, eta0=cfg.eta0, xi_max=cfg.xi_max)
    report = verify_profile(profile, params)
    integrals = (
        profile_integrals(profile, params)
        if profile.classification.is_front() else None
    )
    sidecar = wio.profile_sidecar(profile, params, report, integrals)

    base = cfg.out_base()
    wio.ensure_parent(base.with_suffix(".json"))
    if cfg.format == "csv":
        wio.write_profile_csv(profile, base.with_suffix(".csv"))
        wio.write_json(base.with_suffix(".json"), sidecar)
    else:
        payload = dict(sidecar)
        payload["samples_data"] = {
            "xi": profile.xi.tolist(),
            "eta": profile.eta.tolist(),
            "eta_prime": profile.eta_prime.tolist(),
            "beta": profile.beta.tolist(),
            "beta_prime": profile.beta_prime.tolist(),
            "flux": profile.flux.tolist(),
        }
        wio.write_json(base.with_suffix(".json"), payload)
    if cfg.plot:
        from .plots import profile_svg

        profile_svg(profile, base.with_suffix(".svg"))

    _print_json(sidecar)
    if profile.classification.kind is FrontKind.FAILED:
        return EXIT_NO_FRONT
    return EXIT_OK


def _threshold_payload(D: float, tol: float) -> dict:
    gspec = AuxReaction(D)
    sigma_star, aux_lo, _ = find_aux_threshold(gspec, tol=min(tol, 1e-4))
    bracket = find_threshold_bracket(D, tol=tol, sigma_star=sigma_star)
    return {
        "D": D,
        "c_lo": bracket.c_lo,
        "c_hi": bracket.c_hi,
        "sigma_star": sigma_star,
        "lower_bound": speed_lower_bound(D),
        "upper_bound": speed_upper_bound(D),
        "iterations": bracket.iterations,
        "witness_lo": bracket.witness_lo.kind.value,
        "witness_hi": bracket.witness_hi.kind.value,
        "threshold_below_resolution": bracket.witness_lo.is_front(),
        "aux_slope_below": aux_lo.slope_at_zero,
    }


def _check_ordering(payload: dict, tol: float) -> bool:
    eps = max(1e-9, tol * 1e-3)
    return (
        payload["lower_bound"] <= payload["c_lo"] + eps
        and payload["c_lo"] <= payload["c_hi"]
        and payload["c_hi"] <= payload["sigma_star"] + eps
        and payload["sigma_star"] <= payload["upper_bound"] + eps
    )


def cmd_threshold(cfg: RunConfig) -> int:
    payload = _threshold_payload(cfg.D, cfg.tol)
    _print_json(payload)
    if cfg.out:
        base = cfg.out_base()
        wio.ensure_parent(base.with_suffix(".json"))
        wio.write_json(base.with_suffix(".json"), payload)
    if cfg.plot:
        from .plots import phase_svg

        base = cfg.out_base()
        path = integrate_z(Params(D=cfg.D, c=payload["c_hi"]))
        phase_svg(path, base.with_suffix(".svg"))
    if not _check_ordering(payload, cfg.tol):
        print("threshold ordering violated", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def cmd_aux(cfg: RunConfig) -> int:
    gspec = AuxReaction(cfg.D)
    sigma_star, aux_lo, aux_hi = find_aux_threshold(gspec, tol=min(cfg.tol, 1e-4))
    above = solve_aux(sigma_star + 0.5, gspec)
    payload = {
        "D": cfg.D,
        "sigma_star": sigma_star,
        "upper_bound": speed_upper_bound(cfg.D),
        "slope_below": aux_lo.slope_at_zero,
        "slope_above": above.slope_at_zero,
        "w_at_zero_below": aux_lo.w_at_zero,
    }
    _print_json(payload)
    if cfg.out:
        base = cfg.out_base()
        wio.ensure_parent(base.with_suffix(".json"))
        wio.write_aux_csv(base.with_suffix(".csv"), aux_hi)
        wio.write_json(base.with_suffix(".json"), payload)
    return EXIT_OK


def cmd_semiwave(cfg: RunConfig) -> int:
    params = cfg.params()
    res = solve_left_semiwavefront(
        params, eta0=cfg.eta0, tol=max(cfg.tol, 1e-10)
    )
    payload = {
        "D": cfg.D,
        "c": cfg.c,
        "eta0": cfg.eta0,
        "iterations": res.iterations,
        "beta0": float(res.beta[-1]),
        "kappa": res.kappa,
        "final_residual": res.residuals[-1],
    }
    _print_json(payload)
    if cfg.out:
        base = cfg.out_base()
        wio.ensure_parent(base.with_suffix(".json"))
        wio.write_semiwave_csv(base.with_suffix(".csv"), res)
        wio.write_json(base.with_suffix(".json"), payload)
    return EXIT_OK


def cmd_pde(cfg: RunConfig) -> int:
    params = Params(D=cfg.D, c=1.0, tol=ToleranceSet())
    snaps, est = run_to_front(
        params,
        domain_length=cfg.domain_length,
        t_max=cfg.t_max,
        n_cells=cfg.cells,
    )
    payload = {"D": cfg.D, **est.as_dict()}
    _print_json(payload)
    if cfg.out:
        base = cfg.out_base()
        wio.ensure_parent(base.with_suffix(".json"))
        wio.write_pde_frames_csv(base.with_suffix(".csv"), snaps)
        wio.write_json(base.with_suffix(".json"), payload)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.input_path:
        raise DomainError("verify requires --in PROFILE.csv")
    profile = wio.read_profile_csv(cfg.input_path)
    sidecar_path = Path(cfg.input_path).with_suffix(".json")
    if sidecar_path.exists():
        sidecar = wio.read_json(sidecar_path)
        tau = sidecar.get("tau")
        profile.classification = type(profile.classification)(
            kind=FrontKind(sidecar["classification"]),
            limit_slope=sidecar.get("limit_slope", 0.0),
            limit_flux=sidecar.get("limit_flux", 0.0),
        )
        profile.tau = tau if tau is not None else math.inf
    params = cfg.params()
    report = verify_profile(profile, params)
    _print_json(report.as_dict())
    return EXIT_OK if report.overall else EXIT_NO_FRONT


def _sweep_one(D: float, tol: float) -> dict:
    try:
        row = _threshold_payload(D, tol)
        row["status"] = "ok"
        return row
    except BisectionError as exc:
        return {"D": D, "status": f"diagnostic: {exc}"}
    except Exception as exc:  # noqa: BLE001 - per-row fault isolation
        return {"D": D, "status": f"error: {exc}"}


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.d_list:
        raise DomainError("sweep requires a nonempty --D-list")
    seen = []
    for D in cfg.d_list:
        if D in seen:
            print(f"warning: duplicate D={D} ignored", file=sys.stderr)
        else:
            seen.append(D)
    ds = sorted(seen)

    env_cap = os.environ.get("WAVEFRONT_LAB_THREADS")
    workers = cfg.threads or min(len(ds), os.cpu_count() or 1)
    if env_cap:
        workers = max(1, min(workers, int(env_cap)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda D: _sweep_one(D, cfg.tol), ds))

    base = cfg.out_base()
    wio.ensure_parent(base.with_suffix(".csv"))
    wio.write_sweep_csv(base.with_suffix(".csv"), rows)
    if cfg.plot:
        from .plots import bracket_svg

        bracket_svg(rows, base.with_suffix(".svg"))
    _print_json({"rows": rows})
    return EXIT_OK if any(r.get("status") == "ok" for r in rows) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavefront-lab",
        description="Traveling wavefront laboratory for the degenerate "
        "nutrient-bacteria reaction-diffusion system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, c_flag=True):
        p.add_argument("--D", type=float, default=1.0, help="diffusion coefficient")
        if c_flag:
            p.add_argument("--c", type=float, default=1.0, help="wave speed")
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--out", type=str, default=None,
                       help="output basename (suffixes .csv/.json/.svg)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--plot", action="store_true")
        p.add_argument("--config", type=str, default=None,
                       help="key = value file supplying defaults")

    p = sub.add_parser("profile", help="integrate and classify one wavefront")
    common(p)
    p.add_argument("--eta0", type=float, default=1e-6)
    p.add_argument("--xi-max", dest="xi_max", type=float, default=None)

    p = sub.add_parser("threshold", help="bracket the minimal front speed")
    common(p, c_flag=False)

    p = sub.add_parser("aux", help="solve the auxiliary comparison problem")
    common(p, c_flag=False)

    p = sub.add_parser("semiwave", help="left half-line fixed-point construction")
    common(p)
    p.add_argument("--eta0", type=float, default=0.4)

    p = sub.add_parser("pde", help="direct simulation of the full system")
    common(p, c_flag=False)
    p.add_argument("--domain-length", dest="domain_length", type=float, default=200.0)
    p.add_argument("--t-max", dest="t_max", type=float, default=50.0)
    p.add_argument("--cells", type=int, default=4096)

    p = sub.add_parser("verify", help="run the invariant suite on a profile CSV")
    common(p)
    p.add_argument("--in", dest="input_path", type=str, required=True)

    p = sub.add_parser("sweep", help="threshold brackets for several D")
    common(p, c_flag=False)
    p.add_argument("--D-list", dest="d_list", type=str, default="",
                   help="comma-separated diffusion coefficients")
    p.add_argument("--threads", type=int, default=None)

    return parser


_COMMANDS = {
    "profile": cmd_profile,
    "threshold": cmd_threshold,
    "aux": cmd_aux,
    "semiwave": cmd_semiwave,
    "pde": cmd_pde,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if getattr(ns, "config", None):
            _apply_config_file(ns.config, ns, parser)
        fields = {k: v for k, v in vars(ns).items() if k != "config"}
        if "d_list" in fields and isinstance(fields["d_list"], str):
            fields["d_list"] = [
                float(tok) for tok in fields["d_list"].split(",") if tok.strip()
            ]
        cfg = RunConfig(**fields)
        return _COMMANDS[cfg.command](cfg)
    except BisectionError as exc:
        print(f"diagnostic: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except FrontTruncationError as exc:
        print(f"truncated: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DomainError, ValueError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
