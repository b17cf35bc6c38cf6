"""Bit-stable file formats for profiles, phase paths, aux solutions, reports.

CSV numbers are written as fixed 15-significant-digit scientific notation
with LF line endings; JSON uses Python's shortest round-trip float
representation with sorted keys.  Identical inputs therefore produce
byte-identical outputs on any platform.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .types import FrontClassification, FrontKind, Params, Profile

__all__ = [
    "format_csv_float",
    "write_json",
    "read_json",
    "write_profile_csv",
    "read_profile_csv",
    "profile_sidecar",
    "write_phase_csv",
    "write_aux_csv",
    "write_semiwave_csv",
    "write_sweep_csv",
    "write_pde_frames_csv",
]

PROFILE_HEADER = "xi,eta,eta_prime,beta,beta_prime,flux"


def format_csv_float(x: float) -> str:
    return f"{x:.14e}"


def _write_table(path, header: str, columns) -> None:
    rows = zip(*columns)
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(format_csv_float(v) for v in row) + "\n")


def write_json(path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_profile_csv(profile: Profile, path) -> None:
    _write_table(
        path,
        PROFILE_HEADER,
        (profile.xi, profile.eta, profile.eta_prime,
         profile.beta, profile.beta_prime, profile.flux),
    )


def read_profile_csv(path) -> Profile:
    """Rebuild a profile from its CSV; classification fields are recomputed
    placeholders (kind inferred from the trailing flux/beta behavior is the
    caller's business, e.g. via the JSON sidecar)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    tau = math.inf
    cls = FrontClassification(
        kind=FrontKind.CLASSICAL, limit_slope=0.0, limit_flux=0.0
    )
    return Profile(
        xi=np.atleast_1d(data["xi"]),
        eta=np.atleast_1d(data["eta"]),
        eta_prime=np.atleast_1d(data["eta_prime"]),
        beta=np.atleast_1d(data["beta"]),
        beta_prime=np.atleast_1d(data["beta_prime"]),
        flux=np.atleast_1d(data["flux"]),
        tau=tau,
        classification=cls,
    )


def profile_sidecar(
    profile: Profile, params: Params, report=None, integrals=None
) -> dict:
    payload = {
        "D": params.D,
        "c": params.c,
        "classification": profile.classification.kind.value,
        "limit_flux": profile.classification.limit_flux,
        "limit_slope": profile.classification.limit_slope,
        "tau": profile.tau if math.isfinite(profile.tau) else None,
        "eta_tau": profile.eta_at_tau(),
        "samples": len(profile),
    }
    if integrals is not None:
        payload["speed_integral"] = integrals["speed"]
    if report is not None:
        payload["checks"] = report.as_dict()["entries"]
        payload["checks_overall"] = report.overall
    return payload


def write_phase_csv(path, phase) -> None:
    _write_table(
        path,
        "beta,xi,eta,eta_prime,flux",
        (phase.beta, phase.xi, phase.eta, phase.eta_prime, phase.flux),
    )


def write_aux_csv(path, aux) -> None:
    _write_table(path, "beta,w", (aux.beta, aux.w))


def write_semiwave_csv(path, res) -> None:
    _write_table(
        path,
        PROFILE_HEADER,
        (res.xi, res.eta, res.eta_prime, res.beta, res.beta_prime, res.flux),
    )


def write_sweep_csv(path, rows: list[dict]) -> None:
    header = "D,c_lo,c_hi,sigma_star,lower_bound,upper_bound,status"
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            nums = [row.get(k) for k in
                    ("D", "c_lo", "c_hi", "sigma_star", "lower_bound", "upper_bound")]
            cells = [format_csv_float(v) if v is not None else "" for v in nums]
            cells.append(row.get("status", "ok"))
            fh.write(",".join(cells) + "\n")


def write_pde_frames_csv(path, snaps) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("time,x,n,b\n")
        for f in snaps:
            t = format_csv_float(f.time)
            for x, n, b in zip(f.x, f.n, f.b):
                fh.write(
                    f"{t},{format_csv_float(x)},{format_csv_float(n)},"
                    f"{format_csv_float(b)}\n"
                )


def ensure_parent(path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p
