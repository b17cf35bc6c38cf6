"""Static SVG renderings of computed objects (profiles, phase paths, sweeps).

matplotlib is imported lazily so that headless library use never touches a
plotting backend; the SVG hash salt is pinned for reproducible output.
"""
from __future__ import annotations

__all__ = ["profile_svg", "phase_svg", "bracket_svg"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "wavefront-lab"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def profile_svg(profile, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    ax.plot(profile.xi, profile.eta, label="nutrient", color="tab:orange")
    ax.plot(profile.xi, profile.beta, label="bacteria", color="tab:blue")
    ax.set_xlabel(r"$\xi$")
    ax.set_title(f"wave profile ({profile.classification.kind.value})")
    ax.legend(loc="center right")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def phase_svg(phase, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    ax.plot(phase.beta, phase.flux, color="tab:green")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("flux")
    ax.set_title("phase path")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def bracket_svg(rows, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    ok = [r for r in rows if r.get("status", "ok") == "ok"]
    D = [r["D"] for r in ok]
    ax.fill_between(D, [r["lower_bound"] for r in ok],
                    [r["upper_bound"] for r in ok],
                    alpha=0.15, color="tab:gray", label="analytic bounds")
    ax.plot(D, [r["c_lo"] for r in ok], "o-", ms=3, label="bracket low")
    ax.plot(D, [r["c_hi"] for r in ok], "s-", ms=3, label="bracket high")
    ax.plot(D, [r["sigma_star"] for r in ok], "^-", ms=3, label="aux threshold")
    ax.set_xlabel("D")
    ax.set_ylabel("speed")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
