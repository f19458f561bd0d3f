"""PNG figures for CLI reports.  matplotlib is an optional extra, imported lazily."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Sequence


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise OSError("--plot needs matplotlib (pip install 'artifact[plot]')") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def figure_path(report_path) -> Path:
    return Path(report_path).with_suffix(".png")


def plot_records(command: str, rows: Sequence[Dict[str, Any]], report_path, extra=None) -> Path:
    """Render the figure that belongs to ``command`` next to the report."""
    plt = _pyplot()
    out = figure_path(report_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    if command == "condition-scan":
        xs = sorted({r["x"] for r in rows})
        ys = sorted({r["y"] for r in rows})
        grid = [[0.0] * len(xs) for _ in ys]
        for r in rows:
            grid[ys.index(r["y"])][xs.index(r["x"])] = r["condition_value"]
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="alternating Z-sum")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    elif command == "zeros-locate" and extra is not None:
        ys, vals = extra
        ax.semilogy(ys, vals, lw=0.8)
        for r in rows:
            ax.axvline(r["y"], color="tab:red", lw=0.6, ls="--")
        ax.set_xlabel("y")
        ax.set_ylabel("|eta(1/2 + iy)|")
    elif command == "pringsheim-check" and extra is not None:
        sides, values = extra
        ax.plot(sides, values, marker="o")
        ax.set_xlabel("rectangle side")
        ax.set_ylabel("Re S_pp")
    else:
        numeric = [k for k, v in rows[0].items() if isinstance(v, float)]
        for key in numeric[:4]:
            ax.plot([r[key] for r in rows], marker="o", label=key)
        ax.legend()
        ax.set_xlabel("record")
    ax.set_title(command)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
