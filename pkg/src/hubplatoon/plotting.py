import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIG_SIZE = (6.4, 3.0)


def _bar(ax, ys, ylabel, color="tab:blue"):
    xs = range(1, len(ys) + 1)
    ax.bar(xs, ys, width=0.8, color=color)
    ax.set_xlabel("truck (sorted by utility)")
    ax.set_ylabel(ylabel)
    ax.set_xlim(0.3, len(ys) + 0.7)
    ax.grid(axis="y", alpha=0.3)


def render_figures(rows, out_dir):
    """Write one PNG per reported series; ``rows`` must already be in plotting order."""
    from .report import SERIES

    written = []
    for name, (column, ylabel) in SERIES.items():
        if name == "fig8_platoon_min":
            continue
        fig, ax = plt.subplots(figsize=FIG_SIZE)
        if name == "fig8_travel_min":
            _bar(ax, [r.travel_min for r in rows], "time [min]", color="0.7")
            ax.bar(range(1, len(rows) + 1), [r.platoon_min for r in rows], width=0.8,
                   color="tab:blue")
            ax.legend(["total travel", "in platoon"], frameon=False)
            name = "fig8_travel_times"
        else:
            _bar(ax, [float(getattr(r, column)) for r in rows], ylabel)
        fig.tight_layout()
        path = out_dir / f"{name}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
