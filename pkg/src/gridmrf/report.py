"""Figure rendering for run reports.

Figures are derived from energy values and structural counts only — never
from wall times — so repeated runs produce identical images.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_energy_figure(entries, pixel_count, path):
    """Per-pixel energy versus iteration, one marker per completed round."""
    its = range(1, len(entries) + 1)
    values = [e.total / pixel_count for e in entries]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(its, values, marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy per pixel")
    ax.set_title("energy convergence")
    ax.grid(True, alpha=0.3)
    ax.set_xticks(list(its))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_bench_figure(rows, path):
    """Throughput by operator, annotated with comparisons per vertex."""
    fig, ax = plt.subplots(figsize=(6, 4))
    names = [r.operator for r in rows]
    vps = [r.vertices_per_second for r in rows]
    bars = ax.bar(names, vps)
    for bar, row in zip(bars, rows):
        ax.annotate(f"{row.per_vertex} cmp/vertex",
                    (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom", fontsize=8)
    ax.set_ylabel("vertices / second")
    ax.set_title("operator throughput")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
