"""Figure rendering for experiment reports.

Every report command that writes delimited output can also render a figure of
the same rows.  Figures are deterministic functions of the data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .logic import ExperimentResult


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(5.2, 3.4), dpi=150)
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    ax.grid(True, alpha=0.25, linewidth=0.5)
    return fig, ax


def experiment_figure(result: ExperimentResult, path: str, title: str,
                      ylabel: str = "estimated probability") -> None:
    """Estimates with their confidence bars against the vertex count."""
    fig, ax = _new_axes(title, "vertices", ylabel)
    xs = [r.n for r in result.rows]
    ys = [r.estimate for r in result.rows]
    lo = [r.estimate - r.ci_lo for r in result.rows]
    hi = [r.ci_hi - r.estimate for r in result.rows]
    ax.errorbar(xs, ys, yerr=[lo, hi], fmt="o-", capsize=3, markersize=4, linewidth=1)
    ax.axhline(result.limit, linestyle="--", linewidth=1, color="gray",
               label=f"limiting value {result.limit}")
    ax.set_xscale("log", base=2)
    ax.set_xticks(xs)
    ax.set_xticklabels([str(x) for x in xs])
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def fraction_figure(pairs: list[tuple[str, float]], path: str, title: str,
                    ylabel: str = "fraction") -> None:
    """A labelled bar per reported fraction."""
    fig, ax = _new_axes(title, "", ylabel)
    labels = [p[0] for p in pairs]
    values = [p[1] for p in pairs]
    ax.bar(range(len(values)), values, width=0.6)
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0, 1.05)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
