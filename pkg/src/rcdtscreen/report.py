"""Matplotlib figure rendering for evaluation artifacts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_STYLES = {"real": "--", "sim": "-.", "fused": "-"}


def plot_roc_curves(results: dict, path) -> None:
    """Render one ROC figure with all arms overlaid, AUCs in the legend."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for arm, res in results.items():
        fpr = [p[0] for p in res.curve]
        tpr = [p[1] for p in res.curve]
        ax.plot(fpr, tpr, _STYLES.get(arm, "-"),
                label=f"{arm} (AUC {res.auc:.3f})")
    ax.plot([0, 1], [0, 1], color="0.7", lw=0.8)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
