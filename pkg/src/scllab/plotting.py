"""Figure rendering for simulation outputs (headless matplotlib)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_fer_curve(points, path, title: str | None = None) -> None:
    """Draw frame/bit error rates against SNR on a log axis and save the figure.

    ``points`` is a sequence with snr_db/fer/ber/ci_lo/ci_hi attributes.
    Zero-rate points cannot sit on a log axis and are dropped from their line.
    The output format follows the file extension (.svg, .png, ...).
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    snr = [p.snr_db for p in points]
    plotted = False
    for attr, style, label in (("fer", "o-", "FER"), ("ber", "s--", "BER")):
        xs = [s for s, p in zip(snr, points) if getattr(p, attr) > 0]
        ys = [getattr(p, attr) for p in points if getattr(p, attr) > 0]
        if xs:
            ax.semilogy(xs, ys, style, label=label)
            plotted = True
    lo = [max(p.ci_lo, 1e-12) for p in points if p.fer > 0]
    hi = [p.ci_hi for p in points if p.fer > 0]
    xs = [p.snr_db for p in points if p.fer > 0]
    if xs:
        ax.fill_between(xs, lo, hi, alpha=0.2, label="FER 95% CI")
    ax.set_xlabel("Eb/N0 [dB]")
    ax.set_ylabel("error rate")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    if plotted:
        ax.legend()
    else:
        ax.text(0.5, 0.5, "all error rates are zero", transform=ax.transAxes, ha="center")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
