"""Figure rendering for the report paths.

Every table the CLI writes gets a companion PNG: characteristic-function
curves per provenance, log-log refinement plots with the fitted slope, and
sample histograms with the analytic CF overlaid.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_cf_figure(path: str, tables, title: str):
    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(9, 3.5), sharex=True)
    for table in tables:
        style = {"analytic": "-", "operator": "--", "empirical": ":"}[table.provenance]
        ax_re.plot(table.xs, table.values.real, style, label=table.provenance)
        ax_im.plot(table.xs, table.values.imag, style, label=table.provenance)
    ax_re.set_xlabel("x")
    ax_im.set_xlabel("x")
    ax_re.set_ylabel("Re CF")
    ax_im.set_ylabel("Im CF")
    ax_re.legend(fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_convergence_figure(path: str, rows, title: str, slope: float | None = None):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    dts = [row["dt_max"] for row in rows]
    for key in rows[0]:
        if not key.startswith("err"):
            continue
        errs = [max(row[key], 1e-300) for row in rows]
        ax.loglog(dts, errs, "o-", label=key)
    ax.set_xlabel("max slot width")
    ax.set_ylabel("error")
    label = title if slope is None else f"{title} (slope {slope:.2f})"
    ax.set_title(label, fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sample_figure(path: str, samples, analytic_table, empirical_table, title: str):
    fig, (ax_hist, ax_cf) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_hist.hist(np.asarray(samples), bins=60, density=True, color="steelblue")
    ax_hist.set_xlabel("sample value")
    ax_hist.set_ylabel("density")
    ax_cf.plot(analytic_table.xs, analytic_table.values.real, "-", label="analytic Re")
    ax_cf.plot(empirical_table.xs, empirical_table.values.real, ":", label="empirical Re")
    ax_cf.plot(analytic_table.xs, analytic_table.values.imag, "-", alpha=0.5,
               label="analytic Im")
    ax_cf.plot(empirical_table.xs, empirical_table.values.imag, ":", alpha=0.5,
               label="empirical Im")
    ax_cf.set_xlabel("x")
    ax_cf.legend(fontsize=7)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
