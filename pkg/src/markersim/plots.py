"""Render figures next to experiment CSVs.

Each experiment kind has one standard figure; the CLI calls plot_rows after
writing the CSV unless plotting is disabled.  Uses the Agg backend so runs
stay headless.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLES = {
    "SMC1": dict(color="tab:blue", marker="o"),
    "HMC1": dict(color="tab:red", marker="s"),
    "SMC2": dict(color="tab:green", marker="^"),
    "HMC2": dict(color="tab:purple", marker="v"),
}


def _style(name: str, i: int) -> dict:
    if name in _STYLES:
        return dict(_STYLES[name])
    markers = "oDsv^<>ph"
    return dict(color=f"C{i % 10}", marker=markers[i % len(markers)])


def _grouped(rows, header, key_cols):
    cols = header.split(",")
    idx = {c: i for i, c in enumerate(cols)}
    groups = {}
    for row in rows:
        key = tuple(row[idx[c]] for c in key_cols)
        groups.setdefault(key, []).append(row)
    return groups, idx


def plot_rate_sweep(rows, header, out_png: str) -> None:
    groups, idx = _grouped(rows, header, ("code",))
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for i, (key, grp) in enumerate(groups.items()):
        grp = sorted(grp, key=lambda r: r[idx["Np"]])
        x = [r[idx["Np"]] for r in grp]
        y = [r[idx["Ra"]] for r in grp]
        e = [r[idx["stderr"]] for r in grp]
        ax.errorbar(x, y, yerr=e, label=key[0], **_style(key[0], i))
    ax.set_xlabel("marker period $N_p$")
    ax.set_ylabel("achievable rate $R_a$")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def plot_ber(rows, header, out_png: str) -> None:
    groups, idx = _grouped(rows, header, ("code", "schedule"))
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for i, (key, grp) in enumerate(groups.items()):
        grp = sorted(grp, key=lambda r: r[idx["pd"]])
        x = [r[idx["pd"]] for r in grp]
        y = [r[idx["ber"]] for r in grp]
        lo = [max(r[idx["ber"]] - r[idx["ci_lo"]], 0.0) for r in grp]
        hi = [max(r[idx["ci_hi"]] - r[idx["ber"]], 0.0) for r in grp]
        st = _style(key[0], i)
        if key[1] != "5x4":
            st["linestyle"] = "--"
        ax.errorbar(x, y, yerr=[lo, hi], label=f"{key[0]} {key[1]}", **st)
    ax.set_yscale("log")
    ax.set_xlabel("deletion probability $p_d$")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def plot_ser(rows, header, out_png: str) -> None:
    groups, idx = _grouped(rows, header, ("code",))
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for i, (key, grp) in enumerate(groups.items()):
        grp = sorted(grp, key=lambda r: r[idx["pr"]])
        x = [r[idx["pr"]] for r in grp]
        y = [r[idx["ser"]] for r in grp]
        lo = [max(r[idx["ser"]] - r[idx["ci_lo"]], 0.0) for r in grp]
        hi = [max(r[idx["ci_hi"]] - r[idx["ser"]], 0.0) for r in grp]
        ax.errorbar(x, y, yerr=[lo, hi], label=key[0], **_style(key[0], i))
    ax.set_yscale("log")
    ax.set_xlabel("total mutation rate $p_r$")
    ax.set_ylabel("SER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def plot_mi_dump(rows, header, out_png: str) -> None:
    a0 = [r[1] for r in rows if r[0] == 0]
    a1 = [r[1] for r in rows if r[0] == 1]
    fig, ax = plt.subplots(figsize=(6, 4.2))
    ax.hist(a0, bins=100, alpha=0.6, density=True, label="$u=0$")
    ax.hist(a1, bins=100, alpha=0.6, density=True, label="$u=1$")
    ax.set_xlabel("LLR")
    ax.set_ylabel("density")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


_PLOTTERS = {
    "rate-sweep": plot_rate_sweep,
    "ber": plot_ber,
    "ser": plot_ser,
    "mi-dump": plot_mi_dump,
}


def plot_rows(kind: str, rows, header: str, csv_path: str) -> str:
    """Render the standard figure for an experiment next to its CSV."""
    out_png = os.path.splitext(csv_path)[0] + ".png"
    _PLOTTERS[kind](rows, header, out_png)
    return out_png
