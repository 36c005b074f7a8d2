"""Figures for single reconstructions and rate studies.

Everything renders off-screen with the Agg backend; the output format is
taken from the file suffix (SVG by default in the CLI).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

METHOD_STYLE = {
    "pc": dict(color="tab:red", marker="s", label="piecewise constant"),
    "pc-smooth": dict(color="tab:blue", marker="o", label="smoothed piecewise constant"),
    "cubic": dict(color="black", marker="^", label="cubic splines"),
}

RC = {
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "svg.fonttype": "none",
    "svg.hashsalt": "lavrentiev",
}


def plot_reconstruction(run, path, figsize=(5.0, 3.5)):
    """Overlay the exact solution and the reconstruction of one run."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize)
        t = run.x0.nodes
        ax.plot(t, run.x0.values, color="0.5", ls="--", label="exact")
        style = METHOD_STYLE.get(run.method, {})
        ax.plot(t, run.reconstruction.values, color=style.get("color", "tab:red"),
                label=style.get("label", run.method))
        ax.set_xlabel("t")
        ax.set_ylabel("x(t)")
        ax.set_title(f"{run.problem}, $\\delta$={run.delta:g}, $\\alpha$={run.alpha:.3g}, m={run.m}")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)


def plot_rate(result, path, figsize=(6.0, 3.8)):
    """Log-log rate plot: one polyline of -ln(error) over -ln(delta) per method."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize)
        for method in dict.fromkeys(r.method for r in result.rows):
            rows = [r for r in result.rows if r.method == method]
            x = -np.log([r.delta for r in rows])
            y = -np.log([r.l2_error for r in rows])
            style = dict(METHOD_STYLE.get(method, {"label": method}))
            slope = result.fitted_slopes.get(method)
            if slope is not None:
                style["label"] = f"{style['label']} (slope {slope:.2f})"
            ax.plot(x, y, **style)
        ax.set_xlabel(r"$-\ln\,\delta$")
        ax.set_ylabel(r"$-\ln\,$error")
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
