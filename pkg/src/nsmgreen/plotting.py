"""SVG figures rendered with matplotlib (Agg backend) and matching plot scripts."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "nsmgreen"

SCRIPT = '''"""Redraw {svg} from {csv}."""
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

with open({csv!r}) as fh:
    fh.readline()
    rows = list(csv.DictReader(fh))
x = [float(r[{x!r}]) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4))
for name in {ys!r}:
    y = [abs(float(r[name])) if {absy!r} else float(r[name]) for r in rows]
    ax.plot(x, y, {style!r}, label=name)
ax.set_xscale({xscale!r})
ax.set_yscale({yscale!r})
ax.set_xlabel({xlabel!r})
ax.set_title({title!r})
ax.legend()
fig.tight_layout()
fig.savefig({svg!r}, metadata={{"Date": None}})
'''


def line_plot(csv_path, x, ys, svg_path, title="", logx=False, logy=False, absy=False, style="-") -> list:
    """Plot columns ys of a CSV against column x; write the SVG and a script.

    Returns the two written paths.
    """
    csv_path, svg_path = Path(csv_path), Path(svg_path)
    with csv_path.open() as fh:
        fh.readline()
        header = fh.readline().rstrip("\n").split(",")
        data = np.genfromtxt(fh, delimiter=",", dtype=str)
    data = np.atleast_2d(data)
    col = {name: i for i, name in enumerate(header)}
    xv = data[:, col[x]].astype(float)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in ys:
        yv = data[:, col[name]].astype(float)
        ax.plot(xv, np.abs(yv) if absy else yv, style, label=name)
    ax.set_xscale("log" if logx else "linear")
    ax.set_yscale("log" if logy else "linear")
    ax.set_xlabel(x)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(svg_path, metadata={"Date": None})
    plt.close(fig)
    script = svg_path.with_suffix(".py")
    script.write_text(
        SCRIPT.format(
            svg=svg_path.name,
            csv=csv_path.name,
            x=x,
            ys=list(ys),
            absy=absy,
            style=style,
            xscale="log" if logx else "linear",
            yscale="log" if logy else "linear",
            xlabel=x,
            title=title,
        )
    )
    return [svg_path, script]
