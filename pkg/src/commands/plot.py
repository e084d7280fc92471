"""`ctc-detector plot`: render a sweep CSV as a deterministic SVG."""

import logging
import sys
from argparse import Namespace
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from src.config import PLOT_STYLE  # noqa: E402
from src.data_sources.sweep_csv import read_sweep_table  # noqa: E402
from src.detector_schema import SweepTable  # noqa: E402

logger = logging.getLogger(__name__)


def render_svg(table: SweepTable, path: str, mode: Optional[str] = None) -> Path:
    """Draw P_TM and the three baselines against the swept parameter.

    A single-row table is drawn with markers so the point stays visible.
    """
    mode = mode or table.mode
    marker = "o" if len(table.rows) == 1 else None
    swept = table.column("swept")

    with plt.rc_context({"svg.hashsalt": PLOT_STYLE["hashsalt"]}):
        fig, ax = plt.subplots(figsize=PLOT_STYLE["figsize"])
        for column, style in PLOT_STYLE["series"].items():
            ax.plot(
                swept,
                table.column(column),
                label=style["label"],
                color=style["color"],
                marker=marker,
            )
        ax.set_xlabel(PLOT_STYLE["axis_labels"].get(mode, "swept parameter"))
        ax.set_ylabel(r"$\mathcal{P} / \lambda^2$")
        ax.legend(frameon=False)
        fig.tight_layout()
        target = Path(path)
        fig.savefig(target, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info("wrote %s", target)
    return target


def run(args: Namespace) -> int:
    # Read first: a bad or empty table must not leave an output file behind
    table = read_sweep_table(args.csv, mode=args.mode)
    output = args.out or str(Path(args.csv).with_suffix(".svg"))
    render_svg(table, output, args.mode)
    sys.stdout.write(f"{output}\n")
    return 0
