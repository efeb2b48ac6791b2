"""Write every figure dataset (CSV + gnuplot stub) into an output directory.

Usage: python scripts/reproduce_figures.py [outdir]
"""

import sys
from pathlib import Path

from fockladder.experiments import FIGURES, ExperimentConfig, run_fig


def main(outdir: str = "results") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for figure in FIGURES:
        if figure == "custom":
            continue
        cfg = ExperimentConfig(figure=figure, out=str(out / f"{figure}.csv"), plot_script=True)
        paths, summary = run_fig(cfg)
        print(figure, *map(str, paths))
        if len(summary) > 1:
            print("   ", {k: v for k, v in summary.items() if k != "figure"})


if __name__ == "__main__":
    main(*sys.argv[1:])
