"""Regenerate the regression fixtures under tests/fixtures/.

The fig4/fig8 fidelity curves and the fig9 sweeps have no tabulated
reference values, so the suite pins them against a committed baseline run.
Rerun after an intentional numerical change.
"""

from pathlib import Path

from fockladder.experiments import ExperimentConfig, run_fig

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for figure in ("fig4", "fig8", "fig9"):
        cfg = ExperimentConfig(figure=figure, out=str(FIXTURES / f"{figure}_baseline.csv"))
        paths, _ = run_fig(cfg)
        print("wrote", *paths)
    cfg = ExperimentConfig(figure="fig9", mode="ca", out=str(FIXTURES / "fig9_ca_baseline.csv"))
    print("wrote", *run_fig(cfg)[0])


if __name__ == "__main__":
    main()
