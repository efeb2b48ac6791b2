"""Figure sweeps, Q-factor root finding and run configurations."""

from __future__ import annotations

import configparser
import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .cavity import fig9_sweep, parallel_map
from .errors import ConfigError, NoSignChange
from .fock import LadderOp, LadderPipeline, apply_pipeline
from .observables import GridSpec, fidelity, moments, wigner_grid
from .states import make_coherent_mean, make_thermal

FIGURES = tuple(f"fig{i}" for i in range(1, 10)) + ("custom",)

COLUMNS = {
    "fig1": ("nbar", "Q_AC", "Q_CA"),
    "fig2": ("x", "y", "W_AC", "W_CA"),
    "fig3": ("nbar", "Q_AC", "Q_CA"),
    "fig4": ("k", "fidelity"),
    "fig5": ("alpha_sq", "Q_AC", "Q_CA"),
    "fig6": ("x", "y", "W_AC", "W_CA"),
    "fig7": ("alpha_sq", "Q_AC", "Q_CA"),
    "fig8": ("k", "fidelity"),
    "fig9": ("alpha_sq", "P1", "F1"),
    "custom": ("param", "mean", "variance", "Q"),
}


@dataclass(frozen=True)
class Sweep:
    """Parameter grid ``lo, lo + step, ..., <= hi``, or ``num`` log-spaced points."""

    lo: float
    hi: float
    step: float = 0.0
    num: int = 0
    log: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi < self.lo:
            raise ConfigError(f"bad range {self.lo}..{self.hi}")
        if self.log:
            if self.num < 1 or self.lo <= 0:
                raise ConfigError("log sweeps need num >= 1 and lo > 0")
        elif not self.step > 0:
            raise ConfigError(f"step must be > 0, got {self.step}")

    @classmethod
    def parse(cls, text: str) -> "Sweep":
        """``lo:hi:step`` (linear) or ``log:lo:hi:num``."""
        parts = [p.strip() for p in text.split(":")]
        try:
            if parts[0].lower() == "log" and len(parts) == 4:
                return cls(float(parts[1]), float(parts[2]), num=int(parts[3]), log=True)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"cannot parse range {text!r}: {exc}") from None
        raise ConfigError(f"range must be lo:hi:step or log:lo:hi:num, got {text!r}")

    def __str__(self) -> str:
        if self.log:
            return f"log:{self.lo:.12g}:{self.hi:.12g}:{self.num}"
        return f"{self.lo:.12g}:{self.hi:.12g}:{self.step:.12g}"

    def values(self) -> list[float]:
        if self.log:
            pts = np.geomspace(self.lo, self.hi, self.num)
        else:
            count = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
            pts = self.lo + self.step * np.arange(count)
        # rounding pins the grid so reruns emit identical bytes
        out = [float(f"{p:.12g}") for p in pts]
        if not out:
            raise ConfigError("grid is empty")
        return out


def _parse_grid(text: str) -> GridSpec:
    parts = text.split(":")
    try:
        if len(parts) == 3:
            return GridSpec.square(float(parts[0]), float(parts[1]), int(parts[2]))
        if len(parts) == 6:
            x0, x1, y0, y1 = map(float, parts[:4])
            return GridSpec(x0, x1, y0, y1, int(parts[4]), int(parts[5]))
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}: {exc}") from None
    raise ConfigError(f"grid must be lo:hi:n or xmin:xmax:ymin:ymax:nx:ny, got {text!r}")


def _grid_str(g: GridSpec) -> str:
    return f"{g.x_min:.12g}:{g.x_max:.12g}:{g.y_min:.12g}:{g.y_max:.12g}:{g.nx}:{g.ny}"


@dataclass(frozen=True)
class ExperimentConfig:
    """One figure run.  ``k`` is the repetition count for fig3/fig7 and custom
    sweeps, and the largest k for fig4/fig8; ``None`` picks the figure default."""

    figure: str = "fig1"
    nbar_range: Sweep = field(default_factory=lambda: Sweep(0.05, 2.0, 0.05))
    alpha_sq_range: Sweep | None = None
    k: int | None = None
    point: float = 0.57
    g: float = 1.0
    mode: str = "ac"
    source: str = "thermal"
    tail_tol: float = 1e-12
    grid: GridSpec = field(default_factory=GridSpec)
    out: str | None = None
    format: str = "csv"
    plot_script: bool = False

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ConfigError(f"figure must be one of {', '.join(FIGURES)}, got {self.figure!r}")
        if not 0.0 < self.tail_tol <= 1e-3:
            raise ConfigError(f"tail_tol must lie in (0, 1e-3], got {self.tail_tol}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.k is not None and (int(self.k) != self.k or self.k < 1):
            raise ConfigError(f"k must be a positive integer, got {self.k}")
        if self.mode.lower() not in ("ac", "ca"):
            raise ConfigError(f"mode must be ac or ca, got {self.mode!r}")
        if self.source not in ("thermal", "coherent"):
            raise ConfigError(f"source must be thermal or coherent, got {self.source!r}")
        if not self.g > 0:
            raise ConfigError(f"g must be > 0, got {self.g}")

    @property
    def alpha_sweep(self) -> Sweep:
        if self.alpha_sq_range is not None:
            return self.alpha_sq_range
        if self.figure == "fig9":
            return Sweep(1.0, 200.0, num=41, log=True)
        return Sweep(0.05, 2.0, 0.05)

    @property
    def reps(self) -> int:
        if self.k is not None:
            return int(self.k)
        return {"fig3": 20, "fig7": 20, "fig4": 30, "fig8": 30}.get(self.figure, 1)

    # -- key/value persistence mirroring the CLI flags --

    def to_mapping(self) -> dict[str, str]:
        return {
            "figure": self.figure,
            "nbar-range": str(self.nbar_range),
            "alpha-sq-range": "" if self.alpha_sq_range is None else str(self.alpha_sq_range),
            "k": "" if self.k is None else str(self.k),
            "point": repr(self.point),
            "g": repr(self.g),
            "mode": self.mode,
            "source": self.source,
            "tail-tol": repr(self.tail_tol),
            "grid": _grid_str(self.grid),
            "out": self.out or "",
            "format": self.format,
            "plot-script": str(self.plot_script).lower(),
        }

    @classmethod
    def from_mapping(cls, data: dict[str, str], base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        base = base or cls()
        conv: dict[str, Callable[[str], object]] = {
            "figure": str,
            "nbar-range": Sweep.parse,
            "alpha-sq-range": lambda s: Sweep.parse(s) if s else None,
            "k": lambda s: int(s) if s else None,
            "point": float,
            "g": float,
            "mode": str,
            "source": str,
            "tail-tol": float,
            "grid": _parse_grid,
            "out": lambda s: s or None,
            "format": str,
            "plot-script": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
        }
        updates = {}
        for key, raw in data.items():
            key = key.strip().lower().replace("_", "-")
            if key not in conv:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                updates[key.replace("-", "_")] = conv[key](raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from None
        return replace(base, **updates)

    def save(self, path: str | Path) -> None:
        parser = configparser.ConfigParser()
        parser["experiment"] = self.to_mapping()
        with open(path, "w", newline="\n") as fh:
            parser.write(fh)

    @classmethod
    def load(cls, path: str | Path, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise ConfigError(f"cannot read config file {path}")
        if "experiment" not in parser:
            raise ConfigError(f"config file {path} lacks an [experiment] section")
        return cls.from_mapping(dict(parser["experiment"]), base)


# -- sweeps ---------------------------------------------------------------

def _thermal_q(nbar: float, op: LadderOp, k: int, tail_tol: float) -> float:
    return moments(apply_pipeline(make_thermal(nbar, tail_tol), LadderPipeline(op, k))).mandel_q


def _coherent_q(alpha_sq: float, op: LadderOp, k: int, tail_tol: float) -> float:
    return moments(apply_pipeline(make_coherent_mean(alpha_sq, tail_tol), LadderPipeline(op, k))).mandel_q


def q_curves(make: Callable, params: list[float], k: int, tail_tol: float) -> list[tuple[float, float, float]]:
    def row(p):
        return p, make(p, LadderOp.AC, k, tail_tol), make(p, LadderOp.CA, k, tail_tol)
    return parallel_map(row, params)


def fidelity_curve(initial, kmax: int) -> list[tuple[int, float]]:
    def row(k):
        ac = apply_pipeline(initial, LadderPipeline(LadderOp.AC, k))
        ca = apply_pipeline(initial, LadderPipeline(LadderOp.CA, k))
        return k, fidelity(ac, ca)
    return parallel_map(row, list(range(1, kmax + 1)))


def wigner_pair(initial, grid: GridSpec):
    w_ac = wigner_grid(apply_pipeline(initial, LadderPipeline(LadderOp.AC)), grid)
    w_ca = wigner_grid(apply_pipeline(initial, LadderPipeline(LadderOp.CA)), grid)
    return w_ac, w_ca


def compute_figure(cfg: ExperimentConfig) -> tuple[list[tuple], dict]:
    """Rows for ``cfg.figure`` and a small summary dict."""
    fig, tol = cfg.figure, cfg.tail_tol
    summary: dict = {"figure": fig}
    if fig in ("fig1", "fig3"):
        rows = q_curves(_thermal_q, cfg.nbar_range.values(), 1 if fig == "fig1" else cfg.reps, tol)
    elif fig in ("fig5", "fig7"):
        rows = q_curves(_coherent_q, cfg.alpha_sweep.values(), 1 if fig == "fig5" else cfg.reps, tol)
    elif fig in ("fig2", "fig6"):
        initial = make_thermal(cfg.point, tol) if fig == "fig2" else make_coherent_mean(cfg.point, tol)
        w_ac, w_ca = wigner_pair(initial, cfg.grid)
        xx, yy = np.meshgrid(w_ac.x, w_ac.y)
        rows = list(zip(xx.ravel(), yy.ravel(), w_ac.values.ravel(), w_ca.values.ravel()))
        summary.update(min_W_AC=w_ac.min_value, min_W_AC_at=w_ac.min_location,
                       min_W_CA=w_ca.min_value, min_W_CA_at=w_ca.min_location)
    elif fig in ("fig4", "fig8"):
        initial = make_thermal(cfg.point, tol) if fig == "fig4" else make_coherent_mean(cfg.point, tol)
        rows = fidelity_curve(initial, cfg.reps)
    elif fig == "fig9":
        rows = fig9_sweep(cfg.alpha_sweep.values(), cfg.g, cfg.mode, tol)
    else:
        op = LadderOp(cfg.mode.lower())
        make = make_thermal if cfg.source == "thermal" else make_coherent_mean
        params = cfg.nbar_range.values() if cfg.source == "thermal" else cfg.alpha_sweep.values()

        def row(p):
            m = moments(apply_pipeline(make(p, tol), LadderPipeline(op, cfg.reps)))
            return p, m.mean, m.variance, m.mandel_q
        rows = parallel_map(row, params)
    return rows, summary


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def _json_value(v):
    if v is None:
        return None
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, tuple):
        return [_json_value(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    return v


def render(cfg: ExperimentConfig, rows: list[tuple], summary: dict) -> str:
    cols = COLUMNS[cfg.figure]
    if cfg.format == "csv":
        lines = [",".join(cols)] + [",".join(_fmt(v) for v in r) for r in rows]
        return "\n".join(lines) + "\n"
    doc = {
        "figure": cfg.figure,
        "config": cfg.to_mapping(),
        "summary": {k: _json_value(v) for k, v in summary.items()},
        "columns": list(cols),
        "rows": [[_json_value(v) for v in r] for r in rows],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def plot_script(cfg: ExperimentConfig, data_path: Path) -> str:
    cols = COLUMNS[cfg.figure]
    head = [f"# gnuplot stub for {cfg.figure}", "set datafile separator ','",
            f"set xlabel '{cols[0]}'", "set key autotitle columnhead"]
    if cfg.figure in ("fig2", "fig6"):
        body = [f"set ylabel '{cols[1]}'", "set pm3d map",
                f"splot '{data_path.name}' using 1:2:3 with pm3d title '{cols[2]}'"]
    else:
        series = ", ".join(f"'{data_path.name}' using 1:{i + 1} with lines" for i in range(1, len(cols)))
        body = [f"plot {series}"]
    return "\n".join(head + body) + "\n"


def default_output(cfg: ExperimentConfig) -> Path:
    return Path(f"{cfg.figure}.{cfg.format}")


def run_fig(cfg: ExperimentConfig) -> tuple[list[Path], dict]:
    """Compute and write the dataset for ``cfg``; returns written paths and a summary."""
    rows, summary = compute_figure(cfg)
    path = Path(cfg.out) if cfg.out else default_output(cfg)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(render(cfg, rows, summary))
    written = [path]
    if cfg.plot_script:
        gp = path.with_suffix(".gp")
        with open(gp, "w", newline="\n") as fh:
            fh.write(plot_script(cfg, path))
        written.append(gp)
    return written, summary


# -- Q-factor zero crossings ---------------------------------------------

_SOURCE_RE = re.compile(r"^(thermal|coherent)_(ac|ca)(?:k\((\d+)\))?$", re.IGNORECASE)


def q_function(source: str, k: int | None = None, tail_tol: float = 1e-12) -> Callable[[float], float]:
    """Q as a function of the initial mean photon number.

    ``source`` reads like ``thermal_AC``, ``coherent_CA`` or ``thermal_ACk(20)``.
    """
    match = _SOURCE_RE.match(source.strip())
    if not match:
        raise ConfigError(f"unknown Q source {source!r}")
    family, op_name, reps = match.groups()
    reps = int(reps) if reps else (k or 1)
    op = LadderOp(op_name.lower())
    make = _thermal_q if family.lower() == "thermal" else _coherent_q
    return lambda p: make(p, op, reps, tail_tol)


def find_q_zero(source: str, bracket: tuple[float, float], k: int | None = None,
                tail_tol: float = 1e-12, xtol: float = 1e-5) -> float:
    """Bisection root of ``Q(param)`` inside ``bracket``.

    Raises:
        NoSignChange: if Q has the same sign at both bracket ends.
    """
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ConfigError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    q = q_function(source, k, tail_tol)
    q_lo, q_hi = q(lo), q(hi)
    if q_lo * q_hi > 0:
        raise NoSignChange(f"Q({lo:g}) = {q_lo:.4g} and Q({hi:g}) = {q_hi:.4g} share a sign")
    return float(bisect(q, lo, hi, xtol=xtol))
