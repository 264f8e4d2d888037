"""Seeded, resumable experiment runs that emit one CSV per study.

Each experiment walks a parameter grid; every grid cell is computed from
seeds derived from (master seed, stable cell key, realization, attempt), so
reruns and resumed runs are byte-identical regardless of execution order.
Completed cells are detected by row presence in the output CSV and skipped;
derived rows (fits, plateau/gap diagnostics) are recomputed from cell rows
on every run.
"""
from __future__ import annotations

import csv
import json
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from . import __version__ as _pkg_version
from .bounds import aseb_direct
from .cdi import cdi_exact, expected_cdi_stochastic
from .errors import SynchronizabilityError
from .fim import build_absolute_fim, build_transition_matrix
from .lattice import infinite_lattice_cdi_asymptotic, infinite_lattice_cdi_numerical
from .seeding import derived_seed_sequence
from .topology import (
    BernoulliPriors,
    LinkModel,
    Topology,
    UniformPriors,
    assign_priors,
    gen_lattice,
    gen_scaling_family,
    is_connected,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "ResultRow",
    "run_extended_rseb",
    "run_extended_aseb",
    "run_dense_scaling",
    "run_lattice_cdi_study",
    "run_stochastic_convergence",
    "run_experiment",
    "EXPERIMENT_IDS",
]

_COLUMNS = (
    "n_agents",
    "r_max",
    "side_b",
    "p_a",
    "n_p",
    "statistic",
    "value",
    "stderr",
    "n_samples",
    "resample_count",
)


@dataclass(frozen=True)
class ResultRow:
    """One output record; all fields canonical strings for stable CSV bytes."""

    n_agents: str = ""
    r_max: str = ""
    side_b: str = ""
    p_a: str = ""
    n_p: str = ""
    statistic: str = ""
    value: str = ""
    stderr: str = ""
    n_samples: str = ""
    resample_count: str = ""

    def key(self) -> tuple[str, ...]:
        return (self.n_agents, self.r_max, self.side_b, self.p_a, self.n_p, self.statistic)


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid and sampling parameters for one experiment run."""

    experiment: str
    master_seed: int = 0
    realizations: int = 200
    snapshots: int = 100
    n_agents_grid: tuple[int, ...] = ()
    r_max: float = 20.0
    r_max_grid: tuple[float, ...] = ()
    intensity: float = 0.01
    area: float = 10000.0
    n_p: float = 5.0
    n_p_grid: tuple[float, ...] = ()
    p_a: float = 1.0
    sides: tuple[float, ...] = (50.0, 100.0)
    link: LinkModel = field(default_factory=LinkModel)
    out_dir: Path = Path(".")
    jobs: int = 1

    def __post_init__(self):
        if self.realizations < 1 or self.snapshots < 1:
            raise ValueError("realizations and snapshots must be at least 1")

    @property
    def csv_path(self) -> Path:
        return Path(self.out_dir) / f"{self.experiment}.csv"


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """All rows of a completed run, in file order."""

    experiment: str
    rows: tuple[ResultRow, ...]
    path: Path

    def value(self, statistic: str, **params) -> float:
        """Look up a single row's value by statistic name and parameters."""
        want = {k: _fmt(v) for k, v in params.items()}
        for row in self.rows:
            if row.statistic != statistic:
                continue
            if all(getattr(row, k) == v for k, v in want.items()):
                return float(row.value)
        raise KeyError(f"no row with statistic={statistic!r} and {params!r}")

    def series(self, statistic: str) -> list[ResultRow]:
        return [r for r in self.rows if r.statistic == statistic]


# ---------------------------------------------------------------------------
# Cell plumbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Cell:
    """One grid point: a stable key plus the statistics it is expected to emit."""

    params: dict
    statistics: tuple[str, ...]

    def seed_key(self, experiment: str) -> int:
        canon = experiment + "|" + "|".join(
            f"{k}={self.params[k]}" for k in sorted(self.params)
        )
        return zlib.crc32(canon.encode())

    def row_keys(self) -> list[tuple[str, ...]]:
        base = {k: _fmt(v) for k, v in self.params.items()}
        return [
            (
                base.get("n_agents", ""),
                base.get("r_max", ""),
                base.get("side_b", ""),
                base.get("p_a", ""),
                base.get("n_p", ""),
                stat,
            )
            for stat in self.statistics
        ]


def _read_rows(path: Path) -> dict[tuple[str, ...], ResultRow]:
    if not path.exists():
        return {}
    out: dict[tuple[str, ...], ResultRow] = {}
    with path.open(newline="") as fh:
        for rec in csv.DictReader(fh):
            row = ResultRow(**{k: rec.get(k, "") for k in _COLUMNS})
            out[row.key()] = row
    return out


def _write_rows(path: Path, rows: Iterable[ResultRow]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for row in rows:
            writer.writerow([getattr(row, c) for c in _COLUMNS])
    tmp.replace(path)


def _compute_cell_worker(args) -> list[ResultRow]:
    config, cell, fn_name = args
    return _CELL_FUNCS[fn_name](config, cell)


def _run_grid(
    config: ExperimentConfig,
    cells: list[_Cell],
    fn_name: str,
    derived: Callable[[ExperimentConfig, dict], list[ResultRow]],
) -> ExperimentResult:
    t0 = time.time()
    path = config.csv_path
    cache = _read_rows(path)
    todo = [c for c in cells if not all(k in cache for k in c.row_keys())]
    if config.jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            produced = list(pool.map(_compute_cell_worker, [(config, c, fn_name) for c in todo]))
    else:
        produced = [_CELL_FUNCS[fn_name](config, c) for c in todo]
    for rows in produced:
        for row in rows:
            cache[row.key()] = row
    ordered: list[ResultRow] = []
    for cell in cells:
        for key in cell.row_keys():
            ordered.append(cache[key])
    ordered.extend(derived(config, {r.key(): r for r in ordered}))
    _write_rows(path, ordered)
    _write_manifest(config, n_cells=len(cells), n_computed=len(todo), wall=time.time() - t0)
    return ExperimentResult(experiment=config.experiment, rows=tuple(ordered), path=path)


def _write_manifest(config: ExperimentConfig, n_cells: int, n_computed: int, wall: float) -> None:
    import scipy

    echo = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(config).items()}
    echo["link"] = {"n_rounds": config.link.n_rounds, "sigma2": config.link.sigma2}
    manifest = {
        "experiment": config.experiment,
        "config": echo,
        "master_seed": config.master_seed,
        "versions": {
            "netsync": _pkg_version,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "n_cells": n_cells,
        "n_cells_computed": n_computed,
        "wall_time_s": round(wall, 3),
    }
    out = Path(config.out_dir) / f"{config.experiment}.manifest.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def _sub_seed(config: ExperimentConfig, cell: _Cell, *key: int) -> int:
    ss = derived_seed_sequence(config.master_seed, cell.seed_key(config.experiment), *key)
    return int(ss.generate_state(1)[0])


def _connected_topology(config: ExperimentConfig, cell: _Cell, realization: int, mode: str,
                        n_agents: int, r_max: float, max_attempts: int = 1000) -> tuple[Topology, int]:
    resamples = 0
    for attempt in range(max_attempts):
        seed = _sub_seed(config, cell, realization, attempt)
        topo = gen_scaling_family(
            mode,
            n_agents,
            r_max=r_max,
            seed=seed,
            intensity=config.intensity if mode == "extended" else None,
            area=config.area if mode == "dense" else None,
        )
        if is_connected(topo):
            return topo, resamples
        resamples += 1
    raise RuntimeError(f"no connected realization in {max_attempts} attempts for cell {cell.params}")


def _rseb_of(topology: Topology, link: LinkModel) -> float:
    """tr(J^+) / n_agents via the eigenvalues of the Laplacian information matrix."""
    deg = topology.agent_degrees().astype(float)
    m = np.diag(deg) - topology.agent_adjacency().toarray()
    eigvals = np.linalg.eigvalsh(m)
    positive = eigvals[1:]
    if positive[0] <= 1e-8 * eigvals[-1]:
        raise SynchronizabilityError("agent graph is disconnected")
    return float(np.sum(1.0 / positive)) / link.gamma / topology.n_agents


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    n = len(values)
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return float(values.mean()), stderr


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope, intercept, and R^2."""
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


# ---------------------------------------------------------------------------
# Scaling-law experiments
# ---------------------------------------------------------------------------

def _scaling_cells(config: ExperimentConfig, statistic: str) -> list[_Cell]:
    if not config.n_agents_grid:
        raise ValueError("n_agents_grid must not be empty")
    return [
        _Cell(params={"n_agents": n, "r_max": config.r_max}, statistics=(statistic,))
        for n in config.n_agents_grid
    ]


def _cell_extended_rseb(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    n = cell.params["n_agents"]
    vals = np.empty(config.realizations)
    resamples = 0
    for r in range(config.realizations):
        topo, extra = _connected_topology(config, cell, r, "extended", n, config.r_max)
        resamples += extra
        vals[r] = _rseb_of(topo, config.link)
    mean, stderr = _mean_stderr(vals)
    return [
        ResultRow(
            n_agents=_fmt(n), r_max=_fmt(config.r_max), statistic="rseb_mean",
            value=_fmt(mean), stderr=_fmt(stderr),
            n_samples=_fmt(config.realizations), resample_count=_fmt(resamples),
        )
    ]


def _derived_lnfit(config: ExperimentConfig, rows: dict) -> list[ResultRow]:
    grid = config.n_agents_grid
    if len(grid) < 4:
        return []
    means = np.array([
        float(rows[(_fmt(n), _fmt(config.r_max), "", "", "", "rseb_mean")].value) for n in grid
    ])
    top = len(grid) // 2
    x = np.log(np.array(grid[top:], dtype=float))
    slope, intercept, r2 = _linear_fit(x, means[top:])
    return [
        ResultRow(statistic="rseb_lnfit_slope", value=_fmt(slope)),
        ResultRow(statistic="rseb_lnfit_intercept", value=_fmt(intercept)),
        ResultRow(statistic="rseb_lnfit_r2", value=_fmt(r2)),
    ]


def run_extended_rseb(config: ExperimentConfig) -> ExperimentResult:
    """Expected RSEB versus agent count at fixed intensity (growing area).

    Emits ``rseb_mean`` per grid point plus a linear fit of the mean against
    ``ln(n_agents)`` over the top half of the grid (skipped for grids with
    fewer than four points).
    """
    cells = _scaling_cells(config, "rseb_mean")
    return _run_grid(config, cells, "extended_rseb", _derived_lnfit)


def _cell_extended_aseb(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    if config.p_a <= 0.0:
        raise SynchronizabilityError(
            "p_a = 0 leaves every realization without information sources; "
            "the absolute bound does not exist"
        )
    n = cell.params["n_agents"]
    vals = np.empty(config.realizations)
    resamples = 0
    for r in range(config.realizations):
        topo, extra = _connected_topology(config, cell, r, "extended", n, config.r_max)
        resamples += extra
        priors = assign_priors(
            topo,
            BernoulliPriors(p_a=config.p_a, n_p=config.n_p, seed=_sub_seed(config, cell, r, 9999)),
            config.link,
        )
        vals[r] = float(aseb_direct(build_absolute_fim(topo, priors, config.link)).mean())
    mean, stderr = _mean_stderr(vals)
    return [
        ResultRow(
            n_agents=_fmt(n), r_max=_fmt(config.r_max), p_a=_fmt(config.p_a), n_p=_fmt(config.n_p),
            statistic="mean_aseb_mean", value=_fmt(mean), stderr=_fmt(stderr),
            n_samples=_fmt(config.realizations), resample_count=_fmt(resamples),
        )
    ]


def _derived_plateau(config: ExperimentConfig, rows: dict) -> list[ResultRow]:
    grid = config.n_agents_grid
    if len(grid) < 2:
        return []
    def val(n):
        return float(rows[(_fmt(n), _fmt(config.r_max), "", _fmt(config.p_a), _fmt(config.n_p),
                           "mean_aseb_mean")].value)
    last, prev = val(grid[-1]), val(grid[-2])
    change = abs(last - prev) / prev
    return [ResultRow(p_a=_fmt(config.p_a), n_p=_fmt(config.n_p),
                      statistic="plateau_rel_change", value=_fmt(change))]


def run_extended_aseb(config: ExperimentConfig) -> ExperimentResult:
    """Expected average ASEB versus agent count with Bernoulli priors.

    Emits ``mean_aseb_mean`` per grid point and the relative change between
    the last two grid points (``plateau_rel_change``).
    """
    cells = [
        _Cell(
            params={"n_agents": n, "r_max": config.r_max, "p_a": config.p_a, "n_p": config.n_p},
            statistics=("mean_aseb_mean",),
        )
        for n in config.n_agents_grid
    ]
    if not cells:
        raise ValueError("n_agents_grid must not be empty")
    return _run_grid(config, cells, "extended_aseb", _derived_plateau)


def _cell_dense_rseb(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    n = cell.params["n_agents"]
    vals = np.empty(config.realizations)
    resamples = 0
    for r in range(config.realizations):
        topo, extra = _connected_topology(config, cell, r, "dense", n, config.r_max)
        resamples += extra
        vals[r] = _rseb_of(topo, config.link)
    mean, stderr = _mean_stderr(vals)
    return [
        ResultRow(
            n_agents=_fmt(n), r_max=_fmt(config.r_max), statistic="rseb_mean",
            value=_fmt(mean), stderr=_fmt(stderr),
            n_samples=_fmt(config.realizations), resample_count=_fmt(resamples),
        )
    ]


def _cell_dense_aseb(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    if config.p_a <= 0.0:
        raise SynchronizabilityError("p_a = 0: the absolute bound does not exist")
    n = cell.params["n_agents"]
    vals = np.empty(config.realizations)
    resamples = 0
    for r in range(config.realizations):
        topo, extra = _connected_topology(config, cell, r, "dense", n, config.r_max)
        resamples += extra
        priors = assign_priors(
            topo,
            BernoulliPriors(p_a=config.p_a, n_p=config.n_p, seed=_sub_seed(config, cell, r, 9999)),
            config.link,
        )
        vals[r] = float(aseb_direct(build_absolute_fim(topo, priors, config.link)).mean())
    mean, stderr = _mean_stderr(vals)
    return [
        ResultRow(
            n_agents=_fmt(n), r_max=_fmt(config.r_max), p_a=_fmt(config.p_a), n_p=_fmt(config.n_p),
            statistic="mean_aseb_mean", value=_fmt(mean), stderr=_fmt(stderr),
            n_samples=_fmt(config.realizations), resample_count=_fmt(resamples),
        )
    ]


def _derived_loglog(statistic: str):
    def derived(config: ExperimentConfig, rows: dict) -> list[ResultRow]:
        grid = config.n_agents_grid
        if len(grid) < 2:
            return []
        vals = []
        for n in grid:
            matches = [
                float(row.value)
                for row in rows.values()
                if row.statistic == statistic and row.n_agents == _fmt(n)
            ]
            if len(matches) != 1:
                raise KeyError(f"expected one {statistic} row for n_agents={n}")
            vals.append(matches[0])
        slope, intercept, r2 = _linear_fit(np.log(np.array(grid, float)), np.log(np.array(vals)))
        return [
            ResultRow(statistic=f"{statistic}_loglog_slope", value=_fmt(slope)),
            ResultRow(statistic=f"{statistic}_loglog_r2", value=_fmt(r2)),
        ]

    return derived


def run_dense_scaling(config: ExperimentConfig, which: str = "rseb") -> ExperimentResult:
    """Expected RSEB or mean ASEB versus agent count at fixed area.

    Emits per-point means plus the log-log slope of the mean against the
    agent count (expected near -1 for large grids).
    """
    if which == "rseb":
        cells = _scaling_cells(config, "rseb_mean")
        return _run_grid(config, cells, "dense_rseb", _derived_loglog("rseb_mean"))
    if which == "aseb":
        cells = [
            _Cell(
                params={"n_agents": n, "r_max": config.r_max, "p_a": config.p_a, "n_p": config.n_p},
                statistics=("mean_aseb_mean",),
            )
            for n in config.n_agents_grid
        ]
        if not cells:
            raise ValueError("n_agents_grid must not be empty")
        return _run_grid(config, cells, "dense_aseb", _derived_loglog("mean_aseb_mean"))
    raise ValueError("which must be 'rseb' or 'aseb'")


# ---------------------------------------------------------------------------
# Lattice CDI study
# ---------------------------------------------------------------------------

def _cell_lattice_inf(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    r = cell.params["r_max"]
    n_p = cell.params["n_p"]
    numerical = infinite_lattice_cdi_numerical(r, n_p)
    full = infinite_lattice_cdi_asymptotic(n_p, r_max=r, form="full")
    simple = infinite_lattice_cdi_asymptotic(n_p, r_max=r, form="simplified")
    base = dict(r_max=_fmt(r), n_p=_fmt(n_p))
    return [
        ResultRow(**base, statistic="inf_cdi_numerical", value=_fmt(numerical.value),
                  n_samples=_fmt(numerical.truncation_n)),
        ResultRow(**base, statistic="inf_cdi_asymptotic_full", value=_fmt(full)),
        ResultRow(**base, statistic="inf_cdi_asymptotic_simplified", value=_fmt(simple)),
    ]


def _cell_lattice_fin(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    from .topology import interior_mask

    r = cell.params["r_max"]
    n_p = cell.params["n_p"]
    side = cell.params["side_b"]
    topo = gen_lattice(side, 1.0, r)
    priors = assign_priors(topo, UniformPriors(n_p), config.link)
    delta = cdi_exact(build_transition_matrix(build_absolute_fim(topo, priors, config.link)))
    mask = interior_mask(topo, side)
    return [
        ResultRow(
            r_max=_fmt(r), n_p=_fmt(n_p), side_b=_fmt(side),
            statistic="lattice_interior_cdi_mean", value=_fmt(float(delta[mask].mean())),
            n_samples=_fmt(int(mask.sum())),
        ),
        ResultRow(
            r_max=_fmt(r), n_p=_fmt(n_p), side_b=_fmt(side),
            statistic="lattice_cdi_mean", value=_fmt(float(delta.mean())),
            n_samples=_fmt(topo.n_agents),
        ),
    ]


def run_lattice_cdi_study(config: ExperimentConfig) -> ExperimentResult:
    """Infinite-lattice CDI (numerical + both asymptotics) and finite lattices.

    Grid: ``r_max_grid`` x ``n_p_grid`` for the infinite values, additionally
    crossed with ``sides`` for the finite-lattice interior averages.
    """
    r_grid = config.r_max_grid or (config.r_max,)
    np_grid = config.n_p_grid or (config.n_p,)
    cells: list[_Cell] = []
    for n_p in np_grid:
        for r in r_grid:
            cells.append(_Cell(
                params={"r_max": r, "n_p": n_p},
                statistics=("inf_cdi_numerical", "inf_cdi_asymptotic_full",
                            "inf_cdi_asymptotic_simplified"),
            ))
            for side in config.sides:
                cells.append(_Cell(
                    params={"r_max": r, "n_p": n_p, "side_b": side},
                    statistics=("lattice_interior_cdi_mean", "lattice_cdi_mean"),
                ))
    return _run_grid(config, cells, "lattice_study", lambda c, rows: [])


# ---------------------------------------------------------------------------
# Stochastic convergence study
# ---------------------------------------------------------------------------

def _cell_stochastic(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    r = cell.params["r_max"]
    side = cell.params["side_b"]
    intensity = config.intensity
    result = expected_cdi_stochastic(
        side_b=side,
        intensity=intensity,
        r_max=r,
        n_p=config.n_p,
        link=config.link,
        snapshots=config.snapshots,
        seed=_sub_seed(config, cell, 0),
    )
    scale = math.sqrt(intensity)
    lat = gen_lattice(side * scale, 1.0, r * scale)
    priors = assign_priors(lat, UniformPriors(config.n_p), config.link)
    lat_delta = cdi_exact(build_transition_matrix(build_absolute_fim(lat, priors, config.link)))
    lat_mean = float(lat_delta.mean())
    gap = abs(result.mean - lat_mean) / lat_mean
    base = dict(r_max=_fmt(r), side_b=_fmt(side), n_p=_fmt(config.n_p))
    return [
        ResultRow(**base, statistic="stochastic_cdi_mean", value=_fmt(result.mean),
                  stderr=_fmt(result.stderr), n_samples=_fmt(config.snapshots),
                  resample_count=_fmt(result.resample_count)),
        ResultRow(**base, statistic="matched_lattice_cdi_mean", value=_fmt(lat_mean),
                  n_samples=_fmt(lat.n_agents)),
        ResultRow(**base, statistic="stochastic_lattice_rel_gap", value=_fmt(gap)),
    ]


def run_stochastic_convergence(config: ExperimentConfig) -> ExperimentResult:
    """Expected stochastic CDI against the minimax-matched lattice CDI.

    The matched lattice has unit spacing, side ``B * sqrt(intensity)`` and
    range ``sqrt(intensity) * r_max``. Emits means plus the relative gap per
    (side, r_max) cell.
    """
    r_grid = config.r_max_grid or (config.r_max,)
    cells = [
        _Cell(
            params={"r_max": r, "side_b": side, "n_p": config.n_p},
            statistics=("stochastic_cdi_mean", "matched_lattice_cdi_mean",
                        "stochastic_lattice_rel_gap"),
        )
        for side in config.sides
        for r in r_grid
    ]
    return _run_grid(config, cells, "stochastic_convergence", lambda c, rows: [])


_CELL_FUNCS = {
    "extended_rseb": _cell_extended_rseb,
    "extended_aseb": _cell_extended_aseb,
    "dense_rseb": _cell_dense_rseb,
    "dense_aseb": _cell_dense_aseb,
    "lattice_study": None,  # dispatched below
    "stochastic_convergence": _cell_stochastic,
}


def _cell_lattice_dispatch(config: ExperimentConfig, cell: _Cell) -> list[ResultRow]:
    if "side_b" in cell.params:
        return _cell_lattice_fin(config, cell)
    return _cell_lattice_inf(config, cell)


_CELL_FUNCS["lattice_study"] = _cell_lattice_dispatch

EXPERIMENT_IDS = (
    "extended-rseb",
    "extended-aseb",
    "dense-rseb",
    "dense-aseb",
    "lattice-cdi",
    "stochastic-convergence",
)


def run_experiment(experiment_id: str, config: ExperimentConfig) -> ExperimentResult:
    """Dispatch an experiment by registry id."""
    if experiment_id == "extended-rseb":
        return run_extended_rseb(config)
    if experiment_id == "extended-aseb":
        return run_extended_aseb(config)
    if experiment_id == "dense-rseb":
        return run_dense_scaling(config, "rseb")
    if experiment_id == "dense-aseb":
        return run_dense_scaling(config, "aseb")
    if experiment_id == "lattice-cdi":
        return run_lattice_cdi_study(config)
    if experiment_id == "stochastic-convergence":
        return run_stochastic_convergence(config)
    raise ValueError(f"unknown experiment {experiment_id!r}; known: {', '.join(EXPERIMENT_IDS)}")
