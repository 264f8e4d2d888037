"""Config files: INI-style sections of ``key = value`` pairs.

Lists are whitespace-separated. A file can describe a network, a prior
scheme, the link model, and any number of ``[experiment:<id>]`` sections:

    [network]
    generator = stochastic
    side_b = 50
    intensity = 1.0
    r_max = 2.0
    seed = 7

    [priors]
    scheme = uniform
    n_p = 5.0

    [link]
    n_rounds = 1
    sigma2 = 2.0

    [experiment:dense-rseb]
    n_agents = 200 400 600 800
    r_max = 20
    area = 10000
    realizations = 200
    seed = 1
"""
from __future__ import annotations

import configparser
from pathlib import Path
from typing import Optional

from .experiments import ExperimentConfig
from .topology import (
    BernoulliPriors,
    LinkModel,
    PriorSpec,
    RegionPriors,
    Topology,
    UniformPriors,
    assign_priors,
    gen_lattice,
    gen_scaling_family,
    gen_stochastic,
)

__all__ = [
    "ConfigFile",
    "load_config",
    "link_from_config",
    "topology_from_config",
    "priors_from_config",
    "experiment_from_config",
]


class ConfigFile:
    """Typed access to one parsed config file."""

    def __init__(self, parser: configparser.ConfigParser, path: Optional[Path] = None):
        self._parser = parser
        self.path = path

    def has(self, section: str) -> bool:
        return self._parser.has_section(section)

    def sections(self) -> list[str]:
        return self._parser.sections()

    def get(self, section: str, key: str, default=None) -> str:
        if self._parser.has_option(section, key):
            return self._parser.get(section, key)
        if default is None:
            raise KeyError(f"missing [{section}] {key}")
        return default

    def get_str(self, section: str, key: str, default=None) -> str:
        return str(self.get(section, key, default))

    def get_int(self, section: str, key: str, default=None) -> int:
        return int(self.get(section, key, default))

    def get_float(self, section: str, key: str, default=None) -> float:
        return float(self.get(section, key, default))

    def get_ints(self, section: str, key: str, default=None) -> tuple[int, ...]:
        return tuple(int(tok) for tok in str(self.get(section, key, default)).split())

    def get_floats(self, section: str, key: str, default=None) -> tuple[float, ...]:
        return tuple(float(tok) for tok in str(self.get(section, key, default)).split())


def load_config(path: str | Path) -> ConfigFile:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    return ConfigFile(parser, Path(path))


def link_from_config(cfg: ConfigFile) -> LinkModel:
    if not cfg.has("link"):
        return LinkModel()
    return LinkModel(
        n_rounds=cfg.get_int("link", "n_rounds", "1"),
        sigma2=cfg.get_float("link", "sigma2", "2.0"),
    )


def topology_from_config(cfg: ConfigFile, seed: Optional[int] = None) -> Topology:
    section = "network"
    generator = cfg.get_str(section, "generator")
    r_max = cfg.get_float(section, "r_max")
    if seed is None and generator != "lattice":
        seed = cfg.get_int(section, "seed")
    if generator == "lattice":
        return gen_lattice(
            side_b=cfg.get_float(section, "side_b"),
            lattice_spacing=cfg.get_float(section, "spacing", "1.0"),
            r_max=r_max,
        )
    if generator == "stochastic":
        return gen_stochastic(
            side_b=cfg.get_float(section, "side_b"),
            intensity=cfg.get_float(section, "intensity"),
            r_max=r_max,
            seed=seed,
        )
    if generator in ("extended", "dense"):
        return gen_scaling_family(
            mode=generator,
            n_agents=cfg.get_int(section, "n_agents"),
            r_max=r_max,
            seed=seed,
            intensity=cfg.get_float(section, "intensity", "0.01") if generator == "extended" else None,
            area=cfg.get_float(section, "area", "10000.0") if generator == "dense" else None,
        )
    raise ValueError(f"unknown generator {generator!r}")


def priors_from_config(cfg: ConfigFile, topology: Topology, link: LinkModel) -> PriorSpec:
    if not cfg.has("priors"):
        return assign_priors(topology, UniformPriors(0.0), link)
    scheme_name = cfg.get_str("priors", "scheme", "uniform")
    n_p = cfg.get_float("priors", "n_p", "0.0")
    if scheme_name == "uniform":
        scheme = UniformPriors(n_p)
    elif scheme_name == "bernoulli":
        scheme = BernoulliPriors(
            p_a=cfg.get_float("priors", "p_a"),
            n_p=n_p,
            seed=cfg.get_int("priors", "seed", "0"),
        )
    elif scheme_name == "region":
        rect = cfg.get_floats("priors", "rect")
        if len(rect) != 4:
            raise ValueError("rect must be 'xmin ymin xmax ymax'")
        scheme = RegionPriors(rect=rect, n_p=n_p)
    else:
        raise ValueError(f"unknown prior scheme {scheme_name!r}")
    return assign_priors(topology, scheme, link)


def experiment_from_config(
    cfg: ConfigFile,
    experiment_id: str,
    out_dir: str | Path,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> ExperimentConfig:
    section = f"experiment:{experiment_id}"
    if not cfg.has(section):
        raise KeyError(f"config has no [{section}] section")
    link = link_from_config(cfg)
    get = lambda key, default: cfg.get(section, key, default)  # noqa: E731
    return ExperimentConfig(
        experiment=experiment_id,
        master_seed=seed if seed is not None else cfg.get_int(section, "seed", "0"),
        realizations=cfg.get_int(section, "realizations", "200"),
        snapshots=cfg.get_int(section, "snapshots", "100"),
        n_agents_grid=cfg.get_ints(section, "n_agents", "") if get("n_agents", "") else (),
        r_max=cfg.get_float(section, "r_max", "20.0"),
        r_max_grid=cfg.get_floats(section, "r_max_grid", "") if get("r_max_grid", "") else (),
        intensity=cfg.get_float(section, "intensity", "0.01"),
        area=cfg.get_float(section, "area", "10000.0"),
        n_p=cfg.get_float(section, "n_p", "5.0"),
        n_p_grid=cfg.get_floats(section, "n_p_grid", "") if get("n_p_grid", "") else (),
        p_a=cfg.get_float(section, "p_a", "1.0"),
        sides=cfg.get_floats(section, "sides", "50 100"),
        link=link,
        out_dir=Path(out_dir),
        jobs=jobs,
    )
