"""Experiment configuration: flat INI with [section] blocks, schema = 1.

All physical quantities are SI.  A config looks like::

    [run]
    schema = 1
    scenario = fig1
    seed = 0

    [medium]
    rho = 1000.0
    c_p = 40.0
    c_s = 1.0
    nu_p = 0.0
    nu_s = 0.2
    y = 2.0

    [geometry]
    r = 0.015
    xi = 0.01 0.0 0.0
    array_radius = 0.05
    n_receivers = 16

    [grids]
    n = 4096
    omega_max = 32000.0
    voxel = 5e-4
    half_extent = 0.021

Unknown scenarios and schema versions are rejected; CLI flags override
individual keys after parsing.
"""

import configparser
from dataclasses import dataclass, field

import numpy as np

from .medium import PowerLawMedium

__all__ = ["ExperimentConfig", "load_config", "default_config"]

SCENARIOS = ("fig1", "fig2", "fig3", "localize", "convergence", "kk", "custom")


@dataclass
class ExperimentConfig:
    """Resolved experiment parameters (medium, geometry, grids, scenario)."""

    scenario: str = "custom"
    seed: int = 0
    medium: dict = field(default_factory=dict)
    geometry: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError("unknown scenario %r (expected one of %s)" % (self.scenario, SCENARIOS))

    def make_medium(self, **overrides):
        params = dict(rho=1000.0, c_p=40.0, c_s=1.0, nu_p=0.0, nu_s=0.0, y=2.0)
        params.update(self.medium)
        params.update({k: v for k, v in overrides.items() if v is not None})
        return PowerLawMedium(**params)

    def resolved(self):
        """Every parameter the run will use, for the output manifest."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "medium": dict(self.medium),
            "geometry": {k: (list(v) if isinstance(v, np.ndarray) else v) for k, v in self.geometry.items()},
            "grids": dict(self.grids),
            "schema": 1,
        }


def _parse_value(text):
    parts = text.split()
    if len(parts) > 1:
        return np.array([float(p) for p in parts])
    try:
        f = float(text)
    except ValueError:
        return text
    return int(f) if f.is_integer() and "." not in text and "e" not in text.lower() else f


def load_config(path, overrides=None):
    """Parse an INI experiment config, applying flat key overrides.

    Parameters
    ----------
    path : str or None
        Config file; ``None`` starts from defaults.
    overrides : dict, optional
        ``{"section.key": value}`` entries that replace parsed values
        (used by CLI flags).
    """
    sections = {"run": {}, "medium": {}, "geometry": {}, "grids": {}}
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path) as fh:
            parser.read_file(fh)
        for name in parser.sections():
            if name not in sections:
                raise ValueError("unknown config section [%s]" % name)
            for key, raw in parser.items(name):
                sections[name][key] = _parse_value(raw)
        schema = sections["run"].pop("schema", 1)
        if int(schema) != 1:
            raise ValueError("unsupported config schema %r (this build reads schema = 1)" % schema)
    if overrides:
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, key = dotted.split(".", 1)
            sections[section][key] = value
    run = sections["run"]
    return ExperimentConfig(
        scenario=str(run.get("scenario", "custom")),
        seed=int(run.get("seed", 0)),
        medium=sections["medium"],
        geometry=sections["geometry"],
        grids=sections["grids"],
    )


def default_config(scenario):
    """Built-in defaults for each scenario (figure captions, harness docs)."""
    cfg = ExperimentConfig(scenario=scenario)
    if scenario in ("fig1", "fig2"):
        cfg.medium = dict(rho=1000.0, c_p=40.0, c_s=1.0, nu_p=0.0)
        cfg.geometry = dict(r=0.015)
        cfg.grids = dict(n=4096, omega_max=3.2e4, t_fix=0.015)
    elif scenario == "fig3":
        cfg.grids = dict(eps_values=np.array([1e-5, 3e-5, 1e-4, 3e-4, 1e-3]))
    elif scenario == "localize":
        # nu_s = 0.2 with the shear speed chosen so nu_s/(c_s r) stays well
        # inside the stationary-phase validity regime of the correction
        cfg.medium = dict(rho=1000.0, c_p=2400.0, c_s=600.0, nu_p=0.0, nu_s=0.2, y=2.0)
        cfg.geometry = dict(
            xi=np.array([0.01, 0.0, 0.0]),
            array_radius=0.05,
            n_receivers=16,
        )
        cfg.grids = dict(n=8192, omega_max=1.6e6, voxel=5e-4, half_extent=0.021)
    elif scenario == "kk":
        cfg.medium = dict(rho=1000.0, c_p=40.0, c_s=1.0, nu_p=0.0, nu_s=0.2, y=2.0)
        cfg.grids = dict(n=8192, omega_max=800.0)
    return cfg
