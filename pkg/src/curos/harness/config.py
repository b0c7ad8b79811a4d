"""Experiment configuration: defaults per experiment, flat config files, overrides."""

from __future__ import annotations

import dataclasses
import pathlib
from dataclasses import dataclass

EXPERIMENTS = ("toy", "burgers", "allen_cahn", "kdv", "heat")
METHODS = ("cur_cr_deim", "cur_cr_maxvol", "cur_cr_os", "cur_opt", "svd", "fom")

#: Desk-scale defaults: small enough that dense references finish in seconds.
_DESK_DEFAULTS = {
    "toy": dict(n=100),
    "burgers": dict(n=101, s=64, d=4, nu=2.5e-3, dt=1e-3, t_final=1.0, rank=8, scheme="euler"),
    "allen_cahn": dict(n=128, s=64, d=4, nu=5e-3, dt=1e-2, t_final=5.0, rank=8, scheme="euler"),
    "kdv": dict(n=257, s=64, d=4, nu=2e-4, dt=2e-3, t_final=1.0, rank=8, scheme="rk4"),
    "heat": dict(s=64, dt=78500.0 / 8000.0, t_final=785.0, rank=6, scheme="euler"),
}

#: Paper-scale problem dimensions, one flag away (--paper-scale).
_PAPER_SCALE = {
    "burgers": dict(n=401, s=256, d=17, dt=2.5e-4, t_final=5.0, scheme="rk4"),
    "allen_cahn": dict(n=256, s=256, d=4, dt=1e-2, t_final=50.0, scheme="rk4"),
    "kdv": dict(n=1024, s=256, d=4, dt=1e-4, t_final=1.0, scheme="rk4"),
}


@dataclass
class ExperimentConfig:
    experiment: str = "toy"
    method: str = "cur_cr_os"
    seed: int = 0
    out_dir: str = "out"
    # problem size
    n: int | None = None
    s: int | None = None
    d: int | None = None
    nu: float | None = None
    sigma: float = 1e-3
    ell: float | None = None
    decay: str = "fast"
    # time integration
    dt: float | None = None
    t_final: float | None = None
    rank: int | None = None
    eps_os: float = 10.0
    eps_u: float = 1e-8
    eps_l: float | None = None
    scheme: str | None = None
    rank_probe_fraction: float = 0.01
    max_rank_jump: int = 1
    checkpoint_every: int = 10
    # heat specifics
    heat_nx: int = 12
    heat_ny: int = 10
    heat_dir: str | None = None
    paper_scale: bool = False

    def resolved(self):
        """Fill in per-experiment defaults for unset fields."""
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        cfg = dataclasses.replace(self)
        defaults = dict(_DESK_DEFAULTS[self.experiment])
        if self.paper_scale and self.experiment in _PAPER_SCALE:
            defaults.update(_PAPER_SCALE[self.experiment])
        for key, value in defaults.items():
            if getattr(cfg, key) is None:
                setattr(cfg, key, value)
        if cfg.scheme is None:
            cfg.scheme = "euler"
        if cfg.rank is None:
            cfg.rank = 8
        return cfg


_BOOL_TOKENS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(name, text):
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    if name not in fields:
        raise ValueError(f"unknown config key {name!r}")
    text = text.strip()
    if text.lower() == "none":
        return None
    ftype = str(fields[name].type)
    if "bool" in ftype:
        return _BOOL_TOKENS[text.lower()]
    if "int" in ftype:
        return int(text)
    if "float" in ftype:
        return float(text)
    return text


def load_config(path):
    """Parse a flat ``key = value`` config file (# starts a comment)."""
    values = {}
    for raw in pathlib.Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, text = line.split("=", 1)
        key = key.strip()
        values[key] = _coerce(key, text)
    return ExperimentConfig(**values)
