"""Metric records shared by all experiment runners."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class MetricRecord:
    """One measurement row: abscissa is time for runs, rank for sweeps."""

    abscissa: float
    method: str
    err_rel_l2: float = float("nan")  # ||A_hat - A||_2 / ||A||_2
    err_frob_norm: float = float("nan")  # ||A_hat - A||_F / (n s)
    eta_bar_p: float = float("nan")
    eta_bar_s: float = float("nan")
    m_r: int = 0
    m_c: int = 0
    rank: int = 0
    entries_accessed: int = 0
    sigma_leading: tuple = field(default_factory=tuple)
    diverged: bool = False


#: Fixed CSV column order for metrics emission.
METRIC_COLUMNS = (
    "abscissa",
    "method",
    "err_rel_l2",
    "err_frob_norm",
    "eta_bar_p",
    "eta_bar_s",
    "m_r",
    "m_c",
    "rank",
    "entries_accessed",
    "sigma_leading",
    "diverged",
)
