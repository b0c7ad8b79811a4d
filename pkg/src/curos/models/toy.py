"""Random orthogonally-mixed test matrices with prescribed singular value decay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import linalg


@dataclass
class ToySpec:
    n: int = 100
    decay: str = "fast"  # "fast": d_i = 2^-i, "slow": d_i = i^-3
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.decay not in ("fast", "slow"):
            raise ValueError(f"unknown decay {self.decay!r}")


def decay_profile(n, decay):
    """Diagonal decay values d_1..d_n."""
    i = np.arange(1, n + 1, dtype=float)
    return 0.5**i if decay == "fast" else i**-3


def toy_matrix(spec: ToySpec):
    """A = exp(W1) (e D) exp(W2)^T with random skew W1, W2 and diagonal D.

    The orthogonal factors leave the singular values at exactly e * d_i.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    w1 = rng.uniform(size=(n, n))
    w2 = rng.uniform(size=(n, n))
    e1 = linalg.expm_skew((w1 - w1.T) / 2.0)
    e2 = linalg.expm_skew((w2 - w2.T) / 2.0)
    d = np.e * decay_profile(n, spec.decay)
    return (e1 * d) @ e2.T
