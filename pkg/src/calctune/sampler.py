"""Seeded uniform sampling of joint tables from the probability simplex."""
from dataclasses import dataclass

import numpy as np

from .core import JointTable

DEFAULT_COUNT = 109


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    count: int = DEFAULT_COUNT

    def __post_init__(self):
        if int(self.count) < 1:
            raise ValueError("count must be >= 1, got %r" % (self.count,))


def table_rng(seed, index):
    """Independent generator for table ``index`` under master ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(index),))
    return np.random.default_rng(ss)


def sample_table(seed, index):
    """Dirichlet(1, ..., 1) draw as eight unit exponentials over their sum."""
    x = table_rng(seed, index).standard_exponential(8)
    return JointTable.from_cells(x / x.sum())


def sample_tables(config):
    """Return ``config.count`` tables; table ``i`` depends only on ``(seed, i)``."""
    return [sample_table(config.seed, i) for i in range(config.count)]
