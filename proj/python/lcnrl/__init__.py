"""Lorenz-conditioned multi-objective policy learning."""

import json as _json
import os as _os

from ._core import (
    CityGrid,
    ConfigError,
    DeepSeaTreasure,
    ParseError,
    TransitEnv,
    __version__,
    crowding_distance,
    dominates,
    dst_true_pareto_front,
    eum,
    extract_front,
    gini_index,
    hypervolume,
    lambda_lorenz_dominates,
    load_city,
    lorenz_dominates,
    lorenz_vector,
    metrics,
    mobility_law_od,
    pareto_dominates,
    sen_welfare,
    set_sen_welfare,
)
from ._core import train_json as _train_json


def train(config, seed=None, lam=None, base_dir=None):
    """Train on a config dict (same schema as the CLI's JSON config).

    Relative paths in the config resolve against `base_dir`, default the cwd.
    Returns a dict with the final evaluation, logs and buffer returns.
    """
    if base_dir is None:
        base_dir = _os.getcwd()
    return _train_json(_json.dumps(config), str(base_dir), seed, lam)


__all__ = [name for name in dir() if not name.startswith("_")]
