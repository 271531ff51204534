"""Sparse identification of ODEs, maps, networks, games and PDEs."""

import json

import numpy as np

from . import _sparsid
from ._sparsid import DivergenceError, Error, InvalidArgument, ParseError, polynomial_terms, run_cli

__all__ = [
    "DivergenceError",
    "Error",
    "InvalidArgument",
    "ParseError",
    "discover",
    "identify_pde",
    "polynomial_terms",
    "reconstruct_game",
    "reconstruct_network",
    "run_cli",
    "simulate",
    "simulate_model",
    "solve",
]


def _dump(cfg):
    return json.dumps(cfg or {})


def simulate(system, **spec):
    """Run a built-in simulator; keyword arguments follow the JSON spec."""
    spec["system"] = system
    return _sparsid.simulate(json.dumps(spec))


def discover(times, values, kind="ode", channels=None, **config):
    values = np.asarray(values, dtype=float)
    if channels is None:
        channels = [f"x{i}" for i in range(values.shape[1])]
    out = _sparsid.discover(kind, np.asarray(times, dtype=float), values, list(channels), _dump(config))
    return json.loads(out)


def simulate_model(model, initial, steps, step):
    return _sparsid.simulate_model(json.dumps(model), np.asarray(initial, dtype=float), int(steps), float(step))


def identify_pde(x, t, u, periodic=True, **config):
    return json.loads(_sparsid.identify_pde(np.asarray(x, float), np.asarray(t, float), np.asarray(u, float),
                                            periodic, _dump(config)))


def reconstruct_network(times, values, nodes, dim, **config):
    return json.loads(_sparsid.reconstruct_network(np.asarray(times, float), np.asarray(values, float),
                                                   nodes, dim, _dump(config)))


def reconstruct_game(strategies, payoffs, policy="either", **params):
    out = _sparsid.reconstruct_game(np.asarray(strategies, dtype=np.int32), np.asarray(payoffs, float),
                                    _dump(params), policy)
    return json.loads(out)


def solve(matrix, target, solver="lasso_cd", lam=0.0, threshold=0.0):
    return json.loads(_sparsid.solve(np.asarray(matrix, float), np.asarray(target, float), solver, lam, threshold))
