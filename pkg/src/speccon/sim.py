"""Discrete-time multi-agent consensus dynamics under a gain sequence.

The update is applied through neighbor sums over the edge list (the protocol
is local: each agent moves toward the weighted average of its neighbors), not
through an assembled Laplacian matrix. The pairwise accumulation keeps the
state mean constant to round-off at every step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .filters import ControlSequence
from .graphs import Graph, edge_arrays

ERROR_FLOOR = 1e-14


@dataclass(frozen=True)
class SimulationTrace:
    """States x(0..T), consensus errors ||x(k) - mean(x(0))||_2, and that mean."""

    states: np.ndarray
    errors: np.ndarray
    average: float

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        errors = np.array(self.errors, dtype=float)
        states.flags.writeable = False
        errors.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "errors", errors)

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1


def _neighbor_update(x, iu, ju, w):
    diff = w * (x[ju] - x[iu])
    u = np.zeros_like(x)
    np.add.at(u, iu, diff)
    np.add.at(u, ju, -diff)
    return u


def step(x, g: Graph, eps: float) -> np.ndarray:
    """One protocol step x + eps * sum_j a_ij (x_j - x_i), via edge traversal."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ParameterError(f"state vector must have length {g.n}")
    if eps <= 0.0:
        raise ParameterError("gain must be positive")
    iu, ju, w = edge_arrays(g)
    return x + eps * _neighbor_update(x, iu, ju, w)


def simulate(g: Graph, seq: ControlSequence, x0, steps: int) -> SimulationTrace:
    """Run ``steps`` protocol steps with the periodic gains of ``seq``."""
    x = np.asarray(x0, dtype=float)
    if x.shape != (g.n,):
        raise ParameterError(f"x0 must have length {g.n}")
    if steps < 0:
        raise ParameterError("steps must be non-negative")
    iu, ju, w = edge_arrays(g)
    average = float(x.mean())
    states = np.empty((steps + 1, g.n))
    states[0] = x
    for k in range(steps):
        x = x + seq.gain_at(k) * _neighbor_update(x, iu, ju, w)
        states[k + 1] = x
    errors = np.linalg.norm(states - average, axis=1)
    return SimulationTrace(states, errors, average)


@dataclass(frozen=True)
class PeriodRatios:
    """Per-period error contractions; periods with vanished error are omitted."""

    ratios: tuple[float, ...]
    omitted: tuple[int, ...]


def measured_period_ratios(trace: SimulationTrace, period: int) -> PeriodRatios:
    """Ratios errors[(j+1)M] / errors[jM] for each whole period in the trace."""
    if period < 1:
        raise ParameterError("period must be >= 1")
    if trace.steps < 2 * period:
        raise ParameterError(f"trace must cover at least two periods ({2 * period} steps)")
    ratios = []
    omitted = []
    j = 0
    while (j + 1) * period <= trace.steps:
        e0 = trace.errors[j * period]
        if e0 > ERROR_FLOOR:
            ratios.append(float(trace.errors[(j + 1) * period] / e0))
        else:
            omitted.append(j)
        j += 1
    return PeriodRatios(tuple(ratios), tuple(omitted))


def consensus_time(trace: SimulationTrace, tol: float) -> int | None:
    """Smallest k with errors[j] <= tol * max(1, errors[0]) for all j >= k.

    The threshold has an absolute floor of 1e-12. Returns None when the trace
    never settles below the threshold.
    """
    if tol <= 0.0:
        raise ParameterError("tolerance must be positive")
    threshold = max(tol * max(1.0, float(trace.errors[0])), 1e-12)
    above = np.nonzero(trace.errors > threshold)[0]
    if above.size == 0:
        return 0
    k = int(above[-1]) + 1
    return None if k == trace.errors.shape[0] else k


def uniform_initial_states(n: int, seed: int | None, low: float = 0.0,
                           high: float = 10.0) -> np.ndarray:
    """Seeded uniform initial states on [low, high]."""
    return np.random.default_rng(seed).uniform(low, high, n)


# ---------------------------------------------------------------------------
# serialization

def trace_to_dict(trace: SimulationTrace) -> dict:
    return {
        "states": trace.states.tolist(),
        "errors": trace.errors.tolist(),
        "average": trace.average,
    }


def save_trace(trace: SimulationTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_to_dict(trace), fh)
        fh.write("\n")


def trace_csv_lines(trace: SimulationTrace, include_states: bool = False) -> list[str]:
    """CSV "k,err[,x_0,...,x_{n-1}]" with one row per recorded step."""
    n = trace.states.shape[1]
    header = "k,err"
    if include_states:
        header += "," + ",".join(f"x_{i}" for i in range(n))
    lines = [header]
    for k in range(trace.states.shape[0]):
        row = f"{k},{trace.errors[k]:.6g}"
        if include_states:
            row += "," + ",".join(f"{v:.6g}" for v in trace.states[k])
        lines.append(row)
    return lines
