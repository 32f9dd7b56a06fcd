"""Weighted undirected graphs, Laplacians and their spectra.

Provides constructors for the standard graph families (complete, complete
bipartite, star, cycle, path) plus seeded Watts-Strogatz and connected
Erdos-Renyi generators, the numerical eigendecomposition of the Laplacian,
and closed-form spectra for the special families as an independent oracle.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConnectivityError, GenerationError, NumericalError, ParameterError

MAX_GENERATION_ATTEMPTS = 1000

SPECIAL_FAMILIES = ("complete", "complete_bipartite", "star", "cycle", "path")
RANDOM_FAMILIES = ("watts_strogatz", "random_connected")


@dataclass(frozen=True)
class Graph:
    """Weighted undirected graph: symmetric non-negative adjacency, zero diagonal."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=float)
        if self.n < 1 or a.shape != (self.n, self.n):
            raise ParameterError(f"adjacency must be {self.n}x{self.n}")
        if not np.array_equal(a, a.T):
            raise ParameterError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0.0):
            raise ParameterError("adjacency diagonal must be zero")
        if np.any(a < 0.0):
            raise ParameterError("edge weights must be non-negative")
        a.flags.writeable = False
        object.__setattr__(self, "adjacency", a)

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def max_degree(self) -> float:
        return float(self.degrees.max())


@dataclass(frozen=True)
class SpectralBand:
    """Uncertainty interval [alpha, beta] containing [lambda_2, lambda_N]."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= self.beta):
            raise ParameterError(f"band requires 0 < alpha <= beta, got [{self.alpha}, {self.beta}]")


@dataclass(frozen=True)
class LaplacianSpectrum:
    """Ascending Laplacian eigenvalues with paired orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_degree: float
    group_tol: float = 1e-8

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=float)
        vecs = np.array(self.eigenvectors, dtype=float)
        vals.flags.writeable = False
        vecs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def is_connected(self) -> bool:
        return self.lambda_2 > self.group_tol * max(1.0, self.lambda_max)


def edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (i, j, w) arrays for the upper-triangular edges of ``g``."""
    iu, ju = np.nonzero(np.triu(g.adjacency))
    return iu, ju, g.adjacency[iu, ju]


def is_connected(adjacency: np.ndarray) -> bool:
    """Breadth-first search treating any positive weight as an edge."""
    n = adjacency.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.nonzero(adjacency[i] > 0.0)[0]:
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


def _require_int(params: dict, key: str, minimum: int) -> int:
    if key not in params or params[key] is None:
        raise ParameterError(f"missing parameter '{key}'")
    v = params[key]
    if int(v) != v or int(v) < minimum:
        raise ParameterError(f"parameter '{key}' must be an integer >= {minimum}, got {v!r}")
    return int(v)


def _complete(n: int) -> np.ndarray:
    a = np.ones((n, n)) - np.eye(n)
    return a


def _complete_bipartite(m: int, n: int) -> np.ndarray:
    a = np.zeros((m + n, m + n))
    a[:m, m:] = 1.0
    a[m:, :m] = 1.0
    return a


def _star(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    a[0, 1:] = 1.0
    a[1:, 0] = 1.0
    return a


def _cycle(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, (idx + 1) % n] = 1.0
    a[(idx + 1) % n, idx] = 1.0
    return a


def _path(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    return a


def _watts_strogatz_once(n: int, k: int, p: float, rng: np.random.Generator) -> np.ndarray:
    a = np.zeros((n, n))
    for j in range(1, k // 2 + 1):
        for i in range(n):
            a[i, (i + j) % n] = 1.0
            a[(i + j) % n, i] = 1.0
    # rewire the right-hand ring edges, ring-lattice order
    for j in range(1, k // 2 + 1):
        for i in range(n):
            if rng.random() >= p:
                continue
            old = (i + j) % n
            if a[i].sum() >= n - 1:
                continue  # node already saturated, nothing to rewire to
            w = int(rng.integers(n))
            while w == i or a[i, w] > 0.0:
                w = int(rng.integers(n))
            a[i, old] = a[old, i] = 0.0
            a[i, w] = a[w, i] = 1.0
    return a


def _erdos_renyi_once(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    a = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.shape[0]) < p
    a[iu[mask], ju[mask]] = 1.0
    return a + a.T


def build_graph(family: str, seed: int | None = None, **params) -> Graph:
    """Build a graph of the given family with unit edge weights.

    Supported families and parameters:
      complete(n), complete_bipartite(m, n), star(n), cycle(n), path(n),
      watts_strogatz(n, k, p, seed), random_connected(n, p, seed).

    Random families are resampled until connected (bounded retries) and are
    deterministic for a fixed seed.
    """
    if family == "complete":
        n = _require_int(params, "n", 2)
        return Graph(n, _complete(n))
    if family == "complete_bipartite":
        m = _require_int(params, "m", 1)
        n = _require_int(params, "n", 1)
        if m + n < 2:
            raise ParameterError("complete_bipartite needs at least 2 vertices")
        return Graph(m + n, _complete_bipartite(m, n))
    if family == "star":
        n = _require_int(params, "n", 2)
        return Graph(n, _star(n))
    if family == "cycle":
        n = _require_int(params, "n", 3)
        return Graph(n, _cycle(n))
    if family == "path":
        n = _require_int(params, "n", 2)
        return Graph(n, _path(n))
    if family == "watts_strogatz":
        n = _require_int(params, "n", 3)
        k = _require_int(params, "k", 2)
        p = params.get("p")
        if k % 2 != 0 or k >= n:
            raise ParameterError("watts_strogatz requires even k < n")
        if p is None or not (0.0 <= p <= 1.0):
            raise ParameterError("watts_strogatz requires rewiring probability p in [0, 1]")
        rng = np.random.default_rng(seed)
        for _ in range(MAX_GENERATION_ATTEMPTS):
            a = _watts_strogatz_once(n, k, float(p), rng)
            if is_connected(a):
                return Graph(n, a)
        raise GenerationError(
            f"no connected watts_strogatz graph in {MAX_GENERATION_ATTEMPTS} attempts"
        )
    if family == "random_connected":
        n = _require_int(params, "n", 2)
        p = params.get("p")
        if p is None or not (0.0 < p <= 1.0):
            raise ParameterError("random_connected requires edge probability p in (0, 1]")
        rng = np.random.default_rng(seed)
        for _ in range(MAX_GENERATION_ATTEMPTS):
            a = _erdos_renyi_once(n, float(p), rng)
            if is_connected(a):
                return Graph(n, a)
        raise GenerationError(
            f"no connected random graph in {MAX_GENERATION_ATTEMPTS} attempts (n={n}, p={p})"
        )
    raise ParameterError(f"unknown graph family {family!r}")


def laplacian(g: Graph) -> np.ndarray:
    """Laplacian matrix: degree diagonal minus adjacency."""
    return np.diag(g.degrees) - g.adjacency


def spectrum(g: Graph, group_tol: float = 1e-8) -> LaplacianSpectrum:
    """Eigendecomposition of the Laplacian, eigenvalues ascending.

    Raises NumericalError if the eigensolver fails or the decomposition does
    not reconstruct the Laplacian to within 1e-8 * max(1, lambda_N).
    """
    lap = laplacian(g)
    try:
        vals, vecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    scale = max(1.0, float(vals[-1]))
    recon = np.abs(vecs @ np.diag(vals) @ vecs.T - lap).max()
    if recon > 1e-8 * scale:
        raise NumericalError(f"eigendecomposition reconstruction error {recon:.3e}")
    ortho = np.abs(vecs.T @ vecs - np.eye(g.n)).max()
    if ortho > 1e-9:
        raise NumericalError(f"eigenvector matrix not orthonormal ({ortho:.3e})")
    if abs(vals[0]) > 1e-9 * scale:
        raise NumericalError(f"smallest eigenvalue {vals[0]:.3e} not zero")
    if vals[-1] > 2.0 * g.max_degree + 1e-9:
        raise NumericalError("largest eigenvalue exceeds twice the maximum degree")
    return LaplacianSpectrum(vals, vecs, g.max_degree, group_tol)


def analytic_spectrum(family: str, **params) -> list[tuple[float, int]]:
    """Closed-form Laplacian spectrum as (eigenvalue, multiplicity) pairs, ascending.

    Supported: complete(n), complete_bipartite(m, n), star(n), cycle(n), path(n).
    """
    if family == "complete":
        n = _require_int(params, "n", 2)
        return [(0.0, 1), (float(n), n - 1)]
    if family == "complete_bipartite":
        m = _require_int(params, "m", 1)
        n = _require_int(params, "n", 1)
        pairs: dict[float, int] = {0.0: 1}
        for value, mult in ((float(m), n - 1), (float(n), m - 1), (float(m + n), 1)):
            if mult > 0:
                pairs[value] = pairs.get(value, 0) + mult
        return sorted(pairs.items())
    if family == "star":
        n = _require_int(params, "n", 2)
        out = [(0.0, 1)]
        if n > 2:
            out.append((1.0, n - 2))
        out.append((float(n), 1))
        return out
    if family == "cycle":
        n = _require_int(params, "n", 3)
        out = [(0.0, 1)]
        for k in range(1, (n - 1) // 2 + 1):
            out.append((2.0 - 2.0 * math.cos(2.0 * math.pi * k / n), 2))
        if n % 2 == 0:
            out.append((4.0, 1))
        return out
    if family == "path":
        n = _require_int(params, "n", 2)
        return [(2.0 - 2.0 * math.cos(math.pi * k / n), 1) for k in range(n)]
    raise ParameterError(f"no closed-form spectrum for family {family!r}")


def distinct_nonzero_eigenvalues(s: LaplacianSpectrum, group_tol: float | None = None) -> list[float]:
    """Group the nonzero eigenvalues to within group_tol * max(1, lambda_N).

    Returns the ascending group means. Raises ConnectivityError when lambda_2
    falls below the grouping tolerance (effectively disconnected graph).
    """
    tol = (s.group_tol if group_tol is None else group_tol) * max(1.0, s.lambda_max)
    if s.lambda_2 <= tol:
        raise ConnectivityError(f"lambda_2 = {s.lambda_2:.3e} is below tolerance {tol:.3e}")
    groups: list[list[float]] = []
    for v in s.eigenvalues[1:]:
        if groups and v - groups[-1][0] <= tol:
            groups[-1].append(float(v))
        else:
            groups.append([float(v)])
    return [float(np.mean(grp)) for grp in groups]


def band_contains(s: LaplacianSpectrum, b: SpectralBand) -> bool:
    """True iff [lambda_2, lambda_N] lies inside the band (1e-12 slack)."""
    return s.lambda_2 >= b.alpha - 1e-12 and s.lambda_max <= b.beta + 1e-12


# ---------------------------------------------------------------------------
# serialization

def graph_to_dict(g: Graph) -> dict:
    """Edge-list form: {"n": n, "edges": [[i, j, w], ...]} with i < j."""
    iu, ju, w = edge_arrays(g)
    return {"n": g.n, "edges": [[int(i), int(j), float(x)] for i, j, x in zip(iu, ju, w)]}


def graph_from_dict(d: dict) -> Graph:
    try:
        n = int(d["n"])
        edges = d["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed graph document: {exc}") from exc
    a = np.zeros((n, n))
    for e in edges:
        if len(e) != 3:
            raise ParameterError(f"edge entry {e!r} must be [i, j, w]")
        i, j, w = int(e[0]), int(e[1]), float(e[2])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ParameterError(f"edge ({i}, {j}) out of range for n={n}")
        if w <= 0.0:
            raise ParameterError(f"edge ({i}, {j}) has non-positive weight {w}")
        a[i, j] = a[j, i] = w
    return Graph(n, a)


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, indent=2)
        fh.write("\n")


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_dict(json.load(fh))


def spectrum_csv_lines(s: LaplacianSpectrum) -> list[str]:
    """CSV lines "index,eigenvalue" with 1-based index, ascending."""
    lines = ["index,eigenvalue"]
    lines += [f"{i + 1},{v:.6g}" for i, v in enumerate(s.eigenvalues)]
    return lines
