"""
Monthly cross-correlation matrices and threshold networks.

The correlation of entities i and j over a window is

    C_ij = (<R_i R_j> - mu_i mu_j) / sqrt((<R_i^2> - mu_i^2)(<R_j^2> - mu_j^2))

with <.> the plain window average. It is evaluated in centred form (two-pass),
which is algebraically identical and avoids cancellation.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from plungekit.errors import InputError, NumericalError
from plungekit.ingest import _frozen
from plungekit.metrics import ReturnPanel, _window_block

DEFAULT_THRESHOLD = 0.9
SENSITIVITY_THRESHOLDS = (0.75, 0.80, 0.85, 0.90, 0.95)

# raw floating-point overshoot past +-1 tolerated before clamping
_OVERSHOOT_TOL = 1e-9


@dataclass(frozen=True)
class CorrelationMatrix:
    entities: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    degenerate_entities: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "degenerate_entities", frozenset(self.degenerate_entities))
        n = len(self.entities)
        if self.values.shape != (n, n):
            raise InputError(f"correlation matrix must be {n}x{n}, got {self.values.shape}")

    @property
    def n(self) -> int:
        return len(self.entities)

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_entities)

    @classmethod
    def from_array(cls, values, entities=None) -> "CorrelationMatrix":
        values = np.asarray(values, dtype=float)
        if entities is None:
            entities = [f"E{i + 1:02d}" for i in range(values.shape[0])]
        return cls(tuple(entities), values)


@dataclass(frozen=True)
class CorrStats:
    mean: float
    stdev: float
    ratio: float | None  # None when mean == 0
    min: float
    max: float


@dataclass(frozen=True)
class AdjacencyGraph:
    threshold: float
    entities: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def normalized_connectedness(self) -> float:
        n = len(self.entities)
        pairs = n * (n - 1) // 2
        return self.edge_count / pairs if pairs else 0.0

    def named_edges(self) -> set[frozenset[str]]:
        return {frozenset((self.entities[i], self.entities[j])) for i, j in self.edges}


class GraphFormat(str, enum.Enum):
    DOT = "dot"
    EDGE_LIST_JSON = "edge_list_json"


def correlation_matrix(returns: ReturnPanel, window) -> CorrelationMatrix:
    """Pearson correlations of the returns inside ``window``.

    Entities whose returns are constant over the window are flagged as
    degenerate: their off-diagonal entries are 0 and their diagonal stays 1.
    """
    block = _window_block(returns, window)
    t, n = block.shape
    if t < 2:
        raise InputError(f"correlation needs at least 2 observations, window has {t}")

    centred = block - block.mean(axis=0)
    degenerate = np.ptp(block, axis=0) == 0
    centred[:, degenerate] = 0.0
    cov = centred.T @ centred / t
    sd = np.sqrt(np.diag(cov))
    sd[degenerate] = 1.0
    corr = cov / np.outer(sd, sd)
    corr = (corr + corr.T) / 2

    overshoot = np.max(np.abs(corr)) - 1.0 if corr.size else 0.0
    if overshoot > _OVERSHOOT_TOL:
        raise NumericalError(f"correlation overshoot {overshoot:.3g} beyond rounding tolerance")
    np.clip(corr, -1.0, 1.0, out=corr)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(returns.entities, corr, frozenset(np.flatnonzero(degenerate).tolist()))


def _upper_offdiag(c: CorrelationMatrix) -> np.ndarray:
    iu = np.triu_indices(c.n, k=1)
    return c.values[iu]


def corr_stats(c: CorrelationMatrix) -> CorrStats:
    """Mean, population stdev, stdev/mean, min and max of the i<j entries."""
    if c.n < 2:
        raise InputError("correlation statistics need at least 2 entities")
    off = _upper_offdiag(c)
    mean = float(off.mean())
    # keep min <= mean <= max exact when all entries agree
    if np.ptp(off) == 0:
        mean, stdev = float(off[0]), 0.0
    else:
        stdev = float(np.sqrt(((off - mean) ** 2).mean()))
    ratio = stdev / mean if mean != 0 else None
    return CorrStats(mean, stdev, ratio, float(off.min()), float(off.max()))


def adjacency(c: CorrelationMatrix, t: float = DEFAULT_THRESHOLD) -> AdjacencyGraph:
    if not 0.0 <= t <= 1.0:
        raise InputError(f"threshold must lie in [0, 1], got {t}")
    iu, ju = np.triu_indices(c.n, k=1)
    keep = c.values[iu, ju] >= t
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
    return AdjacencyGraph(float(t), c.entities, edges)


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(g: AdjacencyGraph, fmt: GraphFormat | str = GraphFormat.DOT) -> str:
    """Render a graph as Graphviz DOT or an edge-list JSON document.

    Nodes come out in panel order and edges in lexicographic index order, so
    the output is byte-stable for a given graph.
    """
    fmt = GraphFormat(fmt)
    edges = sorted(g.edges)
    if fmt is GraphFormat.DOT:
        lines = ["graph {", f"  // threshold {g.threshold:g}, {len(edges)} edges"]
        lines += [f"  {_dot_quote(e)};" for e in g.entities]
        lines += [f"  {_dot_quote(g.entities[i])} -- {_dot_quote(g.entities[j])};" for i, j in edges]
        lines.append("}")
        return "\n".join(lines) + "\n"
    doc = {
        "threshold": g.threshold,
        "nodes": list(g.entities),
        "edges": [[g.entities[i], g.entities[j]] for i, j in edges],
    }
    return json.dumps(doc, indent=2) + "\n"
