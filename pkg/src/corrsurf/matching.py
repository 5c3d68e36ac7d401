"""Minimum-weight perfect-matching decoding on detector graphs.

Error mechanisms with one or two detectors become graph edges (two-detector
mechanisms join the detectors, one-detector mechanisms join the detector to
a shared boundary) with weight ln((1-p)/p).  Decoding pairs up the fired
detectors by exact minimum-weight perfect matching, using boundary copies
so any number of defects can terminate on the boundary.

Weights are quantized to int64 before matching so the blossom solver runs
on exact integer arithmetic and ties break deterministically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import pauli
from ._blossom import max_weight_matching as _max_weight_matching
from ._blossom import min_weight_perfect_matching as _min_weight_perfect_matching
from ._blossom import decode_batch as _decode_batch
from .errors import ConfigError, InfeasibleDecodeError
from .noise import NoiseModel
from .pauli import PauliOp

WEIGHT_SCALE = 2**32
_INF_WEIGHT = 2**61


@dataclass(frozen=True)
class GraphEdge:
    """One matching edge; v is None for edges to the boundary."""

    u: int
    v: int | None
    weight: float
    probability: float
    flips_observable: bool
    pauli: PauliOp | None = None


@dataclass(frozen=True)
class DetectorGraph:
    num_detectors: int
    nodes: tuple[int, ...]
    edges: tuple[GraphEdge, ...]
    n_qubits: int | None = None


def edge_weight(p: float) -> float:
    """ln((1-p)/p); defined for 0 < p < 0.5."""
    if not 0.0 < p < 0.5:
        raise ConfigError(f"edge probability must be in (0, 0.5), got {p}")
    return math.log((1.0 - p) / p)


def build_graph_from_mechanisms(
    mechanisms: Sequence,
    num_detectors: int,
    n_qubits: int | None = None,
) -> DetectorGraph:
    """Turn <=2-detector mechanisms into a matching graph.

    Zero-probability mechanisms are dropped; probabilities at or above 0.5
    are rejected (their weight would be non-positive).  Parallel edges are
    merged, keeping the lowest-weight one.
    """
    best: dict[tuple[int, int | None], GraphEdge] = {}
    nodes: set[int] = set()
    for mech in mechanisms:
        dets = sorted(mech.detectors)
        if len(dets) > 2:
            raise ConfigError(
                "mechanism touches more than two detectors: "
                f"{dets} (support {getattr(mech, 'pauli', None)})"
            )
        if not dets:
            raise ConfigError("mechanism with no detectors cannot be matched")
        p = mech.probability
        if p == 0.0:
            continue
        w = edge_weight(p)
        if len(dets) == 2:
            key: tuple[int, int | None] = (dets[0], dets[1])
        else:
            key = (dets[0], None)
        edge = GraphEdge(
            u=key[0],
            v=key[1],
            weight=w,
            probability=p,
            flips_observable=mech.flips_observable,
            pauli=getattr(mech, "pauli", None),
        )
        if key not in best or w < best[key].weight:
            best[key] = edge
        nodes.update(dets)
    edges = tuple(best[k] for k in sorted(best, key=lambda k: (k[0], -1 if k[1] is None else k[1])))
    return DetectorGraph(
        num_detectors=num_detectors,
        nodes=tuple(sorted(nodes)),
        edges=edges,
        n_qubits=n_qubits,
    )


def build_matching_graph(model: NoiseModel) -> DetectorGraph:
    return build_graph_from_mechanisms(
        model.mechanisms, model.num_detectors, n_qubits=model.code.n
    )


def _quantize(weights: np.ndarray) -> np.ndarray:
    out = np.where(
        np.isfinite(weights),
        np.rint(weights * WEIGHT_SCALE),
        float(_INF_WEIGHT),
    )
    return out.astype(np.int64)


class _PathTables:
    """Dense shortest-path tables for one detector graph."""

    def __init__(self, graph: DetectorGraph):
        self.graph = graph
        self.nodes = np.array(graph.nodes, dtype=np.int64)
        index = {g: i for i, g in enumerate(graph.nodes)}
        self.index = index
        n = len(graph.nodes)
        self.n = n

        rows, cols, vals = [], [], []
        eflip = np.zeros((n, n), dtype=np.uint8)
        self.edge_lookup: dict[tuple[int, int], GraphEdge] = {}
        self.boundary_edges: dict[int, GraphEdge] = {}
        bweight = np.full(n, np.inf)
        bflip = np.zeros(n, dtype=np.uint8)
        for e in graph.edges:
            u = index[e.u]
            if e.v is None:
                if e.weight < bweight[u]:
                    bweight[u] = e.weight
                    bflip[u] = e.flips_observable
                    self.boundary_edges[u] = e
                continue
            v = index[e.v]
            rows += [u, v]
            cols += [v, u]
            vals += [e.weight, e.weight]
            eflip[u, v] = eflip[v, u] = e.flips_observable
            self.edge_lookup[(u, v)] = e
            self.edge_lookup[(v, u)] = e
        adj = csr_matrix((vals, (rows, cols)), shape=(n, n))

        dist, pred = dijkstra(adj, directed=False, return_predecessors=True)
        flip = np.zeros((n, n), dtype=np.uint8)
        for i in range(n):
            order = np.argsort(dist[i], kind="stable")
            for j in order:
                p = pred[i, j]
                if p < 0 or j == i:
                    continue
                flip[i, j] = flip[i, p] ^ eflip[p, j]
        self.dist = dist
        self.pred = pred
        self.flip = flip

        # Boundary tables: augment with a virtual node n and run one more
        # single-source pass from it.
        brows = list(rows)
        bcols = list(cols)
        bvals = list(vals)
        for u in range(n):
            if np.isfinite(bweight[u]):
                brows += [u, n]
                bcols += [n, u]
                bvals += [bweight[u], bweight[u]]
        badj = csr_matrix((bvals, (brows, bcols)), shape=(n + 1, n + 1))
        bdist, bpred = dijkstra(
            badj, directed=False, indices=n, return_predecessors=True
        )
        flipb = np.zeros(n + 1, dtype=np.uint8)
        for j in np.argsort(bdist, kind="stable"):
            p = bpred[j]
            if p < 0 or j == n:
                continue
            if p == n:
                flipb[j] = bflip[j]
            else:
                flipb[j] = flipb[p] ^ eflip[p, j]
        self.dist_boundary = bdist[:n]
        self.pred_boundary = bpred
        self.flip_boundary = flipb[:n]
        self.bweight = bweight

        self.dist_q = _quantize(dist)
        self.dist_boundary_q = _quantize(self.dist_boundary)

    def path_edges(self, i: int, j: int) -> list[GraphEdge]:
        """Graph edges along the shortest i -> j path (local indices)."""
        if not np.isfinite(self.dist[i, j]):
            raise InfeasibleDecodeError(
                f"detectors {self.graph.nodes[i]} and {self.graph.nodes[j]} "
                "are disconnected"
            )
        out = []
        cur = j
        while cur != i:
            p = self.pred[i, cur]
            out.append(self.edge_lookup[(p, cur)])
            cur = p
        return out

    def boundary_path_edges(self, i: int) -> list[GraphEdge]:
        """Edges along the shortest path from local node i to the boundary."""
        if not np.isfinite(self.dist_boundary[i]):
            raise InfeasibleDecodeError(
                f"detector {self.graph.nodes[i]} cannot reach the boundary"
            )
        out = []
        cur = i
        while True:
            p = self.pred_boundary[cur]
            if p == self.n:
                out.append(self.boundary_edges[cur])
                return out
            out.append(self.edge_lookup[(p, cur)])
            cur = p


@dataclass(frozen=True)
class MatchingResult:
    matched_pairs: tuple[tuple[int, int | None], ...]  # global detector ids
    correction: PauliOp | None
    logical_flip: bool
    total_weight: float


def blossom_mwpm(
    num_nodes: int, edges: Sequence[tuple[int, int, float]]
) -> list[tuple[int, int]]:
    """Exact minimum-weight perfect matching on float weights."""
    scaled = [(u, v, int(round(w * WEIGHT_SCALE))) for u, v, w in edges]
    try:
        return [tuple(p) for p in _min_weight_perfect_matching(num_nodes, scaled)]
    except (RuntimeError, ValueError) as exc:
        raise InfeasibleDecodeError(str(exc)) from exc


def brute_force_mwpm(
    num_nodes: int, edges: Sequence[tuple[int, int, float]]
) -> list[tuple[int, int]] | None:
    """Reference perfect matching by exhaustive pairing (oracle use only)."""
    weight = {}
    for u, v, w in edges:
        key = (min(u, v), max(u, v))
        if key not in weight or w < weight[key]:
            weight[key] = w
    best: tuple[float, list[tuple[int, int]]] | None = None

    def recurse(remaining: list[int], acc: float, pairs: list[tuple[int, int]]):
        nonlocal best
        if not remaining:
            if best is None or acc < best[0]:
                best = (acc, list(pairs))
            return
        a = remaining[0]
        for idx in range(1, len(remaining)):
            b = remaining[idx]
            key = (min(a, b), max(a, b))
            if key not in weight:
                continue
            rest = remaining[1:idx] + remaining[idx + 1:]
            pairs.append(key)
            recurse(rest, acc + weight[key], pairs)
            pairs.pop()

    recurse(list(range(num_nodes)), 0.0, [])
    return None if best is None else best[1]


def decode(graph: DetectorGraph, detector_bits: Sequence[int]) -> MatchingResult:
    """Decode one syndrome; returns pairing, correction, and flip estimate."""
    tables = _PathTables(graph)
    return _decode_with_tables(graph, tables, detector_bits)


def _decode_with_tables(
    graph: DetectorGraph, tables: _PathTables, detector_bits: Sequence[int]
) -> MatchingResult:
    defects = []
    for det in range(graph.num_detectors):
        if detector_bits[det]:
            if det not in tables.index:
                raise InfeasibleDecodeError(
                    f"detector {det} fired but no mechanism can produce it"
                )
            defects.append(tables.index[det])
    m = len(defects)
    n_q = graph.n_qubits
    correction = pauli.identity(n_q) if n_q is not None else None
    if m == 0:
        return MatchingResult((), correction, False, 0.0)

    chosen_paths: list[list[GraphEdge]] = []
    pairs_out: list[tuple[int, int | None]] = []
    if m == 1:
        chosen_paths.append(tables.boundary_path_edges(defects[0]))
        pairs_out.append((graph.nodes[defects[0]], None))
    else:
        # Defect-copy construction: node a pairs with copy m+a for boundary.
        edges = []
        for a in range(m):
            da = defects[a]
            for b in range(a + 1, m):
                db = defects[b]
                if np.isfinite(tables.dist[da, db]):
                    edges.append((a, b, int(tables.dist_q[da, db])))
            if np.isfinite(tables.dist_boundary[da]):
                edges.append((a, m + a, int(tables.dist_boundary_q[da])))
        for a in range(m):
            for b in range(a + 1, m):
                edges.append((m + a, m + b, 0))
        try:
            mate_pairs = _min_weight_perfect_matching(2 * m, edges)
        except (RuntimeError, ValueError) as exc:
            raise InfeasibleDecodeError(str(exc)) from exc
        for a, b in mate_pairs:
            if a >= m:
                continue
            if b >= m:
                if b != m + a:
                    # copy of another defect: equivalent to boundary for a
                    pass
                chosen_paths.append(tables.boundary_path_edges(defects[a]))
                pairs_out.append((graph.nodes[defects[a]], None))
            else:
                chosen_paths.append(tables.path_edges(defects[a], defects[b]))
                pairs_out.append(
                    (graph.nodes[defects[a]], graph.nodes[defects[b]])
                )

    flip = False
    total = 0.0
    for path in chosen_paths:
        for e in path:
            flip ^= e.flips_observable
            total += e.weight
            if correction is not None:
                if e.pauli is None:
                    correction = None
                else:
                    correction = pauli.multiply(correction, e.pauli)
    return MatchingResult(tuple(pairs_out), correction, flip, total)


class ComponentDecoder:
    """Reusable decoder for one detector graph with cached path tables."""

    def __init__(self, graph: DetectorGraph):
        self.graph = graph
        self.tables = _PathTables(graph)

    def decode(self, detector_bits: Sequence[int]) -> MatchingResult:
        return _decode_with_tables(self.graph, self.tables, detector_bits)

    def decode_batch(
        self, detector_bits: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """(shots, num_detectors) 0/1 -> (predicted flips, total weights)."""
        t = self.tables
        sub = np.ascontiguousarray(detector_bits[:, t.nodes] != 0)
        rows, cols = np.nonzero(sub)
        offsets = np.searchsorted(
            rows, np.arange(detector_bits.shape[0] + 1)
        ).astype(np.int64)
        flips, weights = _decode_batch(
            t.dist_q,
            t.dist_boundary_q,
            t.flip,
            t.flip_boundary,
            cols.astype(np.int32),
            offsets,
        )
        if weights.size and int(weights.max()) >= _INF_WEIGHT:
            raise InfeasibleDecodeError(
                "a syndrome required a disconnected matching path"
            )
        return flips, weights


class BatchDecoder:
    """Decoder over several syndrome-disjoint graphs (one per component)."""

    def __init__(self, graphs: Sequence[DetectorGraph]):
        if not graphs:
            raise ConfigError("need at least one detector graph")
        self.components = [ComponentDecoder(g) for g in graphs]

    def decode_batch(self, detector_bits: np.ndarray) -> np.ndarray:
        """Predicted observable flips, XORed across components."""
        out = np.zeros(detector_bits.shape[0], dtype=np.uint8)
        for comp in self.components:
            flips, _ = comp.decode_batch(detector_bits)
            out ^= flips
        return out


def decode_ml_bruteforce(model: NoiseModel) -> dict[tuple[int, ...], PauliOp]:
    """Exact maximum-likelihood decode table by full mechanism enumeration.

    Returns {syndrome: correction}, where the correction's coset maximizes
    the total probability of all firing patterns producing that syndrome.
    Only feasible for models with at most 20 mechanisms.
    """
    mechs = model.mechanisms
    if len(mechs) > 20:
        raise ConfigError(
            f"brute-force decoding limited to 20 mechanisms, got {len(mechs)}"
        )
    code = model.code
    rep: dict[tuple[int, ...], PauliOp] = {}
    class_prob: dict[tuple[tuple[int, ...], str], float] = {}
    for bits in itertools.product((0, 1), repeat=len(mechs)):
        prob = 1.0
        err = pauli.identity(code.n)
        for fired, mech in zip(bits, mechs):
            prob *= mech.probability if fired else 1.0 - mech.probability
            if fired:
                err = pauli.multiply(err, mech.pauli)
        from . import lattice

        syn = lattice.syndrome(code, err)
        if syn not in rep:
            rep[syn] = err
        residual = pauli.multiply(err, rep[syn])
        cls = pauli.logical_class(
            code.stabilizer_span, (code.logical_x, code.logical_z), residual
        )
        class_prob[(syn, cls)] = class_prob.get((syn, cls), 0.0) + prob

    logical_ops = {
        "stabilizer": pauli.identity(code.n),
        "logical-x": code.logical_x,
        "logical-z": code.logical_z,
        "logical-y": pauli.multiply(code.logical_x, code.logical_z),
    }
    out = {}
    for syn, base in rep.items():
        best_cls = max(
            pauli.LOGICAL_CLASSES,
            key=lambda c: class_prob.get((syn, c), -1.0),
        )
        out[syn] = pauli.multiply(base, logical_ops[best_cls])
    return out
