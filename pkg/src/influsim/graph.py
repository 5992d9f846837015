"""Immutable weighted directed social graph: ingestion, generation, degree queries.

Edges point from an account to its followers: the edge (x, y) means y follows
x, and its weight is the probability that x persuades y. Storage is CSR over
vertex ids 0..n-1 (``indptr``/``indices``/``weights``), which keeps the
follower block of a vertex contiguous for the propagation kernel.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GraphStats",
    "SocialGraph",
    "generate_small_world",
    "load_edge_list",
    "load_graph_npz",
    "normalized_outdegree",
    "save_graph_npz",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphStats:
    """Summary counts of a graph, exportable as JSON."""

    vertex_count: int
    edge_count: int
    max_outdegree: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertex_count": self.vertex_count,
                "edge_count": self.edge_count,
                "max_outdegree": self.max_outdegree,
            }
        )


class SocialGraph:
    """Weighted directed graph in CSR form, immutable after construction.

    Attributes
    ----------
    indptr : int64 array, shape (n+1,)
        CSR offsets; followers of vertex v are ``indices[indptr[v]:indptr[v+1]]``.
    indices : int32 array, shape (E,)
        Follower ids, sorted ascending within each source block.
    weights : float64 array, shape (E,)
        Influence probability of the source on each follower, in [0, 1].
    self_loops_skipped : int
        Count of self-loop input lines dropped during ingestion.
    """

    def __init__(
        self,
        indptr: np.ndarray,
        indices: np.ndarray,
        weights: np.ndarray,
        self_loops_skipped: int = 0,
    ) -> None:
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int32)
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        n = indptr.shape[0] - 1
        if n < 0 or indptr[0] != 0 or indptr[-1] != indices.shape[0]:
            raise ValueError("malformed CSR offsets")
        if weights.shape[0] != indices.shape[0]:
            raise ValueError("weights length must match indices length")
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise ValueError("follower id out of range")
        if weights.size and (weights.min() < 0.0 or weights.max() > 1.0):
            raise ValueError("edge weight outside [0, 1]")
        self._validate_blocks(indptr, indices, n)
        for arr in (indptr, indices, weights):
            arr.setflags(write=False)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.vertex_count = n
        self.edge_count = int(indices.shape[0])
        outdeg = np.diff(indptr)
        self.outdegrees = outdeg
        self.outdegrees.setflags(write=False)
        self.max_outdegree = int(outdeg.max()) if n > 0 else 0
        self.self_loops_skipped = self_loops_skipped

    @staticmethod
    def _validate_blocks(indptr: np.ndarray, indices: np.ndarray, n: int) -> None:
        # Per-source blocks must be strictly increasing: sorted and without
        # duplicate targets. Self-loops are checked separately.
        if indices.size == 0:
            return
        if indices.size > 1:
            diffs = np.diff(indices)
            boundaries = indptr[1:-1]
            boundaries = boundaries[(boundaries > 0) & (boundaries < indices.size)]
            interior = np.ones(indices.size - 1, dtype=bool)
            interior[boundaries - 1] = False
            if np.any(diffs[interior] <= 0):
                raise ValueError("duplicate directed edge in follower block")
        srcs = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
        if np.any(srcs == indices):
            raise ValueError("self-loop edge")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: np.ndarray | list[tuple[int, int]],
        weights: np.ndarray | list[float] | None = None,
        rng: np.random.Generator | None = None,
    ) -> "SocialGraph":
        """Build a graph from directed (src, dst) pairs.

        Duplicate pairs collapse to one edge (the first occurrence wins when
        explicit weights are given); self-loops are rejected. When ``weights``
        is omitted, each edge draws uniform [0, 1) from ``rng`` in canonical
        (src, dst) order.
        """
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        src, dst = arr[:, 0], arr[:, 1]
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("vertex id out of range")
        if np.any(src == dst):
            raise ValueError("self-loop edge")
        keys = src * np.int64(n) + dst
        if weights is None:
            uniq = np.unique(keys)
            if rng is None:
                raise ValueError("rng required when weights are not given")
            w = rng.random(uniq.shape[0])
        else:
            win = np.asarray(weights, dtype=np.float64)
            if win.shape[0] != keys.shape[0]:
                raise ValueError("one weight per edge required")
            uniq, first = np.unique(keys, return_index=True)
            w = win[first]
        s = (uniq // n).astype(np.int64)
        d = (uniq % n).astype(np.int32)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, s + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(indptr, d, w)

    def stats(self) -> GraphStats:
        return GraphStats(self.vertex_count, self.edge_count, self.max_outdegree)

    def followers(self, v: int) -> np.ndarray:
        """Follower ids of vertex v (read-only view)."""
        self._check_vertex(v)
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def outdegree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.outdegrees[v])

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"vertex {v} not in graph of {self.vertex_count} vertices")


def normalized_outdegree(graph: SocialGraph, v: int) -> float:
    """Outdegree of v as a percentage of the graph's maximum outdegree."""
    graph._check_vertex(v)
    if graph.max_outdegree == 0:
        raise ValueError("degenerate graph: max outdegree is 0")
    return 100.0 * graph.outdegree(v) / graph.max_outdegree


def _parse_edge_lines(path: str) -> tuple[list[int], list[int]]:
    srcs: list[int] = []
    dsts: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two vertex ids, got {stripped!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: expected two integer ids, got {stripped!r}"
                ) from None
            srcs.append(a)
            dsts.append(b)
    return srcs, dsts


def load_edge_list(path: str, orientation: str, rng: np.random.Generator) -> SocialGraph:
    """Load a plain-text edge list into a SocialGraph.

    Each non-comment line holds two whitespace-separated integer ids "a b".
    With orientation ``"as-is"`` the line becomes the directed edge a -> b
    (b follows a); ``"reversed"`` flips each pair, for files whose lines mean
    "a follows b". Raw ids are remapped to 0..n-1 in ascending id order.
    Duplicate directed edges collapse; self-loops are skipped (warned, with a
    count kept on the graph). Each surviving edge draws a uniform [0, 1)
    weight from ``rng`` in canonical (src, dst) order.
    """
    if orientation not in ("as-is", "reversed"):
        raise ValueError(f"unknown orientation {orientation!r}")
    srcs, dsts = _parse_edge_lines(path)
    if not srcs:
        raise ValueError(f"{path}: no edges")
    a = np.asarray(srcs, dtype=np.int64)
    b = np.asarray(dsts, dtype=np.int64)
    if orientation == "reversed":
        a, b = b, a

    ids = np.unique(np.concatenate([a, b]))
    n = ids.shape[0]
    src = np.searchsorted(ids, a)
    dst = np.searchsorted(ids, b)

    loop_mask = src == dst
    n_loops = int(loop_mask.sum())
    if n_loops:
        logger.warning("%s: skipped %d self-loop line(s)", path, n_loops)
        src, dst = src[~loop_mask], dst[~loop_mask]
    if src.size == 0:
        raise ValueError(f"{path}: no edges")

    keys = np.unique(src * np.int64(n) + dst)
    s = (keys // n).astype(np.int64)
    d = (keys % n).astype(np.int32)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, s + 1, 1)
    np.cumsum(indptr, out=indptr)
    w = rng.random(keys.shape[0])
    return SocialGraph(indptr, d, w, self_loops_skipped=n_loops)


def _in_sorted(sorted_arr: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Membership mask of ``values`` against a sorted array (empty-safe)."""
    if sorted_arr.size == 0:
        return np.zeros(values.shape[0], dtype=bool)
    pos = np.searchsorted(sorted_arr, values)
    in_range = pos < sorted_arr.size
    hit = np.zeros(values.shape[0], dtype=bool)
    hit[in_range] = sorted_arr[pos[in_range]] == values[in_range]
    return hit


def _rewire_ring_edges(
    n: int,
    src: np.ndarray,
    dst: np.ndarray,
    p_rewire: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Rewire ring-lattice edges in place of the classic sequential pass.

    Each ring edge (u, v) is independently selected with probability
    ``p_rewire``; selected edges are replaced by (u, w) with w uniform,
    rejecting self-loops and duplicates against every edge still present:
    the kept edges, finished replacements, and the originals of edges not
    yet rewired. A source already connected to all other vertices keeps
    its original edge, so the pass terminates at any density and edge
    count is preserved exactly.
    """
    m = src.shape[0]
    rewire = rng.random(m) < p_rewire
    if not rewire.any():
        return src, dst

    kept_keys = np.minimum(src[~rewire], dst[~rewire]) * np.int64(n) + np.maximum(
        src[~rewire], dst[~rewire]
    )
    kept_keys.sort()

    psrc = src[rewire]
    pdst = dst[rewire]
    pkeys = np.minimum(psrc, pdst) * np.int64(n) + np.maximum(psrc, pdst)
    resolved_keys = np.empty(0, dtype=np.int64)
    new_src: list[np.ndarray] = [src[~rewire]]
    new_dst: list[np.ndarray] = [dst[~rewire]]

    rounds = 0
    while psrc.size and rounds < 10_000:
        rounds += 1
        cand_dst = rng.integers(0, n, size=psrc.size, dtype=np.int64)
        lo = np.minimum(psrc, cand_dst)
        hi = np.maximum(psrc, cand_dst)
        cand_keys = lo * np.int64(n) + hi
        ok = psrc != cand_dst
        ok &= ~_in_sorted(kept_keys, cand_keys)
        ok &= ~_in_sorted(resolved_keys, cand_keys)
        ok &= ~_in_sorted(np.sort(pkeys), cand_keys)
        # First occurrence of each within-round duplicate key wins.
        order = np.argsort(cand_keys, kind="stable")
        sorted_keys = cand_keys[order]
        dup_follow = np.zeros(cand_keys.size, dtype=bool)
        dup_follow[order[1:]] = sorted_keys[1:] == sorted_keys[:-1]
        ok &= ~dup_follow

        new_src.append(psrc[ok])
        new_dst.append(cand_dst[ok])
        resolved_keys = np.sort(np.concatenate([resolved_keys, cand_keys[ok]]))
        stalled = not ok.any()
        psrc, pdst, pkeys = psrc[~ok], pdst[~ok], pkeys[~ok]

        if stalled and psrc.size:
            # a source adjacent to every other vertex can never rewire;
            # keep its original lattice edge, as the sequential pass does
            degree = np.zeros(n, dtype=np.int64)
            for keys in (kept_keys, resolved_keys, pkeys):
                degree += np.bincount(keys // n, minlength=n)
                degree += np.bincount(keys % n, minlength=n)
            saturated = degree[psrc] >= n - 1
            if saturated.any():
                new_src.append(psrc[saturated])
                new_dst.append(pdst[saturated])
                resolved_keys = np.sort(
                    np.concatenate([resolved_keys, pkeys[saturated]])
                )
                psrc, pdst, pkeys = (
                    psrc[~saturated],
                    pdst[~saturated],
                    pkeys[~saturated],
                )

    if psrc.size:
        # rejection sampling kept colliding; resolve the stragglers exactly
        blocked = set(
            np.concatenate([kept_keys, resolved_keys, pkeys]).tolist()
        )
        for u, v, key in zip(psrc.tolist(), pdst.tolist(), pkeys.tolist()):
            free = np.array(
                [
                    w
                    for w in range(n)
                    if w != u and min(u, w) * n + max(u, w) not in blocked
                ],
                dtype=np.int64,
            )
            if free.size:
                w = int(rng.choice(free))
                blocked.discard(key)
                blocked.add(min(u, w) * n + max(u, w))
            else:
                w = v
            new_src.append(np.array([u], dtype=np.int64))
            new_dst.append(np.array([w], dtype=np.int64))

    return np.concatenate(new_src), np.concatenate(new_dst)


def generate_small_world(
    n: int,
    k: int,
    p_rewire: float,
    orientation: str,
    rng: np.random.Generator,
) -> SocialGraph:
    """Generate a Watts-Strogatz small-world graph and orient its edges.

    A ring lattice of n vertices, each linked to its k nearest neighbours
    (k/2 per side), is rewired with probability ``p_rewire`` per edge,
    yielding exactly n*k/2 undirected edges. Orientation
    ``"both-directions"`` emits every undirected edge as two directed edges;
    ``"random-single"`` keeps one directed edge per undirected edge with a
    fair coin for its direction. Weights are uniform [0, 1) in canonical
    (src, dst) order.
    """
    if orientation not in ("both-directions", "random-single"):
        raise ValueError(f"unknown orientation {orientation!r}")
    if k % 2 != 0 or k < 2:
        raise ValueError("k must be even and >= 2")
    if n <= k:
        raise ValueError("n must be greater than k")
    if not 0.0 <= p_rewire <= 1.0:
        raise ValueError("p_rewire must be in [0, 1]")

    half = k // 2
    base = np.arange(n, dtype=np.int64)
    src = np.repeat(base, half)
    offsets = np.tile(np.arange(1, half + 1, dtype=np.int64), n)
    dst = (src + offsets) % n

    src, dst = _rewire_ring_edges(n, src, dst, p_rewire, rng)

    if orientation == "both-directions":
        all_src = np.concatenate([src, dst])
        all_dst = np.concatenate([dst, src])
    else:
        flip = rng.random(src.shape[0]) < 0.5
        all_src = np.where(flip, dst, src)
        all_dst = np.where(flip, src, dst)

    keys = all_src * np.int64(n) + all_dst
    keys.sort()
    s = (keys // n).astype(np.int64)
    d = (keys % n).astype(np.int32)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, s + 1, 1)
    np.cumsum(indptr, out=indptr)
    w = rng.random(keys.shape[0])
    return SocialGraph(indptr, d, w)


def save_graph_npz(graph: SocialGraph, path: str) -> None:
    """Serialize a graph to an .npz file (uncompressed, loads back exactly)."""
    np.savez(
        path,
        indptr=graph.indptr,
        indices=graph.indices,
        weights=graph.weights,
        self_loops_skipped=np.int64(graph.self_loops_skipped),
    )


def load_graph_npz(path: str) -> SocialGraph:
    with np.load(path) as data:
        return SocialGraph(
            data["indptr"],
            data["indices"],
            data["weights"],
            self_loops_skipped=int(data["self_loops_skipped"]),
        )
