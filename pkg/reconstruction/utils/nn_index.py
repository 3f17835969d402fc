"""
Exact 2D k-nearest-neighbour search over a uniform bucket grid.

Cells are square with side = bounding-box diagonal / sqrt(n). Buckets are
stored in key order (row-major by cell), so every row of a cell box maps
to one contiguous slice of the sorted points.

A query starts with the smallest box around its (clamped) home cell that
holds any point, then widens the box just far enough that nothing outside
it can beat the current k-th best squared distance. Queries outside the
bounding box add their squared gap to the box to that bound, so the cost
does not grow with how far a query sits from the points. Ties are broken
by the lower point index.
"""
import logging

import numpy as np

from ..exceptions import EmptySet, KTooLarge

logger = logging.getLogger(__name__)

# relative slack on the out-of-box gap, absorbs rounding in the bound
_GAP_SLACK = 1e-9


def squared_distances(a, b):
    """Pairwise squared distances, (len(a), len(b)); same arithmetic as the index."""
    dx = a[:, None, 0] - b[None, :, 0]
    dy = a[:, None, 1] - b[None, :, 1]
    return dx * dx + dy * dy


def brute_force_knn(points, queries, k):
    """O(n m) reference search with the same tie rule as Index2D."""
    points = np.asarray(points, dtype=np.float64)
    queries = np.asarray(queries, dtype=np.float64).reshape(-1, 2)
    d2 = squared_distances(queries, points)
    idx = np.broadcast_to(np.arange(len(points)), d2.shape)
    order = np.lexsort((idx, d2), axis=-1)[:, :k]
    return order, np.take_along_axis(d2, order, axis=1)


def occupied_distance(occupied):
    """Chebyshev distance, in cells, from every cell to the nearest occupied one."""
    dist = np.zeros(occupied.shape, dtype=np.intp)
    reached = occupied.copy()
    r = 0
    while not reached.all():
        r += 1
        tall = reached.copy()
        tall[1:] |= reached[:-1]
        tall[:-1] |= reached[1:]
        grown = tall.copy()
        grown[:, 1:] |= tall[:, :-1]
        grown[:, :-1] |= tall[:, 1:]
        dist[grown & ~reached] = r
        reached = grown
    return dist


def _expand(lengths):
    """Owner row and offset within the run for every element of concatenated runs."""
    owner = np.repeat(np.arange(len(lengths)), lengths)
    within = np.arange(int(lengths.sum())) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return owner, within


class Index2D:
    """Immutable grid index over a PointSet2D (or an (n, 2) array)."""

    def __init__(self, points):
        pts = np.array(getattr(points, 'points', points), dtype=np.float64).reshape(-1, 2)
        if len(pts) == 0:
            raise EmptySet("Cannot build a nearest-neighbour index over an empty point set")
        pts.setflags(write=False)
        self.points = pts
        self.n = len(pts)

        self.lo = pts.min(axis=0)
        self.hi = pts.max(axis=0)
        extent = self.hi - self.lo
        diagonal = float(np.hypot(extent[0], extent[1]))
        self.cell = diagonal / np.sqrt(self.n) if diagonal > 0.0 else 1.0
        self.shape = (np.floor(extent / self.cell).astype(np.intp) + 1)

        cells = self._cell_of(pts)
        keys = cells[:, 1] * self.shape[0] + cells[:, 0]
        self.order = np.argsort(keys, kind='stable')
        counts = np.bincount(keys, minlength=int(self.shape[0] * self.shape[1]))
        self.bounds = np.concatenate([[0], np.cumsum(counts)])
        # indexed [row, column]
        self.first_ring = occupied_distance((counts > 0).reshape(self.shape[1], self.shape[0]))

    @classmethod
    def build(cls, points):
        return cls(points)

    def __len__(self):
        return self.n

    def _cell_of(self, pts):
        cells = np.floor((pts - self.lo) / self.cell).astype(np.intp)
        return np.clip(cells, 0, self.shape - 1)

    def query(self, queries, k=1):
        """
        k nearest indexed points for every row of `queries`.

        Returns (indices, squared distances), both of shape (m, k), sorted
        ascending by distance then by point index.
        """
        if k < 1 or k > self.n:
            raise KTooLarge(f"Requested {k} neighbours from an index of {self.n} points")
        q = np.asarray(getattr(queries, 'points', queries), dtype=np.float64).reshape(-1, 2)
        m = len(q)
        best_d = np.full((m, k), np.inf)
        best_i = np.full((m, k), self.n, dtype=np.intp)
        if m == 0:
            return best_i, best_d

        home = self._cell_of(q)
        gap = np.clip(self.lo - q, 0.0, None) + np.clip(q - self.hi, 0.0, None)
        # every indexed point is at least this far from its query
        floor_d = (gap[:, 0] * gap[:, 0] + gap[:, 1] * gap[:, 1]) * (1.0 - _GAP_SLACK)
        reach = np.maximum(home, self.shape - 1 - home).max(axis=1)

        outer = self.first_ring[home[:, 1], home[:, 0]]
        inner = np.full(m, -1, dtype=np.intp)
        active = np.arange(m)
        passes = 0
        while len(active):
            passes += 1
            cand_q, cand_i = self._gather(home[active], outer[active], inner[active])
            self._merge(q, active[cand_q], cand_i, best_d, best_i, k)

            r = outer[active]
            kth = best_d[active, k - 1]
            # points outside a box of radius r are at least r cells from the home cell
            bound = floor_d[active] + (np.maximum(r - 1e-9, 0.0) * self.cell) ** 2
            done = (kth < bound) | (r >= reach[active])

            grow = np.maximum(r + 1, 2 * r)
            found = np.isfinite(kth)
            slack = np.maximum(kth[found] - floor_d[active][found], 0.0)
            grow[found] = np.floor(np.sqrt(slack) / self.cell + 1e-9).astype(np.intp) + 1
            grow = np.minimum(np.maximum(grow, r + 1), reach[active])

            inner[active] = r
            outer[active] = grow
            active = active[~done]
        logger.debug("Answered %d queries (k=%d) in %d passes", m, k, passes)
        return best_i, best_d

    def _gather(self, home, outer, inner):
        """
        Candidate (query row, point index) pairs for the cells inside each
        query's box of Chebyshev radius `outer` but outside radius `inner`.
        """
        nx, ny = self.shape
        x0 = np.maximum(home[:, 0] - outer, 0)
        x1 = np.minimum(home[:, 0] + outer, nx - 1)
        y0 = np.maximum(home[:, 1] - outer, 0)
        y1 = np.minimum(home[:, 1] + outer, ny - 1)

        row_owner, within = _expand(y1 - y0 + 1)
        y = y0[row_owner] + within
        hx = home[row_owner, 0]
        hy = home[row_owner, 1]
        r_in = inner[row_owner]
        lo_x, hi_x = x0[row_owner], x1[row_owner]
        hollow = np.abs(y - hy) <= r_in

        # a row crossing the inner box splits into a left and a right run
        seg_owner = np.concatenate([row_owner, row_owner])
        seg_y = np.concatenate([y, y])
        seg_lo = np.concatenate([lo_x, np.where(hollow, np.maximum(lo_x, hx + r_in + 1), hi_x + 1)])
        seg_hi = np.concatenate([np.where(hollow, np.minimum(hi_x, hx - r_in - 1), hi_x), hi_x])
        keep = seg_lo <= seg_hi
        seg_owner, seg_y, seg_lo, seg_hi = seg_owner[keep], seg_y[keep], seg_lo[keep], seg_hi[keep]

        first = self.bounds[seg_y * nx + seg_lo]
        lengths = self.bounds[seg_y * nx + seg_hi + 1] - first
        run_owner, offset = _expand(lengths)
        return seg_owner[run_owner], self.order[first[run_owner] + offset]

    def _merge(self, q, cand_q, cand_i, best_d, best_i, k):
        if len(cand_q) == 0:
            return
        diff = q[cand_q] - self.points[cand_i]
        cand_d = diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1]
        useful = cand_d <= best_d[cand_q, k - 1]
        if not useful.any():
            return
        cand_q, cand_i, cand_d = cand_q[useful], cand_i[useful], cand_d[useful]

        touched = np.unique(cand_q)
        local = np.searchsorted(touched, cand_q)
        all_q = np.concatenate([np.repeat(np.arange(len(touched)), k), local])
        all_d = np.concatenate([best_d[touched].ravel(), cand_d])
        all_i = np.concatenate([best_i[touched].ravel(), cand_i])
        order = np.lexsort((all_i, all_d, all_q))
        group_q = all_q[order]
        group_start = np.searchsorted(group_q, np.arange(len(touched)))
        rank = np.arange(len(order)) - group_start[group_q]
        keep = order[rank < k]
        best_d[touched] = all_d[keep].reshape(len(touched), k)
        best_i[touched] = all_i[keep].reshape(len(touched), k)

    def knn(self, q, k=1):
        """List of (point index, squared distance) for a single query, nearest first."""
        idx, d2 = self.query(np.asarray(q, dtype=np.float64).reshape(1, 2), k)
        return [(int(i), float(d)) for i, d in zip(idx[0], d2[0])]


def build(pts) -> Index2D:
    return Index2D(pts)


def knn(idx: Index2D, q, k=1):
    return idx.knn(q, k)
