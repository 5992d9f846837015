"""Compiled breadth-first propagation kernel.

Mirrors the scalar rules in campaign.py draw-for-draw: numba's in-jit
``np.random`` reproduces the numpy RandomState MT19937 stream bit-exactly
for the same seed, which the reference engine relies on. Draw order per
dequeued vertex x at depth d, per follower edge e=(x, f) in CSR order:

  1. engagement uniform  (always; fires when u < engagement_pct[x]/100)
  2. activeness uniform  (always)
  3. purchase uniform    (only if f is active, willing, and has not bought)
  4. one uniform per out-edge of f (only in step 3's branch and only when
     f did not buy; buyers update follower interest deterministically)

Any change here must be applied to campaign._propagate_reference too.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def propagate(
    indptr,
    indices,
    weights,
    interest,
    willing,
    bought,
    exposed,
    engagement_pct,
    active_prob,
    gamma,
    boost,
    seeds,
    kernel_seed,
):
    """Run one campaign; mutates weights/interest/bought/exposed in place.

    ``seeds`` must be sorted unique vertex ids, pre-marked bought. Returns
    (queue, depths, tail): queue[:tail] holds seeds then buyers in purchase
    order, depths[i] is the hop count at which queue[i] was enqueued.
    """
    np.random.seed(kernel_seed)
    n = indptr.shape[0] - 1
    queue = np.empty(n, dtype=np.int32)
    depths = np.empty(n, dtype=np.int32)
    tail = 0
    for i in range(seeds.shape[0]):
        queue[tail] = seeds[i]
        depths[tail] = 0
        tail += 1
    head = 0
    while head < tail:
        x = queue[head]
        d = depths[head]
        head += 1
        eps_x = engagement_pct[x] / 100.0
        dd = np.float64(d + 1)
        att = 1.0 / (dd * dd)
        for e in range(indptr[x], indptr[x + 1]):
            f = indices[e]
            if np.random.random() < eps_x:
                w_new = weights[e] + boost
                if w_new > 1.0:
                    w_new = 1.0
                weights[e] = w_new
            exposed[f] = True
            active = np.random.random() < active_prob
            if active and willing[f] and not bought[f]:
                p = interest[f] * weights[e] * att
                buy = np.random.random() < p
                for e2 in range(indptr[f], indptr[f + 1]):
                    g = indices[e2]
                    if buy:
                        bumped = interest[g] + weights[e2] * interest[g]
                        if bumped > 1.0:
                            bumped = 1.0
                        interest[g] = bumped
                    else:
                        if np.random.random() < gamma:
                            interest[g] = interest[g] - weights[e2] * interest[g]
                if buy:
                    bought[f] = True
                    queue[tail] = f
                    depths[tail] = d + 1
                    tail += 1
    return queue, depths, tail
