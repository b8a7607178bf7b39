"""Numba kernels for window-restricted reachability.

These mirror the reference engine in ``paths`` exactly (same window rule,
same flags, same random field) but run on flat arrays, which is what makes
2000-replica bisection sweeps affordable.  Bit-equality against the reference
is part of the test suite.
"""
from __future__ import annotations

import numpy as np
from numba import njit, uint64

from ._rng import COORD_SALT, GAMMA, INV_2_53, MIX_A, MIX_B

_U_GAMMA = np.uint64(GAMMA)
_U_MIX_A = np.uint64(MIX_A)
_U_MIX_B = np.uint64(MIX_B)
_U_SALT = np.uint64(COORD_SALT)

# kernel modes
MODE_EVENT = 0      # multi-source from the floor; early exit on column-0 target
MODE_SURFACE = 1    # multi-source from the floor; fill per-column maxima
MODE_REACH = 2      # single source at the origin; count sites on one level


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> uint64(30))) * _U_MIX_A
    z = (z ^ (z >> uint64(27))) * _U_MIX_B
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _site_u01(seed, site, n_coords):
    """Uniform in [0,1) from (seed, first n_coords entries of site)."""
    h = _mix(seed + _U_GAMMA)
    for i in range(n_coords):
        h = _mix(h + uint64(site[i]) * _U_SALT + _U_GAMMA)
    return np.float64(h >> uint64(11)) * INV_2_53


@njit(cache=True)
def _floor_of(coords, d, num, den, eta, pyramid, scratch):
    if pyramid:
        # sum of the k largest |coords_i| (k = number of tilted axes)
        k = 0
        for i in range(d):
            if eta[i] != 0:
                k += 1
            scratch[i] = abs(coords[i])
        # insertion sort descending on the small scratch buffer
        for i in range(1, d):
            v = scratch[i]
            j = i - 1
            while j >= 0 and scratch[j] < v:
                scratch[j + 1] = scratch[j]
                j -= 1
            scratch[j + 1] = v
        t = np.int64(0)
        for i in range(k):
            t += scratch[i]
    else:
        t = np.int64(0)
        for i in range(d):
            t += eta[i] * coords[i]
    return (num * t) // den


@njit(cache=True)
def reach_kernel(seed, q, d, num, den, eta, pyramid, radius, cap, target_rel, mode, level):
    """Window-restricted admissible reachability on the lattice around 0.

    Window: base coordinates in [-radius, radius]^d, relative height (site
    height minus floor height of its column) in [-cap, cap].

    mode EVENT: sources are all floor sites; returns event=1 as soon as the
      column of the origin reaches relative height >= target_rel.
    mode SURFACE: same sources, full sweep; per-column maxima are filled.
    mode REACH: single source (0,...,0); counts visited sites whose relative
      height equals ``level``.

    Returns (event, capped, truncated, count, colmax) where capped means some
    site attained relative height ``cap`` and truncated means some admissible
    step was blocked only by the window boundary.
    """
    side = 2 * radius + 1
    ncols = 1
    for _ in range(d):
        ncols *= side
    nh = 2 * cap + 1
    total = ncols * nh

    floors = np.empty(ncols, np.int64)
    coords = np.empty(d, np.int64)
    scratch = np.empty(d, np.int64)
    site = np.empty(d + 1, np.int64)
    for c in range(ncols):
        tmp = c
        for j in range(d):
            coords[j] = tmp % side - radius
            tmp //= side
        floors[c] = _floor_of(coords, d, num, den, eta, pyramid, scratch)

    col0 = 0
    stride = np.empty(d, np.int64)
    s = 1
    for j in range(d):
        stride[j] = s
        col0 += radius * s
        s *= side

    visited = np.zeros(total, np.uint8)
    colmax = np.full(ncols, -cap - 1, np.int64)
    stack = np.empty(total, np.int64)
    sp = 0

    event = False
    capped = False
    truncated = False
    count = 0

    # seed the search
    if mode == MODE_REACH:
        flat = col0 * nh + cap  # origin, relative height 0
        visited[flat] = 1
        stack[sp] = flat
        sp += 1
        colmax[col0] = 0
        if level == 0:
            count += 1
    else:
        for c in range(ncols):
            flat = c * nh + cap
            visited[flat] = 1
            stack[sp] = flat
            sp += 1
            colmax[c] = 0
        if mode == MODE_EVENT and target_rel <= 0:
            return True, capped, truncated, count, colmax

    while sp > 0:
        sp -= 1
        flat = stack[sp]
        c = flat // nh
        rel = flat % nh - cap
        tmp = c
        for j in range(d):
            coords[j] = tmp % side - radius
            tmp //= side
        n_abs = floors[c] + rel

        # up step into (coords, n_abs + 1): needs a closed target
        if rel + 1 > cap:
            # climb blocked by the cap counts as truncation only if admissible
            for j in range(d):
                site[j] = coords[j]
            site[d] = n_abs + 1
            if _site_u01(seed, site, d + 1) < q:
                truncated = True
        else:
            nf = flat + 1
            if visited[nf] == 0:
                for j in range(d):
                    site[j] = coords[j]
                site[d] = n_abs + 1
                if _site_u01(seed, site, d + 1) < q:
                    visited[nf] = 1
                    stack[sp] = nf
                    sp += 1
                    nrel = rel + 1
                    if nrel > colmax[c]:
                        colmax[c] = nrel
                    if nrel == cap:
                        capped = True
                    if mode == MODE_REACH and nrel == level:
                        count += 1
                    if mode == MODE_EVENT and c == col0 and nrel >= target_rel:
                        return True, capped, truncated, count, colmax

        # down-diagonal steps, unconditional
        for j in range(d):
            for s2 in (-1, 1):
                xj = coords[j] + s2
                if xj < -radius or xj > radius:
                    truncated = True
                    continue
                c2 = c + s2 * stride[j]
                nrel = n_abs - 1 - floors[c2]
                if nrel < -cap:
                    truncated = True
                    continue
                nf = c2 * nh + (nrel + cap)
                if visited[nf] == 0:
                    visited[nf] = 1
                    stack[sp] = nf
                    sp += 1
                    if nrel > colmax[c2]:
                        colmax[c2] = nrel
                    if nrel == cap:
                        capped = True
                    if mode == MODE_REACH and nrel == level:
                        count += 1
                    if mode == MODE_EVENT and c2 == col0 and nrel >= target_rel:
                        return True, capped, truncated, count, colmax

    return event, capped, truncated, count, colmax


@njit(cache=True, inline="always")
def _heap_push(prio, node, size, p, v):
    i = size
    prio[i] = p
    node[i] = v
    while i > 0:
        parent = (i - 1) >> 1
        if prio[parent] <= prio[i]:
            break
        prio[parent], prio[i] = prio[i], prio[parent]
        node[parent], node[i] = node[i], node[parent]
        i = parent
    return size + 1


@njit(cache=True, inline="always")
def _heap_pop(prio, node, size):
    p = prio[0]
    v = node[0]
    size -= 1
    if size > 0:
        prio[0] = prio[size]
        node[0] = node[size]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= size:
                break
            small = left
            right = left + 1
            if right < size and prio[right] < prio[left]:
                small = right
            if prio[i] <= prio[small]:
                break
            prio[i], prio[small] = prio[small], prio[i]
            node[i], node[small] = node[small], node[i]
            i = small
    return p, v, size


@njit(cache=True)
def threshold_kernel(seed, d, num, den, eta, pyramid, radius, cap, target_rel, q_limit):
    """Per-replica critical q for the origin-column event, by bottleneck
    search.

    The event {origin column reaches relative height >= target_rel} holds at
    exactly the q exceeding the minimum over reachability certificates of the
    largest site uniform among up-step targets used.  Down steps are free, so
    this is a shortest-path problem under the max-of-ups cost, solved by a
    Dijkstra sweep from all floor sites.  Returns (q_event, q_cap): the event
    threshold and the threshold for touching the height cap anywhere
    (whichever the search proves first bounds the other from below);
    thresholds beyond q_limit are reported as inf.
    """
    side = 2 * radius + 1
    ncols = 1
    for _ in range(d):
        ncols *= side
    nh = 2 * cap + 1
    total = ncols * nh

    floors = np.empty(ncols, np.int64)
    coords = np.empty(d, np.int64)
    scratch = np.empty(d, np.int64)
    site = np.empty(d + 1, np.int64)
    for c in range(ncols):
        tmp = c
        for j in range(d):
            coords[j] = tmp % side - radius
            tmp //= side
        floors[c] = _floor_of(coords, d, num, den, eta, pyramid, scratch)

    col0 = 0
    stride = np.empty(d, np.int64)
    s = 1
    for j in range(d):
        stride[j] = s
        col0 += radius * s
        s *= side

    inf = np.inf
    dist = np.full(total, inf, np.float64)
    ucache = np.full(total, -1.0, np.float64)
    settled = np.zeros(total, np.uint8)
    heap_cap = 4 * total + 16
    heap_prio = np.empty(heap_cap, np.float64)
    heap_node = np.empty(heap_cap, np.int64)
    hsize = 0

    for c in range(ncols):
        flat = c * nh + cap
        dist[flat] = 0.0
        hsize = _heap_push(heap_prio, heap_node, hsize, 0.0, flat)

    q_event = inf
    q_cap = inf
    if target_rel <= 0:
        q_event = 0.0

    while hsize > 0:
        p, flat, hsize = _heap_pop(heap_prio, heap_node, hsize)
        if settled[flat] == 1 or p > dist[flat]:
            continue
        settled[flat] = 1
        if p > q_limit:
            break
        c = flat // nh
        rel = flat % nh - cap
        if c == col0 and rel >= target_rel and q_event == inf:
            q_event = p
            break  # q_cap, if unseen, can only be larger
        if rel == cap and q_cap == inf:
            q_cap = p
            if q_event < inf:
                break
        tmp = c
        for j in range(d):
            coords[j] = tmp % side - radius
            tmp //= side
        n_abs = floors[c] + rel

        if rel + 1 <= cap:
            nf = flat + 1
            if settled[nf] == 0:
                u = ucache[nf]
                if u < 0.0:
                    for j in range(d):
                        site[j] = coords[j]
                    site[d] = n_abs + 1
                    u = _site_u01(seed, site, d + 1)
                    ucache[nf] = u
                cand = p if u < p else u
                if cand < dist[nf]:
                    dist[nf] = cand
                    if hsize >= heap_cap:
                        hsize = _heap_compact(heap_prio, heap_node, hsize, settled, dist)
                    hsize = _heap_push(heap_prio, heap_node, hsize, cand, nf)

        for j in range(d):
            for s2 in (-1, 1):
                xj = coords[j] + s2
                if xj < -radius or xj > radius:
                    continue
                c2 = c + s2 * stride[j]
                nrel = n_abs - 1 - floors[c2]
                if nrel < -cap:
                    continue
                nf = c2 * nh + (nrel + cap)
                if settled[nf] == 0 and p < dist[nf]:
                    dist[nf] = p
                    if hsize >= heap_cap:
                        hsize = _heap_compact(heap_prio, heap_node, hsize, settled, dist)
                    hsize = _heap_push(heap_prio, heap_node, hsize, p, nf)

    return q_event, q_cap


@njit(cache=True)
def _heap_compact(prio, node, size, settled, dist):
    """Drop stale heap entries (settled or superseded) and re-heapify."""
    out = 0
    for i in range(size):
        v = node[i]
        if settled[v] == 0 and prio[i] <= dist[v]:
            prio[out] = prio[i]
            node[out] = v
            out += 1
    # sift-down heapify
    for i in range(out // 2 - 1, -1, -1):
        j = i
        while True:
            left = 2 * j + 1
            if left >= out:
                break
            small = left
            right = left + 1
            if right < out and prio[right] < prio[left]:
                small = right
            if prio[j] <= prio[small]:
                break
            prio[j], prio[small] = prio[small], prio[j]
            node[j], node[small] = node[small], node[j]
            j = small
    return out


def warmup():
    """Force one small compilation/caching pass of the kernels."""
    eta = np.ones(1, np.int64)
    reach_kernel(np.uint64(1), 0.5, 1, 1, 2, eta, False, 2, 2, 10, MODE_EVENT, 0)
    reach_kernel(np.uint64(1), 0.5, 1, 1, 2, eta, False, 2, 2, 0, MODE_REACH, 1)
    threshold_kernel(np.uint64(1), 1, 1, 2, eta, False, 2, 2, 2, 1.0)
