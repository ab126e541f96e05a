"""Hot numeric loops, written once in a numba-compilable subset of numpy.

Every function here is plain Python operating on contiguous numpy arrays;
`backend` decides whether to run them as-is (numpy backend) or wrapped in
``numba.njit`` (numba backend). Keep this module free of Python objects,
dicts, and generators so both paths stay identical.

Float path counts are exact as long as every count stays at or below 2**53;
callers enforce that bound (see CountOverflowError).
"""

import numpy as np


def dijkstra_dag(indptr, indices, lengths, root, rel_tol):
    """Single-source Dijkstra with an array-based binary heap.

    Returns (dist, child_indptr, child_indices): geodesic distances from
    `root` (inf where unreachable) and the CSR child lists of the rooted
    shortest-path DAG. A directed edge u->v is kept iff
    dist[u] + l(u,v) == dist[v], exactly when rel_tol == 0 and otherwise
    within rel_tol * max(1, dist[v]).
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    m2 = indices.shape[0]

    heap_d = np.empty(m2 + 1, np.float64)
    heap_v = np.empty(m2 + 1, np.int64)
    heap_d[0] = 0.0
    heap_v[0] = root
    size = 1
    dist[root] = 0.0

    while size > 0:
        d0 = heap_d[0]
        v0 = heap_v[0]
        size -= 1
        # move last to root, sift down
        dl = heap_d[size]
        vl = heap_v[size]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= size:
                break
            child = left
            right = left + 1
            if right < size and heap_d[right] < heap_d[left]:
                child = right
            if heap_d[child] < dl:
                heap_d[i] = heap_d[child]
                heap_v[i] = heap_v[child]
                i = child
            else:
                break
        heap_d[i] = dl
        heap_v[i] = vl

        if d0 > dist[v0]:
            continue  # stale heap entry
        for e in range(indptr[v0], indptr[v0 + 1]):
            w = indices[e]
            nd = d0 + lengths[e]
            if nd < dist[w]:
                dist[w] = nd
                # sift up a fresh entry
                i = size
                size += 1
                while i > 0:
                    parent = (i - 1) // 2
                    if heap_d[parent] > nd:
                        heap_d[i] = heap_d[parent]
                        heap_v[i] = heap_v[parent]
                        i = parent
                    else:
                        break
                heap_d[i] = nd
                heap_v[i] = w

    # collect DAG edges: count, then fill
    child_indptr = np.zeros(n + 1, np.int64)
    for u in range(n):
        du = dist[u]
        if du == np.inf:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            dv = dist[v]
            if dv == np.inf:
                continue
            target = du + lengths[e]
            if rel_tol == 0.0:
                ok = target == dv
            else:
                bound = rel_tol if dv < 1.0 else rel_tol * dv
                ok = abs(target - dv) <= bound
            if ok:
                child_indptr[u + 1] += 1
    for u in range(n):
        child_indptr[u + 1] += child_indptr[u]
    child_indices = np.empty(child_indptr[n], np.int64)
    fill = child_indptr[:-1].copy()
    for u in range(n):
        du = dist[u]
        if du == np.inf:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            dv = dist[v]
            if dv == np.inf:
                continue
            target = du + lengths[e]
            if rel_tol == 0.0:
                ok = target == dv
            else:
                bound = rel_tol if dv < 1.0 else rel_tol * dv
                ok = abs(target - dv) <= bound
            if ok:
                child_indices[fill[u]] = v
                fill[u] += 1
    return dist, child_indptr, child_indices


def longest_path_len(child_indptr, child_indices, topo):
    """Maximum node count over directed paths starting at topo[0].

    `topo` must list the DAG nodes in topological order with the root first;
    every node in a rooted DAG is reachable from the root, so the root's
    longest path is the global bound for all per-node suffix lengths.
    """
    n = child_indptr.shape[0] - 1
    best = np.zeros(n, np.int64)
    for ti in range(topo.shape[0] - 1, -1, -1):
        v = topo[ti]
        b = 1
        for e in range(child_indptr[v], child_indptr[v + 1]):
            c = child_indices[e]
            if best[c] + 1 > b:
                b = best[c] + 1
        best[v] = b
    return best[topo[0]]


def gap_edges(child_indptr, child_indices, topo, s):
    """Gap pairs (u, v) joined by a directed base path of 2..s+1 edges.

    Set semantics: each ordered pair is emitted once, and pairs that are
    already base edges are suppressed. Returns (src, dst) arrays.
    """
    n = child_indptr.shape[0] - 1
    added = np.full(n, -1, np.int64)  # stamped with u when v is child/target of u
    seen = np.full(n, -1, np.int64)   # per-(u, depth) frontier dedup stamp
    cur = np.empty(n, np.int64)
    nxt = np.empty(n, np.int64)

    cap = 16
    gsrc = np.empty(cap, np.int64)
    gdst = np.empty(cap, np.int64)
    cnt = 0
    visit = 0

    for ti in range(topo.shape[0]):
        u = topo[ti]
        ncur = 0
        for e in range(child_indptr[u], child_indptr[u + 1]):
            c = child_indices[e]
            added[c] = u
            cur[ncur] = c
            ncur += 1
        for _depth in range(2, s + 2):
            if ncur == 0:
                break
            visit += 1
            nn = 0
            for i in range(ncur):
                w = cur[i]
                for e in range(child_indptr[w], child_indptr[w + 1]):
                    c = child_indices[e]
                    if seen[c] != visit:
                        seen[c] = visit
                        nxt[nn] = c
                        nn += 1
                        if added[c] != u:
                            added[c] = u
                            if cnt == cap:
                                cap2 = cap * 2
                                gs2 = np.empty(cap2, np.int64)
                                gd2 = np.empty(cap2, np.int64)
                                gs2[:cap] = gsrc
                                gd2[:cap] = gdst
                                gsrc = gs2
                                gdst = gd2
                                cap = cap2
                            gsrc[cnt] = u
                            gdst[cnt] = c
                            cnt += 1
            tmp = cur
            cur = nxt
            nxt = tmp
            ncur = nn
    return gsrc[:cnt].copy(), gdst[:cnt].copy()


def path_count_vectors(child_indptr, child_indices, topo, max_len):
    """Forward/backward message passing for per-node path counts.

    prefix[v][i] counts directed DAG paths from the root ending at v with
    exactly i+1 nodes; suffix[v][k] counts directed paths starting at v with
    exactly k+1 nodes. Both passes run in topological order, so every value
    is final before it is propagated. Counts are float64 and exact while
    they stay at or below 2**53.
    """
    n = child_indptr.shape[0] - 1
    prefix = np.zeros((n, max_len))
    suffix = np.zeros((n, max_len))
    root = topo[0]
    prefix[root, 0] = 1.0
    for ti in range(topo.shape[0]):
        v = topo[ti]
        for e in range(child_indptr[v], child_indptr[v + 1]):
            c = child_indices[e]
            prefix[c, 1:] += prefix[v, : max_len - 1]
    for ti in range(topo.shape[0] - 1, -1, -1):
        v = topo[ti]
        suffix[v, 0] = 1.0
        for e in range(child_indptr[v], child_indptr[v + 1]):
            c = child_indices[e]
            suffix[v, 1:] += suffix[c, : max_len - 1]
    return prefix, suffix


def add_outer_products(acc, prefix, suffix, topo, max_len):
    """acc[v, :L, :L] += outer(prefix[v], suffix[v]) for DAG nodes v."""
    for ti in range(topo.shape[0]):
        v = topo[ti]
        for i in range(max_len):
            p = prefix[v, i]
            if p != 0.0:
                for k in range(max_len):
                    acc[v, i, k] += p * suffix[v, k]


def smo_solve(Q, y, c, tol, max_iter):
    """First-order maximal-violating-pair SMO for the C-SVC dual.

    Minimizes 0.5 a'Qa - sum(a) subject to 0 <= a <= c and y'a == 0, where
    Q[i,j] = y_i y_j K[i,j]. Stops when the maximal KKT violation drops
    below `tol`. Returns (alpha, rho, iterations, converged) with rho such
    that the decision value is sum_i alpha_i y_i K(x_i, x) - rho.
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = np.full(n, -1.0)
    it = 0
    converged = False

    while it < max_iter:
        mg = -y * grad
        up = ((y > 0.0) & (alpha < c)) | ((y < 0.0) & (alpha > 0.0))
        low = ((y > 0.0) & (alpha > 0.0)) | ((y < 0.0) & (alpha < c))
        up_vals = np.where(up, mg, -np.inf)
        i = np.argmax(up_vals)
        m_up = up_vals[i]
        low_vals = np.where(low, mg, np.inf)
        j = np.argmin(low_vals)
        m_low = low_vals[j]
        if m_up == -np.inf or m_low == np.inf or m_up - m_low < tol:
            converged = True
            break

        old_ai = alpha[i]
        old_aj = alpha[j]
        if y[i] != y[j]:
            quad = Q[i, i] + Q[j, j] + 2.0 * Q[i, j]
            if quad <= 0.0:
                quad = 1e-12
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0.0:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0.0:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = c - diff
            else:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = c + diff
        else:
            quad = Q[i, i] + Q[j, j] - 2.0 * Q[i, j]
            if quad <= 0.0:
                quad = 1e-12
            delta = (grad[i] - grad[j]) / quad
            asum = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if asum > c:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = asum - c
            else:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = asum
            if asum > c:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = asum - c
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = asum

        dai = alpha[i] - old_ai
        daj = alpha[j] - old_aj
        grad += Q[i] * dai + Q[j] * daj
        it += 1

    # rho: mean of y*grad over free vectors, else midpoint of the KKT bounds
    nr_free = 0
    sum_free = 0.0
    ub = np.inf
    lb = -np.inf
    for k in range(n):
        yg = y[k] * grad[k]
        if alpha[k] >= c:
            if y[k] < 0.0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[k] <= 0.0:
            if y[k] > 0.0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            nr_free += 1
            sum_free += yg
    if nr_free > 0:
        rho = sum_free / nr_free
    else:
        rho = (ub + lb) / 2.0
    return alpha, rho, it, converged
