"""Compiled inner loops for the exact polygon kernel.

Every function here takes and returns plain float64 arrays so it can be
compiled with numba. When numba is unavailable the same code runs as
ordinary Python, only slower.
"""

import math
import os
import sys

import numpy as np


def _keep_freed_memory():
    # Kernel scratch arrays are large; glibc would hand each one back to the
    # OS on free and page-fault it in again on the next call, roughly
    # doubling kernel time. Raising the mmap and trim thresholds keeps them
    # in the heap. Set STEINERLAB_MALLOPT=0 to leave malloc alone.
    if not sys.platform.startswith("linux") or os.environ.get("STEINERLAB_MALLOPT", "1") == "0":
        return
    try:
        import ctypes

        libc = ctypes.CDLL("libc.so.6")
        M_TRIM_THRESHOLD, M_MMAP_THRESHOLD = -1, -3
        libc.mallopt(M_MMAP_THRESHOLD, 256 << 20)
        libc.mallopt(M_TRIM_THRESHOLD, 1 << 30)
    except (OSError, AttributeError):
        pass


_keep_freed_memory()

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def prune_ccw(P, cross_tol, dist_tol):
    """Drop vertices of a closed CCW polygon whose turn is not strictly convex.

    A vertex is removed when the cross product of its incoming and outgoing
    edges is <= cross_tol, or when it lies within dist_tol of the previously
    kept vertex. The lexicographically smallest vertex anchors the pass.
    """
    n = P.shape[0]
    if n < 3:
        return P.copy()
    s = 0
    for i in range(1, n):
        if P[i, 0] < P[s, 0] or (P[i, 0] == P[s, 0] and P[i, 1] < P[s, 1]):
            s = i
    Q = np.empty((n, 2))
    for i in range(n):
        Q[i, 0] = P[(s + i) % n, 0]
        Q[i, 1] = P[(s + i) % n, 1]
    while True:
        m = Q.shape[0]
        if m < 3:
            return Q
        S = np.empty((m, 2))
        k = 0
        for i in range(m + 1):
            x = Q[i % m, 0]
            y = Q[i % m, 1]
            if k > 0:
                dx = x - S[k - 1, 0]
                dy = y - S[k - 1, 1]
                if math.sqrt(dx * dx + dy * dy) <= dist_tol:
                    continue
            while k >= 2:
                ax = S[k - 1, 0] - S[k - 2, 0]
                ay = S[k - 1, 1] - S[k - 2, 1]
                bx = x - S[k - 1, 0]
                by = y - S[k - 1, 1]
                if ax * by - ay * bx <= cross_tol:
                    k -= 1
                else:
                    break
            if i < m:
                S[k, 0] = x
                S[k, 1] = y
                k += 1
        # the anchor is an extreme point, so only its distance to the last
        # kept vertex needs a check
        if k >= 3:
            dx = S[0, 0] - S[k - 1, 0]
            dy = S[0, 1] - S[k - 1, 1]
            if math.sqrt(dx * dx + dy * dy) <= dist_tol:
                k -= 1
        out = S[:k].copy()
        if out.shape[0] == m:
            return out
        Q = out


@njit(cache=True)
def _chains(a, b):
    """Split a CCW polygon given in (a, b) frame into lower and upper chains.

    Both chains are returned with non-decreasing abscissa a.
    """
    n = a.shape[0]
    i0 = 0
    for i in range(1, n):
        if a[i] < a[i0] or (a[i] == a[i0] and b[i] < b[i0]):
            i0 = i
    la = np.empty(n + 1)
    lb = np.empty(n + 1)
    la[0] = a[i0]
    lb[0] = b[i0]
    nl = 1
    i = i0
    while True:
        j = (i + 1) % n
        if j != i0 and a[j] > a[i]:
            la[nl] = a[j]
            lb[nl] = b[j]
            nl += 1
            i = j
        else:
            break
    j = (i + 1) % n
    st = j if a[j] >= a[i] else i
    ua = np.empty(n + 1)
    ub = np.empty(n + 1)
    ua[0] = a[st]
    ub[0] = b[st]
    nu = 1
    i = st
    while True:
        j = (i + 1) % n
        if j != st and a[j] < a[i]:
            ua[nu] = a[j]
            ub[nu] = b[j]
            nu += 1
            i = j
        else:
            break
    ua = ua[:nu][::-1].copy()
    ub = ub[:nu][::-1].copy()
    return la[:nl], lb[:nl], ua, ub


@njit(cache=True)
def _chain_at(xa, xb, x, k):
    """Evaluate a monotone chain at x, advancing the cursor k."""
    n = xa.shape[0]
    if x <= xa[0]:
        return xb[0], k
    if x >= xa[n - 1]:
        return xb[n - 1], k
    while k < n - 2 and xa[k + 1] < x:
        k += 1
    x0 = xa[k]
    x1 = xa[k + 1]
    if x1 <= x0:
        return xb[k + 1], k
    t = (x - x0) / (x1 - x0)
    return xb[k] + t * (xb[k + 1] - xb[k]), k


@njit(cache=True)
def half_chord_profile(P, ux, uy):
    """Half chord lengths of a convex polygon along direction (ux, uy).

    Returns breakpoints a (abscissae on the axis u-perp = (uy, -ux)) and
    f(a) = chord_length(a) / 2 at every vertex abscissa.
    """
    a = P[:, 0] * uy - P[:, 1] * ux
    b = P[:, 0] * ux + P[:, 1] * uy
    la, lb, ua, ub = _chains(a, b)
    nl = la.shape[0]
    nu = ua.shape[0]
    xs = np.empty(nl + nu)
    m = 0
    p = 0
    q = 0
    while p < nl or q < nu:
        if q >= nu or (p < nl and la[p] <= ua[q]):
            v = la[p]
            p += 1
        else:
            v = ua[q]
            q += 1
        if m == 0 or v > xs[m - 1]:
            xs[m] = v
            m += 1
    xs = xs[:m]
    f = np.empty(m)
    kl = 0
    ku = 0
    for t in range(m):
        lo, kl = _chain_at(la, lb, xs[t], kl)
        hi, ku = _chain_at(ua, ub, xs[t], ku)
        h = 0.5 * (hi - lo)
        f[t] = h if h > 0.0 else 0.0
    return xs, f


@njit(cache=True)
def prune_profile(xs, f, area_tol):
    """Greedy removal of profile breakpoints that carry at most area_tol.

    The profile is concave; removing interior breakpoint k removes the
    triangle (k-1, k, k+1) from each half of the mirrored polygon. End
    breakpoints collapse to a single apex, or vanish, under the same bound.
    Returns pruned (xs, f), the total polygon area removed, and the largest
    height of a removed triangle (an upper bound on how far any supporting
    line moves inward).
    """
    m = xs.shape[0]
    sa = np.empty(m)
    sf = np.empty(m)
    k = 0
    removed = 0.0
    height = 0.0
    for t in range(m):
        x = xs[t]
        y = f[t]
        while k >= 2:
            ax = sa[k - 1] - sa[k - 2]
            ay = sf[k - 1] - sf[k - 2]
            bx = x - sa[k - 2]
            by = y - sf[k - 2]
            tri = -0.5 * (ax * by - ay * bx)
            if tri <= area_tol:
                removed += 2.0 * tri
                base = math.sqrt(bx * bx + by * by)
                if base > 0.0:
                    height = max(height, 2.0 * tri / base)
                k -= 1
            else:
                break
        sa[k] = x
        sf[k] = y
        k += 1
    sa = sa[:k]
    sf = sf[:k]
    lo = 0
    hi = k - 1
    # endpoint rules, applied symmetrically to both halves
    while hi - lo >= 1:
        changed = False
        d = sa[hi] - sa[hi - 1]
        if sf[hi] > 0.0 and sf[hi] * d <= area_tol:
            removed += sf[hi] * d
            height = max(height, sf[hi])
            sf[hi] = 0.0
            changed = True
        elif sf[hi] == 0.0 and hi - lo >= 2 and sf[hi - 1] * d <= area_tol:
            removed += sf[hi - 1] * d
            height = max(height, d)
            hi -= 1
            changed = True
        d = sa[lo + 1] - sa[lo]
        if sf[lo] > 0.0 and sf[lo] * d <= area_tol:
            removed += sf[lo] * d
            height = max(height, sf[lo])
            sf[lo] = 0.0
            changed = True
        elif sf[lo] == 0.0 and hi - lo >= 2 and sf[lo + 1] * d <= area_tol:
            removed += sf[lo + 1] * d
            height = max(height, d)
            lo += 1
            changed = True
        if not changed:
            break
    return sa[lo:hi + 1], sf[lo:hi + 1], removed, height


@njit(cache=True)
def mirror_profile(xs, f, ux, uy):
    """Build the CCW polygon {(a, t): |t| <= f(a)} and rotate back to xy."""
    m = xs.shape[0]
    out = np.empty((2 * m, 2))
    o = 0
    for t in range(m):
        out[o, 0] = xs[t]
        out[o, 1] = -f[t]
        o += 1
    for t in range(m - 1, -1, -1):
        if f[t] > 0.0:
            out[o, 0] = xs[t]
            out[o, 1] = f[t]
            o += 1
    R = np.empty((o, 2))
    for i in range(o):
        s = out[i, 0]
        t = out[i, 1]
        R[i, 0] = s * uy + t * ux
        R[i, 1] = -s * ux + t * uy
    return R


@njit(cache=True)
def steiner_polygon(P, ux, uy, area_tol):
    xs, f = half_chord_profile(P, ux, uy)
    xs, f, removed, height = prune_profile(xs, f, area_tol)
    return mirror_profile(xs, f, ux, uy), removed, height


@njit(cache=True)
def shoelace(V):
    """Signed area of a closed vertex cycle."""
    n = V.shape[0]
    s = 0.0
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        s += V[i, 0] * V[j, 1] - V[j, 0] * V[i, 1]
    return 0.5 * s


@njit(cache=True)
def _pseudo_angle(x, y):
    s = abs(x) + abs(y)
    if s == 0.0:
        return 0.0
    r = y / s
    if x < 0.0:
        return 2.0 - r
    if r >= 0.0:
        return r
    return 4.0 + r


@njit(cache=True)
def _fan(V):
    """Outer edge normals of a CCW body, sorted by angle from 0.

    Row i of the result describes the arc that starts at normal i: the
    pseudo-angle, the unit normal, and the supporting vertex on that arc.
    Point bodies get an empty fan.
    """
    n = V.shape[0]
    if n == 1:
        return np.empty(0), np.empty((0, 2)), np.empty((0, 2))
    ang = np.empty(n)
    nrm = np.empty((n, 2))
    for i in range(n):
        j = (i + 1) % n
        ex = V[j, 0] - V[i, 0]
        ey = V[j, 1] - V[i, 1]
        L = math.sqrt(ex * ex + ey * ey)
        nrm[i, 0] = ey / L
        nrm[i, 1] = -ex / L
        ang[i] = _pseudo_angle(ey, -ex)
    s = 0
    for i in range(1, n):
        if ang[i] < ang[s]:
            s = i
    A = np.empty(n)
    N = np.empty((n, 2))
    S = np.empty((n, 2))
    for t in range(n):
        i = (s + t) % n
        A[t] = ang[i]
        N[t, 0] = nrm[i, 0]
        N[t, 1] = nrm[i, 1]
        S[t, 0] = V[(i + 1) % n, 0]
        S[t, 1] = V[(i + 1) % n, 1]
    return A, N, S


@njit(cache=True)
def support_gap(P, Q, cap):
    """sup over unit w of |h_P(w) - h_Q(w)|, exact for convex polygons.

    The sweep stops as soon as the running value reaches cap, so a result
    >= cap is only a lower bound.
    """
    lo, hi = support_diff_range(P, Q, cap)
    return max(hi, -lo)


@njit(cache=True)
def support_diff_range(P, Q, cap):
    """(min, max) over unit w of h_P(w) - h_Q(w), exact for convex polygons.

    Stops early once max or -min reaches cap (pass inf for the full range).
    """
    Ap, Np, Sp = _fan(P)
    Aq, Nq, Sq = _fan(Q)
    # fixed breakpoints keep every merged arc shorter than a half turn
    fx = np.array([1.0, -0.5, -0.5])
    fy = np.array([0.0, 0.8660254037844386, -0.8660254037844386])
    Af = np.empty(3)
    for i in range(3):
        Af[i] = _pseudo_angle(fx[i], fy[i])
    np_ = Ap.shape[0]
    nq = Aq.shape[0]
    # supporting vertex at angle 0 is the one after the largest-angle edge
    if np_ > 0:
        cp = Sp[np_ - 1]
    else:
        cp = P[0]
    if nq > 0:
        cq = Sq[nq - 1]
    else:
        cq = Q[0]
    px = cp[0]
    py = cp[1]
    qx = cq[0]
    qy = cq[1]
    ip = 0
    iq = 0
    jf = 1
    wx = 1.0
    wy = 0.0
    lo = math.inf
    hi = -math.inf
    total = np_ + nq + 3
    for _ in range(total):
        # next breakpoint in angular order
        cand = 5.0
        src = -1
        if ip < np_ and Ap[ip] < cand:
            cand = Ap[ip]
            src = 0
        if iq < nq and Aq[iq] < cand:
            cand = Aq[iq]
            src = 1
        if jf < 3 and Af[jf] < cand:
            cand = Af[jf]
            src = 2
        if src == -1:
            vx = 1.0
            vy = 0.0
        elif src == 0:
            vx = Np[ip, 0]
            vy = Np[ip, 1]
        elif src == 1:
            vx = Nq[iq, 0]
            vy = Nq[iq, 1]
        else:
            vx = fx[jf]
            vy = fy[jf]
        dx = px - qx
        dy = py - qy
        e0 = dx * wx + dy * wy
        e1 = dx * vx + dy * vy
        lo = min(lo, e0, e1)
        hi = max(hi, e0, e1)
        # on the arc [w, v] the difference is d . w; it peaks at w = d / |d|
        # and bottoms out at w = -d / |d| when those lie in the arc
        c1 = wx * dy - wy * dx
        c2 = dx * vy - dy * vx
        if c1 >= 0.0 and c2 >= 0.0:
            hi = max(hi, math.sqrt(dx * dx + dy * dy))
        if c1 <= 0.0 and c2 <= 0.0:
            lo = min(lo, -math.sqrt(dx * dx + dy * dy))
        if src == -1 or hi >= cap or -lo >= cap:
            break
        if src == 0:
            px = Sp[ip, 0]
            py = Sp[ip, 1]
            ip += 1
        elif src == 1:
            qx = Sq[iq, 0]
            qy = Sq[iq, 1]
            iq += 1
        else:
            jf += 1
        wx = vx
        wy = vy
    return lo, hi


@njit(cache=True)
def polygon_diameter(V):
    """Rotating calipers over antipodal vertex pairs of a CCW convex polygon."""
    n = V.shape[0]
    if n == 1:
        return 0.0
    if n == 2:
        dx = V[1, 0] - V[0, 0]
        dy = V[1, 1] - V[0, 1]
        return math.sqrt(dx * dx + dy * dy)
    best = 0.0
    j = 1
    for i in range(n):
        i1 = (i + 1) % n
        ex = V[i1, 0] - V[i, 0]
        ey = V[i1, 1] - V[i, 1]
        for _ in range(n):
            j1 = (j + 1) % n
            cur = ex * (V[j, 1] - V[i, 1]) - ey * (V[j, 0] - V[i, 0])
            nxt = ex * (V[j1, 1] - V[i, 1]) - ey * (V[j1, 0] - V[i, 0])
            if nxt > cur:
                j = j1
            else:
                break
        for k in (i, i1):
            dx = V[j, 0] - V[k, 0]
            dy = V[j, 1] - V[k, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d > best:
                best = d
    return best


@njit(cache=True)
def monotone_chain(P):
    """CCW convex hull of lexicographically sorted, distinct points."""
    n = P.shape[0]
    H = np.empty((2 * n, 2))
    k = 0
    for i in range(n):
        while k >= 2 and ((H[k - 1, 0] - H[k - 2, 0]) * (P[i, 1] - H[k - 2, 1])
                          - (H[k - 1, 1] - H[k - 2, 1]) * (P[i, 0] - H[k - 2, 0])) <= 0.0:
            k -= 1
        H[k, 0] = P[i, 0]
        H[k, 1] = P[i, 1]
        k += 1
    lower = k + 1
    for i in range(n - 2, -1, -1):
        while k >= lower and ((H[k - 1, 0] - H[k - 2, 0]) * (P[i, 1] - H[k - 2, 1])
                              - (H[k - 1, 1] - H[k - 2, 1]) * (P[i, 0] - H[k - 2, 0])) <= 0.0:
            k -= 1
        H[k, 0] = P[i, 0]
        H[k, 1] = P[i, 1]
        k += 1
    return H[:k - 1].copy()


@njit(cache=True)
def _fan_piece(ax, ay, bx, by, r2, inside):
    # signed area of the wedge part of triangle (0, a, b) inside the disk
    if inside:
        return 0.5 * (ax * by - ay * bx)
    return 0.5 * r2 * math.atan2(ax * by - ay * bx, ax * bx + ay * by)


@njit(cache=True)
def disk_area(V, r):
    """Area of the polygon V (CCW) intersected with the disk |x| <= r.

    The polygon is split into the signed triangles (0, v_i, v_i+1); each
    edge is cut where it crosses the circle, pieces inside the disk count
    as triangles and pieces outside count as circular sectors.
    """
    n = V.shape[0]
    if r <= 0.0 or n < 3:
        return 0.0
    r2 = r * r
    total = 0.0
    for i in range(n):
        ax = V[i, 0]
        ay = V[i, 1]
        bx = V[(i + 1) % n, 0]
        by = V[(i + 1) % n, 1]
        dx = bx - ax
        dy = by - ay
        A = dx * dx + dy * dy
        if A == 0.0:
            continue
        B = ax * dx + ay * dy
        C = ax * ax + ay * ay - r2
        disc = B * B - A * C
        if disc <= 0.0:
            # the edge line misses the disk (or touches it)
            total += _fan_piece(ax, ay, bx, by, r2, False)
            continue
        sq = math.sqrt(disc)
        t0 = (-B - sq) / A
        t1 = (-B + sq) / A
        if t0 >= 1.0 or t1 <= 0.0:
            total += _fan_piece(ax, ay, bx, by, r2, False)
            continue
        s0 = max(t0, 0.0)
        s1 = min(t1, 1.0)
        px = ax + s0 * dx
        py = ay + s0 * dy
        qx = ax + s1 * dx
        qy = ay + s1 * dy
        if s0 > 0.0:
            total += _fan_piece(ax, ay, px, py, r2, False)
        total += _fan_piece(px, py, qx, qy, r2, True)
        if s1 < 1.0:
            total += _fan_piece(qx, qy, bx, by, r2, False)
    return total


@njit(cache=True)
def support_sweep(V, W):
    """h_V at each row of W, for W sorted by angle in CCW order.

    The maximizing vertex of a convex cycle advances monotonically as the
    direction turns, so one pointer sweep suffices after an initial scan.
    """
    n = V.shape[0]
    m = W.shape[0]
    out = np.empty(m)
    if m == 0:
        return out
    k = 0
    best = V[0, 0] * W[0, 0] + V[0, 1] * W[0, 1]
    for i in range(1, n):
        h = V[i, 0] * W[0, 0] + V[i, 1] * W[0, 1]
        if h > best:
            best = h
            k = i
    for j in range(m):
        wx = W[j, 0]
        wy = W[j, 1]
        h = V[k, 0] * wx + V[k, 1] * wy
        steps = 0
        while steps < n:
            k2 = (k + 1) % n
            h2 = V[k2, 0] * wx + V[k2, 1] * wy
            if h2 > h:
                k = k2
                h = h2
                steps += 1
            else:
                break
        out[j] = h
    return out
