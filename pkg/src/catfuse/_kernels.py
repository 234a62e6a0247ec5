"""Compiled kernels for the piecewise-quadratic dynamic program.

Everything here works on flat float64 arrays.  A piecewise quadratic f is
stored as ``(lo, a, b, c)`` arrays: piece i is a[i]*x^2 + b[i]*x + c[i] on
[lo[i], lo[i+1]), the last piece extending to +inf and lo[0] == -inf.
Candidates additionally carry an explicit right endpoint ``hi`` and the
linear backpointer map ``(bs, bi)``: theta_prev = bs * x + bi.

Interval convention is closed-left / open-right throughout; +-inf endpoints
are sentinels and never evaluated.
"""

import numpy as np
from numba import njit

# Relative tolerances: tie detection in the winner cascade, coincident-root
# detection in crossings, and micro-piece suppression.
_TIE_REL = 1e-10
_ROOT_REL = 1e-20
_WIDTH_TOL = 1e-12


@njit(cache=True, inline="always")
def _qval(a, b, c, x):
    return (a * x + b) * x + c


@njit(cache=True)
def _choose(active, ca, cb, cc, x):
    """Winner among active candidates at x: least value, then least first
    derivative, then least second derivative, then lowest index."""
    best = -1
    bv = 0.0
    bs = 0.0
    bcurv = 0.0
    for j in range(active.shape[0]):
        if not active[j]:
            continue
        v = _qval(ca[j], cb[j], cc[j], x)
        s = 2.0 * ca[j] * x + cb[j]
        if best == -1:
            best, bv, bs, bcurv = j, v, s, ca[j]
            continue
        tol_v = _TIE_REL * (1.0 + abs(v) + abs(bv))
        if v < bv - tol_v:
            best, bv, bs, bcurv = j, v, s, ca[j]
        elif v <= bv + tol_v:
            tol_s = _TIE_REL * (1.0 + abs(s) + abs(bs))
            if s < bs - tol_s:
                best, bv, bs, bcurv = j, v, s, ca[j]
            elif s <= bs + tol_s:
                tol_a = _TIE_REL * (1.0 + abs(ca[j]) + abs(bcurv))
                if ca[j] < bcurv - tol_a:
                    best, bv, bs, bcurv = j, v, s, ca[j]
                # equal up to curvature: keep lower index (already held)
    return best


@njit(cache=True)
def _first_beat(ca, cb, cc, j, w, x_cur):
    """Smallest y > x_cur where candidate j drops strictly below w.

    Returns +inf when no such point exists.  Near-tangencies (coincident
    roots within tolerance) produce no crossing; the cascade in _choose
    resolves the ordering at the next event instead.
    """
    da = ca[j] - ca[w]
    db = cb[j] - cb[w]
    dc = cc[j] - cc[w]
    tol_x = _WIDTH_TOL * (1.0 + abs(x_cur))
    if abs(da) <= 1e-14 * (abs(ca[j]) + abs(ca[w])):
        # effectively linear difference
        if db == 0.0:
            return np.inf
        y = -dc / db
        if db < 0.0 and y > x_cur + tol_x:
            return y
        return np.inf
    disc = db * db - 4.0 * da * dc
    scale = max(db * db, abs(4.0 * da * dc))
    if disc <= _ROOT_REL * scale:
        return np.inf
    s = np.sqrt(disc)
    if db >= 0.0:
        q = -0.5 * (db + s)
    else:
        q = -0.5 * (db - s)
    r1 = q / da
    r2 = dc / q if q != 0.0 else r1
    lo_r = min(r1, r2)
    hi_r = max(r1, r2)
    if da > 0.0:
        # j beats w strictly inside (lo_r, hi_r)
        y = lo_r
    else:
        # j beats w beyond hi_r
        y = hi_r
    if y > x_cur + tol_x:
        return y
    return np.inf


@njit(cache=True)
def _envelope(clo, chi, ca, cb, cc, cbs, cbi):
    """Lower envelope of interval-restricted quadratics via a left-to-right
    knot walk over endpoint events and pairwise intersections.

    Returns piece arrays (lo, a, b, c, bs, bi) partitioning the real line.
    """
    n = clo.shape[0]
    if n == 0:
        raise ValueError("lower envelope of an empty candidate list")

    # pre-reduce constants with semi-infinite domains: among those active at
    # any point only the running minimum can ever win
    keep = np.ones(n, dtype=np.bool_)
    const_idx = np.empty(n, dtype=np.int64)
    m = 0
    for j in range(n):
        if ca[j] == 0.0 and cb[j] == 0.0 and chi[j] == np.inf:
            const_idx[m] = j
            m += 1
    if m > 1:
        ci = const_idx[:m]
        order = np.argsort(clo[ci])
        running = np.inf
        for t in range(m):
            j = ci[order[t]]
            if cc[j] < running:
                running = cc[j]
            else:
                keep[j] = False

    # endpoint events, sorted unique finite values
    ev = np.empty(2 * n, dtype=np.float64)
    ne = 0
    for j in range(n):
        if not keep[j]:
            continue
        if np.isfinite(clo[j]):
            ev[ne] = clo[j]
            ne += 1
        if np.isfinite(chi[j]):
            ev[ne] = chi[j]
            ne += 1
    events = np.unique(ev[:ne])

    active = np.zeros(n, dtype=np.bool_)
    for j in range(n):
        if keep[j] and clo[j] == -np.inf:
            active[j] = True
    if not active.any():
        raise ValueError("candidate domains do not cover the line from the left")

    # winner at -inf: min leading coefficient, then max slope coefficient,
    # then min constant, then min index
    w = -1
    for j in range(n):
        if not active[j]:
            continue
        if w == -1:
            w = j
            continue
        if ca[j] < ca[w] or (
            ca[j] == ca[w]
            and (cb[j] > cb[w] or (cb[j] == cb[w] and cc[j] < cc[w]))
        ):
            w = j
    cap = 4 * n + 16
    out_lo = np.empty(cap, dtype=np.float64)
    out_id = np.empty(cap, dtype=np.int64)
    out_lo[0] = -np.inf
    out_id[0] = w
    np_out = 1

    x_cur = -np.inf
    e_idx = 0
    while True:
        next_ev = events[e_idx] if e_idx < events.shape[0] else np.inf
        # earliest strict crossing before the next endpoint event
        best_y = np.inf
        for j in range(n):
            if not active[j] or j == w:
                continue
            y = _first_beat(ca, cb, cc, j, w, x_cur)
            if y < best_y:
                best_y = y
        if best_y < next_ev:
            neww = _choose(active, ca, cb, cc, best_y)
            x_cur = best_y
            if neww != w:
                w = neww
                if np_out == cap:
                    cap *= 2
                    tmp_lo = np.empty(cap, dtype=np.float64)
                    tmp_id = np.empty(cap, dtype=np.int64)
                    tmp_lo[:np_out] = out_lo[:np_out]
                    tmp_id[:np_out] = out_id[:np_out]
                    out_lo, out_id = tmp_lo, tmp_id
                out_lo[np_out] = x_cur
                out_id[np_out] = w
                np_out += 1
            continue
        if not np.isfinite(next_ev):
            break
        x_cur = next_ev
        e_idx += 1
        for j in range(n):
            if active[j] and chi[j] <= x_cur:
                active[j] = False
        for j in range(n):
            if keep[j] and not active[j] and clo[j] <= x_cur and x_cur < chi[j]:
                active[j] = True
        if not active.any():
            raise ValueError("candidate domains leave a gap on the line")
        neww = _choose(active, ca, cb, cc, x_cur)
        if neww != w:
            w = neww
            if np_out == cap:
                cap *= 2
                tmp_lo = np.empty(cap, dtype=np.float64)
                tmp_id = np.empty(cap, dtype=np.int64)
                tmp_lo[:np_out] = out_lo[:np_out]
                tmp_id[:np_out] = out_id[:np_out]
                out_lo, out_id = tmp_lo, tmp_id
            out_lo[np_out] = x_cur
            out_id[np_out] = w
            np_out += 1

    # assemble: drop micro pieces (absorbed by their left neighbour) and
    # merge consecutive pieces won by identical functions
    glo = np.empty(np_out, dtype=np.float64)
    ga = np.empty(np_out, dtype=np.float64)
    gb = np.empty(np_out, dtype=np.float64)
    gc = np.empty(np_out, dtype=np.float64)
    gbs = np.empty(np_out, dtype=np.float64)
    gbi = np.empty(np_out, dtype=np.float64)
    k = 0
    for t in range(np_out):
        j = out_id[t]
        lo = out_lo[t]
        if k > 0:
            nxt = out_lo[t + 1] if t + 1 < np_out else np.inf
            if nxt - lo < _WIDTH_TOL * (1.0 + abs(lo)):
                continue  # micro piece: left neighbour keeps the span
            if (
                ga[k - 1] == ca[j]
                and gb[k - 1] == cb[j]
                and gc[k - 1] == cc[j]
                and gbs[k - 1] == cbs[j]
                and gbi[k - 1] == cbi[j]
            ):
                continue  # same function continues
        glo[k] = lo
        ga[k] = ca[j]
        gb[k] = cb[j]
        gc[k] = cc[j]
        gbs[k] = cbs[j]
        gbi[k] = cbi[j]
        k += 1
    return glo[:k], ga[:k], gb[:k], gc[:k], gbs[:k], gbi[:k]


@njit(cache=True)
def _candidates(flo, fa, fb, fc, gamma, lam):
    """Candidate minimiser functions for one stage of the recursion.

    For f with pieces (a_r, b_r, c_r) on [lo_r, hi_r) emits, per piece:
    the gap-interior candidate (stationary inner minimiser, emitted only
    when 2*a_r - 1/gamma > 0), the saturated-gap constant candidate
    (emitted when a_r > 0 and the vertex lies in the piece), and the
    zero-gap identity candidate.  Backpointers map the envelope argument
    to the inner minimiser.
    """
    m = flo.shape[0]
    glam = gamma * lam
    sat = 0.5 * gamma * lam * lam
    cap = 3 * m
    clo = np.empty(cap, dtype=np.float64)
    chi = np.empty(cap, dtype=np.float64)
    ca = np.empty(cap, dtype=np.float64)
    cb = np.empty(cap, dtype=np.float64)
    cc = np.empty(cap, dtype=np.float64)
    cbs = np.empty(cap, dtype=np.float64)
    cbi = np.empty(cap, dtype=np.float64)
    nc = 0
    for r in range(m):
        a = fa[r]
        b = fb[r]
        c = fc[r]
        lo = flo[r]
        hi = flo[r + 1] if r + 1 < m else np.inf

        # identity candidate: inner minimiser at the boundary theta_prev = x
        clo[nc] = lo
        chi[nc] = hi
        ca[nc] = a
        cb[nc] = b
        cc[nc] = c
        cbs[nc] = 1.0
        cbi[nc] = 0.0
        nc += 1

        denom = 1.0 - 2.0 * a * gamma
        if denom < 0.0 and lam > 0.0:
            # stationary inner minimiser with an unsaturated gap; finite on
            # the image of the piece intersected with the gap-range window
            img_lo = denom * hi + gamma * (lam - b) if np.isfinite(hi) else -np.inf
            img_hi = denom * lo + gamma * (lam - b) if np.isfinite(lo) else np.inf
            gap_lo = (lam - b) / (2.0 * a)
            gap_hi = (2.0 * a * glam - b) / (2.0 * a)
            d_lo = max(img_lo, gap_lo)
            d_hi = min(img_hi, gap_hi)
            if d_hi - d_lo > _WIDTH_TOL * (1.0 + abs(d_lo)):
                clo[nc] = d_lo
                chi[nc] = d_hi
                ca[nc] = a / denom
                cb[nc] = (b - 2.0 * a * glam) / denom
                cc[nc] = gamma * (b - lam) * (b - lam) / (2.0 * denom) + c
                cbs[nc] = 1.0 / denom
                cbi[nc] = gamma * (b - lam) / denom
                nc += 1

        if a > 0.0:
            v = -b / (2.0 * a)
            if lo <= v < hi:
                # saturated gap: inner minimiser pinned at the piece vertex
                clo[nc] = v + glam
                chi[nc] = np.inf
                ca[nc] = 0.0
                cb[nc] = 0.0
                cc[nc] = c - b * b / (4.0 * a) + sat
                cbs[nc] = 0.0
                cbi[nc] = v
                nc += 1
    return (
        clo[:nc],
        chi[:nc],
        ca[:nc],
        cb[:nc],
        cc[:nc],
        cbs[:nc],
        cbi[:nc],
    )


@njit(cache=True)
def _minimize(flo, fa, fb, fc):
    """Global minimum of a coercive piecewise quadratic.

    Returns (argmin, value) with the smallest minimiser on value ties.
    """
    m = flo.shape[0]
    a0, b0 = fa[0], fb[0]
    am, bm = fa[m - 1], fb[m - 1]
    if not (a0 > 0.0 or (a0 == 0.0 and b0 < 0.0)):
        raise ValueError("function is not coercive towards -inf")
    if not (am > 0.0 or (am == 0.0 and bm > 0.0)):
        raise ValueError("function is not coercive towards +inf")
    best_x = np.inf
    best_v = np.inf
    for r in range(m):
        lo = flo[r]
        hi = flo[r + 1] if r + 1 < m else np.inf
        a, b, c = fa[r], fb[r], fc[r]
        if a > 0.0:
            x = -b / (2.0 * a)
            if x < lo:
                x = lo
            elif x > hi:
                x = hi
        elif a == 0.0:
            if b > 0.0:
                x = lo
            elif b < 0.0:
                x = hi
            else:
                x = lo
        else:
            # concave piece: minimum at an endpoint
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError("concave piece with an unbounded interval")
            x = lo if _qval(a, b, c, lo) <= _qval(a, b, c, hi) else hi
        if not np.isfinite(x):
            continue
        v = _qval(a, b, c, x)
        if v < best_v or (v == best_v and x < best_x):
            best_v = v
            best_x = x
    return best_x, best_v


@njit(cache=True, inline="always")
def _plin_eval(los, slopes, intercepts, x):
    i = np.searchsorted(los, x, side="right") - 1
    if i < 0:
        i = 0
    return slopes[i] * x + intercepts[i]


@njit(cache=True)
def _solve(w, ybar, gamma, lam):
    """Exact global minimiser over nondecreasing coefficient vectors.

    ``ybar`` must be sorted ascending.  Returns the coefficient vector in
    that order together with the per-stage piece counts of the running
    envelope representation.
    """
    K = w.shape[0]
    counts = np.zeros(K, dtype=np.int64)
    flo = np.empty(1, dtype=np.float64)
    fa = np.empty(1, dtype=np.float64)
    fb = np.empty(1, dtype=np.float64)
    fc = np.empty(1, dtype=np.float64)
    flo[0] = -np.inf
    fa[0] = 0.5 * w[0]
    fb[0] = -w[0] * ybar[0]
    fc[0] = 0.5 * w[0] * ybar[0] * ybar[0]
    counts[0] = 1

    # typed lists with a sentinel entry so inference works when K == 1
    sentinel = np.empty(0, dtype=np.float64)
    back_lo = [sentinel]
    back_s = [sentinel]
    back_i = [sentinel]
    for k in range(1, K):
        clo, chi, ca, cb, cc, cbs, cbi = _candidates(flo, fa, fb, fc, gamma, lam)
        glo, ga, gb, gc, gbs, gbi = _envelope(clo, chi, ca, cb, cc, cbs, cbi)
        back_lo.append(glo.copy())
        back_s.append(gbs)
        back_i.append(gbi)
        ga = ga + 0.5 * w[k]
        gb = gb - w[k] * ybar[k]
        gc = gc + 0.5 * w[k] * ybar[k] * ybar[k]
        flo, fa, fb, fc = glo, ga, gb, gc
        counts[k] = glo.shape[0]

    theta = np.empty(K, dtype=np.float64)
    x, _ = _minimize(flo, fa, fb, fc)
    theta[K - 1] = x
    for k in range(K - 2, -1, -1):
        t = _plin_eval(back_lo[k + 1], back_s[k + 1], back_i[k + 1], theta[k + 1])
        if t > theta[k + 1]:
            t = theta[k + 1]
        theta[k] = t
    return theta + 0.0, counts
