"""Hot numeric kernels.

Each kernel exists in two flavours: a loop version compiled by numba
(``*_nb``) and a vectorised numpy version (``*_np``). The public name picks
one according to :mod:`qdchoice._accel`. Both flavours must agree to
rounding; ``benchmarks/bench_backends.py`` times them side by side.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 200

# bit flags returned by the classification kernels
WAVE_ACTS_AS_PARTICLE = 1
PARTICLE_ACTS_AS_WAVE = 2
PERFECT_CORRELATION = 4
TRIVIAL_DEGENERATE = 8


# --------------------------------------------------------------------------
# Jacobi eigenvalues of a real symmetric matrix
# --------------------------------------------------------------------------

def _jacobi_eigvals_py(a_in):
    a = a_in.copy()
    n = a.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    thresh = JACOBI_TOL * max(1.0, np.sqrt(scale))
    for _sweep in range(JACOBI_MAX_SWEEPS):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if np.sqrt(off) < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-150 * abs(a[q, q] - a[p, p]):
                    # negligible against the diagonal gap; theta would overflow
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    out = np.empty(n)
    for i in range(n):
        out[i] = a[i, i]
    return np.sort(out)


_jacobi_eigvals_nb = njit(_jacobi_eigvals_py)


def jacobi_eigvals(a):
    """Ascending eigenvalues of the real symmetric float64 matrix ``a``."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if USE_NUMBA:
        return _jacobi_eigvals_nb(a)
    return _jacobi_eigvals_py(a)


# --------------------------------------------------------------------------
# Hidden-variable model: joint distributions and residuals, batched
# --------------------------------------------------------------------------

def model_many_np(params, betas):
    """Model joint distributions for a batch of parameter rows.

    ``params`` is ``(n, 5)`` with columns (a, b, c, d, e); ``betas`` is a
    scalar or ``(n,)`` array. Returns ``(n, 4)`` in (S, A) order 00, 01, 10, 11.
    """
    a, b, c, d, e = (params[:, k] for k in range(5))
    ab_half = 0.5 * a * b
    wc = (1.0 - a) * c
    a1b = a * (1.0 - b)
    wnc = (1.0 - a) * (1.0 - c)
    out = np.empty((params.shape[0], 4))
    out[:, 0] = ab_half + wc * d
    out[:, 1] = a1b * e + wnc * betas
    out[:, 2] = ab_half + wc * (1.0 - d)
    out[:, 3] = a1b * (1.0 - e) + wnc * (1.0 - betas)
    return out


def residual_many_np(params, beta, target):
    return np.abs(model_many_np(params, beta) - target[None, :]).max(axis=1)


@njit
def _residual_many_nb(params, beta, target):
    n = params.shape[0]
    out = np.empty(n)
    for i in range(n):
        a = params[i, 0]
        b = params[i, 1]
        c = params[i, 2]
        d = params[i, 3]
        e = params[i, 4]
        ab_half = 0.5 * a * b
        wc = (1.0 - a) * c
        a1b = a * (1.0 - b)
        wnc = (1.0 - a) * (1.0 - c)
        r = abs(ab_half + wc * d - target[0])
        r = max(r, abs(a1b * e + wnc * beta - target[1]))
        r = max(r, abs(ab_half + wc * (1.0 - d) - target[2]))
        r = max(r, abs(a1b * (1.0 - e) + wnc * (1.0 - beta) - target[3]))
        out[i] = r
    return out


def residual_many(params, beta, target):
    """Max-abs deviation of each model row from ``target`` at one setting."""
    params = np.ascontiguousarray(params, dtype=np.float64)
    target = np.ascontiguousarray(target, dtype=np.float64)
    if USE_NUMBA:
        return _residual_many_nb(params, float(beta), target)
    return residual_many_np(params, beta, target)


def classify_many_np(params, p0, beta, tol):
    a, b, c, d, e = (params[:, k] for k in range(5))
    flags = np.zeros(params.shape[0], dtype=np.int64)
    flags |= np.where((c * (1 - a) > tol) & (np.abs(d - 0.5) < tol), WAVE_ACTS_AS_PARTICLE, 0)
    flags |= np.where((a * (1 - b) > tol) & (np.abs(e - beta) < tol), PARTICLE_ACTS_AS_WAVE, 0)
    # perfect correlation: neither mixed branch carries weight above tol
    flags |= np.where(
        (c * (1 - a) <= tol) & (a * (1 - b) <= tol) & (np.abs(a - p0) < tol), PERFECT_CORRELATION, 0
    )
    marg = a * b + c * (1 - a)
    flags |= np.where((marg < tol) | (marg > 1 - tol), TRIVIAL_DEGENERATE, 0)
    return flags


@njit
def _classify_many_nb(params, p0, beta, tol):
    n = params.shape[0]
    flags = np.zeros(n, dtype=np.int64)
    for i in range(n):
        a = params[i, 0]
        b = params[i, 1]
        c = params[i, 2]
        d = params[i, 3]
        e = params[i, 4]
        f = 0
        if c * (1.0 - a) > tol and abs(d - 0.5) < tol:
            f |= 1
        if a * (1.0 - b) > tol and abs(e - beta) < tol:
            f |= 2
        if c * (1.0 - a) <= tol and a * (1.0 - b) <= tol and abs(a - p0) < tol:
            f |= 4
        marg = a * b + c * (1.0 - a)
        if marg < tol or marg > 1.0 - tol:
            f |= 8
        flags[i] = f
    return flags


def classify_many(params, p0, beta, tol):
    """Rejection-label bit flags for each parameter row (no solution check)."""
    params = np.ascontiguousarray(params, dtype=np.float64)
    if USE_NUMBA:
        return _classify_many_nb(params, float(p0), float(beta), float(tol))
    return classify_many_np(params, p0, beta, tol)


# --------------------------------------------------------------------------
# Exhaustive grid scan of the max-over-settings residual
# --------------------------------------------------------------------------
# For fixed (a, b, c) the A = 0 rows depend only on d and the A = 1 rows only
# on e, so the residual at (a, b, c, d, e) is max(r0[d], r1[e]). Every grid
# point is still evaluated; the split only avoids recomputing shared terms.

@njit
def _scan_grid_nb(grid, betas, targets):
    n = grid.shape[0]
    m = betas.shape[0]
    r0 = np.empty(n)
    r1 = np.empty(n)
    best = np.inf
    best_idx = np.zeros(5, dtype=np.int64)
    for ia in range(n):
        a = grid[ia]
        for ib in range(n):
            b = grid[ib]
            ab_half = 0.5 * a * b
            a1b = a * (1.0 - b)
            for ic in range(n):
                c = grid[ic]
                wc = (1.0 - a) * c
                wnc = (1.0 - a) * (1.0 - c)
                for k in range(n):
                    x = grid[k]
                    worst0 = 0.0
                    worst1 = 0.0
                    for s in range(m):
                        t = targets[s]
                        beta = betas[s]
                        worst0 = max(worst0, abs(ab_half + wc * x - t[0]))
                        worst0 = max(worst0, abs(ab_half + wc * (1.0 - x) - t[2]))
                        worst1 = max(worst1, abs(a1b * x + wnc * beta - t[1]))
                        worst1 = max(worst1, abs(a1b * (1.0 - x) + wnc * (1.0 - beta) - t[3]))
                    r0[k] = worst0
                    r1[k] = worst1
                for id_ in range(n):
                    if r0[id_] >= best:
                        continue
                    for ie in range(n):
                        v = max(r0[id_], r1[ie])
                        if v < best:
                            best = v
                            best_idx[0] = ia
                            best_idx[1] = ib
                            best_idx[2] = ic
                            best_idx[3] = id_
                            best_idx[4] = ie
    return best, best_idx


def scan_grid_np(grid, betas, targets):
    n = grid.shape[0]
    a = grid[:, None, None]
    b = grid[None, :, None]
    c = grid[None, None, :]
    ab_half = np.broadcast_to(0.5 * a * b, (n, n, n)).reshape(-1)
    a1b = np.broadcast_to(a * (1.0 - b), (n, n, n)).reshape(-1)
    wc = np.broadcast_to((1.0 - a) * c, (n, n, n)).reshape(-1)
    wnc = np.broadcast_to((1.0 - a) * (1.0 - c), (n, n, n)).reshape(-1)
    x = grid[None, :]
    r0 = np.zeros((n ** 3, n))
    r1 = np.zeros((n ** 3, n))
    for beta, t in zip(betas, targets):
        np.maximum(r0, np.abs(ab_half[:, None] + wc[:, None] * x - t[0]), out=r0)
        np.maximum(r0, np.abs(ab_half[:, None] + wc[:, None] * (1.0 - x) - t[2]), out=r0)
        np.maximum(r1, np.abs(a1b[:, None] * x + wnc[:, None] * beta - t[1]), out=r1)
        np.maximum(r1, np.abs(a1b[:, None] * (1.0 - x) + wnc[:, None] * (1.0 - beta) - t[3]), out=r1)
    total = np.maximum(r0[:, :, None], r1[:, None, :])
    flat = int(np.argmin(total))  # first occurrence = lexicographically smallest
    best = float(total.reshape(-1)[flat])
    idx = np.array(np.unravel_index(flat, (n, n, n, n, n)), dtype=np.int64)
    return best, idx


def scan_grid(grid, betas, targets):
    """Minimise the max residual over all settings on the 5-D product grid.

    Returns ``(best_value, index_vector)``. Ties resolve to the
    lexicographically smallest index vector regardless of backend.
    """
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    if USE_NUMBA:
        best, idx = _scan_grid_nb(grid, betas, targets)
        return float(best), idx
    return scan_grid_np(grid, betas, targets)
