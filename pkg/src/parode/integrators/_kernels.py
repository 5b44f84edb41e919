"""Step kernels.

Each kernel body is written once in numba-compatible Python and takes the
vector field as its first argument. :func:`specialize` binds a field to a
kernel: for a compiled field it returns a ``nogil`` closure (calling a numba
function with a dispatcher *argument* costs several microseconds of typing per
call, a closure does not), for a plain Python field it returns the
interpreted body. Inner sums always run in fixed index order, so results do
not depend on the thread that runs a kernel.
"""

from __future__ import annotations

import functools
import math
import warnings

import numba
import numpy as np

from ..tableaus import DOP853_A, DOP853_B, DOP853_C, DOP853_E3, DOP853_E5

_JIT = dict(nogil=True, cache=True)


def _combine(err5, err3):
    # err5**2 / sqrt(err5**2 + 0.01 * err3**2) without overflow
    if not (math.isfinite(err5) and math.isfinite(err3)):
        return math.inf
    if err5 == 0.0:
        return 0.0
    r = err3 / err5
    return err5 / math.sqrt(1.0 + 0.01 * r * r)


combine = numba.njit(**_JIT)(_combine)


def _rk4(field, params, t, y, h):
    half = 0.5 * h
    k1 = field(t, y, params)
    k2 = field(t + half, y + half * k1, params)
    k3 = field(t + half, y + half * k2, params)
    k4 = field(t + h, y + h * k3, params)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _dop853(field, params, t, y, h, k1):
    """One DOP853 step; returns (y_next, err5, err3) with max-norm errors."""
    d = y.shape[0]
    K = np.empty((12, d))
    K[0, :] = k1
    for i in range(1, 12):
        ytmp = np.empty(d)
        for c in range(d):
            acc = 0.0
            for j in range(i):
                acc += DOP853_A[i, j] * K[j, c]
            ytmp[c] = y[c] + h * acc
        K[i, :] = field(t + DOP853_C[i] * h, ytmp, params)

    y_next = np.empty(d)
    err5 = 0.0
    err3 = 0.0
    for c in range(d):
        s8 = 0.0
        s5 = 0.0
        s3 = 0.0
        for j in range(12):
            kj = K[j, c]
            s8 += DOP853_B[j] * kj
            s5 += DOP853_E5[j] * kj
            s3 += DOP853_E3[j] * kj
        y_next[c] = y[c] + h * s8
        v5 = abs(h * s5)
        v3 = abs(h * s3)
        # NaN must stick: comparisons against NaN are false
        if v5 > err5 or v5 != v5:
            err5 = v5
        if v3 > err3 or v3 != v3:
            err3 = v3
    return y_next, err5, err3


_dop853_c = numba.njit(**_JIT)(_dop853)


def _dop853_spans(field, params, t, y, k1, spans):
    """Independent DOP853 steps of the given spans from one shared (t, y, k1)."""
    n = spans.shape[0]
    Y = np.empty((n, y.shape[0]))
    eps = np.empty(n)
    for p in range(n):
        y_next, err5, err3 = _dop853_c(field, params, t, y, spans[p], k1)
        Y[p, :] = y_next
        eps[p] = combine(err5, err3)
    return Y, eps


def _dop853_spans_py(field, params, t, y, k1, spans):
    n = spans.shape[0]
    Y = np.empty((n, y.shape[0]))
    eps = np.empty(n)
    for p in range(n):
        y_next, err5, err3 = _dop853(field, params, t, y, spans[p], k1)
        Y[p, :] = y_next
        eps[p] = _combine(err5, err3)
    return Y, eps


def _pirk_stage_inputs(y, h, A, K):
    s = A.shape[0]
    d = y.shape[0]
    Y = np.empty((s, d))
    for i in range(s):
        for c in range(d):
            acc = 0.0
            for j in range(s):
                acc += A[i, j] * K[j, c]
            Y[i, c] = y[c] + h * acc
    return Y


def _pirk_finish(y, h, b, K, K_prev):
    """Return (y_next, eps) where eps = max |h * sum b_i (K_i - K_prev_i)|."""
    s = b.shape[0]
    d = y.shape[0]
    y_next = np.empty(d)
    eps = 0.0
    for c in range(d):
        acc = 0.0
        diff = 0.0
        for i in range(s):
            acc += b[i] * K[i, c]
            diff += b[i] * (K[i, c] - K_prev[i, c])
        y_next[c] = y[c] + h * acc
        v = abs(h * diff)
        if v > eps or v != v:
            eps = v
    return y_next, eps


pirk_stage_inputs = numba.njit(**_JIT)(_pirk_stage_inputs)
pirk_finish = numba.njit(**_JIT)(_pirk_finish)


def _pirk(field, params, t, y, h, A, b, c, m, k0):
    s = b.shape[0]
    d = y.shape[0]
    K = np.empty((s, d))
    for i in range(s):
        K[i, :] = k0
    K_prev = K.copy()
    for _ in range(m):
        Y = pirk_stage_inputs(y, h, A, K)
        K_prev = K
        K = np.empty((s, d))
        for i in range(s):
            K[i, :] = field(t + c[i] * h, Y[i], params)
    return pirk_finish(y, h, b, K, K_prev)


_BODIES = {
    "rk4": (_rk4, numba.njit(**_JIT)(_rk4)),
    "dop853": (_dop853, _dop853_c),
    "dop853_spans": (_dop853_spans_py, numba.njit(**_JIT)(_dop853_spans)),
    "pirk": (_pirk, numba.njit(**_JIT)(_pirk)),
}


def _bind_compiled(body, field):
    @numba.njit(nogil=True)
    def kernel(*args):
        return body(field, *args)

    return kernel


# passing the field into the body goes through numba's first-class function
# support, which warns on every compile
warnings.filterwarnings("ignore", message="First-class function type", category=numba.NumbaExperimentalFeatureWarning)


@functools.lru_cache(maxsize=None)
def specialize(name: str, field, compiled: bool):
    """Return ``kernel(*args)`` equivalent to ``body(field, *args)``."""
    py_body, jit_body = _BODIES[name]
    if compiled:
        return _bind_compiled(jit_body, field)
    return functools.partial(_interpreted, py_body, field)


def _interpreted(body, field, *args):
    # overflow is reported through the result (inf/nan), not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        return body(field, *args)
