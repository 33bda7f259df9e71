"""Hot loops for evaluating random waves along a curve.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy one
with identical semantics.  The compiled path is used when numba imports
and ``TORUS_WAVES_DISABLE_NUMBA`` is unset (or ``0``); setting the flag to
``1`` forces the numpy path, which is also what runs when numba is missing.

Arrays passed in:

* ``mu``   (P, d) float64 -- one representative per +/- frequency pair
* ``c1``, ``c2`` (P,)     -- cosine / sine coefficients
* ``pos``, ``vel`` (M, d) -- curve positions and unit tangents

Outputs are *unnormalised* sums; callers multiply by sqrt(2/N).
"""

from __future__ import annotations

import os

import numpy as np

TWO_PI = 2.0 * np.pi

try:  # pragma: no cover - import guard
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def _numba_requested() -> bool:
    flag = os.environ.get("TORUS_WAVES_DISABLE_NUMBA", "0").strip().lower()
    return flag in ("", "0", "false", "no")


USE_NUMBA = _HAVE_NUMBA and _numba_requested()


# --------------------------------------------------------------------------
# numpy reference path
# --------------------------------------------------------------------------

def _phases_np(mu, pos):
    p = pos @ mu.T
    return p - np.floor(p)


def wave_values_np(mu, c1, c2, pos):
    ph = TWO_PI * _phases_np(mu, pos)
    return np.cos(ph) @ c1 + np.sin(ph) @ c2


def wave_values_derivs_np(mu, c1, c2, pos, vel):
    ph = TWO_PI * _phases_np(mu, pos)
    cs = np.cos(ph)
    sn = np.sin(ph)
    dp = TWO_PI * (vel @ mu.T)
    g = cs @ c1 + sn @ c2
    dg = (dp * (c2 * cs - c1 * sn)).sum(axis=1)
    return g, dg


def second_deriv_bound_np(mu, amp, vel, slack, curv_term):
    # sup |g''| on [t_i, t_i + h] from |<mu, gamma'>| at the left node
    dp = TWO_PI * (np.abs(vel @ mu.T) + slack)
    return (dp * dp + curv_term) @ amp


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

def _wave_values_loop(mu, c1, c2, pos):
    m_nodes = pos.shape[0]
    n_freq = mu.shape[0]
    dim = mu.shape[1]
    out = np.empty(m_nodes)
    for i in range(m_nodes):
        acc = 0.0
        for k in range(n_freq):
            p = 0.0
            for j in range(dim):
                p += mu[k, j] * pos[i, j]
            p -= np.floor(p)
            ph = TWO_PI * p
            acc += c1[k] * np.cos(ph) + c2[k] * np.sin(ph)
        out[i] = acc
    return out


def _wave_values_derivs_loop(mu, c1, c2, pos, vel):
    m_nodes = pos.shape[0]
    n_freq = mu.shape[0]
    dim = mu.shape[1]
    g = np.empty(m_nodes)
    dg = np.empty(m_nodes)
    for i in range(m_nodes):
        acc = 0.0
        dacc = 0.0
        for k in range(n_freq):
            p = 0.0
            dp = 0.0
            for j in range(dim):
                p += mu[k, j] * pos[i, j]
                dp += mu[k, j] * vel[i, j]
            p -= np.floor(p)
            ph = TWO_PI * p
            cs = np.cos(ph)
            sn = np.sin(ph)
            acc += c1[k] * cs + c2[k] * sn
            dacc += TWO_PI * dp * (c2[k] * cs - c1[k] * sn)
        g[i] = acc
        dg[i] = dacc
    return g, dg


def _second_deriv_bound_loop(mu, amp, vel, slack, curv_term):
    m_nodes = vel.shape[0]
    n_freq = mu.shape[0]
    dim = mu.shape[1]
    out = np.empty(m_nodes)
    for i in range(m_nodes):
        acc = 0.0
        for k in range(n_freq):
            dp = 0.0
            for j in range(dim):
                dp += mu[k, j] * vel[i, j]
            w = TWO_PI * (abs(dp) + slack)
            acc += amp[k] * (w * w + curv_term)
        out[i] = acc
    return out


if _HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    wave_values_nb = _jit(_wave_values_loop)
    wave_values_derivs_nb = _jit(_wave_values_derivs_loop)
    second_deriv_bound_nb = _jit(_second_deriv_bound_loop)
else:  # pragma: no cover
    wave_values_nb = _wave_values_loop
    wave_values_derivs_nb = _wave_values_derivs_loop
    second_deriv_bound_nb = _second_deriv_bound_loop


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def wave_values(mu, c1, c2, pos):
    if USE_NUMBA:
        return wave_values_nb(_c(mu), _c(c1), _c(c2), _c(pos))
    return wave_values_np(mu, c1, c2, pos)


def wave_values_derivs(mu, c1, c2, pos, vel):
    if USE_NUMBA:
        return wave_values_derivs_nb(_c(mu), _c(c1), _c(c2), _c(pos), _c(vel))
    return wave_values_derivs_np(mu, c1, c2, pos, vel)


def second_deriv_bound(mu, amp, vel, slack, curv_term):
    if USE_NUMBA:
        return second_deriv_bound_nb(_c(mu), _c(amp), _c(vel), float(slack), float(curv_term))
    return second_deriv_bound_np(mu, amp, vel, slack, curv_term)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
