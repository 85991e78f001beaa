"""Pure-Python versions of the hot loops in ``_ckernels.pyx``.

Both modules expose the same two functions with the same argument
conventions, so :mod:`lambdachirp.kernels` can swap one for the other.
The state vector packs the Hermitian density matrix into nine reals::

    p1, p2, p3, re21, im21, re31, im31, re32, im32
"""

from __future__ import annotations

import math

import numpy as np

_BLOWUP = 2.0


def _rhs(t, y, p, literal):
    e1 = math.exp(-(t * t) / (p[1] * p[1]))
    e2 = math.exp(-(t * t) / (p[5] * p[5]))
    a = p[0] * e1 * math.cos(p[2] * t + p[3] * t * t * t)
    b = p[4] * e2 * math.cos(p[6] * t + p[7] * t * t * t)
    w31 = p[8]
    w21 = p[9]
    w32 = w31 - w21
    p1, p2, p3, x21, y21, x31, y31, x32, y32 = y
    inv32 = p3 - (p1 if literal else p2)
    return (
        -2.0 * a * y31,
        -2.0 * b * y32,
        2.0 * a * y31 + 2.0 * b * y32,
        w21 * y21 - b * y31 - a * y32,
        -w21 * x21 + b * x31 - a * x32,
        w31 * y31 - b * y21,
        -w31 * x31 + b * x21 - a * (p3 - p1),
        w32 * y32 + a * y21,
        -w32 * x32 + a * x21 - b * inv32,
    )


def _step(t, h, y, p, literal):
    half = 0.5 * h
    k1 = _rhs(t, y, p, literal)
    k2 = _rhs(t + half, [yj + half * kj for yj, kj in zip(y, k1)], p, literal)
    k3 = _rhs(t + half, [yj + half * kj for yj, kj in zip(y, k2)], p, literal)
    k4 = _rhs(t + h, [yj + h * kj for yj, kj in zip(y, k3)], p, literal)
    h6 = h / 6.0
    return [
        yj + h6 * (a + 2.0 * b + 2.0 * c + d)
        for yj, a, b, c, d in zip(y, k1, k2, k3, k4)
    ]


def _blown_up(y):
    for v in y[:3]:
        if not (-_BLOWUP <= v <= _BLOWUP):
            return True
    for j in (3, 5, 7):
        if not (y[j] * y[j] + y[j + 1] * y[j + 1] <= _BLOWUP * _BLOWUP):
            return True
    return False


def rk4_evolve(state, t0, dt, nsteps, h_last, params, literal, stride, rec, trec):
    """March ``state`` (length-9 float array) in place with classic RK4.

    Step ``i`` starts at ``t0 + i*dt``; ``dt`` may be negative. After the
    ``nsteps`` full steps an optional partial step of size ``h_last`` is
    taken. The initial state, every ``stride``-th state and the final state
    are written to ``rec``/``trec``.

    Returns the number of records written, or ``-(i + 1)`` if step ``i``
    produced an element with modulus above 2 (or a NaN); ``state`` is left
    untouched in that case.
    """
    p = [float(v) for v in params]
    y = [float(v) for v in state]
    rec[0, :] = y
    trec[0] = t0
    nrec = 1
    for i in range(nsteps):
        y = _step(t0 + i * dt, dt, y, p, literal)
        if _blown_up(y):
            return -(i + 1)
        if (i + 1) % stride == 0:
            rec[nrec, :] = y
            trec[nrec] = t0 + (i + 1) * dt
            nrec += 1
    if h_last != 0.0:
        y = _step(t0 + nsteps * dt, h_last, y, p, literal)
        if _blown_up(y):
            return -(nsteps + 1)
    if h_last != 0.0 or nsteps % stride != 0:
        rec[nrec, :] = y
        trec[nrec] = t0 + nsteps * dt + h_last
        nrec += 1
    state[:] = y
    return nrec


def apply_unitaries(unitaries, psi, offset, stride, out, nout):
    """Apply each 3x3 matrix of ``unitaries`` to ``psi`` in place, in order.

    After the ``k``-th product, the state is stored in ``out[nout]`` whenever
    ``(offset + k + 1) % stride == 0``. Returns the updated ``nout``.
    """
    v = np.array(psi, dtype=np.complex128)
    for k in range(unitaries.shape[0]):
        v = unitaries[k] @ v
        if (offset + k + 1) % stride == 0:
            out[nout] = v
            nout += 1
    psi[:] = v
    return nout
