# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Mirrors ``_pykernels`` function for function."""

from libc.math cimport cos, exp, sqrt

# state layout: p1, p2, p3, re21, im21, re31, im31, re32, im32
DEF NSTATE = 9
DEF BLOWUP = 2.0


cdef inline double _rabi(double t, double peak, double width,
                         double carrier, double chirp) noexcept nogil:
    return peak * exp(-(t * t) / (width * width)) * cos(carrier * t + chirp * t * t * t)


cdef inline void _rhs(double t, const double *y, double *dy, const double *p,
                      int literal) noexcept nogil:
    cdef double a = _rabi(t, p[0], p[1], p[2], p[3])
    cdef double b = _rabi(t, p[4], p[5], p[6], p[7])
    cdef double w31 = p[8]
    cdef double w21 = p[9]
    cdef double w32 = w31 - w21
    cdef double inv32 = y[2] - (y[0] if literal else y[1])
    dy[0] = -2.0 * a * y[6]
    dy[1] = -2.0 * b * y[8]
    dy[2] = 2.0 * a * y[6] + 2.0 * b * y[8]
    dy[3] = w21 * y[4] - b * y[6] - a * y[8]
    dy[4] = -w21 * y[3] + b * y[5] - a * y[7]
    dy[5] = w31 * y[6] - b * y[4]
    dy[6] = -w31 * y[5] + b * y[3] - a * (y[2] - y[0])
    dy[7] = w32 * y[8] + a * y[4]
    dy[8] = -w32 * y[7] + a * y[3] - b * inv32


cdef inline void _step(double t, double h, double *y, const double *p,
                       int literal) noexcept nogil:
    cdef double k1[NSTATE]
    cdef double k2[NSTATE]
    cdef double k3[NSTATE]
    cdef double k4[NSTATE]
    cdef double tmp[NSTATE]
    cdef int j
    cdef double half = 0.5 * h
    _rhs(t, y, k1, p, literal)
    for j in range(NSTATE):
        tmp[j] = y[j] + half * k1[j]
    _rhs(t + half, tmp, k2, p, literal)
    for j in range(NSTATE):
        tmp[j] = y[j] + half * k2[j]
    _rhs(t + half, tmp, k3, p, literal)
    for j in range(NSTATE):
        tmp[j] = y[j] + h * k3[j]
    _rhs(t + h, tmp, k4, p, literal)
    for j in range(NSTATE):
        y[j] = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


cdef inline bint _blown_up(const double *y) noexcept nogil:
    cdef int j
    for j in range(3):
        if not (y[j] <= BLOWUP and y[j] >= -BLOWUP):
            return True
    for j in range(3, NSTATE, 2):
        if not (y[j] * y[j] + y[j + 1] * y[j + 1] <= BLOWUP * BLOWUP):
            return True
    return False


def rk4_evolve(double[::1] state, double t0, double dt, long nsteps,
               double h_last, double[::1] params, int literal, long stride,
               double[:, ::1] rec, double[::1] trec):
    """March ``state`` in place; see ``_pykernels.rk4_evolve``."""
    cdef double y[NSTATE]
    cdef double p[10]
    cdef long i, nrec = 0
    cdef int j
    cdef double t
    for j in range(NSTATE):
        y[j] = state[j]
    for j in range(10):
        p[j] = params[j]
    with nogil:
        for j in range(NSTATE):
            rec[0, j] = y[j]
        trec[0] = t0
        nrec = 1
        for i in range(nsteps):
            t = t0 + i * dt
            _step(t, dt, y, p, literal)
            if _blown_up(y):
                nrec = -(i + 1)
                break
            if (i + 1) % stride == 0:
                for j in range(NSTATE):
                    rec[nrec, j] = y[j]
                trec[nrec] = t0 + (i + 1) * dt
                nrec += 1
        if nrec > 0 and h_last != 0.0:
            t = t0 + nsteps * dt
            _step(t, h_last, y, p, literal)
            if _blown_up(y):
                nrec = -(nsteps + 1)
    if nrec < 0:
        return nrec
    if h_last != 0.0 or nsteps % stride != 0:
        for j in range(NSTATE):
            rec[nrec, j] = y[j]
        trec[nrec] = t0 + nsteps * dt + h_last
        nrec += 1
    for j in range(NSTATE):
        state[j] = y[j]
    return nrec


def apply_unitaries(double complex[:, :, ::1] unitaries, double complex[::1] psi,
                    long offset, long stride, double complex[:, ::1] out,
                    long nout):
    """Left-multiply ``psi`` by each 3x3 unitary in turn; see ``_pykernels``."""
    cdef long n = unitaries.shape[0]
    cdef long k
    cdef double complex a0, a1, a2
    with nogil:
        for k in range(n):
            a0 = unitaries[k, 0, 0] * psi[0] + unitaries[k, 0, 1] * psi[1] + unitaries[k, 0, 2] * psi[2]
            a1 = unitaries[k, 1, 0] * psi[0] + unitaries[k, 1, 1] * psi[1] + unitaries[k, 1, 2] * psi[2]
            a2 = unitaries[k, 2, 0] * psi[0] + unitaries[k, 2, 1] * psi[1] + unitaries[k, 2, 2] * psi[2]
            psi[0] = a0
            psi[1] = a1
            psi[2] = a2
            if (offset + k + 1) % stride == 0:
                out[nout, 0] = a0
                out[nout, 1] = a1
                out[nout, 2] = a2
                nout += 1
    return nout
