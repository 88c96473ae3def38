# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-tick kernels; see ``_kernels_py`` for the reference semantics."""
from libc.math cimport rint
from libc.stdint cimport uint64_t, int64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double SHARE_SCALE = 4294967296.0
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef object MASK64 = 0xFFFFFFFFFFFFFFFF


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = z + GOLDEN
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


def mix64(z):
    return _mix64(<uint64_t>(z & MASK64))


def uniform01(seed, index, tick):
    cdef uint64_t h = _mix64(_mix64(_mix64(<uint64_t>(seed & MASK64)) ^ <uint64_t>(index & MASK64))
                             ^ <uint64_t>(tick & MASK64))
    return <double>(h >> 11) * INV_2_53


cdef inline int64_t _share_units(double dc, double dm, double db,
                                 double cc, double cm, double cb,
                                 double a, double b, double c) nogil:
    cdef double r0 = dc / cc
    cdef double r1 = dm / cm
    cdef double r2 = db / cb
    cdef double eps
    if r0 > 1.0:
        r0 = 1.0
    if r1 > 1.0:
        r1 = 1.0
    if r2 > 1.0:
        r2 = 1.0
    eps = a * r0 + b * r1 + c * r2
    if eps > 1.0:
        eps = 1.0
    return <int64_t>rint(eps * 100.0 * SHARE_SCALE)


def share_units(double dc, double dm, double db, double cc, double cm, double cb,
                double a, double b, double c):
    return _share_units(dc, dm, db, cc, cm, cb, a, b, c)


def fill_demands(seed, long long tick, const double[::1] rates, double multiplier,
                 const double[::1] unit_costs, double jitter, double[:, ::1] out):
    cdef Py_ssize_t i, n = rates.shape[0]
    cdef uint64_t head = _mix64(<uint64_t>(seed & MASK64))
    cdef uint64_t t = <uint64_t>tick
    cdef uint64_t h
    cdef double x, u, scale
    cdef double c0 = unit_costs[0], c1 = unit_costs[1], c2 = unit_costs[2]
    with nogil:
        for i in range(n):
            if jitter != 0.0:
                h = _mix64(_mix64(head ^ <uint64_t>i) ^ t)
                x = <double>(h >> 11) * INV_2_53
                u = jitter * (2.0 * x - 1.0)
                scale = rates[i] * multiplier * (1.0 + u)
            else:
                scale = rates[i] * multiplier
            out[i, 0] = scale * c0
            out[i, 1] = scale * c1
            out[i, 2] = scale * c2
    return out


def owner_share_units(const double[:, ::1] demands, const double[:, ::1] caps,
                      const double[::1] weights, int64_t[::1] out):
    cdef Py_ssize_t i, n = demands.shape[0]
    cdef double a = weights[0], b = weights[1], c = weights[2]
    with nogil:
        for i in range(n):
            out[i] = _share_units(demands[i, 0], demands[i, 1], demands[i, 2],
                                  caps[i, 0], caps[i, 1], caps[i, 2], a, b, c)
    return out


def sum_by_owner(const int64_t[::1] units, const int64_t[::1] owner, Py_ssize_t k,
                 int64_t[::1] out):
    cdef Py_ssize_t i, n = units.shape[0]
    with nogil:
        for i in range(k):
            out[i] = 0
        for i in range(n):
            out[owner[i]] += units[i]
    return out
