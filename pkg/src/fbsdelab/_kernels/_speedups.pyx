# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpolation and shift-inversion kernels.

Twin of _fallback.py: same formulas in the same operation order so results
are bit-identical across backends (compiled with -O3 only, no fast-math).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()

BACKEND = "compiled"


cdef inline double _basis(double p0, double p1, double p2, double p3, double s) nogil:
    cdef double a = p2 - p0
    cdef double b = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3
    cdef double c = 3.0 * (p1 - p2) + p3 - p0
    return p1 + 0.5 * s * (a + s * (b + s * c))


cdef inline Py_ssize_t _mod(Py_ssize_t i, Py_ssize_t n) nogil:
    cdef Py_ssize_t r = i % n
    if r < 0:
        r += n
    return r


cdef inline double _interp_row(const double* row, Py_ssize_t N, double t) nogil:
    cdef double i0 = floor(t)
    cdef double s = t - i0
    cdef Py_ssize_t i = _mod(<Py_ssize_t>i0, N)
    cdef Py_ssize_t im1 = _mod(i - 1, N)
    cdef Py_ssize_t ip1 = _mod(i + 1, N)
    cdef Py_ssize_t ip2 = _mod(i + 2, N)
    return _basis(row[im1], row[i], row[ip1], row[ip2], s)


def catmull_rom_1d(const double[:, ::1] table, const double[::1] x, double L):
    cdef Py_ssize_t ncomp = table.shape[0]
    cdef Py_ssize_t N = table.shape[1]
    cdef Py_ssize_t n = x.shape[0]
    cdef double h = 2.0 * L / N
    out_arr = np.empty((n, ncomp), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t m, c
    cdef double t
    with nogil:
        for m in range(n):
            t = (x[m] + L) / h
            for c in range(ncomp):
                out[m, c] = _interp_row(&table[c, 0], N, t)
    return out_arr


cdef inline double _interp_tile(const double* tab, Py_ssize_t N, double t0, double t1) nogil:
    cdef double j0 = floor(t0)
    cdef double j1 = floor(t1)
    cdef double s0 = t0 - j0
    cdef double s1 = t1 - j1
    cdef Py_ssize_t i0 = _mod(<Py_ssize_t>j0, N)
    cdef Py_ssize_t i1 = _mod(<Py_ssize_t>j1, N)
    cdef Py_ssize_t r0 = _mod(i0 - 1, N)
    cdef Py_ssize_t r1 = i0
    cdef Py_ssize_t r2 = _mod(i0 + 1, N)
    cdef Py_ssize_t r3 = _mod(i0 + 2, N)
    cdef Py_ssize_t c0 = _mod(i1 - 1, N)
    cdef Py_ssize_t c1 = i1
    cdef Py_ssize_t c2 = _mod(i1 + 1, N)
    cdef Py_ssize_t c3 = _mod(i1 + 2, N)
    cdef double q0 = _basis(tab[r0 * N + c0], tab[r0 * N + c1], tab[r0 * N + c2], tab[r0 * N + c3], s1)
    cdef double q1 = _basis(tab[r1 * N + c0], tab[r1 * N + c1], tab[r1 * N + c2], tab[r1 * N + c3], s1)
    cdef double q2 = _basis(tab[r2 * N + c0], tab[r2 * N + c1], tab[r2 * N + c2], tab[r2 * N + c3], s1)
    cdef double q3 = _basis(tab[r3 * N + c0], tab[r3 * N + c1], tab[r3 * N + c2], tab[r3 * N + c3], s1)
    return _basis(q0, q1, q2, q3, s0)


def catmull_rom_2d(const double[:, :, ::1] table, const double[:, ::1] x, double L):
    cdef Py_ssize_t ncomp = table.shape[0]
    cdef Py_ssize_t N = table.shape[1]
    cdef Py_ssize_t n = x.shape[0]
    cdef double h = 2.0 * L / N
    out_arr = np.empty((n, ncomp), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t m, c
    cdef double t0, t1
    with nogil:
        for m in range(n):
            t0 = (x[m, 0] + L) / h
            t1 = (x[m, 1] + L) / h
            for c in range(ncomp):
                out[m, c] = _interp_tile(&table[c, 0, 0], N, t0, t1)
    return out_arr


def invert_shift_1d(const double[:, ::1] xi_table, const double[::1] v, double L,
                    double tol, int max_iter):
    cdef Py_ssize_t N = xi_table.shape[1]
    cdef Py_ssize_t n = v.shape[0]
    cdef double h = 2.0 * L / N
    y_arr = np.empty(n, dtype=np.float64)
    ok_arr = np.zeros(n, dtype=bool)
    cdef double[::1] y = y_arr
    cdef cnp.uint8_t[::1] ok = ok_arr.view(np.uint8)
    cdef Py_ssize_t m
    cdef int it
    cdef double yi, y_new, xi_y
    with nogil:
        for m in range(n):
            yi = v[m]
            for it in range(max_iter):
                xi_y = _interp_row(&xi_table[0, 0], N, (yi + L) / h)
                y_new = v[m] - xi_y
                if fabs(y_new - yi) <= tol:
                    yi = y_new
                    ok[m] = 1
                    break
                yi = y_new
            y[m] = yi
    return y_arr, ok_arr


def invert_shift_2d(const double[:, :, ::1] xi_table, const double[:, ::1] v, double L,
                    double tol, int max_iter):
    cdef Py_ssize_t N = xi_table.shape[1]
    cdef Py_ssize_t n = v.shape[0]
    cdef double h = 2.0 * L / N
    y_arr = np.empty((n, 2), dtype=np.float64)
    ok_arr = np.zeros(n, dtype=bool)
    cdef double[:, ::1] y = y_arr
    cdef cnp.uint8_t[::1] ok = ok_arr.view(np.uint8)
    cdef Py_ssize_t m
    cdef int it
    cdef double y0, y1, n0, n1, xi0, xi1, d0, d1, delta
    with nogil:
        for m in range(n):
            y0 = v[m, 0]
            y1 = v[m, 1]
            for it in range(max_iter):
                xi0 = _interp_tile(&xi_table[0, 0, 0], N, (y0 + L) / h, (y1 + L) / h)
                xi1 = _interp_tile(&xi_table[1, 0, 0], N, (y0 + L) / h, (y1 + L) / h)
                n0 = v[m, 0] - xi0
                n1 = v[m, 1] - xi1
                d0 = fabs(n0 - y0)
                d1 = fabs(n1 - y1)
                delta = d0 if d0 > d1 else d1
                y0 = n0
                y1 = n1
                if delta <= tol:
                    ok[m] = 1
                    break
            y[m, 0] = y0
            y[m, 1] = y1
    return y_arr, ok_arr
