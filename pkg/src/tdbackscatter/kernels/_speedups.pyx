# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops mirroring :mod:`tdbackscatter.kernels._pure`."""

from libc.math cimport M_PI, cos, sin

import numpy as np

cimport numpy as cnp

cnp.import_array()


def windowed_mean(const double[::1] x, Py_ssize_t window):
    cdef Py_ssize_t n_out = x.shape[0] // window
    out = np.empty(n_out, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n_out):
        acc = 0.0
        for k in range(window):
            acc += x[i * window + k]
        o[i] = acc / window
    return out


def ook_majority_bits(const double[::1] samples_dbm, Py_ssize_t start,
                      Py_ssize_t sps, double threshold_dbm):
    cdef Py_ssize_t nbits = (samples_dbm.shape[0] - start) // sps
    if nbits < 0:
        nbits = 0
    out = np.zeros(nbits, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t i, k, ones
    for i in range(nbits):
        ones = 0
        for k in range(sps):
            if samples_dbm[start + i * sps + k] >= threshold_dbm:
                ones += 1
        if 2 * ones > sps:
            o[i] = 1
    return out


def fsk_symbol_energies(const double complex[::1] iq, Py_ssize_t sps,
                        double f0, double f1, double fs):
    cdef Py_ssize_t nsym = iq.shape[0] // sps
    e0 = np.zeros(nsym, dtype=np.float64)
    e1 = np.zeros(nsym, dtype=np.float64)
    cdef double[::1] e0v = e0
    cdef double[::1] e1v = e1
    # Per-sample rotation factors for exp(-j 2 pi f n / fs), advanced by
    # complex multiplication inside the symbol.
    cdef double w0 = 2.0 * M_PI * f0 / fs
    cdef double w1 = 2.0 * M_PI * f1 / fs
    cdef double complex r0 = cos(w0) - 1j * sin(w0)
    cdef double complex r1 = cos(w1) - 1j * sin(w1)
    cdef double complex p0, p1, c0, c1, z
    cdef Py_ssize_t s, k
    for s in range(nsym):
        p0 = 1.0 + 0.0j
        p1 = 1.0 + 0.0j
        c0 = 0.0 + 0.0j
        c1 = 0.0 + 0.0j
        for k in range(sps):
            z = iq[s * sps + k]
            c0 = c0 + z * p0
            c1 = c1 + z * p1
            p0 = p0 * r0
            p1 = p1 * r1
        e0v[s] = c0.real * c0.real + c0.imag * c0.imag
        e1v[s] = c1.real * c1.real + c1.imag * c1.imag
    return e0, e1
