"""Backend selection for the sample-domain hot loops.

The compiled extension is preferred when it imported cleanly; otherwise the
numpy reference implementations are used. Setting the environment variable
``TDBACKSCATTER_PURE=1`` before import forces the pure backend, which is how
the benchmark and the equivalence tests get at both implementations side by
side.
"""

import os

import numpy as np

from . import _pure

if os.environ.get("TDBACKSCATTER_PURE"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"


def windowed_mean(x, window):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if window <= 0:
        raise ValueError("window must be positive")
    return _impl.windowed_mean(x, int(window))


def ook_majority_bits(samples_dbm, start, sps, threshold_dbm):
    samples_dbm = np.ascontiguousarray(samples_dbm, dtype=np.float64)
    return _impl.ook_majority_bits(samples_dbm, int(start), int(sps), float(threshold_dbm))


def fsk_symbol_energies(iq, sps, f0, f1, fs):
    iq = np.ascontiguousarray(iq, dtype=np.complex128)
    return _impl.fsk_symbol_energies(iq, int(sps), float(f0), float(f1), float(fs))
