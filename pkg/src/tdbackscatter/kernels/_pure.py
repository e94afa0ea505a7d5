"""Numpy reference implementations of the sample-domain hot loops.

These are the fallback backend when the compiled extension is unavailable;
they also serve as the behavioural reference the compiled kernels are tested
against. Inputs are assumed contiguous and of the right dtype (the dispatch
layer in ``tdbackscatter.kernels`` takes care of coercion).
"""

import numpy as np


def windowed_mean(x, window):
    """Mean over consecutive non-overlapping windows; the tail remainder is dropped."""
    n_out = x.shape[0] // window
    if n_out == 0:
        return np.empty(0, dtype=np.float64)
    return x[: n_out * window].reshape(n_out, window).mean(axis=1)


def ook_majority_bits(samples_dbm, start, sps, threshold_dbm):
    """Slice hard bits from an RSS trace by per-window majority vote.

    A sample counts as "on" when it is at or above the threshold; a bit is 1
    only on a strict majority, so an even split decides 0.
    """
    usable = samples_dbm[start:]
    nbits = usable.shape[0] // sps
    if nbits == 0:
        return np.zeros(0, dtype=np.uint8)
    above = (usable[: nbits * sps].reshape(nbits, sps) >= threshold_dbm).sum(axis=1)
    return (2 * above > sps).astype(np.uint8)


def fsk_symbol_energies(iq, sps, f0, f1, fs):
    """Noncoherent correlation energies of each symbol against the two tones.

    Returns ``(e0, e1)`` where ``e_k[s]`` is ``|sum x[n] * exp(-j 2 pi f_k n / fs)|^2``
    over symbol ``s``, with ``n`` counted from the symbol start. Pure tones make
    the energies independent of the time origin, so per-symbol templates are
    exact.
    """
    nsym = iq.shape[0] // sps
    if nsym == 0:
        z = np.zeros(0, dtype=np.float64)
        return z, z.copy()
    x = iq[: nsym * sps].reshape(nsym, sps)
    n = np.arange(sps)
    templates = np.exp(-2j * np.pi * np.outer(n, np.array([f0, f1])) / fs)
    corr = x @ templates
    energies = np.abs(corr) ** 2
    return np.ascontiguousarray(energies[:, 0]), np.ascontiguousarray(energies[:, 1])
