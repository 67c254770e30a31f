"""Hot loops of the flash simulator, with numba and pure-numpy backends.

Random numbers come from a counter-based construction: each uniform is a
SplitMix64-style hash of a per-chunk key and a counter
``flash << 40 | slot``.  Slot 0 and 1 carry the photon-number draws of
modes a and b; detector thinning of photon ``j`` uses slot ``2 + j`` (mode a)
or ``2**39 + j`` (mode b).  Since every draw is addressed rather than
streamed, the result of a flash does not depend on how the flash range is
split into chunks or across threads.

Set ``SONOSQUEEZE_DISABLE_NUMBA=1`` to force the numpy path.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("SONOSQUEEZE_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED

FLASH_SHIFT = 40
SLOT_A = 2
SLOT_B = 1 << 39
N_SUMS = 6  # count, sum a, sum b, sum a^2, sum b^2, sum a*b

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------- numpy path


def _mix_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniforms_np(key_a, key_b, counters):
    """Uniforms in [0, 1) for an array of uint64 counters."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _mix_np(np.uint64(key_a) + (c + _ONE) * _GAMMA)
        z = _mix_np(z ^ np.uint64(key_b))
    return (z >> _S11).astype(np.float64) * _INV53


def geometric_np(u, log_ratio):
    """Inverse-CDF geometric draw, P(n) = (1 - r) r^n with ``log_ratio = ln r``."""
    if log_ratio == -math.inf:
        return np.zeros(np.shape(u), dtype=np.int64)
    return np.floor(np.log1p(-u) / log_ratio).astype(np.int64)


def _counter(flash, slot):
    return (np.asarray(flash, dtype=np.uint64) << np.uint64(FLASH_SHIFT)) | np.asarray(
        slot, dtype=np.uint64
    )


def thin_np(n, eta, key_a, key_b, slot_base):
    """Binomial(n, eta) per flash, one Bernoulli trial per photon."""
    if eta >= 1.0:
        return n.copy()
    if eta <= 0.0:
        return np.zeros_like(n)
    owner = np.repeat(np.arange(n.size), n)
    starts = np.cumsum(n) - n
    photon = np.arange(owner.size) - np.repeat(starts, n)
    u = uniforms_np(key_a, key_b, _counter(owner, slot_base + photon))
    return np.bincount(owner[u < eta], minlength=n.size).astype(np.int64)


def sample_chunk_np(squeezed, log_ra, log_rb, eta_a, eta_b, key_a, key_b, n_flashes):
    flash = np.arange(n_flashes)
    n_a = geometric_np(uniforms_np(key_a, key_b, _counter(flash, 0)), log_ra)
    if squeezed:
        n_b = n_a.copy()
    else:
        n_b = geometric_np(uniforms_np(key_a, key_b, _counter(flash, 1)), log_rb)
    n_a = thin_np(n_a, eta_a, key_a, key_b, SLOT_A)
    n_b = thin_np(n_b, eta_b, key_a, key_b, SLOT_B)
    return n_a, n_b


def accumulate_np(n_a, n_b, batch, sums):
    """Add per-batch integer moment sums; ``batch`` must be nondecreasing."""
    if n_a.size == 0:
        return
    a = n_a.astype(np.int64)
    b = n_b.astype(np.int64)
    cols = np.stack([np.ones_like(a), a, b, a * a, b * b, a * b], axis=1)
    starts = np.flatnonzero(np.concatenate([[True], batch[1:] != batch[:-1]]))
    sums[batch[starts]] += np.add.reduceat(cols, starts, axis=0)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _mix_nb(z):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    @numba.njit(cache=True, nogil=True)
    def _uniform_nb(key_a, key_b, counter):
        z = _mix_nb(key_a + (counter + _ONE) * _GAMMA)
        z = _mix_nb(z ^ key_b)
        return np.float64(z >> _S11) * _INV53

    @numba.njit(cache=True, nogil=True)
    def _counter_nb(flash, slot):
        return (np.uint64(flash) << np.uint64(FLASH_SHIFT)) | np.uint64(slot)

    @numba.njit(cache=True, nogil=True)
    def _geometric_nb(u, log_ratio):
        if log_ratio == -np.inf:
            return 0
        return np.int64(math.floor(math.log1p(-u) / log_ratio))

    @numba.njit(cache=True, nogil=True)
    def _thin_nb(n, eta, key_a, key_b, flash, slot_base):
        if eta >= 1.0:
            return n
        if eta <= 0.0:
            return 0
        kept = 0
        for j in range(n):
            if _uniform_nb(key_a, key_b, _counter_nb(flash, slot_base + j)) < eta:
                kept += 1
        return kept

    @numba.njit(cache=True, nogil=True)
    def _sample_chunk_nb(squeezed, log_ra, log_rb, eta_a, eta_b, key_a, key_b, n_a, n_b):
        for i in range(n_a.size):
            na = _geometric_nb(_uniform_nb(key_a, key_b, _counter_nb(i, 0)), log_ra)
            if squeezed:
                nb = na
            else:
                nb = _geometric_nb(_uniform_nb(key_a, key_b, _counter_nb(i, 1)), log_rb)
            n_a[i] = _thin_nb(na, eta_a, key_a, key_b, i, SLOT_A)
            n_b[i] = _thin_nb(nb, eta_b, key_a, key_b, i, SLOT_B)

    @numba.njit(cache=True, nogil=True)
    def _accumulate_nb(n_a, n_b, batch, sums):
        for i in range(n_a.size):
            a = np.int64(n_a[i])
            b = np.int64(n_b[i])
            k = batch[i]
            sums[k, 0] += 1
            sums[k, 1] += a
            sums[k, 2] += b
            sums[k, 3] += a * a
            sums[k, 4] += b * b
            sums[k, 5] += a * b

    def sample_chunk_nb(squeezed, log_ra, log_rb, eta_a, eta_b, key_a, key_b, n_flashes):
        n_a = np.empty(n_flashes, dtype=np.int64)
        n_b = np.empty(n_flashes, dtype=np.int64)
        _sample_chunk_nb(
            squeezed, log_ra, log_rb, eta_a, eta_b,
            np.uint64(key_a), np.uint64(key_b), n_a, n_b,
        )
        return n_a, n_b

    def accumulate_nb(n_a, n_b, batch, sums):
        _accumulate_nb(
            np.ascontiguousarray(n_a, dtype=np.int64),
            np.ascontiguousarray(n_b, dtype=np.int64),
            np.ascontiguousarray(batch, dtype=np.int64),
            sums,
        )


def get_backend(use_numba=None):
    """Return ``(name, sample_chunk, accumulate)`` for the selected backend."""
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and HAVE_NUMBA:
        return "numba", sample_chunk_nb, accumulate_nb
    return "numpy", sample_chunk_np, accumulate_np
