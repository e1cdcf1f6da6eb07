"""Pure-Python (numpy) implementations of the hot kernels.

Signatures and results mirror ``_ckernels``; the dispatcher in
``photonpaths._kernels`` falls back to this module when the compiled
extension is unavailable.
"""

import numpy as np


def path_sum(coeffs, indptr, indices, theta):
    """Sum ``coeffs[t] * exp(i * sum(theta[s, indices[indptr[t]:indptr[t+1]]]))``.

    Returns one complex value per row ``s`` of ``theta``.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    theta = np.asarray(theta, dtype=np.float64)
    n_terms = coeffs.shape[0]
    n_params = theta.shape[1]
    counts = np.zeros((n_terms, n_params), dtype=np.float64)
    rows = np.repeat(np.arange(n_terms), np.diff(indptr))
    np.add.at(counts, (rows, indices), 1.0)
    phases = theta @ counts.T
    return np.exp(1j * phases) @ coeffs


def sample_outcomes(cdf, uniforms):
    """Index of the first bin with ``u < cdf[k]`` for every uniform draw."""
    cdf = np.asarray(cdf, dtype=np.float64)
    out = np.searchsorted(cdf, np.asarray(uniforms, dtype=np.float64), side="right")
    np.minimum(out, cdf.shape[0] - 1, out=out)
    return out.astype(np.int64)


def tally_pairs(trials, arms, detectors, n_detectors):
    """Count coincidences and singles for trial-sorted event arrays.

    ``arms`` holds 0 for arm 1 and 1 for arm 2.  Returns
    ``(joint, singles, bad_trial, bad)`` where ``joint[i, j]`` counts trials
    with arm-1 detector ``i`` and arm-2 detector ``j``.  When ``bad`` is true,
    ``bad_trial`` is the first trial id that is not a clean (arm 1, arm 2) pair
    and the counts are meaningless.
    """
    trials = np.asarray(trials, dtype=np.int64)
    arms = np.asarray(arms, dtype=np.int64)
    detectors = np.asarray(detectors, dtype=np.int64)
    n = trials.shape[0]
    joint = np.zeros((n_detectors, n_detectors), dtype=np.int64)
    singles = np.zeros(n_detectors, dtype=np.int64)
    if n == 0:
        return joint, singles, 0, False

    n_pairs = n // 2
    even = slice(0, 2 * n_pairs, 2)
    odd = slice(1, 2 * n_pairs, 2)
    first = trials[even]
    ok = (first == trials[odd]) & (arms[even] != arms[odd])
    # a third record for the same trial directly after a pair
    following = np.append(trials[2::2], -1)[:n_pairs]
    has_next = np.arange(n_pairs) * 2 + 2 < n
    ok &= ~(has_next & (following == first))
    bad_pairs = np.flatnonzero(~ok)
    if bad_pairs.size:
        return joint, singles, int(first[bad_pairs[0]]), True
    if n % 2:
        return joint, singles, int(trials[n - 1]), True

    a0 = arms[0::2]
    d0 = detectors[0::2]
    d1 = detectors[1::2]
    d_arm1 = np.where(a0 == 0, d0, d1)
    d_arm2 = np.where(a0 == 0, d1, d0)
    np.add.at(joint, (d_arm1, d_arm2), 1)
    singles += np.bincount(detectors, minlength=n_detectors)[:n_detectors]
    return joint, singles, 0, False
