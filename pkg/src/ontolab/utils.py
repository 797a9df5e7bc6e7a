import numba
import numpy as np


@numba.njit()
def pairwise_min_overlap(weights: np.ndarray) -> np.ndarray:
    """
    Total-variation overlaps Σ_λ min(μ_i(λ), μ_j(λ)) of every pair of rows.

    Parameters
    ----------
    weights : ndarray(float64), shape (k, n)
        one probability vector per row

    Returns
    -------
    overlaps : ndarray(float64), shape (k, k), symmetric
    """
    k, n = weights.shape
    overlaps = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            total = 0.0
            for p in range(n):
                a = weights[i, p]
                b = weights[j, p]
                total += a if a < b else b
            overlaps[i, j] = total
            overlaps[j, i] = total
    return overlaps


@numba.njit(parallel=True)
def common_overlap_partials(weights: np.ndarray, chunk: int, eps: float) -> np.ndarray:
    """
    Partial sums of Σ_λ min_i μ_i(λ) over consecutive ranges of ontic points,
    counting only the points where the minimum exceeds eps.

    Parameters
    ----------
    weights : ndarray(float64), shape (k, n)
    chunk : int
        number of ontic points per range
    eps : float
        support threshold; the counted points are those of common_support_mask

    Returns
    -------
    partials : ndarray(float64), one entry per range, in range order.
    Summing them in order is reproducible for a fixed chunk size.
    """
    k, n = weights.shape
    n_chunks = (n + chunk - 1) // chunk
    partials = np.zeros(n_chunks)
    for c in numba.prange(n_chunks):
        start = c * chunk
        stop = min(start + chunk, n)
        total = 0.0
        for p in range(start, stop):
            smallest = weights[0, p]
            for i in range(1, k):
                if weights[i, p] < smallest:
                    smallest = weights[i, p]
            if smallest > eps:
                total += smallest
        partials[c] = total
    return partials


@numba.njit()
def common_support_mask(weights: np.ndarray, eps: float) -> np.ndarray:
    "Boolean mask of ontic points whose weight exceeds eps under every row"
    k, n = weights.shape
    mask = np.ones(n, dtype=np.bool_)
    for p in range(n):
        for i in range(k):
            if weights[i, p] <= eps:
                mask[p] = False
                break
    return mask


@numba.njit()
def bloch_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """
    Unit vectors on the Bloch sphere, polar angle measured from |0⟩ (north pole).
    Returns array of shape (n, 3).
    """
    n = theta.size
    out = np.empty((n, 3))
    for i in range(n):
        s = np.sin(theta[i])
        out[i, 0] = s * np.cos(phi[i])
        out[i, 1] = s * np.sin(phi[i])
        out[i, 2] = np.cos(theta[i])
    return out


@numba.njit(nogil=True)
def favored_probability(bloch: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """
    |⟨λ|φ⟩|² = (1 + n_λ · n_φ) / 2 for every Bloch vector n_λ in bloch
    against the single Bloch vector axis = n_φ.
    """
    n = bloch.shape[0]
    out = np.empty(n)
    for i in range(n):
        dot = bloch[i, 0] * axis[0] + bloch[i, 1] * axis[1] + bloch[i, 2] * axis[2]
        out[i] = 0.5 * (1.0 + dot)
    return out


@numba.njit(nogil=True)
def lewis_outcomes(bloch: np.ndarray, x: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """
    Deterministic Lewis responses: outcome 0 iff |⟨λ|φ₀⟩|² − x > 0, else 1.

    Parameters
    ----------
    bloch : ndarray (n, 3) of ontic Bloch directions
    x : ndarray (n,) of hidden variables
    axis : ndarray (3,) Bloch vector of φ₀

    Returns
    -------
    outcomes : ndarray(int8) of shape (n,)
    """
    prob = favored_probability(bloch, axis)
    n = x.size
    out = np.empty(n, dtype=np.int8)
    for i in range(n):
        out[i] = 0 if prob[i] - x[i] > 0.0 else 1
    return out


@numba.njit(nogil=True)
def count_outcome_zero(bloch: np.ndarray, x: np.ndarray, axis: np.ndarray) -> int:
    "Number of points whose Lewis response to φ₀ = axis is outcome 0"
    count = 0
    for i in range(x.size):
        dot = bloch[i, 0] * axis[0] + bloch[i, 1] * axis[1] + bloch[i, 2] * axis[2]
        if 0.5 * (1.0 + dot) - x[i] > 0.0:
            count += 1
    return count


@numba.jit(nopython=True, parallel=True)
def e0_constancy_violations(bloch: np.ndarray, x: np.ndarray, axes: np.ndarray) -> int:
    """
    Count (sample, basis) pairs for which the Lewis response is not outcome 0.

    Parameters
    ----------
    bloch, x : ontic points, expected to lie in E₀
    axes : ndarray (m, 3) of φ₀ Bloch vectors of ordered bases

    Returns
    -------
    total number of violations over all n * m pairs
    """
    m = axes.shape[0]
    per_axis = np.zeros(m, dtype=np.int64)
    for j in numba.prange(m):
        bad = 0
        for i in range(x.size):
            dot = (
                bloch[i, 0] * axes[j, 0]
                + bloch[i, 1] * axes[j, 1]
                + bloch[i, 2] * axes[j, 2]
            )
            if not (0.5 * (1.0 + dot) - x[i] > 0.0):
                bad += 1
        per_axis[j] = bad
    return per_axis.sum()
