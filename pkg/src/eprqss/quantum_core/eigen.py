"""Eigenvalues of small Hermitian matrices.

2x2 blocks use the closed form; anything larger goes through cyclic Jacobi
rotations on the real symmetric embedding ``[[Re, -Im], [Im, Re]]``, whose
spectrum is the Hermitian spectrum with every value doubled.
"""
import math

import numpy as np

MAX_SWEEPS = 100


def eigvalsh_2x2(a: np.ndarray) -> np.ndarray:
    p, q = a[0, 0].real, a[1, 1].real
    mean = (p + q) / 2
    rad = math.hypot((p - q) / 2, abs(a[0, 1]))
    return np.array([mean - rad, mean + rad])


def jacobi_eigvals_symmetric(s: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    a = np.array(s, dtype=np.float64)
    n = a.shape[0]
    scale = max(float(np.abs(a).max()), 1e-300)
    for _ in range(MAX_SWEEPS):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                sn = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - sn * cq
                a[:, q] = sn * cp + c * cq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(a))


def eigvalsh(h: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    h = np.asarray(h, dtype=np.complex128)
    if h.shape == (1, 1):
        return np.array([h[0, 0].real])
    if h.shape == (2, 2):
        return eigvalsh_2x2(h)
    n = h.shape[0]
    embed = np.block([[h.real, -h.imag], [h.imag, h.real]])
    return jacobi_eigvals_symmetric(embed)[::2][:n]
