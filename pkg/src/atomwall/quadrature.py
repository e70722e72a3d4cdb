"""Cached Gaussian quadrature rules used by the dielectric and Lifshitz cores."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh_tridiagonal


@lru_cache(maxsize=None)
def gauss_laguerre(order: int):
    """Nodes and weights for ``int_0^inf e^{-t} f(t) dt``.

    Built by Golub-Welsch from the Jacobi matrix of the Laguerre polynomials
    (diagonal 2i+1, off-diagonal i).  scipy.special.roots_laguerre overflows
    above order ~300, the eigensolve stays stable up to the 512 cap.
    """
    diag = 2.0 * np.arange(order) + 1.0
    off = np.arange(1.0, order)
    nodes, vectors = eigh_tridiagonal(diag, off)
    weights = vectors[0, :] ** 2  # first-moment normalization mu_0 = 1
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    """Nodes and weights on [-1, 1]."""
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights
