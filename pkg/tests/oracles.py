"""Independent oracles used across the test suite.

These deliberately avoid the library's own evaluation paths: symmetric
functions by explicit subset enumeration, derivatives by central finite
differences of values only.
"""

import itertools

import numpy as np


def sigma_enum(k, values):
    """sigma_k by explicit subset enumeration (2^n work)."""
    vals = list(values)
    n = len(vals)
    if k < 0 or k > n:
        return 0.0
    if k == 0:
        return 1.0
    total = 0.0
    for combo in itertools.combinations(range(n), k):
        prod = 1.0
        for i in combo:
            prod *= vals[i]
        total += prod
    return total


def sigma_enum_batch(k, values):
    """sigma_k of each row of a (m, n) array, enumerated over subsets."""
    vals = np.asarray(values, dtype=float)
    m, n = vals.shape
    if k < 0 or k > n:
        return np.zeros(m)
    if k == 0:
        return np.ones(m)
    out = np.zeros(m)
    for combo in itertools.combinations(range(n), k):
        out += np.prod(vals[:, combo], axis=1)
    return out


def sym_direction(n, a, b):
    """Unit-coefficient symmetric direction: E_ab + E_ba for a != b, E_aa else."""
    S = np.zeros((n, n))
    S[a, b] = 1.0
    S[b, a] = 1.0
    if a == b:
        S[a, a] = 1.0
    return S


def fd_matrix_grad(f, W, h=1e-6):
    """Entry gradient of f at symmetric W in the independent-entries convention."""
    n = W.shape[0]
    G = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            S = sym_direction(n, a, b)
            mult = 1.0 if a == b else 2.0
            G[a, b] = (f(W + h * S) - f(W - h * S)) / (2 * h) / mult
            G[b, a] = G[a, b]
    return G


def fd_second_directional(f, W, X, h=1e-5):
    """d^2/dt^2 f(W + t X) at t = 0 by the 3-point central formula."""
    return (f(W + h * X) - 2.0 * f(W) + f(W - h * X)) / (h * h)


def contract_hess(H, X, Y=None):
    """sum_{ijkm} H[i,j,k,m] X_ij Y_km."""
    if Y is None:
        Y = X
    return float(np.einsum("ijkm,ij,km->", H, X, Y))


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g
