"""Elementary-symmetric-function calculus on symmetric matrices.

Everything here is exact linear algebra on eigenvalues: values and minors of
the elementary symmetric functions sigma_k, their first and second entry
derivatives, the regularized quotient

    quotient(W, l, eps) = sigma_{l+2}(W + eps*I) / sigma_{l+1}(W + eps*I),

the rank test function phi = sigma_{l+1} + quotient, the good/bad eigenvalue
split with its leading-order expressions, and the algebraic identities used
by the monitors.

Derivatives use the independent-entries convention: for a symmetric function
f of a matrix W, f^{ij} = df/dW_ij treating all n^2 entries as independent,
so that d/dt f(W + tX) = sum_ij f^{ij} X_ij for symmetric directions X.
Second-derivative case formulas are defined in the eigenbasis (diagonal W)
only; rotate general matrices first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateQuotient

__all__ = [
    "Spectrum",
    "SpectralMatrix",
    "GoodBadSplit",
    "QuotientEval",
    "LeadingForms",
    "elem_sym",
    "elem_sym_all",
    "elem_sym_minor",
    "sigma_grad",
    "sigma_hess",
    "quotient_value",
    "quotient_grad",
    "quotient_hess",
    "quotient_eval",
    "phi_value",
    "split_good_bad",
    "split_sigma",
    "leading_forms",
    "regroup_identity",
    "newton_maclaurin_gap",
    "third_deriv_ratio",
    "degenerate_tolerance",
    "degenerate_path",
]


# ---------------------------------------------------------------------------
# spectra and matrices


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a symmetric matrix, stored in ascending order."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("eigenvalues must be finite")
        object.__setattr__(self, "values", tuple(sorted(vals)))

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def is_psd(self, tol: float = 1e-12) -> bool:
        return all(v >= -tol for v in self.values)


def _first_nonzero_sign_positive(Q: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first non-negligible component is positive."""
    Q = Q.copy()
    for j in range(Q.shape[1]):
        col = Q[:, j]
        scale = np.abs(col).max()
        idx = np.argmax(np.abs(col) > 1e-12 * (1.0 + scale))
        if col[idx] < 0:
            Q[:, j] = -col
    return Q


@dataclass(frozen=True)
class SpectralMatrix:
    """Symmetric matrix with a cached, deterministic eigendecomposition.

    Eigenvalues ascend; ties are broken by flipping each eigenvector so its
    first nonzero component is positive, which keeps splits reproducible.
    """

    entries: np.ndarray
    eigenvalues: Spectrum
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, W) -> "SpectralMatrix":
        W = np.asarray(W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("expected a square matrix")
        sym_defect = np.abs(W - W.T).max() if W.size else 0.0
        scale = 1.0 + (np.abs(W).max() if W.size else 0.0)
        if sym_defect > 1e-10 * scale:
            raise ValueError("matrix is not symmetric")
        Ws = 0.5 * (W + W.T)
        lam, Q = np.linalg.eigh(Ws)
        Q = _first_nonzero_sign_positive(Q)
        obj = cls(entries=Ws, eigenvalues=Spectrum(tuple(lam)), eigenvectors=Q)
        recon = Q @ np.diag(lam) @ Q.T
        if np.abs(Ws - recon).max() > 1e-10 * scale:
            raise ValueError("eigendecomposition failed its reconstruction tolerance")
        if np.abs(Q.T @ Q - np.eye(len(lam))).max() > 1e-12 * 10:
            raise ValueError("eigenvector basis is not orthonormal")
        return obj

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _as_values(spec) -> np.ndarray:
    """Accept Spectrum, SpectralMatrix, square matrix, or a 1-d value array."""
    if isinstance(spec, Spectrum):
        return spec.as_array()
    if isinstance(spec, SpectralMatrix):
        return spec.eigenvalues.as_array()
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return np.linalg.eigvalsh(0.5 * (arr + arr.T))
    if arr.ndim == 1:
        return arr
    raise ValueError("cannot interpret input as a spectrum")


# ---------------------------------------------------------------------------
# elementary symmetric functions


def elem_sym_all(values) -> np.ndarray:
    """All sigma_0..sigma_n of the trailing axis, batched over leading axes.

    Uses the characteristic-polynomial recurrence (expand prod_i (1 + t*lam_i)
    one eigenvalue at a time), which is exact on the coefficients and free of
    cancellation for nonnegative spectra.
    """
    vals = np.asarray(values, dtype=float)
    n = vals.shape[-1]
    out = np.zeros(vals.shape[:-1] + (n + 1,), dtype=float)
    out[..., 0] = 1.0
    for i in range(n):
        lam = vals[..., i : i + 1]
        out[..., 1 : i + 2] = out[..., 1 : i + 2] + lam * out[..., 0 : i + 1]
    return out


def elem_sym(k: int, spec) -> float:
    """sigma_k of a spectrum; 0 outside 0 <= k <= n, sigma_0 = 1."""
    vals = _as_values(spec)
    n = vals.shape[-1]
    if k < 0 or k > n:
        return 0.0
    return float(elem_sym_all(vals)[k])


def elem_sym_minor(k: int, spec, excluded) -> float:
    """sigma_k with the listed positions removed; at most two exclusions."""
    vals = _as_values(spec)
    excl = tuple(sorted(set(int(i) for i in np.atleast_1d(excluded))))
    if not 1 <= len(excl) <= 2:
        raise ValueError("minors support exactly one or two excluded indices")
    n = len(vals)
    if any(i < 0 or i >= n for i in excl):
        raise ValueError("excluded index out of range")
    keep = [i for i in range(n) if i not in excl]
    return elem_sym(k, vals[keep])


def _minor_values(vals: np.ndarray, *excl: int) -> np.ndarray:
    keep = [i for i in range(len(vals)) if i not in excl]
    return vals[keep]


def sigma_grad(k: int, W) -> np.ndarray:
    """Entry gradient of sigma_k: diag(sigma_{k-1}(W|i)) in the eigenbasis."""
    if isinstance(W, SpectralMatrix):
        lam, Q = W.eigenvalues.as_array(), W.eigenvectors
    else:
        M = np.asarray(W, dtype=float)
        lam, Q = np.linalg.eigh(0.5 * (M + M.T))
    n = len(lam)
    diag = np.array([elem_sym(k - 1, _minor_values(lam, i)) for i in range(n)])
    return (Q * diag) @ Q.T


def _require_diagonal(W) -> np.ndarray:
    M = W.entries if isinstance(W, SpectralMatrix) else np.asarray(W, dtype=float)
    off = M - np.diag(np.diag(M))
    scale = 1.0 + np.abs(M).max()
    if np.abs(off).max() > 1e-10 * scale:
        raise ValueError("second-derivative case formulas require a diagonal (eigenbasis) matrix")
    return np.diag(M).astype(float)


def sigma_hess(k: int, W) -> np.ndarray:
    """Entry Hessian of sigma_k at a diagonal matrix, as an (n,n,n,n) array.

    Nonzero patterns: (ii,jj) with i != j carries sigma_{k-2}(W|ij) and
    (ij,ji) with i != j carries -sigma_{k-2}(W|ij); everything else is zero.
    """
    d = _require_diagonal(W)
    n = len(d)
    H = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m = elem_sym(k - 2, _minor_values(d, i, j))
            H[i, i, j, j] = m
            H[i, j, j, i] = -m
    return H


# ---------------------------------------------------------------------------
# the regularized quotient and the rank test function


def degenerate_tolerance(values: np.ndarray) -> float:
    """Absolute floor below which sigma_{l+1} counts as vanishing."""
    n = len(values)
    norm = float(np.abs(values).max()) if n else 0.0
    return 1e-13 * (1.0 + norm ** (n + 1))


def _quotient_parts(W, l: int, epsilon: float):
    if isinstance(W, SpectralMatrix):
        lam = W.eigenvalues.as_array()
        Q = W.eigenvectors
    else:
        M = np.asarray(W, dtype=float)
        lam, Q = np.linalg.eigh(0.5 * (M + M.T))
    n = len(lam)
    if not 0 <= l <= n - 1:
        raise ValueError(f"rank parameter l={l} outside [0, {n - 1}]")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return lam + epsilon, Q


def quotient_value(W, l: int, epsilon: float = 0.0) -> float:
    """sigma_{l+2}/sigma_{l+1} of W + eps*I, extended by zero when both vanish.

    Signals DegenerateQuotient when sigma_{l+1} vanishes but sigma_{l+2} does
    not, which cannot happen for positive semidefinite input.
    """
    lam, _ = _quotient_parts(W, l, epsilon)
    s = elem_sym_all(lam)
    n = len(lam)
    num = s[l + 2] if l + 2 <= n else 0.0
    den = s[l + 1]
    tol = degenerate_tolerance(lam)
    if abs(den) <= tol:
        if abs(num) <= tol:
            return 0.0
        raise DegenerateQuotient(
            f"sigma_{l + 1} vanishes while sigma_{l + 2}={num:.3e}; input is not PSD"
        )
    return float(num / den)


def quotient_grad(W, l: int, epsilon: float = 0.0) -> np.ndarray:
    """Entry gradient of the quotient, rotated back to the input basis.

    In the eigenbasis the gradient is diagonal with entries
    [sigma_{l+1} * sigma_{l+1}(W|i) - sigma_{l+2} * sigma_l(W|i)] / sigma_{l+1}^2.
    """
    lam, Q = _quotient_parts(W, l, epsilon)
    n = len(lam)
    s = elem_sym_all(lam)
    den = s[l + 1]
    if den <= degenerate_tolerance(lam):
        raise DegenerateQuotient(f"sigma_{l + 1}={den:.3e} is not positive")
    num = s[l + 2] if l + 2 <= n else 0.0
    diag = np.empty(n)
    for i in range(n):
        mi = _minor_values(lam, i)
        diag[i] = (den * elem_sym(l + 1, mi) - num * elem_sym(l, mi)) / den**2
    return (Q * diag) @ Q.T


def quotient_hess(W, l: int, epsilon: float = 0.0) -> np.ndarray:
    """Entry Hessian of the quotient at a diagonal matrix, (n,n,n,n).

    Case values, with sig_g = sigma_g(W_eps) and minors of W_eps:
      (ij,ji), i != j :  -sigma_l(W|ij)/sig_{l+1} + sig_{l+2}*sigma_{l-1}(W|ij)/sig_{l+1}^2
      (ii,ii)         :  -2*sigma_l(W|i)/sig_{l+1}^3
                           * [sig_{l+1}*sigma_{l+1}(W|i) - sigma_l(W|i)*sig_{l+2}]
      (ii,kk), i != k :  quotient rule with the mixed minor sigma_{l-1}(W|ik)
      otherwise       :  0
    All cases agree with central finite differences of quotient_value.
    """
    d = _require_diagonal(W) + epsilon
    n = len(d)
    if not 0 <= l <= n - 1:
        raise ValueError(f"rank parameter l={l} outside [0, {n - 1}]")
    s = elem_sym_all(d)
    den = s[l + 1]
    if den <= degenerate_tolerance(d):
        raise DegenerateQuotient(f"sigma_{l + 1}={den:.3e} is not positive")
    num = s[l + 2] if l + 2 <= n else 0.0

    sig_l_i = np.array([elem_sym(l, _minor_values(d, i)) for i in range(n)])
    sig_l1_i = np.array([elem_sym(l + 1, _minor_values(d, i)) for i in range(n)])

    H = np.zeros((n, n, n, n))
    for i in range(n):
        H[i, i, i, i] = (
            -2.0 * sig_l_i[i] / den**3 * (den * sig_l1_i[i] - sig_l_i[i] * num)
        )
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            mik = _minor_values(d, i, k)
            sig_l_ik = elem_sym(l, mik)
            sig_lm1_ik = elem_sym(l - 1, mik)
            H[i, k, k, i] = -sig_l_ik / den + num * sig_lm1_ik / den**2
            H[i, i, k, k] = (
                sig_l_ik / den
                - (sig_l1_i[i] * sig_l_i[k] + sig_l1_i[k] * sig_l_i[i]) / den**2
                - num * sig_lm1_ik / den**2
                + 2.0 * num * sig_l_i[i] * sig_l_i[k] / den**3
            )
    return H


@dataclass(frozen=True)
class QuotientEval:
    """Value, gradient, and Hessian of the quotient at one diagonal matrix."""

    l: int
    epsilon: float
    value: float
    grad: np.ndarray
    hess: np.ndarray


def quotient_eval(W, l: int, epsilon: float = 0.0) -> QuotientEval:
    return QuotientEval(
        l=l,
        epsilon=epsilon,
        value=quotient_value(W, l, epsilon),
        grad=quotient_grad(W, l, epsilon),
        hess=quotient_hess(W, l, epsilon),
    )


def phi_value(W, l: int, epsilon: float = 0.0) -> float:
    """Rank test function: sigma_{l+1}(W_eps) + quotient(W, l, eps).

    Nonnegative on positive semidefinite input and zero exactly where the
    rank drops to l (for eps = 0).
    """
    lam, _ = _quotient_parts(W, l, epsilon)
    return float(elem_sym(l + 1, lam)) + quotient_value(W, l, epsilon)


# ---------------------------------------------------------------------------
# good/bad split and leading-order forms


@dataclass(frozen=True)
class GoodBadSplit:
    """Partition of eigenvalue positions into bounded-below and near-zero sets."""

    good: tuple[int, ...]
    bad: tuple[int, ...]
    threshold: float

    @property
    def l(self) -> int:
        return len(self.good)


def split_good_bad(spec, threshold: float) -> GoodBadSplit:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    vals = _as_values(spec)
    good = tuple(i for i, v in enumerate(vals) if v >= threshold)
    bad = tuple(i for i, v in enumerate(vals) if v < threshold)
    return GoodBadSplit(good=good, bad=bad, threshold=float(threshold))


def split_sigma(gamma: int, split: GoodBadSplit, spec) -> float:
    """sigma_gamma via the split sum over good/bad factors.

    sigma_gamma(W) = sum_k sigma_k(G) * sigma_{gamma-k}(B); an exact algebraic
    identity, so the result equals elem_sym(gamma, spec).
    """
    vals = _as_values(spec)
    g = vals[list(split.good)]
    b = vals[list(split.bad)]
    total = 0.0
    for k in range(0, split.l + 1):
        j = gamma - k
        if j < 0 or j > len(b):
            continue
        total += elem_sym(k, g) * elem_sym(j, b)
    return float(total)


_ORDER_PHI = "phi"
_ORDER_ONE = "one"


@dataclass(frozen=True)
class LeadingForms:
    """Leading-order expressions of the quotient derivatives near a split.

    Dictionaries are keyed by eigenvalue positions. `remainder_order` maps
    each case name to "phi" (remainder O(phi)) or "one" (remainder O(1)).
    """

    grad_bad: dict = field(default_factory=dict)          # q^{ii}, i in B
    grad_good: dict = field(default_factory=dict)         # q^{ii}, i in G (leading 0)
    hess_pair_cross: dict = field(default_factory=dict)   # q^{ij,ji}, i in B, j in G
    hess_pair_bad: dict = field(default_factory=dict)     # q^{ij,ji}, i != j in B
    hess_diag_bad: dict = field(default_factory=dict)     # q^{ii,ii}, i in B
    hess_mixed_bad: dict = field(default_factory=dict)    # q^{ii,kk}, i != k in B
    hess_mixed_cross: dict = field(default_factory=dict)  # q^{ii,kk}, i in B, k in G (leading 0)
    hess_good: dict = field(default_factory=dict)         # all indices in G (leading 0)

    remainder_order = {
        "grad_bad": _ORDER_PHI,
        "grad_good": _ORDER_PHI,
        "hess_pair_cross": _ORDER_PHI,
        "hess_pair_bad": _ORDER_ONE,
        "hess_diag_bad": _ORDER_ONE,
        "hess_mixed_bad": _ORDER_ONE,
        "hess_mixed_cross": _ORDER_ONE,
        "hess_good": _ORDER_PHI,
    }


def leading_forms(W, split: GoodBadSplit, l: int | None = None) -> LeadingForms:
    """Evaluate the split-sum leading terms of the quotient derivatives.

    The bad-block expressions depend only on the bad eigenvalues:
      q^{ii}      ->  (sigma_1^2(B|i) - sigma_2(B|i)) / sigma_1^2(B)
      q^{ij,ji}   ->  -(sigma_1^2(B|i) - sigma_2(B|i)) / (sigma_1^2(B) * lam_j),  j in G
      q^{ij,ji}   ->  -1 / sigma_1(B),                                   i != j in B
      q^{ii,ii}   ->  -2 (sigma_1^2(B|i) - sigma_2(B|i)) / sigma_1^3(B)
      q^{ii,kk}   ->  (2 sigma_2(B) - sigma_1^2(B) + (lam_i + lam_k) sigma_1(B))
                        / sigma_1^3(B),                                  i != k in B
    with remainders O(phi) or O(1) as recorded in `remainder_order`.
    """
    d = _require_diagonal(W)
    if l is None:
        l = split.l
    if l != split.l:
        raise ValueError("rank parameter does not match the split size")
    bad = list(split.bad)
    good = list(split.good)
    b = d[bad]
    s1B = float(b.sum())
    s2B = elem_sym(2, b)
    if s1B <= 0:
        raise DegenerateQuotient("bad block has nonpositive trace; leading forms undefined")

    out = LeadingForms()
    for ii, i in enumerate(bad):
        bi = np.delete(b, ii)
        s1Bi = float(bi.sum())
        s2Bi = elem_sym(2, bi)
        core = (s1Bi**2 - s2Bi) / s1B**2
        out.grad_bad[i] = core
        out.hess_diag_bad[i] = -2.0 * (s1Bi**2 - s2Bi) / s1B**3
        for j in good:
            out.hess_pair_cross[(i, j)] = -core / d[j]
        for kk, k in enumerate(bad):
            if k == i:
                continue
            out.hess_pair_bad[(i, k)] = -1.0 / s1B
            out.hess_mixed_bad[(i, k)] = (
                2.0 * s2B - s1B**2 + (d[i] + d[k]) * s1B
            ) / s1B**3
    for j in good:
        out.grad_good[j] = 0.0
        for i in bad:
            out.hess_mixed_cross[(i, j)] = 0.0
        for j2 in good:
            if j2 != j:
                out.hess_good[(j, j2)] = 0.0
    return out


def degenerate_path(mu_bad, lam_good):
    """Return s -> diag(s * mu_bad, lam_good) as a callable matrix family."""
    mu = np.asarray(mu_bad, dtype=float)
    lam = np.asarray(lam_good, dtype=float)

    def path(s: float) -> np.ndarray:
        return np.diag(np.concatenate([s * mu, lam]))

    return path


# ---------------------------------------------------------------------------
# identities and auxiliary estimates


def regroup_identity(entries):
    """Both sides of the pair-sum completion identity over an index set.

    `entries` is a sequence of triples (v_i, a_i, b_i). The left side combines
    the mixed pair sum with coefficient 2*sigma_2 - sigma_1^2 + (v_i+v_j)*sigma_1
    and the diagonal sum with coefficient -2*(sigma_1*sigma_1(A|i) - sigma_2(A|i));
    the right side is the completed-square form. The two sides agree exactly.
    """
    arr = np.asarray(entries, dtype=float)
    if arr.size == 0:
        return 0.0, 0.0
    arr = arr.reshape(-1, 3)
    v, a, b = arr[:, 0], arr[:, 1], arr[:, 2]
    s1 = v.sum()
    s2 = elem_sym(2, v)
    s1_i = s1 - v
    s2_i = s2 - v * s1_i

    coeff = 2.0 * s2 - s1**2
    suma, sumb = a.sum(), b.sum()
    # sum_{i != j} [coeff + (v_i + v_j) s1] a_i b_j
    cross_ab = suma * sumb - np.dot(a, b)
    va, vb = np.dot(v, a), np.dot(v, b)
    cross_va = va * sumb - np.dot(v * a, b)
    cross_vb = suma * vb - np.dot(a, v * b)
    lhs = coeff * cross_ab + s1 * (cross_va + cross_vb)
    lhs -= 2.0 * np.dot((s1 * s1_i - s2_i) * a, b)

    ra = s1 * a - v * suma
    rb = s1 * b - v * sumb
    rhs = -np.dot(ra, rb) - 2.0 * np.dot(v * s1_i * a, b)
    return float(lhs), float(rhs)


def newton_maclaurin_gap(spec, k: int) -> float:
    """Normalized mean gap (sig_k/C(n,k))^2 - (sig_{k-1}/C(n,k-1))(sig_{k+1}/C(n,k+1)).

    Nonnegative for nonnegative spectra.
    """
    vals = _as_values(spec)
    n = len(vals)
    if not 1 <= k <= n - 1:
        raise ValueError("k must satisfy 1 <= k <= n-1")
    s = elem_sym_all(vals)
    mean = lambda j: s[j] / math.comb(n, j)
    return float(mean(k) ** 2 - mean(k - 1) * mean(k + 1))


def third_deriv_ratio(v_ija: float, v_ii: float, v_jj: float, floor: float = 1e-14) -> float:
    """|v_ija| / (sqrt(v_ii) + sqrt(v_jj) + floor) with tiny negatives clipped."""
    a = math.sqrt(max(float(v_ii), 0.0))
    b = math.sqrt(max(float(v_jj), 0.0))
    return abs(float(v_ija)) / (a + b + floor)
