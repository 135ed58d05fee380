"""Certified sub-threshold eigensolver for sparse symmetric operators.

The eigenvalue count below the threshold is certified first, by the
inertia of a block-tridiagonal LDL^T factorization of A - threshold*I
(Sylvester's law); only then are the eigenpairs located, by a dense solve
for small problems or ARPACK shift-invert for large ones.  A Riesz-mean
verification that silently misses an eigenvalue is worthless, hence the
count must be provable rather than heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_CUTOFF = 2000
CLUSTER_REL_WIDTH = 1e-8
DEFAULT_TOL = 1e-9


class EigensolveError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FactorizationBreakdown(EigensolveError):
    """The shifted operator is numerically singular at the requested shift."""


@dataclass
class Spectrum:
    """All eigenvalues below a threshold, with inertia certification."""

    eigenvalues: np.ndarray
    residual_norms: np.ndarray
    certified_count: int
    threshold: float
    clusters: list[tuple[float, int]] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.eigenvalues)


def sturm_count(diag, offdiag, x: float) -> int:
    """Number of eigenvalues of a symmetric tridiagonal matrix below x.

    Plain LDL^T sign count; exact in exact arithmetic, with the pivot
    guarded against underflow so a zero never poisons the recurrence.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n = len(diag)
    if len(offdiag) != max(n - 1, 0):
        raise ValueError("offdiag must have length n-1")
    pivmin = 1e-300
    if n > 1 and offdiag.size:
        pivmin = max(pivmin, float(np.max(offdiag**2)) * 1e-292)
    count = 0
    d = 1.0
    for i in range(n):
        b2 = offdiag[i - 1] ** 2 if i > 0 else 0.0
        d = (diag[i] - x) - b2 / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


def tridiagonal_eigs_below(diag, offdiag, threshold: float, tol: float = 1e-13):
    """All eigenvalues below the threshold, by Sturm-sequence bisection."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    m = sturm_count(diag, offdiag, threshold)
    if m == 0:
        return []
    pad = np.concatenate([[0.0], np.abs(offdiag), [0.0]])
    lower = float(np.min(diag - pad[:-1] - pad[1:]))
    scale = max(1.0, abs(threshold), abs(lower))
    out = []
    for k in range(1, m + 1):
        lo, hi = lower, threshold
        while hi - lo > tol * scale:
            mid = 0.5 * (lo + hi)
            if sturm_count(diag, offdiag, mid) >= k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return out


def _bandwidth_blocks(A: sp.csr_matrix) -> list[int]:
    coo = A.tocoo()
    bw = int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0
    n = A.shape[0]
    size = max(bw, 1)
    sizes = [size] * (n // size)
    rem = n - size * len(sizes)
    if rem:
        if sizes:
            sizes[-1] += rem
        else:
            sizes = [rem]
    return sizes


def inertia_below(A: sp.spmatrix, x: float, block_sizes=None) -> int:
    """Eigenvalue count of A below x via a block-tridiagonal LDL^T sweep.

    block_sizes must partition the index range so that A couples only
    adjacent blocks (grid-slice ordering does this); without it a
    bandwidth-based partition is derived.  Raises FactorizationBreakdown
    when a Schur complement is singular to machine precision, i.e. x is an
    eigenvalue of a leading subproblem; callers retry with x*(1 - 1e-9).
    """
    A = A.tocsr()
    n = A.shape[0]
    if block_sizes is None:
        block_sizes = _bandwidth_blocks(A)
    if sum(block_sizes) != n:
        raise ValueError("block sizes must sum to the matrix dimension")
    M = (A - x * sp.identity(n, format="csr", dtype=float)).tocsr()
    scale = float(np.max(np.abs(M.diagonal()))) or 1.0
    neg = 0
    prev_lu = None
    prev_lo = prev_hi = 0
    off = 0
    for size in block_sizes:
        lo, hi = off, off + size
        S = M[lo:hi, lo:hi].toarray()
        if prev_lu is not None:
            E = M[lo:hi, prev_lo:prev_hi].toarray()
            if np.any(E):
                S = S - E @ sla.lu_solve(prev_lu, E.T)
        neg += _dense_negative_count(S, scale)
        prev_lu = sla.lu_factor(S)
        prev_lo, prev_hi = lo, hi
        off = hi
    return neg


def _dense_negative_count(S: np.ndarray, scale: float) -> int:
    m = S.shape[0]
    _, d, _ = sla.ldl(S)
    tiny = 1e-14 * scale
    neg = 0
    i = 0
    while i < m:
        if i + 1 < m and d[i + 1, i] != 0.0:
            ev = np.linalg.eigvalsh(d[i : i + 2, i : i + 2])
            if np.any(np.abs(ev) < tiny):
                raise FactorizationBreakdown(
                    "singular 2x2 pivot in inertia factorization"
                )
            neg += int(np.sum(ev < 0.0))
            i += 2
        else:
            piv = d[i, i]
            if abs(piv) < tiny:
                raise FactorizationBreakdown("singular pivot in inertia factorization")
            if piv < 0.0:
                neg += 1
            i += 1
    return neg


def certified_count_below(A, threshold: float, block_sizes=None):
    """Inertia count with the spec'd retry at threshold*(1 - 1e-9)."""
    shifts = [threshold, threshold * (1.0 - 1e-9), threshold * (1.0 - 1e-6)]
    last = None
    for shift in shifts:
        try:
            return inertia_below(A, shift, block_sizes), shift
        except FactorizationBreakdown as exc:
            last = exc
    raise last


def eigen_below(A, threshold: float, tol: float = DEFAULT_TOL, block_sizes=None) -> Spectrum:
    """Every eigenvalue of A strictly below the threshold, certified.

    A may be a scipy sparse matrix, a dense symmetric array, or any object
    with .matrix (sparse) and .slice_sizes attributes.  tol is the
    residual tolerance relative to the threshold magnitude.  Results are
    deterministic: the iterative path uses a fixed start vector.
    """
    if hasattr(A, "matrix"):
        block_sizes = block_sizes or getattr(A, "slice_sizes", None)
        A = A.matrix
    if isinstance(A, np.ndarray):
        A = sp.csr_matrix(A)
    A = A.tocsr()
    n = A.shape[0]
    tol_resid = tol * max(1.0, abs(threshold))

    certified, used_shift = certified_count_below(A, threshold, block_sizes)
    diagnostics = {
        "n": n,
        "threshold": threshold,
        "inertia_shift": used_shift,
        "tol_resid": tol_resid,
    }
    if certified == 0:
        return Spectrum(
            eigenvalues=np.empty(0),
            residual_norms=np.empty(0),
            certified_count=0,
            threshold=threshold,
            diagnostics=diagnostics | {"method": "inertia-only"},
        )

    if n <= DENSE_CUTOFF or certified >= n - 1:
        vals, vecs = np.linalg.eigh(A.toarray())
        keep = vals < threshold
        vals, vecs = vals[keep], vecs[:, keep]
        diagnostics["method"] = "dense"
    else:
        vals, vecs = _arpack_below(A, threshold, certified, diagnostics)

    if len(vals) != certified:
        raise EigensolveError(
            f"located {len(vals)} eigenvalues but inertia certifies {certified}",
            diagnostics | {"located": len(vals), "certified": certified},
        )
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    residuals = np.array(
        [
            float(np.linalg.norm(A @ vecs[:, j] - vals[j] * vecs[:, j]))
            / float(np.linalg.norm(vecs[:, j]))
            for j in range(len(vals))
        ]
    )
    if np.any(residuals > tol_resid):
        raise EigensolveError(
            f"residual {residuals.max():.3e} above tolerance {tol_resid:.3e}",
            diagnostics | {"residuals": residuals.tolist()},
        )
    return Spectrum(
        eigenvalues=vals,
        residual_norms=residuals,
        certified_count=certified,
        threshold=threshold,
        clusters=_cluster(vals, threshold),
        diagnostics=diagnostics,
    )


def _arpack_below(A, threshold, certified, diagnostics):
    n = A.shape[0]
    v0 = np.full(n, 1.0 / math.sqrt(n))
    attempts = []
    for extra in (0, 2, 6):
        k = certified + extra
        if k >= n - 1:
            break
        for shift_scale in (1.0, 1.0 - 1e-9, 1.0 - 1e-6):
            sigma = threshold * shift_scale
            try:
                vals, vecs = spla.eigsh(A, k=k, sigma=sigma, which="SA", v0=v0)
            except (spla.ArpackError, RuntimeError) as exc:  # includes no-convergence
                attempts.append((k, sigma, str(exc)))
                continue
            keep = vals < threshold
            if int(np.sum(keep)) == certified:
                diagnostics["method"] = "arpack-shift-invert"
                diagnostics["k"] = k
                diagnostics["sigma"] = sigma
                return vals[keep], vecs[:, keep]
            attempts.append((k, sigma, f"found {int(np.sum(keep))} below threshold"))
    raise EigensolveError(
        "shift-invert iteration failed to locate the certified eigenvalues",
        diagnostics | {"attempts": attempts, "certified": certified},
    )


def _cluster(vals: np.ndarray, threshold: float) -> list[tuple[float, int]]:
    """Group near-degenerate eigenvalues; width 1e-8 relative to threshold."""
    if len(vals) == 0:
        return []
    width = CLUSTER_REL_WIDTH * max(1.0, abs(threshold))
    clusters = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > width:
            group = vals[start:i]
            clusters.append((float(np.mean(group)), len(group)))
            start = i
    return clusters
