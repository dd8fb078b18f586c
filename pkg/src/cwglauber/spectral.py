"""Eigenvalue machinery for the reduced and full chains.

A reversible chain is similar to a symmetric matrix through conjugation by
diag(sqrt(pi)); for the tridiagonal magnetization chain the symmetrized
off-diagonal collapses to sqrt(up_k * down_k).  The reduced chain is solved
with a symmetric-tridiagonal eigensolver; the full 2^n chain, symmetrized the
same way, provides the brute-force oracle for the lumping equivalence, and an
independent cyclic-Jacobi rotation solver cross-validates both eigensolver
paths at desk scale.

Conventions for the second eigenpair (lambda_2, f): eigenvalues are sorted
descending, f is reported in chain coordinates with <f, f>_pi = 1 and the
increasing representative chosen (f_n > f_0).  Deep in the supercritical
regime lambda_1 - lambda_2 underflows below machine epsilon; the stationary
direction sqrt(pi) is known exactly, so it is deflated from the computed
eigenvector before normalization, which keeps the structure of f meaningful
there.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ising import (Distribution, ModelParams, full_transition_matrix,
                    stationary_full)
from .magchain import ReducedChain, build_reduced_chain, reduced_stationary

# Below this separation of lambda_2 from lambda_3 the eigenvector analysis is
# flagged unreliable and perturbation formulas refuse to evaluate.
DEGENERATE_GAP = 1e-12

# Coordinatewise tolerance for eigenvector-structure predicates.
STRUCTURE_TOL = 1e-9


class EigensolverError(RuntimeError):
    """An eigensolver failed to converge or was fed an invalid matrix."""


@dataclass(frozen=True)
class SpectralResult:
    """Spectrum summary of the reduced chain at one parameter point.

    eigenvalues are sorted descending (eigenvalues[0] = 1 up to rounding);
    gap = 1 - lambda2 and t_rel = 1/gap count single-site steps.  The second
    eigenvector is pi-normalized, <f,f>_pi = 1, with f_n > f_0; ``increasing``
    records whether its coordinates are nondecreasing at the default
    structure tolerance.
    """

    eigenvalues: np.ndarray
    lambda2: float
    gap: float
    t_rel: float
    second_vector: np.ndarray
    increasing: bool


@dataclass(frozen=True)
class StructureReport:
    """Predicates of the second eigenvector's shape.

    antisymmetric_at_h0 and sign_split are only meaningful at H = 0 and are
    None otherwise.  ``reliable`` is False when lambda_2 - lambda_3 fell below
    the degeneracy threshold, in which case the other flags should not be
    trusted rather than read as refuting the theory.
    """

    increasing: bool
    strictly: bool
    antisymmetric_at_h0: bool | None
    sign_split: bool | None
    reliable: bool


def symmetrize(chain: ReducedChain, pi: Distribution | None = None):
    """Symmetric tridiagonal (diag, offdiag) similar to the reduced chain.

    offdiag[k] = sqrt(up_k * down_k); a negative product signals an invalid
    chain and is rejected.  When pi is supplied, reversibility of the chain
    with respect to it is sanity-checked first.
    """
    if pi is not None:
        p = pi.probabilities
        viol = np.abs(p[:-1] * chain.up - p[1:] * chain.down).max()
        if viol > 1e-8:
            raise ValueError(
                f"chain is not reversible w.r.t. the given distribution "
                f"(flux mismatch {viol:.3e})")
    prod = chain.up * chain.down
    if np.any(prod < 0):
        raise ValueError("up[k]*down[k] < 0: not a valid birth-death chain")
    return chain.diag.copy(), np.sqrt(prod)


def eigen_symmetric_tridiagonal(diag, offdiag):
    """Full spectrum of a real symmetric tridiagonal matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending
    and eigenvectors as orthonormal columns.  Solver non-convergence is
    surfaced as EigensolverError, never silently.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if len(diag) == 1:
        return diag.copy(), np.ones((1, 1))
    try:
        w, v = scipy.linalg.eigh_tridiagonal(diag, offdiag)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigensolverError(
            f"tridiagonal eigensolver failed to converge: {exc}") from exc
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def eigen_dense_symmetric(matrix, tol: float = 1e-12, max_sweeps: int = 60):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps of plane rotations annihilate off-diagonal entries until the
    off-diagonal Frobenius norm drops below tol * ||A||_F.  Returns
    (eigenvalues descending, eigenvector columns).  Quadratic convergence
    makes a few sweeps enough at desk scale; this is the oracle route, kept
    independent of the LAPACK-backed solvers it cross-checks.
    """
    A = np.array(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    norm = np.linalg.norm(A)
    asym = np.abs(A - A.T).max()
    if asym > 1e-12 * max(norm, 1.0):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    A = 0.5 * (A + A.T)
    m = A.shape[0]
    V = np.eye(m)
    if m == 1:
        return np.array([A[0, 0]]), V
    for _ in range(max_sweeps):
        # off-diagonal Frobenius norm, formed directly: the difference
        # sum(A^2) - sum(diag^2) cancels catastrophically near convergence
        offmat = A - np.diag(np.diag(A))
        off = np.linalg.norm(offmat)
        if off <= tol * max(norm, np.finfo(float).tiny):
            w = np.diag(A).copy()
            order = np.argsort(w)[::-1]
            return w[order], V[:, order]
        # rotations below this threshold cannot move the off-norm meaningfully
        skip = off / (m * m)
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if abs(apq) <= skip * 1e-3:
                    continue
                # stable rotation angle (Golub & Van Loan)
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                A[:, [p, q]] = A[:, [p, q]] @ rot
                A[[p, q], :] = rot.T @ A[[p, q], :]
                A[p, q] = A[q, p] = 0.0
                V[:, [p, q]] = V[:, [p, q]] @ rot
    raise EigensolverError(
        f"Jacobi iteration did not reach tol={tol} in {max_sweeps} sweeps")


def full_chain_spectrum(params: ModelParams, n_max_full: int | None = None) -> np.ndarray:
    """All 2^n eigenvalues of the full Glauber chain, sorted descending.

    The chain is symmetrized by diag(sqrt(pi)) (reversibility makes the
    result symmetric up to rounding, which is folded away) and handed to the
    dense LAPACK solver; the Jacobi oracle above validates this path at small
    n in the test suite.
    """
    kwargs = {} if n_max_full is None else {"n_max_full": n_max_full}
    P = full_transition_matrix(params, **kwargs)
    pi = stationary_full(params, **kwargs)
    s = np.sqrt(pi.probabilities)
    S = (s[:, None] * P) / s[None, :]
    S = 0.5 * (S + S.T)
    w = np.linalg.eigvalsh(S)
    return w[::-1]


def _deflated_second_vector(evecs: np.ndarray, sqrt_pi: np.ndarray) -> np.ndarray:
    """Second eigenvector with the exact stationary direction projected out.

    The top two computed eigenvectors may mix arbitrarily when lambda_1 and
    lambda_2 are numerically degenerate; the span is still right, and the
    stationary direction sqrt(pi) is known exactly, so taking the larger
    deflated candidate recovers the second eigenvector to working precision.
    """
    best = None
    best_norm = -1.0
    for i in (0, 1):
        w = evecs[:, i] - (evecs[:, i] @ sqrt_pi) * sqrt_pi
        nrm = np.linalg.norm(w)
        if nrm > best_norm:
            best_norm = nrm
            best = w
    return best / best_norm


def second_eigenpair(params: ModelParams) -> SpectralResult:
    """(lambda_2, f) of the magnetization chain, increasing representative.

    f is returned in chain coordinates, normalized to <f,f>_pi = 1 and signed
    so that f_n > f_0 (ties broken by the first nonzero coordinate
    difference).  gap = 1 - lambda_2; t_rel = 1/gap, +inf if the gap rounds
    to zero or below.
    """
    chain = build_reduced_chain(params)
    pi = reduced_stationary(params)
    diag, offdiag = symmetrize(chain)
    evals, evecs = eigen_symmetric_tridiagonal(diag, offdiag)
    lambda2 = float(evals[1])
    gap = 1.0 - lambda2
    t_rel = 1.0 / gap if gap > 0 else math.inf
    sqrt_pi = np.sqrt(pi.probabilities)
    v2 = _deflated_second_vector(evecs, sqrt_pi)
    f = v2 / sqrt_pi  # <f,f>_pi = ||v2||^2 = 1
    if f[-1] < f[0]:
        f = -f
    elif f[-1] == f[0]:
        d = np.diff(f)
        nz = np.nonzero(d)[0]
        if len(nz) and d[nz[0]] < 0:
            f = -f
    increasing = bool(np.all(np.diff(f) >= -STRUCTURE_TOL))
    return SpectralResult(eigenvalues=evals, lambda2=lambda2, gap=gap,
                          t_rel=t_rel, second_vector=f, increasing=increasing)


def eigenvector_structure_report(f, tol: float = STRUCTURE_TOL, *,
                                 h: float = 0.0,
                                 eigen_separation: float | None = None) -> StructureReport:
    """Evaluate the structural predicates of a second eigenvector.

    increasing: f_{k+1} >= f_k for all k (within tol);
    strictly:   every increment is strictly positive;
    antisymmetric_at_h0: max_k |f_k + f_{n-k}| < tol, H = 0 only;
    sign_split: f_k <= 0 for k <= n/2 and f_k >= 0 for k >= n/2 (within tol),
                H = 0 only.

    Pass eigen_separation = lambda_2 - lambda_3 to have near-degenerate
    points flagged unreliable instead of asserted on.
    """
    f = np.asarray(f, dtype=float)
    n = len(f) - 1
    d = np.diff(f)
    increasing = bool(np.all(d >= -tol))
    strictly = bool(d.min() > 0) if len(d) else False
    at_h0 = (h == 0.0)
    antisymmetric = bool(np.abs(f + f[::-1]).max() < tol) if at_h0 else None
    if at_h0:
        k = np.arange(n + 1)
        sign_split = bool(np.all(f[k <= n / 2] <= tol)
                          and np.all(f[k >= n / 2] >= -tol))
    else:
        sign_split = None
    reliable = not (eigen_separation is not None
                    and eigen_separation < DEGENERATE_GAP)
    return StructureReport(increasing=increasing, strictly=strictly,
                           antisymmetric_at_h0=antisymmetric,
                           sign_split=sign_split, reliable=reliable)
