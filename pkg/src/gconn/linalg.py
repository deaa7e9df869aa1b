"""Small dense linear algebra and finite-difference kernels.

Everything downstream (inertia factors, curvature solves, slice tangency
tests) reduces to rank/nullspace decisions, minimum-norm consistent solves
and central differences on matrices of dimension <= 16, so these helpers are
kept deliberately simple and SVD-based.
"""

from __future__ import annotations

import numpy as np

# Relative singular-value threshold for rank decisions.  The spectra arising
# from the built-in group actions are well separated (eigenvalues like 0 and
# 1 -+ r), so this default is robust.
TOL_RANK = 1e-8

# Default central-difference step: truncation ~h^2 = 1e-10 balances roundoff
# ~eps/h = 1e-11.
FD_STEP = 1e-5


class InconsistentSystemError(ValueError):
    """Raised when a linear system has no solution at the given tolerance.

    Carries the least-squares residual so callers can report *how*
    inconsistent the system was (this is the docility-failure signal).
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = float(residual)


class Subspace:
    """A linear subspace of R^n stored as an orthonormal column basis.

    ``vectors`` may be any spanning set (rows or a list of 1-d arrays);
    linearly dependent input is reduced via SVD at the given tolerance.
    """

    def __init__(self, vectors, ambient_dim=None, tol=TOL_RANK):
        vectors = [np.asarray(v, dtype=float).ravel() for v in vectors]
        if vectors:
            ambient_dim = len(vectors[0])
            M = np.array(vectors)
            U, s, Vt = np.linalg.svd(M, full_matrices=False)
            cutoff = tol * s[0] if s.size and s[0] > 0 else 0.0
            r = int(np.sum(s > cutoff))
            self.basis = Vt[:r].T  # n x r, orthonormal columns
        else:
            if ambient_dim is None:
                raise ValueError("empty subspace needs an ambient dimension")
            self.basis = np.zeros((ambient_dim, 0))
        self.ambient_dim = int(ambient_dim)

    @property
    def dim(self):
        return self.basis.shape[1]

    def project(self, v):
        v = np.asarray(v, dtype=float).ravel()
        if v.size != self.ambient_dim:
            raise ValueError("dimension mismatch")
        return self.basis @ (self.basis.T @ v)

    def contains(self, v, tol=1e-8):
        v = np.asarray(v, dtype=float).ravel()
        if v.size != self.ambient_dim:
            raise ValueError("dimension mismatch")
        d = np.linalg.norm(v - self.project(v))
        return d <= tol * max(1.0, np.linalg.norm(v))

    def contains_subspace(self, other, tol=1e-8):
        return all(self.contains(other.basis[:, j], tol) for j in range(other.dim))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def rank_nullspace(A, tol_rank=TOL_RANK):
    """Numerical rank and kernel of A via SVD.

    Returns ``(rank, kernel)`` where ``kernel`` is a :class:`Subspace` of the
    domain.  Rank + kernel dimension equals the number of columns exactly.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise ValueError("rank_nullspace: non-finite entries")
    if A.size == 0:
        return 0, Subspace([], ambient_dim=A.shape[1])
    U, s, Vt = np.linalg.svd(A)
    cutoff = tol_rank * s[0] if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > cutoff))
    kern = Subspace([], ambient_dim=A.shape[1])
    kern.basis = Vt[rank:].T
    return rank, kern


def range_space(A, tol_rank=TOL_RANK):
    """Column space of A as a :class:`Subspace`."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    r, _ = rank_nullspace(A.T, tol_rank)
    U, s, Vt = np.linalg.svd(A)
    out = Subspace([], ambient_dim=A.shape[0])
    out.basis = U[:, :r]
    return out


def solve_consistent(A, b, tol_rank=TOL_RANK, tol_consist=1e-8):
    """Minimum-norm solution of A x = b, requiring b in range(A).

    Raises :class:`InconsistentSystemError` when the least-squares residual
    exceeds ``tol_consist * max(|A||x|, |b|)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    x = np.linalg.pinv(A, rcond=tol_rank) @ b
    resid = np.linalg.norm(A @ x - b)
    scale = max(np.linalg.norm(A, 2) * np.linalg.norm(x), np.linalg.norm(b), 1e-300)
    if resid > tol_consist * scale and resid > tol_consist:
        raise InconsistentSystemError("solve_consistent: b not in range(A)", resid)
    return x


def subspace_contains(S: Subspace, v, tol=1e-8):
    """True iff dist(v, span S) <= tol * max(1, |v|)."""
    return S.contains(v, tol)


def central_difference(f, x, h=FD_STEP):
    """Jacobian of ``f`` at ``x`` by central differences, column by column.

    ``f`` maps a 1-d array to a 1-d array (scalars are promoted).  Exact for
    polynomials of degree <= 2 up to roundoff.
    """
    x = np.asarray(x, dtype=float).ravel()
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        fp = np.asarray(f(x + e), dtype=float).ravel()
        fm = np.asarray(f(x - e), dtype=float).ravel()
        cols.append((fp - fm) / (2.0 * h))
    return np.array(cols).T


def directional_derivative(f, x, v, h=FD_STEP):
    """Central-difference derivative of ``f`` along direction ``v``."""
    x = np.asarray(x, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    fp = np.asarray(f(x + h * v), dtype=float)
    fm = np.asarray(f(x - h * v), dtype=float)
    return (fp - fm) / (2.0 * h)


def curve_derivative(f, h=FD_STEP):
    """Derivative at t = 0 of a curve t -> array."""
    fp = np.asarray(f(h), dtype=float)
    fm = np.asarray(f(-h), dtype=float)
    return (fp - fm) / (2.0 * h)
