"""Matrix Lie groups and algebras used by the built-in actions.

Provides so(3) and su(3) with their standard bases, exponentials, the Cayley
transform, adjoint actions, brackets and metric-aware orthogonal projections.
Algebra elements are always handled through real coordinate vectors in a
fixed ordered basis; the dual space uses the dual basis, so a dual vector's
i-th coordinate is its value on the i-th basis element.
"""

from __future__ import annotations

import numpy as np

from .linalg import Subspace, TOL_RANK

_EPS_AXIS = 1e-12


def hat(v):
    """3-vector -> 3x3 skew matrix, so that hat(v) @ y = v x y."""
    v = np.asarray(v, dtype=float).ravel()
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(M):
    """Inverse of :func:`hat`."""
    M = np.asarray(M, dtype=float)
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def exp_so3(v):
    """Rodrigues formula for exp of hat(v)."""
    v = np.asarray(v, dtype=float).ravel()
    th = np.linalg.norm(v)
    A = hat(v)
    if th < _EPS_AXIS:
        return np.eye(3) + A + 0.5 * A @ A
    return (np.eye(3) + (np.sin(th) / th) * A
            + ((1.0 - np.cos(th)) / th**2) * A @ A)


def cay(eta):
    """Cayley transform (1 - hat(eta)/2)^(-1) (1 + hat(eta)/2) in SO(3).

    Rotation about eta by angle 2*atan(|eta|/2); cay(0) = I.
    """
    H = hat(np.asarray(eta, dtype=float) / 2.0)
    return np.linalg.solve(np.eye(3) - H, np.eye(3) + H)


class LieAlgebra:
    """A real matrix Lie algebra with a fixed ordered basis and inner product.

    The inner product is given by a matrix function on ambient matrices
    (Frobenius-type); the Gram matrix of the basis is precomputed and all
    coordinate-level metric operations go through it.
    """

    def __init__(self, name, basis, pairing):
        self.name = name
        self.basis = [np.asarray(B) for B in basis]
        self.dim = len(self.basis)
        self._pairing = pairing
        self.gram = np.array([[pairing(a, b) for b in self.basis]
                              for a in self.basis])
        self._gram_inv = np.linalg.inv(self.gram)
        # flatten basis matrices (real + imag parts) for coordinate recovery
        flat = []
        for B in self.basis:
            Bc = np.asarray(B, dtype=complex)
            flat.append(np.concatenate([Bc.real.ravel(), Bc.imag.ravel()]))
        self._flat = np.array(flat).T  # (2 n^2) x dim

    # -- coordinates ---------------------------------------------------

    def matrix(self, coords):
        coords = np.asarray(coords, dtype=float).ravel()
        M = sum(c * B for c, B in zip(coords, self.basis))
        return np.asarray(M, dtype=complex if np.iscomplexobj(self.basis[0]) else float)

    def coords(self, M):
        Mc = np.asarray(M, dtype=complex)
        rhs = np.concatenate([Mc.real.ravel(), Mc.imag.ravel()])
        c, res, _, _ = np.linalg.lstsq(self._flat, rhs, rcond=None)
        if np.linalg.norm(self._flat @ c - rhs) > 1e-9 * max(1.0, np.linalg.norm(rhs)):
            raise ValueError(f"matrix not in the span of the {self.name} basis")
        return c

    # -- algebraic structure ------------------------------------------

    def bracket(self, a, b):
        """[a, b] in coordinates."""
        A, B = self.matrix(a), self.matrix(b)
        return self.coords(A @ B - B @ A)

    def ad(self, a, b):
        return self.bracket(a, b)

    def Ad_matrix(self, g):
        """Matrix of Ad_g on coordinates: columns are coords(g B_i g^-1)."""
        g = np.asarray(g)
        gi = np.linalg.inv(g)
        return np.array([self.coords(g @ B @ gi) for B in self.basis]).T

    def Ad(self, g, a):
        return self.Ad_matrix(g) @ np.asarray(a, dtype=float).ravel()

    # -- metric --------------------------------------------------------

    def inner(self, a, b):
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        return float(a @ self.gram @ b)

    def norm(self, a):
        return np.sqrt(max(self.inner(a, a), 0.0))

    def flat(self, a):
        """Lower an index: coordinates of <a, .> in the dual basis."""
        return self.gram @ np.asarray(a, dtype=float).ravel()

    def sharp(self, nu):
        """Raise an index: the element whose pairing against the basis is nu."""
        return self._gram_inv @ np.asarray(nu, dtype=float).ravel()

    def exp(self, coords):
        """Matrix exponential of the algebra element with given coordinates.

        so(3) uses Rodrigues; skew-Hermitian algebras use a unitary
        eigendecomposition (exact structure at this size).
        """
        if self.name == "so3":
            return exp_so3(coords)
        A = np.asarray(self.matrix(coords), dtype=complex)
        H = A / 1j  # Hermitian
        w, V = np.linalg.eigh(H)
        return (V * np.exp(1j * w)) @ V.conj().T

    def __repr__(self):
        return f"LieAlgebra({self.name}, dim={self.dim})"


def so3_algebra():
    """so(3) with the hat-basis of e1, e2, e3 and the Euclidean product."""
    basis = [hat(e) for e in np.eye(3)]
    return LieAlgebra("so3", basis, lambda A, B: -0.5 * np.trace(A @ B).real)


def su3_basis():
    """su(3) with the 8-element basis {d1, d2, s1..s3, x1..x3}.

    d1 = diag(i,-i,0), d2 = diag(i,i,-2i); s_j has i in the (k,l) and (l,k)
    slots, x_j has 1 in (k,l) and -1 in (l,k), with (j,k,l) cyclic in (1,2,3).
    Mutually orthogonal (not orthonormal) under <A,B> = -tr(AB).
    """
    def E(a, b):
        M = np.zeros((3, 3), dtype=complex)
        M[a, b] = 1.0
        return M

    cyc = {1: (1, 2), 2: (2, 0), 3: (0, 1)}
    d1 = np.diag([1j, -1j, 0.0])
    d2 = np.diag([1j, 1j, -2j])
    sig = [1j * (E(k, l) + E(l, k)) for k, l in (cyc[j] for j in (1, 2, 3))]
    xi = [E(k, l) - E(l, k) for k, l in (cyc[j] for j in (1, 2, 3))]
    basis = [d1, d2] + sig + xi
    return LieAlgebra("su3", basis, lambda A, B: -np.trace(A @ B).real)


def orth_project(algebra: LieAlgebra, S, xi):
    """Orthogonal projection of xi onto the span of S in the algebra metric.

    ``S`` is a list of coordinate vectors (or a Subspace over coordinates).
    """
    if isinstance(S, Subspace):
        vecs = [S.basis[:, j] for j in range(S.dim)]
    else:
        vecs = [np.asarray(v, dtype=float).ravel() for v in S]
    xi = np.asarray(xi, dtype=float).ravel()
    if not vecs:
        return np.zeros_like(xi)
    B = np.array(vecs).T  # dim x k
    G = algebra.gram
    coeff = np.linalg.solve(B.T @ G @ B, B.T @ G @ xi)
    return B @ coeff


def is_special_orthogonal(g, tol=1e-10):
    g = np.asarray(g, dtype=float)
    return (np.linalg.norm(g.T @ g - np.eye(g.shape[0])) < tol
            and abs(np.linalg.det(g) - 1.0) < tol)


def is_special_unitary(g, tol=1e-10):
    g = np.asarray(g, dtype=complex)
    return (np.linalg.norm(g.conj().T @ g - np.eye(g.shape[0])) < tol
            and abs(np.linalg.det(g) - 1.0) < tol)


def project_so3(M):
    """Nearest special-orthogonal matrix (used by retractions)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    D = np.diag([1.0, 1.0, np.linalg.det(U @ Vt)])
    return U @ D @ Vt
