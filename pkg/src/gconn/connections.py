"""Dual connection forms, inertia factors, the gamma map and projections.

A *dual form* assigns to each manifold point a linear map from tangent
coordinates to dual-algebra coordinates; its *inertia factor* at m is the
composition with the generator map, a square matrix chi(m) whose kernel must
equal the isotropy algebra.  Solving chi(m) xi = nu and pushing xi back
through the generators gives the gamma map, whose composition with the form
is the equivariant projection onto the orbit tangent.
"""

from __future__ import annotations

import numpy as np

from .actions import Action, isotropy_algebra, orbit_tangent
from .linalg import (Subspace, TOL_RANK, range_space, rank_nullspace,
                     solve_consistent, InconsistentSystemError)
from .report import VerificationReport


class DegeneracyError(ValueError):
    """The kernel of the inertia factor does not match the isotropy algebra."""


class DualForm:
    """A dual-algebra-valued one-form, represented extensionally.

    ``matrix(m)`` returns the (alg_dim x vec_dim) matrix of the pointwise
    linear map in the action's tangent coordinates and the dual basis.
    """

    def __init__(self, action: Action, matrix_fn, name="mu"):
        self.action = action
        self._matrix_fn = matrix_fn
        self.name = name

    def matrix(self, m):
        return np.asarray(self._matrix_fn(m), dtype=float)

    def __call__(self, m, v):
        return self.matrix(m) @ np.asarray(v, dtype=float).ravel()

    def kernel(self, m, tol_rank=TOL_RANK) -> Subspace:
        _, kern = rank_nullspace(self.matrix(m), tol_rank)
        return kern

    def range(self, m, tol_rank=TOL_RANK) -> Subspace:
        return range_space(self.matrix(m), tol_rank)


class GValuedForm:
    """An algebra-valued one-form (same layout, values in algebra coords)."""

    def __init__(self, action: Action, matrix_fn, name="alpha"):
        self.action = action
        self._matrix_fn = matrix_fn
        self.name = name

    def matrix(self, m):
        return np.asarray(self._matrix_fn(m), dtype=float)

    def __call__(self, m, v):
        return self.matrix(m) @ np.asarray(v, dtype=float).ravel()


def simple_mechanical_mu(action: Action) -> DualForm:
    """mu(v) . xi = <v, xi_M(m)> in the action's invariant metric."""
    def matrix(m):
        return action.gen_matrix(m).T @ action.tangent_metric(m)
    return DualForm(action, matrix, name="mu_mech")


def mu_q(q, action: Action | None = None) -> DualForm:
    """The family mu(v) = q(|m|^2) m x v of dual forms on rotating R^3.

    ``q`` must be smooth and strictly positive on the sampled positive axis.
    """
    from .actions import get_action
    from .groups import hat
    action = action or get_action("so3-on-r3")
    for t in np.linspace(0.3, 9.0, 30):
        if not q(t) > 0:
            raise ValueError(f"mu_q: q({t}) = {q(t)} is not positive")
    def matrix(m):
        m = np.asarray(m, dtype=float).ravel()
        return q(float(m @ m)) * hat(m)
    return DualForm(action, matrix, name="mu_q")


def inertia_factor(mu: DualForm, m, tol_rank=TOL_RANK):
    """chi(m) = mu composed with the generator map, as an alg x alg matrix.

    Raises :class:`DegeneracyError` if ker chi(m) differs from the isotropy
    algebra (then mu is not a dual connection form at m).
    """
    A = mu.action
    chi = mu.matrix(m) @ A.gen_matrix(m)
    _, kern = rank_nullspace(chi, tol_rank)
    iso = isotropy_algebra(A, m, tol_rank)
    if kern.dim != iso.dim or not iso.contains_subspace(kern, 1e-6):
        raise DegeneracyError(
            f"ker chi has dim {kern.dim}, isotropy dim {iso.dim} at this point")
    return chi


def gamma_apply(mu: DualForm, m, nu, tol_rank=TOL_RANK, tol_consist=1e-8):
    """Solve chi(m) xi = nu and return the generator xi_M(m).

    Well defined because ker chi = ker of the generator map; inconsistency
    (nu outside range chi) raises and is exactly the docility-failure
    signal.
    """
    chi = inertia_factor(mu, m, tol_rank)
    xi = solve_consistent(chi, nu, tol_rank, tol_consist)
    return mu.action.gen_matrix(m) @ xi


def projection_P_mu(mu: DualForm, m, tol_rank=TOL_RANK):
    """Matrix of the projection gamma o mu of T_m M onto the orbit tangent."""
    A = mu.action
    chi = inertia_factor(mu, m, tol_rank)
    X = np.linalg.pinv(chi, rcond=tol_rank) @ mu.matrix(m)
    resid = np.linalg.norm(chi @ X - mu.matrix(m))
    scale = max(np.linalg.norm(mu.matrix(m)), 1e-300)
    if resid > 1e-6 * scale:
        raise DegeneracyError(f"range mu exceeds range chi (residual {resid:.2e})")
    return A.gen_matrix(m) @ X


def alpha_so3r3(f) -> GValuedForm:
    """Algebra-valued form |m|^-2 m x v + f(m) <m, v> m on rotating R^3.

    Discontinuous at the origin (where it is set to zero) for every choice
    of f; its projection is the orthogonal projection onto the orbit
    tangent away from 0.
    """
    from .actions import get_action
    from .groups import hat
    action = get_action("so3-on-r3")
    def matrix(m):
        m = np.asarray(m, dtype=float).ravel()
        n2 = float(m @ m)
        if n2 == 0.0:
            return np.zeros((3, 3))
        return hat(m) / n2 + f(m) * np.outer(m, m)
    return GValuedForm(action, matrix, name="alpha_so3r3")


def projection_P_alpha(alpha: GValuedForm, m):
    """P_alpha = generator map composed with alpha."""
    return alpha.action.gen_matrix(m) @ alpha.matrix(m)


def clean_alpha(alpha: GValuedForm) -> GValuedForm:
    """Compose alpha with its own projection, removing isotropy components."""
    def matrix(m):
        A = alpha.matrix(m)
        return A @ alpha.action.gen_matrix(m) @ A
    return GValuedForm(alpha.action, matrix, name=alpha.name + "_clean")


def coadjoint_matrix(action: Action, g_inv):
    """Matrix of Ad* for the pullback identity: transpose of Ad_{g^-1}."""
    return action.Ad_group(g_inv).T


def equivariance_residual(mu: DualForm, g, m, v):
    """| mu_{g.m}(dPhi_g v) - Ad*_{g^-1} mu_m(v) |, one sample."""
    A = mu.action
    gm = A.apply(g, m)
    lhs = mu(gm, A.dPhi(g, m, v))
    rhs = coadjoint_matrix(A, A.group_inv(g)) @ mu(m, v)
    return float(np.linalg.norm(lhs - rhs))


def dual_form_verify(mu: DualForm, samples=25, rng=None,
                     tol_rank=TOL_RANK, tol_eq=1e-8) -> VerificationReport:
    """Check the defining properties of a dual connection form by sampling.

    At each sampled point: the tangent space splits as orbit-tangent plus
    kernel; ker chi equals the isotropy algebra; range chi equals range mu;
    and the pullback equivariance identity holds at a random group element.
    """
    A = mu.action
    rng = np.random.default_rng(0) if rng is None else rng
    rep = VerificationReport(scenario=f"dual_form_verify[{mu.name}]")
    for i in range(samples):
        m = A.random_point(rng)
        tag = f"sample {i}"
        M = mu.matrix(m)
        kern = mu.kernel(m, tol_rank)
        orb = orbit_tangent(A, m, tol_rank)
        # direct sum: dimensions add up and the union spans
        stacked = np.hstack([kern.basis, orb.basis])
        r, _ = rank_nullspace(stacked, tol_rank)
        ok = (kern.dim + orb.dim == A.vec_dim and r == A.vec_dim)
        rep.add_bool("splitting", "T_m M = orbit-tangent + ker mu (direct)",
                     ok, tag)
        chi = M @ A.gen_matrix(m)
        _, kchi = rank_nullspace(chi, tol_rank)
        iso = isotropy_algebra(A, m, tol_rank)
        rep.add_bool("ker-chi", "ker chi = isotropy algebra",
                     kchi.dim == iso.dim and iso.contains_subspace(kchi, 1e-6),
                     tag)
        rchi = range_space(chi, tol_rank)
        rmu = range_space(M, tol_rank)
        rep.add_bool("range-chi", "range chi = range mu",
                     rchi.dim == rmu.dim and rmu.contains_subspace(rchi, 1e-6),
                     tag)
        g = A.random_group(rng)
        v = A.random_tangent(rng, m)
        rep.add("equivariance", "pullback of mu matches coadjoint twist",
                equivariance_residual(mu, g, m, v), tol_eq, tag)
    return rep


def pair_check(alpha: GValuedForm, chi_field, samples=20, rng=None,
               singular_points=None, tol_eq=1e-6) -> VerificationReport:
    """Classify (alpha, chi) as a partial connection pair by sampling.

    ``chi_field`` maps a point to an inertia-factor matrix.  Checks that
    mu := chi . alpha is equivariant and nondegenerate at random points and
    continuous along rays into each supplied singular point.
    """
    A = alpha.action
    rng = np.random.default_rng(0) if rng is None else rng
    rep = VerificationReport(scenario="pair_check")
    mu = DualForm(A, lambda m: np.asarray(chi_field(m)) @ alpha.matrix(m),
                  name="chi*alpha")
    for i in range(samples):
        m = A.random_point(rng)
        g = A.random_group(rng)
        v = A.random_tangent(rng, m)
        rep.add("mu-equivariance", "chi.alpha transforms like a dual form",
                equivariance_residual(mu, g, m, v), tol_eq, f"sample {i}")
        try:
            inertia_factor(mu, m)
            rep.add_bool("nondegenerate", "ker chi_mu = isotropy", True,
                         f"sample {i}")
        except DegeneracyError:
            rep.add_bool("nondegenerate", "ker chi_mu = isotropy", False,
                         f"sample {i}")
    for p in (singular_points if singular_points is not None else []):
        p = np.asarray(p, dtype=float)
        M0 = mu.matrix(p)
        worst = 0.0
        for k in range(8):
            ray = A.random_tangent(rng, p)
            n = np.linalg.norm(ray)
            if n == 0:
                continue
            ray = ray / n
            vals = [mu.matrix(A.retract(p, ray, eps))
                    for eps in (1e-2, 1e-3, 1e-4)]
            # Cauchy behaviour along the ray plus agreement with the value at p
            worst = max(worst,
                        np.linalg.norm(vals[1] - vals[2]),
                        np.linalg.norm(vals[2] - M0) / 10.0)
        rep.add("smooth-at-singular",
                "chi.alpha continuous along rays into the singular point",
                worst, 1e-2, "singular probe")
    return rep
