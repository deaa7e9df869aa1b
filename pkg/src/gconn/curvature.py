"""Exterior/covariant derivatives of dual forms, docility and curvature.

All derivatives are finite differences through the action's retraction.  On
group manifolds one-forms are differentiated along right-invariant
extensions of frozen tangent coordinates, with the standard bracket
correction for right-invariant fields; on embedded manifolds the frozen
coordinates are extended by pointwise tangent projection.  Both choices are
legitimate because the exterior derivative of a one-form is tensorial.
"""

from __future__ import annotations

import numpy as np

from .actions import Action
from .connections import (DualForm, inertia_factor, gamma_apply,
                          projection_P_mu)
from .linalg import (FD_STEP, TOL_RANK, Subspace, curve_derivative,
                     range_space, solve_consistent, InconsistentSystemError)
from .report import VerificationReport

# Nested (second-derivative) steps are larger to limit noise amplification.
FD_STEP_NESTED = 1e-4


def _is_group_manifold(action: Action):
    return action.manifold_alg is not None


def _extend_field(action: Action, m, c):
    """Frozen-coordinate extension of the tangent coordinate vector c."""
    if _is_group_manifold(action):
        return lambda p: np.asarray(c, dtype=float).ravel()
    return lambda p: action.project_tangent(p, c)


def d_oneform(mu: DualForm, m, u, v, h=FD_STEP):
    """Exterior derivative d mu at m on tangent vectors u, v.

    Uses the three-term formula X_u(mu(X_v)) - X_v(mu(X_u)) - mu([X_u, X_v])
    with frozen-coordinate extensions; on group manifolds the extensions are
    right-invariant and [X_u, X_v] = -X_{[u,v]}.
    """
    A = mu.action
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    U = _extend_field(A, m, u)
    V = _extend_field(A, m, v)

    def deriv_along(a, W):
        return curve_derivative(
            lambda t: mu(A.retract(m, a, t), W(A.retract(m, a, t))), h)

    term = deriv_along(u, V) - deriv_along(v, U)
    if _is_group_manifold(A):
        return term + mu(m, A.manifold_alg.bracket(u, v))
    return term - mu(m, field_bracket(A, U, V, m, h))


def field_bracket(action: Action, X, Y, m, h=FD_STEP):
    """Lie bracket of two tangent-coordinate vector fields at m.

    On group manifolds the right-trivialized bracket picks up the algebra
    correction -[X(m), Y(m)]; on embedded manifolds it is the antisymmetrized
    directional derivative, projected back into the tangent space.
    """
    def D(a, W):
        return curve_derivative(lambda t: W(action.retract(m, a, t)), h)

    Xm, Ym = X(m), Y(m)
    b = D(Xm, Y) - D(Ym, X)
    if _is_group_manifold(action):
        return b - action.manifold_alg.bracket(Xm, Ym)
    return action.project_tangent(m, b)


def covariant_derivative(mu: DualForm, m, u, v, h=FD_STEP,
                         tol_rank=TOL_RANK):
    """d mu evaluated on the horizontal projections of u and v."""
    P = projection_P_mu(mu, m, tol_rank)
    uh = np.asarray(u, dtype=float).ravel() - P @ np.asarray(u, dtype=float).ravel()
    vh = np.asarray(v, dtype=float).ravel() - P @ np.asarray(v, dtype=float).ravel()
    return d_oneform(mu, m, uh, vh, h)


def docile(mu: DualForm, m, probes=None, tol=1e-7, h=FD_STEP,
           tol_rank=TOL_RANK):
    """Range test: is every covariant-derivative value inside range(mu_m)?

    Returns ``(flag, witness)`` where the witness is a violating
    ``(u, v, value)`` triple, or None.
    """
    A = mu.action
    if probes is None:
        probes = [A.project_tangent(m, e) for e in np.eye(A.vec_dim)]
    rng_mu = range_space(mu.matrix(m), tol_rank)
    for i in range(len(probes)):
        for j in range(i + 1, len(probes)):
            val = covariant_derivative(mu, m, probes[i], probes[j], h, tol_rank)
            if not rng_mu.contains(val, tol):
                return False, (probes[i], probes[j], val)
    return True, None


def curvature(mu: DualForm, m, u, v, h=FD_STEP, tol_rank=TOL_RANK,
              tol_consist=1e-6):
    """Curvature value gamma(m)(covariant derivative of mu at m on u, v).

    The result is a tangent vector in the orbit tangent space.  A docility
    failure surfaces as an :class:`InconsistentSystemError` carrying the
    unresolvable residual.
    """
    nab = covariant_derivative(mu, m, u, v, h, tol_rank)
    return gamma_apply(mu, m, nab, tol_rank, tol_consist)


def tame(mu: DualForm, tol_sym=1e-8) -> DualForm:
    """Compose mu with its own raised inertia factor: chi . sharp . mu.

    Requires chi(m) symmetric wherever evaluated (checked); the result has
    the same kernel as mu pointwise and the same curvature wherever both
    are docile.
    """
    A = mu.action

    def matrix(m):
        chi = mu.matrix(m) @ A.gen_matrix(m)
        if np.linalg.norm(chi - chi.T) > tol_sym * max(1.0, np.linalg.norm(chi)):
            raise ValueError("tame: inertia factor is not symmetric here")
        return chi @ np.array([A.algebra.sharp(row) for row in mu.matrix(m).T]).T

    return DualForm(A, matrix, name=mu.name + "_tamed")


def omega_alpha(alpha, mu: DualForm, m, u, v, h=FD_STEP):
    """Algebra-valued curvature: alpha applied to the curvature vector."""
    return alpha(m, curvature(mu, m, u, v, h))


# ---------------------------------------------------------------------------
# closed-form curvature for two-sided torus actions on a group

def curvature_leftright_closed(action, g, xi, omega, tol_rank=TOL_RANK):
    """Curvature of the tamed two-sided-torus form, by exact linear algebra.

    For the action (h, k) . g = h g k^(-1) of H x H on G the ingredients of
    the curvature are all explicit: project the right-trivialized inputs
    onto the metric complement of h + Ad_g h, bracket them in the ambient
    algebra, pair the result against the generators to obtain the covariant
    derivative, and solve the (always consistent) tamed inertia system.
    Returns the right-trivialized coordinates of the curvature vector.
    """
    alg = action.manifold_alg
    act = action.algebra
    G = alg.gram
    H = act.h                                # ambient coords of h basis
    AdG = alg.Ad_matrix(g)
    S = np.hstack([H, AdG @ H])              # spans h + Ad_g h

    def gamma_project(w):
        # metric-orthogonal projection onto (h + Ad_g h)^perp
        coeff, *_ = np.linalg.lstsq(S.T @ G @ S, S.T @ G @ w, rcond=tol_rank)
        return w - S @ coeff

    xi_h = gamma_project(np.asarray(xi, dtype=float).ravel())
    om_h = gamma_project(np.asarray(omega, dtype=float).ravel())
    b = alg.bracket(xi_h, om_h)

    # covariant derivative as a dual vector on h x h
    AdGinv = alg.Ad_matrix(np.linalg.inv(g))
    nab = np.concatenate([H.T @ G @ b, H.T @ G @ (AdGinv @ b)])

    K = action.gen_matrix(g)
    chi = K.T @ G @ K
    sharp = np.linalg.inv(act.gram)
    zeta = solve_consistent(chi @ sharp @ chi, chi @ sharp @ nab,
                            tol_rank, 1e-6)
    return K @ zeta


def closed_curvature_matrix(action, g, tol_rank=TOL_RANK):
    """All pairwise closed-form curvature values on the coordinate basis.

    Returns an (n, n, n) array C with C[i, j] the curvature on the (i, j)
    basis pair; used for rank/range sweeps.
    """
    n = action.vec_dim
    E = np.eye(n)
    C = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            C[i, j] = curvature_leftright_closed(action, g, E[i], E[j],
                                                 tol_rank)
            C[j, i] = -C[i, j]
    return C


# ---------------------------------------------------------------------------
# structure equation and related identities

def _chi_field(mu: DualForm):
    A = mu.action
    return lambda m: mu.matrix(m) @ A.gen_matrix(m)


def _d_chi(mu: DualForm, m, w, h=FD_STEP_NESTED):
    """Directional derivative of the inertia factor along w."""
    A = mu.action
    chi = _chi_field(mu)
    return curve_derivative(lambda t: chi(A.retract(m, w, t)), h)


def _acting_ad_matrix(action: Action, eta):
    """Matrix of ad_eta on the acting algebra."""
    alg = action.algebra
    return np.array([alg.bracket(eta, e) for e in np.eye(alg.dim)]).T


def structure_residual(mu: DualForm, m, u, v, h=FD_STEP,
                       h_nested=FD_STEP_NESTED, tol_rank=TOL_RANK):
    """Residual of the structure equation at one sample.

    With xi, eta solving chi xi = mu(u), chi eta = mu(v):

        Omega(u, v) + [xi, eta]_M  =  gamma( d mu(u, v)
                                             - d chi(u) eta + d chi(v) xi )

    Both sides are tangent vectors; the Euclidean norm of the difference in
    tangent coordinates is returned.
    """
    A = mu.action
    chi = inertia_factor(mu, m, tol_rank)
    xi = solve_consistent(chi, mu(m, u), tol_rank, 1e-6)
    eta = solve_consistent(chi, mu(m, v), tol_rank, 1e-6)

    lhs = (curvature(mu, m, u, v, h, tol_rank)
           + A.gen_matrix(m) @ A.algebra.bracket(xi, eta))

    dmu = d_oneform(mu, m, u, v, h)
    corr = _d_chi(mu, m, u, h_nested) @ eta - _d_chi(mu, m, v, h_nested) @ xi
    rhs = gamma_apply(mu, m, dmu - corr, tol_rank, 1e-4)
    return float(np.linalg.norm(lhs - rhs))


def interior_product_residual(mu: DualForm, m, eta, v, h=FD_STEP,
                              h_nested=FD_STEP_NESTED):
    """Residual of the generator-contraction identity for d mu.

    Contracting d mu with the generator of eta equals minus the coadjoint
    twist of mu by eta minus the eta-component of d chi:

        d mu(eta_M(m), v) + ad*_eta(mu(v)) + (d chi(v)) eta  =  0.
    """
    A = mu.action
    gen = A.gen_matrix(m) @ np.asarray(eta, dtype=float).ravel()
    lhs = d_oneform(mu, m, gen, v, h)
    coad = _acting_ad_matrix(A, eta).T @ mu(m, v)
    dchi = _d_chi(mu, m, v, h_nested) @ np.asarray(eta, dtype=float).ravel()
    return float(np.linalg.norm(lhs + coad + dchi))


def good_chi_residual(mu: DualForm, m, u, zeta, h=FD_STEP_NESTED):
    """|d chi(u) zeta| for u in ker mu_m and zeta in the isotropy algebra."""
    return float(np.linalg.norm(_d_chi(mu, m, u, h) @
                                np.asarray(zeta, dtype=float).ravel()))


# ---------------------------------------------------------------------------
# involutivity at regular points

def horizontal_field(mu: DualForm, c, tol_rank=TOL_RANK):
    """The frozen coordinate vector c, projected horizontal at each point."""
    A = mu.action

    def X(p):
        w = A.project_tangent(p, c)
        return w - projection_P_mu(mu, p, tol_rank) @ w

    return X


def involutivity_check(mu: DualForm, m, pairs=None, h=FD_STEP,
                       tol=1e-5, tol_rank=TOL_RANK) -> VerificationReport:
    """At a regular point: curvature measures the bracket's vertical part.

    For horizontal fields X, Y checks that mu annihilates
    Omega(X,Y) + [X,Y] and that Omega(X,Y) = (P_Gamma - 1)[X,Y].
    """
    A = mu.action
    rep = VerificationReport(scenario="involutivity_check")
    if pairs is None:
        E = np.eye(A.vec_dim)
        pairs = [(E[i], E[j]) for i in range(A.vec_dim)
                 for j in range(i + 1, A.vec_dim)]
    P = projection_P_mu(mu, m, tol_rank)
    for k, (ci, cj) in enumerate(pairs):
        X = horizontal_field(mu, ci, tol_rank)
        Y = horizontal_field(mu, cj, tol_rank)
        br = field_bracket(A, X, Y, m, h)
        om = curvature(mu, m, X(m), Y(m), h, tol_rank)
        scale = max(1.0, np.linalg.norm(br))
        rep.add("horizontal-bracket",
                "mu annihilates Omega(X,Y) + [X,Y]",
                np.linalg.norm(mu(m, om + br)) / scale, tol, f"pair {k}")
        rep.add("bracket-vertical-part",
                "Omega(X,Y) = (P_Gamma - 1)[X,Y]",
                np.linalg.norm(om + P @ br) / scale, tol, f"pair {k}")
    return rep
