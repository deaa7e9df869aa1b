"""Adaptors, adapted dual forms, almost-horizontal systems and slices.

Near a singular point m0 the kernel of a dual form jumps in dimension.  An
adaptor phi conjugates the reference isotropy algebra over the nearby
isotropy algebras, which lets the form be corrected to constant rank: the
adapted form's kernel is the almost-horizontal system
Xi = Gamma + (Ad_phi g_m0)~.  The concrete slice construction here is the
Cayley-parametrized slice for the two-sided circle action on SO(3).
"""

from __future__ import annotations

import numpy as np

from . import groups
from .actions import Action, isotropy_algebra, orbit_tangent
from .connections import DualForm
from .curvature import _d_chi, field_bracket
from .linalg import (Subspace, TOL_RANK, central_difference, rank_nullspace,
                     solve_consistent)
from .report import VerificationReport


class AdaptorContractError(ValueError):
    """The candidate adaptor fails a defining containment/equivariance test."""


class Adaptor:
    """A group-valued map phi with phi(m0) in the stabilizer of m0 that
    conjugates the reference isotropy algebra over nearby isotropy algebras.

    ``phi`` maps a manifold point to an acting-group element; ``dnatL`` is
    the left-trivialized derivative evaluator (tangent coords -> acting
    algebra), identically zero for the trivial adaptor.
    """

    def __init__(self, action: Action, m0, phi=None, dnatL=None):
        self.action = action
        self.m0 = m0
        self._phi = phi if phi is not None else (lambda m: action.identity())
        self._dnatL = dnatL if dnatL is not None else (
            lambda m, v: np.zeros(action.algebra.dim))
        self.iso0 = isotropy_algebra(action, m0)

    def phi(self, m):
        return self._phi(m)

    def dnatL(self, m, v):
        return self._dnatL(m, v)

    def verify(self, samples=20, rng=None, tol=1e-8) -> VerificationReport:
        """Sampled check of the defining adaptor properties near m0."""
        A = self.action
        rng = np.random.default_rng(0) if rng is None else rng
        rep = VerificationReport(scenario="adaptor_verify")
        # phi(m0) stabilizes m0
        p0 = A.apply(self.phi(self.m0), self.m0)
        rep.add("fixes-base", "phi(m0) stabilizes m0",
                np.linalg.norm(np.asarray(p0) - np.asarray(self.m0)), tol)
        for i in range(samples):
            v = A.random_tangent(rng, self.m0)
            m = A.retract(self.m0, v, 0.3 * rng.random())
            Adp = A.Ad_group(self.phi(m))
            iso = isotropy_algebra(A, m)
            conj = Subspace([Adp @ self.iso0.basis[:, j]
                             for j in range(self.iso0.dim)],
                            ambient_dim=A.algebra.dim)
            ok = conj.contains_subspace(iso, 1e-6)
            rep.add_bool("covers-isotropy", "Ad_phi g_m0 contains g_m",
                         ok, f"sample {i}")
        return rep


def trivial_adaptor(action: Action, m0) -> Adaptor:
    return Adaptor(action, m0)


def adapted_inertia(mu: DualForm, adaptor: Adaptor, m, tol_rank=TOL_RANK):
    """chi_phi(m) = chi(m) composed with Ad_{phi(m)}.

    Raises :class:`AdaptorContractError` when ker chi_phi is not contained
    in the reference isotropy algebra.
    """
    A = mu.action
    chi = mu.matrix(m) @ A.gen_matrix(m)
    chi_phi = chi @ A.Ad_group(adaptor.phi(m))
    _, kern = rank_nullspace(chi_phi, tol_rank)
    if not adaptor.iso0.contains_subspace(kern, 1e-6):
        raise AdaptorContractError(
            "ker chi_phi escapes the reference isotropy algebra")
    return chi_phi


def adapted_dual_form(mu: DualForm, adaptor: Adaptor, pi, iota) -> DualForm:
    """The constant-rank correction (chi_phi . pi . iota) . mu of mu.

    ``pi`` is a fixed projection matrix on the acting algebra with kernel
    the reference isotropy algebra; ``iota`` maps a point to a restricted
    pseudo-inverse of chi_phi, i.e. pi = pi . iota(m) . chi_phi(m) must hold
    on the domain (checked at every evaluation).
    """
    pi = np.asarray(pi, dtype=float)

    def matrix(m):
        chi_phi = adapted_inertia(mu, adaptor, m)
        im = np.asarray(iota(m), dtype=float)
        resid = np.linalg.norm(pi - pi @ im @ chi_phi)
        if resid > 1e-8 * max(1.0, np.linalg.norm(pi)):
            raise ValueError(
                f"iota is not a restricted pseudo-inverse here "
                f"(residual {resid:.3e})")
        return chi_phi @ pi @ im @ mu.matrix(m)

    return DualForm(mu.action, matrix, name=mu.name + "_adapted")


def almost_horizontal_basis(mu: DualForm, adaptor: Adaptor, m,
                            tol_rank=TOL_RANK) -> Subspace:
    """Basis of Xi|_m = ker mu_m + generators of Ad_phi(m) applied to g_m0.

    The sum is verified to be direct (ranks add); a failure raises
    :class:`AdaptorContractError`.
    """
    A = mu.action
    gam = mu.kernel(m, tol_rank)
    Adp = A.Ad_group(adaptor.phi(m))
    K = A.gen_matrix(m)
    scale = max(1.0, np.linalg.norm(K))
    gens = [K @ (Adp @ adaptor.iso0.basis[:, j])
            for j in range(adaptor.iso0.dim)]
    # generators may vanish identically at the base point itself; drop the
    # pure-roundoff vectors before the relative-rank reduction
    gens = [g for g in gens if np.linalg.norm(g) > 1e-10 * scale]
    gen_sub = Subspace(gens, ambient_dim=A.vec_dim)
    vecs = ([gam.basis[:, j] for j in range(gam.dim)]
            + [gen_sub.basis[:, j] for j in range(gen_sub.dim)])
    xi = Subspace(vecs, ambient_dim=A.vec_dim)
    if xi.dim != gam.dim + gen_sub.dim:
        raise AdaptorContractError("Gamma + (Ad_phi g_m0)~ is not direct")
    return xi


# ---------------------------------------------------------------------------
# the Cayley slice on SO(3)

class SliceCandidate:
    """A parametrized submanifold through m0, with tangent evaluator and a
    Gauss-Newton membership test."""

    def __init__(self, m0, psi, tangent, param_dim, radius):
        self.m0 = m0
        self.psi = psi              # params -> manifold point
        self.tangent = tangent      # (params, dparams) -> tangent coords
        self.param_dim = param_dim
        self.radius = radius

    def tangent_basis(self, params):
        E = np.eye(self.param_dim)
        return [self.tangent(params, E[j]) for j in range(self.param_dim)]

    def locate(self, m, iters=25):
        """Gauss-Newton inversion of psi; returns (params, residual)."""
        target = np.asarray(m, dtype=float).ravel()

        def resid(p):
            return np.asarray(self.psi(p), dtype=float).ravel() - target

        p = np.zeros(self.param_dim)
        for _ in range(iters):
            r = resid(p)
            J = central_difference(resid, p, 1e-6)
            step, *_ = np.linalg.lstsq(J, r, rcond=None)
            p = p - step
            if np.linalg.norm(step) < 1e-14:
                break
        return p, float(np.linalg.norm(resid(p)))

    def contains(self, m, tol=1e-8):
        p, r = self.locate(m)
        return r <= tol and np.linalg.norm(p) < self.radius


def cayley_slice(sigma, g0, r=1.0) -> SliceCandidate:
    """Slice eta -> cay(eta) g0 through g0, restricted to eta orthogonal to
    the rotation axis sigma.

    Tangents are returned in right-trivialized so(3) coordinates using the
    closed form for the trivialized derivative of the Cayley transform.
    """
    sigma = np.asarray(sigma, dtype=float).ravel()
    if abs(np.linalg.norm(sigma) - 1.0) > 1e-10:
        raise ValueError("cayley_slice: sigma must be a unit vector")
    if not r < 2.0:
        raise ValueError("cayley_slice: radius must be < 2")
    g0 = np.asarray(g0, dtype=float)
    # orthonormal basis of sigma-perp
    aux = np.eye(3)[np.argmin(np.abs(sigma))]
    b1 = np.cross(sigma, aux)
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(sigma, b1)
    B = np.array([b1, b2]).T  # 3 x 2

    def psi(params):
        return groups.cay(B @ np.asarray(params, dtype=float).ravel()) @ g0

    def tangent(params, dparams):
        eta = B @ np.asarray(params, dtype=float).ravel()
        deta = B @ np.asarray(dparams, dtype=float).ravel()
        return (deta + 0.5 * np.cross(eta, deta)) / (1.0 + (eta @ eta) / 4.0)

    return SliceCandidate(np.asarray(g0, dtype=float), psi, tangent, 2, r)


def slice_verify(S: SliceCandidate, action: Action, m0, samples=50,
                 rng=None, stabilizer_sampler=None, nearby_sampler=None,
                 tol=1e-8, tol_rank=TOL_RANK) -> VerificationReport:
    """Sampled verification of the three defining slice conditions.

    (i) T_m0 M splits as T_m0 S + orbit tangent, directly;
    (ii) T_m S + orbit tangent spans T_m M at sampled m in S;
    (iii) stabilizer elements of m0 map sampled m in S back into S, while
    nearby non-stabilizer elements move them off S (unless fixed).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    rep = VerificationReport(scenario="slice_verify")

    def sample_params():
        p = rng.standard_normal(S.param_dim)
        return 0.6 * S.radius * rng.random() * p / np.linalg.norm(p)

    # (i) direct sum at the base point
    t0 = S.tangent_basis(np.zeros(S.param_dim))
    orb0 = orbit_tangent(action, m0, tol_rank)
    stacked = Subspace(t0 + [orb0.basis[:, j] for j in range(orb0.dim)],
                       ambient_dim=action.vec_dim)
    rep.add_bool("slice-i", "T_m0 M = T_m0 S (+) orbit tangent (direct)",
                 stacked.dim == len(t0) + orb0.dim
                 and stacked.dim == action.vec_dim)

    for i in range(samples):
        p = sample_params()
        m = S.psi(p)
        # (ii) spanning away from the base point
        tb = S.tangent_basis(p)
        orb = orbit_tangent(action, m, tol_rank)
        span = Subspace(tb + [orb.basis[:, j] for j in range(orb.dim)],
                        ambient_dim=action.vec_dim)
        rep.add_bool("slice-ii", "T_m S + orbit tangent spans T_m M",
                     span.dim == action.vec_dim, f"sample {i}")
        # (iii) stabilizer stays on the slice ...
        if stabilizer_sampler is not None:
            h = stabilizer_sampler(rng)
            _, resid = S.locate(action.apply(h, m))
            rep.add("slice-iii-stab", "stabilizer of m0 maps S into S",
                    resid, tol, f"sample {i}")
        # ... and nearby non-stabilizer elements leave it
        if nearby_sampler is not None:
            g = nearby_sampler(rng)
            gm = action.apply(g, m)
            moved = np.linalg.norm(np.asarray(gm, dtype=float).ravel()
                                   - np.asarray(m, dtype=float).ravel())
            if moved > 1e-7:
                rep.add_bool("slice-iii-off", "non-stabilizer leaves S",
                             not S.contains(gm, tol), f"sample {i}")
    return rep


def abel_involutivity(mu: DualForm, adaptor: Adaptor, pi, iota, samples=20,
                      rng=None, tol=1e-5, tol_rank=TOL_RANK,
                      h=1e-5) -> VerificationReport:
    """Involutivity of the almost-horizontal system near an abelian-stabilizer
    singular point, via the adapted form.

    For fields X, Y valued in Xi = ker(adapted form) checks that the adapted
    form annihilates [X, Y], that [X, Y] stays in Xi, and that the
    inertia-derivative correction terms vanish for horizontal inputs.
    """
    A = mu.action
    rng = np.random.default_rng(0) if rng is None else rng
    rep = VerificationReport(scenario="abel_involutivity")
    mu_t = adapted_dual_form(mu, adaptor, pi, iota)
    pi = np.asarray(pi, dtype=float)

    def xi_field(c):
        # frozen coordinate vector projected onto ker of the adapted form
        def X(p):
            w = A.project_tangent(p, c)
            kern = mu_t.kernel(p, tol_rank)
            return kern.project(w)
        return X

    E = np.eye(A.vec_dim)
    for i in range(samples):
        v = A.random_tangent(rng, adaptor.m0)
        m = A.retract(adaptor.m0, v, 0.25 * rng.random())
        ci, cj = rng.choice(A.vec_dim, size=2, replace=False)
        X, Y = xi_field(E[ci]), xi_field(E[cj])
        br = field_bracket(A, X, Y, m, h)
        scale = max(1.0, np.linalg.norm(br))
        rep.add("xi-involutive", "adapted form annihilates [X, Y]",
                np.linalg.norm(mu_t(m, br)) / scale, tol, f"sample {i}")
        xi_sub = almost_horizontal_basis(mu, adaptor, m, tol_rank)
        rep.add("bracket-tangent", "[X, Y] stays inside Xi",
                np.linalg.norm(br - xi_sub.project(br)) / scale, tol,
                f"sample {i}")
        # correction terms of the relative structure equation
        im = np.asarray(iota(m), dtype=float)
        xi_c = pi @ im @ mu(m, X(m))
        eta_c = pi @ im @ mu(m, Y(m))
        dchi_u = _d_chi_phi(mu, adaptor, m, X(m))
        dchi_v = _d_chi_phi(mu, adaptor, m, Y(m))
        rep.add("corrections-vanish",
                "d chi_phi(u) pi eta - d chi_phi(v) pi xi = 0 for horizontal "
                "inputs",
                np.linalg.norm(dchi_u @ eta_c - dchi_v @ xi_c), tol,
                f"sample {i}")
    return rep


def _d_chi_phi(mu: DualForm, adaptor: Adaptor, m, w, h=1e-4):
    """Directional derivative of the adapted inertia factor along w."""
    from .linalg import curve_derivative
    A = mu.action

    def at(t):
        p = A.retract(m, w, t)
        return (mu.matrix(p) @ A.gen_matrix(p)) @ A.Ad_group(adaptor.phi(p))

    return curve_derivative(at, h)
