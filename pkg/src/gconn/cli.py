"""Scenario runner: reproduces the worked examples and property suites.

Each scenario assembles a :class:`VerificationReport`; the process exits 0
exactly when every check in the report passes.  Reports are deterministic
for a fixed seed and serialize byte-stably.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, asdict

import numpy as np

from . import actions, connections, curvature, frames, slices
from .groups import exp_so3
from .linalg import Subspace, range_space
from .report import VerificationReport


@dataclass
class ScenarioConfig:
    scenario: str
    seed: int = 0
    tol_rank: float = 1e-8
    tol_eq: float = 1e-8
    tol_struct: float = 1e-5
    fd_step: float = 1e-5
    samples: int = 20
    out: str | None = None
    fmt: str = "json"

    def rng(self):
        return np.random.default_rng(self.seed)

    def echo(self):
        d = asdict(self)
        d.pop("out")
        return d


def _report(cfg: ScenarioConfig) -> VerificationReport:
    return VerificationReport(scenario=cfg.scenario, config=cfg.echo())


# ---------------------------------------------------------------------------

def scenario_so3_r3_basics(cfg: ScenarioConfig) -> VerificationReport:
    """Dual forms, projections and partial connection forms on rotating R^3."""
    rep = _report(cfg)
    rng = cfg.rng()
    A = actions.get_action("so3-on-r3")
    mu = connections.mu_q(lambda t: t)
    rep.extend(connections.dual_form_verify(mu, samples=cfg.samples, rng=rng,
                                            tol_rank=cfg.tol_rank,
                                            tol_eq=cfg.tol_eq))
    for i in range(cfg.samples):
        m = A.random_point(rng)
        P = connections.projection_P_mu(mu, m, cfg.tol_rank)
        rep.add("P-idempotent", "P_mu squares to itself",
                np.linalg.norm(P @ P - P), 1e-9, f"sample {i}")
    # clean form of the singular partial connection form
    alpha = connections.alpha_so3r3(lambda m: 0.3 * np.exp(-(m @ m)))
    alpha0 = connections.alpha_so3r3(lambda m: 0.0)
    clean = connections.clean_alpha(alpha)
    worst = 0.0
    for _ in range(cfg.samples):
        m = A.random_point(rng)
        v = rng.standard_normal(3)
        worst = max(worst, np.linalg.norm(clean(m, v) - alpha0(m, v)))
    rep.add("clean-form", "cleaning removes the radial isotropy component",
            worst, 1e-9)
    # discontinuity witness at the origin
    lim = np.linalg.norm(alpha0.matrix(1e-6 * np.eye(3)[2]))
    rep.add_bool("alpha-discontinuous",
                 "partial connection form stays bounded away from its value "
                 "at the singular point", lim > 0.5)
    chi_field = lambda m: mu.matrix(m) @ A.gen_matrix(m)
    rep.extend(connections.pair_check(alpha0, chi_field,
                                      samples=cfg.samples, rng=rng,
                                      singular_points=[np.zeros(3)]))
    return rep


def scenario_so3_r3_docility(cfg: ScenarioConfig) -> VerificationReport:
    """Docility dichotomy at the origin for the q-weighted forms."""
    rep = _report(cfg)
    rng = cfg.rng()
    mu1 = connections.mu_q(lambda t: 1.0)
    mut = connections.mu_q(lambda t: t)
    origin = np.zeros(3)
    ok, witness = curvature.docile(mu1, origin, h=cfg.fd_step)
    rep.add_bool("non-docile", "constant-weight form fails docility at 0",
                 not ok)
    if witness is not None:
        u, v, val = witness
        rep.add("witness-value",
                "exterior derivative at 0 is twice the weighted cross "
                "product", np.linalg.norm(val - 2.0 * np.cross(u, v)), 1e-6)
    ok_t, _ = curvature.docile(mut, origin, h=cfg.fd_step)
    rep.add_bool("docile", "vanishing-weight form is docile at 0", ok_t)
    u, v = rng.standard_normal(3), rng.standard_normal(3)
    om = curvature.curvature(mut, origin, u, v, cfg.fd_step)
    rep.add("zero-curvature", "curvature at the origin vanishes",
            np.linalg.norm(om), 1e-7)
    return rep


_SU3_TABLE = {
    # (basis index pair) -> pinned coordinates (d1, d2, s1, s2, s3, x1..x3)
    (2, 5): np.array([-1.0, 0, 0, 0, 0, 0, 0, 0]),
    (3, 6): np.array([+1.0, 0, 0, 0, 0, 0, 0, 0]),
    (2, 6): np.array([0, 0, 0, 0, -1.0, 0, 0, 0]),
    (3, 5): np.array([0, 0, 0, 0, -1.0, 0, 0, 0]),
}


def scenario_hxh_su3_curvature(cfg: ScenarioConfig) -> VerificationReport:
    """Curvature of the tamed two-sided torus form on SU(3)."""
    rep = _report(cfg)
    rng = cfg.rng()
    A = actions.get_action("hxh-on-su3")
    mu = connections.simple_mechanical_mu(A)
    nu = curvature.tame(mu)
    E = np.eye(8)
    for theta in (np.pi / 5, np.pi / 3, 1.0):
        g = A.manifold_alg.exp(theta * E[7])
        tag = f"theta={theta:.6f}"
        vals = []
        for i in range(8):
            for j in range(i + 1, 8):
                om = curvature.curvature_leftright_closed(A, g, E[i], E[j],
                                                          cfg.tol_rank)
                vals.append(om)
                want = _SU3_TABLE.get((i, j))
                if want is not None:
                    rep.add(f"table-{i}{j}",
                            "closed-form curvature matches the tabulated "
                            "value", np.linalg.norm(om - want), 1e-9, tag)
                else:
                    rep.add(f"zero-{i}{j}",
                            "curvature vanishes on this basis pair",
                            np.linalg.norm(om), 1e-9, tag)
        V = np.array(vals)
        s = np.linalg.svd(V, compute_uv=False)
        rep.add_bool("rank-two", "curvature has numerical rank two",
                     s[2] < 1e-10 * s[0] and s[1] > 1e-6 * s[0], tag)
        rng_sub = range_space(V.T, cfg.tol_rank)
        span = np.zeros((8, 2))
        span[0, 0] = 1.0
        span[4, 1] = 1.0
        target = Subspace([span[:, 0], span[:, 1]])
        rep.add_bool("range", "curvature range is the d1/s3 plane",
                     target.contains_subspace(rng_sub, 1e-8)
                     and rng_sub.contains_subspace(target, 1e-8), tag)
    # closed form vs finite differences at random points
    worst = 0.0
    for _ in range(cfg.samples):
        g = A.random_point(rng)
        u = rng.standard_normal(8)
        v = rng.standard_normal(8)
        cf = curvature.curvature_leftright_closed(A, g, u, v, cfg.tol_rank)
        fd = curvature.curvature(nu, g, u, v, cfg.fd_step)
        worst = max(worst, float(np.max(np.abs(cf - fd))))
    rep.add("closed-vs-fd", "closed form agrees with finite differences",
            worst, 1e-5)
    return rep


def scenario_s1s1_so3_slice(cfg: ScenarioConfig) -> VerificationReport:
    """Slice construction and flatness for the two-circle action on SO(3)."""
    rep = _report(cfg)
    rng = cfg.rng()
    A = actions.get_action("s1s1-on-so3")
    mu = connections.simple_mechanical_mu(A)
    sigma = np.array([0.0, 0.0, 1.0])
    g0 = np.eye(3)
    # inertia eigenstructure
    nup = np.array([1.0, 1.0]) / np.sqrt(2)
    num = np.array([1.0, -1.0]) / np.sqrt(2)
    worst = 0.0
    for _ in range(cfg.samples):
        g = A.random_point(rng)
        chi = mu.matrix(g) @ A.gen_matrix(g)
        r = float(sigma @ (g @ sigma))
        worst = max(worst,
                    np.linalg.norm(chi @ nup - (1 - r) * nup),
                    np.linalg.norm(chi @ num - (1 + r) * num))
    rep.add("chi-eigen", "inertia eigenvalues are 1 -+ <sigma, g sigma>",
            worst, 1e-10)
    # curvature identically zero
    worst = 0.0
    nu = curvature.tame(mu)
    for _ in range(cfg.samples):
        g = A.random_point(rng)
        u, v = rng.standard_normal(3), rng.standard_normal(3)
        worst = max(worst, np.linalg.norm(
            curvature.curvature_leftright_closed(A, g, u, v, cfg.tol_rank)))
    rep.add("flat", "closed-form curvature vanishes identically", worst,
            1e-7)
    # slice verification at the identity
    sl = slices.cayley_slice(sigma, g0, r=1.0)

    def stab(rg):
        th = 2 * np.pi * rg.random()
        R = exp_so3(th * sigma)
        return (R, R)

    def nearby(rg):
        a, b = 0.2 * rg.standard_normal(2)
        while abs(a - b) < 1e-3:
            a, b = 0.2 * rg.standard_normal(2)
        return (exp_so3(a * sigma), exp_so3(b * sigma))

    rep.extend(slices.slice_verify(sl, A, g0, samples=cfg.samples, rng=rng,
                                   stabilizer_sampler=stab,
                                   nearby_sampler=nearby))
    # tangency reduces to orthogonality against the axis
    worst = 0.0
    for _ in range(cfg.samples):
        p = 0.4 * rng.standard_normal(2)
        g = sl.psi(p)
        w = sigma + g @ sigma
        for dp in np.eye(2):
            worst = max(worst, abs(float(sl.tangent(p, dp) @ w)))
    rep.add("tangency", "slice tangents annihilate sigma + g sigma",
            worst, 1e-8)
    # involutivity of the almost-horizontal system
    ad = slices.trivial_adaptor(A, g0)
    pi = 0.5 * (mu.matrix(g0) @ A.gen_matrix(g0))

    def iota(g):
        r = float(sigma @ (np.asarray(g) @ sigma))
        return np.eye(2) / (1.0 + r)

    rep.extend(slices.abel_involutivity(mu, ad, pi, iota,
                                        samples=cfg.samples, rng=rng,
                                        tol=cfg.tol_struct))
    return rep


def scenario_us2_moving_frame(cfg: ScenarioConfig) -> VerificationReport:
    """Left moving frame on the unit tangent bundle of the sphere."""
    rep = _report(cfg)
    rng = cfg.rng()
    A = actions.get_action("so3-on-us2")
    worst_eq = worst_d = 0.0
    for _ in range(cfg.samples):
        p = A.random_point(rng)
        g = A.random_group(rng)
        worst_eq = max(worst_eq, np.linalg.norm(
            frames.rho_us2(A.apply(g, p))
            - np.asarray(g) @ frames.rho_us2(p)))
        v = A.random_tangent(rng, p)
        worst_d = max(worst_d, np.linalg.norm(
            frames.dnat_rho(p, v) - frames.dnat_rho_fd(p, v)))
    rep.add("rho-equivariance", "frame is left equivariant", worst_eq, 1e-10)
    rep.add("dnat-closed-form",
            "trivialized derivative matches finite differences", worst_d,
            1e-6)
    return rep


def scenario_s2_pmf_beta(cfg: ScenarioConfig) -> VerificationReport:
    """Partial moving frame from the eastward field, with slip maps."""
    rep = _report(cfg)
    rng = cfg.rng()
    pmf = frames.pmf_from_field(frames.eastward_field)
    rep.extend(frames.beta_equivariance_check(pmf, samples=cfg.samples,
                                              rng=rng, tol=cfg.tol_struct))
    # invariant cross-section
    worst = 0.0
    for _ in range(cfg.samples):
        m = frames._sample_off_poles(rng)
        g = pmf.action.random_group(rng)
        worst = max(worst, np.linalg.norm(
            frames.cross_section(pmf, np.asarray(g) @ m)
            - frames.cross_section(pmf, m)))
    rep.add("cross-section", "phi(m)^-1 . m is orbit invariant", worst, 1e-8)
    # geodesic curvature of latitude circles
    worst = 0.0
    for theta0 in (0.6, 1.0, 1.4):
        pt, vel = frames.latitude_curve(theta0)
        for t in np.linspace(0.0, 2.0, 5):
            m, dm = pt(t), vel(t)
            d = pmf.dnat_phi(m, dm)
            pred = np.cross(m, dm) + m / np.tan(theta0)
            worst = max(worst, np.linalg.norm(d - pred))
    rep.add("latitude-curvature",
            "frame derivative along latitudes carries the cot(theta0) "
            "geodesic curvature", worst, 1e-5)
    return rep


def scenario_property_suite_all(cfg: ScenarioConfig) -> VerificationReport:
    """All scenarios with reduced sample counts, one deterministic report."""
    rep = _report(cfg)
    sub = ScenarioConfig(scenario="", seed=cfg.seed, tol_rank=cfg.tol_rank,
                         tol_eq=cfg.tol_eq, tol_struct=cfg.tol_struct,
                         fd_step=cfg.fd_step,
                         samples=max(4, cfg.samples // 4))
    for name in ("so3-r3-basics", "so3-r3-docility", "hxh-su3-curvature",
                 "s1s1-so3-slice", "us2-moving-frame", "s2-pmf-beta"):
        sub.scenario = name
        inner = SCENARIOS[name](sub)
        for c in inner.checks:
            c.check_id = f"{name}/{c.check_id}"
            rep.checks.append(c)
    return rep


SCENARIOS = {
    "so3-r3-basics": scenario_so3_r3_basics,
    "so3-r3-docility": scenario_so3_r3_docility,
    "hxh-su3-curvature": scenario_hxh_su3_curvature,
    "s1s1-so3-slice": scenario_s1s1_so3_slice,
    "us2-moving-frame": scenario_us2_moving_frame,
    "s2-pmf-beta": scenario_s2_pmf_beta,
    "property-suite-all": scenario_property_suite_all,
}


def run_scenario(cfg: ScenarioConfig) -> VerificationReport:
    if cfg.scenario not in SCENARIOS:
        raise KeyError(f"unknown scenario {cfg.scenario!r}; "
                       f"known: {sorted(SCENARIOS)}")
    return SCENARIOS[cfg.scenario](cfg)


def emit_report(report: VerificationReport, path=None, fmt="json"):
    text = report.to_json() if fmt == "json" else report.to_text()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def main(argv=None):
    p = argparse.ArgumentParser(
        prog="gconn",
        description="verification scenarios for connection forms of "
                    "non-free group actions")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--tol-eq", type=float, default=1e-8)
    p.add_argument("--tol-struct", type=float, default=1e-5)
    p.add_argument("--fd-step", type=float, default=1e-5)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    args = p.parse_args(argv)
    cfg = ScenarioConfig(scenario=args.scenario, seed=args.seed,
                         tol_rank=args.tol_rank, tol_eq=args.tol_eq,
                         tol_struct=args.tol_struct, fd_step=args.fd_step,
                         samples=args.samples, out=args.out, fmt=args.format)
    try:
        rep = run_scenario(cfg)
    except KeyError as exc:
        p.error(str(exc))
    emit_report(rep, cfg.out, cfg.fmt)
    return 0 if rep.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
