//! Behavioral tests of the time-symmetric solver: integrator order, the
//! direction of the advanced feed-forward, coupling dependence of the
//! fitted weights, and multiplicity of self-consistent solutions.

use retrobell_core::dynamics::{
    check_invariant_triangle, extract_alpha_beta_gamma, integrate_retarded_only,
    solve_time_symmetric, ExperimentConfig,
};
use retrobell_core::outcome::OutcomePair;
use retrobell_core::sphere::{Outcome, UnitVec3};
use retrobell_core::Error;

fn uv(x: f64, y: f64, z: f64) -> UnitVec3 {
    UnitVec3::normalize(x, y, z).unwrap()
}

fn settings() -> (UnitVec3, UnitVec3) {
    let a = uv(0.0, 1.0, 0.0);
    let chi = 120f64.to_radians();
    (a, uv(chi.sin(), chi.cos(), 0.0))
}

/// Initial spin with both apparatus projections equal to `s` (in-plane
/// construction against the 120-degree setting pair).
fn symmetric_projection_spin(s: f64) -> UnitVec3 {
    let chi = 120f64.to_radians();
    let y = s;
    let x = (s - y * chi.cos()) / chi.sin();
    let z = (1.0 - x * x - y * y).sqrt();
    uv(x, y, z)
}

/// Richardson ratio of the pre-measurement spin under h -> h/2 is ~4,
/// i.e. the midpoint integrator realizes second order on the coupled
/// retarded flow.
#[test]
fn integrator_is_second_order() {
    let (a, b) = settings();
    let run = |h: f64| {
        let mut cfg =
            ExperimentConfig::new(a, b, uv(0.3, 0.4, 0.87), OutcomePair::new(Outcome::Up, Outcome::Down));
        cfg.s0_b = Some(uv(0.9, -0.1, 0.4));
        cfg.kappa = 0.5;
        cfg.h = h;
        let (ta, _) = integrate_retarded_only(&cfg).unwrap();
        *ta.pre_measurement()
    };
    let p1 = run(0.01);
    let p2 = run(0.005);
    let p3 = run(0.0025);
    let ratio = p1.angle_to(&p2) / p2.angle_to(&p3);
    assert!(
        (2.8..=5.5).contains(&ratio),
        "expected ~4 for a second-order scheme, got {ratio}"
    );
}

/// The advanced interaction tilts S_B toward −A·a relative to the purely
/// retarded flow: the feed-forward carries the distant outcome, not noise.
#[test]
fn feed_forward_points_at_partner_outcome() {
    let (a, b) = settings();
    let cfg = ExperimentConfig::new(
        a,
        b,
        uv(0.3, 0.4, 0.87),
        OutcomePair::new(Outcome::Up, Outcome::Down),
    );
    let sol = solve_time_symmetric(&cfg).unwrap();
    assert_eq!(sol.realized, cfg.seed_outcome);
    let (_, tb_ret) = integrate_retarded_only(&cfg).unwrap();
    let t_star = cfg.measurement_time() - 0.01;
    let sb_c = sol.traj_b.sample(t_star).unwrap();
    let sb_r = tb_ret.sample(t_star).unwrap();
    let target = -a; // −A·a with A = Up
    let proj = (sb_c.x() - sb_r.x()) * target.x()
        + (sb_c.y() - sb_r.y()) * target.y()
        + (sb_c.z() - sb_r.z()) * target.z();
    assert!(proj > 1e-3, "feed-forward projection = {proj}");
}

/// Fitted convex weights keep the algebraic ordering alpha > beta > gamma
/// > 0 and both advanced weights grow with the coupling.
#[test]
fn fitted_weights_ordered_and_monotone_in_kappa() {
    let (a, b) = settings();
    let mut prev: Option<(f64, f64)> = None;
    for kappa in [0.25, 0.5, 1.0, 2.0] {
        let mut cfg = ExperimentConfig::new(
            a,
            b,
            uv(0.3, 0.4, 0.87),
            OutcomePair::new(Outcome::Up, Outcome::Down),
        );
        cfg.kappa = kappa;
        let sol = solve_time_symmetric(&cfg).unwrap();
        let w = extract_alpha_beta_gamma(&sol, &cfg).unwrap();
        assert!(
            w.alpha > w.beta && w.beta > w.gamma && w.gamma > 0.0,
            "kappa={kappa}: ({}, {}, {})",
            w.alpha,
            w.beta,
            w.gamma
        );
        assert!(w.residual < 1e-9, "kappa={kappa}: fit residual {}", w.residual);
        let sum = w.alpha + w.beta + w.gamma;
        assert!((sum - 1.0).abs() < 1e-12);
        if let Some((pb, pg)) = prev {
            assert!(w.beta > pb, "beta not increasing at kappa={kappa}");
            assert!(w.gamma > pg, "gamma not increasing at kappa={kappa}");
        }
        prev = Some((w.beta, w.gamma));

        let tri = check_invariant_triangle(&sol, &cfg).unwrap();
        assert_eq!(
            tri.samples_above_tol, 0,
            "kappa={kappa}: triangle violations ({}, {})",
            tri.max_violation_a, tri.max_violation_b
        );
    }
}

/// Near the case boundary several seeded outcomes admit converged
/// self-consistent solutions: the simulated self-fulfilling prophecy.
#[test]
fn multiple_consistent_solutions_near_boundary() {
    let (a, b) = settings();
    let s0 = symmetric_projection_spin(0.024);
    let mut converged = Vec::new();
    for (sa, sb) in [
        (Outcome::Up, Outcome::Down),
        (Outcome::Up, Outcome::Up),
        (Outcome::Down, Outcome::Up),
        (Outcome::Down, Outcome::Down),
    ] {
        let seed = OutcomePair::new(sa, sb);
        match solve_time_symmetric(&ExperimentConfig::new(a, b, s0, seed)) {
            Ok(sol) => {
                assert_eq!(sol.realized, seed);
                converged.push(seed);
            }
            Err(Error::SeedInconsistent { .. }) | Err(Error::NoConvergence { .. }) => {}
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    let equal = converged.iter().filter(|p| p.is_equal()).count();
    let unequal = converged.len() - equal;
    assert!(
        equal >= 1 && unequal >= 1,
        "expected both outcome classes to self-fulfill, got {converged:?}"
    );
}

/// Far from the boundary only one outcome class survives seeding.
#[test]
fn single_class_away_from_boundary() {
    let (a, b) = settings();
    // projections well above all thresholds: anti-coincidence territory
    let s0 = symmetric_projection_spin(0.4);
    let ok = solve_time_symmetric(&ExperimentConfig::new(
        a,
        b,
        s0,
        OutcomePair::new(Outcome::Up, Outcome::Down),
    ));
    assert!(ok.is_ok(), "natural seed failed: {:?}", ok.err());
    let bad = solve_time_symmetric(&ExperimentConfig::new(
        a,
        b,
        s0,
        OutcomePair::new(Outcome::Up, Outcome::Up),
    ));
    assert!(
        matches!(bad, Err(Error::SeedInconsistent { .. })),
        "equal-class seed should be rejected here, got {bad:?}"
    );
}

/// Identical configurations give bitwise identical trajectories.
#[test]
fn solver_is_deterministic() {
    let (a, b) = settings();
    let cfg = ExperimentConfig::new(
        a,
        b,
        uv(0.3, 0.4, 0.87),
        OutcomePair::new(Outcome::Up, Outcome::Down),
    );
    let s1 = solve_time_symmetric(&cfg).unwrap();
    let s2 = solve_time_symmetric(&cfg).unwrap();
    assert_eq!(s1.picard_iters, s2.picard_iters);
    for (p, q) in s1.traj_a.samples().iter().zip(s2.traj_a.samples()) {
        assert_eq!(p.components(), q.components());
    }
    for (p, q) in s1.traj_b.samples().iter().zip(s2.traj_b.samples()) {
        assert_eq!(p.components(), q.components());
    }
}
