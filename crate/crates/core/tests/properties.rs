//! Property tests for the geometry, the outcome equations, and the
//! probability bounds.

use proptest::prelude::*;

use retrobell_core::outcome::{
    classify_case, consistent_outcomes, ModelParams, OutcomePair,
};
use retrobell_core::probability::{
    acute_angle_deg, bell_sum, cap_overlap_closed_form_c0, cap_overlap_fraction, chsh_value,
    local_anticoincidence, nu_params_unchecked, probability_bounds, BellTriple,
};
use retrobell_core::sphere::{
    measure_spin, project_spin, sphere_distance_vector, Outcome, UnitVec3,
};

fn unit_vec() -> impl Strategy<Value = UnitVec3> {
    (-1.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).max(0.0).sqrt();
        UnitVec3::normalize(r * phi.cos(), r * phi.sin(), z)
            .unwrap_or_else(|_| UnitVec3::from_plane_angle_deg(0.0))
    })
}

/// Ordered params alpha > beta > gamma > 0 summing to 1.
fn ordered_params() -> impl Strategy<Value = ModelParams> {
    (0.05f64..0.33, 0.1f64..0.9).prop_map(|(beta, gfrac)| {
        let gamma = (beta * gfrac).min(beta * 0.95).max(1e-4);
        let alpha = 1.0 - beta - gamma;
        // beta < 0.33 and gamma < 0.95 beta keep alpha > beta
        ModelParams::new(alpha, beta, gamma).unwrap()
    })
}

proptest! {
    #[test]
    fn distance_norm_is_geodesic_angle(x in unit_vec(), y in unit_vec()) {
        if x.dot(&y) > -1.0 + 1e-6 {
            let d = sphere_distance_vector(&x, &y).unwrap();
            prop_assert!((d.norm() - x.angle_to(&y)).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_is_idempotent(a in unit_vec(), s in unit_vec()) {
        let once = project_spin(&a, &s);
        prop_assert_eq!(project_spin(&a, &once), once);
        prop_assert_eq!(measure_spin(&a, &once), measure_spin(&a, &s));
    }

    #[test]
    fn measurement_is_odd_in_the_axis(a in unit_vec(), s in unit_vec()) {
        if a.dot(&s).abs() > 1e-12 {
            prop_assert_eq!(measure_spin(&(-a), &s), measure_spin(&a, &s).flip());
        }
    }

    /// The case-table conditions agree exactly with brute-force
    /// enumeration of the outcome equations across the regime.
    #[test]
    fn classification_matches_enumeration(
        s0 in unit_vec(),
        angle in 91.0f64..179.0,
        p in ordered_params(),
    ) {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(angle);
        prop_assume!(p.beta() * a.dot(&b).abs() >= p.gamma());
        let set = consistent_outcomes(&s0, &a, &b, &p);
        let label = classify_case(&s0, &a, &b, &p).unwrap();
        prop_assert_eq!(label.equal_possible(), set.equal_possible(),
            "label {:?} vs set {:?}", label, set);
        prop_assert_eq!(label.unequal_possible(), set.unequal_possible(),
            "label {:?} vs set {:?}", label, set);
    }

    /// Possibility flags are invariant under S0 -> -S0 with a <-> b.
    #[test]
    fn flags_symmetric_under_reflection(
        s0 in unit_vec(),
        a in unit_vec(),
        b in unit_vec(),
        p in ordered_params(),
    ) {
        let set = consistent_outcomes(&s0, &a, &b, &p);
        let mirrored = consistent_outcomes(&(-s0), &b, &a, &p);
        prop_assert_eq!(set.equal_possible(), mirrored.equal_possible());
        prop_assert_eq!(set.unequal_possible(), mirrored.unequal_possible());
    }

    /// Perfect (anti-)correlations at equal and opposite settings.
    #[test]
    fn perfect_correlations(s0 in unit_vec(), a in unit_vec(), p in ordered_params()) {
        prop_assume!(a.dot(&s0).abs() > 1e-9);
        let same = consistent_outcomes(&s0, &a, &a, &p);
        prop_assert!(!same.equal_possible(), "coincidence at equal settings: {:?}", same);
        prop_assert!(same.unequal_possible());
        let opposite = consistent_outcomes(&s0, &a, &(-a), &p);
        prop_assert!(opposite.equal_possible());
        prop_assert!(!opposite.unequal_possible(), "anti-coincidence at opposite settings");
    }

    /// As beta, gamma -> 0 the unique consistent outcome is the local
    /// model's (A, B) = (sgn<a,S0>, sgn<b,-S0>).
    #[test]
    fn local_limit_outcome(s0 in unit_vec(), a in unit_vec(), b in unit_vec()) {
        prop_assume!(a.dot(&s0).abs() > 1e-6 && b.dot(&s0).abs() > 1e-6);
        let eps = 1e-12;
        let p = ModelParams::new_unchecked(1.0 - 2.0 * eps, eps, eps).unwrap();
        let set = consistent_outcomes(&s0, &a, &b, &p);
        let expected = OutcomePair::new(
            measure_spin(&a, &s0),
            measure_spin(&b, &(-s0)),
        );
        prop_assert_eq!(set.members(), &[expected]);
    }

    #[test]
    fn bounds_are_ordered(angle in 95.0f64..175.0, nu in 0.01f64..0.45) {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(angle);
        let p = nu_params_unchecked(nu).unwrap();
        prop_assume!(p.beta() * a.dot(&b).abs() >= p.gamma());
        let bounds = probability_bounds(&a, &b, &p).unwrap();
        prop_assert!(bounds.p_min <= bounds.p_max);
        prop_assert!((0.0..=1.0).contains(&bounds.p_min));
        prop_assert!((0.0..=1.0).contains(&bounds.p_max));
        prop_assert!((bounds.median - 0.5 * (bounds.p_min + bounds.p_max)).abs() < 1e-12);
    }

    #[test]
    fn cap_overlap_closed_form_at_zero(d in -0.99f64..-0.01) {
        let q = cap_overlap_fraction(0.0, d).unwrap();
        prop_assert!((q - cap_overlap_closed_form_c0(d)).abs() < 1e-9);
    }

    /// Local Bell sum >= 1 for random coplanar triples, with equality
    /// when the angles close up to 360 degrees.
    #[test]
    fn local_bell_sum_at_least_one(a in 0.0f64..360.0, b in 0.0f64..360.0, c in 0.0f64..360.0) {
        let triple = BellTriple { a_deg: a, b_deg: b, c_deg: c };
        let local = |x: &UnitVec3, y: &UnitVec3| {
            local_anticoincidence(x.dot(y).clamp(-1.0, 1.0).acos().to_degrees())
        };
        let s = bell_sum(&triple, local).unwrap();
        prop_assert!(s >= 1.0 - 1e-9, "Bell sum {} below 1", s);
    }

    #[test]
    fn local_bell_sum_equality_closing_triples(a in 0.0f64..120.0, step in 100.0f64..130.0) {
        // pairwise acute angles all realized directly, a + b + c closing 360
        let triple = BellTriple { a_deg: a, b_deg: a + step, c_deg: a + 2.0 * step };
        let local = |x: &UnitVec3, y: &UnitVec3| {
            local_anticoincidence(x.dot(y).clamp(-1.0, 1.0).acos().to_degrees())
        };
        let s = bell_sum(&triple, local).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-9, "Bell sum {} at closing triple", s);
    }

    /// The local model respects the CHSH bound on coplanar settings.
    #[test]
    fn local_chsh_bound(
        a in 0.0f64..360.0,
        ap in 0.0f64..360.0,
        b in 0.0f64..360.0,
        bp in 0.0f64..360.0,
    ) {
        let local = |x: &UnitVec3, y: &UnitVec3| {
            local_anticoincidence(x.dot(y).clamp(-1.0, 1.0).acos().to_degrees())
        };
        let v = chsh_value(
            &UnitVec3::from_plane_angle_deg(a),
            &UnitVec3::from_plane_angle_deg(ap),
            &UnitVec3::from_plane_angle_deg(b),
            &UnitVec3::from_plane_angle_deg(bp),
            local,
        )
        .unwrap();
        prop_assert!(v.abs() <= 2.0 + 1e-9, "CHSH {} out of the classical range", v);
    }

    #[test]
    fn acute_angle_wraps(t in 0.0f64..720.0, u in 0.0f64..720.0) {
        let d = acute_angle_deg(t, u);
        prop_assert!((0.0..=180.0).contains(&d));
        prop_assert!((acute_angle_deg(u, t) - d).abs() < 1e-9);
    }
}

/// Emptiness of the consistent set is surfaced, not assumed away; in the
/// supported regime it should never occur.
#[test]
fn consistent_set_never_empty_in_regime() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
    let a = UnitVec3::from_plane_angle_deg(0.0);
    let b = UnitVec3::from_plane_angle_deg(120.0);
    let p = ModelParams::new(0.76, 0.2, 0.04).unwrap();
    for _ in 0..100_000 {
        let s0 = retrobell_core::sphere::sample_uniform(&mut rng);
        let set = consistent_outcomes(&s0, &a, &b, &p);
        assert!(!set.is_empty(), "empty consistent set at {s0:?}");
    }
}

#[test]
fn outcome_enum_is_two_valued() {
    assert_eq!(Outcome::Up.value(), 1.0);
    assert_eq!(Outcome::Down.value(), -1.0);
    assert_eq!(Outcome::Up.flip(), Outcome::Down);
}
