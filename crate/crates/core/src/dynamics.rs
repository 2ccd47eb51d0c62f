//! Numerical solution of the time-symmetric interaction law along particle
//! worldlines.
//!
//! The spin of each particle is driven toward the antipode of its partner's
//! spin at both the retarded and the advanced light-cone time,
//!
//!   dS_i/dt = κ [ D(S_i(t), −S_j(τ_ret)) + D(S_i(t), −S_j(τ_adv)) ].
//!
//! The advanced argument makes this a boundary-value rather than a Cauchy
//! problem, so candidate outcomes are seeded explicitly and solutions are
//! found by Picard iteration: each pass re-integrates against the previous
//! pass's trajectories. A converged trajectory only counts as a solution if
//! the outcome it realizes at the measurement event reproduces its seed.

use crate::error::{Error, Result};
use crate::outcome::{OutcomePair, Particle};
use crate::sphere::{measure_spin, project_spin, sphere_distance_vector, Outcome, UnitVec3};

/// Angular size of the deterministic perturbation applied when an
/// interaction target is exactly antipodal to the current spin.
const ANTIPODAL_NUDGE: f64 = 1e-8;

/// A piecewise-linear spacetime path (t, x) in 1+1 dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Worldline {
    verts: Vec<(f64, f64)>,
}

impl Worldline {
    /// Builds a worldline from (t, x) vertices with strictly increasing t
    /// and subluminal segments.
    pub fn from_vertices(verts: Vec<(f64, f64)>) -> Result<Self> {
        if verts.len() < 2 {
            return Err(Error::InvalidConfig(
                "worldline needs at least two vertices".into(),
            ));
        }
        for w in verts.windows(2) {
            let dt = w[1].0 - w[0].0;
            if dt <= 0.0 {
                return Err(Error::InvalidConfig(
                    "worldline times must be strictly increasing".into(),
                ));
            }
            if (w[1].1 - w[0].1).abs() >= dt {
                return Err(Error::InvalidConfig(
                    "worldline segment is not subluminal".into(),
                ));
            }
        }
        Ok(Worldline { verts })
    }

    /// Inertial flight from the origin at speed `v` in direction
    /// `direction` (±1), ending (absorption) at `t_end`.
    pub fn inertial(direction: f64, v: f64, t_end: f64) -> Result<Self> {
        Self::from_vertices(vec![(0.0, 0.0), (t_end, direction.signum() * v * t_end)])
    }

    pub fn t_start(&self) -> f64 {
        self.verts[0].0
    }

    pub fn t_end(&self) -> f64 {
        self.verts[self.verts.len() - 1].0
    }

    /// Spatial position at time `t`, if the worldline exists then.
    pub fn position(&self, t: f64) -> Option<f64> {
        if t < self.t_start() || t > self.t_end() {
            return None;
        }
        for w in self.verts.windows(2) {
            let (t0, x0) = w[0];
            let (t1, x1) = w[1];
            if t <= t1 {
                return Some(x0 + (x1 - x0) * (t - t0) / (t1 - t0));
            }
        }
        None
    }

    /// Retarded and advanced intersection times of this worldline's point
    /// at `t` with the light cones through `other`: the solutions τ < t and
    /// τ > t of (z_i(t) − z_j(τ))·(z_i(t) − z_j(τ)) = 0, restricted to
    /// `other`'s domain. Absent intersections (e.g. after absorption) are
    /// returned as `None`.
    pub fn light_cone_times(&self, t: f64, other: &Worldline) -> (Option<f64>, Option<f64>) {
        let Some(xi) = self.position(t) else {
            return (None, None);
        };
        let mut ret: Option<f64> = None;
        let mut adv: Option<f64> = None;
        for w in other.verts.windows(2) {
            let (t0, x0) = w[0];
            let (t1, x1) = w[1];
            let u = (x1 - x0) / (t1 - t0);
            // null condition per branch: t − τ = ±(xi − x_j(τ)), linear in τ
            for s in [1.0f64, -1.0] {
                let denom = s * u - 1.0;
                let tau = (s * (xi - x0 + u * t0) - t) / denom;
                if tau < t0 - 1e-12 || tau > t1 + 1e-12 {
                    continue;
                }
                let tau = tau.clamp(t0, t1);
                if tau < t - 1e-12 {
                    ret = Some(tau);
                } else if tau > t + 1e-12 {
                    adv = Some(tau);
                }
            }
        }
        (ret, adv)
    }
}

/// A spin trajectory on a uniform time grid t_k = k·h, with the projection
/// discontinuity at the measurement index.
#[derive(Clone, Debug)]
pub struct SpinTrajectory {
    h: f64,
    values: Vec<UnitVec3>,
    meas_idx: usize,
    /// Left limit S(T⁻) just before the measurement projection.
    pre_measurement: UnitVec3,
}

impl SpinTrajectory {
    /// Assembles a trajectory from raw samples (test fixtures and solver
    /// internals).
    pub fn from_samples(
        h: f64,
        values: Vec<UnitVec3>,
        meas_idx: usize,
        pre_measurement: UnitVec3,
    ) -> Self {
        SpinTrajectory {
            h,
            values,
            meas_idx,
            pre_measurement,
        }
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn samples(&self) -> &[UnitVec3] {
        &self.values
    }

    pub fn meas_idx(&self) -> usize {
        self.meas_idx
    }

    pub fn pre_measurement(&self) -> &UnitVec3 {
        &self.pre_measurement
    }

    pub fn t_end(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.h
    }

    /// Linear interpolation (renormalized) honoring the left limit at the
    /// measurement discontinuity; `None` outside the grid.
    pub fn sample(&self, t: f64) -> Option<UnitVec3> {
        if t < -1e-12 || t > self.t_end() + 1e-12 {
            return None;
        }
        let t = t.clamp(0.0, self.t_end());
        let pos = t / self.h;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        let left = self.values[i];
        let right = if i + 1 == self.meas_idx {
            self.pre_measurement
        } else {
            self.values[i + 1]
        };
        lerp_unit(&left, &right, frac)
    }
}

fn lerp_unit(a: &UnitVec3, b: &UnitVec3, frac: f64) -> Option<UnitVec3> {
    let x = a.x() + frac * (b.x() - a.x());
    let y = a.y() + frac * (b.y() - a.y());
    let z = a.z() + frac * (b.z() - a.z());
    UnitVec3::normalize(x, y, z).ok()
}

/// Full specification of one simulated EPRB run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Source-to-detector distance in light-units.
    pub length: f64,
    /// Particle speed as a fraction of c.
    pub speed: f64,
    /// Post-measurement flight time before absorption.
    pub delta: f64,
    /// Coupling constant of the interaction law.
    pub kappa: f64,
    /// Grid step.
    pub h: f64,
    pub a: UnitVec3,
    pub b: UnitVec3,
    pub s0: UnitVec3,
    /// Initial spin of particle B; `None` means the singlet value −S₀.
    pub s0_b: Option<UnitVec3>,
    pub seed_outcome: OutcomePair,
    pub max_picard_iters: usize,
    pub picard_tol: f64,
}

impl ExperimentConfig {
    /// Default kinematics: symmetric recession at v = 0.5 toward detectors
    /// at ±1 light-unit, absorption 0.3 after measurement.
    pub fn new(a: UnitVec3, b: UnitVec3, s0: UnitVec3, seed_outcome: OutcomePair) -> Self {
        ExperimentConfig {
            length: 1.0,
            speed: 0.5,
            delta: 0.3,
            kappa: 1.0,
            h: 0.005,
            a,
            b,
            s0,
            s0_b: None,
            seed_outcome,
            max_picard_iters: 60,
            picard_tol: 1e-10,
        }
    }

    /// Lab-frame measurement time T = L/v.
    pub fn measurement_time(&self) -> f64 {
        self.length / self.speed
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 0.0 && self.speed < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "speed must lie in (0, 1), got {}",
                self.speed
            )));
        }
        if self.length <= 0.0 || self.delta <= 0.0 {
            return Err(Error::InvalidConfig(
                "length and delta must be positive".into(),
            ));
        }
        if !(self.h > 0.0 && self.h < self.delta / 10.0) {
            return Err(Error::InvalidConfig(format!(
                "grid step must satisfy 0 < h < delta/10, got h = {}, delta = {}",
                self.h, self.delta
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidConfig("kappa must be non-negative".into()));
        }
        if self.max_picard_iters == 0 || self.picard_tol <= 0.0 {
            return Err(Error::InvalidConfig(
                "need max_picard_iters >= 1 and picard_tol > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn worldlines(&self) -> Result<(Worldline, Worldline)> {
        let t_end = self.measurement_time() + self.delta;
        Ok((
            Worldline::inertial(1.0, self.speed, t_end)?,
            Worldline::inertial(-1.0, self.speed, t_end)?,
        ))
    }

    fn initial_spin_b(&self) -> UnitVec3 {
        self.s0_b.unwrap_or(-self.s0)
    }

    fn grid(&self) -> (usize, usize) {
        let t_end = self.measurement_time() + self.delta;
        let n = ((t_end / self.h) + 1e-9).floor() as usize;
        let meas_idx = (self.measurement_time() / self.h).round() as usize;
        (n, meas_idx)
    }
}

/// A converged self-consistent solution.
#[derive(Clone, Debug)]
pub struct TimeSymmetricSolution {
    pub traj_a: SpinTrajectory,
    pub traj_b: SpinTrajectory,
    pub realized: OutcomePair,
    pub converged: bool,
    pub residual: f64,
    pub picard_iters: usize,
}

/// Drift κ·Σ D(S, −source); exactly antipodal targets are perturbed by
/// 1e-8 radians toward a fixed orthogonal direction.
fn drift(s: &UnitVec3, kappa: f64, sources: &[UnitVec3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for src in sources {
        let target = -*src;
        let d = match sphere_distance_vector(s, &target) {
            Ok(d) => d,
            Err(_) => {
                let orth = s.any_orthogonal();
                let nudged = UnitVec3::normalize(
                    target.x() + ANTIPODAL_NUDGE * orth.x(),
                    target.y() + ANTIPODAL_NUDGE * orth.y(),
                    target.z() + ANTIPODAL_NUDGE * orth.z(),
                )
                .expect("nudged target is non-zero");
                sphere_distance_vector(s, &nudged).expect("nudged target is not antipodal")
            }
        };
        out[0] += kappa * d.components[0];
        out[1] += kappa * d.components[1];
        out[2] += kappa * d.components[2];
    }
    out
}

fn euler_combine(s: &UnitVec3, k: &[f64; 3], h: f64) -> Result<UnitVec3> {
    UnitVec3::normalize(s.x() + h * k[0], s.y() + h * k[1], s.z() + h * k[2])
}

/// Flat-extending partial interpolation used while a pass is still being
/// built (the retarded time can peek marginally past the last computed
/// sample at midpoint stages).
fn sample_partial(values: &[UnitVec3], h: f64, t: f64) -> Option<UnitVec3> {
    if t < -1e-12 {
        return None;
    }
    let t = t.max(0.0);
    let pos = t / h;
    let i = pos.floor() as usize;
    if i + 1 >= values.len() {
        return values.last().copied();
    }
    lerp_unit(&values[i], &values[i + 1], pos - i as f64)
}

enum ProjectionRule {
    /// Projective collapse onto the measured axis with the realized sign.
    Measured,
    /// Projection forced to the seeded outcome (Picard boundary data).
    Forced(OutcomePair),
}

struct Pass {
    traj_a: SpinTrajectory,
    traj_b: SpinTrajectory,
}

/// One forward pass. `prev` supplies the frozen previous-iteration
/// trajectories for source evaluation; when absent, the pass is
/// retarded-only and reads the partner history being built concurrently.
fn integrate_pass(
    config: &ExperimentConfig,
    prev: Option<&Pass>,
    projection: &ProjectionRule,
) -> Result<Pass> {
    let (n, meas_idx) = config.grid();
    if meas_idx == 0 || meas_idx >= n {
        return Err(Error::InvalidConfig(
            "measurement index must fall inside the grid".into(),
        ));
    }
    let (wl_a, wl_b) = config.worldlines()?;
    let h = config.h;
    let kappa = config.kappa;

    let mut vals_a: Vec<UnitVec3> = Vec::with_capacity(n + 1);
    let mut vals_b: Vec<UnitVec3> = Vec::with_capacity(n + 1);
    vals_a.push(config.s0);
    vals_b.push(config.initial_spin_b());
    let mut pre_a = config.s0;
    let mut pre_b = config.initial_spin_b();

    // partner source spins feeding particle `which` at time t
    let sources = |t: f64, which: Particle, vals_a: &[UnitVec3], vals_b: &[UnitVec3]| {
        let (own_wl, other_wl) = match which {
            Particle::ASide => (&wl_a, &wl_b),
            Particle::BSide => (&wl_b, &wl_a),
        };
        let (tau_ret, tau_adv) = own_wl.light_cone_times(t, other_wl);
        let mut out: Vec<UnitVec3> = Vec::with_capacity(2);
        let lookup = |tau: f64| -> Option<UnitVec3> {
            match prev {
                Some(pass) => match which {
                    Particle::ASide => pass.traj_b.sample(tau),
                    Particle::BSide => pass.traj_a.sample(tau),
                },
                None => match which {
                    Particle::ASide => sample_partial(vals_b, h, tau),
                    Particle::BSide => sample_partial(vals_a, h, tau),
                },
            }
        };
        if let Some(tau) = tau_ret {
            if let Some(s) = lookup(tau) {
                out.push(s);
            }
        }
        // advanced term only once previous-iteration data exists
        if prev.is_some() {
            if let Some(tau) = tau_adv {
                if let Some(s) = lookup(tau) {
                    out.push(s);
                }
            }
        }
        out
    };

    for k in 0..n {
        let t = k as f64 * h;
        // explicit midpoint with renormalization at each stage
        let step_one = |s: &UnitVec3,
                        which: Particle,
                        vals_a: &[UnitVec3],
                        vals_b: &[UnitVec3]|
         -> Result<UnitVec3> {
            let k1 = drift(s, kappa, &sources(t, which, vals_a, vals_b));
            let s_half = euler_combine(s, &k1, 0.5 * h)?;
            let k2 = drift(&s_half, kappa, &sources(t + 0.5 * h, which, vals_a, vals_b));
            euler_combine(s, &k2, h)
        };
        let next_a = step_one(&vals_a[k], Particle::ASide, &vals_a, &vals_b)?;
        let next_b = step_one(&vals_b[k], Particle::BSide, &vals_a, &vals_b)?;

        if k + 1 == meas_idx {
            pre_a = next_a;
            pre_b = next_b;
            let (proj_a, proj_b) = match projection {
                ProjectionRule::Measured => {
                    (project_spin(&config.a, &next_a), project_spin(&config.b, &next_b))
                }
                ProjectionRule::Forced(seed) => (
                    signed_axis(&config.a, seed.a),
                    signed_axis(&config.b, seed.b),
                ),
            };
            vals_a.push(proj_a);
            vals_b.push(proj_b);
        } else {
            vals_a.push(next_a);
            vals_b.push(next_b);
        }
    }

    Ok(Pass {
        traj_a: SpinTrajectory::from_samples(h, vals_a, meas_idx, pre_a),
        traj_b: SpinTrajectory::from_samples(h, vals_b, meas_idx, pre_b),
    })
}

fn signed_axis(axis: &UnitVec3, outcome: Outcome) -> UnitVec3 {
    match outcome {
        Outcome::Up => *axis,
        Outcome::Down => -*axis,
    }
}

fn pass_distance(a: &Pass, b: &Pass) -> f64 {
    let pair = |x: &SpinTrajectory, y: &SpinTrajectory| {
        x.samples()
            .iter()
            .zip(y.samples())
            .map(|(p, q)| {
                let dx = p.x() - q.x();
                let dy = p.y() - q.y();
                let dz = p.z() - q.z();
                (dx * dx + dy * dy + dz * dz).sqrt()
            })
            .fold(0.0f64, f64::max)
    };
    pair(&a.traj_a, &b.traj_a).max(pair(&a.traj_b, &b.traj_b))
}

/// Integrates the purely retarded dynamics (no advanced term), with the
/// ordinary projective collapse at the measurement event. For singlet initial
/// data the pre-measurement trajectory is a stationary point.
pub fn integrate_retarded_only(
    config: &ExperimentConfig,
) -> Result<(SpinTrajectory, SpinTrajectory)> {
    config.validate()?;
    let pass = integrate_pass(config, None, &ProjectionRule::Measured)?;
    Ok((pass.traj_a, pass.traj_b))
}

/// Solves the full retarded + advanced system by outcome-seeded Picard
/// iteration. Iteration 0 is the retarded-only flow with the projection
/// forced to the seed; each following iteration re-integrates both light
/// cone source terms against the previous pass. Convergence requires the
/// sup-norm change to fall below `picard_tol` *and* the realized outcome
/// at the measurement event to reproduce the seed.
pub fn solve_time_symmetric(config: &ExperimentConfig) -> Result<TimeSymmetricSolution> {
    config.validate()?;
    let seed = config.seed_outcome;
    let projection = ProjectionRule::Forced(seed);
    let mut prev = integrate_pass(config, None, &projection)?;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut iters = 0;
    for k in 1..=config.max_picard_iters {
        let next = integrate_pass(config, Some(&prev), &projection)?;
        residual = pass_distance(&next, &prev);
        prev = next;
        iters = k;
        if residual <= config.picard_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iters, residual });
    }
    let realized = OutcomePair::new(
        measure_spin(&config.a, prev.traj_a.pre_measurement()),
        measure_spin(&config.b, prev.traj_b.pre_measurement()),
    );
    if realized != seed {
        return Err(Error::SeedInconsistent {
            realized_a: realized.a.sign(),
            realized_b: realized.b.sign(),
        });
    }
    Ok(TimeSymmetricSolution {
        traj_a: prev.traj_a,
        traj_b: prev.traj_b,
        realized,
        converged: true,
        residual,
        picard_iters: iters,
    })
}

/// Effective convex weights fitted from a converged solution.
#[derive(Clone, Copy, Debug)]
pub struct FittedWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Norm of the decomposition residual before weight normalization.
    pub residual: f64,
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Result<[f64; 3]> {
    let det = |c0: &[f64; 3], c1: &[f64; 3], c2: &[f64; 3]| {
        c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1])
            + c2[0] * (c0[1] * c1[2] - c0[2] * c1[1])
    };
    let d = det(&m[0], &m[1], &m[2]);
    if d.abs() < 1e-10 {
        return Err(Error::DegenerateBasis { det: d });
    }
    Ok([
        det(rhs, &m[1], &m[2]) / d,
        det(&m[0], rhs, &m[2]) / d,
        det(&m[0], &m[1], rhs) / d,
    ])
}

fn basis_a(config: &ExperimentConfig) -> [UnitVec3; 3] {
    let seed = config.seed_outcome;
    [
        config.s0,
        -signed_axis(&config.b, seed.b),
        signed_axis(&config.a, seed.a),
    ]
}

fn basis_b(config: &ExperimentConfig) -> [UnitVec3; 3] {
    let seed = config.seed_outcome;
    [
        -config.s0,
        signed_axis(&config.b, seed.b),
        -signed_axis(&config.a, seed.a),
    ]
}

/// Decomposes the pre-measurement spin S_A(T⁻) over {S₀, −B·b, A·a} and
/// normalizes the coefficients to sum 1, grounding the algebraic
/// (α, β, γ) ansatz in the simulated dynamics.
pub fn extract_alpha_beta_gamma(
    sol: &TimeSymmetricSolution,
    config: &ExperimentConfig,
) -> Result<FittedWeights> {
    let basis = basis_a(config);
    let m = [
        basis[0].components(),
        basis[1].components(),
        basis[2].components(),
    ];
    let target = sol.traj_a.pre_measurement().components();
    let coeffs = solve3(&m, &target)?;
    let fitted = [
        m[0][0] * coeffs[0] + m[1][0] * coeffs[1] + m[2][0] * coeffs[2],
        m[0][1] * coeffs[0] + m[1][1] * coeffs[1] + m[2][1] * coeffs[2],
        m[0][2] * coeffs[0] + m[1][2] * coeffs[1] + m[2][2] * coeffs[2],
    ];
    let residual = ((fitted[0] - target[0]).powi(2)
        + (fitted[1] - target[1]).powi(2)
        + (fitted[2] - target[2]).powi(2))
    .sqrt();
    let sum = coeffs[0] + coeffs[1] + coeffs[2];
    if sum.abs() < 1e-12 {
        return Err(Error::DegenerateBasis { det: sum });
    }
    Ok(FittedWeights {
        alpha: coeffs[0] / sum,
        beta: coeffs[1] / sum,
        gamma: coeffs[2] / sum,
        residual,
    })
}

/// Per-particle report of the spherical-triangle invariant check.
#[derive(Clone, Copy, Debug)]
pub struct TriangleReport {
    /// Worst excursion outside the triangle, in radians.
    pub max_violation_a: f64,
    pub max_violation_b: f64,
    /// Grid samples violating the tolerance, both particles combined.
    pub samples_above_tol: usize,
    pub tol: f64,
}

/// Angular tolerance of the triangle containment check.
pub const TRIANGLE_TOL: f64 = 1e-6;

fn triangle_violation(p: &UnitVec3, verts: &[UnitVec3; 3]) -> Result<f64> {
    let m = [
        verts[0].components(),
        verts[1].components(),
        verts[2].components(),
    ];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[1][0] * (m[0][1] * m[2][2] - m[0][2] * m[2][1])
        + m[2][0] * (m[0][1] * m[1][2] - m[0][2] * m[1][1]);
    if det.abs() < 1e-10 {
        return Err(Error::DegenerateBasis { det });
    }
    let mut worst = 0.0f64;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let n = verts[i].cross(&verts[j]);
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let mut n = [n[0] / norm, n[1] / norm, n[2] / norm];
        let vk = verts[k].components();
        if n[0] * vk[0] + n[1] * vk[1] + n[2] * vk[2] < 0.0 {
            n = [-n[0], -n[1], -n[2]];
        }
        let margin = n[0] * p.x() + n[1] * p.y() + n[2] * p.z();
        if margin < 0.0 {
            worst = worst.max((-margin).clamp(0.0, 1.0).asin());
        }
    }
    Ok(worst)
}

/// Verifies that every grid sample of S_A lies in the closed spherical
/// triangle spanned by {S₀, −B·b, A·a} (and S_B in the antipodal
/// triangle), reporting the worst excursion.
pub fn check_invariant_triangle(
    sol: &TimeSymmetricSolution,
    config: &ExperimentConfig,
) -> Result<TriangleReport> {
    let va = basis_a(config);
    let vb = basis_b(config);
    let mut max_a = 0.0f64;
    let mut max_b = 0.0f64;
    let mut above = 0usize;
    for p in sol.traj_a.samples() {
        let v = triangle_violation(p, &va)?;
        max_a = max_a.max(v);
        if v > TRIANGLE_TOL {
            above += 1;
        }
    }
    for p in sol.traj_b.samples() {
        let v = triangle_violation(p, &vb)?;
        max_b = max_b.max(v);
        if v > TRIANGLE_TOL {
            above += 1;
        }
    }
    Ok(TriangleReport {
        max_violation_a: max_a,
        max_violation_b: max_b,
        samples_above_tol: above,
        tol: TRIANGLE_TOL,
    })
}
