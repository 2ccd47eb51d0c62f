//! Coincidence statistics: closed forms, singular-endpoint quadrature,
//! Monte Carlo estimation, Bell/CHSH evaluation, parameter sweeps, and the
//! screening-off (parameter-dependence) check.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::outcome::{consistent_outcomes, resolve_sfp, ModelParams, SfpPolicy};
use crate::sphere::{sample_cap, sample_uniform, Outcome, UnitVec3};

/// Absolute tolerance of the spherical-cap overlap quadrature. Chosen to
/// dominate all downstream 1e-6-level comparisons.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// (P_min, P_max, median) of the anti-coincidence probability for one
/// (a, b, params) configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbabilityBounds {
    pub p_min: f64,
    pub p_max: f64,
    pub median: f64,
}

impl ProbabilityBounds {
    fn new(p_min: f64, p_max: f64) -> Self {
        ProbabilityBounds {
            p_min,
            p_max,
            median: 0.5 * (p_min + p_max),
        }
    }
}

/// Anti-coincidence probability of the purely retarded (local) reference
/// model: P(A≠B | a,b) = 1 − 2∠a,b/360°, with the angle in degrees.
pub fn local_anticoincidence(angle_deg: f64) -> Result<f64> {
    if !(0.0..=180.0).contains(&angle_deg) {
        return Err(Error::OutOfRange(format!(
            "angle must lie in [0, 180] degrees, got {angle_deg}"
        )));
    }
    Ok(1.0 - 2.0 * angle_deg / 360.0)
}

/// Quantum-mechanical singlet prediction P(A≠B | a,b) = ½ + ½⟨a,b⟩,
/// implemented as a reference curve.
pub fn qm_anticoincidence(a: &UnitVec3, b: &UnitVec3) -> f64 {
    0.5 + 0.5 * a.dot(b)
}

/// Acute angle between two coplanar settings given in degrees, in [0, 180].
pub fn acute_angle_deg(t1_deg: f64, t2_deg: f64) -> f64 {
    let d = (t1_deg - t2_deg).abs() % 360.0;
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

/// Adaptive Simpson quadrature on a smooth integrand.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 50)
}

/// Normalized area of the double-cap overlap
///
///   |S²|⁻¹ |{S ∈ S²: ⟨a,S⟩ > C ∧ ⟨b,S⟩ > C}|
///     = (1/π) ∫_C^D √((z²−C²)/(z²−z⁴)) dz,   D = √(½(1+⟨a,b⟩)),
///
/// derived for C ≥ 0 and ⟨a,b⟩ ∈ (−1, 0). The endpoint singularity at
/// z = C is removed by the substitution z² = C² + (D²−C²) sin²t, after
/// which the integrand is smooth and adaptive Simpson reaches well below
/// the required 1e-9 absolute error.
pub fn cap_overlap_fraction(c: f64, dot_ab: f64) -> Result<f64> {
    if !(dot_ab > -1.0 && dot_ab < 0.0) {
        return Err(Error::DomainError(format!(
            "dot(a,b) must lie in (-1, 0), got {dot_ab}"
        )));
    }
    if c < 0.0 {
        return Err(Error::DomainError(format!(
            "C < 0 is outside the derived regime, got C = {c}"
        )));
    }
    let d = (0.5 * (1.0 + dot_ab)).sqrt();
    if c >= d {
        return Ok(0.0);
    }
    let c2 = c * c;
    let d2 = d * d;
    let span = d2 - c2;
    let half = span.sqrt();
    // transformed integrand: sqrt(D²−C²) · (z²−C²) · cos t / (z² sqrt(1−z²))
    let f = move |t: f64| {
        let s = t.sin();
        let z2 = c2 + span * s * s;
        if z2 <= 0.0 {
            // only reachable at t = 0 with C = 0; limit value is D
            return half;
        }
        half * (z2 - c2) * t.cos() / (z2 * (1.0 - z2).sqrt())
    };
    let integral = adaptive_simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, QUADRATURE_TOL);
    Ok(integral / std::f64::consts::PI)
}

/// Closed form of `cap_overlap_fraction` at C = 0: (π − arccos d)/(2π).
/// Independent oracle, kept separate from the quadrature path.
pub fn cap_overlap_closed_form_c0(dot_ab: f64) -> f64 {
    (std::f64::consts::PI - dot_ab.acos()) / (2.0 * std::f64::consts::PI)
}

fn regime_check(dot: f64, p: &ModelParams) -> Result<()> {
    if dot >= 0.0 {
        return Err(Error::RegimeViolation(format!(
            "bounds require dot(a,b) < 0, got {dot}"
        )));
    }
    if p.beta() * dot.abs() < p.gamma() {
        return Err(Error::RegimeViolation(format!(
            "bounds require beta*|dot(a,b)| >= gamma, got beta = {}, |dot| = {}, gamma = {}",
            p.beta(),
            dot.abs(),
            p.gamma()
        )));
    }
    Ok(())
}

/// Upper and lower bounds of P(A≠B | a,b), obtained by resolving every
/// self-fulfilling prophecy toward the anti-coincidence (max) or the
/// coincidence (min):
///
///   P_max = 2 · |{⟨a,S₀⟩ > (β|⟨a,b⟩|−γ)/α ∧ ⟨b,S₀⟩ > (β|⟨a,b⟩|−γ)/α}| / |S²|
///   P_min = 2 · same with (β|⟨a,b⟩|+γ)/α.
///
/// The factor 2 accounts for the mirrored case with both projections
/// negative.
pub fn probability_bounds(a: &UnitVec3, b: &UnitVec3, p: &ModelParams) -> Result<ProbabilityBounds> {
    let dot = a.dot(b);
    regime_check(dot, p)?;
    if dot <= -1.0 + 1e-12 {
        // exactly opposite settings force the coincidence
        return Ok(ProbabilityBounds::new(0.0, 0.0));
    }
    let th = p.beta() * dot.abs();
    let c_max = (th - p.gamma()) / p.alpha();
    let c_min = (th + p.gamma()) / p.alpha();
    let p_max = 2.0 * cap_overlap_fraction(c_max, dot)?;
    let p_min = 2.0 * cap_overlap_fraction(c_min, dot)?;
    Ok(ProbabilityBounds::new(p_min, p_max))
}

/// A Monte Carlo anti-coincidence estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    /// Frequency of A ≠ B.
    pub p_hat: f64,
    /// Binomial standard error √(p̂(1−p̂)/n).
    pub stderr: f64,
    pub n: u64,
    /// Runs whose consistent set contained both outcome classes.
    pub ambiguous: u64,
}

/// Samples S₀ uniformly `n` times, enumerates the consistent outcomes,
/// resolves each run under `policy`, and returns the anti-coincidence
/// frequency with its binomial standard error.
pub fn monte_carlo_anticoincidence<R: Rng + ?Sized>(
    a: &UnitVec3,
    b: &UnitVec3,
    p: &ModelParams,
    policy: SfpPolicy,
    n: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be >= 1".into()));
    }
    let mut unequal = 0u64;
    let mut ambiguous = 0u64;
    for _ in 0..n {
        let s0 = sample_uniform(rng);
        let set = consistent_outcomes(&s0, a, b, p);
        if set.is_ambiguous() {
            ambiguous += 1;
        }
        let pair = resolve_sfp(&set, policy, rng)?;
        if !pair.is_equal() {
            unequal += 1;
        }
    }
    let p_hat = unequal as f64 / n as f64;
    let stderr = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
    Ok(McEstimate {
        p_hat,
        stderr,
        n,
        ambiguous,
    })
}

/// Three coplanar settings, as angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellTriple {
    pub a_deg: f64,
    pub b_deg: f64,
    pub c_deg: f64,
}

impl BellTriple {
    pub fn vectors(&self) -> (UnitVec3, UnitVec3, UnitVec3) {
        (
            UnitVec3::from_plane_angle_deg(self.a_deg),
            UnitVec3::from_plane_angle_deg(self.b_deg),
            UnitVec3::from_plane_angle_deg(self.c_deg),
        )
    }
}

/// Three-term Bell sum P(A≠B|a,b) + P(A≠B|b,c) + P(A≠B|a,c) against an
/// arbitrary pairwise anti-coincidence oracle; local common-cause models
/// keep it ≥ 1.
pub fn bell_sum<F>(triple: &BellTriple, prob_fn: F) -> Result<f64>
where
    F: Fn(&UnitVec3, &UnitVec3) -> Result<f64>,
{
    let (a, b, c) = triple.vectors();
    Ok(prob_fn(&a, &b)? + prob_fn(&b, &c)? + prob_fn(&a, &c)?)
}

/// CHSH combination E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′) with the
/// correlator E = 1 − 2·P(A≠B).
pub fn chsh_value<F>(
    a: &UnitVec3,
    a_prime: &UnitVec3,
    b: &UnitVec3,
    b_prime: &UnitVec3,
    prob_fn: F,
) -> Result<f64>
where
    F: Fn(&UnitVec3, &UnitVec3) -> Result<f64>,
{
    let e = |x: &UnitVec3, y: &UnitVec3| -> Result<f64> { Ok(1.0 - 2.0 * prob_fn(x, y)?) };
    Ok(e(a, b)? + e(a, b_prime)? + e(a_prime, b)? - e(a_prime, b_prime)?)
}

/// Single-strength parametrization of the advanced effects:
/// β = ν, γ = ν² (preinforcement is second order), α = 1 − ν − ν².
/// Checked variant: enforces the default ordering α > β > γ.
pub fn nu_params(nu: f64) -> Result<ModelParams> {
    let (alpha, beta, gamma) = nu_weights(nu)?;
    ModelParams::new(alpha, beta, gamma)
}

/// Unchecked variant for sweeps; admits the degenerate local limit ν = 0.
pub fn nu_params_unchecked(nu: f64) -> Result<ModelParams> {
    let (alpha, beta, gamma) = nu_weights(nu)?;
    ModelParams::new_unchecked(alpha, beta, gamma)
}

fn nu_weights(nu: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::OutOfRange(format!("nu must lie in [0, 1), got {nu}")));
    }
    let alpha = 1.0 - nu - nu * nu;
    if alpha <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "1 - nu - nu^2 must be positive, got {alpha} at nu = {nu}"
        )));
    }
    Ok((alpha, nu, nu * nu))
}

/// How a sweep row was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// One grid point of a parameter sweep. Rows outside the supported regime
/// carry `regime_ok = false` and empty probability fields.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub nu: Option<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub angle_deg: f64,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub median: Option<f64>,
    pub method: Method,
    pub n_samples: u64,
    pub stderr: f64,
    pub regime_ok: bool,
}

fn bounds_row(
    nu: Option<f64>,
    beta: f64,
    gamma: f64,
    angle_deg: f64,
    bounds: Option<ProbabilityBounds>,
) -> SweepRow {
    SweepRow {
        nu,
        beta,
        gamma,
        angle_deg,
        p_min: bounds.map(|b| b.p_min),
        p_max: bounds.map(|b| b.p_max),
        median: bounds.map(|b| b.median),
        method: Method::Quadrature,
        n_samples: 0,
        stderr: 0.0,
        regime_ok: bounds.is_some(),
    }
}

/// Sweep of the ν-parametrized bounds at a fixed setting angle.
pub fn sweep_nu(nu_grid: &[f64], angle_deg: f64) -> Vec<SweepRow> {
    let a = UnitVec3::from_plane_angle_deg(0.0);
    let b = UnitVec3::from_plane_angle_deg(angle_deg);
    nu_grid
        .iter()
        .map(|&nu| match nu_params_unchecked(nu) {
            Ok(p) => {
                let bounds = probability_bounds(&a, &b, &p).ok();
                bounds_row(Some(nu), p.beta(), p.gamma(), angle_deg, bounds)
            }
            Err(_) => bounds_row(Some(nu), nu, nu * nu, angle_deg, None),
        })
        .collect()
}

/// Sweep with β and γ varying independently (row-major over the β grid).
pub fn sweep_beta_gamma(beta_grid: &[f64], gamma_grid: &[f64], angle_deg: f64) -> Vec<SweepRow> {
    let a = UnitVec3::from_plane_angle_deg(0.0);
    let b = UnitVec3::from_plane_angle_deg(angle_deg);
    let mut rows = Vec::with_capacity(beta_grid.len() * gamma_grid.len());
    for &beta in beta_grid {
        for &gamma in gamma_grid {
            let alpha = 1.0 - beta - gamma;
            let bounds = if alpha > 0.0 {
                ModelParams::new_unchecked(alpha, beta, gamma)
                    .ok()
                    .and_then(|p| probability_bounds(&a, &b, &p).ok())
            } else {
                None
            };
            rows.push(bounds_row(None, beta, gamma, angle_deg, bounds));
        }
    }
    rows
}

/// A small solid-angle bin around a fixed initial spin, used for the
/// screening-off analysis.
#[derive(Clone, Copy, Debug)]
pub struct CapBin {
    pub center: UnitVec3,
    pub radius_rad: f64,
}

/// Conditional outcome frequency for one distant-setting variant.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScreeningRow {
    pub variant: usize,
    pub p_a_plus: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Pairwise z-score between two variants' conditional frequencies.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZScore {
    pub variant_i: usize,
    pub variant_j: usize,
    pub z: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScreeningReport {
    pub rows: Vec<ScreeningRow>,
    pub z_scores: Vec<ZScore>,
}

/// Estimates P(A = +1 | a, b, S₀ ∈ bin) for each distant setting in
/// `b_variants`, with S₀ drawn uniformly from the bin. A significant
/// difference across variants exhibits the violation of
/// parameter-independence when conditioning on S₀ alone.
pub fn screening_analysis<R: Rng + ?Sized>(
    a: &UnitVec3,
    b_variants: &[UnitVec3],
    p: &ModelParams,
    policy: SfpPolicy,
    bin: &CapBin,
    n: u64,
    rng: &mut R,
) -> Result<ScreeningReport> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be >= 1".into()));
    }
    if bin.radius_rad <= 0.0 {
        return Err(Error::EmptyBin);
    }
    let mut rows = Vec::with_capacity(b_variants.len());
    for (idx, b) in b_variants.iter().enumerate() {
        let mut plus = 0u64;
        for _ in 0..n {
            let s0 = sample_cap(&bin.center, bin.radius_rad, rng);
            let set = consistent_outcomes(&s0, a, b, p);
            let pair = resolve_sfp(&set, policy, rng)?;
            if pair.a == Outcome::Up {
                plus += 1;
            }
        }
        let p_hat = plus as f64 / n as f64;
        rows.push(ScreeningRow {
            variant: idx,
            p_a_plus: p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            n,
        });
    }
    let mut z_scores = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (pi, pj) = (rows[i].p_a_plus, rows[j].p_a_plus);
            let var = rows[i].stderr.powi(2) + rows[j].stderr.powi(2);
            let z = if var > 0.0 {
                (pi - pj).abs() / var.sqrt()
            } else if pi == pj {
                0.0
            } else {
                f64::INFINITY
            };
            z_scores.push(ZScore {
                variant_i: i,
                variant_j: j,
                z,
            });
        }
    }
    Ok(ScreeningReport { rows, z_scores })
}

/// Per-grid-point seed derivation (splitmix64 over master seed and index),
/// so parallel or reordered evaluation cannot change any stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut x = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn local_examples() {
        assert_eq!(local_anticoincidence(0.0).unwrap(), 1.0);
        assert!((local_anticoincidence(120.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(local_anticoincidence(180.0).unwrap(), 0.0);
        assert_eq!(local_anticoincidence(90.0).unwrap(), 0.5);
        assert!(local_anticoincidence(-1.0).is_err());
        assert!(local_anticoincidence(181.0).is_err());
    }

    #[test]
    fn qm_examples() {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(120.0);
        assert!((qm_anticoincidence(&a, &b) - 0.25).abs() < 1e-12);
        assert!((qm_anticoincidence(&a, &a) - 1.0).abs() < 1e-15);
        assert!(qm_anticoincidence(&a, &(-a)).abs() < 1e-15);
    }

    #[test]
    fn cap_overlap_at_c0_closed_form() {
        let f = cap_overlap_fraction(0.0, -0.5).unwrap();
        assert!((f - 1.0 / 6.0).abs() < 1e-9, "f = {f}");
    }

    #[test]
    fn cap_overlap_empty_set() {
        // D = 0.5 at dot = -0.5, so C = 0.6 exceeds it
        assert_eq!(cap_overlap_fraction(0.6, -0.5).unwrap(), 0.0);
    }

    #[test]
    fn cap_overlap_domain_errors() {
        assert!(cap_overlap_fraction(-0.1, -0.5).is_err());
        assert!(cap_overlap_fraction(0.1, 0.5).is_err());
        assert!(cap_overlap_fraction(0.1, -1.0).is_err());
    }

    #[test]
    fn cap_overlap_monte_carlo_oracle() {
        // C = 0.1, dot = -0.5 against a direct sphere-sampling frequency
        let frac = cap_overlap_fraction(0.1, -0.5).unwrap();
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(120.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000u64;
        let mut hits = 0u64;
        for _ in 0..n {
            let s = sample_uniform(&mut rng);
            if a.dot(&s) > 0.1 && b.dot(&s) > 0.1 {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / n as f64;
        let se = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
        assert!((frac - p_hat).abs() < 4.0 * se, "frac = {frac}, mc = {p_hat}");
    }

    #[test]
    fn bounds_nu_zero_local_limit() {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(120.0);
        let p = nu_params_unchecked(0.0).unwrap();
        let bounds = probability_bounds(&a, &b, &p).unwrap();
        assert!((bounds.p_min - 1.0 / 3.0).abs() < 1e-9);
        assert!((bounds.p_max - 1.0 / 3.0).abs() < 1e-9);
        assert!((bounds.median - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_nu_02_below_local() {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(120.0);
        let p = nu_params(0.2).unwrap();
        let bounds = probability_bounds(&a, &b, &p).unwrap();
        assert!(bounds.p_max < 1.0 / 3.0);
        assert!(bounds.p_min < bounds.p_max);
    }

    #[test]
    fn bounds_regime_violation() {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(60.0);
        let p = nu_params(0.2).unwrap();
        assert!(matches!(
            probability_bounds(&a, &b, &p),
            Err(Error::RegimeViolation(_))
        ));
        // gamma exceeding beta*|dot| also rejected
        let b = UnitVec3::from_plane_angle_deg(120.0);
        let p = ModelParams::new_unchecked(0.5, 0.2, 0.3).unwrap();
        assert!(matches!(
            probability_bounds(&a, &b, &p),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn bounds_opposite_settings() {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(180.0);
        let p = nu_params(0.2).unwrap();
        let bounds = probability_bounds(&a, &b, &p).unwrap();
        assert_eq!(bounds.p_min, 0.0);
        assert_eq!(bounds.p_max, 0.0);
    }

    #[test]
    fn nu_params_examples() {
        let p = nu_params(0.2).unwrap();
        assert!((p.alpha() - 0.76).abs() < 1e-15);
        assert!((p.beta() - 0.2).abs() < 1e-15);
        assert!((p.gamma() - 0.04).abs() < 1e-15);
        // nu = 0 only unchecked
        assert!(nu_params(0.0).is_err());
        let p = nu_params_unchecked(0.0).unwrap();
        assert_eq!((p.alpha(), p.beta(), p.gamma()), (1.0, 0.0, 0.0));
        // nu = 0.5 violates alpha > beta in the checked constructor
        assert!(nu_params(0.5).is_err());
        assert!(nu_params_unchecked(0.5).is_ok());
        // positivity limit around nu ~ 0.618
        assert!(nu_params_unchecked(0.7).is_err());
    }

    #[test]
    fn bell_sum_local_and_qm() {
        let triple = BellTriple {
            a_deg: 0.0,
            b_deg: 120.0,
            c_deg: 240.0,
        };
        let local = |a: &UnitVec3, b: &UnitVec3| {
            local_anticoincidence(acute_angle_deg_of(a, b))
        };
        let s = bell_sum(&triple, local).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "local Bell sum = {s}");

        let qm = |a: &UnitVec3, b: &UnitVec3| Ok(qm_anticoincidence(a, b));
        let s = bell_sum(&triple, qm).unwrap();
        assert!((s - 0.75).abs() < 1e-12, "QM Bell sum = {s}");
    }

    fn acute_angle_deg_of(a: &UnitVec3, b: &UnitVec3) -> f64 {
        a.dot(b).clamp(-1.0, 1.0).acos().to_degrees()
    }

    #[test]
    fn chsh_degenerate_settings() {
        let a = UnitVec3::from_plane_angle_deg(0.0);
        let b = UnitVec3::from_plane_angle_deg(120.0);
        let qm = |x: &UnitVec3, y: &UnitVec3| Ok(qm_anticoincidence(x, y));
        let v = chsh_value(&a, &a, &b, &b, qm).unwrap();
        let e_ab = 1.0 - 2.0 * qm_anticoincidence(&a, &b);
        assert!((v - 2.0 * e_ab).abs() < 1e-12);
        assert!(v.abs() <= 2.0);
    }

    #[test]
    fn sweep_nu_rows() {
        let rows = sweep_nu(&[0.0, 0.1, 0.2, 0.9], 120.0);
        assert_eq!(rows.len(), 4);
        assert!(rows[0].regime_ok);
        assert!((rows[0].p_min.unwrap() - 1.0 / 3.0).abs() < 1e-9);
        // nu = 0.9 breaks positivity and is flagged
        assert!(!rows[3].regime_ok);
        assert!(rows[3].p_min.is_none());
        // monotone non-increasing bounds, non-decreasing spread
        for w in rows[..3].windows(2) {
            assert!(w[1].p_min.unwrap() <= w[0].p_min.unwrap() + 1e-12);
            assert!(w[1].p_max.unwrap() <= w[0].p_max.unwrap() + 1e-12);
            let s0 = w[0].p_max.unwrap() - w[0].p_min.unwrap();
            let s1 = w[1].p_max.unwrap() - w[1].p_min.unwrap();
            assert!(s1 >= s0 - 1e-12);
        }
    }

    #[test]
    fn sweep_beta_gamma_flags() {
        let rows = sweep_beta_gamma(&[0.1, 0.3], &[0.02, 0.2], 120.0);
        assert_eq!(rows.len(), 4);
        // beta 0.1, gamma 0.02: beta*0.5 = 0.05 >= 0.02, valid
        assert!(rows[0].regime_ok);
        // beta 0.1, gamma 0.2: 0.05 < 0.2, flagged
        assert!(!rows[1].regime_ok);
        assert!(rows[1].p_max.is_none());
    }

    #[test]
    fn derive_seed_is_stable() {
        assert_eq!(derive_seed(42, 7), derive_seed(42, 7));
        assert_ne!(derive_seed(42, 7), derive_seed(42, 8));
        assert_ne!(derive_seed(42, 7), derive_seed(43, 7));
    }
}
