//! Self-consistency of measurement outcomes.
//!
//! The final spins entering the apparatuses are convex combinations of the
//! initial spin and the (advanced) feed-forward/preinforcement directions,
//! so the outcome signs appear on both sides of their own defining
//! equations. This module enumerates the self-consistent sign assignments,
//! classifies the case structure, and resolves the residual ambiguity
//! ("self-fulfilling prophecies") under an explicit policy.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sphere::{Outcome, UnitVec3};

/// Convex weights (α, β, γ) of the final-spin decomposition.
///
/// α weighs the initial spin, β the partner feed-forward, γ the
/// preinforcement toward the particle's own measurement axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

const SUM_TOL: f64 = 1e-12;

impl ModelParams {
    /// Checked constructor: weights strictly positive, summing to 1, with
    /// the default ordering α > β > γ.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self::new_unchecked(alpha, beta, gamma)?;
        if !(alpha > 0.0 && beta > 0.0 && gamma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "weights must be strictly positive, got ({alpha}, {beta}, {gamma})"
            )));
        }
        if !(alpha > beta && beta > gamma) {
            return Err(Error::InvalidParams(format!(
                "ordering alpha > beta > gamma violated by ({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(p)
    }

    /// Unchecked variant for exploratory sweeps: drops positivity and
    /// ordering, keeps only non-negativity and the sum constraint.
    pub fn new_unchecked(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParams("weights must be finite".into()));
        }
        if alpha < 0.0 || beta < 0.0 || gamma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "weights must be non-negative, got ({alpha}, {beta}, {gamma})"
            )));
        }
        if ((alpha + beta + gamma) - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParams(format!(
                "weights must sum to 1, got {}",
                alpha + beta + gamma
            )));
        }
        Ok(ModelParams { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// A joint outcome (A, B) of the two measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OutcomePair {
    pub a: Outcome,
    pub b: Outcome,
}

impl OutcomePair {
    pub fn new(a: Outcome, b: Outcome) -> Self {
        OutcomePair { a, b }
    }

    pub fn is_equal(&self) -> bool {
        self.a == self.b
    }
}

/// All four candidate pairs in canonical order.
pub const ALL_PAIRS: [OutcomePair; 4] = [
    OutcomePair {
        a: Outcome::Up,
        b: Outcome::Up,
    },
    OutcomePair {
        a: Outcome::Up,
        b: Outcome::Down,
    },
    OutcomePair {
        a: Outcome::Down,
        b: Outcome::Up,
    },
    OutcomePair {
        a: Outcome::Down,
        b: Outcome::Down,
    },
];

/// The subset of {±1}² pairs that are self-consistent for a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistentSet {
    members: Vec<OutcomePair>,
}

impl ConsistentSet {
    fn new(members: Vec<OutcomePair>) -> Self {
        ConsistentSet { members }
    }

    pub fn members(&self) -> &[OutcomePair] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, pair: &OutcomePair) -> bool {
        self.members.contains(pair)
    }

    /// Is a coincidence A = B among the consistent pairs?
    pub fn equal_possible(&self) -> bool {
        self.members.iter().any(|p| p.is_equal())
    }

    /// Is an anti-coincidence A ≠ B among the consistent pairs?
    pub fn unequal_possible(&self) -> bool {
        self.members.iter().any(|p| !p.is_equal())
    }

    /// True when both a coincidence and an anti-coincidence are consistent,
    /// i.e. the outcome is underdetermined by the initial data.
    pub fn is_ambiguous(&self) -> bool {
        self.equal_possible() && self.unequal_possible()
    }
}

/// How a self-fulfilling prophecy is resolved when both outcome classes
/// are consistent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfpPolicy {
    /// Pick a coincidence A = B whenever one is consistent.
    FavorEqual,
    /// Pick an anti-coincidence A ≠ B whenever one is consistent.
    FavorUnequal,
    /// Fair coin between the classes {equal, unequal} when both are
    /// present, then uniform within the chosen class.
    Unbiased,
}

/// Which structural case a configuration falls into (for ⟨a,b⟩ < 0 and
/// β|⟨a,b⟩| ≥ γ, after the w.l.o.g. reduction ⟨a,S₀⟩ > 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    /// sgn⟨a,S₀⟩ ≠ sgn⟨b,S₀⟩: a coincidence is forced.
    OppositeSignsForcedEqual,
    /// Same signs, both a coincidence and an anti-coincidence consistent.
    SameSignsBothPossible,
    /// Same signs, only a coincidence consistent.
    SameSignsOnlyEqual,
    /// Same signs, only an anti-coincidence consistent.
    SameSignsOnlyUnequal,
}

impl CaseLabel {
    pub fn equal_possible(&self) -> bool {
        !matches!(self, CaseLabel::SameSignsOnlyUnequal)
    }

    pub fn unequal_possible(&self) -> bool {
        matches!(
            self,
            CaseLabel::SameSignsBothPossible | CaseLabel::SameSignsOnlyUnequal
        )
    }
}

/// Which particle's final spin is being composed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Particle {
    ASide,
    BSide,
}

/// Final spin entering the apparatus, as the normalized convex combination
///
///   S_A = (α S₀ − β B b + γ A a) / ‖·‖
///   S_B = (−α S₀ − β A a + γ B b) / ‖·‖
pub fn final_spin(
    s0: &UnitVec3,
    a: &UnitVec3,
    b: &UnitVec3,
    outcome: &OutcomePair,
    p: &ModelParams,
    particle: Particle,
) -> Result<UnitVec3> {
    let av = outcome.a.value();
    let bv = outcome.b.value();
    let (c0, ca, cb) = match particle {
        Particle::ASide => (p.alpha(), p.gamma() * av, -p.beta() * bv),
        Particle::BSide => (-p.alpha(), -p.beta() * av, p.gamma() * bv),
    };
    let x = c0 * s0.x() + ca * a.x() + cb * b.x();
    let y = c0 * s0.y() + ca * a.y() + cb * b.y();
    let z = c0 * s0.z() + ca * a.z() + cb * b.z();
    UnitVec3::normalize(x, y, z).map_err(|e| match e {
        Error::ZeroVector { norm } => Error::DegenerateCombination { norm },
        other => other,
    })
}

/// Sign with the deterministic tie-break sgn(0) := +1, as a ±1 float.
fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Brute-force check of the two outcome sign equations
///
///   A = sgn{ α⟨a,S₀⟩ − B β⟨a,b⟩ + A γ }
///   B = sgn{ −α⟨b,S₀⟩ − A β⟨a,b⟩ + B γ }
///
/// over all four candidates (A, B) ∈ {±1}².
pub fn consistent_outcomes(
    s0: &UnitVec3,
    a: &UnitVec3,
    b: &UnitVec3,
    p: &ModelParams,
) -> ConsistentSet {
    let u = p.alpha() * a.dot(s0);
    let w = p.alpha() * b.dot(s0);
    let m = p.beta() * a.dot(b);
    let g = p.gamma();
    let members = ALL_PAIRS
        .iter()
        .copied()
        .filter(|pair| {
            let av = pair.a.value();
            let bv = pair.b.value();
            sgn(u - bv * m + av * g) == av && sgn(-w - av * m + bv * g) == bv
        })
        .collect();
    ConsistentSet::new(members)
}

fn in_regime(a: &UnitVec3, b: &UnitVec3, p: &ModelParams) -> bool {
    let d = a.dot(b);
    d < 0.0 && p.beta() * d.abs() >= p.gamma()
}

/// Case classification in the regime ⟨a,b⟩ < 0, β|⟨a,b⟩| ≥ γ.
///
/// Applies the symmetry reduction S₀ ↔ −S₀ (with particle-label exchange)
/// when ⟨a,S₀⟩ < 0, then evaluates the possibility conditions
///
///   A=B possible  iff  α⟨a,S₀⟩ < β|⟨a,b⟩| + γ  ∨  α⟨b,S₀⟩ < β|⟨a,b⟩| + γ
///   A≠B possible  iff  α⟨a,S₀⟩ + γ > β|⟨a,b⟩|  ∧  α⟨b,S₀⟩ + γ > β|⟨a,b⟩|.
pub fn classify_case(
    s0: &UnitVec3,
    a: &UnitVec3,
    b: &UnitVec3,
    p: &ModelParams,
) -> Result<CaseLabel> {
    if !in_regime(a, b, p) {
        return Err(Error::RegimeViolation(format!(
            "classification requires dot(a,b) < 0 and beta*|dot(a,b)| >= gamma, \
             got dot = {}, beta = {}, gamma = {}",
            a.dot(b),
            p.beta(),
            p.gamma()
        )));
    }
    let mut u = p.alpha() * a.dot(s0);
    let mut w = p.alpha() * b.dot(s0);
    if u < 0.0 {
        // S0 <-> -S0 with label swap leaves the possibility flags invariant
        u = -u;
        w = -w;
    }
    if w < 0.0 {
        return Ok(CaseLabel::OppositeSignsForcedEqual);
    }
    let th = p.beta() * a.dot(b).abs();
    let g = p.gamma();
    let equal_possible = u < th + g || w < th + g;
    let unequal_possible = u + g > th && w + g > th;
    match (equal_possible, unequal_possible) {
        (true, true) => Ok(CaseLabel::SameSignsBothPossible),
        (true, false) => Ok(CaseLabel::SameSignsOnlyEqual),
        (false, true) => Ok(CaseLabel::SameSignsOnlyUnequal),
        // unreachable for gamma > 0; boundary ties fall to OnlyUnequal
        (false, false) => Ok(CaseLabel::SameSignsOnlyUnequal),
    }
}

/// Classification with fallback: outside the table's regime the label is
/// derived from the enumerated consistent set instead.
pub fn classify_case_or_enumerate(
    s0: &UnitVec3,
    a: &UnitVec3,
    b: &UnitVec3,
    p: &ModelParams,
) -> Result<CaseLabel> {
    if in_regime(a, b, p) {
        return classify_case(s0, a, b, p);
    }
    let set = consistent_outcomes(s0, a, b, p);
    let opposite = sgn(a.dot(s0)) != sgn(b.dot(s0));
    match (set.equal_possible(), set.unequal_possible()) {
        (true, false) if opposite => Ok(CaseLabel::OppositeSignsForcedEqual),
        (true, true) => Ok(CaseLabel::SameSignsBothPossible),
        (true, false) => Ok(CaseLabel::SameSignsOnlyEqual),
        (false, true) => Ok(CaseLabel::SameSignsOnlyUnequal),
        (false, false) => Err(Error::EmptySet),
    }
}

/// Resolves a self-fulfilling prophecy under `policy`.
pub fn resolve_sfp<R: Rng + ?Sized>(
    set: &ConsistentSet,
    policy: SfpPolicy,
    rng: &mut R,
) -> Result<OutcomePair> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let equal: Vec<OutcomePair> = set.members().iter().copied().filter(|p| p.is_equal()).collect();
    let unequal: Vec<OutcomePair> =
        set.members().iter().copied().filter(|p| !p.is_equal()).collect();
    let class = match policy {
        SfpPolicy::FavorEqual => {
            if !equal.is_empty() {
                &equal
            } else {
                &unequal
            }
        }
        SfpPolicy::FavorUnequal => {
            if !unequal.is_empty() {
                &unequal
            } else {
                &equal
            }
        }
        SfpPolicy::Unbiased => {
            if equal.is_empty() {
                &unequal
            } else if unequal.is_empty() {
                &equal
            } else if rng.gen_bool(0.5) {
                &equal
            } else {
                &unequal
            }
        }
    };
    Ok(class[rng.gen_range(0..class.len())])
}
