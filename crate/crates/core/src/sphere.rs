//! Geometry and randomness primitives on the unit sphere S².
//!
//! Houses the hidden spin variable, the measurement rule `sgn⟨a,S⟩`, the
//! projective collapse of the spin onto the measured axis, the tangent-space
//! distance vector driving the pair interaction, and uniform sampling of
//! initial spins.

use rand::Rng;

use crate::error::{Error, Result};

/// Unit-norm tolerance enforced on construction.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Below this margin from ⟨X,Y⟩ = −1 the distance vector is undefined.
pub const ANTIPODAL_TOL: f64 = 1e-9;

/// A point on S²: a spin direction or an apparatus setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec3 {
    /// Normalizes an arbitrary vector onto S².
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm <= UNIT_NORM_TOL {
            return Err(Error::ZeroVector { norm });
        }
        Ok(UnitVec3 {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// The in-plane setting at `deg` degrees: (cos θ, sin θ, 0).
    ///
    /// All coplanar apparatus settings live in the x-y plane, so the angle
    /// between two settings is the difference of their degree arguments.
    pub fn from_plane_angle_deg(deg: f64) -> Self {
        let rad = deg.to_radians();
        // cos²+sin² = 1 exactly enough; renormalize anyway to honor the invariant
        Self::normalize(rad.cos(), rad.sin(), 0.0).expect("trig point is never zero")
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &UnitVec3) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// Geodesic angle to `other` in radians.
    pub fn angle_to(&self, other: &UnitVec3) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    /// Some unit vector orthogonal to `self`; deterministic.
    pub fn any_orthogonal(&self) -> UnitVec3 {
        let pick = if self.x.abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let c = [
            self.y * pick[2] - self.z * pick[1],
            self.z * pick[0] - self.x * pick[2],
            self.x * pick[1] - self.y * pick[0],
        ];
        Self::normalize(c[0], c[1], c[2]).expect("pick is not parallel to self")
    }
}

impl std::ops::Neg for UnitVec3 {
    type Output = UnitVec3;

    fn neg(self) -> UnitVec3 {
        UnitVec3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// A vector in the tangent plane T_base S², components in ambient R³.
///
/// Its norm is the geodesic angle (radians) it spans from `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVec3 {
    pub base: UnitVec3,
    pub components: [f64; 3],
}

impl TangentVec3 {
    pub fn norm(&self) -> f64 {
        let [a, b, c] = self.components;
        (a * a + b * b + c * c).sqrt()
    }
}

/// A measurement result, ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    /// Deterministic sign with the tie-break sgn(0) := +1.
    pub fn from_sign(x: f64) -> Outcome {
        if x >= 0.0 {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Outcome::Up => 1.0,
            Outcome::Down => -1.0,
        }
    }

    pub fn sign(&self) -> i8 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }

    pub fn flip(&self) -> Outcome {
        match self {
            Outcome::Up => Outcome::Down,
            Outcome::Down => Outcome::Up,
        }
    }
}

/// Measurement rule: the result of measuring spin `s` along axis `a` is
/// sgn⟨a,S⟩, with the measure-zero tie ⟨a,S⟩ = 0 mapped to +1.
pub fn measure_spin(a: &UnitVec3, s: &UnitVec3) -> Outcome {
    Outcome::from_sign(a.dot(s))
}

/// Projective collapse: the spin immediately after measurement along `a`
/// is sgn⟨a,S⟩ · a.
pub fn project_spin(a: &UnitVec3, s: &UnitVec3) -> UnitVec3 {
    match measure_spin(a, s) {
        Outcome::Up => *a,
        Outcome::Down => -*a,
    }
}

/// Tangent-space distance vector from X to Y,
///
///   D(X,Y) = arccos⟨Y,X⟩ / √(1−⟨Y,X⟩²) · (Y − ⟨Y,X⟩X) ∈ T_X S².
///
/// Its norm equals the geodesic angle arccos⟨X,Y⟩. Undefined at antipodal
/// pairs; zero at X = Y.
pub fn sphere_distance_vector(x: &UnitVec3, y: &UnitVec3) -> Result<TangentVec3> {
    let d = x.dot(y).clamp(-1.0, 1.0);
    if d < -1.0 + ANTIPODAL_TOL {
        return Err(Error::AntipodalSingularity { dot: d });
    }
    // arccos d / sqrt(1-d²) → 1 as d → 1; the (Y - dX) factor vanishes there
    let factor = if d > 1.0 - 1e-12 {
        1.0
    } else {
        d.acos() / (1.0 - d * d).sqrt()
    };
    let comps = [
        factor * (y.x - d * x.x),
        factor * (y.y - d * x.y),
        factor * (y.z - d * x.z),
    ];
    Ok(TangentVec3 {
        base: *x,
        components: comps,
    })
}

/// Draws a rotation-invariant uniform sample from S²: uniform z in [−1,1],
/// uniform azimuth.
pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R) -> UnitVec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    UnitVec3 {
        x: r * phi.cos(),
        y: r * phi.sin(),
        z,
    }
}

/// Draws uniformly from the spherical cap of angular radius `radius_rad`
/// around `center` (uniform in solid angle).
pub fn sample_cap<R: Rng + ?Sized>(center: &UnitVec3, radius_rad: f64, rng: &mut R) -> UnitVec3 {
    let z_min = radius_rad.cos();
    let z: f64 = rng.gen_range(z_min..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    // local frame at center
    let e1 = center.any_orthogonal();
    let e2c = center.cross(&e1);
    let local = [r * phi.cos(), r * phi.sin(), z];
    let v = [
        local[0] * e1.x + local[1] * e2c[0] + local[2] * center.x,
        local[0] * e1.y + local[1] * e2c[1] + local[2] * center.y,
        local[0] * e1.z + local[1] * e2c[2] + local[2] * center.z,
    ];
    UnitVec3::normalize(v[0], v[1], v[2]).expect("cap sample has unit norm")
}
