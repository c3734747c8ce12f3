//! Quantization directions and the spin-projection operator along them.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::linalg::{cis, Mat2C};

/// A quantization axis given by polar angles in radians, θ ∈ [0, π], φ ∈ [0, 2π).
///
/// At the poles (θ = 0 or π) the stored φ is kept verbatim, so formulas that
/// depend on it stay continuous, but equality ignores it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(try_from = "RawDirection")]
pub struct Direction {
    theta: f64,
    phi: f64,
}

#[derive(Deserialize)]
struct RawDirection {
    theta: f64,
    phi: f64,
}

impl TryFrom<RawDirection> for Direction {
    type Error = SpinError;
    fn try_from(raw: RawDirection) -> Result<Self> {
        normalize_direction(raw.theta, raw.phi)
    }
}

/// Fold arbitrary finite angles into the canonical ranges.
///
/// θ is reduced modulo 2π; a reduced θ beyond π is reflected, `(θ, φ) → (2π − θ, φ + π)`,
/// which is the same fold as `(−θ, φ + π)` for negative input.
pub fn normalize_direction(theta_raw: f64, phi_raw: f64) -> Result<Direction> {
    if !theta_raw.is_finite() || !phi_raw.is_finite() {
        return Err(SpinError::NonFinite("direction angles"));
    }
    let mut theta = theta_raw.rem_euclid(TAU);
    let mut phi = phi_raw;
    if theta > PI {
        theta = TAU - theta;
        phi += PI;
    }
    let mut phi = phi.rem_euclid(TAU);
    if phi >= TAU {
        phi = 0.0;
    }
    Ok(Direction { theta, phi })
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        normalize_direction(theta, phi)
    }

    /// The +z axis with φ = 0.
    pub const fn z_axis() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// The +x axis.
    pub const fn x_axis() -> Self {
        Self { theta: PI / 2.0, phi: 0.0 }
    }

    /// The +y axis.
    pub const fn y_axis() -> Self {
        Self { theta: PI / 2.0, phi: PI / 2.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_pole(&self) -> bool {
        self.theta == 0.0 || self.theta == PI
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Geometric comparison of the underlying unit vectors.
    pub fn approx_eq(&self, other: &Direction, tol: f64) -> bool {
        let (u, v) = (self.unit_vector(), other.unit_vector());
        u.iter().zip(v.iter()).all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Uniform in θ ∈ [0, π] and φ ∈ [0, 2π).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let theta = rng.gen_range(0.0..=PI);
        let phi = rng.gen_range(0.0..TAU);
        Self { theta, phi }
    }
}

impl PartialEq for Direction {
    fn eq(&self, other: &Self) -> bool {
        self.theta == other.theta && (self.phi == other.phi || self.is_pole())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.theta, self.phi)
    }
}

/// Parse an angle: plain numbers are radians, a `deg` suffix means degrees.
pub fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let err = || SpinError::Parse { what: "angle", input: s.to_string() };
    let value = if let Some(deg) = s.strip_suffix("deg") {
        deg.trim().parse::<f64>().map_err(|_| err())?.to_radians()
    } else {
        s.parse::<f64>().map_err(|_| err())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err())
    }
}

/// Parses `theta,phi` with each angle accepted by [`parse_angle`].
impl FromStr for Direction {
    type Err = SpinError;
    fn from_str(s: &str) -> Result<Self> {
        let (t, p) = s.split_once(',').ok_or_else(|| SpinError::Parse {
            what: "direction (expected `theta,phi`)",
            input: s.to_string(),
        })?;
        normalize_direction(parse_angle(t)?, parse_angle(p)?)
    }
}

/// `σ·n̂ = [[cos θ, sin θ e^{−iφ}], [sin θ e^{iφ}, −cos θ]]`.
pub fn spin_projection(n: &Direction) -> Mat2C {
    spin_projection_raw(n.theta, n.phi)
}

/// [`spin_projection`] for angles that are not normalized.
pub fn spin_projection_raw(theta: f64, phi: f64) -> Mat2C {
    let (s, c) = theta.sin_cos();
    Mat2C::new(
        Complex64::new(c, 0.0),
        cis(-phi) * s,
        cis(phi) * s,
        Complex64::new(-c, 0.0),
    )
}
