//! Eigenvector phase conventions for `σ·n̂`.
//!
//! A convention assigns to every direction an ordered orthonormal pair
//! `(ξ₊, ξ₋)` with `σ·n̂ ξ± = ±ξ±`. The pairs differ between conventions only by
//! direction-dependent unit phases; everything built on top inherits that freedom.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::geometry::Direction;
use crate::linalg::{cis, inner, Mat2C, Vec2C, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PhaseConvention {
    /// `ξ₊ = (cos θ/2, e^{iφ} sin θ/2)`, `ξ₋ = (sin θ/2, −e^{iφ} cos θ/2)`.
    Old,
    /// `ξ₊ = (e^{−iφ} cos θ/2, sin θ/2)`, `ξ₋` as in `Old`.
    New,
    /// The `Old` pair multiplied by the constant phases `e^{iα₊}`, `e^{iα₋}`.
    Custom { alpha_plus: f64, alpha_minus: f64 },
}

impl PhaseConvention {
    pub fn custom(alpha_plus: f64, alpha_minus: f64) -> Result<Self> {
        if alpha_plus.is_finite() && alpha_minus.is_finite() {
            Ok(Self::Custom { alpha_plus, alpha_minus })
        } else {
            Err(SpinError::NonFinite("custom convention phases"))
        }
    }
}

impl fmt::Display for PhaseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Old => f.write_str("old"),
            Self::New => f.write_str("new"),
            Self::Custom { alpha_plus, alpha_minus } => {
                write!(f, "custom:{alpha_plus},{alpha_minus}")
            }
        }
    }
}

/// Accepts `old`, `new` and `custom:<alpha_plus>,<alpha_minus>` (radians).
impl FromStr for PhaseConvention {
    type Err = SpinError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || SpinError::Parse { what: "phase convention", input: s.to_string() };
        match s.to_ascii_lowercase().as_str() {
            "old" => return Ok(Self::Old),
            "new" => return Ok(Self::New),
            _ => {}
        }
        let rest = s
            .strip_prefix("custom:")
            .or_else(|| s.strip_prefix("Custom:"))
            .ok_or_else(err)?;
        let (a, b) = rest.split_once(',').ok_or_else(err)?;
        let a = a.trim().parse::<f64>().map_err(|_| err())?;
        let b = b.trim().parse::<f64>().map_err(|_| err())?;
        Self::custom(a, b).map_err(|_| err())
    }
}

impl From<PhaseConvention> for String {
    fn from(c: PhaseConvention) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for PhaseConvention {
    type Error = SpinError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisPair {
    pub xi_plus: Vec2C,
    pub xi_minus: Vec2C,
    pub direction: Direction,
    pub convention: PhaseConvention,
}

impl BasisPair {
    /// Rows are `ξ₊`, `ξ₋`.
    pub fn row_matrix(&self) -> Mat2C {
        Mat2C::from_rows(self.xi_plus, self.xi_minus)
    }

    /// Columns are `ξ₊`, `ξ₋`: the change-of-basis matrix `V`.
    pub fn column_matrix(&self) -> Mat2C {
        Mat2C::from_cols(self.xi_plus, self.xi_minus)
    }

    pub fn get(&self, plus: bool) -> Vec2C {
        if plus {
            self.xi_plus
        } else {
            self.xi_minus
        }
    }
}

/// Evaluate a convention's closed forms at raw (unnormalized) angles.
///
/// Argument-substitution shortcuts (θ′ → θ′ − π/2 and friends) act on the
/// formulas themselves, so they must see the angles before any folding.
pub fn basis_vectors_raw(theta: f64, phi: f64, conv: &PhaseConvention) -> (Vec2C, Vec2C) {
    let (s, c) = (0.5 * theta).sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    let old_plus = Vec2C::new(re(c), cis(phi) * s);
    let old_minus = Vec2C::new(re(s), -cis(phi) * c);
    match conv {
        PhaseConvention::Old => (old_plus, old_minus),
        PhaseConvention::New => (Vec2C::new(cis(-phi) * c, re(s)), old_minus),
        PhaseConvention::Custom { alpha_plus, alpha_minus } => (
            old_plus.scale(cis(*alpha_plus)),
            old_minus.scale(cis(*alpha_minus)),
        ),
    }
}

pub fn basis_pair(n: &Direction, conv: &PhaseConvention) -> BasisPair {
    let (xi_plus, xi_minus) = basis_vectors_raw(n.theta(), n.phi(), conv);
    BasisPair { xi_plus, xi_minus, direction: *n, convention: *conv }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(std::f64::consts::TAU);
    if w > std::f64::consts::PI {
        w - std::f64::consts::TAU
    } else {
        w
    }
}

/// Phases `(δ₊, δ₋)` in (−π, π] with `ξ±^(b) = e^{iδ±} ξ±^(a)`.
pub fn phase_relation(
    conv_a: &PhaseConvention,
    conv_b: &PhaseConvention,
    n: &Direction,
) -> Result<(f64, f64)> {
    let pa = basis_pair(n, conv_a);
    let pb = basis_pair(n, conv_b);
    let delta = |va: Vec2C, vb: Vec2C| -> Result<f64> {
        let d = inner(&va, &vb).arg();
        let residual = vb.distance(&va.scale(cis(d)));
        if residual > DEFAULT_TOL {
            return Err(SpinError::NotPhaseRelated { residual });
        }
        Ok(wrap_angle(d))
    };
    Ok((delta(pa.xi_plus, pb.xi_plus)?, delta(pa.xi_minus, pb.xi_minus)?))
}
