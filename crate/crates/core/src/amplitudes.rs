//! Transition amplitudes between two quantization directions.
//!
//! For directions `a` and `c` under a fixed phase convention the amplitude matrix
//! is `Ψ = Ξ_a Ξ_c†`, where the rows of `Ξ_d` are the convention's `ξ₊`, `ξ₋` at `d`.
//! Row `i` is the initial outcome along `a`, column `n` the outcome along `c`.
//! Expanding through a complete intermediate set (the Landé composition rule)
//! leaves the unknown intermediate axis out entirely: `Ξ_f† Ξ_f = I` for any `f`.

use serde::{Deserialize, Serialize};

use crate::conventions::{basis_pair, PhaseConvention};
use crate::error::{Result, SpinError};
use crate::geometry::Direction;
use crate::linalg::Mat2C;
use crate::operators::ObservableSpec;

/// Outcome of a spin-projection measurement, ±½ in units of ħ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    pub fn index(self) -> usize {
        match self {
            Outcome::Up => 0,
            Outcome::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Up => '+',
            Outcome::Down => '-',
        }
    }
}

impl std::str::FromStr for Outcome {
    type Err = SpinError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "+" | "plus" => Ok(Outcome::Up),
            "down" | "-" | "minus" => Ok(Outcome::Down),
            _ => Err(SpinError::Parse { what: "outcome (up|down)", input: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeMatrix {
    pub from: Direction,
    pub to: Direction,
    pub convention: PhaseConvention,
    pub psi: Mat2C,
}

impl AmplitudeMatrix {
    /// `ψ(m_i^(from); m_n^(to))`.
    pub fn amplitude(&self, initial: Outcome, outcome: Outcome) -> num_complex::Complex64 {
        self.psi.get(initial.index(), outcome.index())
    }
}

pub fn amplitude_matrix(a: &Direction, c: &Direction, conv: &PhaseConvention) -> AmplitudeMatrix {
    let xa = basis_pair(a, conv).row_matrix();
    let xc = basis_pair(c, conv).row_matrix();
    AmplitudeMatrix { from: *a, to: *c, convention: *conv, psi: xa * xc.adjoint() }
}

/// Entrywise `|ψ|²`.
pub fn probabilities(m: &AmplitudeMatrix) -> [[f64; 2]; 2] {
    let p = |i, n| m.psi.get(i, n).norm_sqr();
    [[p(0, 0), p(0, 1)], [p(1, 0), p(1, 1)]]
}

/// Closed-form probabilities, independent of any phase convention:
/// `cos²((θ_a−θ_c)/2) − sin θ_a sin θ_c sin²((φ_c−φ_a)/2)` on the diagonal, its
/// complement off the diagonal.
pub fn closed_form_probabilities(a: &Direction, c: &Direction) -> [[f64; 2]; 2] {
    let cross = a.theta().sin() * c.theta().sin() * (0.5 * (c.phi() - a.phi())).sin().powi(2);
    let same = (0.5 * (a.theta() - c.theta())).cos().powi(2) - cross;
    let flip = (0.5 * (a.theta() - c.theta())).sin().powi(2) + cross;
    [[same, flip], [flip, same]]
}

/// `Ψ(a→b) · Ψ(b→c)`, the amplitude from `a` to `c` expanded through `b`.
pub fn compose(x: &AmplitudeMatrix, p: &AmplitudeMatrix) -> Result<AmplitudeMatrix> {
    if x.to != p.from {
        return Err(SpinError::DirectionMismatch {
            left: x.to.to_string(),
            right: p.from.to_string(),
        });
    }
    if x.convention != p.convention {
        return Err(SpinError::ConventionMismatch {
            left: x.convention.to_string(),
            right: p.convention.to_string(),
        });
    }
    Ok(AmplitudeMatrix { from: x.from, to: p.to, convention: x.convention, psi: x.psi * p.psi })
}

/// `‖Ψ(a→c) − Ψ(c→a)†‖∞`; amplitudes satisfy `χ(A;C) = χ*(C;A)`.
pub fn hermiticity_check(a: &Direction, c: &Direction, conv: &PhaseConvention) -> f64 {
    let forward = amplitude_matrix(a, c, conv).psi;
    let backward = amplitude_matrix(c, a, conv).psi;
    forward.distance(&backward.adjoint())
}

/// `⟨R⟩ = Σₙ |ψ_{i n}|² rₙ` for a system prepared in `initial` along `m.from`.
pub fn expectation(initial: Outcome, m: &AmplitudeMatrix, r: &ObservableSpec) -> f64 {
    let i = initial.index();
    m.psi.get(i, 0).norm_sqr() * r.r1 + m.psi.get(i, 1).norm_sqr() * r.r2
}
