//! Generalized spin operators built from amplitudes.
//!
//! The build route is fixed: `[σ_ĉ]` from the amplitudes `Φ = Ψ(b→c)`, its
//! eigenvectors from the reverse amplitudes `Ψ(c→b)`, ladder operators from those
//! eigenvectors, `[σx]`/`[σy]` from the ladder operators and finally the x/y
//! eigenvectors by rotating the `σ_ĉ` eigenvectors. Closed-form tables are never
//! consulted here.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{amplitude_matrix, Outcome};
use crate::conventions::{basis_pair, basis_vectors_raw, PhaseConvention};
use crate::error::{Result, SpinError};
use crate::geometry::{spin_projection, Direction};
use crate::linalg::{commutator, inner, orthonormality_residual, outer, Mat2C, Vec2C, DEFAULT_TOL, I};

/// Values `(r₁, r₂)` an observable takes on the up/down outcomes along `ĉ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSpec {
    pub r1: f64,
    pub r2: f64,
}

impl ObservableSpec {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if r1.is_finite() && r2.is_finite() {
            Ok(Self { r1, r2 })
        } else {
            Err(SpinError::NonFinite("observable values"))
        }
    }

    /// `σ·ĉ`: +1 on up, −1 on down.
    pub fn spin_component() -> Self {
        Self { r1: 1.0, r2: -1.0 }
    }

    /// `σ²` for spin ½ in units of ħ/2.
    pub fn total_spin_squared() -> Self {
        Self { r1: 3.0, r2: 3.0 }
    }
}

/// An ordered eigenvector pair for eigenvalues +1 and −1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorPair {
    pub plus: Vec2C,
    pub minus: Vec2C,
}

impl SpinorPair {
    pub fn get(&self, plus: bool) -> Vec2C {
        if plus {
            self.plus
        } else {
            self.minus
        }
    }

    /// Max over both vectors of `‖op·v ∓ v‖∞`.
    pub fn eigen_residual(&self, op: &Mat2C) -> f64 {
        (*op * self.plus)
            .distance(&self.plus)
            .max((*op * self.minus).distance(&-self.minus))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// `[R]_{jj′} = Σₙ Φ*_{jn} rₙ Φ_{j′n}` with `Φ = Ψ(b→c)`.
pub fn generalized_component(
    b: &Direction,
    c: &Direction,
    conv: &PhaseConvention,
    r: &ObservableSpec,
) -> Mat2C {
    let phi = amplitude_matrix(b, c, conv).psi;
    let d = Mat2C::diag(Complex64::new(r.r1, 0.0), Complex64::new(r.r2, 0.0));
    phi.conj() * d * phi.transpose()
}

/// `V† (σ·ĉ) V`, `V` holding the convention's eigenvectors at `b` as columns.
pub fn oracle_component(b: &Direction, c: &Direction, conv: &PhaseConvention) -> Mat2C {
    let v = basis_pair(b, conv).column_matrix();
    v.adjoint() * spin_projection(c) * v
}

/// Eigenvectors of `[σ_ĉ]`: the rows of `Ψ(c→b)`.
pub fn eigenvectors_of_component(b: &Direction, c: &Direction, conv: &PhaseConvention) -> SpinorPair {
    let m = amplitude_matrix(c, b, conv).psi;
    SpinorPair { plus: m.row(0), minus: m.row(1) }
}

/// `σ₊ = 2 ξ₊ξ₋†`, `σ₋ = 2 ξ₋ξ₊†`, so that `σ₊ξ₋ = 2ξ₊`, `σ₊ξ₊ = 0` and likewise for `σ₋`.
pub fn ladder_operators(eig_plus: &Vec2C, eig_minus: &Vec2C) -> Result<(Mat2C, Mat2C)> {
    let residual = orthonormality_residual(eig_plus, eig_minus);
    if residual > DEFAULT_TOL {
        return Err(SpinError::NotOrthonormal { residual });
    }
    let two = Complex64::new(2.0, 0.0);
    Ok((
        outer(eig_plus, eig_minus).scale(two),
        outer(eig_minus, eig_plus).scale(two),
    ))
}

/// `σx = (σ₊ + σ₋)/2`, `σy = (σ₊ − σ₋)/2i`.
pub fn xy_from_ladder(sigma_plus: &Mat2C, sigma_minus: &Mat2C) -> (Mat2C, Mat2C) {
    let half = Complex64::new(0.5, 0.0);
    let sigma_x = (*sigma_plus + *sigma_minus).scale(half);
    let sigma_y = (*sigma_plus - *sigma_minus).scale(Complex64::new(0.0, -0.5));
    (sigma_x, sigma_y)
}

/// `ξx± = (I − iσy) ξ_ĉ± / √2`: rotation by π/2 about y.
pub fn rotated_eigenvectors_x(sigma_y: &Mat2C, eig_c: &SpinorPair) -> SpinorPair {
    let rot = (Mat2C::identity() - sigma_y.scale(I)).scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
    SpinorPair { plus: rot * eig_c.plus, minus: rot * eig_c.minus }
}

/// `ξy± = (I + iσx) ξ_ĉ± / √2`: rotation by −π/2 about x.
pub fn rotated_eigenvectors_y(sigma_x: &Mat2C, eig_c: &SpinorPair) -> SpinorPair {
    let rot = (Mat2C::identity() + sigma_x.scale(I)).scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
    SpinorPair { plus: rot * eig_c.plus, minus: rot * eig_c.minus }
}

/// Raw angles of `ĉ` after the argument substitution:
/// x: `θ′ → θ′ − π/2`; y: `θ′ → π/2`, `φ′ → φ′ − π/2`.
pub fn substituted_angles(c: &Direction, which: Axis) -> (f64, f64) {
    match which {
        Axis::X => (c.theta() - FRAC_PI_2, c.phi()),
        Axis::Y => (FRAC_PI_2, c.phi() - FRAC_PI_2),
    }
}

/// Apply the argument substitution to `[σ_ĉ]` with no convention guard.
///
/// `[σ_ĉ]` depends on `ĉ` only through `σ·ĉ`, so folding the substituted angles
/// into a normalized direction leaves the matrix unchanged.
pub fn substituted_component(b: &Direction, c: &Direction, conv: &PhaseConvention, which: Axis) -> Mat2C {
    let (t, p) = substituted_angles(c, which);
    let c_sub = Direction::new(t, p).expect("substituted angles are finite");
    generalized_component(b, &c_sub, conv, &ObservableSpec::spin_component())
}

/// Apply the substitution to the `[σ_ĉ]` eigenvectors: rows of `Ξ_{ĉ'} Ξ_b†`
/// with `Ξ_{ĉ'}` evaluated at the raw substituted angles.
pub fn substituted_eigenvectors(b: &Direction, c: &Direction, conv: &PhaseConvention, which: Axis) -> SpinorPair {
    let (t, p) = substituted_angles(c, which);
    let (sp, sm) = basis_vectors_raw(t, p, conv);
    let xb = basis_pair(b, conv).row_matrix();
    let m = Mat2C::from_rows(sp, sm) * xb.adjoint();
    SpinorPair { plus: m.row(0), minus: m.row(1) }
}

fn require_old(conv: &PhaseConvention) -> Result<()> {
    if *conv == PhaseConvention::Old {
        Ok(())
    } else {
        Err(SpinError::ConventionUnsupported(conv.to_string()))
    }
}

/// x or y component by argument substitution; valid for the old convention only.
pub fn old_convention_shortcut(
    b: &Direction,
    c: &Direction,
    conv: &PhaseConvention,
    which: Axis,
) -> Result<Mat2C> {
    require_old(conv)?;
    Ok(substituted_component(b, c, conv, which))
}

/// Eigenvectors of the x or y component by the same substitution (old convention only).
pub fn old_convention_shortcut_eigenvectors(
    b: &Direction,
    c: &Direction,
    conv: &PhaseConvention,
    which: Axis,
) -> Result<SpinorPair> {
    require_old(conv)?;
    Ok(substituted_eigenvectors(b, c, conv, which))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSet {
    pub b: Direction,
    pub c: Direction,
    pub convention: PhaseConvention,
    pub sigma_c: Mat2C,
    pub sigma_x: Mat2C,
    pub sigma_y: Mat2C,
    pub sigma_plus: Mat2C,
    pub sigma_minus: Mat2C,
    pub eig_c: SpinorPair,
    pub eig_x: SpinorPair,
    pub eig_y: SpinorPair,
}

impl OperatorSet {
    /// The three components in cyclic order (c, x, y) ≙ (z, x, y).
    pub fn components(&self) -> [(&'static str, &Mat2C, &SpinorPair); 3] {
        [
            ("sigma_c", &self.sigma_c, &self.eig_c),
            ("sigma_x", &self.sigma_x, &self.eig_x),
            ("sigma_y", &self.sigma_y, &self.eig_y),
        ]
    }

    /// Max of `‖[σi, σj] − 2iσk‖∞` over cyclic (i, j, k).
    pub fn commutator_residual(&self) -> f64 {
        cyclic_commutator_residual(&self.sigma_c, &self.sigma_x, &self.sigma_y)
    }

    /// Max of `‖{σi, σj}‖∞` over i ≠ j.
    pub fn anticommutator_residual(&self) -> f64 {
        use crate::linalg::anticommutator;
        let (z, x, y) = (&self.sigma_c, &self.sigma_x, &self.sigma_y);
        anticommutator(x, y)
            .norm_inf()
            .max(anticommutator(y, z).norm_inf())
            .max(anticommutator(z, x).norm_inf())
    }

    /// Max of `‖σ² − I‖∞` over the three components.
    pub fn square_residual(&self) -> f64 {
        self.components()
            .iter()
            .map(|(_, s, _)| (**s * **s).distance(&Mat2C::identity()))
            .fold(0.0, f64::max)
    }

    pub fn eigen_residual(&self) -> f64 {
        self.components()
            .iter()
            .map(|(_, s, e)| e.eigen_residual(s))
            .fold(0.0, f64::max)
    }

    /// Residual of `σ₊ξ₊ = 0`, `σ₊ξ₋ = 2ξ₊`, `σ₋ξ₋ = 0`, `σ₋ξ₊ = 2ξ₋`.
    pub fn ladder_residual(&self) -> f64 {
        let two = Complex64::new(2.0, 0.0);
        let (p, m) = (self.eig_c.plus, self.eig_c.minus);
        [
            (self.sigma_plus * p).norm_inf(),
            (self.sigma_plus * m).distance(&p.scale(two)),
            (self.sigma_minus * m).norm_inf(),
            (self.sigma_minus * p).distance(&m.scale(two)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.components()
            .iter()
            .map(|(_, s, _)| s.hermitian_residual())
            .fold(0.0, f64::max)
    }
}

/// `[z, x] = 2iy`, `[x, y] = 2iz`, `[y, z] = 2ix`.
pub fn cyclic_commutator_residual(z: &Mat2C, x: &Mat2C, y: &Mat2C) -> f64 {
    let two_i = Complex64::new(0.0, 2.0);
    commutator(x, y)
        .distance(&z.scale(two_i))
        .max(commutator(y, z).distance(&x.scale(two_i)))
        .max(commutator(z, x).distance(&y.scale(two_i)))
}

pub fn build_operator_set(b: &Direction, c: &Direction, conv: &PhaseConvention) -> Result<OperatorSet> {
    let sigma_c = generalized_component(b, c, conv, &ObservableSpec::spin_component());
    let eig_c = eigenvectors_of_component(b, c, conv);
    let (sigma_plus, sigma_minus) = ladder_operators(&eig_c.plus, &eig_c.minus)?;
    let (sigma_x, sigma_y) = xy_from_ladder(&sigma_plus, &sigma_minus);
    let eig_x = rotated_eigenvectors_x(&sigma_y, &eig_c);
    let eig_y = rotated_eigenvectors_y(&sigma_x, &eig_c);
    let set = OperatorSet {
        b: *b,
        c: *c,
        convention: *conv,
        sigma_c,
        sigma_x,
        sigma_y,
        sigma_plus,
        sigma_minus,
        eig_c,
        eig_x,
        eig_y,
    };
    let checks = [
        ("hermitian", set.hermitian_residual()),
        ("squares to identity", set.square_residual()),
        ("eigen-equation", set.eigen_residual()),
    ];
    for (what, residual) in checks {
        if residual > DEFAULT_TOL {
            return Err(SpinError::InvariantViolated { what, residual });
        }
    }
    Ok(set)
}

/// `⟨R⟩ = χ† [R] χ` with `χ` row `initial` of `Ψ(a→b)` and `[R]` built in the `b` basis.
pub fn expectation_sandwich(
    initial: Outcome,
    a: &Direction,
    b: &Direction,
    c: &Direction,
    conv: &PhaseConvention,
    r: &ObservableSpec,
) -> f64 {
    let chi = amplitude_matrix(a, b, conv).psi.row(initial.index());
    let op = generalized_component(b, c, conv, r);
    // χ enters unconjugated on the right: Σ_{jj′} χ*_j R_{jj′} χ_{j′}
    inner(&chi, &(op * chi)).re
}

/// What goes wrong when the substitution shortcut is used under a convention it
/// was not derived for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortcutMisuse {
    /// `‖σx_shortcut − σx_ladder‖∞`
    pub x_discrepancy: f64,
    /// `‖σy_shortcut − σy_ladder‖∞`
    pub y_discrepancy: f64,
    /// Commutator residual of `(σ_ĉ, σx_shortcut, σy_ladder)`.
    pub mixed_commutator_violation_x: f64,
    /// Commutator residual of `(σ_ĉ, σx_ladder, σy_shortcut)`.
    pub mixed_commutator_violation_y: f64,
    /// Commutator residual of `(σ_ĉ, σx_shortcut, σy_shortcut)` alone.
    pub shortcut_triad_residual: f64,
}

impl ShortcutMisuse {
    pub fn max_violation(&self) -> f64 {
        self.mixed_commutator_violation_x.max(self.mixed_commutator_violation_y)
    }
}

pub fn shortcut_misuse(b: &Direction, c: &Direction, conv: &PhaseConvention) -> Result<ShortcutMisuse> {
    let set = build_operator_set(b, c, conv)?;
    let sx = substituted_component(b, c, conv, Axis::X);
    let sy = substituted_component(b, c, conv, Axis::Y);
    Ok(ShortcutMisuse {
        x_discrepancy: sx.distance(&set.sigma_x),
        y_discrepancy: sy.distance(&set.sigma_y),
        mixed_commutator_violation_x: cyclic_commutator_residual(&set.sigma_c, &sx, &set.sigma_y),
        mixed_commutator_violation_y: cyclic_commutator_residual(&set.sigma_c, &set.sigma_x, &sy),
        shortcut_triad_residual: cyclic_commutator_residual(&set.sigma_c, &sx, &sy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::expectation;
    use crate::linalg::{hermitian_eig2, ONE, ZERO};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn dir(t: f64, p: f64) -> Direction {
        Direction::new(t, p).unwrap()
    }

    fn conventions() -> [PhaseConvention; 3] {
        [PhaseConvention::Old, PhaseConvention::New, PhaseConvention::custom(1.0, 2.0).unwrap()]
    }

    #[test]
    fn same_axis_gives_pauli_z() {
        let b = dir(0.9, 2.0);
        for conv in conventions() {
            let s = generalized_component(&b, &b, &conv, &ObservableSpec::spin_component());
            assert!(s.distance(&Mat2C::pauli_z()) <= DEFAULT_TOL);
            assert!(oracle_component(&b, &b, &conv).distance(&Mat2C::pauli_z()) <= DEFAULT_TOL);
            let e = eigenvectors_of_component(&b, &b, &conv);
            assert!(e.plus.distance(&Vec2C::e1()) <= DEFAULT_TOL);
            assert!(e.minus.distance(&Vec2C::e2()) <= DEFAULT_TOL);
        }
    }

    #[test]
    fn diagonal_is_convention_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let b = Direction::random(&mut rng);
            let c = Direction::random(&mut rng);
            let d = b.theta().cos() * c.theta().cos()
                + b.theta().sin() * c.theta().sin() * (b.phi() - c.phi()).cos();
            for conv in conventions() {
                let s = generalized_component(&b, &c, &conv, &ObservableSpec::spin_component());
                assert!((s.m11 - d).norm() <= DEFAULT_TOL);
                assert!((s.m22 + d).norm() <= DEFAULT_TOL);
            }
        }
    }

    #[test]
    fn total_spin_squared_is_three() {
        let s = generalized_component(&dir(0.3, 1.0), &dir(2.0, 4.0), &PhaseConvention::New, &ObservableSpec::total_spin_squared());
        assert!(s.distance(&Mat2C::identity().scale(Complex64::new(3.0, 0.0))) <= DEFAULT_TOL);
    }

    #[test]
    fn component_matches_oracle_and_eig_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let b = Direction::random(&mut rng);
            let c = Direction::random(&mut rng);
            for conv in conventions() {
                let s = generalized_component(&b, &c, &conv, &ObservableSpec::spin_component());
                assert!(s.distance(&oracle_component(&b, &c, &conv)) <= DEFAULT_TOL);
                // eigenvectors agree with the closed-form eigen-oracle up to a phase
                let e = eigenvectors_of_component(&b, &c, &conv);
                let [p, m] = hermitian_eig2(&s).unwrap();
                assert!(e.plus.phase_distance(&p.vector).0 <= 1e-11);
                assert!(e.minus.phase_distance(&m.vector).0 <= 1e-11);
            }
        }
    }

    #[test]
    fn new_plus_eigenvector_closed_form() {
        let (t, p, tq, pq) = (0.7, 1.9, 2.2, 4.1);
        let e = eigenvectors_of_component(&dir(t, p), &dir(tq, pq), &PhaseConvention::New);
        let (ch, sh, chq, shq) = ((t / 2.0f64).cos(), (t / 2.0f64).sin(), (tq / 2.0f64).cos(), (tq / 2.0f64).sin());
        let expect = Vec2C::new(
            Complex64::from_polar(ch * chq, p - pq) + sh * shq,
            Complex64::from_polar(sh * chq, -pq) - Complex64::from_polar(ch * shq, -p),
        );
        assert!(e.plus.distance(&expect) <= 1e-15);
    }

    #[test]
    fn ladder_examples() {
        let (sp, sm) = ladder_operators(&Vec2C::e1(), &Vec2C::e2()).unwrap();
        assert_eq!(sp, Mat2C::from_real(0.0, 2.0, 0.0, 0.0));
        assert_eq!(sm, Mat2C::from_real(0.0, 0.0, 2.0, 0.0));
        assert_eq!(sp * sp, Mat2C::zero());
        let (x, y) = xy_from_ladder(&sp, &sm);
        assert_eq!(x, Mat2C::pauli_x());
        assert_eq!(y, Mat2C::pauli_y());
        let err = ladder_operators(&Vec2C::e1(), &Vec2C::e1()).unwrap_err();
        assert!(matches!(err, SpinError::NotOrthonormal { .. }));
    }

    #[test]
    fn rotations_in_standard_basis() {
        let std = SpinorPair { plus: Vec2C::e1(), minus: Vec2C::e2() };
        let s = FRAC_1_SQRT_2;
        let ex = rotated_eigenvectors_x(&Mat2C::pauli_y(), &std);
        assert!(ex.plus.distance(&Vec2C::from_real(s, s)) < 1e-16);
        assert!(ex.minus.distance(&Vec2C::from_real(-s, s)) < 1e-16);
        let ey = rotated_eigenvectors_y(&Mat2C::pauli_x(), &std);
        assert!(ey.plus.distance(&Vec2C::new(Complex64::new(s, 0.0), Complex64::new(0.0, s))) < 1e-16);
        assert!(ey.minus.distance(&Vec2C::new(Complex64::new(0.0, s), Complex64::new(s, 0.0))) < 1e-16);
        assert!(inner(&ey.plus, &ey.minus).norm() < 1e-16);
    }

    #[test]
    fn operator_sets_satisfy_spin_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..300 {
            let b = Direction::random(&mut rng);
            let c = Direction::random(&mut rng);
            for conv in conventions() {
                let set = build_operator_set(&b, &c, &conv).unwrap();
                assert!(set.commutator_residual() <= DEFAULT_TOL);
                assert!(set.anticommutator_residual() <= DEFAULT_TOL);
                assert!(set.square_residual() <= DEFAULT_TOL);
                assert!(set.eigen_residual() <= DEFAULT_TOL);
                assert!(set.ladder_residual() <= DEFAULT_TOL);
                for (_, _, e) in set.components() {
                    assert!((e.plus.norm() - 1.0).abs() <= DEFAULT_TOL);
                    assert!(inner(&e.plus, &e.minus).norm() <= DEFAULT_TOL);
                }
            }
        }
    }

    #[test]
    fn pauli_limit_of_new_set() {
        let c = dir(1.3, 0.4);
        let set = build_operator_set(&c, &c, &PhaseConvention::New).unwrap();
        assert!(set.sigma_x.distance(&Mat2C::pauli_x()) <= DEFAULT_TOL);
        assert!(set.sigma_y.distance(&Mat2C::pauli_y()) <= DEFAULT_TOL);
        assert!(set.sigma_c.distance(&Mat2C::pauli_z()) <= DEFAULT_TOL);
    }

    #[test]
    fn old_shortcut_matches_ladder() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let old = PhaseConvention::Old;
        for _ in 0..200 {
            let b = Direction::random(&mut rng);
            let c = Direction::random(&mut rng);
            let set = build_operator_set(&b, &c, &old).unwrap();
            let sx = old_convention_shortcut(&b, &c, &old, Axis::X).unwrap();
            let sy = old_convention_shortcut(&b, &c, &old, Axis::Y).unwrap();
            assert!(sx.distance(&set.sigma_x) <= DEFAULT_TOL);
            assert!(sy.distance(&set.sigma_y) <= DEFAULT_TOL);
            let ex = old_convention_shortcut_eigenvectors(&b, &c, &old, Axis::X).unwrap();
            let ey = old_convention_shortcut_eigenvectors(&b, &c, &old, Axis::Y).unwrap();
            assert!(ex.eigen_residual(&set.sigma_x) <= DEFAULT_TOL);
            assert!(ey.eigen_residual(&set.sigma_y) <= DEFAULT_TOL);
        }
    }

    #[test]
    fn old_shortcut_examples() {
        let old = PhaseConvention::Old;
        let c = dir(0.8, 2.5);
        // θ = θ′, φ = φ′: the shortcut x component is the Pauli σx.
        let sx = old_convention_shortcut(&c, &c, &old, Axis::X).unwrap();
        assert!(sx.distance(&Mat2C::pauli_x()) <= DEFAULT_TOL);
        let b = dir(1.1, 0.3);
        let sy = old_convention_shortcut(&b, &c, &old, Axis::Y).unwrap();
        let expect = b.theta().sin() * (c.phi() - b.phi()).sin();
        assert!((sy.m11 - expect).norm() <= DEFAULT_TOL);
        for conv in [PhaseConvention::New, PhaseConvention::custom(0.1, 0.2).unwrap()] {
            let err = old_convention_shortcut(&b, &c, &conv, Axis::X).unwrap_err();
            assert!(matches!(err, SpinError::ConventionUnsupported(_)));
        }
    }

    #[test]
    fn shortcut_misuse_under_new() {
        let (b, c) = (dir(1.1, 0.3), dir(0.8, 2.5));
        let misuse = shortcut_misuse(&b, &c, &PhaseConvention::New).unwrap();
        assert!(misuse.max_violation() > 0.1);
        assert!(misuse.x_discrepancy > 0.1);
        // the substituted pair by itself is still a valid (rotated) spin triad
        assert!(misuse.shortcut_triad_residual <= DEFAULT_TOL);
        let fine = shortcut_misuse(&b, &c, &PhaseConvention::Old).unwrap();
        assert!(fine.max_violation() <= DEFAULT_TOL);
    }

    #[test]
    fn sandwich_equals_probability_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let (a, b, c) = (Direction::random(&mut rng), Direction::random(&mut rng), Direction::random(&mut rng));
            let r = ObservableSpec::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)).unwrap();
            for conv in conventions() {
                for initial in [Outcome::Up, Outcome::Down] {
                    let direct = expectation(initial, &amplitude_matrix(&a, &c, &conv), &r);
                    let sandwich = expectation_sandwich(initial, &a, &b, &c, &conv, &r);
                    assert_abs_diff_eq!(direct, sandwich, epsilon = DEFAULT_TOL);
                }
            }
        }
    }

    #[test]
    fn z_axis_basis_under_old() {
        let e = eigenvectors_of_component(&dir(0.0, 0.0), &dir(PI, 0.0), &PhaseConvention::Old);
        // flipped axis swaps the roles of the basis vectors
        assert!(e.plus.distance(&Vec2C::new(ZERO, -ONE)) <= DEFAULT_TOL);
        assert!(e.minus.distance(&Vec2C::new(ONE, ZERO)) <= DEFAULT_TOL);
    }

    use rand::Rng;
}
