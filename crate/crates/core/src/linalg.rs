//! Fixed-size complex linear algebra: 2-vectors and 2×2 matrices.
//!
//! Everything downstream (states, amplitude matrices, spin operators) is carried
//! by these two types. The operations are the handful the rest of the crate needs:
//! products, adjoints, commutators, outer/inner products and a closed-form
//! Hermitian eigendecomposition that serves as the eigen-oracle.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::json::JsonComplex;

/// Complex scalar used for every matrix and vector entry.
pub type CScalar = Complex64;

/// Default absolute tolerance on matrix/vector entries.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Eigenvalue gap below which [`hermitian_eig2`] treats a matrix as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

pub const ZERO: CScalar = Complex64::new(0.0, 0.0);
pub const ONE: CScalar = Complex64::new(1.0, 0.0);
pub const I: CScalar = Complex64::new(0.0, 1.0);

/// Unit phase factor `e^{iα}`.
#[inline]
pub fn cis(alpha: f64) -> CScalar {
    Complex64::from_polar(1.0, alpha)
}

fn finite(z: CScalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Column 2-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[JsonComplex; 2]", try_from = "[JsonComplex; 2]")]
pub struct Vec2C {
    pub c0: CScalar,
    pub c1: CScalar,
}

impl Vec2C {
    pub const fn new(c0: CScalar, c1: CScalar) -> Self {
        Self { c0, c1 }
    }

    /// Checked constructor rejecting NaN/Inf components.
    pub fn try_new(c0: CScalar, c1: CScalar) -> Result<Self> {
        if finite(c0) && finite(c1) {
            Ok(Self { c0, c1 })
        } else {
            Err(SpinError::NonFinite("Vec2C"))
        }
    }

    pub const fn e1() -> Self {
        Self::new(ONE, ZERO)
    }

    pub const fn e2() -> Self {
        Self::new(ZERO, ONE)
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn get(&self, k: usize) -> CScalar {
        match k {
            0 => self.c0,
            1 => self.c1,
            _ => panic!("Vec2C index {k} out of range"),
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.c0.conj(), self.c1.conj())
    }

    pub fn scale(&self, s: CScalar) -> Self {
        Self::new(self.c0 * s, self.c1 * s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    /// Largest entry modulus.
    pub fn norm_inf(&self) -> f64 {
        self.c0.norm().max(self.c1.norm())
    }

    /// Max entry modulus of `self - other`.
    pub fn distance(&self, other: &Vec2C) -> f64 {
        (*self - *other).norm_inf()
    }

    /// Distance after removing the best global phase, together with that phase:
    /// returns `(min_α ‖self − e^{iα}·other‖∞ at α = arg⟨other, self⟩, α)`.
    pub fn phase_distance(&self, other: &Vec2C) -> (f64, f64) {
        let overlap = inner(other, self);
        let alpha = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
        (self.distance(&other.scale(cis(alpha))), alpha)
    }
}

impl From<Vec2C> for [JsonComplex; 2] {
    fn from(v: Vec2C) -> Self {
        [v.c0.into(), v.c1.into()]
    }
}

impl TryFrom<[JsonComplex; 2]> for Vec2C {
    type Error = SpinError;
    fn try_from(v: [JsonComplex; 2]) -> Result<Self> {
        Vec2C::try_new(v[0].into(), v[1].into())
    }
}

impl Add for Vec2C {
    type Output = Vec2C;
    fn add(self, o: Vec2C) -> Vec2C {
        Vec2C::new(self.c0 + o.c0, self.c1 + o.c1)
    }
}

impl Sub for Vec2C {
    type Output = Vec2C;
    fn sub(self, o: Vec2C) -> Vec2C {
        Vec2C::new(self.c0 - o.c0, self.c1 - o.c1)
    }
}

impl Neg for Vec2C {
    type Output = Vec2C;
    fn neg(self) -> Vec2C {
        Vec2C::new(-self.c0, -self.c1)
    }
}

/// 2×2 complex matrix, entries named by (row, column) starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[[JsonComplex; 2]; 2]", try_from = "[[JsonComplex; 2]; 2]")]
pub struct Mat2C {
    pub m11: CScalar,
    pub m12: CScalar,
    pub m21: CScalar,
    pub m22: CScalar,
}

impl Mat2C {
    pub const fn new(m11: CScalar, m12: CScalar, m21: CScalar, m22: CScalar) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn try_new(m11: CScalar, m12: CScalar, m21: CScalar, m22: CScalar) -> Result<Self> {
        if [m11, m12, m21, m22].into_iter().all(finite) {
            Ok(Self::new(m11, m12, m21, m22))
        } else {
            Err(SpinError::NonFinite("Mat2C"))
        }
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: CScalar, d: CScalar) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn from_real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self::new(
            Complex64::new(m11, 0.0),
            Complex64::new(m12, 0.0),
            Complex64::new(m21, 0.0),
            Complex64::new(m22, 0.0),
        )
    }

    pub fn pauli_x() -> Self {
        Self::from_real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn pauli_z() -> Self {
        Self::from_real(1.0, 0.0, 0.0, -1.0)
    }

    /// Matrix whose rows are `r0` and `r1`.
    pub fn from_rows(r0: Vec2C, r1: Vec2C) -> Self {
        Self::new(r0.c0, r0.c1, r1.c0, r1.c1)
    }

    /// Matrix whose columns are `k0` and `k1`.
    pub fn from_cols(k0: Vec2C, k1: Vec2C) -> Self {
        Self::new(k0.c0, k1.c0, k0.c1, k1.c1)
    }

    pub fn row(&self, i: usize) -> Vec2C {
        match i {
            0 => Vec2C::new(self.m11, self.m12),
            1 => Vec2C::new(self.m21, self.m22),
            _ => panic!("Mat2C row {i} out of range"),
        }
    }

    pub fn col(&self, j: usize) -> Vec2C {
        match j {
            0 => Vec2C::new(self.m11, self.m21),
            1 => Vec2C::new(self.m12, self.m22),
            _ => panic!("Mat2C column {j} out of range"),
        }
    }

    /// Entry at zero-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> CScalar {
        match (i, j) {
            (0, 0) => self.m11,
            (0, 1) => self.m12,
            (1, 0) => self.m21,
            (1, 1) => self.m22,
            _ => panic!("Mat2C index ({i}, {j}) out of range"),
        }
    }

    pub fn entries(&self) -> [CScalar; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn map(&self, f: impl Fn(CScalar) -> CScalar) -> Self {
        Self::new(f(self.m11), f(self.m12), f(self.m21), f(self.m22))
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn adjoint(&self) -> Self {
        adjoint(self)
    }

    pub fn scale(&self, s: CScalar) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> CScalar {
        self.m11 + self.m22
    }

    pub fn det(&self) -> CScalar {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(self)
    }

    /// Max entry modulus of `self - other`.
    pub fn distance(&self, other: &Mat2C) -> f64 {
        (*self - *other).norm_inf()
    }

    /// `‖a − a†‖∞`.
    pub fn hermitian_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    /// `‖a†a − I‖∞`.
    pub fn unitary_residual(&self) -> f64 {
        (self.adjoint() * *self).distance(&Mat2C::identity())
    }
}

impl From<Mat2C> for [[JsonComplex; 2]; 2] {
    fn from(m: Mat2C) -> Self {
        [[m.m11.into(), m.m12.into()], [m.m21.into(), m.m22.into()]]
    }
}

impl TryFrom<[[JsonComplex; 2]; 2]> for Mat2C {
    type Error = SpinError;
    fn try_from(m: [[JsonComplex; 2]; 2]) -> Result<Self> {
        Mat2C::try_new(m[0][0].into(), m[0][1].into(), m[1][0].into(), m[1][1].into())
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.m11 - o.m11, self.m12 - o.m12, self.m21 - o.m21, self.m22 - o.m22)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.map(|z| -z)
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, b: Mat2C) -> Mat2C {
        mat_mul(&self, &b)
    }
}

impl Mul<Vec2C> for Mat2C {
    type Output = Vec2C;
    fn mul(self, v: Vec2C) -> Vec2C {
        Vec2C::new(
            self.m11 * v.c0 + self.m12 * v.c1,
            self.m21 * v.c0 + self.m22 * v.c1,
        )
    }
}

pub fn mat_mul(a: &Mat2C, b: &Mat2C) -> Mat2C {
    Mat2C::new(
        a.m11 * b.m11 + a.m12 * b.m21,
        a.m11 * b.m12 + a.m12 * b.m22,
        a.m21 * b.m11 + a.m22 * b.m21,
        a.m21 * b.m12 + a.m22 * b.m22,
    )
}

/// Conjugate transpose.
pub fn adjoint(a: &Mat2C) -> Mat2C {
    Mat2C::new(a.m11.conj(), a.m21.conj(), a.m12.conj(), a.m22.conj())
}

/// `ab − ba`
pub fn commutator(a: &Mat2C, b: &Mat2C) -> Mat2C {
    mat_mul(a, b) - mat_mul(b, a)
}

/// `ab + ba`
pub fn anticommutator(a: &Mat2C, b: &Mat2C) -> Mat2C {
    mat_mul(a, b) + mat_mul(b, a)
}

/// `u v†`
pub fn outer(u: &Vec2C, v: &Vec2C) -> Mat2C {
    Mat2C::new(
        u.c0 * v.c0.conj(),
        u.c0 * v.c1.conj(),
        u.c1 * v.c0.conj(),
        u.c1 * v.c1.conj(),
    )
}

/// `u† v` (conjugates the first argument).
pub fn inner(u: &Vec2C, v: &Vec2C) -> CScalar {
    u.c0.conj() * v.c0 + u.c1.conj() * v.c1
}

/// Largest entry modulus.
pub fn norm_inf(a: &Mat2C) -> f64 {
    a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(a: &Mat2C, tol: f64) -> bool {
    a.unitary_residual() <= tol
}

/// Residual of orthonormality for a vector pair: max of `|‖u‖²−1|`, `|‖v‖²−1|`, `|⟨u,v⟩|`.
pub fn orthonormality_residual(u: &Vec2C, v: &Vec2C) -> f64 {
    (u.norm_sqr() - 1.0)
        .abs()
        .max((v.norm_sqr() - 1.0).abs())
        .max(inner(u, v).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec2C,
}

/// Multiply `v` by the unit phase that makes its first component with modulus
/// above `tol` real and positive.
pub fn fix_phase(v: &Vec2C, tol: f64) -> Vec2C {
    let lead = if v.c0.norm() > tol { v.c0 } else { v.c1 };
    if lead.norm() == 0.0 {
        return *v;
    }
    v.scale(cis(-lead.arg()))
}

/// Closed-form eigendecomposition of a Hermitian 2×2 matrix using [`DEFAULT_TOL`].
pub fn hermitian_eig2(h: &Mat2C) -> Result<[EigenPair; 2]> {
    hermitian_eig2_tol(h, DEFAULT_TOL)
}

/// Eigenpairs in descending eigenvalue order. Eigenvectors are unit-norm with the
/// first component above `tol` made real positive.
pub fn hermitian_eig2_tol(h: &Mat2C, tol: f64) -> Result<[EigenPair; 2]> {
    let residual = h.hermitian_residual();
    if residual > tol {
        return Err(SpinError::NotHermitian { residual, tol });
    }
    // Hermitian part: real diagonal, b and b* off the diagonal.
    let a = h.m11.re;
    let d = h.m22.re;
    let b = 0.5 * (h.m12 + h.m21.conj());
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let radius = half_diff.hypot(b.norm());
    let (l_hi, l_lo) = (mean + radius, mean - radius);

    if 2.0 * radius < DEGENERACY_GAP {
        return Ok([
            EigenPair { value: l_hi, vector: Vec2C::e1() },
            EigenPair { value: l_lo, vector: Vec2C::e2() },
        ]);
    }

    // Two candidate null vectors of (h − λI); take the better conditioned one.
    let vector_for = |lambda: f64| {
        let from_row0 = Vec2C::new(b, Complex64::new(lambda - a, 0.0));
        let from_row1 = Vec2C::new(Complex64::new(lambda - d, 0.0), b.conj());
        let v = if from_row0.norm_sqr() >= from_row1.norm_sqr() {
            from_row0
        } else {
            from_row1
        };
        fix_phase(&v.normalized(), tol)
    };

    Ok([
        EigenPair { value: l_hi, vector: vector_for(l_hi) },
        EigenPair { value: l_lo, vector: vector_for(l_lo) },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> CScalar {
        Complex64::new(re, im)
    }

    #[test]
    fn products_of_paulis() {
        let id = Mat2C::identity();
        assert_eq!(id * id, id);
        assert!((Mat2C::pauli_x() * Mat2C::pauli_x()).distance(&id) == 0.0);
        // σx σy = i σz, expanded by hand: [[i, 0], [0, −i]]
        let xy = Mat2C::pauli_x() * Mat2C::pauli_y();
        assert_eq!(xy, Mat2C::new(c(0.0, 1.0), ZERO, ZERO, c(0.0, -1.0)));
        assert_eq!(xy, Mat2C::pauli_z().scale(I));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&Mat2C::pauli_z()), Mat2C::pauli_z());
        assert_eq!(adjoint(&Mat2C::pauli_y()), Mat2C::pauli_y());
        assert_eq!(
            adjoint(&Mat2C::from_real(0.0, 2.0, 0.0, 0.0)),
            Mat2C::from_real(0.0, 0.0, 2.0, 0.0)
        );
    }

    #[test]
    fn commutator_examples() {
        let (x, y, z) = (Mat2C::pauli_x(), Mat2C::pauli_y(), Mat2C::pauli_z());
        assert_eq!(commutator(&Mat2C::identity(), &x), Mat2C::zero());
        assert_eq!(commutator(&x, &y), z.scale(c(0.0, 2.0)));
        assert_eq!(anticommutator(&x, &y), Mat2C::zero());
    }

    #[test]
    fn outer_and_inner() {
        assert_eq!(outer(&Vec2C::e1(), &Vec2C::e2()), Mat2C::from_real(0.0, 1.0, 0.0, 0.0));
        let v = Vec2C::new(c(0.3, -1.2), c(2.0, 0.5));
        let vv = inner(&v, &v);
        assert_eq!(vv.im, 0.0);
        assert_abs_diff_eq!(vv.re, v.norm_sqr(), epsilon = 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = Vec2C::new(c(s, 0.0), c(0.0, s));
        assert_abs_diff_eq!((inner(&u, &u) - ONE).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unitary_and_norm() {
        assert!(is_unitary(&Mat2C::identity(), DEFAULT_TOL));
        assert!(!is_unitary(&Mat2C::identity().scale(c(2.0, 0.0)), DEFAULT_TOL));
        assert_eq!(norm_inf(&Mat2C::pauli_y()), 1.0);
    }

    #[test]
    fn eig_of_pauli_z_and_x() {
        let [p, m] = hermitian_eig2(&Mat2C::pauli_z()).unwrap();
        assert_eq!(p.value, 1.0);
        assert_eq!(m.value, -1.0);
        assert!(p.vector.distance(&Vec2C::e1()) < 1e-15);
        assert!(m.vector.distance(&Vec2C::e2()) < 1e-15);

        let [p, m] = hermitian_eig2(&Mat2C::pauli_x()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(p.vector.distance(&Vec2C::from_real(s, s)) < 1e-15);
        assert!(m.vector.distance(&Vec2C::from_real(s, -s)) < 1e-15);
    }

    #[test]
    fn eig_of_tilted_projection_is_plus_minus_one() {
        let (t, p) = (std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_4);
        let h = Mat2C::new(
            c(t.cos(), 0.0),
            cis(-p) * t.sin(),
            cis(p) * t.sin(),
            c(-t.cos(), 0.0),
        );
        let pairs = hermitian_eig2(&h).unwrap();
        assert_abs_diff_eq!(pairs[0].value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pairs[1].value, -1.0, epsilon = 1e-15);
        for pair in pairs {
            let resid = (h * pair.vector - pair.vector.scale(c(pair.value, 0.0))).norm_inf();
            assert!(resid < 1e-15);
            assert_eq!(pair.vector.c0.im, 0.0);
            assert!(pair.vector.c0.re > 0.0);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let err = hermitian_eig2(&Mat2C::from_real(0.0, 1.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, SpinError::NotHermitian { .. }));
    }

    #[test]
    fn eig_degenerate_does_not_crash() {
        let pairs = hermitian_eig2(&Mat2C::identity().scale(c(3.0, 0.0))).unwrap();
        assert_eq!(pairs[0].value, 3.0);
        assert!(orthonormality_residual(&pairs[0].vector, &pairs[1].vector) < 1e-15);
    }

    #[test]
    fn try_new_rejects_nan() {
        assert!(Vec2C::try_new(c(f64::NAN, 0.0), ONE).is_err());
        assert!(Mat2C::try_new(ONE, ONE, ONE, c(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn phase_distance_removes_global_phase() {
        let v = Vec2C::new(c(0.6, 0.0), c(0.0, 0.8));
        let w = v.scale(cis(1.3));
        let (d, alpha) = w.phase_distance(&v);
        assert!(d < 1e-15);
        assert_abs_diff_eq!(alpha, 1.3, epsilon = 1e-14);
    }
}
