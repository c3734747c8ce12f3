//! Seeded invariant suite over random directions.
//!
//! Every sample draws three directions `(a, b, c)`, an intermediate axis `d` and
//! an observable `(r₁, r₂)` from a single ChaCha20 stream, then evaluates each
//! invariant under each requested convention. Reductions run once per report.
//! Two negative controls must *fail* their checks by a wide margin: pairing one
//! convention's eigenvectors with another's operator, and applying the old
//! argument-substitution shortcut under the new convention.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{
    amplitude_matrix, closed_form_probabilities, compose, expectation, hermiticity_check, probabilities, Outcome,
};
use crate::conventions::{basis_pair, PhaseConvention};
use crate::error::{Result, SpinError};
use crate::geometry::{spin_projection, Direction};
use crate::linalg::{orthonormality_residual, DEFAULT_TOL};
use crate::operators::{
    build_operator_set, eigenvectors_of_component, expectation_sandwich, generalized_component, old_convention_shortcut,
    oracle_component, shortcut_misuse, Axis, ObservableSpec,
};
use crate::reductions::{pauli_limit_with_tolerance, standard_generalized_limit_with_tolerance};

/// A violation must exceed this for a negative control to count as detected.
pub const CONTROL_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub tolerance: f64,
    pub conventions: Vec<PhaseConvention>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_samples: 1000,
            tolerance: DEFAULT_TOL,
            conventions: vec![PhaseConvention::Old, PhaseConvention::New],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleWitness {
    pub convention: PhaseConvention,
    pub a: Direction,
    pub b: Direction,
    pub c: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub name: String,
    pub max_residual: f64,
    pub samples: usize,
    pub witness: Option<SampleWitness>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlResult {
    pub name: String,
    pub violation: f64,
    pub threshold: f64,
    pub witness: SampleWitness,
    /// True when the violation is detected, i.e. exceeds the threshold.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub n_samples: usize,
    pub tolerance: f64,
    pub conventions: Vec<PhaseConvention>,
    pub invariants: Vec<InvariantResult>,
    pub controls: Vec<ControlResult>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn invariant(&self, name: &str) -> Option<&InvariantResult> {
        self.invariants.iter().find(|r| r.name == name)
    }

    pub fn control(&self, name: &str) -> Option<&ControlResult> {
        self.controls.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.invariants
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .chain(self.controls.iter().filter(|r| !r.pass).map(|r| r.name.as_str()))
            .collect()
    }
}

#[derive(Default)]
struct Tally {
    worst: f64,
    samples: usize,
    witness: Option<SampleWitness>,
}

impl Tally {
    fn record(&mut self, residual: f64, samples: usize, w: SampleWitness) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.samples += samples;
        if self.witness.is_none() || residual > self.worst {
            self.worst = residual;
            self.witness = Some(w);
        }
    }
}

struct Tallies(Vec<(&'static str, Tally)>);

impl Tallies {
    fn record(&mut self, name: &'static str, residual: f64, w: SampleWitness) {
        self.record_many(name, residual, 1, w);
    }

    fn record_many(&mut self, name: &'static str, residual: f64, samples: usize, w: SampleWitness) {
        match self.0.iter_mut().find(|(n, _)| *n == name) {
            Some((_, t)) => t.record(residual, samples, w),
            None => {
                let mut t = Tally::default();
                t.record(residual, samples, w);
                self.0.push((name, t));
            }
        }
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn sample_invariants(
    t: &mut Tallies,
    conv: &PhaseConvention,
    a: &Direction,
    b: &Direction,
    c: &Direction,
    d: &Direction,
    r: &ObservableSpec,
) -> Result<()> {
    let w = SampleWitness { convention: *conv, a: *a, b: *b, c: *c };

    let psi = amplitude_matrix(a, c, conv);
    t.record("amplitude.unitarity", psi.psi.unitary_residual(), w);
    t.record("amplitude.hermiticity", hermiticity_check(a, c, conv), w);
    let via = compose(&amplitude_matrix(a, d, conv), &amplitude_matrix(d, c, conv))?;
    t.record("amplitude.composition", via.psi.distance(&psi.psi), w);

    let p = probabilities(&psi);
    let closed = closed_form_probabilities(a, c);
    let old = probabilities(&amplitude_matrix(a, c, &PhaseConvention::Old));
    t.record(
        "probability.closed_form",
        max_of((0..4).map(|k| (p[k / 2][k % 2] - closed[k / 2][k % 2]).abs())),
        w,
    );
    t.record(
        "probability.convention_invariance",
        max_of((0..4).map(|k| (p[k / 2][k % 2] - old[k / 2][k % 2]).abs())),
        w,
    );

    let bp = basis_pair(c, conv);
    let s = spin_projection(c);
    t.record(
        "basis.eigenpairs",
        max_of([
            (s * bp.xi_plus).distance(&bp.xi_plus),
            (s * bp.xi_minus).distance(&-bp.xi_minus),
            orthonormality_residual(&bp.xi_plus, &bp.xi_minus),
        ]),
        w,
    );

    let set = build_operator_set(b, c, conv)?;
    t.record("operator.oracle_equivalence", set.sigma_c.distance(&oracle_component(b, c, conv)), w);
    let old_c = generalized_component(b, c, &PhaseConvention::Old, &ObservableSpec::spin_component());
    t.record(
        "operator.diagonal_invariance",
        (set.sigma_c.m11 - old_c.m11).norm().max((set.sigma_c.m22 - old_c.m22).norm()),
        w,
    );
    t.record("operator.hermitian", set.hermitian_residual(), w);
    t.record("operator.square_identity", set.square_residual(), w);
    t.record("operator.commutators", set.commutator_residual(), w);
    t.record("operator.anticommutators", set.anticommutator_residual(), w);
    t.record("operator.eigen_equations", set.eigen_residual(), w);
    t.record("operator.ladder_actions", set.ladder_residual(), w);
    t.record(
        "operator.eigenvector_orthonormality",
        max_of(set.components().iter().map(|(_, _, e)| orthonormality_residual(&e.plus, &e.minus))),
        w,
    );

    let sandwich = max_of([Outcome::Up, Outcome::Down].map(|i| {
        (expectation(i, &psi, r) - expectation_sandwich(i, a, b, c, conv, r)).abs()
    }));
    t.record("expectation.sandwich", sandwich, w);
    Ok(())
}

fn old_shortcut(t: &mut Tallies, a: &Direction, b: &Direction, c: &Direction) -> Result<()> {
    let old = PhaseConvention::Old;
    let w = SampleWitness { convention: old, a: *a, b: *b, c: *c };
    let set = build_operator_set(b, c, &old)?;
    let sx = old_convention_shortcut(b, c, &old, Axis::X)?;
    let sy = old_convention_shortcut(b, c, &old, Axis::Y)?;
    t.record("shortcut.old_equivalence", sx.distance(&set.sigma_x).max(sy.distance(&set.sigma_y)), w);
    Ok(())
}

/// Generic directions used by the negative controls.
pub fn control_witness() -> (Direction, Direction) {
    (Direction::new(1.1, 0.3).expect("finite"), Direction::new(0.8, 2.5).expect("finite"))
}

/// Old-convention eigenvectors tested against the new-convention `[σ_ĉ]`.
pub fn cross_convention_violation(b: &Direction, c: &Direction) -> f64 {
    mixed_eigen_residual(b, c, &PhaseConvention::Old, &PhaseConvention::New)
}

fn controls() -> Result<Vec<ControlResult>> {
    let (b, c) = control_witness();
    let w = |convention| SampleWitness { convention, a: b, b, c };
    let cross = cross_convention_violation(&b, &c);
    let misuse = shortcut_misuse(&b, &c, &PhaseConvention::New)?.max_violation();
    let mk = |name: &str, violation: f64, conv| ControlResult {
        name: name.to_string(),
        violation,
        threshold: CONTROL_THRESHOLD,
        witness: w(conv),
        pass: violation > CONTROL_THRESHOLD,
    };
    Ok(vec![
        mk("control.cross_convention_mismatch", cross, PhaseConvention::New),
        mk("control.new_shortcut_misuse", misuse, PhaseConvention::New),
    ])
}

/// Run every invariant; deterministic in `config`.
pub fn run_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    if config.n_samples == 0 {
        return Err(SpinError::InvalidConfig("n_samples must be at least 1".into()));
    }
    if !(config.tolerance > 0.0) {
        return Err(SpinError::InvalidConfig(format!("tolerance must be positive, got {}", config.tolerance)));
    }
    if config.conventions.is_empty() {
        return Err(SpinError::InvalidConfig("at least one convention is required".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut tallies = Tallies(Vec::new());
    for _ in 0..config.n_samples {
        let a = Direction::random(&mut rng);
        let b = Direction::random(&mut rng);
        let c = Direction::random(&mut rng);
        let d = Direction::random(&mut rng);
        let r = ObservableSpec::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))?;
        for conv in &config.conventions {
            sample_invariants(&mut tallies, conv, &a, &b, &c, &d, &r)?;
        }
        old_shortcut(&mut tallies, &a, &b, &c)?;
    }
    for conv in &config.conventions {
        let rep = pauli_limit_with_tolerance(conv, config.tolerance)?;
        let z = Direction::z_axis();
        let worst = rep.entries.iter().max_by(|x, y| x.max_residual.total_cmp(&y.max_residual)).expect("entries");
        let w = SampleWitness { convention: *conv, a: z, b: worst.witness.b, c: worst.witness.c };
        tallies.record_many("limit.pauli", rep.max_residual(), rep.n_points, w);
    }
    let std = standard_generalized_limit_with_tolerance(config.tolerance)?;
    let worst = std.entries.iter().max_by(|x, y| x.max_residual.total_cmp(&y.max_residual)).expect("entries");
    let w = SampleWitness {
        convention: PhaseConvention::New,
        a: Direction::z_axis(),
        b: worst.witness.b,
        c: worst.witness.c,
    };
    tallies.record_many("limit.standard", std.max_residual(), std.n_points, w);

    let mut invariants: Vec<InvariantResult> = tallies
        .0
        .into_iter()
        .map(|(name, t)| InvariantResult {
            name: name.to_string(),
            max_residual: t.worst,
            samples: t.samples,
            witness: t.witness,
            pass: t.worst <= config.tolerance,
        })
        .collect();
    invariants.sort_by(|x, y| x.name.cmp(&y.name));
    let controls = controls()?;
    let pass = invariants.iter().all(|r| r.pass) && controls.iter().all(|c| c.pass);
    Ok(VerifyReport {
        seed: config.seed,
        n_samples: config.n_samples,
        tolerance: config.tolerance,
        conventions: config.conventions.clone(),
        invariants,
        controls,
        pass,
    })
}

/// One line per invariant and control.
pub fn render_table(report: &VerifyReport) -> String {
    let mut out = format!("{:<38} {:>12} {:>8}  {}\n", "invariant", "residual", "samples", "status");
    for r in &report.invariants {
        out.push_str(&format!(
            "{:<38} {:>12.3e} {:>8}  {}\n",
            r.name,
            r.max_residual,
            r.samples,
            if r.pass { "ok" } else { "FAIL" }
        ));
    }
    for c in &report.controls {
        out.push_str(&format!(
            "{:<38} {:>12.3e} {:>8}  {}\n",
            c.name,
            c.violation,
            1,
            if c.pass { "detected" } else { "MISSED" }
        ));
    }
    out.push_str(&format!(
        "seed {} samples {} tolerance {:e}: {}\n",
        report.seed,
        report.n_samples,
        report.tolerance,
        if report.pass { "PASS" } else { "FAIL" }
    ));
    out
}

/// Residual of `[σ_ĉ]` eigenvectors from one convention against the operator of another.
pub fn mixed_eigen_residual(b: &Direction, c: &Direction, vectors: &PhaseConvention, operator: &PhaseConvention) -> f64 {
    let op = generalized_component(b, c, operator, &ObservableSpec::spin_component());
    eigenvectors_of_component(b, c, vectors).eigen_residual(&op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(conventions: Vec<PhaseConvention>) -> VerifyConfig {
        VerifyConfig { seed: 7, n_samples: 60, tolerance: DEFAULT_TOL, conventions }
    }

    #[test]
    fn suite_passes_and_lists_required_invariants() {
        let rep = run_suite(&small(vec![PhaseConvention::Old, PhaseConvention::New])).unwrap();
        assert!(rep.pass, "{:?}", rep.failures());
        for name in [
            "amplitude.unitarity",
            "amplitude.hermiticity",
            "amplitude.composition",
            "operator.oracle_equivalence",
            "operator.square_identity",
            "operator.commutators",
            "operator.anticommutators",
            "operator.eigen_equations",
            "probability.convention_invariance",
            "limit.pauli",
            "limit.standard",
        ] {
            assert!(rep.invariant(name).is_some(), "{name}");
        }
        let names: Vec<_> = rep.invariants.iter().map(|r| r.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn impossible_tolerance_fails_with_witnesses() {
        let mut cfg = small(vec![PhaseConvention::New]);
        cfg.tolerance = 1e-300;
        let rep = run_suite(&cfg).unwrap();
        assert!(!rep.pass);
        assert!(rep.invariants.iter().filter(|r| !r.pass).all(|r| r.witness.is_some()));
    }

    #[test]
    fn custom_zero_matches_old_profile() {
        let old = run_suite(&small(vec![PhaseConvention::Old])).unwrap();
        let custom = run_suite(&small(vec![PhaseConvention::custom(0.0, 0.0).unwrap()])).unwrap();
        let profile = |r: &VerifyReport| r.invariants.iter().map(|i| (i.name.clone(), i.max_residual)).collect::<Vec<_>>();
        assert_eq!(profile(&old), profile(&custom));
    }

    #[test]
    fn deterministic() {
        let cfg = small(vec![PhaseConvention::Old, PhaseConvention::New]);
        let a = crate::json::to_json_string(&run_suite(&cfg).unwrap());
        let b = crate::json::to_json_string(&run_suite(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn controls_are_detected() {
        let rep = run_suite(&small(vec![PhaseConvention::Old])).unwrap();
        for c in &rep.controls {
            assert!(c.pass && c.violation > CONTROL_THRESHOLD, "{}", c.name);
        }
        let (b, c) = control_witness();
        assert!(mixed_eigen_residual(&b, &c, &PhaseConvention::New, &PhaseConvention::New) <= DEFAULT_TOL);
        assert!(mixed_eigen_residual(&b, &c, &PhaseConvention::Old, &PhaseConvention::New) > CONTROL_THRESHOLD);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = small(vec![PhaseConvention::Old]);
        cfg.n_samples = 0;
        assert!(run_suite(&cfg).is_err());
        let mut cfg = small(vec![PhaseConvention::Old]);
        cfg.tolerance = 0.0;
        assert!(run_suite(&cfg).is_err());
    }
}
