//! Monte-Carlo sampling of sequential spin-projection measurements.
//!
//! A shot starts in `initial` along `chain[0]` and is measured along each later
//! axis in turn. Each step consumes exactly one uniform draw `u` and yields up iff
//! `u < |ψ(current; up)|²`. Shot `k` uses a ChaCha20 stream seeded with `seed` and
//! stream id `k`, so results do not depend on how shots are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{amplitude_matrix, compose, probabilities, Outcome};
use crate::conventions::PhaseConvention;
use crate::error::{Result, SpinError};
use crate::geometry::Direction;

pub const GENERATOR: &str = "ChaCha20 (rand_chacha), seed_from_u64(seed), stream = shot index, one f64 draw per step";

/// At most this many measurements after preparation.
pub const MAX_STEPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub chain: Vec<Direction>,
    pub initial: Outcome,
    pub n_shots: u64,
    pub seed: u64,
    pub convention: PhaseConvention,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chain.len() < 2 {
            return Err(SpinError::InvalidConfig("chain needs at least two directions".into()));
        }
        if self.chain.len() - 1 > MAX_STEPS {
            return Err(SpinError::InvalidConfig(format!("chain may hold at most {} measurements", MAX_STEPS)));
        }
        if self.n_shots == 0 {
            return Err(SpinError::InvalidConfig("n_shots must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    /// Outcomes after preparation, `+` for up and `-` for down.
    pub path: String,
    pub count: u64,
    pub frequency: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub generator: String,
    pub seed: u64,
    pub n_shots: u64,
    pub config: SimConfig,
    /// `|ψ(i; n)|²` for each step, rows indexed by the outcome before the step.
    pub step_probabilities: Vec<[[f64; 2]; 2]>,
    pub paths: Vec<PathResult>,
    pub max_deviation: f64,
}

impl SimResult {
    pub fn path(&self, path: &str) -> Option<&PathResult> {
        self.paths.iter().find(|p| p.path == path)
    }

    /// Empirical and predicted probability that the final outcome is up.
    pub fn final_up(&self) -> (f64, f64) {
        self.paths
            .iter()
            .filter(|p| p.path.ends_with('+'))
            .fold((0.0, 0.0), |(f, q), p| (f + p.frequency, q + p.predicted))
    }
}

fn path_label(index: usize, steps: usize) -> String {
    (0..steps)
        .map(|k| if index >> (steps - 1 - k) & 1 == 0 { '+' } else { '-' })
        .collect()
}

/// Outcome path of one shot, as a bit index (bit set = down, first step most significant).
fn run_shot(seed: u64, shot: u64, initial: Outcome, steps: &[[[f64; 2]; 2]]) -> usize {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    let mut state = initial;
    let mut index = 0usize;
    for p in steps {
        let u: f64 = rng.gen();
        state = if u < p[state.index()][0] { Outcome::Up } else { Outcome::Down };
        index = (index << 1) | state.index();
    }
    index
}

pub fn run_sim(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let steps: Vec<[[f64; 2]; 2]> = cfg
        .chain
        .windows(2)
        .map(|w| probabilities(&amplitude_matrix(&w[0], &w[1], &cfg.convention)))
        .collect();
    let n_paths = 1usize << steps.len();
    let counts = (0..cfg.n_shots)
        .into_par_iter()
        .fold(
            || vec![0u64; n_paths],
            |mut acc, shot| {
                acc[run_shot(cfg.seed, shot, cfg.initial, &steps)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n_paths],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let n = cfg.n_shots as f64;
    let paths: Vec<PathResult> = counts
        .iter()
        .enumerate()
        .map(|(index, &count)| {
            let mut state = cfg.initial;
            let mut predicted = 1.0;
            for (k, p) in steps.iter().enumerate() {
                let next = Outcome::from_index(index >> (steps.len() - 1 - k) & 1);
                predicted *= p[state.index()][next.index()];
                state = next;
            }
            PathResult { path: path_label(index, steps.len()), count, frequency: count as f64 / n, predicted }
        })
        .collect();
    let max_deviation = paths.iter().map(|p| (p.frequency - p.predicted).abs()).fold(0.0, f64::max);
    Ok(SimResult {
        generator: GENERATOR.to_string(),
        seed: cfg.seed,
        n_shots: cfg.n_shots,
        config: cfg.clone(),
        step_probabilities: steps,
        paths,
        max_deviation,
    })
}

/// `k` standard deviations of a binomial frequency: `k·√(p(1−p)/n)`.
pub fn binomial_bound(p: f64, n_shots: u64, k: f64) -> f64 {
    k * (p * (1.0 - p) / n_shots as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interference {
    /// `|Σⱼ ψ(a₊; bⱼ) ψ(bⱼ; c₊)|²`: amplitudes summed through `b̂`, no measurement there.
    pub direct: f64,
    /// `Σⱼ |ψ(a₊; bⱼ)|² |ψ(bⱼ; c₊)|²`: `b̂` measured, probabilities chained.
    pub via_measured_b: f64,
    /// `|ψ(a₊; c₊)|²` without any intermediate axis.
    pub no_intermediate: f64,
}

pub fn interference_check(a: &Direction, b: &Direction, c: &Direction, conv: &PhaseConvention) -> Result<Interference> {
    let ab = amplitude_matrix(a, b, conv);
    let bc = amplitude_matrix(b, c, conv);
    let composed = compose(&ab, &bc)?;
    let pab = probabilities(&ab);
    let pbc = probabilities(&bc);
    Ok(Interference {
        direct: composed.psi.get(0, 0).norm_sqr(),
        via_measured_b: pab[0][0] * pbc[0][0] + pab[0][1] * pbc[1][0],
        no_intermediate: amplitude_matrix(a, c, conv).psi.get(0, 0).norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(chain: Vec<Direction>, n: u64, seed: u64, conv: PhaseConvention) -> SimConfig {
        SimConfig { chain, initial: Outcome::Up, n_shots: n, seed, convention: conv }
    }

    #[test]
    fn same_axis_is_certain() {
        let a = Direction::new(1.0, 2.0).unwrap();
        let r = run_sim(&cfg(vec![a, a], 1000, 1, PhaseConvention::Old)).unwrap();
        assert_eq!(r.path("+").unwrap().count, 1000);
        assert_eq!(r.path("-").unwrap().count, 0);
    }

    #[test]
    fn z_to_x_is_fair() {
        let n = 100_000;
        let r = run_sim(&cfg(vec![Direction::z_axis(), Direction::x_axis()], n, 2024, PhaseConvention::Old)).unwrap();
        let (freq, pred) = r.final_up();
        assert_abs_diff_eq!(pred, 0.5, epsilon = 1e-12);
        assert!((freq - 0.5).abs() <= binomial_bound(0.5, n, 3.0));
        assert_eq!(r.paths.iter().map(|p| p.count).sum::<u64>(), n);
    }

    #[test]
    fn conventions_give_identical_counts() {
        let chain = vec![
            Direction::new(0.3, 0.1).unwrap(),
            Direction::new(1.9, 2.2).unwrap(),
            Direction::new(2.4, 5.0).unwrap(),
        ];
        let old = run_sim(&cfg(chain.clone(), 5000, 9, PhaseConvention::Old)).unwrap();
        let new = run_sim(&cfg(chain, 5000, 9, PhaseConvention::New)).unwrap();
        for (a, b) in old.paths.iter().zip(&new.paths) {
            assert_eq!(a.count, b.count);
            assert_abs_diff_eq!(a.predicted, b.predicted, epsilon = 1e-12);
        }
    }

    #[test]
    fn step_probabilities_are_stochastic() {
        let chain = vec![Direction::new(0.3, 0.1).unwrap(), Direction::new(1.9, 2.2).unwrap()];
        let r = run_sim(&cfg(chain, 10, 0, PhaseConvention::New)).unwrap();
        for p in &r.step_probabilities {
            for row in p {
                assert_abs_diff_eq!(row[0] + row[1], 1.0, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(r.paths.iter().map(|p| p.predicted).sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_configs() {
        let z = Direction::z_axis();
        assert!(run_sim(&cfg(vec![z], 10, 0, PhaseConvention::Old)).is_err());
        assert!(run_sim(&cfg(vec![z, z], 0, 0, PhaseConvention::Old)).is_err());
        assert!(run_sim(&cfg(vec![z; MAX_STEPS + 2], 1, 0, PhaseConvention::Old)).is_err());
    }

    #[test]
    fn interference_examples() {
        let (z, x) = (Direction::z_axis(), Direction::x_axis());
        let i = interference_check(&z, &x, &z, &PhaseConvention::Old).unwrap();
        assert_abs_diff_eq!(i.direct, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(i.via_measured_b, 0.5, epsilon = 1e-12);
        let (a, c) = (Direction::new(0.4, 1.0).unwrap(), Direction::new(2.0, 3.0).unwrap());
        for b in [a, c] {
            let i = interference_check(&a, &b, &c, &PhaseConvention::New).unwrap();
            assert_abs_diff_eq!(i.direct, i.no_intermediate, epsilon = 1e-12);
            assert_abs_diff_eq!(i.via_measured_b, i.no_intermediate, epsilon = 1e-12);
        }
    }

    #[test]
    fn path_labels() {
        assert_eq!(path_label(0, 2), "++");
        assert_eq!(path_label(1, 2), "+-");
        assert_eq!(path_label(2, 2), "-+");
    }
}
