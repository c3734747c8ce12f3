//! Spin-½ amplitudes, generalized spin operators and their eigenvectors under an
//! explicit eigenvector phase convention, with numerical cross-checks.

pub mod amplitudes;
pub mod conventions;
pub mod error;
pub mod geometry;
pub mod json;
pub mod linalg;
pub mod operators;
pub mod papertables;
pub mod reductions;
pub mod simulate;
pub mod verify;

pub use amplitudes::{amplitude_matrix, AmplitudeMatrix, Outcome};
pub use conventions::{basis_pair, BasisPair, PhaseConvention};
pub use error::{Result, SpinError};
pub use geometry::Direction;
pub use linalg::{CScalar, Mat2C, Vec2C, DEFAULT_TOL};
pub use operators::{build_operator_set, ObservableSpec, OperatorSet, SpinorPair};
pub use simulate::{interference_check, run_sim, SimConfig, SimResult};
