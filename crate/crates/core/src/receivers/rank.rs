use crate::linalg::{singular_values, ComplexMatrix};
use crate::scalar::Real;

/// Threshold multiple used in the experiments.
pub const DEFAULT_RANK_FACTOR: f64 = 2.0;

/// Relative (to the frame norm) level treated as round-off by receivers.
pub const NUMERICAL_RANK_FLOOR: f64 = 1e-10;

/// Number of singular values of `Y_J` strictly above `factor · √(B · N0)`, capped at `R`.
pub fn estimate_rank<T: Real>(y_j: &ComplexMatrix<T>, n0: T, factor: T) -> usize {
    estimate_rank_floored(y_j, n0, factor, T::zero())
}

/// [`estimate_rank`] with an absolute lower bound on the threshold, so that
/// round-off in a noiseless training block is not mistaken for interference.
pub fn estimate_rank_floored<T: Real>(y_j: &ComplexMatrix<T>, n0: T, factor: T, floor: T) -> usize {
    if y_j.is_empty() {
        return 0;
    }
    let threshold = (factor * (T::from_count(y_j.rows()) * n0).sqrt()).max(floor);
    let sv = match singular_values(y_j) {
        Ok(sv) => sv,
        Err(_) => return y_j.cols(),
    };
    sv.into_iter().filter(|&s| s > threshold).count().min(y_j.cols())
}
