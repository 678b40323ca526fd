use crate::error::{Error, Result};

use super::trial::TrialResult;

/// Pooled metrics over a set of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub ber: f64,
    /// `100 · Σ‖Ŝ_D − S_D‖ / Σ‖S_D‖`, a ratio of sums for the ratio of expectations.
    pub mer_percent: f64,
    pub mean_rank: f64,
    pub frames: usize,
    pub bit_errors: u64,
    pub bits_total: u64,
}

pub fn aggregate(results: &[TrialResult]) -> Result<Aggregate> {
    if results.is_empty() {
        return Err(Error::InvalidInput("cannot aggregate zero trials".into()));
    }
    let bit_errors: u64 = results.iter().map(|r| r.bit_errors).sum();
    let bits_total: u64 = results.iter().map(|r| r.bits_total).sum();
    let num: f64 = results.iter().map(|r| r.mer_num).sum();
    let den: f64 = results.iter().map(|r| r.mer_den).sum();
    let rank: usize = results.iter().map(|r| r.est_rank).sum();
    if bits_total == 0 || den <= 0.0 {
        return Err(Error::InvalidInput("trials carry no data".into()));
    }
    Ok(Aggregate {
        ber: bit_errors as f64 / bits_total as f64,
        mer_percent: 100.0 * (num / den),
        mean_rank: rank as f64 / results.len() as f64,
        frames: results.len(),
        bit_errors,
        bits_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(errors: u64, num: f64, rank: usize) -> TrialResult {
        TrialResult { bit_errors: errors, bits_total: 100, mer_num: num, mer_den: 4.0, est_rank: rank, trial_index: 0, master_seed: 0 }
    }

    #[test]
    fn pools_counts() {
        let a = aggregate(&[trial(0, 1.0, 1), trial(10, 3.0, 2)]).unwrap();
        assert_eq!(a.ber, 0.05);
        assert_eq!(a.mer_percent, 50.0);
        assert_eq!(a.mean_rank, 1.5);
        assert_eq!(a.frames, 2);
    }

    #[test]
    fn zero_estimate_gives_hundred_percent() {
        // Ŝ_D = 0 makes every numerator equal its denominator
        let a = aggregate(&[trial(50, 4.0, 0), trial(50, 4.0, 0)]).unwrap();
        assert_eq!(a.mer_percent, 100.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(aggregate(&[]), Err(Error::InvalidInput(_))));
    }
}
