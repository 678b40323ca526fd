use std::fmt;
use std::str::FromStr;

use super::{DetectionResult, RaisedFrame};
use crate::airlink::BaselineLayout;
use crate::error::{Error, Result};
use crate::linalg::{compact_svd, hermitian_solve, ComplexMatrix};
use crate::scalar::Real;

/// Algebraic form of the LMMSE-type receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LmmseForm {
    /// Two `B × B` solves.
    Large,
    /// An `R × R` solve for the channel estimate and a `(U+R) × (U+R)` solve for detection.
    Small,
}

impl fmt::Display for LmmseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LmmseForm::Large => "large",
            LmmseForm::Small => "small",
        })
    }
}

impl FromStr for LmmseForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "large" => Ok(LmmseForm::Large),
            "small" => Ok(LmmseForm::Small),
            other => Err(Error::InvalidParameter(format!("unknown LMMSE form '{other}'"))),
        }
    }
}

/// Per-UE pilot energy `c` for orthogonal pilots with `S_T S_T^H = c I`.
fn pilot_energy<T: Real>(pilots: &ComplexMatrix<T>) -> Result<T> {
    if pilots.rows() == 0 {
        return Err(Error::InvalidShape("empty pilot matrix".into()));
    }
    let c = pilots.frobenius_norm_sqr() / T::from_count(pilots.rows());
    if c == T::zero() {
        return Err(Error::InvalidParameter("pilots carry no energy".into()));
    }
    Ok(c)
}

/// `Y_T S_T^H / c`.
pub fn ls_channel_estimate<T: Real>(y_t: &ComplexMatrix<T>, pilots: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if y_t.cols() != pilots.cols() {
        return Err(Error::InvalidShape(format!(
            "{} pilot samples received, pilot matrix has {}",
            y_t.cols(),
            pilots.cols()
        )));
    }
    let c = pilot_energy(pilots)?;
    Ok(y_t.mul_adjoint(pilots).scale(T::one() / c))
}

/// `(A + N0 I)^{-1} B` for Hermitian PSD `A`.
///
/// A singular system at `N0 = 0` is solved with the pseudo-inverse of `A`,
/// which is the `N0 → 0` limit whenever `B` lies in the range of `A`.
fn regularized_solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, n0: T) -> Result<ComplexMatrix<T>> {
    match hermitian_solve(&a.add_diagonal(n0), b) {
        Err(Error::SingularSystem(_)) if n0 == T::zero() => {
            let svd = compact_svd(a, T::default_epsilon().sqrt())?;
            let inv: Vec<T> = svd.singular_values.iter().map(|&s| T::one() / s).collect();
            let z = &ComplexMatrix::from_diagonal(&inv) * &svd.left.adjoint_mul(b);
            Ok(&svd.right * &z)
        }
        other => other,
    }
}

/// `(Ĥ^H Ĥ + N0 I)^{-1} Ĥ^H Y_D`.
pub(crate) fn lmmse_detect<T: Real>(h: &ComplexMatrix<T>, y_d: &ComplexMatrix<T>, n0: T) -> Result<ComplexMatrix<T>> {
    regularized_solve(&h.adjoint_mul(h), &h.adjoint_mul(y_d), n0)
}

/// `Ĉ_J = Y_J Y_J^H / R`.
pub fn covariance_estimate<T: Real>(y_j: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if y_j.cols() == 0 {
        return Err(Error::InvalidPartition("covariance estimate needs R >= 1 training samples".into()));
    }
    Ok(y_j.mul_adjoint(y_j).scale(T::one() / T::from_count(y_j.cols())))
}

/// LMMSE-type jammer-mitigating channel estimate
/// `Ĥ = (I + (Ĉ_J + ν N0 I) / c)^{-1} Y_T S_T^H / c`, with `ν = 1` only when
/// thermal noise is included.
pub fn lmmse_channel_estimate<T: Real>(
    frame: &RaisedFrame<T>,
    pilots: &ComplexMatrix<T>,
    n0: T,
    form: LmmseForm,
    with_noise: bool,
) -> Result<ComplexMatrix<T>> {
    let c = pilot_energy(pilots)?;
    let ls = ls_channel_estimate(&frame.y_t, pilots)?;
    let a = if with_noise { T::one() + n0 / c } else { T::one() };
    match form {
        LmmseForm::Large => {
            let cov = covariance_estimate(&frame.y_j)?;
            let m = cov.scale(T::one() / c).add_diagonal(a);
            hermitian_solve(&m, &ls)
        }
        LmmseForm::Small => {
            // (aI + Y_J Y_J^H/(cR))^{-1} = (I − Y_J (a c R I + Y_J^H Y_J)^{-1} Y_J^H) / a
            let y_j = &frame.y_j;
            let r = y_j.cols();
            if r == 0 {
                return Err(Error::InvalidPartition("covariance estimate needs R >= 1 training samples".into()));
            }
            let inner = y_j.adjoint_mul(y_j).add_diagonal(a * c * T::from_count(r));
            let z = hermitian_solve(&inner, &y_j.adjoint_mul(&ls))?;
            Ok((&ls - &(y_j * &z)).scale(T::one() / a))
        }
    }
}

/// `Ĥ^H (Ĥ Ĥ^H + N0 I + Ĉ_J)^{-1} Y_D` in either form.
fn jammer_aware_detect<T: Real>(h: &ComplexMatrix<T>, frame: &RaisedFrame<T>, n0: T, form: LmmseForm) -> Result<ComplexMatrix<T>> {
    let r = frame.redundancy();
    match form {
        LmmseForm::Large => {
            let cov = covariance_estimate(&frame.y_j)?;
            let m = &h.mul_adjoint(h) + &cov;
            let z = regularized_solve(&m, &frame.y_d, n0)?;
            Ok(h.adjoint_mul(&z))
        }
        LmmseForm::Small => {
            // G = [Ĥ, Y_J/√R]; Ŝ_D = rows 1..U of (N0 I + G^H G)^{-1} G^H Y_D
            if r == 0 {
                return Err(Error::InvalidPartition("covariance estimate needs R >= 1 training samples".into()));
            }
            let u = h.cols();
            let g = h.hstack(&frame.y_j.scale(T::one() / T::from_count(r).sqrt()))?;
            let z = regularized_solve(&g.adjoint_mul(&g), &g.adjoint_mul(&frame.y_d), n0)?;
            Ok(z.row_range(0, u))
        }
    }
}

/// LMMSE-type receiver using the covariance of the training block.
pub fn receiver_mash_lmmse<T: Real>(
    frame: &RaisedFrame<T>,
    pilots: &ComplexMatrix<T>,
    n0: T,
    form: LmmseForm,
    chest_with_noise: bool,
) -> Result<DetectionResult<T>> {
    let h = lmmse_channel_estimate(frame, pilots, n0, form, chest_with_noise)?;
    let s_hat = jammer_aware_detect(&h, frame, n0, form)?;
    let diagnostics = vec![
        ("training_energy", frame.y_j.frobenius_norm().to_f64_lossy()),
        ("channel_estimate", h.frobenius_norm().to_f64_lossy()),
        ("symbol_estimate", s_hat.frobenius_norm().to_f64_lossy()),
    ];
    Ok(DetectionResult::new(s_hat, None, diagnostics))
}

/// Same equations as [`receiver_mash_lmmse`], on the interleaved layout.
pub fn receiver_baseline_lmmse<T: Real>(
    y: &ComplexMatrix<T>,
    layout: &BaselineLayout,
    pilots: &ComplexMatrix<T>,
    n0: T,
    form: LmmseForm,
) -> Result<DetectionResult<T>> {
    if layout.training.is_empty() {
        return Err(Error::InvalidPartition("baseline LMMSE needs training samples".into()));
    }
    receiver_mash_lmmse(&RaisedFrame::from_baseline(y, layout)?, pilots, n0, form, false)
}

/// LS channel estimate and LMMSE detection with no jammer mitigation.
/// Run on a jammed frame this is the unmitigated baseline.
pub fn receiver_jammerless<T: Real>(
    y: &ComplexMatrix<T>,
    layout: &BaselineLayout,
    pilots: &ComplexMatrix<T>,
    n0: T,
) -> Result<DetectionResult<T>> {
    ls_lmmse(&RaisedFrame::from_baseline(y, layout)?, pilots, n0)
}

pub(crate) fn ls_lmmse<T: Real>(frame: &RaisedFrame<T>, pilots: &ComplexMatrix<T>, n0: T) -> Result<DetectionResult<T>> {
    let h = ls_channel_estimate(&frame.y_t, pilots)?;
    let s_hat = lmmse_detect(&h, &frame.y_d, n0)?;
    let diagnostics = vec![
        ("channel_estimate", h.frobenius_norm().to_f64_lossy()),
        ("symbol_estimate", s_hat.frobenius_norm().to_f64_lossy()),
    ];
    Ok(DetectionResult::new(s_hat, None, diagnostics))
}
