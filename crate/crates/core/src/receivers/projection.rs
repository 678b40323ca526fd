use super::lmmse::{ls_channel_estimate, lmmse_detect};
use super::{DetectionResult, RaisedFrame};
use crate::error::{Error, Result};
use crate::linalg::{compact_svd, ComplexMatrix};
use crate::scalar::Real;

/// `P = I − U U^H` for `U` with orthonormal columns.
pub fn projection_matrix<T: Real>(u: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    &ComplexMatrix::identity(u.rows()) - &u.mul_adjoint(u)
}

/// `(I − U U^H) Y` without forming the `B × B` projector.
fn project_out<T: Real>(u: &ComplexMatrix<T>, y: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    if u.cols() == 0 {
        return y.clone();
    }
    y - &(u * &u.adjoint_mul(y))
}

/// Orthogonal-projection receiver.
///
/// Nulls the leading `I*` left singular directions of the training block,
/// then LS channel estimation and LMMSE detection on the projected pilots and
/// data, with the noise covariance taken as `N0 I` on the projected signal.
pub fn receiver_mash_projection<T: Real>(
    frame: &RaisedFrame<T>,
    pilots: &ComplexMatrix<T>,
    n0: T,
    rank_factor: T,
) -> Result<DetectionResult<T>> {
    if frame.redundancy() == 0 {
        return Err(Error::InvalidPartition("projection receiver needs R >= 1 training samples".into()));
    }
    let b = frame.antennas();
    let i_star = frame.estimate_rank(n0, rank_factor);
    if i_star >= b {
        return Err(Error::MitigationInfeasible(format!("interference rank {i_star} fills all {b} antennas")));
    }
    let scope = if i_star == 0 {
        ComplexMatrix::zeros(b, 0)
    } else {
        compact_svd(&frame.y_j, T::zero())?.leading_left(i_star)
    };
    let y_pt = project_out(&scope, &frame.y_t);
    let y_pd = project_out(&scope, &frame.y_d);
    let h_p = ls_channel_estimate(&y_pt, pilots)?;
    let s_hat = lmmse_detect(&h_p, &y_pd, n0)?;
    let diagnostics = vec![
        ("training_residual", project_out(&scope, &frame.y_j).frobenius_norm().to_f64_lossy()),
        ("channel_estimate", h_p.frobenius_norm().to_f64_lossy()),
        ("projected_data", y_pd.frobenius_norm().to_f64_lossy()),
    ];
    Ok(DetectionResult::new(s_hat, Some(i_star), diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::linalg::rng::seeded;

    #[test]
    fn projector_is_idempotent_and_hermitian() {
        let a: ComplexMatrix<f64> = gaussian_matrix(12, 3, 1.0, &mut seeded(1)).unwrap();
        let u = compact_svd(&a, 1e-10).unwrap().left;
        let p = projection_matrix(&u);
        assert!((&(&p * &p) - &p).frobenius_norm() <= 1e-10);
        assert!((&p.adjoint() - &p).frobenius_norm() <= 1e-10);
        assert!((&p * &a).frobenius_norm() <= 1e-10 * a.frobenius_norm());
        let y: ComplexMatrix<f64> = gaussian_matrix(12, 5, 1.0, &mut seeded(2)).unwrap();
        assert!(project_out(&u, &y).distance(&(&p * &y)) < 1e-12);
    }

    #[test]
    fn rejects_empty_training() {
        let f = RaisedFrame {
            y_j: ComplexMatrix::<f64>::zeros(4, 0),
            y_t: ComplexMatrix::zeros(4, 1),
            y_d: ComplexMatrix::zeros(4, 1),
        };
        assert!(receiver_mash_projection(&f, &ComplexMatrix::identity(1), 1.0, 2.0).is_err());
    }
}
