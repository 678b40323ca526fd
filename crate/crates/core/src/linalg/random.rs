use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// One circularly-symmetric complex Gaussian draw with total variance `variance`.
pub fn complex_normal<T: Real, G: Rng + ?Sized>(rng: &mut G, variance: f64) -> C<T> {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(s * re), T::lit(s * im))
}

/// `rows × cols` matrix with i.i.d. `CN(0, variance)` entries.
///
/// Entries are drawn column by column, real part before imaginary part.
pub fn gaussian_matrix<T: Real, G: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut G,
) -> Result<ComplexMatrix<T>> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParameter(format!("variance must be finite and >= 0, got {variance}")));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    if variance == 0.0 {
        return Ok(m);
    }
    for j in 0..cols {
        for i in 0..rows {
            m.set(i, j, complex_normal(rng, variance));
        }
    }
    Ok(m)
}

/// Haar-distributed `n × n` unitary matrix.
///
/// QR of an i.i.d. complex Gaussian matrix, with the phases of `diag(R)`
/// moved into `Q` so that the factorization is unique and `Q` is Haar.
pub fn haar_unitary<T: Real, G: Rng + ?Sized>(n: usize, rng: &mut G) -> Result<ComplexMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension("Haar unitary needs n >= 1".into()));
    }
    let z = gaussian_matrix::<T, G>(n, n, 1.0, rng)?;
    let qr = z.into_nalgebra().qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let mag = crate::scalar::modulus(d);
        // |r_kk| = 0 has probability zero; leave the column as is if it happens
        if mag > T::zero() {
            let phase = d / Complex::new(mag, T::zero());
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rng::seeded;

    fn unitarity_defect(q: &ComplexMatrix<f64>) -> f64 {
        (&q.adjoint_mul(q) - &ComplexMatrix::identity(q.cols())).frobenius_norm()
    }

    #[test]
    fn haar_one_by_one_is_a_phase() {
        let q: ComplexMatrix<f64> = haar_unitary(1, &mut seeded(3)).unwrap();
        assert!((q.get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_is_unitary() {
        for seed in 0..10 {
            let q: ComplexMatrix<f64> = haar_unitary(8, &mut seeded(seed)).unwrap();
            assert!(unitarity_defect(&q) <= 1e-10);
        }
        let q: ComplexMatrix<f64> = haar_unitary(100, &mut seeded(1)).unwrap();
        assert!(unitarity_defect(&q) <= 1e-10);
    }

    #[test]
    fn haar_rejects_zero_dimension() {
        assert!(matches!(haar_unitary::<f64, _>(0, &mut seeded(0)), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn haar_works_in_single_precision() {
        let q: ComplexMatrix<f32> = haar_unitary(6, &mut seeded(5)).unwrap();
        let d = (&q.adjoint_mul(&q) - &ComplexMatrix::identity(6)).frobenius_norm();
        assert!(d < 1e-5);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: ComplexMatrix<f64> = haar_unitary(5, &mut seeded(42)).unwrap();
        let b: ComplexMatrix<f64> = haar_unitary(5, &mut seeded(42)).unwrap();
        assert_eq!(a.to_row_major(), b.to_row_major());
        let g1: ComplexMatrix<f64> = gaussian_matrix(4, 3, 2.0, &mut seeded(1)).unwrap();
        let g2: ComplexMatrix<f64> = gaussian_matrix(4, 3, 2.0, &mut seeded(1)).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn gaussian_zero_variance_and_negative() {
        let z: ComplexMatrix<f64> = gaussian_matrix(3, 4, 0.0, &mut seeded(0)).unwrap();
        assert_eq!(z.frobenius_norm(), 0.0);
        assert!(matches!(gaussian_matrix::<f64, _>(2, 2, -1.0, &mut seeded(0)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gaussian_moments() {
        let n = 100_000;
        let g: ComplexMatrix<f64> = gaussian_matrix(1, n, 1.0, &mut seeded(11)).unwrap();
        let entries = g.to_row_major();
        let mean = entries.iter().fold(Complex::new(0.0, 0.0), |a, z| a + z) / n as f64;
        let var = entries.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / n as f64;
        assert!(mean.norm() <= 0.02, "mean {mean}");
        assert!((0.98..=1.02).contains(&var), "variance {var}");

        let (mr, mi) = (mean.re, mean.im);
        let cov = entries.iter().map(|z| (z.re - mr) * (z.im - mi)).sum::<f64>() / n as f64;
        let vr = entries.iter().map(|z| (z.re - mr).powi(2)).sum::<f64>() / n as f64;
        let vi = entries.iter().map(|z| (z.im - mi).powi(2)).sum::<f64>() / n as f64;
        let corr = cov / (vr * vi).sqrt();
        assert!(corr.abs() <= 0.02, "corr {corr}");
        assert!((vr - 0.5).abs() < 0.02 && (vi - 0.5).abs() < 0.02);
    }
}
