use nalgebra::Cholesky;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermitian tolerance accepted by [`hermitian_solve`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Solves `A X = B` for Hermitian positive definite `A` via Cholesky.
pub fn hermitian_solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidShape(format!("system matrix is {}x{}", a.rows(), a.cols())));
    }
    if a.rows() != b.rows() {
        return Err(Error::InvalidShape(format!(
            "system matrix {}x{} with right-hand side {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if !a.is_hermitian(T::lit(HERMITIAN_TOL)) {
        return Err(Error::InvalidParameter("system matrix is not Hermitian".into()));
    }
    if a.rows() == 0 {
        return Ok(b.clone());
    }
    let chol = Cholesky::new(a.as_nalgebra().clone())
        .ok_or_else(|| Error::SingularSystem("Cholesky factorization broke down (matrix not positive definite)".into()))?;
    // Complex Cholesky does not fail on negative pivots (their square roots
    // are imaginary), so definiteness is checked on the factor.
    let n = a.rows();
    let max_diag = (0..n).fold(T::zero(), |m, k| m.max(a.get(k, k).re.abs()));
    let min_pivot_sqr = T::default_epsilon() * T::from_count(10 * n) * max_diag;
    let l = chol.l_dirty();
    for k in 0..n {
        let d = l[(k, k)];
        if !(d.re > T::zero() && d.re * d.re > min_pivot_sqr && d.im.abs() <= d.re * T::default_epsilon().sqrt()) {
            return Err(Error::SingularSystem(format!("matrix is not numerically positive definite (pivot {k})")));
        }
    }
    let x = ComplexMatrix::from_nalgebra(chol.solve(b.as_nalgebra()));
    if !x.is_finite() {
        return Err(Error::SingularSystem("solution is not finite".into()));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::gaussian_matrix;
    use crate::linalg::rng::seeded;

    #[test]
    fn identity_system() {
        let b: ComplexMatrix<f64> = gaussian_matrix(4, 3, 1.0, &mut seeded(1)).unwrap();
        let x = hermitian_solve(&ComplexMatrix::identity(4), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn scalar_system() {
        let a = ComplexMatrix::<f64>::identity(3).scale(2.0);
        let x = hermitian_solve(&a, &ComplexMatrix::identity(3)).unwrap();
        assert!(x.max_abs_diff(&ComplexMatrix::identity(3).scale(0.5)) < 1e-15);
    }

    #[test]
    fn random_pd_residual() {
        let mut rng = seeded(5);
        for n in [1usize, 4, 16, 64] {
            let m: ComplexMatrix<f64> = gaussian_matrix(n + 3, n, 1.0, &mut rng).unwrap();
            let a = m.adjoint_mul(&m).add_diagonal(1.0);
            let b: ComplexMatrix<f64> = gaussian_matrix(n, 7, 1.0, &mut rng).unwrap();
            let x = hermitian_solve(&a, &b).unwrap();
            let res = (&(&a * &x) - &b).frobenius_norm();
            assert!(res <= 1e-8 * b.frobenius_norm(), "n={n} residual {res}");
        }
    }

    #[test]
    fn rejects_indefinite_and_non_hermitian() {
        let a = ComplexMatrix::<f64>::identity(3).scale(-1.0);
        assert!(matches!(hermitian_solve(&a, &ComplexMatrix::identity(3)), Err(Error::SingularSystem(_))));
        let mut b = ComplexMatrix::<f64>::identity(2);
        b.set(0, 1, crate::scalar::cplx(1.0, 0.0));
        assert!(matches!(hermitian_solve(&b, &ComplexMatrix::identity(2)), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            hermitian_solve(&ComplexMatrix::<f64>::identity(2), &ComplexMatrix::identity(3)),
            Err(Error::InvalidShape(_))
        ));
    }
}
