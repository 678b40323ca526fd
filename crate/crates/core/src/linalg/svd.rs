use nalgebra::DMatrix;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{modulus, Real, C};

/// Default relative truncation for pure-math rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Compact SVD `A = left · diag(σ) · right^H` keeping only the numerically
/// nonzero singular values.
#[derive(Debug, Clone)]
pub struct CompactSvd<T: Real> {
    /// Spatial factor, `M × r` with orthonormal columns.
    pub left: ComplexMatrix<T>,
    /// Nonincreasing, strictly positive.
    pub singular_values: Vec<T>,
    /// Temporal factor, `N × r` with orthonormal columns.
    pub right: ComplexMatrix<T>,
}

impl<T: Real> CompactSvd<T> {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let scaled = &self.left * &ComplexMatrix::from_diagonal(&self.singular_values);
        scaled.mul_adjoint(&self.right)
    }

    /// First `k` left singular vectors.
    pub fn leading_left(&self, k: usize) -> ComplexMatrix<T> {
        self.left.columns(0, k.min(self.rank()))
    }
}

/// Maximum number of Jacobi sweeps before reporting non-convergence.
const MAX_SWEEPS: usize = 80;

/// Thin SVD of a matrix with at least as many rows as columns, by one-sided
/// (Hestenes) Jacobi rotations. Returns `(G, V)` with `A V = G` and mutually
/// orthogonal columns of `G`, whose norms are the singular values.
fn jacobi_tall<T: Real>(a: &ComplexMatrix<T>, want_v: bool) -> Result<(DMatrix<C<T>>, DMatrix<C<T>>)> {
    let n = a.cols();
    let mut g = a.as_nalgebra().clone();
    let mut v = if want_v { DMatrix::identity(n, n) } else { DMatrix::zeros(0, 0) };
    let eps = T::default_epsilon();
    let mut norms: Vec<T> = (0..n).map(|j| g.column(j).norm_squared()).collect();
    // Columns at round-off level relative to the whole matrix are left alone;
    // rotating them against each other need not converge.
    let total: T = norms.iter().fold(T::zero(), |acc, &x| acc + x);
    let negligible = eps * eps * total;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = g.column(p).dotc(&g.column(q));
                let mag = modulus(gamma);
                if mag <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (mag + mag);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let phase = gamma.unscale(mag);
                // [g_p, g_q] <- [g_p, g_q] [[c, s e^{iφ}], [-s e^{-iφ}, c]]
                let sp = phase.scale(s);
                let sn = phase.conj().scale(s);
                rotate(&mut g, p, q, c, sp, sn);
                if want_v {
                    rotate(&mut v, p, q, c, sp, sn);
                }
                norms[p] = g.column(p).norm_squared();
                norms[q] = g.column(q).norm_squared();
            }
        }
        if !rotated {
            return Ok((g, v));
        }
    }
    Err(Error::Computation(format!("Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")))
}

fn rotate<T: Real>(x: &mut DMatrix<C<T>>, p: usize, q: usize, c: T, sp: C<T>, sn: C<T>) {
    for i in 0..x.nrows() {
        let (xp, xq) = (x[(i, p)], x[(i, q)]);
        x[(i, p)] = xp.scale(c) - sn * xq;
        x[(i, q)] = sp * xp + xq.scale(c);
    }
}

/// All `min(M, N)` singular values of `a`, sorted nonincreasing.
pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    if !a.is_finite() {
        return Err(Error::Computation("SVD input has non-finite entries".into()));
    }
    let tall = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let (g, _) = jacobi_tall(&tall, false)?;
    let mut s: Vec<T> = (0..g.ncols()).map(|j| g.column(j).norm()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    Ok(s)
}

/// Compact SVD truncated at `rank_tol · σ_max`.
pub fn compact_svd<T: Real>(a: &ComplexMatrix<T>, rank_tol: T) -> Result<CompactSvd<T>> {
    let (m, n) = a.shape();
    let empty = || CompactSvd {
        left: ComplexMatrix::zeros(m, 0),
        singular_values: Vec::new(),
        right: ComplexMatrix::zeros(n, 0),
    };
    if a.is_empty() || a.frobenius_norm() == T::zero() {
        return Ok(empty());
    }
    if !a.is_finite() {
        return Err(Error::Computation("SVD input has non-finite entries".into()));
    }
    // Work on the orientation with fewer columns; for wide A use A^H = V Σ U^H.
    let wide = m < n;
    let tall = if wide { a.adjoint() } else { a.clone() };
    let (g, v) = jacobi_tall(&tall, true)?;
    let sigma: Vec<T> = (0..g.ncols()).map(|j| g.column(j).norm()).collect();

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite singular values"));
    let cut = rank_tol * sigma[order[0]];
    let kept: Vec<usize> = order.into_iter().filter(|&k| sigma[k] > cut && sigma[k] > T::zero()).collect();
    if kept.is_empty() {
        return Ok(empty());
    }

    let rows = g.nrows();
    let u = ComplexMatrix::from_fn(rows, kept.len(), |i, j| g[(i, kept[j])].unscale(sigma[kept[j]]));
    let w = ComplexMatrix::from_fn(v.nrows(), kept.len(), |i, j| v[(i, kept[j])]);
    let singular_values = kept.iter().map(|&k| sigma[k]).collect();
    let (left, right) = if wide { (w, u) } else { (u, w) };
    Ok(CompactSvd { left, singular_values, right })
}

/// Principal angles (radians, nondecreasing) between the column spaces of two
/// matrices with orthonormal columns.
///
/// Uses sines from the residual `(I − A A^H) B`, which stays accurate for
/// angles near zero where `acos` of the cosines loses half the digits.
pub fn principal_angles<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if a.rows() != b.rows() {
        return Err(Error::InvalidShape(format!("subspaces in C^{} and C^{}", a.rows(), b.rows())));
    }
    if b.cols() == 0 {
        return Ok(Vec::new());
    }
    let residual = b - &(a * &a.adjoint_mul(b));
    let mut sines = singular_values(&residual)?;
    sines.resize(b.cols(), T::zero());
    let mut angles: Vec<T> = sines.into_iter().map(|s| s.min(T::one()).asin()).collect();
    angles.sort_by(|x, y| x.partial_cmp(y).expect("finite angles"));
    Ok(angles)
}
