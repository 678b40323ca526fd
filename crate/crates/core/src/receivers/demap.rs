use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// Sign decisions on real and imaginary parts, two bits per symbol in row-major
/// order. A part that is exactly zero decodes as bit 0.
pub fn qpsk_demap<T: Real>(s_hat: &ComplexMatrix<T>) -> Vec<bool> {
    let mut bits = Vec::with_capacity(2 * s_hat.rows() * s_hat.cols());
    for r in 0..s_hat.rows() {
        for c in 0..s_hat.cols() {
            let z = s_hat.get(r, c);
            bits.push(z.re < T::zero());
            bits.push(z.im < T::zero());
        }
    }
    bits
}
