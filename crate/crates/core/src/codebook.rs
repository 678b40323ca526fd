//! Shared-secret codebook: derivation, transmit-side embedding, receive-side
//! raising, and a numerical check that raising turns any jammer into a
//! barrage jammer with the same spatial scope and energy profile.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{compact_svd, haar_unitary, principal_angles, rng, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::scalar::Real;

/// Haar unitary `C` split row-wise into `[C_orth; C_par]`.
///
/// `C_orth` (the first `R` rows) is never transmitted on; the `K = L − R`
/// rows of `C_par` span the secret signal subspace.
#[derive(Debug, Clone)]
pub struct SecretCodebook<T: Real> {
    secret: Vec<u8>,
    frame_index: u64,
    redundancy: usize,
    c: ComplexMatrix<T>,
    c_orth: ComplexMatrix<T>,
    c_par: ComplexMatrix<T>,
}

fn check_partition(frame_len: usize, redundancy: usize, allow_no_training: bool) -> Result<()> {
    if frame_len == 0 {
        return Err(Error::InvalidPartition("frame length must be positive".into()));
    }
    if redundancy >= frame_len {
        return Err(Error::InvalidPartition(format!(
            "redundancy R={redundancy} must be smaller than the frame length L={frame_len}"
        )));
    }
    if redundancy == 0 && !allow_no_training {
        return Err(Error::InvalidPartition("redundancy R=0 leaves no jammer training samples".into()));
    }
    Ok(())
}

fn secret_key(secret: &[u8]) -> [u8; 32] {
    let mut key = [0u8; 32];
    key.copy_from_slice(&Sha256::digest(secret));
    key
}

impl<T: Real> SecretCodebook<T> {
    /// Derives the codebook for frame 0.
    pub fn derive(secret: &[u8], frame_len: usize, redundancy: usize) -> Result<Self> {
        Self::derive_for_frame(secret, frame_len, redundancy, 0)
    }

    /// Derives the codebook for a given frame of the pseudo-random sequence
    /// `f(secret, frame)`, so the matrix can be refreshed every frame.
    pub fn derive_for_frame(secret: &[u8], frame_len: usize, redundancy: usize, frame_index: u64) -> Result<Self> {
        check_partition(frame_len, redundancy, false)?;
        Self::derive_unchecked(secret, frame_len, redundancy, frame_index)
    }

    /// Derivation that also accepts `R = 0` (no jammer training dimensions).
    pub fn derive_without_training(secret: &[u8], frame_len: usize, frame_index: u64) -> Result<Self> {
        check_partition(frame_len, 0, true)?;
        Self::derive_unchecked(secret, frame_len, 0, frame_index)
    }

    fn derive_unchecked(secret: &[u8], frame_len: usize, redundancy: usize, frame_index: u64) -> Result<Self> {
        let mut stream = rng::keyed(secret_key(secret), frame_index);
        let c = haar_unitary::<T, _>(frame_len, &mut stream)?;
        let mut cb = Self::from_unitary(c, redundancy)?;
        cb.secret = secret.to_vec();
        cb.frame_index = frame_index;
        Ok(cb)
    }

    /// Wraps an arbitrary unitary (identity, permutation, ...) as a codebook.
    ///
    /// Bypasses Haar sampling; meant for tests and negative controls.
    pub fn from_unitary(c: ComplexMatrix<T>, redundancy: usize) -> Result<Self> {
        if c.rows() != c.cols() {
            return Err(Error::InvalidShape(format!("codebook must be square, got {}x{}", c.rows(), c.cols())));
        }
        check_partition(c.rows(), redundancy, true)?;
        let l = c.rows();
        let defect = (&c.adjoint_mul(&c) - &ComplexMatrix::identity(l)).frobenius_norm();
        let tol = T::lit(1e-8).max(T::default_epsilon() * T::from_count(10 * l));
        if defect > tol {
            return Err(Error::InvalidParameter(format!("codebook is not unitary (defect {defect:e})")));
        }
        let c_orth = c.row_range(0, redundancy);
        let c_par = c.row_range(redundancy, l);
        Ok(Self { secret: Vec::new(), frame_index: 0, redundancy, c, c_orth, c_par })
    }

    /// Identity codebook: raising is a no-op and embedding zero-pads the front.
    pub fn identity(frame_len: usize, redundancy: usize) -> Result<Self> {
        Self::from_unitary(ComplexMatrix::identity(frame_len), redundancy)
    }

    pub fn secret(&self) -> &[u8] {
        &self.secret
    }

    pub fn frame_index(&self) -> u64 {
        self.frame_index
    }

    /// `L`
    pub fn frame_len(&self) -> usize {
        self.c.rows()
    }

    /// `R`
    pub fn redundancy(&self) -> usize {
        self.redundancy
    }

    /// `K = L − R`
    pub fn payload_len(&self) -> usize {
        self.frame_len() - self.redundancy
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.c
    }

    pub fn c_orth(&self) -> &ComplexMatrix<T> {
        &self.c_orth
    }

    pub fn c_par(&self) -> &ComplexMatrix<T> {
        &self.c_par
    }

    /// `X = S · C_par`. Row `u` of `X` depends only on row `u` of `S`.
    pub fn embed(&self, s: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if s.cols() != self.payload_len() {
            return Err(Error::InvalidShape(format!(
                "embedding needs K={} columns, got {}",
                self.payload_len(),
                s.cols()
            )));
        }
        s.matmul(&self.c_par)
    }

    /// `Ȳ = Y · C^H`.
    pub fn raise(&self, y: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if y.cols() != self.frame_len() {
            return Err(Error::InvalidShape(format!(
                "raising needs L={} columns, got {}",
                self.frame_len(),
                y.cols()
            )));
        }
        Ok(y.mul_adjoint(&self.c))
    }

    /// Serializes as `L: u64 | R: u64 | C row-major as (re, im) f64 pairs`, all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let l = self.frame_len();
        let mut out = Vec::with_capacity(16 + 16 * l * l);
        out.extend_from_slice(&(l as u64).to_le_bytes());
        out.extend_from_slice(&(self.redundancy as u64).to_le_bytes());
        for z in self.c.to_row_major() {
            out.extend_from_slice(&z.re.to_f64_lossy().to_le_bytes());
            out.extend_from_slice(&z.im.to_f64_lossy().to_le_bytes());
        }
        out
    }

    /// Inverse of [`to_bytes`](Self::to_bytes).
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let word = |k: usize| -> Result<[u8; 8]> {
            bytes
                .get(8 * k..8 * k + 8)
                .map(|b| b.try_into().expect("8-byte slice"))
                .ok_or_else(|| Error::MalformedBlob(format!("truncated at word {k}")))
        };
        let l = u64::from_le_bytes(word(0)?) as usize;
        let r = u64::from_le_bytes(word(1)?) as usize;
        let expected = l
            .checked_mul(l)
            .and_then(|n| n.checked_mul(16))
            .and_then(|n| n.checked_add(16))
            .ok_or_else(|| Error::MalformedBlob(format!("dimension {l} overflows")))?;
        if bytes.len() != expected {
            return Err(Error::MalformedBlob(format!("expected {expected} bytes for L={l}, got {}", bytes.len())));
        }
        let entries: Vec<_> = (0..l * l)
            .map(|k| -> Result<_> {
                let re = f64::from_le_bytes(word(2 + 2 * k)?);
                let im = f64::from_le_bytes(word(3 + 2 * k)?);
                Ok(num_complex::Complex::new(T::lit(re), T::lit(im)))
            })
            .collect::<Result<_>>()?;
        let c = ComplexMatrix::from_row_major(l, l, &entries)?;
        Self::from_unitary(c, r)
    }
}

/// Tolerances for [`verify_barrage_transform`].
pub const SIGMA_REL_TOL: f64 = 1e-10;
pub const ANGLE_TOL: f64 = 1e-8;

/// Comparison of the interference `J W` before and after raising.
#[derive(Debug, Clone)]
pub struct TransformReport<T: Real> {
    pub sigma_original: Vec<T>,
    pub sigma_raised: Vec<T>,
    /// Principal angles between the two spatial scopes.
    pub principal_angles: Vec<T>,
    pub max_sigma_rel_dev: T,
    pub max_angle: T,
    /// Temporal extension of the raised interference, `L × I*`.
    pub raised_temporal: ComplexMatrix<T>,
    pub pass: bool,
}

impl<T: Real> TransformReport<T> {
    pub fn rank(&self) -> usize {
        self.sigma_original.len()
    }
}

/// Compares spatial scope and energy profile of `J W` and `J (W C^H)`.
pub fn verify_barrage_transform<T: Real>(
    j: &ComplexMatrix<T>,
    w: &ComplexMatrix<T>,
    cb: &SecretCodebook<T>,
) -> Result<TransformReport<T>> {
    let jw = j.matmul(w)?;
    if jw.frobenius_norm() == T::zero() {
        return Err(Error::DegenerateInput("J·W = 0 has no spatial scope".into()));
    }
    let raised = j.matmul(&cb.raise(w)?)?;
    let tol = T::lit(DEFAULT_RANK_TOL);
    let before = compact_svd(&jw, tol)?;
    let after = compact_svd(&raised, tol)?;

    let (mut max_dev, mut pass) = (T::zero(), before.rank() == after.rank());
    for (a, b) in before.singular_values.iter().zip(&after.singular_values) {
        max_dev = max_dev.max((*a - *b).abs() / *a);
    }
    let angles = if pass { principal_angles(&before.left, &after.left)? } else { Vec::new() };
    let max_angle = angles.iter().fold(T::zero(), |m, &a| m.max(a));
    pass = pass && max_dev <= T::lit(SIGMA_REL_TOL) && max_angle <= T::lit(ANGLE_TOL);

    Ok(TransformReport {
        sigma_original: before.singular_values,
        sigma_raised: after.singular_values,
        principal_angles: angles,
        max_sigma_rel_dev: max_dev,
        max_angle,
        raised_temporal: after.right,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::linalg::rng::seeded;

    const SECRET: &[u8] = b"unit-test secret";

    fn defect(m: &ComplexMatrix<f64>, target: &ComplexMatrix<f64>) -> f64 {
        (m - target).frobenius_norm()
    }

    #[test]
    fn paper_dimensions() {
        let cb = SecretCodebook::<f64>::derive(SECRET, 100, 16).unwrap();
        assert_eq!(cb.c_par().shape(), (84, 100));
        assert_eq!(cb.c_orth().shape(), (16, 100));
        assert!(defect(&cb.matrix().adjoint_mul(cb.matrix()), &ComplexMatrix::identity(100)) <= 1e-10);
        assert!(defect(&cb.c_par().mul_adjoint(cb.c_par()), &ComplexMatrix::identity(84)) <= 1e-10);
        let lifted = cb.c_par().mul_adjoint(cb.matrix());
        let target = ComplexMatrix::zeros(84, 16).hstack(&ComplexMatrix::identity(84)).unwrap();
        assert!(defect(&lifted, &target) <= 1e-10);
        assert_eq!(cb.c_orth().vstack(cb.c_par()).unwrap(), *cb.matrix());

        let again = SecretCodebook::<f64>::derive(SECRET, 100, 16).unwrap();
        assert_eq!(again.matrix().to_row_major(), cb.matrix().to_row_major());
    }

    #[test]
    fn two_by_two() {
        let cb = SecretCodebook::<f64>::derive(SECRET, 2, 1).unwrap();
        let inner = cb.c_orth().mul_adjoint(cb.c_par()).get(0, 0).norm();
        assert!(inner < 1e-12);
        assert!((cb.c_orth().frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distinct_secrets_and_frames_give_distinct_codebooks() {
        let a = SecretCodebook::<f64>::derive(b"alice", 32, 4).unwrap();
        let b = SecretCodebook::<f64>::derive(b"bob", 32, 4).unwrap();
        let a1 = SecretCodebook::<f64>::derive_for_frame(b"alice", 32, 4, 1).unwrap();
        assert!(a.matrix().distance(b.matrix()) > 0.1);
        assert!(a.matrix().distance(a1.matrix()) > 0.1);
    }

    #[test]
    fn partition_errors() {
        assert!(matches!(SecretCodebook::<f64>::derive(SECRET, 10, 10), Err(Error::InvalidPartition(_))));
        assert!(matches!(SecretCodebook::<f64>::derive(SECRET, 10, 0), Err(Error::InvalidPartition(_))));
        let cb = SecretCodebook::<f64>::derive_without_training(SECRET, 10, 0).unwrap();
        assert_eq!(cb.c_orth().rows(), 0);
        assert_eq!(cb.payload_len(), 10);
    }

    #[test]
    fn identity_codebook_embeds_with_leading_zeros() {
        let cb = SecretCodebook::<f64>::identity(6, 2).unwrap();
        let s: ComplexMatrix<f64> = gaussian_matrix(3, 4, 1.0, &mut seeded(1)).unwrap();
        let x = cb.embed(&s).unwrap();
        assert_eq!(x, ComplexMatrix::zeros(3, 2).hstack(&s).unwrap());
        assert_eq!(cb.raise(&x).unwrap(), x);
    }

    #[test]
    fn embed_preserves_norm_and_raise_inverts() {
        let cb = SecretCodebook::<f64>::derive(SECRET, 100, 16).unwrap();
        let mut rng = seeded(3);
        let s: ComplexMatrix<f64> = gaussian_matrix(16, 84, 1.0, &mut rng).unwrap();
        let h: ComplexMatrix<f64> = gaussian_matrix(64, 16, 1.0, &mut rng).unwrap();
        let x = cb.embed(&s).unwrap();
        assert!((x.frobenius_norm() - s.frobenius_norm()).abs() <= 1e-10 * s.frobenius_norm());
        let ybar = cb.raise(&(&h * &x)).unwrap();
        let hs = &h * &s;
        assert!(ybar.columns(0, 16).frobenius_norm() <= 1e-10 * ybar.frobenius_norm());
        assert!(ybar.columns(16, 100).distance(&hs) <= 1e-10 * hs.frobenius_norm());
    }

    #[test]
    fn shape_errors() {
        let cb = SecretCodebook::<f64>::derive(SECRET, 10, 2).unwrap();
        assert!(matches!(cb.embed(&ComplexMatrix::zeros(2, 9)), Err(Error::InvalidShape(_))));
        assert!(matches!(cb.raise(&ComplexMatrix::zeros(2, 9)), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn blob_round_trip_and_truncation() {
        let cb = SecretCodebook::<f64>::derive(SECRET, 12, 3).unwrap();
        let blob = cb.to_bytes();
        assert_eq!(blob.len(), 16 + 16 * 144);
        assert_eq!(&blob[0..8], &12u64.to_le_bytes());
        assert_eq!(&blob[8..16], &3u64.to_le_bytes());
        let first = cb.matrix().get(0, 0);
        assert_eq!(&blob[16..24], &first.re.to_le_bytes());
        assert_eq!(&blob[24..32], &first.im.to_le_bytes());
        let back = SecretCodebook::<f64>::from_bytes(&blob).unwrap();
        assert_eq!(back.matrix(), cb.matrix());
        assert_eq!(back.redundancy(), 3);
        assert!(matches!(SecretCodebook::<f64>::from_bytes(&blob[..100]), Err(Error::MalformedBlob(_))));
        assert!(matches!(SecretCodebook::<f64>::from_bytes(&[1, 2, 3]), Err(Error::MalformedBlob(_))));
    }

    #[test]
    fn barrage_transform_rank_one() {
        let mut rng = seeded(8);
        let j: ComplexMatrix<f64> = gaussian_matrix(64, 1, 1.0, &mut rng).unwrap();
        let a = gaussian_matrix::<f64, _>(1, 1, 1.0, &mut rng).unwrap().get(0, 0);
        let w = gaussian_matrix::<f64, _>(1, 100, 1.0, &mut rng).unwrap().scale_complex(a);
        let cb = SecretCodebook::<f64>::derive(SECRET, 100, 16).unwrap();
        let rep = verify_barrage_transform(&j, &w, &cb).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.rank(), 1);
        assert!((rep.sigma_original[0] - rep.sigma_raised[0]).abs() <= 1e-10 * rep.sigma_original[0]);
    }

    #[test]
    fn barrage_transform_rejects_zero_interference() {
        let cb = SecretCodebook::<f64>::derive(SECRET, 10, 2).unwrap();
        let r = verify_barrage_transform(&ComplexMatrix::<f64>::zeros(4, 1), &ComplexMatrix::zeros(1, 10), &cb);
        assert!(matches!(r, Err(Error::DegenerateInput(_))));
    }
}
