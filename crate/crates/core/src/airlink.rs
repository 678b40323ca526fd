//! Uplink frame generation: channels, pilots and QPSK data, the two frame
//! layouts (secret embedding vs. interleaved zero training symbols), and the
//! jammer-power and SNR normalizations.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codebook::SecretCodebook;
use crate::error::{Error, Result};
use crate::linalg::{compact_svd, gaussian_matrix, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::scalar::{Real, C};

/// Scenario dimensions and power settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemConfig {
    /// `B`
    #[serde(alias = "B")]
    pub bs_antennas: usize,
    /// `U`
    #[serde(alias = "U")]
    pub users: usize,
    /// `I`, antennas of multi-antenna jammers. Single-antenna kinds use 1.
    #[serde(alias = "I")]
    pub jammer_antennas: usize,
    /// `L`
    #[serde(alias = "L")]
    pub frame_len: usize,
    /// `R`
    #[serde(alias = "R")]
    pub redundancy: usize,
    /// `T`, must equal `U`.
    #[serde(alias = "T")]
    pub pilot_len: usize,
    /// Jammer receive power relative to the average UE, in dB.
    #[serde(alias = "rho")]
    pub rho_db: f64,
    #[serde(alias = "snr")]
    pub snr_db: f64,
    #[serde(alias = "seed")]
    pub master_seed: u64,
    /// Derive a fresh codebook for every frame.
    pub codebook_refresh: bool,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            bs_antennas: 64,
            users: 16,
            jammer_antennas: 10,
            frame_len: 100,
            redundancy: 16,
            pilot_len: 16,
            rho_db: 30.0,
            snr_db: 10.0,
            master_seed: 1,
            codebook_refresh: true,
        }
    }
}

impl SystemConfig {
    /// `D = L − R − T`
    pub fn data_len(&self) -> usize {
        self.frame_len.saturating_sub(self.redundancy + self.pilot_len)
    }

    /// `K = L − R`
    pub fn payload_len(&self) -> usize {
        self.frame_len.saturating_sub(self.redundancy)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.bs_antennas == 0 || self.users == 0 || self.jammer_antennas == 0 || self.frame_len == 0 {
            return bad("B, U, I and L must be positive".into());
        }
        if self.pilot_len != self.users {
            return bad(format!("pilot length T={} must equal U={}", self.pilot_len, self.users));
        }
        if self.redundancy + self.pilot_len >= self.frame_len {
            return bad(format!(
                "R={} + T={} leaves no data samples in L={}",
                self.redundancy, self.pilot_len, self.frame_len
            ));
        }
        if self.jammer_antennas >= self.bs_antennas {
            return bad(format!("jammer antennas I={} must be fewer than B={}", self.jammer_antennas, self.bs_antennas));
        }
        if self.rho_db.is_nan() || self.snr_db.is_nan() {
            return bad("rho_db and snr_db must be numbers".into());
        }
        Ok(())
    }

    pub fn with_jammer_antennas(&self, antennas: usize) -> Self {
        Self { jammer_antennas: antennas, ..self.clone() }
    }
}

/// Pilots, data symbols and the bits they carry.
#[derive(Debug, Clone)]
pub struct FrameSignals<T: Real> {
    /// `S_T`, `U × U`, ±1 Hadamard entries.
    pub pilots: ComplexMatrix<T>,
    /// `S_D`, `U × D`, Gray-mapped QPSK.
    pub data: ComplexMatrix<T>,
    /// Two bits per data symbol, symbols in row-major order.
    pub data_bits: Vec<bool>,
}

impl<T: Real> FrameSignals<T> {
    /// `S = [S_T, S_D]`
    pub fn payload(&self) -> ComplexMatrix<T> {
        self.pilots.hstack(&self.data).expect("pilots and data share U rows")
    }
}

/// One block-fading realization.
#[derive(Debug, Clone)]
pub struct ChannelRealization<T: Real> {
    /// `H`, `B × U`
    pub h: ComplexMatrix<T>,
    /// `J`, `B × I`
    pub j: ComplexMatrix<T>,
    /// Per-UE amplitude gains from power control.
    pub ue_gains: Vec<T>,
}

/// Power-control range in dB (symmetric).
pub const POWER_CONTROL_DB: f64 = 3.0;

/// Rayleigh channels with ±3 dB per-UE power control and an i.i.d. `CN(0,1)` jammer channel.
pub fn gen_channels<T: Real, G: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut G) -> Result<ChannelRealization<T>> {
    let (b, u, i) = (cfg.bs_antennas, cfg.users, cfg.jammer_antennas);
    let ue_gains: Vec<T> = (0..u)
        .map(|_| {
            let p_db = rng.random_range(-POWER_CONTROL_DB..=POWER_CONTROL_DB);
            T::lit(10f64.powf(p_db / 20.0))
        })
        .collect();
    let h_tilde = gaussian_matrix::<T, G>(b, u, 1.0, rng)?;
    let h = ComplexMatrix::from_fn(b, u, |r, c| h_tilde.get(r, c) * ue_gains[c]);
    let j = gaussian_matrix::<T, G>(b, i, 1.0, rng)?;
    let svd = compact_svd(&j, T::lit(DEFAULT_RANK_TOL))?;
    if svd.rank() < i.min(b) {
        return Err(Error::Computation("jammer channel is rank deficient".into()));
    }
    Ok(ChannelRealization { h, j, ue_gains })
}

/// Hadamard matrix of order `n` with ±1 entries.
///
/// Powers of two use the Sylvester construction. Otherwise `n = 2^k · (q + 1)`
/// for a prime `q ≡ 3 (mod 4)` is built from a Paley I core.
pub fn hadamard(n: usize) -> Result<Vec<Vec<i8>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Hadamard order must be positive".into()));
    }
    let mut base = n;
    let mut doublings = 0;
    while base.is_multiple_of(2) && (n.is_power_of_two() || !paley_applies(base)) {
        base /= 2;
        doublings += 1;
    }
    let mut h = if base == 1 {
        vec![vec![1i8]]
    } else if paley_applies(base) {
        paley(base)
    } else {
        return Err(Error::InvalidParameter(format!("no Hadamard construction for order {n}")));
    };
    for _ in 0..doublings {
        let m = h.len();
        let mut next = vec![vec![0i8; 2 * m]; 2 * m];
        for r in 0..m {
            for c in 0..m {
                let v = h[r][c];
                next[r][c] = v;
                next[r][c + m] = v;
                next[r + m][c] = v;
                next[r + m][c + m] = -v;
            }
        }
        h = next;
    }
    Ok(h)
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

fn paley_applies(n: usize) -> bool {
    n >= 4 && is_prime(n - 1) && (n - 1) % 4 == 3
}

/// Paley construction I for `n = q + 1`, `q ≡ 3 (mod 4)` prime.
fn paley(n: usize) -> Vec<Vec<i8>> {
    let q = n - 1;
    let mut is_square = vec![false; q];
    for x in 1..q {
        is_square[(x * x) % q] = true;
    }
    let chi = |a: usize| -> i8 {
        if a == 0 {
            0
        } else if is_square[a] {
            1
        } else {
            -1
        }
    };
    // S = [[0, 1^T], [-1, Q]] with Q_ij = chi(j - i); H = I + S
    let mut h = vec![vec![0i8; n]; n];
    for c in 1..n {
        h[0][c] = 1;
        h[c][0] = -1;
    }
    for r in 0..q {
        for c in 0..q {
            h[r + 1][c + 1] = chi((c + q - r) % q);
        }
    }
    for (k, row) in h.iter_mut().enumerate() {
        row[k] += 1;
    }
    h
}

/// Gray-coded QPSK: `(b0, b1) → ((1 − 2 b0) + i (1 − 2 b1)) / √2`.
#[inline]
pub fn qpsk_map<T: Real>(b0: bool, b1: bool) -> C<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = if b0 { -s } else { s };
    let im = if b1 { -s } else { s };
    Complex::new(T::lit(re), T::lit(im))
}

/// Maps `2 · rows · cols` bits to a `rows × cols` QPSK matrix (row-major symbols).
pub fn map_bits<T: Real>(bits: &[bool], rows: usize, cols: usize) -> Result<ComplexMatrix<T>> {
    if bits.len() != 2 * rows * cols {
        return Err(Error::InvalidShape(format!("{} bits for {rows}x{cols} QPSK symbols", bits.len())));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
        let k = 2 * (r * cols + c);
        qpsk_map(bits[k], bits[k + 1])
    }))
}

/// Hadamard pilots and freshly drawn QPSK data.
pub fn gen_frame_signals<T: Real, G: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut G) -> Result<FrameSignals<T>> {
    let u = cfg.users;
    let d = cfg.data_len();
    let had = hadamard(u)?;
    let pilots = ComplexMatrix::from_real_fn(u, u, |r, c| T::lit(had[r][c] as f64));
    let data_bits: Vec<bool> = (0..2 * u * d).map(|_| rng.random::<bool>()).collect();
    let data = map_bits(&data_bits, u, d)?;
    Ok(FrameSignals { pilots, data, data_bits })
}

/// Column positions of the interleaved (non-embedded) frame layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineLayout {
    /// Zero symbols used as jammer training, `floor(j L / R)` for `j < R`.
    pub training: Vec<usize>,
    pub pilots: Vec<usize>,
    pub data: Vec<usize>,
}

impl BaselineLayout {
    pub fn new(frame_len: usize, redundancy: usize, pilot_len: usize) -> Result<Self> {
        if redundancy > frame_len || redundancy + pilot_len > frame_len {
            return Err(Error::InvalidPartition(format!(
                "R={redundancy}, T={pilot_len} do not fit in L={frame_len}"
            )));
        }
        let training: Vec<usize> = (0..redundancy).map(|j| j * frame_len / redundancy).collect();
        let mut is_training = vec![false; frame_len];
        for &t in &training {
            is_training[t] = true;
        }
        let rest: Vec<usize> = (0..frame_len).filter(|&k| !is_training[k]).collect();
        let (pilots, data) = rest.split_at(pilot_len);
        Ok(Self { training, pilots: pilots.to_vec(), data: data.to_vec() })
    }

    pub fn for_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(cfg.frame_len, cfg.redundancy, cfg.pilot_len)
    }

    pub fn frame_len(&self) -> usize {
        self.training.len() + self.pilots.len() + self.data.len()
    }
}

/// Secret-embedding layout `X = [S_T, S_D] · C_par`.
pub fn layout_mash<T: Real>(signals: &FrameSignals<T>, cb: &SecretCodebook<T>) -> Result<ComplexMatrix<T>> {
    let k = signals.pilots.cols() + signals.data.cols();
    if k != cb.payload_len() {
        return Err(Error::InvalidShape(format!(
            "T + D = {k} does not match codebook payload length K={}",
            cb.payload_len()
        )));
    }
    cb.embed(&signals.payload())
}

/// Interleaved layout: `R` evenly spread zero columns, then pilots and data in order.
pub fn layout_baseline<T: Real>(
    signals: &FrameSignals<T>,
    cfg: &SystemConfig,
) -> Result<(ComplexMatrix<T>, BaselineLayout)> {
    let layout = BaselineLayout::for_config(cfg)?;
    if signals.pilots.cols() != layout.pilots.len() || signals.data.cols() != layout.data.len() {
        return Err(Error::InvalidShape("frame signals do not match the configured layout".into()));
    }
    let mut x = ComplexMatrix::zeros(signals.pilots.rows(), cfg.frame_len);
    x.scatter_columns(&layout.pilots, &signals.pilots);
    x.scatter_columns(&layout.data, &signals.data);
    Ok((x, layout))
}

/// Scales `W_raw` so that `‖J W‖² = 10^{ρ/10} · ‖H X‖² / U` for the realized frame.
pub fn scale_jammer<T: Real>(
    w_raw: &ComplexMatrix<T>,
    j: &ComplexMatrix<T>,
    h: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    rho_db: f64,
) -> Result<ComplexMatrix<T>> {
    let jw = j.matmul(w_raw)?;
    let jam = jw.frobenius_norm_sqr();
    if jam == T::zero() {
        return Err(Error::CannotNormalize("jammer is silent for the whole frame".into()));
    }
    let legit = h.matmul(x)?.frobenius_norm_sqr();
    let target = T::lit(10f64.powf(rho_db / 10.0)) * legit / T::from_count(h.cols());
    Ok(w_raw.scale((target / jam).sqrt()))
}

/// Adds white noise at the given SNR; returns `(Y, N0)`.
///
/// `N0 = ‖H X‖² / (B L 10^{SNR/10})`. An infinite SNR adds nothing and returns `N0 = 0`.
pub fn add_noise<T: Real, G: Rng + ?Sized>(
    clean: &ComplexMatrix<T>,
    h: &ComplexMatrix<T>,
    x: &ComplexMatrix<T>,
    snr_db: f64,
    rng: &mut G,
) -> Result<(ComplexMatrix<T>, T)> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(format!("SNR {snr_db} dB")));
    }
    if snr_db == f64::INFINITY {
        return Ok((clean.clone(), T::zero()));
    }
    let (b, l) = clean.shape();
    let legit = h.matmul(x)?.frobenius_norm_sqr().to_f64_lossy();
    let n0 = legit / ((b * l) as f64 * 10f64.powf(snr_db / 10.0));
    let noise = gaussian_matrix::<T, G>(b, l, n0, rng)?;
    Ok((clean + &noise, T::lit(n0)))
}
