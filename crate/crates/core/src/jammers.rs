//! Beamformed jammer waveforms `w_k = A_k w̃_k` for the eight jammer behaviors.
//!
//! Jammers that target particular samples (data, pilot, multi-antenna data)
//! always aim at the nominal interleaved-layout positions: they never learn
//! the secret codebook.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::airlink::BaselineLayout;
use crate::error::{Error, Result};
use crate::linalg::{compact_svd, complex_normal, gaussian_matrix, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JammerKind {
    /// ① i.i.d. `CN(0,1)` in every sample, one antenna.
    Barrage1,
    /// ② single antenna, only on data samples.
    DataJam,
    /// ③ single antenna, only on pilot samples.
    PilotJam,
    /// ④ single antenna, a random `α` fraction of samples.
    SparseJam,
    /// ⑤ eigenbeamforming along the right singular vectors of `J`.
    EigenBeam,
    /// ⑥ `I` antennas, only on data samples.
    MultiData,
    /// ⑦ dynamic antenna subsets, held with probability `hold_prob` per sample.
    DynamicBeam,
    /// ⑧ replays the first `I` UE transmit rows with a delay.
    Repeat,
}

impl JammerKind {
    pub const ALL: [JammerKind; 8] = [
        JammerKind::Barrage1,
        JammerKind::DataJam,
        JammerKind::PilotJam,
        JammerKind::SparseJam,
        JammerKind::EigenBeam,
        JammerKind::MultiData,
        JammerKind::DynamicBeam,
        JammerKind::Repeat,
    ];

    /// Stable CLI name.
    pub fn name(self) -> &'static str {
        match self {
            JammerKind::Barrage1 => "barrage",
            JammerKind::DataJam => "data",
            JammerKind::PilotJam => "pilot",
            JammerKind::SparseJam => "sparse",
            JammerKind::EigenBeam => "eigenbeam",
            JammerKind::MultiData => "multidata",
            JammerKind::DynamicBeam => "dynamic",
            JammerKind::Repeat => "repeat",
        }
    }

    pub fn is_single_antenna(self) -> bool {
        matches!(self, JammerKind::Barrage1 | JammerKind::DataJam | JammerKind::PilotJam | JammerKind::SparseJam)
    }
}

impl fmt::Display for JammerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JammerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        JammerKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown jammer kind '{s}'")))
    }
}

/// Whether the kind's temporal extension is uniform on the unit sphere
/// without any codebook applied.
pub fn is_barrage(kind: JammerKind) -> bool {
    matches!(kind, JammerKind::Barrage1 | JammerKind::EigenBeam)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JammerSpec {
    pub kind: JammerKind,
    /// `I`
    pub antennas: usize,
    /// `α`, sparse jammer only.
    pub sparse_fraction: f64,
    /// Active rows per beamforming draw, dynamic jammer only.
    pub active_row_cap: usize,
    /// Probability that `A_{k+1} = A_k`, dynamic jammer only.
    pub hold_prob: f64,
    /// Repeat jammer delay in samples.
    pub repeat_delay: usize,
}

impl JammerSpec {
    /// Default parameters; single-antenna kinds ignore `multi_antennas`.
    pub fn new(kind: JammerKind, multi_antennas: usize) -> Self {
        Self {
            kind,
            antennas: if kind.is_single_antenna() { 1 } else { multi_antennas },
            sparse_fraction: 0.1,
            active_row_cap: 8,
            hold_prob: 0.95,
            repeat_delay: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.antennas == 0 {
            return bad("jammer needs at least one antenna".into());
        }
        if self.kind.is_single_antenna() && self.antennas != 1 {
            return bad(format!("{} jammer is single-antenna, got I={}", self.kind, self.antennas));
        }
        if !(self.sparse_fraction > 0.0 && self.sparse_fraction <= 1.0) {
            return bad(format!("sparse fraction {} outside (0, 1]", self.sparse_fraction));
        }
        if !(0.0..=1.0).contains(&self.hold_prob) {
            return bad(format!("hold probability {} outside [0, 1]", self.hold_prob));
        }
        if self.kind == JammerKind::DynamicBeam && (self.active_row_cap == 0 || self.active_row_cap > self.antennas) {
            return bad(format!("active row cap {} must lie in 1..={}", self.active_row_cap, self.antennas));
        }
        if self.repeat_delay == 0 {
            return bad("repeat delay must be at least 1".into());
        }
        Ok(())
    }
}

/// What a jammer may observe when shaping its waveform.
#[derive(Debug, Clone, Copy)]
pub struct JammerContext<'a, T: Real> {
    /// Nominal sample roles of the interleaved layout.
    pub layout: &'a BaselineLayout,
    /// Actual UE transmit matrix (repeat jammer).
    pub x_legit: Option<&'a ComplexMatrix<T>>,
    /// Jammer channel (eigenbeamforming jammer).
    pub j: Option<&'a ComplexMatrix<T>>,
}

fn on_columns<T: Real, G: Rng + ?Sized>(rows: usize, len: usize, cols: &[usize], rng: &mut G) -> Result<ComplexMatrix<T>> {
    let block = gaussian_matrix::<T, G>(rows, cols.len(), 1.0, rng)?;
    let mut w = ComplexMatrix::zeros(rows, len);
    w.scatter_columns(cols, &block);
    Ok(w)
}

/// Unnormalized jammer transmit matrix `W_raw` (`I × L`).
pub fn gen_jammer_waveform<T: Real, G: Rng + ?Sized>(
    spec: &JammerSpec,
    ctx: &JammerContext<'_, T>,
    frame_len: usize,
    rng: &mut G,
) -> Result<ComplexMatrix<T>> {
    spec.validate()?;
    if ctx.layout.frame_len() != frame_len {
        return Err(Error::InvalidShape(format!(
            "layout covers {} samples, frame has {frame_len}",
            ctx.layout.frame_len()
        )));
    }
    let i = spec.antennas;
    match spec.kind {
        JammerKind::Barrage1 => gaussian_matrix(i, frame_len, 1.0, rng),
        JammerKind::DataJam | JammerKind::MultiData => on_columns(i, frame_len, &ctx.layout.data, rng),
        JammerKind::PilotJam => on_columns(i, frame_len, &ctx.layout.pilots, rng),
        JammerKind::SparseJam => {
            let count = ((spec.sparse_fraction * frame_len as f64).ceil() as usize).clamp(1, frame_len);
            let mut cols = index::sample(rng, frame_len, count).into_vec();
            cols.sort_unstable();
            on_columns(i, frame_len, &cols, rng)
        }
        JammerKind::EigenBeam => {
            let j = ctx.j.ok_or_else(|| Error::MissingContext("eigenbeamforming needs the jammer channel J".into()))?;
            if j.cols() != i {
                return Err(Error::InvalidShape(format!("J has {} columns, jammer has {i} antennas", j.cols())));
            }
            let svd = compact_svd(j, T::lit(DEFAULT_RANK_TOL))?;
            let w_tilde = gaussian_matrix::<T, G>(svd.rank(), frame_len, 1.0, rng)?;
            Ok(&svd.right * &w_tilde)
        }
        JammerKind::DynamicBeam => Ok(dynamic_beam(spec, frame_len, rng)?.0),
        JammerKind::Repeat => {
            let x = ctx
                .x_legit
                .ok_or_else(|| Error::MissingContext("repeat jammer needs the UE transmit matrix".into()))?;
            if i > x.rows() {
                return Err(Error::InvalidParameter(format!("repeat jammer with I={i} > U={}", x.rows())));
            }
            if x.cols() != frame_len {
                return Err(Error::InvalidShape(format!("UE transmit matrix has {} columns", x.cols())));
            }
            let d = spec.repeat_delay.min(frame_len);
            let mut w = ComplexMatrix::zeros(i, frame_len);
            let src = x.row_range(0, i).columns(0, frame_len - d);
            let dst: Vec<usize> = (d..frame_len).collect();
            w.scatter_columns(&dst, &src);
            Ok(w)
        }
    }
}

/// Dynamic-beamforming waveform and the number of distinct `A_k` used.
pub fn dynamic_beam<T: Real, G: Rng + ?Sized>(
    spec: &JammerSpec,
    frame_len: usize,
    rng: &mut G,
) -> Result<(ComplexMatrix<T>, usize)> {
    let i = spec.antennas;
    let active = spec.active_row_cap.min(i);
    let draw_beam = |rng: &mut G| -> Result<ComplexMatrix<T>> {
        let rows = index::sample(rng, i, active).into_vec();
        let mut a = ComplexMatrix::zeros(i, i);
        for r in rows {
            for c in 0..i {
                a.set(r, c, complex_normal(rng, 1.0));
            }
        }
        Ok(a)
    };
    let mut w = ComplexMatrix::zeros(i, frame_len);
    let mut beam = draw_beam(rng)?;
    let mut distinct = 1;
    for k in 0..frame_len {
        if k > 0 && !rng.random_bool(spec.hold_prob) {
            beam = draw_beam(rng)?;
            distinct += 1;
        }
        let w_tilde = gaussian_matrix::<T, G>(i, 1, 1.0, rng)?;
        let col = &beam * &w_tilde;
        w.scatter_columns(&[k], &col);
    }
    Ok((w, distinct))
}
