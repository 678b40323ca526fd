//! Jammer-mitigating receivers.
//!
//! All receivers work on a frame split into a jammer-training block `Y_J`, a
//! pilot block `Y_T` and a data block `Y_D`. For MASH receivers the split is
//! taken from the raised frame (training dimensions first); for the baselines
//! it is gathered from the interleaved sample positions.

mod demap;
mod lmmse;
mod projection;
mod rank;

use std::fmt;
use std::str::FromStr;

use crate::airlink::BaselineLayout;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub use demap::qpsk_demap;
pub use lmmse::{
    covariance_estimate, lmmse_channel_estimate, ls_channel_estimate, receiver_baseline_lmmse,
    receiver_jammerless, receiver_mash_lmmse, LmmseForm,
};
pub use projection::{projection_matrix, receiver_mash_projection};
pub use rank::{estimate_rank, estimate_rank_floored, DEFAULT_RANK_FACTOR, NUMERICAL_RANK_FLOOR};

/// Frame split into training, pilot and data blocks.
#[derive(Debug, Clone)]
pub struct RaisedFrame<T: Real> {
    /// `B × R`
    pub y_j: ComplexMatrix<T>,
    /// `B × T`
    pub y_t: ComplexMatrix<T>,
    /// `B × D`
    pub y_d: ComplexMatrix<T>,
}

impl<T: Real> RaisedFrame<T> {
    /// Splits a raised frame `Ȳ = Y C^H` into its first `R`, next `T` and remaining columns.
    pub fn from_raised(y_bar: &ComplexMatrix<T>, redundancy: usize, pilot_len: usize) -> Result<Self> {
        if redundancy + pilot_len > y_bar.cols() {
            return Err(Error::InvalidShape(format!(
                "R={redundancy} + T={pilot_len} exceeds the {} frame columns",
                y_bar.cols()
            )));
        }
        Ok(Self {
            y_j: y_bar.columns(0, redundancy),
            y_t: y_bar.columns(redundancy, redundancy + pilot_len),
            y_d: y_bar.columns(redundancy + pilot_len, y_bar.cols()),
        })
    }

    /// Gathers the blocks of an interleaved frame.
    pub fn from_baseline(y: &ComplexMatrix<T>, layout: &BaselineLayout) -> Result<Self> {
        if layout.frame_len() != y.cols() {
            return Err(Error::InvalidShape(format!(
                "layout covers {} samples, frame has {}",
                layout.frame_len(),
                y.cols()
            )));
        }
        Ok(Self {
            y_j: y.select_columns(&layout.training),
            y_t: y.select_columns(&layout.pilots),
            y_d: y.select_columns(&layout.data),
        })
    }

    pub fn antennas(&self) -> usize {
        self.y_t.rows()
    }

    pub fn redundancy(&self) -> usize {
        self.y_j.cols()
    }

    /// Absolute level below which training singular values count as round-off.
    pub fn numerical_floor(&self) -> T {
        let energy = self.y_j.frobenius_norm_sqr() + self.y_t.frobenius_norm_sqr() + self.y_d.frobenius_norm_sqr();
        T::lit(NUMERICAL_RANK_FLOOR) * energy.sqrt()
    }

    /// Interference dimension estimate from the training block.
    pub fn estimate_rank(&self, n0: T, factor: T) -> usize {
        estimate_rank_floored(&self.y_j, n0, factor, self.numerical_floor())
    }
}

/// Detector output for one frame.
#[derive(Debug, Clone)]
pub struct DetectionResult<T: Real> {
    /// `Ŝ_D`, `U × D`
    pub s_hat: ComplexMatrix<T>,
    pub bits_hat: Vec<bool>,
    /// Estimated interference dimension, for receivers that use one.
    pub rank_estimate: Option<usize>,
    /// Named intermediate norms.
    pub diagnostics: Vec<(&'static str, f64)>,
}

impl<T: Real> DetectionResult<T> {
    pub(crate) fn new(s_hat: ComplexMatrix<T>, rank_estimate: Option<usize>, diagnostics: Vec<(&'static str, f64)>) -> Self {
        let bits_hat = qpsk_demap(&s_hat);
        Self { s_hat, bits_hat, rank_estimate, diagnostics }
    }
}

/// Knobs shared by the receivers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ReceiverOptions {
    /// Multiple of `√(B·N0)` a training singular value must exceed to count as interference.
    pub rank_factor: f64,
    pub lmmse_form: LmmseForm,
    /// Include thermal noise in the LMMSE-type channel estimate.
    pub chest_with_noise: bool,
}

impl Default for ReceiverOptions {
    fn default() -> Self {
        Self { rank_factor: DEFAULT_RANK_FACTOR, lmmse_form: LmmseForm::Small, chest_with_noise: false }
    }
}

/// Which transmit layout a receiver expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFamily {
    /// Secret subspace embedding, raised at the receiver.
    Embedded,
    /// Interleaved zero training symbols.
    Interleaved,
}

/// Plug-in detector interface used by the harness.
pub trait Receiver<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn family(&self) -> FrameFamily;

    /// Whether the harness should simulate this receiver without the jammer.
    fn jammer_free(&self) -> bool {
        false
    }

    fn detect(&self, frame: &RaisedFrame<T>, pilots: &ComplexMatrix<T>, n0: T) -> Result<DetectionResult<T>>;
}

/// Built-in receivers, by stable name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReceiverKind {
    /// `mash-p`
    MashProjection,
    /// `mash-l`
    MashLmmse,
    /// `baseline-lmmse`
    BaselineLmmse,
    /// `jammerless`
    Jammerless,
    /// `unmitigated`
    Unmitigated,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 5] = [
        ReceiverKind::MashProjection,
        ReceiverKind::MashLmmse,
        ReceiverKind::BaselineLmmse,
        ReceiverKind::Jammerless,
        ReceiverKind::Unmitigated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReceiverKind::MashProjection => "mash-p",
            ReceiverKind::MashLmmse => "mash-l",
            ReceiverKind::BaselineLmmse => "baseline-lmmse",
            ReceiverKind::Jammerless => "jammerless",
            ReceiverKind::Unmitigated => "unmitigated",
        }
    }

    pub fn build<T: Real>(self, options: ReceiverOptions) -> Box<dyn Receiver<T>> {
        Box::new(BuiltinReceiver { kind: self, options })
    }
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReceiverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ReceiverKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown receiver '{s}'")))
    }
}

struct BuiltinReceiver {
    kind: ReceiverKind,
    options: ReceiverOptions,
}

impl<T: Real> Receiver<T> for BuiltinReceiver {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn family(&self) -> FrameFamily {
        match self.kind {
            ReceiverKind::MashProjection | ReceiverKind::MashLmmse => FrameFamily::Embedded,
            _ => FrameFamily::Interleaved,
        }
    }

    fn jammer_free(&self) -> bool {
        self.kind == ReceiverKind::Jammerless
    }

    fn detect(&self, frame: &RaisedFrame<T>, pilots: &ComplexMatrix<T>, n0: T) -> Result<DetectionResult<T>> {
        match self.kind {
            ReceiverKind::MashProjection => receiver_mash_projection(frame, pilots, n0, T::lit(self.options.rank_factor)),
            ReceiverKind::MashLmmse | ReceiverKind::BaselineLmmse => {
                receiver_mash_lmmse(frame, pilots, n0, self.options.lmmse_form, self.options.chest_with_noise)
            }
            ReceiverKind::Jammerless | ReceiverKind::Unmitigated => lmmse::ls_lmmse(frame, pilots, n0),
        }
    }
}
