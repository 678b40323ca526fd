//! Link-level simulation of jammer mitigation through secret temporal
//! subspace embeddings (MASH) in the multi-user MIMO uplink.
//!
//! The transmitter embeds its length-`K` signal in a secret `K`-dimensional
//! row subspace of a Haar unitary codebook; the receiver "raises" the frame
//! with the codebook's adjoint, which turns any jammer into a barrage jammer
//! that the first `R` raised samples can be used to estimate and null.
//!
//! Numeric code is generic over [`Real`] (`f32`/`f64`); the `*64` aliases
//! below fix the scalar to `f64`, which is what the harness and CLI use.

pub mod airlink;
pub mod codebook;
pub mod error;
pub mod harness;
pub mod jammers;
pub mod linalg;
pub mod receivers;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type CompactSvd64 = linalg::CompactSvd<f64>;
pub type SecretCodebook64 = codebook::SecretCodebook<f64>;
pub type FrameSignals64 = airlink::FrameSignals<f64>;
pub type ChannelRealization64 = airlink::ChannelRealization<f64>;
pub type RaisedFrame64 = receivers::RaisedFrame<f64>;
pub type DetectionResult64 = receivers::DetectionResult<f64>;
