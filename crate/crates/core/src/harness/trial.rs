use crate::airlink::{add_noise, gen_channels, gen_frame_signals, layout_baseline, layout_mash, scale_jammer, BaselineLayout};
use crate::codebook::SecretCodebook;
use crate::error::Result;
use crate::jammers::{gen_jammer_waveform, JammerContext, JammerSpec};
use crate::linalg::rng::{substream, Stage};
use crate::receivers::{FrameFamily, RaisedFrame, Receiver, ReceiverKind};
use crate::scalar::Real;

use super::config::RunConfig;

/// Outcome of one simulated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub bit_errors: u64,
    pub bits_total: u64,
    /// `‖Ŝ_D − S_D‖_F`
    pub mer_num: f64,
    /// `‖S_D‖_F`
    pub mer_den: f64,
    /// Interference dimension estimated from the training block.
    pub est_rank: usize,
    /// Index of the per-trial random substreams under `master_seed`.
    pub trial_index: u64,
    pub master_seed: u64,
}

/// Named norms of the intermediate matrices of a trial.
pub type StageTrace = Vec<(String, f64)>;

/// Codebook used for frame `trial_index`.
pub fn frame_codebook<T: Real>(cfg: &RunConfig, trial_index: u64) -> Result<SecretCodebook<T>> {
    let frame = if cfg.system.codebook_refresh { trial_index } else { 0 };
    SecretCodebook::derive_for_frame(cfg.secret.as_bytes(), cfg.system.frame_len, cfg.system.redundancy, frame)
}

/// Runs one frame through channel, jammer, noise and `receiver`.
///
/// Every stage draws from its own substream of `(master_seed, trial_index)`,
/// so two receivers evaluated at the same trial index see the same channels,
/// bits, jammer draw and noise.
pub fn run_trial_with<T: Real>(
    cfg: &RunConfig,
    jammer: Option<&JammerSpec>,
    receiver: &dyn Receiver<T>,
    snr_db: f64,
    trial_index: u64,
) -> Result<(TrialResult, StageTrace)> {
    let sys = &cfg.system;
    sys.validate()?;
    let seed = sys.master_seed;
    let jammer = if receiver.jammer_free() { None } else { jammer };
    let mut trace: StageTrace = Vec::new();
    let mut note = |name: &str, v: f64| trace.push((name.to_string(), v));

    let antennas = jammer.map_or(sys.jammer_antennas, |s| s.antennas);
    let ch = gen_channels::<T, _>(&sys.with_jammer_antennas(antennas), &mut substream(seed, trial_index, Stage::Channel))?;
    let signals = gen_frame_signals::<T, _>(sys, &mut substream(seed, trial_index, Stage::Signals))?;
    let layout = BaselineLayout::for_config(sys)?;
    note("H", ch.h.frobenius_norm().to_f64_lossy());
    note("J", ch.j.frobenius_norm().to_f64_lossy());
    note("S", signals.payload().frobenius_norm().to_f64_lossy());

    let codebook = match receiver.family() {
        FrameFamily::Embedded => Some(frame_codebook::<T>(cfg, trial_index)?),
        FrameFamily::Interleaved => None,
    };
    let x = match &codebook {
        Some(cb) => layout_mash(&signals, cb)?,
        None => layout_baseline(&signals, sys)?.0,
    };
    let hx = ch.h.matmul(&x)?;
    note("X", x.frobenius_norm().to_f64_lossy());
    note("HX", hx.frobenius_norm().to_f64_lossy());

    let clean = match jammer {
        Some(spec) => {
            let ctx = JammerContext { layout: &layout, x_legit: Some(&x), j: Some(&ch.j) };
            let w_raw = gen_jammer_waveform(spec, &ctx, sys.frame_len, &mut substream(seed, trial_index, Stage::Jammer))?;
            let w = scale_jammer(&w_raw, &ch.j, &ch.h, &x, sys.rho_db)?;
            let jw = ch.j.matmul(&w)?;
            note("JW", jw.frobenius_norm().to_f64_lossy());
            &hx + &jw
        }
        None => hx,
    };
    let (y, n0) = add_noise(&clean, &ch.h, &x, snr_db, &mut substream(seed, trial_index, Stage::Noise))?;
    note("Y", y.frobenius_norm().to_f64_lossy());
    note("N0", n0.to_f64_lossy());

    let frame = match &codebook {
        Some(cb) => RaisedFrame::from_raised(&cb.raise(&y)?, sys.redundancy, sys.pilot_len)?,
        None => RaisedFrame::from_baseline(&y, &layout)?,
    };
    note("Y_J", frame.y_j.frobenius_norm().to_f64_lossy());
    note("Y_T", frame.y_t.frobenius_norm().to_f64_lossy());
    note("Y_D", frame.y_d.frobenius_norm().to_f64_lossy());

    let det = receiver.detect(&frame, &signals.pilots, n0)?;
    for (name, v) in &det.diagnostics {
        note(name, *v);
    }
    let est_rank = det
        .rank_estimate
        .unwrap_or_else(|| frame.estimate_rank(n0, T::lit(cfg.receiver.rank_factor)));
    let bit_errors = det
        .bits_hat
        .iter()
        .zip(&signals.data_bits)
        .filter(|(a, b)| a != b)
        .count() as u64;
    let mer_num = det.s_hat.distance(&signals.data).to_f64_lossy();
    let mer_den = signals.data.frobenius_norm().to_f64_lossy();
    note("S_hat", det.s_hat.frobenius_norm().to_f64_lossy());

    Ok((
        TrialResult {
            bit_errors,
            bits_total: signals.data_bits.len() as u64,
            mer_num,
            mer_den,
            est_rank,
            trial_index,
            master_seed: seed,
        },
        trace,
    ))
}

/// [`run_trial_with`] for a built-in receiver in double precision.
pub fn run_trial(
    cfg: &RunConfig,
    jammer: Option<&JammerSpec>,
    receiver: ReceiverKind,
    snr_db: f64,
    trial_index: u64,
) -> Result<TrialResult> {
    let rx = receiver.build::<f64>(cfg.receiver);
    Ok(run_trial_with(cfg, jammer, rx.as_ref(), snr_db, trial_index)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jammers::JammerKind;

    #[test]
    fn clean_jammerless_frame_is_error_free() {
        let cfg = RunConfig::default();
        let r = run_trial(&cfg, None, ReceiverKind::Jammerless, f64::INFINITY, 0).unwrap();
        assert_eq!(r.bit_errors, 0);
        assert_eq!(r.bits_total, 16 * 68 * 2);
        assert!(r.mer_num < 1e-9 * r.mer_den);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = RunConfig::default();
        let spec = cfg.jammer_spec(JammerKind::DynamicBeam);
        for rx in ReceiverKind::ALL {
            let a = run_trial(&cfg, Some(&spec), rx, 10.0, 7).unwrap();
            let b = run_trial(&cfg, Some(&spec), rx, 10.0, 7).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.mer_num.to_bits(), b.mer_num.to_bits());
        }
    }

    #[test]
    fn runs_in_single_precision() {
        let cfg = RunConfig::default();
        let spec = cfg.jammer_spec(JammerKind::Barrage1);
        let rx = ReceiverKind::MashLmmse.build::<f32>(cfg.receiver);
        let (r, trace) = run_trial_with::<f32>(&cfg, Some(&spec), rx.as_ref(), 15.0, 0).unwrap();
        assert!(r.bit_errors < r.bits_total / 20);
        assert!(trace.iter().any(|(k, _)| k == "JW"));
    }

    #[test]
    fn mash_receiver_handles_clean_channel() {
        let cfg = RunConfig::default();
        let r = run_trial(&cfg, None, ReceiverKind::MashProjection, f64::INFINITY, 3).unwrap();
        assert_eq!(r.bit_errors, 0);
        assert_eq!(r.est_rank, 0);
    }
}
