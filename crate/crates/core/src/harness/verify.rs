//! Batch property checks of the codebook and jammer models.

use std::fmt;

use crate::airlink::{gen_channels, gen_frame_signals, layout_mash, scale_jammer, BaselineLayout, SystemConfig};
use crate::codebook::{verify_barrage_transform, SecretCodebook, ANGLE_TOL, SIGMA_REL_TOL};
use crate::error::{Error, Result};
use crate::jammers::{gen_jammer_waveform, is_barrage, JammerContext, JammerKind, JammerSpec};
use crate::linalg::rng::{substream, Stage};
use crate::linalg::{compact_svd, gaussian_matrix, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::receivers::{projection_matrix, RaisedFrame};
use crate::stats::{beta_one_cdf, ks_one_sample};

use super::config::RunConfig;

/// Significance level of the KS checks.
pub const KS_ALPHA: f64 = 0.01;
/// Relative residual allowed after noiseless nulling.
pub const NULLING_TOL: f64 = 1e-8;
/// Relative leakage allowed into the training block by embed/raise.
pub const DUALITY_TOL: f64 = 1e-10;
/// Allowed deviation of the raised noise covariance from `N0·I`, in standard
/// errors of a sample-covariance entry.
pub const WHITENESS_SIGMAS: f64 = 5.0;

/// Codebook used by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodebookSource {
    /// Derived from the configured secret, refreshed per draw.
    #[default]
    Secret,
    /// Fixed cyclic-shift permutation (not Haar distributed).
    Permutation,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub config: RunConfig,
    /// Codebook draws for the Haar-uniformity check.
    pub draws: usize,
    /// Seeded instances per jammer kind for the other checks.
    pub instances: usize,
    pub codebook: CodebookSource,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { config: RunConfig::default(), draws: 2000, instances: 50, codebook: CodebookSource::Secret }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, pass: bool, detail: String) {
        self.checks.push(CheckOutcome { name: name.into(), pass, detail });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<28} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Cyclic shift by one sample, as an `L × L` permutation matrix.
pub fn cyclic_shift(frame_len: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_real_fn(frame_len, frame_len, |r, c| if c == (r + 1) % frame_len { 1.0 } else { 0.0 })
}

fn codebook(opts: &VerifyOptions, draw: u64) -> Result<SecretCodebook<f64>> {
    let sys = &opts.config.system;
    match opts.codebook {
        CodebookSource::Secret => {
            SecretCodebook::derive_for_frame(opts.config.secret.as_bytes(), sys.frame_len, sys.redundancy, draw)
        }
        CodebookSource::Permutation => SecretCodebook::from_unitary(cyclic_shift(sys.frame_len), sys.redundancy),
    }
}

/// One jammer instance as seen by a MASH link.
struct Instance {
    h: ComplexMatrix<f64>,
    x: ComplexMatrix<f64>,
    j: ComplexMatrix<f64>,
    w: ComplexMatrix<f64>,
}

fn instance(cfg: &RunConfig, spec: &JammerSpec, cb: &SecretCodebook<f64>, k: u64) -> Result<Instance> {
    let sys = &cfg.system;
    let seed = sys.master_seed;
    let ch = gen_channels::<f64, _>(&sys.with_jammer_antennas(spec.antennas), &mut substream(seed, k, Stage::Channel))?;
    let signals = gen_frame_signals::<f64, _>(sys, &mut substream(seed, k, Stage::Signals))?;
    let x = layout_mash(&signals, cb)?;
    let layout = BaselineLayout::for_config(sys)?;
    let ctx = JammerContext { layout: &layout, x_legit: Some(&x), j: Some(&ch.j) };
    let w_raw = gen_jammer_waveform(spec, &ctx, sys.frame_len, &mut substream(seed, k, Stage::Jammer))?;
    let w = scale_jammer(&w_raw, &ch.j, &ch.h, &x, sys.rho_db)?;
    Ok(Instance { h: ch.h, x, j: ch.j, w })
}

fn check_duality(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let sys = &opts.config.system;
    let mut worst = 0.0f64;
    for k in 0..opts.instances.max(1) as u64 {
        let cb = codebook(opts, k)?;
        let mut rng = substream(sys.master_seed, k, Stage::Aux);
        let h = gaussian_matrix::<f64, _>(sys.bs_antennas, sys.users, 1.0, &mut rng)?;
        let s = gaussian_matrix::<f64, _>(sys.users, cb.payload_len(), 1.0, &mut rng)?;
        let hs = h.matmul(&s)?;
        let raised = cb.raise(&hs.matmul(cb.c_par())?)?;
        worst = worst.max(raised.columns(0, sys.redundancy).frobenius_norm() / hs.frobenius_norm());
    }
    report.push(
        "embed-raise duality",
        worst <= DUALITY_TOL,
        format!("max training leakage {worst:.3e} (tol {DUALITY_TOL:e})"),
    );
    Ok(())
}

fn check_sigma_preservation(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    for kind in JammerKind::ALL {
        let spec = opts.config.jammer_spec(kind);
        let (mut dev, mut angle, mut pass) = (0.0f64, 0.0f64, true);
        for k in 0..opts.instances.max(1) as u64 {
            let cb = codebook(opts, k)?;
            let inst = instance(&opts.config, &spec, &cb, k)?;
            let r = verify_barrage_transform(&inst.j, &inst.w, &cb)?;
            dev = dev.max(r.max_sigma_rel_dev);
            angle = angle.max(r.max_angle);
            pass &= r.pass;
        }
        report.push(
            format!("sigma preservation {}", kind.name()),
            pass,
            format!("max rel sigma dev {dev:.3e} (tol {SIGMA_REL_TOL:e}), max angle {angle:.3e} rad (tol {ANGLE_TOL:e})"),
        );
    }
    Ok(())
}

/// `|e_1^H v|²` of every column of a temporal extension.
fn first_coordinate_energy(v: &ComplexMatrix<f64>) -> impl Iterator<Item = f64> + '_ {
    (0..v.cols()).map(move |c| v.get(0, c).norm_sqr())
}

/// Haar uniformity of the raised temporal extension of a fixed rank-1 jammer.
///
/// The jammer is a single-antenna pilot jammer held fixed across draws, so
/// only the codebook randomizes the raised extension.
fn check_haar_uniformity(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let cfg = &opts.config;
    let spec = cfg.jammer_spec(JammerKind::PilotJam);
    let fixed = instance(cfg, &spec, &codebook(opts, 0)?, 0)?;
    let l = cfg.system.frame_len;
    let mut stats = Vec::with_capacity(opts.draws);
    for d in 0..opts.draws as u64 {
        let cb = codebook(opts, d)?;
        let r = verify_barrage_transform(&fixed.j, &fixed.w, &cb)?;
        stats.extend(first_coordinate_energy(&r.raised_temporal));
    }
    let b = (l - 1) as f64;
    let ks = ks_one_sample(&stats, |x| beta_one_cdf(x, b));
    report.push(
        "haar uniformity",
        ks.p_value > KS_ALPHA,
        format!("KS vs Beta(1,{}) over {} draws: D={:.4}, p={:.4}", l - 1, stats.len(), ks.statistic, ks.p_value),
    );
    Ok(())
}

/// Barrage definition applied to the jammers themselves, without raising.
///
/// Barrage kinds must pass; the pilot jammer is a control that must be rejected.
fn check_barrage_definition(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let cfg = &opts.config;
    let l = cfg.system.frame_len;
    let n = opts.draws.max(1) as u64;
    let identity = SecretCodebook::identity(l, cfg.system.redundancy)?;
    for kind in [JammerKind::Barrage1, JammerKind::EigenBeam, JammerKind::PilotJam] {
        let spec = cfg.jammer_spec(kind);
        let mut stats = Vec::with_capacity(n as usize);
        for k in 0..n {
            let inst = instance(cfg, &spec, &identity, k)?;
            let svd = compact_svd(&inst.j.matmul(&inst.w)?, DEFAULT_RANK_TOL)?;
            // One column per draw keeps the samples independent.
            stats.push(svd.right.get(0, 0).norm_sqr());
        }
        let ks = ks_one_sample(&stats, |x| beta_one_cdf(x, (l - 1) as f64));
        let uniform = ks.p_value > KS_ALPHA;
        let (pass, role) = if is_barrage(kind) { (uniform, "barrage") } else { (!uniform, "control, must fail KS") };
        report.push(
            format!("barrage definition {}", kind.name()),
            pass,
            format!("{role}: D={:.4}, p={:.4}", ks.statistic, ks.p_value),
        );
    }
    Ok(())
}

fn check_nulling(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let cfg = &opts.config;
    let sys = &cfg.system;
    for kind in JammerKind::ALL {
        let spec = cfg.jammer_spec(kind);
        let (mut worst, mut max_rank, mut missed) = (0.0f64, 0usize, 0usize);
        for k in 0..opts.instances.max(1) as u64 {
            let cb = codebook(opts, k)?;
            let inst = instance(cfg, &spec, &cb, k)?;
            let jw_bar = cb.raise(&inst.j.matmul(&inst.w)?)?;
            let true_rank = compact_svd(&jw_bar, DEFAULT_RANK_TOL)?.rank();
            max_rank = max_rank.max(true_rank);
            let y_bar = cb.raise(&(&inst.h.matmul(&inst.x)? + &inst.j.matmul(&inst.w)?))?;
            let frame = RaisedFrame::from_raised(&y_bar, sys.redundancy, sys.pilot_len)?;
            let est = frame.estimate_rank(0.0, cfg.receiver.rank_factor);
            if est < true_rank {
                missed += 1;
            }
            let u = compact_svd(&frame.y_j, DEFAULT_RANK_TOL)?.leading_left(est);
            let residual = projection_matrix(&u).matmul(&jw_bar)?.frobenius_norm() / jw_bar.frobenius_norm();
            worst = worst.max(residual);
        }
        let pass = worst <= NULLING_TOL;
        let mut detail = format!("max residual {worst:.3e} (tol {NULLING_TOL:e}), max I*={max_rank}");
        if max_rank > sys.redundancy {
            detail.push_str(&format!(", violated precondition R ≥ I* (R={}, I*={max_rank})", sys.redundancy));
        } else if missed > 0 {
            detail.push_str(&format!(", rank underestimated in {missed} instances"));
        }
        report.push(format!("noiseless nulling {}", kind.name()), pass, detail);
    }
    Ok(())
}

/// Raised white noise stays white: `E[Ñ^H Ñ] = B·N0·I`.
fn check_noise_whiteness(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let sys = &opts.config.system;
    let l = sys.frame_len;
    let mut acc = ComplexMatrix::<f64>::zeros(l, l);
    let n = opts.instances.max(1) * 4;
    for k in 0..n as u64 {
        let cb = codebook(opts, k)?;
        let noise = gaussian_matrix::<f64, _>(sys.bs_antennas, l, 1.0, &mut substream(sys.master_seed, k, Stage::Noise))?;
        let raised = cb.raise(&noise)?;
        acc = &acc + &raised.adjoint_mul(&raised);
    }
    let cov = acc.scale(1.0 / (n * sys.bs_antennas) as f64);
    let dev = cov.max_abs_diff(&ComplexMatrix::identity(l));
    let tol = WHITENESS_SIGMAS / ((n * sys.bs_antennas) as f64).sqrt();
    report.push(
        "raised noise whiteness",
        dev <= tol,
        format!("max |cov - I| entry {dev:.4} over {n} frames (tol {tol:.4})"),
    );
    Ok(())
}

/// Runs all property checks and reports each with its measured statistics.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    opts.config.validate()?;
    if opts.draws < 2 {
        return Err(Error::InvalidParameter("the uniformity check needs at least 2 draws".into()));
    }
    let mut report = VerifyReport::default();
    check_duality(opts, &mut report)?;
    check_sigma_preservation(opts, &mut report)?;
    check_haar_uniformity(opts, &mut report)?;
    check_barrage_definition(opts, &mut report)?;
    check_nulling(opts, &mut report)?;
    check_noise_whiteness(opts, &mut report)?;
    Ok(report)
}

/// Configuration with the redundancy changed, keeping everything else.
pub fn with_redundancy(cfg: &RunConfig, redundancy: usize) -> RunConfig {
    let mut out = cfg.clone();
    out.system = SystemConfig { redundancy, ..cfg.system.clone() };
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions { draws: 300, instances: 5, ..VerifyOptions::default() }
    }

    #[test]
    fn shift_is_unitary() {
        let p = cyclic_shift(7);
        assert!(p.adjoint_mul(&p).max_abs_diff(&ComplexMatrix::identity(7)) == 0.0);
    }

    #[test]
    fn default_checks_pass() {
        let r = run_verify(&quick()).unwrap();
        assert!(r.all_pass(), "{r}");
        assert_eq!(r.checks.len(), 1 + 8 + 1 + 3 + 8 + 1);
    }

    #[test]
    fn permutation_codebook_fails_uniformity() {
        let r = run_verify(&VerifyOptions { codebook: CodebookSource::Permutation, ..quick() }).unwrap();
        assert!(!r.check("haar uniformity").unwrap().pass);
        assert!(!r.all_pass());
    }

    #[test]
    fn small_redundancy_names_precondition() {
        let opts = VerifyOptions { config: with_redundancy(&RunConfig::default(), 4), ..quick() };
        let r = run_verify(&opts).unwrap();
        let c = r.check("noiseless nulling eigenbeam").unwrap();
        assert!(!c.pass);
        assert!(c.detail.contains("R ≥ I*"), "{}", c.detail);
    }
}
