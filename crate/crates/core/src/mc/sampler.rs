//! Draws of `(H, X, W)` and the mutual information density they induce.
//!
//! Every trial owns a ChaCha20 stream: the key is expanded from the campaign
//! seed with `SeedableRng::seed_from_u64`, and the 64-bit stream id is the
//! trial index. Within a trial the draws are consumed in a fixed order (`H`,
//! then `X`, then `W`, each column-major, real part before imaginary part), so
//! any trial can be regenerated in isolation and results do not depend on
//! how trials are scheduled across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use super::linalg::{CMatrix, HermitianFactor};
use super::{InputLaw, TrialConfig};
use crate::error::{Error, Result};
use crate::second_order::InputSpread;

/// One realisation of the channel, the input block and the noise.
///
/// The input is stored as `x_raw` with a per-entry power factor so that
/// constellation inputs keep exact arithmetic: the transmitted block is
/// `√x_power · x_raw`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h: CMatrix,
    pub x_raw: CMatrix,
    pub x_power: f64,
    pub w: CMatrix,
}

impl ChannelDraw {
    /// Draw with unit-power input `x` (no rescaling).
    pub fn new(h: CMatrix, x: CMatrix, w: CMatrix) -> Result<Self> {
        Self::with_input_power(h, x, 1.0, w)
    }

    pub fn with_input_power(h: CMatrix, x_raw: CMatrix, x_power: f64, w: CMatrix) -> Result<Self> {
        let (n_rx, n_tx) = h.shape();
        if x_raw.nrows() != n_tx || w.nrows() != n_rx || w.ncols() != x_raw.ncols() {
            return Err(Error::domain(format!(
                "inconsistent shapes: H {:?}, X {:?}, W {:?}",
                h.shape(),
                x_raw.shape(),
                w.shape()
            )));
        }
        if n_rx == 0 || n_tx == 0 || x_raw.ncols() == 0 {
            return Err(Error::domain("empty matrices"));
        }
        if !(x_power > 0.0 && x_power.is_finite()) {
            return Err(Error::domain("input power factor must be positive"));
        }
        Ok(Self {
            h,
            x_raw,
            x_power,
            w,
        })
    }

    /// Mutual information density in nats per symbol:
    ///
    /// ```text
    /// (1/K) logdet(I + HHᴴ/(σ²K)) + (1/(nK)) [tr Q YYᴴ − tr WWᴴ],
    /// Q = (HHᴴ/K + σ² I)⁻¹,   Y = HX/√K + σW.
    /// ```
    ///
    /// `Q` is never formed: with `G = I + HHᴴ/(σ²K) = LLᴴ` we have
    /// `tr Q YYᴴ = ‖L⁻¹Y‖²_F / σ²`.
    pub fn information_density(&self, sigma2: f64) -> Result<f64> {
        crate::error::ensure_positive("sigma2", sigma2)?;
        let (n_rx, n_tx) = self.h.shape();
        let n = self.x_raw.ncols();
        let k = n_tx as f64;
        let sigma = sigma2.sqrt();

        let gram_scale = Complex64::new(1.0 / (sigma2 * k), 0.0);
        let g = CMatrix::identity(n_rx, n_rx) + (&self.h * self.h.adjoint()) * gram_scale;
        let factor = HermitianFactor::new(g)?;
        let log_det = factor.log_det();

        let x_amp = Complex64::new((self.x_power / k).sqrt(), 0.0);
        let y = (&self.h * &self.x_raw) * x_amp + &self.w * Complex64::new(sigma, 0.0);
        let tr_qyy = factor.inverse_quadratic_trace(&y)? / sigma2;
        let tr_ww: f64 = self.w.iter().map(|z| z.norm_sqr()).sum();

        let value = log_det / k + (tr_qyy - tr_ww) / (n as f64 * k);
        if !value.is_finite() {
            return Err(Error::Decomposition(
                "non-finite information density".into(),
            ));
        }
        Ok(value)
    }

    /// Log-det part `(1/K) logdet(I + HHᴴ/(σ²K))` alone.
    pub fn log_det_term(&self, sigma2: f64) -> Result<f64> {
        let (n_rx, n_tx) = self.h.shape();
        let k = n_tx as f64;
        let g = CMatrix::identity(n_rx, n_rx)
            + (&self.h * self.h.adjoint()) * Complex64::new(1.0 / (sigma2 * k), 0.0);
        Ok(HermitianFactor::new(g)?.log_det() / k)
    }

    /// `a = tr A / K` and `b = tr A² / K` for `A = I_K − XXᴴ/n`.
    pub fn spread(&self) -> Result<InputSpread> {
        let k = self.x_raw.nrows();
        let n = self.x_raw.ncols() as f64;
        let gram = &self.x_raw * self.x_raw.adjoint();
        let mut trace = 0.0;
        let mut frob = 0.0;
        for i in 0..k {
            for j in 0..k {
                let g = gram[(i, j)];
                let a_ij = if i == j {
                    Complex64::new(1.0 - self.x_power * g.re / n, 0.0)
                } else {
                    -g * (self.x_power / n)
                };
                if i == j {
                    trace += a_ij.re;
                }
                frob += a_ij.norm_sqr();
            }
        }
        InputSpread::new(trace / k as f64, frob / k as f64)
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Uniform QPSK symbols `±1 ± i`; the power factor `1/2` gives unit modulus.
fn qpsk_matrix<R: RngCore>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let data: Vec<Complex64> = (0..rows * cols)
        .map(|_| {
            let bits = rng.next_u32() & 3;
            let re = if bits & 1 == 0 { 1.0 } else { -1.0 };
            let im = if bits & 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(re, im)
        })
        .collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Generator for trial `trial_index` of a campaign with the given seed.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

pub fn draw_channel<R: Rng>(rng: &mut R, config: &TrialConfig) -> ChannelDraw {
    let geom = config.geom;
    let (n_rx, n_tx, n) = (geom.n_rx(), geom.n_tx(), geom.blocklength());
    let h = gaussian_matrix(rng, n_rx, n_tx);
    let (x_raw, x_power) = match config.input_law {
        InputLaw::Gaussian => (gaussian_matrix(rng, n_tx, n), 1.0),
        InputLaw::Qpsk => (qpsk_matrix(rng, n_tx, n), 0.5),
    };
    let w = gaussian_matrix(rng, n_rx, n);
    ChannelDraw {
        h,
        x_raw,
        x_power,
        w,
    }
}

/// Information density and input spread of one trial.
///
/// A draw whose factorisation fails is replaced by the next draw from the same
/// stream once; a second failure is returned as an error.
pub fn sample_information_density(
    config: &TrialConfig,
    trial_index: usize,
) -> Result<(f64, InputSpread)> {
    if trial_index >= config.trials {
        return Err(Error::domain(format!(
            "trial index {trial_index} out of range for {} trials",
            config.trials
        )));
    }
    let mut rng = trial_rng(config.seed, trial_index as u64);
    let mut last_err = None;
    for _ in 0..2 {
        let draw = draw_channel(&mut rng, config);
        match draw
            .information_density(config.sigma2)
            .and_then(|i| Ok((i, draw.spread()?)))
        {
            Ok(v) => return Ok(v),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Trial {
        index: trial_index as u64,
        source: Box::new(last_err.expect("two attempts were made")),
    })
}
