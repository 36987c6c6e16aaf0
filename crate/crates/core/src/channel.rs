//! Seeded channel generation: geometry-driven path loss, Rayleigh fading from
//! the RIS to the receiver, Rician fading from the transmitter to the RIS.
//!
//! Randomness is organized as named substreams derived from a `(seed, trial)`
//! pair, so the receive channel, the scattered transmit component, and the
//! precoder initialization never share a stream: consuming more draws from
//! one can never perturb the others, and trials can run on any number of
//! threads with identical results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{ComplexMatrix, ComplexRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("geometry points must be pairwise distinct")]
    CoincidentPoints,
    #[error("path-loss parameters invalid: {0}")]
    InvalidPathLoss(String),
    #[error("dimensions must be at least 1 (n={n}, m={m})")]
    EmptyDimensions { n: usize, m: usize },
}

/// Two-dimensional deployment geometry, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
    pub ris: [f64; 2],
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            tx: [0.0, 0.0],
            rx: [52.0, 0.0],
            ris: [50.0, 2.0],
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.tx == self.rx || self.tx == self.ris || self.rx == self.ris {
            return Err(ChannelError::CoincidentPoints);
        }
        Ok(())
    }

    fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    /// Transmitter-to-RIS distance.
    pub fn d_it(&self) -> f64 {
        Self::distance(self.tx, self.ris)
    }

    /// RIS-to-receiver distance.
    pub fn d_ri(&self) -> f64 {
        Self::distance(self.ris, self.rx)
    }
}

/// Distance-dependent path loss `L(d) = L₀ (d/D₀)^{−α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Reference path loss at `d0_m`, in dB.
    pub l0_db: f64,
    /// Reference distance, meters.
    pub d0_m: f64,
    /// Exponent for the RIS-to-receiver link.
    pub alpha_ri: f64,
    /// Exponent for the transmitter-to-RIS link.
    pub alpha_it: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            l0_db: -30.0,
            d0_m: 1.0,
            alpha_ri: 2.8,
            alpha_it: 2.0,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.d0_m <= 0.0 {
            return Err(ChannelError::InvalidPathLoss(format!(
                "reference distance must be positive, got {}",
                self.d0_m
            )));
        }
        if self.alpha_ri < 0.0 || self.alpha_it < 0.0 {
            return Err(ChannelError::InvalidPathLoss(
                "exponents must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Which link a path-loss evaluation applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    RisToReceiver,
    TransmitterToRis,
}

/// Linear power gain `10^(l0_db/10) · (d/d0)^{−α}` for the selected link.
pub fn path_loss(d_m: f64, params: &PathLossParams, link: Link) -> Result<f64, ChannelError> {
    params.validate()?;
    if d_m <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(d_m));
    }
    let alpha = match link {
        Link::RisToReceiver => params.alpha_ri,
        Link::TransmitterToRis => params.alpha_it,
    };
    Ok(10f64.powf(params.l0_db / 10.0) * (d_m / params.d0_m).powf(-alpha))
}

/// One realization of the two channel segments, large-scale gains included.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// RIS-to-receiver channel, `1×N`.
    pub h_ri: ComplexRow,
    /// Transmitter-to-RIS channel, `N×M`.
    pub h_it: ComplexMatrix,
}

/// Substream name for the RIS-to-receiver fading draws.
pub const STREAM_H_RI: &str = "h_ri";
/// Substream name for the scattered transmitter-to-RIS fading draws.
pub const STREAM_H_IT_NLOS: &str = "h_it_nlos";
/// Substream name for precoder initialization inside iterative optimizers.
pub const STREAM_PRECODER: &str = "precoder";

/// Factory of named, independent RNG substreams for one `(seed, trial)` pair.
#[derive(Debug, Clone, Copy)]
pub struct RngStreams {
    seed: u64,
    trial: u64,
}

impl RngStreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self { seed, trial }
    }

    /// Deterministic stream keyed by `(seed, trial, name)`. The key goes into
    /// the ChaCha seed bytes directly, so streams with different names are
    /// statistically independent and insensitive to each other's consumption.
    pub fn stream(&self, name: &str) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.trial.to_le_bytes());
        key[16..24].copy_from_slice(&fnv1a(name.as_bytes()).to_le_bytes());
        key[24..32].copy_from_slice(&STREAM_KEY_DOMAIN.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

// Fixed domain-separation constant for the stream keys.
const STREAM_KEY_DOMAIN: u64 = 0x62D5_5EED_0001_0001;

const fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    let mut i = 0;
    while i < bytes.len() {
        hash ^= bytes[i] as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
        i += 1;
    }
    hash
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // Standard complex Gaussian: unit variance split across both parts.
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unit-modulus steering vector of a half-wavelength uniform linear array
/// laid along the x-axis: entry `k` is `e^{jπk·cosθ}` with `θ` the angle
/// between the link direction and the array axis.
fn steering_vector(len: usize, cos_angle: f64) -> Vec<Complex64> {
    (0..len)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * cos_angle))
        .collect()
}

/// Draws one channel realization.
///
/// `h_RI = √L_RI · g` with `g` i.i.d. standard complex Gaussian, and
/// `H_IT = √L_IT (√(K/(1+K)) H_LoS + √(1/(1+K)) H_NLoS)` with
/// `K = 10^(rician_k_db/10)`.
///
/// The line-of-sight component is the deterministic rank-one outer product of
/// half-wavelength ULA steering vectors at the RIS and the transmitter, with
/// departure/arrival angles taken from the geometry (both arrays along the
/// x-axis). Its entries are unit modulus, so `‖H_LoS‖_F² = NM` and the
/// average channel energy is independent of `K`.
pub fn sample_channels(
    n: usize,
    m: usize,
    geometry: &Geometry,
    params: &PathLossParams,
    rician_k_db: f64,
    streams: &RngStreams,
) -> Result<ChannelRealization, ChannelError> {
    if n == 0 || m == 0 {
        return Err(ChannelError::EmptyDimensions { n, m });
    }
    geometry.validate()?;
    let l_ri = path_loss(geometry.d_ri(), params, Link::RisToReceiver)?;
    let l_it = path_loss(geometry.d_it(), params, Link::TransmitterToRis)?;

    let mut rng_ri = streams.stream(STREAM_H_RI);
    let gain_ri = l_ri.sqrt();
    let h_ri =
        ComplexRow::from_iterator(n, (0..n).map(|_| complex_gaussian(&mut rng_ri) * gain_ri));

    let k = 10f64.powf(rician_k_db / 10.0);
    let los_weight = (k / (1.0 + k)).sqrt();
    let nlos_weight = (1.0 / (1.0 + k)).sqrt();
    let gain_it = l_it.sqrt();

    // Departure angle at the transmitter toward the RIS and arrival angle at
    // the RIS from the transmitter, both measured against the x-axis.
    let d_it = geometry.d_it();
    let cos_dep = (geometry.ris[0] - geometry.tx[0]) / d_it;
    let cos_arr = (geometry.tx[0] - geometry.ris[0]) / d_it;
    let a_ris = steering_vector(n, cos_arr);
    let a_tx = steering_vector(m, cos_dep);

    let mut rng_nlos = streams.stream(STREAM_H_IT_NLOS);
    let mut h_it = ComplexMatrix::zeros(n, m);
    // Column-major fill: the first columns of a wider draw coincide with a
    // narrower one, keeping antenna-count sweeps comparable per trial.
    for j in 0..m {
        for i in 0..n {
            let los = a_ris[i] * a_tx[j];
            let nlos = complex_gaussian(&mut rng_nlos);
            h_it[(i, j)] = (los * los_weight + nlos * nlos_weight) * gain_it;
        }
    }

    Ok(ChannelRealization { h_ri, h_it })
}
