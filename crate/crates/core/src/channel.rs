//! Multipath channel vectors, steering vectors and the symbol-level
//! Monte-Carlo receiver used to cross-check analytic SINR.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::capacity::Scenario;
use crate::error::{Error, Result};
use crate::geometry::{path_geometry, PathGeometry, Point2D};

/// Propagation speed used for the wave number; gives `lambda / 2 = 0.0625 m` at 2.4 GHz.
pub const PROPAGATION_SPEED: f64 = 3.0e8;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Physical-layer constants shared by every link. Powers are linear milliwatts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub carrier_frequency: f64,
    pub wave_number: f64,
    pub path_loss_exponent: f64,
    pub tx_power: f64,
    pub noise_power: f64,
    pub sinr_threshold: f64,
    pub rate: f64,
}

impl LinkParams {
    /// Builds link parameters from linear quantities; the wave number is derived.
    ///
    /// A zero path-loss exponent (unit attenuation) and zero noise power are
    /// accepted for analysis runs; everything else must be strictly positive.
    pub fn new(
        carrier_frequency: f64,
        path_loss_exponent: f64,
        tx_power: f64,
        noise_power: f64,
        sinr_threshold: f64,
        rate: f64,
    ) -> Result<Self> {
        let positive = [
            ("carrier_frequency", carrier_frequency),
            ("tx_power", tx_power),
            ("sinr_threshold", sinr_threshold),
            ("rate", rate),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("path_loss_exponent", path_loss_exponent),
            ("noise_power", noise_power),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(Self {
            carrier_frequency,
            wave_number: TAU * carrier_frequency / PROPAGATION_SPEED,
            path_loss_exponent,
            tx_power,
            noise_power,
            sinr_threshold,
            rate,
        })
    }

    /// `(beta + 1) / beta`.
    pub fn eta(&self) -> f64 {
        (self.sinr_threshold + 1.0) / self.sinr_threshold
    }

    pub fn wavelength(&self) -> f64 {
        PROPAGATION_SPEED / self.carrier_frequency
    }
}

/// Complex path gains: entry 0 is the direct path, entries `1..=N` the reflections.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(Vec<Complex64>);

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of path amplitudes, the coherent-combining ceiling on `|h^H v|`.
    pub fn amplitude_sum(&self) -> f64 {
        self.0.iter().map(|h| h.norm()).sum()
    }
}

/// `a_i = d_i^-alpha`, `theta_i = k0 * (d_i - d_0)`; the direct path has zero phase.
pub fn channel_from_paths(paths: &PathGeometry, wave_number: f64, alpha: f64) -> ChannelVector {
    let mut entries = Vec::with_capacity(paths.reflected.len() + 1);
    entries.push(Complex64::new(paths.direct.powf(-alpha), 0.0));
    entries.extend(
        paths
            .reflected
            .iter()
            .zip(&paths.excess)
            .map(|(&d, &dd)| Complex64::from_polar(d.powf(-alpha), wave_number * dd)),
    );
    ChannelVector(entries)
}

pub fn channel_vector(
    tx: Point2D,
    rx: Point2D,
    elements: &[Point2D],
    params: &LinkParams,
) -> Result<ChannelVector> {
    let paths = path_geometry(tx, rx, elements)?;
    Ok(channel_from_paths(
        &paths,
        params.wave_number,
        params.path_loss_exponent,
    ))
}

/// Wraps an angle into `[-pi, pi]`, leaving in-range values untouched.
pub fn wrap_phase(phi: f64) -> f64 {
    if (-PI..=PI).contains(&phi) {
        phi
    } else {
        phi - TAU * ((phi + PI) / TAU).floor()
    }
}

/// Reflector phases `phi_1..phi_N`. The steering vector prepends a fixed 1 for the direct path.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
}

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(p) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite phase {p}")));
        }
        Ok(Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            phases: vec![0.0; n],
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn steering(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(1.0, 0.0))
            .chain(self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)))
            .collect()
    }
}

/// `h^H v`: the complex amplitude one transmitter delivers through all paths.
pub fn combined_gain(h: &ChannelVector, v: &PhaseVector) -> Result<Complex64> {
    if h.len() != v.len() + 1 {
        return Err(Error::Dimension {
            expected: h.len(),
            got: v.len() + 1,
        });
    }
    Ok(h.entries()
        .iter()
        .zip(v.steering())
        .map(|(hi, vi)| hi.conj() * vi)
        .sum())
}

/// `|h^H v|^2`.
pub fn effective_gain(h: &ChannelVector, v: &PhaseVector) -> Result<f64> {
    combined_gain(h, v).map(|g| g.norm_sqr())
}

/// Per-link component powers estimated from simulated symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalSinr {
    pub signal_power: f64,
    pub interference_power: f64,
    pub noise_power: f64,
    pub sinr: f64,
    pub symbols_used: usize,
}

/// Symbol-rate baseband simulation of every receiver.
///
/// Each transmitter `k` sends an independent BPSK stream of power `rho^2` drawn
/// from ChaCha8 stream `2k`; receiver `l` adds circular complex Gaussian noise of
/// total power `sigma^2` from stream `2l + 1`, all under the same `seed`. The
/// desired, aggregate-interference and noise components of each received sample
/// are accumulated separately.
pub fn simulate_received(
    scenario: &Scenario,
    phases: &PhaseVector,
    n_symbols: usize,
    seed: u64,
) -> Result<Vec<EmpiricalSinr>> {
    if n_symbols == 0 {
        return Err(Error::InvalidArgument("n_symbols must be >= 1".into()));
    }
    let pairs = scenario.pairs();
    let params = scenario.params();
    let amplitude = params.tx_power.sqrt();
    let noise_std = (params.noise_power / 2.0).sqrt();

    let mut gains = vec![Complex64::new(0.0, 0.0); pairs * pairs];
    for l in 0..pairs {
        for k in 0..pairs {
            gains[l * pairs + k] = amplitude * combined_gain(scenario.channel(l, k), phases)?;
        }
    }

    let stream = |id: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id);
        rng
    };
    let mut symbol_rngs: Vec<ChaCha8Rng> = (0..pairs as u64).map(|k| stream(2 * k)).collect();
    let mut noise_rngs: Vec<ChaCha8Rng> = (0..pairs as u64).map(|l| stream(2 * l + 1)).collect();

    let mut acc = vec![(0.0f64, 0.0f64, 0.0f64); pairs];
    let mut symbols = vec![0.0f64; pairs];
    for _ in 0..n_symbols {
        for (s, rng) in symbols.iter_mut().zip(symbol_rngs.iter_mut()) {
            *s = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        for (l, (sig, intf, noise)) in acc.iter_mut().enumerate() {
            let row = &gains[l * pairs..(l + 1) * pairs];
            let desired = row[l] * symbols[l];
            let interference: Complex64 = row
                .iter()
                .zip(&symbols)
                .enumerate()
                .filter(|(k, _)| *k != l)
                .map(|(_, (g, s))| g * s)
                .sum();
            let rng = &mut noise_rngs[l];
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let n = Complex64::new(re, im) * noise_std;
            *sig += desired.norm_sqr();
            *intf += interference.norm_sqr();
            *noise += n.norm_sqr();
        }
    }

    let count = n_symbols as f64;
    Ok(acc
        .into_iter()
        .map(|(sig, intf, noise)| {
            let (signal_power, interference_power, noise_power) =
                (sig / count, intf / count, noise / count);
            EmpiricalSinr {
                signal_power,
                interference_power,
                noise_power,
                sinr: signal_power / (interference_power + noise_power),
                symbols_used: n_symbols,
            }
        })
        .collect())
}
