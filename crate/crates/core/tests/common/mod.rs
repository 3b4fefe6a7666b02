//! Reference arithmetic for integration tests.
//!
//! Everything here works from raw coordinates with plain complex sums and
//! never calls into the library's model code, so it can serve as an oracle.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FC: f64 = 2.4e9;
pub const ALPHA: f64 = 3.0;
pub const RATE: f64 = 1e5;

pub fn k0() -> f64 {
    2.0 * PI * FC / 3.0e8
}

pub fn beta() -> f64 {
    10f64.powf(0.5)
}

pub fn sigma2() -> f64 {
    1e-9
}

pub fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Element x-coordinates of an array centred at `cx` on the bottom wall.
pub fn bottom_array(cx: f64, n: usize, spacing: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| (cx + (i as f64 - (n as f64 - 1.0) / 2.0) * spacing, 0.0))
        .collect()
}

/// `(amplitude, phase offset)` per path; the direct path comes first with offset 0.
pub fn paths(
    tx: (f64, f64),
    rx: (f64, f64),
    elements: &[(f64, f64)],
    alpha: f64,
) -> Vec<(f64, f64)> {
    let d0 = dist(tx, rx);
    let mut out = vec![(d0.powf(-alpha), 0.0)];
    for &e in elements {
        let d = dist(tx, e) + dist(e, rx);
        out.push((d.powf(-alpha), k0() * (d - d0)));
    }
    out
}

/// `|a_0 + sum_i a_i e^{j(phi_i - theta_i)}|^2`.
pub fn gain(p: &[(f64, f64)], phases: &[f64]) -> f64 {
    let mut s = Complex64::new(p[0].0, 0.0);
    for ((a, th), phi) in p[1..].iter().zip(phases) {
        s += Complex64::from_polar(*a, phi - th);
    }
    s.norm_sqr()
}

/// All `[rx l][tx k]` path sets for a deployment.
pub fn all_paths(
    tx: &[(f64, f64)],
    rx: &[(f64, f64)],
    elements: &[(f64, f64)],
    alpha: f64,
) -> Vec<Vec<Vec<(f64, f64)>>> {
    rx.iter()
        .map(|&r| tx.iter().map(|&t| paths(t, r, elements, alpha)).collect())
        .collect()
}

pub fn sinr(all: &[Vec<Vec<(f64, f64)>>], phases: &[f64], l: usize, rho2: f64, sigma2: f64) -> f64 {
    let interference: f64 = (0..all.len())
        .filter(|&k| k != l)
        .map(|k| gain(&all[l][k], phases))
        .sum();
    rho2 * gain(&all[l][l], phases) / (sigma2 + rho2 * interference)
}

/// Interference term, quadratic lower bound and trigonometric lower bound for link `l`.
pub fn chain(all: &[Vec<Vec<(f64, f64)>>], phases: &[f64], l: usize) -> (f64, f64, f64) {
    let (mut i_term, mut quad, mut trig) = (0.0, 0.0, 0.0);
    for k in (0..all.len()).filter(|&k| k != l) {
        let p = &all[l][k];
        let a0 = p[0].0;
        let psi: Vec<f64> = p[1..]
            .iter()
            .zip(phases)
            .map(|((_, th), phi)| th - phi)
            .collect();
        let amps: Vec<f64> = p[1..].iter().map(|(a, _)| *a).collect();
        let c: f64 = amps.iter().zip(&psi).map(|(a, s)| a * s.cos()).sum();
        let s: f64 = amps.iter().zip(&psi).map(|(a, s)| a * s.sin()).sum();
        i_term += (a0 + c).powi(2) + s.powi(2);
        let s45: f64 = amps
            .iter()
            .zip(&psi)
            .map(|(a, s)| a * (s + PI / 4.0).sin())
            .sum();
        quad += a0 * a0 + 2.0 * a0 * c + s45 * s45;
        let c8: f64 = amps
            .iter()
            .zip(&psi)
            .map(|(a, s)| a * (s - PI / 8.0).cos())
            .sum();
        trig += 2.0 * (2f64.sqrt() + 2.0).sqrt() * a0 * c8;
    }
    (i_term, quad, trig)
}

/// Closed-form capacity bound, or `None` when its denominator is not positive.
#[allow(clippy::too_many_arguments)]
pub fn upper_bound(
    l: f64,
    n: f64,
    d_min: f64,
    d_max: f64,
    alpha: f64,
    sigma2: f64,
    rho2: f64,
    beta: f64,
    rate: f64,
) -> Option<f64> {
    let eta = (beta + 1.0) / beta;
    let den = (eta * sigma2 / rho2 + (2f64.sqrt() + 2.0) * eta * n * l / d_max.powf(2.0 * alpha))
        .sqrt()
        - n / d_min.powf(alpha);
    (den > 0.0).then(|| rate * l / den)
}

/// A random scenario on the 10 m, 10x10 grid with a bottom-wall array.
pub struct RandomCase {
    pub tx: Vec<(f64, f64)>,
    pub rx: Vec<(f64, f64)>,
    pub n: usize,
    pub elements: Vec<(f64, f64)>,
    pub phases: Vec<f64>,
}

pub fn random_case(
    rng: &mut ChaCha8Rng,
    max_pairs: usize,
    n_range: std::ops::RangeInclusive<usize>,
) -> RandomCase {
    loop {
        let pairs = rng.random_range(1..=max_pairs);
        let n = rng.random_range(n_range.clone());
        let elements = bottom_array(5.0, n, 0.0625);
        let mut pts: Vec<(f64, f64)> = Vec::new();
        while pts.len() < 2 * pairs {
            let p = (
                rng.random_range(0..=10) as f64,
                rng.random_range(0..=10) as f64,
            );
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        if pts
            .iter()
            .any(|p| elements.iter().any(|e| dist(*p, *e) < 1e-12))
        {
            continue;
        }
        let rx = pts.split_off(pairs);
        let phases = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        return RandomCase {
            tx: pts,
            rx,
            n,
            elements,
            phases,
        };
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn wrap(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}
