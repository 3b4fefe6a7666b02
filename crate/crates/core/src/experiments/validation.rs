//! Seeded cross-module property checks with counterexample reporting.
//!
//! The reference computations here go straight from node and element
//! coordinates to complex path sums, without the channel or capacity modules,
//! so an agreement is evidence rather than a tautology.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{bound_terms, sinr, Scenario};
use crate::channel::{
    db_to_linear, linear_to_db, simulate_received, wrap_phase, LinkParams, PhaseVector,
};
use crate::error::{Error, Result};
use crate::geometry::{ArrayLayout, Deployment, Point2D, Room};
use crate::optimizer::{
    optimize_phases, search_placements, Objective, PhaseMethod, PhaseSearchConfig, PlacementMode,
    PlacementSearchConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// Interference term >= its quadratic lower bound >= its trigonometric lower bound.
    InequalityChain,
    /// Monte-Carlo SINR agrees with the closed form.
    McSinr,
    /// A single unobstructed link's phases converge to path-difference alignment.
    PhaseAlignment,
    /// The exhaustive phase grid matches an independent brute force.
    ExhaustiveOracle,
    /// Exhaustive placement search on a 2x2 grid matches an independent brute force.
    PlacementOracle,
}

pub const ALL_PROPERTIES: [Property; 5] = [
    Property::InequalityChain,
    Property::McSinr,
    Property::PhaseAlignment,
    Property::ExhaustiveOracle,
    Property::PlacementOracle,
];

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::InequalityChain => "inequality_chain",
            Property::McSinr => "mc_sinr",
            Property::PhaseAlignment => "phase_alignment",
            Property::ExhaustiveOracle => "exhaustive_oracle",
            Property::PlacementOracle => "placement_oracle",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        ALL_PROPERTIES.into_iter().find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub properties: Vec<Property>,
    pub chain_cases: usize,
    /// Relative slack allowed in each inequality.
    pub chain_tolerance: f64,
    pub mc_cases: usize,
    pub mc_symbols: usize,
    pub mc_tolerance_db: f64,
    pub oracle_cases: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            properties: ALL_PROPERTIES.to_vec(),
            chain_cases: 1000,
            chain_tolerance: 1e-9,
            mc_cases: 20,
            mc_symbols: 100_000,
            mc_tolerance_db: 0.2,
            oracle_cases: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub property: Property,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed discrepancy, in the property's own unit.
    pub worst: f64,
    /// Description of the first failing case.
    pub counterexample: Option<String>,
}

/// Runs the selected properties; each one draws from its own seeded stream.
pub fn run_validation_suite(
    seed: u64,
    options: &ValidationOptions,
) -> Result<Vec<PropertyOutcome>> {
    options
        .properties
        .iter()
        .map(|&p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            match p {
                Property::InequalityChain => inequality_chain(&mut rng, options),
                Property::McSinr => mc_sinr(&mut rng, options),
                Property::PhaseAlignment => phase_alignment(),
                Property::ExhaustiveOracle => exhaustive_oracle(&mut rng, options),
                Property::PlacementOracle => placement_oracle(),
            }
        })
        .collect()
}

fn default_params() -> LinkParams {
    LinkParams::new(2.4e9, 3.0, 1.0, 1e-9, db_to_linear(5.0), 1e5)
        .expect("constant parameters are valid")
}

struct Tally {
    property: Property,
    cases: usize,
    worst: f64,
    counterexample: Option<String>,
}

impl Tally {
    fn new(property: Property) -> Self {
        Self {
            property,
            cases: 0,
            worst: 0.0,
            counterexample: None,
        }
    }

    fn record(&mut self, discrepancy: f64, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if discrepancy > self.worst || discrepancy.is_nan() {
            self.worst = discrepancy;
        }
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            property: self.property,
            passed: self.counterexample.is_none(),
            cases: self.cases,
            worst: self.worst,
            counterexample: self.counterexample,
        }
    }
}

/// Random scenario in a 10 m room on a 10x10 grid with one array of up to
/// `max_elements` at the bottom wall midpoint.
fn random_scenario(
    rng: &mut ChaCha8Rng,
    max_pairs: usize,
    max_elements: usize,
    params: LinkParams,
) -> Scenario {
    let room = Room::new(10.0, 10).expect("constant room is valid");
    loop {
        let pairs = rng.random_range(1..=max_pairs);
        let n = rng.random_range(0..=max_elements);
        let layouts = if n == 0 {
            Vec::new()
        } else {
            vec![ArrayLayout::wall_midpoint(&room, 0, n, 0.0625).expect("array fits the wall")]
        };
        let mut points: Vec<Point2D> = Vec::with_capacity(2 * pairs);
        while points.len() < 2 * pairs {
            let p = Point2D::new(
                rng.random_range(0..=10) as f64,
                rng.random_range(0..=10) as f64,
            );
            if !points.contains(&p) {
                points.push(p);
            }
        }
        let rx = points.split_off(pairs);
        let deployment = Deployment::new(points, rx).expect("distinct grid points");
        match Scenario::new(room, layouts, deployment, params) {
            Ok(s) => return s,
            // A node landed on an element; draw again.
            Err(Error::DegenerateGeometry(_)) => continue,
            Err(e) => panic!("random scenario construction failed: {e}"),
        }
    }
}

fn random_phases(rng: &mut ChaCha8Rng, n: usize) -> PhaseVector {
    PhaseVector::new((0..n).map(|_| rng.random_range(-PI..PI)).collect()).expect("finite phases")
}

fn describe(s: &Scenario, phases: &PhaseVector) -> String {
    let pts = |v: &[Point2D]| {
        v.iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "tx=[{}] rx=[{}] elements={} phases={:?}",
        pts(s.deployment().tx()),
        pts(s.deployment().rx()),
        s.element_count(),
        phases.phases()
    )
}

fn excess(lower: f64, upper: f64) -> f64 {
    let scale = lower.abs().max(upper.abs()).max(f64::MIN_POSITIVE);
    ((lower - upper) / scale).max(0.0)
}

fn inequality_chain(rng: &mut ChaCha8Rng, opt: &ValidationOptions) -> Result<PropertyOutcome> {
    let mut tally = Tally::new(Property::InequalityChain);
    for _ in 0..opt.chain_cases {
        let s = random_scenario(rng, 4, 16, default_params());
        let phases = random_phases(rng, s.element_count());
        for l in 0..s.pairs() {
            let t = bound_terms(&s, &phases, l)?;
            let worst =
                excess(t.am_gm_lower, t.interference).max(excess(t.trig_lower, t.am_gm_lower));
            tally.record(worst, worst <= opt.chain_tolerance, || {
                format!(
                    "link {l}: interference={:e} quadratic={:e} trig={:e}; {}",
                    t.interference,
                    t.am_gm_lower,
                    t.trig_lower,
                    describe(&s, &phases)
                )
            });
        }
    }
    Ok(tally.finish())
}

fn mc_sinr(rng: &mut ChaCha8Rng, opt: &ValidationOptions) -> Result<PropertyOutcome> {
    let mut tally = Tally::new(Property::McSinr);
    for case in 0..opt.mc_cases {
        let s = random_scenario(rng, 4, 16, default_params());
        let phases = random_phases(rng, s.element_count());
        let empirical = simulate_received(&s, &phases, opt.mc_symbols, case as u64)?;
        for (l, e) in empirical.iter().enumerate() {
            let analytic = sinr(&s, &phases, l)?;
            let gap = (linear_to_db(e.sinr) - linear_to_db(analytic)).abs();
            tally.record(gap, gap <= opt.mc_tolerance_db, || {
                format!(
                    "link {l}: empirical={:.6} dB analytic={:.6} dB; {}",
                    linear_to_db(e.sinr),
                    linear_to_db(analytic),
                    describe(&s, &phases)
                )
            });
        }
    }
    Ok(tally.finish())
}

/// Path amplitudes and phase offsets `(a_i, k0 (d_i - d0))`, direct path first.
fn reference_paths(
    tx: Point2D,
    rx: Point2D,
    elements: &[Point2D],
    p: &LinkParams,
) -> Vec<(f64, f64)> {
    let d0 = ((tx.x - rx.x).powi(2) + (tx.y - rx.y).powi(2)).sqrt();
    let mut out = vec![(d0.powf(-p.path_loss_exponent), 0.0)];
    for e in elements {
        let d = ((tx.x - e.x).powi(2) + (tx.y - e.y).powi(2)).sqrt()
            + ((e.x - rx.x).powi(2) + (e.y - rx.y).powi(2)).sqrt();
        out.push((d.powf(-p.path_loss_exponent), p.wave_number * (d - d0)));
    }
    out
}

fn reference_gain(paths: &[(f64, f64)], phases: &[f64]) -> f64 {
    let mut sum = Complex64::new(paths[0].0, 0.0);
    for ((a, theta), phi) in paths[1..].iter().zip(phases) {
        sum += Complex64::from_polar(*a, phi - theta);
    }
    sum.norm_sqr()
}

fn reference_min_sinr(paths: &[Vec<Vec<(f64, f64)>>], phases: &[f64], p: &LinkParams) -> f64 {
    let pairs = paths.len();
    (0..pairs)
        .map(|l| {
            let mut interference = 0.0;
            for k in (0..pairs).filter(|&k| k != l) {
                interference += reference_gain(&paths[l][k], phases);
            }
            p.tx_power * reference_gain(&paths[l][l], phases)
                / (p.noise_power + p.tx_power * interference)
        })
        .fold(f64::INFINITY, f64::min)
}

fn phase_alignment() -> Result<PropertyOutcome> {
    let mut tally = Tally::new(Property::PhaseAlignment);
    let params = default_params();
    let room = Room::new(10.0, 10)?;
    let cfg = PhaseSearchConfig::default();
    let half_step = cfg.phase_step / 2.0;
    for n in [4, 16, 48] {
        let layout = ArrayLayout::wall_midpoint(&room, 0, n, 0.0625)?;
        let (tx, rx) = (Point2D::new(4.0, 2.0), Point2D::new(6.0, 3.0));
        let s = Scenario::new(
            room,
            vec![layout],
            Deployment::new(vec![tx], vec![rx])?,
            params,
        )?;
        let best = optimize_phases(&s, Objective::SingleLinkSinr(0), &cfg)?;
        let paths = reference_paths(tx, rx, s.elements(), &params);
        let ceiling = paths.iter().map(|(a, _)| a).sum::<f64>().powi(2);
        let floor = (paths[0].0
            + paths[1..]
                .iter()
                .map(|(a, _)| a * half_step.cos())
                .sum::<f64>())
        .powi(2);
        let gain = reference_gain(&paths, best.phases.phases());
        let phase_err = best
            .phases
            .phases()
            .iter()
            .zip(&paths[1..])
            .map(|(phi, (_, theta))| wrap_phase(phi - theta).abs())
            .fold(0.0, f64::max);
        let ok = gain >= floor * (1.0 - 1e-12)
            && gain <= ceiling * (1.0 + 1e-12)
            && phase_err <= half_step + 1e-9;
        tally.record(phase_err / half_step, ok, || {
            format!("N={n}: gain={gain:e} floor={floor:e} ceiling={ceiling:e} max phase error={phase_err:e} rad")
        });
    }
    Ok(tally.finish())
}

fn exhaustive_oracle(rng: &mut ChaCha8Rng, opt: &ValidationOptions) -> Result<PropertyOutcome> {
    let mut tally = Tally::new(Property::ExhaustiveOracle);
    let params = default_params();
    let cfg = PhaseSearchConfig {
        method: PhaseMethod::Exhaustive,
        phase_step: PI / 4.0,
        ..PhaseSearchConfig::default()
    };
    let levels: Vec<f64> = (0..8).map(|j| -PI + j as f64 * PI / 4.0).collect();
    for _ in 0..opt.oracle_cases {
        let s = loop {
            let s = random_scenario(rng, 3, 2, params);
            if s.element_count() == 2 {
                break s;
            }
        };
        let d = s.deployment();
        let paths: Vec<Vec<Vec<(f64, f64)>>> = d
            .rx()
            .iter()
            .map(|&rx| {
                d.tx()
                    .iter()
                    .map(|&tx| reference_paths(tx, rx, s.elements(), &params))
                    .collect()
            })
            .collect();
        let mut oracle = f64::NEG_INFINITY;
        for &a in &levels {
            for &b in &levels {
                oracle = oracle.max(reference_min_sinr(&paths, &[a, b], &params));
            }
        }
        let best = optimize_phases(&s, Objective::MinSinr, &cfg)?;
        let at_best = reference_min_sinr(&paths, best.phases.phases(), &params);
        let gap = ((at_best - oracle) / oracle)
            .abs()
            .max(((best.value - oracle) / oracle).abs());
        tally.record(gap, gap <= 1e-12, || {
            format!(
                "oracle={oracle:e} search={:e} at phases {:?}; {}",
                best.value,
                best.phases.phases(),
                describe(&s, &best.phases)
            )
        });
    }
    Ok(tally.finish())
}

fn placement_oracle() -> Result<PropertyOutcome> {
    let mut tally = Tally::new(Property::PlacementOracle);
    let room = Room::new(1.0, 1)?;
    let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)].map(|(x, y)| Point2D::new(x, y));
    let phase_cfg = PhaseSearchConfig {
        method: PhaseMethod::Exhaustive,
        phase_step: PI / 4.0,
        ..PhaseSearchConfig::default()
    };
    let placement_cfg = PlacementSearchConfig {
        mode: PlacementMode::Exhaustive,
        ..PlacementSearchConfig::default()
    };
    let levels: Vec<f64> = (0..8).map(|j| -PI + j as f64 * PI / 4.0).collect();
    // A loud and a noisy regime; the noisy one leaves the diagonals infeasible
    // without help from the array.
    for noise in [1e-9, 0.2] {
        let params = LinkParams {
            noise_power: noise,
            ..default_params()
        };
        for n in [0usize, 2] {
            let layouts = if n == 0 {
                Vec::new()
            } else {
                vec![ArrayLayout::wall_midpoint(&room, 0, n, 0.0625)?]
            };
            let elements: Vec<Point2D> = match layouts.first() {
                Some(l) => l.element_positions(&room)?,
                None => Vec::new(),
            };
            let mut oracle = 0.0f64;
            let mut statuses = 0;
            for tx in corners {
                for rx in corners.iter().copied().filter(|&rx| rx != tx) {
                    statuses += 1;
                    let paths = vec![vec![reference_paths(tx, rx, &elements, &params)]];
                    let feasible = if n == 0 {
                        reference_min_sinr(&paths, &[], &params) >= params.sinr_threshold
                    } else {
                        levels.iter().any(|&a| {
                            levels.iter().any(|&b| {
                                reference_min_sinr(&paths, &[a, b], &params)
                                    >= params.sinr_threshold
                            })
                        })
                    };
                    if feasible {
                        oracle = oracle
                            .max(params.rate * tx.distance(&rx).powf(params.path_loss_exponent));
                    }
                }
            }
            let found = search_placements(&room, &layouts, 1, &params, &phase_cfg, &placement_cfg)?;
            let ok = found.best_capacity == oracle && found.statuses_evaluated == statuses;
            tally.record((found.best_capacity - oracle).abs(), ok, || {
                format!(
                    "noise={noise:e} N={n}: search={:e} over {} statuses, oracle={oracle:e} over {statuses}",
                    found.best_capacity, found.statuses_evaluated
                )
            });
        }
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_selection_is_empty() {
        let opt = ValidationOptions {
            properties: vec![],
            ..ValidationOptions::default()
        };
        assert!(run_validation_suite(0, &opt).unwrap().is_empty());
    }

    #[test]
    fn zero_tolerance_reports_counterexample() {
        let opt = ValidationOptions {
            properties: vec![Property::McSinr],
            mc_cases: 2,
            mc_symbols: 2000,
            mc_tolerance_db: 0.0,
            ..ValidationOptions::default()
        };
        let report = run_validation_suite(3, &opt).unwrap();
        assert!(!report[0].passed);
        assert!(report[0]
            .counterexample
            .as_deref()
            .unwrap()
            .contains("empirical="));
    }

    #[test]
    fn names_round_trip() {
        for p in ALL_PROPERTIES {
            assert_eq!(Property::parse(p.name()), Some(p));
        }
        assert_eq!(Property::parse("nope"), None);
    }
}
