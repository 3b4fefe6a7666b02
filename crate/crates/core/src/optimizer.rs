//! Phase-configuration and node-placement search.
//!
//! Phases are searched on the uniform grid `{-pi, -pi + step, ..., pi - step}`.
//! Coordinate ascent sweeps elements in ascending order and moves each one to
//! the best grid level with the others held fixed; the exhaustive method walks
//! the full joint grid and is reserved for tiny arrays. Placement search
//! evaluates statuses of a [`PlacementSpace`] on a worker pool and merges
//! them with a deterministic max reduction (smallest status index wins ties).

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::capacity::{self, sinr_from_gains, Scenario};
use crate::channel::{channel_vector, linear_to_db, ChannelVector, LinkParams, PhaseVector};
use crate::error::{Error, Result};
use crate::geometry::{
    pooled_elements, ArrayLayout, Deployment, PlacementSpace, Point2D, Room, WallNormal,
};

/// Largest array the exhaustive joint phase grid accepts.
pub const EXHAUSTIVE_MAX_ELEMENTS: usize = 3;

/// Default cap on exhaustive placement statuses.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 10_000_000;

/// Statuses per work unit; fixed so results do not depend on the worker count.
const CHUNK: u128 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMethod {
    CoordinateAscent,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSearchConfig {
    pub method: PhaseMethod,
    /// Grid step in radians; must divide `2 pi` into a whole number of levels.
    pub phase_step: f64,
    pub max_sweeps: usize,
    /// A sweep whose relative improvement is at most this ends the ascent.
    pub convergence_tol: f64,
    /// Extra ascents from seeded random grid points, on top of the all-zero start.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PhaseSearchConfig {
    fn default() -> Self {
        Self {
            method: PhaseMethod::CoordinateAscent,
            phase_step: PI / 180.0,
            max_sweeps: 50,
            convergence_tol: 1e-9,
            restarts: 0,
            seed: 0,
        }
    }
}

impl PhaseSearchConfig {
    pub fn levels(&self) -> Result<usize> {
        if !(self.phase_step.is_finite() && self.phase_step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "phase step must be > 0, got {}",
                self.phase_step
            )));
        }
        let levels = (TAU / self.phase_step).round();
        if levels < 1.0 || (levels * self.phase_step - TAU).abs() > 1e-9 * TAU {
            return Err(Error::InvalidArgument(format!(
                "phase step {} does not divide 2 pi into whole levels",
                self.phase_step
            )));
        }
        Ok(levels as usize)
    }

    fn validate(&self) -> Result<()> {
        self.levels()?;
        if self.max_sweeps == 0 {
            return Err(Error::InvalidArgument("max_sweeps must be >= 1".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return Err(Error::InvalidArgument(
                "convergence_tol must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Grid phases `-pi + j * 2pi / levels`; the middle level is exactly 0 for even counts.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let levels = self.levels()?;
        Ok((0..levels)
            .map(|j| {
                if 2 * j == levels {
                    0.0
                } else {
                    -PI + TAU * j as f64 / levels as f64
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Feasibility-gated transport capacity; the ascent maximises the minimum
    /// SINR and stops as soon as every link clears the threshold.
    TransportCapacity,
    MinSinr,
    SingleLinkSinr(usize),
}

/// Outcome of a phase search.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOptimum {
    pub phases: PhaseVector,
    /// Objective re-evaluated from scratch at `phases`.
    pub value: f64,
    /// Search score after initialisation and after each completed sweep of the
    /// winning start; non-decreasing.
    pub trace: Vec<f64>,
}

/// Precomputed `conj(h_lk,i)` for every receiver row, transmitter column and path.
///
/// Keeps running sums `s_lk = sum_i conj(h_lk,i) v_i` so that moving one element
/// costs `O(rows * cols)` instead of a full re-evaluation.
struct GainModel {
    rows: usize,
    cols: usize,
    direct: Vec<Complex64>,
    /// `per_element[i][r * cols + c]`.
    per_element: Vec<Vec<Complex64>>,
}

impl GainModel {
    fn new(rows: usize, cols: usize, channel: impl Fn(usize, usize) -> ChannelVector) -> Self {
        let mut direct = Vec::with_capacity(rows * cols);
        let mut per_element: Vec<Vec<Complex64>> = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let h = channel(r, c);
                if per_element.is_empty() {
                    per_element = vec![Vec::with_capacity(rows * cols); h.len() - 1];
                }
                direct.push(h.entries()[0].conj());
                for (slot, e) in per_element.iter_mut().zip(&h.entries()[1..]) {
                    slot.push(e.conj());
                }
            }
        }
        Self {
            rows,
            cols,
            direct,
            per_element,
        }
    }

    fn from_scenario(s: &Scenario) -> Self {
        Self::new(s.pairs(), s.pairs(), |l, k| s.channel(l, k).clone())
    }

    fn elements(&self) -> usize {
        self.per_element.len()
    }

    fn sums(&self, units: &[Complex64]) -> Vec<Complex64> {
        let mut sums = self.direct.clone();
        for (coeffs, u) in self.per_element.iter().zip(units) {
            for (s, c) in sums.iter_mut().zip(coeffs) {
                *s += c * u;
            }
        }
        sums
    }
}

fn gains_into(sums: &[Complex64], out: &mut [f64]) {
    for (g, s) in out.iter_mut().zip(sums) {
        *g = s.norm_sqr();
    }
}

/// Scores a gain matrix (row-major `rows x cols`).
type Score<'a> = dyn Fn(&[f64]) -> f64 + Sync + 'a;

struct Ascent {
    phases: Vec<f64>,
    value: f64,
    trace: Vec<f64>,
}

fn coordinate_ascent(
    model: &GainModel,
    grid: &[f64],
    start: Vec<f64>,
    config: &PhaseSearchConfig,
    score: &Score<'_>,
    stop_at: Option<f64>,
) -> Ascent {
    let units_grid: Vec<Complex64> = grid
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    let mut phases = start;
    let mut units: Vec<Complex64> = phases
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    let mut sums = model.sums(&units);
    let mut trial = sums.clone();
    let mut gains = vec![0.0; model.rows * model.cols];
    gains_into(&sums, &mut gains);
    let mut value = score(&gains);
    let mut trace = vec![value];
    let reached = |v: f64| stop_at.is_some_and(|t| v >= t);

    if reached(value) || model.elements() == 0 {
        return Ascent {
            phases,
            value,
            trace,
        };
    }
    for _ in 0..config.max_sweeps {
        let before = value;
        for i in 0..model.elements() {
            let coeffs = &model.per_element[i];
            let mut best: Option<usize> = None;
            let mut best_value = value;
            for (j, u) in units_grid.iter().enumerate() {
                let delta = u - units[i];
                for ((t, s), c) in trial.iter_mut().zip(&sums).zip(coeffs) {
                    *t = s + c * delta;
                }
                gains_into(&trial, &mut gains);
                let v = score(&gains);
                let take = match best {
                    None => v >= best_value,
                    Some(_) => v > best_value,
                };
                if take {
                    best = Some(j);
                    best_value = v;
                }
            }
            if let Some(j) = best {
                let delta = units_grid[j] - units[i];
                for (s, c) in sums.iter_mut().zip(coeffs) {
                    *s += c * delta;
                }
                units[i] = units_grid[j];
                phases[i] = grid[j];
                value = best_value;
            }
        }
        trace.push(value);
        if reached(value) {
            break;
        }
        let gain = value - before;
        if gain.is_nan() || gain <= config.convergence_tol * before.abs() {
            break;
        }
    }
    Ascent {
        phases,
        value,
        trace,
    }
}

fn exhaustive_grid(model: &GainModel, grid: &[f64], score: &Score<'_>) -> Result<Ascent> {
    let n = model.elements();
    if n > EXHAUSTIVE_MAX_ELEMENTS {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive phase search is limited to {EXHAUSTIVE_MAX_ELEMENTS} elements, got {n}; \
             use coordinate ascent"
        )));
    }
    let levels = grid.len();
    let mut idx = vec![0usize; n];
    let mut gains = vec![0.0; model.rows * model.cols];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let units: Vec<Complex64> = idx
            .iter()
            .map(|&j| Complex64::from_polar(1.0, grid[j]))
            .collect();
        gains_into(&model.sums(&units), &mut gains);
        let v = score(&gains);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, idx.clone()));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                let (value, best_idx) = best.expect("grid is non-empty");
                return Ok(Ascent {
                    phases: best_idx.iter().map(|&j| grid[j]).collect(),
                    value,
                    trace: vec![value],
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < levels {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Runs the configured search from the all-zero start (plus seeded restarts).
fn search(
    model: &GainModel,
    config: &PhaseSearchConfig,
    score: &Score<'_>,
    stop_at: Option<f64>,
) -> Result<Ascent> {
    config.validate()?;
    let grid = config.grid()?;
    let n = model.elements();
    match config.method {
        PhaseMethod::Exhaustive => exhaustive_grid(model, &grid, score),
        PhaseMethod::CoordinateAscent => {
            let mut best = coordinate_ascent(model, &grid, vec![0.0; n], config, score, stop_at);
            for r in 0..config.restarts {
                if stop_at.is_some_and(|t| best.value >= t) {
                    break;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(r as u64 + 1);
                let start = (0..n)
                    .map(|_| grid[rng.random_range(0..grid.len())])
                    .collect();
                let candidate = coordinate_ascent(model, &grid, start, config, score, stop_at);
                if candidate.value > best.value {
                    best = candidate;
                }
            }
            Ok(best)
        }
    }
}

fn min_sinr(gains: &[f64], pairs: usize, params: &LinkParams) -> f64 {
    (0..pairs)
        .map(|l| sinr_from_gains(&gains[l * pairs..(l + 1) * pairs], l, params))
        .fold(f64::INFINITY, f64::min)
}

/// Maximises `objective` over the phase grid for a fixed scenario.
pub fn optimize_phases(
    scenario: &Scenario,
    objective: Objective,
    config: &PhaseSearchConfig,
) -> Result<PhaseOptimum> {
    let pairs = scenario.pairs();
    let params = *scenario.params();
    if let Objective::SingleLinkSinr(l) = objective {
        if l >= pairs {
            return Err(Error::InvalidLink { index: l, pairs });
        }
    }
    let model = GainModel::from_scenario(scenario);
    let outcome = match objective {
        Objective::TransportCapacity => search(
            &model,
            config,
            &|g: &[f64]| min_sinr(g, pairs, &params),
            Some(params.sinr_threshold),
        )?,
        Objective::MinSinr => search(
            &model,
            config,
            &|g: &[f64]| min_sinr(g, pairs, &params),
            None,
        )?,
        Objective::SingleLinkSinr(l) => search(
            &model,
            config,
            &|g: &[f64]| sinr_from_gains(&g[l * pairs..(l + 1) * pairs], l, &params),
            None,
        )?,
    };
    let phases = PhaseVector::new(outcome.phases)?;
    let value = match objective {
        Objective::TransportCapacity => {
            capacity::transport_capacity(scenario, &phases)?.transport_capacity
        }
        Objective::MinSinr => (0..pairs)
            .map(|l| capacity::sinr(scenario, &phases, l))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min),
        Objective::SingleLinkSinr(l) => capacity::sinr(scenario, &phases, l)?,
    };
    Ok(PhaseOptimum {
        phases,
        value,
        trace: outcome.trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementMode {
    Exhaustive,
    Randomized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSearchConfig {
    pub mode: PlacementMode,
    /// Distinct statuses drawn in randomized mode.
    pub sample_budget: u64,
    pub seed: u64,
    pub parallel_workers: usize,
    /// Exhaustive mode refuses spaces with more statuses than this.
    pub exhaustive_cap: u128,
}

impl Default for PlacementSearchConfig {
    fn default() -> Self {
        Self {
            mode: PlacementMode::Exhaustive,
            sample_budget: 1000,
            seed: 0,
            parallel_workers: 1,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_capacity: f64,
    pub best_index: u128,
    pub best_deployment: Deployment,
    pub best_phases: PhaseVector,
    pub statuses_evaluated: u128,
    /// `(status index, capacity)` at every strict improvement of the running
    /// maximum, in status order.
    pub objective_trace: Vec<(u128, f64)>,
}

/// Draws `budget` distinct indices below `total`, in draw order.
///
/// Prefixes are shared between budgets for the same seed, so larger budgets
/// always contain the smaller sample.
pub fn sample_statuses(total: u128, budget: u64, seed: u64) -> Vec<u128> {
    if budget as u128 >= total {
        return (0..total).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(budget as usize);
    let mut out = Vec::with_capacity(budget as usize);
    while (out.len() as u64) < budget {
        let idx = rng.random_range(0..total);
        if seen.insert(idx) {
            out.push(idx);
        }
    }
    out
}

struct Evaluated {
    index: u128,
    capacity: f64,
    phases: Vec<f64>,
}

#[derive(Default)]
struct ChunkBest {
    best: Option<Evaluated>,
    trace: Vec<(u128, f64)>,
}

impl ChunkBest {
    fn push(&mut self, e: Evaluated) {
        if self.best.as_ref().is_none_or(|b| e.capacity > b.capacity) {
            self.trace.push((e.index, e.capacity));
            self.best = Some(e);
        }
    }
}

/// Searches node placements and, for each, the phases maximising transport capacity.
pub fn search_placements(
    room: &Room,
    layouts: &[ArrayLayout],
    pairs: usize,
    params: &LinkParams,
    phase_config: &PhaseSearchConfig,
    placement_config: &PlacementSearchConfig,
) -> Result<SearchResult> {
    phase_config.validate()?;
    let space = PlacementSpace::new(room, pairs)?;
    let elements = pooled_elements(room, layouts)?;
    let n = elements.len();
    if phase_config.method == PhaseMethod::Exhaustive && n > EXHAUSTIVE_MAX_ELEMENTS {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive phase search is limited to {EXHAUSTIVE_MAX_ELEMENTS} elements, got {n}"
        )));
    }

    let total = space.len();
    let candidates: Candidates = match placement_config.mode {
        PlacementMode::Exhaustive => {
            if total > placement_config.exhaustive_cap {
                return Err(Error::BudgetExceeded(format!(
                    "{total} placement statuses exceed the exhaustive cap of {}; \
                     use randomized placement mode with a sample budget",
                    placement_config.exhaustive_cap
                )));
            }
            Candidates::Range(total)
        }
        PlacementMode::Randomized => {
            if placement_config.sample_budget == 0 {
                return Err(Error::InvalidArgument("sample_budget must be >= 1".into()));
            }
            let mut picked =
                sample_statuses(total, placement_config.sample_budget, placement_config.seed);
            picked.sort_unstable();
            Candidates::List(picked)
        }
    };

    let evaluate = |index: u128, deployment: Deployment| -> Result<Evaluated> {
        let scenario = match Scenario::with_elements(
            *room,
            layouts.to_vec(),
            elements.clone(),
            deployment,
            *params,
        ) {
            Ok(s) => s,
            // A node on top of a reflector element has no finite channel.
            Err(Error::DegenerateGeometry(_)) => {
                return Ok(Evaluated {
                    index,
                    capacity: 0.0,
                    phases: vec![0.0; n],
                })
            }
            Err(e) => return Err(e),
        };
        let best = optimize_phases(&scenario, Objective::TransportCapacity, phase_config)?;
        Ok(Evaluated {
            index,
            capacity: best.value,
            phases: best.phases.phases().to_vec(),
        })
    };

    let chunks = candidates.chunks();
    let run_chunk = |chunk: &Chunk| -> Result<ChunkBest> {
        let mut acc = ChunkBest::default();
        match chunk {
            Chunk::Range(start, end) => {
                for (index, deployment) in space.iter_from(*start).take((end - start) as usize) {
                    acc.push(evaluate(index, deployment)?);
                }
            }
            Chunk::List(indices) => {
                for &index in indices {
                    let deployment = space
                        .deployment_at(index)
                        .expect("sampled index is in range");
                    acc.push(evaluate(index, deployment)?);
                }
            }
        }
        Ok(acc)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(placement_config.parallel_workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let per_chunk: Vec<ChunkBest> =
        pool.install(|| chunks.par_iter().map(run_chunk).collect::<Result<Vec<_>>>())?;

    let mut best: Option<Evaluated> = None;
    let mut trace: Vec<(u128, f64)> = Vec::new();
    for chunk in per_chunk {
        for &(index, cap) in &chunk.trace {
            if trace.last().is_none_or(|&(_, running)| cap > running) {
                trace.push((index, cap));
            }
        }
        if let Some(b) = chunk.best {
            if best.as_ref().is_none_or(|cur| b.capacity > cur.capacity) {
                best = Some(b);
            }
        }
    }
    let best = best.ok_or_else(|| Error::Infeasible("no placement statuses evaluated".into()))?;
    Ok(SearchResult {
        best_capacity: best.capacity,
        best_index: best.index,
        best_deployment: space
            .deployment_at(best.index)
            .expect("best index is in range"),
        best_phases: PhaseVector::new(best.phases)?,
        statuses_evaluated: candidates.len(),
        objective_trace: trace,
    })
}

enum Candidates {
    Range(u128),
    List(Vec<u128>),
}

enum Chunk {
    Range(u128, u128),
    List(Vec<u128>),
}

impl Candidates {
    fn len(&self) -> u128 {
        match self {
            Candidates::Range(n) => *n,
            Candidates::List(v) => v.len() as u128,
        }
    }

    fn chunks(&self) -> Vec<Chunk> {
        match self {
            Candidates::Range(n) => (0..n.div_ceil(CHUNK))
                .map(|c| Chunk::Range(c * CHUNK, ((c + 1) * CHUNK).min(*n)))
                .collect(),
            Candidates::List(v) => v
                .chunks(CHUNK as usize)
                .map(|c| Chunk::List(c.to_vec()))
                .collect(),
        }
    }
}

/// Two transmitters at equal range from one receiver in front of a wall array.
#[derive(Debug, Clone, PartialEq)]
pub struct CancellationSetup {
    pub room: Room,
    pub array: Option<ArrayLayout>,
    pub receiver: Point2D,
    pub desired: Point2D,
    pub interferer: Point2D,
    pub params: LinkParams,
}

impl CancellationSetup {
    /// Receiver 0.6 m in front of the array center, desired transmitter 0.6 m to
    /// its left and the interferer 0.6 m to its right, in a 10 m room.
    pub fn two_transmitter(
        elements: usize,
        element_spacing: f64,
        params: LinkParams,
    ) -> Result<Self> {
        let room = Room::new(10.0, 10)?;
        let center = Point2D::new(5.0, 0.0);
        let array = if elements == 0 {
            None
        } else {
            Some(ArrayLayout::new(
                center,
                WallNormal::PosY,
                elements,
                element_spacing,
            )?)
        };
        Ok(Self {
            room,
            array,
            receiver: Point2D::new(5.0, 0.6),
            desired: Point2D::new(4.4, 0.6),
            interferer: Point2D::new(5.6, 0.6),
            params,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationOutcome {
    pub baseline_db: f64,
    pub optimized_db: f64,
    pub phases: PhaseVector,
}

fn two_source_sinr(
    desired: &ChannelVector,
    interferer: &ChannelVector,
    v: &PhaseVector,
    p: &LinkParams,
) -> Result<f64> {
    let row = [
        crate::channel::effective_gain(desired, v)?,
        crate::channel::effective_gain(interferer, v)?,
    ];
    Ok(sinr_from_gains(&row, 0, p))
}

/// Zero-phase versus optimised SINR (dB) of the desired link in a two-transmitter setup.
pub fn interference_cancellation_demo(
    setup: &CancellationSetup,
    phase_config: &PhaseSearchConfig,
) -> Result<CancellationOutcome> {
    let elements = match &setup.array {
        Some(a) => a.element_positions(&setup.room)?,
        None => Vec::new(),
    };
    let p = setup.params;
    let desired = channel_vector(setup.desired, setup.receiver, &elements, &p)?;
    let interferer = channel_vector(setup.interferer, setup.receiver, &elements, &p)?;
    let baseline = two_source_sinr(
        &desired,
        &interferer,
        &PhaseVector::zeros(elements.len()),
        &p,
    )?;

    let channels = [desired.clone(), interferer.clone()];
    let model = GainModel::new(1, 2, |_, c| channels[c].clone());
    let outcome = search(
        &model,
        phase_config,
        &|g: &[f64]| sinr_from_gains(g, 0, &p),
        None,
    )?;
    let phases = PhaseVector::new(outcome.phases)?;
    let optimized = two_source_sinr(&desired, &interferer, &phases, &p)?;
    Ok(CancellationOutcome {
        baseline_db: linear_to_db(baseline),
        optimized_db: linear_to_db(optimized),
        phases,
    })
}
