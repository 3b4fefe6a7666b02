//! SINR, feasibility-gated transport capacity, the per-link interference
//! bound chain and the closed-form capacity upper bound.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use crate::channel::{channel_from_paths, effective_gain, ChannelVector, LinkParams, PhaseVector};
use crate::error::{Error, Result};
use crate::geometry::{
    path_geometry, pooled_elements, ArrayLayout, Deployment, PathGeometry, Point2D, Room,
};

/// Immutable evaluation input: room, arrays, node deployment and link constants.
///
/// Path geometry and channel vectors for every (receiver, transmitter) pair are
/// computed once at construction.
#[derive(Debug, Clone)]
pub struct Scenario {
    room: Room,
    layouts: Vec<ArrayLayout>,
    deployment: Deployment,
    params: LinkParams,
    elements: Vec<Point2D>,
    /// Row-major `[rx l][tx k]`.
    paths: Vec<PathGeometry>,
    channels: Vec<ChannelVector>,
}

impl Scenario {
    pub fn new(
        room: Room,
        layouts: Vec<ArrayLayout>,
        deployment: Deployment,
        params: LinkParams,
    ) -> Result<Self> {
        let elements = pooled_elements(&room, &layouts)?;
        Self::with_elements(room, layouts, elements, deployment, params)
    }

    /// Same as [`Scenario::new`] with the pooled element positions already computed.
    pub(crate) fn with_elements(
        room: Room,
        layouts: Vec<ArrayLayout>,
        elements: Vec<Point2D>,
        deployment: Deployment,
        params: LinkParams,
    ) -> Result<Self> {
        deployment.check_on_grid(&room)?;
        let pairs = deployment.pairs();
        let mut paths = Vec::with_capacity(pairs * pairs);
        for rx in deployment.rx() {
            for tx in deployment.tx() {
                paths.push(path_geometry(*tx, *rx, &elements)?);
            }
        }
        let channels = paths
            .iter()
            .map(|p| channel_from_paths(p, params.wave_number, params.path_loss_exponent))
            .collect();
        Ok(Self {
            room,
            layouts,
            deployment,
            params,
            elements,
            paths,
            channels,
        })
    }

    pub fn room(&self) -> &Room {
        &self.room
    }

    pub fn layouts(&self) -> &[ArrayLayout] {
        &self.layouts
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn params(&self) -> &LinkParams {
        &self.params
    }

    pub fn elements(&self) -> &[Point2D] {
        &self.elements
    }

    pub fn pairs(&self) -> usize {
        self.deployment.pairs()
    }

    /// Pooled reflector count `N`.
    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Channel from transmitter `k` to receiver `l`.
    pub fn channel(&self, l: usize, k: usize) -> &ChannelVector {
        &self.channels[l * self.pairs() + k]
    }

    pub fn path(&self, l: usize, k: usize) -> &PathGeometry {
        &self.paths[l * self.pairs() + k]
    }

    /// Line-of-sight length of link `l`.
    pub fn direct_distance(&self, l: usize) -> f64 {
        self.path(l, l).direct
    }

    fn check_link(&self, l: usize) -> Result<()> {
        if l >= self.pairs() {
            return Err(Error::InvalidLink {
                index: l,
                pairs: self.pairs(),
            });
        }
        Ok(())
    }

    fn check_phases(&self, phases: &PhaseVector) -> Result<()> {
        if phases.len() != self.element_count() {
            return Err(Error::Dimension {
                expected: self.element_count(),
                got: phases.len(),
            });
        }
        Ok(())
    }
}

/// `rho^2 G_ll / (sigma^2 + rho^2 sum_{k != l} G_lk)` from one row of link gains.
pub fn sinr_from_gains(row: &[f64], l: usize, params: &LinkParams) -> f64 {
    let interference: f64 = row
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != l)
        .map(|(_, g)| g)
        .sum();
    params.tx_power * row[l] / (params.noise_power + params.tx_power * interference)
}

/// Effective power gains `G_lk = |h_lk^H v|^2` for the row of receiver `l`.
pub fn link_gains(scenario: &Scenario, phases: &PhaseVector, l: usize) -> Result<Vec<f64>> {
    scenario.check_link(l)?;
    scenario.check_phases(phases)?;
    (0..scenario.pairs())
        .map(|k| effective_gain(scenario.channel(l, k), phases))
        .collect()
}

/// SINR of link `l` (zero-based) under reflector phases `phases`.
pub fn sinr(scenario: &Scenario, phases: &PhaseVector, l: usize) -> Result<f64> {
    let row = link_gains(scenario, phases, l)?;
    Ok(sinr_from_gains(&row, l, scenario.params()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub per_link_sinr: Vec<f64>,
    pub feasible: bool,
    /// `R * sum_l d_ll0^alpha` when feasible, else 0 (bits * m^alpha / s).
    pub transport_capacity: f64,
    /// Right-hand side of the per-link distance bound; `None` when vacuous.
    pub per_link_bound: Vec<Option<f64>>,
}

/// Feasibility gate: every link must reach the threshold, else capacity is 0.
pub fn capacity_from_links(sinrs: &[f64], direct: &[f64], params: &LinkParams) -> (bool, f64) {
    let feasible = sinrs.iter().all(|&s| s >= params.sinr_threshold);
    if !feasible {
        return (false, 0.0);
    }
    let weighted: f64 = direct
        .iter()
        .map(|d| d.powf(params.path_loss_exponent))
        .sum();
    (true, params.rate * weighted)
}

pub fn transport_capacity(scenario: &Scenario, phases: &PhaseVector) -> Result<CapacityReport> {
    scenario.check_phases(phases)?;
    let pairs = scenario.pairs();
    let per_link_sinr = (0..pairs)
        .map(|l| sinr(scenario, phases, l))
        .collect::<Result<Vec<_>>>()?;
    let direct: Vec<f64> = (0..pairs).map(|l| scenario.direct_distance(l)).collect();
    let (feasible, transport_capacity) =
        capacity_from_links(&per_link_sinr, &direct, scenario.params());
    let per_link_bound = (0..pairs)
        .map(|l| link_distance_bound(scenario, phases, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityReport {
        per_link_sinr,
        feasible,
        transport_capacity,
        per_link_bound,
    })
}

/// The interference term and its two successive lower bounds for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    /// `sum_k [(d0^-a + sum_i d_i^-a cos psi_i)^2 + (sum_i d_i^-a sin psi_i)^2]`.
    pub interference: f64,
    /// After `x1^2 + x2^2 >= (x1 + x2)^2 / 2` on the reflected part.
    pub am_gm_lower: f64,
    /// After `x1^2 + x2^2 >= 2 x1 x2` and the sum-to-product identity.
    pub trig_lower: f64,
    pub eta: f64,
}

/// Evaluates the bound chain over cross paths, `psi_i = k0 * dd_i - phi_i`.
pub fn bound_terms_from_paths(
    cross: &[&PathGeometry],
    phases: &[f64],
    wave_number: f64,
    alpha: f64,
    eta: f64,
) -> BoundTerms {
    let trig_scale = 2.0 * (2f64.sqrt() + 2.0).sqrt();
    let mut interference = 0.0;
    let mut am_gm_lower = 0.0;
    let mut trig_sum = 0.0;
    for path in cross {
        let direct = path.direct.powf(-alpha);
        let (mut re, mut im, mut shifted, mut cross_term) = (0.0, 0.0, 0.0, 0.0);
        for ((d, dd), phi) in path.reflected.iter().zip(&path.excess).zip(phases) {
            let a = d.powf(-alpha);
            let psi = wave_number * dd - phi;
            re += a * psi.cos();
            im += a * psi.sin();
            shifted += a * (psi + FRAC_PI_4).sin();
            cross_term += a * psi.cos();
            trig_sum += direct * a * (psi - FRAC_PI_8).cos();
        }
        interference += (direct + re).powi(2) + im.powi(2);
        am_gm_lower += direct * direct + 2.0 * direct * cross_term + shifted * shifted;
    }
    BoundTerms {
        interference,
        am_gm_lower,
        trig_lower: trig_scale * trig_sum,
        eta,
    }
}

/// Bound chain for link `l`; the sum runs over the cross links `k != l`.
pub fn bound_terms(scenario: &Scenario, phases: &PhaseVector, l: usize) -> Result<BoundTerms> {
    scenario.check_link(l)?;
    scenario.check_phases(phases)?;
    let cross: Vec<&PathGeometry> = (0..scenario.pairs())
        .filter(|&k| k != l)
        .map(|k| scenario.path(l, k))
        .collect();
    let p = scenario.params();
    Ok(bound_terms_from_paths(
        &cross,
        phases.phases(),
        p.wave_number,
        p.path_loss_exponent,
        p.eta(),
    ))
}

/// Denominator of the per-link distance bound,
/// `sqrt(eta sigma^2 / rho^2 + eta |I|) - sum_i d_lli^-a cos(k0 dd_lli - phi_i)`.
pub fn link_bound_denominator(
    own: &PathGeometry,
    phases: &[f64],
    interference: f64,
    params: &LinkParams,
) -> f64 {
    let eta = params.eta();
    let root = (eta * params.noise_power / params.tx_power + eta * interference.abs()).sqrt();
    let reflected: f64 = own
        .reflected
        .iter()
        .zip(&own.excess)
        .zip(phases)
        .map(|((d, dd), phi)| {
            d.powf(-params.path_loss_exponent) * (params.wave_number * dd - phi).cos()
        })
        .sum();
    root - reflected
}

/// Upper bound on `d_ll0^alpha`; `None` when the denominator is not positive.
pub fn link_distance_bound(
    scenario: &Scenario,
    phases: &PhaseVector,
    l: usize,
) -> Result<Option<f64>> {
    let terms = bound_terms(scenario, phases, l)?;
    let denom = link_bound_denominator(
        scenario.path(l, l),
        phases.phases(),
        terms.interference,
        scenario.params(),
    );
    Ok((denom > 0.0).then(|| 1.0 / denom))
}

/// Closed-form upper bound on transport capacity:
/// `R L / (sqrt(eta sigma^2/rho^2 + (sqrt2 + 2) eta N L / d_max^(2 alpha)) - N / d_min^alpha)`.
pub fn upper_bound(
    params: &LinkParams,
    pairs: usize,
    elements: usize,
    d_min: f64,
    d_max: f64,
) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::InvalidArgument(
            "upper bound needs at least one pair".into(),
        ));
    }
    if !(d_min > 0.0 && d_min < d_max && d_max.is_finite()) {
        return Err(Error::InvalidBounds { d_min, d_max });
    }
    let eta = params.eta();
    let alpha = params.path_loss_exponent;
    let (n, l) = (elements as f64, pairs as f64);
    let root = (eta * params.noise_power / params.tx_power
        + (2f64.sqrt() + 2.0) * eta * n * l / d_max.powf(2.0 * alpha))
    .sqrt();
    let denominator = root - n / d_min.powf(alpha);
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::BoundInvalid { denominator });
    }
    Ok(params.rate * l / denominator)
}
