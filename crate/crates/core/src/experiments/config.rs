//! Line-based `key = value` experiment configuration.
//!
//! Grammar: UTF-8 lines; blank lines and lines starting with `#` are ignored;
//! a trailing `# ...` after a value is a comment; every other line is
//! `key = value` with a snake_case key. Keys may appear once. Unknown keys
//! are rejected.
//!
//! | key | unit / form | default |
//! |-----|-------------|---------|
//! | `edge_length_m` | metres | required |
//! | `grid_divisions` | integer >= 1 | required |
//! | `pairs` | integer >= 1 | required |
//! | `arrays` | integer 0..=4, placed at wall midpoints | 1 |
//! | `elements_per_array` | integer, 0 means no array | 48 |
//! | `element_spacing_m` | metres | 0.0625 |
//! | `carrier_hz` | hertz | required |
//! | `path_loss_exponent` | >= 0 | required |
//! | `tx_power_dbm` | dBm | required |
//! | `noise_dbm` | dBm | required |
//! | `beta_db` | dB | required |
//! | `rate_bps` | bits/s | required |
//! | `d_min_m`, `d_max_m` | metres, optional overrides | grid spacing, `sqrt(5) D` |
//! | `sweep_axis` | `pairs`, `edge`, `elements`, `arrays` | `pairs` |
//! | `sweep_values` | comma list | value of the swept key |
//! | `phase_method` | `coordinate_ascent`, `exhaustive` | `coordinate_ascent` |
//! | `phase_step_deg` | degrees dividing 360 | 1 |
//! | `max_sweeps` | integer >= 1 | 50 |
//! | `convergence_tol` | relative | 1e-9 |
//! | `phase_restarts` | integer | 0 |
//! | `placement_mode` | `exhaustive`, `randomized` | `randomized` |
//! | `sample_budget` | integer >= 1 | 1000 |
//! | `exhaustive_cap` | integer | 10000000 |
//! | `seed` | u64 | 0 |
//! | `workers` | integer >= 1 | 1 |
//! | `output` | path | stdout |
//! | `tx_positions`, `rx_positions` | `x,y; x,y; ...` | none |
//! | `demo_elements` | comma list | `0,48` |
//! | `mc_symbols` | integer >= 1 | 100000 |

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::channel::{db_to_linear, dbm_to_mw, LinkParams};
use crate::error::{Error, Result};
use crate::geometry::{ArrayLayout, Deployment, Point2D, Room};
use crate::optimizer::{PhaseMethod, PhaseSearchConfig, PlacementMode, PlacementSearchConfig};

/// Built-in parameter set used when no config file is given.
pub const DEFAULT_CONFIG: &str = include_str!("../../configs/default.conf");

const KNOWN_KEYS: &[&str] = &[
    "edge_length_m",
    "grid_divisions",
    "pairs",
    "arrays",
    "elements_per_array",
    "element_spacing_m",
    "carrier_hz",
    "path_loss_exponent",
    "tx_power_dbm",
    "noise_dbm",
    "beta_db",
    "rate_bps",
    "d_min_m",
    "d_max_m",
    "sweep_axis",
    "sweep_values",
    "phase_method",
    "phase_step_deg",
    "max_sweeps",
    "convergence_tol",
    "phase_restarts",
    "placement_mode",
    "sample_budget",
    "exhaustive_cap",
    "seed",
    "workers",
    "output",
    "tx_positions",
    "rx_positions",
    "demo_elements",
    "mc_symbols",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Pairs,
    Edge,
    Elements,
    Arrays,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Pairs => "pairs",
            SweepAxis::Edge => "edge",
            SweepAxis::Elements => "elements",
            SweepAxis::Arrays => "arrays",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "pairs" => SweepAxis::Pairs,
            "edge" => SweepAxis::Edge,
            "elements" => SweepAxis::Elements,
            "arrays" => SweepAxis::Arrays,
            _ => return None,
        })
    }

    pub fn is_integer(self) -> bool {
        !matches!(self, SweepAxis::Edge)
    }
}

/// A fully validated experiment description.
///
/// User-facing quantities are kept in the units they were written in (dBm, dB,
/// degrees) so serialisation is lossless; `params` holds the linear values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub edge_length: f64,
    pub grid_divisions: u32,
    pub pairs: usize,
    pub arrays: usize,
    pub elements_per_array: usize,
    pub element_spacing: f64,
    pub carrier_hz: f64,
    pub path_loss_exponent: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub beta_db: f64,
    pub rate_bps: f64,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub phase_step_deg: f64,
    pub phase: PhaseSearchConfig,
    pub placement: PlacementSearchConfig,
    pub seed: u64,
    pub output: Option<String>,
    pub tx_positions: Vec<Point2D>,
    pub rx_positions: Vec<Point2D>,
    pub demo_elements: Vec<usize>,
    pub mc_symbols: usize,
    /// Linear link parameters derived from the dB/dBm inputs.
    pub params: LinkParams,
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::ConfigMissing(key.into()))
    }
}

fn bad(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigValue {
        key: key.into(),
        message: message.into(),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(x)
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| bad(key, format!("`{v}` is not a non-negative integer")))
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').map(|s| item(key, s.trim())).collect()
}

fn parse_points(key: &str, v: &str) -> Result<Vec<Point2D>> {
    v.split(';')
        .map(|pair| {
            let coords = parse_list(key, pair, parse_f64)?;
            match coords.as_slice() {
                [x, y] => Ok(Point2D::new(*x, *y)),
                _ => Err(bad(key, format!("`{}` is not an `x,y` pair", pair.trim()))),
            }
        })
        .collect()
}

fn positive(key: &str, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(bad(key, format!("must be > 0, got {x}")))
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigSyntax {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("invalid key `{key}`"),
            });
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("unknown key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("empty value for `{key}`"),
            });
        }
        if let Some((first, _)) = map.insert(key.to_string(), (line_no, value.to_string())) {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("duplicate key `{key}` (first on line {first})"),
            });
        }
    }
    build(Entries { map })
}

fn build(mut e: Entries) -> Result<ExperimentConfig> {
    let edge_length = positive(
        "edge_length_m",
        parse_f64("edge_length_m", &e.required("edge_length_m")?)?,
    )?;
    let grid_divisions: u32 = parse_int("grid_divisions", &e.required("grid_divisions")?)?;
    if grid_divisions == 0 {
        return Err(bad("grid_divisions", "must be >= 1"));
    }
    let pairs: usize = parse_int("pairs", &e.required("pairs")?)?;
    if pairs == 0 {
        return Err(bad("pairs", "must be >= 1"));
    }
    let arrays: usize = match e.take("arrays") {
        Some(v) => parse_int("arrays", &v)?,
        None => 1,
    };
    if arrays > 4 {
        return Err(bad("arrays", "a square room has at most 4 wall midpoints"));
    }
    let elements_per_array: usize = match e.take("elements_per_array") {
        Some(v) => parse_int("elements_per_array", &v)?,
        None => 48,
    };
    let element_spacing = match e.take("element_spacing_m") {
        Some(v) => positive("element_spacing_m", parse_f64("element_spacing_m", &v)?)?,
        None => 0.0625,
    };

    let carrier_hz = positive(
        "carrier_hz",
        parse_f64("carrier_hz", &e.required("carrier_hz")?)?,
    )?;
    let path_loss_exponent = parse_f64("path_loss_exponent", &e.required("path_loss_exponent")?)?;
    if path_loss_exponent < 0.0 {
        return Err(bad("path_loss_exponent", "must be >= 0"));
    }
    let tx_power_dbm = parse_f64("tx_power_dbm", &e.required("tx_power_dbm")?)?;
    let noise_dbm = parse_f64("noise_dbm", &e.required("noise_dbm")?)?;
    let beta_db = parse_f64("beta_db", &e.required("beta_db")?)?;
    let rate_bps = positive("rate_bps", parse_f64("rate_bps", &e.required("rate_bps")?)?)?;
    let params = LinkParams::new(
        carrier_hz,
        path_loss_exponent,
        dbm_to_mw(tx_power_dbm),
        dbm_to_mw(noise_dbm),
        db_to_linear(beta_db),
        rate_bps,
    )
    .map_err(|err| bad("link parameters", err.to_string()))?;

    let d_min = e
        .take("d_min_m")
        .map(|v| parse_f64("d_min_m", &v))
        .transpose()?;
    let d_max = e
        .take("d_max_m")
        .map(|v| parse_f64("d_max_m", &v))
        .transpose()?;
    if let Some(x) = d_min {
        positive("d_min_m", x)?;
    }
    if let (Some(lo), Some(hi)) = (d_min, d_max) {
        if lo >= hi {
            return Err(bad("d_min_m", format!("must be < d_max_m ({lo} >= {hi})")));
        }
    }

    let sweep_axis = match e.take("sweep_axis") {
        Some(v) => {
            SweepAxis::parse(&v).ok_or_else(|| bad("sweep_axis", format!("unknown axis `{v}`")))?
        }
        None => SweepAxis::Pairs,
    };
    let sweep_values = match e.take("sweep_values") {
        Some(v) => parse_list("sweep_values", &v, parse_f64)?,
        None => vec![match sweep_axis {
            SweepAxis::Pairs => pairs as f64,
            SweepAxis::Edge => edge_length,
            SweepAxis::Elements => elements_per_array as f64,
            SweepAxis::Arrays => arrays as f64,
        }],
    };
    if sweep_values.is_empty() {
        return Err(bad("sweep_values", "must be non-empty"));
    }
    for &v in &sweep_values {
        let ok = match sweep_axis {
            SweepAxis::Edge => v > 0.0,
            SweepAxis::Arrays => v.fract() == 0.0 && (0.0..=4.0).contains(&v),
            SweepAxis::Elements => v.fract() == 0.0 && v >= 0.0,
            SweepAxis::Pairs => v.fract() == 0.0 && v >= 1.0,
        };
        if !ok {
            return Err(bad(
                "sweep_values",
                format!("{v} is not valid for axis `{}`", sweep_axis.name()),
            ));
        }
    }

    let method = match e.take("phase_method").as_deref() {
        None | Some("coordinate_ascent") => PhaseMethod::CoordinateAscent,
        Some("exhaustive") => PhaseMethod::Exhaustive,
        Some(other) => return Err(bad("phase_method", format!("unknown method `{other}`"))),
    };
    let phase_step_deg = match e.take("phase_step_deg") {
        Some(v) => positive("phase_step_deg", parse_f64("phase_step_deg", &v)?)?,
        None => 1.0,
    };
    let seed: u64 = match e.take("seed") {
        Some(v) => parse_int("seed", &v)?,
        None => 0,
    };
    let phase = PhaseSearchConfig {
        method,
        phase_step: phase_step_deg.to_radians(),
        max_sweeps: match e.take("max_sweeps") {
            Some(v) => parse_int("max_sweeps", &v)?,
            None => 50,
        },
        convergence_tol: match e.take("convergence_tol") {
            Some(v) => parse_f64("convergence_tol", &v)?,
            None => 1e-9,
        },
        restarts: match e.take("phase_restarts") {
            Some(v) => parse_int("phase_restarts", &v)?,
            None => 0,
        },
        seed,
    };
    phase
        .levels()
        .map_err(|err| bad("phase_step_deg", err.to_string()))?;
    if phase.max_sweeps == 0 {
        return Err(bad("max_sweeps", "must be >= 1"));
    }
    if phase.convergence_tol < 0.0 {
        return Err(bad("convergence_tol", "must be >= 0"));
    }

    let mode = match e.take("placement_mode").as_deref() {
        None | Some("randomized") => PlacementMode::Randomized,
        Some("exhaustive") => PlacementMode::Exhaustive,
        Some(other) => return Err(bad("placement_mode", format!("unknown mode `{other}`"))),
    };
    let placement = PlacementSearchConfig {
        mode,
        sample_budget: match e.take("sample_budget") {
            Some(v) => parse_int("sample_budget", &v)?,
            None => 1000,
        },
        seed,
        parallel_workers: match e.take("workers") {
            Some(v) => parse_int("workers", &v)?,
            None => 1,
        },
        exhaustive_cap: match e.take("exhaustive_cap") {
            Some(v) => parse_int("exhaustive_cap", &v)?,
            None => crate::optimizer::DEFAULT_EXHAUSTIVE_CAP,
        },
    };
    if placement.sample_budget == 0 {
        return Err(bad("sample_budget", "must be >= 1"));
    }
    if placement.parallel_workers == 0 {
        return Err(bad("workers", "must be >= 1"));
    }

    let output = e.take("output");
    let tx_positions = e
        .take("tx_positions")
        .map(|v| parse_points("tx_positions", &v))
        .transpose()?
        .unwrap_or_default();
    let rx_positions = e
        .take("rx_positions")
        .map(|v| parse_points("rx_positions", &v))
        .transpose()?
        .unwrap_or_default();
    if tx_positions.len() != rx_positions.len() {
        return Err(bad(
            "rx_positions",
            "must list as many positions as tx_positions",
        ));
    }
    let demo_elements = match e.take("demo_elements") {
        Some(v) => parse_list("demo_elements", &v, parse_int)?,
        None => vec![0, 48],
    };
    let mc_symbols: usize = match e.take("mc_symbols") {
        Some(v) => parse_int("mc_symbols", &v)?,
        None => 100_000,
    };
    if mc_symbols == 0 {
        return Err(bad("mc_symbols", "must be >= 1"));
    }
    debug_assert!(e.map.is_empty(), "unconsumed keys: {:?}", e.map.keys());

    let cfg = ExperimentConfig {
        edge_length,
        grid_divisions,
        pairs,
        arrays,
        elements_per_array,
        element_spacing,
        carrier_hz,
        path_loss_exponent,
        tx_power_dbm,
        noise_dbm,
        beta_db,
        rate_bps,
        d_min,
        d_max,
        sweep_axis,
        sweep_values,
        phase_step_deg,
        phase,
        placement,
        seed,
        output,
        tx_positions,
        rx_positions,
        demo_elements,
        mc_symbols,
        params,
    };
    // Geometry must be constructible for the base point and every sweep value.
    cfg.room()
        .map_err(|err| bad("edge_length_m", err.to_string()))?;
    for &v in &cfg.sweep_values {
        let c = cfg.at(v);
        c.layouts()
            .map_err(|err| bad("elements_per_array", err.to_string()))?;
    }
    if !cfg.tx_positions.is_empty() {
        cfg.deployment()
            .map_err(|err| bad("tx_positions", err.to_string()))?;
    }
    Ok(cfg)
}

fn fmt_f64(x: f64) -> String {
    // Display is the shortest representation that round-trips.
    format!("{x}")
}

fn fmt_points(points: &[Point2D]) -> String {
    points
        .iter()
        .map(|p| format!("{},{}", fmt_f64(p.x), fmt_f64(p.y)))
        .collect::<Vec<_>>()
        .join("; ")
}

impl ExperimentConfig {
    pub fn room(&self) -> Result<Room> {
        Room::new(self.edge_length, self.grid_divisions)
    }

    /// Arrays at wall midpoints in the order `(D/2, 0)`, `(0, D/2)`, `(D/2, D)`, `(D, D/2)`.
    pub fn layouts(&self) -> Result<Vec<ArrayLayout>> {
        let room = self.room()?;
        if self.elements_per_array == 0 {
            return Ok(Vec::new());
        }
        let layouts = (0..self.arrays)
            .map(|w| {
                ArrayLayout::wall_midpoint(&room, w, self.elements_per_array, self.element_spacing)
            })
            .collect::<Result<Vec<_>>>()?;
        for l in &layouts {
            l.element_positions(&room)?;
        }
        Ok(layouts)
    }

    pub fn total_elements(&self) -> usize {
        self.arrays * self.elements_per_array
    }

    pub fn deployment(&self) -> Result<Deployment> {
        if self.tx_positions.is_empty() {
            return Err(bad("tx_positions", "no deployment given"));
        }
        Deployment::new(self.tx_positions.clone(), self.rx_positions.clone())
    }

    /// This config with the swept quantity set to `value`.
    pub fn at(&self, value: f64) -> ExperimentConfig {
        let mut c = self.clone();
        match self.sweep_axis {
            SweepAxis::Pairs => c.pairs = value as usize,
            SweepAxis::Edge => c.edge_length = value,
            SweepAxis::Elements => c.elements_per_array = value as usize,
            SweepAxis::Arrays => c.arrays = value as usize,
        }
        c
    }

    /// Serialises every key; `parse_config` of the result yields an equal config.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("edge_length_m", fmt_f64(self.edge_length));
        kv("grid_divisions", self.grid_divisions.to_string());
        kv("pairs", self.pairs.to_string());
        kv("arrays", self.arrays.to_string());
        kv("elements_per_array", self.elements_per_array.to_string());
        kv("element_spacing_m", fmt_f64(self.element_spacing));
        kv("carrier_hz", fmt_f64(self.carrier_hz));
        kv("path_loss_exponent", fmt_f64(self.path_loss_exponent));
        kv("tx_power_dbm", fmt_f64(self.tx_power_dbm));
        kv("noise_dbm", fmt_f64(self.noise_dbm));
        kv("beta_db", fmt_f64(self.beta_db));
        kv("rate_bps", fmt_f64(self.rate_bps));
        if let Some(x) = self.d_min {
            kv("d_min_m", fmt_f64(x));
        }
        if let Some(x) = self.d_max {
            kv("d_max_m", fmt_f64(x));
        }
        kv("sweep_axis", self.sweep_axis.name().into());
        kv(
            "sweep_values",
            self.sweep_values
                .iter()
                .map(|v| fmt_f64(*v))
                .collect::<Vec<_>>()
                .join(","),
        );
        kv(
            "phase_method",
            match self.phase.method {
                PhaseMethod::CoordinateAscent => "coordinate_ascent",
                PhaseMethod::Exhaustive => "exhaustive",
            }
            .into(),
        );
        kv("phase_step_deg", fmt_f64(self.phase_step_deg));
        kv("max_sweeps", self.phase.max_sweeps.to_string());
        kv("convergence_tol", fmt_f64(self.phase.convergence_tol));
        kv("phase_restarts", self.phase.restarts.to_string());
        kv(
            "placement_mode",
            match self.placement.mode {
                PlacementMode::Exhaustive => "exhaustive",
                PlacementMode::Randomized => "randomized",
            }
            .into(),
        );
        kv("sample_budget", self.placement.sample_budget.to_string());
        kv("exhaustive_cap", self.placement.exhaustive_cap.to_string());
        kv("seed", self.seed.to_string());
        kv("workers", self.placement.parallel_workers.to_string());
        if let Some(o) = &self.output {
            kv("output", o.clone());
        }
        if !self.tx_positions.is_empty() {
            kv("tx_positions", fmt_points(&self.tx_positions));
            kv("rx_positions", fmt_points(&self.rx_positions));
        }
        kv(
            "demo_elements",
            self.demo_elements
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("mc_symbols", self.mc_symbols.to_string());
        s
    }

    /// Overrides the seed everywhere it is used.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.phase.seed = seed;
        self.placement.seed = seed;
    }

    pub fn set_workers(&mut self, workers: usize) {
        self.placement.parallel_workers = workers.max(1);
    }
}
