//! Planar room model: grid, reflect-array element layout, node deployments,
//! path lengths and the ordered enumeration of grid placements.

use std::fmt;

use crate::error::{Error, Result};

/// Tolerance used when snapping coordinates to grid intersections and wall bounds.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A `D x D` square room divided into `M x M` pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Room {
    edge: f64,
    divisions: u32,
}

impl Room {
    pub fn new(edge: f64, divisions: u32) -> Result<Self> {
        if !(edge.is_finite() && edge > 0.0) {
            return Err(Error::InvalidRoom(format!(
                "edge length must be > 0, got {edge}"
            )));
        }
        if divisions == 0 {
            return Err(Error::InvalidRoom("grid divisions must be >= 1".into()));
        }
        Ok(Self { edge, divisions })
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn divisions(&self) -> u32 {
        self.divisions
    }

    /// Distance between adjacent grid intersections, `D / M`.
    pub fn spacing(&self) -> f64 {
        self.edge / self.divisions as f64
    }

    /// Grid intersections per axis, boundaries included.
    pub fn points_per_axis(&self) -> usize {
        self.divisions as usize + 1
    }

    pub fn grid_point_count(&self) -> usize {
        self.points_per_axis() * self.points_per_axis()
    }

    /// Coordinate of the `i`-th grid line; exact at `0` and `D`.
    pub fn grid_coord(&self, i: usize) -> f64 {
        self.edge * i as f64 / self.divisions as f64
    }

    fn grid_index(&self, v: f64) -> Option<usize> {
        if !(-GRID_TOL..=self.edge + GRID_TOL).contains(&v) {
            return None;
        }
        let scaled = v / self.spacing();
        let idx = scaled.round();
        if (scaled - idx).abs() <= GRID_TOL * scaled.abs().max(1.0) {
            Some(idx as usize)
        } else {
            None
        }
    }

    pub fn is_grid_point(&self, p: &Point2D) -> bool {
        self.grid_index(p.x).is_some() && self.grid_index(p.y).is_some()
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        let range = -GRID_TOL..=self.edge + GRID_TOL;
        range.contains(&p.x) && range.contains(&p.y)
    }
}

/// Direction the array faces, pointing from its wall into the room.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallNormal {
    PosX,
    NegX,
    PosY,
    NegY,
}

impl WallNormal {
    /// Unit vector along the wall line (perpendicular to the normal).
    fn tangent(self) -> (f64, f64) {
        match self {
            WallNormal::PosY | WallNormal::NegY => (1.0, 0.0),
            WallNormal::PosX | WallNormal::NegX => (0.0, 1.0),
        }
    }
}

/// One reflect-array flattened to a line of equally spaced elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLayout {
    pub center: Point2D,
    pub wall_normal: WallNormal,
    pub element_count: usize,
    pub element_spacing: f64,
}

impl ArrayLayout {
    pub fn new(
        center: Point2D,
        wall_normal: WallNormal,
        element_count: usize,
        element_spacing: f64,
    ) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::LayoutInvalid(format!("non-finite center {center}")));
        }
        if element_count == 0 {
            return Err(Error::LayoutInvalid("element count must be >= 1".into()));
        }
        if !(element_spacing.is_finite() && element_spacing > 0.0) {
            return Err(Error::LayoutInvalid(format!(
                "element spacing must be > 0, got {element_spacing}"
            )));
        }
        Ok(Self {
            center,
            wall_normal,
            element_count,
            element_spacing,
        })
    }

    /// Array centred on the midpoint of one of the room's walls.
    ///
    /// Walls are numbered in the order arrays are added in multi-array runs:
    /// `0 = (D/2, 0)`, `1 = (0, D/2)`, `2 = (D/2, D)`, `3 = (D, D/2)`.
    pub fn wall_midpoint(
        room: &Room,
        wall: usize,
        element_count: usize,
        element_spacing: f64,
    ) -> Result<Self> {
        let d = room.edge();
        let (center, normal) = match wall {
            0 => (Point2D::new(d / 2.0, 0.0), WallNormal::PosY),
            1 => (Point2D::new(0.0, d / 2.0), WallNormal::PosX),
            2 => (Point2D::new(d / 2.0, d), WallNormal::NegY),
            3 => (Point2D::new(d, d / 2.0), WallNormal::NegX),
            _ => {
                return Err(Error::LayoutInvalid(format!(
                    "a square room has four walls, got wall index {wall}"
                )))
            }
        };
        Self::new(center, normal, element_count, element_spacing)
    }

    /// Total extent `(N - 1) * spacing` of the element line.
    pub fn span(&self) -> f64 {
        (self.element_count - 1) as f64 * self.element_spacing
    }

    /// Element positions, symmetric about the center, in ascending order along the wall.
    pub fn element_positions(&self, room: &Room) -> Result<Vec<Point2D>> {
        let (tx, ty) = self.wall_normal.tangent();
        let half = (self.element_count - 1) as f64 / 2.0;
        let points: Vec<Point2D> = (0..self.element_count)
            .map(|i| {
                let offset = (i as f64 - half) * self.element_spacing;
                Point2D::new(self.center.x + offset * tx, self.center.y + offset * ty)
            })
            .collect();
        if let Some(p) = points.iter().find(|p| !room.contains(p)) {
            return Err(Error::LayoutInvalid(format!(
                "array span {} m places element {p} outside the {} m wall",
                self.span(),
                room.edge()
            )));
        }
        Ok(points)
    }
}

/// Pools the elements of every layout into one reflector index set.
pub fn pooled_elements(room: &Room, layouts: &[ArrayLayout]) -> Result<Vec<Point2D>> {
    let mut out = Vec::with_capacity(layouts.iter().map(|l| l.element_count).sum());
    for layout in layouts {
        out.extend(layout.element_positions(room)?);
    }
    Ok(out)
}

/// `L` transmitter/receiver pairs; link `l` runs from `tx[l]` to `rx[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    tx: Vec<Point2D>,
    rx: Vec<Point2D>,
}

impl Deployment {
    pub fn new(tx: Vec<Point2D>, rx: Vec<Point2D>) -> Result<Self> {
        if tx.is_empty() {
            return Err(Error::InvalidDeployment(
                "at least one pair is required".into(),
            ));
        }
        if tx.len() != rx.len() {
            return Err(Error::InvalidDeployment(format!(
                "{} transmitters but {} receivers",
                tx.len(),
                rx.len()
            )));
        }
        let nodes: Vec<&Point2D> = tx.iter().chain(rx.iter()).collect();
        if let Some(p) = nodes.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidDeployment(format!("non-finite position {p}")));
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if a == b {
                    return Err(Error::InvalidDeployment(format!(
                        "two nodes share position {a}"
                    )));
                }
            }
        }
        Ok(Self { tx, rx })
    }

    pub fn pairs(&self) -> usize {
        self.tx.len()
    }

    pub fn tx(&self) -> &[Point2D] {
        &self.tx
    }

    pub fn rx(&self) -> &[Point2D] {
        &self.rx
    }

    /// Checks every node sits on a grid intersection of `room`.
    pub fn check_on_grid(&self, room: &Room) -> Result<()> {
        match self
            .tx
            .iter()
            .chain(&self.rx)
            .find(|p| !room.is_grid_point(p))
        {
            Some(p) => Err(Error::InvalidDeployment(format!(
                "node {p} is not a grid intersection of the {} m / {} room",
                room.edge(),
                room.divisions()
            ))),
            None => Ok(()),
        }
    }
}

/// Direct and reflected path lengths between one transmitter and one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGeometry {
    /// Line-of-sight length.
    pub direct: f64,
    /// `|tx - e_i| + |e_i - rx|` for every pooled element.
    pub reflected: Vec<f64>,
    /// `reflected[i] - direct`.
    pub excess: Vec<f64>,
}

pub fn path_geometry(tx: Point2D, rx: Point2D, elements: &[Point2D]) -> Result<PathGeometry> {
    let direct = tx.distance(&rx);
    if direct == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "transmitter and receiver coincide at {tx}"
        )));
    }
    let mut reflected = Vec::with_capacity(elements.len());
    for e in elements {
        let (a, b) = (tx.distance(e), e.distance(&rx));
        if a == 0.0 || b == 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "node coincides with reflector element at {e}"
            )));
        }
        reflected.push(a + b);
    }
    let excess = reflected.iter().map(|d| d - direct).collect();
    Ok(PathGeometry {
        direct,
        reflected,
        excess,
    })
}

/// Minimum and maximum propagation lengths used by the closed-form bound.
///
/// Defaults are `D / M` (adjacent grid points) and `sqrt(5) * D`, which covers
/// the room diagonal and the longest corner-to-midwall-to-corner reflection.
/// Either value can be overridden.
pub fn distance_extremes(
    room: &Room,
    d_min: Option<f64>,
    d_max: Option<f64>,
) -> Result<(f64, f64)> {
    let lo = d_min.unwrap_or_else(|| room.spacing());
    let hi = d_max.unwrap_or_else(|| 5f64.sqrt() * room.edge());
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::InvalidBounds {
            d_min: lo,
            d_max: hi,
        });
    }
    Ok((lo, hi))
}

fn falling(n: u128, k: usize) -> u128 {
    (0..k as u128).fold(1u128, |acc, i| if i >= n { 0 } else { acc * (n - i) })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// The ordered space of node placements on the room grid.
///
/// A status assigns `2L` distinct grid points to the slots
/// `(tx_1, ..., tx_L, rx_1, ..., rx_L)`. Statuses are ordered lexicographically
/// by the grid-index key `(x_1, ..., x_2L, y_1, ..., y_2L)`, the nesting of the
/// traversal loops, so `x_1` varies slowest and `y_2L` fastest.
#[derive(Debug, Clone)]
pub struct PlacementSpace {
    room: Room,
    pairs: usize,
    total: u128,
    /// `empty[z][j]`: ways to place `j` labelled x-slots into `z` empty columns.
    empty: Vec<Vec<u128>>,
}

/// Convenience wrapper returning the placement space for `room` and `pairs`.
pub fn enumerate_placements(room: &Room, pairs: usize) -> Result<PlacementSpace> {
    PlacementSpace::new(room, pairs)
}

impl PlacementSpace {
    pub fn new(room: &Room, pairs: usize) -> Result<Self> {
        if pairs == 0 {
            return Err(Error::Infeasible("at least one pair is required".into()));
        }
        let slots = 2 * pairs;
        let points = room.grid_point_count();
        if points < slots {
            return Err(Error::Infeasible(format!(
                "{points} grid points cannot host {slots} distinct nodes"
            )));
        }
        let mut total = 1u128;
        for i in 0..slots {
            total = total
                .checked_mul((points - i) as u128)
                .ok_or_else(|| Error::Infeasible("status count overflows u128".into()))?;
        }
        let g = room.points_per_axis();
        let col_ways: Vec<u128> = (0..=slots).map(|k| falling(g as u128, k)).collect();
        let mut empty = vec![vec![0u128; slots + 1]; g + 1];
        empty[0][0] = 1;
        for z in 1..=g {
            for j in 0..=slots {
                let mut acc = 0u128;
                for k in 0..=j {
                    let prev = empty[z - 1][j - k];
                    if prev != 0 && col_ways[k] != 0 {
                        acc += prev * binomial(j, k) * col_ways[k];
                    }
                }
                empty[z][j] = acc;
            }
        }
        Ok(Self {
            room: *room,
            pairs,
            total,
            empty,
        })
    }

    pub fn room(&self) -> &Room {
        &self.room
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    /// Total number of statuses `K = P! / (P - 2L)!`, `P = (M + 1)^2`.
    pub fn len(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn slots(&self) -> usize {
        2 * self.pairs
    }

    fn grid(&self) -> usize {
        self.room.points_per_axis()
    }

    /// Number of valid statuses whose key starts with `prefix`.
    fn completions(&self, prefix: &[usize]) -> u128 {
        let s = self.slots();
        let g = self.grid();
        if prefix.len() <= s {
            // Only x indices are fixed: count column fillings with distinct y per column.
            let mut used: Vec<(usize, usize)> = Vec::new();
            for &x in prefix {
                match used.iter_mut().find(|(c, _)| *c == x) {
                    Some((_, n)) => *n += 1,
                    None => used.push((x, 1)),
                }
            }
            if used.iter().any(|&(_, n)| n > g) {
                return 0;
            }
            let free = s - prefix.len();
            let mut ways = vec![0u128; free + 1];
            ways[0] = 1;
            for &(_, fixed) in &used {
                let mut next = vec![0u128; free + 1];
                for (j, &w) in ways.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for k in 0..=free - j {
                        let col = falling(g as u128, fixed + k);
                        if col != 0 {
                            next[j + k] += w * binomial(j + k, k) * col;
                        }
                    }
                }
                ways = next;
            }
            let z = g - used.len();
            (0..=free)
                .map(|j| ways[j] * binomial(free, j) * self.empty[z][free - j])
                .sum()
        } else {
            let xs = &prefix[..s];
            let ys = &prefix[s..];
            let mut fixed: Vec<(usize, usize)> = Vec::new();
            let mut free: Vec<(usize, usize)> = Vec::new();
            for (slot, &x) in xs.iter().enumerate() {
                let bucket = if slot < ys.len() {
                    &mut fixed
                } else {
                    &mut free
                };
                match bucket.iter_mut().find(|(c, _)| *c == x) {
                    Some((_, n)) => *n += 1,
                    None => bucket.push((x, 1)),
                }
            }
            for (i, &yi) in ys.iter().enumerate() {
                for (j, &yj) in ys.iter().enumerate().skip(i + 1) {
                    if xs[i] == xs[j] && yi == yj {
                        return 0;
                    }
                }
            }
            free.iter()
                .map(|&(c, n)| {
                    let taken = fixed.iter().find(|(fc, _)| *fc == c).map_or(0, |f| f.1);
                    falling((g - taken) as u128, n)
                })
                .product()
        }
    }

    /// Grid-index key of the status at `index`.
    pub fn key_at(&self, index: u128) -> Option<Vec<usize>> {
        if index >= self.total {
            return None;
        }
        let mut rest = index;
        let mut key = Vec::with_capacity(2 * self.slots());
        for _ in 0..2 * self.slots() {
            let mut chosen = None;
            for v in 0..self.grid() {
                key.push(v);
                let n = self.completions(&key);
                if rest < n {
                    chosen = Some(v);
                    break;
                }
                rest -= n;
                key.pop();
            }
            chosen?;
        }
        Some(key)
    }

    /// Position of `key` in the status order, or `None` if it is not a valid status.
    pub fn index_of_key(&self, key: &[usize]) -> Option<u128> {
        if key.len() != 2 * self.slots() || key.iter().any(|&v| v >= self.grid()) {
            return None;
        }
        if !self.key_is_valid(key) {
            return None;
        }
        let mut index = 0u128;
        let mut prefix = Vec::with_capacity(key.len());
        for &v in key {
            for smaller in 0..v {
                prefix.push(smaller);
                index += self.completions(&prefix);
                prefix.pop();
            }
            prefix.push(v);
        }
        Some(index)
    }

    pub fn index_of(&self, deployment: &Deployment) -> Option<u128> {
        if deployment.pairs() != self.pairs {
            return None;
        }
        let nodes: Vec<&Point2D> = deployment.tx().iter().chain(deployment.rx()).collect();
        let mut key = vec![0usize; 2 * self.slots()];
        for (slot, p) in nodes.iter().enumerate() {
            key[slot] = self.room.grid_index(p.x)?;
            key[self.slots() + slot] = self.room.grid_index(p.y)?;
        }
        self.index_of_key(&key)
    }

    fn key_is_valid(&self, key: &[usize]) -> bool {
        let s = self.slots();
        (0..s).all(|i| (i + 1..s).all(|j| key[i] != key[j] || key[s + i] != key[s + j]))
    }

    pub fn deployment_for_key(&self, key: &[usize]) -> Deployment {
        let s = self.slots();
        let point = |slot: usize| {
            Point2D::new(
                self.room.grid_coord(key[slot]),
                self.room.grid_coord(key[s + slot]),
            )
        };
        let tx = (0..self.pairs).map(point).collect();
        let rx = (self.pairs..s).map(point).collect();
        Deployment { tx, rx }
    }

    pub fn deployment_at(&self, index: u128) -> Option<Deployment> {
        self.key_at(index).map(|k| self.deployment_for_key(&k))
    }

    /// Iterates all statuses in order.
    pub fn iter(&self) -> Placements<'_> {
        self.iter_from(0)
    }

    /// Iterates statuses starting at `index`, for partitioning across workers.
    pub fn iter_from(&self, index: u128) -> Placements<'_> {
        Placements {
            space: self,
            key: self.key_at(index),
            index,
        }
    }
}

/// Restartable ordered stream of `(status index, deployment)`.
#[derive(Debug, Clone)]
pub struct Placements<'a> {
    space: &'a PlacementSpace,
    key: Option<Vec<usize>>,
    index: u128,
}

impl Placements<'_> {
    fn advance(&mut self) {
        let g = self.space.grid();
        let Some(key) = self.key.as_mut() else {
            return;
        };
        loop {
            let mut pos = key.len();
            loop {
                if pos == 0 {
                    self.key = None;
                    return;
                }
                pos -= 1;
                key[pos] += 1;
                if key[pos] < g {
                    break;
                }
                key[pos] = 0;
            }
            if self.space.key_is_valid(key) {
                return;
            }
        }
    }
}

impl Iterator for Placements<'_> {
    type Item = (u128, Deployment);

    fn next(&mut self) -> Option<Self::Item> {
        let key = self.key.as_ref()?;
        let item = (self.index, self.space.deployment_for_key(key));
        self.index += 1;
        self.advance();
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn room(d: f64, m: u32) -> Room {
        Room::new(d, m).unwrap()
    }

    #[test]
    fn single_element_sits_at_center() {
        let layout = ArrayLayout::new(Point2D::new(5.0, 0.0), WallNormal::PosY, 1, 0.0625).unwrap();
        assert_eq!(
            layout.element_positions(&room(10.0, 10)).unwrap(),
            vec![Point2D::new(5.0, 0.0)]
        );
    }

    #[test]
    fn two_elements_straddle_center() {
        let layout = ArrayLayout::new(Point2D::new(5.0, 0.0), WallNormal::PosY, 2, 0.0625).unwrap();
        let pts = layout.element_positions(&room(10.0, 10)).unwrap();
        assert_eq!(
            pts,
            vec![Point2D::new(4.96875, 0.0), Point2D::new(5.03125, 0.0)]
        );
    }

    #[test]
    fn forty_eight_element_span() {
        let layout =
            ArrayLayout::new(Point2D::new(5.0, 0.0), WallNormal::PosY, 48, 0.0625).unwrap();
        assert_eq!(layout.span(), 2.9375);
        let pts = layout.element_positions(&room(10.0, 10)).unwrap();
        assert_eq!(pts[0], Point2D::new(3.53125, 0.0));
        assert_eq!(pts[47], Point2D::new(6.46875, 0.0));
    }

    #[test]
    fn vertical_wall_runs_along_y() {
        let r = room(10.0, 10);
        let layout = ArrayLayout::wall_midpoint(&r, 1, 3, 0.5).unwrap();
        let pts = layout.element_positions(&r).unwrap();
        assert_eq!(
            pts,
            vec![
                Point2D::new(0.0, 4.5),
                Point2D::new(0.0, 5.0),
                Point2D::new(0.0, 5.5)
            ]
        );
    }

    #[test]
    fn span_exceeding_wall_is_rejected() {
        let layout =
            ArrayLayout::new(Point2D::new(1.0, 0.0), WallNormal::PosY, 48, 0.0625).unwrap();
        assert!(matches!(
            layout.element_positions(&room(10.0, 10)),
            Err(Error::LayoutInvalid(_))
        ));
        assert!(ArrayLayout::new(Point2D::new(1.0, 0.0), WallNormal::PosY, 0, 0.1).is_err());
        assert!(ArrayLayout::new(Point2D::new(1.0, 0.0), WallNormal::PosY, 2, 0.0).is_err());
    }

    #[test]
    fn path_geometry_examples() {
        let g = path_geometry(Point2D::new(0.0, 0.0), Point2D::new(0.0, 3.0), &[]).unwrap();
        assert_eq!(g.direct, 3.0);
        assert!(g.reflected.is_empty() && g.excess.is_empty());

        let g = path_geometry(
            Point2D::new(4.0, 3.0),
            Point2D::new(6.0, 3.0),
            &[Point2D::new(5.0, 0.0)],
        )
        .unwrap();
        assert_eq!(g.direct, 2.0);
        let expected = 2.0 * 10f64.sqrt();
        assert!((g.reflected[0] - expected).abs() < 1e-12);
        assert!((g.reflected[0] - 6.32456).abs() < 1e-5);
        assert!((g.excess[0] - 4.32456).abs() < 1e-5);
        assert_eq!(g.excess[0] + g.direct, g.reflected[0]);
    }

    #[test]
    fn degenerate_paths_error() {
        let p = Point2D::new(1.0, 1.0);
        assert!(matches!(
            path_geometry(p, p, &[]),
            Err(Error::DegenerateGeometry(_))
        ));
        let e = Point2D::new(5.0, 0.0);
        assert!(matches!(
            path_geometry(e, Point2D::new(1.0, 1.0), &[e]),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn distance_extremes_defaults_and_overrides() {
        let (lo, hi) = distance_extremes(&room(10.0, 10), None, None).unwrap();
        assert!((lo - 1.0).abs() < 1e-15);
        assert!((hi - 22.36068).abs() < 1e-5);
        let (lo, hi) = distance_extremes(&room(5.0, 10), None, None).unwrap();
        assert!((lo - 0.5).abs() < 1e-15);
        assert!((hi - 11.18034).abs() < 1e-5);
        assert_eq!(
            distance_extremes(&room(10.0, 10), Some(2.0), Some(8.0)).unwrap(),
            (2.0, 8.0)
        );
        assert!(matches!(
            distance_extremes(&room(10.0, 10), Some(8.0), Some(8.0)),
            Err(Error::InvalidBounds { .. })
        ));
    }

    #[test]
    fn placement_counts() {
        assert_eq!(enumerate_placements(&room(1.0, 1), 1).unwrap().len(), 12);
        assert_eq!(enumerate_placements(&room(1.0, 1), 2).unwrap().len(), 24);
        assert!(matches!(
            enumerate_placements(&room(1.0, 1), 3),
            Err(Error::Infeasible(_))
        ));
        assert_eq!(
            enumerate_placements(&room(10.0, 10), 1).unwrap().len(),
            121 * 120
        );
        assert_eq!(
            enumerate_placements(&room(10.0, 10), 2).unwrap().len(),
            121 * 120 * 119 * 118
        );
        assert!(Room::new(10.0, 0).is_err());
    }

    /// Brute force over every raw key; used as the ordering oracle.
    fn brute_force_keys(g: usize, slots: usize) -> Vec<Vec<usize>> {
        let len = 2 * slots;
        let mut out = Vec::new();
        let mut key = vec![0usize; len];
        'outer: loop {
            let distinct = (0..slots).all(|i| {
                (i + 1..slots).all(|j| key[i] != key[j] || key[slots + i] != key[slots + j])
            });
            if distinct {
                out.push(key.clone());
            }
            let mut pos = len;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                key[pos] += 1;
                if key[pos] < g {
                    break;
                }
                key[pos] = 0;
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (m, pairs) in [(1u32, 1usize), (1, 2), (2, 1), (2, 2)] {
            let space = enumerate_placements(&room(1.0, m), pairs).unwrap();
            let expected = brute_force_keys(m as usize + 1, 2 * pairs);
            assert_eq!(expected.len() as u128, space.len());
            let got: Vec<(u128, Deployment)> = space.iter().collect();
            assert_eq!(got.len(), expected.len());
            let mut seen = HashSet::new();
            for ((idx, dep), key) in got.iter().zip(&expected) {
                assert_eq!(&space.deployment_for_key(key), dep);
                assert_eq!(space.key_at(*idx).as_ref(), Some(key));
                assert_eq!(space.index_of(dep), Some(*idx));
                assert!(seen.insert(format!("{dep:?}")));
            }
        }
    }

    #[test]
    fn iteration_restarts_from_index() {
        let space = enumerate_placements(&room(1.0, 2), 1).unwrap();
        let all: Vec<_> = space.iter().collect();
        for start in [0u128, 1, 17, 40, space.len() - 1] {
            let tail: Vec<_> = space.iter_from(start).collect();
            assert_eq!(tail.as_slice(), &all[start as usize..]);
        }
        assert_eq!(space.iter_from(space.len()).next(), None);
    }

    #[test]
    fn unranking_large_space_round_trips() {
        let space = enumerate_placements(&room(10.0, 10), 3).unwrap();
        for idx in [0u128, 1, 12345, space.len() / 3, space.len() - 1] {
            let dep = space.deployment_at(idx).unwrap();
            assert_eq!(space.index_of(&dep), Some(idx));
        }
        let first = space.deployment_at(0).unwrap();
        // x indices all zero, y ascending.
        assert_eq!(first.tx()[0], Point2D::new(0.0, 0.0));
        assert_eq!(first.rx()[2], Point2D::new(0.0, 5.0));
    }

    #[test]
    fn deployment_validation() {
        let a = Point2D::new(0.0, 0.0);
        let b = Point2D::new(1.0, 0.0);
        assert!(Deployment::new(vec![a], vec![a]).is_err());
        assert!(Deployment::new(vec![], vec![]).is_err());
        assert!(Deployment::new(vec![a, b], vec![b]).is_err());
        let d = Deployment::new(vec![a], vec![b]).unwrap();
        assert!(d.check_on_grid(&room(10.0, 10)).is_ok());
        let off = Deployment::new(vec![a], vec![Point2D::new(0.5, 0.0)]).unwrap();
        assert!(off.check_on_grid(&room(10.0, 10)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn elements_symmetric_about_center(n in 1usize..64, spacing in 0.01f64..0.1, cx in 4.0f64..6.0) {
                let layout = ArrayLayout::new(Point2D::new(cx, 0.0), WallNormal::PosY, n, spacing).unwrap();
                let pts = layout.element_positions(&room(10.0, 10)).unwrap();
                for (a, b) in pts.iter().zip(pts.iter().rev()) {
                    prop_assert!(((a.x - cx) + (b.x - cx)).abs() < 1e-12);
                    prop_assert_eq!(a.y, b.y);
                }
            }

            #[test]
            fn reflected_paths_obey_triangle_inequality(
                tx in (0.0f64..10.0, 0.5f64..10.0),
                rx in (0.0f64..10.0, 0.5f64..10.0),
                ex in proptest::collection::vec(0.0f64..10.0, 0..8),
            ) {
                let tx = Point2D::new(tx.0, tx.1);
                let rx = Point2D::new(rx.0, rx.1);
                prop_assume!(tx != rx);
                let elements: Vec<Point2D> = ex.iter().map(|&x| Point2D::new(x, 0.0)).collect();
                let g = path_geometry(tx, rx, &elements).unwrap();
                prop_assert_eq!(g.reflected.len(), elements.len());
                for (d, dd) in g.reflected.iter().zip(&g.excess) {
                    prop_assert!(*d >= g.direct - 1e-12);
                    prop_assert!((dd + g.direct - *d).abs() <= 1e-12 * d);
                }
            }
        }
    }
}
