//! Grid-graph geometry.
//!
//! A grid graph `[n_1] x ... x [n_d]` has integer vertices with
//! `1 <= x_i <= n_i` and edges between vertices at Manhattan distance 1.
//! Coordinates are 1-based everywhere in the public API; vertex indices are
//! the only 0-based quantity and are mixed-radix with axis 1 varying fastest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GridError;

/// Dimension vector `(n_1, ..., n_d)`, each `n_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GridDims(Vec<usize>);

impl GridDims {
    pub fn new(dims: Vec<usize>) -> Result<Self, GridError> {
        if dims.is_empty() {
            return Err(GridError::NoAxes);
        }
        if let Some((i, &len)) = dims.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(GridError::AxisTooShort { axis: i + 1, len });
        }
        Ok(Self(dims))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of axes `d`.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Length of 1-based axis `axis`.
    pub fn len_of(&self, axis: usize) -> usize {
        self.0[axis - 1]
    }

    pub fn vertex_count(&self) -> usize {
        self.0.iter().product()
    }

    pub fn check(&self, p: &Position) -> Result<(), GridError> {
        if p.dim() != self.dim() {
            return Err(GridError::DimensionMismatch {
                pos: p.clone(),
                got: p.dim(),
                expected: self.dim(),
            });
        }
        if self.contains(p) {
            Ok(())
        } else {
            Err(GridError::OutOfBounds {
                pos: p.clone(),
                dims: self.to_string(),
            })
        }
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.dim() == self.dim()
            && p.0
                .iter()
                .zip(&self.0)
                .all(|(&x, &n)| x >= 1 && x <= n as i64)
    }

    pub fn index_of(&self, p: &Position) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for (&x, &n) in p.0.iter().zip(&self.0).rev() {
            idx = idx * n + (x as usize - 1);
        }
        Some(idx)
    }

    pub fn position_at(&self, mut idx: usize) -> Position {
        let mut coords = Vec::with_capacity(self.dim());
        for &n in &self.0 {
            coords.push((idx % n) as i64 + 1);
            idx /= n;
        }
        Position(coords)
    }

    /// All vertices in index order.
    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.vertex_count()).map(move |i| self.position_at(i))
    }

    pub fn neighbors(&self, p: &Position) -> Vec<Position> {
        Step::all(self.dim())
            .filter_map(|s| p.stepped(s))
            .filter(|q| self.contains(q))
            .collect()
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0, ",")
    }
}

impl FromStr for GridDims {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dims = parse_list::<usize>(s, "grid dimensions")?;
        GridDims::new(dims)
    }
}

impl TryFrom<Vec<usize>> for GridDims {
    type Error = GridError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        GridDims::new(v)
    }
}

impl From<GridDims> for Vec<usize> {
    fn from(d: GridDims) -> Self {
        d.0
    }
}

/// A lattice point. On grids the coordinates are 1-based; general
/// environments may use any integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<i64>);

impl Position {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn ones(d: usize) -> Self {
        Self(vec![1; d])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Coordinate on 1-based axis `axis`.
    pub fn get(&self, axis: usize) -> i64 {
        self.0[axis - 1]
    }

    /// The position after taking `step`; `None` for the zero step or an axis
    /// this position does not have.
    pub fn stepped(&self, step: Step) -> Option<Position> {
        match step {
            Step::Zero => None,
            Step::Move { axis, sign } => {
                if axis == 0 || axis > self.dim() {
                    return None;
                }
                let mut c = self.0.clone();
                c[axis - 1] += sign.value();
                Some(Position(c))
            }
        }
    }

    pub fn offset(&self, delta: &[i64]) -> Position {
        Position(self.0.iter().zip(delta).map(|(a, b)| a + b).collect())
    }

    pub fn manhattan(&self, other: &Position) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    /// The unit step leading from `self` to `other`, if they are adjacent.
    pub fn step_to(&self, other: &Position) -> Option<Step> {
        if self.dim() != other.dim() || self.manhattan(other) != 1 {
            return None;
        }
        let i = self.0.iter().zip(&other.0).position(|(a, b)| a != b)?;
        let sign = if other.0[i] > self.0[i] {
            Sign::Plus
        } else {
            Sign::Minus
        };
        Some(Step::Move { axis: i + 1, sign })
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        write_joined(f, &self.0, ",")?;
        f.write_str(")")
    }
}

impl FromStr for Position {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        Ok(Position(parse_list::<i64>(t, "position")?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

/// One move of the agent: `+-1` along a 1-based axis, or the zero step.
///
/// The zero step exists because the constructive algorithms start from a
/// zero vector; a policy that hands it back to the simulator is a bug.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Zero,
    Move { axis: usize, sign: Sign },
}

impl Step {
    pub fn up(axis: usize) -> Step {
        Step::Move {
            axis,
            sign: Sign::Plus,
        }
    }

    pub fn down(axis: usize) -> Step {
        Step::Move {
            axis,
            sign: Sign::Minus,
        }
    }

    /// The `2d` unit steps, axis ascending with `-1` before `+1`.
    pub fn all(d: usize) -> impl Iterator<Item = Step> + Clone {
        (1..=d).flat_map(|axis| [Step::down(axis), Step::up(axis)])
    }

    /// Position of this step in [`Step::all`] order.
    pub fn ordinal(self) -> Option<usize> {
        match self {
            Step::Zero => None,
            Step::Move { axis, sign } => Some(2 * (axis - 1) + usize::from(sign == Sign::Plus)),
        }
    }

    pub fn from_ordinal(i: usize) -> Step {
        let axis = i / 2 + 1;
        if i % 2 == 0 {
            Step::down(axis)
        } else {
            Step::up(axis)
        }
    }

    pub fn reversed(self) -> Step {
        match self {
            Step::Zero => Step::Zero,
            Step::Move { axis, sign } => Step::Move {
                axis,
                sign: sign.flip(),
            },
        }
    }

    pub fn axis(self) -> Option<usize> {
        match self {
            Step::Zero => None,
            Step::Move { axis, .. } => Some(axis),
        }
    }

    pub fn is_zero(self) -> bool {
        self == Step::Zero
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Zero => f.write_str("0"),
            Step::Move { axis, sign } => {
                let s = if *sign == Sign::Plus { '+' } else { '-' };
                write!(f, "{s}x{axis}")
            }
        }
    }
}

impl Serialize for Step {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Per-axis boundary distances `(l_i, r_i)`, each truncated at the sensing
/// range. This is the agent's entire percept on a grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SenseData {
    pairs: Vec<(u32, u32)>,
    range: u32,
}

impl SenseData {
    pub fn new(pairs: Vec<(u32, u32)>, range: u32) -> Result<Self, GridError> {
        if range == 0 {
            return Err(GridError::ZeroRange);
        }
        if let Some(&(l, r)) = pairs.iter().find(|&&(l, r)| l > range || r > range) {
            return Err(GridError::Parse {
                what: "sensing data",
                input: format!("({l},{r})"),
                reason: format!("distances exceed the sensing range {range}"),
            });
        }
        Ok(Self { pairs, range })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    /// `l_i` for 1-based axis `i`.
    pub fn l(&self, axis: usize) -> u32 {
        self.pairs[axis - 1].0
    }

    /// `r_i` for 1-based axis `i`.
    pub fn r(&self, axis: usize) -> u32 {
        self.pairs[axis - 1].1
    }

    pub fn key(&self) -> SenseKey {
        SenseKey(self.pairs.clone())
    }

    /// Whether `step` stays inside the environment this percept came from.
    pub fn permits(&self, step: Step) -> bool {
        match step {
            Step::Zero => true,
            Step::Move { axis, sign } => {
                axis >= 1
                    && axis <= self.dim()
                    && match sign {
                        Sign::Minus => self.l(axis) > 0,
                        Sign::Plus => self.r(axis) > 0,
                    }
            }
        }
    }
}

/// Canonical sensing key: the full boundary-distance list, written
/// `l1,r1|l2,r2|...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SenseKey(pub Vec<(u32, u32)>);

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, r)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{l},{r}")?;
        }
        Ok(())
    }
}

impl FromStr for SenseKey {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| GridError::Parse {
            what: "sensing key",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(err("empty key"));
        }
        s.split('|')
            .map(|pair| {
                let (l, r) = pair.split_once(',').ok_or_else(|| err("expected l,r"))?;
                let l = l.trim().parse().map_err(|_| err("bad l"))?;
                let r = r.trim().parse().map_err(|_| err("bad r"))?;
                Ok((l, r))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SenseKey)
    }
}

impl From<SenseKey> for String {
    fn from(k: SenseKey) -> Self {
        k.to_string()
    }
}

impl TryFrom<String> for SenseKey {
    type Error = GridError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

pub fn boundary_distances(
    dims: &GridDims,
    p: &Position,
    range: u32,
) -> Result<SenseData, GridError> {
    if range == 0 {
        return Err(GridError::ZeroRange);
    }
    dims.check(p)?;
    let v = range as i64;
    let pairs = p
        .coords()
        .iter()
        .zip(dims.as_slice())
        .map(|(&x, &n)| ((x - 1).min(v) as u32, (n as i64 - x).min(v) as u32))
        .collect();
    Ok(SenseData { pairs, range })
}

/// Every offset `p' - p` with `p'` in the grid and `|p' - p|_1 <= range`.
pub fn sense_set(
    dims: &GridDims,
    p: &Position,
    range: u32,
) -> Result<BTreeSet<Vec<i64>>, GridError> {
    dims.check(p)?;
    Ok(manhattan_ball(dims.dim(), range)
        .into_iter()
        .filter(|off| dims.contains(&p.offset(off)))
        .collect())
}

/// All integer vectors of dimension `d` with L1 norm at most `radius`.
pub fn manhattan_ball(d: usize, radius: u32) -> Vec<Vec<i64>> {
    fn rec(d: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for x in -budget..=budget {
            prefix.push(x);
            rec(d, budget - x.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, radius as i64, &mut Vec::with_capacity(d), &mut out);
    out
}

/// An equivalence class of vertices that produce the same sensing data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensingRegion {
    pub key: SenseKey,
    pub members: Vec<Position>,
}

/// The sensing-region graph: regions as vertices, adjacent when some grid
/// edge joins members of both.
#[derive(Debug, Clone, Serialize)]
pub struct RegionGraph {
    pub regions: Vec<SensingRegion>,
    /// Edges `(a, b)` with `a < b`, as region indices.
    pub adjacency: BTreeSet<(usize, usize)>,
    pub iso_dims: GridDims,
    /// `witness[i]` is the vertex of the grid `iso_dims` assigned to region `i`.
    pub witness: Vec<Position>,
}

impl RegionGraph {
    pub fn region_of(&self, key: &SenseKey) -> Option<usize> {
        self.regions.iter().position(|r| &r.key == key)
    }

    /// Confirms that `witness` is a graph isomorphism onto `iso_dims`.
    pub fn verify_isomorphism(&self) -> Result<(), String> {
        let iso = &self.iso_dims;
        if self.witness.len() != self.regions.len() {
            return Err("witness does not cover every region".into());
        }
        if self.regions.len() != iso.vertex_count() {
            return Err(format!(
                "{} regions but the target grid has {} vertices",
                self.regions.len(),
                iso.vertex_count()
            ));
        }
        let mut seen = vec![false; iso.vertex_count()];
        for w in &self.witness {
            let i = iso
                .index_of(w)
                .ok_or_else(|| format!("witness {w} outside {iso}"))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(format!("witness {w} used twice"));
            }
        }
        for &(a, b) in &self.adjacency {
            if self.witness[a].manhattan(&self.witness[b]) != 1 {
                return Err(format!("region edge {a}-{b} is not a grid edge"));
            }
        }
        let grid_edges: usize = (1..=iso.dim())
            .map(|axis| iso.vertex_count() / iso.len_of(axis) * (iso.len_of(axis) - 1))
            .sum();
        if grid_edges != self.adjacency.len() {
            return Err(format!(
                "region graph has {} edges, target grid has {grid_edges}",
                self.adjacency.len()
            ));
        }
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph regions {\n  node [shape=box];\n");
        for (i, r) in self.regions.iter().enumerate() {
            out.push_str(&format!(
                "  r{i} [label=\"{}\\n{} vertices\\n{}\"];\n",
                r.key,
                r.members.len(),
                self.witness[i]
            ));
        }
        for (a, b) in &self.adjacency {
            out.push_str(&format!("  r{a} -- r{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Coordinate of a boundary-distance pair inside `[min(n, 2V+1)]`.
fn region_coordinate(l: u32, r: u32, range: u32, m: usize) -> i64 {
    if l < range {
        l as i64 + 1
    } else if r < range {
        m as i64 - r as i64
    } else {
        range as i64 + 1
    }
}

pub fn sensing_regions(dims: &GridDims, range: u32) -> Result<RegionGraph, GridError> {
    if range == 0 {
        return Err(GridError::ZeroRange);
    }
    let mut by_key: BTreeMap<SenseKey, Vec<Position>> = BTreeMap::new();
    let mut key_of = Vec::with_capacity(dims.vertex_count());
    for p in dims.positions() {
        let key = boundary_distances(dims, &p, range)?.key();
        key_of.push(key.clone());
        by_key.entry(key).or_default().push(p);
    }
    let index: BTreeMap<&SenseKey, usize> = by_key.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let mut adjacency = BTreeSet::new();
    for (vi, p) in dims.positions().enumerate() {
        let a = index[&key_of[vi]];
        for q in dims.neighbors(&p) {
            let b = index[&key_of[dims.index_of(&q).expect("neighbor in grid")]];
            if a != b {
                adjacency.insert((a.min(b), a.max(b)));
            }
        }
    }
    let cap = 2 * range as usize + 1;
    let iso_dims = GridDims::new(dims.as_slice().iter().map(|&n| n.min(cap)).collect())?;
    let witness = by_key
        .keys()
        .map(|k| {
            Position::new(
                k.0.iter()
                    .zip(iso_dims.as_slice())
                    .map(|(&(l, r), &m)| region_coordinate(l, r, range, m))
                    .collect(),
            )
        })
        .collect();
    let regions = by_key
        .into_iter()
        .map(|(key, members)| SensingRegion { key, members })
        .collect();
    Ok(RegionGraph {
        regions,
        adjacency,
        iso_dims,
        witness,
    })
}

/// The k-floor `F_k(q_{k+1}, ..., q_d)`: vertices whose coordinates above
/// axis `k` are frozen.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FloorSpec {
    pub k: usize,
    pub fixed: Vec<i64>,
}

impl FloorSpec {
    pub fn new(dims: &GridDims, k: usize, fixed: Vec<i64>) -> Result<Self, GridError> {
        let d = dims.dim();
        if k == 0 || k > d {
            return Err(GridError::FloorOrder { k, d });
        }
        if fixed.len() != d - k {
            return Err(GridError::Parse {
                what: "floor",
                input: format!("{fixed:?}"),
                reason: format!("expected {} frozen coordinates", d - k),
            });
        }
        for (i, &q) in fixed.iter().enumerate() {
            let n = dims.len_of(k + i + 1) as i64;
            if q < 1 || q > n {
                return Err(GridError::OutOfBounds {
                    pos: Position::new(fixed.clone()),
                    dims: dims.to_string(),
                });
            }
        }
        Ok(Self { k, fixed })
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.dim() == self.k + self.fixed.len() && p.coords()[self.k..] == self.fixed[..]
    }

    pub fn vertex_count(&self, dims: &GridDims) -> usize {
        dims.as_slice()[..self.k].iter().product()
    }

    pub fn vertices<'a>(&'a self, dims: &'a GridDims) -> impl Iterator<Item = Position> + 'a {
        dims.positions().filter(move |p| self.contains(p))
    }
}

impl fmt::Display for FloorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=", self.k)?;
        write_joined(f, &self.fixed, ",")
    }
}

pub fn floor_of(dims: &GridDims, p: &Position, k: usize) -> Result<FloorSpec, GridError> {
    dims.check(p)?;
    FloorSpec::new(dims, k, p.coords()[k.min(p.dim())..].to_vec())
}

pub(crate) fn parse_list<T: FromStr>(s: &str, what: &'static str) -> Result<Vec<T>, GridError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(GridError::Parse {
            what,
            input: s.to_string(),
            reason: "empty list".into(),
        });
    }
    s.split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|_| GridError::Parse {
                what,
                input: s.to_string(),
                reason: format!("{:?} is not a valid number", t.trim()),
            })
        })
        .collect()
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(v: &[usize]) -> GridDims {
        GridDims::new(v.to_vec()).unwrap()
    }

    fn pos(v: &[i64]) -> Position {
        Position::new(v.to_vec())
    }

    #[test]
    fn rejects_short_axes() {
        assert_eq!(GridDims::new(vec![]), Err(GridError::NoAxes));
        assert!(matches!(
            GridDims::new(vec![3, 1]),
            Err(GridError::AxisTooShort { axis: 2, len: 1 })
        ));
        assert!("5,x".parse::<GridDims>().is_err());
        assert_eq!("5,3,3,2".parse::<GridDims>().unwrap(), dims(&[5, 3, 3, 2]));
    }

    #[test]
    fn boundary_distance_examples() {
        let s = boundary_distances(&dims(&[5, 5]), &pos(&[1, 3]), 2).unwrap();
        assert_eq!(s.pairs(), &[(0, 2), (2, 2)]);
        let s = boundary_distances(&dims(&[5, 5]), &pos(&[3, 3]), 1).unwrap();
        assert_eq!(s.pairs(), &[(1, 1), (1, 1)]);
        let s = boundary_distances(&dims(&[5, 3, 3, 2]), &pos(&[5, 3, 1, 2]), 1).unwrap();
        assert_eq!(s.pairs(), &[(1, 0), (1, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn boundary_distances_out_of_bounds() {
        let err = boundary_distances(&dims(&[5, 5]), &pos(&[6, 1]), 1).unwrap_err();
        assert!(matches!(err, GridError::OutOfBounds { .. }));
        let err = boundary_distances(&dims(&[5, 5]), &pos(&[1]), 1).unwrap_err();
        assert!(matches!(err, GridError::DimensionMismatch { .. }));
        assert_eq!(
            boundary_distances(&dims(&[5, 5]), &pos(&[1, 1]), 0),
            Err(GridError::ZeroRange)
        );
    }

    #[test]
    fn sense_set_examples() {
        let s = sense_set(&dims(&[5, 5]), &pos(&[3, 3]), 1).unwrap();
        let want: BTreeSet<Vec<i64>> = [
            vec![0, 0],
            vec![1, 0],
            vec![-1, 0],
            vec![0, 1],
            vec![0, -1],
        ]
        .into_iter()
        .collect();
        assert_eq!(s, want);

        let s = sense_set(&dims(&[5, 5]), &pos(&[1, 1]), 1).unwrap();
        let want: BTreeSet<Vec<i64>> = [vec![0, 0], vec![1, 0], vec![0, 1]].into_iter().collect();
        assert_eq!(s, want);

        let s = sense_set(&dims(&[2]), &pos(&[1]), 3).unwrap();
        let want: BTreeSet<Vec<i64>> = [vec![0], vec![1]].into_iter().collect();
        assert_eq!(s, want);
    }

    #[test]
    fn region_examples() {
        let g = sensing_regions(&dims(&[10, 10]), 1).unwrap();
        assert_eq!(g.regions.len(), 9);
        assert_eq!(g.iso_dims, dims(&[3, 3]));
        g.verify_isomorphism().unwrap();

        let g = sensing_regions(&dims(&[7, 5, 5, 2]), 2).unwrap();
        assert_eq!(g.iso_dims, dims(&[5, 5, 5, 2]));
        assert_eq!(g.regions.len(), 250);
        g.verify_isomorphism().unwrap();

        let g = sensing_regions(&dims(&[2, 2]), 1).unwrap();
        assert_eq!(g.regions.len(), 4);
        assert!(g.regions.iter().all(|r| r.members.len() == 1));
        assert_eq!(g.iso_dims, dims(&[2, 2]));
    }

    #[test]
    fn broken_witness_is_detected() {
        let mut g = sensing_regions(&dims(&[4, 4]), 1).unwrap();
        g.witness.swap(0, 4);
        assert!(g.verify_isomorphism().is_err());
    }

    #[test]
    fn floor_examples() {
        let d = dims(&[5, 3, 3, 2]);
        let f = floor_of(&d, &pos(&[2, 1, 3, 2]), 2).unwrap();
        assert_eq!(f.fixed, vec![3, 2]);
        assert_eq!(f.vertex_count(&d), 15);
        assert_eq!(f.vertices(&d).count(), 15);
        assert!(f.contains(&pos(&[5, 3, 3, 2])));
        assert!(!f.contains(&pos(&[5, 3, 2, 2])));

        let f = floor_of(&d, &pos(&[2, 1, 3, 2]), 4).unwrap();
        assert!(f.fixed.is_empty());
        assert_eq!(f.vertex_count(&d), d.vertex_count());

        let d = dims(&[4, 4, 4]);
        let f = floor_of(&d, &pos(&[1, 1, 1]), 1).unwrap();
        assert_eq!(f.fixed, vec![1, 1]);
        assert_eq!(f.vertex_count(&d), 4);

        assert_eq!(
            floor_of(&d, &pos(&[1, 1, 1]), 0),
            Err(GridError::FloorOrder { k: 0, d: 3 })
        );
        assert_eq!(
            floor_of(&d, &pos(&[1, 1, 1]), 4),
            Err(GridError::FloorOrder { k: 4, d: 3 })
        );
    }

    #[test]
    fn index_round_trip() {
        let d = dims(&[3, 4, 2]);
        for (i, p) in d.positions().enumerate() {
            assert_eq!(d.index_of(&p), Some(i));
        }
        assert_eq!(d.position_at(1), pos(&[2, 1, 1]));
    }

    #[test]
    fn step_order_and_display() {
        let all: Vec<_> = Step::all(2).collect();
        assert_eq!(all, vec![Step::down(1), Step::up(1), Step::down(2), Step::up(2)]);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.ordinal(), Some(i));
            assert_eq!(Step::from_ordinal(i), *s);
        }
        assert_eq!(Step::up(3).to_string(), "+x3");
        assert_eq!(pos(&[1, 1]).step_to(&pos(&[1, 2])), Some(Step::up(2)));
    }

    #[test]
    fn sense_key_text() {
        let k: SenseKey = "0,1|1,1".parse().unwrap();
        assert_eq!(k.0, vec![(0, 1), (1, 1)]);
        assert_eq!(k.to_string(), "0,1|1,1");
        assert!("0,1|x".parse::<SenseKey>().is_err());
    }
}
