//! Arbitrary finite connected vertex sets in `Z^d`, and the two general
//! patrolling strategies that work on them: direction-sequence sweeps and
//! following a Hamiltonian cycle with full visibility.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::arena::{Arena, OffsetSet, Percept, Sensing};
use crate::error::{EnvError, PolicyError, SearchError};
use crate::feasibility::hamiltonian_cycle;
use crate::grid::{GridDims, Position, Step};
use crate::sim::Controller;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    d: usize,
    vertices: Vec<Position>,
    index: HashMap<Position, usize>,
}

impl Environment {
    /// Builds an environment, dropping duplicates and keeping vertices sorted.
    pub fn new(points: impl IntoIterator<Item = Position>) -> Result<Self, EnvError> {
        let set: BTreeSet<Position> = points.into_iter().collect();
        let d = set.iter().next().ok_or(EnvError::Empty)?.dim();
        if let Some((i, bad)) = set.iter().enumerate().find(|(_, p)| p.dim() != d) {
            return Err(EnvError::DimensionMismatch {
                line: i + 1,
                expected: d,
                found: bad.dim(),
            });
        }
        let vertices: Vec<Position> = set.into_iter().collect();
        let index = vertices.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let env = Self { d, vertices, index };
        let components = env.components();
        if components > 1 {
            return Err(EnvError::Disconnected { components });
        }
        Ok(env)
    }

    /// One comma-separated coordinate tuple per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, EnvError> {
        let mut points = Vec::new();
        let mut d = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let coords = line
                .split(',')
                .map(|c| c.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EnvError::Syntax {
                    line: i + 1,
                    reason: format!("{line:?}: {e}"),
                })?;
            let expected = *d.get_or_insert(coords.len());
            if coords.len() != expected {
                return Err(EnvError::DimensionMismatch {
                    line: i + 1,
                    expected,
                    found: coords.len(),
                });
            }
            points.push(Position::new(coords));
        }
        Self::new(points)
    }

    /// Named shapes: `grid-with-hole` (5x5 minus its centre), `l-shape`
    /// (4x2 and 2x4 sharing a 2x2 corner), and `grid:<dims>`.
    pub fn generate(name: &str) -> Result<Self, EnvError> {
        match name {
            "grid-with-hole" => Self::new(
                GridDims::new(vec![5, 5])
                    .expect("valid dims")
                    .positions()
                    .filter(|p| p.coords() != [3, 3]),
            ),
            "l-shape" => Self::new(
                GridDims::new(vec![4, 4])
                    .expect("valid dims")
                    .positions()
                    .filter(|p| p.get(1) <= 2 || p.get(2) <= 2),
            ),
            _ => match name.strip_prefix("grid:").map(str::parse::<GridDims>) {
                Some(Ok(dims)) => Ok(Self::from_grid(&dims)),
                _ => Err(EnvError::UnknownGenerator(name.to_string())),
            },
        }
    }

    pub fn from_grid(dims: &GridDims) -> Self {
        Self::new(dims.positions()).expect("grids are connected")
    }

    pub fn vertices(&self) -> &[Position] {
        &self.vertices
    }

    pub fn to_text(&self) -> String {
        self.vertices
            .iter()
            .map(|p| {
                let parts: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
                parts.join(",") + "\n"
            })
            .collect()
    }

    fn bfs(&self, adj: &[Vec<usize>], from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; adj.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; adj.len()];
        let mut count = 0;
        for s in 0..adj.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            for (v, dist) in self.bfs(&adj, s).into_iter().enumerate() {
                if dist != usize::MAX {
                    seen[v] = true;
                }
            }
        }
        count
    }

    /// Largest graph distance between two vertices.
    pub fn diameter(&self) -> usize {
        let adj = self.adjacency();
        (0..adj.len())
            .map(|s| self.bfs(&adj, s).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// The set of visible in-environment offsets within Manhattan radius `range`.
    pub fn sense(&self, p: &Position, range: u32) -> Result<OffsetSet, EnvError> {
        if !self.contains(p) {
            return Err(EnvError::NotAVertex(p.clone()));
        }
        Ok(self.offsets(p, range))
    }
}

impl Arena for Environment {
    fn dim(&self) -> usize {
        self.d
    }

    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn index_of(&self, p: &Position) -> Option<usize> {
        self.index.get(p).copied()
    }

    fn position_at(&self, index: usize) -> Position {
        self.vertices[index].clone()
    }

    fn describe(&self) -> String {
        format!("{}-dimensional environment with {} vertices", self.d, self.vertices.len())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvSummary {
    pub dim: usize,
    pub vertices: usize,
    pub connected: bool,
    pub diameter: usize,
}

impl Environment {
    pub fn summary(&self) -> EnvSummary {
        EnvSummary {
            dim: self.d,
            vertices: self.vertices.len(),
            connected: true,
            diameter: self.diameter(),
        }
    }
}

/// Where the sweep is inside the current direction sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    /// About to try move `i` of the sequence.
    Forward(usize),
    /// Undoing successful moves; only moves below index `i` remain.
    Back(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DirSeqState {
    /// Direction ordinals, most significant first.
    pub seq: Vec<u8>,
    pub success: Vec<bool>,
    pub phase: Phase,
}

impl DirSeqState {
    /// Packs the state into `state_bits(d, len)` bits.
    pub fn encode(&self, d: usize) -> u64 {
        let len = self.seq.len();
        let dir_bits = ceil_log2(2 * d as u64);
        let mut x = 0u64;
        for &k in &self.seq {
            x = (x << dir_bits) | k as u64;
        }
        for &b in &self.success {
            x = (x << 1) | b as u64;
        }
        let phase = match self.phase {
            Phase::Forward(i) => i,
            Phase::Back(i) => len + i - 1,
        };
        (x << ceil_log2(2 * len as u64)) | phase as u64
    }
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Memory needed by the direction-sequence sweep: the sequence counter, one
/// success bit per move, and the position within the forward or backward pass.
pub fn dirseq_state_bits(d: usize, diam: usize) -> u32 {
    diam as u32 * ceil_log2(2 * d as u64) + diam as u32 + ceil_log2(2 * diam as u64)
}

/// Tries every direction sequence of length `diam` in lexicographic order,
/// staying put on impossible moves, and retraces the successful moves to
/// get back to the start before the next sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirSeqPatroller {
    d: usize,
    len: usize,
}

impl DirSeqPatroller {
    pub fn new(env: &Environment) -> Self {
        Self {
            d: env.dim(),
            len: env.diameter().max(1),
        }
    }

    pub fn sequence_len(&self) -> usize {
        self.len
    }

    pub fn state_bits(&self) -> u32 {
        dirseq_state_bits(self.d, self.len)
    }

    /// Steps needed to run through every sequence once.
    pub fn sweep_steps(&self) -> usize {
        (2 * self.d).pow(self.len as u32) * 2 * self.len
    }

    pub fn initial_state(&self) -> DirSeqState {
        DirSeqState {
            seq: vec![0; self.len],
            success: vec![false; self.len],
            phase: Phase::Forward(0),
        }
    }

    fn advance(&self, state: &mut DirSeqState) {
        let dirs = 2 * self.d as u8;
        for k in state.seq.iter_mut().rev() {
            *k += 1;
            if *k < dirs {
                break;
            }
            *k = 0;
        }
        state.success.iter_mut().for_each(|b| *b = false);
        state.phase = Phase::Forward(0);
    }
}

impl Controller for DirSeqPatroller {
    type Memory = DirSeqState;

    fn sensing(&self) -> Sensing {
        Sensing::Boundary(1)
    }

    fn decide(&self, percept: &Percept, mem: &DirSeqState) -> Result<(Step, DirSeqState), PolicyError> {
        let Percept::Boundary(s) = percept else {
            return Err(PolicyError::Incompatible {
                policy: "dirseq",
                requirement: "unit-range boundary sensing".into(),
            });
        };
        let mut state = mem.clone();
        loop {
            match state.phase {
                Phase::Forward(i) => {
                    let step = Step::from_ordinal(state.seq[i] as usize);
                    let ok = s.permits(step);
                    state.success[i] = ok;
                    state.phase = if i + 1 < self.len {
                        Phase::Forward(i + 1)
                    } else {
                        Phase::Back(self.len)
                    };
                    return Ok((if ok { step } else { Step::Zero }, state));
                }
                Phase::Back(j) => match (0..j).rev().find(|&i| state.success[i]) {
                    Some(i) => {
                        let step = Step::from_ordinal(state.seq[i] as usize).reversed();
                        state.phase = Phase::Back(i.max(1));
                        if i == 0 {
                            // Nothing left to undo after this move.
                            state.success[0] = false;
                        }
                        return Ok((step, state));
                    }
                    None => self.advance(&mut state),
                },
            }
        }
    }

    fn start_memories(&self) -> Vec<DirSeqState> {
        vec![self.initial_state()]
    }

    fn allows_stay(&self) -> bool {
        true
    }

    fn memory_state_count(&self) -> Option<usize> {
        None
    }
}

/// A memoryless policy that sees the whole environment and walks a fixed
/// Hamiltonian cycle. Each vertex sees a distinct translate of the vertex
/// set, so the percept identifies the vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePolicy {
    range: u32,
    moves: BTreeMap<OffsetSet, Step>,
}

impl CyclePolicy {
    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn moves(&self) -> &BTreeMap<OffsetSet, Step> {
        &self.moves
    }
}

impl Controller for CyclePolicy {
    type Memory = ();

    fn sensing(&self) -> Sensing {
        Sensing::Offsets(self.range)
    }

    fn decide(&self, percept: &Percept, _: &()) -> Result<(Step, ()), PolicyError> {
        let undefined = || PolicyError::Undefined {
            key: percept.describe(),
            mem: 0,
        };
        match percept {
            Percept::Offsets(o) => self.moves.get(o).map(|&s| (s, ())).ok_or_else(undefined),
            Percept::Boundary(_) => Err(undefined()),
        }
    }

    fn start_memories(&self) -> Vec<()> {
        vec![()]
    }

    fn allows_stay(&self) -> bool {
        self.moves.len() == 1
    }

    fn memory_state_count(&self) -> Option<usize> {
        Some(1)
    }

    fn memory_index(&self, _: &()) -> Option<usize> {
        Some(0)
    }
}

/// A 0-bit policy with sensing range equal to the diameter, if the
/// environment has a Hamiltonian cycle.
pub fn full_visibility_hamiltonian(env: &Environment, cap: usize) -> Result<Option<CyclePolicy>, SearchError> {
    let Some(cycle) = hamiltonian_cycle(&env.adjacency(), cap)? else {
        return Ok(None);
    };
    let range = env.diameter() as u32;
    let moves = cycle
        .iter()
        .zip(cycle.iter().cycle().skip(1))
        .map(|(&a, &b)| {
            let from = env.position_at(a);
            let step = from.step_to(&env.position_at(b)).unwrap_or(Step::Zero);
            (env.offsets(&from, range), step)
        })
        .collect();
    Ok(Some(CyclePolicy { range, moves }))
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
