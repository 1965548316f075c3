//! The environments an agent can be simulated in, and what it perceives there.

use std::collections::BTreeSet;
use std::fmt;

use crate::grid::{boundary_distances, manhattan_ball, GridDims, Position, SenseData, Step};

/// A finite vertex set in `Z^d` with unit-step adjacency.
pub trait Arena: Sync {
    fn dim(&self) -> usize;
    fn vertex_count(&self) -> usize;
    fn index_of(&self, p: &Position) -> Option<usize>;
    fn position_at(&self, index: usize) -> Position;

    fn contains(&self, p: &Position) -> bool {
        self.index_of(p).is_some()
    }

    /// Per-axis run lengths from `p` to the edge of the vertex set, capped at
    /// `range`. On grids these are exactly the boundary distances.
    fn boundary_distances(&self, p: &Position, range: u32) -> SenseData {
        let pairs = (1..=self.dim())
            .map(|axis| {
                let run = |step: Step| {
                    let mut q = p.clone();
                    let mut n = 0;
                    while n < range {
                        match q.stepped(step).filter(|q| self.contains(q)) {
                            Some(next) => {
                                q = next;
                                n += 1;
                            }
                            None => break,
                        }
                    }
                    n
                };
                (run(Step::down(axis)), run(Step::up(axis)))
            })
            .collect();
        SenseData::new(pairs, range.max(1)).expect("runs are capped at the range")
    }

    /// Every in-set offset within Manhattan distance `range` of `p`.
    fn offsets(&self, p: &Position, range: u32) -> OffsetSet {
        OffsetSet(
            manhattan_ball(self.dim(), range)
                .into_iter()
                .filter(|o| self.contains(&p.offset(o)))
                .collect(),
        )
    }

    fn positions(&self) -> Box<dyn Iterator<Item = Position> + '_> {
        Box::new((0..self.vertex_count()).map(|i| self.position_at(i)))
    }

    /// Adjacency lists over vertex indices, neighbours in step order.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|i| {
                let p = self.position_at(i);
                Step::all(self.dim())
                    .filter_map(|s| p.stepped(s))
                    .filter_map(|q| self.index_of(&q))
                    .collect()
            })
            .collect()
    }

    fn describe(&self) -> String;
}

impl Arena for GridDims {
    fn dim(&self) -> usize {
        GridDims::dim(self)
    }

    fn vertex_count(&self) -> usize {
        GridDims::vertex_count(self)
    }

    fn index_of(&self, p: &Position) -> Option<usize> {
        GridDims::index_of(self, p)
    }

    fn position_at(&self, index: usize) -> Position {
        GridDims::position_at(self, index)
    }

    fn boundary_distances(&self, p: &Position, range: u32) -> SenseData {
        boundary_distances(self, p, range).expect("position checked by caller")
    }

    fn describe(&self) -> String {
        format!("grid {self}")
    }
}

/// A canonical sensing key for arbitrary environments: the full set of
/// visible offsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OffsetSet(pub BTreeSet<Vec<i64>>);

impl fmt::Display for OffsetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let parts: Vec<String> = o.iter().map(|x| x.to_string()).collect();
            f.write_str(&parts.join(","))?;
        }
        Ok(())
    }
}

/// What a controller asks the simulator to sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sensing {
    Boundary(u32),
    Offsets(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Percept {
    Boundary(SenseData),
    Offsets(OffsetSet),
}

impl Percept {
    pub fn sense(arena: &dyn Arena, p: &Position, sensing: Sensing) -> Percept {
        match sensing {
            Sensing::Boundary(v) => Percept::Boundary(arena.boundary_distances(p, v)),
            Sensing::Offsets(v) => Percept::Offsets(arena.offsets(p, v)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Percept::Boundary(s) => s.key().to_string(),
            Percept::Offsets(o) => o.to_string(),
        }
    }
}
