//! Which grids a memoryless agent can patrol, and exhaustive oracles that
//! check the answer independently on small instances.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::arena::Arena;
use crate::error::SearchError;
use crate::grid::{sensing_regions, GridDims, Position, SenseKey, Step};
use crate::policy::{Policy, PolicyKind, TablePolicy};
use crate::sim::{verify_patrols, Target, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityVerdict {
    pub patrollable_0bit: bool,
    /// At most one axis is longer than `2V + 1`.
    pub condition1_holds: bool,
    /// The product of `min(n_i, 2V + 1)` is even or equals 1.
    pub condition2_holds: bool,
    /// Constructive policy when patrollable.
    pub witness: Option<String>,
    /// Violated condition when not.
    pub reason: Option<String>,
}

/// The two-condition test for 0-bit patrollability. An empty `dims` slice
/// stands for the single-vertex grid.
pub fn theorem1_check(dims: &[usize], range: u32) -> FeasibilityVerdict {
    let cap = 2 * range as usize + 1;
    let long: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > cap)
        .map(|(i, _)| i + 1)
        .collect();
    let condition1_holds = long.len() <= 1;
    let product: usize = dims.iter().map(|&n| n.min(cap)).product();
    let condition2_holds = product % 2 == 0 || product == 1;
    let patrollable_0bit = condition1_holds && condition2_holds;
    let witness = patrollable_0bit.then(|| {
        let kind = if range == 1 {
            PolicyKind::MemorylessV1
        } else {
            PolicyKind::MemorylessVgt1
        };
        kind.to_string()
    });
    let reason = if !condition1_holds {
        Some(format!("axes {long:?} are all longer than 2V+1 = {cap}"))
    } else if !condition2_holds {
        Some(format!("product of min(n_i, {cap}) is {product}, odd and greater than 1"))
    } else {
        None
    };
    FeasibilityVerdict {
        patrollable_0bit,
        condition1_holds,
        condition2_holds,
        witness,
        reason,
    }
}

/// Bipartite colouring argument: a closed walk visiting every vertex once
/// alternates colours, so an odd vertex count above 1 rules it out.
pub fn hamiltonicity_parity(dims: &GridDims) -> bool {
    let n = dims.vertex_count();
    n % 2 == 0 || n == 1
}

pub const DEFAULT_HAMILTONIAN_CAP: usize = 24;

/// Backtracking search for a Hamiltonian cycle over vertex indices.
///
/// A single vertex is its own cycle, and two adjacent vertices count as the
/// cycle that goes back and forth.
pub fn hamiltonian_cycle(adj: &[Vec<usize>], cap: usize) -> Result<Option<Vec<usize>>, SearchError> {
    let n = adj.len();
    if n > cap {
        return Err(SearchError::TooManyVertices { size: n, cap });
    }
    match n {
        0 => return Ok(None),
        1 => return Ok(Some(vec![0])),
        2 => return Ok(adj[0].contains(&1).then(|| vec![0, 1])),
        _ => {}
    }
    let mut path = vec![0];
    let mut on_path = vec![false; n];
    on_path[0] = true;
    Ok(extend_path(adj, &mut path, &mut on_path).then_some(path))
}

fn extend_path(adj: &[Vec<usize>], path: &mut Vec<usize>, on_path: &mut [bool]) -> bool {
    let n = adj.len();
    let head = *path.last().expect("path starts non-empty");
    if path.len() == n {
        return adj[head].contains(&path[0]);
    }
    // Every vertex still off the path needs two usable neighbours, one of
    // which may be the head or the start.
    for v in 0..n {
        if on_path[v] {
            continue;
        }
        let usable = adj[v]
            .iter()
            .filter(|&&u| !on_path[u] || u == head || u == path[0])
            .count();
        if usable < 2 {
            return false;
        }
    }
    for &next in &adj[head] {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        path.push(next);
        if extend_path(adj, path, on_path) {
            return true;
        }
        path.pop();
        on_path[next] = false;
    }
    false
}

/// Hamiltonian cycle of any arena, as positions in visiting order.
pub fn hamiltonian_search(arena: &dyn Arena, cap: usize) -> Result<Option<Vec<Position>>, SearchError> {
    let cycle = hamiltonian_cycle(&arena.adjacency(), cap)?;
    Ok(cycle.map(|c| c.into_iter().map(|i| arena.position_at(i)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    pub max_vertices: usize,
    /// Partial assignments the search may explore before giving up.
    pub max_nodes: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            max_vertices: 256,
            max_nodes: 1 << 28,
        }
    }
}

const NONE: usize = usize::MAX;

/// The assignment space: one direction per sensing region.
struct Space {
    n: usize,
    dirs: usize,
    keys: Vec<SenseKey>,
    members: Vec<Vec<usize>>,
    /// `target[v * dirs + k]`: vertex reached from `v` by direction `k`.
    target: Vec<usize>,
    legal: Vec<Vec<bool>>,
    /// `due[r]`: vertices whose last neighbouring region is `r`; once `r`
    /// is assigned nothing else can enter them.
    due: Vec<Vec<usize>>,
}

impl Space {
    fn new(dims: &GridDims, range: u32) -> Result<Self, SearchError> {
        let regions = sensing_regions(dims, range)?;
        let n = dims.vertex_count();
        let dirs = 2 * dims.dim();
        let mut region_of = vec![0; n];
        let members: Vec<Vec<usize>> = regions
            .regions
            .iter()
            .enumerate()
            .map(|(r, reg)| {
                reg.members
                    .iter()
                    .map(|p| {
                        let v = dims.index_of(p).expect("member of grid");
                        region_of[v] = r;
                        v
                    })
                    .collect()
            })
            .collect();
        let mut target = vec![NONE; n * dirs];
        for (v, p) in dims.positions().enumerate() {
            for (k, step) in Step::all(dims.dim()).enumerate() {
                if let Some(i) = p.stepped(step).and_then(|q| dims.index_of(&q)) {
                    target[v * dirs + k] = i;
                }
            }
        }
        let legal = members
            .iter()
            .map(|m| (0..dirs).map(|k| m.iter().all(|&v| target[v * dirs + k] != NONE)).collect())
            .collect();
        let mut due = vec![Vec::new(); members.len()];
        for v in 0..n {
            let last = (0..dirs)
                .filter_map(|k| Some(target[v * dirs + k]).filter(|&u| u != NONE))
                .map(|u| region_of[u])
                .max()
                .expect("grids have at least one edge");
            due[last].push(v);
        }
        Ok(Self {
            n,
            dirs,
            keys: regions.regions.into_iter().map(|r| r.key).collect(),
            members,
            target,
            legal,
            due,
        })
    }

    fn regions(&self) -> usize {
        self.members.len()
    }
}

struct Partial {
    out: Vec<usize>,
    indeg: Vec<u32>,
    choice: Vec<usize>,
}

impl Partial {
    fn new(space: &Space) -> Self {
        Self {
            out: vec![NONE; space.n],
            indeg: vec![0; space.n],
            choice: Vec::with_capacity(space.regions()),
        }
    }

    /// Points every member of region `r` along direction `k`. Fails (and
    /// rolls back) on a shared target or a cycle shorter than the grid.
    fn assign(&mut self, space: &Space, r: usize, k: usize) -> bool {
        let members = &space.members[r];
        for (done, &v) in members.iter().enumerate() {
            let t = space.target[v * space.dirs + k];
            if self.indeg[t] > 0 || self.closes_short_cycle(space.n, v, t) {
                self.rollback(space, r, k, done);
                return false;
            }
            self.indeg[t] += 1;
            self.out[v] = t;
        }
        if space.due[r].iter().any(|&v| self.indeg[v] == 0) {
            self.rollback(space, r, k, members.len());
            return false;
        }
        self.choice.push(k);
        true
    }

    fn closes_short_cycle(&self, n: usize, v: usize, t: usize) -> bool {
        let mut x = t;
        let mut len = 1;
        while x != v {
            x = self.out[x];
            if x == NONE {
                return false;
            }
            len += 1;
        }
        len < n
    }

    fn rollback(&mut self, space: &Space, r: usize, k: usize, count: usize) {
        for &v in &space.members[r][..count] {
            self.indeg[space.target[v * space.dirs + k]] -= 1;
            self.out[v] = NONE;
        }
    }

    fn unassign(&mut self, space: &Space, r: usize) {
        let k = self.choice.pop().expect("region was assigned");
        self.rollback(space, r, k, space.members[r].len());
    }
}

struct CapHit;

fn descend(
    space: &Space,
    partial: &mut Partial,
    nodes: &AtomicU64,
    cap: u64,
    accept: &(dyn Fn(&[usize]) -> bool + Sync),
) -> Result<bool, CapHit> {
    let r = partial.choice.len();
    if r == space.regions() {
        return Ok(accept(&partial.choice));
    }
    for k in 0..space.dirs {
        if !space.legal[r][k] {
            continue;
        }
        if nodes.fetch_add(1, Ordering::Relaxed) >= cap {
            return Err(CapHit);
        }
        if partial.assign(space, r, k) {
            if descend(space, partial, nodes, cap, accept)? {
                return Ok(true);
            }
            partial.unassign(space, r);
        }
    }
    Ok(false)
}

/// Valid assignments of the first `depth` regions, in enumeration order.
fn prefixes(space: &Space, depth: usize) -> Vec<Vec<usize>> {
    fn rec(space: &Space, partial: &mut Partial, depth: usize, out: &mut Vec<Vec<usize>>) {
        let r = partial.choice.len();
        if r == depth {
            out.push(partial.choice.clone());
            return;
        }
        for k in 0..space.dirs {
            if space.legal[r][k] && partial.assign(space, r, k) {
                rec(space, partial, depth, out);
                partial.unassign(space, r);
            }
        }
    }
    let mut out = Vec::new();
    rec(space, &mut Partial::new(space), depth, &mut out);
    out
}

fn table_for(space: &Space, range: u32, choice: &[usize]) -> TablePolicy {
    let mut table = TablePolicy::new(1, range);
    for (key, &k) in space.keys.iter().zip(choice) {
        table.insert(key.clone(), 0, Step::from_ordinal(k), 0);
    }
    table
}

/// Exhaustive search over memoryless policies that pick one direction per
/// sensing region.
///
/// Regions are assigned in key order and directions in step order, so the
/// result is the first patrolling assignment in lexicographic order. Partial
/// assignments are abandoned as soon as two vertices share a successor, a
/// cycle closes before covering the grid, or some vertex can no longer be
/// entered. The winner is confirmed by simulation from every start.
pub fn brute_force_0bit_search(
    dims: &GridDims,
    range: u32,
    caps: SearchCaps,
    jobs: usize,
) -> Result<Option<TablePolicy>, SearchError> {
    let n = dims.vertex_count();
    if n > caps.max_vertices {
        return Err(SearchError::TooManyVertices {
            size: n,
            cap: caps.max_vertices,
        });
    }
    let space = Space::new(dims, range)?;
    let nodes = AtomicU64::new(0);
    let accept = |choice: &[usize]| {
        let policy = Policy::Table(table_for(&space, range, choice));
        matches!(
            verify_patrols(dims, &policy, &Target::All, n, 1),
            Ok(r) if r.verdict == Verdict::Pass
        )
    };
    let solve = |prefix: &Vec<usize>| -> Result<Option<Vec<usize>>, CapHit> {
        let mut partial = Partial::new(&space);
        for (r, &k) in prefix.iter().enumerate() {
            let ok = partial.assign(&space, r, k);
            debug_assert!(ok, "prefixes are valid");
        }
        Ok(descend(&space, &mut partial, &nodes, caps.max_nodes, &accept)?.then(|| partial.choice.clone()))
    };
    let split = prefixes(&space, space.regions().min(3));
    let found = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            split
                .par_iter()
                .map(solve)
                .find_map_first(|res| match res {
                    Ok(None) => None,
                    other => Some(other),
                })
        })
    } else {
        split.iter().map(solve).find_map(|res| match res {
            Ok(None) => None,
            other => Some(other),
        })
    };
    match found {
        None => Ok(None),
        Some(Ok(choice)) => Ok(choice.map(|c| table_for(&space, range, &c))),
        Some(Err(CapHit)) => Err(SearchError::CandidateCap { cap: caps.max_nodes }),
    }
}
