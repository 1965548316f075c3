//! Stepping agents through an arena: traces, orbit closure, coverage sweeps.
//!
//! Time is counted in steps. The start vertex is visited at `t = 0`, so a
//! cover time of `T` means `T` edge traversals were needed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

use crate::arena::{Arena, Percept, Sensing};
use crate::error::{PolicyError, SimError};
use crate::grid::{FloorSpec, GridDims, Position, Step};
use crate::policy::{MemState, Policy};

/// Anything that picks the next step from a percept and its own memory.
pub trait Controller: Sync {
    type Memory: Clone + Eq + Hash + fmt::Debug + Serialize + Send + Sync;

    fn sensing(&self) -> Sensing;

    fn decide(&self, percept: &Percept, mem: &Self::Memory) -> Result<(Step, Self::Memory), PolicyError>;

    /// Memory values a patrol sweep starts from.
    fn start_memories(&self) -> Vec<Self::Memory>;

    /// Whether a zero step means "stay put" rather than a bug.
    fn allows_stay(&self) -> bool {
        false
    }

    /// Number of distinct memory values, if small; every orbit then closes
    /// within `vertices * states + 1` steps.
    fn memory_state_count(&self) -> Option<usize>;

    /// Dense index of a memory value in `0..memory_state_count()`.
    fn memory_index(&self, _mem: &Self::Memory) -> Option<usize> {
        None
    }
}

impl Controller for Policy {
    type Memory = MemState;

    fn sensing(&self) -> Sensing {
        Sensing::Boundary(self.range())
    }

    fn decide(&self, percept: &Percept, mem: &MemState) -> Result<(Step, MemState), PolicyError> {
        match percept {
            Percept::Boundary(s) => Policy::decide(self, s, *mem),
            Percept::Offsets(_) => Err(PolicyError::Incompatible {
                policy: "grid policy",
                requirement: "boundary-distance sensing".into(),
            }),
        }
    }

    fn start_memories(&self) -> Vec<MemState> {
        (0..self.memory_states())
            .map(|b| self.initial_memory(b).expect("within declared states"))
            .collect()
    }

    fn memory_state_count(&self) -> Option<usize> {
        Some(self.memory_states() as usize)
    }

    fn memory_index(&self, mem: &MemState) -> Option<usize> {
        Some(mem.bits() as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AgentState<M> {
    pub position: Position,
    pub mem: M,
}

impl<M> AgentState<M> {
    pub fn new(position: Position, mem: M) -> Self {
        Self { position, mem }
    }
}

/// Which vertices must be visited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    All,
    Floor(FloorSpec),
    Vertices(BTreeSet<Position>),
}

impl Target {
    fn mask(&self, arena: &dyn Arena) -> (Vec<bool>, usize) {
        let mask: Vec<bool> = match self {
            Target::All => vec![true; arena.vertex_count()],
            Target::Floor(f) => arena.positions().map(|p| f.contains(&p)).collect(),
            Target::Vertices(set) => arena.positions().map(|p| set.contains(&p)).collect(),
        };
        let count = mask.iter().filter(|&&b| b).count();
        (mask, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub max_steps: usize,
    /// Keep every state; otherwise only coverage and closure are tracked.
    pub record: bool,
    pub stop_on_cover: bool,
    pub stop_on_cycle: bool,
}

impl RunOptions {
    pub fn recorded(max_steps: usize) -> Self {
        Self {
            max_steps,
            record: true,
            stop_on_cover: false,
            stop_on_cycle: true,
        }
    }

    pub fn summary(max_steps: usize) -> Self {
        Self {
            max_steps,
            record: false,
            stop_on_cover: true,
            stop_on_cycle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace<M> {
    /// `states[t]` is the configuration after `t` steps (empty in summary mode).
    pub states: Vec<AgentState<M>>,
    pub last: AgentState<M>,
    pub steps: usize,
    pub cover_time: Option<usize>,
    pub cycle_start: Option<usize>,
    pub cycle_len: Option<usize>,
    /// Times `t` at which the step into `states[t]` was a stay.
    pub stays: Vec<usize>,
    pub distinct_memories: usize,
}

#[derive(Serialize)]
struct TraceRecord<'a, M> {
    t: usize,
    coords: &'a [i64],
    mem: &'a M,
}

impl<M: Serialize> Trace<M> {
    /// `[{t, coords, mem}, ...]`
    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<TraceRecord<'_, M>> = self
            .states
            .iter()
            .enumerate()
            .map(|(t, s)| TraceRecord {
                t,
                coords: s.position.coords(),
                mem: &s.mem,
            })
            .collect();
        serde_json::to_value(records).expect("trace records serialize")
    }
}

impl<M> Trace<M> {
    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.states.iter().map(|s| &s.position)
    }
}

enum Seen<M> {
    Dense { first: Vec<u32>, states: usize },
    Sparse(HashMap<(usize, M), usize>),
}

impl<M: Hash + Eq + Clone> Seen<M> {
    /// Records the configuration and returns when it was first seen.
    fn visit(&mut self, vertex: usize, mem: &M, dense: Option<usize>, t: usize) -> Option<usize> {
        match self {
            Seen::Dense { first, states } => {
                let slot = &mut first[vertex * *states + dense.expect("dense index")];
                if *slot == u32::MAX {
                    *slot = t as u32;
                    None
                } else {
                    Some(*slot as usize)
                }
            }
            Seen::Sparse(map) => match map.get(&(vertex, mem.clone())) {
                Some(&t0) => Some(t0),
                None => {
                    map.insert((vertex, mem.clone()), t);
                    None
                }
            },
        }
    }
}

pub fn run<C: Controller>(
    arena: &dyn Arena,
    ctrl: &C,
    start: AgentState<C::Memory>,
    max_steps: usize,
    target: &Target,
) -> Result<Trace<C::Memory>, SimError> {
    run_with(arena, ctrl, start, target, RunOptions::recorded(max_steps))
}

pub fn run_with<C: Controller>(
    arena: &dyn Arena,
    ctrl: &C,
    start: AgentState<C::Memory>,
    target: &Target,
    opts: RunOptions,
) -> Result<Trace<C::Memory>, SimError> {
    if opts.max_steps == 0 {
        return Err(SimError::NoSteps);
    }
    let start_idx = arena
        .index_of(&start.position)
        .ok_or_else(|| SimError::BadStart(start.position.clone()))?;
    let (mask, mut remaining) = target.mask(arena);
    let mut visited = vec![false; arena.vertex_count()];
    let dense_states = ctrl
        .memory_state_count()
        .filter(|&k| k.saturating_mul(arena.vertex_count()) <= 1 << 26)
        .filter(|_| ctrl.memory_index(&start.mem).is_some());
    let mut seen = match dense_states {
        Some(k) => Seen::Dense {
            first: vec![u32::MAX; k * arena.vertex_count()],
            states: k,
        },
        None => Seen::Sparse(HashMap::new()),
    };
    let mut mems_seen: HashSet<C::Memory> = HashSet::new();
    let sensing = ctrl.sensing();

    let mut trace = Trace {
        states: Vec::new(),
        last: start.clone(),
        steps: 0,
        cover_time: None,
        cycle_start: None,
        cycle_len: None,
        stays: Vec::new(),
        distinct_memories: 0,
    };
    let mut pos = start.position;
    let mut mem = start.mem;
    let mut idx = start_idx;

    let mark = |idx: usize, visited: &mut Vec<bool>, remaining: &mut usize| {
        if !visited[idx] {
            visited[idx] = true;
            if mask[idx] {
                *remaining -= 1;
            }
        }
    };
    mark(idx, &mut visited, &mut remaining);
    if remaining == 0 {
        trace.cover_time = Some(0);
    }
    seen.visit(idx, &mem, ctrl.memory_index(&mem), 0);
    mems_seen.insert(mem.clone());
    if opts.record {
        trace.states.push(AgentState::new(pos.clone(), mem.clone()));
    }

    for t in 1..=opts.max_steps {
        if opts.stop_on_cover && trace.cover_time.is_some() {
            break;
        }
        let percept = Percept::sense(arena, &pos, sensing);
        let (step, next_mem) = ctrl.decide(&percept, &mem)?;
        let next = if step.is_zero() {
            if !ctrl.allows_stay() {
                return Err(SimError::ZeroStep { t: t - 1, at: pos });
            }
            trace.stays.push(t);
            pos
        } else {
            match pos.stepped(step).filter(|q| arena.contains(q)) {
                Some(q) => q,
                None => {
                    return Err(SimError::IllegalStep {
                        t: t - 1,
                        from: pos,
                        step: step.to_string(),
                    })
                }
            }
        };
        idx = arena.index_of(&next).expect("checked above");
        pos = next;
        mem = next_mem;
        trace.steps = t;
        mark(idx, &mut visited, &mut remaining);
        if remaining == 0 && trace.cover_time.is_none() {
            trace.cover_time = Some(t);
        }
        if !mems_seen.contains(&mem) {
            mems_seen.insert(mem.clone());
        }
        if opts.record {
            trace.states.push(AgentState::new(pos.clone(), mem.clone()));
        }
        if let Some(t0) = seen.visit(idx, &mem, ctrl.memory_index(&mem), t) {
            trace.cycle_start = Some(t0);
            trace.cycle_len = Some(t - t0);
            if opts.stop_on_cycle {
                break;
            }
        }
    }
    trace.last = AgentState::new(pos, mem);
    trace.distinct_memories = mems_seen.len();
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartFailure {
    pub start: Position,
    pub mem: serde_json::Value,
    pub reason: String,
    pub cover_time: Option<usize>,
    pub inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatrolReport {
    pub verdict: Verdict,
    pub worst_cover_time: Option<usize>,
    pub budget: usize,
    pub starts: usize,
    pub failures: Vec<StartFailure>,
}

enum StartOutcome {
    Covered(usize),
    Failed(StartFailure),
}

fn judge_start<C: Controller>(
    arena: &dyn Arena,
    ctrl: &C,
    start: AgentState<C::Memory>,
    target: &Target,
    budget: usize,
) -> StartOutcome {
    // Finite configuration spaces always close, so run long enough to tell a
    // late cover from no cover at all.
    let closure = ctrl
        .memory_state_count()
        .map(|k| arena.vertex_count().saturating_mul(k).saturating_add(1));
    let max_steps = closure.map_or(budget, |c| c.max(budget)).max(1);
    let fail = |reason: String, cover_time, inconclusive| {
        StartOutcome::Failed(StartFailure {
            start: start.position.clone(),
            mem: serde_json::to_value(&start.mem).unwrap_or(serde_json::Value::Null),
            reason,
            cover_time,
            inconclusive,
        })
    };
    match run_with(arena, ctrl, start.clone(), target, RunOptions::summary(max_steps)) {
        Err(e) => fail(e.to_string(), None, false),
        Ok(tr) => match tr.cover_time {
            Some(t) if t <= budget => StartOutcome::Covered(t),
            Some(t) => fail(format!("covered only after {t} steps"), Some(t), false),
            None if tr.cycle_start.is_some() => fail(
                format!(
                    "orbit closed at t={} (cycle length {}) without covering the target",
                    tr.steps,
                    tr.cycle_len.unwrap_or(0)
                ),
                None,
                false,
            ),
            None => fail(
                format!("budget of {budget} steps ran out before coverage or orbit closure"),
                None,
                true,
            ),
        },
    }
}

/// Runs from every start vertex in the target and every start memory, and
/// passes iff each run covers the target within `budget` steps.
pub fn verify_patrols<C: Controller>(
    arena: &dyn Arena,
    ctrl: &C,
    target: &Target,
    budget: usize,
    jobs: usize,
) -> Result<PatrolReport, SimError> {
    if budget == 0 {
        return Err(SimError::NoSteps);
    }
    let (mask, _) = target.mask(arena);
    let starts: Vec<AgentState<C::Memory>> = arena
        .positions()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .flat_map(|(p, _)| {
            ctrl.start_memories()
                .into_iter()
                .map(move |m| AgentState::new(p.clone(), m))
        })
        .collect();
    let judge = |s: &AgentState<C::Memory>| judge_start(arena, ctrl, s.clone(), target, budget);
    let outcomes: Vec<StartOutcome> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| starts.par_iter().map(judge).collect())
    } else {
        starts.iter().map(judge).collect()
    };
    let mut worst = None;
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            StartOutcome::Covered(t) => worst = worst.max(Some(t)),
            StartOutcome::Failed(f) => failures.push(f),
        }
    }
    let verdict = if failures.iter().any(|f| !f.inconclusive) {
        Verdict::Fail
    } else if failures.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(PatrolReport {
        verdict,
        worst_cover_time: worst,
        budget,
        starts: starts.len(),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleCheck {
    pub is_hamiltonian_cycle: bool,
    pub length: usize,
}

/// Whether the closed orbit in `trace` visits every vertex exactly once.
pub fn induced_cycle_check<M>(trace: &Trace<M>, arena: &dyn Arena) -> Result<CycleCheck, SimError> {
    let (Some(start), Some(len)) = (trace.cycle_start, trace.cycle_len) else {
        return Err(SimError::Inconclusive);
    };
    if trace.states.len() < start + len + 1 {
        return Err(SimError::Inconclusive);
    }
    let cycle = &trace.states[start..start + len];
    let distinct: BTreeSet<&Position> = cycle.iter().map(|s| &s.position).collect();
    let is_hamiltonian_cycle = len == arena.vertex_count() && distinct.len() == len;
    Ok(CycleCheck {
        is_hamiltonian_cycle,
        length: len,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorEntry<M> {
    /// Step index at which the floor was entered (0 for the start floor).
    pub t: usize,
    pub state: AgentState<M>,
    /// Frozen coordinates `q_{k+1}..q_d` of the floor.
    pub floor: Vec<i64>,
    /// The crossing step, `None` for the start floor.
    pub via: Option<String>,
    pub upward: bool,
    /// Every vertex of the floor was visited before leaving it.
    pub fully_covered: bool,
    /// The agent left the floor before the trace ended.
    pub departed: bool,
}

/// Splits a recorded trace at every change of `k`-floor and reports, for
/// each visit, whether the floor was completely covered before leaving.
pub fn floor_entry_audit<M: Clone>(
    trace: &Trace<M>,
    dims: &GridDims,
    k: usize,
) -> Result<Vec<FloorEntry<M>>, SimError> {
    let d = dims.dim();
    if k == 0 || k >= d {
        return Err(SimError::AuditOrder { k, d });
    }
    let floor_size: usize = dims.as_slice()[..k].iter().product();
    let mut out: Vec<FloorEntry<M>> = Vec::new();
    let mut visited: BTreeSet<&[i64]> = BTreeSet::new();
    for (t, s) in trace.states.iter().enumerate() {
        let floor = &s.position.coords()[k..];
        let entering = out.last().map_or(true, |e| e.floor.as_slice() != floor);
        if entering {
            if let Some(prev) = out.last_mut() {
                prev.fully_covered = visited.len() == floor_size;
                prev.departed = true;
            }
            visited.clear();
            let via = (t > 0).then(|| {
                let from = &trace.states[t - 1].position;
                from.step_to(&s.position).map(|st| st.to_string()).unwrap_or_default()
            });
            let upward = t > 0 && trace.states[t - 1].position.coords()[k..] < *floor;
            out.push(FloorEntry {
                t,
                state: s.clone(),
                floor: floor.to_vec(),
                via,
                upward,
                fully_covered: false,
                departed: false,
            });
        }
        visited.insert(&s.position.coords()[..k]);
    }
    if let Some(last) = out.last_mut() {
        last.fully_covered = visited.len() == floor_size;
    }
    Ok(out)
}
