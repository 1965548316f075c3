//! Patrolling policies: deterministic maps `(SenseData, mem) -> (step, mem')`.
//!
//! The memoryless policies are told the grid dimensions up front. The
//! one-bit `make_move_*` family sees nothing but boundary distances and its
//! bit. Guards are evaluated in the same order as the reference pseudocode.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::PolicyError;
use crate::grid::{GridDims, SenseData, SenseKey, Sign, Step};

/// Persistent memory: `bits < 2^width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemState {
    bits: u32,
    width: u8,
}

impl MemState {
    pub const EMPTY: MemState = MemState { bits: 0, width: 0 };

    pub fn new(bits: u32, width: u8) -> Result<Self, PolicyError> {
        if width < 32 && bits >= (1u32 << width) {
            return Err(PolicyError::MemoryOverflow { bits, width });
        }
        Ok(Self { bits, width })
    }

    /// A single memory bit.
    pub fn bit(b: u32) -> MemState {
        MemState { bits: b & 1, width: 1 }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn width(self) -> u8 {
        self.width
    }

    fn with_bits(self, bits: u32) -> MemState {
        MemState { bits, ..self }
    }
}

impl Serialize for MemState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(self.bits)
    }
}

impl fmt::Display for MemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

fn undefined(s: &SenseData, mem: MemState) -> PolicyError {
    PolicyError::Undefined {
        key: s.key().to_string(),
        mem: mem.bits,
    }
}

fn require_axes(s: &SenseData, policy: &'static str, needed: usize) -> Result<(), PolicyError> {
    if s.dim() < needed {
        Err(PolicyError::TooFewAxes {
            policy,
            needed,
            got: s.dim(),
        })
    } else {
        Ok(())
    }
}

fn require_unit_range(s: &SenseData, policy: &'static str) -> Result<(), PolicyError> {
    if s.range() != 1 {
        return Err(PolicyError::Incompatible {
            policy,
            requirement: format!("sensing range V=1 (got V={})", s.range()),
        });
    }
    Ok(())
}

fn require_bit(mem: MemState, policy: &'static str) -> Result<u32, PolicyError> {
    if mem.bits > 1 {
        return Err(PolicyError::Incompatible {
            policy,
            requirement: format!("a single memory bit (got state {})", mem.bits),
        });
    }
    Ok(mem.bits)
}

/// Which way to walk an axis on the zig-zag: `l mod 2` near the low wall,
/// otherwise the parity of the high wall.
pub fn parity(range: u32, n: usize, l: u32, r: u32) -> u32 {
    if l < range {
        l % 2
    } else {
        ((n as i64 - r as i64 + 1).rem_euclid(2)) as u32
    }
}

fn parity_sum_above(dims: &[usize], s: &SenseData, j: usize) -> u32 {
    (j + 1..=dims.len())
        .map(|i| parity(s.range(), dims[i - 1], s.l(i), s.r(i)))
        .sum::<u32>()
        % 2
}

/// Axis order used by the V=1 memoryless walk: longest axis first, ties kept
/// in their original order. The walk relies on `n_1 >= ... >= n_d`.
fn zigzag_order(dims: &GridDims) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dims.dim()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(dims.as_slice()[i]));
    order
}

/// Axis order for the V>=2 memoryless walk. Axis 1 must be the unbounded one
/// if there is one; otherwise it must leave an even product behind so the
/// zig-zag over `x_1 > 1` ends next to the return strip.
fn strip_order(dims: &GridDims, range: u32) -> Vec<usize> {
    let n = dims.as_slice();
    let cap = 2 * range as usize + 1;
    let total: usize = n.iter().product();
    let first = n
        .iter()
        .position(|&x| x > cap)
        .or_else(|| {
            (0..n.len())
                .filter(|&i| (total / n[i]) % 2 == 0)
                .max_by_key(|&i| (n[i], std::cmp::Reverse(i)))
        })
        .unwrap_or_else(|| zigzag_order(dims)[0]);
    let mut rest: Vec<usize> = (0..n.len()).filter(|&i| i != first).collect();
    rest.sort_by_key(|&i| std::cmp::Reverse(n[i]));
    std::iter::once(first).chain(rest).collect()
}

fn permute(dims: &GridDims, s: &SenseData, order: &[usize]) -> (Vec<usize>, SenseData) {
    let d: Vec<usize> = order.iter().map(|&i| dims.as_slice()[i]).collect();
    let pairs = order.iter().map(|&i| s.pairs()[i]).collect();
    let s = SenseData::new(pairs, s.range()).expect("permuting keeps distances in range");
    (d, s)
}

fn unpermute(step: Step, order: &[usize]) -> Step {
    match step {
        Step::Zero => Step::Zero,
        Step::Move { axis, sign } => Step::Move {
            axis: order[axis - 1] + 1,
            sign,
        },
    }
}

fn check_shape(dims: &GridDims, s: &SenseData, policy: &'static str) -> Result<(), PolicyError> {
    if s.dim() != dims.dim() {
        return Err(PolicyError::Incompatible {
            policy,
            requirement: format!("{}-axis sensing data for grid {dims} (got {})", dims.dim(), s.dim()),
        });
    }
    Ok(())
}

fn zigzag_v1(n: &[usize], s: &SenseData) -> Step {
    let d = n.len();
    for j in 1..=d {
        let down = parity_sum_above(n, s, j);
        if down == 0 && s.r(j) > 0 {
            return Step::up(j);
        }
        if down == 1 && s.l(j) > 0 {
            return Step::down(j);
        }
    }
    Step::down(d)
}

/// Memoryless V=1 walk for a grid known in advance.
pub fn memoryless_v1(dims: &GridDims, s: &SenseData) -> Result<Step, PolicyError> {
    check_shape(dims, s, "memoryless V=1")?;
    require_unit_range(s, "memoryless V=1")?;
    let order = zigzag_order(dims);
    let (n, s) = permute(dims, s, &order);
    Ok(unpermute(zigzag_v1(&n, &s), &order))
}

fn zigzag_strip(n: &[usize], s: &SenseData) -> Step {
    let d = n.len();
    if s.l(1) == 0 {
        // walk back along the x_1 = 1 strip
        for j in 2..=d {
            let up = parity_sum_above(n, s, j);
            if up == 0 && s.l(j) > 0 {
                return Step::down(j);
            }
            if up == 1 && s.r(j) > 0 {
                return Step::up(j);
            }
        }
        Step::up(1)
    } else {
        for j in 1..=d {
            let down = parity_sum_above(n, s, j);
            if down == 0 && s.r(j) > 0 {
                return Step::up(j);
            }
            if down == 1 && s.l(j) > 0 {
                if j == 1 && s.l(1) == 1 {
                    // keep off the x_1 = 1 strip
                    continue;
                }
                return Step::down(j);
            }
        }
        Step::down(1)
    }
}

/// Memoryless walk for sensing range V >= 2.
pub fn memoryless_vgt1(dims: &GridDims, s: &SenseData) -> Result<Step, PolicyError> {
    check_shape(dims, s, "memoryless V>=2")?;
    if s.range() < 2 {
        return Err(PolicyError::Incompatible {
            policy: "memoryless V>=2",
            requirement: "sensing range V >= 2".into(),
        });
    }
    let order = strip_order(dims, s.range());
    let (n, s) = permute(dims, s, &order);
    Ok(unpermute(zigzag_strip(&n, &s), &order))
}

pub fn make_move_1d(s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
    require_axes(s, "MakeMove1D", 1)?;
    require_unit_range(s, "MakeMove1D")?;
    let out = if require_bit(mem, "MakeMove1D")? == 0 {
        if s.r(1) != 0 {
            (Step::up(1), mem)
        } else {
            (Step::down(1), MemState::bit(1))
        }
    } else if s.l(1) != 0 {
        (Step::down(1), mem)
    } else {
        (Step::up(1), MemState::bit(0))
    };
    Ok(out)
}

struct Guard {
    fires: bool,
    step: Step,
    mem: u32,
}

fn guards_2d(s: &SenseData, mem: u32) -> [Guard; 6] {
    let (l1, r1, l2, r2) = (s.l(1), s.r(1), s.l(2), s.r(2));
    let g = |fires: bool, step: Step, mem: u32| Guard { fires, step, mem };
    if mem == 0 {
        [
            g(r1 != 0 && l2 != 0, Step::up(1), 0),
            g(l1 != 0 && l2 == 0, Step::down(1), 0),
            g(l1 == 0 && l2 == 0, Step::up(2), 0),
            g(r1 == 0 && l2 * r2 != 0, Step::down(1), 1),
            g(r1 == 0 && r2 == 0, Step::down(2), 1),
            g(false, Step::Zero, 0),
        ]
    } else {
        [
            g(l1 == 0 && r2 != 0, Step::up(2), 0),
            g(l1 == 0 && r2 == 0, Step::up(1), 0),
            g(l1 * r1 != 0 && r2 != 0, Step::down(1), 1),
            g(l1 * r1 != 0 && r2 == 0, Step::up(1), 1),
            g(r1 == 0 && l2 == 0, Step::down(1), 0),
            g(r1 == 0 && l2 != 0, Step::down(2), 1),
        ]
    }
}

/// Indices (in pseudocode order within the `mem` branch) of the 2D guards
/// that fire on this input. Exactly one fires on any real grid percept.
pub fn make_move_2d_guards(s: &SenseData, mem: MemState) -> Result<Vec<usize>, PolicyError> {
    require_axes(s, "MakeMove2D", 2)?;
    let bit = require_bit(mem, "MakeMove2D")?;
    Ok(guards_2d(s, bit)
        .iter()
        .enumerate()
        .filter(|(_, g)| g.fires)
        .map(|(i, _)| i)
        .collect())
}

pub fn make_move_2d(s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
    require_axes(s, "MakeMove2D", 2)?;
    require_unit_range(s, "MakeMove2D")?;
    let bit = require_bit(mem, "MakeMove2D")?;
    let mut fired = guards_2d(s, bit).into_iter().filter(|g| g.fires);
    match (fired.next(), fired.next()) {
        (Some(g), None) => Ok((g.step, MemState::bit(g.mem))),
        _ => Err(undefined(s, mem)),
    }
}

pub fn make_move_3d(s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
    require_axes(s, "MakeMove3D", 3)?;
    require_unit_range(s, "MakeMove3D")?;
    let bit = require_bit(mem, "MakeMove3D")?;
    if s.l(1) == 0 && s.r(2) == 0 && bit == 0 {
        let step = if s.r(3) == 0 {
            // x_3 is already maximal
            Step::up(1)
        } else {
            Step::up(3)
        };
        return Ok((step, MemState::bit(1)));
    }
    if s.l(1) != 0 && s.l(3) != 0 && s.r(2) == 0 && bit == 1 {
        return Ok((Step::down(3), mem));
    }
    make_move_2d(s, mem)
}

/// One level of the inductive construction: patrols axes `1..=k+1` by
/// running the `k`-axis walk and using a few reserved states to move along
/// `x_{k+1}`. Needs `k >= 3`; the bottom of the recursion is
/// [`make_move_3d`], whose reserved states differ from the generic ones.
pub fn make_move_kd(s: &SenseData, mem: MemState, k: usize) -> Result<(Step, MemState), PolicyError> {
    if k < 3 {
        return Err(PolicyError::Incompatible {
            policy: "MakeMove(k+1)D",
            requirement: format!("k >= 3 (got k={k})"),
        });
    }
    require_axes(s, "MakeMove(k+1)D", k + 1)?;
    require_unit_range(s, "MakeMove(k+1)D")?;
    let bit = require_bit(mem, "MakeMove(k+1)D")?;
    if (2..k).all(|j| s.l(j) == 0) && s.r(k) == 0 && bit == 1 {
        if s.r(1) == 0 {
            return Ok(if s.r(k + 1) == 0 {
                (Step::down(1), mem)
            } else {
                (Step::up(k + 1), MemState::bit(0))
            });
        }
        if s.l(k + 1) != 0 {
            return Ok((Step::down(k + 1), mem));
        }
    }
    if k == 3 {
        make_move_3d(s, mem)
    } else {
        make_move_kd(s, mem, k - 1)
    }
}

/// The one-bit walk for a grid of any dimension, `d` read off the percept.
pub fn make_move_all(s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
    match s.dim() {
        0 => Err(PolicyError::TooFewAxes {
            policy: "MakeMove",
            needed: 1,
            got: 0,
        }),
        1 => make_move_1d(s, mem),
        2 => make_move_2d(s, mem),
        3 => make_move_3d(s, mem),
        d => make_move_kd(s, mem, d - 1),
    }
}

/// The same walk as [`make_move_all`] written without recursion.
pub fn make_move_noninductive(s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
    let d = s.dim();
    if d <= 2 {
        // the reserved x_3 states do not exist below three axes
        return make_move_all(s, mem);
    }
    require_unit_range(s, "MakeMove")?;
    let bit = require_bit(mem, "MakeMove")?;
    if bit == 0 && s.l(1) == 0 && s.r(2) == 0 {
        let step = if s.r(3) == 0 { Step::up(1) } else { Step::up(3) };
        return Ok((step, MemState::bit(1)));
    }
    if bit == 1 {
        // first axis above 2 whose coordinate exceeds 1
        let k = (3..=d).find(|&j| s.l(j) > 0).unwrap_or(usize::MAX);
        let move_up = s.r(1) == 0 && s.l(2) == 0;
        if move_up && k < d && s.r(k) == 0 {
            return Ok(if s.r(k + 1) == 0 {
                (Step::down(1), mem)
            } else {
                (Step::up(k + 1), MemState::bit(0))
            });
        }
        if s.l(1) != 0 && s.r(2) == 0 {
            if s.l(3) != 0 {
                return Ok((Step::down(3), mem));
            }
            return make_move_2d(s, mem);
        }
        let move_down = s.r(1) != 0 && s.l(2) == 0;
        if move_down && k < d && s.r(k) == 0 {
            if s.l(k + 1) != 0 {
                return Ok((Step::down(k + 1), mem));
            }
            return make_move_2d(s, mem);
        }
    }
    make_move_2d(s, mem)
}

/// A finite transition table keyed by `(sensing key, memory state)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TablePolicy {
    states: u32,
    range: u32,
    entries: BTreeMap<(SenseKey, u32), (Step, u32)>,
}

impl TablePolicy {
    pub fn new(states: u32, range: u32) -> Self {
        Self {
            states: states.max(1),
            range: range.max(1),
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: SenseKey, mem: u32, step: Step, next: u32) {
        self.states = self.states.max(mem + 1).max(next + 1);
        self.entries.insert((key, mem), (step, next));
    }

    pub fn get(&self, key: &SenseKey, mem: u32) -> Option<(Step, u32)> {
        self.entries.get(&(key.clone(), mem)).copied()
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&SenseKey, u32, Step, u32)> {
        self.entries.iter().map(|((k, m), (s, n))| (k, *m, *s, *n))
    }

    /// Memory bits needed to hold `states` distinct values.
    pub fn memory_bits(&self) -> u8 {
        (32 - (self.states - 1).leading_zeros()) as u8
    }

    pub fn eval(&self, s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
        let (step, next) = self.get(&s.key(), mem.bits).ok_or_else(|| undefined(s, mem))?;
        Ok((step, MemState::new(next, self.memory_bits())?))
    }

    pub fn parse(text: &str) -> Result<Self, PolicyError> {
        let mut table = TablePolicy::new(1, 1);
        let mut declared_states = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |reason: String| PolicyError::TableSyntax {
                line: line_no,
                reason,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('@') {
                let (name, value) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("directive needs a value".into()))?;
                let value: u32 = value
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad directive value {value:?}")))?;
                match name {
                    "states" if value >= 1 => declared_states = Some(value),
                    "range" if value >= 1 => table.range = value,
                    _ => return Err(err(format!("unknown directive @{name} {value}"))),
                }
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| err("missing '->'".into()))?;
            let (key, mem) = lhs
                .split_once(';')
                .ok_or_else(|| err("missing ';' before memory".into()))?;
            let (action, next) = rhs
                .split_once(';')
                .ok_or_else(|| err("missing ';' before next memory".into()))?;
            let key: SenseKey = key.trim().parse().map_err(|e| err(format!("{e}")))?;
            let mem: u32 = mem
                .trim()
                .parse()
                .map_err(|_| err(format!("bad memory {:?}", mem.trim())))?;
            let next: u32 = next
                .trim()
                .parse()
                .map_err(|_| err(format!("bad memory {:?}", next.trim())))?;
            let step = parse_action(action.trim()).map_err(err)?;
            if table.entries.contains_key(&(key.clone(), mem)) {
                return Err(err(format!("duplicate entry for {key} ; {mem}")));
            }
            if let Some(&(l, r)) = key.0.iter().find(|&&(l, r)| l > table.range || r > table.range) {
                return Err(err(format!("distance pair {l},{r} exceeds @range {}", table.range)));
            }
            table.insert(key, mem, step, next);
        }
        if let Some(n) = declared_states {
            if table.states > n {
                return Err(PolicyError::TableSyntax {
                    line: 0,
                    reason: format!("entries use {} states but @states is {n}", table.states),
                });
            }
            table.states = n;
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("@states {}\n@range {}\n", self.states, self.range);
        for ((key, mem), (step, next)) in &self.entries {
            out.push_str(&format!("{key} ; {mem} -> {} ; {next}\n", format_action(*step)));
        }
        out
    }
}

fn parse_action(s: &str) -> Result<Step, String> {
    let mut parts = s.split_whitespace();
    let (Some(axis), Some(sign), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("expected 'axis sign', got {s:?}"));
    };
    if (axis, sign) == ("0", "0") {
        return Ok(Step::Zero);
    }
    let axis: usize = axis
        .parse()
        .ok()
        .filter(|&a| a >= 1)
        .ok_or_else(|| format!("bad axis {axis:?}"))?;
    let sign = match sign {
        "+" | "+1" => Sign::Plus,
        "-" | "-1" => Sign::Minus,
        other => return Err(format!("bad sign {other:?}")),
    };
    Ok(Step::Move { axis, sign })
}

fn format_action(step: Step) -> String {
    match step {
        Step::Zero => "0 0".into(),
        Step::Move { axis, sign } => format!("{axis} {}", if sign == Sign::Plus { '+' } else { '-' }),
    }
}

impl FromStr for TablePolicy {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TablePolicy::parse(s)
    }
}

pub fn table_policy_eval(
    table: &TablePolicy,
    s: &SenseData,
    mem: MemState,
) -> Result<(Step, MemState), PolicyError> {
    table.eval(s, mem)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PolicyKind {
    MemorylessV1,
    MemorylessVgt1,
    MakeMove1D,
    MakeMove2D,
    MakeMove3D,
    MakeMoveRecursive,
    MakeMoveNoninductive,
    Table,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::MemorylessV1 => "memoryless-v1",
            PolicyKind::MemorylessVgt1 => "memoryless-vgt1",
            PolicyKind::MakeMove1D => "makemove1d",
            PolicyKind::MakeMove2D => "makemove2d",
            PolicyKind::MakeMove3D => "makemove3d",
            PolicyKind::MakeMoveRecursive => "makemove",
            PolicyKind::MakeMoveNoninductive => "makemove-noninductive",
            PolicyKind::Table => "table",
        })
    }
}

/// A constructed policy ready to be simulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    MemorylessV1 { dims: GridDims },
    MemorylessVgt1 { dims: GridDims, range: u32 },
    MakeMove1D,
    MakeMove2D,
    MakeMove3D,
    MakeMoveRecursive,
    MakeMoveNoninductive,
    Table(TablePolicy),
}

impl Policy {
    pub fn memoryless_v1(dims: GridDims) -> Policy {
        Policy::MemorylessV1 { dims }
    }

    pub fn memoryless_vgt1(dims: GridDims, range: u32) -> Result<Policy, PolicyError> {
        if range < 2 {
            return Err(PolicyError::Incompatible {
                policy: "memoryless V>=2",
                requirement: format!("sensing range V >= 2 (got V={range})"),
            });
        }
        Ok(Policy::MemorylessVgt1 { dims, range })
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::MemorylessV1 { .. } => PolicyKind::MemorylessV1,
            Policy::MemorylessVgt1 { .. } => PolicyKind::MemorylessVgt1,
            Policy::MakeMove1D => PolicyKind::MakeMove1D,
            Policy::MakeMove2D => PolicyKind::MakeMove2D,
            Policy::MakeMove3D => PolicyKind::MakeMove3D,
            Policy::MakeMoveRecursive => PolicyKind::MakeMoveRecursive,
            Policy::MakeMoveNoninductive => PolicyKind::MakeMoveNoninductive,
            Policy::Table(_) => PolicyKind::Table,
        }
    }

    pub fn range(&self) -> u32 {
        match self {
            Policy::MemorylessVgt1 { range, .. } => *range,
            Policy::Table(t) => t.range(),
            _ => 1,
        }
    }

    pub fn memory_bits(&self) -> u8 {
        match self {
            Policy::MemorylessV1 { .. } | Policy::MemorylessVgt1 { .. } => 0,
            Policy::Table(t) => t.memory_bits(),
            _ => 1,
        }
    }

    /// Number of distinct memory values the policy can hold.
    pub fn memory_states(&self) -> u32 {
        match self {
            Policy::Table(t) => t.states(),
            _ => 1 << self.memory_bits(),
        }
    }

    pub fn initial_memory(&self, bits: u32) -> Result<MemState, PolicyError> {
        if bits >= self.memory_states() {
            return Err(PolicyError::MemoryOverflow {
                bits,
                width: self.memory_bits(),
            });
        }
        MemState::new(bits, self.memory_bits())
    }

    pub fn decide(&self, s: &SenseData, mem: MemState) -> Result<(Step, MemState), PolicyError> {
        match self {
            Policy::MemorylessV1 { dims } => Ok((memoryless_v1(dims, s)?, mem)),
            Policy::MemorylessVgt1 { dims, .. } => Ok((memoryless_vgt1(dims, s)?, mem)),
            Policy::MakeMove1D => make_move_1d(s, mem),
            Policy::MakeMove2D => make_move_2d(s, mem),
            Policy::MakeMove3D => make_move_3d(s, mem),
            Policy::MakeMoveRecursive => make_move_all(s, mem),
            Policy::MakeMoveNoninductive => make_move_noninductive(s, mem),
            Policy::Table(t) => t.eval(s, mem).map(|(st, m)| (st, mem.with_bits(m.bits))),
        }
    }
}
