//! Patrolling grid graphs with agents that see only a bounded neighbourhood
//! and carry a few bits of memory.

pub mod arena;
pub mod env;
pub mod error;
pub mod feasibility;
pub mod grid;
pub mod policy;
pub mod sim;
pub mod viz;

pub use arena::{Arena, OffsetSet, Percept, Sensing};
pub use env::{DirSeqPatroller, Environment};
pub use error::{EnvError, GridError, PolicyError, SearchError, SimError};
pub use feasibility::{brute_force_0bit_search, theorem1_check, SearchCaps};
pub use grid::{FloorSpec, GridDims, Position, SenseData, SenseKey, Sign, Step};
pub use policy::{MemState, Policy, PolicyKind, TablePolicy};
pub use sim::{verify_patrols, AgentState, Controller, PatrolReport, Target, Trace, Verdict};
pub use viz::ArrowMap;
