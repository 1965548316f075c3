//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p gridpatrol --test acceptance`; set `GRIDPATROL_UPDATE_GOLDEN=1`
//! to rewrite the diagram golden files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use gridpatrol::env::{full_visibility_hamiltonian, DirSeqPatroller, Environment, Phase};
use gridpatrol::feasibility::{hamiltonian_search, hamiltonicity_parity};
use gridpatrol::grid::{boundary_distances, sensing_regions};
use gridpatrol::policy::{make_move_all, make_move_noninductive};
use gridpatrol::sim::{induced_cycle_check, run};
use gridpatrol::{
    brute_force_0bit_search, theorem1_check, verify_patrols, AgentState, Arena, ArrowMap, GridDims, MemState,
    Policy, Position, SearchCaps, Target, Verdict,
};

type Outcome = Result<String, String>;

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Every dims vector of length `d` with entries drawn from `lens`.
fn grids(d: usize, lens: &[usize]) -> Vec<GridDims> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                lens.iter().map(move |&n| {
                    let mut w = v.clone();
                    w.push(n);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(|v| GridDims::new(v).unwrap()).collect()
}

/// Every dims vector with entries at least 2 and at most `max_vertices` vertices.
fn small_grids(max_vertices: usize) -> Vec<GridDims> {
    fn rec(prefix: &mut Vec<usize>, product: usize, max: usize, out: &mut Vec<GridDims>) {
        if !prefix.is_empty() {
            out.push(GridDims::new(prefix.clone()).unwrap());
        }
        let mut n = 2;
        while product * n <= max {
            prefix.push(n);
            rec(prefix, product * n, max, out);
            prefix.pop();
            n += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, max_vertices, &mut out);
    out
}

fn one_bit_cover_bound() -> Outcome {
    let mut count = 0;
    for d in 1..=4 {
        for dims in grids(d, &[2, 3, 4]) {
            let budget = 2 * dims.vertex_count();
            let r = verify_patrols(&dims, &Policy::MakeMoveRecursive, &Target::All, budget, jobs())
                .map_err(|e| format!("{dims}: {e}"))?;
            if r.verdict != Verdict::Pass {
                return Err(format!("{dims}: {} ({:?})", r.verdict, r.failures.first()));
            }
            count += 1;
        }
    }
    Ok(format!("{count} grids covered within 2|D| from every (vertex, mem)"))
}

/// Checks that the memoryless policy traces a Hamiltonian cycle of length
/// |D| from every start.
fn hamiltonian_orbits(dims: &GridDims, policy: &Policy) -> Result<(), String> {
    let n = dims.vertex_count();
    for p in dims.positions() {
        let tr = run(dims, policy, AgentState::new(p.clone(), MemState::EMPTY), n + 1, &Target::All)
            .map_err(|e| format!("{dims} from {p}: {e}"))?;
        let c = induced_cycle_check(&tr, dims).map_err(|e| format!("{dims} from {p}: {e}"))?;
        if !c.is_hamiltonian_cycle || c.length != n || tr.cycle_start != Some(0) {
            return Err(format!("{dims} from {p}: orbit length {} is not a Hamiltonian cycle", c.length));
        }
    }
    Ok(())
}

fn constructive_half() -> Outcome {
    let mut cases: Vec<(GridDims, Policy, u32)> = ["2", "2,2", "2,3", "5,3,3,2", "2,2,2,2"]
        .iter()
        .map(|s| {
            let dims: GridDims = s.parse().unwrap();
            (dims.clone(), Policy::memoryless_v1(dims), 1)
        })
        .collect();
    let big: GridDims = "7,5,5,2".parse().unwrap();
    cases.push((big.clone(), Policy::memoryless_vgt1(big, 2).unwrap(), 2));
    let mut lengths = Vec::new();
    for (dims, policy, v) in &cases {
        if !theorem1_check(dims.as_slice(), *v).patrollable_0bit {
            return Err(format!("{dims} V={v} should pass the feasibility check"));
        }
        let n = dims.vertex_count();
        let r = verify_patrols(dims, policy, &Target::All, n, jobs()).map_err(|e| e.to_string())?;
        if r.verdict != Verdict::Pass {
            return Err(format!("{dims} V={v}: {}", r.verdict));
        }
        let tr = run(dims, policy, AgentState::new(Position::ones(dims.dim()), MemState::EMPTY), n + 1, &Target::All)
            .map_err(|e| e.to_string())?;
        if tr.cycle_len != Some(n) {
            return Err(format!("{dims}: orbit length {:?}, expected {n}", tr.cycle_len));
        }
        lengths.push(format!("{dims}:{n}"));
    }
    Ok(format!("orbit lengths {}", lengths.join(" ")))
}

fn impossibility_half(found: &mut Vec<(GridDims, Policy)>) -> Outcome {
    let mut instances = grids(2, &[2, 3, 4, 5]);
    instances.extend(grids(3, &[2, 3]));
    let mut yes = 0;
    for dims in &instances {
        let predicted = theorem1_check(dims.as_slice(), 1).patrollable_0bit;
        let result = brute_force_0bit_search(dims, 1, SearchCaps::default(), jobs()).map_err(|e| format!("{dims}: {e}"))?;
        if result.is_some() != predicted {
            return Err(format!("{dims}: search found={} but check says {predicted}", result.is_some()));
        }
        if let Some(t) = result {
            yes += 1;
            found.push((dims.clone(), Policy::Table(t)));
        }
    }
    Ok(format!("{} grids agree ({yes} patrollable)", instances.len()))
}

fn memoryless_orbits_are_hamiltonian(found: &[(GridDims, Policy)]) -> Outcome {
    let mut policies: Vec<(GridDims, Policy)> = found.to_vec();
    for s in ["2", "2,2", "2,3", "5,3,3,2", "2,2,2,2"] {
        let dims: GridDims = s.parse().unwrap();
        policies.push((dims.clone(), Policy::memoryless_v1(dims)));
    }
    let big: GridDims = "7,5,5,2".parse().unwrap();
    policies.push((big.clone(), Policy::memoryless_vgt1(big, 2).unwrap()));
    for (dims, policy) in &policies {
        hamiltonian_orbits(dims, policy)?;
    }
    Ok(format!("{} memoryless policies trace Hamiltonian cycles from every start", policies.len()))
}

fn is_cycle_in(arena: &dyn Arena, cycle: &[Position]) -> bool {
    let distinct: BTreeSet<&Position> = cycle.iter().collect();
    let closed = cycle.len() <= 2 || (0..cycle.len()).all(|i| cycle[i].manhattan(&cycle[(i + 1) % cycle.len()]) == 1);
    distinct.len() == arena.vertex_count() && cycle.iter().all(|p| arena.contains(p)) && closed
}

fn hamiltonian_oracle() -> Outcome {
    let all = small_grids(24);
    let mut found = 0;
    for dims in &all {
        let cycle = hamiltonian_search(dims, 24).map_err(|e| format!("{dims}: {e}"))?;
        let parity = hamiltonicity_parity(dims);
        if cycle.is_some() && !parity {
            return Err(format!("{dims}: cycle found despite odd vertex count"));
        }
        // Grid graphs are Hamiltonian exactly when they have an even number
        // of vertices and are not a path longer than one edge.
        let expected = dims.vertex_count() % 2 == 0 && (dims.dim() > 1 || dims.vertex_count() == 2);
        if cycle.is_some() != expected {
            return Err(format!("{dims}: search found={}, expected {expected}", cycle.is_some()));
        }
        if let Some(c) = cycle {
            if !is_cycle_in(dims, &c) {
                return Err(format!("{dims}: returned walk is not a Hamiltonian cycle"));
            }
            found += 1;
        }
    }
    for (s, want) in [("3,3", false), ("2,3", true), ("2,2,2", true)] {
        let dims: GridDims = s.parse().unwrap();
        if hamiltonian_search(&dims, 24).unwrap().is_some() != want {
            return Err(format!("{s}: expected found={want}"));
        }
    }
    Ok(format!("{} grids up to 24 vertices, {found} Hamiltonian", all.len()))
}

fn noninductive_equivalence() -> Outcome {
    let mut checked = 0usize;
    for d in 1..=5 {
        for dims in grids(d, &[2, 3, 4]) {
            let mut keys = BTreeSet::new();
            for p in dims.positions() {
                let s = boundary_distances(&dims, &p, 1).unwrap();
                if !keys.insert(s.key()) {
                    continue;
                }
                for m in 0..2 {
                    let mem = MemState::bit(m);
                    let a = make_move_all(&s, mem);
                    let b = make_move_noninductive(&s, mem);
                    if a != b {
                        return Err(format!("{dims} at {p} mem {m}: {a:?} vs {b:?}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (sensing, mem) states agree"))
}

fn region_isomorphism() -> Outcome {
    let mut count = 0;
    for d in 1..=3 {
        for dims in grids(d, &(2..=9).collect::<Vec<_>>()) {
            for v in 1..=3u32 {
                let g = sensing_regions(&dims, v).map_err(|e| e.to_string())?;
                g.verify_isomorphism().map_err(|e| format!("{dims} V={v}: {e}"))?;
                let expect: Vec<usize> = dims.as_slice().iter().map(|&n| n.min(2 * v as usize + 1)).collect();
                if g.iso_dims.as_slice() != expect {
                    return Err(format!("{dims} V={v}: iso dims {}", g.iso_dims));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} (grid, V) pairs"))
}

fn dirseq_memory() -> Outcome {
    let shapes = [
        ("2x2 grid", Environment::generate("grid:2,2").unwrap()),
        ("1x3 path", Environment::parse("1,1\n1,2\n1,3\n").unwrap()),
        ("L-shape", Environment::generate("l-shape").unwrap()),
    ];
    let mut notes = Vec::new();
    for (name, env) in &shapes {
        let pat = DirSeqPatroller::new(env);
        let budget = pat.sweep_steps();
        let r = verify_patrols(env, &pat, &Target::All, budget, jobs()).map_err(|e| e.to_string())?;
        if r.verdict != Verdict::Pass {
            return Err(format!("{name}: {}", r.verdict));
        }
        let bound_bits = pat.state_bits() + 2;
        let mut worst = 0;
        for start in env.vertices() {
            let tr = run(env, &pat, AgentState::new(start.clone(), pat.initial_state()), budget, &Target::All)
                .map_err(|e| e.to_string())?;
            worst = worst.max(tr.distinct_memories);
            if let Some(s) = tr.states.iter().find(|s| s.mem.phase == Phase::Forward(0) && &s.position != start) {
                return Err(format!("{name}: sequence began away from the anchor at {}", s.position));
            }
        }
        if worst as u64 > 1u64 << bound_bits {
            return Err(format!("{name}: {worst} memory states exceed 2^{bound_bits}"));
        }
        notes.push(format!("{name} {worst}<=2^{bound_bits}"));
    }
    Ok(notes.join(", "))
}

fn full_visibility() -> Outcome {
    let fixtures: Vec<(&str, Environment)> = vec![
        ("holed 5x5", Environment::generate("grid-with-hole").unwrap()),
        ("2x3", Environment::generate("grid:2,3").unwrap()),
        ("1x3 path", Environment::parse("1,1\n1,2\n1,3\n").unwrap()),
        ("L-shape", Environment::generate("l-shape").unwrap()),
        ("2x2", Environment::generate("grid:2,2").unwrap()),
        ("3x3", Environment::generate("grid:3,3").unwrap()),
        ("plus", Environment::parse("2,1\n1,2\n2,2\n3,2\n2,3\n").unwrap()),
        ("U-shape", Environment::parse("1,1\n2,1\n3,1\n1,2\n3,2\n1,3\n3,3\n").unwrap()),
        ("3x4 ring", Environment::parse("1,1\n2,1\n3,1\n1,2\n3,2\n1,3\n3,3\n1,4\n2,4\n3,4\n").unwrap()),
        ("2x2x2", Environment::generate("grid:2,2,2").unwrap()),
    ];
    let expected = [("holed 5x5", true), ("2x3", true), ("1x3 path", false)];
    let mut results = BTreeMap::new();
    for (name, env) in &fixtures {
        let policy = full_visibility_hamiltonian(env, 24).map_err(|e| e.to_string())?;
        let cycle = hamiltonian_search(env, 24).map_err(|e| e.to_string())?;
        if policy.is_some() != cycle.is_some() {
            return Err(format!("{name}: policy and Hamiltonian search disagree"));
        }
        if let Some(p) = &policy {
            let r = verify_patrols(env, p, &Target::All, env.vertex_count(), 1).map_err(|e| e.to_string())?;
            if r.verdict != Verdict::Pass {
                return Err(format!("{name}: full-visibility policy {}", r.verdict));
            }
        }
        results.insert(*name, policy.is_some());
    }
    for (name, want) in expected {
        if results[name] != want {
            return Err(format!("{name}: expected policy={want}"));
        }
    }
    let yes = results.values().filter(|&&b| b).count();
    Ok(format!("{} fixtures agree, {yes} with a policy", fixtures.len()))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Parses the DOT arrows back and checks the diagram is a function on
/// configurations, with one arrow out of every recurrent configuration.
fn check_dot(dot: &str, configs: usize) -> Result<(), String> {
    let mut out: BTreeMap<&str, usize> = BTreeMap::new();
    let mut solid_sources = BTreeSet::new();
    let mut stuck = 0;
    for line in dot.lines().map(str::trim) {
        if let Some((lhs, rest)) = line.split_once(" -> ") {
            *out.entry(lhs).or_default() += 1;
            if rest.contains("style=solid") {
                solid_sources.insert(lhs);
            }
        } else if line.contains("style=dotted") {
            stuck += 1;
        }
    }
    if let Some((node, n)) = out.iter().find(|(_, &n)| n != 1) {
        return Err(format!("{node} has {n} outgoing arrows"));
    }
    if solid_sources.iter().any(|s| out.get(s) != Some(&1)) {
        return Err("a recurrent configuration lacks exactly one arrow".into());
    }
    if out.len() + stuck != configs {
        return Err(format!("{} arrows and {stuck} stuck for {configs} configurations", out.len()));
    }
    Ok(())
}

fn figures() -> Outcome {
    let update = std::env::var_os("GRIDPATROL_UPDATE_GOLDEN").is_some();
    let cases: Vec<(&str, GridDims, Policy)> = {
        let a: GridDims = "5,3,3,2".parse().unwrap();
        let b: GridDims = "7,5,5,2".parse().unwrap();
        vec![
            ("memoryless-5x3x3x2", a.clone(), Policy::memoryless_v1(a)),
            ("memoryless-7x5x5x2-v2", b.clone(), Policy::memoryless_vgt1(b, 2).unwrap()),
            ("makemove-5x3", "5,3".parse().unwrap(), Policy::MakeMoveRecursive),
            ("makemove-4x3x3", "4,3,3".parse().unwrap(), Policy::MakeMoveRecursive),
        ]
    };
    let dir = golden_dir();
    let mut compared = 0;
    for (name, dims, policy) in &cases {
        let map = ArrowMap::build(dims, policy);
        if !map.stuck.is_empty() {
            return Err(format!("{name}: {} configurations without a move", map.stuck.len()));
        }
        let dot = map.to_dot();
        check_dot(&dot, dims.vertex_count() * policy.memory_states() as usize).map_err(|e| format!("{name}: {e}"))?;
        for (ext, body) in [("dot", dot), ("svg", map.to_svg())] {
            let path = dir.join(format!("{name}.{ext}"));
            if update {
                std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                std::fs::write(&path, &body).map_err(|e| e.to_string())?;
            }
            let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            if golden != body {
                return Err(format!("{} differs from the generated diagram", path.display()));
            }
            compared += 1;
        }
    }
    Ok(format!("{} diagrams functional, {compared} golden files match", cases.len()))
}

fn main() -> ExitCode {
    let mut found = Vec::new();
    let mut criteria: Vec<(&str, Box<dyn FnMut() -> Outcome + '_>)> = Vec::new();
    criteria.push(("1 cover bound 2|D| for the 1-bit policy", Box::new(one_bit_cover_bound)));
    criteria.push(("2 memoryless witnesses patrol feasible grids", Box::new(constructive_half)));
    criteria.push(("3 exhaustive search matches the feasibility check", Box::new(|| impossibility_half(&mut found))));
    let mut failed = 0;
    let mut report = |label: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS  {label}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {label}: {msg} [{secs:.1}s]");
            }
        }
    };
    for (label, f) in criteria.iter_mut() {
        report(label, f.as_mut());
    }
    drop(criteria);
    report("4 memoryless patrols are Hamiltonian cycles", &mut || memoryless_orbits_are_hamiltonian(&found));
    report("5 Hamiltonian search respects the parity bound", &mut hamiltonian_oracle);
    report("6 non-inductive 1-bit policy equals the recursive one", &mut noninductive_equivalence);
    report("7 sensing regions form the predicted grid", &mut region_isomorphism);
    report("8 direction-sequence sweep covers within its memory bound", &mut dirseq_memory);
    report("9 full visibility patrols exactly the Hamiltonian shapes", &mut full_visibility);
    report("10 arrow diagrams are functional and match golden files", &mut figures);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
