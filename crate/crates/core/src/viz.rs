//! Arrow diagrams of a policy: for every (vertex, mem) configuration, the
//! step taken and the memory written.

use std::fmt::Write;

use serde::Serialize;

use crate::arena::{Percept, Sensing};
use crate::grid::{GridDims, Position, Sign, Step};
use crate::policy::Policy;
use crate::sim::Controller;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub from: Position,
    pub mem: u32,
    pub step: Step,
    pub to: Position,
    pub next_mem: u32,
    /// The configuration is revisited forever once reached.
    pub recurrent: bool,
}

/// A configuration the policy cannot act from, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stuck {
    pub at: Position,
    pub mem: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrowMap {
    pub dims: Vec<usize>,
    pub states: u32,
    pub arrows: Vec<Arrow>,
    pub stuck: Vec<Stuck>,
}

impl ArrowMap {
    pub fn build(dims: &GridDims, policy: &Policy) -> Self {
        let k = policy.memory_states() as usize;
        let n = dims.vertex_count();
        let sensing = Sensing::Boundary(policy.range());
        let mut next: Vec<Option<usize>> = vec![None; n * k];
        let mut raw = Vec::new();
        let mut stuck = Vec::new();
        for (v, p) in dims.positions().enumerate() {
            let percept = Percept::sense(dims, &p, sensing);
            for m in 0..k {
                let mem = policy.initial_memory(m as u32).expect("within declared states");
                let outcome = Controller::decide(policy, &percept, &mem)
                    .map_err(|e| e.to_string())
                    .and_then(|(step, m2)| {
                        let to = p
                            .stepped(step)
                            .filter(|q| dims.contains(q) && !step.is_zero())
                            .ok_or_else(|| format!("step {step} leaves the grid"))?;
                        Ok((step, to, m2.bits()))
                    });
                match outcome {
                    Ok((step, to, m2)) => {
                        next[v * k + m] = Some(dims.index_of(&to).expect("checked") * k + m2 as usize);
                        raw.push((v * k + m, Arrow {
                            from: p.clone(),
                            mem: m as u32,
                            step,
                            to,
                            next_mem: m2,
                            recurrent: false,
                        }));
                    }
                    Err(reason) => stuck.push(Stuck {
                        at: p.clone(),
                        mem: m as u32,
                        reason,
                    }),
                }
            }
        }
        let recurrent = on_cycles(&next);
        let arrows = raw
            .into_iter()
            .map(|(i, mut a)| {
                a.recurrent = recurrent[i];
                a
            })
            .collect();
        Self {
            dims: dims.as_slice().to_vec(),
            states: k as u32,
            arrows,
            stuck,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph arrows {\n  node [shape=box, fontsize=10];\n");
        for a in &self.arrows {
            let style = if a.recurrent { "solid" } else { "dashed" };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", color=\"{}\", style={style}];",
                config_name(&a.from, a.mem),
                config_name(&a.to, a.next_mem),
                a.step,
                color(a.mem),
            );
        }
        for s in &self.stuck {
            let _ = writeln!(
                out,
                "  \"{}\" [color=black, style=dotted, tooltip=\"{}\"];",
                config_name(&s.at, s.mem),
                s.reason.replace('"', "'")
            );
        }
        out.push_str("}\n");
        out
    }

    /// One panel per setting of the axes beyond the second; within a panel
    /// axis 1 runs right and axis 2 runs up. Moves along higher axes are drawn
    /// as diagonal stubs labelled with the axis.
    pub fn to_svg(&self) -> String {
        const CELL: f64 = 40.0;
        const GAP: f64 = 30.0;
        let dims = GridDims::new(self.dims.clone()).expect("built from valid dims");
        let w = self.dims[0];
        let h = self.dims.get(1).copied().unwrap_or(1);
        let upper: Vec<usize> = self.dims.iter().skip(2).copied().collect();
        let panels: usize = upper.iter().product();
        let panel_w = w as f64 * CELL;
        let panel_h = h as f64 * CELL;
        let cols = panels.min(6);
        let rows = panels.div_ceil(cols);
        let width = cols as f64 * (panel_w + GAP) + GAP;
        let height = rows as f64 * (panel_h + GAP + 14.0) + GAP;
        let panel_index = |p: &Position| -> usize {
            let mut idx = 0;
            for (i, &n) in upper.iter().enumerate().rev() {
                idx = idx * n + (p.get(i + 3) - 1) as usize;
            }
            idx
        };
        let origin = |panel: usize| -> (f64, f64) {
            let (c, r) = (panel % cols, panel / cols);
            (
                GAP + c as f64 * (panel_w + GAP),
                GAP + 14.0 + r as f64 * (panel_h + GAP + 14.0),
            )
        };
        let centre = |p: &Position| -> (f64, f64) {
            let (ox, oy) = origin(panel_index(p));
            let x = p.get(1) as f64;
            let y = if self.dims.len() > 1 { p.get(2) as f64 } else { 1.0 };
            (ox + (x - 0.5) * CELL, oy + (h as f64 - y + 0.5) * CELL)
        };

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"monospace\" font-size=\"10\">"
        );
        out.push_str("  <defs>\n");
        for m in 0..self.states {
            let _ = writeln!(
                out,
                "    <marker id=\"head{m}\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"{}\"/></marker>",
                color(m)
            );
        }
        out.push_str("  </defs>\n");
        for panel in 0..panels {
            let (ox, oy) = origin(panel);
            let mut label = Vec::new();
            let mut rest = panel;
            for (i, &n) in upper.iter().enumerate() {
                label.push(format!("x{}={}", i + 3, rest % n + 1));
                rest /= n;
            }
            if !label.is_empty() {
                let _ = writeln!(out, "  <text x=\"{ox:.1}\" y=\"{:.1}\">{}</text>", oy - 4.0, label.join(" "));
            }
        }
        for p in dims.positions() {
            let (cx, cy) = centre(&p);
            let _ = writeln!(
                out,
                "  <circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"3\" fill=\"#888\"><title>{p}</title></circle>"
            );
        }
        for a in &self.arrows {
            let (x0, y0) = centre(&a.from);
            // Separate the arrows of different memory values sideways.
            let shift = (a.mem as f64 - (self.states as f64 - 1.0) / 2.0) * 6.0;
            let (dx, dy) = match a.step {
                Step::Move { axis: 1, sign } => (sign.value() as f64, 0.0),
                Step::Move { axis: 2, sign } => (0.0, -sign.value() as f64),
                Step::Move { sign, .. } => {
                    let s = if sign == Sign::Plus { 1.0 } else { -1.0 };
                    (0.35 * s, -0.35 * s)
                }
                Step::Zero => (0.0, 0.0),
            };
            let (px, py) = (-dy * shift, dx * shift);
            let len = if matches!(a.step, Step::Move { axis, .. } if axis <= 2) {
                0.8
            } else {
                0.9
            };
            let (sx, sy) = (x0 + px + dx * CELL * 0.1, y0 + py + dy * CELL * 0.1);
            let (ex, ey) = (x0 + px + dx * CELL * len, y0 + py + dy * CELL * len);
            let opacity = if a.recurrent { "1" } else { "0.35" };
            let _ = writeln!(
                out,
                "  <line x1=\"{sx:.1}\" y1=\"{sy:.1}\" x2=\"{ex:.1}\" y2=\"{ey:.1}\" stroke=\"{}\" stroke-width=\"2\" stroke-opacity=\"{opacity}\" marker-end=\"url(#head{})\"><title>{} -&gt; {} {}</title></line>",
                color(a.mem),
                a.next_mem,
                config_name(&a.from, a.mem),
                config_name(&a.to, a.next_mem),
                a.step,
            );
            if let Step::Move { axis, .. } = a.step {
                if axis > 2 {
                    let _ = writeln!(
                        out,
                        "  <text x=\"{ex:.1}\" y=\"{ey:.1}\" fill=\"{}\" font-size=\"8\">{}</text>",
                        color(a.mem),
                        a.step
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn config_name(p: &Position, mem: u32) -> String {
    let coords: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
    format!("({}|{mem})", coords.join(","))
}

/// mem 0 red, mem 1 green, then a few more distinguishable colours.
fn color(mem: u32) -> &'static str {
    const PALETTE: [&str; 6] = ["#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"];
    PALETTE[mem as usize % PALETTE.len()]
}

/// Marks the nodes of a functional graph that lie on a cycle.
fn on_cycles(next: &[Option<usize>]) -> Vec<bool> {
    let n = next.len();
    // 0 = unvisited, 1 = on the current walk, 2 = finished
    let mut state = vec![0u8; n];
    let mut cyclic = vec![false; n];
    for s in 0..n {
        let mut walk = Vec::new();
        let mut x = Some(s);
        while let Some(v) = x {
            if state[v] != 0 {
                if state[v] == 1 {
                    let from = walk.iter().position(|&w| w == v).expect("on walk");
                    for &w in &walk[from..] {
                        cyclic[w] = true;
                    }
                }
                break;
            }
            state[v] = 1;
            walk.push(v);
            x = next[v];
        }
        for w in walk {
            state[w] = 2;
        }
    }
    cyclic
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_one_recurrent_cycle() {
        let dims = GridDims::new(vec![2, 2]).unwrap();
        let map = ArrowMap::build(&dims, &Policy::memoryless_v1(dims.clone()));
        assert_eq!(map.arrows.len(), 4);
        assert!(map.arrows.iter().all(|a| a.recurrent));
        assert!(map.stuck.is_empty());
        let dot = map.to_dot();
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("\"(1,1|0)\" -> \"(2,1|0)\""));
    }

    #[test]
    fn one_bit_policy_has_transients() {
        let dims = GridDims::new(vec![3, 3]).unwrap();
        let map = ArrowMap::build(&dims, &Policy::MakeMove2D);
        assert_eq!(map.arrows.len(), 18);
        assert!(map.arrows.iter().any(|a| !a.recurrent));
        let svg = map.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("#d62728") && svg.contains("#2ca02c"));
    }

    #[test]
    fn stuck_configurations_are_reported() {
        let dims = GridDims::new(vec![3, 3]).unwrap();
        let map = ArrowMap::build(&dims, &Policy::Table(crate::policy::TablePolicy::new(2, 1)));
        assert_eq!(map.arrows.len(), 0);
        assert_eq!(map.stuck.len(), 18);
        assert!(map.to_dot().contains("style=dotted"));
    }

    #[test]
    fn cycle_marking() {
        let next = vec![Some(1), Some(2), Some(1), None, Some(0)];
        assert_eq!(on_cycles(&next), vec![false, true, true, false, false]);
    }
}
