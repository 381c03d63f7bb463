use std::fmt::Write as _;

use netred::graph::DiGraph;

use crate::io::fmt_f64;

/// Number of colours in the Graphviz `set312` scheme.
const PALETTE: usize = 12;

/// Renders `g` with 1-based vertex names. `cell_of[v]` selects the fill
/// colour; vertices without a cell are left white.
pub fn render(name: &str, g: &DiGraph, cell_of: &[Option<usize>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {name} {{");
    let _ = writeln!(s, "  node [style=filled, colorscheme=set312];");
    for v in 0..g.vertex_count() {
        match cell_of.get(v).copied().flatten() {
            Some(c) => {
                let _ = writeln!(
                    s,
                    "  {} [fillcolor={}, cell={}];",
                    v + 1,
                    c % PALETTE + 1,
                    c + 1
                );
            }
            None => {
                let _ = writeln!(s, "  {} [fillcolor=\"#ffffff\"];", v + 1);
            }
        }
    }
    let mut edges = g.edges().to_vec();
    edges.sort_by_key(|e| (e.source, e.target));
    for e in edges {
        let _ = writeln!(
            s,
            "  {} -> {} [label=\"{}\"];",
            e.source + 1,
            e.target + 1,
            fmt_f64(e.weight)
        );
    }
    s.push_str("}\n");
    s
}
