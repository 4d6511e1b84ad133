//! Directed multigraphs with strongly connected components and simple
//! cycle enumeration. Parallel edges and loops are allowed.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

/// Largest graph for which simple cycles are enumerated.
pub const ENUMERATION_MAX_VERTICES: usize = 12;
pub const ENUMERATION_MAX_CYCLES: usize = 10_000;
const ENUMERATION_MAX_STEPS: usize = 5_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multigraph {
    pub vertex_count: usize,
    /// `(source, target)` pairs; the index of an edge is its identity.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SccSummary {
    pub vertices: Vec<usize>,
    pub internal_edges: usize,
}

impl SccSummary {
    /// The component carries at least one cycle.
    pub fn is_cyclic(&self) -> bool {
        self.internal_edges > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCensus {
    pub sccs: Vec<SccSummary>,
    /// Simple cycles as edge index lists, each starting at its smallest
    /// vertex. `None` when the graph is too large or the cap was hit.
    pub cycles: Option<Vec<Vec<usize>>>,
    pub shared_vertex: Option<usize>,
}

impl CycleCensus {
    /// Number of nontrivial components; equals the number of simple cycles
    /// when no vertex is shared.
    pub fn cyclic_components(&self) -> usize {
        self.sccs.iter().filter(|s| s.is_cyclic()).count()
    }
}

impl Multigraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.iter().all(|&(s, t)| s < vertex_count && t < vertex_count));
        Multigraph { vertex_count, edges }
    }

    /// Components sorted internally and by smallest vertex.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(self.vertex_count, self.edges.len());
        let nodes: Vec<_> = (0..self.vertex_count).map(|_| g.add_node(())).collect();
        for &(s, t) in &self.edges {
            g.add_edge(nodes[s], nodes[t], ());
        }
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn census(&self) -> CycleCensus {
        let comps = self.sccs();
        let mut comp_of = vec![0; self.vertex_count];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut internal = vec![0usize; comps.len()];
        let mut out_deg = vec![0usize; self.vertex_count];
        let mut in_deg = vec![0usize; self.vertex_count];
        for &(s, t) in &self.edges {
            if comp_of[s] == comp_of[t] {
                internal[comp_of[s]] += 1;
                out_deg[s] += 1;
                in_deg[t] += 1;
            }
        }
        let shared_vertex = (0..self.vertex_count).find(|&v| {
            let c = comp_of[v];
            internal[c] > comps[c].len() && (out_deg[v] >= 2 || in_deg[v] >= 2)
        });
        let sccs = comps
            .into_iter()
            .zip(internal)
            .map(|(vertices, internal_edges)| SccSummary {
                vertices,
                internal_edges,
            })
            .collect();
        let cycles = if self.vertex_count <= ENUMERATION_MAX_VERTICES {
            self.simple_cycles(ENUMERATION_MAX_CYCLES)
        } else {
            None
        };
        CycleCensus {
            sccs,
            cycles,
            shared_vertex,
        }
    }

    /// All simple cycles, or `None` beyond `cap` cycles. A cycle is listed
    /// once, rooted at its smallest vertex.
    pub fn simple_cycles(&self, cap: usize) -> Option<Vec<Vec<usize>>> {
        let mut out_edges = vec![Vec::new(); self.vertex_count];
        for (e, &(s, _)) in self.edges.iter().enumerate() {
            out_edges[s].push(e);
        }
        let mut cycles = Vec::new();
        let mut steps = 0usize;
        let mut on_path = vec![false; self.vertex_count];
        let mut path: Vec<usize> = Vec::new();
        for root in 0..self.vertex_count {
            // explicit stack of (vertex, next out-edge position)
            let mut stack = vec![(root, 0usize)];
            on_path[root] = true;
            while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
                steps += 1;
                if steps > ENUMERATION_MAX_STEPS {
                    return None;
                }
                if *pos == out_edges[v].len() {
                    on_path[v] = false;
                    stack.pop();
                    path.pop();
                    continue;
                }
                let e = out_edges[v][*pos];
                *pos += 1;
                let w = self.edges[e].1;
                if w == root {
                    let mut c = path.clone();
                    c.push(e);
                    cycles.push(c);
                    if cycles.len() > cap {
                        return None;
                    }
                } else if w > root && !on_path[w] {
                    on_path[w] = true;
                    path.push(e);
                    stack.push((w, 0));
                }
            }
        }
        Some(cycles)
    }
}
