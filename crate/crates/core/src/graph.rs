//! Small digraph utilities: strongly connected components and cyclic periods.

use num_integer::Integer;

/// Strongly connected components (iterative Tarjan). Returns the component
/// index of each node; components are numbered in reverse topological order
/// (sinks first).
pub fn scc(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    (comp, ncomp)
}

/// Summary of one strongly connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    /// Internal edges counted with multiplicity.
    pub edges: usize,
    /// gcd of cycle lengths; 0 for a trivial component without a loop.
    pub period: usize,
}

impl Component {
    pub fn is_cyclic(&self) -> bool {
        self.edges > 0
    }

    /// Perron root > 1.
    pub fn has_positive_entropy(&self) -> bool {
        self.edges > self.nodes.len()
    }
}

pub fn components(adj: &[Vec<usize>]) -> (Vec<usize>, Vec<Component>) {
    let (comp, ncomp) = scc(adj);
    let mut comps: Vec<Component> = (0..ncomp).map(|_| Component { nodes: Vec::new(), edges: 0, period: 0 }).collect();
    for (v, &c) in comp.iter().enumerate() {
        comps[c].nodes.push(v);
    }
    for (v, out) in adj.iter().enumerate() {
        for &w in out {
            if comp[w] == comp[v] {
                comps[comp[v]].edges += 1;
            }
        }
    }
    // Period by BFS levels inside each component.
    let mut level = vec![usize::MAX; adj.len()];
    for c in comps.iter_mut() {
        if c.edges == 0 {
            continue;
        }
        let id = comp[c.nodes[0]];
        let mut queue = std::collections::VecDeque::new();
        level[c.nodes[0]] = 0;
        queue.push_back(c.nodes[0]);
        let mut g = 0usize;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if comp[w] != id {
                    continue;
                }
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                } else {
                    let d = (level[v] + 1).abs_diff(level[w]);
                    g = g.gcd(&d);
                }
            }
        }
        c.period = g;
    }
    (comp, comps)
}
