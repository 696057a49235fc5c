//! Exact maximum flow over rational capacities.
//!
//! A deliberately small Edmonds–Karp implementation (BFS augmenting paths,
//! residual edges stored pairwise). Capacities and flows are exact rationals,
//! and both edge insertion order and BFS order are deterministic, so equal
//! inputs always produce the identical flow assignment.

use num_traits::Zero;

use crate::rational::Rat;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    /// Remaining residual capacity.
    residual: Rat,
    /// Flow currently assigned (meaningful for forward edges only).
    flow: Rat,
}

#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    edges: Vec<Edge>,
    /// Per node, edge indices in insertion order (forward and reverse alike).
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    /// Adds a directed edge with the given capacity; returns its handle.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: Rat) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, residual: cap, flow: Rat::zero() });
        self.edges.push(Edge { to: from, residual: Rat::zero(), flow: Rat::zero() });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Runs Edmonds–Karp from `source` to `sink`; returns the flow value.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Rat {
        let mut total = Rat::zero();
        loop {
            // BFS for the shortest augmenting path, exploring adjacency in
            // insertion order.
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(source);
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if !edge.residual.is_zero() && !seen[edge.to] {
                        seen[edge.to] = true;
                        pred[edge.to] = Some(e);
                        if edge.to == sink {
                            break 'bfs;
                        }
                        queue.push_back(edge.to);
                    }
                }
            }
            if pred[sink].is_none() {
                return total;
            }
            // Bottleneck along the path.
            let mut bottleneck: Option<Rat> = None;
            let mut v = sink;
            while v != source {
                let e = pred[v].expect("path");
                let r = &self.edges[e].residual;
                bottleneck = Some(match bottleneck {
                    None => r.clone(),
                    Some(b) => b.min(r.clone()),
                });
                v = self.edges[e ^ 1].to;
            }
            let aug = bottleneck.expect("nonempty path");
            // Apply.
            let mut v = sink;
            while v != source {
                let e = pred[v].expect("path");
                self.edges[e].residual -= &aug;
                self.edges[e ^ 1].residual += &aug;
                if e % 2 == 0 {
                    self.edges[e].flow += &aug;
                } else {
                    self.edges[e - 1].flow -= &aug;
                }
                v = self.edges[e ^ 1].to;
            }
            total += aug;
        }
    }

    /// The flow assigned to a forward edge returned by [`Self::add_edge`].
    pub fn flow(&self, edge: usize) -> &Rat {
        &self.edges[edge].flow
    }
}
