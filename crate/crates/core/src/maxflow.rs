//! Shortest-augmenting-path maximum flow on exact rationals.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};

use crate::model::Rational;

/// Dense capacity matrix; fine for the few dozen nodes used here.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    size: usize,
    capacity: Vec<Rational>,
    flow: Vec<Rational>,
}

impl FlowGraph {
    pub fn new(size: usize) -> Self {
        FlowGraph {
            size,
            capacity: vec![Rational::zero(); size * size],
            flow: vec![Rational::zero(); size * size],
        }
    }

    pub fn add_capacity(&mut self, from: usize, to: usize, cap: Rational) {
        self.capacity[from * self.size + to] += cap;
    }

    /// Net flow on `from -> to`.
    pub fn flow(&self, from: usize, to: usize) -> &Rational {
        &self.flow[from * self.size + to]
    }

    fn residual(&self, from: usize, to: usize) -> Rational {
        let k = from * self.size + to;
        &self.capacity[k] - &self.flow[k]
    }

    /// Augments from `source` to `sink` until no path is left; returns the
    /// flow value.
    pub fn run(&mut self, source: usize, sink: usize) -> Rational {
        let mut total = Rational::zero();
        while let Some(parent) = self.bfs(source, sink) {
            let mut bottleneck: Option<Rational> = None;
            let mut v = sink;
            while v != source {
                let u = parent[v];
                let r = self.residual(u, v);
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= r => b,
                    _ => r,
                });
                v = u;
            }
            let push = bottleneck.expect("path has an edge");
            let mut v = sink;
            while v != source {
                let u = parent[v];
                self.flow[u * self.size + v] += &push;
                self.flow[v * self.size + u] -= &push;
                v = u;
            }
            total += push;
        }
        total
    }

    fn bfs(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.size];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..self.size {
                if parent[v] == usize::MAX && self.residual(u, v).is_positive() {
                    parent[v] = u;
                    if v == sink {
                        return Some(parent);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }
}
