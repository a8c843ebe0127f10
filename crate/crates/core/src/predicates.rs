//! Pareto optimality, envy and degeneracy tests.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::graph::ConsumptionGraph;
use crate::model::{consumption_graph, utility_of, Allocation, Instance, Rational};

/// Cycle-count cap used by [`is_degenerate`] unless told otherwise.
pub const DEFAULT_CYCLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path must alternate agent, chore, ..., agent and contain at least one chore")]
    Malformed,
    #[error("agent index {0} out of range")]
    AgentOutOfRange(usize),
    #[error("chore index {0} out of range")]
    ChoreOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("simple-cycle bound (nm)^min(n,m) = {bound} exceeds the cap {cap}")]
pub struct CycleCapExceeded {
    pub bound: BigUint,
    pub cap: u64,
}

/// Product of disutility ratios along an alternating path
/// `(i1, j1, i2, ..., jL, i(L+1))`: `prod_k |v[i_k][j_k]| / |v[i_(k+1)][j_k]|`.
pub fn path_product(inst: &Instance, path: &[usize]) -> Result<Rational, PathError> {
    if path.len() < 3 || path.len().is_multiple_of(2) {
        return Err(PathError::Malformed);
    }
    for (k, &x) in path.iter().enumerate() {
        if k % 2 == 0 && x >= inst.n() {
            return Err(PathError::AgentOutOfRange(x));
        }
        if k % 2 == 1 && x >= inst.m() {
            return Err(PathError::ChoreOutOfRange(x));
        }
    }
    let mut product = Rational::one();
    for k in (0..path.len() - 1).step_by(2) {
        let (from, chore, to) = (path[k], path[k + 1], path[k + 2]);
        product *= inst.disutility(from, chore);
        product /= inst.disutility(to, chore);
    }
    Ok(product)
}

/// Detects a trading cycle with product above one.
///
/// Runs a multiplicative Bellman-Ford on the digraph with `i -> j` (weight
/// `|v[i][j]|`) whenever `consumes` links `i` and `j`, and `j -> i'` (weight
/// `1 / |v[i'][j]|`) for every agent.
pub fn has_profitable_cycle(inst: &Instance, consumes: &ConsumptionGraph) -> bool {
    let (n, m) = (inst.n(), inst.m());
    // Agents are nodes 0..n, chores n..n+m.
    let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
    for (i, j) in consumes.edges() {
        edges.push((i, n + j, inst.disutility(i, j)));
    }
    if edges.is_empty() {
        return false;
    }
    for j in 0..m {
        for i in 0..n {
            edges.push((n + j, i, inst.disutility(i, j).recip()));
        }
    }
    let mut best = vec![Rational::one(); n + m];
    for _ in 0..n + m {
        let mut changed = false;
        for (from, to, w) in &edges {
            let candidate = &best[*from] * w;
            if candidate > best[*to] {
                best[*to] = candidate;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
    }
    // Still improving after |V| rounds: a cycle with product > 1 exists.
    true
}

/// No simple trading cycle along consumed edges has product above one.
pub fn is_pareto_optimal(inst: &Instance, z: &Allocation) -> bool {
    !has_profitable_cycle(inst, &consumption_graph(z))
}

/// `u_i(z_i) / beta_i >= u_i(z_i') / beta_i'` for every ordered pair.
pub fn is_weighted_envy_free(inst: &Instance, z: &Allocation, weights: &[Rational]) -> bool {
    let own = utility_of(inst, z);
    (0..inst.n()).all(|i| {
        let mine = &own[i] / &weights[i];
        (0..inst.n()).all(|k| {
            let theirs = crate::model::bundle_utility(inst, i, z.shares()[k].iter());
            mine >= theirs / &weights[k]
        })
    })
}

/// Whether some simple cycle of the complete bipartite graph has product
/// exactly one. Refuses when `(nm)^min(n,m)` exceeds `cap`.
pub fn is_degenerate(inst: &Instance, cap: u64) -> Result<bool, CycleCapExceeded> {
    let (n, m) = (inst.n(), inst.m());
    let bound = BigUint::from(n * m).pow(n.min(m) as u32);
    if bound > BigUint::from(cap) {
        return Err(CycleCapExceeded { bound, cap });
    }
    if n < 2 || m < 2 {
        return Ok(false);
    }
    let mut search = CycleSearch {
        inst,
        used_agents: vec![false; n],
        used_chores: vec![false; m],
    };
    for start in 0..n {
        search.used_agents[start] = true;
        if search.extend(start, start, Rational::one(), 0) {
            return Ok(true);
        }
        search.used_agents[start] = false;
    }
    Ok(false)
}

struct CycleSearch<'a> {
    inst: &'a Instance,
    used_agents: Vec<bool>,
    used_chores: Vec<bool>,
}

impl CycleSearch<'_> {
    /// Walk from `at`; the cycle's lowest agent is `start`.
    fn extend(&mut self, start: usize, at: usize, product: Rational, chores_used: usize) -> bool {
        let (n, m) = (self.inst.n(), self.inst.m());
        for j in 0..m {
            if self.used_chores[j] {
                continue;
            }
            let out = &product * self.inst.disutility(at, j);
            if chores_used >= 1 && (&out / self.inst.disutility(start, j)).is_one() {
                return true;
            }
            self.used_chores[j] = true;
            for next in start + 1..n {
                if self.used_agents[next] {
                    continue;
                }
                self.used_agents[next] = true;
                let p = &out / self.inst.disutility(next, j);
                let found = self.extend(start, next, p, chores_used + 1);
                self.used_agents[next] = false;
                if found {
                    self.used_chores[j] = false;
                    return true;
                }
            }
            self.used_chores[j] = false;
        }
        false
    }
}

/// Every cycle inside `g` has product exactly one. Used to test the
/// unit-cycle property of Pareto-optimal consumption graphs.
pub fn all_cycles_unit(inst: &Instance, g: &ConsumptionGraph) -> bool {
    // A cycle with product != 1 in one direction is > 1 in the other, and
    // both directions stay inside `g`, so this is a profitable-cycle test
    // restricted to `g`'s own edges.
    let (n, m) = (inst.n(), inst.m());
    let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
    for (i, j) in g.edges() {
        edges.push((i, n + j, inst.disutility(i, j)));
        edges.push((n + j, i, inst.disutility(i, j).recip()));
    }
    let mut best = vec![Rational::one(); n + m];
    for _ in 0..n + m {
        let mut changed = false;
        for (from, to, w) in &edges {
            let candidate = &best[*from] * w;
            if candidate > best[*to] {
                best[*to] = candidate;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
    false
}
