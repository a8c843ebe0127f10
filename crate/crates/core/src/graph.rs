//! Bipartite agent/chore graphs.

use std::fmt;

/// Bipartite adjacency between `n` agents and `m` chores.
///
/// Ordering is lexicographic on the row-major adjacency, which gives a
/// deterministic order for sets of graphs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConsumptionGraph {
    n: usize,
    m: usize,
    adj: Vec<bool>,
}

/// Connected component: agents and chores, both ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub agents: Vec<usize>,
    pub chores: Vec<usize>,
}

/// A simple cycle `agents[0] - chores[0] - agents[1] - ... - chores[L-1] - agents[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub agents: Vec<usize>,
    pub chores: Vec<usize>,
}

impl Cycle {
    /// Agent following chore `k` along the cycle.
    pub fn next_agent(&self, k: usize) -> usize {
        self.agents[(k + 1) % self.agents.len()]
    }

    /// The same cycle walked the other way round, still starting at
    /// `agents[0]`.
    pub fn reversed(&self) -> Cycle {
        let len = self.agents.len();
        let agents = (0..len).map(|k| self.agents[(len - k) % len]).collect();
        let chores = (0..len).map(|k| self.chores[len - 1 - k]).collect();
        Cycle { agents, chores }
    }

    /// Alternating agent/chore path closing back at the first agent.
    pub fn as_path(&self) -> Vec<usize> {
        let mut path = Vec::with_capacity(2 * self.agents.len() + 1);
        for (a, c) in self.agents.iter().zip(&self.chores) {
            path.push(*a);
            path.push(*c);
        }
        path.push(self.agents[0]);
        path
    }
}

impl ConsumptionGraph {
    pub fn empty(n: usize, m: usize) -> Self {
        ConsumptionGraph {
            n,
            m,
            adj: vec![false; n * m],
        }
    }

    pub fn complete(n: usize, m: usize) -> Self {
        ConsumptionGraph {
            n,
            m,
            adj: vec![true; n * m],
        }
    }

    pub fn from_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = ConsumptionGraph::empty(n, m);
        for &(i, j) in edges {
            g.insert(i, j);
        }
        g
    }

    /// Graph number `code` in the enumeration of all `2^(n*m)` graphs; bit
    /// `i * m + j` is edge `(i, j)`.
    pub fn from_code(n: usize, m: usize, code: u64) -> Self {
        ConsumptionGraph {
            n,
            m,
            adj: (0..n * m).map(|k| code >> k & 1 == 1).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, agent: usize, chore: usize) -> bool {
        self.adj[agent * self.m + chore]
    }

    pub fn insert(&mut self, agent: usize, chore: usize) {
        self.adj[agent * self.m + chore] = true;
    }

    pub fn remove(&mut self, agent: usize, chore: usize) {
        self.adj[agent * self.m + chore] = false;
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.m;
        self.adj
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(move |(k, _)| (k / m, k % m))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count()
    }

    pub fn chores_of(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.m).filter(move |&j| self.contains(agent, j))
    }

    pub fn agents_of(&self, chore: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i, chore))
    }

    pub fn agent_degree(&self, agent: usize) -> usize {
        self.chores_of(agent).count()
    }

    pub fn chore_degree(&self, chore: usize) -> usize {
        self.agents_of(chore).count()
    }

    /// Some agent is linked to no chore.
    pub fn has_lonely_agent(&self) -> bool {
        (0..self.n).any(|i| self.agent_degree(i) == 0)
    }

    /// Some chore is linked to no agent.
    pub fn has_unlinked_chore(&self) -> bool {
        (0..self.m).any(|j| self.chore_degree(j) == 0)
    }

    /// Swaps the roles of agents and chores.
    pub fn transposed(&self) -> ConsumptionGraph {
        let mut t = ConsumptionGraph::empty(self.m, self.n);
        for (i, j) in self.edges() {
            t.insert(j, i);
        }
        t
    }

    pub fn is_subgraph_of(&self, other: &ConsumptionGraph) -> bool {
        self.n == other.n && self.m == other.m && self.adj.iter().zip(&other.adj).all(|(&a, &b)| !a || b)
    }

    /// Connected components that contain at least one agent, ordered by their
    /// lowest agent. Unlinked chores belong to no component.
    pub fn components(&self) -> Vec<Component> {
        let mut seen_agent = vec![false; self.n];
        let mut seen_chore = vec![false; self.m];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen_agent[start] {
                continue;
            }
            seen_agent[start] = true;
            let mut agents = vec![start];
            let mut chores = Vec::new();
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in self.chores_of(i) {
                    if seen_chore[j] {
                        continue;
                    }
                    seen_chore[j] = true;
                    chores.push(j);
                    for k in self.agents_of(j) {
                        if !seen_agent[k] {
                            seen_agent[k] = true;
                            agents.push(k);
                            stack.push(k);
                        }
                    }
                }
            }
            agents.sort_unstable();
            chores.sort_unstable();
            out.push(Component { agents, chores });
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Finds some simple cycle, if there is one.
    pub fn find_cycle(&self) -> Option<Cycle> {
        // Nodes: agents 0..n, chores n..n+m.
        let total = self.n + self.m;
        let mut parent = vec![usize::MAX; total];
        let mut state = vec![0u8; total];
        for root in 0..self.n {
            if state[root] != 0 {
                continue;
            }
            if let Some(nodes) = self.cycle_from(root, &mut parent, &mut state) {
                return Some(self.to_cycle(nodes));
            }
        }
        None
    }

    fn neighbours(&self, node: usize) -> Vec<usize> {
        if node < self.n {
            self.chores_of(node).map(|j| self.n + j).collect()
        } else {
            self.agents_of(node - self.n).collect()
        }
    }

    fn cycle_from(&self, root: usize, parent: &mut [usize], state: &mut [u8]) -> Option<Vec<usize>> {
        // Iterative DFS; the stack holds (node, neighbours, next index).
        let mut stack = vec![(root, self.neighbours(root), 0usize)];
        state[root] = 1;
        while let Some((node, nbrs, idx)) = stack.last_mut() {
            let node = *node;
            if *idx == nbrs.len() {
                state[node] = 2;
                stack.pop();
                continue;
            }
            let next = nbrs[*idx];
            *idx += 1;
            if next == parent[node] {
                continue;
            }
            match state[next] {
                0 => {
                    parent[next] = node;
                    state[next] = 1;
                    let nb = self.neighbours(next);
                    stack.push((next, nb, 0));
                }
                1 => {
                    let mut nodes = vec![node];
                    let mut cur = node;
                    while cur != next {
                        cur = parent[cur];
                        nodes.push(cur);
                    }
                    return Some(nodes);
                }
                _ => {}
            }
        }
        None
    }

    fn to_cycle(&self, mut nodes: Vec<usize>) -> Cycle {
        if nodes[0] >= self.n {
            nodes.rotate_left(1);
        }
        let agents = nodes.iter().step_by(2).copied().collect();
        let chores = nodes.iter().skip(1).step_by(2).map(|c| c - self.n).collect();
        Cycle { agents, chores }
    }
}

impl fmt::Debug for ConsumptionGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConsumptionGraph({}x{}; ", self.n, self.m)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}
