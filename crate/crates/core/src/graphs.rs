//! Rich families of consumption graphs built from two-agent splits and cuts.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::graph::ConsumptionGraph;
use crate::model::{transpose, Instance, Rational};
use crate::predicates::has_profitable_cycle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairGraphKind {
    /// First agent takes the `k` lowest-ratio chores, the second the rest.
    Split(usize),
    /// Chores tied with the `k`-th ratio are shared (1-based `k`).
    Cut(usize),
}

/// One graph of the two-agent family, with the range of
/// `tau[second] / tau[first]` for which it is the weighted-welfare graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAgentGraph {
    pub kind: PairGraphKind,
    pub graph: ConsumptionGraph,
    pub interval: RatioInterval,
}

/// Interval of positive rationals; `None` ends are `0` and `+inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioInterval {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    /// Both ends open (splits) or the interval is a point (cuts).
    pub open: bool,
}

impl RatioInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        let above = match &self.lower {
            None => x.is_positive(),
            Some(lo) => {
                if self.open {
                    x > lo
                } else {
                    x >= lo
                }
            }
        };
        let below = match &self.upper {
            None => true,
            Some(hi) => {
                if self.open {
                    x < hi
                } else {
                    x <= hi
                }
            }
        };
        above && below
    }
}

/// Strictly positive weights, one per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector(Vec<Rational>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("weight {index} is not strictly positive")]
pub struct NonPositiveWeight {
    pub index: usize,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self, NonPositiveWeight> {
        match weights.iter().position(|w| !w.is_positive()) {
            Some(index) => Err(NonPositiveWeight { index }),
            None => Ok(WeightVector(weights)),
        }
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Which way round the family is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Direct,
    Dual,
    Auto,
}

impl Mode {
    /// Resolves `Auto` by comparing `(2m+1)^(n(n-1)/2)` with
    /// `(2n+1)^(m(m-1)/2)`; ties go to `Direct`.
    pub fn resolve(self, n: usize, m: usize) -> Mode {
        match self {
            Mode::Auto => {
                if direct_bound(n, m) <= dual_bound(n, m) {
                    Mode::Direct
                } else {
                    Mode::Dual
                }
            }
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Dual => "dual",
            Mode::Auto => "auto",
        }
    }
}

/// `(2m+1)^(n(n-1)/2)`.
pub fn direct_bound(n: usize, m: usize) -> BigUint {
    BigUint::from(2 * m + 1).pow((n * n.saturating_sub(1) / 2) as u32)
}

/// `(2n+1)^(m(m-1)/2)`.
pub fn dual_bound(n: usize, m: usize) -> BigUint {
    direct_bound(m, n)
}

/// Splits and cuts for two agents given their value rows.
pub fn two_agent_mww(first: &[Rational], second: &[Rational]) -> Vec<TwoAgentGraph> {
    let m = first.len();
    assert_eq!(m, second.len(), "rows must have equal length");
    let ratios: Vec<Rational> = first.iter().zip(second).map(|(a, b)| a / b).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| ratios[x].cmp(&ratios[y]));
    // sorted[k-1] is the k-th smallest ratio.
    let sorted: Vec<&Rational> = order.iter().map(|&j| &ratios[j]).collect();

    let split = |k: usize| {
        let mut g = ConsumptionGraph::empty(2, m);
        for (pos, &j) in order.iter().enumerate() {
            g.insert(if pos < k { 0 } else { 1 }, j);
        }
        TwoAgentGraph {
            kind: PairGraphKind::Split(k),
            graph: g,
            interval: RatioInterval {
                lower: (k > 0).then(|| sorted[k - 1].clone()),
                upper: (k < m).then(|| sorted[k].clone()),
                open: true,
            },
        }
    };
    let cut = |k: usize| {
        let r = sorted[k - 1];
        let mut g = ConsumptionGraph::empty(2, m);
        for j in 0..m {
            match ratios[j].cmp(r) {
                Ordering::Less => g.insert(0, j),
                Ordering::Greater => g.insert(1, j),
                Ordering::Equal => {
                    g.insert(0, j);
                    g.insert(1, j);
                }
            }
        }
        TwoAgentGraph {
            kind: PairGraphKind::Cut(k),
            graph: g,
            interval: RatioInterval {
                lower: Some(r.clone()),
                upper: Some(r.clone()),
                open: false,
            },
        }
    };

    let mut out = Vec::with_capacity(2 * m + 1);
    out.push(split(0));
    for k in 1..=m {
        if k == 1 || sorted[k - 1] != sorted[k - 2] {
            out.push(cut(k));
        }
        if k == m || sorted[k - 1] < sorted[k] {
            out.push(split(k));
        }
    }
    out
}

/// Set of chores as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ChoreSet(Vec<u64>);

impl ChoreSet {
    fn full(m: usize) -> Self {
        let mut words = vec![u64::MAX; m.div_ceil(64)];
        if !m.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (m % 64)) - 1;
            }
        }
        ChoreSet(words)
    }

    fn from_row(g: &ConsumptionGraph, agent: usize) -> Self {
        let mut words = vec![0u64; g.m().div_ceil(64)];
        for j in g.chores_of(agent) {
            words[j / 64] |= 1 << (j % 64);
        }
        ChoreSet(words)
    }

    fn intersect(&mut self, other: &ChoreSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn contains(&self, j: usize) -> bool {
        self.0[j / 64] >> (j % 64) & 1 == 1
    }
}

#[derive(Debug, Clone)]
struct PairOption {
    first: ChoreSet,
    second: ChoreSet,
    interval: RatioInterval,
}

/// The pair tables from which the n-agent family is assembled.
#[derive(Debug, Clone)]
pub struct RichFamily {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
    tables: Vec<Vec<TwoAgentGraph>>,
    options: Vec<Vec<PairOption>>,
}

impl RichFamily {
    pub fn new(values: &[Vec<Rational>]) -> Self {
        let n = values.len();
        let m = values.first().map_or(0, Vec::len);
        let mut pairs = Vec::new();
        let mut tables = Vec::new();
        for i in 0..n {
            for k in i + 1..n {
                pairs.push((i, k));
                tables.push(two_agent_mww(&values[i], &values[k]));
            }
        }
        let options = tables
            .iter()
            .map(|t| {
                t.iter()
                    .map(|tg| PairOption {
                        first: ChoreSet::from_row(&tg.graph, 0),
                        second: ChoreSet::from_row(&tg.graph, 1),
                        interval: tg.interval.clone(),
                    })
                    .collect()
            })
            .collect();
        RichFamily {
            n,
            m,
            pairs,
            tables,
            options,
        }
    }

    pub fn for_instance(inst: &Instance) -> Self {
        RichFamily::new(inst.values())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Agent pairs `(i, i')`, `i < i'`, in table order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn table(&self, pair: usize) -> &[TwoAgentGraph] {
        &self.tables[pair]
    }

    /// Number of pair-graph combinations.
    pub fn combination_count(&self) -> BigUint {
        self.tables
            .iter()
            .fold(BigUint::one(), |acc, t| acc * BigUint::from(t.len()))
    }

    /// The graph for one choice of pair-graph index per pair.
    pub fn graph_for(&self, choice: &[usize]) -> ConsumptionGraph {
        assert_eq!(choice.len(), self.pairs.len());
        let mut rows = vec![ChoreSet::full(self.m); self.n];
        for (p, &c) in choice.iter().enumerate() {
            let (i, k) = self.pairs[p];
            let opt = &self.options[p][c];
            rows[i].intersect(&opt.first);
            rows[k].intersect(&opt.second);
        }
        graph_from_rows(self.m, &rows)
    }

    /// Every combination, in lexicographic order of pair-graph indices.
    pub fn into_stream(self) -> FamilyStream {
        FamilyStream {
            choice: Some(vec![0; self.pairs.len()]),
            family: self,
        }
    }

    /// Only combinations whose pair intervals admit a common weight vector
    /// and that leave no agent or chore isolated, in the same relative order
    /// as [`RichFamily::into_stream`].
    pub fn into_consistent_stream(self) -> ConsistentStream {
        let n = self.n;
        let mut closure = vec![None; n * n];
        for x in 0..n {
            closure[x * n + x] = Some(Bound::unit());
        }
        let root = Frame {
            closure,
            rows: vec![ChoreSet::full(self.m); n],
        };
        ConsistentStream {
            frames: vec![root],
            cursor: vec![0],
            family: self,
        }
    }
}

fn graph_from_rows(m: usize, rows: &[ChoreSet]) -> ConsumptionGraph {
    let mut g = ConsumptionGraph::empty(rows.len(), m);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..m {
            if row.contains(j) {
                g.insert(i, j);
            }
        }
    }
    g
}

/// Lazy stream over every pair-graph combination.
#[derive(Debug, Clone)]
pub struct FamilyStream {
    family: RichFamily,
    choice: Option<Vec<usize>>,
}

impl Iterator for FamilyStream {
    type Item = ConsumptionGraph;

    fn next(&mut self) -> Option<ConsumptionGraph> {
        let choice = self.choice.as_mut()?;
        let g = self.family.graph_for(choice);
        // Odometer with the first pair as the slowest digit.
        let mut advanced = false;
        for p in (0..choice.len()).rev() {
            choice[p] += 1;
            if choice[p] < self.family.tables[p].len() {
                advanced = true;
                break;
            }
            choice[p] = 0;
        }
        if !advanced {
            self.choice = None;
        }
        Some(g)
    }
}

/// Upper bound `tau_y / tau_x <= value` (or `<` when strict).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bound {
    value: Rational,
    strict: bool,
}

impl Bound {
    fn unit() -> Self {
        Bound {
            value: Rational::one(),
            strict: false,
        }
    }

    fn then(&self, other: &Bound) -> Bound {
        Bound {
            value: &self.value * &other.value,
            strict: self.strict || other.strict,
        }
    }

    fn tighter_than(&self, other: &Option<Bound>) -> bool {
        match other {
            None => true,
            Some(o) => self.value < o.value || (self.value == o.value && self.strict && !o.strict),
        }
    }

    /// A cycle with this product makes the system infeasible.
    fn contradicts(&self) -> bool {
        let one = Rational::one();
        self.value < one || (self.value == one && self.strict)
    }
}

#[derive(Debug, Clone)]
struct Frame {
    /// Row-major `n x n`: tightest bound on `tau_y / tau_x`.
    closure: Vec<Option<Bound>>,
    rows: Vec<ChoreSet>,
}

/// Backtracking stream that skips combinations no weight vector realises.
#[derive(Debug, Clone)]
pub struct ConsistentStream {
    family: RichFamily,
    frames: Vec<Frame>,
    cursor: Vec<usize>,
}

impl ConsistentStream {
    fn extend(&self, frame: &Frame, pair: usize, option: usize) -> Option<Frame> {
        let fam = &self.family;
        let (a, b) = fam.pairs[pair];
        let opt = &fam.options[pair][option];
        let mut rows = frame.rows.clone();
        rows[a].intersect(&opt.first);
        rows[b].intersect(&opt.second);
        if rows[a].is_empty() || rows[b].is_empty() {
            return None;
        }
        if (0..fam.m).any(|j| rows.iter().all(|r| !r.contains(j))) {
            return None;
        }
        let mut closure = frame.closure.clone();
        let strict = opt.interval.open;
        if let Some(hi) = &opt.interval.upper {
            add_bound(
                &mut closure,
                fam.n,
                a,
                b,
                Bound {
                    value: hi.clone(),
                    strict,
                },
            )?;
        }
        if let Some(lo) = &opt.interval.lower {
            let inv = Bound {
                value: lo.recip(),
                strict,
            };
            add_bound(&mut closure, fam.n, b, a, inv)?;
        }
        Some(Frame { closure, rows })
    }
}

/// Adds `tau_to / tau_from <= w` and re-closes; `None` if infeasible.
fn add_bound(closure: &mut [Option<Bound>], n: usize, from: usize, to: usize, w: Bound) -> Option<()> {
    if let Some(back) = &closure[to * n + from] {
        if w.then(back).contradicts() {
            return None;
        }
    }
    let before = closure.to_vec();
    for x in 0..n {
        let Some(head) = &before[x * n + from] else {
            continue;
        };
        let head = head.then(&w);
        for y in 0..n {
            let Some(tail) = &before[to * n + y] else {
                continue;
            };
            let candidate = head.then(tail);
            if candidate.tighter_than(&closure[x * n + y]) {
                closure[x * n + y] = Some(candidate);
            }
        }
    }
    Some(())
}

impl Iterator for ConsistentStream {
    type Item = ConsumptionGraph;

    fn next(&mut self) -> Option<ConsumptionGraph> {
        let depth_max = self.family.pairs.len();
        loop {
            let frame = self.frames.last()?;
            let d = self.frames.len() - 1;
            if d == depth_max {
                let g = graph_from_rows(self.family.m, &frame.rows);
                self.frames.pop();
                self.cursor.pop();
                return Some(g);
            }
            let option = self.cursor[d];
            if option == self.family.options[d].len() {
                self.frames.pop();
                self.cursor.pop();
                continue;
            }
            self.cursor[d] += 1;
            if let Some(next) = self.extend(frame, d, option) {
                self.frames.push(next);
                self.cursor.push(0);
            }
        }
    }
}

/// Every pair-graph combination for `inst`.
pub fn enumerate_rich_family(inst: &Instance) -> FamilyStream {
    RichFamily::for_instance(inst).into_stream()
}

/// The family of the transposed instance, transposed back, without graphs
/// that leave an agent lonely.
pub fn enumerate_rich_family_dual(inst: &Instance) -> impl Iterator<Item = ConsumptionGraph> {
    let single = inst.n() == 1;
    let m = inst.m();
    let family = RichFamily::new(&transpose(inst.values()));
    let inner = (!single).then(|| family.into_stream());
    let base = single.then(|| ConsumptionGraph::complete(1, m));
    base.into_iter().chain(
        inner
            .into_iter()
            .flatten()
            .map(|g| g.transposed())
            .filter(|g| !g.has_lonely_agent()),
    )
}

/// Keep a graph only if every agent and every chore has an edge.
pub fn prune(g: &ConsumptionGraph) -> bool {
    !g.has_lonely_agent() && !g.has_unlinked_chore()
}

/// [`prune`], and also discard graphs admitting a profitable trading cycle.
pub fn prune_with_efficiency(inst: &Instance, g: &ConsumptionGraph) -> bool {
    prune(g) && !has_profitable_cycle(inst, g)
}

/// Links each chore to every agent minimising `tau_i |v[i][j]|`.
pub fn mww_graph_for_weights(inst: &Instance, tau: &WeightVector) -> ConsumptionGraph {
    let (n, m) = (inst.n(), inst.m());
    assert_eq!(tau.len(), n, "one weight per agent");
    let tau = tau.as_slice();
    let mut g = ConsumptionGraph::empty(n, m);
    for j in 0..m {
        let costs: Vec<Rational> = (0..n).map(|i| &tau[i] * inst.disutility(i, j)).collect();
        let best = costs.iter().min().expect("n >= 1");
        for (i, c) in costs.iter().enumerate() {
            if c == best {
                g.insert(i, j);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    fn small_instance() -> Instance {
        Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap()
    }

    fn row(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn example_pair_graphs() {
        let list = two_agent_mww(&row(&[-1, -8]), &row(&[-1, -2]));
        let kinds: Vec<_> = list.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                PairGraphKind::Split(0),
                PairGraphKind::Cut(1),
                PairGraphKind::Split(1),
                PairGraphKind::Cut(2),
                PairGraphKind::Split(2),
            ]
        );
        assert_eq!(
            list[1].graph,
            ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 0), (1, 1)])
        );
        assert_eq!(
            list[3].graph,
            ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)])
        );
        assert_eq!(list[0].graph, ConsumptionGraph::from_edges(2, 2, &[(1, 0), (1, 1)]));
        assert_eq!(list[4].graph, ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1)]));
    }

    #[test]
    fn single_chore_pair() {
        let list = two_agent_mww(&row(&[-3]), &row(&[-5]));
        assert_eq!(list.len(), 3);
        assert_eq!(list[1].graph, ConsumptionGraph::complete(2, 1));
    }

    #[test]
    fn tied_ratios_share_chores() {
        let list = two_agent_mww(&row(&[-1, -2, -3, -6]), &row(&[-2, -1, -1, -2]));
        // Ratios 1/2, 2, 3, 3: chores 2 and 3 tie.
        assert_eq!(list.len(), 2 * 4 + 1 - 2);
        let cut = list.iter().find(|t| t.kind == PairGraphKind::Cut(3)).unwrap();
        assert!(cut.graph.contains(0, 2) && cut.graph.contains(1, 2));
        assert!(cut.graph.contains(0, 3) && cut.graph.contains(1, 3));
        assert!(!list.iter().any(|t| t.kind == PairGraphKind::Cut(4)));
        assert!(!list.iter().any(|t| t.kind == PairGraphKind::Split(3)));
    }

    #[test]
    fn intervals_match_weights() {
        let list = two_agent_mww(&row(&[-1, -8]), &row(&[-1, -2]));
        assert!(list[3].interval.contains(&int(4)));
        assert!(!list[3].interval.contains(&int(3)));
        assert!(list[2].interval.contains(&int(2)));
        assert!(!list[2].interval.contains(&int(1)));
        assert!(list[0].interval.contains(&ratio(1, 2)));
        assert!(list[4].interval.contains(&int(100)));
    }

    #[test]
    fn two_agent_stream_is_pair_table() {
        let inst = small_instance();
        let all: Vec<_> = enumerate_rich_family(&inst).collect();
        let table: Vec<_> = two_agent_mww(&inst.values()[0], &inst.values()[1])
            .into_iter()
            .map(|t| t.graph)
            .collect();
        assert_eq!(all, table);
    }

    #[test]
    fn single_agent_families() {
        let inst = Instance::from_ints(&[vec![-1, -2, -3]], &[-1]).unwrap();
        let direct: Vec<_> = enumerate_rich_family(&inst).collect();
        assert_eq!(direct, vec![ConsumptionGraph::complete(1, 3)]);
        let dual: Vec<_> = enumerate_rich_family_dual(&inst).collect();
        assert_eq!(dual, vec![ConsumptionGraph::complete(1, 3)]);
        let consistent: Vec<_> = RichFamily::for_instance(&inst).into_consistent_stream().collect();
        assert_eq!(consistent, vec![ConsumptionGraph::complete(1, 3)]);
    }

    #[test]
    fn dual_covers_example_equilibria() {
        let dual: Vec<_> = enumerate_rich_family_dual(&small_instance()).collect();
        let cut1 = ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let cut2 = ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)]);
        assert!(dual.contains(&cut1));
        assert!(dual.contains(&cut2));
        assert!(dual.iter().all(|g| !g.has_lonely_agent()));
    }

    #[test]
    fn three_agent_bound() {
        let inst = Instance::from_ints(&[vec![-1, -2], vec![-3, -1], vec![-2, -2]], &[-1, -1, -1]).unwrap();
        let family = RichFamily::for_instance(&inst);
        assert!(family.combination_count() <= BigUint::from(125u32));
        assert_eq!(
            family.clone().into_stream().count(),
            family.combination_count().to_string().parse::<usize>().unwrap()
        );
    }

    #[test]
    fn consistent_stream_subset_of_pruned_full() {
        let inst = Instance::from_ints(&[vec![-1, -2, -3], vec![-3, -1, -2], vec![-2, -3, -1]], &[-1, -1, -1]).unwrap();
        let family = RichFamily::for_instance(&inst);
        let full: Vec<_> = family.clone().into_stream().filter(prune).collect();
        let consistent: Vec<_> = family.into_consistent_stream().collect();
        assert!(consistent.len() < full.len());
        for g in &consistent {
            assert!(full.contains(g));
        }
        for tau in [[1, 1, 1], [1, 2, 3], [3, 1, 2], [2, 2, 1]] {
            let w = WeightVector::new(tau.iter().map(|&t| int(t)).collect()).unwrap();
            let g = mww_graph_for_weights(&inst, &w);
            if prune(&g) {
                assert!(consistent.contains(&g), "{g:?}");
            }
        }
    }

    #[test]
    fn prune_examples() {
        let inst = small_instance();
        let list = two_agent_mww(&inst.values()[0], &inst.values()[1]);
        assert!(!prune(&list[0].graph));
        assert!(prune(&list[3].graph));
        assert!(!prune(&ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 0)])));
        let swapped = ConsumptionGraph::from_edges(2, 2, &[(0, 1), (1, 0)]);
        assert!(prune(&swapped));
        assert!(!prune_with_efficiency(&inst, &swapped));
    }

    #[test]
    fn mww_examples() {
        let inst = small_instance();
        let w = WeightVector::new(vec![ratio(1, 3), ratio(4, 3)]).unwrap();
        assert_eq!(
            mww_graph_for_weights(&inst, &w),
            ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)])
        );
        let w = WeightVector::new(vec![int(1), int(1)]).unwrap();
        assert_eq!(
            mww_graph_for_weights(&inst, &w),
            ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 0), (1, 1)])
        );
        assert!(WeightVector::new(vec![int(1), int(0)]).is_err());
    }

    #[test]
    fn mode_selection() {
        assert_eq!(Mode::Auto.resolve(3, 8), Mode::Direct);
        assert_eq!(Mode::Auto.resolve(8, 3), Mode::Dual);
        assert_eq!(Mode::Auto.resolve(2, 2), Mode::Direct);
        assert_eq!(Mode::Dual.resolve(3, 8), Mode::Dual);
    }
}
