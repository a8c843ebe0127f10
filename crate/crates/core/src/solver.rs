//! All competitive utility profiles of an instance, and unique allocations
//! for non-degenerate ones.

use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::certify::{check_competitive, CompetitiveOutcome};
use crate::graph::ConsumptionGraph;
use crate::graphs::{prune, prune_with_efficiency, Mode, RichFamily};
use crate::model::{transpose, Allocation, Instance, Rational, UtilityProfile};
use crate::predicates::{is_degenerate, CycleCapExceeded, DEFAULT_CYCLE_CAP};
use crate::recover::{candidate_utility, CandidateStatus};

const CHUNK: usize = 2048;

/// How pair-graph combinations are walked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Enumeration {
    /// Every combination, then [`prune`].
    Exhaustive,
    /// Only combinations some weight vector realises.
    #[default]
    Consistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub mode: Mode,
    pub enumeration: Enumeration,
    pub prune_inefficient: bool,
    /// Worker count; `None` uses rayon's default pool.
    pub threads: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::Auto,
            enumeration: Enumeration::default(),
            prune_inefficient: false,
            threads: None,
        }
    }
}

impl SolveOptions {
    pub fn with_mode(mode: Mode) -> Self {
        SolveOptions {
            mode,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveMeta {
    /// `Direct` or `Dual`, never `Auto`.
    pub mode: Option<Mode>,
    pub graphs_enumerated: u64,
    pub graphs_pruned: u64,
    pub duplicate_graphs: u64,
    pub rejected_non_negative: u64,
    pub rejected_sum_mismatch: u64,
    pub rejected_flow_deficit: u64,
    pub accepted: u64,
    /// Filled in only by [`all_allocations`].
    pub degenerate: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    /// Sorted lexicographically, pairwise distinct.
    pub profiles: Vec<UtilityProfile>,
    /// `outcomes[k]` realises `profiles[k]`.
    pub outcomes: Vec<CompetitiveOutcome>,
    pub meta: SolveMeta,
}

pub fn solve_all(inst: &Instance, mode: Mode) -> SolutionSet {
    solve_with(inst, &SolveOptions::with_mode(mode))
}

pub fn solve_with(inst: &Instance, opts: &SolveOptions) -> SolutionSet {
    match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .expect("thread pool");
            pool.install(|| solve_in_pool(inst, opts))
        }
        None => solve_in_pool(inst, opts),
    }
}

/// The graph stream for `opts`, already mapped back to `inst`'s shape.
pub fn graph_stream<'a>(
    inst: &'a Instance,
    opts: &SolveOptions,
) -> (Mode, Box<dyn Iterator<Item = ConsumptionGraph> + 'a>) {
    let mode = opts.mode.resolve(inst.n(), inst.m());
    let (n, m) = (inst.n(), inst.m());
    let stream: Box<dyn Iterator<Item = ConsumptionGraph>> = match mode {
        Mode::Direct | Mode::Auto => {
            let family = RichFamily::for_instance(inst);
            match opts.enumeration {
                Enumeration::Exhaustive => Box::new(family.into_stream()),
                Enumeration::Consistent => Box::new(family.into_consistent_stream()),
            }
        }
        Mode::Dual if n == 1 => Box::new(std::iter::once(ConsumptionGraph::complete(1, m))),
        Mode::Dual => {
            let family = RichFamily::new(&transpose(inst.values()));
            let inner: Box<dyn Iterator<Item = ConsumptionGraph>> = match opts.enumeration {
                Enumeration::Exhaustive => Box::new(family.into_stream()),
                Enumeration::Consistent => Box::new(family.into_consistent_stream()),
            };
            Box::new(inner.map(|g| g.transposed()).filter(|g| !g.has_lonely_agent()))
        }
    };
    (mode, stream)
}

enum Verdict {
    Pruned,
    Rejected(&'static str),
    Accepted(Box<CompetitiveOutcome>),
}

fn judge(inst: &Instance, g: &ConsumptionGraph, efficiency: bool) -> Verdict {
    let keep = if efficiency {
        prune_with_efficiency(inst, g)
    } else {
        prune(g)
    };
    if !keep {
        return Verdict::Pruned;
    }
    let cand = candidate_utility(inst, g);
    if cand.status == CandidateStatus::Rejected {
        return Verdict::Rejected("non-negative-utility");
    }
    match check_competitive(inst, &cand.u) {
        Ok(out) => Verdict::Accepted(Box::new(out)),
        Err(r) => Verdict::Rejected(r.code()),
    }
}

fn solve_in_pool(inst: &Instance, opts: &SolveOptions) -> SolutionSet {
    let (mode, stream) = graph_stream(inst, opts);
    let mut meta = SolveMeta {
        mode: Some(mode),
        ..SolveMeta::default()
    };
    let mut seen: HashSet<ConsumptionGraph> = HashSet::new();
    let mut found: BTreeMap<UtilityProfile, CompetitiveOutcome> = BTreeMap::new();
    let mut chunk = Vec::with_capacity(CHUNK);
    let mut stream = stream.fuse();
    loop {
        chunk.clear();
        for g in stream.by_ref() {
            meta.graphs_enumerated += 1;
            if seen.contains(&g) {
                meta.duplicate_graphs += 1;
                continue;
            }
            seen.insert(g.clone());
            chunk.push(g);
            if chunk.len() == CHUNK {
                break;
            }
        }
        if chunk.is_empty() {
            break;
        }
        let verdicts: Vec<Verdict> = chunk
            .par_iter()
            .map(|g| judge(inst, g, opts.prune_inefficient))
            .collect();
        // Sequential merge in stream order: the first outcome per profile wins.
        for v in verdicts {
            match v {
                Verdict::Pruned => meta.graphs_pruned += 1,
                Verdict::Rejected(code) => match code {
                    "non-negative-utility" => meta.rejected_non_negative += 1,
                    "sum-mismatch" => meta.rejected_sum_mismatch += 1,
                    _ => meta.rejected_flow_deficit += 1,
                },
                Verdict::Accepted(out) => {
                    meta.accepted += 1;
                    found.entry(out.u.clone()).or_insert(*out);
                }
            }
        }
    }
    let (profiles, outcomes) = found.into_iter().unzip();
    SolutionSet {
        profiles,
        outcomes,
        meta,
    }
}

/// The first certified outcome in stream order, without collecting the rest.
pub fn first_outcome(inst: &Instance, opts: &SolveOptions) -> Option<CompetitiveOutcome> {
    let (_, stream) = graph_stream(inst, opts);
    let mut seen: HashSet<ConsumptionGraph> = HashSet::new();
    for g in stream {
        if !seen.insert(g.clone()) {
            continue;
        }
        if let Verdict::Accepted(out) = judge(inst, &g, opts.prune_inefficient) {
            return Some(*out);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeelError {
    #[error("graph has a cycle")]
    NotAcyclic,
    #[error("share {share} for agent {agent} on chore {chore} is outside [0, {available}]")]
    Inconsistent {
        agent: usize,
        chore: usize,
        share: Rational,
        available: Rational,
    },
    #[error("peeling left unassigned chores or unmet utilities")]
    ResidualMismatch,
}

/// The allocation with utilities `u` whose graph lies inside the acyclic
/// graph `g`, found by resolving leaves one at a time.
pub fn leaf_peel(inst: &Instance, g: &ConsumptionGraph, u: &[Rational]) -> Result<Allocation, PeelError> {
    if !g.is_acyclic() {
        return Err(PeelError::NotAcyclic);
    }
    let (n, m) = (inst.n(), inst.m());
    let mut rest = g.clone();
    let mut remaining = vec![Rational::from_integer(1.into()); m];
    let mut got = vec![Rational::zero(); n];
    let mut z = vec![vec![Rational::zero(); m]; n];
    while rest.edge_count() > 0 {
        if let Some(j) = (0..m).find(|&j| rest.chore_degree(j) == 1) {
            let i = rest.agents_of(j).next().expect("degree 1");
            let share = std::mem::take(&mut remaining[j]);
            got[i] += inst.value(i, j) * &share;
            z[i][j] = share;
            rest.remove(i, j);
            continue;
        }
        let i = (0..n)
            .find(|&i| rest.agent_degree(i) == 1)
            .expect("a forest with edges has a leaf");
        let j = rest.chores_of(i).next().expect("degree 1");
        let share = (&u[i] - &got[i]) / inst.value(i, j);
        if share.is_negative() || share > remaining[j] {
            return Err(PeelError::Inconsistent {
                agent: i,
                chore: j,
                share,
                available: remaining[j].clone(),
            });
        }
        got[i] = u[i].clone();
        remaining[j] -= &share;
        z[i][j] = share;
        rest.remove(i, j);
    }
    if remaining.iter().any(|r| !r.is_zero()) || got.as_slice() != u {
        return Err(PeelError::ResidualMismatch);
    }
    Ok(Allocation::from_shares_unchecked(z))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationsError {
    #[error("instance is degenerate: a cycle of disutility ratios has product 1")]
    Degenerate,
    #[error(transparent)]
    CapExceeded(#[from] CycleCapExceeded),
    #[error("profile {profile}: {source}")]
    Peel { profile: usize, source: PeelError },
}

/// The unique allocation for each profile of `sol`, if the instance is
/// non-degenerate.
pub fn all_allocations(inst: &Instance, sol: &SolutionSet) -> Result<Vec<Allocation>, AllocationsError> {
    all_allocations_with_cap(inst, sol, DEFAULT_CYCLE_CAP)
}

pub fn all_allocations_with_cap(
    inst: &Instance,
    sol: &SolutionSet,
    cap: u64,
) -> Result<Vec<Allocation>, AllocationsError> {
    if is_degenerate(inst, cap)? {
        return Err(AllocationsError::Degenerate);
    }
    sol.outcomes
        .iter()
        .enumerate()
        .map(|(k, out)| {
            leaf_peel(inst, &out.graph, &out.u).map_err(|source| AllocationsError::Peel { profile: k, source })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    fn small_instance() -> Instance {
        Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap()
    }

    #[test]
    fn small_instance_profiles() {
        for mode in [Mode::Direct, Mode::Dual, Mode::Auto] {
            let sol = solve_all(&small_instance(), mode);
            assert_eq!(sol.profiles, vec![vec![int(-3), ratio(-3, 2)], vec![int(-1), int(-2)]]);
            assert_eq!(
                sol.outcomes[0].z,
                Allocation::from_ratios(&[vec![(1, 1), (1, 4)], vec![(0, 1), (3, 4)]]).unwrap()
            );
            assert_eq!(sol.outcomes[1].p, vec![int(-1), int(-2)]);
        }
    }

    #[test]
    fn equal_budgets_single_profile() {
        let inst = Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -1]).unwrap();
        let sol = solve_all(&inst, Mode::Direct);
        assert_eq!(sol.profiles, vec![vec![ratio(-9, 2), ratio(-9, 8)]]);
        assert_eq!(
            sol.outcomes[0].z,
            Allocation::from_ratios(&[vec![(1, 1), (7, 16)], vec![(0, 1), (9, 16)]]).unwrap()
        );
        assert_eq!(sol.outcomes[0].p, vec![ratio(-2, 9), ratio(-16, 9)]);
    }

    #[test]
    fn single_agent() {
        let inst = Instance::from_ints(&[vec![-1, -3]], &[-2]).unwrap();
        let sol = solve_all(&inst, Mode::Auto);
        assert_eq!(sol.profiles, vec![vec![int(-4)]]);
        assert_eq!(sol.outcomes[0].p, vec![ratio(-1, 2), ratio(-3, 2)]);
        let allocs = all_allocations(&inst, &sol).unwrap();
        assert_eq!(allocs[0], Allocation::integral(1, &[0, 0]));
    }

    #[test]
    fn exhaustive_and_consistent_agree() {
        let inst = Instance::from_ints(&[vec![-2, -3, -1], vec![-1, -4, -2], vec![-5, -1, -3]], &[-1, -2, -3]).unwrap();
        let mut opts = SolveOptions::with_mode(Mode::Direct);
        let fast = solve_with(&inst, &opts);
        opts.enumeration = Enumeration::Exhaustive;
        let slow = solve_with(&inst, &opts);
        assert_eq!(fast.profiles, slow.profiles);
        assert!(fast.meta.graphs_enumerated <= slow.meta.graphs_enumerated);
    }

    #[test]
    fn peel_examples() {
        let inst = small_instance();
        let cut2 = ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)]);
        let z = leaf_peel(&inst, &cut2, &[int(-3), ratio(-3, 2)]).unwrap();
        assert_eq!(
            z,
            Allocation::from_ratios(&[vec![(1, 1), (1, 4)], vec![(0, 1), (3, 4)]]).unwrap()
        );
        let cut1 = ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let z = leaf_peel(&inst, &cut1, &[int(-1), int(-2)]).unwrap();
        assert_eq!(z, Allocation::integral(2, &[0, 1]));
        let err = leaf_peel(&inst, &cut2, &[int(-20), int(-1)]).unwrap_err();
        assert!(matches!(err, PeelError::Inconsistent { .. }));
        let square = ConsumptionGraph::complete(2, 2);
        assert_eq!(
            leaf_peel(&inst, &square, &[int(-1), int(-1)]),
            Err(PeelError::NotAcyclic)
        );
    }

    #[test]
    fn degenerate_refusal() {
        let inst = Instance::from_ints(&[vec![-1; 4], vec![-1; 4]], &[-1, -1]).unwrap();
        let sol = solve_all(&inst, Mode::Auto);
        assert_eq!(sol.profiles, vec![vec![int(-2), int(-2)]]);
        assert_eq!(all_allocations(&inst, &sol), Err(AllocationsError::Degenerate));
    }

    #[test]
    fn example_allocations_unique() {
        let inst = small_instance();
        let sol = solve_all(&inst, Mode::Auto);
        let allocs = all_allocations(&inst, &sol).unwrap();
        for (a, out) in allocs.iter().zip(&sol.outcomes) {
            assert_eq!(a, &out.z);
        }
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let inst = Instance::from_ints(
            &[vec![-2, -3, -1, -4], vec![-1, -4, -2, -2], vec![-5, -1, -3, -1]],
            &[-1, -2, -3],
        )
        .unwrap();
        let mut opts = SolveOptions::with_mode(Mode::Direct);
        opts.threads = Some(1);
        let one = solve_with(&inst, &opts);
        opts.threads = Some(4);
        assert_eq!(one, solve_with(&inst, &opts));
    }

    #[test]
    fn rejections_are_counted() {
        let sol = solve_all(&small_instance(), Mode::Direct);
        let m = &sol.meta;
        assert_eq!(m.graphs_enumerated, 3);
        assert_eq!(
            m.graphs_pruned + m.rejected_non_negative + m.rejected_sum_mismatch + m.rejected_flow_deficit + m.accepted,
            m.graphs_enumerated - m.duplicate_graphs
        );
    }
}
