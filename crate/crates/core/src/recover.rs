//! Candidate utility profiles recovered from a consumption graph.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};

use crate::graph::ConsumptionGraph;
use crate::model::{Instance, Rational, UtilityProfile};

/// Influences between agents sharing a component; `None` across components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfluenceTable {
    n: usize,
    pi: Vec<Option<Rational>>,
}

impl InfluenceTable {
    pub fn get(&self, from: usize, to: usize) -> Option<&Rational> {
        self.pi[from * self.n + to].as_ref()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateStatus {
    Pending,
    /// Some recovered utility is not strictly negative.
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateProfile {
    pub graph: ConsumptionGraph,
    pub u: UtilityProfile,
    pub status: CandidateStatus,
}

/// Path products from each component's lowest agent along a breadth-first
/// tree, then `pi[i][i'] = pi[a][i'] / pi[a][i]`.
pub fn influences(inst: &Instance, g: &ConsumptionGraph) -> InfluenceTable {
    let n = inst.n();
    let mut pi = vec![None; n * n];
    for comp in anchored_components(inst, g) {
        for &(i, ref pa_i) in &comp {
            for &(k, ref pa_k) in &comp {
                pi[i * n + k] = Some(pa_k / pa_i);
            }
        }
    }
    InfluenceTable { n, pi }
}

/// Each component as `(agent, pi[anchor][agent])` in visiting order, anchor
/// first.
fn anchored_components(inst: &Instance, g: &ConsumptionGraph) -> Vec<Vec<(usize, Rational)>> {
    let n = inst.n();
    let mut from_anchor: Vec<Option<Rational>> = vec![None; n];
    let mut chore_seen = vec![false; inst.m()];
    let mut out = Vec::new();
    for anchor in 0..n {
        if from_anchor[anchor].is_some() {
            continue;
        }
        from_anchor[anchor] = Some(Rational::one());
        let mut members = vec![anchor];
        let mut queue = VecDeque::from([anchor]);
        while let Some(a) = queue.pop_front() {
            for j in g.chores_of(a) {
                if chore_seen[j] {
                    continue;
                }
                chore_seen[j] = true;
                for b in g.agents_of(j) {
                    if from_anchor[b].is_some() {
                        continue;
                    }
                    let step = inst.disutility(a, j) / inst.disutility(b, j);
                    from_anchor[b] = Some(from_anchor[a].as_ref().expect("visited") * step);
                    members.push(b);
                    queue.push_back(b);
                }
            }
        }
        out.push(
            members
                .into_iter()
                .map(|i| (i, from_anchor[i].clone().expect("member")))
                .collect(),
        );
    }
    out
}

/// `sum_{j in g(i)} v[i][j] / deg(j)`; chores without edges contribute nothing.
pub fn equal_split_utilities(inst: &Instance, g: &ConsumptionGraph) -> UtilityProfile {
    let degrees: Vec<usize> = (0..inst.m()).map(|j| g.chore_degree(j)).collect();
    (0..inst.n())
        .map(|i| {
            g.chores_of(i)
                .map(|j| inst.value(i, j) / Rational::from_integer(degrees[j].into()))
                .sum()
        })
        .collect()
}

/// The only utility profile an allocation with graph `g` could be
/// competitive at.
pub fn candidate_utility(inst: &Instance, g: &ConsumptionGraph) -> CandidateProfile {
    let ubar = equal_split_utilities(inst, g);
    let b = inst.budgets();
    let mut u = vec![Rational::zero(); inst.n()];
    for comp in anchored_components(inst, g) {
        // pi[i][k] = pi[a][k] / pi[a][i], so the sum over k factors out.
        let budget_sum: Rational = comp.iter().map(|(k, _)| &b[*k]).sum();
        let weighted: Rational = comp.iter().map(|(k, pa_k)| pa_k * &ubar[*k]).sum();
        let common = weighted / budget_sum;
        for (i, pa_i) in &comp {
            u[*i] = &b[*i] * &common / pa_i;
        }
    }
    let status = if u.iter().all(Signed::is_negative) {
        CandidateStatus::Pending
    } else {
        CandidateStatus::Rejected
    };
    CandidateProfile {
        graph: g.clone(),
        u,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    fn small_instance() -> Instance {
        Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap()
    }

    fn cut1() -> ConsumptionGraph {
        ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 0), (1, 1)])
    }

    fn cut2() -> ConsumptionGraph {
        ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)])
    }

    #[test]
    fn influence_examples() {
        let inst = small_instance();
        let t = influences(&inst, &cut2());
        assert_eq!(t.get(0, 1), Some(&int(4)));
        assert_eq!(t.get(1, 0), Some(&ratio(1, 4)));
        assert_eq!(t.get(0, 0), Some(&int(1)));
        let t = influences(&inst, &cut1());
        assert_eq!(t.get(0, 1), Some(&int(1)));
        let split = ConsumptionGraph::from_edges(2, 2, &[(0, 0), (1, 1)]);
        let t = influences(&inst, &split);
        assert_eq!(t.get(0, 1), None);
        assert_eq!(t.get(1, 1), Some(&int(1)));
    }

    #[test]
    fn equal_split_examples() {
        let inst = small_instance();
        assert_eq!(equal_split_utilities(&inst, &cut2()), vec![int(-5), int(-1)]);
        assert_eq!(equal_split_utilities(&inst, &cut1()), vec![ratio(-1, 2), ratio(-5, 2)]);
        let ones = Instance::from_ints(&[vec![-1; 3], vec![-1; 3]], &[-1, -1]).unwrap();
        assert_eq!(
            equal_split_utilities(&ones, &ConsumptionGraph::complete(2, 3)),
            vec![ratio(-3, 2), ratio(-3, 2)]
        );
    }

    #[test]
    fn candidate_examples() {
        let inst = small_instance();
        let c = candidate_utility(&inst, &cut2());
        assert_eq!(c.u, vec![int(-3), ratio(-3, 2)]);
        assert_eq!(c.status, CandidateStatus::Pending);
        let c = candidate_utility(&inst, &cut1());
        assert_eq!(c.u, vec![int(-1), int(-2)]);
        let all_first = ConsumptionGraph::from_edges(2, 2, &[(0, 0), (0, 1)]);
        let c = candidate_utility(&inst, &all_first);
        assert_eq!(c.u, vec![int(-9), int(0)]);
        assert_eq!(c.status, CandidateStatus::Rejected);
    }

    #[test]
    fn component_identity_holds() {
        let inst = Instance::from_ints(&[vec![-2, -3, -1], vec![-1, -4, -2], vec![-5, -1, -3]], &[-1, -2, -3]).unwrap();
        let g = ConsumptionGraph::from_edges(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]);
        let c = candidate_utility(&inst, &g);
        let t = influences(&inst, &g);
        let b = inst.budgets();
        for i in 0..3 {
            for k in 0..3 {
                let lhs = &c.u[i] / &b[i];
                let rhs = t.get(i, k).unwrap() * &c.u[k] / &b[k];
                assert_eq!(lhs, rhs);
            }
        }
    }
}
