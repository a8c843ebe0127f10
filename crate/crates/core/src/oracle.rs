//! Brute-force ground truth for small instances.

use std::collections::BTreeMap;

use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use crate::certify::{check_competitive, CompetitiveOutcome};
use crate::graph::ConsumptionGraph;
use crate::model::{utility_of, Allocation, Instance, UtilityProfile};
use crate::recover::{candidate_utility, CandidateStatus};

/// Default limit on the number of graphs `2^(nm)`.
pub const DEFAULT_GRAPH_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    /// Sorted, distinct.
    pub profiles: Vec<UtilityProfile>,
    pub witnesses: Vec<CompetitiveOutcome>,
    pub graphs_examined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("2^{edges} graphs exceed the cap {cap}")]
pub struct GraphCapExceeded {
    pub edges: usize,
    pub cap: u64,
}

pub fn brute_force_cu(inst: &Instance) -> Result<OracleReport, GraphCapExceeded> {
    brute_force_cu_with_cap(inst, DEFAULT_GRAPH_CAP)
}

/// Runs recovery and certification on every bipartite graph.
pub fn brute_force_cu_with_cap(inst: &Instance, cap: u64) -> Result<OracleReport, GraphCapExceeded> {
    let (n, m) = (inst.n(), inst.m());
    let edges = n * m;
    if edges >= 64 || (1u64 << edges) > cap {
        return Err(GraphCapExceeded { edges, cap });
    }
    let total = 1u64 << edges;
    let accepted: Vec<(u64, CompetitiveOutcome)> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let g = ConsumptionGraph::from_code(n, m, code);
            let cand = candidate_utility(inst, &g);
            if cand.status == CandidateStatus::Rejected {
                return None;
            }
            check_competitive(inst, &cand.u).ok().map(|out| (code, out))
        })
        .collect();
    let mut found: BTreeMap<UtilityProfile, CompetitiveOutcome> = BTreeMap::new();
    for (_, out) in accepted {
        found.entry(out.u.clone()).or_insert(out);
    }
    let (profiles, witnesses) = found.into_iter().unzip();
    Ok(OracleReport {
        profiles,
        witnesses,
        graphs_examined: total,
    })
}

/// Competitiveness by the inequality characterisation: utilities strictly
/// negative and every consumed chore goes to an agent minimising
/// `|v[i][j] b[i] / u[i]|`. Shares no code with the flow certification.
pub fn kkt_check(inst: &Instance, z: &Allocation) -> bool {
    let u = utility_of(inst, z);
    if u.iter().any(|x| !x.is_negative()) {
        return false;
    }
    let b = inst.budgets();
    let (n, m) = (inst.n(), inst.m());
    for i in 0..n {
        for j in 0..m {
            if !z.share(i, j).is_positive() {
                continue;
            }
            let mine = inst.value(i, j) * &b[i] / &u[i];
            for k in 0..n {
                if mine < inst.value(k, j) * &b[k] / &u[k] {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    fn small_instance() -> Instance {
        Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap()
    }

    #[test]
    fn example_profiles() {
        let r = brute_force_cu(&small_instance()).unwrap();
        assert_eq!(r.profiles, vec![vec![int(-3), ratio(-3, 2)], vec![int(-1), int(-2)]]);
        assert_eq!(r.graphs_examined, 16);
        let eq = Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -1]).unwrap();
        assert_eq!(
            brute_force_cu(&eq).unwrap().profiles,
            vec![vec![ratio(-9, 2), ratio(-9, 8)]]
        );
        let single = Instance::from_ints(&[vec![-1, -1]], &[-1]).unwrap();
        assert_eq!(brute_force_cu(&single).unwrap().profiles, vec![vec![int(-2)]]);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = Instance::from_ints(&[vec![-1; 5], vec![-1; 5]], &[-1, -1]).unwrap();
        assert_eq!(
            brute_force_cu_with_cap(&inst, 512),
            Err(GraphCapExceeded { edges: 10, cap: 512 })
        );
    }

    #[test]
    fn kkt_examples() {
        let inst = small_instance();
        let z2 = Allocation::from_ratios(&[vec![(1, 1), (1, 4)], vec![(0, 1), (3, 4)]]).unwrap();
        assert!(kkt_check(&inst, &z2));
        assert!(!kkt_check(&inst, &Allocation::integral(2, &[1, 0])));
        assert!(!kkt_check(&inst, &Allocation::integral(2, &[0, 0])));
    }
}
