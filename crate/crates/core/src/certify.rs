//! Certification of candidate profiles by maximum flow.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::ConsumptionGraph;
use crate::graphs::WeightVector;
use crate::maxflow::FlowGraph;
use crate::model::{consumption_graph, utility_of, Allocation, Instance, PriceVector, Rational, UtilityProfile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetitiveOutcome {
    pub u: UtilityProfile,
    pub z: Allocation,
    pub p: PriceVector,
    pub graph: ConsumptionGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("utility of agent {agent} is not strictly negative")]
    NonNegativeUtility { agent: usize },
    #[error("budgets sum to {budgets} in magnitude but prices to {prices}")]
    SumMismatch { budgets: Rational, prices: Rational },
    #[error("maximum flow {flow} is below the total budget {required}")]
    FlowDeficit { flow: Rational, required: Rational },
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::NonNegativeUtility { .. } => "non-negative-utility",
            Rejection::SumMismatch { .. } => "sum-mismatch",
            Rejection::FlowDeficit { .. } => "flow-deficit",
        }
    }
}

/// `tau[i] = b[i] / u[i]`.
pub fn tau_weights(u: &[Rational], b: &[Rational]) -> Result<WeightVector, Rejection> {
    if let Some(agent) = u.iter().position(|x| !x.is_negative()) {
        return Err(Rejection::NonNegativeUtility { agent });
    }
    let tau = u.iter().zip(b).map(|(ui, bi)| bi / ui).collect();
    Ok(WeightVector::new(tau).expect("negative over negative"))
}

/// `q[j] = min_i |b[i] v[i][j] / u[i]|`.
pub fn min_weighted_disutility(inst: &Instance, u: &[Rational]) -> Vec<Rational> {
    column_minima(inst.m(), &weighted_disutilities(inst, u))
}

fn column_minima(m: usize, weighted: &[Vec<Rational>]) -> Vec<Rational> {
    (0..m)
        .map(|j| weighted.iter().map(|row| &row[j]).min().expect("n >= 1").clone())
        .collect()
}

fn weighted_disutilities(inst: &Instance, u: &[Rational]) -> Vec<Vec<Rational>> {
    let b = inst.budgets();
    (0..inst.n())
        .map(|i| {
            let tau = &b[i] / &u[i];
            (0..inst.m()).map(|j| &tau * inst.disutility(i, j)).collect()
        })
        .collect()
}

/// The flow network for `u`: source, agents, chores, sink.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub n: usize,
    pub m: usize,
    pub source_caps: Vec<Rational>,
    pub tau_graph: ConsumptionGraph,
    pub sink_caps: Vec<Rational>,
}

impl FlowNetwork {
    /// Requires `u` strictly negative.
    pub fn build(inst: &Instance, u: &[Rational]) -> Self {
        let (n, m) = (inst.n(), inst.m());
        let weighted = weighted_disutilities(inst, u);
        let q = column_minima(m, &weighted);
        let mut tau_graph = ConsumptionGraph::empty(n, m);
        for (i, row) in weighted.iter().enumerate() {
            for j in 0..m {
                if row[j] == q[j] {
                    tau_graph.insert(i, j);
                }
            }
        }
        FlowNetwork {
            n,
            m,
            source_caps: inst.budgets().iter().map(Rational::abs).collect(),
            tau_graph,
            sink_caps: q,
        }
    }

    /// Runs the flow; returns its value and the agent-to-chore part.
    pub fn max_flow(&self) -> (Rational, Vec<Vec<Rational>>) {
        let (n, m) = (self.n, self.m);
        let (source, sink) = (n + m, n + m + 1);
        let total: Rational = self.source_caps.iter().sum();
        let unbounded = &total + Rational::from_integer(1.into());
        let mut net = FlowGraph::new(n + m + 2);
        for (i, cap) in self.source_caps.iter().enumerate() {
            net.add_capacity(source, i, cap.clone());
        }
        for (i, j) in self.tau_graph.edges() {
            net.add_capacity(i, n + j, unbounded.clone());
        }
        for (j, cap) in self.sink_caps.iter().enumerate() {
            net.add_capacity(n + j, sink, cap.clone());
        }
        let value = net.run(source, sink);
        let flows = (0..n)
            .map(|i| (0..m).map(|j| net.flow(i, n + j).clone()).collect())
            .collect();
        (value, flows)
    }
}

/// Accepts `u` iff a competitive allocation realises it.
pub fn check_competitive(inst: &Instance, u: &[Rational]) -> Result<CompetitiveOutcome, Rejection> {
    if let Some(agent) = u.iter().position(|x| !x.is_negative()) {
        return Err(Rejection::NonNegativeUtility { agent });
    }
    let network = FlowNetwork::build(inst, u);
    let required: Rational = network.source_caps.iter().sum();
    let prices: Rational = network.sink_caps.iter().sum();
    if required != prices {
        return Err(Rejection::SumMismatch {
            budgets: required,
            prices,
        });
    }
    let (flow, flows) = network.max_flow();
    if flow != required {
        return Err(Rejection::FlowDeficit { flow, required });
    }
    let q = &network.sink_caps;
    let shares = flows
        .into_iter()
        .map(|row| row.into_iter().zip(q).map(|(f, qj)| f / qj).collect())
        .collect();
    let z = Allocation::for_instance(inst, shares).expect("saturated flow is a feasible allocation");
    let p = q.iter().map(|x| -x).collect();
    let graph = consumption_graph(&z);
    Ok(CompetitiveOutcome {
        u: u.to_vec(),
        z,
        p,
        graph,
    })
}

/// Re-checks an outcome from scratch: feasibility, negative prices,
/// minimum pain per buck, budget exhaustion and the stated utilities.
pub fn verify_outcome(inst: &Instance, out: &CompetitiveOutcome) -> bool {
    let (n, m) = (inst.n(), inst.m());
    let z = &out.z;
    let p = &out.p;
    if z.n() != n || z.m() != m || p.len() != m || out.u.len() != n {
        return false;
    }
    if p.iter().any(|x| !x.is_negative()) {
        return false;
    }
    for j in 0..m {
        let column: Rational = (0..n).map(|i| z.share(i, j)).sum();
        if !(column - Rational::from_integer(1.into())).is_zero() {
            return false;
        }
        if (0..n).any(|i| z.share(i, j).is_negative()) {
            return false;
        }
    }
    for i in 0..n {
        // Smallest value-per-price ratio: the least pain for each unit spent.
        let ratios: Vec<Rational> = (0..m).map(|j| inst.value(i, j) / &p[j]).collect();
        let best = ratios.iter().min().expect("m >= 1");
        for j in 0..m {
            if z.share(i, j).is_positive() && &ratios[j] != best {
                return false;
            }
        }
        let spent: Rational = (0..m).map(|j| &p[j] * z.share(i, j)).sum();
        if spent != inst.budgets()[i] {
            return false;
        }
    }
    utility_of(inst, z) == out.u
}
