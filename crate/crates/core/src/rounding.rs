//! Rounding a competitive allocation to an indivisible one that is
//! weighted-EF¹₁ and weighted-Prop1.

use std::cmp::Reverse;
use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::certify::CompetitiveOutcome;
use crate::graph::Cycle;
use crate::graphs::{NonPositiveWeight, WeightVector};
use crate::model::{consumption_graph, Allocation, Instance, PriceVector, Rational};
use crate::solver::{first_outcome, SolveOptions};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndivisibleAllocation {
    /// Owner of each chore.
    pub owner: Vec<usize>,
    /// Price of each agent's bundle.
    pub b_prime: Vec<Rational>,
}

impl IndivisibleAllocation {
    pub fn n(&self) -> usize {
        self.b_prime.len()
    }

    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&j| self.owner[j] == agent).collect()
    }

    pub fn to_allocation(&self) -> Allocation {
        Allocation::integral(self.n(), &self.owner)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundingError {
    #[error("cycle {cycle:?} has ratio product {product}, so the allocation is not Pareto optimal")]
    NotParetoOptimal { cycle: Cycle, product: Rational },
    #[error(transparent)]
    Weights(#[from] NonPositiveWeight),
    #[error("weights count {found} does not match {expected} agents")]
    WeightCount { found: usize, expected: usize },
    #[error("no competitive outcome found")]
    NoOutcome,
}

/// Breaks every cycle of `z`'s consumption graph by a transfer around it
/// that leaves every agent's utility unchanged.
pub fn acyclicize(inst: &Instance, z: &Allocation) -> Result<Allocation, RoundingError> {
    let mut shares = z.shares().to_vec();
    loop {
        let g = consumption_graph(&Allocation::from_shares_unchecked(shares.clone()));
        let Some(cycle) = g.find_cycle() else {
            return Ok(Allocation::from_shares_unchecked(shares));
        };
        let len = cycle.agents.len();
        let mut product = Rational::one();
        for k in 0..len {
            product *= inst.disutility(cycle.agents[k], cycle.chores[k]);
            product /= inst.disutility(cycle.next_agent(k), cycle.chores[k]);
        }
        if !product.is_one() {
            return Err(RoundingError::NotParetoOptimal { cycle, product });
        }
        // Orient so that the smallest share on the cycle sits on an edge
        // (agents[k], chores[k]), which is the side that gives.
        let mut best = (&shares[cycle.agents[0]][cycle.chores[0]], false);
        for k in 0..len {
            let giving = &shares[cycle.agents[k]][cycle.chores[k]];
            let taking = &shares[cycle.next_agent(k)][cycle.chores[k]];
            if giving < best.0 {
                best = (giving, false);
            }
            if taking < best.0 {
                best = (taking, true);
            }
        }
        let cycle = if best.1 { cycle.reversed() } else { cycle };
        // Agent k gives coef[k] of chore k and takes coef[k-1] of chore k-1.
        let mut coef = vec![Rational::one(); len];
        for k in 1..len {
            let a = cycle.agents[k];
            coef[k] = &coef[k - 1] * inst.disutility(a, cycle.chores[k - 1]) / inst.disutility(a, cycle.chores[k]);
        }
        let t = (0..len)
            .map(|k| &shares[cycle.agents[k]][cycle.chores[k]] / &coef[k])
            .min()
            .expect("cycle has edges");
        for k in 0..len {
            let c = cycle.chores[k];
            let moved = &t * &coef[k];
            shares[cycle.agents[k]][c] -= &moved;
            shares[cycle.next_agent(k)][c] += moved;
        }
    }
}

/// Rounds an acyclic competitive allocation chore by chore along its forest.
pub fn round_to_integral(
    inst: &Instance,
    z_acyc: &Allocation,
    p: &[Rational],
    b: &[Rational],
) -> IndivisibleAllocation {
    let (n, m) = (inst.n(), inst.m());
    let mut g = consumption_graph(z_acyc);
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut spent = vec![Rational::zero(); n];
    for j in 0..m {
        if g.chore_degree(j) == 1 {
            let i = g.agents_of(j).next().expect("degree 1");
            owner[j] = Some(i);
            spent[i] += &p[j];
            g.remove(i, j);
        }
    }
    let mut done = vec![false; n];
    for comp in g.components() {
        let mut roots = VecDeque::from([comp.agents[0]]);
        while let Some(i) = roots.pop_front() {
            if done[i] {
                continue;
            }
            done[i] = true;
            let mut adjacent: Vec<usize> = g.chores_of(i).collect();
            adjacent.sort_by_key(|&j| (Reverse(p[j].clone()), j));
            let mut absorbing = true;
            let mut children = Vec::new();
            for j in adjacent {
                if absorbing && &spent[i] + &p[j] >= b[i] {
                    owner[j] = Some(i);
                    spent[i] += &p[j];
                } else {
                    absorbing = false;
                    let child = g.agents_of(j).find(|&k| k != i).expect("shared chore");
                    owner[j] = Some(child);
                    spent[child] += &p[j];
                }
                children.extend(g.agents_of(j).filter(|&k| k != i));
                for k in 0..n {
                    g.remove(k, j);
                }
            }
            children.sort_unstable();
            children.dedup();
            roots.extend(children);
        }
    }
    IndivisibleAllocation {
        owner: owner.into_iter().map(|o| o.expect("every chore assigned")).collect(),
        b_prime: spent,
    }
}

/// Each agent's new budget is within one chore price of the old one.
pub fn check_budgets_close(alloc: &IndivisibleAllocation, p: &[Rational], b: &[Rational]) -> bool {
    let m = p.len();
    (0..alloc.n()).all(|i| {
        let bundle = alloc.bundle(i);
        let bp = &alloc.b_prime[i];
        if bundle.is_empty() {
            return b[i] < *bp && bp.is_zero() && (0..m).any(|jp| (&b[i] + p[jp].abs()).is_positive());
        }
        let low = bundle.iter().any(|&j| &b[i] - p[j].abs() <= *bp);
        let high = (0..m).any(|jp| *bp <= &b[i] + p[jp].abs());
        low && high
    })
}

fn value_of(inst: &Instance, agent: usize, chores: impl Iterator<Item = usize>) -> Rational {
    chores.map(|j| inst.value(agent, j)).sum()
}

/// Weighted envy-freeness up to removing one own chore and adding one
/// chore to the other bundle.
pub fn check_ef11(inst: &Instance, alloc: &IndivisibleAllocation, beta: &[Rational]) -> bool {
    let (n, m) = (inst.n(), inst.m());
    let bundles: Vec<Vec<usize>> = (0..n).map(|i| alloc.bundle(i)).collect();
    (0..n).all(|i| {
        let own = &bundles[i];
        if own.is_empty() {
            return true;
        }
        (0..n).filter(|&k| k != i).all(|k| {
            own.iter().any(|&j| {
                let lhs = value_of(inst, i, own.iter().copied().filter(|&c| c != j)) / &beta[i];
                (0..m).any(|jp| {
                    let mut other = bundles[k].clone();
                    if !other.contains(&jp) {
                        other.push(jp);
                    }
                    lhs >= value_of(inst, i, other.into_iter()) / &beta[k]
                })
            })
        })
    })
}

/// Weighted proportionality up to one chore.
pub fn check_prop1(inst: &Instance, alloc: &IndivisibleAllocation, beta: &[Rational]) -> bool {
    let m = inst.m();
    let total: Rational = beta.iter().sum();
    (0..inst.n()).all(|i| {
        let own = alloc.bundle(i);
        if own.is_empty() {
            return true;
        }
        let share = &beta[i] / &total * value_of(inst, i, 0..m);
        own.iter()
            .any(|&j| value_of(inst, i, own.iter().copied().filter(|&c| c != j)) >= share)
    })
}

/// Everything [`round_fair`] produced along the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairRounding {
    pub allocation: IndivisibleAllocation,
    pub prices: PriceVector,
    /// Budgets used for the divisible market, `-beta`.
    pub budgets: Vec<Rational>,
    pub outcome: CompetitiveOutcome,
    pub acyclic: Allocation,
}

/// Solves the market with budgets `-beta`, then rounds its first
/// competitive outcome.
pub fn round_fair(inst: &Instance, beta: &[Rational]) -> Result<FairRounding, RoundingError> {
    if beta.len() != inst.n() {
        return Err(RoundingError::WeightCount {
            found: beta.len(),
            expected: inst.n(),
        });
    }
    WeightVector::new(beta.to_vec())?;
    let budgets: Vec<Rational> = beta.iter().map(|x| -x).collect();
    let market = inst
        .with_budgets(budgets.clone())
        .expect("negated positive weights are valid budgets");
    let outcome = first_outcome(&market, &SolveOptions::default()).ok_or(RoundingError::NoOutcome)?;
    let acyclic = acyclicize(&market, &outcome.z)?;
    let allocation = round_to_integral(&market, &acyclic, &outcome.p, &budgets);
    Ok(FairRounding {
        allocation,
        prices: outcome.p.clone(),
        budgets,
        outcome,
        acyclic,
    })
}
