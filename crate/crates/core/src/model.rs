//! Instances, allocations and exact utilities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::ConsumptionGraph;

/// Exact rational number. All decisions in the crate are made on these.
pub type Rational = BigRational;

/// One utility per agent.
pub type UtilityProfile = Vec<Rational>;

/// One price per chore.
pub type PriceVector = Vec<Rational>;

/// Builds `num / den` in lowest terms. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("instance has no agents")]
    NoAgents,
    #[error("instance has no chores")]
    NoChores,
    #[error("value row {row} has {found} entries, expected {expected}")]
    RaggedValues { row: usize, found: usize, expected: usize },
    #[error("{values} value rows but {budgets} budgets")]
    BudgetCount { values: usize, budgets: usize },
    #[error("value of agent {agent} for chore {chore} is positive")]
    PositiveValue { agent: usize, chore: usize },
    #[error("value of agent {agent} for chore {chore} is zero")]
    ZeroValue { agent: usize, chore: usize },
    #[error("budget of agent {agent} is not strictly negative")]
    NonNegativeBudget { agent: usize },
    #[error("every chore has a zero value for some agent; nothing left to price")]
    NoCostlyChores,
    #[error("allocation is {rows}x{cols}, instance is {n}x{m}")]
    AllocationShape {
        rows: usize,
        cols: usize,
        n: usize,
        m: usize,
    },
    #[error("share of agent {agent} in chore {chore} is negative")]
    NegativeShare { agent: usize, chore: usize },
    #[error("shares of chore {chore} do not sum to one")]
    ColumnSum { chore: usize },
}

/// A validated chore division problem: every value and budget is strictly
/// negative. Agents index rows, chores index columns (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    values: Vec<Vec<Rational>>,
    budgets: Vec<Rational>,
}

impl Instance {
    /// Accepts only strictly negative values and budgets. Use
    /// [`validate_instance`] to strip chores that some agent does not mind.
    pub fn new(values: Vec<Vec<Rational>>, budgets: Vec<Rational>) -> Result<Self, ModelError> {
        check_shape(&values, &budgets)?;
        for (i, row) in values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_positive() {
                    return Err(ModelError::PositiveValue { agent: i, chore: j });
                }
                if v.is_zero() {
                    return Err(ModelError::ZeroValue { agent: i, chore: j });
                }
            }
        }
        check_budgets(&budgets)?;
        Ok(Instance { values, budgets })
    }

    /// Convenience constructor from integer values and budgets.
    pub fn from_ints(values: &[Vec<i64>], budgets: &[i64]) -> Result<Self, ModelError> {
        Instance::new(
            values.iter().map(|row| row.iter().map(|&v| int(v)).collect()).collect(),
            budgets.iter().map(|&b| int(b)).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.values[0].len()
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn budgets(&self) -> &[Rational] {
        &self.budgets
    }

    pub fn value(&self, agent: usize, chore: usize) -> &Rational {
        &self.values[agent][chore]
    }

    /// `|v[agent][chore]|`.
    pub fn disutility(&self, agent: usize, chore: usize) -> Rational {
        -&self.values[agent][chore]
    }

    /// Same values, different budgets.
    pub fn with_budgets(&self, budgets: Vec<Rational>) -> Result<Self, ModelError> {
        Instance::new(self.values.clone(), budgets)
    }

    /// Chores become agents and agents become chores. Budgets are not
    /// meaningful for the transposed problem and are all set to `-1`.
    pub fn transposed(&self) -> Instance {
        Instance {
            values: transpose(&self.values),
            budgets: vec![-Rational::one(); self.m()],
        }
    }
}

fn check_shape(values: &[Vec<Rational>], budgets: &[Rational]) -> Result<(), ModelError> {
    if values.is_empty() {
        return Err(ModelError::NoAgents);
    }
    let m = values[0].len();
    if m == 0 {
        return Err(ModelError::NoChores);
    }
    for (row, r) in values.iter().enumerate() {
        if r.len() != m {
            return Err(ModelError::RaggedValues {
                row,
                found: r.len(),
                expected: m,
            });
        }
    }
    if budgets.len() != values.len() {
        return Err(ModelError::BudgetCount {
            values: values.len(),
            budgets: budgets.len(),
        });
    }
    Ok(())
}

fn check_budgets(budgets: &[Rational]) -> Result<(), ModelError> {
    match budgets.iter().position(|b| !b.is_negative()) {
        Some(agent) => Err(ModelError::NonNegativeBudget { agent }),
        None => Ok(()),
    }
}

pub(crate) fn transpose(values: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let m = values.first().map_or(0, Vec::len);
    (0..m)
        .map(|j| values.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// A chore that some agent values at zero. It is handed to that agent at
/// price zero and removed from the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preassignment {
    pub chore: usize,
    pub agent: usize,
}

/// Result of [`validate_instance`]: the strictly negative residual market and
/// the chores taken out of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessed {
    pub instance: Instance,
    pub preassigned: Vec<Preassignment>,
    /// `chore_map[k]` is the original index of residual chore `k`.
    pub chore_map: Vec<usize>,
    /// Chore count of the raw input.
    pub original_m: usize,
}

impl Preprocessed {
    /// Lifts a residual allocation back to the original chore set; preassigned
    /// chores go wholly to their agent.
    pub fn expand_allocation(&self, z: &Allocation) -> Allocation {
        let n = self.instance.n();
        let mut shares = vec![vec![Rational::zero(); self.original_m]; n];
        for (k, &j) in self.chore_map.iter().enumerate() {
            for (i, row) in shares.iter_mut().enumerate() {
                row[j] = z.share(i, k).clone();
            }
        }
        for pre in &self.preassigned {
            shares[pre.agent][pre.chore] = Rational::one();
        }
        Allocation { shares }
    }

    /// Lifts residual prices; preassigned chores cost zero.
    pub fn expand_prices(&self, p: &[Rational]) -> PriceVector {
        let mut out = vec![Rational::zero(); self.original_m];
        for (k, &j) in self.chore_map.iter().enumerate() {
            out[j] = p[k].clone();
        }
        out
    }
}

/// Validates raw input and strips zero-valued chores.
///
/// Each chore `j` with `v[i][j] = 0` for some agent is preassigned to the
/// lowest such agent and priced at zero; the remaining chores form a market
/// where every value is strictly negative.
pub fn validate_instance(values: Vec<Vec<Rational>>, budgets: Vec<Rational>) -> Result<Preprocessed, ModelError> {
    check_shape(&values, &budgets)?;
    for (i, row) in values.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| v.is_positive()) {
            return Err(ModelError::PositiveValue { agent: i, chore: j });
        }
    }
    check_budgets(&budgets)?;

    let m = values[0].len();
    let mut preassigned = Vec::new();
    let mut chore_map = Vec::new();
    for j in 0..m {
        match values.iter().position(|row| row[j].is_zero()) {
            Some(agent) => preassigned.push(Preassignment { chore: j, agent }),
            None => chore_map.push(j),
        }
    }
    if chore_map.is_empty() {
        return Err(ModelError::NoCostlyChores);
    }
    let residual = values
        .iter()
        .map(|row| chore_map.iter().map(|&j| row[j].clone()).collect())
        .collect();
    Ok(Preprocessed {
        instance: Instance::new(residual, budgets)?,
        preassigned,
        chore_map,
        original_m: m,
    })
}

/// A feasible fractional allocation: nonnegative shares, every chore fully
/// distributed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    shares: Vec<Vec<Rational>>,
}

impl Allocation {
    pub fn new(shares: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        let n = shares.len();
        if n == 0 {
            return Err(ModelError::NoAgents);
        }
        let m = shares[0].len();
        if m == 0 {
            return Err(ModelError::NoChores);
        }
        for (row, r) in shares.iter().enumerate() {
            if r.len() != m {
                return Err(ModelError::RaggedValues {
                    row,
                    found: r.len(),
                    expected: m,
                });
            }
        }
        for (i, row) in shares.iter().enumerate() {
            if let Some(j) = row.iter().position(|s| s.is_negative()) {
                return Err(ModelError::NegativeShare { agent: i, chore: j });
            }
        }
        for j in 0..m {
            let total: Rational = shares.iter().map(|row| &row[j]).sum();
            if !total.is_one() {
                return Err(ModelError::ColumnSum { chore: j });
            }
        }
        Ok(Allocation { shares })
    }

    /// Checks the shape against an instance as well.
    pub fn for_instance(inst: &Instance, shares: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        let z = Allocation::new(shares)?;
        if z.n() != inst.n() || z.m() != inst.m() {
            return Err(ModelError::AllocationShape {
                rows: z.n(),
                cols: z.m(),
                n: inst.n(),
                m: inst.m(),
            });
        }
        Ok(z)
    }

    pub fn from_ratios(shares: &[Vec<(i64, i64)>]) -> Result<Self, ModelError> {
        Allocation::new(
            shares
                .iter()
                .map(|row| row.iter().map(|&(a, b)| ratio(a, b)).collect())
                .collect(),
        )
    }

    /// Every chore goes to the agent named in `owner`.
    pub fn integral(n: usize, owner: &[usize]) -> Allocation {
        let mut shares = vec![vec![Rational::zero(); owner.len()]; n];
        for (j, &i) in owner.iter().enumerate() {
            shares[i][j] = Rational::one();
        }
        Allocation { shares }
    }

    /// Caller guarantees feasibility.
    pub(crate) fn from_shares_unchecked(shares: Vec<Vec<Rational>>) -> Allocation {
        debug_assert!(Allocation::new(shares.clone()).is_ok());
        Allocation { shares }
    }

    pub fn n(&self) -> usize {
        self.shares.len()
    }

    pub fn m(&self) -> usize {
        self.shares[0].len()
    }

    pub fn share(&self, agent: usize, chore: usize) -> &Rational {
        &self.shares[agent][chore]
    }

    pub fn shares(&self) -> &[Vec<Rational>] {
        &self.shares
    }

    pub fn into_shares(self) -> Vec<Vec<Rational>> {
        self.shares
    }

    /// `alpha * self + (1 - alpha) * other`, for `alpha` in `[0, 1]`.
    pub fn mix(&self, other: &Allocation, alpha: &Rational) -> Allocation {
        let beta = Rational::one() - alpha;
        let shares = self
            .shares
            .iter()
            .zip(&other.shares)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| alpha * x + &beta * y).collect())
            .collect();
        Allocation::from_shares_unchecked(shares)
    }
}

/// `u[i] = sum_j v[i][j] * z[i][j]`.
pub fn utility_of(inst: &Instance, z: &Allocation) -> UtilityProfile {
    (0..inst.n())
        .map(|i| bundle_utility(inst, i, z.shares[i].iter()))
        .collect()
}

pub(crate) fn bundle_utility<'a>(
    inst: &Instance,
    agent: usize,
    shares: impl Iterator<Item = &'a Rational>,
) -> Rational {
    shares
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(j, s)| inst.value(agent, j) * s)
        .sum()
}

/// Edge `(i, j)` iff `z[i][j] > 0`.
pub fn consumption_graph(z: &Allocation) -> ConsumptionGraph {
    let mut g = ConsumptionGraph::empty(z.n(), z.m());
    for (i, row) in z.shares.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            if s.is_positive() {
                g.insert(i, j);
            }
        }
    }
    g
}
