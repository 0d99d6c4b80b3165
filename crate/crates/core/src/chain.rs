//! Finite Markov chains: validation, admissibility, stationary distribution,
//! hitting times and commute times.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_within, Condition, Error, Result};
use crate::tolerance::{TOL_SOLVE, TOL_STOCH};

/// A validated, loop-free, row-stochastic transition matrix over labelled
/// states.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    states: Vec<String>,
    p: DMatrix<f64>,
}

impl MarkovChain {
    /// Validates `p` against the chain contract.
    ///
    /// Rows whose sums are within `TOL_STOCH` of one are renormalized; rows
    /// further away are rejected rather than silently rescaled.
    pub fn new(states: Vec<String>, p: DMatrix<f64>) -> Result<Self> {
        let n = states.len();
        if p.nrows() != p.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "transition matrix is {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        if p.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} state labels for a {}x{} matrix",
                n,
                p.nrows(),
                p.ncols()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for label in &states {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateState(label.clone()));
            }
        }
        for row in 0..n {
            for col in 0..n {
                let value = p[(row, col)];
                if !value.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
                if value < 0.0 {
                    return Err(Error::NegativeEntry { row, col, value });
                }
            }
        }
        for state in 0..n {
            let value = p[(state, state)];
            if value != 0.0 {
                return Err(Error::SelfLoop { state, value });
            }
        }
        let mut p = p;
        for row in 0..n {
            let sum: f64 = p.row(row).iter().sum();
            if (sum - 1.0).abs() >= TOL_STOCH {
                return Err(Error::NonStochasticRow { row, sum });
            }
            if sum != 1.0 {
                p.row_mut(row).unscale_mut(sum);
            }
        }
        if n < 3 {
            return Err(Error::TooSmall(n));
        }
        Ok(MarkovChain { states, p })
    }

    /// Builds a chain with labels `"1"`, `"2"`, ... .
    pub fn with_default_labels(p: DMatrix<f64>) -> Result<Self> {
        let states = (1..=p.nrows()).map(|i| i.to_string()).collect();
        Self::new(states, p)
    }

    pub fn from_rows<L: Into<String>>(states: Vec<L>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {} rows",
                bad.len(),
                n
            )));
        }
        let p = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(states.into_iter().map(Into::into).collect(), p)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn transition_matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownState(label.to_owned()))
    }

    /// Relabels the chain so that new state `i` is old state `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let states = perm.iter().map(|&i| self.states[i].clone()).collect();
        let p = DMatrix::from_fn(n, n, |i, j| self.p[(perm[i], perm[j])]);
        Ok(MarkovChain { states, p })
    }

    /// Whether the directed support graph of P is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let forward = self.reachable_from(0, |i, j| self.p[(i, j)] > 0.0);
        let backward = self.reachable_from(0, |i, j| self.p[(j, i)] > 0.0);
        forward == self.len() && backward == self.len()
    }

    /// Whether the undirected support graph contains an odd cycle.
    ///
    /// For reversible loop-free chains the period is 1 or 2, and it is 2
    /// exactly when this graph is bipartite.
    pub fn has_odd_cycle(&self) -> bool {
        let n = self.len();
        let mut color: Vec<Option<bool>> = vec![None; n];
        let mut queue = VecDeque::new();
        for root in 0..n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for v in 0..n {
                    if v == u || (self.p[(u, v)] <= 0.0 && self.p[(v, u)] <= 0.0) {
                        continue;
                    }
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return true,
                        Some(_) => {}
                    }
                }
            }
        }
        false
    }

    fn reachable_from(&self, start: usize, edge: impl Fn(usize, usize) -> bool) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && edge(u, v) {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    }
}

/// Per-condition verdict for the assumptions the embedding requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub irreducible: bool,
    pub aperiodic: bool,
    pub reversible: bool,
    pub loop_free: bool,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<Condition> {
        [
            (self.irreducible, Condition::Irreducible),
            (self.aperiodic, Condition::Aperiodic),
            (self.reversible, Condition::Reversible),
            (self.loop_free, Condition::LoopFree),
        ]
        .into_iter()
        .find_map(|(ok, cond)| (!ok).then_some(cond))
    }
}

/// Largest detailed-balance violation `|π(x)P_xy − π(y)P_yx|` and where it
/// occurs.
pub fn detailed_balance_defect(chain: &MarkovChain, pi: &StationaryDistribution) -> (f64, usize, usize) {
    let p = chain.transition_matrix();
    let pi = pi.as_vector();
    let n = chain.len();
    let mut worst = (0.0, 0, 0);
    for x in 0..n {
        for y in (x + 1)..n {
            let d = (pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs();
            if d > worst.0 {
                worst = (d, x, y);
            }
        }
    }
    worst
}

pub fn check_admissible(chain: &MarkovChain, pi: &StationaryDistribution) -> Admissibility {
    Admissibility {
        irreducible: chain.is_irreducible(),
        aperiodic: chain.has_odd_cycle(),
        reversible: detailed_balance_defect(chain, pi).0 < TOL_SOLVE,
        loop_free: chain.transition_matrix().diagonal().iter().all(|&d| d == 0.0),
    }
}

/// Checks every condition, computing π along the way when the chain is
/// irreducible. Reducible chains get `reversible = false` since π is not
/// unique.
pub fn assess(chain: &MarkovChain) -> (Admissibility, Option<StationaryDistribution>) {
    match stationary_distribution(chain) {
        Ok(pi) => (check_admissible(chain, &pi), Some(pi)),
        Err(_) => (
            Admissibility {
                irreducible: chain.is_irreducible(),
                aperiodic: chain.has_odd_cycle(),
                reversible: false,
                loop_free: true,
            },
            None,
        ),
    }
}

/// Positive unit-sum probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pi: DVector<f64>,
}

impl StationaryDistribution {
    pub fn new(pi: DVector<f64>) -> Result<Self> {
        if let Some(bad) = pi.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "stationary probabilities must be positive, found {bad}"
            )));
        }
        let sum = pi.sum();
        if (sum - 1.0).abs() >= TOL_SOLVE {
            return Err(Error::NotUnitSum(sum));
        }
        Ok(StationaryDistribution { pi })
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.pi.iter().copied().collect()
    }
}

impl std::ops::Index<usize> for StationaryDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.pi[i]
    }
}

/// Null vector of `Pᵀ − I`, found by SVD and normalized to unit sum.
pub fn stationary_distribution(chain: &MarkovChain) -> Result<StationaryDistribution> {
    if !chain.is_irreducible() {
        return Err(Error::Reducible);
    }
    let n = chain.len();
    let p = chain.transition_matrix();
    let a = p.transpose() - DMatrix::<f64>::identity(n, n);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma = &svd.singular_values;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[i].total_cmp(&sigma[j]));
    let sigma_max = sigma[order[n - 1]];
    let cutoff = n as f64 * f64::EPSILON * sigma_max.max(1.0);
    if sigma[order[1]] <= cutoff {
        return Err(Error::Reducible);
    }

    let null = v_t.row(order[0]).transpose();
    let sum = null.sum();
    let pi = null / sum;
    if pi.iter().any(|&v| v <= 0.0) {
        return Err(Error::Reducible);
    }
    let pi = StationaryDistribution::new(pi)?;
    let drift = (p.tr_mul(pi.as_vector()) - pi.as_vector()).amax();
    ensure_within("stationary fixed-point residual", drift, TOL_SOLVE)?;
    Ok(pi)
}

/// Expected first-arrival times, `h[(t, x)]` from `t` to `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeMatrix {
    h: DMatrix<f64>,
    residual: f64,
}

impl HittingTimeMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Largest first-step recursion residual over `t ≠ x`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn len(&self) -> usize {
        self.h.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Largest `|h_tx − Σ_z P_tz (1 + h_zx)|` over `t ≠ x`.
pub fn recursion_residual(p: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    let n = p.nrows();
    let ph = p * h;
    let mut worst: f64 = 0.0;
    for t in 0..n {
        for x in 0..n {
            if t != x {
                worst = worst.max((h[(t, x)] - 1.0 - ph[(t, x)]).abs());
            }
        }
    }
    worst
}

/// Hitting times from the pseudoinverse: column `x` solves `L h_x = π − δ_x`,
/// so `h_x = L†(π − δ_x)` shifted to vanish at `x`.
pub fn hitting_times(
    chain: &MarkovChain,
    pi: &StationaryDistribution,
    l_dagger: &DMatrix<f64>,
) -> Result<HittingTimeMatrix> {
    let n = chain.len();
    if pi.len() != n || l_dagger.nrows() != n || l_dagger.ncols() != n {
        return Err(Error::InconsistentInputs(format!(
            "chain has {n} states, pi has {}, pseudoinverse is {}x{}",
            pi.len(),
            l_dagger.nrows(),
            l_dagger.ncols()
        )));
    }
    let l_pi = l_dagger * pi.as_vector();
    let mut h = DMatrix::from_fn(n, n, |t, x| l_pi[t] - l_dagger[(t, x)]);
    for x in 0..n {
        let base = h[(x, x)];
        h.column_mut(x).add_scalar_mut(-base);
        h[(x, x)] = 0.0;
    }
    for t in 0..n {
        for x in 0..n {
            if t != x && !(h[(t, x)] > 0.0) {
                return Err(Error::ToleranceViolation {
                    check: "hitting time positivity",
                    value: h[(t, x)],
                    tolerance: 0.0,
                });
            }
        }
    }
    let residual = recursion_residual(chain.transition_matrix(), &h);
    ensure_within("hitting-time recursion residual", residual, TOL_SOLVE)?;
    Ok(HittingTimeMatrix { h, residual })
}

/// Symmetric commute times `c_xy = h_xy + h_yx`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommuteTimeMatrix {
    c: DMatrix<f64>,
}

impl CommuteTimeMatrix {
    /// Wraps a symmetric zero-diagonal matrix.
    pub fn new(c: DMatrix<f64>) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "commute-time matrix is {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        if c != c.transpose() {
            return Err(Error::InvalidArgument("commute-time matrix is not symmetric".into()));
        }
        if c.diagonal().iter().any(|&d| d != 0.0) {
            return Err(Error::InvalidArgument("commute-time matrix has a nonzero diagonal".into()));
        }
        Ok(CommuteTimeMatrix { c })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Returns `t·C`.
    pub fn scaled(&self, t: f64) -> Self {
        CommuteTimeMatrix { c: &self.c * t }
    }
}

pub fn commute_times(h: &HittingTimeMatrix) -> CommuteTimeMatrix {
    CommuteTimeMatrix {
        c: &h.h + h.h.transpose(),
    }
}
