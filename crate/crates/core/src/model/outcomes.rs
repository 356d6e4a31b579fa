use std::collections::HashMap;
use std::ops::ControlFlow;

use super::{Bundle, Coalition, Economy, ExtValue};
use crate::error::{Error, Result};

/// Default cap on enumeration steps.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Upper bound on enumeration work; exceeding it is a size refusal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn check(self, what: impl Into<String>, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::Budget { what: what.into(), needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Number of S-allocations of a coalition: `(|S|+1)^|pool|`.
pub fn s_allocation_count(e: &Economy, s: Coalition) -> u128 {
    let base = s.len() as u128 + 1;
    let pool = e.pool(s).len() as u32;
    base.checked_pow(pool).unwrap_or(u128::MAX)
}

/// Calls `f` with every S-allocation of `s`, bundles aligned with `s.members()`.
///
/// Objects of the pool are assigned to a member or to nobody; the first pool
/// object varies fastest, and "nobody" comes before any member.
pub fn for_each_s_allocation<F>(e: &Economy, s: Coalition, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[Bundle]) -> ControlFlow<()>,
{
    let k = s.len();
    let pool: Vec<usize> = e.pool(s).iter().collect();
    let mut digits = vec![0usize; pool.len()];
    let mut bundles = vec![Bundle::EMPTY; k];
    loop {
        f(&bundles)?;
        let mut l = 0;
        loop {
            if l == pool.len() {
                return ControlFlow::Continue(());
            }
            let o = pool[l];
            if digits[l] > 0 {
                bundles[digits[l] - 1] = bundles[digits[l] - 1].without(o);
            }
            digits[l] += 1;
            if digits[l] <= k {
                bundles[digits[l] - 1] = bundles[digits[l] - 1].with(o);
                break;
            }
            digits[l] = 0;
            l += 1;
        }
    }
}

/// Distinct utility vectors reachable by one coalition, each with the first
/// S-allocation (in enumeration order) that attains it.
#[derive(Clone, Debug)]
pub struct CoalitionOutcomes {
    pub coalition: Coalition,
    /// Distinct vectors over `coalition.members()`, in order of first appearance.
    pub vectors: Vec<Vec<ExtValue>>,
    pub witnesses: Vec<Vec<Bundle>>,
    /// Indices into `vectors` of the Pareto-maximal ones, ascending.
    pub frontier: Vec<usize>,
}

impl CoalitionOutcomes {
    pub fn compute(e: &Economy, s: Coalition, budget: Budget) -> Result<Self> {
        budget.check(format!("S-allocations of coalition {s}"), s_allocation_count(e, s))?;
        let members = s.members();
        let mut index: HashMap<Vec<ExtValue>, usize> = HashMap::new();
        let mut vectors = Vec::new();
        let mut witnesses = Vec::new();
        let mut scratch = Vec::with_capacity(members.len());
        let _ = for_each_s_allocation(e, s, |bundles| {
            scratch.clear();
            scratch.extend(members.iter().zip(bundles).map(|(&i, &b)| e.value(i, b)));
            if !index.contains_key(&scratch) {
                index.insert(scratch.clone(), vectors.len());
                vectors.push(scratch.clone());
                witnesses.push(bundles.to_vec());
            }
            ControlFlow::Continue(())
        });
        let frontier = pareto_indices(&vectors);
        Ok(CoalitionOutcomes { coalition: s, vectors, witnesses, frontier })
    }

    pub fn frontier_vectors(&self) -> impl Iterator<Item = &Vec<ExtValue>> {
        self.frontier.iter().map(move |&k| &self.vectors[k])
    }
}

/// `a >= b` coordinatewise with at least one strict coordinate.
pub fn dominates<T: PartialOrd>(a: &[T], b: &[T]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Indices of the Pareto-maximal vectors among distinct `vectors`, ascending.
pub fn pareto_indices<T: Ord>(vectors: &[Vec<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    // A dominating vector is lexicographically larger, so it is seen first.
    order.sort_by(|&a, &b| vectors[b].cmp(&vectors[a]));
    let mut kept: Vec<usize> = Vec::new();
    for k in order {
        if !kept.iter().any(|&q| dominates(&vectors[q], &vectors[k]) || vectors[q] == vectors[k]) {
            kept.push(k);
        }
    }
    kept.sort_unstable();
    kept
}

/// Pareto filter returning the surviving vectors themselves (deduplicated).
pub fn pareto_filter<T: Ord + Clone>(vectors: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let keep = pareto_indices(&vectors);
    keep.into_iter().map(|k| vectors[k].clone()).collect()
}
