use num_traits::{One, Zero};

use super::{FractionalMatrix, Mode};
use crate::error::{Error, Result};
use crate::model::Rational;

/// Original row of every (possibly split) working row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowSplitMap {
    pub origin: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoricalRun {
    /// Columns assigned to each original row.
    pub assignments: Vec<Vec<usize>>,
    pub splits: RowSplitMap,
    pub preprocessing_steps: usize,
    pub rounding_steps: usize,
    /// Initial fractional entries plus rows × (categories − 1).
    pub bound: usize,
    /// Fractional entries after each rounding step.
    pub fractional_trace: Vec<usize>,
}

struct Work {
    origin: Vec<usize>,
    target: Vec<i64>,
    entries: Vec<Vec<Rational>>,
    alive: Vec<bool>,
    col_alive: Vec<bool>,
    category_of: Vec<usize>,
    categories: usize,
    assignments: Vec<Vec<usize>>,
    original_targets: Vec<i64>,
}

fn pos(x: &Rational) -> bool {
    *x > Rational::zero()
}

impl Work {
    fn cat_sum(&self, r: usize, k: usize) -> Rational {
        (0..self.category_of.len()).filter(|&c| self.category_of[c] == k).map(|c| self.entries[r][c]).sum()
    }

    fn fractional(&self) -> usize {
        self.entries.iter().flatten().filter(|x| FractionalMatrix::is_fractional(x)).count()
    }

    fn live_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.entries.len()).filter(|&r| self.alive[r])
    }

    /// Split a row holding a full unit of one category (and more) into that
    /// category with target one and the rest with the remaining target.
    fn split(&mut self) -> bool {
        for r in self.live_rows().collect::<Vec<_>>() {
            if self.target[r] < 1 {
                continue;
            }
            for k in 0..self.categories {
                if self.cat_sum(r, k) != Rational::one() {
                    continue;
                }
                let outside = (0..self.category_of.len()).any(|c| self.category_of[c] != k && pos(&self.entries[r][c]));
                if !outside {
                    continue;
                }
                let mut row = vec![Rational::zero(); self.category_of.len()];
                for c in (0..row.len()).filter(|&c| self.category_of[c] == k) {
                    row[c] = std::mem::take(&mut self.entries[r][c]);
                }
                self.target[r] -= 1;
                self.entries.push(row);
                self.origin.push(self.origin[r]);
                self.target.push(1);
                self.alive.push(true);
                return true;
            }
        }
        false
    }

    /// Drop rows with nothing left to reach and columns nobody holds.
    fn remove(&mut self) -> bool {
        let done = self.live_rows().find(|&r| self.target[r] == 0);
        if let Some(r) = done {
            self.alive[r] = false;
            self.entries[r].iter_mut().for_each(|x| *x = Rational::zero());
            return true;
        }
        let cols = self.category_of.len();
        if let Some(c) = (0..cols).find(|&c| self.col_alive[c] && self.entries.iter().all(|row| row[c].is_zero())) {
            self.col_alive[c] = false;
            return true;
        }
        false
    }

    /// Give a column held by a single row entirely to that row.
    fn lone(&mut self) -> bool {
        for c in (0..self.category_of.len()).filter(|&c| self.col_alive[c]) {
            let holders: Vec<usize> = self.live_rows().filter(|&r| pos(&self.entries[r][c])).collect();
            if let [r] = holders[..] {
                if self.entries[r][c] < Rational::one() {
                    let k = self.category_of[c];
                    for d in 0..self.category_of.len() {
                        if self.category_of[d] == k {
                            self.entries[r][d] = Rational::zero();
                        }
                    }
                    self.entries[r][c] = Rational::one();
                    return true;
                }
            }
        }
        false
    }

    /// Assign an object held with weight one.
    fn assign(&mut self) -> bool {
        for r in self.live_rows().collect::<Vec<_>>() {
            if let Some(c) = (0..self.category_of.len()).find(|&c| self.entries[r][c].is_one()) {
                self.entries[r][c] = Rational::zero();
                self.target[r] -= 1;
                self.assignments[self.origin[r]].push(c);
                return true;
            }
        }
        false
    }

    fn violation(&self) -> Option<String> {
        let cols = self.category_of.len();
        for r in 0..self.entries.len() {
            if let Some(c) = (0..cols).find(|&c| self.entries[r][c] < Rational::zero() || self.entries[r][c] > Rational::one()) {
                return Some(format!("entry ({r},{c}) = {} outside [0,1]", self.entries[r][c]));
            }
            if !self.alive[r] {
                continue;
            }
            let sum: Rational = self.entries[r].iter().copied().sum();
            if sum < Rational::from_integer(self.target[r]) {
                return Some(format!("row {r} sums to {sum} below target {}", self.target[r]));
            }
            if let Some(k) = (0..self.categories).find(|&k| self.cat_sum(r, k) > Rational::one()) {
                return Some(format!("row {r} holds more than one unit of category {k}"));
            }
        }
        for c in 0..cols {
            let s: Rational = self.entries.iter().map(|row| row[c]).sum();
            if s > Rational::one() {
                return Some(format!("column {c} sums to {s} above one"));
            }
        }
        for o in 0..self.original_targets.len() {
            let rows: Vec<usize> = self.live_rows().filter(|&r| self.origin[r] == o).collect();
            let pending: i64 = rows.iter().map(|&r| self.target[r]).sum();
            if pending + self.assignments[o].len() as i64 != self.original_targets[o] {
                return Some(format!("targets of the rows of original row {o} no longer add up"));
            }
            for k in 0..self.categories {
                let assigned = self.assignments[o].iter().filter(|&&c| self.category_of[c] == k).count();
                let holding = rows.iter().filter(|&&r| self.cat_sum(r, k) > Rational::zero()).count();
                if assigned + holding > 1 {
                    return Some(format!("original row {o} is served twice in category {k}"));
                }
            }
        }
        None
    }

    /// An even cycle of positive entries alternating between shared columns
    /// and shared rows, found by walking in index order.
    fn cycle(&self) -> Option<Vec<(usize, usize)>> {
        let cols = self.category_of.len();
        let start = self.live_rows().find(|&r| self.entries[r].iter().any(pos))?;
        let first_col = |r: usize, skip: usize| (0..cols).find(|&c| c != skip && pos(&self.entries[r][c]));
        let mut rows = vec![start];
        let mut path_cols: Vec<usize> = Vec::new();
        let mut r = start;
        let mut c = first_col(start, usize::MAX)?;
        loop {
            let h = self.live_rows().find(|&h| h != r && pos(&self.entries[h][c]))?;
            path_cols.push(c);
            if let Some(p) = rows.iter().position(|&x| x == h) {
                let mut cycle = Vec::new();
                for t in p..path_cols.len() {
                    cycle.push((rows[t], path_cols[t]));
                    cycle.push((rows.get(t + 1).copied().unwrap_or(h), path_cols[t]));
                }
                return Some(cycle);
            }
            rows.push(h);
            let l = first_col(h, c)?;
            if let Some(p) = path_cols.iter().position(|&x| x == l) {
                let k = rows.len() - 1;
                let mut cycle = vec![(h, l)];
                for t in p + 1..=k {
                    cycle.push((rows[t], path_cols[t - 1]));
                    if t < k {
                        cycle.push((rows[t], path_cols[t]));
                    }
                }
                return Some(cycle);
            }
            r = h;
            c = l;
        }
    }

    /// Largest shift keeping entries in `[0,1]` and every (row, category)
    /// total at most one.
    fn epsilon(&self, cycle: &[(usize, usize)]) -> Rational {
        let mut eps = cycle
            .iter()
            .enumerate()
            .map(|(k, &(r, c))| if k % 2 == 0 { Rational::one() - self.entries[r][c] } else { self.entries[r][c] })
            .min()
            .expect("nonempty cycle");
        // In each row the cycle gains at its even entry and loses at its odd one.
        for (k, &(r, c)) in cycle.iter().enumerate().filter(|(k, _)| k % 2 == 0) {
            let partner = cycle.iter().enumerate().find(|(q, &(r2, _))| q % 2 == 1 && r2 == r && *q != k);
            if let Some((_, &(_, c2))) = partner {
                let (up, down) = (self.category_of[c], self.category_of[c2]);
                if up != down {
                    eps = eps.min(Rational::one() - self.cat_sum(r, up));
                }
            }
        }
        eps
    }
}

/// Rounds a categorical matrix into an allocation: preprocessing moves
/// (split, remove, lone column, assign; in that priority, rescanning after
/// each change) alternate with shifts around alternating cycles.
pub fn round_categorical(m: &FractionalMatrix) -> Result<CategoricalRun> {
    m.check_shape()?;
    if m.mode != Mode::Categorical {
        return Err(Error::Input("matrix is not in categorical mode".into()));
    }
    let category_of = m.category_of()?;
    if let Some(v) = m.categorical_violation() {
        return Err(Error::Precondition(format!("input matrix: {v}")));
    }
    let rows = m.rows.len();
    let mut w = Work {
        origin: (0..rows).collect(),
        target: m.targets.clone(),
        entries: m.entries.clone(),
        alive: vec![true; rows],
        col_alive: vec![true; m.columns.len()],
        category_of,
        categories: m.categories.len(),
        assignments: vec![Vec::new(); rows],
        original_targets: m.targets.clone(),
    };
    let initial = w.fractional();
    let bound = initial + rows * m.categories.len().saturating_sub(1);
    let limit = 4 * (bound + rows + m.columns.len()) + 16;
    let mut preprocessing_steps = 0;
    let mut rounding_steps = 0;
    let mut fractional_trace = Vec::new();
    let fail = |pass: usize, what: String, w: &Work| {
        Error::Invariant(format!("categorical rounding, pass {pass}: {what} (entries {:?})", w.entries))
    };
    loop {
        loop {
            let before = w.fractional();
            let changed = w.split() || w.remove() || w.lone() || w.assign();
            if !changed {
                break;
            }
            preprocessing_steps += 1;
            if w.fractional() > before {
                return Err(fail(rounding_steps, "preprocessing increased the fractional count".into(), &w));
            }
            if let Some(v) = w.violation() {
                return Err(fail(rounding_steps, v, &w));
            }
        }
        if w.live_rows().next().is_none() {
            break;
        }
        if rounding_steps >= limit {
            return Err(fail(rounding_steps, "no termination".into(), &w));
        }
        let cycle = w.cycle().ok_or_else(|| fail(rounding_steps, "no alternating cycle".into(), &w))?;
        let eps = w.epsilon(&cycle);
        if eps <= Rational::zero() {
            return Err(fail(rounding_steps, "cycle admits no positive shift".into(), &w));
        }
        for (k, &(r, c)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                w.entries[r][c] += eps;
            } else {
                w.entries[r][c] -= eps;
            }
        }
        rounding_steps += 1;
        fractional_trace.push(w.fractional());
        if let Some(v) = w.violation() {
            return Err(fail(rounding_steps, v, &w));
        }
    }
    for (o, cols) in w.assignments.iter_mut().enumerate() {
        if (cols.len() as i64) < m.targets[o] {
            return Err(Error::Invariant(format!("row {o} received {} objects, target {}", cols.len(), m.targets[o])));
        }
        cols.sort_unstable();
    }
    Ok(CategoricalRun {
        assignments: w.assignments,
        splits: RowSplitMap { origin: w.origin },
        preprocessing_steps,
        rounding_steps,
        bound,
        fractional_trace,
    })
}
