use num_traits::{One, Zero};

use super::{FractionalMatrix, Mode};
use crate::error::{Error, Result};
use crate::model::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    /// A fractional entry alone in its column raised to one.
    Raise,
    /// Mass moved within a column from a row that already has enough ones.
    Shift,
    /// Alternating shift around an even row/column cycle.
    Cycle,
    /// Every row meets its target with ones; leftover fractions dropped.
    Cleanup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomousPass {
    pub kind: MoveKind,
    pub epsilon: Rational,
    /// Fractional entries remaining after the pass.
    pub fractional: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomousRun {
    pub matrix: FractionalMatrix,
    pub initial_fractional: usize,
    pub passes: Vec<DichotomousPass>,
}

fn frac(x: &Rational) -> bool {
    FractionalMatrix::is_fractional(x)
}

fn first_fractional(m: &FractionalMatrix, r: usize, skip: Option<usize>) -> Option<usize> {
    (0..m.columns.len()).find(|&c| Some(c) != skip && frac(&m.entries[r][c]))
}

/// Applies `+ε` to even positions and `-ε` to odd positions of an
/// alternating cycle, with the largest `ε` keeping every entry in `[0,1]`.
fn shift_cycle(m: &mut FractionalMatrix, cycle: &[(usize, usize)]) -> Rational {
    let eps = cycle
        .iter()
        .enumerate()
        .map(|(k, &(r, c))| if k % 2 == 0 { Rational::one() - m.entries[r][c] } else { m.entries[r][c] })
        .min()
        .expect("nonempty cycle");
    for (k, &(r, c)) in cycle.iter().enumerate() {
        if k % 2 == 0 {
            m.entries[r][c] += eps;
        } else {
            m.entries[r][c] -= eps;
        }
    }
    eps
}

/// One improving move starting from a row with fewer ones than its target.
fn step(m: &mut FractionalMatrix, start: usize) -> Result<(MoveKind, Rational)> {
    let n = m.rows.len();
    let mut rows = vec![start];
    let mut cols: Vec<usize> = Vec::new();
    let mut r = start;
    let mut c = first_fractional(m, start, None)
        .ok_or_else(|| Error::Invariant(format!("row {start} is below target with no fractional entry")))?;
    loop {
        let Some(h) = (0..n).find(|&h| h != r && m.entries[h][c] > Rational::zero()) else {
            m.entries[r][c] = Rational::one();
            return Ok((MoveKind::Raise, Rational::zero()));
        };
        cols.push(c);
        if m.ones(h) >= m.targets[h] {
            let eps = shift_cycle(m, &[(r, c), (h, c)]);
            return Ok((MoveKind::Shift, eps));
        }
        // rows[t] and cols[t] give the entries (rows[t], cols[t]) and (rows[t+1], cols[t]).
        if let Some(p) = rows.iter().position(|&x| x == h) {
            let mut cycle = Vec::new();
            for t in p..cols.len() {
                cycle.push((rows[t], cols[t]));
                cycle.push((rows.get(t + 1).copied().unwrap_or(h), cols[t]));
            }
            let eps = shift_cycle(m, &cycle);
            return Ok((MoveKind::Cycle, eps));
        }
        rows.push(h);
        let l = first_fractional(m, h, Some(c))
            .ok_or_else(|| Error::Invariant(format!("row {h} is below target with one fractional entry")))?;
        if let Some(p) = cols.iter().position(|&x| x == l) {
            let k = rows.len() - 1;
            let mut cycle = vec![(h, l)];
            for t in p + 1..=k {
                cycle.push((rows[t], cols[t - 1]));
                if t < k {
                    cycle.push((rows[t], cols[t]));
                }
            }
            let eps = shift_cycle(m, &cycle);
            return Ok((MoveKind::Cycle, eps));
        }
        r = h;
        c = l;
    }
}

/// Rounds a matrix whose rows sum to at least their targets and whose columns
/// sum to at most one into a 0/1 matrix with at least `t_i` ones in row `i`.
///
/// Every pass removes at least one fractional entry; the invariants are
/// re-checked after each pass.
pub fn round_dichotomous(m: &FractionalMatrix) -> Result<DichotomousRun> {
    m.check_shape()?;
    if m.mode != Mode::Dichotomous {
        return Err(Error::Input("matrix is not in dichotomous mode".into()));
    }
    if let Some(v) = m.dichotomous_violation() {
        return Err(Error::Precondition(format!("input matrix: {v}")));
    }
    let mut b = m.clone();
    let initial = b.fractional_count();
    let mut passes = Vec::new();
    let mut before = initial;
    loop {
        let deficient = (0..b.rows.len()).find(|&r| b.ones(r) < b.targets[r]);
        let (kind, epsilon) = match deficient {
            Some(r) => step(&mut b, r)?,
            None if before > 0 => {
                for x in b.entries.iter_mut().flatten() {
                    if frac(x) {
                        *x = Rational::zero();
                    }
                }
                (MoveKind::Cleanup, Rational::zero())
            }
            None => break,
        };
        let after = b.fractional_count();
        let snapshot = |what: String| Error::Invariant(format!("pass {}: {what}\n{b}", passes.len() + 1));
        if after >= before {
            return Err(snapshot(format!("fractional entries went from {before} to {after}")));
        }
        if let Some(v) = b.dichotomous_violation() {
            return Err(snapshot(v));
        }
        passes.push(DichotomousPass { kind, epsilon, fractional: after });
        before = after;
    }
    Ok(DichotomousRun { matrix: b, initial_fractional: initial, passes })
}
