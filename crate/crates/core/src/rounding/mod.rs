//! Fractional assignment matrices built from balanced collections of
//! coalitions, and the two procedures that round them to integral
//! allocations meeting per-agent targets.

mod categorical;
mod dichotomous;

use std::fmt;
use std::ops::ControlFlow;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::outcomes::for_each_s_allocation;
use crate::model::{Allocation, Budget, Bundle, Coalition, Economy, ExtValue, Rational, Utility};
use crate::oracle::BalancedCollection;

pub use categorical::{round_categorical, CategoricalRun, RowSplitMap};
pub use dichotomous::{round_dichotomous, DichotomousPass, DichotomousRun, MoveKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Rows sum to at least their targets, columns to at most one.
    Dichotomous,
    /// At most one unit per (row, category); rows sum to at least their
    /// targets, columns to at most one.
    Categorical,
}

/// An agents-by-objects matrix with exact rational entries and integer row
/// targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalMatrix {
    pub mode: Mode,
    /// Agent id of each row.
    pub rows: Vec<String>,
    /// Object id of each column.
    pub columns: Vec<String>,
    pub targets: Vec<i64>,
    pub entries: Vec<Vec<Rational>>,
    /// Category names and their column indices (categorical mode).
    pub categories: Vec<(String, Vec<usize>)>,
}

impl FractionalMatrix {
    pub fn is_fractional(r: &Rational) -> bool {
        *r > Rational::zero() && *r < Rational::one()
    }

    pub fn fractional_count(&self) -> usize {
        self.entries.iter().flatten().filter(|r| Self::is_fractional(r)).count()
    }

    pub fn is_integral(&self) -> bool {
        self.fractional_count() == 0
    }

    pub fn row_sum(&self, r: usize) -> Rational {
        self.entries[r].iter().copied().sum()
    }

    pub fn col_sum(&self, c: usize) -> Rational {
        self.entries.iter().map(|row| row[c]).sum()
    }

    pub fn ones(&self, r: usize) -> i64 {
        self.entries[r].iter().filter(|x| x.is_one()).count() as i64
    }

    /// Category index of each column (categorical mode).
    pub fn category_of(&self) -> Result<Vec<usize>> {
        let mut of = vec![usize::MAX; self.columns.len()];
        for (k, (_, cols)) in self.categories.iter().enumerate() {
            for &c in cols {
                if c >= of.len() || of[c] != usize::MAX {
                    return Err(Error::Input("categories do not partition the matrix columns".into()));
                }
                of[c] = k;
            }
        }
        if of.contains(&usize::MAX) {
            return Err(Error::Input("categories do not partition the matrix columns".into()));
        }
        Ok(of)
    }

    fn check_shape(&self) -> Result<()> {
        let m = self.columns.len();
        if self.targets.len() != self.rows.len() || self.entries.len() != self.rows.len() {
            return Err(Error::Input("matrix rows, targets and entries differ in length".into()));
        }
        if self.entries.iter().any(|r| r.len() != m) {
            return Err(Error::Input(format!("every matrix row needs {m} entries")));
        }
        if self.targets.iter().any(|&t| t < 0) {
            return Err(Error::Input("targets must be nonnegative".into()));
        }
        Ok(())
    }

    /// Entries in `[0,1]`, row sums at least the targets, column sums at most one.
    pub fn dichotomous_violation(&self) -> Option<String> {
        for (r, row) in self.entries.iter().enumerate() {
            if let Some(c) = row.iter().position(|x| *x < Rational::zero() || *x > Rational::one()) {
                return Some(format!("entry ({r},{c}) = {} outside [0,1]", row[c]));
            }
            if self.row_sum(r) < Rational::from_integer(self.targets[r]) {
                return Some(format!("row {r} sums to {} below target {}", self.row_sum(r), self.targets[r]));
            }
        }
        (0..self.columns.len())
            .find(|&c| self.col_sum(c) > Rational::one())
            .map(|c| format!("column {c} sums to {} above one", self.col_sum(c)))
    }

    /// The dichotomous conditions plus at most one unit per (row, category).
    pub fn categorical_violation(&self) -> Option<String> {
        if let Some(v) = self.dichotomous_violation() {
            return Some(v);
        }
        for (r, row) in self.entries.iter().enumerate() {
            for (name, cols) in &self.categories {
                let s: Rational = cols.iter().map(|&c| row[c]).sum();
                if s > Rational::one() {
                    return Some(format!("row {r} holds {s} of category {name}"));
                }
            }
        }
        None
    }

    /// Columns holding a one in each row (for an integral matrix).
    pub fn assigned_columns(&self) -> Vec<Vec<usize>> {
        self.entries.iter().map(|row| (0..row.len()).filter(|&c| row[c].is_one()).collect()).collect()
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> i64 {
        self.entries.iter().flatten().fold(1, |acc, r| acc.lcm(r.denom()))
    }
}

impl fmt::Display for FractionalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "      ")?;
        for c in &self.columns {
            write!(f, " {c:>6}")?;
        }
        writeln!(f, "  | target")?;
        for (r, row) in self.entries.iter().enumerate() {
            write!(f, "{:>6}", self.rows[r])?;
            for x in row {
                write!(f, " {:>6}", x.to_string())?;
            }
            writeln!(f, "  | {}", self.targets[r])?;
        }
        Ok(())
    }
}

/// `t_i = ⌈u_i⌉`.
pub fn targets_from_profile(u: &[ExtValue]) -> Result<Vec<i64>> {
    u.iter()
        .map(|v| match v {
            ExtValue::Finite(r) => Ok(r.ceil().to_integer()),
            ExtValue::NegInf => Err(Error::Input("cannot take the ceiling of -inf".into())),
        })
        .collect()
}

/// Objects agent `i` values positively, for dichotomous and 0/1 categorical
/// utilities.
fn acceptable(e: &Economy, i: usize) -> Result<Bundle> {
    match e.utility(i) {
        Utility::Dichotomous { good } => Ok(*good),
        Utility::Categorical { values, .. } => {
            let mut b = Bundle::EMPTY;
            for (o, v) in values.iter().enumerate() {
                if *v == Rational::one() {
                    b = b.with(o);
                } else if !v.is_zero() {
                    return Err(Error::Precondition(format!(
                        "agent {} values object {} at {v}; rounding needs 0/1 values",
                        e.agents()[i],
                        e.objects()[o]
                    )));
                }
            }
            Ok(b)
        }
        u => Err(Error::Precondition(format!(
            "agent {} has a {} utility; rounding needs dichotomous or categorical utilities",
            e.agents()[i],
            u.kind()
        ))),
    }
}

/// Matrix mode matching the economy's utilities.
pub fn mode_of(e: &Economy) -> Result<Mode> {
    let all = |f: fn(&Utility) -> bool| e.utilities().iter().all(f);
    if all(|u| matches!(u, Utility::Dichotomous { .. })) {
        Ok(Mode::Dichotomous)
    } else if all(|u| matches!(u, Utility::Categorical { .. })) {
        Ok(Mode::Categorical)
    } else {
        Err(Error::Precondition("rounding needs all-dichotomous or all-categorical utilities".into()))
    }
}

fn economy_categories(e: &Economy) -> Vec<(String, Vec<usize>)> {
    if let Some(cats) = e.categories() {
        return cats.iter().map(|(name, b)| (name.clone(), b.iter().collect())).collect();
    }
    match e.utilities().first() {
        Some(Utility::Categorical { categories, .. }) => {
            categories.iter().enumerate().map(|(k, b)| (format!("c{}", k + 1), b.iter().collect())).collect()
        }
        _ => Vec::new(),
    }
}

/// First S-allocation (in enumeration order) giving every member at least
/// its target.
pub fn find_witness(e: &Economy, s: Coalition, targets: &[i64], budget: Budget) -> Result<Option<Vec<Bundle>>> {
    budget.check(format!("S-allocations of coalition {s}"), crate::model::outcomes::s_allocation_count(e, s))?;
    let members = s.members();
    let mut found = None;
    let _ = for_each_s_allocation(e, s, |b| {
        if members.iter().zip(b).all(|(&i, &x)| e.value(i, x) >= ExtValue::int(targets[i])) {
            found = Some(b.to_vec());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(found)
}

/// `P = Σ δ_S P_S`, where `P_S` marks the acceptable objects each member
/// receives in the witness S-allocation.
///
/// Unacceptable objects are dropped from witnesses first; this keeps each
/// member's utility and leaves positive entries only where they count.
pub fn build_matrix(
    e: &Economy,
    bc: &BalancedCollection,
    witnesses: &[Vec<Bundle>],
    targets: &[i64],
) -> Result<FractionalMatrix> {
    let mode = mode_of(e)?;
    let n = e.num_agents();
    let m = e.num_objects();
    if targets.len() != n || witnesses.len() != bc.coalitions.len() {
        return Err(Error::Input("targets or witnesses do not match the economy and collection".into()));
    }
    let accept: Vec<Bundle> = (0..n).map(|i| acceptable(e, i)).collect::<Result<_>>()?;
    let mut entries = vec![vec![Rational::zero(); m]; n];
    for ((s, w), bundles) in bc.coalitions.iter().zip(&bc.weights).zip(witnesses) {
        if !e.is_s_allocation(*s, bundles) {
            return Err(Error::Input(format!("witness for coalition {s} is not an S-allocation")));
        }
        for (&i, x) in s.members().iter().zip(bundles) {
            if e.value(i, *x) < ExtValue::int(targets[i]) {
                return Err(Error::WitnessBelowTarget { coalition: *s, agent: i });
            }
            for o in x.intersection(accept[i]).iter() {
                entries[i][o] += *w;
            }
        }
    }
    let categories = if mode == Mode::Categorical { economy_categories(e) } else { Vec::new() };
    Ok(FractionalMatrix {
        mode,
        rows: e.agents().to_vec(),
        columns: e.objects().to_vec(),
        targets: targets.to_vec(),
        entries,
        categories,
    })
}

/// Allocation from per-agent column lists of a matrix built on `e`.
pub fn allocation_from_columns(e: &Economy, per_agent: &[Vec<usize>]) -> Allocation {
    let mut bundles = vec![Bundle::EMPTY; e.num_agents()];
    for (i, cols) in per_agent.iter().enumerate() {
        bundles[i] = Bundle::from_indices(cols.iter().copied());
    }
    Allocation(bundles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::minimal_balanced_collections;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn targets_are_ceilings() {
        let u = vec![ExtValue::ratio(1, 2), ExtValue::int(2)];
        assert_eq!(targets_from_profile(&u).unwrap(), vec![1, 2]);
        assert!(targets_from_profile(&[ExtValue::NegInf]).is_err());
    }

    /// Three agents each owning one object and accepting both others'.
    pub(super) fn triangle() -> Economy {
        let u = |goods: &[usize]| Utility::Dichotomous { good: Bundle::from_indices(goods.iter().copied()) };
        Economy::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["1".into(), "2".into(), "3".into()],
            (0..3).map(Bundle::singleton).collect(),
            vec![u(&[1, 2]), u(&[0, 2]), u(&[0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn pairs_collection_gives_halves() {
        let e = triangle();
        let bc = minimal_balanced_collections(3)
            .unwrap()
            .into_iter()
            .find(|bc| bc.coalitions.iter().all(|s| s.len() == 2))
            .unwrap();
        let t = vec![1, 1, 1];
        let w: Vec<Vec<Bundle>> =
            bc.coalitions.iter().map(|&s| find_witness(&e, s, &t, Budget::default()).unwrap().unwrap()).collect();
        let p = build_matrix(&e, &bc, &w, &t).unwrap();
        assert!(p.entries.iter().flatten().all(|x| x.is_zero() || *x == r(1, 2)));
        assert!(p.dichotomous_violation().is_none());
        assert_eq!(p.denominator_lcm(), 2);
    }

    #[test]
    fn grand_coalition_alone_is_integral() {
        let e = triangle();
        let bc = BalancedCollection { coalitions: vec![Coalition::grand(3)], weights: vec![Rational::one()] };
        let t = vec![1, 1, 1];
        let w = vec![find_witness(&e, Coalition::grand(3), &t, Budget::default()).unwrap().unwrap()];
        let p = build_matrix(&e, &bc, &w, &t).unwrap();
        assert!(p.is_integral());
    }

    #[test]
    fn witness_below_target_is_rejected() {
        let e = triangle();
        let bc = BalancedCollection { coalitions: vec![Coalition::grand(3)], weights: vec![Rational::one()] };
        let w = vec![e.endowments().to_vec()];
        let err = build_matrix(&e, &bc, &w, &[1, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::WitnessBelowTarget { agent: 0, .. }));
    }
}
