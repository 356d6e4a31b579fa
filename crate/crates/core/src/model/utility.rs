use super::{Bundle, ExtValue, Rational};

/// The utility families an agent may carry.
///
/// Every variant is evaluated on bundles of the economy's objects and never
/// fails; object ids are resolved when the economy is built.
#[derive(Clone, Debug, PartialEq)]
pub enum Utility {
    /// Explicit value for every bundle, indexed by bundle mask (length `2^m`).
    Table(Vec<ExtValue>),
    /// Number of good objects in the bundle.
    Dichotomous { good: Bundle },
    /// At most one object per category; otherwise the sum of per-object values.
    /// With 0/1 values this is the per-category dichotomous utility.
    Categorical { categories: Vec<Bundle>, values: Vec<Rational> },
    /// Sum of per-object weights.
    Additive { weights: Vec<Rational> },
    /// Unit demand: a strict ranking over single houses, best first.
    Housing { ranking: Vec<usize> },
}

impl Utility {
    pub fn kind(&self) -> &'static str {
        match self {
            Utility::Table(_) => "table",
            Utility::Dichotomous { .. } => "dichotomous",
            Utility::Categorical { .. } => "categorical",
            Utility::Additive { .. } => "additive",
            Utility::Housing { .. } => "housing",
        }
    }

    pub fn eval(&self, x: Bundle) -> ExtValue {
        match self {
            Utility::Table(values) => values.get(x.0 as usize).copied().unwrap_or(ExtValue::NegInf),
            Utility::Dichotomous { good } => ExtValue::int(x.intersection(*good).len() as i64),
            Utility::Categorical { categories, values } => {
                let mut total = Rational::from_integer(0);
                for cat in categories {
                    let hit = x.intersection(*cat);
                    match hit.len() {
                        0 => {}
                        1 => {
                            let o = hit.iter().next().unwrap();
                            total += values.get(o).copied().unwrap_or_default();
                        }
                        _ => return ExtValue::NegInf,
                    }
                }
                ExtValue::Finite(total)
            }
            Utility::Additive { weights } => {
                let sum = x.iter().map(|o| weights.get(o).copied().unwrap_or_default()).sum();
                ExtValue::Finite(sum)
            }
            Utility::Housing { ranking } => {
                if x.len() != 1 {
                    return ExtValue::NegInf;
                }
                let h = x.iter().next().unwrap();
                match ranking.iter().position(|&r| r == h) {
                    Some(p) => ExtValue::int((ranking.len() - p) as i64),
                    None => ExtValue::NegInf,
                }
            }
        }
    }

    /// True for dichotomous utilities and for categorical ones whose values are all 0 or 1.
    pub fn is_dichotomous_like(&self) -> bool {
        match self {
            Utility::Dichotomous { .. } => true,
            Utility::Categorical { values, .. } => values
                .iter()
                .all(|v| *v == Rational::from_integer(0) || *v == Rational::from_integer(1)),
            _ => false,
        }
    }

    /// Builds a table from an ordinal list of bundles, best first.
    ///
    /// Listed bundles receive the values `n, n-1, ..., 1`. Every unlisted bundle
    /// receives a distinct negative integer, so it ranks below every listed one
    /// and the table stays injective.
    pub fn ordinal_table(num_objects: usize, ranked: &[Bundle]) -> Utility {
        let size = 1usize << num_objects;
        let mut values = vec![ExtValue::NegInf; size];
        let n = ranked.len() as i64;
        for (pos, b) in ranked.iter().enumerate() {
            values[b.0 as usize] = ExtValue::int(n - pos as i64);
        }
        let mut next = -1i64;
        for mask in 0..size {
            if !ranked.iter().any(|b| b.0 as usize == mask) {
                values[mask] = ExtValue::int(next);
                next -= 1;
            }
        }
        Utility::Table(values)
    }
}
