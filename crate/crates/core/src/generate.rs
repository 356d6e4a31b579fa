//! Seeded random economies.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Bundle, Economy, Rational, Utility, MAX_AGENTS, MAX_OBJECTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Dichotomous,
    Categorical,
    Housing,
    AdditiveCommon,
    AdditiveFree,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Dichotomous, Family::Categorical, Family::Housing, Family::AdditiveCommon, Family::AdditiveFree];

    pub fn name(self) -> &'static str {
        match self {
            Family::Dichotomous => "dichotomous",
            Family::Categorical => "categorical",
            Family::Housing => "housing",
            Family::AdditiveCommon => "additive-common",
            Family::AdditiveFree => "additive-free",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown family `{s}`")))
    }
}

/// What to generate. `objects` is ignored for housing (one house per agent)
/// and for categorical economies, which use `categories × per_category`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub family: Family,
    pub agents: usize,
    pub objects: usize,
    pub categories: usize,
    pub per_category: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(family: Family, agents: usize, objects: usize, seed: u64) -> Self {
        InstanceSpec { family, agents, objects, categories: 2, per_category: 2, seed }
    }

    pub fn categorical(agents: usize, categories: usize, per_category: usize, seed: u64) -> Self {
        InstanceSpec { family: Family::Categorical, agents, objects: categories * per_category, categories, per_category, seed }
    }

    pub fn num_objects(&self) -> usize {
        match self.family {
            Family::Housing => self.agents,
            Family::Categorical => self.categories * self.per_category,
            _ => self.objects,
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.agents;
        let m = self.num_objects();
        if n == 0 || n > MAX_AGENTS {
            return Err(Error::Size(format!("{n} agents (need 1..={MAX_AGENTS})")));
        }
        let max_objects = if self.family == Family::AdditiveCommon { 62 } else { MAX_OBJECTS };
        if m > max_objects {
            return Err(Error::Size(format!("{m} objects (max {max_objects} for {})", self.family)));
        }
        if m < n {
            return Err(Error::Input(format!("{m} objects cannot give each of {n} agents a nonempty endowment")));
        }
        if self.family == Family::Categorical && self.categories == 0 {
            return Err(Error::Input("categorical economies need at least one category".into()));
        }
        Ok(())
    }
}

/// Every agent gets at least one object; the rest are dealt uniformly.
fn endowments(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Bundle> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut out = vec![Bundle::EMPTY; n];
    for (k, &o) in order.iter().enumerate() {
        let i = if k < n { k } else { rng.gen_range(0..n) };
        out[i] = out[i].with(o);
    }
    out
}

fn random_subset(rng: &mut ChaCha8Rng, m: usize) -> Bundle {
    Bundle::from_indices((0..m).filter(|_| rng.gen_bool(0.5)))
}

pub fn generate(spec: &InstanceSpec) -> Result<Economy> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.agents;
    let m = spec.num_objects();
    let agents: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
    let ints = |w: Vec<i64>| w.into_iter().map(Rational::from_integer).collect::<Vec<_>>();
    match spec.family {
        Family::Housing => {
            let objects = (1..=n).map(|k| format!("h{k}")).collect();
            let utilities = (0..n)
                .map(|_| {
                    let mut ranking: Vec<usize> = (0..n).collect();
                    ranking.shuffle(&mut rng);
                    Utility::Housing { ranking }
                })
                .collect();
            Economy::new(objects, agents, (0..n).map(Bundle::singleton).collect(), utilities)
        }
        Family::Categorical => {
            let (k, p) = (spec.categories, spec.per_category);
            let mut objects = Vec::with_capacity(m);
            let mut categories = Vec::with_capacity(k);
            for c in 0..k {
                let name = category_name(c);
                let start = objects.len();
                objects.extend((1..=p).map(|j| format!("{name}{j}")));
                categories.push((name, Bundle::from_indices(start..start + p)));
            }
            let w = endowments(&mut rng, n, m);
            let sets: Vec<Bundle> = categories.iter().map(|(_, b)| *b).collect();
            let utilities = (0..n)
                .map(|_| {
                    let good = random_subset(&mut rng, m);
                    let values = (0..m).map(|o| Rational::from_integer(good.contains(o) as i64)).collect();
                    Utility::Categorical { categories: sets.clone(), values }
                })
                .collect();
            Ok(Economy::new(objects, agents, w, utilities)?.with_categories(categories))
        }
        family => {
            let objects = (1..=m).map(|k| format!("o{k}")).collect();
            let w = endowments(&mut rng, n, m);
            let utilities = match family {
                Family::Dichotomous => (0..n).map(|_| Utility::Dichotomous { good: random_subset(&mut rng, m) }).collect(),
                Family::AdditiveCommon => {
                    let mut powers: Vec<i64> = (0..m).map(|o| 1i64 << o).collect();
                    powers.shuffle(&mut rng);
                    vec![Utility::Additive { weights: ints(powers) }; n]
                }
                _ => (0..n)
                    .map(|_| Utility::Additive { weights: ints((0..m).map(|_| rng.gen_range(1..=9)).collect()) })
                    .collect(),
            };
            Economy::new(objects, agents, w, utilities)
        }
    }
}

fn category_name(c: usize) -> String {
    if c < 26 {
        ((b'a' + c as u8) as char).to_string()
    } else {
        format!("c{}", c + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::properties;

    #[test]
    fn deterministic_per_seed() {
        let spec = InstanceSpec::new(Family::Dichotomous, 3, 5, 7);
        let a = crate::io::write_economy(&generate(&spec).unwrap());
        let b = crate::io::write_economy(&generate(&spec).unwrap());
        assert_eq!(a, b);
        let c = crate::io::write_economy(&generate(&InstanceSpec { seed: 8, ..spec }).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn every_family_validates() {
        for family in Family::ALL {
            for seed in 0..20 {
                let spec = InstanceSpec { family, agents: 3, objects: 5, categories: 2, per_category: 3, seed };
                let e = generate(&spec).unwrap();
                assert!(e.validate().is_ok(), "{family} seed {seed}");
            }
        }
    }

    #[test]
    fn common_weights_are_discrete_tu() {
        for seed in 0..10 {
            let e = generate(&InstanceSpec::new(Family::AdditiveCommon, 3, 5, seed)).unwrap();
            assert!((0..3).all(|i| properties::check_injective(&e, i).unwrap()));
            assert!(properties::check_discrete_tu(&e).unwrap());
        }
    }

    #[test]
    fn too_few_objects() {
        assert!(matches!(generate(&InstanceSpec::new(Family::Dichotomous, 4, 3, 0)), Err(Error::Input(_))));
        assert!(matches!(generate(&InstanceSpec::new(Family::AdditiveCommon, 2, 63, 0)), Err(Error::Size(_))));
    }
}
