use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::outcomes::pareto_filter;
use crate::model::{Budget, Coalition, CoalitionOutcomes, Economy, ExtValue, Rational};

/// Largest agent count for the balancedness and convexity checks.
pub const NTU_MAX_AGENTS: usize = 4;

/// A finite NTU game: each coalition's feasible set is the downward closure of
/// its generator vectors (indexed by the coalition's members).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NtuGame {
    agents: Vec<String>,
    generators: BTreeMap<Coalition, Vec<Vec<ExtValue>>>,
}

impl NtuGame {
    pub fn new(agents: Vec<String>) -> Self {
        NtuGame { agents, generators: BTreeMap::new() }
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.agents.len())
    }

    pub fn set(&mut self, s: Coalition, generators: Vec<Vec<ExtValue>>) {
        self.generators.insert(s, generators);
    }

    pub fn generators(&self, s: Coalition) -> &[Vec<ExtValue>] {
        self.generators.get(&s).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn coalitions(&self) -> impl Iterator<Item = (&Coalition, &Vec<Vec<ExtValue>>)> {
        self.generators.iter()
    }

    /// Checks that every nonempty coalition has generators of the right length.
    pub fn check_complete(&self) -> Result<()> {
        for s in Coalition::all_ordered(self.num_agents()) {
            let gens = self.generators.get(&s).ok_or_else(|| Error::Input(format!("no generators for coalition {s}")))?;
            if gens.is_empty() {
                return Err(Error::Input(format!("coalition {s} has an empty generator list")));
            }
            if let Some(g) = gens.iter().find(|g| g.len() != s.len()) {
                return Err(Error::Input(format!(
                    "coalition {s} has a generator of length {}, expected {}",
                    g.len(),
                    s.len()
                )));
            }
        }
        Ok(())
    }

    /// `u ∈ V(S)`; `u` is indexed by all agents, `None` meaning unconstrained.
    pub fn contains(&self, s: Coalition, u: &[Cap]) -> bool {
        let members = s.members();
        self.generators(s)
            .iter()
            .any(|g| members.iter().zip(g).all(|(&i, gi)| u[i] <= Cap::Val(*gi)))
    }
}

/// A coordinate of a point in the intersection of several feasible sets:
/// a value, or `Top` for a coordinate no set constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cap {
    Val(ExtValue),
    Top,
}

impl Cap {
    pub fn value(self) -> Option<ExtValue> {
        match self {
            Cap::Val(v) => Some(v),
            Cap::Top => None,
        }
    }
}

/// Game whose `V(S)` is generated by the Pareto-maximal utility vectors of
/// the coalition's S-allocations.
pub fn build_ntu_game(e: &Economy, budget: Budget) -> Result<NtuGame> {
    let mut g = NtuGame::new(e.agents().to_vec());
    for s in Coalition::all_ordered(e.num_agents()) {
        let out = CoalitionOutcomes::compute(e, s, budget)?;
        g.set(s, out.frontier_vectors().cloned().collect());
    }
    Ok(g)
}

/// A family of coalitions with weights such that every agent's memberships
/// sum to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedCollection {
    pub coalitions: Vec<Coalition>,
    pub weights: Vec<Rational>,
}

impl BalancedCollection {
    pub fn is_balanced(&self, n: usize) -> bool {
        (0..n).all(|i| {
            let total: Rational =
                self.coalitions.iter().zip(&self.weights).filter(|(s, _)| s.contains(i)).map(|(_, w)| *w).sum();
            total == Rational::one()
        })
    }
}

/// Solves `Σ δ_S 1_S = 1` for a family with independent incidence vectors;
/// `None` if they are dependent or the system has no solution.
fn unique_weights(family: &[Coalition], n: usize) -> Option<Vec<Rational>> {
    let cols = family.len();
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r: Vec<Rational> =
                family.iter().map(|s| if s.contains(i) { Rational::one() } else { Rational::zero() }).collect();
            r.push(Rational::one());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        let p = (pivot_row..n).find(|&r| !rows[r][c].is_zero())?;
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][c].recip();
        for v in rows[pivot_row].iter_mut() {
            *v *= inv;
        }
        for r in 0..n {
            if r != pivot_row && !rows[r][c].is_zero() {
                let f = rows[r][c];
                for k in 0..=cols {
                    let d = rows[pivot_row][k] * f;
                    rows[r][k] -= d;
                }
            }
        }
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| rows[c][cols]).collect())
}

/// All minimal balanced collections on `n` agents, each with its unique
/// positive weights. These are the families whose incidence vectors are
/// linearly independent and admit a positive solution.
pub fn minimal_balanced_collections(n: usize) -> Result<Vec<BalancedCollection>> {
    if n == 0 || n > NTU_MAX_AGENTS {
        return Err(Error::Size(format!("minimal balanced collections need 1..={NTU_MAX_AGENTS} agents, got {n}")));
    }
    let all = Coalition::all_ordered(n);
    let mut out = Vec::new();
    let mut family = Vec::new();
    fn rec(
        all: &[Coalition],
        start: usize,
        n: usize,
        family: &mut Vec<Coalition>,
        out: &mut Vec<BalancedCollection>,
    ) {
        if !family.is_empty() {
            if let Some(w) = unique_weights(family, n) {
                if w.iter().all(|x| x.is_positive()) {
                    out.push(BalancedCollection { coalitions: family.clone(), weights: w });
                }
            }
        }
        if family.len() == n {
            return;
        }
        for k in start..all.len() {
            family.push(all[k]);
            rec(all, k + 1, n, family, out);
            family.pop();
        }
    }
    rec(&all, 0, n, &mut family, &mut out);
    Ok(out)
}

/// Pareto-maximal points of `∩_{S ∈ family} V(S)`, over all agents.
pub fn intersection_maxima(g: &NtuGame, family: &[Coalition]) -> Vec<Vec<Cap>> {
    let n = g.num_agents();
    let mut points = vec![vec![Cap::Top; n]];
    for &s in family {
        let members = s.members();
        let mut next = Vec::new();
        for p in &points {
            for gen in g.generators(s) {
                let mut q = p.clone();
                for (&i, v) in members.iter().zip(gen) {
                    q[i] = q[i].min(Cap::Val(*v));
                }
                next.push(q);
            }
        }
        points = pareto_filter(next);
    }
    points
}

fn size_guard(g: &NtuGame) -> Result<()> {
    if g.num_agents() > NTU_MAX_AGENTS {
        return Err(Error::Size(format!("{} agents (NTU checks allow at most {NTU_MAX_AGENTS})", g.num_agents())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceViolation {
    pub collection: BalancedCollection,
    /// A point of every `V(S)` in the collection that is outside `V(A)`.
    pub u: Vec<ExtValue>,
}

/// Checks `u ∈ ∩ V(S) ⇒ u ∈ V(A)` for every minimal balanced collection.
///
/// Every feasible set is a downward closure of finitely many vectors, so it is
/// enough to test the maximal points of each intersection.
pub fn check_balanced(g: &NtuGame) -> Result<Option<BalanceViolation>> {
    size_guard(g)?;
    let grand = g.grand();
    for bc in minimal_balanced_collections(g.num_agents())? {
        if bc.coalitions == [grand] {
            continue;
        }
        for p in intersection_maxima(g, &bc.coalitions) {
            if !g.contains(grand, &p) {
                let u = p.iter().map(|c| c.value().expect("balanced collections cover every agent")).collect();
                return Ok(Some(BalanceViolation { collection: bc, u }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityViolation {
    pub s: Coalition,
    pub s_prime: Coalition,
    /// Indexed by all agents; `None` for agents outside `S ∪ S'`.
    pub u: Vec<Option<ExtValue>>,
}

/// Checks `V(S) ∩ V(S') ⊆ V(S ∩ S') ∪ V(S ∪ S')` for all non-nested pairs.
///
/// For disjoint pairs the stronger inclusion into `V(S ∪ S')` is checked.
pub fn check_ordinal_convexity(g: &NtuGame) -> Result<Option<ConvexityViolation>> {
    size_guard(g)?;
    let all = Coalition::all_ordered(g.num_agents());
    for (a, &s) in all.iter().enumerate() {
        for &sp in &all[a + 1..] {
            if s.is_subset(sp) || sp.is_subset(s) {
                continue;
            }
            let meet = s.intersection(sp);
            let join = s.union(sp);
            for p in intersection_maxima(g, &[s, sp]) {
                let in_meet = !meet.is_empty() && g.contains(meet, &p);
                if !in_meet && !g.contains(join, &p) {
                    return Ok(Some(ConvexityViolation { s, s_prime: sp, u: p.iter().map(|c| c.value()).collect() }));
                }
            }
        }
    }
    Ok(None)
}

/// Generators of `V(A)` that no coalition can improve upon strictly for all
/// of its members.
pub fn ntu_weak_core(g: &NtuGame) -> Result<Vec<Vec<ExtValue>>> {
    size_guard(g)?;
    let coalitions: Vec<(Vec<usize>, &[Vec<ExtValue>])> =
        Coalition::all_ordered(g.num_agents()).into_iter().map(|s| (s.members(), g.generators(s))).collect();
    let mut core = Vec::new();
    for x in pareto_filter(g.generators(g.grand()).to_vec()) {
        let blocked = coalitions.iter().any(|(members, gens)| {
            gens.iter().any(|v| members.iter().zip(v).all(|(&i, vi)| *vi > x[i]))
        });
        if !blocked {
            core.push(x);
        }
    }
    Ok(core)
}
