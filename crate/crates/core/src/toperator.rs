//! The antitone operator `T_k` on utility profiles, its iteration from the
//! endowment profile to a fixed point of `T²`, and the allocation built from
//! such a fixed point.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::properties::injectivity_violation;
use crate::model::{
    trading_components, Allocation, Budget, Bundle, Coalition, CoalitionOutcomes, Economy, ExtValue,
    StructuredAllocation,
};
use crate::ttc::TtcResult;

/// One utility value per agent.
pub type Profile = Vec<ExtValue>;

/// Largest object count for which achievable utility sets are tabulated.
pub const T_MAX_OBJECTS: usize = 16;

/// Precomputed data for applying `T_k` to an economy with injective utilities.
#[derive(Clone, Debug)]
pub struct TContext<'a> {
    economy: &'a Economy,
    k: usize,
    /// Outcomes of every coalition of size at most `k`.
    outcomes: Vec<CoalitionOutcomes>,
    /// Achievable values of each agent, ascending.
    values: Vec<Vec<ExtValue>>,
    inverse: Vec<HashMap<ExtValue, Bundle>>,
}

impl<'a> TContext<'a> {
    pub fn new(e: &'a Economy, k: usize, budget: Budget) -> Result<Self> {
        let n = e.num_agents();
        if k == 0 || k > n {
            return Err(Error::Input(format!("coalition size bound k = {k} must lie in 1..={n}")));
        }
        let m = e.num_objects();
        if m > T_MAX_OBJECTS {
            return Err(Error::Size(format!("{m} objects (the T operator tabulates at most {T_MAX_OBJECTS})")));
        }
        for i in 0..n {
            if let Some((a, b)) = injectivity_violation(e, i)? {
                return Err(Error::Precondition(format!(
                    "utility of agent {} is not injective: {:?} and {:?} share a value",
                    e.agents()[i],
                    e.bundle_names(a),
                    e.bundle_names(b)
                )));
            }
        }
        let mut outcomes = Vec::new();
        for s in Coalition::all_ordered(n).into_iter().filter(|s| s.len() <= k) {
            outcomes.push(CoalitionOutcomes::compute(e, s, budget)?);
        }
        let mut values = Vec::with_capacity(n);
        let mut inverse = Vec::with_capacity(n);
        for i in 0..n {
            let mut inv = HashMap::new();
            let mut set = BTreeSet::new();
            for x in e.all_objects().subsets() {
                let v = e.value(i, x);
                set.insert(v);
                if v.is_finite() {
                    inv.insert(v, x);
                }
            }
            values.push(set.into_iter().collect());
            inverse.push(inv);
        }
        Ok(TContext { economy: e, k, outcomes, values, inverse })
    }

    pub fn economy(&self) -> &Economy {
        self.economy
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The achievable utility values `U_i`, ascending.
    pub fn values(&self, i: usize) -> &[ExtValue] {
        &self.values[i]
    }

    /// The unique bundle giving agent `i` the finite value `u`.
    pub fn inverse(&self, i: usize, u: ExtValue) -> Option<Bundle> {
        self.inverse[i].get(&u).copied()
    }

    /// The endowment profile.
    pub fn floor(&self) -> Profile {
        self.economy.endowment_values()
    }

    fn check_profile(&self, u: &[ExtValue]) -> Result<()> {
        if u.len() != self.economy.num_agents() {
            return Err(Error::Input(format!("profile has {} entries, expected {}", u.len(), self.economy.num_agents())));
        }
        Ok(())
    }
}

fn partners_satisfied(members: &[usize], v: &[ExtValue], i: usize, u: &[ExtValue]) -> bool {
    members.iter().zip(v).all(|(&j, vj)| j == i || *vj >= u[j])
}

/// Utilities agent `i` can reach in a coalition of size at most `k` while
/// every partner `j` gets at least `u_j`.
pub fn b_set(ctx: &TContext, i: usize, u: &[ExtValue]) -> Result<BTreeSet<ExtValue>> {
    ctx.check_profile(u)?;
    let mut out = BTreeSet::new();
    for o in ctx.outcomes.iter().filter(|o| o.coalition.contains(i)) {
        let members = o.coalition.members();
        let p = o.coalition.position(i).expect("member");
        for v in &o.vectors {
            if partners_satisfied(&members, v, i, u) {
                out.insert(v[p]);
            }
        }
    }
    Ok(out)
}

/// `(T_k u)_i = max B^k_i(u)`.
pub fn apply_t(ctx: &TContext, u: &[ExtValue]) -> Result<Profile> {
    ctx.check_profile(u)?;
    let n = ctx.economy.num_agents();
    let mut best = vec![ExtValue::NegInf; n];
    for o in &ctx.outcomes {
        let members = o.coalition.members();
        for v in o.frontier_vectors() {
            for (p, &i) in members.iter().enumerate() {
                if v[p] > best[i] && partners_satisfied(&members, v, i, u) {
                    best[i] = v[p];
                }
            }
        }
    }
    Ok(best)
}

/// Iterates of `T` from the endowment profile, stopped once two consecutive
/// even iterates agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TTrace {
    /// `iterates[m] = T^m u̲`; the last entry equals the one two before it.
    pub iterates: Vec<Profile>,
    pub fixed_point: Profile,
}

impl TTrace {
    /// `T^t u̲` for any `t`, continuing the final two-cycle past the stored
    /// iterates.
    pub fn iterate(&self, t: usize) -> &Profile {
        let last = self.iterates.len() - 1;
        if t <= last {
            &self.iterates[t]
        } else if (t - last).is_multiple_of(2) {
            &self.iterates[last]
        } else {
            &self.iterates[last - 1]
        }
    }

    /// Number of applications of `T` performed.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    /// Checks `u̲ ≤ T²u̲ ≤ … ≤ T³u̲ ≤ Tu̲`; returns a description of the first
    /// failure.
    pub fn sandwich_violation(&self) -> Option<String> {
        let le = |a: &Profile, b: &Profile| a.iter().zip(b).all(|(x, y)| x <= y);
        let its = &self.iterates;
        for t in 2..its.len() {
            let ok = if t % 2 == 0 { le(&its[t - 2], &its[t]) } else { le(&its[t], &its[t - 2]) };
            if !ok {
                return Some(format!("iterates {} and {t} are out of order", t - 2));
            }
        }
        let last_even = its.iter().step_by(2).next_back().expect("nonempty");
        if let Some(last_odd) = its.iter().skip(1).step_by(2).next_back() {
            if !le(last_even, last_odd) {
                return Some("an even iterate exceeds an odd iterate".into());
            }
        }
        None
    }
}

pub fn iterate_to_fixed_point(ctx: &TContext) -> Result<TTrace> {
    let mut iterates = vec![ctx.floor()];
    loop {
        let m = iterates.len() - 1;
        let odd = apply_t(ctx, &iterates[m])?;
        let even = apply_t(ctx, &odd)?;
        let done = even == iterates[m];
        iterates.push(odd);
        iterates.push(even);
        if done {
            let fixed_point = iterates[m].clone();
            return Ok(TTrace { iterates, fixed_point });
        }
    }
}

/// Split of the agents at a fixed point of `T²` and the pairing of `A₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclePairing {
    pub u: Profile,
    pub tu: Profile,
    /// Agents with `u_i = (Tu)_i`.
    pub a1: Vec<usize>,
    /// Agents with `u_i < (Tu)_i`.
    pub a2: Vec<usize>,
    /// Two-cycles `(first, second)` partitioning `A₂`, first < second.
    pub pairs: Vec<(usize, usize)>,
}

/// Classifies agents at a fixed point `u` of `T²` (with `k = 2`) and pairs
/// each `A₂` agent with the unique partner `j` for which `((Tu)_i, u_j)` is
/// realized by an `{i, j}`-allocation.
pub fn classify_and_pair(ctx: &TContext, u: &[ExtValue]) -> Result<CyclePairing> {
    if ctx.k != 2 {
        return Err(Error::Precondition(format!("pairing needs k = 2, context has k = {}", ctx.k)));
    }
    let tu = apply_t(ctx, u)?;
    if apply_t(ctx, &tu)? != u {
        return Err(Error::Precondition("profile is not a fixed point of T²".into()));
    }
    if u.iter().zip(&tu).any(|(a, b)| a > b) {
        return Err(Error::Precondition("profile is not below its image under T".into()));
    }
    let n = ctx.economy.num_agents();
    let a1: Vec<usize> = (0..n).filter(|&i| u[i] == tu[i]).collect();
    let a2: Vec<usize> = (0..n).filter(|&i| u[i] < tu[i]).collect();
    let realized = |i: usize, j: usize| {
        let s = Coalition::pair(i, j);
        let o = ctx.outcomes.iter().find(|o| o.coalition == s).expect("pairs are tabulated when k = 2");
        let (pi, pj) = (s.position(i).expect("member"), s.position(j).expect("member"));
        o.vectors.iter().any(|v| v[pi] == tu[i] && v[pj] == u[j])
    };
    let mut next = HashMap::new();
    for &i in &a2 {
        let partners: Vec<usize> = a2.iter().copied().filter(|&j| j != i && realized(i, j)).collect();
        match partners.as_slice() {
            [j] => {
                next.insert(i, *j);
            }
            _ => {
                return Err(Error::Invariant(format!(
                    "agent {} in A2 has {} partners realizing its T-value, expected exactly one",
                    ctx.economy.agents()[i],
                    partners.len()
                )))
            }
        }
    }
    let mut seen = vec![false; n];
    let mut pairs = Vec::new();
    for &start in &a2 {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut at = next[&start];
        while at != start {
            if seen[at] {
                return Err(Error::Invariant(format!(
                    "partner map on A2 is not a permutation at agent {}",
                    ctx.economy.agents()[at]
                )));
            }
            seen[at] = true;
            cycle.push(at);
            at = next[&at];
        }
        if cycle.len() != 2 {
            return Err(Error::LongCycle { cycle });
        }
        pairs.push((cycle[0].min(cycle[1]), cycle[0].max(cycle[1])));
    }
    Ok(CyclePairing { u: u.to_vec(), tu, a1, a2, pairs })
}

/// The allocation giving `A₁` agents and second pair members `v⁻¹(u_i)` and
/// first pair members `v⁻¹((Tu)_i)`, structured by the trading components of
/// `A₁` and the pairs.
pub fn construct_bargaining_allocation(ctx: &TContext, pairing: &CyclePairing) -> Result<StructuredAllocation> {
    let e = ctx.economy;
    let n = e.num_agents();
    let mut bundles = vec![Bundle::EMPTY; n];
    let pick = |i: usize, v: ExtValue| {
        ctx.inverse(i, v).ok_or_else(|| Error::Invariant(format!("no bundle gives agent {} utility {v}", e.agents()[i])))
    };
    for &i in &pairing.a1 {
        bundles[i] = pick(i, pairing.u[i])?;
    }
    for &(first, second) in &pairing.pairs {
        bundles[first] = pick(first, pairing.tu[first])?;
        bundles[second] = pick(second, pairing.u[second])?;
    }
    let x = Allocation(bundles);
    if !x.is_valid(e) {
        return Err(Error::Invariant("constructed bundles overlap".into()));
    }
    let a1 = Coalition::from_members(pairing.a1.iter().copied());
    let mut structure = Vec::new();
    for c in trading_components(e, &x) {
        if c.is_subset(a1) {
            structure.push(c);
        } else if !c.intersection(a1).is_empty() {
            return Err(Error::Invariant(format!("A1 agents trade with A2 agents in component {c}")));
        }
    }
    structure.extend(pairing.pairs.iter().map(|&(a, b)| Coalition::pair(a, b)));
    StructuredAllocation::new(e, x, structure).map_err(|err| Error::Invariant(err.to_string()))
}

/// If `u = Tu`, the allocation `{v⁻¹(u_i)}`; otherwise `None`.
pub fn check_t_fixed_point(ctx: &TContext, u: &[ExtValue]) -> Result<Option<Allocation>> {
    if apply_t(ctx, u)? != u {
        return Ok(None);
    }
    let e = ctx.economy;
    let mut bundles = Vec::with_capacity(u.len());
    for (i, &v) in u.iter().enumerate() {
        bundles.push(
            ctx.inverse(i, v)
                .ok_or_else(|| Error::Invariant(format!("no bundle gives agent {} utility {v}", e.agents()[i])))?,
        );
    }
    let x = Allocation(bundles);
    if !x.is_valid(e) {
        return Err(Error::Invariant("fixed point of T does not define an allocation".into()));
    }
    Ok(Some(x))
}

/// For every TTC round `r` and agent `i` clearing in it, checks that
/// `(T^t u̲)_i` is constant for all `t ≥ 2r − 1` and equals the value of the
/// house TTC assigns to `i`.
pub fn ttc_equivalence_trace(ctx: &TContext, trace: &TTrace, ttc: &TtcResult) -> bool {
    let e = ctx.economy;
    let horizon = trace.iterates.len() + 2 * ttc.rounds.len() + 2;
    for (r0, round) in ttc.rounds.iter().enumerate() {
        let r = r0 + 1;
        for &i in round {
            let target = e.value(i, Bundle::singleton(ttc.assignment[i]));
            if (2 * r - 1..=horizon).any(|t| trace.iterate(t)[i] != target) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::oracle;
    use crate::ttc::{run_ttc, HousingMarket};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn b_set_with_singleton_coalitions() {
        let e = catalog::additive_common(&[1, 2], &[&[0], &[1]]);
        let ctx = TContext::new(&e, 1, b()).unwrap();
        let u = vec![ExtValue::int(3), ExtValue::int(3)];
        let set = b_set(&ctx, 0, &u).unwrap();
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![ExtValue::int(0), ExtValue::int(1)]);
    }

    #[test]
    fn b_set_holds_partner_at_profile() {
        let e = catalog::additive_common(&[1, 2], &[&[0], &[1]]);
        let ctx = TContext::new(&e, 2, b()).unwrap();
        let u = vec![ExtValue::int(1), ExtValue::int(2)];
        let set = b_set(&ctx, 0, &u).unwrap();
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![ExtValue::int(0), ExtValue::int(1)]);
        assert_eq!(apply_t(&ctx, &u).unwrap(), u);
    }

    #[test]
    fn endowment_is_a_fixed_point_for_common_weights() {
        let e = catalog::additive_common(&[1, 2], &[&[0], &[1]]);
        let ctx = TContext::new(&e, 2, b()).unwrap();
        let trace = iterate_to_fixed_point(&ctx).unwrap();
        assert_eq!(trace.fixed_point, ctx.floor());
        let pairing = classify_and_pair(&ctx, &trace.fixed_point).unwrap();
        assert!(pairing.a2.is_empty() && pairing.pairs.is_empty());
        let xs = construct_bargaining_allocation(&ctx, &pairing).unwrap();
        assert_eq!(xs.allocation(), &Allocation::endowment(&e));
        assert_eq!(xs.structure(), &[Coalition::singleton(0), Coalition::singleton(1)]);
        let x = check_t_fixed_point(&ctx, &trace.fixed_point).unwrap().unwrap();
        assert!(oracle::pairwise_stable_set(&e, b()).unwrap().contains(&x));
    }

    #[test]
    fn top_profile_leaves_only_solo_options() {
        let e = catalog::additive_common(&[1, 2, 4], &[&[0], &[1, 2]]);
        let ctx = TContext::new(&e, 2, b()).unwrap();
        let top: Profile = (0..2).map(|i| *ctx.values(i).last().unwrap()).collect();
        assert_eq!(apply_t(&ctx, &top).unwrap(), vec![ExtValue::int(1), ExtValue::int(6)]);
    }

    #[test]
    fn housing_rotation() {
        let e = catalog::housing(&[vec![1, 0, 2], vec![2, 1, 0], vec![0, 2, 1]]);
        let ctx = TContext::new(&e, 3, b()).unwrap();
        let floor = ctx.floor();
        assert!(b_set(&ctx, 0, &floor).unwrap().contains(&e.value(0, Bundle::singleton(1))));
        let tops: Profile = (0..3).map(|i| e.value(i, Bundle::singleton((i + 1) % 3))).collect();
        assert_eq!(apply_t(&ctx, &floor).unwrap(), tops);
        let trace = iterate_to_fixed_point(&ctx).unwrap();
        let m = HousingMarket::new(e.clone()).unwrap();
        let ttc = run_ttc(&m);
        assert!(ttc_equivalence_trace(&ctx, &trace, &ttc));
        let x = check_t_fixed_point(&ctx, &trace.fixed_point).unwrap().unwrap();
        assert_eq!(x, ttc.allocation());
        assert!(oracle::find_block(&e, &x, true, b()).unwrap().is_none());
    }

    #[test]
    fn swap_then_leftover_trace() {
        let e = catalog::housing(&[vec![1, 0, 2], vec![0, 1, 2], vec![0, 2, 1]]);
        let ctx = TContext::new(&e, 3, b()).unwrap();
        let trace = iterate_to_fixed_point(&ctx).unwrap();
        let ttc = run_ttc(&HousingMarket::new(e.clone()).unwrap());
        assert!(ttc_equivalence_trace(&ctx, &trace, &ttc));
        assert!(trace.sandwich_violation().is_none());
    }

    #[test]
    fn non_fixed_point_gives_none() {
        let e = catalog::housing(&[vec![1, 0], vec![0, 1]]);
        let ctx = TContext::new(&e, 2, b()).unwrap();
        assert!(check_t_fixed_point(&ctx, &ctx.floor()).unwrap().is_none());
    }

    #[test]
    fn non_injective_utilities_are_refused() {
        let e = catalog::dichotomous_chain();
        assert!(matches!(TContext::new(&e, 2, b()), Err(Error::Precondition(_))));
    }
}
