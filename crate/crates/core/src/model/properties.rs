//! Structural checks on utilities and economies: injectivity, strict
//! monotonicity, pairwise Pareto frontiers, discrete transferable utility and
//! gains from trade.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::Serialize;

use super::outcomes::{for_each_s_allocation, Budget, CoalitionOutcomes};
use super::{Bundle, Coalition, Economy, ExtValue, Rational};
use crate::error::{Error, Result};

const MAX_SUBSET_CHECK_OBJECTS: usize = 24;

fn guard_subsets(e: &Economy) -> Result<()> {
    if e.num_objects() > MAX_SUBSET_CHECK_OBJECTS {
        return Err(Error::Size(format!(
            "{} objects; subset checks support at most {MAX_SUBSET_CHECK_OBJECTS}",
            e.num_objects()
        )));
    }
    Ok(())
}

/// Two distinct bundles with the same finite value, if any.
///
/// Several bundles valued `-inf` are not a violation: `-inf` marks bundles
/// outside the consumption space.
pub fn injectivity_violation(e: &Economy, i: usize) -> Result<Option<(Bundle, Bundle)>> {
    guard_subsets(e)?;
    let mut seen: BTreeMap<Rational, Bundle> = BTreeMap::new();
    for x in e.all_objects().subsets() {
        if let ExtValue::Finite(v) = e.value(i, x) {
            if let Some(prev) = seen.insert(v, x) {
                return Ok(Some((prev, x)));
            }
        }
    }
    Ok(None)
}

pub fn check_injective(e: &Economy, i: usize) -> Result<bool> {
    Ok(injectivity_violation(e, i)?.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    /// `X ⊊ X'` implies `v(X) < v(X')` whenever both values are finite.
    Domain,
    /// The implication for every pair of bundles, `-inf` included.
    Raw,
}

/// A pair `X ⊊ X'` with `v(X) >= v(X')`, if any.
pub fn monotonicity_violation(e: &Economy, i: usize, mode: Monotonicity) -> Result<Option<(Bundle, Bundle)>> {
    guard_subsets(e)?;
    let m = e.num_objects();
    let size = 1usize << m;
    match mode {
        Monotonicity::Raw => {
            // Single-object additions suffice by transitivity.
            for mask in 0..size {
                let x = Bundle(mask as u64);
                let vx = e.value(i, x);
                for o in 0..m {
                    if !x.contains(o) {
                        let y = x.with(o);
                        if vx >= e.value(i, y) {
                            return Ok(Some((x, y)));
                        }
                    }
                }
            }
            Ok(None)
        }
        Monotonicity::Domain => {
            // best[X] = largest finite value over strict subsets of X, with its bundle.
            let mut best: Vec<Option<(Rational, Bundle)>> = vec![None; size];
            for mask in 1..size {
                let x = Bundle(mask as u64);
                let mut acc: Option<(Rational, Bundle)> = None;
                for o in x.iter() {
                    let sub = x.without(o);
                    let cand = [e.value(i, sub).finite().map(|v| (v, sub)), best[sub.0 as usize]];
                    for (v, b) in cand.into_iter().flatten() {
                        if acc.is_none_or(|(a, _)| v > a) {
                            acc = Some((v, b));
                        }
                    }
                }
                best[mask] = acc;
                if let (ExtValue::Finite(v), Some((below, sub))) = (e.value(i, x), acc) {
                    if below >= v {
                        return Ok(Some((sub, x)));
                    }
                }
            }
            Ok(None)
        }
    }
}

pub fn check_strictly_monotone(e: &Economy, i: usize, mode: Monotonicity) -> Result<bool> {
    Ok(monotonicity_violation(e, i, mode)?.is_none())
}

/// Agent i's best utility against a floor `θ` on agent j's utility, over
/// {i,j}-allocations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParetoFrontierPair {
    pub i: usize,
    pub j: usize,
    /// `(θ, v_ij(θ))` for every finite utility value θ that j attains in some
    /// {i,j}-allocation, θ ascending.
    pub points: Vec<(ExtValue, ExtValue)>,
    /// Best utility for i with no floor on j.
    pub unconstrained: ExtValue,
}

impl ParetoFrontierPair {
    /// `v_ij(θ)`: steps up to the first breakpoint `>= θ`; `-inf` beyond the last.
    pub fn value_at(&self, theta: ExtValue) -> ExtValue {
        if theta == ExtValue::NegInf {
            return self.unconstrained;
        }
        self.points
            .iter()
            .find(|(t, _)| *t >= theta)
            .map(|(_, v)| *v)
            .unwrap_or(ExtValue::NegInf)
    }

    pub fn max_feasible_theta(&self) -> Option<ExtValue> {
        self.points.last().map(|(t, _)| *t)
    }
}

pub fn pareto_frontier_pair(e: &Economy, i: usize, j: usize) -> Result<ParetoFrontierPair> {
    if i == j {
        return Err(Error::Precondition("frontier needs two distinct agents".into()));
    }
    let s = Coalition::pair(i, j);
    let (pi, pj) = (s.position(i).unwrap(), s.position(j).unwrap());
    // For each j-utility, the best i-utility exactly at it.
    let mut at: BTreeMap<ExtValue, ExtValue> = BTreeMap::new();
    let _ = for_each_s_allocation(e, s, |b| {
        let (vi, vj) = (e.value(i, b[pi]), e.value(j, b[pj]));
        let slot = at.entry(vj).or_insert(ExtValue::NegInf);
        if vi > *slot {
            *slot = vi;
        }
        ControlFlow::Continue(())
    });
    let unconstrained = at.values().copied().max().unwrap_or(ExtValue::NegInf);
    let mut points = Vec::new();
    let mut running = ExtValue::NegInf;
    for (theta, best) in at.iter().rev() {
        running = running.max(*best);
        if theta.is_finite() {
            points.push((*theta, running));
        }
    }
    points.reverse();
    Ok(ParetoFrontierPair { i, j, points, unconstrained })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DtuViolation {
    pub i: usize,
    pub j: usize,
    pub theta: ExtValue,
    pub theta_prime: ExtValue,
    pub value_at_theta: ExtValue,
    pub value_at_theta_prime: ExtValue,
}

/// First violation of `v_ij(θ) - v_ij(θ') <= θ' - θ` over ordered pairs and
/// breakpoints `θ < θ'`, if any.
pub fn discrete_tu_violation(e: &Economy) -> Result<Option<DtuViolation>> {
    let n = e.num_agents();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let f = pareto_frontier_pair(e, i, j)?;
            for (a, &(t, vt)) in f.points.iter().enumerate() {
                for &(tp, vtp) in &f.points[a + 1..] {
                    let ok = match (vt, vtp, t, tp) {
                        (ExtValue::NegInf, _, _, _) => true,
                        (ExtValue::Finite(_), ExtValue::NegInf, _, _) => false,
                        (ExtValue::Finite(x), ExtValue::Finite(y), ExtValue::Finite(t), ExtValue::Finite(tp)) => {
                            x - y <= tp - t
                        }
                        _ => unreachable!("breakpoints are finite"),
                    };
                    if !ok {
                        return Ok(Some(DtuViolation {
                            i,
                            j,
                            theta: t,
                            theta_prime: tp,
                            value_at_theta: vt,
                            value_at_theta_prime: vtp,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn check_discrete_tu(e: &Economy) -> Result<bool> {
    Ok(discrete_tu_violation(e)?.is_none())
}

pub const GFT_MAX_AGENTS: usize = 4;
pub const GFT_MAX_OBJECTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GftViolation {
    pub s: Coalition,
    pub s_prime: Coalition,
    /// S-allocation, aligned with `s.members()`.
    pub x: Vec<Bundle>,
    /// S'-allocation, aligned with `s_prime.members()`.
    pub x_prime: Vec<Bundle>,
}

#[derive(Clone, Debug, Default)]
pub struct GftReport {
    /// One violation per offending coalition pair (first witness found), pairs
    /// in coalition order.
    pub violations: Vec<GftViolation>,
}

impl GftReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-agent floors that a merged coalition must meet, given utilities `x`
/// over S and `xp` over S'. Indexed by `(S ∪ S').members()`.
fn merged_floor(s: Coalition, x: &[ExtValue], sp: Coalition, xp: &[ExtValue]) -> Vec<ExtValue> {
    let u = s.union(sp);
    u.members()
        .into_iter()
        .map(|h| match (s.position(h), sp.position(h)) {
            (Some(a), Some(b)) => x[a].min(xp[b]),
            (Some(a), None) => x[a],
            (None, Some(b)) => xp[b],
            (None, None) => unreachable!(),
        })
        .collect()
}

fn meets(floor: &[ExtValue], outcomes: &CoalitionOutcomes) -> bool {
    outcomes.frontier_vectors().any(|g| g.iter().zip(floor).all(|(a, b)| a >= b))
}

/// Gains from trade, symmetric reading: the merged coalition guarantees the
/// minimum of both payoffs to shared members and each side's own payoff to
/// the others.
///
/// Only Pareto-maximal S- and S'-allocations are tried; a dominated one imposes
/// lower floors.
pub fn check_gains_from_trade(e: &Economy, budget: Budget) -> Result<GftReport> {
    if e.num_agents() > GFT_MAX_AGENTS || e.num_objects() > GFT_MAX_OBJECTS {
        return Err(Error::Size(format!(
            "gains-from-trade check supports at most {GFT_MAX_AGENTS} agents and {GFT_MAX_OBJECTS} objects, got {} and {}",
            e.num_agents(),
            e.num_objects()
        )));
    }
    let coalitions = Coalition::all_ordered(e.num_agents());
    let outcomes: BTreeMap<u32, CoalitionOutcomes> = coalitions
        .iter()
        .map(|&s| Ok((s.0, CoalitionOutcomes::compute(e, s, budget)?)))
        .collect::<Result<_>>()?;
    let mut report = GftReport::default();
    for (a, &s) in coalitions.iter().enumerate() {
        for &sp in &coalitions[a + 1..] {
            let (os, osp, ou) = (&outcomes[&s.0], &outcomes[&sp.0], &outcomes[&s.union(sp).0]);
            'pair: for &kx in &os.frontier {
                for &kxp in &osp.frontier {
                    let floor = merged_floor(s, &os.vectors[kx], sp, &osp.vectors[kxp]);
                    if !meets(&floor, ou) {
                        report.violations.push(GftViolation {
                            s,
                            s_prime: sp,
                            x: os.witnesses[kx].clone(),
                            x_prime: osp.witnesses[kxp].clone(),
                        });
                        break 'pair;
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Whether some (S ∪ S')-allocation meets the floors induced by the given
/// S-allocation `x` and S'-allocation `x_prime`.
pub fn gains_from_trade_holds_for(
    e: &Economy,
    s: Coalition,
    x: &[Bundle],
    sp: Coalition,
    x_prime: &[Bundle],
    budget: Budget,
) -> Result<bool> {
    if !e.is_s_allocation(s, x) || !e.is_s_allocation(sp, x_prime) {
        return Err(Error::Input("arguments are not S-allocations of their coalitions".into()));
    }
    let vx: Vec<ExtValue> = s.members().into_iter().zip(x).map(|(i, b)| e.value(i, *b)).collect();
    let vxp: Vec<ExtValue> = sp.members().into_iter().zip(x_prime).map(|(i, b)| e.value(i, *b)).collect();
    let floor = merged_floor(s, &vx, sp, &vxp);
    let ou = CoalitionOutcomes::compute(e, s.union(sp), budget)?;
    Ok(meets(&floor, &ou))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::model::Utility;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    fn economy(m: usize, endow: Vec<Vec<usize>>, utils: Vec<Utility>) -> Economy {
        let objects = (0..m).map(|o| format!("o{o}")).collect();
        let agents = (0..endow.len()).map(|i| format!("{}", i + 1)).collect();
        let endowments = endow.into_iter().map(Bundle::from_indices).collect();
        Economy::new(objects, agents, endowments, utils).unwrap()
    }

    #[test]
    fn injectivity_examples() {
        let add = |w: &[i64]| Utility::Additive { weights: w.iter().map(|&v| r(v)).collect() };
        let e = economy(3, vec![vec![0, 1, 2]], vec![add(&[1, 2, 4])]);
        assert!(check_injective(&e, 0).unwrap());
        let e = economy(2, vec![vec![0, 1]], vec![Utility::Dichotomous { good: Bundle::singleton(0) }]);
        assert!(!check_injective(&e, 0).unwrap());
        let ex1 = catalog::example1();
        for i in 0..3 {
            assert!(check_injective(&ex1, i).unwrap());
        }
        // many -inf bundles do not count as ties
        let h = economy(2, vec![vec![0], vec![1]], vec![
            Utility::Housing { ranking: vec![1, 0] },
            Utility::Housing { ranking: vec![0, 1] },
        ]);
        assert!(check_injective(&h, 0).unwrap());
    }

    #[test]
    fn monotonicity_examples() {
        let e = economy(3, vec![vec![0, 1, 2]], vec![Utility::Additive { weights: vec![r(1), r(2), r(3)] }]);
        assert!(check_strictly_monotone(&e, 0, Monotonicity::Domain).unwrap());
        assert!(check_strictly_monotone(&e, 0, Monotonicity::Raw).unwrap());

        let d = economy(2, vec![vec![0, 1]], vec![Utility::Dichotomous { good: Bundle::singleton(0) }]);
        assert!(!check_strictly_monotone(&d, 0, Monotonicity::Domain).unwrap());

        let h = economy(2, vec![vec![0], vec![1]], vec![
            Utility::Housing { ranking: vec![1, 0] },
            Utility::Housing { ranking: vec![0, 1] },
        ]);
        assert!(check_strictly_monotone(&h, 0, Monotonicity::Domain).unwrap());
        assert!(!check_strictly_monotone(&h, 0, Monotonicity::Raw).unwrap());
    }

    #[test]
    fn frontier_of_common_additive_pair() {
        // Oracle: all 9 {i,j}-allocations of objects a (weight 1) and b (weight 2).
        let w = Utility::Additive { weights: vec![r(1), r(2)] };
        let e = economy(2, vec![vec![0], vec![1]], vec![w.clone(), w]);
        let mut brute: BTreeMap<i64, i64> = BTreeMap::new();
        for theta in 0..=4 {
            let mut best = i64::MIN;
            for a in 0..3 {
                for b in 0..3 {
                    let vi = [a, b].iter().zip([1, 2]).filter(|(d, _)| **d == 1).map(|(_, w)| w).sum::<i64>();
                    let vj = [a, b].iter().zip([1, 2]).filter(|(d, _)| **d == 2).map(|(_, w)| w).sum::<i64>();
                    if vj >= theta {
                        best = best.max(vi);
                    }
                }
            }
            brute.insert(theta, best);
        }
        assert_eq!(brute, BTreeMap::from([(0, 3), (1, 2), (2, 1), (3, 0), (4, i64::MIN)]));

        let f = pareto_frontier_pair(&e, 0, 1).unwrap();
        for (theta, v) in brute {
            let expected = if v == i64::MIN { ExtValue::NegInf } else { ExtValue::int(v) };
            assert_eq!(f.value_at(ExtValue::int(theta)), expected, "theta {theta}");
        }
        assert_eq!(f.value_at(ExtValue::ratio(1, 2)), ExtValue::int(2));
    }

    #[test]
    fn frontier_of_housing_pair() {
        let e = economy(2, vec![vec![0], vec![1]], vec![
            Utility::Housing { ranking: vec![1, 0] },
            Utility::Housing { ranking: vec![0, 1] },
        ]);
        let f = pareto_frontier_pair(&e, 0, 1).unwrap();
        // θ = v_2(h_2): the swap is not forced, agent 1 still gets h_2 only if 2 takes h_1.
        let theta = e.value(1, Bundle::singleton(1));
        assert_eq!(f.value_at(theta), e.value(0, Bundle::singleton(1)));
        assert_eq!(f.value_at(ExtValue::int(3)), ExtValue::NegInf);
    }

    #[test]
    fn dtu_examples() {
        let w = Utility::Additive { weights: vec![r(1), r(2)] };
        let e = economy(2, vec![vec![0], vec![1]], vec![w.clone(), w]);
        assert!(check_discrete_tu(&e).unwrap());

        // Agent 1 values o0 at 10, agent 2 values it at 1. Enumerated frontier for
        // (1,2): v(0)=11, v(1)=10, v(2)=0, so θ=0 against θ'=2 drops by 11 > 2.
        let e = economy(2, vec![vec![0], vec![1]], vec![
            Utility::Additive { weights: vec![r(10), r(1)] },
            Utility::Additive { weights: vec![r(1), r(1)] },
        ]);
        let v = discrete_tu_violation(&e).unwrap().expect("violation");
        assert_eq!((v.i, v.j), (0, 1));
        assert_eq!((v.theta, v.theta_prime), (ExtValue::int(0), ExtValue::int(2)));
        assert_eq!((v.value_at_theta, v.value_at_theta_prime), (ExtValue::int(11), ExtValue::int(0)));

        let single = economy(1, vec![vec![0]], vec![Utility::Additive { weights: vec![r(1)] }]);
        assert!(check_discrete_tu(&single).unwrap());
    }

    #[test]
    fn gft_examples() {
        let e = catalog::example2();
        let report = check_gains_from_trade(&e, Budget::default()).unwrap();
        assert!(!report.holds());
        let s = e.coalition(&["1", "2"]).unwrap();
        let sp = e.coalition(&["2", "3"]).unwrap();
        assert!(report.violations.iter().any(|v| v.s == s && v.s_prime == sp));
        let x = vec![e.bundle(&["l1", "r2"]).unwrap(), e.bundle(&["l2", "r1"]).unwrap()];
        let xp = vec![e.bundle(&["l2", "r3"]).unwrap(), e.bundle(&["l3", "r2"]).unwrap()];
        assert!(!gains_from_trade_holds_for(&e, s, &x, sp, &xp, Budget::default()).unwrap());

        let single = economy(1, vec![vec![0]], vec![Utility::Additive { weights: vec![r(1)] }]);
        assert!(check_gains_from_trade(&single, Budget::default()).unwrap().holds());

        // Each agent only values its own endowment.
        let e = economy(2, vec![vec![0], vec![1]], vec![
            Utility::Additive { weights: vec![r(1), r(0)] },
            Utility::Additive { weights: vec![r(0), r(1)] },
        ]);
        assert!(check_gains_from_trade(&e, Budget::default()).unwrap().holds());
    }
}
