//! Top Trading Cycles on Shapley–Scarf housing markets, clearing every cycle
//! of the top-choice graph in each round.

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Economy, Utility};

/// An economy in which every agent owns exactly one house and ranks all
/// houses strictly.
#[derive(Clone, Debug)]
pub struct HousingMarket {
    economy: Economy,
    /// `owner[h]` is the agent endowed with house `h`.
    owner: Vec<usize>,
    rankings: Vec<Vec<usize>>,
}

impl HousingMarket {
    pub fn new(economy: Economy) -> Result<Self> {
        let n = economy.num_agents();
        if economy.num_objects() != n {
            return Err(Error::Precondition(format!(
                "housing market needs as many houses as agents ({} objects, {n} agents)",
                economy.num_objects()
            )));
        }
        let mut owner = vec![usize::MAX; n];
        for i in 0..n {
            let w = economy.endowment(i);
            if w.len() != 1 {
                return Err(Error::Precondition(format!("agent {} does not own exactly one house", economy.agents()[i])));
            }
            let h = w.iter().next().expect("singleton");
            if owner[h] != usize::MAX {
                return Err(Error::Precondition(format!("house {} has two owners", economy.objects()[h])));
            }
            owner[h] = i;
        }
        let mut rankings = Vec::with_capacity(n);
        for i in 0..n {
            let Utility::Housing { ranking } = economy.utility(i) else {
                return Err(Error::Precondition(format!("agent {} does not have a housing utility", economy.agents()[i])));
            };
            let mut seen = vec![false; n];
            for &h in ranking {
                if h >= n || std::mem::replace(&mut seen[h], true) {
                    return Err(Error::Precondition(format!(
                        "ranking of agent {} is not a strict order over the houses",
                        economy.agents()[i]
                    )));
                }
            }
            if seen.contains(&false) {
                return Err(Error::Precondition(format!("ranking of agent {} omits a house", economy.agents()[i])));
            }
            rankings.push(ranking.clone());
        }
        Ok(HousingMarket { economy, owner, rankings })
    }

    pub fn economy(&self) -> &Economy {
        &self.economy
    }

    pub fn ranking(&self, i: usize) -> &[usize] {
        &self.rankings[i]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtcResult {
    /// House received by each agent.
    pub assignment: Vec<usize>,
    /// Agents clearing in each round, ascending.
    pub rounds: Vec<Vec<usize>>,
    /// Per round, each cycle as the agent sequence following pointers from
    /// its smallest member.
    pub cycles: Vec<Vec<Vec<usize>>>,
}

impl TtcResult {
    /// Round (1-based) in which agent `i` clears.
    pub fn round_of(&self, i: usize) -> usize {
        self.rounds.iter().position(|r| r.contains(&i)).expect("rounds partition the agents") + 1
    }
}

pub fn run_ttc(m: &HousingMarket) -> TtcResult {
    let n = m.economy.num_agents();
    let mut remaining = vec![true; n];
    let mut assignment = vec![usize::MAX; n];
    let mut rounds = Vec::new();
    let mut cycles = Vec::new();
    while remaining.contains(&true) {
        let top: Vec<usize> = (0..n)
            .map(|i| {
                if !remaining[i] {
                    return usize::MAX;
                }
                *m.rankings[i].iter().find(|&&h| remaining[m.owner[h]]).expect("own house remains")
            })
            .collect();
        let points_to = |i: usize| m.owner[top[i]];
        let mut on_cycle = vec![false; n];
        let mut round_cycles = Vec::new();
        for start in (0..n).filter(|&i| remaining[i]) {
            if on_cycle[start] {
                continue;
            }
            let mut path = vec![start];
            let mut at = points_to(start);
            while !path.contains(&at) && !on_cycle[at] {
                path.push(at);
                at = points_to(at);
            }
            if on_cycle[at] {
                continue;
            }
            let pos = path.iter().position(|&a| a == at).expect("cycle closes on the path");
            let cycle = &path[pos..];
            let lo = cycle.iter().enumerate().min_by_key(|(_, &a)| a).map(|(k, _)| k).expect("nonempty");
            let ordered: Vec<usize> = cycle[lo..].iter().chain(&cycle[..lo]).copied().collect();
            for &a in &ordered {
                on_cycle[a] = true;
            }
            round_cycles.push(ordered);
        }
        let mut cleared: Vec<usize> = (0..n).filter(|&i| on_cycle[i]).collect();
        cleared.sort_unstable();
        for &i in &cleared {
            assignment[i] = top[i];
        }
        for &i in &cleared {
            remaining[i] = false;
        }
        round_cycles.sort();
        rounds.push(cleared);
        cycles.push(round_cycles);
    }
    TtcResult { assignment, rounds, cycles }
}

impl TtcResult {
    pub fn allocation(&self) -> Allocation {
        Allocation(self.assignment.iter().map(|&h| Bundle::singleton(h)).collect())
    }
}

pub fn ttc_allocation(m: &HousingMarket) -> Allocation {
    run_ttc(m).allocation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn market(rankings: &[Vec<usize>]) -> HousingMarket {
        HousingMarket::new(catalog::housing(rankings)).unwrap()
    }

    #[test]
    fn identity_market_clears_in_one_round() {
        let m = market(&[vec![0, 1, 2], vec![1, 0, 2], vec![2, 1, 0]]);
        let r = run_ttc(&m);
        assert_eq!(r.assignment, vec![0, 1, 2]);
        assert_eq!(r.rounds, vec![vec![0, 1, 2]]);
        assert_eq!(ttc_allocation(&m), Allocation::endowment(m.economy()));
    }

    #[test]
    fn swap_then_leftover() {
        let m = market(&[vec![1, 0, 2], vec![0, 1, 2], vec![0, 2, 1]]);
        let r = run_ttc(&m);
        assert_eq!(r.rounds, vec![vec![0, 1], vec![2]]);
        assert_eq!(r.assignment, vec![1, 0, 2]);
        assert_eq!(r.cycles[0], vec![vec![0, 1]]);
    }

    #[test]
    fn three_rotation() {
        let m = market(&[vec![1, 0, 2], vec![2, 1, 0], vec![0, 2, 1]]);
        let r = run_ttc(&m);
        assert_eq!(r.rounds, vec![vec![0, 1, 2]]);
        assert_eq!(r.cycles, vec![vec![vec![0, 1, 2]]]);
        assert_eq!(r.assignment, vec![1, 2, 0]);
    }

    #[test]
    fn malformed_markets_are_rejected() {
        let e = catalog::housing(&[vec![0, 0], vec![1, 0]]);
        assert!(HousingMarket::new(e).is_err());
        let e = catalog::housing(&[vec![0], vec![1, 0]]);
        assert!(HousingMarket::new(e).is_err());
        assert!(HousingMarket::new(catalog::example2()).is_err());
    }
}
