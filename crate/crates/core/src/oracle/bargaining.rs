use crate::error::Result;
use crate::model::{Budget, Bundle, Coalition, CoalitionOutcomes, Economy, ExtValue, StructuredAllocation};

/// A pair trade `(Y_i, Y_j)` between agents `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTrade {
    pub pair: (usize, usize),
    pub bundles: (Bundle, Bundle),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BargainingVerdict {
    pub in_set: bool,
    /// Distinct objections examined (objections with equal utility pairs are
    /// examined once).
    pub objections: usize,
    /// An objection that no pair could counter, when `in_set` is false.
    pub unanswered: Option<PairTrade>,
    /// For each examined objection, the counterobjection found.
    pub answered: Vec<(PairTrade, PairTrade)>,
}

fn weakly_improves(candidate: &[ExtValue], current: &[ExtValue]) -> bool {
    candidate.iter().zip(current).all(|(c, x)| c >= x) && candidate.iter().zip(current).any(|(c, x)| c > x)
}

/// Decides membership in the pairwise bargaining set.
///
/// For an objection by `{i, j}`, the derived allocation gives the objectors
/// their new bundles, sends every other agent whose trading coalition contains
/// an objector back to their endowment, and leaves everyone else unchanged. A
/// counterobjection is an objection to that derived allocation by a pair
/// sharing exactly one agent with `{i, j}`.
pub fn pairwise_bargaining_set(e: &Economy, xs: &StructuredAllocation, budget: Budget) -> Result<BargainingVerdict> {
    let n = e.num_agents();
    let x = xs.allocation();
    let current = e.utility_vector(x);
    let mut pairs = Vec::new();
    for s in Coalition::all_ordered(n).into_iter().filter(|s| s.len() == 2) {
        pairs.push(CoalitionOutcomes::compute(e, s, budget)?);
    }
    let mut verdict = BargainingVerdict { in_set: true, objections: 0, unanswered: None, answered: Vec::new() };
    for obj in &pairs {
        let m = obj.coalition.members();
        let (i, j) = (m[0], m[1]);
        let here = [current[i], current[j]];
        for (k, v) in obj.vectors.iter().enumerate() {
            if !weakly_improves(v, &here) {
                continue;
            }
            verdict.objections += 1;
            let y = &obj.witnesses[k];
            let objection = PairTrade { pair: (i, j), bundles: (y[0], y[1]) };
            let mut bar = current.clone();
            for (h, value) in bar.iter_mut().enumerate() {
                if h == i || h == j {
                    continue;
                }
                let s = xs.coalition_of(h);
                if s.contains(i) || s.contains(j) {
                    *value = e.value(h, e.endowment(h));
                }
            }
            bar[i] = v[0];
            bar[j] = v[1];
            match counter(&pairs, obj.coalition, &bar) {
                Some(c) => verdict.answered.push((objection, c)),
                None => {
                    verdict.in_set = false;
                    verdict.unanswered = Some(objection);
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

fn counter(pairs: &[CoalitionOutcomes], objectors: Coalition, bar: &[ExtValue]) -> Option<PairTrade> {
    for out in pairs {
        if out.coalition.intersection(objectors).len() != 1 {
            continue;
        }
        let m = out.coalition.members();
        let here = [bar[m[0]], bar[m[1]]];
        for &k in &out.frontier {
            if weakly_improves(&out.vectors[k], &here) {
                let w = &out.witnesses[k];
                return Some(PairTrade { pair: (m[0], m[1]), bundles: (w[0], w[1]) });
            }
        }
    }
    None
}
