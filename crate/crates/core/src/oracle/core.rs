use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::error::Result;
use crate::model::outcomes::{for_each_s_allocation, s_allocation_count};
use crate::model::{Allocation, Budget, Bundle, Coalition, CoalitionOutcomes, Economy, ExtValue};

/// A blocking coalition with the S-allocation it uses (bundles aligned with
/// `coalition.members()`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub coalition: Coalition,
    pub bundles: Vec<Bundle>,
}

/// Number of allocations of the economy's objects: `(|A|+1)^|O|`.
pub fn allocation_count(e: &Economy) -> u128 {
    s_allocation_count(e, e.grand())
}

/// Calls `f` on every allocation, each object going to one agent or to nobody.
pub fn for_each_allocation<F>(e: &Economy, budget: Budget, mut f: F) -> Result<()>
where
    F: FnMut(&Allocation) -> ControlFlow<()>,
{
    budget.check("allocations", allocation_count(e))?;
    let mut x = Allocation(vec![Bundle::EMPTY; e.num_agents()]);
    let _ = for_each_s_allocation(e, e.grand(), |b| {
        x.0.copy_from_slice(b);
        f(&x)
    });
    Ok(())
}

pub fn enumerate_allocations(e: &Economy, budget: Budget) -> Result<Vec<Allocation>> {
    let mut all = Vec::new();
    for_each_allocation(e, budget, |x| {
        all.push(x.clone());
        ControlFlow::Continue(())
    })?;
    Ok(all)
}

fn improves(candidate: &[ExtValue], current: &[ExtValue], strong: bool) -> bool {
    if strong {
        candidate.iter().zip(current).all(|(c, x)| c > x)
    } else {
        candidate.iter().zip(current).all(|(c, x)| c >= x) && candidate.iter().zip(current).any(|(c, x)| c > x)
    }
}

/// First blocking coalition (by size, then lexicographically) and its first
/// blocking S-allocation in enumeration order.
///
/// `strong = true` asks for a strong block (every member strictly better),
/// `strong = false` for a weak one.
pub fn find_block(e: &Economy, x: &Allocation, strong: bool, budget: Budget) -> Result<Option<Block>> {
    find_block_among(e, x, strong, budget, Coalition::all_ordered(e.num_agents()))
}

fn find_block_among(
    e: &Economy,
    x: &Allocation,
    strong: bool,
    budget: Budget,
    coalitions: Vec<Coalition>,
) -> Result<Option<Block>> {
    let current = e.utility_vector(x);
    for s in coalitions {
        budget.check(format!("S-allocations of coalition {s}"), s_allocation_count(e, s))?;
        let members = s.members();
        let here: Vec<ExtValue> = members.iter().map(|&i| current[i]).collect();
        let mut found = None;
        let mut vals = Vec::with_capacity(members.len());
        let _ = for_each_s_allocation(e, s, |b| {
            vals.clear();
            vals.extend(members.iter().zip(b).map(|(&i, &y)| e.value(i, y)));
            if improves(&vals, &here, strong) {
                found = Some(b.to_vec());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if let Some(bundles) = found {
            return Ok(Some(Block { coalition: s, bundles }));
        }
    }
    Ok(None)
}

/// Pareto frontiers of every coalition, used to decide blocking quickly.
struct Frontiers {
    coalitions: Vec<(Vec<usize>, Vec<Vec<ExtValue>>)>,
}

impl Frontiers {
    fn new(e: &Economy, max_size: usize, budget: Budget) -> Result<Self> {
        let mut coalitions = Vec::new();
        for s in Coalition::all_ordered(e.num_agents()) {
            if s.len() > max_size {
                continue;
            }
            let out = CoalitionOutcomes::compute(e, s, budget)?;
            coalitions.push((s.members(), out.frontier_vectors().cloned().collect()));
        }
        Ok(Frontiers { coalitions })
    }

    /// A vector improving on `current` exists iff a frontier vector does.
    fn blocked(&self, current: &[ExtValue], strong: bool) -> bool {
        self.coalitions.iter().any(|(members, frontier)| {
            let here: Vec<ExtValue> = members.iter().map(|&i| current[i]).collect();
            frontier.iter().any(|v| improves(v, &here, strong))
        })
    }
}

fn unblocked_allocations(e: &Economy, strong: bool, max_size: usize, ir: bool, budget: Budget) -> Result<Vec<Allocation>> {
    budget.check("allocations", allocation_count(e))?;
    let frontiers = Frontiers::new(e, max_size, budget)?;
    let floor = e.endowment_values();
    let mut verdict: HashMap<Vec<ExtValue>, bool> = HashMap::new();
    let mut out = Vec::new();
    for_each_allocation(e, budget, |x| {
        let u = e.utility_vector(x);
        let ok = *verdict.entry(u).or_insert_with_key(|u| {
            (!ir || u.iter().zip(&floor).all(|(a, b)| a >= b)) && !frontiers.blocked(u, strong)
        });
        if ok {
            out.push(x.clone());
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Allocations admitting no strong block, in enumeration order.
pub fn weak_core(e: &Economy, budget: Budget) -> Result<Vec<Allocation>> {
    unblocked_allocations(e, true, e.num_agents(), false, budget)
}

/// Allocations admitting no weak block, in enumeration order.
pub fn strong_core(e: &Economy, budget: Budget) -> Result<Vec<Allocation>> {
    unblocked_allocations(e, false, e.num_agents(), false, budget)
}

/// Individually rational allocations with no weak block by a coalition of at
/// most two agents.
pub fn pairwise_stable_set(e: &Economy, budget: Budget) -> Result<Vec<Allocation>> {
    unblocked_allocations(e, false, 2, true, budget)
}

/// First weak-core allocation in enumeration order, if any.
pub fn find_weak_core_allocation(e: &Economy, budget: Budget) -> Result<Option<Allocation>> {
    budget.check("allocations", allocation_count(e))?;
    let frontiers = Frontiers::new(e, e.num_agents(), budget)?;
    let mut seen: HashMap<Vec<ExtValue>, ()> = HashMap::new();
    let mut found = None;
    for_each_allocation(e, budget, |x| {
        let u = e.utility_vector(x);
        if seen.insert(u.clone(), ()).is_none() && !frontiers.blocked(&u, true) {
            found = Some(x.clone());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    Ok(found)
}

/// Is the allocation free of weak blocks by coalitions of size at most `k`?
pub fn unblocked_up_to(e: &Economy, x: &Allocation, k: usize, budget: Budget) -> Result<Option<Block>> {
    let coalitions = Coalition::all_ordered(e.num_agents()).into_iter().filter(|s| s.len() <= k).collect();
    find_block_among(e, x, false, budget, coalitions)
}
