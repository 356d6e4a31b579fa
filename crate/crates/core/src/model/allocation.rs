use serde::Serialize;

use super::{Bundle, Coalition, Economy};
use crate::error::{Error, Result};

/// One bundle per agent, indexed like `Economy::agents`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation(pub Vec<Bundle>);

impl Allocation {
    pub fn bundles(&self) -> &[Bundle] {
        &self.0
    }

    pub fn bundle(&self, i: usize) -> Bundle {
        self.0[i]
    }

    pub fn endowment(e: &Economy) -> Self {
        Allocation(e.endowments().to_vec())
    }

    /// Pairwise disjoint, one bundle per agent, all objects known.
    pub fn is_valid(&self, e: &Economy) -> bool {
        if self.0.len() != e.num_agents() {
            return false;
        }
        let all = e.all_objects();
        let mut used = Bundle::EMPTY;
        for b in &self.0 {
            if !b.is_subset(all) || !b.is_disjoint(used) {
                return false;
            }
            used = used.union(*b);
        }
        true
    }

    pub fn restrict(&self, s: Coalition) -> Vec<Bundle> {
        s.members().into_iter().map(|i| self.0[i]).collect()
    }

    pub fn to_named(&self, e: &Economy) -> Vec<NamedBundle> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, b)| NamedBundle { agent: e.agents()[i].clone(), bundle: e.bundle_names(*b) })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedBundle {
    pub agent: String,
    pub bundle: Vec<String>,
}

/// An allocation together with the trading coalitions that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredAllocation {
    allocation: Allocation,
    structure: Vec<Coalition>,
}

impl StructuredAllocation {
    /// Checks that `structure` partitions the agents and that each coalition's
    /// bundles form an S-allocation.
    pub fn new(e: &Economy, allocation: Allocation, mut structure: Vec<Coalition>) -> Result<Self> {
        if !allocation.is_valid(e) {
            return Err(Error::Input("not an allocation (overlapping bundles or wrong arity)".into()));
        }
        let mut covered = 0u32;
        for s in &structure {
            if s.is_empty() || s.0 & covered != 0 || !s.is_subset(e.grand()) {
                return Err(Error::Input(format!("coalition structure is not a partition at {s}")));
            }
            covered |= s.0;
        }
        if covered != e.grand().0 {
            return Err(Error::Input("coalition structure does not cover every agent".into()));
        }
        for s in &structure {
            if !e.is_s_allocation(*s, &allocation.restrict(*s)) {
                return Err(Error::Input(format!(
                    "bundles of coalition {s} are not drawn from its own endowments"
                )));
            }
        }
        structure.sort();
        Ok(StructuredAllocation { allocation, structure })
    }

    pub fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    pub fn structure(&self) -> &[Coalition] {
        &self.structure
    }

    pub fn coalition_of(&self, i: usize) -> Coalition {
        *self.structure.iter().find(|s| s.contains(i)).expect("structure covers every agent")
    }
}

/// Finest partition of the agents such that every part trades only among itself:
/// agents are linked when one holds an object from the other's endowment.
pub fn trading_components(e: &Economy, x: &Allocation) -> Vec<Coalition> {
    let n = e.num_agents();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], a: usize) -> usize {
        let mut r = a;
        while p[r] != r {
            r = p[r];
        }
        let mut c = a;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for holder in 0..n {
        for o in x.bundle(holder).iter() {
            if let Some(owner) = (0..n).find(|&g| e.endowment(g).contains(o)) {
                let (a, b) = (find(&mut parent, holder), find(&mut parent, owner));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut parts: Vec<Coalition> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match parts.iter_mut().find(|c| c.members()[0] == root) {
            Some(c) => *c = c.union(Coalition::singleton(i)),
            None => parts.push(Coalition::singleton(i)),
        }
    }
    parts.sort();
    parts
}
