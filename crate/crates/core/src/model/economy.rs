use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use super::bundle::{MAX_AGENTS, MAX_OBJECTS};
use super::{Allocation, Bundle, Coalition, ExtValue, Utility};
use crate::error::{Error, Result};

/// Largest object count for which full per-agent value tables are cached.
const CACHE_OBJECTS: usize = 20;

/// An exchange economy: objects, agents, endowments and one utility per agent.
///
/// Construction only checks shapes (counts, table sizes). Whether the
/// endowments partition the objects is reported by [`Economy::validate`].
#[derive(Clone, Debug)]
pub struct Economy {
    objects: Vec<String>,
    agents: Vec<String>,
    endowments: Vec<Bundle>,
    utilities: Vec<Utility>,
    categories: Option<Vec<(String, Bundle)>>,
    tables: OnceLock<Vec<Vec<ExtValue>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    OverlappingEndowments { object: String, agents: Vec<String> },
    EmptyEndowment { agent: String },
    UnownedObject { object: String },
    CategoriesNotPartition { object: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OverlappingEndowments { object, agents } => {
                write!(f, "overlapping endowments: object {object} owned by {}", agents.join(", "))
            }
            Violation::EmptyEndowment { agent } => write!(f, "empty endowment: agent {agent}"),
            Violation::UnownedObject { object } => write!(f, "unowned object: {object}"),
            Violation::CategoriesNotPartition { object } => {
                write!(f, "categories do not partition objects: object {object}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Economy {
    pub fn new(
        objects: Vec<String>,
        agents: Vec<String>,
        endowments: Vec<Bundle>,
        utilities: Vec<Utility>,
    ) -> Result<Self> {
        let m = objects.len();
        let n = agents.len();
        if m > MAX_OBJECTS {
            return Err(Error::Size(format!("{m} objects (max {MAX_OBJECTS})")));
        }
        if n == 0 || n > MAX_AGENTS {
            return Err(Error::Size(format!("{n} agents (need 1..={MAX_AGENTS})")));
        }
        if endowments.len() != n || utilities.len() != n {
            return Err(Error::Input(format!(
                "{n} agents but {} endowments and {} utilities",
                endowments.len(),
                utilities.len()
            )));
        }
        let all = Bundle::full(m);
        for (i, w) in endowments.iter().enumerate() {
            if !w.is_subset(all) {
                return Err(Error::Input(format!("endowment of {} names unknown objects", agents[i])));
            }
        }
        for (i, u) in utilities.iter().enumerate() {
            if let Utility::Table(t) = u {
                if m >= usize::BITS as usize || t.len() != 1usize << m {
                    return Err(Error::Input(format!(
                        "table utility of {} has {} entries, expected 2^{m}",
                        agents[i],
                        t.len()
                    )));
                }
            }
        }
        Ok(Economy { objects, agents, endowments, utilities, categories: None, tables: OnceLock::new() })
    }

    pub fn with_categories(mut self, categories: Vec<(String, Bundle)>) -> Self {
        self.categories = Some(categories);
        self
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn endowment(&self, i: usize) -> Bundle {
        self.endowments[i]
    }

    pub fn endowments(&self) -> &[Bundle] {
        &self.endowments
    }

    pub fn utility(&self, i: usize) -> &Utility {
        &self.utilities[i]
    }

    pub fn utilities(&self) -> &[Utility] {
        &self.utilities
    }

    pub fn categories(&self) -> Option<&[(String, Bundle)]> {
        self.categories.as_deref()
    }

    pub fn all_objects(&self) -> Bundle {
        Bundle::full(self.num_objects())
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.num_agents())
    }

    pub fn object_index(&self, id: &str) -> Result<usize> {
        self.objects.iter().position(|o| o == id).ok_or_else(|| Error::UnknownObject(id.to_string()))
    }

    pub fn agent_index(&self, id: &str) -> Result<usize> {
        self.agents.iter().position(|a| a == id).ok_or_else(|| Error::UnknownAgent(id.to_string()))
    }

    pub fn bundle<S: AsRef<str>>(&self, ids: &[S]) -> Result<Bundle> {
        ids.iter().try_fold(Bundle::EMPTY, |b, id| Ok(b.with(self.object_index(id.as_ref())?)))
    }

    pub fn coalition<S: AsRef<str>>(&self, ids: &[S]) -> Result<Coalition> {
        let members = ids.iter().map(|id| self.agent_index(id.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Coalition::from_members(members))
    }

    pub fn bundle_names(&self, b: Bundle) -> Vec<String> {
        b.iter().map(|o| self.objects[o].clone()).collect()
    }

    /// Combined endowment of a coalition.
    pub fn pool(&self, s: Coalition) -> Bundle {
        s.members().into_iter().fold(Bundle::EMPTY, |b, i| b.union(self.endowments[i]))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (o, name) in self.objects.iter().enumerate() {
            let owners: Vec<String> = (0..self.num_agents())
                .filter(|&i| self.endowments[i].contains(o))
                .map(|i| self.agents[i].clone())
                .collect();
            match owners.len() {
                0 => violations.push(Violation::UnownedObject { object: name.clone() }),
                1 => {}
                _ => violations.push(Violation::OverlappingEndowments { object: name.clone(), agents: owners }),
            }
        }
        for (i, w) in self.endowments.iter().enumerate() {
            if w.is_empty() {
                violations.push(Violation::EmptyEndowment { agent: self.agents[i].clone() });
            }
        }
        if let Some(cats) = &self.categories {
            for (o, name) in self.objects.iter().enumerate() {
                if cats.iter().filter(|(_, c)| c.contains(o)).count() != 1 {
                    violations.push(Violation::CategoriesNotPartition { object: name.clone() });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Utility of agent `i` for bundle `x`; rejects bundles with unknown objects.
    pub fn eval(&self, i: usize, x: Bundle) -> Result<ExtValue> {
        if !x.is_subset(self.all_objects()) {
            return Err(Error::Input(format!("bundle {x} contains unknown objects")));
        }
        if i >= self.num_agents() {
            return Err(Error::Input(format!("agent index {i} out of range")));
        }
        Ok(self.value(i, x))
    }

    /// Unchecked evaluation; cached for small object counts.
    #[inline]
    pub fn value(&self, i: usize, x: Bundle) -> ExtValue {
        if self.num_objects() <= CACHE_OBJECTS {
            self.tables()[i][x.0 as usize]
        } else {
            self.utilities[i].eval(x)
        }
    }

    fn tables(&self) -> &Vec<Vec<ExtValue>> {
        self.tables.get_or_init(|| {
            let size = 1usize << self.num_objects();
            self.utilities
                .iter()
                .map(|u| (0..size).map(|mask| u.eval(Bundle(mask as u64))).collect())
                .collect()
        })
    }

    pub fn endowment_values(&self) -> Vec<ExtValue> {
        (0..self.num_agents()).map(|i| self.value(i, self.endowments[i])).collect()
    }

    /// True iff `bundles` (aligned with `s.members()`) are pairwise disjoint and
    /// drawn from the coalition's combined endowment.
    pub fn is_s_allocation(&self, s: Coalition, bundles: &[Bundle]) -> bool {
        if s.is_empty() || bundles.len() != s.len() {
            return false;
        }
        let pool = self.pool(s);
        let mut used = Bundle::EMPTY;
        for b in bundles {
            if !b.is_disjoint(used) || !b.is_subset(pool) {
                return false;
            }
            used = used.union(*b);
        }
        true
    }

    pub fn utility_vector(&self, x: &Allocation) -> Vec<ExtValue> {
        x.bundles().iter().enumerate().map(|(i, b)| self.value(i, *b)).collect()
    }

    pub fn is_individually_rational(&self, x: &Allocation) -> bool {
        (0..self.num_agents()).all(|i| self.value(i, x.bundle(i)) >= self.value(i, self.endowments[i]))
    }
}
