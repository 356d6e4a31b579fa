//! JSON and text renderings of core types, using agent and object ids.

use exchange_core::model::{Allocation, Bundle, Coalition, Economy, ExtValue, StructuredAllocation};
use serde_json::{json, Map, Value};

pub fn coalition(agents: &[String], s: Coalition) -> Vec<String> {
    s.members().into_iter().map(|i| agents[i].clone()).collect()
}

pub fn coalition_text(agents: &[String], s: Coalition) -> String {
    format!("{{{}}}", coalition(agents, s).join(","))
}

pub fn bundle_text(e: &Economy, b: Bundle) -> String {
    format!("({})", e.bundle_names(b).join(","))
}

pub fn values(v: &[ExtValue]) -> Value {
    json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

pub fn values_text(v: &[ExtValue]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

/// `{agent: [objects]}` plus the utility vector.
pub fn allocation(e: &Economy, x: &Allocation) -> Value {
    let mut bundles = Map::new();
    for (i, b) in x.bundles().iter().enumerate() {
        bundles.insert(e.agents()[i].clone(), json!(e.bundle_names(*b)));
    }
    json!({ "bundles": bundles, "utilities": values(&e.utility_vector(x)) })
}

pub fn allocation_text(e: &Economy, x: &Allocation) -> String {
    let parts: Vec<String> = x
        .bundles()
        .iter()
        .enumerate()
        .map(|(i, b)| format!("{}:{}", e.agents()[i], bundle_text(e, *b)))
        .collect();
    format!("{}  utilities {}", parts.join(" "), values_text(&e.utility_vector(x)))
}

pub fn structured(e: &Economy, xs: &StructuredAllocation) -> Value {
    let mut v = allocation(e, xs.allocation());
    v["structure"] = json!(xs.structure().iter().map(|&s| coalition(e.agents(), s)).collect::<Vec<_>>());
    v
}

/// Bundles aligned with `s.members()`, keyed by agent.
pub fn s_allocation(e: &Economy, s: Coalition, bundles: &[Bundle]) -> Value {
    let mut m = Map::new();
    for (&i, b) in s.members().iter().zip(bundles) {
        m.insert(e.agents()[i].clone(), json!(e.bundle_names(*b)));
    }
    Value::Object(m)
}

pub fn s_allocation_text(e: &Economy, s: Coalition, bundles: &[Bundle]) -> String {
    s.members()
        .iter()
        .zip(bundles)
        .map(|(&i, b)| format!("{}:{}", e.agents()[i], bundle_text(e, *b)))
        .collect::<Vec<_>>()
        .join(" ")
}
