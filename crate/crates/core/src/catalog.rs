//! Bundled instances: the two shoe economies, the roommate game, the
//! four-agent left/right shoe economy with a cardinal separable table, and a
//! few small markets used throughout the tests.
//!
//! Ordinal bundle lists are completed into injective tables with
//! [`Utility::ordinal_table`]: listed bundles get `n, n-1, ..., 1` and every
//! unlisted bundle a distinct negative value, i.e. below the endowment.

use crate::model::{Allocation, Bundle, Economy, ExtValue, Rational, Utility};
use crate::oracle::NtuGame;

pub const SHOES: [&str; 6] = ["l1", "l2", "l3", "r1", "r2", "r3"];

fn strings<S: AsRef<str>>(v: &[S]) -> Vec<String> {
    v.iter().map(|s| s.as_ref().to_string()).collect()
}

fn idx(objects: &[&str], id: &str) -> usize {
    objects.iter().position(|o| *o == id).expect("known object")
}

fn bundle(objects: &[&str], ids: &[&str]) -> Bundle {
    Bundle::from_indices(ids.iter().map(|id| idx(objects, id)))
}

fn shoe_economy(ranked: [&[[&str; 2]]; 3]) -> Economy {
    let endowments = (1..=3)
        .map(|k| bundle(&SHOES, &[&format!("l{k}"), &format!("r{k}")]))
        .collect();
    let utilities = ranked
        .iter()
        .map(|list| {
            let bundles: Vec<Bundle> = list.iter().map(|pair| bundle(&SHOES, pair)).collect();
            Utility::ordinal_table(SHOES.len(), &bundles)
        })
        .collect();
    Economy::new(strings(&SHOES), strings(&["1", "2", "3"]), endowments, utilities).expect("well-formed")
}

/// Three shoe owners whose weak core contains two allocations but whose strong
/// core contains only one.
///
/// Agent 3's list repeats its endowment pair; the repeat is dropped.
pub fn example1() -> Economy {
    shoe_economy([
        &[["l2", "r3"], ["l3", "r1"], ["l1", "r1"]],
        &[["l3", "r1"], ["l2", "r3"], ["l2", "r2"]],
        &[["l1", "r2"], ["l3", "r3"]],
    ])
}

pub fn example1_x(e: &Economy) -> Allocation {
    named(e, &[&["l2", "r3"], &["l3", "r1"], &["l1", "r2"]])
}

pub fn example1_y(e: &Economy) -> Allocation {
    named(e, &[&["l3", "r1"], &["l2", "r3"], &["l1", "r2"]])
}

/// Three shoe owners with an empty weak core.
pub fn example2() -> Economy {
    shoe_economy([
        &[["l1", "r2"], ["l3", "r1"], ["l1", "r1"]],
        &[["l2", "r3"], ["l2", "r1"], ["l2", "r2"]],
        &[["l1", "r3"], ["l3", "r2"], ["l3", "r3"]],
    ])
}

pub fn example2_x(e: &Economy) -> Allocation {
    named(e, &[&["l1", "r2"], &["l2", "r1"], &["l3", "r3"]])
}

pub fn example2_y(e: &Economy) -> Allocation {
    named(e, &[&["l1", "r1"], &["l2", "r3"], &["l3", "r2"]])
}

pub fn example2_z(e: &Economy) -> Allocation {
    named(e, &[&["l3", "r1"], &["l2", "r2"], &["l1", "r3"]])
}

pub fn named(e: &Economy, bundles: &[&[&str]]) -> Allocation {
    Allocation(bundles.iter().map(|ids| e.bundle(ids).expect("known objects")).collect())
}

pub const KONISHI_OBJECTS: [&str; 8] = ["l1", "l2", "l3", "l4", "r1", "r2", "r3", "r4"];

/// Per-agent `(left value, right value)` for shoe pairs 1..4.
pub const KONISHI_TABLE: [[(i64, i64); 4]; 4] = [
    [(1, 3), (0, 2), (0, 0), (3, 0)],
    [(3, 5), (5, 1), (0, 2), (0, 0)],
    [(0, 0), (0, 3), (5, 1), (2, 5)],
    [(0, 0), (2, 0), (5, 3), (1, 5)],
];

/// Ordinal preferences the cardinal table is meant to represent: bundles
/// strictly preferred to the endowment, best first, then the endowment.
pub const KONISHI_ORDINAL: [&[[&str; 2]]; 4] = [
    &[["l4", "r1"], ["l4", "r2"], ["l1", "r1"]],
    &[["l2", "r1"], ["l1", "r1"], ["l2", "r3"], ["l2", "r2"]],
    &[["l3", "r4"], ["l3", "r2"], ["l4", "r4"], ["l3", "r3"]],
    &[["l3", "r4"], ["l3", "r3"], ["l2", "r4"], ["l4", "r4"]],
];

/// Four-agent, two-category (left/right) economy with additively separable
/// cardinal utilities and an empty weak core.
pub fn konishi() -> Economy {
    let objs = &KONISHI_OBJECTS;
    let left = bundle(objs, &["l1", "l2", "l3", "l4"]);
    let right = bundle(objs, &["r1", "r2", "r3", "r4"]);
    let utilities = KONISHI_TABLE
        .iter()
        .map(|row| {
            let mut values = vec![Rational::from_integer(0); 8];
            for (k, &(l, r)) in row.iter().enumerate() {
                values[k] = Rational::from_integer(l);
                values[4 + k] = Rational::from_integer(r);
            }
            Utility::Categorical { categories: vec![left, right], values }
        })
        .collect();
    let endowments = (1..=4).map(|k| bundle(objs, &[&format!("l{k}"), &format!("r{k}")])).collect();
    Economy::new(strings(objs), strings(&["1", "2", "3", "4"]), endowments, utilities)
        .expect("well-formed")
        .with_categories(vec![("l".into(), left), ("r".into(), right)])
}

/// Three-agent roommate problem entered directly as an NTU game: a partner
/// ranked first is worth 2, second 1, living alone 0.
pub fn roommate_game() -> NtuGame {
    let v = |xs: &[i64]| xs.iter().map(|&x| ExtValue::int(x)).collect::<Vec<_>>();
    let mut g = NtuGame::new(strings(&["1", "2", "3"]));
    use crate::model::Coalition as C;
    g.set(C::singleton(0), vec![v(&[0])]);
    g.set(C::singleton(1), vec![v(&[0])]);
    g.set(C::singleton(2), vec![v(&[0])]);
    g.set(C::pair(0, 1), vec![v(&[2, 1])]);
    g.set(C::pair(0, 2), vec![v(&[1, 2])]);
    g.set(C::pair(1, 2), vec![v(&[2, 1])]);
    g.set(C::grand(3), vec![v(&[2, 1, 0]), v(&[1, 0, 2]), v(&[0, 2, 1])]);
    g
}

/// Dichotomous chain: agents 1–2 and 2–3 find each other's single object
/// acceptable, 1 and 3 do not.
pub fn dichotomous_chain() -> Economy {
    let objs = ["a1", "a2", "a3"];
    let endowments = (0..3).map(Bundle::singleton).collect();
    let utilities = vec![
        Utility::Dichotomous { good: bundle(&objs, &["a2"]) },
        Utility::Dichotomous { good: bundle(&objs, &["a1", "a3"]) },
        Utility::Dichotomous { good: bundle(&objs, &["a2"]) },
    ];
    Economy::new(strings(&objs), strings(&["1", "2", "3"]), endowments, utilities).expect("well-formed")
}

/// Shapley–Scarf housing market; `rankings[i]` lists house indices, best first.
/// Agent `i` owns house `i`.
pub fn housing(rankings: &[Vec<usize>]) -> Economy {
    let n = rankings.len();
    let objects = (1..=n).map(|k| format!("h{k}")).collect();
    let agents = (1..=n).map(|k| k.to_string()).collect();
    let endowments = (0..n).map(Bundle::singleton).collect();
    let utilities = rankings.iter().map(|r| Utility::Housing { ranking: r.clone() }).collect();
    Economy::new(objects, agents, endowments, utilities).expect("well-formed")
}

/// Additive economy with one weight vector shared by every agent.
pub fn additive_common(weights: &[i64], endowments: &[&[usize]]) -> Economy {
    let m = weights.len();
    let n = endowments.len();
    let w = Utility::Additive { weights: weights.iter().map(|&x| Rational::from_integer(x)).collect() };
    Economy::new(
        (0..m).map(|o| format!("o{}", o + 1)).collect(),
        (1..=n).map(|k| k.to_string()).collect(),
        endowments.iter().map(|e| Bundle::from_indices(e.iter().copied())).collect(),
        vec![w; n],
    )
    .expect("well-formed")
}
