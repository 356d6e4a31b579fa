//! JSON file formats: economies, NTU games and fractional matrices.
//!
//! Rationals are written as `"p/q"` strings (integers as `"n"`), and `"-inf"`
//! stands for the bottom utility value. Bare JSON integers are accepted on
//! input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{Bundle, Coalition, Economy, ExtValue, Rational, Utility};
use crate::oracle::NtuGame;
use crate::rounding::{FractionalMatrix, Mode};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomyFile {
    objects: Vec<String>,
    agents: Vec<String>,
    endowments: Map<String, Value>,
    utilities: Map<String, Value>,
    #[serde(default)]
    categories: Option<Map<String, Value>>,
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    let arr = v.as_array().ok_or_else(|| Error::Input(format!("{what}: expected an array of ids")))?;
    arr.iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Input(format!("{what}: ids must be strings"))))
        .collect()
}

fn ext(v: &Value, what: &str) -> Result<ExtValue> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) => n.as_i64().map(ExtValue::int).ok_or_else(|| Error::BadRational(format!("{what}: {n}"))),
        _ => Err(Error::BadRational(format!("{what}: {v}"))),
    }
}

fn rational(v: &Value, what: &str) -> Result<Rational> {
    ext(v, what)?.finite().ok_or_else(|| Error::BadRational(format!("{what}: -inf is not allowed here")))
}

fn object_list(objects: &[String], v: &Value, what: &str) -> Result<Bundle> {
    let mut b = Bundle::EMPTY;
    for id in strings(v, what)? {
        let o = objects.iter().position(|x| *x == id).ok_or(Error::UnknownObject(id))?;
        b = b.with(o);
    }
    Ok(b)
}

fn object_key(objects: &[String], key: &str) -> Result<Bundle> {
    let mut b = Bundle::EMPTY;
    for id in key.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let o = objects.iter().position(|x| x == id).ok_or_else(|| Error::UnknownObject(id.to_string()))?;
        b = b.with(o);
    }
    Ok(b)
}

fn per_object(objects: &[String], v: &Value, what: &str) -> Result<Vec<Rational>> {
    let map = v.as_object().ok_or_else(|| Error::Input(format!("{what}: expected a map from object id to value")))?;
    let mut out = vec![Rational::from_integer(0); objects.len()];
    for (id, x) in map {
        let o = objects.iter().position(|y| y == id).ok_or_else(|| Error::UnknownObject(id.clone()))?;
        out[o] = rational(x, what)?;
    }
    Ok(out)
}

fn field<'a>(u: &'a Map<String, Value>, key: &str, agent: &str) -> Result<&'a Value> {
    u.get(key).ok_or_else(|| Error::Input(format!("utility of agent {agent}: missing field `{key}`")))
}

fn parse_utility(objects: &[String], categories: Option<&[Bundle]>, agent: &str, v: &Value) -> Result<Utility> {
    let u = v.as_object().ok_or_else(|| Error::Input(format!("utility of agent {agent}: expected an object")))?;
    let kind = field(u, "kind", agent)?.as_str().unwrap_or_default();
    let what = format!("utility of agent {agent}");
    match kind {
        "table" => {
            let m = objects.len();
            if m > 20 {
                return Err(Error::Size(format!("table utilities need at most 20 objects, got {m}")));
            }
            let default = match u.get("default") {
                Some(d) => Some(ext(d, &what)?),
                None => None,
            };
            let mut values: Vec<Option<ExtValue>> = vec![default; 1 << m];
            let map = field(u, "values", agent)?
                .as_object()
                .ok_or_else(|| Error::Input(format!("{what}: `values` must map bundles to values")))?;
            for (key, x) in map {
                values[object_key(objects, key)?.0 as usize] = Some(ext(x, &what)?);
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(mask, x)| {
                    x.ok_or_else(|| {
                        let names: Vec<&str> = Bundle(mask as u64).iter().map(|o| objects[o].as_str()).collect();
                        Error::Input(format!("{what}: no value for bundle {{{}}} and no default", names.join(",")))
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Utility::Table(values))
        }
        "dichotomous" => Ok(Utility::Dichotomous { good: object_list(objects, field(u, "good", agent)?, &what)? }),
        "categorical" => {
            let categories = categories
                .ok_or_else(|| Error::Input(format!("{what}: categorical utilities need top-level `categories`")))?
                .to_vec();
            let values = match (u.get("values"), u.get("acceptable")) {
                (Some(v), None) => per_object(objects, v, &what)?,
                (None, Some(a)) => {
                    let good = object_list(objects, a, &what)?;
                    (0..objects.len()).map(|o| Rational::from_integer(good.contains(o) as i64)).collect()
                }
                _ => return Err(Error::Input(format!("{what}: give exactly one of `values` or `acceptable`"))),
            };
            Ok(Utility::Categorical { categories, values })
        }
        "additive" => Ok(Utility::Additive { weights: per_object(objects, field(u, "weights", agent)?, &what)? }),
        "housing" => {
            let ranking = strings(field(u, "ranking", agent)?, &what)?
                .into_iter()
                .map(|id| objects.iter().position(|x| *x == id).ok_or(Error::UnknownObject(id)))
                .collect::<Result<_>>()?;
            Ok(Utility::Housing { ranking })
        }
        other => Err(Error::Input(format!(
            "{what}: unknown kind `{other}` (expected table, dichotomous, categorical, additive or housing)"
        ))),
    }
}

pub fn parse_economy(text: &str) -> Result<Economy> {
    let file: EconomyFile = serde_json::from_str(text)?;
    let objects = file.objects;
    let named_categories = match &file.categories {
        Some(map) => Some(
            map.iter()
                .map(|(name, v)| Ok((name.clone(), object_list(&objects, v, &format!("category {name}"))?)))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let category_sets: Option<Vec<Bundle>> = named_categories.as_ref().map(|c| c.iter().map(|(_, b)| *b).collect());
    let mut endowments = Vec::with_capacity(file.agents.len());
    let mut utilities = Vec::with_capacity(file.agents.len());
    for a in &file.agents {
        let w = file.endowments.get(a).ok_or_else(|| Error::Input(format!("no endowment for agent {a}")))?;
        endowments.push(object_list(&objects, w, &format!("endowment of agent {a}"))?);
        let u = file.utilities.get(a).ok_or_else(|| Error::Input(format!("no utility for agent {a}")))?;
        utilities.push(parse_utility(&objects, category_sets.as_deref(), a, u)?);
    }
    for key in file.endowments.keys().chain(file.utilities.keys()) {
        if !file.agents.contains(key) {
            return Err(Error::UnknownAgent(key.clone()));
        }
    }
    let e = Economy::new(objects, file.agents, endowments, utilities)?;
    Ok(match named_categories {
        Some(c) => e.with_categories(c),
        None => e,
    })
}

fn names(e: &Economy, b: Bundle) -> Value {
    json!(e.bundle_names(b))
}

fn utility_json(e: &Economy, u: &Utility) -> Value {
    let objects = e.objects();
    let weights = |w: &[Rational]| -> Value {
        let mut m = Map::new();
        for (o, x) in w.iter().enumerate() {
            if *x != Rational::from_integer(0) {
                m.insert(objects[o].clone(), json!(x.to_string()));
            }
        }
        Value::Object(m)
    };
    match u {
        Utility::Table(values) => {
            let mut m = Map::new();
            for (mask, v) in values.iter().enumerate() {
                m.insert(e.bundle_names(Bundle(mask as u64)).join(","), json!(v.to_string()));
            }
            json!({ "kind": "table", "values": m })
        }
        Utility::Dichotomous { good } => json!({ "kind": "dichotomous", "good": names(e, *good) }),
        Utility::Categorical { values, .. } => {
            if u.is_dichotomous_like() {
                let good = Bundle::from_indices((0..values.len()).filter(|&o| values[o] == Rational::from_integer(1)));
                json!({ "kind": "categorical", "acceptable": names(e, good) })
            } else {
                json!({ "kind": "categorical", "values": weights(values) })
            }
        }
        Utility::Additive { weights: w } => json!({ "kind": "additive", "weights": weights(w) }),
        Utility::Housing { ranking } => {
            json!({ "kind": "housing", "ranking": ranking.iter().map(|&h| objects[h].clone()).collect::<Vec<_>>() })
        }
    }
}

pub fn economy_to_json(e: &Economy) -> Value {
    let mut endowments = Map::new();
    let mut utilities = Map::new();
    for (i, a) in e.agents().iter().enumerate() {
        endowments.insert(a.clone(), names(e, e.endowment(i)));
        utilities.insert(a.clone(), utility_json(e, e.utility(i)));
    }
    let mut out = Map::new();
    out.insert("objects".into(), json!(e.objects()));
    out.insert("agents".into(), json!(e.agents()));
    out.insert("endowments".into(), Value::Object(endowments));
    out.insert("utilities".into(), Value::Object(utilities));
    if let Some(cats) = e.categories() {
        let mut m = Map::new();
        for (name, b) in cats {
            m.insert(name.clone(), names(e, *b));
        }
        out.insert("categories".into(), Value::Object(m));
    }
    Value::Object(out)
}

pub fn write_economy(e: &Economy) -> String {
    let mut s = serde_json::to_string_pretty(&economy_to_json(e)).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NtuFile {
    agents: Vec<String>,
    generators: BTreeMap<String, Vec<Vec<Value>>>,
}

pub fn parse_ntu_game(text: &str) -> Result<NtuGame> {
    let file: NtuFile = serde_json::from_str(text)?;
    let n = file.agents.len();
    if n == 0 || n > crate::model::MAX_AGENTS {
        return Err(Error::Size(format!("{n} agents")));
    }
    let mut g = NtuGame::new(file.agents.clone());
    for (key, gens) in &file.generators {
        let mut members = Vec::new();
        for id in key.split(',').map(str::trim) {
            members.push(file.agents.iter().position(|a| a == id).ok_or_else(|| Error::UnknownAgent(id.to_string()))?);
        }
        let s = Coalition::from_members(members);
        let vectors = gens
            .iter()
            .map(|v| v.iter().map(|x| ext(x, &format!("generator of coalition {key}"))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        g.set(s, vectors);
    }
    g.check_complete()?;
    Ok(g)
}

pub fn ntu_game_to_json(g: &NtuGame) -> Value {
    let mut gens = Map::new();
    for (s, vectors) in g.coalitions() {
        let key: Vec<&str> = s.members().into_iter().map(|i| g.agents()[i].as_str()).collect();
        let rows: Vec<Vec<String>> = vectors.iter().map(|v| v.iter().map(ToString::to_string).collect()).collect();
        gens.insert(key.join(","), json!(rows));
    }
    json!({ "agents": g.agents(), "generators": gens })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    mode: String,
    rows: Vec<String>,
    columns: Vec<String>,
    targets: Vec<i64>,
    entries: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    categories: Option<BTreeMap<String, Vec<String>>>,
}

pub fn parse_matrix(text: &str) -> Result<FractionalMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    let mode = match file.mode.as_str() {
        "dichotomous" => Mode::Dichotomous,
        "categorical" => Mode::Categorical,
        other => return Err(Error::Input(format!("unknown matrix mode `{other}`"))),
    };
    let entries = file
        .entries
        .iter()
        .map(|row| row.iter().map(|x| rational(x, "matrix entry")).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut categories = Vec::new();
    for (name, cols) in file.categories.unwrap_or_default() {
        let idx = cols
            .iter()
            .map(|c| file.columns.iter().position(|x| x == c).ok_or_else(|| Error::UnknownObject(c.clone())))
            .collect::<Result<Vec<_>>>()?;
        categories.push((name, idx));
    }
    if mode == Mode::Categorical && categories.is_empty() {
        return Err(Error::Input("categorical matrices need `categories`".into()));
    }
    Ok(FractionalMatrix { mode, rows: file.rows, columns: file.columns, targets: file.targets, entries, categories })
}

pub fn matrix_to_json(m: &FractionalMatrix) -> Value {
    let categories = (!m.categories.is_empty()).then(|| {
        m.categories
            .iter()
            .map(|(name, cols)| (name.clone(), cols.iter().map(|&c| m.columns[c].clone()).collect()))
            .collect()
    });
    let file = MatrixFile {
        mode: match m.mode {
            Mode::Dichotomous => "dichotomous".into(),
            Mode::Categorical => "categorical".into(),
        },
        rows: m.rows.clone(),
        columns: m.columns.clone(),
        targets: m.targets.clone(),
        entries: m.entries.iter().map(|row| row.iter().map(|x| json!(x.to_string())).collect()).collect(),
        categories,
    };
    serde_json::to_value(file).expect("JSON values serialize")
}
