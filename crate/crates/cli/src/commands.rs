use std::fs;
use std::path::Path;

use exchange_core::catalog;
use exchange_core::generate::{generate, Family, InstanceSpec};
use exchange_core::io;
use exchange_core::model::properties::{
    discrete_tu_violation, injectivity_violation, monotonicity_violation, GftReport,
};
use exchange_core::model::{
    check_gains_from_trade, Allocation, Budget, Bundle, Coalition, Economy, Monotonicity, StructuredAllocation,
};
use exchange_core::oracle::{
    self, build_ntu_game, check_balanced, check_ordinal_convexity, ntu_weak_core, pairwise_bargaining_set,
    BargainingVerdict, NtuGame,
};
use exchange_core::rounding::{round_categorical, round_dichotomous, FractionalMatrix, Mode};
use exchange_core::toperator::{
    check_t_fixed_point, classify_and_pair, construct_bargaining_allocation, iterate_to_fixed_point, TContext,
};
use exchange_core::ttc::{run_ttc, HousingMarket};
use serde_json::{json, Value};

use crate::render::{self, coalition, coalition_text};
use crate::{CheckArgs, CheckKind, ExampleArgs, ExampleName, FamilyArg, Failure, GenArgs, Outcome, SolveArgs, Solver};

type Res = Result<Outcome, Failure>;

const COMPLETION_RULE: &str = "ordinal lists are completed into injective tables: listed bundles get n, n-1, ..., 1 \
     (best first) and every unlisted bundle a distinct negative value";

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn with_input<T>(bytes: &[u8], r: exchange_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.input = Some(bytes.to_vec());
        f
    })
}

fn load_economy(path: &Path) -> Result<(Economy, Vec<u8>), Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let e = with_input(&bytes, io::parse_economy(&text))?;
    Ok((e, bytes))
}

/// Loads a file that is either an NTU game (has `generators`) or an economy,
/// returning the game and, for economies, the economy.
fn load_game(path: &Path, budget: Budget) -> Result<(NtuGame, Option<Economy>, Vec<u8>), Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let probe: Value = with_input(&bytes, serde_json::from_str(&text).map_err(Into::into))?;
    if probe.get("generators").is_some() {
        let g = with_input(&bytes, io::parse_ntu_game(&text))?;
        Ok((g, None, bytes))
    } else {
        let e = with_input(&bytes, io::parse_economy(&text))?;
        let g = with_input(&bytes, build_ntu_game(&e, budget))?;
        Ok((g, Some(e), bytes))
    }
}

pub fn validate(path: &Path) -> Res {
    let (e, bytes) = load_economy(path)?;
    let report = e.validate();
    let mut text = vec![format!(
        "{} agents, {} objects: {}",
        e.num_agents(),
        e.num_objects(),
        if report.is_ok() { "valid" } else { "invalid" }
    )];
    text.extend(report.violations.iter().map(|v| format!("  {v}")));
    let result = json!({
        "valid": report.is_ok(),
        "agents": e.num_agents(),
        "objects": e.num_objects(),
        "violations": report.violations,
    });
    Ok(Outcome::new(report.is_ok(), result, text).with_input(bytes))
}

fn allocation_list(e: &Economy, name: &str, xs: &[Allocation]) -> Outcome {
    let mut text = vec![format!("{name}: {} allocation(s)", xs.len())];
    text.extend(xs.iter().map(|x| format!("  {}", render::allocation_text(e, x))));
    let result = json!({
        "solver": name,
        "count": xs.len(),
        "allocations": xs.iter().map(|x| render::allocation(e, x)).collect::<Vec<_>>(),
    });
    Outcome::new(true, result, text)
}

fn parse_structure(e: &Economy, spec: &str) -> Result<Vec<Coalition>, Failure> {
    spec.split(';')
        .map(|part| {
            let ids: Vec<&str> = part.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            e.coalition(&ids).map_err(Failure::from)
        })
        .collect()
}

fn parse_allocation(e: &Economy, spec: &str) -> Result<Allocation, Failure> {
    let parts: Vec<&str> = spec.split(';').collect();
    if parts.len() != e.num_agents() {
        return Err(Failure::from(exchange_core::Error::Input(format!(
            "allocation lists {} bundles for {} agents",
            parts.len(),
            e.num_agents()
        ))));
    }
    let bundles = parts
        .iter()
        .map(|part| {
            let ids: Vec<&str> = part.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            e.bundle(&ids).map_err(Failure::from)
        })
        .collect::<Result<Vec<Bundle>, Failure>>()?;
    Ok(Allocation(bundles))
}

fn verdict_json(e: &Economy, v: &BargainingVerdict) -> Value {
    let trade = |t: &oracle::PairTrade| {
        let s = Coalition::pair(t.pair.0, t.pair.1);
        json!({
            "pair": coalition(e.agents(), s),
            "bundles": render::s_allocation(e, s, &[t.bundles.0, t.bundles.1]),
        })
    };
    json!({
        "in_pairwise_bargaining_set": v.in_set,
        "objections_examined": v.objections,
        "unanswered_objection": v.unanswered.as_ref().map(trade),
        "counterobjections": v.answered.iter().map(|(o, c)| json!({ "objection": trade(o), "counter": trade(c) })).collect::<Vec<_>>(),
    })
}

fn verdict_text(e: &Economy, v: &BargainingVerdict) -> Vec<String> {
    let mut text = vec![format!("in pairwise bargaining set: {}", v.in_set)];
    text.push(format!("  objections examined: {}", v.objections));
    if let Some(t) = &v.unanswered {
        let s = Coalition::pair(t.pair.0, t.pair.1);
        text.push(format!(
            "  unanswered objection by {}: {}",
            coalition_text(e.agents(), s),
            render::s_allocation_text(e, s, &[t.bundles.0, t.bundles.1])
        ));
    }
    text
}

/// Injectivity, strict monotonicity on finite values, and discrete TU.
fn bargaining_preconditions(e: &Economy) -> Result<(), Failure> {
    for i in 0..e.num_agents() {
        if let Some((a, b)) = injectivity_violation(e, i)? {
            return Err(Failure::precondition(format!(
                "check injective failed: agent {} values {} and {} equally",
                e.agents()[i],
                render::bundle_text(e, a),
                render::bundle_text(e, b)
            )));
        }
        if let Some((a, b)) = monotonicity_violation(e, i, Monotonicity::Domain)? {
            return Err(Failure::precondition(format!(
                "check monotone failed: agent {} does not strictly prefer {} to {}",
                e.agents()[i],
                render::bundle_text(e, b),
                render::bundle_text(e, a)
            )));
        }
    }
    if let Some(v) = discrete_tu_violation(e)? {
        return Err(Failure::precondition(format!(
            "check dtu failed: agents {} and {} at θ = {}, θ' = {}",
            e.agents()[v.i],
            e.agents()[v.j],
            v.theta,
            v.theta_prime
        )));
    }
    Ok(())
}

pub fn solve(args: &SolveArgs, budget: Budget) -> Res {
    let (e, bytes) = load_economy(&args.path)?;
    let outcome = match args.solver {
        Solver::WeakCore => with_input(&bytes, oracle::weak_core(&e, budget).map(|xs| allocation_list(&e, "weak core", &xs)))?,
        Solver::StrongCore => with_input(&bytes, oracle::strong_core(&e, budget).map(|xs| allocation_list(&e, "strong core", &xs)))?,
        Solver::PairwiseStable => {
            with_input(&bytes, oracle::pairwise_stable_set(&e, budget).map(|xs| allocation_list(&e, "pairwise stable set", &xs)))?
        }
        Solver::Ttc => {
            let market = with_input(&bytes, HousingMarket::new(e.clone()))?;
            let r = run_ttc(&market);
            let agents = e.agents();
            let house = |i: usize| e.objects()[r.assignment[i]].clone();
            let mut text = Vec::new();
            for (k, (round, cycles)) in r.rounds.iter().zip(&r.cycles).enumerate() {
                let cs: Vec<String> = cycles
                    .iter()
                    .map(|c| c.iter().map(|&i| agents[i].as_str()).collect::<Vec<_>>().join("→"))
                    .collect();
                text.push(format!("round {}: cycles {} ({} agents)", k + 1, cs.join(" "), round.len()));
            }
            for i in 0..e.num_agents() {
                text.push(format!("  {} gets {}", agents[i], house(i)));
            }
            let assignment: serde_json::Map<String, Value> =
                (0..e.num_agents()).map(|i| (agents[i].clone(), json!(house(i)))).collect();
            let rounds: Vec<Value> = r
                .cycles
                .iter()
                .map(|cycles| json!(cycles.iter().map(|c| c.iter().map(|&i| agents[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>()))
                .collect();
            Outcome::new(true, json!({ "solver": "ttc", "rounds": rounds, "assignment": assignment }), text)
        }
        Solver::Talgo => {
            let ctx = with_input(&bytes, TContext::new(&e, args.k, budget))?;
            let trace = with_input(&bytes, iterate_to_fixed_point(&ctx))?;
            let fixed = with_input(&bytes, check_t_fixed_point(&ctx, &trace.fixed_point))?;
            let mut text = vec![format!("k = {}, {} applications of T", args.k, trace.steps())];
            for (t, u) in trace.iterates.iter().enumerate() {
                text.push(format!("  T^{t} = {}", render::values_text(u)));
            }
            text.push(format!("fixed point of T²: {}", render::values_text(&trace.fixed_point)));
            match &fixed {
                Some(x) => text.push(format!("fixed point of T; allocation {}", render::allocation_text(&e, x))),
                None => text.push("not a fixed point of T".into()),
            }
            let result = json!({
                "solver": "talgo",
                "k": args.k,
                "iterates": trace.iterates.iter().map(|u| render::values(u)).collect::<Vec<_>>(),
                "fixed_point": render::values(&trace.fixed_point),
                "sandwich_violation": trace.sandwich_violation(),
                "t_fixed_point_allocation": fixed.as_ref().map(|x| render::allocation(&e, x)),
            });
            Outcome::new(true, result, text)
        }
        Solver::Bargaining => {
            if let Some(spec) = &args.allocation {
                let x = parse_allocation(&e, spec)?;
                let structure = parse_structure(&e, args.structure.as_deref().unwrap_or_default())?;
                let xs = with_input(&bytes, StructuredAllocation::new(&e, x, structure))?;
                let v = with_input(&bytes, pairwise_bargaining_set(&e, &xs, budget))?;
                let mut text = vec![format!("allocation {}", render::allocation_text(&e, xs.allocation()))];
                text.extend(verdict_text(&e, &v));
                let result = json!({ "solver": "bargaining", "allocation": render::structured(&e, &xs), "certificate": verdict_json(&e, &v) });
                Outcome::new(v.in_set, result, text)
            } else {
                if args.k != 2 {
                    return Err(Failure::precondition(format!("bargaining uses k = 2, got --k {}", args.k)));
                }
                if args.structure.is_some() {
                    return Err(Failure::precondition("--structure needs --allocation".into()));
                }
                bargaining_preconditions(&e).map_err(|mut f| {
                    f.input = Some(bytes.clone());
                    f
                })?;
                let ctx = with_input(&bytes, TContext::new(&e, 2, budget))?;
                let trace = with_input(&bytes, iterate_to_fixed_point(&ctx))?;
                let pairing = with_input(&bytes, classify_and_pair(&ctx, &trace.fixed_point))?;
                let xs = with_input(&bytes, construct_bargaining_allocation(&ctx, &pairing))?;
                let v = with_input(&bytes, pairwise_bargaining_set(&e, &xs, budget))?;
                let ir = e.is_individually_rational(xs.allocation());
                let structure: Vec<String> = xs.structure().iter().map(|&s| coalition_text(e.agents(), s)).collect();
                let mut text = vec![
                    format!("fixed point of T²: {} after {} applications", render::values_text(&pairing.u), trace.steps()),
                    format!("allocation {}", render::allocation_text(&e, xs.allocation())),
                    format!("structure {}", structure.join(" ")),
                    format!("individually rational: {ir}"),
                ];
                text.extend(verdict_text(&e, &v));
                let names = |v: &[usize]| v.iter().map(|&i| e.agents()[i].clone()).collect::<Vec<_>>();
                let result = json!({
                    "solver": "bargaining",
                    "fixed_point": render::values(&pairing.u),
                    "image": render::values(&pairing.tu),
                    "a1": names(&pairing.a1),
                    "a2": names(&pairing.a2),
                    "pairs": pairing.pairs.iter().map(|&(a, b)| names(&[a, b])).collect::<Vec<_>>(),
                    "allocation": render::structured(&e, &xs),
                    "individually_rational": ir,
                    "certificate": verdict_json(&e, &v),
                });
                Outcome::new(v.in_set && ir, result, text)
            }
        }
    };
    Ok(outcome.with_input(bytes))
}

fn gft_outcome(e: &Economy, report: &GftReport) -> Outcome {
    let agents = e.agents();
    let mut text = vec![format!("gains from trade: {}", report.holds())];
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            text.push(format!(
                "  S = {} with {}, S' = {} with {}: no (S ∪ S')-allocation matches",
                coalition_text(agents, v.s),
                render::s_allocation_text(e, v.s, &v.x),
                coalition_text(agents, v.s_prime),
                render::s_allocation_text(e, v.s_prime, &v.x_prime),
            ));
            json!({
                "s": coalition(agents, v.s),
                "s_prime": coalition(agents, v.s_prime),
                "x": render::s_allocation(e, v.s, &v.x),
                "x_prime": render::s_allocation(e, v.s_prime, &v.x_prime),
            })
        })
        .collect();
    Outcome::new(report.holds(), json!({ "check": "gft", "holds": report.holds(), "violations": violations }), text)
}

fn balanced_outcome(g: &NtuGame, budget_ok: exchange_core::Result<Option<oracle::BalanceViolation>>) -> Res {
    let v = budget_ok?;
    let agents = g.agents();
    let mut text = vec![format!("balanced: {}", v.is_none())];
    let witness = v.as_ref().map(|v| {
        let parts: Vec<String> = v
            .collection
            .coalitions
            .iter()
            .zip(&v.collection.weights)
            .map(|(&s, w)| format!("{}×{w}", coalition_text(agents, s)))
            .collect();
        text.push(format!(
            "  collection {} shares u = {} outside V(A)",
            parts.join(" "),
            render::values_text(&v.u)
        ));
        json!({
            "collection": v.collection.coalitions.iter().map(|&s| coalition(agents, s)).collect::<Vec<_>>(),
            "weights": v.collection.weights.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "u": render::values(&v.u),
        })
    });
    Ok(Outcome::new(v.is_none(), json!({ "check": "balanced", "holds": v.is_none(), "violation": witness }), text))
}

fn convex_outcome(g: &NtuGame, r: exchange_core::Result<Option<oracle::ConvexityViolation>>) -> Res {
    let v = r?;
    let agents = g.agents();
    let mut text = vec![format!("ordinally convex: {}", v.is_none())];
    let witness = v.as_ref().map(|v| {
        let u: Vec<String> = v.u.iter().map(|x| x.map_or("*".into(), |x| x.to_string())).collect();
        text.push(format!(
            "  S = {}, S' = {}: u = ({}) lies in V(S) ∩ V(S') but not in V(S ∩ S') ∪ V(S ∪ S')",
            coalition_text(agents, v.s),
            coalition_text(agents, v.s_prime),
            u.join(", ")
        ));
        json!({ "s": coalition(agents, v.s), "s_prime": coalition(agents, v.s_prime), "u": u })
    });
    Ok(Outcome::new(v.is_none(), json!({ "check": "convex", "holds": v.is_none(), "violation": witness }), text))
}

fn per_agent_check(
    e: &Economy,
    name: &str,
    f: impl Fn(usize) -> exchange_core::Result<Option<(Bundle, Bundle)>>,
) -> Res {
    let mut text = Vec::new();
    let mut agents = Vec::new();
    let mut holds = true;
    for i in 0..e.num_agents() {
        let v = f(i)?;
        holds &= v.is_none();
        match v {
            None => text.push(format!("  {}: ok", e.agents()[i])),
            Some((a, b)) => text.push(format!(
                "  {}: violated by {} and {}",
                e.agents()[i],
                render::bundle_text(e, a),
                render::bundle_text(e, b)
            )),
        }
        agents.push(json!({
            "agent": e.agents()[i],
            "holds": v.is_none(),
            "witness": v.map(|(a, b)| json!([e.bundle_names(a), e.bundle_names(b)])),
        }));
    }
    text.insert(0, format!("{name}: {holds}"));
    Ok(Outcome::new(holds, json!({ "check": name, "holds": holds, "agents": agents }), text))
}

pub fn check(args: &CheckArgs, budget: Budget) -> Res {
    match args.check {
        CheckKind::Balanced | CheckKind::Convex => {
            let (g, _, bytes) = load_game(&args.path, budget)?;
            let out = match args.check {
                CheckKind::Balanced => balanced_outcome(&g, check_balanced(&g)),
                _ => convex_outcome(&g, check_ordinal_convexity(&g)),
            };
            return out.map(|o| o.with_input(bytes.clone())).map_err(|mut f| {
                f.input = Some(bytes);
                f
            });
        }
        _ => {}
    }
    let (e, bytes) = load_economy(&args.path)?;
    let out = match args.check {
        CheckKind::Injective => per_agent_check(&e, "injective", |i| injectivity_violation(&e, i)),
        CheckKind::Monotone => {
            let mode = if args.raw { Monotonicity::Raw } else { Monotonicity::Domain };
            per_agent_check(&e, "monotone", |i| monotonicity_violation(&e, i, mode))
        }
        CheckKind::Dtu => discrete_tu_violation(&e).map_err(Failure::from).map(|v| {
            let mut text = vec![format!("discrete transferable utility: {}", v.is_none())];
            let witness = v.map(|v| {
                text.push(format!(
                    "  agents {} and {}: v({}) - v({}) = {} - {} exceeds {} - {}",
                    e.agents()[v.i],
                    e.agents()[v.j],
                    v.theta,
                    v.theta_prime,
                    v.value_at_theta,
                    v.value_at_theta_prime,
                    v.theta_prime,
                    v.theta
                ));
                json!({
                    "i": e.agents()[v.i],
                    "j": e.agents()[v.j],
                    "theta": v.theta.to_string(),
                    "theta_prime": v.theta_prime.to_string(),
                    "value_at_theta": v.value_at_theta.to_string(),
                    "value_at_theta_prime": v.value_at_theta_prime.to_string(),
                })
            });
            let holds = witness.is_none();
            Outcome::new(holds, json!({ "check": "dtu", "holds": holds, "violation": witness }), text)
        }),
        CheckKind::Gft => check_gains_from_trade(&e, budget).map_err(Failure::from).map(|r| gft_outcome(&e, &r)),
        CheckKind::Balanced | CheckKind::Convex => unreachable!("handled above"),
    };
    out.map(|o| o.with_input(bytes.clone())).map_err(|mut f| {
        f.input = Some(bytes);
        f
    })
}

pub fn gen(args: &GenArgs) -> Res {
    let family = match args.family {
        FamilyArg::Dichotomous => Family::Dichotomous,
        FamilyArg::Categorical => Family::Categorical,
        FamilyArg::Housing => Family::Housing,
        FamilyArg::AdditiveCommon => Family::AdditiveCommon,
        FamilyArg::AdditiveFree => Family::AdditiveFree,
    };
    let spec = InstanceSpec {
        family,
        agents: args.agents,
        objects: args.objects.unwrap_or(args.agents),
        categories: args.categories,
        per_category: args.per_category,
        seed: args.seed,
    };
    let e = generate(&spec)?;
    let file = io::write_economy(&e);
    let mut result = json!({
        "family": family.name(),
        "agents": e.num_agents(),
        "objects": e.num_objects(),
        "seed": args.seed,
    });
    let text = match &args.out {
        Some(path) => {
            fs::write(path, &file).map_err(|err| Failure::io(path, err))?;
            result["path"] = json!(path.display().to_string());
            vec![format!(
                "wrote {} economy ({} agents, {} objects, seed {}) to {}",
                family,
                e.num_agents(),
                e.num_objects(),
                args.seed,
                path.display()
            )]
        }
        None => {
            result["economy"] = io::economy_to_json(&e);
            vec![file.trim_end().to_string()]
        }
    };
    let mut o = Outcome::new(true, result, text).with_input(file.into_bytes());
    o.seed = Some(args.seed);
    Ok(o)
}

fn write_instance(dir: &Option<std::path::PathBuf>, name: &str, contents: &str) -> Result<Option<String>, Failure> {
    match dir {
        None => Ok(None),
        Some(d) => {
            fs::create_dir_all(d).map_err(|err| Failure::io(d, err))?;
            let path = d.join(name);
            fs::write(&path, contents).map_err(|err| Failure::io(&path, err))?;
            Ok(Some(path.display().to_string()))
        }
    }
}

pub fn examples(args: &ExampleArgs, budget: Budget) -> Res {
    let economy_file = |e: &Economy| io::write_economy(e);
    let (file_name, contents, mut outcome) = match args.name {
        ExampleName::Ex1 => {
            let e = catalog::example1();
            let (x, y) = (catalog::example1_x(&e), catalog::example1_y(&e));
            let strong = oracle::strong_core(&e, budget)?;
            let weak = oracle::weak_core(&e, budget)?;
            let holds = strong == [x.clone()] && weak.contains(&x) && weak.contains(&y);
            let text = vec![
                format!("strong core = {{X}}: {}", strong == [x.clone()]),
                format!("X, Y in weak core: {}", weak.contains(&x) && weak.contains(&y)),
                format!("  X = {}", render::allocation_text(&e, &x)),
                format!("  Y = {}", render::allocation_text(&e, &y)),
                format!("weak core size {}, strong core size {}", weak.len(), strong.len()),
            ];
            let result = json!({
                "claim": "strong core = {X}; X and Y in weak core",
                "holds": holds,
                "x": render::allocation(&e, &x),
                "y": render::allocation(&e, &y),
                "weak_core": weak.iter().map(|a| render::allocation(&e, a)).collect::<Vec<_>>(),
                "strong_core": strong.iter().map(|a| render::allocation(&e, a)).collect::<Vec<_>>(),
                "completion_rule": COMPLETION_RULE,
            });
            ("ex1.json", economy_file(&e), Outcome::new(holds, result, text))
        }
        ExampleName::Ex2 => {
            let e = catalog::example2();
            let weak = oracle::weak_core(&e, budget)?;
            let cycle = [
                ("X", catalog::example2_x(&e), Coalition::pair(1, 2)),
                ("Y", catalog::example2_y(&e), Coalition::pair(0, 2)),
                ("Z", catalog::example2_z(&e), Coalition::pair(0, 1)),
            ];
            let mut holds = weak.is_empty();
            let mut text = vec![format!("weak core empty: {}", weak.is_empty())];
            let mut blocks = Vec::new();
            for (name, x, expected) in cycle {
                let block = oracle::find_block(&e, &x, true, budget)?;
                let ok = block.as_ref().is_some_and(|b| b.coalition == expected);
                holds &= ok;
                match &block {
                    Some(b) => {
                        text.push(format!(
                            "  {name} = {} blocked by {}: {}",
                            render::allocation_text(&e, &x),
                            coalition_text(e.agents(), b.coalition),
                            render::s_allocation_text(&e, b.coalition, &b.bundles)
                        ));
                        blocks.push(json!({
                            "allocation": name,
                            "coalition": coalition(e.agents(), b.coalition),
                            "bundles": render::s_allocation(&e, b.coalition, &b.bundles),
                        }));
                    }
                    None => text.push(format!("  {name} is not blocked")),
                }
            }
            let result = json!({
                "claim": "weak core empty; X blocked by {2,3}, Y by {1,3}, Z by {1,2}",
                "holds": holds,
                "weak_core_size": weak.len(),
                "blocks": blocks,
                "completion_rule": COMPLETION_RULE,
            });
            ("ex2.json", economy_file(&e), Outcome::new(holds, result, text))
        }
        ExampleName::ShoesGft => {
            let e = catalog::example2();
            let report = check_gains_from_trade(&e, budget)?;
            let want = (Coalition::pair(0, 1), Coalition::pair(1, 2));
            let found = report.violations.iter().any(|v| (v.s, v.s_prime) == want);
            let mut o = gft_outcome(&e, &report);
            o.text.insert(0, format!("violation for S = {{1,2}}, S' = {{2,3}}: {found}"));
            o.holds = found;
            o.result["claim"] = json!("gains from trade fails for S = {1,2}, S' = {2,3}");
            o.result["completion_rule"] = json!(COMPLETION_RULE);
            ("shoes-gft.json", economy_file(&e), o)
        }
        ExampleName::Konishi => {
            let e = catalog::konishi();
            let weak = oracle::weak_core(&e, budget)?;
            let pair = |ids: [&str; 2]| e.value(0, e.bundle(&ids).expect("known objects"));
            let (a, b) = (pair(["l4", "r1"]), pair(["l4", "r2"]));
            let holds = weak.is_empty() && a > b;
            let text = vec![
                format!("weak core empty: {}", weak.is_empty()),
                format!("agent 1: v(l4,r1) = {a} > v(l4,r2) = {b}: {}", a > b),
            ];
            let result = json!({
                "claim": "weak core empty under the cardinal table",
                "holds": holds,
                "weak_core_size": weak.len(),
                "agent1_l4_r1": a.to_string(),
                "agent1_l4_r2": b.to_string(),
            });
            ("konishi.json", economy_file(&e), Outcome::new(holds, result, text))
        }
        ExampleName::Roommate => {
            let g = catalog::roommate_game();
            let core = ntu_weak_core(&g)?;
            let unbalanced = check_balanced(&g)?;
            let holds = core.is_empty() && unbalanced.is_some();
            let text = vec![
                format!("NTU core empty: {}", core.is_empty()),
                format!("balanced: {}", unbalanced.is_none()),
            ];
            let result = json!({
                "claim": "core empty; game not balanced",
                "holds": holds,
                "core": core.iter().map(|u| render::values(u)).collect::<Vec<_>>(),
                "balance_violation": unbalanced.map(|v| render::values(&v.u)),
            });
            let contents = serde_json::to_string_pretty(&io::ntu_game_to_json(&g)).expect("serializes") + "\n";
            ("roommate.ntu.json", contents, Outcome::new(holds, result, text))
        }
    };
    if let Some(path) = write_instance(&args.out, file_name, &contents)? {
        outcome.text.push(format!("wrote {path}"));
        outcome.result["path"] = json!(path);
    }
    Ok(outcome.with_input(contents.into_bytes()))
}

pub fn round(path: &Path) -> Res {
    let bytes = read(path)?;
    let m: FractionalMatrix = with_input(&bytes, io::parse_matrix(&String::from_utf8_lossy(&bytes)))?;
    let outcome = match m.mode {
        Mode::Dichotomous => {
            let run = with_input(&bytes, round_dichotomous(&m))?;
            let mut text = vec![format!("{} fractional entries, {} passes", run.initial_fractional, run.passes.len())];
            for (k, p) in run.passes.iter().enumerate() {
                text.push(format!("  pass {}: {:?} ε = {} → {} fractional", k + 1, p.kind, p.epsilon, p.fractional));
            }
            text.push(run.matrix.to_string().trim_end().to_string());
            let passes: Vec<Value> = run
                .passes
                .iter()
                .map(|p| json!({ "kind": format!("{:?}", p.kind).to_lowercase(), "epsilon": p.epsilon.to_string(), "fractional": p.fractional }))
                .collect();
            let assignment = assignment_json(&m, &run.matrix.assigned_columns());
            let result = json!({
                "mode": "dichotomous",
                "initial_fractional": run.initial_fractional,
                "passes": passes,
                "assignment": assignment,
                "matrix": io::matrix_to_json(&run.matrix),
            });
            Outcome::new(true, result, text)
        }
        Mode::Categorical => {
            let run = with_input(&bytes, round_categorical(&m))?;
            let mut text = vec![format!(
                "{} preprocessing steps, {} rounding steps (bound {})",
                run.preprocessing_steps, run.rounding_steps, run.bound
            )];
            for (r, cols) in run.assignments.iter().enumerate() {
                let names: Vec<&str> = cols.iter().map(|&c| m.columns[c].as_str()).collect();
                text.push(format!("  {} gets ({})", m.rows[r], names.join(",")));
            }
            let result = json!({
                "mode": "categorical",
                "preprocessing_steps": run.preprocessing_steps,
                "rounding_steps": run.rounding_steps,
                "bound": run.bound,
                "fractional_trace": run.fractional_trace,
                "assignment": assignment_json(&m, &run.assignments),
            });
            Outcome::new(true, result, text)
        }
    };
    Ok(outcome.with_input(bytes))
}

fn assignment_json(m: &FractionalMatrix, per_row: &[Vec<usize>]) -> Value {
    let map: serde_json::Map<String, Value> = per_row
        .iter()
        .enumerate()
        .map(|(r, cols)| (m.rows[r].clone(), json!(cols.iter().map(|&c| m.columns[c].clone()).collect::<Vec<_>>())))
        .collect();
    Value::Object(map)
}
