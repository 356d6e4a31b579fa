use std::process::ExitCode;
use std::time::Instant;

use exchange_core::catalog;
use exchange_core::generate::{generate, Family, InstanceSpec};
use exchange_core::model::properties::check_gains_from_trade;
use exchange_core::model::{Budget, Bundle, Coalition, Economy, ExtValue, Utility};
use exchange_core::oracle::{
    build_ntu_game, check_balanced, check_ordinal_convexity, find_block, find_weak_core_allocation,
    intersection_maxima, minimal_balanced_collections, ntu_weak_core, pairwise_bargaining_set, strong_core, weak_core,
    BalancedCollection, Cap, NtuGame,
};
use exchange_core::rounding::{
    allocation_from_columns, build_matrix, find_witness, round_categorical, round_dichotomous, targets_from_profile,
};
use exchange_core::toperator::{
    apply_t, check_t_fixed_point, classify_and_pair, construct_bargaining_allocation, iterate_to_fixed_point,
    ttc_equivalence_trace, TContext,
};
use exchange_core::ttc::{run_ttc, HousingMarket};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn b() -> Budget {
    Budget::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt<T: std::fmt::Debug>(r: exchange_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Fractional counts seen during rounding runs, for the rounding-law criterion.
#[derive(Default)]
struct RoundingLog {
    runs: usize,
    failures: Vec<String>,
}

impl RoundingLog {
    fn record_dichotomous(&mut self, label: &str, initial: usize, counts: &[usize]) {
        self.runs += 1;
        let mut prev = initial;
        for (k, &c) in counts.iter().enumerate() {
            if c >= prev {
                self.failures.push(format!("{label}: pass {} left {c} fractional entries after {prev}", k + 1));
                return;
            }
            prev = c;
        }
    }

    fn record_categorical(&mut self) {
        self.runs += 1;
    }

    fn fail(&mut self, label: &str, err: String) {
        self.runs += 1;
        self.failures.push(format!("{label}: {err}"));
    }
}

fn example1() -> Outcome {
    let e = catalog::example1();
    let (x, y) = (catalog::example1_x(&e), catalog::example1_y(&e));
    let strong = fmt(strong_core(&e, b()))?;
    let weak = fmt(weak_core(&e, b()))?;
    ensure(strong == [x.clone()], || format!("strong core has {} allocations, expected exactly X", strong.len()))?;
    ensure(weak.contains(&x) && weak.contains(&y), || "X or Y missing from the weak core".into())?;
    Ok(format!("strong core = {{X}}, weak core has {} allocations including X and Y", weak.len()))
}

fn example2() -> Outcome {
    let e = catalog::example2();
    ensure(fmt(weak_core(&e, b()))?.is_empty(), || "weak core is not empty".into())?;
    let cases = [
        ("X", catalog::example2_x(&e), Coalition::pair(1, 2)),
        ("Y", catalog::example2_y(&e), Coalition::pair(0, 2)),
        ("Z", catalog::example2_z(&e), Coalition::pair(0, 1)),
    ];
    for (name, x, s) in cases {
        let block = fmt(find_block(&e, &x, true, b()))?.ok_or_else(|| format!("{name} is not blocked"))?;
        ensure(block.coalition == s, || format!("{name} blocked by {}, expected {s}", block.coalition))?;
        let current = e.utility_vector(&x);
        for (&i, &bundle) in s.members().iter().zip(&block.bundles) {
            ensure(e.value(i, bundle) > current[i], || format!("block of {name} does not improve agent {i}"))?;
        }
        let target = match name {
            "X" => catalog::example2_y(&e),
            "Y" => catalog::example2_z(&e),
            _ => catalog::example2_x(&e),
        };
        for (&i, &bundle) in s.members().iter().zip(&block.bundles) {
            ensure(e.value(i, bundle) <= e.value(i, target.bundle(i)), || {
                format!("block of {name} gives agent {i} more than the next allocation of the cycle")
            })?;
        }
    }
    Ok("weak core empty; X←{2,3}, Y←{1,3}, Z←{1,2} certified".into())
}

fn konishi() -> Outcome {
    let e = catalog::konishi();
    ensure(fmt(weak_core(&e, b()))?.is_empty(), || "weak core is not empty".into())?;
    let pair = |i: usize, ids: [&str; 2]| e.value(i, e.bundle(&ids).expect("known objects"));
    ensure(pair(0, ["l4", "r1"]) == ExtValue::int(6) && pair(0, ["l4", "r2"]) == ExtValue::int(5), || {
        "agent 1: l4+r1 should be 3+3 and l4+r2 should be 3+2".into()
    })?;
    for (i, list) in catalog::KONISHI_ORDINAL.iter().enumerate() {
        let values: Vec<ExtValue> = list.iter().map(|p| pair(i, *p)).collect();
        ensure(values.windows(2).all(|w| w[0] > w[1]), || format!("agent {} list is not strictly decreasing", i + 1))?;
        let own = e.value(i, e.endowment(i));
        ensure(values.last() == Some(&own), || format!("agent {} list does not end at the endowment", i + 1))?;
        let mut above = 0;
        for l in 0..4 {
            for r in 4..8 {
                if e.value(i, Bundle::from_indices([l, r])) > own {
                    above += 1;
                }
            }
        }
        ensure(above == list.len() - 1, || format!("agent {} ranks {above} pairs above the endowment", i + 1))?;
    }
    Ok("weak core empty; 3+3 > 3+2 and all four ordinal lists reproduced".into())
}

fn roommate() -> Outcome {
    let g = catalog::roommate_game();
    ensure(fmt(ntu_weak_core(&g))?.is_empty(), || "NTU weak core is not empty".into())?;
    let v = fmt(check_balanced(&g))?.ok_or_else(|| "game reported balanced".to_string())?;
    Ok(format!("NTU core empty; unbalanced at u = {:?}", v.u.iter().map(ToString::to_string).collect::<Vec<_>>()))
}

fn sizes(rng: &mut ChaCha8Rng, max_agents: usize, max_objects: usize) -> (usize, usize) {
    let n = rng.gen_range(1..=max_agents);
    let m = rng.gen_range(n..=max_objects);
    (n, m)
}

/// Collections other than the grand coalition, in a seeded order.
fn sample_collections(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<BalancedCollection> {
    let grand = Coalition::grand(n);
    let mut all: Vec<BalancedCollection> = minimal_balanced_collections(n)
        .expect("small n")
        .into_iter()
        .filter(|bc| bc.coalitions != [grand])
        .collect();
    all.shuffle(rng);
    all.truncate(count);
    all
}

fn profile(p: &[Cap]) -> Vec<ExtValue> {
    p.iter().map(|c| c.value().expect("collection covers every agent")).collect()
}

/// Rounds the witness matrix of `bc` at every maximal point of the
/// intersection and checks the resulting allocation meets the targets.
fn round_collection(
    e: &Economy,
    g: &NtuGame,
    bc: &BalancedCollection,
    label: &str,
    log: &mut RoundingLog,
) -> Result<usize, String> {
    let mut runs = 0;
    for p in intersection_maxima(g, &bc.coalitions) {
        let u = profile(&p);
        let targets = fmt(targets_from_profile(&u))?;
        let witnesses = bc
            .coalitions
            .iter()
            .map(|&s| fmt(find_witness(e, s, &targets, b()))?.ok_or_else(|| format!("{label}: no witness for {s}")))
            .collect::<Result<Vec<_>, String>>()?;
        let matrix = fmt(build_matrix(e, bc, &witnesses, &targets))?;
        let run_label = format!("{label} collection {:?} targets {targets:?}", bc.coalitions);
        let x = match matrix.mode {
            exchange_core::rounding::Mode::Dichotomous => match round_dichotomous(&matrix) {
                Ok(run) => {
                    let counts: Vec<usize> = run.passes.iter().map(|p| p.fractional).collect();
                    log.record_dichotomous(&run_label, run.initial_fractional, &counts);
                    allocation_from_columns(e, &run.matrix.assigned_columns())
                }
                Err(err) => {
                    log.fail(&run_label, err.to_string());
                    return Err(format!("{run_label}: {err}"));
                }
            },
            exchange_core::rounding::Mode::Categorical => match round_categorical(&matrix) {
                Ok(run) => {
                    log.record_categorical();
                    if run.rounding_steps > run.bound {
                        return Err(format!("{run_label}: {} passes exceed bound {}", run.rounding_steps, run.bound));
                    }
                    allocation_from_columns(e, &run.assignments)
                }
                Err(err) => {
                    log.fail(&run_label, err.to_string());
                    return Err(format!("{run_label}: {err}"));
                }
            },
        };
        ensure(x.is_valid(e), || format!("{run_label}: rounded bundles overlap"))?;
        for (i, &t) in targets.iter().enumerate() {
            ensure(e.value(i, x.bundle(i)) >= ExtValue::int(t), || {
                format!("{run_label}: agent {i} gets {} below target {t}", e.value(i, x.bundle(i)))
            })?;
        }
        runs += 1;
    }
    Ok(runs)
}

fn dichotomous_suite(log: &mut RoundingLog) -> Outcome {
    let mut rounded = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = sizes(&mut rng, 4, 6);
        let e = fmt(generate(&InstanceSpec::new(Family::Dichotomous, n, m, seed)))?;
        let label = format!("seed {seed} ({n} agents, {m} objects)");
        ensure(fmt(find_weak_core_allocation(&e, b()))?.is_some(), || format!("{label}: weak core empty"))?;
        let g = fmt(build_ntu_game(&e, b()))?;
        if let Some(v) = fmt(check_balanced(&g))? {
            return Err(format!("{label}: unbalanced at {:?}", v.collection.coalitions));
        }
        for bc in sample_collections(&mut rng, n, 3) {
            rounded += round_collection(&e, &g, &bc, &label, log)?;
        }
    }
    Ok(format!("200 economies: weak core nonempty, games balanced; {rounded} rounding runs met their targets"))
}

fn categorical_suite(log: &mut RoundingLog) -> Outcome {
    let mut rounded = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let k = rng.gen_range(1..=3);
        let per = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=(k * per).min(4));
        let e = fmt(generate(&InstanceSpec::categorical(n, k, per, seed)))?;
        let label = format!("seed {seed} ({n} agents, {k}×{per} objects)");
        ensure(fmt(find_weak_core_allocation(&e, b()))?.is_some(), || format!("{label}: weak core empty"))?;
        let g = fmt(build_ntu_game(&e, b()))?;
        for bc in sample_collections(&mut rng, n, 3) {
            rounded += round_collection(&e, &g, &bc, &label, log)?;
        }
    }
    Ok(format!("200 economies: weak core nonempty; {rounded} rounding runs within their pass bound and met their targets"))
}

fn rounding_laws(log: &RoundingLog) -> Outcome {
    ensure(log.runs > 0, || "no rounding runs recorded".into())?;
    match log.failures.first() {
        None => Ok(format!("{} runs, fractional count strictly decreasing, invariants held", log.runs)),
        Some(f) => Err(format!("{} of {} runs failed; first: {f}", log.failures.len(), log.runs)),
    }
}

fn random_table_economy(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Economy {
    let base = generate(&InstanceSpec::new(Family::Dichotomous, n, m, rng.gen())).expect("valid sizes");
    let utilities = (0..n)
        .map(|_| {
            let mut values: Vec<i64> = (0..1i64 << m).collect();
            values.shuffle(rng);
            Utility::Table(values.into_iter().map(ExtValue::int).collect())
        })
        .collect();
    Economy::new(base.objects().to_vec(), base.agents().to_vec(), base.endowments().to_vec(), utilities)
        .expect("well-formed")
}

fn gains_from_trade_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut tried, mut accepted) = (0, 0);
    while accepted < 40 && tried < 2000 {
        tried += 1;
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(n..=5);
        let e = random_table_economy(&mut rng, n, m);
        if !fmt(check_gains_from_trade(&e, b()))?.holds() {
            continue;
        }
        accepted += 1;
        let label = format!("candidate {tried} ({n} agents, {m} objects)");
        let g = fmt(build_ntu_game(&e, b()))?;
        if let Some(v) = fmt(check_balanced(&g))? {
            return Err(format!("{label}: unbalanced at {:?}", v.collection.coalitions));
        }
        if let Some(v) = fmt(check_ordinal_convexity(&g))? {
            return Err(format!("{label}: convexity fails for {} and {}", v.s, v.s_prime));
        }
        ensure(fmt(find_weak_core_allocation(&e, b()))?.is_some(), || format!("{label}: weak core empty"))?;
    }
    ensure(accepted >= 30, || format!("only {accepted} of {tried} candidates had gains from trade"))?;
    Ok(format!("{accepted} of {tried} candidates accepted; all balanced, ordinally convex, weak core nonempty"))
}

fn housing_suite() -> Outcome {
    for seed in 0..100u64 {
        let n = 1 + (seed as usize % 6);
        let e = fmt(generate(&InstanceSpec::new(Family::Housing, n, n, seed)))?;
        let market = fmt(HousingMarket::new(e.clone()))?;
        let ttc = run_ttc(&market);
        let ctx = fmt(TContext::new(&e, n, b()))?;
        let trace = fmt(iterate_to_fixed_point(&ctx))?;
        ensure(ttc_equivalence_trace(&ctx, &trace, &ttc), || format!("seed {seed}: iterates disagree with TTC rounds"))?;
        let x = fmt(check_t_fixed_point(&ctx, &trace.fixed_point))?
            .ok_or_else(|| format!("seed {seed}: limit is not a fixed point of T"))?;
        ensure(x == ttc.allocation(), || format!("seed {seed}: fixed-point allocation differs from TTC"))?;
    }
    Ok("100 markets: iterates track TTC rounds, fixed point equals TTC allocation".into())
}

fn bargaining_suite() -> Outcome {
    let mut paired = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
        let (n, m) = sizes(&mut rng, 4, 6);
        let e = fmt(generate(&InstanceSpec::new(Family::AdditiveCommon, n, m, seed)))?;
        let label = format!("seed {seed} ({n} agents, {m} objects)");
        let k = 2.min(n);
        let ctx = fmt(TContext::new(&e, k, b()))?;
        let trace = fmt(iterate_to_fixed_point(&ctx))?;
        if k < 2 {
            continue;
        }
        let pairing = classify_and_pair(&ctx, &trace.fixed_point).map_err(|err| format!("{label}: {err}"))?;
        paired += pairing.pairs.len();
        let xs = construct_bargaining_allocation(&ctx, &pairing).map_err(|err| format!("{label}: {err}"))?;
        ensure(e.is_individually_rational(xs.allocation()), || format!("{label}: not individually rational"))?;
        let verdict = fmt(pairwise_bargaining_set(&e, &xs, b()))?;
        ensure(verdict.in_set, || format!("{label}: objection {:?} is not countered", verdict.unanswered))?;
    }
    Ok(format!("100 economies certified in the pairwise bargaining set ({paired} two-cycles)"))
}

fn operator_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    let mut economies = 0;
    while pairs < 500 {
        let family = [Family::AdditiveCommon, Family::Housing][economies % 2];
        let (n, m) = sizes(&mut rng, 4, 5);
        let e = fmt(generate(&InstanceSpec::new(family, n, m, rng.gen())))?;
        let e = if economies % 3 == 2 { random_table_economy(&mut rng, n, m) } else { e };
        economies += 1;
        let k = rng.gen_range(1..=e.num_agents());
        let ctx = fmt(TContext::new(&e, k, b()))?;
        let trace = fmt(iterate_to_fixed_point(&ctx))?;
        if let Some(v) = trace.sandwich_violation() {
            return Err(format!("economy {economies}: {v}"));
        }
        let floor = ctx.floor();
        let t_floor = fmt(apply_t(&ctx, &floor))?;
        ensure(floor.iter().zip(&t_floor).all(|(a, b)| a <= b), || format!("economy {economies}: floor above its image"))?;
        for _ in 0..25 {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for i in 0..e.num_agents() {
                let vals = ctx.values(i);
                let a = rng.gen_range(0..vals.len());
                let c = rng.gen_range(a..vals.len());
                lo.push(vals[a]);
                hi.push(vals[c]);
            }
            let (tlo, thi) = (fmt(apply_t(&ctx, &lo))?, fmt(apply_t(&ctx, &hi))?);
            ensure(thi.iter().zip(&tlo).all(|(a, b)| a <= b), || {
                format!("economy {economies}: T is not antitone at {lo:?} ≤ {hi:?}")
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} profile pairs over {economies} economies: antitone, iterates sandwiched"))
}

fn main() -> ExitCode {
    let mut log = RoundingLog::default();
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut RoundingLog) -> Outcome>)> = vec![
        ("three shoe owners: strong core {X}, weak core ⊇ {X, Y}", Box::new(|_| example1())),
        ("three shoe owners: empty weak core and blocking cycle", Box::new(|_| example2())),
        ("four-agent left/right shoes: empty weak core", Box::new(|_| konishi())),
        ("roommate game: empty core, unbalanced", Box::new(|_| roommate())),
        ("dichotomous economies: nonempty weak core, balanced", Box::new(dichotomous_suite)),
        ("categorical economies: nonempty weak core, rounding", Box::new(categorical_suite)),
        ("gains from trade: balanced, convex, nonempty weak core", Box::new(|_| gains_from_trade_suite())),
        ("housing markets: T iteration reproduces TTC", Box::new(|_| housing_suite())),
        ("common-weight additive: pairwise bargaining set", Box::new(|_| bargaining_suite())),
        ("T operator: antitone and sandwiched iterates", Box::new(|_| operator_laws())),
        ("rounding: fractional count decreases, invariants hold", Box::new(|log: &mut RoundingLog| rounding_laws(log))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut log);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
