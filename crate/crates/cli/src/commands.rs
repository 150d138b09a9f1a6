//! One function per subcommand.

use kuniform::constructions::{random_regular_matrix, BuiltGame, GameSpec};
use kuniform::discrepancy::{beck_fiala_color, disc_exact, equivalence_report, Direction, EquivalenceReport};
use kuniform::dynamics::{
    hitting_time, hitting_times_to_csv, run_regret_matching, support_lower_bound_audit, AuditReport, HittingTime,
};
use kuniform::game::io::{distribution_from_json, explicit_game_to_json, profile_from_json, DistributionRecord, ProfileRecord};
use kuniform::grid::{
    composition_count, cube_search, exhaustive_weak_nash, observer_cube_search, scan_weak_nash, CubeMode,
    GridSearchOutcome,
};
use kuniform::sampling::{
    attempts_to_csv, concentration_trial, k_bound_weak_ce, k_bound_weak_nash, weak_ce_by_sampling_with_k,
    weak_nash_by_sampling_with_k, CorrelatedSource, SamplingOutcome,
};
use kuniform::seed::derive_seed;
use kuniform::verify::{ce_regrets, check_ir, check_weak_ce, check_weak_nash, IrMethod};
use kuniform::{BinaryMatrix, Distribution, Evaluator, Explicit, Game, Profile};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{read_file, to_value, Output, Report};
use crate::{
    AuditArgs, CliError, CliResult, Command, Concept, CubeArgs, DirectionArg, DiscArgs, DiscMethodArg, DynamicsArgs,
    EquivArgs, GenArgs, GenFamily, GlobalArgs, GridArgs, GridMode, IrMethodArg, SampleArgs, SampleMode, VerifyArgs,
};

/// Default cap on grid profiles scanned by `gridsearch`.
pub const DEFAULT_GRID_BUDGET: u128 = 1 << 24;
/// Default number of sampled cube vertices for observer games.
pub const DEFAULT_OBSERVER_SAMPLES: usize = 100;
/// Seed tag for per-trial dynamics seeds.
pub const DYNAMICS_TAG: &str = "dynamics-trial";

pub(crate) fn dispatch(command: &Command, global: &GlobalArgs) -> CliResult<Output> {
    match command {
        Command::Gen(a) => gen(a, global),
        Command::Verify(a) => verify(a, global),
        Command::Sample(a) => sample(a, global),
        Command::Gridsearch(a) => gridsearch(a, global),
        Command::Cube(a) => cube(a, global),
        Command::Disc(a) => disc(a, global),
        Command::Equiv(a) => equiv(a, global),
        Command::Dynamics(a) => dynamics(a, global),
        Command::Audit(a) => audit(a, global),
    }
}

fn load_game(arg: &str) -> CliResult<(GameSpec, BuiltGame<f64>)> {
    let spec = GameSpec::resolve(arg)?;
    let built = spec.build::<f64>()?;
    Ok((spec, built))
}

/// The exact equilibrium a family declares, if any.
fn declared_profile(spec: &GameSpec, built: &BuiltGame<f64>) -> Option<Profile> {
    match built {
        BuiltGame::Observer(g) => Some(g.declared_equilibrium()),
        BuiltGame::Majority(g) => Some(g.declared_equilibrium()),
        BuiltGame::Xor(g) => Some(Profile::uniform(Game::<f64>::num_players(g), 2)),
        BuiltGame::Explicit(_) if *spec == GameSpec::MatchingPennies => Some(Profile::uniform(2, 2)),
        BuiltGame::Explicit(_) => None,
    }
}

fn load_profile(path: Option<&std::path::Path>, spec: &GameSpec, built: &BuiltGame<f64>) -> CliResult<Profile> {
    match path {
        Some(p) => Ok(profile_from_json(&read_file(p)?)?),
        None => declared_profile(spec, built)
            .ok_or_else(|| CliError::Input("this game declares no equilibrium; pass --profile".into())),
    }
}

fn load_distribution(path: Option<&std::path::Path>) -> CliResult<Distribution> {
    let path = path.ok_or_else(|| CliError::Input("--distribution is required".into()))?;
    Ok(distribution_from_json(&read_file(path)?)?)
}

fn load_matrix(path: &std::path::Path) -> CliResult<BinaryMatrix> {
    Ok(read_file(path)?.parse()?)
}

fn gen(a: &GenArgs, g: &GlobalArgs) -> CliResult<Output> {
    let mut report = Report::new("gen", "game-families", g.seed);
    let spec = match a.family {
        GenFamily::Xor => Some(GameSpec::Xor { kappa: a.kappa }),
        GenFamily::Observer => Some(GameSpec::Observer { b: a.b, w: a.w, observers: a.observers, seed: g.seed }),
        GenFamily::MajorityMp => {
            Some(GameSpec::RandomMajorityMp { n: a.n, m: a.m.unwrap_or(a.n), t: a.t, seed: g.seed })
        }
        GenFamily::RandomExplicit => Some(GameSpec::RandomExplicit { n: a.n, m: a.m.unwrap_or(2), seed: g.seed }),
        GenFamily::MatchingPennies => Some(GameSpec::MatchingPennies),
        GenFamily::Matrix | GenFamily::Explicit => None,
    };
    let (artifact, kind) = match (&spec, a.family) {
        (Some(spec), _) => {
            let built = spec.build::<f64>()?;
            let g = built.as_game();
            report.game = to_value(spec);
            report.params = json!({ "players": g.num_players(), "actions": g.num_actions() });
            let line = match spec.to_line() {
                Some(line) => line,
                None => serde_json::to_string(spec).map_err(kuniform::Error::from)?,
            };
            (line + "\n", "descriptor")
        }
        (None, GenFamily::Matrix) => {
            let m = random_regular_matrix(a.n, a.m.unwrap_or(a.n), a.t, g.seed)?;
            report.params = json!({ "n": a.n, "m": m.cols(), "t": a.t });
            (m.to_string(), "matrix")
        }
        (None, _) => {
            let game = Explicit::random(a.n, a.m.unwrap_or(2), g.seed)?;
            report.params = json!({ "n": a.n, "m": game.num_actions() });
            (explicit_game_to_json(&game)? + "\n", "explicit")
        }
    };
    report.result = json!({ "kind": kind, "path": g.out.as_ref().map(|p| p.display().to_string()) });
    let summary = match &g.out {
        Some(p) => format!("wrote {kind} to {}", p.display()),
        None => kind.to_string(),
    };
    Ok(Output::new(report, summary).with_artifact(artifact))
}

fn verify(a: &VerifyArgs, g: &GlobalArgs) -> CliResult<Output> {
    let (spec, built) = load_game(&a.game)?;
    let game = built.as_game();
    let concept = a.concept.unwrap_or(if a.distribution.is_some() { Concept::Ce } else { Concept::Nash });
    let mut report = Report::new("verify", "equilibrium-definitions", g.seed);
    report.game = to_value(&spec);
    report.params = json!({
        "concept": format!("{concept:?}").to_lowercase(),
        "epsilon": a.epsilon,
        "delta": a.delta,
        "mc_samples": a.mc_samples,
    });
    match concept {
        Concept::Nash => {
            let profile = load_profile(a.profile.as_deref(), &spec, &built)?;
            let evaluator = match a.mc_samples {
                Some(samples) => Evaluator::MonteCarlo { samples, seed: g.seed },
                None => Evaluator::Exact,
            };
            let (passed, r) = check_weak_nash(game, &profile, a.epsilon, a.delta, evaluator)?;
            let max = r.max_regret();
            report.result = json!({
                "passed": passed,
                "max_regret": max,
                "satisfied_fraction": r.satisfied_fraction,
                "violators": r.violators,
                "regrets": r.per_player,
            });
            let summary = format!("nash: passed={passed} max_regret={max}");
            Ok(Output::new(report, summary).with_csv(r.to_csv()))
        }
        Concept::Ce => {
            let dist = load_distribution(a.distribution.as_deref())?;
            let (passed, r) = check_weak_ce(game, &dist, a.epsilon, a.delta)?;
            let regrets = ce_regrets(game, &dist)?;
            let max_external = regrets.iter().map(|c| c.external).fold(0.0, f64::max);
            let max = r.max_regret();
            let threshold = a.epsilon + 1e-9;
            let mut csv = String::from("player,internal,external,satisfied\n");
            for (i, c) in regrets.iter().enumerate() {
                csv.push_str(&format!("{i},{},{},{}\n", c.internal, c.external, c.internal <= threshold));
            }
            report.result = json!({
                "passed": passed,
                "max_regret": max,
                "max_external_regret": max_external,
                "satisfied_fraction": r.satisfied_fraction,
                "violators": r.violators,
                "regrets": regrets,
            });
            let summary = format!("ce: passed={passed} max_internal_regret={max}");
            Ok(Output::new(report, summary).with_csv(csv))
        }
        Concept::Ir => {
            let dist = load_distribution(a.distribution.as_deref())?;
            let method = match a.ir_method {
                IrMethodArg::Exact => IrMethod::Exact,
                IrMethodArg::Analytic => IrMethod::Analytic,
            };
            let check = check_ir(game, &dist, a.epsilon, method)?;
            let summary = format!("ir: passed={} worst_gap={}", check.passed, check.worst_gap);
            report.result = to_value(&check);
            Ok(Output::new(report, summary))
        }
    }
}

fn sampling_result<P>(outcome: &SamplingOutcome<P>, k: u64, encode: impl Fn(&P) -> Value) -> Value {
    match outcome {
        SamplingOutcome::Found { result, attempts, records } => json!({
            "status": "found",
            "found": true,
            "k": k,
            "attempts": attempts,
            "records": records,
            "sample": encode(result),
        }),
        SamplingOutcome::Exhausted { best_fraction, records } => json!({
            "status": "exhausted",
            "found": false,
            "k": k,
            "attempts": records.len(),
            "best_fraction": best_fraction,
            "records": records,
        }),
    }
}

fn sample(a: &SampleArgs, g: &GlobalArgs) -> CliResult<Output> {
    let (spec, built) = load_game(&a.game)?;
    let game = built.as_game();
    let m = game.num_actions();
    match a.mode {
        SampleMode::WeakNash => {
            let eq = load_profile(a.profile.as_deref(), &spec, &built)?;
            let k = match a.k {
                Some(k) => k,
                None => k_bound_weak_nash(a.epsilon, a.delta, m)?,
            };
            let outcome = weak_nash_by_sampling_with_k(game, &eq, k, a.epsilon, a.delta, g.seed, a.attempts)?;
            let mut report = Report::new("sample", "weak-nash-existence", g.seed);
            report.game = to_value(&spec);
            report.params = json!({ "mode": "weak-nash", "epsilon": a.epsilon, "delta": a.delta, "k": k, "attempts": a.attempts });
            report.result = sampling_result(&outcome, k, |p| to_value(&ProfileRecord::<f64>::from_grid(p)));
            let summary = format!("weak-nash sampling: k={k} found={}", outcome.result().is_some());
            Ok(Output::new(report, summary).with_csv(attempts_to_csv(outcome.records())))
        }
        SampleMode::WeakCe => {
            let k = match a.k {
                Some(k) => k,
                None => k_bound_weak_ce(a.epsilon, a.delta, m)?,
            };
            let (dist, profile);
            let source = if a.distribution.is_some() {
                dist = load_distribution(a.distribution.as_deref())?;
                CorrelatedSource::Distribution(&dist)
            } else {
                profile = load_profile(a.profile.as_deref(), &spec, &built)?;
                CorrelatedSource::Product(&profile)
            };
            let outcome = weak_ce_by_sampling_with_k(game, source, k, a.epsilon, a.delta, g.seed, a.attempts)?;
            let mut report = Report::new("sample", "weak-ce-sampling", g.seed);
            report.game = to_value(&spec);
            report.params = json!({ "mode": "weak-ce", "epsilon": a.epsilon, "delta": a.delta, "k": k, "attempts": a.attempts });
            report.result = sampling_result(&outcome, k, |d| to_value(&DistributionRecord::from_distribution(d)));
            let summary = format!("weak-ce sampling: k={k} found={}", outcome.result().is_some());
            Ok(Output::new(report, summary).with_csv(attempts_to_csv(outcome.records())))
        }
        SampleMode::Concentration => {
            let k = a.k.ok_or_else(|| CliError::Input("--k is required for concentration".into()))?;
            let profile = match &a.profile {
                Some(_) => load_profile(a.profile.as_deref(), &spec, &built)?,
                None => declared_profile(&spec, &built).unwrap_or_else(|| Profile::uniform(game.num_players(), m)),
            };
            let r = concentration_trial(game, a.player, &profile, a.eps_hat, k, a.trials, g.seed)?;
            let mut csv = String::from("trial,deviation,violated\n");
            for (t, d) in r.deviations.iter().enumerate() {
                csv.push_str(&format!("{t},{d},{}\n", *d > r.eps_hat));
            }
            let mut report = Report::new("sample", "product-concentration", g.seed);
            report.game = to_value(&spec);
            report.params = json!({ "mode": "concentration", "eps_hat": a.eps_hat, "k": k, "trials": a.trials, "player": a.player });
            let summary = format!("concentration: frequency={} bound={}", r.frequency, r.bound);
            report.result = to_value(&r);
            Ok(Output::new(report, summary).with_csv(csv))
        }
    }
}

/// JSON number when it fits in `u64`, decimal string otherwise.
fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn grid_total(game: &dyn Game<f64>, k: u32) -> Option<u128> {
    composition_count(k, game.num_actions())?.checked_pow(game.num_players().try_into().ok()?)
}

fn gridsearch(a: &GridArgs, g: &GlobalArgs) -> CliResult<Output> {
    let (spec, built) = load_game(&a.game)?;
    let game = built.as_game();
    let budget = a.budget.unwrap_or(DEFAULT_GRID_BUDGET);
    let total = grid_total(game, a.k);
    let mut report = Report::new("gridsearch", "grid-search-algorithm", g.seed);
    report.game = to_value(&spec);
    report.params = json!({
        "k": a.k,
        "epsilon": a.epsilon,
        "delta": a.delta,
        "budget": big(budget),
        "mode": format!("{:?}", a.mode).to_lowercase(),
    });
    let (result, summary, csv) = match a.mode {
        GridMode::First => {
            let outcome = exhaustive_weak_nash(game, a.k, a.epsilon, a.delta, budget)?;
            let total = total.map(big);
            match outcome {
                GridSearchOutcome::Found { profile, index, scanned, report } => (
                    json!({
                        "status": "found",
                        "found": true,
                        "profile": ProfileRecord::<f64>::from_grid(&profile),
                        "index": big(index),
                        "scanned": big(scanned),
                        "total": total,
                        "max_regret": report.max_regret(),
                        "satisfied_fraction": report.satisfied_fraction,
                    }),
                    format!("gridsearch: found at index {index} after {scanned} profiles"),
                    Some(report.to_csv()),
                ),
                GridSearchOutcome::NotFound { scanned } => (
                    json!({ "status": "not_found", "found": false, "scanned": big(scanned), "total": total }),
                    format!("gridsearch: none of {scanned} profiles passes"),
                    None,
                ),
                GridSearchOutcome::NotFoundInBudget { scanned, total } => (
                    json!({
                        "status": "not_found_in_budget",
                        "found": false,
                        "scanned": big(scanned),
                        "total": big(total),
                    }),
                    format!("gridsearch: budget exhausted after {scanned} of {total} profiles"),
                    None,
                ),
            }
        }
        GridMode::Scan => {
            let s = scan_weak_nash(game, a.k, a.epsilon, a.delta, budget)?;
            (
                json!({
                    "status": "scanned",
                    "found": s.passing > 0,
                    "scanned": big(s.scanned),
                    "passing": big(s.passing),
                    "first_passing": s.first_passing.map(big),
                    "total": total.map(big),
                }),
                format!("gridsearch: {} of {} profiles pass", s.passing, s.scanned),
                None,
            )
        }
    };
    report.result = result;
    let out = Output::new(report, summary);
    Ok(match csv {
        Some(c) => out.with_csv(c),
        None => out,
    })
}

fn cube(a: &CubeArgs, g: &GlobalArgs) -> CliResult<Output> {
    let (spec, built) = load_game(&a.game)?;
    let mut report = Report::new("cube", "observer-lower-bound", g.seed);
    report.game = to_value(&spec);
    report.params = json!({ "k": a.k, "epsilon": a.epsilon, "samples": a.samples });
    if let (BuiltGame::Observer(sub), None) = (&built, &a.profile) {
        let samples = a.samples.unwrap_or(DEFAULT_OBSERVER_SAMPLES);
        let r = observer_cube_search::<f64>(sub.game(), a.k, a.epsilon, samples, g.seed)?;
        let mut csv = String::from("sample,side,window_probability,observer_regret,fails\n");
        for c in &r.certificates {
            csv.push_str(&format!(
                "{},{:?},{},{},{}\n",
                c.sample, c.side, c.window_probability, c.observer_regret, c.fails
            ));
        }
        let summary = format!("cube: {} of {} sampled vertices fail", r.failures, r.samples);
        report.result = to_value(&r);
        return Ok(Output::new(report, summary).with_csv(csv));
    }
    let center: Vec<f64> = load_profile(a.profile.as_deref(), &spec, &built)?
        .strategies()
        .iter()
        .map(|s| s.prob(1))
        .collect();
    let mode = match a.samples {
        Some(samples) => CubeMode::Sampled { samples, seed: g.seed },
        None => CubeMode::Exhaustive,
    };
    let outcome = cube_search(built.as_game(), &center, a.k, a.epsilon, mode)?;
    let summary = match &outcome {
        kuniform::grid::CubeOutcome::Found { index, .. } => format!("cube: vertex {index} passes"),
        kuniform::grid::CubeOutcome::AllFail { scanned, best_max_regret, .. } => {
            format!("cube: all {scanned} vertices fail, best max regret {best_max_regret}")
        }
    };
    report.result = to_value(&outcome);
    Ok(Output::new(report, summary))
}

fn disc(a: &DiscArgs, g: &GlobalArgs) -> CliResult<Output> {
    let matrix = load_matrix(&a.matrix)?;
    let r = match a.method {
        DiscMethodArg::Exact => disc_exact(&matrix)?,
        DiscMethodArg::Bf => beck_fiala_color(&matrix)?,
    };
    let mut report = Report::new("disc", "discrepancy", g.seed);
    report.params = json!({
        "matrix": a.matrix.display().to_string(),
        "rows": matrix.rows(),
        "cols": matrix.cols(),
        "method": format!("{:?}", a.method).to_lowercase(),
    });
    let mut csv = String::from("row,signed_sum\n");
    for (i, s) in r.row_sums.iter().enumerate() {
        csv.push_str(&format!("{i},{s}\n"));
    }
    let summary = format!("disc = {}", r.disc);
    report.result = to_value(&r);
    Ok(Output::new(report, summary).with_csv(csv))
}

fn equiv(a: &EquivArgs, g: &GlobalArgs) -> CliResult<Output> {
    let matrix = load_matrix(&a.matrix)?;
    let direction = match a.direction {
        DirectionArg::Fwd => Direction::Forward,
        DirectionArg::Rev => Direction::Reverse,
    };
    let r = equivalence_report(&matrix, a.alpha, a.k, direction, a.budget, g.seed)?;
    let mut report = Report::new("equiv", "discrepancy-equivalence", g.seed);
    report.params = json!({
        "matrix": a.matrix.display().to_string(),
        "direction": direction,
        "alpha": a.alpha,
        "k": a.k,
        "budget": a.budget,
    });
    let (summary, csv) = match &r {
        EquivalenceReport::Forward(f) => {
            let mut csv = String::from("player,regret\n");
            for (i, x) in f.regrets.iter().enumerate() {
                csv.push_str(&format!("{i},{x}\n"));
            }
            (format!("forward: k={} max_regret={} passed={}", f.k, f.max_regret, f.passed), Some(csv))
        }
        EquivalenceReport::Reverse(v) => (
            format!("reverse: {} equilibria, {} violations, passed={}", v.equilibria, v.violations, v.passed),
            None,
        ),
    };
    report.result = to_value(&r);
    let out = Output::new(report, summary);
    Ok(match csv {
        Some(c) => out.with_csv(c),
        None => out,
    })
}

/// Seed of trial `trial` under master seed `seed`.
pub fn dynamics_trial_seed(seed: u64, trial: u64) -> u64 {
    derive_seed(seed, DYNAMICS_TAG, trial)
}

fn dynamics(a: &DynamicsArgs, g: &GlobalArgs) -> CliResult<Output> {
    let (spec, built) = load_game(&a.game)?;
    let game = built.as_game();
    let tenth = a.rounds / 10;
    let trials: Vec<(HittingTime, Value, Option<AuditReport<f64>>)> = (0..a.trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = dynamics_trial_seed(g.seed, i);
            let trace = run_regret_matching(game, a.rounds, seed);
            let hit = HittingTime { seed, t_hit: hitting_time(&trace, a.epsilon), t_max: a.rounds };
            let audit = match &built {
                BuiltGame::Xor(x) => Some(support_lower_bound_audit(x, &trace)?),
                _ => None,
            };
            let row = json!({
                "trial": i,
                "seed": seed,
                "t_hit": hit.t_hit,
                "final_regret": trace.max_internal_regret.last(),
                "regret_at_tenth": tenth.checked_sub(1).and_then(|t| trace.max_internal_regret.get(t)),
            });
            Ok((hit, row, audit))
        })
        .collect::<kuniform::Result<_>>()?;
    let hits: Vec<HittingTime> = trials.iter().map(|t| t.0.clone()).collect();
    let reached = hits.iter().filter(|h| h.t_hit.is_some()).count();
    let decreased = trials
        .iter()
        .filter(|t| match (t.1["final_regret"].as_f64(), t.1["regret_at_tenth"].as_f64()) {
            (Some(f), Some(e)) => f < e,
            _ => false,
        })
        .count();
    let rows: Vec<Value> = trials
        .iter()
        .map(|(_, row, audit)| {
            let mut row = row.clone();
            if let Some(audit) = audit {
                row["audit"] = to_value(audit);
            }
            row
        })
        .collect();
    let audits: Vec<&AuditReport<f64>> = trials.iter().filter_map(|t| t.2.as_ref()).collect();
    let mut report = Report::new("dynamics", "dynamics-support-lower-bound", g.seed);
    report.game = to_value(&spec);
    report.params = json!({ "T": a.rounds, "epsilon": a.epsilon, "trials": a.trials });
    let mut summary_value = json!({
        "trials": a.trials,
        "reached_epsilon": reached,
        "decreased_from_tenth": decreased,
    });
    if !audits.is_empty() {
        summary_value["audit_eligible"] = json!(audits.iter().map(|r| r.eligible).sum::<usize>());
        summary_value["audit_certified"] = json!(audits.iter().map(|r| r.certified).sum::<usize>());
        summary_value["audit_failures"] = json!(audits.iter().map(|r| r.failures).sum::<usize>());
    }
    let summary = format!("dynamics: {reached} of {} trials reached epsilon = {}", a.trials, a.epsilon);
    report.result = json!({ "summary": summary_value, "trials": rows });
    Ok(Output::new(report, summary).with_csv(hitting_times_to_csv(&hits)))
}

fn audit(a: &AuditArgs, g: &GlobalArgs) -> CliResult<Output> {
    let (spec, built) = load_game(&a.game)?;
    let BuiltGame::Xor(game) = &built else {
        return Err(kuniform::Error::NotApplicable("the support audit needs an xor game".into()).into());
    };
    let seed = dynamics_trial_seed(g.seed, a.trial);
    let trace = run_regret_matching::<f64, _>(game, a.rounds, seed);
    let r = support_lower_bound_audit(game, &trace)?;
    let mut csv = String::from("t,support,player,label,payoff,certified\n");
    for c in &r.certificates {
        csv.push_str(&format!("{},{},{},{},{},{}\n", c.t, c.support, c.player, c.label, c.payoff, c.certified));
    }
    let mut report = Report::new("audit", "dynamics-support-lower-bound", g.seed);
    report.game = to_value(&spec);
    report.params = json!({ "T": a.rounds, "trial": a.trial, "trial_seed": seed });
    let summary = format!("audit: {} of {} eligible prefixes certified", r.certified, r.eligible);
    report.result = to_value(&r);
    Ok(Output::new(report, summary).with_csv(csv))
}
