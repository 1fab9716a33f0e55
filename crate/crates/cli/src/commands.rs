use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use teamcoord::census::{
    census as node_census, count_basic, count_folded, count_normal_plans, count_pruned, format_sci, NodeCensus,
};
use teamcoord::convert::{
    apply_safe_imperfect_recall, check_payoff_equivalence, convert as convert_game, convert_census, ConvertOptions,
    ConvertedGame, Mode,
};
use teamcoord::game::is_public_turn_taking;
use teamcoord::instances::{gen_kuhn3, gen_leduc3, gen_toy, PokerSpec, ToySpec};
use teamcoord::solve::{
    count_reduced_plans, expected_value, exploitability, solve_cfr, tmecor_bruteforce, tmecor_double_oracle,
    Algorithm, Profile, Side, TmecorOptions, TmecorSolution, TreeGame,
};
use teamcoord::turn_taking::make_public_turn_taking;
use teamcoord::{GameError, SolverError, Vefg};

use crate::error::CliError;
use crate::format::{self, ConvertedFile, GameFile, Loaded};
use crate::{CensusArgs, ConvertArgs, CountArgs, GenArgs, GenKind, OracleArgs, OracleMethod, SolveArgs, VerifyArgs};

/// Largest payoff discrepancy `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

/// Prints a summary: text or JSON, on stdout unless stdout carries data.
fn summary(json: bool, data_on_stdout: bool, text: String, value: Value) {
    let line = if json { value.to_string() } else { text };
    if data_on_stdout {
        eprintln!("{line}");
    } else {
        let _ = emit(&format!("{line}\n"));
    }
}

/// Writes to standard output; a reader that hung up early is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io(Path::new("<stdout>"), e)),
        _ => Ok(()),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => format::write_text(p, text),
        None => emit(text),
    }
}

/// Pads a variable-turn game so it can be converted, with a warning.
fn turn_taking(game: Vefg) -> Vefg {
    if is_public_turn_taking(&game) {
        game
    } else {
        eprintln!("warning: {} is not public turn-taking; inserting noop decisions", game.name());
        make_public_turn_taking(&game)
    }
}

pub fn gen(args: GenArgs, json: bool) -> Result<(), CliError> {
    let bad_params = |e: GameError| match e {
        GameError::SpecOutOfBounds(m) => CliError::Usage(m),
        other => CliError::from(other),
    };
    let game = match args.kind {
        GenKind::Toy { chance, actions, depth, both_private, payoff_seed } => {
            let mut spec = ToySpec::new(chance, actions, depth).with_both_private(both_private);
            if let Some(seed) = payoff_seed {
                spec = spec.with_payoffs(seed);
            }
            gen_toy(&spec).map_err(bad_params)?
        }
        GenKind::Kuhn { ranks, adv_pos } => gen_kuhn3(&PokerSpec::kuhn(ranks, adv_pos)).map_err(bad_params)?,
        GenKind::Leduc { ranks, raises, adv_pos } => {
            if !(1..=2).contains(&raises) {
                return Err(CliError::Usage(format!("raises must be 1 or 2, got {raises}")));
            }
            gen_leduc3(&PokerSpec::leduc(ranks, raises, adv_pos)).map_err(bad_params)?
        }
    };
    write_or_print(args.out.as_deref(), &format::to_json(&GameFile::from_game(&game)))?;
    let plans = match game.team().first() {
        Some(&p) => count_reduced_plans(&game, p)?.to_string(),
        None => "0".into(),
    };
    summary(
        json,
        args.out.is_none(),
        format!(
            "{}: {} nodes, {} players, {} terminals, {plans} reduced plans for the first team member",
            game.name(),
            game.len(),
            game.players().len(),
            game.terminal_count()
        ),
        json!({
            "name": game.name(),
            "nodes": game.len(),
            "players": game.players().len(),
            "terminals": game.terminal_count(),
            "first_member_plans": plans,
        }),
    );
    Ok(())
}

pub fn census_json(c: &NodeCensus) -> Value {
    json!({
        "coordinator_nodes": c.coordinator_nodes,
        "adversary_nodes": c.adversary_nodes,
        "terminal_nodes": c.terminal_nodes,
        "chance_nodes": c.chance_nodes,
        "chance_single_child": c.chance_single_child,
        "total_nodes": c.total_nodes,
        "coordinator_infosets": c.coordinator_infosets,
        "adversary_infosets": c.adversary_infosets,
        "coordinator_nodes_by_member": c.coordinator_nodes_by_member,
        "prescription_chance_by_member": c.prescription_chance_by_member,
        "prescription_single_child": c.prescription_single_child,
    })
}

fn census_text(c: &NodeCensus) -> String {
    let members: Vec<String> = c.coordinator_nodes_by_member.iter().map(|n| n.to_string()).collect();
    format!(
        "total {} nodes: {} coordinator (by member: {}), {} adversary, {} terminal, {} chance ({} with one child); {} coordinator infosets, {} adversary infosets",
        c.total_nodes,
        c.coordinator_nodes,
        members.join("/"),
        c.adversary_nodes,
        c.terminal_nodes,
        c.chance_nodes,
        c.chance_single_child,
        c.coordinator_infosets,
        c.adversary_infosets
    )
}

pub fn convert(args: ConvertArgs, json: bool) -> Result<(), CliError> {
    let mode = Mode::from(args.mode);
    if args.safe_ir && mode == Mode::Basic {
        return Err(CliError::Usage("--safe-ir needs --mode pruned or folded".into()));
    }
    let original = format::load_game(&args.input)?;
    let digest = format::digest(&original);
    let game = turn_taking(original);
    let mut options = ConvertOptions::new(mode);
    options.prescription_limit = args.prescription_limit;
    let mut cg = convert_game(&game, options)?;
    if args.safe_ir {
        cg = apply_safe_imperfect_recall(&cg)?;
    }
    cg.source.digest = Some(digest);
    write_or_print(args.out.as_deref(), &format::to_json(&ConvertedFile::from_converted(&cg)))?;
    let mut c = node_census(&cg)?;
    if args.compact {
        c = c.compacted();
    }
    summary(json, args.out.is_none(), census_text(&c), census_json(&c));
    Ok(())
}

fn tree_of(loaded: &Loaded) -> Result<TreeGame, CliError> {
    Ok(match loaded {
        Loaded::Converted(cg) => TreeGame::from_converted(cg)?,
        Loaded::Game(g) => TreeGame::new(g, None)?,
    })
}

#[derive(Serialize)]
struct StrategyFile<'a> {
    algorithm: &'a str,
    iterations: u64,
    infosets: Vec<StrategyEntry<'a>>,
}

#[derive(Serialize)]
struct StrategyEntry<'a> {
    name: &'a str,
    side: &'a str,
    actions: &'a [String],
    probs: &'a [f64],
}

fn write_strategy(path: &Path, tree: &TreeGame, profile: &Profile, algo: Algorithm, iterations: u64) -> Result<(), CliError> {
    let infosets = (0..tree.strategy_infosets())
        .map(|s| StrategyEntry {
            name: tree.infoset_name(s),
            side: match tree.side(s) {
                Side::Max => "max",
                Side::Min => "min",
            },
            actions: tree.action_names(s),
            probs: &profile.probs[s],
        })
        .collect();
    let file = StrategyFile { algorithm: algo.as_str(), iterations, infosets };
    format::write_text(path, &format::to_json(&file))
}

pub fn solve(args: SolveArgs, json: bool) -> Result<(), CliError> {
    let loaded = format::load(&args.input)?;
    let tree = tree_of(&loaded)?;
    let algo = Algorithm::from(args.algo);
    let (profile, log) = solve_cfr(&tree, algo, args.iterations, args.log_every)?;
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Invalid(e.to_string());
        w.write_record(["iteration", "team_value", "exploitability"]).map_err(csv_err)?;
        for row in &log.rows {
            w.write_record([row.iteration.to_string(), row.team_value.to_string(), row.exploitability.to_string()])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?;
        std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    }
    if let Some(path) = &args.strategy {
        write_strategy(path, &tree, &profile, algo, args.iterations)?;
    }
    let value = expected_value(&tree, &profile)?;
    let gap = exploitability(&tree, &profile)?;
    summary(
        json,
        false,
        format!("{} after {} iterations: team value {value:.9}, exploitability {gap:.3e}", algo.as_str(), args.iterations),
        json!({
            "algorithm": algo.as_str(),
            "iterations": args.iterations,
            "team_value": value,
            "exploitability": gap,
        }),
    );
    Ok(())
}

pub fn oracle(args: OracleArgs, json: bool) -> Result<(), CliError> {
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", args.tol)));
    }
    let game = format::load_game(&args.input)?;
    let options = TmecorOptions {
        tol: args.tol,
        max_entries: args.max_entries,
        max_member_plans: args.max_member_plans,
        ..TmecorOptions::default()
    };
    let (method, sol): (&str, TmecorSolution) = match args.method {
        OracleMethod::Bruteforce => ("bruteforce", tmecor_bruteforce(&game, options)?),
        OracleMethod::DoubleOracle => ("double-oracle", tmecor_double_oracle(&game, options)?),
        OracleMethod::Auto => match tmecor_bruteforce(&game, options) {
            Err(SolverError::GameTooLarge(_)) => ("double-oracle", tmecor_double_oracle(&game, options)?),
            other => ("bruteforce", other?),
        },
    };
    summary(
        json,
        false,
        format!(
            "TMECor value {:.12} in [{:.12}, {:.12}] ({method}); team support {} joint plans, opponent support {} plans",
            sol.value,
            sol.lower,
            sol.upper,
            sol.team.support.len(),
            sol.opponent.support.len()
        ),
        json!({
            "value": sol.value,
            "lower": sol.lower,
            "upper": sol.upper,
            "method": method,
            "team_support": sol.team.support.len(),
            "opponent_support": sol.opponent.support.len(),
        }),
    );
    Ok(())
}

pub fn verify(args: VerifyArgs, json: bool) -> Result<(), CliError> {
    let original = format::load_game(&args.input)?;
    let cg: ConvertedGame = format::load_converted(&args.converted)?;
    if let Some(d) = &cg.source.digest {
        if *d != format::digest(&original) {
            return Err(CliError::OriginMismatch(format!(
                "{} was not converted from {}",
                args.converted.display(),
                args.input.display()
            )));
        }
    }
    let game = turn_taking(original);
    if args.samples == 0 {
        eprintln!("warning: 0 samples, nothing to check");
    }
    let report = check_payoff_equivalence(&game, &cg, args.samples, args.seed)?;
    summary(
        json,
        false,
        format!("{} samples, max payoff discrepancy {:e}", report.samples, report.max_abs_diff),
        json!({ "samples": report.samples, "max_abs_diff": report.max_abs_diff }),
    );
    if report.max_abs_diff > VERIFY_TOLERANCE {
        return Err(CliError::Discrepancy(report.max_abs_diff));
    }
    Ok(())
}

pub fn census(args: CensusArgs) -> Result<(), CliError> {
    let c = match format::load(&args.input)? {
        Loaded::Converted(cg) => {
            if args.mode.is_some() || args.safe_ir {
                return Err(CliError::Usage("--mode and --safe-ir apply to original games only".into()));
            }
            node_census(&cg)?
        }
        Loaded::Game(g) => {
            let mode = Mode::from(args.mode.ok_or_else(|| CliError::Usage("original games need --mode".into()))?);
            if args.safe_ir && mode == Mode::Basic {
                return Err(CliError::Usage("--safe-ir needs --mode pruned or folded".into()));
            }
            convert_census(&turn_taking(g), ConvertOptions::new(mode), true, args.safe_ir)?
        }
    };
    let c = if args.compact { c.compacted() } else { c };
    emit(&format::to_json(&census_json(&c)))
}

pub fn count(args: CountArgs) -> Result<(), CliError> {
    let (c, a) = (args.chance, args.actions);
    let show = |x| {
        let rounded = format_sci(&x, 3);
        if args.exact {
            x.to_string()
        } else {
            rounded
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Invalid(e.to_string());
    w.write_record(["H", "normal", "basic", "pruning", "folding"]).map_err(csv_err)?;
    for h in 1..=args.max_depth {
        w.write_record([
            h.to_string(),
            show(count_normal_plans(c, a, h)?),
            show(count_basic(c, a, h, args.both_private)?),
            show(count_pruned(c, a, h, args.both_private)?),
            show(count_folded(c, a, h)?),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?;
    write_or_print(args.out.as_deref(), &String::from_utf8(bytes).expect("csv output is utf-8"))
}
