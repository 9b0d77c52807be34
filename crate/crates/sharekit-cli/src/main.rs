//! Batch command-line front end for the sharekit library.
//!
//! Every command reads JSON files, writes one JSON document to stdout (or
//! `--output`), and is byte-deterministic for identical inputs and flags.
//! Exit codes: 0 on success, 2 when `classify` returns a fail verdict, 1 on
//! schema or premise errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use sharekit::classify::{classify, ClassifierInput, Verdict};
use sharekit::counterexamples;
use sharekit::game::DEFAULT_BUDGET;
use sharekit::json as fmt;
use sharekit::potential;
use sharekit::rules::DistributionRule;
use sharekit::Error;

#[derive(Parser)]
#[command(
    name = "sharekit",
    version,
    about = "Exact analysis of welfare-sharing games: decompose welfare functions, evaluate \
             distribution rules, solve games for pure Nash equilibria, compute potentials, and \
             classify rule sets with certificates or counterexample games"
)]
struct Cli {
    /// Profile enumeration budget (falls back to SHAREKIT_BUDGET, then 10^7)
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Seed reserved for randomized workflows; the current commands are
    /// deterministic and ignore it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the JSON document here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Compact single-line JSON
    Json,
    /// Pretty-printed JSON
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a welfare function onto the unanimity-game basis
    Decompose {
        #[arg(long)]
        welfare: PathBuf,
    },
    /// Evaluate a distribution rule; emits all shares or just the queried ones
    EvalRule {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        welfare: PathBuf,
        /// Query "player|subset"; repeatable. Without queries the full share
        /// table is emitted.
        #[arg(long = "query")]
        queries: Vec<String>,
    },
    /// Enumerate pure Nash equilibria and search for a best-response cycle
    SolveGame {
        #[arg(long)]
        game: PathBuf,
    },
    /// Tabulate the vector potential of every profile and verify the
    /// potential property
    Potential {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        omega: PathBuf,
    },
    /// Map a ground welfare between its Shapley-family and
    /// marginal-contribution-family forms
    Transform {
        #[arg(long)]
        ground: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
    },
    /// Certify a welfare/rule pair list or produce the first failed
    /// condition with an equilibrium-free counterexample game
    Classify {
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Build the counterexample game for a failed condition witness
    GenCounterexample {
        /// One of: sign_conflict, contributing, decomposition,
        /// nonnegativity, global_consistency, cyclic_consistency
        #[arg(long)]
        stage: String,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Ground of a generalized weighted Shapley rule to the matching
    /// marginal-contribution ground
    GwsvToGwmc,
    /// The inverse direction
    GwmcToGwsv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli
        .budget
        .or_else(|| {
            std::env::var("SHAREKIT_BUDGET")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_BUDGET);
    if budget == 0 {
        eprintln!("error: budget must be positive");
        return ExitCode::from(1);
    }
    let _ = cli.seed; // reserved
    match run(&cli.command, budget) {
        Ok((value, code)) => {
            let text = match cli.format {
                Format::Json => value.to_string(),
                Format::Pretty => serde_json::to_string_pretty(&value).expect("valid json"),
            };
            match &cli.output {
                None => println!("{text}"),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn run(command: &Command, budget: u64) -> Result<(Value, u8), Error> {
    match command {
        Command::Decompose { welfare } => {
            let (players, w) = fmt::parse_welfare_file(&read(welfare)?)?;
            let basis = w.decompose();
            Ok((
                fmt::welfare_file_value(&players, fmt::basis_payload(&basis)),
                0,
            ))
        }

        Command::EvalRule {
            rule,
            welfare,
            queries,
        } => {
            let (players, w) = fmt::parse_welfare_file(&read(welfare)?)?;
            let spec = fmt::parse_rule_file(&read(rule)?, &players)?;
            let realized = DistributionRule::realize(spec, &players, &w)?;
            let mut shares = Map::new();
            if queries.is_empty() {
                for s in players.subsets_ordered() {
                    for i in s.members() {
                        shares.insert(
                            format!("{}|{}", players.label(i), fmt::subset_key(&players, s)),
                            Value::String(sharekit::rational::format(&realized.eval(i, s))),
                        );
                    }
                }
            } else {
                for q in queries {
                    let (player, subset) = q.split_once('|').ok_or_else(|| {
                        Error::InvalidInput(format!("query {q:?} must look like \"player|subset\""))
                    })?;
                    let i = players
                        .index_of(player)
                        .ok_or_else(|| Error::InvalidInput(format!("unknown player {player:?}")))?;
                    let s = fmt::parse_subset(&players, subset, "query")?;
                    shares.insert(
                        q.clone(),
                        Value::String(sharekit::rational::format(&realized.eval(i, s))),
                    );
                }
            }
            Ok((json!({ "schema": fmt::SCHEMA, "shares": shares }), 0))
        }

        Command::SolveGame { game } => {
            let g = fmt::parse_game_file(&read(game)?)?;
            let pne = g.find_pne(budget)?;
            let cycle = g.best_response_cycle(budget)?;
            let profiles: Vec<Value> = pne.iter().map(|p| fmt::profile_value(&g, p)).collect();
            Ok((
                json!({
                    "schema": fmt::SCHEMA,
                    "pne": profiles,
                    "pne_count": pne.len(),
                    "cycle": match cycle {
                        None => Value::Null,
                        Some(steps) => fmt::cycle_value(&g, &steps),
                    },
                }),
                0,
            ))
        }

        Command::Potential { game, omega } => {
            let g = fmt::parse_game_file(&read(game)?)?;
            let w = fmt::parse_omega_file(&read(omega)?, g.players())?;
            let mut rows = Vec::new();
            for p in g.profiles(budget)? {
                let phi = potential::global_potential(&g, &w, &p)?;
                rows.push(json!({
                    "profile": fmt::profile_value(&g, &p),
                    "phi": fmt::potential_value(&phi),
                }));
            }
            let violation = potential::verify_potential_property(&g, &w, budget)?;
            Ok((
                json!({
                    "schema": fmt::SCHEMA,
                    "profiles": rows,
                    "property_holds": violation.is_none(),
                    "violation": match violation {
                        None => Value::Null,
                        Some(v) => json!({
                            "profile": fmt::profile_value(&g, &v.profile),
                            "player": g.players().label(v.player),
                            "alternative": v.alternative,
                            "utility_diff": sharekit::rational::format(&v.utility_diff),
                            "expected": sharekit::rational::format(&v.expected),
                        }),
                    },
                }),
                0,
            ))
        }

        Command::Transform {
            ground,
            omega,
            direction,
        } => {
            let (players, w) = fmt::parse_welfare_file(&read(ground)?)?;
            let ws = fmt::parse_omega_file(&read(omega)?, &players)?;
            let basis = w.decompose();
            let mapped = match direction {
                Direction::GwsvToGwmc => sharekit::rules::gwsv_to_gwmc_ground(&basis, &ws),
                Direction::GwmcToGwsv => sharekit::rules::gwmc_to_gwsv_ground(&basis, &ws),
            };
            Ok((
                fmt::welfare_file_value(&players, fmt::basis_payload(&mapped)),
                0,
            ))
        }

        Command::Classify { pairs } => {
            let input = fmt::parse_pairs_file(&read(pairs)?)?;
            let verdict = classify(&input, budget)?;
            let code = match &verdict {
                Verdict::Pass(_) => 0,
                Verdict::Fail(_) => 2,
            };
            Ok((fmt::verdict_value(input.players(), &verdict), code))
        }

        Command::GenCounterexample { stage, witness } => {
            let (input, payload) = fmt::parse_witness_file(&read(witness)?, stage)?;
            let game = generate(&input, &payload, budget)?;
            let pne = game.find_pne(budget)?;
            let cycle = game.best_response_cycle(budget)?;
            Ok((
                json!({
                    "schema": fmt::SCHEMA,
                    "game": fmt::game_value(&game),
                    "verification": {
                        "pne_count": pne.len(),
                        "profiles": game.profile_count(budget)?.to_string(),
                        "cycle": match cycle {
                            None => Value::Null,
                            Some(steps) => fmt::cycle_value(&game, &steps),
                        },
                    },
                }),
                0,
            ))
        }
    }
}

fn generate(
    input: &ClassifierInput,
    payload: &fmt::WitnessPayload,
    budget: u64,
) -> Result<sharekit::game::Game, Error> {
    use fmt::WitnessPayload as W;
    let reduced = sharekit::classify::reduce_to_budget_balanced(input);
    match payload {
        W::SignConflict { pair, subset, i, j } => counterexamples::sign_conflict_game(
            &input.pairs()[*pair].0,
            &reduced.pairs()[*pair].1,
            *subset,
            *i,
            *j,
            budget,
        ),
        W::Contributing { pair, subset, i, j } => counterexamples::contributing_game(
            &input.pairs()[*pair].0,
            &reduced.pairs()[*pair].1,
            *subset,
            *i,
            *j,
            budget,
        ),
        W::Decomposition { pair, subset, i, j } => {
            let rule = &reduced.pairs()[*pair].1;
            let ground = rule.actual_welfare().decompose();
            let ntilde = sharekit::classify::aggregated_coeffs(&ground, *subset);
            counterexamples::decomposition_game(
                &input.pairs()[*pair].0,
                rule,
                *subset,
                *i,
                *j,
                &ntilde,
                budget,
            )
        }
        W::Nonnegativity {
            pair,
            coalition,
            i,
            j,
        } => {
            let rule = &reduced.pairs()[*pair].1;
            let ground = rule.actual_welfare().decompose();
            if !ground.coeffs().contains_key(coalition) {
                return Err(Error::PremiseViolated(
                    "coalition is not in the ground support".into(),
                ));
            }
            let coeffs = sharekit::classify::inclusion_exclusion_coeffs(&ground, *coalition);
            counterexamples::nonnegativity_game(
                &input.pairs()[*pair].0,
                rule,
                *coalition,
                *i,
                *j,
                &coeffs,
                budget,
            )
        }
        W::GlobalConsistency {
            i,
            j,
            first,
            second,
        } => counterexamples::global_consistency_game(
            &input.pairs()[first.0].0,
            &reduced.pairs()[first.0].1,
            &input.pairs()[second.0].0,
            &reduced.pairs()[second.0].1,
            *i,
            *j,
            first.1,
            second.1,
            budget,
        ),
        W::CyclicConsistency { cycle, edges } => {
            let pair_refs: Vec<(
                &sharekit::model::WelfareFunction,
                &sharekit::rules::DistributionRule,
            )> = input
                .pairs()
                .iter()
                .zip(reduced.pairs())
                .map(|((w, _), (_, f))| (w, f))
                .collect();
            counterexamples::cyclic_consistency_game(&pair_refs, cycle, edges, budget)
        }
    }
}
