//! Command-line front end for the team-logic toolkit.
//!
//! Exit codes: 0 success / entails / true / proof accepted; 1 logical
//! negative (false, countermodel, proof rejected); 2 inconclusive (bound
//! exhausted, enumeration cap exceeded); 64 usage error; 65 input data
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use teamlogic::bisim::{hintikka_world, team_bisim_k, world_bisim_k, PointedModel};
use teamlogic::decision::{entails_bounded, entails_nf, EntailmentVerdict, VerdictStatus};
use teamlogic::fo::st_translate;
use teamlogic::kripke::{KripkeModel, Team};
use teamlogic::normal_form::{normal_form, NfError};
use teamlogic::proof::{check_derivation, derivation_from_json, System};
use teamlogic::semantics::eval_team;
use teamlogic::syntax::{parse_any, parse_formula, print_formula, Formula, Logic, PropSet};

const EXIT_FALSE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "tl", version, about = "Team-semantics modal logic toolkit")]
struct Cli {
    /// Output format: text or structured (JSON lines).
    #[arg(long, global = true, default_value = "text")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        #[arg(long)]
        formula: String,
        /// mlinc, mlmight, mlsmight, or classical; omit to infer.
        #[arg(long)]
        logic: Option<String>,
    },
    /// Evaluate a formula on a team of a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated world ids; empty for the empty team.
        #[arg(long, default_value = "")]
        team: String,
        #[arg(long)]
        formula: String,
    },
    /// Check world or team k-bisimilarity.
    Bisim {
        #[arg(long)]
        model: PathBuf,
        /// Second model; defaults to the first.
        #[arg(long)]
        model2: Option<PathBuf>,
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        world2: Option<String>,
        #[arg(long)]
        team: Option<String>,
        #[arg(long)]
        team2: Option<String>,
        #[arg(long)]
        k: u32,
        /// Signature; defaults to the union of the model signatures.
        #[arg(long)]
        props: Option<String>,
    },
    /// Print the kth Hintikka formula of a world.
    Hintikka {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        props: Option<String>,
    },
    /// Compile a formula into the logic's normal form.
    Nf {
        #[arg(long)]
        formula: String,
        /// Signature, e.g. `p` or `p,q`.
        #[arg(long)]
        props: String,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        logic: String,
        #[arg(long, default_value_t = teamlogic::normal_form::DEFAULT_TYPE_CAP)]
        type_cap: u64,
    },
    /// Decide entailment by normal forms or bounded search.
    Entail {
        /// nf or search.
        #[arg(long, default_value = "nf")]
        mode: String,
        #[arg(long = "premise")]
        premises: Vec<String>,
        #[arg(long)]
        conclusion: String,
        /// Signature for nf mode; defaults to the formulas' propositions.
        #[arg(long)]
        props: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, default_value_t = teamlogic::normal_form::DEFAULT_TYPE_CAP)]
        type_cap: u64,
    },
    /// Check a natural-deduction proof file.
    Check {
        #[arg(long)]
        proof: PathBuf,
        /// mlinc, mlmight, or mlsmight; defaults to the file's system.
        #[arg(long)]
        system: Option<String>,
    },
    /// Translate a modal inclusion formula into first-order inclusion
    /// logic.
    Translate {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
}

enum Outcome {
    Ok(serde_json::Value, String),
    False(serde_json::Value, String),
    Inconclusive(serde_json::Value, String),
}

struct DataError(String);

impl<E: std::error::Error> From<E> for DataError {
    fn from(e: E) -> DataError {
        DataError(e.to_string())
    }
}

fn load_model(path: &PathBuf) -> Result<KripkeModel, DataError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DataError(format!("{}: {e}", path.display())))?;
    KripkeModel::from_json(&text).map_err(DataError::from)
}

fn parse_props(spec: &str) -> PropSet {
    PropSet::new(spec.split(',').map(str::trim).filter(|s| !s.is_empty()))
}

fn verdict_outcome(v: EntailmentVerdict, method: &str) -> Outcome {
    match v.status {
        VerdictStatus::Entails => Outcome::Ok(
            json!({"command": "entail", "method": method, "status": "entails"}),
            "entails".to_string(),
        ),
        VerdictStatus::CounterModel { model, team } => {
            let model_json: serde_json::Value =
                serde_json::from_str(&model.to_json()).expect("model JSON is valid");
            Outcome::False(
                json!({
                    "command": "entail",
                    "method": method,
                    "status": "countermodel",
                    "model": model_json,
                    "team": team.to_string(),
                }),
                format!("countermodel\nteam: {{{team}}}\n{}", model.to_json()),
            )
        }
        VerdictStatus::BoundExhausted => Outcome::Inconclusive(
            json!({"command": "entail", "method": method, "status": "bound-exhausted"}),
            "bound exhausted: no countermodel within the bound".to_string(),
        ),
    }
}

fn run(cli: &Cli) -> Result<Outcome, DataError> {
    match &cli.command {
        Command::Parse { formula, logic } => {
            let f = match logic {
                Some(name) => {
                    let logic = Logic::from_name(name)
                        .ok_or_else(|| DataError(format!("unknown logic `{name}`")))?;
                    parse_formula(formula, logic)?
                }
                None => parse_any(formula)?,
            };
            let inferred = f.infer_logic()?;
            Ok(Outcome::Ok(
                json!({
                    "command": "parse",
                    "formula": print_formula(&f),
                    "logic": inferred.name(),
                    "modal_depth": f.modal_depth(),
                    "classical": f.is_classical(),
                }),
                print_formula(&f),
            ))
        }
        Command::Eval {
            model,
            team,
            formula,
        } => {
            let m = load_model(model)?;
            let f = parse_any(formula)?;
            f.infer_logic()?;
            let t = Team::parse(team);
            let value = eval_team(&m, &t, &f)?;
            let payload = json!({"command": "eval", "result": value});
            if value {
                Ok(Outcome::Ok(payload, "true".to_string()))
            } else {
                Ok(Outcome::False(payload, "false".to_string()))
            }
        }
        Command::Bisim {
            model,
            model2,
            world,
            world2,
            team,
            team2,
            k,
            props,
        } => {
            let m1 = load_model(model)?;
            let m2 = match model2 {
                Some(p) => load_model(p)?,
                None => m1.clone(),
            };
            let x = match props {
                Some(s) => parse_props(s),
                None => m1.signature().union(m2.signature()),
            };
            let value = match (world, world2, team, team2) {
                (Some(w1), Some(w2), None, None) => world_bisim_k(
                    PointedModel::new(&m1, w1)?,
                    PointedModel::new(&m2, w2)?,
                    &x,
                    *k,
                ),
                (None, None, Some(t1), Some(t2)) => {
                    team_bisim_k((&m1, &Team::parse(t1)), (&m2, &Team::parse(t2)), &x, *k)?
                }
                _ => {
                    return Err(DataError(
                        "pass either --world and --world2, or --team and --team2".to_string(),
                    ))
                }
            };
            let payload = json!({"command": "bisim", "k": k, "result": value});
            if value {
                Ok(Outcome::Ok(payload, "true".to_string()))
            } else {
                Ok(Outcome::False(payload, "false".to_string()))
            }
        }
        Command::Hintikka {
            model,
            world,
            k,
            props,
        } => {
            let m = load_model(model)?;
            let x = match props {
                Some(s) => parse_props(s),
                None => m.signature().clone(),
            };
            let chi = hintikka_world(PointedModel::new(&m, world)?, &x, *k);
            Ok(Outcome::Ok(
                json!({
                    "command": "hintikka",
                    "world": world,
                    "k": k,
                    "formula": print_formula(&chi),
                }),
                print_formula(&chi),
            ))
        }
        Command::Nf {
            formula,
            props,
            depth,
            logic,
            type_cap,
        } => {
            let logic = Logic::from_name(logic)
                .ok_or_else(|| DataError(format!("unknown logic `{logic}`")))?;
            let f = parse_formula(formula, logic)?;
            let x = parse_props(props);
            match normal_form(&f, &x, *depth, logic, *type_cap) {
                Ok(nf) => Ok(Outcome::Ok(
                    json!({"command": "nf", "formula": print_formula(&nf)}),
                    print_formula(&nf),
                )),
                Err(e @ NfError::TypeExplosion(_)) => Ok(Outcome::Inconclusive(
                    json!({"command": "nf", "status": "type-explosion", "detail": e.to_string()}),
                    e.to_string(),
                )),
                Err(e) => Err(DataError::from(e)),
            }
        }
        Command::Entail {
            mode,
            premises,
            conclusion,
            props,
            max_worlds,
            type_cap,
        } => {
            let premises: Vec<Formula> = premises
                .iter()
                .map(|s| parse_any(s))
                .collect::<Result<_, _>>()?;
            let conclusion = parse_any(conclusion)?;
            for f in premises.iter().chain([&conclusion]) {
                f.infer_logic()?;
            }
            match mode.as_str() {
                "nf" => {
                    let x = match props {
                        Some(s) => parse_props(s),
                        None => premises
                            .iter()
                            .chain([&conclusion])
                            .fold(PropSet::default(), |acc, f| acc.union(&f.props())),
                    };
                    match entails_nf(&premises, &conclusion, &x, *type_cap) {
                        Ok(v) => Ok(verdict_outcome(v, "nf")),
                        Err(e @ NfError::TypeExplosion(_)) => Ok(Outcome::Inconclusive(
                            json!({
                                "command": "entail",
                                "method": "nf",
                                "status": "type-explosion",
                                "detail": e.to_string(),
                            }),
                            format!("{e}\nfall back to --mode search"),
                        )),
                        Err(e) => Err(DataError::from(e)),
                    }
                }
                "search" => {
                    if *max_worlds < 1 || *max_worlds > 5 {
                        return Err(DataError(
                            "--max-worlds must be between 1 and 5".to_string(),
                        ));
                    }
                    let v = entails_bounded(&premises, &conclusion, *max_worlds)?;
                    Ok(verdict_outcome(v, "search"))
                }
                other => Err(DataError(format!("unknown mode `{other}`"))),
            }
        }
        Command::Check { proof, system } => {
            let text = std::fs::read_to_string(proof)
                .map_err(|e| DataError(format!("{}: {e}", proof.display())))?;
            let (file_system, derivation) = derivation_from_json(&text)?;
            let system = match (system, file_system) {
                (Some(name), declared) => {
                    let chosen = System::from_name(name)
                        .ok_or_else(|| DataError(format!("unknown system `{name}`")))?;
                    if let Some(declared) = declared {
                        if declared != chosen {
                            return Err(DataError(format!(
                                "proof file declares system {declared}, but --system {chosen} was given"
                            )));
                        }
                    }
                    chosen
                }
                (None, Some(declared)) => declared,
                (None, None) => {
                    return Err(DataError(
                        "no system: pass --system or declare one in the file".to_string(),
                    ))
                }
            };
            match check_derivation(&derivation, system) {
                Ok((conclusion, open)) => {
                    let opens: Vec<String> = open.iter().map(print_formula).collect();
                    Ok(Outcome::Ok(
                        json!({
                            "command": "check",
                            "status": "accepted",
                            "conclusion": print_formula(&conclusion),
                            "open_assumptions": opens,
                        }),
                        format!(
                            "accepted\nconclusion: {}\nopen: {{{}}}",
                            print_formula(&conclusion),
                            opens.join(", ")
                        ),
                    ))
                }
                Err(e) if e.class() == "format" => Err(DataError::from(e)),
                Err(e) => Ok(Outcome::False(
                    json!({
                        "command": "check",
                        "status": "rejected",
                        "error_class": e.class(),
                        "detail": e.to_string(),
                    }),
                    format!("rejected ({}): {e}", e.class()),
                )),
            }
        }
        Command::Translate { formula, var } => {
            let f = parse_any(formula)?;
            let fo = st_translate(&f, var)?;
            Ok(Outcome::Ok(
                json!({"command": "translate", "var": var, "formula": fo.to_string()}),
                fo.to_string(),
            ))
        }
    }
}

fn emit(structured: bool, payload: serde_json::Value, text: String) {
    if structured {
        println!("{payload}");
    } else {
        println!("{text}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::SUCCESS;
                }
                _ => EXIT_USAGE,
            };
            eprint!("{e}");
            return ExitCode::from(code);
        }
    };
    let structured = match cli.format.as_str() {
        "structured" => true,
        "text" => false,
        other => {
            eprintln!("unknown format `{other}` (use text or structured)");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok(payload, text)) => {
            emit(structured, payload, text);
            ExitCode::SUCCESS
        }
        Ok(Outcome::False(payload, text)) => {
            emit(structured, payload, text);
            ExitCode::from(EXIT_FALSE)
        }
        Ok(Outcome::Inconclusive(payload, text)) => {
            emit(structured, payload, text);
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
        Err(DataError(message)) => {
            if structured {
                println!("{}", json!({"error": message}));
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(EXIT_DATA)
        }
    }
}
