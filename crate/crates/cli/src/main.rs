use std::io::Write;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use locconj::conjcls::{class_invariant, similarity_rep, SimilarityRep};
use locconj::families::{
    borel_pair, cartan_pair, glp_pair, parse_family_ref, parse_subgroup, KernelKind, TauKind,
};
use locconj::lattice::{enumerate_subgroups, Budget, Dedup};
use locconj::verify::{self, Context, Status};
use locconj::{are_conjugate, are_locally_conjugate, Error, FamilyId, Mat2, Modulus, Subgroup};

const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "locconj",
    version,
    about = "Conjugacy and local conjugacy in GL2(Z/p^kZ)"
)]
struct Cli {
    /// Odd prime: 3, 5 or 7.
    #[arg(short = 'p', long, global = true, default_value_t = 3, value_parser = parse_prime)]
    prime: u32,

    /// Exponent of the modulus p^k: 1 or 2.
    #[arg(short = 'k', long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    exponent: u32,

    /// Seed for sampled suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DedupArg {
    Equality,
    Conjugacy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Table {
    SimilarityReps,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conjugacy-class invariant of a matrix.
    Classify {
        /// Matrix literal, e.g. "[[1,1],[0,1]]", "diag(2,1)" or "I+[[0,1],[0,0]]p".
        #[arg(short = 'g', long)]
        matrix: String,
    },
    /// Whether two subgroups are locally conjugate, and conjugate.
    Locconj {
        /// Subgroup literal: generators separated by ';', or a family such as "ker2.h3:d=0".
        #[arg(long = "H1")]
        h1: String,
        #[arg(long = "H2")]
        h2: String,
    },
    /// An explicit conjugator between two subgroups, if one exists.
    Conjugate {
        #[arg(long = "H1")]
        h1: String,
        #[arg(long = "H2")]
        h2: String,
    },
    /// Build a named subgroup or pair.
    Family {
        /// Family name, optionally with parameters: "b", "ker01.4:d=2", "cartan-pair".
        name: String,
        /// Diagonal subgroup D for the pair families.
        #[arg(long = "D")]
        d: Option<String>,
        /// Shape of tau for borel-pair.
        #[arg(long, default_value = "plain")]
        tau: String,
        /// Parameter a of tau for borel-pair.
        #[arg(long = "tau-a", default_value_t = 0)]
        tau_a: i64,
        /// Kernel generator for borel-pair: identity or lower.
        #[arg(long, default_value = "identity")]
        kernel: String,
    },
    /// Subgroups of a solvable group.
    Enumerate {
        /// Subgroup literal of the ambient group to search.
        #[arg(long)]
        within: String,
        #[arg(long, value_enum, default_value = "equality")]
        dedup: DedupArg,
        #[arg(long = "max-order")]
        max_order: Option<usize>,
        /// Seconds ("90s", "10m", "2h") or a maximum subgroup count.
        #[arg(long, value_parser = parse_budget)]
        budget: Option<BudgetArg>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, required_unless_present = "list")]
        claim: Option<String>,
        /// Print the claim index instead.
        #[arg(long)]
        list: bool,
        /// Seconds ("3600s", "10m", "2h") or a maximum subgroup count.
        #[arg(long, value_parser = parse_budget)]
        budget: Option<BudgetArg>,
    },
    /// Export a table.
    Export {
        #[arg(long, value_enum)]
        table: Table,
    },
}

#[derive(Clone, Copy, Debug)]
enum BudgetArg {
    Time(Duration),
    Count(usize),
}

impl BudgetArg {
    fn start(self) -> Budget {
        match self {
            BudgetArg::Time(d) => Budget::seconds(d.as_secs_f64()),
            BudgetArg::Count(n) => Budget {
                deadline: None,
                max_subgroups: Some(n),
            },
        }
    }
}

fn parse_prime(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(p @ (3 | 5 | 7)) => Ok(p),
        _ => Err(format!("p must be 3, 5 or 7, got {s:?}")),
    }
}

fn parse_budget(s: &str) -> Result<BudgetArg, String> {
    let bad = || format!("budget {s:?} is neither a duration like 3600s, 10m, 2h nor a count");
    if let Ok(n) = s.parse::<usize>() {
        return Ok(BudgetArg::Count(n));
    }
    let split = s
        .find(|c: char| !c.is_ascii_digit() && c != '.')
        .ok_or_else(bad)?;
    let (num, unit) = s.split_at(split);
    let value: f64 = num.parse().map_err(|_| bad())?;
    let secs = match unit {
        "ms" => value / 1000.0,
        "s" => value,
        "m" => value * 60.0,
        "h" => value * 3600.0,
        _ => return Err(bad()),
    };
    Ok(BudgetArg::Time(Duration::from_secs_f64(secs)))
}

/// Accepts the single-dash spellings `-H1`, `-H2` and `-D` as long flags.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.as_str() {
        "-H1" | "-H2" | "-D" => format!("-{a}"),
        _ => match a.split_once('=') {
            Some((flag @ ("-H1" | "-H2" | "-D"), value)) => format!("-{flag}={value}"),
            _ => a,
        },
    })
    .collect()
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

/// Output and exit status of a successful dispatch.
struct Outcome {
    body: String,
    code: u8,
}

impl Outcome {
    fn ok(body: String) -> Outcome {
        Outcome { body, code: 0 }
    }
}

fn render_json(v: &Value, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v).expect("values serialize")),
        Format::Text => Ok(text_lines(v, "")),
        Format::Csv => Err(Failure::Usage(
            "this command has no CSV form; use json or text".into(),
        )),
    }
}

/// `key: value` lines, nested keys joined with '.'.
fn text_lines(v: &Value, prefix: &str) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                text_lines(x, &key)
            })
            .collect::<Vec<_>>()
            .join("\n"),
        // Arrays of records get one indexed block each; matrices stay inline.
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => items
            .iter()
            .enumerate()
            .map(|(i, x)| text_lines(x, &format!("{prefix}[{i}]")))
            .collect::<Vec<_>>()
            .join("\n"),
        _ if prefix.is_empty() => v.to_string(),
        _ => format!("{prefix}: {v}"),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn subgroup_summary(h: &Subgroup) -> Value {
    json!({ "order": h.order(), "generators": h.generators() })
}

fn generators_literal(h: &Subgroup) -> String {
    h.generators()
        .iter()
        .map(Mat2::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let modulus = Modulus::new(cli.prime, cli.exponent)?;
    let format = cli.format;
    let json_or = |v: Value| -> Result<Outcome, Failure> {
        Ok(Outcome::ok(render_json(
            &v,
            format.unwrap_or(Format::Json),
        )?))
    };
    match cli.command {
        Command::Classify { matrix } => {
            let g = Mat2::parse(&matrix, modulus)?;
            let mut out = json!({
                "matrix": g,
                "modulus": modulus.m(),
                "invariant": class_invariant(&g),
                "invertible": g.is_invertible(),
            });
            if g.is_invertible() {
                out["order"] = json!(g.order());
            }
            let rep_input = if modulus.k() == 1 {
                g
            } else {
                g.reduce_mod_p()?
            };
            out["similarity_rep_mod_p"] =
                serde_json::to_value(similarity_rep(&rep_input)?).expect("serializable");
            json_or(out)
        }
        Command::Locconj { h1, h2 } => {
            let (a, b) = (parse_subgroup(&h1, modulus)?, parse_subgroup(&h2, modulus)?);
            let local = are_locally_conjugate(&a, &b);
            let witness = if local { are_conjugate(&a, &b) } else { None };
            let mut out = json!({ "locally_conjugate": local, "conjugate": witness.is_some() });
            if let Some(x) = witness {
                out["witness"] = json!(x);
            }
            json_or(out)
        }
        Command::Conjugate { h1, h2 } => {
            let (a, b) = (parse_subgroup(&h1, modulus)?, parse_subgroup(&h2, modulus)?);
            let witness = are_conjugate(&a, &b);
            json_or(json!({ "conjugate": witness.is_some(), "witness": witness }))
        }
        Command::Family {
            name,
            d,
            tau,
            tau_a,
            kernel,
        } => {
            let (id, _) = parse_family_ref(&name)?;
            if !id.is_pair() {
                return json_or(parse_subgroup(&name, modulus)?.to_json());
            }
            let d =
                d.ok_or_else(|| Failure::Usage(format!("{id} needs --D <diagonal subgroup>")))?;
            let d = parse_subgroup(&d, modulus)?;
            let (h1, h2) = match id {
                FamilyId::GLpPair => glp_pair(&d)?,
                FamilyId::CartanPair => cartan_pair(&d)?,
                FamilyId::BorelPair => {
                    let tau: TauKind = tau.parse()?;
                    let kernel: KernelKind = kernel.parse()?;
                    borel_pair(tau, modulus.residue(tau_a), kernel, &d)?
                }
                _ => unreachable!("is_pair covers the pair families"),
            };
            json_or(json!({
                "family": id.to_string(),
                "h1": subgroup_summary(&h1),
                "h2": subgroup_summary(&h2),
                "locally_conjugate": are_locally_conjugate(&h1, &h2),
            }))
        }
        Command::Enumerate {
            within,
            dedup,
            max_order,
            budget,
        } => {
            let universe = parse_subgroup(&within, modulus)?;
            let dedup = match dedup {
                DedupArg::Equality => Dedup::Equality,
                DedupArg::Conjugacy => Dedup::Conjugacy,
            };
            let budget = budget.map_or_else(Budget::unlimited, BudgetArg::start);
            let subs = enumerate_subgroups(&universe, dedup, max_order, &budget)?;
            if format == Some(Format::Csv) {
                let mut body = String::from("order,generators");
                for h in &subs {
                    body.push_str(&format!(
                        "\n{},{}",
                        h.order(),
                        csv_field(&generators_literal(h))
                    ));
                }
                return Ok(Outcome::ok(body));
            }
            json_or(json!({
                "count": subs.len(),
                "subgroups": subs.iter().map(subgroup_summary).collect::<Vec<_>>(),
            }))
        }
        Command::Verify {
            claim,
            list,
            budget,
        } => {
            if list {
                return json_or(json!(verify::claims()));
            }
            let id = claim.expect("clap requires --claim without --list");
            let mut ctx = Context::new(cli.prime).with_seed(cli.seed);
            if let Some(b) = budget {
                ctx = ctx.with_budget(b.start());
            }
            let report = verify::run(&id, &ctx)?;
            let code = match report.status {
                Status::Refuted => EXIT_REFUTED,
                Status::Skipped if report.stats.contains_key("budget_exceeded") => EXIT_BUDGET,
                _ => 0,
            };
            let value = serde_json::to_value(&report).expect("reports serialize");
            Ok(Outcome {
                body: render_json(&value, format.unwrap_or(Format::Json))?,
                code,
            })
        }
        Command::Export { table } => match table {
            Table::SimilarityReps => {
                let rows = SimilarityRep::table(cli.prime);
                if matches!(format, None | Some(Format::Csv)) {
                    let mut body = String::from("kind,w,z,y,matrix");
                    for row in &rows {
                        let (w, z, y) = match *row {
                            SimilarityRep::Scalar { w } | SimilarityRep::Jordan { w } => {
                                (w, None, None)
                            }
                            SimilarityRep::SplitDiagonal { w, z } => (w, Some(z), None),
                            SimilarityRep::Nonsplit { w, y } => (w, None, Some(y)),
                        };
                        let opt = |v: Option<u32>| v.map_or(String::new(), |v| v.to_string());
                        body.push_str(&format!(
                            "\n{},{w},{},{},{}",
                            row.kind(),
                            opt(z),
                            opt(y),
                            csv_field(&row.matrix(cli.prime).to_string())
                        ));
                    }
                    Ok(Outcome::ok(body))
                } else {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|r| {
                            let mut v = serde_json::to_value(r).expect("serializable");
                            v["matrix"] = json!(r.matrix(cli.prime));
                            v
                        })
                        .collect();
                    json_or(json!(v))
                }
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(out) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{}", out.body);
            ExitCode::from(out.code)
        }
        Err(Failure::Lib(Error::BudgetExceeded(why))) => {
            eprintln!("error: budget exceeded: {why}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
