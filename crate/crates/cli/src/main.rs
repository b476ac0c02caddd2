use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nomc::context::Context;
use nomc::equiv::{Checker, EquivError};
use nomc::groups::GroupError;
use nomc::text::{parse_context, parse_file, ParseError, Statement};
use nomc::unify::{solve_detailed, Solution};

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "nomc", version, about = "α-equivalence and unification modulo commutativity for nominal terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Print the derivation tree of a derivable judgement
    #[arg(long, global = true)]
    proof: bool,
    /// Print the simplification steps of every branch with their measures
    #[arg(long, global = true)]
    trace: bool,
    /// Largest permutation group the checker may enumerate
    #[arg(long, global = true, value_name = "N", default_value_t = nomc::DEFAULT_GROUP_CAP)]
    max_group_order: usize,
    /// Accepted for test tooling; the commands are deterministic
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a judgement `ctx |- s = t`
    Check { file: PathBuf },
    /// Solve a unification problem `s =? t, ...`
    Unify { file: PathBuf },
    /// Print the normal form of a context, or of a judgement's context
    Normalize { file: PathBuf },
}

fn read(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })
}

fn parse_error(path: &Path, e: &ParseError) -> u8 {
    let what = if e.is_signature_error() {
        "signature error"
    } else {
        "parse error"
    };
    eprintln!("{what}: {}:{e}", path.display());
    EXIT_INPUT
}

fn context_json(ctx: &Context) -> Value {
    let constraints: Vec<Value> = ctx
        .constraints()
        .map(|c| json!({ "perm": c.perm.cycles().iter().map(|cy| cy.iter().map(|a| a.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(), "var": c.var.to_string() }))
        .collect();
    json!({
        "new": ctx.nu().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "context": constraints,
    })
}

fn check(path: &Path, flags: &Flags) -> Result<u8, u8> {
    let file = parse_file(&read(path)?).map_err(|e| parse_error(path, &e))?;
    let Statement::Judgement(j) = file.statement else {
        eprintln!("error: {}: expected a judgement `ctx |- s = t`", path.display());
        return Err(EXIT_INPUT);
    };
    let checker = Checker::with_group_cap(flags.max_group_order);
    let proof = checker.prove(&j.ctx, &j.lhs, &j.rhs).map_err(|e| match e {
        EquivError::Group(GroupError::CapExceeded { .. }) => {
            eprintln!("error: {e}; raise --max-group-order to continue");
            EXIT_CAP
        }
        other => {
            eprintln!("error: {other}");
            EXIT_INPUT
        }
    })?;
    if flags.json {
        let mut out = json!({ "derivable": proof.is_some() });
        if let (true, Some(tree)) = (flags.proof, &proof) {
            out["proof"] = tree.to_json();
        }
        println!("{out}");
    } else {
        match &proof {
            Some(tree) => {
                println!("derivable");
                if flags.proof {
                    print!("{tree}");
                }
            }
            None => println!("not derivable"),
        }
    }
    Ok(if proof.is_some() { EXIT_OK } else { EXIT_NO })
}

fn unify(path: &Path, flags: &Flags) -> Result<u8, u8> {
    let file = parse_file(&read(path)?).map_err(|e| parse_error(path, &e))?;
    let Statement::Goal(problem) = file.statement else {
        eprintln!("error: {}: expected a problem `s =? t, ...`", path.display());
        return Err(EXIT_INPUT);
    };
    let report = solve_detailed(&problem, flags.trace);
    let failures: Vec<Value> = report
        .failures()
        .map(|(c, r)| json!({ "reason": r.to_string(), "constraint": c.to_string() }))
        .collect();
    if flags.json {
        let mut out = json!({
            "solutions": report.solutions.iter().map(Solution::to_json).collect::<Vec<_>>(),
            "unsolvable": report.solutions.is_empty(),
            "failures": failures,
        });
        if flags.trace {
            out["trace"] = report
                .branches
                .iter()
                .map(|b| {
                    b.path
                        .iter()
                        .map(|s| {
                            json!({
                                "rule": s.rule.to_string(),
                                "constraint": s.selected.to_string(),
                                "before": { "n": s.before.var_count, "sizes": s.before.sizes },
                                "after": { "n": s.after.var_count, "sizes": s.after.sizes },
                            })
                        })
                        .collect::<Value>()
                })
                .collect::<Value>();
        }
        println!("{out}");
    } else {
        if flags.trace {
            for (i, b) in report.branches.iter().enumerate() {
                println!("branch {}:", i + 1);
                for s in &b.path {
                    println!("  {} -> {}  {}  on {}", s.before, s.after, s.rule, s.selected);
                }
                match &b.outcome {
                    Ok(_) => println!("  normal form: {}", b.normal_form),
                    Err((c, r)) => println!("  fails: {r} on {c}"),
                }
            }
        }
        if report.solutions.is_empty() {
            println!("unsolvable");
            for (c, r) in report.failures() {
                println!("  {r}: {c}");
            }
        } else {
            for s in &report.solutions {
                println!("{s}");
            }
        }
    }
    Ok(if report.solutions.is_empty() { EXIT_NO } else { EXIT_OK })
}

fn normalize(path: &Path, flags: &Flags) -> Result<u8, u8> {
    let text = read(path)?;
    let ctx = match parse_context(&text) {
        Ok(ctx) => ctx,
        Err(first) => match parse_file(&text) {
            Ok(file) => match file.statement {
                Statement::Judgement(j) => j.ctx,
                Statement::Goal(_) => return Err(parse_error(path, &first)),
            },
            Err(_) => return Err(parse_error(path, &first)),
        },
    };
    let normal = ctx.normalize();
    if flags.json {
        println!("{}", context_json(&normal));
    } else {
        println!("{normal}");
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file } => check(file, &cli.flags),
        Command::Unify { file } => unify(file, &cli.flags),
        Command::Normalize { file } => normalize(file, &cli.flags),
    };
    ExitCode::from(result.unwrap_or_else(|code| code))
}
