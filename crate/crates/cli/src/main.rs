//! `malleq`: check proofs, decide equivalence, slice, encode trees and run
//! the reductions from the command line.
//!
//! Exit codes: 0 success / equivalent / true, 1 inequivalent / false,
//! 2 input or usage error.

use std::fmt::Display;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use malleq::bdt::{self, Bdt, Valuation, DEFAULT_ORACLE_BUDGET};
use malleq::classical::{check_mall_proof, mall_equiv, mall_equiv_oracle_with_budget, MallProof};
use malleq::encode::{check_representation, encode_with_order, VarOrder};
use malleq::equiv::{slicing_equiv, slicing_equiv_oracle, EquivVerdict};
use malleq::formula::OccPair;
use malleq::generators::{proof_pair, random_free_bdt, random_line, GenConfig};
use malleq::proof::{check_proof, Proof};
use malleq::reductions::{ord_solve, ord_to_bdt_pair, ord_to_proof_pair, LineGraph, OrdInstance};
use malleq::slicing::{bdt_slicing, bdt_slicing_pair, show_slicing, slicing};

const BUDGET_VAR: &str = "MALLEQ_ORACLE_BUDGET";

#[derive(Parser)]
#[command(name = "malleq", version, about = "Proof equivalence via BDT slicings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof and print its conclusion.
    Check { file: PathBuf },
    /// Decide whether two proofs are equivalent.
    Equiv(EquivArgs),
    /// Print the BDT slicing of a proof (or its explicit slicing).
    Slice {
        file: PathBuf,
        #[arg(long)]
        explicit: bool,
    },
    /// Print the tree of one occurrence pair.
    BdtSlice {
        file: PathBuf,
        /// Occurrence pair as `i,j`.
        #[arg(long)]
        pair: String,
    },
    /// Binary decision tree utilities.
    #[command(subcommand)]
    Bdt(BdtCommand),
    /// Encode a tree as a proof.
    Encode {
        file: PathBuf,
        /// Number of variables of the encoding.
        #[arg(long)]
        vars: usize,
        /// Comma-separated variable names, in index order.
        #[arg(long)]
        order: Option<String>,
        /// Verify the representation property instead of printing the proof.
        #[arg(long)]
        check_representation: bool,
    },
    /// Reduce an ORD instance (a line graph file) and decide it.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Generate random instances.
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        mutations: usize,
        /// Write files into this directory instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The one-sided classical calculus.
    #[command(subcommand)]
    Mall(MallCommand),
}

#[derive(Args)]
struct EquivArgs {
    left: PathBuf,
    right: PathBuf,
    /// Compare explicit slicings instead.
    #[arg(long)]
    oracle: bool,
    /// Print a distinguishing pair and leaves.
    #[arg(long)]
    witness: bool,
}

#[derive(Subcommand)]
enum BdtCommand {
    /// Decide whether two trees represent the same function.
    Equiv(EquivArgs),
    /// Evaluate a tree under a valuation such as `x=1,y=0`.
    Eval {
        file: PathBuf,
        #[arg(long, default_value = "")]
        set: String,
    },
}

#[derive(Args)]
struct OrdArgs {
    file: PathBuf,
    #[arg(long)]
    f: String,
    #[arg(long)]
    s: String,
    /// Also print the generated pair.
    #[arg(long)]
    emit: bool,
}

#[derive(Subcommand)]
enum ReduceCommand {
    OrdProof(OrdArgs),
    OrdBdt(OrdArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Bdt,
    ProofPair,
    Line,
}

#[derive(Subcommand)]
enum MallCommand {
    Check { file: PathBuf },
    Equiv(EquivArgs),
}

/// A one-line diagnostic; always exit code 2.
struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Run = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure(format!("<stdin>: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Reads and parses `path`, prefixing any error with the file name.
fn load<T, E: Display>(
    path: &Path,
    parse: impl FnOnce(&str) -> Result<T, E>,
) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn oracle_budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure(format!("{BUDGET_VAR}: expected a number, found `{v}`"))),
        Err(_) => Ok(DEFAULT_ORACLE_BUDGET),
    }
}

fn verdict(equivalent: bool) -> &'static str {
    if equivalent {
        "equivalent"
    } else {
        "inequivalent"
    }
}

fn report(v: &EquivVerdict, witness: bool) -> bool {
    println!("{}", verdict(v.equivalent));
    if witness {
        if let Some(w) = &v.witness {
            println!("witness: {w}");
        }
    }
    v.equivalent
}

fn load_proof(path: &Path) -> Result<Proof, Failure> {
    load(path, Proof::parse)
}

fn load_tree(path: &Path) -> Result<Bdt, Failure> {
    load(path, Bdt::parse)
}

fn parse_pair(text: &str) -> Result<OccPair, Failure> {
    let bad = || Failure(format!("--pair: expected `i,j` with i ≠ j, found `{text}`"));
    let (i, j) = text.split_once(',').ok_or_else(bad)?;
    let i = i.trim().parse().map_err(|_| bad())?;
    let j = j.trim().parse().map_err(|_| bad())?;
    OccPair::new(i, j).ok_or_else(bad)
}

fn parse_valuation(text: &str) -> Result<Valuation, Failure> {
    let mut v = Valuation::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, b) = part
            .split_once('=')
            .ok_or_else(|| Failure(format!("--set: expected `x=0` or `x=1`, found `{part}`")))?;
        let b = match b.trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Failure(format!(
                    "--set: value of `{x}` must be 0 or 1, found `{other}`"
                )))
            }
        };
        v.set(x.trim(), b);
    }
    Ok(v)
}

fn equiv_proofs(a: &EquivArgs) -> Run {
    let (p, q) = (load_proof(&a.left)?, load_proof(&a.right)?);
    if a.oracle {
        let eq = slicing_equiv_oracle(&p, &q, oracle_budget()?)?;
        println!("{}", verdict(eq));
        if a.witness && !eq {
            if let Some(w) = slicing_equiv(&p, &q)?.witness {
                println!("witness: {w}");
            }
        }
        return Ok(eq);
    }
    Ok(report(&slicing_equiv(&p, &q)?, a.witness))
}

fn equiv_trees(a: &EquivArgs) -> Run {
    let (t, u) = (load_tree(&a.left)?, load_tree(&a.right)?);
    let eq = if a.oracle {
        bdt::equiv_oracle_with_budget(&t, &u, oracle_budget()?)?
    } else {
        bdt::equiv(&t, &u)?
    };
    println!("{}", verdict(eq));
    if a.witness {
        if let Some((l, r)) = bdt::equiv_witness(&t, &u)? {
            println!("witness: left leaf {l}, right leaf {r}");
        }
    }
    Ok(eq)
}

fn equiv_mall(a: &EquivArgs) -> Run {
    let (p, q) = (
        load(&a.left, MallProof::parse)?,
        load(&a.right, MallProof::parse)?,
    );
    if a.oracle {
        let eq = mall_equiv_oracle_with_budget(&p, &q, oracle_budget()?)?;
        println!("{}", verdict(eq));
        if a.witness && !eq {
            if let Some(w) = mall_equiv(&p, &q)?.witness {
                println!("witness: {w}");
            }
        }
        return Ok(eq);
    }
    Ok(report(&mall_equiv(&p, &q)?, a.witness))
}

fn ord_instance(a: &OrdArgs) -> Result<OrdInstance, Failure> {
    let g = load(&a.file, LineGraph::parse)?;
    Ok(OrdInstance::new(g, a.f.clone(), a.s.clone())?)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    println!("{}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Check { file } => {
            let p = load_proof(&file)?;
            check_proof(&p).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
            println!("ok");
            println!("{}", p.conclusion());
            Ok(true)
        }
        Command::Equiv(a) => equiv_proofs(&a),
        Command::Slice { file, explicit } => {
            let p = load_proof(&file)?;
            println!("{}", p.conclusion());
            if explicit {
                println!("{}", show_slicing(&slicing(&p)));
            } else {
                print!("{}", bdt_slicing(&p));
            }
            Ok(true)
        }
        Command::BdtSlice { file, pair } => {
            let p = load_proof(&file)?;
            let pr = parse_pair(&pair)?;
            println!("{}", bdt_slicing_pair(&p, pr)?);
            Ok(true)
        }
        Command::Bdt(BdtCommand::Equiv(a)) => equiv_trees(&a),
        Command::Bdt(BdtCommand::Eval { file, set }) => {
            let t = load_tree(&file)?;
            let v = parse_valuation(&set)?;
            let out = t.eval(&v)?;
            println!("{out}");
            Ok(out)
        }
        Command::Encode {
            file,
            vars,
            order,
            check_representation: check,
        } => {
            let t = load_tree(&file)?;
            let order = match order {
                Some(o) => VarOrder::new(o.split(',').map(|s| s.trim().to_string()).collect())?,
                None => VarOrder::first_occurrence(&t, vars),
            };
            if check {
                let rep = check_representation(vars, &t, &order)?;
                println!("{}", if rep.all_ok() { "ok" } else { "mismatch" });
                print!("{rep}");
                return Ok(rep.all_ok());
            }
            let enc = encode_with_order(vars, &t, &order)?;
            println!("{}", enc.proof.pretty());
            Ok(true)
        }
        Command::Reduce(ReduceCommand::OrdProof(a)) => {
            let inst = ord_instance(&a)?;
            let (p, r) = ord_to_proof_pair(&inst)?;
            let eq = slicing_equiv(&p, &r)?.equivalent;
            println!("{}", verdict(eq));
            println!(
                "ord: {}",
                if ord_solve(&inst) {
                    "f before s"
                } else {
                    "s before f"
                }
            );
            if a.emit {
                println!("{p}");
                println!("{r}");
            }
            Ok(eq)
        }
        Command::Reduce(ReduceCommand::OrdBdt(a)) => {
            let inst = ord_instance(&a)?;
            let (t, u) = ord_to_bdt_pair(&inst)?;
            let eq = bdt::equiv(&t, &u)?;
            println!("{}", verdict(eq));
            println!(
                "ord: {}",
                if ord_solve(&inst) {
                    "f before s"
                } else {
                    "s before f"
                }
            );
            if a.emit {
                println!("{t}");
                println!("{u}");
            }
            Ok(eq)
        }
        Command::Gen {
            kind,
            seed,
            vars,
            depth,
            mutations,
            out,
        } => {
            let cfg = GenConfig {
                seed,
                var_budget: vars,
                depth_budget: depth,
                mutation_count: mutations,
            };
            match kind {
                GenKind::Bdt => {
                    let t = random_free_bdt(&cfg).to_string();
                    match out {
                        Some(dir) => write_out(&dir, "tree.bdt", &format!("{t}\n"))?,
                        None => println!("{t}"),
                    }
                }
                GenKind::ProofPair => {
                    if vars == 0 {
                        return Err(Failure("gen proof-pair: --vars must be at least 1".into()));
                    }
                    let pp = proof_pair(&cfg);
                    let header = format!("# expected: {}", verdict(pp.expected));
                    match out {
                        Some(dir) => {
                            println!("{header}");
                            write_out(&dir, "left.proof", &format!("{}\n", pp.left))?;
                            write_out(&dir, "right.proof", &format!("{}\n", pp.right))?;
                        }
                        None => println!("{header}\n{}\n{}", pp.left, pp.right),
                    }
                }
                GenKind::Line => {
                    if vars < 4 {
                        return Err(Failure("gen line: --vars must be at least 4".into()));
                    }
                    let inst = random_line(&cfg);
                    let text = format!("# f {} s {}\n{}", inst.f, inst.s, inst.graph);
                    match out {
                        Some(dir) => write_out(&dir, "line.txt", &text)?,
                        None => print!("{text}"),
                    }
                }
            }
            Ok(true)
        }
        Command::Mall(MallCommand::Check { file }) => {
            let p = load(&file, MallProof::parse)?;
            check_mall_proof(&p).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
            println!("ok");
            println!("{}", p.conclusion());
            Ok(true)
        }
        Command::Mall(MallCommand::Equiv(a)) => equiv_mall(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("3, 1").ok(), OccPair::new(1, 3));
        assert!(parse_pair("1,1").is_err());
        assert!(parse_pair("1").is_err());
    }

    #[test]
    fn valuations() {
        let v = parse_valuation("x=1, y=0").ok().unwrap();
        assert_eq!(v.get("x"), Some(true));
        assert_eq!(v.get("y"), Some(false));
        assert!(parse_valuation("x=2").is_err());
        assert!(parse_valuation("").ok().unwrap().iter().next().is_none());
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
