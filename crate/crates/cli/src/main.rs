use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::Value;

use ultragreedoid::field::prime_power_decomposition;
use ultragreedoid::geg::{geg_enumerate, RawFamily, VectorFamily};
use ultragreedoid::newick::{parse_newick, triple_from_tree};
use ultragreedoid::represent::{build_representation, converse_search, RawBundle, Representation};
use ultragreedoid::setsys::{bhargava_bruteforce, greedy_schedule, SetSystem, MAX_ENUMERATION};
use ultragreedoid::ultra::{RawTriple, UltraTriple};
use ultragreedoid::FieldSpec;

#[derive(Parser)]
#[command(
    name = "ultragreedoid",
    version,
    about = "Bhargava greedoids of ultra triples and their finite-field representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct FieldArgs {
    /// Field order as `p` or `p^n`
    #[arg(long)]
    field: String,
    /// Modulus coefficients c0,c1,...,cn (little-endian, monic) for p^n
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a triple file is a valid ultra triple
    Validate { triple: PathBuf },
    /// Print the Bhargava greedoid (brute force)
    Greedoid { triple: PathBuf },
    /// Print the greedy order and its gains
    Schedule { triple: PathBuf },
    /// Print the maximum clique size
    Mcs { triple: PathBuf },
    /// Build a vector family representing the Bhargava greedoid
    Represent {
        triple: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        /// Re-derive both greedoids and fail unless they agree
        #[arg(long)]
        verify: bool,
        /// Write the bundle here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the Gaussian elimination greedoid of a matrix or bundle
    Geg { matrix: PathBuf },
    /// Print a matrix or bundle's matrix as CSV of element codes
    Csv { matrix: PathBuf },
    /// Exit 0 iff the matrix's greedoid equals the triple's Bhargava greedoid
    Check { matrix: PathBuf, triple: PathBuf },
    /// Convert a clock-like Newick tree to a triple
    FromNewick {
        tree: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search all |E| x |E| matrices over a field for one realizing a set system
    ConverseSearch {
        setsys: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))
}

fn load_triple(path: &Path) -> Result<UltraTriple> {
    let raw: RawTriple = read_json(path)?;
    Ok(UltraTriple::from_raw(&raw)?)
}

/// A bare matrix, or the matrix inside a representation bundle.
fn load_family(path: &Path) -> Result<VectorFamily> {
    let value: Value = read_json(path)?;
    if value.get("triple").is_some() {
        let raw: RawBundle = serde_json::from_value(value).context("malformed bundle")?;
        Ok(Representation::from_bundle(&raw)?.family)
    } else {
        let raw: RawFamily = serde_json::from_value(value).context("malformed matrix")?;
        Ok(VectorFamily::from_raw(&raw)?)
    }
}

fn parse_field(args: &FieldArgs) -> Result<FieldSpec> {
    let (p, n) = match args.field.split_once('^') {
        Some((p, n)) => (p.trim().parse::<u64>()?, n.trim().parse::<u32>()?),
        None => {
            let q: u64 = args
                .field
                .trim()
                .parse()
                .with_context(|| format!("bad field {:?}", args.field))?;
            match (&args.modulus, prime_power_decomposition(q)) {
                (Some(_), Some((p, n))) => (p, n),
                _ => return Ok(FieldSpec::of_order(q)?),
            }
        }
    };
    Ok(FieldSpec::new(p, n, args.modulus.clone())?)
}

/// JSON with object keys sorted, newline-terminated.
fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate { triple } => {
            let t = load_triple(&triple)?;
            println!("valid ultra triple with {} elements", t.len());
        }
        Command::Greedoid { triple } => {
            let g = bhargava_bruteforce(&load_triple(&triple)?)?;
            print!("{}", to_json(&g)?);
        }
        Command::Schedule { triple } => {
            print!("{}", to_json(&greedy_schedule(&load_triple(&triple)?))?);
        }
        Command::Mcs { triple } => {
            println!("{}", load_triple(&triple)?.mcs());
        }
        Command::Represent {
            triple,
            field,
            verify,
            output,
        } => {
            let t = load_triple(&triple)?;
            let spec = parse_field(&field)?;
            let rep = build_representation(&t, &spec)?;
            if verify {
                if t.len() > MAX_ENUMERATION {
                    bail!("--verify needs at most {MAX_ENUMERATION} elements, got {}", t.len());
                }
                if !rep.verify_against_oracle()? {
                    bail!("constructed matrix does not reproduce the Bhargava greedoid");
                }
            }
            emit(&to_json(&rep.to_bundle())?, output.as_deref())?;
        }
        Command::Geg { matrix } => {
            print!("{}", to_json(&geg_enumerate(&load_family(&matrix)?)?)?);
        }
        Command::Csv { matrix } => {
            print!("{}", load_family(&matrix)?.to_csv());
        }
        Command::Check { matrix, triple } => {
            let g = geg_enumerate(&load_family(&matrix)?)?;
            let b = bhargava_bruteforce(&load_triple(&triple)?)?;
            if g != b {
                eprintln!("greedoids differ");
                for s in g.sets().iter().filter(|s| !b.contains(s)) {
                    eprintln!("  only in matrix greedoid: {}", serde_json::to_string(s)?);
                }
                for s in b.sets().iter().filter(|s| !g.contains(s)) {
                    eprintln!("  only in Bhargava greedoid: {}", serde_json::to_string(s)?);
                }
                return Ok(ExitCode::from(1));
            }
            println!("greedoids agree ({} sets)", g.len());
        }
        Command::FromNewick { tree, output } => {
            let t = triple_from_tree(&parse_newick(&read(&tree)?)?)?;
            emit(&to_json(&t.to_raw())?, output.as_deref())?;
        }
        Command::ConverseSearch { setsys, field } => {
            let target: SetSystem = read_json(&setsys)?;
            let spec = parse_field(&field)?;
            match converse_search(&target, &spec)? {
                Some(fam) => print!("{}", to_json(&fam.to_raw())?),
                None => println!("absent"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
