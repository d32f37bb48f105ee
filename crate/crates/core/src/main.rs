//! Command-line interface.
//!
//! Exit codes: 0 success (and "equivalent" for `equiv`), 1 not equivalent,
//! 2 malformed input or violated precondition, 3 internal invariant
//! violation (always a bug, including fuzz counterexamples), 4 equivalence
//! undecidable (a non-nilpotent part is present). Stdout carries only the
//! canonical result; diagnostics go to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use genorth::emit::fuzz_label;
use genorth::json::{read_triple, write_triple};
use genorth::{assemble, canonical_string, classify, equivalent, parse_label, parse_rat, Error};

#[derive(Parser)]
#[command(
    name = "genorth",
    version,
    about = "Exact adjoint-orbit classification for the Lie algebra of a generalized orthogonal group (degenerate symmetric form, one-line radical)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a triple and print its canonical label string
    Classify {
        /// Triple in the JSON schema (see README)
        input: PathBuf,
        /// Split off a non-nilpotent part and report it as a U segment
        /// instead of rejecting it
        #[arg(long)]
        fitting: bool,
    },
    /// Decide whether two triples lie on the same orbit
    Equiv { a: PathBuf, b: PathBuf },
    /// Write the normal-form triple of a label to a JSON file
    Emit {
        /// Canonical label string, e.g. "S:single[s=1,eps=+,a2=1/4] + T:even[k=0,+]"
        label: String,
        /// Modulus for single-chain labels; must square to the label's a2.
        /// Optional when a2 is a perfect square.
        #[arg(long, value_name = "p/q")]
        alpha: Option<String>,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Emit a label, conjugate it by seeded random group elements, and
    /// check that every conjugate classifies identically
    Fuzz {
        #[arg(long)]
        label: String,
        #[arg(long, value_name = "p/q")]
        alpha: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the structural identities of a triple and print a report
    Validate { input: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) => 2,
        Error::Internal(_) => 3,
        Error::Undecidable(_) => 4,
    }
}

fn dispatch(command: Command) -> Result<u8, Error> {
    match command {
        Command::Classify { input, fitting } => {
            let t = read_triple(&input)?;
            t.require_valid()?;
            if !fitting && !t.is_nilpotent() {
                return Err(Error::input(
                    "xi is not nilpotent; pass --fitting to split off the invertible part",
                ));
            }
            let c = classify(&t)?;
            println!("{}", canonical_string(&c));
            Ok(0)
        }
        Command::Equiv { a, b } => {
            let ta = read_triple(&a)?;
            let tb = read_triple(&b)?;
            if equivalent(&ta, &tb)? {
                println!("equivalent");
                Ok(0)
            } else {
                println!("not equivalent");
                Ok(1)
            }
        }
        Command::Emit {
            label,
            alpha,
            output,
        } => {
            let c = parse_label(&label)?;
            let alpha = alpha.as_deref().map(parse_rat).transpose()?;
            let t = assemble(&c, alpha.as_ref())?;
            write_triple(&output, &t)?;
            Ok(0)
        }
        Command::Fuzz {
            label,
            alpha,
            trials,
            seed,
        } => {
            let c = parse_label(&label)?;
            let alpha = alpha.as_deref().map(parse_rat).transpose()?;
            match fuzz_label(&c, alpha.as_ref(), trials, seed)? {
                None => {
                    println!("ok: {trials} trials, classification invariant");
                    Ok(0)
                }
                Some(cx) => {
                    println!(
                        "counterexample at trial {}: expected {}, got {}",
                        cx.trial, cx.expected, cx.got
                    );
                    Ok(3)
                }
            }
        }
        Command::Validate { input } => {
            let t = read_triple(&input)?;
            match t.validate() {
                Ok(()) => {
                    println!("valid: dim={}, nilpotent={}", t.dim(), t.is_nilpotent());
                    Ok(0)
                }
                Err(v) => {
                    println!("invalid: {v}");
                    Ok(2)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
