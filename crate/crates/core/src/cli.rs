//! The `spindir` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or runtime assertion
//! fails (non-isotropic set, closure violation, solver failure), 2 on usage
//! errors (bad arguments, unreadable or malformed input).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::angular::HalfInt;
use crate::encoding::{
    antiparallel_state, optimal_state, parallel_state, product_state, EffectiveState,
};
use crate::error::{Error, Result};
use crate::fidelity::{
    antiparallel_even_maf, asymptotic_maf, info_gain, maf_closed_form, maf_quadrature,
    reports_to_csv, table_row_with_nodes, AsymptoticOrder, DEFAULT_INFO_NODES,
};
use crate::povm::{
    construct_isotropic_set, platonic_set, verify_isotropy, Platonic, WeightedDirectionSet,
    DEFAULT_ISOTROPY_TOL,
};
use crate::simulate::run_protocol;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "spindir",
    version,
    about = "Direction encoding in spin states: fidelities, finite measurements, simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingKind {
    Parallel,
    Antiparallel,
    Product,
    Optimal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelities and information gains of parallel, antiparallel and optimal encodings.
    Table {
        /// Inclusive range `a..b` (or a single N).
        #[arg(long = "n", value_parser = parse_range)]
        range: (u32, u32),
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Gauss–Legendre nodes for the information gain.
        #[arg(long, default_value_t = DEFAULT_INFO_NODES)]
        nodes: usize,
        /// Rounding for csv/text output.
        #[arg(long, default_value_t = 4)]
        decimals: usize,
    },
    /// Maximal average fidelity of one encoding (closed form and quadrature check).
    Maf {
        #[command(flatten)]
        encoding: EncodingArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Average information gain (bits) of one encoding.
    Infogain {
        #[command(flatten)]
        encoding: EncodingArgs,
        #[arg(long, default_value_t = DEFAULT_INFO_NODES)]
        nodes: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Exact antiparallel fidelity against its large-N approximations (even N).
    Asymptotics {
        #[arg(long = "n")]
        n_spins: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Construct or verify isotropic direction sets.
    Povm {
        #[command(subcommand)]
        action: PovmCommand,
    },
    /// Monte-Carlo simulation of the protocol with a finite measurement.
    Simulate {
        #[command(flatten)]
        encoding: EncodingArgs,
        /// tetrahedron, octahedron, construct:J or a CSV file.
        #[arg(long, value_parser = parse_set_source)]
        set: SetSource,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Drawn from the OS and printed when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

#[derive(Debug, Subcommand)]
pub enum PovmCommand {
    /// Write the ring-grid isotropic set for spin J as CSV.
    Construct {
        #[arg(long = "j", value_parser = parse_halfint)]
        j: HalfInt,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that a set's multipoles vanish up to order 2J.
    Verify {
        #[arg(long = "j", value_parser = parse_halfint)]
        j: HalfInt,
        #[arg(long, default_value_t = DEFAULT_ISOTROPY_TOL)]
        tol: f64,
        /// tetrahedron, octahedron, construct:J or a CSV file.
        #[arg(value_parser = parse_set_source)]
        set: SetSource,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
}

#[derive(Debug, Clone, Args)]
pub struct EncodingArgs {
    #[arg(long = "n")]
    pub n_spins: u32,
    #[arg(long, value_enum, default_value = "antiparallel")]
    pub encoding: EncodingKind,
    /// 2m, required for `--encoding product`.
    #[arg(long, allow_hyphen_values = true)]
    pub twice_m: Option<i32>,
}

impl EncodingArgs {
    pub fn build(&self) -> Result<EffectiveState> {
        let n = self.n_spins;
        if self.twice_m.is_some() && self.encoding != EncodingKind::Product {
            return Err(Error::InvalidArgument(
                "--twice-m only applies to --encoding product".into(),
            ));
        }
        match self.encoding {
            EncodingKind::Parallel => parallel_state(n),
            EncodingKind::Antiparallel => antiparallel_state(n),
            EncodingKind::Optimal => optimal_state(n).map(|(s, _)| s),
            EncodingKind::Product => {
                let tm = self.twice_m.ok_or_else(|| {
                    Error::InvalidArgument("--encoding product needs --twice-m".into())
                })?;
                product_state(n, HalfInt::from_twice(tm))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetSource {
    Platonic(Platonic),
    Construct(HalfInt),
    File(PathBuf),
}

impl SetSource {
    pub fn load(&self) -> Result<WeightedDirectionSet> {
        match self {
            SetSource::Platonic(p) => Ok(platonic_set(*p)),
            SetSource::Construct(j) => construct_isotropic_set(*j),
            SetSource::File(path) => {
                let file = File::open(path).map_err(|e| {
                    Error::InvalidArgument(format!("cannot open {}: {e}", path.display()))
                })?;
                WeightedDirectionSet::read_csv(file)
            }
        }
    }
}

fn parse_set_source(s: &str) -> std::result::Result<SetSource, String> {
    if let Ok(p) = Platonic::from_str(s) {
        return Ok(SetSource::Platonic(p));
    }
    if let Some(j) = s.strip_prefix("construct:") {
        return parse_halfint(j).map(SetSource::Construct);
    }
    Ok(SetSource::File(PathBuf::from(s)))
}

fn parse_halfint(s: &str) -> std::result::Result<HalfInt, String> {
    s.parse::<HalfInt>().map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("need 1 <= a <= b in a..b, got {s:?}"));
    }
    Ok((lo, hi))
}

/// `(exit code, message)` for the error cases of [`run`].
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::InvalidState(_)
        | Error::InvalidQuantumNumbers(_)
        | Error::InvalidDirectionSet(_)
        | Error::UnknownPlatonic(_)
        | Error::InsufficientNodes { .. }
        | Error::Parse(_)
        | Error::Csv(_)
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn check_format(format: OutputFormat, allowed: &[OutputFormat], command: &str) -> Result<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{command} does not support --format {format:?}"
        )))
    }
}

/// Runs one command, writing its report to `out` (and notes to `err`).
/// Returns the process exit code for non-error outcomes.
pub fn run<W: Write + ?Sized, E: Write + ?Sized>(cli: &Cli, out: &mut W, err: &mut E) -> Result<i32> {
    use OutputFormat::*;
    match &cli.command {
        Command::Table {
            range,
            format,
            nodes,
            decimals,
        } => {
            let rows = (range.0..=range.1)
                .map(|n| table_row_with_nodes(n, *nodes))
                .collect::<Result<Vec<_>>>()?;
            match format {
                Json if rows.len() == 1 => write_json(out, &rows[0])?,
                Json => write_json(out, &rows)?,
                Csv => write!(out, "{}", reports_to_csv(&rows, Some(*decimals)))?,
                Text => {
                    writeln!(
                        out,
                        "{:>4} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
                        "N", "F_P", "F_A", "F_O", "I_P", "I_A", "I_O"
                    )?;
                    for r in &rows {
                        write!(out, "{:>4}", r.n_spins)?;
                        for v in r.values() {
                            write!(out, " {v:>9.d$}", d = *decimals)?;
                        }
                        writeln!(out)?;
                    }
                }
            }
            Ok(EXIT_SUCCESS)
        }
        Command::Maf { encoding, format } => {
            check_format(*format, &[Json, Text], "maf")?;
            let state = encoding.build()?;
            let closed = maf_closed_form(&state);
            let nodes = state.total_spin().ceil() as usize + 2;
            let quad = maf_quadrature(&state, nodes)?;
            match format {
                Json => write_json(
                    out,
                    &json!({"state": state, "maf": closed, "maf_quadrature": quad}),
                )?,
                _ => writeln!(out, "{}: F = {closed:.12} (quadrature {quad:.12})", state.descriptor())?,
            }
            Ok(EXIT_SUCCESS)
        }
        Command::Infogain {
            encoding,
            nodes,
            format,
        } => {
            check_format(*format, &[Json, Text], "infogain")?;
            let state = encoding.build()?;
            let bits = info_gain(&state, *nodes)?;
            match format {
                Json => write_json(out, &json!({"state": state, "info_gain_bits": bits}))?,
                _ => writeln!(out, "{}: I = {bits:.10} bits", state.descriptor())?,
            }
            Ok(EXIT_SUCCESS)
        }
        Command::Asymptotics { n_spins, format } => {
            check_format(*format, &[Json, Text], "asymptotics")?;
            let leading = asymptotic_maf(*n_spins, AsymptoticOrder::Leading)?;
            let next = asymptotic_maf(*n_spins, AsymptoticOrder::Next)?;
            let exact = antiparallel_even_maf(n_spins / 2)?;
            let scaled = (exact - next).abs() * (*n_spins as f64).powi(3);
            match format {
                Json => write_json(
                    out,
                    &json!({
                        "N": n_spins,
                        "exact": exact,
                        "leading": leading,
                        "next": next,
                        "residual_times_N3": scaled,
                    }),
                )?,
                _ => writeln!(
                    out,
                    "N = {n_spins}: F_A = {exact:.12}, 1-1/(2N) = {leading:.12}, (2N+1)/(2N+2) = {next:.12}, |gap|·N³ = {scaled:.6}"
                )?,
            }
            Ok(EXIT_SUCCESS)
        }
        Command::Povm { action } => match action {
            PovmCommand::Construct { j, output } => {
                let set = construct_isotropic_set(*j)?;
                match output {
                    Some(path) => {
                        let file = File::create(path)?;
                        set.write_csv(BufWriter::new(file))?;
                        writeln!(
                            err,
                            "wrote {} directions (C = {}) to {}",
                            set.len(),
                            set.total_weight(),
                            path.display()
                        )?;
                    }
                    None => set.write_csv(&mut *out)?,
                }
                Ok(EXIT_SUCCESS)
            }
            PovmCommand::Verify {
                j,
                tol,
                set,
                format,
            } => {
                check_format(*format, &[Json, Text], "povm verify")?;
                if !(*tol > 0.0) {
                    return Err(Error::InvalidArgument("--tol must be positive".into()));
                }
                let set = set.load()?;
                let report = verify_isotropy(&set, *j, *tol);
                match format {
                    Json => write_json(out, &report.record())?,
                    _ => writeln!(
                        out,
                        "{} at J = {}: max |z_L^M|/C = {:e}, worst (L, M) = ({}, {})",
                        if report.pass { "pass" } else { "FAIL" },
                        report.j,
                        report.max_abs,
                        report.worst.0,
                        report.worst.1
                    )?,
                }
                Ok(if report.pass { EXIT_SUCCESS } else { EXIT_FAILURE })
            }
        },
        Command::Simulate {
            encoding,
            set,
            trials,
            seed,
            format,
        } => {
            check_format(*format, &[Json, Text], "simulate")?;
            let state = encoding.build()?;
            let set = set.load()?;
            let seed = match seed {
                Some(s) => *s,
                None => {
                    let s: u64 = rand::random();
                    writeln!(err, "seed: {s}")?;
                    s
                }
            };
            let report = run_protocol(&state, &set, *trials, seed)?;
            match format {
                Json => write_json(out, &report)?,
                _ => writeln!(
                    out,
                    "F = {:.6} ± {:.6} ({} trials, seed {})",
                    report.mean_fidelity, report.std_error, report.trials, report.seed
                )?,
            }
            Ok(EXIT_SUCCESS)
        }
    }
}
