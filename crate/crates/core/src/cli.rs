//! Command-line front end. Each subcommand parses its inputs, calls one
//! library function and prints the result at 9 significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bell::{model_analysis, relaxed_chsh_bound, simulation_resources, LhvModel};
use crate::bounds::{c0, classical_tight_bound, pinsker_bound, quantum_tight_bound};
use crate::format::num;
use crate::prob::{
    binary_joint_from_params, classical_correlation_distance, classical_mutual_information, BinaryParams,
    JointTable,
};
use crate::qubit::{
    entanglement_report, make_state, quantum_correlation_distance, quantum_mutual_information, twirl,
    StateFamily, TwoQubitState,
};
use crate::verify::{brute_force_min_mi, emit_figure, run_sweep, Figure, OracleKind, SweepKind};
use crate::{Error, Result, Unit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "corrdist", version, about = "Mutual information and correlation distance for two-level systems")]
pub struct Cli {
    /// Report information quantities in nats instead of bits.
    #[arg(long, global = true)]
    pub nats: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Joint probability table as CSV.
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// Two-qubit density matrix as JSON.
    #[arg(long, value_name = "FILE")]
    state: Option<PathBuf>,
    /// Two-valued table given by marginal biases and correlation.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "R"], allow_negative_numbers = true)]
    binary: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Werner,
    BellDiagonal,
    Saturating,
    Classical,
    Product,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleArg {
    Classical,
    BellDiagonal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual information of a table or state.
    Mi(Input),
    /// Correlation distance of a table or state.
    Cdist(Input),
    /// Tight lower bound on I for two-valued variables.
    ClassicalBound {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
    },
    /// Quantum lower bound on I for two qubits.
    QuantumBound {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
    },
    /// Pinsker lower bound ½ C² log e.
    Pinsker {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
    },
    /// Threshold where the quantum bound changes branch.
    C0,
    /// Entanglement criteria of a state.
    Entangle {
        #[arg(long, value_name = "FILE")]
        state: PathBuf,
    },
    /// Write a state from a named family as JSON.
    MakeState {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Werner weight.
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Bell-diagonal correlations.
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        r: Option<Vec<f64>>,
        /// Correlation distance of the saturating state.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// 2x2 table for a classically correlated state.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
        /// Bloch vector of qubit A for a product state.
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        u: Option<Vec<f64>>,
        /// Bloch vector of qubit B for a product state.
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        v: Option<Vec<f64>>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Project a state onto the Werner family.
    Twirl {
        #[arg(long, value_name = "FILE")]
        state: PathBuf,
        /// Write the twirled state here instead of standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Outcome dependence and shared information needed for CHSH = 2 + V.
    BellResources {
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
    },
    /// CHSH value and outcome dependence of a hidden-variable model.
    ModelCheck {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
    },
    /// Run a seeded inequality sweep.
    Verify {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Grid minimum of I at fixed correlation distance.
    Oracle {
        #[arg(long, value_enum)]
        kind: OracleArg,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
    },
    /// Write bound curves as CSV.
    Figure {
        #[arg(long)]
        which: String,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<TwoQubitState> {
    TwoQubitState::from_json(&read(path)?)
}

fn load_table(path: &Path) -> Result<JointTable> {
    JointTable::from_csv(&read(path)?)
}

fn triple(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

enum Loaded {
    Table(JointTable),
    State(Box<TwoQubitState>),
}

fn load_input(input: &Input) -> Result<Loaded> {
    if let Some(p) = &input.table {
        return Ok(Loaded::Table(load_table(p)?));
    }
    if let Some(p) = &input.state {
        return Ok(Loaded::State(Box::new(load_state(p)?)));
    }
    let b = input.binary.as_deref().expect("clap enforces one input");
    let params = BinaryParams::new(b[0], b[1], b[2])?;
    Ok(Loaded::Table(binary_joint_from_params(&params)?))
}

fn missing(flag: &str, family: &str) -> Error {
    Error::domain(format!("--{flag} is required for family {family}"))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let unit = if cli.nats { Unit::Nats } else { Unit::Bits };
    match &cli.command {
        Command::Mi(input) => {
            let i = match load_input(input)? {
                Loaded::Table(t) => classical_mutual_information(&t, unit),
                Loaded::State(s) => quantum_mutual_information(&s, unit),
            };
            writeln!(out, "{}", num(i))?;
        }
        Command::Cdist(input) => {
            let c = match load_input(input)? {
                Loaded::Table(t) => classical_correlation_distance(&t),
                Loaded::State(s) => quantum_correlation_distance(&s)?,
            };
            writeln!(out, "{}", num(c))?;
        }
        Command::ClassicalBound { c } => writeln!(out, "{}", num(classical_tight_bound(*c, unit)?))?,
        Command::QuantumBound { c } => writeln!(out, "{}", num(quantum_tight_bound(*c, unit)?))?,
        Command::Pinsker { c } => writeln!(out, "{}", num(pinsker_bound(*c, unit)?))?,
        Command::C0 => writeln!(out, "{}", num(c0()))?,
        Command::Entangle { state } => {
            let r = entanglement_report(&load_state(state)?)?;
            writeln!(out, "correlation_distance={}", num(r.correlation_distance))?;
            writeln!(out, "purity_bound={}", num(r.purity_bound))?;
            writeln!(out, "covariance_sum={}", num(r.covariance_sum))?;
            writeln!(out, "min_partial_transpose_eigenvalue={}", num(r.min_partial_transpose_eigenvalue))?;
            writeln!(out, "cdist_gt_one={}", r.cdist_gt_one)?;
            writeln!(out, "purity_criterion={}", r.purity_criterion)?;
            writeln!(out, "covariance_criterion={}", r.covariance_criterion)?;
            writeln!(out, "ppt_entangled={}", r.ppt_entangled)?;
        }
        Command::MakeState { family, p, r, c, table, u, v, out: path } => {
            let fam = match family {
                FamilyArg::Werner => StateFamily::Werner { p: p.ok_or_else(|| missing("p", "werner"))? },
                FamilyArg::BellDiagonal => {
                    StateFamily::BellDiagonal { r: triple(r.as_deref().ok_or_else(|| missing("r", "bell-diagonal"))?) }
                }
                FamilyArg::Saturating => StateFamily::Saturating { c: c.ok_or_else(|| missing("c", "saturating"))? },
                FamilyArg::Classical => StateFamily::ClassicallyCorrelated {
                    table: load_table(table.as_deref().ok_or_else(|| missing("table", "classical"))?)?,
                    bases: None,
                },
                FamilyArg::Product => StateFamily::Product {
                    u: triple(u.as_deref().ok_or_else(|| missing("u", "product"))?),
                    v: triple(v.as_deref().ok_or_else(|| missing("v", "product"))?),
                },
            };
            std::fs::write(path, make_state(&fam)?.to_json())?;
        }
        Command::Twirl { state, out: path } => {
            let json = twirl(&load_state(state)?)?.to_json();
            match path {
                Some(p) => std::fs::write(p, json)?,
                None => writeln!(out, "{json}")?,
            }
        }
        Command::BellResources { v } => {
            let res = simulation_resources(*v)?;
            let i_min = unit.from_nats(res.i_min_bits * std::f64::consts::LN_2);
            writeln!(out, "c_max={} i_min={}", num(res.c_max_required), num(i_min))?;
        }
        Command::ModelCheck { model } => {
            let a = model_analysis(&LhvModel::from_json(&read(model)?)?);
            let bound = relaxed_chsh_bound(a.c_max.min(1.0))?;
            writeln!(
                out,
                "chsh={} c_max={} relaxed_bound={} outcome_independent={}",
                num(a.chsh),
                num(a.c_max),
                num(bound),
                a.outcome_independent
            )?;
        }
        Command::Verify { kind, samples, seed, json } => {
            let kind: SweepKind = kind.parse()?;
            let report = run_sweep(kind, *samples, *seed)?;
            if *json {
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
            } else {
                writeln!(out, "{}", report.summary())?;
                if report.violations > 0 || !report.asserted {
                    writeln!(out, "worst_case={}", report.worst_case)?;
                }
            }
            if report.asserted && !report.passed() {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::Oracle { kind, c, resolution } => {
            let kind = match kind {
                OracleArg::Classical => OracleKind::Classical,
                OracleArg::BellDiagonal => OracleKind::BellDiagonal,
            };
            let bits = brute_force_min_mi(kind, *c, *resolution)?;
            writeln!(out, "{}", num(unit.from_nats(bits * std::f64::consts::LN_2)))?;
        }
        Command::Figure { which, step, out: path } => {
            let fig: Figure = which.parse()?;
            emit_figure(fig, *step, path)?;
        }
    }
    Ok(EXIT_OK)
}
