use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinphase::amplitudes::{closed_form_probabilities, probabilities};
use spinphase::json::to_json_string;
use spinphase::linalg::{CScalar, Mat2C, Vec2C};
use spinphase::operators::SpinorPair;
use spinphase::papertables::{self, GridSpec};
use spinphase::reductions::{self, LimitReport};
use spinphase::simulate::{self, SimConfig, SimResult};
use spinphase::verify::{self, VerifyConfig};
use spinphase::{amplitude_matrix, build_operator_set, Direction, Outcome, PhaseConvention, SpinError};

const EXIT_FAILURE: u8 = 2;
const EXIT_USAGE: u8 = 1;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "spinphase", version, about = "Spin-½ amplitudes and generalized spin operators under explicit phase conventions")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Numerical tolerance for pass/fail decisions.
    #[arg(long, global = true, default_value_t = spinphase::DEFAULT_TOL)]
    tol: f64,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Component {
    Z,
    X,
    Y,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LimitArg {
    Pauli,
    Standard,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Amplitude and probability matrices between two directions.
    Amplitudes {
        #[arg(long, allow_hyphen_values = true, value_name = "THETA,PHI")]
        from: Direction,
        #[arg(long, allow_hyphen_values = true, value_name = "THETA,PHI")]
        to: Direction,
        #[arg(long, default_value = "old")]
        convention: PhaseConvention,
    },
    /// Generalized spin operators in the basis of `b` for the axis `c`.
    Operator {
        #[arg(long, allow_hyphen_values = true, value_name = "THETA,PHI")]
        b: Direction,
        #[arg(long, allow_hyphen_values = true, value_name = "THETA,PHI")]
        c: Direction,
        #[arg(long, default_value = "old")]
        convention: PhaseConvention,
        #[arg(long, value_enum, default_value_t = Component::All)]
        component: Component,
    },
    /// Seeded randomized invariant suite.
    Verify {
        #[arg(long, env = "SPINPHASE_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Conventions to sweep; repeat or comma-separate custom entries carefully.
        #[arg(long = "convention", value_name = "CONVENTION")]
        conventions: Vec<PhaseConvention>,
    },
    /// Compare registered closed-form expressions against the constructions.
    ComparePaper {
        #[arg(long, default_value = "default")]
        grid: GridSpec,
        /// Restrict to one convention.
        #[arg(long)]
        convention: Option<PhaseConvention>,
    },
    /// Check the Pauli or standard-generalized limit.
    Reduce {
        #[arg(long, value_enum)]
        limit: LimitArg,
        /// Conventions for the Pauli limit (default: old and new).
        #[arg(long = "convention", value_name = "CONVENTION")]
        conventions: Vec<PhaseConvention>,
    },
    /// Monte-Carlo sequential measurements.
    Simulate {
        /// JSON configuration file; replaces all other simulation flags.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["axis", "initial", "shots", "seed", "convention"])]
        config: Option<PathBuf>,
        /// Measurement axis, first one is the preparation axis. Repeat in order.
        #[arg(long, allow_hyphen_values = true, value_name = "THETA,PHI")]
        axis: Vec<Direction>,
        #[arg(long)]
        initial: Option<Outcome>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, env = "SPINPHASE_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        convention: Option<PhaseConvention>,
    },
}

/// Error classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<SpinError> for Failure {
    fn from(e: SpinError) -> Self {
        match e {
            SpinError::Parse { .. }
            | SpinError::InvalidConfig(_)
            | SpinError::NonFinite(_)
            | SpinError::ConventionUnsupported(_) => Failure::Usage(e.into()),
            _ => Failure::Internal(e.into()),
        }
    }
}

struct Rendered {
    json: String,
    table: String,
    pass: bool,
}

fn rendered<T: Serialize>(value: &T, table: String, pass: bool) -> Rendered {
    Rendered { json: to_json_string(value), table, pass }
}

fn fmt_c(z: CScalar) -> String {
    format!("{:+.16e}{:+.16e}i", z.re, z.im)
}

fn fmt_mat(name: &str, m: &Mat2C) -> String {
    format!(
        "{name}\n  [{}  {}]\n  [{}  {}]\n",
        fmt_c(m.get(0, 0)),
        fmt_c(m.get(0, 1)),
        fmt_c(m.get(1, 0)),
        fmt_c(m.get(1, 1))
    )
}

fn fmt_vec(name: &str, v: &Vec2C) -> String {
    format!("{name} = ({}, {})\n", fmt_c(v.get(0)), fmt_c(v.get(1)))
}

fn fmt_pair(name: &str, p: &SpinorPair) -> String {
    fmt_vec(&format!("{name}+"), &p.plus) + &fmt_vec(&format!("{name}-"), &p.minus)
}

#[derive(Serialize)]
struct AmplitudesOut {
    from: Direction,
    to: Direction,
    convention: PhaseConvention,
    psi: Mat2C,
    probabilities: [[f64; 2]; 2],
    closed_form: [[f64; 2]; 2],
    unitary_residual: f64,
}

fn cmd_amplitudes(from: Direction, to: Direction, conv: PhaseConvention) -> Rendered {
    let m = amplitude_matrix(&from, &to, &conv);
    let out = AmplitudesOut {
        from,
        to,
        convention: conv,
        psi: m.psi,
        probabilities: probabilities(&m),
        closed_form: closed_form_probabilities(&from, &to),
        unitary_residual: m.psi.unitary_residual(),
    };
    let mut t = format!("from {from} to {to}, convention {conv}\n");
    t += &fmt_mat("psi", &out.psi);
    for (i, row) in out.probabilities.iter().enumerate() {
        for (n, p) in row.iter().enumerate() {
            let s = |k| Outcome::from_index(k).symbol();
            let _ = writeln!(t, "P({} -> {}) = {:.16e}   closed form {:.16e}", s(i), s(n), p, out.closed_form[i][n]);
        }
    }
    let _ = writeln!(t, "unitary residual {:.3e}", out.unitary_residual);
    rendered(&out, t, true)
}

#[derive(Serialize)]
struct ComponentOut {
    b: Direction,
    c: Direction,
    convention: PhaseConvention,
    component: &'static str,
    matrix: Mat2C,
    eigenvectors: SpinorPair,
    eigen_residual: f64,
}

fn cmd_operator(b: Direction, c: Direction, conv: PhaseConvention, comp: Component, tol: f64) -> Result<Rendered, Failure> {
    let set = build_operator_set(&b, &c, &conv)?;
    let header = format!("b {b}, c {c}, convention {conv}\n");
    let pick = |k: usize| {
        let (name, m, e) = set.components()[k];
        ComponentOut { b, c, convention: conv, component: name, matrix: *m, eigenvectors: *e, eigen_residual: e.eigen_residual(m) }
    };
    let one = |k: usize| {
        let o = pick(k);
        let t = header.clone()
            + &fmt_mat(o.component, &o.matrix)
            + &fmt_pair("eigenvector ", &o.eigenvectors)
            + &format!("eigen residual {:.3e}\n", o.eigen_residual);
        let pass = o.eigen_residual <= tol;
        rendered(&o, t, pass)
    };
    Ok(match comp {
        Component::Z => one(0),
        Component::X => one(1),
        Component::Y => one(2),
        Component::All => {
            let mut t = header;
            for (name, m, e) in set.components() {
                t += &fmt_mat(name, m);
                t += &fmt_pair(&format!("{name} eigenvector "), e);
            }
            t += &fmt_mat("sigma_plus", &set.sigma_plus);
            t += &fmt_mat("sigma_minus", &set.sigma_minus);
            let residuals = [
                ("commutator", set.commutator_residual()),
                ("anticommutator", set.anticommutator_residual()),
                ("square", set.square_residual()),
                ("eigen", set.eigen_residual()),
                ("ladder", set.ladder_residual()),
                ("hermitian", set.hermitian_residual()),
            ];
            for (name, r) in residuals {
                let _ = writeln!(t, "{name} residual {r:.3e}");
            }
            let pass = residuals.iter().all(|(_, r)| *r <= tol);
            rendered(&set, t, pass)
        }
    })
}

fn cmd_verify(seed: u64, samples: usize, conventions: Vec<PhaseConvention>, tol: f64) -> Result<Rendered, Failure> {
    let mut cfg = VerifyConfig { seed, n_samples: samples, tolerance: tol, ..VerifyConfig::default() };
    if !conventions.is_empty() {
        cfg.conventions = conventions;
    }
    let report = verify::run_suite(&cfg)?;
    Ok(rendered(&report, verify::render_table(&report), report.pass))
}

fn cmd_compare(grid: GridSpec, conv: Option<PhaseConvention>, tol: f64) -> Result<Rendered, Failure> {
    let report = papertables::compare_with_tolerance(&grid, conv, tol)?;
    Ok(rendered(&report, papertables::render_table(&report), report.pass))
}

fn limit_table(reports: &[LimitReport]) -> String {
    let mut t = String::new();
    for r in reports {
        let _ = writeln!(t, "{:?} limit, convention {}, {} points", r.limit, r.convention, r.n_points);
        for e in &r.entries {
            let phase = e.phase.map(|p| format!("  phase {p:+.16e}")).unwrap_or_default();
            let _ = writeln!(t, "  {:<28} {:>12.3e}  {:?}{phase}", e.formula_id, e.max_residual, e.verdict);
        }
        let _ = writeln!(t, "  {}", if r.pass { "PASS" } else { "FAIL" });
    }
    t
}

fn cmd_reduce(limit: LimitArg, conventions: Vec<PhaseConvention>, tol: f64) -> Result<Rendered, Failure> {
    let reports = match limit {
        LimitArg::Pauli => {
            let convs = if conventions.is_empty() { vec![PhaseConvention::Old, PhaseConvention::New] } else { conventions };
            convs
                .iter()
                .map(|c| reductions::pauli_limit_with_tolerance(c, tol))
                .collect::<Result<Vec<_>, _>>()?
        }
        LimitArg::Standard => {
            if conventions.iter().any(|c| *c != PhaseConvention::New) {
                return Err(Failure::Usage(anyhow::anyhow!("the standard-generalized limit is defined for the new convention only")));
            }
            vec![reductions::standard_generalized_limit_with_tolerance(tol)?]
        }
    };
    let pass = reports.iter().all(|r| r.pass);
    Ok(rendered(&reports, limit_table(&reports), pass))
}

fn sim_table(r: &SimResult) -> String {
    let mut t = format!("generator {}\nseed {} shots {} convention {}\n", r.generator, r.seed, r.n_shots, r.config.convention);
    let _ = writeln!(t, "{:<8} {:>10} {:>24} {:>24}", "path", "count", "frequency", "predicted");
    for p in &r.paths {
        let _ = writeln!(t, "{:<8} {:>10} {:>24.16e} {:>24.16e}", p.path, p.count, p.frequency, p.predicted);
    }
    let _ = writeln!(t, "max deviation {:.16e}", r.max_deviation);
    t
}

fn read_sim_config(path: &PathBuf) -> Result<SimConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing simulation config {}", path.display()))
        .map_err(Failure::Usage)
}

fn cmd_simulate(cfg: SimConfig) -> Result<Rendered, Failure> {
    let result = simulate::run_sim(&cfg)?;
    Ok(rendered(&result, sim_table(&result), true))
}

fn run(cli: Cli) -> Result<Rendered, Failure> {
    if !(cli.tol > 0.0) {
        return Err(Failure::Usage(anyhow::anyhow!("--tol must be positive, got {}", cli.tol)));
    }
    match cli.command {
        Command::Amplitudes { from, to, convention } => Ok(cmd_amplitudes(from, to, convention)),
        Command::Operator { b, c, convention, component } => cmd_operator(b, c, convention, component, cli.tol),
        Command::Verify { seed, samples, conventions } => cmd_verify(seed, samples, conventions, cli.tol),
        Command::ComparePaper { grid, convention } => cmd_compare(grid, convention, cli.tol),
        Command::Reduce { limit, conventions } => cmd_reduce(limit, conventions, cli.tol),
        Command::Simulate { config, axis, initial, shots, seed, convention } => {
            let cfg = match config {
                Some(path) => read_sim_config(&path)?,
                None => SimConfig {
                    chain: axis,
                    initial: initial.unwrap_or(Outcome::Up),
                    n_shots: shots.unwrap_or(100_000),
                    seed: seed.unwrap_or(42),
                    convention: convention.unwrap_or(PhaseConvention::Old),
                },
            };
            cmd_simulate(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let (format, out) = (cli.output, cli.out.clone());
    match run(cli) {
        Ok(r) => {
            let mut text = match format {
                Format::Json => r.json,
                Format::Table => r.table,
            };
            if !text.ends_with('\n') {
                text.push('\n');
            }
            let written = match &out {
                Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_INTERNAL);
            }
            if r.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(EXIT_FAILURE)
            }
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
