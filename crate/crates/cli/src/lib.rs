//! Library side of the `pwlab` command-line tool: argument model, commands
//! and table emission. The binary only parses, runs and maps exit codes.

pub mod sweep;
pub mod table;

use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use pwlab_core::freescatter::zero_energy_strength;
use pwlab_core::q2d::{self, Q2DChannel};
use pwlab_core::traporacle::oracle_levels;
use pwlab_core::trapspec::{
    pole_energies, solve_spectrum_edp_with, solve_spectrum_with, SolverOptions, SpectrumWarning,
};
use pwlab_core::{
    Channel, Error, InteractionStrength, OracleConfig, SquareWellPotential, TrapGeometry,
};

pub use sweep::{Scale, SweepSpec, SweepVariable, Window};
pub use table::{Cell, OutputTable};

#[derive(Debug, Parser)]
#[command(
    name = "pwlab",
    version,
    about = "Two-body p-wave and s-wave spectra, trap oracle and quasi-2D scattering tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the table here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<std::path::PathBuf>,
    /// Emit a JSON document instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// Root tolerance in units of ħω.
    #[arg(long, global = true, env = "PWLAB_TOL", default_value_t = 1e-10)]
    pub tol: f64,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Wave {
    S,
    P,
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wave::S => "s",
            Wave::P => "p",
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum of two atoms in a trap versus a fixed interaction strength.
    Spectrum {
        #[arg(long, value_enum, default_value_t = Wave::P)]
        wave: Wave,
        /// Pancake index: ω_⊥ = ω_z/n.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Projection of angular momentum on the trap axis (p-wave).
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i32,
        /// Strength sweep, e.g. apvol-inv:-30:30:121.
        #[arg(long)]
        sweep: SweepSpec,
        /// Energy window lo:hi in ħω_z; its edges must avoid the poles.
        #[arg(long, default_value = "-4:5.95", allow_hyphen_values = true)]
        window: Window,
        #[arg(long, default_value_t = 20)]
        max_roots: usize,
    },
    /// Square-well spectrum: energy-dependent, fixed-strength and exact levels.
    SpectrumEdp {
        #[arg(long, value_enum, default_value_t = Wave::P)]
        wave: Wave,
        /// Well radius R₀ in d.
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        /// Depth sweep; negative U is attractive, e.g. depth:-2100:-1800:61.
        #[arg(long, allow_hyphen_values = true)]
        sweep: SweepSpec,
        #[arg(long, default_value = "-4:6", allow_hyphen_values = true)]
        window: Window,
        #[arg(long, default_value_t = 20)]
        max_roots: usize,
    },
    /// Exact levels of a square well in an isotropic trap.
    Oracle {
        #[arg(long, value_enum, default_value_t = Wave::P)]
        wave: Wave,
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        #[arg(long, allow_hyphen_values = true)]
        sweep: SweepSpec,
        #[arg(long, default_value = "-4:6", allow_hyphen_values = true)]
        window: Window,
    },
    /// Quasi-2D p-wave scattering: cot δ₁ and |f(0)|², or V_c(ℰ) with --inset.
    Q2d {
        /// Energies ℰ in ħω_z (comma separated) for the scattering-volume sweep.
        #[arg(long, value_delimiter = ',')]
        energy: Vec<f64>,
        /// apvol sweep, or an energy sweep with --inset.
        #[arg(long)]
        sweep: SweepSpec,
        /// Emit the critical volume V_c(ℰ) instead.
        #[arg(long)]
        inset: bool,
    },
    /// Energy at which the confinement-induced resonance disappears.
    Resonance,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. }
            | Error::InvalidWindow { .. }
            | Error::WindowEdgeAtPole { .. }
            | Error::Unsupported(_)
            | Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn require_variable(sweep: &SweepSpec, allowed: &[SweepVariable]) -> Result<(), CliError> {
    if allowed.contains(&sweep.variable) {
        return Ok(());
    }
    let names: Vec<&str> = allowed.iter().map(|v| v.name()).collect();
    usage(format!(
        "sweep variable '{}' is not valid here (expected {})",
        sweep.variable.name(),
        names.join(" or ")
    ))
}

fn channel_for(wave: Wave, m: i32) -> Result<Channel, CliError> {
    match wave {
        Wave::S if m != 0 => usage("s-wave has m = 0 only"),
        Wave::S => Ok(Channel::S),
        Wave::P => Ok(Channel::from_m(m)?),
    }
}

/// Evaluates `f` over the sweep in parallel; rows keep sweep order and the
/// first failing point (in sweep order) is reported.
fn sweep_rows<F>(values: &[f64], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64) -> Result<Vec<Vec<Cell>>, CliError> + Sync,
{
    let results: Vec<_> = values.par_iter().map(|&v| f(v)).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Canonical arguments that reproduce the table (output options excluded).
fn canonical_args(cmd: &Command, tol: f64) -> String {
    let body = match cmd {
        Command::Spectrum {
            wave,
            n,
            m,
            sweep,
            window,
            max_roots,
        } => format!(
            "spectrum --wave {wave} --n {n} --m {m} --sweep {sweep} --window {window} --max-roots {max_roots}"
        ),
        Command::SpectrumEdp {
            wave,
            radius,
            sweep,
            window,
            max_roots,
        } => format!(
            "spectrum-edp --wave {wave} --radius {radius} --sweep {sweep} --window {window} --max-roots {max_roots}"
        ),
        Command::Oracle {
            wave,
            radius,
            sweep,
            window,
        } => format!("oracle --wave {wave} --radius {radius} --sweep {sweep} --window {window}"),
        Command::Q2d {
            energy,
            sweep,
            inset,
        } => {
            let mut s = format!("q2d --sweep {sweep}");
            if !energy.is_empty() {
                let e: Vec<String> = energy.iter().map(f64::to_string).collect();
                s.push_str(&format!(" --energy {}", e.join(",")));
            }
            if *inset {
                s.push_str(" --inset");
            }
            s
        }
        Command::Resonance => "resonance".to_string(),
    };
    format!("{body} --tol {tol:e}")
}

/// Runs a parsed command and returns its table.
pub fn run(cli: &Cli) -> Result<OutputTable, CliError> {
    let tol = cli.common.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return usage(format!("--tol must be a positive number (got {tol})"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let mut table = pool.install(|| run_command(&cli.command, tol))?;
    let mut head = vec![
        (
            "command".to_string(),
            command_name(&cli.command).to_string(),
        ),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("args".to_string(), canonical_args(&cli.command, tol)),
    ];
    head.append(&mut table.metadata);
    table.metadata = head;
    Ok(table)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Spectrum { .. } => "spectrum",
        Command::SpectrumEdp { .. } => "spectrum-edp",
        Command::Oracle { .. } => "oracle",
        Command::Q2d { .. } => "q2d",
        Command::Resonance => "resonance",
    }
}

fn run_command(cmd: &Command, tol: f64) -> Result<OutputTable, CliError> {
    match cmd {
        Command::Spectrum {
            wave,
            n,
            m,
            sweep,
            window,
            max_roots,
        } => spectrum(*wave, *n, *m, sweep, *window, *max_roots, tol),
        Command::SpectrumEdp {
            wave,
            radius,
            sweep,
            window,
            max_roots,
        } => spectrum_edp(*wave, *radius, sweep, *window, *max_roots, tol),
        Command::Oracle {
            wave,
            radius,
            sweep,
            window,
        } => oracle(*wave, *radius, sweep, *window, tol),
        Command::Q2d {
            energy,
            sweep,
            inset,
        } => {
            if *inset {
                q2d_inset(energy, sweep)
            } else {
                q2d_main(energy, sweep)
            }
        }
        Command::Resonance => resonance(),
    }
}

fn spectrum(
    wave: Wave,
    n: u32,
    m: i32,
    sweep: &SweepSpec,
    window: Window,
    max_roots: usize,
    tol: f64,
) -> Result<OutputTable, CliError> {
    let channel = channel_for(wave, m)?;
    let geometry = TrapGeometry::pancake(n)?;
    match wave {
        Wave::S => require_variable(
            sweep,
            &[SweepVariable::InverseSStrength, SweepVariable::SStrength],
        )?,
        Wave::P => require_variable(
            sweep,
            &[SweepVariable::InversePStrength, SweepVariable::PStrength],
        )?,
    }
    let options = SolverOptions {
        tolerance: tol,
        ..SolverOptions::default()
    };
    let values = sweep.values();
    let short = std::sync::atomic::AtomicUsize::new(0);
    let rows = sweep_rows(&values, |v| {
        let inverse = match sweep.variable {
            SweepVariable::InversePStrength | SweepVariable::InverseSStrength => v,
            _ => 1.0 / v,
        };
        let strength = match wave {
            Wave::S => InteractionStrength::FixedS {
                inverse_length: inverse,
            },
            Wave::P => InteractionStrength::FixedP {
                inverse_volume: inverse,
            },
        };
        let r = solve_spectrum_with(
            &geometry,
            &strength,
            channel,
            (window.lo, window.hi),
            max_roots,
            &options,
        )?;
        if r.warnings
            .iter()
            .any(|w| matches!(w, SpectrumWarning::WindowTooSmall { .. }))
        {
            short.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        Ok(r.roots
            .iter()
            .map(|root| {
                vec![
                    Cell::Num(v),
                    Cell::Int(root.branch as i64),
                    Cell::Num(root.energy),
                    Cell::Int(root.validity_warning as i64),
                ]
            })
            .collect())
    })?;
    let mut table = OutputTable::new(&[
        sweep.variable.name(),
        "branch",
        "energy",
        "validity_warning",
    ]);
    table.meta("wave", wave);
    table.meta("n", n);
    table.meta("m", m);
    table.meta("sweep", sweep);
    table.meta("window", window);
    table.meta("max_roots", max_roots);
    table.meta("tol", format!("{tol:e}"));
    table.meta("points_with_fewer_roots", short.into_inner());
    table.rows = rows;
    Ok(table)
}

fn signed_well(depth: f64, radius: f64) -> Result<SquareWellPotential, CliError> {
    Ok(SquareWellPotential::from_signed_depth(depth, radius)?)
}

fn spectrum_edp(
    wave: Wave,
    radius: f64,
    sweep: &SweepSpec,
    window: Window,
    max_roots: usize,
    tol: f64,
) -> Result<OutputTable, CliError> {
    require_variable(sweep, &[SweepVariable::WellDepth])?;
    let channel = channel_for(wave, 0)?;
    let l = channel.l();
    let geometry = TrapGeometry::isotropic();
    let options = SolverOptions {
        tolerance: tol,
        ..SolverOptions::default()
    };
    let config = OracleConfig {
        tolerance: tol,
        ..OracleConfig::default()
    };
    let values = sweep.values();
    let w = (window.lo, window.hi);
    let branch_of = |e: f64| pole_energies(&geometry, channel, e).len() as i64;
    let skipped = std::sync::Mutex::new(Vec::new());
    let rows = sweep_rows(&values, |u| {
        let well = signed_well(u, radius)?;
        let mut rows = Vec::new();
        let mut emit = |method: &str, branch: i64, e: f64| {
            rows.push(vec![
                Cell::Num(u),
                Cell::Text(method.into()),
                Cell::Int(branch),
                Cell::Num(e),
            ]);
        };
        let edp = solve_spectrum_edp_with(&geometry, &well, channel, w, max_roots, &options)?;
        for r in &edp.roots {
            emit("edp", r.branch as i64, r.energy);
        }
        match zero_energy_strength(&well, l) {
            Ok(a) => {
                let strength = match wave {
                    Wave::S => InteractionStrength::FixedS {
                        inverse_length: 1.0 / a,
                    },
                    Wave::P => InteractionStrength::FixedP {
                        inverse_volume: 1.0 / a,
                    },
                };
                let fixed =
                    solve_spectrum_with(&geometry, &strength, channel, w, max_roots, &options)?;
                for r in &fixed.roots {
                    emit("fixed", r.branch as i64, r.energy);
                }
            }
            // exactly at a bound-state threshold the fixed strength is undefined
            Err(Error::Threshold { .. }) => skipped.lock().unwrap().push(u),
            Err(e) => return Err(e.into()),
        }
        for e in oracle_levels(&well, l, w, &config)? {
            emit("oracle", branch_of(e), e);
        }
        Ok(rows)
    })?;
    let mut skipped = skipped.into_inner().unwrap();
    skipped.sort_by(f64::total_cmp);
    let mut table = OutputTable::new(&["depth", "method", "branch", "energy"]);
    table.meta("wave", wave);
    table.meta("radius", radius);
    table.meta("sweep", sweep);
    table.meta("window", window);
    table.meta("max_roots", max_roots);
    table.meta("tol", format!("{tol:e}"));
    if !skipped.is_empty() {
        let s: Vec<String> = skipped.iter().map(f64::to_string).collect();
        table.meta("fixed_skipped_at_threshold", s.join(";"));
    }
    table.rows = rows;
    Ok(table)
}

fn oracle(
    wave: Wave,
    radius: f64,
    sweep: &SweepSpec,
    window: Window,
    tol: f64,
) -> Result<OutputTable, CliError> {
    require_variable(sweep, &[SweepVariable::WellDepth])?;
    let l = channel_for(wave, 0)?.l();
    let config = OracleConfig {
        tolerance: tol,
        ..OracleConfig::default()
    };
    let rows = sweep_rows(&sweep.values(), |u| {
        let well = signed_well(u, radius)?;
        Ok(oracle_levels(&well, l, (window.lo, window.hi), &config)?
            .into_iter()
            .enumerate()
            .map(|(i, e)| vec![Cell::Num(u), Cell::Int(i as i64), Cell::Num(e)])
            .collect())
    })?;
    let mut table = OutputTable::new(&["depth", "level", "energy"]);
    table.meta("wave", wave);
    table.meta("radius", radius);
    table.meta("sweep", sweep);
    table.meta("window", window);
    table.meta("tol", format!("{tol:e}"));
    table.rows = rows;
    Ok(table)
}

fn q2d_main(energies: &[f64], sweep: &SweepSpec) -> Result<OutputTable, CliError> {
    require_variable(sweep, &[SweepVariable::PStrength])?;
    if energies.is_empty() {
        return usage("q2d needs --energy (or --inset with an energy sweep)");
    }
    let volumes = sweep.values();
    let channels: Vec<Q2DChannel> = energies
        .par_iter()
        .map(|&e| Q2DChannel::new(e))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let mut table = OutputTable::new(&["energy", "apvol", "cot_delta1", "forward_cross_section"]);
    for ch in &channels {
        for &a3 in &volumes {
            table.push(vec![
                Cell::Num(ch.energy()),
                Cell::Num(a3),
                Cell::Num(ch.cot_delta1(a3)?),
                Cell::Num(ch.forward_cross_section(a3)?),
            ]);
        }
    }
    let e: Vec<String> = energies.iter().map(f64::to_string).collect();
    table.metadata = vec![
        ("energy".into(), e.join(";")),
        ("sweep".into(), sweep.to_string()),
    ];
    for ch in &channels {
        let vc = ch
            .critical_volume()
            .map(table::format_float)
            .unwrap_or_else(|_| "divergent".into());
        table.meta(&format!("critical_volume@{}", ch.energy()), vc);
    }
    Ok(table)
}

fn q2d_inset(energies: &[f64], sweep: &SweepSpec) -> Result<OutputTable, CliError> {
    require_variable(sweep, &[SweepVariable::Energy])?;
    if !energies.is_empty() {
        return usage("--inset takes its energies from the sweep, not --energy");
    }
    let rows = sweep_rows(&sweep.values(), |e| {
        // the threshold itself is allowed here
        let x = if e == 0.5 { 0.0 } else { q2d::energy_to_x(e)? };
        let w = q2d::eval_w(x)?;
        let (vc, divergent) = match q2d::critical_volume(e) {
            Ok(v) => (v, 0),
            Err(Error::CriticalVolumeDivergence { .. }) => (f64::NAN, 1),
            Err(other) => return Err(other.into()),
        };
        Ok(vec![vec![
            Cell::Num(e),
            Cell::Num(vc),
            Cell::Num(w.re),
            Cell::Int(divergent),
        ]])
    })?;
    let sign_change = rows.windows(2).any(|p| match (&p[0][2], &p[1][2]) {
        (Cell::Num(a), Cell::Num(b)) => a.signum() != b.signum(),
        _ => false,
    });
    let mut table = OutputTable::new(&["energy", "critical_volume", "w_real", "divergent"]);
    table.meta("sweep", sweep);
    table.meta(
        "disappearance_energy",
        table::format_float(q2d::resonance_disappearance_energy()?),
    );
    table.meta("divergence_crossed", sign_change);
    table.rows = rows;
    Ok(table)
}

fn resonance() -> Result<OutputTable, CliError> {
    let e = q2d::resonance_disappearance_energy()?;
    let x = q2d::energy_to_x(e)?;
    let w = q2d::eval_w(x)?.re;
    let mut table = OutputTable::new(&["energy", "x", "w_real"]);
    table.meta(
        "critical_volume_at_threshold",
        table::format_float(q2d::critical_volume(0.5)?),
    );
    table.push(vec![Cell::Num(e), Cell::Num(x), Cell::Num(w)]);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pwlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn busch_zeros_from_cli() {
        let cli = parse(&[
            "spectrum",
            "--wave",
            "s",
            "--sweep",
            "as-inv:0:0:1",
            "--window",
            "0:5",
        ]);
        let t = run(&cli).unwrap();
        let e: Vec<f64> = t
            .rows
            .iter()
            .map(|r| match r[2] {
                Cell::Num(v) => v,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(e.len(), 3);
        for (g, w) in e.iter().zip([0.5, 2.5, 4.5]) {
            assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn canonical_args_reparse() {
        let cli = parse(&[
            "spectrum",
            "--n",
            "10",
            "--m",
            "-1",
            "--sweep",
            "apvol-inv:-30:30:5",
        ]);
        let args = canonical_args(&cli.command, 1e-10);
        let again = parse(&args.split(' ').collect::<Vec<_>>());
        assert_eq!(canonical_args(&again.command, again.common.tol), args);
    }

    #[test]
    fn usage_errors() {
        let bad = [
            vec!["spectrum", "--wave", "s", "--sweep", "apvol:1:2:3"],
            vec!["spectrum", "--wave", "s", "--n", "2", "--sweep", "as:1:2:3"],
            vec!["spectrum", "--m", "2", "--sweep", "apvol:1:2:3"],
            vec!["spectrum-edp", "--sweep", "depth:10:20:2"],
            vec!["q2d", "--energy", "2.0", "--sweep", "apvol:1:2:3"],
            vec!["q2d", "--sweep", "apvol:1:2:3"],
        ];
        for args in bad {
            let err = run(&parse(&args)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}: {err}");
        }
    }
}
