//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use zeno_core::decay::{decay_pair, gamma_cavity, gamma_env, parameter_sweep, survival_probability, Baseline, SweepAxis, SweepRow};
use zeno_core::frame::{solve_resonant_drive, DriveSetting};
use zeno_core::oracle::{stroboscopic_run, Picture};
use zeno_core::scenarios::{self, circuit_preset, default_g_grid, figure2_sweep_for, log_grid, Scenario};
use zeno_core::spectral::{discretize_bath, BathDiscretization, SincConvention, SpectralDensity};

use crate::config::{Format, RunConfig, SpectrumConfig};
use crate::error::CliError;
use crate::export::{col, plot_script, render, Cell, Meta, Table, TableKind};

#[derive(Debug, Parser)]
#[command(name = "zeno", version, about = "Measurement-induced decay rates for a qubit coupled to a squeezed cavity")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML run configuration (defaults to the circuit-lowfreq preset)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Relative tolerance of the bath overlap integral
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also write a gnuplot script next to the `--out` data file
    #[arg(long, global = true)]
    plot_script: bool,

    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true)]
    omega_c: Option<f64>,
    /// Resonant squeezing parameter (drive frequency solved for resonance)
    #[arg(long, global = true, conflicts_with = "drive_g")]
    r_s: Option<f64>,
    /// Pump amplitude; without --omega-d the drive frequency is solved for resonance
    #[arg(long, global = true)]
    drive_g: Option<f64>,
    #[arg(long, global = true, requires = "drive_g")]
    omega_d: Option<f64>,
    /// Measurement interval in units of 1/omega_q
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Number of measurements
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, value_enum, conflicts_with = "table")]
    spectrum: Option<SpectrumPreset>,
    /// Two-column `omega value` spectral table
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    sinc: Option<SincArg>,
    #[arg(long, global = true, value_enum)]
    baseline: Option<BaselineArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumPreset {
    Hydrogen,
    LowFrequency,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SincArg {
    Unnormalized,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaselineArg {
    Resonant,
    SameCavity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    G,
    RS,
    Tau,
    DriveG,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PictureArg {
    Interaction,
    Schrodinger,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Squeezed-frame parameters for the configured drive
    Transform,
    /// Decay-rate breakdown with the drive on and off
    Rate,
    /// Survival probability after each measurement
    Survival {
        /// Use the drive-off rate
        #[arg(long)]
        drive_off: bool,
    },
    /// Sweep one parameter
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated grid values
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to"])]
        values: Vec<f64>,
        #[arg(long, requires = "to")]
        from: Option<f64>,
        #[arg(long, requires = "from")]
        to: Option<f64>,
        #[arg(long, default_value_t = 30)]
        points: usize,
        /// Logarithmic spacing between --from and --to
        #[arg(long)]
        log: bool,
    },
    /// Brute-force amplitude integration against a discretized bath
    Oracle {
        #[arg(long)]
        lobes: Option<usize>,
        #[arg(long)]
        modes_per_lobe: Option<usize>,
        #[arg(long)]
        dt_max: Option<f64>,
        #[arg(long, value_enum)]
        picture: Option<PictureArg>,
    },
    /// Run a named preset (hydrogen-2p1s, circuit-lowfreq)
    Scenario {
        name: String,
        /// Coupling sweep for both panels instead of the single-point ratios
        #[arg(long)]
        figure2: bool,
        /// Print the preset as a TOML config and exit
        #[arg(long, conflicts_with = "figure2")]
        print_config: bool,
    },
}

/// Runs the CLI and returns the process exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let msg = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim();
            let msg = msg.strip_prefix("error:").unwrap_or(msg).trim().replace('"', "'");
            let _ = writeln!(err, "error: kind=usage code=2 message=\"{msg}\"");
            return 2;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let (mut config, base) = match (&cli.command, &cli.global.config) {
        (Command::Scenario { name, .. }, _) => {
            let preset = scenarios::by_name(name).ok_or_else(|| {
                CliError::Config(format!("unknown scenario '{name}', expected one of {:?}", scenarios::preset_names()))
            })?;
            (RunConfig::from_scenario(&preset), None)
        }
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            (RunConfig::parse(&text)?, path.parent().map(Path::to_path_buf))
        }
        (_, None) => (RunConfig::from_scenario(&circuit_preset()), None),
    };
    apply_overrides(&mut config, &cli.global)?;
    let scenario = config.scenario(base.as_deref())?;

    let table = match &cli.command {
        Command::Transform => transform(&scenario)?,
        Command::Rate => rate(&scenario, &config)?,
        Command::Survival { drive_off } => survival(&scenario, &config, *drive_off)?,
        Command::Sweep { axis, values, from, to, points, log } => {
            let grid = match (from, to) {
                (Some(a), Some(b)) => linear_or_log(*a, *b, *points, *log)?,
                _ if !values.is_empty() => values.clone(),
                _ => return Err(CliError::Config("sweep needs --values or --from/--to".into())),
            };
            let rows = parameter_sweep(axis_of(*axis), &grid, &scenario.sweep_context(config.quadrature))?;
            sweep_table(&rows)
        }
        Command::Oracle { lobes, modes_per_lobe, dt_max, picture } => {
            if let Some(l) = lobes {
                config.oracle.lobes_each_side = *l;
            }
            if let Some(m) = modes_per_lobe {
                config.oracle.modes_per_lobe = *m;
            }
            if dt_max.is_some() {
                config.oracle.dt_max = *dt_max;
            }
            if let Some(p) = picture {
                config.oracle.picture = match p {
                    PictureArg::Interaction => Picture::Interaction,
                    PictureArg::Schrodinger => Picture::Schrodinger,
                };
            }
            let scenario = config.scenario(base.as_deref())?;
            oracle(&scenario, &config)?
        }
        Command::Scenario { figure2, print_config, .. } => {
            if *print_config {
                let mut printed = config.clone();
                printed.output.path = None;
                let text = printed.to_toml()?;
                return emit_text(&text, cli.global.out.as_deref(), out);
            }
            if *figure2 {
                let fig = figure2_sweep_for(&scenario, &default_g_grid(), &config.quadrature)?;
                sweep_table(&fig.rows)
            } else {
                ratios_table(&scenario, &config)?
            }
        }
    };

    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command).into(),
        config: serde_json::to_value(&config).map_err(|e| CliError::Config(e.to_string()))?,
        tolerances: json!({
            "rel_tol": config.quadrature.rel_tol,
            "max_lobes": config.quadrature.max_lobes,
        }),
    };
    let format = config.output.format;
    let text = render(&table, &meta, format);
    match &config.output.path {
        Some(path) => {
            std::fs::write(path, &text)?;
            writeln!(out, "wrote {}", path.display())?;
            if cli.global.plot_script {
                if format != Format::Csv {
                    return Err(CliError::Config("--plot-script needs --format csv".into()));
                }
                let data_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let script_path = path.with_extension("gp");
                std::fs::write(&script_path, plot_script(&table, &data_name)?)?;
                writeln!(out, "wrote {}", script_path.display())?;
            }
            for line in summary(&table, &scenario) {
                writeln!(out, "{line}")?;
            }
        }
        None => {
            if cli.global.plot_script {
                return Err(CliError::Config("--plot-script needs --out".into()));
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_text(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            writeln!(out, "wrote {}", p.display())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Transform => "transform",
        Command::Rate => "rate",
        Command::Survival { .. } => "survival",
        Command::Sweep { .. } => "sweep",
        Command::Oracle { .. } => "oracle",
        Command::Scenario { .. } => "scenario",
    }
}

fn apply_overrides(config: &mut RunConfig, args: &GlobalArgs) -> Result<(), CliError> {
    if let Some(g) = args.g {
        config.system.g = g;
    }
    if let Some(w) = args.omega_c {
        config.system.omega_c = w;
    }
    if let Some(r_s) = args.r_s {
        config.drive = DriveSetting::Resonant { r_s };
    }
    if let Some(drive_g) = args.drive_g {
        let omega_d = match args.omega_d {
            Some(w) => w,
            None => solve_resonant_drive(config.system.omega_q, config.system.omega_c, drive_g)?,
        };
        config.drive = DriveSetting::Explicit { omega_d, drive_g };
    }
    if let Some(tau) = args.tau {
        config.measurement.tau = tau;
    }
    if let Some(n) = args.n {
        config.measurement.n = n;
    }
    if let Some(preset) = args.spectrum {
        config.spectrum = match preset {
            SpectrumPreset::Hydrogen => SpectrumConfig::from(&scenarios::hydrogen_preset().spectrum),
            SpectrumPreset::LowFrequency => SpectrumConfig::from(&circuit_preset().spectrum),
            SpectrumPreset::None => SpectrumConfig::DiscreteComb { modes: Vec::new() },
        };
    }
    if let Some(path) = &args.table {
        let path = if path.is_relative() { std::env::current_dir()?.join(path) } else { path.clone() };
        config.spectrum = SpectrumConfig::TabulatedFile { path };
    }
    if let Some(s) = args.sinc {
        config.model.sinc = match s {
            SincArg::Unnormalized => SincConvention::Unnormalized,
            SincArg::Normalized => SincConvention::Normalized,
        };
    }
    if let Some(b) = args.baseline {
        config.model.baseline = match b {
            BaselineArg::Resonant => Baseline::Resonant,
            BaselineArg::SameCavity => Baseline::SameCavity,
        };
    }
    if let Some(tol) = args.tol {
        config.quadrature.rel_tol = tol;
    }
    if let Some(f) = args.format {
        config.output.format = f;
    }
    if let Some(p) = &args.out {
        config.output.path = Some(p.clone());
    }
    Ok(())
}

fn axis_of(a: AxisArg) -> SweepAxis {
    match a {
        AxisArg::G => SweepAxis::G,
        AxisArg::RS => SweepAxis::RS,
        AxisArg::Tau => SweepAxis::Tau,
        AxisArg::DriveG => SweepAxis::DriveG,
    }
}

fn linear_or_log(from: f64, to: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Config("--points must be >= 1".into()));
    }
    if log {
        if !(from > 0.0 && to > 0.0) {
            return Err(CliError::Config("log grid needs positive bounds".into()));
        }
        return Ok(log_grid(from, to, points));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    Ok((0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect())
}

const W: Option<&str> = Some("omega_q");

fn transform(s: &Scenario) -> Result<Table, CliError> {
    let sol = s.solution()?;
    let (lab, frame) = (sol.lab, sol.frame);
    let mut t = Table::new(
        TableKind::Single,
        vec![
            col("omega_q", W),
            col("omega_c", W),
            col("omega_d", W),
            col("g", W),
            col("drive_g", W),
            col("delta_q", W),
            col("delta_c", W),
            col("r_s", None),
            col("delta_s", W),
            col("g_s", W),
            col("enhancement", None),
            col("mode_detuning", W),
        ],
    );
    let enhancement = if lab.g > 0.0 { frame.g_s / lab.g } else { frame.r_s.cosh() };
    t.push(
        [
            lab.omega_q,
            lab.omega_c,
            lab.omega_d,
            lab.g,
            lab.drive_g,
            frame.delta_q,
            frame.delta_c,
            frame.r_s,
            frame.delta_s,
            frame.g_s,
            enhancement,
            frame.mode_detuning(),
        ]
        .map(Cell::Num)
        .to_vec(),
    );
    Ok(t)
}

fn rate(s: &Scenario, config: &RunConfig) -> Result<Table, CliError> {
    let frame = s.solution()?.frame;
    let pair = decay_pair(&frame, s.system.g, &s.spectrum, &s.filter(), &config.quadrature, s.baseline)?;
    let mut t = Table::new(
        TableKind::Single,
        vec![
            col("drive_on", None),
            col("gamma_c", W),
            col("gamma_e", W),
            col("gamma_total", W),
            col("quad_abs_error", W),
            col("lobes_used", None),
        ],
    );
    for b in [pair.on, pair.off] {
        t.push(vec![
            Cell::Bool(b.drive_on),
            Cell::Num(b.gamma_c),
            Cell::Num(b.gamma_e),
            Cell::Num(b.gamma_total),
            Cell::Num(b.quad_abs_error),
            Cell::Int(b.lobes_used as u64),
        ]);
    }
    Ok(t)
}

fn survival(s: &Scenario, config: &RunConfig, drive_off: bool) -> Result<Table, CliError> {
    let frame = s.solution()?.frame;
    let pair = decay_pair(&frame, s.system.g, &s.spectrum, &s.filter(), &config.quadrature, s.baseline)?;
    let rate = if drive_off { pair.off.gamma_total } else { pair.on.gamma_total };
    let curve = survival_probability(rate, &s.protocol)?;
    let mut t = Table::new(TableKind::Survival, vec![col("m", None), col("t", Some("1/omega_q")), col("probability", None)]);
    for (m, (time, p)) in curve.times.iter().zip(&curve.probabilities).enumerate() {
        t.push(vec![Cell::Int(m as u64), Cell::Num(*time), Cell::Num(*p)]);
    }
    Ok(t)
}

fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(
        TableKind::Sweep,
        vec![
            col("value", None),
            col("gamma_c", W),
            col("gamma_e", W),
            col("gamma_c_wo", W),
            col("gamma_c_over_gamma_e", None),
            col("gamma_e_over_gamma_c_wo", None),
            col("quad_abs_error", W),
            col("error", None),
        ],
    );
    for row in rows {
        let mut cells = vec![Cell::Num(row.value)];
        match &row.outcome {
            Ok(v) => {
                cells.extend(
                    [v.gamma_c, v.gamma_e, v.gamma_c_wo, v.gamma_c_over_gamma_e(), v.gamma_e_over_gamma_c_wo(), v.quad_abs_error]
                        .map(Cell::Num),
                );
                cells.push(Cell::Text(String::new()));
            }
            Err(msg) => {
                cells.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 6));
                cells.push(Cell::Text(msg.clone()));
            }
        }
        t.push(cells);
    }
    t
}

fn oracle(s: &Scenario, config: &RunConfig) -> Result<Table, CliError> {
    let frame = s.solution()?.frame;
    let filter = s.filter();
    let bath = match &s.spectrum {
        SpectralDensity::DiscreteComb { modes } => BathDiscretization {
            modes: modes.clone(),
            window: s.spectrum.support(),
            delta_omega: 0.0,
            center: filter.omega_q,
        },
        spec => discretize_bath(spec, &filter, &config.oracle.comb())?,
    };
    let env = gamma_env(&s.spectrum, &filter, &config.quadrature)?;
    let analytic = gamma_cavity(&frame, filter.tau) + env.value;
    let run = stroboscopic_run(&frame, &bath, &s.protocol, &config.oracle.settings())?;
    let mut t = Table::new(
        TableKind::Single,
        vec![
            col("gamma_effective", W),
            col("gamma_analytic", W),
            col("rel_deviation", None),
            col("first_interval_survival", None),
            col("final_survival", None),
            col("max_norm_drift", None),
            col("modes", None),
            col("dt", Some("1/omega_q")),
        ],
    );
    t.push(vec![
        Cell::Num(run.gamma_effective),
        Cell::Num(analytic),
        Cell::Num(run.gamma_effective / analytic - 1.0),
        Cell::Num(run.interval_survival[0]),
        Cell::Num(*run.survival.probabilities.last().expect("curve starts at t = 0")),
        Cell::Num(run.max_norm_drift),
        Cell::Int(run.bath_modes as u64),
        Cell::Num(run.dt),
    ]);
    Ok(t)
}

fn ratios_table(s: &Scenario, config: &RunConfig) -> Result<Table, CliError> {
    let r = scenarios::scenario_ratios(s, &config.quadrature)?;
    let mut t = Table::new(
        TableKind::Single,
        vec![
            col("scenario", None),
            col("gamma_c", W),
            col("gamma_e", W),
            col("gamma_c_wo", W),
            col("gamma_c_over_gamma_e", None),
            col("gamma_e_over_gamma_c_wo", None),
            col("quad_abs_error", W),
            col("lobes_used", None),
        ],
    );
    t.push(vec![
        Cell::Text(s.name.clone()),
        Cell::Num(r.rates.on.gamma_c),
        Cell::Num(r.rates.on.gamma_e),
        Cell::Num(r.rates.off.gamma_c),
        Cell::Num(r.gamma_c_over_gamma_e),
        Cell::Num(r.gamma_e_over_gamma_c_wo),
        Cell::Num(r.rates.on.quad_abs_error),
        Cell::Int(r.rates.on.lobes_used as u64),
    ]);
    Ok(t)
}

/// Human-readable lines printed when the data went to a file.
fn summary(table: &Table, s: &Scenario) -> Vec<String> {
    let mut lines = Vec::new();
    let num = |row: &[Cell], name: &str| match table.column_index(name).map(|i| &row[i]) {
        Some(Cell::Num(x)) => Some(*x),
        _ => None,
    };
    if table.kind == TableKind::Single {
        for (i, row) in table.rows.iter().enumerate() {
            if let (Some(a), Some(b)) = (num(row, "gamma_c_over_gamma_e"), num(row, "gamma_e_over_gamma_c_wo")) {
                lines.push(format!("{}: Gamma_c/Gamma_e = {a:.4e}, Gamma_e/Gamma_c^wo = {b:.4e}", s.name));
            }
            if let (0, Some(gamma_e), Some(si)) = (i, num(row, "gamma_e"), s.si_omega_q) {
                lines.push(format!("Gamma_e = {:.4e} s^-1 at omega_q = {si:.3e} rad/s", gamma_e * si));
            }
            if let (Some(eff), Some(dev)) = (num(row, "gamma_effective"), num(row, "rel_deviation")) {
                lines.push(format!("oracle Gamma = {eff:.6e}, relative deviation from analytic {dev:+.3e}"));
            }
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(std::iter::once("zeno").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grids() {
        assert_eq!(linear_or_log(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(linear_or_log(2.0, 5.0, 1, false).unwrap(), vec![2.0]);
        assert!(linear_or_log(0.0, 1.0, 3, true).is_err());
        assert!(linear_or_log(0.0, 1.0, 0, false).is_err());
    }

    #[test]
    fn usage_errors_are_single_line() {
        let (code, _, err) = run(&["frobnicate"]);
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1);
        assert!(err.starts_with("error: kind=usage"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("scenario"));
    }

    #[test]
    fn drive_amplitude_solves_resonance() {
        let (code, out, _) = run(&["transform", "--drive-g", "0.9"]);
        assert_eq!(code, 0);
        let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert!((row[2] - 0.88).abs() < 1e-12);
        assert!(row[11].abs() < 1e-12);
    }
}
