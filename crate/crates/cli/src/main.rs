//! Command-line driver: simulate dip scans, rotation protocols, classical
//! calibration, and the satellite delay report, with deterministic seeding
//! and CSV/JSON-lines output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use rotating_hom::config::ExperimentConfig;
use rotating_hom::estimation::SlopeFit;
use rotating_hom::physics::RateConvention;
use rotating_hom::pipeline::{classical_calibration, quantum_rotation_pipeline, simulate_dip_scan};
use rotating_hom::scenarios::{
    gravitomagnetic_delay, lab_preset, revolutions_needed, LITERATURE_GRAVITOMAGNETIC_DELAY_S,
};
use rotating_hom::sim::CountsRecord;
use rotating_hom::{Error, SPEED_OF_LIGHT};

const EXIT_CONFIG_ERROR: u8 = 2;
const EXIT_NUMERICAL_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rotating-hom",
    about = "Hong-Ou-Mandel interference on a rotating platform: simulation and analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment configuration; defaults to the built-in lab preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Rotation-rate convention override.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,

    /// Tabular output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Emit angles in radians instead of degrees.
    #[arg(long, global = true)]
    radians: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the delay stage over the HOM dip and fit it.
    SimulateDip,
    /// Run the full quantum rotation pipeline and fit the shift slope.
    SimulateRotation,
    /// Run the classical Sagnac fringe calibration and fit the phase slope.
    CalibrateClassical,
    /// Report the satellite gravitomagnetic delay.
    Satellite,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    #[value(name = "paper-f")]
    PaperF,
    #[value(name = "physical-hz")]
    PhysicalHz,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Csv,
}

enum CliError {
    Config(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("csv error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG_ERROR)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL_ERROR)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (cfg, cfg_text) = load_config(cli)?;
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    fs::create_dir_all(&cli.out)?;
    let command_name = match cli.command {
        Command::SimulateDip => "simulate-dip",
        Command::SimulateRotation => "simulate-rotation",
        Command::CalibrateClassical => "calibrate-classical",
        Command::Satellite => "satellite",
    };
    write_metadata(&cli.out, command_name, &cfg, &cfg_text)?;

    match cli.command {
        Command::SimulateDip => cmd_simulate_dip(&cli.out, &cfg),
        Command::SimulateRotation => cmd_simulate_rotation(&cli.out, &cfg),
        Command::CalibrateClassical => cmd_calibrate_classical(&cli.out, &cfg, cli.radians),
        Command::Satellite => cmd_satellite(&cli.out, &cfg),
    }
}

fn load_config(cli: &Cli) -> Result<(ExperimentConfig, String), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            toml::from_str(&text).map_err(|e| {
                // toml errors carry line/column diagnostics in their Display.
                CliError::Config(format!("{}: {e}", path.display()))
            })?
        }
        None => lab_preset(),
    };
    if let Some(seed) = cli.seed {
        cfg.options.master_seed = seed;
    }
    if let Some(conv) = cli.convention {
        cfg.options.convention = match conv {
            ConventionArg::PaperF => RateConvention::PaperF,
            ConventionArg::PhysicalHz => RateConvention::PhysicalHz,
        };
    }
    let canonical =
        toml::to_string(&cfg).map_err(|e| CliError::Config(format!("config serialize: {e}")))?;
    Ok((cfg, canonical))
}

fn write_metadata(
    out: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    cfg_text: &str,
) -> Result<(), CliError> {
    let hash = hex_digest(cfg_text);
    let convention = match cfg.options.convention {
        RateConvention::PaperF => "paper-f",
        RateConvention::PhysicalHz => "physical-hz",
    };
    let line = serde_json::json!({
        "command": command,
        "seed": cfg.options.master_seed,
        "convention": convention,
        "config_sha256": hash,
    });
    fs::write(out.join("run.jsonl"), format!("{line}\n"))?;
    Ok(())
}

fn hex_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_scan_csv(path: &Path, records: &[CountsRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "stage_position_m",
        "rotation_rate",
        "direction",
        "dwell_s",
        "coincidences",
        "singles_a",
        "singles_b",
        "stream_id",
    ])?;
    for r in records {
        w.write_record([
            r.stage_position.to_string(),
            r.rotation_rate.to_string(),
            r.direction.label().to_string(),
            r.dwell.to_string(),
            r.coincidences.to_string(),
            r.singles[0].to_string(),
            r.singles[1].to_string(),
            r.stream_id.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_slope_csv(path: &Path, slope: &SlopeFit, unit: &str) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let value_unit = unit.split("_per_").next().unwrap_or(unit);
    w.write_record([
        format!("slope_{unit}"),
        format!("intercept_{value_unit}"),
        format!("slope_std_{unit}"),
        "chi_square".to_string(),
    ])?;
    w.write_record([
        slope.slope.to_string(),
        slope.intercept.to_string(),
        slope.slope_std.to_string(),
        slope.chi_square.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

fn cmd_simulate_dip(out: &Path, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let (records, fit) = simulate_dip_scan(cfg)?;
    write_scan_csv(&out.join("scan.csv"), &records)?;

    let mut w = csv::Writer::from_path(out.join("dip_fit.csv"))?;
    w.write_record([
        "baseline_rate_hz",
        "visibility",
        "center_m",
        "width_m",
        "baseline_std_hz",
        "visibility_std",
        "center_std_m",
        "width_std_m",
    ])?;
    w.write_record([
        fit.baseline_rate.to_string(),
        fit.visibility.to_string(),
        fit.center.to_string(),
        fit.width.to_string(),
        fit.covariance[(0, 0)].max(0.0).sqrt().to_string(),
        fit.covariance[(1, 1)].max(0.0).sqrt().to_string(),
        fit.covariance[(2, 2)].max(0.0).sqrt().to_string(),
        fit.covariance[(3, 3)].max(0.0).sqrt().to_string(),
    ])?;
    w.flush()?;

    println!(
        "dip fit: baseline {:.3} counts/s, visibility {:.4}, center {:.4e} m, width {:.4e} m",
        fit.baseline_rate, fit.visibility, fit.center, fit.width
    );
    Ok(())
}

fn cmd_simulate_rotation(out: &Path, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let result = quantum_rotation_pipeline(cfg, false)?;

    let mut w = csv::Writer::from_path(out.join("shifts.csv"))?;
    w.write_record(["rotation_rate", "shift_m", "shift_std_m"])?;
    for s in &result.shifts {
        w.write_record([s.rate.to_string(), s.shift.to_string(), s.std.to_string()])?;
    }
    w.flush()?;

    write_slope_csv(&out.join("slope.csv"), &result.slope, "m_per_rate")?;
    println!(
        "quantum slope: {:.4e} +- {:.4e} m per unit rate (operating point {:.4e} m)",
        result.slope.slope, result.slope.slope_std, result.operating_point
    );
    Ok(())
}

fn cmd_calibrate_classical(
    out: &Path,
    cfg: &ExperimentConfig,
    radians: bool,
) -> Result<(), CliError> {
    let (points, slope) = classical_calibration(cfg, false)?;
    let (scale, unit) = if radians {
        (1.0, "rad")
    } else {
        (180.0 / std::f64::consts::PI, "deg")
    };

    let mut w = csv::Writer::from_path(out.join("phases.csv"))?;
    w.write_record([
        "rotation_rate".to_string(),
        format!("phase_{unit}"),
        format!("phase_std_{unit}"),
    ])?;
    for p in &points {
        w.write_record([
            p.rate.to_string(),
            (p.phase * scale).to_string(),
            (p.std * scale).to_string(),
        ])?;
    }
    w.flush()?;

    let scaled = SlopeFit {
        slope: slope.slope * scale,
        intercept: slope.intercept * scale,
        slope_std: slope.slope_std * scale,
        chi_square: slope.chi_square,
    };
    write_slope_csv(&out.join("slope.csv"), &scaled, &format!("{unit}_per_rate"))?;
    println!(
        "classical slope: {:.4} +- {:.4} {unit} per unit rate",
        scaled.slope, scaled.slope_std
    );
    Ok(())
}

fn cmd_satellite(out: &Path, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let scenario = cfg.satellite_scenario();
    scenario.validate()?;
    let per_rev = scenario.delay_per_revolution();
    let total = gravitomagnetic_delay(&scenario);
    let target = 100e-9 / SPEED_OF_LIGHT;
    let revs_for_target = revolutions_needed(&scenario, target)?;

    let mut w = csv::Writer::from_path(out.join("satellite.csv"))?;
    w.write_record([
        "delay_per_revolution_s",
        "revolutions",
        "total_delay_s",
        "literature_order_of_magnitude_s",
        "revolutions_for_100nm_resolution",
    ])?;
    w.write_record([
        per_rev.to_string(),
        scenario.revolutions.to_string(),
        total.to_string(),
        LITERATURE_GRAVITOMAGNETIC_DELAY_S.to_string(),
        revs_for_target.to_string(),
    ])?;
    w.flush()?;

    let report = format!(
        "gravitomagnetic delay report\n\
         ----------------------------\n\
         GJ/(Rc^4) per revolution : {per_rev:.4e} s\n\
         revolutions              : {}\n\
         total delay              : {total:.4e} s\n\
         literature estimate      : ~{LITERATURE_GRAVITOMAGNETIC_DELAY_S:.1e} s per revolution\n\
         note: the bare GJ/(Rc^4) value is roughly {:.0}x smaller than the\n\
         literature order-of-magnitude figure; the omitted prefactor is not\n\
         specified, so both numbers are reported.\n\
         revolutions to reach 100 nm ({target:.3e} s) of path resolution: {revs_for_target}\n",
        scenario.revolutions,
        LITERATURE_GRAVITOMAGNETIC_DELAY_S / per_rev,
    );
    fs::write(out.join("satellite_report.txt"), &report)?;
    print!("{report}");
    Ok(())
}
