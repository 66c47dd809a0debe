//! Subcommands. Each returns the text printed on success.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use impa_core::ac::{
    band_report, calibrate_negative_resistance, sweep_frequencies, sweep_grid, AcError, Calibration,
    CalibrationBand,
};
use impa_core::export::{write_flux_csv, write_response_csv};
use impa_core::snail::{tunable_range, FluxBias, SnailParams};
use impa_core::synthesis::{band_edges_from_w, synthesize_detailed, DesignSpec};
use impa_core::Netlist;

use crate::error::{compute, input, CliError, Result};
use crate::report::{self, DesignReport};
use crate::spec_file::{prototype_table, SpecFile};

pub const DEFAULT_POINTS: usize = 2001;
/// Default sweep span in units of the fractional bandwidth on each side.
pub const DEFAULT_SPAN: f64 = 1.5;
pub const DEFAULT_FLUX_GRID: Grid = Grid {
    start: 0.0,
    stop: 0.5,
    points: 501,
};

#[derive(Debug, Parser)]
#[command(
    name = "impa-synth",
    version,
    about = "Design and simulate impedance-matched SNAIL parametric amplifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize the matching network and write netlist.json and report.txt.
    Design(DesignArgs),
    /// Sweep the reflection gain and report the band above a threshold.
    Gain(GainArgs),
    /// Bare JPA resonance against flux bias.
    FluxSweep(FluxArgs),
    /// Set the negative resistance for a target in-band minimum gain.
    Calibrate(CalibrateArgs),
}

/// `start,stop,points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

pub fn parse_grid(text: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [start, stop, points] = parts[..] else {
        return Err(format!("expected start,stop,points, got {text:?}"));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok(Grid {
        start: num(start)?,
        stop: num(stop)?,
        points: points.parse().map_err(|e| format!("{points:?}: {e}"))?,
    })
}

fn parse_band(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [lo, hi] = parts[..] else {
        return Err(format!("expected f_low,f_high, got {text:?}"));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok((num(lo)?, num(hi)?))
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Frequency grid in Hz for the report sweep.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[arg(long, default_value_t = 15.0)]
    pub threshold_db: f64,
    /// Minimum in-band gain the calibration aims for.
    #[arg(long, default_value_t = 15.0)]
    pub target_db: f64,
}

#[derive(Debug, Args)]
pub struct GainArgs {
    /// Design spec; synthesized and calibrated when no netlist is given.
    #[arg(long, required_unless_present = "netlist")]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[arg(long, default_value_t = 15.0)]
    pub threshold_db: f64,
    #[arg(long, default_value_t = 15.0)]
    pub target_db: f64,
}

#[derive(Debug, Args)]
pub struct FluxArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Flux grid in flux quanta.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Comma-separated asymmetries; writes one curve per value.
    #[arg(long, value_delimiter = ',')]
    pub alpha_sweep: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, required_unless_present = "spec")]
    pub netlist: Option<PathBuf>,
    /// Supplies the band (and the netlist when none is given).
    #[arg(long, required_unless_present = "band")]
    pub spec: Option<PathBuf>,
    /// Calibration band `f_low,f_high` in Hz.
    #[arg(long, value_parser = parse_band)]
    pub band: Option<(f64, f64)>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 15.0)]
    pub target_db: f64,
}

pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Design(a) => design(&a),
        Command::Gain(a) => gain(&a),
        Command::FluxSweep(a) => flux_sweep(&a),
        Command::Calibrate(a) => calibrate(&a),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(input(&format!("output directory {}", dir.display())))?;
    Ok(())
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(input(&format!("cannot write {}", path.display())))?;
    Ok(path)
}

fn load_netlist(path: &Path) -> Result<Netlist> {
    let origin = path.display().to_string();
    let text = fs::read_to_string(path).map_err(input(&origin))?;
    Netlist::from_json(&text).map_err(input(&origin))
}

fn load_design(path: &Path) -> Result<DesignSpec> {
    let file = SpecFile::load(path)?;
    file.to_design(&prototype_table()?)
}

/// Default frequency grid, `f0 (1 +- 1.5 w)`.
pub fn default_grid(f0: f64, w: f64) -> Result<Vec<f64>> {
    let span = DEFAULT_SPAN * w.max(f64::EPSILON);
    sweep_grid(f0 * (1.0 - span), f0 * (1.0 + span), DEFAULT_POINTS).map_err(input("grid"))
}

fn freq_grid(grid: Grid) -> Result<Vec<f64>> {
    sweep_grid(grid.start, grid.stop, grid.points).map_err(input("--grid"))
}

/// Calibrates on the default grid points inside `[f1, f2]`.
fn calibrate_for(netlist: &Netlist, f0: f64, w: f64, target_db: f64) -> Result<Calibration> {
    let (f1, f2) = band_edges_from_w(f0, w);
    let band =
        CalibrationBand::on_grid(&default_grid(f0, w)?, f1, f2).map_err(compute("calibration band"))?;
    calibrate_negative_resistance(netlist, f0, target_db, &band).map_err(compute("calibration"))
}

fn design(a: &DesignArgs) -> Result<String> {
    let spec = load_design(&a.spec)?;
    prepare_out(&a.out)?;
    let syn = synthesize_detailed(&spec).map_err(compute("synthesis"))?;
    let cal = calibrate_for(&syn.netlist, spec.f0, spec.w, a.target_db)?;
    let freqs = match a.grid {
        Some(g) => freq_grid(g)?,
        None => default_grid(spec.f0, spec.w)?,
    };
    let resp = sweep_frequencies(&cal.netlist, freqs).map_err(compute("sweep"))?;
    let band = match band_report(&resp, a.threshold_db) {
        Ok(b) => Some(b),
        Err(AcError::EmptyBand { .. }) => None,
        Err(e) => return Err(CliError::Compute(format!("band report: {e}"))),
    };
    let tuning = tunable_range(&spec.snail, spec.c1_shunt, &flux_grid(DEFAULT_FLUX_GRID))
        .map_err(compute("tunable range"))?;
    let text = DesignReport {
        spec: &spec,
        synthesis: &syn,
        calibration: &cal,
        threshold_db: a.threshold_db,
        band: band.as_ref(),
        tuning: &tuning,
    }
    .render();
    let netlist_path = write(&a.out, "netlist.json", syn.netlist.to_json().as_bytes())?;
    let report_path = write(&a.out, "report.txt", text.as_bytes())?;
    Ok(format!(
        "C12 = {}, calibrated R = {}\nwrote {}\nwrote {}\n",
        report::pf(syn.c12),
        report::ohm(cal.r),
        netlist_path.display(),
        report_path.display()
    ))
}

fn gain(a: &GainArgs) -> Result<String> {
    let spec = a.spec.as_deref().map(load_design).transpose()?;
    let given = a.netlist.as_deref().map(load_netlist).transpose()?;
    let freqs = match (a.grid, &spec) {
        (Some(g), _) => freq_grid(g)?,
        (None, Some(s)) => default_grid(s.f0, s.w)?,
        (None, None) => {
            return Err(CliError::Input(
                "--grid is required when no spec supplies the band".into(),
            ))
        }
    };
    prepare_out(&a.out)?;
    let netlist = match (given, &spec) {
        (Some(n), _) => n,
        (None, Some(s)) => {
            let syn = synthesize_detailed(s).map_err(compute("synthesis"))?;
            calibrate_for(&syn.netlist, s.f0, s.w, a.target_db)?.netlist
        }
        (None, None) => unreachable!("clap requires --spec or --netlist"),
    };
    let resp = sweep_frequencies(&netlist, freqs).map_err(compute("sweep"))?;
    let mut csv = Vec::new();
    write_response_csv(&resp, &mut csv).map_err(compute("csv"))?;
    let csv_path = write(&a.out, "gain.csv", &csv)?;
    let mut text = format!("wrote {} ({} points", csv_path.display(), resp.len());
    if !resp.poles().is_empty() {
        write!(text, ", {} pole markers", resp.poles().len()).unwrap();
    }
    text.push_str(")\n");
    match band_report(&resp, a.threshold_db) {
        Ok(b) => {
            let band = report::render_band(&b, a.threshold_db);
            let path = write(&a.out, "band_report.txt", band.as_bytes())?;
            writeln!(text, "{band}wrote {}", path.display()).unwrap();
            Ok(text)
        }
        Err(AcError::EmptyBand { threshold_db }) => {
            let msg = format!("no frequency reaches {}", report::db(threshold_db));
            write(&a.out, "band_report.txt", format!("{msg}\n").as_bytes())?;
            Err(CliError::EmptyBand(format!(
                "{msg} (sweep written to {})",
                csv_path.display()
            )))
        }
        Err(e) => Err(CliError::Compute(format!("band report: {e}"))),
    }
}

fn flux_grid(g: Grid) -> Vec<FluxBias> {
    FluxBias::grid(g.start, g.stop, g.points)
}

fn check_flux_grid(g: Grid) -> Result<Vec<FluxBias>> {
    if g.points == 0 || !(g.start.is_finite() && g.stop.is_finite()) || g.stop < g.start {
        return Err(CliError::Input(format!(
            "--grid: need start <= stop and at least one point, got {},{},{}",
            g.start, g.stop, g.points
        )));
    }
    if g.points > 1 && g.stop == g.start {
        return Err(CliError::Input("--grid: repeated flux points".into()));
    }
    Ok(flux_grid(g))
}

fn flux_sweep(a: &FluxArgs) -> Result<String> {
    let file = SpecFile::load(&a.spec)?;
    let grid = check_flux_grid(a.grid.unwrap_or(DEFAULT_FLUX_GRID))?;
    if let Some(alphas) = &a.alpha_sweep {
        for &alpha in alphas {
            file.snail.with_alpha(alpha).map_err(input("--alpha-sweep"))?;
        }
    }
    prepare_out(&a.out)?;

    let curve =
        |params: &SnailParams| tunable_range(params, file.c1_shunt, &grid).map_err(compute("flux sweep"));
    let range = curve(&file.snail)?;
    let mut csv = Vec::new();
    write_flux_csv(&range.curve, &mut csv).map_err(compute("csv"))?;
    let path = write(&a.out, "flux_sweep.csv", &csv)?;
    let mut summary = format!(
        "alpha = {}: f_min = {}, f_max = {}\n",
        file.snail.alpha(),
        report::ghz(range.f_min),
        report::ghz(range.f_max)
    );
    let mut text = format!("wrote {}\n", path.display());

    if let Some(alphas) = &a.alpha_sweep {
        let mut widths = Vec::new();
        for &alpha in alphas {
            let params = file.snail.with_alpha(alpha).map_err(input("--alpha-sweep"))?;
            let r = curve(&params)?;
            let mut csv = Vec::new();
            write_flux_csv(&r.curve, &mut csv).map_err(compute("csv"))?;
            let path = write(&a.out, &format!("flux_sweep_alpha_{alpha}.csv"), &csv)?;
            writeln!(text, "wrote {}", path.display()).unwrap();
            writeln!(
                summary,
                "alpha = {alpha}: f_min = {}, f_max = {}, width = {}",
                report::ghz(r.f_min),
                report::ghz(r.f_max),
                report::ghz(r.width())
            )
            .unwrap();
            widths.push(r.width());
        }
        let increasing = widths.windows(2).all(|w| w[1] > w[0]);
        writeln!(
            summary,
            "range width strictly increasing with alpha: {}",
            if increasing { "yes" } else { "no" }
        )
        .unwrap();
    }
    write(&a.out, "flux_summary.txt", summary.as_bytes())?;
    Ok(format!("{text}{summary}"))
}

fn calibrate(a: &CalibrateArgs) -> Result<String> {
    let spec = a.spec.as_deref().map(load_design).transpose()?;
    let given = a.netlist.as_deref().map(load_netlist).transpose()?;
    let (f0, w) = match (a.band, &spec) {
        (Some((lo, hi)), _) => DesignSpec::center_and_width(lo, hi).map_err(input("--band"))?,
        (None, Some(s)) => (s.f0, s.w),
        (None, None) => unreachable!("clap requires --spec or --band"),
    };
    prepare_out(&a.out)?;
    let netlist = match (given, &spec) {
        (Some(n), _) => n,
        (None, Some(s)) => synthesize_detailed(s).map_err(compute("synthesis"))?.netlist,
        (None, None) => unreachable!("clap requires --netlist or --spec"),
    };
    let cal = calibrate_for(&netlist, f0, w, a.target_db)?;
    let (f1, f2) = band_edges_from_w(f0, w);
    let path = write(
        &a.out,
        "calibrated_netlist.json",
        cal.netlist.to_json().as_bytes(),
    )?;
    let summary = format!(
        "band {} to {}\ncalibrated R = {}\nachieved min gain = {}\noscillation threshold R = {}\n",
        report::ghz(f1),
        report::ghz(f2),
        report::ohm(cal.r),
        report::db(cal.achieved_min_gain_db),
        report::ohm(cal.threshold_r)
    );
    write(&a.out, "calibration.txt", summary.as_bytes())?;
    Ok(format!("{summary}wrote {}\n", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_grid("6e9, 7e9,11").unwrap(),
            Grid {
                start: 6e9,
                stop: 7e9,
                points: 11
            }
        );
        assert!(parse_grid("1,2").is_err());
        assert!(parse_grid("1,2,x").is_err());
        assert!(parse_grid("1,2,-3").is_err());
        assert_eq!(parse_band("1e9,2e9").unwrap(), (1e9, 2e9));
    }

    #[test]
    fn default_grid_spans_one_and_a_half_widths() {
        let g = default_grid(6.5e9, 0.1).unwrap();
        assert_eq!(g.len(), 2001);
        assert!((g[0] - 6.5e9 * 0.85).abs() < 1.0);
        assert!((g[2000] - 6.5e9 * 1.15).abs() < 1.0);
    }

    #[test]
    fn flux_grid_checks() {
        assert!(check_flux_grid(Grid {
            start: 0.1,
            stop: 0.1,
            points: 1
        })
        .is_ok());
        assert!(check_flux_grid(Grid {
            start: 0.5,
            stop: 0.0,
            points: 5
        })
        .is_err());
        assert!(check_flux_grid(Grid {
            start: 0.0,
            stop: 0.5,
            points: 0
        })
        .is_err());
    }
}
