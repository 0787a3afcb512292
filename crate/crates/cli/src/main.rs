mod config;

use clap::{Parser, Subcommand};
use config::{parse_variant, RunConfig};
use serde_json::json;
use shearscope_core::analysis::{
    fit_decay, shear_grid, wavefront_map, Classification, DecayFit,
};
use shearscope_core::transform::transform_scan;
use shearscope_core::validation::{
    admissibility_grid_custom, check_admissibility, check_energy_identity_full,
    check_energy_identity_reduced,
};
use shearscope_core::GeneratorProfile;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "shearscope",
    about = "Continuous shearlet transform scans, wavefront maps, and frame checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Worker thread count (0 = library default). Output is identical for
    /// any value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory; overrides the config's output_dir.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the admissibility identity on a cone grid.
    GenCheck,
    /// Transform scan across scales at one (t, s, variant), with decay fit.
    DecayScan,
    /// Full location x shear x variant classification table and masks.
    Wavefront,
    /// Reduced (and optionally full) energy identity checks.
    FrameCheck,
}

enum Failure {
    /// Exit 2: bad usage or configuration.
    Usage(String),
    /// Exit 1: a quantitative check failed.
    Quantitative(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Quantitative(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Usage("--config <path> is required".into()))?;
    let config = RunConfig::load(config_path).map_err(Failure::Usage)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Usage(format!("cannot create output dir {out_dir}: {e}")))?;
    let out = PathBuf::from(out_dir);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if cli.threads > 0 {
        builder = builder.num_threads(cli.threads);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli, &config, &out))
}

fn dispatch(cli: &Cli, config: &RunConfig, out: &Path) -> Result<(), Failure> {
    let params = config.profile.to_params().map_err(Failure::Usage)?;
    let profile = GeneratorProfile::build(params)
        .map_err(|e| Failure::Usage(format!("profile: {e}")))?;
    match cli.command {
        Command::GenCheck => cmd_gen_check(config, &profile, out),
        Command::DecayScan => cmd_decay_scan(config, &profile, out),
        Command::Wavefront => cmd_wavefront(config, &profile, out),
        Command::FrameCheck => cmd_frame_check(config, &profile, out),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display())))
}

/// Shortest round-trip decimal; non-finite values print their IEEE names.
fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fit_json(fit: &DecayFit) -> serde_json::Value {
    json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "classification": fit.classification.tag(),
        "power_exponent": match fit.classification {
            Classification::Power(r) => Some(r),
            _ => None,
        },
        "scale_range": [fit.scale_range.0, fit.scale_range.1],
        "count": fit.count,
        "diagnostic": fit.diagnostic,
    })
}

fn cmd_gen_check(
    config: &RunConfig,
    profile: &GeneratorProfile,
    out: &Path,
) -> Result<(), Failure> {
    let gc = &config.gen_check;
    let grid = admissibility_grid_custom(gc.xi1_range, gc.xi1_count, gc.slope_count);
    let report = check_admissibility(profile, &grid)
        .map_err(|e| Failure::Usage(format!("admissibility grid: {e}")))?;
    let pass = report.max_residual < gc.tolerance;
    let doc = json!({
        "grid": grid,
        "residuals": report.residuals,
        "max_residual": report.max_residual,
        "tolerance": gc.tolerance,
        "pass": pass,
    });
    write_file(
        &out.join("gen_check.json"),
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
    )?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Quantitative(format!(
            "max admissibility residual {} exceeds tolerance {}",
            report.max_residual, gc.tolerance
        )))
    }
}

fn cmd_decay_scan(
    config: &RunConfig,
    profile: &GeneratorProfile,
    out: &Path,
) -> Result<(), Failure> {
    let dist = config
        .distribution
        .as_ref()
        .ok_or_else(|| Failure::Usage("decay-scan needs a distribution".into()))?
        .build()
        .map_err(Failure::Usage)?;
    let scan = config
        .scan
        .as_ref()
        .ok_or_else(|| Failure::Usage("decay-scan needs a scan section".into()))?;
    let variant = parse_variant(&scan.variant).map_err(Failure::Usage)?;
    let spec = config.quadrature.to_spec();
    let values = transform_scan(
        &dist,
        scan.t,
        scan.s,
        variant,
        &config.scales,
        profile,
        &spec,
    )
    .map_err(|e| Failure::Usage(format!("scan: {e}")))?;

    let mut csv = String::from("a,s,t1,t2,variant,re,im,abs\n");
    for (a, v) in config.scales.iter().zip(&values) {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt(*a),
            fmt(scan.s),
            fmt(scan.t[0]),
            fmt(scan.t[1]),
            scan.variant,
            fmt(v.re),
            fmt(v.im),
            fmt(v.norm())
        ));
    }
    write_file(&out.join("decay_scan.csv"), &csv)?;

    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let fit = fit_decay(&config.scales, &mags, &config.thresholds.to_thresholds());
    write_file(
        &out.join("decay_fit.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&fit_json(&fit)).unwrap()
        ),
    )?;
    Ok(())
}

fn cmd_wavefront(
    config: &RunConfig,
    profile: &GeneratorProfile,
    out: &Path,
) -> Result<(), Failure> {
    let dist = config
        .distribution
        .as_ref()
        .ok_or_else(|| Failure::Usage("wavefront needs a distribution".into()))?
        .build()
        .map_err(Failure::Usage)?;
    let grid = config
        .grid
        .as_ref()
        .ok_or_else(|| Failure::Usage("wavefront needs a grid section".into()))?;
    let map = wavefront_map(
        &dist,
        &grid.to_tgrid(),
        &shear_grid(grid.s_count),
        &config.scales,
        profile,
        &config.quadrature.to_spec(),
        &config.thresholds.to_thresholds(),
    )
    .map_err(|e| Failure::Usage(format!("wavefront map: {e}")))?;

    let mut csv = String::from("t1,t2,s,variant,slope,residual,class\n");
    for cell in &map.cells {
        let variant = match cell.variant {
            shearscope_core::Variant::Horizontal => "horizontal",
            shearscope_core::Variant::Vertical => "vertical",
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(cell.t[0]),
            fmt(cell.t[1]),
            fmt(cell.s),
            variant,
            fmt(cell.fit.slope),
            fmt(cell.fit.residual),
            cell.fit.classification.tag()
        ));
    }
    write_file(&out.join("wavefront.csv"), &csv)?;

    let singular: Vec<serde_json::Value> = map
        .t_points
        .iter()
        .zip(&map.singular_support_mask)
        .map(|(t, m)| json!([t[0], t[1], m]))
        .collect();
    let flagged: Vec<serde_json::Value> = map
        .cells
        .iter()
        .zip(&map.wavefront_mask)
        .filter(|(_, m)| **m)
        .map(|(c, _)| {
            json!({
                "t": [c.t[0], c.t[1]],
                "s": c.s,
                "variant": match c.variant {
                    shearscope_core::Variant::Horizontal => "horizontal",
                    shearscope_core::Variant::Vertical => "vertical",
                },
                "slope": c.fit.slope,
            })
        })
        .collect();
    let doc = json!({
        "singular_support": singular,
        "wavefront_flagged": flagged,
        "flagged_count": flagged.len(),
        "cell_count": map.cells.len(),
    });
    write_file(
        &out.join("wavefront_masks.json"),
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
    )?;
    Ok(())
}

fn cmd_frame_check(
    config: &RunConfig,
    profile: &GeneratorProfile,
    out: &Path,
) -> Result<(), Failure> {
    let dist = config
        .distribution
        .as_ref()
        .ok_or_else(|| Failure::Usage("frame-check needs a band-limited bump distribution".into()))?
        .build()
        .map_err(Failure::Usage)?;
    let fc = &config.frame_check;
    let reduced = check_energy_identity_reduced(&dist, profile)
        .map_err(|e| Failure::Usage(format!("reduced energy identity: {e}")))?;
    let reduced_pass = reduced.relative_error < fc.reduced_tolerance;

    let mut full_value = serde_json::Value::Null;
    let mut full_pass = true;
    if fc.run_full {
        let report = check_energy_identity_full(&dist, profile, &fc.full_grids.to_grids())
            .map_err(|e| Failure::Quantitative(format!("full energy identity: {e}")))?;
        full_pass = report.relative_error < fc.full_tolerance;
        full_value = json!({
            "window_term": report.window_term,
            "horizontal_term": report.horizontal_term,
            "vertical_term": report.vertical_term,
            "total": report.total,
            "reduced_total": report.reduced_total,
            "relative_error": report.relative_error,
            "captured_fraction": report.captured_fraction,
            "tolerance": fc.full_tolerance,
            "pass": full_pass,
        });
    }
    let doc = json!({
        "reduced": {
            "norm2": reduced.norm2,
            "window_term": reduced.window_term,
            "horizontal_term": reduced.horizontal_term,
            "vertical_term": reduced.vertical_term,
            "relative_error": reduced.relative_error,
            "tolerance": fc.reduced_tolerance,
            "pass": reduced_pass,
        },
        "full": full_value,
        "pass": reduced_pass && full_pass,
    });
    write_file(
        &out.join("frame_check.json"),
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
    )?;
    if reduced_pass && full_pass {
        Ok(())
    } else {
        Err(Failure::Quantitative(format!(
            "energy identity relative errors: reduced {}, tolerance {}",
            reduced.relative_error, fc.reduced_tolerance
        )))
    }
}
