use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use tightknot::energy::{
    constrained_energy, length_from_ropelength, m_of_h, topological_bound, Signature,
};
use tightknot::fieldverify::{
    standard_suite, verify_energy, verify_helicity, FluxTubeConfig, VerificationRow,
};
use tightknot::geometry::{self, PolygonalKnot};
use tightknot::initializers::{self, TorusKnotSpec};
use tightknot::spectrum::{self, fmt_sig, KnotRecord, Source};
use tightknot::{tighten, Error, Result, TightenConfig};

use crate::{Cli, Command, SignatureArgs, TightenArgs, WORKERS_ENV};

/// Parses `argv`, runs the command and maps the outcome to an exit status.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_domain() {
                3
            } else {
                2
            }
        }
    }
}

fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Circle {
            beads,
            radius,
            output,
        } => emit_knot(
            &initializers::make_circle(beads, radius)?,
            output.as_deref(),
        ),
        Command::Torus {
            p,
            q,
            beads,
            major_radius,
            minor_radius,
            output,
        } => {
            let spec = TorusKnotSpec {
                p,
                q,
                beads,
                major_radius,
                minor_radius,
            };
            emit_knot(&initializers::make_torus_knot(&spec)?, output.as_deref())
        }
        Command::Tighten {
            input,
            output,
            history,
            tighten: args,
        } => {
            let config = tighten_config(&args)?;
            let knot = initializers::load_knot(&input)?;
            check_output_dir(output.as_deref())?;
            check_output_dir(history.as_deref())?;
            let (tight, report) = tighten(&knot, &config)?;
            if let Some(path) = output {
                initializers::save_knot(&tight, path)?;
            }
            match history {
                Some(path) => {
                    fs::write(path, report.history_csv())?;
                    println!("{}", report.summary_line());
                }
                None => print!("{}{}\n", report.history_csv(), report.summary_line()),
            }
            Ok(())
        }
        Command::Measure { input, skip } => {
            let knot = initializers::load_knot(&input)?;
            print!("{}", measure_csv(&knot, skip)?);
            Ok(())
        }
        Command::Energy {
            ropelength,
            length,
            h,
            h_grid,
            signature,
        } => {
            let grid = match h_grid {
                Some(text) => parse_h_grid(&text)?,
                None => vec![h],
            };
            print!("{}", energy_csv(ropelength, length, &grid, &signature)?);
            Ok(())
        }
        Command::Bound { cmin, volume, flux } => {
            let bound = topological_bound(cmin, volume, flux)?;
            println!("cmin,bound\n{cmin},{}", fmt_sig(bound));
            Ok(())
        }
        Command::Spectrum {
            records,
            dir,
            h_grid,
            out_dir,
            tighten: args,
        } => {
            let grid = parse_h_grid(&h_grid)?;
            if records.is_none() && dir.is_none() {
                return Err(param("spectrum needs --records, --dir or both"));
            }
            let config = tighten_config(&args)?;
            let mut all = Vec::new();
            if let Some(path) = &records {
                all.extend(spectrum::load_records(path, Source::Imported)?);
            }
            let mut tightened = Vec::new();
            if let Some(dir) = &dir {
                tightened = tighten_directory(dir, &config)?;
                all.extend(tightened.iter().map(|(record, _)| record.clone()));
            }
            let tables = spectrum_tables(&all, &grid)?;
            match out_dir {
                Some(out) => {
                    fs::create_dir_all(&out)?;
                    for (name, body) in &tables {
                        fs::write(out.join(format!("{name}.csv")), body)?;
                    }
                    if !tightened.is_empty() {
                        let knots = out.join("knots");
                        fs::create_dir_all(&knots)?;
                        for (record, knot) in &tightened {
                            initializers::save_knot(
                                knot,
                                knots.join(format!("{}.txt", record.name)),
                            )?;
                        }
                    }
                }
                None => {
                    let mut text = String::new();
                    for (name, body) in &tables {
                        let _ = write!(text, "# table={name}\n{body}\n");
                    }
                    print!("{text}");
                }
            }
            Ok(())
        }
        Command::VerifyField {
            suite,
            grid,
            gamma,
            h,
            curvature,
            tube_radius,
            axis_length,
            flux,
        } => {
            let rows = if suite {
                standard_suite(grid)?
            } else {
                let cfg = FluxTubeConfig {
                    tube_radius,
                    axis_curvature: curvature,
                    axis_length: axis_length
                        .unwrap_or(1.0 / (std::f64::consts::PI * tube_radius * tube_radius)),
                    gamma,
                    framing: h,
                    flux,
                    grid: (grid, grid, grid),
                };
                cfg.validate()?;
                vec![verify_energy(&cfg)?, verify_helicity(&cfg)?]
            };
            print!("{}", verification_csv(&rows));
            Ok(())
        }
    }
}

fn emit_knot(knot: &PolygonalKnot, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => initializers::save_knot(knot, path),
        None => {
            print!("{}", initializers::format_knot(knot));
            Ok(())
        }
    }
}

fn check_output_dir(path: Option<&Path>) -> Result<()> {
    if let Some(parent) = path.and_then(Path::parent) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return Err(param(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
    }
    Ok(())
}

/// Defaults, then the config file, then `--set` pairs, then dedicated flags.
pub fn tighten_config(args: &TightenArgs) -> Result<TightenConfig> {
    let mut config = TightenConfig::default();
    if let Some(path) = &args.config {
        config.apply_text(&fs::read_to_string(path)?)?;
    }
    for pair in &args.overrides {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| param(format!("--set expects KEY=VALUE, got '{pair}'")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(v) = args.rope_radius {
        config.rope_radius = v;
    }
    if let Some(v) = args.shrink_factor {
        config.shrink_factor = v;
    }
    if let Some(v) = args.overlap_tolerance {
        config.overlap_tolerance = v;
    }
    if let Some(v) = args.max_iterations {
        config.max_iterations = v;
    }
    if let Some(v) = args.stall_window {
        config.stall_window = v;
    }
    if let Some(v) = args.skip {
        config.skip = Some(v);
    }
    if args.no_reposition {
        config.reposition_enabled = false;
    }
    config.validate()?;
    Ok(config)
}

/// Parses `start:stop:step` (stop inclusive) or a single value.
pub fn parse_h_grid(text: &str) -> Result<Vec<f64>> {
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| param(format!("invalid number '{s}' in h grid '{text}'")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![number(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || stop < start {
                return Err(param(format!(
                    "h grid '{text}' needs step > 0 and stop >= start"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(param(format!("h grid '{text}' has too many points")));
            }
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(param(format!(
            "h grid must be 'start:stop:step', got '{text}'"
        ))),
    }
}

pub fn measure_csv(knot: &PolygonalKnot, skip: Option<usize>) -> Result<String> {
    let (geo, skip) = match skip {
        Some(s) => (geometry::ropelength(knot, s)?, s),
        None => {
            let geo = geometry::ropelength_auto(knot)?;
            (geo, geometry::default_skip(knot, geo.thickness))
        }
    };
    let writhe = geometry::writhe(knot)?;
    Ok(format!(
        "name,beads,skip,length,thickness,ropelength,writhe\n{},{},{},{},{},{},{}\n",
        knot.name().unwrap_or(""),
        knot.len(),
        skip,
        fmt_sig(geo.length),
        fmt_sig(geo.thickness),
        fmt_sig(geo.ropelength),
        fmt_sig(writhe)
    ))
}

pub fn energy_csv(
    ropelength: Option<f64>,
    length: Option<f64>,
    grid: &[f64],
    sig: &SignatureArgs,
) -> Result<String> {
    let base = Signature {
        volume: sig.volume,
        flux: sig.flux,
        framing: 0.0,
        gamma: sig.gamma,
    };
    base.validate()?;
    let (rl, axis) = match (ropelength, length) {
        (Some(rl), None) => (rl, length_from_ropelength(rl, base.volume)?),
        (None, Some(l)) => {
            if !(l > 0.0) {
                return Err(Error::Domain(format!("length must be positive, got {l}")));
            }
            let radius = (base.volume / (std::f64::consts::PI * l)).sqrt();
            (l / radius, l)
        }
        _ => return Err(param("give exactly one of --ropelength and --length")),
    };
    let mut out = String::from("ropelength,length,h,m_star,m_of_h\n");
    for &h in grid {
        let m = constrained_energy(&base.with_framing(h), axis)?;
        let m_scaled = m_of_h(m, base.volume, base.flux)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig(rl),
            fmt_sig(axis),
            fmt_sig(h),
            fmt_sig(m),
            fmt_sig(m_scaled)
        );
    }
    Ok(out)
}

fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(param(format!(
                "{WORKERS_ENV} must be a positive integer, got '{text}'"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn knot_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(param(format!("no .txt knot files in {}", dir.display())));
    }
    Ok(files)
}

/// Tightens every knot file in `dir`, one worker per knot, returning
/// records sorted by name.
pub fn tighten_directory(
    dir: &Path,
    config: &TightenConfig,
) -> Result<Vec<(KnotRecord, PolygonalKnot)>> {
    let files = knot_files(dir)?;
    let mut knots = Vec::with_capacity(files.len());
    for path in &files {
        let knot = initializers::load_knot(path)?;
        let name = match knot.name() {
            Some(n) => n.to_string(),
            None => path
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned(),
        };
        let cmin = knot
            .cmin()
            .ok_or_else(|| param(format!("{} lacks a '# cmin=' header", path.display())))?;
        knots.push((name, cmin, knot));
    }
    let job = || -> Vec<Result<(KnotRecord, PolygonalKnot)>> {
        knots
            .par_iter()
            .map(|(name, cmin, knot)| {
                let (tight, report) = tighten(knot, config)?;
                let record = KnotRecord::new(name.clone(), *cmin, report.final_ropelength)
                    .with_writhe(report.final_writhe)
                    .with_source(Source::Tightened);
                Ok((record, tight))
            })
            .collect()
    };
    let results = match worker_count()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| param(format!("cannot start {n} workers: {e}")))?
            .install(job),
        None => job(),
    };
    let mut out = results.into_iter().collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.0.name.cmp(&b.0.name));
    Ok(out)
}

/// Every spectrum table keyed by its file stem, in output order.
pub fn spectrum_tables(
    records: &[KnotRecord],
    grid: &[f64],
) -> Result<Vec<(&'static str, String)>> {
    let table = spectrum::spectrum_rows(records, grid)?;
    let crossings = spectrum::family_crossings(&table.families)?;
    Ok(vec![
        ("records", spectrum::records_csv(records)?),
        ("spectrum", spectrum::spectrum_csv(&table)?),
        ("families", spectrum::families_csv(&table.families)?),
        (
            "inversions",
            spectrum::inversions_csv(&spectrum::ordering_report(records)?)?,
        ),
        (
            "outliers",
            spectrum::outliers_csv(&spectrum::outlier_table(records)?)?,
        ),
        ("crossings", spectrum::crossings_csv(&crossings)?),
    ])
}

pub fn verification_csv(rows: &[VerificationRow]) -> String {
    let mut out = String::from(
        "quantity,gamma,h,curvature,tube_radius,grid,value,closed_form,rel_error,convergence_ratio\n",
    );
    for row in rows {
        let c = &row.config;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}x{}x{},{},{},{},{}",
            row.quantity,
            fmt_sig(c.gamma),
            fmt_sig(c.framing),
            fmt_sig(c.axis_curvature),
            fmt_sig(c.tube_radius),
            c.grid.0,
            c.grid.1,
            c.grid.2,
            fmt_sig(row.value),
            fmt_sig(row.closed_form),
            fmt_sig(row.rel_error),
            row.convergence_ratio.map(fmt_sig).unwrap_or_default()
        );
    }
    out
}
