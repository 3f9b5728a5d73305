//! Command-line front end: polarization reports, exact densities, identity
//! sweeps, CSV grids, and Monte-Carlo concordance checks.
//!
//! Exit codes: 0 success, 1 identity mismatch, 2 bad input (including a
//! non-generic polarizing vector), 3 wall point where a value was demanded.

mod grid;
mod problem;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;

use dh_core::linalg::{RatVec, Rational};
use dh_core::measure::{assemble, DHMeasure};
use dh_core::sampling::estimate_density;
use dh_core::toric::{full_torus_density, subtorus_density, vertex_data};
use dh_core::weights::polarize;
use dh_core::Error as CoreError;

use grid::{write_density_csv, Grid};
use problem::{parse_rational, Problem, ProblemSpec};

#[derive(Parser)]
#[command(
    name = "dhgls",
    about = "Exact Duistermaat-Heckman measures from torus fixed-point data",
    version
)]
struct Cli {
    /// Problem file (JSON); read from stdin when omitted
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    /// Override the polarizing vector of the problem file,
    /// e.g. --eta "1 2"
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<String>,

    /// Override the subtorus inclusion of the problem file: one row per
    /// torus dimension, rows separated by ';', e.g. --subtorus "1; 2"
    #[arg(long, global = true, allow_hyphen_values = true)]
    subtorus: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print polarized weights, flip counts, and signs per fixed point
    Polarize,
    /// Exact density of the decomposition at one point
    Density {
        /// Rational coordinates, e.g. --point "1/4 1/4"
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Exit with code 3 instead of 0 when the point is a wall
        #[arg(long)]
        strict: bool,
    },
    /// Sweep a grid and compare the decomposition with the polytope density
    CheckIdentity {
        #[arg(long, default_value = "1/17")]
        grid_step: String,
        /// Rational lo/hi pairs, one pair per axis, e.g. --bounds "-1 2 -1 2"
        #[arg(long, allow_hyphen_values = true)]
        bounds: String,
        /// Debug aid: flip the sign of one summand before the sweep
        #[arg(long, hide = true)]
        flip_sign: Option<usize>,
    },
    /// Write the density over a grid as CSV
    Grid {
        #[arg(long, default_value = "1/17")]
        grid_step: String,
        #[arg(long, allow_hyphen_values = true)]
        bounds: String,
        #[arg(long)]
        output: PathBuf,
        /// Partition the summands by this vector and write one CSV per group,
        /// e.g. --group-eta "1 1"
        #[arg(long, allow_hyphen_values = true)]
        group_eta: Option<String>,
    },
    /// Monte-Carlo estimate of the density against the exact value
    Mc {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rational halfwidth of the averaging window
        #[arg(long, default_value = "1/16")]
        window: String,
    },
    /// Print the fixed-point data read off the polytope
    ToricData {
        /// Also write the data as a problem file
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn load_problem(cli: &Cli) -> Result<(ProblemSpec, Problem)> {
    let text = match &cli.spec {
        Some(path) => {
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?
        }
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("cannot read problem from stdin")?;
            buf
        }
    };
    let mut spec = ProblemSpec::from_json(&text)?;
    if let Some(eta) = &cli.eta {
        spec.eta = parse_int_list(eta)?;
    }
    if let Some(subtorus) = &cli.subtorus {
        let rows = subtorus
            .split(';')
            .map(parse_int_list)
            .collect::<Result<Vec<_>>>()?;
        spec.subtorus = Some(rows);
    }
    let problem = spec.validate()?;
    Ok((spec, problem))
}

fn split_tokens(raw: &str) -> Vec<&str> {
    raw.split_whitespace().collect()
}

fn parse_point(raw: &str, dim: usize) -> Result<RatVec> {
    let coords = split_tokens(raw);
    if coords.len() != dim {
        bail!("expected {dim} coordinates, got {}", coords.len());
    }
    Ok(RatVec::new(
        coords
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?,
    ))
}

fn parse_bounds(raw: &str, dim: usize) -> Result<Vec<(Rational, Rational)>> {
    let tokens = split_tokens(raw);
    if tokens.len() != 2 * dim {
        bail!(
            "expected {} bound values (lo hi per axis), got {}",
            2 * dim,
            tokens.len()
        );
    }
    tokens
        .chunks(2)
        .map(|pair| Ok((parse_rational(pair[0])?, parse_rational(pair[1])?)))
        .collect()
}

fn parse_int_list(raw: &str) -> Result<Vec<i64>> {
    split_tokens(raw)
        .iter()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|e| anyhow!("bad integer {t:?}: {e}"))
        })
        .collect()
}

fn measure_of(problem: &Problem) -> Result<DHMeasure> {
    let data = problem.data()?;
    assemble(&data, &problem.eta).map_err(|e| anyhow!("{e}"))
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Polarize => cmd_polarize(cli),
        Command::Density { point, strict } => cmd_density(cli, point, *strict),
        Command::CheckIdentity {
            grid_step,
            bounds,
            flip_sign,
        } => cmd_check_identity(cli, grid_step, bounds, *flip_sign),
        Command::Grid {
            grid_step,
            bounds,
            output,
            group_eta,
        } => cmd_grid(cli, grid_step, bounds, output, group_eta.as_deref()),
        Command::Mc {
            point,
            samples,
            seed,
            window,
        } => cmd_mc(cli, point, *samples, *seed, window),
        Command::ToricData { output } => cmd_toric_data(cli, output.as_deref()),
    }
}

fn cmd_polarize(cli: &Cli) -> Result<i32> {
    let (_, problem) = load_problem(cli)?;
    let data = problem.data()?;
    for (i, datum) in data.iter().enumerate() {
        let p = polarize(&datum.weights, &problem.eta).map_err(|e| anyhow!("{e}"))?;
        println!("fixed point {i}: moment {}", datum.moment_value);
        let cols: Vec<String> = (0..p.columns.cols())
            .map(|j| {
                let col = p.columns.col(j);
                let parts: Vec<String> = col.iter().map(|n| n.to_string()).collect();
                format!("({})", parts.join(", "))
            })
            .collect();
        println!("  polarized: {}", cols.join(" "));
        println!("  flips: {}", p.flip_count);
        println!("  sign: {}", if p.sign > 0 { "+1" } else { "-1" });
    }
    Ok(0)
}

fn cmd_density(cli: &Cli, point: &str, strict: bool) -> Result<i32> {
    let (_, problem) = load_problem(cli)?;
    let m = measure_of(&problem)?;
    let b = parse_point(point, problem.target_dim())?;
    let v = m.eval_density(&b);
    if v.regular {
        println!("{}", v.value);
        Ok(0)
    } else {
        println!("WALL");
        Ok(if strict { 3 } else { 0 })
    }
}

fn cmd_check_identity(
    cli: &Cli,
    grid_step: &str,
    bounds: &str,
    flip_sign: Option<usize>,
) -> Result<i32> {
    let (_, problem) = load_problem(cli)?;
    let polytope = problem
        .polytope()
        .ok_or_else(|| anyhow!("check-identity needs a polytope in the problem file"))?
        .clone();
    if problem.subtorus.is_none() {
        let dd = vertex_data(&polytope).map_err(|e| anyhow!("{e}"))?;
        if !dd.unimodular {
            eprintln!(
                "warning: polytope has a non-unimodular vertex; the full-torus \
                 indicator identity only holds for unimodular polytopes"
            );
        }
    }
    let mut m = measure_of(&problem)?;
    if let Some(k) = flip_sign {
        if k >= m.summands().len() {
            bail!(
                "flip-sign index {k} out of range ({} summands)",
                m.summands().len()
            );
        }
        m = m.with_flipped_sign(k);
    }
    let dim = problem.target_dim();
    let grid = Grid::new(parse_rational(grid_step)?, parse_bounds(bounds, dim)?)?;

    enum Outcome {
        Skipped,
        Matched,
        Mismatched,
        Failed(String),
    }
    let points = grid.points();
    let outcomes = grid::par_map_points(&points, |b| {
        let lhs = m.eval_density(b);
        let rhs = match &problem.subtorus {
            Some(iota) => match subtorus_density(&polytope, iota, b) {
                Ok(v) => v,
                Err(e) => return Outcome::Failed(e.to_string()),
            },
            None => full_torus_density(&polytope, b),
        };
        if !lhs.regular || !rhs.regular {
            Outcome::Skipped
        } else if lhs.value == rhs.value {
            Outcome::Matched
        } else {
            Outcome::Mismatched
        }
    });
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut mismatches = 0usize;
    for outcome in outcomes {
        match outcome {
            Outcome::Skipped => skipped += 1,
            Outcome::Matched => checked += 1,
            Outcome::Mismatched => {
                checked += 1;
                mismatches += 1;
            }
            Outcome::Failed(e) => return Err(anyhow!("{e}")),
        }
    }
    println!("checked={checked} skipped={skipped} mismatches={mismatches}");
    Ok(if mismatches == 0 { 0 } else { 1 })
}

fn group_output_path(base: &Path, index: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "grid".to_string());
    let ext = base
        .extension()
        .map(|s| format!(".{}", s.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}.group{index}{ext}"))
}

fn cmd_grid(
    cli: &Cli,
    grid_step: &str,
    bounds: &str,
    output: &Path,
    group_eta: Option<&str>,
) -> Result<i32> {
    let (_, problem) = load_problem(cli)?;
    let m = measure_of(&problem)?;
    let dim = problem.target_dim();
    let grid = Grid::new(parse_rational(grid_step)?, parse_bounds(bounds, dim)?)?;

    match group_eta {
        None => {
            let mut buf = Vec::new();
            write_density_csv(&mut buf, &m, &grid)?;
            fs::write(output, buf).with_context(|| format!("cannot write {}", output.display()))?;
            println!("wrote {}", output.display());
        }
        Some(raw) => {
            let gv = parse_int_list(raw)?;
            if gv.len() != dim {
                bail!("group-eta has dimension {}, expected {dim}", gv.len());
            }
            if gv.iter().all(|&x| x == 0) {
                bail!("group-eta must be nonzero");
            }
            let groups = m.group_by_eta(&dh_core::weights::PolarizingVector::from_ints(&gv));
            for (i, g) in groups.iter().enumerate() {
                let path = group_output_path(output, i);
                let sub = m.group_measure(g);
                let mut buf = Vec::new();
                write_density_csv(&mut buf, &sub, &grid)?;
                fs::write(&path, buf)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                let members: Vec<String> = g.members.iter().map(|k| k.to_string()).collect();
                println!(
                    "group {i}: pairing {} summands [{}] -> {}",
                    g.label,
                    members.join(", "),
                    path.display()
                );
            }
        }
    }
    Ok(0)
}

fn cmd_mc(cli: &Cli, point: &str, samples: u64, seed: u64, window: &str) -> Result<i32> {
    let (_, problem) = load_problem(cli)?;
    let m = measure_of(&problem)?;
    let b = parse_point(point, problem.target_dim())?;
    let halfwidth = parse_rational(window)?
        .to_f64()
        .ok_or_else(|| anyhow!("window halfwidth out of range"))?;
    if halfwidth <= 0.0 {
        bail!("window halfwidth must be positive");
    }

    let exact = m.eval_density(&b);
    if !exact.regular {
        println!("WALL");
        return Ok(3);
    }

    let mut combined = 0.0f64;
    let mut variance = 0.0f64;
    for (i, cone) in m.summands().iter().enumerate() {
        let est = match estimate_density(cone, &b, halfwidth, samples, seed.wrapping_add(i as u64))
        {
            Ok(est) => est,
            Err(CoreError::WindowNotRegular) => {
                println!("WALL");
                return Ok(3);
            }
            Err(e) => return Err(anyhow!("{e}")),
        };
        println!(
            "summand {i}: sign {} estimate {} stderr {}",
            if cone.sign() > 0 { "+1" } else { "-1" },
            est.mean,
            est.stderr
        );
        combined += f64::from(cone.sign()) * est.mean;
        variance += est.stderr * est.stderr;
    }
    let stderr = variance.sqrt();
    let exact_f = exact.value.to_f64().unwrap_or(f64::NAN);
    println!("exact {}", exact.value);
    println!("estimate {combined}");
    println!("stderr {stderr}");
    let gap = (exact_f - combined).abs();
    if stderr > 0.0 {
        println!("sigma-ratio {}", gap / stderr);
    } else {
        println!(
            "sigma-ratio {}",
            if gap == 0.0 { 0.0 } else { f64::INFINITY }
        );
    }
    Ok(0)
}

fn cmd_toric_data(cli: &Cli, output: Option<&Path>) -> Result<i32> {
    let (spec, problem) = load_problem(cli)?;
    let polytope = problem
        .polytope()
        .ok_or_else(|| anyhow!("toric-data needs a polytope in the problem file"))?;
    let dd = vertex_data(polytope).map_err(|e| anyhow!("{e}"))?;
    println!("unimodular: {}", dd.unimodular);
    let mut fixed_points = Vec::with_capacity(dd.vertex_data.len());
    for datum in &dd.vertex_data {
        let weights: Vec<String> = datum.weights.iter().map(|w| w.to_string()).collect();
        println!(
            "vertex {}: weights {}",
            datum.moment_value,
            weights.join(" ")
        );
        let point: Vec<String> = datum
            .moment_value
            .entries()
            .iter()
            .map(|r| r.to_string())
            .collect();
        let mut ws = Vec::with_capacity(datum.weights.len());
        for w in &datum.weights {
            let row: Vec<i64> =
                w.0.iter()
                    .map(|n| i64::try_from(n).map_err(|_| anyhow!("weight entry too large")))
                    .collect::<Result<Vec<_>>>()?;
            ws.push(row);
        }
        fixed_points.push(problem::FixedPointSpec { point, weights: ws });
    }
    if let Some(path) = output {
        let out_spec = ProblemSpec {
            torus_dim: spec.torus_dim,
            fixed_points: Some(fixed_points),
            polytope: None,
            eta: spec.eta.clone(),
            subtorus: spec.subtorus.clone(),
        };
        fs::write(path, out_spec.to_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}
