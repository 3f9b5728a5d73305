//! Rational evaluation grids and CSV output.
//!
//! Grid points are exact rationals so that wall avoidance stays decidable;
//! rows are emitted in lexicographic order with LF line endings, which makes
//! the output byte-deterministic for a fixed problem and flag set.

use std::io::Write;

use anyhow::{bail, Result};
use num_traits::Zero;

use dh_core::cone::DensityValue;
use dh_core::linalg::{RatVec, Rational};
use dh_core::measure::DHMeasure;

pub struct Grid {
    pub step: Rational,
    /// Inclusive (lo, hi) per axis.
    pub bounds: Vec<(Rational, Rational)>,
}

impl Grid {
    pub fn new(step: Rational, bounds: Vec<(Rational, Rational)>) -> Result<Self> {
        if step <= Rational::zero() {
            bail!("grid step must be positive");
        }
        Ok(Grid { step, bounds })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// All grid points in lexicographic order. Axes with `lo > hi` are empty.
    pub fn points(&self) -> Vec<RatVec> {
        let axes: Vec<Vec<Rational>> = self
            .bounds
            .iter()
            .map(|(lo, hi)| {
                let mut axis = Vec::new();
                let mut x = lo.clone();
                while x <= *hi {
                    axis.push(x.clone());
                    x += &self.step;
                }
                axis
            })
            .collect();
        if axes.iter().any(|a| a.is_empty()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; axes.len()];
        'emit: loop {
            out.push(RatVec::new(
                idx.iter().zip(&axes).map(|(&i, a)| a[i].clone()).collect(),
            ));
            for pos in (0..axes.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < axes[pos].len() {
                    continue 'emit;
                }
                idx[pos] = 0;
            }
            break;
        }
        out
    }
}

/// Applies a pure function to every point, fanning rows out across worker
/// threads; results come back merged by index, so the output order never
/// depends on scheduling.
pub fn par_map_points<T, F>(points: &[RatVec], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&RatVec) -> T + Sync,
{
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(points.len().max(1));
    if workers <= 1 {
        return points.iter().map(&f).collect();
    }
    let chunk = points.len().div_ceil(workers);
    let mut out: Vec<Option<T>> = Vec::with_capacity(points.len());
    out.resize_with(points.len(), || None);
    std::thread::scope(|scope| {
        for (ins, outs) in points.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(|| {
                for (p, slot) in ins.iter().zip(outs.iter_mut()) {
                    *slot = Some(f(p));
                }
            });
        }
    });
    out.into_iter()
        .map(|v| v.expect("worker filled slot"))
        .collect()
}

/// Densities of a measure over a slice of points, evaluated in parallel.
pub fn eval_points(measure: &DHMeasure, points: &[RatVec]) -> Vec<DensityValue> {
    par_map_points(points, |p| measure.eval_density(p))
}

/// Writes the density of `measure` over `grid` as CSV with header
/// `x1,...,xd,density,regular`. Wall rows have an empty density column and
/// `regular = 0`.
pub fn write_density_csv<W: Write>(out: &mut W, measure: &DHMeasure, grid: &Grid) -> Result<()> {
    let d = grid.dim();
    let header: Vec<String> = (1..=d)
        .map(|i| format!("x{i}"))
        .chain(["density".to_string(), "regular".to_string()])
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let points = grid.points();
    let values = eval_points(measure, &points);
    for (point, v) in points.iter().zip(values) {
        let coords: Vec<String> = point.entries().iter().map(|r| r.to_string()).collect();
        let (density, regular) = if v.regular {
            (v.value.to_string(), "1".to_string())
        } else {
            (String::new(), "0".to_string())
        };
        writeln!(out, "{},{},{}", coords.join(","), density, regular)?;
    }
    Ok(())
}
