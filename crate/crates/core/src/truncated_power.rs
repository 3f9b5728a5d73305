//! One-variable integration recurrence for truncated-power densities.
//!
//! The density of the push-forward of orthant Lebesgue measure through an
//! integer column matrix satisfies
//!
//! `T_A(b) = integral_0^inf T_{A'}(b - t * alpha_m) dt`,
//!
//! where `A'` drops the last column. This module evaluates the recurrence
//! exactly: the integrand is piecewise polynomial in `t` with breakpoints
//! where the moving point crosses a wall of the smaller system, so each
//! piece is reconstructed by interpolation at rational sample points and
//! integrated in closed form. The computation never touches the polytope
//! engine, which makes it an independent route to the same density as
//! `ConeMeasure::density` (up to the orientation sign).
//!
//! Scope is deliberately small (`d <= 2`, `m <= 4`): enough for
//! cross-checking, nothing more.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    combinations, kernel_lattice_basis, rat_det, rat_rank, rat_solve_square, Int, IntMat, RatVec,
    Rational,
};

/// Exact density at a regular point `b` of the push-forward of Lebesgue
/// measure on the positive orthant through `columns`, in the lattice
/// normalization (unsigned).
pub fn truncated_power_density(columns: &IntMat, b: &RatVec) -> Result<Rational> {
    let d = columns.rows();
    let m = columns.cols();
    if d > 2 || m > 4 {
        return Err(Error::RecurrenceScope { d, m });
    }
    assert_eq!(b.dim(), d, "query dimension mismatch");
    let cols: Vec<Vec<Int>> = (0..m).map(|j| columns.col(j)).collect();

    // order a column basis first so that stripping from the end keeps the
    // system surjective all the way down to the square base case
    let mut basis: Vec<usize> = Vec::new();
    for j in 0..m {
        if basis.len() == d {
            break;
        }
        let trial: Vec<Vec<Rational>> = basis
            .iter()
            .chain(std::iter::once(&j))
            .map(|&i| {
                cols[i]
                    .iter()
                    .map(|n| Rational::from_integer(n.clone()))
                    .collect()
            })
            .collect();
        // columns as rows; rank is unchanged by transposition
        if rat_rank(&trial) == trial.len() {
            basis.push(j);
        }
    }
    if basis.len() < d {
        return Err(Error::DegenerateWeightSystem {
            rank: basis.len(),
            expected: d,
        });
    }
    let mut ordered: Vec<Vec<Int>> = basis.iter().map(|&j| cols[j].clone()).collect();
    for (j, col) in cols.iter().enumerate() {
        if !basis.contains(&j) {
            ordered.push(col.clone());
        }
    }
    eval(&ordered, b)
}

fn as_matrix(cols: &[Vec<Int>]) -> IntMat {
    let d = cols[0].len();
    IntMat::from_cols(cols, d)
}

/// Hyperplane normals of the walls of a column system: one primitive normal
/// per independent subset of size `d - 1`.
fn wall_normals(cols: &[Vec<Int>], d: usize) -> Vec<Vec<Int>> {
    let mut out = Vec::new();
    for subset in combinations(cols.len(), d - 1) {
        let chosen: Vec<Vec<Int>> = subset.iter().map(|&j| cols[j].clone()).collect();
        let rows: Vec<Vec<Rational>> = chosen
            .iter()
            .map(|c| {
                c.iter()
                    .map(|n| Rational::from_integer(n.clone()))
                    .collect()
            })
            .collect();
        if rat_rank(&rows) < d - 1 {
            continue;
        }
        // the normal spans the kernel of the transposed subset matrix
        let mat = IntMat::new(d - 1, d, chosen.iter().flatten().cloned().collect());
        let kernel = kernel_lattice_basis(&mat);
        debug_assert_eq!(kernel.cols(), 1);
        out.push(kernel.col(0));
    }
    out
}

fn pow(x: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// Integral over `[a, c]` of the polynomial of degree < `samples.len()`
/// interpolating the sample pairs `(t, value)`.
fn integrate_interpolant(samples: &[(Rational, Rational)], a: &Rational, c: &Rational) -> Rational {
    let n = samples.len();
    let vander: Vec<Vec<Rational>> = samples
        .iter()
        .map(|(t, _)| (0..n).map(|i| pow(t, i)).collect())
        .collect();
    let rhs: Vec<Rational> = samples.iter().map(|(_, v)| v.clone()).collect();
    let coeffs = rat_solve_square(&vander, &rhs).expect("distinct sample points");
    let mut total = Rational::zero();
    for (i, coeff) in coeffs.iter().enumerate() {
        let antiderivative =
            (pow(c, i + 1) - pow(a, i + 1)) / Rational::from_integer(Int::from((i + 1) as i64));
        total += coeff * antiderivative;
    }
    total
}

fn eval(cols: &[Vec<Int>], b: &RatVec) -> Result<Rational> {
    let d = b.dim();
    let m = cols.len();
    if m == d {
        let mat = as_matrix(cols);
        let x = rat_solve_square(&mat.to_rational_rows(), b.entries())
            .expect("ordered prefix stays nonsingular");
        assert!(
            x.iter().all(|v| !v.is_zero()),
            "query point must be regular"
        );
        return Ok(if x.iter().all(|v| v.is_positive()) {
            Rational::one() / rat_det(&mat.to_rational_rows()).abs()
        } else {
            Rational::zero()
        });
    }

    let alpha = &cols[m - 1];
    let rest = &cols[..m - 1];

    // breakpoints: positive crossings of the smaller system's walls
    let mut breaks: Vec<Rational> = Vec::new();
    for n in wall_normals(rest, d) {
        let num = b.dot_int(&n);
        let den = crate::linalg::dot_int(&n, alpha);
        assert!(!num.is_zero(), "query point must be regular for every wall");
        if den.is_zero() {
            continue; // the line never crosses this wall
        }
        let t = num / Rational::from_integer(den);
        if t.is_positive() {
            breaks.push(t);
        }
    }
    breaks.sort();
    breaks.dedup();

    let degree = (m - 1) - d;
    let move_to = |t: &Rational| -> RatVec {
        let shift = RatVec::new(
            alpha
                .iter()
                .map(|n| Rational::from_integer(n.clone()) * t)
                .collect(),
        );
        b.sub(&shift)
    };

    let mut total = Rational::zero();
    let mut start = Rational::zero();
    for end in &breaks {
        let width = end - &start;
        let mut samples = Vec::with_capacity(degree + 1);
        for j in 0..=degree {
            let t = &start
                + &width * Rational::new(Int::from((j + 1) as i64), Int::from((degree + 2) as i64));
            let v = eval(rest, &move_to(&t))?;
            samples.push((t, v));
        }
        if samples.iter().any(|(_, v)| !v.is_zero()) {
            total += integrate_interpolant(&samples, &start, end);
        }
        start = end.clone();
    }

    // beyond the last breakpoint the integrand is one polynomial piece; a
    // convergent integral forces it to vanish identically
    for j in 0..=degree {
        let t = &start + Rational::from_integer(Int::from((j + 1) as i64));
        if !eval(rest, &move_to(&t))?.is_zero() {
            return Err(Error::DivergentIntegral);
        }
    }

    Ok(total)
}
