//! Signed cone measures: the summands of the fixed-point decomposition.
//!
//! A cone measure is the push-forward of Lebesgue measure on a positive
//! orthant through the polarized weight matrix, translated to the moment
//! value of the fixed point and carrying the orientation sign. Its density
//! (the multivariate truncated power) is evaluated pointwise and exactly:
//! for a query `b` the fiber `{ x >= 0 : columns . x = b - base }` is
//! parametrized by a kernel lattice basis and measured by the polytope
//! engine, then divided by the image lattice index so that the result is a
//! rational number in the lattice normalization.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    combinations, image_lattice_index, kernel_lattice_basis, rank, rat_rank, rat_solve_square,
    solve_particular, Int, IntMat, RatVec, Rational,
};
use crate::polytope::{cone_contains, volume, HPolytope};
use crate::weights::{polarize, FixedPointDatum, PolarizingVector};

/// One summand of the decomposition: base point, polarized weight columns,
/// orientation sign, and the cached image lattice index. The polarizing
/// vector that produced the columns is kept for support bounds, and the
/// wall normals (one primitive covector per hyperplane spanned by a
/// rank-(d-1) column subset) are precomputed for regularity tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeMeasure {
    base: RatVec,
    columns: IntMat,
    sign: i8,
    norm_index: Int,
    eta: PolarizingVector,
    wall_normals: Vec<Vec<Int>>,
}

/// A density evaluation; the value is only contractual when `regular` holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityValue {
    pub value: Rational,
    pub regular: bool,
}

impl DensityValue {
    fn wall() -> Self {
        DensityValue {
            value: Rational::zero(),
            regular: false,
        }
    }

    fn regular(value: Rational) -> Self {
        DensityValue {
            value,
            regular: true,
        }
    }
}

/// One primitive covector per hyperplane spanned by an independent
/// (d-1)-subset of columns, deduplicated with a canonical sign.
fn compute_wall_normals(columns: &IntMat) -> Vec<Vec<Int>> {
    let d = columns.rows();
    let m = columns.cols();
    if d == 0 {
        return Vec::new();
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for subset in combinations(m, d - 1) {
        let sub = columns.select_cols(&subset).transpose();
        if rat_rank(&sub.to_rational_rows()) < d - 1 {
            continue;
        }
        let kernel = kernel_lattice_basis(&sub);
        debug_assert_eq!(kernel.cols(), 1);
        let mut n = kernel.col(0);
        if let Some(first) = n.iter().find(|v| !v.is_zero()) {
            if first.is_negative() {
                n = n.iter().map(|v| -v).collect();
            }
        }
        if seen.insert(n.clone()) {
            out.push(n);
        }
    }
    out
}

impl ConeMeasure {
    /// Builds the summand attached to an isolated fixed point: polarize the
    /// weights with `eta`, record the flip sign, and cache the lattice
    /// index. The polarized columns must span; otherwise the eta-component
    /// of the model moment map is not proper and the summand is rejected.
    pub fn from_fixed_point(datum: &FixedPointDatum, eta: &PolarizingVector) -> Result<Self> {
        let d = datum.torus_dim();
        let polarized = polarize(&datum.weights, eta)?;
        let r = rank(&polarized.columns);
        if r < d {
            return Err(Error::ImproperMomentMapModel { rank: r, dim: d });
        }
        let norm_index = image_lattice_index(&polarized.columns)?;
        let wall_normals = compute_wall_normals(&polarized.columns);
        Ok(ConeMeasure {
            base: datum.moment_value.clone(),
            columns: polarized.columns,
            sign: polarized.sign,
            norm_index,
            eta: eta.clone(),
            wall_normals,
        })
    }

    pub fn base(&self) -> &RatVec {
        &self.base
    }

    pub fn columns(&self) -> &IntMat {
        &self.columns
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn norm_index(&self) -> &Int {
        &self.norm_index
    }

    pub fn eta(&self) -> &PolarizingVector {
        &self.eta
    }

    pub fn torus_dim(&self) -> usize {
        self.base.dim()
    }

    /// Flips the orientation sign; debugging aid for falsifiability checks.
    pub fn with_flipped_sign(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    /// The precomputed wall covectors; `b` is on a wall iff some covector
    /// annihilates `b - base`.
    pub(crate) fn wall_covectors(&self) -> &[Vec<Int>] {
        &self.wall_normals
    }

    /// Wall test: true iff `b - base` lies on a hyperplane spanned by some
    /// rank-(d-1) subset of the columns. This is a conservative superset of
    /// the true chamber walls; off it the density is locally polynomial.
    pub fn is_wall(&self, b: &RatVec) -> bool {
        let t = b.sub(&self.base);
        self.wall_normals.iter().any(|n| t.dot_int(n).is_zero())
    }

    /// Exact membership of `b` in `base + cone(columns)`.
    pub fn in_support(&self, b: &RatVec) -> bool {
        cone_contains(&self.columns, &b.sub(&self.base))
    }

    /// Density at `b`. Wall points report `regular = false`; elsewhere the
    /// value is `sign * fiber_volume / norm_index`, exactly.
    pub fn density(&self, b: &RatVec) -> DensityValue {
        assert_eq!(b.dim(), self.torus_dim(), "query dimension mismatch");
        if self.is_wall(b) {
            return DensityValue::wall();
        }
        let d = self.torus_dim();
        let m = self.columns.cols();
        let t = b.sub(&self.base);
        let signed = |v: Rational| {
            let v = v / Rational::from_integer(self.norm_index.clone());
            DensityValue::regular(if self.sign < 0 { -v } else { v })
        };
        if m == d {
            // simplicial: the fiber is a single point of the open orthant
            // or nothing
            let x = rat_solve_square(&self.columns.to_rational_rows(), t.entries())
                .expect("full-rank square system");
            return if x.iter().all(|c| c.is_positive()) {
                signed(Rational::one())
            } else {
                DensityValue::regular(Rational::zero())
            };
        }
        let Some(x0) = solve_particular(&self.columns, &t) else {
            return DensityValue::regular(Rational::zero());
        };
        let kernel = kernel_lattice_basis(&self.columns);
        let fiber = HPolytope::new(kernel, x0);
        let vol = volume(&fiber).expect("orthant fibers of a polarized system are bounded");
        signed(vol)
    }
}
