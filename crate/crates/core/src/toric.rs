//! Toric reference computations.
//!
//! For a symplectic toric manifold the moment image is a simple rational
//! polytope, the fixed points sit over its vertices, and their isotropy
//! weights are the primitive edge directions there. The measure of the full
//! torus action is plain Lebesgue measure on the polytope, and pushing it
//! forward along a subtorus is a fiber-volume computation. Both give ground
//! truth for the cone decomposition without sharing its evaluation path.

use num_traits::{One, Signed, Zero};

use crate::cone::DensityValue;
use crate::error::{Error, Result};
use crate::linalg::{kernel_lattice_basis, rat_det, Int, IntMat, RatVec, Rational};
use crate::polytope::{
    affine_rank, contains, slice_polytope, vertices, volume, HPolytope, Location,
};
use crate::weights::{FixedPointDatum, Weight};

/// A moment polytope together with the fixed-point data read off its
/// vertices. `unimodular` records whether every vertex cone has determinant
/// of absolute value one (the smooth toric case); it is recorded, not
/// enforced, so orbifold-type polytopes can still be processed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantData {
    pub polytope: HPolytope,
    pub vertex_data: Vec<FixedPointDatum>,
    pub unimodular: bool,
}

/// Reads fixed-point data off a bounded, full-dimensional, simple polytope:
/// one datum per vertex, with the primitive edge directions as weights.
/// Vertices are visited in lexicographic order.
pub fn vertex_data(p: &HPolytope) -> Result<DelzantData> {
    let d = p.ambient_dim();
    let vp = vertices(p)?;
    if vp.vertices.is_empty() || affine_rank(&vp.vertices) < d {
        return Err(Error::NotFullDimensional);
    }
    let mut data = Vec::with_capacity(vp.vertices.len());
    let mut unimodular = true;
    for v in &vp.vertices {
        let tight = p.tight_constraints(v);
        if tight.len() != d {
            return Err(Error::NonSimplePolytope {
                vertex: v.to_string(),
                tight: tight.len(),
                dim: d,
            });
        }
        let mut weights = Vec::with_capacity(d);
        for (slot, &relax) in tight.iter().enumerate() {
            // the edge direction keeps every tight constraint except one
            let others: Vec<usize> = tight
                .iter()
                .enumerate()
                .filter(|&(s, _)| s != slot)
                .map(|(_, &j)| j)
                .collect();
            let sub = p.normals().select_rows(&others);
            let kernel = kernel_lattice_basis(&sub);
            assert_eq!(
                kernel.cols(),
                1,
                "vertex figure must leave a one-dimensional edge direction"
            );
            let mut dir = kernel.col(0);
            let orient = crate::linalg::dot_int(p.normals().row(relax), &dir);
            assert!(!orient.is_zero(), "edge direction escapes the vertex cone");
            if orient.is_negative() {
                dir = dir.iter().map(|n| -n).collect();
            }
            weights.push(Weight(dir).primitive());
        }
        let edge_mat =
            IntMat::from_cols(&weights.iter().map(|w| w.0.clone()).collect::<Vec<_>>(), d);
        if rat_det(&edge_mat.to_rational_rows()).abs() != Rational::one() {
            unimodular = false;
        }
        data.push(FixedPointDatum::new(v.clone(), weights));
    }
    Ok(DelzantData {
        polytope: p.clone(),
        vertex_data: data,
        unimodular,
    })
}

/// Density of the full toric action: the indicator of the moment polytope.
/// Boundary points are not regular values.
pub fn full_torus_density(p: &HPolytope, b: &RatVec) -> DensityValue {
    match contains(p, b) {
        Location::Inside => DensityValue {
            value: Rational::one(),
            regular: true,
        },
        Location::Outside => DensityValue {
            value: Rational::zero(),
            regular: true,
        },
        Location::Boundary => DensityValue {
            value: Rational::zero(),
            regular: false,
        },
    }
}

/// Density of the subtorus action cut out by the columns of `iota`
/// (a `dim x k` integer matrix of rank `k`): the fiber volume of the
/// moment polytope over `y` under the transposed projection, in
/// kernel-lattice units. The value is irregular when the fiber is nonempty
/// but lower-dimensional, i.e. when the slice meets the polytope without
/// crossing it transversally.
pub fn subtorus_density(p: &HPolytope, iota: &IntMat, y: &RatVec) -> Result<DensityValue> {
    let k = iota.cols();
    let proj = iota.transpose();
    let Some(fiber) = slice_polytope(p, &proj, y)? else {
        return Ok(DensityValue {
            value: Rational::zero(),
            regular: true,
        });
    };
    let fverts = vertices(&fiber)?;
    if fverts.vertices.is_empty() {
        return Ok(DensityValue {
            value: Rational::zero(),
            regular: true,
        });
    }
    let fdim = p.ambient_dim() - k;
    if fdim > 0 && (fverts.vertices.len() < fdim + 1 || affine_rank(&fverts.vertices) < fdim) {
        return Ok(DensityValue {
            value: Rational::zero(),
            regular: false,
        });
    }
    Ok(DensityValue {
        value: volume(&fiber)?,
        regular: true,
    })
}

/// |det| of the weight matrix at one vertex datum.
pub fn vertex_determinant(datum: &FixedPointDatum) -> Int {
    let d = datum.torus_dim();
    let m = IntMat::from_cols(
        &datum
            .weights
            .iter()
            .map(|w| w.0.clone())
            .collect::<Vec<_>>(),
        d,
    );
    rat_det(&m.to_rational_rows()).numer().abs()
}
