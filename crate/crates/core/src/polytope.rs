//! Exact convex polytope engine.
//!
//! Polytopes are given by integer inward normals and rational offsets:
//! `P = { x : A_j . x >= -offset_j }`. Vertices are enumerated as basic
//! feasible solutions, volumes come from a recursive fan triangulation, and
//! affine slices are measured in the kernel-lattice normalization so that
//! push-forward densities stay rational. Instances are desk scale (tens of
//! constraints, dimension at most six), so brute-force enumeration beats
//! pivoting machinery on both simplicity and exactness.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    combinations, kernel_lattice_basis, rank, rat_det, rat_rank, rat_solve_square,
    solve_particular, IntMat, RatVec, Rational,
};

/// Half-space representation `{ x : normals . x >= -offsets }`.
/// The representation may be redundant but must be consistent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    normals: IntMat,
    offsets: RatVec,
}

/// Vertex representation; the list is irredundant and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    pub vertices: Vec<RatVec>,
    pub ambient_dim: usize,
}

/// Exact position of a point relative to a polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl HPolytope {
    pub fn new(normals: IntMat, offsets: RatVec) -> Self {
        assert_eq!(normals.rows(), offsets.dim(), "one offset per normal");
        HPolytope { normals, offsets }
    }

    pub fn from_rows(normals: &[Vec<i64>], offsets: &[i64]) -> Self {
        HPolytope::new(IntMat::from_rows(normals), RatVec::from_ints(offsets))
    }

    pub fn ambient_dim(&self) -> usize {
        self.normals.cols()
    }

    pub fn num_constraints(&self) -> usize {
        self.normals.rows()
    }

    pub fn normals(&self) -> &IntMat {
        &self.normals
    }

    pub fn offsets(&self) -> &RatVec {
        &self.offsets
    }

    /// `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * d);
        let mut offs = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut lo = vec![0i64; d];
            lo[i] = 1;
            rows.push(lo);
            offs.push(0);
            let mut hi = vec![0i64; d];
            hi[i] = -1;
            rows.push(hi);
            offs.push(1);
        }
        HPolytope::from_rows(&rows, &offs)
    }

    /// `{ x >= 0, sum x_i <= 1 }`.
    pub fn standard_simplex(d: usize) -> Self {
        let mut rows = Vec::with_capacity(d + 1);
        let mut offs = Vec::with_capacity(d + 1);
        for i in 0..d {
            let mut e = vec![0i64; d];
            e[i] = 1;
            rows.push(e);
            offs.push(0);
        }
        rows.push(vec![-1i64; d]);
        offs.push(1);
        HPolytope::from_rows(&rows, &offs)
    }

    /// Slack of constraint `j` at `x`; nonnegative inside.
    pub fn slack(&self, j: usize, x: &RatVec) -> Rational {
        x.dot_int(self.normals.row(j)) + &self.offsets[j]
    }

    /// Indices of the constraints tight at `x`.
    pub fn tight_constraints(&self, x: &RatVec) -> Vec<usize> {
        (0..self.num_constraints())
            .filter(|&j| self.slack(j, x).is_zero())
            .collect()
    }
}

/// Classifies a point against every inequality.
pub fn contains(p: &HPolytope, x: &RatVec) -> Location {
    assert_eq!(x.dim(), p.ambient_dim(), "point dimension mismatch");
    let mut on_boundary = false;
    for j in 0..p.num_constraints() {
        let s = p.slack(j, x);
        if s.is_negative() {
            return Location::Outside;
        }
        if s.is_zero() {
            on_boundary = true;
        }
    }
    if on_boundary {
        Location::Boundary
    } else {
        Location::Inside
    }
}

/// Exact membership of `v` in the closed cone generated by the columns of
/// `gens`, decided by enumerating linearly independent column subsets
/// (Caratheodory: a cone member is a nonnegative combination of some
/// independent subset).
pub fn cone_contains(gens: &IntMat, v: &RatVec) -> bool {
    assert_eq!(gens.rows(), v.dim());
    if v.is_zero() {
        return true;
    }
    let d = gens.rows();
    let m = gens.cols();
    for k in 1..=m.min(d) {
        for subset in combinations(m, k) {
            let cols = gens.select_cols(&subset);
            if rat_rank(&cols.to_rational_rows()) < k {
                continue;
            }
            if let Some(lambda) = solve_particular(&cols, v) {
                if lambda.entries().iter().all(|c| !c.is_negative()) {
                    return true;
                }
            }
        }
    }
    false
}

/// The recession cone `{ x : normals . x >= 0 }` is trivial iff the rows of
/// the normal matrix positively span the whole space.
fn has_trivial_recession_cone(p: &HPolytope) -> bool {
    let d = p.ambient_dim();
    if rank(&p.normals) < d {
        return false;
    }
    let gens = p.normals.transpose(); // rows become generator columns
    for i in 0..d {
        for sign in [1i64, -1] {
            let mut e = vec![0i64; d];
            e[i] = sign;
            if !cone_contains(&gens, &RatVec::from_ints(&e)) {
                return false;
            }
        }
    }
    true
}

/// Enumerates the vertices of a bounded polytope: every `d`-subset of
/// constraints with an invertible normal submatrix is solved and kept when
/// feasible. Fails on H-representations with a nontrivial recession cone.
pub fn vertices(p: &HPolytope) -> Result<VPolytope> {
    let d = p.ambient_dim();
    if !has_trivial_recession_cone(p) {
        return Err(Error::UnboundedPolytope);
    }
    let n = p.num_constraints();
    let mut found: BTreeSet<RatVec> = BTreeSet::new();
    for subset in combinations(n, d) {
        let sub = p.normals.select_rows(&subset);
        let rhs: Vec<Rational> = subset.iter().map(|&j| -&p.offsets[j]).collect();
        let Some(x) = rat_solve_square(&sub.to_rational_rows(), &rhs) else {
            continue;
        };
        let x = RatVec::new(x);
        if contains(p, &x) != Location::Outside {
            found.insert(x);
        }
    }
    Ok(VPolytope {
        vertices: found.into_iter().collect(),
        ambient_dim: d,
    })
}

/// Rank of the differences `v_i - v_0`; 0 for fewer than two points.
pub(crate) fn affine_rank(points: &[RatVec]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let base = &points[0];
    let rows: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|v| v.sub(base).entries().to_vec())
        .collect();
    rat_rank(&rows)
}

/// Facet polytope obtained by substituting constraint `j` as an equation and
/// eliminating coordinate `k` (which must have a nonzero normal entry).
/// Returns the lower-dimensional H-representation together with the affine
/// lift back to the ambient space.
fn facet_polytope(p: &HPolytope, j: usize, k: usize) -> (HPolytope, impl Fn(&RatVec) -> RatVec) {
    let d = p.ambient_dim();
    let a_jk = p.normals.get(j, k).clone();
    assert!(!a_jk.is_zero());
    let s = if a_jk.is_negative() {
        -num_traits::one::<crate::linalg::Int>()
    } else {
        num_traits::one::<crate::linalg::Int>()
    };
    let keep: Vec<usize> = (0..d).filter(|&l| l != k).collect();

    let mut rows = Vec::new();
    let mut offsets = Vec::new();
    for i in 0..p.num_constraints() {
        if i == j {
            continue;
        }
        let a_ik = p.normals.get(i, k);
        let row: Vec<crate::linalg::Int> = keep
            .iter()
            .map(|&l| &s * (&a_jk * p.normals.get(i, l) - a_ik * p.normals.get(j, l)))
            .collect();
        let off = Rational::from_integer(&s * &a_jk) * &p.offsets[i]
            - Rational::from_integer(&s * a_ik) * &p.offsets[j];
        rows.push(row);
        offsets.push(off);
    }
    let normals = IntMat::new(rows.len(), d - 1, rows.into_iter().flatten().collect());
    let facet = HPolytope::new(normals, RatVec::new(offsets));

    let normal_j: Vec<crate::linalg::Int> = p.normals.row(j).to_vec();
    let offset_j = p.offsets[j].clone();
    let lift = move |u: &RatVec| -> RatVec {
        let mut x = vec![Rational::zero(); d];
        for (pos, &l) in keep.iter().enumerate() {
            x[l] = u[pos].clone();
        }
        // solve the facet equation for the eliminated coordinate
        let mut acc = -&offset_j;
        for (pos, &l) in keep.iter().enumerate() {
            acc -= Rational::from_integer(normal_j[l].clone()) * &u[pos];
        }
        x[k] = acc / Rational::from_integer(normal_j[k].clone());
        RatVec::new(x)
    };
    (facet, lift)
}

/// Triangulates a bounded polytope into full-dimensional simplices, each a
/// list of `d + 1` vertices: a fan from the lexicographically smallest
/// vertex over recursively triangulated facets. Lower-dimensional input
/// yields no simplices.
fn triangulate(p: &HPolytope) -> Result<Vec<Vec<RatVec>>> {
    let d = p.ambient_dim();
    let vp = vertices(p)?;
    let verts = vp.vertices;
    if d == 0 {
        return Ok(if verts.is_empty() {
            Vec::new()
        } else {
            vec![vec![RatVec::zero(0)]]
        });
    }
    if verts.len() < d + 1 || affine_rank(&verts) < d {
        return Ok(Vec::new());
    }
    if verts.len() == d + 1 {
        return Ok(vec![verts]);
    }
    let v0 = verts[0].clone();
    let mut out = Vec::new();
    // redundant representations can list one geometric facet under several
    // constraint rows; key facets by their vertex sets so each is fanned once
    let mut seen: BTreeSet<Vec<RatVec>> = BTreeSet::new();
    for j in 0..p.num_constraints() {
        if p.slack(j, &v0).is_zero() {
            continue; // fan apex lies on this facet
        }
        let facet_verts: Vec<RatVec> = verts
            .iter()
            .filter(|v| p.slack(j, v).is_zero())
            .cloned()
            .collect();
        if facet_verts.len() < d || affine_rank(&facet_verts) < d - 1 {
            continue;
        }
        if !seen.insert(facet_verts) {
            continue;
        }
        let k = (0..d)
            .find(|&l| !p.normals.get(j, l).is_zero())
            .expect("constraint with empty normal cannot be tight");
        let (facet, lift) = facet_polytope(p, j, k);
        for simplex in triangulate(&facet)? {
            let mut lifted: Vec<RatVec> = Vec::with_capacity(d + 1);
            lifted.push(v0.clone());
            lifted.extend(simplex.iter().map(&lift));
            out.push(lifted);
        }
    }
    Ok(out)
}

/// Exact Euclidean volume with respect to the ambient integer lattice.
/// Lower-dimensional polytopes have volume zero; in dimension zero a
/// nonempty polytope counts as volume one.
pub fn volume(p: &HPolytope) -> Result<Rational> {
    let d = p.ambient_dim();
    let simplices = triangulate(p)?;
    if d == 0 {
        return Ok(if simplices.is_empty() {
            Rational::zero()
        } else {
            Rational::one()
        });
    }
    let mut total = Rational::zero();
    for s in &simplices {
        let base = &s[0];
        let rows: Vec<Vec<Rational>> = s[1..]
            .iter()
            .map(|v| v.sub(base).entries().to_vec())
            .collect();
        total += rat_det(&rows).abs();
    }
    let mut factorial = Rational::one();
    for i in 1..=d {
        factorial *= Rational::from_integer(crate::linalg::int(i as i64));
    }
    Ok(total / factorial)
}

/// The fiber `{ x in P : proj . x = value }` rewritten as a polytope in
/// kernel-lattice coordinates, where the lattice `ker(proj) ∩ Z^dim` has
/// covolume one. `None` when the affine fiber is empty outright.
pub fn slice_polytope(p: &HPolytope, proj: &IntMat, value: &RatVec) -> Result<Option<HPolytope>> {
    let k = proj.rows();
    assert_eq!(
        proj.cols(),
        p.ambient_dim(),
        "projection dimension mismatch"
    );
    assert_eq!(value.dim(), k);
    let r = rank(proj);
    if r < k {
        return Err(Error::RankDeficientProjection {
            rank: r,
            expected: k,
        });
    }
    let Some(x0) = solve_particular(proj, value) else {
        return Ok(None);
    };
    let kernel = kernel_lattice_basis(proj);
    let normals = p.normals.mul_mat(&kernel);
    let offsets = p.offsets.add(&p.normals.mul_vec_rat(&x0));
    Ok(Some(HPolytope::new(normals, offsets)))
}

/// Volume of the fiber `{ x in P : proj . x = value }` in the kernel-lattice
/// normalization; zero for empty fibers.
pub fn slice_fiber_volume(p: &HPolytope, proj: &IntMat, value: &RatVec) -> Result<Rational> {
    match slice_polytope(p, proj, value)? {
        None => Ok(Rational::zero()),
        Some(fiber) => volume(&fiber),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn unit_square() -> HPolytope {
        HPolytope::unit_cube(2)
    }

    fn triangle() -> HPolytope {
        HPolytope::standard_simplex(2)
    }

    #[test]
    fn contains_classifies_exactly() {
        let sq = unit_square();
        assert_eq!(
            contains(&sq, &RatVec::new(vec![rat(1, 2), rat(1, 2)])),
            Location::Inside
        );
        assert_eq!(
            contains(&sq, &RatVec::new(vec![rat(0, 1), rat(1, 2)])),
            Location::Boundary
        );
        assert_eq!(
            contains(&sq, &RatVec::from_ints(&[2, 0])),
            Location::Outside
        );
    }

    #[test]
    fn square_vertices() {
        let vp = vertices(&unit_square()).unwrap();
        let expect: Vec<RatVec> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|c| RatVec::from_ints(&[c[0], c[1]]))
            .collect();
        assert_eq!(vp.vertices, expect);
    }

    #[test]
    fn triangle_vertices() {
        let vp = vertices(&triangle()).unwrap();
        let expect: Vec<RatVec> = [[0, 0], [0, 1], [1, 0]]
            .iter()
            .map(|c| RatVec::from_ints(&[c[0], c[1]]))
            .collect();
        assert_eq!(vp.vertices, expect);
    }

    #[test]
    fn half_plane_is_unbounded() {
        let p = HPolytope::from_rows(&[vec![1, 0], vec![0, 1]], &[0, 0]);
        assert_eq!(vertices(&p), Err(Error::UnboundedPolytope));
    }

    #[test]
    fn cube_volumes() {
        for d in 1..=4 {
            assert_eq!(volume(&HPolytope::unit_cube(d)).unwrap(), rat(1, 1));
        }
    }

    #[test]
    fn simplex_volumes() {
        let mut factorial = 1i64;
        for d in 1..=4 {
            factorial *= d as i64;
            assert_eq!(
                volume(&HPolytope::standard_simplex(d)).unwrap(),
                rat(1, factorial)
            );
        }
    }

    #[test]
    fn scaled_triangle_volume() {
        // triangle scaled by 3: {x >= 0, y >= 0, x + y <= 3}
        let p = HPolytope::from_rows(&[vec![1, 0], vec![0, 1], vec![-1, -1]], &[0, 0, 3]);
        assert_eq!(volume(&p).unwrap(), rat(9, 2));
    }

    #[test]
    fn lower_dimensional_volume_is_zero() {
        // segment {0 <= x <= 1, y = 0} as a degenerate 2-D polytope
        let p = HPolytope::from_rows(
            &[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            &[0, 1, 0, 0],
        );
        assert_eq!(volume(&p).unwrap(), rat(0, 1));
    }

    #[test]
    fn empty_polytope_volume_is_zero() {
        let p = HPolytope::from_rows(
            &[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            &[0, -1, 0, 1],
        );
        assert_eq!(volume(&p).unwrap(), rat(0, 1));
    }

    #[test]
    fn square_slice_is_unit_segment() {
        let proj = IntMat::from_rows(&[vec![1, 0]]);
        let v = slice_fiber_volume(&unit_square(), &proj, &RatVec::new(vec![rat(1, 2)])).unwrap();
        assert_eq!(v, rat(1, 1));
    }

    #[test]
    fn triangle_slice_in_kernel_units() {
        // segment from (1/2, 0) to (0, 1/4) is a quarter of the kernel basis
        let proj = IntMat::from_rows(&[vec![1, 2]]);
        let v = slice_fiber_volume(&triangle(), &proj, &RatVec::new(vec![rat(1, 2)])).unwrap();
        assert_eq!(v, rat(1, 4));
    }

    #[test]
    fn slice_misses_polytope() {
        let proj = IntMat::from_rows(&[vec![1, 2]]);
        let v = slice_fiber_volume(&triangle(), &proj, &RatVec::from_ints(&[5])).unwrap();
        assert_eq!(v, rat(0, 1));
    }

    #[test]
    fn slice_rejects_rank_deficient_projection() {
        let proj = IntMat::from_rows(&[vec![1, 2], vec![2, 4]]);
        let r = slice_fiber_volume(&triangle(), &proj, &RatVec::from_ints(&[0, 0]));
        assert!(matches!(r, Err(Error::RankDeficientProjection { .. })));
    }

    #[test]
    fn every_vertex_classifies_as_boundary() {
        let p = HPolytope::from_rows(
            &[vec![1, 0], vec![0, 1], vec![-1, -2], vec![-1, 1]],
            &[0, 0, 6, 3],
        );
        let vp = vertices(&p).unwrap();
        assert!(!vp.vertices.is_empty());
        for v in &vp.vertices {
            assert_eq!(contains(&p, v), Location::Boundary);
        }
    }
}
