//! Torus representation data: isotropy weights, polarizing vectors, and
//! fixed-point records.
//!
//! Real weights of a torus representation are defined only up to sign. A
//! polarizing vector `eta` pairs nonzero with every weight and fixes the
//! representative: the polarized weight is the one pairing positively.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot_int, vec_gcd, Int, IntMat, RatVec, Rational};

/// One real isotropy weight, stored as a single signed representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight(pub Vec<Int>);

impl Weight {
    pub fn from_ints(v: &[i64]) -> Self {
        Weight(v.iter().map(|&n| Int::from(n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|n| n.is_zero())
    }

    /// Divides out the gcd of the entries; zero weights are left alone.
    pub fn primitive(&self) -> Weight {
        let g = vec_gcd(&self.0);
        if g.is_zero() {
            return self.clone();
        }
        Weight(self.0.iter().map(|n| n / &g).collect())
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

/// A nonzero vector in the Lie algebra of the torus used to fix weight signs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolarizingVector(Vec<Int>);

impl PolarizingVector {
    pub fn new(entries: Vec<Int>) -> Self {
        assert!(
            entries.iter().any(|n| !n.is_zero()),
            "polarizing vector must be nonzero"
        );
        PolarizingVector(entries)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&n| Int::from(n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Int] {
        &self.0
    }

    pub fn pairing(&self, w: &[Int]) -> Int {
        dot_int(&self.0, w)
    }

    pub fn pairing_rat(&self, v: &RatVec) -> Rational {
        v.dot_int(&self.0)
    }
}

/// Moment value and isotropy weights of one isolated fixed point.
/// The weight list is a multiset; repeats are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointDatum {
    pub moment_value: RatVec,
    pub weights: Vec<Weight>,
}

impl FixedPointDatum {
    pub fn new(moment_value: RatVec, weights: Vec<Weight>) -> Self {
        for w in &weights {
            assert_eq!(w.dim(), moment_value.dim(), "weight dimension mismatch");
            assert!(!w.is_zero(), "isolated fixed point weights must be nonzero");
        }
        FixedPointDatum {
            moment_value,
            weights,
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.moment_value.dim()
    }
}

/// Sign-fixed weights: each column pairs positively with the polarizing
/// vector that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizedWeights {
    /// d x m matrix with the polarized weights as columns.
    pub columns: IntMat,
    pub flip_count: usize,
    /// Orientation sign `(-1)^flip_count` of the associated cone summand.
    pub sign: i8,
}

/// Fixes the sign of every weight so it pairs positively with `eta`.
///
/// Fails with the offending weight when some pairing is zero, i.e. when
/// `eta` is not polarizing for this weight set.
pub fn polarize(weights: &[Weight], eta: &PolarizingVector) -> Result<PolarizedWeights> {
    let dim = eta.dim();
    let mut cols: Vec<Vec<Int>> = Vec::with_capacity(weights.len());
    let mut flips = 0usize;
    for w in weights {
        if w.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: w.dim(),
            });
        }
        let p = eta.pairing(&w.0);
        if p.is_zero() {
            return Err(Error::NonGenericEta {
                weight: w.to_string(),
            });
        }
        if p.is_negative() {
            flips += 1;
            cols.push(w.0.iter().map(|n| -n).collect());
        } else {
            cols.push(w.0.clone());
        }
    }
    Ok(PolarizedWeights {
        columns: IntMat::from_cols(&cols, dim),
        flip_count: flips,
        sign: if flips % 2 == 0 { 1 } else { -1 },
    })
}

/// Value of the model moment map `a + sum_i |v_i|^2 alpha_i` at a point with
/// the given invariant squared norms.
pub fn linear_moment_value(
    a: &RatVec,
    polarized: &PolarizedWeights,
    squared_norms: &[Rational],
) -> Result<RatVec> {
    if squared_norms.len() != polarized.columns.cols() {
        return Err(Error::DimensionMismatch {
            expected: polarized.columns.cols(),
            got: squared_norms.len(),
        });
    }
    let mut out = a.clone();
    for (j, s) in squared_norms.iter().enumerate() {
        if s.is_negative() {
            return Err(Error::NegativeSquaredNorm { index: j });
        }
        let col = polarized.columns.col(j);
        let term = RatVec::new(
            col.iter()
                .map(|n| s * Rational::from_integer(n.clone()))
                .collect(),
        );
        out = out.add(&term);
    }
    Ok(out)
}

/// Result of restricting a fixed-point datum to a subtorus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// The point stays isolated for the subtorus action.
    Isolated(FixedPointDatum),
    /// Some weight restricts to zero: the subtorus fixed set grows beyond the
    /// point and the datum no longer describes it.
    NonIsolated { weight_index: usize },
}

/// Restricts a datum along a subtorus inclusion given by an integer
/// `d x k` matrix of full column rank: the moment value and every weight
/// are pushed through the transpose.
pub fn restrict_to_subtorus(datum: &FixedPointDatum, inclusion: &IntMat) -> Restriction {
    let t = inclusion.transpose();
    let moment = t.mul_vec_rat(&datum.moment_value);
    let mut weights = Vec::with_capacity(datum.weights.len());
    for (i, w) in datum.weights.iter().enumerate() {
        let rw = Weight(t.mul_vec_int(&w.0));
        if rw.is_zero() {
            return Restriction::NonIsolated { weight_index: i };
        }
        weights.push(rw);
    }
    Restriction::Isolated(FixedPointDatum {
        moment_value: moment,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn eta(v: &[i64]) -> PolarizingVector {
        PolarizingVector::from_ints(v)
    }

    #[test]
    fn polarize_keeps_positive_pairings() {
        let ws = vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])];
        let p = polarize(&ws, &eta(&[1, 2])).unwrap();
        assert_eq!(p.columns, IntMat::from_rows(&[vec![1, 0], vec![0, 1]]));
        assert_eq!(p.flip_count, 0);
        assert_eq!(p.sign, 1);
    }

    #[test]
    fn polarize_flips_one() {
        let ws = vec![Weight::from_ints(&[-1, 0]), Weight::from_ints(&[-1, 1])];
        let p = polarize(&ws, &eta(&[1, 2])).unwrap();
        assert_eq!(p.columns, IntMat::from_rows(&[vec![1, -1], vec![0, 1]]));
        assert_eq!(p.flip_count, 1);
        assert_eq!(p.sign, -1);
    }

    #[test]
    fn polarize_rejects_zero_pairing() {
        let ws = vec![Weight::from_ints(&[-1, 1])];
        let err = polarize(&ws, &eta(&[1, 1])).unwrap_err();
        assert!(matches!(err, Error::NonGenericEta { .. }));
        assert!(err.to_string().contains("(-1, 1)"));
    }

    #[test]
    fn moment_value_at_origin_is_a() {
        let ws = vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])];
        let p = polarize(&ws, &eta(&[1, 2])).unwrap();
        let a = RatVec::from_ints(&[0, 0]);
        let v = linear_moment_value(&a, &p, &[rat(0, 1), rat(0, 1)]).unwrap();
        assert_eq!(v, a);
    }

    #[test]
    fn moment_value_direct_substitution() {
        let ws = vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])];
        let p = polarize(&ws, &eta(&[1, 2])).unwrap();
        let v =
            linear_moment_value(&RatVec::from_ints(&[0, 0]), &p, &[rat(1, 1), rat(2, 1)]).unwrap();
        assert_eq!(v, RatVec::from_ints(&[1, 2]));
    }

    #[test]
    fn moment_value_with_flipped_columns() {
        let ws = vec![Weight::from_ints(&[-1, 0]), Weight::from_ints(&[-1, 1])];
        let p = polarize(&ws, &eta(&[1, 2])).unwrap();
        let v =
            linear_moment_value(&RatVec::from_ints(&[1, 0]), &p, &[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(v, RatVec::new(vec![rat(1, 1), rat(1, 2)]));
    }

    #[test]
    fn moment_value_rejects_negative_norm() {
        let ws = vec![Weight::from_ints(&[1, 0])];
        let p = polarize(&ws, &eta(&[1, 0])).unwrap();
        let err = linear_moment_value(&RatVec::from_ints(&[0, 0]), &p, &[rat(-1, 2)]).unwrap_err();
        assert!(matches!(err, Error::NegativeSquaredNorm { index: 0 }));
    }

    #[test]
    fn restriction_identity() {
        let d = FixedPointDatum::new(
            RatVec::from_ints(&[0, 0]),
            vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])],
        );
        match restrict_to_subtorus(&d, &IntMat::identity(2)) {
            Restriction::Isolated(r) => assert_eq!(r, d),
            _ => panic!("identity restriction must stay isolated"),
        }
    }

    #[test]
    fn restriction_to_circle() {
        let d = FixedPointDatum::new(
            RatVec::from_ints(&[0, 0]),
            vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])],
        );
        let iota = IntMat::from_rows(&[vec![1], vec![2]]);
        match restrict_to_subtorus(&d, &iota) {
            Restriction::Isolated(r) => {
                assert_eq!(r.moment_value, RatVec::from_ints(&[0]));
                assert_eq!(
                    r.weights,
                    vec![Weight::from_ints(&[1]), Weight::from_ints(&[2])]
                );
            }
            _ => panic!("restriction along (1,2) must stay isolated"),
        }
    }

    #[test]
    fn restriction_detects_nonisolated() {
        let d = FixedPointDatum::new(
            RatVec::from_ints(&[0, 0]),
            vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])],
        );
        let iota = IntMat::from_rows(&[vec![1], vec![0]]);
        assert_eq!(
            restrict_to_subtorus(&d, &iota),
            Restriction::NonIsolated { weight_index: 1 }
        );
    }
}
