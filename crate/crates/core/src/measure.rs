//! Assembly and evaluation of the full fixed-point decomposition.
//!
//! The measure of a compact Hamiltonian torus manifold is the sum of the
//! signed cone measures attached to its fixed points. Grouping summands by
//! the pairing of their base points with a non-generic vector recovers the
//! contribution of each connected zero-set component; from fixed-point data
//! alone connectivity is not observable, so equal pairings are used as a
//! proxy for membership in one component.

use num_traits::Zero;

use crate::cone::{ConeMeasure, DensityValue};
use crate::error::{Error, Result};
use crate::linalg::{RatVec, Rational};
use crate::weights::{FixedPointDatum, PolarizingVector};

/// A finite signed sum of cone measures sharing one torus dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DHMeasure {
    summands: Vec<ConeMeasure>,
    torus_dim: usize,
}

/// Indices of summands whose base points share the same pairing with a
/// grouping vector; the shared pairing is the label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentGroup {
    pub label: Rational,
    pub members: Vec<usize>,
}

/// Per-summand diagnostic row: support membership and the necessary
/// condition `<base, eta> < <b, eta>` for a nonzero contribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportEntry {
    pub summand: usize,
    pub in_support: bool,
    pub pairing_ok: bool,
}

/// Builds one cone measure per fixed-point datum, order preserving.
/// Failures carry the index of the offending datum.
pub fn assemble(data: &[FixedPointDatum], eta: &PolarizingVector) -> Result<DHMeasure> {
    let mut summands = Vec::with_capacity(data.len());
    for (i, datum) in data.iter().enumerate() {
        let cone = ConeMeasure::from_fixed_point(datum, eta).map_err(|e| Error::Summand {
            index: i,
            source: Box::new(e),
        })?;
        summands.push(cone);
    }
    Ok(DHMeasure {
        summands,
        torus_dim: eta.dim(),
    })
}

impl DHMeasure {
    /// The zero measure in a given dimension.
    pub fn empty(torus_dim: usize) -> Self {
        DHMeasure {
            summands: Vec::new(),
            torus_dim,
        }
    }

    pub fn summands(&self) -> &[ConeMeasure] {
        &self.summands
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Flips the sign of one summand; debugging aid so that identity tests
    /// can be shown to fail when the data is corrupted.
    pub fn with_flipped_sign(mut self, index: usize) -> Self {
        let c = self.summands.remove(index);
        self.summands.insert(index, c.with_flipped_sign());
        self
    }

    /// Pointwise density: irregular as soon as any summand sees a wall,
    /// otherwise the exact rational sum of summand densities.
    pub fn eval_density(&self, b: &RatVec) -> DensityValue {
        let mut total = Rational::zero();
        for c in &self.summands {
            let v = c.density(b);
            if !v.regular {
                return DensityValue {
                    value: Rational::zero(),
                    regular: false,
                };
            }
            total += v.value;
        }
        DensityValue {
            value: total,
            regular: true,
        }
    }

    /// Partitions the summands by the pairing of their base points with
    /// `grouping_eta`. Groups are sorted by label; members keep their
    /// original order. Under a vector that is non-generic for the weight
    /// data, each group plays the role of one zero-set component.
    pub fn group_by_eta(&self, grouping_eta: &PolarizingVector) -> Vec<ComponentGroup> {
        let mut groups: Vec<ComponentGroup> = Vec::new();
        for (i, c) in self.summands.iter().enumerate() {
            let label = grouping_eta.pairing_rat(c.base());
            match groups.iter_mut().find(|g| g.label == label) {
                Some(g) => g.members.push(i),
                None => groups.push(ComponentGroup {
                    label,
                    members: vec![i],
                }),
            }
        }
        groups.sort_by(|a, b| a.label.cmp(&b.label));
        groups
    }

    /// The sub-measure formed by one group of summands.
    pub fn group_measure(&self, group: &ComponentGroup) -> DHMeasure {
        DHMeasure {
            summands: group
                .members
                .iter()
                .map(|&i| self.summands[i].clone())
                .collect(),
            torus_dim: self.torus_dim,
        }
    }

    /// Support diagnostics for every summand at a query point, using each
    /// summand's own polarizing vector for the pairing bound.
    pub fn support_report(&self, b: &RatVec) -> Vec<SupportEntry> {
        self.summands
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let eta = c.eta();
                SupportEntry {
                    summand: i,
                    in_support: c.in_support(b),
                    pairing_ok: eta.pairing_rat(c.base()) < eta.pairing_rat(b),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::weights::Weight;

    fn cp2_data() -> Vec<FixedPointDatum> {
        vec![
            FixedPointDatum::new(
                RatVec::from_ints(&[0, 0]),
                vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])],
            ),
            FixedPointDatum::new(
                RatVec::from_ints(&[1, 0]),
                vec![Weight::from_ints(&[-1, 0]), Weight::from_ints(&[-1, 1])],
            ),
            FixedPointDatum::new(
                RatVec::from_ints(&[0, 1]),
                vec![Weight::from_ints(&[0, -1]), Weight::from_ints(&[1, -1])],
            ),
        ]
    }

    fn eta12() -> PolarizingVector {
        PolarizingVector::from_ints(&[1, 2])
    }

    #[test]
    fn empty_data_gives_zero_measure() {
        let m = assemble(&[], &eta12()).unwrap();
        assert!(m.is_empty());
        let v = m.eval_density(&RatVec::from_ints(&[5, 5]));
        assert!(v.regular);
        assert_eq!(v.value, rat(0, 1));
    }

    #[test]
    fn cp2_signs() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let signs: Vec<i8> = m.summands().iter().map(|c| c.sign()).collect();
        assert_eq!(signs, vec![1, -1, 1]);
    }

    #[test]
    fn single_orthant_summand() {
        let data = vec![FixedPointDatum::new(
            RatVec::from_ints(&[0, 0]),
            vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[0, 1])],
        )];
        let m = assemble(&data, &eta12()).unwrap();
        assert_eq!(m.summands().len(), 1);
        let v = m.eval_density(&RatVec::new(vec![rat(2, 3), rat(5, 7)]));
        assert!(v.regular);
        assert_eq!(v.value, rat(1, 1));
    }

    #[test]
    fn assemble_error_carries_index() {
        let mut data = cp2_data();
        // rank-deficient weights: the eta-component cannot be proper
        data.push(FixedPointDatum::new(
            RatVec::from_ints(&[0, 0]),
            vec![Weight::from_ints(&[1, 0]), Weight::from_ints(&[2, 0])],
        ));
        let err = assemble(&data, &eta12()).unwrap_err();
        assert!(matches!(err, Error::Summand { index: 3, .. }));
    }

    #[test]
    fn cp2_density_inside_outside() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let inside = m.eval_density(&RatVec::new(vec![rat(1, 4), rat(1, 4)]));
        assert!(inside.regular);
        assert_eq!(inside.value, rat(1, 1));
        let outside = m.eval_density(&RatVec::new(vec![rat(2, 1), rat(1, 2)]));
        assert!(outside.regular);
        assert_eq!(outside.value, rat(0, 1));
        let far = m.eval_density(&RatVec::from_ints(&[-1, 5]));
        assert!(far.regular);
        assert_eq!(far.value, rat(0, 1));
    }

    #[test]
    fn grouping_by_nongeneric_vector() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let groups = m.group_by_eta(&PolarizingVector::from_ints(&[1, 1]));
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].label, rat(0, 1));
        assert_eq!(groups[0].members, vec![0]);
        assert_eq!(groups[1].label, rat(1, 1));
        assert_eq!(groups[1].members, vec![1, 2]);
    }

    #[test]
    fn grouping_by_generic_vector_is_singletons() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let groups = m.group_by_eta(&PolarizingVector::from_ints(&[2, 5]));
        assert_eq!(groups.len(), 3);
        assert!(groups.iter().all(|g| g.members.len() == 1));
    }

    #[test]
    fn grouped_measure_signed_region() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let groups = m.group_by_eta(&PolarizingVector::from_ints(&[1, 1]));
        let cp1_group = m.group_measure(&groups[1]);
        let v = cp1_group.eval_density(&RatVec::new(vec![rat(1, 2), rat(3, 4)]));
        assert!(v.regular);
        assert_eq!(v.value, rat(-1, 1));
    }

    #[test]
    fn support_report_inside_triangle() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let rep = m.support_report(&RatVec::new(vec![rat(1, 4), rat(1, 4)]));
        let supported: Vec<usize> = rep
            .iter()
            .filter(|e| e.in_support)
            .map(|e| e.summand)
            .collect();
        assert_eq!(supported, vec![0]);
        assert!(rep[0].pairing_ok);
    }

    #[test]
    fn support_report_below_every_base() {
        let m = assemble(&cp2_data(), &eta12()).unwrap();
        let rep = m.support_report(&RatVec::from_ints(&[-5, -5]));
        assert!(rep.iter().all(|e| !e.in_support && !e.pairing_ok));
    }
}
