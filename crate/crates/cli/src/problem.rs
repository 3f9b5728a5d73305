//! Input file format.
//!
//! Problems are JSON with rationals written as strings like `"p/q"` (floats
//! are never accepted), integer weight vectors, and exactly one data source:
//! explicit fixed points or a moment polytope. When a `subtorus` inclusion
//! is present, `eta` lives in the subtorus Lie algebra and all queries are
//! taken in the lower-dimensional target.

use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use dh_core::linalg::{IntMat, RatVec, Rational};
use dh_core::polytope::HPolytope;
use dh_core::toric::vertex_data;
use dh_core::weights::{
    restrict_to_subtorus, FixedPointDatum, PolarizingVector, Restriction, Weight,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub torus_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<Vec<FixedPointSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeSpec>,
    pub eta: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtorus: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointSpec {
    pub point: Vec<String>,
    pub weights: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<String>,
}

/// A validated problem, ready for computation.
pub struct Problem {
    pub torus_dim: usize,
    pub source: DataSource,
    pub eta: PolarizingVector,
    pub subtorus: Option<IntMat>,
}

pub enum DataSource {
    FixedPoints(Vec<FixedPointDatum>),
    Polytope(HPolytope),
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|e| anyhow!("bad rational {:?}: {}", s, e))
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed problem file")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    pub fn validate(&self) -> Result<Problem> {
        let d = self.torus_dim;
        if d == 0 {
            bail!("torus_dim must be positive");
        }
        let source = match (&self.fixed_points, &self.polytope) {
            (Some(points), None) => {
                let mut data = Vec::with_capacity(points.len());
                for (i, fp) in points.iter().enumerate() {
                    if fp.point.len() != d {
                        bail!("fixed point {i}: moment value has wrong dimension");
                    }
                    let moment = RatVec::new(
                        fp.point
                            .iter()
                            .map(|s| parse_rational(s))
                            .collect::<Result<Vec<_>>>()?,
                    );
                    let mut weights = Vec::with_capacity(fp.weights.len());
                    for w in &fp.weights {
                        if w.len() != d {
                            bail!("fixed point {i}: weight has wrong dimension");
                        }
                        if w.iter().all(|&x| x == 0) {
                            bail!("fixed point {i}: zero weight");
                        }
                        weights.push(Weight::from_ints(w));
                    }
                    data.push(FixedPointDatum::new(moment, weights));
                }
                DataSource::FixedPoints(data)
            }
            (None, Some(poly)) => {
                if poly.normals.len() != poly.offsets.len() {
                    bail!("polytope: one offset per normal required");
                }
                for row in &poly.normals {
                    if row.len() != d {
                        bail!("polytope: normal has wrong dimension");
                    }
                }
                let offsets = RatVec::new(
                    poly.offsets
                        .iter()
                        .map(|s| parse_rational(s))
                        .collect::<Result<Vec<_>>>()?,
                );
                DataSource::Polytope(HPolytope::new(IntMat::from_rows(&poly.normals), offsets))
            }
            (Some(_), Some(_)) => bail!("exactly one of fixed_points and polytope, not both"),
            (None, None) => bail!("one of fixed_points or polytope is required"),
        };

        let subtorus = match &self.subtorus {
            None => None,
            Some(rows) => {
                if rows.len() != d {
                    bail!("subtorus: expected {d} rows");
                }
                let k = rows.first().map(|r| r.len()).unwrap_or(0);
                if k == 0 || rows.iter().any(|r| r.len() != k) {
                    bail!("subtorus: ragged or empty inclusion matrix");
                }
                Some(IntMat::from_rows(rows))
            }
        };

        let target_dim = subtorus.as_ref().map(|m| m.cols()).unwrap_or(d);
        if self.eta.len() != target_dim {
            bail!(
                "eta has dimension {}, expected {} (the {} dimension)",
                self.eta.len(),
                target_dim,
                if subtorus.is_some() {
                    "subtorus"
                } else {
                    "torus"
                }
            );
        }
        if self.eta.iter().all(|&x| x == 0) {
            bail!("eta must be nonzero");
        }

        Ok(Problem {
            torus_dim: d,
            source,
            eta: PolarizingVector::from_ints(&self.eta),
            subtorus,
        })
    }
}

impl Problem {
    /// Fixed-point data in the evaluation torus: read off the polytope when
    /// needed, then restricted along the subtorus inclusion when present.
    pub fn data(&self) -> Result<Vec<FixedPointDatum>> {
        let full = match &self.source {
            DataSource::FixedPoints(data) => data.clone(),
            DataSource::Polytope(p) => {
                vertex_data(p)
                    .map_err(|e| anyhow!("polytope data: {e}"))?
                    .vertex_data
            }
        };
        match &self.subtorus {
            None => Ok(full),
            Some(iota) => {
                let mut out = Vec::with_capacity(full.len());
                for (i, datum) in full.iter().enumerate() {
                    match restrict_to_subtorus(datum, iota) {
                        Restriction::Isolated(r) => out.push(r),
                        Restriction::NonIsolated { weight_index } => bail!(
                            "fixed point {i}: weight {weight_index} restricts to zero; \
                             the subtorus fixed set is not isolated"
                        ),
                    }
                }
                Ok(out)
            }
        }
    }

    /// Dimension of the space queries live in.
    pub fn target_dim(&self) -> usize {
        self.subtorus
            .as_ref()
            .map(|m| m.cols())
            .unwrap_or(self.torus_dim)
    }

    pub fn polytope(&self) -> Option<&HPolytope> {
        match &self.source {
            DataSource::Polytope(p) => Some(p),
            DataSource::FixedPoints(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp2_json() -> String {
        r#"{
            "torus_dim": 2,
            "fixed_points": [
                {"point": ["0", "0"], "weights": [[1, 0], [0, 1]]},
                {"point": ["1", "0"], "weights": [[-1, 0], [-1, 1]]},
                {"point": ["0", "1"], "weights": [[0, -1], [1, -1]]}
            ],
            "eta": [1, 2]
        }"#
        .to_string()
    }

    #[test]
    fn round_trip_preserves_the_spec() {
        let spec = ProblemSpec::from_json(&cp2_json()).unwrap();
        let printed = spec.to_json();
        let reparsed = ProblemSpec::from_json(&printed).unwrap();
        assert_eq!(spec, reparsed);
    }

    #[test]
    fn rejects_double_source() {
        let text = r#"{
            "torus_dim": 2,
            "fixed_points": [],
            "polytope": {"normals": [[1, 0]], "offsets": ["0"]},
            "eta": [1, 2]
        }"#;
        let spec = ProblemSpec::from_json(text).unwrap();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn rejects_zero_eta() {
        let text = r#"{
            "torus_dim": 2,
            "fixed_points": [],
            "eta": [0, 0]
        }"#;
        let spec = ProblemSpec::from_json(text).unwrap();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn rejects_float_rationals() {
        let text = r#"{
            "torus_dim": 1,
            "fixed_points": [{"point": ["0.5"], "weights": [[1]]}],
            "eta": [1]
        }"#;
        let spec = ProblemSpec::from_json(text).unwrap();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn subtorus_changes_target_dimension() {
        let text = r#"{
            "torus_dim": 2,
            "polytope": {
                "normals": [[1, 0], [0, 1], [-1, -1]],
                "offsets": ["0", "0", "1"]
            },
            "eta": [1],
            "subtorus": [[1], [2]]
        }"#;
        let p = ProblemSpec::from_json(text).unwrap().validate().unwrap();
        assert_eq!(p.target_dim(), 1);
        let data = p.data().unwrap();
        assert_eq!(data.len(), 3);
        assert!(data.iter().all(|d| d.torus_dim() == 1));
    }

    #[test]
    fn round_trip_holds_for_random_specs() {
        use dh_core::sampling::Xoshiro256StarStar;
        let mut rng = Xoshiro256StarStar::seed_from_u64(17);
        let mut draw = |lo: i64, hi: i64| lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64;
        for _ in 0..50 {
            let d = draw(1, 3) as usize;
            let use_polytope = draw(0, 1) == 1;
            let rational = |r: &mut dyn FnMut(i64, i64) -> i64| {
                let num = r(-9, 9);
                let den = r(1, 7);
                Rational::new(num.into(), den.into()).to_string()
            };
            let spec = ProblemSpec {
                torus_dim: d,
                fixed_points: if use_polytope {
                    None
                } else {
                    Some(
                        (0..draw(0, 3))
                            .map(|_| FixedPointSpec {
                                point: (0..d).map(|_| rational(&mut draw)).collect(),
                                weights: (0..d)
                                    .map(|_| {
                                        (0..d)
                                            .map(|_| {
                                                let mut w = draw(-4, 4);
                                                if w == 0 {
                                                    w = 1;
                                                }
                                                w
                                            })
                                            .collect()
                                    })
                                    .collect(),
                            })
                            .collect(),
                    )
                },
                polytope: if use_polytope {
                    Some(PolytopeSpec {
                        normals: (0..draw(1, 4))
                            .map(|_| (0..d).map(|_| draw(-3, 3)).collect())
                            .collect(),
                        offsets: (0..0).map(|_| String::new()).collect(),
                    })
                } else {
                    None
                },
                eta: {
                    let mut e: Vec<i64> = (0..d).map(|_| draw(-5, 5)).collect();
                    if e.iter().all(|&x| x == 0) {
                        e[0] = 1;
                    }
                    e
                },
                subtorus: None,
            };
            // keep offsets consistent with normals
            let spec = match spec.polytope {
                Some(mut poly) => {
                    poly.offsets = (0..poly.normals.len())
                        .map(|_| rational(&mut draw))
                        .collect();
                    ProblemSpec {
                        polytope: Some(poly),
                        ..spec
                    }
                }
                None => spec,
            };
            let reparsed = ProblemSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(spec, reparsed);
        }
    }
}
