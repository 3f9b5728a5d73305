//! Monte-Carlo estimation of cone measure densities.
//!
//! This is the only module that touches floating point. Points are drawn
//! uniformly from a box `[0, B]^m` in orthant coordinates, pushed through
//! the column matrix, and counted against an axis-aligned window around the
//! query point; the hit rate rescales to an unbiased estimate of the mean
//! unsigned density over the window. The polarizing vector stored in the
//! cone measure bounds every fiber over the window, which is what makes a
//! finite sampling box possible.
//!
//! The generator is xoshiro256** (Blackman-Vigna) seeded through splitmix64,
//! so estimates are bit-reproducible for a fixed seed on every platform.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::cone::ConeMeasure;
use crate::error::{Error, Result};
use crate::linalg::{RatVec, Rational};

/// Small, fast, seedable generator with 256 bits of state.
#[derive(Clone, Debug)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl Xoshiro256StarStar {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut state = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut state);
        }
        Xoshiro256StarStar { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// The axis-aligned box an estimate was averaged over.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// A Monte-Carlo density estimate with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub window: Window,
}

/// Estimates the unsigned density of `c` averaged over the box
/// `[b - h, b + h]^d`. Deterministic for a fixed seed. Fails when a corner
/// or the center of the window lies on a wall (a conservative check; the
/// caller picks windows well inside one chamber).
pub fn estimate_density(
    c: &ConeMeasure,
    b: &RatVec,
    window_halfwidth: f64,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    assert!(
        window_halfwidth.is_finite() && window_halfwidth > 0.0,
        "window halfwidth must be positive"
    );
    assert!(samples > 0, "need at least one sample");
    let d = c.torus_dim();
    assert_eq!(b.dim(), d, "query dimension mismatch");
    let h = Rational::from_float(window_halfwidth).expect("finite halfwidth");

    // a wall hyperplane meets the window iff its functional changes sign
    // (or vanishes) over the corners; linear functionals attain their
    // extrema there, so this test is exact
    if c.is_wall(b) {
        return Err(Error::WindowNotRegular);
    }
    let corners: Vec<RatVec> = (0..(1u32 << d))
        .map(|mask| {
            RatVec::new(
                (0..d)
                    .map(|i| {
                        if mask & (1 << i) != 0 {
                            &b[i] + &h
                        } else {
                            &b[i] - &h
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    for normal in c.wall_covectors() {
        let values: Vec<Rational> = corners
            .iter()
            .map(|corner| corner.sub(c.base()).dot_int(normal))
            .collect();
        let has_nonneg = values.iter().any(|v| !v.is_negative());
        let has_nonpos = values.iter().any(|v| !v.is_positive());
        if has_nonneg && has_nonpos {
            return Err(Error::WindowNotRegular);
        }
    }

    let eta = c.eta();
    let m = c.columns().cols();

    // every fiber over the window satisfies x_i <= S / <col_i, eta>
    let eta_l1: Rational = eta
        .entries()
        .iter()
        .map(|n| Rational::from_integer(n.abs()))
        .sum();
    let slab = eta.pairing_rat(b) - eta.pairing_rat(c.base()) + &h * eta_l1;
    let bound = if slab.is_positive() {
        let mut best = Rational::zero();
        for j in 0..m {
            let p =
                Rational::from_integer(crate::linalg::dot_int(eta.entries(), &c.columns().col(j)));
            let q = &slab / p;
            if q > best {
                best = q;
            }
        }
        best.to_f64().unwrap_or(f64::MAX) * (1.0 + 1e-9) + f64::MIN_POSITIVE
    } else {
        // the window sits below the support; keep a positive box so the
        // sampler still runs and records zero hits
        1.0
    };

    let cols_f: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..m)
                .map(|j| c.columns().get(i, j).to_f64().unwrap())
                .collect()
        })
        .collect();
    let base_f: Vec<f64> = c
        .base()
        .entries()
        .iter()
        .map(|r| r.to_f64().unwrap())
        .collect();
    let b_f: Vec<f64> = b.entries().iter().map(|r| r.to_f64().unwrap()).collect();

    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut hits: u64 = 0;
    let mut x = vec![0.0f64; m];
    for _ in 0..samples {
        for xi in x.iter_mut() {
            *xi = rng.next_f64() * bound;
        }
        let mut inside = true;
        for i in 0..d {
            let mut y = base_f[i];
            for j in 0..m {
                y += cols_f[i][j] * x[j];
            }
            if (y - b_f[i]).abs() > window_halfwidth {
                inside = false;
                break;
            }
        }
        if inside {
            hits += 1;
        }
    }

    // the box measure of the preimage of the window already integrates the
    // lattice-normalized density: sqrt(det C C^T) factors as the image
    // lattice index times the kernel covolume, so no extra index division
    let p_hat = hits as f64 / samples as f64;
    let window_vol = (2.0 * window_halfwidth).powi(d as i32);
    let scale = bound.powi(m as i32) / window_vol;
    let mean = p_hat * scale;
    let stderr = scale * (p_hat * (1.0 - p_hat) / samples as f64).sqrt();

    Ok(MCEstimate {
        mean,
        stderr,
        samples,
        window: Window {
            lo: b_f.iter().map(|v| v - window_halfwidth).collect(),
            hi: b_f.iter().map(|v| v + window_halfwidth).collect(),
        },
    })
}
