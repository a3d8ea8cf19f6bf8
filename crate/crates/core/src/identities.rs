//! Numerical checks of the trigonometric identities that turn the focal
//! sums of the normal tension into the closed form of the boundary value
//! problem.
//!
//! Every check returns both sides of the identity; agreement is measured in
//! the mixed metric `|lhs − rhs| / (1 + |lhs|)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::DEFAULT_POLE_MARGIN;
use crate::trig::{self, dist_to_pi_lattice};

/// Default seed of [`check_suite`].
pub const DEFAULT_SEED: u64 = 0x5eed_c0c1;

/// Arguments of the two-parameter identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentitySample {
    pub g: u32,
    pub r: f64,
    pub t: f64,
    pub margin: f64,
}

impl IdentitySample {
    pub fn new(g: u32, r: f64, t: f64) -> Self {
        Self {
            g,
            r,
            t,
            margin: DEFAULT_POLE_MARGIN,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    /// `true` if every `t − iπ/g` keeps the margin from `πℤ`.
    pub fn is_regular(&self) -> bool {
        self.g > 0 && is_regular(self.g, self.t, self.margin)
    }

    fn check(&self) -> Result<()> {
        check(self.g, self.t, self.margin)
    }
}

fn is_regular(g: u32, t: f64, margin: f64) -> bool {
    t.is_finite() && (0..g).all(|i| dist_to_pi_lattice(t - shift(g, i)) >= margin)
}

fn check(g: u32, t: f64, margin: f64) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidSample("g must be positive".into()));
    }
    if !is_regular(g, t, margin) {
        return Err(Error::PoleProximity { t, margin });
    }
    Ok(())
}

#[inline]
fn shift(g: u32, i: u32) -> f64 {
    f64::from(i) * PI / f64::from(g)
}

/// Both sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    /// `|lhs − rhs| / (1 + |lhs|)`.
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs() / (1.0 + self.lhs.abs())
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.deviation() <= tol
    }
}

/// `Σ sin²(r − iπ/g)/sin²(t − iπ/g) · sin² gt` against
/// `g((g−1) sin²(r−t) + sin²(r+(g−1)t))`.
pub fn lemma_sin_sq(s: &IdentitySample) -> Result<Sides> {
    s.check()?;
    let g = f64::from(s.g);
    let sin_gt = trig::sin(g * s.t);
    let lhs: f64 = (0..s.g)
        .map(|i| {
            let d = shift(s.g, i);
            (trig::sin(s.r - d) / trig::sin(s.t - d)).powi(2)
        })
        .sum::<f64>()
        * sin_gt
        * sin_gt;
    let rhs = g * ((g - 1.0) * trig::sin(s.r - s.t).powi(2) + trig::sin(s.r + (g - 1.0) * s.t).powi(2));
    Ok(Sides { lhs, rhs })
}

/// The `r`-derivative of [`lemma_sin_sq`]:
/// `Σ sin 2(r − iπ/g)/sin²(t − iπ/g) · sin² gt` against
/// `g((g−1) sin 2(r−t) + sin 2(r+(g−1)t))`.
pub fn lemma_sin_2r(s: &IdentitySample) -> Result<Sides> {
    s.check()?;
    let g = f64::from(s.g);
    let sin_gt = trig::sin(g * s.t);
    let lhs: f64 = (0..s.g)
        .map(|i| {
            let d = shift(s.g, i);
            trig::sin(2.0 * (s.r - d)) / trig::sin(s.t - d).powi(2)
        })
        .sum::<f64>()
        * sin_gt
        * sin_gt;
    let rhs = g * ((g - 1.0) * trig::sin(2.0 * (s.r - s.t)) + trig::sin(2.0 * (s.r + (g - 1.0) * s.t)));
    Ok(Sides { lhs, rhs })
}

fn cot(x: f64) -> f64 {
    trig::cos(x) / trig::sin(x)
}

/// `g cot(gt)` against `Σ cot(t − iπ/g)`.
pub fn cotangent_identity(g: u32, t: f64) -> Result<Sides> {
    check(g, t, DEFAULT_POLE_MARGIN)?;
    let lhs = f64::from(g) * cot(f64::from(g) * t);
    let rhs = (0..g).map(|i| cot(t - shift(g, i))).sum();
    Ok(Sides { lhs, rhs })
}

/// The alternating cotangent sum for even `g` and its split form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSides {
    pub direct: f64,
    pub split: f64,
}

impl SplitSides {
    pub fn deviation(&self) -> f64 {
        (self.direct - self.split).abs() / (1.0 + self.direct.abs())
    }
}

/// `Σ m_i cot(t − iπ/g)` (alternating `m0`, `m1`) against
/// `(g/2)((m0+m1) cot gt + (m0−m1)/sin gt)`; `g` must be even.
pub fn half_sum_split(g: u32, m0: u32, m1: u32, t: f64) -> Result<SplitSides> {
    if g % 2 == 1 {
        return Err(Error::OddG { g });
    }
    check(g, t, DEFAULT_POLE_MARGIN)?;
    let direct = (0..g)
        .map(|i| f64::from(if i % 2 == 0 { m0 } else { m1 }) * cot(t - shift(g, i)))
        .sum();
    let gf = f64::from(g);
    let split = gf / 2.0
        * (f64::from(m0 + m1) * cot(gf * t) + (f64::from(m0) - f64::from(m1)) / trig::sin(gf * t));
    Ok(SplitSides { direct, split })
}

/// Worst mixed deviation of each identity over a random sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub samples: usize,
    pub g_max: u32,
    pub seed: u64,
    pub margin: f64,
    pub tolerance: f64,
    pub lemma_sin_sq: f64,
    pub lemma_sin_2r: f64,
    pub cotangent_identity: f64,
    pub half_sum_split: f64,
    pub passed: bool,
}

/// Mixed tolerance of the identity suite.
pub const SUITE_TOLERANCE: f64 = 1e-10;

/// Evaluates all four identities on `samples` seeded random points with
/// `g ∈ {1, …, g_max}` and `r, t` uniform in `(0, π)`; points closer than
/// `margin` to a pole are redrawn. The half-sum split draws even `g` only
/// (from `{2, 4, …}`, at least 2) and multiplicities in `{1, …, 9}`.
pub fn check_suite(g_max: u32, samples: usize, seed: u64, margin: f64) -> Result<SuiteReport> {
    if g_max == 0 {
        return Err(Error::InvalidSample("g_max must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let even_max = (g_max / 2).max(1);
    let mut worst = [0.0f64; 4];
    for _ in 0..samples {
        let g = rng.gen_range(1..=g_max);
        let s = loop {
            let s = IdentitySample::new(g, rng.gen_range(0.0..PI), rng.gen_range(0.0..PI)).with_margin(margin);
            if s.is_regular() {
                break s;
            }
        };
        worst[0] = worst[0].max(lemma_sin_sq(&s)?.deviation());
        worst[1] = worst[1].max(lemma_sin_2r(&s)?.deviation());
        worst[2] = worst[2].max(cotangent_identity(g, s.t)?.deviation());

        let ge = 2 * rng.gen_range(1..=even_max);
        let (m0, m1) = (rng.gen_range(1..=9), rng.gen_range(1..=9));
        let t = loop {
            let t = rng.gen_range(0.0..PI);
            if is_regular(ge, t, margin) {
                break t;
            }
        };
        worst[3] = worst[3].max(half_sum_split(ge, m0, m1, t)?.deviation());
    }
    Ok(SuiteReport {
        samples,
        g_max,
        seed,
        margin,
        tolerance: SUITE_TOLERANCE,
        lemma_sin_sq: worst[0],
        lemma_sin_2r: worst[1],
        cotangent_identity: worst[2],
        half_sum_split: worst[3],
        passed: worst.iter().all(|&w| w <= SUITE_TOLERANCE),
    })
}
