//! The `(G, M0, M1, k)`-boundary value problem.
//!
//! A `(k, r)`-map has vanishing normal tension exactly when `r` solves
//!
//! ```text
//! 0 = 4 sin²(Gt) r̈ + (G(M0+M1) sin 2Gt + 2G(M0−M1) sin Gt) ṙ
//!     − G(G−2) sin 2(r−t) (M0+M1 + (M0−M1) cos Gt)
//!     − 2G sin(2(r−t)+Gt) ((M0+M1) cos Gt + M0−M1)
//! ```
//!
//! on `]0, π/G[` with `r → 0` at `t = 0` and `r → kπ/G` at `t = π/G`.
//! For a sphere action `G = g`; for the lift to `SO(n+2)` the same problem
//! appears with `G = 2g` once the normal geodesic is run at double speed.
//!
//! Besides this closed form the module evaluates the un-simplified sums over
//! the `G` focal points, which are the independent route used to check the
//! closed form.
//!
//! Scale conventions: [`closed_tension`] equals `4 sin²(Gt)` times the
//! normal tension `τ` of the sphere problem, [`closed_tension_equal_m`] is
//! half of it, [`raw_tension_sphere`] is `τ` itself and [`raw_tension_so`] is
//! `2τ` of the lifted map evaluated at `2t`, which coincides with
//! `raw_tension_sphere` for `2g`. All of them vanish together.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::actions::{admissible_k, ActionDescriptor};
use crate::error::{Error, Result};
use crate::trig::{self, dist_to_lattice};

/// Default distance from the singular set `(π/G)ℤ` below which evaluations
/// are refused.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-8;

/// A concrete boundary value problem on `[0, π/G]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvpSpec {
    /// Curvature count `G` of the problem.
    pub g: u32,
    pub m0: u32,
    pub m1: u32,
    /// Winding target: `r(π/G) = kπ/G`.
    pub k: i64,
    #[serde(default = "default_margin")]
    pub pole_margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_POLE_MARGIN
}

impl BvpSpec {
    /// A problem with arbitrary parameters (no congruence condition on `k`).
    pub fn new(g: u32, m0: u32, m1: u32, k: i64) -> Result<Self> {
        if g == 0 || m0 == 0 || m1 == 0 {
            return Err(Error::InvalidTriple {
                g,
                m0,
                m1,
                rule: "G, M0 and M1 must be positive".into(),
            });
        }
        Ok(Self {
            g,
            m0,
            m1,
            k,
            pole_margin: DEFAULT_POLE_MARGIN,
        })
    }

    /// The problem governing the `k`-map with `k = jg + 1` of `action`.
    pub fn from_action(action: &ActionDescriptor, j: i64) -> Result<Self> {
        let k = admissible_k(action, j)?;
        Self::new(action.bvp_curvatures(), action.m0, action.m1, k)
    }

    pub fn with_pole_margin(mut self, margin: f64) -> Self {
        self.pole_margin = margin;
        self
    }

    /// Right end `π/G` of the domain.
    pub fn length(&self) -> f64 {
        PI / f64::from(self.g)
    }

    /// Required limit `kπ/G` at the right end.
    pub fn target(&self) -> f64 {
        self.k as f64 * self.length()
    }

    /// The boundary targets `(0, kπ/G)`.
    pub fn boundary(&self) -> (f64, f64) {
        (0.0, self.target())
    }

    /// Natural magnitude `4G(M0+M1)(1+|k|)` of the coefficients.
    pub fn scale(&self) -> f64 {
        4.0 * f64::from(self.g) * f64::from(self.m0 + self.m1) * (1.0 + self.k.unsigned_abs() as f64)
    }

    pub fn equal_multiplicities(&self) -> bool {
        self.m0 == self.m1
    }

    fn check_regular(&self, t: f64) -> Result<()> {
        check_regular(t, self.length(), self.pole_margin)
    }
}

fn check_regular(t: f64, period: f64, margin: f64) -> Result<()> {
    if !t.is_finite() || dist_to_lattice(t, period) < margin {
        return Err(Error::PoleProximity { t, margin });
    }
    Ok(())
}

/// Candidate values of `r`, `ṙ`, `r̈` at a parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensionSample {
    pub t: f64,
    pub r: f64,
    pub rdot: f64,
    pub rddot: f64,
}

impl TensionSample {
    pub fn new(t: f64, r: f64, rdot: f64, rddot: f64) -> Self {
        Self { t, r, rdot, rddot }
    }

    /// The linear candidate `r = kt` at `t`.
    pub fn linear(k: f64, t: f64) -> Self {
        Self::new(t, k * t, k, 0.0)
    }
}

/// Coefficients of the closed form at a fixed `t`:
/// `lead·r̈ + damping·ṙ − forcing(r)`.
struct ClosedTerms {
    lead: f64,
    damping: f64,
    sum: f64,
    diff: f64,
    g: f64,
    cos_gt: f64,
    gt: f64,
}

impl ClosedTerms {
    fn at(spec: &BvpSpec, t: f64) -> Self {
        let g = f64::from(spec.g);
        let sum = f64::from(spec.m0 + spec.m1);
        let diff = f64::from(spec.m0) - f64::from(spec.m1);
        let gt = g * t;
        let sin_gt = trig::sin(gt);
        Self {
            lead: 4.0 * sin_gt * sin_gt,
            damping: g * sum * trig::sin(2.0 * gt) + 2.0 * g * diff * sin_gt,
            sum,
            diff,
            g,
            cos_gt: trig::cos(gt),
            gt,
        }
    }

    fn forcing(&self, t: f64, r: f64) -> f64 {
        let twice = 2.0 * (r - t);
        self.g * (self.g - 2.0) * trig::sin(twice) * (self.sum + self.diff * self.cos_gt)
            + 2.0 * self.g * trig::sin(twice + self.gt) * (self.sum * self.cos_gt + self.diff)
    }
}

/// Closed form of the boundary value problem's right-hand side at `s`.
pub fn closed_tension(spec: &BvpSpec, s: &TensionSample) -> Result<f64> {
    spec.check_regular(s.t)?;
    let c = ClosedTerms::at(spec, s.t);
    Ok(c.lead * s.rddot + c.damping * s.rdot - c.forcing(s.t, s.r))
}

/// The equal multiplicity form
/// `2 sin²(Gt) r̈ + mG sin(2Gt) ṙ − mG((G−1) sin 2(r−t) + sin 2(r+(G−1)t))`,
/// which is exactly half of [`closed_tension`].
pub fn closed_tension_equal_m(spec: &BvpSpec, s: &TensionSample) -> Result<f64> {
    if !spec.equal_multiplicities() {
        return Err(Error::UnequalMultiplicities {
            m0: spec.m0,
            m1: spec.m1,
        });
    }
    spec.check_regular(s.t)?;
    let g = f64::from(spec.g);
    let m = f64::from(spec.m0);
    let sin_gt = trig::sin(g * s.t);
    let forcing = (g - 1.0) * trig::sin(2.0 * (s.r - s.t)) + trig::sin(2.0 * (s.r + (g - 1.0) * s.t));
    Ok(2.0 * sin_gt * sin_gt * s.rddot + m * g * trig::sin(2.0 * g * s.t) * s.rdot - m * g * forcing)
}

/// Normal tension as the raw sum over the `g` focal directions,
/// `r̈ + Σ m_i cot(t − iπ/g) ṙ − ½ Σ m_i sin 2(r − iπ/g) / sin²(t − iπ/g)`,
/// where `m_i` is `m0` for even and `m1` for odd `i`.
pub fn raw_tension_sphere(g: u32, m0: u32, m1: u32, s: &TensionSample) -> Result<f64> {
    if g == 0 {
        return Err(Error::InvalidTriple {
            g,
            m0,
            m1,
            rule: "g must be positive".into(),
        });
    }
    let step = PI / f64::from(g);
    check_regular(s.t, step, DEFAULT_POLE_MARGIN)?;
    let mut cot_sum = 0.0;
    let mut sin_sum = 0.0;
    for i in 0..g {
        let m = f64::from(if i % 2 == 0 { m0 } else { m1 });
        let shift = f64::from(i) * step;
        let (sn, cs) = (trig::sin(s.t - shift), trig::cos(s.t - shift));
        cot_sum += m * cs / sn;
        sin_sum += m * trig::sin(2.0 * (s.r - shift)) / (sn * sn);
    }
    Ok(s.rddot + cot_sum * s.rdot - 0.5 * sin_sum)
}

/// Raw sum for the lift of a `(g, m0, m1)`-action to `SO(n+2)` with the
/// normal geodesic reparametrized by a factor 2. This is the sphere sum with
/// `2g` focal directions.
pub fn raw_tension_so(g: u32, m0: u32, m1: u32, s: &TensionSample) -> Result<f64> {
    raw_tension_sphere(2 * g, m0, m1, s)
}

/// `r̈` as a function of `(t, r, ṙ)` obtained by solving the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rhs {
    spec: BvpSpec,
}

/// The explicit second order equation `r̈ = f(t, r, ṙ)` of `spec`.
pub fn rhs(spec: &BvpSpec) -> Rhs {
    Rhs { spec: *spec }
}

impl Rhs {
    pub fn spec(&self) -> &BvpSpec {
        &self.spec
    }

    pub fn eval(&self, t: f64, r: f64, rdot: f64) -> Result<f64> {
        self.spec.check_regular(t)?;
        Ok(self.eval_unchecked(t, r, rdot))
    }

    pub(crate) fn eval_unchecked(&self, t: f64, r: f64, rdot: f64) -> f64 {
        let c = ClosedTerms::at(&self.spec, t);
        (c.forcing(t, r) - c.damping * rdot) / c.lead
    }
}

/// A sampled point `(t, r(t), ṙ(t))` of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub r: f64,
    pub rdot: f64,
}

/// Tension residual and endpoint errors of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub boundary_err: (f64, f64),
}

/// Minimum number of interior samples accepted by [`residual_norm`].
pub const MIN_INTERIOR_SAMPLES: usize = 16;

/// Evaluates [`closed_tension`] along a sampled profile, with `r̈`
/// reconstructed from the sampled `ṙ` by centered second order differences
/// on the (possibly non-uniform) grid. The first and last samples only
/// serve as stencil neighbours.
///
/// The boundary errors extrapolate the end samples with the endpoint
/// linearizations `r ≈ a t` and `r ≈ kπ/G − b(π/G − t)`.
pub fn residual_norm(spec: &BvpSpec, samples: &[ProfileSample]) -> Result<ResidualReport> {
    let interior = samples.len().saturating_sub(2);
    if interior < MIN_INTERIOR_SAMPLES {
        return Err(Error::ProfileTooCoarse { interior });
    }
    let len = spec.length();
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::InvalidProfile("samples must be strictly increasing in t".into()));
    }
    let (first, last) = (samples[0], samples[samples.len() - 1]);
    if !(first.t > 0.0 && last.t < len) {
        return Err(Error::InvalidProfile(format!(
            "samples must lie strictly inside (0, {len})"
        )));
    }

    let mut max_abs = 0.0f64;
    for w in samples.windows(3) {
        let (p, c, n) = (w[0], w[1], w[2]);
        let h1 = c.t - p.t;
        let h2 = n.t - c.t;
        let rddot = -h2 / (h1 * (h1 + h2)) * p.rdot + (h2 - h1) / (h1 * h2) * c.rdot
            + h1 / (h2 * (h1 + h2)) * n.rdot;
        let value = closed_tension(spec, &TensionSample::new(c.t, c.r, c.rdot, rddot))?;
        max_abs = max_abs.max(value.abs());
    }

    let left = (first.r - first.rdot * first.t).abs();
    let right = (last.r + last.rdot * (len - last.t) - spec.target()).abs();
    Ok(ResidualReport {
        max_abs,
        boundary_err: (left, right),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(g: u32, m0: u32, m1: u32, k: i64) -> BvpSpec {
        BvpSpec::new(g, m0, m1, k).unwrap()
    }

    fn interior_ts(spec: &BvpSpec, n: usize) -> Vec<f64> {
        (1..n).map(|i| spec.length() * i as f64 / n as f64).collect()
    }

    #[test]
    fn identity_map_has_zero_tension() {
        let sp = spec(3, 2, 2, 1);
        for t in interior_ts(&sp, 40) {
            let v = closed_tension(&sp, &TensionSample::linear(1.0, t)).unwrap();
            assert!(v.abs() < 1e-13, "t={t} v={v}");
        }
    }

    #[test]
    fn g2_k_minus_one_is_harmonic_with_unequal_multiplicities() {
        let sp = spec(2, 1, 3, -1);
        for t in interior_ts(&sp, 40) {
            let v = closed_tension(&sp, &TensionSample::linear(-1.0, t)).unwrap();
            assert!(v.abs() < 1e-13, "t={t} v={v}");
        }
    }

    #[test]
    fn closed_matches_raw_at_fixed_point() {
        let sp = spec(3, 2, 2, 1);
        let s = TensionSample::new(PI / 6.0, PI / 8.0, 0.5, 0.25);
        let closed = closed_tension(&sp, &s).unwrap();
        let raw = raw_tension_sphere(3, 2, 2, &s).unwrap();
        let lead = 4.0 * (3.0 * s.t).sin().powi(2);
        assert!((closed - lead * raw).abs() < 1e-12 * (1.0 + closed.abs()));
    }

    #[test]
    fn equal_m_form_is_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let g = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=9);
            let sp = spec(g, m, m, 1);
            let t = rng.gen_range(1e-3..sp.length() - 1e-3);
            let s = TensionSample::new(t, rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let full = closed_tension(&sp, &s).unwrap();
            let half = closed_tension_equal_m(&sp, &s).unwrap();
            assert!((2.0 * half - full).abs() <= 1e-12 * (1.0 + full.abs()), "{full} {half}");
        }
    }

    #[test]
    fn equal_m_symmetric_point() {
        let sp = spec(1, 2, 2, 1);
        for a in [-3.0, 0.0, 0.7, 11.0] {
            let v = closed_tension_equal_m(&sp, &TensionSample::new(PI / 2.0, PI / 2.0, a, 0.0)).unwrap();
            assert!(v.abs() < 1e-13);
        }
    }

    #[test]
    fn sp2_minus_five() {
        let sp = spec(6, 1, 1, -5);
        for t in interior_ts(&sp, 30) {
            let v = closed_tension_equal_m(&sp, &TensionSample::linear(-5.0, t)).unwrap();
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn equal_m_rejects_unequal() {
        let sp = spec(2, 1, 3, 1);
        assert!(matches!(
            closed_tension_equal_m(&sp, &TensionSample::linear(1.0, 0.3)),
            Err(Error::UnequalMultiplicities { m0: 1, m1: 3 })
        ));
    }

    #[test]
    fn poles_are_rejected() {
        let sp = spec(3, 2, 2, 1);
        for t in [0.0, sp.length(), 2.0 * sp.length() + 1e-10, -1e-9] {
            assert!(matches!(
                closed_tension(&sp, &TensionSample::linear(1.0, t)),
                Err(Error::PoleProximity { .. })
            ));
            assert!(rhs(&sp).eval(t, t, 1.0).is_err());
        }
        assert!(raw_tension_sphere(4, 1, 1, &TensionSample::linear(1.0, PI / 4.0)).is_err());
        let loose = sp.with_pole_margin(1e-3);
        assert!(closed_tension(&loose, &TensionSample::linear(1.0, 5e-4)).is_err());
    }

    #[test]
    fn raw_single_term() {
        let s = TensionSample::new(0.8, 0.3, 1.2, -0.4);
        let m = 3.0;
        let expect = s.rddot + m * s.t.cos() / s.t.sin() * s.rdot - m / 2.0 * (2.0 * s.r).sin() / s.t.sin().powi(2);
        let got = raw_tension_sphere(1, 3, 3, &s).unwrap();
        assert!((got - expect).abs() < 1e-13);
    }

    #[test]
    fn raw_so_two_terms() {
        let s = TensionSample::new(0.8, 0.3, 1.2, -0.4);
        let m = 2.0;
        let mut expect = s.rddot;
        for shift in [0.0, PI / 2.0] {
            expect += m * (s.t - shift).cos() / (s.t - shift).sin() * s.rdot
                - m / 2.0 * (2.0 * (s.r - shift)).sin() / (s.t - shift).sin().powi(2);
        }
        let got = raw_tension_so(1, 2, 2, &s).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn raw_identity_g2() {
        let v = raw_tension_sphere(2, 1, 3, &TensionSample::new(PI / 4.0, PI / 4.0, 1.0, 0.0)).unwrap();
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn lifted_sum_is_doubled_sphere_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = rng.gen_range(0.01..PI / 6.0 - 0.01);
            let s = TensionSample::new(t, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.1);
            assert_eq!(raw_tension_so(3, 2, 2, &s).unwrap(), raw_tension_sphere(6, 2, 2, &s).unwrap());
        }
    }

    #[test]
    fn rhs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let g = rng.gen_range(1..=12);
            let (m0, m1) = (rng.gen_range(1..=9), rng.gen_range(1..=9));
            let sp = spec(g, m0, m1, 1);
            let t = rng.gen_range(1e-3..sp.length() - 1e-3);
            let (r, rdot) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let rddot = rhs(&sp).eval(t, r, rdot).unwrap();
            let v = closed_tension(&sp, &TensionSample::new(t, r, rdot, rddot)).unwrap();
            let lead = 4.0 * (f64::from(g) * t).sin().powi(2);
            assert!(v.abs() <= 1e-12 * sp.scale() * (1.0 + rdot.abs()) + 1e-12 * lead * rddot.abs(), "{v}");
        }
    }

    #[test]
    fn rhs_vanishes_on_linear_solutions() {
        for (sp, k) in [(spec(2, 1, 3, -1), -1.0), (spec(4, 1, 1, -3), -3.0)] {
            let f = rhs(&sp);
            for t in interior_ts(&sp, 50) {
                assert!(f.eval(t, k * t, k).unwrap().abs() < 1e-11, "t={t}");
            }
        }
    }

    /// With equal multiplicities and k ≡ 1 (mod G) the map
    /// (t, r, ṙ, r̈) ↦ (π/G − t, kπ/G − r, ṙ, −r̈) flips the sign of the tension.
    #[test]
    fn pole_reflection_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let g = rng.gen_range(1..=6u32);
            let m = rng.gen_range(1..=5);
            let j = rng.gen_range(-3..=3i64);
            let sp = spec(g, m, m, j * i64::from(g) + 1);
            let t = rng.gen_range(1e-2..sp.length() - 1e-2);
            let s = TensionSample::new(t, rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let mirrored = TensionSample::new(sp.length() - t, sp.target() - s.r, s.rdot, -s.rddot);
            let a = closed_tension(&sp, &s).unwrap();
            let b = closed_tension(&sp, &mirrored).unwrap();
            assert!((a + b).abs() < 1e-10 * sp.scale(), "{a} {b}");
        }
        // linear harmonic profiles: residual at t and π/G − t agree (both vanish)
        for (g, k) in [(3u32, 1i64), (3, -2), (4, -3)] {
            let sp = spec(g, 2, 2, k);
            for t in interior_ts(&sp, 20) {
                let a = closed_tension(&sp, &TensionSample::linear(k as f64, t)).unwrap();
                let b = closed_tension(&sp, &TensionSample::linear(k as f64, sp.length() - t)).unwrap();
                assert!((a.abs() - b.abs()).abs() < 1e-11);
            }
        }
    }

    fn linear_profile(sp: &BvpSpec, n: usize) -> Vec<ProfileSample> {
        let k = sp.k as f64;
        let eps = 1e-4;
        (0..n)
            .map(|i| {
                let t = eps + (sp.length() - 2.0 * eps) * i as f64 / (n - 1) as f64;
                ProfileSample { t, r: k * t, rdot: k }
            })
            .collect()
    }

    #[test]
    fn residual_of_exact_linear_profile() {
        let sp = spec(2, 1, 3, -1);
        let rep = residual_norm(&sp, &linear_profile(&sp, 65)).unwrap();
        assert!(rep.max_abs <= 1e-10);
        assert!(rep.boundary_err.0 < 1e-14 && rep.boundary_err.1 < 1e-14);
    }

    #[test]
    fn residual_detects_perturbation() {
        let sp = spec(3, 2, 2, 1);
        let g = 3.0;
        let samples: Vec<_> = linear_profile(&sp, 129)
            .into_iter()
            .map(|s| ProfileSample {
                t: s.t,
                r: s.t + 0.01 * (g * s.t).sin(),
                rdot: 1.0 + 0.01 * g * (g * s.t).cos(),
            })
            .collect();
        let rep = residual_norm(&sp, &samples).unwrap();
        assert!(rep.max_abs > 1e-3, "{}", rep.max_abs);
    }

    #[test]
    fn residual_rejects_coarse_and_unordered() {
        let sp = spec(3, 2, 2, 1);
        let coarse = linear_profile(&sp, 17);
        assert!(matches!(residual_norm(&sp, &coarse), Err(Error::ProfileTooCoarse { interior: 15 })));
        assert!(residual_norm(&sp, &linear_profile(&sp, 18)).is_ok());
        let mut bad = linear_profile(&sp, 40);
        bad.swap(3, 4);
        assert!(matches!(residual_norm(&sp, &bad), Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn spec_from_action() {
        use crate::actions::{make_action, Space};
        let so = make_action(Space::OrthogonalGroup, 3, 2, 2, true).unwrap();
        let sp = BvpSpec::from_action(&so, -2).unwrap();
        assert_eq!((sp.g, sp.m0, sp.m1, sp.k), (6, 2, 2, -5));
        assert!((sp.length() - PI / 6.0).abs() < 1e-15);
        assert!(BvpSpec::from_action(&so, 1).is_err());
        assert_eq!(sp.boundary().0, 0.0);
        assert!((sp.boundary().1 + 5.0 * PI / 6.0).abs() < 1e-15);
    }
}
