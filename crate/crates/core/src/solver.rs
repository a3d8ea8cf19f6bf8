//! Double shooting for the singular boundary value problems.
//!
//! Both endpoints of `[0, π/G]` are regular singular points of the equation:
//! near each of them a solution with the required limit is determined by
//! its slope there. The solver starts odd cubic expansions a small distance
//! inside each endpoint, integrates towards an interior matching point and
//! adjusts the two slopes by damped Newton iteration until value and
//! derivative agree at the match.
//!
//! [`sweep`] scans the left slope on a grid and records where the single
//! shot from the left changes the sign of its terminal mismatch; these
//! brackets locate further (typically nonlinear) solutions, which
//! [`solve_all`] refines.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{Dopri5, State, Tolerances};
use crate::ode::{closed_tension, residual_norm, rhs, BvpSpec, ProfileSample, Rhs, TensionSample};

/// Minimum number of points on the output grid of a solution.
pub const MIN_OUTPUT_POINTS: usize = 257;

/// Extra Newton steps taken after re-shooting with refined tolerances.
const POLISH_STEPS: usize = 3;
/// Damping halvings per Newton step.
const MAX_HALVINGS: usize = 20;
/// Largest linear start term `|slope|·eps` as a fraction of the domain.
const MAX_START_FRACTION: f64 = 1e-2;
/// Tolerance tightening used when a profile needs a finer grid.
const REFINE_TOL_FACTOR: f64 = 1e-3;

/// Tuning knobs of the shooting solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    /// Offset from `t = 0` at which the left expansion starts.
    pub eps0: f64,
    /// Offset from `t = π/G` at which the right expansion starts.
    pub eps1: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Interior matching abscissa; `None` means `π/(2G)`.
    pub match_point: Option<f64>,
    /// Slope range of sweeps; `None` means `[−4|k|−4, 4|k|+4]`.
    pub bracket: Option<(f64, f64)>,
    pub sweep_points: usize,
    pub max_newton: usize,
    pub blowup_cap: f64,
    /// Initial size of the output grid.
    pub output_points: usize,
    /// Largest output grid tried while driving the profile residual below
    /// [`ShootingConfig::residual_target`].
    pub max_output_points: usize,
    /// Worker threads for sweeps; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            eps0: 1e-5,
            eps1: 1e-5,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            match_point: None,
            bracket: None,
            sweep_points: 512,
            max_newton: 50,
            blowup_cap: 1e6,
            output_points: MIN_OUTPUT_POINTS,
            max_output_points: 65_537,
            threads: None,
        }
    }
}

impl ShootingConfig {
    pub fn match_point_for(&self, spec: &BvpSpec) -> f64 {
        self.match_point.unwrap_or(0.5 * spec.length())
    }

    pub fn bracket_for(&self, spec: &BvpSpec) -> (f64, f64) {
        self.bracket.unwrap_or_else(|| {
            let w = 4.0 * spec.k.unsigned_abs() as f64 + 4.0;
            (-w, w)
        })
    }

    pub fn validate(&self, spec: &BvpSpec) -> Result<()> {
        let quarter = 0.25 * spec.length();
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.eps0 > 0.0 && self.eps0 < quarter && self.eps1 > 0.0 && self.eps1 < quarter) {
            return bad(format!("eps0 and eps1 must lie in (0, {quarter})"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        let m = self.match_point_for(spec);
        if !(m > self.eps0 && m < spec.length() - self.eps1) {
            return bad(format!("match point {m} outside the integration range"));
        }
        let (lo, hi) = self.bracket_for(spec);
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return bad("bracket must be a nonempty finite interval".into());
        }
        if self.sweep_points < 2 {
            return bad("sweep_points must be at least 2".into());
        }
        if self.max_newton == 0 {
            return bad("max_newton must be positive".into());
        }
        if !(self.blowup_cap > 0.0) {
            return bad("blowup_cap must be positive".into());
        }
        if self.output_points < MIN_OUTPUT_POINTS {
            return bad(format!("output_points must be at least {MIN_OUTPUT_POINTS}"));
        }
        if self.max_output_points < self.output_points {
            return bad("max_output_points must not be below output_points".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            blowup_cap: self.blowup_cap,
        }
    }

    /// Profile residual the dense output aims for.
    pub fn residual_target(spec: &BvpSpec) -> f64 {
        1e-7 * (1.0 + spec.k.unsigned_abs() as f64)
    }

    fn refined(&self) -> Self {
        Self {
            rel_tol: (self.rel_tol * REFINE_TOL_FACTOR).max(1e-14),
            abs_tol: (self.abs_tol * REFINE_TOL_FACTOR).max(1e-16),
            ..self.clone()
        }
    }

    /// Largest profile residual a returned solution may carry.
    pub fn residual_bound(spec: &BvpSpec) -> f64 {
        1e-6 * (1.0 + spec.k.unsigned_abs() as f64)
    }

    /// Whether slopes `(a, b)` keep the endpoint expansions in their range
    /// of validity.
    fn resolves(&self, spec: &BvpSpec, a: f64, b: f64) -> bool {
        let limit = MAX_START_FRACTION * spec.length();
        a.abs() * self.eps0 <= limit && b.abs() * self.eps1 <= limit
    }

    /// Convergence threshold of the match gap for `spec`.
    pub fn gap_tolerance(spec: &BvpSpec) -> f64 {
        1e-9 * (1.0 + spec.k.unsigned_abs() as f64)
    }
}

/// Which singular endpoint an expansion starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    Left,
    Right,
}

/// Starting data `r ≈ r_p + s(t−p) + c(t−p)³` near an endpoint `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStart {
    pub t: f64,
    pub r: f64,
    pub rdot: f64,
    /// The cubic coefficient `c`.
    pub cubic: f64,
    /// `|closed_tension|` of the expansion at the start point.
    pub consistency: f64,
}

/// Starting data at distance `eps` from the given endpoint for slope
/// `slope`.
///
/// The cubic coefficient is found numerically from the equation itself:
/// the residual `f(t, r, ṙ) − r̈` of the cubic at `t = p ± 2 eps` is affine
/// in `c` to leading order, and a short secant iteration solves it. This
/// keeps the expansion independent of the particular `(G, M0, M1)`.
pub fn series_start(spec: &BvpSpec, endpoint: Endpoint, slope: f64, eps: f64) -> SeriesStart {
    let f = rhs(spec);
    let (p, value, dir) = match endpoint {
        Endpoint::Left => (0.0, 0.0, 1.0),
        Endpoint::Right => (spec.length(), spec.target(), -1.0),
    };
    let cubic_at = |d: f64, c: f64| (value + slope * d + c * d * d * d, slope + 3.0 * c * d * d);

    let d_fit = 2.0 * eps * dir;
    let residual = |c: f64| {
        let (r, rdot) = cubic_at(d_fit, c);
        f.eval_unchecked(p + d_fit, r, rdot) - 6.0 * c * d_fit
    };
    let (mut c0, mut c1) = (0.0, 1.0);
    let (mut g0, mut g1) = (residual(c0), residual(c1));
    for _ in 0..3 {
        let denom = g1 - g0;
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let c2 = c1 - g1 * (c1 - c0) / denom;
        if !c2.is_finite() {
            break;
        }
        (c0, g0) = (c1, g1);
        c1 = c2;
        g1 = residual(c1);
        if (c1 - c0).abs() <= 1e-12 * (1.0 + c1.abs()) {
            break;
        }
    }
    let cubic = if c1.is_finite() { c1 } else { 0.0 };

    let d = eps * dir;
    let (r, rdot) = cubic_at(d, cubic);
    let t = p + d;
    let consistency = closed_tension(spec, &TensionSample::new(t, r, rdot, 6.0 * cubic * d))
        .map(f64::abs)
        .unwrap_or(f64::INFINITY);
    let bound = 10.0 * eps * spec.scale() * (1.0 + slope.abs());
    if !(consistency <= bound) {
        log::warn!(
            "series start at {endpoint:?} for (G={}, M0={}, M1={}, k={}) is inconsistent: |tension| = {consistency:e} exceeds {bound:e}",
            spec.g,
            spec.m0,
            spec.m1,
            spec.k
        );
    }
    SeriesStart {
        t,
        r,
        rdot,
        cubic,
        consistency,
    }
}

type Field = Box<dyn Fn(f64, &State) -> State + Send + Sync>;

fn field(f: Rhs) -> Field {
    Box::new(move |t, y: &State| [y[1], f.eval_unchecked(t, y[0], y[1])])
}

fn integrator(spec: &BvpSpec, config: &ShootingConfig, start: &SeriesStart, eps: f64) -> Dopri5<Field> {
    Dopri5::new(
        field(rhs(spec)),
        config.tolerances(),
        start.t,
        [start.r, start.rdot],
        0.1 * eps,
    )
}

fn left_start(spec: &BvpSpec, config: &ShootingConfig, a: f64) -> SeriesStart {
    series_start(spec, Endpoint::Left, a, config.eps0)
}

fn right_start(spec: &BvpSpec, config: &ShootingConfig, b: f64) -> SeriesStart {
    series_start(spec, Endpoint::Right, b, config.eps1)
}

/// Value and derivative mismatch at the matching point for the left slope
/// `a` and the right slope `b`.
pub fn shoot(spec: &BvpSpec, config: &ShootingConfig, a: f64, b: f64) -> Result<(f64, f64)> {
    config.validate(spec)?;
    shoot_unchecked(spec, config, a, b)
}

fn shoot_unchecked(spec: &BvpSpec, config: &ShootingConfig, a: f64, b: f64) -> Result<(f64, f64)> {
    let m = config.match_point_for(spec);
    let mut left = integrator(spec, config, &left_start(spec, config, a), config.eps0);
    left.advance_to(m)?;
    let mut right = integrator(spec, config, &right_start(spec, config, b), config.eps1);
    right.advance_to(m)?;
    Ok((left.y[0] - right.y[0], left.y[1] - right.y[1]))
}

/// A solution sampled on a uniform grid over `[eps0, π/G − eps1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionProfile {
    pub spec: BvpSpec,
    pub samples: Vec<ProfileSample>,
    /// Left slope `a`: `r ≈ a t` near `0`.
    pub slope0: f64,
    /// Right slope `b`: `r ≈ kπ/G − b(π/G − t)` near `π/G`.
    pub slope1: f64,
    pub match_gap: (f64, f64),
    /// Largest interior `|closed_tension|` along the samples.
    pub residual: f64,
    pub boundary_err: (f64, f64),
    pub iterations: usize,
}

impl SolutionProfile {
    /// `max |r(t) − kt|` over the samples.
    pub fn max_linear_deviation(&self) -> f64 {
        let k = self.spec.k as f64;
        self.samples
            .iter()
            .map(|s| (s.r - k * s.t).abs())
            .fold(0.0, f64::max)
    }
}

fn norm((x, y): (f64, f64)) -> f64 {
    x.hypot(y)
}

/// Solves the problem by damped Newton iteration on the two slopes,
/// starting from `init` or from `(k, k)`.
///
/// Fails with [`Error::ResidualTooLarge`] when the slopes converge but the
/// dense profile still misses [`ShootingConfig::residual_bound`].
pub fn solve(spec: &BvpSpec, config: &ShootingConfig, init: Option<(f64, f64)>) -> Result<SolutionProfile> {
    config.validate(spec)?;
    let tol = ShootingConfig::gap_tolerance(spec);
    let (mut a, mut b) = init.unwrap_or((spec.k as f64, spec.k as f64));
    let mut gap = shoot_unchecked(spec, config, a, b)?;
    let mut iterations = 0;

    while norm(gap) > tol {
        if iterations == config.max_newton {
            return Err(no_convergence(iterations, a, b, gap));
        }
        iterations += 1;
        (a, b, gap) = newton_step(spec, config, a, b, gap).ok_or_else(|| no_convergence(iterations, a, b, gap))?;
    }
    let mut samples = dense_profile(spec, config, a, b, config.output_points)?;
    let mut report = residual_norm(spec, &samples)?;
    let target = ShootingConfig::residual_target(spec);
    if report.max_abs > target && config.max_output_points > config.output_points {
        // Steep profiles: resolve the finite differences on a finer grid
        // integrated with tighter tolerances.
        let fine = config.refined();
        if let Ok(g) = shoot_unchecked(spec, &fine, a, b) {
            gap = g;
            polish(spec, &fine, &mut a, &mut b, &mut gap);
        }
        let mut n = config.output_points;
        while report.max_abs > target && n < config.max_output_points {
            n = (2 * n - 1).min(config.max_output_points);
            samples = dense_profile(spec, &fine, a, b, n)?;
            report = residual_norm(spec, &samples)?;
        }
    }
    let bound = ShootingConfig::residual_bound(spec);
    if !(report.max_abs <= bound) {
        return Err(Error::ResidualTooLarge {
            residual: report.max_abs,
            bound,
            a,
            b,
        });
    }
    Ok(SolutionProfile {
        spec: *spec,
        samples,
        slope0: a,
        slope1: b,
        match_gap: gap,
        residual: report.max_abs,
        boundary_err: report.boundary_err,
        iterations,
    })
}

/// Further Newton steps while they keep shrinking the gap.
fn polish(spec: &BvpSpec, config: &ShootingConfig, a: &mut f64, b: &mut f64, gap: &mut (f64, f64)) {
    for _ in 0..POLISH_STEPS {
        match newton_step(spec, config, *a, *b, *gap) {
            Some(next) => (*a, *b, *gap) = next,
            None => break,
        }
    }
}

/// One damped Newton step; `None` when no step length reduces the gap.
fn newton_step(
    spec: &BvpSpec,
    config: &ShootingConfig,
    a: f64,
    b: f64,
    gap: (f64, f64),
) -> Option<(f64, f64, (f64, f64))> {
    let da = 1e-6 * (1.0 + a.abs());
    let db = 1e-6 * (1.0 + b.abs());
    let ga = shoot_unchecked(spec, config, a + da, b).ok()?;
    let gb = shoot_unchecked(spec, config, a, b + db).ok()?;
    let j = [
        [(ga.0 - gap.0) / da, (gb.0 - gap.0) / db],
        [(ga.1 - gap.1) / da, (gb.1 - gap.1) / db],
    ];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let step_a = -(j[1][1] * gap.0 - j[0][1] * gap.1) / det;
    let step_b = -(-j[1][0] * gap.0 + j[0][0] * gap.1) / det;

    let mut lambda = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let (na, nb) = (a + lambda * step_a, b + lambda * step_b);
        if !config.resolves(spec, na, nb) {
            lambda *= 0.5;
            continue;
        }
        if let Ok(ng) = shoot_unchecked(spec, config, na, nb) {
            if norm(ng) < norm(gap) {
                return Some((na, nb, ng));
            }
        }
        lambda *= 0.5;
    }
    None
}

fn no_convergence(iterations: usize, a: f64, b: f64, gap: (f64, f64)) -> Error {
    Error::NoConvergence {
        iterations,
        a,
        b,
        value_gap: gap.0,
        deriv_gap: gap.1,
    }
}

fn dense_profile(spec: &BvpSpec, config: &ShootingConfig, a: f64, b: f64, n: usize) -> Result<Vec<ProfileSample>> {
    let (lo, hi) = (config.eps0, spec.length() - config.eps1);
    let m = config.match_point_for(spec);
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();
    let split = grid.partition_point(|&t| t <= m);

    let mut samples = Vec::with_capacity(n);
    let mut left = integrator(spec, config, &left_start(spec, config, a), config.eps0);
    for &t in &grid[..split] {
        left.advance_to(t)?;
        samples.push(ProfileSample {
            t,
            r: left.y[0],
            rdot: left.y[1],
        });
    }
    let mut right = integrator(spec, config, &right_start(spec, config, b), config.eps1);
    let mut tail = Vec::with_capacity(n - split);
    for &t in grid[split..].iter().rev() {
        right.advance_to(t)?;
        tail.push(ProfileSample {
            t,
            r: right.y[0],
            rdot: right.y[1],
        });
    }
    samples.extend(tail.into_iter().rev());
    Ok(samples)
}

/// One grid point of a slope sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub a: f64,
    /// Whether the gap changes sign between the previous grid point and
    /// this one.
    pub sign_change: bool,
    /// Terminal mismatch `r(T) + ṙ(T) eps1 − kπ/G` at `T = π/G − eps1`, or
    /// `±∞` for escaped trajectories, `NaN` if integration stalled.
    pub gap: f64,
    pub escaped: bool,
}

/// Terminal mismatch of the single shot from the left with slope `a`,
/// together with an estimate of the right slope taken well before the end.
fn single_shot(spec: &BvpSpec, config: &ShootingConfig, a: f64) -> (f64, bool, Option<f64>) {
    let len = spec.length();
    let end = len - config.eps1;
    let probe = len - 0.125 * len;
    let target = spec.target();
    let mut ig = integrator(spec, config, &left_start(spec, config, a), config.eps0);
    let mut slope_estimate = None;
    let outcome = ig.advance_to(probe).and_then(|()| {
        // r ≈ target − b u − c u³ and ṙ ≈ b + 3 c u² with u = len − probe
        let u = len - probe;
        slope_estimate = Some(0.5 * (3.0 * (target - ig.y[0]) / u - ig.y[1]));
        ig.advance_to(end)
    });
    match outcome {
        Ok(()) => {
            let [r, rdot] = ig.y;
            (r + rdot * config.eps1 - target, false, slope_estimate)
        }
        // Escapes count on the side of the target where r was when the cap was hit.
        Err(Error::TrajectoryEscaped { r, .. }) => (f64::INFINITY.copysign(r - target), true, slope_estimate),
        Err(_) => (f64::NAN, false, slope_estimate),
    }
}

fn sign_differs(x: f64, y: f64) -> bool {
    !x.is_nan() && !y.is_nan() && (x > 0.0) != (y > 0.0)
}

/// Scans `sweep_points` equally spaced left slopes over the bracket
/// (endpoints included) and flags sign changes of the terminal mismatch.
/// Grid points are evaluated in parallel; the result is ordered by `a`.
pub fn sweep(spec: &BvpSpec, config: &ShootingConfig) -> Result<Vec<SweepRecord>> {
    config.validate(spec)?;
    let (lo, hi) = config.bracket_for(spec);
    let n = config.sweep_points;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();
    let eval = || -> Vec<(f64, bool)> {
        grid.par_iter()
            .map(|&a| {
                let (gap, escaped, _) = single_shot(spec, config, a);
                (gap, escaped)
            })
            .collect()
    };
    let values = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(eval),
        None => eval(),
    };
    let mut out = Vec::with_capacity(n);
    for (i, (&a, &(gap, escaped))) in grid.iter().zip(&values).enumerate() {
        let sign_change = i > 0 && sign_differs(values[i - 1].0, gap);
        out.push(SweepRecord {
            a,
            sign_change,
            gap,
            escaped,
        });
    }
    Ok(out)
}

/// Consecutive slope pairs `(a_lo, a_hi)` across which a sweep changes sign.
pub fn brackets(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    records
        .windows(2)
        .filter(|w| w[1].sign_change)
        .map(|w| (w[0].a, w[1].a))
        .collect()
}

/// Bisects the single-shot mismatch on a sign-change bracket.
fn refine_bracket(spec: &BvpSpec, config: &ShootingConfig, (mut lo, mut hi): (f64, f64)) -> f64 {
    let mut g_lo = single_shot(spec, config, lo).0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let g_mid = single_shot(spec, config, mid).0;
        if g_mid == 0.0 {
            return mid;
        }
        if sign_differs(g_lo, g_mid) {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
        if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Sweeps the bracket, refines every sign change independently and
/// polishes it with [`solve`]. Converged solutions are returned ordered by
/// `|a − k|`; duplicates (slopes within `1e-6`) are reported once.
pub fn solve_all(spec: &BvpSpec, config: &ShootingConfig) -> Result<Vec<SolutionProfile>> {
    let records = sweep(spec, config)?;
    let mut found: Vec<SolutionProfile> = Vec::new();
    for br in brackets(&records) {
        let a = refine_bracket(spec, config, br);
        let estimate = single_shot(spec, config, a).2;
        // Right slope candidates: the single-shot estimate, the symmetric
        // guess b = a, and the linear guess b = k.
        let candidates = estimate.into_iter().chain([a, spec.k as f64]);
        let mut last_err = None;
        for b in candidates {
            match solve(spec, config, Some((a, b))) {
                Ok(p) => {
                    if !found.iter().any(|q| (q.slope0 - p.slope0).abs() < 1e-6) {
                        found.push(p);
                    }
                    last_err = None;
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        if let Some(e) = last_err {
            log::debug!("bracket {br:?} did not refine: {e}");
        }
    }
    let k = spec.k as f64;
    found.sort_by(|p, q| (p.slope0 - k).abs().total_cmp(&(q.slope0 - k).abs()));
    Ok(found)
}
