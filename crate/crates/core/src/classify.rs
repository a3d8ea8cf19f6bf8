//! Harmonicity and degree of the linear `k`-maps.
//!
//! A `k`-map is harmonic exactly when `r(t) = kt` solves its boundary value
//! problem and the tangential part of its tension vanishes. The verdicts
//! below are computed from the closed-form rules per ambient family and then
//! checked against that conjunction.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::actions::{admissible_k, degree_of_k_map, make_action, tangential_vanishes, ActionDescriptor, Space, Tangential};
use crate::error::{Error, Result};
use crate::ode::{closed_tension, BvpSpec, TensionSample};

/// Smallest node count accepted by [`linear_residual_oracle`].
pub const MIN_ORACLE_SAMPLES: usize = 16;

/// Relative threshold (times [`BvpSpec::scale`]) below which the oracle
/// counts `r = kt` as a solution.
pub const ORACLE_THRESHOLD: f64 = 1e-9;

/// Decision for one `(action, k)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicityVerdict {
    pub action: ActionDescriptor,
    pub j: i64,
    pub k: i64,
    pub is_linear_solution: bool,
    pub tangential: Tangential,
    pub harmonic: bool,
    pub degree: i64,
    pub reason: String,
}

/// Closed-form rule for whether `r(t) = kt` solves the `(G, M0, M1, k)`
/// problem: `k = 1`, or `G = 2` and `k = −1`, or `M0 = M1` and `k = 1 − G`.
///
/// The rule does not list `G = 1, k = −1`, yet `r = −t` solves that problem
/// exactly; [`linear_residual_oracle`] reports it.
pub fn is_linear_solution(g: u32, m0: u32, m1: u32, k: i64) -> bool {
    let g = i64::from(g);
    k == 1 || (g == 2 && k == -1) || (m0 == m1 && k == 1 - g)
}

/// Largest `|closed_tension|` of `r = kt` over `samples` Chebyshev nodes
/// of `(0, π/G)`.
pub fn linear_residual_oracle(g: u32, m0: u32, m1: u32, k: i64, samples: usize) -> Result<f64> {
    if samples < MIN_ORACLE_SAMPLES {
        return Err(Error::InvalidSample(format!(
            "oracle needs at least {MIN_ORACLE_SAMPLES} nodes, got {samples}"
        )));
    }
    let spec = BvpSpec::new(g, m0, m1, k)?;
    let half = 0.5 * spec.length();
    let n = samples as f64;
    let kf = k as f64;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = half * (1.0 - ((2 * i + 1) as f64 * std::f64::consts::PI / (2.0 * n)).cos());
        let v = closed_tension(&spec, &TensionSample::linear(kf, t))?;
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

/// Harmonicity rule for each ambient family, in terms of the action's own
/// `g` and multiplicities.
fn rule_harmonic(action: &ActionDescriptor, k: i64) -> bool {
    let g = i64::from(action.g);
    let equal = action.m0 == action.m1;
    match action.space {
        Space::Sphere => k == 1 || (g == 2 && k == -1) || (equal && k == 1 - g),
        Space::OrthogonalGroup => k == 1 || (equal && k == 1 - 2 * g),
        Space::Sp2Lift => k == 1 || k == -5,
    }
}

/// Classifies the `k`-map with `k = j g + 1` on `action`.
///
/// Fails with [`Error::InconsistentVerdict`] if the family rule disagrees
/// with the linear-solution and tangential data.
pub fn is_harmonic_k_map(action: &ActionDescriptor, j: i64) -> Result<HarmonicityVerdict> {
    let k = admissible_k(action, j)?;
    let degree = degree_of_k_map(action, j)?;
    let linear = is_linear_solution(action.bvp_curvatures(), action.m0, action.m1, k);
    let tangential = if k == 1 {
        Tangential::TriviallyIdentity
    } else {
        tangential_vanishes(action)?
    };
    let harmonic = rule_harmonic(action, k);

    let cross = linear && tangential != Tangential::Unresolved;
    if harmonic != cross {
        return Err(Error::InconsistentVerdict(format!(
            "{} ({},{},{}) k={k}: rule says {harmonic}, linear={linear}, tangential={tangential:?}",
            action.ambient_label(),
            action.g,
            action.m0,
            action.m1
        )));
    }
    let reason = match (k == 1, linear, tangential) {
        (true, _, _) => "identity-map",
        (false, true, Tangential::Unresolved) => "tangential-unresolved",
        (false, true, _) => "linear-solution,tangential-vanishing",
        (false, false, _) => "no-linear-solution",
    };
    Ok(HarmonicityVerdict {
        action: action.clone(),
        j,
        k,
        is_linear_solution: linear,
        tangential,
        harmonic,
        degree,
        reason: reason.to_string(),
    })
}

/// Verdicts for every admissible `j` in `jmin..=jmax`.
pub fn classify_range(action: &ActionDescriptor, jmin: i64, jmax: i64) -> Result<Vec<HarmonicityVerdict>> {
    (jmin..=jmax)
        .filter(|&j| action.odd_j_allowed || j % 2 == 0)
        .map(|j| is_harmonic_k_map(action, j))
        .collect()
}

/// The known harmonic non-identity self-maps of orthogonal groups and of
/// `Sp(2)`, each with its degree.
pub fn examples_table() -> Vec<HarmonicityVerdict> {
    let mut entries: Vec<(Space, u32, u32, i64)> = Vec::new();
    for m in 1..=6 {
        entries.push((Space::OrthogonalGroup, 2, m, -2));
    }
    for m in [1, 2, 4, 8] {
        entries.push((Space::OrthogonalGroup, 3, m, -2));
    }
    for (g, ms) in [(4, [1, 2]), (6, [1, 2])] {
        for m in ms {
            entries.push((Space::OrthogonalGroup, g, m, -2));
        }
    }
    entries.push((Space::Sp2Lift, 6, 1, -1));

    entries
        .into_iter()
        .map(|(space, g, m, j)| {
            let action = make_action(space, g, m, m, true).expect("table entries are classified");
            is_harmonic_k_map(&action, j).expect("table entries are admissible")
        })
        .collect()
}

/// Aligned plain-text rendering of a list of verdicts.
pub fn render_text(rows: &[HarmonicityVerdict]) -> String {
    let header = [
        "ambient", "g", "m0", "m1", "j", "k", "linear", "tangential", "harmonic", "degree", "reason",
    ];
    let cells: Vec<[String; 11]> = rows
        .iter()
        .map(|v| {
            [
                v.action.ambient_label(),
                v.action.g.to_string(),
                v.action.m0.to_string(),
                v.action.m1.to_string(),
                v.j.to_string(),
                v.k.to_string(),
                v.is_linear_solution.to_string(),
                format!("{:?}", v.tangential),
                v.harmonic.to_string(),
                v.degree.to_string(),
                v.reason.clone(),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[&str]| {
        let parts: Vec<String> = row
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &cells {
        let refs: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &refs);
    }
    out
}
