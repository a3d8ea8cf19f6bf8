//! Classified `(g, m0, m1)`-actions, their `k`-maps and degrees.
//!
//! A cohomogeneity one action on a sphere `S^{n+1}` is described up to orbit
//! equivalence by the number `g` of distinct principal curvatures of its
//! principal orbits and the two alternating multiplicities `m0`, `m1`. The
//! same data describes the lift to `SO(n+2)` and, for `(6, 1, 1)` only, the
//! lift to `Sp(2)`.
//!
//! By convention the normal geodesic starts (`t = 0`) in the non-principal
//! orbit of codimension `m0 + 1`. This only matters for degrees with odd `j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient manifold family of an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// `S^{n+1}`
    Sphere,
    /// `SO(n+2)`, acted on by the lifted action.
    OrthogonalGroup,
    /// `Sp(2)`, the lift of the `(6, 1)`-action on `S^7`.
    Sp2Lift,
}

/// Status of the tangential component of the tension field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tangential {
    /// Vanishes for every `(k, r)`-map.
    Vanishes,
    /// Not determined for this action.
    Unresolved,
    /// The map is the identity, which is harmonic for any metric.
    TriviallyIdentity,
}

const TWO_INEQUIVALENT_NOTE: &str =
    "two orbit-inequivalent (4,2,1)-actions exist; all quantities here depend only on (g,m0,m1)";

/// A `(g, m0, m1)`-action together with its derived data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDescriptor {
    pub space: Space,
    pub g: u32,
    pub m0: u32,
    pub m1: u32,
    pub n: u32,
    pub weyl_order: u32,
    pub codim0: u32,
    pub codim1: u32,
    pub odd_j_allowed: bool,
    pub notes: Option<String>,
}

impl ActionDescriptor {
    /// Dimension `N` of the ambient family member: `n + 1` for `S^{n+1}`,
    /// `n + 2` for `SO(n+2)`; `2` for `Sp(2)`.
    pub fn ambient_index(&self) -> u32 {
        match self.space {
            Space::Sphere => self.n + 1,
            Space::OrthogonalGroup => self.n + 2,
            Space::Sp2Lift => 2,
        }
    }

    /// Human readable name of the ambient manifold, e.g. `SO(10)`.
    pub fn ambient_label(&self) -> String {
        match self.space {
            Space::Sphere => format!("S^{}", self.ambient_index()),
            Space::OrthogonalGroup => format!("SO({})", self.ambient_index()),
            Space::Sp2Lift => "Sp(2)".to_string(),
        }
    }

    /// Curvature count `G` of the boundary value problem governing the
    /// normal tension: `g` for spheres and `Sp(2)`, `2g` for orthogonal
    /// groups (after reparametrizing the normal geodesic by a factor 2).
    pub fn bvp_curvatures(&self) -> u32 {
        match self.space {
            Space::Sphere | Space::Sp2Lift => self.g,
            Space::OrthogonalGroup => 2 * self.g,
        }
    }

    fn swapped_eq(&self, a: u32, b: u32) -> bool {
        (self.m0 == a && self.m1 == b) || (self.m0 == b && self.m1 == a)
    }
}

fn invalid(g: u32, m0: u32, m1: u32, rule: impl Into<String>) -> Error {
    Error::InvalidTriple {
        g,
        m0,
        m1,
        rule: rule.into(),
    }
}

/// Whether `(g, m0, m1)` (in either order of the multiplicities) appears in
/// the classification of cohomogeneity one actions on spheres.
pub fn is_classified(g: u32, m0: u32, m1: u32) -> bool {
    let pair = |a: u32, b: u32| (m0 == a && m1 == b) || (m0 == b && m1 == a);
    let either = |p: &dyn Fn(u32, u32) -> bool| p(m0, m1) || p(m1, m0);
    match g {
        1 => m0 == m1,
        2 => true,
        3 => m0 == m1 && matches!(m0, 1 | 2 | 4 | 8),
        4 => {
            either(&|_, b| b == 1)
                || pair(2, 2)
                || either(&|a, b| a == 2 && b % 2 == 1)
                || either(&|a, b| a == 4 && b % 4 == 3)
                || pair(4, 5)
                || pair(6, 9)
        }
        6 => m0 == m1 && matches!(m0, 1 | 2),
        _ => false,
    }
}

/// Builds an action descriptor.
///
/// In non-strict mode only the structural rules (`g ∈ {1,2,3,4,6}`, equal
/// multiplicities for odd `g`) are enforced so that the boundary value
/// problems can be studied for unlisted triples.
pub fn make_action(space: Space, g: u32, m0: u32, m1: u32, strict: bool) -> Result<ActionDescriptor> {
    if g == 0 || m0 == 0 || m1 == 0 {
        return Err(invalid(g, m0, m1, "g, m0 and m1 must be positive"));
    }
    if !matches!(g, 1 | 2 | 3 | 4 | 6) {
        return Err(invalid(g, m0, m1, "g must be one of 1, 2, 3, 4, 6"));
    }
    if g % 2 == 1 && m0 != m1 {
        return Err(invalid(g, m0, m1, "odd g requires m0 = m1"));
    }
    // (m0 + m1) g is even for every admissible g once odd g forces m0 = m1.
    debug_assert_eq!(((m0 + m1) * g) % 2, 0);
    if strict && !is_classified(g, m0, m1) {
        return Err(invalid(g, m0, m1, "triple is not in the classification list"));
    }
    if space == Space::Sp2Lift && (g, m0, m1) != (6, 1, 1) {
        return Err(Error::InvalidSpace(format!(
            "Sp(2) lift requires (g,m0,m1) = (6,1,1), got ({g},{m0},{m1})"
        )));
    }

    let n = (m0 + m1) * g / 2;
    let weyl_order = match space {
        Space::Sphere | Space::OrthogonalGroup => 2 * g,
        Space::Sp2Lift => 12,
    };
    let notes = if g == 4 && ((m0, m1) == (2, 1) || (m0, m1) == (1, 2)) {
        Some(TWO_INEQUIVALENT_NOTE.to_string())
    } else {
        None
    };
    Ok(ActionDescriptor {
        space,
        g,
        m0,
        m1,
        n,
        weyl_order,
        codim0: m0 + 1,
        codim1: m1 + 1,
        odd_j_allowed: space != Space::OrthogonalGroup,
        notes,
    })
}

/// `k = j g + 1`, provided `j` is allowed for the action.
pub fn admissible_k(action: &ActionDescriptor, j: i64) -> Result<i64> {
    if !action.odd_j_allowed && j.rem_euclid(2) == 1 {
        return Err(Error::InadmissibleJ { j });
    }
    Ok(j * i64::from(action.g) + 1)
}

/// Topological degree of the `k`-map with `k = j g + 1`.
pub fn degree_of_k_map(action: &ActionDescriptor, j: i64) -> Result<i64> {
    let k = admissible_k(action, j)?;
    let c0_odd = action.codim0 % 2 == 1;
    let c1_odd = action.codim1 % 2 == 1;
    let degree = if c0_odd && c1_odd {
        k
    } else if j % 2 == 0 {
        1
    } else if !c0_odd && !c1_odd && !action.weyl_order.is_multiple_of(4) {
        0
    } else if !c0_odd && c1_odd && !action.weyl_order.is_multiple_of(8) {
        -1
    } else {
        1
    };
    Ok(degree)
}

/// Whether the tangential part of the tension field vanishes for all
/// `(k, r)`-maps. Requires a classified triple.
pub fn tangential_vanishes(action: &ActionDescriptor) -> Result<Tangential> {
    let (g, m0, m1) = (action.g, action.m0, action.m1);
    if !is_classified(g, m0, m1) {
        return Err(invalid(g, m0, m1, "triple is not in the classification list"));
    }
    if action.space == Space::Sp2Lift || g != 4 {
        return Ok(Tangential::Vanishes);
    }
    // (4, m0, 1) and (4, 2, 2) are settled; (4, 2, 1) belongs to the first.
    if m0 == 1 || m1 == 1 || action.swapped_eq(2, 2) {
        return Ok(Tangential::Vanishes);
    }
    let family = |a: u32, b: u32| (a == 2 && b % 2 == 1) || (a == 4 && b % 4 == 3);
    let open = family(m0, m1)
        || family(m1, m0)
        || action.swapped_eq(4, 5)
        || action.swapped_eq(6, 9);
    Ok(if open {
        Tangential::Unresolved
    } else {
        Tangential::Vanishes
    })
}

/// Representatives of the classified triples with both multiplicities at
/// most `max_m` and family parameter `ℓ ≤ max_ell`.
///
/// `(2, m0, m1)` is listed for all ordered pairs; the other families in the
/// order they are usually written.
pub fn classified_triples(max_m: u32, max_ell: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        out.push((1, m, m));
    }
    for m0 in 1..=max_m {
        for m1 in 1..=max_m {
            out.push((2, m0, m1));
        }
    }
    for m in [1, 2, 4, 8] {
        if m <= max_m {
            out.push((3, m, m));
        }
    }
    let mut g4 = Vec::new();
    for m0 in 1..=max_m {
        g4.push((4, m0, 1));
    }
    g4.push((4, 2, 2));
    for ell in 0..=max_ell {
        g4.push((4, 2, 2 * ell + 1));
        g4.push((4, 4, 4 * ell + 3));
    }
    g4.push((4, 4, 5));
    g4.push((4, 6, 9));
    for t in g4 {
        if t.1 <= max_m && t.2 <= max_m && !out.contains(&t) {
            out.push(t);
        }
    }
    for m in [1, 2] {
        if m <= max_m {
            out.push((6, m, m));
        }
    }
    out
}
