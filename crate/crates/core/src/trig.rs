//! Sine/cosine with explicit reduction of the argument to [0, 2π).

use std::f64::consts::{PI, TAU};

#[inline]
pub(crate) fn reduce(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    reduce(x).sin()
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    reduce(x).cos()
}

/// Distance from `x` to the nearest integer multiple of `period`.
#[inline]
pub(crate) fn dist_to_lattice(x: f64, period: f64) -> f64 {
    let m = x.rem_euclid(period);
    m.min(period - m)
}

/// Distance from `x` to the nearest integer multiple of π.
#[inline]
pub(crate) fn dist_to_pi_lattice(x: f64) -> f64 {
    dist_to_lattice(x, PI)
}
