//! Bessel functions of the first kind and their positive zeros.
//!
//! Integer orders go through [`bessel_j`]. Small arguments use the ascending
//! series; everything else uses Miller's backward recurrence normalized by
//! `J_0(x) + 2 Σ J_{2k}(x) = 1`, which is accurate in the absolute sense for
//! every argument and order in the supported range. Half-integer orders, needed
//! by the odd-dimensional radial kernels, are reached through spherical Bessel
//! functions with the same recurrence idea.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported integer order.
pub const MAX_ORDER: u32 = 64;

const RESCALE_LIMIT: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;

/// Integer Bessel order `0 ≤ ν ≤ 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(nu: u32) -> Result<Self> {
        if nu > MAX_ORDER {
            return Err(Error::Domain(format!(
                "Bessel order {nu} exceeds supported maximum {MAX_ORDER}"
            )));
        }
        Ok(Self(nu))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(nu: u32) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<BesselOrder> for u32 {
    fn from(order: BesselOrder) -> u32 {
        order.0
    }
}

/// `J_ν(x)` for `x ≥ 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "bessel_j requires a finite non-negative argument, got {x}"
        )));
    }
    Ok(jn(order.0, x))
}

/// Unchecked integer-order evaluation; `x` must be finite and non-negative.
pub(crate) fn jn(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if x < 1.0 {
        jn_series(nu, x)
    } else {
        jn_miller(nu, x)
    }
}

fn jn_series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=nu {
        term *= half / f64::from(k);
    }
    let q = -half * half;
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + f64::from(nu)));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// Start index for the backward recurrence: far enough into the region where
/// `J_k(x)` decays super-exponentially.
fn miller_start(nu: u32, x: f64) -> u32 {
    let top = f64::from(nu).max(x);
    let start = (top + 24.0 + 12.0 * x.cbrt()).ceil() as u32;
    start + start % 2
}

fn jn_miller(nu: u32, x: f64) -> f64 {
    let start = miller_start(nu, x);
    let two_over_x = 2.0 / x;
    let mut above = 0.0; // b_{k+1}
    let mut current = 1e-30; // b_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = f64::from(k) * two_over_x * current - above;
        above = current;
        current = below;
        // `current` now holds b_{k-1}.
        let index = k - 1;
        if index == nu {
            wanted = current;
        }
        if index > 0 && index % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_LIMIT {
            current *= RESCALE_FACTOR;
            above *= RESCALE_FACTOR;
            norm *= RESCALE_FACTOR;
            wanted *= RESCALE_FACTOR;
        }
    }
    norm += current;
    wanted / norm
}

/// `J_{l+1/2}(x)` for `x ≥ 0`, via spherical Bessel functions.
pub(crate) fn bessel_j_half(l: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (2.0 * x / PI).sqrt() * spherical_jn(l, x)
}

fn spherical_jn(l: u32, x: f64) -> f64 {
    if x < 1.0 {
        // x^l / (2l+1)!! · Σ (−x²/2)^m / (m! (2l+3)(2l+5)…(2l+2m+1))
        let mut lead = 1.0;
        for k in 1..=l {
            lead *= x / f64::from(2 * k + 1);
        }
        let q = -0.5 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m = 1u32;
        loop {
            term *= q / (f64::from(m) * f64::from(2 * l + 2 * m + 1));
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            m += 1;
        }
        return lead * sum;
    }
    let start = miller_start(l, x);
    let mut above = 0.0;
    let mut current = 1e-30;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = f64::from(2 * k + 1) / x * current - above;
        above = current;
        current = below;
        let index = k - 1;
        if index == l {
            wanted = current;
        }
        if current.abs() > RESCALE_LIMIT {
            current *= RESCALE_FACTOR;
            above *= RESCALE_FACTOR;
            wanted *= RESCALE_FACTOR;
        }
    }
    // b_0 in `current`, b_1 in `above`.
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    if j0.abs() >= j1.abs() {
        wanted * j0 / current
    } else {
        wanted * j1 / above
    }
}

/// Γ(n/2) for a positive integer `n`.
pub(crate) fn gamma_half_integer(n: u32) -> f64 {
    assert!(n > 0, "Γ(0) is undefined");
    if n.is_multiple_of(2) {
        (1..n / 2).fold(1.0, |acc, k| acc * f64::from(k))
    } else {
        let mut value = PI.sqrt();
        let mut k = 1;
        while k < n {
            value *= f64::from(k) / 2.0;
            k += 2;
        }
        value
    }
}

fn derivative(nu: u32, x: f64) -> f64 {
    if nu == 0 {
        -jn(1, x)
    } else {
        jn(nu - 1, x) - f64::from(nu) / x * jn(nu, x)
    }
}

/// `m`-th positive zero `j_{ν,m}` of `J_ν`.
pub fn bessel_zero(order: BesselOrder, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("zero index m must be at least 1".into()));
    }
    let nu = order.0;
    // Consecutive zeros are more than 3 apart, so a 0.25 step never skips one.
    const STEP: f64 = 0.25;
    let mut lo = f64::from(nu).max(0.5);
    let mut f_lo = jn(nu, lo);
    let mut found = 0;
    loop {
        let hi = lo + STEP;
        let f_hi = jn(nu, hi);
        if f_hi == 0.0 {
            found += 1;
            if found == m {
                return Ok(hi);
            }
        } else if f_lo.signum() != f_hi.signum() && f_lo != 0.0 {
            found += 1;
            if found == m {
                return Ok(refine_zero(nu, lo, hi, f_lo));
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
}

fn refine_zero(nu: u32, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo > 1e-13 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        let f_mid = jn(nu, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let polished = x - jn(nu, x) / derivative(nu, x);
    if (lo..=hi).contains(&polished) {
        polished
    } else {
        x
    }
}
