//! Test-side oracles, independent of the library's special functions.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

const FRAC: u32 = 480;

fn to_fixed(x: f64) -> BigInt {
    assert!(x.is_finite() && x >= 0.0);
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, exp) = if exp == 0 { (bits & ((1 << 52) - 1), -1074) } else { ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075) };
    let shift = FRAC as i64 + exp;
    let m = BigInt::from(mantissa);
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn from_fixed(v: &BigInt) -> f64 {
    // Split so that neither factor overflows or underflows.
    let hi: BigInt = v >> (FRAC / 2) as usize;
    hi.to_f64().unwrap() * 2f64.powi(-((FRAC / 2) as i32))
}

/// `J_ν(x)` from the full ascending series in 480-bit fixed point, summed
/// until the terms vanish at that precision.
pub fn bessel_series(nu: u32, x: f64) -> f64 {
    let one = BigInt::from(1) << FRAC as usize;
    let half = to_fixed(x) >> 1usize;
    let h2: BigInt = (&half * &half) >> FRAC as usize;
    let mut term = one.clone();
    for i in 1..=nu {
        term = (&term * &half) >> FRAC as usize;
        term /= i;
    }
    let mut sum = term.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = (&term * &h2) >> FRAC as usize;
        term /= k * (k + nu as u64);
        term = -term;
        sum += &term;
        if term.abs().is_zero() || (term.abs() < BigInt::from(1) && k as f64 > x) {
            break;
        }
    }
    from_fixed(&sum)
}

/// Positive zero of the series oracle in `[a, b]` by bisection.
pub fn series_zero(nu: u32, mut a: f64, mut b: f64) -> f64 {
    let mut fa = bessel_series(nu, a);
    assert!(fa * bessel_series(nu, b) < 0.0, "no sign change in [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = bessel_series(nu, m);
        if fm * fa <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

pub fn j11() -> f64 {
    series_zero(1, 3.0, 4.0)
}
