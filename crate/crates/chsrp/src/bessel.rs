//! Bessel functions of the first kind for the modal beamformer.
//!
//! The operating range is narrow (orders up to a few, arguments `kr`
//! below ~10 for audible bands and centimeter rings), so two classic
//! schemes cover it comfortably: the ascending power series for small
//! arguments and Miller's downward recurrence with the
//! `J_0 + 2 J_2 + 2 J_4 + ... = 1` normalization for larger ones.

use crate::error::{Error, Result};

/// Largest |order| accepted; far beyond anything a circular array of a
/// few dozen mics can resolve.
pub const MAX_ORDER: i32 = 64;

/// Crossover between the ascending series and downward recurrence.
const SERIES_LIMIT: f64 = 12.0;

/// J_l(x) for integer order, `x >= 0`.
///
/// Negative orders use the parity identity `J_{-l}(x) = (-1)^l J_l(x)`.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    if order.abs() > MAX_ORDER {
        return Err(Error::OrderOutOfRange {
            order,
            max: MAX_ORDER,
        });
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::BesselArgument(x));
    }
    let l = order.unsigned_abs() as usize;
    let v = if x < SERIES_LIMIT {
        series_jn(l, x)
    } else {
        miller_jn(l, x)
    };
    if order < 0 && l % 2 == 1 {
        Ok(-v)
    } else {
        Ok(v)
    }
}

/// Ascending series: sum_m (-1)^m (x/2)^(l+2m) / (m! (l+m)!).
fn series_jn(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    let h = x / 2.0;
    // t_0 = (x/2)^l / l!, accumulated stepwise to avoid overflow staging.
    let mut term = 1.0;
    for m in 1..=l {
        term *= h / m as f64;
    }
    let mut sum = term;
    let h2 = h * h;
    let mut m = 1usize;
    loop {
        term *= -h2 / (m as f64 * (m + l) as f64);
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 + 1e-300 {
            break;
        }
        m += 1;
        debug_assert!(m < 200, "series failed to converge");
    }
    sum
}

/// Miller's algorithm: recur `J_{m-1} = (2m/x) J_m - J_{m+1}` downward
/// from a high trial order, then normalize with
/// `J_0(x) + 2 sum_{k>=1} J_{2k}(x) = 1`.
fn miller_jn(l: usize, x: f64) -> f64 {
    let start = ((x.max(l as f64) as usize) + 52) & !1; // even start order
    let mut jp = 0.0f64; // J_{m+1}
    let mut j = 1e-30f64; // J_m (arbitrary scale)
    let mut norm = 0.0f64;
    let mut out = 0.0f64;
    for m in (1..=start).rev() {
        let jm = 2.0 * m as f64 / x * j - jp;
        jp = j;
        j = jm;
        if m - 1 == l {
            out = j;
        }
        if (m - 1) % 2 == 0 && m - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            // rescale to dodge overflow
            jp /= 1e250;
            j /= 1e250;
            norm /= 1e250;
            out /= 1e250;
        }
    }
    norm += j; // adds J_0
    if l == 0 {
        out = j;
    }
    out / norm
}

/// Positive zeros of J_l up to `x_max`, ascending.
///
/// Scan-and-bisect; zeros of J_l are simple and separated by more than
/// the 0.25 scan step everywhere past the first one.
pub fn bessel_zeros(order: i32, x_max: f64) -> Result<Vec<f64>> {
    if order.abs() > MAX_ORDER {
        return Err(Error::OrderOutOfRange {
            order,
            max: MAX_ORDER,
        });
    }
    if !x_max.is_finite() || x_max < 0.0 {
        return Err(Error::BesselArgument(x_max));
    }
    let l = order.unsigned_abs() as i32;
    let mut zeros = Vec::new();
    let step = 0.25f64;
    // J_l > 0 on (0, first zero); start scanning just above 0 to skip the
    // root at the origin for l != 0.
    let mut x0 = 1e-9;
    let mut f0 = bessel_j(l, x0)?;
    let mut x = step;
    while x0 < x_max {
        let x1 = x.min(x_max);
        let f1 = bessel_j(l, x1)?;
        if f0 == 0.0 {
            zeros.push(x0);
        } else if f1 != 0.0 && f0.signum() != f1.signum() {
            zeros.push(bisect(l, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
        if x1 >= x_max {
            break;
        }
        x += step;
    }
    Ok(zeros.into_iter().filter(|&z| z <= x_max).collect())
}

fn bisect(l: i32, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let mut sign_a = fa.signum();
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        let fm = bessel_j(l, mid).unwrap_or(0.0);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sign_a {
            a = mid;
            sign_a = fm.signum();
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
