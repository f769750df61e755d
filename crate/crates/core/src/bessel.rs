//! Modified Bessel functions of the first kind, orders 0 and 1.
//!
//! The closed forms in this crate always pair `I_nu(z)` with `e^{-z}`, so
//! the exponentially scaled product is computed directly: power series times
//! `e^{-z}` up to the crossover, large-argument asymptotic expansion above
//! it. This keeps `e^{-z} I_nu(z)` finite for arbitrarily large `z`.

const SERIES_CUTOFF: f64 = 60.0;

/// `I_nu(z)` for `nu` in {0, 1}, `z >= 0`. Overflows to infinity past
/// `z ~ 709` like `exp` does.
pub fn bessel_i(nu: u8, z: f64) -> f64 {
    assert!(nu <= 1, "only orders 0 and 1 are provided");
    assert!(z >= 0.0, "modified Bessel evaluated at negative argument");
    if z <= SERIES_CUTOFF {
        series(nu, z)
    } else {
        asymptotic_scaled(nu, z) * z.exp()
    }
}

/// Exponentially scaled `e^{-z} I_nu(z)`; stable for all `z >= 0`.
pub fn bessel_i_scaled(nu: u8, z: f64) -> f64 {
    assert!(nu <= 1);
    assert!(z >= 0.0);
    if z <= SERIES_CUTOFF {
        series(nu, z) * (-z).exp()
    } else {
        asymptotic_scaled(nu, z)
    }
}

// Power series sum_{n>=0} (z/2)^{2n+nu} / (n! (n+nu)!). All terms positive,
// so plain summation is accurate; terms are generated by recurrence.
fn series(nu: u8, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = if nu == 0 { 1.0 } else { 0.5 * z };
    let mut sum = term;
    let mut n = 0.0f64;
    loop {
        n += 1.0;
        term *= q / (n * (n + nu as f64));
        sum += term;
        if term < sum * 1e-17 || n > 500.0 {
            return sum;
        }
    }
}

// e^{-z} I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k with
// a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (8 j). Truncated at the
// smallest term; for z > 60 that is far below f64 precision.
fn asymptotic_scaled(nu: u8, z: f64) -> f64 {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let j = (2 * k - 1) as f64;
        term *= -(mu - j * j) / (8.0 * k as f64 * z);
        if term.abs() >= prev {
            break; // divergent tail reached
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}
