use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rotelast::radial::{bessel_j0, bisect_j0_zero};

/// Fractional bits of the fixed-point accumulator.
const FRAC_BITS: u32 = 256;

/// `Σ (−x²/4)^m / (m!)²` with every term exact in integers and truncated to
/// `2^−256` before summation.
fn exact_j0(x: f64) -> f64 {
    // x = mant · 2^exp exactly.
    let (mant, exp, _) = num::Float::integer_decode(x.abs());
    let mant = BigInt::from(mant);
    // x²/4 = mant² · 2^(2 exp − 2)
    let shift = 2 * exp as i64 - 2;
    let num_step = &mant * &mant;
    let mut numer = BigInt::one();
    let mut denom = BigInt::one();
    let mut sum = BigInt::zero();
    let scale = BigInt::one() << FRAC_BITS;
    let tiny = BigInt::one() << (FRAC_BITS - 110);
    let mut m: u64 = 0;
    loop {
        // term = numer · 2^(m·shift) / denom
        let total_shift = m as i64 * shift;
        let wide = &numer * &scale;
        let scaled = if total_shift >= 0 {
            wide << total_shift as usize
        } else {
            wide >> (-total_shift) as usize
        };
        let term = scaled / &denom;
        if m % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        m += 1;
        numer *= &num_step;
        denom *= BigInt::from(m * m);
        let past_peak = (m as f64) * (m as f64) > x * x;
        if past_peak && term.abs() < tiny {
            break;
        }
    }
    let top = &sum >> (FRAC_BITS - 64) as usize;
    top.to_f64().unwrap() / 2f64.powi(64)
}

#[test]
fn j0_matches_exact_series_on_0_to_50() {
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..=400 {
        let x = i as f64 * 0.125;
        let err = (bessel_j0(x) - exact_j0(x)).abs();
        if err > worst.1 {
            worst = (x, err);
        }
    }
    assert!(worst.1 <= 1e-12, "worst at x = {}: {:e}", worst.0, worst.1);
}

#[test]
fn oracle_reproduces_tabulated_values() {
    assert!((exact_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-16);
    assert!((exact_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-16);
}

#[test]
fn j0_matches_exact_series_at_irregular_points() {
    for x in [0.3, 2.404825557695773, 7.77, 11.999, 12.001, 15.9999, 16.0001, 33.3, 49.95] {
        let err = (bessel_j0(x) - exact_j0(x)).abs();
        assert!(err <= 1e-12, "{x}: {err:e}");
    }
}

#[test]
fn first_zero_from_exact_series() {
    // Bisection on the exact series as an independent route to the zero.
    let (mut a, mut b) = (2.0f64, 3.0f64);
    while b - a > 1e-13 {
        let m = 0.5 * (a + b);
        if exact_j0(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let z = bisect_j0_zero(2.0, 3.0, 1e-13).unwrap();
    assert!((z - 0.5 * (a + b)).abs() < 1e-9);
    assert!((z - 2.404825557695773).abs() < 1e-9);
}
