//! Clebsch-Gordan coefficients (Condon-Shortley) from the Racah formula,
//! and the coupling multiplicity `d(j, s_A, s_B)`.

use crate::error::{Error, Result};
use crate::spin::twice_of;

fn fact(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// `<j1 m1; j2 m2 | j m>` with every argument doubled.
pub fn cg_twice(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j + m) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i32| x / 2;
    let pre = ((j + 1) as f64 * fact(h(j1 + j2 - j)) * fact(h(j1 - j2 + j)) * fact(h(-j1 + j2 + j))
        / fact(h(j1 + j2 + j) + 1))
    .sqrt()
        * (fact(h(j1 + m1)) * fact(h(j1 - m1)) * fact(h(j2 + m2)) * fact(h(j2 - m2)) * fact(h(j + m)) * fact(h(j - m)))
            .sqrt();
    let kmin = 0.max(h(j2 - j - m1)).max(h(j1 - j + m2));
    let kmax = h(j1 + j2 - j).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = fact(k)
            * fact(h(j1 + j2 - j) - k)
            * fact(h(j1 - m1) - k)
            * fact(h(j2 + m2) - k)
            * fact(h(j - j2 + m1) + k)
            * fact(h(j - j1 - m2) + k);
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    pre * sum
}

/// `<j1 m1; j2 m2 | j m>` for half-integer arguments.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (tj1, tm1, tj2, tm2, tj, tm) =
        (twice_of(j1)?, twice_of(m1)?, twice_of(j2)?, twice_of(m2)?, twice_of(j)?, twice_of(m)?);
    if tj1 < 0 || tj2 < 0 || tj < 0 {
        return Err(Error::InvalidParameter("angular momenta must be non-negative".into()));
    }
    for (jj, mm) in [(tj1, tm1), (tj2, tm2), (tj, tm)] {
        if mm.abs() > jj || (jj + mm) % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "projection {} invalid for j = {}",
                mm as f64 / 2.0,
                jj as f64 / 2.0
            )));
        }
    }
    Ok(cg_twice(tj1, tm1, tj2, tm2, tj, tm))
}

/// Number of `(l, s)` pairs with `|s_A - s_B| <= s <= s_A + s_B` and
/// `|l - s| <= j <= l + s`. Returns 0 below `j_min` or for a `j` of the
/// wrong integrality.
pub fn degeneracy(j: f64, s_a: f64, s_b: f64) -> Result<u32> {
    let (tj, ta, tb) = (twice_of(j)?, twice_of(s_a)?, twice_of(s_b)?);
    if tj < 0 || ta < 0 || tb < 0 {
        return Err(Error::InvalidParameter("negative angular momentum".into()));
    }
    let mut count = 0;
    for ts in ((ta - tb).abs()..=ta + tb).step_by(2) {
        // l integer, so 2l even and |2l - 2s| <= 2j <= 2l + 2s with matching parity
        for l in 0..=(tj + ts) / 2 {
            if triangle(2 * l, ts, tj) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Smallest total angular momentum in the coupling series.
pub fn j_min(s_a: f64, s_b: f64) -> Result<f64> {
    Ok(if (twice_of(s_a)? + twice_of(s_b)?) % 2 == 0 { 0.0 } else { 0.5 })
}
