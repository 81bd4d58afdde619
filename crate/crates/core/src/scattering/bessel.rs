//! Spherical Bessel functions of the first and second kind.

/// `j_l(x)` for `l = 0..=l_max`: power series for small `x`, otherwise
/// Miller's downward recurrence normalized against `j_0` or `j_1`.
pub fn spherical_j(l_max: usize, x: f64) -> Vec<f64> {
    if x.abs() < 0.5 {
        return (0..=l_max).map(|l| series_j(l, x)).collect();
    }
    miller_j(l_max, x)
}

fn miller_j(l_max: usize, x: f64) -> Vec<f64> {
    let start = l_max + 20 + x.abs() as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for l in (1..=start).rev() {
        vals[l - 1] = (2 * l + 1) as f64 / x * vals[l] - vals[l + 1];
        if vals[l - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(l - 1) {
                *v *= 1e-250;
            }
        }
    }
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let scale = if j0.abs() >= j1.abs() { j0 / vals[0] } else { j1 / vals[1] };
    vals.truncate(l_max + 1);
    vals.iter().map(|v| v * scale).collect()
}

fn series_j(l: usize, x: f64) -> f64 {
    // x^l / (2l+1)!!
    let mut lead = 1.0;
    for k in 0..l {
        lead *= x / (2 * k + 3) as f64;
    }
    let x2 = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term *= -x2 / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `y_l(x)` (often written `n_l`) for `l = 0..=l_max` by upward recurrence.
pub fn spherical_y(l_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(l_max + 1);
    out.push(-x.cos() / x);
    if l_max >= 1 {
        out.push(-x.cos() / (x * x) - x.sin() / x);
    }
    for l in 1..l_max {
        let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        out.push(next);
    }
    out
}
