//! Row-major dense tensors addressed by axis, used to reshape amplitude
//! arrays into bipartite matrices and to apply operators on chosen axes.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Enumerates the flat offsets of all multi-indices over `axes`, in
/// row-major order of those axes.
fn offsets(dims: &[usize], strides: &[usize], axes: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &ax in axes {
        let mut next = Vec::with_capacity(out.len() * dims[ax]);
        for &base in &out {
            for i in 0..dims[ax] {
                next.push(base + i * strides[ax]);
            }
        }
        out = next;
    }
    out
}

fn complement(n: usize, axes: &[usize]) -> Vec<usize> {
    (0..n).filter(|a| !axes.contains(a)).collect()
}

/// Reshapes `data` into a matrix whose rows run over `left` axes and whose
/// columns run over the remaining axes (both in ascending axis order of
/// their listing).
pub(crate) fn bipartite_matrix(dims: &[usize], data: &[C64], left: &[usize]) -> DMatrix<C64> {
    let st = strides(dims);
    let right = complement(dims.len(), left);
    let rows = offsets(dims, &st, left);
    let cols = offsets(dims, &st, &right);
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| data[rows[i] + cols[j]])
}

/// Applies `u` to the combined index of `axes`:
/// `new[.., i, ..] = sum_j u[i, j] old[.., j, ..]`.
pub(crate) fn apply_on_axes(dims: &[usize], data: &[C64], axes: &[usize], u: &DMatrix<C64>) -> Vec<C64> {
    let st = strides(dims);
    let inner = offsets(dims, &st, axes);
    assert_eq!(u.nrows(), inner.len());
    assert_eq!(u.ncols(), inner.len());
    let outer = offsets(dims, &st, &complement(dims.len(), axes));
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    let mut buf = vec![C64::new(0.0, 0.0); inner.len()];
    for &base in &outer {
        for (b, &o) in buf.iter_mut().zip(&inner) {
            *b = data[base + o];
        }
        for (i, &oi) in inner.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, b) in buf.iter().enumerate() {
                acc += u[(i, j)] * b;
            }
            out[base + oi] = acc;
        }
    }
    out
}

/// Applies a transform to every 1D fibre along `axis`.
pub(crate) fn map_fibres(dims: &[usize], data: &mut [C64], axis: usize, mut f: impl FnMut(&mut [C64])) {
    let st = strides(dims);
    let outer = offsets(dims, &st, &complement(dims.len(), &[axis]));
    let mut buf = vec![C64::new(0.0, 0.0); dims[axis]];
    for &base in &outer {
        for (i, b) in buf.iter_mut().enumerate() {
            *b = data[base + i * st[axis]];
        }
        f(&mut buf);
        for (i, b) in buf.iter().enumerate() {
            data[base + i * st[axis]] = *b;
        }
    }
}

pub(crate) fn norm_sqr(data: &[C64]) -> f64 {
    data.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `min_theta || x - e^{i theta} y ||`, computed elementwise after fixing
/// the optimal phase so that tiny distances keep full precision.
pub fn ray_distance(x: &[C64], y: &[C64]) -> f64 {
    let ov = inner(y, x);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    x.iter().zip(y).map(|(a, b)| (a - phase * b).norm_sqr()).sum::<f64>().sqrt()
}
