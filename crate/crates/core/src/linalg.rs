//! Small dense complex linear algebra: determinants, unitary matrices.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::rng::{complex_gaussian, StreamKey};
use crate::C64;

/// Row-major dense complex matrix.
pub type Matrix = Vec<Vec<C64>>;

/// Determinant by LU with partial pivoting. Consumes its input.
pub fn determinant(mut a: Matrix) -> C64 {
    let n = a.len();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let (piv, best) =
            (col..n)
                .map(|r| (r, a[r][col].norm_sqr()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        let inv = C64::new(1.0, 0.0) / p;
        for r in col + 1..n {
            let f = a[r][col] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            let (top, bottom) = a.split_at_mut(r);
            let pivot_row = &top[col];
            for (x, y) in bottom[0][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * y;
            }
        }
    }
    det
}

/// Product of row norms (Hadamard's bound on `|det|`).
pub fn hadamard_bound(a: &Matrix) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// Haar-distributed `n × n` unitary from the stream `key`: Gram–Schmidt of
/// a complex Gaussian matrix.
pub fn random_unitary(n: usize, key: StreamKey) -> Matrix {
    let mut rng = key.rng();
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[i];
                let v = &mut rest[0];
                let proj: C64 = v.iter().zip(q).map(|(a, b)| a * b.conj()).sum();
                for (a, b) in v.iter_mut().zip(q) {
                    *a -= proj * b;
                }
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    // rows of the result are the conjugate-transposed columns: still unitary
    (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect()
}

/// `max |(A A^*) - I|` entrywise.
pub fn unitarity_defect(a: &Matrix) -> f64 {
    let n = a.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: C64 = (0..n).map(|k| a[i][k] * a[j][k].conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Solves the 2×2 system `[[a, b], [c, d]] x = r`; `None` if singular.
pub fn solve2(m: [[C64; 2]; 2], r: [C64; 2]) -> Option<[C64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-300 || det.norm() <= f64::EPSILON * scale * scale * 1e-4 {
        return None;
    }
    Some([
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ])
}
