//! Small dense matrix kernels: 4×4 adjugate inversion and LU with partial
//! pivoting for the 15×15 and 64×64 systems.

#![allow(clippy::needless_range_loop)]

/// Row-major square matrix.
pub type Matrix<const N: usize> = [[f64; N]; N];

pub fn identity<const N: usize>() -> Matrix<N> {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// Largest absolute entry.
pub fn max_norm<const N: usize>(m: &Matrix<N>) -> f64 {
    m.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Maximum absolute column sum.
pub fn one_norm<const N: usize>(m: &Matrix<N>) -> f64 {
    (0..N)
        .map(|j| m.iter().map(|row| row[j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn mat_mul<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec<const N: usize>(a: &Matrix<N>, x: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(x).map(|(r, v)| r * v).sum();
    }
    out
}

/// Reciprocal 1-norm condition number, `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
pub fn rcond<const N: usize>(a: &Matrix<N>, inverse: &Matrix<N>) -> f64 {
    let denom = one_norm(a) * one_norm(inverse);
    if denom.is_finite() && denom > 0.0 {
        1.0 / denom
    } else {
        0.0
    }
}

fn minor3(m: &Matrix<4>, skip_row: usize, skip_col: usize) -> f64 {
    let mut sub = [[0.0; 3]; 3];
    let mut r = 0;
    for (i, row) in m.iter().enumerate() {
        if i == skip_row {
            continue;
        }
        let mut c = 0;
        for (j, v) in row.iter().enumerate() {
            if j == skip_col {
                continue;
            }
            sub[r][c] = *v;
            c += 1;
        }
        r += 1;
    }
    sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
        - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
        + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
}

fn cofactor_sign(i: usize, j: usize) -> f64 {
    if (i + j).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn det4(m: &Matrix<4>) -> f64 {
    (0..4)
        .map(|j| cofactor_sign(0, j) * m[0][j] * minor3(m, 0, j))
        .sum()
}

/// Classical adjugate (transposed cofactor matrix).
pub fn adjugate4(m: &Matrix<4>) -> Matrix<4> {
    let mut adj = [[0.0; 4]; 4];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = cofactor_sign(j, i) * minor3(m, j, i);
        }
    }
    adj
}

/// `adj(m) / det`. The caller is responsible for `det ≠ 0`.
pub fn inverse4(m: &Matrix<4>, det: f64) -> Matrix<4> {
    let mut inv = adjugate4(m);
    for v in inv.iter_mut().flatten() {
        *v /= det;
    }
    inv
}

/// LU factorization `P·A = L·U` with partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu<const N: usize> {
    lu: Matrix<N>,
    perm: [usize; N],
    sign: f64,
    min_pivot: f64,
}

impl<const N: usize> Lu<N> {
    pub fn factor(a: &Matrix<N>) -> Self {
        let mut lu = *a;
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut sign = 1.0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..N {
            let mut p = k;
            let mut best = lu[k][k].abs();
            for (i, row) in lu.iter().enumerate().skip(k + 1) {
                if row[k].abs() > best {
                    best = row[k].abs();
                    p = i;
                }
            }
            min_pivot = min_pivot.min(best);
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
                sign = -sign;
            }
            if best == 0.0 {
                continue;
            }
            let pivot = lu[k][k];
            for i in (k + 1)..N {
                let f = lu[i][k] / pivot;
                lu[i][k] = f;
                if f == 0.0 {
                    continue;
                }
                for j in (k + 1)..N {
                    lu[i][j] -= f * lu[k][j];
                }
            }
        }
        if N == 0 {
            min_pivot = 0.0;
        }
        Self {
            lu,
            perm,
            sign,
            min_pivot,
        }
    }

    pub fn det(&self) -> f64 {
        (0..N).fold(self.sign, |acc, i| acc * self.lu[i][i])
    }

    /// Smallest pivot magnitude encountered.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn is_singular(&self) -> bool {
        self.min_pivot == 0.0
    }

    /// Solves `A x = b`. Returns `None` for an exactly singular factor.
    pub fn solve(&self, b: &[f64; N]) -> Option<[f64; N]> {
        if self.is_singular() {
            return None;
        }
        let mut x = [0.0; N];
        for i in 0..N {
            x[i] = b[self.perm[i]];
        }
        for i in 0..N {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..N).rev() {
            let mut acc = x[i];
            for j in (i + 1)..N {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc / self.lu[i][i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<N>> {
        if self.is_singular() {
            return None;
        }
        let mut inv = [[0.0; N]; N];
        let mut e = [0.0; N];
        for j in 0..N {
            e[j] = 1.0;
            let col = self.solve(&e)?;
            e[j] = 0.0;
            for i in 0..N {
                inv[i][j] = col[i];
            }
        }
        Some(inv)
    }
}

/// Degeneracy gate applied to Γ and A.
///
/// A matrix is refused when `|det| < det_rel · (max|a_ij|)^dim` or when its
/// reciprocal condition number falls below `rcond_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyPolicy {
    pub det_rel: f64,
    pub rcond_min: f64,
}

impl Default for DegeneracyPolicy {
    fn default() -> Self {
        Self {
            det_rel: 1e-9,
            rcond_min: 1e-12,
        }
    }
}

impl DegeneracyPolicy {
    pub fn is_degenerate(&self, det: f64, max_norm: f64, dim: i32, rcond: f64) -> bool {
        if !det.is_finite() || max_norm == 0.0 {
            return true;
        }
        det.abs() < self.det_rel * libm::pow(max_norm, dim as f64)
            || rcond.is_nan()
            || rcond < self.rcond_min
    }
}
