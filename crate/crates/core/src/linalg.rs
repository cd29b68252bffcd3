//! Dense 3x3 helpers: invariants, Cramer's rule and a pivoted-elimination
//! shadow solver.

/// Row-major 3x3 matrix.
pub type Mat3 = [[f64; 3]; 3];

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Trace.
pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

/// Sum of the three principal 2x2 minors.
pub fn principal_minor_sum(m: &Mat3) -> f64 {
    (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
}

/// `m * x`.
pub fn mul_vec(m: &Mat3, x: &[f64; 3]) -> [f64; 3] {
    let mut y = [0.0; 3];
    for (yi, row) in y.iter_mut().zip(m) {
        *yi = row[0] * x[0] + row[1] * x[1] + row[2] * x[2];
    }
    y
}

fn norm1(m: &Mat3) -> f64 {
    (0..3)
        .map(|j| m[0][j].abs() + m[1][j].abs() + m[2][j].abs())
        .fold(0.0, f64::max)
}

fn adjugate(m: &Mat3) -> Mat3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ]
}

/// 1-norm condition number, infinite for an exactly singular matrix.
pub fn condition_number(m: &Mat3) -> f64 {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return f64::INFINITY;
    }
    norm1(m) * norm1(&adjugate(m)) / d.abs()
}

/// Cramer's rule; `None` when the determinant vanishes.
pub fn solve_cramer(m: &Mat3, b: &[f64; 3]) -> Option<[f64; 3]> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (j, xj) in x.iter_mut().enumerate() {
        let mut mj = *m;
        for i in 0..3 {
            mj[i][j] = b[i];
        }
        *xj = det(&mj) / d;
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting; `None` on a zero pivot.
pub fn solve_pivoted(m: &Mat3, b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = *m;
    let mut r = *b;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = r[i];
        for j in i + 1..3 {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Max-norm of `m x - b` relative to `|m| |x| + |b|`.
pub fn relative_residual(m: &Mat3, x: &[f64; 3], b: &[f64; 3]) -> f64 {
    let mx = mul_vec(m, x);
    let mut worst = 0.0_f64;
    for i in 0..3 {
        let scale = m[i][0].abs() * x[0].abs()
            + m[i][1].abs() * x[1].abs()
            + m[i][2].abs() * x[2].abs()
            + b[i].abs();
        if scale > 0.0 {
            worst = worst.max((mx[i] - b[i]).abs() / scale);
        }
    }
    worst
}
