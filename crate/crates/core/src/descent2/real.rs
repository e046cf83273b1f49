//! Real points on a diagonal conic where a second quadratic form is
//! nonnegative.

use nalgebra::Matrix3;

use super::Solvability;

/// Decides whether some nonzero real x with Σ dᵢxᵢ² = 0 has xᵀMx ≥ 0.
///
/// A sampled point with clearly positive value proves solvability; a
/// rational μ with M + μ·diag(d) negative definite proves the opposite
/// (Finsler). Anything else is inconclusive.
pub(crate) fn decide(d: [i128; 3], m: [[i128; 3]; 3]) -> Solvability {
    let pos = d.iter().filter(|x| **x > 0).count();
    if pos == 0 || pos == 3 {
        return Solvability::Unsolvable;
    }
    // the coordinate whose sign differs from the other two
    let odd = (0..3).find(|&i| d.iter().filter(|x| x.signum() == d[i].signum()).count() == 1).unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != odd).collect();
    let scale: f64 = m.iter().flatten().map(|x| x.unsigned_abs() as f64).sum::<f64>().max(1.0);
    let steps = 4096;
    for s in 0..steps {
        let th = std::f64::consts::TAU * s as f64 / steps as f64;
        let mut x = [0.0f64; 3];
        x[odd] = 1.0 / (d[odd].unsigned_abs() as f64).sqrt();
        x[others[0]] = th.cos() / (d[others[0]].unsigned_abs() as f64).sqrt();
        x[others[1]] = th.sin() / (d[others[1]].unsigned_abs() as f64).sqrt();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += m[i][j] as f64 * x[i] * x[j];
            }
        }
        if q > 1e-9 * scale * norm2 {
            return Solvability::Solvable;
        }
    }
    match finsler_multiplier(d, m) {
        Some(_) => Solvability::Unsolvable,
        None => Solvability::Inconclusive,
    }
}

fn lambda_max(d: [i128; 3], m: [[i128; 3]; 3], mu: f64) -> f64 {
    let a = Matrix3::from_fn(|i, j| m[i][j] as f64 + if i == j { mu * d[i] as f64 } else { 0.0 });
    a.symmetric_eigen().eigenvalues.max()
}

fn negative_definite(a: [[i128; 3]; 3]) -> bool {
    // −A positive definite by Sylvester
    let m1 = -a[0][0];
    let m2 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    m1 > 0 && m2 > 0 && -det > 0
}

/// A rational μ = num/den with M + μ·diag(d) negative definite, checked in
/// exact arithmetic.
pub(crate) fn finsler_multiplier(d: [i128; 3], m: [[i128; 3]; 3]) -> Option<(i128, i128)> {
    let scale: f64 = m.iter().flatten().map(|x| x.unsigned_abs() as f64).sum::<f64>().max(1.0);
    let (mut lo, mut hi) = (-1e3 * scale, 1e3 * scale);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if lambda_max(d, m, a) < lambda_max(d, m, b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mu = (lo + hi) / 2.0;
    if lambda_max(d, m, mu) >= 0.0 {
        return None;
    }
    let den: i128 = 1 << 16;
    let num = (mu * den as f64).round() as i128;
    let mut a = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = den * m[i][j] + if i == j { num * d[i] } else { 0 };
        }
    }
    negative_definite(a).then_some((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: i128, b: i128, c: i128) -> [[i128; 3]; 3] {
        [[a, 0, 0], [0, b, 0], [0, 0, c]]
    }

    #[test]
    fn circle_cases() {
        // x² + y² = z²: z² ≥ 0 everywhere, −z² < 0 away from 0
        assert_eq!(decide([1, 1, -1], diag(0, 0, 1)), Solvability::Solvable);
        assert_eq!(decide([1, 1, -1], diag(0, 0, -1)), Solvability::Unsolvable);
        assert!(finsler_multiplier([1, 1, -1], diag(0, 0, -1)).is_some());
        assert_eq!(decide([1, 1, 1], diag(1, 1, 1)), Solvability::Unsolvable);
        // x² − y² takes both signs on the circle
        assert_eq!(decide([1, 1, -1], diag(1, -1, 0)), Solvability::Solvable);
    }
}
