use crate::error::{Error, Result};

/// Whether some power of the nonnegative square matrix is strictly positive.
/// Wielandt: it suffices to look at the power `(n-1)² + 1`.
pub fn is_primitive(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return false;
    }
    let pattern: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut p = pattern.clone();
    let target = (n - 1) * (n - 1) + 1;
    for _ in 1..target {
        p = bool_mul(&p, &pattern);
    }
    p.iter().all(|r| r.iter().all(|&x| x))
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Perron–Frobenius data of a primitive matrix: the dominant eigenvalue `λ`
/// and the positive left eigenvector `v` (`vM = λv`) normalized to `Σv = 1`.
pub fn pf_data(m: &[Vec<u64>]) -> Result<(f64, Vec<f64>)> {
    if !is_primitive(m) {
        return Err(Error::NotPrimitive);
    }
    let n = m.len();
    let mf: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let left = |v: &[f64]| -> Vec<f64> { (0..n).map(|j| (0..n).map(|i| v[i] * mf[i][j]).sum()).collect() };
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let w = left(&v);
        let s: f64 = w.iter().sum();
        let next: Vec<f64> = w.iter().map(|x| x / s).collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-16 {
            break;
        }
    }
    // one Rayleigh-style refinement of λ from the final vector
    let w = left(&v);
    let lambda = w.iter().sum::<f64>() / v.iter().sum::<f64>();
    let res = residual(m, lambda, &v);
    if res >= 1e-12 {
        return Err(Error::InvalidModel(format!(
            "eigenvector iteration did not settle (residual {res:e})"
        )));
    }
    Ok((lambda, v))
}

/// `‖vM − λv‖_∞`.
pub fn residual(m: &[Vec<u64>], lambda: f64, v: &[f64]) -> f64 {
    let n = m.len();
    (0..n)
        .map(|j| {
            let s: f64 = (0..n).map(|i| v[i] * m[i][j] as f64).sum();
            (s - lambda * v[j]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tribonacci() {
        let m = vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0]];
        let (l, v) = pf_data(&m).unwrap();
        assert!((l - 1.839286755214161).abs() < 1e-12);
        assert!(v.iter().all(|&x| x > 0.0));
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(residual(&m, l, &v) < 1e-12);
    }

    #[test]
    fn golden_ratio() {
        let (l, _) = pf_data(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert!((l - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_primitive() {
        assert_eq!(pf_data(&[vec![0, 1], vec![1, 0]]), Err(Error::NotPrimitive));
        assert!(!is_primitive(&[vec![1, 1], vec![0, 1]]));
        assert!(is_primitive(&[vec![0, 1], vec![1, 1]]));
    }
}
