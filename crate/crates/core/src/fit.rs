//! Ordinary least squares on small (x, y) sets.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the residuals vanish, including the
    /// degenerate case where `y` is constant.
    pub r2: f64,
}

/// Fits `y = slope * x + intercept`. Returns `None` for fewer than two points or
/// when all abscissae coincide.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let r2 = if syy <= f64::EPSILON * f64::EPSILON * nf {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Some(LineFit {
        slope,
        intercept,
        r2,
    })
}

/// `log2(Σ 2^{v_i})` over the finite entries of `v`, `-inf` when there are none.
pub fn log2_sum_exp2(v: impl IntoIterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = v.into_iter().filter(|x| x.is_finite()).collect();
    let Some(max) = vals.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    let s: f64 = vals.iter().map(|&x| (x - max).exp2()).sum();
    max + s.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
        let flat = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.r2, 1.0);
    }

    #[test]
    fn log_sum_exp() {
        let v = log2_sum_exp2([3.0, 3.0]);
        assert!((v - 4.0).abs() < 1e-14);
        assert_eq!(log2_sum_exp2([f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log2_sum_exp2([2000.0, 2000.0]) - 2001.0).abs() < 1e-12);
    }
}
