//! Local linear minimization oracle over the unit simplex with parameter
//! `rho = sqrt(n)`.
//!
//! For `x` in the simplex, radius `r` and cost `c`, the returned point `p`
//! satisfies `<c, p> <= <c, y>` for every simplex point `y` with
//! `‖y - x‖₂ <= r`, and `‖x - p‖₂ <= sqrt(n) r`.

use crate::error::{Error, Result};
use crate::linalg::{all_finite, norm1};
use crate::sets::{argmin, FeasibleSet, Simplex};

#[derive(Debug, Clone, PartialEq)]
pub struct LlooResult {
    pub point: Vec<f64>,
    /// `‖x - point‖₁`
    pub l1_moved: f64,
}

/// Oracle parameter `rho` for the n-dimensional simplex.
pub fn simplex_rho(n: usize) -> f64 {
    (n as f64).sqrt()
}

/// Moves mass `m = min(sqrt(n) r / 2, 1)` from the coordinates with the
/// largest costs onto the coordinate with the smallest cost.
pub fn lloo(x: &[f64], r: f64, c: &[f64]) -> Result<LlooResult> {
    let n = x.len();
    if n == 0 || c.len() != n {
        return Err(Error::InvalidInput(format!(
            "lloo: dimension mismatch (x has {n}, c has {})",
            c.len()
        )));
    }
    if !Simplex::new(n).contains(x) {
        return Err(Error::Precondition("lloo: x is not on the simplex".into()));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("lloo: radius must be positive, got {r}")));
    }
    if !all_finite(c) {
        return Err(Error::InvalidInput("lloo: non-finite cost entry".into()));
    }

    let d = simplex_rho(n) * r;
    let m = (d / 2.0).min(1.0);
    let best = argmin(c);

    // Descending cost; the stable sort keeps ascending index among ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[b].total_cmp(&c[a]));

    let mut removed = vec![0.0; n];
    let mut taken = 0.0;
    for &i in &order {
        if taken + x[i] >= m {
            removed[i] = m - taken;
            break;
        }
        removed[i] = x[i];
        taken += x[i];
    }

    let mut point: Vec<f64> = x.iter().zip(&removed).map(|(xi, ri)| xi - ri).collect();
    point[best] += m;
    let l1_moved = norm1(&x.iter().zip(&point).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(LlooResult { point, l1_moved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn partial_removal_example() {
        let r = 0.6 / 3f64.sqrt();
        let res = lloo(&[0.5, 0.3, 0.2], r, &[1.0, 0.0, -1.0]).unwrap();
        let want = [0.2, 0.3, 0.5];
        for (a, b) in res.point.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(res.l1_moved, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn large_radius_gives_vertex() {
        let res = lloo(&[0.5, 0.3, 0.2], 10.0, &[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(res.point, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn constant_cost_leaves_point() {
        let r = 0.6 / 3f64.sqrt();
        let res = lloo(&[0.5, 0.3, 0.2], r, &[0.0, 0.0, 0.0]).unwrap();
        for (a, b) in res.point.iter().zip([0.5, 0.3, 0.2]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn removal_spans_several_coordinates() {
        // m = 0.9: take all of x_1 (0.5) and 0.3 of x_2 and 0.1 of x_3
        let r = 1.8 / 3f64.sqrt();
        let res = lloo(&[0.5, 0.3, 0.2], r, &[3.0, 2.0, 1.0]).unwrap();
        let want = [0.0, 0.0, 1.0];
        for (a, b) in res.point.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(lloo(&[0.5, 0.6], 0.1, &[0.0, 1.0]), Err(Error::Precondition(_))));
        assert!(lloo(&[0.5, 0.5], 0.0, &[0.0, 1.0]).is_err());
        assert!(lloo(&[0.5, 0.5], 0.1, &[f64::NAN, 1.0]).is_err());
    }
}
