//! Globally adaptive composite Simpson quadrature.
//!
//! The integration range is first cut at caller-supplied breakpoints (the
//! kinks of the integrand), then the panel with the largest error estimate is
//! bisected until the summed estimate falls below the tolerance. Working on
//! the global error rather than a per-panel budget lets integrable endpoint
//! singularities like `sqrt(|x - b|)` converge without deep recursion.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_PANELS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fl: f64,
    fm: f64,
    fr: f64,
    fb: f64,
    value: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Self {
        let m = 0.5 * (a + b);
        let fl = f(0.5 * (a + m));
        let fr = f(0.5 * (m + b));
        let h = b - a;
        let coarse = h * (fa + 4.0 * fm + fb) / 6.0;
        let fine = h * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb) / 12.0;
        Self {
            a,
            b,
            fa,
            fl,
            fm,
            fr,
            fb,
            value: fine + (fine - coarse) / 15.0,
            error: (fine - coarse).abs() / 15.0,
        }
    }

    fn split<F: Fn(f64) -> f64>(&self, f: &F) -> (Self, Self) {
        let m = 0.5 * (self.a + self.b);
        (
            Self::new(f, self.a, m, self.fa, self.fl, self.fm),
            Self::new(f, m, self.b, self.fm, self.fr, self.fb),
        )
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`, first cutting
/// the range at every breakpoint strictly inside it.
pub fn integrate<F>(f: F, lo: f64, hi: f64, breakpoints: &[f64], tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    integrate_with_limit(f, lo, hi, breakpoints, tol, DEFAULT_MAX_PANELS)
}

pub fn integrate_with_limit<F>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::Domain {
            name: "lower limit",
            value: lo,
            domain: "(-inf, upper limit]",
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            name: "tolerance",
            value: tol,
            domain: "(0, inf)",
        });
    }
    let mut cuts = vec![lo];
    cuts.extend(breakpoints.iter().copied().filter(|&p| p > lo && p < hi));
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            heap.push(Panel::new(&f, a, b, f(a), f(0.5 * (a + b)), f(b)));
        }
    }
    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();

    while total_error > tol {
        let Some(worst) = heap.pop() else { break };
        let width = worst.b - worst.a;
        if width <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1e-300) {
            // cannot bisect further; keep its contribution as is
            total_error -= worst.error;
            done.push(worst);
            continue;
        }
        if heap.len() + done.len() + 2 > max_panels {
            heap.push(worst);
            break;
        }
        let (left, right) = worst.split(&f);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let panels: Vec<&Panel> = heap.iter().chain(done.iter()).collect();
    // resum from scratch to avoid drift in the running total
    let error_estimate: f64 = panels.iter().map(|p| p.error).sum();
    let value: f64 = panels.iter().map(|p| p.value).sum();
    if !value.is_finite() || error_estimate > tol {
        return Err(Error::QuadratureNonConvergence {
            estimate: error_estimate,
            intervals: panels.len(),
        });
    }
    Ok(Quadrature {
        value,
        error_estimate,
        panels: panels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &[], 1e-12).unwrap();
        assert_abs_diff_eq!(q.value, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn kinked_integrand_with_breakpoint() {
        let f = |x: f64| (x - 0.3f64).abs();
        let q = integrate(f, 0.0, 1.0, &[0.3], 1e-12).unwrap();
        assert_abs_diff_eq!(q.value, 0.5 * (0.09 + 0.49), epsilon = 1e-14);
        assert_eq!(q.panels, 2);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let q = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &[], 1e-11).unwrap();
        assert_abs_diff_eq!(q.value, 2.0 / 3.0, epsilon = 1e-10);
        let q = integrate(|x: f64| (1.0 - x).abs().sqrt(), 0.0, 2.0, &[1.0], 1e-11).unwrap();
        assert_abs_diff_eq!(q.value, 4.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn smooth_transcendental() {
        let q = integrate(f64::exp, 0.0, 1.0, &[], 1e-12).unwrap();
        assert_abs_diff_eq!(q.value, std::f64::consts::E - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_interval() {
        let q = integrate(|x| x, 0.4, 0.4, &[], 1e-10).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn panel_budget_exhaustion_is_reported() {
        let err = integrate_with_limit(|x: f64| (40.0 * x).sin(), 0.0, 1.0, &[], 1e-14, 4).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(integrate(|x| x, 1.0, 0.0, &[], 1e-10).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, &[], 0.0).is_err());
    }
}
