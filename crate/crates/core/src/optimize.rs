//! Golden-section search for unimodal functions of one variable.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes `f` on `[a, b]`, stopping once the bracket is narrower than
/// `tol`. The returned point is the best one evaluated, endpoints included.
pub fn golden_section_max<F>(f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<Extremum>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::Domain {
            name: "bracket start",
            value: a,
            domain: "(-inf, bracket end]",
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            name: "tolerance",
            value: tol,
            domain: "(0, inf)",
        });
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations == max_iter {
            return Err(Error::OptimizerNonConvergence {
                iterations,
                width: hi - lo,
            });
        }
        iterations += 1;
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let best = [(a, f(a)), (b, f(b)), (x1, f1), (x2, f2)].into_iter().fold(
        (f64::NAN, f64::NEG_INFINITY),
        |acc, p| if p.1 > acc.1 { p } else { acc },
    );
    Ok(Extremum {
        x: best.0,
        value: best.1,
        iterations,
    })
}

/// Minimizes `f` on `[a, b]`.
pub fn golden_section_min<F>(f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<Extremum>
where
    F: Fn(f64) -> f64,
{
    let e = golden_section_max(|x| -f(x), a, b, tol, max_iter)?;
    Ok(Extremum { value: -e.value, ..e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_parabola_peak() {
        let e = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10, 200).unwrap();
        assert_abs_diff_eq!(e.x, 0.3, epsilon = 1e-7);
    }

    #[test]
    fn boundary_maximum() {
        let e = golden_section_max(|x| x, 0.0, 1.0, 1e-10, 200).unwrap();
        assert_eq!(e.x, 1.0);
        let e = golden_section_min(|x| x, 0.2, 1.0, 1e-10, 200).unwrap();
        assert_eq!(e.x, 0.2);
        assert_eq!(e.value, 0.2);
    }

    #[test]
    fn degenerate_bracket() {
        let e = golden_section_max(|x| x * x, 0.5, 0.5, 1e-10, 10).unwrap();
        assert_eq!(e.x, 0.5);
        assert_eq!(e.iterations, 0);
    }

    #[test]
    fn iteration_cap() {
        let err = golden_section_max(|x| x, 0.0, 1.0, 1e-12, 5).unwrap_err();
        assert!(matches!(
            err,
            Error::OptimizerNonConvergence { iterations: 5, .. }
        ));
    }
}
