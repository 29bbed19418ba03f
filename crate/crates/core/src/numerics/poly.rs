use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ToleranceProfile, C64};
use crate::error::{Error, Result};

/// Fixed start-angle offset (radians) for the initial circle of guesses.
/// Irrational so that no start point lands on a symmetry axis of the input.
const START_ROTATION: f64 = 0.618_033_988_749_894_9;

/// Monic complex polynomial `t^n + c[n-1] t^(n-1) + ... + c[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    /// `coeffs[k]` is the coefficient of `t^k` for `k < n`; the leading one is implicit.
    pub fn monic(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
        }
        Ok(Self { coeffs })
    }

    /// `prod (t - r)` over the given roots.
    pub fn from_roots(roots: &[C64]) -> Result<Self> {
        let mut full = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); full.len() + 1];
            for (k, &c) in full.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            full = next;
        }
        full.pop();
        Self::monic(full)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation of `p(t)` and `p'(t)`.
    pub fn eval_with_derivative(&self, t: C64) -> (C64, C64) {
        let mut p = C64::new(1.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.eval_with_derivative(t).0
    }

    /// `(p^(k)(t), p^(k+1)(t))`.
    fn eval_derivatives(&self, k: usize, t: C64) -> (C64, C64) {
        let n = self.degree();
        let falling = |i: usize, m: usize| -> f64 { ((i + 1 - m.min(i + 1))..=i).map(|x| x as f64).product::<f64>() };
        let coeff = |i: usize| if i == n { C64::new(1.0, 0.0) } else { self.coeffs[i] };
        let mut v = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for i in (0..=n).rev() {
            if i > k {
                d = d * t + coeff(i) * falling(i, k + 1);
            }
            if i >= k {
                v = v * t + coeff(i) * falling(i, k);
            }
        }
        (v, d)
    }

    /// Newton on `p^(s-1)` from `t`.
    fn refine_multiple(&self, mut t: C64, s: usize) -> C64 {
        for _ in 0..50 {
            let (v, d) = self.eval_derivatives(s - 1, t);
            let step = v / d;
            if !step.is_finite() {
                break;
            }
            t -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (t.norm() + f64::MIN_POSITIVE) {
                break;
            }
        }
        t
    }

    /// Rounding-level bound on the error of evaluating `p(t)` in floating point.
    fn rounding_bound(&self, t: C64) -> f64 {
        let r = t.norm();
        let mut acc = 1.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        4.0 * (self.degree() as f64 + 1.0) * f64::EPSILON * acc
    }
}

/// All roots of a monic polynomial, with multiplicity, by Aberth–Ehrlich iteration.
///
/// Start points sit on the circle of radius `1 + max|coeff|` (a Cauchy bound)
/// at angles `2πk/n + START_ROTATION`. Roots are returned sorted by modulus
/// descending, then argument ascending.
pub fn roots(p: &ComplexPoly, tol: &ToleranceProfile) -> Result<Vec<C64>> {
    roots_with_rotation(p, tol, START_ROTATION)
}

/// Variant with a caller-chosen start rotation, for retries after
/// [`Error::NonConvergence`].
pub fn roots_with_rotation(p: &ComplexPoly, tol: &ToleranceProfile, rotation: f64) -> Result<Vec<C64>> {
    let n = p.degree();
    if n == 1 {
        return Ok(vec![-p.coeffs[0]]);
    }
    let radius = 1.0 + p.max_coeff_modulus();
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + rotation))
        .collect();
    let target = tol.root_converge * (1.0 + p.max_coeff_modulus());

    // Iterate each approximation until it stagnates at rounding level, so that
    // multiple roots collapse to tight clusters before merging.
    let mut frozen = vec![false; n];
    for _ in 0..tol.max_iterations {
        if frozen.iter().all(|&f| f) {
            break;
        }
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(z[k]);
            if val.norm() <= p.rounding_bound(z[k]) {
                frozen[k] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: C64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                if step.norm() <= 4.0 * f64::EPSILON * (z[k].norm() + f64::MIN_POSITIVE) {
                    frozen[k] = true;
                }
            } else {
                // derivative vanished: nudge off the critical point
                z[k] += C64::new(target.sqrt(), target.sqrt());
            }
        }
    }
    let residual_ok = |r: C64| p.eval(r).norm() <= target.max(p.rounding_bound(r));
    if !z.iter().all(|&r| residual_ok(r)) {
        return Err(Error::NonConvergence { iterations: tol.max_iterations });
    }
    merge_clusters(p, &mut z);
    sort_roots(&mut z);
    Ok(z)
}

/// Approximations of a root of multiplicity `s` scatter at distance
/// ~eps^(1/s). The root is a simple zero of `p^(s-1)`, so Newton on that
/// derivative from the cluster mean recovers it to working precision.
/// A merge is kept only if the refined residual is no worse than the members'.
fn merge_clusters(p: &ComplexPoly, z: &mut [C64]) {
    let n = z.len();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let scale = CLUSTER_SCALE * (1.0 + z[i].norm());
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (z[j] - z[i]).norm() <= scale)
            .collect();
        if members.len() > 1 {
            let mean = members.iter().map(|&j| z[j]).sum::<C64>() / members.len() as f64;
            let mean = p.refine_multiple(mean, members.len());
            let worst = members.iter().map(|&j| p.eval(z[j]).norm()).fold(0.0, f64::max);
            if p.eval(mean).norm() <= 4.0 * worst.max(p.rounding_bound(mean)) {
                for &j in &members {
                    z[j] = mean;
                    assigned[j] = true;
                }
            }
        }
    }
}

/// Relative radius within which approximations are candidates for one multiple root.
const CLUSTER_SCALE: f64 = 1e-4;

pub(crate) fn sort_roots(z: &mut [C64]) {
    z.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close_multiset(got: &[C64], want: &[C64], eps: f64) -> bool {
        let mut used = vec![false; want.len()];
        got.iter().all(|g| {
            match want.iter().enumerate().position(|(i, w)| !used[i] && (g - w).norm() < eps) {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
    }

    #[test]
    fn double_root() {
        let p = ComplexPoly::monic(vec![c(1.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let r = roots(&p, &ToleranceProfile::default()).unwrap();
        assert!(close_multiset(&r, &[c(1.0, 0.0), c(1.0, 0.0)], 1e-12), "{r:?}");
    }

    #[test]
    fn triple_zero() {
        let p = ComplexPoly::monic(vec![c(0.0, 0.0); 3]).unwrap();
        let r = roots(&p, &ToleranceProfile::default()).unwrap();
        assert!(r.iter().all(|z| z.norm() < 1e-12), "{r:?}");
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn imaginary_pair() {
        let p = ComplexPoly::monic(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let r = roots(&p, &ToleranceProfile::default()).unwrap();
        assert!(close_multiset(&r, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-12));
        // modulus ties broken by argument ascending
        assert!(r[0].im < 0.0);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(ComplexPoly::monic(vec![]).is_err());
    }

    #[test]
    fn from_roots_matches_expansion() {
        let p = ComplexPoly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs(), &[c(1.0, 0.0), c(-2.0, 0.0)]);
    }

    #[test]
    fn residual_postcondition() {
        let p = ComplexPoly::monic(vec![c(0.3, -0.2), c(-0.7, 0.1), c(0.05, 0.9), c(0.4, 0.4)]).unwrap();
        let tol = ToleranceProfile::default();
        let r = roots(&p, &tol).unwrap();
        for z in r {
            assert!(p.eval(z).norm() <= tol.root_converge * (1.0 + p.max_coeff_modulus()));
        }
    }
}
