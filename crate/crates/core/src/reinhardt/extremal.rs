use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{self, dot, norm};
use crate::numerics::{ToleranceProfile, C64};
use crate::polytope::Polyhedron;

/// `(log|z_1|, ..., log|z_n|)`.
pub fn log_map(z: &[C64]) -> Result<Vec<f64>> {
    z.iter()
        .enumerate()
        .map(|(j, c)| {
            let m = c.norm();
            if m == 0.0 {
                Err(Error::AxisPoint { index: j })
            } else {
                Ok(m.ln())
            }
        })
        .collect()
}

fn check_closure(p: &Polyhedron, x0: &[f64], tol: &ToleranceProfile) -> Result<()> {
    if x0.len() != p.dim {
        return Err(Error::InvalidInput(format!("point of R^{} for a polyhedron in R^{}", x0.len(), p.dim)));
    }
    let v = p.max_violation(x0);
    if v > tol.lp_feas_tol {
        return Err(Error::NotInClosure { violation: v });
    }
    Ok(())
}

/// Extremality by the rank of the normals active at `x0`.
pub fn is_extreme(p: &Polyhedron, x0: &[f64], tol: &ToleranceProfile) -> Result<bool> {
    check_closure(p, x0, tol)?;
    let normals: Vec<Vec<f64>> = p
        .active_rows(x0, tol.lp_feas_tol)
        .into_iter()
        .map(|i| p.rows[i].normal.clone())
        .collect();
    Ok(linalg::rank(&normals, 1e-10) == p.dim)
}

/// Supporting functional `<l, x> <= l0` at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub l: Vec<f64>,
    pub l0: f64,
    /// Coordinate playing the role of the last one; `|l[pivot]| = 1`.
    pub pivot: usize,
    /// Coordinate order with the pivot moved last.
    pub permutation: Vec<usize>,
}

/// Average of the unit normals of the active rows, scaled so that the
/// pivot coordinate has modulus one (the sign is kept so the inequality
/// keeps its orientation). The pivot is the last coordinate when its
/// component is nonzero, otherwise the largest component.
pub fn support_at(p: &Polyhedron, x0: &[f64], tol: &ToleranceProfile) -> Result<Support> {
    check_closure(p, x0, tol)?;
    let active = p.active_rows(x0, tol.lp_feas_tol);
    if active.is_empty() {
        return Err(Error::NotOnBoundary { violation: p.max_violation(x0) });
    }
    let n = p.dim;
    let mut l = vec![0.0; n];
    for &i in &active {
        let r = &p.rows[i];
        let s = norm(&r.normal);
        for j in 0..n {
            l[j] += r.normal[j] / s / active.len() as f64;
        }
    }
    let scale = norm(&l);
    if scale <= 1e-12 {
        return Err(Error::NotOnBoundary { violation: 0.0 });
    }
    let pivot = if l[n - 1].abs() > 1e-12 * scale {
        n - 1
    } else {
        (0..n)
            .max_by(|&a, &b| l[a].abs().partial_cmp(&l[b].abs()).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)))
            .expect("n >= 1")
    };
    let s = l[pivot].abs();
    for v in &mut l {
        *v /= s;
    }
    let l0 = dot(&l, x0);
    let mut permutation: Vec<usize> = (0..n).filter(|&j| j != pivot).collect();
    permutation.push(pivot);
    Ok(Support { l, l0, pivot, permutation })
}

/// Smallest `k` in `1..=μ^n` with `|l_j - α_j/k| <= 1/(μk)` for all `j`, `α_j = round(k l_j)`.
pub fn dirichlet(l: &[f64], mu: u64) -> (Vec<i64>, i64) {
    let mu = mu.max(1);
    let limit = mu.saturating_pow(l.len() as u32).max(1);
    let mut best: Option<(f64, Vec<i64>, i64)> = None;
    for k in 1..=limit {
        let kf = k as f64;
        let alpha: Vec<i64> = l.iter().map(|&v| (kf * v).round() as i64).collect();
        let worst = l.iter().zip(&alpha).map(|(&v, &a)| (v - a as f64 / kf).abs() * kf * mu as f64).fold(0.0, f64::max);
        if worst <= 1.0 {
            return (alpha, k as i64);
        }
        if best.as_ref().is_none_or(|b| worst < b.0) {
            best = Some((worst, alpha, k as i64));
        }
    }
    // Only reachable through floating-point rounding at the boundary of the
    // theorem's bound; the best candidate found is within rounding of it.
    let (_, alpha, k) = best.expect("at least one candidate");
    (alpha, k)
}
