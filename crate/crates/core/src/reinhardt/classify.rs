use serde::{Deserialize, Serialize};

use super::envelope::{hull_polyhedron, is_log_convex};
use super::extremal::is_extreme;
use super::ReinhardtDomain;
use crate::error::{Error, Result};
use crate::numerics::{ToleranceProfile, C64};
use crate::polytope::{HalfSpace, Polyhedron};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeakClass {
    Peak,
    NotPeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakVerdict {
    pub class: PeakClass,
    pub reason: String,
    /// Set when several coordinates vanish and the axis rule was iterated.
    pub extrapolated: bool,
}

impl PeakVerdict {
    fn new(class: PeakClass, reason: impl Into<String>, extrapolated: bool) -> Self {
        Self { class, reason: reason.into(), extrapolated }
    }
}

/// Peak-point classification for `A(D)` on a pseudoconvex Reinhardt domain.
pub fn classify_peak(d: &ReinhardtDomain, z: &[C64], tol: &ToleranceProfile) -> Result<PeakVerdict> {
    if z.len() != d.dim() {
        return Err(Error::InvalidInput(format!("point of C^{} for a domain in C^{}", z.len(), d.dim())));
    }
    if !is_log_convex(d, tol)? {
        return Err(Error::InvalidInput("classification needs a log-convex (pseudoconvex) domain".into()));
    }
    let g = hull_polyhedron(d)?;
    classify_in(&g, z, tol)
}

fn classify_in(g: &Polyhedron, z: &[C64], tol: &ToleranceProfile) -> Result<PeakVerdict> {
    let zeros: Vec<usize> = (0..z.len()).filter(|&j| z[j].norm() == 0.0).collect();
    if zeros.len() == z.len() {
        if !origin_in_closure(g) {
            return Err(Error::NotInClosure { violation: f64::INFINITY });
        }
        return Ok(PeakVerdict::new(PeakClass::NotPeak, "the origin is never a peak point", false));
    }
    if zeros.is_empty() {
        let x: Vec<f64> = z.iter().map(|c| c.norm().ln()).collect();
        let extreme = is_extreme(g, &x, tol)?;
        let class = if extreme { PeakClass::Peak } else { PeakClass::NotPeak };
        let reason = if extreme { "log z is an extreme point" } else { "log z is not an extreme point" };
        return Ok(PeakVerdict::new(class, reason, false));
    }

    // Vanish one coordinate at a time (the last one first); iterating for
    // several zeros extrapolates the single-zero rule.
    let j = *zeros.last().expect("nonempty");
    let extrapolated = zeros.len() > 1;
    let (proj, slice_rows) = axis_projection(g, j, tol)?;
    let zp: Vec<C64> = z.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, c)| *c).collect();
    let inner = classify_in(&proj, &zp, tol)?;
    if inner.class == PeakClass::NotPeak {
        return Ok(PeakVerdict::new(
            PeakClass::NotPeak,
            format!("projection drops coordinate {j}: {}", inner.reason),
            extrapolated || inner.extrapolated,
        ));
    }
    // Slice {z'} x C: the largest |z_j| over the closure, from the log model.
    let xp: Vec<f64> = zp.iter().map(|c| if c.norm() == 0.0 { -1e6 } else { c.norm().ln() }).collect();
    let ymax = slice_max(&slice_rows, &xp);
    match ymax {
        // A nonempty polyhedral slice is never a single point; only an empty
        // slice (z' outside the projection) could be, and that was rejected above.
        None => Ok(PeakVerdict::new(PeakClass::NotPeak, format!("fiber slice over z' is unbounded in |z_{j}|"), extrapolated)),
        Some(y) => Ok(PeakVerdict::new(
            PeakClass::NotPeak,
            format!("fiber slice over z' reaches |z_{j}| = {:.6e}", y.exp()),
            extrapolated || inner.extrapolated,
        )),
    }
}

/// Projection of `G` along `-e_j` (requires `-e_j` to be a recession
/// direction, i.e. the closure meets `{z_j = 0}`), and the rows bounding
/// `x_j` from above as `(row restricted to the other coordinates, a_j, b)`.
#[allow(clippy::type_complexity)]
fn axis_projection(g: &Polyhedron, j: usize, tol: &ToleranceProfile) -> Result<(Polyhedron, Vec<(Vec<f64>, f64, f64)>)> {
    let mut kept = Vec::new();
    let mut slice = Vec::new();
    for r in &g.rows {
        let aj = r.normal[j];
        let scale = crate::numerics::linalg::norm(&r.normal);
        if aj < -tol.lp_feas_tol * scale {
            return Err(Error::NotInClosure { violation: -aj });
        }
        let rest: Vec<f64> = r.normal.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| *v).collect();
        if aj <= tol.lp_feas_tol * scale {
            kept.push(HalfSpace::new(rest, r.offset));
        } else {
            slice.push((rest, aj, r.offset));
        }
    }
    Ok((Polyhedron::new(g.dim - 1, kept)?, slice))
}

/// `max y` subject to `a_j y <= b - <rest, x'>` over the slice rows; `None` when no row bounds it.
fn slice_max(rows: &[(Vec<f64>, f64, f64)], xp: &[f64]) -> Option<f64> {
    rows.iter()
        .map(|(rest, aj, b)| (b - crate::numerics::linalg::dot(rest, xp)) / aj)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
}

/// `0 ∈ closure(D)` iff some recession direction is negative in every
/// coordinate, i.e. the sum of the extreme rays is.
fn origin_in_closure(g: &Polyhedron) -> bool {
    let rays = g.rays();
    let mut sum = vec![0.0; g.dim];
    for r in &rays {
        for k in 0..g.dim {
            sum[k] += r[k];
        }
    }
    !rays.is_empty() && sum.iter().all(|&v| v < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reinhardt::LogPolyhedron;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn t() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn bidisc_truth_table() {
        let d = ReinhardtDomain::polydisc(2);
        let cases = [
            (vec![c(1.0, 0.0), C64::from_polar(1.0, 0.7)], PeakClass::Peak),
            (vec![c(1.0, 0.0), c(0.5, 0.0)], PeakClass::NotPeak),
            (vec![c(1.0, 0.0), c(0.0, 0.0)], PeakClass::NotPeak),
            (vec![c(0.0, 0.0), c(0.0, 1.0)], PeakClass::NotPeak),
            (vec![c(0.0, 0.0), c(0.0, 0.0)], PeakClass::NotPeak),
        ];
        for (z, want) in cases {
            assert_eq!(classify_peak(&d, &z, &t()).unwrap().class, want, "{z:?}");
        }
    }

    #[test]
    fn log_square_vertices() {
        let p = LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).unwrap();
        let d = ReinhardtDomain::single(p, vec![false, false]).unwrap();
        let e1 = (-1.0f64).exp();
        assert_eq!(classify_peak(&d, &[c(e1, 0.0), c(0.0, 1.0)], &t()).unwrap().class, PeakClass::Peak);
        assert_eq!(classify_peak(&d, &[c(1.0, 0.0), c(0.7, 0.0)], &t()).unwrap().class, PeakClass::NotPeak);
        assert!(matches!(classify_peak(&d, &[c(1.0, 0.0), c(0.0, 0.0)], &t()), Err(Error::NotInClosure { .. })));
        assert!(matches!(classify_peak(&d, &[c(0.0, 0.0), c(0.0, 0.0)], &t()), Err(Error::NotInClosure { .. })));
    }
}
