use rand::Rng;

use super::{LogPolyhedron, ReinhardtDomain};
use crate::error::{Error, Result};
use crate::numerics::sampling;
use crate::numerics::ToleranceProfile;
use crate::polytope::{Polyhedron, GEOM_TOL};

/// Largest ambient dimension handled by the brute-force hull.
pub const MAX_HULL_DIM: usize = 3;

/// Closed convex hull of the union of the closed pieces, by vertex and ray
/// enumeration of every piece followed by a facet search.
pub(crate) fn hull_polyhedron(d: &ReinhardtDomain) -> Result<Polyhedron> {
    if d.pieces.len() == 1 {
        return Ok(d.pieces[0].poly().clone());
    }
    if d.dim() > MAX_HULL_DIM {
        return Err(Error::ScopeViolation(format!("hull of a union in R^{} (limit {MAX_HULL_DIM})", d.dim())));
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut rays: Vec<Vec<f64>> = Vec::new();
    for p in &d.pieces {
        push_unique(&mut points, p.poly().vertices());
        push_unique(&mut rays, p.poly().rays());
    }
    Polyhedron::from_generators(d.dim(), &points, &rays)
}

fn push_unique(into: &mut Vec<Vec<f64>>, items: Vec<Vec<f64>>) {
    for v in items {
        if !into.iter().any(|u| crate::numerics::linalg::dist(u, &v) < 1e-9) {
            into.push(v);
        }
    }
}

/// Envelope of holomorphy: the Reinhardt domain whose log image is the convex hull of `log D`.
pub fn envelope(d: &ReinhardtDomain) -> Result<ReinhardtDomain> {
    if d.dim() > MAX_HULL_DIM {
        return Err(Error::ScopeViolation(format!("envelope in C^{} (limit {MAX_HULL_DIM})", d.dim())));
    }
    if d.meets_axes.iter().any(|&m| m) {
        return Err(Error::ScopeViolation("envelope of a domain meeting the coordinate axes".into()));
    }
    let hull = hull_polyhedron(d)?;
    ReinhardtDomain::new(vec![LogPolyhedron::new(hull)?], vec![false; d.dim()])
}

/// Whether the union of the pieces equals its convex hull: every hull vertex
/// and a deterministic sample of hull points lie in the closed union.
pub fn is_log_convex(d: &ReinhardtDomain, tol: &ToleranceProfile) -> Result<bool> {
    if d.pieces.len() == 1 {
        return Ok(true);
    }
    let hull = hull_polyhedron(d)?;
    let verts = hull.vertices();
    let rays = hull.rays();
    let slack = tol.lp_feas_tol.max(GEOM_TOL) * 10.0;
    if !verts.iter().all(|v| d.log_closure_contains(v, slack)) {
        return Ok(false);
    }
    let mut rng = sampling::rng(0);
    for _ in 0..2000 {
        let w: Vec<f64> = (0..verts.len()).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = w.iter().sum();
        let mut x = vec![0.0; d.dim()];
        for (v, wi) in verts.iter().zip(&w) {
            for j in 0..x.len() {
                x[j] += v[j] * wi / s;
            }
        }
        for r in &rays {
            let t = rng.gen::<f64>() * 3.0;
            for j in 0..x.len() {
                x[j] += r[j] * t;
            }
        }
        if !d.log_closure_contains(&x, slack) {
            return Ok(false);
        }
    }
    Ok(true)
}
