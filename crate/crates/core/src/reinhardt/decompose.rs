use serde::{Deserialize, Serialize};

use super::extremal::is_extreme;
use crate::error::{Error, Result};
use crate::numerics::linalg::{self, dot, norm};
use crate::numerics::ToleranceProfile;
use crate::polytope::Polyhedron;

/// `x0 = Σ p_j x_j + α t0` with extreme `x_j`, `p_j > 0`, `Σ p_j = 1`, `α` a recession direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub vertices: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Unit recession direction, or zero when `t0 = 0`.
    pub direction: Vec<f64>,
    pub t0: f64,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut x = linalg::scale(self.t0, &self.direction);
        for (v, p) in self.vertices.iter().zip(&self.weights) {
            x = linalg::axpy(*p, v, &x);
        }
        x
    }
}

/// Decomposes a point of a pointed polyhedron: march against a recession
/// direction to the boundary, then split inside the face, recursively.
pub fn decompose(p: &Polyhedron, x0: &[f64], tol: &ToleranceProfile) -> Result<Decomposition> {
    if x0.len() != p.dim {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let v = p.max_violation(x0);
    if v > tol.lp_feas_tol {
        return Err(Error::NotInSet { violation: v });
    }
    let verts = p.vertices();
    let rays = p.rays();
    let (parts, rec) = split(p, &verts, &rays, x0, tol, p.dim + 2)?;

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (x, w) in parts {
        if w <= 0.0 {
            continue;
        }
        match vertices.iter().position(|u| linalg::dist(u, &x) < 1e-12) {
            Some(i) => weights[i] += w,
            None => {
                vertices.push(x);
                weights.push(w);
            }
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let t0 = norm(&rec);
    let direction = if t0 > 0.0 { linalg::scale(1.0 / t0, &rec) } else { vec![0.0; p.dim] };
    Ok(Decomposition { vertices, weights, direction, t0 })
}

type Parts = (Vec<(Vec<f64>, f64)>, Vec<f64>);

fn split(
    p: &Polyhedron,
    verts: &[Vec<f64>],
    rays: &[Vec<f64>],
    y: &[f64],
    tol: &ToleranceProfile,
    budget: usize,
) -> Result<Parts> {
    let band = tol.lp_feas_tol;
    if is_extreme(p, y, tol)? {
        return Ok((vec![(y.to_vec(), 1.0)], vec![0.0; p.dim]));
    }
    if budget == 0 {
        return Err(Error::NotInSet { violation: 0.0 });
    }
    let active = p.active_rows(y, band);
    let on_face = |x: &[f64]| active.iter().all(|&i| p.rows[i].violation(x).abs() <= 1e-8);
    let face_rays: Vec<&Vec<f64>> = rays
        .iter()
        .filter(|r| active.iter().all(|&i| dot(&p.rows[i].normal, r).abs() <= 1e-9 * norm(&p.rows[i].normal)))
        .collect();

    if !face_rays.is_empty() {
        let mut alpha = vec![0.0; p.dim];
        for r in &face_rays {
            alpha = linalg::axpy(1.0, r, &alpha);
        }
        let alpha = linalg::scale(1.0 / norm(&alpha), &alpha);
        let back = linalg::scale(-1.0, &alpha);
        let t = exit_time(p, &active, y, &back)
            .ok_or_else(|| Error::InvalidInput("polyhedron contains a line".into()))?;
        let y0 = linalg::axpy(t, &back, y);
        let (parts, rec) = split(p, verts, rays, &y0, tol, budget - 1)?;
        return Ok((parts, linalg::axpy(t, &alpha, &rec)));
    }

    let v = verts
        .iter()
        .find(|v| on_face(v))
        .ok_or(Error::NotInSet { violation: 0.0 })?
        .clone();
    let dir = linalg::sub(y, &v);
    if norm(&dir) < 1e-12 {
        return Ok((vec![(v, 1.0)], vec![0.0; p.dim]));
    }
    let s = exit_time(p, &active, y, &dir).ok_or_else(|| Error::InvalidInput("unbounded face without rays".into()))?;
    let w = linalg::axpy(s, &dir, y);
    let (parts, rec) = split(p, verts, rays, &w, tol, budget - 1)?;
    let a = 1.0 / (1.0 + s);
    let mut out: Vec<(Vec<f64>, f64)> = parts.into_iter().map(|(x, q)| (x, q * a)).collect();
    out.push((v, s * a));
    Ok((out, linalg::scale(a, &rec)))
}

/// Largest `t >= 0` with `y + t·dir` feasible; `dir` lies in the face of the
/// rows active at `y`, so those rows are skipped.
fn exit_time(p: &Polyhedron, active: &[usize], y: &[f64], dir: &[f64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, r) in p.rows.iter().enumerate() {
        let rate = dot(&r.normal, dir);
        if active.contains(&i) || rate <= 1e-12 * norm(&r.normal) * norm(dir) {
            continue;
        }
        let slack = (r.offset - dot(&r.normal, y)).max(0.0);
        let t = slack / rate;
        best = Some(best.map_or(t, |b: f64| b.min(t)));
    }
    best
}
