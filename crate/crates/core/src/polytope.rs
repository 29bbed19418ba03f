//! Convex polyhedra in H-representation at desk scale (dimension <= 4).
//!
//! Vertices and extreme rays are enumerated by brute force over row subsets,
//! and hulls are rebuilt from generators by brute force over generator
//! subsets. Linear programs are solved on the generator form, which is exact
//! for pointed polyhedra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{self, combinations, dot, norm};

/// `<normal, x> <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed distance past the boundary (positive outside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let n = norm(&self.normal);
        if n == 0.0 {
            return -self.offset;
        }
        (dot(&self.normal, x) - self.offset) / n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub dim: usize,
    pub rows: Vec<HalfSpace>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, argmax: Vec<f64> },
    Unbounded { direction: Vec<f64> },
    Infeasible,
}

/// Tolerance used to decide whether enumerated candidates are feasible.
pub const GEOM_TOL: f64 = 1e-9;

impl Polyhedron {
    pub fn new(dim: usize, rows: Vec<HalfSpace>) -> Result<Self> {
        if rows.iter().any(|r| r.normal.len() != dim) {
            return Err(Error::InvalidInput(format!("every row needs {dim} coefficients")));
        }
        Ok(Self { dim, rows })
    }

    pub fn from_ab(a: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidInput("A and b must be nonempty and the same length".into()));
        }
        let dim = a[0].len();
        Self::new(dim, a.iter().zip(b).map(|(r, &o)| HalfSpace::new(r.clone(), o)).collect())
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Self {
        let dim = lo.len();
        let mut rows = Vec::new();
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            rows.push(HalfSpace::new(e.clone(), hi[j]));
            e[j] = -1.0;
            rows.push(HalfSpace::new(e, -lo[j]));
        }
        Self { dim, rows }
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.violation(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.max_violation(x) <= tol
    }

    pub fn contains_strictly(&self, x: &[f64], tol: f64) -> bool {
        self.max_violation(x) < -tol
    }

    pub fn active_rows(&self, x: &[f64], tol: f64) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].violation(x).abs() <= tol).collect()
    }

    /// Vertices: feasible solutions of every nonsingular `dim x dim` row subsystem.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        if self.dim == 0 {
            return vec![Vec::new()];
        }
        for idx in combinations(self.rows.len(), self.dim) {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| self.rows[i].normal.clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| self.rows[i].offset).collect();
            if let Some(x) = linalg::solve(&a, &b, 1e-12) {
                if self.contains(&x, GEOM_TOL) && !out.iter().any(|v| linalg::dist(v, &x) < 1e-8) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Unit extreme rays of the recession cone `{r : A r <= 0}` (pointed case).
    pub fn rays(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        if self.dim == 0 {
            return out;
        }
        for idx in combinations(self.rows.len(), self.dim - 1) {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| self.rows[i].normal.clone()).collect();
            let ns = linalg::null_space(&a, self.dim, 1e-12);
            if ns.len() != 1 {
                continue;
            }
            let n0 = norm(&ns[0]);
            for sign in [1.0, -1.0] {
                let r: Vec<f64> = ns[0].iter().map(|v| sign * v / n0).collect();
                let ok = self.rows.iter().all(|row| dot(&row.normal, &r) <= GEOM_TOL * (1.0 + norm(&row.normal)));
                if ok && !out.iter().any(|v| linalg::dist(v, &r) < 1e-8) {
                    out.push(r);
                }
            }
        }
        out
    }

    /// Maximize `<c, x>` over the polyhedron.
    pub fn lp_max(&self, c: &[f64]) -> LpOutcome {
        for r in self.rays() {
            if dot(c, &r) > GEOM_TOL {
                return LpOutcome::Unbounded { direction: r };
            }
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for v in self.vertices() {
            let val = dot(c, &v);
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, v));
            }
        }
        match best {
            Some((value, argmax)) => LpOutcome::Optimal { value, argmax },
            None => LpOutcome::Infeasible,
        }
    }

    /// Centroid of the vertices plus the sum of extreme rays, which lies in
    /// the relative interior; `None` unless it is strictly interior.
    pub fn interior_point(&self) -> Option<Vec<f64>> {
        let verts = self.vertices();
        if verts.is_empty() {
            return None;
        }
        let mut x = vec![0.0; self.dim];
        for v in &verts {
            for j in 0..self.dim {
                x[j] += v[j] / verts.len() as f64;
            }
        }
        for r in self.rays() {
            for j in 0..self.dim {
                x[j] += r[j];
            }
        }
        self.contains_strictly(&x, GEOM_TOL).then_some(x)
    }

    /// True when every recession direction has nonpositive coordinates.
    pub fn bounded_above(&self) -> bool {
        self.rays().iter().all(|r| r.iter().all(|&v| v <= GEOM_TOL))
    }

    pub fn is_bounded(&self) -> bool {
        self.rays().is_empty() && !self.vertices().is_empty()
    }

    /// Largest `t ≥ 0` with `x + t·dir` feasible, or `None` if the ray never exits.
    pub fn ray_exit(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        let mut best: Option<f64> = None;
        for r in &self.rows {
            let rate = dot(&r.normal, dir);
            if rate <= GEOM_TOL * norm(&r.normal) * norm(dir) {
                continue;
            }
            let t = (r.offset - dot(&r.normal, x)).max(0.0) / rate;
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
        best
    }

    /// Largest distance between two vertices.
    pub fn vertex_diameter(&self) -> f64 {
        let v = self.vertices();
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(linalg::dist(&v[i], &v[j]));
            }
        }
        d
    }

    /// H-representation of `conv(points) + cone(rays)`; the result must be full-dimensional.
    pub fn from_generators(dim: usize, points: &[Vec<f64>], rays: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("hull needs at least one point".into()));
        }
        if affine_rank(points, rays) < dim {
            return Err(Error::InvalidInput("generators are not full-dimensional".into()));
        }
        let gens: Vec<(bool, &Vec<f64>)> =
            points.iter().map(|p| (true, p)).chain(rays.iter().map(|r| (false, r))).collect();
        let mut rows: Vec<HalfSpace> = Vec::new();
        for idx in combinations(gens.len(), dim) {
            if !idx.iter().any(|&i| gens[i].0) {
                continue;
            }
            let m: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| {
                    let (is_point, g) = gens[i];
                    let mut r = g.clone();
                    r.push(if is_point { -1.0 } else { 0.0 });
                    r
                })
                .collect();
            let ns = linalg::null_space(&m, dim + 1, 1e-12);
            if ns.len() != 1 {
                continue;
            }
            let a = &ns[0][..dim];
            let an = norm(a);
            if an < 1e-12 {
                continue;
            }
            let a: Vec<f64> = a.iter().map(|v| v / an).collect();
            let b = ns[0][dim] / an;
            let side = |s: f64| {
                points.iter().all(|p| s * (dot(&a, p) - b) <= GEOM_TOL)
                    && rays.iter().all(|r| s * dot(&a, r) <= GEOM_TOL)
            };
            let sign = if side(1.0) {
                1.0
            } else if side(-1.0) {
                -1.0
            } else {
                continue;
            };
            let h = HalfSpace::new(a.iter().map(|v| sign * v).collect(), sign * b);
            let dup = rows.iter().any(|r| {
                linalg::dist(&r.normal, &h.normal) < 1e-9 && (r.offset - h.offset).abs() < 1e-9
            });
            if !dup {
                rows.push(h);
            }
        }
        Polyhedron::new(dim, rows)
    }
}

/// Dimension of the affine hull of `points` together with directions `rays`.
pub fn affine_rank(points: &[Vec<f64>], rays: &[Vec<f64>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let mut dirs: Vec<Vec<f64>> = points[1..].iter().map(|p| linalg::sub(p, base)).collect();
    dirs.extend(rays.iter().cloned());
    linalg::rank(&dirs, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polyhedron {
        Polyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0])
    }

    #[test]
    fn square_vertices_and_no_rays() {
        let p = unit_square();
        assert_eq!(p.vertices().len(), 4);
        assert!(p.rays().is_empty());
        assert!(p.is_bounded());
        assert!((p.vertex_diameter() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn orthant_rays() {
        let p = Polyhedron::from_ab(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        let mut rays = p.rays();
        rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(rays, vec![vec![-1.0, 0.0], vec![0.0, -1.0]]);
        assert!(p.bounded_above());
        assert_eq!(p.vertices(), vec![vec![0.0, 0.0]]);
        let x = p.interior_point().unwrap();
        assert!(x.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn lp_max_cases() {
        let p = unit_square();
        match p.lp_max(&[1.0, 2.0]) {
            LpOutcome::Optimal { value, argmax } => {
                assert!((value - 3.0).abs() < 1e-12);
                assert_eq!(argmax, vec![1.0, 1.0]);
            }
            other => panic!("{other:?}"),
        }
        let q = Polyhedron::from_ab(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        assert!(matches!(q.lp_max(&[-1.0, 0.0]), LpOutcome::Unbounded { .. }));
    }

    #[test]
    fn hull_round_trip() {
        let p = unit_square();
        let h = Polyhedron::from_generators(2, &p.vertices(), &[]).unwrap();
        assert_eq!(h.rows.len(), 4);
        for x in [[0.5, 0.5], [0.0, 1.0], [1.0, 0.3]] {
            assert!(h.contains(&x, 1e-12));
        }
        assert!(!h.contains(&[1.1, 0.5], 1e-9));
    }

    #[test]
    fn hull_with_rays() {
        let h = Polyhedron::from_generators(2, &[vec![0.0, 0.0]], &[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(h.contains(&[-5.0, -3.0], 1e-12));
        assert!(!h.contains(&[0.1, -3.0], 1e-9));
    }

    #[test]
    fn degenerate_hull_rejected() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        assert!(Polyhedron::from_generators(2, &pts, &[]).is_err());
        assert_eq!(affine_rank(&pts, &[]), 1);
    }

    #[test]
    fn empty_interior() {
        let p = Polyhedron::boxed(&[0.0, 0.0], &[1.0, 0.0]);
        assert!(p.interior_point().is_none());
    }
}
