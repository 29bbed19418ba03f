//! Weak peak functions `exp(1/Log(w/d))` for bounded convex domains, where
//! `w` is the complex pairing with a supporting functional.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sampling::{self, SampleSet, SampleStrategy};
use crate::numerics::{HoloFunction, ToleranceProfile, C64};
use crate::polytope::{HalfSpace, Polyhedron};

/// Bounded convex domain of `C^n`, identified with `R^{2n}` through
/// `z_j = x_{2j} + i x_{2j+1}` (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ConvexBody {
    Polyhedral { poly: Polyhedron, complex_dim: usize },
    Ball { center: Vec<C64>, radius: f64 },
}

pub fn realify(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn complexify(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

impl ConvexBody {
    pub fn polyhedral(rows: Vec<HalfSpace>, complex_dim: usize) -> Result<Self> {
        let poly = Polyhedron::new(2 * complex_dim, rows)?;
        if !poly.is_bounded() {
            return Err(Error::InvalidInput("convex body is unbounded".into()));
        }
        if poly.interior_point().is_none() {
            return Err(Error::InvalidInput("convex body has empty interior".into()));
        }
        Ok(ConvexBody::Polyhedral { poly, complex_dim })
    }

    pub fn ball(center: Vec<C64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0) {
            return Err(Error::InvalidInput("ball needs a centre and a positive radius".into()));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    /// The box `prod [-1,1]^2`, a real-convex outer model of the polydisc.
    pub fn cube(complex_dim: usize) -> Self {
        let d = 2 * complex_dim;
        Self::polyhedral(Polyhedron::boxed(&vec![-1.0; d], &vec![1.0; d]).rows, complex_dim).expect("cube is valid")
    }

    pub fn complex_dim(&self) -> usize {
        match self {
            ConvexBody::Polyhedral { complex_dim, .. } => *complex_dim,
            ConvexBody::Ball { center, .. } => center.len(),
        }
    }

    /// Signed boundary distance: negative inside, zero on the boundary.
    pub fn violation(&self, z: &[C64]) -> f64 {
        match self {
            ConvexBody::Polyhedral { poly, .. } => poly.max_violation(&realify(z)),
            ConvexBody::Ball { center, radius } => {
                let d2: f64 = z.iter().zip(center).map(|(a, b)| (a - b).norm_sqr()).sum();
                d2.sqrt() - radius
            }
        }
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        z.len() == self.complex_dim() && self.violation(z) < 0.0
    }

    pub fn sample_interior(&self, count: usize, seed: u64) -> SampleSet {
        let mut rng = sampling::rng(seed);
        let mut points = Vec::with_capacity(count);
        match self {
            ConvexBody::Ball { center, radius } => {
                while points.len() < count {
                    let off = sampling::ball_offset(&mut rng, 2 * center.len(), *radius);
                    let z: Vec<C64> = center.iter().zip(complexify(&off)).map(|(c, o)| c + o).collect();
                    if self.contains(&z) {
                        points.push(z);
                    }
                }
            }
            ConvexBody::Polyhedral { poly, .. } => {
                let verts = poly.vertices();
                let d = poly.dim;
                let lo: Vec<f64> = (0..d).map(|j| verts.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min)).collect();
                let hi: Vec<f64> = (0..d).map(|j| verts.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
                while points.len() < count {
                    let x: Vec<f64> = lo.iter().zip(&hi).map(|(&a, &b)| rng.gen_range(a..b)).collect();
                    if poly.contains_strictly(&x, 0.0) {
                        points.push(complexify(&x));
                    }
                }
            }
        }
        SampleSet { points, seed, strategy: SampleStrategy::Interior }
    }

    /// `r·B`.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        match self {
            ConvexBody::Polyhedral { poly, complex_dim } => {
                let rows = poly.rows.iter().map(|h| HalfSpace::new(h.normal.clone(), h.offset * r)).collect();
                Self::polyhedral(rows, *complex_dim)
            }
            ConvexBody::Ball { center, radius } => Self::ball(center.iter().map(|c| c * r).collect(), radius * r),
        }
    }
}

/// Complex normal `ν` with `Re<z - a, ν> < 0` on the body.
pub fn support_complex(body: &ConvexBody, a: &[C64], tol: &ToleranceProfile) -> Result<Vec<C64>> {
    if a.len() != body.complex_dim() {
        return Err(Error::InvalidInput("boundary point has the wrong dimension".into()));
    }
    let v = body.violation(a);
    let band = tol.boundary_band.max(tol.lp_feas_tol);
    if v.abs() > band {
        return Err(Error::NotOnBoundary { violation: v });
    }
    match body {
        ConvexBody::Ball { center, radius } => Ok(a.iter().zip(center).map(|(x, c)| (x - c) / *radius).collect()),
        ConvexBody::Polyhedral { poly, .. } => {
            let x = realify(a);
            let active = poly.active_rows(&x, band);
            let mut n = vec![0.0; poly.dim];
            for &i in &active {
                let h = &poly.rows[i];
                let s = crate::numerics::linalg::norm(&h.normal);
                for (nj, hj) in n.iter_mut().zip(&h.normal) {
                    *nj += hj / s / active.len() as f64;
                }
            }
            Ok(complexify(&n))
        }
    }
}

/// Exact diameter of the planar image `w(B)` with `w(z) = <z - a, ν>`.
pub fn image_diameter(body: &ConvexBody, nu: &[C64], a: &[C64]) -> f64 {
    match body {
        ConvexBody::Ball { radius, .. } => 2.0 * radius * nu.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        ConvexBody::Polyhedral { poly, .. } => {
            let pair = HoloFunction::AffinePairing { nu: nu.to_vec(), a: a.to_vec() };
            let img: Vec<C64> = poly
                .vertices()
                .iter()
                .map(|v| pair.evaluate(&complexify(v)).expect("dimensions agree"))
                .collect();
            let mut d: f64 = 0.0;
            for (i, p) in img.iter().enumerate() {
                for q in &img[i + 1..] {
                    d = d.max((p - q).norm());
                }
            }
            d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakPeak {
    pub function: HoloFunction,
    pub nu: Vec<C64>,
    pub diameter: f64,
}

/// `φ = exp(1 / Log(<z - a, ν> / d))`: `|φ| < 1` on the body, `φ → 1` at `a`.
pub fn weak_peak(body: &ConvexBody, a: &[C64], tol: &ToleranceProfile) -> Result<WeakPeak> {
    let nu = support_complex(body, a, tol)?;
    let diameter = image_diameter(body, &nu, a);
    if !(diameter > 0.0) {
        return Err(Error::DomainViolation("degenerate projected image".into()));
    }
    let function = HoloFunction::ExpInvLog {
        inner: Box::new(HoloFunction::AffinePairing { nu: nu.clone(), a: a.to_vec() }),
        diameter,
    };
    Ok(WeakPeak { function, nu, diameter })
}

/// `|φ(a - t·ν)|` for each `t`: the approach to `a` along the inward normal.
pub fn normal_ray_profile(wp: &WeakPeak, a: &[C64], ts: &[f64], tol: &ToleranceProfile) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| {
            let z: Vec<C64> = a.iter().zip(&wp.nu).map(|(x, n)| x - n * t).collect();
            wp.function.evaluate_with(&z, tol).map(|v| v.norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn support_examples() {
        let ball = ConvexBody::ball(vec![c(0.0, 0.0), c(0.0, 0.0)], 1.0).unwrap();
        let a = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let nu = support_complex(&ball, &a, &tol()).unwrap();
        assert!(nu.iter().zip(&a).all(|(x, y)| (x - y).norm() < 1e-15));

        let cube = ConvexBody::cube(2);
        let nu = support_complex(&cube, &[c(1.0, 0.0), c(0.0, 0.0)], &tol()).unwrap();
        assert_eq!(nu, vec![c(1.0, 0.0), c(0.0, 0.0)]);

        assert!(matches!(
            support_complex(&ball, &[c(0.1, 0.0), c(0.0, 0.0)], &tol()),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn ball_value_at_origin() {
        let ball = ConvexBody::ball(vec![c(0.0, 0.0), c(0.0, 0.0)], 1.0).unwrap();
        let wp = weak_peak(&ball, &[c(1.0, 0.0), c(0.0, 0.0)], &tol()).unwrap();
        assert_eq!(wp.diameter, 2.0);
        let l = 0.5f64.ln();
        let expected = (l / (l * l + std::f64::consts::PI.powi(2))).exp();
        let v = wp.function.evaluate(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap().norm();
        assert!((v - expected).abs() < 1e-14);
        assert!((v - 0.9352).abs() < 5e-5);
    }

    #[test]
    fn disc_samples_below_one() {
        let disc = ConvexBody::ball(vec![c(0.0, 0.0)], 1.0).unwrap();
        let wp = weak_peak(&disc, &[c(1.0, 0.0)], &tol()).unwrap();
        for z in disc.sample_interior(2000, 5).points {
            assert!(wp.function.evaluate(&z).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn cube_diameter_is_vertex_attained() {
        let cube = ConvexBody::cube(1);
        let wp = weak_peak(&cube, &[c(1.0, 0.0)], &tol()).unwrap();
        assert!((wp.diameter - 8f64.sqrt()).abs() < 1e-12);
    }
}
