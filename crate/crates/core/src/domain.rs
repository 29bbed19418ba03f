//! Unified view of the domains the toolkit samples and verifies on.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::cconvex::{complexify, realify, ConvexBody};
use crate::numerics::sampling::{self, SampleSet, SampleStrategy};
use crate::numerics::{ToleranceProfile, C64};
use crate::polytope::Polyhedron;
use crate::reinhardt::{exp_point, ReinhardtDomain};
use crate::sympoly::{self, MembershipKind};

const MAX_REJECTIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    SymmetrizedPolydisc { n: usize },
    Polydisc { n: usize },
    Reinhardt(ReinhardtDomain),
    Convex(ConvexBody),
    /// `{z ∈ D : Re z > 0}`.
    HalfDisc,
    /// `D \ (-1, 0]`.
    SlitDisc,
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::SymmetrizedPolydisc { n } | Domain::Polydisc { n } => *n,
            Domain::Reinhardt(d) => d.dim(),
            Domain::Convex(b) => b.complex_dim(),
            Domain::HalfDisc | Domain::SlitDisc => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::SymmetrizedPolydisc { .. } => "symmetrized_polydisc",
            Domain::Polydisc { .. } => "polydisc",
            Domain::Reinhardt(_) => "reinhardt",
            Domain::Convex(_) => "convex",
            Domain::HalfDisc => "half_disc",
            Domain::SlitDisc => "slit_disc",
        }
    }

    /// Open-domain membership.
    pub fn contains(&self, z: &[C64], tol: &ToleranceProfile) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        match self {
            Domain::SymmetrizedPolydisc { .. } => {
                matches!(sympoly::classify(z, tol), Ok(c) if c.kind == MembershipKind::Interior)
            }
            Domain::Polydisc { .. } => z.iter().all(|w| w.norm() < 1.0),
            Domain::Reinhardt(d) => d.contains(z),
            Domain::Convex(b) => b.contains(z),
            Domain::HalfDisc => z[0].norm() < 1.0 && z[0].re > 0.0,
            Domain::SlitDisc => z[0].norm() < 1.0 && !(z[0].im == 0.0 && z[0].re <= 0.0),
        }
    }

    pub fn sample_interior(&self, count: usize, seed: u64) -> SampleSet {
        match self {
            Domain::SymmetrizedPolydisc { n } => sympoly::sample_interior(*n, count, seed),
            Domain::Reinhardt(d) => d.sample_interior(count, seed),
            Domain::Convex(b) => b.sample_interior(count, seed),
            _ => {
                let mut rng = sampling::rng(seed);
                let tol = ToleranceProfile::default();
                let mut points = Vec::with_capacity(count);
                while points.len() < count {
                    let z: Vec<C64> = (0..self.dim()).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
                    if self.contains(&z, &tol) {
                        points.push(z);
                    }
                }
                SampleSet { points, seed, strategy: SampleStrategy::Interior }
            }
        }
    }

    /// Points of the topological boundary. Unbounded log directions of a
    /// Reinhardt domain are skipped, so only the part of the boundary away from
    /// the axes is covered.
    pub fn sample_boundary(&self, count: usize, seed: u64) -> SampleSet {
        let mut rng = sampling::rng(seed);
        let mut points = Vec::with_capacity(count);
        match self {
            Domain::SymmetrizedPolydisc { n } => return sympoly::sample_boundary(*n, count, seed),
            Domain::Polydisc { n } => {
                while points.len() < count {
                    let mut z: Vec<C64> = (0..*n).map(|_| sampling::closed_disc_point(&mut rng, 1.0)).collect();
                    let j = rng.gen_range(0..*n);
                    z[j] = sampling::circle_point(&mut rng);
                    points.push(z);
                }
            }
            Domain::HalfDisc => {
                while points.len() < count {
                    // Arc of length π, segment of length 2.
                    let z = if rng.gen::<f64>() < PI / (PI + 2.0) {
                        C64::from_polar(1.0, rng.gen_range(-PI / 2.0..=PI / 2.0))
                    } else {
                        C64::new(0.0, rng.gen_range(-1.0..=1.0))
                    };
                    points.push(vec![z]);
                }
            }
            Domain::SlitDisc => {
                while points.len() < count {
                    let z = if rng.gen::<f64>() < TAU / (TAU + 1.0) {
                        sampling::circle_point(&mut rng)
                    } else {
                        C64::new(-rng.gen_range(0.0..1.0), 0.0)
                    };
                    points.push(vec![z]);
                }
            }
            Domain::Reinhardt(d) => {
                let mut tries = 0;
                while points.len() < count && tries < MAX_REJECTIONS {
                    tries += 1;
                    let k = rng.gen_range(0..d.pieces.len());
                    let piece = &d.pieces[k];
                    let Some(x) = piece.sample_log(&mut rng, 1).pop() else { continue };
                    let Some(y) = exit_point(piece.poly(), &x, &mut rng) else { continue };
                    if !d.log_contains(&y) {
                        points.push(exp_point(&y, &mut rng));
                    }
                }
            }
            Domain::Convex(ConvexBody::Ball { center, radius }) => {
                while points.len() < count {
                    let v = sampling::ball_offset(&mut rng, 2 * center.len(), 1.0);
                    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if s < 1e-3 {
                        continue;
                    }
                    let off = complexify(&v.iter().map(|x| x * radius / s).collect::<Vec<_>>());
                    points.push(center.iter().zip(off).map(|(c, o)| c + o).collect());
                }
            }
            Domain::Convex(b @ ConvexBody::Polyhedral { poly, .. }) => {
                let inner = b.sample_interior(count, seed ^ 0x9e37_79b9);
                for z in inner.points {
                    if let Some(y) = exit_point(poly, &realify(&z), &mut rng) {
                        points.push(complexify(&y));
                    }
                }
            }
        }
        SampleSet { points, seed, strategy: SampleStrategy::Boundary }
    }

    /// Up to `count` interior points within Euclidean distance `radius` of `a`.
    ///
    /// For the symmetrized polydisc the roots of `a` are pulled inward and
    /// rotated slightly, which reaches every side of a boundary point; other
    /// domains use rejection from the ball around `a`.
    pub fn sample_near(&self, a: &[C64], radius: f64, count: usize, seed: u64, tol: &ToleranceProfile) -> Vec<Vec<C64>> {
        let mut rng = sampling::rng(seed);
        let mut out = Vec::with_capacity(count);
        if let Domain::SymmetrizedPolydisc { n } = self {
            let Ok(roots) = sympoly::char_poly(a).and_then(|p| crate::numerics::roots(&p, tol)) else {
                return out;
            };
            let mut rho = radius / (4.0 * *n as f64);
            let mut tries = 0;
            while out.len() < count && tries < MAX_REJECTIONS {
                tries += 1;
                let l: Vec<C64> = roots
                    .iter()
                    .map(|r| {
                        let s = rng.gen_range(0.0..rho);
                        let phi = rng.gen_range(-rho..rho);
                        let m = (r.norm() * (1.0 - s)).min(1.0 - s * 1e-3);
                        C64::from_polar(m, r.arg() + phi)
                    })
                    .collect();
                let z = sympoly::sym(&l);
                let d: f64 = z.iter().zip(a).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
                if d <= radius && self.contains(&z, tol) {
                    out.push(z);
                } else if tries % 64 == 0 && rho > radius * 1e-6 {
                    rho *= 0.5;
                }
            }
            return out;
        }
        let mut tries = 0;
        while out.len() < count && tries < MAX_REJECTIONS {
            tries += 1;
            let off = complexify(&sampling::ball_offset(&mut rng, 2 * a.len(), radius));
            let z: Vec<C64> = a.iter().zip(off).map(|(p, o)| p + o).collect();
            if self.contains(&z, tol) {
                out.push(z);
            }
        }
        out
    }
}

fn exit_point<R: Rng>(poly: &Polyhedron, x: &[f64], rng: &mut R) -> Option<Vec<f64>> {
    let dir = sampling::ball_offset(rng, x.len(), 1.0);
    let t = poly.ray_exit(x, &dir)?;
    Some(x.iter().zip(&dir).map(|(a, d)| a + t * d).collect())
}
