//! Bounded pseudoconvex Reinhardt domains through their logarithmic images:
//! extremality, supporting functionals, Dirichlet approximation, Laurent
//! monomial peak sequences, peak-point classification, decomposition into
//! extreme points plus a recession direction, and envelopes of holomorphy.

mod classify;
mod decompose;
mod envelope;
mod extremal;
mod laurent;
mod probe;

pub use classify::{classify_peak, PeakClass, PeakVerdict};
pub use decompose::{decompose, Decomposition};
pub use envelope::{envelope, is_log_convex};
pub use extremal::{dirichlet, is_extreme, log_map, support_at, Support};
pub use laurent::{laurent_peak, laurent_sequence, ConstructionTrace, LaurentMonomial, LaurentOutcome, LaurentParams};
pub use probe::{example_staircase, extension_probe, ray_limits, ExtensionReport};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sampling::{self, SampleSet, SampleStrategy};
use crate::numerics::C64;
use crate::polytope::{HalfSpace, Polyhedron, GEOM_TOL};

/// Depth below the lowest vertex used to truncate unbounded log directions when sampling.
pub const SAMPLING_DEPTH: f64 = 6.0;

/// Closed convex polyhedron `{x : <l, x> <= l0}` modelling one piece of `log D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPolyhedron {
    poly: Polyhedron,
}

impl LogPolyhedron {
    /// Validates a nonempty interior and that every coordinate is bounded above.
    pub fn new(poly: Polyhedron) -> Result<Self> {
        if poly.interior_point().is_none() {
            return Err(Error::InvalidInput("logarithmic piece has empty interior".into()));
        }
        if !poly.bounded_above() {
            return Err(Error::InvalidInput(
                "logarithmic piece is not bounded above (domain would be unbounded)".into(),
            ));
        }
        Ok(Self { poly })
    }

    pub fn from_ab(a: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        Self::new(Polyhedron::from_ab(a, b)?)
    }

    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Self::new(Polyhedron::boxed(lo, hi))
    }

    pub fn poly(&self) -> &Polyhedron {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.poly.dim
    }

    /// Bounding box, with unbounded directions truncated `SAMPLING_DEPTH` below the lowest vertex.
    pub fn sampling_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let verts = self.poly.vertices();
        let rays = self.poly.rays();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in &verts {
            for j in 0..n {
                lo[j] = lo[j].min(v[j]);
                hi[j] = hi[j].max(v[j]);
            }
        }
        for j in 0..n {
            if rays.iter().any(|r| r[j] < -GEOM_TOL) {
                lo[j] -= SAMPLING_DEPTH;
            }
        }
        (lo, hi)
    }

    /// Uniform samples from the truncated piece.
    pub fn sample_log<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.sampling_box();
        let mut out = Vec::with_capacity(count);
        let mut tries = 0usize;
        while out.len() < count && tries < count * 1000 + 1000 {
            tries += 1;
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(&a, &b)| if b > a { rng.gen_range(a..b) } else { a }).collect();
            if self.poly.contains_strictly(&x, 0.0) {
                out.push(x);
            }
        }
        out
    }

    fn box_volume(&self) -> f64 {
        let (lo, hi) = self.sampling_box();
        lo.iter().zip(&hi).map(|(a, b)| (b - a).max(1e-12)).product()
    }
}

/// Reinhardt domain whose logarithmic image is the interior of the union of `pieces`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReinhardtDomain {
    pub pieces: Vec<LogPolyhedron>,
    /// Whether the domain touches `{z_j = 0}`, per coordinate.
    pub meets_axes: Vec<bool>,
}

impl ReinhardtDomain {
    pub fn new(pieces: Vec<LogPolyhedron>, meets_axes: Vec<bool>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput("Reinhardt domain needs at least one piece".into()));
        };
        let n = first.dim();
        if pieces.iter().any(|p| p.dim() != n) || meets_axes.len() != n {
            return Err(Error::InvalidInput("pieces and meets_axes must share one dimension".into()));
        }
        let d = Self { pieces, meets_axes };
        if !d.pieces_connected() {
            return Err(Error::InvalidInput("pieces do not form a connected union".into()));
        }
        Ok(d)
    }

    /// Union of pieces without the connectivity requirement, for hull
    /// computations on disconnected log images.
    pub fn union_of(pieces: Vec<LogPolyhedron>, meets_axes: Vec<bool>) -> Result<Self> {
        let n = pieces.first().map(|p| p.dim()).unwrap_or(0);
        if n == 0 || pieces.iter().any(|p| p.dim() != n) || meets_axes.len() != n {
            return Err(Error::InvalidInput("pieces and meets_axes must share one positive dimension".into()));
        }
        Ok(Self { pieces, meets_axes })
    }

    pub fn single(piece: LogPolyhedron, meets_axes: Vec<bool>) -> Result<Self> {
        Self::new(vec![piece], meets_axes)
    }

    /// Polydisc `D^n`: log image `(-inf, 0]^n`, meeting every axis.
    pub fn polydisc(n: usize) -> Self {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect();
        let piece = LogPolyhedron::from_ab(&a, &vec![0.0; n]).expect("orthant is valid");
        Self { pieces: vec![piece], meets_axes: vec![true; n] }
    }

    /// Annulus `{r_in < |z| < r_out}`.
    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        Self::single(LogPolyhedron::boxed(&[r_in.ln()], &[r_out.ln()])?, vec![false])
    }

    pub fn dim(&self) -> usize {
        self.meets_axes.len()
    }

    fn pieces_connected(&self) -> bool {
        let k = self.pieces.len();
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..k {
                if !seen[j] && closures_meet(self.pieces[i].poly(), self.pieces[j].poly()) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Is `x` in the closure of the log image (union of closed pieces)?
    pub fn log_closure_contains(&self, x: &[f64], tol: f64) -> bool {
        self.pieces.iter().any(|p| p.poly().contains(x, tol))
    }

    pub fn log_contains(&self, x: &[f64]) -> bool {
        self.pieces.iter().any(|p| p.poly().contains_strictly(x, 0.0))
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        let mut x = Vec::with_capacity(z.len());
        for (j, zj) in z.iter().enumerate() {
            let m = zj.norm();
            if m == 0.0 {
                if !self.meets_axes[j] {
                    return false;
                }
                x.push(-1e6);
            } else {
                x.push(m.ln());
            }
        }
        self.log_contains(&x)
    }

    /// Points `exp(x) · e^{iθ}` with `x` uniform over the (truncated) pieces.
    pub fn sample_interior(&self, count: usize, seed: u64) -> SampleSet {
        let mut rng = sampling::rng(seed);
        let weights: Vec<f64> = self.pieces.iter().map(|p| p.box_volume()).collect();
        let total: f64 = weights.iter().sum();
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            let mut u = rng.gen::<f64>() * total;
            let mut k = 0;
            while k + 1 < weights.len() && u >= weights[k] {
                u -= weights[k];
                k += 1;
            }
            let Some(x) = self.pieces[k].sample_log(&mut rng, 1).pop() else { continue };
            points.push(exp_point(&x, &mut rng));
        }
        SampleSet { points, seed, strategy: SampleStrategy::Interior }
    }
}

/// `exp(x)` with independent uniform phases.
pub fn exp_point<R: Rng>(x: &[f64], rng: &mut R) -> Vec<C64> {
    x.iter()
        .map(|&xj| C64::from_polar(xj.exp(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn closures_meet(a: &Polyhedron, b: &Polyhedron) -> bool {
    let mut rows: Vec<HalfSpace> = a.rows.clone();
    rows.extend(b.rows.iter().cloned());
    let both = Polyhedron { dim: a.dim, rows };
    !both.vertices().is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piece_validation() {
        assert!(LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).is_ok());
        // unbounded above
        let half = Polyhedron::from_ab(&[vec![1.0, 0.0]], &[0.0]).unwrap();
        assert!(LogPolyhedron::new(half).is_err());
        // empty interior
        assert!(LogPolyhedron::boxed(&[0.0, -1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn disconnected_union_rejected() {
        let a = LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).unwrap();
        let b = LogPolyhedron::boxed(&[-3.0, -3.0], &[-2.0, -2.0]).unwrap();
        assert!(ReinhardtDomain::new(vec![a.clone(), b], vec![false, false]).is_err());
        let c = LogPolyhedron::boxed(&[-2.0, -1.0], &[-1.0, 0.0]).unwrap();
        assert!(ReinhardtDomain::new(vec![a, c], vec![false, false]).is_ok());
    }

    #[test]
    fn samples_lie_inside() {
        let d = ReinhardtDomain::polydisc(2);
        let s = d.sample_interior(500, 3);
        assert_eq!(s.len(), 500);
        assert!(s.points.iter().all(|z| d.contains(z)));
        assert!(d.contains(&[C64::new(0.0, 0.0), C64::new(0.5, 0.0)]));
        let ann = ReinhardtDomain::annulus(0.5, 1.0).unwrap();
        assert!(!ann.contains(&[C64::new(0.0, 0.0)]));
        assert!(ann.sample_interior(200, 1).points.iter().all(|z| (0.5..1.0).contains(&z[0].norm())));
    }
}
