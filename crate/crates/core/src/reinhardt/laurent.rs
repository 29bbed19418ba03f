use serde::{Deserialize, Serialize};

use super::envelope::hull_polyhedron;
use super::extremal::{dirichlet, is_extreme, log_map, support_at, Support};
use super::ReinhardtDomain;
use crate::error::{Error, Result};
use crate::numerics::linalg::{self, dot, norm};
use crate::numerics::{HoloFunction, ToleranceProfile, C64};
use crate::polytope::{affine_rank, HalfSpace, LpOutcome, Polyhedron};

/// `coeff · z^exponent` with integer exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentMonomial {
    pub coeff: C64,
    pub exponent: Vec<i64>,
}

impl LaurentMonomial {
    pub fn evaluate(&self, z: &[C64]) -> Result<C64> {
        self.to_holo().evaluate(z)
    }

    /// `log |F(e^x)|`.
    pub fn log_modulus(&self, x: &[f64]) -> f64 {
        self.coeff.norm().ln() + self.exponent.iter().zip(x).map(|(&b, &xi)| b as f64 * xi).sum::<f64>()
    }

    /// `|F(z)|` through logarithms, safe for large exponents; `None` on an axis.
    pub fn modulus(&self, z: &[C64]) -> Option<f64> {
        let x = log_map(z).ok()?;
        Some(self.log_modulus(&x).exp())
    }

    pub fn to_holo(&self) -> HoloFunction {
        HoloFunction::Monomial { coeff: self.coeff, exponent: self.exponent.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentParams {
    pub mu: u64,
    /// Required decay `e^{-N}` off the neighbourhood.
    pub n_depth: f64,
    /// Radius of the Reinhardt neighbourhood `{max_j ||z_j| - |z0_j|| < r}`.
    pub u_radius: f64,
    pub samples: usize,
    pub seed: u64,
    /// Smallest multiplier tried for the Dirichlet exponent at the top level.
    pub min_multiplier: u64,
}

impl Default for LaurentParams {
    fn default() -> Self {
        Self { mu: 1, n_depth: 3.0, u_radius: 0.3, samples: 10_000, seed: 0, min_multiplier: 1 }
    }
}

/// One level of the inductive construction (level 0 is the full dimension).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLevel {
    pub level: usize,
    pub dim: usize,
    /// `T ≡ 0` because the set lies inside the neighbourhood.
    pub trivial: bool,
    pub l: Vec<f64>,
    pub l0: f64,
    pub pivot: usize,
    pub permutation: Vec<usize>,
    /// Projected supporting face, after inflation.
    pub face_projection: Option<Polyhedron>,
    pub inflation_vectors: Vec<Vec<f64>>,
    pub t_prime: Vec<i64>,
    pub t0: f64,
    pub dirichlet_alpha: Vec<i64>,
    pub dirichlet_k: i64,
    pub multiplier: u64,
    /// Effective `M = multiplier · k`.
    pub m_used: f64,
    /// `t + multiplier·α` and `multiplier·k·l0 + t0`: the level's functional is `<exponent, x> - offset`.
    pub exponent: Vec<i64>,
    pub offset: f64,
    pub eps: f64,
    pub n_depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub z0: Vec<C64>,
    pub mu: u64,
    pub eps: f64,
    pub n_depth: f64,
    pub u_radius: f64,
    pub theta: f64,
    pub levels: Vec<TraceLevel>,
}

impl ConstructionTrace {
    /// Right-hand side of the log-modulus identity
    /// `k(Lx - l0) + Tx - t0 + Σ x_j (α_j - k l_j)` at the top level.
    pub fn log_identity_rhs(&self, x: &[f64]) -> f64 {
        let top = &self.levels[0];
        let q = top.multiplier as f64;
        let k = q * top.dirichlet_k as f64;
        let lx = dot(&top.l, x);
        let t = lift(&top.t_prime, top.pivot);
        let tx: f64 = t.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
        let corr: f64 = (0..x.len()).map(|j| x[j] * (q * top.dirichlet_alpha[j] as f64 - k * top.l[j])).sum();
        k * (lx - top.l0) + tx - top.t0 + corr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentOutcome {
    pub monomial: LaurentMonomial,
    pub trace: ConstructionTrace,
    pub value_at_z0: f64,
    /// Exact suprema of `log|F|` over the closed log hull and over its part off the neighbourhood.
    pub exact_sup_log: f64,
    pub exact_sup_off_log: f64,
    pub sampled_sup: f64,
    pub sampled_sup_off: f64,
    pub sample_count: usize,
    pub off_count: usize,
    pub seed: u64,
    pub verified: bool,
}

const MULTIPLIER_CAP: u64 = 1 << 40;
/// Largest dimension handled by the recursion.
pub const MAX_LAURENT_DIM: usize = 3;

/// Laurent monomial `F` with `|F(z0)| >= e^{-ε}`, `|F| <= e^{ε}` on `D` and
/// `|F| <= e^{-N}` off the neighbourhood, `ε = 1/μ`; postconditions are
/// checked exactly on the log hull and by sampling `D`.
pub fn laurent_peak(d: &ReinhardtDomain, z0: &[C64], params: &LaurentParams, tol: &ToleranceProfile) -> Result<LaurentOutcome> {
    let n = d.dim();
    if n > MAX_LAURENT_DIM {
        return Err(Error::ScopeViolation(format!("Laurent construction in C^{n} (limit {MAX_LAURENT_DIM})")));
    }
    if z0.len() != n || params.mu == 0 || !(params.u_radius > 0.0) || !(params.n_depth > 0.0) {
        return Err(Error::InvalidInput("laurent_peak needs a point of C^n, μ >= 1, N > 0 and a positive radius".into()));
    }
    let x0 = log_map(z0)?;
    let g = hull_polyhedron(d)?;
    if !is_extreme(&g, &x0, tol)? {
        return Err(Error::NotExtreme);
    }
    let eps = 1.0 / params.mu as f64;
    let v_rows = neighbourhood_rows(&x0, params.u_radius);
    let mut levels = Vec::new();
    let ctx = Ctx { mu: params.mu, tol };
    let (beta, c) = construct(&ctx, &g, &x0, eps, params.n_depth, &v_rows, params.min_multiplier.max(1), true, 0, &mut levels)?;

    let theta = -beta.iter().zip(z0).map(|(&b, z)| b as f64 * z.arg()).sum::<f64>();
    let monomial = LaurentMonomial { coeff: C64::from_polar((-c).exp(), theta), exponent: beta.clone() };
    let trace = ConstructionTrace {
        z0: z0.to_vec(),
        mu: params.mu,
        eps,
        n_depth: params.n_depth,
        u_radius: params.u_radius,
        theta,
        levels,
    };

    let exact_sup_log = sup_linear(&g, &beta, c);
    let exact_sup_off_log = complement_pieces(&g, &v_rows)
        .iter()
        .map(|p| sup_linear(p, &beta, c))
        .fold(f64::NEG_INFINITY, f64::max);

    let samples = d.sample_interior(params.samples, params.seed);
    let mut sampled_sup: f64 = 0.0;
    let mut sampled_sup_off: f64 = 0.0;
    let mut off_count = 0;
    for z in &samples.points {
        let m = monomial.modulus(z).unwrap_or(0.0);
        sampled_sup = sampled_sup.max(m);
        if !in_neighbourhood(z, z0, params.u_radius) {
            off_count += 1;
            sampled_sup_off = sampled_sup_off.max(m);
        }
    }
    let value_at_z0 = monomial.evaluate(z0)?.norm();
    let verified = value_at_z0 >= (-eps).exp() * (1.0 - 1e-12)
        && sampled_sup <= eps.exp()
        && sampled_sup_off <= (-params.n_depth).exp();
    Ok(LaurentOutcome {
        monomial,
        trace,
        value_at_z0,
        exact_sup_log,
        exact_sup_off_log,
        sampled_sup,
        sampled_sup_off,
        sample_count: samples.len(),
        off_count,
        seed: params.seed,
        verified,
    })
}

/// Monomials for each `μ` with `ε = 1/μ` and decay target `N·μ`; the
/// multiplier is raised where needed so the sampled sup off the
/// neighbourhood is nonincreasing along the sequence.
pub fn laurent_sequence(
    d: &ReinhardtDomain,
    z0: &[C64],
    mus: &[u64],
    params: &LaurentParams,
    tol: &ToleranceProfile,
) -> Result<Vec<LaurentOutcome>> {
    let mut out: Vec<LaurentOutcome> = Vec::with_capacity(mus.len());
    for &mu in mus {
        let mut p = params.clone();
        p.mu = mu;
        p.n_depth = params.n_depth * mu as f64;
        loop {
            let o = laurent_peak(d, z0, &p, tol)?;
            let prev_off = out.last().map_or(f64::INFINITY, |prev| prev.sampled_sup_off);
            if o.sampled_sup_off <= prev_off {
                out.push(o);
                break;
            }
            let q = o.trace.levels[0].multiplier;
            if q >= MULTIPLIER_CAP {
                return Err(Error::RecursionBudgetExceeded { m: q as f64 });
            }
            p.min_multiplier = q * 2;
        }
    }
    Ok(out)
}

/// `U = {max_j ||z_j| - |z0_j|| < r}` in log coordinates, as strict inequalities.
fn neighbourhood_rows(x0: &[f64], r: f64) -> Vec<HalfSpace> {
    let n = x0.len();
    let mut rows = Vec::new();
    for j in 0..n {
        let m = x0[j].exp();
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push(HalfSpace::new(e.clone(), (m + r).ln()));
        if m - r > 0.0 {
            e[j] = -1.0;
            rows.push(HalfSpace::new(e, -(m - r).ln()));
        }
    }
    rows
}

pub(crate) fn in_neighbourhood(z: &[C64], z0: &[C64], r: f64) -> bool {
    z.iter().zip(z0).all(|(a, b)| (a.norm() - b.norm()).abs() < r)
}

/// Closed convex pieces covering `G` minus the open set `{<v_i, x> < w_i}`.
fn complement_pieces(g: &Polyhedron, v_rows: &[HalfSpace]) -> Vec<Polyhedron> {
    v_rows
        .iter()
        .map(|v| {
            let mut rows = g.rows.clone();
            rows.push(HalfSpace::new(v.normal.iter().map(|a| -a).collect(), -v.offset));
            Polyhedron { dim: g.dim, rows }
        })
        .filter(|p| !p.vertices().is_empty())
        .collect()
}

/// `sup <beta, x> - c` over `p` (`-inf` if empty, `+inf` if unbounded).
fn sup_linear(p: &Polyhedron, beta: &[i64], c: f64) -> f64 {
    let b: Vec<f64> = beta.iter().map(|&v| v as f64).collect();
    match p.lp_max(&b) {
        LpOutcome::Optimal { value, .. } => value - c,
        LpOutcome::Unbounded { .. } => f64::INFINITY,
        LpOutcome::Infeasible => f64::NEG_INFINITY,
    }
}

fn lift(t_prime: &[i64], pivot: usize) -> Vec<i64> {
    let mut t = t_prime.to_vec();
    t.insert(pivot, 0);
    t
}

fn drop_coord(x: &[f64], pivot: usize) -> Vec<f64> {
    x.iter().enumerate().filter(|&(i, _)| i != pivot).map(|(_, v)| *v).collect()
}

/// Substitutes `x_p = (l0 - Σ_{j≠p} l_j x_j) / l_p` into `<a, x> <= b`.
fn restrict_row(row: &HalfSpace, s: &Support) -> HalfSpace {
    let p = s.pivot;
    let ap = row.normal[p];
    let lp = s.l[p];
    let normal: Vec<f64> = (0..row.normal.len()).filter(|&j| j != p).map(|j| row.normal[j] - ap * s.l[j] / lp).collect();
    HalfSpace::new(normal, row.offset - ap * s.l0 / lp)
}

struct Ctx<'a> {
    mu: u64,
    tol: &'a ToleranceProfile,
}

#[allow(clippy::too_many_arguments)]
fn construct(
    ctx: &Ctx,
    g: &Polyhedron,
    x0: &[f64],
    eps: f64,
    n_depth: f64,
    v_rows: &[HalfSpace],
    min_q: u64,
    top: bool,
    level: usize,
    levels: &mut Vec<TraceLevel>,
) -> Result<(Vec<i64>, f64)> {
    let d = g.dim;
    let pieces = complement_pieces(g, v_rows);
    if !top && pieces.is_empty() {
        levels.push(TraceLevel {
            level,
            dim: d,
            trivial: true,
            l: vec![0.0; d],
            l0: 0.0,
            pivot: d - 1,
            permutation: (0..d).collect(),
            face_projection: None,
            inflation_vectors: Vec::new(),
            t_prime: vec![0; d.saturating_sub(1)],
            t0: 0.0,
            dirichlet_alpha: vec![0; d],
            dirichlet_k: 0,
            multiplier: 0,
            m_used: 0.0,
            exponent: vec![0; d],
            offset: 0.0,
            eps,
            n_depth,
        });
        return Ok((vec![0; d], 0.0));
    }

    let s = support_at(g, x0, ctx.tol)?;
    let slot = levels.len();
    levels.push(TraceLevel {
        level,
        dim: d,
        trivial: false,
        l: s.l.clone(),
        l0: s.l0,
        pivot: s.pivot,
        permutation: s.permutation.clone(),
        face_projection: None,
        inflation_vectors: Vec::new(),
        t_prime: Vec::new(),
        t0: 0.0,
        dirichlet_alpha: Vec::new(),
        dirichlet_k: 0,
        multiplier: 0,
        m_used: 0.0,
        exponent: Vec::new(),
        offset: 0.0,
        eps,
        n_depth,
    });

    let (t_prime, t0) = if d == 1 {
        (Vec::new(), 0.0)
    } else {
        let rows: Vec<HalfSpace> = g
            .rows
            .iter()
            .map(|r| restrict_row(r, &s))
            .filter(|h| norm(&h.normal) > 1e-12)
            .collect();
        let face = Polyhedron::new(d - 1, rows)?;
        let x0p = drop_coord(x0, s.pivot);
        let (face, inflation) = inflate(&face, &x0p)?;
        let vp: Vec<HalfSpace> = v_rows
            .iter()
            .map(|r| restrict_row(r, &s))
            .filter(|h| norm(&h.normal) > 1e-12)
            .collect();
        levels[slot].face_projection = Some(face.clone());
        levels[slot].inflation_vectors = inflation;
        construct(ctx, &face, &x0p, eps / 2.0, 2.0 * n_depth, &vp, 1, false, level + 1, levels)?
    };
    let t = lift(&t_prime, s.pivot);
    let (alpha, k) = dirichlet(&s.l, ctx.mu);

    let mut q = min_q;
    loop {
        let beta: Vec<i64> = t.iter().zip(&alpha).map(|(&a, &b)| a + q as i64 * b).collect();
        let c = q as f64 * k as f64 * s.l0 + t0;
        let at_x0 = beta.iter().zip(x0).map(|(&b, &x)| b as f64 * x).sum::<f64>() - c;
        let ok = at_x0 >= -eps
            && sup_linear(g, &beta, c) < eps
            && pieces.iter().all(|p| sup_linear(p, &beta, c) < -n_depth);
        if ok {
            let lv = &mut levels[slot];
            lv.t_prime = t_prime;
            lv.t0 = t0;
            lv.dirichlet_alpha = alpha;
            lv.dirichlet_k = k;
            lv.multiplier = q;
            lv.m_used = q as f64 * k as f64;
            lv.exponent = beta.clone();
            lv.offset = c;
            return Ok((beta, c));
        }
        if q >= MULTIPLIER_CAP {
            return Err(Error::RecursionBudgetExceeded { m: q as f64 * k as f64 });
        }
        q *= 2;
    }
}

/// Enlarges a lower-dimensional face to a full-dimensional polyhedron in
/// which `x0` stays extreme: adjoin `y_j = x0 - r·u + 0.1·r·e_j`, with `u`
/// the outward normal of a hyperplane separating `x0` from the rest of the
/// face and `r = 0.01·max(diam, 1)`.
fn inflate(face: &Polyhedron, x0: &[f64]) -> Result<(Polyhedron, Vec<Vec<f64>>)> {
    if face.interior_point().is_some() {
        return Ok((face.clone(), Vec::new()));
    }
    let m = face.dim;
    let points = face.vertices();
    let rays = face.rays();
    if points.is_empty() {
        return Err(Error::NotExtreme);
    }
    let others: Vec<Vec<f64>> = points.iter().filter(|p| linalg::dist(p, x0) > 1e-9).cloned().collect();
    let u = separating_normal(m, x0, &others, &rays)?;
    let diam = face.vertex_diameter().max(1.0);
    let r = 0.01 * diam;
    let mut ys = Vec::new();
    for bump in [0.1, 0.2, 0.3] {
        ys = (0..m)
            .map(|j| {
                let mut y: Vec<f64> = x0.iter().zip(&u).map(|(a, b)| a - r * b).collect();
                y[j] += bump * r;
                y
            })
            .collect();
        let mut all = points.clone();
        all.extend(ys.iter().cloned());
        if affine_rank(&all, &rays) == m {
            let hull = Polyhedron::from_generators(m, &all, &rays)?;
            return Ok((hull, ys));
        }
    }
    let _ = ys;
    Err(Error::NotExtreme)
}

/// Unit `u` with `<u, p - x0> < 0` for the other generators and `<u, r> < 0` for rays.
fn separating_normal(m: usize, x0: &[f64], others: &[Vec<f64>], rays: &[Vec<f64>]) -> Result<Vec<f64>> {
    if others.is_empty() && rays.is_empty() {
        return Ok(vec![1.0 / (m as f64).sqrt(); m]);
    }
    // maximize s subject to <u, g> + s <= 0, -1 <= u_j <= 1, s <= 1
    let mut rows = Vec::new();
    for p in others {
        let mut a = linalg::sub(p, x0);
        a.push(1.0);
        rows.push(HalfSpace::new(a, 0.0));
    }
    for r in rays {
        let mut a = r.clone();
        a.push(1.0);
        rows.push(HalfSpace::new(a, 0.0));
    }
    for j in 0..m {
        for sign in [1.0, -1.0] {
            let mut a = vec![0.0; m + 1];
            a[j] = sign;
            rows.push(HalfSpace::new(a, 1.0));
        }
    }
    let mut a = vec![0.0; m + 1];
    a[m] = 1.0;
    rows.push(HalfSpace::new(a.clone(), 1.0));
    let lp = Polyhedron::new(m + 1, rows)?;
    match lp.lp_max(&a) {
        LpOutcome::Optimal { value, argmax } if value > 1e-12 => {
            let u = &argmax[..m];
            let un = norm(u);
            Ok(u.iter().map(|v| v / un).collect())
        }
        _ => Err(Error::NotExtreme),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reinhardt::LogPolyhedron;

    fn one(n: usize) -> Vec<C64> {
        vec![C64::new(1.0, 0.0); n]
    }

    #[test]
    fn log_square_gives_power_of_product() {
        let d = ReinhardtDomain::single(LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).unwrap(), vec![false; 2]).unwrap();
        let p = LaurentParams { samples: 2000, ..Default::default() };
        let o = laurent_peak(&d, &one(2), &p, &ToleranceProfile::default()).unwrap();
        assert_eq!(o.monomial.exponent[0], o.monomial.exponent[1]);
        assert!(o.monomial.exponent[0] > 0);
        assert!((o.value_at_z0 - 1.0).abs() < 1e-12);
        assert!(o.verified, "{o:?}");
    }

    #[test]
    fn annulus_gives_power() {
        let d = ReinhardtDomain::annulus((-1.0f64).exp(), 1.0).unwrap();
        let p = LaurentParams { samples: 2000, ..Default::default() };
        let o = laurent_peak(&d, &one(1), &p, &ToleranceProfile::default()).unwrap();
        assert!(o.monomial.exponent[0] > 0);
        assert!((o.monomial.coeff - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(o.verified);
    }

    #[test]
    fn non_extreme_rejected() {
        let d = ReinhardtDomain::single(LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).unwrap(), vec![false; 2]).unwrap();
        let z = vec![C64::new(1.0, 0.0), C64::new((-0.5f64).exp(), 0.0)];
        assert_eq!(laurent_peak(&d, &z, &LaurentParams::default(), &ToleranceProfile::default()), Err(Error::NotExtreme));
    }

    #[test]
    fn narrow_neighbourhood_uses_lower_level() {
        let d = ReinhardtDomain::single(LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).unwrap(), vec![false; 2]).unwrap();
        let p = LaurentParams { samples: 2000, u_radius: 0.001, ..Default::default() };
        let o = laurent_peak(&d, &one(2), &p, &ToleranceProfile::default()).unwrap();
        assert!(!o.trace.levels[1].trivial);
        assert!(o.verified);
        for x in [[-0.3, -0.2], [-1.0, -0.01], [-0.5, -0.9]] {
            assert!((o.monomial.log_modulus(&x) - o.trace.log_identity_rhs(&x)).abs() < 1e-9);
        }
    }
}
