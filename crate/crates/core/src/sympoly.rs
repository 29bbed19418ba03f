//! Geometry of the symmetrized polydisc `G_n = π_n(D^n)`: the symmetrization
//! map, two independent membership tests, boundary sampling, recursive peak
//! functions and Carathéodory lower bounds through chained fractional maps.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::par::{self, Exec};
use crate::numerics::sampling::{self, SampleSet, SampleStrategy};
use crate::numerics::{mobius_distance, poincare_from_mobius, roots, ComplexPoly, HoloFunction, ToleranceProfile, C64};

/// Candidate point of `C^n` to be tested against `G_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymPoint(pub Vec<C64>);

impl SymPoint {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn classify(&self, tol: &ToleranceProfile) -> Result<MembershipClass> {
        classify(&self.0, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MembershipKind {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipClass {
    pub kind: MembershipKind,
    /// Largest root modulus of the characteristic polynomial (for the
    /// fractional-map classifier: the worst modulus reached at the bottom level).
    pub max_root_modulus: f64,
    pub witness_roots: Vec<C64>,
    /// Set when a fractional-map pole lies in the closed disc.
    #[serde(default)]
    pub pole_hit: bool,
}

fn band_kind(m: f64, band: f64) -> MembershipKind {
    if (m - 1.0).abs() <= band {
        MembershipKind::Boundary
    } else if m < 1.0 {
        MembershipKind::Interior
    } else {
        MembershipKind::Exterior
    }
}

/// Elementary symmetric polynomials `(π_{n,1}(λ), ..., π_{n,n}(λ))` via the
/// coefficients of `prod (t + λ_j)`.
pub fn sym(lambda: &[C64]) -> Vec<C64> {
    // e[k] = π_{·,k} of the prefix processed so far; e[0] = 1.
    let mut e = vec![C64::new(0.0, 0.0); lambda.len() + 1];
    e[0] = C64::new(1.0, 0.0);
    for (j, &l) in lambda.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            let prev = e[k - 1];
            e[k] += l * prev;
        }
    }
    e.remove(0);
    e
}

/// `t^n - z_1 t^(n-1) + z_2 t^(n-2) - ... + (-1)^n z_n`, whose roots λ satisfy `sym(λ) = z`.
pub fn char_poly(z: &[C64]) -> Result<ComplexPoly> {
    let n = z.len();
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    for (j, &zj) in z.iter().enumerate() {
        let j1 = j + 1;
        let sign = if j1 % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - j1] = zj * sign;
    }
    ComplexPoly::monic(coeffs)
}

/// Ground-truth membership test: `z ∈ G_n` iff all roots of `char_poly(z)` lie in the disc.
pub fn classify(z: &[C64], tol: &ToleranceProfile) -> Result<MembershipClass> {
    let r = roots(&char_poly(z)?, tol)?;
    let m = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(MembershipClass {
        kind: band_kind(m, tol.boundary_band),
        max_root_modulus: m,
        witness_roots: r,
        pole_hit: false,
    })
}

pub fn classify_batch(points: &[Vec<C64>], tol: &ToleranceProfile, exec: Exec) -> Vec<Result<MembershipClass>> {
    par::map(exec, points, |z| classify(z, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub n: usize,
    pub lambda: C64,
}

/// The fractional map `p_{n,λ}(z) = z̃(λ) ∈ C^(n-1)`.
pub fn frac_map(fp: &FracParams, z: &[C64], tol: &ToleranceProfile) -> Result<Vec<C64>> {
    let n = fp.n;
    if n < 2 || z.len() != n {
        return Err(Error::InvalidInput(format!("frac_map needs n >= 2 and a point of C^{n}")));
    }
    let den = C64::new(n as f64, 0.0) + fp.lambda * z[0];
    if den.norm() <= tol.lp_feas_tol {
        return Err(Error::PoleHit { modulus: den.norm() });
    }
    Ok((1..n)
        .map(|j| {
            let a = z[j - 1] * (n - j) as f64;
            let b = fp.lambda * z[j] * (j + 1) as f64;
            (a + b) / den
        })
        .collect())
}

/// Deterministic grid of the closed unit disc: the centre plus three
/// concentric circles with point counts proportional to radius, angles from 0.
/// The outer circle comes first.
pub fn disc_grid(size: usize) -> Vec<C64> {
    let rest = size.saturating_sub(1);
    let inner = rest / 6;
    let middle = rest / 3;
    let outer = rest - inner - middle;
    let mut pts = Vec::with_capacity(size);
    for (count, radius) in [(outer, 1.0), (middle, 2.0 / 3.0), (inner, 1.0 / 3.0)] {
        pts.extend((0..count).map(|k| C64::from_polar(radius, TAU * k as f64 / count as f64)));
    }
    pts.push(C64::new(0.0, 0.0));
    pts
}

fn outer_ring_len(size: usize) -> usize {
    let rest = size.saturating_sub(1);
    rest - rest / 6 - rest / 3
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Indices of the `k` largest finite values, highest first; ties keep grid order.
fn top_indices(vals: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_finite()).collect();
    idx.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap().then(i.cmp(&j)));
    idx.truncate(k);
    idx
}

/// Worst-case modulus reached by chaining fractional maps down to `C^1`,
/// maximized over λ at every level. Returns `(score, pole_hit)`.
fn costara_score(z: &[C64], grid: &[C64], ring: usize, tol: &ToleranceProfile) -> (f64, bool) {
    let n = z.len();
    if n == 1 {
        return (z[0].norm(), false);
    }
    let nf = n as f64;
    // a pole n + λ z_1 = 0 lies in the closed disc iff |z_1| >= n
    if z[0].norm() > nf * (1.0 + tol.boundary_band) {
        return (f64::INFINITY, true);
    }
    let eval = |lambda: C64| -> f64 {
        match frac_map(&FracParams { n, lambda }, z, tol) {
            Ok(w) => {
                let (s, pole) = costara_score(&w, grid, ring, tol);
                if pole {
                    f64::INFINITY
                } else {
                    s
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let vals: Vec<f64> = grid.iter().map(|&l| eval(l)).collect();
    let mut best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if best.is_infinite() && best > 0.0 {
        return (best, true);
    }
    // the score is subharmonic in λ, so refine on the outer circle
    let step = TAU / ring as f64;
    for i in top_indices(&vals[..ring], 3) {
        let theta = TAU * i as f64 / ring as f64;
        let (_, v) = golden_max(|t| eval(C64::from_polar(1.0, t)), theta - step, theta + step, 40);
        if v > best {
            best = v;
        }
    }
    (best, best == f64::INFINITY)
}

/// Independent membership test through the fractional-map criterion: `z ∈ G_n`
/// iff `n + λ z_1 ≠ 0` and `p_{n,λ}(z) ∈ G_{n-1}` for all λ in the closed disc.
/// Never used as ground truth; see [`classify`].
pub fn costara_classify(z: &[C64], grid_size: usize, tol: &ToleranceProfile) -> Result<MembershipClass> {
    if grid_size < 64 {
        return Err(Error::InvalidInput("λ grid needs at least 64 points".into()));
    }
    if z.is_empty() {
        return Err(Error::InvalidInput("empty point".into()));
    }
    let grid = disc_grid(grid_size);
    let (score, pole) = costara_score(z, &grid, outer_ring_len(grid_size), tol);
    let kind = if pole { MembershipKind::Exterior } else { band_kind(score, tol.boundary_band) };
    Ok(MembershipClass { kind, max_root_modulus: score, witness_roots: Vec::new(), pole_hit: pole })
}

pub fn sample_interior(n: usize, count: usize, seed: u64) -> SampleSet {
    let mut rng = sampling::rng(seed);
    let points = (0..count)
        .map(|_| {
            let l: Vec<C64> = (0..n).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
            sym(&l)
        })
        .collect();
    SampleSet { points, seed, strategy: SampleStrategy::Interior }
}

/// Boundary points `sym(λ)` with `|λ_1| = 1` and the rest in the closed disc.
pub fn sample_boundary(n: usize, count: usize, seed: u64) -> SampleSet {
    let mut rng = sampling::rng(seed);
    let points = (0..count)
        .map(|_| {
            let mut l = vec![sampling::circle_point(&mut rng)];
            l.extend((1..n).map(|_| sampling::closed_disc_point(&mut rng, 1.0)));
            sym(&l)
        })
        .collect();
    SampleSet { points, seed, strategy: SampleStrategy::Boundary }
}

/// Interior points whose largest root modulus lies in `[1 - width, 1)`.
pub fn sample_shell(n: usize, count: usize, width: f64, seed: u64) -> SampleSet {
    let mut rng = sampling::rng(seed);
    let points = (0..count)
        .map(|_| {
            let r = 1.0 - width * (1.0 - rng.gen::<f64>()).max(f64::MIN_POSITIVE);
            let mut l = vec![C64::from_polar(r, rng.gen_range(0.0..TAU))];
            l.extend((1..n).map(|_| sampling::disc_point(&mut rng, r)));
            sym(&l)
        })
        .collect();
    SampleSet { points, seed, strategy: SampleStrategy::AnnularShell }
}

fn max_root_modulus(z: &[C64], tol: &ToleranceProfile) -> f64 {
    match char_poly(z).and_then(|p| roots(&p, tol)) {
        Ok(r) => r.iter().map(|x| x.norm()).fold(0.0, f64::max),
        Err(_) => f64::NEG_INFINITY,
    }
}

const PEAK_CIRCLE_GRID: usize = 256;

/// Holomorphic `φ` on a neighbourhood of `closure(G_n)` minus singular set,
/// with `|φ| < 1` on `G_n` and `φ(a) = 1`, for a boundary point `a`.
pub fn peak_at(a: &[C64], tol: &ToleranceProfile) -> Result<HoloFunction> {
    let class = classify(a, tol)?;
    if class.kind != MembershipKind::Boundary {
        return Err(Error::DomainViolation(format!(
            "peak_at needs a boundary point of G_{}, max root modulus {}",
            a.len(),
            class.max_root_modulus
        )));
    }
    peak_recursive(a, tol, 0)
}

fn peak_recursive(a: &[C64], base: &ToleranceProfile, level: usize) -> Result<HoloFunction> {
    let tol = base.widened(level);
    let n = a.len();
    if n == 1 {
        let unit = a[0] / a[0].norm();
        return Ok(HoloFunction::MobiusAtom { a: unit });
    }
    let nf = n as f64;
    let a1 = a[0];
    if a1.norm() >= nf - tol.peak_value_tol {
        let factor = C64::new(a1.norm(), 0.0) / (a1 * nf);
        return Ok(HoloFunction::scale(factor, HoloFunction::coordinate(0)));
    }
    let lambda = search_lambda(a, &tol)?;
    let reduced = frac_map(&FracParams { n, lambda }, a, &tol)?;
    let inner = peak_recursive(&reduced, base, level + 1)?;
    Ok(HoloFunction::compose(inner, HoloFunction::FractionalMap { n, lambda }))
}

/// Finds λ in the closed disc with `p_{n,λ}(a)` inside the boundary band of `G_{n-1}`.
fn search_lambda(a: &[C64], tol: &ToleranceProfile) -> Result<C64> {
    let n = a.len();
    let target = 1.0 - tol.boundary_band;
    let mu = |lambda: C64| match frac_map(&FracParams { n, lambda }, a, tol) {
        Ok(w) => max_root_modulus(&w, tol),
        Err(_) => f64::NEG_INFINITY,
    };
    let circle: Vec<C64> = (0..PEAK_CIRCLE_GRID)
        .map(|k| C64::from_polar(1.0, TAU * k as f64 / PEAK_CIRCLE_GRID as f64))
        .collect();
    let vals: Vec<f64> = circle.iter().map(|&l| mu(l)).collect();
    let mut best = (C64::new(0.0, 0.0), f64::NEG_INFINITY);
    for (&l, &v) in circle.iter().zip(&vals) {
        if v > best.1 {
            best = (l, v);
        }
    }
    if best.1 >= target {
        return Ok(best.0);
    }
    let step = TAU / PEAK_CIRCLE_GRID as f64;
    for i in top_indices(&vals, 4) {
        let theta = TAU * i as f64 / PEAK_CIRCLE_GRID as f64;
        let (t, v) = golden_max(|t| mu(C64::from_polar(1.0, t)), theta - step, theta + step, 80);
        if v > best.1 {
            best = (C64::from_polar(1.0, t), v);
        }
        if best.1 >= target {
            return Ok(best.0);
        }
    }
    // full-disc fallback
    for l in disc_grid(4 * PEAK_CIRCLE_GRID) {
        let v = mu(l);
        if v > best.1 {
            best = (l, v);
        }
    }
    if best.1 >= target {
        Ok(best.0)
    } else {
        Err(Error::SearchFailure { best: best.1 })
    }
}

/// Lower bound for the Carathéodory distance between interior points of `G_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarathBound {
    pub mobius: f64,
    pub poincare: f64,
}

/// `max` over a torus grid of `mobius_distance(q_Λ(z), q_Λ(w))` with
/// `q_Λ = p_{2,λ_{n-1}} ∘ ... ∘ p_{n,λ_1}`.
pub fn carath_lb(z: &[C64], w: &[C64], grid: usize, tol: &ToleranceProfile) -> Result<CarathBound> {
    carath_lb_with(z, w, grid, tol, Exec::default())
}

pub fn carath_lb_with(z: &[C64], w: &[C64], grid: usize, tol: &ToleranceProfile, exec: Exec) -> Result<CarathBound> {
    let n = z.len();
    if n == 0 || w.len() != n || grid == 0 {
        return Err(Error::InvalidInput("carath_lb needs two points of the same C^n and grid >= 1".into()));
    }
    for p in [z, w] {
        if classify(p, tol)?.kind != MembershipKind::Interior {
            return Err(Error::DomainViolation("carath_lb needs interior points".into()));
        }
    }
    let combos = grid.pow((n - 1) as u32);
    let angles: Vec<C64> = (0..grid).map(|k| C64::from_polar(1.0, TAU * k as f64 / grid as f64)).collect();
    let reduce = |mut idx: usize, p: &[C64]| -> Result<C64> {
        let mut v = p.to_vec();
        while v.len() > 1 {
            let lambda = angles[idx % grid];
            idx /= grid;
            v = frac_map(&FracParams { n: v.len(), lambda }, &v, tol)?;
        }
        Ok(v[0])
    };
    let vals = par::map_range(exec, combos, |i| match (reduce(i, z), reduce(i, w)) {
        (Ok(a), Ok(b)) => mobius_distance(a, b).unwrap_or(0.0),
        _ => 0.0,
    });
    let m = vals.into_iter().fold(0.0, f64::max);
    Ok(CarathBound { mobius: m, poincare: poincare_from_mobius(m) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn sym_examples() {
        assert_eq!(sym(&r(&[1.0, 1.0])), r(&[2.0, 1.0]));
        assert_eq!(sym(&[c(0.0, 1.0), c(0.0, -1.0)]), r(&[0.0, 1.0]));
        assert_eq!(sym(&r(&[1.0, 1.0, 1.0])), r(&[3.0, 3.0, 1.0]));
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&r(&[0.0, 1.0])).unwrap().coeffs(), &r(&[1.0, 0.0]));
        assert_eq!(char_poly(&r(&[2.0, 1.0])).unwrap().coeffs(), &r(&[1.0, -2.0]));
        assert!(char_poly(&r(&[0.0; 3])).unwrap().coeffs().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn classify_examples() {
        let t = tol();
        let a = classify(&r(&[0.0, 0.0]), &t).unwrap();
        assert_eq!(a.kind, MembershipKind::Interior);
        assert!(a.max_root_modulus < 1e-12);
        let b = classify(&r(&[2.0, 1.0]), &t).unwrap();
        assert_eq!(b.kind, MembershipKind::Boundary);
        assert!((b.max_root_modulus - 1.0).abs() < 1e-12);
        let e = classify(&r(&[3.0, 0.0]), &t).unwrap();
        assert_eq!(e.kind, MembershipKind::Exterior);
        assert!((e.max_root_modulus - 3.0).abs() < 1e-12);
    }

    #[test]
    fn frac_map_examples() {
        let t = tol();
        for lambda in [c(0.3, 0.2), c(1.0, 0.0), c(0.0, -1.0)] {
            let w = frac_map(&FracParams { n: 2, lambda }, &r(&[2.0, 1.0]), &t).unwrap();
            assert!((w[0] - c(1.0, 0.0)).norm() < 1e-15);
        }
        let z = [c(0.3, 0.1), c(-0.2, 0.4), c(0.05, 0.0)];
        let w = frac_map(&FracParams { n: 3, lambda: c(0.0, 0.0) }, &z, &t).unwrap();
        assert!((w[0] - z[0] * (2.0 / 3.0)).norm() < 1e-15);
        assert!((w[1] - z[1] / 3.0).norm() < 1e-15);
        let w = frac_map(&FracParams { n: 2, lambda: c(1.0, 0.0) }, &r(&[0.0, 1.0]), &t).unwrap();
        assert_eq!(w, r(&[1.0]));
    }

    #[test]
    fn frac_map_pole() {
        let res = frac_map(&FracParams { n: 2, lambda: c(-1.0, 0.0) }, &r(&[2.0, 1.0]), &tol());
        assert!(matches!(res, Err(Error::PoleHit { .. })));
    }

    #[test]
    fn costara_examples() {
        let t = tol();
        assert_eq!(costara_classify(&r(&[0.0, 0.0]), 64, &t).unwrap().kind, MembershipKind::Interior);
        assert_eq!(costara_classify(&r(&[2.0, 1.0]), 64, &t).unwrap().kind, MembershipKind::Boundary);
        let e = costara_classify(&r(&[3.0, 0.0]), 64, &t).unwrap();
        assert_eq!(e.kind, MembershipKind::Exterior);
        assert!(e.pole_hit);
        assert!(costara_classify(&r(&[0.0, 0.0]), 10, &t).is_err());
    }

    #[test]
    fn disc_grid_shape() {
        let g = disc_grid(64);
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|l| l.norm() <= 1.0 + 1e-15));
        let ring = outer_ring_len(64);
        assert!(g[..ring].iter().all(|l| (l.norm() - 1.0).abs() < 1e-15));
        assert_eq!(g[0], c(1.0, 0.0));
    }

    #[test]
    fn samples_classify_as_declared() {
        let t = tol();
        for z in sample_boundary(2, 200, 11).points {
            assert_eq!(classify(&z, &t).unwrap().kind, MembershipKind::Boundary);
        }
        for z in sample_interior(2, 200, 12).points {
            assert_eq!(classify(&z, &t).unwrap().kind, MembershipKind::Interior);
        }
        assert_eq!(sample_interior(3, 10, 5), sample_interior(3, 10, 5));
        for z in sample_shell(3, 50, 0.05, 3).points {
            let m = classify(&z, &t).unwrap().max_root_modulus;
            assert!((0.95 - 1e-12..1.0).contains(&m));
        }
    }

    #[test]
    fn peak_at_corner_point() {
        let f = peak_at(&r(&[2.0, 1.0]), &tol()).unwrap();
        assert_eq!(f, HoloFunction::scale(c(0.5, 0.0), HoloFunction::coordinate(0)));
        assert!((f.evaluate(&r(&[2.0, 1.0])).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn peak_at_zero_one_uses_lambda_one() {
        let a = r(&[0.0, 1.0]);
        let f = peak_at(&a, &tol()).unwrap();
        // φ(z) = (z1 + 2 z2) / (2 + z1)
        let z = [c(0.3, -0.2), c(0.1, 0.25)];
        let expected = (z[0] + z[1] * 2.0) / (z[0] + 2.0);
        assert!((f.evaluate(&z).unwrap() - expected).norm() < 1e-14);
        assert!((f.evaluate(&a).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        for p in sample_interior(2, 10_000, 99).points {
            assert!(f.evaluate(&p).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn peak_at_disc() {
        let theta = 0.7;
        let f = peak_at(&[C64::from_polar(1.0, theta)], &tol()).unwrap();
        let w = c(0.2, 0.5);
        assert!((f.evaluate(&[w]).unwrap() - C64::from_polar(1.0, -theta) * w).norm() < 1e-15);
    }

    #[test]
    fn peak_at_rejects_interior() {
        assert!(peak_at(&r(&[0.0, 0.0]), &tol()).is_err());
    }

    #[test]
    fn carath_examples() {
        let t = tol();
        let z = [c(0.2, 0.1), c(-0.1, 0.05)];
        assert_eq!(carath_lb(&z, &z, 16, &t).unwrap().mobius, 0.0);
        // q_λ(0,0) = 0 and q_λ(0,p) = λp, so the bound is |p| at every grid point
        let p = c(0.3, 0.4);
        let lb = carath_lb(&r(&[0.0, 0.0]), &[c(0.0, 0.0), p], 8, &t).unwrap();
        assert!((lb.mobius - 0.5).abs() < 1e-15);
        let w = [c(0.5, -0.3), c(0.1, 0.2)];
        assert_eq!(carath_lb(&z, &w, 32, &t).unwrap(), carath_lb(&w, &z, 32, &t).unwrap());
        assert!(carath_lb(&z, &r(&[2.0, 1.0]), 8, &t).is_err());
    }
}
