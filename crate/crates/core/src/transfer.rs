//! Proper holomorphic maps with computable fibers, forward and backward
//! transfer of peak functions, and the Carathéodory growth probe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::par::{self, Exec};
use crate::numerics::{mobius_distance, HoloFunction, ToleranceProfile, C64};
use crate::sympoly::{self, carath_lb_with, char_poly, classify, peak_at, MembershipClass, MembershipKind};

/// Catalog of proper holomorphic maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProperMap {
    /// `z ↦ (z_1^{k_1}, ..., z_n^{k_n})`.
    PowerMap { exponents: Vec<u32> },
    /// `π_n : D^n → G_n`; fibers are the `n!` orderings of the roots.
    Symmetrization { n: usize },
    /// Applied left to right: `maps[0]` first.
    Composition { maps: Vec<ProperMap> },
    /// `z ↦ z^2` from the right half-disc onto the slit disc. Biholomorphic;
    /// kept as the negative regression for transfer at the slit.
    PrincipalSquare,
}

impl ProperMap {
    pub fn source_dim(&self) -> usize {
        match self {
            ProperMap::PowerMap { exponents } => exponents.len(),
            ProperMap::Symmetrization { n } => *n,
            ProperMap::Composition { maps } => maps.first().map_or(0, |m| m.source_dim()),
            ProperMap::PrincipalSquare => 1,
        }
    }

    pub fn target_dim(&self) -> usize {
        match self {
            ProperMap::Composition { maps } => maps.last().map_or(0, |m| m.target_dim()),
            other => other.source_dim(),
        }
    }

    /// Generic fiber size.
    pub fn multiplicity(&self) -> usize {
        match self {
            ProperMap::PowerMap { exponents } => exponents.iter().map(|&k| k as usize).product(),
            ProperMap::Symmetrization { n } => (1..=*n).product(),
            ProperMap::Composition { maps } => maps.iter().map(|m| m.multiplicity()).product(),
            ProperMap::PrincipalSquare => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProperMap::PowerMap { exponents } if exponents.is_empty() || exponents.contains(&0) => {
                Err(Error::InvalidInput("power map exponents must be positive".into()))
            }
            ProperMap::Symmetrization { n } if *n == 0 => Err(Error::InvalidInput("symmetrization needs n >= 1".into())),
            ProperMap::Composition { maps } => {
                if maps.is_empty() {
                    return Err(Error::InvalidInput("empty composition".into()));
                }
                for m in maps {
                    m.validate()?;
                }
                for w in maps.windows(2) {
                    if w[0].target_dim() != w[1].source_dim() {
                        return Err(Error::InvalidInput("composition dimensions do not chain".into()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, z: &[C64]) -> Result<Vec<C64>> {
        if z.len() != self.source_dim() {
            return Err(Error::DomainViolation(format!(
                "proper map on C^{} applied to a {}-vector",
                self.source_dim(),
                z.len()
            )));
        }
        Ok(match self {
            ProperMap::PowerMap { exponents } => z.iter().zip(exponents).map(|(x, &k)| x.powu(k)).collect(),
            ProperMap::Symmetrization { .. } => sympoly::sym(z),
            ProperMap::Composition { maps } => {
                let mut v = z.to_vec();
                for m in maps {
                    v = m.apply(&v)?;
                }
                v
            }
            ProperMap::PrincipalSquare => vec![z[0] * z[0]],
        })
    }

    /// The full preimage of `w`, with multiplicity (`multiplicity()` points).
    pub fn fiber(&self, w: &[C64], tol: &ToleranceProfile) -> Result<Vec<Vec<C64>>> {
        if w.len() != self.target_dim() {
            return Err(Error::DomainViolation(format!(
                "fiber over C^{} requested at a {}-vector",
                self.target_dim(),
                w.len()
            )));
        }
        match self {
            ProperMap::PowerMap { exponents } => {
                let per_coord: Vec<Vec<C64>> = w.iter().zip(exponents).map(|(&x, &k)| kth_roots(x, k)).collect();
                Ok(cartesian(&per_coord))
            }
            ProperMap::Symmetrization { .. } => {
                let r = crate::numerics::roots(&char_poly(w)?, tol)?;
                Ok(permutations(&r))
            }
            ProperMap::Composition { maps } => {
                let mut layer = vec![w.to_vec()];
                for m in maps.iter().rev() {
                    let mut next = Vec::with_capacity(layer.len() * m.multiplicity());
                    for p in &layer {
                        next.extend(m.fiber(p, tol)?);
                    }
                    layer = next;
                }
                Ok(layer)
            }
            ProperMap::PrincipalSquare => Ok(vec![vec![w[0].sqrt()]]),
        }
    }
}

/// All `k`-th roots of `x`, principal root first, then counter-clockwise.
fn kth_roots(x: C64, k: u32) -> Vec<C64> {
    let r = x.norm().powf(1.0 / k as f64);
    let t = x.arg() / k as f64;
    (0..k)
        .map(|j| C64::from_polar(r, t + std::f64::consts::TAU * j as f64 / k as f64))
        .collect()
}

fn cartesian(sets: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out = vec![Vec::new()];
    for s in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                s.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// All orderings of `items` in lexicographic index order (Heap-free, deterministic).
fn permutations(items: &[C64]) -> Vec<Vec<C64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// `g = π_m ∘ (φ × ... × φ) ∘ F^{-1}` as an expression node.
pub fn fiber_compose(map: &ProperMap, phi: &HoloFunction) -> HoloFunction {
    HoloFunction::FiberCompose { map: map.clone(), inner: Box::new(phi.clone()), multiplicity: map.multiplicity() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    /// `ψ ∘ g`, peaking at `b = F(a)`.
    pub function: HoloFunction,
    pub g: HoloFunction,
    pub b: Vec<C64>,
    pub g_at_b: Vec<C64>,
    pub class: MembershipClass,
}

/// Pushes a peak function `φ` at `a` forward through `F`.
pub fn transfer_peak(map: &ProperMap, phi: &HoloFunction, a: &[C64], tol: &ToleranceProfile) -> Result<TransferResult> {
    map.validate()?;
    let b = map.apply(a)?;
    let g = fiber_compose(map, phi);
    let g_at_b = g.evaluate_map(&b, tol)?;
    // Symmetric data of a multiple root carries ~sqrt(eps) error; accept within the peak tolerance.
    let mut relaxed = *tol;
    relaxed.boundary_band = tol.peak_value_tol;
    let class = classify(&g_at_b, &relaxed)?;
    if class.kind != MembershipKind::Boundary {
        return Err(Error::FiberBoundaryMismatch { max_root_modulus: class.max_root_modulus });
    }
    let psi = peak_at(&g_at_b, &relaxed)?;
    Ok(TransferResult { function: HoloFunction::compose(psi, g.clone()), g, b, g_at_b, class })
}

/// `Φ(λ) = Π_{l≠j} (λ_{σ_l} − x^l_{σ_l}) / Π_{l≠j} (x^j_{σ_l} − x^l_{σ_l})`.
pub fn separator(points: &[Vec<C64>], j: usize, tol: &ToleranceProfile) -> Result<HoloFunction> {
    let xj = points
        .get(j)
        .ok_or_else(|| Error::InvalidInput(format!("fiber index {j} out of range ({})", points.len())))?;
    let mut factors = Vec::new();
    let mut norm = C64::new(1.0, 0.0);
    for (l, xl) in points.iter().enumerate() {
        if l == j {
            continue;
        }
        let sigma = (0..xj.len())
            .find(|&s| (xj[s] - xl[s]).norm() > tol.lp_feas_tol)
            .ok_or(Error::IndistinctPoints(j, l))?;
        factors.push(HoloFunction::shifted_coordinate(sigma, xl[sigma]));
        norm *= xj[sigma] - xl[sigma];
    }
    if factors.is_empty() {
        return Ok(HoloFunction::constant(C64::new(1.0, 0.0)));
    }
    Ok(HoloFunction::scale(norm.inv(), HoloFunction::Product { factors }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackParams {
    /// Number of Bishop terms.
    pub terms: usize,
    /// Radius of the first neighbourhood `U_1`; `U_k` has radius `r0 · 2^{1-k}`.
    pub r0: f64,
}

impl Default for PullbackParams {
    fn default() -> Self {
        Self { terms: 8, r0: 0.2 }
    }
}

pub const MAX_BISHOP_EXPONENT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackResult {
    pub function: HoloFunction,
    pub separator: HoloFunction,
    pub fiber: Vec<Vec<C64>>,
    pub peak_point: Vec<C64>,
    pub exponents: Vec<u64>,
    pub normalization: f64,
}

/// Truncated Bishop series `c · Σ 2^{-k} (ψ∘F)^{n_k} Φ` peaking at the fiber point `x^j` of `y`.
/// `samples` are source-domain points used to calibrate the exponents.
pub fn pullback_peak(
    map: &ProperMap,
    psi: &HoloFunction,
    y: &[C64],
    j: usize,
    samples: &[Vec<C64>],
    params: &PullbackParams,
    tol: &ToleranceProfile,
) -> Result<PullbackResult> {
    map.validate()?;
    if params.terms == 0 || params.r0 <= 0.0 {
        return Err(Error::InvalidInput("pullback needs at least one term and a positive radius".into()));
    }
    let fiber = map.fiber(y, tol)?;
    let phi = separator(&fiber, j, tol)?;
    let xj = fiber[j].clone();
    let h = HoloFunction::compose(psi.clone(), HoloFunction::Forward { map: map.clone() });

    if fiber.len() == 1 {
        return Ok(PullbackResult {
            function: h,
            separator: phi,
            fiber,
            peak_point: xj,
            exponents: vec![1],
            normalization: 1.0,
        });
    }

    let values = samples
        .iter()
        .map(|z| Ok((dist(z, &xj), h.evaluate_with(z, tol)?.norm(), phi.evaluate_with(z, tol)?.norm())))
        .collect::<Result<Vec<_>>>()?;

    let mut exponents = Vec::with_capacity(params.terms);
    let mut terms = Vec::with_capacity(params.terms);
    for k in 1..=params.terms {
        let radius = params.r0 * 0.5f64.powi(k as i32 - 1);
        let off: Vec<(f64, f64)> = values.iter().filter(|v| v.0 >= radius).map(|v| (v.1, v.2)).collect();
        let mut n: u64 = 1;
        loop {
            let worst = off.iter().map(|&(hv, pv)| hv.powf(n as f64) * pv).fold(0.0, f64::max);
            if worst <= 0.25 {
                break;
            }
            n *= 2;
            if n > MAX_BISHOP_EXPONENT {
                return Err(Error::ExponentSearchFailure { cap: MAX_BISHOP_EXPONENT });
            }
        }
        exponents.push(n);
        let weight = C64::new(0.5f64.powi(k as i32), 0.0);
        terms.push(HoloFunction::scale(
            weight,
            HoloFunction::Product { factors: vec![HoloFunction::power(h.clone(), n as u32), phi.clone()] },
        ));
    }
    let total = 1.0 - 0.5f64.powi(params.terms as i32);
    let normalization = 1.0 / total;
    let function = HoloFunction::scale(C64::new(normalization, 0.0), HoloFunction::Sum { terms });
    Ok(PullbackResult { function, separator: phi, fiber, peak_point: xj, exponents, normalization })
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// One step of the Carathéodory growth probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfcRow {
    pub k: usize,
    pub target: Vec<C64>,
    pub lower_bound_mobius: f64,
    pub lower_bound_poincare: f64,
}

/// Extremal function on the polydisc for `c*(z0, z)`: the Möbius map of
/// the coordinate realizing the largest pseudo-hyperbolic distance.
pub fn polydisc_extremal(z0: &[C64], z: &[C64]) -> Result<HoloFunction> {
    let mut best = (0usize, -1.0);
    for (i, (a, b)) in z0.iter().zip(z).enumerate() {
        let m = mobius_distance(*a, *b)?;
        if m > best.1 {
            best = (i, m);
        }
    }
    let i = best.0;
    let c = z0[i];
    Ok(HoloFunction::quotient(
        HoloFunction::shifted_coordinate(i, c),
        HoloFunction::Sum {
            terms: vec![
                HoloFunction::constant(C64::new(1.0, 0.0)),
                HoloFunction::scale(-c.conj(), HoloFunction::coordinate(i)),
            ],
        },
    ))
}

/// Lower bounds for `c_target(w0, w_k)` through `g_{w_k} = π_m ∘ (f × ... × f) ∘ F^{-1}`,
/// for maps whose source is a polydisc.
pub fn cfc_probe(
    map: &ProperMap,
    w0: &[C64],
    sequence: &[Vec<C64>],
    grid: usize,
    tol: &ToleranceProfile,
    exec: Exec,
) -> Result<Vec<CfcRow>> {
    map.validate()?;
    let z0 = map.fiber(w0, tol)?.swap_remove(0);
    let rows = par::map(exec, &sequence.iter().enumerate().collect::<Vec<_>>(), |&(k, w)| -> Result<CfcRow> {
        let z = map.fiber(w, tol)?.swap_remove(0);
        let f = polydisc_extremal(&z0, &z)?;
        let g = fiber_compose(map, &f);
        let a = g.evaluate_map(w0, tol)?;
        let b = g.evaluate_map(w, tol)?;
        let bound = if a.iter().zip(&b).all(|(x, y)| (x - y).norm() == 0.0) {
            sympoly::CarathBound { mobius: 0.0, poincare: 0.0 }
        } else {
            carath_lb_with(&a, &b, grid, tol, Exec::Sequential)?
        };
        Ok(CfcRow { k, target: w.clone(), lower_bound_mobius: bound.mobius, lower_bound_poincare: bound.poincare })
    });
    rows.into_iter().collect()
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

    fn sorted_first(f: &[Vec<C64>]) -> Vec<f64> {
        let mut v: Vec<f64> = f.iter().map(|p| p[0].re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn fiber_examples() {
        let s2 = ProperMap::Symmetrization { n: 2 };
        let f = s2.fiber(&[c(0.0, 0.0), c(-0.25, 0.0)], &tol()).unwrap();
        assert_eq!(f.len(), 2);
        let v = sorted_first(&f);
        assert!((v[0] + 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12);

        let p2 = ProperMap::PowerMap { exponents: vec![2] };
        let f = p2.fiber(&[c(1.0, 0.0)], &tol()).unwrap();
        let v = sorted_first(&f);
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);

        let f = s2.fiber(&[c(2.0, 0.0), c(1.0, 0.0)], &tol()).unwrap();
        assert!(f.iter().flatten().all(|x| (x - c(1.0, 0.0)).norm() < 1e-9));
    }

    #[test]
    fn composition_fiber_size() {
        let m = ProperMap::Composition {
            maps: vec![ProperMap::PowerMap { exponents: vec![2, 1] }, ProperMap::Symmetrization { n: 2 }],
        };
        assert_eq!(m.multiplicity(), 4);
        let z = vec![c(0.3, 0.2), c(-0.1, 0.4)];
        let w = m.apply(&z).unwrap();
        let f = m.fiber(&w, &tol()).unwrap();
        assert_eq!(f.len(), 4);
        for p in &f {
            let back = m.apply(p).unwrap();
            assert!(back.iter().zip(&w).all(|(a, b)| (a - b).norm() < 1e-9));
        }
    }

    #[test]
    fn separator_examples() {
        let e = vec![vec![c(1.0, 0.0)], vec![c(-1.0, 0.0)]];
        let phi = separator(&e, 0, &tol()).unwrap();
        assert!((phi.evaluate(&[c(1.0, 0.0)]).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(phi.evaluate(&[c(-1.0, 0.0)]).unwrap().norm() < 1e-15);
        assert!((phi.evaluate(&[c(0.0, 0.0)]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);

        let e = vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(1.0, 0.0)]];
        let phi = separator(&e, 0, &tol()).unwrap();
        assert!((phi.evaluate(&[c(0.2, 0.0), c(7.0, 0.0)]).unwrap() - c(0.6, 0.0)).norm() < 1e-15);

        let dup = vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]];
        assert_eq!(separator(&dup, 0, &tol()), Err(Error::IndistinctPoints(0, 1)));
    }

    #[test]
    fn transfer_symmetrization_example() {
        let phi = HoloFunction::scale(
            c(0.5, 0.0),
            HoloFunction::Sum { terms: vec![HoloFunction::coordinate(0), HoloFunction::coordinate(1)] },
        );
        let s2 = ProperMap::Symmetrization { n: 2 };
        let res = transfer_peak(&s2, &phi, &[c(1.0, 0.0), c(1.0, 0.0)], &tol()).unwrap();
        assert!((res.g_at_b[0] - c(2.0, 0.0)).norm() < 1e-8);
        let w = vec![c(0.4, 0.3), c(-0.2, 0.1)];
        let gw = res.g.evaluate_map(&w, &tol()).unwrap();
        assert!((gw[0] - w[0]).norm() < 1e-10);
        assert!((gw[1] - w[0] * w[0] / 4.0).norm() < 1e-10);
        let v = res.function.evaluate(&w).unwrap();
        assert!((v - w[0] / 2.0).norm() < 1e-10);
    }

    #[test]
    fn cfc_regression_value() {
        let s2 = ProperMap::Symmetrization { n: 2 };
        let t: f64 = 1e-2;
        let w = vec![c(2.0 * (1.0 - t), 0.0), c((1.0 - t) * (1.0 - t), 0.0)];
        let rows = cfc_probe(&s2, &[c(0.0, 0.0), c(0.0, 0.0)], &[w], 64, &tol(), Exec::Sequential).unwrap();
        assert!((rows[0].lower_bound_mobius - (1.0 - t)).abs() < 1e-9);
    }
}
