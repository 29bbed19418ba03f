use serde::{Deserialize, Serialize};

use super::envelope::envelope;
use super::laurent::LaurentMonomial;
use super::{LogPolyhedron, ReinhardtDomain};
use crate::error::Result;
use crate::numerics::{sampling, C64};
use crate::polytope::{HalfSpace, LpOutcome, Polyhedron};

/// Staircase domain truncated after `k` steps with floor `y >= floor`:
/// `0 <= x <= 1, y <= 0` and, for step `n`, `-n^2 <= x <= -(n-1)^2, y <= -n^2 - n`.
pub fn example_staircase(k: usize, floor: f64) -> Result<ReinhardtDomain> {
    let mut pieces = vec![LogPolyhedron::boxed(&[0.0, floor], &[1.0, 0.0])?];
    for n in 1..=k {
        let nf = n as f64;
        pieces.push(LogPolyhedron::boxed(&[-nf * nf, floor], &[-(nf - 1.0).powi(2), -nf * nf - nf])?);
    }
    ReinhardtDomain::new(pieces, vec![false, false])
}

/// Default floor: five units below the deepest step.
pub fn staircase_floor(k: usize) -> f64 {
    let kf = k as f64;
    -kf * kf - kf - 5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub sampled_sup: f64,
    /// `exp(max (y - x))` over the step, by linear programming.
    pub exact_sup: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub k: usize,
    pub floor: f64,
    pub samples_per_region: usize,
    pub seed: u64,
    pub steps: Vec<StepReport>,
    pub sampled_sup_domain: f64,
    /// Shell `log|z| <= -(k-1)^2`.
    pub shell_log_radius: f64,
    pub shell_sampled_sup_domain: f64,
    pub shell_exact_sup_domain: f64,
    pub shell_sampled_sup_envelope: f64,
    pub shell_exact_sup_envelope: f64,
    pub envelope: ReinhardtDomain,
}

/// `|f|` over the truncated staircase, each step, and the near-origin shell
/// of the domain and of its envelope, for a Laurent monomial `f` in `(z, w)`.
pub fn extension_probe(k: usize, f: &LaurentMonomial, samples: usize, seed: u64) -> Result<ExtensionReport> {
    let floor = staircase_floor(k);
    let d = example_staircase(k, floor)?;
    let env = envelope(&d)?;
    let beta: Vec<f64> = f.exponent.iter().map(|&b| b as f64).collect();
    let lc = f.coeff.norm().ln();

    let mut steps = Vec::with_capacity(k);
    let mut sampled_sup_domain: f64 = 0.0;
    for (idx, piece) in d.pieces.iter().enumerate() {
        let s = sample_sup(piece.poly(), f, samples, seed.wrapping_add(idx as u64));
        sampled_sup_domain = sampled_sup_domain.max(s);
        if idx == 0 {
            continue;
        }
        steps.push(StepReport {
            step: idx,
            sampled_sup: s,
            exact_sup: (lp_sup(piece.poly(), &beta) + lc).exp(),
            bound: (-(idx as f64)).exp(),
        });
    }

    let shell_log_radius = -((k as f64 - 1.0).powi(2));
    let shell_row = HalfSpace::new(vec![1.0, 0.0], shell_log_radius);
    let mut shell_sampled_sup_domain: f64 = 0.0;
    let mut shell_exact_sup_domain = f64::NEG_INFINITY;
    for (idx, piece) in d.pieces.iter().enumerate() {
        let cut = with_row(piece.poly(), &shell_row);
        if cut.interior_point().is_none() {
            // a shell slice of measure zero holds no samples; keep the exact value
            if !cut.vertices().is_empty() {
                shell_exact_sup_domain = shell_exact_sup_domain.max(lp_sup(&cut, &beta));
            }
            continue;
        }
        shell_exact_sup_domain = shell_exact_sup_domain.max(lp_sup(&cut, &beta));
        let s = sample_sup(&cut, f, samples, seed.wrapping_add(1000 + idx as u64));
        shell_sampled_sup_domain = shell_sampled_sup_domain.max(s);
    }
    let env_cut = with_row(env.pieces[0].poly(), &shell_row);
    let shell_exact_sup_envelope = (lp_sup(&env_cut, &beta) + lc).exp();
    let shell_sampled_sup_envelope = sample_sup(&env_cut, f, samples, seed.wrapping_add(2000));

    Ok(ExtensionReport {
        k,
        floor,
        samples_per_region: samples,
        seed,
        steps,
        sampled_sup_domain,
        shell_log_radius,
        shell_sampled_sup_domain,
        shell_exact_sup_domain: (shell_exact_sup_domain + lc).exp(),
        shell_sampled_sup_envelope,
        shell_exact_sup_envelope,
        envelope: env,
    })
}

/// Values of `f` at `(t, c·t)` for each `c` and shrinking `t`: the limits
/// along rays into the origin of the envelope.
pub fn ray_limits(f: &LaurentMonomial, cs: &[f64], ts: &[f64]) -> Result<Vec<Vec<C64>>> {
    cs.iter()
        .map(|&c| ts.iter().map(|&t| f.evaluate(&[C64::new(t, 0.0), C64::new(c * t, 0.0)])).collect())
        .collect()
}

fn with_row(p: &Polyhedron, row: &HalfSpace) -> Polyhedron {
    let mut rows = p.rows.clone();
    rows.push(row.clone());
    Polyhedron { dim: p.dim, rows }
}

fn lp_sup(p: &Polyhedron, beta: &[f64]) -> f64 {
    match p.lp_max(beta) {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Unbounded { .. } => f64::INFINITY,
        LpOutcome::Infeasible => f64::NEG_INFINITY,
    }
}

fn sample_sup(p: &Polyhedron, f: &LaurentMonomial, count: usize, seed: u64) -> f64 {
    let Ok(piece) = LogPolyhedron::new(p.clone()) else { return 0.0 };
    let mut rng = sampling::rng(seed);
    piece
        .sample_log(&mut rng, count)
        .iter()
        .map(|x| f.log_modulus(x).exp())
        .fold(0.0, f64::max)
}
