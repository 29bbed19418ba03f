//! Sampled peak verification: `f(a) = 1`, `|f| < 1` on the domain, a positive
//! margin away from `a`, and continuity of `f` at `a` from inside the domain.

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::numerics::par::{self, Exec};
use crate::numerics::{HoloFunction, ToleranceProfile, C64};

/// Cap on the number of distinct evaluation-failure causes kept in a report.
const MAX_CAUSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub interior: usize,
    pub boundary: usize,
    /// Euclidean radius of the excluded neighbourhood `B(a, radius)`.
    pub radius: f64,
    pub seed: u64,
    /// Interior points within this distance of `a` probe continuity at `a`.
    pub continuity_radius: f64,
    pub continuity_samples: usize,
    /// Largest admissible `|f(w) - f(a)|` over the continuity probe.
    pub continuity_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            interior: 10_000,
            boundary: 1_000,
            radius: 0.1,
            seed: 0,
            continuity_radius: 1e-5,
            continuity_samples: 64,
            continuity_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Interior,
    Boundary,
    Near,
}

/// One sampled `|f|` value, kept for CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleValue {
    pub kind: SampleKind,
    pub point: Vec<C64>,
    pub abs_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub domain: String,
    pub target: Vec<C64>,
    pub fingerprint: String,
    pub value_at_target: Option<C64>,
    pub sampled_sup_interior: f64,
    /// `1 - sup |f|` over interior samples outside `B(a, radius)`.
    pub margin_off_neighborhood: f64,
    /// Diagnostic only: `sup |f|` over boundary samples outside `B(a, radius)`.
    pub sampled_sup_boundary_off: f64,
    pub radius: f64,
    pub interior_samples: usize,
    pub off_neighborhood_samples: usize,
    pub boundary_samples: usize,
    pub continuity_samples: usize,
    pub continuity_defect: f64,
    pub seed: u64,
    pub config: VerifyConfig,
    pub tolerances: ToleranceProfile,
    pub verdict: Verdict,
    pub causes: Vec<String>,
    #[serde(skip)]
    pub samples: Vec<SampleValue>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt()
}

pub fn verify_peak(
    f: &HoloFunction,
    a: &[C64],
    domain: &Domain,
    cfg: &VerifyConfig,
    tol: &ToleranceProfile,
    exec: Exec,
) -> VerificationReport {
    let mut causes = Vec::new();
    let note = |causes: &mut Vec<String>, msg: String| {
        if causes.len() < MAX_CAUSES && !causes.contains(&msg) {
            causes.push(msg);
        }
    };
    if a.len() != domain.dim() {
        note(&mut causes, format!("target has dimension {}, domain has {}", a.len(), domain.dim()));
    }

    let value = f.evaluate_with(a, tol);
    let value_at_target = match &value {
        Ok(v) => {
            if (v - C64::new(1.0, 0.0)).norm() > tol.peak_value_tol {
                note(&mut causes, format!("|f(a) - 1| = {:.3e} exceeds {:.1e}", (v - 1.0).norm(), tol.peak_value_tol));
            }
            Some(*v)
        }
        Err(e) => {
            note(&mut causes, format!("evaluation at target failed: {e}"));
            None
        }
    };

    let eval_all = |pts: &[Vec<C64>]| par::map(exec, pts, |z| f.evaluate_with(z, tol).map(|v| v.norm()));

    let interior = domain.sample_interior(cfg.interior, cfg.seed).points;
    let interior_vals = eval_all(&interior);
    let mut sup_interior: f64 = 0.0;
    let mut sup_off: f64 = 0.0;
    let mut off_count = 0;
    let mut samples = Vec::with_capacity(interior.len());
    for (z, v) in interior.iter().zip(&interior_vals) {
        match v {
            Ok(m) => {
                sup_interior = sup_interior.max(*m);
                if *m >= 1.0 || m.is_nan() {
                    note(&mut causes, "interior sample with |f| >= 1".into());
                }
                if dist(z, a) >= cfg.radius {
                    off_count += 1;
                    sup_off = sup_off.max(*m);
                }
                samples.push(SampleValue { kind: SampleKind::Interior, point: z.clone(), abs_value: *m });
            }
            Err(e) => note(&mut causes, format!("evaluation failed on interior sample: {e}")),
        }
    }
    let margin = if off_count > 0 { 1.0 - sup_off } else { f64::NAN };
    if !(margin > 0.0) {
        note(&mut causes, format!("margin off B(a, {}) is not positive", cfg.radius));
    }

    let boundary = domain.sample_boundary(cfg.boundary, cfg.seed.wrapping_add(1)).points;
    let boundary_vals = eval_all(&boundary);
    let mut sup_boundary_off: f64 = 0.0;
    for (z, v) in boundary.iter().zip(&boundary_vals) {
        if let Ok(m) = v {
            if dist(z, a) >= cfg.radius {
                sup_boundary_off = sup_boundary_off.max(*m);
            }
            samples.push(SampleValue { kind: SampleKind::Boundary, point: z.clone(), abs_value: *m });
        }
    }

    let near = domain.sample_near(a, cfg.continuity_radius, cfg.continuity_samples, cfg.seed.wrapping_add(2), tol);
    let mut continuity_defect: f64 = 0.0;
    if near.is_empty() {
        note(&mut causes, "no interior points found near the target".into());
    }
    if let Some(fa) = value_at_target {
        for (z, v) in near.iter().zip(par::map(exec, &near, |z| f.evaluate_with(z, tol))) {
            match v {
                Ok(w) => {
                    continuity_defect = continuity_defect.max((w - fa).norm());
                    samples.push(SampleValue { kind: SampleKind::Near, point: z.clone(), abs_value: w.norm() });
                }
                Err(e) => note(&mut causes, format!("evaluation failed near target: {e}")),
            }
        }
    }
    if continuity_defect > cfg.continuity_tol {
        note(
            &mut causes,
            format!("f is discontinuous at the target: |f(w) - f(a)| = {continuity_defect:.3e} within {:.0e}", cfg.continuity_radius),
        );
    }

    let verdict = if causes.is_empty() { Verdict::Pass } else { Verdict::Fail };
    VerificationReport {
        domain: domain.name().into(),
        target: a.to_vec(),
        fingerprint: f.fingerprint(),
        value_at_target,
        sampled_sup_interior: sup_interior,
        margin_off_neighborhood: margin,
        sampled_sup_boundary_off: sup_boundary_off,
        radius: cfg.radius,
        interior_samples: interior.len(),
        off_neighborhood_samples: off_count,
        boundary_samples: boundary.len(),
        continuity_samples: near.len(),
        continuity_defect,
        seed: cfg.seed,
        config: *cfg,
        tolerances: *tol,
        verdict,
        causes,
        samples,
    }
}
