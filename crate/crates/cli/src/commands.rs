//! Subcommand implementations. Each returns a JSON result, a pass flag and
//! the sampled values for CSV export.

use std::path::Path;

use peakfn_core::cconvex::{normal_ray_profile, weak_peak, ConvexBody};
use peakfn_core::domain::Domain;
use peakfn_core::io::{self, DomainSpec, PieceSpec, ReinhardtSpec};
use peakfn_core::numerics::par::Exec;
use peakfn_core::numerics::{HoloFunction, ToleranceProfile, C64};
use peakfn_core::reinhardt::{
    classify_peak, envelope, extension_probe, is_log_convex, laurent_peak, laurent_sequence, LaurentMonomial,
    LaurentParams, ReinhardtDomain,
};
use peakfn_core::sympoly::{self, MembershipKind};
use peakfn_core::transfer::{cfc_probe, pullback_peak, transfer_peak, ProperMap, PullbackParams};
use peakfn_core::verify::{verify_peak, SampleKind, SampleValue, VerifyConfig};
use peakfn_core::{Error, Result};
use serde_json::{json, Value};

use crate::inputs::Inputs;

/// Normal-ray parameters for the weak peak check. Below about `1e-15` the
/// point `a - tν` rounds to `a` itself.
const RAY_STEPS: [f64; 9] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14];

pub struct Ctx {
    pub exec: Exec,
    pub tol: ToleranceProfile,
    pub verify: VerifyConfig,
}

pub struct Outcome {
    pub result: Value,
    pub passed: bool,
    pub samples: Vec<SampleValue>,
}

impl Outcome {
    fn info(result: Value) -> Self {
        Self { result, passed: true, samples: Vec::new() }
    }
}

fn reinhardt(spec: &DomainSpec) -> Result<ReinhardtDomain> {
    match spec.build()? {
        Domain::Reinhardt(d) => Ok(d),
        other => Err(Error::InvalidInput(format!("domain: expected type `reinhardt`, found `{}`", other.name()))),
    }
}

fn check_dim(domain: &Domain, z: &[C64]) -> Result<()> {
    if z.len() != domain.dim() {
        return Err(Error::InvalidInput(format!("point: expected {} coordinates, found {}", domain.dim(), z.len())));
    }
    Ok(())
}

pub fn classify(ctx: &Ctx, inputs: &mut Inputs, domain: &Path, point: &str) -> Result<Outcome> {
    let domain = inputs.domain(domain)?.build()?;
    let z = io::parse_point(point)?;
    check_dim(&domain, &z)?;
    let band = ctx.tol.boundary_band;
    let kind_of = |signed: f64| {
        if signed < -band {
            MembershipKind::Interior
        } else if signed <= band {
            MembershipKind::Boundary
        } else {
            MembershipKind::Exterior
        }
    };
    let result = match &domain {
        Domain::SymmetrizedPolydisc { .. } => json!(sympoly::classify(&z, &ctx.tol)?),
        Domain::Polydisc { .. } => {
            let m = z.iter().map(|w| w.norm()).fold(0.0, f64::max);
            json!({ "kind": kind_of(m - 1.0), "max_modulus": m })
        }
        Domain::Convex(b) => json!({ "kind": kind_of(b.violation(&z)), "violation": b.violation(&z) }),
        Domain::Reinhardt(d) => {
            let kind = if d.contains(&z) {
                MembershipKind::Interior
            } else {
                let x: Option<Vec<f64>> = z
                    .iter()
                    .enumerate()
                    .map(|(j, w)| match w.norm() {
                        m if m > 0.0 => Some(m.ln()),
                        _ if d.meets_axes[j] => Some(-1e6),
                        _ => None,
                    })
                    .collect();
                match x {
                    Some(x) if d.log_closure_contains(&x, ctx.tol.lp_feas_tol) => MembershipKind::Boundary,
                    _ => MembershipKind::Exterior,
                }
            };
            json!({ "kind": kind })
        }
        Domain::HalfDisc | Domain::SlitDisc => {
            let w = z[0];
            let kind = if domain.contains(&z, &ctx.tol) {
                MembershipKind::Interior
            } else if w.norm() <= 1.0 + band && (domain == Domain::SlitDisc || w.re >= -band) {
                MembershipKind::Boundary
            } else {
                MembershipKind::Exterior
            };
            json!({ "kind": kind })
        }
    };
    Ok(Outcome::info(result))
}

pub fn peak(ctx: &Ctx, inputs: &mut Inputs, domain: &Path, point: &str) -> Result<Outcome> {
    let domain = inputs.domain(domain)?.build()?;
    let a = io::parse_point(point)?;
    check_dim(&domain, &a)?;
    let f = match &domain {
        Domain::SymmetrizedPolydisc { .. } => sympoly::peak_at(&a, &ctx.tol)?,
        Domain::Polydisc { .. } => {
            let j = a
                .iter()
                .position(|w| (w.norm() - 1.0).abs() <= ctx.tol.boundary_band)
                .ok_or(Error::NotOnBoundary { violation: a.iter().map(|w| w.norm() - 1.0).fold(f64::MIN, f64::max) })?;
            HoloFunction::scale(a[j].conj(), HoloFunction::coordinate(j))
        }
        Domain::Convex(body) => return convex_peak(ctx, body, &a),
        Domain::Reinhardt(_) => {
            return Err(Error::ScopeViolation("Reinhardt domains use the `laurent` subcommand".into()))
        }
        Domain::HalfDisc | Domain::SlitDisc => {
            return Err(Error::ScopeViolation(format!("no peak construction for `{}`", domain.name())))
        }
    };
    let report = verify_peak(&f, &a, &domain, &ctx.verify, &ctx.tol, ctx.exec);
    let passed = report.passed();
    let samples = report.samples.clone();
    Ok(Outcome { result: json!({ "function": f, "verification": report }), passed, samples })
}

/// Weak peak on a convex body: `|φ| < 1` on interior samples and `|φ| → 1`
/// monotonically along the inward normal.
fn convex_peak(ctx: &Ctx, body: &ConvexBody, a: &[C64]) -> Result<Outcome> {
    let wp = weak_peak(body, a, &ctx.tol)?;
    let pts = body.sample_interior(ctx.verify.interior, ctx.verify.seed).points;
    let mut samples = Vec::with_capacity(pts.len());
    let mut sup: f64 = 0.0;
    for z in pts {
        let m = wp.function.evaluate_with(&z, &ctx.tol)?.norm();
        sup = sup.max(m);
        samples.push(SampleValue { kind: SampleKind::Interior, point: z, abs_value: m });
    }
    let profile = normal_ray_profile(&wp, a, &RAY_STEPS, &ctx.tol)?;
    let monotone = profile.windows(2).all(|w| w[1] >= w[0]);
    let below_one = sup < 1.0 && profile.iter().all(|&m| m < 1.0);
    let ray: Vec<Value> = RAY_STEPS.iter().zip(&profile).map(|(t, m)| json!({ "t": t, "abs_value": m })).collect();
    Ok(Outcome {
        result: json!({
            "weak_peak": wp,
            "sampled_sup_interior": sup,
            "interior_samples": samples.len(),
            "normal_ray": ray,
            "normal_ray_monotone": monotone,
            "seed": ctx.verify.seed,
        }),
        passed: monotone && below_one,
        samples,
    })
}

pub fn reinhardt_classify(ctx: &Ctx, inputs: &mut Inputs, domain: &Path, point: &str) -> Result<Outcome> {
    let d = reinhardt(&inputs.domain(domain)?)?;
    let z = io::parse_point(point)?;
    Ok(Outcome::info(json!(classify_peak(&d, &z, &ctx.tol)?)))
}

/// `"3"`, `"1,2,4"` or `"1..8"` (inclusive).
pub fn parse_mus(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidInput(format!("mu: cannot parse `{text}` (use 3, 1,2,4 or 1..8)"));
    let mus: Vec<u64> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if mus.is_empty() || mus.contains(&0) {
        return Err(bad());
    }
    Ok(mus)
}

pub fn laurent(
    ctx: &Ctx,
    inputs: &mut Inputs,
    domain: &Path,
    point: &str,
    mu: &str,
    n_depth: f64,
    u_radius: f64,
) -> Result<Outcome> {
    let d = reinhardt(&inputs.domain(domain)?)?;
    let z0 = io::parse_point(point)?;
    let mus = parse_mus(mu)?;
    let params = LaurentParams {
        mu: mus[0],
        n_depth,
        u_radius,
        samples: ctx.verify.interior,
        seed: ctx.verify.seed,
        ..LaurentParams::default()
    };
    let outcomes =
        if mus.len() == 1 { vec![laurent_peak(&d, &z0, &params, &ctx.tol)?] } else { laurent_sequence(&d, &z0, &mus, &params, &ctx.tol)? };
    let passed = outcomes.iter().all(|o| o.verified);
    Ok(Outcome { result: json!({ "outcomes": outcomes }), passed, samples: Vec::new() })
}

fn default_target(map: &ProperMap) -> Option<Domain> {
    match map {
        ProperMap::Symmetrization { n } => Some(Domain::SymmetrizedPolydisc { n: *n }),
        _ => None,
    }
}

pub fn transfer(
    ctx: &Ctx,
    inputs: &mut Inputs,
    map: &Path,
    source_peak: &Path,
    target: Option<&Path>,
    source: Option<&Path>,
) -> Result<Outcome> {
    let map = inputs.map(map)?;
    let peak = inputs.peak("source_peak", source_peak)?;
    let target = match target {
        Some(p) => inputs.domain_as("target_domain", p)?.build()?,
        None => default_target(&map)
            .ok_or_else(|| Error::InvalidInput("--domain (target domain) is required for this map".into()))?,
    };
    let source_report = match source {
        Some(p) => {
            let src = inputs.domain_as("source_domain", p)?.build()?;
            Some(verify_peak(&peak.function, &peak.point, &src, &ctx.verify, &ctx.tol, ctx.exec))
        }
        None => None,
    };
    let res = transfer_peak(&map, &peak.function, &peak.point, &ctx.tol)?;
    let report = verify_peak(&res.function, &res.b, &target, &ctx.verify, &ctx.tol, ctx.exec);
    let passed = report.passed() && source_report.as_ref().is_none_or(|r| r.passed());
    let samples = report.samples.clone();
    Ok(Outcome {
        result: json!({ "transfer": res, "source_verification": source_report, "verification": report }),
        passed,
        samples,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn pullback(
    ctx: &Ctx,
    inputs: &mut Inputs,
    map: &Path,
    target_peak: &Path,
    fiber_index: usize,
    source: &Path,
    terms: usize,
    r0: f64,
) -> Result<Outcome> {
    let map = inputs.map(map)?;
    let peak = inputs.peak("target_peak", target_peak)?;
    let domain = inputs.domain(source)?.build()?;
    let calib = domain.sample_interior(ctx.verify.interior, ctx.verify.seed.wrapping_add(7)).points;
    let res = pullback_peak(&map, &peak.function, &peak.point, fiber_index, &calib, &PullbackParams { terms, r0 }, &ctx.tol)?;
    let mut others = Vec::new();
    for (i, x) in res.fiber.iter().enumerate() {
        if i != fiber_index {
            let v = res.function.evaluate_with(x, &ctx.tol)?;
            others.push(json!({ "index": i, "point": x, "abs_value": v.norm() }));
        }
    }
    let report = verify_peak(&res.function, &res.peak_point, &domain, &ctx.verify, &ctx.tol, ctx.exec);
    let passed = report.passed();
    let samples = report.samples.clone();
    Ok(Outcome {
        result: json!({ "pullback": res, "other_fiber_values": others, "verification": report }),
        passed,
        samples,
    })
}

pub fn cfc(ctx: &Ctx, inputs: &mut Inputs, map: &Path, sequence: &Path, base: Option<&str>, grid: usize) -> Result<Outcome> {
    let map = inputs.map(map)?;
    let seq = inputs.points("sequence", sequence)?;
    let w0 = match base {
        Some(b) => io::parse_point(b)?,
        None => map.apply(&vec![C64::new(0.0, 0.0); map.source_dim()])?,
    };
    let rows = cfc_probe(&map, &w0, &seq, grid, &ctx.tol, ctx.exec)?;
    let increasing = rows.windows(2).all(|w| w[1].lower_bound_poincare > w[0].lower_bound_poincare);
    Ok(Outcome::info(json!({ "base": w0, "grid": grid, "rows": rows, "strictly_increasing": increasing })))
}

pub fn envelope_cmd(ctx: &Ctx, inputs: &mut Inputs, domain: &Path) -> Result<Outcome> {
    let spec = inputs.domain(domain)?;
    let d = reinhardt(&spec)?;
    let env = envelope(&d)?;
    let pieces = env
        .pieces
        .iter()
        .map(|p| PieceSpec {
            a: p.poly().rows.iter().map(|r| r.normal.clone()).collect(),
            b: p.poly().rows.iter().map(|r| r.offset).collect(),
        })
        .collect();
    let out = DomainSpec::Reinhardt(ReinhardtSpec { pieces, meets_axes: env.meets_axes.clone() });
    Ok(Outcome::info(json!({ "log_convex": is_log_convex(&d, &ctx.tol)?, "envelope": out })))
}

pub fn extension(ctx: &Ctx, steps: usize) -> Result<Outcome> {
    // f(z, w) = w / z
    let f = LaurentMonomial { coeff: C64::new(1.0, 0.0), exponent: vec![-1, 1] };
    let probe = extension_probe(steps, &f, ctx.verify.interior, ctx.verify.seed)?;
    let slack = 1.0 + 1e-9;
    let steps_ok = probe.steps.iter().all(|s| s.sampled_sup <= s.bound * slack && s.exact_sup <= s.bound * slack);
    let envelope_reaches = probe.shell_sampled_sup_envelope >= (-2.0f64).exp();
    let domain_capped = probe.shell_sampled_sup_domain <= (-(steps as f64)).exp();
    Ok(Outcome {
        result: json!({
            "probe": probe,
            "checks": {
                "steps_bounded": steps_ok,
                "envelope_shell_reaches_e^-2": envelope_reaches,
                "domain_shell_capped_e^-k": domain_capped,
            }
        }),
        passed: steps_ok && envelope_reaches && domain_capped,
        samples: Vec::new(),
    })
}

pub fn carath(ctx: &Ctx, from: &str, to: &str, grid: usize) -> Result<Outcome> {
    let z = io::parse_point(from)?;
    let w = io::parse_point(to)?;
    let bound = sympoly::carath_lb_with(&z, &w, grid, &ctx.tol, ctx.exec)?;
    Ok(Outcome::info(json!({ "from": z, "to": w, "grid": grid, "bound": bound })))
}
