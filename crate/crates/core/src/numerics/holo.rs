//! Evaluable expression trees for the holomorphic functions built by the
//! constructions (peak functions, fractional maps, monomials, fiber pushes).
//!
//! Every node evaluates to a vector in `C^k`; scalar functions are the
//! `k = 1` case and are read back with [`HoloFunction::evaluate`].

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ToleranceProfile, C64};
use crate::error::{Error, Result};
use crate::sympoly::{frac_map, sym, FracParams};
use crate::transfer::ProperMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum HoloFunction {
    Identity,
    Coordinate { index: usize },
    Constant { value: C64 },
    LinearScale { factor: C64, inner: Box<HoloFunction> },
    /// `coeff * z^exponent`, exponents may be negative.
    Monomial { coeff: C64, exponent: Vec<i64> },
    /// The fractional map `p_{n,λ}: C^n -> C^(n-1)`.
    FractionalMap { n: usize, lambda: C64 },
    /// `conj(a) * z_0` with `|a| = 1`.
    MobiusAtom { a: C64 },
    /// `exp(1 / log(inner / diameter))`, branch with `arg` in `(π/2, 3π/2)`; `1` where `inner = 0`.
    ExpInvLog { inner: Box<HoloFunction>, diameter: f64 },
    /// Elementary symmetric functions of the scalar parts.
    SymCompose { parts: Vec<HoloFunction> },
    /// Elementary symmetric functions of `inner` over the fiber of `map`.
    FiberCompose { map: ProperMap, inner: Box<HoloFunction>, multiplicity: usize },
    /// The proper map itself, `z -> F(z)`.
    Forward { map: ProperMap },
    Compose { outer: Box<HoloFunction>, inner: Box<HoloFunction> },
    Product { factors: Vec<HoloFunction> },
    Sum { terms: Vec<HoloFunction> },
    Quotient { num: Box<HoloFunction>, den: Box<HoloFunction> },
    Power { base: Box<HoloFunction>, exponent: u32 },
    /// `<z - a, ν> = Σ (z_j - a_j) conj(ν_j)`.
    AffinePairing { nu: Vec<C64>, a: Vec<C64> },
}

impl HoloFunction {
    pub fn coordinate(index: usize) -> Self {
        Self::Coordinate { index }
    }

    pub fn constant(value: C64) -> Self {
        Self::Constant { value }
    }

    pub fn scale(factor: C64, inner: HoloFunction) -> Self {
        Self::LinearScale { factor, inner: Box::new(inner) }
    }

    pub fn compose(outer: HoloFunction, inner: HoloFunction) -> Self {
        Self::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    pub fn quotient(num: HoloFunction, den: HoloFunction) -> Self {
        Self::Quotient { num: Box::new(num), den: Box::new(den) }
    }

    pub fn power(base: HoloFunction, exponent: u32) -> Self {
        Self::Power { base: Box::new(base), exponent }
    }

    /// `z_index - c`.
    pub fn shifted_coordinate(index: usize, c: C64) -> Self {
        Self::Sum { terms: vec![Self::coordinate(index), Self::constant(-c)] }
    }

    /// Scalar value at `z` with the default tolerance profile.
    pub fn evaluate(&self, z: &[C64]) -> Result<C64> {
        self.evaluate_with(z, &ToleranceProfile::default())
    }

    pub fn evaluate_with(&self, z: &[C64], tol: &ToleranceProfile) -> Result<C64> {
        let v = self.evaluate_map(z, tol)?;
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(Error::DomainViolation(format!(
                "expected a scalar-valued function, got {} components",
                v.len()
            ))),
        }
    }

    pub fn evaluate_map(&self, z: &[C64], tol: &ToleranceProfile) -> Result<Vec<C64>> {
        use HoloFunction::*;
        let out = match self {
            Identity => z.to_vec(),
            Coordinate { index } => vec![*z.get(*index).ok_or_else(|| {
                Error::DomainViolation(format!("coordinate {index} of a {}-vector", z.len()))
            })?],
            Constant { value } => vec![*value],
            LinearScale { factor, inner } => {
                inner.evaluate_map(z, tol)?.into_iter().map(|v| factor * v).collect()
            }
            Monomial { coeff, exponent } => {
                if exponent.len() != z.len() {
                    return Err(Error::DomainViolation(format!(
                        "monomial in {} variables at a {}-vector",
                        exponent.len(),
                        z.len()
                    )));
                }
                let mut acc = *coeff;
                for (j, (&zj, &e)) in z.iter().zip(exponent).enumerate() {
                    if e < 0 && zj == C64::new(0.0, 0.0) {
                        return Err(Error::DomainViolation(format!(
                            "negative exponent at vanishing coordinate {j}"
                        )));
                    }
                    acc *= zj.powi(e as i32);
                }
                vec![acc]
            }
            FractionalMap { n, lambda } => {
                if z.len() != *n {
                    return Err(Error::DomainViolation(format!(
                        "fractional map p_{n} at a {}-vector",
                        z.len()
                    )));
                }
                frac_map(&FracParams { n: *n, lambda: *lambda }, z, tol)?
            }
            MobiusAtom { a } => vec![a.conj() * scalar_arg(z)?],
            ExpInvLog { inner, diameter } => {
                let w = inner.evaluate_with(z, tol)?;
                vec![exp_inv_log(w, *diameter)?]
            }
            SymCompose { parts } => {
                let vals = parts
                    .iter()
                    .map(|p| p.evaluate_with(z, tol))
                    .collect::<Result<Vec<_>>>()?;
                sym(&vals)
            }
            FiberCompose { map, inner, .. } => {
                let vals = map
                    .fiber(z, tol)?
                    .iter()
                    .map(|x| inner.evaluate_with(x, tol))
                    .collect::<Result<Vec<_>>>()?;
                sym(&vals)
            }
            Forward { map } => map.apply(z)?,
            Compose { outer, inner } => {
                let w = inner.evaluate_map(z, tol)?;
                outer.evaluate_map(&w, tol)?
            }
            Product { factors } => {
                let mut acc = C64::new(1.0, 0.0);
                for f in factors {
                    acc *= f.evaluate_with(z, tol)?;
                }
                vec![acc]
            }
            Sum { terms } => {
                let mut acc = C64::new(0.0, 0.0);
                for t in terms {
                    acc += t.evaluate_with(z, tol)?;
                }
                vec![acc]
            }
            Quotient { num, den } => {
                let d = den.evaluate_with(z, tol)?;
                if d.norm() <= tol.lp_feas_tol {
                    return Err(Error::DomainViolation(format!("denominator {d} vanishes")));
                }
                vec![num.evaluate_with(z, tol)? / d]
            }
            Power { base, exponent } => vec![base.evaluate_with(z, tol)?.powu(*exponent)],
            AffinePairing { nu, a } => {
                if nu.len() != z.len() || a.len() != z.len() {
                    return Err(Error::DomainViolation("affine pairing dimension mismatch".into()));
                }
                vec![z.iter().zip(a).zip(nu).map(|((zj, aj), nj)| (zj - aj) * nj.conj()).sum()]
            }
        };
        Ok(out)
    }

    /// Stable short hash of the canonical JSON form of the tree.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("expression trees serialize");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }

    pub fn depth(&self) -> usize {
        use HoloFunction::*;
        1 + match self {
            LinearScale { inner, .. } | ExpInvLog { inner, .. } | FiberCompose { inner, .. } => {
                inner.depth()
            }
            Power { base, .. } => base.depth(),
            Compose { outer, inner } => outer.depth().max(inner.depth()),
            Quotient { num, den } => num.depth().max(den.depth()),
            SymCompose { parts: v } | Product { factors: v } | Sum { terms: v } => {
                v.iter().map(|f| f.depth()).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

fn scalar_arg(z: &[C64]) -> Result<C64> {
    match z {
        [w] => Ok(*w),
        _ => Err(Error::DomainViolation(format!("expected one variable, got {}", z.len()))),
    }
}

/// `exp(1 / log(w / d))` on the open left half-plane, with the continuous
/// extension `1` at `w = 0`.
///
/// The logarithm takes `arg` in `(π/2, 3π/2)`, computed as `Log(-w/d) + iπ`.
/// It agrees with the principal branch on the upper half of the left
/// half-plane and, unlike it, has no cut along the negative real axis.
pub fn exp_inv_log(w: C64, d: f64) -> Result<C64> {
    if w == C64::new(0.0, 0.0) {
        return Ok(C64::new(1.0, 0.0));
    }
    if w.re >= 0.0 {
        return Err(Error::BranchViolation { re: w.re, im: w.im });
    }
    let log = (-w / d).ln() + C64::new(0.0, std::f64::consts::PI);
    Ok(log.inv().exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_example() {
        let f = HoloFunction::Monomial { coeff: c(1.0, 0.0), exponent: vec![1, 1] };
        assert_eq!(f.evaluate(&[c(2.0, 0.0), c(0.0, 3.0)]).unwrap(), c(0.0, 6.0));
    }

    #[test]
    fn compose_with_identity() {
        let f = HoloFunction::compose(HoloFunction::coordinate(0), HoloFunction::Identity);
        let z = [c(0.25, -1.0), c(3.0, 0.5)];
        assert_eq!(f.evaluate(&z).unwrap(), z[0]);
    }

    #[test]
    fn exp_inv_log_example() {
        // independent evaluation: 1/(ln(1/2) + iπ) has real part ln(1/2)/(ln(1/2)^2 + π^2)
        let l = 0.5f64.ln();
        let expected = (l / (l * l + std::f64::consts::PI.powi(2))).exp();
        let v = exp_inv_log(c(-1.0, 0.0), 2.0).unwrap();
        assert!((v.norm() - expected).abs() < 1e-15);
        assert!((v.norm() - 0.9352).abs() < 5e-5);
    }

    #[test]
    fn continuous_across_negative_axis() {
        let above = exp_inv_log(c(-0.5, 1e-13), 2.0).unwrap();
        let below = exp_inv_log(c(-0.5, -1e-13), 2.0).unwrap();
        assert!((above - below).norm() < 1e-12);
        // Principal branch in the upper half.
        let w = c(-0.3, 0.4);
        assert!((exp_inv_log(w, 2.0).unwrap() - (w / 2.0).ln().inv().exp()).norm() < 1e-15);
    }

    #[test]
    fn branch_violation() {
        assert!(matches!(exp_inv_log(c(0.1, 0.0), 2.0), Err(Error::BranchViolation { .. })));
        assert_eq!(exp_inv_log(c(0.0, 0.0), 2.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn coordinate_out_of_range_is_domain_violation() {
        let f = HoloFunction::coordinate(3);
        assert!(matches!(f.evaluate(&[c(1.0, 0.0)]), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn negative_exponent_at_axis() {
        let f = HoloFunction::Monomial { coeff: c(1.0, 0.0), exponent: vec![-1, 1] };
        assert!(f.evaluate(&[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn fingerprint_is_stable_and_distinguishing() {
        let a = HoloFunction::coordinate(0);
        let b = HoloFunction::coordinate(1);
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(HoloFunction::compose(a, b).depth(), 2);
    }
}
