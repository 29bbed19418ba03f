use super::C64;
use crate::error::{Error, Result};

/// Pseudo-hyperbolic distance `|a - b| / |1 - conj(a) b|` on the unit disc.
pub fn mobius_distance(a: C64, b: C64) -> Result<f64> {
    if a.norm() >= 1.0 || b.norm() >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "mobius_distance needs |a|,|b| < 1, got {} and {}",
            a.norm(),
            b.norm()
        )));
    }
    let den = (C64::new(1.0, 0.0) - a.conj() * b).norm();
    Ok(((a - b).norm() / den).min(1.0 - f64::EPSILON))
}

/// Poincaré distance corresponding to a Möbius-scale value.
pub fn poincare_from_mobius(m: f64) -> f64 {
    m.atanh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let z = C64::new(0.3, -0.4);
        assert!((mobius_distance(C64::new(0.0, 0.0), z).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(mobius_distance(z, z).unwrap(), 0.0);
        let d = mobius_distance(C64::new(0.5, 0.0), C64::new(-0.5, 0.0)).unwrap();
        assert!((d - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_outside_disc() {
        assert!(mobius_distance(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn symmetric() {
        let a = C64::new(0.1, 0.7);
        let b = C64::new(-0.6, 0.2);
        assert_eq!(mobius_distance(a, b).unwrap(), mobius_distance(b, a).unwrap());
    }
}
