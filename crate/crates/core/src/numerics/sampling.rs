use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStrategy {
    Interior,
    Boundary,
    AnnularShell,
}

/// A reproducible batch of points; regenerating from `(seed, strategy, count)`
/// yields identical bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub points: Vec<Vec<C64>>,
    pub seed: u64,
    pub strategy: SampleStrategy,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the open disc of the given radius (rejection from the square).
pub fn disc_point<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    loop {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        if x * x + y * y < 1.0 {
            return C64::new(radius * x, radius * y);
        }
    }
}

/// Uniform point of the closed disc of the given radius.
pub fn closed_disc_point<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    loop {
        let x: f64 = rng.gen_range(-1.0..=1.0);
        let y: f64 = rng.gen_range(-1.0..=1.0);
        if x * x + y * y <= 1.0 {
            return C64::new(radius * x, radius * y);
        }
    }
}

pub fn circle_point<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Uniform direction in `R^dim` scaled to a uniform radius in the ball.
pub fn ball_offset<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 < 1.0 && n2 > 0.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<C64> = {
            let mut r = rng(7);
            (0..5).map(|_| disc_point(&mut r, 1.0)).collect()
        };
        let b: Vec<C64> = {
            let mut r = rng(7);
            (0..5).map(|_| disc_point(&mut r, 1.0)).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|z| z.norm() < 1.0));
    }
}
