//! Rayleigh channel draws, RIS phase alignment and cascaded gains.
//!
//! Randomness comes from counter-based substreams: trial `i` of a run seeded
//! with `s` always reads ChaCha8 stream `i` under key `s`, regardless of which
//! thread evaluates it or in what order.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use num_complex::Complex64 as Complex;

/// Produces independent, reproducible generators indexed by trial number.
#[derive(Clone, Debug)]
pub struct Substreams {
    base: ChaCha8Rng,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator for substream `index`, positioned at its start.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

/// One draw of every link coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// PS → user.
    pub h1: Complex,
    /// User → RIS, one per element.
    pub h2: Vec<Complex>,
    /// RIS → BS, one per element.
    pub h3: Vec<Complex>,
}

impl ChannelRealization {
    pub fn elements(&self) -> usize {
        self.h2.len()
    }
}

/// RIS phase shifts in radians, each in (−π, π].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(pub Vec<f64>);

impl PhaseVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Circularly-symmetric complex Gaussian with E|h|² = 1.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draw h1 and `m` pairs (h2[k], h3[k]).
///
/// Draw order is h1 followed by h2[0], h3[0], h2[1], h3[1], ...; the
/// allocation-free [`sample_gains`] relies on the same order.
pub fn sample_realization<R: Rng + ?Sized>(rng: &mut R, m: usize) -> ChannelRealization {
    let h1 = complex_gaussian(rng);
    let mut h2 = Vec::with_capacity(m);
    let mut h3 = Vec::with_capacity(m);
    for _ in 0..m {
        h2.push(complex_gaussian(rng));
        h3.push(complex_gaussian(rng));
    }
    ChannelRealization { h1, h2, h3 }
}

/// `(|h1|², Σ|h2,k||h3,k|)` for the realization [`sample_realization`] would
/// return from the same generator state, without materialising it.
pub fn sample_gains<R: Rng + ?Sized>(rng: &mut R, m: usize) -> (f64, f64) {
    let h1 = complex_gaussian(rng);
    let mut cascade = 0.0;
    for _ in 0..m {
        let a = complex_gaussian(rng);
        let b = complex_gaussian(rng);
        cascade += a.norm() * b.norm();
    }
    (h1.norm_sqr(), cascade)
}

/// Phases that co-phase every reflected path: θ_k = −arg(h2,k·h3,k).
///
/// A zero product has no phase; θ = 0 is used for it.
pub fn optimal_phases(h2: &[Complex], h3: &[Complex]) -> PhaseVector {
    assert_eq!(h2.len(), h3.len(), "h2 and h3 must have equal length");
    let theta = h2
        .iter()
        .zip(h3)
        .map(|(a, b)| {
            let product = a * b;
            if product.norm_sqr() == 0.0 {
                return 0.0;
            }
            let t = -product.arg();
            if t <= -PI {
                t + 2.0 * PI
            } else {
                t
            }
        })
        .collect();
    PhaseVector(theta)
}

/// ρ·|h3ᵀ Θ h2| with Θ = diag(e^{jθ_k}).
pub fn cascaded_gain_with_phases(
    h2: &[Complex],
    h3: &[Complex],
    theta: &PhaseVector,
    rho_amp: f64,
) -> f64 {
    assert_eq!(h2.len(), h3.len(), "h2 and h3 must have equal length");
    assert_eq!(h2.len(), theta.len(), "one phase per element required");
    let sum: Complex = h2
        .iter()
        .zip(h3)
        .zip(theta.as_slice())
        .map(|((a, b), &t)| b * Complex::from_polar(1.0, t) * a)
        .sum();
    rho_amp * sum.norm()
}

/// Σ|h2,k||h3,k|, the cascade magnitude under optimal phases (ρ excluded).
pub fn cascaded_gain_aligned(h2: &[Complex], h3: &[Complex]) -> f64 {
    assert_eq!(h2.len(), h3.len(), "h2 and h3 must have equal length");
    h2.iter().zip(h3).map(|(a, b)| a.norm() * b.norm()).sum()
}
