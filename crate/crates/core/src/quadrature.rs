//! Globally adaptive 7/15-point Gauss–Kronrod integration on a finite range.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Abscissae and weights from QUADPACK (qk15). Index 7 is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error(
        "no convergence after {intervals} subintervals: estimate {estimate:e}, error bound {abs_error:e}"
    )]
    NoConvergence {
        estimate: f64,
        abs_error: f64,
        intervals: usize,
    },
    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),
    #[error("breakpoints must be finite and increasing")]
    BadRange,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadratureError> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };

    let fc = eval(centre)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = eval(centre - dx)? + eval(centre + dx)?;
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    })
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, starting from the given
/// partition and bisecting the worst segment until the summed error bound is
/// at most `tol` or `max_intervals` segments exist.
///
/// The integrand is never evaluated at a breakpoint.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: f64,
    max_intervals: usize,
) -> Result<Integral, QuadratureError> {
    if breaks.len() < 2
        || breaks.iter().any(|b| !b.is_finite())
        || breaks.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(QuadratureError::BadRange);
    }

    let mut heap = BinaryHeap::with_capacity(max_intervals.max(breaks.len()));
    for w in breaks.windows(2) {
        heap.push(kronrod(&f, w[0], w[1])?);
    }

    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= tol {
            return Ok(Integral {
                value,
                abs_error: error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= max_intervals {
            return Err(QuadratureError::NoConvergence {
                estimate: value,
                abs_error: error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("partition is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment can no longer be split in floating point.
            return Err(QuadratureError::NoConvergence {
                estimate: value,
                abs_error: error,
                intervals: heap.len() + 1,
            });
        }
        heap.push(kronrod(&f, worst.a, mid)?);
        heap.push(kronrod(&f, mid, worst.b)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, &[0.0, 2.0], 1e-14, 10).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_and_peaked() {
        let r = integrate(f64::sin, &[0.0, PI], 1e-12, 100).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);

        // Narrow Gaussian, width 1e-3; the partition has to contain the peak.
        let s = 1e-3;
        let g = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
        let r = integrate(g, &[0.0, 0.29, 0.31, 1.0], 1e-10, 1000).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn reports_failures() {
        assert_eq!(
            integrate(|x| x, &[1.0, 0.0], 1e-8, 10),
            Err(QuadratureError::BadRange)
        );
        assert!(matches!(
            integrate(|x| 1.0 / x.sqrt(), &[0.0, 1.0], 1e-15, 4),
            Err(QuadratureError::NoConvergence { .. })
        ));
        assert!(matches!(
            integrate(|_| f64::NAN, &[0.0, 1.0], 1e-8, 10),
            Err(QuadratureError::NonFinite(_))
        ));
    }
}
