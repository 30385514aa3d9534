//! Checks against values computed outside this crate: exact big-integer
//! factorials for log-gamma, and 30-digit mpmath quadrature of the gamma-fit
//! outage integral.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use ris_wpc::analytic::{outage_closed_form_with, outage_reference};
use ris_wpc::exec::Workers;
use ris_wpc::params::{derive, SystemParams};
use ris_wpc::special::log_gamma;

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Natural log of a big integer via its leading 64 bits.
fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn log_gamma_of_161_matches_big_factorial() {
    let exact = ln_big(&factorial(160));
    let got = log_gamma(161.0).unwrap();
    assert!((got - exact).abs() <= 1e-12 * exact, "{got} vs {exact}");
}

#[test]
fn log_gamma_relative_accuracy_on_integers_and_half_integers() {
    // Γ(n) = (n−1)!  for n = 3..=500
    for n in 3..=500u32 {
        let exact = ln_big(&factorial(n - 1));
        let got = log_gamma(n as f64).unwrap();
        assert!(
            (got - exact).abs() <= 1e-12 * exact.abs(),
            "n = {n}: {got} vs {exact}"
        );
    }
    // Γ(n + ½) = (2n)! / (4ⁿ n!) · √π  for n = 0..=499
    let half_ln_pi = 0.5 * std::f64::consts::PI.ln();
    for n in 0..=499u32 {
        let ratio = factorial(2 * n) / factorial(n);
        let exact = ln_big(&ratio) - n as f64 * 4f64.ln() + half_ln_pi;
        let got = log_gamma(n as f64 + 0.5).unwrap();
        assert!(
            (got - exact).abs() <= 1e-12 * exact.abs(),
            "x = {}: {got} vs {exact}",
            n as f64 + 0.5
        );
    }
}

/// (m, rho_db, outage) at the default operating point, from mpmath.quad with
/// 30 significant digits over the same gamma-fit integral.
const MPMATH_OUTAGE: [(i64, f64, f64); 10] = [
    (1, 0.0, 0.704402764228432),
    (1, 10.0, 0.297283997231878),
    (8, 0.0, 0.0212091988229614),
    (8, 10.0, 0.00215112949808581),
    (16, 0.0, 0.00472042759746243),
    (16, 10.0, 0.000473237625834906),
    (64, 0.0, 0.000270067415103254),
    (64, 10.0, 2.70101598983295e-5),
    (100, 0.0, 0.000109459980100358),
    (100, 10.0, 1.09465519815575e-5),
];

fn point(m: i64, rho_db: f64) -> SystemParams {
    SystemParams {
        m,
        rho_db,
        ..Default::default()
    }
}

#[test]
fn reference_integral_matches_mpmath() {
    for (m, rho, expected) in MPMATH_OUTAGE {
        let p = point(m, rho);
        let got = outage_reference(&p, &derive(&p).unwrap(), 1e-10).unwrap();
        assert!(
            (got - expected).abs() <= 1e-10,
            "m={m} rho={rho}: {got:e} vs {expected:e}"
        );
    }
}

#[test]
fn closed_form_with_many_nodes_matches_mpmath() {
    for (m, rho, expected) in MPMATH_OUTAGE {
        let p = point(m, rho);
        let r =
            outage_closed_form_with(&p, &derive(&p).unwrap(), 2000, Workers::Sequential).unwrap();
        assert!(
            (r.p_raw - expected).abs() <= 1e-9,
            "m={m} rho={rho}: {:e} vs {expected:e}",
            r.p_raw
        );
    }
}
