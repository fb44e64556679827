//! Special functions against frozen 30-digit references (see
//! `support/reference_values.py`) and against independent series.

use layerchain::specfun::{assoc_laguerre, digamma, gamma, ln_gamma, trigamma, tricomi_u};
use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gamma_matches_reference() {
    let cases = [
        (0.1f64, 9.513507698668731836292487f64),
        (2.5, 1.329340388179137020473626),
        (7.3, 1271.423633663909273057994),
        (-0.5, -3.544907701811032054596335),
        (-1.25, 3.921333447888568464413115),
        (-3.7, 0.2516439959024226435101081),
        (-9.9, 0.000003542684553080834262670255),
        (33.3, 7.487577596522706607992066e+35),
        (-20.5, -2.834656574391334871400423e-19),
    ];
    for (x, expected) in cases {
        let g = gamma(x).unwrap().value;
        assert!(rel(g, expected) < 1e-12, "Γ({x}) = {g}, expected {expected}");
    }
}

#[test]
fn digamma_matches_reference() {
    let cases = [
        (0.25f64, -4.22745353337626540808953f64),
        (3.0, 0.9227843350984671393934879),
        (-0.5, 0.03648997397857652055902367),
        (-2.3, 3.317323157561820123267),
        (-7.9, -7.540007224419441757302261),
        (12.6, 2.493489702596807970261665),
    ];
    for (x, expected) in cases {
        let d = digamma(x).unwrap();
        assert!((d.value - expected).abs() < 1e-12, "ψ({x}) = {}", d.value);
        assert!(d.abs_err < 1e-12);
    }
    // near a pole only relative accuracy is meaningful
    assert!(rel(digamma(0.001).unwrap().value, -1000.575571931810300471473) < 1e-13);
}

#[test]
fn trigamma_matches_reference() {
    let cases = [
        (0.3f64, 12.2453645461077304654736f64),
        (-0.6, 10.05313436830737521531481),
        (-3.4, 10.65653005395754053345112),
        (25.0, 0.04081066325722557918736172),
    ];
    for (x, expected) in cases {
        let t = trigamma(x).unwrap().value;
        assert!(rel(t, expected) < 1e-12, "ψ'({x}) = {t}");
    }
}

#[test]
fn tricomi_matches_reference() {
    // (a, b, z, U, relative tolerance)
    let cases: &[(f64, f64, f64, f64)] = &[
        (-0.3, 0.5, 0.05, 0.558798307319764697530888),
        (-0.3, 0.5, 0.8, 0.9876676563476804694559796),
        (-0.3, 0.5, 3.0, 1.415307327726062744727564),
        (-0.3, 0.5, 10.0, 2.006783272031331979175307),
        (-0.3, 0.5, 18.0, 2.387786082946549288990627),
        (-0.3, 0.5, 30.0, 2.779664836333785356800594),
        (-0.3, 1.0, 0.05, 0.08055341733358927366449972),
        (-0.3, 1.0, 0.8, 0.8476964522559685046594785),
        (-0.3, 1.0, 3.0, 1.351362081125865517904885),
        (-0.3, 1.0, 10.0, 1.977708678634781947330177),
        (-0.3, 1.0, 18.0, 2.368280214703165053318716),
        (-0.3, 1.0, 30.0, 2.765934448270458059755147),
        (-1.7, 0.5, 0.05, 0.00127042447779538014844647),
        (-1.7, 0.5, 0.8, -0.9181122806213793500950478),
        (-1.7, 0.5, 3.0, 2.171719561217478627987768),
        (-1.7, 0.5, 10.0, 39.96553066416444168495405),
        (-1.7, 0.5, 18.0, 120.7642905878686404202406),
        (-1.7, 0.5, 30.0, 302.4097445522239120103949),
        (-1.7, 1.0, 0.05, 1.125903249942052330848732),
        (-1.7, 1.0, 0.8, -1.051402656423618051180177),
        (-1.7, 1.0, 3.0, 0.7420479751029298692253338),
        (-1.7, 1.0, 10.0, 35.9882542474014398597683),
        (-1.7, 1.0, 18.0, 114.5730612481850517524958),
        (-1.7, 1.0, 30.0, 293.4215120524668554197673),
        (0.4, 0.5, 0.05, 1.358262814672896639633809),
        (0.4, 0.5, 0.8, 0.8616715826627247075728743),
        (0.4, 0.5, 3.0, 0.5877854069708440605900864),
        (0.4, 0.5, 10.0, 0.3853436555388968111118662),
        (0.4, 0.5, 30.0, 0.2535863705786143522501176),
        (0.4, 1.0, 0.05, 2.020695984455645525116319),
        (0.4, 1.0, 0.8, 0.9726885434975543388733884),
        (0.4, 1.0, 3.0, 0.6173213638835581843308228),
        (0.4, 1.0, 10.0, 0.3922672630870526252816327),
        (0.4, 1.0, 30.0, 0.255211754986926689378837),
    ];
    for &(a, b, z, expected) in cases {
        let u = tricomi_u(a, b, z).unwrap();
        // connection formulas lose digits as e^z grows; the error estimate must cover it
        let tol = if z <= 3.0 { 1e-12 } else { 1e-7 };
        assert!(rel(u.value, expected) < tol, "U({a},{b},{z}) = {}, expected {expected}", u.value);
        assert!(
            (u.value - expected).abs() <= 10.0 * u.abs_err + 1e-13 * expected.abs(),
            "U({a},{b},{z}): error estimate {} too small for actual {}",
            u.abs_err,
            (u.value - expected).abs()
        );
    }
}

/// L_n^α(z) = Σ_k (-1)^k C(n+α, n-k) z^k / k!, summed exactly in rationals.
fn laguerre_explicit(n: usize, alpha: f64, z: f64) -> f64 {
    let alpha = BigRational::from_float(alpha).unwrap();
    let z = BigRational::from_float(z).unwrap();
    let top = BigRational::from_integer(BigInt::from(n)) + alpha;
    let binom = |k: usize| -> BigRational {
        let mut b = BigRational::one();
        for j in 0..k {
            let jr = BigRational::from_integer(BigInt::from(j));
            b = b * (top.clone() - jr.clone()) / (jr + BigRational::one());
        }
        b
    };
    let mut sum = BigRational::zero();
    let mut zk_over_kfact = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            zk_over_kfact = zk_over_kfact * z.clone() / BigRational::from_integer(BigInt::from(k));
        }
        let term = binom(n - k) * zk_over_kfact.clone();
        if k % 2 == 0 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    sum.to_f64().unwrap()
}

#[test]
fn laguerre_order_five() {
    let explicit = laguerre_explicit(5, 1.0, 3.7);
    let rec = assoc_laguerre(5, 1.0, 3.7).unwrap().value;
    assert!((explicit - rec).abs() < 1e-12, "{explicit} vs {rec}");
}

proptest! {
    #[test]
    fn gamma_reflection(x in -9.95f64..9.95) {
        prop_assume!((x - x.round()).abs() > 1e-3);
        let g1 = ln_gamma(x).unwrap();
        let g2 = ln_gamma(1.0 - x).unwrap();
        let product = g1.sign * g2.sign * (g1.ln_abs + g2.ln_abs).exp();
        let expected = std::f64::consts::PI / (std::f64::consts::PI * x).sin();
        prop_assert!((product - expected).abs() < 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn digamma_recurrence(x in -20.0f64..20.0) {
        prop_assume!((x - x.round()).abs() > 1e-2 && (x + 1.0 - (x + 1.0).round()).abs() > 1e-2);
        let lhs = digamma(x + 1.0).unwrap().value;
        let rhs = digamma(x).unwrap().value + 1.0 / x;
        prop_assert!((lhs - rhs).abs() < 1e-12, "x={} {} vs {}", x, lhs, rhs);
    }

    #[test]
    fn laguerre_recurrence_matches_series(n in 0usize..=20, alpha in -0.9f64..4.0, z in -30.0f64..30.0) {
        let explicit = laguerre_explicit(n, alpha, z);
        let rec = assoc_laguerre(n, alpha, z).unwrap().value;
        prop_assert!((explicit - rec).abs() < 1e-12 * explicit.abs().max(1.0),
            "n={} α={} z={}: {} vs {}", n, alpha, z, explicit, rec);
    }

    #[test]
    fn tricomi_laguerre_identity(n in 0usize..=10, alpha in prop_oneof![Just(0.0f64), Just(-0.5), 0.1f64..3.0], z in 0.01f64..20.0) {
        let u = tricomi_u(-(n as f64), alpha + 1.0, z).unwrap().value;
        let mut fact = 1.0;
        for k in 1..=n { fact *= k as f64; }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let l = sign * fact * assoc_laguerre(n, alpha, z).unwrap().value;
        prop_assert!((u - l).abs() < 1e-10 * l.abs().max(1.0), "n={} α={} z={}: {} vs {}", n, alpha, z, u, l);
    }
}
