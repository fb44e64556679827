//! Special functions: log-gamma with sign, digamma, trigamma, associated
//! Laguerre polynomials, Kummer `M` and Tricomi `U`.
//!
//! Every evaluator returns the value together with a rough absolute error
//! estimate built from the magnitude of the terms that were summed. Poles are
//! reported as errors rather than infinities.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// A function value with an absolute error estimate (same units as `value`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnEval<T> {
    pub value: T,
    pub abs_err: T,
}

impl<T: Real> FnEval<T> {
    fn new(value: T, abs_err: T) -> Self {
        Self { value, abs_err: abs_err.abs() }
    }
}

/// `ln|Γ(x)|` and the sign of `Γ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnGamma<T> {
    pub ln_abs: T,
    pub sign: T,
    pub abs_err: T,
}

impl<T: Real> LnGamma<T> {
    /// `Γ(x)` itself. Overflows to infinity beyond the scalar range.
    pub fn gamma(&self) -> T {
        self.sign * self.ln_abs.exp()
    }

    /// `1/Γ(x)`.
    pub fn recip(&self) -> T {
        self.sign * (-self.ln_abs).exp()
    }
}

const POLE_TOL: f64 = 1e-14;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k} for k = 1..=8
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Distance from `x` to the nearest integer, and that integer.
fn nearest_int<T: Real>(x: T) -> (T, T) {
    let r = x.round();
    (x - r, r)
}

fn is_pole<T: Real>(x: T) -> bool {
    let (d, r) = nearest_int(x);
    r <= T::zero() && d.abs() <= crate::scalar::tol::<T>(POLE_TOL)
}

/// `sin(πx)` with exact argument reduction.
pub fn sin_pi<T: Real>(x: T) -> T {
    let (d, r) = nearest_int(x);
    let s = (T::PI() * d).sin();
    if is_odd(r) {
        -s
    } else {
        s
    }
}

/// `cos(πx)` with exact argument reduction.
pub fn cos_pi<T: Real>(x: T) -> T {
    let (d, r) = nearest_int(x);
    let c = (T::PI() * d).cos();
    if is_odd(r) {
        -c
    } else {
        c
    }
}

fn is_odd<T: Real>(r: T) -> bool {
    let half = r / lit(2.0);
    half != half.floor()
}

fn lanczos_ln_gamma<T: Real>(x: T) -> (T, T) {
    // valid for x >= 1/2
    let z = x - T::one();
    let mut acc = lit::<T>(LANCZOS[0]);
    let mut mag = acc.abs();
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        let term = lit::<T>(c) / (z + crate::scalar::from_usize(i));
        acc = acc + term;
        mag = mag + term.abs();
    }
    let t = z + lit(LANCZOS_G + 0.5);
    let half_ln_2pi = lit::<T>(0.918_938_533_204_672_8);
    let value = half_ln_2pi + (z + lit(0.5)) * t.ln() - t + acc.ln();
    let err = T::epsilon() * (value.abs() + t.abs() + mag / acc.abs()) * lit(2.0);
    (value, err)
}

/// `ln|Γ(x)|` with the sign of `Γ(x)`.
///
/// Lanczos approximation for `x >= 1/2`, reflection below.
pub fn ln_gamma<T: Real>(x: T) -> Result<LnGamma<T>> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("ln_gamma of NaN".into()));
    }
    if is_pole(x) {
        return Err(Error::Pole { function: "gamma", x: x.to_f64().unwrap_or(f64::NAN) });
    }
    if x >= lit(0.5) {
        let (v, e) = lanczos_ln_gamma(x);
        return Ok(LnGamma { ln_abs: v, sign: T::one(), abs_err: e });
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let s = sin_pi(x);
    let (v1, e1) = lanczos_ln_gamma(T::one() - x);
    let ln_abs = T::PI().ln() - s.abs().ln() - v1;
    let sign = if s < T::zero() { -T::one() } else { T::one() };
    let abs_err = e1 + T::epsilon() * (ln_abs.abs() + lit(4.0));
    Ok(LnGamma { ln_abs, sign, abs_err })
}

/// `Γ(x)` as a plain value.
pub fn gamma<T: Real>(x: T) -> Result<FnEval<T>> {
    let lg = ln_gamma(x)?;
    let value = lg.gamma();
    if !value.is_finite() {
        return Err(Error::Overflow("gamma"));
    }
    Ok(FnEval::new(value, value * lg.abs_err))
}

/// `1/Γ(x)`, which is entire: zero at the poles of `Γ`.
pub fn rgamma<T: Real>(x: T) -> T {
    let (d, r) = nearest_int(x);
    if r <= T::zero() && d == T::zero() {
        return T::zero();
    }
    match ln_gamma(x) {
        Ok(lg) => lg.recip(),
        // inside the pole tolerance but not exactly on it: 1/Γ(x) ≈ (-1)^n n! (x + n)
        Err(_) => {
            let n = -r;
            let mut fact = T::one();
            let mut k = T::one();
            while k <= n {
                fact = fact * k;
                k = k + T::one();
            }
            let s = if is_odd(n) { -T::one() } else { T::one() };
            s * fact * d
        }
    }
}

/// Digamma `ψ(x)`.
///
/// Upward recurrence to `x >= 10`, then the asymptotic Bernoulli series.
/// Negative arguments go through `ψ(x) = ψ(1-x) - π cot(πx)`.
pub fn digamma<T: Real>(x: T) -> Result<FnEval<T>> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("digamma of NaN".into()));
    }
    if is_pole(x) {
        return Err(Error::Pole { function: "digamma", x: x.to_f64().unwrap_or(f64::NAN) });
    }
    if x < T::zero() {
        let reflected = digamma_positive(T::one() - x);
        let cot = cos_pi(x) / sin_pi(x);
        let pc = T::PI() * cot;
        let value = reflected.value - pc;
        let err = reflected.abs_err + T::epsilon() * (pc.abs() * (T::one() + (T::PI() * x).abs()) + value.abs());
        return Ok(FnEval::new(value, err));
    }
    Ok(digamma_positive(x))
}

fn digamma_positive<T: Real>(mut x: T) -> FnEval<T> {
    let mut acc = T::zero();
    let mut mag = T::zero();
    let ten = lit::<T>(10.0);
    while x < ten {
        let inv = x.recip();
        acc = acc - inv;
        mag = mag + inv;
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv2;
    for (k, &b) in BERNOULLI.iter().enumerate() {
        let two_k = lit::<T>(2.0 * (k as f64 + 1.0));
        series = series + lit::<T>(b) / two_k * pow;
        pow = pow * inv2;
    }
    let asym = x.ln() - inv / lit(2.0) - series;
    let value = acc + asym;
    let err = T::epsilon() * (mag + asym.abs() + value.abs()) * lit(2.0);
    FnEval::new(value, err)
}

/// Trigamma `ψ'(x)`.
pub fn trigamma<T: Real>(x: T) -> Result<FnEval<T>> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("trigamma of NaN".into()));
    }
    if is_pole(x) {
        return Err(Error::Pole { function: "trigamma", x: x.to_f64().unwrap_or(f64::NAN) });
    }
    if x < T::zero() {
        // ψ'(1-x) + ψ'(x) = π² / sin²(πx)
        let reflected = trigamma_positive(T::one() - x);
        let s = sin_pi(x);
        let csc2 = T::PI() * T::PI() / (s * s);
        let value = csc2 - reflected.value;
        let err = reflected.abs_err + T::epsilon() * csc2 * (T::one() + (T::PI() * x).abs()) * lit(2.0);
        return Ok(FnEval::new(value, err));
    }
    Ok(trigamma_positive(x))
}

fn trigamma_positive<T: Real>(mut x: T) -> FnEval<T> {
    let mut acc = T::zero();
    let ten = lit::<T>(10.0);
    while x < ten {
        acc = acc + (x * x).recip();
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv2 * inv;
    for &b in BERNOULLI.iter() {
        series = series + lit::<T>(b) * pow;
        pow = pow * inv2;
    }
    let asym = inv + inv2 / lit(2.0) + series;
    let value = acc + asym;
    FnEval::new(value, T::epsilon() * value.abs() * lit(4.0))
}

/// Associated Laguerre polynomial `L_n^α(z)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k + 1 + α - z) L_k - (k + α) L_{k-1}`.
pub fn assoc_laguerre<T: Real>(n: usize, alpha: T, z: T) -> Result<FnEval<T>> {
    let mut prev = T::one();
    if n == 0 {
        return Ok(FnEval::new(T::one(), T::zero()));
    }
    let mut cur = T::one() + alpha - z;
    let mut mag = prev.abs().max(cur.abs()).max(z.abs());
    for k in 1..n {
        let kf = crate::scalar::from_usize::<T>(k);
        let next = ((lit::<T>(2.0) * kf + T::one() + alpha - z) * cur - (kf + alpha) * prev) / (kf + T::one());
        prev = cur;
        cur = next;
        mag = mag.max(cur.abs());
    }
    if !cur.is_finite() {
        return Err(Error::Overflow("assoc_laguerre"));
    }
    let nf = crate::scalar::from_usize::<T>(n);
    Ok(FnEval::new(cur, T::epsilon() * mag * (nf + T::one()) * lit(2.0)))
}

const SERIES_CAP: usize = 20_000;
const SERIES_TAIL: f64 = 1e-14;

/// Kummer's confluent hypergeometric function `M(a, b, z)` by its power series.
pub fn kummer_m<T: Real>(a: T, b: T, z: T) -> Result<FnEval<T>> {
    let (d, r) = nearest_int(b);
    if r <= T::zero() && d == T::zero() {
        return Err(Error::InvalidParameter("kummer_m: b must not be a non-positive integer".into()));
    }
    let mut term = T::one();
    let mut sum = T::one();
    let mut mag = T::one();
    let tail = lit::<T>(SERIES_TAIL * 1e-3);
    for k in 0..SERIES_CAP {
        let kf = crate::scalar::from_usize::<T>(k);
        term = term * (a + kf) / (b + kf) * z / (kf + T::one());
        sum = sum + term;
        // each term carries ~k roundings from the running product
        mag = mag + term.abs() * (kf + T::one());
        if term == T::zero() {
            break;
        }
        if term.abs() <= tail * sum.abs().max(T::min_positive_value()) && kf > z.abs() {
            return finish_series(sum, mag, "kummer_m");
        }
    }
    if term == T::zero() {
        return finish_series(sum, mag, "kummer_m");
    }
    Err(Error::NoConvergence("kummer_m series"))
}

fn finish_series<T: Real>(sum: T, mag: T, name: &'static str) -> Result<FnEval<T>> {
    if !sum.is_finite() {
        return Err(Error::Overflow(name));
    }
    Ok(FnEval::new(sum, T::epsilon() * mag * lit(2.0)))
}

/// From this `z` on, the asymptotic series competes with the convergent
/// representations and whichever has the smaller error estimate wins.
const U_ASYMPTOTIC_Z: f64 = 15.0;

/// Tricomi's confluent hypergeometric function `U(a, b, z)` for `z > 0`.
///
/// * `a` a non-positive integer: the terminating polynomial.
/// * `z` large: the asymptotic expansion `z^{-a} Σ (a)_k (a-b+1)_k / k! (-z)^{-k}`
///   truncated at its smallest term, when that beats the convergent series.
/// * non-integer `b`: the two-Kummer connection formula.
/// * `b = 1`: the logarithmic limit series.
///
/// Other integer `b` are only handled through the polynomial and asymptotic
/// branches.
pub fn tricomi_u<T: Real>(a: T, b: T, z: T) -> Result<FnEval<T>> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tricomi_u requires finite z > 0, got {}",
            z
        )));
    }
    let (da, ra) = nearest_int(a);
    if ra <= T::zero() && da == T::zero() {
        return tricomi_polynomial(a, b, z);
    }
    let series = tricomi_series(a, b, z);
    if z >= lit(U_ASYMPTOTIC_Z) {
        let asym = tricomi_asymptotic(a, b, z);
        return match series {
            Ok(s) if s.abs_err < asym.abs_err => Ok(s),
            _ => Ok(asym),
        };
    }
    series
}

fn tricomi_series<T: Real>(a: T, b: T, z: T) -> Result<FnEval<T>> {
    let (db, rb) = nearest_int(b);
    if db != T::zero() {
        return tricomi_connection(a, b, z);
    }
    if rb == T::one() {
        return tricomi_b_one(a, z);
    }
    Err(Error::Unsupported(format!("tricomi_u with integer b = {} away from the asymptotic region", b)))
}

fn tricomi_polynomial<T: Real>(a: T, b: T, z: T) -> Result<FnEval<T>> {
    // U(-n, b, z) = (-1)^n n! L_n^(b-1)(z); the recurrence avoids the
    // cancellation of the explicit power sum at large z
    let n = (-a).to_usize().unwrap_or(0);
    let l = assoc_laguerre(n, b - T::one(), z)?;
    let mut scale = T::one();
    for k in 1..=n {
        scale = scale * crate::scalar::from_usize::<T>(k);
    }
    if n % 2 == 1 {
        scale = -scale;
    }
    Ok(FnEval::new(scale * l.value, scale * l.abs_err))
}

fn tricomi_asymptotic<T: Real>(a: T, b: T, z: T) -> FnEval<T> {
    // divergent: stop at the smallest term, which bounds the truncation error
    let c = a - b + T::one();
    let mut term = T::one();
    let mut sum = T::one();
    let mut last = T::one();
    for k in 0..400usize {
        let kf = crate::scalar::from_usize::<T>(k);
        let next = -term * (a + kf) * (c + kf) / ((kf + T::one()) * z);
        if next.abs() >= last || next == T::zero() {
            if next == T::zero() {
                last = T::zero();
            }
            break;
        }
        term = next;
        sum = sum + term;
        last = term.abs();
        if last <= T::epsilon() * sum.abs() {
            break;
        }
    }
    let scale = (-a * z.ln()).exp();
    let value = scale * sum;
    FnEval::new(value, (last + T::epsilon() * lit(4.0) * sum.abs()) * scale.abs())
}

fn tricomi_connection<T: Real>(a: T, b: T, z: T) -> Result<FnEval<T>> {
    // U = Γ(1-b)/Γ(a-b+1) M(a,b,z) + Γ(b-1)/Γ(a) z^{1-b} M(a-b+1, 2-b, z)
    let g1 = ln_gamma(T::one() - b)?.gamma();
    let g2 = ln_gamma(b - T::one())?.gamma();
    let r1 = rgamma(a - b + T::one());
    let r2 = rgamma(a);
    let m1 = kummer_m(a, b, z)?;
    let m2 = kummer_m(a - b + T::one(), lit::<T>(2.0) - b, z)?;
    let zp = (z.ln() * (T::one() - b)).exp();
    let t1 = g1 * r1 * m1.value;
    let t2 = g2 * r2 * zp * m2.value;
    let value = t1 + t2;
    let err = (g1 * r1).abs() * m1.abs_err
        + (g2 * r2 * zp).abs() * m2.abs_err
        + T::epsilon() * lit::<T>(8.0) * (t1.abs() + t2.abs());
    if !value.is_finite() {
        return Err(Error::Overflow("tricomi_u"));
    }
    Ok(FnEval::new(value, err))
}

fn tricomi_b_one<T: Real>(a: T, z: T) -> Result<FnEval<T>> {
    // U(a,1,z) = -1/Γ(a) Σ_k (a)_k / (k!)² z^k [ln z + ψ(a+k) - 2ψ(k+1)]
    let ra = rgamma(a);
    let lnz = z.ln();
    let gamma_e = T::euler_gamma();
    // ψ(k+1) = -γ + H_k
    let mut harmonic = T::zero();
    // coefficient (a)_k z^k / (k!)², carried together with 1/Γ(a)
    let mut coef = ra;
    let mut sum = T::zero();
    let mut mag = T::zero();
    let tail = lit::<T>(SERIES_TAIL);
    for k in 0..SERIES_CAP {
        let kf = crate::scalar::from_usize::<T>(k);
        if k > 0 {
            harmonic = harmonic + kf.recip();
            coef = coef * (a + kf - T::one()) * z / (kf * kf);
        }
        let psi_ak = match digamma(a + kf) {
            Ok(p) => p.value,
            Err(_) => return tricomi_polynomial(a.round(), T::one(), z),
        };
        let bracket = lnz + psi_ak - lit::<T>(2.0) * (harmonic - gamma_e);
        let term = -coef * bracket;
        sum = sum + term;
        mag = mag + (coef * (lnz.abs() + psi_ak.abs() + T::one())).abs() * (kf + T::one());
        if kf > z && term.abs() <= tail * sum.abs().max(T::min_positive_value()) {
            return finish_series(sum, mag, "tricomi_u");
        }
        if coef == T::zero() && k > 0 {
            return finish_series(sum, mag, "tricomi_u");
        }
    }
    Err(Error::NoConvergence("tricomi_u b=1 series"))
}
