//! The two-body problems inside a doubly occupied layer: oscillator plus
//! inverse-square repulsion, and oscillator plus a contact interaction in
//! one and two dimensions.
//!
//! Lengths are in units of the oscillator length `b_ω` and energies in
//! `ℏω_k` unless a level has been rescaled with [`IntraLevel::with_omega`].

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::roots::bisect;
use crate::scalar::{from_usize, lit, Real};
use crate::specfun::{assoc_laguerre, cos_pi, digamma, ln_gamma, sin_pi, trigamma, tricomi_u};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelKind {
    InverseSquare,
    Delta1dEven,
    Delta1dOdd,
    Delta2dS,
}

impl LevelKind {
    pub fn name(self) -> &'static str {
        match self {
            LevelKind::InverseSquare => "inverse_square",
            LevelKind::Delta1dEven => "delta1d_even",
            LevelKind::Delta1dOdd => "delta1d_odd",
            LevelKind::Delta2dS => "delta2d_s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntraLevel<T> {
    pub kind: LevelKind,
    /// Radial index `n` of the level within its kind.
    pub index: usize,
    /// `n_eff` for contact levels, `n` for the others.
    pub quantum_number: T,
    /// Inverse-square levels only; zero otherwise.
    pub l_eff: T,
    /// Energy in units of `ℏω_k`.
    pub energy: T,
    /// `⟨x²⟩` in units of `b_ω²`.
    pub msr: T,
    /// `ω_k` in units of ω₀.
    pub omega_k: T,
}

impl<T: Real> IntraLevel<T> {
    pub fn with_omega(self, omega_k: T) -> Self {
        Self { omega_k, ..self }
    }

    /// Energy in units of `ℏω₀`.
    pub fn energy_w0(&self) -> T {
        self.energy * self.omega_k
    }

    pub fn is_bosonic(&self) -> bool {
        self.kind != LevelKind::Delta1dOdd
    }
}

/// `√(g + c_D) − 1/2` with the centrifugal constant of the dimension.
pub fn inverse_square_l_eff<T: Real>(g: T, dimension: usize, angular: usize) -> Result<T> {
    if !(g >= T::zero()) || !g.is_finite() {
        return Err(Error::InvalidParameter(format!("inverse-square strength must be non-negative, got {g}")));
    }
    let l = from_usize::<T>(angular);
    let half = lit::<T>(0.5);
    let c = match dimension {
        1 if angular == 0 => lit(0.25),
        1 => return Err(Error::InvalidParameter("D = 1 has no angular quantum number".into())),
        2 => l * l / lit(4.0),
        3 => (l + half) * (l + half),
        _ => return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {dimension}"))),
    };
    Ok((g + c).sqrt() - half)
}

pub fn inverse_square_levels<T: Real>(g: T, dimension: usize, angular: usize, count: usize) -> Result<Vec<IntraLevel<T>>> {
    let l_eff = inverse_square_l_eff(g, dimension, angular)?;
    Ok((0..count)
        .map(|n| {
            let e = lit::<T>(2.0) * from_usize(n) + l_eff + lit(1.5);
            IntraLevel {
                kind: LevelKind::InverseSquare,
                index: n,
                quantum_number: from_usize(n),
                l_eff,
                energy: e,
                msr: e,
                omega_k: T::one(),
            }
        })
        .collect())
}

/// Position of a root between two poles `width` apart: `t` from the lower
/// pole and `s = width − t` from the upper one. Whichever of the two is
/// smaller carries full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleOffset<T> {
    pub t: T,
    pub s: T,
}

/// Root of `f(t, s)`, strictly decreasing in `t` from +∞ at `t = 0` to −∞ at
/// `s = 0`. The half containing the root is bisected in its own offset
/// variable. Brackets start at offsets of `1e-9` and move toward the pole
/// until the signs differ; a root closer to a pole than the scalar can
/// resolve is returned at the smallest offset tried.
fn root_between_poles<T: Real>(width: T, f: impl Fn(T, T) -> Result<T>) -> Result<PoleOffset<T>> {
    let half = width / lit(2.0);
    let min_offset = T::min_positive_value() / T::epsilon();
    let start = lit::<T>(1e-9);
    if f(half, width - half)? > T::zero() {
        // root in the upper half: g(s) = f(width − s, s) increases with s
        let g = |s: T| f(width - s, s);
        let mut lo = start;
        while g(lo)? >= T::zero() {
            if lo <= min_offset {
                return Ok(PoleOffset { t: width - lo, s: lo });
            }
            lo = (lo * lit(1e-3)).max(min_offset);
        }
        let s = bisect(g, lo, half, T::zero())?;
        Ok(PoleOffset { t: width - s, s })
    } else {
        let g = |t: T| f(t, width - t);
        let mut lo = start;
        while g(lo)? <= T::zero() {
            if lo <= min_offset {
                return Ok(PoleOffset { t: lo, s: width - lo });
            }
            lo = (lo * lit(1e-3)).max(min_offset);
        }
        let t = bisect(g, lo, half, T::zero())?;
        Ok(PoleOffset { t, s: width - t })
    }
}

/// `L = ln cot(πt) + ln Γ(n+t+½) − ln Γ(n+t+1) − ln(2 a1/b)` for `ν = n + t`:
/// the logarithm of `−Γ(−ν)/(2Γ(½−ν))` divided by `a1/b`, with the two gamma
/// poles taken out by reflection (`cot πt = sin πs / sin πt`, `s = ½ − t`).
pub fn delta1d_residual<T: Real>(n: usize, at: PoleOffset<T>, a1_over_b: T) -> Result<T> {
    let half = lit::<T>(0.5);
    let x = from_usize::<T>(n) + at.t;
    let cot = sin_pi(at.s).ln() - sin_pi(at.t).ln();
    Ok(cot + ln_gamma(x + half)?.ln_abs - ln_gamma(x + T::one())?.ln_abs - (lit::<T>(2.0) * a1_over_b).ln())
}

/// Offset of the even-sector root `ν_n` inside `(n, n + 1/2)`.
pub fn delta1d_offset<T: Real>(a1_over_b: T, n: usize) -> Result<PoleOffset<T>> {
    check_positive(a1_over_b, "a1/b")?;
    let half = lit::<T>(0.5);
    if a1_over_b.is_infinite() {
        return Ok(PoleOffset { t: T::zero(), s: half });
    }
    root_between_poles(half, |t, s| delta1d_residual(n, PoleOffset { t, s }, a1_over_b))
}

/// Even-sector `ν_n`, the unique root in `(n, n + 1/2)`.
pub fn delta1d_root<T: Real>(a1_over_b: T, n: usize) -> Result<T> {
    Ok(from_usize::<T>(n) + delta1d_offset(a1_over_b, n)?.t)
}

/// `γ_E + ψ(−ν)/2 − ln(b/a2)` for `ν = n + t`, with `ψ(−ν) = ψ(1+ν) + π cot(πt)`.
pub fn delta2d_residual<T: Real>(n: usize, at: PoleOffset<T>, ln_b_over_a2: T) -> Result<T> {
    let nu = from_usize::<T>(n) + at.t;
    // cos πt = −cos πs and sin πt = sin πs, so use whichever offset is exact
    let cot = if at.t <= at.s { cos_pi(at.t) / sin_pi(at.t) } else { -cos_pi(at.s) / sin_pi(at.s) };
    let psi = digamma(nu + T::one())?.value + T::PI() * cot;
    Ok(T::euler_gamma() + psi / lit(2.0) - ln_b_over_a2)
}

/// Offset of the root `ν_n` inside `(n, n + 1)` for the two-dimensional contact interaction.
pub fn delta2d_offset<T: Real>(ln_b_over_a2: T, n: usize) -> Result<PoleOffset<T>> {
    if ln_b_over_a2.is_nan() {
        return Err(Error::InvalidParameter("ln(b/a2) is NaN".into()));
    }
    if ln_b_over_a2 == T::infinity() {
        return Ok(PoleOffset { t: T::zero(), s: T::one() });
    }
    if ln_b_over_a2 == T::neg_infinity() {
        return Ok(PoleOffset { t: T::one(), s: T::zero() });
    }
    root_between_poles(T::one(), |t, s| delta2d_residual(n, PoleOffset { t, s }, ln_b_over_a2))
}

/// `ν_n` in `(n, n + 1)` for the two-dimensional contact interaction.
pub fn delta2d_root<T: Real>(ln_b_over_a2: T, n: usize) -> Result<T> {
    Ok(from_usize::<T>(n) + delta2d_offset(ln_b_over_a2, n)?.t)
}

fn check_positive<T: Real>(x: T, what: &str) -> Result<()> {
    if x > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {x}")))
    }
}

fn split_nu<T: Real>(nu: T) -> (T, T) {
    let n = nu.floor();
    (n, nu - n)
}

/// Hellmann–Feynman `⟨x²⟩/b²` of an even 1D contact level: `2ν + 1/2 + 1/(ψ(½−ν) − ψ(−ν))`.
pub fn delta1d_msr_hf<T: Real>(nu: T) -> Result<T> {
    let half = lit::<T>(0.5);
    let (_, t) = split_nu(nu);
    if t == T::zero() || t == half {
        return Ok(lit::<T>(2.0) * nu + half);
    }
    // ψ(½−ν) − ψ(−ν) = ψ(½+ν) − ψ(1+ν) − 2π / sin(2πt)
    let d = digamma(half + nu)?.value - digamma(T::one() + nu)?.value
        - lit::<T>(2.0) * T::PI() / sin_pi(lit::<T>(2.0) * t);
    Ok(lit::<T>(2.0) * nu + half + d.recip())
}

/// Hellmann–Feynman `⟨r²⟩/b²` of a 2D contact level: `2ν + 1 + 2/ψ′(−ν)`.
pub fn delta2d_msr_hf<T: Real>(nu: T) -> Result<T> {
    let (_, t) = split_nu(nu);
    if t == T::zero() {
        return Ok(lit::<T>(2.0) * nu + T::one());
    }
    let s = sin_pi(t);
    let tri = T::PI() * T::PI() / (s * s) - trigamma(T::one() + nu)?.value;
    Ok(lit::<T>(2.0) * nu + T::one() + lit::<T>(2.0) / tri)
}

fn odd_level<T: Real>(n: usize) -> IntraLevel<T> {
    let e = lit::<T>(2.0) * from_usize(n) + lit(1.5);
    IntraLevel {
        kind: LevelKind::Delta1dOdd,
        index: n,
        quantum_number: from_usize(n),
        l_eff: T::zero(),
        energy: e,
        msr: e,
        omega_k: T::one(),
    }
}

/// The lowest `count` even levels and the lowest `count` odd levels, sorted by energy.
pub fn delta1d_levels<T: Real>(a1_over_b: T, count: usize) -> Result<Vec<IntraLevel<T>>> {
    let mut out = Vec::with_capacity(2 * count);
    for n in 0..count {
        let nu = delta1d_root(a1_over_b, n)?;
        out.push(IntraLevel {
            kind: LevelKind::Delta1dEven,
            index: n,
            quantum_number: nu,
            l_eff: T::zero(),
            energy: lit::<T>(2.0) * nu + lit(0.5),
            msr: delta1d_msr_hf(nu)?,
            omega_k: T::one(),
        });
        out.push(odd_level(n));
    }
    out.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

pub fn delta2d_levels<T: Real>(ln_b_over_a2: T, count: usize) -> Result<Vec<IntraLevel<T>>> {
    (0..count)
        .map(|n| {
            let nu = delta2d_root(ln_b_over_a2, n)?;
            Ok(IntraLevel {
                kind: LevelKind::Delta2dS,
                index: n,
                quantum_number: nu,
                l_eff: T::zero(),
                energy: lit::<T>(2.0) * nu + T::one(),
                msr: delta2d_msr_hf(nu)?,
                omega_k: T::one(),
            })
        })
        .collect()
}

/// Unnormalized wavefunction (radial part for D > 1) at `x/b`.
pub fn wavefunction_eval<T: Real>(level: &IntraLevel<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("wavefunction needs x > 0, got {x}")));
    }
    let z = x * x;
    let gauss = (-z / lit(2.0)).exp();
    let half = lit::<T>(0.5);
    Ok(match level.kind {
        LevelKind::InverseSquare => {
            x.powf(level.l_eff + T::one()) * gauss * assoc_laguerre(level.index, level.l_eff + half, z)?.value
        }
        LevelKind::Delta1dOdd => x * gauss * assoc_laguerre(level.index, half, z)?.value,
        LevelKind::Delta1dEven => gauss * tricomi_u(-level.quantum_number, half, z)?.value,
        LevelKind::Delta2dS => gauss * tricomi_u(-level.quantum_number, T::one(), z)?.value,
    })
}

const QUAD_CUTOFF: f64 = 12.0;
const QUAD_TOL: f64 = 1e-12;
/// Largest tolerated disagreement between the two `⟨x²⟩` routes.
pub const MSR_DEFECT_TOL: f64 = 1e-3;

/// `⟨x²⟩/b²` by quadrature of the wavefunction on `(0, 12]`, with measure
/// `dx` in 1D and `r dr` in 2D.
pub fn msr_quadrature<T: Real>(level: &IntraLevel<T>) -> Result<T> {
    let measure = |x: T| if level.kind == LevelKind::Delta2dS { x } else { T::one() };
    let cutoff = lit::<T>(QUAD_CUTOFF);
    let tol = lit::<T>(QUAD_TOL);
    let mut failure = None;
    let mut psi2 = |x: T| match wavefunction_eval(level, x) {
        Ok(v) => v * v * measure(x),
        Err(e) => {
            failure.get_or_insert(e);
            T::zero()
        }
    };
    let norm = integrate(&mut psi2, T::zero(), cutoff, tol)?;
    let second = integrate(|x| x * x * psi2(x), T::zero(), cutoff, tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(second.value / norm.value)
}

/// Both `⟨x²⟩` routes for a level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsrComparison<T> {
    pub quadrature: T,
    pub hellmann_feynman: T,
}

impl<T: Real> MsrComparison<T> {
    pub fn difference(&self) -> T {
        (self.quadrature - self.hellmann_feynman).abs()
    }
}

/// `⟨x²⟩/b²` computed by quadrature and by Hellmann–Feynman. Fails when the
/// two routes differ by more than [`MSR_DEFECT_TOL`].
pub fn delta_msr<T: Real>(level: &IntraLevel<T>) -> Result<MsrComparison<T>> {
    let hf = match level.kind {
        LevelKind::Delta1dEven => delta1d_msr_hf(level.quantum_number)?,
        LevelKind::Delta2dS => delta2d_msr_hf(level.quantum_number)?,
        LevelKind::Delta1dOdd => level.energy,
        LevelKind::InverseSquare => {
            return Err(Error::InvalidParameter("delta_msr needs a contact-interaction level".into()))
        }
    };
    let cmp = MsrComparison { quadrature: msr_quadrature(level)?, hellmann_feynman: hf };
    if !(cmp.difference() <= lit(MSR_DEFECT_TOL)) {
        return Err(Error::NoConvergence("delta_msr: quadrature and Hellmann-Feynman disagree"));
    }
    Ok(cmp)
}

/// Lowest symmetric excitation `2(ν_1 − ν_0)` of the 1D contact problem, in `ℏω_k`.
pub fn delta1d_excitation<T: Real>(a1_over_b: T) -> Result<T> {
    Ok(lit::<T>(2.0) * (delta1d_root(a1_over_b, 1)? - delta1d_root(a1_over_b, 0)?))
}

/// Minimum of [`delta1d_excitation`] over `a1/b`, as `(a1/b, excitation)`.
/// Coarse scan of `log10(a1/b)` on `[-4, 4]`, then golden-section refinement.
pub fn delta1d_min_excitation<T: Real>() -> Result<(T, T)> {
    let ten = lit::<T>(10.0);
    let f = |s: T| delta1d_excitation(ten.powf(s));
    let steps = 160;
    let grid: Vec<T> = (0..=steps).map(|j| lit::<T>(-4.0) + lit::<T>(8.0) * from_usize(j) / from_usize(steps)).collect();
    let values = grid.iter().map(|&s| f(s)).collect::<Result<Vec<T>>>()?;
    let best = (0..values.len())
        .min_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty grid");
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(steps)]);
    let phi = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > lit::<T>(1e-7) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    let s = (a + b) / lit(2.0);
    Ok((ten.powf(s), f(s)?))
}
