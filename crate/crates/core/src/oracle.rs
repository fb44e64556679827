//! Brute-force checks of the reduction: the full particle-coordinate
//! Hessian, finite-difference grids for the intra-layer problems, and a
//! seeded random suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::intralayer::inverse_square_l_eff;
use crate::linalg::{jacobi_eigen, Matrix, Tridiagonal};
use crate::model::{effective_intra_frequency, IntraPotential, LayerSpec, Occupancy, PairCoupling, SystemSpec};
use crate::modes::{interlayer_form_unchecked, normal_modes};
use crate::scalar::{from_usize, lit, Real};

/// Largest number of particle coordinates the full Hessian accepts.
pub const MAX_COORDINATES: usize = 64;

#[derive(Debug, Clone)]
pub struct FullHessianResult<T> {
    /// All normal-mode frequencies, each spatial axis counted separately.
    pub frequencies: Vec<T>,
    /// Frobenius norm of the couplings between layer centres and relative
    /// coordinates, and between relative coordinates of different layers.
    pub coupling_residual: T,
}

/// Particle index of `(layer, slot)` in the per-axis coordinate list.
fn particle_offsets<T: Real>(spec: &SystemSpec<T>) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(spec.len());
    let mut next = 0;
    for l in spec.layers() {
        offsets.push(next);
        next += l.occupancy.count();
    }
    offsets
}

/// Per-axis stiffness and masses over every particle.
fn particle_stiffness<T: Real>(spec: &SystemSpec<T>) -> Result<(Matrix<T>, Vec<T>)> {
    let offsets = particle_offsets(spec);
    let p = spec.layers().iter().map(|l| l.occupancy.count()).sum();
    let mut k = Matrix::zeros(p);
    let mut masses = vec![T::zero(); p];
    let bond = |k: &mut Matrix<T>, a: usize, b: usize, kappa: T| {
        k[(a, a)] = k[(a, a)] + kappa;
        k[(b, b)] = k[(b, b)] + kappa;
        k[(a, b)] = k[(a, b)] - kappa;
        k[(b, a)] = k[(b, a)] - kappa;
    };
    for (idx, l) in spec.layers().iter().enumerate() {
        for slot in 0..l.occupancy.count() {
            let a = offsets[idx] + slot;
            masses[a] = l.mass;
            k[(a, a)] = k[(a, a)] + l.mass * l.omega0 * l.omega0;
        }
        match l.intra {
            IntraPotential::None => {}
            IntraPotential::Harmonic { omega } => {
                let mu = l.mass / lit(2.0);
                bond(&mut k, offsets[idx], offsets[idx] + 1, mu * omega * omega);
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "full Hessian oracle needs harmonic or absent intra-layer potentials (layer {idx})"
                )))
            }
        }
    }
    for &(i, j) in spec.couplings().keys() {
        for (p, q, kappa) in spec.pair_bonds(i, j) {
            bond(&mut k, offsets[i] + p, offsets[j] + q, kappa);
        }
    }
    Ok((k, masses))
}

pub fn full_hessian_spectrum<T: Real>(spec: &SystemSpec<T>) -> Result<FullHessianResult<T>> {
    let p: usize = spec.layers().iter().map(|l| l.occupancy.count()).sum();
    let size = p * spec.dimension();
    if size > MAX_COORDINATES {
        return Err(Error::SizeCapExceeded { size, cap: MAX_COORDINATES });
    }
    let (k, masses) = particle_stiffness(spec)?;
    let mut a = Matrix::zeros(p);
    for i in 0..p {
        for j in 0..p {
            a[(i, j)] = k[(i, j)] / (masses[i] * masses[j]).sqrt();
        }
    }
    let eig = jacobi_eigen(&a)?;
    let mut frequencies = Vec::with_capacity(size);
    for &v in &eig.values {
        if v < -lit::<T>(1e-10) {
            return Err(Error::UnstableForm { eigenvalue: v.to_f64().unwrap_or(f64::NAN) });
        }
        for _ in 0..spec.dimension() {
            frequencies.push(v.max(T::zero()).sqrt());
        }
    }

    // r_p = R_k + σ_p r̃_k with σ = ±1/2; coordinates ordered (R_0..R_{N-1}, r̃ of doubly occupied layers)
    let offsets = particle_offsets(spec);
    let doubles: Vec<usize> = (0..spec.len()).filter(|&i| spec.layers()[i].occupancy == Occupancy::Double).collect();
    let n = spec.len();
    let mut t = vec![vec![T::zero(); n + doubles.len()]; p];
    for (idx, l) in spec.layers().iter().enumerate() {
        for slot in 0..l.occupancy.count() {
            t[offsets[idx] + slot][idx] = T::one();
        }
    }
    for (col, &idx) in doubles.iter().enumerate() {
        t[offsets[idx]][n + col] = lit(0.5);
        t[offsets[idx] + 1][n + col] = lit(-0.5);
    }
    let dim = n + doubles.len();
    let mut residual = T::zero();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let cross = a < n && b >= n || a >= n && b >= n;
            if !cross {
                continue;
            }
            let mut v = T::zero();
            for x in 0..p {
                for y in 0..p {
                    v = v + t[x][a] * k[(x, y)] * t[y][b];
                }
            }
            residual = residual + lit::<T>(2.0) * v * v;
        }
    }
    Ok(FullHessianResult { frequencies, coupling_residual: residual.sqrt() })
}

/// What the reduction predicts for the full Hessian: the centre-of-mass
/// modes and one relative frequency `√(ω_k² + Ω_k²)` per doubly occupied
/// layer, each repeated for every spatial axis. No decoupling check.
pub fn decoupled_frequencies<T: Real>(spec: &SystemSpec<T>) -> Result<Vec<T>> {
    let modes = normal_modes(&interlayer_form_unchecked(spec))?;
    let mut out = Vec::new();
    for &w in &modes.frequencies {
        out.extend(std::iter::repeat_n(w, spec.dimension()));
    }
    for (k, l) in spec.layers().iter().enumerate() {
        if l.occupancy != Occupancy::Double {
            continue;
        }
        let wk = effective_intra_frequency(spec, k)?;
        let extra = match l.intra {
            IntraPotential::None => T::zero(),
            IntraPotential::Harmonic { omega } => omega * omega,
            _ => return Err(Error::Unsupported("decoupled_frequencies: non-quadratic intra potential".into())),
        };
        let w = (wk * wk + extra).sqrt();
        out.extend(std::iter::repeat_n(w, spec.dimension()));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Largest difference between two sorted multisets; infinite if their sizes differ.
pub fn multiset_distance<T: Real>(a: &[T], b: &[T]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    b.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    a.iter().zip(&b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// Uniform grid on `(0, length]` with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub step: T,
    pub length: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self { step: lit(2e-3), length: lit(12.0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution<T> {
    pub grid_step: T,
    pub domain_length: T,
    /// Richardson-extrapolated energies in units of `ℏω`.
    pub lowest_energies: Vec<T>,
    /// Raw energies on the coarse and the fine grid.
    pub coarse: Vec<T>,
    pub fine: Vec<T>,
    /// `|E(h/2) − E(h)| / 3` per level.
    pub error_estimates: Vec<T>,
    /// Robin length `a1/b`; infinite for a Neumann origin.
    pub boundary: T,
}

/// Largest Richardson error estimate a grid solution may carry.
pub const GRID_ERROR_LIMIT: f64 = 5e-4;

#[derive(Debug, Clone, Copy)]
enum Origin<T> {
    /// `ψ′(0) = ψ(0)/a`, infinite `a` meaning Neumann.
    Robin(T),
    /// `ψ(0) = 0` with a `c/(2x²)` potential.
    Dirichlet { c: T },
}

/// Lowest eigenvalues of `−½ d²/dx² + ½ x²` (plus the origin-dependent term)
/// by second-order finite differences with Dirichlet at `length`.
fn fd_levels<T: Real>(origin: Origin<T>, step: T, length: T, levels: usize) -> Result<Vec<T>> {
    let m = (length / step).round().to_usize().ok_or(Error::InvalidParameter("grid too large".into()))?;
    if m < 4 {
        return Err(Error::InvalidParameter("grid needs at least four points".into()));
    }
    let h2 = step * step;
    let half = lit::<T>(0.5);
    let (diag, off) = match origin {
        Origin::Robin(a) => {
            // ghost point ψ₋₁ = ψ₁ − 2hψ₀/a, then ψ₀ rescaled by √2 to symmetrize
            let mut diag = Vec::with_capacity(m);
            let robin = if a.is_infinite() { T::zero() } else { step / a };
            diag.push((T::one() + robin) / h2);
            for j in 1..m {
                let x = from_usize::<T>(j) * step;
                diag.push(T::one() / h2 + half * x * x);
            }
            let mut off = vec![-half / h2; m - 1];
            off[0] = -T::one() / (lit::<T>(2.0).sqrt() * h2);
            (diag, off)
        }
        Origin::Dirichlet { c } => {
            let diag = (1..m)
                .map(|j| {
                    let x = from_usize::<T>(j) * step;
                    T::one() / h2 + half * x * x + half * c / (x * x)
                })
                .collect::<Vec<T>>();
            let off = vec![-half / h2; m - 2];
            (diag, off)
        }
    };
    Ok(Tridiagonal::new(diag, off).lowest_eigenvalues(levels))
}

fn richardson<T: Real>(origin: Origin<T>, grid: GridSpec<T>, levels: usize, boundary: T) -> Result<GridSolution<T>> {
    if !(grid.step > T::zero()) || grid.length < lit(10.0) {
        return Err(Error::InvalidParameter("grid needs a positive step and a domain of at least 10 b".into()));
    }
    let coarse = fd_levels(origin, grid.step, grid.length, levels)?;
    let fine = fd_levels(origin, grid.step / lit(2.0), grid.length, levels)?;
    let three = lit::<T>(3.0);
    let lowest_energies: Vec<T> = coarse.iter().zip(&fine).map(|(&c, &f)| (lit::<T>(4.0) * f - c) / three).collect();
    let error_estimates: Vec<T> = coarse.iter().zip(&fine).map(|(&c, &f)| (f - c).abs() / three).collect();
    if let Some(&worst) = error_estimates.iter().find(|&&e| e > lit(GRID_ERROR_LIMIT)) {
        return Err(Error::ResolutionTooCoarse {
            estimate: worst.to_f64().unwrap_or(f64::NAN),
            limit: GRID_ERROR_LIMIT,
        });
    }
    Ok(GridSolution { grid_step: grid.step, domain_length: grid.length, lowest_energies, coarse, fine, error_estimates, boundary })
}

/// Lowest even-sector energies of the trapped 1D contact problem from the
/// Robin condition `ψ′(0⁺) = ψ(0)/a1`. `a1_over_b = ∞` gives the free even tower.
pub fn grid_delta1d<T: Real>(a1_over_b: T, levels: usize, grid: GridSpec<T>) -> Result<GridSolution<T>> {
    if !(a1_over_b > T::zero()) {
        return Err(Error::InvalidParameter(format!("a1/b must be positive, got {a1_over_b}")));
    }
    richardson(Origin::Robin(a1_over_b), grid, levels, a1_over_b)
}

/// Lowest radial energies of the oscillator with inverse-square repulsion,
/// Dirichlet at the origin.
pub fn grid_inverse_square<T: Real>(g: T, dimension: usize, angular: usize, levels: usize, grid: GridSpec<T>) -> Result<GridSolution<T>> {
    let l = inverse_square_l_eff(g, dimension, angular)?;
    richardson(Origin::Dirichlet { c: l * (l + T::one()) }, grid, levels, T::zero())
}

/// Outcome of the random decoupling suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub cases: usize,
    /// Largest full-Hessian vs reduction distance over decoupling specs.
    pub max_distance: f64,
    /// Largest coupling residual over decoupling specs.
    pub max_residual: f64,
    pub violating_cases: usize,
    /// Violating specs whose residual was positive and whose spectra differed.
    pub violations_detected: usize,
    /// Smallest distance seen on a violating spec.
    pub min_violating_distance: f64,
}

impl SuiteReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_distance < tol && self.max_residual < tol && self.violations_detected == self.violating_cases
    }
}

/// Random spec on the decoupling surface: up to four layers of mixed
/// occupancy with random masses and traps, one random frequency per
/// coupled pair, harmonic or absent intra potentials.
pub fn random_decoupled_spec(rng: &mut impl Rng) -> SystemSpec<f64> {
    let n = rng.gen_range(1..=4);
    let dimension = rng.gen_range(1..=3);
    let layers = (0..n)
        .map(|_| {
            let mass = rng.gen_range(0.5..3.0);
            let omega0 = rng.gen_range(0.5..2.0);
            if rng.gen_bool(0.6) {
                let intra = if rng.gen_bool(0.5) {
                    IntraPotential::Harmonic { omega: rng.gen_range(0.0..3.0) }
                } else {
                    IntraPotential::None
                };
                LayerSpec::double(mass, omega0, intra)
            } else {
                LayerSpec::single(mass, omega0)
            }
        })
        .collect();
    let mut couplings = std::collections::BTreeMap::new();
    for i in 0..n {
        for k in (i + 1)..n {
            if rng.gen_bool(0.75) {
                couplings.insert((i, k), PairCoupling::uniform(rng.gen_range(0.0..10.0)));
            }
        }
    }
    SystemSpec::new(dimension, layers, couplings).expect("random spec is well formed")
}

/// Random spec off the decoupling surface: two or more layers, with the
/// first two doubly occupied and bonded by four different frequencies.
/// Every other draw balances the frequency sum, which alone is not enough.
pub fn random_violating_spec(rng: &mut impl Rng) -> SystemSpec<f64> {
    let base = loop {
        let s = random_decoupled_spec(rng);
        if s.len() >= 2 {
            break s;
        }
    };
    let mut layers = base.layers().to_vec();
    for l in layers.iter_mut().take(2) {
        l.occupancy = Occupancy::Double;
    }
    let mut w2 = [0.0; 4];
    for w in w2.iter_mut() {
        *w = rng.gen_range(0.5..10.0);
    }
    if rng.gen_bool(0.5) {
        // ik + i′k′ = ik′ + i′k with ik ≠ ik′
        w2[1] = w2[2] + w2[3] - w2[0];
        if w2[1] < 0.0 {
            w2[0] += -w2[1] + 0.5;
            w2[1] = 0.5;
        }
    }
    let mut couplings = base.couplings().clone();
    couplings.insert((0, 1), PairCoupling { w2 });
    SystemSpec::new(base.dimension(), layers, couplings).expect("violating spec is well formed")
}

/// Runs `cases` decoupling specs and `cases / 4` violating ones from `seed`.
pub fn random_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_distance: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    for _ in 0..cases {
        let spec = random_decoupled_spec(&mut rng);
        let full = full_hessian_spectrum(&spec)?;
        let reduced = decoupled_frequencies(&spec)?;
        max_distance = max_distance.max(multiset_distance(&full.frequencies, &reduced));
        max_residual = max_residual.max(full.coupling_residual);
    }
    let violating_cases = cases / 4;
    let mut detected = 0;
    let mut min_violating_distance = f64::INFINITY;
    for _ in 0..violating_cases {
        let spec = random_violating_spec(&mut rng);
        let full = full_hessian_spectrum(&spec)?;
        let reduced = decoupled_frequencies(&spec)?;
        let distance = multiset_distance(&full.frequencies, &reduced);
        min_violating_distance = min_violating_distance.min(distance);
        if full.coupling_residual > 1e-8 && distance > 1e-8 {
            detected += 1;
        }
    }
    Ok(SuiteReport {
        cases,
        max_distance,
        max_residual,
        violating_cases,
        violations_detected: detected,
        min_violating_distance,
    })
}
