//! Layered system description, decoupling check, effective frequencies and
//! zero-point shift.

use std::collections::BTreeMap;

use num_traits::{Num, Signed};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{lit, Real};

/// Residual tolerance for the decoupling conditions, in ω₀².
pub const DECOUPLING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Occupancy {
    Single,
    Double,
}

impl Occupancy {
    pub fn count(self) -> usize {
        match self {
            Occupancy::Single => 1,
            Occupancy::Double => 2,
        }
    }
}

/// Scattering length of a contact interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScatteringLength<T> {
    /// In units of the reference trap length `√(ℏ/mω₀)`.
    Absolute(T),
    /// In units of the layer's own oscillator length `b_ω`.
    Relative(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntraPotential<T> {
    None,
    InverseSquare { g: T },
    Delta { length: ScatteringLength<T> },
    /// Extra harmonic bond of frequency `omega` inside the layer (oracle checks only).
    Harmonic { omega: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec<T> {
    pub occupancy: Occupancy,
    /// Mass of each particle in the layer.
    pub mass: T,
    /// One-body trap frequency.
    pub omega0: T,
    pub intra: IntraPotential<T>,
}

impl<T: Real> LayerSpec<T> {
    pub fn single(mass: T, omega0: T) -> Self {
        Self { occupancy: Occupancy::Single, mass, omega0, intra: IntraPotential::None }
    }

    pub fn double(mass: T, omega0: T, intra: IntraPotential<T>) -> Self {
        Self { occupancy: Occupancy::Double, mass, omega0, intra }
    }

    pub fn total_mass(&self) -> T {
        self.mass * lit(self.occupancy.count() as f64)
    }
}

/// Squared bond frequencies between layers `i < k`, in the order
/// `(ik, i′k′, ik′, i′k)`. Entries naming a primed particle of a singly
/// occupied layer are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCoupling<T> {
    pub w2: [T; 4],
}

impl<T: Real> PairCoupling<T> {
    pub fn uniform(w2: T) -> Self {
        Self { w2: [w2; 4] }
    }

    /// The bonds present for the given occupancies as `(particle in i, particle in k, ω²)`,
    /// particle 0 unprimed, 1 primed.
    pub fn bonds(&self, occ_i: Occupancy, occ_k: Occupancy) -> Vec<(usize, usize, T)> {
        const SLOTS: [(usize, usize); 4] = [(0, 0), (1, 1), (0, 1), (1, 0)];
        SLOTS
            .iter()
            .zip(self.w2)
            .filter(|((p, q), _)| *p < occ_i.count() && *q < occ_k.count())
            .map(|(&(p, q), w2)| (p, q, w2))
            .collect()
    }

    /// Single frequency that gives the same centre-of-mass bond strength.
    pub fn collapsed(&self, occ_i: Occupancy, occ_k: Occupancy) -> T {
        let bonds = self.bonds(occ_i, occ_k);
        bonds.iter().map(|b| b.2).sum::<T>() / lit(bonds.len() as f64)
    }
}

/// The three cross-term residuals of one layer pair, with particle signs ±1:
/// `[Σ s_p ω², Σ s_q ω², Σ s_p s_q ω²]` for the `ΔR·r̃_i`, `ΔR·r̃_k` and
/// `r̃_i·r̃_k` couplings. A term is zero when the layer it needs is singly occupied.
pub fn pair_residuals<N: Num + Signed + Copy>(w2: [N; 4], occ_i: Occupancy, occ_k: Occupancy) -> [N; 3] {
    let [ik, ipkp, ikp, ipk] = w2;
    let double_i = occ_i == Occupancy::Double;
    let double_k = occ_k == Occupancy::Double;
    let zero = N::zero();
    let a = match (double_i, double_k) {
        (true, true) => ik + ikp - ipkp - ipk,
        (true, false) => ik - ipk,
        _ => zero,
    };
    let b = match (double_i, double_k) {
        (true, true) => ik + ipk - ipkp - ikp,
        (false, true) => ik - ikp,
        _ => zero,
    };
    let c = if double_i && double_k { ik + ipkp - ikp - ipk } else { zero };
    [a, b, c]
}

/// The residual of the single frequency-sum condition: `ω_ik² + ω_i′k′² − ω_ik′² − ω_i′k²`
/// for two doubly occupied layers, the vanishing difference for a mixed pair.
pub fn frequency_condition<N: Num + Signed + Copy>(w2: [N; 4], occ_i: Occupancy, occ_k: Occupancy) -> N {
    let [a, b, c] = pair_residuals(w2, occ_i, occ_k);
    match (occ_i, occ_k) {
        (Occupancy::Double, Occupancy::Double) => c,
        (Occupancy::Double, Occupancy::Single) => a,
        (Occupancy::Single, Occupancy::Double) => b,
        (Occupancy::Single, Occupancy::Single) => N::zero(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingReport<T> {
    pub satisfied: bool,
    /// Largest absolute cross-term residual over all pairs, in ω₀².
    pub worst_violation: T,
    /// Largest residual of the frequency-sum condition alone.
    pub frequency_residual: T,
    pub violating_pairs: Vec<(usize, usize)>,
}

/// Complete system configuration. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<T> {
    dimension: usize,
    layers: Vec<LayerSpec<T>>,
    couplings: BTreeMap<(usize, usize), PairCoupling<T>>,
}

fn finite_nonneg<T: Real>(x: T) -> bool {
    x.is_finite() && x >= T::zero()
}

impl<T: Real> SystemSpec<T> {
    pub fn new(
        dimension: usize,
        layers: Vec<LayerSpec<T>>,
        couplings: BTreeMap<(usize, usize), PairCoupling<T>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedSpec(msg));
        if !(1..=3).contains(&dimension) {
            return bad(format!("dimension must be 1, 2 or 3, got {dimension}"));
        }
        if layers.is_empty() {
            return bad("at least one layer is required".into());
        }
        for (k, layer) in layers.iter().enumerate() {
            if !(layer.mass.is_finite() && layer.mass > T::zero()) {
                return bad(format!("layer {k}: mass must be positive"));
            }
            if !finite_nonneg(layer.omega0) {
                return bad(format!("layer {k}: omega0 must be non-negative"));
            }
            match layer.intra {
                IntraPotential::None => {}
                _ if layer.occupancy == Occupancy::Single => {
                    return bad(format!("layer {k}: a singly occupied layer has no intra-layer potential"));
                }
                IntraPotential::InverseSquare { g } if !finite_nonneg(g) => {
                    return bad(format!("layer {k}: inverse-square strength must be non-negative"));
                }
                IntraPotential::Delta { length } => {
                    if dimension == 3 {
                        return bad(format!("layer {k}: contact interaction is not supported for D = 3"));
                    }
                    let (ScatteringLength::Absolute(a) | ScatteringLength::Relative(a)) = length;
                    if !(a.is_finite() && a > T::zero()) {
                        return bad(format!("layer {k}: scattering length must be positive"));
                    }
                }
                IntraPotential::Harmonic { omega } if !finite_nonneg(omega) => {
                    return bad(format!("layer {k}: harmonic intra frequency must be non-negative"));
                }
                _ => {}
            }
        }
        for (&(i, k), c) in &couplings {
            if i >= k || k >= layers.len() {
                return bad(format!("coupling ({i}, {k}) must name two distinct layers with i < k < {}", layers.len()));
            }
            if let Some(w) = c.w2.iter().find(|w| !finite_nonneg(**w)) {
                return bad(format!("coupling ({i}, {k}): squared frequency {w} is negative or not finite"));
            }
        }
        Ok(Self { dimension, layers, couplings })
    }

    /// Nearest-neighbour chain of `n` identical layers, unit masses and traps.
    pub fn chain(n: usize, dimension: usize, occupancy: Occupancy, omega12: T, intra: IntraPotential<T>) -> Result<Self> {
        let layer = LayerSpec {
            occupancy,
            mass: T::one(),
            omega0: T::one(),
            intra: if occupancy == Occupancy::Single { IntraPotential::None } else { intra },
        };
        let couplings = (1..n).map(|k| ((k - 1, k), PairCoupling::uniform(omega12 * omega12))).collect();
        Self::new(dimension, vec![layer; n], couplings)
    }

    /// Every pair of `n` doubly occupied unit-mass layers coupled with the same `omega_r`.
    pub fn all_pairs(n: usize, dimension: usize, omega0: T, omega_r: T) -> Result<Self> {
        let layer = LayerSpec::double(T::one(), omega0, IntraPotential::None);
        let mut couplings = BTreeMap::new();
        for i in 0..n {
            for k in (i + 1)..n {
                couplings.insert((i, k), PairCoupling::uniform(omega_r * omega_r));
            }
        }
        Self::new(dimension, vec![layer; n], couplings)
    }

    /// Illustration defaults: ω₁₂ = 3ω₀, equal unit masses, nearest-neighbour coupling.
    pub fn paper_default(n: usize, dimension: usize, intra: IntraPotential<T>) -> Result<Self> {
        Self::chain(n, dimension, Occupancy::Double, lit(3.0), intra)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn layers(&self) -> &[LayerSpec<T>] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), PairCoupling<T>> {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, k: usize) -> Option<&PairCoupling<T>> {
        self.couplings.get(&(i.min(k), i.max(k)))
    }

    fn layer(&self, k: usize) -> Result<&LayerSpec<T>> {
        self.layers.get(k).ok_or(Error::IndexOutOfRange { index: k, layers: self.layers.len() })
    }

    /// Bonds between layers `i < k` as `(particle in i, particle in k, κ = μω²)`.
    pub fn pair_bonds(&self, i: usize, k: usize) -> Vec<(usize, usize, T)> {
        let (li, lk) = (&self.layers[i], &self.layers[k]);
        let mu = li.mass * lk.mass / (li.mass + lk.mass);
        self.coupling(i, k)
            .map(|c| c.bonds(li.occupancy, lk.occupancy).into_iter().map(|(p, q, w2)| (p, q, mu * w2)).collect())
            .unwrap_or_default()
    }

    /// Centre-of-mass bond coefficient `c_ik = ½ Σ μ_pq ω_pq²`.
    pub fn pair_coefficient(&self, i: usize, k: usize) -> T {
        let (i, k) = (i.min(k), i.max(k));
        self.pair_bonds(i, k).iter().map(|b| b.2).sum::<T>() / lit(2.0)
    }

    /// Symmetric matrix of collapsed squared frequencies, zero diagonal.
    pub fn interlayer_omega2(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.len());
        for (&(i, k), c) in &self.couplings {
            let w = c.collapsed(self.layers[i].occupancy, self.layers[k].occupancy);
            m[(i, k)] = w;
            m[(k, i)] = w;
        }
        m
    }

    /// Same system with every frequency multiplied by `lambda`. Relative
    /// scattering lengths are unchanged, absolute ones follow `b_ω ∝ λ^{-1/2}`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let intra = match l.intra {
                    IntraPotential::Harmonic { omega } => IntraPotential::Harmonic { omega: omega * lambda },
                    IntraPotential::Delta { length: ScatteringLength::Absolute(a) } => {
                        IntraPotential::Delta { length: ScatteringLength::Absolute(a / lambda.sqrt()) }
                    }
                    other => other,
                };
                LayerSpec { omega0: l.omega0 * lambda, intra, ..l.clone() }
            })
            .collect();
        let couplings = self
            .couplings
            .iter()
            .map(|(&key, c)| (key, PairCoupling { w2: c.w2.map(|w| w * lambda * lambda) }))
            .collect();
        Self::new(self.dimension, layers, couplings)
    }

    /// Relabels layers: new layer `j` is old layer `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("permuted: not a permutation of the layers".into()));
        }
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let layers = perm.iter().map(|&old| self.layers[old].clone()).collect();
        let couplings = self
            .couplings
            .iter()
            .map(|(&(i, k), c)| {
                let (ni, nk) = (inverse[i], inverse[k]);
                if ni < nk {
                    ((ni, nk), *c)
                } else {
                    // swapping the roles of the two layers exchanges ik′ and i′k
                    let [ik, ipkp, ikp, ipk] = c.w2;
                    ((nk, ni), PairCoupling { w2: [ik, ipkp, ipk, ikp] })
                }
            })
            .collect();
        Self::new(self.dimension, layers, couplings)
    }
}

pub fn validate_decoupling<T: Real>(spec: &SystemSpec<T>) -> DecouplingReport<T> {
    let tol = lit::<T>(DECOUPLING_TOL);
    let mut worst = T::zero();
    let mut freq = T::zero();
    let mut violating = Vec::new();
    for (&(i, k), c) in spec.couplings() {
        let (oi, ok) = (spec.layers[i].occupancy, spec.layers[k].occupancy);
        let pair_worst = pair_residuals(c.w2, oi, ok).iter().fold(T::zero(), |m, r| m.max(r.abs()));
        freq = freq.max(frequency_condition(c.w2, oi, ok).abs());
        worst = worst.max(pair_worst);
        if pair_worst > tol {
            violating.push((i, k));
        }
    }
    DecouplingReport { satisfied: worst <= tol, worst_violation: worst, frequency_residual: freq, violating_pairs: violating }
}

/// Frequency of the relative coordinate inside doubly occupied layer `k`.
pub fn effective_intra_frequency<T: Real>(spec: &SystemSpec<T>, k: usize) -> Result<T> {
    let layer = spec.layer(k)?;
    if layer.occupancy != Occupancy::Double {
        return Err(Error::NotDoublyOccupied(k));
    }
    // each particle sits at ±r̃/2, so a bond κ adds κ/4 to the stiffness of r̃,
    // whose reduced mass is m_k/2
    let mut stiffness = T::zero();
    for i in (0..spec.len()).filter(|&i| i != k) {
        let (lo, hi) = (i.min(k), i.max(k));
        stiffness = stiffness + spec.pair_bonds(lo, hi).iter().map(|b| b.2).sum::<T>() / lit(4.0);
    }
    let mu = layer.mass / lit(2.0);
    Ok((layer.omega0 * layer.omega0 + stiffness / mu).sqrt())
}

/// Binding constants `e_ik ≥ 0` per layer pair; pairs not listed use zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShiftModel<T> {
    e: BTreeMap<(usize, usize), T>,
}

impl<T: Real> ShiftModel<T> {
    pub fn new(e: BTreeMap<(usize, usize), T>) -> Result<Self> {
        for (&(i, k), &v) in &e {
            if i >= k {
                return Err(Error::MalformedSpec(format!("shift pair ({i}, {k}) must have i < k")));
            }
            if !finite_nonneg(v) {
                return Err(Error::MalformedSpec(format!("shift pair ({i}, {k}): e must be non-negative")));
            }
        }
        Ok(Self { e })
    }

    /// Same `e12` on every nearest-neighbour pair of an `n`-layer chain.
    pub fn nearest_neighbor(n: usize, e12: T) -> Result<Self> {
        Self::new((1..n).map(|k| ((k - 1, k), e12)).collect())
    }

    pub fn get(&self, i: usize, k: usize) -> T {
        self.e.get(&(i.min(k), i.max(k))).copied().unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), T> {
        &self.e
    }
}

/// Zero-point shift: every bond of frequency `ω_pq` contributes `−D(e_ik + 1)ω_pq / 2`.
pub fn zero_point_shift<T: Real>(spec: &SystemSpec<T>, shifts: &ShiftModel<T>) -> T {
    let d = lit::<T>(spec.dimension() as f64);
    let mut v = T::zero();
    for (&(i, k), c) in spec.couplings() {
        let (oi, ok) = (spec.layers[i].occupancy, spec.layers[k].occupancy);
        let bond_sum: T = c.bonds(oi, ok).iter().map(|b| b.2.sqrt()).sum();
        v = v - d * (shifts.get(i, k) + T::one()) * bond_sum / lit(2.0);
    }
    v
}

pub fn cm_frequency<T: Real>(spec: &SystemSpec<T>) -> T {
    let (num, den) = spec.layers().iter().fold((T::zero(), T::zero()), |(n, d), l| {
        let m = l.total_mass();
        (n + m * l.omega0 * l.omega0, d + m)
    });
    (num / den).sqrt()
}
