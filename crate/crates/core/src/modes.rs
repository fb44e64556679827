//! Inter-layer normal modes and the string spectrum built from them.

use crate::error::{Error, Result};
use crate::linalg::{canonicalize_eigenvectors, jacobi_eigen, Matrix};
use crate::model::{validate_decoupling, SystemSpec};
use crate::scalar::{from_usize, lit, Real};

const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
const CM_OVERLAP: f64 = 1e-8;
const DEGENERACY_TOL: f64 = 1e-9;
/// Largest number of distinct multi-indices a spectrum enumeration may visit.
pub const MAX_STATES: usize = 2_000_000;

/// Potential energy `½ Rᵀ K R` of the layer centres of mass.
#[derive(Debug, Clone)]
pub struct QuadraticForm<T> {
    pub masses: Vec<T>,
    pub stiffness: Matrix<T>,
}

impl<T: Real> QuadraticForm<T> {
    /// `M^{-1/2} K M^{-1/2}`
    pub fn mass_weighted(&self) -> Matrix<T> {
        let n = self.masses.len();
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                a[(i, k)] = self.stiffness[(i, k)] / (self.masses[i] * self.masses[k]).sqrt();
            }
        }
        a
    }

    /// Unit vector along the centre-of-mass direction in mass-weighted coordinates.
    pub fn cm_direction(&self) -> Vec<T> {
        let total: T = self.masses.iter().copied().sum();
        self.masses.iter().map(|&m| (m / total).sqrt()).collect()
    }
}

pub fn build_interlayer_form<T: Real>(spec: &SystemSpec<T>) -> Result<QuadraticForm<T>> {
    let report = validate_decoupling(spec);
    if !report.satisfied {
        return Err(Error::DecouplingViolated { worst: report.worst_violation.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(interlayer_form_unchecked(spec))
}

/// The centre-of-mass quadratic form without the decoupling check. Only
/// meaningful on the decoupling surface; off it, this is what the reduction
/// would wrongly predict.
pub fn interlayer_form_unchecked<T: Real>(spec: &SystemSpec<T>) -> QuadraticForm<T> {
    let n = spec.len();
    let masses: Vec<T> = spec.layers().iter().map(|l| l.total_mass()).collect();
    let mut k = Matrix::zeros(n);
    for (i, l) in spec.layers().iter().enumerate() {
        k[(i, i)] = masses[i] * l.omega0 * l.omega0;
    }
    for &(i, j) in spec.couplings().keys() {
        let c2 = spec.pair_coefficient(i, j) * lit(2.0);
        k[(i, i)] = k[(i, i)] + c2;
        k[(j, j)] = k[(j, j)] + c2;
        k[(i, j)] = k[(i, j)] - c2;
        k[(j, i)] = k[(j, i)] - c2;
    }
    QuadraticForm { masses, stiffness: k }
}

#[derive(Debug, Clone)]
pub struct NormalModeSet<T> {
    /// Ascending mode frequencies.
    pub frequencies: Vec<T>,
    /// Orthonormal eigenvectors of the mass-weighted stiffness, one per column.
    pub eigenvectors: Matrix<T>,
    pub cm_index: Option<usize>,
}

impl<T: Real> NormalModeSet<T> {
    /// Frequencies of every mode except the centre of mass.
    pub fn string_frequencies(&self) -> Vec<T> {
        self.frequencies
            .iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != self.cm_index)
            .map(|(_, &w)| w)
            .collect()
    }

    pub fn cm_frequency(&self) -> Option<T> {
        self.cm_index.map(|j| self.frequencies[j])
    }
}

pub fn normal_modes<T: Real>(form: &QuadraticForm<T>) -> Result<NormalModeSet<T>> {
    if form.masses.iter().any(|&m| !(m > T::zero())) {
        return Err(Error::InvalidParameter("normal_modes: masses must be positive".into()));
    }
    let a = form.mass_weighted();
    let mut eig = jacobi_eigen(&a)?;
    let u = form.cm_direction();
    let scale = eig.values.iter().fold(T::one(), |m, v| m.max(v.abs()));
    canonicalize_eigenvectors(&mut eig, lit::<T>(DEGENERACY_TOL) * scale, std::slice::from_ref(&u));

    let mut frequencies = Vec::with_capacity(eig.values.len());
    for &v in &eig.values {
        if v < -lit::<T>(NEGATIVE_EIGENVALUE_TOL) {
            return Err(Error::UnstableForm { eigenvalue: v.to_f64().unwrap_or(f64::NAN) });
        }
        frequencies.push(v.max(T::zero()).sqrt());
    }
    let cm_index = (0..frequencies.len()).find(|&j| {
        let overlap: T = eig.vectors.column(j).iter().zip(&u).map(|(&x, &y)| x * y).sum();
        overlap.abs() >= T::one() - lit(CM_OVERLAP)
    });
    Ok(NormalModeSet { frequencies, eigenvectors: eig.vectors, cm_index })
}

/// One energy level: quanta per string mode, exact degeneracy, and whether
/// distinct multi-indices were merged into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Level<T> {
    pub energy: T,
    pub degeneracy: u64,
    pub quanta: Vec<Vec<usize>>,
    pub merged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelList<T> {
    pub levels: Vec<Level<T>>,
    /// Zero-point energy of the string modes.
    pub zero_point: T,
    /// Centre-of-mass ladder `(energy, degeneracy)` below the cap, kept apart from the string levels.
    pub cm_levels: Vec<(T, u64)>,
}

/// Number of ways to put `n` quanta into a `d`-dimensional isotropic oscillator.
pub fn oscillator_degeneracy(n: usize, d: usize) -> Result<u64> {
    // C(n + d - 1, d - 1)
    let mut c: u64 = 1;
    for j in 1..d {
        c = c
            .checked_mul((n + j) as u64)
            .ok_or(Error::Overflow("oscillator_degeneracy"))?
            / j as u64;
    }
    Ok(c)
}

pub fn string_spectrum<T: Real>(modes: &NormalModeSet<T>, dimension: usize, energy_cap: T) -> Result<LevelList<T>> {
    let half_d = lit::<T>(dimension as f64) / lit(2.0);
    let omegas = modes.string_frequencies();
    let zero_point = half_d * omegas.iter().copied().sum::<T>();
    if energy_cap < zero_point {
        return Err(Error::CapTooLow {
            cap: energy_cap.to_f64().unwrap_or(f64::NAN),
            zero_point: zero_point.to_f64().unwrap_or(f64::NAN),
        });
    }
    if omegas.iter().any(|&w| w <= T::zero()) && energy_cap > zero_point {
        return Err(Error::Unsupported("string_spectrum: zero-frequency string mode has no discrete spectrum".into()));
    }

    let budget = energy_cap - zero_point;
    let slack = lit::<T>(DEGENERACY_TOL);
    let mut raw: Vec<(T, Vec<usize>)> = Vec::new();
    let mut quanta = vec![0usize; omegas.len()];
    fn walk<T: Real>(
        j: usize,
        left: T,
        omegas: &[T],
        slack: T,
        quanta: &mut Vec<usize>,
        out: &mut Vec<(T, Vec<usize>)>,
        zero_point: T,
    ) -> Result<()> {
        if j == omegas.len() {
            if out.len() >= MAX_STATES {
                return Err(Error::SizeCapExceeded { size: out.len() + 1, cap: MAX_STATES });
            }
            let e = zero_point + quanta.iter().zip(omegas).map(|(&n, &w)| from_usize::<T>(n) * w).sum::<T>();
            out.push((e, quanta.clone()));
            return Ok(());
        }
        let mut n = 0;
        loop {
            let used = from_usize::<T>(n) * omegas[j];
            if used > left + slack {
                break;
            }
            quanta[j] = n;
            walk(j + 1, left - used, omegas, slack, quanta, out, zero_point)?;
            n += 1;
        }
        quanta[j] = 0;
        Ok(())
    }
    walk(0, budget, &omegas, slack, &mut quanta, &mut raw, zero_point)?;
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.1.cmp(&b.1)));

    let mut levels: Vec<Level<T>> = Vec::new();
    for (e, q) in raw {
        let deg = q
            .iter()
            .map(|&n| oscillator_degeneracy(n, dimension))
            .try_fold(1u64, |acc, d| acc.checked_mul(d?).ok_or(Error::Overflow("string_spectrum")))?;
        match levels.last_mut() {
            Some(last) if (e - last.energy).abs() <= slack => {
                last.degeneracy = last.degeneracy.checked_add(deg).ok_or(Error::Overflow("string_spectrum"))?;
                last.quanta.push(q);
                last.merged = true;
            }
            _ => levels.push(Level { energy: e, degeneracy: deg, quanta: vec![q], merged: false }),
        }
    }

    let mut cm_levels = Vec::new();
    if let Some(w) = modes.cm_frequency() {
        let mut n = 0;
        loop {
            let e = w * (from_usize::<T>(n) + half_d);
            if e > energy_cap + slack || (w <= T::zero() && n > 0) {
                break;
            }
            cm_levels.push((e, oscillator_degeneracy(n, dimension)?));
            n += 1;
        }
    }
    Ok(LevelList { levels, zero_point, cm_levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IntraPotential, LayerSpec, Occupancy};
    use std::collections::BTreeMap;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn two_doubly_occupied_layers() {
        let spec = SystemSpec::<f64>::paper_default(2, 1, IntraPotential::None).unwrap();
        let form = build_interlayer_form(&spec).unwrap();
        let a = form.mass_weighted();
        assert_eq!(a, Matrix::from_rows(&[vec![10.0, -9.0], vec![-9.0, 10.0]]));
        let modes = normal_modes(&form).unwrap();
        assert!(close(modes.frequencies[0], 1.0, 1e-13));
        assert!(close(modes.frequencies[1], 19f64.sqrt(), 1e-13));
        assert_eq!(modes.cm_index, Some(0));
    }

    #[test]
    fn two_singly_occupied_layers() {
        let spec = SystemSpec::<f64>::chain(2, 1, Occupancy::Single, 3.0, IntraPotential::None).unwrap();
        let a = build_interlayer_form(&spec).unwrap().mass_weighted();
        assert_eq!(a, Matrix::from_rows(&[vec![5.5, -4.5], vec![-4.5, 5.5]]));
    }

    #[test]
    fn uncoupled_layers_give_trap_frequencies() {
        let layers = vec![
            LayerSpec::double(1.0, 2.0, IntraPotential::None),
            LayerSpec::single(3.0, 0.5),
        ];
        let spec = SystemSpec::new(2, layers, BTreeMap::new()).unwrap();
        let modes = normal_modes(&build_interlayer_form(&spec).unwrap()).unwrap();
        assert_eq!(modes.frequencies, vec![0.5, 2.0]);
        assert_eq!(modes.cm_index, None);
    }

    #[test]
    fn uniform_all_pairs_three_layers() {
        let spec = SystemSpec::<f64>::all_pairs(3, 1, 1.0, 1.0).unwrap();
        let modes = normal_modes(&build_interlayer_form(&spec).unwrap()).unwrap();
        for (w, e) in modes.frequencies.iter().zip([1.0, 2.0, 2.0]) {
            assert!(close(*w, e, 1e-12));
        }
        assert_eq!(modes.cm_index, Some(0));
        let levels = string_spectrum(&modes, 2, 4.0).unwrap();
        assert!(close(levels.zero_point, 4.0, 1e-12));
        assert_eq!(levels.levels.len(), 1);
    }

    #[test]
    fn violating_spec_is_refused() {
        let layer = LayerSpec::double(1.0, 1.0, IntraPotential::None);
        let c = [((0, 1), crate::model::PairCoupling { w2: [1.0, 4.0, 4.0, 4.0] })].into_iter().collect();
        let spec = SystemSpec::new(1, vec![layer; 2], c).unwrap();
        assert!(matches!(build_interlayer_form(&spec), Err(Error::DecouplingViolated { .. })));
    }

    #[test]
    fn inverted_oscillator_is_unstable() {
        let form = QuadraticForm { masses: vec![1.0, 1.0], stiffness: Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]) };
        assert!(matches!(normal_modes(&form), Err(Error::UnstableForm { .. })));
    }

    #[test]
    fn free_centre_of_mass_is_clamped() {
        let spec = SystemSpec::<f64>::chain(3, 1, Occupancy::Double, 1.0, IntraPotential::None).unwrap();
        let layers = spec.layers().iter().map(|l| LayerSpec { omega0: 0.0, ..l.clone() }).collect();
        let free = SystemSpec::new(1, layers, spec.couplings().clone()).unwrap();
        let modes = normal_modes(&build_interlayer_form(&free).unwrap()).unwrap();
        assert_eq!(modes.frequencies[0], 0.0);
        assert_eq!(modes.cm_index, Some(0));
    }

    #[test]
    fn spectrum_of_single_string_mode() {
        let spec = SystemSpec::<f64>::paper_default(2, 1, IntraPotential::None).unwrap();
        let modes = normal_modes(&build_interlayer_form(&spec).unwrap()).unwrap();
        let s19 = 19f64.sqrt();
        let list = string_spectrum(&modes, 1, 3.0 * s19).unwrap();
        assert!(close(list.levels[0].energy, s19 / 2.0, 1e-12));
        assert!(close(list.levels[1].energy - list.levels[0].energy, s19, 1e-12));
        assert_eq!(list.levels.len(), 3);
        assert!(list.cm_levels.len() >= 3);
        assert!(matches!(string_spectrum(&modes, 1, 1.0), Err(Error::CapTooLow { .. })));
    }

    #[test]
    fn degeneracy_counts() {
        assert_eq!(oscillator_degeneracy(4, 1).unwrap(), 1);
        assert_eq!(oscillator_degeneracy(4, 2).unwrap(), 5);
        assert_eq!(oscillator_degeneracy(4, 3).unwrap(), 15);
        // two degenerate modes at D = 2 with one quantum between them: 2 + 2 states
        let spec = SystemSpec::<f64>::all_pairs(3, 2, 1.0, 1.0).unwrap();
        let modes = normal_modes(&build_interlayer_form(&spec).unwrap()).unwrap();
        let list = string_spectrum(&modes, 2, 6.0).unwrap();
        assert_eq!(list.levels[1].degeneracy, 4);
        assert!(list.levels[1].merged);
    }
}
