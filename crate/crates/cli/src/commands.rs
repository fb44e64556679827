//! Subcommand bodies. Each returns a table plus whether every check passed.

use layerchain::assembly::{
    relative_scattering_length, separation_point, sweep, template_at, SweepAxis, SweepRow,
};
use layerchain::intralayer::{
    delta1d_levels, delta1d_root, delta2d_levels, delta_msr, inverse_square_levels, IntraLevel,
};
use layerchain::model::{
    effective_intra_frequency, frequency_condition, pair_residuals, validate_decoupling, IntraPotential,
    ScatteringLength, SystemSpec,
};
use layerchain::modes::{build_interlayer_form, normal_modes, string_spectrum};
use layerchain::oracle::{
    decoupled_frequencies, full_hessian_spectrum, grid_delta1d, grid_inverse_square, multiset_distance, random_suite,
    GridSpec, MAX_COORDINATES,
};

use crate::config::Config;
use crate::output::{Cell, Table};
use crate::CliError;

pub struct Outcome {
    pub table: Table,
    /// False when a physics check failed; the table is still written.
    pub passed: bool,
    pub summary: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, passed: true, summary: None }
    }
}

pub fn check(config: &Config) -> Result<Outcome, CliError> {
    let spec = config.system_spec()?;
    let report = validate_decoupling(&spec);
    let mut t = Table::new(&["i", "k", "residual_dR_ri", "residual_dR_rk", "residual_ri_rk", "frequency_residual", "ok"]);
    for (&(i, k), c) in spec.couplings() {
        let (oi, ok) = (spec.layers()[i].occupancy, spec.layers()[k].occupancy);
        let r = pair_residuals(c.w2, oi, ok);
        let fine = !report.violating_pairs.contains(&(i, k));
        t.push(vec![
            i.into(),
            k.into(),
            r[0].into(),
            r[1].into(),
            r[2].into(),
            frequency_condition(c.w2, oi, ok).into(),
            (fine as usize).into(),
        ]);
    }
    let summary = format!(
        "decoupling satisfied={} worst_residual={:e} frequency_residual={:e} violating_pairs={}",
        report.satisfied,
        report.worst_violation,
        report.frequency_residual,
        report.violating_pairs.len()
    );
    Ok(Outcome { table: t, passed: report.satisfied, summary: Some(summary) })
}

pub fn modes(config: &Config) -> Result<Outcome, CliError> {
    let spec = config.system_spec()?;
    let modes = normal_modes(&build_interlayer_form(&spec)?)?;
    let n = spec.len();
    let mut header = vec!["index".to_string(), "frequency".into(), "is_cm".into()];
    header.extend((0..n).map(|k| format!("v{k}")));
    let mut t = Table::new(&header);
    for (j, &w) in modes.frequencies.iter().enumerate() {
        let mut row: Vec<Cell> = vec![j.into(), w.into(), ((modes.cm_index == Some(j)) as usize).into()];
        row.extend((0..n).map(|k| Cell::Num(modes.eigenvectors[(k, j)])));
        t.push(row);
    }
    Ok(Outcome::ok(t))
}

pub fn spectrum(config: &Config) -> Result<Outcome, CliError> {
    let spec = config.system_spec()?;
    let modes = normal_modes(&build_interlayer_form(&spec)?)?;
    let d = spec.dimension() as f64;
    let strings = modes.string_frequencies();
    let zero_point = d / 2.0 * strings.iter().sum::<f64>();
    let top = strings.iter().copied().fold(0.0, f64::max);
    let cap = config.run.energy_cap.unwrap_or(zero_point + 2.0 * top);
    let list = string_spectrum(&modes, spec.dimension(), cap)?;
    let mut t = Table::new(&["index", "energy", "excitation", "degeneracy", "merged", "quanta"]);
    for (j, l) in list.levels.iter().enumerate() {
        let quanta = l.quanta[0].iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        t.push(vec![
            j.into(),
            l.energy.into(),
            (l.energy - list.zero_point).into(),
            l.degeneracy.into(),
            (l.merged as usize).into(),
            Cell::Text(quanta),
        ]);
    }
    Ok(Outcome::ok(t))
}

const INTRA_COLUMNS: [&str; 11] = [
    "source",
    "value",
    "kind",
    "index",
    "quantum_number",
    "l_eff",
    "energy",
    "omega_k",
    "energy_w0",
    "msr",
    "msr_minus_Dminus1",
];

fn intra_row(source: &str, value: f64, l: &IntraLevel<f64>, dimension: usize) -> Vec<Cell> {
    vec![
        source.into(),
        value.into(),
        l.kind.name().into(),
        l.index.into(),
        l.quantum_number.into(),
        l.l_eff.into(),
        l.energy.into(),
        l.omega_k.into(),
        l.energy_w0().into(),
        l.msr.into(),
        (l.msr - (dimension as f64 - 1.0)).into(),
    ]
}

fn levels_for(intra: &IntraPotential<f64>, ratio: Option<f64>, dimension: usize, count: usize) -> Result<Vec<IntraLevel<f64>>, CliError> {
    Ok(match (intra, ratio) {
        (IntraPotential::InverseSquare { g }, _) => inverse_square_levels(*g, dimension, 0, count)?,
        (IntraPotential::Delta { .. }, Some(r)) if dimension == 1 => delta1d_levels(r, count)?,
        (IntraPotential::Delta { .. }, Some(r)) if dimension == 2 => delta2d_levels(-r.ln(), count)?,
        _ => Vec::new(),
    })
}

/// Intra-layer levels of every doubly occupied layer, or along `[run] axis`
/// the universal levels in units of `ℏω_k` for each strength.
pub fn intra(config: &Config) -> Result<Outcome, CliError> {
    let d = config.dimension;
    let count = config.run.levels.unwrap_or(3);
    let mut t = Table::new(&INTRA_COLUMNS);
    if let Some(axis) = config.run.axis {
        let values = config.run.values.as_deref().ok_or_else(|| CliError::Config("`axis` needs `values` or `range`".into()))?;
        for &v in values {
            let (intra, ratio) = match axis {
                SweepAxis::G => (IntraPotential::InverseSquare { g: v }, None),
                SweepAxis::A1OverB if d == 1 => (IntraPotential::Delta { length: ScatteringLength::Relative(v) }, Some(v)),
                SweepAxis::LnBOverA2 if d == 2 => {
                    let r = (-v).exp();
                    (IntraPotential::Delta { length: ScatteringLength::Relative(r) }, Some(r))
                }
                _ => return Err(CliError::Config(format!("axis {} does not apply to intra levels in dimension {d}", axis.name()))),
            };
            for l in levels_for(&intra, ratio, d, count)? {
                if matches!(intra, IntraPotential::Delta { .. }) {
                    delta_msr(&l)?;
                }
                t.push(intra_row(axis.name(), v, &l, d));
            }
        }
        return Ok(Outcome::ok(t));
    }
    let spec = config.system_spec()?;
    for (k, layer) in spec.layers().iter().enumerate() {
        if layer.occupancy.count() != 2 {
            continue;
        }
        let w = effective_intra_frequency(&spec, k)?;
        let (value, ratio) = match layer.intra {
            IntraPotential::InverseSquare { g } => (g, None),
            IntraPotential::Delta { length } => {
                let r = relative_scattering_length(length, layer.mass, w);
                (r, Some(r))
            }
            _ => continue,
        };
        for l in levels_for(&layer.intra, ratio, d, count)? {
            t.push(intra_row(&format!("layer.{k}"), value, &l.with_omega(w), d));
        }
    }
    Ok(Outcome::ok(t))
}

pub fn separation(config: &Config) -> Result<Outcome, CliError> {
    let template = config.template()?;
    let n_max = config.run.n_max.unwrap_or(60);
    if n_max < 2 {
        return Err(CliError::Config(format!("`n_max` must be at least 2, got {n_max}")));
    }
    let families: Vec<(&str, f64, _)> = match config.run.axis {
        None => vec![("none", f64::NAN, template)],
        Some(SweepAxis::N) => return Err(CliError::Config("separation runs over N already; pick g, a1_over_b or ln_b_over_a2".into())),
        Some(axis) => {
            let values = config.run.values.as_deref().ok_or_else(|| CliError::Config("`axis` needs `values` or `range`".into()))?;
            values
                .iter()
                .map(|&v| Ok((axis.name(), v, template_at(axis, v, &template)?)))
                .collect::<Result<_, CliError>>()?
        }
    };
    let jobs: Vec<(usize, usize)> = (0..families.len()).flat_map(|f| (1..=n_max).map(move |n| (f, n))).collect();
    use rayon::prelude::*;
    let points = jobs
        .par_iter()
        .map(|&(f, n)| separation_point(&layerchain::assembly::ChainTemplate { n, ..families[f].2 }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "axis",
        "value",
        "N",
        "delta_e_per_layer",
        "delta_e_per_layer_shifted",
        "double_total",
        "single_total",
    ]);
    for (&(f, _), p) in jobs.iter().zip(&points) {
        t.push(vec![
            families[f].0.into(),
            families[f].1.into(),
            p.n.into(),
            p.delta_e_per_layer.into(),
            p.delta_e_per_layer_shifted.into(),
            p.double_total.into(),
            p.single_total.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

pub fn sweep_table(config: &Config) -> Result<Outcome, CliError> {
    let template = config.template()?;
    let axis = config.run.axis.ok_or_else(|| CliError::Config("sweep needs `axis` in [run]".into()))?;
    let values = config.run.values.as_deref().ok_or_else(|| CliError::Config("sweep needs `values` or `range` in [run]".into()))?;
    let rows = sweep(axis, values, &template)?;
    let mut t = Table::new(&SweepRow::<f64>::COLUMNS);
    for r in &rows {
        let mut cells: Vec<Cell> = r.values().iter().map(|&x| Cell::Num(x)).collect();
        cells[1] = r.n.into();
        t.push(cells);
    }
    Ok(Outcome::ok(t))
}

/// Oracle suite: decoupling theorem, grid solvers, `⟨x²⟩` routes, limit laws
/// and, for harmonic or absent intra potentials, the configured system itself.
pub fn verify(config: Option<&Config>, seed: u64) -> Result<Outcome, CliError> {
    let mut t = Table::new(&["check", "status", "value", "tolerance"]);
    let mut all = true;
    let mut record = |t: &mut Table, name: &str, value: f64, tol: f64, pass: bool| {
        all &= pass;
        t.push(vec![name.into(), if pass { "PASS" } else { "FAIL" }.into(), value.into(), tol.into()]);
    };

    let cases = config.and_then(|c| c.run.cases).unwrap_or(200);
    let suite = random_suite(seed, cases)?;
    record(&mut t, "decoupling_distance", suite.max_distance, 1e-8, suite.max_distance < 1e-8);
    record(&mut t, "decoupling_residual", suite.max_residual, 1e-8, suite.max_residual < 1e-8);
    let missed = (suite.violating_cases - suite.violations_detected) as f64;
    record(&mut t, "violations_missed", missed, 0.0, missed == 0.0);

    let mut worst: f64 = 0.0;
    for a in [0.1f64, 0.5, 1.0, 2.0, 10.0] {
        let grid = grid_delta1d(a, 2, GridSpec::default())?;
        for n in 0..2 {
            worst = worst.max((grid.lowest_energies[n] - (2.0 * delta1d_root(a, n)? + 0.5)).abs());
        }
    }
    record(&mut t, "grid_delta1d", worst, 1e-4, worst < 1e-4);

    let mut worst: f64 = 0.0;
    for g in [0.5f64, 2.0] {
        for (d, l) in [(1, 0), (2, 0), (2, 1), (3, 0)] {
            let grid = grid_inverse_square(g, d, l, 2, GridSpec { step: 5e-4, length: 12.0 })?;
            let exact = inverse_square_levels(g, d, l, 2)?;
            for n in 0..2 {
                worst = worst.max((grid.lowest_energies[n] - exact[n].energy).abs());
            }
        }
    }
    record(&mut t, "grid_inverse_square", worst, 1e-4, worst < 1e-4);

    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let a = 10f64.powf(-3.0 + 6.0 * i as f64 / 19.0);
        let even = delta1d_levels(a, 1)?.into_iter().find(IntraLevel::is_bosonic).expect("even level");
        worst = worst.max(delta_msr(&even)?.difference());
        let planar = delta2d_levels(-4.0 + 12.0 * i as f64 / 19.0, 1)?[0];
        worst = worst.max(delta_msr(&planar)?.difference());
    }
    record(&mut t, "msr_routes", worst, 1e-4, worst < 1e-4);

    let free = delta1d_root(1e6f64, 0)?;
    record(&mut t, "limit_free", free, 1e-5, free < 1e-5);
    let fermi = (delta1d_root(1e-6f64, 0)? - 0.5).abs();
    record(&mut t, "limit_fermionized", fermi, 1e-4, fermi < 1e-4);

    if let Some(c) = config {
        let spec: SystemSpec<f64> = c.system_spec()?;
        let quadratic = spec.layers().iter().all(|l| matches!(l.intra, IntraPotential::None | IntraPotential::Harmonic { .. }));
        let particles: usize = spec.layers().iter().map(|l| l.occupancy.count()).sum();
        if quadratic && particles <= MAX_COORDINATES && validate_decoupling(&spec).satisfied {
            let full = full_hessian_spectrum(&spec)?;
            let dist = multiset_distance(&full.frequencies, &decoupled_frequencies(&spec)?);
            record(&mut t, "config_full_hessian", dist, 1e-8, dist < 1e-8);
        }
    }
    Ok(Outcome { table: t, passed: all, summary: None })
}
