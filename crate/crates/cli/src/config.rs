//! Line-oriented `key = value` run configuration.
//!
//! ```text
//! preset = paper-default
//! dimension = 1
//! n = 30
//! intra = inverse-square
//! g = 1.0
//!
//! [shift]
//! e12 = 2
//!
//! [run]
//! axis = g
//! values = 0, 1, 2, 3
//! ```
//!
//! Without a preset the system is spelled out with `[layer.k]` sections
//! and a `[coupling]` section whose keys are layer pairs `i-k` and whose
//! values are either one `ω²` or the four `ω²` of the pair bonds in the
//! order `ik, i'k', ik', i'k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use layerchain::assembly::{ChainTemplate, SweepAxis};
use layerchain::model::{IntraPotential, LayerSpec, Occupancy, PairCoupling, ScatteringLength, ShiftModel, SystemSpec};

use crate::CliError;

pub const PRESET_PAPER_DEFAULT: &str = "paper-default";
const UNITS: &str = "w0";

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    /// Nearest-neighbour chain of identical doubly occupied unit layers.
    Preset { n: usize, omega12: f64, intra: IntraPotential<f64> },
    Explicit { layers: Vec<LayerSpec<f64>>, couplings: BTreeMap<(usize, usize), PairCoupling<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shift {
    /// Uniform binding constant on nearest-neighbour pairs.
    NearestNeighbor(f64),
    Pairs(BTreeMap<(usize, usize), f64>),
}

impl Default for Shift {
    fn default() -> Self {
        Shift::Pairs(BTreeMap::new())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunParams {
    pub n_max: Option<usize>,
    pub axis: Option<SweepAxis>,
    pub values: Option<Vec<f64>>,
    pub energy_cap: Option<f64>,
    pub levels: Option<usize>,
    pub cases: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub dimension: usize,
    pub system: System,
    pub shift: Shift,
    pub run: RunParams,
}

impl Config {
    pub fn system_spec(&self) -> Result<SystemSpec<f64>, CliError> {
        let spec = match &self.system {
            System::Preset { n, omega12, intra } => {
                SystemSpec::chain(*n, self.dimension, Occupancy::Double, *omega12, *intra)
            }
            System::Explicit { layers, couplings } => SystemSpec::new(self.dimension, layers.clone(), couplings.clone()),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn len(&self) -> usize {
        match &self.system {
            System::Preset { n, .. } => *n,
            System::Explicit { layers, .. } => layers.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shift_model(&self) -> Result<ShiftModel<f64>, CliError> {
        let m = match &self.shift {
            Shift::NearestNeighbor(e) => ShiftModel::nearest_neighbor(self.len(), *e),
            Shift::Pairs(p) => ShiftModel::new(p.clone()),
        };
        m.map_err(|e| CliError::Config(e.to_string()))
    }

    /// Chain template for separation curves and sweeps; presets only.
    pub fn template(&self) -> Result<ChainTemplate<f64>, CliError> {
        let System::Preset { n, omega12, intra } = self.system else {
            return Err(CliError::Config(format!("this subcommand needs `preset = {PRESET_PAPER_DEFAULT}`")));
        };
        let e12 = match &self.shift {
            Shift::NearestNeighbor(e) => *e,
            Shift::Pairs(p) if p.is_empty() => 0.0,
            Shift::Pairs(_) => return Err(CliError::Config("presets take `e12` in [shift], not pair entries".into())),
        };
        Ok(ChainTemplate { n, dimension: self.dimension, intra, omega12, e12 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Layer(usize),
    Coupling,
    Shift,
    Run,
}

/// Intra-potential keys shared by the top level (presets) and layer sections.
#[derive(Debug, Default)]
struct IntraKeys {
    kind: Option<(String, usize)>,
    g: Option<f64>,
    a: Option<f64>,
    ratio: Option<(f64, &'static str)>,
    omega_intra: Option<f64>,
}

impl IntraKeys {
    fn accept(&mut self, key: &str, value: &str, line: usize) -> Result<bool, CliError> {
        match key {
            "intra" => self.kind = Some((value.to_string(), line)),
            "g" => self.g = Some(non_negative(key, value, line)?),
            "a" => self.a = Some(positive(key, value, line)?),
            "a1_over_b" => self.ratio = Some((positive(key, value, line)?, "a1_over_b")),
            "a2_over_b" => self.ratio = Some((positive(key, value, line)?, "a2_over_b")),
            "ln_b_over_a2" => {
                let x = number(key, value, line)?;
                self.ratio = Some(((-x).exp(), "ln_b_over_a2"));
            }
            "omega_intra" => self.omega_intra = Some(non_negative(key, value, line)?),
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn build(self, dimension: usize, at: usize) -> Result<IntraPotential<f64>, CliError> {
        let (kind, line) = self.kind.unwrap_or(("none".into(), at));
        let stray = |what: &str| CliError::Parse { line, message: format!("`{what}` does not apply to intra = {kind}") };
        let intra = match kind.as_str() {
            "none" => IntraPotential::None,
            "inverse-square" => IntraPotential::InverseSquare {
                g: self.g.ok_or_else(|| CliError::Parse { line, message: "inverse-square needs `g`".into() })?,
            },
            "harmonic" => IntraPotential::Harmonic {
                omega: self
                    .omega_intra
                    .ok_or_else(|| CliError::Parse { line, message: "harmonic needs `omega_intra`".into() })?,
            },
            "delta" => {
                let length = match (self.a, self.ratio) {
                    (Some(a), None) => ScatteringLength::Absolute(a),
                    (None, Some((r, key))) => {
                        let wanted = if key == "a1_over_b" { 1 } else { 2 };
                        if wanted != dimension {
                            return Err(CliError::Parse { line, message: format!("`{key}` needs dimension {wanted}") });
                        }
                        ScatteringLength::Relative(r)
                    }
                    _ => {
                        return Err(CliError::Parse {
                            line,
                            message: "delta needs exactly one of `a`, `a1_over_b`, `a2_over_b`, `ln_b_over_a2`".into(),
                        })
                    }
                };
                IntraPotential::Delta { length }
            }
            other => return Err(CliError::Parse { line, message: format!("unknown intra kind `{other}`") }),
        };
        if !matches!(intra, IntraPotential::InverseSquare { .. }) && self.g.is_some() {
            return Err(stray("g"));
        }
        if !matches!(intra, IntraPotential::Delta { .. }) && (self.a.is_some() || self.ratio.is_some()) {
            return Err(stray("scattering length"));
        }
        if !matches!(intra, IntraPotential::Harmonic { .. }) && self.omega_intra.is_some() {
            return Err(stray("omega_intra"));
        }
        Ok(intra)
    }
}

fn number(key: &str, value: &str, line: usize) -> Result<f64, CliError> {
    let x: f64 = value
        .parse()
        .map_err(|_| CliError::Parse { line, message: format!("`{key}`: `{value}` is not a number") })?;
    if !x.is_finite() {
        return Err(CliError::Parse { line, message: format!("`{key}` must be finite") });
    }
    Ok(x)
}

fn non_negative(key: &str, value: &str, line: usize) -> Result<f64, CliError> {
    let x = number(key, value, line)?;
    if x < 0.0 {
        return Err(CliError::Parse { line, message: format!("`{key}` must be non-negative, got {value}") });
    }
    Ok(x)
}

fn positive(key: &str, value: &str, line: usize) -> Result<f64, CliError> {
    let x = number(key, value, line)?;
    if x <= 0.0 {
        return Err(CliError::Parse { line, message: format!("`{key}` must be positive, got {value}") });
    }
    Ok(x)
}

fn count(key: &str, value: &str, line: usize) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Parse { line, message: format!("`{key}`: `{value}` is not a non-negative integer") })
}

fn pair(key: &str, line: usize) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Parse { line, message: format!("unknown key `{key}` (expected a layer pair `i-k` with i < k)") };
    let (i, k) = key.split_once('-').ok_or_else(bad)?;
    let (i, k): (usize, usize) = (i.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?);
    if i >= k {
        return Err(bad());
    }
    Ok((i, k))
}

fn units(key: &str, value: &str, line: usize) -> Result<(), CliError> {
    if value != UNITS {
        return Err(CliError::Units { line, message: format!("`{key}` must be `{UNITS}`, got `{value}`") });
    }
    Ok(())
}

#[derive(Debug, Default)]
struct LayerKeys {
    occupancy: Option<Occupancy>,
    mass: Option<f64>,
    omega0: Option<f64>,
    intra: IntraKeys,
    line: usize,
}

/// Parses a configuration file.
pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let mut section = Section::Top;
    let mut preset: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut n: Option<usize> = None;
    let mut omega12: Option<f64> = None;
    let mut top_intra = IntraKeys::default();
    let mut layers: BTreeMap<usize, LayerKeys> = BTreeMap::new();
    let mut couplings = BTreeMap::new();
    let mut e12: Option<f64> = None;
    let mut shift_pairs = BTreeMap::new();
    let mut run = RunParams::default();
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut saw_coupling = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            section = match name {
                "coupling" => {
                    saw_coupling = true;
                    Section::Coupling
                }
                "shift" => Section::Shift,
                "run" => Section::Run,
                _ => match name.strip_prefix("layer.").map(str::parse::<usize>) {
                    Some(Ok(k)) => {
                        if layers.contains_key(&k) {
                            return Err(CliError::Parse { line, message: format!("duplicate section [layer.{k}]") });
                        }
                        layers.insert(k, LayerKeys { line, ..LayerKeys::default() });
                        Section::Layer(k)
                    }
                    _ => return Err(CliError::Parse { line, message: format!("unknown section [{name}]") }),
                },
            };
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| CliError::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
        let scope = match section {
            Section::Layer(k) => format!("layer.{k}"),
            s => format!("{s:?}"),
        };
        if let Some(first) = seen.insert((scope, key.to_string()), line) {
            return Err(CliError::Parse { line, message: format!("`{key}` repeats line {first}") });
        }

        match section {
            Section::Top => match key {
                "preset" => {
                    if value != PRESET_PAPER_DEFAULT {
                        return Err(CliError::Parse { line, message: format!("unknown preset `{value}`") });
                    }
                    preset = Some(value.to_string());
                }
                "dimension" => {
                    let d = count(key, value, line)?;
                    if !(1..=3).contains(&d) {
                        return Err(CliError::Parse { line, message: format!("`dimension` must be 1, 2 or 3, got {d}") });
                    }
                    dimension = Some(d);
                }
                "n" => {
                    let v = count(key, value, line)?;
                    if v == 0 {
                        return Err(CliError::Parse { line, message: "`n` must be at least 1".into() });
                    }
                    n = Some(v);
                }
                "omega12" => omega12 = Some(positive(key, value, line)?),
                "units" | "omega0_units" => units(key, value, line)?,
                _ => {
                    if !top_intra.accept(key, value, line)? {
                        return Err(CliError::Parse { line, message: format!("unknown key `{key}`") });
                    }
                }
            },
            Section::Layer(k) => {
                let layer = layers.get_mut(&k).expect("section registered");
                match key {
                    "occupancy" => {
                        layer.occupancy = Some(match value {
                            "1" => Occupancy::Single,
                            "2" => Occupancy::Double,
                            _ => return Err(CliError::Parse { line, message: format!("`occupancy` must be 1 or 2, got {value}") }),
                        })
                    }
                    "mass" => layer.mass = Some(positive(key, value, line)?),
                    "omega0" => layer.omega0 = Some(positive(key, value, line)?),
                    "omega0_units" | "units" => units(key, value, line)?,
                    _ => {
                        if !layer.intra.accept(key, value, line)? {
                            return Err(CliError::Parse { line, message: format!("unknown key `{key}` in [layer.{k}]") });
                        }
                    }
                }
            }
            Section::Coupling => {
                if key == "units" {
                    units(key, value, line)?;
                    continue;
                }
                let p = pair(key, line)?;
                let w: Vec<f64> = value.split(',').map(|v| number(key, v.trim(), line)).collect::<Result<_, _>>()?;
                if let Some(bad) = w.iter().find(|&&x| x < 0.0) {
                    return Err(CliError::Parse { line, message: format!("coupling `{key}`: ω² must be non-negative, got {bad}") });
                }
                let c = match w.as_slice() {
                    [x] => PairCoupling::uniform(*x),
                    [a, b, c, d] => PairCoupling { w2: [*a, *b, *c, *d] },
                    _ => return Err(CliError::Parse { line, message: format!("coupling `{key}` needs 1 or 4 values") }),
                };
                couplings.insert(p, c);
            }
            Section::Shift => match key {
                "e12" => e12 = Some(non_negative(key, value, line)?),
                _ => {
                    shift_pairs.insert(pair(key, line)?, non_negative(key, value, line)?);
                }
            },
            Section::Run => match key {
                "n_max" => run.n_max = Some(count(key, value, line)?),
                "axis" => {
                    run.axis = Some(
                        SweepAxis::parse(value)
                            .ok_or_else(|| CliError::Parse { line, message: format!("unknown axis `{value}`") })?,
                    )
                }
                "values" => {
                    run.values = Some(if value.is_empty() {
                        Vec::new()
                    } else {
                        value.split(',').map(|v| number(key, v.trim(), line)).collect::<Result<_, _>>()?
                    })
                }
                "range" => {
                    let p: Vec<&str> = value.split(',').map(str::trim).collect();
                    let [lo, hi, steps] = p.as_slice() else {
                        return Err(CliError::Parse { line, message: "`range` is `start, stop, count`".into() });
                    };
                    let (lo, hi, steps) = (number(key, lo, line)?, number(key, hi, line)?, count(key, steps, line)?);
                    run.values = Some(match steps {
                        0 => Vec::new(),
                        1 => vec![lo],
                        s => (0..s).map(|i| lo + (hi - lo) * i as f64 / (s - 1) as f64).collect(),
                    });
                }
                "energy_cap" => run.energy_cap = Some(positive(key, value, line)?),
                "levels" => run.levels = Some(count(key, value, line)?),
                "cases" => run.cases = Some(count(key, value, line)?),
                _ => return Err(CliError::Parse { line, message: format!("unknown key `{key}` in [run]") }),
            },
        }
    }

    let dimension = dimension.ok_or_else(|| CliError::Parse { line: 0, message: "missing `dimension`".into() })?;
    if e12.is_some() && !shift_pairs.is_empty() {
        return Err(CliError::Parse { line: 0, message: "[shift] takes either `e12` or pair entries, not both".into() });
    }
    let shift = match e12 {
        Some(e) => Shift::NearestNeighbor(e),
        None => Shift::Pairs(shift_pairs),
    };

    let system = if preset.is_some() {
        if !layers.is_empty() || saw_coupling {
            return Err(CliError::Parse { line: 0, message: "a preset cannot be combined with [layer.k] or [coupling]".into() });
        }
        let n = n.ok_or_else(|| CliError::Parse { line: 0, message: "preset needs `n`".into() })?;
        System::Preset { n, omega12: omega12.unwrap_or(3.0), intra: top_intra.build(dimension, 0)? }
    } else {
        if n.is_some() || omega12.is_some() || top_intra.kind.is_some() {
            return Err(CliError::Parse { line: 0, message: "`n`, `omega12` and `intra` at top level need a preset".into() });
        }
        if layers.is_empty() {
            return Err(CliError::Parse { line: 0, message: "no preset and no [layer.k] sections".into() });
        }
        let mut specs = Vec::with_capacity(layers.len());
        for (expect, (k, l)) in layers.into_iter().enumerate() {
            if k != expect {
                return Err(CliError::Parse { line: l.line, message: format!("layer sections must be numbered 0.., missing layer.{expect}") });
            }
            let occupancy = l.occupancy.unwrap_or(Occupancy::Double);
            specs.push(LayerSpec {
                occupancy,
                mass: l.mass.unwrap_or(1.0),
                omega0: l.omega0.unwrap_or(1.0),
                intra: l.intra.build(dimension, l.line)?,
            });
        }
        System::Explicit { layers: specs, couplings }
    };
    let config = Config { dimension, system, shift, run };
    config.system_spec()?;
    config.shift_model()?;
    Ok(config)
}

fn write_intra(out: &mut String, intra: &IntraPotential<f64>, dimension: usize) {
    match intra {
        IntraPotential::None => {}
        IntraPotential::InverseSquare { g } => {
            let _ = writeln!(out, "intra = inverse-square\ng = {g}");
        }
        IntraPotential::Harmonic { omega } => {
            let _ = writeln!(out, "intra = harmonic\nomega_intra = {omega}");
        }
        IntraPotential::Delta { length } => {
            let _ = writeln!(out, "intra = delta");
            let _ = match length {
                ScatteringLength::Absolute(a) => writeln!(out, "a = {a}"),
                ScatteringLength::Relative(r) => writeln!(out, "a{dimension}_over_b = {r}"),
            };
        }
    }
}

/// Canonical text form; `parse_config(&serialize_config(c)) == c` for any parsed config.
pub fn serialize_config(config: &Config) -> String {
    let mut out = String::new();
    let d = config.dimension;
    match &config.system {
        System::Preset { n, omega12, intra } => {
            let _ = writeln!(out, "preset = {PRESET_PAPER_DEFAULT}\ndimension = {d}\nn = {n}\nomega12 = {omega12}");
            write_intra(&mut out, intra, d);
        }
        System::Explicit { layers, couplings } => {
            let _ = writeln!(out, "dimension = {d}");
            for (k, l) in layers.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "\n[layer.{k}]\noccupancy = {}\nmass = {}\nomega0 = {}\nomega0_units = {UNITS}",
                    l.occupancy.count(),
                    l.mass,
                    l.omega0
                );
                write_intra(&mut out, &l.intra, d);
            }
            if !couplings.is_empty() {
                let _ = writeln!(out, "\n[coupling]\nunits = {UNITS}");
                for ((i, k), c) in couplings {
                    let [a, b, e, f] = c.w2;
                    if a == b && a == e && a == f {
                        let _ = writeln!(out, "{i}-{k} = {a}");
                    } else {
                        let _ = writeln!(out, "{i}-{k} = {a}, {b}, {e}, {f}");
                    }
                }
            }
        }
    }
    match &config.shift {
        Shift::NearestNeighbor(e) => {
            let _ = writeln!(out, "\n[shift]\ne12 = {e}");
        }
        Shift::Pairs(p) if !p.is_empty() => {
            let _ = writeln!(out, "\n[shift]");
            for ((i, k), e) in p {
                let _ = writeln!(out, "{i}-{k} = {e}");
            }
        }
        Shift::Pairs(_) => {}
    }
    let r = &config.run;
    if *r != RunParams::default() {
        let _ = writeln!(out, "\n[run]");
        if let Some(v) = r.n_max {
            let _ = writeln!(out, "n_max = {v}");
        }
        if let Some(a) = r.axis {
            let _ = writeln!(out, "axis = {}", a.name());
        }
        if let Some(v) = &r.values {
            let list: Vec<String> = v.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "values = {}", list.join(", "));
        }
        if let Some(v) = r.energy_cap {
            let _ = writeln!(out, "energy_cap = {v}");
        }
        if let Some(v) = r.levels {
            let _ = writeln!(out, "levels = {v}");
        }
        if let Some(v) = r.cases {
            let _ = writeln!(out, "cases = {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset() {
        let c = parse_config("preset = paper-default\ndimension = 1\nn = 2\n").unwrap();
        let spec = c.system_spec().unwrap();
        assert_eq!((spec.len(), spec.dimension()), (2, 1));
        assert_eq!(spec.coupling(0, 1), Some(&PairCoupling::uniform(9.0)));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("dimension = 1\n\n[layer.0]\nmas = 1\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 4, .. }), "{e:?}");
        let e = parse_config("dimension = 1\n[layer.0]\n[layer.1]\n[coupling]\n0-1 = -9\n").unwrap_err();
        assert!(e.to_string().contains("0-1"), "{e}");
        let e = parse_config("dimension = 1\n[layer.0]\nomega0_units = hz\n").unwrap_err();
        assert!(matches!(e, CliError::Units { line: 3, .. }));
    }

    #[test]
    fn delta_length_keys_follow_dimension() {
        assert!(parse_config("preset = paper-default\ndimension = 2\nn = 2\nintra = delta\na1_over_b = 1\n").is_err());
        let c = parse_config("preset = paper-default\ndimension = 2\nn = 2\nintra = delta\nln_b_over_a2 = 0\n").unwrap();
        assert_eq!(
            c.system,
            System::Preset { n: 2, omega12: 3.0, intra: IntraPotential::Delta { length: ScatteringLength::Relative(1.0) } }
        );
    }

    #[test]
    fn serialization_round_trips() {
        let text = "dimension = 2\n[layer.0]\nmass = 1.5\nomega0 = 1\nintra = delta\nln_b_over_a2 = 0.3\n\
                    [layer.1]\noccupancy = 1\n[coupling]\n0-1 = 1, 4, 4, 1\n[shift]\n0-1 = 0.25\n[run]\nrange = 0, 1, 4\n";
        let c = parse_config(text).unwrap();
        let once = serialize_config(&c);
        let again = parse_config(&once).unwrap();
        assert_eq!(again, c);
        assert_eq!(serialize_config(&again), once);
    }
}
