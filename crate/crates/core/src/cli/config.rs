use crate::error::{Error, Result};
use crate::rigidity::TrigPoly;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "RIGIDLAB_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "rigidlab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PhaseTransition,
    SzegoVerdicts,
    EnGapBound,
    CombCrosscheck,
    DiscretizeQuasi,
    Periodicity,
    JensenDensity,
    ConeWitness,
    PatchCounterexample,
    MonotoneCorollary,
    TensorOrthant,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::PhaseTransition,
        ExperimentKind::SzegoVerdicts,
        ExperimentKind::EnGapBound,
        ExperimentKind::CombCrosscheck,
        ExperimentKind::DiscretizeQuasi,
        ExperimentKind::Periodicity,
        ExperimentKind::JensenDensity,
        ExperimentKind::ConeWitness,
        ExperimentKind::PatchCounterexample,
        ExperimentKind::MonotoneCorollary,
        ExperimentKind::TensorOrthant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::PhaseTransition => "phase_transition",
            ExperimentKind::SzegoVerdicts => "szego_verdicts",
            ExperimentKind::EnGapBound => "en_gap_bound",
            ExperimentKind::CombCrosscheck => "comb_crosscheck",
            ExperimentKind::DiscretizeQuasi => "discretize_quasi",
            ExperimentKind::Periodicity => "periodicity",
            ExperimentKind::JensenDensity => "jensen_density",
            ExperimentKind::ConeWitness => "cone_witness",
            ExperimentKind::PatchCounterexample => "patch_counterexample",
            ExperimentKind::MonotoneCorollary => "monotone_corollary",
            ExperimentKind::TensorOrthant => "tensor_orthant",
        }
    }

    /// Check identifiers the report always contains, in order.
    pub fn checks(&self) -> &'static [&'static str] {
        match self {
            ExperimentKind::PhaseTransition => &["AC-02", "AC-03", "AC-09"],
            ExperimentKind::SzegoVerdicts => &["AC-07"],
            ExperimentKind::EnGapBound => &["AC-04"],
            ExperimentKind::CombCrosscheck => &["AC-05"],
            ExperimentKind::DiscretizeQuasi => &["X-DQ-01", "X-DQ-02"],
            ExperimentKind::Periodicity => &["AC-06", "X-PER-01"],
            ExperimentKind::JensenDensity => &["AC-01", "X-JEN-01"],
            ExperimentKind::ConeWitness => &["AC-11", "X-CONE-01"],
            ExperimentKind::PatchCounterexample => &["AC-10"],
            ExperimentKind::MonotoneCorollary => &["AC-08"],
            ExperimentKind::TensorOrthant => &["AC-12", "X-TO-01", "X-TO-02"],
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

/// One JSON document naming the experiment, its seed and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Run independent cells on the thread pool; results do not depend on it.
    #[serde(default)]
    pub parallel: bool,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The experiment with every parameter at its default.
    pub fn default_for(kind: ExperimentKind) -> Self {
        let params = match kind {
            ExperimentKind::PhaseTransition => to_value(PhaseTransitionParams::default()),
            ExperimentKind::SzegoVerdicts => to_value(SzegoParams::default()),
            ExperimentKind::EnGapBound => to_value(EnGapParams::default()),
            ExperimentKind::CombCrosscheck => to_value(CombParams::default()),
            ExperimentKind::DiscretizeQuasi => to_value(DiscretizeParams::default()),
            ExperimentKind::Periodicity => to_value(PeriodicityParams::default()),
            ExperimentKind::JensenDensity => to_value(JensenParams::default()),
            ExperimentKind::ConeWitness => to_value(ConeParams::default()),
            ExperimentKind::PatchCounterexample => to_value(PatchParams::default()),
            ExperimentKind::MonotoneCorollary => to_value(MonotoneParams::default()),
            ExperimentKind::TensorOrthant => to_value(TensorParams::default()),
        };
        ExperimentConfig { experiment: kind, seed: 1, output_dir: None, parallel: false, params }
    }

    /// Typed parameters, checked against the schema and the runtime budgets.
    pub fn params(&self) -> Result<Params> {
        let p = match self.experiment {
            ExperimentKind::PhaseTransition => Params::PhaseTransition(parse(&self.params)?),
            ExperimentKind::SzegoVerdicts => Params::SzegoVerdicts(parse(&self.params)?),
            ExperimentKind::EnGapBound => Params::EnGapBound(parse(&self.params)?),
            ExperimentKind::CombCrosscheck => Params::CombCrosscheck(parse(&self.params)?),
            ExperimentKind::DiscretizeQuasi => Params::DiscretizeQuasi(parse(&self.params)?),
            ExperimentKind::Periodicity => Params::Periodicity(parse(&self.params)?),
            ExperimentKind::JensenDensity => Params::JensenDensity(parse(&self.params)?),
            ExperimentKind::ConeWitness => Params::ConeWitness(parse(&self.params)?),
            ExperimentKind::PatchCounterexample => Params::PatchCounterexample(parse(&self.params)?),
            ExperimentKind::MonotoneCorollary => Params::MonotoneCorollary(parse(&self.params)?),
            ExperimentKind::TensorOrthant => Params::TensorOrthant(parse(&self.params)?),
        };
        p.check()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.params().map(|_| ())
    }

    /// `$RIGIDLAB_OUTPUT_DIR`, else `output_dir`, else `rigidlab-out`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        }
    }
}

fn to_value<T: Serialize>(p: T) -> serde_json::Value {
    serde_json::to_value(p).expect("parameters serialize")
}

fn parse<T: DeserializeOwned>(v: &serde_json::Value) -> Result<T> {
    let v = if v.is_null() { empty_object() } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Error::Config(format!("params: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    PhaseTransition(PhaseTransitionParams),
    SzegoVerdicts(SzegoParams),
    EnGapBound(EnGapParams),
    CombCrosscheck(CombParams),
    DiscretizeQuasi(DiscretizeParams),
    Periodicity(PeriodicityParams),
    JensenDensity(JensenParams),
    ConeWitness(ConeParams),
    PatchCounterexample(PatchParams),
    MonotoneCorollary(MonotoneParams),
    TensorOrthant(TensorParams),
}

impl Params {
    fn check(&self) -> Result<()> {
        match self {
            Params::PhaseTransition(p) => p.check(),
            Params::SzegoVerdicts(p) => p.check(),
            Params::EnGapBound(p) => p.check(),
            Params::CombCrosscheck(p) => p.check(),
            Params::DiscretizeQuasi(p) => p.check(),
            Params::Periodicity(p) => p.check(),
            Params::JensenDensity(p) => p.check(),
            Params::ConeWitness(p) => p.check(),
            Params::PatchCounterexample(p) => p.check(),
            Params::MonotoneCorollary(p) => p.check(),
            Params::TensorOrthant(p) => p.check(),
        }
    }
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn budget(msg: impl Into<String>) -> Error {
    Error::BudgetExceeded(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn at_most(name: &str, v: usize, max: usize) -> Result<()> {
    if v > max {
        Err(budget(format!("{name} = {v} exceeds the guard {max}")))
    } else {
        Ok(())
    }
}

/// Triangle model in `d = 1`: refinement sweep, decorrelated design and Plancherel sanity cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseTransitionParams {
    pub rhos: Vec<f64>,
    /// `(h, R)` steps, refining.
    pub schedule: Vec<(f64, f64)>,
    pub target_side: f64,
    pub nonrigid_radius: f64,
    pub nonrigid_target_radius: f64,
    pub nonrigid_h: f64,
    pub nonrigid_extent: f64,
    pub plancherel_cells: usize,
}

impl Default for PhaseTransitionParams {
    fn default() -> Self {
        PhaseTransitionParams {
            rhos: vec![0.5, 2.5],
            schedule: vec![(0.2, 10.0), (0.1, 20.0), (0.05, 40.0)],
            target_side: 0.025,
            nonrigid_radius: 2.1,
            nonrigid_target_radius: 0.1,
            nonrigid_h: 0.1,
            nonrigid_extent: 20.0,
            plancherel_cells: 20,
        }
    }
}

/// Largest number of cells in one design.
pub const MAX_DESIGN_CELLS: f64 = 4000.0;

impl PhaseTransitionParams {
    fn check(&self) -> Result<()> {
        if self.rhos.is_empty() {
            return Err(config("rhos must not be empty"));
        }
        if self.schedule.is_empty() {
            return Err(config("schedule must not be empty"));
        }
        for &r in &self.rhos {
            positive("rho", r)?;
        }
        for &(h, r) in &self.schedule {
            positive("h", h)?;
            positive("R", r)?;
        }
        if self.schedule.windows(2).any(|w| !(w[1].0 < w[0].0 && w[1].1 >= w[0].1)) {
            return Err(config("schedule must refine: h decreasing, R nondecreasing"));
        }
        positive("target_side", self.target_side)?;
        positive("nonrigid_radius", self.nonrigid_radius)?;
        positive("nonrigid_target_radius", self.nonrigid_target_radius)?;
        positive("nonrigid_h", self.nonrigid_h)?;
        positive("nonrigid_extent", self.nonrigid_extent)?;
        if self.nonrigid_extent <= self.nonrigid_radius {
            return Err(config("nonrigid_extent must exceed nonrigid_radius"));
        }
        at_most("rhos", self.rhos.len(), 8)?;
        at_most("schedule steps", self.schedule.len(), 8)?;
        at_most("plancherel_cells", self.plancherel_cells, 1000)?;
        for &(h, r) in self.schedule.iter().chain([(self.nonrigid_h, self.nonrigid_extent)].iter()) {
            if 2.0 * r / h > MAX_DESIGN_CELLS {
                return Err(budget(format!("design (h = {h}, R = {r}) has about {} cells, guard {MAX_DESIGN_CELLS}", (2.0 * r / h) as usize)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SzegoParams {
    pub cutoffs: Vec<f64>,
    pub gap_radius: f64,
}

impl Default for SzegoParams {
    fn default() -> Self {
        SzegoParams { cutoffs: crate::spectral::szego::default_cutoffs(), gap_radius: 0.3 }
    }
}

impl SzegoParams {
    fn check(&self) -> Result<()> {
        if self.cutoffs.len() < 3 {
            return Err(config("need at least three cutoffs"));
        }
        if self.cutoffs.windows(2).any(|w| !(w[1] > w[0])) || self.cutoffs.iter().any(|c| !(*c > 0.0)) {
            return Err(config("cutoffs must be positive and increasing"));
        }
        positive("gap_radius", self.gap_radius)?;
        at_most("cutoffs", self.cutoffs.len(), 64)?;
        if *self.cutoffs.last().unwrap() > 1e8 {
            return Err(budget("largest cutoff exceeds 1e8"));
        }
        Ok(())
    }
}

/// Symmetric atoms off the arc `|θ| < gap_half_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnGapParams {
    pub atoms: usize,
    pub gap_half_width: f64,
    pub k_max: usize,
    pub n_max: usize,
    pub support_points: usize,
}

impl Default for EnGapParams {
    fn default() -> Self {
        EnGapParams { atoms: 40, gap_half_width: PI / 3.0, k_max: 16, n_max: 5, support_points: 4001 }
    }
}

impl EnGapParams {
    fn check(&self) -> Result<()> {
        if self.atoms < 2 || self.atoms % 2 != 0 {
            return Err(config("atoms must be a positive even number"));
        }
        if !(self.gap_half_width > 0.0 && self.gap_half_width < PI) {
            return Err(config("gap_half_width must lie in (0, π)"));
        }
        if self.k_max == 0 || self.n_max == 0 || self.support_points < 16 {
            return Err(config("k_max, n_max must be positive and support_points at least 16"));
        }
        at_most("atoms", self.atoms, 400)?;
        at_most("k_max", self.k_max, 64)?;
        at_most("n_max", self.n_max, 12)?;
        at_most("support_points", self.support_points, 100_001)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombParams {
    pub a: Vec<f64>,
    pub t: f64,
    pub truncation: usize,
    pub seeds: usize,
    pub tolerance: f64,
}

impl Default for CombParams {
    fn default() -> Self {
        CombParams { a: vec![1.0, 2.0, 4.0], t: 0.7, truncation: 400, seeds: 10_000, tolerance: 0.05 }
    }
}

impl CombParams {
    fn check(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(config("a must not be empty"));
        }
        for &a in &self.a {
            positive("a", a)?;
        }
        positive("t", self.t)?;
        positive("tolerance", self.tolerance)?;
        if self.seeds < 2 || self.truncation == 0 {
            return Err(config("need at least two seeds and a positive truncation"));
        }
        at_most("seeds", self.seeds, 1_000_000)?;
        at_most("truncation", self.truncation, 100_000)?;
        at_most("a", self.a.len(), 32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizeParams {
    pub a: Vec<f64>,
    pub t: f64,
    pub truncation: usize,
    pub n_max: usize,
}

impl Default for DiscretizeParams {
    fn default() -> Self {
        DiscretizeParams { a: vec![1.0, 2.0, 4.0], t: 0.7, truncation: 400, n_max: 48 }
    }
}

impl DiscretizeParams {
    fn check(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(config("a must not be empty"));
        }
        for &a in &self.a {
            positive("a", a)?;
        }
        positive("t", self.t)?;
        if self.truncation == 0 || self.n_max < 8 {
            return Err(config("truncation must be positive and n_max at least 8"));
        }
        at_most("truncation", self.truncation, 100_000)?;
        at_most("n_max", self.n_max, 200)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub period: Vec<usize>,
    pub values: Vec<i64>,
    pub window: usize,
    pub n0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicityParams {
    pub patterns: Vec<PatternSpec>,
    pub seeds: usize,
    /// Window side of the white-noise control.
    pub noise_window: usize,
}

impl Default for PeriodicityParams {
    fn default() -> Self {
        PeriodicityParams {
            patterns: vec![
                PatternSpec { period: vec![4], values: vec![1, 0, 0, 2], window: 64, n0: 10 },
                PatternSpec { period: vec![3, 5], values: vec![0, 2, 1, 1, 0, 0, 2, 1, 0, 0, 1, 2, 1, 1, 0], window: 40, n0: 12 },
            ],
            seeds: 50,
            noise_window: 64,
        }
    }
}

impl PeriodicityParams {
    fn check(&self) -> Result<()> {
        if self.patterns.is_empty() || self.seeds == 0 {
            return Err(config("need at least one pattern and one seed"));
        }
        for p in &self.patterns {
            let d = p.period.len();
            if d == 0 || d > 3 || p.period.iter().any(|&n| n == 0) || p.period.iter().product::<usize>() != p.values.len() {
                return Err(config("pattern period must be 1 to 3 positive entries matching the value count"));
            }
            if p.n0 < 4 || p.window < 2 * p.n0 + 3 {
                return Err(config(format!("pattern {:?}: need n0 ≥ 4 and window ≥ 2·n0 + 3", p.period)));
            }
            let sites = p.window.pow(d as u32);
            if sites > 200_000 {
                return Err(budget(format!("window {}^{d} exceeds 200000 sites", p.window)));
            }
        }
        if self.noise_window < 24 {
            return Err(config("noise_window must be at least 24"));
        }
        at_most("noise_window", self.noise_window, 4096)?;
        at_most("seeds", self.seeds, 1000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JensenParams {
    pub t_max: f64,
    pub refinement: f64,
}

impl Default for JensenParams {
    fn default() -> Self {
        JensenParams { t_max: 200.0, refinement: 0.05 }
    }
}

impl JensenParams {
    fn check(&self) -> Result<()> {
        positive("t_max", self.t_max)?;
        positive("refinement", self.refinement)?;
        if self.refinement >= self.t_max {
            return Err(config("refinement must be below t_max"));
        }
        if self.t_max / self.refinement > 1e7 {
            return Err(budget("t_max / refinement exceeds 1e7 grid steps"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeParams {
    pub cones: usize,
    pub max_dim: usize,
}

impl Default for ConeParams {
    fn default() -> Self {
        ConeParams { cones: 200, max_dim: 4 }
    }
}

impl ConeParams {
    fn check(&self) -> Result<()> {
        if self.cones == 0 || self.max_dim < 2 {
            return Err(config("need at least one cone and max_dim ≥ 2"));
        }
        at_most("cones", self.cones, 100_000)?;
        at_most("max_dim", self.max_dim, 12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchPair {
    pub name: String,
    pub gamma1: TrigPoly,
    pub gamma2: TrigPoly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatchParams {
    pub eps: f64,
    pub pairs: Vec<PatchPair>,
}

impl Default for PatchParams {
    fn default() -> Self {
        let pair = |name: &str, gamma1, gamma2| PatchPair { name: name.into(), gamma1, gamma2 };
        PatchParams {
            eps: 0.01,
            pairs: vec![
                pair("constants", TrigPoly::constant(0.25), TrigPoly::constant(0.25)),
                pair("analytic", TrigPoly::monomial(1, 0.25), TrigPoly::monomial(2, 0.25)),
                pair("zero_factor", TrigPoly::zero(), TrigPoly::monomial(-1, 0.25)),
                pair("conjugate", TrigPoly::monomial(1, 0.25), TrigPoly::monomial(-1, 0.25)),
            ],
        }
    }
}

impl PatchParams {
    fn check(&self) -> Result<()> {
        positive("eps", self.eps)?;
        if self.pairs.is_empty() {
            return Err(config("pairs must not be empty"));
        }
        at_most("pairs", self.pairs.len(), 32)?;
        for p in &self.pairs {
            for g in [&p.gamma1, &p.gamma2] {
                if g.terms.iter().any(|(k, _)| k.unsigned_abs() > 64) {
                    return Err(budget(format!("pair {}: frequencies beyond ±64", p.name)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonotoneParams {
    pub measures: usize,
    pub n_max: usize,
    pub atoms_min: usize,
    pub atoms_max: usize,
    /// Harmonics in the random density `f`.
    pub harmonics: usize,
}

impl Default for MonotoneParams {
    fn default() -> Self {
        MonotoneParams { measures: 100, n_max: 20, atoms_min: 5, atoms_max: 30, harmonics: 4 }
    }
}

impl MonotoneParams {
    fn check(&self) -> Result<()> {
        if self.measures == 0 || self.n_max == 0 || self.atoms_min == 0 || self.atoms_min > self.atoms_max {
            return Err(config("need measures, n_max > 0 and 0 < atoms_min ≤ atoms_max"));
        }
        at_most("measures", self.measures, 10_000)?;
        at_most("n_max", self.n_max, 200)?;
        at_most("atoms_max", self.atoms_max, 500)?;
        at_most("harmonics", self.harmonics, 64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TensorParams {
    pub n_max: usize,
    /// Cosine coefficients of the second factor `s̃`.
    pub second_factor: Vec<f64>,
    pub grid: usize,
    /// Points per axis of the atomic corridor measure.
    pub corridor_atoms: usize,
    pub corridor_half_width: f64,
    pub corridor_n_max: usize,
}

impl Default for TensorParams {
    fn default() -> Self {
        TensorParams {
            n_max: 20,
            second_factor: vec![1.0, 0.5],
            grid: 128,
            corridor_atoms: 8,
            corridor_half_width: PI / 2.0,
            corridor_n_max: 12,
        }
    }
}

impl TensorParams {
    fn check(&self) -> Result<()> {
        if self.n_max < 2 || self.second_factor.is_empty() || self.grid < 8 || self.corridor_atoms < 2 || self.corridor_n_max < 8 {
            return Err(config("need n_max ≥ 2, a nonempty second factor, grid ≥ 8, corridor_atoms ≥ 2, corridor_n_max ≥ 8"));
        }
        if !(self.corridor_half_width > 0.0 && self.corridor_half_width < PI) {
            return Err(config("corridor_half_width must lie in (0, π)"));
        }
        let c0 = self.second_factor[0];
        if self.second_factor[1..].iter().map(|c| c.abs()).sum::<f64>() >= c0 {
            return Err(config("second factor must be bounded below by a positive constant"));
        }
        at_most("n_max", self.n_max, 30)?;
        at_most("grid", self.grid, 1024)?;
        at_most("corridor_atoms", self.corridor_atoms, 24)?;
        at_most("corridor_n_max", self.corridor_n_max, 20)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::default_for(kind);
            c.validate().unwrap();
            let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
            assert_eq!(back, c);
            assert_eq!(ExperimentKind::from_name(kind.name()), Some(kind));
        }
    }

    #[test]
    fn empty_rho_list_is_a_config_error() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"phase_transition","seed":3,"params":{"rhos":[]}}"#).unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn seed_is_required() {
        assert!(matches!(ExperimentConfig::from_json(r#"{"experiment":"jensen_density"}"#), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"jensen_density","seed":1,"params":{"tmax":10}}"#).unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_json(r#"{"experiment":"jensen_density","seed":1,"colour":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"warp_drive","seed":1}"#).is_err());
    }

    #[test]
    fn budget_guards() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"comb_crosscheck","seed":1,"params":{"seeds":5000000}}"#).unwrap();
        assert!(matches!(c.validate(), Err(Error::BudgetExceeded(_))));
        let c = ExperimentConfig::from_json(r#"{"experiment":"phase_transition","seed":1,"params":{"schedule":[[0.001,10.0]]}}"#).unwrap();
        assert!(matches!(c.validate(), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn partial_params_fill_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"jensen_density","seed":1,"params":{"t_max":50.0}}"#).unwrap();
        match c.params().unwrap() {
            Params::JensenDensity(p) => assert_eq!(p, JensenParams { t_max: 50.0, ..JensenParams::default() }),
            other => panic!("{other:?}"),
        }
    }
}
