//! Parameter sweeps, two-rate optimization and figure drivers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bath::{rate_matrix, RateMatrix};
use crate::closedform::{
    independent_ratio, optimal_local_dephasing, single_atom, zero_t_ratio_limit, OptimumMethod,
    OptimumReport,
};
use crate::error::{Error, Result, Violation};
use crate::greens::coupling_matrices;
use crate::model::{dicke_coupling, BathSpec, Detuning, InverseTemperature, RingGeometry, GAMMA0};
use crate::modes::{project_drive, spectrum_dicke, spectrum_finite, DriveProjection, ModeSpectrum};
use crate::steady::{coherent_dicke_local, coherent_thermal, incoherent_dicke};
use crate::table::{Axis, Cell, SweepTable, ValueKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Spacing of the idealized Dicke rings (only J = 3/(2k₀³d³) depends on it).
pub const DICKE_SPACING: f64 = 0.05;

/// Ring spacing used for the emitter-number scaling figure.
pub const FIG5_SPACING: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    SingleAtom,
    DickeLocal,
    DickeThermal,
    FiniteThermal,
    IncoherentLocal,
    IncoherentThermal,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::SingleAtom,
        Model::DickeLocal,
        Model::DickeThermal,
        Model::FiniteThermal,
        Model::IncoherentLocal,
        Model::IncoherentThermal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::SingleAtom => "single-atom",
            Model::DickeLocal => "dicke-local",
            Model::DickeThermal => "dicke-thermal",
            Model::FiniteThermal => "finite-thermal",
            Model::IncoherentLocal => "incoherent-local",
            Model::IncoherentThermal => "incoherent-thermal",
        }
    }

    pub fn is_thermal(self) -> bool {
        matches!(
            self,
            Model::DickeThermal | Model::FiniteThermal | Model::IncoherentThermal
        )
    }

    pub fn is_incoherent(self) -> bool {
        matches!(self, Model::IncoherentLocal | Model::IncoherentThermal)
    }

    fn dephasing_name(self) -> &'static str {
        if self.is_thermal() {
            "gamma_bth"
        } else {
            "gamma_d"
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Model::ALL.iter().map(|m| m.name()).collect();
                format!("unknown model '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// σ_abs/σ (σ_abs^inc/σ for incoherent models).
    Absorption,
    /// σ_abs/(N σ_abs^{1at}(Γ₀)), reference dephasing equal to the model's.
    IndependentRatio,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Absorption => "absorption",
            Quantity::IndependentRatio => "ratio",
        }
    }

    fn column(self) -> &'static str {
        match self {
            Quantity::Absorption => "sigma_abs_over_sigma",
            Quantity::IndependentRatio => "ratio_to_independent",
        }
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "absorption" => Ok(Quantity::Absorption),
            "ratio" => Ok(Quantity::IndependentRatio),
            _ => Err(format!(
                "unknown quantity '{s}' (expected absorption or ratio)"
            )),
        }
    }
}

/// A rate given in Γ₀ units, relative to the bright-mode radiative rate, or
/// (for the thermal width only) as the Ohmic bath slope f̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateSpec {
    Absolute(f64),
    PerBright(f64),
    BathSlope(f64),
}

impl fmt::Display for RateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateSpec::Absolute(v) => write!(f, "{v} Gamma0"),
            RateSpec::PerBright(v) => write!(f, "{v} x bright rate"),
            RateSpec::BathSlope(v) => write!(f, "fbar = {v}"),
        }
    }
}

/// Inverse temperature, either as βJ (J the Dicke band coefficient) or as βΓ₀.
/// An infinite value is the zero-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    BetaJ(f64),
    BetaGamma0(f64),
}

impl Temperature {
    fn inverse(self, j: f64) -> InverseTemperature {
        match self {
            Temperature::BetaJ(b) => InverseTemperature::from_beta_j(b, j),
            Temperature::BetaGamma0(b) if b.is_infinite() => InverseTemperature::Infinite,
            Temperature::BetaGamma0(b) => InverseTemperature::Finite(b),
        }
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Temperature::BetaJ(b) => write!(f, "beta_j = {b}"),
            Temperature::BetaGamma0(b) => write!(f, "beta_gamma0 = {b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub n_emitters: usize,
    pub spacing: f64,
    pub gamma_t: RateSpec,
    /// Γ_D for local models, Γ_B^th for thermal ones.
    pub dephasing: RateSpec,
    pub temperature: Temperature,
    pub rabi: f64,
    pub detuning: Detuning,
    pub intensity: f64,
    pub mean_photons: f64,
}

impl Default for PointParams {
    fn default() -> Self {
        Self {
            n_emitters: 10,
            spacing: DICKE_SPACING,
            gamma_t: RateSpec::Absolute(1.0),
            dephasing: RateSpec::Absolute(0.0),
            temperature: Temperature::BetaJ(f64::INFINITY),
            rabi: 1e-3,
            detuning: Detuning::ResonantWithBrightest,
            intensity: 1e-3,
            mean_photons: 1.0,
        }
    }
}

/// Model-dependent data that does not change with the two decay rates.
#[derive(Debug, Clone)]
struct Context {
    spectrum: ModeSpectrum,
    drive: DriveProjection,
    unit_rates: Option<RateMatrix>,
}

impl Context {
    fn bright_rate(&self) -> f64 {
        self.spectrum.bright_rate()
    }
}

fn prepare(model: Model, p: &PointParams) -> Result<Context> {
    let n = if model == Model::SingleAtom {
        1
    } else {
        p.n_emitters
    };
    let geometry = RingGeometry::new(n, p.spacing)?;
    let (spectrum, drive) = if model == Model::FiniteThermal {
        let couplings = coupling_matrices(&geometry)?;
        (
            spectrum_finite(&geometry, &couplings)?,
            project_drive(&geometry, p.rabi),
        )
    } else {
        (
            spectrum_dicke(n, p.spacing),
            DriveProjection::uniform(n, p.rabi),
        )
    };
    let unit_rates = if model.is_thermal() {
        let beta = p.temperature.inverse(dicke_coupling(p.spacing));
        Some(rate_matrix(&spectrum, &BathSpec::ohmic(1.0, beta))?)
    } else {
        None
    };
    Ok(Context {
        spectrum,
        drive,
        unit_rates,
    })
}

fn negative(field: &'static str) -> Error {
    Error::InvalidParameter(vec![Violation::new(field, "rate ≥ 0")])
}

/// One evaluated parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub value: f64,
    /// Radiative rate of the brightest mode.
    pub bright_rate: f64,
    /// Γ_T in Γ₀ units.
    pub gamma_t: f64,
    /// Γ_D or Γ_B^th in Γ₀ units.
    pub dephasing: f64,
}

fn evaluate_in(
    model: Model,
    quantity: Quantity,
    p: &PointParams,
    ctx: &Context,
) -> Result<PointResult> {
    let bright = ctx.bright_rate();
    let n = ctx.spectrum.len();
    let gamma_t = match p.gamma_t {
        RateSpec::Absolute(v) => v,
        RateSpec::PerBright(v) => v * bright,
        RateSpec::BathSlope(_) => {
            return Err(Error::InvalidParameter(vec![Violation::new(
                "trap_rate",
                "trap_rate given as a rate",
            )]))
        }
    };
    if gamma_t.is_nan() || gamma_t < 0.0 {
        return Err(negative("trap_rate"));
    }
    let (rates, dephasing) = match (&ctx.unit_rates, p.dephasing) {
        (None, RateSpec::BathSlope(_)) => {
            return Err(Error::InvalidParameter(vec![Violation::new(
                "bath",
                "bath coupling requires a thermal model",
            )]))
        }
        (None, spec) => {
            let gd = match spec {
                RateSpec::PerBright(v) => v * bright,
                RateSpec::Absolute(v) | RateSpec::BathSlope(v) => v,
            };
            if gd.is_nan() || gd < 0.0 {
                return Err(negative("local_dephasing"));
            }
            (RateMatrix::local_dephasing(n, gd), gd)
        }
        (Some(unit), spec) => {
            let factor = match spec {
                RateSpec::BathSlope(f) => f,
                RateSpec::Absolute(_) | RateSpec::PerBright(_) => {
                    let target = match spec {
                        RateSpec::PerBright(v) => v * bright,
                        RateSpec::Absolute(v) | RateSpec::BathSlope(v) => v,
                    };
                    if target == 0.0 {
                        0.0
                    } else if unit.bright_width > 0.0 {
                        target / unit.bright_width
                    } else {
                        return Err(Error::Domain(
                            "bright mode has no thermal width at this temperature".into(),
                        ));
                    }
                }
            };
            if factor.is_nan() || factor < 0.0 {
                return Err(negative("coupling"));
            }
            let scaled = unit.scaled(factor);
            let width = scaled.bright_width;
            (scaled, width)
        }
    };

    let value = match model {
        Model::SingleAtom => single_atom(GAMMA0, gamma_t, dephasing)?.absorbed,
        Model::DickeLocal if p.detuning == Detuning::ResonantWithBrightest => {
            coherent_dicke_local(n, p.rabi, gamma_t, dephasing)?.absorbed_fraction
        }
        Model::DickeLocal | Model::DickeThermal | Model::FiniteThermal => {
            coherent_thermal(&ctx.spectrum, &rates, &ctx.drive, gamma_t, p.detuning)?
                .absorbed_fraction
        }
        Model::IncoherentLocal | Model::IncoherentThermal => {
            incoherent_dicke(n, p.intensity, p.mean_photons, gamma_t, &rates)?.absorbed_fraction
        }
    };
    let value = match quantity {
        Quantity::Absorption => value,
        Quantity::IndependentRatio if model.is_incoherent() => {
            return Err(Error::Domain(
                "the independent-emitter ratio is defined for coherent drive only".into(),
            ))
        }
        Quantity::IndependentRatio => independent_ratio(value, n, gamma_t, dephasing)?,
    };
    Ok(PointResult {
        value,
        bright_rate: bright,
        gamma_t,
        dephasing,
    })
}

/// Evaluates a single parameter point.
pub fn evaluate_point(model: Model, quantity: Quantity, p: &PointParams) -> Result<PointResult> {
    let ctx = prepare(model, p)?;
    evaluate_in(model, quantity, p, &ctx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    GammaT,
    GammaTNorm,
    GammaD,
    GammaDNorm,
    GammaBth,
    GammaBthNorm,
    Fbar,
    NEmitters,
    BetaJ,
    BetaGamma0,
    Spacing,
}

impl Variable {
    pub const ALL: [Variable; 11] = [
        Variable::GammaT,
        Variable::GammaTNorm,
        Variable::GammaD,
        Variable::GammaDNorm,
        Variable::GammaBth,
        Variable::GammaBthNorm,
        Variable::Fbar,
        Variable::NEmitters,
        Variable::BetaJ,
        Variable::BetaGamma0,
        Variable::Spacing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::GammaT => "gamma_t",
            Variable::GammaTNorm => "gamma_t_norm",
            Variable::GammaD => "gamma_d",
            Variable::GammaDNorm => "gamma_d_norm",
            Variable::GammaBth => "gamma_bth",
            Variable::GammaBthNorm => "gamma_bth_norm",
            Variable::Fbar => "fbar",
            Variable::NEmitters => "n_emitters",
            Variable::BetaJ => "beta_j",
            Variable::BetaGamma0 => "beta_gamma0",
            Variable::Spacing => "d_over_lambda",
        }
    }

    /// Changes the ring itself (spectrum, drive or bath), not only the rates.
    fn is_structural(self) -> bool {
        matches!(
            self,
            Variable::NEmitters | Variable::BetaJ | Variable::BetaGamma0 | Variable::Spacing
        )
    }

    fn apply(self, p: &mut PointParams, v: f64) {
        match self {
            Variable::GammaT => p.gamma_t = RateSpec::Absolute(v),
            Variable::GammaTNorm => p.gamma_t = RateSpec::PerBright(v),
            Variable::GammaD | Variable::GammaBth => p.dephasing = RateSpec::Absolute(v),
            Variable::GammaDNorm | Variable::GammaBthNorm => p.dephasing = RateSpec::PerBright(v),
            Variable::Fbar => p.dephasing = RateSpec::BathSlope(v),
            Variable::NEmitters => p.n_emitters = v.round() as usize,
            Variable::BetaJ => p.temperature = Temperature::BetaJ(v),
            Variable::BetaGamma0 => p.temperature = Temperature::BetaGamma0(v),
            Variable::Spacing => p.spacing = v,
        }
    }
}

impl FromStr for Variable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = if s == "spacing" { "d_over_lambda" } else { s };
        Variable::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Variable::ALL.iter().map(|v| v.name()).collect();
                format!(
                    "unknown axis variable '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub variable: Variable,
    pub log: bool,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn log(variable: Variable, min: f64, max: f64, points: usize) -> Self {
        Self {
            variable,
            log: true,
            min,
            max,
            points,
        }
    }

    pub fn linear(variable: Variable, min: f64, max: f64, points: usize) -> Self {
        Self {
            variable,
            log: false,
            min,
            max,
            points,
        }
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if self.points == 0 {
            return Err(format!(
                "axis {} needs at least one point",
                self.variable.name()
            ));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(format!(
                "axis {} needs finite min ≤ max",
                self.variable.name()
            ));
        }
        if self.log && self.min <= 0.0 {
            return Err(format!("log axis {} needs min > 0", self.variable.name()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let k = self.points;
        let raw: Vec<f64> = (0..k)
            .map(|i| {
                let t = if k == 1 {
                    0.0
                } else {
                    i as f64 / (k - 1) as f64
                };
                if self.log {
                    let (a, b) = (self.min.log10(), self.max.log10());
                    10f64.powf(a + t * (b - a))
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect();
        if self.variable == Variable::NEmitters {
            raw.into_iter().map(f64::round).collect()
        } else {
            raw
        }
    }

    fn axis(&self) -> Axis {
        Axis {
            name: self.variable.name().to_string(),
            values: self.values(),
            log: self.log,
        }
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}:{}",
            self.variable.name(),
            if self.log { "log" } else { "lin" },
            self.min,
            self.max,
            self.points
        )
    }
}

impl FromStr for AxisSpec {
    type Err = String;

    /// `name:log|lin:min:max:points`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(format!("axis '{s}' must look like name:log:min:max:points"));
        }
        let variable = parts[0].parse()?;
        let log = match parts[1] {
            "log" => true,
            "lin" | "linear" => false,
            other => return Err(format!("axis scale '{other}' must be log or lin")),
        };
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| format!("'{x}' is not a number"))
        };
        let points = parts[4]
            .parse::<usize>()
            .map_err(|_| format!("'{}' is not a point count", parts[4]))?;
        let spec = AxisSpec {
            variable,
            log,
            min: num(parts[2])?,
            max: num(parts[3])?,
            points,
        };
        spec.check()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub name: String,
    pub model: Model,
    pub quantity: Quantity,
    pub base: PointParams,
    pub axis1: AxisSpec,
    pub axis2: Option<AxisSpec>,
    pub threads: Option<usize>,
}

/// Runs `f(0..count)` on a pool of at most `threads` workers; results come
/// back in index order regardless of scheduling.
fn run_indexed<T, F>(count: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads == Some(1) || count <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}

fn value_kind(model: Model, quantity: Quantity) -> ValueKind {
    match (quantity, model.is_incoherent()) {
        (Quantity::IndependentRatio, _) => ValueKind::Ratio,
        (Quantity::Absorption, true) => ValueKind::IncoherentAbsorption,
        (Quantity::Absorption, false) => ValueKind::CoherentAbsorption,
    }
}

fn describe(table: &mut SweepTable, model: Model, quantity: Quantity, p: &PointParams) {
    table
        .meta("model", model)
        .meta("quantity", quantity.name())
        .meta("n_emitters", p.n_emitters)
        .meta("spacing", format!("{} lambda0", p.spacing))
        .meta("gamma_t", p.gamma_t)
        .meta(model.dephasing_name(), p.dephasing);
    if model.is_thermal() {
        table.meta("temperature", p.temperature);
    }
    if model.is_incoherent() {
        table
            .meta("intensity", p.intensity)
            .meta("mean_photons", p.mean_photons);
    } else {
        table.meta("rabi", p.rabi).meta(
            "detuning",
            match p.detuning {
                Detuning::ResonantWithBrightest => "resonant-with-brightest".to_string(),
                Detuning::Fixed(d) => format!("{d} Gamma0"),
            },
        );
    }
    table.meta("version", VERSION);
}

/// Evaluates the configured model over a 1-D or 2-D grid.
///
/// Numerical failures in individual cells are recorded as divergent entries;
/// invalid parameters abort the sweep.
pub fn sweep(config: &SweepConfig) -> Result<SweepTable> {
    let axes: Vec<&AxisSpec> = std::iter::once(&config.axis1)
        .chain(config.axis2.as_ref())
        .collect();
    for a in &axes {
        a.check().map_err(Error::Domain)?;
    }
    let grids: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let inner = grids.get(1).map_or(1, Vec::len);
    let count = grids[0].len() * inner;
    let structural = axes.iter().any(|a| a.variable.is_structural());
    let shared = if structural {
        None
    } else {
        Some(prepare(config.model, &config.base)?)
    };

    let cell_params = |k: usize| {
        let mut p = config.base;
        let (i, j) = (k / inner, k % inner);
        axes[0].variable.apply(&mut p, grids[0][i]);
        if let Some(a2) = axes.get(1) {
            a2.variable.apply(&mut p, grids[1][j]);
        }
        p
    };
    let results: Vec<Result<f64>> = run_indexed(count, config.threads, |k| {
        let p = cell_params(k);
        match &shared {
            Some(ctx) => evaluate_in(config.model, config.quantity, &p, ctx),
            None => prepare(config.model, &p)
                .and_then(|ctx| evaluate_in(config.model, config.quantity, &p, &ctx)),
        }
        .map(|r| r.value)
    });

    let names: Vec<&str> = axes.iter().map(|a| a.variable.name()).collect();
    let mut table = SweepTable::new(
        &config.name,
        &names,
        config.quantity.column(),
        value_kind(config.model, config.quantity),
    );
    describe(&mut table, config.model, config.quantity, &config.base);
    for a in &axes {
        table.meta("axis", a);
    }
    for (k, r) in results.into_iter().enumerate() {
        let (i, j) = (k / inner, k % inner);
        let mut keys = vec![grids[0][i]];
        if axes.len() > 1 {
            keys.push(grids[1][j]);
        }
        let cell = match r {
            Ok(v) => Cell::Value(v),
            Err(e @ Error::InvalidParameter(_)) => return Err(e),
            Err(e) => Cell::Divergent(e.to_string()),
        };
        table.push(keys, cell);
    }
    if let Some(a2) = axes.get(1) {
        table.grid = Some((axes[0].axis(), a2.axis()));
    }
    Ok(table)
}

/// Search box and resolution for [`maximize_sigma`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeConfig {
    pub model: Model,
    pub base: PointParams,
    /// Γ_T range, relative to the bright-mode radiative rate.
    pub gamma_t_bounds: (f64, f64),
    /// Γ_D or Γ_B^th range, relative to the bright-mode radiative rate.
    pub dephasing_bounds: (f64, f64),
    /// Points per axis of the initial log grid.
    pub coarse_points: usize,
    pub threads: Option<usize>,
}

impl MaximizeConfig {
    pub fn new(model: Model, base: PointParams) -> Self {
        Self {
            model,
            base,
            gamma_t_bounds: (1e-3, 1e3),
            dephasing_bounds: (1e-6, 1e2),
            coarse_points: 13,
            threads: None,
        }
    }
}

/// Smallest pattern-search step, in decades.
const MIN_STEP: f64 = 1e-4;
/// Relative move along Γ_T + Γ_deph = const used to probe for a ridge.
const RIDGE_PROBE: f64 = 0.05;
const RIDGE_TOL: f64 = 1e-9;

/// Maximizes σ_abs/σ over Γ_T and the dephasing rate.
///
/// A coarse log grid is scanned first; the best cell seeds a compass pattern
/// search in log space whose step halves whenever no neighbour improves.
pub fn maximize_sigma(config: &MaximizeConfig) -> Result<OptimumReport> {
    let (t_lo, t_hi) = config.gamma_t_bounds;
    let (d_lo, d_hi) = config.dephasing_bounds;
    if !(t_lo > 0.0
        && t_lo < t_hi
        && d_lo > 0.0
        && d_lo < d_hi
        && t_hi.is_finite()
        && d_hi.is_finite())
    {
        return Err(Error::Domain(
            "optimizer bounds must be finite, positive and ordered".into(),
        ));
    }
    if config.coarse_points < 2 {
        return Err(Error::Domain(
            "optimizer needs at least two coarse points per axis".into(),
        ));
    }
    let ctx = prepare(config.model, &config.base)?;
    let lo = [t_lo.log10(), d_lo.log10()];
    let hi = [t_hi.log10(), d_hi.log10()];
    let objective = |u: [f64; 2]| -> f64 {
        let mut p = config.base;
        p.gamma_t = RateSpec::PerBright(10f64.powf(u[0]));
        p.dephasing = RateSpec::PerBright(10f64.powf(u[1]));
        match evaluate_in(config.model, Quantity::Absorption, &p, &ctx) {
            Ok(r) if r.value.is_finite() => r.value,
            _ => f64::NEG_INFINITY,
        }
    };

    let k = config.coarse_points;
    let coord =
        |axis: usize, i: usize| lo[axis] + (hi[axis] - lo[axis]) * i as f64 / (k - 1) as f64;
    let scan = run_indexed(k * k, config.threads, |idx| {
        let u = [coord(0, idx / k), coord(1, idx % k)];
        (u, objective(u))
    });
    let (mut best_u, mut best) =
        scan.iter()
            .fold(([lo[0], lo[1]], f64::NEG_INFINITY), |acc, &(u, v)| {
                if v > acc.1 {
                    (u, v)
                } else {
                    acc
                }
            });
    if !best.is_finite() {
        return Err(Error::Domain(
            "no admissible point in the search box".into(),
        ));
    }

    let mut step = [
        (hi[0] - lo[0]) / (k - 1) as f64,
        (hi[1] - lo[1]) / (k - 1) as f64,
    ];
    while step[0].max(step[1]) >= MIN_STEP {
        let mut moved = false;
        for (axis, sign) in [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)] {
            let mut u = best_u;
            u[axis] = (u[axis] + sign * step[axis]).clamp(lo[axis], hi[axis]);
            if u == best_u {
                continue;
            }
            let v = objective(u);
            if v > best {
                best = v;
                best_u = u;
                moved = true;
                break;
            }
        }
        if !moved {
            step[0] *= 0.5;
            step[1] *= 0.5;
        }
    }

    let bright = ctx.bright_rate();
    let boundary = (0..2).any(|a| best_u[a] <= lo[a] + 1e-12 || best_u[a] >= hi[a] - 1e-12);
    let (t, d) = (10f64.powf(best_u[0]), 10f64.powf(best_u[1]));
    let ridge = |dt: f64| {
        let (t2, d2) = (t * (1.0 + dt), d - t * dt);
        if d2 <= 0.0 || t2 <= 0.0 {
            return false;
        }
        let v = objective([t2.log10(), d2.log10()]);
        (v - best).abs() <= RIDGE_TOL * best
    };
    let degenerate = ridge(RIDGE_PROBE) || ridge(-RIDGE_PROBE);
    let dn = config.model.dephasing_name();
    Ok(OptimumReport {
        argmax: vec![
            ("gamma_t".to_string(), t * bright),
            (dn.to_string(), d * bright),
            ("gamma_t_norm".to_string(), t),
            (format!("{dn}_norm"), d),
        ],
        value: best,
        method: OptimumMethod::GridRefine,
        boundary,
        degenerate,
    })
}

/// Spin-wave spectrum of a ring as a table keyed by the mode label.
pub fn mode_table(n: usize, spacing: f64, dicke: bool) -> Result<Vec<SweepTable>> {
    let geometry = RingGeometry::new(n, spacing)?;
    let (spectrum, drive) = if dicke {
        (spectrum_dicke(n, spacing), DriveProjection::uniform(n, 1.0))
    } else {
        let c = coupling_matrices(&geometry)?;
        (
            spectrum_finite(&geometry, &c)?,
            project_drive(&geometry, 1.0),
        )
    };
    let mut out = Vec::new();
    for (name, column, values) in [
        ("modes_shift", "shift", &spectrum.shifts),
        ("modes_rate", "rate", &spectrum.rates),
    ] {
        let mut t = SweepTable::new(name, &["m"], column, ValueKind::Other);
        t.meta("n_emitters", n)
            .meta("spacing", format!("{spacing} lambda0"))
            .meta("regime", if dicke { "dicke-ideal" } else { "finite-size" })
            .meta("bright_mode", spectrum.bright_index)
            .meta("version", VERSION);
        for (m, v) in spectrum.indices.iter().zip(values.iter()) {
            t.push(vec![*m as f64], Cell::Value(*v));
        }
        out.push(t);
    }
    let mut t = SweepTable::new("modes_drive", &["m"], "drive_weight", ValueKind::Other);
    t.meta("n_emitters", n)
        .meta("spacing", format!("{spacing} lambda0"))
        .meta("normalization", "|Omega_m|^2 / |Omega_0|^2")
        .meta("version", VERSION);
    for (m, a) in spectrum.indices.iter().zip(&drive.amplitudes) {
        t.push(vec![*m as f64], Cell::Value(a.norm_sqr()));
    }
    out.push(t);
    Ok(out)
}

pub const FIGURES: [&str; 16] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3", "fig4a", "fig4b", "fig5", "fig6",
    "fig7", "fig8a", "fig8b", "fig9", "all",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    /// Points per axis of 2-D heatmap grids.
    pub points: usize,
    pub threads: Option<usize>,
    /// Γ_T/NΓ₀ and Γ_B^th/NΓ₀ held fixed in the (N, βJ) map.
    pub fig3_rates: (f64, f64),
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            points: 101,
            threads: None,
            fig3_rates: (0.6, 0.05),
        }
    }
}

/// Decades spanned by the normalized rate axes of the heatmaps.
pub const HEATMAP_RANGE: (f64, f64) = (1e-3, 1e2);

fn heatmap(
    name: &str,
    model: Model,
    quantity: Quantity,
    base: PointParams,
    x: Variable,
    y: Variable,
    opts: &FigureOptions,
) -> Result<SweepTable> {
    sweep(&SweepConfig {
        name: name.to_string(),
        model,
        quantity,
        base,
        axis1: AxisSpec::log(x, HEATMAP_RANGE.0, HEATMAP_RANGE.1, opts.points),
        axis2: Some(AxisSpec::log(
            y,
            HEATMAP_RANGE.0,
            HEATMAP_RANGE.1,
            opts.points,
        )),
        threads: opts.threads,
    })
}

fn dicke(n: usize) -> PointParams {
    PointParams {
        n_emitters: n,
        ..PointParams::default()
    }
}

fn thermal_dicke(n: usize, beta_j: f64) -> PointParams {
    PointParams {
        temperature: Temperature::BetaJ(beta_j),
        ..dicke(n)
    }
}

/// Optimal Γ_D/NΓ₀ along the Γ_T/NΓ₀ axis of a local-dephasing heatmap.
fn optimum_curve(name: &str, n: usize, opts: &FigureOptions) -> Result<SweepTable> {
    let axis = AxisSpec::log(
        Variable::GammaTNorm,
        HEATMAP_RANGE.0,
        HEATMAP_RANGE.1,
        opts.points,
    );
    let mut t = SweepTable::new(
        name,
        &["gamma_t_norm"],
        "gamma_d_norm_opt",
        ValueKind::Other,
    );
    t.meta("model", Model::DickeLocal)
        .meta("n_emitters", n)
        .meta("method", "closed form")
        .meta("version", VERSION);
    let ng = n as f64 * GAMMA0;
    for x in axis.values() {
        let r = optimal_local_dephasing(n, x * ng)?;
        t.push(vec![x], Cell::Value(r.param("gamma_d").unwrap_or(0.0) / ng));
    }
    Ok(t)
}

fn fig5(opts: &FigureOptions) -> Result<Vec<SweepTable>> {
    let base = PointParams {
        n_emitters: 300,
        spacing: FIG5_SPACING,
        gamma_t: RateSpec::Absolute(1e-4),
        dephasing: RateSpec::BathSlope(1e-7),
        temperature: Temperature::BetaJ(3.0),
        ..PointParams::default()
    };
    let scaling = sweep(&SweepConfig {
        name: "fig5".into(),
        model: Model::DickeThermal,
        quantity: Quantity::IndependentRatio,
        base,
        axis1: AxisSpec::linear(Variable::NEmitters, 2.0, 300.0, 299),
        axis2: None,
        threads: opts.threads,
    })?;
    let inset = sweep(&SweepConfig {
        name: "fig5_inset".into(),
        model: Model::DickeThermal,
        quantity: Quantity::IndependentRatio,
        base,
        axis1: AxisSpec::log(Variable::BetaJ, 1e-1, 1e2, 31),
        axis2: None,
        threads: opts.threads,
    })?;
    let fbar_j = 1e-7 * dicke_coupling(FIG5_SPACING);
    let mut asymptote = SweepTable::new(
        "fig5_asymptote",
        &["gamma_t"],
        "ratio_limit",
        ValueKind::Ratio,
    );
    asymptote
        .meta("fbar", 1e-7)
        .meta("spacing", format!("{FIG5_SPACING} lambda0"))
        .meta("fbar_j", fbar_j)
        .meta("version", VERSION);
    asymptote.push(vec![1e-4], Cell::Value(zero_t_ratio_limit(1e-4, fbar_j)));
    Ok(vec![scaling, inset, asymptote])
}

fn fig6(opts: &FigureOptions) -> Result<Vec<SweepTable>> {
    let mut out = Vec::new();
    for beta in [0.01, 10.0] {
        for d in [0.1, 0.2, 0.35] {
            let base = PointParams {
                spacing: d,
                temperature: Temperature::BetaGamma0(beta),
                ..dicke(10)
            };
            out.push(heatmap(
                &format!("fig6_d{d}_bg{beta}"),
                Model::FiniteThermal,
                Quantity::Absorption,
                base,
                Variable::GammaTNorm,
                Variable::GammaBthNorm,
                opts,
            )?);
        }
    }
    Ok(out)
}

/// Spacings scanned by the optimized-absorption figure.
pub fn fig7_spacings() -> Vec<f64> {
    (0..=78).map(|i| 0.05 + 0.025 * i as f64).collect()
}

pub const FIG7_SERIES: [(usize, f64); 4] = [(10, 0.01), (20, 0.01), (50, 0.01), (10, 10.0)];

fn fig7(opts: &FigureOptions) -> Result<Vec<SweepTable>> {
    let spacings = fig7_spacings();
    let jobs: Vec<(usize, f64, f64)> = FIG7_SERIES
        .iter()
        .flat_map(|&(n, b)| spacings.iter().map(move |&d| (n, b, d)))
        .collect();
    let results = run_indexed(jobs.len(), opts.threads, |k| {
        let (n, beta, d) = jobs[k];
        let base = PointParams {
            n_emitters: n,
            spacing: d,
            temperature: Temperature::BetaGamma0(beta),
            ..PointParams::default()
        };
        let mut cfg = MaximizeConfig::new(Model::FiniteThermal, base);
        cfg.threads = Some(1);
        maximize_sigma(&cfg)
    });
    let mut t = SweepTable::new(
        "fig7",
        &["d_over_lambda", "n_emitters", "beta_gamma0"],
        "sigma_max_norm",
        ValueKind::Other,
    );
    t.meta("model", Model::FiniteThermal)
        .meta(
            "quantity",
            "4 sigma_abs / (N sigma), maximized over gamma_t and gamma_bth",
        )
        .meta("gamma_t_norm_bounds", "1e-3..1e3")
        .meta("gamma_bth_norm_bounds", "1e-6..1e2")
        .meta("version", VERSION);
    for ((n, beta, d), r) in jobs.into_iter().zip(results) {
        let cell = match r {
            Ok(rep) => Cell::Value(4.0 * rep.value / n as f64),
            Err(e @ Error::InvalidParameter(_)) => return Err(e),
            Err(e) => Cell::Divergent(e.to_string()),
        };
        t.push(vec![d, n as f64, beta], cell);
    }
    Ok(vec![t])
}

fn fig9(opts: &FigureOptions) -> Result<Vec<SweepTable>> {
    let axis = AxisSpec::log(Variable::Spacing, 1e-2, 50.0, 201);
    let ds = axis.values();
    let ns = [10usize, 20, 50];
    let jobs: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| ds.iter().map(move |&d| (n, d)))
        .collect();
    let rates = run_indexed(jobs.len(), opts.threads, |k| {
        let (n, d) = jobs[k];
        let g = RingGeometry::new(n, d)?;
        spectrum_finite(&g, &coupling_matrices(&g)?).map(|s| s.bright_rate())
    });
    let mut t = SweepTable::new(
        "fig9",
        &["n_emitters", "d_over_lambda"],
        "bright_rate",
        ValueKind::Other,
    );
    t.meta("quantity", "radiative rate of the brightest mode in Gamma0")
        .meta("version", VERSION);
    for ((n, d), r) in jobs.into_iter().zip(rates) {
        t.push(vec![n as f64, d], Cell::Value(r?));
    }
    Ok(vec![t])
}

/// Tables reproducing one named figure (or all of them for `"all"`).
pub fn figure(name: &str, opts: &FigureOptions) -> Result<Vec<SweepTable>> {
    let local = |n: usize, q: Quantity, tag: &str| {
        heatmap(
            tag,
            Model::DickeLocal,
            q,
            dicke(n),
            Variable::GammaTNorm,
            Variable::GammaDNorm,
            opts,
        )
    };
    let thermal = |beta_j: f64, q: Quantity, tag: &str| {
        heatmap(
            tag,
            Model::DickeThermal,
            q,
            thermal_dicke(10, beta_j),
            Variable::GammaTNorm,
            Variable::GammaBthNorm,
            opts,
        )
    };
    match name {
        "fig2a" => Ok(vec![heatmap(
            "fig2a",
            Model::SingleAtom,
            Quantity::Absorption,
            dicke(1),
            Variable::GammaT,
            Variable::GammaD,
            opts,
        )?]),
        "fig2b" => Ok(vec![
            local(10, Quantity::Absorption, "fig2b")?,
            optimum_curve("fig2b_optimum", 10, opts)?,
        ]),
        "fig2c" => Ok(vec![
            local(50, Quantity::Absorption, "fig2c")?,
            optimum_curve("fig2c_optimum", 50, opts)?,
        ]),
        "fig2d" => Ok(vec![thermal(1e-2, Quantity::Absorption, "fig2d")?]),
        "fig2e" => Ok(vec![thermal(1.0, Quantity::Absorption, "fig2e")?]),
        "fig2f" => Ok(vec![thermal(1e2, Quantity::Absorption, "fig2f")?]),
        "fig3" => {
            let (t, b) = opts.fig3_rates;
            let base = PointParams {
                gamma_t: RateSpec::PerBright(t),
                dephasing: RateSpec::PerBright(b),
                temperature: Temperature::BetaJ(1.0),
                ..dicke(10)
            };
            let mut table = sweep(&SweepConfig {
                name: "fig3".into(),
                model: Model::DickeThermal,
                quantity: Quantity::Absorption,
                base,
                axis1: AxisSpec::linear(Variable::NEmitters, 2.0, 100.0, 99),
                axis2: Some(AxisSpec::log(Variable::BetaJ, 1e-2, 1e2, opts.points)),
                threads: opts.threads,
            })?;
            table.meta("note", "gamma_t_norm and gamma_bth_norm are overridable");
            Ok(vec![table])
        }
        "fig4a" => Ok(vec![local(10, Quantity::IndependentRatio, "fig4a")?]),
        "fig4b" => Ok(vec![thermal(1.0, Quantity::IndependentRatio, "fig4b")?]),
        "fig5" => fig5(opts),
        "fig6" => fig6(opts),
        "fig7" => fig7(opts),
        "fig8a" => Ok(vec![heatmap(
            "fig8a",
            Model::IncoherentLocal,
            Quantity::Absorption,
            dicke(10),
            Variable::GammaTNorm,
            Variable::GammaDNorm,
            opts,
        )?]),
        "fig8b" => Ok(vec![heatmap(
            "fig8b",
            Model::IncoherentThermal,
            Quantity::Absorption,
            dicke(10),
            Variable::GammaTNorm,
            Variable::GammaBthNorm,
            opts,
        )?]),
        "fig9" => fig9(opts),
        "all" => {
            let mut out = Vec::new();
            for f in FIGURES.iter().filter(|f| **f != "all") {
                out.extend(figure(f, opts)?);
            }
            Ok(out)
        }
        other => Err(Error::Domain(format!(
            "unknown figure '{other}' (expected one of {})",
            FIGURES.join(", ")
        ))),
    }
}
