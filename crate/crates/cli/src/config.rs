//! JSON run configuration. Every block rejects unknown keys.

use std::collections::BTreeMap;
use std::path::Path;

use beltrami_growth::{
    growth, mappings, CircleQuadrature, CoefficientField, Cplx, FieldKind, GridTable, KappaProfile,
    MappingSpec, PlanePoint, RadialTable, RadiusLadder,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog pair shorthand, e.g. `"power:alpha=2"`, `"spiral"`, `"extremal"`.
    pub pair: Option<String>,
    pub mapping: Option<MappingConfig>,
    pub coefficient: Option<CoefficientConfig>,
    pub profile: Option<ProfileConfig>,
    /// `[x, y]`; defaults to the origin.
    pub center: Option<[f64; 2]>,
    pub quadrature_n: Option<usize>,
    pub ladder: Option<LadderConfig>,
    pub radii: Option<Vec<f64>>,
    /// Finite-difference step; analytic derivatives when absent.
    pub h: Option<f64>,
    pub region: Option<RegionConfig>,
    pub r0: Option<f64>,
    pub rho0: Option<f64>,
    pub r_max: Option<f64>,
    pub knots: Option<usize>,
    pub example: Option<ExampleConfig>,
    /// `[[R, M(R)], ...]`.
    pub observed: Option<Vec<[f64; 2]>>,
    /// CSV with header `R,M`; alternative to `observed`.
    pub observed_csv: Option<String>,
    /// File name stem for every output; defaults to the command name.
    pub output_prefix: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MappingConfig {
    Identity,
    Linear { a: [f64; 2], b: [f64; 2], #[serde(default)] c: [f64; 2] },
    Spiral,
    Power { alpha: f64 },
    Loglog { alpha: f64 },
    /// Knots inline or an `r,rho` CSV.
    RadialTable {
        #[serde(default)]
        knots: Vec<f64>,
        #[serde(default)]
        rho: Vec<f64>,
        path: Option<String>,
        center: Option<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientConfig {
    Zero,
    Linear { a: [f64; 2], b: [f64; 2] },
    Spiral,
    Power { alpha: f64 },
    Loglog { alpha: f64 },
    Radial { profile: Box<ProfileConfig> },
    /// `r,theta,k2` CSV on a full lattice.
    Grid { path: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant { alpha: f64 },
    LogProduct { alpha: f64, n: u32 },
    Piecewise { breakpoints: Vec<f64>, pieces: Vec<ProfileConfig> },
    /// `1` below `e^e`, `α ln r ln ln r` above.
    LoglogExample { alpha: f64 },
    Table { r: Vec<f64>, kappa: Vec<f64> },
    FromCoefficient { coefficient: Box<CoefficientConfig> },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub r0: f64,
    pub factor: Option<f64>,
    pub count: Option<usize>,
    /// When given, the ladder spans `[r0, r_max]` in `count` steps and `factor` must be absent.
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub r_lo: f64,
    pub r_hi: f64,
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExampleConfig {
    Power { alpha: f64 },
    Loglog { alpha: f64 },
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Library validation errors are configuration errors at this layer.
fn cfg<T>(r: beltrami_growth::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn cplx(v: [f64; 2]) -> Cplx<f64> {
    Cplx::new(v[0], v[1])
}

fn point(v: [f64; 2]) -> Result<PlanePoint, CliError> {
    cfg(PlanePoint::new(v[0], v[1]))
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))
    }

    pub fn center(&self) -> Result<PlanePoint, CliError> {
        self.center.map_or(Ok(PlanePoint::origin()), point)
    }

    pub fn quadrature(&self) -> Result<CircleQuadrature, CliError> {
        self.quadrature_n.map_or(Ok(CircleQuadrature::default()), |n| cfg(CircleQuadrature::new(n)))
    }

    pub fn require_profile(&self) -> Result<KappaProfile, CliError> {
        self.profile.as_ref().ok_or_else(|| bad("missing `profile`"))?.build(self)
    }

    pub fn require_coefficient(&self) -> Result<CoefficientField, CliError> {
        let c = self.coefficient.as_ref().ok_or_else(|| bad("missing `coefficient`"))?;
        cfg(CoefficientField::new(c.build(self)?, self.center()?))
    }

    pub fn require(&self, v: Option<f64>, name: &str) -> Result<f64, CliError> {
        let v = v.ok_or_else(|| bad(format!("missing `{name}`")))?;
        if !v.is_finite() {
            return Err(bad(format!("`{name}` must be finite")));
        }
        Ok(v)
    }

    pub fn ladder_or(&self, default: Option<LadderConfig>) -> Result<RadiusLadder, CliError> {
        let l = self.ladder.or(default).ok_or_else(|| bad("missing `ladder`"))?;
        let count = l.count.unwrap_or(RadiusLadder::DEFAULT_COUNT);
        match (l.r_max, l.factor) {
            (Some(_), Some(_)) => Err(bad("ladder takes either `factor` or `r_max`, not both")),
            (Some(r_max), None) => cfg(RadiusLadder::spanning(l.r0, r_max, count)),
            (None, f) => cfg(RadiusLadder::new(l.r0, f.unwrap_or(RadiusLadder::DEFAULT_FACTOR), count)),
        }
    }

    pub fn observed(&self) -> Result<Vec<(f64, f64)>, CliError> {
        match (&self.observed, &self.observed_csv) {
            (Some(_), Some(_)) => Err(bad("give either `observed` or `observed_csv`")),
            (Some(obs), None) => Ok(obs.iter().map(|p| (p[0], p[1])).collect()),
            (None, Some(path)) => read_observed_csv(Path::new(path)),
            (None, None) => Err(bad("missing `observed`")),
        }
    }
}

fn read_observed_csv(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("R,M") {
        return Err(bad(format!("{}: expected header `R,M`", path.display())));
    }
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or_else(|| bad(format!("malformed row `{l}`")))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("malformed number `{s}`")));
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

impl MappingConfig {
    pub fn build(&self) -> Result<MappingSpec, CliError> {
        match self {
            Self::Identity => Ok(MappingSpec::Identity),
            Self::Linear { a, b, c } => cfg(MappingSpec::linear(cplx(*a), cplx(*b), cplx(*c))),
            Self::Spiral => Ok(MappingSpec::Spiral),
            Self::Power { alpha } => cfg(MappingSpec::power(*alpha)),
            Self::Loglog { alpha } => cfg(MappingSpec::loglog(*alpha)),
            Self::RadialTable { knots, rho, path, center } => {
                let center = center.map_or(Ok(PlanePoint::origin()), point)?;
                let (knots, rho) = match path {
                    Some(p) if knots.is_empty() && rho.is_empty() => read_rho_csv(Path::new(p))?,
                    Some(_) => return Err(bad("radial_table takes either `path` or inline knots")),
                    None => (knots.clone(), rho.clone()),
                };
                Ok(MappingSpec::RadialTable(cfg(RadialTable::new(knots, rho, center))?))
            }
        }
    }
}

fn read_rho_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("r,rho") {
        return Err(bad(format!("{}: expected header `r,rho`", path.display())));
    }
    let mut r = Vec::new();
    let mut rho = Vec::new();
    for l in lines {
        let (a, b) = l.split_once(',').ok_or_else(|| bad(format!("malformed row `{l}`")))?;
        r.push(a.trim().parse().map_err(|_| bad(format!("malformed number `{a}`")))?);
        rho.push(b.trim().parse().map_err(|_| bad(format!("malformed number `{b}`")))?);
    }
    Ok((r, rho))
}

impl CoefficientConfig {
    pub fn build(&self, run: &RunConfig) -> Result<FieldKind, CliError> {
        let positive = |alpha: f64| {
            if alpha > 0.0 && alpha.is_finite() {
                Ok(alpha)
            } else {
                Err(bad(format!("alpha must be positive, got {alpha}")))
            }
        };
        Ok(match self {
            Self::Zero => FieldKind::Zero,
            Self::Linear { a, b } => FieldKind::Linear { a: cplx(*a), b: cplx(*b) },
            Self::Spiral => FieldKind::Spiral,
            Self::Power { alpha } => FieldKind::Power { alpha: positive(*alpha)? },
            Self::Loglog { alpha } => FieldKind::LogLog { alpha: positive(*alpha)? },
            Self::Radial { profile } => FieldKind::Radial(Box::new(profile.build(run)?)),
            Self::Grid { path } => FieldKind::Grid(cfg(GridTable::from_csv_path(path))?),
        })
    }
}

impl ProfileConfig {
    pub fn build(&self, run: &RunConfig) -> Result<KappaProfile, CliError> {
        match self {
            Self::Constant { alpha } => cfg(KappaProfile::constant(*alpha)),
            Self::LogProduct { alpha, n } => cfg(KappaProfile::log_product(*alpha, *n)),
            Self::Piecewise { breakpoints, pieces } => {
                let pieces = pieces.iter().map(|p| p.build(run)).collect::<Result<_, _>>()?;
                cfg(KappaProfile::piecewise(breakpoints.clone(), pieces))
            }
            Self::LoglogExample { alpha } => cfg(KappaProfile::loglog_example(*alpha)),
            Self::Table { r, kappa } => cfg(KappaProfile::table(r.clone(), kappa.clone())),
            Self::FromCoefficient { coefficient } => {
                let field = cfg(CoefficientField::new(coefficient.build(run)?, run.center()?))?;
                Ok(KappaProfile::from_field(field, run.quadrature()?))
            }
        }
    }
}

/// A mapping together with the coefficient it is claimed to solve.
#[derive(Debug, Clone)]
pub struct SolutionPair {
    pub name: String,
    pub mapping: MappingSpec,
    pub coefficient: CoefficientField,
    /// Inner radius of the map's domain about the center (extremal tables).
    pub r_min: f64,
    pub r_max: f64,
}

/// `name` or `name:key=value,key=value`; `α` is accepted for `alpha`.
pub fn parse_pair_shorthand(s: &str) -> Result<(String, BTreeMap<String, f64>), CliError> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("malformed pair parameter `{kv}`")))?;
        let k = match k.trim() {
            "α" => "alpha",
            other => other,
        };
        let v: f64 = v.trim().parse().map_err(|_| bad(format!("malformed number in `{kv}`")))?;
        if params.insert(k.to_string(), v).is_some() {
            return Err(bad(format!("duplicate pair parameter `{k}`")));
        }
    }
    Ok((name.trim().to_string(), params))
}

impl RunConfig {
    /// The solution pair to verify: either a `pair` shorthand or explicit
    /// `mapping` + `coefficient` blocks.
    pub fn solution_pair(&self) -> Result<SolutionPair, CliError> {
        let z0 = self.center()?;
        match (&self.pair, &self.mapping) {
            (Some(_), Some(_)) => Err(bad("give either `pair` or `mapping`, not both")),
            (None, None) => Err(bad("missing `pair` (or `mapping` + `coefficient`)")),
            (None, Some(m)) => {
                let mapping = m.build()?;
                let (r_min, r_max) = match &mapping {
                    MappingSpec::RadialTable(t) => (t.r_min(), t.r_max()),
                    _ => (0.0, f64::INFINITY),
                };
                Ok(SolutionPair { name: "custom".into(), mapping, coefficient: self.require_coefficient()?, r_min, r_max })
            }
            (Some(s), None) => {
                if self.coefficient.is_some() {
                    return Err(bad("`pair` already fixes the coefficient"));
                }
                let (name, params) = parse_pair_shorthand(s)?;
                let alpha = || -> Result<f64, CliError> {
                    params.get("alpha").copied().ok_or_else(|| bad(format!("pair `{name}` needs alpha")))
                };
                let allow = |keys: &[&str]| -> Result<(), CliError> {
                    match params.keys().find(|k| !keys.contains(&k.as_str())) {
                        Some(k) => Err(bad(format!("pair `{name}` does not take `{k}`"))),
                        None => Ok(()),
                    }
                };
                let field = |kind| cfg(CoefficientField::new(kind, z0));
                let whole = |mapping, coefficient| SolutionPair {
                    name: s.clone(),
                    mapping,
                    coefficient,
                    r_min: 0.0,
                    r_max: f64::INFINITY,
                };
                if name != "linear" && name != "extremal" && z0 != PlanePoint::origin() {
                    return Err(bad(format!("pair `{name}` is centered at the origin")));
                }
                match name.as_str() {
                    "identity" => {
                        allow(&[])?;
                        Ok(whole(MappingSpec::Identity, field(FieldKind::Power { alpha: 1.0 })?))
                    }
                    "spiral" => {
                        allow(&[])?;
                        Ok(whole(MappingSpec::Spiral, field(FieldKind::Spiral)?))
                    }
                    "power" => {
                        allow(&["alpha"])?;
                        let a = alpha()?;
                        Ok(whole(cfg(MappingSpec::power(a))?, field(FieldKind::Power { alpha: a })?))
                    }
                    "loglog" => {
                        allow(&["alpha"])?;
                        let a = alpha()?;
                        Ok(whole(cfg(MappingSpec::loglog(a))?, field(FieldKind::LogLog { alpha: a })?))
                    }
                    "linear" => {
                        allow(&["a", "b", "c"])?;
                        let get = |k: &str, d: f64| Cplx::new(params.get(k).copied().unwrap_or(d), 0.0);
                        let (a, b, c) = (get("a", 0.5), get("b", 1.0), get("c", 0.0));
                        Ok(whole(cfg(MappingSpec::linear(a, b, c))?, field(FieldKind::Linear { a, b })?))
                    }
                    "extremal" => {
                        allow(&[])?;
                        let sol = self.extremal()?;
                        Ok(SolutionPair {
                            name: s.clone(),
                            mapping: sol.mapping(),
                            coefficient: sol.coefficient(),
                            r_min: sol.r0(),
                            r_max: sol.r_max(),
                        })
                    }
                    other => Err(bad(format!("unknown pair `{other}`"))),
                }
            }
        }
    }

    pub fn extremal(&self) -> Result<beltrami_growth::ExtremalSolution, CliError> {
        let profile = self.require_profile()?;
        let r0 = self.require(self.r0, "r0")?;
        let rho0 = self.rho0.unwrap_or(1.0);
        let r_max = self.require(self.r_max, "r_max")?;
        let knots = self.knots.unwrap_or(beltrami_growth::verify::MIN_EXTREMAL_KNOTS);
        if knots < beltrami_growth::verify::MIN_EXTREMAL_KNOTS {
            return Err(bad(format!("`knots` must be at least {}", beltrami_growth::verify::MIN_EXTREMAL_KNOTS)));
        }
        if !(r0 > 0.0 && r_max > r0 && rho0 > 0.0) {
            return Err(bad("extremal needs 0 < r0 < r_max and rho0 > 0"));
        }
        beltrami_growth::verify::build_extremal_at(profile, r0, rho0, r_max, knots, self.center()?)
            .map_err(CliError::Numeric)
    }
}

/// Index of the closed-form branch a radius falls in (`0` inner, `1` outer) for
/// coefficients with a jump radius; `0` otherwise.
pub fn piece_index(field: &CoefficientField, r: f64) -> usize {
    match &field.kind {
        FieldKind::LogLog { .. } => usize::from(r >= mappings::seam_radius::<f64>()),
        FieldKind::Radial(p) => match p.as_ref() {
            growth::KappaProfile::Piecewise { breakpoints, .. } => breakpoints.iter().take_while(|b| **b <= r).count(),
            _ => 0,
        },
        _ => 0,
    }
}
