use beltrami_growth::dilatation::kappa;
use beltrami_growth::format::g17;
use beltrami_growth::growth::{
    area_bound_check, differential_inequality_at, envelope_integral, isoperimetric_check, nonexistence_diagnostic,
    theorem1_check, Verdict,
};
use beltrami_growth::verify::{pde_residual, sharpness_ladder, ResidualReport};
use beltrami_growth::{Annulus, DerivativeMode, MappingSpec, SharpnessExample};

use crate::config::{piece_index, ExampleConfig, LadderConfig, RunConfig, SolutionPair};
use crate::svg::loglog_polyline;
use crate::{CliError, Output, Status};

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn num<T>(r: beltrami_growth::Result<T>) -> Result<T, CliError> {
    r.map_err(CliError::Numeric)
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `r,kappa,piece` for each configured radius; at a jump radius the outer piece is reported.
pub fn cmd_kappa(cfg: &RunConfig) -> Result<Output, CliError> {
    let field = cfg.require_coefficient()?;
    let radii = cfg.radii.as_ref().ok_or_else(|| bad("missing `radii`"))?;
    if radii.is_empty() {
        return Err(bad("`radii` is empty"));
    }
    if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(bad("`radii` must be positive and finite"));
    }
    let q = cfg.quadrature()?;
    let jumps = field.radial_breakpoints();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        // A radius typed as the decimal of a jump radius is read as the jump itself.
        let r = jumps.iter().copied().find(|b| (r - b).abs() <= 4.0 * f64::EPSILON * b).unwrap_or(r);
        let k = num(kappa(&field, r, q))?;
        rows.push(vec![g17(r), g17(k), piece_index(&field, r).to_string()]);
    }
    let mut out = Output::new(cfg, "kappa");
    out.file("csv", csv("r,kappa,piece", rows));
    out.line(format!("kappa at {} radii", radii.len()));
    Ok(out)
}

/// `R,I,envelope` along the ladder, from the ladder's first radius (or `r0`).
pub fn cmd_envelope(cfg: &RunConfig, plot: bool) -> Result<Output, CliError> {
    let profile = cfg.require_profile()?;
    let ladder = cfg.ladder_or(None)?;
    let r0 = cfg.r0.unwrap_or(ladder.r0());
    let radii: Vec<f64> = ladder.radii().into_iter().filter(|r| *r >= r0).collect();
    let mut rows = Vec::with_capacity(radii.len());
    let mut points = Vec::with_capacity(radii.len());
    let (mut prev, mut integral) = (r0, 0.0);
    for r in radii {
        integral += num(envelope_integral(&profile, prev, r))?.integral;
        prev = r;
        let env = integral.exp();
        rows.push(vec![g17(r), g17(integral), g17(env)]);
        points.push((r, env));
    }
    let mut out = Output::new(cfg, "envelope");
    out.file("csv", csv("R,I,envelope", rows));
    if plot {
        out.file("svg", loglog_polyline("growth envelope", "R", "envelope", &points));
    }
    if let Some(&(r, env)) = points.last() {
        out.line(format!("envelope at R = {}: {}", g17(r), g17(env)));
    }
    Ok(out)
}

/// Relative residual tolerance (in units of `|f_z|`) for closed-form pairs.
pub const RESIDUAL_TOL_CLOSED_FORM: f64 = 1e-8;
/// Relative residual tolerance for tabulated maps and finite differences.
pub const RESIDUAL_TOL_TABULATED: f64 = 1e-4;

fn default_ladder(pair: &SolutionPair) -> LadderConfig {
    if pair.r_max.is_finite() {
        LadderConfig { r0: pair.r_min, factor: None, count: Some(10), r_max: Some(pair.r_max) }
    } else {
        LadderConfig { r0: pair.r_min.max(1.0), factor: Some(2.0), count: Some(10), r_max: None }
    }
}

/// Residual, Prop-1 differential inequality, isoperimetric inequality, area
/// bound and lower growth bound for one solution pair.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let pair = cfg.solution_pair()?;
    let z0 = cfg.center()?;
    let q = cfg.quadrature()?;
    let ladder = cfg.ladder_or(Some(default_ladder(&pair)))?;
    let radii = ladder.radii();
    let r0 = ladder.r0();
    let r_big = radii[radii.len() - 1];
    if r0 < pair.r_min || r_big > pair.r_max {
        return Err(bad("ladder leaves the domain of the mapping"));
    }
    let mode = match cfg.h {
        Some(h) if h > 0.0 && h.is_finite() => DerivativeMode::FiniteDifference { h },
        Some(h) => return Err(bad(format!("`h` must be positive, got {h}"))),
        None => DerivativeMode::Analytic,
    };
    let region = match cfg.region {
        Some(r) => Annulus::new(
            r.r_lo,
            r.r_hi,
            r.n_r.unwrap_or(Annulus::DEFAULT_N_R),
            r.n_theta.unwrap_or(Annulus::DEFAULT_N_THETA),
        )
        .map_err(|e| bad(e.to_string()))?,
        None => Annulus::with_default_density(r0, r_big).map_err(|e| bad(e.to_string()))?,
    };
    let tabulated = matches!(pair.mapping, MappingSpec::RadialTable(_));
    let tol = if tabulated || matches!(mode, DerivativeMode::FiniteDifference { .. }) {
        RESIDUAL_TOL_TABULATED
    } else {
        RESIDUAL_TOL_CLOSED_FORM
    };

    let mut out = Output::new(cfg, "verify");
    out.line(format!("pair {}", pair.name));
    let mut all_ok = true;
    let mut record = |out: &mut Output, ok: bool, text: String| {
        all_ok &= ok;
        out.line(format!("{} {text}", verdict(ok)));
    };

    let res: ResidualReport<f64> = num(pde_residual(&pair.mapping, &pair.coefficient, z0, &region, mode))?;
    let rel = res.max_relative();
    record(
        &mut out,
        rel <= tol,
        format!("residual max={} rms={} max_relative={} points={}", g17(res.max), g17(res.rms), g17(rel), res.points.len()),
    );
    out.file("residual.csv", res.csv());

    // The S' stencil needs a little room inside a bounded domain.
    let pad = 1.0 + 2.0 * beltrami_growth::growth::AREA_DERIVATIVE_STEP;
    let inner: Vec<f64> = radii.iter().copied().filter(|&r| r >= pair.r_min * pad && r * pad <= pair.r_max).collect();
    let mut diff_rows = Vec::new();
    let (mut diff_ok, mut diff_eq) = (true, true);
    for &r in &inner {
        let row = num(differential_inequality_at(&pair.mapping, z0, r, q))?;
        diff_ok &= row.holds;
        diff_eq &= row.equality;
        diff_rows.push(vec![
            g17(row.r),
            g17(row.area),
            g17(row.area_derivative),
            g17(row.mean_dilatation),
            g17(row.bound),
            g17(row.ratio),
            flag(row.holds).into(),
            flag(row.equality).into(),
        ]);
    }
    record(&mut out, diff_ok, format!("differential_inequality radii={} equality={}", inner.len(), flag(diff_eq)));
    out.file("differential.csv", csv("r,S,S_prime,d_f,bound,ratio,holds,equality", diff_rows));

    let mut iso_rows = Vec::new();
    let (mut iso_ok, mut iso_eq) = (true, true);
    for &r in &radii {
        let row = num(isoperimetric_check(&pair.mapping, z0, r, q))?;
        iso_ok &= row.holds;
        iso_eq &= row.equality;
        iso_rows.push(vec![
            g17(row.r),
            g17(row.length),
            g17(row.area),
            g17(row.slack),
            flag(row.holds).into(),
            flag(row.equality).into(),
        ]);
    }
    record(&mut out, iso_ok, format!("isoperimetric radii={} equality={}", radii.len(), flag(iso_eq)));
    out.file("isoperimetric.csv", csv("r,L,S,slack,holds,equality", iso_rows));

    let ab = num(area_bound_check(&pair.mapping, &pair.coefficient, z0, r0, r_big, q))?;
    record(
        &mut out,
        ab.holds,
        format!("area_bound lhs={} rhs={} equality={}", g17(ab.area_r0), g17(ab.rhs), flag(ab.equality)),
    );
    out.file(
        "area_bound.csv",
        csv(
            "r0,R,S_r0,S_R,I,envelope,rhs,slack,holds,equality",
            [vec![
                g17(ab.r0),
                g17(ab.r_big),
                g17(ab.area_r0),
                g17(ab.area_r_big),
                g17(ab.integral),
                g17(ab.envelope),
                g17(ab.rhs),
                g17(ab.slack),
                flag(ab.holds).into(),
                flag(ab.equality).into(),
            ]],
        ),
    );

    let th = num(theorem1_check(&pair.mapping, &pair.coefficient, z0, r0, &ladder, q))?;
    record(
        &mut out,
        th.holds,
        format!("growth_bound m(r0)={} min_v={} radii={}", g17(th.min_modulus_r0), g17(th.running_min), th.rows.len()),
    );
    out.file(
        "theorem1.csv",
        csv(
            "R,M,m,I,envelope,v,bound_ok",
            th.rows.iter().map(|row| {
                vec![
                    g17(row.r_big),
                    g17(row.max_modulus),
                    g17(row.min_modulus_r0),
                    g17(row.integral),
                    g17(row.envelope),
                    g17(row.v),
                    flag(row.bound_ok).into(),
                ]
            }),
        ),
    );

    out.status = if all_ok { Status::Pass } else { Status::Fail };
    Ok(out)
}

/// `ρ` table and coefficient samples of the extremal radial solution.
pub fn cmd_extremal(cfg: &RunConfig) -> Result<Output, CliError> {
    let sol = cfg.extremal()?;
    let mut out = Output::new(cfg, "extremal");
    out.file("rho.csv", sol.rho_csv());
    let field = sol.coefficient();
    let z0 = sol.center();
    let mut rows = Vec::new();
    for (r, _) in sol.knots() {
        for quarter in 0..4 {
            let theta = f64::from(quarter) * std::f64::consts::FRAC_PI_2;
            let k = num(field.value(beltrami_growth::PlanePoint::on_circle(z0, r, theta)))?;
            rows.push(vec![g17(r), g17(theta), g17(k.re), g17(k.im)]);
        }
    }
    out.file("coefficient.csv", csv("r,theta,k_re,k_im", rows));
    out.line(format!("extremal knots={} rho(R)={}", sol.knots().count(), g17(sol.knots().last().map_or(0.0, |k| k.1))));
    Ok(out)
}

/// `R,M,ratio` for one of the sharpness examples.
pub fn cmd_sharpness(cfg: &RunConfig, plot: bool) -> Result<Output, CliError> {
    let example = match cfg.example.ok_or_else(|| bad("missing `example`"))? {
        ExampleConfig::Power { alpha } => SharpnessExample::Power { alpha },
        ExampleConfig::Loglog { alpha } => SharpnessExample::LogLog { alpha },
    };
    let (SharpnessExample::Power { alpha } | SharpnessExample::LogLog { alpha }) = example;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(bad(format!("alpha must be positive, got {alpha}")));
    }
    let ladder = cfg.ladder_or(None)?;
    let rep = num(sharpness_ladder(example, &ladder, cfg.quadrature()?))?;
    let mut out = Output::new(cfg, "sharpness");
    out.file("csv", csv("R,M,ratio", rep.rows.iter().map(|r| vec![g17(r.0), g17(r.1), g17(r.2)])));
    if plot {
        let pts: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.0, r.2)).collect();
        out.file("svg", loglog_polyline("sharpness ratio", "R", "ratio", &pts));
    }
    let first = rep.rows[0].2;
    let last = rep.rows[rep.rows.len() - 1].2;
    out.line(format!(
        "{} sharpness first={} last={} strictly_decreasing={} halved={}",
        verdict(rep.passes),
        g17(first),
        g17(last),
        flag(rep.strictly_decreasing),
        flag(rep.halved)
    ));
    out.status = if rep.passes { Status::Pass } else { Status::Fail };
    Ok(out)
}

/// Normalized growth `v = M e^{-I}` of observed data and the resulting verdict.
pub fn cmd_nonexist(cfg: &RunConfig, plot: bool) -> Result<Output, CliError> {
    let profile = cfg.require_profile()?;
    let r0 = cfg.require(cfg.r0, "r0")?;
    let observed = cfg.observed()?;
    let rep = nonexistence_diagnostic(&observed, &profile, r0).map_err(|e| match e {
        beltrami_growth::Error::DomainError(m) => CliError::Config(m),
        other => CliError::Numeric(other),
    })?;
    let mut out = Output::new(cfg, "nonexist");
    out.file(
        "csv",
        csv("R,M,I,envelope,v", rep.rows.iter().map(|r| vec![g17(r.0), g17(r.1), g17(r.2), g17(r.3), g17(r.4)])),
    );
    if plot {
        let pts: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.0, r.4)).collect();
        out.file("svg", loglog_polyline("normalized growth", "R", "v", &pts));
    }
    out.line(format!(
        "verdict {} (decay={} monotone_tail={})",
        rep.verdict.label(),
        g17(rep.decay),
        flag(rep.monotone_tail)
    ));
    out.line(format!("note: {}", Verdict::DISCLAIMER));
    Ok(out)
}
