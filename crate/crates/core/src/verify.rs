//! Extremal radial solutions and residual certification of solution pairs.
//!
//! A radial map `f = ρ(r) e^{iθ}` about `z0` has angular dilatation
//! `D_f = ρ/(r ρ')`. Asking `D_f = κ` gives `ρ'/ρ = 1/(r κ)`, so
//! `ρ(r) = ρ0 exp(∫_{r0}^{r} ds/(s κ(s)))`, which is exactly the growth
//! envelope: such maps attain equality in the growth bound. The matching
//! coefficient is `K = -√κ w/conj w` with `w = z - z0`.

use rayon::prelude::*;

use crate::complex_polar::{PlanePoint, WirtingerPair};
use crate::dilatation::{CoefficientField, DerivativeMode, FieldKind};
use crate::error::{Error, Result};
use crate::growth::{envelope_integral, modulus_extremes, tower, KappaProfile, RadiusLadder};
use crate::mappings::{MappingSpec, RadialTable};
use crate::quadrature::{pairwise_sum, CircleQuadrature};
use crate::scalar::{Cplx, Real};

/// Radial solution `ρ(|z - z0|) (z - z0)/|z - z0|` built from a κ-profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSolution<T> {
    profile: KappaProfile<T>,
    r0: T,
    rho0: T,
    table: RadialTable<T>,
}

pub const MIN_EXTREMAL_KNOTS: usize = 64;

/// Tabulates `ρ` on `knots` geometric radii spanning `[r0, r_max]`, plus any
/// jump radius of the profile, with exact knot slopes `d ln ρ/d ln r = 1/κ`.
pub fn build_extremal<T: Real>(
    profile: KappaProfile<T>,
    r0: T,
    rho0: T,
    r_max: T,
    knots: usize,
) -> Result<ExtremalSolution<T>> {
    build_extremal_at(profile, r0, rho0, r_max, knots, PlanePoint::origin())
}

pub fn build_extremal_at<T: Real>(
    profile: KappaProfile<T>,
    r0: T,
    rho0: T,
    r_max: T,
    knots: usize,
    center: PlanePoint<T>,
) -> Result<ExtremalSolution<T>> {
    if knots < MIN_EXTREMAL_KNOTS {
        return Err(Error::DomainError(format!("need at least {MIN_EXTREMAL_KNOTS} knots, got {knots}")));
    }
    if !(r0 > T::zero()) || !(r_max > r0) || !r_max.is_finite() {
        return Err(Error::DomainError("extremal construction needs 0 < r0 < R".into()));
    }
    if !(rho0 > T::zero()) || !rho0.is_finite() {
        return Err(Error::DomainError("rho0 must be positive".into()));
    }
    let mut radii = RadiusLadder::spanning(r0, r_max, knots - 1)?.radii();
    // Jumps of κ become knots, so the kink in ρ sits exactly on one.
    for b in profile.breakpoints() {
        if !(b > r0 && b < r_max) {
            continue;
        }
        match radii.iter().position(|&r| (r - b).abs() <= T::lit(1e-9) * b) {
            // A jump at the very edge of the table needs no knot of its own.
            Some(i) if i == 0 || i == radii.len() - 1 => {}
            Some(i) => radii[i] = b,
            None => {
                let at = radii.partition_point(|&r| r < b);
                radii.insert(at, b);
            }
        }
    }
    let mut rho = Vec::with_capacity(radii.len());
    rho.push(rho0);
    let mut integral = T::zero();
    for w in radii.windows(2) {
        integral = integral + envelope_integral(&profile, w[0], w[1])?.integral;
        rho.push(rho0 * integral.exp());
    }
    // d ln ρ / d ln r = 1/κ, one-sided at every knot.
    let n = radii.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (k, &r) in radii.iter().enumerate() {
        let kr = if k + 1 == n { profile.eval_left(r)? } else { profile.eval(r)? };
        let kl = if k == 0 { kr } else { profile.eval_left(r)? };
        for kv in [kl, kr] {
            if !(kv > T::zero()) {
                return Err(Error::NonPositiveKappa { kappa: kv.as_f64(), radius: r.as_f64() });
            }
        }
        left.push(kl.recip());
        right.push(kr.recip());
    }
    let table = RadialTable::with_log_slopes(radii, rho, left, right, center)?;
    Ok(ExtremalSolution { profile, r0, rho0, table })
}

impl<T: Real> ExtremalSolution<T> {
    pub fn profile(&self) -> &KappaProfile<T> {
        &self.profile
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn rho0(&self) -> T {
        self.rho0
    }

    pub fn r_max(&self) -> T {
        self.table.r_max()
    }

    pub fn center(&self) -> PlanePoint<T> {
        self.table.center()
    }

    pub fn table(&self) -> &RadialTable<T> {
        &self.table
    }

    /// `(r, ρ)` at every knot.
    pub fn knots(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.table.knots().iter().copied().zip(self.table.rho_values().iter().copied())
    }

    pub fn mapping(&self) -> MappingSpec<T> {
        MappingSpec::RadialTable(self.table.clone())
    }

    pub fn coefficient(&self) -> CoefficientField<T> {
        CoefficientField { kind: FieldKind::Radial(Box::new(self.profile.clone())), center: self.center() }
    }

    /// The closed-form catalog map this solution coincides with, when there is one:
    /// `Power` for a constant profile, `LogLog` for the `1 | α ln r ln ln r` profile.
    pub fn analytic_specialization(&self) -> Option<(MappingSpec<T>, CoefficientField<T>)> {
        if self.center() != PlanePoint::origin() {
            return None;
        }
        let close = |a: T, b: T| (a - b).abs() <= T::lit(1e-12) * b.abs();
        match &self.profile {
            KappaProfile::Constant { alpha } if close(self.rho0, self.r0.powf(alpha.recip())) => Some((
                MappingSpec::Power { alpha: *alpha },
                CoefficientField { kind: FieldKind::Power { alpha: *alpha }, center: PlanePoint::origin() },
            )),
            KappaProfile::Piecewise { .. } => {
                let alpha = match &self.profile {
                    KappaProfile::Piecewise { pieces, .. } => match pieces.get(1) {
                        Some(KappaProfile::LogProduct { alpha, n: 2 }) => *alpha,
                        _ => return None,
                    },
                    _ => return None,
                };
                if KappaProfile::loglog_example(alpha).ok()? != self.profile {
                    return None;
                }
                let map = MappingSpec::LogLog { alpha };
                let want = map.evaluate(PlanePoint::new(self.r0, T::zero()).ok()?).ok()?.re;
                close(self.rho0, want).then(|| {
                    (map, CoefficientField { kind: FieldKind::LogLog { alpha }, center: PlanePoint::origin() })
                })
            }
            _ => None,
        }
    }

    /// `r,rho` CSV, loadable back as a [`RadialTable`].
    pub fn rho_csv(&self) -> String {
        let mut out = String::from("r,rho\n");
        for (r, rho) in self.knots() {
            out.push_str(&format!("{},{}\n", crate::format::g17(r), crate::format::g17(rho)));
        }
        out
    }
}

/// `K(z) = -√κ(|w|) w/conj w` for the extremal solution, `|w|` within `[r0, R]`.
pub fn coefficient_of_extremal<T: Real>(sol: &ExtremalSolution<T>, z: PlanePoint<T>) -> Result<Cplx<T>> {
    let r = z.dist(sol.center());
    let slack = T::lit(1e-12);
    if r < sol.r0 * (T::one() - slack) || r > sol.r_max() * (T::one() + slack) {
        return Err(Error::DomainError(format!(
            "|z - z0| = {} outside [{}, {}]",
            r.as_f64(),
            sol.r0.as_f64(),
            sol.r_max().as_f64()
        )));
    }
    sol.coefficient().value(z)
}

/// Annulus `r_lo <= |z - z0| <= r_hi` sampled on `n_r` geometric radii and `n_theta` uniform angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus<T> {
    pub r_lo: T,
    pub r_hi: T,
    pub n_r: usize,
    pub n_theta: usize,
}

impl<T: Real> Annulus<T> {
    pub const DEFAULT_N_R: usize = 64;
    pub const DEFAULT_N_THETA: usize = 256;

    pub fn new(r_lo: T, r_hi: T, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_lo > T::zero()) || !(r_hi > r_lo) || !r_hi.is_finite() {
            return Err(Error::InvalidParameter("annulus needs 0 < r_lo < r_hi".into()));
        }
        if n_r < 2 || n_theta < 1 {
            return Err(Error::InvalidParameter("annulus grid needs n_r >= 2 and n_theta >= 1".into()));
        }
        Ok(Self { r_lo, r_hi, n_r, n_theta })
    }

    pub fn with_default_density(r_lo: T, r_hi: T) -> Result<Self> {
        Self::new(r_lo, r_hi, Self::DEFAULT_N_R, Self::DEFAULT_N_THETA)
    }

    /// Grid `(r, θ)` in row-major order (radius outer).
    pub fn nodes(&self) -> Vec<(T, T)> {
        let ratio = self.r_hi / self.r_lo;
        let step = T::two_pi() / T::lit(self.n_theta as f64);
        let last = T::lit((self.n_r - 1) as f64);
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for i in 0..self.n_r {
            let r = match i {
                0 => self.r_lo,
                i if i == self.n_r - 1 => self.r_hi,
                _ => self.r_lo * ratio.powf(T::lit(i as f64) / last),
            };
            for j in 0..self.n_theta {
                out.push((r, T::lit(j as f64) * step));
            }
        }
        out
    }
}

/// One grid point of a residual evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint<T> {
    pub r: T,
    pub theta: T,
    /// `f_z̄ - (w/conj w) f_z - K |J|^{1/2}`.
    pub residual: Cplx<T>,
    /// `|f_z|`, the natural scale of the residual.
    pub scale: T,
}

impl<T: Real> ResidualPoint<T> {
    pub fn abs(&self) -> T {
        self.residual.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub points: Vec<ResidualPoint<T>>,
    /// Grid points dropped for lying too close to a non-smooth set.
    pub excluded: usize,
    /// Half-width of the exclusion band, relative to `max(1, |z|)`.
    pub exclusion_band: T,
    pub max: T,
    pub rms: T,
    /// `(r, θ)` of the largest residual.
    pub worst: (T, T),
}

impl<T: Real> ResidualReport<T> {
    fn from_points(points: Vec<ResidualPoint<T>>, excluded: usize, band: T) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DomainError("every grid point was excluded".into()));
        }
        let mut max = T::zero();
        let mut worst = (points[0].r, points[0].theta);
        for p in &points {
            if p.abs() > max {
                max = p.abs();
                worst = (p.r, p.theta);
            }
        }
        let sq: Vec<T> = points.iter().map(|p| p.residual.norm_sqr()).collect();
        let rms = (pairwise_sum(&sq) / T::lit(points.len() as f64)).sqrt();
        Ok(Self { points, excluded, exclusion_band: band, max, rms, worst })
    }

    /// Largest `|residual| / |f_z|`.
    pub fn max_relative(&self) -> T {
        self.points.iter().map(|p| p.abs() / p.scale.max(T::min_positive_value())).fold(T::zero(), T::max)
    }

    /// `r,theta,abs_residual` CSV.
    pub fn csv(&self) -> String {
        let mut out = String::from("r,theta,abs_residual\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::format::g17(p.r),
                crate::format::g17(p.theta),
                crate::format::g17(p.abs())
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "points {}\nexcluded {}\nexclusion_band {}\nmax {}\nrms {}\nworst_r {}\nworst_theta {}\n",
            self.points.len(),
            self.excluded,
            crate::format::g17(self.exclusion_band),
            crate::format::g17(self.max),
            crate::format::g17(self.rms),
            crate::format::g17(self.worst.0),
            crate::format::g17(self.worst.1)
        )
    }
}

/// Half-width (relative to `max(1, |z|)`) of the band dropped around non-smooth sets.
fn exclusion_band<T: Real>(mode: DerivativeMode<T>) -> T {
    match mode {
        DerivativeMode::Analytic => T::lit(1e-12),
        DerivativeMode::FiniteDifference { h } => h + h,
    }
}

struct PointEval<T> {
    w: Cplx<T>,
    wp: WirtingerPair<T>,
    k: Cplx<T>,
    sqrt_j: T,
}

#[allow(non_snake_case)]
fn eval_point<T: Real>(
    map: &MappingSpec<T>,
    K: &CoefficientField<T>,
    z0: PlanePoint<T>,
    r: T,
    theta: T,
    mode: DerivativeMode<T>,
) -> Result<PointEval<T>> {
    let z = PlanePoint::on_circle(z0, r, theta);
    let wp = mode.derivatives(map, z)?;
    let jac = wp.d_z.norm_sqr() - wp.d_zbar.norm_sqr();
    if !(jac > T::zero()) {
        return Err(Error::NonPositiveJacobian { jacobian: jac.as_f64(), re: z.re.as_f64(), im: z.im.as_f64() });
    }
    Ok(PointEval { w: z.to_complex() - z0.to_complex(), wp, k: K.value(z)?, sqrt_j: jac.sqrt() })
}

#[allow(non_snake_case)]
fn grid_eval<T, F, P>(
    map: &MappingSpec<T>,
    K: &CoefficientField<T>,
    z0: PlanePoint<T>,
    region: &Annulus<T>,
    mode: DerivativeMode<T>,
    f: F,
) -> Result<(Vec<P>, usize, T)>
where
    T: Real,
    P: Send,
    F: Fn(T, T, PointEval<T>) -> P + Sync,
{
    if K.center != z0 {
        return Err(Error::InvalidParameter("coefficient field must be centered at z0".into()));
    }
    let band = exclusion_band(mode);
    let nodes = region.nodes();
    let evaluated: Vec<Option<P>> = nodes
        .par_iter()
        .map(|&(r, theta)| {
            let z = PlanePoint::on_circle(z0, r, theta);
            if map.smooth_margin(z) <= band * z.abs().max(T::one()) {
                return Ok(None);
            }
            Ok(Some(f(r, theta, eval_point(map, K, z0, r, theta, mode)?)))
        })
        .collect::<Result<_>>()?;
    let excluded = evaluated.iter().filter(|p| p.is_none()).count();
    Ok((evaluated.into_iter().flatten().collect(), excluded, band))
}

/// Residual of `f_z̄ - (w/conj w) f_z = K |J_f|^{1/2}` on the annulus grid.
/// Points within `2h max(1, |z|)` of a non-smooth set of the map are skipped.
#[allow(non_snake_case)]
pub fn pde_residual<T: Real>(
    map: &MappingSpec<T>,
    K: &CoefficientField<T>,
    z0: PlanePoint<T>,
    region: &Annulus<T>,
    mode: DerivativeMode<T>,
) -> Result<ResidualReport<T>> {
    let (points, excluded, band) = grid_eval(map, K, z0, region, mode, |r, theta, e| ResidualPoint {
        r,
        theta,
        residual: complex_residual(&e),
        scale: e.wp.d_z.norm(),
    })?;
    ResidualReport::from_points(points, excluded, band)
}

fn complex_residual<T: Real>(e: &PointEval<T>) -> Cplx<T> {
    e.wp.d_zbar - e.w / e.w.conj() * e.wp.d_z - e.k * e.sqrt_j
}

/// One grid point of the two-real-equation form
/// `(y - y0) u_x - (x - x0) u_y = k1 |J|^{1/2}`, same for `v` with `k2`,
/// where `k1 = -Im(conj w K)` and `k2 = Re(conj w K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealResidualPoint<T> {
    pub r: T,
    pub theta: T,
    pub residual_u: T,
    pub residual_v: T,
    /// Residual of the complex form at the same point.
    pub complex: Cplx<T>,
    /// `r (|f_z| + |f_z̄| + |K| |J|^{1/2})`, the size of the terms being cancelled.
    pub scale: T,
}

impl<T: Real> RealResidualPoint<T> {
    /// `|(ru + i rv) - i conj(w) ρ|` relative to [`Self::scale`]: zero up to rounding,
    /// since the real system is the complex equation multiplied by `i conj w`.
    pub fn decomposition_error(&self) -> T {
        let w = Cplx::from_polar(self.r, self.theta);
        let expected = Cplx::<T>::i() * w.conj() * self.complex;
        let got = Cplx::new(self.residual_u, self.residual_v);
        (got - expected).norm() / self.scale.max(T::min_positive_value())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealSystemReport<T> {
    pub points: Vec<RealResidualPoint<T>>,
    pub excluded: usize,
    pub max_u: T,
    pub max_v: T,
    pub max_decomposition_error: T,
}

#[allow(non_snake_case)]
pub fn real_system_residual<T: Real>(
    map: &MappingSpec<T>,
    K: &CoefficientField<T>,
    z0: PlanePoint<T>,
    region: &Annulus<T>,
    mode: DerivativeMode<T>,
) -> Result<RealSystemReport<T>> {
    let (points, excluded, _) = grid_eval(map, K, z0, region, mode, |r, theta, e| {
        let (f_x, f_y) = e.wp.partials();
        let (dx, dy) = (e.w.re, e.w.im);
        let wk = e.w.conj() * e.k;
        let (k1, k2) = (-wk.im, wk.re);
        RealResidualPoint {
            r,
            theta,
            residual_u: dy * f_x.re - dx * f_y.re - k1 * e.sqrt_j,
            residual_v: dy * f_x.im - dx * f_y.im - k2 * e.sqrt_j,
            complex: complex_residual(&e),
            scale: r * (e.wp.d_z.norm() + e.wp.d_zbar.norm() + e.k.norm() * e.sqrt_j),
        }
    })?;
    if points.is_empty() {
        return Err(Error::DomainError("every grid point was excluded".into()));
    }
    let fold = |g: &dyn Fn(&RealResidualPoint<T>) -> T| points.iter().map(g).fold(T::zero(), T::max);
    let max_u = fold(&|p| p.residual_u.abs());
    let max_v = fold(&|p| p.residual_v.abs());
    let max_decomposition_error = fold(&|p| p.decomposition_error());
    Ok(RealSystemReport { points, excluded, max_u, max_v, max_decomposition_error })
}

/// The two sharpness examples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SharpnessExample<T> {
    /// `M(R)/R^{1/α}` stays at 1.
    Power { alpha: T },
    /// `M(R)/(ln R)^{1/α}` tends to 0.
    LogLog { alpha: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport<T> {
    /// `(R, M(R), ratio)`.
    pub rows: Vec<(T, T, T)>,
    pub strictly_decreasing: bool,
    /// `last ratio < first ratio / 2`.
    pub halved: bool,
    pub passes: bool,
}

pub const SHARPNESS_POWER_TOL: f64 = 1e-9;

/// Ratios of the maximum modulus to the comparison scale along the ladder.
/// The `LogLog` ladder only uses radii at or above `e^e`.
pub fn sharpness_ladder<T: Real>(
    example: SharpnessExample<T>,
    ladder: &RadiusLadder<T>,
    q: CircleQuadrature,
) -> Result<SharpnessReport<T>> {
    let (map, scale): (MappingSpec<T>, Box<dyn Fn(T) -> T>) = match example {
        SharpnessExample::Power { alpha } => {
            (MappingSpec::power(alpha)?, Box::new(move |r: T| r.powf(alpha.recip())))
        }
        SharpnessExample::LogLog { alpha } => {
            (MappingSpec::loglog(alpha)?, Box::new(move |r: T| r.ln().powf(alpha.recip())))
        }
    };
    let radii = ladder.radii();
    if radii.last().is_none_or(|r| *r > T::lit(1e300)) {
        return Err(Error::DomainError("ladder leaves double range".into()));
    }
    if matches!(example, SharpnessExample::LogLog { .. }) && radii[0] < tower::<T>(2)? * (T::one() - T::lit(1e-12)) {
        return Err(Error::DomainError("log-log ladder must start at or above e^e".into()));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let m = modulus_extremes(&map, PlanePoint::origin(), r, q)?.max;
        rows.push((r, m, m / scale(r)));
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].2 < w[0].2);
    let halved = rows[rows.len() - 1].2 < rows[0].2 * T::lit(0.5);
    let passes = match example {
        SharpnessExample::Power { .. } => {
            rows.iter().all(|row| (row.2 - T::one()).abs() <= T::lit(SHARPNESS_POWER_TOL))
        }
        SharpnessExample::LogLog { .. } => strictly_decreasing && halved,
    };
    Ok(SharpnessReport { rows, strictly_decreasing, halved, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilatation::angular_dilatation;
    use crate::growth::{area_bound_check, ladder_growth};
    use crate::mappings::seam_radius;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn o() -> PlanePoint<f64> {
        PlanePoint::origin()
    }

    #[test]
    fn extremal_constant_profile_is_power_law() {
        let sol = build_extremal(KappaProfile::constant(2.0).unwrap(), 1.0, 1.0, 100.0, 64).unwrap();
        assert_eq!(sol.knots().count(), 64);
        for (r, rho) in sol.knots() {
            assert!(rel(rho, r.sqrt()) < 1e-10, "{r}");
        }
        assert!(sol.analytic_specialization().is_some());
        let sol = build_extremal(KappaProfile::constant(1.0).unwrap(), 1.0, 1.0, 50.0, 64).unwrap();
        for (r, rho) in sol.knots() {
            assert!(rel(rho, r) < 1e-10);
        }
    }

    #[test]
    fn extremal_loglog_profile() {
        let seam = seam_radius::<f64>();
        for alpha in [1.0, 2.0] {
            let prof = KappaProfile::loglog_example(alpha).unwrap();
            let sol = build_extremal(prof, seam, 1.0, 1e9, 80).unwrap();
            for (r, rho) in sol.knots() {
                assert!(rel(rho, r.ln().ln().powf(1.0 / alpha)) < 1e-10, "{r}");
            }
            let (map, k) = sol.analytic_specialization().unwrap();
            assert_eq!(map, MappingSpec::LogLog { alpha });
            let rep = pde_residual(&map, &k, o(), &Annulus::new(seam, 1e9, 32, 64).unwrap(), DerivativeMode::Analytic)
                .unwrap();
            assert!(rep.max <= 1e-10);
        }
    }

    #[test]
    fn extremal_preconditions() {
        let c = KappaProfile::constant(1.0).unwrap();
        assert!(build_extremal(c.clone(), 1.0, 1.0, 10.0, 63).is_err());
        assert!(build_extremal(c.clone(), 1.0, -1.0, 10.0, 64).is_err());
        assert!(build_extremal(c, 2.0, 1.0, 1.0, 64).is_err());
        let ll = KappaProfile::log_product(1.0, 2).unwrap();
        assert!(build_extremal(ll, 2.0, 1.0, 100.0, 64).is_err());
    }

    #[test]
    fn coefficient_of_extremal_examples() {
        let sol = build_extremal(KappaProfile::constant(2.0).unwrap(), 1.0, 1.0, 100.0, 64).unwrap();
        let z = PlanePoint::new(3.0, 4.0).unwrap();
        let zc = z.to_complex();
        let want = -(zc / zc.conj()) * 2f64.sqrt();
        assert!((coefficient_of_extremal(&sol, z).unwrap() - want).norm() < 1e-15);
        assert!(coefficient_of_extremal(&sol, PlanePoint::new(0.5, 0.0).unwrap()).is_err());

        let seam = seam_radius::<f64>();
        let sol = build_extremal(KappaProfile::loglog_example(1.5).unwrap(), 1.0, 1.0, 1e6, 64).unwrap();
        let z = PlanePoint::new(2.0, 1.0).unwrap();
        let zc = z.to_complex();
        assert!((coefficient_of_extremal(&sol, z).unwrap() + zc / zc.conj()).norm() < 1e-15);
        let z = PlanePoint::new(100.0f64, -7.0).unwrap();
        let zc = z.to_complex();
        let r = zc.norm();
        let want = -(zc / zc.conj()) * (1.5 * r.ln() * r.ln().ln()).sqrt();
        assert!((coefficient_of_extremal(&sol, z).unwrap() - want).norm() < 1e-13);
        assert!(r > seam);
    }

    #[test]
    fn residual_examples() {
        let ann = Annulus::new(0.5, 2.0, 16, 32).unwrap();
        let sp = CoefficientField::at_origin(FieldKind::Spiral).unwrap();
        let rep = pde_residual(&MappingSpec::Spiral, &sp, o(), &ann, DerivativeMode::Analytic).unwrap();
        assert!(rep.max <= 1e-12 && rep.excluded == 0);

        let (a, b, c) = (Cplx::new(0.3, -0.2), Cplx::new(1.1, 0.4), Cplx::new(2.0, 1.0));
        let z0 = PlanePoint::new(0.4, -0.3).unwrap();
        let lin = MappingSpec::linear(a, b, c).unwrap();
        let k = CoefficientField::new(FieldKind::Linear { a, b }, z0).unwrap();
        let rep = pde_residual(&lin, &k, z0, &ann, DerivativeMode::Analytic).unwrap();
        assert!(rep.max <= 1e-12);

        let id = CoefficientField::at_origin(FieldKind::Power { alpha: 1.0 }).unwrap();
        let rep = pde_residual(&MappingSpec::Identity, &id, o(), &ann, DerivativeMode::Analytic).unwrap();
        assert!(rep.max <= 1e-15);

        let rep = pde_residual(&MappingSpec::power(2.0).unwrap(), &sp, o(), &ann, DerivativeMode::Analytic).unwrap();
        assert!(rep.max > 0.1);
    }

    #[test]
    fn residual_excludes_seam_band() {
        let seam = seam_radius::<f64>();
        let ll = MappingSpec::loglog(1.0).unwrap();
        let k = CoefficientField::at_origin(FieldKind::LogLog { alpha: 1.0 }).unwrap();
        let ann = Annulus::new(seam / 2.0, seam * 2.0, 3, 16).unwrap();
        // The middle ring lies on the seam itself.
        let mid = (seam / 2.0) * 2.0;
        assert!(rel(mid, seam) < 1e-15);
        let rep =
            pde_residual(&ll, &k, o(), &ann, DerivativeMode::FiniteDifference { h: 1e-5 }).unwrap();
        assert_eq!(rep.excluded, 16);
        assert!(rep.max < 1e-6);
    }

    #[test]
    fn residual_rejects_orientation_reversal() {
        let lin = MappingSpec::linear(Cplx::new(2.0, 0.0), Cplx::new(1.0, 0.0), Cplx::new(0.0, 0.0)).unwrap();
        let k = CoefficientField::at_origin(FieldKind::Zero).unwrap();
        let ann = Annulus::new(1.0, 2.0, 4, 8).unwrap();
        assert!(matches!(
            pde_residual(&lin, &k, o(), &ann, DerivativeMode::Analytic),
            Err(Error::NonPositiveJacobian { .. })
        ));
    }

    #[test]
    fn real_system_examples() {
        let ann = Annulus::new(0.5, 3.0, 8, 16).unwrap();
        let id = CoefficientField::at_origin(FieldKind::Power { alpha: 1.0 }).unwrap();
        let rep = real_system_residual(&MappingSpec::Identity, &id, o(), &ann, DerivativeMode::Analytic).unwrap();
        assert!(rep.max_u <= 1e-15 && rep.max_v <= 1e-15);
        for alpha in [0.5, 2.0] {
            let k = CoefficientField::at_origin(FieldKind::Power { alpha }).unwrap();
            let rep = real_system_residual(
                &MappingSpec::power(alpha).unwrap(),
                &k,
                o(),
                &ann,
                DerivativeMode::FiniteDifference { h: 1e-5 },
            )
            .unwrap();
            assert!(rep.max_u <= 1e-8 && rep.max_v <= 1e-8, "{} {}", rep.max_u, rep.max_v);
        }
        let sp = CoefficientField::at_origin(FieldKind::Spiral).unwrap();
        let rep = real_system_residual(&MappingSpec::power(0.5).unwrap(), &sp, o(), &ann, DerivativeMode::Analytic)
            .unwrap();
        assert!(rep.max_u > 0.1);
        assert!(rep.max_decomposition_error <= 1e-10);
    }

    #[test]
    fn extremal_pair_is_a_solution() {
        let prof = KappaProfile::table(vec![1.0, 10.0, 1000.0], vec![1.0, 3.0, 2.0]).unwrap();
        let sol = build_extremal(prof, 1.0, 1.0, 1000.0, 200).unwrap();
        let map = sol.mapping();
        let k = sol.coefficient();
        let ann = Annulus::new(1.5, 500.0, 24, 16).unwrap();
        let rep = pde_residual(&map, &k, o(), &ann, DerivativeMode::FiniteDifference { h: 1e-5 }).unwrap();
        assert!(rep.max_relative() <= 1e-4, "{}", rep.max_relative());
        for (r, th) in [(2.0, 0.3), (40.0, 2.0), (700.0, 5.0)] {
            let z = PlanePoint::on_circle(o(), r, th);
            let d = angular_dilatation(&map, o(), z).unwrap();
            assert!(rel(d, k.modulus_sq(z).unwrap()) < 1e-3);
        }
    }

    #[test]
    fn extremal_attains_growth_equality() {
        let prof = KappaProfile::constant(0.5).unwrap();
        let sol = build_extremal(prof.clone(), 1.0, 1.0, 2f64.powi(20), 81).unwrap();
        let q = CircleQuadrature::new(64).unwrap();
        let map = sol.mapping();
        let rep = area_bound_check(&map, &sol.coefficient(), o(), 2.0, 1024.0, q).unwrap();
        assert!(rep.equality, "{rep:?}");
        let radii = RadiusLadder::new(1.0, 2.0, 20).unwrap().radii();
        let rep = ladder_growth(&map, o(), 1.0, &radii, q, &prof).unwrap();
        for row in &rep.rows {
            assert!((row.v - 1.0).abs() < 1e-8, "{row:?}");
        }
    }

    #[test]
    fn sharpness_examples() {
        let q = CircleQuadrature::new(64).unwrap();
        let ladder = RadiusLadder::new(10.0f64, 10.0, 2).unwrap();
        let rep = sharpness_ladder(SharpnessExample::Power { alpha: 2.0 }, &ladder, q).unwrap();
        assert!(rep.passes);
        for row in rep.rows {
            assert!((row.2 - 1.0).abs() < 1e-9);
        }
        let seam = seam_radius::<f64>();
        let ladder = RadiusLadder::new(seam, 10.0, 6).unwrap();
        let rep = sharpness_ladder(SharpnessExample::LogLog { alpha: 1.0 }, &ladder, q).unwrap();
        assert!(rep.strictly_decreasing);
        for &(r, _, ratio) in &rep.rows {
            assert!(rel(ratio, r.ln().ln() / r.ln()) < 1e-12);
        }
        let ladder = RadiusLadder::spanning(seam, 1e9, 10).unwrap();
        let rep = sharpness_ladder(SharpnessExample::LogLog { alpha: 1.0 }, &ladder, q).unwrap();
        let last = rep.rows.last().unwrap().2;
        assert!((last - 0.146).abs() < 1e-3);
        assert!(rep.passes);
        let low = RadiusLadder::new(2.0, 10.0, 3).unwrap();
        assert!(sharpness_ladder(SharpnessExample::LogLog { alpha: 1.0 }, &low, q).is_err());
    }
}
