//! Growth functionals and the checks built on them.
//!
//! For a solution `f` with coefficient `K` and `κ(r)` the circle mean of `|K|²`,
//! the image area `S(r) = |f(B(z0, r))|` satisfies `S' >= 2S/(r d_f)` and hence
//! `S(r0) <= S(R) exp(-2 I)` with `I = ∫_{r0}^{R} dr/(r κ)`. Comparing with the
//! disc areas `π m(r0)²` and `π M(R)²` gives the lower growth bound
//! `M(R) >= m(r0) e^{I}`. Everything here evaluates these quantities on finite
//! radius ladders; the asymptotic statements are only probed, never proved.

use crate::complex_polar::{jacobian_wirtinger, wirtinger_to_polar, PlanePoint, PolarDerivPair};
use crate::dilatation::{circle_average_d, kappa, CoefficientField};
use crate::error::{Error, Result};
use crate::mappings::MappingSpec;
use crate::quadrature::{adaptive, golden_section_min, AdaptiveOptions, CircleQuadrature};
use crate::scalar::Real;

/// Relative slack allowed when checking a radius against a profile's lower bound.
const DOMAIN_SLACK: f64 = 1e-12;

/// `ln_k t`, the k-fold logarithm. Requires `t > e_{k-1}` so that the result is positive.
pub fn iterated_log<T: Real>(k: u32, t: T) -> Result<T> {
    if k == 0 {
        return Err(Error::DomainError("iterated logarithm order must be >= 1".into()));
    }
    let mut v = t;
    for _ in 0..k {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::DomainError(format!("ln_{k}({}) undefined", t.as_f64())));
        }
        v = v.ln();
    }
    if !(v > T::zero()) {
        return Err(Error::DomainError(format!("ln_{k}({}) is not positive", t.as_f64())));
    }
    Ok(v)
}

/// `e_k`: `e_1 = e`, `e_{k+1} = exp(e_k)`. Finite in double precision only for `k <= 3`.
pub fn tower<T: Real>(k: u32) -> Result<T> {
    match k {
        0 => Err(Error::DomainError("tower index must be >= 1".into())),
        1..=3 => {
            let mut v = T::E();
            for _ in 1..k {
                v = v.exp();
            }
            Ok(v)
        }
        _ => Err(Error::Overflow(k)),
    }
}

/// Radial profile `κ(z0, r)`.
#[derive(Debug, Clone, PartialEq)]
pub enum KappaProfile<T> {
    Constant { alpha: T },
    /// `α ∏_{k=1}^{n} ln_k r` on `r >= e_n`.
    LogProduct { alpha: T, n: u32 },
    /// `pieces[i]` applies on `[breakpoints[i-1], breakpoints[i])`.
    Piecewise { breakpoints: Vec<T>, pieces: Vec<KappaProfile<T>> },
    /// Circle means of a coefficient field.
    FromField { field: Box<CoefficientField<T>>, quadrature: CircleQuadrature },
    /// Knots `(r, κ)`, linear in `(ln r, ln κ)`.
    Table { radii: Vec<T>, values: Vec<T> },
}

impl<T: Real> KappaProfile<T> {
    pub fn constant(alpha: T) -> Result<Self> {
        positive_alpha(alpha)?;
        Ok(Self::Constant { alpha })
    }

    pub fn log_product(alpha: T, n: u32) -> Result<Self> {
        positive_alpha(alpha)?;
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "log-product order must be 1..=3 (e_n finite), got {n}"
            )));
        }
        Ok(Self::LogProduct { alpha, n })
    }

    pub fn piecewise(breakpoints: Vec<T>, pieces: Vec<KappaProfile<T>>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParameter("piecewise profile needs one more piece than breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) || breakpoints.iter().any(|b| !(*b > T::zero())) {
            return Err(Error::InvalidParameter("breakpoints must be positive and strictly ascending".into()));
        }
        Ok(Self::Piecewise { breakpoints, pieces })
    }

    pub fn table(radii: Vec<T>, values: Vec<T>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::InvalidParameter("kappa table needs >= 2 (r, kappa) pairs".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= T::zero() {
            return Err(Error::InvalidParameter("kappa table radii must be positive and ascending".into()));
        }
        if values.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter("kappa table values must be positive".into()));
        }
        Ok(Self::Table { radii, values })
    }

    pub fn from_field(field: CoefficientField<T>, quadrature: CircleQuadrature) -> Self {
        Self::FromField { field: Box::new(field), quadrature }
    }

    /// `1` below `e^e`, `α ln r ln ln r` from `e^e` on.
    pub fn loglog_example(alpha: T) -> Result<Self> {
        Self::piecewise(vec![tower(2)?], vec![Self::constant(T::one())?, Self::log_product(alpha, 2)?])
    }

    /// Smallest radius where the profile is defined.
    pub fn lower_bound(&self) -> T {
        match self {
            Self::Constant { .. } | Self::FromField { .. } => T::zero(),
            Self::LogProduct { n, .. } => tower(*n).unwrap_or(T::infinity()),
            Self::Piecewise { pieces, .. } => pieces[0].lower_bound(),
            Self::Table { radii, .. } => radii[0],
        }
    }

    pub fn upper_bound(&self) -> T {
        match self {
            Self::Table { radii, .. } => radii[radii.len() - 1],
            Self::Piecewise { pieces, .. } => pieces[pieces.len() - 1].upper_bound(),
            _ => T::infinity(),
        }
    }

    /// Limit of `κ` from below at `r` (differs from [`eval`](Self::eval) only at a jump).
    pub fn eval_left(&self, r: T) -> Result<T> {
        match self {
            Self::Piecewise { breakpoints, pieces } => {
                let idx = breakpoints.iter().take_while(|b| **b < r).count();
                pieces[idx].eval_left(r)
            }
            Self::FromField { field, .. } if field.radial_breakpoints().contains(&r) => {
                self.eval(r * (T::one() - T::lit(4.0) * T::epsilon()))
            }
            _ => self.eval(r),
        }
    }

    /// Radii where the profile (or the field behind it) may jump.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Self::Piecewise { breakpoints, pieces } => {
                let mut out = breakpoints.clone();
                for p in pieces {
                    out.extend(p.breakpoints());
                }
                out.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
                out.dedup();
                out
            }
            Self::FromField { field, .. } => field.radial_breakpoints(),
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, r: T) -> Result<T> {
        let lo = self.lower_bound();
        if !(r > T::zero()) || r < lo * (T::one() - T::lit(DOMAIN_SLACK)) || r > self.upper_bound() {
            return Err(Error::DomainError(format!(
                "r = {} outside profile domain [{}, {}]",
                r.as_f64(),
                lo.as_f64(),
                self.upper_bound().as_f64()
            )));
        }
        match self {
            Self::Constant { alpha } => Ok(*alpha),
            Self::LogProduct { alpha, n } => {
                let r = r.max(lo);
                let mut prod = *alpha;
                let mut v = r;
                for _ in 0..*n {
                    v = v.ln();
                    prod = prod * v;
                }
                Ok(prod)
            }
            Self::Piecewise { breakpoints, pieces } => {
                let idx = breakpoints.iter().take_while(|b| **b <= r).count();
                pieces[idx].eval(r)
            }
            Self::FromField { field, quadrature } => kappa(field, r, *quadrature),
            Self::Table { radii, values } => {
                let i = match radii.binary_search_by(|x| x.partial_cmp(&r).expect("finite radii")) {
                    Ok(i) => return Ok(values[i]),
                    Err(i) => i - 1,
                };
                let s = (r.ln() - radii[i].ln()) / (radii[i + 1].ln() - radii[i].ln());
                Ok((values[i].ln() * (T::one() - s) + values[i + 1].ln() * s).exp())
            }
        }
    }
}

fn positive_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", alpha.as_f64())));
    }
    Ok(())
}

/// Geometric radii `r0 · factor^k`, `k = 0..=count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusLadder<T> {
    r0: T,
    factor: T,
    count: usize,
    /// Exact last radius of a spanning ladder.
    end: Option<T>,
}

impl<T: Real> RadiusLadder<T> {
    pub const DEFAULT_FACTOR: f64 = 2.0;
    pub const DEFAULT_COUNT: usize = 40;
    const MAX_RADIUS: f64 = 1e300;

    /// The step count is capped so that the last radius stays below `1e300`.
    pub fn new(r0: T, factor: T, count: usize) -> Result<Self> {
        if !(r0 > T::zero()) || !r0.is_finite() {
            return Err(Error::InvalidParameter("ladder start must be positive".into()));
        }
        if !(factor > T::one()) || !factor.is_finite() {
            return Err(Error::InvalidParameter("ladder factor must exceed 1".into()));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("ladder needs at least one step".into()));
        }
        let room = (T::lit(Self::MAX_RADIUS).ln() - r0.ln()) / factor.ln();
        if room < T::one() {
            return Err(Error::InvalidParameter("ladder start too large".into()));
        }
        let cap = room.floor().to_usize().unwrap_or(usize::MAX);
        Ok(Self { r0, factor, count: count.min(cap), end: None })
    }

    /// Ladder from `r0` to exactly `r_max` in `count` geometric steps.
    pub fn spanning(r0: T, r_max: T, count: usize) -> Result<Self> {
        if !(r_max > r0) || count == 0 {
            return Err(Error::InvalidParameter("spanning ladder needs r_max > r0 and count >= 1".into()));
        }
        let mut ladder = Self::new(r0, (r_max / r0).powf(T::lit(count as f64).recip()), count)?;
        if ladder.count == count {
            ladder.end = Some(r_max);
        }
        Ok(ladder)
    }

    pub fn with_defaults(r0: T) -> Result<Self> {
        Self::new(r0, T::lit(Self::DEFAULT_FACTOR), Self::DEFAULT_COUNT)
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn factor(&self) -> T {
        self.factor
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// All `count + 1` radii, starting at `r0`.
    pub fn radii(&self) -> Vec<T> {
        let mut out: Vec<T> = (0..=self.count).map(|k| self.r0 * self.factor.powi(k as i32)).collect();
        if let Some(end) = self.end {
            out[self.count] = end;
        }
        out
    }
}

/// Corollary growth exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthExponent<T> {
    /// `κ <= α` gives growth at least `R^{1/α}`.
    KappaBound { alpha: T },
    /// `|K| <= α` gives growth at least `R^{1/α²}`.
    CoefficientBound { alpha: T },
}

pub fn corollary_exponent<T: Real>(g: GrowthExponent<T>) -> T {
    match g {
        GrowthExponent::KappaBound { alpha } => alpha.recip(),
        GrowthExponent::CoefficientBound { alpha } => (alpha * alpha).recip(),
    }
}

/// `I = ∫_{r0}^{R} dr/(r κ)` and `exp(I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope<T> {
    pub integral: T,
    pub envelope: T,
    /// Quadrature error estimate on `integral`.
    pub error: T,
}

/// Integrates `1/κ(e^t)` over `t ∈ [ln r0, ln R]`, splitting at profile breakpoints.
pub fn envelope_integral<T: Real>(prof: &KappaProfile<T>, r0: T, r_big: T) -> Result<Envelope<T>> {
    if !(r0 > T::zero()) || !(r_big >= r0) || !r_big.is_finite() {
        return Err(Error::DomainError(format!(
            "envelope needs 0 < r0 <= R, got r0 = {}, R = {}",
            r0.as_f64(),
            r_big.as_f64()
        )));
    }
    let lo = prof.lower_bound();
    if r0 < lo * (T::one() - T::lit(DOMAIN_SLACK)) || r_big > prof.upper_bound() {
        return Err(Error::DomainError(format!(
            "[{}, {}] leaves the profile domain [{}, {}]",
            r0.as_f64(),
            r_big.as_f64(),
            lo.as_f64(),
            prof.upper_bound().as_f64()
        )));
    }
    if r0 == r_big {
        return Ok(Envelope { integral: T::zero(), envelope: T::one(), error: T::zero() });
    }
    let cuts: Vec<T> = prof.breakpoints().into_iter().map(|b| b.ln()).collect();
    let opts = AdaptiveOptions { abs_tol: T::lit(1e-11), rel_tol: T::lit(1e-13), max_intervals: 2000 };
    let res = adaptive(
        |t: T| {
            let r = t.exp();
            let k = prof.eval(r)?;
            if !(k > T::zero()) {
                return Err(Error::NonPositiveKappa { kappa: k.as_f64(), radius: r.as_f64() });
            }
            Ok(k.recip())
        },
        r0.ln(),
        r_big.ln(),
        &cuts,
        opts,
    )?;
    Ok(Envelope { integral: res.value, envelope: res.value.exp(), error: res.error })
}

/// `f_θ` (with `f_r`) about `z0` from analytic derivatives.
fn polar_derivs<T: Real>(map: &MappingSpec<T>, z0: PlanePoint<T>, z: PlanePoint<T>) -> Result<PolarDerivPair<T>> {
    wirtinger_to_polar(z, z0, map.wirtinger_analytic(z)?)
}

/// Extremes of `|f(z) - f(z0)|` on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusExtremes<T> {
    pub max: T,
    pub min: T,
    pub theta_max: T,
    pub theta_min: T,
}

/// `M_f(z0, r)` and `m_f(z0, r)`: grid search, then golden-section refinement
/// around the best grid cell down to `1e-10` in `θ`.
pub fn modulus_extremes<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    r: T,
    q: CircleQuadrature,
) -> Result<ModulusExtremes<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
    }
    let base = map.evaluate(z0)?.to_complex();
    let g = |theta: T| -> Result<T> {
        Ok((map.evaluate(PlanePoint::on_circle(z0, r, theta))?.to_complex() - base).norm())
    };
    let thetas: Vec<T> = q.angles().collect();
    let vals = thetas.iter().map(|&t| g(t)).collect::<Result<Vec<T>>>()?;
    let step = T::two_pi() / T::lit(q.n() as f64);
    let tol = T::lit(1e-10);

    let (jmax, _) = argbest(&vals, |a, b| a > b);
    let (jmin, _) = argbest(&vals, |a, b| a < b);
    let (tmax, neg) = golden_section_min(|t| Ok(-g(t)?), thetas[jmax] - step, thetas[jmax] + step, tol)?;
    let (tmin, low) = golden_section_min(g, thetas[jmin] - step, thetas[jmin] + step, tol)?;
    let (max, theta_max) = if -neg > vals[jmax] { (-neg, tmax) } else { (vals[jmax], thetas[jmax]) };
    let (min, theta_min) = if low < vals[jmin] { (low, tmin) } else { (vals[jmin], thetas[jmin]) };
    Ok(ModulusExtremes {
        max,
        min,
        theta_max: crate::complex_polar::normalize_angle(theta_max),
        theta_min: crate::complex_polar::normalize_angle(theta_min),
    })
}

fn argbest<T: Real>(vals: &[T], better: impl Fn(T, T) -> bool) -> (usize, T) {
    let mut best = (0, vals[0]);
    for (j, &v) in vals.iter().enumerate().skip(1) {
        if better(v, best.1) {
            best = (j, v);
        }
    }
    best
}

/// `L_f(z0, r) = ∫ |f_θ| dθ`.
pub fn circle_length<T: Real>(map: &MappingSpec<T>, z0: PlanePoint<T>, r: T, q: CircleQuadrature) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
    }
    q.integrate(|theta| Ok(polar_derivs(map, z0, PlanePoint::on_circle(z0, r, theta))?.d_theta.norm()))
}

/// Area enclosed by the image of the circle, `½ ∮ Im(conj(f) f_θ) dθ`.
pub fn enclosed_area<T: Real>(map: &MappingSpec<T>, z0: PlanePoint<T>, r: T, q: CircleQuadrature) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
    }
    let half = T::lit(0.5);
    q.integrate(|theta| {
        let z = PlanePoint::on_circle(z0, r, theta);
        let f = map.evaluate(z)?.to_complex();
        Ok((f.conj() * polar_derivs(map, z0, z)?.d_theta).im * half)
    })
}

/// `∫_0^{2π} J(z0 + ρe^{iθ}) ρ dθ`, the derivative of the image area in ρ.
fn ring_density<T: Real>(map: &MappingSpec<T>, z0: PlanePoint<T>, rho: T, q: CircleQuadrature) -> Result<T> {
    q.integrate(|theta| {
        let z = PlanePoint::on_circle(z0, rho, theta);
        let jac = jacobian_wirtinger(map.wirtinger_analytic(z)?);
        if jac < T::zero() {
            return Err(Error::NonPositiveJacobian { jacobian: jac.as_f64(), re: z.re.as_f64(), im: z.im.as_f64() });
        }
        Ok(jac * rho)
    })
}

fn area_options<T: Real>() -> AdaptiveOptions<T> {
    AdaptiveOptions { abs_tol: T::min_positive_value(), rel_tol: T::lit(1e-12), max_intervals: 4000 }
}

/// `∫_{a}^{b} ring_density dρ`, adaptive in `ln ρ`.
fn ring_integral<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    a: T,
    b: T,
    q: CircleQuadrature,
) -> Result<(T, T)> {
    let cuts: Vec<T> = map.radial_breakpoints(z0).into_iter().map(|x| x.ln()).collect();
    let res = adaptive(
        |t: T| {
            let rho = t.exp();
            Ok(ring_density(map, z0, rho, q)? * rho)
        },
        a.ln(),
        b.ln(),
        &cuts,
        area_options(),
    )?;
    Ok((res.value, res.error))
}

/// Image area with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate<T> {
    pub area: T,
    /// Radius below which the Jacobian is not integrated.
    pub inner_radius: T,
    /// Area enclosed by the image of the inner circle, included in `area`.
    pub inner_contribution: T,
    /// Quadrature error plus the disagreement between the enclosed inner area
    /// and a local power-law extrapolation of the Jacobian to the center.
    pub error_bar: T,
}

/// `S_f(z0, r)`: `∫∫ J ρ dθ dρ` over the disc, trapezoid in `θ` and adaptive in
/// `ln ρ` down to `ρ_min = 1e-8 r`. The disc `ρ < ρ_min` (or the hole of a map
/// defined only on an annulus) contributes the area enclosed by its image curve.
pub fn image_area<T: Real>(map: &MappingSpec<T>, z0: PlanePoint<T>, r: T, q: CircleQuadrature) -> Result<AreaEstimate<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
    }
    let hole = map.inner_radius(z0);
    if r < hole * (T::one() - T::lit(DOMAIN_SLACK)) {
        return Err(Error::OutOfDomain(r.as_f64(), 0.0));
    }
    let inner = (T::lit(1e-8) * r).max(hole).min(r);
    let (bulk, quad_err) = if inner < r { ring_integral(map, z0, inner, r, q)? } else { (T::zero(), T::zero()) };
    let enclosed = enclosed_area(map, z0, inner, q)?;

    let g1 = ring_density(map, z0, inner, q)?;
    let g2 = ring_density(map, z0, (inner * T::lit(2.0)).min(r), q)?;
    let power_law = if g1 > T::zero() && g2 > T::zero() {
        let p = (g2 / g1).ln() / T::lit(2.0).ln();
        g1 * inner / (p + T::one())
    } else {
        T::zero()
    };
    Ok(AreaEstimate {
        area: bulk + enclosed,
        inner_radius: inner,
        inner_contribution: enclosed,
        error_bar: quad_err + (enclosed - power_law).abs(),
    })
}

/// Tolerance on `L² - 4πS` relative to `L²`.
pub const ISOPERIMETRIC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetricReport<T> {
    pub r: T,
    pub length: T,
    pub area: T,
    /// `L² - 4πS`.
    pub slack: T,
    pub holds: bool,
    /// Circular image (equality case).
    pub equality: bool,
}

pub fn isoperimetric_check<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    r: T,
    q: CircleQuadrature,
) -> Result<IsoperimetricReport<T>> {
    let length = circle_length(map, z0, r, q)?;
    let area = image_area(map, z0, r, q)?.area;
    let l2 = length * length;
    let slack = l2 - T::lit(4.0) * T::PI() * area;
    let tol = T::lit(ISOPERIMETRIC_TOL) * l2;
    Ok(IsoperimetricReport { r, length, area, slack, holds: slack >= -tol, equality: slack.abs() <= tol })
}

/// Tolerance on the ratio `S' / (2S/(r d_f))`.
pub const DIFFERENTIAL_RATIO_TOL: f64 = 1e-3;
/// Relative central-difference step for `S'`.
pub const AREA_DERIVATIVE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialRow<T> {
    pub r: T,
    pub area: T,
    pub area_derivative: T,
    pub mean_dilatation: T,
    /// `2S/(r d_f)`.
    pub bound: T,
    pub ratio: T,
    pub holds: bool,
    pub equality: bool,
}

/// `S' >= 2S/(r d_f)` at a single radius. `S'` is the central difference
/// `(S(r+δ) - S(r-δ))/(2δ)`, `δ = 1e-4 r`, with the numerator integrated
/// directly over the ring `[r-δ, r+δ]`.
pub fn differential_inequality_at<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    r: T,
    q: CircleQuadrature,
) -> Result<DifferentialRow<T>> {
    let delta = T::lit(AREA_DERIVATIVE_STEP) * r;
    let area = image_area(map, z0, r, q)?.area;
    let (ring, _) = ring_integral(map, z0, r - delta, r + delta, q)?;
    let area_derivative = ring / (delta + delta);
    let mean_dilatation = circle_average_d(map, z0, r, q)?;
    let bound = T::lit(2.0) * area / (r * mean_dilatation);
    let ratio = area_derivative / bound;
    let tol = T::lit(DIFFERENTIAL_RATIO_TOL);
    Ok(DifferentialRow {
        r,
        area,
        area_derivative,
        mean_dilatation,
        bound,
        ratio,
        holds: ratio >= T::one() - tol,
        equality: (ratio - T::one()).abs() <= tol,
    })
}

pub fn differential_inequality_check<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    ladder: &RadiusLadder<T>,
    q: CircleQuadrature,
) -> Result<Vec<DifferentialRow<T>>> {
    ladder.radii().into_iter().map(|r| differential_inequality_at(map, z0, r, q)).collect()
}

/// Relative tolerance on the area bound.
pub const AREA_BOUND_TOL: f64 = 1e-6;
/// Relative gap below which the area bound counts as attained.
pub const AREA_EQUALITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaBoundReport<T> {
    pub r0: T,
    pub r_big: T,
    pub area_r0: T,
    pub area_r_big: T,
    pub integral: T,
    pub envelope: T,
    /// `S(R) · envelope⁻²`.
    pub rhs: T,
    /// `rhs - S(r0)`.
    pub slack: T,
    pub holds: bool,
    pub equality: bool,
}

fn require_field_center<T: Real>(field: &CoefficientField<T>, z0: PlanePoint<T>) -> Result<()> {
    if field.center != z0 {
        return Err(Error::InvalidParameter("coefficient field must be centered at z0".into()));
    }
    Ok(())
}

/// `S(r0) <= S(R) exp(-2 ∫_{r0}^{R} dr/(r κ))` with κ from the coefficient field.
#[allow(non_snake_case)]
pub fn area_bound_check<T: Real>(
    map: &MappingSpec<T>,
    K: &CoefficientField<T>,
    z0: PlanePoint<T>,
    r0: T,
    r_big: T,
    q: CircleQuadrature,
) -> Result<AreaBoundReport<T>> {
    require_field_center(K, z0)?;
    if !(r_big > r0) || !(r0 > T::zero()) {
        return Err(Error::DomainError("area bound needs R > r0 > 0".into()));
    }
    let area_r0 = image_area(map, z0, r0, q)?.area;
    let area_r_big = image_area(map, z0, r_big, q)?.area;
    let env = envelope_integral(&KappaProfile::from_field(K.clone(), q), r0, r_big)?;
    let rhs = area_r_big * (-(env.integral + env.integral)).exp();
    let slack = rhs - area_r0;
    Ok(AreaBoundReport {
        r0,
        r_big,
        area_r0,
        area_r_big,
        integral: env.integral,
        envelope: env.envelope,
        rhs,
        slack,
        holds: slack >= -T::lit(AREA_BOUND_TOL) * rhs,
        equality: slack.abs() <= T::lit(AREA_EQUALITY_TOL) * rhs,
    })
}

/// Relative tolerance on `v(R) >= m(r0)`.
pub const THEOREM1_TOL: f64 = 1e-6;

/// One ladder radius of a growth check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow<T> {
    pub r_big: T,
    pub max_modulus: T,
    pub min_modulus_r0: T,
    pub integral: T,
    pub envelope: T,
    /// `M(R) / envelope`.
    pub v: T,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report<T> {
    pub r0: T,
    pub min_modulus_r0: T,
    pub rows: Vec<LadderRow<T>>,
    /// Running minimum of `v` over the ladder, the finite stand-in for the lower limit.
    pub running_min: T,
    pub holds: bool,
}

/// `M(R) exp(-∫_{r0}^{R} dr/(r κ)) >= m(r0)` at every ladder radius above `r0`.
/// The integral is accumulated segment by segment along the ladder.
#[allow(non_snake_case)]
pub fn theorem1_check<T: Real>(
    map: &MappingSpec<T>,
    K: &CoefficientField<T>,
    z0: PlanePoint<T>,
    r0: T,
    ladder: &RadiusLadder<T>,
    q: CircleQuadrature,
) -> Result<Theorem1Report<T>> {
    require_field_center(K, z0)?;
    let prof = KappaProfile::from_field(K.clone(), q);
    ladder_growth(map, z0, r0, &ladder.radii(), q, &prof)
}

/// Same as [`theorem1_check`] with an explicit profile instead of a field.
pub fn ladder_growth<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    r0: T,
    radii: &[T],
    q: CircleQuadrature,
    prof: &KappaProfile<T>,
) -> Result<Theorem1Report<T>> {
    let m0 = modulus_extremes(map, z0, r0, q)?.min;
    let mut rows = Vec::new();
    let mut prev = r0;
    let mut integral = T::zero();
    let floor = m0 * (T::one() - T::lit(THEOREM1_TOL));
    for &r_big in radii.iter().filter(|&&r| r > r0) {
        integral = integral + envelope_integral(prof, prev, r_big)?.integral;
        prev = r_big;
        let max_modulus = modulus_extremes(map, z0, r_big, q)?.max;
        let envelope = integral.exp();
        let v = max_modulus / envelope;
        rows.push(LadderRow {
            r_big,
            max_modulus,
            min_modulus_r0: m0,
            integral,
            envelope,
            v,
            bound_ok: v >= floor,
        });
    }
    if rows.is_empty() {
        return Err(Error::DomainError("no ladder radius above r0".into()));
    }
    let running_min = rows.iter().map(|r| r.v).fold(T::infinity(), T::min);
    let holds = rows.iter().all(|r| r.bound_ok);
    Ok(Theorem1Report { r0, min_modulus_r0: m0, rows, running_min, holds })
}

/// Outcome of the non-existence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The growth data is compatible with a regular solution.
    Consistent,
    /// `M(R)·e^{-I}` decays along the ladder as it would have to if no regular
    /// solution with this growth existed.
    Inconsistent,
}

impl Verdict {
    pub const DISCLAIMER: &'static str =
        "finite-sample diagnostic on a radius ladder; it does not prove or disprove existence";

    pub fn label(&self) -> &'static str {
        match self {
            Self::Consistent => "CONSISTENT",
            Self::Inconsistent => "INCONSISTENT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonexistenceReport<T> {
    /// `(R, M, I, envelope, v)` per observation.
    pub rows: Vec<(T, T, T, T, T)>,
    pub monotone_tail: bool,
    /// `v_last / v_first`.
    pub decay: T,
    pub verdict: Verdict,
}

/// Fraction of the initial `v` the final `v` must fall below for an `Inconsistent` verdict.
pub const NONEXISTENCE_DECAY: f64 = 0.01;

/// Flags growth data `(R, M(R))` whose normalized growth `v = M e^{-I}` decreases
/// strictly over the last half of the observations and ends below 1% of its
/// first value.
pub fn nonexistence_diagnostic<T: Real>(
    observed: &[(T, T)],
    prof: &KappaProfile<T>,
    r0: T,
) -> Result<NonexistenceReport<T>> {
    if observed.len() < 2 {
        return Err(Error::DomainError("need at least two observations".into()));
    }
    if observed[0].0 <= r0 || observed.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DomainError("observed radii must be ascending and above r0".into()));
    }
    if observed.iter().any(|&(r, m)| !r.is_finite() || !(m >= T::zero()) || !m.is_finite()) {
        return Err(Error::DomainError("observations must be finite with M >= 0".into()));
    }
    let mut rows = Vec::with_capacity(observed.len());
    let mut prev = r0;
    let mut integral = T::zero();
    for &(r, m) in observed {
        integral = integral + envelope_integral(prof, prev, r)?.integral;
        prev = r;
        let envelope = integral.exp();
        rows.push((r, m, integral, envelope, m / envelope));
    }
    let v: Vec<T> = rows.iter().map(|row| row.4).collect();
    let tail = &v[(v.len() / 2).min(v.len() - 2)..];
    let monotone_tail = tail.windows(2).all(|w| w[1] < w[0]);
    let decay = v[v.len() - 1] / v[0];
    let verdict = if monotone_tail && decay < T::lit(NONEXISTENCE_DECAY) {
        Verdict::Inconsistent
    } else {
        Verdict::Consistent
    };
    Ok(NonexistenceReport { rows, monotone_tail, decay, verdict })
}
