//! Catalog of explicit mappings with closed-form and finite-difference derivatives.

use crate::complex_polar::{
    finite, polar_to_wirtinger, PlanePoint, PolarDerivPair, WirtingerPair, DEFAULT_RADIUS_FLOOR,
};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// `e^e`, the seam radius of the log-log map.
pub fn seam_radius<T: Real>() -> T {
    T::E().exp()
}

/// Radially symmetric map `f(z) = ρ(|z - c|) (z - c)/|z - c|` given by knots
/// `(r_k, ρ_k)`, interpolated by a monotone cubic in `(ln r, ln ρ)`. The center
/// itself maps to the origin.
///
/// Knot slopes `d ln ρ / d ln r` are either estimated from the data or supplied
/// one-sided (left, right); a knot whose two slopes differ is a kink of the map.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable<T> {
    knots: Vec<T>,
    rho: Vec<T>,
    center: PlanePoint<T>,
    slopes: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Real> RadialTable<T> {
    pub fn new(knots: Vec<T>, rho: Vec<T>, center: PlanePoint<T>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != rho.len() {
            return Err(Error::InvalidParameter(
                "radial table needs at least two (r, rho) pairs of equal length".into(),
            ));
        }
        if knots.iter().chain(&rho).any(|v| !v.is_finite() || *v <= T::zero()) {
            return Err(Error::InvalidParameter("radial table entries must be finite and positive".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("radial table knots must be strictly ascending".into()));
        }
        if rho.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("radial table values must be strictly increasing".into()));
        }
        Ok(Self { knots, rho, center, slopes: None })
    }

    /// Table with known one-sided log-log slopes at every knot. Slopes are
    /// scaled down where needed to keep each cubic piece monotone.
    pub fn with_log_slopes(
        knots: Vec<T>,
        rho: Vec<T>,
        mut left: Vec<T>,
        mut right: Vec<T>,
        center: PlanePoint<T>,
    ) -> Result<Self> {
        let mut t = Self::new(knots, rho, center)?;
        let n = t.knots.len();
        if left.len() != n || right.len() != n {
            return Err(Error::InvalidParameter("one left and one right slope per knot".into()));
        }
        if left.iter().chain(&right).any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidParameter("knot slopes must be finite and non-negative".into()));
        }
        let nine = T::lit(9.0);
        for k in 0..n - 1 {
            let d = t.secant(k);
            let (a, b) = (right[k] / d, left[k + 1] / d);
            let norm = a * a + b * b;
            if norm > nine {
                let tau = T::lit(3.0) / norm.sqrt();
                right[k] = right[k] * tau;
                left[k + 1] = left[k + 1] * tau;
            }
        }
        t.slopes = Some((left, right));
        Ok(t)
    }

    /// Interior knots where the one-sided slopes disagree.
    pub fn kinks(&self) -> Vec<T> {
        let Some((left, right)) = &self.slopes else {
            return Vec::new();
        };
        let tol = T::lit(1e-12);
        (1..self.knots.len() - 1)
            .filter(|&k| (left[k] - right[k]).abs() > tol * left[k].abs().max(right[k].abs()))
            .map(|k| self.knots[k])
            .collect()
    }

    fn slope_left(&self, k: usize) -> T {
        self.slopes.as_ref().map_or_else(|| self.slope(k), |(l, _)| l[k])
    }

    fn slope_right(&self, k: usize) -> T {
        self.slopes.as_ref().map_or_else(|| self.slope(k), |(_, r)| r[k])
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn rho_values(&self) -> &[T] {
        &self.rho
    }

    pub fn center(&self) -> PlanePoint<T> {
        self.center
    }

    pub fn r_min(&self) -> T {
        self.knots[0]
    }

    pub fn r_max(&self) -> T {
        self.knots[self.knots.len() - 1]
    }

    fn log_x(&self, k: usize) -> T {
        self.knots[k].ln()
    }

    fn log_y(&self, k: usize) -> T {
        self.rho[k].ln()
    }

    fn secant(&self, k: usize) -> T {
        (self.log_y(k + 1) - self.log_y(k)) / (self.log_x(k + 1) - self.log_x(k))
    }

    /// Shape-preserving knot slope in log-log coordinates (Fritsch-Butland
    /// interior weights, three-point one-sided ends).
    fn slope(&self, k: usize) -> T {
        let n = self.knots.len();
        if n == 2 {
            return self.secant(0);
        }
        let three = T::lit(3.0);
        let two = T::lit(2.0);
        if k == 0 || k == n - 1 {
            let (h0, h1, d0, d1) = if k == 0 {
                (
                    self.log_x(1) - self.log_x(0),
                    self.log_x(2) - self.log_x(1),
                    self.secant(0),
                    self.secant(1),
                )
            } else {
                (
                    self.log_x(n - 1) - self.log_x(n - 2),
                    self.log_x(n - 2) - self.log_x(n - 3),
                    self.secant(n - 2),
                    self.secant(n - 3),
                )
            };
            let d = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if d.signum() != d0.signum() {
                return T::zero();
            }
            if d0.signum() != d1.signum() && d.abs() > three * d0.abs() {
                return three * d0;
            }
            return d;
        }
        let (dl, dr) = (self.secant(k - 1), self.secant(k));
        if dl * dr <= T::zero() {
            return T::zero();
        }
        let hl = self.log_x(k) - self.log_x(k - 1);
        let hr = self.log_x(k + 1) - self.log_x(k);
        let w1 = two * hr + hl;
        let w2 = hr + two * hl;
        (w1 + w2) / (w1 / dl + w2 / dr)
    }

    /// `(ρ(r), ρ'(r))`.
    pub fn profile(&self, r: T) -> Result<(T, T)> {
        let tiny = T::lit(1e-13);
        if !(r >= self.r_min() * (T::one() - tiny) && r <= self.r_max() * (T::one() + tiny)) {
            return Err(Error::OutOfDomain(r.as_f64(), 0.0));
        }
        let r = r.max(self.r_min()).min(self.r_max());
        let k = match self.knots.binary_search_by(|x| x.partial_cmp(&r).expect("finite knots")) {
            Ok(k) => {
                let m = if k + 1 == self.knots.len() { self.slope_left(k) } else { self.slope_right(k) };
                return Ok((self.rho[k], self.rho[k] / r * m));
            }
            Err(k) => k - 1,
        };
        let (x0, x1) = (self.log_x(k), self.log_x(k + 1));
        let h = x1 - x0;
        let s = (r.ln() - x0) / h;
        let (y0, y1) = (self.log_y(k), self.log_y(k + 1));
        let (m0, m1) = (self.slope_right(k) * h, self.slope_left(k + 1) * h);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        let y = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let six = T::lit(6.0);
        let four = T::lit(4.0);
        let dy_ds = (six * s2 - six * s) * y0
            + (three * s2 - four * s + one) * m0
            + (-six * s2 + six * s) * y1
            + (three * s2 - two * s) * m1;
        let rho = y.exp();
        Ok((rho, rho / r * (dy_ds / h)))
    }
}

/// Explicit test mappings.
#[derive(Debug, Clone, PartialEq)]
pub enum MappingSpec<T> {
    Identity,
    /// `f = a conj(z) + b z + c`.
    Linear { a: Cplx<T>, b: Cplx<T>, c: Cplx<T> },
    /// `f = z e^{2i ln|z|}`, area preserving.
    Spiral,
    /// `f = |z|^{1/α - 1} z`.
    Power { alpha: T },
    /// `f = (ln ln|z|)^{1/α} z/|z|` outside `|z| = e^e`, `e^{-e} z` inside.
    LogLog { alpha: T },
    RadialTable(RadialTable<T>),
}

impl<T: Real> MappingSpec<T> {
    pub fn linear(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>) -> Result<Self> {
        if !(finite(a) && finite(b) && finite(c)) {
            return Err(Error::NonFinite("linear map coefficients"));
        }
        if a.norm() == b.norm() {
            return Err(Error::InvalidParameter("linear map needs |A| != |B|".into()));
        }
        Ok(Self::Linear { a, b, c })
    }

    pub fn power(alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Power { alpha })
    }

    pub fn loglog(alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::LogLog { alpha })
    }

    /// Point about which the map is radially organized.
    pub fn center(&self) -> PlanePoint<T> {
        match self {
            Self::RadialTable(t) => t.center,
            _ => PlanePoint::origin(),
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Self::Identity | Self::Power { .. } | Self::LogLog { .. } | Self::RadialTable(_))
    }

    /// Radii about `z0` across which the map is not smooth (for tables: every
    /// interior knot, where the interpolant's curvature jumps). Only meaningful
    /// when `z0` is the map's own center; empty otherwise.
    pub fn radial_breakpoints(&self, z0: PlanePoint<T>) -> Vec<T> {
        if z0 != self.center() {
            return Vec::new();
        }
        match self {
            Self::LogLog { .. } => vec![seam_radius()],
            Self::RadialTable(t) => t.knots[1..t.knots.len() - 1].to_vec(),
            _ => Vec::new(),
        }
    }

    /// Radius about `z0` below which the map is undefined (zero for every
    /// variant defined on the whole plane).
    pub fn inner_radius(&self, z0: PlanePoint<T>) -> T {
        match self {
            Self::RadialTable(t) if z0 == t.center => t.r_min(),
            _ => T::zero(),
        }
    }

    /// Distance from `z` to the nearest point where the map fails to be smooth.
    pub fn smooth_margin(&self, z: PlanePoint<T>) -> T {
        let r = z.dist(self.center());
        match self {
            Self::Identity | Self::Linear { .. } => T::infinity(),
            Self::Spiral | Self::Power { .. } => r,
            Self::LogLog { .. } => (r - seam_radius()).abs(),
            Self::RadialTable(t) => {
                t.kinks().into_iter().fold((r - t.r_min()).min(t.r_max() - r), |m, k| m.min((r - k).abs()))
            }
        }
    }

    pub fn evaluate(&self, z: PlanePoint<T>) -> Result<PlanePoint<T>> {
        let zc = z.to_complex();
        let w = match self {
            Self::Identity => zc,
            Self::Linear { a, b, c } => a * zc.conj() + b * zc + c,
            Self::Spiral => {
                let r = zc.norm();
                if r == T::zero() {
                    Cplx::new(T::zero(), T::zero())
                } else {
                    zc * Cplx::from_polar(T::one(), T::lit(2.0) * r.ln())
                }
            }
            Self::Power { alpha } => {
                let r = zc.norm();
                if r == T::zero() {
                    Cplx::new(T::zero(), T::zero())
                } else {
                    zc * r.powf(alpha.recip() - T::one())
                }
            }
            Self::LogLog { alpha } => {
                let r = zc.norm();
                if r >= seam_radius() {
                    zc * (r.ln().ln().powf(alpha.recip()) / r)
                } else {
                    zc * (-T::E()).exp()
                }
            }
            Self::RadialTable(t) => {
                let w = zc - t.center.to_complex();
                let r = w.norm();
                if r == T::zero() {
                    Cplx::new(T::zero(), T::zero())
                } else {
                    let (rho, _) = t.profile(r).map_err(|_| Error::OutOfDomain(z.re.as_f64(), z.im.as_f64()))?;
                    w * (rho / r)
                }
            }
        };
        PlanePoint::from_complex(w)
    }

    /// Closed-form Wirtinger derivatives.
    pub fn wirtinger_analytic(&self, z: PlanePoint<T>) -> Result<WirtingerPair<T>> {
        let not_here = || Error::NotDifferentiableHere(z.re.as_f64(), z.im.as_f64());
        let zero = Cplx::new(T::zero(), T::zero());
        let zc = z.to_complex();
        let floor = T::lit(DEFAULT_RADIUS_FLOOR);
        match self {
            Self::Identity => Ok(WirtingerPair { d_z: Cplx::new(T::one(), T::zero()), d_zbar: zero }),
            Self::Linear { a, b, .. } => Ok(WirtingerPair { d_z: *b, d_zbar: *a }),
            Self::Spiral => {
                let r = zc.norm();
                if r < floor {
                    return Err(not_here());
                }
                let e = Cplx::from_polar(T::one(), T::lit(2.0) * r.ln());
                WirtingerPair::new(Cplx::new(T::one(), T::one()) * e, Cplx::<T>::i() * zc / zc.conj() * e)
            }
            Self::Power { alpha } => {
                let r = zc.norm();
                if r < floor {
                    return Err(not_here());
                }
                let e = zc / r;
                let d_r = e * (r.powf((T::one() - *alpha) / *alpha) / *alpha);
                let d_theta = Cplx::<T>::i() * e * r.powf(alpha.recip());
                polar_to_wirtinger(z, PlanePoint::origin(), PolarDerivPair::new(d_r, d_theta)?)
            }
            Self::LogLog { alpha } => {
                let r = zc.norm();
                let seam = seam_radius::<T>();
                if (r - seam).abs() <= T::lit(1e-12) * seam {
                    return Err(not_here());
                }
                if r < seam {
                    return Ok(WirtingerPair { d_z: Cplx::new((-T::E()).exp(), T::zero()), d_zbar: zero });
                }
                let e = zc / r;
                let ll = r.ln().ln();
                let d_r = e * (ll.powf((T::one() - *alpha) / *alpha) / (*alpha * r.ln() * r));
                let d_theta = Cplx::<T>::i() * e * ll.powf(alpha.recip());
                polar_to_wirtinger(z, PlanePoint::origin(), PolarDerivPair::new(d_r, d_theta)?)
            }
            Self::RadialTable(t) => {
                let w = zc - t.center.to_complex();
                let r = w.norm();
                if r < floor {
                    return Err(not_here());
                }
                let (rho, drho) = t.profile(r).map_err(|_| Error::OutOfDomain(z.re.as_f64(), z.im.as_f64()))?;
                let e = w / r;
                polar_to_wirtinger(z, t.center, PolarDerivPair::new(e * drho, Cplx::<T>::i() * e * rho)?)
            }
        }
    }

    /// Central-difference Wirtinger derivatives with step `h·max(1, |z|)`.
    pub fn wirtinger_fd(&self, z: PlanePoint<T>, h: T) -> Result<WirtingerPair<T>> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
        }
        let s = h * z.abs().max(T::one());
        if self.smooth_margin(z) <= s {
            return Err(Error::StencilCrossesSeam(z.re.as_f64(), z.im.as_f64()));
        }
        let at = |dx: T, dy: T| -> Result<Cplx<T>> {
            Ok(self.evaluate(PlanePoint { re: z.re + dx, im: z.im + dy })?.to_complex())
        };
        let zero = T::zero();
        let two_s = s + s;
        let f_x = (at(s, zero)? - at(-s, zero)?) / two_s;
        let f_y = (at(zero, s)? - at(zero, -s)?) / two_s;
        Ok(WirtingerPair::from_partials(f_x, f_y))
    }

    /// `n` samples `(θ_j, f(z0 + r e^{iθ_j}))` with `θ_j = 2πj/n`.
    pub fn circle_samples(&self, z0: PlanePoint<T>, r: T, n: usize) -> Result<Vec<(T, PlanePoint<T>)>> {
        if n < 8 {
            return Err(Error::InvalidParameter(format!("circle sampling needs n >= 8, got {n}")));
        }
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
        }
        let step = T::two_pi() / T::lit(n as f64);
        (0..n)
            .map(|j| {
                let theta = T::lit(j as f64) * step;
                Ok((theta, self.evaluate(PlanePoint::on_circle(z0, r, theta))?))
            })
            .collect()
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", alpha.as_f64())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_polar::{jacobian_wirtinger, wirtinger_to_polar};

    fn p(re: f64, im: f64) -> PlanePoint<f64> {
        PlanePoint::new(re, im).unwrap()
    }

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Cplx::new(re, im)
    }

    /// Deterministic scatter of points in an annulus, skipping a band around `avoid`.
    fn scatter(count: usize, r_lo: f64, r_hi: f64, avoid: Option<f64>) -> Vec<PlanePoint<f64>> {
        let mut out = Vec::new();
        let mut k = 0u64;
        while out.len() < count {
            k += 1;
            let u = ((k as f64) * 0.618_033_988_749_895).fract();
            let v = ((k as f64) * 0.754_877_666_246_693).fract();
            let r = r_lo * (r_hi / r_lo).powf(u);
            if let Some(s) = avoid {
                if (r - s).abs() < 1e-2 * s {
                    continue;
                }
            }
            out.push(PlanePoint::on_circle(p(0.0, 0.0), r, v * std::f64::consts::TAU));
        }
        out
    }

    fn catalog() -> Vec<MappingSpec<f64>> {
        vec![
            MappingSpec::Identity,
            MappingSpec::linear(c(0.5, 0.2), c(1.0, -0.3), c(2.0, 1.0)).unwrap(),
            MappingSpec::Spiral,
            MappingSpec::power(0.5).unwrap(),
            MappingSpec::power(2.0).unwrap(),
            MappingSpec::loglog(1.0).unwrap(),
            MappingSpec::loglog(2.0).unwrap(),
            table(),
        ]
    }

    fn table() -> MappingSpec<f64> {
        let knots: Vec<f64> = (0..40).map(|k| 0.1 * 1.2f64.powi(k)).collect();
        let rho: Vec<f64> = knots.iter().map(|r| r.powf(0.7) * (1.0 + 0.1 * r.ln().sin())).collect();
        MappingSpec::RadialTable(RadialTable::new(knots, rho, p(0.0, 0.0)).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let f = MappingSpec::power(2.0).unwrap().evaluate(p(4.0, 0.0)).unwrap();
        assert!((f.re - 2.0).abs() < 1e-15 && f.im == 0.0);
        let f = MappingSpec::Spiral.evaluate(p(1.0, 0.0)).unwrap();
        assert_eq!((f.re, f.im), (1.0, 0.0));
        for alpha in [0.5, 1.0, 3.0] {
            let seam = seam_radius::<f64>();
            let m = MappingSpec::loglog(alpha).unwrap();
            let f = m.evaluate(p(seam, 0.0)).unwrap();
            assert!((f.re - 1.0).abs() < 1e-15 && f.im == 0.0);
            let below = m.evaluate(p(seam * (1.0 - 1e-12), 0.0)).unwrap();
            let above = m.evaluate(p(seam * (1.0 + 1e-12), 0.0)).unwrap();
            assert!((below.re - above.re).abs() < 1e-10);
        }
        assert_eq!(MappingSpec::power(3.0).unwrap().evaluate(p(0.0, 0.0)).unwrap(), p(0.0, 0.0));
    }

    #[test]
    fn constructors_validate() {
        assert!(MappingSpec::power(0.0).is_err());
        assert!(MappingSpec::loglog(-1.0).is_err());
        assert!(MappingSpec::linear(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)).is_err());
        assert!(RadialTable::new(vec![1.0, 2.0], vec![2.0, 1.0], p(0.0, 0.0)).is_err());
        assert!(RadialTable::new(vec![2.0, 1.0], vec![1.0, 2.0], p(0.0, 0.0)).is_err());
        assert!(RadialTable::new(vec![1.0], vec![1.0], p(0.0, 0.0)).is_err());
    }

    #[test]
    fn radial_table_domain() {
        let t = table();
        assert!(matches!(t.evaluate(p(0.05, 0.0)), Err(Error::OutOfDomain(..))));
        assert!(t.evaluate(p(0.2, 0.0)).is_ok());
        assert_eq!(t.evaluate(p(0.0, 0.0)).unwrap(), p(0.0, 0.0));
    }

    #[test]
    fn radial_table_reproduces_power_laws_exactly() {
        let knots: Vec<f64> = (0..30).map(|k| 1.3f64.powi(k)).collect();
        let rho: Vec<f64> = knots.iter().map(|r| 3.0 * r.powf(0.5)).collect();
        let t = RadialTable::new(knots, rho, p(0.0, 0.0)).unwrap();
        for r in [1.0, 1.1, 7.7, 123.4, 1000.0] {
            let (rho, d) = t.profile(r).unwrap();
            assert!((rho - 3.0 * r.sqrt()).abs() < 1e-12 * rho);
            assert!((d - 1.5 / r.sqrt()).abs() < 1e-11 * d);
        }
    }

    #[test]
    fn radial_table_is_monotone_between_knots() {
        let knots = vec![1.0, 2.0, 3.0, 10.0, 11.0];
        let rho = vec![1.0, 1.01, 5.0, 5.1, 20.0];
        let t = RadialTable::new(knots, rho, p(0.0, 0.0)).unwrap();
        let mut prev = 0.0;
        for k in 0..=1000 {
            let r = 1.0 + 10.0 * k as f64 / 1000.0;
            let (v, d) = t.profile(r).unwrap();
            assert!(v >= prev && d >= 0.0, "r = {r}");
            prev = v;
        }
    }

    #[test]
    fn analytic_examples() {
        let lin = MappingSpec::linear(c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let wp = lin.wirtinger_analytic(p(3.0, -1.0)).unwrap();
        assert_eq!((wp.d_z, wp.d_zbar), (c(1.0, 0.0), c(0.5, 0.0)));

        let z = p(0.8, 0.6);
        let wp = MappingSpec::Spiral.wirtinger_analytic(z).unwrap();
        assert!((wp.d_z - c(1.0, 1.0)).norm() < 1e-15);
        assert!((wp.d_zbar - Cplx::<f64>::i() * z.to_complex() / z.to_complex().conj()).norm() < 1e-15);

        let alpha = 2.0;
        let (r, th) = (3.0f64, 1.1f64);
        let z = PlanePoint::on_circle(p(0.0, 0.0), r, th);
        let wp = MappingSpec::power(alpha).unwrap().wirtinger_analytic(z).unwrap();
        let pd = wirtinger_to_polar(z, p(0.0, 0.0), wp).unwrap();
        let e = Cplx::from_polar(1.0, th);
        assert!((pd.d_r - e * (r.powf((1.0 - alpha) / alpha) / alpha)).norm() < 1e-14);
        assert!((pd.d_theta - Cplx::<f64>::i() * e * r.powf(1.0 / alpha)).norm() < 1e-14);
    }

    #[test]
    fn refuses_non_smooth_points() {
        assert!(matches!(
            MappingSpec::Spiral.wirtinger_analytic(p(0.0, 0.0)),
            Err(Error::NotDifferentiableHere(..))
        ));
        let seam = seam_radius::<f64>();
        let ll = MappingSpec::loglog(1.0).unwrap();
        assert!(matches!(ll.wirtinger_analytic(p(seam, 0.0)), Err(Error::NotDifferentiableHere(..))));
        assert!(matches!(ll.wirtinger_fd(p(seam + 1e-5, 0.0), 1e-5), Err(Error::StencilCrossesSeam(..))));
        assert!(matches!(
            MappingSpec::power(2.0).unwrap().wirtinger_fd(p(1e-7, 0.0), 1e-5),
            Err(Error::StencilCrossesSeam(..))
        ));
    }

    #[test]
    fn fd_identity_is_exact() {
        let wp = MappingSpec::Identity.wirtinger_fd(p(1.0, 1.0), 1e-5).unwrap();
        assert!((wp.d_z - c(1.0, 0.0)).norm() < 1e-9);
        assert!(wp.d_zbar.norm() < 1e-9);
    }

    #[test]
    fn fd_matches_analytic_on_catalog() {
        for m in catalog() {
            let (lo, hi) = match &m {
                MappingSpec::RadialTable(t) => (t.r_min() * 1.01, t.r_max() * 0.99),
                _ => (0.2, 50.0),
            };
            let avoid = if matches!(m, MappingSpec::LogLog { .. }) { Some(seam_radius()) } else { None };
            for z in scatter(100, lo, hi, avoid) {
                let a = m.wirtinger_analytic(z).unwrap();
                let f = m.wirtinger_fd(z, 1e-5).unwrap();
                let err = (a.d_z - f.d_z).norm().max((a.d_zbar - f.d_zbar).norm());
                assert!(err <= 1e-7, "{m:?} at {z:?}: {err:e}");
            }
        }
    }

    #[test]
    fn fd_is_second_order() {
        let maps = [
            MappingSpec::Spiral,
            MappingSpec::power(0.5).unwrap(),
            MappingSpec::power(2.0).unwrap(),
            MappingSpec::loglog(1.0).unwrap(),
        ];
        for m in maps {
            for z in scatter(10, 0.5, 40.0, Some(seam_radius())) {
                let a = m.wirtinger_analytic(z).unwrap();
                let e = |h: f64| {
                    let f = m.wirtinger_fd(z, h).unwrap();
                    (a.d_z - f.d_z).norm() + (a.d_zbar - f.d_zbar).norm()
                };
                if matches!(m, MappingSpec::LogLog { .. }) && z.abs() < seam_radius() {
                    continue;
                }
                let ratio = e(2e-3) / e(1e-3);
                assert!((3.0..=5.0).contains(&ratio), "{m:?} at {z:?}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn jacobian_positive_on_catalog() {
        for m in catalog() {
            let (lo, hi) = match &m {
                MappingSpec::RadialTable(t) => (t.r_min(), t.r_max()),
                _ => (1e-3, 1e3),
            };
            for z in scatter(200, lo, hi, Some(seam_radius())) {
                let j = jacobian_wirtinger(m.wirtinger_analytic(z).unwrap());
                assert!(j > 0.0, "{m:?} at {z:?}");
            }
        }
    }

    #[test]
    fn spiral_preserves_area() {
        for z in scatter(1000, 1e-3, 1e3, None) {
            let j = jacobian_wirtinger(MappingSpec::Spiral.wirtinger_analytic(z).unwrap());
            assert!((j - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_samples_layout() {
        let s = MappingSpec::Identity.circle_samples(p(0.0, 0.0), 1.0, 8).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (k, w) in want.iter().enumerate() {
            assert!((s[2 * k].1.to_complex() - w).norm() < 1e-15);
        }
        assert!(s.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(MappingSpec::power(2.0).unwrap().circle_samples(p(0.0, 0.0), 4.0, 1).is_err());
        for (_, f) in MappingSpec::Spiral.circle_samples(p(0.0, 0.0), 1.0, 8).unwrap() {
            assert!((f.abs() - 1.0).abs() < 1e-15);
        }
    }
}
