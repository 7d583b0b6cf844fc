//! Coefficient fields `K_{z0}`, their σ-form, the angular dilatation and its
//! circle averages.
//!
//! Setting `K ≡ 0` reduces the nonlinear equation to the linear Beltrami
//! equation with coefficient `(z - z0)/conj(z - z0)`; the zero field is kept
//! for that case.

use std::path::Path;

use crate::complex_polar::{jacobian_wirtinger, wirtinger_to_polar, PlanePoint};
use crate::error::{Error, Result};
use crate::growth::KappaProfile;
use crate::mappings::{seam_radius, MappingSpec};
use crate::quadrature::CircleQuadrature;
use crate::scalar::{Cplx, Real};

/// `J_f` at or below this multiple of `|f_z|² + |f_z̄|²` is treated as degenerate.
pub const DEFAULT_JACOBIAN_FLOOR: f64 = 1e-14;

/// Which derivative route feeds a pointwise evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode<T> {
    Analytic,
    FiniteDifference { h: T },
}

impl<T: Real> DerivativeMode<T> {
    pub fn derivatives(
        &self,
        map: &MappingSpec<T>,
        z: PlanePoint<T>,
    ) -> Result<crate::complex_polar::WirtingerPair<T>> {
        match *self {
            Self::Analytic => map.wirtinger_analytic(z),
            Self::FiniteDifference { h } => map.wirtinger_fd(z, h),
        }
    }
}

/// `|K|²` tabulated on a `(r, θ)` lattice, bilinear in `(ln r, θ)` and periodic in `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable<T> {
    radii: Vec<T>,
    thetas: Vec<T>,
    /// Row-major: `values[i * thetas.len() + j]` at `(radii[i], thetas[j])`.
    values: Vec<T>,
}

impl<T: Real> GridTable<T> {
    pub fn new(radii: Vec<T>, thetas: Vec<T>, values: Vec<T>) -> Result<Self> {
        if radii.len() < 2 || thetas.is_empty() || values.len() != radii.len() * thetas.len() {
            return Err(Error::InvalidParameter("grid table must be a full lattice with >= 2 radii".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= T::zero() {
            return Err(Error::InvalidParameter("grid radii must be positive and strictly ascending".into()));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0])
            || thetas[0] < T::zero()
            || thetas[thetas.len() - 1] >= T::two_pi()
        {
            return Err(Error::InvalidParameter("grid angles must be strictly ascending in [0, 2π)".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidParameter("grid |K|² values must be finite and non-negative".into()));
        }
        Ok(Self { radii, thetas, values })
    }

    /// Reads a CSV with header `r,theta,k2`, rows sorted by `(r, theta)`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["r", "theta", "k2"] {
            return Err(Error::Parse(format!("expected header r,theta,k2, got {:?}", header)));
        }
        let mut rows: Vec<[f64; 3]> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 cells", line + 2)));
            }
            let mut row = [0.0; 3];
            for (k, cell) in rec.iter().enumerate() {
                if cell.is_empty() {
                    return Err(Error::Parse(format!("row {}: missing cell", line + 2)));
                }
                row[k] = cell
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: bad number {cell:?}", line + 2)))?;
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("grid table has no rows".into()));
        }
        let first_r = rows[0][0];
        let n_theta = rows.iter().take_while(|row| row[0] == first_r).count();
        if !rows.len().is_multiple_of(n_theta) {
            return Err(Error::Parse("grid rows do not form a full (r, theta) lattice".into()));
        }
        let thetas: Vec<T> = rows[..n_theta].iter().map(|row| T::lit(row[1])).collect();
        let mut radii = Vec::new();
        for (i, block) in rows.chunks(n_theta).enumerate() {
            let r = block[0][0];
            if block.iter().any(|row| row[0] != r) {
                return Err(Error::Parse(format!("radius block {i} is ragged")));
            }
            if block.iter().zip(&thetas).any(|(row, t)| T::lit(row[1]) != *t) {
                return Err(Error::Parse(format!("radius block {i} uses different angles")));
            }
            radii.push(T::lit(r));
        }
        let values = rows.iter().map(|row| T::lit(row[2])).collect();
        Self::new(radii, thetas, values)
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    /// Interpolated `|K|²` at polar position `(r, θ)`.
    pub fn sample(&self, r: T, theta: T) -> Result<T> {
        let (lo, hi) = (self.radii[0], self.radii[self.radii.len() - 1]);
        if !(r >= lo && r <= hi) {
            return Err(Error::OutOfDomain(r.as_f64(), theta.as_f64()));
        }
        let i = match self.radii.binary_search_by(|x| x.partial_cmp(&r).expect("finite radii")) {
            Ok(i) => i.min(self.radii.len() - 2),
            Err(i) => i - 1,
        };
        let s = (r.ln() - self.radii[i].ln()) / (self.radii[i + 1].ln() - self.radii[i].ln());

        let theta = crate::complex_polar::normalize_angle(theta);
        let m = self.thetas.len();
        let (j0, j1, u) = if m == 1 {
            (0, 0, T::zero())
        } else {
            match self.thetas.iter().rposition(|&t| t <= theta) {
                Some(j) if j + 1 < m => {
                    (j, j + 1, (theta - self.thetas[j]) / (self.thetas[j + 1] - self.thetas[j]))
                }
                Some(j) => {
                    let gap = self.thetas[0] + T::two_pi() - self.thetas[j];
                    (j, 0, (theta - self.thetas[j]) / gap)
                }
                None => {
                    let gap = self.thetas[0] + T::two_pi() - self.thetas[m - 1];
                    (m - 1, 0, (theta + T::two_pi() - self.thetas[m - 1]) / gap)
                }
            }
        };
        let at = |ii: usize, jj: usize| self.values[ii * m + jj];
        let one = T::one();
        let lower = at(i, j0) * (one - u) + at(i, j1) * u;
        let upper = at(i + 1, j0) * (one - u) + at(i + 1, j1) * u;
        Ok(lower * (one - s) + upper * s)
    }
}

/// Closed-form and tabulated coefficient families.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind<T> {
    Zero,
    /// Coefficient solved by the linear map `a conj(z) + b z + c`.
    Linear { a: Cplx<T>, b: Cplx<T> },
    /// `-(w/conj w) e^{2i ln|w|}`.
    Spiral,
    /// `-√α w/conj w`.
    Power { alpha: T },
    /// `-√(α ln|w| ln ln|w|) w/conj w` for `|w| >= e^e`, `-w/conj w` inside.
    LogLog { alpha: T },
    /// `-√κ(|w|) w/conj w` for a radial profile κ.
    Radial(Box<KappaProfile<T>>),
    /// Only `|K|²` is known.
    Grid(GridTable<T>),
}

/// The coefficient `K_{z0}(z)`; `w = z - center` throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField<T> {
    pub kind: FieldKind<T>,
    pub center: PlanePoint<T>,
}

/// `σ_{z0}(z) = -i K_{z0}(z) conj(z - z0)` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaField<T> {
    pub kind: FieldKind<T>,
    pub center: PlanePoint<T>,
}

fn offset<T: Real>(center: PlanePoint<T>, z: PlanePoint<T>) -> Result<(Cplx<T>, T)> {
    let w = z.to_complex() - center.to_complex();
    let r = w.norm();
    let floor = T::lit(crate::complex_polar::DEFAULT_RADIUS_FLOOR);
    if !(r >= floor) {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: floor.as_f64() });
    }
    Ok((w, r))
}

/// `|K|²` of the closed-form families as a function of `r = |w|` alone, when it has one.
fn radial_modulus_sq<T: Real>(kind: &FieldKind<T>, r: T) -> Option<Result<T>> {
    Some(Ok(match kind {
        FieldKind::Zero => T::zero(),
        FieldKind::Spiral => T::one(),
        FieldKind::Power { alpha } => *alpha,
        FieldKind::LogLog { alpha } => {
            if r >= seam_radius() {
                *alpha * r.ln() * r.ln().ln()
            } else {
                T::one()
            }
        }
        FieldKind::Radial(profile) => return Some(profile.eval(r)),
        FieldKind::Linear { .. } | FieldKind::Grid(_) => return None,
    }))
}

impl<T: Real> CoefficientField<T> {
    pub fn new(kind: FieldKind<T>, center: PlanePoint<T>) -> Result<Self> {
        match &kind {
            FieldKind::Linear { a, b } if a.norm() == b.norm() => {
                return Err(Error::InvalidParameter("linear coefficient needs |A| != |B|".into()))
            }
            FieldKind::Power { alpha } | FieldKind::LogLog { alpha } if !(*alpha > T::zero()) => {
                return Err(Error::InvalidParameter("alpha must be positive".into()))
            }
            _ => {}
        }
        Ok(Self { kind, center })
    }

    pub fn at_origin(kind: FieldKind<T>) -> Result<Self> {
        Self::new(kind, PlanePoint::origin())
    }

    /// `K(z)`. Grid fields only carry `|K|²` and return `-|K| w/conj w`.
    pub fn value(&self, z: PlanePoint<T>) -> Result<Cplx<T>> {
        if matches!(self.kind, FieldKind::Zero) {
            return Ok(Cplx::new(T::zero(), T::zero()));
        }
        let (w, r) = offset(self.center, z)?;
        let phase = w / w.conj();
        Ok(match &self.kind {
            FieldKind::Zero => unreachable!(),
            FieldKind::Linear { a, b } => {
                let delta = (b.norm_sqr() - a.norm_sqr()).abs();
                (a * w.conj() - b * w) / (w.conj() * delta.sqrt())
            }
            FieldKind::Spiral => -phase * Cplx::from_polar(T::one(), T::lit(2.0) * r.ln()),
            FieldKind::Grid(g) => -phase * g.sample(r, w.arg())?.sqrt(),
            kind => -phase * radial_modulus_sq(kind, r).expect("radial family")?.sqrt(),
        })
    }

    /// `|K(z)|²`.
    pub fn modulus_sq(&self, z: PlanePoint<T>) -> Result<T> {
        if let FieldKind::Grid(g) = &self.kind {
            let (w, r) = offset(self.center, z)?;
            return g.sample(r, w.arg());
        }
        Ok(self.value(z)?.norm_sqr())
    }

    /// Radii about the center where the field jumps.
    pub fn radial_breakpoints(&self) -> Vec<T> {
        match &self.kind {
            FieldKind::LogLog { .. } => vec![seam_radius()],
            FieldKind::Radial(p) => p.breakpoints(),
            FieldKind::Grid(g) => g.radii().to_vec(),
            _ => Vec::new(),
        }
    }

    /// The σ-form of the same family.
    pub fn to_sigma(&self) -> SigmaField<T> {
        SigmaField { kind: self.kind.clone(), center: self.center }
    }
}

impl<T: Real> SigmaField<T> {
    /// Closed-form `σ(z)`.
    pub fn value(&self, z: PlanePoint<T>) -> Result<Cplx<T>> {
        if matches!(self.kind, FieldKind::Zero) {
            return Ok(Cplx::new(T::zero(), T::zero()));
        }
        let (w, r) = offset(self.center, z)?;
        let i = Cplx::<T>::i();
        Ok(match &self.kind {
            FieldKind::Zero => unreachable!(),
            FieldKind::Linear { a, b } => {
                let delta = (b.norm_sqr() - a.norm_sqr()).abs();
                -i * (a * w.conj() - b * w) / delta.sqrt()
            }
            FieldKind::Spiral => i * w * Cplx::from_polar(T::one(), T::lit(2.0) * r.ln()),
            FieldKind::Grid(_) => {
                return Err(Error::InvalidParameter("grid fields carry no phase; sigma is undefined".into()))
            }
            kind => i * w * radial_modulus_sq(kind, r).expect("radial family")?.sqrt(),
        })
    }
}

/// `σ = -i K(z) conj(z - z0)`.
#[allow(non_snake_case)]
pub fn sigma_from_K<T: Real>(field: &CoefficientField<T>, z: PlanePoint<T>) -> Result<Cplx<T>> {
    let (w, _) = offset(field.center, z)?;
    Ok(-Cplx::<T>::i() * field.value(z)? * w.conj())
}

/// `K = -σ(z) / (i conj(z - z0))`.
#[allow(non_snake_case)]
pub fn K_from_sigma<T: Real>(sigma: &SigmaField<T>, z: PlanePoint<T>) -> Result<Cplx<T>> {
    let (w, _) = offset(sigma.center, z)?;
    Ok(-sigma.value(z)? / (Cplx::<T>::i() * w.conj()))
}

/// `D_f(z, z0) = |f_θ|² / (r² J_f)` with analytic derivatives.
pub fn angular_dilatation<T: Real>(map: &MappingSpec<T>, z0: PlanePoint<T>, z: PlanePoint<T>) -> Result<T> {
    angular_dilatation_with(map, z0, z, DerivativeMode::Analytic)
}

pub fn angular_dilatation_with<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    z: PlanePoint<T>,
    mode: DerivativeMode<T>,
) -> Result<T> {
    let wp = mode.derivatives(map, z)?;
    let jac = jacobian_wirtinger(wp);
    if !(jac > T::lit(DEFAULT_JACOBIAN_FLOOR) * (wp.d_z.norm_sqr() + wp.d_zbar.norm_sqr())) {
        return Err(Error::NonPositiveJacobian { jacobian: jac.as_f64(), re: z.re.as_f64(), im: z.im.as_f64() });
    }
    let pd = wirtinger_to_polar(z, z0, wp)?;
    let r = z.dist(z0);
    Ok(pd.d_theta.norm_sqr() / (r * r * jac))
}

/// `d_f(z0, r)`: angular mean of `D_f` over the circle `|z - z0| = r`.
pub fn circle_average_d<T: Real>(
    map: &MappingSpec<T>,
    z0: PlanePoint<T>,
    r: T,
    q: CircleQuadrature,
) -> Result<T> {
    check_radius(r)?;
    q.mean(|theta| angular_dilatation(map, z0, PlanePoint::on_circle(z0, r, theta)))
}

/// `κ(z0, r)`: angular mean of `|K|²` over the circle of radius `r` about the field's center.
/// Fields whose modulus depends on `r` alone are evaluated at `r` directly, so a
/// circle sitting on a jump radius is assigned the outer branch.
pub fn kappa<T: Real>(field: &CoefficientField<T>, r: T, q: CircleQuadrature) -> Result<T> {
    check_radius(r)?;
    if let Some(v) = radial_modulus_sq(&field.kind, r) {
        return v;
    }
    q.mean(|theta| field.modulus_sq(PlanePoint::on_circle(field.center, r, theta)))
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
    }
    Ok(())
}
