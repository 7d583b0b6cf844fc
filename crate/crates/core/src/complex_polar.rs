//! Plane/polar coordinate calculus.
//!
//! With `w = z - z0 = r e^{iθ}` the polar derivatives of a mapping relate to its
//! Wirtinger derivatives through
//!
//! ```text
//! r f_r = w f_z + conj(w) f_zbar
//! f_θ   = i (w f_z - conj(w) f_zbar)
//! ```
//!
//! and the Jacobian can be read off either bundle:
//! `J = |f_z|² - |f_zbar|² = Im(conj(f_r) f_θ) / r`.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Smallest `|z - z0|` accepted by the polar conversions.
pub(crate) fn finite<T: Real>(z: Cplx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub const DEFAULT_RADIUS_FLOOR: f64 = 1e-14;

/// A finite point of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanePoint<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> PlanePoint<T> {
    pub fn new(re: T, im: T) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite("PlanePoint"));
        }
        Ok(Self { re, im })
    }

    pub fn origin() -> Self {
        Self { re: T::zero(), im: T::zero() }
    }

    pub fn from_complex(z: Cplx<T>) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    #[inline]
    pub fn to_complex(self) -> Cplx<T> {
        Cplx::new(self.re, self.im)
    }

    /// `center + r e^{iθ}`.
    pub fn on_circle(center: Self, r: T, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self { re: center.re + r * c, im: center.im + r * s }
    }

    pub fn abs(self) -> T {
        self.re.hypot(self.im)
    }

    pub fn dist(self, other: Self) -> T {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

/// Polar form of a point about a center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarOffset<T> {
    pub center: PlanePoint<T>,
    pub r: T,
    /// Angle in `[0, 2π)`.
    pub theta: T,
}

impl<T: Real> PolarOffset<T> {
    pub fn new(center: PlanePoint<T>, r: T, theta: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
        }
        Ok(Self { center, r, theta: normalize_angle(theta) })
    }

    pub fn from_point(z: PlanePoint<T>, center: PlanePoint<T>) -> Result<Self> {
        let w = z.to_complex() - center.to_complex();
        let r = w.norm();
        if !(r > T::zero()) {
            return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
        }
        Ok(Self { center, r, theta: normalize_angle(w.arg()) })
    }

    pub fn to_point(self) -> PlanePoint<T> {
        PlanePoint::on_circle(self.center, self.r, self.theta)
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn normalize_angle<T: Real>(theta: T) -> T {
    let tau = T::two_pi();
    let t = theta % tau;
    let t = if t < T::zero() { t + tau } else { t };
    // `t + tau` can round up to exactly tau for tiny negative inputs.
    if t >= tau {
        T::zero()
    } else {
        t
    }
}

/// `(f_z, f_zbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerPair<T> {
    pub d_z: Cplx<T>,
    pub d_zbar: Cplx<T>,
}

impl<T: Real> WirtingerPair<T> {
    pub fn new(d_z: Cplx<T>, d_zbar: Cplx<T>) -> Result<Self> {
        if !finite(d_z) || !finite(d_zbar) {
            return Err(Error::NonFinite("WirtingerPair"));
        }
        Ok(Self { d_z, d_zbar })
    }

    /// Assembles the pair from Cartesian partials `f_x`, `f_y`.
    pub fn from_partials(f_x: Cplx<T>, f_y: Cplx<T>) -> Self {
        let half = T::lit(0.5);
        let i = Cplx::<T>::i();
        Self { d_z: (f_x - i * f_y) * half, d_zbar: (f_x + i * f_y) * half }
    }

    /// `(f_x, f_y)`.
    pub fn partials(&self) -> (Cplx<T>, Cplx<T>) {
        (self.d_z + self.d_zbar, Cplx::<T>::i() * (self.d_z - self.d_zbar))
    }
}

/// `(f_r, f_θ)`: derivative per unit radius and per radian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDerivPair<T> {
    pub d_r: Cplx<T>,
    pub d_theta: Cplx<T>,
}

impl<T: Real> PolarDerivPair<T> {
    pub fn new(d_r: Cplx<T>, d_theta: Cplx<T>) -> Result<Self> {
        if !finite(d_r) || !finite(d_theta) {
            return Err(Error::NonFinite("PolarDerivPair"));
        }
        Ok(Self { d_r, d_theta })
    }
}

fn offset<T: Real>(z: PlanePoint<T>, z0: PlanePoint<T>, floor: T) -> Result<(Cplx<T>, T)> {
    let w = z.to_complex() - z0.to_complex();
    let r = w.norm();
    if !(r >= floor) || r == T::zero() {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: floor.as_f64() });
    }
    Ok((w, r))
}

pub fn wirtinger_to_polar<T: Real>(
    z: PlanePoint<T>,
    z0: PlanePoint<T>,
    wp: WirtingerPair<T>,
) -> Result<PolarDerivPair<T>> {
    wirtinger_to_polar_with_floor(z, z0, wp, T::lit(DEFAULT_RADIUS_FLOOR))
}

pub fn wirtinger_to_polar_with_floor<T: Real>(
    z: PlanePoint<T>,
    z0: PlanePoint<T>,
    wp: WirtingerPair<T>,
    floor: T,
) -> Result<PolarDerivPair<T>> {
    let (w, r) = offset(z, z0, floor)?;
    let a = w * wp.d_z;
    let b = w.conj() * wp.d_zbar;
    Ok(PolarDerivPair { d_r: (a + b) / r, d_theta: Cplx::<T>::i() * (a - b) })
}

pub fn polar_to_wirtinger<T: Real>(
    z: PlanePoint<T>,
    z0: PlanePoint<T>,
    pd: PolarDerivPair<T>,
) -> Result<WirtingerPair<T>> {
    polar_to_wirtinger_with_floor(z, z0, pd, T::lit(DEFAULT_RADIUS_FLOOR))
}

pub fn polar_to_wirtinger_with_floor<T: Real>(
    z: PlanePoint<T>,
    z0: PlanePoint<T>,
    pd: PolarDerivPair<T>,
    floor: T,
) -> Result<WirtingerPair<T>> {
    let (w, r) = offset(z, z0, floor)?;
    let radial = pd.d_r * r;
    let angular = Cplx::<T>::i() * pd.d_theta;
    let two = T::lit(2.0);
    Ok(WirtingerPair {
        d_z: (radial - angular) / (w * two),
        d_zbar: (radial + angular) / (w.conj() * two),
    })
}

/// `Im(conj(f_r) f_θ) / r`.
pub fn jacobian_polar<T: Real>(r: T, pd: PolarDerivPair<T>) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::DegenerateRadius { radius: r.as_f64(), floor: 0.0 });
    }
    Ok((pd.d_r.conj() * pd.d_theta).im / r)
}

/// `|f_z|² - |f_zbar|²`.
pub fn jacobian_wirtinger<T: Real>(wp: WirtingerPair<T>) -> T {
    wp.d_z.norm_sqr() - wp.d_zbar.norm_sqr()
}
