//! Quadrature kernels: pairwise summation, periodic trapezoid on circles,
//! adaptive Gauss-Kronrod on intervals, and golden-section refinement.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sum in a fixed binary-tree order. Results depend only on the slice contents,
/// never on how the samples were produced.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Periodic trapezoid rule on `n` uniform angles `θ_j = 2πj/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleQuadrature {
    n: usize,
}

impl Default for CircleQuadrature {
    fn default() -> Self {
        Self { n: 1024 }
    }
}

impl CircleQuadrature {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter(format!("circle quadrature needs n >= 8, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn doubled(&self) -> Self {
        Self { n: 2 * self.n }
    }

    pub fn angles<T: Real>(&self) -> impl Iterator<Item = T> + '_ {
        let step = T::two_pi() / T::lit(self.n as f64);
        (0..self.n).map(move |j| T::lit(j as f64) * step)
    }

    /// Angular mean `(1/2π) ∫ g(θ) dθ`.
    pub fn mean<T, F>(&self, mut g: F) -> Result<T>
    where
        T: Real,
        F: FnMut(T) -> Result<T>,
    {
        let mut samples = Vec::with_capacity(self.n);
        for theta in self.angles::<T>() {
            let v = g(theta)?;
            if !v.is_finite() {
                return Err(Error::QuadratureFailure(format!(
                    "non-finite sample at theta = {}",
                    theta.as_f64()
                )));
            }
            samples.push(v);
        }
        Ok(pairwise_sum(&samples) / T::lit(self.n as f64))
    }

    /// `∫_0^{2π} g(θ) dθ`.
    pub fn integrate<T, F>(&self, g: F) -> Result<T>
    where
        T: Real,
        F: FnMut(T) -> Result<T>,
    {
        Ok(self.mean(g)? * T::two_pi())
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod<T, F>(f: &mut F, a: T, b: T) -> Result<Segment<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let fc = f(center)?;
    let mut gauss = fc * T::lit(WG[3]);
    let mut kron = fc * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(center - dx)? + f(center + dx)?;
        kron = kron + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{}, {}]",
            a.as_f64(),
            b.as_f64()
        )));
    }
    Ok(Segment { a, b, value, error })
}

/// Tolerances and limits for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self { abs_tol: T::lit(1e-11), rel_tol: T::lit(1e-12), max_intervals: 2000 }
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
/// Every breakpoint strictly inside the interval starts its own segment.
pub fn adaptive<T, F>(
    mut f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    opts: AdaptiveOptions<T>,
) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::DomainError("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Integral { value: T::zero(), error: T::zero(), intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let mut cuts: Vec<T> = breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(kronrod(&mut f, w[0], w[1])?);
    }
    loop {
        let (total, err) = heap
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol {
            let mut segs: Vec<_> = heap.into_vec();
            segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
            let vals: Vec<T> = segs.iter().map(|s| s.value).collect();
            return Ok(Integral { value: sign * pairwise_sum(&vals), error: err, intervals: segs.len() });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {:e} above tolerance {:e} after {} intervals",
                err.as_f64(),
                tol.as_f64(),
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureFailure("interval cannot be bisected further".into()));
        }
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
    }
}

/// Golden-section search for a minimizer of `g` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`.
pub fn golden_section_min<T, F>(mut g: F, mut a: T, mut b: T, tol: T) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = g(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
