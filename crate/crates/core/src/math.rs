//! Thin wrappers over `libm` so the rest of the crate reads like ordinary float code.

pub(crate) use core::f64::consts::PI;

pub(crate) const TAU: f64 = 2.0 * PI;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// Euclidean norm of a slice, accumulated in index order.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// Nodes and weights of the 8-point Gauss-Legendre rule on [-1, 1].
#[allow(clippy::excessive_precision)]
pub(crate) const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// Gauss-Legendre approximation of the integral of `f` over `[a, b]`.
pub(crate) fn gauss8(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * GAUSS8.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Adaptive Gauss-Legendre quadrature: bisect until the 8-point rule and its
/// two-panel refinement agree to `tol`.
pub(crate) fn adaptive_gauss(a: f64, b: f64, tol: f64, f: &mut impl FnMut(f64) -> f64) -> f64 {
    fn recurse(a: f64, b: f64, whole: f64, tol: f64, depth: u32, f: &mut impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let left = gauss8(a, mid, &mut *f);
        let right = gauss8(mid, b, &mut *f);
        let refined = left + right;
        if depth == 0 || (refined - whole).abs() <= tol {
            return refined;
        }
        recurse(a, mid, left, 0.5 * tol, depth - 1, f) + recurse(mid, b, right, 0.5 * tol, depth - 1, f)
    }
    let whole = gauss8(a, b, &mut *f);
    recurse(a, b, whole, tol, 30, f)
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_max(mut a: f64, mut b: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = 0.5 * (sqrt(5.0) - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_degree_fifteen_exactly() {
        let v = gauss8(0.0, 2.0, |x| powi(x, 15));
        assert!((v - powi(2.0, 16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_gauss_handles_a_peaked_integrand() {
        let mut f = |x: f64| 1.0 / (1e-4 + x * x);
        let v = adaptive_gauss(-1.0, 1.0, 1e-10, &mut f);
        let exact = 2.0 * libm::atan(1.0 / 1e-2) / 1e-2;
        assert!((v - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn golden_section_finds_the_peak() {
        let (x, _) = golden_max(0.0, 3.0, 80, |x| -(x - 1.25) * (x - 1.25));
        assert!((x - 1.25).abs() < 1e-8);
    }
}
