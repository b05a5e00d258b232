use serde::{Deserialize, Serialize};

use super::{Immersion, Jet, Vec3};

const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Derivatives of `x` by fourth-order central differences.
///
/// First derivatives use `h = eps^(1/5)`, second and mixed derivatives
/// `h = eps^(1/6)`, each scaled by `max(1, |arg|)`; these balance the
/// truncation and round-off terms of the respective stencils.
pub fn finite_difference_jet<F>(x: F, t: f64, s: f64) -> Jet
where
    F: Fn(f64, f64) -> Vec3,
{
    let eps = f64::EPSILON;
    let h1t = eps.powf(0.2) * t.abs().max(1.0);
    let h1s = eps.powf(0.2) * s.abs().max(1.0);
    let h2t = eps.powf(1.0 / 6.0) * t.abs().max(1.0);
    let h2s = eps.powf(1.0 / 6.0) * s.abs().max(1.0);

    let x0 = x(t, s);
    let d1 = |f: &dyn Fn(f64) -> Vec3, h: f64| D1.iter().fold(Vec3::zeros(), |acc, &(k, w)| acc + f(k * h) * w) / (12.0 * h);
    let d2 = |f: &dyn Fn(f64) -> Vec3, h: f64| {
        (-f(2.0 * h) + f(h) * 16.0 - x0 * 30.0 + f(-h) * 16.0 - f(-2.0 * h)) / (12.0 * h * h)
    };

    let x_t = d1(&|d| x(t + d, s), h1t);
    let x_s = d1(&|d| x(t, s + d), h1s);
    let x_tt = d2(&|d| x(t + d, s), h2t);
    let x_ss = d2(&|d| x(t, s + d), h2s);
    let mut x_ts = Vec3::zeros();
    for &(ki, wi) in &D1 {
        for &(kj, wj) in &D1 {
            x_ts += x(t + ki * h2t, s + kj * h2s) * (wi * wj);
        }
    }
    x_ts /= 144.0 * h2t * h2s;
    Jet { x: x0, x_t, x_s, x_tt, x_ts, x_ss }
}

/// Immersion given by a closure; derivatives by finite differences.
pub struct FnImmersion<F>(pub F);

impl<F> std::fmt::Debug for FnImmersion<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("FnImmersion")
    }
}

impl<F> Immersion for FnImmersion<F>
where
    F: Fn(f64, f64) -> Vec3 + Send + Sync,
{
    fn position(&self, t: f64, theta: f64) -> Vec3 {
        (self.0)(t, theta)
    }
}

/// One term `coefficient * T_cheb(s(t)) * {cos, sin}(fourier * theta)` of
/// a coordinate of the immersion, where `s` maps the t-range onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierChebyshevTerm {
    /// Coordinate index 0, 1 or 2.
    pub component: usize,
    pub cheb: usize,
    pub fourier: usize,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Immersion expanded in Chebyshev polynomials in `t` and a Fourier series
/// in `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFourier {
    pub t_range: (f64, f64),
    pub terms: Vec<FourierChebyshevTerm>,
    max_cheb: usize,
}

impl ChebyshevFourier {
    pub fn new(t_range: (f64, f64), terms: Vec<FourierChebyshevTerm>) -> Self {
        let max_cheb = terms.iter().map(|t| t.cheb).max().unwrap_or(0);
        ChebyshevFourier { t_range, terms, max_cheb }
    }
}

impl Immersion for ChebyshevFourier {
    fn position(&self, t: f64, theta: f64) -> Vec3 {
        let (a, b) = self.t_range;
        let s = (2.0 * t - (a + b)) / (b - a);
        // Recurrence is valid outside [-1, 1] too, as needed by the stencils.
        let mut cheb = vec![1.0; self.max_cheb + 1];
        if self.max_cheb >= 1 {
            cheb[1] = s;
        }
        for k in 2..=self.max_cheb {
            cheb[k] = 2.0 * s * cheb[k - 1] - cheb[k - 2];
        }
        let mut x = Vec3::zeros();
        for term in &self.terms {
            let (sn, cs) = (term.fourier as f64 * theta).sin_cos();
            x[term.component] += cheb[term.cheb] * (term.cos * cs + term.sin * sn);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_jet_matches_closed_form() {
        let f = |t: f64, s: f64| Vec3::new(t.cosh() * s.cos(), t.cosh() * s.sin(), t);
        for &(t, s) in &[(0.0, 0.0), (0.7, 2.0), (-1.1, 5.5)] {
            let j = finite_difference_jet(f, t, s);
            let (ch, sh, c, sn) = (t.cosh(), t.sinh(), s.cos(), s.sin());
            assert!((j.x_t - Vec3::new(sh * c, sh * sn, 1.0)).amax() < 1e-10, "{}", (j.x_t - Vec3::new(sh * c, sh * sn, 1.0)).amax());
            assert!((j.x_s - Vec3::new(-ch * sn, ch * c, 0.0)).amax() < 1e-10, "{}", (j.x_s - Vec3::new(-ch * sn, ch * c, 0.0)).amax());
            assert!((j.x_tt - Vec3::new(ch * c, ch * sn, 0.0)).amax() < 1e-9);
            let e = (j.x_ts - Vec3::new(-sh * sn, sh * c, 0.0)).amax();
            assert!(e < 1e-8, "{e}");
            assert!((j.x_ss - Vec3::new(-ch * c, -ch * sn, 0.0)).amax() < 1e-9);
        }
    }

    #[test]
    fn chebyshev_fourier_reproduces_polar_disk() {
        // r = 0.5 + 0.5 s on [0, 1]: T_0 and T_1 with weight 0.5.
        let terms = vec![
            FourierChebyshevTerm { component: 0, cheb: 0, fourier: 1, cos: 0.5, sin: 0.0 },
            FourierChebyshevTerm { component: 0, cheb: 1, fourier: 1, cos: 0.5, sin: 0.0 },
            FourierChebyshevTerm { component: 1, cheb: 0, fourier: 1, cos: 0.0, sin: 0.5 },
            FourierChebyshevTerm { component: 1, cheb: 1, fourier: 1, cos: 0.0, sin: 0.5 },
        ];
        let cf = ChebyshevFourier::new((0.0, 1.0), terms);
        let x = cf.position(0.25, 1.0);
        assert!((x - Vec3::new(0.25 * 1f64.cos(), 0.25 * 1f64.sin(), 0.0)).amax() < 1e-15);
    }
}
