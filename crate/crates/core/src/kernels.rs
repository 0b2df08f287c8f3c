//! Fundamental solution of the Laplacian in `n` dimensions.
//!
//! `S_n(ξ) = ln|ξ| / s_2` for `n = 2` and `|ξ|^{2-n} / ((2-n) s_n)` otherwise,
//! where `s_n` is the surface measure of the unit sphere. Formulas for `n ≥ 4`
//! are implemented but only `n ∈ {2, 3}` is exercised.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelDim(usize);

impl KernelDim {
    pub const TWO: KernelDim = KernelDim(2);
    pub const THREE: KernelDim = KernelDim(3);

    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension {n} < 2")));
        }
        Ok(KernelDim(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Measure of the unit sphere in R^n.
    pub fn sphere_measure(self) -> f64 {
        2.0 * PI.powf(self.0 as f64 / 2.0) / gamma_half(self.0)
    }
}

/// Γ(n/2) for positive integers n.
fn gamma_half(n: usize) -> f64 {
    let (mut g, mut x) = if n.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = n as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

fn radius(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check(n: KernelDim, xi: &[f64]) -> Result<f64> {
    if xi.len() != n.0 {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, kernel dimension is {}",
            xi.len(),
            n.0
        )));
    }
    let r = radius(xi);
    if r == 0.0 {
        return Err(Error::SingularEvaluation);
    }
    Ok(r)
}

pub fn eval_s(n: KernelDim, xi: &[f64]) -> Result<f64> {
    let r = check(n, xi)?;
    Ok(s_radial(n, r))
}

/// `S_n` as a function of `|ξ|`.
pub fn s_radial(n: KernelDim, r: f64) -> f64 {
    let sn = n.sphere_measure();
    if n.0 == 2 {
        r.ln() / sn
    } else {
        r.powf(2.0 - n.0 as f64) / ((2.0 - n.0 as f64) * sn)
    }
}

pub fn grad_s(n: KernelDim, xi: &[f64]) -> Result<Vec<f64>> {
    let r = check(n, xi)?;
    let c = 1.0 / (n.sphere_measure() * r.powi(n.0 as i32));
    Ok(xi.iter().map(|v| v * c).collect())
}

/// Second derivatives `∂_j ∂_k S_n(ξ) = (δ_jk |ξ|² − n ξ_j ξ_k) / (s_n |ξ|^{n+2})`.
pub fn hessian_s(n: KernelDim, xi: &[f64]) -> Result<Vec<Vec<f64>>> {
    let r = check(n, xi)?;
    let r2 = r * r;
    let c = 1.0 / (n.sphere_measure() * r.powi(n.0 as i32 + 2));
    let nf = n.0 as f64;
    Ok((0..n.0)
        .map(|j| {
            (0..n.0)
                .map(|k| c * (if j == k { r2 } else { 0.0 } - nf * xi[j] * xi[k]))
                .collect()
        })
        .collect())
}

/// Radial antiderivative `N` with `Δ N(|ξ|) = S_n(ξ)`.
pub fn eval_n(n: KernelDim, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    match n.0 {
        2 => Ok(r * r * (r.ln() - 1.0) / (8.0 * PI)),
        3 => Ok(-r / (8.0 * PI)),
        k => Err(Error::Unsupported(format!("radial antiderivative for n = {k}"))),
    }
}

/// Largest sampled value of `|ξ|^{|η|+n-2} |D^η S_n(ξ)|` over the given points.
pub fn growth_bound_report(n: KernelDim, eta: &[usize], samples: &[Vec<f64>]) -> Result<f64> {
    if eta.len() != n.0 {
        return Err(Error::InvalidArgument("multi-index length must equal n".into()));
    }
    let order: usize = eta.iter().sum();
    let idx: Vec<usize> = eta
        .iter()
        .enumerate()
        .flat_map(|(j, &m)| std::iter::repeat_n(j, m))
        .collect();
    let mut sup = 0.0f64;
    for xi in samples {
        let r = check(n, xi)?;
        let d = match order {
            1 => grad_s(n, xi)?[idx[0]],
            2 => hessian_s(n, xi)?[idx[0]][idx[1]],
            _ => return Err(Error::Unsupported(format!("|η| = {order}"))),
        };
        sup = sup.max(r.powi((order + n.0 - 2) as i32) * d.abs());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn values() {
        assert_eq!(eval_s(KernelDim::TWO, &[1.0, 0.0]).unwrap(), 0.0);
        assert!((eval_s(KernelDim::TWO, &[E, 0.0]).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((eval_s(KernelDim::THREE, &[0.0, 1.0, 0.0]).unwrap() + 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(matches!(
            eval_s(KernelDim::TWO, &[0.0, 0.0]),
            Err(Error::SingularEvaluation)
        ));
        assert!(matches!(
            grad_s(KernelDim::THREE, &[0.0; 3]),
            Err(Error::SingularEvaluation)
        ));
    }

    #[test]
    fn sphere_measures() {
        assert!((KernelDim::TWO.sphere_measure() - 2.0 * PI).abs() < 1e-14);
        assert!((KernelDim::THREE.sphere_measure() - 4.0 * PI).abs() < 1e-14);
        assert!((KernelDim::new(4).unwrap().sphere_measure() - 2.0 * PI * PI).abs() < 1e-13);
    }

    fn fd_grad(n: KernelDim, xi: &[f64], h: f64) -> Vec<f64> {
        (0..xi.len())
            .map(|j| {
                let mut p = xi.to_vec();
                let mut m = xi.to_vec();
                p[j] += h;
                m[j] -= h;
                (eval_s(n, &p).unwrap() - eval_s(n, &m).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // frozen from the centred-difference oracle
        let g = grad_s(KernelDim::TWO, &[1.0, 0.0]).unwrap();
        let fd = fd_grad(KernelDim::TWO, &[1.0, 0.0], 1e-5);
        assert!((g[0] - 1.0 / (2.0 * PI)).abs() < 1e-15 && g[1] == 0.0);
        assert!((fd[0] - g[0]).abs() < 1e-9);
        let g3 = grad_s(KernelDim::THREE, &[0.0, 0.0, 1.0]).unwrap();
        let fd3 = fd_grad(KernelDim::THREE, &[0.0, 0.0, 1.0], 1e-5);
        assert!((g3[2] - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((fd3[2] - g3[2]).abs() < 1e-9);
        for &r in &[0.5, 0.8, 1.3, 2.0] {
            for k in 0..7 {
                let a = 0.9 * k as f64;
                let xi = [r * a.cos(), r * a.sin()];
                let g = grad_s(KernelDim::TWO, &xi).unwrap();
                let fd = fd_grad(KernelDim::TWO, &xi, 1e-5);
                let scale = g[0].hypot(g[1]);
                assert!(((g[0] - fd[0]).hypot(g[1] - fd[1])) / scale < 1e-6);
            }
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        for n in [KernelDim::TWO, KernelDim::THREE] {
            let xi: Vec<f64> = (0..n.get()).map(|j| 0.4 + 0.3 * j as f64).collect();
            let h = hessian_s(n, &xi).unwrap();
            for k in 0..n.get() {
                let mut p = xi.clone();
                let mut m = xi.clone();
                p[k] += 1e-5;
                m[k] -= 1e-5;
                let (gp, gm) = (grad_s(n, &p).unwrap(), grad_s(n, &m).unwrap());
                for j in 0..n.get() {
                    assert!(((gp[j] - gm[j]) / 2e-5 - h[j][k]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn odd_gradient() {
        let xi = [0.3, -1.7];
        let g = grad_s(KernelDim::TWO, &xi).unwrap();
        let gm = grad_s(KernelDim::TWO, &[-0.3, 1.7]).unwrap();
        assert_eq!(g[0], -gm[0]);
        assert_eq!(g[1], -gm[1]);
    }

    #[test]
    fn harmonic_five_point() {
        let h = 1e-3;
        for k in 0..8 {
            let a = 0.7 * k as f64;
            let x = [a.cos(), a.sin()];
            let s = |p: [f64; 2]| eval_s(KernelDim::TWO, &p).unwrap();
            let lap = (s([x[0] + h, x[1]]) + s([x[0] - h, x[1]]) + s([x[0], x[1] + h]) + s([x[0], x[1] - h])
                - 4.0 * s(x))
                / (h * h);
            assert!(lap.abs() <= 1e-4);
        }
    }

    #[test]
    fn homogeneity() {
        let xi = [0.3, 0.9];
        for &lam in &[0.1, 2.0, 17.0] {
            let a = eval_s(KernelDim::TWO, &[lam * xi[0], lam * xi[1]]).unwrap();
            let b = eval_s(KernelDim::TWO, &xi).unwrap();
            assert!((a - b - lam.ln() / (2.0 * PI)).abs() < 1e-15);
            let x3 = [0.3, 0.9, -0.2];
            let a3 = eval_s(KernelDim::THREE, &[lam * x3[0], lam * x3[1], lam * x3[2]]).unwrap();
            let b3 = eval_s(KernelDim::THREE, &x3).unwrap();
            assert!((a3 - b3 / lam).abs() < 1e-15 * b3.abs().max(1.0));
        }
    }

    #[test]
    fn antiderivative_values_and_laplacian() {
        assert!((eval_n(KernelDim::TWO, 1.0).unwrap() + 1.0 / (8.0 * PI)).abs() < 1e-16);
        assert!((eval_n(KernelDim::THREE, 2.0).unwrap() + 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!(eval_n(KernelDim::TWO, 0.0).is_err());
        // radial Laplacian by finite differences
        for n in [KernelDim::TWO, KernelDim::THREE] {
            let r = 0.7;
            let h = 1e-4;
            let f = |r: f64| eval_n(n, r).unwrap();
            let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let lap = d2 + (n.get() as f64 - 1.0) / r * d1;
            assert!((lap - s_radial(n, r)).abs() < 1e-6);
        }
    }

    #[test]
    fn growth_bounds() {
        let dirs: Vec<Vec<f64>> = (0..64)
            .flat_map(|k| {
                let a = 2.0 * PI * k as f64 / 64.0;
                [0.5, 1.0, 3.0].into_iter().map(move |r| vec![r * a.cos(), r * a.sin()])
            })
            .collect();
        let sup = growth_bound_report(KernelDim::TWO, &[1, 0], &dirs).unwrap();
        assert!((sup - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let scaled: Vec<Vec<f64>> = dirs.iter().map(|p| vec![10.0 * p[0], 10.0 * p[1]]).collect();
        let sup2 = growth_bound_report(KernelDim::TWO, &[1, 0], &scaled).unwrap();
        assert!((sup - sup2).abs() < 1e-15);
        let axis = vec![vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]];
        let sup3 = growth_bound_report(KernelDim::THREE, &[1, 0, 0], &axis).unwrap();
        assert!((sup3 - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(growth_bound_report(KernelDim::TWO, &[2, 1], &dirs).is_err());
        let h = growth_bound_report(KernelDim::TWO, &[1, 1], &dirs).unwrap();
        assert!(h.is_finite() && h > 0.0);
    }
}
