//! Distributional normal derivative
//!
//! `⟨∂_{ν,f̃} u, v⟩ = ∮ u S_+[v] dσ + ⟨f̃, G_{d,+}[v]⟩`, with the canonical
//! choice `f̃ = E♯[Δu]`, and recovery of its `(μ₀, μ₁)` representation.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::bie::{HarmonicField, OperatorSet};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::potentials::VolumePotential;
use crate::schauder::{pair_e_sharp, BoundaryDist, BoundaryValues, HolderSolution, SampledRep, TestSamples};

/// Largest acceptable condition number of the spectral Gram system.
pub const MAX_GRAM_CONDITION: f64 = 1e8;

/// A continuous linear functional on `C^{1,α}(Ω̄)`-type test fields.
pub trait Functional: Send + Sync {
    /// Pairs against the harmonic field `w` (values and gradients available).
    fn pair(&self, w: &HarmonicField, ops: &OperatorSet) -> Result<f64>;
}

/// `E♯[f]` for a sampled representative.
pub struct ESharp(pub Arc<SampledRep>);

impl Functional for ESharp {
    fn pair(&self, w: &HarmonicField, ops: &OperatorSet) -> Result<f64> {
        if self.0.is_zero() {
            return Ok(0.0);
        }
        pair_e_sharp(&self.0, &w.test_samples(ops), ops.disc())
    }
}

/// `w ↦ w(p)`.
pub struct PointEval(pub Point);

impl Functional for PointEval {
    fn pair(&self, w: &HarmonicField, _ops: &OperatorSet) -> Result<f64> {
        w.eval(self.0)
    }
}

/// The zero functional.
pub struct ZeroFunctional;

impl Functional for ZeroFunctional {
    fn pair(&self, _w: &HarmonicField, _ops: &OperatorSet) -> Result<f64> {
        Ok(0.0)
    }
}

/// `∮ u S_+[v] dσ + ⟨f̃, G_{d,+}[v]⟩`.
pub fn pair_normal_derivative_general(
    u_trace: &BoundaryValues,
    f_tilde: &dyn Functional,
    v: &BoundaryValues,
    ops: &OperatorSet,
) -> Result<f64> {
    u_trace.check_shape(&ops.disc().nodes)?;
    let sv = ops.steklov(v)?;
    let w = ops.dirichlet(v)?;
    Ok(u_trace.inner(&sv, &ops.disc().nodes) + f_tilde.pair(&w, ops)?)
}

/// `⟨∂_ν u, v⟩` with `f̃ = E♯[Δu]`; samples `u.lap_rep` on every call.
pub fn pair_normal_derivative(u: &HolderSolution, v: &BoundaryValues, ops: &OperatorSet) -> Result<f64> {
    NormalDerivative::new(u, ops)?.pair(v)
}

/// `∂_ν u` as a reusable functional (Laplacian representative sampled once).
pub struct NormalDerivative<'a> {
    ops: &'a OperatorSet,
    trace: BoundaryValues,
    lap: ESharp,
}

impl<'a> NormalDerivative<'a> {
    pub fn new(u: &HolderSolution, ops: &'a OperatorSet) -> Result<Self> {
        let lap = SampledRep::new(&u.lap_rep, ops.disc())?;
        Ok(Self::from_parts(u.trace.clone(), Arc::new(lap), ops))
    }

    pub fn from_parts(trace: BoundaryValues, lap: Arc<SampledRep>, ops: &'a OperatorSet) -> Self {
        NormalDerivative {
            ops,
            trace,
            lap: ESharp(lap),
        }
    }

    pub fn pair(&self, v: &BoundaryValues) -> Result<f64> {
        pair_normal_derivative_general(&self.trace, &self.lap, v, self.ops)
    }

    /// Same pairing with precomputed `S_+[v]` and `G[v]` samples.
    pub fn pair_with(&self, v_steklov: &BoundaryValues, g_samples: &TestSamples) -> Result<f64> {
        let boundary = self.trace.inner(v_steklov, &self.ops.disc().nodes);
        if self.lap.0.is_zero() {
            return Ok(boundary);
        }
        Ok(boundary + pair_e_sharp(&self.lap.0, g_samples, self.ops.disc())?)
    }
}

/// Per-component trigonometric test battery: `χ_j`, then `cos mt`, `sin mt`
/// for `m = 1..=order`, each supported on one component.
pub fn trig_battery(ops: &OperatorSet, order: usize) -> Vec<(String, usize, BoundaryValues)> {
    let nodes = &ops.disc().nodes;
    let shape = nodes.shape();
    let mut out = Vec::new();
    for j in 0..shape.len() {
        out.push((format!("chi[{j}]"), j, BoundaryValues::indicator(&shape, j)));
        for m in 1..=order {
            for (name, f) in [("cos", f64::cos as fn(f64) -> f64), ("sin", f64::sin)] {
                let v = BoundaryValues::from_fn(nodes, |c, t, _| if c == j { f(m as f64 * t) } else { 0.0 });
                out.push((format!("{name}({m}t)[{j}]"), j, v));
            }
        }
    }
    out
}

/// A functional on boundary test fields with cached battery values.
pub struct DualPairing<'a> {
    evaluator: Box<dyn Fn(&BoundaryValues) -> Result<f64> + Send + Sync + 'a>,
    battery: Vec<(String, f64)>,
}

impl<'a> DualPairing<'a> {
    pub fn new(
        evaluator: Box<dyn Fn(&BoundaryValues) -> Result<f64> + Send + Sync + 'a>,
        battery: &[(String, usize, BoundaryValues)],
    ) -> Result<Self> {
        let values = battery
            .iter()
            .map(|(name, _, v)| Ok((name.clone(), evaluator(v)?)))
            .collect::<Result<_>>()?;
        Ok(DualPairing {
            evaluator,
            battery: values,
        })
    }

    pub fn pair(&self, v: &BoundaryValues) -> Result<f64> {
        (self.evaluator)(v)
    }

    pub fn battery_values(&self) -> &[(String, f64)] {
        &self.battery
    }
}

/// Spectral `(μ₀, μ₁)` representation of `∂_ν u`.
#[derive(Clone, Debug)]
pub struct V1Alpha {
    pub dist: BoundaryDist,
    /// Per component: `[a₀, a_cos(1), a_sin(1), …]` of `μ₀`.
    pub mu0_coefficients: Vec<Vec<f64>>,
    pub gram_condition: f64,
}

/// `μ₁ = (u - P⁺[E♯[Δu]])|_∂Ω`; `μ₀` from `∮ μ₀ v_k = ⟨∂_ν u, v_k⟩ - ∮ μ₁ S_+[v_k]`
/// for the trigonometric basis of order `order` (constant included).
pub fn v1alpha_representation(u: &HolderSolution, ops: &OperatorSet, order: usize) -> Result<V1Alpha> {
    let disc = ops.disc();
    let n = disc.n();
    if order == 0 || 4 * order > n {
        return Err(Error::InvalidArgument(format!(
            "basis order {order} must lie in 1..={}",
            n / 4
        )));
    }
    let lap = Arc::new(SampledRep::new(&u.lap_rep, disc)?);
    let p_trace = if lap.is_zero() {
        BoundaryValues::zeros(&disc.nodes.shape())
    } else {
        VolumePotential::from_sampled(ops.disc_arc(), lap.clone()).trace()?
    };
    let mu1 = u.trace.zip_with(&p_trace, |a, b| a - b);
    let nd = NormalDerivative::from_parts(u.trace.clone(), lap, ops);
    let mut mu0 = BoundaryValues::zeros(&disc.nodes.shape());
    let mut coefficients = Vec::with_capacity(disc.domain.len());
    let mut worst = 1.0f64;
    for j in 0..disc.domain.len() {
        let b = disc.nodes.component(j).base();
        let basis: Vec<Vec<f64>> = std::iter::once(vec![1.0; b.len()])
            .chain((1..=order).flat_map(|m| {
                let c = b.t.iter().map(|t| (m as f64 * t).cos()).collect();
                let s = b.t.iter().map(|t| (m as f64 * t).sin()).collect();
                [c, s]
            }))
            .collect();
        let dim = basis.len();
        let gram = DMatrix::from_fn(dim, dim, |k, l| {
            (0..b.len()).map(|i| b.weights[i] * basis[k][i] * basis[l][i]).sum()
        });
        let sv = gram.clone().singular_values();
        let cond = sv.max() / sv.min();
        worst = worst.max(cond);
        if !(cond <= MAX_GRAM_CONDITION) {
            return Err(Error::IllConditioned(cond));
        }
        let mut rhs = DVector::zeros(dim);
        for (k, bk) in basis.iter().enumerate() {
            let mut v = BoundaryValues::zeros(&disc.nodes.shape());
            v.component_mut(j).copy_from_slice(bk);
            let sv = ops.steklov(&v)?;
            let w = ops.dirichlet(&v)?;
            let samples = if nd.lap.0.is_zero() {
                None
            } else {
                Some(w.test_samples(ops))
            };
            let pair = match &samples {
                Some(s) => nd.pair_with(&sv, s)?,
                None => nd.trace.inner(&sv, &disc.nodes),
            };
            rhs[k] = pair - mu1.inner(&sv, &disc.nodes);
        }
        let a = gram.lu().solve(&rhs).ok_or(Error::IllConditioned(f64::INFINITY))?;
        let dst = mu0.component_mut(j);
        for (k, bk) in basis.iter().enumerate() {
            for (d, x) in dst.iter_mut().zip(bk) {
                *d += a[k] * x;
            }
        }
        coefficients.push(a.iter().cloned().collect());
    }
    Ok(V1Alpha {
        dist: BoundaryDist::new(mu0, mu1)?,
        mu0_coefficients: coefficients,
        gram_condition: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bie::AssemblyOptions;
    use crate::fieldexpr::{ScalarField, Support};
    use crate::geometry::{build_domain, CurveSpec};
    use crate::quadrature::Discretization;
    use crate::schauder::{pair_boundary_dist, DensityRep};
    use std::f64::consts::PI;

    fn unit_ops() -> OperatorSet {
        let d = build_domain(vec![CurveSpec::circle([0.0, 0.0], 1.0)]).unwrap();
        let disc = Arc::new(Discretization::new(d, 128, 24, 48).unwrap());
        OperatorSet::assemble(disc, AssemblyOptions::default()).unwrap()
    }

    fn solution(ops: &OperatorSet, u: &str, lap: &str) -> HolderSolution {
        let f = ScalarField::parse(u, [0.0, 0.0], Support::Interior).unwrap();
        let rep = DensityRep::parse(lap, "0", "0", [0.0, 0.0]).unwrap();
        HolderSolution::from_field(&f, rep, &ops.disc().nodes).unwrap()
    }

    fn bv(ops: &OperatorSet, f: impl Fn(f64) -> f64) -> BoundaryValues {
        BoundaryValues::from_fn(&ops.disc().nodes, |_, t, _| f(t))
    }

    #[test]
    fn pairing_examples() {
        let ops = unit_ops();
        let u = solution(&ops, "x^2 - y^2", "0");
        let p = pair_normal_derivative(&u, &bv(&ops, |t| (2.0 * t).cos()), &ops).unwrap();
        assert!((p - 2.0 * PI).abs() < 1e-9);
        let u = solution(&ops, "r^2/4", "1");
        let p = pair_normal_derivative(&u, &bv(&ops, |_| 1.0), &ops).unwrap();
        assert!((p - PI).abs() < 1e-9, "{p}");
        let u = solution(&ops, "3", "0");
        for (_, _, v) in trig_battery(&ops, 4) {
            assert!(pair_normal_derivative(&u, &v, &ops).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn general_pairings() {
        let ops = unit_ops();
        let cos = bv(&ops, f64::cos);
        let p = pair_normal_derivative_general(&cos, &ZeroFunctional, &cos, &ops).unwrap();
        assert!((p - PI).abs() < 1e-9);
        let zero = bv(&ops, |_| 0.0);
        let p = pair_normal_derivative_general(&zero, &PointEval([0.0, 0.0]), &bv(&ops, |_| 1.0), &ops).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let u = solution(&ops, "r^2/4", "1");
        let lap = Arc::new(SampledRep::new(&u.lap_rep, ops.disc()).unwrap());
        let v = bv(&ops, |t| 1.0 + (3.0 * t).sin());
        let a = pair_normal_derivative_general(&u.trace, &ESharp(lap), &v, &ops).unwrap();
        let b = pair_normal_derivative(&u, &v, &ops).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn representation_of_quadratic() {
        let ops = unit_ops();
        let u = solution(&ops, "r^2/4", "1");
        let rep = v1alpha_representation(&u, &ops, 8).unwrap();
        assert!(rep.dist.mu1.map(|x| x - 0.25).max_abs() < 1e-6);
        assert!(rep.dist.mu0.map(|x| x - 0.5).max_abs() < 1e-3);
        for (_, _, v) in trig_battery(&ops, 8) {
            let a = pair_boundary_dist(&rep.dist, &v, &ops).unwrap();
            let b = pair_normal_derivative(&u, &v, &ops).unwrap();
            assert!((a - b).abs() < 1e-3);
        }
    }

    #[test]
    fn representation_of_harmonic() {
        let ops = unit_ops();
        let u = solution(&ops, "x", "0");
        let rep = v1alpha_representation(&u, &ops, 8).unwrap();
        assert!(rep.mu0_coefficients[0].iter().all(|c| c.abs() < 1e-6));
        assert!(rep.dist.mu1.zip_with(&u.trace, |a, b| a - b).max_abs() < 1e-14);
        assert!(v1alpha_representation(&u, &ops, 40).is_err());
    }

    #[test]
    fn dual_pairing_is_linear() {
        let ops = unit_ops();
        let u = solution(&ops, "x^2 - y^2 + x*y", "0");
        let nd = NormalDerivative::new(&u, &ops).unwrap();
        let battery = trig_battery(&ops, 3);
        let dp = DualPairing::new(Box::new(|v| nd.pair(v)), &battery).unwrap();
        let (v1, v2) = (&battery[1].2, &battery[4].2);
        let combo = v1.zip_with(v2, |a, b| 2.0 * a - 0.5 * b);
        let lhs = dp.pair(&combo).unwrap();
        let rhs = 2.0 * dp.battery_values()[1].1 - 0.5 * dp.battery_values()[4].1;
        assert!((lhs - rhs).abs() < 1e-9);
    }
}
