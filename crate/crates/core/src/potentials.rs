//! Single layer potentials and the three-term distributional volume potential
//!
//! `P[f](x) = ∫ S(x-y) f₀ dy + Σ_j ∮ S(x-y) ν_j f_j dσ + Σ_j ∫ ∂_{x_j}S(x-y) f_j dy`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dot, Location, Point};
use crate::kernels::{s_radial, KernelDim};
use crate::quadrature::{newtonian_component, upsample, BoundaryPlan, Discretization, VolumeKernel};
use crate::schauder::{integrate_i, BoundaryValues, DensityRep, SampledRep};

fn density_on_plan(phi: &[f64], plan: &BoundaryPlan<'_>) -> Vec<f64> {
    if plan.is_on_curve() {
        phi.to_vec()
    } else {
        upsample(phi, plan.level())
    }
}

/// `v[φ](x) = ∮_{∂Ω_j} S₂(x - y) φ(y) dσ_y` for a node density on component `j`.
pub fn single_layer(disc: &Discretization, j: usize, phi: &[f64], x: Point) -> f64 {
    let loc = disc.domain.locate(j, x);
    single_layer_at(disc, j, phi, x, loc)
}

pub fn single_layer_at(disc: &Discretization, j: usize, phi: &[f64], x: Point, loc: Location) -> f64 {
    let plan = disc.plan(j, x, loc);
    let d = density_on_plan(phi, &plan);
    plan.integrate(|i, _| (d[i] / (4.0 * PI), 0.0))
}

/// `∇_x v[φ](x)` for `x` off the curve.
pub fn single_layer_gradient(disc: &Discretization, j: usize, phi: &[f64], x: Point) -> Result<[f64; 2]> {
    let loc = disc.domain.locate(j, x);
    if let Location::OnBoundary { .. } = loc {
        return Err(Error::InvalidArgument(format!(
            "single-layer gradient is two-valued on the boundary at {x:?}"
        )));
    }
    let plan = disc.plan(j, x, loc);
    let d = density_on_plan(phi, &plan);
    let g = |k: usize| {
        plan.integrate(|i, z| {
            let r2 = dot(z, z);
            (0.0, -z[k] * d[i] / (2.0 * PI * r2))
        })
    };
    Ok([g(0), g(1)])
}

/// Sum of single layers over all components.
pub fn single_layer_total(disc: &Discretization, phi: &BoundaryValues, x: Point) -> f64 {
    (0..disc.domain.len())
        .map(|j| single_layer(disc, j, phi.component(j), x))
        .sum()
}

/// True if `x` is within `1e-12·scale` of a boundary node without being one.
pub fn near_singular(disc: &Discretization, x: Point) -> bool {
    let tol = 1e-12 * disc.domain.scale();
    disc.nodes.components().iter().any(|c| {
        c.base().points.iter().any(|p| {
            let d = ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)).sqrt();
            d > 0.0 && d < tol
        })
    })
}

/// Distributional volume potential of a representative, evaluable anywhere
/// off the quadrature nodes (interior, exterior and on the boundary).
#[derive(Clone, Debug)]
pub struct VolumePotential {
    disc: Arc<Discretization>,
    rep: Arc<SampledRep>,
}

/// Logarithmic growth at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct InfinityReport {
    /// Fitted `c` in `θ(R e₁) ≈ c ln R + d`.
    pub log_coefficient: f64,
    /// `I_Ω[f] / 2π`.
    pub expected_coefficient: f64,
    /// `(R, sup_{|x - x₀| = R} |θ(x) - I_Ω[f] S₂(x - x₀)|)`.
    pub residuals: Vec<(f64, f64)>,
    /// `θ(R e₁)` at each radius.
    pub values: Vec<(f64, f64)>,
}

impl VolumePotential {
    pub fn new(disc: Arc<Discretization>, rep: &DensityRep) -> Result<Self> {
        let sampled = SampledRep::new(rep, &disc)?;
        Ok(VolumePotential {
            disc,
            rep: Arc::new(sampled),
        })
    }

    pub fn from_sampled(disc: Arc<Discretization>, rep: Arc<SampledRep>) -> Self {
        VolumePotential { disc, rep }
    }

    pub fn rep(&self) -> &SampledRep {
        &self.rep
    }

    pub fn disc(&self) -> &Discretization {
        &self.disc
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        self.eval_centered(x, None)
    }

    /// Evaluation with an explicit Taylor expansion centre (use one centre
    /// for all points of a finite-difference stencil).
    pub fn eval_centered(&self, x: Point, center: Option<Point>) -> Result<f64> {
        let locs: Vec<Location> = (0..self.disc.domain.len())
            .map(|j| self.disc.domain.locate(j, x))
            .collect();
        self.eval_located(x, &locs, center)
    }

    fn eval_located(&self, x: Point, locs: &[Location], center: Option<Point>) -> Result<f64> {
        if self.rep.is_zero() {
            return Ok(0.0);
        }
        let disc = &*self.disc;
        let rep = &*self.rep;
        let mut total = 0.0;
        for (j, loc) in locs.iter().enumerate() {
            let loc = *loc;
            if !rep.f0.is_zero() {
                total += newtonian_component(disc, &rep.f0, VolumeKernel::Newton, j, x, loc, center)?;
            }
            if !rep.rep.has_divergence_part() {
                continue;
            }
            for k in 0..2 {
                if !rep.fvec[k].is_zero() {
                    total += newtonian_component(disc, &rep.fvec[k], VolumeKernel::Gradient(k), j, x, loc, center)?;
                }
            }
            let plan = disc.plan(j, x, loc);
            let s = plan.samples();
            let (f1, f2) = if plan.level() == 0 {
                (
                    rep.fvec_boundary[0].component(j).to_vec(),
                    rep.fvec_boundary[1].component(j).to_vec(),
                )
            } else {
                let eval = |f: &crate::fieldexpr::ScalarField| -> Result<Vec<f64>> {
                    if f.is_zero() {
                        Ok(vec![0.0; s.len()])
                    } else {
                        s.points.iter().map(|p| f.eval(*p)).collect()
                    }
                };
                (eval(&rep.rep.fvec[0])?, eval(&rep.rep.fvec[1])?)
            };
            total += plan.integrate(|i, _| {
                let nf = s.normals[i][0] * f1[i] + s.normals[i][1] * f2[i];
                (nf / (4.0 * PI), 0.0)
            });
        }
        Ok(total)
    }

    /// `P⁺` at the boundary nodes.
    pub fn trace(&self) -> Result<BoundaryValues> {
        let disc = &*self.disc;
        let values = (0..disc.domain.len())
            .map(|j| {
                let b = disc.nodes.component(j).base();
                (0..b.len())
                    .into_par_iter()
                    .map(|i| {
                        let x = b.points[i];
                        let locs: Vec<Location> = (0..disc.domain.len())
                            .map(|k| {
                                if k == j {
                                    Location::OnBoundary { t: b.t[i] }
                                } else {
                                    disc.domain.locate(k, x)
                                }
                            })
                            .collect();
                        self.eval_located(x, &locs, None)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundaryValues::new(values))
    }

    /// `θ(x)`, the function representing `P⁻` in the exterior.
    pub fn exterior_theta(&self, x: Point) -> Result<f64> {
        for j in 0..self.disc.domain.len() {
            let loc = self.disc.domain.locate(j, x);
            let spacing = self.disc.grid_spacing(j);
            if loc.is_inside_or_on() || loc.distance() < spacing {
                return Err(Error::NotExterior {
                    point: x,
                    distance: if loc.is_inside_or_on() {
                        -loc.distance()
                    } else {
                        loc.distance()
                    },
                });
            }
        }
        self.eval(x)
    }

    /// Fits the `ln R` growth of `θ` along `x₀ + R e₁` and the residual after
    /// removing the monopole `I_Ω[f] S₂(x - x₀)`.
    pub fn infinity_behavior(&self, radii: &[f64]) -> Result<InfinityReport> {
        let diam = self.disc.domain.diameter();
        if radii.len() < 2 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("radii must be increasing (at least two)".into()));
        }
        if radii[0] < 2.0 * diam {
            return Err(Error::InvalidArgument(format!(
                "smallest radius {} is below twice the domain diameter {}",
                radii[0], diam
            )));
        }
        let x0 = self.disc.domain.polar_origin();
        let total = integrate_i(&self.rep, &self.disc, None)?;
        let mut values = Vec::with_capacity(radii.len());
        let mut residuals = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut sup = 0.0f64;
            for k in 0..8 {
                let a = 2.0 * PI * k as f64 / 8.0;
                let x = [x0[0] + r * a.cos(), x0[1] + r * a.sin()];
                let th = self.exterior_theta(x)?;
                if k == 0 {
                    values.push((r, th));
                }
                sup = sup.max((th - total * s_radial(KernelDim::TWO, r)).abs());
            }
            residuals.push((r, sup));
        }
        // least squares θ = c ln R + d
        let n = values.len() as f64;
        let (sx, sy) = values.iter().fold((0.0, 0.0), |(a, b), (r, t)| (a + r.ln(), b + t));
        let (mx, my) = (sx / n, sy / n);
        let (num, den) = values.iter().fold((0.0, 0.0), |(a, b), (r, t)| {
            let dx = r.ln() - mx;
            (a + dx * (t - my), b + dx * dx)
        });
        Ok(InfinityReport {
            log_coefficient: num / den,
            expected_coefficient: total / (2.0 * PI),
            residuals,
            values,
        })
    }
}

/// One-shot evaluation of the distributional volume potential.
pub fn dist_volume_potential(disc: Arc<Discretization>, rep: &DensityRep, x: Point) -> Result<f64> {
    VolumePotential::new(disc, rep)?.eval(x)
}

/// Five-point Laplacian with a shared expansion centre.
pub fn discrete_laplacian(pot: &VolumePotential, x: Point, h: f64) -> Result<f64> {
    let c = Some(x);
    let f = |dx: f64, dy: f64| pot.eval_centered([x[0] + dx, x[1] + dy], c);
    Ok((f(h, 0.0)? + f(-h, 0.0)? + f(0.0, h)? + f(0.0, -h)? - 4.0 * f(0.0, 0.0)?) / (h * h))
}
