//! Nonvariational Neumann problem `Δu = f`, `∂_ν u = g` by transpose-Galerkin.
//!
//! The trace `t` of a solution satisfies, for every boundary test `v`,
//!
//! ```text
//! ∮ t S_+[v] dσ = ⟨g, v⟩ - ⟨E♯[f], G_{d,+}[v]⟩ .
//! ```
//!
//! We solve this for `t` in the span of `cos mτ`, `sin mτ` (`m ≤ K`) on each
//! component, then set `u = P⁺[E♯[f]] + G_{d,+}[t - P⁺|_∂Ω] + c_j`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bie::{HarmonicField, OperatorSet};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::potentials::VolumePotential;
use crate::quadrature::Discretization;
use crate::schauder::{
    integrate_i, pair_e_sharp, BoundaryDist, BoundaryValues, DensityRep, HolderSolution, SampledRep,
};

/// Relative tolerance for compatibility defects and Galerkin residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_ORDER: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Zero mean over each component's area.
    #[default]
    ZeroMean,
    /// `u(p_j) = 0` at one anchor per component (centroids if empty).
    Anchor(Vec<Point>),
}

#[derive(Clone, Debug)]
pub struct NeumannProblem {
    pub disc: Arc<Discretization>,
    pub f: DensityRep,
    pub g: BoundaryDist,
    /// Trigonometric order `K` per component.
    pub order: usize,
    pub normalization: Normalization,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
}

impl NeumannProblem {
    pub fn new(disc: Arc<Discretization>, f: DensityRep, g: BoundaryDist) -> Result<Self> {
        g.mu0.check_shape(&disc.nodes)?;
        Ok(NeumannProblem {
            disc,
            f,
            g,
            order: DEFAULT_ORDER,
            normalization: Normalization::ZeroMean,
            tol_scale: 1.0,
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn with_tol_scale(mut self, s: f64) -> Self {
        self.tol_scale = s;
        self
    }

    /// Per-component tolerance `1e-6 · |∂Ω_j| · max(1, ‖g‖_∞)`.
    pub fn tolerance(&self, j: usize) -> f64 {
        DEFAULT_TOLERANCE * self.tol_scale * self.disc.domain.info(j).perimeter * self.g.max_abs().max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Compatibility {
    /// `d_j = ∮_{∂Ω_j} μ₀ dσ - I_{Ω_j}[f]`.
    pub defects: Vec<f64>,
    pub tolerances: Vec<f64>,
}

impl Compatibility {
    pub fn ok(&self) -> bool {
        self.defects.iter().zip(&self.tolerances).all(|(d, t)| d.abs() <= *t)
    }

    pub fn max_defect(&self) -> f64 {
        self.defects.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// `⟨S_+ᵗ[μ₁], χ_j⟩ = ∮ μ₁ S_+[χ_j] = 0` structurally, so only `μ₀` enters.
pub fn check_compatibility(problem: &NeumannProblem) -> Result<Compatibility> {
    let f = SampledRep::new(&problem.f, &problem.disc)?;
    compatibility_with(problem, &f)
}

fn compatibility_with(problem: &NeumannProblem, f: &SampledRep) -> Result<Compatibility> {
    let disc = &problem.disc;
    let mut defects = Vec::with_capacity(disc.domain.len());
    let mut tolerances = Vec::with_capacity(disc.domain.len());
    for j in 0..disc.domain.len() {
        let flux = problem.g.mu0.integrate(&disc.nodes, Some(j));
        defects.push(flux - integrate_i(f, disc, Some(j))?);
        tolerances.push(problem.tolerance(j));
    }
    Ok(Compatibility { defects, tolerances })
}

/// One row of the residual report.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub test: String,
    pub component: usize,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct NeumannSolution {
    pub u: HolderSolution,
    pub compatibility: Compatibility,
    /// `⟨∂_ν u, v_k⟩ - ⟨g, v_k⟩` over `χ_j` and the order-`K` basis.
    pub residuals: Vec<Residual>,
    /// Largest residual over orders `K+1..2K` (informational).
    pub tail_residual: f64,
    /// Constant added on each component by the normalization.
    pub constants: Vec<f64>,
    /// Galerkin system condition number per component.
    pub galerkin_condition: Vec<f64>,
    pub converged: bool,
    /// Trace coefficients `[a_cos(1), a_sin(1), …]` per component.
    pub coefficients: Vec<Vec<f64>>,
    disc: Arc<Discretization>,
    parts: Arc<SolutionParts>,
}

#[derive(Debug)]
struct SolutionParts {
    potential: Option<VolumePotential>,
    harmonic: HarmonicField,
}

impl NeumannSolution {
    pub fn eval(&self, x: Point) -> Result<f64> {
        self.u.eval(x)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.value.abs()))
    }

    pub fn disc(&self) -> &Discretization {
        &self.disc
    }

    /// `∇u(x)` for interior `x`: exact for the harmonic part, central
    /// differences (shared Taylor centre) for the volume potential.
    pub fn gradient(&self, x: Point) -> Result<[f64; 2]> {
        let mut g = self.parts.harmonic.gradient(x)?;
        if let Some(p) = &self.parts.potential {
            let h = 1e-5 * self.disc.domain.scale();
            for (k, gk) in g.iter_mut().enumerate() {
                let mut a = x;
                let mut b = x;
                a[k] += h;
                b[k] -= h;
                *gk += (p.eval_centered(a, Some(x))? - p.eval_centered(b, Some(x))?) / (2.0 * h);
            }
        }
        Ok(g)
    }

    /// The same solution plus `shifts[j]` on component `j`.
    pub fn shifted(&self, shifts: &[f64]) -> NeumannSolution {
        let mut out = self.clone();
        out.u = self.u.shifted(shifts, &self.disc.domain);
        out.constants = self.constants.iter().zip(shifts).map(|(c, s)| c + s).collect();
        out
    }
}

fn basis(disc: &Discretization, j: usize, from: usize, to: usize) -> Vec<(String, BoundaryValues)> {
    let nodes = &disc.nodes;
    (from..=to)
        .flat_map(|m| {
            [("cos", f64::cos as fn(f64) -> f64), ("sin", f64::sin)].map(|(name, f)| {
                (
                    format!("{name}({m}t)[{j}]"),
                    BoundaryValues::from_fn(nodes, |c, t, _| if c == j { f(m as f64 * t) } else { 0.0 }),
                )
            })
        })
        .collect()
}

struct TestData {
    steklov: BoundaryValues,
    rhs: f64,
}

/// `⟨g, v⟩ - ⟨E♯[f], G[v]⟩` together with `S_+[v]`.
fn test_data(ops: &OperatorSet, g: &BoundaryDist, f: &SampledRep, v: &BoundaryValues) -> Result<TestData> {
    let nodes = &ops.disc().nodes;
    let sv = ops.steklov(v)?;
    let mut rhs = g.mu0.inner(v, nodes) + g.mu1.inner(&sv, nodes);
    if !f.is_zero() {
        let w = ops.dirichlet(v)?;
        rhs -= pair_e_sharp(f, &w.test_samples(ops), ops.disc())?;
    }
    Ok(TestData { steklov: sv, rhs })
}

/// Solves the problem; refuses incompatible data.
pub fn solve(problem: &NeumannProblem, ops: &OperatorSet) -> Result<NeumannSolution> {
    let disc = problem.disc.clone();
    if !Arc::ptr_eq(&disc, &ops.disc_arc()) && disc.nodes.shape() != ops.disc().nodes.shape() {
        return Err(Error::NodeMismatch("operators assembled on different nodes".into()));
    }
    let order = problem.order;
    if order == 0 || 2 * order >= disc.n() {
        return Err(Error::InvalidArgument(format!(
            "Galerkin order {order} must lie in 1..{}",
            disc.n() / 2
        )));
    }
    let f = Arc::new(SampledRep::new(&problem.f, &disc)?);
    let compatibility = compatibility_with(problem, &f)?;
    if !compatibility.ok() {
        return Err(Error::Incompatible {
            defects: compatibility.defects.clone(),
            tolerance: compatibility.tolerances.iter().cloned().fold(f64::INFINITY, f64::min),
        });
    }
    let nodes = &disc.nodes;
    let mut trace = BoundaryValues::zeros(&nodes.shape());
    let mut coefficients = Vec::new();
    let mut galerkin_condition = Vec::new();
    for j in 0..disc.domain.len() {
        let b = basis(&disc, j, 1, order);
        let data = b
            .par_iter()
            .map(|(_, v)| test_data(ops, &problem.g, &f, v))
            .collect::<Result<Vec<_>>>()?;
        let dim = b.len();
        let m = DMatrix::from_fn(dim, dim, |k, l| b[l].1.inner(&data[k].steklov, nodes));
        let rhs = DVector::from_iterator(dim, data.iter().map(|d| d.rhs));
        let sv = m.clone().singular_values();
        galerkin_condition.push(sv.max() / sv.min());
        let a = m.lu().solve(&rhs).ok_or(Error::SingularSystem { component: j })?;
        let dst = trace.component_mut(j);
        for (k, (_, v)) in b.iter().enumerate() {
            for (d, x) in dst.iter_mut().zip(v.component(j)) {
                *d += a[k] * x;
            }
        }
        coefficients.push(a.iter().cloned().collect());
    }

    let potential = if f.is_zero() {
        None
    } else {
        Some(VolumePotential::from_sampled(disc.clone(), f.clone()))
    };
    let p_trace = match &potential {
        Some(p) => p.trace()?,
        None => BoundaryValues::zeros(&nodes.shape()),
    };
    let h = trace.zip_with(&p_trace, |a, b| a - b);
    let harmonic = ops.dirichlet(&h)?;

    // normalization
    let constants: Vec<f64> = match &problem.normalization {
        Normalization::ZeroMean => (0..disc.domain.len())
            .map(|j| {
                let g = disc.grid.component(j);
                let ve = ops.volume_eval(j);
                let phi = DVector::from_column_slice(harmonic.phi.component(j));
                let hv = &ve.value * phi;
                let pv: Vec<f64> = match &potential {
                    Some(p) => g.points.par_iter().map(|x| p.eval(*x)).collect::<Result<_>>()?,
                    None => vec![0.0; g.points.len()],
                };
                let (mut integral, mut area) = (0.0, 0.0);
                for k in 0..g.points.len() {
                    integral += g.weights[k] * (hv[k] + harmonic.constants[j] + pv[k]);
                    area += g.weights[k];
                }
                Ok(-integral / area)
            })
            .collect::<Result<_>>()?,
        Normalization::Anchor(points) => (0..disc.domain.len())
            .map(|j| {
                let p = points.get(j).copied().unwrap_or(disc.domain.info(j).centroid);
                let pv = match &potential {
                    Some(pot) => pot.eval(p)?,
                    None => 0.0,
                };
                Ok(-(harmonic.eval_on(j, p)? + pv))
            })
            .collect::<Result<_>>()?,
    };

    let parts = Arc::new(SolutionParts { potential, harmonic });
    let u_trace = BoundaryValues::new(
        trace
            .components()
            .iter()
            .zip(&constants)
            .map(|(v, c)| v.iter().map(|x| x + c).collect())
            .collect(),
    );
    let interior = {
        let parts = parts.clone();
        let constants = constants.clone();
        let domain = disc.domain.clone();
        Arc::new(move |x: Point| -> Result<f64> {
            let (j, _) = domain.component_of(x).ok_or(Error::OutsideDomain { point: x })?;
            let pv = match &parts.potential {
                Some(p) => p.eval(x)?,
                None => 0.0,
            };
            Ok(parts.harmonic.eval_on(j, x)? + pv + constants[j])
        })
    };
    let u = HolderSolution::new(u_trace, interior, Arc::new(problem.f.clone()));

    // residual report
    let residual_of = |v: &BoundaryValues| -> Result<f64> {
        let d = test_data(ops, &problem.g, &f, v)?;
        Ok(u.trace.inner(&d.steklov, nodes) - d.rhs)
    };
    let mut residuals = Vec::new();
    let mut tail_residual = 0.0f64;
    for j in 0..disc.domain.len() {
        let tol = problem.tolerance(j);
        let mut tests = vec![(format!("chi[{j}]"), BoundaryValues::indicator(&nodes.shape(), j))];
        tests.extend(basis(&disc, j, 1, order));
        let values = tests
            .par_iter()
            .map(|(_, v)| residual_of(v))
            .collect::<Result<Vec<_>>>()?;
        for ((name, _), value) in tests.into_iter().zip(values) {
            residuals.push(Residual {
                test: name,
                component: j,
                value,
                tolerance: tol,
            });
        }
        let hi = (2 * order).min(disc.n() / 2 - 1);
        if hi > order {
            let tail = basis(&disc, j, order + 1, hi)
                .par_iter()
                .map(|(_, v)| residual_of(v))
                .collect::<Result<Vec<_>>>()?;
            tail_residual = tail.iter().fold(tail_residual, |m, r| m.max(r.abs()));
        }
    }
    let converged = residuals.iter().all(|r| r.value.abs() <= r.tolerance);
    Ok(NeumannSolution {
        u,
        compatibility,
        residuals,
        tail_residual,
        constants,
        galerkin_condition,
        converged,
        coefficients,
        disc,
        parts,
    })
}

/// Per-component constants and the deviation from a locally constant difference.
#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessCertificate {
    pub constants: Vec<f64>,
    pub deviation: f64,
}

/// Compares two solutions of the same problem on deterministic interior probes.
pub fn uniqueness_certificate(a: &NeumannSolution, b: &NeumannSolution) -> Result<UniquenessCertificate> {
    let (da, db) = (&a.disc.domain, &b.disc.domain);
    if da.components() != db.components() {
        return Err(Error::InvalidArgument("solutions live on different domains".into()));
    }
    let mut constants = Vec::with_capacity(da.len());
    let mut deviation = 0.0f64;
    for j in 0..da.len() {
        let probes = da.probe_points(j, &[0.3, 0.6, 0.9], 8);
        let diffs = probes
            .iter()
            .map(|p| Ok(a.eval(*p)? - b.eval(*p)?))
            .collect::<Result<Vec<f64>>>()?;
        let c = diffs.iter().sum::<f64>() / diffs.len() as f64;
        deviation = diffs.iter().fold(deviation, |m, d| m.max((d - c).abs()));
        constants.push(c);
    }
    Ok(UniquenessCertificate { constants, deviation })
}

/// `∮_{|x - c| = ρ} u ∂_r u dσ`, the Dirichlet energy of a harmonic `u`
/// over the disk of radius `ρ` about `c`.
pub fn circle_energy(sol: &NeumannSolution, center: Point, rho: f64, samples: usize) -> Result<f64> {
    let h = 2.0 * std::f64::consts::PI / samples as f64;
    let terms = (0..samples)
        .into_par_iter()
        .map(|k| {
            let (s, c) = (k as f64 * h).sin_cos();
            let x = [center[0] + rho * c, center[1] + rho * s];
            let g = sol.gradient(x)?;
            Ok(sol.eval(x)? * (g[0] * c + g[1] * s))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum::<f64>() * rho * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bie::AssemblyOptions;
    use crate::fieldexpr::{ScalarField, Support};
    use crate::geometry::{build_domain, CurveSpec};

    fn setup(specs: Vec<CurveSpec>) -> (Arc<Discretization>, OperatorSet) {
        let d = build_domain(specs).unwrap();
        let disc = Arc::new(Discretization::new(d, 128, 24, 48).unwrap());
        let ops = OperatorSet::assemble(disc.clone(), AssemblyOptions::default()).unwrap();
        (disc, ops)
    }

    fn problem(disc: &Arc<Discretization>, f0: &str, mu0: &str, mu1: &str) -> NeumannProblem {
        let f = DensityRep::parse(f0, "0", "0", [0.0, 0.0]).unwrap();
        let p = |s: &str| ScalarField::parse(s, [0.0, 0.0], Support::Boundary).unwrap();
        let g = BoundaryDist::from_fields(&p(mu0), &p(mu1), &disc.nodes).unwrap();
        NeumannProblem::new(disc.clone(), f, g).unwrap().with_order(8)
    }

    #[test]
    fn compatibility_examples() {
        let (disc, _) = setup(vec![CurveSpec::circle([0.0, 0.0], 1.0)]);
        let c = check_compatibility(&problem(&disc, "1", "0.5", "0")).unwrap();
        assert!(c.defects[0].abs() < 1e-9 && c.ok());
        let c = check_compatibility(&problem(&disc, "1", "1", "0")).unwrap();
        assert!((c.defects[0] - std::f64::consts::PI).abs() < 1e-9 && !c.ok());
        let (disc, _) = setup(vec![
            CurveSpec::circle([-2.0, 0.0], 1.0),
            CurveSpec::circle([2.0, 0.0], 1.0),
        ]);
        let c = check_compatibility(&problem(&disc, "1", "0.5", "0")).unwrap();
        assert!(c.defects.iter().all(|d| d.abs() < 1e-9));
    }

    #[test]
    fn harmonic_neumann() {
        let (disc, ops) = setup(vec![CurveSpec::circle([0.0, 0.0], 1.0)]);
        for (mu0, mu1) in [("cos(theta)", "0"), ("0", "cos(theta)")] {
            let sol = solve(&problem(&disc, "0", mu0, mu1), &ops).unwrap();
            assert!(sol.converged);
            assert!((sol.eval([0.5, 0.0]).unwrap() - 0.5).abs() < 1e-8);
            assert!((sol.eval([0.1, 0.7]).unwrap() - 0.1).abs() < 1e-8);
        }
    }

    #[test]
    fn poisson_neumann() {
        let (disc, ops) = setup(vec![CurveSpec::circle([0.0, 0.0], 1.0)]);
        let sol = solve(&problem(&disc, "1", "0.5", "0"), &ops).unwrap();
        assert!(sol.converged, "{:?}", sol.residuals);
        assert!((sol.eval([0.0, 0.0]).unwrap() + 0.125).abs() < 1e-6);
        assert!((sol.eval([0.3, 0.4]).unwrap() - (0.25 / 4.0 - 0.125)).abs() < 1e-6);
        let anchored = solve(
            &problem(&disc, "1", "0.5", "0").with_normalization(Normalization::Anchor(vec![])),
            &ops,
        )
        .unwrap();
        assert!(anchored.eval([0.0, 0.0]).unwrap().abs() < 1e-9);
        let cert = uniqueness_certificate(&sol, &anchored).unwrap();
        assert!(cert.deviation < 1e-9);
        assert!((cert.constants[0] + 0.125).abs() < 1e-6);
        assert!(matches!(
            solve(&problem(&disc, "1", "1", "0"), &ops),
            Err(Error::Incompatible { .. })
        ));
    }
}
