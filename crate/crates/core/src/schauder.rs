//! Negative Schauder representations `f₀ + Σ ∂_j f_j`, the integration
//! functional `I_Ω`, the extension pairing `E♯`, boundary distributions
//! `μ₀ + S_+ᵗ[μ₁]`, test fields and a sampled Hölder seminorm.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bie::OperatorSet;
use crate::error::{Error, Result};
use crate::fieldexpr::{ScalarField, Support};
use crate::geometry::{dot, norm, sub, BoundaryNodes, Point};
use crate::quadrature::{sample_boundary, Discretization, SampledDensity};

/// Finite-difference step for test fields without analytic gradients.
pub const FD_STEP: f64 = 1e-5;

/// A representative `(f₀, f₁, f₂)` of an element of `C^{-1,α}(Ω̄)`.
#[derive(Clone, Debug)]
pub struct DensityRep {
    pub f0: ScalarField,
    pub fvec: [ScalarField; 2],
}

impl DensityRep {
    pub fn new(f0: ScalarField, f1: ScalarField, f2: ScalarField) -> Self {
        DensityRep {
            f0: f0.with_support(Support::Interior),
            fvec: [f1.with_support(Support::Interior), f2.with_support(Support::Interior)],
        }
    }

    pub fn zero() -> Self {
        let z = ScalarField::zero(Support::Interior);
        DensityRep::new(z.clone(), z.clone(), z)
    }

    /// Parses three expressions with polar coordinates about `origin`.
    pub fn parse(f0: &str, f1: &str, f2: &str, origin: Point) -> Result<Self> {
        let p = |s: &str| ScalarField::parse(s, origin, Support::Interior);
        Ok(DensityRep::new(p(f0)?, p(f1)?, p(f2)?))
    }

    pub fn is_zero(&self) -> bool {
        self.f0.is_zero() && self.fvec.iter().all(|f| f.is_zero())
    }

    pub fn has_divergence_part(&self) -> bool {
        self.fvec.iter().any(|f| !f.is_zero())
    }

    /// Fieldwise sum.
    pub fn plus(&self, other: &DensityRep) -> DensityRep {
        DensityRep::new(
            self.f0.plus(&other.f0),
            self.fvec[0].plus(&other.fvec[0]),
            self.fvec[1].plus(&other.fvec[1]),
        )
    }
}

/// One value per boundary node, grouped by component.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues {
    values: Vec<Vec<f64>>,
}

impl BoundaryValues {
    pub fn new(values: Vec<Vec<f64>>) -> Self {
        BoundaryValues { values }
    }

    pub fn zeros(shape: &[usize]) -> Self {
        BoundaryValues {
            values: shape.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn from_field(field: &ScalarField, nodes: &BoundaryNodes) -> Result<Self> {
        if field.is_zero() {
            return Ok(Self::zeros(&nodes.shape()));
        }
        let values = nodes
            .components()
            .iter()
            .map(|c| sample_boundary(field, c.base()))
            .collect::<Result<_>>()?;
        Ok(BoundaryValues { values })
    }

    /// Samples `f(component, t, point)` at every node.
    pub fn from_fn(nodes: &BoundaryNodes, mut f: impl FnMut(usize, f64, Point) -> f64) -> Self {
        let values = nodes
            .components()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let b = c.base();
                b.t.iter().zip(&b.points).map(|(t, p)| f(j, *t, *p)).collect()
            })
            .collect();
        BoundaryValues { values }
    }

    /// Indicator of component `j`.
    pub fn indicator(shape: &[usize], j: usize) -> Self {
        let mut v = Self::zeros(shape);
        v.values[j].iter_mut().for_each(|x| *x = 1.0);
        v
    }

    pub fn shape(&self) -> Vec<usize> {
        self.values.iter().map(|v| v.len()).collect()
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.values[j]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn flat(&self) -> Vec<f64> {
        self.values.concat()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_shape(&self, nodes: &BoundaryNodes) -> Result<()> {
        if self.shape() != nodes.shape() {
            return Err(Error::NodeMismatch(format!(
                "boundary values have shape {:?}, nodes have {:?}",
                self.shape(),
                nodes.shape()
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        BoundaryValues {
            values: self.values.iter().map(|c| c.iter().map(|v| f(*v)).collect()).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        BoundaryValues {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
                .collect(),
        }
    }

    /// `∮ self dσ` over component `j` (or all components).
    pub fn integrate(&self, nodes: &BoundaryNodes, component: Option<usize>) -> f64 {
        self.weighted_sum(nodes, component, |_, v| v)
    }

    /// `∮ self · other dσ`.
    pub fn inner(&self, other: &Self, nodes: &BoundaryNodes) -> f64 {
        self.weighted_sum(nodes, None, |(j, i), v| v * other.values[j][i])
    }

    fn weighted_sum(
        &self,
        nodes: &BoundaryNodes,
        component: Option<usize>,
        f: impl Fn((usize, usize), f64) -> f64,
    ) -> f64 {
        let mut acc = 0.0;
        for (j, vals) in self.values.iter().enumerate() {
            if component.is_some_and(|c| c != j) {
                continue;
            }
            let w = &nodes.component(j).base().weights;
            for (i, v) in vals.iter().enumerate() {
                acc += w[i] * f((j, i), *v);
            }
        }
        acc
    }
}

/// `μ₀ + S_+ᵗ[μ₁]` sampled at the boundary nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDist {
    pub mu0: BoundaryValues,
    pub mu1: BoundaryValues,
}

impl BoundaryDist {
    pub fn new(mu0: BoundaryValues, mu1: BoundaryValues) -> Result<Self> {
        if mu0.shape() != mu1.shape() {
            return Err(Error::NodeMismatch("μ₀ and μ₁ sampled on different nodes".into()));
        }
        Ok(BoundaryDist { mu0, mu1 })
    }

    pub fn from_fields(mu0: &ScalarField, mu1: &ScalarField, nodes: &BoundaryNodes) -> Result<Self> {
        Self::new(
            BoundaryValues::from_field(mu0, nodes)?,
            BoundaryValues::from_field(mu1, nodes)?,
        )
    }

    pub fn shape(&self) -> Vec<usize> {
        self.mu0.shape()
    }

    pub fn max_abs(&self) -> f64 {
        self.mu0.max_abs().max(self.mu1.max_abs())
    }
}

/// `⟨μ₀ + S_+ᵗ[μ₁], v⟩ = ∮ μ₀ v dσ + ∮ μ₁ S_+[v] dσ`.
pub fn pair_boundary_dist(g: &BoundaryDist, v: &BoundaryValues, ops: &OperatorSet) -> Result<f64> {
    let nodes = &ops.disc().nodes;
    g.mu0.check_shape(nodes)?;
    v.check_shape(nodes)?;
    let sv = ops.steklov(v)?;
    Ok(g.mu0.inner(v, nodes) + g.mu1.inner(&sv, nodes))
}

// ---------------------------------------------------------------- test fields

/// A `C^{1,α}(Ω̄)` test function.
pub trait TestField: Send + Sync {
    fn value(&self, x: Point) -> Result<f64>;

    /// Analytic gradient, if available.
    fn gradient(&self, _x: Point) -> Option<Result<[f64; 2]>> {
        None
    }

    fn name(&self) -> String;
}

/// `Re (z - c)^k` or `Im (z - c)^k`.
#[derive(Clone, Debug)]
pub struct HarmonicPolynomial {
    pub degree: u32,
    pub imaginary: bool,
    pub center: Point,
}

impl HarmonicPolynomial {
    fn parts(&self, x: Point) -> (f64, f64) {
        let (a, b) = (x[0] - self.center[0], x[1] - self.center[1]);
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..self.degree {
            (re, im) = (re * a - im * b, re * b + im * a);
        }
        (re, im)
    }
}

impl TestField for HarmonicPolynomial {
    fn value(&self, x: Point) -> Result<f64> {
        let (re, im) = self.parts(x);
        Ok(if self.imaginary { im } else { re })
    }

    fn gradient(&self, x: Point) -> Option<Result<[f64; 2]>> {
        // d/dz (z^k) = k z^{k-1}; ∂_x = f', ∂_y = i f'
        if self.degree == 0 {
            return Some(Ok([0.0, 0.0]));
        }
        let lower = HarmonicPolynomial {
            degree: self.degree - 1,
            ..self.clone()
        };
        let (re, im) = lower.parts(x);
        let k = self.degree as f64;
        let (dre, dim) = (k * re, k * im);
        Some(Ok(if self.imaginary { [dim, dre] } else { [dre, -dim] }))
    }

    fn name(&self) -> String {
        format!("{}(z^{})", if self.imaginary { "Im" } else { "Re" }, self.degree)
    }
}

/// `Σ a_i exp(-|x - c_i|² / s_i²)`.
#[derive(Clone, Debug)]
pub struct BumpSum {
    pub bumps: Vec<(f64, Point, f64)>,
    pub label: String,
}

impl TestField for BumpSum {
    fn value(&self, x: Point) -> Result<f64> {
        Ok(self
            .bumps
            .iter()
            .map(|(a, c, s)| {
                let d = sub(x, *c);
                a * (-dot(d, d) / (s * s)).exp()
            })
            .sum())
    }

    fn gradient(&self, x: Point) -> Option<Result<[f64; 2]>> {
        let mut g = [0.0; 2];
        for (a, c, s) in &self.bumps {
            let d = sub(x, *c);
            let e = a * (-dot(d, d) / (s * s)).exp() * (-2.0 / (s * s));
            g[0] += e * d[0];
            g[1] += e * d[1];
        }
        Some(Ok(g))
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// A scalar field used as a test function; gradients by central differences.
#[derive(Clone, Debug)]
pub struct FieldTest(pub ScalarField);

impl TestField for FieldTest {
    fn value(&self, x: Point) -> Result<f64> {
        self.0.eval(x)
    }

    fn name(&self) -> String {
        self.0.expression().unwrap_or_else(|| "<field>".into())
    }
}

/// A test function sampled on the boundary nodes and on the volume grid.
#[derive(Clone, Debug)]
pub struct TestSamples {
    pub boundary: BoundaryValues,
    pub volume: Vec<Vec<f64>>,
    pub gradient: Vec<Vec<[f64; 2]>>,
    /// Gradients came from finite differences (reduced accuracy).
    pub fd_gradient: bool,
}

impl TestSamples {
    pub fn new(test: &dyn TestField, disc: &Discretization, allow_fd: bool) -> Result<Self> {
        let boundary = BoundaryValues::new(
            disc.nodes
                .components()
                .iter()
                .map(|c| c.base().points.iter().map(|p| test.value(*p)).collect())
                .collect::<Result<_>>()?,
        );
        let mut fd = false;
        let mut volume = Vec::with_capacity(disc.grid.len());
        let mut gradient = Vec::with_capacity(disc.grid.len());
        for g in disc.grid.components() {
            let mut vals = Vec::with_capacity(g.points.len());
            let mut grads = Vec::with_capacity(g.points.len());
            for p in &g.points {
                vals.push(test.value(*p)?);
                let gr = match test.gradient(*p) {
                    Some(gr) => gr?,
                    None if allow_fd => {
                        fd = true;
                        let h = FD_STEP;
                        let d = |dx: f64, dy: f64| test.value([p[0] + dx, p[1] + dy]);
                        [
                            (d(h, 0.0)? - d(-h, 0.0)?) / (2.0 * h),
                            (d(0.0, h)? - d(0.0, -h)?) / (2.0 * h),
                        ]
                    }
                    None => return Err(Error::MissingGradient),
                };
                grads.push(gr);
            }
            volume.push(vals);
            gradient.push(grads);
        }
        Ok(TestSamples {
            boundary,
            volume,
            gradient,
            fd_gradient: fd,
        })
    }

    /// The constant function 1.
    pub fn constant_one(disc: &Discretization) -> Self {
        TestSamples {
            boundary: BoundaryValues::new(disc.nodes.shape().iter().map(|&n| vec![1.0; n]).collect()),
            volume: disc
                .grid
                .components()
                .iter()
                .map(|g| vec![1.0; g.points.len()])
                .collect(),
            gradient: disc
                .grid
                .components()
                .iter()
                .map(|g| vec![[0.0; 2]; g.points.len()])
                .collect(),
            fd_gradient: false,
        }
    }
}

/// Harmonic polynomials of degree ≤ 4 about `center`, then `bumps` seeded bump sums.
pub fn standard_battery(disc: &Discretization, bumps: usize, seed: u64) -> Vec<Box<dyn TestField>> {
    let center = disc.domain.polar_origin();
    let mut out: Vec<Box<dyn TestField>> = vec![Box::new(HarmonicPolynomial {
        degree: 0,
        imaginary: false,
        center,
    })];
    for degree in 1..=4 {
        for imaginary in [false, true] {
            out.push(Box::new(HarmonicPolynomial {
                degree,
                imaginary,
                center,
            }));
        }
    }
    out.extend(
        random_bumps(disc, bumps, seed)
            .into_iter()
            .map(|b| Box::new(b) as Box<dyn TestField>),
    );
    out
}

/// Seeded smooth bump combinations centred in the domain's bounding region.
pub fn random_bumps(disc: &Discretization, count: usize, seed: u64) -> Vec<BumpSum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = disc.domain.scale();
    let infos: Vec<_> = (0..disc.domain.len()).map(|j| disc.domain.info(j).clone()).collect();
    (0..count)
        .map(|k| {
            let bumps = (0..3)
                .map(|_| {
                    let info = &infos[rng.gen_range(0..infos.len())];
                    let c = [
                        rng.gen_range(info.bbox[0][0]..=info.bbox[1][0]),
                        rng.gen_range(info.bbox[0][1]..=info.bbox[1][1]),
                    ];
                    (rng.gen_range(-1.0..=1.0), c, rng.gen_range(0.3..=0.8) * scale)
                })
                .collect();
            BumpSum {
                bumps,
                label: format!("bump#{k}"),
            }
        })
        .collect()
}

// ---------------------------------------------------------------- sampled reps

/// A representative sampled on the current discretization.
#[derive(Clone, Debug)]
pub struct SampledRep {
    pub rep: DensityRep,
    pub f0: SampledDensity,
    pub fvec: [SampledDensity; 2],
    pub fvec_boundary: [BoundaryValues; 2],
}

impl SampledRep {
    pub fn new(rep: &DensityRep, disc: &Discretization) -> Result<Self> {
        Ok(SampledRep {
            rep: rep.clone(),
            f0: SampledDensity::new(&rep.f0, &disc.grid)?,
            fvec: [
                SampledDensity::new(&rep.fvec[0], &disc.grid)?,
                SampledDensity::new(&rep.fvec[1], &disc.grid)?,
            ],
            fvec_boundary: [
                BoundaryValues::from_field(&rep.fvec[0], &disc.nodes)?,
                BoundaryValues::from_field(&rep.fvec[1], &disc.nodes)?,
            ],
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

fn pairing_sum(rep: &SampledRep, v: &TestSamples, disc: &Discretization, component: Option<usize>) -> Result<f64> {
    v.boundary.check_shape(&disc.nodes)?;
    if v.volume.len() != disc.grid.len() {
        return Err(Error::NodeMismatch("test samples from a different volume grid".into()));
    }
    let mut total = 0.0;
    for j in 0..disc.domain.len() {
        if component.is_some_and(|c| c != j) {
            continue;
        }
        let g = disc.grid.component(j);
        let (f0, f1, f2) = (rep.f0.values(j), rep.fvec[0].values(j), rep.fvec[1].values(j));
        let (vv, gv) = (&v.volume[j], &v.gradient[j]);
        let mut vol = 0.0;
        for k in 0..g.points.len() {
            vol += g.weights[k] * (f0[k] * vv[k] - (f1[k] * gv[k][0] + f2[k] * gv[k][1]));
        }
        let b = disc.nodes.component(j).base();
        let (b1, b2) = (rep.fvec_boundary[0].component(j), rep.fvec_boundary[1].component(j));
        let vb = v.boundary.component(j);
        let mut bnd = 0.0;
        for i in 0..b.len() {
            bnd += b.weights[i] * (b.normals[i][0] * b1[i] + b.normals[i][1] * b2[i]) * vb[i];
        }
        total += vol + bnd;
    }
    Ok(total)
}

/// `I_Ω[f] = ∫ f₀ dx + ∮ Σ ν_j f_j dσ`, optionally restricted to one component.
pub fn integrate_i(rep: &SampledRep, disc: &Discretization, component: Option<usize>) -> Result<f64> {
    if let Some(j) = component {
        if j >= disc.domain.len() {
            return Err(Error::ComponentOutOfRange {
                index: j,
                count: disc.domain.len(),
            });
        }
    }
    pairing_sum(rep, &TestSamples::constant_one(disc), disc, component)
}

/// `⟨E♯[f], v⟩ = ∫ f₀ v + ∮ Σ ν_j f_j v dσ - Σ ∫ f_j ∂_j v`.
pub fn pair_e_sharp(rep: &SampledRep, v: &TestSamples, disc: &Discretization) -> Result<f64> {
    pairing_sum(rep, v, disc, None)
}

/// Same pairing restricted to component `j`.
pub fn pair_e_sharp_component(rep: &SampledRep, v: &TestSamples, disc: &Discretization, j: usize) -> Result<f64> {
    pairing_sum(rep, v, disc, Some(j))
}

/// `max |f(x) - f(y)| / |x - y|^α` over all sampled pairs.
pub fn holder_seminorm_estimate(samples: &[(Point, f64)], alpha: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("need at least two sample points".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::ParameterOutOfRange(format!("alpha {alpha} not in (0, 1]")));
    }
    Ok((0..samples.len())
        .into_par_iter()
        .map(|i| {
            let (p, fp) = samples[i];
            samples[i + 1..].iter().fold(0.0f64, |m, (q, fq)| {
                let d = norm(sub(p, *q));
                if d == 0.0 {
                    m
                } else {
                    m.max((fp - fq).abs() / d.powf(alpha))
                }
            })
        })
        .reduce(|| 0.0, f64::max))
}

/// Samples `field` at the points and forwards to [`holder_seminorm_estimate`].
pub fn holder_seminorm_of_field(field: &ScalarField, alpha: f64, points: &[Point]) -> Result<f64> {
    let samples: Vec<(Point, f64)> = points
        .iter()
        .map(|p| Ok((*p, field.eval(*p)?)))
        .collect::<Result<_>>()?;
    holder_seminorm_estimate(&samples, alpha)
}

/// Equispaced points on the circle of radius `r` about `c`.
pub fn circle_points(c: Point, r: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / count as f64;
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect()
}

/// `u ∈ C^{0,α}(Ω̄)_Δ`: boundary trace, interior evaluator and a
/// representative of `Δu`.
#[derive(Clone)]
pub struct HolderSolution {
    pub trace: BoundaryValues,
    interior: Arc<dyn Fn(Point) -> Result<f64> + Send + Sync>,
    pub lap_rep: Arc<DensityRep>,
}

impl std::fmt::Debug for HolderSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HolderSolution")
            .field("trace", &self.trace)
            .field("lap_rep", &self.lap_rep)
            .finish_non_exhaustive()
    }
}

impl HolderSolution {
    pub fn new(
        trace: BoundaryValues,
        interior: Arc<dyn Fn(Point) -> Result<f64> + Send + Sync>,
        lap_rep: Arc<DensityRep>,
    ) -> Self {
        HolderSolution {
            trace,
            interior,
            lap_rep,
        }
    }

    /// A closed-form solution `u` with known Laplacian representative.
    pub fn from_field(u: &ScalarField, lap_rep: DensityRep, nodes: &BoundaryNodes) -> Result<Self> {
        let trace = BoundaryValues::from_field(u, nodes)?;
        let u = u.clone();
        Ok(HolderSolution {
            trace,
            interior: Arc::new(move |p| u.eval(p)),
            lap_rep: Arc::new(lap_rep),
        })
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        (self.interior)(x)
    }

    /// The same function plus a constant on each component.
    pub fn shifted(&self, shifts: &[f64], domain: &crate::geometry::Domain) -> Self {
        let trace = BoundaryValues::new(
            self.trace
                .components()
                .iter()
                .zip(shifts)
                .map(|(v, s)| v.iter().map(|x| x + s).collect())
                .collect(),
        );
        let inner = self.interior.clone();
        let shifts = shifts.to_vec();
        let domain = domain.clone();
        HolderSolution {
            trace,
            interior: Arc::new(move |p| {
                let s = domain.component_of(p).map_or(0.0, |(j, _)| shifts[j]);
                Ok(inner(p)? + s)
            }),
            lap_rep: self.lap_rep.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, CurveSpec};
    use crate::quadrature::Discretization;

    fn disk() -> Discretization {
        let d = build_domain(vec![CurveSpec::circle([0.0, 0.0], 1.0)]).unwrap();
        Discretization::new(d, 128, 32, 64).unwrap()
    }

    fn rep(a: &str, b: &str, c: &str) -> DensityRep {
        DensityRep::parse(a, b, c, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn integration_functional() {
        let disc = disk();
        let i = |r: DensityRep| integrate_i(&SampledRep::new(&r, &disc).unwrap(), &disc, None).unwrap();
        assert!((i(rep("1", "0", "0")) - PI).abs() < 1e-10);
        assert!((i(rep("0", "x", "0")) - PI).abs() < 1e-10);
        assert!(i(rep("0", "y", "-x")).abs() < 1e-12);
        let s = SampledRep::new(&rep("1", "0", "0"), &disc).unwrap();
        assert!(matches!(
            integrate_i(&s, &disc, Some(3)),
            Err(Error::ComponentOutOfRange { index: 3, count: 1 })
        ));
    }

    #[test]
    fn e_sharp_examples() {
        let disc = disk();
        let one = TestSamples::constant_one(&disc);
        let s = SampledRep::new(&rep("1", "0", "0"), &disc).unwrap();
        assert!((pair_e_sharp(&s, &one, &disc).unwrap() - PI).abs() < 1e-10);
        let s = SampledRep::new(&rep("0", "x", "0"), &disc).unwrap();
        assert!((pair_e_sharp(&s, &one, &disc).unwrap() - PI).abs() < 1e-10);
        let s = SampledRep::new(&rep("0", "1", "0"), &disc).unwrap();
        for t in standard_battery(&disc, 4, 7) {
            let v = TestSamples::new(t.as_ref(), &disc, false).unwrap();
            assert!(pair_e_sharp(&s, &v, &disc).unwrap().abs() < 1e-9, "{}", t.name());
        }
    }

    #[test]
    fn pairing_with_one_is_integration_bitwise() {
        let disc = disk();
        let s = SampledRep::new(&rep("exp(x)", "x*y", "cos(y)"), &disc).unwrap();
        let a = pair_e_sharp(&s, &TestSamples::constant_one(&disc), &disc).unwrap();
        let b = integrate_i(&s, &disc, None).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn missing_gradient_is_reported() {
        let disc = disk();
        let f = FieldTest(ScalarField::parse("x*y", [0.0, 0.0], Support::Interior).unwrap());
        assert!(matches!(
            TestSamples::new(&f, &disc, false),
            Err(Error::MissingGradient)
        ));
        let s = TestSamples::new(&f, &disc, true).unwrap();
        assert!(s.fd_gradient);
        let p = disc.grid.component(0).points[5];
        assert!((s.gradient[0][5][0] - p[1]).abs() < 1e-8);
    }

    #[test]
    fn harmonic_polynomial_gradients() {
        for degree in 0..5 {
            for imaginary in [false, true] {
                let h = HarmonicPolynomial {
                    degree,
                    imaginary,
                    center: [0.1, -0.2],
                };
                let x = [0.4, 0.3];
                let g = h.gradient(x).unwrap().unwrap();
                let e = 1e-6;
                let fx = (h.value([x[0] + e, x[1]]).unwrap() - h.value([x[0] - e, x[1]]).unwrap()) / (2.0 * e);
                let fy = (h.value([x[0], x[1] + e]).unwrap() - h.value([x[0], x[1] - e]).unwrap()) / (2.0 * e);
                assert!((g[0] - fx).abs() < 1e-8 && (g[1] - fy).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn holder_estimates() {
        let pts: Vec<Point> = (0..40)
            .flat_map(|i| (0..40).map(move |k| [i as f64 / 40.0 - 0.5, k as f64 / 40.0 - 0.5]))
            .collect();
        let c = ScalarField::constant(2.0, Support::Interior);
        assert_eq!(holder_seminorm_of_field(&c, 0.5, &pts).unwrap(), 0.0);
        let x = ScalarField::parse("x", [0.0, 0.0], Support::Interior).unwrap();
        let l = holder_seminorm_of_field(&x, 1.0, &pts).unwrap();
        assert!((l - 1.0).abs() < 0.02);
        assert!(holder_seminorm_estimate(&[([0.0, 0.0], 1.0)], 0.5).is_err());
    }

    #[test]
    fn boundary_values_algebra() {
        let disc = disk();
        let one = BoundaryValues::indicator(&disc.nodes.shape(), 0);
        assert!((one.integrate(&disc.nodes, None) - 2.0 * PI).abs() < 1e-12);
        let c = BoundaryValues::from_fn(&disc.nodes, |_, t, _| t.cos());
        assert!((c.inner(&c, &disc.nodes) - PI).abs() < 1e-12);
        assert!(BoundaryValues::zeros(&[4]).check_shape(&disc.nodes).is_err());
    }
}
