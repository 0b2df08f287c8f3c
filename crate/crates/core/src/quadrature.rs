//! Discrete integration rules.
//!
//! * periodic trapezoid on boundary components (optionally refined dyadically
//!   for near-boundary targets, with FFT interpolation of node densities),
//! * the Kress / Kussmaul–Martensen split for `ln|x - y|` on the curve,
//! * polar tensor grids (Gauss–Legendre × trapezoid) for area integrals,
//! * Newtonian potentials by quadratic Taylor subtraction, where the
//!   polynomial part is reduced exactly to boundary integrals.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fieldexpr::ScalarField;
use crate::geometry::{
    cross, dot, level_for_distance, norm, sub, BoundaryNodes, BoundarySamples, ComponentInfo, ComponentNodes, Domain,
    Location, Point, VALIDATION_SAMPLES,
};

/// Default resolutions.
pub const DEFAULT_N: usize = 256;
pub const DEFAULT_M_R: usize = 48;
pub const DEFAULT_M_T: usize = 96;

/// Parameter distance below which an on-boundary target snaps to a node.
const NODE_SNAP: f64 = 1e-9;

/// Gauss–Legendre nodes and weights on `[0, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            dp = 1.0;
            z = 0.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1, 1] -> [0, 1], ascending
        x[i] = 0.5 * (1.0 - z);
        x[m - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[m - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

/// Polar tensor grid of one component.
#[derive(Clone, Debug)]
pub struct ComponentGrid {
    pub center: Point,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub m_r: usize,
    pub m_t: usize,
}

/// Volume quadrature on every component: `y = c + ρ(γ(t) - c)` with
/// Gauss–Legendre in `ρ` and the trapezoid rule in `t`.
#[derive(Clone, Debug)]
pub struct VolumeGrid {
    components: Vec<ComponentGrid>,
}

impl VolumeGrid {
    pub fn new(domain: &Domain, m_r: usize, m_t: usize) -> Result<Self> {
        if m_r < 2 || m_t < 4 {
            return Err(Error::InvalidResolution(format!(
                "volume grid needs M_r >= 2 and M_t >= 4, got ({m_r}, {m_t})"
            )));
        }
        let (rho, w_rho) = gauss_legendre(m_r);
        let mut components = Vec::with_capacity(domain.len());
        for (j, spec) in domain.components().iter().enumerate() {
            let c = domain.info(j).centroid;
            let star_ok = (0..VALIDATION_SAMPLES).all(|k| {
                let cp = spec.eval(2.0 * PI * k as f64 / VALIDATION_SAMPLES as f64);
                cross(sub(cp.pos, c), cp.d1) > 0.0
            });
            if !star_ok {
                return Err(Error::InvalidCurve {
                    component: j,
                    reason: "not star-shaped with respect to its centroid; the polar volume grid cannot cover it"
                        .into(),
                });
            }
            let h = 2.0 * PI / m_t as f64;
            let mut points = Vec::with_capacity(m_r * m_t);
            let mut weights = Vec::with_capacity(m_r * m_t);
            for k in 0..m_t {
                let cp = spec.eval(k as f64 * h);
                let radial = sub(cp.pos, c);
                let jac = cross(radial, cp.d1);
                for (r, wr) in rho.iter().zip(&w_rho) {
                    points.push([c[0] + r * radial[0], c[1] + r * radial[1]]);
                    weights.push(wr * h * r * jac);
                }
            }
            components.push(ComponentGrid {
                center: c,
                points,
                weights,
                m_r,
                m_t,
            });
        }
        Ok(VolumeGrid { components })
    }

    pub fn component(&self, j: usize) -> &ComponentGrid {
        &self.components[j]
    }

    pub fn components(&self) -> &[ComponentGrid] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Kress weights `R_j(s)` for `∫ ln(4 sin²((s - τ)/2)) ψ(τ) dτ ≈ Σ R_j(s) ψ(τ_j)`.
pub fn kress_weights_at(n: usize, s: f64) -> Vec<f64> {
    let half = n / 2;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| {
            let d = s - j as f64 * h;
            let c1 = d.cos();
            let (mut cm2, mut cm1) = (1.0, c1);
            let mut acc = 0.0;
            for m in 1..half {
                let cm = if m == 1 { c1 } else { 2.0 * c1 * cm1 - cm2 };
                if m > 1 {
                    cm2 = cm1;
                    cm1 = cm;
                }
                acc += cm / m as f64;
            }
            -4.0 * PI / n as f64 * acc - 4.0 * PI / (n * n) as f64 * (half as f64 * d).cos()
        })
        .collect()
}

/// Circulant log-quadrature weights on `N` equispaced nodes: `R_ij = r[(i - j) mod N]`.
#[derive(Clone, Debug)]
pub struct LogQuadRule {
    r: Arc<Vec<f64>>,
}

impl LogQuadRule {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidNodeCount(n));
        }
        Ok(LogQuadRule {
            r: Arc::new(kress_weights_at(n, 0.0)),
        })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let n = self.r.len();
        self.r[(i + n - j) % n]
    }

    /// Weights seen from node `i`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n()).map(|j| self.weight(i, j)).collect()
    }
}

/// Trapezoid sum of `field` over all boundary components.
pub fn integrate_boundary(field: &ScalarField, nodes: &BoundaryNodes) -> Result<f64> {
    let mut total = 0.0;
    for comp in nodes.components() {
        total += integrate_boundary_component(field, comp.base())?;
    }
    Ok(total)
}

pub fn integrate_boundary_component(field: &ScalarField, samples: &BoundarySamples) -> Result<f64> {
    let mut acc = 0.0;
    for (p, w) in samples.points.iter().zip(&samples.weights) {
        acc += w * field.eval(*p)?;
    }
    Ok(acc)
}

/// Weighted sum of `field` over every component grid.
pub fn volume_integrate(field: &ScalarField, grid: &VolumeGrid) -> Result<f64> {
    let mut total = 0.0;
    for comp in grid.components() {
        total += volume_integrate_component(field, comp)?;
    }
    Ok(total)
}

pub fn volume_integrate_component(field: &ScalarField, grid: &ComponentGrid) -> Result<f64> {
    let mut acc = 0.0;
    for (p, w) in grid.points.iter().zip(&grid.weights) {
        acc += w * field.eval(*p)?;
    }
    Ok(acc)
}

pub fn sample_boundary(field: &ScalarField, samples: &BoundarySamples) -> Result<Vec<f64>> {
    samples.points.iter().map(|p| field.eval(*p)).collect()
}

pub fn sample_grid(field: &ScalarField, grid: &ComponentGrid) -> Result<Vec<f64>> {
    grid.points.iter().map(|p| field.eval(*p)).collect()
}

// ---------------------------------------------------------------- FFT helpers

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buf: &mut [Complex<f64>], inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// Trigonometric interpolation of `N` equispaced samples onto `N · 2^level` points.
pub fn upsample(values: &[f64], level: usize) -> Vec<f64> {
    if level == 0 {
        return values.to_vec();
    }
    let n = values.len();
    let m = n << level;
    let mut a: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft(&mut a, false);
    let mut b = vec![Complex::new(0.0, 0.0); m];
    let half = n / 2;
    for k in 0..half {
        b[k] = a[k];
    }
    for k in half + 1..n {
        b[m - n + k] = a[k];
    }
    b[half] = a[half] * 0.5;
    b[m - half] = a[half] * 0.5;
    fft(&mut b, true);
    b.iter().map(|c| c.re / n as f64).collect()
}

/// Transpose of [`upsample`]: `Σ_m c_m (I a)_m = Σ_n (Iᵀ c)_n a_n`.
pub fn upsample_transpose(coeffs: &[f64], n: usize) -> Vec<f64> {
    let m = coeffs.len();
    if m == n {
        return coeffs.to_vec();
    }
    let mut c: Vec<Complex<f64>> = coeffs.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft(&mut c, true);
    let half = n / 2;
    let mut g = vec![Complex::new(0.0, 0.0); n];
    for k in 0..half {
        g[k] = c[k];
    }
    for k in half + 1..n {
        g[k] = c[m - n + k];
    }
    g[half] = (c[half] + c[m - half]) * 0.5;
    fft(&mut g, false);
    g.iter().map(|v| v.re / n as f64).collect()
}

// ---------------------------------------------------------------- discretization

/// Everything needed to integrate over `Ω` and `∂Ω` at one resolution.
#[derive(Debug)]
pub struct Discretization {
    pub domain: Domain,
    pub nodes: BoundaryNodes,
    pub grid: VolumeGrid,
    pub logquad: LogQuadRule,
}

impl Discretization {
    pub fn new(domain: Domain, n: usize, m_r: usize, m_t: usize) -> Result<Self> {
        let nodes = BoundaryNodes::new(&domain, n)?;
        let grid = VolumeGrid::new(&domain, m_r, m_t)?;
        let logquad = LogQuadRule::new(n)?;
        Ok(Discretization {
            domain,
            nodes,
            grid,
            logquad,
        })
    }

    pub fn n(&self) -> usize {
        self.logquad.n()
    }

    pub fn node_spacing(&self, j: usize) -> f64 {
        self.domain.info(j).perimeter / self.n() as f64
    }

    /// Coarse spacing of the volume grid near the boundary of component `j`.
    pub fn grid_spacing(&self, j: usize) -> f64 {
        let g = self.grid.component(j);
        let info = self.domain.info(j);
        (info.perimeter / g.m_t as f64).max(info.diameter() / g.m_r as f64)
    }

    /// Interior targets closer than two grid spacings to `∂Ω` get reduced accuracy.
    pub fn near_boundary(&self, x: Point) -> bool {
        (0..self.domain.len()).any(|j| {
            let loc = self.domain.locate(j, x);
            loc.is_inside_or_on() && loc.distance() < 2.0 * self.grid_spacing(j)
        })
    }

    /// Integration plan for boundary integrals over component `j` seen from `x`.
    pub fn plan(&self, j: usize, x: Point, loc: Location) -> BoundaryPlan<'_> {
        BoundaryPlan::new(self.nodes.component(j), self.domain.info(j), &self.logquad, x, loc)
    }
}

// ---------------------------------------------------------------- boundary plans

#[derive(Clone, Debug)]
struct OnCurve {
    point: Point,
    log_w: Vec<f64>,
    smooth_log: Vec<f64>,
}

/// How to evaluate `∮ [A(y) ln|x - y|² + B(y)] dσ_y` over one component.
///
/// Off the curve this is the trapezoid rule on a dyadic refinement with
/// spacing at most a quarter of the target distance; on the curve it is the
/// Kress split at the target parameter using the base nodes.
#[derive(Clone, Debug)]
pub struct BoundaryPlan<'a> {
    samples: &'a BoundarySamples,
    level: usize,
    saturated: bool,
    on: Option<OnCurve>,
    target: Point,
}

impl<'a> BoundaryPlan<'a> {
    pub fn new(comp: &'a ComponentNodes, info: &ComponentInfo, logquad: &LogQuadRule, x: Point, loc: Location) -> Self {
        match loc {
            Location::OnBoundary { t } => Self::on_curve(comp, logquad, t),
            _ => {
                let (level, ok) = level_for_distance(comp, info.max_speed, loc.distance());
                BoundaryPlan {
                    samples: comp.level(level),
                    level,
                    saturated: !ok,
                    on: None,
                    target: x,
                }
            }
        }
    }

    fn on_curve(comp: &'a ComponentNodes, logquad: &LogQuadRule, s: f64) -> Self {
        let base = comp.base();
        let n = base.len();
        let h = 2.0 * PI / n as f64;
        let nearest = (s / h).round();
        let snapped = (s - nearest * h).abs() < NODE_SNAP;
        let (s, diag) = if snapped {
            let i = (nearest as usize) % n;
            (i as f64 * h, Some(i))
        } else {
            (s, None)
        };
        let cp = comp.spec().eval(s);
        let log_w = match diag {
            Some(i) => logquad.row(i),
            None => kress_weights_at(n, s),
        };
        let smooth_log = (0..n)
            .map(|j| {
                if Some(j) == diag {
                    (cp.speed() * cp.speed()).ln()
                } else {
                    let z = sub(base.points[j], cp.pos);
                    let sn = (0.5 * (s - base.t[j])).sin();
                    (dot(z, z) / (4.0 * sn * sn)).ln()
                }
            })
            .collect();
        BoundaryPlan {
            samples: base,
            level: 0,
            saturated: false,
            on: Some(OnCurve {
                point: cp.pos,
                log_w,
                smooth_log,
            }),
            target: cp.pos,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// True when the refinement cap was hit before reaching the target spacing.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn is_on_curve(&self) -> bool {
        self.on.is_some()
    }

    pub fn samples(&self) -> &BoundarySamples {
        self.samples
    }

    /// Effective target (projected onto the curve for on-boundary targets).
    pub fn target(&self) -> Point {
        self.on.as_ref().map_or(self.target, |o| o.point)
    }

    /// `∮ [A ln|x - y|² + B] dσ`, with `(A, B) = f(i, z)` at sample `i`, `z = y_i - x`.
    pub fn integrate(&self, mut f: impl FnMut(usize, Point) -> (f64, f64)) -> f64 {
        let s = self.samples;
        let x = self.target();
        let mut acc = 0.0;
        match &self.on {
            None => {
                for i in 0..s.len() {
                    let z = sub(s.points[i], x);
                    let (a, b) = f(i, z);
                    let r2 = dot(z, z);
                    let la = if a == 0.0 { 0.0 } else { a * r2.ln() };
                    acc += s.weights[i] * (la + b);
                }
            }
            Some(on) => {
                for i in 0..s.len() {
                    let z = sub(s.points[i], x);
                    let (a, b) = f(i, z);
                    acc += on.log_w[i] * a * s.speeds[i] + s.weights[i] * (a * on.smooth_log[i] + b);
                }
            }
        }
        acc
    }

    /// Linear functional form: weights `c_i` (on this plan's samples) such that
    /// `∮ [A ln r² + B] dσ = Σ_i c_i` for the same `f`; per-sample contributions.
    pub fn contributions(&self, mut f: impl FnMut(usize, Point) -> (f64, f64)) -> Vec<f64> {
        let s = self.samples;
        let x = self.target();
        (0..s.len())
            .map(|i| {
                let z = sub(s.points[i], x);
                let (a, b) = f(i, z);
                match &self.on {
                    None => {
                        let la = if a == 0.0 { 0.0 } else { a * dot(z, z).ln() };
                        s.weights[i] * (la + b)
                    }
                    Some(on) => on.log_w[i] * a * s.speeds[i] + s.weights[i] * (a * on.smooth_log[i] + b),
                }
            })
            .collect()
    }
}

// ---------------------------------------------------------------- Newtonian potentials

/// Quadratic Taylor model `T(y) = c0 + g·(y - c) + ½ (y - c)ᵀ H (y - c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub center: Point,
    pub c0: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl Quadratic {
    pub fn constant(center: Point, c0: f64) -> Self {
        Quadratic {
            center,
            c0,
            grad: [0.0; 2],
            hess: [[0.0; 2]; 2],
        }
    }

    /// Finite-difference fit; degrades to the constant model if the stencil
    /// leaves the field's domain of definition.
    pub fn fit(field: &ScalarField, center: Point, h: f64) -> Result<Self> {
        let f0 = field.eval(center)?;
        let at = |dx: f64, dy: f64| field.eval([center[0] + dx * h, center[1] + dy * h]);
        let stencil = || -> Result<Self> {
            let (xp, xm) = (at(1.0, 0.0)?, at(-1.0, 0.0)?);
            let (yp, ym) = (at(0.0, 1.0)?, at(0.0, -1.0)?);
            let (pp, pm) = (at(1.0, 1.0)?, at(1.0, -1.0)?);
            let (mp, mm) = (at(-1.0, 1.0)?, at(-1.0, -1.0)?);
            let hxy = (pp - pm - mp + mm) / (4.0 * h * h);
            Ok(Quadratic {
                center,
                c0: f0,
                grad: [(xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h)],
                hess: [
                    [(xp - 2.0 * f0 + xm) / (h * h), hxy],
                    [hxy, (yp - 2.0 * f0 + ym) / (h * h)],
                ],
            })
        };
        Ok(stencil().unwrap_or(Self::constant(center, f0)))
    }

    pub fn eval(&self, y: Point) -> f64 {
        let d = sub(y, self.center);
        self.c0 + dot(self.grad, d) + 0.5 * quad_form(&self.hess, d)
    }

    /// Coefficients `(a0, a1, H)` of the same polynomial in `z = y - x`.
    fn recentre(&self, x: Point) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let d = sub(x, self.center);
        let a0 = self.eval(x);
        let hd = [
            self.hess[0][0] * d[0] + self.hess[0][1] * d[1],
            self.hess[1][0] * d[0] + self.hess[1][1] * d[1],
        ];
        (a0, [self.grad[0] + hd[0], self.grad[1] + hd[1]], self.hess)
    }
}

fn quad_form(h: &[[f64; 2]; 2], z: Point) -> f64 {
    h[0][0] * z[0] * z[0] + 2.0 * h[0][1] * z[0] * z[1] + h[1][1] * z[1] * z[1]
}

/// Volume kernel `K(x, y)` integrated against a density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeKernel {
    /// `S₂(x - y)`
    Newton,
    /// `∂_{x_j} S₂(x - y)`
    Gradient(usize),
}

impl VolumeKernel {
    fn eval(self, z: Point) -> f64 {
        // z = y - x
        let r2 = dot(z, z);
        match self {
            VolumeKernel::Newton => r2.ln() / (4.0 * PI),
            VolumeKernel::Gradient(j) => -z[j] / (2.0 * PI * r2),
        }
    }

    /// Exact `∫_{Ω_j} K(x, y) T(y) dy` via the divergence theorem applied to
    /// each homogeneous part of `T` in `z = y - x`.
    fn polynomial_moment(self, plan: &BoundaryPlan<'_>, x: Point, t: &Quadratic) -> f64 {
        let (a0, a1, h) = t.recentre(x);
        let s = plan.samples();
        match self {
            VolumeKernel::Newton => plan.integrate(|i, z| {
                let zn = dot(z, s.normals[i]);
                let p1 = dot(a1, z);
                let p2 = 0.5 * quad_form(&h, z);
                let a = zn / (4.0 * PI) * (a0 / 2.0 + p1 / 3.0 + p2 / 4.0);
                let b = -zn / (2.0 * PI) * (a0 / 4.0 + p1 / 9.0 + p2 / 16.0);
                (a, b)
            }),
            VolumeKernel::Gradient(j) => plan.integrate(|i, z| {
                let r2 = dot(z, z);
                if r2 == 0.0 {
                    return (0.0, 0.0);
                }
                let zn = dot(z, s.normals[i]);
                let p1 = dot(a1, z);
                let p2 = 0.5 * quad_form(&h, z);
                let b = -zn * z[j] / (2.0 * PI * r2) * (a0 + p1 / 2.0 + p2 / 3.0);
                (0.0, b)
            }),
        }
    }
}

/// A density sampled on the volume grid, with the field kept for Taylor fits.
#[derive(Clone, Debug)]
pub struct SampledDensity {
    field: ScalarField,
    values: Vec<Vec<f64>>,
}

impl SampledDensity {
    pub fn new(field: &ScalarField, grid: &VolumeGrid) -> Result<Self> {
        let values = if field.is_zero() {
            grid.components().iter().map(|g| vec![0.0; g.points.len()]).collect()
        } else {
            grid.components()
                .iter()
                .map(|g| sample_grid(field, g))
                .collect::<Result<_>>()?
        };
        Ok(SampledDensity {
            field: field.clone(),
            values,
        })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn values(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero()
    }
}

/// `∫_Ω K(x, y) f(y) dy` with Taylor subtraction about `center` (defaults to
/// `x` inside `Ω̄`, the nearest boundary point for nearby exterior targets).
pub fn newtonian(
    disc: &Discretization,
    density: &SampledDensity,
    kernel: VolumeKernel,
    x: Point,
    center: Option<Point>,
) -> Result<f64> {
    if density.is_zero() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for j in 0..disc.domain.len() {
        let loc = disc.domain.locate(j, x);
        total += newtonian_component(disc, density, kernel, j, x, loc, center)?;
    }
    Ok(total)
}

pub fn newtonian_component(
    disc: &Discretization,
    density: &SampledDensity,
    kernel: VolumeKernel,
    j: usize,
    x: Point,
    loc: Location,
    center: Option<Point>,
) -> Result<f64> {
    let grid = disc.grid.component(j);
    let values = density.values(j);
    let info = disc.domain.info(j);
    let far = matches!(loc, Location::Outside { distance, .. } if distance > info.diameter());
    if far {
        return Ok(grid
            .points
            .iter()
            .zip(&grid.weights)
            .zip(values)
            .map(|((y, w), f)| w * kernel.eval(sub(*y, x)) * f)
            .sum());
    }
    let plan = disc.plan(j, x, loc);
    let x = plan.target();
    let center = center.unwrap_or(match loc {
        Location::Outside { t, .. } => disc.nodes.component(j).spec().eval(t).pos,
        _ => x,
    });
    let h = 1e-3 * disc.domain.scale().max(1e-300);
    let t = Quadratic::fit(density.field(), center, h)?;
    let tiny = 1e-14 * info.diameter();
    let mut rem = 0.0;
    for ((y, w), f) in grid.points.iter().zip(&grid.weights).zip(values) {
        let z = sub(*y, x);
        if norm(z) <= tiny {
            continue;
        }
        rem += w * kernel.eval(z) * (f - t.eval(*y));
    }
    Ok(rem + kernel.polynomial_moment(&plan, x, &t))
}

/// `∫_Ω S₂(x - y) f(y) dy`.
pub fn singular_volume_potential(disc: &Discretization, field: &ScalarField, x: Point) -> Result<f64> {
    let d = SampledDensity::new(field, &disc.grid)?;
    newtonian(disc, &d, VolumeKernel::Newton, x, None)
}

/// `∇_x ∫_Ω S₂(x - y) f(y) dy`.
pub fn newtonian_gradient(disc: &Discretization, field: &ScalarField, x: Point) -> Result<[f64; 2]> {
    let d = SampledDensity::new(field, &disc.grid)?;
    Ok([
        newtonian(disc, &d, VolumeKernel::Gradient(0), x, None)?,
        newtonian(disc, &d, VolumeKernel::Gradient(1), x, None)?,
    ])
}
