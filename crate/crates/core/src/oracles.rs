//! Closed-form and brute-force references, and the identity suite behind
//! `nvneumann verify`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bie::{dirichlet_solve, AssemblyOptions, OperatorSet};
use crate::error::{Error, Result};
use crate::fieldexpr::{ScalarField, Support};
use crate::geometry::{build_domain, CurveSpec, Domain, Point};
use crate::kernels::{eval_s, grad_s, hessian_s, KernelDim};
use crate::neumann::{check_compatibility, solve, uniqueness_certificate, NeumannProblem, Normalization};
use crate::normal_derivative::{pair_normal_derivative, v1alpha_representation};
use crate::potentials::{discrete_laplacian, VolumePotential};
use crate::quadrature::{gauss_legendre, Discretization, DEFAULT_M_R, DEFAULT_M_T, DEFAULT_N};
use crate::schauder::{
    pair_e_sharp, BoundaryDist, BoundaryValues, DensityRep, FieldTest, HarmonicPolynomial, HolderSolution, SampledRep,
    TestField, TestSamples, FD_STEP,
};

/// `a0 + Σ_k cos[k-1] cos kθ + sin[k-1] sin kθ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierCoeffs {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierCoeffs {
    pub fn mode(k: usize, sine: bool) -> Self {
        let mut c = FourierCoeffs::default();
        if k == 0 {
            c.a0 = 1.0;
        } else if sine {
            c.sin = vec![0.0; k];
            c.sin[k - 1] = 1.0;
        } else {
            c.cos = vec![0.0; k];
            c.cos[k - 1] = 1.0;
        }
        c
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_scaled(theta, 1.0)
    }

    /// `a0 + Σ ρ^k (…)`.
    fn eval_scaled(&self, theta: f64, rho: f64) -> f64 {
        let mut v = self.a0;
        let mut p = 1.0;
        for k in 1..=self.cos.len().max(self.sin.len()) {
            p *= rho;
            let (s, c) = (k as f64 * theta).sin_cos();
            v += p * (self.cos.get(k - 1).unwrap_or(&0.0) * c + self.sin.get(k - 1).unwrap_or(&0.0) * s);
        }
        v
    }
}

/// `a_k ↦ (|k| / R) a_k`.
pub fn disk_steklov(coeffs: &FourierCoeffs, radius: f64) -> FourierCoeffs {
    let scale = |v: &[f64]| -> Vec<f64> { v.iter().enumerate().map(|(i, a)| (i + 1) as f64 / radius * a).collect() };
    FourierCoeffs {
        a0: 0.0,
        cos: scale(&coeffs.cos),
        sin: scale(&coeffs.sin),
    }
}

/// Dirichlet data on a circle and its harmonic extension.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskOracle {
    pub center: Point,
    pub radius: f64,
    pub coeffs: FourierCoeffs,
}

impl DiskOracle {
    pub fn new(center: Point, radius: f64, coeffs: FourierCoeffs) -> Self {
        DiskOracle { center, radius, coeffs }
    }

    pub fn trace(&self, theta: f64) -> f64 {
        self.coeffs.eval(theta)
    }

    /// `a0 + Σ (r/R)^k (…)` at an interior point.
    pub fn extension(&self, x: Point) -> f64 {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        self.coeffs.eval_scaled(dy.atan2(dx), dx.hypot(dy) / self.radius)
    }

    pub fn steklov(&self) -> DiskOracle {
        DiskOracle {
            coeffs: disk_steklov(&self.coeffs, self.radius),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialProfile {
    Constant,
}

/// `∫_{|y| < R} S_n(x - y) dy` at `|x| = r` for `f ≡ 1`.
pub fn radial_newtonian(n: usize, profile: RadialProfile, radius: f64, r: f64) -> Result<f64> {
    let RadialProfile::Constant = profile;
    if !(r >= 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need r ≥ 0 and R > 0, got r = {r}, R = {radius}"
        )));
    }
    let big = radius * radius;
    match n {
        2 if r <= radius => Ok((r * r - big) / 4.0 + big / 2.0 * radius.ln()),
        2 => Ok(big / 2.0 * r.ln()),
        3 if r <= radius => Ok(r * r / 6.0 - big / 2.0),
        3 => Ok(-big * radius / (3.0 * r)),
        _ => Err(Error::Unsupported(format!("radial Newtonian potential for n = {n}"))),
    }
}

/// `∫_{|y| < 1} S_3(x - y) dy` at `x = (0, 0, r)`, `r ≤ 1`, in spherical
/// coordinates about `x`; exercises `S_3` directly.
pub fn ball_newtonian_quadrature(r: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("r = {r} must lie in [0, 1]")));
    }
    let n3 = KernelDim::new(3)?;
    let (gx, gw) = gauss_legendre(m);
    let mut total = 0.0;
    // polar cosine split at 0 where the ray length has a kink for r = 1
    for (lo, hi) in [(-1.0, 0.0), (0.0, 1.0)] {
        for (xc, wc) in gx.iter().zip(&gw) {
            let c: f64 = lo + (hi - lo) * xc;
            let s = (1.0 - c * c).max(0.0).sqrt();
            let reach = -r * c + (r * r * c * c + 1.0 - r * r).sqrt();
            if reach <= 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for (xr, wr) in gx.iter().zip(&gw) {
                let rho = reach * xr;
                inner += wr * reach * rho * rho * eval_s(n3, &[rho * s, 0.0, rho * c])?;
            }
            total += wc * (hi - lo) * inner;
        }
    }
    Ok(2.0 * PI * total)
}

/// `∫_Ω f0 v - Σ_j ∫_Ω f_j ∂_j v + ∮ (ν·f) v dσ` at `factor ×` the default
/// resolution, with fields evaluated directly at every sample.
pub fn brute_pairing(rep: &DensityRep, v: &dyn TestField, domain: &Domain, factor: usize) -> Result<f64> {
    let factor = factor.max(1);
    let disc = Discretization::new(
        domain.clone(),
        DEFAULT_N * factor,
        DEFAULT_M_R * factor,
        DEFAULT_M_T * factor,
    )?;
    let grad = |x: Point| -> Result<[f64; 2]> {
        match v.gradient(x) {
            Some(g) => g,
            None => {
                let h = FD_STEP;
                let d = |dx: f64, dy: f64| v.value([x[0] + dx, x[1] + dy]);
                Ok([
                    (d(h, 0.0)? - d(-h, 0.0)?) / (2.0 * h),
                    (d(0.0, h)? - d(0.0, -h)?) / (2.0 * h),
                ])
            }
        }
    };
    let [f1, f2] = &rep.fvec;
    let mut total = 0.0;
    for g in disc.grid.components() {
        let parts = g
            .points
            .par_iter()
            .zip(&g.weights)
            .map(|(&x, &w)| {
                let mut s = 0.0;
                if !rep.f0.is_zero() {
                    s += rep.f0.eval(x)? * v.value(x)?;
                }
                if !f1.is_zero() || !f2.is_zero() {
                    let dv = grad(x)?;
                    s -= f1.eval(x)? * dv[0] + f2.eval(x)? * dv[1];
                }
                Ok(w * s)
            })
            .collect::<Result<Vec<f64>>>()?;
        total += parts.iter().sum::<f64>();
    }
    if !f1.is_zero() || !f2.is_zero() {
        for c in disc.nodes.components() {
            let b = c.base();
            for i in 0..b.len() {
                let x = b.points[i];
                let nu = b.normals[i];
                total += b.weights[i] * (nu[0] * f1.eval(x)? + nu[1] * f2.eval(x)?) * v.value(x)?;
            }
        }
    }
    Ok(total)
}

/// Centred second differences `Σ_j (f(x + h e_j) - 2 f(x) + f(x - h e_j)) / h²`.
pub fn fd_laplacian(f: impl Fn(Point) -> Result<f64>, x: Point, h: f64) -> Result<f64> {
    let c = f(x)?;
    let mut s = 0.0;
    for k in 0..2 {
        let (mut a, mut b) = (x, x);
        a[k] += h;
        b[k] -= h;
        s += f(a)? - 2.0 * c + f(b)?;
    }
    Ok(s / (h * h))
}

// ------------------------------------------------------------------ suite

/// One identity check: `|got - expected| ≤ tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    pub tol: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: f64, got: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            expected,
            got,
            tol,
        }
    }

    pub fn pass(&self) -> bool {
        (self.got - self.expected).abs() <= self.tol
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Keep only checks whose `group/name` contains this string.
    pub filter: Option<String>,
    /// Assemble with a sign-flipped `K′` (fault injection).
    pub flip_kprime: bool,
}

type Group = fn(&Ctx) -> Result<Vec<Check>>;

const GROUPS: &[(&str, Group)] = &[
    ("steklov", steklov_checks),
    ("jump", jump_checks),
    ("dirichlet", dirichlet_checks),
    ("kernel", kernel_checks),
    ("potential", potential_checks),
    ("pairing", pairing_checks),
    ("normal", normal_checks),
    ("neumann", neumann_checks),
];

struct Ctx {
    options: AssemblyOptions,
}

impl Ctx {
    fn ops(&self, specs: Vec<CurveSpec>, n: usize) -> Result<OperatorSet> {
        let disc = Arc::new(Discretization::new(build_domain(specs)?, n, 32, 64)?);
        OperatorSet::assemble(disc, self.options)
    }

    fn unit(&self, n: usize) -> Result<OperatorSet> {
        self.ops(vec![CurveSpec::circle([0.0, 0.0], 1.0)], n)
    }
}

/// Runs the identity suite; a check that errors is reported with `got = NaN`.
pub fn verify_suite(options: &VerifyOptions) -> Vec<Check> {
    let ctx = Ctx {
        options: AssemblyOptions {
            flip_adjoint_double_layer: options.flip_kprime,
        },
    };
    let filter = options.filter.as_deref().unwrap_or("");
    let mut out = Vec::new();
    for (group, run) in GROUPS {
        if !(group.contains(filter) || filter.starts_with(&format!("{group}/"))) {
            continue;
        }
        match run(&ctx) {
            Ok(checks) => out.extend(checks.into_iter().map(|mut c| {
                c.name = format!("{group}/{}", c.name);
                c
            })),
            Err(e) => out.push(Check::new(format!("{group}/error: {e}"), 0.0, f64::NAN, 0.0)),
        }
    }
    out.retain(|c| c.name.contains(filter) || c.name.starts_with(&format!("{filter}/")) || filter.is_empty());
    out
}

fn max_err(a: &BoundaryValues, b: &BoundaryValues) -> f64 {
    a.zip_with(b, |x, y| (x - y).abs()).max_abs()
}

fn steklov_checks(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ops = ctx.unit(128)?;
    let nodes = &ops.disc().nodes;
    for k in 0..=8 {
        let disk = DiskOracle::new([0.0, 0.0], 1.0, FourierCoeffs::mode(k, false));
        let v = BoundaryValues::from_fn(nodes, |_, t, _| disk.trace(t));
        let want = disk.steklov();
        let want = BoundaryValues::from_fn(nodes, |_, t, _| want.trace(t));
        out.push(Check::new(
            format!("cos{k}"),
            0.0,
            max_err(&ops.steklov(&v)?, &want),
            1e-8,
        ));
    }
    let v = BoundaryValues::from_fn(nodes, |_, t, _| (5.0 * t).sin());
    let want = BoundaryValues::from_fn(nodes, |_, t, _| 5.0 * (5.0 * t).sin());
    out.push(Check::new("sin5", 0.0, max_err(&ops.steklov(&v)?, &want), 1e-8));

    let ops = ctx.ops(vec![CurveSpec::circle([0.3, -0.2], 2.0)], 128)?;
    let disk = DiskOracle::new([0.3, -0.2], 2.0, FourierCoeffs::mode(3, false));
    let nodes = &ops.disc().nodes;
    let v = BoundaryValues::from_fn(nodes, |_, t, _| disk.trace(t));
    let want = disk.steklov();
    let want = BoundaryValues::from_fn(nodes, |_, t, _| want.trace(t));
    out.push(Check::new("radius2-cos3", 0.0, max_err(&ops.steklov(&v)?, &want), 1e-8));

    let ops = ctx.ops(vec![CurveSpec::ellipse([0.0, 0.0], 1.5, 1.0)], 128)?;
    let nodes = &ops.disc().nodes;
    let one = BoundaryValues::from_fn(nodes, |_, _, _| 1.0);
    out.push(Check::new("ellipse-constant", 0.0, ops.steklov(&one)?.max_abs(), 1e-8));
    let b = nodes.component(0).base();
    let v = BoundaryValues::from_fn(nodes, |_, _, p| p[0] * p[0] - p[1] * p[1]);
    let want = BoundaryValues::new(vec![(0..b.len())
        .map(|i| 2.0 * (b.points[i][0] * b.normals[i][0] - b.points[i][1] * b.normals[i][1]))
        .collect()]);
    out.push(Check::new(
        "ellipse-x2-y2",
        0.0,
        max_err(&ops.steklov(&v)?, &want),
        1e-8,
    ));
    let v = BoundaryValues::from_fn(nodes, |_, t, p| (3.0 * t).cos() + p[0].exp());
    out.push(Check::new(
        "ellipse-flux",
        0.0,
        ops.steklov(&v)?.integrate(nodes, None),
        1e-8,
    ));
    Ok(out)
}

fn jump_checks(ctx: &Ctx) -> Result<Vec<Check>> {
    let star = CurveSpec::Trig {
        x: crate::geometry::TrigSeries {
            a0: 0.0,
            cos: vec![1.0, 0.0, 0.0, 0.0, 0.1],
            sin: vec![],
        },
        y: crate::geometry::TrigSeries {
            a0: 0.0,
            cos: vec![],
            sin: vec![1.0, 0.0, 0.0, 0.0, -0.1],
        },
    };
    let cases = vec![
        ("circle", vec![CurveSpec::circle([0.0, 0.0], 1.0)]),
        ("ellipse", vec![CurveSpec::ellipse([0.2, 0.1], 2.0, 1.0)]),
        ("star", vec![star]),
        (
            "two-disks",
            vec![CurveSpec::circle([-2.0, 0.0], 1.0), CurveSpec::circle([2.0, 0.5], 0.7)],
        ),
    ];
    let mut out = Vec::new();
    for (name, specs) in cases {
        let ops = ctx.ops(specs, 128)?;
        // weighted column sums: Σ_i w_i K′_ij = w_j / 2
        let mut dev = 0.0f64;
        for j in 0..ops.len() {
            let b = ops.disc().nodes.component(j).base();
            let kp = &ops.component(j).kprime;
            for k in 0..b.len() {
                let col: f64 = (0..b.len()).map(|i| b.weights[i] * kp[(i, k)]).sum();
                dev = dev.max((col / b.weights[k] - 0.5).abs());
            }
        }
        out.push(Check::new(format!("gauss-{name}"), 0.0, dev, 1e-8));
    }
    let ops = ctx.unit(128)?;
    let ones = nalgebra::DVector::from_element(128, 1.0);
    let k1 = &ops.component(0).kprime * ones;
    out.push(Check::new(
        "kprime-one-circle",
        0.0,
        k1.iter().fold(0.0f64, |m, x| m.max((x - 0.5).abs())),
        1e-8,
    ));
    Ok(out)
}

fn dirichlet_checks(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ops = ctx.unit(128)?;
    let domain = &ops.disc().domain;
    let probes = domain.probe_points(0, &[0.3, 0.6, 0.9], 8);
    for k in 1..=4 {
        let disk = DiskOracle::new([0.0, 0.0], 1.0, FourierCoeffs::mode(k, false));
        let v = BoundaryValues::from_fn(&ops.disc().nodes, |_, t, _| disk.trace(t));
        let sol = dirichlet_solve(&v, &ops, &probes)?;
        let err = probes
            .iter()
            .zip(&sol.values)
            .fold(0.0f64, |m, (p, u)| m.max((u - disk.extension(*p)).abs()));
        out.push(Check::new(format!("disk-r{k}cos{k}"), 0.0, err, 1e-8));
    }
    let center = [0.2, 0.1];
    let ops = ctx.ops(vec![CurveSpec::ellipse(center, 2.0, 1.0)], 128)?;
    let probes = ops.disc().domain.probe_points(0, &[0.3, 0.6, 0.9], 8);
    for (degree, imaginary) in [(3, false), (2, true)] {
        let h = HarmonicPolynomial {
            degree,
            imaginary,
            center,
        };
        let v = BoundaryValues::from_fn(&ops.disc().nodes, |_, _, p| h.value(p).unwrap_or(f64::NAN));
        let sol = dirichlet_solve(&v, &ops, &probes)?;
        let mut err = 0.0f64;
        for (p, u) in probes.iter().zip(&sol.values) {
            err = err.max((u - h.value(*p)?).abs());
        }
        out.push(Check::new(format!("ellipse-{}", h.name()), 0.0, err, 1e-8));
    }
    let ops = ctx.ops(
        vec![CurveSpec::circle([-2.0, 0.0], 1.0), CurveSpec::circle([2.0, 0.0], 1.0)],
        128,
    )?;
    let v = BoundaryValues::from_fn(
        &ops.disc().nodes,
        |j, _, p| if j == 0 { p[1] } else { 3.0 + p[0] * p[1] },
    );
    let probes = [[-2.2, 0.3], [-1.5, -0.4], [2.3, 0.5], [1.6, -0.2]];
    let sol = dirichlet_solve(&v, &ops, &probes)?;
    let want = |p: Point| if p[0] < 0.0 { p[1] } else { 3.0 + p[0] * p[1] };
    let err = probes
        .iter()
        .zip(&sol.values)
        .fold(0.0f64, |m, (p, u)| m.max((u - want(*p)).abs()));
    out.push(Check::new("two-disks", 0.0, err, 1e-8));
    Ok(out)
}

fn kernel_checks(_: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for r in [0.0, 0.5, 1.0] {
        let want = radial_newtonian(3, RadialProfile::Constant, 1.0, r)?;
        out.push(Check::new(
            format!("ball3-r{r}"),
            want,
            ball_newtonian_quadrature(r, 24)?,
            1e-10,
        ));
    }
    for n in [2usize, 3] {
        let dim = KernelDim::new(n)?;
        let mut trace = 0.0f64;
        let mut flux = 0.0f64;
        for s in [0.3, 1.0, 2.7] {
            let xi: Vec<f64> = (0..n).map(|k| s * (1.0 + k as f64).sqrt()).collect();
            let h = hessian_s(dim, &xi)?;
            trace = trace.max((0..n).map(|k| h[k][k]).sum::<f64>().abs());
            // ∮_{|ξ| = r} ∇S·ν = r^{n-1} s_n ∂_r S
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let g = grad_s(dim, &xi)?;
            let dr = g.iter().zip(&xi).map(|(a, b)| a * b / r).sum::<f64>();
            flux = flux.max((dr * r.powi(n as i32 - 1) * dim.sphere_measure() - 1.0).abs());
        }
        out.push(Check::new(format!("harmonic-n{n}"), 0.0, trace, 1e-12));
        out.push(Check::new(format!("unit-flux-n{n}"), 0.0, flux, 1e-12));
    }
    out.push(Check::new(
        "s2-unit-circle",
        0.0,
        eval_s(KernelDim::new(2)?, &[0.6, 0.8])?,
        1e-15,
    ));
    Ok(out)
}

fn potential_checks(_: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let domain = build_domain(vec![CurveSpec::circle([0.0, 0.0], 1.0)])?;
    let disc = Arc::new(Discretization::new(domain, DEFAULT_N, DEFAULT_M_R, DEFAULT_M_T)?);
    let one = DensityRep::parse("1", "0", "0", [0.0, 0.0])?;
    let pot = VolumePotential::new(disc.clone(), &one)?;
    for (x, label) in [
        ([0.0, 0.0], "center"),
        ([0.3, 0.4], "r0.5"),
        ([0.0, -0.9], "r0.9"),
        ([0.7, 0.7141428], "r~1"),
        ([1.5, 0.0], "r1.5"),
        ([-2.0, 3.0], "far"),
    ] {
        let r = f64::hypot(x[0], x[1]);
        let want = radial_newtonian(2, RadialProfile::Constant, 1.0, r)?;
        out.push(Check::new(format!("disk-one-{label}"), want, pot.eval(x)?, 1e-3));
    }
    out.push(Check::new("disk-one-trace", 0.0, pot.trace()?.max_abs(), 1e-3));
    out.push(Check::new(
        "disk-one-laplacian",
        1.0,
        discrete_laplacian(&pot, [0.2, -0.1], 1e-2)?,
        1e-3,
    ));
    let inf = pot.infinity_behavior(&[1e2, 1e3, 1e4])?;
    out.push(Check::new("log-coefficient", 0.5, inf.log_coefficient, 1e-3));
    let mean_zero = VolumePotential::new(disc, &DensityRep::parse("x", "0", "0", [0.0, 0.0])?)?;
    out.push(Check::new(
        "mean-zero-decay",
        0.0,
        mean_zero.exterior_theta([1e3, 0.0])?,
        1e-2,
    ));
    Ok(out)
}

fn field(text: &str) -> Result<ScalarField> {
    ScalarField::parse(text, [0.0, 0.0], Support::Interior)
}

/// `(-Δφ, ∂₁φ, ∂₂φ)` for `φ = (1 - r²)³`, which is zero as a distribution.
pub fn zero_rep_unit_disk() -> Result<DensityRep> {
    DensityRep::parse(
        "12*(1-x^2-y^2)^2 - 24*(x^2+y^2)*(1-x^2-y^2)",
        "-6*x*(1-x^2-y^2)^2",
        "-6*y*(1-x^2-y^2)^2",
        [0.0, 0.0],
    )
}

fn pairing_checks(_: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let domain = build_domain(vec![CurveSpec::circle([0.0, 0.0], 1.0)])?;
    let one = FieldTest(ScalarField::constant(1.0, Support::Interior));
    let x = FieldTest(field("x")?);
    let rep1 = DensityRep::parse("1", "0", "0", [0.0, 0.0])?;
    out.push(Check::new(
        "brute-one",
        PI,
        brute_pairing(&rep1, &one, &domain, 4)?,
        1e-12,
    ));
    let repx = DensityRep::parse("0", "x", "0", [0.0, 0.0])?;
    out.push(Check::new("brute-x", 0.0, brute_pairing(&repx, &x, &domain, 4)?, 1e-10));
    let zero = zero_rep_unit_disk()?;
    let bump = FieldTest(field("exp(x)*cos(2*y)")?);
    out.push(Check::new(
        "brute-zero-rep",
        0.0,
        brute_pairing(&zero, &bump, &domain, 4)?,
        1e-8,
    ));

    let disc = Discretization::new(domain.clone(), DEFAULT_N, DEFAULT_M_R, DEFAULT_M_T)?;
    let z3 = HarmonicPolynomial {
        degree: 3,
        imaginary: false,
        center: [0.0, 0.0],
    };
    let rep = DensityRep::parse("x^2", "y", "sin(x)", [0.0, 0.0])?;
    let got = pair_e_sharp(
        &SampledRep::new(&rep, &disc)?,
        &TestSamples::new(&z3, &disc, false)?,
        &disc,
    )?;
    out.push(Check::new(
        "e-sharp-vs-brute",
        brute_pairing(&rep, &z3, &domain, 4)?,
        got,
        1e-6,
    ));
    let v = TestSamples::new(&bump, &disc, true)?;
    let a = pair_e_sharp(
        &SampledRep::new(&DensityRep::parse("2", "0", "0", [0.0, 0.0])?, &disc)?,
        &v,
        &disc,
    )?;
    let b = pair_e_sharp(
        &SampledRep::new(&DensityRep::parse("0", "x", "y", [0.0, 0.0])?, &disc)?,
        &v,
        &disc,
    )?;
    out.push(Check::new("rep-equivalence", a, b, 1e-6));
    Ok(out)
}

fn normal_checks(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ops = ctx.unit(128)?;
    let nodes = &ops.disc().nodes;
    let b = nodes.component(0).base();
    // (name, u, Δu, ∂_r u on the unit circle as a function of θ)
    let cases: [(&str, &str, &str, fn(f64) -> f64); 3] = [
        ("x2-y2", "x^2-y^2", "0", |t| 2.0 * (2.0 * t).cos()),
        ("r2/4", "(x^2+y^2)/4", "1", |_| 0.5),
        ("r4/16", "(x^2+y^2)^2/16", "x^2+y^2", |_| 0.25),
    ];
    for (name, u, lap, dr) in cases {
        let sol = HolderSolution::from_field(&field(u)?, DensityRep::parse(lap, "0", "0", [0.0, 0.0])?, nodes)?;
        for (vname, v) in [
            ("chi", BoundaryValues::from_fn(nodes, |_, _, _| 1.0)),
            ("cos2", BoundaryValues::from_fn(nodes, |_, t, _| (2.0 * t).cos())),
        ] {
            let classical: f64 = (0..b.len())
                .map(|i| b.weights[i] * dr(b.t[i]) * v.component(0)[i])
                .sum();
            let got = pair_normal_derivative(&sol, &v, &ops)?;
            out.push(Check::new(
                format!("{name}-{vname}"),
                classical,
                got,
                1e-6 * (1.0 + v.max_abs()),
            ));
        }
    }
    let sol = HolderSolution::from_field(
        &field("(x^2+y^2)/4")?,
        DensityRep::parse("1", "0", "0", [0.0, 0.0])?,
        nodes,
    )?;
    let rep = v1alpha_representation(&sol, &ops, 8)?;
    out.push(Check::new(
        "v1alpha-mu0",
        0.0,
        rep.dist.mu0.map(|x| x - 0.5).max_abs(),
        1e-3,
    ));
    out.push(Check::new(
        "v1alpha-mu1",
        0.0,
        rep.dist.mu1.map(|x| x - 0.25).max_abs(),
        1e-3,
    ));
    Ok(out)
}

fn neumann_checks(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ops = ctx.unit(128)?;
    let disc = ops.disc_arc();
    let probes = disc.domain.probe_points(0, &[0.3, 0.6, 0.9], 8);
    let problem = |f0: &str, mu0: &str, mu1: &str| -> Result<NeumannProblem> {
        let f = DensityRep::parse(f0, "0", "0", [0.0, 0.0])?;
        let g = BoundaryDist::from_fields(
            &ScalarField::parse(mu0, [0.0, 0.0], Support::Boundary)?,
            &ScalarField::parse(mu1, [0.0, 0.0], Support::Boundary)?,
            &disc.nodes,
        )?;
        Ok(NeumannProblem::new(disc.clone(), f, g)?.with_order(8))
    };
    let cases: [(&str, &str, &str, &str, fn(Point) -> f64); 3] = [
        ("poisson", "1", "0.5", "0", |p| {
            (p[0] * p[0] + p[1] * p[1]) / 4.0 - 0.125
        }),
        ("flux-cos", "0", "cos(theta)", "0", |p| p[0]),
        ("dual-cos", "0", "0", "cos(theta)", |p| p[0]),
    ];
    let mut first = None;
    for (name, f0, mu0, mu1, exact) in cases {
        let sol = solve(&problem(f0, mu0, mu1)?, &ops)?;
        let mut err = 0.0f64;
        for p in &probes {
            err = err.max((sol.eval(*p)? - exact(*p)).abs());
        }
        out.push(Check::new(format!("{name}-probes"), 0.0, err, 1e-3));
        first.get_or_insert(sol);
    }
    let zero_mean = first.expect("three cases ran");
    let anchored = solve(
        &problem("1", "0.5", "0")?.with_normalization(Normalization::Anchor(vec![])),
        &ops,
    )?;
    let cert = uniqueness_certificate(&zero_mean, &anchored)?;
    out.push(Check::new("uniqueness-deviation", 0.0, cert.deviation, 1e-9));
    out.push(Check::new("uniqueness-constant", -0.125, cert.constants[0], 1e-3));
    let compat = check_compatibility(&problem("1", "1", "0")?)?;
    out.push(Check::new("incompatible-defect", PI, compat.defects[0], 1e-6));
    let refused = matches!(solve(&problem("1", "1", "0")?, &ops), Err(Error::Incompatible { .. }));
    out.push(Check::new("incompatible-refused", 1.0, refused as u8 as f64, 0.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_steklov_examples() {
        let c = disk_steklov(&FourierCoeffs::mode(1, false), 1.0);
        assert_eq!(c, FourierCoeffs::mode(1, false));
        assert_eq!(disk_steklov(&FourierCoeffs::mode(0, false), 1.0).a0, 0.0);
        let c = disk_steklov(&FourierCoeffs::mode(3, false), 2.0);
        assert!((c.eval(0.4) - 1.5 * (1.2f64).cos()).abs() < 1e-15);
        let d = DiskOracle::new([1.0, 0.0], 2.0, FourierCoeffs::mode(2, true));
        assert!((d.extension([2.0, 1.0]) - 0.5 * (2.0 * PI / 4.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn radial_examples() {
        let r = |n, r| radial_newtonian(n, RadialProfile::Constant, 1.0, r).unwrap();
        assert_eq!(r(2, 0.0), -0.25);
        assert_eq!(r(3, 0.0), -0.5);
        assert!((r(3, 1.0) + 1.0 / 3.0).abs() < 1e-15);
        assert!((r(3, 1.0) - radial_newtonian(3, RadialProfile::Constant, 1.0, 1.0 + 1e-12).unwrap()).abs() < 1e-11);
        assert!((r(2, 1.0) - r(2, 1.0 + 1e-12)).abs() < 1e-11);
        assert!(radial_newtonian(4, RadialProfile::Constant, 1.0, 0.5).is_err());
        // Δ = 1 by second differences
        let h = 1e-3;
        let f = |x: Point| radial_newtonian(2, RadialProfile::Constant, 1.5, x[0].hypot(x[1]));
        assert!((fd_laplacian(f, [0.4, 0.3], h).unwrap() - 1.0).abs() < 1e-6);
        assert!(fd_laplacian(f, [2.0, 0.3], h).unwrap().abs() < 1e-6);
    }

    #[test]
    fn ball_quadrature_matches_closed_form() {
        for r in [0.0, 0.25, 0.7, 1.0] {
            let want = radial_newtonian(3, RadialProfile::Constant, 1.0, r).unwrap();
            assert!(
                (ball_newtonian_quadrature(r, 24).unwrap() - want).abs() < 1e-12,
                "r = {r}"
            );
        }
    }

    #[test]
    fn suite_filter_and_fault() {
        let checks = verify_suite(&VerifyOptions {
            filter: Some("jump".into()),
            flip_kprime: false,
        });
        assert!(!checks.is_empty() && checks.iter().all(|c| c.name.starts_with("jump/") && c.pass()));
        let checks = verify_suite(&VerifyOptions {
            filter: Some("jump".into()),
            flip_kprime: true,
        });
        assert!(checks.iter().any(|c| c.name.starts_with("jump/gauss") && !c.pass()));
    }
}
