//! Boundary operators per component: single layer `V`, adjoint double layer
//! `K′`, the augmented first-kind Dirichlet solve, and the Steklov–Poincaré
//! map `S_+ = (-½I + K′)φ[v]`.
//!
//! The Green operator acts componentwise: on `Ω_j` the harmonic extension of
//! `v` is `v[φ_j] + c_j`, where `V_j φ_j + c_j = v_j` and `∮ φ_j dσ = 0`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dot, sub, Location, Point};
use crate::potentials::{single_layer_at, single_layer_gradient};
use crate::quadrature::{upsample_transpose, Discretization};
use crate::schauder::{BoundaryValues, TestSamples};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Negates `K′` (fault injection for the verification suite).
    pub flip_adjoint_double_layer: bool,
}

/// Maps a node density to single-layer values and gradients at the volume nodes.
#[derive(Debug)]
pub struct VolumeEval {
    pub value: DMatrix<f64>,
    pub grad_x: DMatrix<f64>,
    pub grad_y: DMatrix<f64>,
}

#[derive(Debug)]
pub struct ComponentOperators {
    pub v: DMatrix<f64>,
    pub kprime: DMatrix<f64>,
    pub s_plus: DMatrix<f64>,
    /// Inverse of `[[V, 1], [wᵀ, 0]]`.
    aug_inv: DMatrix<f64>,
    aug: DMatrix<f64>,
    cond: OnceLock<f64>,
    volume: OnceLock<VolumeEval>,
}

impl ComponentOperators {
    /// `(φ, c)` with `Vφ + c = v`, `Σ w φ = 0`.
    pub fn density(&self, v: &[f64]) -> (DVector<f64>, f64) {
        let n = v.len();
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from_slice(v);
        let sol = &self.aug_inv * rhs;
        (sol.rows(0, n).into_owned(), sol[n])
    }

    /// 2-norm condition number of the augmented system.
    pub fn condition_number(&self) -> f64 {
        *self.cond.get_or_init(|| {
            let sv = self.aug.clone().singular_values();
            let max = sv.iter().cloned().fold(0.0, f64::max);
            let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            max / min
        })
    }
}

/// Assembled boundary operators on a fixed discretization.
#[derive(Debug)]
pub struct OperatorSet {
    disc: Arc<Discretization>,
    comps: Vec<ComponentOperators>,
    options: AssemblyOptions,
}

impl OperatorSet {
    pub fn assemble(disc: Arc<Discretization>, options: AssemblyOptions) -> Result<Self> {
        let comps = (0..disc.domain.len())
            .into_par_iter()
            .map(|j| assemble_component(&disc, j, options))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorSet { disc, comps, options })
    }

    pub fn disc(&self) -> &Discretization {
        &self.disc
    }

    pub fn disc_arc(&self) -> Arc<Discretization> {
        self.disc.clone()
    }

    pub fn options(&self) -> AssemblyOptions {
        self.options
    }

    pub fn component(&self, j: usize) -> &ComponentOperators {
        &self.comps[j]
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// `S_+[v]` at the nodes.
    pub fn steklov(&self, v: &BoundaryValues) -> Result<BoundaryValues> {
        v.check_shape(&self.disc.nodes)?;
        Ok(BoundaryValues::new(
            self.comps
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let x = DVector::from_column_slice(v.component(j));
                    (&c.s_plus * x).as_slice().to_vec()
                })
                .collect(),
        ))
    }

    /// Condition number of the augmented system on component `j`, divided by
    /// `N` (the first-kind operator's condition grows linearly in `N`).
    pub fn condition_report(&self, j: usize) -> f64 {
        self.comps[j].condition_number() / self.disc.n() as f64
    }

    /// Lazily built volume-evaluation matrices of component `j`.
    pub fn volume_eval(&self, j: usize) -> &VolumeEval {
        self.comps[j].volume.get_or_init(|| build_volume_eval(&self.disc, j))
    }

    /// Harmonic extension `G_{d,+}[v]`.
    pub fn dirichlet(&self, v: &BoundaryValues) -> Result<HarmonicField> {
        v.check_shape(&self.disc.nodes)?;
        let mut phi = Vec::with_capacity(self.len());
        let mut constants = Vec::with_capacity(self.len());
        for (j, c) in self.comps.iter().enumerate() {
            let (p, k) = c.density(v.component(j));
            phi.push(p.as_slice().to_vec());
            constants.push(k);
        }
        Ok(HarmonicField {
            disc: self.disc.clone(),
            trace: v.clone(),
            phi: BoundaryValues::new(phi),
            constants,
        })
    }
}

fn assemble_component(disc: &Discretization, j: usize, options: AssemblyOptions) -> Result<ComponentOperators> {
    let b = disc.nodes.component(j).base();
    let n = b.len();
    let h = 2.0 * PI / n as f64;
    let lq = &disc.logquad;
    let mut v = DMatrix::zeros(n, n);
    let mut kp = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let (smooth, kern) = if i == k {
                let s = b.speeds[i];
                let kappa = -dot(b.d2[i], b.normals[i]) / (4.0 * PI * s * s);
                ((s * s).ln(), kappa)
            } else {
                let z = sub(b.points[i], b.points[k]);
                let r2 = dot(z, z);
                let sn = (0.5 * (b.t[i] - b.t[k])).sin();
                ((r2 / (4.0 * sn * sn)).ln(), dot(z, b.normals[i]) / (2.0 * PI * r2))
            };
            v[(i, k)] = (lq.weight(i, k) + h * smooth) * b.speeds[k] / (4.0 * PI);
            kp[(i, k)] = b.weights[k] * kern;
        }
    }
    if options.flip_adjoint_double_layer {
        kp = -kp;
    }
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&v);
    for i in 0..n {
        aug[(i, n)] = 1.0;
        aug[(n, i)] = b.weights[i];
    }
    let lu = aug.clone().lu();
    let u = lu.u();
    let (umin, umax) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, m), x| (a.min(x.abs()), m.max(x.abs())));
    if !(umin > 1e-14 * umax) {
        return Err(Error::SingularSystem { component: j });
    }
    let aug_inv = lu.try_inverse().ok_or(Error::SingularSystem { component: j })?;
    let phi_map = aug_inv.view((0, 0), (n, n)).into_owned();
    let mut jump = kp.clone();
    for i in 0..n {
        jump[(i, i)] -= 0.5;
    }
    let s_plus = jump * phi_map;
    Ok(ComponentOperators {
        v,
        kprime: kp,
        s_plus,
        aug_inv,
        aug,
        cond: OnceLock::new(),
        volume: OnceLock::new(),
    })
}

fn build_volume_eval(disc: &Discretization, j: usize) -> VolumeEval {
    let grid = disc.grid.component(j);
    let n = disc.n();
    let rows: Vec<[Vec<f64>; 3]> = grid
        .points
        .par_iter()
        .map(|&x| {
            let loc = disc.domain.locate(j, x);
            let plan = disc.plan(j, x, loc);
            let val = plan.contributions(|_, _| (1.0 / (4.0 * PI), 0.0));
            let gx = plan.contributions(|_, z| (0.0, -z[0] / (2.0 * PI * dot(z, z))));
            let gy = plan.contributions(|_, z| (0.0, -z[1] / (2.0 * PI * dot(z, z))));
            [
                upsample_transpose(&val, n),
                upsample_transpose(&gx, n),
                upsample_transpose(&gy, n),
            ]
        })
        .collect();
    let m = rows.len();
    let mat = |k: usize| DMatrix::from_fn(m, n, |r, c| rows[r][k][c]);
    VolumeEval {
        value: mat(0),
        grad_x: mat(1),
        grad_y: mat(2),
    }
}

/// `G_{d,+}[v]` represented as `v[φ_j] + c_j` on each component.
#[derive(Clone, Debug)]
pub struct HarmonicField {
    disc: Arc<Discretization>,
    pub trace: BoundaryValues,
    pub phi: BoundaryValues,
    pub constants: Vec<f64>,
}

impl HarmonicField {
    fn component_containing(&self, x: Point) -> Result<(usize, Location)> {
        self.disc
            .domain
            .component_of(x)
            .ok_or(Error::OutsideDomain { point: x })
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        let (j, loc) = self.component_containing(x)?;
        Ok(self.eval_at(j, x, loc))
    }

    /// Value on component `j`; fails if `x` is not in its closure.
    pub fn eval_on(&self, j: usize, x: Point) -> Result<f64> {
        let loc = self.disc.domain.locate(j, x);
        if !loc.is_inside_or_on() {
            return Err(Error::WrongComponent { point: x, component: j });
        }
        Ok(self.eval_at(j, x, loc))
    }

    fn eval_at(&self, j: usize, x: Point, loc: Location) -> f64 {
        single_layer_at(&self.disc, j, self.phi.component(j), x, loc) + self.constants[j]
    }

    pub fn gradient(&self, x: Point) -> Result<[f64; 2]> {
        let (j, _) = self.component_containing(x)?;
        single_layer_gradient(&self.disc, j, self.phi.component(j), x)
    }

    /// Values and gradients on the volume grid, for pairings.
    pub fn test_samples(&self, ops: &OperatorSet) -> TestSamples {
        let mut volume = Vec::with_capacity(ops.len());
        let mut gradient = Vec::with_capacity(ops.len());
        for j in 0..ops.len() {
            let ve = ops.volume_eval(j);
            let phi = DVector::from_column_slice(self.phi.component(j));
            let c = self.constants[j];
            let v = &ve.value * &phi;
            let gx = &ve.grad_x * &phi;
            let gy = &ve.grad_y * &phi;
            volume.push(v.iter().map(|x| x + c).collect());
            gradient.push(gx.iter().zip(gy.iter()).map(|(a, b)| [*a, *b]).collect());
        }
        TestSamples {
            boundary: self.trace.clone(),
            volume,
            gradient,
            fd_gradient: false,
        }
    }
}

/// Interior values and gradients of `G_{d,+}[v]` at targets.
#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub field: HarmonicField,
    /// Targets within two node spacings of the boundary.
    pub reduced_accuracy: Vec<bool>,
}

/// Solves the interior Dirichlet problem and evaluates at interior targets.
pub fn dirichlet_solve(v: &BoundaryValues, ops: &OperatorSet, targets: &[Point]) -> Result<DirichletSolution> {
    let field = ops.dirichlet(v)?;
    let disc = ops.disc();
    let evals = targets
        .par_iter()
        .map(|&x| {
            let (j, loc) = field.component_containing(x)?;
            if let Location::OnBoundary { .. } = loc {
                return Err(Error::InvalidArgument(format!("target {x:?} lies on the boundary")));
            }
            let val = field.eval_at(j, x, loc);
            let grad = single_layer_gradient(disc, j, field.phi.component(j), x)?;
            Ok((val, grad, loc.distance() < 2.0 * disc.node_spacing(j)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirichletSolution {
        values: evals.iter().map(|e| e.0).collect(),
        gradients: evals.iter().map(|e| e.1).collect(),
        reduced_accuracy: evals.iter().map(|e| e.2).collect(),
        field,
    })
}

/// `S_+[v]`.
pub fn steklov(v: &BoundaryValues, ops: &OperatorSet) -> Result<BoundaryValues> {
    ops.steklov(v)
}
