//! Smooth closed curves, multi-component domains and boundary nodes.
//!
//! A [`Domain`] is a disjoint union of Jordan domains bounded by 2π-periodic
//! counterclockwise parametrizations. The outward normal at γ(t) is the
//! tangent rotated clockwise, `(y', -x') / |γ'|`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Samples per curve used for validation, disjointness and closest-point seeds.
pub const VALIDATION_SAMPLES: usize = 1024;
/// Minimum admissible parametric speed.
pub const MIN_SPEED: f64 = 1e-10;
/// Distance below which two components are considered touching.
pub const DISJOINT_TOL: f64 = 1e-8;
/// Largest dyadic refinement level kept per component.
pub const MAX_LEVEL: usize = 10;

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Truncated trigonometric polynomial `a0 + Σ cos[k-1] cos(kt) + sin[k-1] sin(kt)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigSeries {
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigSeries {
    /// Value and first two derivatives at `t`.
    fn eval(&self, t: f64) -> [f64; 3] {
        let mut v = [self.a0, 0.0, 0.0];
        let m = self.cos.len().max(self.sin.len());
        for k in 1..=m {
            let a = self.cos.get(k - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            v[0] += a * c + b * s;
            v[1] += kf * (-a * s + b * c);
            v[2] += -kf * kf * (a * c + b * s);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle { center: Point, radius: f64 },
    Ellipse { center: Point, a: f64, b: f64 },
    Trig { x: TrigSeries, y: TrigSeries },
}

/// Position and parametric derivatives of a curve at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub t: f64,
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        norm(self.d1)
    }

    pub fn normal(&self) -> Point {
        let s = self.speed();
        [self.d1[1] / s, -self.d1[0] / s]
    }

    /// Signed curvature (positive for a counterclockwise circle).
    pub fn curvature(&self) -> f64 {
        cross(self.d1, self.d2) / self.speed().powi(3)
    }
}

impl CurveSpec {
    pub fn circle(center: Point, radius: f64) -> Self {
        CurveSpec::Circle { center, radius }
    }

    pub fn ellipse(center: Point, a: f64, b: f64) -> Self {
        CurveSpec::Ellipse { center, a, b }
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        match self {
            CurveSpec::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    t,
                    pos: [center[0] + radius * c, center[1] + radius * s],
                    d1: [-radius * s, radius * c],
                    d2: [-radius * c, -radius * s],
                }
            }
            CurveSpec::Ellipse { center, a, b } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    t,
                    pos: [center[0] + a * c, center[1] + b * s],
                    d1: [-a * s, b * c],
                    d2: [-a * c, -b * s],
                }
            }
            CurveSpec::Trig { x, y } => {
                let xv = x.eval(t);
                let yv = y.eval(t);
                CurvePoint {
                    t,
                    pos: [xv[0], yv[0]],
                    d1: [xv[1], yv[1]],
                    d2: [xv[2], yv[2]],
                }
            }
        }
    }

    fn check_parameters(&self, component: usize) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidCurve {
                component,
                reason: reason.to_string(),
            })
        };
        let finite = |p: &Point| p.iter().all(|v| v.is_finite());
        match self {
            CurveSpec::Circle { center, radius } => {
                if !finite(center) || !radius.is_finite() || *radius <= 0.0 {
                    return bad("circle needs a finite center and a positive radius");
                }
            }
            CurveSpec::Ellipse { center, a, b } => {
                if !finite(center) || !(a.is_finite() && b.is_finite()) || *a <= 0.0 || *b <= 0.0 {
                    return bad("ellipse needs a finite center and positive semi-axes");
                }
            }
            CurveSpec::Trig { x, y } => {
                let all = [x, y]
                    .iter()
                    .flat_map(|s| {
                        std::iter::once(s.a0)
                            .chain(s.cos.iter().copied())
                            .chain(s.sin.iter().copied())
                    })
                    .all(f64::is_finite);
                if !all {
                    return bad("non-finite trigonometric coefficient");
                }
            }
        }
        Ok(())
    }
}

/// Per-component geometric summary computed at construction.
#[derive(Clone, Debug)]
pub struct ComponentInfo {
    pub area: f64,
    pub perimeter: f64,
    pub centroid: Point,
    pub bbox: [Point; 2],
    pub max_speed: f64,
    samples: Vec<Point>,
}

impl ComponentInfo {
    pub fn diameter(&self) -> f64 {
        norm(sub(self.bbox[1], self.bbox[0]))
    }
}

#[derive(Clone, Debug)]
pub struct Domain {
    components: Vec<CurveSpec>,
    info: Vec<ComponentInfo>,
    min_distance: f64,
}

/// Where a point sits relative to one component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    Inside { distance: f64, t: f64 },
    OnBoundary { t: f64 },
    Outside { distance: f64, t: f64 },
}

impl Location {
    pub fn distance(&self) -> f64 {
        match *self {
            Location::Inside { distance, .. } | Location::Outside { distance, .. } => distance,
            Location::OnBoundary { .. } => 0.0,
        }
    }

    pub fn nearest_t(&self) -> f64 {
        match *self {
            Location::Inside { t, .. } | Location::Outside { t, .. } | Location::OnBoundary { t } => t,
        }
    }

    pub fn is_inside_or_on(&self) -> bool {
        !matches!(self, Location::Outside { .. })
    }
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(sub(q2, q1), sub(p1, q1));
    let d2 = cross(sub(q2, q1), sub(p2, q1));
    let d3 = cross(sub(p2, p1), sub(q1, p1));
    let d4 = cross(sub(p2, p1), sub(q2, p1));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Even-odd crossing test against a closed polyline.
pub(crate) fn polygon_contains(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn analyze_component(spec: &CurveSpec, component: usize) -> Result<ComponentInfo> {
    spec.check_parameters(component)?;
    let m = VALIDATION_SAMPLES;
    let h = 2.0 * PI / m as f64;
    let mut samples = Vec::with_capacity(m);
    let (mut area, mut perimeter, mut mx, mut my, mut max_speed) = (0.0, 0.0, 0.0, 0.0, 0.0f64);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for k in 0..m {
        let t = k as f64 * h;
        let cp = spec.eval(t);
        let speed = cp.speed();
        if !(speed >= MIN_SPEED) {
            return Err(Error::DegenerateCurve { component, t, speed });
        }
        max_speed = max_speed.max(speed);
        let [x, y] = cp.pos;
        let [dx, dy] = cp.d1;
        area += 0.5 * (x * dy - y * dx) * h;
        mx += 0.5 * x * x * dy * h;
        my -= 0.5 * y * y * dx * h;
        perimeter += speed * h;
        for d in 0..2 {
            lo[d] = lo[d].min(cp.pos[d]);
            hi[d] = hi[d].max(cp.pos[d]);
        }
        samples.push(cp.pos);
    }
    if area <= 0.0 {
        return Err(Error::InvalidCurve {
            component,
            reason: "curve is not counterclockwise (non-positive signed area)".into(),
        });
    }
    // non-adjacent polyline segments must not cross
    for i in 0..m {
        let (p1, p2) = (samples[i], samples[(i + 1) % m]);
        let (plo, phi) = (
            [p1[0].min(p2[0]), p1[1].min(p2[1])],
            [p1[0].max(p2[0]), p1[1].max(p2[1])],
        );
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (q1, q2) = (samples[j], samples[(j + 1) % m]);
            if q1[0].max(q2[0]) < plo[0]
                || q1[0].min(q2[0]) > phi[0]
                || q1[1].max(q2[1]) < plo[1]
                || q1[1].min(q2[1]) > phi[1]
            {
                continue;
            }
            if segments_intersect(p1, p2, q1, q2) {
                return Err(Error::InvalidCurve {
                    component,
                    reason: "parametrization is self-intersecting".into(),
                });
            }
        }
    }
    Ok(ComponentInfo {
        area,
        perimeter,
        centroid: [mx / area, my / area],
        bbox: [lo, hi],
        max_speed,
        samples,
    })
}

/// Builds a domain from its components, verifying orientation, regularity
/// and pairwise disjointness of the closures.
pub fn build_domain(specs: Vec<CurveSpec>) -> Result<Domain> {
    if specs.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let info = specs
        .iter()
        .enumerate()
        .map(|(j, s)| analyze_component(s, j))
        .collect::<Result<Vec<_>>>()?;
    let mut min_distance = f64::INFINITY;
    for a in 0..info.len() {
        for b in (a + 1)..info.len() {
            let (ia, ib) = (&info[a], &info[b]);
            let nested = polygon_contains(&ia.samples, ib.samples[0]) || polygon_contains(&ib.samples, ia.samples[0]);
            let overlap_sample = ib.samples.iter().any(|&p| polygon_contains(&ia.samples, p))
                || ia.samples.iter().any(|&p| polygon_contains(&ib.samples, p));
            let mut d = f64::INFINITY;
            for p in &ia.samples {
                for q in &ib.samples {
                    d = d.min(norm(sub(*p, *q)));
                }
            }
            if nested || overlap_sample || d <= DISJOINT_TOL {
                return Err(Error::OverlappingComponents {
                    first: a,
                    second: b,
                    distance: if nested || overlap_sample { 0.0 } else { d },
                });
            }
            min_distance = min_distance.min(d);
        }
    }
    Ok(Domain {
        components: specs,
        info,
        min_distance,
    })
}

impl Domain {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[CurveSpec] {
        &self.components
    }

    pub fn component(&self, j: usize) -> Result<&CurveSpec> {
        self.components.get(j).ok_or(Error::ComponentOutOfRange {
            index: j,
            count: self.len(),
        })
    }

    pub fn info(&self, j: usize) -> &ComponentInfo {
        &self.info[j]
    }

    /// Minimum sampled distance between distinct components (∞ for one component).
    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    /// Overall length scale used for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.info.iter().map(|i| i.diameter()).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for i in &self.info {
            for d in 0..2 {
                lo[d] = lo[d].min(i.bbox[0][d]);
                hi[d] = hi[d].max(i.bbox[1][d]);
            }
        }
        norm(sub(hi, lo))
    }

    /// Polar origin for field expressions: centroid of the first component.
    pub fn polar_origin(&self) -> Point {
        self.info[0].centroid
    }

    /// Nearest boundary parameter on component `j` and its distance to `x`.
    pub fn closest_point(&self, j: usize, x: Point) -> (f64, f64) {
        let spec = &self.components[j];
        let samples = &self.info[j].samples;
        let m = samples.len();
        let h = 2.0 * PI / m as f64;
        let (k, _) = samples
            .iter()
            .enumerate()
            .map(|(k, p)| (k, norm(sub(*p, x))))
            .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        let g = |t: f64| {
            let cp = spec.eval(t);
            dot(sub(cp.pos, x), cp.d1)
        };
        let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let (ga, gb) = (g(a), g(b));
        let mut t = k as f64 * h;
        if ga <= 0.0 && gb >= 0.0 {
            // safeguarded Newton on the stationarity condition
            for _ in 0..60 {
                let cp = spec.eval(t);
                let r = sub(cp.pos, x);
                let gt = dot(r, cp.d1);
                if gt.abs() < 1e-300 {
                    break;
                }
                if gt < 0.0 {
                    a = t;
                } else {
                    b = t;
                }
                let dg = dot(cp.d1, cp.d1) + dot(r, cp.d2);
                let mut tn = if dg > 0.0 { t - gt / dg } else { 0.5 * (a + b) };
                if !(tn > a && tn < b) {
                    tn = 0.5 * (a + b);
                }
                if (tn - t).abs() < 1e-15 * (1.0 + t.abs()) {
                    t = tn;
                    break;
                }
                t = tn;
            }
        }
        let t = t.rem_euclid(2.0 * PI);
        (t, norm(sub(spec.eval(t).pos, x)))
    }

    /// Classifies `x` against component `j`.
    pub fn locate(&self, j: usize, x: Point) -> Location {
        let (t, d) = self.closest_point(j, x);
        let cp = self.components[j].eval(t);
        if d <= 1e-12 * self.info[j].diameter().max(1.0) {
            return Location::OnBoundary { t };
        }
        let side = dot(sub(x, cp.pos), cp.normal());
        // far from the curve the normal-line test is still valid at the true
        // nearest point; fall back to the polygon test if Newton stalled
        let inside = if (side.abs() - d).abs() <= 1e-6 * d {
            side < 0.0
        } else {
            polygon_contains(&self.info[j].samples, x)
        };
        if inside {
            Location::Inside { distance: d, t }
        } else {
            Location::Outside { distance: d, t }
        }
    }

    /// Component whose closure contains `x`, if any.
    pub fn component_of(&self, x: Point) -> Option<(usize, Location)> {
        (0..self.len())
            .map(|j| (j, self.locate(j, x)))
            .find(|(_, loc)| loc.is_inside_or_on())
    }

    /// Deterministic interior probe points of component `j` (star map from the centroid).
    pub fn probe_points(&self, j: usize, rings: &[f64], per_ring: usize) -> Vec<Point> {
        let c = self.info[j].centroid;
        let spec = &self.components[j];
        let mut out = vec![c];
        for (ri, &rho) in rings.iter().enumerate() {
            for k in 0..per_ring {
                let t = 2.0 * PI * (k as f64 + 0.37 * ri as f64) / per_ring as f64;
                let p = spec.eval(t).pos;
                out.push([c[0] + rho * (p[0] - c[0]), c[1] + rho * (p[1] - c[1])]);
            }
        }
        out
    }
}

/// Equispaced samples of one boundary component.
#[derive(Clone, Debug)]
pub struct BoundarySamples {
    pub t: Vec<f64>,
    pub points: Vec<Point>,
    pub normals: Vec<Point>,
    pub speeds: Vec<f64>,
    pub weights: Vec<f64>,
    pub curvature: Vec<f64>,
    pub d2: Vec<Point>,
}

impl BoundarySamples {
    fn build(spec: &CurveSpec, n: usize) -> Self {
        let h = 2.0 * PI / n as f64;
        let mut s = BoundarySamples {
            t: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            speeds: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
            d2: Vec::with_capacity(n),
        };
        for i in 0..n {
            let t = i as f64 * h;
            let cp = spec.eval(t);
            let speed = cp.speed();
            s.t.push(t);
            s.points.push(cp.pos);
            s.normals.push(cp.normal());
            s.speeds.push(speed);
            s.weights.push(h * speed);
            s.curvature.push(cp.curvature());
            s.d2.push(cp.d2);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug)]
pub struct ComponentNodes {
    spec: CurveSpec,
    base: BoundarySamples,
    levels: Vec<OnceLock<BoundarySamples>>,
}

impl ComponentNodes {
    pub fn base(&self) -> &BoundarySamples {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Samples at `n · 2^level` points (level 0 is the node set itself).
    pub fn level(&self, level: usize) -> &BoundarySamples {
        if level == 0 {
            return &self.base;
        }
        let level = level.min(MAX_LEVEL);
        self.levels[level - 1].get_or_init(|| BoundarySamples::build(&self.spec, self.n() << level))
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }
}

/// Boundary nodes for every component of a domain.
#[derive(Debug)]
pub struct BoundaryNodes {
    components: Vec<ComponentNodes>,
}

impl BoundaryNodes {
    pub fn new(domain: &Domain, n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidNodeCount(n));
        }
        Ok(Self::new_unchecked(domain, n))
    }

    /// Builds nodes without the log-quadrature admissibility gate (tests only).
    #[doc(hidden)]
    pub fn new_unchecked(domain: &Domain, n: usize) -> Self {
        let components = domain
            .components()
            .iter()
            .map(|spec| ComponentNodes {
                spec: spec.clone(),
                base: BoundarySamples::build(spec, n),
                levels: (0..MAX_LEVEL).map(|_| OnceLock::new()).collect(),
            })
            .collect();
        BoundaryNodes { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, j: usize) -> &ComponentNodes {
        &self.components[j]
    }

    pub fn components(&self) -> &[ComponentNodes] {
        &self.components
    }

    /// Node counts per component; used to detect mismatched discretizations.
    pub fn shape(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.n()).collect()
    }

    pub fn total(&self) -> usize {
        self.components.iter().map(|c| c.n()).sum()
    }
}

/// Refinement level whose boundary spacing is at most `distance / 4`.
pub fn level_for_distance(nodes: &ComponentNodes, max_speed: f64, distance: f64) -> (usize, bool) {
    let n = nodes.n() as f64;
    for level in 0..=MAX_LEVEL {
        let h = max_speed * 2.0 * PI / (n * (1u64 << level) as f64);
        if h <= distance / 4.0 {
            return (level, true);
        }
    }
    (MAX_LEVEL, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        build_domain(vec![CurveSpec::circle([0.0, 0.0], 1.0)]).unwrap()
    }

    #[test]
    fn single_disk() {
        let d = unit();
        assert_eq!(d.len(), 1);
        assert!((d.info(0).area - PI).abs() < 1e-12);
        assert!(d.min_distance().is_infinite());
    }

    #[test]
    fn two_disks_distance() {
        let d = build_domain(vec![
            CurveSpec::circle([-2.0, 0.0], 1.0),
            CurveSpec::circle([2.0, 0.0], 1.0),
        ])
        .unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.min_distance() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_disks_rejected() {
        let e = build_domain(vec![
            CurveSpec::circle([0.0, 0.0], 1.0),
            CurveSpec::circle([0.5, 0.0], 1.0),
        ])
        .unwrap_err();
        assert!(matches!(e, Error::OverlappingComponents { .. }));
    }

    #[test]
    fn nested_disks_rejected() {
        let e = build_domain(vec![
            CurveSpec::circle([0.0, 0.0], 3.0),
            CurveSpec::circle([0.5, 0.0], 1.0),
        ])
        .unwrap_err();
        assert!(matches!(e, Error::OverlappingComponents { .. }));
    }

    #[test]
    fn degenerate_and_clockwise_curves() {
        let flat = CurveSpec::Trig {
            x: TrigSeries {
                a0: 0.0,
                cos: vec![1.0],
                sin: vec![],
            },
            y: TrigSeries {
                a0: 0.0,
                cos: vec![1.0],
                sin: vec![],
            },
        };
        assert!(matches!(build_domain(vec![flat]), Err(Error::DegenerateCurve { .. })));
        let cw = CurveSpec::Trig {
            x: TrigSeries {
                a0: 0.0,
                cos: vec![1.0],
                sin: vec![],
            },
            y: TrigSeries {
                a0: 0.0,
                cos: vec![],
                sin: vec![-1.0],
            },
        };
        assert!(matches!(build_domain(vec![cw]), Err(Error::InvalidCurve { .. })));
        assert!(matches!(
            build_domain(vec![CurveSpec::circle([0.0, 0.0], -1.0)]),
            Err(Error::InvalidCurve { .. })
        ));
        assert!(matches!(build_domain(vec![]), Err(Error::EmptyDomain)));
    }

    #[test]
    fn self_intersecting_trig_rejected() {
        // limaçon-like figure eight
        let eight = CurveSpec::Trig {
            x: TrigSeries {
                a0: 0.0,
                cos: vec![],
                sin: vec![1.0],
            },
            y: TrigSeries {
                a0: 0.0,
                cos: vec![],
                sin: vec![0.0, 1.0],
            },
        };
        assert!(build_domain(vec![eight]).is_err());
    }

    #[test]
    fn node_count_gate() {
        let d = unit();
        assert!(matches!(BoundaryNodes::new(&d, 7), Err(Error::InvalidNodeCount(7))));
        assert!(matches!(BoundaryNodes::new(&d, 6), Err(Error::InvalidNodeCount(6))));
        assert!(BoundaryNodes::new(&d, 8).is_ok());
    }

    #[test]
    fn four_nodes_on_unit_circle() {
        let d = unit();
        let nodes = BoundaryNodes::new_unchecked(&d, 4);
        let b = nodes.component(0).base();
        for i in 0..4 {
            let ang = i as f64 * PI / 2.0;
            assert!((b.points[i][0] - ang.cos()).abs() < 1e-15);
            assert!((b.points[i][1] - ang.sin()).abs() < 1e-15);
            assert!((b.normals[i][0] - ang.cos()).abs() < 1e-15);
            assert!((b.normals[i][1] - ang.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn perimeter_radius_two() {
        let d = build_domain(vec![CurveSpec::circle([0.3, -1.0], 2.0)]).unwrap();
        let nodes = BoundaryNodes::new(&d, 64).unwrap();
        let s: f64 = nodes.component(0).base().weights.iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn normals_unit_and_outward() {
        let d = build_domain(vec![CurveSpec::ellipse([1.0, 2.0], 2.0, 0.7)]).unwrap();
        let nodes = BoundaryNodes::new(&d, 64).unwrap();
        let b = nodes.component(0).base();
        for i in 0..64 {
            assert!((norm(b.normals[i]) - 1.0).abs() < 1e-15);
            let cp = d.component(0).unwrap().eval(b.t[i]);
            assert!(dot(cp.d1, b.normals[i]).abs() < 1e-14);
            let out = [
                b.points[i][0] + 1e-3 * b.normals[i][0],
                b.points[i][1] + 1e-3 * b.normals[i][1],
            ];
            let inn = [
                b.points[i][0] - 1e-3 * b.normals[i][0],
                b.points[i][1] - 1e-3 * b.normals[i][1],
            ];
            assert!(matches!(d.locate(0, out), Location::Outside { .. }));
            assert!(matches!(d.locate(0, inn), Location::Inside { .. }));
        }
    }

    #[test]
    fn closest_point_on_ellipse() {
        let d = build_domain(vec![CurveSpec::ellipse([0.0, 0.0], 2.0, 1.0)]).unwrap();
        let (t, dist) = d.closest_point(0, [0.0, 3.0]);
        assert!((t - PI / 2.0).abs() < 1e-10);
        assert!((dist - 2.0).abs() < 1e-12);
        assert!(matches!(d.locate(0, [2.0, 0.0]), Location::OnBoundary { .. }));
    }

    #[test]
    fn refinement_levels() {
        let d = unit();
        let nodes = BoundaryNodes::new(&d, 16).unwrap();
        let l2 = nodes.component(0).level(2);
        assert_eq!(l2.len(), 64);
        let (lvl, ok) = level_for_distance(nodes.component(0), 1.0, 0.01);
        assert!(ok);
        let h = 2.0 * PI / (16 << lvl) as f64;
        assert!(h <= 0.0025);
    }
}
