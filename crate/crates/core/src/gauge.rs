//! Fiberwise starshaped domains in cotangent bundles, seen through their
//! fiber support function
//!
//! ```text
//! h(q, v) = max { <p, v> : p in the fiber of the domain over q }
//! ```
//!
//! which is the integrand of the loop length functional. Built-in gauges are
//! codisk bundles of metrics pulled back from linear embeddings and the
//! unbounded "camel" domain; arbitrary gauges can be supplied as closures.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate chart a point is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartId {
    /// Embedding coordinates of `S^n` in `R^{n+1}`.
    Sphere,
    /// Unit-period coordinates on a torus fundamental domain `[0, 1)^d`.
    Torus,
    /// Torus coordinates for a point declared to lie on `{x_axis = 0}`.
    ///
    /// The flag is set by loop families whose points satisfy the constraint
    /// identically; it is never inferred from coordinate values.
    TorusSlice { axis: usize },
    /// Fundamental domain `[0, a) x [0, b)` of the flat Klein bottle.
    Klein,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasePoint {
    pub coords: Vec<f64>,
    pub chart: ChartId,
}

impl BasePoint {
    pub fn new(coords: Vec<f64>, chart: ChartId) -> Self {
        Self { coords, chart }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub components: Vec<f64>,
    pub base: BasePoint,
}

impl TangentVector {
    pub fn new(base: BasePoint, components: Vec<f64>) -> Self {
        Self { components, base }
    }

    pub fn zero(base: BasePoint) -> Self {
        let n = base.dim();
        Self { components: vec![0.0; n], base }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            components: self.components.iter().map(|c| c * factor).collect(),
            base: self.base.clone(),
        }
    }
}

/// Extended nonnegative reals: a finite value or `+inf`, kept as a tag so
/// that infinities never travel through arithmetic as floats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    pub fn scale(self, factor: f64) -> Self {
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(x * factor),
            ExtReal::Infinite if factor == 0.0 => ExtReal::Finite(0.0),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Infinite, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

/// The base manifold of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BaseDescriptor {
    /// `S^n` in embedding coordinates.
    Sphere { n: usize },
    /// `(R/Z)^dim` in unit-period chart coordinates.
    Torus { dim: usize },
    /// `R^2` modulo `(x, y) -> (x + a, -y)` and `(x, y) -> (x, y + b)`.
    KleinBottle { a: f64, b: f64 },
}

impl fmt::Display for BaseDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseDescriptor::Sphere { n } => write!(f, "S^{n}"),
            BaseDescriptor::Torus { dim } => write!(f, "T^{dim}"),
            BaseDescriptor::KleinBottle { a, b } => write!(f, "K({a}, {b})"),
        }
    }
}

impl BaseDescriptor {
    /// Number of chart coordinates.
    pub fn coord_dim(&self) -> usize {
        match self {
            BaseDescriptor::Sphere { n } => n + 1,
            BaseDescriptor::Torus { dim } => *dim,
            BaseDescriptor::KleinBottle { .. } => 2,
        }
    }

    pub fn manifold_dim(&self) -> usize {
        match self {
            BaseDescriptor::Sphere { n } => *n,
            BaseDescriptor::Torus { dim } => *dim,
            BaseDescriptor::KleinBottle { .. } => 2,
        }
    }

    pub fn accepts(&self, chart: ChartId) -> bool {
        match self {
            BaseDescriptor::Sphere { .. } => chart == ChartId::Sphere,
            BaseDescriptor::Torus { dim } => match chart {
                ChartId::Torus => true,
                ChartId::TorusSlice { axis } => axis < *dim,
                _ => false,
            },
            BaseDescriptor::KleinBottle { .. } => chart == ChartId::Klein,
        }
    }

    pub fn check_point(&self, q: &BasePoint) -> Result<()> {
        if !self.accepts(q.chart) {
            return Err(Error::ChartMismatch {
                expected: self.to_string(),
                found: q.chart,
            });
        }
        if q.dim() != self.coord_dim() {
            return Err(Error::Dimension {
                expected: self.coord_dim(),
                found: q.dim(),
            });
        }
        if q.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("base point"));
        }
        Ok(())
    }

    /// Bring lifted coordinates into the fundamental domain, transforming the
    /// velocity by the differential of the deck transformation used.
    pub fn canonicalize(&self, coords: &mut [f64], velocity: Option<&mut [f64]>) {
        match self {
            BaseDescriptor::Sphere { .. } => {}
            BaseDescriptor::Torus { .. } => {
                for c in coords.iter_mut() {
                    *c = wrap_unit(*c);
                }
            }
            BaseDescriptor::KleinBottle { a, b } => {
                let k = (coords[0] / a).floor();
                coords[0] -= k * a;
                if coords[0] >= *a {
                    coords[0] -= a;
                }
                let odd = (k as i64).rem_euclid(2) == 1;
                if odd {
                    coords[1] = -coords[1];
                    if let Some(v) = velocity {
                        v[1] = -v[1];
                    }
                }
                coords[1] = coords[1].rem_euclid(*b);
                if coords[1] >= *b {
                    coords[1] -= b;
                }
            }
        }
    }

    /// Displacement from `from` to the lift of `to` closest to `from`.
    pub fn lift_difference(&self, from: &[f64], to: &[f64]) -> Vec<f64> {
        match self {
            BaseDescriptor::Sphere { .. } => to.iter().zip(from).map(|(t, f)| t - f).collect(),
            BaseDescriptor::Torus { .. } => to
                .iter()
                .zip(from)
                .map(|(t, f)| {
                    let d = t - f;
                    d - d.round()
                })
                .collect(),
            BaseDescriptor::KleinBottle { a, b } => {
                let mut best = [to[0] - from[0], to[1] - from[1]];
                let mut best_norm = f64::INFINITY;
                for k in -1i32..=1 {
                    for m in -2i32..=2 {
                        let x = to[0] + f64::from(k) * a;
                        let y = if k.rem_euclid(2) == 1 { -to[1] } else { to[1] } + f64::from(m) * b;
                        let d = [x - from[0], y - from[1]];
                        let norm = d[0] * d[0] + d[1] * d[1];
                        if norm < best_norm {
                            best_norm = norm;
                            best = d;
                        }
                    }
                }
                best.to_vec()
            }
        }
    }

    /// Distance in chart coordinates, respecting identifications.
    pub fn chart_distance(&self, p: &[f64], q: &[f64]) -> f64 {
        self.lift_difference(p, q).iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    pub fn sample_point(&self, rng: &mut impl Rng) -> BasePoint {
        match self {
            BaseDescriptor::Sphere { n } => {
                let mut x: Vec<f64> = (0..=*n).map(|_| gaussian(rng)).collect();
                let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                x.iter_mut().for_each(|c| *c /= norm);
                BasePoint::new(x, ChartId::Sphere)
            }
            BaseDescriptor::Torus { dim } => {
                BasePoint::new((0..*dim).map(|_| rng.random::<f64>()).collect(), ChartId::Torus)
            }
            BaseDescriptor::KleinBottle { a, b } => BasePoint::new(
                vec![rng.random::<f64>() * a, rng.random::<f64>() * b],
                ChartId::Klein,
            ),
        }
    }

    pub fn sample_tangent(&self, q: &BasePoint, rng: &mut impl Rng) -> TangentVector {
        let mut v: Vec<f64> = (0..q.dim()).map(|_| gaussian(rng)).collect();
        if let BaseDescriptor::Sphere { .. } = self {
            let dot: f64 = v.iter().zip(&q.coords).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&q.coords).for_each(|(a, b)| *a -= dot * b);
        }
        TangentVector::new(q.clone(), v)
    }
}

pub(crate) fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

pub(crate) fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    EmbeddingInduced,
    Flat,
}

pub type JacobianField = dyn Fn(&BasePoint) -> DMatrix<f64> + Send + Sync;

/// Differential of the map whose pullback defines the metric.
#[derive(Clone)]
pub enum Jacobian {
    Diagonal(Vec<f64>),
    Constant(DMatrix<f64>),
    Field(Arc<JacobianField>),
}

impl fmt::Debug for Jacobian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Jacobian::Diagonal(w) => f.debug_tuple("Diagonal").field(w).finish(),
            Jacobian::Constant(m) => f.debug_tuple("Constant").field(&m.shape()).finish(),
            Jacobian::Field(_) => f.write_str("Field(..)"),
        }
    }
}

const RANK_TOL: f64 = 1e-10;

fn rank_ratio(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// Riemannian metric `|v|_g = |J(q) v|`, with a codisk radius.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub jacobian: Jacobian,
    pub radius: f64,
}

impl MetricSpec {
    /// Pullback of the Euclidean metric under the linear map `diag(weights)`.
    pub fn diagonal(kind: MetricKind, weights: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("codisk radius {radius} must be >= 0")));
        }
        let max = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        let min = weights.iter().fold(f64::INFINITY, |m, w| m.min(w.abs()));
        if weights.is_empty() || max == 0.0 || min / max < RANK_TOL {
            return Err(Error::RankDeficient { coords: vec![], ratio: if max > 0.0 { min / max } else { 0.0 } });
        }
        Ok(Self { kind, jacobian: Jacobian::Diagonal(weights), radius })
    }

    /// Metric of the ellipsoid embedding `x -> diag(weights) x` of `S^n`.
    pub fn ellipsoid(weights: Vec<f64>, radius: f64) -> Result<Self> {
        Self::diagonal(MetricKind::EmbeddingInduced, weights, radius)
    }

    /// Round metric of the sphere of radius `scale`, i.e. pullback under `x -> scale x`.
    pub fn round(n: usize, scale: f64, radius: f64) -> Result<Self> {
        Self::diagonal(MetricKind::EmbeddingInduced, vec![scale; n + 1], radius)
    }

    /// Flat metric on a torus whose circle factors have the given lengths.
    pub fn flat(lengths: Vec<f64>, radius: f64) -> Result<Self> {
        Self::diagonal(MetricKind::Flat, lengths, radius)
    }

    pub fn constant(kind: MetricKind, jacobian: DMatrix<f64>, radius: f64) -> Result<Self> {
        let ratio = rank_ratio(&jacobian);
        if jacobian.ncols() > jacobian.nrows() || ratio < RANK_TOL {
            return Err(Error::RankDeficient { coords: vec![], ratio });
        }
        Ok(Self { kind, jacobian: Jacobian::Constant(jacobian), radius })
    }

    /// Metric induced by a point-dependent embedding differential; the rank is
    /// checked on `samples` now and again on every evaluation.
    pub fn field(
        kind: MetricKind,
        jacobian: Arc<JacobianField>,
        radius: f64,
        samples: &[BasePoint],
    ) -> Result<Self> {
        for q in samples {
            let j = jacobian(q);
            let ratio = rank_ratio(&j);
            if j.ncols() > j.nrows() || ratio < RANK_TOL {
                return Err(Error::RankDeficient { coords: q.coords.clone(), ratio });
            }
        }
        Ok(Self { kind, jacobian: Jacobian::Field(jacobian), radius })
    }

    pub fn with_radius(&self, radius: f64) -> Self {
        Self { radius, ..self.clone() }
    }

    /// `|v|_g` without the codisk radius.
    pub fn unit_norm(&self, q: &BasePoint, v: &TangentVector) -> Result<f64> {
        match &self.jacobian {
            Jacobian::Diagonal(w) => {
                if w.len() != v.components.len() {
                    return Err(Error::Dimension { expected: w.len(), found: v.components.len() });
                }
                Ok(w.iter().zip(&v.components).map(|(w, c)| (w * c) * (w * c)).sum::<f64>().sqrt())
            }
            Jacobian::Constant(j) => {
                if j.ncols() != v.components.len() {
                    return Err(Error::Dimension { expected: j.ncols(), found: v.components.len() });
                }
                Ok((j * DVector::from_column_slice(&v.components)).norm())
            }
            Jacobian::Field(field) => {
                let j = field(q);
                if j.ncols() != v.components.len() {
                    return Err(Error::Dimension { expected: j.ncols(), found: v.components.len() });
                }
                let ratio = rank_ratio(&j);
                if j.ncols() > j.nrows() || ratio < RANK_TOL {
                    return Err(Error::RankDeficient { coords: q.coords.clone(), ratio });
                }
                Ok((j * DVector::from_column_slice(&v.components)).norm())
            }
        }
    }
}

/// `radius * |D phi(q) v|`.
pub fn metric_norm(metric: &MetricSpec, q: &BasePoint, v: &TangentVector) -> Result<f64> {
    check_finite(q, v)?;
    Ok(metric.radius * metric.unit_norm(q, v)?)
}

pub type SupportFn = dyn Fn(&BasePoint, &TangentVector) -> Result<ExtReal> + Send + Sync;

/// How the fiber support is computed.
#[derive(Clone)]
pub enum Gauge {
    /// Codisk bundle of radius `metric.radius`; support is the dual norm.
    Codisk(MetricSpec),
    /// Fibers `{p_n >= -eps/2 - delta}`, additionally capped by
    /// `p_n <= eps/2 + 2 delta` over `{q_1 = 0}`.
    Camel { eps: f64, delta: f64 },
    Custom(Arc<SupportFn>),
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Codisk(m) => f.debug_tuple("Codisk").field(m).finish(),
            Gauge::Camel { eps, delta } => f.debug_struct("Camel").field("eps", eps).field("delta", delta).finish(),
            Gauge::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A fiberwise starshaped domain, exposed only through its support function.
#[derive(Clone, Debug)]
pub struct GaugeDomain {
    pub base: BaseDescriptor,
    pub gauge: Gauge,
    /// Uniform fiber dilation applied on top of the gauge.
    pub scale: f64,
    pub metadata: String,
}

impl GaugeDomain {
    pub fn new(base: BaseDescriptor, gauge: Gauge, metadata: impl Into<String>) -> Self {
        Self { base, gauge, scale: 1.0, metadata: metadata.into() }
    }

    pub fn codisk(base: BaseDescriptor, metric: MetricSpec, metadata: impl Into<String>) -> Self {
        Self::new(base, Gauge::Codisk(metric), metadata)
    }

    pub fn camel(n: usize, eps: f64, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("camel domain needs n > 1, got {n}")));
        }
        if !(eps > 0.0 && delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "camel domain needs eps > 0 and delta > 0, got eps = {eps}, delta = {delta}"
            )));
        }
        Ok(Self::new(
            BaseDescriptor::Torus { dim: n },
            Gauge::Camel { eps, delta },
            format!("camel domain on T*T^{n}, eps = {eps}, delta = {delta}"),
        ))
    }

    /// The domain with every fiber dilated by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            metadata: format!("{} (fibers scaled by {factor})", self.metadata),
            ..self.clone()
        }
    }

    pub fn support(&self, q: &BasePoint, v: &TangentVector) -> Result<ExtReal> {
        self.base.check_point(q)?;
        if v.base.chart != q.chart {
            return Err(Error::ChartMismatch { expected: format!("{:?}", q.chart), found: v.base.chart });
        }
        check_finite(q, v)?;
        if v.components.len() != q.dim() {
            return Err(Error::Dimension { expected: q.dim(), found: v.components.len() });
        }
        if v.components.iter().all(|c| *c == 0.0) {
            return Ok(ExtReal::Finite(0.0));
        }
        let raw = match &self.gauge {
            Gauge::Codisk(metric) => ExtReal::Finite(metric_norm(metric, q, v)?),
            Gauge::Camel { eps, delta } => camel_support(*eps, *delta, q, v),
            Gauge::Custom(f) => f(q, v)?,
        };
        Ok(raw.scale(self.scale))
    }
}

fn check_finite(q: &BasePoint, v: &TangentVector) -> Result<()> {
    if q.coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("base point"));
    }
    if v.components.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("tangent vector"));
    }
    Ok(())
}

fn camel_support(eps: f64, delta: f64, q: &BasePoint, v: &TangentVector) -> ExtReal {
    let n = v.components.len();
    let (free, last) = v.components.split_at(n - 1);
    // The momenta p_1..p_{n-1} are unconstrained.
    if free.iter().any(|c| *c != 0.0) {
        return ExtReal::Infinite;
    }
    let vn = last[0];
    if vn < 0.0 {
        ExtReal::Finite((eps / 2.0 + delta) * -vn)
    } else if q.chart == (ChartId::TorusSlice { axis: 0 }) {
        ExtReal::Finite((eps / 2.0 + 2.0 * delta) * vn)
    } else {
        ExtReal::Infinite
    }
}

pub fn support(domain: &GaugeDomain, q: &BasePoint, v: &TangentVector) -> Result<ExtReal> {
    domain.support(q, v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaximizeOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self { starts: 8, seed: 0, max_iterations: 20_000 }
    }
}

pub const DEFAULT_GAUGE_TOL: f64 = 1e-8;

/// `max <p, v>` over the unit sphere `{F(q, p) = 1}` of a user gauge `F`.
///
/// Works on directions `u` of the unit Euclidean sphere, maximizing
/// `<u, v> / F(q, u)` by projected ascent from `opts.starts` seeded starts.
pub fn support_generic_maximize<F>(
    gauge_fn: F,
    q: &BasePoint,
    v: &TangentVector,
    tol: f64,
    opts: MaximizeOptions,
) -> Result<f64>
where
    F: Fn(&BasePoint, &[f64]) -> f64,
{
    check_finite(q, v)?;
    let dim = v.components.len();
    let vnorm = norm(&v.components);
    if vnorm == 0.0 {
        return Ok(0.0);
    }
    let objective = |u: &[f64]| -> f64 {
        let f = gauge_fn(q, u);
        dot(u, &v.components) / f
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = f64::NEG_INFINITY;
    let mut best_residual = f64::INFINITY;
    let mut any_converged = false;
    let accept = tol.sqrt() * vnorm;

    for start in 0..opts.starts.max(1) {
        let mut u: Vec<f64> = if start == 0 {
            v.components.iter().map(|c| c / vnorm).collect()
        } else {
            let g: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
            let n = norm(&g);
            g.iter().map(|c| c / n).collect()
        };
        let mut value = objective(&u);
        let mut step = 0.1;
        let mut residual = f64::INFINITY;
        for _ in 0..opts.max_iterations {
            let grad = sphere_gradient(&objective, &u);
            residual = norm(&grad);
            if residual <= accept * 1e-3 {
                break;
            }
            let mut moved = false;
            while step > 1e-14 {
                let cand = normalize(&u.iter().zip(&grad).map(|(a, g)| a + step * g / residual).collect::<Vec<_>>());
                let cv = objective(&cand);
                if cv > value {
                    u = cand;
                    value = cv;
                    step *= 1.5;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if residual <= accept {
            any_converged = true;
        }
        if value > best {
            best = value;
            best_residual = residual;
        }
    }
    if !any_converged || !best.is_finite() {
        return Err(Error::NoConvergence { best, residual: best_residual });
    }
    Ok(best)
}

fn sphere_gradient(f: &impl Fn(&[f64]) -> f64, u: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    let mut g = vec![0.0; u.len()];
    let mut w = u.to_vec();
    for i in 0..u.len() {
        w[i] = u[i] + h;
        let fp = f(&w);
        w[i] = u[i] - h;
        let fm = f(&w);
        w[i] = u[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    let radial = dot(&g, u);
    g.iter_mut().zip(u).for_each(|(gi, ui)| *gi -= radial * ui);
    g
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

/// Which `(q, v)` pairs a containment check visits.
#[derive(Clone, Debug)]
pub enum SamplePlan {
    Random { count: usize, seed: u64 },
    Explicit(Vec<TangentVector>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainmentWitness {
    pub vector: TangentVector,
    pub inner: ExtReal,
    pub outer: ExtReal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Containment {
    pub contained: bool,
    pub samples: usize,
    pub witness: Option<ContainmentWitness>,
}

const CONTAINMENT_SLACK: f64 = 1e-12;

/// Fiberwise containment `inner ⊂ outer`, tested as `h_inner <= h_outer` on
/// every sample (up to a relative slack of 1e-12 for rounding).
pub fn domain_contains(inner: &GaugeDomain, outer: &GaugeDomain, plan: &SamplePlan) -> Result<Containment> {
    if inner.base != outer.base {
        return Err(Error::InvalidParameter(format!(
            "containment needs a common base, got {} and {}",
            inner.base, outer.base
        )));
    }
    let samples: Vec<TangentVector> = match plan {
        SamplePlan::Explicit(v) => v.clone(),
        SamplePlan::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count)
                .map(|_| {
                    let q = inner.base.sample_point(&mut rng);
                    inner.base.sample_tangent(&q, &mut rng)
                })
                .collect()
        }
    };
    for v in &samples {
        let hi = inner.support(&v.base, v)?;
        let ho = outer.support(&v.base, v)?;
        let ok = match (hi, ho) {
            (_, ExtReal::Infinite) => true,
            (ExtReal::Infinite, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b + CONTAINMENT_SLACK * (1.0 + b.abs()),
        };
        if !ok {
            return Ok(Containment {
                contained: false,
                samples: samples.len(),
                witness: Some(ContainmentWitness { vector: v.clone(), inner: hi, outer: ho }),
            });
        }
    }
    Ok(Containment { contained: true, samples: samples.len(), witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere_point(c: &[f64]) -> BasePoint {
        BasePoint::new(c.to_vec(), ChartId::Sphere)
    }

    fn ellipsoid_domain(n: usize, a: f64) -> GaugeDomain {
        let mut w = vec![1.0; n + 1];
        w[n - 1] = a;
        w[n] = a;
        GaugeDomain::codisk(BaseDescriptor::Sphere { n }, MetricSpec::ellipsoid(w, 1.0).unwrap(), "ellipsoid")
    }

    #[test]
    fn round_codisk_support_is_radius_on_unit_vectors() {
        let r = 1.7;
        let d = GaugeDomain::codisk(BaseDescriptor::Sphere { n: 2 }, MetricSpec::round(2, 1.0, r).unwrap(), "round");
        let q = sphere_point(&[0.0, 0.6, 0.8]);
        let v = TangentVector::new(q.clone(), vec![1.0, 0.0, 0.0]);
        assert_eq!(d.support(&q, &v).unwrap(), ExtReal::Finite(r));
    }

    #[test]
    fn ellipsoid_equator_support_is_constant() {
        let a = 0.3;
        let d = ellipsoid_domain(2, a);
        for i in 0..16 {
            let t = i as f64 / 16.0;
            let (s, c) = (2.0 * PI * t).sin_cos();
            let q = sphere_point(&[0.0, c, s]);
            let v = TangentVector::new(q.clone(), vec![0.0, -2.0 * PI * s, 2.0 * PI * c]);
            let h = d.support(&q, &v).unwrap().finite().unwrap();
            assert!((h - 2.0 * PI * a).abs() < 1e-12);
        }
    }

    #[test]
    fn camel_support_in_the_negative_direction() {
        // Oracle: brute-force max of <p, -e_n> over a box-capped sampled fiber.
        let (eps, delta, n) = (0.4, 0.01, 3);
        let d = GaugeDomain::camel(n, eps, delta).unwrap();
        let cap = 2.0;
        let steps = 400;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            let pn = -cap + 2.0 * cap * i as f64 / steps as f64;
            let feasible = pn >= -eps / 2.0 - delta - 1e-15;
            if feasible {
                best = best.max(-pn);
            }
        }
        // the sampled fiber misses the exact boundary; it brackets it from below
        assert!(best <= eps / 2.0 + delta + 1e-12 && best > eps / 2.0 + delta - 2.0 * cap / steps as f64);
        for chart in [ChartId::Torus, ChartId::TorusSlice { axis: 0 }] {
            let q = BasePoint::new(vec![0.0, 0.3, 0.7], chart);
            let v = TangentVector::new(q.clone(), vec![0.0, 0.0, -1.0]);
            let h = d.support(&q, &v).unwrap().finite().unwrap();
            assert!((h - (eps / 2.0 + delta)).abs() < 1e-15);
        }
    }

    #[test]
    fn camel_support_is_unbounded_off_axis_and_off_slice() {
        let d = GaugeDomain::camel(2, 0.4, 0.01).unwrap();
        let q = BasePoint::new(vec![0.25, 0.5], ChartId::Torus);
        let up = TangentVector::new(q.clone(), vec![0.0, 1.0]);
        assert_eq!(d.support(&q, &up).unwrap(), ExtReal::Infinite);
        let side = TangentVector::new(q.clone(), vec![1e-3, -1.0]);
        assert_eq!(d.support(&q, &side).unwrap(), ExtReal::Infinite);
        let qs = BasePoint::new(vec![0.0, 0.5], ChartId::TorusSlice { axis: 0 });
        let up = TangentVector::new(qs.clone(), vec![0.0, 1.0]);
        let h = d.support(&qs, &up).unwrap().finite().unwrap();
        assert!((h - 0.22).abs() < 1e-15);
    }

    #[test]
    fn chart_mismatch_and_nan_are_typed_errors() {
        let d = ellipsoid_domain(2, 0.5);
        let q = BasePoint::new(vec![0.1, 0.2], ChartId::Torus);
        let v = TangentVector::new(q.clone(), vec![1.0, 0.0]);
        assert!(matches!(d.support(&q, &v), Err(Error::ChartMismatch { .. })));
        let q = sphere_point(&[f64::NAN, 0.0, 1.0]);
        let v = TangentVector::new(q.clone(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(d.support(&q, &v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn zero_vector_has_zero_support() {
        let d = GaugeDomain::camel(3, 1.0, 0.1).unwrap();
        let q = BasePoint::new(vec![0.5, 0.5, 0.5], ChartId::Torus);
        assert_eq!(d.support(&q, &TangentVector::zero(q.clone())).unwrap(), ExtReal::Finite(0.0));
    }

    #[test]
    fn metric_norm_examples() {
        let flat = MetricSpec::flat(vec![1.0, 1.0], 1.0).unwrap();
        let q = BasePoint::new(vec![0.3, 0.4], ChartId::Torus);
        let v = TangentVector::new(q.clone(), vec![1.0, 0.0]);
        assert_eq!(metric_norm(&flat, &q, &v).unwrap(), 1.0);

        let a = 0.3;
        let ga = MetricSpec::ellipsoid(vec![1.0, a, a], 1.0).unwrap();
        let round = MetricSpec::round(2, a, 1.0).unwrap();
        let q = sphere_point(&[0.0, 1.0, 0.0]);
        let v = TangentVector::new(q.clone(), vec![0.0, 0.0, 2.0 * PI]);
        let ell = metric_norm(&ga, &q, &v).unwrap();
        assert!((ell - 2.0 * PI * a).abs() < 1e-12);
        assert!(metric_norm(&round, &q, &v).unwrap() <= ell + 1e-15);
    }

    #[test]
    fn rank_deficient_jacobians_are_rejected() {
        assert!(matches!(MetricSpec::ellipsoid(vec![1.0, 0.0, 1.0], 1.0), Err(Error::RankDeficient { .. })));
        let field: Arc<JacobianField> = Arc::new(|q: &BasePoint| {
            let mut m = DMatrix::identity(2, 2);
            m[(1, 1)] = q.coords[0];
            m
        });
        let good = BasePoint::new(vec![0.5, 0.0], ChartId::Torus);
        let metric = MetricSpec::field(MetricKind::Flat, field.clone(), 1.0, &[good]).unwrap();
        let bad = BasePoint::new(vec![0.0, 0.2], ChartId::Torus);
        let v = TangentVector::new(bad.clone(), vec![1.0, 1.0]);
        assert!(matches!(metric_norm(&metric, &bad, &v), Err(Error::RankDeficient { .. })));
        assert!(MetricSpec::field(MetricKind::Flat, field, 1.0, &[bad]).is_err());
    }

    #[test]
    fn generic_maximize_euclidean_and_ellipse() {
        let q = BasePoint::new(vec![0.0, 0.0], ChartId::Torus);
        let tol = DEFAULT_GAUGE_TOL;
        let v = TangentVector::new(q.clone(), vec![0.6, 0.8]);
        let h = support_generic_maximize(|_, p| norm(p), &q, &v, tol, MaximizeOptions::default()).unwrap();
        assert!((h - 1.0).abs() < tol);

        let (a, b) = (2.5, 0.7);
        let v = TangentVector::new(q.clone(), vec![1.0, 0.0]);
        let ellipse = |_: &BasePoint, p: &[f64]| ((p[0] / a).powi(2) + (p[1] / b).powi(2)).sqrt();
        let h = support_generic_maximize(ellipse, &q, &v, tol, MaximizeOptions::default()).unwrap();
        assert!((h - a).abs() < tol, "{h}");
    }

    #[test]
    fn generic_maximize_matches_ellipsoid_codisk() {
        // Dual gauge of g_a at q, written in an orthonormal basis of T_q S^2.
        let a = 0.4;
        let d = ellipsoid_domain(2, a);
        let q = sphere_point(&[0.6, 0.0, 0.8]);
        let e1 = [0.0, 1.0, 0.0];
        let e2 = [-0.8, 0.0, 0.6];
        let w = [1.0, a, a];
        let push = |e: &[f64; 3]| -> Vec<f64> { e.iter().zip(&w).map(|(x, wi)| x * wi).collect() };
        let (j1, j2) = (push(&e1), push(&e2));
        let g = nalgebra::Matrix2::new(dot(&j1, &j1), dot(&j1, &j2), dot(&j2, &j1), dot(&j2, &j2));
        let ginv = g.try_inverse().unwrap();
        let dual = move |_: &BasePoint, p: &[f64]| {
            let p = nalgebra::Vector2::new(p[0], p[1]);
            (p.transpose() * ginv * p)[(0, 0)].sqrt()
        };
        let coeffs = [0.3, -1.2];
        let ambient: Vec<f64> = (0..3).map(|i| coeffs[0] * e1[i] + coeffs[1] * e2[i]).collect();
        let closed = d.support(&q, &TangentVector::new(q.clone(), ambient)).unwrap().finite().unwrap();
        let tol = DEFAULT_GAUGE_TOL;
        let vq = TangentVector::new(q.clone(), coeffs.to_vec());
        let h = support_generic_maximize(dual, &q, &vq, tol, MaximizeOptions::default()).unwrap();
        assert!((h - closed).abs() < 10.0 * tol, "{h} vs {closed}");
    }

    #[test]
    fn generic_maximize_reports_non_convergence() {
        let q = BasePoint::new(vec![0.0, 0.0], ChartId::Torus);
        let v = TangentVector::new(q.clone(), vec![1.0, 0.0]);
        let opts = MaximizeOptions { starts: 1, seed: 0, max_iterations: 1 };
        let ellipse = |_: &BasePoint, p: &[f64]| ((p[0] / 3.0).powi(2) + (p[1] * 5.0).powi(2)).sqrt();
        let v2 = TangentVector::new(q.clone(), vec![1.0, 1.0]);
        let err = support_generic_maximize(ellipse, &q, &v2, 1e-12, opts).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
        let _ = v;
    }

    #[test]
    fn containment_examples() {
        let a = 0.5;
        let ell = ellipsoid_domain(2, a);
        let round = GaugeDomain::codisk(BaseDescriptor::Sphere { n: 2 }, MetricSpec::round(2, a, 1.0).unwrap(), "round");
        let plan = SamplePlan::Random { count: 2000, seed: 7 };
        assert!(domain_contains(&round, &ell, &plan).unwrap().contained);
        assert!(domain_contains(&ell, &ell, &plan).unwrap().contained);

        let big = GaugeDomain::codisk(BaseDescriptor::Sphere { n: 2 }, MetricSpec::round(2, 1.0, 1.1).unwrap(), "r=1.1");
        let unit = GaugeDomain::codisk(BaseDescriptor::Sphere { n: 2 }, MetricSpec::round(2, 1.0, 1.0).unwrap(), "r=1");
        let res = domain_contains(&big, &unit, &plan).unwrap();
        assert!(!res.contained);
        let w = res.witness.unwrap();
        assert!(w.inner > w.outer);
    }

    #[test]
    fn klein_canonicalization_flips_velocity() {
        let base = BaseDescriptor::KleinBottle { a: 1.0, b: 2.0 };
        let mut c = vec![1.25, 0.5];
        let mut v = vec![1.0, 0.3];
        base.canonicalize(&mut c, Some(&mut v));
        assert!((c[0] - 0.25).abs() < 1e-15 && (c[1] - 1.5).abs() < 1e-15);
        assert_eq!(v, vec![1.0, -0.3]);
        // the deck transformation is undone by lift_difference
        let d = base.lift_difference(&[0.25, 1.5], &[0.2, 1.45]);
        assert!((d[0] + 0.05).abs() < 1e-12 && (d[1] + 0.05).abs() < 1e-12);
        let across = base.lift_difference(&[0.99, 0.1], &[0.01, 1.9]);
        assert!((across[0] - 0.02).abs() < 1e-12 && across[1].abs() < 1e-12);
    }
}
