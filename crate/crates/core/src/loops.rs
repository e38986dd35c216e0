//! Loops, loop families and their lengths measured by a gauge domain.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{BaseDescriptor, BasePoint, ExtReal, GaugeDomain, TangentVector};
use crate::optimize::{golden_section_max, nelder_mead_max};
use crate::quadrature::{integrate_unit, QuadratureEstimate, QuadratureSpec};

/// Central finite-difference step used when a loop has no closed-form velocity.
pub const FD_STEP: f64 = 1e-5;

const PERIODICITY_TOL: f64 = 1e-10;
const VELOCITY_CHECK_TOL: f64 = 1e-4;
const BASEPOINT_TOL: f64 = 1e-9;

pub type PointFn = dyn Fn(f64) -> BasePoint + Send + Sync;
pub type VelocityFn = dyn Fn(f64) -> TangentVector + Send + Sync;

/// A loop `R/Z -> M`, evaluated on `[0, 1]`.
#[derive(Clone)]
pub struct Loop {
    pub name: String,
    pub base: BaseDescriptor,
    point_fn: Arc<PointFn>,
    velocity_fn: Option<Arc<VelocityFn>>,
}

impl fmt::Debug for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Loop")
            .field("name", &self.name)
            .field("base", &self.base)
            .field("closed_form_velocity", &self.velocity_fn.is_some())
            .finish()
    }
}

/// The cutoff `beta(s) = phi(s) / (phi(s) + phi(1 - s))`, `phi(s) = exp(-1/s)`:
/// smooth, 0 for `s <= 0` and 1 for `s >= 1`.
pub fn cutoff(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

pub fn cutoff_derivative(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / ((a + b) * (a + b))
    }
}

impl Loop {
    /// `point` must be defined on `[0, 1]` with `point(0) == point(1)` on `M`.
    pub fn new<P>(name: impl Into<String>, base: BaseDescriptor, point: P) -> Self
    where
        P: Fn(f64) -> BasePoint + Send + Sync + 'static,
    {
        Self { name: name.into(), base, point_fn: Arc::new(point), velocity_fn: None }
    }

    pub fn with_velocity<P, V>(name: impl Into<String>, base: BaseDescriptor, point: P, velocity: V) -> Self
    where
        P: Fn(f64) -> BasePoint + Send + Sync + 'static,
        V: Fn(f64) -> TangentVector + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            base,
            point_fn: Arc::new(point),
            velocity_fn: Some(Arc::new(velocity)),
        }
    }

    /// A loop given by a path in the universal cover; points and velocities
    /// are pushed into the fundamental domain.
    pub fn from_lift<P, V>(name: impl Into<String>, base: BaseDescriptor, chart: crate::gauge::ChartId, lift: P, lift_velocity: V) -> Self
    where
        P: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        V: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        let lift = Arc::new(lift);
        let b1 = base.clone();
        let b2 = base.clone();
        let l1 = lift.clone();
        let point = move |t: f64| {
            let mut c = l1(t);
            b1.canonicalize(&mut c, None);
            BasePoint::new(c, chart)
        };
        let velocity = move |t: f64| {
            let mut c = lift(t);
            let mut v = lift_velocity(t);
            b2.canonicalize(&mut c, Some(&mut v));
            TangentVector::new(BasePoint::new(c, chart), v)
        };
        Self::with_velocity(name, base, point, velocity)
    }

    pub fn constant(name: impl Into<String>, base: BaseDescriptor, q: BasePoint) -> Self {
        let q2 = q.clone();
        Self::with_velocity(name, base, move |_| q.clone(), move |_| TangentVector::zero(q2.clone()))
    }

    pub fn has_closed_form_velocity(&self) -> bool {
        self.velocity_fn.is_some()
    }

    fn raw_point(&self, t: f64) -> BasePoint {
        (self.point_fn)(t)
    }

    pub fn point(&self, t: f64) -> BasePoint {
        self.raw_point(t.rem_euclid(1.0))
    }

    pub fn velocity(&self, t: f64) -> TangentVector {
        let t = t.rem_euclid(1.0);
        match &self.velocity_fn {
            Some(v) => v(t),
            None => self.fd_velocity(t),
        }
    }

    pub fn fd_velocity(&self, t: f64) -> TangentVector {
        let q = self.point(t);
        let before = self.point(t - FD_STEP);
        let after = self.point(t + FD_STEP);
        let diff = self.base.lift_difference(&before.coords, &after.coords);
        TangentVector::new(q, diff.iter().map(|d| d / (2.0 * FD_STEP)).collect())
    }

    /// Periodicity and closed-form/finite-difference velocity agreement at
    /// 16 interior sample points.
    pub fn validate(&self) -> Result<()> {
        let start = self.raw_point(0.0);
        let end = self.raw_point(1.0);
        self.base.check_point(&start).map_err(|e| self.invalid(e.to_string()))?;
        let gap = self.base.chart_distance(&start.coords, &end.coords);
        if !(gap <= PERIODICITY_TOL) {
            return Err(self.invalid(format!("not closed, |q(1) - q(0)| = {gap:e}")));
        }
        if self.velocity_fn.is_some() {
            for i in 0..16 {
                let t = (i as f64 + 0.5) / 16.0;
                let closed = self.velocity(t);
                let fd = self.fd_velocity(t);
                let err = closed
                    .components
                    .iter()
                    .zip(&fd.components)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let scale = closed.components.iter().map(|c| c * c).sum::<f64>().sqrt();
                if !(err <= VELOCITY_CHECK_TOL * scale + 1e-9) {
                    return Err(self.invalid(format!(
                        "velocity disagrees with finite differences at t = {t}: relative error {:e}",
                        err / scale.max(f64::MIN_POSITIVE)
                    )));
                }
            }
        }
        Ok(())
    }

    fn invalid(&self, reason: String) -> Error {
        Error::InvalidLoop { name: self.name.clone(), reason }
    }

    /// The loop traversed backwards, `t -> q(1 - t)`.
    pub fn reverse(&self) -> Loop {
        let name = match self.name.strip_prefix("rev(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("rev({})", self.name),
        };
        let p = self.point_fn.clone();
        let point = move |t: f64| p(1.0 - t);
        match &self.velocity_fn {
            Some(v) => {
                let v = v.clone();
                Loop::with_velocity(name, self.base.clone(), point, move |t: f64| v(1.0 - t).scaled(-1.0))
            }
            None => Loop::new(name, self.base.clone(), point),
        }
    }

    /// `t -> q(rho(t))` for an orientation-preserving diffeomorphism `rho` of
    /// `[0, 1]` with derivative `drho`.
    pub fn reparametrize<R, D>(&self, rho: R, drho: D) -> Loop
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let rho = Arc::new(rho);
        let inner = self.clone();
        let r1 = rho.clone();
        let point = move |t: f64| inner.raw_point(r1(t).clamp(0.0, 1.0));
        let inner = self.clone();
        let velocity = move |t: f64| inner.velocity(rho(t)).scaled(drho(t));
        Loop::with_velocity(format!("{}∘ρ", self.name), self.base.clone(), point, velocity)
    }

    /// Concatenation through the shared basepoint, each half reparametrized by
    /// the smooth cutoff so the result is smooth at the junctions.
    pub fn concatenate(&self, other: &Loop) -> Result<Loop> {
        if self.base != other.base {
            return Err(Error::InvalidParameter(format!(
                "cannot concatenate loops on {} and {}",
                self.base, other.base
            )));
        }
        let p = self.raw_point(0.0);
        let q = other.raw_point(0.0);
        let gap = self.base.chart_distance(&p.coords, &q.coords);
        if !(gap <= BASEPOINT_TOL) {
            return Err(Error::BasepointMismatch { gap });
        }
        let (a, b) = (self.clone(), other.clone());
        let point = move |t: f64| {
            if t < 0.5 {
                a.raw_point(cutoff(2.0 * t))
            } else {
                b.raw_point(cutoff(2.0 * t - 1.0))
            }
        };
        let (a, b) = (self.clone(), other.clone());
        let velocity = move |t: f64| {
            if t < 0.5 {
                a.velocity(cutoff(2.0 * t)).scaled(2.0 * cutoff_derivative(2.0 * t))
            } else {
                let s = 2.0 * t - 1.0;
                let s_in = cutoff(s);
                // b(1) is b(0); keep the evaluation inside [0, 1)
                let v = if s_in >= 1.0 { b.velocity(0.0) } else { b.velocity(s_in) };
                v.scaled(2.0 * cutoff_derivative(s))
            }
        };
        Ok(Loop::with_velocity(format!("{}·{}", self.name, other.name), self.base.clone(), point, velocity))
    }
}

/// Integral of the support of `domain` along `loop_`.
pub fn loop_length(domain: &GaugeDomain, loop_: &Loop, quad: &QuadratureSpec) -> Result<QuadratureEstimate> {
    integrate_unit(
        |t| {
            let v = loop_.velocity(t);
            match domain.support(&v.base, &v)? {
                ExtReal::Finite(x) => Ok(x),
                ExtReal::Infinite => Err(Error::InfiniteSupport { loop_name: loop_.name.clone(), t }),
            }
        },
        quad,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamAxis {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
    /// Periodic axes wrap and sample `[lower, upper)`; others clamp and
    /// sample both ends.
    pub periodic: bool,
}

impl ParamAxis {
    pub fn interval(name: impl Into<String>, lower: f64, upper: f64, samples: usize) -> Self {
        Self { name: name.into(), lower, upper, samples, periodic: false }
    }

    pub fn circle(name: impl Into<String>, lower: f64, upper: f64, samples: usize) -> Self {
        Self { name: name.into(), lower, upper, samples, periodic: true }
    }

    pub fn spacing(&self) -> f64 {
        let width = self.upper - self.lower;
        if self.periodic {
            width / self.samples as f64
        } else if self.samples > 1 {
            width / (self.samples - 1) as f64
        } else {
            width
        }
    }

    pub fn sample(&self, i: usize) -> f64 {
        if !self.periodic && self.samples == 1 {
            return 0.5 * (self.lower + self.upper);
        }
        self.lower + i as f64 * self.spacing()
    }

    pub fn normalize(&self, x: f64) -> f64 {
        if self.periodic {
            self.lower + (x - self.lower).rem_euclid(self.upper - self.lower)
        } else {
            x.clamp(self.lower, self.upper)
        }
    }
}

/// Sampled parameter manifold `P`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub axes: Vec<ParamAxis>,
}

impl ParamSpace {
    pub fn new(axes: Vec<ParamAxis>) -> Self {
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.samples).product()
    }

    pub fn grid(&self) -> Vec<Vec<f64>> {
        let total = self.grid_size();
        (0..total)
            .map(|mut idx| {
                self.axes
                    .iter()
                    .map(|axis| {
                        let i = idx % axis.samples;
                        idx /= axis.samples;
                        axis.sample(i)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn normalize(&self, params: &[f64]) -> Vec<f64> {
        self.axes.iter().zip(params).map(|(a, x)| a.normalize(*x)).collect()
    }
}

pub type LoopBuilder = dyn Fn(&[f64]) -> Result<Loop> + Send + Sync;

/// A smooth family `P x R/Z -> M`.
#[derive(Clone)]
pub struct LoopFamily {
    pub name: String,
    pub params: ParamSpace,
    loop_at: Arc<LoopBuilder>,
    /// Caveat recorded on reports, e.g. about attainment of the supremum.
    pub note: Option<String>,
}

impl fmt::Debug for LoopFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoopFamily").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl LoopFamily {
    pub fn new<B>(name: impl Into<String>, params: ParamSpace, loop_at: B) -> Self
    where
        B: Fn(&[f64]) -> Result<Loop> + Send + Sync + 'static,
    {
        Self { name: name.into(), params, loop_at: Arc::new(loop_at), note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn loop_at(&self, params: &[f64]) -> Result<Loop> {
        if params.len() != self.params.dim() {
            return Err(Error::Dimension { expected: self.params.dim(), found: params.len() });
        }
        (self.loop_at)(&self.params.normalize(params))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// `l(q)`.
    Forward,
    /// `l(q) + l(rev q)`.
    WithReverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineSpec {
    /// Objective evaluations allowed per extremum.
    pub budget: usize,
    pub objective: Objective,
}

impl Default for RefineSpec {
    fn default() -> Self {
        Self { budget: 200, objective: Objective::Forward }
    }
}

impl RefineSpec {
    pub fn with_objective(self, objective: Objective) -> Self {
        Self { objective, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub grid_value: f64,
    pub params: Vec<f64>,
    pub grid_params: Vec<f64>,
    /// Forward and reverse lengths at `params` (reverse is `None` for the
    /// forward objective).
    pub forward: f64,
    pub reverse: Option<f64>,
    pub grid_forward: f64,
    pub grid_reverse: Option<f64>,
    pub evaluations: usize,
    pub history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalLengthReport {
    pub family: String,
    pub objective: Objective,
    pub sup: Extremum,
    pub inf: Extremum,
    pub grid_points: usize,
    pub samples_per_axis: Vec<usize>,
    /// Largest quadrature error seen plus the grid-to-refined shift of each
    /// extremum.
    pub tolerance: f64,
    pub note: Option<String>,
}

impl ExtremalLengthReport {
    /// `E`
    pub fn sup_value(&self) -> f64 {
        self.sup.value
    }

    /// `e`
    pub fn inf_value(&self) -> f64 {
        self.inf.value
    }
}

#[derive(Clone, Copy)]
struct Eval {
    value: f64,
    forward: f64,
    reverse: Option<f64>,
    error: f64,
}

fn evaluate(domain: &GaugeDomain, family: &LoopFamily, quad: &QuadratureSpec, objective: Objective, params: &[f64]) -> Result<Eval> {
    let lp = family.loop_at(params)?;
    let map_inf = |e: Error| match e {
        Error::InfiniteSupport { .. } => Error::InfiniteLength { family: family.name.clone(), params: params.to_vec() },
        other => other,
    };
    let fwd = loop_length(domain, &lp, quad).map_err(map_inf)?;
    match objective {
        Objective::Forward => Ok(Eval { value: fwd.value, forward: fwd.value, reverse: None, error: fwd.error }),
        Objective::WithReverse => {
            let rev = loop_length(domain, &lp.reverse(), quad).map_err(map_inf)?;
            Ok(Eval {
                value: fwd.value + rev.value,
                forward: fwd.value,
                reverse: Some(rev.value),
                error: fwd.error + rev.error,
            })
        }
    }
}

/// Sup and inf of the loop length over a family: grid evaluation (in
/// parallel) followed by derivative-free refinement from the grid extrema.
pub fn extremal_lengths(
    domain: &GaugeDomain,
    family: &LoopFamily,
    quad: &QuadratureSpec,
    refine: &RefineSpec,
) -> Result<ExtremalLengthReport> {
    quad.validate()?;
    let grid = family.params.grid();
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("family `{}` has an empty parameter grid", family.name)));
    }
    let evals: Vec<Eval> = grid
        .par_iter()
        .map(|p| evaluate(domain, family, quad, refine.objective, p))
        .collect::<Result<_>>()?;

    let mut imax = 0;
    let mut imin = 0;
    for (i, e) in evals.iter().enumerate() {
        if e.value > evals[imax].value {
            imax = i;
        }
        if e.value < evals[imin].value {
            imin = i;
        }
    }
    let quad_err = evals.iter().fold(0.0f64, |m, e| m.max(e.error));

    let polish = |start: usize, sign: f64| -> Result<Extremum> {
        let e0 = evals[start];
        let x0 = &grid[start];
        let mut best = (e0, x0.clone());
        let mut objective = |x: &[f64]| -> Result<f64> {
            let x = family.params.normalize(x);
            let e = evaluate(domain, family, quad, refine.objective, &x)?;
            if sign * e.value > sign * best.0.value {
                best = (e, x);
            }
            Ok(sign * e.value)
        };
        let trace = match family.params.dim() {
            0 => None,
            1 => {
                let axis = &family.params.axes[0];
                let h = axis.spacing();
                Some(golden_section_max(|x| objective(&[x]), x0[0] - h, x0[0] + h, refine.budget)?)
            }
            _ => {
                let steps: Vec<f64> = family.params.axes.iter().map(|a| 0.5 * a.spacing()).collect();
                Some(nelder_mead_max(&mut objective, x0, &steps, refine.budget)?)
            }
        };
        let (e, x) = best;
        Ok(Extremum {
            value: e.value,
            grid_value: e0.value,
            params: x,
            grid_params: x0.clone(),
            forward: e.forward,
            reverse: e.reverse,
            grid_forward: e0.forward,
            grid_reverse: e0.reverse,
            evaluations: trace.as_ref().map_or(0, |t| t.evaluations),
            history: trace.map_or_else(Vec::new, |t| t.history.iter().map(|h| sign * h).collect()),
        })
    };
    let sup = polish(imax, 1.0)?;
    let inf = polish(imin, -1.0)?;
    let tolerance = quad_err + (sup.value - sup.grid_value).abs() + (inf.value - inf.grid_value).abs();
    Ok(ExtremalLengthReport {
        family: family.name.clone(),
        objective: refine.objective,
        sup,
        inf,
        grid_points: grid.len(),
        samples_per_axis: family.params.axes.iter().map(|a| a.samples).collect(),
        tolerance,
        note: family.note.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{ChartId, MetricSpec};
    use std::f64::consts::PI;

    fn ellipsoid(n: usize, a: f64) -> GaugeDomain {
        let mut w = vec![1.0; n + 1];
        w[n - 1] = a;
        w[n] = a;
        GaugeDomain::codisk(BaseDescriptor::Sphere { n }, MetricSpec::ellipsoid(w, 1.0).unwrap(), "ellipsoid")
    }

    fn equator(n: usize) -> Loop {
        let base = BaseDescriptor::Sphere { n };
        Loop::with_velocity(
            "equator",
            base,
            move |t| {
                let mut c = vec![0.0; n + 1];
                c[n - 1] = (2.0 * PI * t).cos();
                c[n] = (2.0 * PI * t).sin();
                BasePoint::new(c, ChartId::Sphere)
            },
            move |t| {
                let mut c = vec![0.0; n + 1];
                c[n - 1] = (2.0 * PI * t).cos();
                c[n] = (2.0 * PI * t).sin();
                let mut v = vec![0.0; n + 1];
                v[n - 1] = -2.0 * PI * (2.0 * PI * t).sin();
                v[n] = 2.0 * PI * (2.0 * PI * t).cos();
                TangentVector::new(BasePoint::new(c, ChartId::Sphere), v)
            },
        )
    }

    fn flat_torus() -> GaugeDomain {
        GaugeDomain::codisk(BaseDescriptor::Torus { dim: 2 }, MetricSpec::flat(vec![1.0, 1.0], 1.0).unwrap(), "flat")
    }

    fn torus_loop(x0: f64) -> Loop {
        Loop::new("vertical", BaseDescriptor::Torus { dim: 2 }, move |t| {
            BasePoint::new(vec![x0, crate::gauge::wrap_unit(t)], ChartId::Torus)
        })
    }

    #[test]
    fn constant_loop_has_zero_length() {
        let d = ellipsoid(2, 0.5);
        let q = BasePoint::new(vec![1.0, 0.0, 0.0], ChartId::Sphere);
        let l = Loop::constant("c", BaseDescriptor::Sphere { n: 2 }, q);
        l.validate().unwrap();
        assert_eq!(loop_length(&d, &l, &QuadratureSpec::default()).unwrap().value, 0.0);
    }

    #[test]
    fn equator_length_on_ellipsoid() {
        for a in [0.2, 0.7] {
            let l = equator(3);
            l.validate().unwrap();
            let len = loop_length(&ellipsoid(3, a), &l, &QuadratureSpec::default()).unwrap().value;
            assert!(((len - 2.0 * PI * a) / (2.0 * PI * a)).abs() < 1e-6);
        }
    }

    #[test]
    fn flat_torus_geodesic_with_fd_velocity() {
        let l = torus_loop(0.3);
        l.validate().unwrap();
        let len = loop_length(&flat_torus(), &l, &QuadratureSpec::default()).unwrap().value;
        assert!((len - 1.0).abs() < 1e-8);
        let rev = loop_length(&flat_torus(), &l.reverse(), &QuadratureSpec::default()).unwrap().value;
        assert!((rev - len).abs() < 1e-9);
    }

    #[test]
    fn reverse_is_an_involution() {
        let l = equator(2);
        let rr = l.reverse().reverse();
        assert_eq!(rr.name, l.name);
        for i in 0..64 {
            let t = i as f64 / 64.0;
            assert_eq!(rr.point(t), l.point(t));
            let r = l.reverse().point(t);
            assert_eq!(r, l.raw_point(1.0 - t));
        }
    }

    #[test]
    fn reversed_camel_loop_probes_the_other_direction() {
        let d = GaugeDomain::camel(2, 0.4, 0.01).unwrap();
        let up = Loop::new("up", BaseDescriptor::Torus { dim: 2 }, |t| {
            BasePoint::new(vec![0.0, crate::gauge::wrap_unit(t)], ChartId::TorusSlice { axis: 0 })
        });
        let quad = QuadratureSpec::default();
        let fwd = loop_length(&d, &up, &quad).unwrap().value;
        let back = loop_length(&d, &up.reverse(), &quad).unwrap().value;
        assert!((fwd - 0.22).abs() < 1e-12);
        assert!((back - 0.21).abs() < 1e-12);
    }

    #[test]
    fn infinite_support_names_the_sample() {
        let d = GaugeDomain::camel(2, 0.4, 0.01).unwrap();
        let err = loop_length(&d, &torus_loop(0.2), &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::InfiniteSupport { t, .. } if t == 0.0));
    }

    #[test]
    fn validate_rejects_open_paths_and_bad_velocities() {
        let base = BaseDescriptor::Torus { dim: 2 };
        let open = Loop::new("open", base.clone(), |t| BasePoint::new(vec![0.0, 0.5 * t], ChartId::Torus));
        assert!(matches!(open.validate(), Err(Error::InvalidLoop { .. })));
        let wrong = Loop::with_velocity(
            "wrong",
            base,
            |t| BasePoint::new(vec![0.0, crate::gauge::wrap_unit(t)], ChartId::Torus),
            |t| TangentVector::new(BasePoint::new(vec![0.0, t], ChartId::Torus), vec![0.0, 2.0]),
        );
        assert!(matches!(wrong.validate(), Err(Error::InvalidLoop { .. })));
    }

    #[test]
    fn concatenation_examples() {
        let quad = QuadratureSpec::default();
        let d = ellipsoid(2, 0.4);
        let g = equator(2);
        let len = loop_length(&d, &g, &quad).unwrap().value;
        let c = Loop::constant("c", BaseDescriptor::Sphere { n: 2 }, g.point(0.0));
        let gc = g.concatenate(&c).unwrap();
        gc.validate().unwrap();
        assert!((loop_length(&d, &gc, &quad).unwrap().value - len).abs() < 1e-7);
        let gg = g.concatenate(&g.reverse()).unwrap();
        assert!((loop_length(&d, &gg, &quad).unwrap().value - 2.0 * len).abs() < 1e-7);

        let q = BasePoint::new(vec![0.0, 0.0, 1.0], ChartId::Sphere);
        let elsewhere = Loop::constant("c", BaseDescriptor::Sphere { n: 2 }, q);
        assert!(matches!(g.concatenate(&elsewhere), Err(Error::BasepointMismatch { .. })));
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(-1.0), 0.0);
        assert_eq!(cutoff(2.0), 1.0);
        assert!((cutoff(0.5) - 0.5).abs() < 1e-15);
        for i in 1..100 {
            let s = i as f64 / 100.0;
            let fd = (cutoff(s + 1e-6) - cutoff(s - 1e-6)) / 2e-6;
            assert!((fd - cutoff_derivative(s)).abs() < 1e-6);
        }
    }

    #[test]
    fn extremal_lengths_flat_torus_family() {
        let family = LoopFamily::new(
            "vertical",
            ParamSpace::new(vec![ParamAxis::circle("x", 0.0, 1.0, 8)]),
            |p: &[f64]| Ok(torus_loop(p[0])),
        );
        let r = extremal_lengths(&flat_torus(), &family, &QuadratureSpec::default(), &RefineSpec::default()).unwrap();
        assert!((r.sup_value() - 1.0).abs() < 1e-9 && (r.inf_value() - 1.0).abs() < 1e-9);
        assert!(r.inf_value() <= r.sup_value());
    }

    #[test]
    fn zero_radius_codisk_gives_zero_lengths() {
        let d = GaugeDomain::codisk(BaseDescriptor::Torus { dim: 2 }, MetricSpec::flat(vec![1.0, 1.0], 0.0).unwrap(), "zero");
        let family = LoopFamily::new(
            "vertical",
            ParamSpace::new(vec![ParamAxis::circle("x", 0.0, 1.0, 4)]),
            |p: &[f64]| Ok(torus_loop(p[0])),
        );
        let r = extremal_lengths(&d, &family, &QuadratureSpec::default(), &RefineSpec::default()).unwrap();
        assert_eq!(r.sup_value(), 0.0);
        assert_eq!(r.inf_value(), 0.0);
    }

    #[test]
    fn refinement_improves_on_the_grid() {
        // page parameter x in [-1, 1]; 32 samples miss x = 0
        let a = 0.3;
        let family = LoopFamily::new(
            "page",
            ParamSpace::new(vec![ParamAxis::interval("x", -1.0, 1.0, 32)]),
            |p: &[f64]| {
                let x = p[0];
                let s = (1.0 - x * x).max(0.0).sqrt();
                Ok(Loop::new("page", BaseDescriptor::Sphere { n: 2 }, move |t| {
                    let (sn, cs) = (2.0 * PI * t).sin_cos();
                    BasePoint::new(vec![x, s * cs, s * sn], ChartId::Sphere)
                }))
            },
        );
        let r = extremal_lengths(&ellipsoid(2, a), &family, &QuadratureSpec::default(), &RefineSpec::default()).unwrap();
        assert!(r.sup.value >= r.sup.grid_value);
        assert!(((r.sup.value - 2.0 * PI * a) / (2.0 * PI * a)).abs() < 1e-6);
        assert!(r.sup.grid_value < 2.0 * PI * a * (1.0 - 1e-4));
        assert!(r.inf.value.abs() < 1e-9);
    }

    #[test]
    fn infinite_family_reports_parameters() {
        let d = GaugeDomain::camel(2, 0.4, 0.01).unwrap();
        let family = LoopFamily::new(
            "bad",
            ParamSpace::new(vec![ParamAxis::circle("x", 0.0, 1.0, 4)]),
            |p: &[f64]| Ok(torus_loop(p[0])),
        );
        let err = extremal_lengths(&d, &family, &QuadratureSpec::default(), &RefineSpec::default()).unwrap_err();
        assert!(matches!(err, Error::InfiniteLength { .. }));
    }
}
