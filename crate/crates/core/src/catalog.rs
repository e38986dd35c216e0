//! Built-in scenarios: a domain, its loop families, the target classes and
//! the symbolic data their derivations use.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{wrap_unit, BaseDescriptor, BasePoint, ChartId, GaugeDomain, MetricSpec, TangentVector};
use crate::loops::{Loop, LoopFamily, Objective, ParamAxis, ParamSpace};
use crate::stralg::{sym_inf, sym_sup, RuleContext, RuleId, Sign, TargetClass};

/// Sampling plan shared by every family of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPlan {
    pub samples_per_axis: usize,
    /// Cap on the grid size of one family; high-dimensional families get
    /// fewer samples per axis.
    pub max_points: usize,
}

impl Default for GridPlan {
    fn default() -> Self {
        Self { samples_per_axis: 32, max_points: 4096 }
    }
}

impl GridPlan {
    fn per_axis(&self, axes: usize, reserved: usize) -> usize {
        if axes == 0 {
            return self.samples_per_axis;
        }
        let budget = (self.max_points / reserved.max(1)).max(1) as f64;
        let cap = budget.powf(1.0 / axes as f64).floor() as usize;
        self.samples_per_axis.min(cap).max(2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PageSpec {
    /// `D^dim`, with nonempty boundary (the binding).
    Disk { dim: usize },
    /// `S^1`, closed.
    Circle,
}

/// Profile `f` whose level set `{f = 1}` is the page boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSpec {
    /// `f(x) = |x|^2`.
    Round,
    /// `f = 0`.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpec {
    /// The circle turns the pages `winding` times per period.
    Rotation { winding: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpenBookDomain {
    /// Unit codisk (scaled by `radius`) of the ellipsoid metric with weight
    /// `a` on the rotated plane; the open book is `S^{dim+1}`.
    Ellipsoid { a: f64, radius: f64 },
    /// Codisk of the flat metric on `R/aZ x R/Z`, pages along the unit factor.
    FlatTorus { a: f64, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorSpec {
    Point,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusDomain {
    /// Codisk of the unit flat metric.
    Flat { radius: f64 },
    Camel { eps: f64, delta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum ScenarioKind {
    Ellipsoid1 { n: usize, a: f64, radius: f64 },
    Ellipsoid2 { n: usize, a: f64, radius: f64 },
    OpenBook { page: PageSpec, f: ProfileSpec, action: ActionSpec, domain: OpenBookDomain },
    ProductTorus { v: FactorSpec, d: usize, k: usize, domain: TorusDomain },
    Camel { n: usize, eps: f64, delta: f64 },
    Klein { a: f64, b: f64, radius: f64 },
}

/// Serializable description from which a scenario is rebuilt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDescriptor {
    pub id: String,
    pub kind: ScenarioKind,
    pub grid: GridPlan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pick {
    Sup,
    Inf,
    /// Least value of `l(q) + l(rev q)`.
    PairInf,
    /// `l(q)` at the minimizer of the pair sum.
    PairForwardAtInf,
    /// `l(rev q)` at the minimizer of the pair sum.
    PairReverseAtInf,
}

impl Pick {
    pub fn objective(self) -> Objective {
        match self {
            Pick::Sup | Pick::Inf => Objective::Forward,
            _ => Objective::WithReverse,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingSelector {
    pub family: String,
    pub pick: Pick,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityClaim {
    pub target: String,
    pub statement: String,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    pub grid: GridPlan,
    pub domain: GaugeDomain,
    pub families: Vec<LoopFamily>,
    pub targets: Vec<TargetClass>,
    pub bindings: BTreeMap<String, BindingSelector>,
    pub context: RuleContext,
    pub equalities: Vec<EqualityClaim>,
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn family(&self, name: &str) -> Result<&LoopFamily> {
        self.families
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn target(&self, name: &str) -> Result<&TargetClass> {
        self.targets.iter().find(|t| t.name == name).ok_or_else(|| Error::UnsupportedTarget {
            scenario: self.id.clone(),
            target: name.to_string(),
        })
    }

    pub fn descriptor(&self) -> ScenarioDescriptor {
        ScenarioDescriptor { id: self.id.clone(), kind: self.kind.clone(), grid: self.grid }
    }

    pub fn from_descriptor(desc: &ScenarioDescriptor) -> Result<Scenario> {
        build(&desc.kind, desc.grid)
    }

    /// The same scenario with its fibers dilated by `factor`.
    pub fn scaled(&self, factor: f64) -> Scenario {
        Scenario { domain: self.domain.scaled(factor), ..self.clone() }
    }

    pub fn with_context(mut self, context: RuleContext) -> Scenario {
        self.context = context;
        self
    }

    fn check_bindings(&self) -> Result<()> {
        for sel in self.bindings.values() {
            self.family(&sel.family)?;
        }
        Ok(())
    }
}

pub fn build(kind: &ScenarioKind, grid: GridPlan) -> Result<Scenario> {
    if grid.samples_per_axis < 2 || grid.max_points < 1 {
        return Err(Error::InvalidParameter(format!(
            "grid plan needs at least 2 samples per axis, got {}",
            grid.samples_per_axis
        )));
    }
    let s = match kind {
        ScenarioKind::Ellipsoid1 { n, a, radius } => ellipsoid1(*n, *a, *radius, grid)?,
        ScenarioKind::Ellipsoid2 { n, a, radius } => ellipsoid2(*n, *a, *radius, grid)?,
        ScenarioKind::OpenBook { page, f, action, domain } => open_book(page, f, action, domain, grid)?,
        ScenarioKind::ProductTorus { v, d, k, domain } => product_torus(v, *d, *k, domain, grid)?,
        ScenarioKind::Camel { n, eps, delta } => camel(*n, *eps, *delta, grid)?,
        ScenarioKind::Klein { a, b, radius } => klein(*a, *b, *radius, grid)?,
    };
    s.check_bindings()?;
    Ok(s)
}

pub fn ellipsoid_scenario(n: usize, a: f64) -> Result<Scenario> {
    build(&ScenarioKind::Ellipsoid1 { n, a, radius: 1.0 }, GridPlan::default())
}

pub fn ellipsoid2_scenario(n: usize, a: f64) -> Result<Scenario> {
    build(&ScenarioKind::Ellipsoid2 { n, a, radius: 1.0 }, GridPlan::default())
}

pub fn open_book_scenario(page: PageSpec, f: ProfileSpec, action: ActionSpec, domain: OpenBookDomain) -> Result<Scenario> {
    build(&ScenarioKind::OpenBook { page, f, action, domain }, GridPlan::default())
}

pub fn product_torus_scenario(v: FactorSpec, d: usize, k: usize, domain: TorusDomain) -> Result<Scenario> {
    build(&ScenarioKind::ProductTorus { v, d, k, domain }, GridPlan::default())
}

pub fn camel_scenario(n: usize, eps: f64, delta: f64) -> Result<Scenario> {
    build(&ScenarioKind::Camel { n, eps, delta }, GridPlan::default())
}

pub fn klein_bottle_scenario(a: f64, b: f64) -> Result<Scenario> {
    build(&ScenarioKind::Klein { a, b, radius: 1.0 }, GridPlan::default())
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn check_weight(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(invalid(format!("ellipsoid parameter a must lie in (0, 1], got {a}")));
    }
    Ok(())
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(invalid(format!("codisk radius must be finite and >= 0, got {radius}")));
    }
    Ok(())
}

fn ellipsoid_weights(n: usize, a: f64, weighted: usize) -> Vec<f64> {
    let mut w = vec![1.0; n + 1];
    for wi in w.iter_mut().skip(n + 1 - weighted) {
        *wi = a;
    }
    w
}

fn open_book_bindings(families: (&str, &str)) -> BTreeMap<String, BindingSelector> {
    let mut b = BTreeMap::new();
    for (s, fam) in [(Sign::Plus, families.0), (Sign::Minus, families.1)] {
        b.insert(sym_sup(s), BindingSelector { family: fam.into(), pick: Pick::Sup });
        b.insert(sym_inf(s), BindingSelector { family: fam.into(), pick: Pick::Inf });
    }
    b
}

/// Radial projection of the page box `[-1, 1]^m` onto the unit disk.
fn clamp_to_disk(x: &[f64]) -> Vec<f64> {
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    if r > 1.0 {
        x.iter().map(|c| c / r).collect()
    } else {
        x.to_vec()
    }
}

/// Page-rotation loops on `S^n`: `(x, s cos 2πwt, ±s sin 2πwt)`, `s = sqrt(1 - |x|^2)`.
fn sphere_page_family(name: &str, n: usize, sign: Sign, winding: u32, grid: GridPlan) -> LoopFamily {
    let m = n - 1;
    let per = grid.per_axis(m, 1);
    let axes = (0..m).map(|i| ParamAxis::interval(format!("x{i}"), -1.0, 1.0, per)).collect();
    let dir = if sign == Sign::Plus { 1.0 } else { -1.0 };
    let w = f64::from(winding);
    let fam_name = name.to_string();
    LoopFamily::new(name, ParamSpace::new(axes), move |p: &[f64]| {
        let x = clamp_to_disk(p);
        let s = (1.0 - x.iter().map(|c| c * c).sum::<f64>()).max(0.0).sqrt();
        let at = {
            let x = x.clone();
            move |t: f64| {
                let (sn, cs) = (2.0 * PI * w * t).sin_cos();
                let mut c = x.clone();
                c.push(s * cs);
                c.push(dir * s * sn);
                c
            }
        };
        let at2 = at.clone();
        let base = BaseDescriptor::Sphere { n };
        Ok(Loop::with_velocity(
            format!("{fam_name}{x:?}"),
            base,
            move |t| BasePoint::new(at(t), ChartId::Sphere),
            move |t| {
                let (sn, cs) = (2.0 * PI * w * t).sin_cos();
                let mut v = vec![0.0; m];
                v.push(-2.0 * PI * w * s * sn);
                v.push(dir * 2.0 * PI * w * s * cs);
                TangentVector::new(BasePoint::new(at2(t), ChartId::Sphere), v)
            },
        ))
    })
    .with_note("supremum attained at the page centre; boundary parameters give the constant binding loops")
}

fn ellipsoid1(n: usize, a: f64, radius: f64, grid: GridPlan) -> Result<Scenario> {
    if n < 2 {
        return Err(invalid(format!("ellipsoid scenario needs n >= 2, got {n}")));
    }
    check_weight(a)?;
    check_radius(radius)?;
    let mut s = open_book(
        &PageSpec::Disk { dim: n - 1 },
        &ProfileSpec::Round,
        &ActionSpec::Rotation { winding: 1 },
        &OpenBookDomain::Ellipsoid { a, radius },
        grid,
    )?;
    s.kind = ScenarioKind::Ellipsoid1 { n, a, radius };
    s.id = format!("ellipsoid1(n={n},a={a},r={radius})");
    s.notes.push("E_+ = E_- by the reflection x_n -> -x_n".into());
    if radius == 1.0 {
        s.equalities.push(EqualityClaim {
            target: format!("[S^{n}]"),
            statement: format!(
                "Gr([S^{n}], Ω_a) = 2πa: the round codisk bundle of radius a lies in Ω_a and carries balls of capacity 2πa over every q, moved by a unitary frame family A(q) with A(q)e_1 = q"
            ),
        });
    }
    Ok(s)
}

fn open_book(page: &PageSpec, f: &ProfileSpec, action: &ActionSpec, domain: &OpenBookDomain, grid: GridPlan) -> Result<Scenario> {
    let ActionSpec::Rotation { winding } = *action;
    if winding == 0 {
        return Err(invalid("page rotation needs a nonzero winding".into()));
    }
    let kind = ScenarioKind::OpenBook { page: page.clone(), f: f.clone(), action: action.clone(), domain: domain.clone() };
    match (page, f, domain) {
        (PageSpec::Disk { .. }, ProfileSpec::Trivial, _) => Err(invalid(
            "profile f = 0 has no regular level set at the page boundary".into(),
        )),
        (PageSpec::Circle, ProfileSpec::Round, _) => Err(invalid(
            "a closed page has no boundary level set; use the trivial profile".into(),
        )),
        (PageSpec::Disk { dim }, ProfileSpec::Round, OpenBookDomain::Ellipsoid { a, radius }) => {
            if *dim < 1 {
                return Err(invalid("disk page needs dimension >= 1".into()));
            }
            check_weight(*a)?;
            check_radius(*radius)?;
            let n = dim + 1;
            let metric = MetricSpec::ellipsoid(ellipsoid_weights(n, *a, 2), *radius)?;
            let domain = GaugeDomain::codisk(
                BaseDescriptor::Sphere { n },
                metric,
                format!("codisk bundle (radius {radius}) of ellipsoid metric, a = {a}"),
            );
            let families = vec![
                sphere_page_family("L+", n, Sign::Plus, winding, grid),
                sphere_page_family("L-", n, Sign::Minus, winding, grid),
            ];
            Ok(Scenario {
                id: format!("open_book(D^{dim},round,w={winding},a={a},r={radius})"),
                kind,
                grid,
                domain,
                families,
                targets: vec![TargetClass::point(), TargetClass::zero_section(format!("[S^{n}]"))],
                bindings: open_book_bindings(("L+", "L-")),
                context: RuleContext::open_book(true),
                equalities: Vec::new(),
                notes: vec![format!("S^{n} as the open book with page D^{dim}; binding loops are constant")],
            })
        }
        (PageSpec::Circle, ProfileSpec::Trivial, OpenBookDomain::FlatTorus { a, radius }) => {
            if !(*a > 0.0 && a.is_finite()) {
                return Err(invalid(format!("torus factor length must be positive, got {a}")));
            }
            check_radius(*radius)?;
            let base = BaseDescriptor::Torus { dim: 2 };
            let metric = MetricSpec::flat(vec![*a, 1.0], *radius)?;
            let domain = GaugeDomain::codisk(
                base.clone(),
                metric,
                format!("codisk bundle (radius {radius}) of flat metric on R/{a}Z x R/Z"),
            );
            let family = |name: &str, dir: f64| {
                let w = f64::from(winding);
                let base = base.clone();
                LoopFamily::new(
                    name,
                    ParamSpace::new(vec![ParamAxis::circle("v", 0.0, 1.0, grid.samples_per_axis)]),
                    move |p: &[f64]| {
                        let v = p[0];
                        Ok(Loop::with_velocity(
                            format!("orbit(v={v})"),
                            base.clone(),
                            move |t| BasePoint::new(vec![wrap_unit(dir * w * t), v], ChartId::Torus),
                            move |t| {
                                TangentVector::new(BasePoint::new(vec![wrap_unit(dir * w * t), v], ChartId::Torus), vec![dir * w, 0.0])
                            },
                        ))
                    },
                )
            };
            Ok(Scenario {
                id: format!("open_book(S^1,trivial,w={winding},a={a},r={radius})"),
                kind,
                grid,
                domain,
                families: vec![family("L+", 1.0), family("L-", -1.0)],
                targets: vec![TargetClass::point(), TargetClass::page()],
                bindings: open_book_bindings(("L+", "L-")),
                context: RuleContext::open_book(false),
                equalities: Vec::new(),
                notes: vec![
                    "T^2 as the open book with page S^1 and empty binding".into(),
                    "only the computed E/e sums are reported; no closed-form width is asserted for this torus".into(),
                ],
            })
        }
        _ => Err(invalid("page and domain specifications do not fit together".into())),
    }
}

fn ellipsoid2(n: usize, a: f64, radius: f64, grid: GridPlan) -> Result<Scenario> {
    if n < 3 {
        return Err(invalid(format!("two-plane ellipsoid needs n >= 3, got {n}")));
    }
    check_weight(a)?;
    check_radius(radius)?;
    let base = BaseDescriptor::Sphere { n };
    let metric = MetricSpec::ellipsoid(ellipsoid_weights(n, a, 4), radius)?;
    let domain = GaugeDomain::codisk(
        base.clone(),
        metric,
        format!("codisk bundle (radius {radius}) of ellipsoid metric with weight a = {a} on four coordinates"),
    );
    let m = n - 3;
    let (eta_samples, xi_samples) = (8, 8);
    let per = grid.per_axis(m, eta_samples * xi_samples);
    let mut axes: Vec<ParamAxis> = (0..m).map(|i| ParamAxis::interval(format!("x{i}"), -1.0, 1.0, per)).collect();
    axes.push(ParamAxis::interval("eta", 0.0, PI / 2.0, eta_samples));
    axes.push(ParamAxis::circle("xi", 0.0, 1.0, xi_samples));
    let family = LoopFamily::new("A", ParamSpace::new(axes), move |p: &[f64]| {
        let x = clamp_to_disk(&p[..m]);
        let w = (1.0 - x.iter().map(|c| c * c).sum::<f64>()).max(0.0).sqrt();
        let (eta, xi) = (p[m], p[m + 1]);
        let (r1, r2) = (w * eta.cos(), w * eta.sin());
        let point = {
            let x = x.clone();
            move |t: f64| {
                let (s1, c1) = (2.0 * PI * t).sin_cos();
                let (s2, c2) = (2.0 * PI * (xi + t)).sin_cos();
                let mut c = x.clone();
                c.extend([r1 * c1, r1 * s1, r2 * c2, r2 * s2]);
                BasePoint::new(c, ChartId::Sphere)
            }
        };
        let p2 = point.clone();
        Ok(Loop::with_velocity(
            format!("diag(x={x:?},eta={eta},xi={xi})"),
            BaseDescriptor::Sphere { n },
            point,
            move |t| {
                let (s1, c1) = (2.0 * PI * t).sin_cos();
                let (s2, c2) = (2.0 * PI * (xi + t)).sin_cos();
                let mut v = vec![0.0; m];
                let k = 2.0 * PI;
                v.extend([-k * r1 * s1, k * r1 * c1, -k * r2 * s2, k * r2 * c2]);
                TangentVector::new(p2(t), v)
            },
        ))
    })
    .with_note("supremum attained where the page coordinates vanish");
    let mut bindings = BTreeMap::new();
    bindings.insert("E_A".to_string(), BindingSelector { family: "A".into(), pick: Pick::Sup });
    let mut equalities = Vec::new();
    if radius == 1.0 {
        equalities.push(EqualityClaim {
            target: "[pt]".into(),
            statement: "Gr([pt], Ω_a) >= Gr([S^n], Ω_a) >= 2πa, from the round codisk bundle of radius a inside Ω_a".into(),
        });
    }
    Ok(Scenario {
        id: format!("ellipsoid2(n={n},a={a},r={radius})"),
        kind: ScenarioKind::Ellipsoid2 { n, a, radius },
        grid,
        domain,
        families: vec![family],
        targets: vec![TargetClass::point()],
        bindings,
        context: RuleContext::diagonal_action(true),
        equalities,
        notes: vec![
            "the diagonal action rotates both weighted planes; its orbits have length 2πa·w".into(),
            "the action is contracted to the trivial one through loops of length <= 2πa".into(),
        ],
    })
}

fn torus_loop(name: String, dim: usize, fixed: Vec<f64>, dir: f64, chart: ChartId) -> Loop {
    let base = BaseDescriptor::Torus { dim };
    let f2 = fixed.clone();
    let point = move |t: f64| {
        let mut c = fixed.clone();
        c.push(wrap_unit(dir * t));
        BasePoint::new(c, chart)
    };
    Loop::with_velocity(name, base, point, move |t: f64| {
        let mut c = f2.clone();
        c.push(wrap_unit(dir * t));
        let mut v = vec![0.0; dim];
        v[dim - 1] = dir;
        TangentVector::new(BasePoint::new(c, chart), v)
    })
}

fn product_torus(v: &FactorSpec, d: usize, k: usize, tdomain: &TorusDomain, grid: GridPlan) -> Result<Scenario> {
    if k == 0 || k >= d {
        return Err(invalid(format!("product torus needs 1 <= k < d, got k = {k}, d = {d}")));
    }
    let offset = usize::from(*v == FactorSpec::Circle);
    let dim = d + offset;
    let v_label = if offset == 1 { "S^1" } else { "pt" };
    let domain = match tdomain {
        TorusDomain::Flat { radius } => {
            check_radius(*radius)?;
            GaugeDomain::codisk(
                BaseDescriptor::Torus { dim },
                MetricSpec::flat(vec![1.0; dim], *radius)?,
                format!("codisk bundle (radius {radius}) of the unit flat metric on T^{dim}"),
            )
        }
        TorusDomain::Camel { eps, delta } => {
            if offset == 1 {
                return Err(invalid("the camel domain lives over a torus; use V = pt".into()));
            }
            GaugeDomain::camel(d, *eps, *delta)?
        }
    };

    let minus_free = offset + d - 1;
    let per = grid.per_axis(minus_free, 1);
    let mut minus_axes = Vec::new();
    if offset == 1 {
        minus_axes.push(ParamAxis::circle("v", 0.0, 1.0, per));
    }
    minus_axes.extend((1..d).map(|i| ParamAxis::circle(format!("x{i}"), 0.0, 1.0, per)));
    let minus = LoopFamily::new("L-", ParamSpace::new(minus_axes), move |p: &[f64]| {
        Ok(torus_loop(format!("L-{p:?}"), dim, p.to_vec(), -1.0, ChartId::Torus))
    });

    let plus_name = format!("L+^{k}");
    let plus_free = offset + d - k - 1;
    let per = grid.per_axis(plus_free, 1);
    let mut plus_axes = Vec::new();
    if offset == 1 {
        plus_axes.push(ParamAxis::circle("v", 0.0, 1.0, per));
    }
    plus_axes.extend((k + 1..d).map(|i| ParamAxis::circle(format!("x{i}"), 0.0, 1.0, per)));
    let pn = plus_name.clone();
    let plus = LoopFamily::new(plus_name.clone(), ParamSpace::new(plus_axes), move |p: &[f64]| {
        let mut fixed = p[..offset].to_vec();
        fixed.extend(std::iter::repeat_n(0.0, k));
        fixed.extend_from_slice(&p[offset..]);
        Ok(torus_loop(format!("{pn}{p:?}"), dim, fixed, 1.0, ChartId::TorusSlice { axis: offset }))
    });

    let mut bindings = BTreeMap::new();
    bindings.insert(sym_sup(Sign::Minus), BindingSelector { family: "L-".into(), pick: Pick::Sup });
    bindings.insert(format!("E_+^{k}"), BindingSelector { family: plus_name, pick: Pick::Sup });
    let id = match tdomain {
        TorusDomain::Flat { radius } => format!("product_torus(V={v_label},d={d},k={k},flat,r={radius})"),
        TorusDomain::Camel { eps, delta } => format!("product_torus(V={v_label},d={d},k={k},camel,eps={eps},delta={delta})"),
    };
    Ok(Scenario {
        id,
        kind: ScenarioKind::ProductTorus { v: v.clone(), d, k, domain: tdomain.clone() },
        grid,
        domain,
        families: vec![minus, plus],
        targets: vec![TargetClass::sub_torus(v_label, d, k)],
        bindings,
        context: RuleContext::product_torus(v_label, d, k),
        equalities: Vec::new(),
        notes: vec![format!("the + family lies on {{x_1 = .. = x_{k} = 0}} and is flagged as such in its chart")],
    })
}

fn camel(n: usize, eps: f64, delta: f64, grid: GridPlan) -> Result<Scenario> {
    GaugeDomain::camel(n, eps, delta)?;
    let mut s = product_torus(&FactorSpec::Point, n, 1, &TorusDomain::Camel { eps, delta }, grid)?;
    s.id = format!("camel(n={n},eps={eps},delta={delta})");
    s.kind = ScenarioKind::Camel { n, eps, delta };
    s.notes.push(format!("expected bound eps + 3 delta = {}", eps + 3.0 * delta));
    Ok(s)
}

fn klein(a: f64, b: f64, radius: f64, grid: GridPlan) -> Result<Scenario> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid(format!("Klein bottle needs a, b > 0, got a = {a}, b = {b}")));
    }
    check_radius(radius)?;
    let base = BaseDescriptor::KleinBottle { a, b };
    let domain = GaugeDomain::codisk(
        base.clone(),
        MetricSpec::flat(vec![1.0, 1.0], radius)?,
        format!("codisk bundle (radius {radius}) of the flat Klein bottle K({a}, {b})"),
    );
    let per = grid.per_axis(2, 1);
    let axes = vec![ParamAxis::circle("x0", 0.0, a, per), ParamAxis::circle("y0", 0.0, b, per)];
    let family = LoopFamily::new("L", ParamSpace::new(axes), move |p: &[f64]| {
        let (x0, y0) = (p[0], p[1]);
        // straight segment from (x0, y0) to its nearest orientation-reversing image
        let m = (2.0 * y0 / b).round();
        let dy = m * b - 2.0 * y0;
        Ok(Loop::from_lift(
            format!("straight(x0={x0},y0={y0})"),
            base.clone(),
            ChartId::Klein,
            move |t| vec![x0 + a * t, y0 + dy * t],
            move |_| vec![a, dy],
        ))
    })
    .with_note("straight loops only; for the flat metric they realize the infimum over orientation-reversing loops");
    let mut bindings = BTreeMap::new();
    bindings.insert("l(q)".to_string(), BindingSelector { family: "L".into(), pick: Pick::PairForwardAtInf });
    bindings.insert("l(qbar)".to_string(), BindingSelector { family: "L".into(), pick: Pick::PairReverseAtInf });
    bindings.insert("E".to_string(), BindingSelector { family: "L".into(), pick: Pick::PairInf });
    Ok(Scenario {
        id: format!("klein(a={a},b={b},r={radius})"),
        kind: ScenarioKind::Klein { a, b, radius },
        grid,
        domain,
        families: vec![family],
        targets: vec![TargetClass::surface()],
        bindings,
        context: RuleContext::non_orientable(),
        equalities: Vec::new(),
        notes: vec!["E is the least l(q) + l(rev q) over straight orientation-reversing loops".into()],
    })
}

/// Scenario with some axioms removed from its rule context.
pub fn without_axioms(s: Scenario, rules: &[RuleId]) -> Scenario {
    let mut ctx = s.context.clone();
    for r in rules {
        ctx = ctx.without_axiom(*r);
    }
    s.with_context(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::{extremal_lengths, RefineSpec};
    use crate::quadrature::QuadratureSpec;

    fn sup(s: &Scenario, fam: &str) -> f64 {
        extremal_lengths(&s.domain, s.family(fam).unwrap(), &QuadratureSpec::default(), &RefineSpec::default())
            .unwrap()
            .sup_value()
    }

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    #[test]
    fn ellipsoid_examples() {
        assert!(rel(sup(&ellipsoid_scenario(2, 0.3).unwrap(), "L+"), 0.6 * PI) < 1e-4);
        assert!(rel(sup(&ellipsoid_scenario(2, 1.0).unwrap(), "L+"), 2.0 * PI) < 1e-4);
        assert!(rel(sup(&ellipsoid_scenario(3, 0.5).unwrap(), "L+"), PI) < 1e-4);
    }

    #[test]
    fn ellipsoid2_examples() {
        assert!(rel(sup(&ellipsoid2_scenario(3, 0.4).unwrap(), "A"), 0.8 * PI) < 1e-4);
        assert!(rel(sup(&ellipsoid2_scenario(4, 1.0).unwrap(), "A"), 2.0 * PI) < 1e-4);
        for a in [0.1, 0.01, 0.001] {
            let e = sup(&ellipsoid2_scenario(3, a).unwrap(), "A");
            assert!(rel(e / a, 2.0 * PI) < 1e-4);
        }
    }

    #[test]
    fn open_book_examples() {
        let s2 = open_book_scenario(
            PageSpec::Disk { dim: 1 },
            ProfileSpec::Round,
            ActionSpec::Rotation { winding: 1 },
            OpenBookDomain::Ellipsoid { a: 1.0, radius: 1.0 },
        )
        .unwrap();
        assert_eq!(s2.domain.base, BaseDescriptor::Sphere { n: 2 });
        let t2 = open_book_scenario(
            PageSpec::Circle,
            ProfileSpec::Trivial,
            ActionSpec::Rotation { winding: 1 },
            OpenBookDomain::FlatTorus { a: 0.7, radius: 1.0 },
        )
        .unwrap();
        assert!(rel(sup(&t2, "L+"), 0.7) < 1e-9);
        assert!(rel(sup(&t2, "L-"), 0.7) < 1e-9);
        let r = extremal_lengths(&s2.domain, s2.family("L+").unwrap(), &QuadratureSpec::default(), &RefineSpec::default())
            .unwrap();
        assert_eq!(r.inf_value(), 0.0);
    }

    #[test]
    fn open_book_rejects_degenerate_profiles() {
        let bad = open_book_scenario(
            PageSpec::Disk { dim: 1 },
            ProfileSpec::Trivial,
            ActionSpec::Rotation { winding: 1 },
            OpenBookDomain::Ellipsoid { a: 1.0, radius: 1.0 },
        );
        assert!(matches!(bad, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn product_torus_examples() {
        let flat = product_torus_scenario(FactorSpec::Point, 2, 1, TorusDomain::Flat { radius: 1.0 }).unwrap();
        assert!(rel(sup(&flat, "L-"), 1.0) < 1e-9);
        assert!(rel(sup(&flat, "L+^1"), 1.0) < 1e-9);
        let c = camel_scenario(3, 0.4, 0.01).unwrap();
        assert!((sup(&c, "L-") - 0.21).abs() < 1e-9);
        assert!((sup(&c, "L+^1") - 0.22).abs() < 1e-9);
        let zero = product_torus_scenario(FactorSpec::Circle, 3, 2, TorusDomain::Flat { radius: 0.0 }).unwrap();
        assert_eq!(sup(&zero, "L-"), 0.0);
        assert!(product_torus_scenario(FactorSpec::Point, 2, 2, TorusDomain::Flat { radius: 1.0 }).is_err());
    }

    #[test]
    fn camel_rejects_bad_parameters() {
        assert!(camel_scenario(1, 0.4, 0.1).is_err());
        assert!(camel_scenario(2, 0.0, 0.1).is_err());
        assert!(camel_scenario(2, 0.4, -0.1).is_err());
    }

    #[test]
    fn klein_examples() {
        let s = klein_bottle_scenario(1.0, 1.0).unwrap();
        let quad = QuadratureSpec::default();
        let refine = RefineSpec::default().with_objective(Objective::WithReverse);
        let r = extremal_lengths(&s.domain, s.family("L").unwrap(), &quad, &refine).unwrap();
        assert!((r.inf_value() - 2.0).abs() < 1e-6);
        for lp in [[0.0, 0.0], [0.3, 0.2], [0.9, 0.77]] {
            s.family("L").unwrap().loop_at(&lp).unwrap().validate().unwrap();
        }
        assert!(klein_bottle_scenario(0.0, 1.0).is_err());
    }

    #[test]
    fn descriptors_round_trip_deterministically() {
        let kinds = [
            ScenarioKind::Ellipsoid1 { n: 2, a: 0.3, radius: 1.0 },
            ScenarioKind::Ellipsoid2 { n: 4, a: 0.4, radius: 1.0 },
            ScenarioKind::Camel { n: 2, eps: 0.4, delta: 0.01 },
            ScenarioKind::Klein { a: 0.5, b: 2.0, radius: 1.0 },
            ScenarioKind::ProductTorus { v: FactorSpec::Circle, d: 3, k: 1, domain: TorusDomain::Flat { radius: 2.0 } },
        ];
        for kind in kinds {
            let s = build(&kind, GridPlan::default()).unwrap();
            let json = serde_json::to_string(&s.descriptor()).unwrap();
            let back: ScenarioDescriptor = serde_json::from_str(&json).unwrap();
            let again = Scenario::from_descriptor(&back).unwrap();
            assert_eq!(serde_json::to_string(&again.descriptor()).unwrap(), json);
            assert_eq!(again.domain.metadata, s.domain.metadata);
            let grids: Vec<_> = s.families.iter().map(|f| f.params.clone()).collect();
            let grids2: Vec<_> = again.families.iter().map(|f| f.params.clone()).collect();
            assert_eq!(grids, grids2);
        }
    }

    #[test]
    fn high_dimensional_grids_are_capped() {
        let s = ellipsoid_scenario(5, 0.5).unwrap();
        assert!(s.family("L+").unwrap().params.grid_size() <= 4096);
    }
}
