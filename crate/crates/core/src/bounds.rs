//! From scenarios to numeric capacity bounds: resolve each symbolic
//! threshold through the extremal lengths of its family, then evaluate the
//! certificate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{camel_scenario, Pick, Scenario};
use crate::error::{Error, Result};
use crate::loops::{extremal_lengths, ExtremalLengthReport, Objective, RefineSpec};
use crate::quadrature::QuadratureSpec;
use crate::stralg::{check_certificate, derive_certificate, Certificate, Geometry, TargetClass, TargetKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundSettings {
    pub quad: QuadratureSpec,
    /// Evaluations per extremum during refinement.
    pub refine_budget: usize,
}

impl BoundSettings {
    pub fn new(quad: QuadratureSpec, refine_budget: usize) -> Self {
        Self { quad, refine_budget }
    }

    fn refine(&self, objective: Objective) -> RefineSpec {
        let budget = if self.refine_budget == 0 { RefineSpec::default().budget } else { self.refine_budget };
        RefineSpec { budget, objective }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericBinding {
    pub family: String,
    pub pick: Pick,
    pub refined: f64,
    pub grid: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityKnown {
    pub known: bool,
    pub statement: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityBound {
    pub scenario_id: String,
    pub target: TargetClass,
    /// The quantity bounded, e.g. `Gr([pt], Ω)`.
    pub gr_symbol: String,
    pub upper_bound: f64,
    /// The same bound evaluated with the unrefined grid extrema.
    pub grid_upper_bound: f64,
    /// Sum of the tolerances of the bindings used.
    pub tolerance: f64,
    pub equality: EqualityKnown,
    pub numeric_bindings: BTreeMap<String, NumericBinding>,
    pub certificate: Certificate,
    pub certificate_checked: bool,
}

/// Extremal-length reports computed once per (family, objective).
#[derive(Default)]
pub struct ReportCache {
    reports: BTreeMap<(String, bool), ExtremalLengthReport>,
}

impl ReportCache {
    pub fn get(&mut self, s: &Scenario, family: &str, objective: Objective, settings: &BoundSettings) -> Result<&ExtremalLengthReport> {
        let key = (family.to_string(), objective == Objective::WithReverse);
        if !self.reports.contains_key(&key) {
            let fam = s.family(family)?;
            let report = extremal_lengths(&s.domain, fam, &settings.quad, &settings.refine(objective))?;
            self.reports.insert(key.clone(), report);
        }
        Ok(&self.reports[&key])
    }

    pub fn reports(&self) -> impl Iterator<Item = &ExtremalLengthReport> {
        self.reports.values()
    }
}

pub fn resolve_binding(s: &Scenario, symbol: &str, settings: &BoundSettings, cache: &mut ReportCache) -> Result<NumericBinding> {
    let sel = s.bindings.get(symbol).ok_or_else(|| Error::UnresolvedBinding(symbol.to_string()))?;
    let report = cache.get(s, &sel.family, sel.pick.objective(), settings)?;
    let (refined, grid) = match sel.pick {
        Pick::Sup => (report.sup.value, report.sup.grid_value),
        Pick::Inf | Pick::PairInf => (report.inf.value, report.inf.grid_value),
        Pick::PairForwardAtInf => (report.inf.forward, report.inf.grid_forward),
        Pick::PairReverseAtInf => (
            report.inf.reverse.unwrap_or(f64::NAN),
            report.inf.grid_reverse.unwrap_or(f64::NAN),
        ),
    };
    Ok(NumericBinding { family: sel.family.clone(), pick: sel.pick, refined, grid, tolerance: report.tolerance })
}

/// Bound for one named target of the scenario.
pub fn bound_for_target(s: &Scenario, target: &TargetClass, settings: &BoundSettings, cache: &mut ReportCache) -> Result<CapacityBound> {
    let cert = derive_certificate(&s.id, &s.context, target)?;
    let check = check_certificate(&cert);
    let mut numeric = BTreeMap::new();
    for sym in cert.symbols() {
        let b = resolve_binding(s, &sym, settings, cache)?;
        numeric.insert(sym, b);
    }
    let refined: BTreeMap<String, f64> = numeric.iter().map(|(k, v)| (k.clone(), v.refined)).collect();
    let grid: BTreeMap<String, f64> = numeric.iter().map(|(k, v)| (k.clone(), v.grid)).collect();
    let upper_bound = cert.resolve(&refined)?;
    if !upper_bound.is_finite() {
        return Err(Error::NonFinite("resolved bound"));
    }
    let grid_upper_bound = cert.resolve(&grid)?;
    let tolerance = numeric.values().map(|b| b.tolerance).sum();
    let claim = s.equalities.iter().find(|c| c.target == target.name);
    Ok(CapacityBound {
        scenario_id: s.id.clone(),
        target: target.clone(),
        gr_symbol: format!("Gr({}, Ω)", target.name),
        upper_bound,
        grid_upper_bound,
        tolerance,
        equality: EqualityKnown { known: claim.is_some(), statement: claim.map(|c| c.statement.clone()) },
        numeric_bindings: numeric,
        certificate: cert,
        certificate_checked: check.passed,
    })
}

/// Bounds for every target the scenario declares.
pub fn compute_bounds(s: &Scenario, settings: &BoundSettings) -> Result<Vec<CapacityBound>> {
    let mut cache = ReportCache::default();
    s.targets.iter().map(|t| bound_for_target(s, t, settings, &mut cache)).collect()
}

/// `[pt] <= E_+ + E_-`, plus `[M] <= min(E_+, E_-)` when the page has
/// boundary, or `[V] <= min(E_+ + e_-, E_- + e_+)` when it does not.
pub fn bound_open_book(s: &Scenario, settings: &BoundSettings) -> Result<Vec<CapacityBound>> {
    if !matches!(s.context.geometry, Geometry::OpenBook { .. }) {
        return Err(Error::UnsupportedTarget { scenario: s.id.clone(), target: "open book bounds".into() });
    }
    compute_bounds(s, settings)
}

/// `[T^k] <= E_- + E_+^k`.
pub fn bound_product_torus(s: &Scenario, k: usize, settings: &BoundSettings) -> Result<CapacityBound> {
    let target = s
        .targets
        .iter()
        .find(|t| t.kind == TargetKind::SubTorus { k })
        .ok_or_else(|| Error::UnsupportedTarget { scenario: s.id.clone(), target: format!("[T^{k}]") })?;
    bound_for_target(s, target, settings, &mut ReportCache::default())
}

/// `[Σ] <= E = inf (l(q) + l(rev q))`.
pub fn bound_non_orientable(s: &Scenario, settings: &BoundSettings) -> Result<CapacityBound> {
    let target = s
        .targets
        .iter()
        .find(|t| t.kind == TargetKind::Surface)
        .ok_or_else(|| Error::UnsupportedTarget { scenario: s.id.clone(), target: "[Σ]".into() })?;
    bound_for_target(s, target, settings, &mut ReportCache::default())
}

/// `[pt] <= E_A`, through the Hopf-type contraction.
pub fn bound_ellipsoid2(s: &Scenario, settings: &BoundSettings) -> Result<CapacityBound> {
    if s.context.geometry != Geometry::DiagonalAction {
        return Err(Error::UnsupportedTarget { scenario: s.id.clone(), target: "[pt] via diagonal action".into() });
    }
    bound_for_target(s, &TargetClass::point(), settings, &mut ReportCache::default())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CamelRow {
    pub delta: f64,
    pub bound: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CamelLimitReport {
    pub n: usize,
    pub eps: f64,
    pub rows: Vec<CamelRow>,
    /// Polynomial extrapolation of the bounds to `delta = 0`.
    pub extrapolated: f64,
}

/// Value at 0 of the interpolating polynomial through `(x_i, y_i)`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Camel bounds `eps + 3 delta` over a grid of `delta`, extrapolated to 0.
pub fn camel_limit_report(n: usize, eps: f64, deltas: &[f64], settings: &BoundSettings) -> Result<CamelLimitReport> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("delta grid is empty".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {d}")));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let s = camel_scenario(n, eps, delta)?;
        let b = bound_product_torus(&s, 1, settings)?;
        rows.push(CamelRow { delta, bound: b.upper_bound, expected: eps + 3.0 * delta });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.bound).collect();
    let extrapolated = if rows.len() == 1 { ys[0] } else { neville_at_zero(&xs, &ys) };
    Ok(CamelLimitReport { n, eps, rows, extrapolated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{
        build, ellipsoid2_scenario, ellipsoid_scenario, klein_bottle_scenario, product_torus_scenario, without_axioms,
        ActionSpec, FactorSpec, GridPlan, OpenBookDomain, PageSpec, ProfileSpec, ScenarioKind, TorusDomain,
    };
    use crate::stralg::RuleId;
    use std::f64::consts::PI;

    fn settings() -> BoundSettings {
        BoundSettings::default()
    }

    fn by_name<'a>(bounds: &'a [CapacityBound], name: &str) -> &'a CapacityBound {
        bounds.iter().find(|b| b.target.name == name).unwrap()
    }

    #[test]
    fn ellipsoid_open_book_bounds() {
        let s = ellipsoid_scenario(2, 0.25).unwrap();
        let b = bound_open_book(&s, &settings()).unwrap();
        assert!(((by_name(&b, "[pt]").upper_bound - PI) / PI).abs() < 1e-4);
        let sphere = by_name(&b, "[S^2]");
        assert!(((sphere.upper_bound - PI / 2.0) / (PI / 2.0)).abs() < 1e-4);
        assert!(sphere.equality.known);
        assert!(!by_name(&b, "[pt]").equality.known);
        assert!(b.iter().all(|x| x.certificate_checked));
    }

    #[test]
    fn flat_torus_page_bound() {
        let a = 0.6;
        let s = build(
            &ScenarioKind::OpenBook {
                page: PageSpec::Circle,
                f: ProfileSpec::Trivial,
                action: ActionSpec::Rotation { winding: 1 },
                domain: OpenBookDomain::FlatTorus { a, radius: 1.0 },
            },
            GridPlan::default(),
        )
        .unwrap();
        let b = bound_open_book(&s, &settings()).unwrap();
        assert!((by_name(&b, "[V]").upper_bound - 2.0 * a).abs() < 1e-6);
        assert!((by_name(&b, "[pt]").upper_bound - 2.0 * a).abs() < 1e-6);
    }

    #[test]
    fn zero_radius_bounds_vanish() {
        let s = build(&ScenarioKind::Ellipsoid1 { n: 2, a: 0.5, radius: 0.0 }, GridPlan::default()).unwrap();
        for b in bound_open_book(&s, &settings()).unwrap() {
            assert_eq!(b.upper_bound, 0.0);
        }
    }

    #[test]
    fn product_torus_bounds() {
        let c = crate::catalog::camel_scenario(2, 0.4, 0.01).unwrap();
        assert!((bound_product_torus(&c, 1, &settings()).unwrap().upper_bound - 0.43).abs() < 1e-9);
        let c = crate::catalog::camel_scenario(3, 1.0, 0.1).unwrap();
        assert!((bound_product_torus(&c, 1, &settings()).unwrap().upper_bound - 1.3).abs() < 1e-9);
        let flat = product_torus_scenario(FactorSpec::Point, 2, 1, TorusDomain::Flat { radius: 1.0 }).unwrap();
        assert!((bound_product_torus(&flat, 1, &settings()).unwrap().upper_bound - 2.0).abs() < 1e-6);
        assert!(bound_product_torus(&flat, 2, &settings()).is_err());
    }

    #[test]
    fn klein_bounds_scale_with_radius() {
        for (a, b) in [(1.0, 1.0), (0.5, 2.0)] {
            let s = klein_bottle_scenario(a, b).unwrap();
            let bound = bound_non_orientable(&s, &settings()).unwrap();
            assert!((bound.upper_bound - 2.0 * a).abs() < 1e-6);
            let r = 1.7;
            let sr = build(&ScenarioKind::Klein { a, b, radius: r }, GridPlan::default()).unwrap();
            let br = bound_non_orientable(&sr, &settings()).unwrap();
            assert!((br.upper_bound - r * bound.upper_bound).abs() < 1e-6);
        }
    }

    #[test]
    fn ellipsoid2_bounds() {
        let s = ellipsoid2_scenario(3, 0.4).unwrap();
        let b = bound_ellipsoid2(&s, &settings()).unwrap();
        assert!(((b.upper_bound - 0.8 * PI) / (0.8 * PI)).abs() < 1e-4);
        assert!(b.equality.known);
        let s = ellipsoid2_scenario(4, 1.0).unwrap();
        assert!(((bound_ellipsoid2(&s, &settings()).unwrap().upper_bound - 2.0 * PI) / (2.0 * PI)).abs() < 1e-4);
    }

    #[test]
    fn ellipsoid2_is_linear_in_a() {
        let mut worst = 0.0f64;
        for i in 1..=10 {
            let a = i as f64 / 10.0;
            let b = bound_ellipsoid2(&ellipsoid2_scenario(3, a).unwrap(), &settings()).unwrap().upper_bound;
            worst = worst.max(((b / a) - 2.0 * PI).abs() / (2.0 * PI));
        }
        assert!(worst <= 1e-4);
    }

    #[test]
    fn missing_hopf_axiom_is_reported() {
        let s = without_axioms(ellipsoid2_scenario(3, 0.4).unwrap(), &[RuleId::HopfContract]);
        assert_eq!(bound_ellipsoid2(&s, &settings()).unwrap_err(), Error::MissingAxiom(RuleId::HopfContract));
    }

    #[test]
    fn camel_limit_examples() {
        let r = camel_limit_report(2, 0.4, &[0.1, 0.01, 0.001], &settings()).unwrap();
        for (row, want) in r.rows.iter().zip([0.7, 0.43, 0.403]) {
            assert!((row.bound - want).abs() < 1e-9);
        }
        assert!((r.extrapolated - 0.4).abs() < 1e-9);
        assert!(camel_limit_report(2, 1.0, &[0.0], &settings()).is_err());
        let r5 = camel_limit_report(5, 0.4, &[0.1, 0.01, 0.001], &settings()).unwrap();
        for (a, b) in r.rows.iter().zip(&r5.rows) {
            assert!((a.bound - b.bound).abs() < 1e-12);
        }
    }

    #[test]
    fn neville_is_exact_on_polynomials() {
        let xs = [0.1, 0.2, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-12);
    }
}
