//! Bound certificates: derivations of `𝔦(β) = Δ(α_1) ∗ ... ∗ Δ(α_k) ∗ 𝔦(α_{k+1})`
//! and an independent replay checker.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rules::{
    apply_rule, iota, sym_inf, sym_sup, Geometry, RuleContext, RuleId, BETA_FIBER, BETA_FUNDAMENTAL, BETA_PAGE,
    MANIFOLD, POINT,
};
use super::term::{FiltExpr, FilteredClass, Sign, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    /// A single ball, `N = pt`.
    Point,
    /// The zero section (the whole base).
    ZeroSection,
    /// A page of an open book.
    Page,
    /// A coordinate subtorus of dimension `k`.
    SubTorus { k: usize },
    /// The zero section of a closed surface.
    Surface,
}

/// A map `f: N -> Ω` together with the class `β` it pairs with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetClass {
    pub name: String,
    pub kind: TargetKind,
    /// Label of the cohomology class with nonzero mod 2 pairing against `f`.
    pub beta: String,
    pub note: String,
}

impl TargetClass {
    pub fn point() -> Self {
        Self {
            name: "[pt]".into(),
            kind: TargetKind::Point,
            beta: BETA_FUNDAMENTAL.into(),
            note: "a point pairs once with the fundamental class of T*M".into(),
        }
    }

    pub fn zero_section(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: TargetKind::ZeroSection,
            beta: BETA_FIBER.into(),
            note: "the zero section meets a cotangent fiber once".into(),
        }
    }

    pub fn page() -> Self {
        Self {
            name: "[V]".into(),
            kind: TargetKind::Page,
            beta: BETA_PAGE.into(),
            note: "a page meets the action orbit of a page point once".into(),
        }
    }

    pub fn sub_torus(v: &str, d: usize, k: usize) -> Self {
        Self {
            name: format!("[T^{k}]"),
            kind: TargetKind::SubTorus { k },
            beta: super::rules::product_beta(v, d, k),
            note: format!("x -> (v0, x_1..x_{k}, 0..0) meets {{x_1 = .. = x_{k} = 0}} once"),
        }
    }

    pub fn surface() -> Self {
        Self {
            name: "[Σ]".into(),
            kind: TargetKind::Surface,
            beta: BETA_FIBER.into(),
            note: "the zero section meets a cotangent fiber once".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub rule: RuleId,
    pub inputs: Vec<FilteredClass>,
    pub output: FilteredClass,
    /// Filtration guaranteed by the rule's statement.
    pub threshold: FiltExpr,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub label: String,
    pub beta: String,
    /// The `Δ(α_i)`.
    pub factors: Vec<FilteredClass>,
    /// The optional trailing `𝔦(α_{k+1})`.
    pub iota_factor: Option<FilteredClass>,
    pub steps: Vec<Step>,
    /// Final class; should be the constant loops representing `𝔦(β)`.
    pub conclusion: FilteredClass,
}

impl Derivation {
    /// `Σ` of the factor filtrations.
    pub fn filtration(&self) -> FiltExpr {
        self.factors.iter().chain(self.iota_factor.iter()).map(|f| f.filtration.clone()).sum()
    }
}

/// One or more derivations for the same target; the bound is the least of
/// their filtrations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub scenario_id: String,
    pub target: TargetClass,
    pub context: RuleContext,
    pub derivations: Vec<Derivation>,
    pub notes: Vec<String>,
}

impl Certificate {
    /// Numeric bound: the least derivation filtration under `bindings`.
    pub fn resolve(&self, bindings: &BTreeMap<String, f64>) -> Result<f64> {
        let mut best = f64::INFINITY;
        for d in &self.derivations {
            best = best.min(d.filtration().resolve(bindings)?);
        }
        Ok(best)
    }

    /// Every symbol appearing in a derivation filtration.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .derivations
            .iter()
            .flat_map(|d| d.filtration().symbols.into_keys())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

struct Builder<'a> {
    ctx: &'a RuleContext,
    steps: Vec<Step>,
}

impl<'a> Builder<'a> {
    fn apply(&mut self, rule: RuleId, inputs: Vec<FilteredClass>) -> Result<FilteredClass> {
        let app = apply_rule(rule, self.ctx, &inputs)?;
        self.steps.push(Step {
            rule,
            inputs,
            output: app.output.clone(),
            threshold: app.threshold,
            statement: rule.info().statement.to_string(),
        });
        Ok(app.output)
    }
}

fn factor(ctx: &RuleContext, term: Term) -> Result<FilteredClass> {
    let f = ctx
        .factor_threshold(&term)
        .ok_or_else(|| Error::UnresolvedBinding(format!("threshold of factor {term}")))?;
    Ok(FilteredClass::new(term, f))
}

fn delta_bv(g: &str, sign: Sign) -> Term {
    Term::delta_of(Term::bv_preimage(Term::action(g, sign)))
}

fn derivation(label: String, beta: &str, factors: Vec<FilteredClass>, iota_factor: Option<FilteredClass>, b: Builder, conclusion: FilteredClass) -> Derivation {
    Derivation { label, beta: beta.to_string(), factors, iota_factor, steps: b.steps, conclusion }
}

/// Derive the certificate of the bound for `target` from the scenario's
/// declared context.
pub fn derive_certificate(scenario_id: &str, ctx: &RuleContext, target: &TargetClass) -> Result<Certificate> {
    let unsupported = || Error::UnsupportedTarget { scenario: scenario_id.to_string(), target: target.name.clone() };
    let mut derivations = Vec::new();
    let mut notes = vec![
        "thresholds are sublevel sets {length < c}; reported values are suprema, so the bound is the infimum of admissible c".to_string(),
    ];
    match (&ctx.geometry, &target.kind) {
        (Geometry::OpenBook { .. }, TargetKind::Point) => {
            let mut b = Builder { ctx, steps: vec![] };
            let fp = factor(ctx, delta_bv(MANIFOLD, Sign::Plus))?;
            let fm = factor(ctx, delta_bv(MANIFOLD, Sign::Minus))?;
            let ap = b.apply(RuleId::ActionIsBv, vec![fp.clone()])?;
            let am = b.apply(RuleId::ActionIsBv, vec![fm.clone()])?;
            let c = b.apply(RuleId::Cs1, vec![ap, am])?;
            derivations.push(derivation("E_+ + E_-".into(), &target.beta, vec![fp, fm], None, b, c));
        }
        (Geometry::OpenBook { boundary: true }, TargetKind::ZeroSection) => {
            for s in [Sign::Plus, Sign::Minus] {
                let mut b = Builder { ctx, steps: vec![] };
                let f = factor(ctx, delta_bv(MANIFOLD, s))?;
                let i = iota(target.beta.clone());
                let a = b.apply(rule_for_bv(ctx, s), vec![f.clone()])?;
                let cst = b.apply(RuleId::IotaConst, vec![i.clone()])?;
                let at_pt = b.apply(RuleId::Cs2, vec![a, cst])?;
                let c = b.apply(RuleId::BindingContract, vec![at_pt])?;
                derivations.push(derivation(sym_sup(s), &target.beta, vec![f], Some(i), b, c));
            }
            notes.push("the point class is placed on the binding, where the action fixes it".into());
        }
        (Geometry::OpenBook { boundary: false }, TargetKind::Page) => {
            for s in [Sign::Plus, Sign::Minus] {
                let mut b = Builder { ctx, steps: vec![] };
                let fp = factor(ctx, Term::delta_of(Term::action(POINT, s)))?;
                let fo = factor(ctx, delta_bv(MANIFOLD, s.flip()))?;
                let orbit = b.apply(RuleId::Cs3, vec![fp.clone()])?;
                let whole = b.apply(RuleId::ActionIsBv, vec![fo.clone()])?;
                let c = b.apply(RuleId::Cs1, vec![orbit, whole])?;
                let label = format!("{} + {}", sym_inf(s), sym_sup(s.flip()));
                derivations.push(derivation(label, &target.beta, vec![fp, fo], None, b, c));
            }
            notes.push("the page point is chosen on a loop realizing the infimal length".into());
        }
        (Geometry::ProductTorus { .. }, TargetKind::SubTorus { k }) => {
            let (minus_slice, plus_slice) = product_slices(ctx)?;
            let mut b = Builder { ctx, steps: vec![] };
            let fm = factor(ctx, Term::delta_of(Term::action(minus_slice, Sign::Minus)))?;
            let fp = factor(ctx, Term::delta_of(Term::action(plus_slice, Sign::Plus)))?;
            let am = b.apply(RuleId::Cs3, vec![fm.clone()])?;
            let ap = b.apply(RuleId::Cs3, vec![fp.clone()])?;
            let c = b.apply(RuleId::Cs1, vec![ap, am])?;
            derivations.push(derivation(format!("E_- + E_+^{k}"), &target.beta, vec![fm, fp], None, b, c));
        }
        (Geometry::DiagonalAction, TargetKind::Point) => {
            let mut b = Builder { ctx, steps: vec![] };
            let f = factor(ctx, delta_bv(MANIFOLD, Sign::Plus))?;
            let i = iota(target.beta.clone());
            let a = b.apply(RuleId::ObBv2, vec![f.clone()])?;
            let cst = b.apply(RuleId::IotaConst, vec![i.clone()])?;
            let a = b.apply(RuleId::Cs2, vec![a, cst])?;
            let c = b.apply(RuleId::HopfContract, vec![a])?;
            derivations.push(derivation("E_A".into(), &target.beta, vec![f], Some(i), b, c));
            notes.push("the contraction threshold 2πa does not exceed E_A".into());
        }
        (Geometry::NonOrientableSurface, TargetKind::Surface) => {
            let mut b = Builder { ctx, steps: vec![] };
            let fq = factor(ctx, Term::delta_of(Term::single_loop("q", false)))?;
            let fr = factor(ctx, Term::delta_of(Term::single_loop("q", true)))?;
            let c = b.apply(RuleId::NonorientPair, vec![fq.clone(), fr.clone()])?;
            derivations.push(derivation("l(q) + l(qbar)".into(), &target.beta, vec![fq, fr], None, b, c));
            notes.push("q is an orientation-reversing loop; l(q), l(qbar) are taken where their sum is least".into());
        }
        _ => return Err(unsupported()),
    }
    Ok(Certificate {
        scenario_id: scenario_id.to_string(),
        target: target.clone(),
        context: ctx.clone(),
        derivations,
        notes,
    })
}

fn rule_for_bv(ctx: &RuleContext, s: Sign) -> RuleId {
    ctx.bv
        .iter()
        .find(|b| b.g == MANIFOLD && b.sign == s)
        .map_or(RuleId::ActionIsBv, |b| b.rule)
}

fn product_slices(ctx: &RuleContext) -> Result<(String, String)> {
    let minus = ctx
        .thresholds
        .iter()
        .find(|t| t.sign == Sign::Minus && t.g != MANIFOLD)
        .map(|t| t.g.clone());
    let plus = ctx
        .thresholds
        .iter()
        .find(|t| t.sign == Sign::Plus && ctx.lookup_rotation(&t.g).is_some())
        .map(|t| t.g.clone());
    match (minus, plus) {
        (Some(m), Some(p)) => Ok((m, p)),
        _ => Err(Error::UnresolvedBinding("product torus slices".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub derivation: String,
    pub step: Option<usize>,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

struct Recorder<'a> {
    label: &'a str,
    entries: Vec<CheckEntry>,
}

impl Recorder<'_> {
    fn record(&mut self, step: Option<usize>, check: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.entries.push(CheckEntry {
            derivation: self.label.to_string(),
            step,
            check: check.to_string(),
            passed,
            detail: detail.into(),
        });
        passed
    }
}

/// Replay every step from the rule table and recheck all filtrations and the
/// shape of each conclusion. Failures are report entries, not errors.
pub fn check_certificate(cert: &Certificate) -> CheckReport {
    let ctx = &cert.context;
    let mut entries = Vec::new();
    if cert.derivations.is_empty() {
        entries.push(CheckEntry {
            derivation: String::new(),
            step: None,
            check: "nonempty".into(),
            passed: false,
            detail: "certificate has no derivation".into(),
        });
    }
    for d in &cert.derivations {
        let mut r = Recorder { label: &d.label, entries: Vec::new() };
        r.record(
            None,
            "target pairing",
            d.beta == cert.target.beta,
            format!("derivation β = {}, target declares {}", d.beta, cert.target.beta),
        );
        for (i, f) in d.factors.iter().enumerate() {
            r.record(None, "factor is Δ-wrapped", f.term.is_delta(), format!("factor {i}: {}", f.term));
            let expected = ctx.factor_threshold(&f.term);
            r.record(
                None,
                "factor filtration",
                expected.as_ref() == Some(&f.filtration),
                format!("factor {i}: carries {}, context gives {:?}", f.filtration, expected.map(|e| e.to_string())),
            );
        }
        if let Some(i) = &d.iota_factor {
            let ok = matches!(&i.term, Term::Iota { class } if *class == d.beta) && i.filtration == FiltExpr::zero();
            r.record(None, "iota factor", ok, format!("{i}"));
        }

        let mut pool: Vec<FilteredClass> = d.factors.iter().chain(d.iota_factor.iter()).cloned().collect();
        for (k, step) in d.steps.iter().enumerate() {
            let mut available = true;
            for input in &step.inputs {
                if let Some(pos) = pool.iter().position(|p| p == input) {
                    pool.swap_remove(pos);
                } else {
                    available = false;
                }
            }
            r.record(Some(k), "inputs available", available, format!("{}", step.rule));
            match apply_rule(step.rule, ctx, &step.inputs) {
                Ok(app) => {
                    r.record(
                        Some(k),
                        "output term",
                        app.output.term == step.output.term,
                        format!("recorded {}, recomputed {}", step.output.term, app.output.term),
                    );
                    r.record(
                        Some(k),
                        "output filtration",
                        app.output.filtration == step.output.filtration,
                        format!("recorded {}, recomputed {}", step.output.filtration, app.output.filtration),
                    );
                    r.record(
                        Some(k),
                        "declared threshold",
                        app.threshold == step.threshold,
                        format!("recorded {}, rule gives {}", step.threshold, app.threshold),
                    );
                    r.record(
                        Some(k),
                        "soundness",
                        app.output.filtration.le(&app.threshold),
                        format!("{} <= {}", app.output.filtration, app.threshold),
                    );
                }
                Err(e) => {
                    r.record(Some(k), "rule applies", false, e.to_string());
                }
            }
            pool.push(step.output.clone());
        }
        r.record(
            None,
            "single result",
            pool.len() == 1 && pool[0] == d.conclusion,
            format!("{} class(es) left after replay", pool.len()),
        );
        let want = ctx.lookup_iota(&d.beta).map(Term::constant);
        r.record(
            None,
            "conclusion is 𝔦(β)",
            want.as_ref() == Some(&d.conclusion.term),
            format!("conclusion {}, 𝔦({}) is {:?}", d.conclusion.term, d.beta, want.map(|t| t.to_string())),
        );
        r.record(
            None,
            "conclusion filtration",
            d.conclusion.filtration == d.filtration(),
            format!("conclusion {}, factors sum to {}", d.conclusion.filtration, d.filtration()),
        );
        entries.extend(r.entries);
    }
    let passed = entries.iter().all(|e| e.passed);
    CheckReport { passed, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contexts() -> Vec<(RuleContext, TargetClass)> {
        vec![
            (RuleContext::open_book(true), TargetClass::point()),
            (RuleContext::open_book(true), TargetClass::zero_section("[S^2]")),
            (RuleContext::open_book(false), TargetClass::page()),
            (RuleContext::product_torus("pt", 2, 1), TargetClass::sub_torus("pt", 2, 1)),
            (RuleContext::diagonal_action(true), TargetClass::point()),
            (RuleContext::non_orientable(), TargetClass::surface()),
        ]
    }

    #[test]
    fn every_route_replays() {
        for (ctx, t) in contexts() {
            let cert = derive_certificate("s", &ctx, &t).unwrap();
            let report = check_certificate(&cert);
            assert!(report.passed, "{}: {:?}", t.name, report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn point_route_has_three_steps() {
        let cert = derive_certificate("s", &RuleContext::open_book(true), &TargetClass::point()).unwrap();
        let rules: Vec<RuleId> = cert.derivations[0].steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, vec![RuleId::ActionIsBv, RuleId::ActionIsBv, RuleId::Cs1]);
        assert_eq!(cert.derivations[0].filtration(), FiltExpr::symbol("E_+") + FiltExpr::symbol("E_-"));
    }

    #[test]
    fn zero_section_bound_is_the_minimum() {
        let cert = derive_certificate("s", &RuleContext::open_book(true), &TargetClass::zero_section("[M]")).unwrap();
        let mut b = BTreeMap::new();
        b.insert("E_+".to_string(), 2.0);
        b.insert("E_-".to_string(), 1.25);
        assert_eq!(cert.resolve(&b).unwrap(), 1.25);
    }

    #[test]
    fn tampered_filtration_fails_at_that_step() {
        let mut cert = derive_certificate("s", &RuleContext::open_book(true), &TargetClass::point()).unwrap();
        cert.derivations[0].steps[1].output.filtration = FiltExpr::value(0.1);
        let report = check_certificate(&cert);
        assert!(!report.passed);
        assert_eq!(report.failures().next().unwrap().step, Some(1));
    }

    #[test]
    fn unwrapped_factor_fails_the_shape_check() {
        let mut cert =
            derive_certificate("s", &RuleContext::product_torus("pt", 3, 1), &TargetClass::sub_torus("pt", 3, 1)).unwrap();
        let f = &mut cert.derivations[0].factors[0];
        if let Term::Delta { of } = &f.term {
            f.term = of.as_ref().clone();
        }
        let report = check_certificate(&cert);
        assert!(report.failures().any(|e| e.check == "factor is Δ-wrapped"));
    }

    #[test]
    fn missing_hopf_axiom_is_reported() {
        let ctx = RuleContext::diagonal_action(false);
        let err = derive_certificate("s", &ctx, &TargetClass::point()).unwrap_err();
        assert_eq!(err, Error::MissingAxiom(RuleId::HopfContract));
    }

    #[test]
    fn unsupported_targets_are_rejected() {
        let err = derive_certificate("s", &RuleContext::open_book(true), &TargetClass::page()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedTarget { .. }));
    }

    #[test]
    fn certificates_serialize() {
        for (ctx, t) in contexts() {
            let cert = derive_certificate("s", &ctx, &t).unwrap();
            let json = serde_json::to_string(&cert).unwrap();
            let back: Certificate = serde_json::from_str(&json).unwrap();
            assert_eq!(back, cert);
        }
    }
}
