//! The rewrite rules of the calculus and the scenario data they consult.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{FiltExpr, FilteredClass, Sign, Term};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleId {
    Cs1,
    Cs2,
    Cs3,
    ActionIsBv,
    ObBv2,
    HopfContract,
    StarComm,
    IotaConst,
    BindingContract,
    NonorientPair,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId::Cs1,
        RuleId::Cs2,
        RuleId::Cs3,
        RuleId::ActionIsBv,
        RuleId::ObBv2,
        RuleId::HopfContract,
        RuleId::StarComm,
        RuleId::IotaConst,
        RuleId::BindingContract,
        RuleId::NonorientPair,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Cs1 => "CS1",
            RuleId::Cs2 => "CS2",
            RuleId::Cs3 => "CS3",
            RuleId::ActionIsBv => "ACTION_IS_BV",
            RuleId::ObBv2 => "OB_BV2",
            RuleId::HopfContract => "HOPF_CONTRACT",
            RuleId::StarComm => "STAR_COMM",
            RuleId::IotaConst => "IOTA_CONST",
            RuleId::BindingContract => "BINDING_CONTRACT",
            RuleId::NonorientPair => "NONORIENT_PAIR",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.as_str().eq_ignore_ascii_case(s))
    }

    /// Rules that hold only when a scenario supplies them.
    pub fn is_axiom(self) -> bool {
        matches!(
            self,
            RuleId::ActionIsBv | RuleId::ObBv2 | RuleId::HopfContract | RuleId::BindingContract | RuleId::NonorientPair
        )
    }

    pub fn info(self) -> RuleInfo {
        let (name, statement) = match self {
            RuleId::Cs1 => (
                "product of opposite action classes",
                "[A_{g1,+}] ∗ [A_{g2,-}] = [g1 ∩ g2] in Λ_c, c > E_{g1,+} + E_{g2,-}",
            ),
            RuleId::Cs2 => (
                "action class times a cycle of constant loops",
                "[A_{g1,±}] ∗ [g2] = [A_{g1 ∩ g2,±}] in Λ_c, c > E_{g1,±}",
            ),
            RuleId::Cs3 => ("loop rotation of an action class", "Δ[A_{g,±}] = [A_{ζg,±}] in Λ_c, c > E_{g,±}"),
            RuleId::ActionIsBv => (
                "action class of the whole manifold is a BV image (open books)",
                "Δ[B_±] = [A_±] in Λ_c, c > E_±",
            ),
            RuleId::ObBv2 => (
                "diagonal action class is a BV image (two-plane open books)",
                "Δ[D_θ] = [C_θ] in Λ_c, c > E_θ",
            ),
            RuleId::HopfContract => (
                "Hopf-type action contracts through short loops",
                "[A_θ] = [M] in Λ_c, c > 2πa, the action being homotopic to the trivial one through loops of length ≤ 2πa",
            ),
            RuleId::StarComm => ("commutativity of ∗", "α1 ∗ α2 = α2 ∗ α1"),
            RuleId::IotaConst => ("constant-loop inclusion", "𝔦(β) = [constant loops over the cycle dual to β], any c > 0"),
            RuleId::BindingContract => (
                "action orbits through a binding point are constant",
                "[A_{pt,±}] = [pt] in Λ_c for pt on the binding, c > 0",
            ),
            RuleId::NonorientPair => (
                "orientation-reversing loop and its reverse",
                "Δ(q) ∗ Δ(q̄) = [pt] in Λ_c, c > l(q) + l(q̄)",
            ),
        };
        RuleInfo { id: self, name, statement }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuleInfo {
    pub id: RuleId,
    pub name: &'static str,
    pub statement: &'static str,
}

/// Which family of derivations a context supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// Open book with trivial monodromy; `boundary` is whether the page has
    /// nonempty boundary.
    OpenBook { boundary: bool },
    /// `V x T^d` with the loops of the last circle factor; `k` is the
    /// dimension of the target subtorus.
    ProductTorus { d: usize, k: usize },
    /// Open book whose circle action rotates two complex planes at once.
    DiagonalAction,
    NonOrientableSurface,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub left: String,
    pub right: String,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub cycle: String,
    pub swept: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IotaEntry {
    pub beta: String,
    pub cycle: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionThreshold {
    pub g: String,
    pub sign: Sign,
    pub filtration: FiltExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvAxiom {
    pub g: String,
    pub sign: Sign,
    pub rule: RuleId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    pub g: String,
    pub sign: Sign,
    pub cycle: String,
    pub rule: RuleId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopThreshold {
    pub label: String,
    pub reversed: bool,
    pub filtration: FiltExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairContraction {
    pub label: String,
    pub cycle: String,
}

/// Everything a scenario declares about its labels: intersections, loop
/// rotations, constant-loop duals, thresholds and which axioms hold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleContext {
    pub geometry: Geometry,
    pub axioms: BTreeSet<RuleId>,
    pub intersections: Vec<Intersection>,
    pub rotations: Vec<Rotation>,
    pub iota: Vec<IotaEntry>,
    pub thresholds: Vec<ActionThreshold>,
    pub bv: Vec<BvAxiom>,
    pub contractions: Vec<Contraction>,
    pub loops: Vec<LoopThreshold>,
    pub pairs: Vec<PairContraction>,
}

pub const MANIFOLD: &str = "M";
pub const POINT: &str = "pt";
pub const ORBIT: &str = "ζpt";
pub const BETA_FUNDAMENTAL: &str = "PD(T*M)";
pub const BETA_FIBER: &str = "T*M_pt";
pub const BETA_PAGE: &str = "PD[V]";

pub fn sym_sup(sign: Sign) -> String {
    format!("E_{}", sign.symbol())
}

pub fn sym_inf(sign: Sign) -> String {
    format!("e_{}", sign.symbol())
}

impl RuleContext {
    fn empty(geometry: Geometry) -> Self {
        Self {
            geometry,
            axioms: BTreeSet::new(),
            intersections: Vec::new(),
            rotations: Vec::new(),
            iota: Vec::new(),
            thresholds: Vec::new(),
            bv: Vec::new(),
            contractions: Vec::new(),
            loops: Vec::new(),
            pairs: Vec::new(),
        }
    }

    fn intersect(&mut self, l: &str, r: &str, result: &str) {
        self.intersections.push(Intersection { left: l.into(), right: r.into(), result: result.into() });
    }

    fn threshold(&mut self, g: &str, sign: Sign, f: FiltExpr) {
        self.thresholds.push(ActionThreshold { g: g.into(), sign, filtration: f });
    }

    fn map_iota(&mut self, beta: &str, cycle: &str) {
        self.iota.push(IotaEntry { beta: beta.into(), cycle: cycle.into() });
    }

    /// Open book with trivial monodromy and page rotation action.
    pub fn open_book(boundary: bool) -> Self {
        let mut c = Self::empty(Geometry::OpenBook { boundary });
        c.axioms.insert(RuleId::ActionIsBv);
        c.intersect(MANIFOLD, MANIFOLD, MANIFOLD);
        c.intersect(MANIFOLD, POINT, POINT);
        c.intersect(MANIFOLD, ORBIT, ORBIT);
        c.rotations.push(Rotation { cycle: POINT.into(), swept: ORBIT.into() });
        c.map_iota(BETA_FUNDAMENTAL, MANIFOLD);
        c.map_iota(BETA_FIBER, POINT);
        c.map_iota(BETA_PAGE, ORBIT);
        for s in [Sign::Plus, Sign::Minus] {
            c.threshold(MANIFOLD, s, FiltExpr::symbol(sym_sup(s)));
            c.threshold(POINT, s, FiltExpr::symbol(sym_inf(s)));
            c.threshold(ORBIT, s, FiltExpr::symbol(sym_inf(s)));
            c.bv.push(BvAxiom { g: MANIFOLD.into(), sign: s, rule: RuleId::ActionIsBv });
        }
        if boundary {
            c.axioms.insert(RuleId::BindingContract);
            for s in [Sign::Plus, Sign::Minus] {
                c.contractions.push(Contraction { g: POINT.into(), sign: s, cycle: POINT.into(), rule: RuleId::BindingContract });
            }
        }
        c
    }

    /// Open book whose action rotates two planes; `hopf` registers the
    /// contraction of the action class through short loops.
    pub fn diagonal_action(hopf: bool) -> Self {
        let mut c = Self::empty(Geometry::DiagonalAction);
        c.axioms.insert(RuleId::ObBv2);
        c.intersect(MANIFOLD, MANIFOLD, MANIFOLD);
        c.map_iota(BETA_FUNDAMENTAL, MANIFOLD);
        c.threshold(MANIFOLD, Sign::Plus, FiltExpr::symbol("E_A"));
        c.bv.push(BvAxiom { g: MANIFOLD.into(), sign: Sign::Plus, rule: RuleId::ObBv2 });
        c.contractions.push(Contraction {
            g: MANIFOLD.into(),
            sign: Sign::Plus,
            cycle: MANIFOLD.into(),
            rule: RuleId::HopfContract,
        });
        if hopf {
            c.axioms.insert(RuleId::HopfContract);
        }
        c
    }

    /// `V x T^d`: the `-` family sweeps `{x_d = 0}`, the `+` family sweeps
    /// `{x_1 = ... = x_k = x_d = 0}`.
    pub fn product_torus(v: &str, d: usize, k: usize) -> Self {
        let mut c = Self::empty(Geometry::ProductTorus { d, k });
        let minus_slice = product_minus_slice(v, d);
        let plus_slice = format!("{v}×0^{k}×T^{}", d - k - 1);
        let plus_swept = product_plus_swept(v, d, k);
        c.rotations.push(Rotation { cycle: minus_slice.clone(), swept: MANIFOLD.into() });
        c.rotations.push(Rotation { cycle: plus_slice.clone(), swept: plus_swept.clone() });
        c.intersect(&plus_swept, MANIFOLD, &plus_swept);
        c.intersect(MANIFOLD, MANIFOLD, MANIFOLD);
        let minus = FiltExpr::symbol(sym_sup(Sign::Minus));
        let plus = FiltExpr::symbol(format!("E_+^{k}"));
        c.threshold(&minus_slice, Sign::Minus, minus.clone());
        c.threshold(MANIFOLD, Sign::Minus, minus);
        c.threshold(&plus_slice, Sign::Plus, plus.clone());
        c.threshold(&plus_swept, Sign::Plus, plus);
        c.map_iota(&product_beta(v, d, k), &plus_swept);
        c
    }

    /// Surface with an orientation-reversing loop `q`.
    pub fn non_orientable() -> Self {
        let mut c = Self::empty(Geometry::NonOrientableSurface);
        c.axioms.insert(RuleId::NonorientPair);
        c.loops.push(LoopThreshold { label: "q".into(), reversed: false, filtration: FiltExpr::symbol("l(q)") });
        c.loops.push(LoopThreshold { label: "q".into(), reversed: true, filtration: FiltExpr::symbol("l(qbar)") });
        c.pairs.push(PairContraction { label: "q".into(), cycle: POINT.into() });
        c.map_iota(BETA_FIBER, POINT);
        c
    }

    pub fn without_axiom(mut self, rule: RuleId) -> Self {
        self.axioms.remove(&rule);
        self
    }

    pub fn lookup_intersection(&self, a: &str, b: &str) -> Option<&str> {
        self.intersections
            .iter()
            .find(|i| (i.left == a && i.right == b) || (i.left == b && i.right == a))
            .map(|i| i.result.as_str())
    }

    pub fn lookup_rotation(&self, g: &str) -> Option<&str> {
        self.rotations.iter().find(|r| r.cycle == g).map(|r| r.swept.as_str())
    }

    pub fn lookup_iota(&self, beta: &str) -> Option<&str> {
        self.iota.iter().find(|e| e.beta == beta).map(|e| e.cycle.as_str())
    }

    pub fn action_threshold(&self, g: &str, sign: Sign) -> Option<&FiltExpr> {
        self.thresholds.iter().find(|t| t.g == g && t.sign == sign).map(|t| &t.filtration)
    }

    pub fn loop_threshold(&self, label: &str, reversed: bool) -> Option<&FiltExpr> {
        self.loops.iter().find(|l| l.label == label && l.reversed == reversed).map(|l| &l.filtration)
    }

    /// Filtration a factor `Δ(α)` of a conclusion is expected to carry.
    pub fn factor_threshold(&self, term: &Term) -> Option<FiltExpr> {
        match term {
            Term::Delta { of } => match of.as_ref() {
                Term::Action { g, sign } => self.action_threshold(g, *sign).cloned(),
                Term::BvPreimage { of } => match of.as_ref() {
                    Term::Action { g, sign } => self.action_threshold(g, *sign).cloned(),
                    _ => None,
                },
                Term::SingleLoop { label, reversed } => self.loop_threshold(label, *reversed).cloned(),
                _ => None,
            },
            Term::Iota { .. } => Some(FiltExpr::zero()),
            _ => None,
        }
    }

    fn require(&self, rule: RuleId) -> Result<()> {
        if rule.is_axiom() && !self.axioms.contains(&rule) {
            return Err(Error::MissingAxiom(rule));
        }
        Ok(())
    }

    fn need_threshold(&self, rule: RuleId, g: &str, sign: Sign) -> Result<FiltExpr> {
        self.action_threshold(g, sign).cloned().ok_or_else(|| Error::RuleMismatch {
            rule,
            reason: format!("no threshold declared for [A_{{{g},{}}}]", sign.symbol()),
        })
    }
}

pub(crate) fn product_minus_slice(v: &str, d: usize) -> String {
    format!("{v}×T^{}", d - 1)
}

pub(crate) fn product_plus_swept(v: &str, d: usize, k: usize) -> String {
    format!("{v}×0^{k}×T^{}", d - k)
}

pub fn product_beta(v: &str, d: usize, k: usize) -> String {
    format!("PD[{}]", product_plus_swept(v, d, k))
}

/// Result of one rule application: the rewritten class and the threshold
/// the rule's statement guarantees.
#[derive(Clone, Debug, PartialEq)]
pub struct Application {
    pub output: FilteredClass,
    pub threshold: FiltExpr,
}

fn mismatch(rule: RuleId, inputs: &[FilteredClass]) -> Error {
    let shown: Vec<String> = inputs.iter().map(|c| c.term.to_string()).collect();
    Error::RuleMismatch { rule, reason: format!("pattern does not match inputs [{}]", shown.join(", ")) }
}

fn sum_filtration(inputs: &[FilteredClass]) -> FiltExpr {
    inputs.iter().map(|c| c.filtration.clone()).sum()
}

fn bump(dim: Option<u32>) -> Option<u32> {
    dim.map(|d| d + 1)
}

/// Apply `rule` to `inputs` under `ctx`.
pub fn apply_rule(rule: RuleId, ctx: &RuleContext, inputs: &[FilteredClass]) -> Result<Application> {
    ctx.require(rule)?;
    let filtration = sum_filtration(inputs);
    match rule {
        RuleId::Cs1 => {
            let [a, b] = inputs else { return Err(mismatch(rule, inputs)) };
            let (plus, minus) = match (&a.term, &b.term) {
                (Term::Action { g: g1, sign: Sign::Plus }, Term::Action { g: g2, sign: Sign::Minus }) => (g1, g2),
                (Term::Action { g: g2, sign: Sign::Minus }, Term::Action { g: g1, sign: Sign::Plus }) => (g1, g2),
                _ => return Err(mismatch(rule, inputs)),
            };
            let meet = ctx.lookup_intersection(plus, minus).ok_or_else(|| Error::RuleMismatch {
                rule,
                reason: format!("no transverse intersection declared for {plus} and {minus}"),
            })?;
            let threshold = ctx.need_threshold(rule, plus, Sign::Plus)? + ctx.need_threshold(rule, minus, Sign::Minus)?;
            Ok(Application { output: FilteredClass::new(Term::constant(meet), filtration), threshold })
        }
        RuleId::Cs2 => {
            let [a, b] = inputs else { return Err(mismatch(rule, inputs)) };
            let (g1, sign, g2) = match (&a.term, &b.term) {
                (Term::Action { g, sign }, Term::Constant { cycle }) | (Term::Constant { cycle }, Term::Action { g, sign }) => {
                    (g, *sign, cycle)
                }
                _ => return Err(mismatch(rule, inputs)),
            };
            let meet = ctx.lookup_intersection(g1, g2).ok_or_else(|| Error::RuleMismatch {
                rule,
                reason: format!("no transverse intersection declared for {g1} and {g2}"),
            })?;
            let threshold = ctx.need_threshold(rule, g1, sign)?;
            Ok(Application { output: FilteredClass::new(Term::action(meet, sign), filtration), threshold })
        }
        RuleId::Cs3 => {
            let [a] = inputs else { return Err(mismatch(rule, inputs)) };
            let Term::Delta { of } = &a.term else { return Err(mismatch(rule, inputs)) };
            let Term::Action { g, sign } = of.as_ref() else { return Err(mismatch(rule, inputs)) };
            let swept = ctx.lookup_rotation(g).ok_or_else(|| Error::RuleMismatch {
                rule,
                reason: format!("no rotation image declared for {g}"),
            })?;
            let threshold = ctx.need_threshold(rule, g, *sign)?;
            Ok(Application {
                output: FilteredClass { term: Term::action(swept, *sign), filtration, param_dim: a.param_dim },
                threshold,
            })
        }
        RuleId::ActionIsBv | RuleId::ObBv2 => {
            let [a] = inputs else { return Err(mismatch(rule, inputs)) };
            let Term::Delta { of } = &a.term else { return Err(mismatch(rule, inputs)) };
            let Term::BvPreimage { of: inner } = of.as_ref() else { return Err(mismatch(rule, inputs)) };
            let Term::Action { g, sign } = inner.as_ref() else { return Err(mismatch(rule, inputs)) };
            if !ctx.bv.iter().any(|b| &b.g == g && b.sign == *sign && b.rule == rule) {
                return Err(Error::RuleMismatch {
                    rule,
                    reason: format!("scenario does not declare {} as a BV image under {rule}", inner),
                });
            }
            let threshold = ctx.need_threshold(rule, g, *sign)?;
            Ok(Application {
                output: FilteredClass { term: inner.as_ref().clone(), filtration, param_dim: a.param_dim },
                threshold,
            })
        }
        RuleId::HopfContract | RuleId::BindingContract => {
            let [a] = inputs else { return Err(mismatch(rule, inputs)) };
            let Term::Action { g, sign } = &a.term else { return Err(mismatch(rule, inputs)) };
            let c = ctx
                .contractions
                .iter()
                .find(|c| &c.g == g && c.sign == *sign && c.rule == rule)
                .ok_or_else(|| Error::RuleMismatch { rule, reason: format!("no contraction declared for {}", a.term) })?;
            // the binding contraction holds at every positive level
            let threshold = match rule {
                RuleId::BindingContract => filtration.clone(),
                _ => ctx.need_threshold(rule, g, *sign)?,
            };
            Ok(Application { output: FilteredClass::new(Term::constant(c.cycle.clone()), filtration), threshold })
        }
        RuleId::IotaConst => {
            let [a] = inputs else { return Err(mismatch(rule, inputs)) };
            let Term::Iota { class } = &a.term else { return Err(mismatch(rule, inputs)) };
            let cycle = ctx.lookup_iota(class).ok_or_else(|| Error::RuleMismatch {
                rule,
                reason: format!("no dual cycle declared for {class}"),
            })?;
            Ok(Application { output: FilteredClass::new(Term::constant(cycle), filtration), threshold: FiltExpr::zero() })
        }
        RuleId::StarComm => {
            if inputs.len() < 2 {
                return Err(mismatch(rule, inputs));
            }
            let term = Term::star_of(inputs.iter().map(|c| c.term.clone()));
            let threshold = filtration.clone();
            Ok(Application { output: FilteredClass::new(term, filtration), threshold })
        }
        RuleId::NonorientPair => {
            let [a, b] = inputs else { return Err(mismatch(rule, inputs)) };
            let label_of = |c: &FilteredClass| match &c.term {
                Term::Delta { of } => match of.as_ref() {
                    Term::SingleLoop { label, reversed } => Some((label.clone(), *reversed)),
                    _ => None,
                },
                _ => None,
            };
            let (Some((la, ra)), Some((lb, rb))) = (label_of(a), label_of(b)) else {
                return Err(mismatch(rule, inputs));
            };
            if la != lb || ra == rb {
                return Err(mismatch(rule, inputs));
            }
            let pair = ctx.pairs.iter().find(|p| p.label == la).ok_or_else(|| Error::RuleMismatch {
                rule,
                reason: format!("{la} is not declared orientation reversing"),
            })?;
            let need = |rev: bool| {
                ctx.loop_threshold(&la, rev).cloned().ok_or_else(|| Error::RuleMismatch {
                    rule,
                    reason: format!("no length threshold declared for {la}"),
                })
            };
            let threshold = need(false)? + need(true)?;
            Ok(Application { output: FilteredClass::new(Term::constant(pair.cycle.clone()), filtration), threshold })
        }
    }
}

/// `Δ`: wraps the class, rewriting at once by CS3 on action classes and by
/// a registered BV axiom on BV preimages.
pub fn delta(ctx: &RuleContext, c: &FilteredClass) -> FilteredClass {
    let wrapped = FilteredClass {
        term: Term::delta_of(c.term.clone()),
        filtration: c.filtration.clone(),
        param_dim: bump(c.param_dim),
    };
    let rule = match &c.term {
        Term::Action { .. } => Some(RuleId::Cs3),
        Term::BvPreimage { .. } => ctx
            .bv
            .iter()
            .find(|b| matches!(&c.term, Term::BvPreimage { of } if **of == Term::action(b.g.clone(), b.sign)))
            .map(|b| b.rule),
        _ => None,
    };
    match rule.and_then(|r| apply_rule(r, ctx, std::slice::from_ref(&wrapped)).ok()) {
        Some(app) => app.output,
        None => wrapped,
    }
}

/// `∗`: adds filtrations; CS1 or CS2 is applied when the two factors match
/// their patterns, otherwise the canonical product is returned.
pub fn star(ctx: &RuleContext, a: &FilteredClass, b: &FilteredClass) -> Result<FilteredClass> {
    let pair = [a.clone(), b.clone()];
    let rule = match (&a.term, &b.term) {
        (Term::Action { sign: s1, .. }, Term::Action { sign: s2, .. }) if s1 != s2 => Some(RuleId::Cs1),
        (Term::Action { .. }, Term::Constant { .. }) | (Term::Constant { .. }, Term::Action { .. }) => Some(RuleId::Cs2),
        _ => None,
    };
    if let Some(rule) = rule {
        return Ok(apply_rule(rule, ctx, &pair)?.output);
    }
    let param_dim = match (a.param_dim, b.param_dim) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    Ok(FilteredClass {
        term: Term::star_of([a.term.clone(), b.term.clone()]),
        filtration: &a.filtration + &b.filtration,
        param_dim,
    })
}

/// `𝔦(β)`: constant loops, present at every positive filtration.
pub fn iota(beta: impl Into<String>) -> FilteredClass {
    FilteredClass::new(Term::iota(beta), FiltExpr::zero())
}
