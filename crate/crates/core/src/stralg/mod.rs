//! Filtered string-topology calculus on labelled classes.
//!
//! Classes are symbolic terms carrying a length filtration. The operations
//! `∗`, `Δ` and `𝔦` act on them and the identities between action classes
//! are rewrite rules. A derivation ending in the constant loops `𝔦(β)` is a
//! [`Certificate`] whose filtration bounds the parametric Gromov width.

mod certificate;
mod rules;
mod term;

pub use certificate::{
    check_certificate, derive_certificate, Certificate, CheckEntry, CheckReport, Derivation, Step, TargetClass,
    TargetKind,
};
pub use rules::{
    apply_rule, delta, iota, product_beta, star, sym_inf, sym_sup, ActionThreshold, Application, BvAxiom, Contraction,
    Geometry, Intersection, IotaEntry, LoopThreshold, PairContraction, Rotation, RuleContext, RuleId, RuleInfo,
    BETA_FIBER, BETA_FUNDAMENTAL, BETA_PAGE, MANIFOLD, ORBIT, POINT,
};
pub use term::{FiltExpr, FilteredClass, Sign, Term};
