//! Terms of the filtered loop-space calculus and their length filtrations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// A loop-space class, up to the identities of the calculus.
///
/// Bordism and cohomology classes are opaque labels; their intersections
/// are looked up in a [`RuleContext`](super::RuleContext).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    /// `[A_{g,±}]`: the circle action applied to the cycle `g`.
    Action { g: String, sign: Sign },
    /// Constant loops over a cycle.
    Constant { cycle: String },
    /// A class `B` with `Δ B` equal to the wrapped term.
    BvPreimage { of: Box<Term> },
    /// `𝔦(β)`.
    Iota { class: String },
    /// A single loop (a 0-parameter family), possibly reversed.
    SingleLoop { label: String, reversed: bool },
    /// A ∗-product, flattened with factors in canonical order.
    Star { factors: Vec<Term> },
    Delta { of: Box<Term> },
}

impl Term {
    pub fn action(g: impl Into<String>, sign: Sign) -> Self {
        Term::Action { g: g.into(), sign }
    }

    pub fn constant(cycle: impl Into<String>) -> Self {
        Term::Constant { cycle: cycle.into() }
    }

    pub fn iota(class: impl Into<String>) -> Self {
        Term::Iota { class: class.into() }
    }

    pub fn bv_preimage(of: Term) -> Self {
        Term::BvPreimage { of: Box::new(of) }
    }

    pub fn delta_of(of: Term) -> Self {
        Term::Delta { of: Box::new(of) }
    }

    pub fn single_loop(label: impl Into<String>, reversed: bool) -> Self {
        Term::SingleLoop { label: label.into(), reversed }
    }

    /// Canonical product: nested products are flattened and the factors
    /// sorted, so `star(a, b) == star(b, a)`.
    pub fn star_of(factors: impl IntoIterator<Item = Term>) -> Self {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                Term::Star { factors } => flat.extend(factors),
                other => flat.push(other),
            }
        }
        flat.sort();
        Term::Star { factors: flat }
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, Term::Delta { .. })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Action { g, sign } => write!(f, "[A_{{{g},{}}}]", sign.symbol()),
            Term::Constant { cycle } => write!(f, "[{cycle}]"),
            Term::BvPreimage { of } => write!(f, "B({of})"),
            Term::Iota { class } => write!(f, "𝔦({class})"),
            Term::SingleLoop { label, reversed } => {
                if *reversed {
                    write!(f, "rev({label})")
                } else {
                    f.write_str(label)
                }
            }
            Term::Star { factors } => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ∗ ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            Term::Delta { of } => write!(f, "Δ({of})"),
        }
    }
}

/// `constant + Σ multiplicity · symbol`, with symbols standing for
/// nonnegative lengths bound later by a scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FiltExpr {
    pub constant: f64,
    pub symbols: BTreeMap<String, u32>,
}

impl FiltExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn value(c: f64) -> Self {
        Self { constant: c, symbols: BTreeMap::new() }
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        let mut symbols = BTreeMap::new();
        symbols.insert(name.into(), 1);
        Self { constant: 0.0, symbols }
    }

    pub fn is_numeric(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbolic comparison: `self <= other` for every nonnegative binding.
    pub fn le(&self, other: &FiltExpr) -> bool {
        if self.constant > other.constant {
            return false;
        }
        self.symbols.iter().all(|(s, m)| other.symbols.get(s).is_some_and(|o| o >= m))
    }

    pub fn resolve(&self, bindings: &BTreeMap<String, f64>) -> Result<f64> {
        let mut total = self.constant;
        for (s, m) in &self.symbols {
            let v = bindings.get(s).ok_or_else(|| Error::UnresolvedBinding(s.clone()))?;
            total += f64::from(*m) * v;
        }
        Ok(total)
    }
}

impl Add for FiltExpr {
    type Output = FiltExpr;

    fn add(mut self, rhs: FiltExpr) -> FiltExpr {
        self.constant += rhs.constant;
        for (s, m) in rhs.symbols {
            *self.symbols.entry(s).or_insert(0) += m;
        }
        self
    }
}

impl<'a> Add<&'a FiltExpr> for &'a FiltExpr {
    type Output = FiltExpr;

    fn add(self, rhs: &FiltExpr) -> FiltExpr {
        self.clone() + rhs.clone()
    }
}

impl std::iter::Sum for FiltExpr {
    fn sum<I: Iterator<Item = FiltExpr>>(iter: I) -> Self {
        iter.fold(FiltExpr::zero(), |a, b| a + b)
    }
}

impl fmt::Display for FiltExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .symbols
            .iter()
            .map(|(s, m)| if *m == 1 { s.clone() } else { format!("{m}·{s}") })
            .collect();
        if self.constant != 0.0 || parts.is_empty() {
            parts.push(format!("{}", self.constant));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// A term living in the sublevel set `Λ_c` of loops of length below `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilteredClass {
    pub term: Term,
    pub filtration: FiltExpr,
    /// Dimension of the parameter space, when known.
    pub param_dim: Option<u32>,
}

impl FilteredClass {
    pub fn new(term: Term, filtration: FiltExpr) -> Self {
        Self { term, filtration, param_dim: None }
    }

    pub fn with_dim(mut self, dim: u32) -> Self {
        self.param_dim = Some(dim);
        self
    }
}

impl fmt::Display for FilteredClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ∈ Λ_{{{}}}", self.term, self.filtration)
    }
}
