use std::path::{Path, PathBuf};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use stringcap::bounds::BoundSettings;
use stringcap::catalog::{
    build, without_axioms, ActionSpec, FactorSpec, GridPlan, OpenBookDomain, PageSpec, ProfileSpec, Scenario,
    ScenarioKind, TorusDomain,
};
use stringcap::quadrature::QuadratureSpec;
use stringcap::stralg::RuleId;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    /// Ellipsoid with one weighted plane (open book `S^n`).
    Ellipsoid1,
    /// Ellipsoid with two weighted planes (diagonal action).
    Ellipsoid2,
    /// Flat torus `R/aZ x R/Z` as an open book with circle pages.
    Openbook,
    /// Flat product torus `T^d`, target a coordinate `T^k`.
    Torus,
    /// Camel domain on `T*T^n`.
    Camel,
    /// Flat Klein bottle.
    Klein,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// One run of `bound` or `certify`. Missing fields take the defaults built
/// into the binary.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<ScenarioName>,
    /// Base dimension (ellipsoids, camel).
    pub n: Option<usize>,
    /// Ellipsoid weight, flat torus side or Klein bottle side.
    pub a: Option<f64>,
    /// Second Klein bottle side.
    pub b: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    /// Dimension of the target subtorus.
    pub k: Option<usize>,
    /// Dimension of the product torus.
    pub d: Option<usize>,
    /// Codisk radius.
    pub radius: Option<f64>,
    /// Restrict to one target class, e.g. `[pt]`.
    pub target: Option<String>,
    pub quad_panels: Option<usize>,
    pub refine_budget: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    /// Rule ids removed from the scenario's rule context.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disable_axioms: Vec<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those of `self`.
    pub fn merged(self, over: RunConfig) -> RunConfig {
        RunConfig {
            scenario: over.scenario.or(self.scenario),
            n: over.n.or(self.n),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            eps: over.eps.or(self.eps),
            delta: over.delta.or(self.delta),
            k: over.k.or(self.k),
            d: over.d.or(self.d),
            radius: over.radius.or(self.radius),
            target: over.target.or(self.target),
            quad_panels: over.quad_panels.or(self.quad_panels),
            refine_budget: over.refine_budget.or(self.refine_budget),
            seed: over.seed.or(self.seed),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            disable_axioms: if over.disable_axioms.is_empty() { self.disable_axioms } else { over.disable_axioms },
        }
    }

    /// Fill in defaults for the chosen scenario and reject out-of-range values.
    pub fn resolved(&self) -> Result<RunConfig, CliError> {
        let scenario = self.scenario.ok_or_else(|| CliError::Validation("no scenario given (use --scenario)".into()))?;
        let mut c = self.clone();
        match scenario {
            ScenarioName::Ellipsoid1 | ScenarioName::Ellipsoid2 => {
                c.n.get_or_insert(if scenario == ScenarioName::Ellipsoid1 { 2 } else { 3 });
                c.a.get_or_insert(0.5);
                c.radius.get_or_insert(1.0);
            }
            ScenarioName::Openbook => {
                c.a.get_or_insert(1.0);
                c.radius.get_or_insert(1.0);
            }
            ScenarioName::Torus => {
                c.d.get_or_insert(2);
                c.k.get_or_insert(1);
                c.radius.get_or_insert(1.0);
            }
            ScenarioName::Camel => {
                c.n.get_or_insert(2);
                c.eps.get_or_insert(0.4);
                c.delta.get_or_insert(0.01);
            }
            ScenarioName::Klein => {
                c.a.get_or_insert(1.0);
                c.b.get_or_insert(1.0);
                c.radius.get_or_insert(1.0);
            }
        }
        c.quad_panels.get_or_insert(QuadratureSpec::default().panels);
        c.refine_budget.get_or_insert(200);
        c.seed.get_or_insert(0);
        c.format.get_or_insert(Format::Json);
        for name in &c.disable_axioms {
            RuleId::parse(name).ok_or_else(|| CliError::Validation(format!("unknown rule id {name}")))?;
        }
        for (name, v) in [("a", c.a), ("b", c.b), ("eps", c.eps), ("delta", c.delta), ("radius", c.radius)] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(CliError::Validation(format!("{name} must be finite, got {v}")));
                }
            }
        }
        c.settings()?;
        Ok(c)
    }

    pub fn settings(&self) -> Result<BoundSettings, CliError> {
        let quad = QuadratureSpec::with_panels(self.quad_panels.unwrap_or(QuadratureSpec::default().panels))
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let budget = self.refine_budget.unwrap_or(200);
        if budget == 0 {
            return Err(CliError::Validation("refine budget must be positive".into()));
        }
        Ok(BoundSettings::new(quad, budget))
    }

    pub fn scenario_kind(&self) -> Result<ScenarioKind, CliError> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Validation(format!("missing {name}")));
        let need_n = |v: Option<usize>, name: &str| v.ok_or_else(|| CliError::Validation(format!("missing {name}")));
        let scenario = self.scenario.ok_or_else(|| CliError::Validation("no scenario given".into()))?;
        Ok(match scenario {
            ScenarioName::Ellipsoid1 => {
                ScenarioKind::Ellipsoid1 { n: need_n(self.n, "n")?, a: need(self.a, "a")?, radius: need(self.radius, "radius")? }
            }
            ScenarioName::Ellipsoid2 => {
                ScenarioKind::Ellipsoid2 { n: need_n(self.n, "n")?, a: need(self.a, "a")?, radius: need(self.radius, "radius")? }
            }
            ScenarioName::Openbook => ScenarioKind::OpenBook {
                page: PageSpec::Circle,
                f: ProfileSpec::Trivial,
                action: ActionSpec::Rotation { winding: 1 },
                domain: OpenBookDomain::FlatTorus { a: need(self.a, "a")?, radius: need(self.radius, "radius")? },
            },
            ScenarioName::Torus => ScenarioKind::ProductTorus {
                v: FactorSpec::Point,
                d: need_n(self.d, "d")?,
                k: need_n(self.k, "k")?,
                domain: TorusDomain::Flat { radius: need(self.radius, "radius")? },
            },
            ScenarioName::Camel => {
                ScenarioKind::Camel { n: need_n(self.n, "n")?, eps: need(self.eps, "eps")?, delta: need(self.delta, "delta")? }
            }
            ScenarioName::Klein => {
                ScenarioKind::Klein { a: need(self.a, "a")?, b: need(self.b, "b")?, radius: need(self.radius, "radius")? }
            }
        })
    }

    /// The scenario of a resolved config, with disabled axioms removed.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let s = build(&self.scenario_kind()?, GridPlan::default()).map_err(CliError::from_core)?;
        let rules: Vec<RuleId> = self.disable_axioms.iter().filter_map(|r| RuleId::parse(r)).collect();
        Ok(if rules.is_empty() { s } else { without_axioms(s, &rules) })
    }
}
