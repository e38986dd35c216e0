//! Regression tables over the default parameter grids.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stringcap::bounds::{camel_limit_report, compute_bounds, BoundSettings, CapacityBound};
use stringcap::catalog::{
    build, ActionSpec, FactorSpec, GridPlan, OpenBookDomain, PageSpec, ProfileSpec, ScenarioKind, TorusDomain,
};
use stringcap::frames::{random_sphere_point, sphere_unitary_frame, verify_frame_family, FrameGrid};
use stringcap::gauge::{domain_contains, BaseDescriptor, GaugeDomain, MetricSpec, SamplePlan};
use stringcap::stralg::{check_certificate, derive_certificate, FiltExpr};

use crate::CliError;

pub const TABLES: [&str; 9] =
    ["ellipsoid1", "ellipsoid2", "camel", "klein", "torus", "openbook", "frames", "containment", "certificates"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Rel,
    Abs,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub table: String,
    pub case: String,
    pub quantity: String,
    pub expected: f64,
    pub computed: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub metric: Metric,
    pub pass: bool,
}

fn row(table: &str, case: String, quantity: impl Into<String>, expected: f64, computed: f64, tol: f64, metric: Metric) -> Row {
    let deviation = match metric {
        Metric::Abs => (computed - expected).abs(),
        Metric::Rel => (computed - expected).abs() / expected.abs(),
    };
    Row {
        table: table.into(),
        case,
        quantity: quantity.into(),
        expected,
        computed,
        deviation,
        tolerance: tol,
        metric,
        pass: deviation <= tol,
    }
}

fn core(e: stringcap::Error) -> CliError {
    CliError::from_core(e)
}

fn bounds(kind: ScenarioKind, settings: &BoundSettings) -> Result<Vec<CapacityBound>, CliError> {
    let s = build(&kind, GridPlan::default()).map_err(core)?;
    compute_bounds(&s, settings).map_err(core)
}

fn target<'a>(bs: &'a [CapacityBound], name: &str) -> Result<&'a CapacityBound, CliError> {
    bs.iter().find(|b| b.target.name == name).ok_or_else(|| CliError::Numeric(format!("no bound for {name}")))
}

fn ellipsoid1(settings: &BoundSettings) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for n in [2, 3] {
        for a in [0.2, 0.5, 1.0] {
            let bs = bounds(ScenarioKind::Ellipsoid1 { n, a, radius: 1.0 }, settings)?;
            let case = format!("n={n} a={a}");
            let pt = target(&bs, "[pt]")?;
            for sym in ["E_+", "E_-"] {
                rows.push(row("ellipsoid1", case.clone(), sym, 2.0 * PI * a, pt.numeric_bindings[sym].refined, 1e-4, Metric::Rel));
            }
            let sn = target(&bs, &format!("[S^{n}]"))?;
            rows.push(row("ellipsoid1", case.clone(), format!("Gr([S^{n}])"), 2.0 * PI * a, sn.upper_bound, 1e-4, Metric::Rel));
            rows.push(row("ellipsoid1", case, "Gr([pt])", 4.0 * PI * a, pt.upper_bound, 1e-4, Metric::Rel));
        }
    }
    Ok(rows)
}

fn ellipsoid2(settings: &BoundSettings) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for n in [3, 4] {
        for a in [0.4, 1.0] {
            let bs = bounds(ScenarioKind::Ellipsoid2 { n, a, radius: 1.0 }, settings)?;
            let pt = target(&bs, "[pt]")?;
            let case = format!("n={n} a={a}");
            rows.push(row("ellipsoid2", case.clone(), "Gr([pt])", 2.0 * PI * a, pt.upper_bound, 1e-4, Metric::Rel));
            let flag = if pt.equality.known { 1.0 } else { 0.0 };
            rows.push(row("ellipsoid2", case, "equality known", 1.0, flag, 0.0, Metric::Abs));
        }
    }
    Ok(rows)
}

fn camel(settings: &BoundSettings) -> Result<Vec<Row>, CliError> {
    let deltas = [0.1, 0.01, 0.001];
    let mut rows = Vec::new();
    for eps in [0.4, 1.0] {
        for n in [2, 3] {
            let r = camel_limit_report(n, eps, &deltas, settings).map_err(core)?;
            for c in &r.rows {
                rows.push(row("camel", format!("n={n} eps={eps} delta={}", c.delta), "Gr([T^1])", c.expected, c.bound, 1e-9, Metric::Abs));
            }
            rows.push(row("camel", format!("n={n} eps={eps}"), "delta -> 0 extrapolation", eps, r.extrapolated, 1e-6, Metric::Abs));
        }
    }
    Ok(rows)
}

fn klein(settings: &BoundSettings) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for (a, b) in [(1.0, 1.0), (0.5, 2.0)] {
        let bs = bounds(ScenarioKind::Klein { a, b, radius: 1.0 }, settings)?;
        let s = target(&bs, "[Σ]")?;
        rows.push(row("klein", format!("a={a} b={b}"), "Gr([Σ])", 2.0 * a, s.upper_bound, 1e-6, Metric::Abs));
    }
    Ok(rows)
}

fn torus(settings: &BoundSettings) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for d in [2, 3] {
        for k in 1..d {
            for radius in [1.0, 0.5] {
                let bs = bounds(
                    ScenarioKind::ProductTorus { v: FactorSpec::Point, d, k, domain: TorusDomain::Flat { radius } },
                    settings,
                )?;
                let t = target(&bs, &format!("[T^{k}]"))?;
                rows.push(row("torus", format!("d={d} k={k} r={radius}"), format!("Gr([T^{k}])"), 2.0 * radius, t.upper_bound, 1e-6, Metric::Abs));
            }
        }
    }
    Ok(rows)
}

fn openbook(settings: &BoundSettings) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for a in [0.5, 1.0] {
        let bs = bounds(
            ScenarioKind::OpenBook {
                page: PageSpec::Circle,
                f: ProfileSpec::Trivial,
                action: ActionSpec::Rotation { winding: 1 },
                domain: OpenBookDomain::FlatTorus { a, radius: 1.0 },
            },
            settings,
        )?;
        for name in ["[pt]", "[V]"] {
            let b = target(&bs, name)?;
            rows.push(row("openbook", format!("flat torus a={a}"), format!("Gr({name})"), 2.0 * a, b.upper_bound, 1e-6, Metric::Abs));
        }
    }
    Ok(rows)
}

fn frames(seed: u64) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grids = [
        (1, FrameGrid::Circle { samples: 512 }),
        (2, FrameGrid::Icosphere { depth: 3 }),
        (3, FrameGrid::RandomPairs { count: 2000, distance: 1e-2, seed }),
    ];
    for (n, grid) in grids {
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let q = random_sphere_point(n, &mut rng);
            let f = sphere_unitary_frame(n, &q).map_err(core)?;
            worst = worst.max(f.unitarity_defect).max(f.basepoint_defect);
        }
        rows.push(row("frames", format!("n={n} 1000 random points"), "max residual", 0.0, worst, 1e-10, Metric::Abs));
        let r = verify_frame_family(n, &grid, 1e-10).map_err(core)?;
        let drift = r.drift.iter().cloned().fold(0.0, f64::max);
        rows.push(row("frames", format!("n={n} {grid:?}"), "modulus drift", 0.0, drift, 0.1, Metric::Abs));
    }
    Ok(rows)
}

fn containment(seed: u64) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for a in [0.2, 0.5, 1.0] {
        let base = BaseDescriptor::Sphere { n: 2 };
        let inner = GaugeDomain::codisk(base.clone(), MetricSpec::round(2, 1.0, a).map_err(core)?, "round codisk");
        let outer = GaugeDomain::codisk(base, MetricSpec::ellipsoid(vec![1.0, a, a], 1.0).map_err(core)?, "ellipsoid codisk");
        let c = domain_contains(&inner, &outer, &SamplePlan::Random { count: 10_000, seed }).map_err(core)?;
        let computed = if c.contained { 1.0 } else { 0.0 };
        rows.push(row("containment", format!("n=2 a={a} 10^4 samples"), "round codisk inside ellipsoid codisk", 1.0, computed, 0.0, Metric::Abs));
    }
    Ok(rows)
}

/// Replay of every catalog certificate, and rejection of a tampered copy.
fn certificates() -> Result<Vec<Row>, CliError> {
    let kinds = [
        ScenarioKind::Ellipsoid1 { n: 2, a: 0.5, radius: 1.0 },
        ScenarioKind::Ellipsoid2 { n: 3, a: 0.5, radius: 1.0 },
        ScenarioKind::OpenBook {
            page: PageSpec::Circle,
            f: ProfileSpec::Trivial,
            action: ActionSpec::Rotation { winding: 1 },
            domain: OpenBookDomain::FlatTorus { a: 0.5, radius: 1.0 },
        },
        ScenarioKind::ProductTorus { v: FactorSpec::Point, d: 3, k: 1, domain: TorusDomain::Flat { radius: 1.0 } },
        ScenarioKind::Camel { n: 2, eps: 0.4, delta: 0.01 },
        ScenarioKind::Klein { a: 1.0, b: 1.0, radius: 1.0 },
    ];
    let mut rows = Vec::new();
    for kind in kinds {
        let s = build(&kind, GridPlan::default()).map_err(core)?;
        for t in &s.targets {
            let c = derive_certificate(&s.id, &s.context, t).map_err(core)?;
            let case = format!("{} {}", s.id, t.name);
            let ok = if check_certificate(&c).passed { 1.0 } else { 0.0 };
            rows.push(row("certificates", case.clone(), "replay passes", 1.0, ok, 0.0, Metric::Abs));
            let mut tampered = c.clone();
            let f = &tampered.derivations[0].steps[0].output.filtration + &FiltExpr::value(-0.25);
            tampered.derivations[0].steps[0].output.filtration = f;
            let rejected = if check_certificate(&tampered).passed { 0.0 } else { 1.0 };
            rows.push(row("certificates", case, "tampered copy rejected", 1.0, rejected, 0.0, Metric::Abs));
        }
    }
    Ok(rows)
}

pub fn reproduce(table: &str, settings: &BoundSettings, seed: u64) -> Result<Vec<Row>, CliError> {
    match table {
        "all" => {
            let mut rows = Vec::new();
            for t in TABLES {
                rows.extend(reproduce(t, settings, seed)?);
            }
            Ok(rows)
        }
        "ellipsoid1" => ellipsoid1(settings),
        "ellipsoid2" => ellipsoid2(settings),
        "camel" => camel(settings),
        "klein" => klein(settings),
        "torus" => torus(settings),
        "openbook" => openbook(settings),
        "frames" => frames(seed),
        "containment" => containment(seed),
        "certificates" => certificates(),
        other => Err(CliError::Validation(format!("unknown table id {other:?}; expected all or one of {}", TABLES.join(", ")))),
    }
}

pub fn render_text(rows: &[Row]) -> String {
    let mut s = String::new();
    for r in rows {
        s += &format!(
            "[{}] {:<12} {:<32} {:<28} expected {:<14.10} computed {:<14.10} dev {:.1e} ({:?} tol {:.0e})\n",
            if r.pass { "pass" } else { "FAIL" },
            r.table,
            r.case,
            r.quantity,
            r.expected,
            r.computed,
            r.deviation,
            r.metric,
            r.tolerance
        );
    }
    s
}
