#![allow(dead_code)]

use std::f64::consts::PI;

use stringcap::catalog::{
    build, camel_scenario, ellipsoid2_scenario, ellipsoid_scenario, klein_bottle_scenario, open_book_scenario,
    product_torus_scenario, ActionSpec, FactorSpec, GridPlan, OpenBookDomain, PageSpec, ProfileSpec, Scenario,
    ScenarioKind, TorusDomain,
};
use stringcap::gauge::{BaseDescriptor, BasePoint, ChartId, GaugeDomain, MetricSpec, TangentVector};
use stringcap::loops::Loop;
use stringcap::stralg::{derive_certificate, Certificate, FiltExpr, FilteredClass, Term};

/// Round sphere codisk of radius `a`, the inner domain of the ellipsoid comparison.
pub fn round_codisk(n: usize, a: f64) -> GaugeDomain {
    GaugeDomain::codisk(BaseDescriptor::Sphere { n }, MetricSpec::round(n, 1.0, a).unwrap(), "round codisk")
}

pub fn ellipsoid_domain(n: usize, a: f64) -> GaugeDomain {
    ellipsoid_scenario(n, a).unwrap().domain
}

pub fn ellipsoid_radius(n: usize, a: f64, radius: f64) -> Scenario {
    build(&ScenarioKind::Ellipsoid1 { n, a, radius }, GridPlan::default()).unwrap()
}

/// A great circle through the last two coordinates, tilted by `tilt` into
/// the first one.
pub fn tilted_circle(n: usize, tilt: f64, turns: f64) -> Loop {
    let base = BaseDescriptor::Sphere { n };
    let (st, ct) = tilt.sin_cos();
    let at = move |t: f64| {
        let (s, c) = (2.0 * PI * turns * t).sin_cos();
        let mut x = vec![0.0; n + 1];
        x[0] = st * c;
        x[n - 1] = ct * c;
        x[n] = s;
        x
    };
    let vel = move |t: f64| {
        let (s, c) = (2.0 * PI * turns * t).sin_cos();
        let w = 2.0 * PI * turns;
        let mut v = vec![0.0; n + 1];
        v[0] = -st * w * s;
        v[n - 1] = -ct * w * s;
        v[n] = w * c;
        v
    };
    let at2 = at;
    Loop::with_velocity(
        format!("circle(tilt={tilt})"),
        base,
        move |t| BasePoint::new(at(t), ChartId::Sphere),
        move |t| TangentVector::new(BasePoint::new(at2(t), ChartId::Sphere), vel(t)),
    )
}

/// Every catalog scenario paired with each of its targets' certificates.
pub fn catalog_certificates() -> Vec<(String, Certificate)> {
    let scenarios = vec![
        ellipsoid_scenario(2, 0.5).unwrap(),
        ellipsoid_scenario(3, 0.2).unwrap(),
        ellipsoid2_scenario(3, 0.4).unwrap(),
        open_book_scenario(
            PageSpec::Circle,
            ProfileSpec::Trivial,
            ActionSpec::Rotation { winding: 1 },
            OpenBookDomain::FlatTorus { a: 0.5, radius: 1.0 },
        )
        .unwrap(),
        product_torus_scenario(FactorSpec::Circle, 3, 1, TorusDomain::Flat { radius: 1.0 }).unwrap(),
        camel_scenario(2, 0.4, 0.01).unwrap(),
        klein_bottle_scenario(1.0, 1.0).unwrap(),
    ];
    let mut out = Vec::new();
    for s in &scenarios {
        for t in &s.targets {
            out.push((format!("{} {}", s.id, t.name), derive_certificate(&s.id, &s.context, t).unwrap()));
        }
    }
    out
}

pub const LABELS: [&str; 3] = ["M", "pt", "ζpt"];

/// A deterministic term tree from a stream of choices.
pub fn term_from(choices: &mut impl Iterator<Item = u32>, depth: u32) -> Term {
    let c = choices.next().unwrap_or(0);
    let label = LABELS[(choices.next().unwrap_or(0) % 3) as usize];
    if depth == 0 {
        return match c % 4 {
            0 => Term::action(label, if c % 8 < 4 { stringcap::stralg::Sign::Plus } else { stringcap::stralg::Sign::Minus }),
            1 => Term::constant(label),
            2 => Term::iota(label),
            _ => Term::single_loop(label, c.is_multiple_of(2)),
        };
    }
    match c % 4 {
        0 => Term::delta_of(term_from(choices, depth - 1)),
        1 => Term::bv_preimage(term_from(choices, depth - 1)),
        2 => Term::star_of([term_from(choices, depth - 1), term_from(choices, depth - 1)]),
        _ => term_from(choices, 0),
    }
}

pub fn filtration_from(choices: &mut impl Iterator<Item = u32>) -> FiltExpr {
    let c = choices.next().unwrap_or(0);
    let mut f = FiltExpr::value(f64::from(c % 1000) / 100.0);
    for s in ["E_+", "E_-", "e_+"] {
        if choices.next().unwrap_or(0) % 2 == 1 {
            f = f + FiltExpr::symbol(s);
        }
    }
    f
}

pub fn class_from(choices: &mut impl Iterator<Item = u32>) -> FilteredClass {
    let depth = choices.next().unwrap_or(0) % 4;
    FilteredClass::new(term_from(choices, depth), filtration_from(choices))
}
