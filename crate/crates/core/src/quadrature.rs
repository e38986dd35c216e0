//! Composite Simpson quadrature on `[0, 1]` with panel doubling and a
//! Richardson correction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Initial number of Simpson panels; even and at least 8.
    pub panels: usize,
    /// Relative change between successive doublings accepted as converged.
    pub qtol: f64,
    pub max_doublings: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { panels: 512, qtol: 1e-7, max_doublings: 6 }
    }
}

impl QuadratureSpec {
    pub fn with_panels(panels: usize) -> Result<Self> {
        let spec = Self { panels, ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 8 || !self.panels.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "quadrature panel count must be even and >= 8, got {}",
                self.panels
            )));
        }
        if !(self.qtol > 0.0) {
            return Err(Error::InvalidParameter(format!("qtol must be positive, got {}", self.qtol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// `|S_2N - S_N| / 15` at the last doubling.
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

fn simpson(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (values[0] + values[n] + 4.0 * odd + 2.0 * even)
}

/// Integrate `f` over `[0, 1]`.
///
/// Starts from `spec.panels` panels and doubles (reusing every previous
/// sample) until the relative change `|S_2N - S_N|` drops below `qtol` and
/// the change before it, `|S_N - S_N/2|`, is within the fourth-order rate
/// (16 times larger). Oscillating integrands can make two neighbouring sums
/// agree by accident; the second test catches that. The returned value is the
/// Richardson combination `S_2N + (S_2N - S_N) / 15`.
pub fn integrate_unit<F>(f: F, spec: &QuadratureSpec) -> Result<QuadratureEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    let mut n = spec.panels;
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        values.push(f(i as f64 / n as f64)?);
    }
    let mut coarse = simpson(&values);
    let half: Vec<f64> = values.iter().step_by(2).copied().collect();
    let mut prev_diff = if n % 4 == 0 { (coarse - simpson(&half)).abs() } else { f64::INFINITY };
    let mut estimate = QuadratureEstimate { value: coarse, error: f64::INFINITY, panels: n, converged: false };
    for _ in 0..spec.max_doublings {
        let fine_n = 2 * n;
        let mut fine = Vec::with_capacity(fine_n + 1);
        for (i, v) in values.iter().enumerate() {
            fine.push(*v);
            if i < n {
                fine.push(f((2 * i + 1) as f64 / fine_n as f64)?);
            }
        }
        let s = simpson(&fine);
        let diff = s - coarse;
        estimate = QuadratureEstimate {
            value: s + diff / 15.0,
            error: diff.abs() / 15.0,
            panels: fine_n,
            converged: false,
        };
        let scale = spec.qtol * s.abs().max(f64::MIN_POSITIVE);
        if diff == 0.0 || (diff.abs() <= scale && prev_diff <= 16.0 * scale) {
            estimate.converged = true;
            break;
        }
        prev_diff = diff.abs();
        values = fine;
        coarse = s;
        n = fine_n;
    }
    Ok(estimate)
}
