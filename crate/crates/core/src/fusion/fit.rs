//! Fitting F by coordinate ascent on validation recognition rate.

use crate::error::{Error, Result};
use crate::types::{FCurve, HypothesisSet, LabeledSample, PruningMask};

use super::prepared::PreparedValidation;
use super::FusionContext;

pub const DEFAULT_KNOTS: [i64; 11] = [-4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6];
pub const DEFAULT_GRID: [f64; 7] = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    pub max_sweeps: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_sweeps: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub curve: FCurve,
    /// Validation recognition rate of the all-zero starting curve.
    pub initial_objective: f64,
    /// Objective after each completed sweep.
    pub sweep_objectives: Vec<f64>,
}

impl FitOutcome {
    pub fn objective(&self) -> f64 {
        self.sweep_objectives.last().copied().unwrap_or(self.initial_objective)
    }
}

/// Starting from an all-zero curve on `knot_abscissae`, repeatedly sweeps
/// the knots and sets each to the `search_grid` value with the highest
/// validation recognition rate (ties go to the smaller absolute value, and
/// a knot keeps its value when that value is among the best). Stops after
/// a sweep with no change or after `max_sweeps` sweeps.
///
/// The curve in `ctx.config` is ignored.
pub fn fit_f_curve(
    knot_abscissae: &[i64],
    search_grid: &[f64],
    val: &[(HypothesisSet, LabeledSample)],
    mask: &PruningMask,
    ctx: FusionContext<'_>,
    options: FitOptions,
) -> Result<FitOutcome> {
    if search_grid.is_empty() {
        return Err(Error::invalid("search grid", "must not be empty"));
    }
    if let Some(v) = search_grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid("search grid", format!("{v} is not finite")));
    }
    if val.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((h, _)) = val.iter().find(|(h, _)| h.len() != mask.len()) {
        return Err(Error::MaskLengthMismatch {
            mask: mask.len(),
            ensemble: h.len(),
        });
    }
    ctx.config.validate()?;

    let mut curve = FCurve::zeros(knot_abscissae)?;
    let prepared = PreparedValidation::new(val, ctx);
    let initial_objective = prepared.accuracy_with(&curve, mask);
    let mut objective = initial_objective;
    let mut sweep_objectives = Vec::new();

    for _ in 0..options.max_sweeps {
        let mut changed = false;
        for k in 0..knot_abscissae.len() {
            let current = curve.knots()[k].1;
            let mut best = (current, objective);
            for &v in search_grid {
                if v == current {
                    continue;
                }
                let acc = prepared.accuracy_with(&curve.with_value(k, v), mask);
                if acc > best.1 || (acc == best.1 && v.abs() < best.0.abs()) {
                    best = (v, acc);
                }
            }
            if best.0 != current {
                curve = curve.with_value(k, best.0);
                objective = best.1;
                changed = true;
            }
        }
        sweep_objectives.push(objective);
        if !changed {
            break;
        }
    }

    Ok(FitOutcome {
        curve,
        initial_objective,
        sweep_objectives,
    })
}
