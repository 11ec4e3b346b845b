use crate::error::{Error, Result};

/// Settings for the projected-subgradient multiplier update.
///
/// Step at iteration `t` (1-based) is `c / sqrt(t)`, which is nonsummable,
/// so the travel condition holds for every positive scale. With
/// `adaptive_scale`, `c` starts at `step_scale` and is rescaled at the end of
/// epochs of doubling length (16, 32, 64, ... iterations): doubled when the
/// multipliers drifted in a consistent direction, halved when they mostly
/// oscillated. `c` stays within `[step_scale / 2^20, step_scale * 2^20]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientConfig {
    pub step_scale: f64,
    pub max_iterations: usize,
    pub adaptive_scale: bool,
    /// Relative duality gap at which the loop stops when the evaluator
    /// reports a dual bound; otherwise the threshold on the change of the
    /// evaluated objective across `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    /// Lower clamp on derived fractions (epsilon of the open interval).
    pub clamp_low: f64,
    /// Upper clamp on derived fractions.
    pub clamp_high: f64,
    /// Keep the running-best objective of every iteration.
    pub record_trace: bool,
}

impl Default for SubgradientConfig {
    fn default() -> Self {
        Self {
            step_scale: 1.0,
            adaptive_scale: true,
            max_iterations: 100_000,
            tolerance: 1e-9,
            window: 50,
            clamp_low: super::CLAMP_LOW,
            clamp_high: super::CLAMP_HIGH,
            record_trace: false,
        }
    }
}

impl SubgradientConfig {
    /// Step at `iteration` for the unadapted scale.
    pub fn step(&self, iteration: usize) -> f64 {
        self.step_scale / (iteration as f64).sqrt()
    }
}

const FIRST_EPOCH: usize = 16;
const SCALE_RANGE: f64 = 1048576.0;

/// What the inner maximization reports for a multiplier vector: the primal
/// objective of the point it produced, the constraint slacks whose sign
/// drives the update (positive = satisfied with room), and optionally the
/// dual function value, an upper bound on the primal optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation {
    pub objective: f64,
    pub slacks: Vec<f64>,
    pub upper_bound: Option<f64>,
}

impl DualEvaluation {
    pub fn new(objective: f64, slacks: Vec<f64>) -> Self {
        Self { objective, slacks, upper_bound: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientOutcome {
    /// Multipliers after the last update.
    pub multipliers: Vec<f64>,
    /// Multipliers that produced the best objective.
    pub best_multipliers: Vec<f64>,
    pub objective: f64,
    /// Smallest dual bound reported, infinite when none was.
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

/// Runs `lambda <- max(lambda - step * slack, 0)` from `lambda = 1/dimension`
/// and returns the best objective observed. Stops once the best objective is
/// within `tolerance` (relative) of the smallest dual bound, or, without
/// bounds, once the objective settles over `window` iterations.
pub fn projected_subgradient<F>(
    mut evaluate: F,
    config: &SubgradientConfig,
    dimension: usize,
) -> Result<SubgradientOutcome>
where
    F: FnMut(&[f64]) -> Result<DualEvaluation>,
{
    if dimension == 0 {
        return Err(Error::Domain("subgradient dimension must be >= 1".into()));
    }
    if !(config.step_scale > 0.0) || config.max_iterations == 0 {
        return Err(Error::Domain("step_scale and max_iterations must be positive".into()));
    }
    let window = config.window.max(1);
    let mut lambda = vec![1.0 / dimension as f64; dimension];
    let mut best = f64::NEG_INFINITY;
    let mut best_lambda = lambda.clone();
    let mut recent: Vec<f64> = Vec::with_capacity(window + 1);
    let mut upper = f64::INFINITY;
    let mut scale = config.step_scale;
    let mut epoch_end = FIRST_EPOCH;
    let mut epoch_start = lambda.clone();
    let mut travel = 0.0f64;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=config.max_iterations {
        iterations = t;
        let eval = evaluate(&lambda)?;
        if !eval.objective.is_finite() || eval.slacks.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numeric(format!("non-finite dual evaluation at iteration {t}")));
        }
        if eval.slacks.len() != dimension {
            return Err(Error::Numeric(format!(
                "evaluation returned {} slacks for dimension {dimension}",
                eval.slacks.len()
            )));
        }
        if eval.objective > best {
            best = eval.objective;
            best_lambda.clone_from(&lambda);
        }
        if config.record_trace {
            trace.push(best);
        }

        if let Some(bound) = eval.upper_bound {
            if bound.is_nan() {
                return Err(Error::Numeric(format!("NaN dual bound at iteration {t}")));
            }
            upper = upper.min(bound);
            if upper - best <= config.tolerance * best.abs().max(1.0) {
                converged = true;
                break;
            }
        } else {
            if recent.len() == window {
                let oldest = recent.remove(0);
                if (eval.objective - oldest).abs() <= config.tolerance * eval.objective.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            recent.push(eval.objective);
        }

        let step = scale / (t as f64).sqrt();
        for (l, s) in lambda.iter_mut().zip(&eval.slacks) {
            let next = (*l - step * s).max(0.0);
            travel += (next - *l).abs();
            *l = next;
        }
        if config.adaptive_scale && t == epoch_end {
            let drift: f64 = lambda.iter().zip(&epoch_start).map(|(a, b)| (a - b).abs()).sum();
            let ratio = if travel > 0.0 { drift / travel } else { 0.5 };
            if ratio > 0.7 {
                scale = (scale * 2.0).min(config.step_scale * SCALE_RANGE);
            } else if ratio < 0.2 {
                scale = (scale * 0.5).max(config.step_scale / SCALE_RANGE);
            }
            epoch_start.clone_from(&lambda);
            travel = 0.0;
            epoch_end *= 2;
        }
    }

    Ok(SubgradientOutcome {
        multipliers: lambda,
        best_multipliers: best_lambda,
        objective: best,
        upper_bound: upper,
        iterations,
        converged,
        trace,
    })
}
