//! The four NOMA optimization schemes.
//!
//! * (a) maximize sum throughput over T, decode in descending-gain order;
//! * (b) same T, then time-share decoding orders to lift the minimum rate;
//! * (c) maximize the common rate with the fixed descending order;
//! * (d) maximize the common rate with time sharing.
//!
//! Schemes (c) and (d) are solved through their Lagrange duals: for fixed
//! multipliers the common rate is `1 / sum(lambda)` and T is the root of a
//! stationarity condition; multipliers follow a projected subgradient step.
//! Scheme (d) also has a closed one-dimensional form, the maximum over T of
//! `min_n T log2(1 + c_n (1 - T) / T) / (N + 1 - n)`, which is what
//! [`equal_rate_ts`] returns; [`equal_rate_ts_dual`] is the dual loop.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline_tdma::{tdma_common_throughput, tdma_sum_throughput};
use crate::error::{Error, Result};
use crate::model::{
    check_open_fraction, rates_fixed_order, sum_throughput_from_snr, NetworkInstance, RateAllocation,
    TimeShareSchedule,
};
use crate::numerics::{
    bisect_root, clamp_open_unit, golden_section_max, lambert_w0, projected_subgradient, DualEvaluation,
    SubgradientConfig, CLAMP_HIGH, CLAMP_LOW,
};
use crate::timeshare::{greedy_timeshare, solve_minrate_full, MinRateLpResult, MAX_FULL_SPACE_USERS};

/// Below this distance from `S = 1` the closed form is 0/0 and T* is
/// found by direct search instead.
const UNIT_SNR_GAP: f64 = 1e-9;
const GOLDEN_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-12;
const PROBLEM_TWO_TOL: f64 = 1e-6;
/// Rate cap in units of the smallest single-user peak; the optimum is at most 1.
const NORMALIZED_RATE_CAP: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    A,
    B,
    C,
    D,
    TdmaSum,
    TdmaCommon,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::A => "a",
            Scheme::B => "b",
            Scheme::C => "c",
            Scheme::D => "d",
            Scheme::TdmaSum => "tdma_sum",
            Scheme::TdmaCommon => "tdma_common",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "a" => Ok(Scheme::A),
            "b" => Ok(Scheme::B),
            "c" => Ok(Scheme::C),
            "d" => Ok(Scheme::D),
            "tdma_sum" => Ok(Scheme::TdmaSum),
            "tdma_common" => Ok(Scheme::TdmaCommon),
            other => Err(Error::Domain(format!("unknown scheme '{other}'"))),
        }
    }
}

/// How the time-sharing permutations are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeShareMode {
    /// All `N!` decoding orders (N <= 7).
    #[default]
    Full,
    /// Greedy construction with at most N + 1 iterations.
    Greedy,
}

impl FromStr for TimeShareMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(TimeShareMode::Full),
            "greedy" => Ok(TimeShareMode::Greedy),
            other => Err(Error::Domain(format!("unknown time-sharing mode '{other}'"))),
        }
    }
}

/// Coefficients of the dual problems, indexed by sorted user position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCoefficients {
    /// `a_n = eta rho g_n`
    pub a: Vec<f64>,
    /// `b_n = eta rho sum_{j>n} g_j`
    pub b: Vec<f64>,
    /// `c_n = eta rho sum_{i>=n} g_i`
    pub c: Vec<f64>,
    /// `d_n = N + 1 - n`
    pub remaining_count: Vec<usize>,
}

impl DualCoefficients {
    pub fn new(instance: &NetworkInstance) -> Self {
        let a = instance.snr_weights();
        let n = a.len();
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut tail = 0.0;
        for i in (0..n).rev() {
            b[i] = tail;
            tail += a[i];
            c[i] = tail;
        }
        let remaining_count = (0..n).map(|i| n - i).collect();
        Self { a, b, c, remaining_count }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub multipliers: Vec<f64>,
    pub converged: bool,
    pub greedy_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub transmit_fraction: f64,
    pub allocation: RateAllocation,
    /// Minimum rate for (a)/(b), common rate for (c)/(d), in bps/Hz.
    pub objective: f64,
    pub diagnostics: Diagnostics,
}

/// Closed-form T* maximizing the sum throughput.
pub fn optimal_transmit_fraction(instance: &NetworkInstance) -> Result<f64> {
    optimal_fraction_for_snr(instance.total_snr())
}

pub(crate) fn optimal_fraction_for_snr(s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Degenerate(format!("total SNR must be positive and finite, got {s}")));
    }
    if (s - 1.0).abs() < UNIT_SNR_GAP {
        let (t, _) = golden_section_max(|t| sum_throughput_from_snr(s, t), CLAMP_LOW, CLAMP_HIGH, GOLDEN_TOL);
        return Ok(t);
    }
    let w = lambert_w0((s - 1.0) / std::f64::consts::E)?;
    Ok(clamp_open_unit(s / (s + (s - 1.0) / w - 1.0)))
}

/// Positions of users with nonzero gain; sorting puts them first.
fn active_count(instance: &NetworkInstance) -> usize {
    instance.gains().as_slice().iter().take_while(|&&g| g > 0.0).count()
}

/// Solves on the positive-gain prefix and pads zero-gain users with rate 0
/// (decoded last in every permutation, where they interfere with no one).
fn on_active_users<F>(instance: &NetworkInstance, solve: F) -> Result<SchemeResult>
where
    F: FnOnce(&NetworkInstance) -> Result<SchemeResult>,
{
    let n = instance.len();
    let k = active_count(instance);
    if k == 0 {
        return Err(Error::Degenerate("every user has zero effective gain".into()));
    }
    if k == n {
        return solve(instance);
    }
    let sub = NetworkInstance::new(instance.users()[..k].to_vec(), *instance.constants())?;
    let mut result = solve(&sub)?;
    result.allocation.rates.resize(n, 0.0);
    if let Some(s) = result.allocation.schedule.as_mut() {
        for row in &mut s.permutations {
            row.extend(k + 1..=n);
        }
    }
    Ok(result)
}

pub fn scheme_a(instance: &NetworkInstance) -> Result<SchemeResult> {
    let t = optimal_transmit_fraction(instance)?;
    scheme_a_at(instance, t)
}

/// Scheme (a) evaluated at a caller-chosen T.
pub fn scheme_a_at(instance: &NetworkInstance, t: f64) -> Result<SchemeResult> {
    check_open_fraction(t)?;
    on_active_users(instance, |inst| {
        let allocation = rates_fixed_order(inst, t)?;
        let objective = allocation.min_rate();
        Ok(SchemeResult {
            scheme: Scheme::A,
            transmit_fraction: t,
            allocation,
            objective,
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        })
    })
}

pub fn scheme_b(instance: &NetworkInstance, mode: TimeShareMode) -> Result<SchemeResult> {
    let t = optimal_transmit_fraction(instance)?;
    scheme_b_at(instance, t, mode)
}

fn time_share(instance: &NetworkInstance, t: f64, mode: TimeShareMode) -> Result<(MinRateLpResult, Option<usize>)> {
    match mode {
        TimeShareMode::Full => Ok((solve_minrate_full(instance, t)?, None)),
        TimeShareMode::Greedy => {
            let g = greedy_timeshare(instance, t, instance.len() + 1)?;
            Ok((g.result, Some(g.iterations)))
        }
    }
}

/// Scheme (b) evaluated at a caller-chosen T.
pub fn scheme_b_at(instance: &NetworkInstance, t: f64, mode: TimeShareMode) -> Result<SchemeResult> {
    check_open_fraction(t)?;
    if mode == TimeShareMode::Full && instance.len() > MAX_FULL_SPACE_USERS {
        return Err(Error::Size {
            what: "users for full-space time sharing",
            actual: instance.len(),
            limit: MAX_FULL_SPACE_USERS,
        });
    }
    on_active_users(instance, |inst| {
        let (lp, greedy_iterations) = time_share(inst, t, mode)?;
        Ok(SchemeResult {
            scheme: Scheme::B,
            transmit_fraction: t,
            objective: lp.min_rate,
            allocation: RateAllocation {
                rates: lp.per_user_rates,
                transmit_fraction: t,
                schedule: Some(lp.schedule),
            },
            diagnostics: Diagnostics { converged: true, greedy_iterations, ..Default::default() },
        })
    })
}

/// A family of concave per-constraint rate curves
/// `f_n(T) = T log2(1 + a_n / (b_n + T/(1-T))) / divisor_n`.
#[derive(Debug, Clone)]
struct RateCurves {
    a: Vec<f64>,
    b: Vec<f64>,
    divisor: Vec<f64>,
}

impl RateCurves {
    fn fixed_order(coeffs: &DualCoefficients) -> Self {
        Self { a: coeffs.a.clone(), b: coeffs.b.clone(), divisor: vec![1.0; coeffs.a.len()] }
    }

    fn prefix_bounds(coeffs: &DualCoefficients) -> Self {
        Self {
            a: coeffs.c.clone(),
            b: vec![0.0; coeffs.c.len()],
            divisor: coeffs.remaining_count.iter().map(|&d| d as f64).collect(),
        }
    }

    fn len(&self) -> usize {
        self.a.len()
    }

    fn value(&self, n: usize, t: f64) -> f64 {
        let x = t / (1.0 - t);
        t * (self.a[n] / (self.b[n] + x)).ln_1p() / std::f64::consts::LN_2 / self.divisor[n]
    }

    fn values(&self, t: f64) -> Vec<f64> {
        (0..self.len()).map(|n| self.value(n, t)).collect()
    }

    fn min_value(&self, t: f64) -> f64 {
        (0..self.len()).map(|n| self.value(n, t)).fold(f64::INFINITY, f64::min)
    }

    /// Natural-log stationarity residual of `sum_n w_n f_n` in `x = T/(1-T)`;
    /// positive means T should grow. Decreasing in x.
    fn stationarity(&self, multipliers: &[f64], x: f64) -> f64 {
        (0..self.len())
            .map(|n| {
                let (a, b) = (self.a[n], self.b[n]);
                if a == 0.0 || multipliers[n] == 0.0 {
                    return 0.0;
                }
                let w = multipliers[n] / self.divisor[n];
                w * ((a / (b + x)).ln_1p() - a * x * (1.0 + x) / ((b + x) * (a + b + x)))
            })
            .sum()
    }

    /// T maximizing `sum_n multipliers_n f_n(T)`, clamped to the open interval.
    fn stationary_fraction(&self, multipliers: &[f64]) -> Result<Option<f64>> {
        let lo = 1e-12;
        if self.stationarity(multipliers, lo) <= 0.0 {
            return Ok(if multipliers.iter().all(|&m| m == 0.0) { None } else { Some(CLAMP_LOW) });
        }
        let mut hi = 1.0;
        while self.stationarity(multipliers, hi) > 0.0 {
            hi *= 2.0;
            if hi > 2f64.powi(60) {
                return Ok(Some(CLAMP_HIGH));
            }
        }
        let x = bisect_root(|x| self.stationarity(multipliers, x), lo, hi, ROOT_TOL)?;
        Ok(Some(clamp_open_unit(x / (1.0 + x))))
    }

    /// Golden-section maximum of the lower envelope over T.
    fn max_min(&self) -> (f64, f64) {
        golden_section_max(|t| self.min_value(t), CLAMP_LOW, CLAMP_HIGH, GOLDEN_TOL)
    }
}

/// Outcome of the dual loop in physical units.
#[derive(Debug, Clone)]
struct DualSolution {
    t: f64,
    rate: f64,
    multipliers: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Dual decomposition of `max R s.t. f_n(T) >= R`.
///
/// Rates are measured relative to the primal value at the uniform-multiplier
/// T so that the step scale is dimensionless; the common rate is capped by
/// the sum-throughput optimum, a bound every feasible point satisfies.
fn dual_equal_rate(curves: &RateCurves, config: &SubgradientConfig) -> Result<DualSolution> {
    let n = curves.len();
    // Work in units of the smallest single-curve peak so the optimum is at most 1.
    let mut reference = f64::INFINITY;
    for k in 0..n {
        let mut unit = vec![0.0; n];
        unit[k] = 1.0;
        let peak = match curves.stationary_fraction(&unit)? {
            Some(t) => curves.values(t.clamp(config.clamp_low, config.clamp_high))[k],
            None => 0.0,
        };
        reference = reference.min(peak);
    }
    if !(reference > 0.0) {
        return Err(Error::Degenerate("a user has no positive rate for any T".into()));
    }
    let uniform = vec![1.0 / n as f64; n];
    let t0 = curves
        .stationary_fraction(&uniform)?
        .ok_or_else(|| Error::Degenerate("no user contributes rate".into()))?;
    let min_at = |t: f64| curves.min_value(t) / reference;
    let mut last_t = t0;
    let mut best = (f64::NEG_INFINITY, t0);
    let mut iteration = 0usize;
    let (mut weighted_t, mut weight) = (0.0, 0.0);

    let outcome = projected_subgradient(
        |lambda| {
            iteration += 1;
            let t = curves.stationary_fraction(lambda)?.unwrap_or(last_t).clamp(config.clamp_low, config.clamp_high);
            last_t = t;
            let values: Vec<f64> = curves.values(t).iter().map(|v| v / reference).collect();
            let mut objective = values.iter().copied().fold(f64::INFINITY, f64::min);
            if objective > best.0 {
                best = (objective, t);
            }
            // Primal recovery from the running average of T, restarted at powers of two.
            let w = 1.0 / (iteration as f64).sqrt();
            weighted_t += w * t;
            weight += w;
            if iteration > 2 && iteration % 2 == 0 {
                let averaged = weighted_t / weight;
                let value = min_at(averaged);
                if value > best.0 {
                    best = (value, averaged);
                }
                objective = objective.max(value);
            }
            if iteration.is_power_of_two() {
                weighted_t = 0.0;
                weight = 0.0;
            }
            let total: f64 = lambda.iter().sum();
            let rate = if total > 0.0 { (1.0 / total).min(NORMALIZED_RATE_CAP) } else { NORMALIZED_RATE_CAP };
            let lagrangian: f64 = lambda.iter().zip(&values).map(|(l, v)| l * v).sum();
            let dual = rate.ln() - rate * total + lagrangian;
            Ok(DualEvaluation {
                objective,
                slacks: values.iter().map(|v| v - rate).collect(),
                upper_bound: Some(dual.exp()),
            })
        },
        config,
        n,
    )?;

    let t = best.1;
    Ok(DualSolution {
        t,
        rate: curves.min_value(t),
        multipliers: outcome.multipliers.iter().map(|l| l / reference).collect(),
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

fn equal_rate_allocation(n: usize, t: f64, rate: f64, schedule: Option<TimeShareSchedule>) -> RateAllocation {
    RateAllocation { rates: vec![rate; n], transmit_fraction: t, schedule }
}

/// Scheme (c): common-rate maximization with the fixed descending order.
pub fn equal_rate_fixed(instance: &NetworkInstance, config: &SubgradientConfig) -> Result<SchemeResult> {
    on_active_users(instance, |inst| {
        let coeffs = DualCoefficients::new(inst);
        let sol = dual_equal_rate(&RateCurves::fixed_order(&coeffs), config)?;
        Ok(SchemeResult {
            scheme: Scheme::C,
            transmit_fraction: sol.t,
            allocation: equal_rate_allocation(inst.len(), sol.t, sol.rate, None),
            objective: sol.rate,
            diagnostics: Diagnostics {
                iterations: sol.iterations,
                multipliers: sol.multipliers,
                converged: sol.converged,
                greedy_iterations: None,
            },
        })
    })
}

/// Largest common rate the fixed descending order supports at T.
pub fn fixed_order_min_rate(instance: &NetworkInstance, t: f64) -> Result<f64> {
    check_open_fraction(t)?;
    Ok(RateCurves::fixed_order(&DualCoefficients::new(instance)).min_value(t))
}

/// `min_n T log2(1 + c_n (1-T)/T) / (N + 1 - n)`: the largest common rate
/// the full rate region admits at T.
pub fn time_sharing_common_rate(instance: &NetworkInstance, t: f64) -> Result<f64> {
    check_open_fraction(t)?;
    Ok(RateCurves::prefix_bounds(&DualCoefficients::new(instance)).min_value(t))
}

/// Finds a time split reaching `rate` at T (the second subproblem).
fn realize_common_rate(
    instance: &NetworkInstance,
    t: f64,
    rate: f64,
    mode: TimeShareMode,
) -> Result<(TimeShareSchedule, Option<usize>)> {
    let mode = if instance.len() > MAX_FULL_SPACE_USERS { TimeShareMode::Greedy } else { mode };
    let (mut lp, greedy_iterations) = time_share(instance, t, mode)?;
    if lp.min_rate < rate - PROBLEM_TWO_TOL && mode == TimeShareMode::Greedy && instance.len() <= MAX_FULL_SPACE_USERS {
        // The greedy search can stall short of the region's common rate.
        lp = solve_minrate_full(instance, t)?;
    }
    if lp.min_rate < rate - PROBLEM_TWO_TOL {
        return Err(Error::Inconsistent(format!(
            "time sharing reaches {:.9} at T = {t:.9}, below the common rate {rate:.9}",
            lp.min_rate
        )));
    }
    Ok((lp.schedule, greedy_iterations))
}

/// Scheme (d): common-rate maximization with time sharing, solved through
/// its one-dimensional reformulation by golden-section search.
pub fn equal_rate_ts(instance: &NetworkInstance, mode: TimeShareMode) -> Result<SchemeResult> {
    on_active_users(instance, |inst| {
        let curves = RateCurves::prefix_bounds(&DualCoefficients::new(inst));
        let (t, rate) = curves.max_min();
        let (schedule, greedy_iterations) = realize_common_rate(inst, t, rate, mode)?;
        Ok(SchemeResult {
            scheme: Scheme::D,
            transmit_fraction: t,
            allocation: equal_rate_allocation(inst.len(), t, rate, Some(schedule)),
            objective: rate,
            diagnostics: Diagnostics { converged: true, greedy_iterations, ..Default::default() },
        })
    })
}

/// Scheme (d) through the dual loop on the prefix bounds.
pub fn equal_rate_ts_dual(
    instance: &NetworkInstance,
    config: &SubgradientConfig,
    mode: TimeShareMode,
) -> Result<SchemeResult> {
    on_active_users(instance, |inst| {
        let coeffs = DualCoefficients::new(inst);
        let sol = dual_equal_rate(&RateCurves::prefix_bounds(&coeffs), config)?;
        let (schedule, greedy_iterations) = realize_common_rate(inst, sol.t, sol.rate, mode)?;
        Ok(SchemeResult {
            scheme: Scheme::D,
            transmit_fraction: sol.t,
            allocation: equal_rate_allocation(inst.len(), sol.t, sol.rate, Some(schedule)),
            objective: sol.rate,
            diagnostics: Diagnostics {
                iterations: sol.iterations,
                multipliers: sol.multipliers,
                converged: sol.converged,
                greedy_iterations,
            },
        })
    })
}

/// Runs one scheme with its default settings: optimal T for (a)/(b), the
/// golden-section reformulation for (d).
pub fn solve_scheme(
    instance: &NetworkInstance,
    scheme: Scheme,
    mode: TimeShareMode,
    config: &SubgradientConfig,
) -> Result<SchemeResult> {
    match scheme {
        Scheme::A => scheme_a(instance),
        Scheme::B => scheme_b(instance, mode),
        Scheme::C => equal_rate_fixed(instance, config),
        Scheme::D => equal_rate_ts(instance, mode),
        Scheme::TdmaSum => Ok(tdma_sum_throughput(instance)?.into_scheme_result(Scheme::TdmaSum)),
        Scheme::TdmaCommon => Ok(tdma_common_throughput(instance)?.into_scheme_result(Scheme::TdmaCommon)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::example_instance;
    use crate::model::{sum_throughput, SystemConstants, UserChannel};
    use num_complex::Complex64;

    fn single_user() -> NetworkInstance {
        let c = SystemConstants {
            bs_power_watts: 1.0,
            noise_power_watts: 1e-14,
            eh_efficiency: 0.5,
            amp_efficiency: 0.38,
            antenna_gain_bs: 1.0,
        };
        NetworkInstance::new(vec![UserChannel::new(1, 3e-6, Complex64::new(0.8, 0.3), 1.0)], c).unwrap()
    }

    #[test]
    fn dual_coefficient_recurrences() {
        let inst = example_instance(2);
        let d = DualCoefficients::new(&inst);
        assert_eq!(d.b[1], 0.0);
        assert!((d.b[0] - d.a[1]).abs() < 1e-9);
        assert!((d.c[0] - (d.a[0] + d.a[1])).abs() < 1e-6);
        assert_eq!(d.remaining_count, vec![2, 1]);
    }

    #[test]
    fn optimal_fraction_examples() {
        let t1 = optimal_transmit_fraction(&example_instance(1)).unwrap();
        let t2 = optimal_transmit_fraction(&example_instance(2)).unwrap();
        assert!((t1 - 0.7958).abs() < 1e-3, "{t1}");
        assert!((t2 - 0.8895).abs() < 1e-3, "{t2}");
    }

    #[test]
    fn optimal_fraction_is_stationary() {
        for s in [1e-3, 0.5, 0.999_999_999_5, 1.0, 1.5, 10.0, 1e4, 1e9] {
            let t = optimal_fraction_for_snr(s).unwrap();
            let h = 1e-6;
            let d = (sum_throughput_from_snr(s, t + h) - sum_throughput_from_snr(s, t - h)) / (2.0 * h);
            assert!(d.abs() < 1e-6, "S={s} T={t} d={d}");
        }
        assert!(matches!(optimal_fraction_for_snr(0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn single_user_schemes_collapse() {
        let inst = single_user();
        let t = optimal_transmit_fraction(&inst).unwrap();
        let r_tot = sum_throughput(&inst, t).unwrap();
        let a = scheme_a(&inst).unwrap();
        assert!((a.objective - r_tot).abs() < 1e-12);
        let b = scheme_b(&inst, TimeShareMode::Full).unwrap();
        assert!((b.objective - a.objective).abs() < 1e-12);
        let d = equal_rate_ts(&inst, TimeShareMode::Full).unwrap();
        assert!((d.objective - r_tot).abs() < 1e-12);
        assert!((d.transmit_fraction - t).abs() < 1e-5);
        let c = equal_rate_fixed(&inst, &SubgradientConfig::default()).unwrap();
        assert!((c.objective - r_tot).abs() < 1e-9, "{} vs {r_tot}", c.objective);
        assert!((c.transmit_fraction - t).abs() < 1e-4);
    }

    #[test]
    fn example_one_schemes() {
        let inst = example_instance(1);
        let a = scheme_a(&inst).unwrap();
        assert!((a.objective - 0.67).abs() > 0.2, "descending order gives the 0.92 corner");
        let b = scheme_b(&inst, TimeShareMode::Full).unwrap();
        assert!((b.objective - 2.7891).abs() < 2e-3);
        let d = equal_rate_ts(&inst, TimeShareMode::Full).unwrap();
        assert!((d.objective - 2.7891).abs() < 2e-3);
        assert!((d.transmit_fraction - 0.7958).abs() < 2e-3);
        let c = equal_rate_fixed(&inst, &SubgradientConfig::default()).unwrap();
        assert!(c.objective <= d.objective + 2e-3);
    }

    #[test]
    fn example_two_time_sharing_is_not_enough() {
        let inst = example_instance(2);
        let b = scheme_b(&inst, TimeShareMode::Full).unwrap();
        let d = equal_rate_ts(&inst, TimeShareMode::Full).unwrap();
        assert!(d.objective > b.objective + 0.1);
        let t = optimal_transmit_fraction(&inst).unwrap();
        assert!((b.allocation.sum_rate() - sum_throughput(&inst, t).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn dual_loop_agrees_with_golden_on_examples() {
        for id in [1, 2] {
            let inst = example_instance(id);
            let g = equal_rate_ts(&inst, TimeShareMode::Full).unwrap();
            let d = equal_rate_ts_dual(&inst, &SubgradientConfig::default(), TimeShareMode::Full).unwrap();
            assert!((g.objective - d.objective).abs() < 1e-5, "{} vs {}", g.objective, d.objective);
        }
    }

    #[test]
    fn zero_gain_user_is_ignored() {
        let c = crate::examples::example_constants();
        let users = vec![
            UserChannel::new(1, 2.4e-6, Complex64::new(1.0, 0.0), 1.0),
            UserChannel::new(2, 2.1e-6, Complex64::new(0.0, 0.0), 1.0),
        ];
        let inst = NetworkInstance::new(users, c).unwrap();
        let d = equal_rate_ts(&inst, TimeShareMode::Full).unwrap();
        assert_eq!(d.allocation.rates.len(), 2);
        assert_eq!(d.allocation.rates[1], 0.0);
        assert!(d.objective > 0.0);
        assert_eq!(d.allocation.schedule.unwrap().permutations[0], vec![1, 2]);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("tdma-sum".parse::<Scheme>().unwrap(), Scheme::TdmaSum);
        assert_eq!("D".parse::<Scheme>().unwrap(), Scheme::D);
        assert!("e".parse::<Scheme>().is_err());
        assert_eq!("greedy".parse::<TimeShareMode>().unwrap(), TimeShareMode::Greedy);
    }
}
