//! Time-sharing over SIC decoding orders at a fixed transmit fraction T.
//!
//! For a set of permutations the best time split is the LP
//! `max R_min s.t. sum_m c[n][m] tau_m >= R_min, sum tau = 1, tau >= 0`,
//! where `c[n][m]` is user n's rate when permutation m is used alone.
//! [`greedy_timeshare`] grows the permutation set one order at a time
//! instead of enumerating all `N!` of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_open_fraction, rates_for_order, rates_timeshare, validate_permutation_rows, zero_based, NetworkInstance,
    TimeShareSchedule,
};
use crate::numerics::{solve_lp, LinearProgram, LpStatus, Relation};

/// Largest N for which all `N!` permutations are enumerated (5040 columns).
pub const MAX_FULL_SPACE_USERS: usize = 7;

/// Relative give on the minimum rate when searching the optimal face.
const INTERIOR_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinRateLpResult {
    pub min_rate: f64,
    pub schedule: TimeShareSchedule,
    pub per_user_rates: Vec<f64>,
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (1..=n).collect();
    let mut out = vec![current.clone()];
    // Next lexicographic permutation until the sequence is descending.
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
    out
}

/// Rate matrix `c[n][m]`: user n's rate at T under permutation m alone.
pub fn rate_columns(instance: &NetworkInstance, t: f64, permutations: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let weights = instance.snr_weights();
    let cols: Vec<Vec<f64>> = permutations
        .iter()
        .map(|row| rates_for_order(&weights, t, &zero_based(row)))
        .collect();
    (0..instance.len()).map(|n| cols.iter().map(|c| c[n]).collect()).collect()
}

/// Builds the min-rate LP over `(tau_1..tau_M, R_min)`.
pub fn build_minrate_lp(instance: &NetworkInstance, t: f64, permutations: &[Vec<usize>]) -> Result<LinearProgram> {
    check_open_fraction(t)?;
    validate_permutation_rows(permutations, Some(instance.len()))?;
    let m = permutations.len();
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for row in rate_columns(instance, t, permutations) {
        let mut coeffs = row;
        coeffs.push(-1.0);
        lp.add_constraint(coeffs, Relation::Ge, 0.0);
    }
    let mut simplex_row = vec![1.0; m + 1];
    simplex_row[m] = 0.0;
    lp.add_constraint(simplex_row, Relation::Eq, 1.0);
    Ok(lp)
}

/// Rescales the user rows so the largest rate coefficient is 1, keeping
/// the simplex pivot tolerances meaningful. Returns the factor.
fn normalize_rate_rows(lp: &mut LinearProgram, n_users: usize, m: usize) -> f64 {
    let scale = lp.constraints[..n_users]
        .iter()
        .flat_map(|c| c.coefficients[..m].iter().copied())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        for c in &mut lp.constraints[..n_users] {
            c.coefficients[..m].iter_mut().for_each(|v| *v /= scale);
        }
        scale
    } else {
        1.0
    }
}

fn solve_optimal(lp: &LinearProgram, what: &str) -> Result<Vec<f64>> {
    let sol = solve_lp(lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Inconsistent(format!("{what} LP returned {:?}", sol.status)));
    }
    Ok(sol.values)
}

fn result_from_fractions(
    instance: &NetworkInstance,
    t: f64,
    permutations: &[Vec<usize>],
    raw: &[f64],
) -> Result<MinRateLpResult> {
    let mut fractions: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = fractions.iter().sum();
    fractions.iter_mut().for_each(|f| *f /= total);
    let schedule = TimeShareSchedule { permutations: permutations.to_vec(), fractions };
    let per_user_rates = rates_timeshare(instance, t, &schedule)?.rates;
    let min_rate = per_user_rates.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MinRateLpResult { min_rate, schedule, per_user_rates })
}

pub fn solve_minrate(instance: &NetworkInstance, t: f64, permutations: &[Vec<usize>]) -> Result<MinRateLpResult> {
    let mut lp = build_minrate_lp(instance, t, permutations)?;
    let m = permutations.len();
    normalize_rate_rows(&mut lp, instance.len(), m);
    let values = solve_optimal(&lp, "min-rate")?;
    result_from_fractions(instance, t, permutations, &values[..m])
}

/// An optimal split in the relative interior of the optimal face: the
/// average of, for each user, a split maximizing that user's rate while
/// everyone keeps the optimal minimum. Users tied at the minimum here are
/// tied in every optimal split.
pub fn solve_minrate_interior(
    instance: &NetworkInstance,
    t: f64,
    permutations: &[Vec<usize>],
) -> Result<MinRateLpResult> {
    let base = solve_minrate(instance, t, permutations)?;
    let n = instance.len();
    let m = permutations.len();
    if m == 1 || n == 1 {
        return Ok(base);
    }
    let columns = rate_columns(instance, t, permutations);
    let scale = columns.iter().flatten().copied().fold(0.0, f64::max);
    let floor = base.min_rate / scale * (1.0 - INTERIOR_SLACK);
    let mut average = vec![0.0; m];
    for target in 0..n {
        let mut lp = LinearProgram::maximize(columns[target].iter().map(|c| c / scale).collect());
        for row in &columns {
            lp.add_constraint(row.iter().map(|c| c / scale).collect(), Relation::Ge, floor);
        }
        lp.add_constraint(vec![1.0; m], Relation::Eq, 1.0);
        let values = solve_optimal(&lp, "interior")?;
        for (acc, v) in average.iter_mut().zip(&values) {
            *acc += v.max(0.0) / n as f64;
        }
    }
    let interior = result_from_fractions(instance, t, permutations, &average)?;
    Ok(if interior.min_rate >= base.min_rate * (1.0 - 2.0 * INTERIOR_SLACK) { interior } else { base })
}

/// Min-rate LP over every decoding order (full-space search).
pub fn solve_minrate_full(instance: &NetworkInstance, t: f64) -> Result<MinRateLpResult> {
    if instance.len() > MAX_FULL_SPACE_USERS {
        return Err(Error::Size {
            what: "users for full-space time sharing",
            actual: instance.len(),
            limit: MAX_FULL_SPACE_USERS,
        });
    }
    solve_minrate(instance, t, &all_permutations(instance.len()))
}

/// Result of the greedy construction plus its convergence history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOutcome {
    pub result: MinRateLpResult,
    /// Main-loop iterations that added a new permutation.
    pub iterations: usize,
    /// Minimum rate after the seed and after each added permutation.
    pub min_rate_trace: Vec<f64>,
}

impl GreedyOutcome {
    /// First iteration whose minimum rate is within `tol` of the final one.
    pub fn iterations_to_converge(&self, tol: f64) -> usize {
        let last = *self.min_rate_trace.last().unwrap();
        self.min_rate_trace.iter().position(|&r| r >= last - tol).unwrap_or(0)
    }
}

/// Next decoding order from the current rates: higher-rate users are
/// decoded earlier; a user with no higher rate than another never precedes
/// it, and exact ties fall back to ascending position.
fn order_by_rate(rates: &[f64]) -> Vec<usize> {
    let scale = rates.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    // Quantize so rates equal up to LP round-off compare as ties.
    let key = |r: f64| (r / scale * 1e9).round() as i64;
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| key(rates[b]).cmp(&key(rates[a])).then(a.cmp(&b)));
    order.into_iter().map(|u| u + 1).collect()
}

/// Greedy time-sharing construction with at most `max_iterations` loop
/// passes. Seeds with the descending-gain order and stops at the limit or
/// when the rate-sorted order is already in the set. Rates between passes
/// come from [`solve_minrate_interior`], so ties reflect genuine bottlenecks
/// rather than the vertex the simplex happened to stop at.
pub fn greedy_timeshare(instance: &NetworkInstance, t: f64, max_iterations: usize) -> Result<GreedyOutcome> {
    check_open_fraction(t)?;
    if max_iterations == 0 {
        return Err(Error::Domain("greedy iteration limit must be >= 1".into()));
    }
    let n = instance.len();
    let seed: Vec<usize> = (1..=n).collect();
    let schedule = TimeShareSchedule { permutations: vec![seed.clone()], fractions: vec![1.0] };
    let rates = rates_timeshare(instance, t, &schedule)?.rates;
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let mut result = MinRateLpResult { min_rate, schedule, per_user_rates: rates };
    let mut permutations = vec![seed];
    let mut trace = vec![min_rate];
    let mut iterations = 0;

    for _ in 0..max_iterations {
        let candidate = order_by_rate(&result.per_user_rates);
        if permutations.contains(&candidate) {
            break;
        }
        permutations.push(candidate);
        iterations += 1;
        let next = solve_minrate_interior(instance, t, &permutations)?;
        // Adding a column cannot lower the LP optimum; keep the incumbent
        // if round-off says otherwise.
        if next.min_rate >= result.min_rate * (1.0 - 2.0 * INTERIOR_SLACK) - 1e-12 {
            result = next;
        } else {
            result.schedule.permutations.push(permutations.last().unwrap().clone());
            result.schedule.fractions.push(0.0);
        }
        trace.push(result.min_rate);
    }
    Ok(GreedyOutcome { result, iterations, min_rate_trace: trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::example_instance;
    use crate::model::{rates_fixed_order, sum_throughput, SystemConstants, UserChannel};
    use num_complex::Complex64;

    fn equal_pair() -> NetworkInstance {
        let c = SystemConstants {
            bs_power_watts: 1.0,
            noise_power_watts: 1e-14,
            eh_efficiency: 0.5,
            amp_efficiency: 0.38,
            antenna_gain_bs: 1.0,
        };
        let u = |i| UserChannel::new(i, 2e-6, Complex64::new(1.0, 0.0), 1.0);
        NetworkInstance::new(vec![u(1), u(2)], c).unwrap()
    }

    #[test]
    fn permutation_enumeration() {
        assert_eq!(all_permutations(1), vec![vec![1]]);
        assert_eq!(all_permutations(3).len(), 6);
        assert_eq!(all_permutations(3)[1], vec![1, 3, 2]);
        assert_eq!(all_permutations(5).len(), 120);
    }

    #[test]
    fn single_user_lp_is_trivial() {
        let c = SystemConstants {
            bs_power_watts: 1.0,
            noise_power_watts: 1e-14,
            eh_efficiency: 0.5,
            amp_efficiency: 0.38,
            antenna_gain_bs: 1.0,
        };
        let inst = NetworkInstance::new(vec![UserChannel::new(1, 1e-6, Complex64::new(1.0, 0.0), 1.0)], c).unwrap();
        let r = solve_minrate_full(&inst, 0.5).unwrap();
        assert!((r.min_rate - sum_throughput(&inst, 0.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn lp_columns_share_the_same_sum() {
        let inst = example_instance(1);
        let perms = all_permutations(2);
        let lp = build_minrate_lp(&inst, 0.7958, &perms).unwrap();
        let sums: Vec<f64> = (0..perms.len())
            .map(|m| lp.constraints[..2].iter().map(|c| c.coefficients[m]).sum())
            .collect();
        assert!((sums[0] - sums[1]).abs() < 1e-12);
    }

    #[test]
    fn duplicate_rows_rejected() {
        let inst = example_instance(1);
        let err = build_minrate_lp(&inst, 0.5, &[vec![1, 2], vec![1, 2]]).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn example_one_full_space() {
        let inst = example_instance(1);
        let r = solve_minrate_full(&inst, 0.7958).unwrap();
        assert!((r.min_rate - 2.7891).abs() < 2e-3);
        // rows are (1,2), (2,1)
        assert!((r.schedule.fractions[0] - 0.5312).abs() < 5e-3);
        assert!((r.schedule.fractions[1] - 0.4688).abs() < 5e-3);
        let total: f64 = r.per_user_rates.iter().sum();
        assert!((total - sum_throughput(&inst, 0.7958).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn one_permutation_gives_its_minimum() {
        let inst = example_instance(2);
        let r = solve_minrate(&inst, 0.6, &[vec![1, 2]]).unwrap();
        let fixed = rates_fixed_order(&inst, 0.6).unwrap();
        assert!((r.min_rate - fixed.min_rate()).abs() < 1e-12);
    }

    #[test]
    fn full_space_size_guard() {
        let c = SystemConstants {
            bs_power_watts: 1.0,
            noise_power_watts: 1e-14,
            eh_efficiency: 0.5,
            amp_efficiency: 0.38,
            antenna_gain_bs: 1.0,
        };
        let users = (1..=8).map(|i| UserChannel::new(i, 1e-6, Complex64::new(1.0, 0.0), 1.0)).collect();
        let inst = NetworkInstance::new(users, c).unwrap();
        assert!(matches!(solve_minrate_full(&inst, 0.5), Err(Error::Size { .. })));
    }

    #[test]
    fn greedy_on_symmetric_pair() {
        let inst = equal_pair();
        let g = greedy_timeshare(&inst, 0.7, 10).unwrap();
        assert_eq!(g.iterations, 1);
        assert_eq!(g.result.schedule.permutations, vec![vec![1, 2], vec![2, 1]]);
        let r = &g.result.per_user_rates;
        assert!((r[0] - r[1]).abs() < 1e-9);
    }

    #[test]
    fn greedy_example_one() {
        let inst = example_instance(1);
        let g = greedy_timeshare(&inst, 0.7958, 3).unwrap();
        assert!((g.result.min_rate - 2.7891).abs() < 2e-3);
        assert!(g.min_rate_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn rate_order_ties_go_by_position() {
        assert_eq!(order_by_rate(&[1.0, 3.0, 1.0]), vec![2, 1, 3]);
        assert_eq!(order_by_rate(&[2.0, 2.0 + 1e-14]), vec![1, 2]);
    }
}
