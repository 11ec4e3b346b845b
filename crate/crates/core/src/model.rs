//! Domain types for a harvest-then-transmit uplink NOMA network and the
//! closed-form energy, rate and metric formulas built on them.
//!
//! Users inside a [`NetworkInstance`] are kept sorted by effective gain,
//! strongest first. Every rate vector in this crate is indexed by that
//! sorted position, and "user n" in a schedule means position `n` (1-based).

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest network for which region membership enumerates every subset.
pub const MAX_REGION_USERS: usize = 20;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserChannel {
    /// Original 1-based user id, stable across the gain sort.
    pub index: usize,
    pub distance_m: Option<f64>,
    /// Linear power ratio `L0n`.
    pub path_loss: f64,
    pub fading: Complex64,
    /// Linear power ratio `Gn`.
    pub antenna_gain: f64,
}

impl UserChannel {
    pub fn new(index: usize, path_loss: f64, fading: Complex64, antenna_gain: f64) -> Self {
        Self { index, distance_m: None, path_loss, fading, antenna_gain }
    }

    pub fn with_distance(mut self, distance_m: f64) -> Self {
        self.distance_m = Some(distance_m);
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Error::InvalidInstance(format!("user {}: {what} must be positive and finite, got {v}", self.index))
        };
        if !(self.path_loss > 0.0 && self.path_loss.is_finite()) {
            return Err(bad("path_loss", self.path_loss));
        }
        if !(self.antenna_gain > 0.0 && self.antenna_gain.is_finite()) {
            return Err(bad("antenna_gain", self.antenna_gain));
        }
        if let Some(d) = self.distance_m {
            if !(d > 0.0 && d.is_finite()) {
                return Err(bad("distance", d));
            }
        }
        if !(self.fading.re.is_finite() && self.fading.im.is_finite()) {
            return Err(Error::InvalidInstance(format!("user {}: non-finite fading", self.index)));
        }
        Ok(())
    }
}

/// Global link-budget constants, all powers in watts and gains linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConstants {
    pub bs_power_watts: f64,
    pub noise_power_watts: f64,
    pub eh_efficiency: f64,
    pub amp_efficiency: f64,
    pub antenna_gain_bs: f64,
}

impl SystemConstants {
    /// Overall efficiency `eta = eta1 * eta2`.
    pub fn eta(&self) -> f64 {
        self.eh_efficiency * self.amp_efficiency
    }

    /// Transmit SNR reference `rho = P0 / N0`.
    pub fn rho(&self) -> f64 {
        self.bs_power_watts / self.noise_power_watts
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInstance(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("bs_power_watts", self.bs_power_watts)?;
        positive("noise_power_watts", self.noise_power_watts)?;
        positive("antenna_gain_bs", self.antenna_gain_bs)?;
        for (name, v) in [("eh_efficiency", self.eh_efficiency), ("amp_efficiency", self.amp_efficiency)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInstance(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Round-trip channel gains `g_n`, one per user in sorted order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveGains(Vec<f64>);

impl EffectiveGains {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for EffectiveGains {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `g = G0^2 Gn^2 L^2 |h|^4`.
pub fn channel_gain(antenna_gain_bs: f64, user: &UserChannel) -> f64 {
    let h2 = user.fading.norm_sqr();
    let amplitude = antenna_gain_bs * user.antenna_gain * user.path_loss * h2;
    amplitude * amplitude
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    users: Vec<UserChannel>,
    constants: SystemConstants,
    gains: EffectiveGains,
}

impl NetworkInstance {
    /// Validates the inputs and sorts users by effective gain, strongest
    /// first; equal gains keep ascending original id.
    pub fn new(mut users: Vec<UserChannel>, constants: SystemConstants) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::InvalidInstance("at least one user is required".into()));
        }
        constants.validate()?;
        for u in &users {
            u.validate()?;
        }
        let mut ids: Vec<usize> = users.iter().map(|u| u.index).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInstance("user ids must be unique".into()));
        }
        users.sort_by(|a, b| {
            let (ga, gb) = (channel_gain(constants.antenna_gain_bs, a), channel_gain(constants.antenna_gain_bs, b));
            gb.total_cmp(&ga).then(a.index.cmp(&b.index))
        });
        let gains = EffectiveGains(users.iter().map(|u| channel_gain(constants.antenna_gain_bs, u)).collect());
        if gains.0.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidInstance("effective gain overflow".into()));
        }
        Ok(Self { users, constants, gains })
    }

    pub fn users(&self) -> &[UserChannel] {
        &self.users
    }

    pub fn constants(&self) -> &SystemConstants {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn eta(&self) -> f64 {
        self.constants.eta()
    }

    pub fn rho(&self) -> f64 {
        self.constants.rho()
    }

    pub fn gains(&self) -> &EffectiveGains {
        &self.gains
    }

    /// Per-user SNR weights `a_n = eta * rho * g_n`.
    pub fn snr_weights(&self) -> Vec<f64> {
        let k = self.eta() * self.rho();
        self.gains.0.iter().map(|g| k * g).collect()
    }

    /// `S = eta * rho * sum(g)`.
    pub fn total_snr(&self) -> f64 {
        self.eta() * self.rho() * self.gains.total()
    }

    /// Same channels with a different base-station power.
    pub fn with_bs_power(&self, bs_power_watts: f64) -> Result<Self> {
        let constants = SystemConstants { bs_power_watts, ..self.constants };
        Self::new(self.users.clone(), constants)
    }
}

pub fn effective_gains(instance: &NetworkInstance) -> EffectiveGains {
    instance.gains.clone()
}

fn check_closed_fraction(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("T must lie in [0, 1], got {t}")))
    }
}

pub(crate) fn check_open_fraction(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("T must lie in (0, 1), got {t}")))
    }
}

/// `E = G0 Gn eta1 L |h|^2 P0 (1 - T)` in joules per unit frame.
pub fn harvested_energy_joules(
    antenna_gain_bs: f64,
    antenna_gain_user: f64,
    eh_efficiency: f64,
    path_loss: f64,
    fading_power: f64,
    bs_power_watts: f64,
    t: f64,
) -> f64 {
    antenna_gain_bs * antenna_gain_user * eh_efficiency * path_loss * fading_power * bs_power_watts * (1.0 - t)
}

pub fn harvested_energy(instance: &NetworkInstance, user: &UserChannel, t: f64) -> Result<f64> {
    check_closed_fraction(t)?;
    let c = instance.constants();
    Ok(harvested_energy_joules(
        c.antenna_gain_bs,
        user.antenna_gain,
        c.eh_efficiency,
        user.path_loss,
        user.fading.norm_sqr(),
        c.bs_power_watts,
        t,
    ))
}

/// `P_n = E_n / T`; undefined when no transmit time is allocated.
pub fn transmit_power(instance: &NetworkInstance, user: &UserChannel, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Domain("transmit power is undefined at T = 0".into()));
    }
    Ok(harvested_energy(instance, user, t)? / t)
}

/// A time-sharing plan: row `m` of `permutations` lists 1-based user
/// positions in decoding order and runs for fraction `fractions[m]` of T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeShareSchedule {
    pub permutations: Vec<Vec<usize>>,
    pub fractions: Vec<f64>,
}

impl TimeShareSchedule {
    pub fn new(permutations: Vec<Vec<usize>>, fractions: Vec<f64>) -> Result<Self> {
        let s = Self { permutations, fractions };
        s.validate_rows(None)?;
        let total: f64 = s.fractions.iter().sum();
        if s.fractions.iter().any(|&f| !(f >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Schema(format!("fractions must be nonnegative and sum to 1, sum = {total}")));
        }
        Ok(s)
    }

    /// A single decoding order used for the whole transmit phase.
    pub fn single(order: Vec<usize>) -> Result<Self> {
        Self::new(vec![order], vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }

    /// Checks that rows are distinct permutations of `1..=n` (n defaults to
    /// the first row's width).
    pub fn validate_rows(&self, n: Option<usize>) -> Result<()> {
        validate_permutation_rows(&self.permutations, n)?;
        if self.fractions.len() != self.permutations.len() {
            return Err(Error::Schema(format!(
                "{} fractions for {} permutations",
                self.fractions.len(),
                self.permutations.len()
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_permutation_rows(rows: &[Vec<usize>], n: Option<usize>) -> Result<()> {
    let Some(first) = rows.first() else {
        return Err(Error::Schema("at least one permutation is required".into()));
    };
    let n = n.unwrap_or(first.len());
    for (m, row) in rows.iter().enumerate() {
        let mut seen = vec![false; n];
        if row.len() != n {
            return Err(Error::Schema(format!("row {m} has {} entries, expected {n}", row.len())));
        }
        for &u in row {
            if u == 0 || u > n || std::mem::replace(&mut seen[u - 1], true) {
                return Err(Error::Schema(format!("row {m} is not a permutation of 1..={n}: {row:?}")));
            }
        }
    }
    for (i, a) in rows.iter().enumerate() {
        if rows[..i].iter().any(|b| b == a) {
            return Err(Error::Schema(format!("duplicate permutation row {a:?}")));
        }
    }
    Ok(())
}

/// Per-user spectral efficiencies (bps/Hz) and the time split producing them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateAllocation {
    pub rates: Vec<f64>,
    pub transmit_fraction: f64,
    pub schedule: Option<TimeShareSchedule>,
}

impl RateAllocation {
    pub fn harvest_fraction(&self) -> f64 {
        1.0 - self.transmit_fraction
    }

    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    pub fn min_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `T log2(1 + total_snr (1 - T) / T)`, the NOMA sum throughput.
pub fn sum_throughput_from_snr(total_snr: f64, t: f64) -> f64 {
    t * (total_snr * (1.0 - t) / t).ln_1p() / LN_2
}

/// Rates for one SIC decoding order given as 0-based positions, earliest
/// decoded first. A user is interfered by everyone decoded after it.
pub fn rates_for_order(weights: &[f64], t: f64, order: &[usize]) -> Vec<f64> {
    let x = t / (1.0 - t);
    let mut rates = vec![0.0; weights.len()];
    let mut interference = 0.0;
    for &u in order.iter().rev() {
        let a = weights[u];
        rates[u] = t * (a / (interference + x)).ln_1p() / LN_2;
        interference += a;
    }
    rates
}

/// Rates under the stored order: strongest user decoded first, the weakest
/// decoded last without interference.
pub fn rates_fixed_order(instance: &NetworkInstance, t: f64) -> Result<RateAllocation> {
    check_open_fraction(t)?;
    let order: Vec<usize> = (0..instance.len()).collect();
    Ok(RateAllocation {
        rates: rates_for_order(&instance.snr_weights(), t, &order),
        transmit_fraction: t,
        schedule: None,
    })
}

pub(crate) fn zero_based(row: &[usize]) -> Vec<usize> {
    row.iter().map(|u| u - 1).collect()
}

pub fn rates_timeshare(instance: &NetworkInstance, t: f64, schedule: &TimeShareSchedule) -> Result<RateAllocation> {
    check_open_fraction(t)?;
    schedule.validate_rows(Some(instance.len()))?;
    let weights = instance.snr_weights();
    let mut rates = vec![0.0; instance.len()];
    for (row, &tau) in schedule.permutations.iter().zip(&schedule.fractions) {
        for (acc, r) in rates.iter_mut().zip(rates_for_order(&weights, t, &zero_based(row))) {
            *acc += tau * r;
        }
    }
    Ok(RateAllocation { rates, transmit_fraction: t, schedule: Some(schedule.clone()) })
}

pub fn sum_throughput(instance: &NetworkInstance, t: f64) -> Result<f64> {
    check_open_fraction(t)?;
    Ok(sum_throughput_from_snr(instance.total_snr(), t))
}

/// Whether `rates` satisfies every subset sum-rate bound of the region at T.
pub fn region_membership(instance: &NetworkInstance, t: f64, rates: &[f64]) -> Result<bool> {
    check_open_fraction(t)?;
    let n = instance.len();
    if rates.len() != n {
        return Err(Error::Schema(format!("{} rates for {n} users", rates.len())));
    }
    if n > MAX_REGION_USERS {
        return Err(Error::Size { what: "users for region enumeration", actual: n, limit: MAX_REGION_USERS });
    }
    if rates.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::Domain("rates must be nonnegative".into()));
    }
    let weights = instance.snr_weights();
    for mask in 1u32..(1u32 << n) {
        let (mut snr, mut total) = (0.0, 0.0);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                snr += weights[i];
                total += rates[i];
            }
        }
        let bound = sum_throughput_from_snr(snr, t);
        if total > bound + 1e-9 * bound.max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Most users [`region_boundary`] samples.
pub const MAX_BOUNDARY_USERS: usize = 3;

/// Corner points (one per decoding order) and `samples - 2` evenly spaced
/// points along each edge of the dominant face, walking the corners so
/// neighbours differ by one adjacent swap. Every point time-shares two
/// corners, so the full-set sum bound is active.
pub fn region_boundary(instance: &NetworkInstance, t: f64, samples: usize) -> Result<Vec<Vec<f64>>> {
    check_open_fraction(t)?;
    let n = instance.len();
    if n > MAX_BOUNDARY_USERS {
        return Err(Error::Size { what: "users for boundary sampling", actual: n, limit: MAX_BOUNDARY_USERS });
    }
    if samples < 2 {
        return Err(Error::Domain(format!("samples must be >= 2, got {samples}")));
    }
    let cycle: Vec<Vec<usize>> = match n {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0], vec![2, 1, 0], vec![2, 0, 1], vec![0, 2, 1]],
    };
    let weights = instance.snr_weights();
    let corners: Vec<Vec<f64>> = cycle.iter().map(|order| rates_for_order(&weights, t, order)).collect();
    let mut points = corners.clone();
    let edges = match corners.len() {
        1 => 0,
        2 => 1,
        m => m,
    };
    for e in 0..edges {
        let (p, q) = (&corners[e], &corners[(e + 1) % corners.len()]);
        for k in 1..samples - 1 {
            let w = k as f64 / (samples - 1) as f64;
            points.push(p.iter().zip(q).map(|(a, b)| (1.0 - w) * a + w * b).collect());
        }
    }
    Ok(points)
}

/// Jain's fairness index `(sum r)^2 / (N sum r^2)`.
pub fn jain_index(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::UndefinedMetric("Jain index of an empty rate vector".into()));
    }
    if rates.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::Domain("rates must be nonnegative".into()));
    }
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if sq == 0.0 {
        return Err(Error::UndefinedMetric("Jain index of an all-zero rate vector".into()));
    }
    Ok(sum * sum / (rates.len() as f64 * sq))
}

/// Delivered bits per joule of BS energy, `N R_eq / (P0 (1 - T))`.
pub fn energy_efficiency(n_users: usize, equal_rate: f64, bs_power_watts: f64, t: f64) -> Result<f64> {
    check_open_fraction(t)?;
    if !(bs_power_watts > 0.0) {
        return Err(Error::Domain(format!("P0 must be positive, got {bs_power_watts}")));
    }
    Ok(n_users as f64 * equal_rate / (bs_power_watts * (1.0 - t)))
}
