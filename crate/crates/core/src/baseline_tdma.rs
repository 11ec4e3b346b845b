//! Orthogonal (TDMA) harvest-then-transmit reference.
//!
//! After the common harvesting phase of length `1 - T`, user n transmits
//! alone in a slot of length `tau_n`, with `sum tau_n = T`, spending all of
//! its harvested energy there:
//! `R_n = tau_n log2(1 + eta rho g_n (1 - T) / tau_n)`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NetworkInstance, RateAllocation};
use crate::numerics::{golden_section_max, CLAMP_HIGH, CLAMP_LOW};
use crate::schedulers::{Diagnostics, Scheme, SchemeResult};

const GOLDEN_TOL: f64 = 1e-10;
const RATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdmaAllocation {
    pub transmit_fraction: f64,
    pub slots: Vec<f64>,
    pub rates: Vec<f64>,
    pub objective: f64,
}

impl TdmaAllocation {
    pub fn into_scheme_result(self, scheme: Scheme) -> SchemeResult {
        SchemeResult {
            scheme,
            transmit_fraction: self.transmit_fraction,
            objective: self.objective,
            allocation: RateAllocation { rates: self.rates, transmit_fraction: self.transmit_fraction, schedule: None },
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        }
    }
}

/// Rate of a user with received-energy SNR `energy` in a slot of length
/// `slot`; zero for an empty slot.
pub fn slot_rate(energy: f64, slot: f64) -> f64 {
    if slot <= 0.0 || energy <= 0.0 {
        0.0
    } else {
        slot * (energy / slot).ln_1p() / LN_2
    }
}

/// Shortest slot giving `rate` with energy `energy`, or infinity when the
/// rate exceeds the energy-limited ceiling `energy / ln 2`.
///
/// With `u = energy / slot` the condition is `ln(1 + u) = k u`,
/// `k = rate ln 2 / energy`; Newton steps from the right of the root
/// decrease monotonically onto it because the left side is concave.
pub fn minimal_slot(energy: f64, rate: f64) -> f64 {
    if rate <= 0.0 {
        return 0.0;
    }
    if energy <= 0.0 {
        return f64::INFINITY;
    }
    let k = rate * LN_2 / energy;
    if k >= 1.0 {
        return f64::INFINITY;
    }
    let h = |u: f64| u.ln_1p() - k * u;
    let mut u = ((2.0 / k) * (2.0 / k).ln()).max(1.0);
    while h(u) > 0.0 {
        u *= 2.0;
    }
    for _ in 0..200 {
        let hu = h(u);
        let d = 1.0 / (1.0 + u) - k;
        if hu == 0.0 || d >= 0.0 {
            break;
        }
        let next = u - hu / d;
        if next >= u || (u - next) <= 1e-15 * u {
            u = next.min(u);
            break;
        }
        u = next;
    }
    energy / u
}

fn energies(instance: &NetworkInstance, t: f64) -> Vec<f64> {
    instance.snr_weights().iter().map(|a| a * (1.0 - t)).collect()
}

/// Best slot split at fixed T for the sum rate. Equal marginal rates force
/// a common per-slot SNR, which the slot budget pins to `sum(e) / T`.
pub fn tdma_sum_at(instance: &NetworkInstance, t: f64) -> TdmaAllocation {
    let e = energies(instance, t);
    let total: f64 = e.iter().sum();
    let slots: Vec<f64> = if total > 0.0 {
        e.iter().map(|ei| t * ei / total).collect()
    } else {
        vec![t / e.len() as f64; e.len()]
    };
    let rates: Vec<f64> = e.iter().zip(&slots).map(|(&ei, &s)| slot_rate(ei, s)).collect();
    let objective = rates.iter().sum();
    TdmaAllocation { transmit_fraction: t, slots, rates, objective }
}

pub fn tdma_sum_throughput(instance: &NetworkInstance) -> Result<TdmaAllocation> {
    if !(instance.total_snr() > 0.0) {
        return Err(Error::Degenerate("every user has zero effective gain".into()));
    }
    let (t, _) = golden_section_max(|t| tdma_sum_at(instance, t).objective, CLAMP_LOW, CLAMP_HIGH, GOLDEN_TOL);
    Ok(tdma_sum_at(instance, t))
}

/// Largest common rate at fixed T and the minimal slots that carry it.
fn common_rate_at(energy: &[f64], t: f64) -> (f64, Vec<f64>) {
    let active: Vec<f64> = energy.iter().copied().filter(|&e| e > 0.0).collect();
    if active.is_empty() {
        return (0.0, vec![0.0; energy.len()]);
    }
    let feasible = |r: f64| active.iter().map(|&e| minimal_slot(e, r)).sum::<f64>() <= t;
    let total: f64 = active.iter().sum();
    let mut lo = 0.0;
    // Common rate is at most the sum-rate optimum at T divided by N.
    let mut hi = (t * (total / t).ln_1p() / LN_2 / active.len() as f64)
        .min(active.iter().copied().fold(f64::INFINITY, f64::min) / LN_2);
    if feasible(hi) {
        lo = hi;
    }
    while hi - lo > RATE_TOL * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let slots = energy.iter().map(|&e| if e > 0.0 { minimal_slot(e, lo) } else { 0.0 }).collect();
    (lo, slots)
}

pub fn tdma_common_at(instance: &NetworkInstance, t: f64) -> TdmaAllocation {
    let e = energies(instance, t);
    let (rate, mut slots) = common_rate_at(&e, t);
    let used: f64 = slots.iter().sum();
    if used > 0.0 {
        let scale = t / used;
        slots.iter_mut().for_each(|s| *s *= scale);
    }
    let rates = e.iter().zip(&slots).map(|(&ei, &s)| slot_rate(ei, s)).collect();
    TdmaAllocation { transmit_fraction: t, slots, rates, objective: rate }
}

/// Common-throughput maximization over T and the slot split.
pub fn tdma_common_throughput(instance: &NetworkInstance) -> Result<TdmaAllocation> {
    if !(instance.total_snr() > 0.0) {
        return Err(Error::Degenerate("every user has zero effective gain".into()));
    }
    let (t, _) = golden_section_max(
        |t| common_rate_at(&energies(instance, t), t).0,
        CLAMP_LOW,
        CLAMP_HIGH,
        GOLDEN_TOL,
    );
    Ok(tdma_common_at(instance, t))
}
