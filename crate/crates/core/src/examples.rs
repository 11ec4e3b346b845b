//! Built-in two-user reference networks.
//!
//! Both use unit fading, 0 dB antenna gains, P0 = 30 dBm, N0 = -114 dBm,
//! eta1 = 0.5 and eta2 = 0.38, with fixed path-loss factors:
//!
//! * 1: users at similar distances (9.9 m and 10.1 m);
//! * 2: a "double near-far" pair (6 m and 14 m).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{dbm_to_watts, NetworkInstance, SystemConstants, UserChannel};

pub const EXAMPLE_BS_POWER_DBM: f64 = 30.0;
pub const EXAMPLE_NOISE_POWER_DBM: f64 = -114.0;
pub const EH_EFFICIENCY: f64 = 0.5;
pub const AMP_EFFICIENCY: f64 = 0.38;

/// `(distance_m, path_loss)` per user.
const SIMILAR_DISTANCE: [(f64, f64); 2] = [(9.9, 2.4067e-6), (10.1, 2.156e-6)];
const DOUBLE_NEAR_FAR: [(f64, f64); 2] = [(6.0, 3.7808e-5), (14.0, 2.5786e-7)];

pub fn example_constants() -> SystemConstants {
    SystemConstants {
        bs_power_watts: dbm_to_watts(EXAMPLE_BS_POWER_DBM),
        noise_power_watts: dbm_to_watts(EXAMPLE_NOISE_POWER_DBM),
        eh_efficiency: EH_EFFICIENCY,
        amp_efficiency: AMP_EFFICIENCY,
        antenna_gain_bs: 1.0,
    }
}

pub fn try_example_instance(id: u8) -> Result<NetworkInstance> {
    let table = match id {
        1 => SIMILAR_DISTANCE,
        2 => DOUBLE_NEAR_FAR,
        other => return Err(Error::Domain(format!("unknown example id {other}; expected 1 or 2"))),
    };
    let users = table
        .iter()
        .enumerate()
        .map(|(i, &(d, l))| UserChannel::new(i + 1, l, Complex64::new(1.0, 0.0), 1.0).with_distance(d))
        .collect();
    NetworkInstance::new(users, example_constants())
}

/// # Panics
/// For ids other than 1 and 2.
pub fn example_instance(id: u8) -> NetworkInstance {
    try_example_instance(id).expect("example id must be 1 or 2")
}
