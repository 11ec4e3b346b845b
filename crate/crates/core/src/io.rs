//! JSON instance documents and result records.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm, NetworkInstance, SystemConstants, UserChannel};
use crate::schedulers::SchemeResult;
use crate::sim::{path_loss, ChannelModelParams};
use crate::TimeShareSchedule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_loss: Option<f64>,
    pub fading_re: f64,
    pub fading_im: f64,
    pub antenna_gain_db: f64,
}

/// On-disk network description; powers in dBm and gains in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub bs_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub eh_efficiency: f64,
    pub amp_efficiency: f64,
    pub antenna_gain_bs_db: f64,
    pub users: Vec<UserDocument>,
}

impl InstanceDocument {
    /// Builds the instance; users given by distance get their path loss
    /// from `channel`.
    pub fn to_instance(&self, channel: &ChannelModelParams) -> Result<NetworkInstance> {
        let users = self
            .users
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let index = i + 1;
                let fading = Complex64::new(u.fading_re, u.fading_im);
                let gain = db_to_linear(u.antenna_gain_db);
                match (u.distance_m, u.path_loss) {
                    (Some(d), None) => {
                        if !(d > 0.0) {
                            return Err(Error::InvalidInstance(format!("user {index}: distance must be positive")));
                        }
                        Ok(UserChannel::new(index, path_loss(channel, d), fading, gain).with_distance(d))
                    }
                    (None, Some(l)) => Ok(UserChannel::new(index, l, fading, gain)),
                    _ => Err(Error::InvalidInstance(format!(
                        "user {index}: exactly one of distance_m or path_loss is required"
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let constants = SystemConstants {
            bs_power_watts: dbm_to_watts(self.bs_power_dbm),
            noise_power_watts: dbm_to_watts(self.noise_power_dbm),
            eh_efficiency: self.eh_efficiency,
            amp_efficiency: self.amp_efficiency,
            antenna_gain_bs: db_to_linear(self.antenna_gain_bs_db),
        };
        NetworkInstance::new(users, constants)
    }

    /// Document for an instance, users in original id order with explicit
    /// path loss.
    pub fn from_instance(instance: &NetworkInstance) -> Self {
        let c = instance.constants();
        let mut users: Vec<&UserChannel> = instance.users().iter().collect();
        users.sort_by_key(|u| u.index);
        Self {
            bs_power_dbm: watts_to_dbm(c.bs_power_watts),
            noise_power_dbm: watts_to_dbm(c.noise_power_watts),
            eh_efficiency: c.eh_efficiency,
            amp_efficiency: c.amp_efficiency,
            antenna_gain_bs_db: linear_to_db(c.antenna_gain_bs),
            users: users
                .into_iter()
                .map(|u| UserDocument {
                    distance_m: None,
                    path_loss: Some(u.path_loss),
                    fading_re: u.fading.re,
                    fading_im: u.fading.im,
                    antenna_gain_db: linear_to_db(u.antenna_gain),
                })
                .collect(),
        }
    }
}

pub fn instance_from_json(text: &str) -> Result<NetworkInstance> {
    let doc: InstanceDocument = serde_json::from_str(text)?;
    doc.to_instance(&ChannelModelParams::default())
}

pub fn instance_to_json(instance: &NetworkInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceDocument::from_instance(instance))?)
}

/// Flat JSON form of a [`SchemeResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRecord {
    pub scheme: String,
    #[serde(rename = "T")]
    pub transmit_fraction: f64,
    pub rates: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<TimeShareSchedule>,
}

impl From<&SchemeResult> for SchemeRecord {
    fn from(r: &SchemeResult) -> Self {
        Self {
            scheme: r.scheme.to_string(),
            transmit_fraction: r.transmit_fraction,
            rates: r.allocation.rates.clone(),
            objective: r.objective,
            iterations: r.diagnostics.greedy_iterations.unwrap_or(r.diagnostics.iterations),
            schedule: r.allocation.schedule.clone(),
        }
    }
}
