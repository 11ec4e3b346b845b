//! Random deployments and Monte Carlo experiments.
//!
//! Users are dropped area-uniformly in a ring around the base station with
//! Rayleigh fading and a dual-slope path loss. Each (N, trial) pair gets its
//! own generator stream, so the channel draws are shared across the P0
//! sweep and results do not depend on how trials are scheduled.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{db_to_linear, dbm_to_watts, jain_index, NetworkInstance, SystemConstants, UserChannel};
use crate::numerics::SubgradientConfig;
use crate::schedulers::{solve_scheme, Scheme, SchemeResult, TimeShareMode};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelModelParams {
    pub carrier_hz: f64,
    pub breakpoint_m: f64,
    pub slope_before: f64,
    pub slope_after: f64,
    pub ring_inner_m: f64,
    pub ring_outer_m: f64,
}

impl Default for ChannelModelParams {
    fn default() -> Self {
        Self {
            carrier_hz: 470e6,
            breakpoint_m: 5.0,
            slope_before: 2.0,
            slope_after: 3.5,
            ring_inner_m: 5.0,
            ring_outer_m: 20.0,
        }
    }
}

impl ChannelModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ring_inner_m > 0.0 && self.ring_inner_m <= self.ring_outer_m && self.ring_outer_m.is_finite()) {
            return Err(Error::Domain("ring radii must satisfy 0 < inner <= outer".into()));
        }
        if !(self.breakpoint_m > 0.0) || !(self.carrier_hz > 0.0) {
            return Err(Error::Domain("breakpoint and carrier must be positive".into()));
        }
        Ok(())
    }
}

/// Power ratio over `distance_m`: slope `slope_before` (free space when 2)
/// up to the breakpoint, `slope_after` beyond, continuous at the breakpoint.
pub fn path_loss(params: &ChannelModelParams, distance_m: f64) -> f64 {
    let wavelength = SPEED_OF_LIGHT / params.carrier_hz;
    let reference = (wavelength / (4.0 * PI)).powi(2);
    let bp = params.breakpoint_m;
    if distance_m <= bp {
        reference * distance_m.powf(-params.slope_before)
    } else {
        reference * bp.powf(-params.slope_before) * (distance_m / bp).powf(-params.slope_after)
    }
}

fn default_trials() -> usize {
    1000
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::A, Scheme::B, Scheme::C, Scheme::D, Scheme::TdmaSum, Scheme::TdmaCommon]
}

fn default_noise_psd() -> f64 {
    -174.0
}

fn default_bandwidth() -> f64 {
    1e6
}

fn default_antenna_gain() -> f64 {
    7.5
}

fn default_eh() -> f64 {
    0.5
}

fn default_amp() -> f64 {
    0.38
}

fn default_mode() -> TimeShareMode {
    TimeShareMode::Greedy
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_users_list: Vec<usize>,
    pub p0_dbm_list: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    /// How schemes (b) and (d) pick their time-sharing permutations.
    #[serde(default = "default_mode")]
    pub timeshare_mode: TimeShareMode,
    #[serde(default = "default_noise_psd")]
    pub noise_psd_dbm_hz: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    /// Applied to the base station and to every user.
    #[serde(default = "default_antenna_gain")]
    pub antenna_gains_db: f64,
    #[serde(default = "default_eh")]
    pub eh_efficiency: f64,
    #[serde(default = "default_amp")]
    pub amp_efficiency: f64,
    #[serde(default)]
    pub channel: ChannelModelParams,
}

impl ExperimentConfig {
    pub fn new(n_users_list: Vec<usize>, p0_dbm_list: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            n_users_list,
            p0_dbm_list,
            trials,
            seed,
            schemes: default_schemes(),
            timeshare_mode: default_mode(),
            noise_psd_dbm_hz: default_noise_psd(),
            bandwidth_hz: default_bandwidth(),
            antenna_gains_db: default_antenna_gain(),
            eh_efficiency: default_eh(),
            amp_efficiency: default_amp(),
            channel: ChannelModelParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.n_users_list.is_empty() || self.p0_dbm_list.is_empty() || self.schemes.is_empty() {
            return Err(Error::Domain("user counts, powers and schemes must be nonempty".into()));
        }
        if self.n_users_list.contains(&0) {
            return Err(Error::Domain("user counts must be positive".into()));
        }
        if self.p0_dbm_list.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("P0 values must be finite".into()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Domain("bandwidth must be positive".into()));
        }
        self.channel.validate()
    }

    /// Noise power over the band, `psd + 10 log10(B)` in dBm.
    pub fn noise_power_dbm(&self) -> f64 {
        self.noise_psd_dbm_hz + 10.0 * self.bandwidth_hz.log10()
    }

    pub fn constants(&self, p0_dbm: f64) -> SystemConstants {
        SystemConstants {
            bs_power_watts: dbm_to_watts(p0_dbm),
            noise_power_watts: dbm_to_watts(self.noise_power_dbm()),
            eh_efficiency: self.eh_efficiency,
            amp_efficiency: self.amp_efficiency,
            antenna_gain_bs: db_to_linear(self.antenna_gains_db),
        }
    }
}

/// Generator for one trial: the base seed selects the key, (N, trial) the
/// stream.
pub fn trial_rng(seed: u64, n_users: usize, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((n_users as u64) << 40) ^ trial as u64);
    rng
}

/// Area-uniform radius in the ring.
pub fn sample_distance<R: Rng + ?Sized>(params: &ChannelModelParams, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let (r1, r2) = (params.ring_inner_m, params.ring_outer_m);
    (r1 * r1 + u * (r2 * r2 - r1 * r1)).sqrt()
}

/// Circularly symmetric complex Gaussian with unit variance.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_users<R: Rng + ?Sized>(config: &ExperimentConfig, n_users: usize, rng: &mut R) -> Vec<UserChannel> {
    let gain = db_to_linear(config.antenna_gains_db);
    (1..=n_users)
        .map(|index| {
            let d = sample_distance(&config.channel, rng);
            let h = sample_fading(rng);
            UserChannel::new(index, path_loss(&config.channel, d), h, gain).with_distance(d)
        })
        .collect()
}

pub fn sample_instance<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    n_users: usize,
    p0_dbm: f64,
    rng: &mut R,
) -> Result<NetworkInstance> {
    NetworkInstance::new(sample_users(config, n_users, rng), config.constants(p0_dbm))
}

/// Metrics of one scheme on one instance; `status` is `"ok"` or the error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub status: String,
    pub objective: Option<f64>,
    pub transmit_fraction: Option<f64>,
    pub jain: Option<f64>,
    pub energy_efficiency: Option<f64>,
    pub greedy_iterations: Option<usize>,
}

impl SchemeOutcome {
    fn failed(scheme: Scheme, status: String) -> Self {
        Self {
            scheme,
            status,
            objective: None,
            transmit_fraction: None,
            jain: None,
            energy_efficiency: None,
            greedy_iterations: None,
        }
    }

    fn from_result(result: &SchemeResult, bs_power_watts: f64) -> Self {
        let t = result.transmit_fraction;
        let rates = &result.allocation.rates;
        let values = [result.objective, t];
        if values.iter().any(|v| !v.is_finite()) {
            return Self::failed(result.scheme, "non-finite result".into());
        }
        let jain = jain_index(rates);
        let ee = result.allocation.sum_rate() / (bs_power_watts * (1.0 - t));
        Self {
            scheme: result.scheme,
            status: match &jain {
                Ok(_) => "ok".into(),
                Err(e) => e.to_string(),
            },
            objective: Some(result.objective),
            transmit_fraction: Some(t),
            jain: jain.ok(),
            energy_efficiency: ee.is_finite().then_some(ee),
            greedy_iterations: result.diagnostics.greedy_iterations,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub n_users: usize,
    pub p0_dbm: f64,
    pub seed: u64,
    pub outcomes: Vec<SchemeOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scheme: Scheme,
    pub n_users: usize,
    pub p0_dbm: f64,
    pub mean_objective: f64,
    pub mean_transmit_fraction: f64,
    pub mean_jain: f64,
    pub mean_energy_efficiency: f64,
    /// `None` when the scheme does not run the greedy search.
    pub mean_greedy_iterations: Option<f64>,
    /// Trials that contributed (status `ok`).
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
}

/// Runs every scheme of `config` on one sampled channel at every P0.
pub fn run_trial(config: &ExperimentConfig, n_users: usize, trial: usize) -> Vec<TrialRecord> {
    let mut rng = trial_rng(config.seed, n_users, trial);
    let users = sample_users(config, n_users, &mut rng);
    let dual = SubgradientConfig::default();
    config
        .p0_dbm_list
        .iter()
        .map(|&p0| {
            let constants = config.constants(p0);
            let outcomes = match NetworkInstance::new(users.clone(), constants) {
                Ok(inst) => config
                    .schemes
                    .iter()
                    .map(|&scheme| match solve_scheme(&inst, scheme, config.timeshare_mode, &dual) {
                        Ok(r) => SchemeOutcome::from_result(&r, constants.bs_power_watts),
                        Err(e) => SchemeOutcome::failed(scheme, e.to_string()),
                    })
                    .collect(),
                Err(e) => config.schemes.iter().map(|&s| SchemeOutcome::failed(s, e.to_string())).collect(),
            };
            TrialRecord { trial, n_users, p0_dbm: p0, seed: config.seed, outcomes }
        })
        .collect()
}

/// Runs the experiment on the global rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with_workers(config, None)
}

/// Runs the experiment with at most `workers` threads (1 = serial).
pub fn run_experiment_with_workers(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentOutput> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> =
        config.n_users_list.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let run = || -> Vec<Vec<TrialRecord>> {
        tasks.par_iter().map(|&(n, t)| run_trial(config, n, t)).collect()
    };
    let batches = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Numeric(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    // Order records by (N, P0, trial) regardless of execution order.
    let mut records: Vec<TrialRecord> = Vec::with_capacity(tasks.len() * config.p0_dbm_list.len());
    for (ni, _) in config.n_users_list.iter().enumerate() {
        for pi in 0..config.p0_dbm_list.len() {
            for t in 0..config.trials {
                records.push(batches[ni * config.trials + t][pi].clone());
            }
        }
    }
    let aggregates = aggregate(config, &records);
    Ok(ExperimentOutput { records, aggregates })
}

fn mean(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        (f64::NAN, 0)
    } else {
        (sum / count as f64, count)
    }
}

/// Means keyed by (N, P0, scheme) over successful trials, summed in record
/// order.
pub fn aggregate(config: &ExperimentConfig, records: &[TrialRecord]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for &n in &config.n_users_list {
        for &p0 in &config.p0_dbm_list {
            let group: Vec<&TrialRecord> =
                records.iter().filter(|r| r.n_users == n && r.p0_dbm.to_bits() == p0.to_bits()).collect();
            for (si, &scheme) in config.schemes.iter().enumerate() {
                let ok: Vec<&SchemeOutcome> =
                    group.iter().map(|r| &r.outcomes[si]).filter(|o| o.is_ok()).collect();
                let (mean_objective, trials) = mean(ok.iter().filter_map(|o| o.objective));
                let greedy = mean(ok.iter().filter_map(|o| o.greedy_iterations.map(|g| g as f64)));
                rows.push(AggregateRow {
                    scheme,
                    n_users: n,
                    p0_dbm: p0,
                    mean_objective,
                    mean_transmit_fraction: mean(ok.iter().filter_map(|o| o.transmit_fraction)).0,
                    mean_jain: mean(ok.iter().filter_map(|o| o.jain)).0,
                    mean_energy_efficiency: mean(ok.iter().filter_map(|o| o.energy_efficiency)).0,
                    mean_greedy_iterations: (greedy.1 > 0).then_some(greedy.0),
                    trials,
                });
            }
        }
    }
    rows
}

pub const AGGREGATE_HEADER: [&str; 9] = [
    "scheme",
    "N",
    "P0_dbm",
    "mean_objective_bpshz",
    "mean_T",
    "mean_jain",
    "mean_energy_eff",
    "mean_greedy_iters",
    "trials",
];

pub const TRIAL_HEADER: [&str; 11] = [
    "trial",
    "scheme",
    "N",
    "P0_dbm",
    "objective_bpshz",
    "T",
    "jain",
    "energy_eff",
    "greedy_iters",
    "status",
    "seed",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trials_csv<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRIAL_HEADER)?;
    for r in records {
        for o in &r.outcomes {
            w.write_record([
                r.trial.to_string(),
                o.scheme.to_string(),
                r.n_users.to_string(),
                r.p0_dbm.to_string(),
                opt(o.objective),
                opt(o.transmit_fraction),
                opt(o.jain),
                opt(o.energy_efficiency),
                opt(o.greedy_iterations),
                o.status.clone(),
                r.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(writer: W, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(AGGREGATE_HEADER)?;
    for a in rows {
        let num = |v: f64| if v.is_finite() { v.to_string() } else { String::new() };
        w.write_record([
            a.scheme.to_string(),
            a.n_users.to_string(),
            a.p0_dbm.to_string(),
            num(a.mean_objective),
            num(a.mean_transmit_fraction),
            num(a.mean_jain),
            num(a.mean_energy_efficiency),
            opt(a.mean_greedy_iterations),
            a.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
