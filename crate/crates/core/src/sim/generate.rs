use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{SimConfig, SimError};
use crate::model::{BuyerId, DataType, Demand, Device, Quality};
use crate::scenario::Scenario;

const MAX_ATTEMPTS: usize = 10_000;

/// Generator for iteration `iteration` of a run seeded with `seed`.
pub fn iteration_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng
}

/// Truncated draws from the configured distributions. Values below a bound
/// are redrawn, which shifts the moments of the result upward.
#[derive(Debug, Clone)]
pub struct Sampler {
    price: Normal<f64>,
    duration: Normal<f64>,
    interval: Normal<f64>,
    min_duration: f64,
    min_interval: f64,
}

fn normal(mean: f64, sd: f64) -> Result<Normal<f64>, SimError> {
    Normal::new(mean, sd).map_err(|e| SimError::InvalidConfig(format!("N({mean}, {sd}): {e}")))
}

fn redraw_above<R: Rng + ?Sized>(rng: &mut R, d: &Normal<f64>, bound: f64, strict: bool) -> Result<f64, SimError> {
    for _ in 0..MAX_ATTEMPTS {
        let x = d.sample(rng);
        if x > bound || (!strict && x == bound) {
            return Ok(x);
        }
    }
    Err(SimError::Truncation {
        mean: d.mean(),
        sd: d.std_dev(),
        bound,
        attempts: MAX_ATTEMPTS,
    })
}

impl Sampler {
    pub fn new(config: &SimConfig) -> Result<Self, SimError> {
        Ok(Self {
            price: normal(config.price_mean, config.price_sd)?,
            duration: normal(config.duration_mean, config.duration_sd)?,
            interval: normal(config.interval_mean, config.interval_sd())?,
            min_duration: config.min_duration,
            min_interval: config.min_interval,
        })
    }

    /// Unit price, strictly positive.
    pub fn price<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, SimError> {
        redraw_above(rng, &self.price, 0.0, true)
    }

    /// Demand duration in hours.
    pub fn duration<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, SimError> {
        redraw_above(rng, &self.duration, self.min_duration, false)
    }

    /// Sampling interval in minutes.
    pub fn interval_minutes<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, SimError> {
        redraw_above(rng, &self.interval, self.min_interval, false)
    }

    pub fn quality<R: Rng + ?Sized>(rng: &mut R) -> Quality {
        Quality::new(10 * rng.random_range(1..=10u32)).expect("on the ladder")
    }
}

/// Draws one scenario. Device `i` gets id `dev-{i}` and offers every type;
/// demands are distinct buyer/type pairs taken from a random permutation, so
/// the first `n` demands of a scenario with more demands form a valid
/// scenario of `n` demands drawn from the same stream.
pub fn generate_scenario(config: &SimConfig, seed: u64) -> Result<Scenario, SimError> {
    let mut s = generate_from(config, &mut iteration_rng(seed, 0))?;
    s.seed = Some(seed);
    Ok(s)
}

pub(crate) fn generate_from<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Scenario, SimError> {
    config.validate()?;
    let sampler = Sampler::new(config)?;

    let mut devices = Vec::with_capacity(config.devices);
    for i in 0..config.devices {
        let mut dev = Device::new(format!("dev-{i}"), config.battery, config.overhead_energy);
        for j in 0..config.data_types {
            let price = sampler.price(rng)?;
            let cap = Sampler::quality(rng);
            dev = dev.with_offer(DataType(j as u16), cap, price, config.sense_energy_for(j));
        }
        devices.push(dev);
    }

    let buyer_quality: Vec<Quality> = (0..config.buyers).map(|_| Sampler::quality(rng)).collect();

    let mut pairs: Vec<(usize, usize)> = (0..config.buyers)
        .flat_map(|b| (0..config.data_types).map(move |t| (b, t)))
        .collect();
    pairs.shuffle(rng);
    pairs.truncate(config.demands);

    let mut demands = Vec::with_capacity(pairs.len());
    for (b, t) in pairs {
        let duration = sampler.duration(rng)?;
        let interval = sampler.interval_minutes(rng)? / 60.0;
        demands.push(Demand {
            buyer: BuyerId(b as u32),
            data_type: DataType(t as u16),
            duration,
            sampling_interval: interval,
            quality: buyer_quality[b],
        });
    }

    Ok(Scenario::new(devices, demands))
}
