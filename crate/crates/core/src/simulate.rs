//! Block-error channel and decoding trials.
//!
//! Randomness comes from `Xoshiro256PlusPlus` seeded with `seed_from_u64`, so
//! a seed fixes every message, support and error value.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::decode::{decode, ErrorHypothesis, Strategy};
use crate::error::{Error, Result};
use crate::galois::Elem;
use crate::qbch::QbchSpec;
use crate::qccore::LinearCode;

/// Exactly `weight` distinct blocks are hit, each by a uniform nonzero value
/// of `F_q^ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub weight: usize,
    pub seed: u64,
}

pub fn random_error(spec: &QbchSpec, w: usize, rng: &mut Xoshiro256PlusPlus) -> ErrorHypothesis {
    let (m, l, q) = (spec.m(), spec.l(), spec.q());
    let mut support = rand::seq::index::sample(rng, m, w).into_vec();
    support.sort_unstable();
    let blocks = support
        .iter()
        .map(|_| loop {
            let b: Vec<Elem> = (0..l).map(|_| Elem(rng.random_range(0..q))).collect();
            if b.iter().any(|e| !e.is_zero()) {
                break b;
            }
        })
        .collect();
    ErrorHypothesis { support, blocks }
}

pub fn random_codeword(code: &LinearCode, rng: &mut Xoshiro256PlusPlus) -> Result<Vec<Elem>> {
    let q = code.field().order();
    let msg: Vec<Elem> = (0..code.dimension()).map(|_| Elem(rng.random_range(0..q))).collect();
    code.encode(&msg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Corrected,
    /// The decoder reported an error.
    Failure,
    /// The decoder returned a codeword other than the one sent.
    Miscorrection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub support: Vec<usize>,
    pub outcome: TrialOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationStats {
    pub trials: usize,
    pub weight: usize,
    pub radius: usize,
    pub strategy: String,
    pub corrected: usize,
    pub failures: usize,
    pub miscorrections: usize,
    pub success_rate: f64,
    pub mean_decode_us: f64,
}

pub fn simulate(
    spec: &QbchSpec,
    code: &LinearCode,
    channel: ChannelModel,
    trials: usize,
    strategy: Strategy,
) -> Result<(SimulationStats, Vec<TrialRecord>)> {
    if channel.weight > spec.m() {
        return Err(Error::InvalidParameters(format!("error weight {} exceeds {} blocks", channel.weight, spec.m())));
    }
    if code.blocks() != spec.m() || code.block_length() != spec.l() || code.field() != spec.base() {
        return Err(Error::DimensionMismatch("code does not match the quasi-BCH parameters".into()));
    }
    let f = spec.base().clone();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(channel.seed);
    let mut records = Vec::with_capacity(trials);
    let mut time = Duration::ZERO;
    for trial in 0..trials {
        let c = random_codeword(code, &mut rng)?;
        let e = random_error(spec, channel.weight, &mut rng);
        let y: Vec<Elem> = c.iter().zip(e.to_word(spec.m(), spec.l())).map(|(&a, b)| f.add(a, b)).collect();
        let start = Instant::now();
        let out = decode(&y, spec, strategy);
        time += start.elapsed();
        let outcome = match out {
            Ok(o) if o.codeword == c => TrialOutcome::Corrected,
            Ok(o) => {
                debug_assert!(code.contains(&o.codeword));
                TrialOutcome::Miscorrection
            }
            Err(_) => TrialOutcome::Failure,
        };
        records.push(TrialRecord { trial, support: e.support, outcome });
    }
    let count = |o: TrialOutcome| records.iter().filter(|r| r.outcome == o).count();
    let corrected = count(TrialOutcome::Corrected);
    let stats = SimulationStats {
        trials,
        weight: channel.weight,
        radius: spec.radius(),
        strategy: strategy.to_string(),
        corrected,
        failures: count(TrialOutcome::Failure),
        miscorrections: count(TrialOutcome::Miscorrection),
        success_rate: if trials == 0 { 1.0 } else { corrected as f64 / trials as f64 },
        mean_decode_us: if trials == 0 { 0.0 } else { time.as_secs_f64() * 1e6 / trials as f64 },
    };
    Ok((stats, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use crate::qbch::{primitive_root_companion, qbch_build};

    fn spec() -> QbchSpec {
        let root = primitive_root_companion(2, 3, 2, 21).unwrap();
        QbchSpec::new(&Field::gf(2, 1).unwrap(), root, 5).unwrap()
    }

    #[test]
    fn within_radius_always_corrects() {
        let s = spec();
        let code = qbch_build(&s).unwrap();
        for w in 0..=s.radius() {
            let (stats, records) =
                simulate(&s, &code, ChannelModel { weight: w, seed: 3 }, 40, Strategy::Support).unwrap();
            assert_eq!(stats.success_rate, 1.0);
            assert!(records.iter().all(|r| r.support.len() == w));
        }
    }

    #[test]
    fn seed_fixes_the_trials() {
        let s = spec();
        let code = qbch_build(&s).unwrap();
        let run = |seed| simulate(&s, &code, ChannelModel { weight: 4, seed }, 30, Strategy::Linear).unwrap().1;
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn overweight_channel_is_rejected() {
        let s = spec();
        let code = qbch_build(&s).unwrap();
        assert!(simulate(&s, &code, ChannelModel { weight: 22, seed: 0 }, 1, Strategy::Support).is_err());
    }
}
