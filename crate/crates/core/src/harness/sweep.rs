use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::BerRecord;

use super::chain::Chain;
use super::config::{ChainConfig, SweepConfig};
use super::seed::trial_seed;

/// Environment variable capping the worker threads of a sweep.
pub const THREADS_ENV: &str = "PHYLAB_THREADS";

/// Thread count from `PHYLAB_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs every point of the sweep with the thread cap from `PHYLAB_THREADS`.
pub fn run_sweep(cfg: &ChainConfig, sweep: &SweepConfig) -> Result<Vec<BerRecord>> {
    run_sweep_with_threads(cfg, sweep, threads_from_env())
}

/// Runs every point of the sweep on at most `threads` workers (`None` uses
/// all cores).
///
/// Each point runs trials in batches of `seeds_per_point` shards; the
/// stopping rule is checked only between batches and a batch never exceeds
/// the remaining bit budget. Shard `s` of point `p` always uses
/// [`trial_seed`]`(master_seed, p, s)`, and records merge by summation, so
/// the output does not depend on the number of threads.
pub fn run_sweep_with_threads(
    cfg: &ChainConfig,
    sweep: &SweepConfig,
    threads: Option<usize>,
) -> Result<Vec<BerRecord>> {
    sweep.validate(cfg.payload_bits)?;
    let chain = Chain::new(cfg)?;
    let points = sweep.points.values()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
    pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, &x)| run_point(&chain, sweep, i as u64, x))
            .collect()
    })
}

fn run_point(chain: &Chain, sweep: &SweepConfig, index: u64, x: f64) -> Result<BerRecord> {
    let payload = chain.config().payload_bits as u64;
    let budget = chain.link_budget(sweep.x_axis, x)?;
    let mut total = chain.record(0, 0);
    total.snr_db = Some(budget.snr_db);
    total.ebn0_db = Some(budget.ebn0_db);
    total.seed = sweep.master_seed;
    let mut shard = 0u64;
    loop {
        let done_errors = sweep.stop_min_errors.is_some_and(|e| total.errors >= e);
        let remaining = sweep.stop_max_bits.saturating_sub(total.bits);
        if done_errors || remaining < payload {
            break;
        }
        let batch = (sweep.seeds_per_point as u64).min(remaining / payload);
        let records: Vec<BerRecord> = (shard..shard + batch)
            .into_par_iter()
            .map(|s| chain.run(sweep.x_axis, x, trial_seed(sweep.master_seed, index, s)))
            .collect::<Result<_>>()?;
        for r in &records {
            total.merge(r);
        }
        shard += batch;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ChainKind, Points, XAxis};

    fn small() -> (ChainConfig, SweepConfig) {
        let mut cfg = ChainConfig::new(
            ChainKind::PuncturedBpsk,
            "bpsk",
            "conv:7:133,171:111001".parse().unwrap(),
        );
        cfg.payload_bits = 2000;
        let sweep = SweepConfig {
            x_axis: XAxis::Ebn0Db,
            points: Points::List(vec![0.0, 2.0, 4.0]),
            stop_min_errors: Some(50),
            stop_max_bits: 40_000,
            seeds_per_point: 3,
            master_seed: 9,
        };
        (cfg, sweep)
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (cfg, sweep) = small();
        let one = run_sweep_with_threads(&cfg, &sweep, Some(1)).unwrap();
        let four = run_sweep_with_threads(&cfg, &sweep, Some(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.len(), 3);
    }

    #[test]
    fn stopping_rules() {
        let (cfg, sweep) = small();
        let recs = run_sweep_with_threads(&cfg, &sweep, Some(2)).unwrap();
        for r in &recs {
            assert!(r.errors >= 50 || r.bits == 40_000, "{r:?}");
            assert!(r.bits <= 40_000);
            assert_eq!(r.bits % 2000, 0);
        }
        let fixed = SweepConfig {
            stop_min_errors: None,
            stop_max_bits: 5000,
            points: Points::List(vec![1.0]),
            ..sweep
        };
        let recs = run_sweep_with_threads(&cfg, &fixed, Some(2)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].bits, 4000);
    }
}
