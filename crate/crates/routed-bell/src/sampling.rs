//! Multi-threaded LHV sampling.
//!
//! Chunks are drawn from fixed RNG streams and merged in chunk order, so the
//! tallies equal those of [`lhv_sample`](routed_bell_core::lhv_models::lhv_sample)
//! for any thread count.

use rayon::prelude::*;

use routed_bell_core::lhv_models::{
    merge_tallies, verify_batch, LhvModel, LhvSetting, SampleBatch, SamplePlan, Tolerance, VerifyReport,
};
use routed_bell_core::{Error, Result};

pub fn par_lhv_sample(model: &LhvModel, settings: &[LhvSetting], count: u64, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidSetting { name: "sample count", value: 0 });
    }
    let plan = SamplePlan::new(*model, settings.to_vec())?;
    let chunks: Vec<(u64, u64)> = SamplePlan::chunks(count).collect();
    let parts: Vec<_> = chunks.par_iter().map(|&(chunk, len)| plan.sample_chunk(seed, chunk, len)).collect();
    let mut tallies = plan.empty_tallies();
    for p in &parts {
        merge_tallies(&mut tallies, p)?;
    }
    Ok(SampleBatch { seed, count, settings: settings.to_vec(), tallies })
}

pub fn par_lhv_verify(
    model: &LhvModel,
    settings: &[LhvSetting],
    count: u64,
    seed: u64,
    tolerance: Tolerance,
) -> Result<(VerifyReport, SampleBatch)> {
    let batch = par_lhv_sample(model, settings, count, seed)?;
    Ok((verify_batch(model, &batch, tolerance)?, batch))
}
