//! Synthetic end-to-end run: 4 classes x 200 segments, PCA 0.95, 10-fold CV.

use std::time::Instant;

use rfzt::rf_ingest::{default_profiles, synth_generate};
use rfzt::spectral::{preprocess, SpectralConfig};
use rfzt::training::PcaSettings;
use rfzt::{evaluate_cv, TrainConfig};

fn main() -> rfzt::Result<()> {
    let cfg = SpectralConfig::default();
    let t0 = Instant::now();
    let pairs = synth_generate(&default_profiles(cfg.fft_bins, cfg.fft_bins), 200, 7)?;
    let data = preprocess(&pairs, cfg)?;
    eprintln!("features ready in {:.1?}", t0.elapsed());
    let report = evaluate_cv(&data, &TrainConfig::default(), Some(PcaSettings::new(0.95)))?;
    eprintln!("evaluated in {:.1?}", t0.elapsed());
    print!("{}", report.to_table());
    Ok(())
}
