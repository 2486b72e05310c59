//! Positive-frequency power spectra and two-receiver spectrum stitching.
//!
//! Each receiver half is transformed with an `M`-point DFT and only the bins
//! strictly below Nyquist are kept, so each half contributes `⌈M/2⌉` bins and
//! the stitched spectrum of two halves has `M` bins for even `M`. The upper
//! half is rescaled by the ratio of the boundary sums so the two receivers
//! meet without a level step.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rf_ingest::{LabeledSpectrumSet, RFSegment, ReceiverHalf, SegmentPair};

pub const DEFAULT_FFT_BINS: usize = 2048;
pub const DEFAULT_STITCH_Q: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpectrum {
    magnitudes: Vec<f64>,
    half: ReceiverHalf,
}

impl HalfSpectrum {
    pub fn new(magnitudes: Vec<f64>, half: ReceiverHalf) -> Result<Self> {
        if magnitudes.is_empty() {
            return Err(Error::DegenerateInput("half spectrum has no bins".into()));
        }
        if magnitudes.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::DegenerateInput("magnitudes must be finite and non-negative".into()));
        }
        Ok(Self { magnitudes, half })
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn half(&self) -> ReceiverHalf {
        self.half
    }

    pub fn n_bins(&self) -> usize {
        self.magnitudes.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StitchedSpectrum {
    bins: Vec<f64>,
    c_factor: f64,
    q_window: usize,
}

impl StitchedSpectrum {
    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn m_total(&self) -> usize {
        self.bins.len()
    }

    pub fn c_factor(&self) -> f64 {
        self.c_factor
    }

    pub fn q_window(&self) -> usize {
        self.q_window
    }
}

/// Reusable `M`-point transform.
#[derive(Clone)]
pub struct SpectrumAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    m_bins: usize,
}

impl std::fmt::Debug for SpectrumAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectrumAnalyzer").field("m_bins", &self.m_bins).finish()
    }
}

impl SpectrumAnalyzer {
    pub fn new(m_bins: usize) -> Result<Self> {
        if m_bins < 2 {
            return Err(Error::DegenerateInput(format!("m_bins must be at least 2, got {m_bins}")));
        }
        let fft = FftPlanner::new().plan_fft_forward(m_bins);
        Ok(Self { fft, m_bins })
    }

    /// Number of positive-frequency bins kept per half.
    pub fn positive_bins(&self) -> usize {
        self.m_bins.div_ceil(2)
    }

    /// Magnitude spectrum of `segment`.
    ///
    /// Segments shorter than `M` are zero-padded. Longer segments are cut into
    /// `⌊N/M⌋` consecutive `M`-sample blocks (trailing samples dropped) and the
    /// block magnitudes averaged.
    pub fn power_spectrum(&self, segment: &RFSegment) -> Result<HalfSpectrum> {
        let x = segment.samples();
        let m = self.m_bins;
        let keep = self.positive_bins();
        let blocks = (x.len() / m).max(1);
        let mut acc = vec![0.0f64; keep];
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        for b in 0..blocks {
            let start = b * m;
            let end = (start + m).min(x.len());
            for (slot, v) in buf.iter_mut().zip(x[start..end].iter().chain(std::iter::repeat(&0.0))) {
                *slot = Complex::new(*v, 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for (a, c) in acc.iter_mut().zip(&buf) {
                *a += c.norm();
            }
        }
        if blocks > 1 {
            let inv = 1.0 / blocks as f64;
            acc.iter_mut().for_each(|a| *a *= inv);
        }
        HalfSpectrum::new(acc, segment.half())
    }
}

/// One-shot [`SpectrumAnalyzer::power_spectrum`].
pub fn power_spectrum(segment: &RFSegment, m_bins: usize) -> Result<HalfSpectrum> {
    SpectrumAnalyzer::new(m_bins)?.power_spectrum(segment)
}

/// Joins `[lower, c * upper]` with `c = Σ last-Q lower bins / Σ first-Q upper bins`.
pub fn stitch(lower: &HalfSpectrum, upper: &HalfSpectrum, q_window: usize) -> Result<StitchedSpectrum> {
    if lower.half != ReceiverHalf::Lower || upper.half != ReceiverHalf::Upper {
        return Err(Error::HalfMismatch);
    }
    let m_total = lower.n_bins() + upper.n_bins();
    if q_window == 0 || q_window > lower.n_bins().min(upper.n_bins()) || 2 * q_window >= m_total {
        return Err(Error::config(
            "stitch_q",
            format!(
                "must satisfy 0 < Q <= {} and Q < M/2 = {}",
                lower.n_bins().min(upper.n_bins()),
                m_total as f64 / 2.0
            ),
        ));
    }
    let num: f64 = lower.magnitudes[lower.n_bins() - q_window..].iter().sum();
    let den: f64 = upper.magnitudes[..q_window].iter().sum();
    if den == 0.0 {
        return Err(Error::ZeroDenominator { q_window });
    }
    if num == 0.0 {
        return Err(Error::DegenerateInput(format!(
            "last {q_window} lower bins are all zero; normalisation factor would vanish"
        )));
    }
    let c = num / den;
    if !c.is_finite() {
        return Err(Error::NonFinite("stitch normalisation factor"));
    }
    let mut bins = Vec::with_capacity(m_total);
    bins.extend_from_slice(&lower.magnitudes);
    bins.extend(upper.magnitudes.iter().map(|u| c * u));
    Ok(StitchedSpectrum {
        bins,
        c_factor: c,
        q_window,
    })
}

/// Drops the DC bin and narrows to f32: `M` stitched bins become `M - 1` features.
pub fn featurize(spec: &StitchedSpectrum) -> Vec<f32> {
    spec.bins[1..].iter().map(|&v| v as f32).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub fft_bins: usize,
    pub stitch_q: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            fft_bins: DEFAULT_FFT_BINS,
            stitch_q: DEFAULT_STITCH_Q,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fft_bins < 4 {
            return Err(Error::config("fft_bins", "must be at least 4"));
        }
        let per_half = self.fft_bins.div_ceil(2);
        if self.stitch_q == 0 || self.stitch_q >= per_half {
            return Err(Error::config(
                "stitch_q",
                format!("must be in 1..{per_half} for fft_bins = {}", self.fft_bins),
            ));
        }
        Ok(())
    }

    pub fn feature_count(&self) -> usize {
        2 * self.fft_bins.div_ceil(2) - 1
    }
}

/// Full transform of one pair into a feature vector.
pub fn pair_features(analyzer: &SpectrumAnalyzer, pair: &SegmentPair, q_window: usize) -> Result<Vec<f32>> {
    let lower = analyzer.power_spectrum(&pair.lower)?;
    let upper = analyzer.power_spectrum(&pair.upper)?;
    Ok(featurize(&stitch(&lower, &upper, q_window)?))
}

/// Transforms every pair into a labelled feature corpus, in input order.
pub fn preprocess(pairs: &[SegmentPair], config: SpectralConfig) -> Result<LabeledSpectrumSet> {
    config.validate()?;
    let analyzer = SpectrumAnalyzer::new(config.fft_bins)?;
    let rows: Vec<Vec<f32>> = pairs
        .par_iter()
        .map(|p| pair_features(&analyzer, p, config.stitch_q))
        .collect::<Result<_>>()?;
    LabeledSpectrumSet::from_rows(rows, pairs.iter().map(|p| p.label).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(samples: Vec<f64>, half: ReceiverHalf) -> RFSegment {
        RFSegment::new(samples, half, 0).unwrap()
    }

    #[test]
    fn zero_segment_gives_zero_spectrum() {
        let s = power_spectrum(&seg(vec![0.0; 10], ReceiverHalf::Lower), 16).unwrap();
        assert_eq!(s.n_bins(), 8);
        assert!(s.magnitudes().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn constant_segment_has_only_dc() {
        let s = power_spectrum(&seg(vec![1.0; 8], ReceiverHalf::Lower), 8).unwrap();
        assert!((s.magnitudes()[0] - 8.0).abs() < 1e-12);
        assert!(s.magnitudes()[1..].iter().all(|&m| m < 1e-12));
    }

    #[test]
    fn m_bins_below_two_is_rejected() {
        assert!(power_spectrum(&seg(vec![1.0, 2.0], ReceiverHalf::Lower), 1).is_err());
    }

    #[test]
    fn long_segment_averages_blocks() {
        // Two blocks: a constant 1 block and a constant 3 block average to DC 2*M.
        let mut x = vec![1.0; 4];
        x.extend([3.0; 4]);
        x.push(100.0); // trailing partial block dropped
        let s = power_spectrum(&seg(x, ReceiverHalf::Upper), 4).unwrap();
        assert!((s.magnitudes()[0] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn stitch_ratio_of_constant_boundaries() {
        let lower = HalfSpectrum::new(vec![9.0, 9.0, 2.0, 2.0, 2.0], ReceiverHalf::Lower).unwrap();
        let upper = HalfSpectrum::new(vec![1.0, 1.0, 1.0, 5.0, 5.0], ReceiverHalf::Upper).unwrap();
        let s = stitch(&lower, &upper, 3).unwrap();
        assert_eq!(s.c_factor(), 2.0);
        assert_eq!(s.m_total(), 10);
        assert_eq!(&s.bins()[5..], &[2.0, 2.0, 2.0, 10.0, 10.0]);
    }

    #[test]
    fn stitch_errors() {
        let lower = HalfSpectrum::new(vec![1.0; 4], ReceiverHalf::Lower).unwrap();
        let zero_upper = HalfSpectrum::new(vec![0.0; 4], ReceiverHalf::Upper).unwrap();
        assert!(matches!(stitch(&lower, &zero_upper, 2), Err(Error::ZeroDenominator { .. })));
        assert!(matches!(stitch(&lower, &lower, 2), Err(Error::HalfMismatch)));
        let upper = HalfSpectrum::new(vec![1.0; 4], ReceiverHalf::Upper).unwrap();
        assert!(stitch(&lower, &upper, 0).is_err());
        assert!(stitch(&lower, &upper, 4).is_err());
    }

    #[test]
    fn featurize_drops_dc() {
        let lower = HalfSpectrum::new(vec![5.0, 1.0], ReceiverHalf::Lower).unwrap();
        let upper = HalfSpectrum::new(vec![1.0, 3.0], ReceiverHalf::Upper).unwrap();
        let s = stitch(&lower, &upper, 1).unwrap();
        assert_eq!(featurize(&s), vec![1.0, 1.0, 3.0]);
    }

    #[test]
    fn default_configuration_feature_count() {
        let cfg = SpectralConfig::default();
        assert_eq!((cfg.fft_bins, cfg.stitch_q), (2048, 10));
        assert_eq!(cfg.feature_count(), 2047);
        assert_eq!(SpectralConfig { fft_bins: 8, stitch_q: 2 }.feature_count(), 7);
    }
}
