//! Pipeline configuration: built-in defaults, an optional TOML file, path
//! overrides from the environment, then command-line flags.

use std::path::{Path, PathBuf};

use rfzt::spectral::SpectralConfig;
use rfzt::training::{PcaFitScope, PcaSettings};
use rfzt::zta::AuthPolicy;
use rfzt::{Error, Result, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub pca_model: Option<PathBuf>,
    pub reports: Option<PathBuf>,
}

/// Environment variables consulted for paths when no flag is given.
pub const PATH_ENV: [(&str, PathField); 4] = [
    ("RFZT_CORPUS", PathField::Corpus),
    ("RFZT_MODEL", PathField::Model),
    ("RFZT_PCA_MODEL", PathField::PcaModel),
    ("RFZT_REPORTS", PathField::Reports),
];

#[derive(Debug, Clone, Copy)]
pub enum PathField {
    Corpus,
    Model,
    PcaModel,
    Reports,
}

impl Paths {
    fn slot(&mut self, field: PathField) -> &mut Option<PathBuf> {
        match field {
            PathField::Corpus => &mut self.corpus,
            PathField::Model => &mut self.model,
            PathField::PcaModel => &mut self.pca_model,
            PathField::Reports => &mut self.reports,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSection {
    pub fft_bins: usize,
    pub stitch_q: usize,
    /// Each recorded segment is cut into this many sub-segments before transforming.
    pub sub_segments: usize,
}

impl Default for SpectralSection {
    fn default() -> Self {
        let d = SpectralConfig::default();
        Self {
            fft_bins: d.fft_bins,
            stitch_q: d.stitch_q,
            sub_segments: 1,
        }
    }
}

impl SpectralSection {
    pub fn spectral(&self) -> SpectralConfig {
        SpectralConfig {
            fft_bins: self.fft_bins,
            stitch_q: self.stitch_q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcaSection {
    pub enabled: bool,
    pub target: f64,
    pub standardize: bool,
    /// Fit PCA once on the whole corpus before splitting folds.
    pub paper_compat: bool,
}

impl Default for PcaSection {
    fn default() -> Self {
        Self {
            enabled: false,
            target: 0.95,
            standardize: false,
            paper_compat: false,
        }
    }
}

impl PcaSection {
    pub fn settings(&self) -> Option<PcaSettings> {
        self.enabled.then(|| PcaSettings {
            variance_target: self.target,
            standardize: self.standardize,
            scope: if self.paper_compat {
                PcaFitScope::FullData
            } else {
                PcaFitScope::PerFold
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainSection {
    pub samples: usize,
    pub top_k: usize,
    pub background: usize,
    pub perturbations: usize,
    /// Defaults to `0.75 * sqrt(D)` when unset.
    pub kernel_width: Option<f64>,
    /// Features in the exact Shapley game; defaults to the first ten.
    pub features: Option<Vec<usize>>,
}

impl Default for ExplainSection {
    fn default() -> Self {
        Self {
            samples: 2000,
            top_k: 10,
            background: 50,
            perturbations: 5000,
            kernel_width: None,
            features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub per_class: usize,
    pub segment_len: usize,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            per_class: 200,
            segment_len: SpectralConfig::default().fft_bins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Root of every random stream; stages derive their own seeds from it.
    pub seed: u64,
    pub paths: Paths,
    pub synth: SynthSection,
    pub spectral: SpectralSection,
    pub pca: PcaSection,
    pub train: TrainConfig,
    pub explain: ExplainSection,
    pub auth: AuthPolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            paths: Paths::default(),
            synth: SynthSection::default(),
            spectral: SpectralSection::default(),
            pca: PcaSection::default(),
            train: TrainConfig::default(),
            explain: ExplainSection::default(),
            auth: AuthPolicy::default(),
        }
    }
}

impl PipelineConfig {
    /// Defaults, overlaid with `file` when given.
    pub fn load(file: Option<&Path>) -> Result<Self> {
        let Some(path) = file else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    /// Overrides paths from the environment; flags applied afterwards still win.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) {
        for (var, field) in PATH_ENV {
            if let Some(v) = lookup(var).filter(|v| !v.is_empty()) {
                *self.paths.slot(field) = Some(PathBuf::from(v));
            }
        }
    }

    /// Fails fast on any value a stage would reject.
    pub fn validate(&self) -> Result<()> {
        if self.spectral.sub_segments == 0 {
            return Err(Error::config("sub_segments", "must be at least 1"));
        }
        self.spectral.spectral().validate()?;
        if !(self.pca.target > 0.0 && self.pca.target <= 1.0) {
            return Err(Error::config("pca.target", "must be in (0, 1]"));
        }
        self.train.validate()?;
        self.auth.validate()?;
        if self.explain.samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        if self.explain.top_k == 0 {
            return Err(Error::config("top_k", "must be at least 1"));
        }
        if self.explain.background == 0 {
            return Err(Error::config("background", "must be at least 1"));
        }
        if let Some(w) = self.explain.kernel_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config("kernel_width", "must be positive"));
            }
        }
        if !(1..=1000).contains(&self.synth.per_class) {
            return Err(Error::config("per_class", "must be in 1..=1000"));
        }
        if self.synth.segment_len < 2 {
            return Err(Error::config("segment_len", "must be at least 2"));
        }
        Ok(())
    }
}

pub fn require(path: &Option<PathBuf>, field: &'static str) -> Result<PathBuf> {
    path.clone()
        .ok_or_else(|| Error::config(field, "no path given by flag, environment or config file"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults_field_by_field() {
        let c = PipelineConfig::from_toml("seed = 9\n[train]\nepochs = 3\n[pca]\ntarget = 0.9\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.train.epochs, 3);
        assert_eq!(c.train.batch_size, 10);
        assert_eq!(c.pca.target, 0.9);
        assert!(!c.pca.enabled);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::from_toml("[spectral]\nbins = 4\n").is_err());
        assert!(PipelineConfig::from_toml("[train]\nbatchsize = 4\n").is_err());
        assert!(PipelineConfig::from_toml("[auth]\nthreshhold = 0.5\n").is_err());
    }

    #[test]
    fn environment_only_touches_paths() {
        let mut c = PipelineConfig::from_toml("[paths]\ncorpus = \"a.csv\"\nmodel = \"m.json\"\n").unwrap();
        c.apply_env(|k| (k == "RFZT_CORPUS").then(|| "b.csv".to_string()));
        assert_eq!(c.paths.corpus, Some(PathBuf::from("b.csv")));
        assert_eq!(c.paths.model, Some(PathBuf::from("m.json")));
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = PipelineConfig::default();
        c.train.batch_size = 0;
        assert!(matches!(c.validate(), Err(Error::Config { field: "batch_size", .. })));
    }
}
