//! Loading of DroneRF-style segment recordings, the canonical feature corpus
//! format, and a seeded synthetic RF generator.
//!
//! Segment files hold comma-separated decimal amplitudes with no header. File
//! names follow the archive convention `<code><half>_<k>.csv`, e.g.
//! `10100L_3.csv`, where `<code>` is the five-digit recording code, `<half>`
//! is `L` (lower receiver) or `H` (upper receiver) and `<k>` the chunk index.
//! The segment id is `code * 1000 + k` (or just `code` when `_<k>` is absent).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use ndarray::Array2;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReceiverHalf {
    Lower,
    Upper,
}

impl ReceiverHalf {
    pub fn marker(self) -> char {
        match self {
            ReceiverHalf::Lower => 'L',
            ReceiverHalf::Upper => 'H',
        }
    }
}

/// Raw time-domain samples captured by one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct RFSegment {
    samples: Vec<f64>,
    half: ReceiverHalf,
    segment_id: u64,
}

impl RFSegment {
    pub fn new(samples: Vec<f64>, half: ReceiverHalf, segment_id: u64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "segment {segment_id} has {} samples, need at least 2",
                samples.len()
            )));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "segment {segment_id} sample {pos} is not finite"
            )));
        }
        Ok(Self {
            samples,
            half,
            segment_id,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn half(&self) -> ReceiverHalf {
        self.half
    }

    pub fn segment_id(&self) -> u64 {
        self.segment_id
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    /// Splits the segment into `parts` equal consecutive chunks, dropping any
    /// remainder. Chunk `j` of segment `s` gets id `s * parts + j`.
    pub fn split(&self, parts: usize) -> Result<Vec<RFSegment>> {
        if parts == 0 {
            return Err(Error::config("sub_segments", "must be at least 1"));
        }
        let len = self.samples.len() / parts;
        (0..parts)
            .map(|j| {
                RFSegment::new(
                    self.samples[j * len..(j + 1) * len].to_vec(),
                    self.half,
                    self.segment_id * parts as u64 + j as u64,
                )
            })
            .collect()
    }
}

/// The four classes, coded in confusion-matrix axis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    NoDrone = 0,
    Bebop = 1,
    AR = 2,
    Phantom = 3,
}

pub const CLASS_COUNT: usize = 4;

impl ClassLabel {
    pub const ALL: [ClassLabel; CLASS_COUNT] = [
        ClassLabel::NoDrone,
        ClassLabel::Bebop,
        ClassLabel::AR,
        ClassLabel::Phantom,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::NoDrone => "NoDrone",
            ClassLabel::Bebop => "Bebop",
            ClassLabel::AR => "AR",
            ClassLabel::Phantom => "Phantom",
        }
    }

    /// Five-digit archive recording code for the class's first flight mode.
    pub fn archive_code(self) -> u64 {
        match self {
            ClassLabel::NoDrone => 0,
            ClassLabel::Bebop => 10000,
            ClassLabel::AR => 10100,
            ClassLabel::Phantom => 11000,
        }
    }

    /// Class of an archive recording code: drone flag, two type digits, two mode digits.
    pub fn from_archive_code(code: u64) -> Option<Self> {
        match code / 100 {
            0 if code == 0 => Some(ClassLabel::NoDrone),
            100 => Some(ClassLabel::Bebop),
            101 => Some(ClassLabel::AR),
            110 => Some(ClassLabel::Phantom),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(code) = t.parse::<usize>() {
            return ClassLabel::from_code(code)
                .ok_or_else(|| Error::config("class", format!("unknown class code {code}")));
        }
        match t.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "nodrone" | "none" | "background" => Ok(ClassLabel::NoDrone),
            "bebop" => Ok(ClassLabel::Bebop),
            "ar" | "ardrone" => Ok(ClassLabel::AR),
            "phantom" => Ok(ClassLabel::Phantom),
            _ => Err(Error::config("class", format!("unknown class `{t}`"))),
        }
    }
}

/// Feature matrix with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSpectrumSet {
    spectra: Array2<f32>,
    labels: Vec<ClassLabel>,
}

impl LabeledSpectrumSet {
    pub fn new(spectra: Array2<f32>, labels: Vec<ClassLabel>) -> Result<Self> {
        if spectra.nrows() != labels.len() {
            return Err(Error::Dimension {
                expected: spectra.nrows(),
                actual: labels.len(),
                context: "label count vs spectrum rows",
            });
        }
        Ok(Self { spectra, labels })
    }

    pub fn from_rows(rows: Vec<Vec<f32>>, labels: Vec<ClassLabel>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::Dimension {
                expected: width,
                actual: bad.len(),
                context: "spectrum row length",
            });
        }
        let n = rows.len();
        let flat: Vec<f32> = rows.into_iter().flatten().collect();
        let spectra = Array2::from_shape_vec((n, width), flat).expect("shape checked above");
        Self::new(spectra, labels)
    }

    pub fn spectra(&self) -> &Array2<f32> {
        &self.spectra
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn feature_count(&self) -> usize {
        self.spectra.ncols()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> [usize; CLASS_COUNT] {
        let mut counts = [0; CLASS_COUNT];
        for l in &self.labels {
            counts[l.code()] += 1;
        }
        counts
    }

    /// Fails unless every class has at least one instance.
    pub fn require_all_classes(&self) -> Result<()> {
        let counts = self.class_counts();
        match counts.iter().position(|&c| c == 0) {
            Some(class) => Err(Error::InsufficientClass { class, count: 0, k: 1 }),
            None => Ok(()),
        }
    }

    /// Feature matrix widened to f64.
    pub fn features_f64(&self) -> Array2<f64> {
        self.spectra.mapv(f64::from)
    }

    /// Writes the canonical corpus layout: header `label,f0,...,f{D-1}`, one row per instance.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut w = BufWriter::new(out);
        write!(w, "label")?;
        for j in 0..self.feature_count() {
            write!(w, ",f{j}")?;
        }
        writeln!(w)?;
        for (row, label) in self.spectra.rows().into_iter().zip(&self.labels) {
            write!(w, "{}", label.code())?;
            for v in row {
                // `Display` for f32 prints the shortest string that parses back to the same bits.
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::EmptyInput("corpus file has no header"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.first() != Some(&"label") {
            return Err(Error::MalformedCsv {
                path: path.to_path_buf(),
                row: 1,
                column: 1,
                detail: "header must start with `label`".into(),
            });
        }
        let width = cols.len() - 1;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (i, line) in lines {
            let malformed = |column: usize, detail: String| Error::MalformedCsv {
                path: path.to_path_buf(),
                row: i + 1,
                column,
                detail,
            };
            let mut fields = line.split(',');
            let code = fields.next().unwrap_or_default().trim();
            let label = code
                .parse::<usize>()
                .ok()
                .and_then(ClassLabel::from_code)
                .ok_or_else(|| malformed(1, format!("bad class code `{code}`")))?;
            let mut row = Vec::with_capacity(width);
            for (j, tok) in fields.enumerate() {
                let v: f32 = tok
                    .trim()
                    .parse()
                    .map_err(|_| malformed(j + 2, format!("non-numeric token `{}`", tok.trim())))?;
                row.push(v);
            }
            if row.len() != width {
                return Err(malformed(row.len() + 2, format!("expected {width} features, found {}", row.len())));
            }
            rows.push(row);
            labels.push(label);
        }
        Self::from_rows(rows, labels)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(&text, path)
    }

    /// Subset of rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            spectra: self.spectra.select(ndarray::Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Segment id to class label mapping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: BTreeMap<u64, ClassLabel>,
}

impl Manifest {
    pub fn new(entries: impl IntoIterator<Item = (u64, ClassLabel)>) -> Self {
        Self {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, segment_id: u64) -> Option<ClassLabel> {
        self.entries.get(&segment_id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `segment_id,class_code` rows. A non-numeric first line is taken as a header.
    pub fn read(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |column: usize, detail: String| Error::MalformedCsv {
                path: path.to_path_buf(),
                row: i + 1,
                column,
                detail,
            };
            let mut parts = line.split(',').map(str::trim);
            let id_tok = parts.next().unwrap_or_default();
            let Ok(id) = id_tok.parse::<u64>() else {
                if i == 0 {
                    continue;
                }
                return Err(malformed(1, format!("bad segment id `{id_tok}`")));
            };
            let code_tok = parts.next().ok_or_else(|| malformed(2, "missing class code".into()))?;
            let label = code_tok
                .parse::<usize>()
                .ok()
                .and_then(ClassLabel::from_code)
                .ok_or_else(|| malformed(2, format!("bad class code `{code_tok}`")))?;
            entries.insert(id, label);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::read(&text, path)
    }

    pub fn write(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "segment_id,class_code")?;
        for (id, label) in &self.entries {
            writeln!(out, "{id},{}", label.code())?;
        }
        Ok(())
    }

    /// Derives labels from archive recording codes embedded in segment ids.
    pub fn from_archive_ids(ids: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for id in ids {
            let label = ClassLabel::from_archive_code(id / 1000).ok_or(Error::Label { segment_id: id })?;
            entries.insert(id, label);
        }
        Ok(Self { entries })
    }
}

/// A lower/upper segment pair with its class.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPair {
    pub lower: RFSegment,
    pub upper: RFSegment,
    pub label: ClassLabel,
}

fn segment_name_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(\d+)([LH])(?:_(\d+))?\.csv$").expect("valid regex"))
}

/// Parses a segment file name into (segment id, half).
pub fn parse_segment_name(name: &str) -> Option<(u64, ReceiverHalf)> {
    let caps = segment_name_pattern().captures(name)?;
    let code: u64 = caps[1].parse().ok()?;
    let half = if &caps[2] == "L" {
        ReceiverHalf::Lower
    } else {
        ReceiverHalf::Upper
    };
    let id = match caps.get(3) {
        Some(k) => code.checked_mul(1000)?.checked_add(k.as_str().parse().ok()?)?,
        None => code,
    };
    Some((id, half))
}

pub fn segment_file_name(segment_id: u64, half: ReceiverHalf) -> String {
    format!("{:05}{}_{}.csv", segment_id / 1000, half.marker(), segment_id % 1000)
}

/// Lists `(segment id, path)` for files of the given half in `dir`.
pub fn scan_segment_dir(dir: &Path, half: ReceiverHalf) -> Result<BTreeMap<u64, PathBuf>> {
    let mut found = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        if let Some((id, h)) = name.to_str().and_then(parse_segment_name) {
            if h == half {
                found.insert(id, entry.path());
            }
        }
    }
    Ok(found)
}

/// Parses one segment file: decimal amplitudes separated by commas or newlines.
pub fn parse_segment_text(text: &str, path: &Path, half: ReceiverHalf, segment_id: u64) -> Result<RFSegment> {
    let mut samples = Vec::new();
    for (r, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        for (c, tok) in line.split(',').enumerate() {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| Error::MalformedCsv {
                path: path.to_path_buf(),
                row: r + 1,
                column: c + 1,
                detail: format!("non-numeric token `{tok}`"),
            })?;
            samples.push(v);
        }
    }
    RFSegment::new(samples, half, segment_id)
}

pub fn read_segment(path: &Path, half: ReceiverHalf, segment_id: u64) -> Result<RFSegment> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_segment_text(&text, path, half, segment_id)
}

pub fn write_segment(path: &Path, segment: &RFSegment) -> Result<()> {
    let mut out = String::with_capacity(segment.n_samples() * 20);
    for (i, v) in segment.samples().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&v.to_string());
    }
    out.push('\n');
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads and pairs lower/upper segment files, labelling each pair from the manifest.
///
/// Every lower file must have an upper partner with the same segment id and
/// sample count, and vice versa. Unmatched ids are all reported in one error.
pub fn load_dronerf_pairs(lower_dir: &Path, upper_dir: &Path, manifest: &Manifest) -> Result<Vec<SegmentPair>> {
    let lower = scan_segment_dir(lower_dir, ReceiverHalf::Lower)?;
    let upper = scan_segment_dir(upper_dir, ReceiverHalf::Upper)?;

    let lower_ids: BTreeSet<u64> = lower.keys().copied().collect();
    let upper_ids: BTreeSet<u64> = upper.keys().copied().collect();
    let no_upper: Vec<u64> = lower_ids.difference(&upper_ids).copied().collect();
    if !no_upper.is_empty() {
        return Err(Error::MissingPair {
            missing: "upper",
            segment_ids: no_upper,
        });
    }
    let no_lower: Vec<u64> = upper_ids.difference(&lower_ids).copied().collect();
    if !no_lower.is_empty() {
        return Err(Error::MissingPair {
            missing: "lower",
            segment_ids: no_lower,
        });
    }

    let jobs: Vec<(u64, ClassLabel, &PathBuf, &PathBuf)> = lower
        .iter()
        .map(|(&id, lp)| {
            let label = manifest.get(id).ok_or(Error::Label { segment_id: id })?;
            Ok((id, label, lp, &upper[&id]))
        })
        .collect::<Result<_>>()?;

    jobs.into_par_iter()
        .map(|(id, label, lp, up)| {
            let lower = read_segment(lp, ReceiverHalf::Lower, id)?;
            let upper = read_segment(up, ReceiverHalf::Upper, id)?;
            if lower.n_samples() != upper.n_samples() {
                return Err(Error::PairLength {
                    segment_id: id,
                    lower: lower.n_samples(),
                    upper: upper.n_samples(),
                });
            }
            Ok(SegmentPair { lower, upper, label })
        })
        .collect()
}

/// Cuts every pair into `parts` aligned sub-segment pairs with the same label.
pub fn split_pairs(pairs: &[SegmentPair], parts: usize) -> Result<Vec<SegmentPair>> {
    let mut out = Vec::with_capacity(pairs.len() * parts);
    for p in pairs {
        for (lower, upper) in p.lower.split(parts)?.into_iter().zip(p.upper.split(parts)?) {
            out.push(SegmentPair {
                lower,
                upper,
                label: p.label,
            });
        }
    }
    Ok(out)
}

/// Loads an archive directory: either `L/` and `H/` subdirectories or both
/// halves side by side. Labels come from `manifest.csv` when present,
/// otherwise from the recording codes in the file names.
pub fn load_archive(dir: &Path) -> Result<Vec<SegmentPair>> {
    let (lower_dir, upper_dir) = if dir.join("L").is_dir() && dir.join("H").is_dir() {
        (dir.join("L"), dir.join("H"))
    } else {
        (dir.to_path_buf(), dir.to_path_buf())
    };
    let manifest_path = dir.join("manifest.csv");
    let manifest = if manifest_path.is_file() {
        Manifest::load(&manifest_path)?
    } else {
        Manifest::from_archive_ids(scan_segment_dir(&lower_dir, ReceiverHalf::Lower)?.into_keys())?
    };
    load_dronerf_pairs(&lower_dir, &upper_dir, &manifest)
}

/// Writes pairs in the archive layout: `<dir>/L/*.csv`, `<dir>/H/*.csv`, `<dir>/manifest.csv`.
pub fn write_pairs(dir: &Path, pairs: &[SegmentPair]) -> Result<()> {
    let lower_dir = dir.join("L");
    let upper_dir = dir.join("H");
    for d in [&lower_dir, &upper_dir] {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    pairs.par_iter().try_for_each(|p| {
        write_segment(&lower_dir.join(segment_file_name(p.lower.segment_id(), ReceiverHalf::Lower)), &p.lower)?;
        write_segment(&upper_dir.join(segment_file_name(p.upper.segment_id(), ReceiverHalf::Upper)), &p.upper)
    })?;
    let manifest = Manifest::new(pairs.iter().map(|p| (p.lower.segment_id(), p.label)));
    let path = dir.join("manifest.csv");
    let mut buf = Vec::new();
    manifest.write(&mut buf).map_err(|e| Error::io(&path, e))?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))
}

/// One sinusoid: `amplitude * cos(2π * frequency * n + phase)`, frequency in cycles per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthTone {
    pub frequency: f64,
    pub amplitude: f64,
}

impl SynthTone {
    /// Tone centred exactly on bin `bin` of a `transform_len`-point transform.
    pub fn at_bin(bin: usize, transform_len: usize, amplitude: f64) -> Self {
        Self {
            frequency: bin as f64 / transform_len as f64,
            amplitude,
        }
    }
}

/// Sinusoid banks for both receivers plus white Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    pub label: ClassLabel,
    pub segment_len: usize,
    pub lower: Vec<SynthTone>,
    pub upper: Vec<SynthTone>,
    pub noise_std: f64,
}

impl SynthProfile {
    fn validate(&self) -> Result<()> {
        if self.segment_len < 2 {
            return Err(Error::Profile(format!("{}: segment_len must be at least 2", self.label)));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Profile(format!("{}: noise_std must be finite and >= 0", self.label)));
        }
        for (name, tones) in [("lower", &self.lower), ("upper", &self.upper)] {
            if tones.is_empty() && self.noise_std == 0.0 {
                return Err(Error::Profile(format!(
                    "{}: {name} half has no tones and zero noise",
                    self.label
                )));
            }
            if tones.iter().any(|t| !t.frequency.is_finite() || !t.amplitude.is_finite()) {
                return Err(Error::Profile(format!("{}: non-finite tone parameter", self.label)));
            }
        }
        Ok(())
    }

    fn render(&self, tones: &[SynthTone], rng: &mut seed::Rng) -> Vec<f64> {
        let phases: Vec<f64> = tones
            .iter()
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        let noise = Normal::new(0.0, self.noise_std).expect("validated noise std");
        (0..self.segment_len)
            .map(|n| {
                let t = n as f64;
                let clean: f64 = tones
                    .iter()
                    .zip(&phases)
                    .map(|(tone, ph)| tone.amplitude * (std::f64::consts::TAU * tone.frequency * t + ph).cos())
                    .sum();
                if self.noise_std > 0.0 {
                    clean + noise.sample(rng)
                } else {
                    clean
                }
            })
            .collect()
    }
}

/// Four well-separated class profiles for desk-scale experiments.
///
/// Tones sit on exact bins of a `transform_len`-point transform, away from
/// the stitching boundary; the no-drone class is noise only.
pub fn default_profiles(segment_len: usize, transform_len: usize) -> Vec<SynthProfile> {
    let half = transform_len / 2;
    let bin = |frac: f64| ((half as f64) * frac).round() as usize;
    let tone = |frac: f64, amp: f64| SynthTone::at_bin(bin(frac), transform_len, amp);
    let profile = |label, lower, upper| SynthProfile {
        label,
        segment_len,
        lower,
        upper,
        noise_std: 0.5,
    };
    vec![
        profile(ClassLabel::NoDrone, vec![], vec![]),
        profile(
            ClassLabel::Bebop,
            vec![tone(0.10, 1.0), tone(0.35, 0.6)],
            vec![tone(0.30, 0.8)],
        ),
        profile(
            ClassLabel::AR,
            vec![tone(0.20, 1.0)],
            vec![tone(0.45, 0.8), tone(0.70, 0.5)],
        ),
        profile(
            ClassLabel::Phantom,
            vec![tone(0.55, 0.9)],
            vec![tone(0.15, 1.0)],
        ),
    ]
}

/// Generates `segments_per_class` labelled pairs per profile.
///
/// Each segment draws from its own stream derived from `(seed, class, index)`,
/// so output is independent of generation order.
pub fn synth_generate(profiles: &[SynthProfile], segments_per_class: usize, seed: u64) -> Result<Vec<SegmentPair>> {
    if segments_per_class == 0 {
        return Err(Error::Profile("segments_per_class must be at least 1".into()));
    }
    if segments_per_class > 1000 {
        return Err(Error::Profile("segments_per_class is limited to 1000 by the segment id scheme".into()));
    }
    let mut seen = HashMap::new();
    for p in profiles {
        p.validate()?;
        if seen.insert(p.label, ()).is_some() {
            return Err(Error::Profile(format!("duplicate profile for class {}", p.label)));
        }
    }
    let mut out = Vec::with_capacity(profiles.len() * segments_per_class);
    for p in profiles {
        for k in 0..segments_per_class {
            let id = p.label.archive_code() * 1000 + k as u64;
            let mut rng = seed::rng(seed::derive_indexed(seed, &format!("synth/{}", p.label.code()), k as u64));
            let lower = RFSegment::new(p.render(&p.lower, &mut rng), ReceiverHalf::Lower, id)?;
            let upper = RFSegment::new(p.render(&p.upper, &mut rng), ReceiverHalf::Upper, id)?;
            out.push(SegmentPair {
                lower,
                upper,
                label: p.label,
            });
        }
    }
    Ok(out)
}
