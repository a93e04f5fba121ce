//! Deterministic synthetic imbalanced dataset generator.
//!
//! Produces a six-class dataset whose class structure mirrors an urban
//! traffic distribution: one dominant class (Car, ~84%) and several small
//! minority classes at 2–6% each. Every class has a smooth band-pattern
//! prototype; samples are the prototype plus per-cell Gaussian noise,
//! clamped to `[0, 1]`.
//!
//! Truck's prototype is Car's plus a localized low-row band, so the two
//! classes are close in feature space: separable when cleanly labeled, but
//! near enough that flipped labels collapse the boundary. All other class
//! pairs are far apart.
//!
//! Generation is fully deterministic: each sample's noise comes from a
//! substream keyed by `(seed, id)`, so output is independent of iteration
//! or scheduling order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::digest::Digest;
use crate::grid::FeatureGrid;
use crate::manifest::{Partition, SampleRecord, SplitRecord, StageManifest};

/// Default per-class sample counts (dominant Car plus five minorities).
pub const DEFAULT_CLASS_COUNTS: [(&str, u32); 6] = [
    ("Car", 8100),
    ("Tram", 600),
    ("Truck", 260),
    ("Bus", 260),
    ("Motorcycle", 250),
    ("Bicycle", 220),
];

pub const DEFAULT_ROWS: u16 = 16;
pub const DEFAULT_COLS: u16 = 16;
pub const DEFAULT_NOISE_SIGMA: f64 = 0.30;
pub const DEFAULT_TRUCK_CAR_OFFSET: f64 = 0.5;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.70;

/// Flat background level of every prototype.
const BACKGROUND: f64 = 0.08;

/// Gaussian row-band: (center row fraction, row sigma fraction, amplitude).
const CAR_BAND: (f64, f64, f64) = (0.22, 0.10, 0.55);
const TRAM_BAND: (f64, f64, f64) = (0.50, 0.09, 0.50);
const BUS_BAND: (f64, f64, f64) = (0.72, 0.11, 0.50);
const MOTORCYCLE_BAND: (f64, f64, f64) = (0.34, 0.06, 0.60);
const BICYCLE_BAND: (f64, f64, f64) = (0.55, 0.19, 0.25);

/// Truck's distinguishing block on top of the Car prototype, as grid
/// fractions: rows `[0, TRUCK_BLOCK_ROWS)`, cols starting at
/// `TRUCK_BLOCK_COL_START` spanning `TRUCK_BLOCK_COL_SPAN`.
const TRUCK_BLOCK_ROWS: f64 = 0.125;
const TRUCK_BLOCK_COL_START: f64 = 0.25;
const TRUCK_BLOCK_COL_SPAN: f64 = 0.25;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("class `{0}` has zero samples")]
    EmptyClass(String),
    #[error("duplicate class name `{0}`")]
    DuplicateClass(String),
    #[error("no default prototype for class `{0}`")]
    UnknownClass(String),
    #[error("invalid class name `{0}`")]
    BadClassName(String),
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
}

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("train fraction must be in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("class `{class}` has {count} samples; need at least 2 to populate both partitions")]
    TooFewSamples { class: String, count: usize },
}

/// One generated class: name, sample count, and noise-free prototype.
#[derive(Debug, Clone)]
pub struct ClassSpec {
    pub name: String,
    pub count: u32,
    pub prototype: FeatureGrid,
}

/// Generator configuration.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub rows: u16,
    pub cols: u16,
    pub noise_sigma: f64,
    pub truck_car_offset: f64,
    pub seed: u64,
    pub classes: Vec<ClassSpec>,
}

/// Add a Gaussian row-band to a prototype buffer.
fn add_band(values: &mut [f64], rows: u16, cols: u16, band: (f64, f64, f64)) {
    let (center_frac, sigma_frac, amplitude) = band;
    let center = center_frac * (rows as f64 - 1.0);
    let sigma = (sigma_frac * rows as f64).max(0.5);
    for r in 0..rows as usize {
        let z = (r as f64 - center) / sigma;
        let v = amplitude * (-0.5 * z * z).exp();
        for c in 0..cols as usize {
            values[r * cols as usize + c] += v;
        }
    }
}

/// Truck's localized low-row block cells for the given grid size.
pub fn truck_block_cells(rows: u16, cols: u16) -> Vec<(u16, u16)> {
    let block_rows = ((TRUCK_BLOCK_ROWS * rows as f64).round() as u16).clamp(1, rows);
    let col_start = (TRUCK_BLOCK_COL_START * cols as f64).round() as u16;
    let col_span = ((TRUCK_BLOCK_COL_SPAN * cols as f64).round() as u16).clamp(1, cols);
    let col_end = (col_start + col_span).min(cols);
    let mut cells = Vec::new();
    for r in 0..block_rows {
        for c in col_start..col_end {
            cells.push((r, c));
        }
    }
    cells
}

fn build_prototype(
    name: &str,
    rows: u16,
    cols: u16,
    truck_car_offset: f64,
) -> Result<FeatureGrid, GenError> {
    let n = rows as usize * cols as usize;
    let mut values = vec![BACKGROUND; n];
    match name {
        "Car" => add_band(&mut values, rows, cols, CAR_BAND),
        "Truck" => {
            add_band(&mut values, rows, cols, CAR_BAND);
            for (r, c) in truck_block_cells(rows, cols) {
                values[r as usize * cols as usize + c as usize] += truck_car_offset;
            }
        }
        "Tram" => add_band(&mut values, rows, cols, TRAM_BAND),
        "Bus" => add_band(&mut values, rows, cols, BUS_BAND),
        "Motorcycle" => add_band(&mut values, rows, cols, MOTORCYCLE_BAND),
        "Bicycle" => add_band(&mut values, rows, cols, BICYCLE_BAND),
        other => return Err(GenError::UnknownClass(other.to_string())),
    }
    let clamped: Vec<f32> = values.iter().map(|&v| v.clamp(0.0, 1.0) as f32).collect();
    Ok(FeatureGrid::new(rows, cols, clamped)?)
}

impl GenConfig {
    /// Default configuration with the Table-style class counts.
    pub fn with_seed(seed: u64) -> Self {
        Self::custom(
            DEFAULT_ROWS,
            DEFAULT_COLS,
            DEFAULT_NOISE_SIGMA,
            DEFAULT_TRUCK_CAR_OFFSET,
            seed,
            &DEFAULT_CLASS_COUNTS
                .iter()
                .map(|&(n, c)| (n.to_string(), c))
                .collect::<Vec<_>>(),
        )
        .expect("default config is valid")
    }

    /// Configuration with explicit grid, noise, offset, and class counts.
    /// Counts must name classes from the default set.
    pub fn custom(
        rows: u16,
        cols: u16,
        noise_sigma: f64,
        truck_car_offset: f64,
        seed: u64,
        counts: &[(String, u32)],
    ) -> Result<Self, GenError> {
        let mut classes = Vec::with_capacity(counts.len());
        for (name, count) in counts {
            if *count == 0 {
                return Err(GenError::EmptyClass(name.clone()));
            }
            if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric()) {
                return Err(GenError::BadClassName(name.clone()));
            }
            if classes.iter().any(|c: &ClassSpec| c.name == *name) {
                return Err(GenError::DuplicateClass(name.clone()));
            }
            classes.push(ClassSpec {
                name: name.clone(),
                count: *count,
                prototype: build_prototype(name, rows, cols, truck_car_offset)?,
            });
        }
        Ok(GenConfig {
            rows,
            cols,
            noise_sigma,
            truck_car_offset,
            seed,
            classes,
        })
    }

    /// Total sample count N.
    pub fn total(&self) -> u64 {
        self.classes.iter().map(|c| c.count as u64).sum()
    }

    /// Class fraction β_c = count_c / N.
    pub fn class_fraction(&self, name: &str) -> Option<f64> {
        let total = self.total() as f64;
        self.classes
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.count as f64 / total)
    }

    /// Class names in configuration order (the model's class order).
    pub fn class_order(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }
}

/// One generated sample: its manifest record, raw source bytes, and features.
#[derive(Debug, Clone)]
pub struct GeneratedSample {
    pub record: SampleRecord,
    pub raw_bytes: Vec<u8>,
    pub features: FeatureGrid,
}

/// A generated dataset, sorted by sample id.
#[derive(Debug, Clone)]
pub struct GeneratedDataset {
    pub samples: Vec<GeneratedSample>,
}

/// Per-sample noise substream keyed by `(seed, id)`.
fn sample_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"pbench.sample\0");
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Per-class shuffle substream for the stratified split.
fn split_rng(seed: u64, class: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"pbench.split\0");
    h.update(seed.to_le_bytes());
    h.update(class.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Generate the full dataset: raw source bytes, feature grids, and records
/// with correct content hashes. Deterministic given the config seed.
pub fn generate(cfg: &GenConfig) -> Result<GeneratedDataset, GenError> {
    let sigma = cfg.noise_sigma;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut samples = Vec::with_capacity(cfg.total() as usize);
    for class in &cfg.classes {
        if class.count == 0 {
            return Err(GenError::EmptyClass(class.name.clone()));
        }
        let proto = class.prototype.values();
        let proto_bytes = class.prototype.to_bytes();
        for i in 0..class.count {
            let id = format!("{}-{:05}", class.name.to_ascii_lowercase(), i);

            // Raw source file: the noise-free prototype bytes plus the id,
            // standing in for the recorded signal.
            let mut raw_bytes = proto_bytes.clone();
            raw_bytes.extend_from_slice(id.as_bytes());

            let mut rng = sample_rng(cfg.seed, &id);
            let values: Vec<f32> = proto
                .iter()
                .map(|&p| {
                    let z: f64 = normal.sample(&mut rng);
                    (p as f64 + sigma * z).clamp(0.0, 1.0) as f32
                })
                .collect();
            let features = FeatureGrid::new(cfg.rows, cfg.cols, values)?;

            let record = SampleRecord {
                h_raw: Digest::of(&raw_bytes),
                h_feat: Digest::of(&features.to_bytes()),
                id,
                label: class.name.clone(),
            };
            samples.push(GeneratedSample {
                record,
                raw_bytes,
                features,
            });
        }
    }
    samples.sort_by(|a, b| a.record.id.cmp(&b.record.id));
    Ok(GeneratedDataset { samples })
}

impl GeneratedDataset {
    pub fn records(&self) -> Vec<SampleRecord> {
        self.samples.iter().map(|s| s.record.clone()).collect()
    }

    pub fn raw_manifest(&self) -> StageManifest {
        let records = self
            .samples
            .iter()
            .map(|s| crate::manifest::RawRecord {
                id: s.record.id.clone(),
                h_raw: s.record.h_raw,
            })
            .collect();
        StageManifest::raw(records).expect("generated ids are unique and valid")
    }

    pub fn annotation_manifest(&self, prev: Digest) -> StageManifest {
        StageManifest::annotation(prev, self.records())
            .expect("generated ids are unique and valid")
    }

    pub fn features_manifest(&self, prev: Digest, root: Digest) -> StageManifest {
        StageManifest::features(prev, root, self.records())
            .expect("generated ids are unique and valid")
    }
}

/// Stratified train/test split: per class, `round_half_up(fraction · N_c)`
/// samples go to train (at least one sample lands in each partition), the
/// rest to test. Deterministic given the seed.
pub fn stratified_split(
    records: &[SampleRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<Vec<SplitRecord>, SplitError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SplitError::BadFraction(train_fraction));
    }
    let mut by_class: std::collections::BTreeMap<&str, Vec<&str>> = Default::default();
    for r in records {
        by_class.entry(&r.label).or_default().push(&r.id);
    }
    let mut out = Vec::with_capacity(records.len());
    for (class, mut ids) in by_class {
        let n = ids.len();
        if n < 2 {
            return Err(SplitError::TooFewSamples {
                class: class.to_string(),
                count: n,
            });
        }
        // Round half up, then keep both partitions nonempty.
        let n_train = ((train_fraction * n as f64 + 0.5).floor() as usize).clamp(1, n - 1);
        ids.sort_unstable();
        ids.shuffle(&mut split_rng(seed, class));
        for (i, id) in ids.into_iter().enumerate() {
            out.push(SplitRecord {
                id: id.to_string(),
                partition: if i < n_train {
                    Partition::Train
                } else {
                    Partition::Test
                },
            });
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn small_config(seed: u64) -> GenConfig {
        GenConfig::custom(
            16,
            16,
            DEFAULT_NOISE_SIGMA,
            DEFAULT_TRUCK_CAR_OFFSET,
            seed,
            &[
                ("Car".to_string(), 40),
                ("Truck".to_string(), 10),
                ("Bus".to_string(), 6),
            ],
        )
        .unwrap()
    }

    #[test]
    fn default_config_matches_expected_distribution() {
        let cfg = GenConfig::with_seed(1);
        assert_eq!(cfg.total(), 9690);
        let truck = cfg.classes.iter().find(|c| c.name == "Truck").unwrap();
        assert_eq!(truck.count, 260);
        let car_frac = cfg.class_fraction("Car").unwrap();
        assert!((car_frac - 8100.0 / 9690.0).abs() < 1e-12);
        assert!(car_frac > 0.83 && car_frac < 0.84);
    }

    #[test]
    fn generation_is_deterministic_and_seed_sensitive() {
        let cfg = small_config(7);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.records(), b.records());
        assert_eq!(
            a.raw_manifest().to_bytes(),
            b.raw_manifest().to_bytes()
        );

        let c = generate(&small_config(8)).unwrap();
        assert_ne!(a.records(), c.records());
    }

    #[test]
    fn zero_noise_gives_one_feature_hash_per_class() {
        let mut cfg = small_config(3);
        cfg.noise_sigma = 0.0;
        let data = generate(&cfg).unwrap();
        let mut per_class: std::collections::BTreeMap<&str, BTreeSet<Digest>> = Default::default();
        for s in &data.samples {
            per_class
                .entry(&s.record.label)
                .or_default()
                .insert(s.record.h_feat);
        }
        for (_, distinct) in per_class {
            assert_eq!(distinct.len(), 1);
        }
    }

    #[test]
    fn per_class_counts_are_exact() {
        let data = generate(&small_config(1)).unwrap();
        let count = |label: &str| {
            data.samples
                .iter()
                .filter(|s| s.record.label == label)
                .count()
        };
        assert_eq!(count("Car"), 40);
        assert_eq!(count("Truck"), 10);
        assert_eq!(count("Bus"), 6);
    }

    #[test]
    fn split_is_exact_for_truck_sized_class() {
        // 260 samples at 0.70 → 182 train / 78 test.
        let records: Vec<SampleRecord> = (0..260)
            .map(|i| SampleRecord {
                id: format!("truck-{i:05}"),
                label: "Truck".to_string(),
                h_raw: Digest::of(&[1]),
                h_feat: Digest::of(&[2]),
            })
            .collect();
        let split = stratified_split(&records, 0.70, 1).unwrap();
        let train = split
            .iter()
            .filter(|s| s.partition == Partition::Train)
            .count();
        assert_eq!(train, 182);
        assert_eq!(split.len() - train, 78);
    }

    #[test]
    fn split_smallest_legal_class() {
        let records: Vec<SampleRecord> = (0..2)
            .map(|i| SampleRecord {
                id: format!("x-{i}"),
                label: "Car".to_string(),
                h_raw: Digest::of(&[1]),
                h_feat: Digest::of(&[2]),
            })
            .collect();
        let split = stratified_split(&records, 0.5, 9).unwrap();
        let train = split
            .iter()
            .filter(|s| s.partition == Partition::Train)
            .count();
        assert_eq!(train, 1);
        assert_eq!(split.len(), 2);

        let one = &records[..1];
        assert!(matches!(
            stratified_split(one, 0.5, 9),
            Err(SplitError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn split_partitions_the_id_set() {
        let data = generate(&small_config(2)).unwrap();
        let records = data.records();
        let split = stratified_split(&records, 0.70, 2).unwrap();
        let all: BTreeSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
        let assigned: BTreeSet<&str> = split.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(all, assigned);
        assert_eq!(split.len(), records.len());
    }

    #[test]
    fn truck_prototype_is_car_plus_block() {
        let cfg = GenConfig::with_seed(0);
        let car = &cfg.classes.iter().find(|c| c.name == "Car").unwrap().prototype;
        let truck = &cfg
            .classes
            .iter()
            .find(|c| c.name == "Truck")
            .unwrap()
            .prototype;
        let block: BTreeSet<(u16, u16)> = truck_block_cells(16, 16).into_iter().collect();
        assert!(!block.is_empty());
        for r in 0..16u16 {
            for c in 0..16u16 {
                let (cv, tv) = (car.get(r, c), truck.get(r, c));
                if block.contains(&(r, c)) {
                    assert!((tv - cv - 0.5).abs() < 1e-6, "block cell ({r},{c})");
                } else {
                    assert_eq!(cv, tv, "non-block cell ({r},{c})");
                }
            }
        }
    }
}
