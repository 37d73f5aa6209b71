//! Dataset ingestion, synthetic data generation, pool/split management, and
//! the labeling oracle for the simulated annotation loop.
//!
//! Two on-disk formats are supported:
//!
//! * delimited text: first line `# n=<N> d=<d> y=<Y>`, then one instance per
//!   line as `d` tab-separated decimal floats followed by an integer label;
//! * binary: 16-byte header (magic `RALD`, then N, d, Y as little-endian u32),
//!   `N*d` little-endian f32 features, then `N` little-endian u32 labels.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const BINARY_MAGIC: &[u8; 4] = b"RALD";

/// Dense feature matrix with ground-truth class labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<u32>,
    pub num_classes: usize,
    pub name: String,
}

/// Features plus labels for a subset of instances, in the caller's order.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    pub features: Matrix,
    pub labels: Vec<u32>,
}

impl LabeledSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl Dataset {
    /// Validates the invariants: nonempty, at least two classes, labels in
    /// range, all feature values finite.
    pub fn new(features: Matrix, labels: Vec<u32>, num_classes: usize, name: String) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::invalid("dataset must have at least one row and one column"));
        }
        if num_classes < 2 {
            return Err(Error::invalid("dataset needs at least 2 classes"));
        }
        if labels.len() != features.rows() {
            return Err(Error::invalid(format!(
                "{} labels for {} rows",
                labels.len(),
                features.rows()
            )));
        }
        for (i, &y) in labels.iter().enumerate() {
            if (y as usize) >= num_classes {
                return Err(Error::invalid(format!(
                    "label {y} out of range (y={num_classes}) at row {}",
                    i + 1
                )));
            }
        }
        if !features.all_finite() {
            return Err(Error::invalid("non-finite feature value"));
        }
        Ok(Dataset {
            features,
            labels,
            num_classes,
            name,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    /// Gather features and labels for the given indices.
    pub fn subset(&self, indices: &[usize]) -> LabeledSet {
        LabeledSet {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Text,
    Binary,
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetFormat::Text => write!(f, "text"),
            DatasetFormat::Binary => write!(f, "binary"),
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(DatasetFormat::Text),
            "binary" => Ok(DatasetFormat::Binary),
            other => Err(Error::invalid(format!(
                "unknown dataset format '{other}' (expected text or binary)"
            ))),
        }
    }
}

/// Guess the format from the leading magic bytes.
pub fn sniff_format(path: &Path) -> Result<DatasetFormat> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        Ok(DatasetFormat::Binary)
    } else {
        Ok(DatasetFormat::Text)
    }
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Dataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    match format {
        DatasetFormat::Text => load_text(path, name),
        DatasetFormat::Binary => load_binary(path, name),
    }
}

pub fn write_dataset(ds: &Dataset, path: &Path, format: DatasetFormat) -> Result<()> {
    match format {
        DatasetFormat::Text => write_text(ds, path),
        DatasetFormat::Binary => write_binary(ds, path),
    }
}

fn load_text(path: &Path, name: String) -> Result<Dataset> {
    let p = path.display().to_string();
    let content = fs::read_to_string(path)?;
    let mut lines = content.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::data(&p, "empty file"))?;
    let (n, d, y) = parse_text_header(header).map_err(|m| Error::data(&p, m))?;

    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (row, line) in lines.enumerate() {
        let row_no = row + 1; // 1-based data row
        if row >= n {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::data(&p, format!("more than n={n} data rows")));
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != d + 1 {
            return Err(Error::data(
                &p,
                format!("row {row_no}: expected {} fields, found {}", d + 1, fields.len()),
            ));
        }
        for (c, f) in fields[..d].iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| {
                Error::data(&p, format!("row {row_no}: bad float in column {}", c + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::data(
                    &p,
                    format!("row {row_no}: non-finite feature in column {}", c + 1),
                ));
            }
            data.push(v);
        }
        let label: u32 = fields[d]
            .parse()
            .map_err(|_| Error::data(&p, format!("row {row_no}: bad label")))?;
        if (label as usize) >= y {
            return Err(Error::data(
                &p,
                format!("label {label} out of range (y={y}) at row {row_no}"),
            ));
        }
        labels.push(label);
    }
    if labels.len() != n {
        return Err(Error::data(
            &p,
            format!("header declares n={n} but found {} rows", labels.len()),
        ));
    }
    Dataset::new(Matrix::from_vec(n, d, data), labels, y, name)
}

fn parse_text_header(header: &str) -> std::result::Result<(usize, usize, usize), String> {
    let rest = header
        .strip_prefix('#')
        .ok_or_else(|| "malformed header: expected leading '#'".to_string())?;
    let mut n = None;
    let mut d = None;
    let mut y = None;
    for tok in rest.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| format!("malformed header token '{tok}'"))?;
        let parsed: usize = value
            .parse()
            .map_err(|_| format!("malformed header value '{value}'"))?;
        match key {
            "n" => n = Some(parsed),
            "d" => d = Some(parsed),
            "y" => y = Some(parsed),
            other => return Err(format!("unknown header key '{other}'")),
        }
    }
    match (n, d, y) {
        (Some(n), Some(d), Some(y)) => Ok((n, d, y)),
        _ => Err("malformed header: need n=, d=, y=".to_string()),
    }
}

fn write_text(ds: &Dataset, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(
        w,
        "# n={} d={} y={}",
        ds.len(),
        ds.feature_dim(),
        ds.num_classes
    )?;
    for (row, &label) in ds.features.iter_rows().zip(&ds.labels) {
        for v in row {
            write!(w, "{v}\t")?;
        }
        writeln!(w, "{label}")?;
    }
    w.flush()?;
    Ok(())
}

fn load_binary(path: &Path, name: String) -> Result<Dataset> {
    let p = path.display().to_string();
    let bytes = fs::read(path)?;
    if bytes.len() < 16 || &bytes[..4] != BINARY_MAGIC {
        return Err(Error::data(&p, "malformed header: missing RALD magic"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let y = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = 16 + n * d * 4 + n * 4;
    if bytes.len() != expected {
        return Err(Error::data(
            &p,
            format!("expected {expected} bytes for n={n} d={d}, found {}", bytes.len()),
        ));
    }
    let mut data = Vec::with_capacity(n * d);
    let mut off = 16;
    for i in 0..n * d {
        let v = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;
        if !v.is_finite() {
            return Err(Error::data(
                &p,
                format!("non-finite feature at row {}", i / d + 1),
            ));
        }
        data.push(v);
        off += 4;
    }
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
        if (label as usize) >= y {
            return Err(Error::data(
                &p,
                format!("label {label} out of range (y={y}) at row {}", i + 1),
            ));
        }
        labels.push(label);
        off += 4;
    }
    Dataset::new(Matrix::from_vec(n, d, data), labels, y, name)
}

fn write_binary(ds: &Dataset, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + ds.len() * (ds.feature_dim() + 1) * 4);
    bytes.extend_from_slice(BINARY_MAGIC);
    bytes.extend_from_slice(&(ds.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&(ds.feature_dim() as u32).to_le_bytes());
    bytes.extend_from_slice(&(ds.num_classes as u32).to_le_bytes());
    for v in ds.features.data() {
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    for &label in &ds.labels {
        bytes.extend_from_slice(&label.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Recipe for a Gaussian-mixture dataset with controllable class boundary noise.
///
/// Class means sit on scaled standard-basis vectors (equal pairwise distance
/// `center_spread` whenever `dim >= num_classes`; for narrower feature spaces
/// seeded random directions of the same scale are used instead). A fraction
/// `overlap_fraction` of each class is drawn from the next class's Gaussian
/// while keeping the original label, planting label errors along the boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub dim: usize,
    pub points_per_class: usize,
    pub center_spread: f64,
    pub noise_sigma: f64,
    pub overlap_fraction: f64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::invalid("num_classes must be >= 2"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dim must be >= 1"));
        }
        if self.points_per_class == 0 {
            return Err(Error::invalid("points_per_class must be >= 1"));
        }
        if !self.center_spread.is_finite() || self.center_spread < 0.0 {
            return Err(Error::invalid("center_spread must be finite and >= 0"));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma <= 0.0 {
            return Err(Error::invalid("noise_sigma must be finite and > 0"));
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return Err(Error::invalid("overlap_fraction must be in [0, 1]"));
        }
        Ok(())
    }

    /// Stable name derived from the recipe fields alone, so runs over
    /// different seeds of the same recipe group together in summaries.
    pub fn dataset_name(&self) -> String {
        format!(
            "synthetic-y{}-d{}-n{}-o{}",
            self.num_classes, self.dim, self.points_per_class, self.overlap_fraction
        )
    }
}

/// Deterministic Gaussian-mixture generator. Rows are grouped by class.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let y = spec.num_classes;
    let d = spec.dim;
    let ppc = spec.points_per_class;
    let n = y * ppc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = class_means(spec, &mut rng);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let overlap_count = (spec.overlap_fraction * ppc as f64).round() as usize;
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for c in 0..y {
        let mut ids: Vec<usize> = (0..ppc).collect();
        let (chosen, _) = ids.partial_shuffle(&mut rng, overlap_count);
        let overlap_set: HashSet<usize> = chosen.iter().copied().collect();
        for p in 0..ppc {
            let source = if overlap_set.contains(&p) { (c + 1) % y } else { c };
            let mean = means.row(source);
            for &m in mean.iter().take(d) {
                features.push(m + spec.noise_sigma * normal.sample(&mut rng));
            }
            labels.push(c as u32);
        }
    }
    Dataset::new(Matrix::from_vec(n, d, features), labels, y, spec.dataset_name())
}

fn class_means(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Matrix {
    let y = spec.num_classes;
    let d = spec.dim;
    // Scaled basis vectors are pairwise `center_spread` apart.
    let scale = spec.center_spread / 2.0_f64.sqrt();
    let mut means = Matrix::zeros(y, d);
    if d >= y {
        for c in 0..y {
            means.set(c, c, scale);
        }
    } else {
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        for c in 0..y {
            let mut v: Vec<f64> = (0..d).map(|_| normal.sample(rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            for x in &mut v {
                *x *= scale / norm;
            }
            means.row_mut(c).copy_from_slice(&v);
        }
    }
    means
}

/// Partition of instance indices into labeled, unlabeled, validation, and
/// test sets. All index sets are kept sorted so iteration is reproducible.
#[derive(Debug, Clone)]
pub struct PoolState {
    labeled: Vec<usize>,
    unlabeled: Vec<usize>,
    validation: Vec<usize>,
    test: Vec<usize>,
    round: usize,
}

impl PoolState {
    /// Build from explicit parts, validating sortedness and pairwise disjointness.
    pub fn from_parts(
        labeled: Vec<usize>,
        unlabeled: Vec<usize>,
        validation: Vec<usize>,
        test: Vec<usize>,
    ) -> Result<Self> {
        let pool = PoolState {
            labeled,
            unlabeled,
            validation,
            test,
            round: 0,
        };
        pool.check_invariants()?;
        Ok(pool)
    }

    fn check_invariants(&self) -> Result<()> {
        if self.labeled.is_empty() {
            return Err(Error::invalid("labeled set must be nonempty"));
        }
        let mut seen = HashSet::new();
        for set in [&self.labeled, &self.unlabeled, &self.validation, &self.test] {
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("index sets must be strictly sorted"));
            }
            for &i in set {
                if !seen.insert(i) {
                    return Err(Error::invalid(format!("index {i} appears in two sets")));
                }
            }
        }
        Ok(())
    }

    pub fn labeled(&self) -> &[usize] {
        &self.labeled
    }

    pub fn unlabeled(&self) -> &[usize] {
        &self.unlabeled
    }

    pub fn validation(&self) -> &[usize] {
        &self.validation
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn contains_unlabeled(&self, index: usize) -> bool {
        self.unlabeled.binary_search(&index).is_ok()
    }

    /// Move freshly labeled indices from the unlabeled pool into the labeled
    /// set and advance the round counter. Errors if any index is not currently
    /// unlabeled; the pool is left untouched on error.
    pub fn commit_acquisition(&mut self, indices: &[usize]) -> Result<()> {
        let mut unique = HashSet::new();
        for &i in indices {
            if !unique.insert(i) {
                return Err(Error::precondition(format!("duplicate index {i} in acquisition")));
            }
            if !self.contains_unlabeled(i) {
                return Err(Error::precondition(format!(
                    "index {i} is not in the unlabeled pool"
                )));
            }
        }
        self.unlabeled.retain(|i| !unique.contains(i));
        self.labeled.extend(indices.iter().copied());
        self.labeled.sort_unstable();
        self.round += 1;
        Ok(())
    }
}

/// Stratified warm-up split: each class contributes `floor(L/Y)` or
/// `ceil(L/Y)` instances (lower class ids take the remainder), then
/// validation and test sets are drawn from the rest, and everything left
/// becomes the unlabeled pool. Deterministic for a fixed seed.
pub fn split_pool(
    dataset: &Dataset,
    warmup_size: usize,
    validation_size: usize,
    test_size: usize,
    seed: u64,
) -> Result<PoolState> {
    let n = dataset.len();
    let y = dataset.num_classes;
    if warmup_size < y {
        return Err(Error::invalid(format!(
            "warm-up size {warmup_size} must be >= number of classes {y}"
        )));
    }
    if warmup_size + validation_size + test_size > n {
        return Err(Error::invalid(format!(
            "warmup + validation + test = {} exceeds dataset size {n}",
            warmup_size + validation_size + test_size
        )));
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); y];
    for (i, &label) in dataset.labels.iter().enumerate() {
        by_class[label as usize].push(i);
    }
    let base = warmup_size / y;
    let extra = warmup_size % y;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labeled = Vec::with_capacity(warmup_size);
    for (c, class_indices) in by_class.iter_mut().enumerate() {
        let want = base + usize::from(c < extra);
        if class_indices.len() < want {
            return Err(Error::invalid(format!(
                "class {c} has {} instances, stratified warm-up needs {want}",
                class_indices.len()
            )));
        }
        class_indices.shuffle(&mut rng);
        labeled.extend_from_slice(&class_indices[..want]);
    }
    let labeled_set: HashSet<usize> = labeled.iter().copied().collect();
    let mut rest: Vec<usize> = (0..n).filter(|i| !labeled_set.contains(i)).collect();
    rest.shuffle(&mut rng);
    let mut validation: Vec<usize> = rest[..validation_size].to_vec();
    let mut test: Vec<usize> = rest[validation_size..validation_size + test_size].to_vec();
    let mut unlabeled: Vec<usize> = rest[validation_size + test_size..].to_vec();

    labeled.sort_unstable();
    unlabeled.sort_unstable();
    validation.sort_unstable();
    test.sort_unstable();
    PoolState::from_parts(labeled, unlabeled, validation, test)
}

/// Reveal ground-truth labels for unlabeled indices. The pool itself is not
/// mutated here; callers move the indices via [`PoolState::commit_acquisition`].
pub fn oracle_label(
    pool: &PoolState,
    dataset: &Dataset,
    indices: &[usize],
) -> Result<Vec<(usize, u32)>> {
    for &i in indices {
        if !pool.contains_unlabeled(i) {
            return Err(Error::precondition(format!(
                "index {i} is not in the unlabeled pool"
            )));
        }
    }
    Ok(indices.iter().map(|&i| (i, dataset.labels[i])).collect())
}
