//! Word-illusionability regression.
//!
//! Ridge regression with an unpenalized intercept, solved in closed form
//! through the centered normal equations
//!
//! ```text
//! (XcᵀXc + λI) β = Xcᵀ yc,     b = ȳ − x̄ᵀβ
//! ```
//!
//! and wrapped in a randomized train/test trial ensemble. Each trial picks λ
//! from a grid by k-fold cross-validation inside its training split, fits,
//! and records train/test Pearson correlations. A word's out-of-fold
//! prediction uses the coefficients averaged over the trials that held it
//! out.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract_features, feature_names, IllusionFeatureVector, FEATURE_DIM};
use crate::phoneme::{phonemize, PronunciationLexicon};

pub const DEFAULT_LAMBDA_GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.85;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_CALIBRATION_EDGES: [f64; 3] = [0.1, 0.2, 0.3];

/// Two CV errors closer than this count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Dense row-major design matrix without an intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data has {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.as_ref().len() != cols {
                return Err(Error::invalid("ragged feature rows"));
            }
            data.extend_from_slice(row.as_ref());
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_features(features: &[IllusionFeatureVector]) -> Self {
        let mut data = Vec::with_capacity(features.len() * FEATURE_DIM);
        for f in features {
            data.extend_from_slice(&f.dense());
        }
        Self {
            rows: features.len(),
            cols: FEATURE_DIM,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

impl RidgeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.coefficients, x)
    }

    pub fn predict_features(&self, features: &IllusionFeatureVector) -> f64 {
        self.predict(&features.dense())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sufficient statistics of a row subset. Additive, so a fold's statistics
/// can be subtracted from the whole training split.
#[derive(Debug, Clone)]
struct Moments {
    d: usize,
    n: f64,
    sum_x: Vec<f64>,
    sum_y: f64,
    xtx: Vec<f64>,
    xty: Vec<f64>,
}

impl Moments {
    fn zeros(d: usize) -> Self {
        Self {
            d,
            n: 0.0,
            sum_x: vec![0.0; d],
            sum_y: 0.0,
            xtx: vec![0.0; d * d],
            xty: vec![0.0; d],
        }
    }

    fn of_rows(x: &FeatureMatrix, y: &[f64], rows: impl IntoIterator<Item = usize>) -> Self {
        let d = x.cols;
        let mut m = Self::zeros(d);
        let mut nz: Vec<(usize, f64)> = Vec::with_capacity(d);
        for i in rows {
            let row = x.row(i);
            nz.clear();
            nz.extend(row.iter().copied().enumerate().filter(|&(_, v)| v != 0.0));
            m.n += 1.0;
            m.sum_y += y[i];
            for &(j, v) in &nz {
                m.sum_x[j] += v;
                m.xty[j] += v * y[i];
                for &(k, w) in &nz {
                    m.xtx[j * d + k] += v * w;
                }
            }
        }
        m
    }

    fn minus(&self, other: &Moments) -> Moments {
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Moments {
            d: self.d,
            n: self.n - other.n,
            sum_x: sub(&self.sum_x, &other.sum_x),
            sum_y: self.sum_y - other.sum_y,
            xtx: sub(&self.xtx, &other.xtx),
            xty: sub(&self.xty, &other.xty),
        }
    }

    fn solve(&self, lambda: f64) -> Result<RidgeModel> {
        let d = self.d;
        if self.n < 1.0 {
            return Err(Error::invalid("ridge fit needs at least one row"));
        }
        let mean_x: Vec<f64> = self.sum_x.iter().map(|s| s / self.n).collect();
        let mean_y = self.sum_y / self.n;
        let mut a = vec![0.0; d * d];
        let mut rhs = vec![0.0; d];
        for j in 0..d {
            for k in 0..d {
                a[j * d + k] = self.xtx[j * d + k] - self.n * mean_x[j] * mean_x[k];
            }
            a[j * d + j] += lambda;
            rhs[j] = self.xty[j] - self.n * mean_x[j] * mean_y;
        }
        let coefficients = cholesky_solve(&mut a, rhs, d)?;
        let intercept = mean_y - dot(&mean_x, &coefficients);
        Ok(RidgeModel {
            coefficients,
            intercept,
            lambda,
        })
    }
}

/// Solves `A x = b` for symmetric positive definite `A` (overwritten).
fn cholesky_solve(a: &mut [f64], mut b: Vec<f64>, d: usize) -> Result<Vec<f64>> {
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= a[j * d + k] * a[j * d + k];
        }
        if !(diag > 0.0) {
            return Err(Error::invalid("normal equations are not positive definite"));
        }
        let diag = diag.sqrt();
        a[j * d + j] = diag;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = v / diag;
        }
    }
    for i in 0..d {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * d + k] * b[k];
        }
        b[i] = v / a[i * d + i];
    }
    for i in (0..d).rev() {
        let mut v = b[i];
        for k in i + 1..d {
            v -= a[k * d + i] * b[k];
        }
        b[i] = v / a[i * d + i];
    }
    Ok(b)
}

fn check_inputs(x: &FeatureMatrix, y: &[f64], lambda: f64) -> Result<()> {
    if x.rows == 0 {
        return Err(Error::invalid("ridge fit needs at least one row"));
    }
    if y.len() != x.rows {
        return Err(Error::invalid(format!(
            "{} targets for {} feature rows",
            y.len(),
            x.rows
        )));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    if x.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("features"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("targets"));
    }
    Ok(())
}

/// Minimizes `Σ (yᵢ − xᵢ·β − b)² + λ‖β‖²` with the intercept unpenalized.
pub fn fit_ridge(x: &FeatureMatrix, y: &[f64], lambda: f64) -> Result<RidgeModel> {
    check_inputs(x, y, lambda)?;
    Moments::of_rows(x, y, 0..x.rows).solve(lambda)
}

/// Fold id of every row: a seeded shuffle dealt round-robin into `folds`.
pub fn kfold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        fold_of[row] = pos % folds;
    }
    fold_of
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSelection {
    /// k-fold cross-validated mean squared error inside the training data.
    CrossValidation { folds: usize },
    /// Raw training-set mean squared error. Always favours the smallest λ;
    /// kept for fidelity experiments.
    TrainingError,
}

impl Default for LambdaSelection {
    fn default() -> Self {
        LambdaSelection::CrossValidation {
            folds: DEFAULT_FOLDS,
        }
    }
}

/// Cross-validated MSE for each grid value: the mean over folds of each
/// fold's held-out MSE. Rows are restricted to `rows`.
fn cv_errors(x: &FeatureMatrix, y: &[f64], rows: &[usize], grid: &[f64], folds: usize, seed: u64) -> Result<Vec<f64>> {
    let fold_of = kfold_assignment(rows.len(), folds, seed);
    let total = Moments::of_rows(x, y, rows.iter().copied());
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); folds];
    for (pos, &row) in rows.iter().enumerate() {
        members[fold_of[pos]].push(row);
    }
    let fold_moments: Vec<Moments> = members
        .iter()
        .map(|m| Moments::of_rows(x, y, m.iter().copied()))
        .collect();
    grid.iter()
        .map(|&lambda| {
            let mut sum = 0.0;
            for (held, moments) in members.iter().zip(&fold_moments) {
                let model = total.minus(moments).solve(lambda)?;
                let sse: f64 = held
                    .iter()
                    .map(|&i| (y[i] - model.predict(x.row(i))).powi(2))
                    .sum();
                sum += sse / held.len() as f64;
            }
            Ok(sum / folds as f64)
        })
        .collect()
}

fn training_errors(x: &FeatureMatrix, y: &[f64], rows: &[usize], grid: &[f64]) -> Result<Vec<f64>> {
    let moments = Moments::of_rows(x, y, rows.iter().copied());
    grid.iter()
        .map(|&lambda| {
            let model = moments.solve(lambda)?;
            let sse: f64 = rows
                .iter()
                .map(|&i| (y[i] - model.predict(x.row(i))).powi(2))
                .sum();
            Ok(sse / rows.len() as f64)
        })
        .collect()
}

/// Index of the smallest error; near-ties go to the larger λ.
fn pick_lambda(grid: &[f64], errors: &[f64]) -> f64 {
    let mut best = 0;
    for i in 1..grid.len() {
        let (e, b) = (errors[i], errors[best]);
        if e < b - TIE_TOLERANCE || ((e - b).abs() <= TIE_TOLERANCE && grid[i] > grid[best]) {
            best = i;
        }
    }
    grid[best]
}

fn select_lambda_rows(
    x: &FeatureMatrix,
    y: &[f64],
    rows: &[usize],
    grid: &[f64],
    selection: LambdaSelection,
    seed: u64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::invalid(format!("lambda grid value {bad} is not positive")));
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let errors = match selection {
        LambdaSelection::CrossValidation { folds } => {
            if folds < 2 {
                return Err(Error::invalid("cross-validation needs at least 2 folds"));
            }
            if rows.len() < folds {
                return Err(Error::invalid(format!(
                    "{} rows cannot fill {folds} folds",
                    rows.len()
                )));
            }
            cv_errors(x, y, rows, grid, folds, seed)?
        }
        LambdaSelection::TrainingError => training_errors(x, y, rows, grid)?,
    };
    Ok(pick_lambda(grid, &errors))
}

/// Picks the grid value with the lowest k-fold cross-validated MSE.
pub fn select_lambda(x: &FeatureMatrix, y: &[f64], grid: &[f64], folds: usize, seed: u64) -> Result<f64> {
    check_inputs(x, y, 1.0)?;
    let rows: Vec<usize> = (0..x.rows).collect();
    select_lambda_rows(x, y, &rows, grid, LambdaSelection::CrossValidation { folds }, seed)
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid("pearson inputs differ in length"));
    }
    if a.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two points"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("correlation input"));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Positive when the illusion hurts comprehension.
pub fn observed_illusionability(baseline_accuracy: f64, illusory_accuracy: f64) -> f64 {
    baseline_accuracy - illusory_accuracy
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledWord {
    pub word: String,
    pub features: IllusionFeatureVector,
    pub observed: f64,
}

/// One row of the labeled data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub word: String,
    pub baseline_accuracy: f64,
    pub illusory_accuracy: f64,
}

impl LabeledRecord {
    pub fn observed(&self) -> f64 {
        observed_illusionability(self.baseline_accuracy, self.illusory_accuracy)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("baseline_accuracy", self.baseline_accuracy),
            ("illusory_accuracy", self.illusory_accuracy),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "{name} for {:?} is {v}, outside [0, 1]",
                    self.word
                )));
            }
        }
        if self.word.trim().is_empty() {
            return Err(Error::invalid("labeled row with empty word"));
        }
        Ok(())
    }
}

/// Reads `word,baseline_accuracy,illusory_accuracy` CSV.
pub fn read_labeled_csv(reader: impl Read) -> Result<Vec<LabeledRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.deserialize() {
        let record: LabeledRecord = record?;
        record.validate()?;
        out.push(record);
    }
    if out.is_empty() {
        return Err(Error::NoValidEntries("labeled data".into()));
    }
    Ok(out)
}

pub fn load_labeled_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledRecord>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_labeled_csv(file)
}

pub fn write_labeled_csv(records: &[LabeledRecord]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in records {
        wtr.serialize(r)?;
    }
    Ok(String::from_utf8(wtr.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8"))
}

/// Phonemizes each record's word and attaches its features. Words the
/// lexicon lacks are returned separately, in input order.
pub fn label_records(records: &[LabeledRecord], lexicon: &PronunciationLexicon) -> (Vec<LabeledWord>, Vec<String>) {
    let mut words = Vec::with_capacity(records.len());
    let mut oov = Vec::new();
    for r in records {
        match phonemize(&r.word, lexicon) {
            Ok(pron) => words.push(LabeledWord {
                word: pron.word().to_string(),
                features: extract_features(&pron),
                observed: r.observed(),
            }),
            Err(_) => oov.push(r.word.clone()),
        }
    }
    (words, oov)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub train_fraction: f64,
    pub lambda_grid: Vec<f64>,
    pub master_seed: u64,
    pub selection: LambdaSelection,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            lambda_grid: DEFAULT_LAMBDA_GRID.to_vec(),
            master_seed: 0,
            selection: LambdaSelection::default(),
        }
    }
}

/// Training split size `⌈fraction·n⌉`, robust to `0.85·20 = 17.000…02`.
pub fn train_size(n: usize, fraction: f64) -> usize {
    let raw = fraction * n as f64;
    let rounded = raw.round();
    let size = if (raw - rounded).abs() < 1e-9 { rounded } else { raw.ceil() };
    (size as usize).min(n)
}

/// RNG for trial `t`: the master seed selects the key, the trial index the
/// stream, so trials are independent of scheduling.
pub fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub model: RidgeModel,
    /// Indices into the ensemble's word list.
    pub test_rows: Vec<usize>,
    pub train_corr: Option<f64>,
    pub test_corr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub trials: usize,
}

impl AveragedModel {
    pub fn predict(&self, features: &IllusionFeatureVector) -> f64 {
        self.intercept + dot(&self.coefficients, &features.dense())
    }

    fn accumulate<'a>(models: impl Iterator<Item = &'a RidgeModel>) -> Option<Self> {
        let mut coefficients = vec![0.0; FEATURE_DIM];
        let mut intercept = 0.0;
        let mut trials = 0;
        for m in models {
            for (c, v) in coefficients.iter_mut().zip(&m.coefficients) {
                *c += v;
            }
            intercept += m.intercept;
            trials += 1;
        }
        if trials == 0 {
            return None;
        }
        let k = trials as f64;
        coefficients.iter_mut().for_each(|c| *c /= k);
        Some(Self {
            coefficients,
            intercept: intercept / k,
            trials,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub mean: f64,
    pub std: f64,
    /// Trials whose correlation was defined.
    pub defined: usize,
}

impl CorrelationSummary {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let defined: Vec<f64> = values.flatten().collect();
        let n = defined.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
                defined: 0,
            };
        }
        let mean = defined.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (defined.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, defined: n }
    }

    /// `"91.1±0.6%"`.
    pub fn as_percent(&self) -> String {
        format!("{:.1}±{:.1}%", 100.0 * self.mean, 100.0 * self.std)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialEnsemble {
    pub config: TrialConfig,
    pub words: Vec<String>,
    pub features: Vec<IllusionFeatureVector>,
    pub observed: Vec<f64>,
    pub per_trial: Vec<TrialResult>,
    /// Per word, the average over trials that held it out.
    pub avg_by_word: Vec<Option<AveragedModel>>,
    pub avg_all: AveragedModel,
}

pub fn run_trials(data: &[LabeledWord], config: &TrialConfig, threads: Option<usize>) -> Result<TrialEnsemble> {
    let n = data.len();
    if n < 8 {
        return Err(Error::invalid(format!("need at least 8 labeled words, got {n}")));
    }
    if config.trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
        return Err(Error::invalid("train fraction must lie in (0, 1)"));
    }
    let n_train = train_size(n, config.train_fraction);
    if n_train == n || n_train == 0 {
        return Err(Error::invalid("train/test split leaves one side empty"));
    }
    let mut seen = std::collections::HashSet::new();
    for w in data {
        if !seen.insert(w.word.as_str()) {
            return Err(Error::invalid(format!("duplicate labeled word {:?}", w.word)));
        }
    }
    let features: Vec<IllusionFeatureVector> = data.iter().map(|w| w.features.clone()).collect();
    let x = FeatureMatrix::from_features(&features);
    let y: Vec<f64> = data.iter().map(|w| w.observed).collect();
    check_inputs(&x, &y, 1.0)?;

    let run = |t: usize| run_trial(&x, &y, n_train, config, t);
    let per_trial: Vec<TrialResult> = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| (0..config.trials).into_par_iter().map(run).collect::<Result<_>>())?,
        None => (0..config.trials).into_par_iter().map(run).collect::<Result<_>>()?,
    };

    let mut held_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, trial) in per_trial.iter().enumerate() {
        for &row in &trial.test_rows {
            held_out[row].push(t);
        }
    }
    let avg_by_word = held_out
        .iter()
        .map(|trials| AveragedModel::accumulate(trials.iter().map(|&t| &per_trial[t].model)))
        .collect();
    let avg_all = AveragedModel::accumulate(per_trial.iter().map(|t| &t.model)).expect("at least one trial");
    Ok(TrialEnsemble {
        config: config.clone(),
        words: data.iter().map(|w| w.word.clone()).collect(),
        features,
        observed: y,
        per_trial,
        avg_by_word,
        avg_all,
    })
}

fn run_trial(x: &FeatureMatrix, y: &[f64], n_train: usize, config: &TrialConfig, t: usize) -> Result<TrialResult> {
    let mut rng = trial_rng(config.master_seed, t);
    let mut order: Vec<usize> = (0..x.rows).collect();
    order.shuffle(&mut rng);
    let cv_seed: u64 = rng.gen();
    let (train, test) = order.split_at(n_train);
    let lambda = select_lambda_rows(x, y, train, &config.lambda_grid, config.selection, cv_seed)?;
    let model = Moments::of_rows(x, y, train.iter().copied()).solve(lambda)?;
    let corr = |rows: &[usize]| {
        let pred: Vec<f64> = rows.iter().map(|&i| model.predict(x.row(i))).collect();
        let obs: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
        pearson(&pred, &obs).ok()
    };
    let mut test_rows = test.to_vec();
    test_rows.sort_unstable();
    Ok(TrialResult {
        train_corr: corr(train),
        test_corr: corr(test),
        model,
        test_rows,
    })
}

impl TrialEnsemble {
    pub fn train_summary(&self) -> CorrelationSummary {
        CorrelationSummary::of(self.per_trial.iter().map(|t| t.train_corr))
    }

    pub fn test_summary(&self) -> CorrelationSummary {
        CorrelationSummary::of(self.per_trial.iter().map(|t| t.test_corr))
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    /// Words that were never held out; their out-of-fold prediction is
    /// undefined.
    pub fn never_held_out(&self) -> Vec<&str> {
        self.words
            .iter()
            .zip(&self.avg_by_word)
            .filter(|(_, a)| a.is_none())
            .map(|(w, _)| w.as_str())
            .collect()
    }

    /// Out-of-fold predictions for every training word that has one.
    pub fn oof_pairs(&self) -> Vec<(String, f64, f64)> {
        self.words
            .iter()
            .zip(&self.avg_by_word)
            .zip(self.features.iter().zip(&self.observed))
            .filter_map(|((w, avg), (f, &obs))| avg.as_ref().map(|a| (w.clone(), a.predict(f), obs)))
            .collect()
    }

    pub fn to_model_file(&self) -> ModelFile {
        let mut oof_predictions = BTreeMap::new();
        let mut oof_trials = BTreeMap::new();
        for (i, word) in self.words.iter().enumerate() {
            if let Some(avg) = &self.avg_by_word[i] {
                oof_predictions.insert(word.clone(), avg.predict(&self.features[i]));
                oof_trials.insert(word.clone(), avg.trials);
            }
        }
        let mut lambda_counts = BTreeMap::new();
        for trial in &self.per_trial {
            *lambda_counts.entry(trial.model.lambda.to_string()).or_insert(0usize) += 1;
        }
        let (train, test) = (self.train_summary(), self.test_summary());
        ModelFile {
            feature_names: feature_names(),
            avg_coefficients: self.avg_all.coefficients.clone(),
            avg_intercept: self.avg_all.intercept,
            lambda_grid: self.config.lambda_grid.clone(),
            lambda_selection: self.config.selection,
            lambda_counts,
            trials: self.config.trials,
            train_fraction: self.config.train_fraction,
            master_seed: self.config.master_seed,
            train_corr_mean: finite_or_none(train.mean),
            train_corr_std: finite_or_none(train.std),
            test_corr_mean: finite_or_none(test.mean),
            test_corr_std: finite_or_none(test.std),
            oof_predictions,
            oof_trials,
        }
    }
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn predict_oof(ensemble: &TrialEnsemble, word: &str, features: &IllusionFeatureVector) -> Result<f64> {
    match ensemble.word_index(word) {
        Some(i) => ensemble.avg_by_word[i]
            .as_ref()
            .map(|a| a.predict(features))
            .ok_or_else(|| Error::NeverOutOfFold(word.to_string())),
        None => Ok(ensemble.avg_all.predict(features)),
    }
}

/// Something that can score a word's illusionability.
pub trait WordPredictor {
    fn predict_word(&self, word: &str, features: &IllusionFeatureVector) -> Result<f64>;

    /// Prediction for a word with no illusionable phonemes.
    fn baseline(&self) -> f64;
}

impl WordPredictor for RidgeModel {
    fn predict_word(&self, _word: &str, features: &IllusionFeatureVector) -> Result<f64> {
        Ok(self.predict_features(features))
    }

    fn baseline(&self) -> f64 {
        self.intercept
    }
}

impl WordPredictor for TrialEnsemble {
    fn predict_word(&self, word: &str, features: &IllusionFeatureVector) -> Result<f64> {
        predict_oof(self, word, features)
    }

    fn baseline(&self) -> f64 {
        self.avg_all.intercept
    }
}

/// Persisted form of a trained ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub feature_names: Vec<String>,
    pub avg_coefficients: Vec<f64>,
    pub avg_intercept: f64,
    pub lambda_grid: Vec<f64>,
    pub lambda_selection: LambdaSelection,
    pub lambda_counts: BTreeMap<String, usize>,
    pub trials: usize,
    pub train_fraction: f64,
    pub master_seed: u64,
    pub train_corr_mean: Option<f64>,
    pub train_corr_std: Option<f64>,
    pub test_corr_mean: Option<f64>,
    pub test_corr_std: Option<f64>,
    pub oof_predictions: BTreeMap<String, f64>,
    pub oof_trials: BTreeMap<String, usize>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let model: ModelFile = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.feature_names.len() != FEATURE_DIM || self.avg_coefficients.len() != FEATURE_DIM {
            return Err(Error::invalid(format!(
                "model file must carry {FEATURE_DIM} features and coefficients"
            )));
        }
        if self.avg_coefficients.iter().any(|c| !c.is_finite()) || !self.avg_intercept.is_finite() {
            return Err(Error::NonFinite("model coefficients"));
        }
        Ok(())
    }

    /// Coefficients reordered to this build's feature index order.
    pub fn averaged_model(&self) -> Result<AveragedModel> {
        let mut coefficients = vec![0.0; FEATURE_DIM];
        for (name, &c) in self.feature_names.iter().zip(&self.avg_coefficients) {
            coefficients[crate::features::parse_feature_name(name)?] = c;
        }
        Ok(AveragedModel {
            coefficients,
            intercept: self.avg_intercept,
            trials: self.trials,
        })
    }
}

/// A loaded model file ready for prediction. Training words get their
/// stored out-of-fold prediction; others use the all-trial average.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPredictor {
    pub file: ModelFile,
    averaged: AveragedModel,
}

impl ModelPredictor {
    pub fn new(file: ModelFile) -> Result<Self> {
        let averaged = file.averaged_model()?;
        Ok(Self { file, averaged })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(ModelFile::load(path)?)
    }
}

impl WordPredictor for ModelPredictor {
    fn predict_word(&self, word: &str, features: &IllusionFeatureVector) -> Result<f64> {
        Ok(match self.file.oof_predictions.get(word) {
            Some(&p) => p,
            None => self.averaged.predict(features),
        })
    }

    fn baseline(&self) -> f64 {
        self.averaged.intercept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationBin {
    pub low: f64,
    pub high: f64,
    pub mean_observed: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationTable {
    pub edges: Vec<f64>,
    pub bins: Vec<CalibrationBin>,
}

/// Groups `(predicted, observed)` pairs into `(−∞,e₁), [e₁,e₂), …, [e_k,∞)`.
pub fn calibrate(pairs: &[(f64, f64)], edges: &[f64]) -> Result<CalibrationTable> {
    if pairs.is_empty() {
        return Err(Error::invalid("calibration needs at least one pair"));
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::invalid("calibration edges must be finite and strictly ascending"));
    }
    let mut sums = vec![0.0; edges.len() + 1];
    let mut counts = vec![0usize; edges.len() + 1];
    for &(pred, obs) in pairs {
        if !pred.is_finite() || !obs.is_finite() {
            return Err(Error::NonFinite("calibration pairs"));
        }
        let bin = edges.partition_point(|&e| e <= pred);
        sums[bin] += obs;
        counts[bin] += 1;
    }
    let bounds = std::iter::once(f64::NEG_INFINITY)
        .chain(edges.iter().copied())
        .chain(std::iter::once(f64::INFINITY))
        .collect::<Vec<_>>();
    let bins = (0..=edges.len())
        .map(|i| CalibrationBin {
            low: bounds[i],
            high: bounds[i + 1],
            mean_observed: (counts[i] > 0).then(|| sums[i] / counts[i] as f64),
            count: counts[i],
        })
        .collect();
    Ok(CalibrationTable {
        edges: edges.to_vec(),
        bins,
    })
}

impl CalibrationTable {
    /// `bin_low,bin_high,mean_observed,count`; an empty bin leaves
    /// `mean_observed` blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,mean_observed,count\n");
        for b in &self.bins {
            let mean = b.mean_observed.map(|m| m.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", b.low, b.high, mean, b.count));
        }
        out
    }

    /// Occupied bins have non-decreasing means.
    pub fn is_monotone(&self) -> bool {
        let means: Vec<f64> = self.bins.iter().filter_map(|b| b.mean_observed).collect();
        means.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Published calibration bin means for the default edges, kept as a
/// reference fixture; they come from human listeners and cannot be
/// regenerated here.
pub const REFERENCE_CALIBRATION_MEANS: [f64; 4] = [0.04, 0.14, 0.27, 0.50];
