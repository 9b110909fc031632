//! The `illusion` command line.
//!
//! Every subcommand parses its inputs, calls one library operation and
//! serializes the result. Exit status: 0 success, 1 usage error, 2 data
//! error.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use illusion_core::audio::{
    generate_sweep, rank_candidates, ranking_report_csv, read_wav, spectral_profile, stft, write_wav, AudioClip,
    SpectralProfile, StretchMode, SweepGrid, TransformParams,
};
use illusion_core::corpus::{prevalence, sample_words, FrequencyLexicon};
use illusion_core::data;
use illusion_core::features::extract_features;
use illusion_core::mcgurk::{
    enumerate_percepts, is_attemptable, lexical_confusions, plan_dubs, PlanMode, RuleTable,
};
use illusion_core::phoneme::{format_sequence, load_lexicon, phonemize, PronunciationLexicon};
use illusion_core::ridge::{
    calibrate, label_records, load_labeled_csv, run_trials, LambdaSelection, ModelPredictor, TrialConfig,
    WordPredictor, DEFAULT_CALIBRATION_EDGES, DEFAULT_FOLDS, DEFAULT_LAMBDA_GRID, DEFAULT_TRAIN_FRACTION,
    DEFAULT_TRIALS,
};
use illusion_core::sentence::{frequency_features, score_sentence_max, sentence_report_csv, OovPolicy};
use illusion_core::synthetic::{synthetic_records, SyntheticModel};
use illusion_core::ridge::write_labeled_csv;

pub use config::{CliConfig, ConfigFile, CONFIG_ENV};

const PERCEPT_LIMIT: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] illusion_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A comma-separated list given as one flag value.
#[derive(Debug, Clone, PartialEq)]
struct F64List(Vec<f64>);

fn parse_f64_list(s: &str) -> std::result::Result<F64List, String> {
    config::parse_list(s).map(F64List)
}

#[derive(Debug, Parser)]
#[command(name = "illusion", version, about = "Plan, score and synthesize speech illusions")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Config file of `key = value` lines (default: $ILLUSION_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CMU-style pronouncing dictionary (default: bundled)
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Rules file replacing the built-in table
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    /// Trained model file
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Word frequency list (default: bundled toy list)
    #[arg(long, global = true)]
    freq: Option<PathBuf>,
    /// Master seed for trials and sampling
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// STFT window size in samples
    #[arg(long, global = true)]
    window: Option<usize>,
    /// STFT hop in samples
    #[arg(long, global = true)]
    hop: Option<usize>,
    /// Band split / shelf corner in Hz
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Shelf gain in dB (<= 0)
    #[arg(long, global = true, allow_negative_numbers = true)]
    atten: Option<f64>,
    /// Comma-separated stretch factors
    #[arg(long, global = true, value_parser = parse_f64_list)]
    factors: Option<F64List>,
    /// Stretch mode: resample or phase-vocoder
    #[arg(long, global = true)]
    mode: Option<StretchMode>,
}

impl GlobalArgs {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            lexicon: self.lexicon.clone(),
            rules: self.rules.clone(),
            model: self.model.clone(),
            freq: self.freq.clone(),
            window: self.window,
            hop: self.hop,
            cutoff: self.cutoff,
            atten: self.atten,
            factors: self.factors.clone().map(|l| l.0),
            mode: self.mode,
            seed: self.seed,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the first pronunciation of each word
    Phonemize {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Plan McGurk dubs for a word
    Plan {
        word: String,
        /// One plan per dubbable phoneme instead of all at once
        #[arg(long)]
        single_site: bool,
        /// List real words among the possible percepts
        #[arg(long)]
        confusions: bool,
        #[arg(long, default_value_t = PERCEPT_LIMIT)]
        limit: usize,
    },
    /// Print the positional feature names set for each word
    Features {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Mark each word attemptable or not
    Attemptable {
        /// Word list, one per line (default: the bundled 200-word sample)
        #[arg(long)]
        words: Option<PathBuf>,
    },
    /// Run randomized ridge trials and write a model file
    Train {
        /// CSV `word,baseline_accuracy,illusory_accuracy`
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
        train_fraction: f64,
        #[arg(long, value_parser = parse_f64_list)]
        lambda_grid: Option<F64List>,
        #[arg(long, value_enum, default_value_t = Selection::Cv)]
        selection: Selection,
        #[arg(long, default_value_t = DEFAULT_FOLDS)]
        folds: usize,
    },
    /// Predict word illusionability with a model file
    Predict {
        words: Vec<String>,
        /// File of words, one per line
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Bin model predictions against observed labels
    Calibrate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = parse_f64_list, allow_negative_numbers = true)]
        edges: Option<F64List>,
    },
    /// Score sentences by their most illusionable word
    ScoreSentence {
        text: Option<String>,
        /// File of sentences, one per line
        #[arg(long, conflicts_with = "text")]
        file: Option<PathBuf>,
        /// Score the bundled evaluation sentences
        #[arg(long, conflicts_with_all = ["text", "file"])]
        bundled: bool,
        #[arg(long, value_enum, default_value_t = Oov::Skip)]
        oov: Oov,
        /// Report the log-frequency class features instead of scores
        #[arg(long)]
        freq_features: bool,
    },
    /// Export the active rule table
    Rules,
    /// Write synthetic labeled data for real words
    SynthLabels {
        /// Word list, one per line (default: the bundled 200-word sample)
        #[arg(long)]
        words: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        nonzero: usize,
        #[arg(long, default_value_t = 0.05)]
        sigma: f64,
    },
    /// Frequency-list sampling and prevalence
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Audio profiling, ranking and transforms
    #[command(subcommand)]
    Audio(AudioCommand),
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    /// Draw words in proportion to frequency
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        top_k: usize,
        /// Without replacement
        #[arg(long)]
        unique: bool,
    },
    /// Token share covered by the top-k words
    Prevalence {
        #[arg(long)]
        top_k: usize,
        /// Corpus token count when the list is truncated
        #[arg(long)]
        corpus_total: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum AudioCommand {
    /// Spectral balance profile of WAV files
    Profile {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Rank candidate clips by closeness to a reference clip
    Rank {
        #[arg(long)]
        reference: PathBuf,
        /// WAV files or directories of WAV files
        #[arg(required = true)]
        candidates: Vec<PathBuf>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Damp low frequencies then stretch one clip
    Transform {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 1.5)]
        factor: f64,
    },
    /// Render a grid of damping and stretch settings
    Sweep {
        input: PathBuf,
        #[arg(long, value_parser = parse_f64_list)]
        cutoffs: Option<F64List>,
        #[arg(long, value_parser = parse_f64_list, allow_negative_numbers = true)]
        attens: Option<F64List>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Selection {
    Cv,
    Train,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Oov {
    Skip,
    Fail,
}

/// Runs the command line with process stdio and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_config(global: &GlobalArgs) -> CliResult<CliConfig> {
    let path = global
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let file = match path {
        Some(p) => ConfigFile::load(&p)?,
        None => ConfigFile::default(),
    };
    Ok(CliConfig::resolve(&file, &global.overrides()))
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let cfg = resolve_config(&cli.global)?;
    let ctx = Context {
        cfg,
        out_path: cli.global.out.clone(),
    };
    let mut notes = String::new();
    let report = match ctx.cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| usage(format!("thread pool: {e}")))?
            .install(|| dispatch(&ctx, &cli.command, &mut notes)),
        None => dispatch(&ctx, &cli.command, &mut notes),
    };
    let _ = err.write_all(notes.as_bytes());
    ctx.emit(&report?, out)
}

struct Context {
    cfg: CliConfig,
    out_path: Option<PathBuf>,
}

impl Context {
    fn emit(&self, report: &str, out: &mut dyn Write) -> CliResult<()> {
        match &self.out_path {
            Some(path) => write_file(path, report.as_bytes()),
            None => out.write_all(report.as_bytes()).map_err(|e| io_error(Path::new("<stdout>"), e)),
        }
    }

    fn lexicon(&self) -> CliResult<LexiconRef> {
        Ok(match &self.cfg.lexicon_path {
            Some(p) => LexiconRef::Owned(Box::new(load_lexicon(p)?)),
            None => LexiconRef::Bundled(data::reference_lexicon()),
        })
    }

    fn rules(&self) -> CliResult<RuleTable> {
        Ok(match &self.cfg.rules_path {
            Some(p) => RuleTable::load(p)?,
            None => RuleTable::builtin(),
        })
    }

    fn model(&self) -> CliResult<ModelPredictor> {
        let path = self
            .cfg
            .model_path
            .as_ref()
            .ok_or_else(|| usage("this command needs --model (or `model` in the config file)"))?;
        Ok(ModelPredictor::load(path)?)
    }

    fn freq(&self) -> CliResult<FrequencyLexicon> {
        Ok(match &self.cfg.freq_path {
            Some(p) => FrequencyLexicon::load(p)?,
            None => data::toy_frequency_lexicon(),
        })
    }

    fn clip(&self, path: &Path) -> CliResult<AudioClip> {
        Ok(read_wav(path, true)?)
    }

    fn profile(&self, clip: &AudioClip) -> CliResult<SpectralProfile> {
        let spec = stft(clip, self.cfg.window, self.cfg.hop)?;
        Ok(spectral_profile(&spec, self.cfg.cutoff)?)
    }
}

enum LexiconRef {
    Bundled(&'static PronunciationLexicon),
    Owned(Box<PronunciationLexicon>),
}

impl std::ops::Deref for LexiconRef {
    type Target = PronunciationLexicon;

    fn deref(&self) -> &PronunciationLexicon {
        match self {
            LexiconRef::Bundled(l) => l,
            LexiconRef::Owned(l) => l,
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(illusion_core::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn read_lines(path: &Path) -> CliResult<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn word_list(path: Option<&PathBuf>) -> CliResult<Vec<String>> {
    match path {
        Some(p) => read_lines(p),
        None => Ok(data::evaluation_words().into_iter().map(|w| w.word).collect()),
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).map_err(illusion_core::Error::from)?;
    for row in rows {
        wtr.write_record(&row).map_err(illusion_core::Error::from)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| illusion_core::Error::from(csv::Error::from(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Returns the report; progress notes meant for standard error go to `notes`.
fn dispatch(ctx: &Context, command: &Command, notes: &mut String) -> CliResult<String> {
    match command {
        Command::Phonemize { words } => {
            let lex = ctx.lexicon()?;
            let mut s = String::new();
            for w in words {
                let p = phonemize(w, &lex)?;
                s.push_str(&format!("{}\t{}\n", p.word(), format_sequence(p.phonemes())));
            }
            Ok(s)
        }
        Command::Plan {
            word,
            single_site,
            confusions,
            limit,
        } => {
            let lex = ctx.lexicon()?;
            let table = ctx.rules()?;
            let pron = phonemize(word, &lex)?;
            let mode = if *single_site { PlanMode::SingleSite } else { PlanMode::AllSites };
            let plans = plan_dubs(&pron, mode, &table);
            let mut s = format!("{}\t{}\n", pron.word(), format_sequence(pron.phonemes()));
            if plans.is_empty() {
                s.push_str("not attemptable\n");
            }
            for (i, plan) in plans.iter().enumerate() {
                s.push_str(&format!("plan {}\n", i + 1));
                for site in &plan.sites {
                    s.push_str(&format!(
                        "  site {}: {} dubbed with {}, heard as {}\n",
                        site.index,
                        site.rule.audio,
                        site.rule.lip,
                        site.rule
                            .percepts
                            .iter()
                            .map(|p| format_sequence(p))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                }
                if *confusions {
                    let cands = enumerate_percepts(plan, *limit);
                    let found = lexical_confusions(&cands, &lex);
                    s.push_str("  confusions:");
                    if found.is_empty() {
                        s.push_str(" none");
                    }
                    s.push('\n');
                    for (w, c) in found {
                        s.push_str(&format!("    {w}\t{}\n", format_sequence(&c.phonemes)));
                    }
                }
            }
            Ok(s)
        }
        Command::Features { words } => {
            let lex = ctx.lexicon()?;
            let rows = words
                .iter()
                .map(|w| {
                    let f = extract_features(&phonemize(w, &lex)?);
                    Ok(vec![f.word.clone(), f.set_names().join(" ")])
                })
                .collect::<CliResult<Vec<_>>>()?;
            csv_string(&["word", "features"], rows)
        }
        Command::Attemptable { words } => {
            let lex = ctx.lexicon()?;
            let table = ctx.rules()?;
            let words = word_list(words.as_ref())?;
            let mut rows = Vec::with_capacity(words.len());
            let (mut yes, mut no, mut oov) = (0, 0, 0);
            for w in &words {
                let status = match phonemize(w, &lex) {
                    Ok(p) if is_attemptable(&p, &table) => {
                        yes += 1;
                        "true"
                    }
                    Ok(_) => {
                        no += 1;
                        "false"
                    }
                    Err(_) => {
                        oov += 1;
                        "oov"
                    }
                };
                rows.push(vec![w.to_lowercase(), status.to_string()]);
            }
            notes.push_str(&format!("attemptable {yes}, not attemptable {no}, out of vocabulary {oov}\n"));
            csv_string(&["word", "attempted"], rows)
        }
        Command::Train {
            data,
            trials,
            train_fraction,
            lambda_grid,
            selection,
            folds,
        } => {
            let lex = ctx.lexicon()?;
            let records = load_labeled_csv(data)?;
            let (words, oov) = label_records(&records, &lex);
            if !oov.is_empty() {
                log::warn!("skipping {} out-of-vocabulary word(s): {}", oov.len(), oov.join(" "));
            }
            let config = TrialConfig {
                trials: *trials,
                train_fraction: *train_fraction,
                lambda_grid: lambda_grid.clone().map(|l| l.0).unwrap_or_else(|| DEFAULT_LAMBDA_GRID.to_vec()),
                master_seed: ctx.cfg.seed,
                selection: match selection {
                    Selection::Cv => LambdaSelection::CrossValidation { folds: *folds },
                    Selection::Train => LambdaSelection::TrainingError,
                },
            };
            let ensemble = run_trials(&words, &config, ctx.cfg.threads)?;
            let never = ensemble.never_held_out();
            if !never.is_empty() {
                log::warn!("never held out (no out-of-fold prediction): {}", never.join(" "));
            }
            notes.push_str(&format!(
                "train correlation {}, test correlation {} over {} trials\n",
                ensemble.train_summary().as_percent(),
                ensemble.test_summary().as_percent(),
                config.trials
            ));
            Ok(ensemble.to_model_file().to_json()?)
        }
        Command::Predict { words, batch } => {
            let mut words = words.clone();
            if let Some(b) = batch {
                words.extend(read_lines(b)?);
            }
            if words.is_empty() {
                return Err(usage("give words or --batch FILE"));
            }
            let lex = ctx.lexicon()?;
            let model = ctx.model()?;
            let rows = words
                .iter()
                .map(|w| {
                    let pron = phonemize(w, &lex)?;
                    let p = model.predict_word(pron.word(), &extract_features(&pron))?;
                    Ok(vec![pron.word().to_string(), p.to_string()])
                })
                .collect::<CliResult<Vec<_>>>()?;
            csv_string(&["word", "prediction"], rows)
        }
        Command::Calibrate { data, edges } => {
            let lex = ctx.lexicon()?;
            let model = ctx.model()?;
            let records = load_labeled_csv(data)?;
            let (words, oov) = label_records(&records, &lex);
            if !oov.is_empty() {
                log::warn!("skipping {} out-of-vocabulary word(s)", oov.len());
            }
            let pairs = words
                .iter()
                .map(|w| Ok((model.predict_word(&w.word, &w.features)?, w.observed)))
                .collect::<CliResult<Vec<_>>>()?;
            let edges = edges.clone().map(|l| l.0).unwrap_or_else(|| DEFAULT_CALIBRATION_EDGES.to_vec());
            Ok(calibrate(&pairs, &edges)?.to_csv())
        }
        Command::ScoreSentence {
            text,
            file,
            bundled,
            oov,
            freq_features,
        } => {
            let sentences: Vec<String> = match (text, file, bundled) {
                (Some(t), _, _) => vec![t.clone()],
                (_, Some(f), _) => read_lines(f)?,
                (_, _, true) => data::sentences().into_iter().map(|s| s.sentence).collect(),
                _ => return Err(usage("give a sentence, --file FILE or --bundled")),
            };
            let lex = ctx.lexicon()?;
            if *freq_features {
                let freq = ctx.freq()?;
                let table = ctx.rules()?;
                let rows = sentences.iter().map(|s| {
                    let f = frequency_features(s, &lex, &freq, &table);
                    vec![
                        s.clone(),
                        f.not_attempted.to_string(),
                        f.attempted.to_string(),
                        f.percepts.to_string(),
                    ]
                });
                return csv_string(&["sentence", "not_attempted", "attempted", "percepts"], rows);
            }
            let model = ctx.model()?;
            let policy = match oov {
                Oov::Skip => OovPolicy::Skip,
                Oov::Fail => OovPolicy::Fail,
            };
            let preds = sentences
                .iter()
                .map(|s| score_sentence_max(s, &model, &lex, policy))
                .collect::<illusion_core::Result<Vec<_>>>()?;
            Ok(sentence_report_csv(&preds)?)
        }
        Command::Rules => Ok(ctx.rules()?.to_text()),
        Command::SynthLabels { words, nonzero, sigma } => {
            if !(*sigma >= 0.0) {
                return Err(usage("--sigma must be non-negative"));
            }
            let lex = ctx.lexicon()?;
            let words = word_list(words.as_ref())?;
            let model = SyntheticModel::random(*nonzero, *sigma, ctx.cfg.seed);
            let (records, oov) = synthetic_records(&words, &lex, &model, ctx.cfg.seed.wrapping_add(1));
            if !oov.is_empty() {
                log::warn!("skipping {} out-of-vocabulary word(s)", oov.len());
            }
            Ok(write_labeled_csv(&records)?)
        }
        Command::Corpus(CorpusCommand::Sample { n, top_k, unique }) => {
            let freq = ctx.freq()?;
            let words = sample_words(&freq, *n, *top_k, *unique, ctx.cfg.seed)?;
            Ok(words.into_iter().map(|w| w + "\n").collect())
        }
        Command::Corpus(CorpusCommand::Prevalence { top_k, corpus_total }) => {
            let freq = ctx.freq()?;
            Ok(format!("{}\n", prevalence(&freq, *top_k, *corpus_total)?))
        }
        Command::Audio(cmd) => audio(ctx, cmd),
    }
}

fn expand_wavs(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| io_error(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn audio(ctx: &Context, cmd: &AudioCommand) -> CliResult<String> {
    use rayon::prelude::*;
    match cmd {
        AudioCommand::Profile { inputs } => {
            let files = expand_wavs(inputs)?;
            let profiles = files
                .par_iter()
                .map(|f| ctx.profile(&ctx.clip(f)?))
                .collect::<CliResult<Vec<_>>>()?;
            let rows = files.iter().zip(profiles).map(|(f, p)| {
                vec![
                    stem(f),
                    p.ratio_mean.to_string(),
                    p.ratio_std.to_string(),
                    p.centroid.to_string(),
                ]
            });
            csv_string(&["name", "ratio_mean", "ratio_std", "centroid_hz"], rows)
        }
        AudioCommand::Rank {
            reference,
            candidates,
            top,
        } => {
            let reference = ctx.profile(&ctx.clip(reference)?)?;
            let files = expand_wavs(candidates)?;
            let profiles = files
                .par_iter()
                .map(|f| Ok((stem(f), ctx.profile(&ctx.clip(f)?)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let ranked = rank_candidates(&reference, &profiles, *top)?;
            Ok(ranking_report_csv(&ranked)?)
        }
        AudioCommand::Transform { input, output, factor } => {
            let clip = ctx.clip(input)?;
            let params = TransformParams {
                damp_cutoff: ctx.cfg.cutoff,
                damp_atten_db: ctx.cfg.atten,
                stretch_factor: *factor,
                stretch_mode: ctx.cfg.mode,
            };
            let result = params.apply(&clip)?;
            write_wav(output, &result)?;
            Ok(format!(
                "{}\t{} samples\t{:.3} s\n",
                output.display(),
                result.len(),
                result.duration_secs()
            ))
        }
        AudioCommand::Sweep {
            input,
            cutoffs,
            attens,
            out_dir,
        } => {
            let clip = ctx.clip(input)?;
            let grid = SweepGrid {
                cutoffs: cutoffs.clone().map(|l| l.0).unwrap_or_else(|| vec![ctx.cfg.cutoff]),
                attens: attens.clone().map(|l| l.0).unwrap_or_else(|| vec![ctx.cfg.atten]),
                factors: ctx.cfg.factors.clone(),
                mode: ctx.cfg.mode,
            };
            generate_sweep(&clip, &stem(input), &grid, out_dir)?;
            let manifest = out_dir.join("manifest.csv");
            fs::read_to_string(&manifest).map_err(|e| io_error(&manifest, e))
        }
    }
}
