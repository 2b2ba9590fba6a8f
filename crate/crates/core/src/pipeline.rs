//! Batch orchestration over a corpus directory.
//!
//! Each document runs `ingest → clean → segment → resolve → emit`. Every
//! stage is keyed by a content hash of its configuration slice and of the
//! previous stage's output, and its record and output are kept under
//! `<output>/.cache/<source file>/`. A stage reruns only when its key changed
//! or its stored output is gone, so an unchanged corpus reruns nothing.
//!
//! Sources are `*.html`, `*.htm` and `*.txt` files. A document's metadata
//! comes from its file stem (`r3-L1-S1-N23-1976-06-03.txt`) unless
//! `manifest.json` in the input directory says otherwise:
//!
//! ```json
//! { "diario-23.html": { "document_id": "r3-L1-S1-N23-1976-06-03", "encoding": "latin1" } }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{digest_json, Config, ConfigError, SdConvention};
use crate::emitter::{emit_debate_xml, parse_debate_xml, XmlProfile};
use crate::grammar::Grammar;
use crate::ingest::{clean_headers, ingest, Encoding, PagedText, RawDocument, SourceKind};
use crate::model::{validate_debate, AnnotatedDebate, DebateMeta};
use crate::registry::{Registry, RegistryError};
use crate::resolver::{resolve_debate, ResolutionReport, ResolverSettings};
use crate::segmenter::{segment, Segmented, Warning};
use crate::stats::{CorpusStats, StatsAccumulator};

pub const CACHE_DIR: &str = ".cache";
pub const SOURCE_MANIFEST: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("registry {path}: {source}")]
    Registry { path: String, source: RegistryError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Manifest { path: String, message: String },
    #[error("no source documents in {0}")]
    NoDocuments(String),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl PipelineError {
    /// Process exit status for a failure that stops the whole run.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Clean,
    Segment,
    Resolve,
    Emit,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Clean, Stage::Segment, Stage::Resolve, Stage::Emit];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Clean => "clean",
            Stage::Segment => "segment",
            Stage::Resolve => "resolve",
            Stage::Emit => "emit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub document: String,
    pub stage: Stage,
    pub input_hash: String,
    pub output_hash: String,
    pub status: String,
    pub warnings: Vec<Warning>,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocFailure {
    pub file: String,
    pub document: Option<String>,
    pub stage: Option<Stage>,
    pub rule: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct AnnotateOptions {
    pub input: PathBuf,
    pub registries: Vec<PathBuf>,
    pub output: PathBuf,
    pub config: Config,
    pub strict: bool,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub source: String,
    pub document: String,
    pub output: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub config_digest: String,
    pub registry_digest: String,
    pub strict: bool,
    pub documents: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub documents: usize,
    pub succeeded: usize,
    pub failures: Vec<DocFailure>,
    pub stages_executed: usize,
    pub stages_cached: usize,
    pub warnings: usize,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceEntry {
    document_id: Option<String>,
    encoding: Option<Encoding>,
}

#[derive(Debug, Clone)]
struct Source {
    path: PathBuf,
    file: String,
    stem: String,
    kind: SourceKind,
    entry: SourceEntry,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn discover(input: &Path) -> Result<Vec<Source>, PipelineError> {
    let manifest_path = input.join(SOURCE_MANIFEST);
    let mut manifest: BTreeMap<String, SourceEntry> = if manifest_path.exists() {
        let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Manifest {
            path: manifest_path.display().to_string(),
            message: e.to_string(),
        })?
    } else {
        BTreeMap::new()
    };
    let mut out = Vec::new();
    for entry in fs::read_dir(input).map_err(io_err(input))? {
        let path = entry.map_err(io_err(input))?.path();
        if !path.is_file() {
            continue;
        }
        let Some(kind) = SourceKind::from_path(&path) else {
            continue;
        };
        let file = path.file_name().and_then(|f| f.to_str()).unwrap_or_default().to_string();
        let stem = path.file_stem().and_then(|f| f.to_str()).unwrap_or_default().to_string();
        out.push(Source {
            entry: manifest.remove(&file).unwrap_or_default(),
            path,
            file,
            stem,
            kind,
        });
    }
    if let Some(name) = manifest.keys().next() {
        return Err(PipelineError::Manifest {
            path: manifest_path.display().to_string(),
            message: format!("entry '{name}' names no source document"),
        });
    }
    out.sort_by(|a, b| a.file.cmp(&b.file));
    Ok(out)
}

/// Loads and merges registry files in the given order; `.xml` files use the
/// XML schema, anything else CSV.
pub fn load_registries(paths: &[PathBuf]) -> Result<Registry, PipelineError> {
    let mut reg = Registry::new();
    for path in paths {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let is_xml = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("xml"));
        let res = if is_xml { reg.load_xml(&text) } else { reg.load_csv(&text) };
        res.map_err(|source| PipelineError::Registry {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(reg)
}

struct Ctx<'a> {
    grammar: Grammar,
    settings: ResolverSettings,
    registry: &'a Registry,
    profile: XmlProfile,
    output: &'a Path,
    keys: BTreeMap<Stage, String>,
}

/// A stage output that is either in memory or stored in the cache.
enum Lazy<T> {
    Ready(T),
    Stored(PathBuf, String),
}

/// The stored output of a cached stage no longer matches its record.
struct Stale;

enum StepError {
    Failed(DocFailure),
    Stale,
}

impl From<Stale> for StepError {
    fn from(_: Stale) -> Self {
        StepError::Stale
    }
}

impl<T: DeserializeOwned> Lazy<T> {
    fn take(self) -> Result<T, Stale> {
        match self {
            Lazy::Ready(v) => Ok(v),
            Lazy::Stored(path, hash) => {
                let bytes = fs::read(&path).map_err(|_| Stale)?;
                if sha256_hex(&bytes) != hash {
                    return Err(Stale);
                }
                serde_json::from_slice(&bytes).map_err(|_| Stale)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Resolved {
    debate: AnnotatedDebate,
    report: ResolutionReport,
}

struct DocRun<'c, 'a> {
    ctx: &'c Ctx<'a>,
    src: &'c Source,
    dir: PathBuf,
    document: String,
    use_cache: bool,
    executed: usize,
    cached: usize,
    warnings: Vec<Warning>,
}

struct DocDone {
    entry: ManifestEntry,
    report: ResolutionReport,
}

impl DocRun<'_, '_> {
    fn fail(&self, stage: Option<Stage>, rule: &str, message: impl Into<String>) -> StepError {
        StepError::Failed(DocFailure {
            file: self.src.file.clone(),
            document: Some(self.document.clone()),
            stage,
            rule: rule.to_string(),
            message: message.into(),
        })
    }

    fn record_path(&self, stage: Stage) -> PathBuf {
        self.dir.join(format!("{}.record.json", stage.as_str()))
    }

    fn payload_path(&self, stage: Stage) -> PathBuf {
        self.dir.join(format!("{}.json", stage.as_str()))
    }

    fn input_hash(&self, stage: Stage, prev: &str) -> String {
        let mut h = Sha256::new();
        for part in [env!("CARGO_PKG_VERSION"), stage.as_str(), &self.ctx.keys[&stage], prev] {
            h.update(part.as_bytes());
            h.update([0]);
        }
        hex::encode(h.finalize())
    }

    fn lookup(&self, stage: Stage, input_hash: &str, output: &Path) -> Option<StageRecord> {
        if !self.use_cache || !output.is_file() {
            return None;
        }
        let rec: StageRecord = serde_json::from_slice(&fs::read(self.record_path(stage)).ok()?).ok()?;
        (rec.input_hash == input_hash).then_some(rec)
    }

    fn store(&mut self, rec: StageRecord) -> Result<(), StepError> {
        let bytes = serde_json::to_vec_pretty(&rec).expect("records serialize");
        write_atomic(&self.record_path(rec.stage), &bytes)
            .map_err(|e| self.fail(Some(rec.stage), "io", e.to_string()))?;
        self.warnings.extend(rec.warnings);
        self.executed += 1;
        Ok(())
    }

    /// Runs or reuses one JSON-payload stage. Returns its output and hash.
    fn step<I: DeserializeOwned, O: Serialize>(
        &mut self,
        stage: Stage,
        prev_hash: &str,
        input: Lazy<I>,
        run: impl FnOnce(&Self, I) -> Result<(O, Vec<Warning>), StepError>,
    ) -> Result<(Lazy<O>, String), StepError> {
        let input_hash = self.input_hash(stage, prev_hash);
        let payload = self.payload_path(stage);
        if let Some(rec) = self.lookup(stage, &input_hash, &payload) {
            self.cached += 1;
            self.warnings.extend(rec.warnings);
            return Ok((Lazy::Stored(payload, rec.output_hash.clone()), rec.output_hash));
        }
        let started = Instant::now();
        let value = input.take()?;
        let (out, warnings) = run(self, value)?;
        let bytes = serde_json::to_vec(&out).expect("stage outputs serialize");
        let output_hash = sha256_hex(&bytes);
        write_atomic(&payload, &bytes).map_err(|e| self.fail(Some(stage), "io", e.to_string()))?;
        self.store(StageRecord {
            document: self.document.clone(),
            stage,
            input_hash,
            output_hash: output_hash.clone(),
            status: "ok".into(),
            warnings,
            duration_ms: started.elapsed().as_millis() as u64,
        })?;
        Ok((Lazy::Ready(out), output_hash))
    }

    fn run(&mut self, meta: DebateMeta, bytes: Vec<u8>) -> Result<DocDone, StepError> {
        let encoding = self.src.entry.encoding.unwrap_or_default();
        let source_hash = sha256_hex(
            &serde_json::to_vec(&(sha256_hex(&bytes), &meta, encoding, self.src.kind)).expect("serializes"),
        );
        let raw = RawDocument {
            meta,
            body: bytes,
            encoding,
            kind: self.src.kind,
        };

        let (paged, h) = self.step(Stage::Ingest, &source_hash, Lazy::Ready(raw), |me, raw: RawDocument| {
            ingest(&raw)
                .map(|p| (p, Vec::new()))
                .map_err(|e| me.fail(Some(Stage::Ingest), e.rule(), e.to_string()))
        })?;
        let (clean, h) = self.step(Stage::Clean, &h, paged, |me, p: PagedText| {
            Ok((clean_headers(&p, &me.ctx.grammar), Vec::new()))
        })?;
        let (segmented, h) = self.step(Stage::Segment, &h, clean, |me, p: PagedText| {
            segment(&p, &me.ctx.grammar)
                .map(|s| {
                    let w = s.warnings.clone();
                    (s, w)
                })
                .map_err(|e| me.fail(Some(Stage::Segment), e.rule(), e.to_string()))
        })?;
        let (resolved, h) = self.step(Stage::Resolve, &h, segmented, |me, s: Segmented| {
            let (utterances, report) =
                resolve_debate(&s.utterances, me.ctx.registry, &s.meta, &me.ctx.settings);
            let debate = AnnotatedDebate::from_utterances(s.meta, utterances);
            Ok((Resolved { debate, report }, Vec::new()))
        })?;

        // emit writes the corpus file itself rather than a cache payload
        let out_name = format!("{}.xml", self.src.stem);
        let out_path = self.ctx.output.join(&out_name);
        let input_hash = self.input_hash(Stage::Emit, &h);
        let cached = self
            .lookup(Stage::Emit, &input_hash, &out_path)
            .filter(|rec| fs::read(&out_path).is_ok_and(|b| sha256_hex(&b) == rec.output_hash));
        let (sha, report) = match cached {
            Some(rec) => {
                self.cached += 1;
                self.warnings.extend(rec.warnings);
                let report = match resolved {
                    Lazy::Ready(r) => r.report,
                    stored => stored.take()?.report,
                };
                (rec.output_hash, report)
            }
            None => {
                let started = Instant::now();
                let Resolved { debate, report } = resolved.take()?;
                let xml = emit_debate_xml(&debate, &self.ctx.profile)
                    .map_err(|e| self.fail(Some(Stage::Emit), "invalid-debate", e.to_string()))?;
                let sha = sha256_hex(xml.as_bytes());
                write_atomic(&out_path, xml.as_bytes())
                    .map_err(|e| self.fail(Some(Stage::Emit), "io", e.to_string()))?;
                self.store(StageRecord {
                    document: self.document.clone(),
                    stage: Stage::Emit,
                    input_hash,
                    output_hash: sha.clone(),
                    status: "ok".into(),
                    warnings: Vec::new(),
                    duration_ms: started.elapsed().as_millis() as u64,
                })?;
                (sha, report)
            }
        };
        Ok(DocDone {
            entry: ManifestEntry {
                source: self.src.file.clone(),
                document: self.document.clone(),
                output: out_name,
                sha256: sha,
            },
            report,
        })
    }
}

struct DocResult {
    done: Result<DocDone, DocFailure>,
    executed: usize,
    cached: usize,
    warnings: Vec<Warning>,
}

fn process(ctx: &Ctx, src: &Source, duplicate: bool) -> DocResult {
    let failed = |document: Option<String>, rule: &str, message: String| DocResult {
        done: Err(DocFailure {
            file: src.file.clone(),
            document,
            stage: None,
            rule: rule.to_string(),
            message,
        }),
        executed: 0,
        cached: 0,
        warnings: Vec::new(),
    };
    if duplicate {
        return failed(None, "duplicate-output", format!("another source also maps to {}.xml", src.stem));
    }
    let id = src.entry.document_id.clone().unwrap_or_else(|| src.stem.clone());
    let meta = match DebateMeta::from_document_id(&id) {
        Ok(m) => m,
        Err(e) => return failed(None, "no-metadata", format!("'{id}': {e}")),
    };
    let bytes = match fs::read(&src.path) {
        Ok(b) => b,
        Err(e) => return failed(Some(id), "io", e.to_string()),
    };
    let dir = ctx.output.join(CACHE_DIR).join(&src.file);
    if let Err(e) = fs::create_dir_all(&dir) {
        return failed(Some(id), "io", e.to_string());
    }
    let mut use_cache = true;
    loop {
        let mut run = DocRun {
            ctx,
            src,
            dir: dir.clone(),
            document: meta.document_id(),
            use_cache,
            executed: 0,
            cached: 0,
            warnings: Vec::new(),
        };
        let done = match run.run(meta.clone(), bytes.clone()) {
            Ok(d) => Ok(d),
            Err(StepError::Failed(f)) => Err(f),
            Err(StepError::Stale) if use_cache => {
                tracing::warn!(file = %src.file, "stale cache entry, rerunning every stage");
                use_cache = false;
                continue;
            }
            Err(StepError::Stale) => unreachable!("stored outputs are only read from the cache"),
        };
        return DocResult {
            done,
            executed: run.executed,
            cached: run.cached,
            warnings: run.warnings,
        };
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, PipelineError> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?)
}

/// Annotates every source document of `opts.input` into `opts.output`.
///
/// Configuration and registry problems abort the run before any document
/// is touched. Per-document problems are collected in the summary and never
/// stop other documents.
pub fn annotate(opts: &AnnotateOptions) -> Result<RunSummary, PipelineError> {
    opts.config.check()?;
    let registry = load_registries(&opts.registries)?;
    let sources = discover(&opts.input)?;
    if sources.is_empty() {
        return Err(PipelineError::NoDocuments(opts.input.display().to_string()));
    }
    fs::create_dir_all(opts.output.join(CACHE_DIR)).map_err(io_err(&opts.output))?;

    let registry_digest = digest_json(&registry.records().collect::<Vec<_>>());
    let cfg = &opts.config;
    let profile = XmlProfile::from_config(&cfg.emitter, opts.strict);
    let keys = BTreeMap::from([
        (Stage::Ingest, String::new()),
        (Stage::Clean, digest_json(&cfg.headers)),
        (Stage::Segment, digest_json(&cfg.segmenter)),
        (Stage::Resolve, digest_json(&(&cfg.resolver, &registry_digest))),
        (Stage::Emit, digest_json(&(&cfg.emitter, opts.strict))),
    ]);
    let ctx = Ctx {
        grammar: Grammar::new(cfg)?,
        settings: ResolverSettings::new(&cfg.resolver),
        registry: &registry,
        profile,
        output: &opts.output,
        keys,
    };

    let mut stems = BTreeSet::new();
    let duplicate: Vec<bool> = sources.iter().map(|s| !stems.insert(s.stem.clone())).collect();
    let results: Vec<DocResult> = pool(opts.jobs)?.install(|| {
        sources
            .par_iter()
            .zip(duplicate.par_iter())
            .map(|(src, dup)| {
                let r = process(&ctx, src, *dup);
                match &r.done {
                    Ok(d) => tracing::info!(
                        document = %d.entry.document,
                        executed = r.executed,
                        cached = r.cached,
                        warnings = r.warnings.len(),
                        "annotated"
                    ),
                    Err(f) => tracing::warn!(file = %f.file, rule = %f.rule, "{}", f.message),
                }
                r
            })
            .collect()
    });

    let mut summary = RunSummary {
        documents: sources.len(),
        ..RunSummary::default()
    };
    let mut entries = Vec::new();
    let mut reports = Vec::new();
    for r in results {
        summary.stages_executed += r.executed;
        summary.stages_cached += r.cached;
        summary.warnings += r.warnings.len();
        match r.done {
            Ok(d) => {
                summary.succeeded += 1;
                entries.push(d.entry);
                reports.push(d.report);
            }
            Err(f) => summary.failures.push(f),
        }
    }
    write_reports(opts, &registry_digest, entries, &reports, &summary.failures)?;
    Ok(summary)
}

fn write_reports(
    opts: &AnnotateOptions,
    registry_digest: &str,
    documents: Vec<ManifestEntry>,
    reports: &[ResolutionReport],
    failures: &[DocFailure],
) -> Result<(), PipelineError> {
    let out = &opts.output;
    let write = |name: &str, bytes: &[u8]| {
        let path = out.join(name);
        write_atomic(&path, bytes).map_err(io_err(&path))
    };
    let jsonl = |items: &mut dyn Iterator<Item = String>| items.map(|l| l + "\n").collect::<String>();
    write(
        "resolution.jsonl",
        jsonl(&mut reports.iter().map(|r| serde_json::to_string(r).expect("serializes"))).as_bytes(),
    )?;
    write(
        "failures.jsonl",
        jsonl(&mut failures.iter().map(|f| serde_json::to_string(f).expect("serializes"))).as_bytes(),
    )?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut row = |r: [String; 6]| csv.write_record(&r).expect("in-memory csv");
    row(["document", "resolved", "president", "unresolved", "ambiguous", "total"].map(String::from));
    let mut totals = [0usize; 5];
    for r in reports {
        let counts = [r.resolved, r.president, r.unresolved, r.ambiguous, r.total()];
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
        row([
            r.document.clone(),
            counts[0].to_string(),
            counts[1].to_string(),
            counts[2].to_string(),
            counts[3].to_string(),
            counts[4].to_string(),
        ]);
    }
    row([
        "all".to_string(),
        totals[0].to_string(),
        totals[1].to_string(),
        totals[2].to_string(),
        totals[3].to_string(),
        totals[4].to_string(),
    ]);
    write("resolution-summary.csv", &csv.into_inner().expect("in-memory csv"))?;

    let manifest = CorpusManifest {
        config_digest: opts.config.digest(),
        registry_digest: registry_digest.to_string(),
        strict: opts.strict,
        documents,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serializes");
    bytes.push(b'\n');
    write("manifest.json", &bytes)
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn file_name(p: &Path) -> String {
    p.file_name().and_then(|f| f.to_str()).unwrap_or_default().to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRun {
    pub stats: CorpusStats,
    pub files: usize,
    pub skipped: Vec<Skipped>,
    pub duplicates: Vec<String>,
    pub warnings: Vec<String>,
    pub strict: bool,
}

impl StatsRun {
    pub fn exit_code(&self) -> i32 {
        if self.strict && !self.skipped.is_empty() {
            1
        } else {
            0
        }
    }
}

/// Computes corpus statistics over the emitted XML in `corpus` and writes
/// `stats.csv` and `stats.json` into `out_dir`. Unreadable files are
/// skipped and listed; repeated debates are counted once.
pub fn stats_command(
    corpus: &Path,
    out_dir: &Path,
    strict: bool,
    sd: SdConvention,
    jobs: usize,
) -> Result<StatsRun, PipelineError> {
    let files = corpus_files(corpus)?;
    type Parsed = Result<(AnnotatedDebate, Vec<String>), String>;
    let parsed: Vec<(String, Parsed)> = pool(jobs)?.install(|| {
        files
            .par_iter()
            .map(|p| {
                let res = fs::read(p)
                    .map_err(|e| e.to_string())
                    .and_then(|b| parse_debate_xml(&b, strict).map_err(|e| e.to_string()));
                (file_name(p), res)
            })
            .collect()
    });
    let mut skipped = Vec::new();
    let mut duplicates = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = BTreeSet::new();
    let mut debates = Vec::new();
    for (file, res) in parsed {
        match res {
            Ok((d, w)) => {
                warnings.extend(w.into_iter().map(|w| format!("{file}: {w}")));
                if seen.insert((d.meta.legislature, d.meta.session, d.meta.number)) {
                    debates.push(d);
                } else {
                    duplicates.push(file);
                }
            }
            Err(reason) => skipped.push(Skipped { file, reason }),
        }
    }
    if files.is_empty() {
        warnings.push(format!("no XML files in {}", corpus.display()));
    }
    let acc = pool(jobs)?.install(|| {
        debates
            .par_chunks(64)
            .map(|chunk| {
                let mut acc = StatsAccumulator::new();
                chunk.iter().for_each(|d| {
                    acc.add(d);
                });
                acc
            })
            .reduce(StatsAccumulator::new, |a, b| a.merge(b).expect("duplicates were removed"))
    });
    let stats = acc.finalize(sd);
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let csv_path = out_dir.join("stats.csv");
    write_atomic(&csv_path, stats.to_csv().as_bytes()).map_err(io_err(&csv_path))?;
    let json_path = out_dir.join("stats.json");
    write_atomic(&json_path, stats.to_json().as_bytes()).map_err(io_err(&json_path))?;
    Ok(StatsRun {
        stats,
        files: files.len(),
        skipped,
        duplicates,
        warnings,
        strict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub file: String,
    pub path: String,
    pub rule: String,
    pub message: String,
}

/// Parses and validates every XML file of `corpus`.
pub fn validate_command(corpus: &Path, strict: bool, jobs: usize) -> Result<Vec<Finding>, PipelineError> {
    let files = corpus_files(corpus)?;
    let per_file: Vec<Vec<Finding>> = pool(jobs)?.install(|| {
        files
            .par_iter()
            .map(|p| {
                let file = file_name(p);
                let finding = |path: String, rule: &str, message: String| Finding {
                    file: file.clone(),
                    path,
                    rule: rule.to_string(),
                    message,
                };
                let bytes = match fs::read(p) {
                    Ok(b) => b,
                    Err(e) => return vec![finding("/".into(), "io", e.to_string())],
                };
                match parse_debate_xml(&bytes, strict) {
                    Err(e) => vec![finding(e.path.clone(), "schema", format!("line {}: {}", e.line, e.message))],
                    Ok((d, _)) => validate_debate(&d)
                        .into_iter()
                        .map(|v| finding(v.path, &v.rule, v.message))
                        .collect(),
                }
            })
            .collect()
    });
    Ok(per_file.into_iter().flatten().collect())
}
