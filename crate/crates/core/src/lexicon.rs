//! Ingestion of free-association responses and word norms.
//!
//! Responses are read from a tab-separated file with one row per participant
//! instance (`cue`, `R1`, `R2`, `R3`). Norms are read from one or more CSV
//! files keyed by `word`; the lexicon is the inner join of all of them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::feature::{FeatureName, N_FEATURES};

/// Lowercase + trim. Empty tokens and the `NA` marker map to `None`.
pub fn normalize_token(raw: &str) -> Option<String> {
    let t = raw.trim();
    if t.is_empty() || t == "NA" {
        return None;
    }
    Some(t.to_lowercase())
}

/// One free-association instance. Response slots keep their position so that
/// first-response constructions stay faithful after filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseRow {
    pub cue: String,
    pub responses: [Option<String>; 3],
}

impl ResponseRow {
    /// Builds a row from raw tokens, normalizing each one.
    pub fn new(cue: &str, responses: &[&str]) -> Option<Self> {
        let cue = normalize_token(cue)?;
        let mut slots: [Option<String>; 3] = Default::default();
        for (slot, raw) in slots.iter_mut().zip(responses) {
            *slot = normalize_token(raw);
        }
        let row = ResponseRow {
            cue,
            responses: slots,
        };
        (row.present().count() > 0).then_some(row)
    }

    /// Present responses in order.
    pub fn present(&self) -> impl Iterator<Item = &str> {
        self.responses.iter().filter_map(|r| r.as_deref())
    }

    /// Cue followed by present responses.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.cue.as_str()).chain(self.present())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResponseTable {
    pub rows: Vec<ResponseRow>,
}

impl ResponseTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Serializes to the same TSV layout `parse_responses` reads.
    pub fn write_tsv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .quote_style(csv::QuoteStyle::Never)
            .from_writer(out);
        w.write_record(["cue", "R1", "R2", "R3"])?;
        for row in &self.rows {
            let [a, b, c] = &row.responses;
            w.write_record([
                row.cue.as_str(),
                a.as_deref().unwrap_or(""),
                b.as_deref().unwrap_or(""),
                c.as_deref().unwrap_or(""),
            ])?;
        }
        w.flush()
    }
}

/// Column names and delimiter of a responses file.
#[derive(Debug, Clone, Serialize)]
pub struct ResponseFormat {
    pub cue: String,
    pub responses: [String; 3],
    pub delimiter: u8,
}

impl Default for ResponseFormat {
    fn default() -> Self {
        ResponseFormat {
            cue: "cue".into(),
            responses: ["R1".into(), "R2".into(), "R3".into()],
            delimiter: b'\t',
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ParseStats {
    pub rows_read: usize,
    pub rows_skipped: usize,
}

pub fn parse_responses(
    path: &Path,
    format: &ResponseFormat,
) -> Result<(ResponseTable, ParseStats)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_responses(BufReader::new(file), format, path)
}

/// Reader-based variant of [`parse_responses`]; `label` is used in errors.
pub fn read_responses<R: Read>(
    reader: R,
    format: &ResponseFormat,
    label: &Path,
) -> Result<(ResponseTable, ParseStats)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .quoting(false)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::csv(label, e))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let missing = |column: &str| Error::MissingColumn {
        path: label.to_path_buf(),
        column: column.to_string(),
    };
    let cue_col = find(&format.cue).ok_or_else(|| missing(&format.cue))?;
    let first = find(&format.responses[0]).ok_or_else(|| missing(&format.responses[0]))?;
    let resp_cols = [
        Some(first),
        find(&format.responses[1]),
        find(&format.responses[2]),
    ];

    let mut table = ResponseTable::default();
    let mut stats = ParseStats::default();
    for record in rdr.records() {
        stats.rows_read += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                log::warn!(
                    "{}: skipping malformed row {}: {e}",
                    label.display(),
                    stats.rows_read
                );
                stats.rows_skipped += 1;
                continue;
            }
        };
        let field = |c: Option<usize>| c.and_then(|i| record.get(i)).unwrap_or("");
        let responses = resp_cols.map(field);
        match ResponseRow::new(field(Some(cue_col)), &responses) {
            Some(row) => table.rows.push(row),
            None => stats.rows_skipped += 1,
        }
    }
    if stats.rows_skipped > 0 {
        log::warn!(
            "{}: skipped {} of {} rows (empty cue or no responses)",
            label.display(),
            stats.rows_skipped,
            stats.rows_read
        );
    }
    if table.is_empty() {
        return Err(Error::NoValidRows(label.to_path_buf()));
    }
    Ok((table, stats))
}

/// `ln(1 + count)`.
pub fn log_transform_frequency(raw_count: f64) -> Result<f64> {
    if !raw_count.is_finite() || raw_count < 0.0 {
        return Err(Error::InvalidInput(format!(
            "frequency count must be a finite non-negative number, got {raw_count}"
        )));
    }
    Ok(raw_count.ln_1p())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub features: [f64; N_FEATURES],
}

impl LexiconEntry {
    pub fn get(&self, feature: FeatureName) -> f64 {
        self.features[feature.index()]
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if let Some(f) = FeatureName::ALL
            .iter()
            .find(|f| !self.features[f.index()].is_finite())
        {
            return Err(format!("{f} is not finite"));
        }
        let len = self.get(FeatureName::Length);
        if len < 1.0 || len != self.word.chars().count() as f64 {
            return Err(format!("length {len} does not match word"));
        }
        if self.get(FeatureName::LogFrequency) < 0.0 {
            return Err("negative log_frequency".into());
        }
        let p = self.get(FeatureName::Polysemy);
        if p < 0.0 || p.fract() != 0.0 {
            return Err(format!("polysemy {p} is not a non-negative integer"));
        }
        Ok(())
    }
}

/// Word-indexed feature table. Words are kept in sorted order so indices are
/// stable across runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    words: Vec<String>,
    values: Vec<[f64; N_FEATURES]>,
    index: HashMap<String, usize>,
}

impl Lexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in entries {
            e.validate()
                .map_err(|msg| Error::InvalidInput(format!("lexicon entry `{}`: {msg}", e.word)))?;
            map.entry(e.word).or_insert(e.features);
        }
        Ok(Self::from_sorted(map))
    }

    fn from_sorted(map: BTreeMap<String, [f64; N_FEATURES]>) -> Self {
        let (words, values): (Vec<_>, Vec<_>) = map.into_iter().unzip();
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Lexicon {
            words,
            values,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn features(&self, word: &str) -> Option<&[f64; N_FEATURES]> {
        self.index_of(word).map(|i| &self.values[i])
    }

    pub fn row(&self, idx: usize) -> &[f64; N_FEATURES] {
        &self.values[idx]
    }

    pub fn value(&self, idx: usize, feature: FeatureName) -> f64 {
        self.values[idx][feature.index()]
    }

    /// All values of one feature, in word order.
    pub fn column(&self, feature: FeatureName) -> Vec<f64> {
        self.values.iter().map(|v| v[feature.index()]).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = LexiconEntry> + '_ {
        self.words
            .iter()
            .zip(&self.values)
            .map(|(w, v)| LexiconEntry {
                word: w.clone(),
                features: *v,
            })
    }

    /// Copy of the lexicon with `feature` replaced by `values` (word order).
    pub fn with_column(&self, feature: FeatureName, values: &[f64]) -> Lexicon {
        assert_eq!(values.len(), self.len());
        let mut out = self.clone();
        for (row, &v) in out.values.iter_mut().zip(values) {
            row[feature.index()] = v;
        }
        out
    }

    pub fn restrict<'a>(&self, keep: impl Fn(&str) -> bool + 'a) -> Lexicon {
        let map = self
            .words
            .iter()
            .zip(&self.values)
            .filter(|(w, _)| keep(w))
            .map(|(w, v)| (w.clone(), *v))
            .collect();
        Self::from_sorted(map)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NormStats {
    pub words_seen: usize,
    pub dropped_incomplete: usize,
    pub dropped_invalid: usize,
    pub duplicate_conflicts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NormColumn {
    Feature(FeatureName),
    RawFrequency,
}

fn classify_column(header: &str) -> Option<NormColumn> {
    let h = header.trim().to_ascii_lowercase();
    match h.as_str() {
        "frequency" | "freq" | "count" => Some(NormColumn::RawFrequency),
        // length is always derived from the word itself
        "length" => None,
        _ => h.parse::<FeatureName>().ok().map(NormColumn::Feature),
    }
}

type PartialRow = BTreeMap<FeatureName, f64>;

struct NormSource {
    rows: BTreeMap<String, PartialRow>,
    columns: BTreeSet<FeatureName>,
    conflicts: usize,
}

fn read_norm_source<R: Read>(reader: R, label: &Path) -> Result<NormSource> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::csv(label, e))?.clone();
    let word_col = headers
        .iter()
        .position(|h| matches!(h.trim().to_ascii_lowercase().as_str(), "word" | "words"))
        .ok_or_else(|| Error::MissingColumn {
            path: label.to_path_buf(),
            column: "word".into(),
        })?;
    let cols: Vec<(usize, NormColumn)> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != word_col)
        .filter_map(|(i, h)| classify_column(h).map(|c| (i, c)))
        .collect();
    let columns = cols
        .iter()
        .map(|&(_, c)| match c {
            NormColumn::Feature(f) => f,
            NormColumn::RawFrequency => FeatureName::LogFrequency,
        })
        .collect();

    let mut rows: BTreeMap<String, PartialRow> = BTreeMap::new();
    let mut conflicts = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| Error::csv(label, e))?;
        let Some(word) = record.get(word_col).and_then(normalize_token) else {
            continue;
        };
        let mut values = PartialRow::new();
        for &(i, col) in &cols {
            let Some(v) = record.get(i).and_then(|s| s.trim().parse::<f64>().ok()) else {
                continue;
            };
            match col {
                NormColumn::Feature(f) => {
                    values.insert(f, v);
                }
                NormColumn::RawFrequency => {
                    if let Ok(lf) = log_transform_frequency(v) {
                        values.insert(FeatureName::LogFrequency, lf);
                    }
                }
            }
        }
        match rows.get(&word) {
            Some(prev) if *prev != values => {
                log::warn!(
                    "{}: conflicting duplicate for `{word}`, keeping first",
                    label.display()
                );
                conflicts += 1;
            }
            Some(_) => {}
            None => {
                rows.insert(word, values);
            }
        }
    }
    Ok(NormSource {
        rows,
        columns,
        conflicts,
    })
}

/// Reads and inner-joins norm files. When several files provide the same
/// feature, later files take precedence.
pub fn parse_norms(paths: &[PathBuf]) -> Result<(Lexicon, NormStats)> {
    let mut sources = Vec::with_capacity(paths.len());
    for path in paths {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        sources.push((path.clone(), read_norm_source(BufReader::new(file), path)?));
    }
    join_norm_sources(sources)
}

/// Reader-based variant of [`parse_norms`] for in-memory sources.
pub fn read_norms<R: Read>(sources: Vec<(PathBuf, R)>) -> Result<(Lexicon, NormStats)> {
    let parsed = sources
        .into_iter()
        .map(|(p, r)| read_norm_source(r, &p).map(|s| (p, s)))
        .collect::<Result<Vec<_>>>()?;
    join_norm_sources(parsed)
}

fn join_norm_sources(sources: Vec<(PathBuf, NormSource)>) -> Result<(Lexicon, NormStats)> {
    let Some((first_path, _)) = sources.first() else {
        return Err(Error::InvalidInput("no norm files given".into()));
    };
    let provided: BTreeSet<FeatureName> = sources
        .iter()
        .flat_map(|(_, s)| s.columns.iter().copied())
        .collect();
    if let Some(f) = FeatureName::ALL
        .iter()
        .find(|&&f| f != FeatureName::Length && !provided.contains(&f))
    {
        return Err(Error::MissingColumn {
            path: first_path.clone(),
            column: f.to_string(),
        });
    }

    let mut stats = NormStats {
        duplicate_conflicts: sources.iter().map(|(_, s)| s.conflicts).sum(),
        ..Default::default()
    };
    let all_words: BTreeSet<&String> = sources.iter().flat_map(|(_, s)| s.rows.keys()).collect();
    stats.words_seen = all_words.len();

    let mut entries = BTreeMap::new();
    'words: for word in all_words {
        let mut merged = PartialRow::new();
        for (_, src) in &sources {
            let Some(row) = src.rows.get(word) else {
                stats.dropped_incomplete += 1;
                continue 'words;
            };
            merged.extend(row.iter().map(|(&k, &v)| (k, v)));
        }
        merged.insert(FeatureName::Length, word.chars().count() as f64);
        let mut features = [f64::NAN; N_FEATURES];
        for f in FeatureName::ALL {
            match merged.get(&f) {
                Some(&v) => features[f.index()] = v,
                None => {
                    stats.dropped_incomplete += 1;
                    continue 'words;
                }
            }
        }
        let entry = LexiconEntry {
            word: word.clone(),
            features,
        };
        if let Err(msg) = entry.validate() {
            log::warn!("dropping `{word}`: {msg}");
            stats.dropped_invalid += 1;
            continue;
        }
        entries.insert(entry.word, entry.features);
    }
    if stats.dropped_incomplete > 0 {
        log::warn!(
            "norm join dropped {} incomplete words",
            stats.dropped_incomplete
        );
    }
    Ok((Lexicon::from_sorted(entries), stats))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceDigest {
    pub path: PathBuf,
    pub sha256: String,
}

pub fn file_digest(path: &Path) -> Result<SourceDigest> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher).map_err(|e| Error::io(path, e))?;
    Ok(SourceDigest {
        path: path.to_path_buf(),
        sha256: hex::encode(hasher.finalize()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredDataset {
    pub lexicon: Lexicon,
    pub responses: ResponseTable,
    pub provenance: Vec<SourceDigest>,
}

impl FilteredDataset {
    pub fn vocabulary_size(&self) -> usize {
        self.lexicon.len()
    }
}

/// Restricts responses and lexicon to their common vocabulary.
///
/// The vocabulary is the set of cue words present in the lexicon. Responses
/// outside it are removed from their rows, rows left with no responses are
/// dropped, and the step repeats until no cue disappears, so the result is a
/// fixed point.
pub fn intersect_vocabulary(
    responses: &ResponseTable,
    lexicon: &Lexicon,
) -> Result<FilteredDataset> {
    if responses.is_empty() || lexicon.is_empty() {
        return Err(Error::InvalidInput(
            "responses and lexicon must be non-empty".into(),
        ));
    }
    let mut vocab: BTreeSet<String> = responses
        .rows
        .iter()
        .filter(|r| lexicon.contains(&r.cue))
        .map(|r| r.cue.clone())
        .collect();
    let mut rows: Vec<ResponseRow>;
    loop {
        rows = responses
            .rows
            .iter()
            .filter(|r| vocab.contains(&r.cue))
            .filter_map(|r| {
                let responses = r.responses.clone().map(|s| s.filter(|w| vocab.contains(w)));
                let row = ResponseRow {
                    cue: r.cue.clone(),
                    responses,
                };
                (row.present().count() > 0).then_some(row)
            })
            .collect();
        let cues: BTreeSet<String> = rows.iter().map(|r| r.cue.clone()).collect();
        if cues.len() == vocab.len() {
            break;
        }
        vocab = cues;
    }
    if rows.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(FilteredDataset {
        lexicon: lexicon.restrict(|w| vocab.contains(w)),
        responses: ResponseTable { rows },
        provenance: Vec::new(),
    })
}
