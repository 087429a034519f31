//! Connectivity-table and FASTA input, known-stem extraction, and dataset
//! manifests.
//!
//! CT files have a header line starting with the sequence length (any
//! trailing text is the title) followed by one row per base:
//!
//! ```text
//! index  base  prev  next  partner  natural-index
//! ```
//!
//! Parsing is tolerant by default: leading whitespace, any column spacing,
//! `#` comment lines and a missing natural-index column are accepted.
//! [`CtOptions::strict`] also requires exactly six columns and consistent
//! `prev`/`next` links. Files holding several molecules and rows with
//! modified bases are rejected in both modes.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::scoring::{SecondaryStructure, StructureError};
use crate::seq::{Base, NnTable, RnaSequence, SeqError, TableError};
use crate::stems::{stem_stability, StemCandidate, WeightMode};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {msg}")]
    MalformedRow { line: usize, msg: String },
    #[error("base {0} pairs with {1}, but base {1} does not pair back")]
    InconsistentPairing(usize, usize),
    #[error("header declares {header} bases, found {rows} rows")]
    LengthMismatch { header: usize, rows: usize },
    #[error("line {line}: modified or unknown base {symbol:?}")]
    ModifiedBase { line: usize, symbol: String },
    #[error("line {line}: a second molecule starts here; multi-molecule CT files are not supported")]
    MultiMolecule { line: usize },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("duplicate manifest id {0:?}")]
    DuplicateId(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}: FASTA sequence differs from the CT sequence")]
    SequenceMismatch(String),
    #[error("FASTA: {0}")]
    Fasta(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Table(#[from] TableError),
}

fn malformed(line: usize, msg: impl Into<String>) -> DatasetError {
    DatasetError::MalformedRow {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CtOptions {
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtRow {
    pub index: usize,
    pub base: Base,
    pub partner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtRecord {
    pub n: usize,
    pub title: String,
    pub rows: Vec<CtRow>,
}

impl CtRecord {
    pub fn parse(text: &str, opts: CtOptions) -> Result<Self, DatasetError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| malformed(1, "empty CT file"))?;
        let mut head = header.splitn(2, char::is_whitespace);
        let n: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| malformed(hline, "header must start with the sequence length"))?;
        if n == 0 {
            return Err(malformed(hline, "sequence length must be positive"));
        }
        let title = head.next().unwrap_or("").trim().to_string();

        let mut rows = Vec::with_capacity(n);
        for (line, text) in lines {
            let cols: Vec<&str> = text.split_whitespace().collect();
            let expected_cols = if opts.strict { 6..=6 } else { 5..=usize::MAX };
            if !expected_cols.contains(&cols.len()) {
                return Err(malformed(line, format!("expected 6 columns, found {}", cols.len())));
            }
            let num = |k: usize, what: &str| -> Result<usize, DatasetError> {
                cols[k]
                    .parse()
                    .map_err(|_| malformed(line, format!("bad {what} {:?}", cols[k])))
            };
            let index = num(0, "index")?;
            let (prev, next, partner) = (num(2, "prev")?, num(3, "next")?, num(4, "partner")?);
            let expected = rows.len() + 1;
            if index != expected {
                if index == 1 && !rows.is_empty() {
                    return Err(DatasetError::MultiMolecule { line });
                }
                return Err(malformed(line, format!("index {index}, expected {expected}")));
            }
            if prev == 0 && index > 1 {
                return Err(DatasetError::MultiMolecule { line });
            }
            if opts.strict && (prev != index - 1 || (next != index + 1 && next != 0)) {
                return Err(malformed(line, "inconsistent prev/next links"));
            }
            let mut symbol = cols[1].chars();
            let base = match (symbol.next().and_then(Base::from_char), symbol.next()) {
                (Some(b), None) => b,
                _ => {
                    return Err(DatasetError::ModifiedBase {
                        line,
                        symbol: cols[1].to_string(),
                    })
                }
            };
            rows.push(CtRow {
                index,
                base,
                partner,
            });
        }
        if rows.len() != n {
            return Err(DatasetError::LengthMismatch {
                header: n,
                rows: rows.len(),
            });
        }
        let record = CtRecord { n, title, rows };
        record.check_pairing()?;
        Ok(record)
    }

    fn check_pairing(&self) -> Result<(), DatasetError> {
        for r in &self.rows {
            let j = r.partner;
            if j == 0 {
                continue;
            }
            if j > self.n || j == r.index || self.rows[j - 1].partner != r.index {
                return Err(DatasetError::InconsistentPairing(r.index, j));
            }
        }
        Ok(())
    }

    /// First word of the title, skipping an `ENERGY = x` or `dG = x`
    /// prefix as written by folding programs.
    pub fn name(&self) -> &str {
        let mut words = self.title.split_whitespace().peekable();
        if matches!(words.peek(), Some(&w) if w.eq_ignore_ascii_case("energy") || w == "dG") {
            words.next();
            if words.peek() == Some(&"=") {
                words.next();
            }
            words.next();
        }
        words.next().unwrap_or("ct")
    }

    pub fn sequence(&self) -> RnaSequence {
        let id = self.name().to_string();
        RnaSequence::from_bases(self.rows.iter().map(|r| r.base).collect(), id)
            .expect("CT files have at least one row")
    }

    pub fn structure(&self) -> SecondaryStructure {
        let pairs = self
            .rows
            .iter()
            .filter(|r| r.partner > r.index)
            .map(|r| (r.index, r.partner));
        SecondaryStructure::new(self.n, pairs).expect("pairing was validated")
    }
}

/// Tolerant CT parse into a sequence and its structure.
pub fn parse_ct(text: &str) -> Result<(RnaSequence, SecondaryStructure), DatasetError> {
    let rec = CtRecord::parse(text, CtOptions::default())?;
    Ok((rec.sequence(), rec.structure()))
}

/// Six-column CT text for `seq` folded as `structure`.
pub fn emit_ct(seq: &RnaSequence, structure: &SecondaryStructure, title: &str) -> String {
    let n = seq.len();
    let partners = structure.partners();
    let mut out = format!("{n}\t{title}\n");
    for i in 1..=n {
        let next = if i == n { 0 } else { i + 1 };
        out.push_str(&format!(
            "{i}\t{}\t{}\t{next}\t{}\t{i}\n",
            seq.base(i).as_char(),
            i - 1,
            partners[i]
        ));
    }
    out
}

pub fn read_ct(path: &Path) -> Result<(RnaSequence, SecondaryStructure), DatasetError> {
    parse_ct(&read(path)?)
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            DatasetError::MissingFile(path.to_path_buf())
        } else {
            DatasetError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

/// Records of a FASTA file. Sequence lines may wrap; text before the first
/// `>` is rejected.
pub fn parse_fasta(text: &str) -> Result<Vec<RnaSequence>, DatasetError> {
    let mut out = Vec::new();
    let mut current: Option<(String, String)> = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(header) = line.strip_prefix('>') {
            if let Some((id, body)) = current.take() {
                out.push(RnaSequence::parse(&body, id)?);
            }
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            current = Some((id, String::new()));
        } else if let Some((_, body)) = current.as_mut() {
            body.push_str(line);
        } else if !line.starts_with(';') {
            return Err(DatasetError::Fasta("sequence data before the first header".into()));
        }
    }
    if let Some((id, body)) = current {
        out.push(RnaSequence::parse(&body, id)?);
    }
    Ok(out)
}

/// A single sequence from a FASTA file or bare sequence text.
pub fn read_sequence(path: &Path) -> Result<RnaSequence, DatasetError> {
    let text = read(path)?;
    if text.trim_start().starts_with('>') {
        let mut records = parse_fasta(&text)?;
        match records.len() {
            1 => Ok(records.remove(0)),
            k => Err(DatasetError::Fasta(format!("expected one record, found {k}"))),
        }
    } else {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let body: String = text.split_whitespace().collect();
        Ok(RnaSequence::parse(&body, id)?)
    }
}

/// Maximal runs of nested consecutive pairs `(i, j), (i+1, j−1), …` in a
/// known structure, as `(first, last, length)`.
pub fn structure_runs(s: &SecondaryStructure) -> Vec<(usize, usize, usize)> {
    let mut runs = Vec::new();
    let mut iter = s.pairs().iter().copied().peekable();
    while let Some((first, last)) = iter.next() {
        let mut length = 1;
        while iter.peek() == Some(&(first + length, last - length)) {
            iter.next();
            length += 1;
        }
        runs.push((first, last, length));
    }
    runs
}

/// Known stems of at least `m` pairs in model-comparable form, and the
/// largest weight among them (0 when there are none). Shorter runs are
/// left out; they still count when scoring.
pub fn known_stems(
    s: &SecondaryStructure,
    m: usize,
    mode: WeightMode,
    seq: &RnaSequence,
    table: &NnTable,
) -> Result<(Vec<StemCandidate>, f64), DatasetError> {
    let mut stems = Vec::new();
    for (first, last, length) in structure_runs(s).into_iter().filter(|r| r.2 >= m) {
        let weight = match mode {
            WeightMode::BpLength => length as f64,
            WeightMode::NnEnergy => stem_stability(seq, table, first, last, length)?,
        };
        stems.push(StemCandidate::new(first, last, length, weight));
    }
    let mu = stems.iter().map(|c| c.weight).fold(0.0, f64::max);
    Ok((stems, mu))
}

pub fn is_pseudoknotted(s: &SecondaryStructure) -> bool {
    s.is_pseudoknotted()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

/// Which structures of a manifest to use, by their pseudoknot flag.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PkClass {
    #[default]
    All,
    Pseudoknotted,
    Nested,
}

impl FromStr for PkClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(PkClass::All),
            "pk" | "pseudoknotted" => Ok(PkClass::Pseudoknotted),
            "nested" | "non-pk" => Ok(PkClass::Nested),
            other => Err(format!("unknown class {other:?} (all, pk, nested)")),
        }
    }
}

impl PkClass {
    pub fn admits(self, pseudoknotted: bool) -> bool {
        match self {
            PkClass::All => true,
            PkClass::Pseudoknotted => pseudoknotted,
            PkClass::Nested => !pseudoknotted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    /// FASTA file; the CT sequence is used when absent.
    pub sequence: Option<PathBuf>,
    pub ct: PathBuf,
    pub pseudoknotted: bool,
    pub split: Split,
}

/// One loaded structure with its sequence.
#[derive(Debug, Clone)]
pub struct Example {
    pub id: String,
    pub seq: RnaSequence,
    pub truth: SecondaryStructure,
}

impl ManifestEntry {
    pub fn load(&self) -> Result<Example, DatasetError> {
        let (mut seq, truth) = read_ct(&self.ct)?;
        if let Some(path) = &self.sequence {
            let fasta = read_sequence(path)?;
            if fasta.bases() != seq.bases() {
                return Err(DatasetError::SequenceMismatch(self.id.clone()));
            }
        }
        seq.id = self.id.clone();
        if truth.is_pseudoknotted() != self.pseudoknotted {
            log::warn!(
                "{}: manifest says pseudoknotted={}, structure says {}",
                self.id,
                self.pseudoknotted,
                truth.is_pseudoknotted()
            );
        }
        Ok(Example {
            id: self.id.clone(),
            seq,
            truth,
        })
    }
}

/// Tab-separated manifest with the header
/// `id  sequence  ct  pseudoknotted  split`. Paths are relative to the
/// manifest's directory; `sequence` may be `-` or empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_HEADER: &str = "id\tsequence\tct\tpseudoknotted\tsplit";

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

impl DatasetManifest {
    /// Parse manifest text; relative paths resolve against `base_dir`.
    /// Referenced files are not touched.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, DatasetError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if !header_seen {
                if cols.join("\t") != MANIFEST_HEADER {
                    return Err(malformed(line_no, format!("manifest header must be {MANIFEST_HEADER:?}")));
                }
                header_seen = true;
                continue;
            }
            if cols.len() != 5 {
                return Err(malformed(line_no, format!("expected 5 columns, found {}", cols.len())));
            }
            let id = cols[0].to_string();
            if !seen.insert(id.clone()) {
                return Err(DatasetError::DuplicateId(id));
            }
            let sequence = match cols[1] {
                "" | "-" => None,
                p => Some(base_dir.join(p)),
            };
            entries.push(ManifestEntry {
                id,
                sequence,
                ct: base_dir.join(cols[2]),
                pseudoknotted: parse_flag(cols[3])
                    .ok_or_else(|| malformed(line_no, format!("bad flag {:?}", cols[3])))?,
                split: cols[4].parse().map_err(|e: String| malformed(line_no, e))?,
            });
        }
        Ok(DatasetManifest { entries })
    }

    /// Read and validate a manifest: ids are unique and every referenced
    /// file exists.
    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let manifest = Self::parse(&text, base)?;
        for e in &manifest.entries {
            for p in std::iter::once(&e.ct).chain(e.sequence.as_ref()) {
                if !p.is_file() {
                    return Err(DatasetError::MissingFile(p.clone()));
                }
            }
        }
        Ok(manifest)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in `split` (all splits when `None`) admitted by `class`.
    pub fn select(&self, split: Option<Split>, class: PkClass) -> Vec<&ManifestEntry> {
        self.entries
            .iter()
            .filter(|e| split.is_none_or(|s| e.split == s) && class.admits(e.pseudoknotted))
            .collect()
    }

    /// Load the selected entries, in manifest order.
    pub fn load_examples(
        &self,
        split: Option<Split>,
        class: PkClass,
    ) -> Result<Vec<Example>, DatasetError> {
        self.select(split, class)
            .par_iter()
            .map(|e| e.load())
            .collect()
    }

    pub fn split_sizes(&self) -> (usize, usize) {
        let train = self.entries.iter().filter(|e| e.split == Split::Train).count();
        (train, self.entries.len() - train)
    }
}
