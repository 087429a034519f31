//! Sequences, base-pairing rules and the thermodynamic lookup tables.
//!
//! Table files are line oriented `KEY<TAB>VALUE` text; `#` starts a comment
//! line. Stacking keys are written `XY/ZW`: top strand 5'-XY-3' over bottom
//! strand 3'-ZW-5', so X pairs with Z and Y pairs with W.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_STACK_TABLE: &str = include_str!("../data/stack37.tsv");
const DEFAULT_LOOP_TABLE: &str = include_str!("../data/loops37.tsv");

#[derive(Debug, Error, PartialEq)]
pub enum SeqError {
    #[error("invalid base {symbol:?} at position {position}")]
    InvalidBase { position: usize, symbol: char },
    #[error("empty sequence")]
    Empty,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no stacking entry for {0}")]
    MissingEntry(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

/// An RNA nucleotide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base {
    A,
    C,
    G,
    U,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::U];

    /// Accepts either case; `T` is read as `U`.
    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'U' | 'T' => Some(Base::U),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::U => 'U',
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A validated RNA sequence. Positions are 1-based throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnaSequence {
    pub id: String,
    bases: Vec<Base>,
}

impl RnaSequence {
    /// Parse a sequence string. Whitespace is dropped, case is normalized
    /// and `T` becomes `U`; anything else is rejected with its 1-based
    /// position in the whitespace-stripped string.
    pub fn parse(text: &str, id: impl Into<String>) -> Result<Self, SeqError> {
        let mut bases = Vec::with_capacity(text.len());
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            match Base::from_char(c) {
                Some(b) => bases.push(b),
                None => {
                    return Err(SeqError::InvalidBase {
                        position: bases.len() + 1,
                        symbol: c,
                    })
                }
            }
        }
        Self::from_bases(bases, id)
    }

    pub fn from_bases(bases: Vec<Base>, id: impl Into<String>) -> Result<Self, SeqError> {
        if bases.is_empty() {
            return Err(SeqError::Empty);
        }
        Ok(RnaSequence {
            id: id.into(),
            bases,
        })
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// Base at 1-based position `i`.
    pub fn base(&self, i: usize) -> Base {
        self.bases[i - 1]
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }
}

impl fmt::Display for RnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

/// The set of base pairs treated as legitimate, order-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRule {
    allowed: BTreeSet<(Base, Base)>,
}

impl PairRule {
    pub fn new(pairs: impl IntoIterator<Item = (Base, Base)>) -> Self {
        PairRule {
            allowed: pairs.into_iter().map(|(a, b)| ordered(a, b)).collect(),
        }
    }

    pub fn can_pair(&self, a: Base, b: Base) -> bool {
        self.allowed.contains(&ordered(a, b))
    }

    pub fn allowed(&self) -> impl Iterator<Item = (Base, Base)> + '_ {
        self.allowed.iter().copied()
    }
}

impl Default for PairRule {
    /// Watson-Crick pairs plus the G-U wobble.
    fn default() -> Self {
        PairRule::new([(Base::G, Base::C), (Base::A, Base::U), (Base::G, Base::U)])
    }
}

fn ordered(a: Base, b: Base) -> (Base, Base) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Two stacked base pairs: `outer = (x, z)` closes `inner = (y, w)` where
/// x, y run 5'→3' on the top strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stack {
    pub outer: (Base, Base),
    pub inner: (Base, Base),
}

impl Stack {
    pub fn new(outer: (Base, Base), inner: (Base, Base)) -> Self {
        Stack { outer, inner }
    }

    fn parse_key(key: &str) -> Option<Stack> {
        let (top, bottom) = key.split_once('/')?;
        let top: Vec<Base> = top.chars().map(Base::from_char).collect::<Option<_>>()?;
        let bottom: Vec<Base> = bottom.chars().map(Base::from_char).collect::<Option<_>>()?;
        if top.len() != 2 || bottom.len() != 2 {
            return None;
        }
        Some(Stack::new((top[0], bottom[0]), (top[1], bottom[1])))
    }

    pub fn key(&self) -> String {
        format!(
            "{}{}/{}{}",
            self.outer.0, self.inner.0, self.outer.1, self.inner.1
        )
    }
}

/// Nearest-neighbor stacking free energies, kcal/mol at 37 °C.
#[derive(Debug, Clone, PartialEq)]
pub struct NnTable {
    entries: BTreeMap<Stack, f64>,
}

impl NnTable {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut entries = BTreeMap::new();
        for (line_no, key, value) in key_values(text)? {
            let stack = Stack::parse_key(key).ok_or_else(|| TableError::Parse {
                line: line_no,
                msg: format!("bad stacking key {key:?}"),
            })?;
            entries.insert(stack, value);
        }
        Ok(NnTable { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, TableError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TableError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Stored ΔG°37 for `inner` stacked 3'-adjacent on `outer`.
    pub fn stack_energy(&self, outer: (Base, Base), inner: (Base, Base)) -> Result<f64, TableError> {
        let stack = Stack::new(outer, inner);
        self.entries
            .get(&stack)
            .copied()
            .ok_or_else(|| TableError::MissingEntry(stack.key()))
    }

    /// Stability score of a stack, `−ΔG`: larger is more stable.
    pub fn stability(&self, outer: (Base, Base), inner: (Base, Base)) -> Result<f64, TableError> {
        self.stack_energy(outer, inner).map(|g| -g)
    }

    /// True when every stack of two pairs allowed by `rule` has an entry.
    pub fn covers(&self, rule: &PairRule) -> bool {
        let pairs: Vec<(Base, Base)> = rule
            .allowed()
            .flat_map(|(a, b)| [(a, b), (b, a)])
            .collect();
        pairs.iter().all(|&outer| {
            pairs
                .iter()
                .all(|&inner| self.entries.contains_key(&Stack::new(outer, inner)))
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|(s, v)| format!("{}\t{}\n", s.key(), v))
            .collect()
    }
}

impl Default for NnTable {
    fn default() -> Self {
        NnTable::parse(DEFAULT_STACK_TABLE).expect("bundled stacking table parses")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HairpinPenalty {
    Forbidden,
    Penalty(f64),
}

/// Hairpin-loop penalties by loop size and in-line pseudoknot stem constants
/// by stem length.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPenaltyTable {
    hairpin: BTreeMap<usize, f64>,
    inline_stem: BTreeMap<usize, f64>,
    inline_default: f64,
}

impl LoopPenaltyTable {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut hairpin = BTreeMap::new();
        let mut inline_stem = BTreeMap::new();
        let mut inline_default = 1.0;
        for (line, key, value) in key_values(text)? {
            let bad = |msg: String| TableError::Parse { line, msg };
            if key == "inline_stem.default" {
                if value <= 0.0 {
                    return Err(bad("inline_stem.default must be positive".into()));
                }
                inline_default = value;
            } else if let Some(n) = key.strip_prefix("hairpin.") {
                let n: usize = n.parse().map_err(|_| bad(format!("bad loop size in {key:?}")))?;
                if n < 3 {
                    return Err(bad(format!("hairpin loops of size {n} are forbidden")));
                }
                if value < 0.0 {
                    return Err(bad("hairpin penalties must be non-negative".into()));
                }
                hairpin.insert(n, value);
            } else if let Some(n) = key.strip_prefix("inline_stem.") {
                let n: usize = n.parse().map_err(|_| bad(format!("bad stem length in {key:?}")))?;
                if value <= 0.0 {
                    return Err(bad("in-line stem constants must be positive".into()));
                }
                inline_stem.insert(n, value);
            } else {
                return Err(bad(format!("unknown key {key:?}")));
            }
        }
        if let Some(&max) = hairpin.keys().next_back() {
            if let Some(gap) = (3..=max).find(|n| !hairpin.contains_key(n)) {
                return Err(TableError::Parse {
                    line: 0,
                    msg: format!("hairpin sizes must be contiguous from 3; missing {gap}"),
                });
            }
        }
        Ok(LoopPenaltyTable {
            hairpin,
            inline_stem,
            inline_default,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, TableError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TableError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Loops of 0–2 bases are forbidden; loops beyond the largest listed
    /// size reuse its value.
    pub fn hairpin_penalty(&self, loop_size: usize) -> HairpinPenalty {
        if loop_size < 3 {
            return HairpinPenalty::Forbidden;
        }
        match self.hairpin.get(&loop_size) {
            Some(&v) => HairpinPenalty::Penalty(v),
            None => match self.hairpin.iter().next_back() {
                Some((_, &v)) => HairpinPenalty::Penalty(v),
                None => HairpinPenalty::Penalty(0.0),
            },
        }
    }

    /// λ for an in-line stem of `length` base pairs.
    pub fn inline_stem(&self, length: usize) -> f64 {
        self.inline_stem
            .get(&length)
            .copied()
            .unwrap_or(self.inline_default)
    }

    pub fn with_inline_default(mut self, value: f64) -> Self {
        self.inline_default = value;
        self
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (n, v) in &self.hairpin {
            out.push_str(&format!("hairpin.{n}\t{v}\n"));
        }
        for (n, v) in &self.inline_stem {
            out.push_str(&format!("inline_stem.{n}\t{v}\n"));
        }
        out.push_str(&format!("inline_stem.default\t{}\n", self.inline_default));
        out
    }
}

impl Default for LoopPenaltyTable {
    fn default() -> Self {
        LoopPenaltyTable::parse(DEFAULT_LOOP_TABLE).expect("bundled loop table parses")
    }
}

/// Split a `KEY<TAB>VALUE` document into (line number, key, value).
pub(crate) fn key_values(text: &str) -> Result<Vec<(usize, &str, f64)>, TableError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let (key, value) = line
            .split_once('\t')
            .or_else(|| line.split_once(char::is_whitespace))
            .ok_or_else(|| TableError::Parse {
                line: line_no,
                msg: "expected KEY<TAB>VALUE".into(),
            })?;
        let value: f64 = value.trim().parse().map_err(|_| TableError::Parse {
            line: line_no,
            msg: format!("bad value {:?}", value.trim()),
        })?;
        out.push((line_no, key.trim(), value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Base::*;

    #[test]
    fn parse_normalizes_case_and_thymine() {
        let s = RnaSequence::parse("gcaau", "x").unwrap();
        assert_eq!(s.bases(), &[G, C, A, A, U]);
        let t = RnaSequence::parse(" gc\ntT ", "x").unwrap();
        assert_eq!(t.to_string(), "GCUU");
    }

    #[test]
    fn parse_example_sequence() {
        let s = RnaSequence::parse("GGAAGCAAACAUCCCUGU", "fig1").unwrap();
        assert_eq!(s.len(), 18);
        assert_eq!(s.base(1), G);
        assert_eq!(s.base(18), U);
    }

    #[test]
    fn parse_rejects_unknown_symbols() {
        assert_eq!(
            RnaSequence::parse("GCXG", "x"),
            Err(SeqError::InvalidBase {
                position: 3,
                symbol: 'X'
            })
        );
        assert_eq!(RnaSequence::parse("  ", "x"), Err(SeqError::Empty));
    }

    #[test]
    fn default_pair_rule() {
        let r = PairRule::default();
        assert!(r.can_pair(G, C));
        assert!(r.can_pair(C, G));
        assert!(r.can_pair(G, U));
        assert!(r.can_pair(U, A));
        assert!(!r.can_pair(A, G));
        assert!(!r.can_pair(C, U));
        assert!(!r.can_pair(G, G));
        assert_eq!(r.allowed().count(), 3);
        for a in Base::ALL {
            for b in Base::ALL {
                assert_eq!(r.can_pair(a, b), r.can_pair(b, a));
            }
        }
    }

    #[test]
    fn stack_lookup_matches_published_values() {
        let t = NnTable::default();
        assert!(t.covers(&PairRule::default()));
        // 5'GC3'/3'CG5' -3.42, 5'GG3'/3'CC5' -3.26, 5'AA3'/3'UU5' -0.93
        // (Turner 2004, rounded to 0.1 kcal/mol).
        assert_eq!(t.stack_energy((G, C), (C, G)).unwrap(), -3.4);
        assert_eq!(t.stack_energy((G, C), (G, C)).unwrap(), -3.3);
        assert_eq!(t.stack_energy((A, U), (A, U)).unwrap(), -0.9);
        assert_eq!(t.stack_energy((U, A), (A, U)).unwrap(), -1.3);
        // rotating the helix by 180 degrees describes the same stack
        assert_eq!(
            t.stack_energy((C, G), (C, G)).unwrap(),
            t.stack_energy((G, C), (G, C)).unwrap()
        );
        assert_eq!(t.stability((G, C), (C, G)).unwrap(), 3.4);
        assert_eq!(
            t.stack_energy((G, C), (C, G)).unwrap(),
            t.stack_energy((G, C), (C, G)).unwrap()
        );
    }

    #[test]
    fn stack_with_disallowed_pair_is_missing() {
        let t = NnTable::default();
        assert!(matches!(
            t.stack_energy((A, G), (C, G)),
            Err(TableError::MissingEntry(_))
        ));
    }

    #[test]
    fn every_symmetric_stack_agrees() {
        let t = NnTable::default();
        let rule = PairRule::default();
        let pairs: Vec<_> = rule.allowed().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
        for &o in &pairs {
            for &i in &pairs {
                let rotated = t.stack_energy((i.1, i.0), (o.1, o.0)).unwrap();
                assert_eq!(t.stack_energy(o, i).unwrap(), rotated);
            }
        }
    }

    #[test]
    fn hairpin_lookup() {
        let t = LoopPenaltyTable::default();
        assert_eq!(t.hairpin_penalty(0), HairpinPenalty::Forbidden);
        assert_eq!(t.hairpin_penalty(1), HairpinPenalty::Forbidden);
        assert_eq!(t.hairpin_penalty(2), HairpinPenalty::Forbidden);
        assert_eq!(t.hairpin_penalty(3), HairpinPenalty::Penalty(5.4));
        assert_eq!(t.hairpin_penalty(9), t.hairpin_penalty(7));
        assert_eq!(t.hairpin_penalty(40), HairpinPenalty::Penalty(6.0));
    }

    #[test]
    fn inline_stem_falls_back_to_default() {
        let t = LoopPenaltyTable::default();
        assert_eq!(t.inline_stem(2), 1.0);
        assert_eq!(t.inline_stem(17), 1.0);
        let t = LoopPenaltyTable::parse("inline_stem.3\t2.5\ninline_stem.default\t0.5\n").unwrap();
        assert_eq!(t.inline_stem(3), 2.5);
        assert_eq!(t.inline_stem(4), 0.5);
    }

    #[test]
    fn loop_table_rejects_gaps_and_forbidden_sizes() {
        assert!(LoopPenaltyTable::parse("hairpin.3\t1\nhairpin.5\t1\n").is_err());
        assert!(LoopPenaltyTable::parse("hairpin.2\t1\n").is_err());
        assert!(LoopPenaltyTable::parse("bogus\t1\n").is_err());
    }

    #[test]
    fn tables_round_trip() {
        let t = NnTable::default();
        assert_eq!(NnTable::parse(&t.to_tsv()).unwrap(), t);
        assert_eq!(NnTable::parse(&t.to_tsv()).unwrap().to_tsv(), t.to_tsv());
        let l = LoopPenaltyTable::default();
        assert_eq!(LoopPenaltyTable::parse(&l.to_tsv()).unwrap(), l);
    }

    #[test]
    fn bundled_stack_file_round_trips_modulo_order() {
        let t = NnTable::default();
        let mut file: Vec<String> = DEFAULT_STACK_TABLE
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let (k, v) = l.split_once('\t').unwrap();
                format!("{k}\t{}", v.parse::<f64>().unwrap())
            })
            .collect();
        let mut emitted: Vec<String> = t.to_tsv().lines().map(String::from).collect();
        file.sort();
        file.dedup();
        emitted.sort();
        assert_eq!(file, emitted);
    }
}
