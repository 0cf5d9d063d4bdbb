//! Words over ordered alphabets.
//!
//! Letters are stored as indices into the declaring [`OrderedAlphabet`], so the
//! derived `Ord` on [`Word`] is exactly the lexicographic order `<_ℓ` (a proper
//! prefix sorts before its extensions, otherwise the first differing letter
//! decides). Binary input words use the alphabet `0 < 1`, whose indices coincide
//! with the bit values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a letter in its alphabet.
pub type Symbol = u16;

/// A finite alphabet whose total order is the declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderedAlphabet {
    letters: Vec<char>,
}

impl OrderedAlphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self> {
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(Error::Input("alphabet must be non-empty".into()));
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(Error::Input(format!("duplicate letter '{c}' in alphabet")));
            }
        }
        if letters.len() > Symbol::MAX as usize {
            return Err(Error::Input("alphabet too large".into()));
        }
        Ok(Self { letters })
    }

    /// The input alphabet `0 < 1`.
    pub fn binary() -> Self {
        Self {
            letters: vec!['0', '1'],
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn symbol(&self, c: char) -> Option<Symbol> {
        self.letters.iter().position(|&l| l == c).map(|i| i as Symbol)
    }

    pub fn letter(&self, s: Symbol) -> char {
        self.letters[s as usize]
    }

    /// Parses a word letter by letter.
    pub fn word(&self, text: &str) -> Result<Word> {
        text.chars()
            .map(|c| {
                self.symbol(c)
                    .ok_or_else(|| Error::Input(format!("symbol '{c}' is not in the alphabet")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn render(&self, w: &Word) -> String {
        w.0.iter().map(|&s| self.letter(s)).collect()
    }

    /// Fails if `w` uses an index outside this alphabet.
    pub fn check(&self, w: &Word) -> Result<()> {
        match w.0.iter().find(|&&s| s as usize >= self.letters.len()) {
            Some(s) => Err(Error::Input(format!("symbol index {s} is not in the alphabet"))),
            None => Ok(()),
        }
    }
}

/// A finite word; ordering is `<_ℓ`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn count(&self, s: Symbol) -> usize {
        self.0.iter().filter(|&&x| x == s).count()
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    /// Renders symbol indices; use [`OrderedAlphabet::render`] for letters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The unique relation between two words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WordRelation {
    Equal,
    ProperPrefixOf,
    HasProperPrefix,
    StrictLess,
    StrictGreater,
}

impl WordRelation {
    /// True for the two relations making up `u <_ℓ v`.
    pub fn is_lex_less(self) -> bool {
        matches!(self, WordRelation::ProperPrefixOf | WordRelation::StrictLess)
    }
}

pub fn compare(u: &Word, v: &Word) -> WordRelation {
    for (a, b) in u.0.iter().zip(v.0.iter()) {
        if a < b {
            return WordRelation::StrictLess;
        }
        if a > b {
            return WordRelation::StrictGreater;
        }
    }
    match u.len().cmp(&v.len()) {
        std::cmp::Ordering::Equal => WordRelation::Equal,
        std::cmp::Ordering::Less => WordRelation::ProperPrefixOf,
        std::cmp::Ordering::Greater => WordRelation::HasProperPrefix,
    }
}

/// Length of the primitive root of a nonempty symbol slice (border method).
pub(crate) fn root_len(w: &[Symbol]) -> usize {
    let n = w.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// Shortest prefix `v` of `w` with `w ∈ v*`.
pub fn primitive_root(w: &Word) -> Result<Word> {
    if w.is_empty() {
        return Err(Error::Input("the empty word has no primitive root".into()));
    }
    Ok(Word(w.0[..root_len(&w.0)].to_vec()))
}

pub fn is_primitive(w: &Word) -> bool {
    !w.is_empty() && root_len(&w.0) == w.len()
}

fn check_binary(w: &Word) -> Result<()> {
    match w.0.iter().find(|&&s| s > 1) {
        Some(s) => Err(Error::Input(format!("symbol index {s} is not a bit"))),
        None => Ok(()),
    }
}

/// Net depth change of a bit slice: `|w|_0 - |w|_1`.
pub(crate) fn open_of(bits: &[Symbol]) -> i64 {
    bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).sum()
}

pub fn open_depth(w: &Word) -> Result<i64> {
    check_binary(w)?;
    Ok(open_of(&w.0))
}

pub fn close_depth(w: &Word) -> Result<i64> {
    Ok(-open_depth(w)?)
}

/// Membership of a binary word in D1 and its prefix/suffix closures.
///
/// A word that is both a prefix and a suffix of D1 words has open depth 0 and
/// is therefore in D1, so `Both` is never produced; it is kept for
/// completeness of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DyckClass {
    InD1,
    PrefixOnly,
    SuffixOnly,
    Both,
    Neither,
}

pub fn dyck_class(w: &Word) -> Result<DyckClass> {
    check_binary(w)?;
    let mut depth = 0i64;
    let mut prefix_ok = true;
    for &b in &w.0 {
        depth += if b == 0 { 1 } else { -1 };
        if depth < 0 {
            prefix_ok = false;
        }
    }
    let total = depth;
    let mut close = 0i64;
    let mut suffix_ok = true;
    for &b in w.0.iter().rev() {
        close += if b == 1 { 1 } else { -1 };
        if close < 0 {
            suffix_ok = false;
        }
    }
    Ok(match (prefix_ok, suffix_ok) {
        (true, true) if total == 0 => DyckClass::InD1,
        (true, true) => DyckClass::Both,
        (true, false) => DyckClass::PrefixOnly,
        (false, true) => DyckClass::SuffixOnly,
        (false, false) => DyckClass::Neither,
    })
}

pub(crate) fn is_dyck(bits: &[Symbol]) -> bool {
    let mut depth = 0i64;
    for &b in bits {
        depth += if b == 0 { 1 } else { -1 };
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}
