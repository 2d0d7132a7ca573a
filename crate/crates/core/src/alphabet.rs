//! Symbol alphabets: the builtin letter sequence, an extended printable-ASCII
//! sequence, and alphabets loaded from one-token-per-line files so a fitted
//! model can reuse an existing token vocabulary.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Where an alphabet's entries came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetSource {
    /// Lowercase letters, then uppercase, then multi-letter combinations.
    Builtin,
    /// Printable ASCII glyphs, then multi-glyph combinations.
    AsciiExtended,
    /// Loaded from an external one-token-per-line file.
    ExternalTokenFile,
}

/// An ordered set of distinct non-empty symbol strings, indexable by cluster
/// rank.
#[derive(Debug, Clone)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    source: AlphabetSource,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

const BUILTIN_BASE: &[u8; 52] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn nth_symbol(base: &[u8], i: usize) -> String {
    let radix = base.len();
    let mut len = 1;
    let mut block = radix;
    let mut start = 0;
    while i >= start + block {
        start += block;
        block *= radix;
        len += 1;
    }
    let mut offset = i - start;
    let mut digits = vec![0usize; len];
    for d in (0..len).rev() {
        digits[d] = offset % radix;
        offset /= radix;
    }
    digits.iter().map(|&d| base[d] as char).collect()
}

impl Alphabet {
    fn from_generated(base: &[u8], k: usize, source: AlphabetSource) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let symbols: Vec<String> = (0..k).map(|i| nth_symbol(base, i)).collect();
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            symbols,
            index,
            source,
        })
    }

    /// The builtin alphabet of size `k`: the 26 lowercase letters, then the
    /// 26 uppercase letters, then two-character combinations in lexicographic
    /// order, then longer combinations as needed.
    pub fn default_sized(k: usize) -> Result<Self> {
        Self::from_generated(BUILTIN_BASE, k, AlphabetSource::Builtin)
    }

    /// Like [`Alphabet::default_sized`] but over all 94 printable non-space
    /// ASCII glyphs, yielding more single-character symbols before resorting
    /// to combinations.
    pub fn ascii_extended(k: usize) -> Result<Self> {
        let base: Vec<u8> = (b'!'..=b'~').collect();
        Self::from_generated(&base, k, AlphabetSource::AsciiExtended)
    }

    /// Builds an alphabet from token-file lines, preserving file order.
    /// Duplicate and empty tokens are rejected with 1-based line numbers.
    pub fn from_tokens<I, S>(lines: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut symbols = Vec::new();
        let mut index = HashMap::new();
        for (i, line) in lines.into_iter().enumerate() {
            let token = line.into();
            let line_no = i + 1;
            if token.is_empty() {
                return Err(Error::EmptyToken { line: line_no });
            }
            if let Some(&first) = index.get(&token) {
                return Err(Error::DuplicateToken {
                    token,
                    first_line: first + 1,
                    dup_line: line_no,
                });
            }
            index.insert(token.clone(), symbols.len());
            symbols.push(token);
        }
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self {
            symbols,
            index,
            source: AlphabetSource::ExternalTokenFile,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, rank: usize) -> Option<&str> {
        self.symbols.get(rank).map(String::as_str)
    }

    /// Rank of `symbol`, if present.
    pub fn position(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn source(&self) -> AlphabetSource {
        self.source
    }

    /// True when every entry is a single character, in which case symbol
    /// sequences can be written without separators.
    pub fn is_single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }
}
