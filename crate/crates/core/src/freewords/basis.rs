use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Letter, Word};
use crate::error::{Error, Result};

/// A named, ordered free basis. Letter `i` of the basis is generator `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basis {
    name: String,
    letters: Vec<String>,
}

fn valid_symbol(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_') && !s.chars().next().unwrap().is_ascii_digit()
}

impl Basis {
    pub fn new<S: Into<String>>(name: S, letters: Vec<String>) -> Result<Self> {
        if letters.len() < 2 {
            return Err(Error::Format(format!(
                "a basis needs at least two letters, got {}",
                letters.len()
            )));
        }
        for (i, l) in letters.iter().enumerate() {
            if !valid_symbol(l) {
                return Err(Error::Format(format!("invalid letter symbol {l:?}")));
            }
            if letters[..i].contains(l) {
                return Err(Error::Format(format!("duplicate letter {l:?}")));
            }
        }
        if letters.len() > i16::MAX as usize - 1 {
            return Err(Error::Format("basis too large".into()));
        }
        Ok(Basis {
            name: name.into(),
            letters,
        })
    }

    /// Basis whose letters are the characters of `s`, e.g. `"abc"`.
    pub fn from_chars(s: &str) -> Result<Self> {
        Basis::new(s, s.chars().map(|c| c.to_string()).collect())
    }

    /// Parses either the compact form `"abc"` or a whitespace/comma separated
    /// list `"x1 x2 x3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(|c: char| c.is_whitespace() || c == ',') {
            let letters = s
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect();
            Basis::new(s, letters)
        } else {
            Basis::from_chars(s)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.letters.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.letters
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.letters[letter.index()]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == symbol)
    }

    /// Same letters, possibly under another name.
    pub fn compatible(&self, other: &Basis) -> bool {
        self.letters == other.letters
    }

    fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Parses a raw (not necessarily reduced) letter sequence.
    ///
    /// Tokens are separated by whitespace; a trailing `'` or `^-1` marks an
    /// inverse. When every letter of the basis is a single character the
    /// separators may be omitted (`"bab'"`). The empty string, `"1"` and `"ε"`
    /// denote the identity.
    pub fn parse_letters(&self, s: &str) -> Result<Vec<Letter>> {
        let s = s.trim();
        if s.is_empty() || s == "1" || s == "ε" {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for token in s.split_whitespace() {
            if let Some(l) = self.parse_token(token)? {
                out.push(l);
            } else if self.single_char() {
                self.parse_compact(token, &mut out)?;
            } else {
                return Err(Error::Format(format!("unknown letter {token:?}")));
            }
        }
        Ok(out)
    }

    fn parse_token(&self, token: &str) -> Result<Option<Letter>> {
        let (body, inverse) = if let Some(b) = token.strip_suffix("^-1") {
            (b, true)
        } else if let Some(b) = token.strip_suffix('\'') {
            (b, true)
        } else {
            (token, false)
        };
        Ok(self.index_of(body).map(|i| {
            let l = Letter::generator(i);
            if inverse {
                l.inverse()
            } else {
                l
            }
        }))
    }

    fn parse_compact(&self, token: &str, out: &mut Vec<Letter>) -> Result<()> {
        let chars: Vec<char> = token.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let sym = chars[i].to_string();
            let idx = self
                .index_of(&sym)
                .ok_or_else(|| Error::Format(format!("unknown letter {sym:?} in {token:?}")))?;
            let mut l = Letter::generator(idx);
            i += 1;
            if i < chars.len() && chars[i] == '\'' {
                l = l.inverse();
                i += 1;
            } else if chars[i..].starts_with(&['^', '-', '1']) {
                l = l.inverse();
                i += 3;
            }
            out.push(l);
        }
        Ok(())
    }

    /// Parses and freely reduces.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Ok(Word::reduce(self.parse_letters(s)?))
    }

    pub fn format_letters(&self, letters: &[Letter]) -> String {
        letters
            .iter()
            .map(|&l| {
                let s = self.symbol(l);
                if l.is_inverse() {
                    format!("{s}'")
                } else {
                    s.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.format_letters(w.letters())
    }

    /// Rejects words using generators beyond the rank.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| l.index() >= self.rank()) {
            Some(l) => Err(Error::BasisMismatch(format!(
                "generator index {} outside basis {:?} of rank {}",
                l.index(),
                self.name,
                self.rank()
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.single_char() {
            write!(f, "{}", self.letters.concat())
        } else {
            write!(f, "{}", self.letters.join(" "))
        }
    }
}
