use serde::{Deserialize, Serialize};

use super::TreeModel;
use crate::error::{Error, Result};
use crate::freewords::{Basis, CyclicWord, Letter, Word};
use crate::numeric::{format_rational, rational_from_json, Length, Rational};

/// The Bass–Serre tree of `F = ⟨S₁⟩ *_{⟨b⟩} ⟨S₂⟩`, where the two letter sets
/// share exactly the letter `b`. The basepoint is the vertex stabilized by
/// the basepoint side's factor.
#[derive(Clone, Debug)]
pub struct SplittingTree {
    basis: Basis,
    // side of each generator: 0 shared, 1 or 2 otherwise
    side: Vec<u8>,
    shared: usize,
    edge_length: Rational,
    basepoint_side: u8,
}

impl SplittingTree {
    pub fn new(
        basis: Basis,
        side1: &[usize],
        side2: &[usize],
        shared: usize,
        edge_length: Rational,
        basepoint_side: u8,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidModel(m.to_string()));
        let n = basis.rank();
        if shared >= n {
            return bad("shared letter outside the basis");
        }
        if edge_length <= Rational::from_integer(0) {
            return bad("edge length must be positive");
        }
        if basepoint_side != 1 && basepoint_side != 2 {
            return bad("basepoint side must be 1 or 2");
        }
        let mut side = vec![u8::MAX; n];
        for (s, letters) in [(1u8, side1), (2u8, side2)] {
            if !letters.contains(&shared) {
                return bad("each side must contain the shared letter");
            }
            for &i in letters {
                if i >= n {
                    return bad("side letter outside the basis");
                }
                if i == shared {
                    continue;
                }
                if side[i] != u8::MAX {
                    return bad("sides intersect beyond the shared letter");
                }
                side[i] = s;
            }
        }
        side[shared] = 0;
        if side.contains(&u8::MAX) {
            return bad("sides do not cover the basis");
        }
        for s in [1u8, 2] {
            if !side.contains(&s) {
                return bad("a side has no letter besides the shared one");
            }
        }
        Ok(SplittingTree {
            basis,
            side,
            shared,
            edge_length,
            basepoint_side,
        })
    }

    /// `⟨a,b⟩ *_{⟨b⟩} ⟨b,c⟩` on the basis `abc`.
    pub fn gamma_b(edge_length: Rational, basepoint_side: u8) -> Result<Self> {
        SplittingTree::new(
            Basis::from_chars("abc")?,
            &[0, 1],
            &[1, 2],
            1,
            edge_length,
            basepoint_side,
        )
    }

    pub fn side_of(&self, l: Letter) -> u8 {
        self.side[l.index()]
    }

    pub fn shared(&self) -> usize {
        self.shared
    }

    pub fn edge_length(&self) -> Rational {
        self.edge_length
    }

    pub fn basepoint_side(&self) -> u8 {
        self.basepoint_side
    }

    /// Sides of the non-shared letters in order.
    fn sides(&self, w: &Word) -> Vec<u8> {
        w.letters()
            .iter()
            .map(|&l| self.side_of(l))
            .filter(|&s| s != 0)
            .collect()
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let f: SplittingFile = serde_json::from_str(json)?;
        f.into_tree()
    }

    pub fn to_file(&self) -> SplittingFile {
        let pick = |s: u8| {
            (0..self.basis.rank())
                .filter(|&i| self.side[i] == s || i == self.shared)
                .map(|i| self.basis.symbols()[i].clone())
                .collect::<Vec<_>>()
                .join(" ")
        };
        SplittingFile {
            basis: Some(self.basis.symbols().join(" ")),
            side1: pick(1),
            side2: pick(2),
            shared: self.basis.symbols()[self.shared].clone(),
            edge_length: serde_json::Value::String(format_rational(&self.edge_length)),
            basepoint_side: self.basepoint_side,
        }
    }
}

impl TreeModel for SplittingTree {
    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn model_id(&self) -> String {
        let f = self.to_file();
        format!(
            "splitting:{}|{}|{}|{}|{}",
            f.side1.replace(' ', ""),
            f.side2.replace(' ', ""),
            f.shared,
            format_rational(&self.edge_length),
            self.basepoint_side
        )
    }

    fn translation_length(&self, w: &CyclicWord) -> Length {
        let s = self.sides(w.word());
        let n = s.len();
        let alternations = (0..n).filter(|&i| s[i] != s[(i + 1) % n]).count() as i64;
        Length::Exact(self.edge_length * alternations)
    }

    fn displacement(&self, w: &Word) -> Length {
        let s = self.sides(w);
        let far = 3 - self.basepoint_side;
        let blocks = (0..s.len())
            .filter(|&i| s[i] == far && (i == 0 || s[i - 1] != far))
            .count() as i64;
        Length::Exact(self.edge_length * (2 * blocks))
    }

    fn is_free_simplicial(&self) -> Option<bool> {
        Some(false)
    }
}

/// On-disk form of a splitting tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplittingFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    pub side1: String,
    pub side2: String,
    pub shared: String,
    pub edge_length: serde_json::Value,
    pub basepoint_side: u8,
}

impl SplittingFile {
    pub fn into_tree(self) -> Result<SplittingTree> {
        let basis = match &self.basis {
            Some(b) => Basis::parse(b)?,
            None => {
                let mut syms: Vec<String> = Vec::new();
                for side in [&self.side1, &self.side2] {
                    for s in split_symbols(side) {
                        if !syms.contains(&s) {
                            syms.push(s);
                        }
                    }
                }
                Basis::new("", syms)?
            }
        };
        let idx = |s: &str| {
            basis
                .index_of(s)
                .ok_or_else(|| Error::Format(format!("unknown letter {s}")))
        };
        let side1 = split_symbols(&self.side1)
            .iter()
            .map(|s| idx(s))
            .collect::<Result<Vec<_>>>()?;
        let side2 = split_symbols(&self.side2)
            .iter()
            .map(|s| idx(s))
            .collect::<Result<Vec<_>>>()?;
        let shared = idx(self.shared.trim())?;
        SplittingTree::new(
            basis,
            &side1,
            &side2,
            shared,
            rational_from_json(&self.edge_length)?,
            self.basepoint_side,
        )
    }
}

fn split_symbols(s: &str) -> Vec<String> {
    if s.contains(|c: char| c.is_whitespace() || c == ',') {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    } else {
        s.chars().map(|c| c.to_string()).collect()
    }
}
