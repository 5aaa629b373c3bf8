//! Automorphisms given by generator images, bounded cancellation and the
//! chop operator.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::enumerate::reduced_words;
use crate::freewords::{Basis, Letter, Ray, Word};

/// An automorphism (or, without inverse images, an endomorphism) of the free
/// group, from words over `source` to words over `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    source: Basis,
    target: Basis,
    images: Vec<Word>,
    inverse_images: Option<Vec<Word>>,
}

impl Automorphism {
    pub fn new(source: Basis, target: Basis, images: Vec<Word>, inverse_images: Option<Vec<Word>>) -> Result<Self> {
        if source.rank() != target.rank() {
            return Err(Error::BasisMismatch(format!(
                "source rank {} differs from target rank {}",
                source.rank(),
                target.rank()
            )));
        }
        if images.len() != source.rank() {
            return Err(Error::Format(format!(
                "expected {} images, got {}",
                source.rank(),
                images.len()
            )));
        }
        for w in &images {
            target.check_word(w)?;
        }
        if let Some(inv) = &inverse_images {
            if inv.len() != target.rank() {
                return Err(Error::Format("inverse images have the wrong length".into()));
            }
            for w in inv {
                source.check_word(w)?;
            }
        }
        let a = Automorphism {
            source,
            target,
            images,
            inverse_images,
        };
        if let Some(inv) = &a.inverse_images {
            for i in 0..a.source.rank() {
                let x = Word::letter(Letter::generator(i));
                if substitute(inv, &substitute(&a.images, &x)) != x {
                    return Err(Error::NonInvertible(format!(
                        "inverse images do not undo generator {}",
                        a.source.symbols()[i]
                    )));
                }
            }
            for i in 0..a.target.rank() {
                let y = Word::letter(Letter::generator(i));
                if substitute(&a.images, &substitute(inv, &y)) != y {
                    return Err(Error::NonInvertible(format!(
                        "images do not undo inverse image of {}",
                        a.target.symbols()[i]
                    )));
                }
            }
        }
        Ok(a)
    }

    pub fn identity(basis: &Basis) -> Self {
        let gens: Vec<Word> = (0..basis.rank()).map(|i| Word::letter(Letter::generator(i))).collect();
        Automorphism {
            source: basis.clone(),
            target: basis.clone(),
            images: gens.clone(),
            inverse_images: Some(gens),
        }
    }

    /// Builds from textual images, e.g. `&["b a b'", "b", "c"]`.
    pub fn parse(basis: &Basis, images: &[&str], inverse_images: Option<&[&str]>) -> Result<Self> {
        let parse_all = |v: &[&str]| -> Result<Vec<Word>> { v.iter().map(|s| basis.parse_word(s)).collect() };
        let inv = match inverse_images {
            Some(v) => Some(parse_all(v)?),
            None => None,
        };
        Automorphism::new(basis.clone(), basis.clone(), parse_all(images)?, inv)
    }

    pub fn source(&self) -> &Basis {
        &self.source
    }

    pub fn target(&self) -> &Basis {
        &self.target
    }

    pub fn rank(&self) -> usize {
        self.source.rank()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> Option<&[Word]> {
        self.inverse_images.as_deref()
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.source.check_word(w)?;
        Ok(substitute(&self.images, w))
    }

    /// `apply` on a word already known to be over the source basis.
    pub fn apply_unchecked(&self, w: &Word) -> Word {
        substitute(&self.images, w)
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        let inv = self
            .inverse_images
            .clone()
            .ok_or_else(|| Error::NonInvertible("no inverse images supplied".into()))?;
        Ok(Automorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            images: inv,
            inverse_images: Some(self.images.clone()),
        })
    }

    /// Image of an eventually periodic ray: `α(u · v^∞) = α(u) · α(v)^∞`.
    pub fn apply_ray(&self, r: &Ray) -> Result<Ray> {
        Ray::new(&self.apply(r.prefix())?, &self.apply(r.period())?)
    }

    /// Largest image length, the Lipschitz constant of the rewriting.
    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Stable content hash of the generator images, used as a cache key.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.source.to_string().as_bytes());
        h.update([0u8]);
        h.update(self.target.to_string().as_bytes());
        for w in &self.images {
            h.update([0xffu8]);
            for l in w.letters() {
                h.update(l.code().to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..12])
    }
}

pub(crate) fn substitute(images: &[Word], w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        let img = &images[l.index()];
        if l.is_inverse() {
            for &x in img.letters().iter().rev() {
                crate::freewords::word_push(&mut out, x.inverse());
            }
        } else {
            for &x in img.letters() {
                crate::freewords::word_push(&mut out, x);
            }
        }
    }
    Word::from_reduced(out)
}

/// `α ∘ β`: first `β`, then `α`.
pub fn compose(alpha: &Automorphism, beta: &Automorphism) -> Result<Automorphism> {
    if !beta.target.compatible(&alpha.source) {
        return Err(Error::BasisMismatch(format!(
            "cannot compose: {} is not {}",
            beta.target, alpha.source
        )));
    }
    let images = beta.images.iter().map(|w| substitute(&alpha.images, w)).collect();
    let inverse_images = match (&alpha.inverse_images, &beta.inverse_images) {
        (Some(ai), Some(bi)) => Some(alpha_inv_then_beta_inv(ai, bi)),
        _ => None,
    };
    Ok(Automorphism {
        source: beta.source.clone(),
        target: alpha.target.clone(),
        images,
        inverse_images,
    })
}

fn alpha_inv_then_beta_inv(alpha_inv: &[Word], beta_inv: &[Word]) -> Vec<Word> {
    alpha_inv.iter().map(|w| substitute(beta_inv, w)).collect()
}

/// `α^k` for `k ≥ 0`; negative powers use the supplied inverse.
pub fn power(alpha: &Automorphism, k: i64) -> Result<Automorphism> {
    let base = if k < 0 { alpha.inverse()? } else { alpha.clone() };
    let mut out = Automorphism::identity(&alpha.source);
    for _ in 0..k.unsigned_abs() {
        out = compose(&base, &out)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `Σ_x |α(x)|`, sound for all depths.
    UpperBound,
    /// Maximum observed cancellation over every pair at the checked depth.
    ExactUpToDepth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationBound {
    pub value: usize,
    pub kind: BoundKind,
    pub depth_checked: usize,
}

/// Cooper's bound estimated two ways. With `depth == 0` only the cheap bound
/// `Σ_x |α(x)|` is returned; otherwise the maximum cancellation in
/// `α(u)·α(v)` over all reduced products `u·v` with `|u|, |v| ≤ depth`.
pub fn cancellation_bound(alpha: &Automorphism, depth: usize) -> Result<CancellationBound> {
    if !alpha.is_invertible() {
        return Err(Error::NonInvertible("cancellation bound needs inverse images".into()));
    }
    if depth == 0 {
        return Ok(CancellationBound {
            value: cheap_bound(alpha),
            kind: BoundKind::UpperBound,
            depth_checked: 0,
        });
    }
    Ok(CancellationBound {
        value: max_cancellation(alpha, depth),
        kind: BoundKind::ExactUpToDepth,
        depth_checked: depth,
    })
}

pub fn cheap_bound(alpha: &Automorphism) -> usize {
    alpha.images.iter().map(Word::len).sum()
}

/// The cancellation in `α(u)·α(v)` for reduced `u·v` equals the longest
/// common prefix of `α(u⁻¹)` and `α(v)`, where `u⁻¹` and `v` start with
/// different letters. So the maximum over all pairs is the maximum common
/// prefix between images of words with different first letters; sorting all
/// images puts a maximizing pair next to each other.
fn max_cancellation(alpha: &Automorphism, depth: usize) -> usize {
    let rank = alpha.rank();
    let mut images: Vec<(Vec<i16>, u16)> = (1..=depth)
        .into_par_iter()
        .flat_map_iter(|n| {
            reduced_words(rank, n).into_iter().map(|w| {
                let first = w.first().expect("nonempty").key();
                let img = alpha.apply_unchecked(&w);
                (img.letters().iter().map(|l| l.key() as i16).collect(), first)
            })
        })
        .collect();
    images.par_sort_unstable();
    images
        .par_windows(2)
        .filter(|p| p[0].1 != p[1].1)
        .map(|p| p[0].0.iter().zip(&p[1].0).take_while(|(x, y)| x == y).count())
        .max()
        .unwrap_or(0)
}

/// Direct pairwise search, used to cross-check `max_cancellation`.
pub fn max_cancellation_pairwise(alpha: &Automorphism, depth: usize) -> usize {
    let rank = alpha.rank();
    let words: Vec<Word> = (1..=depth).flat_map(|n| reduced_words(rank, n)).collect();
    let images: Vec<Word> = words.iter().map(|w| alpha.apply_unchecked(w)).collect();
    let mut best = 0;
    for (u, au) in words.iter().zip(&images) {
        for (v, av) in words.iter().zip(&images) {
            if u.last() == v.first().map(Letter::inverse) {
                continue;
            }
            best = best.max(au.cancellation_with(av));
        }
    }
    best
}

/// `w†_k`.
pub fn chop(w: &Word, k: usize) -> Word {
    w.chop(k)
}

/// Constants of the chop transfer between a basis `A` and a basis `B`, where
/// `to_a` rewrites `B`-words as `A`-words: `C` bounds cancellation of `to_a`,
/// `C'` that of its inverse, and `C'' = C' + λ C` with `λ` the longest
/// `B`-expression of an `A`-letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChopConstants {
    pub c: usize,
    pub c_prime: usize,
    pub c_double_prime: usize,
}

pub fn chop_constants(to_a: &Automorphism, depth: usize) -> Result<ChopConstants> {
    let to_b = to_a.inverse()?;
    let c = cancellation_bound(to_a, depth)?.value;
    let c_prime = cancellation_bound(&to_b, depth)?.value;
    let lambda = to_b.max_image_len();
    Ok(ChopConstants {
        c,
        c_prime,
        c_double_prime: c_prime + lambda * c,
    })
}

/// Checks one instance of the chop transfer: if `(to_a(u_b))†_C` is a factor
/// of `w_a`, then `u_b†_{C''}` must be a factor of `(to_a⁻¹(w_a))†_{C'}`.
/// Returns `None` when the hypothesis fails.
pub fn chop_transfer_holds(
    to_a: &Automorphism,
    consts: &ChopConstants,
    u_b: &Word,
    w_a: &Word,
) -> Result<Option<bool>> {
    let v_a = to_a.apply(u_b)?.chop(consts.c);
    if !v_a.is_factor_of(w_a) {
        return Ok(None);
    }
    let w_b = to_a.inverse()?.apply(w_a)?;
    Ok(Some(
        u_b.chop(consts.c_double_prime).is_factor_of(&w_b.chop(consts.c_prime)),
    ))
}

/// JSON file form of an automorphism.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismFile {
    pub source: String,
    pub target: String,
    pub images: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_images: Option<BTreeMap<String, String>>,
}

impl AutomorphismFile {
    pub fn into_automorphism(self) -> Result<Automorphism> {
        let source = Basis::parse(&self.source)?;
        let target = Basis::parse(&self.target)?;
        let lookup = |map: &BTreeMap<String, String>, from: &Basis, to: &Basis| -> Result<Vec<Word>> {
            if map.len() != from.rank() {
                return Err(Error::Format(format!(
                    "expected images for {} letters, got {}",
                    from.rank(),
                    map.len()
                )));
            }
            from.symbols()
                .iter()
                .map(|s| {
                    let img = map
                        .get(s)
                        .ok_or_else(|| Error::Format(format!("missing image for {s:?}")))?;
                    to.parse_word(img)
                })
                .collect()
        };
        let images = lookup(&self.images, &source, &target)?;
        let inverse = match &self.inverse_images {
            Some(m) => Some(lookup(m, &target, &source)?),
            None => None,
        };
        Automorphism::new(source, target, images, inverse)
    }

    pub fn from_automorphism(a: &Automorphism) -> Self {
        let map = |from: &Basis, to: &Basis, imgs: &[Word]| -> BTreeMap<String, String> {
            from.symbols()
                .iter()
                .zip(imgs)
                .map(|(s, w)| (s.clone(), to.format_word(w)))
                .collect()
        };
        AutomorphismFile {
            source: a.source.to_string(),
            target: a.target.to_string(),
            images: map(&a.source, &a.target, &a.images),
            inverse_images: a.inverse_images.as_ref().map(|inv| map(&a.target, &a.source, inv)),
        }
    }
}

/// The Dehn twist `a ↦ b a b⁻¹, b ↦ b, c ↦ c` on `F(a, b, c)`.
pub fn dehn_twist() -> Automorphism {
    let b = Basis::from_chars("abc").expect("valid basis");
    Automorphism::parse(&b, &["b a b'", "b", "c"], Some(&["b' a b", "b", "c"])).expect("valid twist")
}

/// The tribonacci substitution `a ↦ ab, b ↦ ac, c ↦ a`.
pub fn tribonacci() -> Automorphism {
    let b = Basis::from_chars("abc").expect("valid basis");
    Automorphism::parse(&b, &["a b", "a c", "a"], Some(&["c", "c' a", "c' b"])).expect("valid substitution")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Basis::from_chars("abc").unwrap().parse_word(s).unwrap()
    }

    #[test]
    fn apply_dehn_twist() {
        let d = dehn_twist();
        assert_eq!(d.apply(&w("ac")).unwrap(), w("b a b' c"));
        let dd = compose(&d, &d).unwrap();
        assert_eq!(dd.apply(&w("a")).unwrap(), w("b b a b' b'"));
        let id = Automorphism::identity(d.source());
        assert_eq!(compose(&d, &id).unwrap(), d);
    }

    #[test]
    fn rejects_bad_inverse() {
        let b = Basis::from_chars("abc").unwrap();
        assert!(matches!(
            Automorphism::parse(&b, &["b a b'", "b", "c"], Some(&["b a b'", "b", "c"])),
            Err(Error::NonInvertible(_))
        ));
    }

    #[test]
    fn basis_mismatch() {
        let d = dehn_twist();
        let x = Word::letter(Letter::generator(5));
        assert!(matches!(d.apply(&x), Err(Error::BasisMismatch(_))));
        let b2 = Basis::from_chars("xy").unwrap();
        let other = Automorphism::identity(&b2);
        assert!(compose(&d, &other).is_err());
    }

    #[test]
    fn cancellation_bounds() {
        let d = dehn_twist();
        assert_eq!(cancellation_bound(&d, 0).unwrap().value, 5);
        let id = Automorphism::identity(d.source());
        assert_eq!(cancellation_bound(&id, 6).unwrap().value, 0);
        for depth in 1..=4 {
            assert_eq!(max_cancellation(&d, depth), max_cancellation_pairwise(&d, depth));
            let t = tribonacci();
            assert_eq!(max_cancellation(&t, depth), max_cancellation_pairwise(&t, depth));
        }
        let b = Basis::from_chars("abc").unwrap();
        let nonin = Automorphism::parse(&b, &["a", "b", "c"], None).unwrap();
        assert!(cancellation_bound(&nonin, 2).is_err());
    }

    #[test]
    fn tribonacci_lengths() {
        let t = tribonacci();
        let mut lens = Vec::new();
        for k in 0..=15 {
            lens.push(power(&t, k).unwrap().apply(&w("a")).unwrap().len());
        }
        assert_eq!(&lens[..4], &[1, 2, 4, 7]);
        for k in 3..lens.len() {
            assert_eq!(lens[k], lens[k - 1] + lens[k - 2] + lens[k - 3]);
        }
    }

    #[test]
    fn file_roundtrip() {
        let f = AutomorphismFile::from_automorphism(&dehn_twist());
        let s = serde_json::to_string(&f).unwrap();
        let back: AutomorphismFile = serde_json::from_str(&s).unwrap();
        assert_eq!(back.into_automorphism().unwrap(), dehn_twist());
    }
}
