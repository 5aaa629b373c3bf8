//! Limit trees of train track automorphisms: lengths are the limits of
//! `λ^{-k} ℓ(α^k(w))` for the Perron–Frobenius metric on the rose.

mod cache;
mod pf;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cache::IterateCache;
pub use pf::{is_primitive, pf_data, residual};

use crate::basischange::{Automorphism, AutomorphismFile};
use crate::error::{Error, Result};
use crate::freewords::{Basis, CyclicWord, Letter, Word};
use crate::numeric::Length;
use crate::treemodels::TreeModel;

pub const DEFAULT_KMAX: usize = 40;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Longest generator image of `α^k` read from the iterate cache; deeper
/// levels are walked letter by letter.
const STORED_ITERATE_LETTERS: u128 = 1 << 14;

/// A rose-to-rose train track representative with its transition matrix.
#[derive(Clone, Debug)]
pub struct TrainTrackSpec {
    automorphism: Automorphism,
    matrix: Vec<Vec<u64>>,
    certified: bool,
}

impl TrainTrackSpec {
    /// Positive automorphisms are train tracks on the rose; anything else
    /// must be certified by the caller.
    pub fn new(automorphism: Automorphism, matrix: Option<Vec<Vec<u64>>>, certified: bool) -> Result<Self> {
        if !automorphism.is_invertible() {
            return Err(Error::NonInvertible("train track needs inverse images".into()));
        }
        let computed = transition_matrix(&automorphism);
        if let Some(m) = matrix {
            if m != computed {
                return Err(Error::InvalidModel(
                    "transition matrix does not match the automorphism images".into(),
                ));
            }
        }
        let positive = automorphism
            .images()
            .iter()
            .all(|w| w.letters().iter().all(|l| !l.is_inverse()));
        if !positive && !certified {
            return Err(Error::InvalidModel(
                "automorphism is not positive and not certified as a train track".into(),
            ));
        }
        if !is_primitive(&computed) {
            return Err(Error::NotPrimitive);
        }
        Ok(TrainTrackSpec {
            automorphism,
            matrix: computed,
            certified: certified || positive,
        })
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.automorphism
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let f: TrainTrackFile = serde_json::from_str(json)?;
        TrainTrackSpec::new(f.automorphism.into_automorphism()?, f.matrix, f.train_track)
    }
}

/// `M[i][j]` = occurrences of `i^{±1}` in the image of `j`.
pub fn transition_matrix(alpha: &Automorphism) -> Vec<Vec<u64>> {
    let n = alpha.rank();
    let mut m = vec![vec![0u64; n]; n];
    for (j, img) in alpha.images().iter().enumerate() {
        for l in img.letters() {
            m[l.index()][j] += 1;
        }
    }
    m
}

/// On-disk form of a train track spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainTrackFile {
    pub automorphism: AutomorphismFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub train_track: bool,
}

/// The limit tree `T_α` with basepoint the image of the rose's vertex.
pub struct LimitTree {
    spec: TrainTrackSpec,
    lambda: f64,
    lengths: Vec<f64>,
    k_max: usize,
    tol: f64,
    // |α^i(x)| for i ≤ k_max, saturating
    letter_counts: Vec<Vec<u128>>,
    // directions x, y form an illegal turn iff illegal[key(x)][key(y)]
    illegal: Vec<Vec<bool>>,
    cache: Arc<IterateCache>,
}

/// An approximation together with its stopping data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub value: f64,
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LimitTree {
    pub fn new(spec: TrainTrackSpec, k_max: usize, tol: f64, cache_dir: Option<&Path>) -> Result<Self> {
        if tol <= 0.0 || k_max == 0 {
            return Err(Error::InvalidParameter("k_max and tol must be positive".into()));
        }
        let (lambda, lengths) = pf_data(&spec.matrix)?;
        if lambda <= 1.0 {
            return Err(Error::InvalidModel(format!("growth rate {lambda} is not > 1")));
        }
        let alpha = spec.automorphism.clone();
        let n = alpha.rank();
        let mut letter_counts = vec![vec![1u128; n]];
        for i in 1..=k_max + 1 {
            let prev = &letter_counts[i - 1];
            let row = alpha
                .images()
                .iter()
                .map(|img| {
                    img.letters()
                        .iter()
                        .fold(0u128, |s, l| s.saturating_add(prev[l.index()]))
                })
                .collect();
            letter_counts.push(row);
        }
        let illegal = illegal_turns(&alpha);
        Ok(LimitTree {
            cache: Arc::new(IterateCache::new(alpha, cache_dir)),
            spec,
            lambda,
            lengths,
            k_max,
            tol,
            letter_counts,
            illegal,
        })
    }

    pub fn with_defaults(spec: TrainTrackSpec) -> Result<Self> {
        LimitTree::new(spec, DEFAULT_KMAX, DEFAULT_TOL, None)
    }

    pub fn tribonacci() -> Self {
        let spec = TrainTrackSpec::new(crate::basischange::tribonacci(), None, false).expect("positive");
        LimitTree::with_defaults(spec).expect("primitive")
    }

    pub fn spec(&self) -> &TrainTrackSpec {
        &self.spec
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Edge lengths of the rose (the normalized left eigenvector).
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn cache(&self) -> &Arc<IterateCache> {
        &self.cache
    }

    /// Generator images of `α^k` from the iterate cache, while they are short
    /// enough to keep in memory.
    fn stored_images(&self, k: usize) -> Option<Arc<Vec<Word>>> {
        let longest = self.letter_counts[k].iter().copied().max().unwrap_or(0);
        if k == 0 || longest > STORED_ITERATE_LETTERS {
            return None;
        }
        self.cache.images(k).ok()
    }

    /// Metric length of a word on the rose.
    pub fn word_length(&self, w: &Word) -> f64 {
        w.letters().iter().map(|l| self.lengths[l.index()]).sum()
    }

    fn is_illegal(&self, x: Letter, y: Letter) -> bool {
        self.illegal[x.key() as usize][y.key() as usize]
    }

    /// Splits a word into maximal legal pieces (cut at illegal turns).
    fn legal_pieces(&self, w: &[Letter]) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..w.len() {
            if self.is_illegal(w[i - 1].inverse(), w[i]) {
                out.push(Segment::new(w[start..i].to_vec(), &self.lengths));
                start = i;
            }
        }
        if start < w.len() {
            out.push(Segment::new(w[start..].to_vec(), &self.lengths));
        }
        out
    }

    /// `λ^{-k} ℓ(α^k(w))` to the stopping rule; cyclic reduction if `cyclic`.
    pub fn iterate(&self, w: &Word, cyclic: bool) -> IterationReport {
        if w.is_empty() {
            return IterationReport {
                value: 0.0,
                error: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        let mut segs = self.legal_pieces(w.letters());
        let mut ev = Evaluator { tree: self, k: 0 };
        if cyclic {
            ev.reduce_cyclic(&mut segs);
        }
        let mut prev = ev.value(&segs);
        if !ev.has_illegal_junction(&segs, cyclic) {
            return IterationReport {
                value: prev,
                error: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        let mut last_delta = f64::INFINITY;
        for k in 1..=self.k_max {
            for s in segs.iter_mut() {
                ev.advance(s);
            }
            ev.k = k;
            segs = ev.reduce_linear(segs);
            if cyclic {
                ev.reduce_cyclic(&mut segs);
            }
            let value = ev.value(&segs);
            let delta = (value - prev).abs();
            prev = value;
            last_delta = delta;
            if !ev.has_illegal_junction(&segs, cyclic) {
                // legal from here on: the normalized length is constant
                return IterationReport {
                    value,
                    error: delta,
                    iterations: k,
                    converged: true,
                };
            }
            if delta > 0.0 && delta < self.tol * value.abs() {
                return IterationReport {
                    value,
                    error: delta,
                    iterations: k,
                    converged: true,
                };
            }
        }
        IterationReport {
            value: prev,
            error: last_delta,
            iterations: self.k_max,
            converged: false,
        }
    }

    fn length_of(&self, r: IterationReport) -> Length {
        Length::Approx {
            value: r.value,
            error: r.error,
            converged: r.converged,
        }
    }
}

/// Directions are letters `x` (leaving along `x`). The turn `(x, y)` is
/// illegal iff some iterate of the derivative identifies the directions.
fn illegal_turns(alpha: &Automorphism) -> Vec<Vec<bool>> {
    let n = alpha.rank();
    let dirs: Vec<Letter> = Letter::all(n).collect();
    let df = |d: Letter| -> Letter {
        let img = alpha.image(d.index());
        if d.is_inverse() {
            img.last().expect("nonempty image").inverse()
        } else {
            img.first().expect("nonempty image")
        }
    };
    let mut table = vec![vec![false; 2 * n]; 2 * n];
    for &x in &dirs {
        for &y in &dirs {
            let (mut a, mut b) = (x, y);
            for _ in 0..=2 * n {
                if a == b {
                    table[x.key() as usize][y.key() as usize] = true;
                    break;
                }
                a = df(a);
                b = df(b);
            }
        }
    }
    table
}

/// `α^k(base)` with `skip_left` / `skip_right` letters cancelled at the ends.
/// `base` is legal, so its iterates are reduced and never need expanding.
#[derive(Clone, Debug)]
struct Segment {
    base: Vec<Letter>,
    base_length: f64,
    skip_left: u128,
    skip_right: u128,
    // normalized length of the cancelled letters, λ^{-j}·ℓ summed over levels j
    skipped: f64,
}

impl Segment {
    fn new(base: Vec<Letter>, lengths: &[f64]) -> Self {
        let base_length = base.iter().map(|l| lengths[l.index()]).sum();
        Segment {
            base,
            base_length,
            skip_left: 0,
            skip_right: 0,
            skipped: 0.0,
        }
    }
}

struct Evaluator<'a> {
    tree: &'a LimitTree,
    k: usize,
}

impl Evaluator<'_> {
    fn len_of(&self, l: Letter, level: usize) -> u128 {
        self.tree.letter_counts[level][l.index()]
    }

    fn full_len(&self, s: &Segment) -> u128 {
        s.base
            .iter()
            .fold(0u128, |a, &l| a.saturating_add(self.len_of(l, self.k)))
    }

    fn live_len(&self, s: &Segment) -> u128 {
        self.full_len(s) - s.skip_left - s.skip_right
    }

    /// Letter at position `idx` of `α^k(base)`.
    fn letter_at(&self, s: &Segment, mut idx: u128) -> Letter {
        let mut cur = None;
        for &l in &s.base {
            let n = self.len_of(l, self.k);
            if idx < n {
                cur = Some(l);
                break;
            }
            idx -= n;
        }
        let mut l = cur.expect("index inside segment");
        if let Some(imgs) = self.tree.stored_images(self.k) {
            let img = imgs[l.index()].letters();
            let i = idx as usize;
            return if l.is_inverse() {
                img[img.len() - 1 - i].inverse()
            } else {
                img[i]
            };
        }
        let images = self.tree.spec.automorphism.images();
        for level in (1..=self.k).rev() {
            let img = images[l.index()].letters();
            let inv = l.is_inverse();
            let mut found = None;
            let iter: Box<dyn Iterator<Item = &Letter>> = if inv {
                Box::new(img.iter().rev())
            } else {
                Box::new(img.iter())
            };
            for &y in iter {
                let y = if inv { y.inverse() } else { y };
                let n = self.len_of(y, level - 1);
                if idx < n {
                    found = Some(y);
                    break;
                }
                idx -= n;
            }
            l = found.expect("index inside image");
        }
        l
    }

    fn first(&self, s: &Segment) -> Letter {
        self.letter_at(s, s.skip_left)
    }

    fn last(&self, s: &Segment) -> Letter {
        self.letter_at(s, self.full_len(s) - s.skip_right - 1)
    }

    fn has_illegal_junction(&self, segs: &[Segment], cyclic: bool) -> bool {
        let n = segs.len();
        if n == 0 {
            return false;
        }
        let junctions = if cyclic { n } else { n - 1 };
        (0..junctions).any(|i| {
            let (a, b) = (&segs[i], &segs[(i + 1) % n]);
            self.tree.is_illegal(self.last(a).inverse(), self.first(b))
        })
    }

    fn value(&self, segs: &[Segment]) -> f64 {
        segs.iter().map(|s| s.base_length - s.skipped).sum()
    }

    fn weight(&self, l: Letter) -> f64 {
        self.tree.lengths[l.index()] * self.tree.lambda.powi(-(self.k as i32))
    }

    /// `Σ |α(y_i)|` over the first `idx` letters `y_i` of `α^k(base)`.
    fn image_prefix_len(&self, base: &[Letter], mut idx: u128) -> u128 {
        let k = self.k;
        let mut acc = 0u128;
        let mut cur = None;
        for &l in base {
            let n = self.len_of(l, k);
            if idx < n {
                cur = Some(l);
                break;
            }
            acc = acc.saturating_add(self.len_of(l, k + 1));
            idx -= n;
        }
        let Some(mut l) = cur else {
            return acc;
        };
        let images = self.tree.spec.automorphism.images();
        for level in (1..=k).rev() {
            let img = images[l.index()].letters();
            let inv = l.is_inverse();
            let mut next = None;
            for i in 0..img.len() {
                let y = if inv { img[img.len() - 1 - i].inverse() } else { img[i] };
                let n = self.len_of(y, level - 1);
                if idx < n {
                    next = Some(y);
                    break;
                }
                acc = acc.saturating_add(self.len_of(y, level));
                idx -= n;
            }
            l = next.expect("index inside image");
        }
        acc
    }

    /// Re-expresses the cancelled ends of a level-`k` segment at level `k+1`.
    fn advance(&self, s: &mut Segment) {
        let full = self.full_len(s);
        let full_next = s
            .base
            .iter()
            .fold(0u128, |a, &l| a.saturating_add(self.len_of(l, self.k + 1)));
        let left = self.image_prefix_len(&s.base, s.skip_left);
        let right = full_next - self.image_prefix_len(&s.base, full - s.skip_right);
        s.skip_left = left;
        s.skip_right = right;
    }

    /// Free reduction across segment junctions.
    fn reduce_linear(&self, segs: Vec<Segment>) -> Vec<Segment> {
        let mut out: Vec<Segment> = Vec::with_capacity(segs.len());
        for mut s in segs {
            while let Some(top) = out.last_mut() {
                if self.live_len(&s) == 0 {
                    break;
                }
                let (x, y) = (self.last(top), self.first(&s));
                if x != y.inverse() {
                    break;
                }
                top.skip_right += 1;
                top.skipped += self.weight(x);
                s.skip_left += 1;
                s.skipped += self.weight(y);
                if self.live_len(top) == 0 {
                    out.pop();
                }
            }
            if self.live_len(&s) > 0 {
                out.push(s);
            }
        }
        out
    }

    /// Cyclic reduction between the last and the first segment.
    fn reduce_cyclic(&self, segs: &mut Vec<Segment>) {
        loop {
            let n = segs.len();
            if n == 0 {
                return;
            }
            if n == 1 {
                let s = &mut segs[0];
                while self.live_len(s) >= 2 {
                    let (x, y) = (self.last(s), self.first(s));
                    if x != y.inverse() {
                        break;
                    }
                    s.skip_left += 1;
                    s.skip_right += 1;
                    s.skipped += self.weight(x) + self.weight(y);
                }
                return;
            }
            let (x, y) = (self.last(&segs[n - 1]), self.first(&segs[0]));
            if x != y.inverse() {
                return;
            }
            segs[n - 1].skip_right += 1;
            segs[n - 1].skipped += self.weight(x);
            segs[0].skip_left += 1;
            segs[0].skipped += self.weight(y);
            if self.live_len(&segs[n - 1]) == 0 {
                segs.pop();
            }
            if !segs.is_empty() && self.live_len(&segs[0]) == 0 {
                segs.remove(0);
            }
        }
    }
}

impl TreeModel for LimitTree {
    fn basis(&self) -> &Basis {
        self.spec.automorphism.source()
    }

    fn model_id(&self) -> String {
        format!(
            "limit:{}:k{}:tol{:e}",
            self.spec.automorphism.content_hash(),
            self.k_max,
            self.tol
        )
    }

    fn translation_length(&self, w: &CyclicWord) -> Length {
        self.length_of(self.iterate(w.word(), true))
    }

    fn displacement(&self, w: &Word) -> Length {
        self.length_of(self.iterate(w, false))
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn tolerance(&self) -> f64 {
        self.tol
    }

    /// The normalized volume of the rose.
    fn bbt_bound(&self) -> Length {
        Length::Approx {
            value: self.lengths.iter().sum(),
            error: 0.0,
            converged: true,
        }
    }

    fn is_free_simplicial(&self) -> Option<bool> {
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basischange::tribonacci;
    use crate::treemodels::length_of;

    fn w(s: &str) -> Word {
        Basis::from_chars("abc").unwrap().parse_word(s).unwrap()
    }

    /// Direct evaluation with explicit words, for short horizons.
    fn naive(t: &LimitTree, u: &Word, k: usize, cyclic: bool) -> f64 {
        let mut x = u.clone();
        for _ in 0..k {
            x = t.spec.automorphism.apply(&x).unwrap();
        }
        let x = if cyclic { x.cyclic_core() } else { x };
        t.word_length(&x) / t.lambda.powi(k as i32)
    }

    #[test]
    fn single_letters() {
        let t = LimitTree::tribonacci();
        assert!((t.lambda() - 1.839286755214161).abs() < 1e-12);
        for i in 0..3 {
            let x = Word::letter(Letter::generator(i));
            let l = length_of(&t, &x).unwrap();
            assert!((l.value() - t.lengths()[i]).abs() < 1e-12);
            assert_eq!(l.error(), 0.0);
            assert!((t.displacement(&x).value() - t.lengths()[i]).abs() < 1e-12);
        }
        assert_eq!(t.displacement(&Word::identity()).value(), 0.0);
        assert!((t.bbt_bound().value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lazy_matches_explicit_iteration() {
        let t = LimitTree::tribonacci();
        for s in ["a b' c a'", "c' a b'", "a' b", "b' c' a c b'", "a b a' c' b c"] {
            let u = w(s);
            for k in 0..10 {
                let t_k = LimitTree::new(t.spec.clone(), k.max(1), 1e-300, None).unwrap();
                let r = t_k.iterate(&u, false);
                if r.iterations == k {
                    assert!((r.value - naive(&t, &u, k, false)).abs() < 1e-9, "{s} k={k}");
                }
                let r = t_k.iterate(&u, true);
                if r.iterations == k {
                    assert!(
                        (r.value - naive(&t, &u.cyclic_core(), k, true)).abs() < 1e-9,
                        "{s} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn scaling_law() {
        let t = LimitTree::tribonacci();
        let sigma = tribonacci();
        for s in ["a b' c", "c' a b' b'", "a c' b"] {
            let u = w(s);
            let l = length_of(&t, &u).unwrap();
            let l2 = length_of(&t, &sigma.apply(&u).unwrap()).unwrap();
            assert!(l.converged() && l2.converged());
            assert!((l2.value() - t.lambda() * l.value()).abs() < 1e-6 * l2.value());
        }
    }

    #[test]
    fn inverse_iterates_shrink() {
        let t = LimitTree::tribonacci();
        let inv = tribonacci().inverse().unwrap();
        let mut x = w("a");
        for k in 1..=10 {
            x = inv.apply(&x).unwrap();
            let l = length_of(&t, &x).unwrap();
            let want = t.lengths()[0] / t.lambda().powi(k);
            assert!((l.value() - want).abs() < 1e-6 * want, "k={k}: {} vs {want}", l.value());
        }
    }

    #[test]
    fn spec_validation() {
        let b = Basis::from_chars("abc").unwrap();
        let perm = Automorphism::parse(&b, &["b", "c", "a"], Some(&["c", "a", "b"])).unwrap();
        assert_eq!(TrainTrackSpec::new(perm, None, false).unwrap_err(), Error::NotPrimitive);
        let wrong = vec![vec![1, 0, 0], vec![1, 0, 0], vec![0, 1, 0]];
        assert!(TrainTrackSpec::new(tribonacci(), Some(wrong), false).is_err());
        let json = format!(
            r#"{{"automorphism": {}, "matrix": [[1,1,1],[1,0,0],[0,1,0]]}}"#,
            serde_json::to_string(&AutomorphismFile::from_automorphism(&tribonacci())).unwrap()
        );
        assert!(TrainTrackSpec::from_json(&json).is_ok());
    }
}
