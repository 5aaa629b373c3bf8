//! L¹ membership of eventually periodic rays, limit points `Q(X)` on exact
//! models, and the relation `Q(X) = Q(X')`.
//!
//! For `X = u·v^∞` with `‖v‖ = 0`, the point `Q(X)` is `u·p` where `p` is
//! the projection of `P` onto `Fix(v)`, which is the midpoint of `[P, vP]`.
//! All distances between such points reduce to distances between orbit
//! points through the four-point formula for a point on a geodesic.

mod fibers;

use std::ops::Range;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{CyclicWord, Leaf, Ray, Word};
use crate::laminations::LaminaryLanguage;
use crate::numeric::{Length, Rational};
use crate::treemodels::TreeModel;

pub use fibers::{q_fibers, q_leaf_language, QFiber};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    Numeric,
}

/// Evidence for an L¹ verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum L1Witness {
    /// `sup_k d(P, X_k P) ≤ bound`; `observed` is the largest value seen on
    /// the first prefix and two periods.
    Bounded { observed: Length, bound: Length },
    /// `d(X_k P, X_l P) = distance > threshold = 3·BBT`.
    Divergent {
        k: usize,
        l: usize,
        distance: Length,
        threshold: Length,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1Verdict {
    pub member: bool,
    pub period_length: Length,
    pub witness: L1Witness,
    pub exactness: Exactness,
}

/// Longest word used in a divergence certificate.
const MAX_CERTIFICATE_LETTERS: usize = 100_000;

fn max_length(a: Length, b: Length) -> Length {
    if b.value() > a.value() {
        b
    } else {
        a
    }
}

/// `X = u·v^∞` is in L¹ iff `‖v‖ = 0`. On approximate models the test is
/// `‖v‖ < 10·tol·BBT`.
pub fn l1_test(r: &Ray, t: &dyn TreeModel) -> L1Verdict {
    let u = r.prefix();
    let v = r.period();
    let cyc = CyclicWord::new(v).expect("periods are nontrivial");
    let lv = t.translation_length(&cyc);
    let bbt = t.bbt_bound();
    let (member, exactness) = if t.is_exact() {
        (lv.is_zero(), Exactness::Exact)
    } else {
        (lv.value() < 10.0 * t.tolerance() * bbt.value(), Exactness::Numeric)
    };
    let witness = if member {
        let mut observed = Length::zero();
        for k in 0..=u.len() + 2 * v.len() {
            observed = max_length(observed, t.displacement(&r.take(k)));
        }
        let mut widest = Length::zero();
        for k in 1..v.len() {
            widest = max_length(widest, t.displacement(&v.prefix(k)));
        }
        L1Witness::Bounded {
            observed,
            bound: t.displacement(u) + t.displacement(v) + widest,
        }
    } else {
        let threshold = bbt.scale(3);
        let need = (threshold.value() / lv.value()).floor() as usize + 1;
        let m = need.clamp(1, (MAX_CERTIFICATE_LETTERS / v.len()).max(1));
        L1Witness::Divergent {
            k: u.len(),
            l: u.len() + m * v.len(),
            distance: t.displacement(&v.pow(m as i64)),
            threshold,
        }
    };
    L1Verdict {
        member,
        period_length: lv,
        witness,
        exactness,
    }
}

/// `Q(g·v^∞) = g·p`, `p` the projection of `P` onto `Fix(v)`, for an
/// elliptic `v`. Points produced by [`q_point`] have `v` cyclically reduced
/// and in canonical rotation; other forms are accepted everywhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QPoint {
    pub translate: Word,
    pub elliptic: Word,
    pub model: String,
}

fn require_exact(t: &dyn TreeModel) -> Result<()> {
    if t.is_exact() {
        Ok(())
    } else {
        Err(Error::Unsupported("limit points on approximate models"))
    }
}

pub fn q_point(r: &Ray, t: &dyn TreeModel) -> Result<QPoint> {
    require_exact(t)?;
    if !l1_test(r, t).member {
        return Err(Error::NotInL1);
    }
    let v = r.period();
    let elliptic = CyclicWord::new(v)?.into_word();
    let k = (0..v.len())
        .find(|&k| v.rotate_left(k) == elliptic)
        .expect("canonical form is a rotation");
    Ok(QPoint {
        translate: r.prefix().mul(&v.prefix(k)),
        elliptic,
        model: t.model_id(),
    })
}

/// `d(gP, hP)`.
fn orbit_distance(t: &dyn TreeModel, g: &Word, h: &Word) -> Rational {
    t.displacement(&g.inverse().mul(h)).as_exact().expect("exact model")
}

/// Distance from a point `z` to the point at distance `s` from `x` on
/// `[x, y]`, given `d(x, z)`, `d(x, y)`, `d(y, z)`.
fn to_segment_point(dxz: Rational, dxy: Rational, dyz: Rational, s: Rational) -> Rational {
    let a = (dxz + dxy - dyz) / 2;
    (dxz - a) + (a - s).abs()
}

impl QPoint {
    fn ends(&self) -> (Word, Word) {
        let x = self.translate.clone();
        let y = x.mul(&self.elliptic);
        (x, y)
    }

    /// `d(Q, hP)`.
    pub fn distance_to_orbit(&self, t: &dyn TreeModel, h: &Word) -> Rational {
        let (x, y) = self.ends();
        let dxy = orbit_distance(t, &x, &y);
        to_segment_point(orbit_distance(t, &x, h), dxy, orbit_distance(t, &y, h), dxy / 2)
    }
}

/// Exact distance between two limit points.
pub fn q_distance(p: &QPoint, q: &QPoint, t: &dyn TreeModel) -> Result<Rational> {
    require_exact(t)?;
    if p.model != q.model || p.model != t.model_id() {
        return Err(Error::InvalidModel("limit points come from different models".into()));
    }
    let (x, y) = q.ends();
    let dxy = orbit_distance(t, &x, &y);
    Ok(to_segment_point(
        p.distance_to_orbit(t, &x),
        dxy,
        p.distance_to_orbit(t, &y),
        dxy / 2,
    ))
}

pub fn q_equal(p: &QPoint, q: &QPoint, t: &dyn TreeModel) -> Result<bool> {
    Ok(q_distance(p, q, t)?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QPairVerdict {
    pub equal: bool,
    pub left_member: bool,
    pub right_member: bool,
    /// `d(Q(X), Q(X'))` when both rays are in L¹.
    pub distance: Option<Length>,
    pub exactness: Exactness,
}

/// `Q(X) = Q(X')` for a leaf `(X, X')` on an exact model.
pub fn q_pair_test(leaf: &Leaf, t: &dyn TreeModel) -> Result<QPairVerdict> {
    require_exact(t)?;
    let left_member = l1_test(leaf.left(), t).member;
    let right_member = l1_test(leaf.right(), t).member;
    let distance = if left_member && right_member {
        Some(q_distance(&q_point(leaf.left(), t)?, &q_point(leaf.right(), t)?, t)?)
    } else {
        None
    };
    Ok(QPairVerdict {
        equal: distance.is_some_and(|d| d.is_zero()),
        left_member,
        right_member,
        distance: distance.map(Length::Exact),
        exactness: Exactness::Exact,
    })
}

/// The language form of the test, used on approximate models: every factor
/// of the biinfinite word of the leaf lies in `l`.
pub fn q_pair_by_language(leaf: &Leaf, l: &LaminaryLanguage) -> QPairVerdict {
    let inside = leaf.rho().all_factors(l.depth()).iter().all(|u| l.contains(u));
    QPairVerdict {
        equal: inside,
        left_member: inside,
        right_member: inside,
        distance: None,
        exactness: Exactness::Numeric,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    /// `3·BBT`.
    pub bound: Length,
    pub distances: Vec<(usize, Length)>,
    pub max_ratio: f64,
    /// Smallest `K` in the range from which every checked `k` satisfies the
    /// bound.
    pub holds_from: Option<usize>,
    /// The bound holds for every checked `k ≥ |prefix|`.
    pub pass: bool,
}

/// Checks `d(X_k P, Q(X)) ≤ 3·BBT` for `k` in the range.
pub fn q_trap_check(r: &Ray, t: &dyn TreeModel, ks: Range<usize>) -> Result<TrapReport> {
    let q = q_point(r, t)?;
    let bound = t.bbt_bound().scale(3);
    let b = bound.as_exact().expect("exact model");
    let mut distances = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for k in ks.clone() {
        let d = q.distance_to_orbit(t, &r.take(k));
        let ratio = if b.is_zero() {
            if d.is_zero() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            Length::Exact(d / b).value()
        };
        max_ratio = max_ratio.max(ratio);
        distances.push((k, Length::Exact(d)));
    }
    let ok = |d: &Length| d.as_exact().expect("exact") <= b;
    let holds_from = match distances.iter().rposition(|(_, d)| !ok(d)) {
        None => Some(ks.start),
        Some(i) if i + 1 < distances.len() => Some(distances[i + 1].0),
        Some(_) => None,
    };
    let pass = distances
        .iter()
        .filter(|(k, _)| *k >= r.prefix().len())
        .all(|(_, d)| ok(d));
    Ok(TrapReport {
        bound,
        distances,
        max_ratio,
        holds_from,
        pass,
    })
}
