use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{l1_test, q_equal, q_point, QPoint};
use crate::error::Result;
use crate::freewords::enumerate::reduced_words_up_to;
use crate::freewords::{subwords, Letter, Ray, Word};
use crate::laminations::{LaminaryLanguage, Provenance};
use crate::numeric::Rational;
use crate::treemodels::TreeModel;

/// L¹ rays with a common limit point, in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QFiber {
    pub point: QPoint,
    pub rays: Vec<Ray>,
}

/// Groups the L¹ rays among `rays` by their limit point. Rays outside L¹ are
/// ignored. Points are first bucketed by their distances to a few orbit
/// points, then compared exactly inside each bucket.
pub fn q_fibers(t: &dyn TreeModel, rays: &[Ray]) -> Result<Vec<QFiber>> {
    let mut rays: Vec<Ray> = rays.to_vec();
    rays.sort();
    rays.dedup();
    let refs = reduced_words_up_to(t.basis().rank(), 2);
    let points: Vec<Option<(QPoint, Vec<Rational>)>> = rays
        .par_iter()
        .map(|r| -> Result<Option<(QPoint, Vec<Rational>)>> {
            if !l1_test(r, t).member {
                return Ok(None);
            }
            let q = q_point(r, t)?;
            let key = refs.iter().map(|h| q.distance_to_orbit(t, h)).collect();
            Ok(Some((q, key)))
        })
        .collect::<Result<_>>()?;

    let mut buckets: BTreeMap<&[Rational], Vec<usize>> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        if let Some((_, key)) = p {
            buckets.entry(key.as_slice()).or_default().push(i);
        }
    }
    let mut fibers = Vec::new();
    for members in buckets.values() {
        // classes inside a bucket; almost always a single one
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in members {
            let qi = &points[i].as_ref().expect("member").0;
            let mut placed = false;
            for c in classes.iter_mut() {
                let qc = &points[c[0]].as_ref().expect("member").0;
                if q_equal(qi, qc, t)? {
                    c.push(i);
                    placed = true;
                    break;
                }
            }
            if !placed {
                classes.push(vec![i]);
            }
        }
        for c in classes {
            fibers.push(QFiber {
                point: points[c[0]].as_ref().expect("member").0.clone(),
                rays: c.iter().map(|&i| rays[i].clone()).collect(),
            });
        }
    }
    fibers.sort_by(|a, b| a.rays[0].cmp(&b.rays[0]));
    Ok(fibers)
}

/// Factors of length `≤ depth` of the biinfinite words `X⁻¹X'` over all
/// pairs of distinct rays in one fiber, computed from the prefix tree of the
/// fiber instead of pair by pair.
fn fiber_factors(rays: &[Ray], depth: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    if rays.len() < 2 {
        return out;
    }
    // first branching depth on the path of each ray
    let mut branch_at: BTreeMap<&Ray, usize> = BTreeMap::new();
    let mut stack: Vec<(Vec<&Ray>, usize)> = vec![(rays.iter().collect(), 0)];
    while let Some((group, mut h)) = stack.pop() {
        let children = loop {
            let mut children: BTreeMap<Letter, Vec<&Ray>> = BTreeMap::new();
            for r in &group {
                children.entry(r.letter(h)).or_default().push(r);
            }
            if children.len() > 1 {
                break children;
            }
            h += 1;
        };
        for r in &group {
            branch_at.entry(r).or_insert(h);
        }
        let paths: Vec<BTreeSet<Word>> = children
            .values()
            .map(|g| {
                g.iter()
                    .flat_map(|r| (1..depth).map(move |j| r.drop(h).take(j)))
                    .collect()
            })
            .collect();
        for (i, si) in paths.iter().enumerate() {
            for (j, tj) in paths.iter().enumerate() {
                if i == j {
                    continue;
                }
                for s in si {
                    for t in tj.iter().filter(|t| s.len() + t.len() <= depth) {
                        out.insert(s.inverse().mul(t));
                    }
                }
            }
        }
        for g in children.into_values() {
            if g.len() > 1 {
                stack.push((g, h + 1));
            }
        }
    }
    for (r, h) in branch_at {
        let tail = r.drop(h);
        let reach = tail.prefix().len() + tail.period().len() + depth;
        out.extend(subwords(&tail.take(reach), depth));
    }
    out
}

/// The language generated by all leaves `(X, X')` of distinct rays with a
/// common limit point.
pub fn q_leaf_language(rank: usize, fibers: &[QFiber], depth: usize) -> LaminaryLanguage {
    let sets: Vec<BTreeSet<Word>> = fibers.par_iter().map(|f| fiber_factors(&f.rays, depth)).collect();
    let mut words = BTreeSet::new();
    for s in sets {
        words.extend(s);
    }
    let pairs: usize = fibers.iter().map(|f| f.rays.len() * (f.rays.len() - 1)).sum();
    LaminaryLanguage::closure(
        rank,
        depth,
        words,
        Provenance::new("q_leaves")
            .param("fibers", fibers.iter().filter(|f| f.rays.len() > 1).count())
            .param("leaves", pairs)
            .param("depth", depth),
    )
}
