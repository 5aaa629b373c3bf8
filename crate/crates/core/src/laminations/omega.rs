use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LaminaryLanguage, Provenance};
use crate::error::{Error, Result};
use crate::freewords::{periodic_factors, CyclicWord, Letter, Ray, Word};
use crate::numeric::Length;
use crate::treemodels::TreeModel;

/// Node budget used by default when enumerating on approximate models.
pub const DEFAULT_LIMIT_BUDGET: u64 = 1_000_000;

/// The canonical cyclic words of length `≤ length_cap` with `‖w‖ < ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSet {
    pub epsilon: f64,
    pub length_cap: usize,
    pub model: String,
    pub elements: Vec<CyclicWord>,
    /// False if the search stopped at its node budget.
    pub complete: bool,
    /// Every length up to this one was searched exhaustively.
    pub complete_through: usize,
    pub nodes_visited: u64,
    /// False if some recorded length hit the iteration cap.
    pub converged: bool,
}

impl OmegaSet {
    pub fn contains(&self, w: &CyclicWord) -> bool {
        self.elements.binary_search(w).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Rational language of `w`: factors of `…www…` and their inverses.
pub fn rational_language(rank: usize, w: &CyclicWord, depth: usize) -> LaminaryLanguage {
    LaminaryLanguage::from_closed_set(
        rank,
        depth,
        periodic_factors(w.word(), depth),
        Provenance::new("rational").param("length", w.len()),
    )
}

fn default_budget(t: &dyn TreeModel) -> Option<u64> {
    if t.is_exact() {
        None
    } else {
        Some(DEFAULT_LIMIT_BUDGET)
    }
}

pub fn omega_enumerate(t: &dyn TreeModel, epsilon: f64, length_cap: usize) -> Result<OmegaSet> {
    omega_enumerate_with(t, epsilon, length_cap, default_budget(t))
}

/// Search over canonical cyclic words by prefix. A prefix is abandoned when
/// the model certifies that every cyclic word containing it is at least `ε`
/// long. With a node budget, the search stops before the first length it
/// cannot finish.
pub fn omega_enumerate_with(
    t: &dyn TreeModel,
    epsilon: f64,
    length_cap: usize,
    budget: Option<u64>,
) -> Result<OmegaSet> {
    let found = search(t, epsilon, length_cap, budget)?;
    Ok(OmegaSet {
        epsilon,
        length_cap,
        model: t.model_id(),
        elements: found.words.into_iter().map(|(w, _)| w).collect(),
        complete: found.complete,
        complete_through: found.complete_through,
        nodes_visited: found.nodes,
        converged: !found.unconverged,
    })
}

struct SearchResult {
    words: Vec<(CyclicWord, Length)>,
    complete: bool,
    complete_through: usize,
    nodes: u64,
    unconverged: bool,
}

/// Canonical prefixes are searched one length at a time. Each level is
/// evaluated in parallel and collected in order; the budget is checked
/// between levels, so the outcome does not depend on the thread count.
fn search(t: &dyn TreeModel, epsilon: f64, cap: usize, budget: Option<u64>) -> Result<SearchResult> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if cap == 0 {
        return Err(Error::InvalidParameter("length cap must be at least 1".into()));
    }
    let rank = t.basis().rank();
    let mut found = Vec::new();
    let mut nodes = 0u64;
    let mut complete = true;
    let mut complete_through = 0;
    let mut level: Vec<Vec<Letter>> = Letter::all(rank).map(|l| vec![l]).collect();
    for len in 1..=cap {
        if level.is_empty() {
            complete_through = cap;
            break;
        }
        if budget.is_some_and(|b| nodes + level.len() as u64 > b) {
            complete = false;
            break;
        }
        nodes += level.len() as u64;
        let outcomes: Vec<(bool, Option<(CyclicWord, Length)>)> =
            level.par_iter().map(|p| visit(t, epsilon, p)).collect();
        let mut next = Vec::new();
        for (p, (pruned, hit)) in level.iter().zip(outcomes) {
            found.extend(hit);
            if !pruned && len < cap {
                next.extend(children(rank, p));
            }
        }
        complete_through = len;
        level = next;
    }
    // inverse closure guards against asymmetric rounding on approximate models
    let set: BTreeSet<CyclicWord> = found.iter().map(|(w, _)| w.clone()).collect();
    let extra: Vec<(CyclicWord, Length)> = found
        .iter()
        .filter(|(w, _)| !set.contains(&w.inverse()))
        .map(|(w, l)| (w.inverse(), *l))
        .collect();
    found.extend(extra);
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.dedup_by(|a, b| a.0 == b.0);
    let unconverged = found.iter().any(|(_, l)| !l.converged());
    Ok(SearchResult {
        words: found,
        complete,
        complete_through,
        nodes,
        unconverged,
    })
}

fn children(rank: usize, p: &[Letter]) -> Vec<Vec<Letter>> {
    Letter::all(rank)
        .filter(|&l| l >= p[0] && Some(&l.inverse()) != p.last())
        .map(|l| {
            let mut q = p.to_vec();
            q.push(l);
            q
        })
        .collect()
}

/// Whether the subtree below `p` can be discarded, and `p` itself if it is
/// a canonical element of `Ω_ε`.
fn visit(t: &dyn TreeModel, epsilon: f64, p: &[Letter]) -> (bool, Option<(CyclicWord, Length)>) {
    let w = Word::reduce(p.iter().copied());
    // a small margin keeps the test sound under rounding
    if t.factor_lower_bound(&w) >= epsilon + 1e-9 {
        return (true, None);
    }
    if w.is_cyclically_reduced() {
        if let Ok(c) = CyclicWord::new(&w) {
            if c.word() == &w {
                let l = t.translation_length(&c);
                if l.certainly_less_than(epsilon) {
                    return (false, Some((c, l)));
                }
            }
        }
    }
    (false, None)
}

fn language_from(rank: usize, depth: usize, omega: &[&CyclicWord], provenance: Provenance) -> LaminaryLanguage {
    let sets: Vec<BTreeSet<Word>> = omega.par_iter().map(|w| periodic_factors(w.word(), depth)).collect();
    let mut all = BTreeSet::new();
    for s in sets {
        all.extend(s);
    }
    LaminaryLanguage::from_closed_set(rank, depth, all, provenance)
}

fn base_flags(p: &mut Provenance, depth: usize, cap: usize, found: &SearchResult) {
    if cap < 2 * depth {
        p.add_flag("undercount");
    }
    if !found.complete {
        p.add_flag("incomplete");
    }
    if found.unconverged {
        p.add_flag("unconverged");
    }
}

/// Factors of `w^∞` for `w ∈ Ω_ε(T)` up to the cap.
pub fn l_epsilon_language(
    t: &dyn TreeModel,
    epsilon: f64,
    depth: usize,
    length_cap: usize,
) -> Result<LaminaryLanguage> {
    l_epsilon_language_with(t, epsilon, depth, length_cap, default_budget(t))
}

pub fn l_epsilon_language_with(
    t: &dyn TreeModel,
    epsilon: f64,
    depth: usize,
    length_cap: usize,
    budget: Option<u64>,
) -> Result<LaminaryLanguage> {
    let found = search(t, epsilon, length_cap, budget)?;
    let mut p = Provenance::new("l_epsilon")
        .param("epsilon", format!("{epsilon:e}"))
        .param("depth", depth)
        .param("length_cap", length_cap)
        .param("model", t.model_id())
        .param("omega_size", found.words.len())
        .param("complete_through", found.complete_through);
    base_flags(&mut p, depth, length_cap, &found);
    let refs: Vec<&CyclicWord> = found.words.iter().map(|(w, _)| w).collect();
    Ok(language_from(t.basis().rank(), depth, &refs, p))
}

/// `∩_ε L_ε` over a strictly decreasing schedule. The chain counts as
/// stabilized when the last two languages agree.
pub fn l_omega_language(
    t: &dyn TreeModel,
    depth: usize,
    schedule: &[f64],
    length_cap: usize,
) -> Result<LaminaryLanguage> {
    l_omega_language_with(t, depth, schedule, length_cap, default_budget(t))
}

/// [`l_omega_language`] with an explicit node budget for the search.
pub fn l_omega_language_with(
    t: &dyn TreeModel,
    depth: usize,
    schedule: &[f64],
    length_cap: usize,
    budget: Option<u64>,
) -> Result<LaminaryLanguage> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty epsilon schedule".into()));
    }
    if schedule.iter().any(|&e| e.is_nan() || e <= 0.0) || schedule.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidParameter(
            "schedule must be positive and strictly decreasing".into(),
        ));
    }
    let rank = t.basis().rank();
    // Ω shrinks with ε: search once at the largest value, then filter
    let found = search(t, schedule[0], length_cap, budget)?;
    let mut p = Provenance::new("l_omega")
        .param("depth", depth)
        .param("length_cap", length_cap)
        .param("model", t.model_id())
        .param(
            "schedule",
            schedule.iter().map(|e| format!("{e:e}")).collect::<Vec<_>>(),
        );
    base_flags(&mut p, depth, length_cap, &found);
    p = p.param("complete_through", found.complete_through);
    let mut chain: Vec<LaminaryLanguage> = Vec::new();
    let mut sizes = Vec::new();
    for &eps in schedule {
        let omega: Vec<&CyclicWord> = found
            .words
            .iter()
            .filter(|(_, l)| l.certainly_less_than(eps))
            .map(|(w, _)| w)
            .collect();
        sizes.push(omega.len());
        chain.push(language_from(rank, depth, &omega, Provenance::new("l_epsilon")));
    }
    let mut acc = chain[0].clone();
    for l in &chain[1..] {
        acc = acc.intersection(l, Provenance::new("l_omega"));
    }
    let n = chain.len();
    let stabilized = n >= 2 && chain[n - 1].same_words(&chain[n - 2]);
    if !stabilized {
        p.add_flag("unstabilized");
    }
    p = p.param("omega_sizes", sizes).param("stabilized", stabilized);
    *acc.provenance_mut() = p;
    Ok(acc)
}

/// Three geometric steps below the smallest positive translation length
/// seen among short cyclic words; for limit trees with growth `λ`, the
/// schedule `λ^-4, λ^-6, λ^-8`.
pub fn default_schedule(t: &dyn TreeModel, length_cap: usize, growth: Option<f64>) -> Vec<f64> {
    if let Some(l) = growth {
        return vec![l.powi(-4), l.powi(-6), l.powi(-8)];
    }
    let rank = t.basis().rank();
    let m = crate::freewords::enumerate::canonical_cyclic_words_up_to(rank, length_cap.min(6))
        .iter()
        .map(|w| t.translation_length(w).value())
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let m = if m.is_finite() { m } else { 1.0 };
    vec![m / 2.0, m / 4.0, m / 8.0]
}

/// Union of the recurrent languages of the rays.
pub fn l_infinity_language(rank: usize, rays: &[Ray], depth: usize) -> Result<LaminaryLanguage> {
    if rays.is_empty() {
        return Err(Error::InvalidParameter("no rays".into()));
    }
    let mut all = BTreeSet::new();
    let periods: BTreeSet<&Word> = rays.iter().map(Ray::period).collect();
    for v in periods {
        all.extend(periodic_factors(v, depth));
    }
    Ok(LaminaryLanguage::from_closed_set(
        rank,
        depth,
        all,
        Provenance::new("l_infinity")
            .param("rays", rays.len())
            .param("depth", depth),
    ))
}
