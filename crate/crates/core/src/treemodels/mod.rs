//! Tree models with computable length functions: marked metric graphs
//! (with zero-length edges allowed), the Bass–Serre tree of a splitting over a
//! single shared generator, and pullbacks of models by automorphisms.

mod graph;
mod pullback;
mod splitting;

use std::sync::Arc;

pub use graph::{GraphEdge, MarkedGraphFile, MarkedMetricGraph, OrientedEdge};
pub use pullback::Pullback;
pub use splitting::{SplittingFile, SplittingTree};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{Basis, CyclicWord, Letter, Word};
use crate::numeric::Length;

/// The common interface of all tree models. `P` is the model's fixed
/// basepoint.
pub trait TreeModel: Send + Sync {
    fn basis(&self) -> &Basis;

    /// Short stable identifier used in provenance records.
    fn model_id(&self) -> String;

    /// `‖w‖_T`.
    fn translation_length(&self, w: &CyclicWord) -> Length;

    /// `d(P, wP)`.
    fn displacement(&self, w: &Word) -> Length;

    fn is_exact(&self) -> bool {
        true
    }

    /// Relative tolerance of approximate lengths; zero for exact models.
    fn tolerance(&self) -> f64 {
        0.0
    }

    /// `Σ_x d(P, xP)`, an upper bound for the bounded backtracking constant.
    fn bbt_bound(&self) -> Length {
        (0..self.basis().rank())
            .map(|i| self.displacement(&Word::letter(Letter::generator(i))))
            .sum()
    }

    /// `Some(true)` when the action is known to be free and simplicial, in
    /// which case nothing has small translation length.
    fn is_free_simplicial(&self) -> Option<bool> {
        None
    }

    /// A lower bound on `‖w‖` valid for every cyclically reduced `w` that
    /// contains `u` as a cyclic factor. The default is `d(P, uP) - 2·BBT`.
    fn factor_lower_bound(&self, u: &Word) -> f64 {
        let d = self.displacement(u);
        d.value() - d.error() - 2.0 * self.bbt_bound().value()
    }
}

impl<T: TreeModel + ?Sized> TreeModel for Arc<T> {
    fn basis(&self) -> &Basis {
        (**self).basis()
    }
    fn model_id(&self) -> String {
        (**self).model_id()
    }
    fn translation_length(&self, w: &CyclicWord) -> Length {
        (**self).translation_length(w)
    }
    fn displacement(&self, w: &Word) -> Length {
        (**self).displacement(w)
    }
    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }
    fn tolerance(&self) -> f64 {
        (**self).tolerance()
    }
    fn bbt_bound(&self) -> Length {
        (**self).bbt_bound()
    }
    fn is_free_simplicial(&self) -> Option<bool> {
        (**self).is_free_simplicial()
    }
    fn factor_lower_bound(&self, u: &Word) -> f64 {
        (**self).factor_lower_bound(u)
    }
}

/// `‖w‖_T` for an arbitrary nontrivial element, via its cyclic core.
pub fn length_of(t: &dyn TreeModel, w: &Word) -> Result<Length> {
    if w.is_empty() {
        return Err(Error::Identity("translation length"));
    }
    Ok(t.translation_length(&CyclicWord::new(w)?))
}

/// A displacement evaluation tied to the model that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementProfile {
    pub word: String,
    pub value: Length,
    pub model: String,
}

pub fn displacement_profile(t: &dyn TreeModel, w: &Word) -> DisplacementProfile {
    DisplacementProfile {
        word: t.basis().format_word(w),
        value: t.displacement(w),
        model: t.model_id(),
    }
}

/// `d(P, wP) ≤ 2·BBT + ‖w‖` for cyclically reduced `w`.
pub fn check_cyclic_displacement(t: &dyn TreeModel, w: &Word, slack: f64) -> bool {
    debug_assert!(w.is_cyclically_reduced());
    let d = t.displacement(w);
    let bound = t.bbt_bound().scale(2) + length_of(t, w).expect("nonempty");
    d.le_with_slack(&bound, slack)
}

/// `d(P, uP) ≤ 2·BBT + ‖w‖` for every factor `u` of cyclically reduced `w`.
pub fn check_factor_displacement(t: &dyn TreeModel, u: &Word, w: &Word, slack: f64) -> bool {
    let d = t.displacement(u);
    let bound = t.bbt_bound().scale(2) + length_of(t, w).expect("nonempty");
    d.le_with_slack(&bound, slack)
}

/// `d(P, xP) ≤ BBT bound` for each generator.
pub fn check_generator_displacement(t: &dyn TreeModel, slack: f64) -> bool {
    let vol = t.bbt_bound();
    (0..t.basis().rank()).all(|i| {
        t.displacement(&Word::letter(Letter::generator(i)))
            .le_with_slack(&vol, slack)
    })
}

/// Metric shadow of the prefix-point statement: `d(P, vP) ≤ d(P, wP) + 2·BBT`
/// for every prefix `v` of `w`.
pub fn check_prefix_points(t: &dyn TreeModel, w: &Word, slack: f64) -> bool {
    let bound = t.displacement(w) + t.bbt_bound().scale(2);
    (0..=w.len()).all(|k| t.displacement(&w.prefix(k)).le_with_slack(&bound, slack))
}

/// Loads any exact model file, dispatching on its fields.
pub fn load_exact_model(json: &str) -> Result<Arc<dyn TreeModel>> {
    let v: serde_json::Value = serde_json::from_str(json)?;
    if v.get("side1").is_some() {
        Ok(Arc::new(SplittingTree::from_json(json)?))
    } else if v.get("marking").is_some() {
        Ok(Arc::new(MarkedMetricGraph::from_json(json)?))
    } else {
        Err(Error::Format("unrecognized model file".into()))
    }
}
