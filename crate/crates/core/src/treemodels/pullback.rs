use std::sync::Arc;

use super::TreeModel;
use crate::basischange::Automorphism;
use crate::error::{Error, Result};
use crate::freewords::{Basis, CyclicWord, Word};
use crate::numeric::Length;

/// The model `T·α`: lengths are `‖w‖ = ‖α(w)‖_T` and the basepoint is `T`'s.
pub struct Pullback {
    inner: Arc<dyn TreeModel>,
    alpha: Automorphism,
}

impl Pullback {
    pub fn new(inner: Arc<dyn TreeModel>, alpha: Automorphism) -> Result<Self> {
        if !alpha.source().compatible(inner.basis()) || !alpha.target().compatible(inner.basis()) {
            return Err(Error::BasisMismatch(format!(
                "automorphism over {} cannot act on a model over {}",
                alpha.source(),
                inner.basis()
            )));
        }
        if !alpha.is_invertible() {
            return Err(Error::NonInvertible("pullback needs an automorphism".into()));
        }
        Ok(Pullback { inner, alpha })
    }

    pub fn inner(&self) -> &Arc<dyn TreeModel> {
        &self.inner
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.alpha
    }
}

impl TreeModel for Pullback {
    fn basis(&self) -> &Basis {
        self.inner.basis()
    }

    fn model_id(&self) -> String {
        format!("pullback({}, {})", self.inner.model_id(), self.alpha.content_hash())
    }

    fn translation_length(&self, w: &CyclicWord) -> Length {
        let image = self.alpha.apply_unchecked(w.word());
        let core = CyclicWord::new(&image).expect("automorphisms are injective");
        self.inner.translation_length(&core)
    }

    fn displacement(&self, w: &Word) -> Length {
        self.inner.displacement(&self.alpha.apply_unchecked(w))
    }

    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    fn is_free_simplicial(&self) -> Option<bool> {
        self.inner.is_free_simplicial()
    }
}
