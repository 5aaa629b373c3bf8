//! Depth-bounded laminary languages and the constructions producing them:
//! rational languages, `Ω_ε` enumeration, the `ε`-languages and their
//! intersection, recurrent languages of rays, the concatenation of seeds
//! into bounded rays, diagonal closure and the action of automorphisms.

mod language;
mod omega;
mod seeds;
mod transform;

pub use language::{compare, Comparison, LaminaryLanguage, LanguageFile, Provenance};
pub use omega::{
    default_schedule, l_epsilon_language, l_epsilon_language_with, l_infinity_language, l_omega_language,
    l_omega_language_with, omega_enumerate, omega_enumerate_with, rational_language, OmegaSet, DEFAULT_LIMIT_BUDGET,
};
pub use seeds::{build_l1_ray, Junction, L1RayConstruction, Regime};
pub use transform::{act_on_language, diagonal_closure, l1_infinity_member};
