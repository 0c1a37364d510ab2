//! Continued zeta function of a table, its derivative, growth bounds and bound verification.

mod engine;
mod growth;
mod lemmas;

pub use engine::{
    derivative_tail_radius, tail_radius, zeta_continued, zeta_partial, zeta_prime, BoundedValue, StripPoint,
    ZetaEngine, POLE_GUARD,
};
pub use growth::{big_m, max_modulus_rhs, MBound, ModulusScan};
pub use lemmas::{verify_lemma_bounds, LemmaReport, LemmaRow, Status, StripGrid};

#[cfg(test)]
pub(crate) use engine::tests as test_support;
