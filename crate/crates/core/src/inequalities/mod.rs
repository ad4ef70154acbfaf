//! Decay exponents and empirical checks of the convolution estimates.

pub mod checks;
pub mod profiles;
pub mod report;

pub use checks::{
    eta_halfexp_check, four_assertion_check, intersection_young, intersection_young_suite, product_lemma_check,
    young_constant_r, young_constant_r_suite, Assertion, CheckSetup, EtaVariant, IntersectionExponents, ProductVariant,
};
pub use profiles::{assertion_theta, branch, young_theta, Branch, DecayProfile, ThetaCase};
pub use report::{SampleRow, Verdict, VerificationReport};
