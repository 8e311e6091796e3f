//! Closed-form SER analysis and AS2 diversity quantities.

pub mod bound;
pub mod closed_form;
pub mod multinomial;
pub mod qfunc;
pub mod rank;

pub use bound::{ser_upper_bound, BoundTerms, ErrorCase};
pub use closed_form::{theta_case12, xi_case3, CaseThreeAux, ChianiTerm};
pub use multinomial::{multinomial_terms, pdf_z, Compositions, MultinomialTerm};
pub use qfunc::{chiani_q, q_function};
pub use rank::{
    as2_chernoff_bound, cross_cluster_differences, delta_d_enumerate, r_min_and_lambda, r_min_and_lambda_with,
    DeltaDMatrix, DeltaDSet, EnumerationMode, RankSummary, DEFAULT_ENUMERATION_CAP,
};
