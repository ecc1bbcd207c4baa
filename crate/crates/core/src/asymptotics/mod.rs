//! `h_q(x)`, Gamma and Poisson helpers, and the three main terms for
//! `P(Ω(f_n) = k)`.

mod gamma;
mod hq;
mod main_terms;
mod poisson;

pub use gamma::{gamma_real, ln_factorial, ln_gamma, GAMMA_ARG_CAP};
pub use hq::{
    direct_product_tail, hq, hq_direct_product, hq_log_derivative, log_derivative_tail,
    log_series_tail, HqSeries,
};
pub use main_terms::{
    binom_gamma_residual, binom_real, hwang_main_term, int2_identity_residual, new_main_term,
    r_of, warlimont_main_term, MainTermInputs, MAIN_TERM_TOL,
};
pub use poisson::{poisson_pmf, poisson_tail, poisson_tail_bound};
