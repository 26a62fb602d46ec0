//! Instances, the response curve, schemes and their payoffs.

pub mod censorship;
pub mod instance;
pub mod response;
pub mod scheme;

pub use censorship::{direct_low_mean, log_pool_value, full_reveal, make_censorship, make_direct, mix, no_info, CensorshipParams};
pub use instance::{Instance, State};
pub use response::{log_response, response, response_derivative, RationalityLevel};
pub use scheme::{
    evaluate_payoff, log_payoff, log_payoff_unchecked, payoff_unchecked, validate_scheme, Scheme, Signal,
    ValidationReport,
};
