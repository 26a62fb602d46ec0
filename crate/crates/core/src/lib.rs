//! Signaling-scheme solvers for Bayesian persuasion when the receiver
//! answers with a logit quantal response.
//!
//! * [`model`]: instances, the response curve, schemes, payoffs.
//! * [`sisu`]: state-independent sender utility; exact optimal censorship.
//! * [`sdsu`]: state-dependent sender utility; binary optimum, pairwise
//!   schemes and approximations.
//! * [`robust`]: robustness ratios across rationality levels.
//! * [`oracle`]: grid LP, simplex, brute-force search and a Monte-Carlo
//!   receiver used for verification.

pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod robust;
pub mod sdsu;
pub mod sisu;

pub use error::{Error, Result};
pub use model::{Instance, RationalityLevel, Scheme, Signal};
