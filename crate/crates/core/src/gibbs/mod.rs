//! The Gibbs measure on multiplicities: Boltzmann sampling, the
//! characteristic function of N and local-limit diagnostics.

mod charfn;
mod diagnostics;
mod sampler;

pub use charfn::{char_fn, log_char_fn};
pub use diagnostics::{
    cramer_decay, llt_check, llt_check_with_budget, llt_from_count, lyapunov_bound, lyapunov_with, CramerReport,
    LLTReport, LltSummary, Whitening, LYAPUNOV_DIRECTIONS,
};
pub use sampler::{sample, SampledPartition, Sampler, SamplerSpec, MAX_SUPPORT, MAX_TV_BUDGET};
