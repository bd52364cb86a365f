//! Univariate dynamic linear models
//!
//! ```text
//! y_t     = F theta_t + v_t,        v_t ~ N(0, V)
//! theta_t = G theta_{t-1} + w_t,    w_t ~ N(0, W)
//! theta_0 ~ N(m0, C0)
//! ```
//!
//! with Kalman filtering and smoothing, forward-filtering backward-sampling,
//! a Gibbs sampler for the variances of the local linear trend plus
//! quarterly seasonal model, and posterior predictive forecasts.

mod ffbs;
mod filter;
mod forecast;
mod gibbs;
mod linalg;
mod smoother;
mod spec;

pub use ffbs::{ffbs, ffbs_with_rng};
pub(crate) use filter::kalman_loglik;
pub use filter::{kalman_filter, FilterResult, InnovationSummary};
pub use forecast::{dlm_forecast, forecast_mixture, predictive_moments, MIXTURE_COMPONENTS};
pub use gibbs::{
    ergodic_means, gibbs, sample_inverse_gamma, GibbsChain, GibbsConfig, PriorSpec, Variances,
    VariancePriors,
};
pub use linalg::psd_factor;
pub use smoother::{kalman_smoother, smoothed_signal, Smoothed};
pub use spec::{build_trend_seasonal, trend_seasonal_g, DlmSpec, TrendSeasonalTemplate};
