//! Similarity measures for certain and uncertain series.

pub mod dust;
pub mod filters;
pub mod lp;
pub mod munich;
pub mod proud;

pub use dust::{build_dust_table, dust, dust_point, DustConfig, DustTable, DustTables, PHI_MIN};
pub use filters::{
    ema_filter, ma_filter, uema_filter, uema_filter_normalized, uma_filter, uma_filter_normalized, FilterParams,
};
pub use lp::{euclidean, lp_distance, squared_euclidean};
pub use munich::{
    munich_bounds, munich_probability_dp, munich_probability_exact, MunichBounds, MunichEnclosure, MunichParams,
};
pub use proud::{
    decide, proud_accepts, proud_distance_moments, proud_distance_moments_assumed, DistanceMoments, ProudDecision,
    ProudParams,
};
