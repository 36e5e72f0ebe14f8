//! Channel hardening for massive MIMO: tensor model, normalization and
//! hardening metrics, closed-form theory, array geometries, channel
//! generators, analysis procedures and file formats.

pub mod analysis;
pub mod arrays;
pub mod error;
pub mod gain;
pub mod io;
pub mod numeric;
pub mod synth;
pub mod tensor;
pub mod theory;

pub use num_complex::Complex64;

pub use arrays::{
    build_cylindrical, build_linear, build_planar, geometry_for_id, pattern_gain, steering_vector,
    ArrayGeometry, Polarization, UserAntenna, UserPattern,
};
pub use error::{Error, Result};
pub use gain::{
    hardening, normalize, prefix_hardening, std_gain, subset_gain, GainSeries, GainStd,
    HardeningCurve, NormalizedBlock,
};
pub use synth::GscmConfig;
pub use tensor::{ChannelTensor, Dims, OrderLabel, SubsetSelection, TensorMeta};
pub use theory::{cv_squared_closed, large_scale_bound, std_surface, Count, TheoryTerms};
