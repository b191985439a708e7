//! Exact and asymptotic analysis of the q-Krawtchouk ensembles arising from
//! principal specializations of the dual Cauchy identity.

pub mod asymptotics;
pub mod error;
pub mod ensemble;
pub mod measures;
pub mod partitions;
pub mod qmath;
pub mod sampler;

pub use error::{Error, Result};
pub use measures::{Measure, ModelParams, Specialization};
pub use partitions::{Partition, PointConfig};
pub use qmath::{LogReal, Rational, Scalar};
