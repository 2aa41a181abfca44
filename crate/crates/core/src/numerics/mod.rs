pub mod logscalar;
pub mod quadrature;
pub mod special;

pub use logscalar::{LogScalar, Sign};
pub use quadrature::{
    gaussian_moment_tail, integrate, integrate_singular, GaussianEnvelope, QuadratureResult, QuadratureSpec,
};
pub use special::{chebyshev_t2, dist_hyp, gauss_tail, li, li_with};
