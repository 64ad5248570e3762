//! Spectral support of band-limited functions from the growth of iterated
//! differential operators.
//!
//! For a polynomial `P` and a function `f` with compactly supported transform,
//! `||P(d)^n f||_p^(1/n)` tends to `sup |P(i l)|` over the support of `F f`.
//! This crate computes those sequences on periodic grids, estimates their
//! limits, rebuilds the support from families of polynomials, and checks the
//! companion growth laws: the exponential type of `F f` along complex lines
//! and the pointwise envelopes of `P(d)^n f`.
//!
//! ```
//! use realpw::prelude::*;
//!
//! let grid = make_grid(1, 1024, 2.0)?;
//! let f = sample_builtin(&Builtin::spectral_bump(SupportSet::interval(-1.0, 1.0), 0.003), &grid)?;
//! let seq = growth_sequence(&f, &parse_poly("x1", 1)?, NormExponent::TWO, 64)?;
//! assert!((seq.limit - 1.0).abs() < 0.02);
//! # Ok::<(), realpw::Error>(())
//! ```

pub mod builtin;
pub mod checks;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod grid;
pub mod growth;
pub mod io;
pub mod poly;
pub mod reconstruct;
pub mod transform;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::builtin::{sample_builtin, Builtin, SupportSet};
    pub use crate::error::{Error, Result};
    pub use crate::grid::{lp_norm, make_grid, Grid, NormExponent, SampledFunction, Side};
    pub use crate::growth::{
        apply_op_fd, apply_op_spectral, estimate_limit, growth_sequence, growth_sequence_with, liminf_check,
        pointwise_growth, schwartz_decay_check, GrowthOptions, GrowthSequence, Method, WeightMode,
    };
    pub use crate::poly::{family_linear, family_quadratic, parse_poly, MultiPoly, PolyFamily, Symbol};
    pub use crate::reconstruct::{
        local_spectrum_raster, membership_test, pde_support_probe, reconstruct_support, ReconstructionResult,
    };
    pub use crate::transform::{
        complex_growth_rate, compute_r, eval_entire, forward_dft, inverse_dft, support_mask, supporting_function,
        SupportMask,
    };
    pub use rustfft::num_complex::Complex64;
}
