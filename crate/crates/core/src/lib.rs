//! Dimension estimates for representation varieties of cocompact Fuchsian
//! groups in `SO(p,q)`, with a floating-point oracle that checks them on
//! explicitly constructed representations.
//!
//! The exact side ([`presentation`], [`spectra`], [`estimates`]) works in
//! rational arithmetic. The numerical side ([`numerics`], [`constructors`])
//! builds matrix representations and measures cocycle spaces, commutants and
//! centralizers by thresholded singular values.

pub mod constructors;
pub mod error;
pub mod estimates;
pub mod group;
pub mod numerics;
pub mod optim;
pub mod presentation;
pub mod spectra;

pub use error::{Error, Result};
pub use group::{GroupDescriptor, GroupFamily};
pub use presentation::{FuchsianSignature, GroupRingElement, Word};
pub use spectra::SpectralType;

/// Exact rational used throughout the estimate side.
pub type Rational = num_rational::Rational64;
