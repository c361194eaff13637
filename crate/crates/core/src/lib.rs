//! A desk-scale numerics laboratory for orientation-preserving circle
//! diffeomorphisms: cross-ratio distortion tools, continued-fraction and
//! renormalization combinatorics, Denjoy-type inequalities with their
//! exact identities, and the constructive C¹ conjugacy to a rigid
//! rotation with Hölder-exponent estimation.
//!
//! Everything is generic over the scalar type through [`Real`]; the
//! shipped experiments run on [`HighReal`] (a configurable-precision
//! scalar, 50 significant digits by default), while `f64` serves as the
//! fast mode for smoke tests. Set the working precision per thread with
//! [`precision::set_digits`].

pub mod cfarith;
pub mod conjugacy;
pub mod crossratio;
pub mod denjoy;
pub mod error;
pub mod maps;
pub mod numerics;
pub mod partitions;
pub mod rotation;

pub use error::{Error, Result};
pub use numerics::real::{prec_tol, precision, HighReal, Real};

/// The high-precision scalar every shipped experiment runs on.
pub type Hp = HighReal;

/// A circle map over the default scalar.
pub type Map = maps::CircleMap<Hp>;

/// A continued fraction over the default scalar.
pub type Cf = cfarith::ContinuedFraction<Hp>;
