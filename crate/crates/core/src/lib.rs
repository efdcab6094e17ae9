//! Frobenius traces, Nagao average-trace sums and Sato-Tate statistics for
//! quadratic-twist surfaces `D(T) y^2 = f(x)` over the rationals.

pub mod curves;
pub mod error;
pub mod finite_field;
pub mod poly;
pub mod sato_tate;
pub mod twist_surface;

pub use curves::{curve_from_poly, trace, BadPrimes, CurveSpec, LPolynomial2, TraceRecord};
pub use error::{BadReason, Error, Result};
pub use finite_field::{primes_in, Character, Prime, ResidueTable};
pub use poly::{parse_polynomial, IntPolynomial};
pub use twist_surface::{
    average_trace, fiber_trace, nagao_series, parse_mobius, peterson_d, verify_factorization,
    AverageTrace, FiberMode, MobiusTransform, NagaoSeries, TwistSurfaceSpec,
};
