//! Numerical laboratory for the Goldbach generating sum `S(q)`.
//!
//! `S(q) = Σ_{n ≡ 0 (q)} G(n) e^{−n/N}` is computed directly from a sieve and
//! again through the Dirichlet characters mod `q`; the two sides are compared
//! with the singular-series model `Σ 𝔖(n) n e^{−n/N}`. The L-function module
//! locates zeros and checks the explicit formula for `P(χ)`.

pub mod arith;
pub mod characters;
pub mod error;
pub mod format;
pub mod goldbach;
pub mod lfunc;
pub mod model;
pub mod series;
pub mod singular;
pub mod sum;

pub use arith::{euler_phi, factorize, Factorization, SieveTable};
pub use characters::{
    exceptional_candidate, orthogonality_check, Character, CharacterGroup, CharacterId,
    ExceptionalCandidate,
};
pub use error::{Error, Result};
pub use goldbach::{goldbach_g, goldbach_g_all, ratio_scan, RatioScan};
pub use model::{model_sum, zq_eval, ModelReport};
pub use series::{SeriesParams, SeriesReport};
pub use singular::SingularSeriesCtx;
