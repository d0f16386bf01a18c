//! Twisted Alexander invariants of knot and link groups under symmetric-power
//! lifts of SL(2,ℂ) parabolic representations, and the hyperbolic volume
//! estimates they carry.
//!
//! The pipeline: a link-group presentation with meridian weights and a pair of
//! 2×2 holonomy matrices is lifted through the degree-n symmetric power, the
//! Fox Jacobian is pushed through the induced ring map Φ into Laurent
//! polynomial matrices, and the twisted invariant Δₙ is the ratio of a maximal
//! minor determinant to its column normalizer. Evaluating (a corrected form
//! of) Δₙ at t = ±1 and scaling the log-modulus by 4π/n² produces a sequence
//! of volume estimates.
//!
//! Numerics run over a pluggable scalar backend ([`scalar::Real`]): binary64
//! by default with a double-double escalation path, plus an exact
//! quadratic-integer engine that takes over at t = ±1 when every matrix entry
//! lies in an imaginary quadratic ring.

pub mod document;
pub mod exact;
pub mod fixtures;
pub mod invariant;
pub mod laurent;
pub mod matrix;
pub mod rep;
pub mod scalar;
pub mod volume;
pub mod words;
