//! Bijective coordinate maps between the original frequency lattice and the
//! reduced (unwrapped or tilted) lattices the solver works in, together with
//! the matching time-domain embeddings.
//!
//! Every frequency map `F` comes with a time map `T` such that
//! `F(w) . t == w . T(t)`, which is what allows a projection in frequency
//! space to be carried out by choosing where the signal is sampled.

pub(crate) mod partition;
mod tilt;

pub use partition::{unwrap_freq, unwrap_time, wrap_freq, Partition};
pub use tilt::{tilt_freq, tilt_time, untilt_freq, TiltParams};
