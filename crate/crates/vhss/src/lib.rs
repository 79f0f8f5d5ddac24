//! Exact, seedable simulation of a verifiable hybrid quantum secret sharing
//! protocol built on self-dual-containing binary code pairs.
//!
//! Everything is exact: the quantum state is tracked with a stabilizer
//! tableau extended by one symbolic logical amplitude pair, so fidelities
//! and abort statistics carry no floating-point simulation error beyond
//! the amplitude bookkeeping itself.

pub mod codes;
pub mod css;
pub mod experiment;
pub mod gf2;
pub mod netsim;
pub mod pauli;
pub mod protocol;
pub mod statevec;
pub mod tableau;
pub mod vcss;
