//! Certified everlasting encryption on a classically simulated quantum
//! substrate.
//!
//! The stack builds up in layers: GF(2) codes and GF(2^k) field arithmetic,
//! a stabilizer-tableau simulator, classical SKE/PKE/oracle building
//! blocks, certified-deletion encryption with its certified-everlasting
//! wrappers (random-oracle and CSS-code variants), receiver non-committing
//! encryption, a garbling scheme whose ciphertext rows carry deletion
//! certificates, and 1-bounded/adaptive/q-bounded functional encryption.
//!
//! Everything quantum is simulated: registers are classical stabilizer
//! descriptions, no-cloning is an API discipline enforced by ownership and
//! a harness-only duplication gate, and deletion-detection rates are
//! checked statistically rather than proven.

pub mod base;
pub mod bits;
pub mod cd;
pub mod fe;
pub mod field;
pub mod garble;
pub mod gf2;
pub mod qsim;
pub mod rnce;
pub mod stats;
pub mod wire;
