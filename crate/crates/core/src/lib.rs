//! Finite state model extraction and runtime verification over execution
//! traces.
//!
//! A trace of field writes and method entries is normalized into writes on
//! a small set of key attributes. Those writes build linear, distinct,
//! abstract, or path models, and temporal properties written in a small
//! `G`/`F`/`P` language are checked on them, either after the fact or
//! incrementally while a program streams its events over a socket.

pub mod abstraction;
pub mod checker;
pub mod cli;
pub mod export;
pub mod generators;
pub mod model;
pub mod online;
pub mod pipeline;
pub mod propspec;
pub mod specfile;
pub mod trace;
pub mod value;
