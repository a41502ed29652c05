//! Outcome-supervised reinforcement learning for schema-conditioned event
//! extraction, at a scale that runs on one CPU core.
//!
//! The pipeline: [`schema`] defines the event inventory, [`events`] parses and
//! validates extracted outputs, [`scoring`] and [`reward`] turn outputs into
//! F1-based rewards, [`policy`] is a linear softmax over candidate outputs,
//! [`trainer`] runs SFT and the EventRL loop, [`corpus`] builds the synthetic
//! seen/unseen data, and [`cli`] wires it into commands.

pub mod cli;
pub mod corpus;
pub mod events;
mod lexer;
pub mod policy;
pub mod reward;
pub mod schema;
pub mod scoring;
pub mod trainer;

pub use lexer::Position;
