//! Mining of repetitive single-location edit patterns from revision histories.
//!
//! The pipeline: [`ingest`] walks revision pairs and parses both versions,
//! [`diff`] maps the two trees and derives an edit script, [`extract`] groups
//! connected edits into before/after subtree pairs, [`pattern`] generalizes a
//! set of such pairs into a rewrite rule with [`antiunify`], [`cluster`]
//! greedily partitions the pairs into rule-sharing groups, and [`catalog`]
//! aggregates the groups across projects.

pub mod antiunify;
pub mod ast;
pub mod catalog;
pub mod cluster;
pub mod diff;
pub mod extract;
pub mod ingest;
pub mod pattern;

#[cfg(test)]
pub(crate) mod testutil;
