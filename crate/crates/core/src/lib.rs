//! Hyperbolic contrastive model for knowledge-aware recommendation.
//!
//! The crate trains user/item/entity embeddings in the Lorentz model of
//! hyperbolic space. Items aggregate knowledge-graph neighbors through a
//! distance-based attention, user-item signals propagate over the
//! interaction graph, and a contrastive objective compares two model-level
//! views produced by embedding dropout, cross-layer pairing, or weight
//! pruning. A small reverse-mode tape differentiates the whole loss,
//! including the curvature parameter.
//!
//! Module map:
//! * [`lorentz`] - manifold types and origin-anchored maps
//! * [`mask`] - deterministic dropout mask streams
//! * [`graph`] - interaction/knowledge graph storage, splits, synthesis
//! * [`model`] - learnable parameter container
//! * [`attention`] - knowledge-graph neighbor attention
//! * [`encoder`] - KG aggregation + graph propagation forward pass
//! * [`aug`] - contrastive view generation (dropout / cross-layer / pruning)
//! * [`objective`] - ranking (BPR) and contrastive (InfoNCE) losses
//! * [`tape`], [`diff`] - reverse-mode autodiff and the training gradient
//! * [`eval`] - all-ranking Recall@K / NDCG@K
//! * [`config`], [`checkpoint`], [`train`] - run configuration, binary
//!   checkpoints, and the training loop behind the CLI

pub mod attention;
pub mod encoder;
pub mod error;
pub mod graph;
pub mod lorentz;
pub mod mask;
pub mod model;

pub use error::{Error, Result};
