//! Workbench for the one-round discrete Voronoi game VG(k,1).
//!
//! Player 1 places `k` facilities, Player 2 answers with one facility and
//! serves every user strictly closer to it than to all of Player 1's
//! facilities. The crate builds Player 1 placements with provable bounds,
//! computes Player 2's exact best response and checks the bounds.

pub mod best_response;
pub mod cli;
pub mod epsilon_table;
pub mod error;
pub mod game_engine;
pub mod geometry;
pub mod io;
pub mod p1_strategies;
pub mod service_api;

pub use error::{Result, VgError};
