//! Decks, multidecks and universal trees for rooted binary tree shapes.
//!
//! * [`shape`]: canonical shapes, constructors and text/code serialization.
//! * [`enumerate`]: exhaustive generation and Wedderburn–Etherington counts.
//! * [`deck`]: decks and multidecks by dynamic programming and by brute force.
//! * [`reconstruct`]: determination tests, reconstruction numbers and the
//!   families of equal-deck tree pairs.
//! * [`extremal`]: extremal deck sizes and subtree counts.
//! * [`universal`]: `k`-universal trees and the minimum-size search.
//! * [`verify`]: the acceptance checks, shared by the test suite and the CLI.

pub mod deck;
pub mod enumerate;
pub mod error;
pub mod extremal;
pub mod reconstruct;
pub mod shape;
pub mod universal;
pub mod verify;

pub use deck::{Deck, DeckProfile, MultiDeck};
pub use error::{Error, Result};
pub use shape::{CanonicalCode, RootSplit, TreeShape};
