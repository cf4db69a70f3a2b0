//! FCIF and CLIF text formats, plus the conceptual view files that travel
//! alongside them.
//!
//! Lexical rules shared by all three: whitespace separates tokens, braces
//! delimit lists, section keywords are uppercase and open a line, and `#`
//! as the first thing on a line starts a comment. Names made of
//! `[A-Za-z0-9._/:#=<>-]` are written bare; anything else is double-quoted
//! with backslash escapes.

mod clif;
mod fcif;
mod lexer;
mod views;

pub use clif::{clif_to_fcif, emit_clif, fcif_to_clif, parse_clif, ClifDocument};
pub use fcif::{emit_fcif, parse_fcif, FcifDocument};
pub use views::{emit_views, parse_views};
