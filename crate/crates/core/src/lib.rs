//! Parametric kernel for axonometric piping schemes.
//!
//! A [`model::Scheme`] holds the object lists of one drawing. The other
//! modules check it ([`constraints`]), change it ([`edit`]), project it
//! ([`geometry`]), lay it out and render it ([`layout`], [`render_svg`]),
//! store it ([`persist`]) and list its parts ([`specgen`]).

pub mod constraints;
pub mod edit;
pub mod geometry;
pub mod interval;
pub mod layout;
pub mod model;
pub mod persist;
pub mod render_svg;
pub mod specgen;
