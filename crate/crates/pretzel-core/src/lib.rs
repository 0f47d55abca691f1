//! Computational algebra engine for pretzel monoids.
//!
//! Pretzel monoids are monoids of birooted edge-labeled graphs taken up to
//! isomorphism, multiplied by gluing end to start and closed under the
//! unary `+` that moves the end root back onto the start. Graphs are kept
//! in a normal form reached by identifying the endpoints of identity-labeled
//! paths (with respect to a chosen cancellative monoid of label values) and
//! then retracting. The engine decides word equality in the finitely
//! presented left adequate monoids these graphs model, enumerates small
//! pretzel monoids, and checks the defining axioms on what it builds.

pub mod cancellative;
pub mod graphs;
pub mod idempath;
pub mod monoidlab;
pub mod pretzel;
pub mod retractcore;
pub mod terms;
pub mod treegen;
