//! Numerical convex analysis on finite dyadic probability spaces.
//!
//! The crate turns Orlicz-space machinery into executable, testable
//! computations: Young functions and their Legendre conjugates, growth
//! indices, Luxemburg and dual Orlicz norms, upper q-estimates for
//! disjoint families, a Komlós-type extraction engine producing
//! order-bound certificates, and monetary utility functions with their
//! dual (penalty) representations.
//!
//! Everything is exact quadrature over the atoms of a finite dyadic
//! probability space; refinement ladders stand in for atomless spaces.

pub mod config;
pub mod estimates;
pub mod gallery;
pub mod komlos;
pub mod norms;
pub mod risk;
pub mod solvers;
pub mod space;
pub mod tol;
pub mod young;

pub use estimates::{DisjointFamily, QEstimateReport};
pub use komlos::{KomlosCertificate, KpSplit, RvSequence};
pub use norms::{NormResult, SolverTag};
pub use risk::{ConvexSetProbe, DualCheckReport, MonetaryUtility};
pub use space::{DyadicSpace, OrderInterval, RandomVariable};
pub use tol::Tolerances;
pub use young::{Delta2Report, TruncatedPsi, YoungFunction};
