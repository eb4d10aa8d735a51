//! A laboratory for spin-1 contextuality experiments.
//!
//! The crate models a single question from three angles:
//!
//! * [`spin`] builds the operator algebra - spin components along arbitrary
//!   directions, the squared-component contexts at azimuth `phi`, and the
//!   maximal operators that measure a whole context at once, including the
//!   polynomial reconstruction of each squared component from the maximal
//!   operator alone.
//! * [`epr`] puts two such systems in a maximally entangled state and
//!   compares the exact Born-rule correlation of the shared third-axis
//!   reading (identically 1, with exactly zero probability on mismatched
//!   outcomes) against seeded simulated experiments and against a strawman
//!   "strong contextuality" model that the data cleanly rejects.
//! * [`ks`] handles the combinatorial side: orthogonality diagrams over rays
//!   in real 3-space, deterministic enumeration of two-valued measures, and
//!   colorability certificates, with a built-in 17-direction set whose
//!   orthogonality closure admits no measure at all.
//!
//! [`matrix`] supplies the dense complex linear algebra the rest sits on.
//! The `contextlab` binary exposes all of it as subcommands with
//! byte-deterministic JSON/CSV output.

pub mod epr;
pub mod ks;
pub mod matrix;
pub mod spin;

pub use epr::{
    BipartiteState, CorrelationEstimate, CorrelationModel, EprError, HypothesisReport,
    JointDistribution, MeasurementRecord, OutcomeLabel,
};
pub use ks::{
    ColorabilityCertificate, DiagramFormat, KsError, MeasureEnumeration, OrthogonalityDiagram,
    Ray, TwoValuedMeasure,
};
pub use matrix::{C64, ComplexMatrix, ComplexVector, MatrixError, SpectralDecomposition};
pub use spin::{
    CartesianDirection, IdentityReport, MaximalOperator, Observable, PolarDirection, SpinError,
    SquaredSpinTriple,
};
