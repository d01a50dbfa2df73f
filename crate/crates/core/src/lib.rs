//! Kinetostatic analysis of the Orthoglide, a 3-DOF translational parallel
//! machine tool with three orthogonal prismatic actuators and parallelogram
//! legs.
//!
//! The crate covers inverse/forward kinematics, Jacobian conditioning and
//! the manipulability ellipsoid, singularity classification, the
//! couple-span test for pure translation, parallelogram bar statics, and
//! grid sampling of the workspace.

pub mod cli;
pub mod error;
pub mod grid;
pub mod kinematics;
pub mod kinetostatics;
pub mod magnitude;
pub mod mechanism;
pub mod screw;
pub mod singularity;
pub mod statics;
pub mod units;
pub mod workspace;

pub use error::{Error, Result};
pub use grid::{CartesianBox, Execution};
pub use kinematics::JacobianPair;
pub use magnitude::Magnitude;
pub use mechanism::{
    default_orthoglide, BiglideGeometry, JointVector, LegFrame, LegVariant, OrthoglideGeometry,
    ToolPose,
};
