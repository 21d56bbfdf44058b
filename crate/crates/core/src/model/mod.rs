//! Physical parameters, derived rates and Lindblad model assembly.
//!
//! Rates and frequencies are angular throughout; builders take them in rad/s.

mod builder;
mod lindblad;
mod params;
mod validity;

pub use builder::{
    build_cooling_model, build_lab_frame_model, build_squeezing_model, cooling_model, squeezed_frame_transform,
};
pub use lindblad::{Dissipator, Drive, Frame, LindbladModel, ModelParams};
pub use params::{
    bare_coupling, derive_params, CantileverGeometry, CoolingDrive, DerivedParams, DriveParams, MechanicalSpec,
    QubitParams, SqueezingDrive, TipCoupling, DRIVE_COEFFICIENT_LIMIT,
};
pub use validity::{check_validity, ValidityCheck, ValidityReport, Verdict, MARGINAL_RATIO, PASS_RATIO};
