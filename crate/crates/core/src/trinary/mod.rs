//! Programmed measurement unitaries and trinary states.

mod completeness;
mod dims;
mod program;
pub(crate) mod state;

pub use completeness::{validate_informational_completeness, CompletenessReport, GRAM_RANK_TOL};
pub use dims::TrinaryDims;
pub use program::{
    apply_programmed, build_pointer_measurement, induced_effects, ProgramBranch,
    ProgrammedUnitary,
};
pub use state::{program_density, to_schmidt_form, Branch, TrinaryState};
