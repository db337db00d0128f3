//! Reference spectra of the linear problem, first-order energy shifts of the
//! nonlinearity, and minimization over the regulator η.

mod eigen;
mod optimize;
mod shifts;

pub use eigen::{count_nodes, solve_linear_spectrum, EigenSolution};
pub use optimize::{minimize_over_eta, EtaMinimum, ETA_MARGIN};
pub use shifts::{
    first_order_shift_numeric, node_shift_eta_profile, nodeless_shift_integral, sho_ground_shift_closed, ShiftMethod,
    ShiftResult, NODELESS_CALIBRATION,
};
