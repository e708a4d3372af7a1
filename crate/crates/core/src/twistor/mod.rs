//! Twistor realizations: the massless momentum map on positive twistors, the
//! Poisson structure in the affine chart `(ζ₁, ζ₂, ζ)`, the pulled-back
//! spin-orbit flow, and the massive realization on positive flags.

mod bracket;
mod flag;
mod flow;
mod massless;
pub mod mat2;

pub use bracket::{
    bracket_matrix, form_matrix, state_jet, twistor_bracket, wirtinger_fd, FnTwistor, Pulled, TwistorObservable,
    Wirtinger, ZetaCoord,
};
pub use flag::{
    flag_forward, flag_from_pair, flag_invert, m_expanded, momentum_map_massive, s_squared, s_squared_vectors,
    FlagCoords, FlagPoint, MassiveImage, ORTHOGONALITY_TOL,
};
pub use flow::{printed_twistor_rates, twistor_vf, KAPPA_ZETA_RATE};
pub use massless::{
    form, kappa, momentum_map_massless, observables_from_coords, printed_coords, printed_pullback, pullback,
    twistor_form, w_matrix_from_vector, w_vector_from_matrix, CoordObservables, MasslessImage, PrintedCoords,
    SpinObservables, TwistorPoint, KAPPA_LJ, KAPPA_P, KAPPA_W, KAPPA_W0,
};
pub use mat2::{finite, inner, Mat2C, Spinor, C};
