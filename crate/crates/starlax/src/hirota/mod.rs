//! Bilinear calculus: elementary Schur polynomials, Hirota derivatives on
//! exponential sums, residuals of the bilinear hierarchy equations, and the
//! dispersionless Fay relation generator.

mod dfay;
mod expsum;
mod mpoly;
mod schur;

pub use dfay::{
    dfay_relations, dhirota_check, f_poly_terms_sorted, f_poly_text, f_var, fidx,
    numeric_identity_check,
    reparam_p_text, DHirotaStatus, FIdx, FMono, FPoly, FRelation, HirotaError, RelationSet,
};
pub use expsum::{kp_bilinear_residual, ExpSum, HirotaPoly, WaveVec};
pub use mpoly::{MPoly, MonKey};
pub use schur::{
    render_letter_poly, schur_polys, time_poly_terms_sorted, time_poly_text, time_var, TimeMono,
    TimePoly,
};
