//! Chart-level Riemannian geometry by finite differences.

pub mod chart;
pub mod fields;

pub use chart::{
    connection_coefficients, connection_nabla, form_tensor, metric_derivative, ricci, riemann, scal,
    torsion_tensor, ChartMetric, Coefficients, ConnectionSpec, Curvature, Domain, FdPolicy, PointFn,
};
pub use fields::{
    codifferential, codifferential_hodge, connection_form, covariant_hessian, d_field, exterior_derivative,
    frame_field, nabla_form, spinor_nabla, to_coords, to_frame, FormField, SpinorField, VectorField,
};
pub mod models;
pub mod verify;

pub use models::{model_names, Model, ModelInfo, CATALOG};
pub use verify::{
    fd_convergence, verify_fixspinor_ricci, verify_foliation, verify_forms_law, verify_hopf, verify_plumbing,
    verify_spinor_parallel, verify_torsion_identities, verify_vec_rigidity, verify_weyl, IdentityCheck, Measure,
    ModelReport, RigidityReport, VerifyConfig,
};
