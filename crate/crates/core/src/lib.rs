//! Finite-dimensional verification of curvature terms attached to Riemannian
//! flows. Everything is expressed over an orthonormal transverse frame:
//! exterior algebra with explicit monomial bases, Clifford products and their
//! degree-preserving brackets, curvature operators on 2-forms split into a
//! restricted part plus the part induced by the flow's deformation tensor,
//! Bochner operators on p-forms assembled by two independent routes, and the
//! eigenvalue bounds these operators satisfy, checked numerically against
//! model flows with known data.

pub mod bounds;
pub mod clifford;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod linalg;
pub mod models;

pub use bounds::{
    equality_structure_check, ext_bound_report, lambda_bound, norm_identity_check,
    total_bound_report, BoundReport, EqualityChecker, EqualityStatus, EqualityStructureReport,
    ExtBoundReport, FamilyValue, NormIdentityReport,
};
pub use clifford::{
    bracket_two_form, clifford_left, clifford_product, clifford_right, lie_bracket, Multivector,
};
pub use curvature::{
    bochner_direct, bochner_quadratic, canonical_form, eigenfamilies, r_ext_from_h,
    sphere_oneill_check, split_curvature, BochnerAssembler, CanonicalBlocks, CurvatureOperator,
    EigenFamily, EigenfamilyReport, FamilyLabel, FormOperator, ONeillTensor, SphereCheckReport,
};
pub use error::{Error, Result};
pub use exterior::{
    basis_multi_indices, binomial, inner, interior, rank_of, unrank_of, wedge, Form, MultiIndex,
};
pub use models::{
    constant_curvature, hopf, kahler_form, sphere_minimal, strict_product, tilted_product,
    AmbientModel, Expectation, ExpectationKind, ModelFlow, ModelKind, SelfCheckItem,
};
