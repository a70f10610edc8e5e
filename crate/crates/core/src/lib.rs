//! Random-matrix simulation and verification toolkit: sample covariance
//! spectra under block-independent and random-tensor column models, the
//! Marchenko-Pastur law and its anisotropic generalization, concentration of
//! quadratic forms, and exact combinatorial checks.

pub mod concentration;
pub mod linalg;
pub mod models;
pub mod mplaw;
pub mod combinatorics;
