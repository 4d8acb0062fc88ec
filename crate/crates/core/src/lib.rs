//! Exact-arithmetic engine for the matrix q-deformed AKNS hierarchy.

pub mod bilinear;
pub mod coeff;
pub mod config;
pub mod difference;
pub mod error;
pub mod hierarchy;
pub mod matrix;
pub mod qop;
pub mod report;
pub mod scalar;
pub mod suite;
pub mod tau;
pub mod timepoly;
pub mod xseries;
pub mod zseries;
