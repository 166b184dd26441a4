//! Lie symmetry toolkit for the generalized Heath equation
//! `u_t = a u_x + u_x^2/2 - b^2 u_xx/2 + f(x, u)`
//! and the heat equation with nonlinear source `phi_tau = phi_xx + fhat(x, phi)` it maps to.

pub mod catalog;
pub mod cli;
pub mod expr;
pub mod lie;
pub mod model;
pub mod solutions;
pub mod solver;
