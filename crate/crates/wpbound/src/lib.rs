//! Combinatorial volume bounds for moduli of punctured surfaces.
//!
//! The moduli space of genus-`g` surfaces with `n ≥ 1` punctures carries a
//! cell decomposition indexed by trivalent ribbon graphs, with cells cut out
//! in λ-length (Penner) coordinates. This crate enumerates the graphs, builds
//! the coordinates and the intersection two-form on each cell, verifies the
//! inequalities that make the cells integrable, and evaluates the explicit
//! upper and lower bounds for the total volume — exactly where the formulas
//! are closed-form, by quadrature and Monte Carlo where they are not.
//!
//! Layering, bottom to top: [`ribbon_graph`] (the combinatorial objects),
//! [`penner`] (coordinates and the cell domain), [`wp_form`] (the two-form,
//! its top wedge power, densities), [`decomposition`] (chains, wheels, and
//! the integration lemmas), [`mc`] (quadrature and Monte Carlo estimation),
//! [`bounds`] (closed-form bound arithmetic), [`cli`] (the command-line
//! front end).

pub mod bounds;
pub mod cli;
pub mod decomposition;
pub mod mc;
pub mod penner;
pub mod ribbon_graph;
pub mod wp_form;
