pub mod builtin;
pub mod cli;
pub mod equation;
pub mod expr;
pub mod interval;
pub mod linearize;
pub mod map;
pub mod obstruction;
pub mod quadrature;
pub mod sampling;
