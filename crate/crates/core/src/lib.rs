pub mod avatar;
pub mod check;
pub mod gen;
pub mod matrix;
pub mod oracle;
pub mod parse;
pub mod problem;
pub mod proof;
pub mod prover;
pub mod refine;
pub mod sat;
pub mod tableau;
pub mod theory;
pub mod unify;
