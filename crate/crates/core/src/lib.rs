pub mod error;
pub mod qmat;
pub mod observables;
pub mod numfmt;
pub mod game;
pub mod bounds;
pub mod quantum_opt;
pub mod selftest;
pub mod certify;
pub mod report;
