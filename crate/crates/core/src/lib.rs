pub mod cli;
pub mod density;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod pell;
pub mod poly;
pub mod trace;
