pub mod cli;
pub mod comparison;
pub mod encomplex;
pub mod exterior;
pub mod gonal5;
pub mod koszul;
pub mod linalg;
pub mod poly;
pub mod scroll;
