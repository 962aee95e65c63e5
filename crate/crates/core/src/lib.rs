pub mod channel;
pub mod coding;
pub mod divergence;
pub mod error;
pub mod fuzz;
pub mod holevo;
pub mod matcore;
pub mod sampler;
pub mod simplex;
