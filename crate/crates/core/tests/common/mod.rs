pub mod alignment;
pub mod oracles;
pub mod strategies;
