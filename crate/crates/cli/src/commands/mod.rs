pub mod ablate;
pub mod balance;
pub mod diagnose;
pub mod evaluate;
pub mod synth;
pub mod train;
