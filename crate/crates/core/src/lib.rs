pub mod cli;
pub mod complexes;
pub mod error;
pub mod exactalg;
pub mod omega;
pub mod propagation;
pub mod coherence;
pub mod deltasys;
pub mod injective;
pub mod synth;
