pub mod numfield;
pub mod polyalg;
pub mod decomp;
pub mod monopoly;
pub mod padicroots;
pub mod reduction;
pub mod monodromy;
