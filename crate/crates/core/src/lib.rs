pub mod bounds;
pub mod certificate;
pub mod cli;
pub mod family;
pub mod graph;
pub mod lp;
pub mod rational;
pub mod scheme;
