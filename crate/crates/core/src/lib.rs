pub mod gfseries;
pub mod interchange;
pub mod nottingham;
pub mod herbrand;
pub mod truncation;
pub mod ramcheck;
pub mod pdyn;
pub mod cli;
