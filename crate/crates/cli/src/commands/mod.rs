pub mod analyze;
pub mod forest;
pub mod regroup;
pub mod simulate;
pub mod threshold;
pub mod validate;
