pub mod census;
pub mod certifier;
pub mod geometry;
pub mod laurent;
pub mod oracle;
pub mod ordering;
pub mod stepmodel;
pub mod walkgroup;
