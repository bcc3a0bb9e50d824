pub mod fftower;
pub(crate) mod modlinalg;
pub mod par;
pub mod truncring;
pub mod matgroup;
pub mod edl;
pub mod actions;
pub mod chartab;
pub mod syscheck;
