pub mod bench;
pub mod optimize;
pub mod prepare;
pub mod train;
