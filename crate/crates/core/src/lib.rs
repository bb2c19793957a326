pub mod containers;
pub mod corridor;
pub mod gap;
pub mod greedy;
pub mod lab;
pub mod lshape;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod steinberg;
pub mod transforms;
