pub mod asym;
pub mod completion;
pub mod error;
pub mod fixtures;
pub mod fs_complex;
pub mod marked_graph;
pub mod metric;
pub mod rational;
pub mod suite;
pub mod verify;
pub mod words;
