pub mod scalar;
pub mod ring;
pub mod linalg;
pub mod algebroid;
pub mod structures;
pub mod morimoto;
pub mod contact;
pub mod catalog;
pub mod cli;
