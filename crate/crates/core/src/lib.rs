pub mod conceptid;
pub mod engine;
pub mod evalkit;
pub mod lexdb;
pub mod similarity;
pub mod textprep;
pub mod weighting;
pub mod wsd;
