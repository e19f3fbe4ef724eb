pub mod analytics;
pub mod detect;
pub mod diff;
pub mod fixture;
pub mod lex;
pub mod maintenance;
pub mod miner;
pub mod pipeline;
pub mod store;
pub mod taxonomy;
