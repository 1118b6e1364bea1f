// Each integration test crate uses a different subset of these helpers.
#![allow(dead_code)]

pub mod graph_check;
pub mod protocol_model;
