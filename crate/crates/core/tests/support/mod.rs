#![allow(dead_code)]

pub mod mockapis;
pub mod programs;
pub mod snapshots;
pub mod straightline;
pub mod truncations;
