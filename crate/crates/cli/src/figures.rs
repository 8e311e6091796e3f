//! Bundled experiment definitions for the four SER figures.

use pnc_lab_core::{Scheme, SnrGrid};
use serde::Deserialize;

pub const NAMES: [&str; 4] = ["fig4", "fig5", "fig6", "fig7"];

const SOURCES: [&str; 4] = [
    include_str!("../figures/fig4.json"),
    include_str!("../figures/fig5.json"),
    include_str!("../figures/fig6.json"),
    include_str!("../figures/fig7.json"),
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureBundle {
    pub figure: String,
    pub title: String,
    #[serde(rename = "M")]
    pub order: usize,
    pub delta_ab_db: f64,
    /// `(N_A, N_R, N_B)` triples.
    pub setups: Vec<[usize; 3]>,
    pub schemes: Vec<Scheme>,
    /// Also emit the closed-form AS1 upper bound.
    pub bound: bool,
    pub snr_db: SnrGrid,
    pub min_errors: u64,
    pub max_trials: u64,
    pub ser_floor: Option<f64>,
}

pub fn bundle(name: &str) -> Option<FigureBundle> {
    let i = NAMES.iter().position(|n| *n == name)?;
    Some(serde_json::from_str(SOURCES[i]).expect("bundled figure configs are valid"))
}
