//! Reference data on the elementary CA, kept in `data/eca_golden.json`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
pub struct Golden {
    pub version: u32,
    pub conditions: Vec<ConditionRow>,
    pub optimal_inverses: Vec<OptimalRow>,
    pub inverse_hex: BTreeMap<u32, Vec<String>>,
    pub templates: BTreeMap<u32, Template>,
    pub first_offenders: BTreeMap<u32, Vec<String>>,
}

/// Which necessary conditions for regularity a non-regular ECA satisfies.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub struct ConditionRow {
    pub eca: u32,
    pub sft_image: bool,
    pub wpp: bool,
    pub spp: bool,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub struct OptimalRow {
    pub eca: u32,
    pub radius: u32,
    pub count: usize,
    pub recommended_p: usize,
}

/// A hex code with `*` placeholders, filled left to right by each filler.
#[derive(Clone, Debug, Deserialize)]
pub struct Template {
    pub template: String,
    pub fillers: Vec<String>,
}

impl Template {
    pub fn expand(&self) -> Vec<String> {
        self.fillers.iter().map(|f| fill(&self.template, f)).collect()
    }
}

fn fill(template: &str, filler: &str) -> String {
    let mut digits = filler.chars();
    template.chars().map(|c| if c == '*' { digits.next().expect("enough filler digits") } else { c }).collect()
}

pub fn golden() -> &'static Golden {
    static DATA: OnceLock<Golden> = OnceLock::new();
    DATA.get_or_init(|| serde_json::from_str(include_str!("../data/eca_golden.json")).expect("valid golden data"))
}

impl Golden {
    /// Every expected inverse hex code at the optimal radius, sorted.
    pub fn expected_inverses(&self, eca: u32) -> Option<Vec<String>> {
        let mut codes = match (self.inverse_hex.get(&eca), self.templates.get(&eca)) {
            (Some(codes), _) => codes.clone(),
            (None, Some(t)) => t.expand(),
            (None, None) => return None,
        };
        codes.sort();
        Some(codes)
    }
}
