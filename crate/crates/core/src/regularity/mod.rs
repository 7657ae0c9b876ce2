//! Von Neumann regularity of cellular automata: weak inverses, their
//! search, obstructions, and an aggregated verdict.

mod inverse;
mod spp;

use serde::Serialize;

use crate::image::{classify_image, image_language, is_injective, is_surjective, non_injectivity_witness, ImageKind, Lasso, NonInjectivity};
use crate::periodic::{wpp_check, CyclicWord, WppResult};
use crate::rule::LocalRule;

pub use inverse::{
    choice_map, find_weak_inverses, find_weak_inverses_with, propagated_partial_rule, PartialLocalRule, SearchOptions,
};
pub use spp::{
    in_image, preimage_with_tails_exists, spp_falsify, AsymptoticPoint, CertificateEntry, Kill, SppCertificate,
    SppResult,
};

/// `f ∘ g ∘ f = f`.
pub fn verify_weak_inverse(f: &LocalRule, g: &LocalRule) -> bool {
    if f.alphabet() != g.alphabet() {
        return false;
    }
    g.compose(f).and_then(|gf| f.compose(&gf)).map(|fgf| fgf.equals(f)).unwrap_or(false)
}

/// `g ∘ f ∘ g`, which is a weak inverse `c` of `f` satisfying `c f c = c`
/// whenever `g` is a weak inverse.
pub fn generalized_inverse(f: &LocalRule, g: &LocalRule) -> crate::Result<LocalRule> {
    g.compose(&f.compose(g)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum RadiusSearch {
    Found {
        radius: u32,
        #[serde(serialize_with = "ser_hexes")]
        inverses: Vec<LocalRule>,
    },
    NoneUpTo {
        r_max: u32,
    },
}

fn ser_hexes<S: serde::Serializer>(rules: &[LocalRule], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rules.iter().map(rule_label))
}

fn rule_label(g: &LocalRule) -> String {
    g.to_hex().unwrap_or_else(|_| format!("{g:?}"))
}

/// The least radius with a weak inverse, with every inverse of that radius.
pub fn minimal_weak_inverse_radius(f: &LocalRule, r_max: u32, p: usize) -> RadiusSearch {
    for r in 0..=r_max {
        let inverses = find_weak_inverses(f, r, p);
        if !inverses.is_empty() {
            return RadiusSearch::Found { radius: r, inverses };
        }
    }
    RadiusSearch::NoneUpTo { r_max }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub r_max: u32,
    pub p: usize,
    pub spp_p: usize,
    pub spp_mid_len: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { r_max: 4, p: 11, spp_p: 2, spp_mid_len: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Regular,
    NonRegular,
    Unknown,
}

/// Why a verdict was reached, with the evidence to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", content = "witness")]
pub enum Reason {
    WeakInverseFound { radius: u32 },
    #[serde(rename = "WPPFails")]
    WppFails { point: CyclicWord },
    ProperSoficImage { lasso: Lasso },
    SurjectiveNotInjective { collision: NonInjectivity },
    #[serde(rename = "SPPFails")]
    SppFails { certificate: SppCertificate },
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub rule: LocalRule,
    pub status: Status,
    pub reason: Reason,
    /// Every weak inverse of the least radius found, in hex order.
    pub inverses: Vec<LocalRule>,
    pub budgets: Budgets,
}

impl Verdict {
    pub fn inverse(&self) -> Option<&LocalRule> {
        self.inverses.first()
    }

    pub fn optimal_radius(&self) -> Option<u32> {
        match self.reason {
            Reason::WeakInverseFound { radius } => Some(radius),
            _ => None,
        }
    }

    /// Re-checks the stored evidence from scratch.
    pub fn verify(&self) -> bool {
        let f = &self.rule;
        match (&self.status, &self.reason) {
            (Status::Regular, Reason::WeakInverseFound { .. }) => {
                !self.inverses.is_empty() && self.inverses.iter().all(|g| verify_weak_inverse(f, g))
            }
            (Status::NonRegular, Reason::WppFails { point }) => {
                crate::periodic::in_periodic_image(f, point)
                    && !crate::periodic::has_periodic_preimage(f, point, point.len()).unwrap_or(true)
            }
            (Status::NonRegular, Reason::ProperSoficImage { lasso }) => lasso.verify(&image_language(f)),
            (Status::NonRegular, Reason::SurjectiveNotInjective { collision }) => {
                is_surjective(f) && collision.verify(f)
            }
            (Status::NonRegular, Reason::SppFails { certificate }) => certificate.verify(f),
            (Status::Unknown, Reason::BudgetExhausted) => true,
            _ => false,
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let reason = serde_json::to_value(&self.reason).map_err(serde::ser::Error::custom)?;
        let mut st = s.serialize_struct("Verdict", 7)?;
        st.serialize_field("rule", &rule_label(&self.rule))?;
        st.serialize_field("status", &self.status)?;
        st.serialize_field("reason", &reason["reason"])?;
        st.serialize_field("witness", &reason.get("witness").cloned().unwrap_or(serde_json::Value::Null))?;
        st.serialize_field("inverse_hex", &self.inverses.iter().map(rule_label).collect::<Vec<_>>())?;
        st.serialize_field("optimal_radius", &self.optimal_radius())?;
        st.serialize_field("budgets", &self.budgets)?;
        st.end()
    }
}

/// Runs the obstructions from cheapest to most expensive, then the search.
pub fn regularity_verdict(f: &LocalRule, budgets: Budgets) -> Verdict {
    let verdict = |status, reason, inverses| Verdict { rule: f.clone(), status, reason, inverses, budgets };
    let image = classify_image(f);
    if image.kind == ImageKind::ProperSofic {
        let lasso = image.lasso.expect("proper sofic classification carries a lasso");
        return verdict(Status::NonRegular, Reason::ProperSoficImage { lasso }, Vec::new());
    }
    if let WppResult::Fails { witness } = wpp_check(f) {
        return verdict(Status::NonRegular, Reason::WppFails { point: witness }, Vec::new());
    }
    let surjective = image.kind == ImageKind::FullShift;
    if surjective {
        if let Some(collision) = non_injectivity_witness(f) {
            return verdict(Status::NonRegular, Reason::SurjectiveNotInjective { collision }, Vec::new());
        }
    }
    if surjective && is_injective(f) {
        // Reversible: an inverse exists at some radius, so keep looking.
        let mut r = 0;
        loop {
            let inverses = find_weak_inverses(f, r, budgets.p);
            if !inverses.is_empty() {
                return verdict(Status::Regular, Reason::WeakInverseFound { radius: r }, inverses);
            }
            r += 1;
        }
    }
    if let SppResult::Falsified { certificate } = spp_falsify(f, budgets.spp_p, budgets.spp_mid_len) {
        return verdict(Status::NonRegular, Reason::SppFails { certificate }, Vec::new());
    }
    match minimal_weak_inverse_radius(f, budgets.r_max, budgets.p) {
        RadiusSearch::Found { radius, inverses } => {
            verdict(Status::Regular, Reason::WeakInverseFound { radius }, inverses)
        }
        RadiusSearch::NoneUpTo { .. } => verdict(Status::Unknown, Reason::BudgetExhausted, Vec::new()),
    }
}
