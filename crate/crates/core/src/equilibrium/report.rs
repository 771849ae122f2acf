use serde::Serialize;

use crate::cost::Cost;
use crate::graph::Edge;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Concept {
    Collaborative,
    Nash,
    /// Only single-edge add, drop and swap deviations were checked.
    LinkStable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// An absent edge whose total benefit exceeds the link price; the
    /// coalition of beneficiaries gains `gain` in total by funding it.
    FundableEdge {
        edge: Edge,
        coalition: Vec<usize>,
        gain: Cost,
    },
    /// A payer contributes more than the edge is worth to it and gains by
    /// withdrawing.
    Overpayment {
        edge: Edge,
        player: usize,
        gain: Cost,
    },
    /// The contributions on an edge sum to neither zero nor the link price.
    Unnormalized {
        edge: Edge,
        #[serde(serialize_with = "serialize_rational")]
        sum: Rational,
    },
    /// A unilateral deviation by one player.
    Deviation {
        player: usize,
        from: Vec<usize>,
        to: Vec<usize>,
        gain: Cost,
    },
}

fn serialize_rational<S: serde::Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(value))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumReport {
    pub concept: Concept,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl EquilibriumReport {
    pub fn new(concept: Concept, violations: Vec<Violation>) -> Self {
        let verdict = if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        EquilibriumReport {
            concept,
            verdict,
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
