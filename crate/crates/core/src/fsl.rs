//! Fundamental shadow link presentations and the invariant of the unfilled
//! pair `(M_c, L_FSL)`.
//!
//! A presentation lists, for each building block, the link component carrying
//! each of its six edges (1-based), in the slot order whose vertex triples are
//! `(1,2,3)`, `(1,5,6)`, `(2,4,6)`, `(3,4,5)`.

use crate::qarith::{sign_phase, LogComplex, RootContext};
use crate::sixj::{Colors6, SixjEvaluator};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Version tag written into and accepted from presentation JSON.
pub const SCHEMA_VERSION: &str = "1";

/// Filled components and their slopes, as given in the presentation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SurgerySpec {
    /// 1-based indices of the filled components.
    pub filled: Vec<usize>,
    /// Slope `[p, q]` for each filled component, in the same order.
    pub slopes: Vec<[i64; 2]>,
}

/// Combinatorial input shared by the quantum and geometric sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FslPresentation {
    #[serde(default = "default_schema")]
    pub schema: String,
    /// Number of building blocks.
    pub c: usize,
    /// Number of link components.
    pub n: usize,
    /// `incidence[s][k]` is the 1-based component of edge slot `k` of block `s`.
    pub incidence: Vec<[usize; 6]>,
    /// Mutation counters `ι_i`.
    pub iota: Vec<i64>,
    /// Integer framings `a_0^i`.
    pub framing: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surgery: Option<SurgerySpec>,
    /// Signature of the auxiliary surgery link; affects phases only.
    #[serde(default)]
    pub signature_hint: i64,
}

fn default_schema() -> String {
    SCHEMA_VERSION.to_string()
}

/// A machine-readable validation finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code")]
pub enum Finding {
    UnusedComponent {
        component: usize,
    },
    IndexOutOfRange {
        block: usize,
        slot: usize,
        index: usize,
    },
    BlockCountMismatch {
        expected: usize,
        found: usize,
    },
    LengthMismatch {
        field: String,
        expected: usize,
        found: usize,
    },
    UnsupportedSchema {
        found: String,
    },
    FilledIndexOutOfRange {
        index: usize,
    },
    DuplicateFilled {
        component: usize,
    },
    InvalidSlope {
        component: usize,
        p: i64,
        q: i64,
    },
    /// Warning: the asymptotic statement assumes odd denominators.
    EvenDenominator {
        component: usize,
        q: i64,
    },
}

impl Finding {
    pub fn code(&self) -> &'static str {
        match self {
            Finding::UnusedComponent { .. } => "UnusedComponent",
            Finding::IndexOutOfRange { .. } => "IndexOutOfRange",
            Finding::BlockCountMismatch { .. } => "BlockCountMismatch",
            Finding::LengthMismatch { .. } => "LengthMismatch",
            Finding::UnsupportedSchema { .. } => "UnsupportedSchema",
            Finding::FilledIndexOutOfRange { .. } => "FilledIndexOutOfRange",
            Finding::DuplicateFilled { .. } => "DuplicateFilled",
            Finding::InvalidSlope { .. } => "InvalidSlope",
            Finding::EvenDenominator { .. } => "EvenDenominator",
        }
    }

    /// JSON-pointer style location of the offending field.
    pub fn path(&self) -> String {
        match self {
            Finding::UnusedComponent { .. } => "/incidence".into(),
            Finding::IndexOutOfRange { block, slot, .. } => format!("/incidence/{block}/{slot}"),
            Finding::BlockCountMismatch { .. } => "/incidence".into(),
            Finding::LengthMismatch { field, .. } => format!("/{field}"),
            Finding::UnsupportedSchema { .. } => "/schema".into(),
            Finding::FilledIndexOutOfRange { .. } | Finding::DuplicateFilled { .. } => {
                "/surgery/filled".into()
            }
            Finding::InvalidSlope { .. } | Finding::EvenDenominator { .. } => "/surgery/slopes".into(),
        }
    }

    pub fn is_warning(&self) -> bool {
        matches!(self, Finding::EvenDenominator { .. })
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at {}: {:?}", self.code(), self.path(), self)
    }
}

impl FslPresentation {
    /// Parses presentation JSON; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// All findings, errors and warnings alike; empty iff the presentation is clean.
    pub fn validate(&self) -> Vec<Finding> {
        let mut out = Vec::new();
        if self.schema != SCHEMA_VERSION {
            out.push(Finding::UnsupportedSchema { found: self.schema.clone() });
        }
        if self.incidence.len() != self.c {
            out.push(Finding::BlockCountMismatch { expected: self.c, found: self.incidence.len() });
        }
        for (field, len) in [("iota", self.iota.len()), ("framing", self.framing.len())] {
            if len != self.n {
                out.push(Finding::LengthMismatch { field: field.into(), expected: self.n, found: len });
            }
        }
        let mut used = vec![false; self.n];
        for (s, block) in self.incidence.iter().enumerate() {
            for (k, &i) in block.iter().enumerate() {
                if (1..=self.n).contains(&i) {
                    used[i - 1] = true;
                } else {
                    out.push(Finding::IndexOutOfRange { block: s, slot: k, index: i });
                }
            }
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                out.push(Finding::UnusedComponent { component: i + 1 });
            }
        }
        if let Some(surgery) = &self.surgery {
            out.extend(self.validate_surgery(surgery));
        }
        out
    }

    fn validate_surgery(&self, s: &SurgerySpec) -> Vec<Finding> {
        let mut out = Vec::new();
        if s.slopes.len() != s.filled.len() {
            out.push(Finding::LengthMismatch {
                field: "surgery/slopes".into(),
                expected: s.filled.len(),
                found: s.slopes.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &i in &s.filled {
            if !(1..=self.n).contains(&i) {
                out.push(Finding::FilledIndexOutOfRange { index: i });
            } else if std::mem::replace(&mut seen[i - 1], true) {
                out.push(Finding::DuplicateFilled { component: i });
            }
        }
        for (&i, &[p, q]) in s.filled.iter().zip(&s.slopes) {
            if q < 1 || num_integer::gcd(p, q) != 1 {
                out.push(Finding::InvalidSlope { component: i, p, q });
            } else if q % 2 == 0 {
                out.push(Finding::EvenDenominator { component: i, q });
            }
        }
        out
    }

    /// Errors unless every finding is a warning.
    pub fn ensure_valid(&self) -> Result<()> {
        let errors: Vec<String> =
            self.validate().iter().filter(|f| !f.is_warning()).map(|f| f.to_string()).collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidPresentation(errors.join("; ")))
        }
    }

    /// Filled components (1-based) and slopes; empty when there is no surgery.
    pub fn filled(&self) -> (&[usize], &[[i64; 2]]) {
        match &self.surgery {
            Some(s) => (&s.filled, &s.slopes),
            None => (&[], &[]),
        }
    }

    /// Colors of the six edges of block `s` induced by per-component values.
    pub fn block_values<T: Copy>(&self, s: usize, per_component: &[T]) -> [T; 6] {
        self.incidence[s].map(|i| per_component[i - 1])
    }

    /// `(-1)^{ι m/2} q^{(a + ι/2) m(m+2)/2}` for component `i` (0-based) with framing `a`.
    pub fn framing_phase(&self, ctx: &RootContext, i: usize, a: i64, m: u32) -> LogComplex {
        let m = m as i64;
        let iota = self.iota[i];
        sign_phase(iota * m / 2) * ctx.q_pow((2 * a + iota) * m * (m + 2), 4)
    }
}

/// Checks that a coloring is even with entries in `[0, r-3]`.
pub fn check_coloring(ctx: &RootContext, m: &[u32]) -> Result<()> {
    match m.iter().find(|&&x| x % 2 != 0 || x > ctx.r() - 3) {
        Some(x) => {
            Err(Error::InvalidArgument(format!("color {x} is not an even integer in [0, {}]", ctx.r() - 3)))
        }
        None => Ok(()),
    }
}

/// Product of the lenient 6j-symbols of all blocks.
pub(crate) fn block_product(
    p: &FslPresentation,
    ctx: &RootContext,
    colors: &[u32],
    eval: &dyn SixjEvaluator,
) -> Result<LogComplex> {
    let mut acc = LogComplex::ONE;
    for s in 0..p.c {
        let m: Colors6 = p.block_values(s, colors);
        acc = acc * eval.evaluate_lenient(ctx, m)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// `RT_r(M_c, L_FSL, m) = μ_r^{-c} ∏_i (-1)^{ι_i m_i/2} q^{(a_i + ι_i/2) m_i(m_i+2)/2} ∏_s |6j_s|`.
///
/// Inadmissible induced 6-tuples contribute an exact zero.
pub fn rt_fsl(
    ctx: &RootContext,
    p: &FslPresentation,
    m: &[u32],
    eval: &dyn SixjEvaluator,
) -> Result<LogComplex> {
    p.ensure_valid()?;
    if m.len() != p.n {
        return Err(Error::InvalidArgument(format!("expected {} colors, got {}", p.n, m.len())));
    }
    check_coloring(ctx, m)?;
    let mut acc = LogComplex::from_real(ctx.mu()).powi(-(p.c as i32));
    for (i, &mi) in m.iter().enumerate() {
        acc = acc * p.framing_phase(ctx, i, p.framing[i], mi);
    }
    Ok(acc * block_product(p, ctx, m, eval)?)
}
