//! Job documents. Every kind is validated by serde before anything runs.

use serde::Deserialize;

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Job {
    Gauss {
        p: u64,
        #[serde(default = "one")]
        s: u32,
        #[serde(default = "one")]
        degree: u32,
        #[serde(default)]
        lambda: CharSelection,
    },
    Hd {
        p: u64,
        #[serde(default = "one")]
        s: u32,
        /// Check the product formula for this n.
        n: Option<u64>,
        /// Check lifting to these degrees.
        #[serde(default)]
        lift: Vec<u32>,
        #[serde(default)]
        lambda: CharSelection,
    },
    Divisor {
        moduli: Vec<u64>,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default = "default_max_n")]
        max_n: u64,
        seed: Option<u64>,
    },
    Identity {
        p: u64,
        #[serde(default = "one")]
        s: u32,
        monomial: Vec<Term>,
        depth: Option<u32>,
    },
    Monom {
        p: u64,
        #[serde(default = "one")]
        s: u32,
        exponents: Vec<i64>,
        characters: Vec<CharSpec>,
        a: i64,
        depth: Option<u32>,
        #[serde(default = "yes")]
        pointwise: bool,
    },
    Stalk {
        p: u64,
        #[serde(default = "one")]
        s: u32,
        #[serde(default)]
        exponents: Vec<i64>,
        characters: Vec<CharSpec>,
        a: i64,
        /// Compare against the closed form for the (n, m, d) family instead of a free datum.
        gmtr: Option<Gmtr>,
    },
    Binom {
        n: u64,
        r: Option<u64>,
        s: Option<u64>,
    },
    Norm {
        p: u64,
        #[serde(default = "one")]
        s: u32,
        factor_degrees: Vec<u32>,
        ranks: Vec<i64>,
        characters: Vec<CharSpec>,
        a: i64,
        depth: Option<u32>,
    },
    Suite {
        name: String,
        /// Restrict to these criteria.
        criteria: Option<Vec<u8>>,
        seed: Option<u64>,
        depth: Option<u32>,
    },
}

fn default_trials() -> usize {
    200
}

fn default_max_n() -> u64 {
    3
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub degree: u32,
    pub index: i64,
    pub n: i64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gmtr {
    pub n: usize,
    pub m: usize,
    pub d: u64,
}

/// "trivial", {"eps": n} or {"index": i}; the degree comes from where the character is used.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CharSpec {
    Named(Named),
    Eps { eps: u64 },
    Index { index: i64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Named {
    Trivial,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(untagged)]
pub enum CharSelection {
    #[default]
    #[serde(skip)]
    Default,
    All(All),
    Indices(Vec<i64>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum All {
    All,
}

impl Job {
    pub fn kind(&self) -> &'static str {
        match self {
            Job::Gauss { .. } => "gauss",
            Job::Hd { .. } => "hd",
            Job::Divisor { .. } => "divisor",
            Job::Identity { .. } => "identity",
            Job::Monom { .. } => "monom",
            Job::Stalk { .. } => "stalk",
            Job::Binom { .. } => "binom",
            Job::Norm { .. } => "norm",
            Job::Suite { .. } => "suite",
        }
    }
}
