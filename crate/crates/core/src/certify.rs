//! Pass/fail records for bounds and geometric-schedule convergence tests.

/// Absolute slack granted to every `measured <= bound` comparison.
pub const BOUND_SLACK: f64 = 1e-8;

/// Ratios below this are treated as exactly zero remainders (linear controls).
pub const NEGLIGIBLE: f64 = 1e-10;

/// Required final/initial reduction of a convergence schedule.
pub const DECAY_FACTOR: f64 = 1e-3;

/// One bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub claim: String,
    pub bound: f64,
    pub measured: f64,
    pub passed: bool,
}

impl Certificate {
    /// Passes iff `measured <= bound + slack`.
    pub fn upper(claim: impl Into<String>, bound: f64, measured: f64, slack: f64) -> Self {
        Certificate {
            claim: claim.into(),
            bound,
            measured,
            passed: measured <= bound + slack,
        }
    }

    /// Passes iff `measured >= bound - slack`.
    pub fn lower(claim: impl Into<String>, bound: f64, measured: f64, slack: f64) -> Self {
        Certificate {
            claim: claim.into(),
            bound,
            measured,
            passed: measured >= bound - slack,
        }
    }

    pub fn flag(claim: impl Into<String>, passed: bool, measured: f64) -> Self {
        Certificate {
            claim: claim.into(),
            bound: f64::NAN,
            measured,
            passed,
        }
    }

    /// `bound - measured`; negative on failure.
    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }
}

/// Outcome of a geometric-schedule convergence test.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayVerdict {
    /// Every value is below [`NEGLIGIBLE`].
    Negligible,
    /// Strictly decreasing from row `from` on, final/initial below [`DECAY_FACTOR`].
    Decaying {
        from: usize,
        reduction: f64,
    },
    Failed {
        reason: String,
    },
}

impl DecayVerdict {
    pub fn passed(&self) -> bool {
        !matches!(self, DecayVerdict::Failed { .. })
    }
}

/// Judge a sequence that should tend to zero.
///
/// Passes when all values are negligible, or when the sequence is strictly
/// decreasing over (at least) its last three entries and the final value is
/// at most `1e-3` times the first.
pub fn decay_verdict(values: &[f64]) -> DecayVerdict {
    if values.iter().any(|v| !v.is_finite()) {
        return DecayVerdict::Failed {
            reason: "non-finite value".into(),
        };
    }
    if values.iter().all(|v| v.abs() <= NEGLIGIBLE) {
        return DecayVerdict::Negligible;
    }
    if values.len() < 3 {
        return DecayVerdict::Failed {
            reason: "schedule shorter than three rows".into(),
        };
    }
    let n = values.len();
    let mut from = n - 1;
    while from > 0 && values[from] < values[from - 1] {
        from -= 1;
    }
    if n - from < 3 {
        return DecayVerdict::Failed {
            reason: format!("not decreasing over the last rows (tail starts at row {from})"),
        };
    }
    let initial = values[0].abs();
    let reduction = values[n - 1].abs() / initial;
    if !(values[n - 1].abs() <= DECAY_FACTOR * initial) {
        return DecayVerdict::Failed {
            reason: format!("final/initial = {reduction:e} exceeds {DECAY_FACTOR:e}"),
        };
    }
    DecayVerdict::Decaying { from, reduction }
}

/// Row of a remainder schedule `chi_k = 2^-k chi_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderRow {
    pub k: usize,
    /// Norm of the perturbation in the claim's input norm.
    pub input_norm: f64,
    pub remainder: f64,
    pub ratio: f64,
    /// Second-order bound available when the derivative is Lipschitz.
    pub second_order_bound: Option<f64>,
}

/// Rows ordered by decreasing perturbation size.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RemainderTable {
    pub rows: Vec<RemainderRow>,
}

impl RemainderTable {
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    pub fn remainders(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.remainder).collect()
    }

    /// The o(|chi|) verdict. Linear controls are recognised through the
    /// remainders themselves, which must then all be at most [`NEGLIGIBLE`].
    pub fn verdict(&self) -> DecayVerdict {
        if self.rows.iter().all(|r| r.remainder <= NEGLIGIBLE) {
            return DecayVerdict::Negligible;
        }
        decay_verdict(&self.ratios())
    }

    /// Worst `remainder - bound` over rows carrying a second-order bound.
    pub fn second_order_excess(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.second_order_bound.map(|b| r.remainder - b))
            .reduce(f64::max)
    }

    pub fn second_order_holds(&self) -> Option<bool> {
        self.second_order_excess().map(|e| e <= BOUND_SLACK)
    }
}
