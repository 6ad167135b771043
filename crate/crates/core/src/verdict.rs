use std::fmt;

/// Outcome of an assumption check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    /// Process exit code: 0 consistent, 2 inconsistent, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Consistent => 0,
            Verdict::Inconsistent => 2,
            Verdict::Inconclusive => 3,
        }
    }

    /// Inconsistent dominates inconclusive, which dominates consistent.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Inconsistent, _) | (_, Inconsistent) => Inconsistent,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Consistent,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Pass => "pass",
            Check::Fail => "fail",
            Check::Inconclusive => "inconclusive",
        })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}
