use std::fmt;
use std::str::FromStr;

/// `--k` argument: a single `k` or an inclusive range `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub from: u64,
    pub to: u64,
}

impl KRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.from..=self.to
    }

    pub fn is_single(&self) -> bool {
        self.from == self.to
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("invalid k {t:?}"));
        let (from, to) = match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                (parse(a)?, parse(b)?)
            }
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if from < 2 {
            return Err(format!("k must be at least 2, got {from}"));
        }
        if to < from {
            return Err(format!("empty range {from}..{to}"));
        }
        Ok(Self { from, to })
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.from)
        } else {
            write!(f, "{}..{}", self.from, self.to)
        }
    }
}
