//! Direct QPTL semantics on ultimately periodic words and a brute-force
//! satisfiability oracle.
//!
//! A proposition quantified at position `n` only matters from `n` on, so a
//! quantifier picks a word anchored at `n`. Quantifiers range over the
//! lasso shapes within the configured bounds; the oracle is therefore exact
//! for SAT of the searched block and bounded for everything else.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::{Qptl, QptlError};

/// Upper bound on the number of candidate evaluations the oracle tries.
const MAX_CANDIDATES: u128 = 1_000_000;

/// A boolean word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    pub prefix: Vec<bool>,
    pub cycle: Vec<bool>,
}

impl LassoWord {
    pub fn new(prefix: Vec<bool>, cycle: Vec<bool>) -> LassoWord {
        assert!(!cycle.is_empty(), "the cycle of a lasso word is non-empty");
        LassoWord { prefix, cycle }
    }

    pub fn at(&self, n: usize) -> bool {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The same word with the shortest period and then the shortest prefix.
    pub fn canonical(&self) -> LassoWord {
        let c = &self.cycle;
        let period = (1..=c.len())
            .find(|&p| c.len() % p == 0 && (0..c.len()).all(|k| c[k] == c[k % p]))
            .unwrap_or(c.len());
        let mut prefix = self.prefix.clone();
        let mut cycle = c[..period].to_vec();
        while let Some(&last) = prefix.last() {
            if last != cycle[period - 1] {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        LassoWord { prefix, cycle }
    }

    /// Distinct words with prefix length at most `prefix_bound` and period
    /// at most `period_bound`, shortest shapes first.
    pub fn shapes(prefix_bound: usize, period_bound: usize) -> Vec<LassoWord> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for total in 1..=prefix_bound + period_bound {
            for period in 1..=period_bound.min(total) {
                let plen = total - period;
                if plen > prefix_bound {
                    continue;
                }
                for bits in 0u32..1 << total {
                    let bit = |k: usize| (bits >> (total - 1 - k)) & 1 == 1;
                    let w = LassoWord {
                        prefix: (0..plen).map(bit).collect(),
                        cycle: (plen..total).map(bit).collect(),
                    };
                    if seen.insert(w.canonical()) {
                        out.push(w);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |v: &bool| if *v { "t" } else { "f" };
        for v in &self.prefix {
            write!(f, "{},", b(v))?;
        }
        let cycle: Vec<&str> = self.cycle.iter().map(b).collect();
        write!(f, "({})^w", cycle.join(","))
    }
}

impl Serialize for LassoWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An ultimately periodic temporal evaluation, one word per proposition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PeriodicEvaluation {
    pub words: BTreeMap<String, LassoWord>,
}

impl fmt::Display for PeriodicEvaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|(p, w)| format!("{p}: {w}")).collect();
        f.write_str(&parts.join("; "))
    }
}

#[derive(Clone, Default)]
struct Valuation {
    // proposition -> (anchor position, word)
    words: HashMap<String, (usize, Arc<LassoWord>)>,
}

impl Valuation {
    fn at(&self, p: &str, n: usize) -> bool {
        self.words.get(p).is_some_and(|(anchor, w)| w.at(n - anchor))
    }

    fn bind(&self, p: &str, anchor: usize, w: Arc<LassoWord>) -> Valuation {
        let mut words = self.words.clone();
        words.insert(p.to_string(), (anchor, w));
        Valuation { words }
    }

    /// Positions `m >= max(n, E)` repeat with period `L`, where `E` is the
    /// end of the last prefix and `L` the lcm of all periods.
    fn horizon(&self, n: usize) -> usize {
        let mut end = n;
        let mut period = 1usize;
        for (anchor, w) in self.words.values() {
            end = end.max(anchor + w.prefix.len());
            period = lcm(period, w.cycle.len());
        }
        end + period
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

struct Semantics {
    shapes: Vec<Arc<LassoWord>>,
}

impl Semantics {
    fn new(bounds: (usize, usize)) -> Semantics {
        Semantics {
            shapes: LassoWord::shapes(bounds.0, bounds.1)
                .into_iter()
                .map(Arc::new)
                .collect(),
        }
    }

    fn sat(&self, f: &Qptl, val: &Valuation, n: usize) -> bool {
        match f {
            Qptl::True => true,
            Qptl::Atom(p) => val.at(p, n),
            Qptl::Not(a) => !self.sat(a, val, n),
            Qptl::Implies(a, b) => !self.sat(a, val, n) || self.sat(b, val, n),
            Qptl::Next(a) => self.sat(a, val, n + 1),
            Qptl::Until(a, b) => {
                for m in n..val.horizon(n) {
                    if self.sat(b, val, m) {
                        return true;
                    }
                    if !self.sat(a, val, m) {
                        return false;
                    }
                }
                false
            }
            Qptl::Eventually(a) => (n..val.horizon(n)).any(|m| self.sat(a, val, m)),
            Qptl::ExistsProp(p, a) => self
                .shapes
                .iter()
                .any(|w| self.sat(a, &val.bind(p, n, w.clone()), n)),
        }
    }
}

/// Whether `evaluation` satisfies `φ` at position 0. Propositions missing
/// from the evaluation are false everywhere; nested quantifiers range over
/// shapes within `bounds`.
pub fn holds(phi: &Qptl, evaluation: &PeriodicEvaluation, bounds: (usize, usize)) -> bool {
    let val = Valuation {
        words: evaluation
            .words
            .iter()
            .map(|(p, w)| (p.clone(), (0, Arc::new(w.clone()))))
            .collect(),
    };
    Semantics::new(bounds).sat(phi, &val, 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleVerdict {
    Sat { evaluation: PeriodicEvaluation },
    UnsatWithinBounds { prefix: usize, period: usize },
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat { .. })
    }
}

/// Searches evaluations of the free propositions and the leading `∃` block
/// among lasso shapes with prefix at most `prefix_bound` and period at most
/// `period_bound`, in shape order.
pub fn qptl_oracle(
    phi: &Qptl,
    prefix_bound: usize,
    period_bound: usize,
) -> Result<OracleVerdict, QptlError> {
    let exceeded = |reason: &str| QptlError::BoundsExceeded {
        prefix: prefix_bound,
        period: period_bound,
        reason: reason.to_string(),
    };
    if prefix_bound == 0 || period_bound == 0 {
        return Err(exceeded("both bounds must be at least 1"));
    }
    if prefix_bound + period_bound > 16 {
        return Err(exceeded("shapes longer than 16 positions are not enumerated"));
    }
    let (leading, body) = phi.leading_exists();
    let mut block: Vec<String> = phi.free_propositions().into_iter().collect();
    for p in leading {
        if !block.iter().any(|q| q == p) {
            block.push(p.to_string());
        }
    }
    let sem = Semantics::new((prefix_bound, period_bound));
    let k = sem.shapes.len() as u128;
    if k.checked_pow(block.len() as u32).map_or(true, |c| c > MAX_CANDIDATES) {
        return Err(exceeded("too many candidate evaluations"));
    }
    let mut digits = vec![0usize; block.len()];
    loop {
        let val = Valuation {
            words: block
                .iter()
                .zip(&digits)
                .map(|(p, &d)| (p.clone(), (0, sem.shapes[d].clone())))
                .collect(),
        };
        if sem.sat(body, &val, 0) {
            let words = block
                .iter()
                .zip(&digits)
                .map(|(p, &d)| (p.clone(), (*sem.shapes[d]).clone()))
                .collect();
            return Ok(OracleVerdict::Sat {
                evaluation: PeriodicEvaluation { words },
            });
        }
        // Odometer step, last proposition fastest.
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(OracleVerdict::UnsatWithinBounds {
                    prefix: prefix_bound,
                    period: period_bound,
                });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < sem.shapes.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}
