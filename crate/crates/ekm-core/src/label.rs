//! Class labels (person identifiers) with a numeric-aware ordering.

use std::cmp::Ordering;
use std::fmt;

/// Identifier of one class (one person) in a training set.
///
/// Ordering is *natural*: runs of ASCII digits compare by numeric value, so
/// `s2 < s10` even though plain byte order would say otherwise. This single
/// ordering is used everywhere a deterministic class order is needed —
/// directory scanning, report rows, and tie-breaking between classes whose
/// distances come out exactly equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassLabel(String);

impl ClassLabel {
    pub fn new(name: impl Into<String>) -> Self {
        ClassLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassLabel {
    fn from(s: &str) -> Self {
        ClassLabel(s.to_string())
    }
}

impl From<String> for ClassLabel {
    fn from(s: String) -> Self {
        ClassLabel(s)
    }
}

impl Ord for ClassLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for ClassLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compare two strings, treating maximal digit runs as numbers.
///
/// Leading zeros matter only as a final tie-break ("07" sorts before "7"
/// nowhere, they are equal numerically, so fall back to byte order).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ca, cb) = (a[i], b[j]);
        if ca.is_ascii_digit() && cb.is_ascii_digit() {
            let si = i;
            let sj = j;
            while i < a.len() && a[i].is_ascii_digit() {
                i += 1;
            }
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            // Compare digit runs numerically: strip leading zeros, then by
            // length, then lexicographically.
            let da = trim_zeros(&a[si..i]);
            let db = trim_zeros(&b[sj..j]);
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = ca.cmp(&cb);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    // One string exhausted: shorter comes first, identical prefixes fall
    // back to raw byte order so distinct strings never compare equal.
    (a.len() - i).cmp(&(b.len() - j)).then_with(|| a.cmp(b))
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let start = digits.iter().take_while(|&&d| d == b'0').count();
    if start == digits.len() {
        &digits[digits.len() - 1..]
    } else {
        &digits[start..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_runs_compare_numerically() {
        assert_eq!(natural_cmp("s2", "s10"), Ordering::Less);
        assert_eq!(natural_cmp("s10", "s10"), Ordering::Equal);
        assert_eq!(natural_cmp("10.pgm", "9.pgm"), Ordering::Greater);
    }

    #[test]
    fn plain_text_compares_bytewise() {
        assert_eq!(natural_cmp("alice", "bob"), Ordering::Less);
        assert_eq!(natural_cmp("a", "ab"), Ordering::Less);
    }

    #[test]
    fn leading_zeros_are_numeric_ties() {
        // 07 == 7 numerically; byte order is the final tie-break.
        assert_eq!(natural_cmp("s07", "s7"), Ordering::Less);
        assert_eq!(natural_cmp("s007", "s07"), Ordering::Less);
    }

    #[test]
    fn labels_sort_naturally() {
        let mut labels: Vec<ClassLabel> =
            ["s10", "s1", "s40", "s4"].iter().map(|s| (*s).into()).collect();
        labels.sort();
        let order: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
        assert_eq!(order, vec!["s1", "s4", "s10", "s40"]);
    }
}
