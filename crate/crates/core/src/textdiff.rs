//! Character-level diff between two property values.
//!
//! The match score of a Similarity criterion is the minimal number of
//! single-character add and delete operations turning one value into the
//! other, i.e. `|a| + |b| - 2 * LCS(a, b)`. Computed with Myers' greedy
//! O((n+m)·d) algorithm over code points; values coming from one recording
//! tool per version pair are compared without normalization.

/// Total count of add plus delete operations for one value pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffScore {
    pub ops: usize,
}

/// Minimal add/delete operation count transforming `a` into `b`.
pub fn diff_ops(a: &str, b: &str) -> DiffScore {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    DiffScore {
        ops: myers_distance(&a, &b),
    }
}

fn myers_distance(a: &[char], b: &[char]) -> usize {
    let n = a.len() as isize;
    let m = b.len() as isize;
    let max = n + m;
    if max == 0 {
        return 0;
    }
    let offset = max;
    // furthest-reaching x per diagonal k, stored at offset + k
    let mut v = vec![0isize; 2 * max as usize + 1];
    for d in 0..=max {
        let mut k = -d;
        while k <= d {
            let mut x = if k == -d || (k != d && v[(offset + k - 1) as usize] < v[(offset + k + 1) as usize])
            {
                v[(offset + k + 1) as usize]
            } else {
                v[(offset + k - 1) as usize] + 1
            };
            let mut y = x - k;
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            v[(offset + k) as usize] = x;
            if x >= n && y >= m {
                return d as usize;
            }
            k += 2;
        }
    }
    unreachable!("paths of length n+m always reach the end")
}

/// Similarity eligibility: both values non-null and at most `max_ops` apart.
/// Returns the score iff eligible.
pub fn similarity(a: Option<&str>, b: Option<&str>, max_ops: usize) -> Option<DiffScore> {
    match (a, b) {
        (Some(a), Some(b)) => {
            let score = diff_ops(a, b);
            (score.ops <= max_ops).then_some(score)
        }
        _ => None,
    }
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Exhaustive LCS reference, independent of the diff implementation:
    //! enumerates every subsequence of the shorter string and tests it
    //! against the longer one.

    fn is_subsequence(needle: &[char], haystack: &[char]) -> bool {
        let mut it = haystack.iter();
        needle.iter().all(|c| it.any(|h| h == c))
    }

    pub fn lcs_len(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
        assert!(short.len() <= 16, "oracle is exponential");
        let mut best = 0;
        for mask in 0u32..(1 << short.len()) {
            let sub: Vec<char> = short
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| *c)
                .collect();
            if sub.len() > best && is_subsequence(&sub, long) {
                best = sub.len();
            }
        }
        best
    }

    pub fn diff_ops(a: &str, b: &str) -> usize {
        a.chars().count() + b.chars().count() - 2 * lcs_len(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_strings_cost_nothing() {
        assert_eq!(diff_ops("Ok", "Ok").ops, 0);
        assert_eq!(diff_ops("", "").ops, 0);
    }

    #[test]
    fn pure_insertion_costs_length() {
        assert_eq!(diff_ops("", "abc").ops, 3);
        assert_eq!(diff_ops("abc", "").ops, 3);
    }

    #[test]
    fn cut_copy_costs_five() {
        // oracle: LCS("Cut", "Copy") = 1, so 3 + 4 - 2*1 = 5
        assert_eq!(oracle::lcs_len("Cut", "Copy"), 1);
        assert_eq!(diff_ops("Cut", "Copy").ops, 5);
    }

    #[test]
    fn open_open_file_costs_five() {
        // oracle: LCS("Open", "Open File") = 4, so 4 + 9 - 2*4 = 5
        assert_eq!(oracle::lcs_len("Open", "Open File"), 4);
        assert_eq!(diff_ops("Open", "Open File").ops, 5);
    }

    #[test]
    fn similarity_eligibility() {
        assert_eq!(similarity(Some("Open"), Some("Open"), 0).unwrap().ops, 0);
        // score 5 exceeds the bound of 2
        assert_eq!(similarity(Some("Cut"), Some("Copy"), 2), None);
        assert_eq!(similarity(None, Some("x"), 10), None);
        assert_eq!(similarity(Some("x"), None, 10), None);
        assert_eq!(similarity(None, None, 10), None);
    }

    #[test]
    fn unicode_is_compared_by_code_point() {
        assert_eq!(diff_ops("naïve", "naive").ops, 2);
        assert_eq!(diff_ops("über", "über").ops, 0);
    }

    fn short_string() -> impl Strategy<Value = String> {
        proptest::string::string_regex("[abc]{0,10}").unwrap()
    }

    proptest! {
        #[test]
        fn self_diff_is_zero(a in short_string()) {
            prop_assert_eq!(diff_ops(&a, &a).ops, 0);
        }

        #[test]
        fn symmetric(a in short_string(), b in short_string()) {
            prop_assert_eq!(diff_ops(&a, &b), diff_ops(&b, &a));
        }

        #[test]
        fn bounded(a in short_string(), b in short_string()) {
            let ops = diff_ops(&a, &b).ops;
            let (n, m) = (a.chars().count(), b.chars().count());
            prop_assert!(ops >= n.abs_diff(m));
            prop_assert!(ops <= n + m);
        }

        #[test]
        fn matches_exhaustive_oracle(a in short_string(), b in short_string()) {
            prop_assert_eq!(diff_ops(&a, &b).ops, oracle::diff_ops(&a, &b));
        }
    }
}
