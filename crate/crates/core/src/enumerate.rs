//! Exhaustive enumeration of index sequences in lexicographic order.

use crate::error::{ModelError, Result};

/// Largest number of sequences any enumerating operation will visit.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// `radix^len`, saturating.
pub(crate) fn sequence_count(radix: usize, len: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..len {
        total = total.saturating_mul(radix as u128);
    }
    total
}

pub(crate) fn check_cap(radix: usize, len: usize) -> Result<()> {
    let required = sequence_count(radix, len);
    if required > ENUMERATION_CAP as u128 {
        Err(ModelError::EnumerationTooLarge {
            required,
            cap: ENUMERATION_CAP,
        })
    } else {
        Ok(())
    }
}

/// Calls `visit` with every sequence in `{0..radix}^len`, lexicographically
/// (last position varies fastest). `len == 0` visits the empty sequence once.
/// The caller is responsible for the cap check.
pub(crate) fn for_each_sequence(radix: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut current = vec![0usize; len];
    loop {
        visit(&current);
        // odometer increment
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < radix {
                break;
            }
            current[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_sequence(2, 3, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 8);
        assert_eq!(seen[0], vec![0, 0, 0]);
        assert_eq!(seen[1], vec![0, 0, 1]);
        assert_eq!(seen[7], vec![1, 1, 1]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn empty_length_visits_once() {
        let mut n = 0;
        for_each_sequence(5, 0, |s| {
            assert!(s.is_empty());
            n += 1;
        });
        assert_eq!(n, 1);
    }

    #[test]
    fn cap_boundary() {
        assert!(check_cap(10, 6).is_ok());
        assert_eq!(
            check_cap(10, 7).unwrap_err(),
            ModelError::EnumerationTooLarge {
                required: 10_000_000,
                cap: ENUMERATION_CAP
            }
        );
        assert_eq!(sequence_count(usize::MAX, 40), u128::MAX);
    }
}
