//! Extremal deck sizes and subtree counts.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::deck::SetEngine;
use crate::enumerate::shapes_of_size;
use crate::error::{Error, Result};
use crate::reconstruct::{ensure_feasible, DEFAULT_SHAPE_CEILING};
use crate::shape::TreeShape;

/// Largest size of a size-`(n-1)` deck of an `n`-leaf tree.
pub fn g(n: usize) -> usize {
    match n {
        0 => 0,
        1 | 2 => n - 1,
        _ if n % 3 == 2 => 2 * (n / 3),
        _ => 2 * (n / 3) - 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// `|deck(T, n - 1)|`.
    MaxDeck,
    /// Number of distinct induced subtrees, all sizes.
    MinSubtrees,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalReport {
    pub n: usize,
    pub quantity: Quantity,
    pub value: usize,
    /// Shapes attaining `value`, in canonical order.
    pub achievers: Vec<TreeShape>,
    /// Whether `value` and `achievers` agree with the closed form.
    pub consistent: bool,
}

fn extremal_over<F>(n: usize, ceiling: u128, quantity: Quantity, score: F, maximize: bool) -> Result<(usize, Vec<TreeShape>)>
where
    F: Fn(&mut SetEngine, &TreeShape) -> usize + Sync,
{
    if n == 0 {
        return Err(Error::InvalidParameter {
            what: "extremal search",
            detail: "n must be positive".into(),
        });
    }
    let what = match quantity {
        Quantity::MaxDeck => "maximum deck search",
        Quantity::MinSubtrees => "minimum subtree search",
    };
    ensure_feasible(n, ceiling, what)?;
    let shapes = shapes_of_size(n);
    let scores: Vec<usize> = shapes
        .par_iter()
        .map_init(SetEngine::new, |e, t| score(e, t))
        .collect();
    let best = if maximize {
        *scores.iter().max().expect("every size has a shape")
    } else {
        *scores.iter().min().expect("every size has a shape")
    };
    let achievers = shapes
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s == best)
        .map(|(t, _)| t.clone())
        .collect();
    Ok((best, achievers))
}

pub fn max_deck_bruteforce(n: usize) -> Result<ExtremalReport> {
    max_deck_bruteforce_with(n, DEFAULT_SHAPE_CEILING)
}

pub fn max_deck_bruteforce_with(n: usize, ceiling: u128) -> Result<ExtremalReport> {
    let (value, achievers) = extremal_over(
        n,
        ceiling,
        Quantity::MaxDeck,
        |e, t| if n == 1 { 0 } else { e.deck_size(t, n - 1).expect("n - 1 >= 1") },
        true,
    )?;
    let z = TreeShape::z_tree(n)?;
    let consistent = value == g(n) && achievers.contains(&z);
    Ok(ExtremalReport {
        n,
        quantity: Quantity::MaxDeck,
        value,
        achievers,
        consistent,
    })
}

pub fn min_subtrees_bruteforce(n: usize) -> Result<ExtremalReport> {
    min_subtrees_bruteforce_with(n, DEFAULT_SHAPE_CEILING)
}

pub fn min_subtrees_bruteforce_with(n: usize, ceiling: u128) -> Result<ExtremalReport> {
    let (value, achievers) = extremal_over(
        n,
        ceiling,
        Quantity::MinSubtrees,
        |e, t| e.profile(t).subtree_count(),
        false,
    )?;
    let mut expected = vec![TreeShape::caterpillar(n)?];
    if n == 4 {
        expected.push(TreeShape::complete(2));
        expected.sort();
    }
    let consistent = value == n && achievers == expected;
    Ok(ExtremalReport {
        n,
        quantity: Quantity::MinSubtrees,
        value,
        achievers,
        consistent,
    })
}

/// All `J_{k,l}` with `2^k * l = n`, `l >= 2`, in canonical order.
pub fn jellyfish_of_size(n: usize) -> Vec<TreeShape> {
    let mut out = BTreeSet::new();
    let mut k = 0u32;
    while n.is_multiple_of(1usize << k) && (n >> k) >= 2 {
        out.insert(TreeShape::jellyfish(k, n >> k).expect("l >= 2"));
        k += 1;
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonDeckReport {
    pub n: usize,
    /// Shapes whose size-`(n-1)` deck has one member.
    pub shapes: Vec<TreeShape>,
    pub jellyfish: Vec<TreeShape>,
    pub consistent: bool,
}

pub fn singleton_deck_shapes(n: usize) -> Result<SingletonDeckReport> {
    singleton_deck_shapes_with(n, DEFAULT_SHAPE_CEILING)
}

pub fn singleton_deck_shapes_with(n: usize, ceiling: u128) -> Result<SingletonDeckReport> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            what: "singleton_deck_shapes",
            detail: format!("need n >= 2, got {n}"),
        });
    }
    ensure_feasible(n, ceiling, "singleton deck search")?;
    let all = shapes_of_size(n);
    let flags: Vec<bool> = all
        .par_iter()
        .map_init(SetEngine::new, |e, t| e.deck_size(t, n - 1).expect("n - 1 >= 1") == 1)
        .collect();
    let shapes: Vec<TreeShape> = all
        .iter()
        .zip(flags)
        .filter(|(_, f)| *f)
        .map(|(t, _)| t.clone())
        .collect();
    let jellyfish = jellyfish_of_size(n);
    let consistent = shapes == jellyfish;
    Ok(SingletonDeckReport {
        n,
        shapes,
        jellyfish,
        consistent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonJDeckReport {
    pub n: usize,
    /// `(shape, j)` with `4 <= j <= n - 2` and a one-member size-`j` deck.
    pub violations: Vec<(TreeShape, usize)>,
}

impl SingletonJDeckReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Only caterpillars have a one-member size-`j` deck for `4 <= j <= n - 2`.
pub fn singleton_jdeck_check(n: usize) -> Result<SingletonJDeckReport> {
    ensure_feasible(n, DEFAULT_SHAPE_CEILING, "singleton j-deck check")?;
    let shapes = shapes_of_size(n);
    let caterpillar = TreeShape::caterpillar(n.max(1))?;
    let per_shape: Vec<Vec<(TreeShape, usize)>> = shapes
        .par_iter()
        .filter(|t| **t != caterpillar)
        .map_init(SetEngine::new, |e, t| {
            (4..n.saturating_sub(1))
                .filter(|&j| e.deck_size(t, j).expect("j < n") == 1)
                .map(|j| (t.clone(), j))
                .collect()
        })
        .collect();
    Ok(SingletonJDeckReport {
        n,
        violations: per_shape.into_iter().flatten().collect(),
    })
}

/// Subtree count of `Y_m` for `m ≡ 2 (mod 4)`, `m >= 6`: `1 + 8 * 5^((m-6)/4)`.
pub fn s_y_closed_form(m: usize) -> Result<u128> {
    if m < 6 || m % 4 != 2 {
        return Err(Error::InvalidParameter {
            what: "s_y_closed_form",
            detail: format!("need m >= 6 and m = 2 mod 4, got {m}"),
        });
    }
    let e = u32::try_from((m - 6) / 4).map_err(|_| Error::InvalidParameter {
        what: "s_y_closed_form",
        detail: format!("m = {m} is too large"),
    })?;
    5u128
        .checked_pow(e)
        .and_then(|p| p.checked_mul(8))
        .and_then(|p| p.checked_add(1))
        .ok_or(Error::InvalidParameter {
            what: "s_y_closed_form",
            detail: format!("S(Y_{m}) overflows u128"),
        })
}

/// Subtree counts of `Y_m` for `m = 6, 10, ..` up to `upto`, from the linear
/// recurrence `s(m + 8) = 6 s(m + 4) - 5 s(m)` seeded with `s(6)` and `s(10)`.
pub fn y_counts_by_recurrence(s6: u128, s10: u128, upto: usize) -> Vec<(usize, u128)> {
    let mut out = Vec::new();
    let mut m = 6;
    let (mut prev, mut cur) = (s6, s10);
    while m <= upto {
        out.push((m, prev));
        let next = 6 * cur - 5 * prev;
        prev = cur;
        cur = next;
        m += 4;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceCheck {
    pub n: usize,
    pub y_n1: usize,
    pub x_n4: usize,
    pub y_n5: usize,
    pub x_n8: usize,
}

impl RecurrenceCheck {
    pub fn y_step_holds(&self) -> bool {
        self.y_n5 as i128 == 2 * self.x_n4 as i128 - self.y_n1 as i128
    }

    pub fn x_step_holds(&self) -> bool {
        self.x_n8 as i128 == 4 * self.y_n5 as i128 - self.x_n4 as i128 - 2 * self.y_n1 as i128
    }

    pub fn holds(&self) -> bool {
        self.y_step_holds() && self.x_step_holds()
    }
}

/// Checks the coupled subtree-count recurrences for `X` and `Y` at `n ≡ 1 (mod 4)`,
/// `n >= 5`, by direct counting.
pub fn verify_xy_recurrences(n: usize) -> Result<RecurrenceCheck> {
    if n < 5 || n % 4 != 1 {
        return Err(Error::InvalidParameter {
            what: "verify_xy_recurrences",
            detail: format!("need n >= 5 and n = 1 mod 4, got {n}"),
        });
    }
    let mut e = SetEngine::new();
    let mut count = |t: TreeShape| e.profile(&t).subtree_count();
    Ok(RecurrenceCheck {
        n,
        y_n1: count(TreeShape::y_tree(n + 1)?),
        x_n4: count(TreeShape::x_tree(n + 4)?),
        y_n5: count(TreeShape::y_tree(n + 5)?),
        x_n8: count(TreeShape::x_tree(n + 8)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_values() {
        let got: Vec<usize> = (1..=12).map(g).collect();
        assert_eq!(got, vec![0, 1, 1, 1, 2, 3, 3, 4, 5, 5, 6, 7]);
    }

    #[test]
    fn max_deck_small() {
        for n in 1..=9 {
            let r = max_deck_bruteforce(n).unwrap();
            assert!(r.consistent, "n = {n}: {r:?}");
        }
    }

    #[test]
    fn min_subtrees_small() {
        for n in 1..=9 {
            let r = min_subtrees_bruteforce(n).unwrap();
            assert!(r.consistent, "n = {n}: {r:?}");
        }
        assert_eq!(min_subtrees_bruteforce(4).unwrap().achievers.len(), 2);
    }

    #[test]
    fn singleton_decks_are_jellyfish() {
        for n in 2..=10 {
            assert!(singleton_deck_shapes(n).unwrap().consistent, "n = {n}");
        }
        assert_eq!(jellyfish_of_size(8).len(), 3);
        assert_eq!(jellyfish_of_size(12).len(), 3);
    }

    #[test]
    fn singleton_jdecks() {
        for n in 6..=10 {
            assert!(singleton_jdeck_check(n).unwrap().holds(), "n = {n}");
        }
    }

    #[test]
    fn y_closed_form_matches_recurrence() {
        let rec = y_counts_by_recurrence(9, 41, 42);
        for (m, s) in rec {
            assert_eq!(s_y_closed_form(m).unwrap(), s);
        }
        assert_eq!(s_y_closed_form(14).unwrap(), 201);
        assert!(s_y_closed_form(7).is_err());
    }

    #[test]
    fn xy_recurrences_small() {
        let r = verify_xy_recurrences(5).unwrap();
        assert_eq!((r.y_n1, r.y_n5), (9, 41));
        assert!(r.holds(), "{r:?}");
    }
}
