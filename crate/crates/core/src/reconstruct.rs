//! Reconstruction of trees from their decks.
//!
//! The size-`j` (multi)decks determine the size-`n` trees when no two distinct
//! size-`n` shapes share a size-`j` (multi)deck. Determination at `j` implies
//! determination at every larger `j`, since the size-`j` multideck determines
//! the smaller ones (see [`crate::deck::project_multideck`]).

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rayon::prelude::*;

use crate::deck::{MultiEngine, SetEngine};
use crate::enumerate::{shapes_of_size, wedderburn};
use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// Default ceiling on the number of size-`n` shapes an exhaustive sweep may
/// visit (`W_18 = 56011`).
pub const DEFAULT_SHAPE_CEILING: u128 = 60_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeckMode {
    Deck,
    MultiDeck,
}

impl fmt::Display for DeckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeckMode::Deck => "deck",
            DeckMode::MultiDeck => "multideck",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminationReport {
    pub n: usize,
    pub j: usize,
    pub mode: DeckMode,
    pub determined: bool,
    /// Least colliding pair (by canonical order) when not determined.
    pub witness: Option<(TreeShape, TreeShape)>,
    pub shapes: usize,
    /// Number of distinct (multi)decks among the size-`n` shapes.
    pub distinct: usize,
}

impl DeterminationReport {
    pub fn to_records(&self) -> String {
        let mut out = format!(
            "determination\tn={}\tj={}\tmode={}\tdetermined={}\tshapes={}\tdistinct={}\n",
            self.n, self.j, self.mode, self.determined, self.shapes, self.distinct
        );
        if let Some((a, b)) = &self.witness {
            out.push_str(&format!("witness\t{a}\t{b}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReconstructionNumber {
    pub n: usize,
    pub value: usize,
    pub mode: DeckMode,
}

pub(crate) fn ensure_feasible(n: usize, ceiling: u128, what: &str) -> Result<()> {
    let count = wedderburn(n);
    if count > ceiling {
        return Err(Error::Infeasible {
            what: format!("{what} over all {n}-leaf shapes"),
            estimate: count,
            limit: ceiling,
        });
    }
    Ok(())
}

fn group_collisions<K: Hash + Eq + Send>(
    shapes: &[TreeShape],
    keys: Vec<K>,
) -> (usize, Option<(TreeShape, TreeShape)>) {
    let mut first_seen: HashMap<K, usize> = HashMap::with_capacity(keys.len());
    let mut best: Option<(usize, usize)> = None;
    for (idx, key) in keys.into_iter().enumerate() {
        match first_seen.get(&key) {
            Some(&prev) => {
                // Shapes come in canonical order, so (prev, idx) is the least
                // pair in this group once idx is its second member.
                let cand = (prev, idx);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
            None => {
                first_seen.insert(key, idx);
            }
        }
    }
    let distinct = first_seen.len();
    (
        distinct,
        best.map(|(a, b)| (shapes[a].clone(), shapes[b].clone())),
    )
}

/// Whether the size-`j` decks (or multidecks) determine the size-`n` trees.
pub fn decks_determine(n: usize, j: usize, mode: DeckMode) -> Result<DeterminationReport> {
    decks_determine_with(n, j, mode, DEFAULT_SHAPE_CEILING)
}

pub fn decks_determine_with(
    n: usize,
    j: usize,
    mode: DeckMode,
    ceiling: u128,
) -> Result<DeterminationReport> {
    if n == 0 || j == 0 || j > n {
        return Err(Error::InvalidParameter {
            what: "decks_determine",
            detail: format!("need 1 <= j <= n, got n = {n}, j = {j}"),
        });
    }
    ensure_feasible(n, ceiling, "deck determination")?;
    let shapes = shapes_of_size(n);
    let (distinct, witness) = match mode {
        DeckMode::Deck => {
            let keys: Vec<_> = shapes
                .par_iter()
                .map_init(SetEngine::new, |e, t| e.deck(t, j).expect("1 <= j <= n"))
                .collect();
            group_collisions(&shapes, keys)
        }
        DeckMode::MultiDeck => {
            let keys: Vec<_> = shapes
                .par_iter()
                .map_init(MultiEngine::new, |e, t| e.multideck(t, j).expect("1 <= j <= n"))
                .collect();
            group_collisions(&shapes, keys)
        }
    };
    Ok(DeterminationReport {
        n,
        j,
        mode,
        determined: witness.is_none(),
        witness,
        shapes: shapes.len(),
        distinct,
    })
}

/// `R(n)` or `R^(m)(n)`: the least `j` whose (multi)decks determine the
/// size-`n` trees. Sweeps `j` downward from `n - 1` and stops at the first
/// failure.
pub fn reconstruction_number(n: usize, mode: DeckMode) -> Result<ReconstructionNumber> {
    reconstruction_number_with(n, mode, DEFAULT_SHAPE_CEILING)
}

pub fn reconstruction_number_with(
    n: usize,
    mode: DeckMode,
    ceiling: u128,
) -> Result<ReconstructionNumber> {
    if n < 4 {
        return Err(Error::InvalidParameter {
            what: "reconstruction_number",
            detail: format!("defined for n >= 4, got {n}"),
        });
    }
    ensure_feasible(n, ceiling, "reconstruction number")?;
    let mut value = 1;
    for j in (1..n).rev() {
        if !decks_determine_with(n, j, mode, ceiling)?.determined {
            value = j + 1;
            break;
        }
    }
    Ok(ReconstructionNumber { n, value, mode })
}

/// Which construction a [`CounterexampleFamily`] comes from, by `n mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyRule {
    /// `n = 4k`, `k >= 2`.
    ZeroMod4,
    /// `n = 4k - 1`, `k >= 3`.
    ThreeMod4,
    /// `n = 4k - 2`, `k >= 2`.
    TwoMod4,
    /// `n = 4k - 3`, `k >= 2`; for `k = 2` there is no common subtree `S`.
    OneMod4,
}

/// Two distinct size-`n` trees with equal size-`2k` decks, and (except for
/// `n = 5`) a common induced subtree `S` with the same size-`2k` deck.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleFamily {
    pub n: usize,
    pub rule: FamilyRule,
    pub k: usize,
    pub t1: TreeShape,
    pub t2: TreeShape,
    pub s: Option<TreeShape>,
}

impl CounterexampleFamily {
    pub fn residue(&self) -> usize {
        self.n % 4
    }

    pub fn deck_size(&self) -> usize {
        2 * self.k
    }
}

fn cat(n: usize) -> TreeShape {
    TreeShape::caterpillar(n).expect("caterpillar sizes are positive here")
}

/// `(C_a ⊕ C_b) ⊕ (C_c ⊕ C_d)`.
fn quad(a: usize, b: usize, c: usize, d: usize) -> TreeShape {
    TreeShape::join(
        &TreeShape::join(&cat(a), &cat(b)),
        &TreeShape::join(&cat(c), &cat(d)),
    )
}

/// The equal-deck pair for size `n`, chosen by `n mod 4`.
pub fn counterexample_family(n: usize) -> Result<CounterexampleFamily> {
    let unsupported = |reason: String| Error::UnsupportedSize { n, reason };
    match n % 4 {
        0 => {
            let k = n / 4;
            if k < 2 {
                return Err(unsupported("the n = 4k construction needs k >= 2".into()));
            }
            Ok(CounterexampleFamily {
                n,
                rule: FamilyRule::ZeroMod4,
                k,
                t1: quad(k + 1, k - 1, k, k),
                t2: quad(k + 1, k, k, k - 1),
                s: Some(quad(k + 1, k - 1, k, k - 1)),
            })
        }
        3 => {
            let k = (n + 1) / 4;
            if k < 3 {
                return Err(unsupported(format!(
                    "the n = 4k-1 construction needs k >= 3 (smallest size 11), here k = {k}"
                )));
            }
            Ok(CounterexampleFamily {
                n,
                rule: FamilyRule::ThreeMod4,
                k,
                t1: quad(k + 1, k, k, k - 2),
                t2: quad(k + 1, k - 1, k, k - 1),
                s: Some(quad(k + 1, k - 1, k, k - 2)),
            })
        }
        2 => {
            let k = (n + 2) / 4;
            if k < 2 {
                return Err(unsupported("the n = 4k-2 construction needs k >= 2".into()));
            }
            Ok(CounterexampleFamily {
                n,
                rule: FamilyRule::TwoMod4,
                k,
                t1: quad(k, k - 1, k, k - 1),
                t2: quad(k, k, k - 1, k - 1),
                s: Some(quad(k, k - 1, k - 1, k - 1)),
            })
        }
        _ => {
            let k = n.div_ceil(4);
            if k < 2 {
                return Err(unsupported("the n = 4k-3 construction needs k >= 2".into()));
            }
            if k == 2 {
                let c1 = cat(1);
                let c2 = cat(2);
                return Ok(CounterexampleFamily {
                    n,
                    rule: FamilyRule::OneMod4,
                    k,
                    t1: TreeShape::join(&TreeShape::join(&c2, &c2), &c1),
                    t2: TreeShape::join(&cat(3), &c2),
                    s: None,
                });
            }
            Ok(CounterexampleFamily {
                n,
                rule: FamilyRule::OneMod4,
                k,
                t1: quad(k, k, k - 1, k - 2),
                t2: quad(k, k - 1, k, k - 2),
                s: Some(quad(k, k - 1, k - 1, k - 2)),
            })
        }
    }
}

/// A shape present in one deck and missing from another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeckDifference {
    pub element: TreeShape,
    pub present_in: &'static str,
    pub missing_from: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub holds: bool,
    pub distinct: bool,
    pub multidecks_differ: bool,
    pub difference: Option<DeckDifference>,
    /// `S` fails to be an induced subtree of one of the trees.
    pub subtree_failure: Option<&'static str>,
}

/// Checks that `T_1 != T_2`, that both trees (and `S`, when present) have the
/// same size-`2k` deck, and that `S` is induced in both. Also reports whether
/// the size-`2k` multidecks differ.
pub fn verify_counterexample(f: &CounterexampleFamily) -> FamilyVerdict {
    let j = f.deck_size();
    let mut engine = SetEngine::new();
    let mut named: Vec<(&'static str, &TreeShape)> = vec![("T1", &f.t1)];
    if let Some(s) = &f.s {
        named.push(("S", s));
    }
    named.push(("T2", &f.t2));

    let mut difference = None;
    let mut decks = Vec::new();
    for (name, t) in &named {
        match engine.deck(t, j) {
            Ok(d) => decks.push((*name, d)),
            Err(_) => {
                return FamilyVerdict {
                    holds: false,
                    distinct: f.t1 != f.t2,
                    multidecks_differ: false,
                    difference: None,
                    subtree_failure: Some(name),
                }
            }
        }
    }
    for w in decks.windows(2) {
        let (na, da) = (w[0].0, &w[0].1);
        let (nb, db) = (w[1].0, &w[1].1);
        let found = da
            .iter()
            .find(|e| !db.contains(e))
            .map(|e| (e, na, nb))
            .or_else(|| db.iter().find(|e| !da.contains(e)).map(|e| (e, nb, na)));
        if let Some((e, present_in, missing_from)) = found {
            difference = Some(DeckDifference {
                element: e.clone(),
                present_in,
                missing_from,
            });
            break;
        }
    }

    let mut subtree_failure = None;
    if let Some(s) = &f.s {
        for (name, t) in [("T1", &f.t1), ("T2", &f.t2)] {
            let induced = s.size() <= t.size()
                && engine
                    .deck(t, s.size())
                    .map(|d| d.contains(s))
                    .unwrap_or(false);
            if !induced {
                subtree_failure = Some(name);
                break;
            }
        }
    }

    let mut multi = MultiEngine::new();
    let multidecks_differ = f.t1.size() >= j
        && f.t2.size() >= j
        && multi.multideck(&f.t1, j).ok() != multi.multideck(&f.t2, j).ok();

    let distinct = f.t1 != f.t2;
    FamilyVerdict {
        holds: distinct && difference.is_none() && subtree_failure.is_none(),
        distinct,
        multidecks_differ,
        difference,
        subtree_failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize) -> TreeShape {
        cat(n)
    }

    #[test]
    fn size_five_decks_fail_at_four() {
        let r = decks_determine(5, 4, DeckMode::Deck).unwrap();
        assert!(!r.determined);
        let (a, b) = r.witness.unwrap();
        let t1 = TreeShape::join(&TreeShape::complete(2), &c(1));
        let t2 = TreeShape::join(&c(3), &c(2));
        let mut expected = [t1, t2];
        expected.sort();
        assert_eq!([a, b], expected);
    }

    #[test]
    fn size_five_multidecks_determine_at_four() {
        let r = decks_determine(5, 4, DeckMode::MultiDeck).unwrap();
        assert!(r.determined);
        assert_eq!(r.witness, None);
        assert_eq!(r.distinct, 3);
    }

    #[test]
    fn size_six_decks_determine_at_five() {
        assert!(decks_determine(6, 5, DeckMode::Deck).unwrap().determined);
    }

    #[test]
    fn small_reconstruction_numbers() {
        assert_eq!(reconstruction_number(4, DeckMode::Deck).unwrap().value, 4);
        assert_eq!(reconstruction_number(4, DeckMode::MultiDeck).unwrap().value, 4);
        assert_eq!(reconstruction_number(5, DeckMode::Deck).unwrap().value, 5);
        assert_eq!(reconstruction_number(5, DeckMode::MultiDeck).unwrap().value, 4);
    }

    #[test]
    fn reconstruction_number_rejects_small_n() {
        assert!(reconstruction_number(3, DeckMode::Deck).is_err());
    }

    #[test]
    fn infeasible_sweep_refused() {
        match decks_determine_with(12, 11, DeckMode::Deck, 100) {
            Err(Error::Infeasible { estimate, limit, .. }) => {
                assert_eq!(estimate, 451);
                assert_eq!(limit, 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn family_for_eight() {
        let f = counterexample_family(8).unwrap();
        assert_eq!(f.k, 2);
        assert_eq!(f.rule, FamilyRule::ZeroMod4);
        let q = |a: usize, b: usize, x: usize, y: usize| {
            TreeShape::join(&TreeShape::join(&c(a), &c(b)), &TreeShape::join(&c(x), &c(y)))
        };
        assert_eq!(f.t1, q(3, 1, 2, 2));
        assert_eq!(f.t2, q(3, 2, 2, 1));
        assert_eq!(f.s.as_ref().unwrap(), &q(3, 1, 2, 1));
        let v = verify_counterexample(&f);
        assert!(v.holds, "{v:?}");
        assert!(v.multidecks_differ);
    }

    #[test]
    fn family_for_five() {
        let f = counterexample_family(5).unwrap();
        assert_eq!(f.t1, TreeShape::join(&TreeShape::complete(2), &c(1)));
        assert_eq!(f.t2, TreeShape::join(&c(3), &c(2)));
        assert!(f.s.is_none());
        assert!(verify_counterexample(&f).holds);
    }

    #[test]
    fn family_for_eleven_has_equal_six_decks() {
        let f = counterexample_family(11).unwrap();
        assert_eq!((f.k, f.rule), (3, FamilyRule::ThreeMod4));
        let d1 = crate::deck::deck(&f.t1, 6).unwrap();
        let d2 = crate::deck::deck(&f.t2, 6).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn unsupported_sizes() {
        for n in [1, 2, 3, 4, 7] {
            assert!(matches!(
                counterexample_family(n),
                Err(Error::UnsupportedSize { .. })
            ));
        }
    }

    #[test]
    fn perturbed_family_is_rejected() {
        // n = 12 family with T2 rebalanced so S no longer embeds.
        let mut f = counterexample_family(12).unwrap();
        f.t2 = quad(4, 4, 2, 2);
        let v = verify_counterexample(&f);
        assert!(!v.holds);
        assert_eq!(v.subtree_failure, Some("T2"));
    }
}
