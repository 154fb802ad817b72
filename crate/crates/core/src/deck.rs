//! Size-`j` decks and multidecks.
//!
//! The fast path is a dynamic program over the root decomposition
//! `T = T1 ⊕ T2`: a size-`j` leaf set either lies inside `T1`, inside `T2`,
//! or takes `a >= 1` leaves from `T1` and `b = j - a >= 1` from `T2`, in which
//! case it induces `A ⊕ B` for the subtrees induced on each side. Results are
//! memoized per canonical subtree, so repeated subtrees are computed once.
//!
//! [`multideck_bruteforce`] enumerates leaf subsets directly and serves as the
//! reference the dynamic program is tested against.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// Default ceiling on the number of leaf subsets the brute-force oracle will
/// enumerate.
pub const BRUTEFORCE_LIMIT: u128 = 10_000_000;

/// The set of distinct size-`j` induced subtrees of a tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deck {
    size_class: usize,
    members: BTreeSet<TreeShape>,
}

/// The size-`j` induced subtrees of a tree, with the number of leaf subsets
/// inducing each one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiDeck {
    size_class: usize,
    counts: BTreeMap<TreeShape, BigUint>,
}

impl Deck {
    pub fn new(size_class: usize, members: BTreeSet<TreeShape>) -> Deck {
        debug_assert!(members.iter().all(|t| t.size() == size_class));
        Deck {
            size_class,
            members,
        }
    }

    pub fn size_class(&self) -> usize {
        self.size_class
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &TreeShape) -> bool {
        self.members.contains(t)
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &TreeShape> {
        self.members.iter()
    }

    pub fn members(&self) -> &BTreeSet<TreeShape> {
        &self.members
    }

    /// One canonical-text shape per line, canonical order.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for t in &self.members {
            out.push_str(&t.to_text());
            out.push('\n');
        }
        out
    }
}

impl MultiDeck {
    pub fn new(size_class: usize, counts: BTreeMap<TreeShape, BigUint>) -> MultiDeck {
        debug_assert!(counts.keys().all(|t| t.size() == size_class));
        MultiDeck { size_class, counts }
    }

    pub fn size_class(&self) -> usize {
        self.size_class
    }

    /// Number of distinct shapes.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Multiplicity of `t`; zero when absent.
    pub fn multiplicity(&self, t: &TreeShape) -> BigUint {
        self.counts.get(t).cloned().unwrap_or_default()
    }

    /// Sum of all multiplicities. Equals `C(n, j)` for a genuine multideck of
    /// a size-`n` tree.
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeShape, &BigUint)> {
        self.counts.iter()
    }

    pub fn counts(&self) -> &BTreeMap<TreeShape, BigUint> {
        &self.counts
    }

    pub fn support(&self) -> Deck {
        Deck::new(self.size_class, self.counts.keys().cloned().collect())
    }

    /// Lines `<shape>\t<multiplicity>` in canonical order.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for (t, m) in &self.counts {
            let _ = writeln!(out, "{}\t{}", t.to_text(), m);
        }
        out
    }
}

/// Per-size decks of a tree, `decks[j - 1]` for `j = 1..=n`.
#[derive(Clone, Debug)]
pub struct DeckProfile {
    pub decks: Vec<Deck>,
}

impl DeckProfile {
    /// `S(T)`: the number of distinct induced subtrees over all sizes.
    pub fn subtree_count(&self) -> usize {
        self.decks.iter().map(Deck::len).sum()
    }

    pub fn deck(&self, j: usize) -> &Deck {
        &self.decks[j - 1]
    }
}

/// What the dynamic program accumulates per shape: a multiplicity, or mere
/// presence for plain decks.
pub trait Weight: Clone {
    fn unit() -> Self;
    fn accumulate(&mut self, other: &Self);
    fn product(&self, other: &Self) -> Self;
}

impl Weight for BigUint {
    fn unit() -> Self {
        BigUint::one()
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn product(&self, other: &Self) -> Self {
        self * other
    }
}

impl Weight for () {
    fn unit() -> Self {}
    fn accumulate(&mut self, _: &Self) {}
    fn product(&self, _: &Self) -> Self {}
}

type Table<W> = BTreeMap<TreeShape, W>;

/// Memoized deck dynamic program. Entries are keyed by canonical subtree and
/// hold the tables for sizes `1..=min(size, cap)` computed so far.
pub struct DeckEngine<W: Weight> {
    memo: HashMap<TreeShape, Arc<Vec<Table<W>>>>,
}

/// Engine producing plain decks.
pub type SetEngine = DeckEngine<()>;
/// Engine producing multidecks.
pub type MultiEngine = DeckEngine<BigUint>;

impl<W: Weight> Default for DeckEngine<W> {
    fn default() -> Self {
        DeckEngine {
            memo: HashMap::new(),
        }
    }
}

impl<W: Weight> DeckEngine<W> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tables for all sizes `1..=min(|t|, cap)`.
    pub fn tables(&mut self, t: &TreeShape, cap: usize) -> Arc<Vec<Table<W>>> {
        let want = cap.min(t.size());
        if let Some(hit) = self.memo.get(t) {
            if hit.len() >= want {
                return hit.clone();
            }
        }
        let computed = match t.children() {
            None => {
                let mut leaf = Table::new();
                leaf.insert(t.clone(), W::unit());
                vec![leaf]
            }
            Some((a, b)) => {
                let ta = self.tables(a, want);
                let tb = self.tables(b, want);
                let mut out = Vec::with_capacity(want);
                for j in 1..=want {
                    let mut table: Table<W> = Table::new();
                    for side in [&ta, &tb] {
                        if let Some(part) = side.get(j - 1) {
                            for (s, w) in part {
                                add_into(&mut table, s.clone(), w);
                            }
                        }
                    }
                    let lo = j.saturating_sub(b.size()).max(1);
                    let hi = (j - 1).min(a.size());
                    for na in lo..=hi {
                        let nb = j - na;
                        for (x, wx) in &ta[na - 1] {
                            for (y, wy) in &tb[nb - 1] {
                                add_into(&mut table, TreeShape::join(x, y), &wx.product(wy));
                            }
                        }
                    }
                    out.push(table);
                }
                out
            }
        };
        let computed = Arc::new(computed);
        self.memo.insert(t.clone(), computed.clone());
        computed
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

fn add_into<W: Weight>(table: &mut Table<W>, key: TreeShape, w: &W) {
    match table.get_mut(&key) {
        Some(existing) => existing.accumulate(w),
        None => {
            table.insert(key, w.clone());
        }
    }
}

fn check_size_class(t: &TreeShape, j: usize) -> Result<()> {
    if j == 0 || j > t.size() {
        return Err(Error::InvalidParameter {
            what: "deck size",
            detail: format!("need 1 <= j <= {}, got {j}", t.size()),
        });
    }
    Ok(())
}

impl SetEngine {
    pub fn deck(&mut self, t: &TreeShape, j: usize) -> Result<Deck> {
        check_size_class(t, j)?;
        let tables = self.tables(t, j);
        Ok(Deck::new(j, tables[j - 1].keys().cloned().collect()))
    }

    pub fn deck_size(&mut self, t: &TreeShape, j: usize) -> Result<usize> {
        check_size_class(t, j)?;
        Ok(self.tables(t, j)[j - 1].len())
    }

    pub fn profile(&mut self, t: &TreeShape) -> DeckProfile {
        let tables = self.tables(t, t.size());
        DeckProfile {
            decks: tables
                .iter()
                .enumerate()
                .map(|(i, tab)| Deck::new(i + 1, tab.keys().cloned().collect()))
                .collect(),
        }
    }
}

impl MultiEngine {
    pub fn multideck(&mut self, t: &TreeShape, j: usize) -> Result<MultiDeck> {
        check_size_class(t, j)?;
        let tables = self.tables(t, j);
        Ok(MultiDeck::new(j, tables[j - 1].clone()))
    }
}

/// The canonical shape of `T[S]`: the subtree induced by the leaves in
/// `leaves`, indexed left to right in the canonical form of `t`.
pub fn induced_subtree(t: &TreeShape, leaves: &[usize]) -> Result<TreeShape> {
    if leaves.is_empty() {
        return Err(Error::InvalidLeafSet("leaf set is empty".into()));
    }
    let mut mask = vec![false; t.size()];
    for &leaf in leaves {
        if leaf >= t.size() {
            return Err(Error::InvalidLeafSet(format!(
                "leaf index {leaf} out of range for a tree with {} leaves",
                t.size()
            )));
        }
        mask[leaf] = true;
    }
    Ok(induced_by_mask(t, 0, &mask).expect("mask is nonempty"))
}

fn induced_by_mask(t: &TreeShape, offset: usize, mask: &[bool]) -> Option<TreeShape> {
    match t.children() {
        None => mask[offset].then(|| t.clone()),
        Some((a, b)) => {
            let left = induced_by_mask(a, offset, mask);
            let right = induced_by_mask(b, offset + a.size(), mask);
            match (left, right) {
                (Some(x), Some(y)) => {
                    // Nothing was removed below this node.
                    if x.size() == a.size() && y.size() == b.size() {
                        Some(t.clone())
                    } else {
                        Some(TreeShape::join(&x, &y))
                    }
                }
                (x, None) => x,
                (None, y) => y,
            }
        }
    }
}

/// Binomial coefficient as an arbitrary-precision integer.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact multideck by enumerating every size-`j` leaf subset. Refuses when
/// more than `limit` subsets would be visited.
pub fn multideck_bruteforce_with_limit(t: &TreeShape, j: usize, limit: u128) -> Result<MultiDeck> {
    check_size_class(t, j)?;
    let work = binomial(t.size(), j);
    let estimate = work.to_u128().unwrap_or(u128::MAX);
    if estimate > limit {
        return Err(Error::Infeasible {
            what: format!("brute-force multideck of a {}-leaf tree at j = {j}", t.size()),
            estimate,
            limit,
        });
    }
    let mut counts: BTreeMap<TreeShape, BigUint> = BTreeMap::new();
    let mut mask = vec![false; t.size()];
    for subset in (0..t.size()).combinations(j) {
        for &i in &subset {
            mask[i] = true;
        }
        let s = induced_by_mask(t, 0, &mask).expect("j >= 1");
        *counts.entry(s).or_default() += 1u32;
        for &i in &subset {
            mask[i] = false;
        }
    }
    Ok(MultiDeck::new(j, counts))
}

/// [`multideck_bruteforce_with_limit`] with [`BRUTEFORCE_LIMIT`].
pub fn multideck_bruteforce(t: &TreeShape, j: usize) -> Result<MultiDeck> {
    multideck_bruteforce_with_limit(t, j, BRUTEFORCE_LIMIT)
}

pub fn multideck(t: &TreeShape, j: usize) -> Result<MultiDeck> {
    MultiEngine::new().multideck(t, j)
}

pub fn deck(t: &TreeShape, j: usize) -> Result<Deck> {
    SetEngine::new().deck(t, j)
}

pub fn deck_profile(t: &TreeShape) -> DeckProfile {
    SetEngine::new().profile(t)
}

/// `S(T)`.
pub fn subtree_count(t: &TreeShape) -> usize {
    deck_profile(t).subtree_count()
}

/// Recovers the size-`i` multideck of a size-`n` tree from its size-`j`
/// multideck: every size-`i` leaf set lies in exactly `C(n-i, j-i)` of the
/// size-`j` ones, so summing the size-`i` multidecks of the members overcounts
/// each entry by that factor.
pub fn project_multideck(d: &MultiDeck, i: usize, n: usize) -> Result<MultiDeck> {
    let j = d.size_class();
    if i == 0 || i >= j || j > n {
        return Err(Error::InvalidParameter {
            what: "project_multideck",
            detail: format!("need 1 <= i < j <= n, got i = {i}, j = {j}, n = {n}"),
        });
    }
    if let Some(bad) = d.counts.keys().find(|t| t.size() != j) {
        return Err(Error::InconsistentMultideck(format!(
            "member {bad} has size {} in a size-{j} multideck",
            bad.size()
        )));
    }
    let expected_total = binomial(n, j);
    if d.total() != expected_total {
        return Err(Error::InconsistentMultideck(format!(
            "multiplicities sum to {}, a size-{n} tree has {expected_total} size-{j} leaf sets",
            d.total()
        )));
    }
    let mut engine = MultiEngine::new();
    let mut acc: BTreeMap<TreeShape, BigUint> = BTreeMap::new();
    for (member, m) in &d.counts {
        let tables = engine.tables(member, i);
        for (s, w) in &tables[i - 1] {
            *acc.entry(s.clone()).or_default() += w * m;
        }
    }
    let factor = binomial(n - i, j - i);
    let mut counts = BTreeMap::new();
    for (s, m) in acc {
        let (q, r) = m.div_rem(&factor);
        if !r.is_zero() {
            return Err(Error::InconsistentMultideck(format!(
                "multiplicity {m} of {s} is not divisible by C({}, {}) = {factor}",
                n - i,
                j - i
            )));
        }
        counts.insert(s, q);
    }
    Ok(MultiDeck::new(i, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::shapes_of_size;

    fn c(n: usize) -> TreeShape {
        TreeShape::caterpillar(n).unwrap()
    }

    fn j(a: &TreeShape, b: &TreeShape) -> TreeShape {
        TreeShape::join(a, b)
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn induced_subtree_of_caterpillar_is_caterpillar() {
        let t = c(5);
        for s in (0..5).combinations(3) {
            assert_eq!(induced_subtree(&t, &s).unwrap(), c(3));
        }
    }

    #[test]
    fn induced_subtree_full_set_is_identity() {
        for t in shapes_of_size(7).iter() {
            let all: Vec<usize> = (0..7).collect();
            assert_eq!(&induced_subtree(t, &all).unwrap(), t);
        }
    }

    #[test]
    fn induced_subtree_rejects_bad_sets() {
        let t = c(4);
        assert!(matches!(induced_subtree(&t, &[]), Err(Error::InvalidLeafSet(_))));
        assert!(matches!(induced_subtree(&t, &[0, 4]), Err(Error::InvalidLeafSet(_))));
    }

    #[test]
    fn four_of_five_leaf_sets_give_c4() {
        // C_1 ⊕ B_2
        let t = j(&c(1), &TreeShape::complete(2));
        let (mut cat, mut bal) = (0, 0);
        for s in (0..5).combinations(4) {
            let u = induced_subtree(&t, &s).unwrap();
            if u == c(4) {
                cat += 1;
            } else if u == TreeShape::complete(2) {
                bal += 1;
            }
        }
        assert_eq!((cat, bal), (4, 1));
    }

    #[test]
    fn size_four_multidecks_of_size_five_trees() {
        let c4 = c(4);
        let b2 = TreeShape::complete(2);
        let pair = |t: &TreeShape| {
            let m = multideck_bruteforce(t, 4).unwrap();
            (m.multiplicity(&c4), m.multiplicity(&b2))
        };
        assert_eq!(pair(&c(5)), (big(5), big(0)));
        assert_eq!(pair(&j(&c(1), &b2)), (big(4), big(1)));
        assert_eq!(pair(&j(&c(2), &c(3))), (big(2), big(3)));
    }

    #[test]
    fn full_size_multideck_is_the_tree() {
        for t in shapes_of_size(6).iter() {
            let m = multideck(t, 6).unwrap();
            assert_eq!(m.len(), 1);
            assert_eq!(m.multiplicity(t), big(1));
            assert_eq!(deck(t, 6).unwrap().iter().collect::<Vec<_>>(), vec![t]);
        }
    }

    #[test]
    fn caterpillar_multideck_is_binomial() {
        for n in 1..=12 {
            for jj in 1..=n {
                let m = multideck(&c(n), jj).unwrap();
                assert_eq!(m.len(), 1);
                assert_eq!(m.multiplicity(&c(jj)), binomial(n, jj));
            }
        }
    }

    #[test]
    fn dp_matches_bruteforce_small() {
        for n in 1..=8 {
            for t in shapes_of_size(n).iter() {
                for jj in 1..=n {
                    assert_eq!(multideck(t, jj).unwrap(), multideck_bruteforce(t, jj).unwrap());
                }
            }
        }
    }

    #[test]
    fn bruteforce_refuses_large_work() {
        let t = c(30);
        match multideck_bruteforce(&t, 15) {
            Err(Error::Infeasible { estimate, limit, .. }) => {
                assert_eq!(estimate, 155_117_520);
                assert_eq!(limit, BRUTEFORCE_LIMIT);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deck_rejects_bad_size_class() {
        assert!(deck(&c(4), 0).is_err());
        assert!(deck(&c(4), 5).is_err());
    }

    #[test]
    fn subtree_counts() {
        for n in 1..15 {
            assert_eq!(subtree_count(&c(n)), n);
        }
        assert_eq!(subtree_count(&TreeShape::complete(2)), 4);
        assert_eq!(subtree_count(&TreeShape::y_tree(6).unwrap()), 9);
        assert_eq!(subtree_count(&TreeShape::y_tree(10).unwrap()), 41);
    }

    #[test]
    fn profile_top_is_tree_itself() {
        let t = TreeShape::z_tree(9).unwrap();
        let p = deck_profile(&t);
        assert_eq!(p.decks.len(), 9);
        assert_eq!(p.deck(9).iter().collect::<Vec<_>>(), vec![&t]);
        assert!(p.subtree_count() >= 9);
    }

    #[test]
    fn projection_divisor_for_adjacent_sizes() {
        // i = j - 1: C(n-j+1, 1) = n-j+1
        for n in 3..12 {
            for jj in 2..=n {
                assert_eq!(binomial(n - (jj - 1), 1), big((n - jj + 1) as u64));
            }
        }
    }

    #[test]
    fn projection_recovers_lower_multidecks() {
        for t in shapes_of_size(7).iter() {
            for jj in 2..=7 {
                let d = multideck(t, jj).unwrap();
                for i in 1..jj {
                    assert_eq!(project_multideck(&d, i, 7).unwrap(), multideck(t, i).unwrap());
                }
            }
        }
    }

    #[test]
    fn projection_detects_perturbation() {
        let t = j(&c(2), &c(3));
        let d = multideck(&t, 4).unwrap();
        let mut counts = d.counts().clone();
        *counts.get_mut(&c(4)).unwrap() += 1u32;
        let bad = MultiDeck::new(4, counts);
        assert!(matches!(
            project_multideck(&bad, 3, 5),
            Err(Error::InconsistentMultideck(_))
        ));
    }

    #[test]
    fn projection_detects_non_divisible_counts() {
        // Keep the total C(6,5) = 6 but move one count from C_5 to C_1 ⊕ B_2:
        // the C_4 entry of the sum becomes 5*5 + 4 = 29, which 2 does not divide.
        let mut counts = BTreeMap::new();
        counts.insert(c(5), big(5));
        counts.insert(j(&c(1), &TreeShape::complete(2)), big(1));
        let bad = MultiDeck::new(5, counts);
        assert!(matches!(
            project_multideck(&bad, 4, 6),
            Err(Error::InconsistentMultideck(_))
        ));
    }

    #[test]
    fn records_format() {
        let t = j(&c(2), &c(3));
        let m = multideck(&t, 4).unwrap();
        assert_eq!(m.to_records(), "(*,(*,(*,*)))\t2\n((*,*),(*,*))\t3\n");
        assert_eq!(m.support().to_records(), "(*,(*,(*,*)))\n((*,*),(*,*))\n");
    }
}
