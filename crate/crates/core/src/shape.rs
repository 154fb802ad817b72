//! Canonical rooted binary tree shapes.
//!
//! A [`TreeShape`] is an isomorphism class of rooted binary trees. Every
//! value is stored in canonical form: the children of each internal node are
//! ordered so that the first child is not larger than the second under the
//! [`CanonicalCode`] order. Two shapes compare equal exactly when the trees
//! they describe are isomorphic.
//!
//! The canonical code of a leaf is `0`; the code of `a ⊕ b` is `1`
//! followed by the codes of the two children in canonical order. Codes are
//! ordered by tree size first and then lexicographically, so the smaller
//! subtree always comes first and codes of one size sort as plain strings.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Pre-order bit string of a canonical shape, one ASCII `'0'`/`'1'` byte per
/// node.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalCode(Box<[u8]>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII '0' and '1' are ever stored.
        std::str::from_utf8(&self.0).expect("canonical codes are ASCII")
    }

    /// Number of leaves of the encoded shape.
    pub fn leaf_count(&self) -> usize {
        self.0.len().div_ceil(2)
    }
}

impl Ord for CanonicalCode {
    fn cmp(&self, other: &Self) -> Ordering {
        // A size-n code has exactly 2n-1 symbols, so length order is size order.
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for CanonicalCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.as_str())
    }
}

struct Node {
    size: usize,
    code: CanonicalCode,
    children: Option<(TreeShape, TreeShape)>,
}

/// An unlabeled rooted binary tree, up to isomorphism.
///
/// Cloning is cheap; subtrees are shared.
#[derive(Clone)]
pub struct TreeShape(Arc<Node>);

/// The unordered pair of child sizes at the root of a shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSplit {
    small: usize,
    large: usize,
}

impl RootSplit {
    pub fn new(a: usize, b: usize) -> Self {
        RootSplit {
            small: a.min(b),
            large: a.max(b),
        }
    }

    pub fn smaller(&self) -> usize {
        self.small
    }

    pub fn larger(&self) -> usize {
        self.large
    }

    /// The split as a set: a single element when both sides are equal.
    pub fn parts(&self) -> Vec<usize> {
        if self.small == self.large {
            vec![self.small]
        } else {
            vec![self.small, self.large]
        }
    }

    pub fn contains(&self, part: usize) -> bool {
        self.small == part || self.large == part
    }
}

impl fmt::Display for RootSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.small == self.large {
            write!(f, "{{{}}}", self.small)
        } else {
            write!(f, "{{{},{}}}", self.small, self.large)
        }
    }
}

impl TreeShape {
    /// The single-leaf shape `C_1`.
    pub fn leaf() -> TreeShape {
        static LEAF: OnceLock<TreeShape> = OnceLock::new();
        LEAF.get_or_init(|| {
            TreeShape(Arc::new(Node {
                size: 1,
                code: CanonicalCode(Box::new(*b"0")),
                children: None,
            }))
        })
        .clone()
    }

    /// `a ⊕ b`: a fresh root whose children are `a` and `b`. Commutative.
    pub fn join(a: &TreeShape, b: &TreeShape) -> TreeShape {
        let (first, second) = if a.code() <= b.code() { (a, b) } else { (b, a) };
        let mut bytes = Vec::with_capacity(1 + first.0.code.0.len() + second.0.code.0.len());
        bytes.push(b'1');
        bytes.extend_from_slice(&first.0.code.0);
        bytes.extend_from_slice(&second.0.code.0);
        TreeShape(Arc::new(Node {
            size: first.size() + second.size(),
            code: CanonicalCode(bytes.into_boxed_slice()),
            children: Some((first.clone(), second.clone())),
        }))
    }

    /// The caterpillar `C_n = (C_1 ⊕)^{n-1} C_1`.
    pub fn caterpillar(n: usize) -> Result<TreeShape> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                what: "caterpillar",
                detail: "size must be at least 1".into(),
            });
        }
        let leaf = TreeShape::leaf();
        let mut t = leaf.clone();
        for _ in 1..n {
            t = TreeShape::join(&leaf, &t);
        }
        Ok(t)
    }

    /// The complete tree `B_h` with `2^h` leaves.
    pub fn complete(h: u32) -> TreeShape {
        let mut t = TreeShape::leaf();
        for _ in 0..h {
            t = TreeShape::join(&t, &t);
        }
        t
    }

    /// The jellyfish `J_{k,l}`: `B_k` with every leaf replaced by the root of a
    /// copy of `C_l`.
    pub fn jellyfish(k: u32, l: usize) -> Result<TreeShape> {
        if l < 2 {
            return Err(Error::InvalidParameter {
                what: "jellyfish",
                detail: format!("tentacle length must be at least 2, got {l}"),
            });
        }
        let mut t = TreeShape::caterpillar(l)?;
        for _ in 0..k {
            t = TreeShape::join(&t, &t);
        }
        Ok(t)
    }

    /// `Z_n`: `C_n` for `n <= 3`, `C_1 ⊕ Z_{n-1}` when `3 | n`, and
    /// `C_2 ⊕ Z_{n-2}` otherwise. Its deck has the maximum size `g(n)`.
    pub fn z_tree(n: usize) -> Result<TreeShape> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                what: "z_tree",
                detail: "size must be at least 1".into(),
            });
        }
        let c1 = TreeShape::leaf();
        let c2 = TreeShape::join(&c1, &c1);
        let mut z: Vec<TreeShape> = Vec::with_capacity(n + 1);
        z.push(c1.clone()); // unused slot for index 0
        for m in 1..=n {
            let t = if m <= 3 {
                TreeShape::caterpillar(m)?
            } else if m % 3 == 0 {
                TreeShape::join(&c1, &z[m - 1])
            } else {
                TreeShape::join(&c2, &z[m - 2])
            };
            z.push(t);
        }
        Ok(z.pop().expect("n >= 1"))
    }

    /// `X_n` for `n ≡ 1 (mod 4)`: `X_1 = C_1`, `X_n = C_3 ⊕ (C_1 ⊕ X_{n-4})`.
    pub fn x_tree(n: usize) -> Result<TreeShape> {
        if n % 4 != 1 {
            return Err(Error::InvalidParameter {
                what: "x_tree",
                detail: format!("size must be 1 mod 4, got {n}"),
            });
        }
        let c1 = TreeShape::leaf();
        let c3 = TreeShape::caterpillar(3)?;
        let mut x = c1.clone();
        for _ in 0..(n - 1) / 4 {
            x = TreeShape::join(&c3, &TreeShape::join(&c1, &x));
        }
        Ok(x)
    }

    /// `Y_n = C_1 ⊕ X_{n-1}` for `n ≡ 2 (mod 4)`.
    pub fn y_tree(n: usize) -> Result<TreeShape> {
        if n % 4 != 2 {
            return Err(Error::InvalidParameter {
                what: "y_tree",
                detail: format!("size must be 2 mod 4, got {n}"),
            });
        }
        Ok(TreeShape::join(&TreeShape::leaf(), &TreeShape::x_tree(n - 1)?))
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_leaf(&self) -> bool {
        self.0.children.is_none()
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.0.code
    }

    /// Children in canonical order (smaller first), or `None` for a leaf.
    pub fn children(&self) -> Option<(&TreeShape, &TreeShape)> {
        self.0.children.as_ref().map(|(a, b)| (a, b))
    }

    pub fn root_split(&self) -> Result<RootSplit> {
        match self.children() {
            Some((a, b)) => Ok(RootSplit::new(a.size(), b.size())),
            None => Err(Error::LeafRootSplit),
        }
    }

    pub fn encode(&self) -> CanonicalCode {
        self.0.code.clone()
    }

    /// Inverse of [`TreeShape::encode`]. Accepts only canonical codes.
    pub fn decode(code: &[u8]) -> Result<TreeShape> {
        let mut pos = 0;
        let t = decode_at(code, &mut pos)?;
        if pos != code.len() {
            return Err(Error::MalformedCode {
                position: pos,
                reason: "trailing symbols after a complete tree",
            });
        }
        Ok(t)
    }

    /// Newick-style text: `*` for a leaf, `(A,B)` for a join, children in
    /// canonical order and no whitespace.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.size() * 4);
        write_text(self, &mut out);
        out
    }

    /// Parses the text grammar, accepting any child order and ASCII
    /// whitespace between tokens.
    pub fn parse_text(s: &str) -> Result<TreeShape> {
        let mut p = TextParser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let t = p.shape()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(Error::Parse {
                offset: p.pos,
                expected: "end of input",
            });
        }
        Ok(t)
    }
}

fn decode_at(code: &[u8], pos: &mut usize) -> Result<TreeShape> {
    let start = *pos;
    match code.get(start) {
        None => Err(Error::MalformedCode {
            position: start,
            reason: "code ended before the tree was complete",
        }),
        Some(b'0') => {
            *pos += 1;
            Ok(TreeShape::leaf())
        }
        Some(b'1') => {
            *pos += 1;
            let a = decode_at(code, pos)?;
            let second_start = *pos;
            let b = decode_at(code, pos)?;
            if a.code() > b.code() {
                return Err(Error::MalformedCode {
                    position: second_start,
                    reason: "children are not in canonical order",
                });
            }
            Ok(TreeShape::join(&a, &b))
        }
        Some(_) => Err(Error::MalformedCode {
            position: start,
            reason: "symbol other than '0' or '1'",
        }),
    }
}

fn write_text(t: &TreeShape, out: &mut String) {
    match t.children() {
        None => out.push('*'),
        Some((a, b)) => {
            out.push('(');
            write_text(a, out);
            out.push(',');
            write_text(b, out);
            out.push(')');
        }
    }
}

struct TextParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl TextParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8, expected: &'static str) -> Result<()> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                offset: self.pos,
                expected,
            })
        }
    }

    fn shape(&mut self) -> Result<TreeShape> {
        self.skip_ws();
        match self.bytes.get(self.pos) {
            Some(b'*') => {
                self.pos += 1;
                Ok(TreeShape::leaf())
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.shape()?;
                self.expect(b',', "','")?;
                let b = self.shape()?;
                self.expect(b')', "')'")?;
                Ok(TreeShape::join(&a, &b))
            }
            _ => Err(Error::Parse {
                offset: self.pos,
                expected: "'*' or '('",
            }),
        }
    }
}

impl PartialEq for TreeShape {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.code == other.0.code
    }
}

impl Eq for TreeShape {}

impl Hash for TreeShape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.code.hash(state);
    }
}

impl Ord for TreeShape {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.code.cmp(&other.0.code)
    }
}

impl PartialOrd for TreeShape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeShape({})", self.to_text())
    }
}

impl FromStr for TreeShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TreeShape::parse_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize) -> TreeShape {
        TreeShape::caterpillar(n).unwrap()
    }

    fn j(a: &TreeShape, b: &TreeShape) -> TreeShape {
        TreeShape::join(a, b)
    }

    #[test]
    fn leaf_basics() {
        let l = TreeShape::leaf();
        assert_eq!(l.size(), 1);
        assert_eq!(l.encode().as_str(), "0");
        assert!(l.is_leaf());
        assert_eq!(c(1), l);
        assert_eq!(TreeShape::complete(0), l);
    }

    #[test]
    fn join_is_commutative() {
        let l = TreeShape::leaf();
        assert_eq!(j(&l, &l), c(2));
        assert_eq!(j(&c(3), &c(2)), j(&c(2), &c(3)));
    }

    #[test]
    fn composed_example_has_split_4_5() {
        let t = j(&j(&c(3), &c(1)), &c(5));
        assert_eq!(t.size(), 9);
        assert_eq!(t.root_split().unwrap(), RootSplit::new(4, 5));
        assert_eq!(t.root_split().unwrap().parts(), vec![4, 5]);
    }

    #[test]
    fn codes() {
        assert_eq!(c(2).encode().as_str(), "100");
        assert_eq!(TreeShape::complete(2).encode().as_str(), "1100100");
        assert_eq!(c(3).to_text(), "(*,(*,*))");
    }

    #[test]
    fn caterpillar_rejects_zero() {
        assert!(matches!(
            TreeShape::caterpillar(0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn caterpillar_root_split() {
        for n in 2..20 {
            assert_eq!(c(n).root_split().unwrap(), RootSplit::new(1, n - 1));
        }
        assert_eq!(c(5).root_split().unwrap().parts(), vec![1, 4]);
    }

    #[test]
    fn complete_sizes_and_split() {
        for h in 0..7 {
            assert_eq!(TreeShape::complete(h).size(), 1 << h);
        }
        let b2 = TreeShape::complete(2);
        assert_eq!(b2.root_split().unwrap().parts(), vec![2]);
        assert_ne!(b2, c(4));
    }

    #[test]
    fn leaf_has_no_root_split() {
        assert!(matches!(
            TreeShape::leaf().root_split(),
            Err(Error::LeafRootSplit)
        ));
    }

    #[test]
    fn jellyfish_identities() {
        assert_eq!(TreeShape::jellyfish(0, 5).unwrap(), c(5));
        assert_eq!(TreeShape::jellyfish(2, 2).unwrap(), TreeShape::complete(3));
        let j14 = TreeShape::jellyfish(1, 4).unwrap();
        assert_eq!(j14, j(&c(4), &c(4)));
        assert_eq!(j14.size(), 8);
        assert!(TreeShape::jellyfish(1, 1).is_err());
    }

    #[test]
    fn z_trees() {
        assert_eq!(TreeShape::z_tree(4).unwrap(), j(&c(2), &TreeShape::z_tree(2).unwrap()));
        assert_eq!(TreeShape::z_tree(6).unwrap(), j(&c(1), &TreeShape::z_tree(5).unwrap()));
        for n in 1..=3 {
            assert_eq!(TreeShape::z_tree(n).unwrap(), c(n));
        }
        for n in 1..40 {
            assert_eq!(TreeShape::z_tree(n).unwrap().size(), n);
        }
    }

    #[test]
    fn x_and_y_trees() {
        assert_eq!(TreeShape::x_tree(1).unwrap(), TreeShape::leaf());
        assert_eq!(TreeShape::y_tree(2).unwrap(), c(2));
        assert!(TreeShape::x_tree(3).is_err());
        assert!(TreeShape::y_tree(5).is_err());
        let c3 = c(3);
        for n in (5..=61).step_by(4) {
            let x = TreeShape::x_tree(n).unwrap();
            assert_eq!(x.size(), n);
            assert_eq!(x, j(&c3, &TreeShape::y_tree(n - 3).unwrap()));
        }
    }

    #[test]
    fn decode_errors_report_position() {
        match TreeShape::decode(b"10") {
            Err(Error::MalformedCode { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        match TreeShape::decode(b"1002") {
            Err(Error::MalformedCode { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
        // (C_2, C_1) is not canonical: the second child starts at index 4.
        match TreeShape::decode(b"11000") {
            Err(Error::MalformedCode { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        match TreeShape::decode(b"x") {
            Err(Error::MalformedCode { position, .. }) => assert_eq!(position, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_canonicalizes_and_skips_whitespace() {
        assert_eq!(TreeShape::parse_text("((*,*),*)").unwrap(), c(3));
        assert_eq!(TreeShape::parse_text(" ( ( * , * ) ,\n* ) ").unwrap(), c(3));
        assert_eq!(TreeShape::parse_text("((*,*),*)").unwrap().to_text(), "(*,(*,*))");
    }

    #[test]
    fn parse_errors_report_offset() {
        match TreeShape::parse_text("(*;*)") {
            Err(Error::Parse { offset, expected }) => {
                assert_eq!(offset, 2);
                assert_eq!(expected, "','");
            }
            other => panic!("unexpected {other:?}"),
        }
        match TreeShape::parse_text("(*,*") {
            Err(Error::Parse { offset, expected }) => {
                assert_eq!(offset, 4);
                assert_eq!(expected, "')'");
            }
            other => panic!("unexpected {other:?}"),
        }
        match TreeShape::parse_text("* *") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(TreeShape::parse_text("").is_err());
    }

    #[test]
    fn code_order_is_size_then_lexicographic() {
        let b2 = TreeShape::complete(2);
        let c4 = c(4);
        assert!(c(3) < b2);
        // "1010100" < "1100100"
        assert!(c4 < b2);
        assert_eq!(c4.code().leaf_count(), 4);
    }
}
