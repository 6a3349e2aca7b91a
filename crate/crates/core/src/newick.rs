//! Newick trees with exact rational branch lengths, and the ultra triple of
//! a clock-like tree (weights zero, distance = depth minus depth of the
//! lowest common ancestor).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::label::Label;
use crate::ultra::{UltraError, UltraTriple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NewickError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("duplicate leaf name {0:?}")]
    DuplicateLeaf(String),
    #[error("leaf without a name at byte {0}")]
    UnnamedLeaf(usize),
    #[error("negative branch length at byte {0}")]
    NegativeLength(usize),
    #[error("tree has no leaves")]
    Empty,
    #[error("not clock-like: {a} has depth {depth_a} but {b} has depth {depth_b}")]
    ClockViolation {
        a: String,
        b: String,
        depth_a: String,
        depth_b: String,
    },
    #[error("scaled distance does not fit in 64 bits")]
    Overflow,
    #[error(transparent)]
    Ultra(#[from] UltraError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewickNode {
    pub name: Option<String>,
    /// Length of the edge to the parent; 1 when omitted.
    pub length: BigRational,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// A rooted tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewickTree {
    pub nodes: Vec<NewickNode>,
}

impl NewickTree {
    /// Leaf node indices in the order they appear in the text.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].children.is_empty())
            .collect()
    }

    pub fn leaf_names(&self) -> Vec<String> {
        self.leaves()
            .into_iter()
            .filter_map(|i| self.nodes[i].name.clone())
            .collect()
    }

    /// Sum of edge lengths from the root down to `node`.
    pub fn depth(&self, mut node: usize) -> BigRational {
        let mut total = BigRational::zero();
        while let Some(p) = self.nodes[node].parent {
            total += &self.nodes[node].length;
            node = p;
        }
        total
    }

    fn ancestors(&self, mut node: usize) -> Vec<usize> {
        let mut out = vec![node];
        while let Some(p) = self.nodes[node].parent {
            out.push(p);
            node = p;
        }
        out
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let up: BTreeSet<usize> = self.ancestors(a).into_iter().collect();
        self.ancestors(b)
            .into_iter()
            .find(|x| up.contains(x))
            .expect("root is shared")
    }

    /// The first leaf pair (first leaf, offending leaf) with unequal depths.
    pub fn clock_violation(&self) -> Option<(usize, usize)> {
        let leaves = self.leaves();
        let first = *leaves.first()?;
        let d0 = self.depth(first);
        leaves
            .iter()
            .skip(1)
            .find(|&&l| self.depth(l) != d0)
            .map(|&l| (first, l))
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    nodes: Vec<NewickNode>,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, NewickError> {
        Err(NewickError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_space(&mut self) -> Result<(), NewickError> {
        loop {
            match self.text.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    match self.text[start..].iter().position(|&c| c == b']') {
                        Some(off) => self.pos = start + off + 1,
                        None => return self.err("unterminated comment"),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>, NewickError> {
        self.skip_space()?;
        Ok(self.text.get(self.pos).copied())
    }

    fn subtree(&mut self, parent: Option<usize>) -> Result<usize, NewickError> {
        let id = self.nodes.len();
        self.nodes.push(NewickNode {
            name: None,
            length: BigRational::one(),
            children: Vec::new(),
            parent,
        });
        let start = self.pos;
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            loop {
                let child = self.subtree(Some(id))?;
                self.nodes[id].children.push(child);
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        self.nodes[id].name = self.name()?;
        if self.nodes[id].children.is_empty() && self.nodes[id].name.is_none() {
            return Err(NewickError::UnnamedLeaf(start));
        }
        if self.peek()? == Some(b':') {
            self.pos += 1;
            self.nodes[id].length = self.length()?;
        }
        Ok(id)
    }

    fn name(&mut self) -> Result<Option<String>, NewickError> {
        match self.peek()? {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.text.get(self.pos) {
                        None => return self.err("unterminated quoted name"),
                        Some(b'\'') if self.text.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                let s = String::from_utf8(out).map_err(|_| NewickError::Syntax {
                    pos: self.pos,
                    msg: "name is not UTF-8".into(),
                })?;
                Ok((!s.is_empty()).then_some(s))
            }
            _ => {
                let start = self.pos;
                while let Some(&c) = self.text.get(self.pos) {
                    if c.is_ascii_whitespace() || b"(),:;[]'".contains(&c) {
                        break;
                    }
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(None);
                }
                let raw = std::str::from_utf8(&self.text[start..self.pos]).map_err(|_| NewickError::Syntax {
                    pos: start,
                    msg: "name is not UTF-8".into(),
                })?;
                // unquoted underscores stand for blanks
                Ok(Some(raw.replace('_', " ")))
            }
        }
    }

    /// Decimal number `[+-]digits[.digits][(e|E)[+-]digits]`, exactly.
    fn length(&mut self) -> Result<BigRational, NewickError> {
        self.skip_space()?;
        let start = self.pos;
        let mut negative = false;
        if let Some(&c @ (b'+' | b'-')) = self.text.get(self.pos) {
            negative = c == b'-';
            self.pos += 1;
        }
        let mut digits = String::new();
        let mut frac_len: i64 = 0;
        let mut seen_point = false;
        while let Some(&c) = self.text.get(self.pos) {
            if c.is_ascii_digit() {
                digits.push(c as char);
                if seen_point {
                    frac_len += 1;
                }
            } else if c == b'.' && !seen_point {
                seen_point = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits.is_empty() {
            self.pos = start;
            return self.err("expected a branch length");
        }
        let mut exp: i64 = 0;
        if let Some(b'e' | b'E') = self.text.get(self.pos) {
            self.pos += 1;
            let mut sign = 1;
            if let Some(&c @ (b'+' | b'-')) = self.text.get(self.pos) {
                sign = if c == b'-' { -1 } else { 1 };
                self.pos += 1;
            }
            let es = self.pos;
            while self.text.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            let e: i64 = std::str::from_utf8(&self.text[es..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .filter(|e: &i64| *e <= 4096)
                .map_or_else(|| self.err("bad exponent"), Ok)?;
            exp = sign * e;
        }
        let mantissa: BigInt = digits.parse().expect("ascii digits");
        let shift = exp - frac_len;
        let ten = BigInt::from(10);
        let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
        let value = if shift >= 0 {
            BigRational::from_integer(mantissa * scale)
        } else {
            BigRational::new(mantissa, scale)
        };
        if negative && !value.is_zero() {
            return Err(NewickError::NegativeLength(start));
        }
        Ok(value)
    }
}

/// Parses one tree terminated by `;`. Omitted branch lengths are 1; leaf
/// names must be present and distinct.
pub fn parse_newick(text: &str) -> Result<NewickTree, NewickError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    if p.peek()?.is_none() {
        return p.err("empty input");
    }
    p.subtree(None)?;
    if p.peek()? != Some(b';') {
        return p.err("expected ';'");
    }
    p.pos += 1;
    if p.peek()?.is_some() {
        return p.err("trailing input after ';'");
    }
    let tree = NewickTree { nodes: p.nodes };
    let mut seen = BTreeSet::new();
    for name in tree.leaf_names() {
        if !seen.insert(name.clone()) {
            return Err(NewickError::DuplicateLeaf(name));
        }
    }
    Ok(tree)
}

/// The ultra triple on the leaves: `w = 0`, `d(a,b) = depth - depth(lca)`,
/// all distances multiplied by the least common multiple of their
/// denominators. Requires every leaf at the same depth.
pub fn triple_from_tree(tree: &NewickTree) -> Result<UltraTriple, NewickError> {
    let leaves = tree.leaves();
    if leaves.is_empty() {
        return Err(NewickError::Empty);
    }
    if let Some((a, b)) = tree.clock_violation() {
        let name = |i: usize| tree.nodes[i].name.clone().unwrap_or_default();
        return Err(NewickError::ClockViolation {
            a: name(a),
            b: name(b),
            depth_a: tree.depth(a).to_string(),
            depth_b: tree.depth(b).to_string(),
        });
    }
    let depth = tree.depth(leaves[0]);
    let n = leaves.len();
    let mut exact = vec![vec![BigRational::zero(); n]; n];
    let mut lcm = BigInt::one();
    for x in 0..n {
        for y in x + 1..n {
            let d = &depth - tree.depth(tree.lca(leaves[x], leaves[y]));
            lcm = lcm.lcm(d.denom());
            exact[x][y] = d.clone();
            exact[y][x] = d;
        }
    }
    let mut dist = vec![vec![0i64; n]; n];
    for x in 0..n {
        for y in 0..n {
            let scaled = &exact[x][y] * BigRational::from_integer(lcm.clone());
            debug_assert!(scaled.is_integer() && !scaled.is_negative());
            dist[x][y] = scaled.to_integer().to_i64().ok_or(NewickError::Overflow)?;
        }
    }
    let labels = leaves
        .iter()
        .map(|&i| Label::Name(tree.nodes[i].name.clone().expect("leaves are named")))
        .collect();
    Ok(UltraTriple::new(labels, vec![0; n], dist)?)
}
