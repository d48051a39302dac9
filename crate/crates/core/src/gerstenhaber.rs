//! Homology classes of `S` named by Gerstenhaber monomials.
//!
//! A monomial is a planar binary tree whose internal vertices are products
//! `m` or brackets `b`, together with the variable index carried by each
//! leaf. Its cycle is obtained by composing the representatives `12` and
//! `121 + 212` along the tree and then relabelling values by the leaf
//! labels.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, SpanBasis};
use crate::homology::{class_of, homology};
use crate::report::{CheckReport, FailureKind};
use crate::surjection::{act, compose, Chain, Permutation};

/// Representative cycle of the product.
pub fn product_cycle() -> Chain {
    Chain::parse("12").expect("valid cell")
}

/// Representative cycle of the bracket.
pub fn bracket_cycle() -> Chain {
    Chain::parse("121+212").expect("valid cells")
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GerstTree {
    Leaf,
    Product(Box<GerstTree>, Box<GerstTree>),
    Bracket(Box<GerstTree>, Box<GerstTree>),
}

impl GerstTree {
    pub fn product(l: GerstTree, r: GerstTree) -> Self {
        GerstTree::Product(Box::new(l), Box::new(r))
    }

    pub fn bracket(l: GerstTree, r: GerstTree) -> Self {
        GerstTree::Bracket(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self) -> usize {
        match self {
            GerstTree::Leaf => 1,
            GerstTree::Product(l, r) | GerstTree::Bracket(l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn brackets(&self) -> usize {
        match self {
            GerstTree::Leaf => 0,
            GerstTree::Product(l, r) => l.brackets() + r.brackets(),
            GerstTree::Bracket(l, r) => 1 + l.brackets() + r.brackets(),
        }
    }

    /// Planar cycle with leaves numbered left to right.
    pub fn planar_cycle(&self, pi_m: &Chain, pi_b: &Chain) -> Result<Chain> {
        match self {
            GerstTree::Leaf => Ok(Chain::unit()),
            GerstTree::Product(l, r) | GerstTree::Bracket(l, r) => {
                let op = if matches!(self, GerstTree::Product(..)) {
                    pi_m
                } else {
                    pi_b
                };
                let right = compose(op, 2, &r.planar_cycle(pi_m, pi_b)?)?;
                compose(&right, 1, &l.planar_cycle(pi_m, pi_b)?)
            }
        }
    }

    /// All planar binary trees with `leaves` leaves and `brackets` bracket vertices.
    pub fn all(leaves: usize, brackets: usize) -> Vec<GerstTree> {
        if leaves == 1 {
            return if brackets == 0 {
                vec![GerstTree::Leaf]
            } else {
                Vec::new()
            };
        }
        let mut out = Vec::new();
        for left in 1..leaves {
            for is_bracket in [false, true] {
                let own = usize::from(is_bracket);
                if own > brackets {
                    continue;
                }
                for lb in 0..=(brackets - own) {
                    let rb = brackets - own - lb;
                    for l in GerstTree::all(left, lb) {
                        for r in GerstTree::all(leaves - left, rb) {
                            out.push(if is_bracket {
                                GerstTree::bracket(l.clone(), r)
                            } else {
                                GerstTree::product(l.clone(), r)
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GerstMonomial {
    pub tree: GerstTree,
    /// Variable index of each leaf, in planar order.
    pub leaf_labels: Vec<usize>,
}

impl GerstMonomial {
    pub fn new(tree: GerstTree, leaf_labels: Vec<usize>) -> Result<Self> {
        if tree.leaves() != leaf_labels.len() {
            return Err(Error::ArityMismatch {
                expected: tree.leaves(),
                got: leaf_labels.len(),
            });
        }
        Permutation::new(leaf_labels.clone())?;
        Ok(GerstMonomial { tree, leaf_labels })
    }

    pub fn product() -> Self {
        GerstMonomial {
            tree: GerstTree::product(GerstTree::Leaf, GerstTree::Leaf),
            leaf_labels: vec![1, 2],
        }
    }

    pub fn bracket() -> Self {
        GerstMonomial {
            tree: GerstTree::bracket(GerstTree::Leaf, GerstTree::Leaf),
            leaf_labels: vec![1, 2],
        }
    }

    pub fn arity(&self) -> usize {
        self.leaf_labels.len()
    }

    pub fn dimension(&self) -> usize {
        self.tree.brackets()
    }

    pub fn labelling(&self) -> Permutation {
        Permutation::new(self.leaf_labels.clone()).expect("labels form a permutation")
    }

    /// Cycle built from arbitrary representatives of the product and bracket.
    pub fn cycle_with(&self, pi_m: &Chain, pi_b: &Chain) -> Result<Chain> {
        act(&self.labelling(), &self.tree.planar_cycle(pi_m, pi_b)?)
    }

    /// Every monomial of the given arity and number of brackets, shapes
    /// first and then labellings in lexicographic order.
    pub fn all(arity: usize, dimension: usize) -> Vec<GerstMonomial> {
        let perms = Permutation::all(arity);
        GerstTree::all(arity, dimension)
            .into_iter()
            .flat_map(|t| {
                perms.iter().map(move |p| GerstMonomial {
                    tree: t.clone(),
                    leaf_labels: p.images().to_vec(),
                })
            })
            .collect()
    }
}

struct MonomialParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    labels: Vec<usize>,
}

impl MonomialParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in monomial {:?}", self.src))
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, c)) if c == want => Ok(()),
            _ => Err(self.err(&format!("expected {want:?}"))),
        }
    }

    fn expr(&mut self) -> Result<GerstTree> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.chars.peek().is_some_and(|&(_, c)| c == '*') {
                self.chars.next();
                let rhs = self.factor()?;
                acc = GerstTree::product(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<GerstTree> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, 'x')) => {
                let mut digits = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                let label = digits
                    .parse::<usize>()
                    .map_err(|_| self.err("expected variable index"))?;
                self.labels.push(label);
                Ok(GerstTree::Leaf)
            }
            Some((_, '[')) => {
                let l = self.expr()?;
                self.expect(',')?;
                let r = self.expr()?;
                self.expect(']')?;
                Ok(GerstTree::bracket(l, r))
            }
            Some((_, '(')) => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => Err(self.err("expected x<i>, '[' or '('")),
        }
    }
}

impl FromStr for GerstMonomial {
    type Err = Error;

    /// Bracket syntax: `"[x1,x4]*[x2,x3]"`, `"[[x1,x2],x3]*x4"`. Products
    /// associate to the left.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = MonomialParser {
            chars: s.char_indices().peekable(),
            src: s,
            labels: Vec::new(),
        };
        let tree = p.expr()?;
        p.skip_ws();
        if p.chars.next().is_some() {
            return Err(p.err("trailing input"));
        }
        GerstMonomial::new(tree, p.labels)
    }
}

impl fmt::Display for GerstMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_tree(
            t: &GerstTree,
            labels: &mut std::slice::Iter<'_, usize>,
            out: &mut String,
            parenthesize_product: bool,
        ) {
            match t {
                GerstTree::Leaf => out.push_str(&format!("x{}", labels.next().expect("label"))),
                GerstTree::Product(l, r) => {
                    if parenthesize_product {
                        out.push('(');
                    }
                    write_tree(l, labels, out, false);
                    out.push('*');
                    write_tree(r, labels, out, true);
                    if parenthesize_product {
                        out.push(')');
                    }
                }
                GerstTree::Bracket(l, r) => {
                    out.push('[');
                    write_tree(l, labels, out, false);
                    out.push(',');
                    write_tree(r, labels, out, false);
                    out.push(']');
                }
            }
        }
        let mut out = String::new();
        write_tree(&self.tree, &mut self.leaf_labels.iter(), &mut out, false);
        f.write_str(&out)
    }
}

/// The cycle of `mono` built from the standard representatives.
pub fn monomial_to_cycle(mono: &GerstMonomial) -> Chain {
    mono.cycle_with(&product_cycle(), &bracket_cycle())
        .expect("monomial trees compose")
}

/// An element of `H_*(S)` in canonical coset coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct HClass {
    pub arity: usize,
    pub dimension: usize,
    #[serde(serialize_with = "serialize_bits")]
    pub coords: BitVector,
}

fn serialize_bits<S: serde::Serializer>(
    v: &BitVector,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_bit_string())
}

impl HClass {
    pub fn zero(arity: usize, dimension: usize) -> Self {
        HClass {
            arity,
            dimension,
            coords: BitVector::zeros(homology(arity, dimension).betti),
        }
    }

    pub fn from_cycle(c: &Chain) -> Result<Self> {
        Ok(HClass {
            arity: c.arity(),
            dimension: c.dimension(),
            coords: class_of(c)?,
        })
    }

    pub fn unit() -> Self {
        HClass::from_cycle(&Chain::unit()).expect("unit is a cycle")
    }

    pub fn of(mono: &GerstMonomial) -> Self {
        class_of_monomial(mono)
    }

    /// Parses a monomial and returns its class. Panics on bad input; meant for
    /// fixed tables.
    pub fn of_str(s: &str) -> Self {
        class_of_monomial(&s.parse().expect("well-formed monomial"))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    /// Canonical representative: the sum of the selected coset representatives.
    pub fn representative(&self) -> Chain {
        homology(self.arity, self.dimension)
            .representative(&self.coords)
            .expect("coordinates match the homology basis")
    }

    pub fn try_add(&self, other: &HClass) -> Result<HClass> {
        if (self.arity, self.dimension) != (other.arity, other.dimension) {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(HClass {
            arity: self.arity,
            dimension: self.dimension,
            coords: &self.coords + &other.coords,
        })
    }

    pub fn compose(&self, i: usize, other: &HClass) -> Result<HClass> {
        class_compose(self, i, other)
    }

    pub fn act(&self, sigma: &Permutation) -> Result<HClass> {
        HClass::from_cycle(&act(sigma, &self.representative())?)
    }
}

impl std::ops::Add for &HClass {
    type Output = HClass;

    fn add(self, rhs: &HClass) -> HClass {
        self.try_add(rhs).expect("classes of equal grading")
    }
}

pub fn class_of_monomial(mono: &GerstMonomial) -> HClass {
    HClass::from_cycle(&monomial_to_cycle(mono)).expect("monomial cycles are cycles")
}

/// `h1 ∘ᵢ h2` computed on canonical representatives.
pub fn class_compose(h1: &HClass, i: usize, h2: &HClass) -> Result<HClass> {
    let c = compose(&h1.representative(), i, &h2.representative())?;
    HClass::from_cycle(&c)
}

pub fn verify_gerstenhaber_relations() -> CheckReport {
    let mut report = CheckReport::new(
        "gerstenhaber-relations",
        "Gerstenhaber presentation: associativity, commutativity, Jacobi and Poisson relations",
    );
    let kind = FailureKind::PublishedValueMismatch;
    let m = HClass::of(&GerstMonomial::product());
    let b = HClass::of(&GerstMonomial::bracket());
    let swap = Permutation::new(vec![2, 1]).expect("permutation");

    let m1m = class_compose(&m, 1, &m).expect("in range");
    let m2m = class_compose(&m, 2, &m).expect("in range");
    report.subcheck("associativity m o1 m = m o2 m", true, m1m == m2m, kind);
    report.subcheck(
        "m o1 m is the class of x1*x2*x3",
        true,
        m1m == HClass::of_str("x1*x2*x3"),
        kind,
    );

    report.subcheck(
        "product commutativity (21)m = m",
        true,
        m.act(&swap).expect("degree 2") == m,
        kind,
    );
    report.subcheck(
        "bracket commutativity (21)b = b",
        true,
        b.act(&swap).expect("degree 2") == b,
        kind,
    );

    let b1b = class_compose(&b, 1, &b).expect("in range");
    let jacobi = [vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]]
        .into_iter()
        .map(|p| {
            b1b.act(&Permutation::new(p).expect("permutation"))
                .expect("degree 3")
        })
        .fold(HClass::zero(3, 2), |acc, h| &acc + &h);
    report.subcheck(
        "Jacobi ((123)+(231)+(312))(b o1 b) = 0",
        true,
        jacobi.is_zero(),
        kind,
    );
    let jacobi_monomials = &(&HClass::of_str("[x1,[x2,x3]]") + &HClass::of_str("[x2,[x3,x1]]"))
        + &HClass::of_str("[x3,[x1,x2]]");
    report.subcheck(
        "Jacobi [x1,[x2,x3]]+[x2,[x3,x1]]+[x3,[x1,x2]] = 0",
        true,
        jacobi_monomials.is_zero(),
        kind,
    );
    report.subcheck("b o1 b is nonzero", true, !b1b.is_zero(), kind);

    let b1m = class_compose(&b, 1, &m).expect("in range");
    let m2b = class_compose(&m, 2, &b).expect("in range");
    let poisson_rhs = &m2b
        + &m2b
            .act(&Permutation::new(vec![2, 1, 3]).expect("permutation"))
            .expect("degree 3");
    report.subcheck(
        "Poisson b o1 m = ((123)+(213))(m o2 b)",
        true,
        b1m == poisson_rhs,
        kind,
    );
    let poisson_monomials = &HClass::of_str("x1*[x2,x3]") + &HClass::of_str("x2*[x1,x3]");
    report.subcheck(
        "Poisson [x1*x2,x3] = x1*[x2,x3] + x2*[x1,x3]",
        true,
        HClass::of_str("[x1*x2,x3]") == poisson_monomials,
        kind,
    );
    report.subcheck("Poisson side is nonzero", true, !b1m.is_zero(), kind);
    report
}

/// Basis monomials as published, per `(arity, dimension)`.
pub fn published_basis(arity: usize, dimension: usize) -> &'static [&'static str] {
    match (arity, dimension) {
        (2, 0) => &["x1*x2"],
        (2, 1) => &["[x1,x2]"],
        (3, 0) => &["x1*x2*x3"],
        (3, 1) => &["[x1,x2]*x3", "[x1,x3]*x2", "[x2,x3]*x1"],
        (3, 2) => &["[[x1,x2],x3]", "[x1,[x2,x3]]"],
        (4, 0) => &["x1*x2*x3*x4"],
        (4, 1) => &[
            "[x1,x2]*x3*x4",
            "[x1,x3]*x2*x4",
            "[x1,x4]*x2*x3",
            "[x2,x3]*x1*x4",
            "[x2,x4]*x1*x3",
            "[x3,x4]*x1*x2",
        ],
        (4, 2) => &[
            "[[x1,x2],x3]*x4",
            "[x1,[x2,x3]]*x4",
            "[[x2,x3],x4]*x1",
            "[x2,[x3,x4]]*x1",
            "[x1,[x3,x4]]*x2",
            "[x1,[x3,x4]]*x2",
            "[x1,[x2,x4]]*x3",
            "[[x1,x2],x4]*x3",
            "[x1,x2]*[x3,x4]",
            "[x1,x3]*[x2,x4]",
            "[x1,x4]*[x2,x3]",
        ],
        (4, 3) => &[
            "[x1,[x2,[x3,x4]]]",
            "[x1,[[x2,x4],x3]]",
            "[[x1,x4],[x2,x3]]",
            "[[x1,x3],[x2,x4]]",
            "[[x1,[x3,x4]],x2]",
            "[[[x1,x4],x3],x2]",
        ],
        _ => &[],
    }
}

/// Outcome of checking a published basis list against the computed homology.
#[derive(Clone, Debug, Serialize)]
pub struct PublishedBasis {
    pub arity: usize,
    pub dimension: usize,
    pub betti: usize,
    pub listed: Vec<String>,
    pub duplicates: Vec<String>,
    pub rank: usize,
    pub independent: bool,
    pub spanning: bool,
    /// A basis of monomial classes: the listed monomials that are independent,
    /// completed greedily from all monomials of this grading.
    pub computed_basis: Vec<String>,
    pub added: Vec<String>,
    pub discrepancy: Option<String>,
    #[serde(skip)]
    pub classes: Vec<(GerstMonomial, HClass)>,
}

pub fn check_published_basis(arity: usize, dimension: usize) -> PublishedBasis {
    let betti = homology(arity, dimension).betti;
    let listed: Vec<GerstMonomial> = published_basis(arity, dimension)
        .iter()
        .map(|s| s.parse().expect("well-formed table entry"))
        .collect();
    let classes: Vec<(GerstMonomial, HClass)> = listed
        .iter()
        .map(|m| (m.clone(), class_of_monomial(m)))
        .collect();

    let mut duplicates = Vec::new();
    for (i, m) in listed.iter().enumerate() {
        if listed[..i].contains(m) && !duplicates.contains(&m.to_string()) {
            duplicates.push(m.to_string());
        }
    }

    let mut span = SpanBasis::new(betti, betti.max(1));
    let mut computed_basis = Vec::new();
    for (m, h) in &classes {
        if span.insert(&h.coords).expect("lengths agree") {
            computed_basis.push(m.to_string());
        }
    }
    let rank = span.dim();
    let mut added = Vec::new();
    if rank < betti {
        for m in GerstMonomial::all(arity, dimension) {
            if span.dim() == betti {
                break;
            }
            let h = class_of_monomial(&m);
            if span.insert(&h.coords).expect("lengths agree") {
                computed_basis.push(m.to_string());
                added.push(m.to_string());
            }
        }
    }
    let independent = rank == listed.len();
    let spanning = rank == betti;
    let discrepancy = if independent && spanning {
        None
    } else {
        Some(format!(
            "listed {} monomials ({} distinct, duplicates {:?}) of rank {rank} for a space of dimension {betti}; completed with {:?}",
            listed.len(),
            listed.len() - duplicates.len(),
            duplicates,
            added
        ))
    };
    PublishedBasis {
        arity,
        dimension,
        betti,
        listed: listed.iter().map(ToString::to_string).collect(),
        duplicates,
        rank,
        independent,
        spanning,
        computed_basis,
        added,
        discrepancy,
        classes,
    }
}
