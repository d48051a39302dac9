//! The free planar operad on the bigraded generators of arity `<= 4` and its
//! model differential.
//!
//! Elements are F₂-sums of planar trees whose vertices carry generators.
//! Trees are already a normal form for the free planar operad, so no
//! rewriting is needed: two elements are equal iff their term sets agree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::gerstenhaber::{bracket_cycle, monomial_to_cycle, product_cycle, HClass};
use crate::gf2::{kernel_basis, rank, BitMatrix, BitVector, SpanBasis};
use crate::homology::homology;
use crate::report::{CheckReport, FailureKind};
use crate::surjection::{compose, Chain};

/// Generators of the bigraded model in arity `<= 4`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Generator {
    /// `m`, the product.
    Product,
    /// `b`, the bracket.
    Bracket,
    /// `u = [x1,x3][x2,x4]`.
    CrossProduct,
    /// `l = [[x1,x3],[x2,x4]]`.
    CrossBracket,
    /// `A`, resolving associativity.
    Associator,
    /// `B`, resolving the Poisson relation.
    Poissonator,
    /// `P`, resolving the pentagon.
    Pentagonator,
    /// `C`, the level-2 generator carrying the obstruction.
    Coherence,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::Product,
        Generator::Bracket,
        Generator::CrossProduct,
        Generator::CrossBracket,
        Generator::Associator,
        Generator::Poissonator,
        Generator::Pentagonator,
        Generator::Coherence,
    ];

    /// Generators of level 0 in arity <= 3, i.e. the product and bracket.
    pub const BINARY: [Generator; 2] = [Generator::Product, Generator::Bracket];

    /// Generators of level <= 1 that occur in the differentials of `P` and `C`.
    pub const LOW: [Generator; 4] = [
        Generator::Product,
        Generator::Bracket,
        Generator::Associator,
        Generator::Poissonator,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Generator::Product => "m",
            Generator::Bracket => "b",
            Generator::CrossProduct => "u",
            Generator::CrossBracket => "l",
            Generator::Associator => "A",
            Generator::Poissonator => "B",
            Generator::Pentagonator => "P",
            Generator::Coherence => "C",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.symbol() == s)
    }

    /// `(arity, dimension, level)`.
    pub fn grading(self) -> (usize, usize, usize) {
        match self {
            Generator::Product => (2, 0, 0),
            Generator::Bracket => (2, 1, 0),
            Generator::CrossProduct => (4, 2, 0),
            Generator::CrossBracket => (4, 3, 0),
            Generator::Associator => (3, 1, 1),
            Generator::Poissonator => (3, 2, 1),
            Generator::Pentagonator => (4, 2, 2),
            Generator::Coherence => (4, 3, 2),
        }
    }

    pub fn arity(self) -> usize {
        self.grading().0
    }

    pub fn dimension(self) -> usize {
        self.grading().1
    }

    pub fn level(self) -> usize {
        self.grading().2
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A planar tree with generator-labelled vertices; the bare leaf is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TreeMonomial {
    Leaf,
    Node(Generator, Vec<TreeMonomial>),
}

impl TreeMonomial {
    /// The generator as a one-vertex tree.
    pub fn corolla(g: Generator) -> Self {
        TreeMonomial::Node(g, vec![TreeMonomial::Leaf; g.arity()])
    }

    pub fn node(g: Generator, children: Vec<TreeMonomial>) -> Result<Self> {
        if children.len() != g.arity() {
            return Err(Error::ArityMismatch {
                expected: g.arity(),
                got: children.len(),
            });
        }
        Ok(TreeMonomial::Node(g, children))
    }

    pub fn arity(&self) -> usize {
        match self {
            TreeMonomial::Leaf => 1,
            TreeMonomial::Node(_, ch) => ch.iter().map(TreeMonomial::arity).sum(),
        }
    }

    fn fold_vertices(&self, f: &impl Fn(Generator) -> usize) -> usize {
        match self {
            TreeMonomial::Leaf => 0,
            TreeMonomial::Node(g, ch) => {
                f(*g) + ch.iter().map(|c| c.fold_vertices(f)).sum::<usize>()
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.fold_vertices(&|g| g.dimension())
    }

    pub fn level(&self) -> usize {
        self.fold_vertices(&|g| g.level())
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        let mut out = BTreeSet::new();
        fn walk(t: &TreeMonomial, out: &mut BTreeSet<Generator>) {
            if let TreeMonomial::Node(g, ch) = t {
                out.insert(*g);
                ch.iter().for_each(|c| walk(c, out));
            }
        }
        walk(self, &mut out);
        out
    }

    /// Grafts `y` onto leaf `i` (1-based, planar order).
    pub fn graft(&self, i: usize, y: &TreeMonomial) -> Result<TreeMonomial> {
        let arity = self.arity();
        if i == 0 || i > arity {
            return Err(Error::IndexOutOfRange { index: i, arity });
        }
        fn rec(
            t: &TreeMonomial,
            target: usize,
            seen: &mut usize,
            y: &TreeMonomial,
        ) -> TreeMonomial {
            match t {
                TreeMonomial::Leaf => {
                    *seen += 1;
                    if *seen == target {
                        y.clone()
                    } else {
                        TreeMonomial::Leaf
                    }
                }
                TreeMonomial::Node(g, ch) => {
                    TreeMonomial::Node(*g, ch.iter().map(|c| rec(c, target, seen, y)).collect())
                }
            }
        }
        Ok(rec(self, i, &mut 0, y))
    }

    /// Replaces the leaves of `self`, in order, by `children`.
    fn substitute(&self, children: &[TreeMonomial]) -> TreeMonomial {
        fn rec(t: &TreeMonomial, it: &mut std::slice::Iter<'_, TreeMonomial>) -> TreeMonomial {
            match t {
                TreeMonomial::Leaf => it.next().expect("one child per leaf").clone(),
                TreeMonomial::Node(g, ch) => {
                    TreeMonomial::Node(*g, ch.iter().map(|c| rec(c, it)).collect())
                }
            }
        }
        let mut it = children.iter();
        let out = rec(self, &mut it);
        debug_assert!(it.next().is_none());
        out
    }

    /// `(text, is_composite)` in `∘ᵢ` notation.
    fn render(&self) -> (String, bool) {
        match self {
            TreeMonomial::Leaf => ("id".to_string(), false),
            TreeMonomial::Node(g, ch) => {
                let mut text = g.symbol().to_string();
                let mut composite = false;
                for (idx, child) in ch.iter().enumerate().rev() {
                    if *child == TreeMonomial::Leaf {
                        continue;
                    }
                    let (child_text, child_composite) = child.render();
                    let lhs = if composite { format!("({text})") } else { text };
                    let rhs = if child_composite {
                        format!("({child_text})")
                    } else {
                        child_text
                    };
                    text = format!("{lhs} o{} {rhs}", idx + 1);
                    composite = true;
                }
                (text, composite)
            }
        }
    }
}

impl fmt::Display for TreeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render().0)
    }
}

/// A homogeneous element of the free planar operad.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FreeChain {
    pub arity: usize,
    pub dimension: usize,
    pub level: usize,
    terms: BTreeSet<TreeMonomial>,
}

impl FreeChain {
    pub fn zero(arity: usize, dimension: usize, level: usize) -> Self {
        FreeChain {
            arity,
            dimension,
            level,
            terms: BTreeSet::new(),
        }
    }

    pub fn from_tree(t: TreeMonomial) -> Self {
        let mut c = FreeChain::zero(t.arity(), t.dimension(), t.level());
        c.terms.insert(t);
        c
    }

    pub fn generator(g: Generator) -> Self {
        FreeChain::from_tree(TreeMonomial::corolla(g))
    }

    pub fn parse(s: &str) -> Result<Self> {
        FreeChainParser::new(s)?.sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = &TreeMonomial> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn grading(&self) -> (usize, usize, usize) {
        (self.arity, self.dimension, self.level)
    }

    pub fn toggle(&mut self, t: TreeMonomial) -> Result<()> {
        let got = (t.arity(), t.dimension(), t.level());
        if got != self.grading() {
            return Err(Error::Parse(format!(
                "term {t} has grading {got:?}, expected {:?}",
                self.grading()
            )));
        }
        self.toggle_unchecked(t);
        Ok(())
    }

    fn toggle_unchecked(&mut self, t: TreeMonomial) {
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
    }

    pub fn try_add(&self, other: &FreeChain) -> Result<FreeChain> {
        if self.grading() != other.grading() {
            return Err(Error::Parse(format!(
                "cannot add gradings {:?} and {:?}",
                self.grading(),
                other.grading()
            )));
        }
        let mut out = self.clone();
        for t in &other.terms {
            out.toggle_unchecked(t.clone());
        }
        Ok(out)
    }
}

impl std::ops::Add for &FreeChain {
    type Output = FreeChain;

    fn add(self, rhs: &FreeChain) -> FreeChain {
        self.try_add(rhs).expect("free chains of equal grading")
    }
}

impl fmt::Display for FreeChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Plus,
    Graft(usize),
    Gen(Generator),
    Unit,
}

struct FreeChainParser {
    tokens: Vec<Token>,
    pos: usize,
    src: String,
}

impl FreeChainParser {
    fn new(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                _ if c.is_whitespace() => i += 1,
                '(' => {
                    tokens.push(Token::Open);
                    i += 1;
                }
                ')' => {
                    tokens.push(Token::Close);
                    i += 1;
                }
                '+' => {
                    tokens.push(Token::Plus);
                    i += 1;
                }
                'o' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < chars.len() && chars[end].is_ascii_digit() {
                        end += 1;
                    }
                    let index: String = chars[start..end].iter().collect();
                    let index = index
                        .parse()
                        .map_err(|_| Error::Parse(format!("expected index after 'o' in {s:?}")))?;
                    tokens.push(Token::Graft(index));
                    i = end;
                }
                'i' if chars.get(i + 1) == Some(&'d') => {
                    tokens.push(Token::Unit);
                    i += 2;
                }
                _ => {
                    let g = Generator::from_symbol(&c.to_string())
                        .ok_or_else(|| Error::Parse(format!("unknown symbol {c:?} in {s:?}")))?;
                    tokens.push(Token::Gen(g));
                    i += 1;
                }
            }
        }
        Ok(FreeChainParser {
            tokens,
            pos: 0,
            src: s.to_string(),
        })
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in {:?}", self.src))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn sum(&mut self) -> Result<FreeChain> {
        let mut acc: Option<FreeChain> = None;
        loop {
            let t = self.term()?;
            match &mut acc {
                None => acc = Some(FreeChain::from_tree(t)),
                Some(c) => c.toggle(t)?,
            }
            match self.peek() {
                Some(Token::Plus) => self.pos += 1,
                None => break,
                Some(_) => return Err(self.err("unexpected token")),
            }
        }
        acc.ok_or_else(|| self.err("empty sum"))
    }

    fn term(&mut self) -> Result<TreeMonomial> {
        let mut acc = self.atom()?;
        while let Some(Token::Graft(i)) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = acc.graft(i, &rhs)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TreeMonomial> {
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Token::Gen(g)) => Ok(TreeMonomial::corolla(g)),
            Some(Token::Unit) => Ok(TreeMonomial::Leaf),
            Some(Token::Open) => {
                let inner = self.term()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.err("expected a generator or '('")),
        }
    }
}

/// Bilinear grafting `x ∘ᵢ y`.
pub fn graft(x: &FreeChain, i: usize, y: &FreeChain) -> Result<FreeChain> {
    if i == 0 || i > x.arity {
        return Err(Error::IndexOutOfRange {
            index: i,
            arity: x.arity,
        });
    }
    let mut out = FreeChain::zero(
        x.arity + y.arity - 1,
        x.dimension + y.dimension,
        x.level + y.level,
    );
    for a in &x.terms {
        for b in &y.terms {
            out.toggle_unchecked(a.graft(i, b)?);
        }
    }
    Ok(out)
}

/// All trees over `allowed` with the given tri-grading, sorted.
pub fn enumerate_monomials(
    arity: usize,
    dimension: usize,
    level: usize,
    allowed: &[Generator],
) -> Vec<TreeMonomial> {
    let mut out: Vec<TreeMonomial> = trees_of_arity(arity, allowed)
        .into_iter()
        .filter(|t| t.dimension() == dimension && t.level() == level)
        .collect();
    out.sort();
    out.dedup();
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn trees_of_arity(arity: usize, allowed: &[Generator]) -> Vec<TreeMonomial> {
    let mut out = Vec::new();
    if arity == 1 {
        out.push(TreeMonomial::Leaf);
    }
    for &g in allowed {
        for parts in compositions(arity, g.arity()) {
            let mut partial: Vec<Vec<TreeMonomial>> = vec![Vec::new()];
            for &p in &parts {
                let options = trees_of_arity(p, allowed);
                partial = partial
                    .into_iter()
                    .flat_map(|prefix| {
                        options.iter().map(move |o| {
                            let mut next = prefix.clone();
                            next.push(o.clone());
                            next
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(|ch| TreeMonomial::Node(g, ch)));
        }
    }
    out
}

/// The generators, their differentials and their images in `S`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub d_values: BTreeMap<Generator, FreeChain>,
    pub pi_values: BTreeMap<Generator, Chain>,
}

impl ModelSpec {
    pub fn standard() -> Self {
        let parse = |s: &str| FreeChain::parse(s).expect("well-formed model differential");
        let mut d_values = BTreeMap::new();
        for g in Generator::ALL {
            let (a, dim, lvl) = g.grading();
            d_values.insert(
                g,
                FreeChain::zero(a, dim.saturating_sub(1), lvl.saturating_sub(1)),
            );
        }
        d_values.insert(Generator::Associator, parse("m o1 m + m o2 m"));
        d_values.insert(
            Generator::Poissonator,
            parse("b o1 m + b o2 m + m o1 b + m o2 b"),
        );
        d_values.insert(
            Generator::Pentagonator,
            parse("m o1 A + m o2 A + A o1 m + A o2 m + A o3 m"),
        );
        d_values.insert(
            Generator::Coherence,
            parse(
                "A o1 b + A o2 b + A o3 b + b o1 A + b o2 A + B o1 m + B o2 m + B o3 m + m o1 B + m o2 B",
            ),
        );

        let mut pi_values = BTreeMap::new();
        pi_values.insert(Generator::Product, product_cycle());
        pi_values.insert(Generator::Bracket, bracket_cycle());
        pi_values.insert(
            Generator::CrossProduct,
            monomial_to_cycle(&"[x1,x3]*[x2,x4]".parse().expect("monomial")),
        );
        pi_values.insert(
            Generator::CrossBracket,
            monomial_to_cycle(&"[[x1,x3],[x2,x4]]".parse().expect("monomial")),
        );
        pi_values.insert(Generator::Associator, Chain::zero(3, 1));
        pi_values.insert(
            Generator::Poissonator,
            Chain::parse("21312+23132+12131+31323").expect("valid cells"),
        );
        ModelSpec {
            d_values,
            pi_values,
        }
    }

    /// Replaces the image of a generator in `S`.
    pub fn with_pi(mut self, g: Generator, value: Chain) -> Self {
        self.pi_values.insert(g, value);
        self
    }

    pub fn d(&self, g: Generator) -> &FreeChain {
        &self.d_values[&g]
    }

    pub fn pi(&self, g: Generator) -> Option<&Chain> {
        self.pi_values.get(&g)
    }

    /// Generators of the given level with arity `<= max_arity`.
    pub fn generators_at_level(&self, level: usize, max_arity: usize) -> Vec<Generator> {
        self.d_values
            .keys()
            .copied()
            .filter(|g| g.level() == level && g.arity() <= max_arity)
            .collect()
    }
}

fn d_tree(spec: &ModelSpec, t: &TreeMonomial, out: &mut FreeChain) {
    let TreeMonomial::Node(g, children) = t else {
        return;
    };
    for replacement in spec.d(*g).terms() {
        out.toggle_unchecked(replacement.substitute(children));
    }
    for (k, child) in children.iter().enumerate() {
        let mut child_d = FreeChain::zero(0, 0, 0);
        d_tree(spec, child, &mut child_d);
        for term in child_d.terms {
            let mut ch = children.clone();
            ch[k] = term;
            out.toggle_unchecked(TreeMonomial::Node(*g, ch));
        }
    }
}

/// The derivation extending `d` on generators (no signs in characteristic 2).
pub fn model_differential(spec: &ModelSpec, c: &FreeChain) -> FreeChain {
    let mut out = FreeChain::zero(
        c.arity,
        c.dimension.saturating_sub(1),
        c.level.saturating_sub(1),
    );
    for t in &c.terms {
        d_tree(spec, t, &mut out);
    }
    out
}

fn pi_tree(spec: &ModelSpec, t: &TreeMonomial) -> Result<Chain> {
    match t {
        TreeMonomial::Leaf => Ok(Chain::unit()),
        TreeMonomial::Node(g, children) => {
            let mut acc = spec.pi(*g).ok_or(Error::PiUndefined(g.symbol()))?.clone();
            for (idx, child) in children.iter().enumerate().rev() {
                if *child != TreeMonomial::Leaf {
                    acc = compose(&acc, idx + 1, &pi_tree(spec, child)?)?;
                }
            }
            Ok(acc)
        }
    }
}

/// The operad morphism `π` into `S` determined by the generator images.
pub fn evaluate_pi(spec: &ModelSpec, c: &FreeChain) -> Result<Chain> {
    let mut out = Chain::zero(c.arity, c.dimension);
    for t in &c.terms {
        out = out.try_add(&pi_tree(spec, t)?)?;
    }
    Ok(out)
}

/// `ρ`: the homology class of `π` on level-0 elements.
pub fn evaluate_rho(spec: &ModelSpec, c: &FreeChain) -> Result<HClass> {
    if c.level > 0 {
        return Err(Error::PositiveLevel(c.level));
    }
    HClass::from_cycle(&evaluate_pi(spec, c)?)
}

/// Coordinates of `c` against an ordered monomial basis.
pub fn vectorize(basis: &[TreeMonomial], c: &FreeChain) -> Result<BitVector> {
    let mut v = BitVector::zeros(basis.len());
    for t in c.terms() {
        let i = basis
            .binary_search(t)
            .map_err(|_| Error::Parse(format!("term {t} is outside the basis")))?;
        v.flip(i);
    }
    Ok(v)
}

/// Matrix of `d` from `domain` to `codomain` (both sorted monomial lists).
pub fn differential_matrix(
    spec: &ModelSpec,
    domain: &[TreeMonomial],
    codomain: &[TreeMonomial],
) -> Result<BitMatrix> {
    let columns = domain
        .iter()
        .map(|t| {
            vectorize(
                codomain,
                &model_differential(spec, &FreeChain::from_tree(t.clone())),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    BitMatrix::from_columns(codomain.len(), &columns)
}

/// Matrix of `ρ` from level-0 monomials to `H_dimension(S(arity))`.
pub fn rho_matrix(
    spec: &ModelSpec,
    domain: &[TreeMonomial],
    arity: usize,
    dimension: usize,
) -> Result<BitMatrix> {
    let columns = domain
        .iter()
        .map(|t| Ok(evaluate_rho(spec, &FreeChain::from_tree(t.clone()))?.coords))
        .collect::<Result<Vec<_>>>()?;
    BitMatrix::from_columns(homology(arity, dimension).betti, &columns)
}

/// Whether the null space of `m` is exactly the line spanned by `v ≠ 0`.
fn kernel_is_line(m: &BitMatrix, v: &BitVector) -> bool {
    let k = kernel_basis(m);
    k.len() == 1 && !v.is_zero() && m.mul_vec(v).map(|w| w.is_zero()).unwrap_or(false)
}

/// Checks every dimension, rank, kernel and cokernel claim about the model in
/// arity 3 and 4.
pub fn verify_bigraded_model(spec: &ModelSpec) -> CheckReport {
    let mut report = CheckReport::new(
        "bigraded-model",
        "bigraded model of the Gerstenhaber operad in arity <= 4: generators m, b, u, l; A, B; P, C",
    );
    let published = FailureKind::PublishedValueMismatch;
    let internal = FailureKind::InternalInconsistency;

    for g in Generator::ALL {
        let d = spec.d(g);
        let (a, dim, lvl) = g.grading();
        let ok = d.is_zero() || (d.arity == a && d.dimension + 1 == dim && d.level + 1 == lvl);
        report.subcheck(&format!("d({g}) has bidegree (-1,-1)"), true, ok, internal);
    }
    for g in [Generator::Pentagonator, Generator::Coherence] {
        let dd = model_differential(spec, spec.d(g));
        report.subcheck(&format!("d(d({g})) = 0"), true, dd.is_zero(), internal);
    }

    let w0 = &Generator::BINARY;
    let w1 = &Generator::LOW;

    // arity 3
    for (dim, kernel_gen) in [
        (0, Some(Generator::Associator)),
        (1, Some(Generator::Poissonator)),
        (2, None),
    ] {
        let basis = enumerate_monomials(3, dim, 0, w0);
        let expected_dim = [2, 4, 2][dim];
        report.subcheck(
            &format!("dim F(W0)_{dim}(3)"),
            expected_dim,
            basis.len(),
            published,
        );
        let rho = rho_matrix(spec, &basis, 3, dim).expect("level 0");
        let betti = homology(3, dim).betti;
        report.subcheck(
            &format!("rank rho F(W0)_{dim}(3) = dim H_{dim}(3)"),
            betti,
            rank(&rho),
            published,
        );
        match kernel_gen {
            Some(g) => {
                let v = vectorize(&basis, spec.d(g)).expect("d lands in F(W0)");
                report.subcheck(
                    &format!("ker rho F(W0)_{dim}(3) spanned by d{g}"),
                    true,
                    kernel_is_line(&rho, &v),
                    published,
                );
            }
            None => {
                report.subcheck(
                    "rho F(W0)_2(3) -> H_2(3) is an isomorphism",
                    true,
                    rho.rows() == rho.cols() && rank(&rho) == rho.cols(),
                    published,
                );
            }
        }
    }

    // arity 4, level 0 targets
    let level0: Vec<Vec<TreeMonomial>> = (0..4).map(|j| enumerate_monomials(4, j, 0, w0)).collect();
    for (j, expected) in [5usize, 15, 15, 5].into_iter().enumerate() {
        report.subcheck(
            &format!("dim F(W0)_{j}(4)"),
            expected,
            level0[j].len(),
            published,
        );
    }
    let level1: Vec<Vec<TreeMonomial>> = (1..4).map(|j| enumerate_monomials(4, j, 1, w1)).collect();
    for (k, expected) in [5usize, 10, 5].into_iter().enumerate() {
        report.subcheck(
            &format!("dim F(W1)_{}(4)", k + 1),
            expected,
            level1[k].len(),
            published,
        );
    }

    let kernel_gens = [
        Some(Generator::Pentagonator),
        Some(Generator::Coherence),
        None,
    ];
    for k in 0..3 {
        let j = k + 1;
        let d = differential_matrix(spec, &level1[k], &level0[k]).expect("d lands in F(W0)");
        let expected_rank = [4usize, 9, 5][k];
        report.subcheck(
            &format!("rank d F(W1)_{j}(4)"),
            expected_rank,
            rank(&d),
            published,
        );
        match kernel_gens[k] {
            Some(g) => {
                let v = vectorize(&level1[k], spec.d(g)).expect("d lands in F(W1)");
                report.subcheck(
                    &format!("ker d F(W1)_{j}(4) spanned by d{g}"),
                    true,
                    kernel_is_line(&d, &v),
                    published,
                );
            }
            None => {
                report.subcheck(
                    &format!("ker d F(W1)_{j}(4)"),
                    0,
                    kernel_basis(&d).len(),
                    published,
                );
            }
        }
        let rho = rho_matrix(spec, &level0[k], 4, k).expect("level 0");
        let composite_zero = rho.mul(&d).expect("shapes agree").is_zero();
        let nullity = level0[k].len() - rank(&rho);
        report.subcheck(
            &format!("ker rho = im d on F(W0)_{k}(4)"),
            true,
            composite_zero && nullity == rank(&d),
            published,
        );
        report.subcheck(
            &format!("dim coker d F(W1)_{j}(4) = rank rho in H_{k}(4)"),
            level0[k].len() - rank(&d),
            rank(&rho),
            published,
        );
    }

    // codimension-one images and the missing classes u, l
    for (j, g, name) in [
        (2usize, Generator::CrossProduct, "u"),
        (3, Generator::CrossBracket, "l"),
    ] {
        let betti = homology(4, j).betti;
        let rho = rho_matrix(spec, &level0[j], 4, j).expect("level 0");
        let image_rank = rank(&rho);
        report.subcheck(
            &format!("codim rho F(W0)_{j}(4) in H_{j}(4)"),
            1,
            betti - image_rank,
            published,
        );
        let missing = evaluate_rho(spec, &FreeChain::generator(g)).expect("level 0");
        let mut span = SpanBasis::new(betti, rho.cols() + 1);
        for col in rho.columns() {
            span.insert(&col).expect("lengths agree");
        }
        let outside = !span.contains(&missing.coords).expect("lengths agree");
        span.insert(&missing.coords).expect("lengths agree");
        report.subcheck(
            &format!("class({name}) completes rho F(W0)_{j}(4) to H_{j}(4)"),
            true,
            outside && span.dim() == betti,
            published,
        );
    }
    let injective = kernel_basis(&rho_matrix(spec, &level0[3], 4, 3).expect("level 0")).is_empty();
    report.subcheck("rho F(W0)_3(4) is injective", true, injective, published);

    let level1_gens: Vec<&str> = spec
        .generators_at_level(1, 4)
        .into_iter()
        .map(Generator::symbol)
        .collect();
    report.subcheck("W1(<=4) generators", vec!["A", "B"], level1_gens, internal);
    report.detail(
        "completeness",
        "the generator lists W1(<=4), W2(<=4) are consistent with the exactness checks above",
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(s: &str) -> FreeChain {
        FreeChain::parse(s).unwrap()
    }

    #[test]
    fn monomial_counts() {
        use Generator::*;
        assert_eq!(enumerate_monomials(4, 0, 0, &[Product]).len(), 5);
        let t: Vec<String> = enumerate_monomials(3, 1, 0, &[Product, Bracket])
            .iter()
            .map(ToString::to_string)
            .collect();
        let mut t_sorted = t.clone();
        t_sorted.sort();
        let mut want = vec!["m o1 b", "m o2 b", "b o1 m", "b o2 m"];
        want.sort();
        assert_eq!(t_sorted, want);
        let b_trees = enumerate_monomials(4, 3, 1, &Generator::LOW);
        assert_eq!(b_trees.len(), 5);
        assert!(b_trees
            .iter()
            .all(|t| t.generators().contains(&Poissonator)));
    }

    #[test]
    fn grafting() {
        let leaf = FreeChain::from_tree(TreeMonomial::Leaf);
        let a = FreeChain::generator(Generator::Associator);
        assert_eq!(graft(&leaf, 1, &a).unwrap(), a);
        let m = FreeChain::generator(Generator::Product);
        let comb = graft(&m, 1, &m).unwrap();
        assert_eq!(comb.to_string(), "m o1 m");
        assert_eq!(comb.arity, 3);
        let b = FreeChain::generator(Generator::Bracket);
        let u_shape = graft(&graft(&m, 2, &b).unwrap(), 1, &b).unwrap();
        assert_eq!(u_shape.grading(), (4, 2, 0));
        assert_eq!(u_shape.to_string(), "(m o2 b) o1 b");
        assert!(graft(&m, 3, &m).is_err());
    }

    #[test]
    fn parse_render_roundtrip() {
        for s in ["m o1 A + A o3 m", "(m o2 b) o1 b", "m o2 (b o1 m)", "id"] {
            let c = fc(s);
            assert_eq!(fc(&c.to_string()), c, "{s}");
        }
        assert!(FreeChain::parse("m o1 A + m").is_err());
        assert!(FreeChain::parse("m o3 m").is_err());
    }

    #[test]
    fn differential_examples() {
        let spec = ModelSpec::standard();
        let da = model_differential(&spec, &FreeChain::generator(Generator::Associator));
        assert_eq!(da, fc("m o1 m + m o2 m"));
        let dc = model_differential(&spec, &FreeChain::generator(Generator::Coherence));
        assert_eq!(dc.len(), 10);
        for g in [Generator::Pentagonator, Generator::Coherence] {
            let d = model_differential(&spec, &FreeChain::generator(g));
            assert!(model_differential(&spec, &d).is_zero());
        }
    }

    #[test]
    fn pi_compatibility() {
        use crate::surjection::differential;
        let spec = ModelSpec::standard();
        let pa = evaluate_pi(&spec, spec.d(Generator::Associator)).unwrap();
        assert!(pa.is_zero());
        let pb = evaluate_pi(&spec, spec.d(Generator::Poissonator)).unwrap();
        assert_eq!(pb, differential(spec.pi(Generator::Poissonator).unwrap()));
        assert!(evaluate_pi(&spec, spec.d(Generator::Pentagonator))
            .unwrap()
            .is_zero());
        assert_eq!(
            evaluate_pi(&spec, &FreeChain::generator(Generator::Coherence)),
            Err(Error::PiUndefined("C"))
        );
    }

    #[test]
    fn rho_examples() {
        let spec = ModelSpec::standard();
        let x123 = HClass::of_str("x1*x2*x3");
        assert_eq!(evaluate_rho(&spec, &fc("m o1 m")).unwrap(), x123);
        assert_eq!(evaluate_rho(&spec, &fc("m o2 m")).unwrap(), x123);
        let b1b = evaluate_rho(&spec, &fc("b o1 b")).unwrap();
        let b2b = evaluate_rho(&spec, &fc("b o2 b")).unwrap();
        assert_eq!(b1b, HClass::of_str("[[x1,x2],x3]"));
        assert_eq!(b2b, HClass::of_str("[x1,[x2,x3]]"));
        assert_ne!(b1b, b2b);
        assert_eq!(
            evaluate_rho(&spec, &FreeChain::generator(Generator::CrossProduct)).unwrap(),
            HClass::of_str("[x1,x3]*[x2,x4]")
        );
        assert_eq!(
            evaluate_rho(&spec, &FreeChain::generator(Generator::Associator)),
            Err(Error::PositiveLevel(1))
        );
    }

    #[test]
    fn bigraded_model_checks() {
        let r = verify_bigraded_model(&ModelSpec::standard());
        assert!(r.passed(), "{:#}", r.details);
    }
}
