//! The second filtration of the surjection operad, i.e. the cellular chains
//! of spineless cacti, with F₂ coefficients.
//!
//! A cell of arity `k` and dimension `j` is a word of length `k + j` in the
//! letters `1..=k` that uses every letter, never repeats a letter twice in a
//! row and contains no (scattered) subword `a b a b` with `a ≠ b`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{CheckReport, FailureKind};

/// Largest arity a cell can carry (values are stored as bytes).
pub const MAX_ARITY: usize = u8::MAX as usize;

/// A single cell of `S(k)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurjSeq {
    values: Vec<u8>,
    arity: usize,
}

fn contains_abab(values: &[u8], arity: usize) -> bool {
    for a in 1..=arity as u8 {
        for b in 1..=arity as u8 {
            if a == b {
                continue;
            }
            let pattern = [a, b, a, b];
            let mut matched = 0;
            for &v in values {
                if v == pattern[matched] {
                    matched += 1;
                    if matched == 4 {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn valid_cell(values: &[u8], arity: usize) -> bool {
    if arity == 0 || arity > MAX_ARITY || values.len() < arity || values.len() > 2 * arity - 1 {
        return false;
    }
    let mut seen = vec![false; arity + 1];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > arity {
            return false;
        }
        seen[v] = true;
    }
    if !seen[1..].iter().all(|&s| s) {
        return false;
    }
    if values.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    !contains_abab(values, arity)
}

/// Whether `values` is a cell of arity `arity`.
pub fn is_valid(values: &[usize], arity: usize) -> bool {
    if values.iter().any(|&v| v == 0 || v > MAX_ARITY) {
        return false;
    }
    let bytes: Vec<u8> = values.iter().map(|&v| v as u8).collect();
    valid_cell(&bytes, arity)
}

impl SurjSeq {
    pub fn new(values: &[usize], arity: usize) -> Result<Self> {
        if !is_valid(values, arity) {
            let shown = values
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",");
            return Err(Error::InvalidSequence(shown, arity));
        }
        Ok(SurjSeq {
            values: values.iter().map(|&v| v as u8).collect(),
            arity,
        })
    }

    fn from_bytes_unchecked(values: Vec<u8>, arity: usize) -> Self {
        debug_assert!(valid_cell(&values, arity));
        SurjSeq { values, arity }
    }

    /// The unit `1 ∈ S(1)`.
    pub fn unit() -> Self {
        SurjSeq {
            values: vec![1],
            arity: 1,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dimension(&self) -> usize {
        self.values.len() - self.arity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> Vec<usize> {
        self.values.iter().map(|&v| v as usize).collect()
    }
}

impl fmt::Display for SurjSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for SurjSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurjSeq({self})")
    }
}

fn parse_values(s: &str) -> Result<Vec<usize>> {
    if s.contains(',') {
        s.split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    } else {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
            })
            .collect()
    }
}

impl FromStr for SurjSeq {
    type Err = Error;

    /// Digit strings (`"12321"`) or comma-separated integers. The arity is
    /// the largest value present.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values = parse_values(s)?;
        let arity = values.iter().copied().max().unwrap_or(0);
        SurjSeq::new(&values, arity)
    }
}

/// A homogeneous F₂-linear combination of cells.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    arity: usize,
    dimension: usize,
    terms: BTreeSet<SurjSeq>,
}

impl Chain {
    pub fn zero(arity: usize, dimension: usize) -> Self {
        Chain {
            arity,
            dimension,
            terms: BTreeSet::new(),
        }
    }

    pub fn from_seq(seq: SurjSeq) -> Self {
        let mut c = Chain::zero(seq.arity(), seq.dimension());
        c.terms.insert(seq);
        c
    }

    /// Sums `terms` mod 2, so repeated cells cancel.
    pub fn from_terms(
        arity: usize,
        dimension: usize,
        terms: impl IntoIterator<Item = SurjSeq>,
    ) -> Result<Self> {
        let mut c = Chain::zero(arity, dimension);
        for t in terms {
            c.toggle(t)?;
        }
        Ok(c)
    }

    /// Unit chain `1 ∈ S(1)`.
    pub fn unit() -> Self {
        Chain::from_seq(SurjSeq::unit())
    }

    /// Parses `"a+b+c"`; arity and dimension come from the first term.
    pub fn parse(s: &str) -> Result<Self> {
        let first = s
            .split('+')
            .next()
            .map(str::trim)
            .filter(|t| !t.is_empty() && *t != "0")
            .ok_or_else(|| Error::Parse(format!("cannot infer grading of {s:?}")))?;
        let first: SurjSeq = first.parse()?;
        Self::parse_graded(s, first.arity(), first.dimension())
    }

    pub fn parse_graded(s: &str, arity: usize, dimension: usize) -> Result<Self> {
        let mut c = Chain::zero(arity, dimension);
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(c);
        }
        for part in s.split('+') {
            let part = part.trim();
            let values = parse_values(part)?;
            c.toggle(SurjSeq::new(&values, arity)?)?;
        }
        Ok(c)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dimension(&self) -> usize {
        self.dimension
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

    pub fn contains(&self, seq: &SurjSeq) -> bool {
        self.terms.contains(seq)
    }

    /// Terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &SurjSeq> {
        self.terms.iter()
    }

    /// Adds a single cell (mod 2).
    pub fn toggle(&mut self, seq: SurjSeq) -> Result<()> {
        if seq.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: seq.arity(),
            });
        }
        if seq.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: seq.dimension(),
            });
        }
        self.toggle_unchecked(seq);
        Ok(())
    }

    fn toggle_unchecked(&mut self, seq: SurjSeq) {
        if !self.terms.remove(&seq) {
            self.terms.insert(seq);
        }
    }

    pub fn try_add(&self, other: &Chain) -> Result<Chain> {
        self.check_same_grading(other)?;
        Ok(self + other)
    }

    fn check_same_grading(&self, other: &Chain) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        Ok(())
    }
}

impl std::ops::Add for &Chain {
    type Output = Chain;

    /// Panics if the gradings differ; see [`Chain::try_add`].
    fn add(self, rhs: &Chain) -> Chain {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::AddAssign<&Chain> for Chain {
    fn add_assign(&mut self, rhs: &Chain) {
        self.check_same_grading(rhs).expect("chain gradings differ");
        for t in &rhs.terms {
            self.toggle_unchecked(t.clone());
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain[{},{}]({self})", self.arity, self.dimension)
    }
}

/// All cells of the given arity and dimension in lexicographic order.
pub fn enumerate_basis(arity: usize, dimension: usize) -> Vec<SurjSeq> {
    if arity == 0 || arity > MAX_ARITY || dimension + 1 > arity {
        return Vec::new();
    }
    let len = arity + dimension;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(len);
    let mut counts = vec![0usize; arity + 1];
    extend_cells(arity, len, &mut prefix, &mut counts, &mut out);
    out
}

fn closes_abab(prefix: &[u8], last: u8) -> bool {
    // a `last` a, followed by `last`
    let distinct: BTreeSet<u8> = prefix.iter().copied().filter(|&a| a != last).collect();
    distinct.into_iter().any(|a| {
        let pattern = [a, last, a];
        let mut matched = 0;
        for &v in prefix {
            if v == pattern[matched] {
                matched += 1;
                if matched == 3 {
                    return true;
                }
            }
        }
        false
    })
}

fn extend_cells(
    arity: usize,
    len: usize,
    prefix: &mut Vec<u8>,
    counts: &mut [usize],
    out: &mut Vec<SurjSeq>,
) {
    if prefix.len() == len {
        if counts[1..].iter().all(|&c| c > 0) {
            out.push(SurjSeq::from_bytes_unchecked(prefix.clone(), arity));
        }
        return;
    }
    let missing = counts[1..].iter().filter(|&&c| c == 0).count();
    if missing > len - prefix.len() {
        return;
    }
    for v in 1..=arity as u8 {
        if prefix.last() == Some(&v) || closes_abab(prefix, v) {
            continue;
        }
        prefix.push(v);
        counts[v as usize] += 1;
        extend_cells(arity, len, prefix, counts, out);
        counts[v as usize] -= 1;
        prefix.pop();
    }
}

/// The boundary `δ`: delete one letter in every possible way and keep the
/// results that are still cells. Dimension-0 chains map to zero.
pub fn differential(c: &Chain) -> Chain {
    if c.dimension == 0 {
        return Chain::zero(c.arity, 0);
    }
    let mut out = Chain::zero(c.arity, c.dimension - 1);
    let mut scratch = Vec::new();
    for term in &c.terms {
        for skip in 0..term.values.len() {
            scratch.clear();
            scratch.extend(
                term.values
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != skip)
                    .map(|(_, &v)| v),
            );
            if valid_cell(&scratch, c.arity) {
                out.toggle_unchecked(SurjSeq::from_bytes_unchecked(scratch.clone(), c.arity));
            }
        }
    }
    out
}

/// Calls `f` with every nondecreasing list of `n - 1` cut positions in
/// `0..len`. Piece `j` of the decomposition runs from cut `j - 1` to cut `j`
/// inclusive, with implicit cuts at `0` and `len - 1`.
fn for_each_cut_list(len: usize, n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(len: usize, remaining: usize, cuts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if remaining == 0 {
            f(cuts);
            return;
        }
        let start = cuts.last().copied().unwrap_or(0);
        for c in start..len {
            cuts.push(c);
            rec(len, remaining - 1, cuts, f);
            cuts.pop();
        }
    }
    if len == 0 || n == 0 {
        return;
    }
    let mut cuts = Vec::with_capacity(n - 1);
    rec(len, n - 1, &mut cuts, f);
}

/// Interval decompositions of `y` into `n` pieces: contiguous nonempty
/// pieces covering `y` in order, consecutive pieces sharing exactly one letter.
pub fn interval_decompositions_of<T: Clone>(y: &[T], n: usize) -> Vec<Vec<Vec<T>>> {
    let mut out = Vec::new();
    for_each_cut_list(y.len(), n, &mut |cuts| {
        let mut bounds = Vec::with_capacity(n + 1);
        bounds.push(0);
        bounds.extend_from_slice(cuts);
        bounds.push(y.len() - 1);
        out.push(bounds.windows(2).map(|w| y[w[0]..=w[1]].to_vec()).collect());
    });
    out
}

pub fn interval_decompositions(y: &SurjSeq, n: usize) -> Vec<Vec<Vec<usize>>> {
    interval_decompositions_of(&y.values(), n)
}

fn compose_cells(x: &SurjSeq, i: usize, y: &SurjSeq, out: &mut Chain) {
    let i8 = i as u8;
    let shift = (y.arity - 1) as u8;
    let offset = (i - 1) as u8;
    let arity = x.arity + y.arity - 1;
    let n = x.values.iter().filter(|&&v| v == i8).count();
    let ylen = y.values.len();
    let mut word = Vec::with_capacity(x.values.len() + ylen + n);
    for_each_cut_list(ylen, n, &mut |cuts| {
        word.clear();
        let mut occurrence = 0;
        for &v in &x.values {
            if v == i8 {
                let start = if occurrence == 0 {
                    0
                } else {
                    cuts[occurrence - 1]
                };
                let end = if occurrence == n - 1 {
                    ylen - 1
                } else {
                    cuts[occurrence]
                };
                word.extend(y.values[start..=end].iter().map(|&w| w + offset));
                occurrence += 1;
            } else if v > i8 {
                word.push(v + shift);
            } else {
                word.push(v);
            }
        }
        if valid_cell(&word, arity) {
            out.toggle_unchecked(SurjSeq::from_bytes_unchecked(word.clone(), arity));
        }
    });
}

/// Partial composition `x ∘ᵢ y`, extended bilinearly.
pub fn compose(x: &Chain, i: usize, y: &Chain) -> Result<Chain> {
    if x.arity == 0 || y.arity == 0 {
        return Err(Error::ZeroArity);
    }
    if i == 0 || i > x.arity {
        return Err(Error::IndexOutOfRange {
            index: i,
            arity: x.arity,
        });
    }
    let arity = x.arity + y.arity - 1;
    if arity > MAX_ARITY {
        return Err(Error::ArityMismatch {
            expected: MAX_ARITY,
            got: arity,
        });
    }
    let mut out = Chain::zero(arity, x.dimension + y.dimension);
    for a in &x.terms {
        for b in &y.terms {
            compose_cells(a, i, b, &mut out);
        }
    }
    Ok(out)
}

/// A permutation in one-line notation `[σ(1), …, σ(k)]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k + 1];
        for &v in &images {
            if v == 0 || v > k || seen[v] {
                return Err(Error::InvalidPermutation(images));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (1..=k).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// All permutations of degree `k` in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        fn rec(k: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if current.len() == k {
                out.push(Permutation {
                    images: current.clone(),
                });
                return;
            }
            for v in 1..=k {
                if !used[v] {
                    used[v] = true;
                    current.push(v);
                    rec(k, current, used, out);
                    current.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(
            k,
            &mut Vec::with_capacity(k),
            &mut vec![false; k + 1],
            &mut out,
        );
        out
    }
}

/// Symmetric group action on values: each letter `v` becomes `σ(v)`.
pub fn act(sigma: &Permutation, c: &Chain) -> Result<Chain> {
    if sigma.degree() != c.arity {
        return Err(Error::ArityMismatch {
            expected: c.arity,
            got: sigma.degree(),
        });
    }
    let mut out = Chain::zero(c.arity, c.dimension);
    for t in &c.terms {
        let values = t
            .values
            .iter()
            .map(|&v| sigma.images[v as usize - 1] as u8)
            .collect();
        out.toggle_unchecked(SurjSeq::from_bytes_unchecked(values, c.arity));
    }
    Ok(out)
}

/// Every cell of arity `1..=max_arity` and dimension `<= max_dim`.
pub fn cells_up_to(max_arity: usize, max_dim: usize) -> Vec<SurjSeq> {
    (1..=max_arity)
        .flat_map(|k| (0..=max_dim.min(k - 1)).flat_map(move |j| enumerate_basis(k, j)))
        .collect()
}

/// Exhaustively checks the planar operad axioms on cells: all triples whose
/// composite has arity `<= max_arity` with every cell of dimension `<= 2`.
pub fn check_operad_axioms(max_arity: usize) -> CheckReport {
    let mut report = CheckReport::new(
        format!("operad-axioms.max-arity-{max_arity}"),
        "planar operad axioms: parallel and sequential associativity, bi-sided unit",
    );
    let mut by_arity: Vec<Vec<Chain>> = vec![Vec::new(); max_arity + 1];
    for cell in cells_up_to(max_arity, 2) {
        by_arity[cell.arity()].push(Chain::from_seq(cell));
    }
    let cell_count: usize = by_arity.iter().map(Vec::len).sum();
    let unit = Chain::unit();
    let mut counterexample: Option<String> = None;
    let (mut parallel, mut sequential, mut units) = (0usize, 0usize, 0usize);

    'outer: for n in 1..=max_arity {
        for a in &by_arity[n] {
            for i in 1..=n {
                units += 1;
                let right = compose(a, i, &unit).expect("index in range");
                if &right != a {
                    counterexample = Some(format!("{a} o{i} 1 = {right}"));
                    break 'outer;
                }
            }
            let left = compose(&unit, 1, a).expect("index in range");
            if &left != a {
                counterexample = Some(format!("1 o1 {a} = {left}"));
                break 'outer;
            }
        }
        for p in 1..=(max_arity + 1 - n) {
            for q in 1..=(max_arity + 2 - n - p) {
                for a in &by_arity[n] {
                    for b in &by_arity[p] {
                        for i in 1..=n {
                            let ab = compose(a, i, b).expect("index in range");
                            for c in &by_arity[q] {
                                for j in (i + 1)..=n {
                                    parallel += 1;
                                    let lhs = compose(&ab, j + p - 1, c).expect("index in range");
                                    let ac = compose(a, j, c).expect("index in range");
                                    let rhs = compose(&ac, i, b).expect("index in range");
                                    if lhs != rhs {
                                        counterexample = Some(format!(
                                            "parallel ({a} o{i} {b}) o{} {c} = {lhs} but ({a} o{j} {c}) o{i} {b} = {rhs}",
                                            j + p - 1
                                        ));
                                        break 'outer;
                                    }
                                }
                                for j in 1..=p {
                                    sequential += 1;
                                    let bc = compose(b, j, c).expect("index in range");
                                    let lhs = compose(a, i, &bc).expect("index in range");
                                    let rhs = compose(&ab, i + j - 1, c).expect("index in range");
                                    if lhs != rhs {
                                        counterexample = Some(format!(
                                            "sequential {a} o{i} ({b} o{j} {c}) = {lhs} but ({a} o{i} {b}) o{} {c} = {rhs}",
                                            i + j - 1
                                        ));
                                        break 'outer;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    report.detail("cells", cell_count);
    report.detail("parallel_instances", parallel);
    report.detail("sequential_instances", sequential);
    report.detail("unit_instances", units);
    if let Some(ce) = counterexample {
        report.detail("counterexample", ce);
        report.fail(FailureKind::InternalInconsistency);
    }
    report
}

/// Checks `δ∘δ = 0` on every cell of arity `<= max_arity`.
pub fn check_differential_squares(max_arity: usize) -> CheckReport {
    let mut report = CheckReport::new(
        format!("delta-squared.max-arity-{max_arity}"),
        "the cacti differential squares to zero",
    );
    let mut checked = 0usize;
    let mut per_arity = Vec::new();
    for k in 1..=max_arity {
        let mut count = 0usize;
        for j in 0..k {
            for cell in enumerate_basis(k, j) {
                count += 1;
                let dd = differential(&differential(&Chain::from_seq(cell.clone())));
                if !dd.is_zero() {
                    report.detail(
                        "counterexample",
                        json!({"cell": cell.to_string(), "dd": dd.to_string()}),
                    );
                    report.fail(FailureKind::InternalInconsistency);
                    return report;
                }
            }
        }
        per_arity.push(json!({"arity": k, "cells": count}));
        checked += count;
    }
    report.detail("cells_checked", checked);
    report.detail("per_arity", per_arity);
    report
}
