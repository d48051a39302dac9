//! Algebraic identities checked on random and exhaustive inputs.

use cacti_formality::gerstenhaber::{monomial_to_cycle, GerstMonomial, HClass};
use cacti_formality::gf2::{in_span, kernel_basis, rank, solve, BitMatrix, BitVector};
use cacti_formality::homology::{class_of, homology, slice};
use cacti_formality::model::{
    enumerate_monomials, evaluate_pi, graft, model_differential, FreeChain, Generator, ModelSpec,
};
use cacti_formality::obstruction::{hom0_basis, partial_map, Hom0Element};
use cacti_formality::surjection::{
    act, cells_up_to, compose, differential, enumerate_basis, interval_decompositions, Chain,
    Permutation, SurjSeq,
};
use proptest::prelude::*;

fn bitvec(len: usize) -> impl Strategy<Value = BitVector> {
    prop::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bools(&b))
}

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
        prop::collection::vec(bitvec(c), r)
            .prop_map(move |rows| BitMatrix::from_rows(c, rows).unwrap())
    })
}

/// A random chain in `S_dim(arity)` drawn as a subset of the basis.
fn chain(arity: usize, dim: usize) -> impl Strategy<Value = Chain> {
    let n = slice(arity, dim).rank();
    bitvec(n).prop_map(move |v| slice(arity, dim).chain(&v).unwrap())
}

fn graded_chain() -> impl Strategy<Value = Chain> {
    (2usize..=4)
        .prop_flat_map(|k| (Just(k), 0..k))
        .prop_flat_map(|(k, j)| chain(k, j))
}

fn random_cycle(arity: usize, dim: usize) -> impl Strategy<Value = Chain> {
    let h = homology(arity, dim);
    bitvec(h.cycle_basis.len()).prop_map(move |mask| {
        let h = homology(arity, dim);
        let mut v = BitVector::zeros(h.slice.rank());
        for i in mask.ones() {
            v += &h.cycle_basis[i];
        }
        h.slice.chain(&v).unwrap()
    })
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn in_span_matches_exhaustive_combinations(
        (vs, v) in (1usize..10, 0usize..=12).prop_flat_map(|(len, n)| {
            (prop::collection::vec(bitvec(len), n), bitvec(len))
        })
    ) {
        let mut brute = false;
        for mask in 0u32..(1 << vs.len()) {
            let mut acc = BitVector::zeros(v.len());
            for (i, w) in vs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc += w;
                }
            }
            brute |= acc == v;
        }
        prop_assert_eq!(in_span(&vs, &v).unwrap(), brute);
    }

    #[test]
    fn rank_plus_nullity(m in matrix()) {
        let kernel = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).unwrap().is_zero());
        }
        prop_assert!(rank(&m) <= m.rows().min(m.cols()));
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn solve_recovers_a_preimage((m, x) in matrix().prop_flat_map(|m| { let c = m.cols(); (Just(m), bitvec(c)) })) {
        let v = m.mul_vec(&x).unwrap();
        let y = solve(&m, &v).unwrap().expect("v is in the column span");
        prop_assert_eq!(m.mul_vec(&y).unwrap(), v);
    }

    #[test]
    fn class_of_boundary_is_zero((k, j) in (2usize..=4).prop_flat_map(|k| (Just(k), 0..k - 1)), seed in any::<u64>()) {
        let n = slice(k, j + 1).rank();
        let v = BitVector::from_indices(n, (0..n).filter(|i| (seed >> (i % 64)) & 1 == 1));
        let w = slice(k, j + 1).chain(&v).unwrap();
        prop_assert!(class_of(&differential(&w)).unwrap().is_zero());
    }

    #[test]
    fn class_of_is_additive((z1, z2) in (2usize..=4).prop_flat_map(|k| (Just(k), 0..k)).prop_flat_map(|(k, j)| (random_cycle(k, j), random_cycle(k, j)))) {
        let sum = class_of(&z1.try_add(&z2).unwrap()).unwrap();
        prop_assert_eq!(sum, &class_of(&z1).unwrap() + &class_of(&z2).unwrap());
    }

    #[test]
    fn differential_commutes_with_the_action(c in graded_chain(), pick in any::<prop::sample::Index>()) {
        prop_assume!(c.dimension() > 0);
        let perms = Permutation::all(c.arity());
        let sigma = &perms[pick.index(perms.len())];
        prop_assert_eq!(act(sigma, &differential(&c)).unwrap(), differential(&act(sigma, &c).unwrap()));
    }

    #[test]
    fn differential_squares_to_zero(c in graded_chain()) {
        prop_assume!(c.dimension() > 1);
        prop_assert!(differential(&differential(&c)).is_zero());
    }
}

#[test]
fn interval_decomposition_count() {
    // A decomposition is a multiset of n-1 cut letters among the L letters.
    for cell in cells_up_to(4, 3) {
        for n in 1..=4 {
            let l = cell.len();
            let got = interval_decompositions(&cell, n);
            assert_eq!(got.len(), binom(l + n - 2, n - 1), "{cell} into {n}");
            for pieces in &got {
                assert_eq!(pieces.first().unwrap()[0], cell.values()[0]);
                assert_eq!(
                    *pieces.last().unwrap().last().unwrap(),
                    *cell.values().last().unwrap()
                );
                let flat: usize = pieces.iter().map(Vec::len).sum();
                assert_eq!(flat, l + n - 1);
            }
        }
    }
}

fn leibniz_holds(x: &SurjSeq, i: usize, y: &SurjSeq) -> bool {
    let (cx, cy) = (Chain::from_seq(x.clone()), Chain::from_seq(y.clone()));
    let composite = compose(&cx, i, &cy).unwrap();
    if composite.dimension() == 0 {
        return true;
    }
    let lhs = differential(&composite);
    let mut rhs = Chain::zero(lhs.arity(), lhs.dimension());
    if x.dimension() > 0 {
        rhs = rhs
            .try_add(&compose(&differential(&cx), i, &cy).unwrap())
            .unwrap();
    }
    if y.dimension() > 0 {
        rhs = rhs
            .try_add(&compose(&cx, i, &differential(&cy)).unwrap())
            .unwrap();
    }
    lhs == rhs
}

#[test]
fn differential_is_a_derivation_of_composition() {
    let cells = cells_up_to(4, 2);
    for x in &cells {
        for y in &cells {
            if x.arity() + y.arity() - 1 > 4 {
                continue;
            }
            for i in 1..=x.arity() {
                assert!(leibniz_holds(x, i, y), "{x} o{i} {y}");
            }
        }
    }
}

#[test]
fn monomial_classes_do_not_depend_on_representatives() {
    // 21 is homologous to 12; 121+212 is the only cycle in its class.
    let m_alt = Chain::parse("21").unwrap();
    let b = Chain::parse("121+212").unwrap();
    for k in 2..=4 {
        for j in 0..k {
            for mono in GerstMonomial::all(k, j) {
                let standard = class_of(&monomial_to_cycle(&mono)).unwrap();
                let alt = class_of(&mono.cycle_with(&m_alt, &b).unwrap()).unwrap();
                assert_eq!(standard, alt, "{mono}");
            }
        }
    }
}

#[test]
fn enumeration_sizes_match_oracle() {
    // Brute-force filter over all words of length k + j.
    fn is_cell(w: &[usize], k: usize) -> bool {
        let surjective = (1..=k).all(|v| w.contains(&v));
        let no_repeats = w.windows(2).all(|p| p[0] != p[1]);
        let n = w.len();
        let mut abab = false;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        abab |= w[a] == w[c] && w[b] == w[d] && w[a] != w[b];
                    }
                }
            }
        }
        surjective && no_repeats && !abab
    }
    fn brute(k: usize, j: usize) -> usize {
        let len = k + j;
        let mut count = 0;
        let mut word = vec![1usize; len];
        loop {
            if is_cell(&word, k) {
                count += 1;
            }
            let mut p = 0;
            while p < len && word[p] == k {
                word[p] = 1;
                p += 1;
            }
            if p == len {
                break;
            }
            word[p] += 1;
        }
        count
    }
    for k in 1..=4 {
        for j in 0..k {
            assert_eq!(enumerate_basis(k, j).len(), brute(k, j), "S_{j}({k})");
        }
    }
    assert_eq!(enumerate_basis(4, 1).len(), 144);
}

/// `π` is defined on every generator except the level-2 ones.
fn has_pi(c: &FreeChain) -> bool {
    c.terms().all(|t| {
        !t.generators()
            .iter()
            .any(|g| matches!(g, Generator::Pentagonator | Generator::Coherence))
    })
}

fn terms(c: &FreeChain) -> Vec<String> {
    c.terms().map(ToString::to_string).collect()
}

fn model_slices() -> Vec<FreeChain> {
    let mut out = Vec::new();
    for arity in 2..=4 {
        for level in 0..=2 {
            for dim in 0..=4 {
                for t in enumerate_monomials(arity, dim, level, &Generator::ALL) {
                    out.push(FreeChain::from_tree(t));
                }
            }
        }
    }
    out
}

#[test]
fn model_differential_squares_to_zero_and_commutes_with_pi() {
    let spec = ModelSpec::standard();
    for c in model_slices() {
        let dc = model_differential(&spec, &c);
        assert!(model_differential(&spec, &dc).is_zero(), "{c}");
        if !has_pi(&c) {
            continue;
        }
        if c.dimension > 0 {
            let lhs = differential(&evaluate_pi(&spec, &c).unwrap());
            assert_eq!(lhs, evaluate_pi(&spec, &dc).unwrap(), "{c}");
        } else {
            assert!(dc.is_zero());
        }
    }
}

#[test]
fn grafting_is_compatible_with_d_and_pi() {
    let spec = ModelSpec::standard();
    let small: Vec<FreeChain> = model_slices()
        .into_iter()
        .filter(|c| c.arity <= 3)
        .collect();
    for x in &small {
        for y in &small {
            if x.arity + y.arity - 1 > 4 {
                continue;
            }
            for i in 1..=x.arity {
                let xy = graft(x, i, y).unwrap();
                if has_pi(&xy) {
                    let pi_xy = evaluate_pi(&spec, &xy).unwrap();
                    let pi_x = evaluate_pi(&spec, x).unwrap();
                    let composed = compose(&pi_x, i, &evaluate_pi(&spec, y).unwrap()).unwrap();
                    assert_eq!(pi_xy, composed, "pi({x} o{i} {y})");
                }

                let lhs = terms(&model_differential(&spec, &xy));
                let mut rhs: Vec<String> = Vec::new();
                let dx = model_differential(&spec, x);
                let dy = model_differential(&spec, y);
                if !dx.is_zero() {
                    rhs.extend(terms(&graft(&dx, i, y).unwrap()));
                }
                if !dy.is_zero() {
                    rhs.extend(terms(&graft(x, i, &dy).unwrap()));
                }
                // Mod 2: keep the terms occurring an odd number of times.
                rhs.sort();
                let mut reduced: Vec<String> = Vec::new();
                for t in rhs {
                    if reduced.last() == Some(&t) {
                        reduced.pop();
                    } else {
                        reduced.push(t);
                    }
                }
                let mut lhs = lhs;
                lhs.sort();
                let rhs = reduced;
                assert_eq!(lhs, rhs, "d({x} o{i} {y})");
            }
        }
    }
}

#[test]
fn partial_map_is_linear() {
    let basis = hom0_basis();
    let images: Vec<_> = basis.iter().map(partial_map).collect();
    for mask in 0u32..32 {
        let mut f = Hom0Element::zero();
        let mut expected = partial_map(&f);
        for j in 0..5 {
            if mask >> j & 1 == 1 {
                f = &f + &basis[j];
                expected = &expected + &images[j];
            }
        }
        assert_eq!(partial_map(&f), expected, "mask {mask:05b}");
    }
    assert!(partial_map(&Hom0Element::zero()).is_zero());
    assert_eq!(HClass::unit().coords.len(), 1);
}
