use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unipotent_core::class_labels::{enumerate_sp_labels, CycleType, FormKind};
use unipotent_core::flags::{build_flag_pair, check_flag_conditions, standard_flag, Flag, FlagPair};
use unipotent_core::gf2::{
    dickson_invariant, epsilon_invariant, epsilon_invariant_exhaustive, is_unipotent, jordan_type_of_unipotent,
    preserves_forms, sp_label_of, transvection, BitMatrix, BitVector, FormedSpace, Subspace,
};
use unipotent_core::harness::enumerate_coset;

fn bit_vector(len: usize) -> impl Strategy<Value = BitVector> {
    prop::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bits(&b))
}

fn vectors(len: usize, max: usize) -> impl Strategy<Value = Vec<BitVector>> {
    prop::collection::vec(bit_vector(len), 0..=max)
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> BitVector {
    BitVector::from_u64(dim, rng.random())
}

/// Product of random transvections, which generate the symplectic group.
fn random_symplectic(space: &FormedSpace, rng: &mut ChaCha8Rng) -> BitMatrix {
    let mut g = BitMatrix::identity(space.dim());
    for _ in 0..4 * space.dim() {
        g = &transvection(space, &random_vector(space.dim(), rng)) * &g;
    }
    g
}

/// Product of random orthogonal reflections.
fn random_orthogonal(space: &FormedSpace, rng: &mut ChaCha8Rng, reflections: usize) -> BitMatrix {
    let mut g = BitMatrix::identity(space.dim());
    for _ in 0..reflections {
        let a = loop {
            let a = random_vector(space.dim(), rng);
            if space.quadratic(&a) == Some(true) {
                break a;
            }
        };
        g = &transvection(space, &a) * &g;
    }
    g
}

/// The unipotent radical of the stabilizer of the standard flag, `2^{n²}` elements.
fn borel_unipotents(n: usize) -> (FormedSpace, Vec<BitMatrix>) {
    let space = FormedSpace::standard(n, false);
    let flag = standard_flag(&space).unwrap();
    let ct = CycleType::parse(&vec!["1"; n].join(",")).unwrap();
    let pair = FlagPair { a: flag.clone(), b: flag, cycle_type: ct };
    (space, enumerate_coset(&pair).unwrap())
}

fn conjugate(g: &BitMatrix, h: &BitMatrix) -> BitMatrix {
    &(h * g) * &h.inverse().unwrap()
}

proptest! {
    #[test]
    fn dimension_formula(u in vectors(10, 6), w in vectors(10, 6)) {
        let u = Subspace::span(10, &u).unwrap();
        let w = Subspace::span(10, &w).unwrap();
        let sum = u.sum(&w).unwrap();
        let meet = u.intersect(&w).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), u.dim() + w.dim());
        prop_assert!(meet.is_subspace_of(&u) && meet.is_subspace_of(&w));
        prop_assert!(u.is_subspace_of(&sum) && w.is_subspace_of(&sum));
    }

    #[test]
    fn perp_is_an_involution(u in vectors(8, 8)) {
        let space = FormedSpace::standard(4, false);
        let u = Subspace::span(8, &u).unwrap();
        let p = u.perp(&space).unwrap();
        prop_assert_eq!(p.dim(), 8 - u.dim());
        prop_assert_eq!(p.perp(&space).unwrap(), u);
    }

    #[test]
    fn rank_nullity(rows in prop::collection::vec(bit_vector(9), 7)) {
        let m = BitMatrix::from_rows(9, &rows).unwrap();
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), 9);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn inverse_round_trip(seed in any::<u64>()) {
        let space = FormedSpace::standard(3, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_symplectic(&space, &mut rng);
        let inv = g.inverse().unwrap();
        prop_assert_eq!(&g * &inv, BitMatrix::identity(6));
        prop_assert!(preserves_forms(&g, &space).unwrap());
    }

    #[test]
    fn dickson_invariant_is_a_homomorphism(seed in any::<u64>()) {
        let space = FormedSpace::standard(3, true);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k1 = rng.random_range(0..8);
        let k2 = rng.random_range(0..8);
        let g = random_orthogonal(&space, &mut rng, k1);
        let h = random_orthogonal(&space, &mut rng, k2);
        prop_assert_eq!(dickson_invariant(&g, &space).unwrap(), (k1 % 2) as u8);
        let product = dickson_invariant(&(&g * &h), &space).unwrap();
        prop_assert_eq!(product, dickson_invariant(&g, &space).unwrap() ^ dickson_invariant(&h, &space).unwrap());
    }

    #[test]
    fn flag_pattern_is_invariant_under_isometries(seed in any::<u64>(), pick in 0usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = if pick % 2 == 0 { FormKind::Symplectic } else { FormKind::Orthogonal };
        let cts = unipotent_core::enumerate_cycle_types(3, form);
        let ct = &cts[pick % cts.len()];
        let pair = build_flag_pair(ct, form.has_quadratic_form()).unwrap();
        let space = pair.space().clone();
        let g = match form {
            FormKind::Symplectic => random_symplectic(&space, &mut rng),
            FormKind::Orthogonal => random_orthogonal(&space, &mut rng, 12),
        };
        let moved = |f: &Flag| {
            let lower = f.steps()[..=3].iter().map(|s| s.image_under(&g).unwrap()).collect();
            Flag::from_lower_half(space.clone(), lower).unwrap()
        };
        let image = FlagPair { a: moved(&pair.a), b: moved(&pair.b), cycle_type: ct.clone() };
        prop_assert_eq!(image.intersection_dims(), pair.intersection_dims());
        prop_assert!(check_flag_conditions(&image));
    }
}

#[test]
fn rank_sequence_matches_lambda_bound_on_borel_unipotents() {
    for n in 2..=3 {
        let (_, group) = borel_unipotents(n);
        assert_eq!(group.len(), 1 << (n * n));
        for g in &group {
            let jordan = jordan_type_of_unipotent(g).unwrap();
            let nil = g.plus_identity().unwrap();
            for i in 0..=2 * n as u32 {
                assert_eq!(nil.pow(i).unwrap().rank() as u32, jordan.lambda_bound(i), "{g:?} i={i}");
            }
        }
    }
}

#[test]
fn borel_unipotents_realize_every_label() {
    for n in 2..=3 {
        let (space, group) = borel_unipotents(n);
        let labels: BTreeSet<_> = group.iter().map(|g| sp_label_of(g, &space).unwrap()).collect();
        let expected: BTreeSet<_> = enumerate_sp_labels(2 * n as u32).into_iter().collect();
        assert_eq!(labels, expected);
    }
}

#[test]
fn labels_are_conjugation_invariant() {
    let (space, group) = borel_unipotents(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in group.iter().step_by(3) {
        let h = random_symplectic(&space, &mut rng);
        let c = conjugate(g, &h);
        assert!(is_unipotent(&c).unwrap());
        assert_eq!(sp_label_of(&c, &space).unwrap(), sp_label_of(g, &space).unwrap());
    }
}

#[test]
fn epsilon_agrees_with_exhaustive_oracle() {
    let (space, group) = borel_unipotents(3);
    for g in &group {
        let jordan = jordan_type_of_unipotent(g).unwrap();
        for i in (2..=6).step_by(2) {
            let fast = epsilon_invariant(g, &space, i);
            let slow = epsilon_invariant_exhaustive(g, &space, i);
            if jordan.multiplicity(i) == 0 {
                assert!(fast.is_err() && slow.is_err());
            } else {
                assert_eq!(fast.unwrap(), slow.unwrap());
            }
        }
    }
}
