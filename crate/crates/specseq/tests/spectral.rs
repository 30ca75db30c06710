use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specseq::complex::ComplexError;
use specseq::io::{parse_complex, ComplexFile};
use specseq::random::random_complex;
use specseq::*;

fn one_by_one(entries: &[((usize, usize), i64)], n: usize) -> Result<FilteredComplex<Q>, ComplexError> {
    let blocks: BTreeMap<_, _> =
        entries.iter().map(|&(ij, v)| (ij, Matrix::from_rows(vec![vec![Q::from_i64(v)]], 1))).collect();
    FilteredComplex::from_blocks(vec![1; n], &blocks, None)
}

#[test]
fn zero_differential_pages_are_constant() {
    let fc = FilteredComplex::<Q>::from_blocks(vec![2, 0, 3], &BTreeMap::new(), None).unwrap();
    for page in compute_pages(&fc).unwrap() {
        assert_eq!(page.dims(), vec![2, 0, 3]);
    }
    assert_eq!(direct_homology_gr(&fc).dims, vec![2, 0, 3]);
}

#[test]
fn one_step_killing() {
    let fc = one_by_one(&[((1, 0), 1)], 2).unwrap();
    let pages = compute_pages(&fc).unwrap();
    assert_eq!(pages[1].dims(), vec![1, 1]);
    assert_eq!(pages[2].dims(), vec![0, 0]);
}

#[test]
fn long_differential_kills_late() {
    let fc = one_by_one(&[((2, 0), 1)], 3).unwrap();
    let pages = compute_pages(&fc).unwrap();
    assert_eq!(pages[0].dims(), vec![1, 1, 1]);
    assert_eq!(pages[1].dims(), vec![1, 1, 1]);
    // D_{20} lives on page 2; its effect shows on page 3 = P + 1.
    assert_eq!(pages[2].dims(), vec![1, 1, 1]);
    assert_eq!(pages[3].dims(), vec![0, 1, 0]);
    assert_eq!(direct_homology_gr(&fc).dims, vec![0, 1, 0]);
    assert_eq!(pages[2].differentials[0].rank(), 1);
}

#[test]
fn rejects_non_nilpotent() {
    assert_eq!(one_by_one(&[((1, 0), 1), ((2, 1), 1)], 3).unwrap_err(), ComplexError::NotNilpotent { i: 2, j: 0 });
    assert!(one_by_one(&[((0, 1), 1)], 2).is_err());
}

#[test]
fn invertible_diagonal_shortcut() {
    // V_0 = <a,b> with d00 = [[0,0],[1,0]]: not invertible. Use a 2-step complex with d_11 invertible-free.
    let fc = one_by_one(&[((1, 0), 1)], 2).unwrap();
    let sc = first_pages_shortcut(&fc);
    assert!(shortcut_agrees(&compute_pages(&fc).unwrap(), &sc));

    let mut blocks = BTreeMap::new();
    blocks.insert((0, 0), Matrix::from_rows(vec![vec![Q::from_i64(0), Q::from_i64(0)], vec![Q::from_i64(3), Q::from_i64(0)]], 2));
    let fc = FilteredComplex::from_blocks(vec![2], &blocks, None).unwrap();
    let pages = compute_pages(&fc).unwrap();
    assert_eq!(pages[1].dims(), vec![0]);
    let h = &first_pages_shortcut(&fc).h[0];
    let d = fc.block(0, 0);
    assert_eq!(&(&d * h) * &d, d);
}

#[test]
fn json_roundtrip() {
    let json = r#"{"dims":[1,1,1],"blocks":{"(2,0)":[["1"]]}}"#;
    let fc: FilteredComplex<Q> = parse_complex(json).unwrap();
    let back = serde_json::to_string(&ComplexFile::from_complex(&fc)).unwrap();
    let again: FilteredComplex<Q> = parse_complex(&back).unwrap();
    assert_eq!(again.differential(), fc.differential());
    assert_eq!(compute_pages(&again).unwrap().last().unwrap().dims(), vec![0, 1, 0]);
}

fn random_dims<R: Rng>(rng: &mut R) -> Vec<usize> {
    let p = rng.gen_range(1..=6);
    let mut dims: Vec<usize> = (0..=p).map(|_| rng.gen_range(0..=6)).collect();
    while dims.iter().sum::<usize>() > 40 {
        let k = rng.gen_range(0..dims.len());
        dims[k] /= 2;
    }
    dims
}

fn full_check<F: Field>(fc: &FilteredComplex<F>, rng: &mut ChaCha8Rng) {
    let pages = compute_pages(fc).unwrap();
    let gr = direct_homology_gr(fc);
    assert_eq!(pages.last().unwrap().dims(), gr.dims);
    assert!(check_page_recursion(&pages));
    for page in &pages {
        assert!(check_filler_independence(fc, page, rng));
    }
    let sc = first_pages_shortcut(fc);
    assert!(shortcut_agrees(&pages, &sc));
    // A different valid h: h + (1 - h d) X.
    let h2: Vec<_> = sc
        .h
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let d = fc.block(i, i);
            let n = d.rows();
            let x = Matrix::from_fn(n, n, |_, _| F::sample(rng));
            h.add(&(&Matrix::identity(n).sub(&(h * &d)) * &x))
        })
        .collect();
    assert!(shortcut_agrees(&pages, &shortcut_with(fc, h2)));
}

#[test]
fn random_rational_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let dims = random_dims(&mut rng);
        let fc: FilteredComplex<Q> = random_complex(&dims, None, &mut rng);
        full_check(&fc, &mut rng);
    }
}

#[test]
fn random_prime_field_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let dims = random_dims(&mut rng);
        let fc: FilteredComplex<F7> = random_complex(&dims, None, &mut rng);
        full_check(&fc, &mut rng);
    }
}

#[test]
fn homological_labels_are_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let dims = random_dims(&mut rng);
        let n: usize = dims.iter().sum();
        let labels: Vec<i64> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let fc: FilteredComplex<F7> = random_complex(&dims, Some(&labels), &mut rng);
        let pages = compute_pages(&fc).unwrap();
        let last = pages.last().unwrap();
        assert_eq!(last.bidegree_dims().into_iter().filter(|e| e.1 > 0).collect::<BTreeMap<_, _>>(), direct_homology_gr(&fc).bidegree_dims);
        for page in &pages {
            assert!(check_filler_independence(&fc, page, &mut rng));
            // D maps label h to label h + 1.
            for (i, s) in page.spaces.iter().enumerate() {
                let t = i + page.p;
                if t >= page.spaces.len() {
                    continue;
                }
                let d = &page.differentials[i];
                for c in 0..d.cols() {
                    for r in 0..d.rows() {
                        if !d[(r, c)].is_zero() {
                            assert_eq!(page.spaces[t].labels[r], s.labels[c].map(|h| h + 1));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn labels_must_be_raised_by_d() {
    let mut blocks = BTreeMap::new();
    blocks.insert((1, 0), Matrix::from_rows(vec![vec![Q::from_i64(1)]], 1));
    let err = FilteredComplex::from_blocks(vec![1, 1], &blocks, Some(vec![0, 0])).unwrap_err();
    assert!(matches!(err, ComplexError::LabelDegree { .. }));
    assert!(FilteredComplex::from_blocks(vec![1, 1], &blocks, Some(vec![0, 1])).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn main_fact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = random_dims(&mut rng);
        let fc: FilteredComplex<F7> = random_complex(&dims, None, &mut rng);
        let pages = compute_pages(&fc).unwrap();
        prop_assert_eq!(pages.last().unwrap().dims(), direct_homology_gr(&fc).dims);
    }
}
