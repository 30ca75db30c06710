use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::FilteredComplex;
use crate::field::Field;
use crate::matrix::Matrix;

/// A random filtered complex with `d² = 0` by construction.
///
/// Every filtered complex over a field is filtered-isomorphic to a sum of
/// elementary pieces `e_j ↦ e_i` (with `i` at least as deep as `j`); we sample
/// such a sum and conjugate it by a random filtration-preserving change of basis.
/// With `labels`, pieces raise the label by one and the change of basis preserves it.
pub fn random_complex<F: Field, R: Rng + ?Sized>(
    dims: &[usize],
    labels: Option<&[i64]>,
    rng: &mut R,
) -> FilteredComplex<F> {
    let n: usize = dims.iter().sum();
    let level: Vec<usize> = dims.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat(i).take(d)).collect();
    let lab = |k: usize| labels.map(|l| l[k]);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut used = vec![false; n];
    let mut nil = Matrix::<F>::zeros(n, n);
    for &j in &order {
        if used[j] || rng.gen_bool(0.4) {
            continue;
        }
        let targets: Vec<usize> = (0..n)
            .filter(|&i| !used[i] && i != j && level[i] >= level[j] && lab(i).zip(lab(j)).map_or(true, |(a, b)| a == b + 1))
            .collect();
        if let Some(&i) = targets.choose(rng) {
            used[i] = true;
            used[j] = true;
            nil[(i, j)] = F::one();
        }
    }

    // Unit lower triangular in the filtration order: filtration preserving and invertible.
    let mut t = Matrix::<F>::identity(n);
    for r in 0..n {
        for c in 0..r {
            if level[r] >= level[c] && lab(r) == lab(c) && rng.gen_bool(0.5) {
                t[(r, c)] = F::sample(rng);
            }
        }
    }
    let tinv = t.inverse().expect("unit triangular");
    let d = &(&t * &nil) * &tinv;
    FilteredComplex::from_total(dims.to_vec(), d, labels.map(<[i64]>::to_vec)).expect("valid by construction")
}
