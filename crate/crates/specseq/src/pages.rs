use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::complex::FilteredComplex;
use crate::field::Field;
use crate::matrix::{joint_rank, Matrix};

#[derive(Debug, Error, PartialEq)]
pub enum SpecSeqError {
    #[error("page {p}, grading {i}: B is not contained in Z")]
    BoundariesNotCycles { p: usize, i: usize },
    #[error("page {p}: D_({target},{i}) leaves the cycles of the target")]
    TargetNotCycle { p: usize, i: usize, target: usize },
    #[error("page {p}: D∘D ≠ 0 at grading {i}")]
    DSquared { p: usize, i: usize },
    #[error("page {p}, grading {i}: homology has dim {homology}, next page has dim {next}")]
    Recursion { p: usize, i: usize, homology: usize, next: usize },
}

/// The subquotient `•_{ip} = Z_{ip} / B_{ip}` of `V_i`.
#[derive(Clone, Debug)]
pub struct PageSpace<F> {
    /// Basis of `Z_{ip}` (columns, in `V_i` coordinates).
    pub z: Matrix<F>,
    /// Basis of `B_{ip}`.
    pub b: Matrix<F>,
    /// Complement of `B_{ip}` in `Z_{ip}`; its columns represent a basis of `•_{ip}`.
    pub c: Matrix<F>,
    /// For each column of `c`, a vector `(x, ∗)` on `V_i ⊕ … ⊕ V_{i+p-1}` in the kernel of `d⁺_{ip}`.
    pub fillers: Vec<Vec<F>>,
    /// Homological label of each column of `c`.
    pub labels: Vec<Option<i64>>,
}

impl<F: Field> PageSpace<F> {
    pub fn dim(&self) -> usize {
        self.c.cols()
    }

    /// Coordinates of `v ∈ Z_{ip}` in the basis `c`, discarding the boundary part.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        let bc = self.b.hstack(&self.c);
        let x = bc.solve(v)?;
        Some(x[self.b.cols()..].to_vec())
    }
}

#[derive(Clone, Debug)]
pub struct Page<F> {
    pub p: usize,
    pub spaces: Vec<PageSpace<F>>,
    /// `differentials[i]` is `D_{i+p,i}` in the bases `c`; it has zero rows when `i + p > P`.
    pub differentials: Vec<Matrix<F>>,
}

impl<F: Field> Page<F> {
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(PageSpace::dim).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.differentials.iter().map(Matrix::rank).collect()
    }

    /// Dimensions per (filtration index, homological label).
    pub fn bidegree_dims(&self) -> BTreeMap<(usize, i64), usize> {
        let mut out = BTreeMap::new();
        for (i, s) in self.spaces.iter().enumerate() {
            for l in &s.labels {
                *out.entry((i, l.unwrap_or(0))).or_insert(0) += 1;
            }
        }
        out
    }
}

fn empty<F: Field>(rows: usize) -> Matrix<F> {
    Matrix::zeros(rows, 0)
}

fn label_shift(h: Option<i64>) -> Option<i64> {
    h.map(|h| h - 1)
}

impl<F: Field> FilteredComplex<F> {
    fn filler_end(&self, i: usize, p: usize) -> usize {
        (i + p.max(1) - 1).min(self.top())
    }

    /// `Z_{ip}` restricted to one label class: basis columns and full kernel vectors.
    fn cycles(&self, i: usize, p: usize, h: Option<i64>) -> (Matrix<F>, Vec<Vec<F>>) {
        let di = self.dims()[i];
        if p == 0 {
            let cols = self.with_label(self.range(i), h);
            let z = Matrix::identity(di).select_columns(&cols);
            let fillers = z.columns();
            return (z, fillers);
        }
        let hi = self.filler_end(i, p);
        let span = self.span(i, hi);
        let cols = self.with_label(span.clone(), h);
        let m = self.differential().submatrix(span.clone(), span.clone()).select_columns(&cols);
        let k = m.kernel();
        let len = span.len();
        let full = Matrix::from_fn(len, k.cols(), |r, c| {
            cols.iter().position(|&x| x == r).map(|pos| k[(pos, c)].clone()).unwrap_or_else(F::zero)
        });
        let proj = full.submatrix(0..di, 0..full.cols());
        let (_, piv) = proj.rref();
        (proj.select_columns(&piv), full.select_columns(&piv).columns())
    }

    /// `B_{ip}` restricted to one label class.
    fn boundaries(&self, i: usize, p: usize, h: Option<i64>) -> Matrix<F> {
        let di = self.dims()[i];
        if p == 0 {
            return empty(di);
        }
        let lo = (i + 1).saturating_sub(p);
        let span = self.span(lo, i);
        let cols = self.with_label(span.clone(), label_shift(h));
        let m = self.differential().submatrix(span.clone(), span.clone()).select_columns(&cols);
        let top = span.len() - di;
        let bottom = m.submatrix(top..span.len(), 0..m.cols());
        if top == 0 {
            return bottom.column_basis();
        }
        let y = m.submatrix(0..top, 0..m.cols()).kernel();
        (&bottom * &y).column_basis()
    }

    fn page_space(&self, i: usize, p: usize) -> Result<PageSpace<F>, SpecSeqError> {
        let di = self.dims()[i];
        let (mut z, mut b, mut c) = (empty(di), empty(di), empty(di));
        let mut fillers = Vec::new();
        let mut labels = Vec::new();
        for h in self.label_classes() {
            let (zh, fh) = self.cycles(i, p, h);
            let bh = self.boundaries(i, p, h);
            if joint_rank(&zh, &bh) != zh.cols() {
                return Err(SpecSeqError::BoundariesNotCycles { p, i });
            }
            let (_, piv) = bh.hstack(&zh).rref();
            let picked: Vec<usize> = piv.iter().filter(|&&k| k >= bh.cols()).map(|&k| k - bh.cols()).collect();
            c = c.hstack(&zh.select_columns(&picked));
            for &k in &picked {
                fillers.push(fh[k].clone());
                labels.push(h);
            }
            z = z.hstack(&zh);
            b = b.hstack(&bh);
        }
        Ok(PageSpace { z, b, c, fillers, labels })
    }

    /// `D_{i+p,i}` evaluated on a filler vector `(x, ∗)`.
    fn d_on_filler(&self, i: usize, p: usize, filler: &[F]) -> Vec<F> {
        let t = i + p;
        let hi = if p == 0 { i } else { t - 1 };
        self.differential().submatrix(self.range(t), self.span(i, hi)).apply(&filler[..self.span(i, hi).len()])
    }
}

/// All pages `p = 0 … P+1`, with the page recursion cross-checked on dimensions.
pub fn compute_pages<F: Field>(fc: &FilteredComplex<F>) -> Result<Vec<Page<F>>, SpecSeqError> {
    let top = fc.top();
    let mut pages: Vec<Page<F>> = Vec::new();
    for p in 0..=top + 1 {
        let spaces = (0..=top).map(|i| fc.page_space(i, p)).collect::<Result<Vec<_>, _>>()?;
        let mut differentials = Vec::new();
        for i in 0..=top {
            let src = &spaces[i];
            let t = i + p;
            if t > top {
                differentials.push(Matrix::zeros(0, src.dim()));
                continue;
            }
            let tgt = &spaces[t];
            let mut cols = Vec::new();
            for f in &src.fillers {
                let y = fc.d_on_filler(i, p, f);
                let coords = tgt.coordinates(&y).ok_or(SpecSeqError::TargetNotCycle { p, i, target: t })?;
                cols.push(coords);
            }
            differentials.push(Matrix::from_columns(&cols, tgt.dim()));
        }
        let page = Page { p, spaces, differentials };
        for i in 0..=top {
            let t = i + p;
            if t <= top {
                let prod = &page.differentials[t] * &page.differentials[i];
                if !prod.is_zero() {
                    return Err(SpecSeqError::DSquared { p, i });
                }
            }
        }
        pages.push(page);
    }
    for p in 0..=top {
        let (cur, next) = (&pages[p], &pages[p + 1]);
        for i in 0..=top {
            let out = cur.differentials[i].rank();
            let inc = if i >= p { cur.differentials[i - p].rank() } else { 0 };
            let homology = cur.spaces[i].dim() - out - inc;
            if homology != next.spaces[i].dim() {
                return Err(SpecSeqError::Recursion { p, i, homology, next: next.spaces[i].dim() });
            }
        }
    }
    Ok(pages)
}

/// Subspace-level page recursion: the cycles and boundaries of page `p+1` are the
/// preimages of `ker D` and `im D` on page `p`.
pub fn check_page_recursion<F: Field>(pages: &[Page<F>]) -> bool {
    for w in pages.windows(2) {
        let (cur, next) = (&w[0], &w[1]);
        let p = cur.p;
        for (i, s) in cur.spaces.iter().enumerate() {
            let ker = cur.differentials[i].kernel();
            let lifted_ker = &s.c * &ker;
            let lifted_im = if i >= p {
                let d_in = &cur.differentials[i - p];
                &s.c * d_in
            } else {
                empty(s.c.rows())
            };
            let n = &next.spaces[i];
            let want_z = s.b.hstack(&lifted_ker);
            let have_z = s.b.hstack(&n.z);
            if want_z.rank() != have_z.rank() || joint_rank(&want_z, &have_z) != want_z.rank() {
                return false;
            }
            let want_b = s.b.hstack(&lifted_im);
            if want_b.rank() != n.b.rank() || joint_rank(&want_b, &n.b) != n.b.rank() {
                return false;
            }
        }
    }
    true
}

/// Re-evaluates every `D_{i+p,i}` with randomly perturbed fillers and checks the
/// result agrees modulo the target boundaries.
pub fn check_filler_independence<F: Field, R: Rng + ?Sized>(
    fc: &FilteredComplex<F>,
    page: &Page<F>,
    rng: &mut R,
) -> bool {
    let p = page.p;
    if p < 2 {
        return true;
    }
    let top = fc.top();
    for (i, s) in page.spaces.iter().enumerate() {
        let t = i + p;
        if t > top {
            continue;
        }
        let span = fc.span(i, t - 1);
        let inner = fc.span(i + 1, t - 1);
        let di = fc.dims()[i];
        for (k, f) in s.fillers.iter().enumerate() {
            let cols = fc.with_label(inner.clone(), s.labels[k]);
            let m = fc.differential().submatrix(span.clone(), inner.clone()).select_columns(&cols);
            let ker = m.kernel();
            let mut g = f.clone();
            for c in 0..ker.cols() {
                let r = F::sample(rng);
                for (pos, &row) in cols.iter().enumerate() {
                    g[di + row] = g[di + row].clone() + r.clone() * ker[(pos, c)].clone();
                }
            }
            let y0 = fc.d_on_filler(i, p, f);
            let y1 = fc.d_on_filler(i, p, &g);
            let diff: Vec<F> = y1.into_iter().zip(y0).map(|(a, b)| a - b).collect();
            match page.spaces[t].coordinates(&diff) {
                Some(c) if c.iter().all(F::is_zero) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Dimensions of `Gr H(d)`, graded by the deepest filtration level of a representative.
#[derive(Clone, Debug, PartialEq)]
pub struct GrHomology {
    pub dims: Vec<usize>,
    pub bidegree_dims: BTreeMap<(usize, i64), usize>,
}

pub fn direct_homology_gr<F: Field>(fc: &FilteredComplex<F>) -> GrHomology {
    let top = fc.top();
    let n = fc.total_dim();
    let d = fc.differential();
    let mut dims = vec![0; top + 1];
    let mut bidegree_dims = BTreeMap::new();
    for h in fc.label_classes() {
        let im_cols = fc.with_label(0..n, label_shift(h));
        let im = d.select_columns(&im_cols).column_basis();
        let rim = im.cols();
        let mut above = 0;
        for i in (0..=top).rev() {
            let span = fc.span(i, top);
            let cols: Vec<usize> = fc.with_label(span.clone(), h).into_iter().map(|c| c + span.start).collect();
            let k = d.select_columns(&cols).kernel();
            let embedded = Matrix::from_fn(n, k.cols(), |r, c| {
                cols.iter().position(|&x| x == r).map(|pos| k[(pos, c)].clone()).unwrap_or_else(F::zero)
            });
            let h_ge = joint_rank(&im, &embedded) - rim;
            let gr = h_ge - above;
            dims[i] += gr;
            if gr > 0 {
                *bidegree_dims.entry((i, h.unwrap_or(0))).or_insert(0) += gr;
            }
            above = h_ge;
        }
    }
    GrHomology { dims, bidegree_dims }
}

/// Induced maps on the first three pages computed from a choice of `h_i` with
/// `d_ii h_i d_ii = d_ii`.
#[derive(Clone, Debug)]
pub struct Shortcut<F> {
    pub h: Vec<Matrix<F>>,
    /// `maps[p][i]: V_i → V_{i+p}` for `p = 0, 1, 2`; zero rows past the top.
    pub maps: [Vec<Matrix<F>>; 3],
}

pub fn first_pages_shortcut<F: Field>(fc: &FilteredComplex<F>) -> Shortcut<F> {
    let h = (0..=fc.top()).map(|i| fc.block(i, i).pseudo_inverse()).collect();
    shortcut_with(fc, h)
}

/// The shortcut maps for a caller-supplied choice of pseudo-inverses.
pub fn shortcut_with<F: Field>(fc: &FilteredComplex<F>, h: Vec<Matrix<F>>) -> Shortcut<F> {
    let top = fc.top();
    let dims = fc.dims();
    let block = |i: usize, j: usize| if i <= top { fc.block(i, j) } else { Matrix::zeros(0, dims[j]) };
    let mut maps: [Vec<Matrix<F>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for i in 0..=top {
        maps[0].push(fc.block(i, i));
        maps[1].push(block(i + 1, i));
        maps[2].push(if i + 2 <= top {
            let corr = &(&fc.block(i + 2, i + 1) * &h[i + 1]) * &fc.block(i + 1, i);
            fc.block(i + 2, i).sub(&corr)
        } else {
            Matrix::zeros(0, dims[i])
        });
    }
    Shortcut { h, maps }
}

/// True iff the shortcut maps induce the page differentials for `p ≤ 2`.
pub fn shortcut_agrees<F: Field>(pages: &[Page<F>], sc: &Shortcut<F>) -> bool {
    for p in 0..3.min(pages.len()) {
        let page = &pages[p];
        for (i, s) in page.spaces.iter().enumerate() {
            let t = i + p;
            if t >= page.spaces.len() {
                continue;
            }
            for k in 0..s.dim() {
                let x = s.c.column(k);
                let y = sc.maps[p][i].apply(&x);
                match page.spaces[t].coordinates(&y) {
                    Some(c) if c == page.differentials[i].column(k) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}
