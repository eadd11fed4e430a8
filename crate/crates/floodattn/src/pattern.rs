//! Sparsity pattern extraction from an attention map.
//!
//! Pipeline: a diagonal-filter convolution smears attention mass along
//! diagonals, average pooling reduces the map to one cell per block, a
//! nearest-rank quantile picks the significance threshold, a flood fill
//! seeded from the first pool row and column traces the connected
//! high-mass structure, the block diagonal is forced on, and the marked
//! blocks are upsampled back to a full-resolution 0/1 mask in CSR form.

use crate::error::{Error, Result};
use crate::sparse::{mask_to_csr, CsrMatrix};
use crate::tensor::DenseMatrix;

/// Pattern extraction knobs.
#[derive(Debug, Clone)]
pub struct PatternConfig {
    /// Diagonal filter width; odd, at most the sequence length.
    pub filter_size: usize,
    /// Pooling block edge; must divide the sequence length.
    pub block_size: usize,
    /// Threshold percentile in the open interval (0, 100).
    pub quantile_alpha: f64,
}

impl PatternConfig {
    pub fn validate(&self, seq_len: usize) -> Result<()> {
        if self.filter_size == 0 || self.filter_size.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "filter size {} must be odd and positive",
                self.filter_size
            )));
        }
        if self.filter_size > seq_len {
            return Err(Error::Parameter(format!(
                "filter size {} exceeds sequence length {}",
                self.filter_size, seq_len
            )));
        }
        if self.block_size == 0 || !seq_len.is_multiple_of(self.block_size) {
            return Err(Error::Parameter(format!(
                "block size {} must divide sequence length {}",
                self.block_size, seq_len
            )));
        }
        if !(self.quantile_alpha > 0.0 && self.quantile_alpha < 100.0) {
            return Err(Error::Parameter(format!(
                "quantile alpha {} outside (0, 100)",
                self.quantile_alpha
            )));
        }
        Ok(())
    }
}

/// Square 0/1 mask over pool blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMask {
    side: usize,
    bits: Vec<u8>,
}

impl BlockMask {
    pub fn zeros(side: usize) -> Self {
        BlockMask { side, bits: vec![0; side * side] }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.side + c] != 0
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.side + c] = 1;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b != 0).count()
    }

    pub fn marked(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.side {
            for c in 0..self.side {
                if self.get(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.side, self.side);
        for r in 0..self.side {
            for c in 0..self.side {
                if self.get(r, c) {
                    m.set(r, c, 1.0);
                }
            }
        }
        m
    }
}

/// Convolve with an FxF filter that is one on its main diagonal and zero
/// elsewhere: out(i,j) = sum over the centered window of a(i+f, j+f),
/// with zero padding outside the matrix. Centering keeps the window
/// symmetric around each position instead of trailing below it.
pub fn diagonal_conv(a: &DenseMatrix, filter_size: usize) -> Result<DenseMatrix> {
    if a.rows() != a.cols() {
        return Err(Error::Shape(format!(
            "diagonal_conv needs a square input, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if filter_size == 0 || filter_size.is_multiple_of(2) || filter_size > a.rows() {
        return Err(Error::Parameter(format!(
            "filter size {} must be odd and within the {}-row input",
            filter_size,
            a.rows()
        )));
    }
    let n = a.rows();
    let h = (filter_size / 2) as isize;
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0f64;
            for f in -h..=h {
                let (r, c) = (i as isize + f, j as isize + f);
                if r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n {
                    acc += a.at(r as usize, c as usize) as f64;
                }
            }
            out.set(i, j, acc as f32);
        }
    }
    Ok(out)
}

/// Mean over each BxB block; the input edge must be divisible by B.
pub fn avg_pool(x: &DenseMatrix, block: usize) -> Result<DenseMatrix> {
    if x.rows() != x.cols() {
        return Err(Error::Shape(format!(
            "avg_pool needs a square input, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    if block == 0 || !x.rows().is_multiple_of(block) {
        return Err(Error::Parameter(format!(
            "block {} must divide input edge {}",
            block,
            x.rows()
        )));
    }
    let side = x.rows() / block;
    let norm = 1.0 / (block * block) as f64;
    let mut out = DenseMatrix::zeros(side, side);
    for br in 0..side {
        for bc in 0..side {
            let mut acc = 0.0f64;
            for i in 0..block {
                for j in 0..block {
                    acc += x.at(br * block + i, bc * block + j) as f64;
                }
            }
            out.set(br, bc, (acc * norm) as f32);
        }
    }
    Ok(out)
}

/// Nearest-rank percentile: sort ascending and take the value at rank
/// ceil(alpha/100 * n), 1-based. A tiny slack absorbs the float error of
/// alpha/100*n landing a hair above an exact integer rank.
pub fn quantile_threshold(x: &DenseMatrix, alpha: f64) -> Result<f32> {
    if !(alpha > 0.0 && alpha < 100.0) {
        return Err(Error::Parameter(format!("alpha {alpha} outside (0, 100)")));
    }
    let mut vals: Vec<f32> = x.data().to_vec();
    if vals.is_empty() {
        return Err(Error::Shape("quantile of an empty matrix".into()));
    }
    vals.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in quantile input"));
    let n = vals.len();
    let rank = (alpha / 100.0 * n as f64 - 1e-9).ceil() as usize;
    let rank = rank.clamp(1, n);
    Ok(vals[rank - 1])
}

/// Flood fill from (r, c): repeatedly step to whichever of the below,
/// right, and diagonal neighbors carries the maximum of the three, marking
/// visited cells whose value strictly exceeds `t`. Traversal continues
/// through cells at or below the threshold without marking them, and stops
/// at the last row/column. Equivalent to the literal recursive procedure
/// (the per-call visited memo only collapses revisits of unmarked cells,
/// which cannot change the final mask), but runs in O(side^2).
pub fn flood_fill(
    pool: &DenseMatrix,
    r: usize,
    c: usize,
    fl: &mut BlockMask,
    t: f32,
) -> Result<()> {
    if pool.rows() != pool.cols() {
        return Err(Error::Shape(format!(
            "flood_fill needs a square pool, got {}x{}",
            pool.rows(),
            pool.cols()
        )));
    }
    let n = pool.rows();
    if fl.side() != n {
        return Err(Error::Shape(format!(
            "mask side {} vs pool side {}",
            fl.side(),
            n
        )));
    }
    if r >= n || c >= n {
        return Err(Error::Index(format!("seed ({r},{c}) outside {n}x{n} pool")));
    }
    let mut expanded = vec![false; n * n];
    let mut work = vec![(r, c)];
    while let Some((r, c)) = work.pop() {
        if expanded[r * n + c] {
            continue;
        }
        expanded[r * n + c] = true;
        if r + 1 == n || c + 1 == n {
            continue;
        }
        let below = pool.at(r + 1, c);
        let right = pool.at(r, c + 1);
        let diag = pool.at(r + 1, c + 1);
        let m = below.max(right).max(diag);
        for (nr, nc, v) in [(r + 1, c, below), (r, c + 1, right), (r + 1, c + 1, diag)] {
            if v == m {
                if !fl.get(nr, nc) && v > t {
                    fl.set(nr, nc);
                }
                if !expanded[nr * n + nc] {
                    work.push((nr, nc));
                }
            }
        }
    }
    Ok(())
}

/// The seed sweep used by pattern generation: flood fill from every cell
/// of pool row 0, then every cell of pool column 0.
pub fn flood_fill_edges(pool: &DenseMatrix, t: f32) -> Result<BlockMask> {
    let n = pool.rows();
    let mut fl = BlockMask::zeros(n);
    for i in 0..n {
        flood_fill(pool, 0, i, &mut fl, t)?;
    }
    for j in 0..n {
        flood_fill(pool, j, 0, &mut fl, t)?;
    }
    Ok(fl)
}

/// Nearest-neighbor upsample of a block mask to a (side*b)^2 0/1 matrix.
pub fn upsample_nearest(fl: &BlockMask, b: usize) -> DenseMatrix {
    let l = fl.side() * b;
    let mut out = DenseMatrix::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            if fl.get(i / b, j / b) {
                out.set(i, j, 1.0);
            }
        }
    }
    out
}

/// Every intermediate of the extraction pipeline, for inspection and for
/// rendering heatmaps.
pub struct PatternStages {
    pub conv: DenseMatrix,
    pub pool: DenseMatrix,
    pub threshold: f32,
    /// Blocks marked by the flood fill alone.
    pub flood_marks: BlockMask,
    /// Flood marks plus the forced block diagonal.
    pub mask: BlockMask,
    pub pattern: CsrMatrix,
}

/// Run the full extraction pipeline on an attention map.
pub fn generate_pattern_stages(a: &DenseMatrix, cfg: &PatternConfig) -> Result<PatternStages> {
    if a.rows() != a.cols() {
        return Err(Error::Shape(format!(
            "attention map must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    cfg.validate(a.rows())?;
    let conv = diagonal_conv(a, cfg.filter_size)?;
    let pool = avg_pool(&conv, cfg.block_size)?;
    let threshold = quantile_threshold(&pool, cfg.quantile_alpha)?;
    let flood_marks = flood_fill_edges(&pool, threshold)?;
    let mut mask = flood_marks.clone();
    for k in 0..mask.side() {
        mask.set(k, k);
    }
    let pattern = mask_to_csr(&upsample_nearest(&mask, cfg.block_size))?;
    Ok(PatternStages { conv, pool, threshold, flood_marks, mask, pattern })
}

/// The extraction pipeline, returning only the final CSR pattern.
pub fn generate_pattern(a: &DenseMatrix, cfg: &PatternConfig) -> Result<CsrMatrix> {
    Ok(generate_pattern_stages(a, cfg)?.pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn mat(rows: &[Vec<f32>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn identity(n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Literal recursive flood fill, kept only as the reference oracle.
    fn flood_fill_recursive(pool: &DenseMatrix, r: usize, c: usize, fl: &mut BlockMask, t: f32) {
        let n = pool.rows();
        if r + 1 == n || c + 1 == n {
            return;
        }
        let below = pool.at(r + 1, c);
        let right = pool.at(r, c + 1);
        let diag = pool.at(r + 1, c + 1);
        let m = below.max(right).max(diag);
        for (nr, nc, v) in [(r + 1, c, below), (r, c + 1, right), (r + 1, c + 1, diag)] {
            if v == m && !fl.get(nr, nc) {
                if v > t {
                    fl.set(nr, nc);
                }
                flood_fill_recursive(pool, nr, nc, fl, t);
            }
        }
    }

    fn edges_recursive(pool: &DenseMatrix, t: f32) -> BlockMask {
        let n = pool.rows();
        let mut fl = BlockMask::zeros(n);
        for i in 0..n {
            flood_fill_recursive(pool, 0, i, &mut fl, t);
        }
        for j in 0..n {
            flood_fill_recursive(pool, j, 0, &mut fl, t);
        }
        fl
    }

    #[test]
    fn conv_identity_with_width_three() {
        let out = diagonal_conv(&identity(4), 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j {
                    if i == 0 || i == 3 { 2.0 } else { 3.0 }
                } else {
                    0.0
                };
                assert_eq!(out.at(i, j), expect, "at ({i},{j})");
            }
        }
    }

    #[test]
    fn conv_width_one_is_identity() {
        let mut rng = Rng::new(8);
        let mut a = DenseMatrix::zeros(5, 5);
        a.data_mut().iter_mut().for_each(|v| *v = rng.normal());
        let out = diagonal_conv(&a, 1).unwrap();
        assert_eq!(out.data(), a.data());
    }

    #[test]
    fn conv_rejects_bad_filter() {
        let a = identity(4);
        assert!(diagonal_conv(&a, 2).is_err());
        assert!(diagonal_conv(&a, 0).is_err());
        assert!(diagonal_conv(&a, 5).is_err());
        assert!(diagonal_conv(&DenseMatrix::zeros(3, 4), 1).is_err());
    }

    #[test]
    fn avg_pool_block_constants() {
        let mut x = DenseMatrix::zeros(4, 4);
        for (br, bc, v) in [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0f32)] {
            for i in 0..2 {
                for j in 0..2 {
                    x.set(br * 2 + i, bc * 2 + j, v);
                }
            }
        }
        let p = avg_pool(&x, 2).unwrap();
        assert_eq!(p.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn avg_pool_rejects_nondividing_block() {
        assert!(avg_pool(&DenseMatrix::zeros(4, 4), 3).is_err());
        assert!(avg_pool(&DenseMatrix::zeros(4, 4), 0).is_err());
    }

    #[test]
    fn quantile_nearest_rank() {
        let hundred =
            DenseMatrix::from_vec(10, 10, (1..=100).map(|v| v as f32).collect()).unwrap();
        assert_eq!(quantile_threshold(&hundred, 96.0).unwrap(), 96.0);
        let four = DenseMatrix::from_vec(2, 2, vec![4.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(quantile_threshold(&four, 50.0).unwrap(), 2.0);
        assert_eq!(quantile_threshold(&four, 1.0).unwrap(), 1.0);
        assert_eq!(quantile_threshold(&four, 99.9).unwrap(), 4.0);
    }

    #[test]
    fn quantile_rejects_bad_alpha() {
        let x = DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap();
        assert!(quantile_threshold(&x, 0.0).is_err());
        assert!(quantile_threshold(&x, 100.0).is_err());
        assert!(quantile_threshold(&DenseMatrix::zeros(0, 0), 50.0).is_err());
    }

    #[test]
    fn flood_fill_follows_dominant_diagonal() {
        let pool = mat(&[
            vec![9.0, 1.0, 1.0],
            vec![1.0, 9.0, 1.0],
            vec![1.0, 1.0, 9.0],
        ]);
        let mut fl = BlockMask::zeros(3);
        flood_fill(&pool, 0, 0, &mut fl, 5.0).unwrap();
        assert_eq!(fl.marked(), vec![(1, 1), (2, 2)]);
        // the full edge sweep adds nothing further; the seed cell itself
        // is only ever completed by the forced diagonal downstream
        let swept = flood_fill_edges(&pool, 5.0).unwrap();
        assert_eq!(swept.marked(), vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn flood_fill_tied_maxima_fire_all_matching_branches() {
        let pool = mat(&[
            vec![2.0, 9.0, 1.0],
            vec![1.0, 9.0, 1.0],
            vec![1.0, 9.0, 2.0],
        ]);
        let swept = flood_fill_edges(&pool, 5.0).unwrap();
        assert_eq!(swept.marked(), vec![(0, 1), (1, 1), (2, 1)]);
    }

    #[test]
    fn flood_fill_uniform_at_threshold_marks_nothing() {
        let pool = DenseMatrix::from_vec(3, 3, vec![7.0; 9]).unwrap();
        let swept = flood_fill_edges(&pool, 7.0).unwrap();
        assert_eq!(swept.count(), 0);
    }

    #[test]
    fn flood_fill_rejects_out_of_range_seed() {
        let pool = DenseMatrix::zeros(3, 3);
        let mut fl = BlockMask::zeros(3);
        assert!(flood_fill(&pool, 3, 0, &mut fl, 0.0).is_err());
        let mut small = BlockMask::zeros(2);
        assert!(flood_fill(&pool, 0, 0, &mut small, 0.0).is_err());
    }

    #[test]
    fn flood_fill_matches_recursive_oracle_exhaustively_3x3() {
        let vals = [1.0f32, 5.0, 9.0];
        let mut grid = vec![0.0f32; 9];
        for code in 0..3usize.pow(9) {
            let mut c = code;
            for cell in grid.iter_mut() {
                *cell = vals[c % 3];
                c /= 3;
            }
            let pool = DenseMatrix::from_vec(3, 3, grid.clone()).unwrap();
            for t in [0.0f32, 1.0, 5.0, 9.0] {
                let fast = flood_fill_edges(&pool, t).unwrap();
                let slow = edges_recursive(&pool, t);
                assert_eq!(fast, slow, "grid {code} t {t}");
            }
        }
    }

    #[test]
    fn flood_fill_matches_recursive_oracle_random_larger_grids() {
        let vals = [1.0f32, 5.0, 9.0];
        let mut rng = Rng::new(99);
        for n in [4usize, 5, 6] {
            for _ in 0..2000 {
                let data: Vec<f32> = (0..n * n).map(|_| vals[rng.below(3)]).collect();
                let pool = DenseMatrix::from_vec(n, n, data).unwrap();
                for t in [1.0f32, 5.0] {
                    let fast = flood_fill_edges(&pool, t).unwrap();
                    let slow = edges_recursive(&pool, t);
                    assert_eq!(fast, slow);
                }
            }
        }
    }

    #[test]
    fn upsample_expands_blocks() {
        let mut fl = BlockMask::zeros(2);
        fl.set(0, 1);
        let up = upsample_nearest(&fl, 2);
        assert_eq!(up.rows(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i < 2 && j >= 2 { 1.0 } else { 0.0 };
                assert_eq!(up.at(i, j), expect);
            }
        }
    }

    #[test]
    fn uniform_attention_yields_exactly_the_block_diagonal() {
        let l = 128;
        let b = 32;
        let a = DenseMatrix::from_vec(l, l, vec![1.0 / l as f32; l * l]).unwrap();
        let cfg = PatternConfig { filter_size: 31, block_size: b, quantile_alpha: 96.0 };
        let stages = generate_pattern_stages(&a, &cfg).unwrap();
        assert_eq!(stages.flood_marks.count(), 0);
        let side = l / b;
        assert_eq!(stages.mask.count(), side);
        for k in 0..side {
            assert!(stages.mask.get(k, k));
        }
        let density = stages.pattern.density();
        assert!((density - b as f64 / l as f64).abs() < 1e-12);
    }

    #[test]
    fn dominant_column_block_yields_stripe_plus_diagonal() {
        // Block-constant map over a 3x3 block grid with a strong middle
        // column; filter width 1 keeps the pool exactly block-valued, so
        // the fill traces the hand-traceable stripe.
        let l = 96;
        let b = 32;
        let blocks = [
            [2.0f32, 9.0, 1.0],
            [1.0, 9.0, 1.0],
            [1.0, 9.0, 2.0],
        ];
        let mut a = DenseMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                a.set(i, j, blocks[i / b][j / b] / l as f32);
            }
        }
        let cfg = PatternConfig { filter_size: 1, block_size: b, quantile_alpha: 50.0 };
        let stages = generate_pattern_stages(&a, &cfg).unwrap();
        assert_eq!(stages.flood_marks.marked(), vec![(0, 1), (1, 1), (2, 1)]);
        let expect: Vec<(usize, usize)> =
            vec![(0, 0), (0, 1), (1, 1), (2, 1), (2, 2)];
        assert_eq!(stages.mask.marked(), expect);
        stages.pattern.validate().unwrap();
    }

    #[test]
    fn banded_attention_marks_the_diagonal_blocks_by_itself() {
        // Strict band of half a block's width: all mass pools on the
        // diagonal blocks, which the fill should find without the force.
        let l = 128;
        let b = 32;
        let mut a = DenseMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                if (i as isize - j as isize).abs() < 16 {
                    a.set(i, j, 1.0);
                }
            }
        }
        let cfg = PatternConfig { filter_size: 31, block_size: b, quantile_alpha: 50.0 };
        let stages = generate_pattern_stages(&a, &cfg).unwrap();
        for k in 1..l / b {
            assert!(stages.flood_marks.get(k, k), "diagonal block {k} unmarked");
        }
        for (r, c) in stages.mask.marked() {
            assert_eq!(r, c, "off-diagonal block ({r},{c}) marked");
        }
    }

    #[test]
    fn pattern_diagonal_always_present_and_deterministic() {
        let mut rng = Rng::new(123);
        let l = 64;
        let mut a = DenseMatrix::zeros(l, l);
        a.data_mut().iter_mut().for_each(|v| *v = rng.uniform());
        let cfg = PatternConfig { filter_size: 7, block_size: 16, quantile_alpha: 75.0 };
        let p1 = generate_pattern(&a, &cfg).unwrap();
        let p2 = generate_pattern(&a, &cfg).unwrap();
        assert_eq!(p1, p2);
        let dense = p1.to_dense();
        for i in 0..l {
            assert_eq!(dense.at(i, i), 1.0, "diagonal entry {i} missing");
        }
    }

    #[test]
    fn pattern_config_validation() {
        let ok = PatternConfig { filter_size: 3, block_size: 4, quantile_alpha: 90.0 };
        assert!(ok.validate(16).is_ok());
        let even = PatternConfig { filter_size: 4, ..ok.clone() };
        assert!(even.validate(16).is_err());
        let nondiv = PatternConfig { block_size: 5, ..ok.clone() };
        assert!(nondiv.validate(16).is_err());
        let alpha = PatternConfig { quantile_alpha: 100.0, ..ok.clone() };
        assert!(alpha.validate(16).is_err());
        let wide = PatternConfig { filter_size: 31, ..ok };
        assert!(wide.validate(16).is_err());
    }

    proptest! {
        /// Raising the threshold can only remove flood marks.
        #[test]
        fn flood_marks_shrink_as_threshold_rises(
            seed in 0u64..300,
            n in 3usize..7,
        ) {
            let vals = [1.0f32, 2.0, 5.0, 9.0];
            let mut rng = Rng::new(seed);
            let data: Vec<f32> = (0..n * n).map(|_| vals[rng.below(4)]).collect();
            let pool = DenseMatrix::from_vec(n, n, data).unwrap();
            let lo = flood_fill_edges(&pool, 2.0).unwrap();
            let hi = flood_fill_edges(&pool, 5.0).unwrap();
            for (r, c) in hi.marked() {
                prop_assert!(lo.get(r, c));
            }
        }

        /// The quantile is nondecreasing in alpha.
        #[test]
        fn quantile_monotone_in_alpha(
            seed in 0u64..300,
            n in 1usize..30,
            a1 in 1u32..99,
            a2 in 1u32..99,
        ) {
            let mut rng = Rng::new(seed);
            let data: Vec<f32> = (0..n).map(|_| rng.normal()).collect();
            let x = DenseMatrix::from_vec(1, n, data).unwrap();
            let (lo, hi) = (a1.min(a2) as f64, a1.max(a2) as f64);
            prop_assert!(
                quantile_threshold(&x, lo).unwrap() <= quantile_threshold(&x, hi).unwrap()
            );
        }

        /// Raising alpha never adds marked blocks beyond the forced diagonal.
        #[test]
        fn pattern_marks_shrink_as_alpha_rises(
            seed in 0u64..100,
        ) {
            let mut rng = Rng::new(seed);
            let l = 32;
            let mut a = DenseMatrix::zeros(l, l);
            a.data_mut().iter_mut().for_each(|v| *v = rng.uniform());
            let mk = |alpha: f64| {
                let cfg = PatternConfig {
                    filter_size: 5,
                    block_size: 8,
                    quantile_alpha: alpha,
                };
                generate_pattern_stages(&a, &cfg).unwrap()
            };
            let lo = mk(40.0);
            let hi = mk(85.0);
            for (r, c) in hi.mask.marked() {
                prop_assert!(r == c || lo.mask.get(r, c));
            }
        }
    }
}
