//! Compressed sparse row matrices and the sparse attention kernels.
//!
//! The attention core in the sparse phase is the pipeline
//! `sddmm -> sparse_softmax_forward -> spmm`: score only the stored
//! positions, normalize them as if the missing logits were zeros, then
//! weight the value rows. All three kernels preserve the input sparsity
//! structure and have exact backward counterparts.

use crate::bytes::{put_f32, put_u32, put_u64, ByteReader};
use crate::error::{Error, Result};
use crate::opcount;
use crate::tensor::DenseMatrix;
use std::fmt::Write as _;
use std::path::Path;

const CSR_MAGIC: &[u8; 4] = b"CSRM";
const CSR_VERSION: u32 = 1;

/// CSR matrix: `row_ptr[i]..row_ptr[i+1]` indexes the stored entries of
/// row i inside `col_idx` / `values`, with column indices strictly
/// increasing inside each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f32>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f32>,
    ) -> Result<Self> {
        let m = CsrMatrix { rows, cols, row_ptr, col_idx, values };
        m.validate()?;
        Ok(m)
    }

    /// Check every structural invariant; cheap enough to run on every load.
    pub fn validate(&self) -> Result<()> {
        if self.row_ptr.len() != self.rows + 1 {
            return Err(Error::Structure(format!(
                "row_ptr has {} entries for {} rows",
                self.row_ptr.len(),
                self.rows
            )));
        }
        if self.row_ptr[0] != 0 {
            return Err(Error::Structure("row_ptr must start at 0".into()));
        }
        if *self.row_ptr.last().unwrap() != self.col_idx.len() {
            return Err(Error::Structure(format!(
                "row_ptr ends at {} but {} columns are stored",
                self.row_ptr.last().unwrap(),
                self.col_idx.len()
            )));
        }
        if self.col_idx.len() != self.values.len() {
            return Err(Error::Structure(format!(
                "{} column indices vs {} values",
                self.col_idx.len(),
                self.values.len()
            )));
        }
        for i in 0..self.rows {
            if self.row_ptr[i] > self.row_ptr[i + 1] {
                return Err(Error::Structure(format!("row_ptr decreases at row {i}")));
            }
            let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
            for (k, &c) in row.iter().enumerate() {
                if c >= self.cols {
                    return Err(Error::Structure(format!(
                        "column {} out of range in row {}",
                        c, i
                    )));
                }
                if k > 0 && row[k - 1] >= c {
                    return Err(Error::Structure(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    /// Index range of row i's stored entries.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    /// Stored fraction nnz / (rows * cols).
    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    pub fn same_structure(&self, other: &CsrMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    /// Same structure, all stored values zeroed.
    pub fn zeroed_like(&self) -> CsrMatrix {
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: vec![0.0; self.values.len()],
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for k in self.row_range(i) {
                out.set(i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    /// Flat little-endian encoding: magic, version, dimensions, nnz,
    /// row pointers, column indices, values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(32 + 8 * (self.row_ptr.len() + self.col_idx.len()));
        buf.extend_from_slice(CSR_MAGIC);
        put_u32(&mut buf, CSR_VERSION);
        put_u64(&mut buf, self.rows as u64);
        put_u64(&mut buf, self.cols as u64);
        put_u64(&mut buf, self.nnz() as u64);
        for &p in &self.row_ptr {
            put_u64(&mut buf, p as u64);
        }
        for &c in &self.col_idx {
            put_u64(&mut buf, c as u64);
        }
        for &v in &self.values {
            put_f32(&mut buf, v);
        }
        buf
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        if r.bytes(4)? != CSR_MAGIC {
            return Err(Error::Parse("not a CSR matrix file (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != CSR_VERSION {
            return Err(Error::Parse(format!("unsupported CSR version {version}")));
        }
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        let nnz = r.u64()? as usize;
        let mut row_ptr = Vec::with_capacity(rows + 1);
        for _ in 0..=rows {
            row_ptr.push(r.u64()? as usize);
        }
        let mut col_idx = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            col_idx.push(r.u64()? as usize);
        }
        let mut values = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            values.push(r.f32()?);
        }
        r.finish()?;
        CsrMatrix::new(rows, cols, row_ptr, col_idx, values)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Stable FNV-1a hash of the serialized matrix, for cheap
    /// change-detection across epochs and runs.
    pub fn digest64(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        for &b in &self.to_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    /// Debug dump: one `row,col,value` line per stored entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for i in 0..self.rows {
            for k in self.row_range(i) {
                let _ = writeln!(out, "{},{},{}", i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }
}

/// Convert a dense 0/1 mask into CSR structure with unit values.
pub fn mask_to_csr(mask: &DenseMatrix) -> Result<CsrMatrix> {
    let mut row_ptr = Vec::with_capacity(mask.rows() + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for i in 0..mask.rows() {
        for j in 0..mask.cols() {
            let v = mask.at(i, j);
            if v == 1.0 {
                col_idx.push(j);
            } else if v != 0.0 {
                return Err(Error::Data(format!(
                    "mask entry ({i},{j}) = {v} is neither 0 nor 1"
                )));
            }
        }
        row_ptr.push(col_idx.len());
    }
    let values = vec![1.0; col_idx.len()];
    CsrMatrix::new(mask.rows(), mask.cols(), row_ptr, col_idx, values)
}

/// Sampled dense-dense matrix product: out(i,j) = Q[i] . K[j] for every
/// stored (i,j) of `pattern`; everything else stays implicit.
pub fn sddmm(q: &DenseMatrix, k: &DenseMatrix, pattern: &CsrMatrix) -> Result<CsrMatrix> {
    if q.rows() != pattern.rows() || k.rows() != pattern.cols() {
        return Err(Error::Shape(format!(
            "sddmm pattern {}x{} vs Q rows {} / K rows {}",
            pattern.rows(),
            pattern.cols(),
            q.rows(),
            k.rows()
        )));
    }
    if q.cols() != k.cols() {
        return Err(Error::Shape(format!(
            "sddmm feature dims {} vs {}",
            q.cols(),
            k.cols()
        )));
    }
    let d = q.cols();
    opcount::add((pattern.nnz() * d) as u64);
    let mut out = pattern.zeroed_like();
    for i in 0..pattern.rows() {
        let qi = q.row(i);
        for idx in pattern.row_range(i) {
            let kj = k.row(out.col_idx[idx]);
            let mut acc = 0.0f64;
            for p in 0..d {
                acc += qi[p] as f64 * kj[p] as f64;
            }
            out.values[idx] = acc as f32;
        }
    }
    Ok(out)
}

/// Softmax over each stored row of `scale * s`, treating the missing
/// entries of the length-`cols` row as logits of exactly zero: the
/// normalizer gains a `(cols - stored) * exp(-max)` correction so the
/// stored outputs match a dense softmax over the completed row. Rows with
/// no stored entries pass through unchanged.
pub fn sparse_softmax_forward(s: &CsrMatrix, scale: f32) -> Result<CsrMatrix> {
    let l = s.cols();
    opcount::add(2 * s.nnz() as u64);
    let mut out = s.clone();
    for i in 0..s.rows() {
        let range = s.row_range(i);
        if range.is_empty() {
            continue;
        }
        opcount::add(1);
        let b_cnt = range.len();
        let mut max = f64::NEG_INFINITY;
        for k in range.clone() {
            max = max.max(out.values[k] as f64 * scale as f64);
        }
        let mut sum = 0.0f64;
        for k in range.clone() {
            let e = (out.values[k] as f64 * scale as f64 - max).exp();
            out.values[k] = e as f32;
            sum += e;
        }
        sum += (l - b_cnt) as f64 * (-max).exp();
        let inv = 1.0 / sum;
        for k in range {
            out.values[k] = (out.values[k] as f64 * inv) as f32;
        }
    }
    Ok(out)
}

/// Sparse-dense product: out[i] = sum over stored j of s(i,j) * V[j].
pub fn spmm(s: &CsrMatrix, v: &DenseMatrix) -> Result<DenseMatrix> {
    if v.rows() != s.cols() {
        return Err(Error::Shape(format!(
            "spmm {}x{} times V with {} rows",
            s.rows(),
            s.cols(),
            v.rows()
        )));
    }
    let d = v.cols();
    opcount::add((s.nnz() * d) as u64);
    let mut out = DenseMatrix::zeros(s.rows(), d);
    let mut acc = vec![0.0f64; d];
    for i in 0..s.rows() {
        acc.iter_mut().for_each(|x| *x = 0.0);
        for k in s.row_range(i) {
            let w = s.values[k] as f64;
            let vr = v.row(s.col_idx[k]);
            for p in 0..d {
                acc[p] += w * vr[p] as f64;
            }
        }
        let orow = out.row_mut(i);
        for p in 0..d {
            orow[p] = acc[p] as f32;
        }
    }
    Ok(out)
}

/// Gradients of sddmm: given dS at the stored positions,
/// dQ[i] = sum_j dS(i,j) K[j] and dK[j] = sum_i dS(i,j) Q[i].
pub fn sddmm_backward(
    d_s: &CsrMatrix,
    q: &DenseMatrix,
    k: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    if q.rows() != d_s.rows() || k.rows() != d_s.cols() || q.cols() != k.cols() {
        return Err(Error::Shape(format!(
            "sddmm_backward dS {}x{} vs Q {}x{} / K {}x{}",
            d_s.rows(),
            d_s.cols(),
            q.rows(),
            q.cols(),
            k.rows(),
            k.cols()
        )));
    }
    let d = q.cols();
    opcount::add(2 * (d_s.nnz() * d) as u64);
    let mut dq = vec![0.0f64; q.rows() * d];
    let mut dk = vec![0.0f64; k.rows() * d];
    for i in 0..d_s.rows() {
        let qi = q.row(i);
        for idx in d_s.row_range(i) {
            let j = d_s.col_idx[idx];
            let g = d_s.values[idx] as f64;
            let kj = k.row(j);
            for p in 0..d {
                dq[i * d + p] += g * kj[p] as f64;
                dk[j * d + p] += g * qi[p] as f64;
            }
        }
    }
    let dq = DenseMatrix::from_vec(q.rows(), d, dq.into_iter().map(|x| x as f32).collect())?;
    let dk = DenseMatrix::from_vec(k.rows(), d, dk.into_iter().map(|x| x as f32).collect())?;
    Ok((dq, dk))
}

/// Gradient of the sparse softmax with respect to the pre-scale stored
/// logits. The implicit-zero mass only adds a constant to the normalizer,
/// so per stored row: dx = scale * y * (dy - <dy, y>).
pub fn sparse_softmax_backward(
    softmax_out: &CsrMatrix,
    d_out: &CsrMatrix,
    scale: f32,
) -> Result<CsrMatrix> {
    if !softmax_out.same_structure(d_out) {
        return Err(Error::Structure(
            "softmax output and upstream gradient structures differ".into(),
        ));
    }
    opcount::add(3 * softmax_out.nnz() as u64);
    let mut dx = softmax_out.zeroed_like();
    for i in 0..softmax_out.rows() {
        let range = softmax_out.row_range(i);
        let mut dot = 0.0f64;
        for k in range.clone() {
            dot += d_out.values[k] as f64 * softmax_out.values[k] as f64;
        }
        for k in range {
            let y = softmax_out.values[k] as f64;
            let dy = d_out.values[k] as f64;
            dx.values[k] = (scale as f64 * y * (dy - dot)) as f32;
        }
    }
    Ok(dx)
}

/// Gradients of spmm: dS(i,j) = dOut[i] . V[j] at the stored positions,
/// dV[j] = sum_i s(i,j) dOut[i].
pub fn spmm_backward(
    d_out: &DenseMatrix,
    s: &CsrMatrix,
    v: &DenseMatrix,
) -> Result<(CsrMatrix, DenseMatrix)> {
    if d_out.rows() != s.rows() || v.rows() != s.cols() || d_out.cols() != v.cols() {
        return Err(Error::Shape(format!(
            "spmm_backward dOut {}x{} vs s {}x{} / V {}x{}",
            d_out.rows(),
            d_out.cols(),
            s.rows(),
            s.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let d = v.cols();
    opcount::add(2 * (s.nnz() * d) as u64);
    let mut ds = s.zeroed_like();
    let mut dv = vec![0.0f64; v.rows() * d];
    for i in 0..s.rows() {
        let gi = d_out.row(i);
        for idx in s.row_range(i) {
            let j = s.col_idx[idx];
            let vr = v.row(j);
            let mut acc = 0.0f64;
            for p in 0..d {
                acc += gi[p] as f64 * vr[p] as f64;
            }
            ds.values[idx] = acc as f32;
            let w = s.values[idx] as f64;
            for p in 0..d {
                dv[j * d + p] += w * gi[p] as f64;
            }
        }
    }
    let dv = DenseMatrix::from_vec(v.rows(), d, dv.into_iter().map(|x| x as f32).collect())?;
    Ok((ds, dv))
}
