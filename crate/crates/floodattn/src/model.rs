//! Encoder-only Transformer classifier whose attention can run densely or
//! through per-layer CSR patterns, with a full reverse-mode backward pass
//! and binary checkpointing.

use std::path::Path;

use crate::bytes::{put_f32, put_u128, put_u32, put_u64, ByteReader};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sparse::{
    sddmm, sddmm_backward, sparse_softmax_backward, sparse_softmax_forward, spmm, spmm_backward,
    CsrMatrix,
};
use crate::tensor::{
    add, dense_softmax_backward, dense_softmax_rows, dropout_with_mask, gemm,
    init_truncated_normal, layer_norm_backward, layer_norm_cached, relu, DenseMatrix, NormCache,
};

/// Token id reserved for padding short sequences.
pub const PAD_TOKEN: usize = 0;

/// Variance floor shared by every layer norm in the network.
pub const LN_EPS: f32 = 1e-5;

const INIT_STD: f32 = 0.02;
const SLOTS_PER_LAYER: usize = 10;
const CHECKPOINT_MAGIC: &[u8; 4] = b"FATC";
const CHECKPOINT_VERSION: u32 = 1;

/// Static shape of the classifier network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    /// Number of token positions every input is padded or truncated to.
    pub seq_len: usize,
    /// Embedding width shared by all layers.
    pub embed_dim: usize,
    /// Attention heads per layer; must divide `embed_dim`.
    pub heads: usize,
    /// Number of encoder layers.
    pub layers: usize,
    /// Hidden width of the position-wise feed-forward block.
    pub ffn_dim: usize,
    /// Vocabulary size including the padding id 0.
    pub vocab: usize,
    /// Number of output classes.
    pub classes: usize,
    /// Dropout rate applied after each residual branch while training.
    pub dropout: f32,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seq_len == 0 {
            return Err(Error::Parameter("sequence length must be positive".into()));
        }
        if self.embed_dim == 0 {
            return Err(Error::Parameter("embedding width must be positive".into()));
        }
        if self.heads == 0 {
            return Err(Error::Parameter("head count must be positive".into()));
        }
        if !self.embed_dim.is_multiple_of(self.heads) {
            return Err(Error::Parameter(format!(
                "head count {} must divide embedding width {}",
                self.heads, self.embed_dim
            )));
        }
        if self.layers == 0 {
            return Err(Error::Parameter("layer count must be positive".into()));
        }
        if self.ffn_dim == 0 {
            return Err(Error::Parameter("feed-forward width must be positive".into()));
        }
        if self.vocab < 2 {
            return Err(Error::Parameter(
                "vocabulary needs the padding id 0 plus at least one real token".into(),
            ));
        }
        if self.classes < 2 {
            return Err(Error::Parameter("need at least two output classes".into()));
        }
        if !self.dropout.is_finite() || !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Parameter(format!(
                "dropout rate {} outside [0, 1)",
                self.dropout
            )));
        }
        Ok(())
    }

    /// Per-head width `embed_dim / heads`.
    pub fn head_dim(&self) -> usize {
        self.embed_dim / self.heads
    }
}

/// Weights of one encoder layer.
#[derive(Debug, Clone)]
pub struct LayerParams {
    pub w_q: DenseMatrix,
    pub w_k: DenseMatrix,
    pub w_v: DenseMatrix,
    pub w_o: DenseMatrix,
    pub w_f: DenseMatrix,
    pub w_e: DenseMatrix,
    pub ln1_gamma: DenseMatrix,
    pub ln1_beta: DenseMatrix,
    pub ln2_gamma: DenseMatrix,
    pub ln2_beta: DenseMatrix,
}

/// The full classifier: embeddings, encoder layers, and a linear head
/// over the mean-pooled final embeddings.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: ModelConfig,
    pub layers: Vec<LayerParams>,
    pub token_embed: DenseMatrix,
    pub pos_embed: DenseMatrix,
    pub classifier: DenseMatrix,
}

/// How a forward pass computes attention.
#[derive(Clone, Copy)]
pub enum AttentionMode<'a> {
    /// Every query attends to every key.
    Dense,
    /// One CSR pattern per layer; all heads of a layer share its pattern.
    Sparse(&'a [CsrMatrix]),
}

fn ones(rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_vec(rows, cols, vec![1.0; rows * cols]).expect("shape by construction")
}

impl Model {
    /// Fresh model with truncated-normal weights (std 0.02), unit norm
    /// gains, and zero norm shifts.
    pub fn new(config: ModelConfig, rng: &mut Rng) -> Result<Model> {
        config.validate()?;
        let d = config.embed_dim;
        let mut layers = Vec::with_capacity(config.layers);
        for _ in 0..config.layers {
            layers.push(LayerParams {
                w_q: init_truncated_normal(d, d, INIT_STD, rng),
                w_k: init_truncated_normal(d, d, INIT_STD, rng),
                w_v: init_truncated_normal(d, d, INIT_STD, rng),
                w_o: init_truncated_normal(d, d, INIT_STD, rng),
                w_f: init_truncated_normal(d, config.ffn_dim, INIT_STD, rng),
                w_e: init_truncated_normal(config.ffn_dim, d, INIT_STD, rng),
                ln1_gamma: ones(1, d),
                ln1_beta: DenseMatrix::zeros(1, d),
                ln2_gamma: ones(1, d),
                ln2_beta: DenseMatrix::zeros(1, d),
            });
        }
        Ok(Model {
            config,
            layers,
            token_embed: init_truncated_normal(config.vocab, d, INIT_STD, rng),
            pos_embed: init_truncated_normal(config.seq_len, d, INIT_STD, rng),
            classifier: init_truncated_normal(d, config.classes, INIT_STD, rng),
        })
    }

    fn zeroed(config: ModelConfig) -> Result<Model> {
        config.validate()?;
        let d = config.embed_dim;
        let layers = (0..config.layers)
            .map(|_| LayerParams {
                w_q: DenseMatrix::zeros(d, d),
                w_k: DenseMatrix::zeros(d, d),
                w_v: DenseMatrix::zeros(d, d),
                w_o: DenseMatrix::zeros(d, d),
                w_f: DenseMatrix::zeros(d, config.ffn_dim),
                w_e: DenseMatrix::zeros(config.ffn_dim, d),
                ln1_gamma: DenseMatrix::zeros(1, d),
                ln1_beta: DenseMatrix::zeros(1, d),
                ln2_gamma: DenseMatrix::zeros(1, d),
                ln2_beta: DenseMatrix::zeros(1, d),
            })
            .collect();
        Ok(Model {
            config,
            layers,
            token_embed: DenseMatrix::zeros(config.vocab, d),
            pos_embed: DenseMatrix::zeros(config.seq_len, d),
            classifier: DenseMatrix::zeros(d, config.classes),
        })
    }

    /// All trainable tensors in a fixed order: per layer
    /// `w_q, w_k, w_v, w_o, w_f, w_e, ln1_gamma, ln1_beta, ln2_gamma,
    /// ln2_beta`, then `token_embed`, `pos_embed`, `classifier`.
    pub fn parameters(&self) -> Vec<&DenseMatrix> {
        let mut out = Vec::with_capacity(self.layers.len() * SLOTS_PER_LAYER + 3);
        for l in &self.layers {
            out.extend([
                &l.w_q, &l.w_k, &l.w_v, &l.w_o, &l.w_f, &l.w_e, &l.ln1_gamma, &l.ln1_beta,
                &l.ln2_gamma, &l.ln2_beta,
            ]);
        }
        out.extend([&self.token_embed, &self.pos_embed, &self.classifier]);
        out
    }

    /// Mutable view of the same tensors in the same order as
    /// [`Model::parameters`].
    pub fn parameters_mut(&mut self) -> Vec<&mut DenseMatrix> {
        let mut out = Vec::with_capacity(self.layers.len() * SLOTS_PER_LAYER + 3);
        for l in &mut self.layers {
            out.extend([
                &mut l.w_q,
                &mut l.w_k,
                &mut l.w_v,
                &mut l.w_o,
                &mut l.w_f,
                &mut l.w_e,
                &mut l.ln1_gamma,
                &mut l.ln1_beta,
                &mut l.ln2_gamma,
                &mut l.ln2_beta,
            ]);
        }
        out.extend([
            &mut self.token_embed,
            &mut self.pos_embed,
            &mut self.classifier,
        ]);
        out
    }

    /// Names matching [`Model::parameters`] slot for slot.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.layers.len() * SLOTS_PER_LAYER + 3);
        for i in 0..self.layers.len() {
            for name in [
                "w_q", "w_k", "w_v", "w_o", "w_f", "w_e", "ln1_gamma", "ln1_beta", "ln2_gamma",
                "ln2_beta",
            ] {
                out.push(format!("layer{i}.{name}"));
            }
        }
        out.extend(["token_embed".into(), "pos_embed".into(), "classifier".into()]);
        out
    }

    /// Total number of trainable scalars.
    pub fn num_parameters(&self) -> usize {
        self.parameters().iter().map(|p| p.data().len()).sum()
    }

    fn prepare_tokens(&self, tokens: &[usize]) -> Result<Vec<usize>> {
        let l = self.config.seq_len;
        let mut out = Vec::with_capacity(l);
        for (i, &t) in tokens.iter().take(l).enumerate() {
            if t >= self.config.vocab {
                return Err(Error::Data(format!(
                    "token id {t} at position {i} outside vocabulary of {}",
                    self.config.vocab
                )));
            }
            out.push(t);
        }
        out.resize(l, PAD_TOKEN);
        Ok(out)
    }

    fn embed(&self, tokens: &[usize]) -> DenseMatrix {
        let d = self.config.embed_dim;
        let mut e = DenseMatrix::zeros(self.config.seq_len, d);
        for (i, &t) in tokens.iter().enumerate() {
            let te = self.token_embed.row(t);
            let pe = self.pos_embed.row(i);
            let row = e.row_mut(i);
            for j in 0..d {
                row[j] = te[j] + pe[j];
            }
        }
        e
    }

    fn layer_forward(
        &self,
        index: usize,
        e_in: DenseMatrix,
        pattern: Option<&CsrMatrix>,
        rng: &mut Rng,
        training: bool,
    ) -> Result<(DenseMatrix, LayerCache)> {
        let p = &self.layers[index];
        let cfg = &self.config;
        let dh = cfg.head_dim();
        let scale = 1.0 / (dh as f32).sqrt();

        let (x, ln1) = layer_norm_cached(&e_in, p.ln1_gamma.row(0), p.ln1_beta.row(0), LN_EPS);
        let q = gemm(&x, &p.w_q, false)?;
        let k = gemm(&x, &p.w_k, false)?;
        let v = gemm(&x, &p.w_v, false)?;

        let mut a_cat = DenseMatrix::zeros(cfg.seq_len, cfg.embed_dim);
        let probs = match pattern {
            None => {
                let mut heads = Vec::with_capacity(cfg.heads);
                for h in 0..cfg.heads {
                    let c0 = h * dh;
                    let qh = q.columns(c0, c0 + dh)?;
                    let kh = k.columns(c0, c0 + dh)?;
                    let vh = v.columns(c0, c0 + dh)?;
                    let scores = gemm(&qh, &kh, true)?;
                    let ah = dense_softmax_rows(&scores, scale);
                    let oh = gemm(&ah, &vh, false)?;
                    a_cat.paste_columns(c0, &oh)?;
                    heads.push(ah);
                }
                AttnProbs::Dense(heads)
            }
            Some(pat) => {
                if pat.rows() != cfg.seq_len || pat.cols() != cfg.seq_len {
                    return Err(Error::Shape(format!(
                        "attention pattern {}x{} does not match sequence length {}",
                        pat.rows(),
                        pat.cols(),
                        cfg.seq_len
                    )));
                }
                let mut heads = Vec::with_capacity(cfg.heads);
                for h in 0..cfg.heads {
                    let c0 = h * dh;
                    let qh = q.columns(c0, c0 + dh)?;
                    let kh = k.columns(c0, c0 + dh)?;
                    let vh = v.columns(c0, c0 + dh)?;
                    let scores = sddmm(&qh, &kh, pat)?;
                    let ah = sparse_softmax_forward(&scores, scale)?;
                    let oh = spmm(&ah, &vh)?;
                    a_cat.paste_columns(c0, &oh)?;
                    heads.push(ah);
                }
                AttnProbs::Sparse(heads)
            }
        };

        let m = gemm(&a_cat, &p.w_o, false)?;
        let (m_drop, drop1) = dropout_with_mask(&m, cfg.dropout, rng, training)?;
        let o = add(&m_drop, &e_in)?;

        let (y, ln2) = layer_norm_cached(&o, p.ln2_gamma.row(0), p.ln2_beta.row(0), LN_EPS);
        let ffn_pre = gemm(&y, &p.w_f, false)?;
        let f = relu(&ffn_pre);
        let g = gemm(&f, &p.w_e, false)?;
        let (g_drop, drop2) = dropout_with_mask(&g, cfg.dropout, rng, training)?;
        let e_out = add(&g_drop, &o)?;

        Ok((
            e_out,
            LayerCache {
                ln1,
                x,
                q,
                k,
                v,
                probs,
                a_cat,
                drop1,
                ln2,
                y,
                ffn_pre,
                f,
                drop2,
            },
        ))
    }

    /// Forward pass that keeps every intermediate needed by
    /// [`Model::backward`]. Returns the class logits and the cache.
    pub fn forward_cached(
        &self,
        tokens: &[usize],
        mode: AttentionMode,
        rng: &mut Rng,
        training: bool,
    ) -> Result<(Vec<f32>, ForwardCache)> {
        let patterns = match mode {
            AttentionMode::Dense => None,
            AttentionMode::Sparse(p) => {
                if p.len() != self.config.layers {
                    return Err(Error::Parameter(format!(
                        "{} attention patterns supplied for {} layers",
                        p.len(),
                        self.config.layers
                    )));
                }
                Some(p)
            }
        };
        let toks = self.prepare_tokens(tokens)?;
        let mut e = self.embed(&toks);
        let mut layer_caches = Vec::with_capacity(self.config.layers);
        for li in 0..self.config.layers {
            let pat = patterns.map(|ps| &ps[li]);
            let (e_next, cache) = self.layer_forward(li, e, pat, rng, training)?;
            e = e_next;
            layer_caches.push(cache);
        }

        let l = self.config.seq_len;
        let d = self.config.embed_dim;
        let mut pooled = DenseMatrix::zeros(1, d);
        for j in 0..d {
            let mut acc = 0.0f64;
            for i in 0..l {
                acc += e.at(i, j) as f64;
            }
            pooled.set(0, j, (acc / l as f64) as f32);
        }
        let logits = gemm(&pooled, &self.classifier, false)?.row(0).to_vec();
        Ok((
            logits,
            ForwardCache {
                tokens: toks,
                layers: layer_caches,
                pooled,
            },
        ))
    }

    /// Inference-only forward pass (no dropout); returns the class logits.
    pub fn classify_forward(&self, tokens: &[usize], mode: AttentionMode) -> Result<Vec<f32>> {
        let mut rng = Rng::new(0);
        Ok(self.forward_cached(tokens, mode, &mut rng, false)?.0)
    }

    /// Reverse-mode gradients of every parameter given the gradient of the
    /// loss with respect to the logits of the cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, d_logits: &[f32]) -> Result<Gradients> {
        let cfg = &self.config;
        if d_logits.len() != cfg.classes {
            return Err(Error::Shape(format!(
                "{} logit gradients for {} classes",
                d_logits.len(),
                cfg.classes
            )));
        }
        if cache.layers.len() != cfg.layers {
            return Err(Error::State(
                "forward cache does not match the model's layer count".into(),
            ));
        }
        let l = cfg.seq_len;
        let d = cfg.embed_dim;
        let dh = cfg.head_dim();
        let scale = 1.0 / (dh as f32).sqrt();
        let nl = cfg.layers;
        let mut grads = Gradients::zeros_like(self);

        let dl = DenseMatrix::from_vec(1, cfg.classes, d_logits.to_vec())?;
        grads.slots[nl * SLOTS_PER_LAYER + 2] = gemm(&cache.pooled.transpose(), &dl, false)?;
        let d_pooled = gemm(&dl, &self.classifier, true)?;
        let inv_l = 1.0 / l as f32;
        let mut d_e = DenseMatrix::zeros(l, d);
        for i in 0..l {
            let row = d_e.row_mut(i);
            for (rv, &pv) in row.iter_mut().zip(d_pooled.row(0)) {
                *rv = pv * inv_l;
            }
        }

        for li in (0..nl).rev() {
            let lc = &cache.layers[li];
            let p = &self.layers[li];
            let base = li * SLOTS_PER_LAYER;

            // E_out = dropout(F W_e) + O
            let d_g = apply_mask(&d_e, &lc.drop2);
            let d_f = gemm(&d_g, &p.w_e, true)?;
            grads.slots[base + 5] = gemm(&lc.f.transpose(), &d_g, false)?;
            let mut d_p = d_f;
            for (dv, &pre) in d_p.data_mut().iter_mut().zip(lc.ffn_pre.data()) {
                if pre <= 0.0 {
                    *dv = 0.0;
                }
            }
            let d_y = gemm(&d_p, &p.w_f, true)?;
            grads.slots[base + 4] = gemm(&lc.y.transpose(), &d_p, false)?;
            let (d_o_ln, dg2, db2) = layer_norm_backward(&d_y, &lc.ln2, p.ln2_gamma.row(0));
            grads.slots[base + 8] = dg2;
            grads.slots[base + 9] = db2;
            // O feeds both the second norm and the residual to E_out.
            let d_o_total = add(&d_e, &d_o_ln)?;

            // O = dropout(A_cat W_o) + E_in
            let d_m = apply_mask(&d_o_total, &lc.drop1);
            let d_a_cat = gemm(&d_m, &p.w_o, true)?;
            grads.slots[base + 3] = gemm(&lc.a_cat.transpose(), &d_m, false)?;

            let mut d_q = DenseMatrix::zeros(l, d);
            let mut d_k = DenseMatrix::zeros(l, d);
            let mut d_v = DenseMatrix::zeros(l, d);
            for h in 0..cfg.heads {
                let c0 = h * dh;
                let d_oh = d_a_cat.columns(c0, c0 + dh)?;
                let qh = lc.q.columns(c0, c0 + dh)?;
                let kh = lc.k.columns(c0, c0 + dh)?;
                let vh = lc.v.columns(c0, c0 + dh)?;
                let (d_qh, d_kh, d_vh) = match &lc.probs {
                    AttnProbs::Dense(heads) => {
                        let ah = &heads[h];
                        let d_ah = gemm(&d_oh, &vh, true)?;
                        let d_vh = gemm(&ah.transpose(), &d_oh, false)?;
                        let d_scores = dense_softmax_backward(ah, &d_ah, scale)?;
                        let d_qh = gemm(&d_scores, &kh, false)?;
                        let d_kh = gemm(&d_scores.transpose(), &qh, false)?;
                        (d_qh, d_kh, d_vh)
                    }
                    AttnProbs::Sparse(heads) => {
                        let ah = &heads[h];
                        let (d_ah, d_vh) = spmm_backward(&d_oh, ah, &vh)?;
                        let d_scores = sparse_softmax_backward(ah, &d_ah, scale)?;
                        let (d_qh, d_kh) = sddmm_backward(&d_scores, &qh, &kh)?;
                        (d_qh, d_kh, d_vh)
                    }
                };
                d_q.paste_columns(c0, &d_qh)?;
                d_k.paste_columns(c0, &d_kh)?;
                d_v.paste_columns(c0, &d_vh)?;
            }

            let xt = lc.x.transpose();
            grads.slots[base] = gemm(&xt, &d_q, false)?;
            grads.slots[base + 1] = gemm(&xt, &d_k, false)?;
            grads.slots[base + 2] = gemm(&xt, &d_v, false)?;
            let mut d_x = gemm(&d_q, &p.w_q, true)?;
            d_x = add(&d_x, &gemm(&d_k, &p.w_k, true)?)?;
            d_x = add(&d_x, &gemm(&d_v, &p.w_v, true)?)?;
            let (d_e_ln, dg1, db1) = layer_norm_backward(&d_x, &lc.ln1, p.ln1_gamma.row(0));
            grads.slots[base + 6] = dg1;
            grads.slots[base + 7] = db1;
            // E_in feeds both the first norm and the residual to O.
            d_e = add(&d_o_total, &d_e_ln)?;
        }

        let d_tok = &mut grads.slots[nl * SLOTS_PER_LAYER];
        for (i, &t) in cache.tokens.iter().enumerate() {
            let src = d_e.row(i);
            let dst = d_tok.row_mut(t);
            for j in 0..d {
                dst[j] += src[j];
            }
        }
        grads.slots[nl * SLOTS_PER_LAYER + 1] = d_e;
        Ok(grads)
    }

    /// Serialize the model plus the training RNG state.
    pub fn to_bytes(&self, rng_state: (u64, u128)) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(CHECKPOINT_MAGIC);
        put_u32(&mut buf, CHECKPOINT_VERSION);
        for v in [
            self.config.seq_len,
            self.config.embed_dim,
            self.config.heads,
            self.config.layers,
            self.config.ffn_dim,
            self.config.vocab,
            self.config.classes,
        ] {
            put_u64(&mut buf, v as u64);
        }
        put_f32(&mut buf, self.config.dropout);
        put_u64(&mut buf, rng_state.0);
        put_u128(&mut buf, rng_state.1);
        for p in self.parameters() {
            put_u64(&mut buf, p.rows() as u64);
            put_u64(&mut buf, p.cols() as u64);
            for &v in p.data() {
                put_f32(&mut buf, v);
            }
        }
        buf
    }

    /// Inverse of [`Model::to_bytes`].
    pub fn from_bytes(buf: &[u8]) -> Result<(Model, (u64, u128))> {
        let mut r = ByteReader::new(buf);
        if r.bytes(4)? != CHECKPOINT_MAGIC {
            return Err(Error::Parse("not a checkpoint file (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let mut dims = [0usize; 7];
        for v in &mut dims {
            *v = r.u64()? as usize;
        }
        let config = ModelConfig {
            seq_len: dims[0],
            embed_dim: dims[1],
            heads: dims[2],
            layers: dims[3],
            ffn_dim: dims[4],
            vocab: dims[5],
            classes: dims[6],
            dropout: r.f32()?,
        };
        let seed = r.u64()?;
        let word_pos = r.u128()?;
        let mut model =
            Model::zeroed(config).map_err(|e| Error::Parse(format!("bad checkpoint config: {e}")))?;
        for p in model.parameters_mut() {
            let rows = r.u64()? as usize;
            let cols = r.u64()? as usize;
            if rows != p.rows() || cols != p.cols() {
                return Err(Error::Parse(format!(
                    "checkpoint tensor is {rows}x{cols} where {}x{} was expected",
                    p.rows(),
                    p.cols()
                )));
            }
            for v in p.data_mut() {
                *v = r.f32()?;
            }
        }
        r.finish()?;
        Ok((model, (seed, word_pos)))
    }

    pub fn write_checkpoint(&self, path: &Path, rng_state: (u64, u128)) -> Result<()> {
        std::fs::write(path, self.to_bytes(rng_state))?;
        Ok(())
    }

    pub fn read_checkpoint(path: &Path) -> Result<(Model, (u64, u128))> {
        Model::from_bytes(&std::fs::read(path)?)
    }
}

fn apply_mask(g: &DenseMatrix, mask: &Option<Vec<f32>>) -> DenseMatrix {
    match mask {
        None => g.clone(),
        Some(m) => {
            let mut out = g.clone();
            for (v, &s) in out.data_mut().iter_mut().zip(m) {
                *v *= s;
            }
            out
        }
    }
}

enum AttnProbs {
    Dense(Vec<DenseMatrix>),
    Sparse(Vec<CsrMatrix>),
}

struct LayerCache {
    ln1: NormCache,
    x: DenseMatrix,
    q: DenseMatrix,
    k: DenseMatrix,
    v: DenseMatrix,
    probs: AttnProbs,
    a_cat: DenseMatrix,
    drop1: Option<Vec<f32>>,
    ln2: NormCache,
    y: DenseMatrix,
    ffn_pre: DenseMatrix,
    f: DenseMatrix,
    drop2: Option<Vec<f32>>,
}

/// Every intermediate of one forward pass that the backward pass replays.
pub struct ForwardCache {
    tokens: Vec<usize>,
    layers: Vec<LayerCache>,
    pooled: DenseMatrix,
}

impl ForwardCache {
    /// Attention probabilities of one layer averaged over its heads.
    /// Available only for dense-attention forwards.
    pub fn mean_head_attention(&self, layer: usize) -> Option<DenseMatrix> {
        match &self.layers.get(layer)?.probs {
            AttnProbs::Dense(heads) => {
                let rows = heads[0].rows();
                let cols = heads[0].cols();
                let mut acc = vec![0.0f64; rows * cols];
                for h in heads {
                    for (a, &v) in acc.iter_mut().zip(h.data()) {
                        *a += v as f64;
                    }
                }
                let inv = 1.0 / heads.len() as f64;
                let data = acc.into_iter().map(|v| (v * inv) as f32).collect();
                Some(DenseMatrix::from_vec(rows, cols, data).expect("shape by construction"))
            }
            AttnProbs::Sparse(_) => None,
        }
    }

    /// Smallest |pre-activation| entering any ReLU on this forward pass.
    /// A finite-difference probe with step h is only trustworthy when this
    /// margin exceeds h: a pre-activation inside the probe interval puts a
    /// kink between the two loss evaluations, which contaminates the
    /// difference quotient for every upstream parameter.
    pub fn relu_margin(&self) -> f32 {
        self.layers
            .iter()
            .flat_map(|lc| lc.ffn_pre.data().iter())
            .fold(f32::INFINITY, |m, &v| m.min(v.abs()))
    }
}

/// One gradient tensor per parameter slot, in [`Model::parameters`] order.
#[derive(Debug, Clone)]
pub struct Gradients {
    slots: Vec<DenseMatrix>,
}

impl Gradients {
    pub fn zeros_like(model: &Model) -> Gradients {
        Gradients {
            slots: model
                .parameters()
                .iter()
                .map(|p| DenseMatrix::zeros(p.rows(), p.cols()))
                .collect(),
        }
    }

    pub fn slots(&self) -> &[DenseMatrix] {
        &self.slots
    }

    pub fn slots_mut(&mut self) -> &mut [DenseMatrix] {
        &mut self.slots
    }

    /// Element-wise sum with another gradient set of the same shape.
    pub fn accumulate(&mut self, other: &Gradients) -> Result<()> {
        if self.slots.len() != other.slots.len() {
            return Err(Error::Shape(format!(
                "accumulating {} gradient slots into {}",
                other.slots.len(),
                self.slots.len()
            )));
        }
        for (a, b) in self.slots.iter_mut().zip(&other.slots) {
            if a.rows() != b.rows() || a.cols() != b.cols() {
                return Err(Error::Shape(format!(
                    "gradient slot {}x{} vs {}x{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols()
                )));
            }
            for (x, &y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += y;
            }
        }
        Ok(())
    }

    /// Multiply every gradient by a constant (e.g. 1/batch).
    pub fn scale(&mut self, c: f32) {
        for s in &mut self.slots {
            for v in s.data_mut() {
                *v *= c;
            }
        }
    }
}

/// Cross-entropy of one logit row against `label`. Returns the loss and
/// the gradient with respect to the logits (softmax minus one-hot).
pub fn cross_entropy(logits: &[f32], label: usize) -> Result<(f64, Vec<f32>)> {
    if logits.is_empty() {
        return Err(Error::Shape("cross entropy over zero classes".into()));
    }
    if label >= logits.len() {
        return Err(Error::Data(format!(
            "label {label} outside {} classes",
            logits.len()
        )));
    }
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v as f64));
    let exps: Vec<f64> = logits.iter().map(|&v| (v as f64 - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let loss = z.ln() + max - logits[label] as f64;
    let d = exps
        .iter()
        .enumerate()
        .map(|(j, &e)| {
            let p = e / z;
            (p - if j == label { 1.0 } else { 0.0 }) as f32
        })
        .collect();
    Ok((loss, d))
}
