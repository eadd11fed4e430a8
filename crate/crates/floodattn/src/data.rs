//! Classification datasets: two synthetic generators with exactly known
//! labels, plus a CSV loader for external token sequences.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::PAD_TOKEN;
use crate::rng::Rng;

/// One classification example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub tokens: Vec<usize>,
    pub label: usize,
}

/// A labelled token-sequence dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    /// Token id bound (ids run 0..vocab, with 0 reserved for padding).
    pub vocab: usize,
    /// Label bound (labels run 0..classes).
    pub classes: usize,
}

impl Dataset {
    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::Data("dataset has no samples".into()));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.tokens.is_empty() {
                return Err(Error::Data(format!("sample {i} has no tokens")));
            }
            if let Some(&t) = s.tokens.iter().find(|&&t| t >= self.vocab) {
                return Err(Error::Data(format!(
                    "sample {i} holds token id {t} outside vocabulary of {}",
                    self.vocab
                )));
            }
            if s.label >= self.classes {
                return Err(Error::Data(format!(
                    "sample {i} holds label {} outside {} classes",
                    s.label, self.classes
                )));
            }
        }
        Ok(())
    }
}

/// Probability that a position of a majority sample draws the sample's
/// boosted symbol instead of a uniform one.
const MAJORITY_BOOST: f32 = 0.55;

/// Sequences over symbols `1..=classes` where the label is the most
/// frequent symbol (minus one). Each sample boosts one class round-robin
/// so labels stay balanced; ties resolve to the smallest symbol.
pub fn synthetic_majority(
    samples: usize,
    seq_len: usize,
    classes: usize,
    rng: &mut Rng,
) -> Result<Dataset> {
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    if seq_len == 0 {
        return Err(Error::Parameter("sequence length must be positive".into()));
    }
    if classes < 2 {
        return Err(Error::Parameter("need at least two classes".into()));
    }
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let boosted = i % classes;
        let mut tokens = Vec::with_capacity(seq_len);
        let mut counts = vec![0usize; classes];
        for _ in 0..seq_len {
            let sym = if rng.uniform() < MAJORITY_BOOST {
                boosted
            } else {
                rng.below(classes)
            };
            counts[sym] += 1;
            tokens.push(sym + 1);
        }
        let label = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(sym, _)| sym)
            .expect("classes >= 2");
        out.push(Sample { tokens, label });
    }
    let data = Dataset {
        samples: out,
        vocab: classes + 1,
        classes,
    };
    data.validate()?;
    Ok(data)
}

/// Token ids of the nested-list expression language: 0 pads, 1..=10 are
/// the digits 0..=9, then the three operators and the two brackets.
pub mod listops_tokens {
    pub const DIGIT_BASE: usize = 1;
    pub const MIN: usize = 11;
    pub const MAX: usize = 12;
    pub const MED: usize = 13;
    pub const OPEN: usize = 14;
    pub const CLOSE: usize = 15;
    pub const VOCAB: usize = 16;
    pub const CLASSES: usize = 10;
}

/// Evaluate a nested-list expression over digits 0..=9. Grammar:
/// `expr = digit | OPEN op expr+ CLOSE`; MED takes the lower median.
pub fn eval_listops(tokens: &[usize]) -> Result<usize> {
    use listops_tokens::*;
    fn eval(tokens: &[usize], pos: &mut usize) -> Result<usize> {
        let t = *tokens
            .get(*pos)
            .ok_or_else(|| Error::Parse("expression ends mid-way".into()))?;
        *pos += 1;
        if (DIGIT_BASE..DIGIT_BASE + 10).contains(&t) {
            return Ok(t - DIGIT_BASE);
        }
        if t != OPEN {
            return Err(Error::Parse(format!(
                "expected a digit or an opening bracket, found token {t}"
            )));
        }
        let op = *tokens
            .get(*pos)
            .ok_or_else(|| Error::Parse("expression ends after a bracket".into()))?;
        *pos += 1;
        if !(MIN..=MED).contains(&op) {
            return Err(Error::Parse(format!("token {op} is not an operator")));
        }
        let mut args = Vec::new();
        loop {
            match tokens.get(*pos) {
                Some(&CLOSE) => {
                    *pos += 1;
                    break;
                }
                Some(_) => args.push(eval(tokens, pos)?),
                None => return Err(Error::Parse("unclosed bracket".into())),
            }
        }
        if args.is_empty() {
            return Err(Error::Parse("operator applied to no arguments".into()));
        }
        args.sort_unstable();
        Ok(match op {
            MIN => args[0],
            MAX => args[args.len() - 1],
            _ => args[(args.len() - 1) / 2],
        })
    }
    let mut pos = 0;
    let v = eval(tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse(format!(
            "trailing tokens after position {pos}"
        )));
    }
    Ok(v)
}

fn gen_listops_expr(budget: usize, rng: &mut Rng, out: &mut Vec<usize>) -> usize {
    use listops_tokens::*;
    // An operator node costs OPEN + op + CLOSE plus at least one token
    // per argument; below that only a digit fits.
    if budget < 5 || rng.uniform() < 0.25 {
        let d = rng.below(10);
        out.push(DIGIT_BASE + d);
        return d;
    }
    let op = MIN + rng.below(3);
    let arity = 2 + rng.below(2);
    out.push(OPEN);
    out.push(op);
    let arg_budget = (budget - 3) / arity;
    let mut args = Vec::with_capacity(arity);
    for _ in 0..arity {
        args.push(gen_listops_expr(arg_budget, rng, out));
    }
    out.push(CLOSE);
    args.sort_unstable();
    match op {
        MIN => args[0],
        MAX => args[args.len() - 1],
        _ => args[(args.len() - 1) / 2],
    }
}

/// Nested MIN/MAX/MED expressions over digits, labelled with their value.
/// Every sample fits in `seq_len` tokens.
pub fn synthetic_listops(samples: usize, seq_len: usize, rng: &mut Rng) -> Result<Dataset> {
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    if seq_len < 5 {
        return Err(Error::Parameter(
            "sequence length below 5 cannot hold an operator expression".into(),
        ));
    }
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut tokens = Vec::new();
        let label = gen_listops_expr(seq_len, rng, &mut tokens);
        debug_assert!(tokens.len() <= seq_len);
        out.push(Sample { tokens, label });
    }
    let data = Dataset {
        samples: out,
        vocab: listops_tokens::VOCAB,
        classes: listops_tokens::CLASSES,
    };
    data.validate()?;
    Ok(data)
}

/// Parse `token,token,...,label` lines. Blank lines are skipped; every
/// error names its 1-based line.
pub fn parse_csv(text: &str, vocab: usize, classes: usize) -> Result<Dataset> {
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let n = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::Data(format!(
                "line {n}: need at least one token and a label"
            )));
        }
        let mut nums = Vec::with_capacity(fields.len());
        for f in &fields {
            let v: usize = f.trim().parse().map_err(|_| {
                Error::Data(format!("line {n}: '{}' is not a non-negative integer", f.trim()))
            })?;
            nums.push(v);
        }
        let label = nums.pop().expect("len >= 2");
        if label >= classes {
            return Err(Error::Data(format!(
                "line {n}: label {label} outside {classes} classes"
            )));
        }
        if let Some(&t) = nums.iter().find(|&&t| t >= vocab) {
            return Err(Error::Data(format!(
                "line {n}: token id {t} outside vocabulary of {vocab}"
            )));
        }
        samples.push(Sample {
            tokens: nums,
            label,
        });
    }
    let data = Dataset {
        samples,
        vocab,
        classes,
    };
    data.validate()?;
    Ok(data)
}

/// [`parse_csv`] over a file.
pub fn load_csv(path: &Path, vocab: usize, classes: usize) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, vocab, classes)
}

// Quiet check that the pad id the model assumes matches the reserved id.
const _: [(); PAD_TOKEN] = [];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_labels_match_recount_and_stay_balanced() {
        let mut rng = Rng::new(5);
        let data = synthetic_majority(300, 64, 3, &mut rng).unwrap();
        assert_eq!(data.vocab, 4);
        assert_eq!(data.classes, 3);
        let mut label_counts = vec![0usize; 3];
        for s in &data.samples {
            assert_eq!(s.tokens.len(), 64);
            let mut counts = [0usize; 3];
            for &t in &s.tokens {
                assert!((1..=3).contains(&t));
                counts[t - 1] += 1;
            }
            let best = counts.iter().max().unwrap();
            let winner = counts.iter().position(|c| c == best).unwrap();
            assert_eq!(s.label, winner, "label must be the smallest modal symbol");
            label_counts[s.label] += 1;
        }
        // Boosted round-robin keeps classes within a loose band of 1/3.
        for &c in &label_counts {
            assert!((60..=140).contains(&c), "unbalanced labels: {label_counts:?}");
        }
    }

    #[test]
    fn majority_rejects_degenerate_shapes() {
        let mut rng = Rng::new(1);
        assert!(synthetic_majority(0, 8, 2, &mut rng).is_err());
        assert!(synthetic_majority(4, 0, 2, &mut rng).is_err());
        assert!(synthetic_majority(4, 8, 1, &mut rng).is_err());
    }

    #[test]
    fn listops_hand_expression_evaluates() {
        use listops_tokens::*;
        // MAX(3, MIN(9, 2)) = MAX(3, 2) = 3
        let tokens = [
            OPEN,
            MAX,
            DIGIT_BASE + 3,
            OPEN,
            MIN,
            DIGIT_BASE + 9,
            DIGIT_BASE + 2,
            CLOSE,
            CLOSE,
        ];
        assert_eq!(eval_listops(&tokens).unwrap(), 3);
        // MED of an even count takes the lower middle: MED(1, 4) = 1.
        let tokens = [OPEN, MED, DIGIT_BASE + 1, DIGIT_BASE + 4, CLOSE];
        assert_eq!(eval_listops(&tokens).unwrap(), 1);
        assert_eq!(eval_listops(&[DIGIT_BASE + 7]).unwrap(), 7);
    }

    #[test]
    fn listops_rejects_malformed_expressions() {
        use listops_tokens::*;
        assert!(eval_listops(&[OPEN, MAX, CLOSE]).is_err());
        assert!(eval_listops(&[OPEN, MAX, DIGIT_BASE]).is_err());
        assert!(eval_listops(&[DIGIT_BASE, DIGIT_BASE]).is_err());
        assert!(eval_listops(&[CLOSE]).is_err());
        assert!(eval_listops(&[]).is_err());
    }

    #[test]
    fn listops_samples_fit_budget_and_eval_to_their_labels() {
        let mut rng = Rng::new(9);
        let data = synthetic_listops(200, 48, &mut rng).unwrap();
        assert_eq!(data.vocab, 16);
        assert_eq!(data.classes, 10);
        let mut nested = 0;
        for s in &data.samples {
            assert!(s.tokens.len() <= 48);
            assert_eq!(eval_listops(&s.tokens).unwrap(), s.label);
            if s.tokens.len() > 5 {
                nested += 1;
            }
        }
        assert!(nested > 100, "generator should mostly emit operator trees");
    }

    #[test]
    fn csv_round_trip_and_errors_name_lines() {
        let data = parse_csv("1,2,3,0\n\n4,5,1\n", 6, 2).unwrap();
        assert_eq!(data.samples.len(), 2);
        assert_eq!(data.samples[0].tokens, vec![1, 2, 3]);
        assert_eq!(data.samples[0].label, 0);
        assert_eq!(data.samples[1].tokens, vec![4, 5]);
        assert_eq!(data.samples[1].label, 1);

        let err = parse_csv("1,2,0\nbogus,1\n", 6, 2).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_csv("1,9,0\n", 6, 2).unwrap_err().to_string();
        assert!(err.contains("line 1") && err.contains("token id 9"), "{err}");
        let err = parse_csv("1,2,7\n", 6, 2).unwrap_err().to_string();
        assert!(err.contains("label 7"), "{err}");
        let err = parse_csv("5\n", 6, 2).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn load_csv_reads_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        std::fs::write(&path, "1,2,0\n3,4,1\n").unwrap();
        let data = load_csv(&path, 5, 2).unwrap();
        assert_eq!(data.samples.len(), 2);
        assert!(load_csv(&dir.path().join("missing.csv"), 5, 2).is_err());
    }
}
