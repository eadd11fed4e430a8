//! The nested-operator dataset.
//!
//! Generates classification samples in the style of the ListOps benchmark:
//! each sequence encodes a nested MIN/MAX/MED expression over digits, and
//! the label is its value. Decodes a few samples back to readable text,
//! re-evaluates them against their labels, and prints the label histogram.
//!
//! ```bash
//! cargo run -p floodattn --example listops_dataset
//! ```

use floodattn::data::{eval_listops, listops_tokens, synthetic_listops};
use floodattn::rng::Rng;

fn decode(tokens: &[usize]) -> String {
    let mut out = String::new();
    for &t in tokens {
        if t == 0 {
            break; // padding
        }
        if !out.is_empty() && !out.ends_with('(') {
            out.push(' ');
        }
        match t {
            listops_tokens::MIN => out.push_str("MIN"),
            listops_tokens::MAX => out.push_str("MAX"),
            listops_tokens::MED => out.push_str("MED"),
            listops_tokens::OPEN => {
                // Re-attach the paren to the operator that follows.
                out.push('(');
                continue;
            }
            listops_tokens::CLOSE => {
                out.pop(); // drop the space before ')'
                out.push(')');
            }
            d => out.push_str(&(d - listops_tokens::DIGIT_BASE).to_string()),
        }
    }
    out
}

fn main() -> floodattn::Result<()> {
    let mut rng = Rng::new(2024);
    let dataset = synthetic_listops(200, 48, &mut rng)?;
    println!(
        "{} samples, vocabulary {}, {} classes\n",
        dataset.samples.len(),
        dataset.vocab,
        dataset.classes
    );

    println!("first five samples:");
    for s in &dataset.samples[..5] {
        let text = decode(&s.tokens);
        let trimmed: Vec<usize> = s
            .tokens
            .iter()
            .copied()
            .take_while(|&t| t != 0)
            .collect();
        let value = eval_listops(&trimmed)?;
        println!("  {text}  =>  {value} (label {})", s.label);
        assert_eq!(value, s.label);
    }

    let mut histogram = vec![0usize; dataset.classes];
    for s in &dataset.samples {
        histogram[s.label] += 1;
    }
    println!("\nlabel histogram over {} samples:", dataset.samples.len());
    for (value, count) in histogram.iter().enumerate() {
        println!("  {value}: {}", "#".repeat(*count));
    }

    // The evaluator is also usable standalone: MAX(3, MIN(9, 2)) = 3.
    use listops_tokens::{CLOSE, DIGIT_BASE, MAX, MIN, OPEN};
    let expr = [
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
    println!("\nMAX(3, MIN(9, 2)) evaluates to {}", eval_listops(&expr)?);
    Ok(())
}
