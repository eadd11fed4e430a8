//! Flood fill on a pooled grid, one seed at a time.
//!
//! The fill starts from every cell of row 0 and column 0 and walks only
//! right, below, and diagonally below-right. At each cell it moves to the
//! neighbor(s) holding the maximum of the three; visited neighbors are
//! marked when their value clears the threshold, and the walk continues
//! through sub-threshold cells without marking them.
//!
//! ```bash
//! cargo run -p floodattn --example flood_fill_walkthrough
//! ```

use floodattn::pattern::{flood_fill, flood_fill_edges, BlockMask};
use floodattn::tensor::DenseMatrix;

fn print_grid(pool: &DenseMatrix, marks: &BlockMask) {
    for i in 0..pool.rows() {
        for j in 0..pool.cols() {
            let star = if marks.get(i, j) { '*' } else { ' ' };
            print!(" {:>4.1}{star}", pool.at(i, j));
        }
        println!();
    }
}

fn main() -> floodattn::Result<()> {
    // A ridge running down the diagonal, a spur into the last column, and
    // a low-valued moat everywhere else.
    let pool = DenseMatrix::from_rows(&[
        vec![9.0, 2.0, 1.0, 1.0, 1.0, 1.0],
        vec![2.0, 8.0, 2.0, 1.0, 1.0, 1.0],
        vec![1.0, 2.0, 8.0, 2.0, 1.0, 6.0],
        vec![1.0, 1.0, 2.0, 7.0, 2.0, 6.0],
        vec![1.0, 1.0, 1.0, 2.0, 7.0, 2.0],
        vec![1.0, 1.0, 1.0, 1.0, 2.0, 9.0],
    ])?;
    let threshold = 5.0;

    println!("pooled grid (threshold {threshold}); * marks filled blocks\n");

    // Single seed from the top-left corner.
    let mut marks = BlockMask::zeros(6);
    flood_fill(&pool, 0, 0, &mut marks, threshold)?;
    println!("seeded at (0,0) only — the fill follows the ridge:");
    print_grid(&pool, &marks);

    // The production seeding: all of row 0 and column 0.
    let marks = flood_fill_edges(&pool, threshold)?;
    println!("\nseeded from every edge cell:");
    print_grid(&pool, &marks);
    println!(
        "\n{} of {} blocks marked; marked list: {:?}",
        marks.count(),
        6 * 6,
        marks.marked()
    );
    Ok(())
}
