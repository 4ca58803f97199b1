//! Filling ratios of the reference corpus, plus the query-count projection they imply.
//!
//! ```bash
//! cargo run --release --example table1 -- 16
//! ```

use rankprep::bounds::query_complexity_projection;
use rankprep::commands::table1_rows;
use rankprep::Encoding;

fn main() -> rankprep::Result<()> {
    let n = std::env::args().nth(1).map_or(Ok(16), |s| s.parse()).expect("n must be an integer");
    println!("{:<10} {:<12} {:>10} {:>14} {:>14}", "family", "params", "F", "r (pointwise)", "r (integral)");
    for row in table1_rows(n)? {
        let pw = query_complexity_projection(row.filling_ratio, 0.01, Encoding::Pointwise, 1.0)?;
        let it = query_complexity_projection(row.filling_ratio, 0.01, Encoding::Integral, 1.0)?;
        println!("{:<10} {:<12} {:>10.4} {:>14} {:>14}", row.family, row.params, row.filling_ratio, pw, it);
    }
    Ok(())
}
