//! The family Q(√2, √r) with r built from primes = -1 mod 8, with norm witnesses.

use hstick::ideals::AnnConfig;
use hstick::report;

fn main() -> hstick::Result<()> {
    let rows = report::search(100, 10_000, &[], AnnConfig::default())?;
    println!(
        "{:>4} {:>10} {:>12} {:>16}",
        "r", "witness", "S", "(R : Stick)"
    );
    for row in &rows {
        let (x, y) = row.norm_witness.expect("witness exists for every r here");
        assert_eq!(x * x - 2 * y * y, row.r as i64);
        println!(
            "{:>4} {:>10} {:>12} {:>16}",
            row.r,
            format!("({x},{y})"),
            row.s_used.to_string(),
            row.index_data.r_over_stick
        );
    }
    Ok(())
}
