//! Exact values L(-1, chi), S-truncated zeta values and the predicted orders of K2.

use hstick::fields::{MultiQuadField, PlaceSet};
use hstick::lvalues;
use hstick::serial::fmt_rational;

fn main() -> hstick::Result<()> {
    for disc in [1, 5, 8, 12, 13, 17, 24] {
        println!(
            "L(-1, chi_{disc:<3}) = {}",
            fmt_rational(&lvalues::dirichlet_l_minus1(disc)?)
        );
    }

    let field = MultiQuadField::parse("2,5")?;
    let s = PlaceSet::for_field(&field, &[2, 5])?;
    for rec in lvalues::l_values(&field, &s)? {
        println!(
            "chi {} disc {:>3}: L = {:>8}  L^S = {:>8}",
            rec.chi.0,
            rec.disc,
            fmt_rational(&rec.raw_l),
            fmt_rational(&rec.adjusted_l)
        );
    }
    let bt = lvalues::bt_orders(&field, &s)?;
    println!("zeta^S_E(-1) = {}", fmt_rational(&bt.zeta_e));
    println!("predicted |K2(O_E^S)| = {}", bt.k2_e);
    for o in &bt.subfields {
        println!(
            "  Q(√{}): k2 = {}, k2^- = {}, w2^- = {}",
            o.d, o.k2, o.k2_minus, o.w2_minus
        );
    }
    Ok(())
}
