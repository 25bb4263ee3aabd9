//! Stick = Ann * theta for biquadratic fields, against the closed forms and the index formula.

use hstick::fields::{MultiQuadField, PlaceSet};
use hstick::ideals::{self, AnnConfig};

fn main() -> hstick::Result<()> {
    for (gens, s) in [
        ([3, 7], vec![2, 3, 7]),
        ([2, 5], vec![2, 5]),
        ([2, 7], vec![2, 7, 3]),
    ] {
        let field = MultiQuadField::new(&gens)?;
        let s = PlaceSet::for_field(&field, &s)?;
        let bundle = ideals::stick_ideal(&field, &s, AnnConfig::default())?;
        let idx = ideals::index_report(&field, &bundle)?;
        let closed = ideals::stick_closed_biquadratic(&field, &bundle.bt)?;
        println!("{field}, S = {s}");
        println!("  Stick hnf {:?}", bundle.stick.hnf());
        println!("  equals closed form: {}", bundle.stick == closed);
        println!(
            "  (S:R) = {}, (Stick S : Stick) = {}",
            idx.s_over_r, idx.stick_s_over_stick
        );
        println!(
            "  (R : Stick) = {}, predicted |K2| = {}",
            idx.r_over_stick, idx.k2_predicted
        );
    }
    Ok(())
}
