//! Functoriality: projecting Stick to quadratic quotients and embedding relative ideals.

use hstick::fields::{MultiQuadField, PlaceSet};
use hstick::ideals::{self, AnnConfig};

fn main() -> hstick::Result<()> {
    let field = MultiQuadField::parse("3,7")?;
    let s = PlaceSet::for_field(&field, &[2, 3, 7])?;
    let cfg = AnnConfig::default();
    let bundle = ideals::stick_ideal(&field, &s, cfg)?;

    for p in ideals::projection_check(&field, &s, &bundle, cfg)? {
        println!(
            "project to Q(√{}): {}",
            p.d,
            if p.equal { "equal" } else { "DIFFERENT" }
        );
    }
    for b in ideals::base_change_check(&field, &s, &bundle, cfg)? {
        println!(
            "relative over Q(√{}): integral {}, contained in Stick {}",
            b.d, b.integral, b.contained
        );
    }
    Ok(())
}
