//! The annihilator of W2(E) built from the generators sigma_q - q^2, with its stopping certificate.

use hstick::fields::MultiQuadField;
use hstick::group_ring::ExpTwoGroup;
use hstick::ideals::{self, AnnConfig};
use hstick::lattice::IntegerLattice;
use hstick::serial::fmt_rational;

fn main() -> hstick::Result<()> {
    for spec in ["5", "3,7", "2,5", "2,3,5"] {
        let field = MultiQuadField::parse(spec)?;
        let g: ExpTwoGroup = field.group();
        let ann = ideals::ann_w2_generators(&field, AnnConfig::default())?;
        let r = IntegerLattice::standard(g.order());
        let diag: Vec<String> = ideals::character_diagonal(&ann.lattice, g)
            .iter()
            .map(fmt_rational)
            .collect();
        println!(
            "{field}: w2 = {}, (R : Ann) = {}, Ann S diagonal [{}], stable after q = {} ({} primes)",
            field.w2(),
            ann.lattice.index_in(&r)?,
            diag.join(", "),
            ann.certificate.last_change_prime,
            ann.certificate.primes_used
        );
    }
    Ok(())
}
