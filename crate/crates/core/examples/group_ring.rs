//! Arithmetic in Q[G] for G = (Z/2)^2: products, the character transform and idempotents.

use hstick::group_ring::{CharacterIndex, ExpTwoGroup, GroupRingElem};
use hstick::serial::fmt_rational;

fn show(label: &str, a: &GroupRingElem) {
    let c: Vec<String> = a.coeffs().iter().map(fmt_rational).collect();
    let t: Vec<String> = a.character_transform().iter().map(fmt_rational).collect();
    println!(
        "{label:<10} coeffs [{}]  chi-values [{}]",
        c.join(", "),
        t.join(", ")
    );
}

fn main() -> hstick::Result<()> {
    let g = ExpTwoGroup::new(2)?;
    let a = GroupRingElem::from_ints(g, &[3, -1, 0, 2])?;
    let b = GroupRingElem::from_ints(g, &[1, 1, 1, 0])?;
    show("a", &a);
    show("b", &b);
    show("a*b", &(&a * &b));

    for chi in g.characters() {
        let e = GroupRingElem::idempotent(g, chi);
        show(&format!("e_{}", chi.0), &e);
        assert_eq!(&e * &e, e);
    }

    let chi = CharacterIndex(0b11);
    println!(
        "tau of chi_3 = {:?}, kernel = {:?}",
        chi.tau(),
        chi.kernel(g)
    );
    let projected = a.project_quotient(&chi.kernel_basis(g))?;
    show("pi(a)", &projected);
    Ok(())
}
