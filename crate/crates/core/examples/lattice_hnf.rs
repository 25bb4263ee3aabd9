//! Hermite normal forms, sums, intersections and indices of lattices in Q^n.

use hstick::lattice::IntegerLattice;

fn main() -> hstick::Result<()> {
    let a = IntegerLattice::from_integers(3, &[vec![2, 4, 6], vec![0, 3, 9], vec![1, 1, 1]])?;
    let b = IntegerLattice::from_integers(3, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]])?;
    println!("A hnf {:?}", a.hnf());
    println!("B hnf {:?}", b.hnf());

    let sum = a.sum(&b)?;
    let meet = a.intersect(&b)?;
    println!("A + B hnf {:?}", sum.hnf());
    println!("A ∩ B hnf {:?}", meet.hnf());
    println!("(Z^3 : A) = {}", a.index_in(&IntegerLattice::standard(3))?);
    println!("(A + B : A ∩ B) = {}", meet.index_in(&sum)?);
    println!("A vs B: {:?}", a.compare(&b)?);
    Ok(())
}
