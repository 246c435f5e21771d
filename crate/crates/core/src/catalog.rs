//! Small named examples and exhaustive enumerations used by the checks.

use crate::ucspace::{sierpinski, topology_encode, FinCategory, Universe, UCSpace};
use crate::ufcore::FinSet;

/// The walking arrow `u → v`.
pub fn c2() -> FinCategory {
    FinCategory::new("C2", FinSet::new("O", ["u", "v"]).expect("labels"), &[("f", "u", "v")], &[])
        .expect("C2 is a category")
}

/// The terminal category.
pub fn terminal_category() -> FinCategory {
    FinCategory::new("1", FinSet::singleton(), &[], &[]).expect("terminal category")
}

/// Two parallel arrows `u ⇉ v`.
pub fn parallel_pair() -> FinCategory {
    FinCategory::new(
        "Par",
        FinSet::new("O", ["u", "v"]).expect("labels"),
        &[("f", "u", "v"), ("g", "u", "v")],
        &[],
    )
    .expect("parallel pair is a category")
}

/// Every partial order on `{0, …, n-1}`, as categories.
pub fn posets(n: usize) -> Vec<FinCategory> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|(x, y)| x != y)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let leq = |x: usize, y: usize| x == y || pairs.iter().position(|&p| p == (x, y)).is_some_and(|b| mask >> b & 1 == 1);
        let antisymmetric = pairs.iter().all(|&(x, y)| !(leq(x, y) && leq(y, x)));
        let transitive = (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| !(leq(x, y) && leq(y, z)) || leq(x, z))));
        if antisymmetric && transitive {
            let name = format!("P{n}#{mask}");
            out.push(FinCategory::poset(&name, FinSet::range("P", n), leq).expect("partial order"));
        }
    }
    out
}

/// The encoded Sierpiński space.
pub fn sierpinski_space(universe: &Universe) -> UCSpace {
    topology_encode(&sierpinski(), universe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_counts() {
        // labelled partial orders: 1, 1, 3, 19
        let counts: Vec<usize> = (0..=3).map(|n| posets(n).len()).collect();
        assert_eq!(counts, [1, 1, 3, 19]);
        assert!(posets(3).iter().all(|p| p.validate().is_ok() && p.is_poset()));
    }
}
