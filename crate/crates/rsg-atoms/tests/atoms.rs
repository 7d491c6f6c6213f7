use rsg_atoms::{AtomTree, GroupOracle, Infinite};

#[test]
fn free_ball_sizes() {
    let o = GroupOracle::free(2);
    let b = rsg_atoms::Ball::new(&o, 8, 1 << 20).unwrap();
    for n in 0..=8 {
        assert_eq!(b.size_of(n), 2 * 3usize.pow(n as u32) - 1);
    }
}

#[test]
fn z2_ball_sizes() {
    let o = GroupOracle::zn(2);
    let b = rsg_atoms::Ball::new(&o, 10, 1 << 20).unwrap();
    for n in 0..=10 {
        assert_eq!(b.size_of(n), 2 * n * n + 2 * n + 1);
    }
}

#[test]
fn z2_atom_counts() {
    let o = GroupOracle::zn(2);
    let t = AtomTree::build(&o, 5, 6).unwrap();
    for n in 1..=5 {
        let inf = t.infinite_at(n);
        assert_eq!(inf.len(), 8 * n, "level {n}");
        if n < 5 {
            let three = inf.iter().filter(|&&a| t.atoms[a].children.len() == 3).count();
            assert_eq!(three, 4, "level {n}");
        }
        assert!(inf.iter().all(|&a| t.atoms[a].infinite == Infinite::Certified));
    }
}

#[test]
fn free_atoms_are_cones() {
    let o = GroupOracle::free(2);
    let t = AtomTree::build(&o, 5, 3).unwrap();
    for n in 1..=5 {
        let inf = t.infinite_at(n);
        assert_eq!(inf.len(), 4 * 3usize.pow(n as u32 - 1));
        for &a in &inf {
            assert_eq!(t.atoms[a].infinite, Infinite::Certified);
            assert_eq!(t.least_witness(a).len(), n);
        }
    }
}
