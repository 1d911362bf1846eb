//! Brute-force oracles shared by the integration tests. None of these go
//! through the library's own algorithms.

#![allow(dead_code)]

use dimer_expansion::lattice::{TorusLattice, Vertex};
use num_bigint::BigUint;

/// Calls `visit` with every set partition of `0..n`, as block lists.
pub fn for_each_set_partition(n: usize, visit: &mut impl FnMut(&[Vec<usize>])) {
    fn rec(
        i: usize,
        n: usize,
        blocks: &mut Vec<Vec<usize>>,
        visit: &mut impl FnMut(&[Vec<usize>]),
    ) {
        if i == n {
            visit(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, visit);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, visit);
        blocks.pop();
    }
    rec(0, n, &mut Vec::new(), visit);
}

/// Partitions of an `n`-set into blocks of exactly `size` elements.
pub fn count_uniform_partitions(n: usize, size: usize) -> u64 {
    let mut count = 0;
    for_each_set_partition(n, &mut |blocks| {
        if blocks.iter().all(|b| b.len() == size) {
            count += 1;
        }
    });
    count
}

/// Connected weight of a graph as the logarithm over the partition
/// lattice: a block contributes 1 exactly when it spans no edge.
pub fn ursell_by_partitions(n: usize, edges: &[(usize, usize)]) -> i64 {
    let mut total = 0i64;
    for_each_set_partition(n, &mut |blocks| {
        let independent = blocks.iter().all(|b| {
            edges
                .iter()
                .all(|&(x, y)| !(b.contains(&x) && b.contains(&y)))
        });
        if independent {
            let k = blocks.len() as i64;
            let fact: i64 = (1..k).product();
            total += if k % 2 == 1 { fact } else { -fact };
        }
    });
    total
}

/// All labelled simple graphs on `n` vertices as edge lists.
pub fn all_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

/// Perfect matchings of the torus multigraph by listing every pairing of
/// the vertices and multiplying edge multiplicities.
pub fn matchings_by_pairings(lattice: &TorusLattice) -> BigUint {
    fn rec(lattice: &TorusLattice, rest: &[usize], acc: u64, total: &mut BigUint) {
        let Some(&a) = rest.first() else {
            *total += acc;
            return;
        };
        for k in 1..rest.len() {
            let b = rest[k];
            let m = lattice.dimer_multiplicity(Vertex(a), Vertex(b)) as u64;
            if m == 0 {
                continue;
            }
            let next: Vec<usize> = rest.iter().copied().filter(|&x| x != a && x != b).collect();
            rec(lattice, &next, acc * m, total);
        }
    }
    let mut total = BigUint::from(0u32);
    rec(
        lattice,
        &(0..lattice.num_vertices()).collect::<Vec<_>>(),
        1,
        &mut total,
    );
    total
}
