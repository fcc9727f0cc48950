//! Input families shared by several criteria.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;
use vcgrp_core::freiman::{gap_realize, GapSpec};
use vcgrp_core::linalg::Matrix;
use vcgrp_core::{Element, GSet, Group, Result};

use crate::oracles::Set;

pub fn to_set(s: &GSet) -> Set {
    s.iter().collect()
}

pub fn subset_from_mask(g: &Arc<Group>, mask: u64) -> GSet {
    GSet::new(g, (0..g.order()).filter(|i| mask >> i & 1 == 1)).expect("mask fits the group")
}

/// `a`, `a + d`, …; the caller keeps it from wrapping.
pub fn progression(g: &Arc<Group>, start: Element, step: Element, len: usize) -> Result<GSet> {
    let mut cur = start;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(cur);
        cur = g.op(cur, step);
    }
    GSet::new(g, out)
}

/// A `c × n` matrix over `F_p` of rank `c`.
pub fn full_rank_matrix<R: Rng + ?Sized>(p: usize, c: usize, n: usize, rng: &mut R) -> Matrix {
    loop {
        let m = Matrix::random(p as u64, c, n, rng);
        if m.rank() == c {
            return m;
        }
    }
}

fn coords_u64(g: &Group, x: Element) -> Vec<u64> {
    g.coords(x).expect("vector space").into_iter().map(|c| c as u64).collect()
}

/// Union of the cosets `{x : Mx = v}` over `values` (given as indices of
/// `F_p^c`).
pub fn kernel_cosets(g: &Arc<Group>, m: &Matrix, values: &[usize]) -> Result<GSet> {
    let (p, _) = g.require_vector_space()?;
    let code = |v: Vec<u64>| v.iter().rev().fold(0usize, |acc, &d| acc * p + d as usize);
    Ok(GSet::from_predicate(g, |x| values.contains(&code(m.apply(&coords_u64(g, x))))))
}

/// `count` distinct cosets of a random subspace of codimension `codim`.
pub fn random_coset_union<R: Rng + ?Sized>(g: &Arc<Group>, codim: usize, count: usize, rng: &mut R) -> Result<GSet> {
    let (p, n) = g.require_vector_space()?;
    let m = full_rank_matrix(p, codim, n as usize, rng);
    let cosets = p.pow(codim as u32);
    let values: Vec<usize> = rand::seq::index::sample(rng, cosets, count.min(cosets)).into_vec();
    kernel_cosets(g, &m, &values)
}

/// `{Σ c_i v_i}` over `F_p`.
pub fn span(g: &Group, p: usize, basis: &[Vec<usize>]) -> Result<Set> {
    let mut out: Set = [g.identity()].into();
    for v in basis {
        let x = g.from_coords(v)?;
        let mut next = Set::new();
        for &s in &out {
            let mut cur = s;
            for _ in 0..p {
                next.insert(cur);
                cur = g.op(cur, x);
            }
        }
        out = next;
    }
    Ok(out)
}

pub fn random_element<R: Rng + ?Sized>(g: &Group, rng: &mut R) -> Element {
    rng.random_range(0..g.order())
}

/// A GAP with random base and generators, realized in `g`.
pub fn random_gap<R: Rng + ?Sized>(g: &Arc<Group>, dims: usize, max_len: usize, rng: &mut R) -> Result<GSet> {
    let spec = GapSpec {
        base: random_element(g, rng),
        generators: (0..dims).map(|_| random_element(g, rng)).collect(),
        lengths: (0..dims).map(|_| rng.random_range(2..=max_len.max(2))).collect(),
    };
    Ok(gap_realize(&spec, g, false)?.set)
}

/// One cell of the almost-period grid.
#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub group: &'static str,
    pub family: &'static str,
    #[serde(skip)]
    pub set: GSet,
}

/// Three groups × three set shapes. In `Z/p` a "subspace union" is a union
/// of three translates of a short interval; in `(Z/2)^9` a progression is
/// the binary image of an integer interval and a GAP is an affine subspace.
pub fn period_grid() -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for (name, p) in [("Z/401", 401usize), ("Z/1009", 1009)] {
        let g = Group::cyclic(p)?;
        let quarter = p / 4;
        let sixteenth = p / 16;
        let third = p / 3;
        cells.push(Cell {
            group: name,
            family: "ap",
            set: progression(&g, 0, 1, quarter)?,
        });
        cells.push(Cell {
            group: name,
            family: "subspace_union",
            set: GSet::new(&g, (0..3).flat_map(|i| (0..sixteenth).map(move |j| i * third + j)))?,
        });
        let spec = GapSpec {
            base: 0,
            generators: vec![1, p / 8],
            lengths: vec![p / 40, 4],
        };
        cells.push(Cell {
            group: name,
            family: "gap",
            set: gap_realize(&spec, &g, false)?.set,
        });
    }
    let g = Group::vector_space(2, 9)?;
    cells.push(Cell {
        group: "(Z/2)^9",
        family: "ap",
        set: GSet::new(&g, 37..187)?,
    });
    // Cosets of {x : x₀ = x₁ = x₂ = 0} through 0, e₀ and e₀ + e₁.
    cells.push(Cell {
        group: "(Z/2)^9",
        family: "subspace_union",
        set: GSet::from_predicate(&g, |x| [0, 1, 3].contains(&(x & 7))),
    });
    let e = |i: usize| 1usize << i;
    let spec = GapSpec {
        base: e(8) | e(2),
        generators: vec![e(0) | e(5), e(1), e(2) | e(3), e(4) | e(7), e(6)],
        lengths: vec![2; 5],
    };
    cells.push(Cell {
        group: "(Z/2)^9",
        family: "gap",
        set: gap_realize(&spec, &g, false)?.set,
    });
    Ok(cells)
}

/// A structured set in a small vector space: coset, coset union or GAP image.
#[derive(Clone, Debug, Serialize)]
pub struct Structured {
    pub group: String,
    pub kind: &'static str,
    #[serde(skip)]
    pub set: GSet,
}

pub fn structured_instances<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Result<Vec<Structured>> {
    let spaces: Vec<(usize, u32)> = (6..=10).map(|n| (2, n)).chain((4..=6).map(|n| (3, n))).collect();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let &(p, n) = spaces.choose(rng).expect("non-empty");
        let g = Group::vector_space(p, n)?;
        let kind = ["coset", "coset_union", "gap"][i % 3];
        let set = match kind {
            "coset" => random_coset_union(&g, rng.random_range(1..n as usize), 1, rng)?,
            "coset_union" => {
                let codim = rng.random_range(2..=3);
                random_coset_union(&g, codim, rng.random_range(2..=4), rng)?
            }
            _ => random_gap(&g, rng.random_range(2..=4), p, rng)?,
        };
        out.push(Structured {
            group: format!("(Z/{p})^{n}"),
            kind,
            set,
        });
    }
    Ok(out)
}

/// `G × Z/k` with `(x, i) ↦ x + |G|·i`, built so that the embedding
/// `x ↦ (x, i)` is a homomorphism on the first factor.
pub fn extend_by_cyclic(g: &Arc<Group>, k: usize) -> Result<Arc<Group>> {
    if let Some(moduli) = g.moduli() {
        let mut m = moduli.to_vec();
        m.push(k);
        return Group::product(&m);
    }
    let n = g.order();
    let table = (0..n * k)
        .map(|u| (0..n * k).map(|v| g.op(u % n, v % n) + n * ((u / n + v / n) % k)).collect())
        .collect();
    Group::from_table(table)
}

/// Multiplication table of the quaternion group, elements `±1, ±i, ±j, ±k`.
pub fn quaternion() -> Result<Arc<Group>> {
    // (sign, unit) with units 1, i, j, k; index = 2·unit + sign.
    let mul = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, u) | (u, 0) => (0, u),
            (x, y) if x == y => (1, 0),
            (1, 2) => (0, 3),
            (2, 1) => (1, 3),
            (2, 3) => (0, 1),
            (3, 2) => (1, 1),
            (3, 1) => (0, 2),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    let table = (0..8)
        .map(|x: usize| {
            (0..8)
                .map(|y: usize| {
                    let (s, u) = mul(x / 2, y / 2);
                    2 * u + ((x % 2 + y % 2 + s) % 2)
                })
                .collect()
        })
        .collect();
    Group::from_table(table)
}
