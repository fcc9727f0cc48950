//! Brute-force references. These use only the group law, coordinates and
//! plain collections, never the library's set algebra or search code.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use vcgrp_core::{Element, Group};

pub type Set = BTreeSet<Element>;

/// `{a b⁻¹ : a ∈ A, b ∈ B}`.
pub fn quotient(g: &Group, a: &Set, b: &Set) -> Set {
    a.iter().flat_map(|&x| b.iter().map(move |&y| g.div(x, y))).collect()
}

pub fn sumset(g: &Group, a: &Set, b: &Set) -> Set {
    a.iter().flat_map(|&x| b.iter().map(move |&y| g.op(x, y))).collect()
}

pub fn left_translate(g: &Group, x: Element, b: &Set) -> Set {
    b.iter().map(|&y| g.op(x, y)).collect()
}

/// Whether every subset of `x` is cut out by some member of `family`.
pub fn shatters(family: &[Set], x: &[Element]) -> bool {
    let traces: BTreeSet<Vec<bool>> = family
        .iter()
        .map(|m| x.iter().map(|e| m.contains(e)).collect())
        .collect();
    traces.len() == 1 << x.len()
}

/// Largest shattered subset of `ground`, trying subsets size by size. A
/// shattered set's subsets are shattered, so the first empty size stops.
pub fn vc_dimension(ground: &Set, family: &[Set]) -> usize {
    let elems: Vec<Element> = ground.iter().copied().collect();
    let mut best = 0;
    for k in 1..=elems.len() {
        if family.len() < 1 << k {
            break;
        }
        let mut found = false;
        for_each_combination(elems.len(), k, |idx| {
            let x: Vec<Element> = idx.iter().map(|&i| elems[i]).collect();
            if shatters(family, &x) {
                found = true;
                return true;
            }
            false
        });
        if !found {
            break;
        }
        best = k;
    }
    best
}

/// Calls `f` on every k-subset of `0..n` until it returns true.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return;
        }
        // Rightmost index that can still move.
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `vcd(A, B)`: traces `A ∩ xB` for `x ∈ A B⁻¹`.
pub fn vcd(g: &Group, a: &Set, b: &Set) -> usize {
    let family: Vec<Set> = quotient(g, a, b)
        .into_iter()
        .map(|x| left_translate(g, x, b).intersection(a).copied().collect())
        .collect();
    vc_dimension(a, &family)
}

/// `vcdr(A, B)`: traces `A ∩ Bx` for `x ∈ B⁻¹A`.
pub fn vcdr(g: &Group, a: &Set, b: &Set) -> usize {
    let shifts: Set = b
        .iter()
        .flat_map(|&y| a.iter().map(move |&x| g.op(g.inv(y), x)))
        .collect();
    let family: Vec<Set> = shifts
        .into_iter()
        .map(|x| {
            b.iter()
                .map(|&y| g.op(y, x))
                .filter(|z| a.contains(z))
                .collect()
        })
        .collect();
    vc_dimension(a, &family)
}

/// `vcd(G, A)`: traces of all translates `xA` on `G`.
pub fn vcd_global(g: &Group, a: &Set) -> usize {
    let family: Vec<Set> = g.elements().map(|x| left_translate(g, x, a)).collect();
    vc_dimension(&g.elements().collect(), &family)
}

pub fn is_subgroup(g: &Group, h: &Set) -> bool {
    h.contains(&g.identity()) && h.iter().all(|&x| h.iter().all(|&y| h.contains(&g.div(x, y))))
}

/// `A` is a left coset iff `a⁻¹A` is a subgroup for some (any) `a ∈ A`.
pub fn is_coset(g: &Group, a: &Set) -> bool {
    let Some(&first) = a.iter().next() else {
        return false;
    };
    is_subgroup(g, &left_translate(g, g.inv(first), a))
}

/// A subgroup of `F_p^n` closed under scalars is a subspace; for prime `p`
/// every subgroup is, but the scalars are checked anyway.
pub fn is_subspace(g: &Group, h: &Set, p: usize) -> bool {
    is_subgroup(g, h) && h.iter().all(|&x| (2..p).all(|c| h.contains(&g.pow(x, c))))
}

/// `|A ∩ xB|` for every `x`.
pub fn trace_counts(g: &Group, a: &Set, b: &Set) -> Vec<i64> {
    g.elements()
        .map(|x| b.iter().filter(|&&y| a.contains(&g.op(x, y))).count() as i64)
        .collect()
}

/// `max_x | |A ∩ txB| − |A ∩ xB| | ≤ ε |A|` with `ε = num/den`.
pub fn is_almost_period(g: &Group, counts: &[i64], a_len: usize, t: Element, num: i64, den: i64) -> bool {
    let worst = g
        .elements()
        .map(|x| (counts[g.op(t, x)] - counts[x]).abs())
        .max()
        .unwrap_or(0);
    worst as i128 * den as i128 <= num as i128 * a_len as i128
}

/// `Σ_x f(x) conj(γ(x))`, with characters built from coordinates.
pub fn dft(g: &Group, f: &[Complex64]) -> Vec<Complex64> {
    let moduli = g.moduli().expect("abelian").to_vec();
    let coords: Vec<Vec<usize>> = g.elements().map(|x| g.coords(x).unwrap()).collect();
    coords
        .iter()
        .map(|gamma| {
            coords
                .iter()
                .zip(f)
                .map(|(x, &v)| {
                    let turns: f64 = gamma
                        .iter()
                        .zip(x)
                        .zip(&moduli)
                        .map(|((&j, &xi), &m)| ((j * xi) % m) as f64 / m as f64)
                        .sum();
                    v * Complex64::from_polar(1.0, -std::f64::consts::TAU * turns)
                })
                .sum()
        })
        .collect()
}

/// Indices of `y + z` for `z` in index order, built factor by factor from
/// coordinate offset tables.
pub fn shifted_indices(g: &Group, y: Element) -> Vec<usize> {
    let moduli = g.moduli().expect("abelian");
    let cy = g.coords(y).unwrap();
    let mut out = vec![0usize];
    let mut stride = 1;
    for (&m, &c) in moduli.iter().zip(&cy) {
        let mut next = Vec::with_capacity(out.len() * m);
        for z in 0..m {
            let off = (c + z) % m * stride;
            next.extend(out.iter().map(|&b| b + off));
        }
        out = next;
        stride *= m;
    }
    out
}

/// `(f * h)(x) = Σ_y f(y) h(x − y)` on an abelian group.
pub fn convolve<T>(g: &Group, f: &[T], h: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Mul<Output = T> + std::ops::AddAssign + PartialEq,
{
    let mut out = vec![T::default(); g.order()];
    for (y, &fy) in f.iter().enumerate() {
        if fy == T::default() {
            continue;
        }
        for (&x, &hz) in shifted_indices(g, y).iter().zip(h) {
            out[x] += fy * hz;
        }
    }
    out
}

/// `|γ(x) − 1| = 2|sin(π θ)|` for the phase θ of `γ` at `x`, from coordinates.
pub fn char_distance(g: &Group, gamma: Element, x: Element) -> f64 {
    let moduli = g.moduli().expect("abelian");
    let (cg, cx) = (g.coords(gamma).unwrap(), g.coords(x).unwrap());
    let mut turns = 0.0;
    for ((&j, &xi), &m) in cg.iter().zip(&cx).zip(moduli) {
        turns += ((j * xi) % m) as f64 / m as f64;
    }
    2.0 * (std::f64::consts::PI * turns.fract()).sin().abs()
}

/// Elements on which every frequency is trivial.
pub fn annihilator(g: &Group, freqs: &[Element]) -> Set {
    let moduli = g.moduli().expect("abelian");
    g.elements()
        .filter(|&x| {
            let cx = g.coords(x).unwrap();
            freqs.iter().all(|&gamma| {
                let cg = g.coords(gamma).unwrap();
                // Σ j_i x_i / m_i must be an integer.
                let l = g.exponent();
                cg.iter()
                    .zip(&cx)
                    .zip(moduli)
                    .map(|((&j, &xi), &m)| (j * xi % m) * (l / m))
                    .sum::<usize>()
                    % l
                    == 0
            })
        })
        .collect()
}

/// Checks `(1 − 12d|τ|)|B| ≤ |B_{(1+τ)ρ}| ≤ (1 + 12d|τ|)|B|` on `|τ| ≤ 1/12d`
/// at every jump of the size function and just below it, in floating point
/// with slack `tol`. Returns the first failing `τ`.
pub fn regularity_violation(g: &Group, freqs: &[Element], radius: f64, tol: f64) -> Option<f64> {
    let d = freqs.len();
    if d == 0 || radius == 0.0 {
        return None;
    }
    let width = |x: Element| freqs.iter().map(|&gm| char_distance(g, gm, x)).fold(0.0, f64::max);
    let mut widths: Vec<f64> = g.elements().map(width).collect();
    widths.sort_by(f64::total_cmp);
    let size_at = |r: f64| widths.partition_point(|&w| w <= r) as f64;
    let base = size_at(radius);
    let window = 1.0 / (12.0 * d as f64);
    let c = 12.0 * d as f64;
    let mut taus = vec![-window, window, 0.0];
    for &w in &widths {
        let tau = w / radius - 1.0;
        if tau.abs() <= window {
            taus.push(tau);
        }
    }
    for tau in taus {
        for (t, r) in [(tau, radius * (1.0 + tau)), (tau, radius * (1.0 + tau) * (1.0 - 1e-13))] {
            let s = size_at(r);
            let (lo, hi) = ((1.0 - c * t.abs()) * base, (1.0 + c * t.abs()) * base);
            if s < lo - tol * base || s > hi + tol * base {
                return Some(t);
            }
        }
    }
    None
}

/// `x₁⋯x_s = y₁⋯y_s ⇔ φ(x₁)⋯φ(x_s) = φ(y₁)⋯φ(y_s)` over all s-multisets of
/// an abelian domain.
pub fn is_s_isomorphism(src: &Group, dst: &Group, pairs: &[(Element, Element)], s: usize) -> bool {
    let mut sums: HashMap<Element, Element> = HashMap::new();
    let mut images: HashMap<Element, Element> = HashMap::new();
    let mut ok = true;
    multisets(pairs.len(), s, &mut Vec::new(), 0, &mut |idx| {
        let x = idx.iter().fold(src.identity(), |acc, &i| src.op(acc, pairs[i].0));
        let y = idx.iter().fold(dst.identity(), |acc, &i| dst.op(acc, pairs[i].1));
        if *sums.entry(x).or_insert(y) != y || *images.entry(y).or_insert(x) != x {
            ok = false;
        }
        ok
    });
    ok
}

fn multisets(n: usize, s: usize, cur: &mut Vec<usize>, from: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if cur.len() == s {
        return f(cur);
    }
    for i in from..n {
        cur.push(i);
        let go = multisets(n, s, cur, i, f);
        cur.pop();
        if !go {
            return false;
        }
    }
    true
}

/// `(φ_A, φ_B)` respects `a₁b₁⁻¹ = a₂b₂⁻¹` in both directions.
pub fn is_2_isomorphism_pair(src: &Group, dst: &Group, phi_a: &[(Element, Element)], phi_b: &[(Element, Element)]) -> bool {
    let quads: Vec<(Element, Element)> = phi_a
        .iter()
        .flat_map(|&(a, fa)| phi_b.iter().map(move |&(b, fb)| (src.div(a, b), dst.div(fa, fb))))
        .collect();
    quads
        .iter()
        .all(|&(q1, f1)| quads.iter().all(|&(q2, f2)| (q1 == q2) == (f1 == f2)))
}

/// Some `a₁..a_k, b₁..b_k` with `a_i b_j ∈ A ⇔ i ≤ j`, by trying all tuples.
pub fn has_order_property(g: &Group, a: &Set, k: usize) -> bool {
    let n = g.order();
    let tuples: Vec<Vec<Element>> = (0..n.pow(k as u32))
        .map(|mut c| {
            (0..k)
                .map(|_| {
                    let d = c % n;
                    c /= n;
                    d
                })
                .collect()
        })
        .collect();
    tuples.iter().any(|xs| {
        tuples.iter().any(|ys| {
            xs.iter()
                .enumerate()
                .all(|(i, &x)| ys.iter().enumerate().all(|(j, &y)| a.contains(&g.op(x, y)) == (i <= j)))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_complete() {
        let mut seen = 0;
        for_each_combination(6, 3, |_| {
            seen += 1;
            false
        });
        assert_eq!(seen, 20);
        let mut seen = 0;
        for_each_combination(4, 4, |_| {
            seen += 1;
            false
        });
        assert_eq!(seen, 1);
    }

    #[test]
    fn small_references() {
        let z10 = Group::cyclic(10).unwrap();
        let ap: Set = [0, 1, 2, 3].into();
        assert_eq!(vcd(&z10, &ap, &ap), 2);
        assert!(is_coset(&z10, &[1, 3, 5, 7, 9].into()));
        assert!(!is_coset(&z10, &[1, 2].into()));
        assert_eq!(annihilator(&z10, &[5]), [0, 2, 4, 6, 8].into());
        assert!(has_order_property(&z10, &ap, 3));
    }
}
