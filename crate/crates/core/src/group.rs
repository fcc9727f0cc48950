//! Finite groups with canonical element indexing.
//!
//! Elements are indices in `0..order`. Abelian groups given as a product of
//! cyclic factors use the mixed-radix bijection between an index and its
//! coordinates, least-significant factor first. Table groups carry an
//! explicit multiplication table and may be non-abelian.
//!
//! For abelian kinds the dual group is indexed the same way: the dual element
//! with coordinates `(j_1, ..., j_k)` is the character
//! `x -> exp(2πi Σ j_i x_i / m_i)`.

use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical index of a group element.
pub type Element = usize;

/// Canonical index of a character; coordinates follow the element indexing.
pub type DualElement = usize;

/// JSON-facing description of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    CyclicProduct { moduli: Vec<usize> },
    VectorSpace { p: usize, n: u32 },
    Table { table: Vec<Vec<usize>> },
}

#[derive(Debug)]
enum Structure {
    Abelian {
        moduli: Vec<usize>,
        strides: Vec<usize>,
        exponent: usize,
        all_two: bool,
    },
    Table {
        mul: Vec<u32>,
        inv: Vec<u32>,
        identity: usize,
        abelian: bool,
    },
}

#[derive(Debug)]
pub struct Group {
    spec: GroupSpec,
    order: usize,
    structure: Structure,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.order == other.order && self.spec == other.spec)
    }
}

impl Eq for Group {}

/// Exact value of a character: `exp(2πi · num / den)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

impl Phase {
    pub fn to_complex(self) -> Complex64 {
        let theta = std::f64::consts::TAU * self.num as f64 / self.den as f64;
        Complex64::new(theta.cos(), theta.sin())
    }

    /// Distance of the phase numerator from zero in `Z/den`.
    pub fn distance_from_zero(self) -> u64 {
        self.num.min(self.den - self.num)
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

const MAX_ORDER: usize = 1 << 26;

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Arc<Group>> {
        let group = match &spec {
            GroupSpec::CyclicProduct { moduli } => Self::abelian(spec.clone(), moduli.clone())?,
            GroupSpec::VectorSpace { p, n } => {
                if !is_prime(*p) {
                    return Err(Error::InvalidGroup(format!(
                        "vector space characteristic {p} is not prime"
                    )));
                }
                Self::abelian(spec.clone(), vec![*p; *n as usize])?
            }
            GroupSpec::Table { table } => Self::table(spec.clone(), table)?,
        };
        Ok(Arc::new(group))
    }

    pub fn cyclic(n: usize) -> Result<Arc<Group>> {
        Self::new(GroupSpec::CyclicProduct { moduli: vec![n] })
    }

    pub fn product(moduli: &[usize]) -> Result<Arc<Group>> {
        Self::new(GroupSpec::CyclicProduct {
            moduli: moduli.to_vec(),
        })
    }

    pub fn vector_space(p: usize, n: u32) -> Result<Arc<Group>> {
        Self::new(GroupSpec::VectorSpace { p, n })
    }

    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Arc<Group>> {
        Self::new(GroupSpec::Table { table })
    }

    /// The symmetric group on `n` points as a table group. Permutations are
    /// listed in lexicographic order, so index 0 is the identity, and the
    /// product `x·y` is the composition "apply `y`, then `x`".
    pub fn symmetric(n: usize) -> Result<Arc<Group>> {
        let perms = permutations(n);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|x| {
                perms
                    .iter()
                    .map(|y| index(&y.iter().map(|&i| x[i]).collect()))
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    /// Dihedral group of order `2n`: element `r^i s^f` has index `i + n·f`.
    pub fn dihedral(n: usize) -> Result<Arc<Group>> {
        if n < 1 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        let decode = |x: usize| (x % n, x / n);
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let (i, f) = decode(x);
                        let (j, g) = decode(y);
                        // r^i s^f r^j s^g = r^(i ± j) s^(f+g)
                        let rot = if f == 0 { (i + j) % n } else { (i + n - j) % n };
                        rot + n * ((f + g) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    fn abelian(spec: GroupSpec, moduli: Vec<usize>) -> Result<Group> {
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidGroup(format!("cyclic modulus {m} is below 2")));
        }
        let mut order: usize = 1;
        let mut strides = Vec::with_capacity(moduli.len());
        for &m in &moduli {
            strides.push(order);
            order = order
                .checked_mul(m)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::InvalidGroup(format!("group order exceeds {MAX_ORDER}")))?;
        }
        let exponent = moduli.iter().fold(1usize, |acc, &m| acc.lcm(&m));
        let all_two = moduli.iter().all(|&m| m == 2);
        Ok(Group {
            spec,
            order,
            structure: Structure::Abelian {
                moduli,
                strides,
                exponent,
                all_two,
            },
        })
    }

    fn table(spec: GroupSpec, table: &[Vec<usize>]) -> Result<Group> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        if n > 4096 {
            return Err(Error::InvalidGroup(format!("table of order {n} is too large")));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has length {} instead of {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|&v| v >= n) {
                return Err(Error::AxiomViolation {
                    axiom: "closure",
                    witness: vec![i, j],
                });
            }
        }
        let mul: Vec<u32> = table.iter().flatten().map(|&v| v as u32).collect();
        let at = |x: usize, y: usize| mul[x * n + y] as usize;

        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(Error::AxiomViolation {
                axiom: "identity",
                witness: vec![],
            })?;
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or(Error::AxiomViolation {
                    axiom: "inverse",
                    witness: vec![x],
                })?;
            inv[x] = y as u32;
        }
        for x in 0..n {
            for y in 0..n {
                let xy = at(x, y);
                for z in 0..n {
                    if at(xy, z) != at(x, at(y, z)) {
                        return Err(Error::AxiomViolation {
                            axiom: "associativity",
                            witness: vec![x, y, z],
                        });
                    }
                }
            }
        }
        let abelian = (0..n).all(|x| (0..x).all(|y| at(x, y) == at(y, x)));
        Ok(Group {
            spec,
            order: n,
            structure: Structure::Table {
                mul,
                inv,
                identity,
                abelian,
            },
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        match &self.structure {
            Structure::Abelian { .. } => true,
            Structure::Table { abelian, .. } => *abelian,
        }
    }

    /// Cyclic factors, for groups described as products of cyclic groups.
    pub fn moduli(&self) -> Option<&[usize]> {
        match &self.structure {
            Structure::Abelian { moduli, .. } => Some(moduli),
            Structure::Table { .. } => None,
        }
    }

    fn require_moduli(&self, what: &str) -> Result<&[usize]> {
        self.moduli().ok_or_else(|| {
            Error::Unsupported(format!(
                "{what} needs an abelian group given by cyclic factors"
            ))
        })
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        match &self.structure {
            Structure::Abelian { exponent, .. } => *exponent,
            Structure::Table { .. } => {
                let mut e = 1usize;
                for x in self.elements() {
                    e = e.lcm(&self.element_order(x));
                }
                e
            }
        }
    }

    pub fn element_order(&self, x: Element) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.identity() {
            y = self.op(y, x);
            k += 1;
        }
        k
    }

    /// `(p, n)` when the group was declared as the vector space `F_p^n`.
    pub fn as_vector_space(&self) -> Option<(usize, u32)> {
        match self.spec {
            GroupSpec::VectorSpace { p, n } => Some((p, n)),
            _ => None,
        }
    }

    pub fn require_vector_space(&self) -> Result<(usize, u32)> {
        self.as_vector_space().ok_or_else(|| {
            Error::Unsupported("subspace operations need a vector-space group over a prime field".into())
        })
    }

    pub fn identity(&self) -> Element {
        match &self.structure {
            Structure::Abelian { .. } => 0,
            Structure::Table { identity, .. } => *identity,
        }
    }

    #[inline]
    pub fn op(&self, x: Element, y: Element) -> Element {
        match &self.structure {
            Structure::Abelian {
                moduli,
                strides,
                all_two,
                ..
            } => {
                if *all_two {
                    return x ^ y;
                }
                if moduli.len() == 1 {
                    let s = x + y;
                    return if s >= self.order { s - self.order } else { s };
                }
                let mut out = 0;
                for (&m, &st) in moduli.iter().zip(strides) {
                    let d = (x / st) % m + (y / st) % m;
                    out += if d >= m { d - m } else { d } * st;
                }
                out
            }
            Structure::Table { mul, .. } => mul[x * self.order + y] as usize,
        }
    }

    #[inline]
    pub fn inv(&self, x: Element) -> Element {
        match &self.structure {
            Structure::Abelian {
                moduli,
                strides,
                all_two,
                ..
            } => {
                if *all_two {
                    return x;
                }
                if moduli.len() == 1 {
                    return if x == 0 { 0 } else { self.order - x };
                }
                let mut out = 0;
                for (&m, &st) in moduli.iter().zip(strides) {
                    let d = (x / st) % m;
                    out += if d == 0 { 0 } else { m - d } * st;
                }
                out
            }
            Structure::Table { inv, .. } => inv[x] as usize,
        }
    }

    /// `x · y⁻¹`.
    #[inline]
    pub fn div(&self, x: Element, y: Element) -> Element {
        self.op(x, self.inv(y))
    }

    /// `x^k` for `k >= 0`.
    pub fn pow(&self, x: Element, k: usize) -> Element {
        let mut out = self.identity();
        for _ in 0..k {
            out = self.op(out, x);
        }
        out
    }

    pub fn check(&self, x: Element) -> Result<Element> {
        if x < self.order {
            Ok(x)
        } else {
            Err(Error::OutOfRange {
                index: x,
                order: self.order,
            })
        }
    }

    pub fn checked_op(&self, x: Element, y: Element) -> Result<Element> {
        Ok(self.op(self.check(x)?, self.check(y)?))
    }

    pub fn checked_inv(&self, x: Element) -> Result<Element> {
        Ok(self.inv(self.check(x)?))
    }

    pub fn coords(&self, x: Element) -> Result<Vec<usize>> {
        let moduli = self.require_moduli("coordinates")?;
        self.check(x)?;
        let mut rest = x;
        Ok(moduli
            .iter()
            .map(|&m| {
                let d = rest % m;
                rest /= m;
                d
            })
            .collect())
    }

    pub fn from_coords(&self, coords: &[usize]) -> Result<Element> {
        let moduli = self.require_moduli("coordinates")?;
        if coords.len() != moduli.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                moduli.len(),
                coords.len()
            )));
        }
        let mut x = 0;
        let mut stride = 1;
        for (&c, &m) in coords.iter().zip(moduli) {
            if c >= m {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c} out of range for modulus {m}"
                )));
            }
            x += c * stride;
            stride *= m;
        }
        Ok(x)
    }

    /// Exact phase of the character `gamma` at `x`; the denominator is the
    /// exponent of the group.
    pub fn char_phase(&self, gamma: DualElement, x: Element) -> Result<Phase> {
        let moduli = self.require_moduli("characters")?;
        self.check(gamma)?;
        self.check(x)?;
        Ok(self.phase_unchecked(moduli, gamma, x))
    }

    fn phase_unchecked(&self, moduli: &[usize], gamma: DualElement, x: Element) -> Phase {
        let den = self.exponent() as u64;
        let (mut g, mut y) = (gamma, x);
        let mut num: u128 = 0;
        for &m in moduli {
            let (j, xi) = ((g % m) as u128, (y % m) as u128);
            g /= m;
            y /= m;
            num += j * xi % m as u128 * (den / m as u64) as u128;
        }
        Phase {
            num: (num % den as u128) as u64,
            den,
        }
    }

    pub fn char_eval(&self, gamma: DualElement, x: Element) -> Result<Complex64> {
        Ok(self.char_phase(gamma, x)?.to_complex())
    }

    /// Phases of `gamma` at every element, in index order.
    pub fn char_phases(&self, gamma: DualElement) -> Result<Vec<Phase>> {
        let moduli = self.require_moduli("characters")?;
        self.check(gamma)?;
        Ok(self
            .elements()
            .map(|x| self.phase_unchecked(moduli, gamma, x))
            .collect())
    }

    /// Product of characters corresponds to the sum of dual coordinates.
    pub fn dual_op(&self, a: DualElement, b: DualElement) -> Result<DualElement> {
        self.require_moduli("dual group")?;
        self.checked_op(a, b)
    }

    pub fn dual_identity(&self) -> DualElement {
        0
    }

    pub fn same_group(&self, other: &Group) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
