//! Cayley-table groups: ingestion, validation and the basic element
//! arithmetic everything else builds on.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::{ElemSet, MAX_ELEMS};
use crate::error::{Error, Result};

/// Orders up to this bound get a full `n³` associativity check; above it a
/// sample of `10·n²` triples is checked instead.
pub const FULL_ASSOC_CHECK_MAX: usize = 64;

/// Default cap on permutation-generator closure.
pub const DEFAULT_MAX_ORDER: usize = 5040;

/// A finite group given by its multiplication table. Index 0 is the identity.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u16>,
    inverse: Vec<usize>,
    labels: Vec<String>,
    implicit_only: bool,
}

/// Cayley-table input format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CayleyJson {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

/// Permutation-generator input format. Each generator lists the images of
/// `0..degree`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PermutationJson {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

/// Partition of the group into conjugacy classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClassDecomposition {
    /// Classes ordered by smallest member; each class sorted. The identity
    /// class `{0}` comes first.
    pub classes: Vec<Vec<usize>>,
    /// `class_of[x]` is the index of the class containing `x`.
    pub class_of: Vec<usize>,
}

impl ConjugacyClassDecomposition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn class_sets(&self) -> Vec<ElemSet> {
        self.classes
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n)
            .map(|i| char::from(b'a' + i as u8).to_string())
            .collect()
    } else {
        (0..n).map(|i| format!("g{i}")).collect()
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major table (`table[i][j] = i·j`).
    pub fn from_table(name: impl Into<String>, table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Malformed("empty table".into()));
        }
        if n > u16::MAX as usize {
            return Err(Error::TooLarge {
                got: n,
                max: u16::MAX as usize,
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::Malformed(format!("entry {v} out of range in row {i}")));
                }
                flat.push(v as u16);
            }
        }
        Self::from_flat(name.into(), n, flat)
    }

    /// Builds a group of order `n` from a product function on indices.
    pub fn from_fn(
        name: impl Into<String>,
        n: usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut flat = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = mul(i, j);
                if v >= n {
                    return Err(Error::Malformed(format!("product {i}*{j} = {v} out of range")));
                }
                flat.push(v as u16);
            }
        }
        Self::from_flat(name.into(), n, flat)
    }

    fn from_flat(name: String, n: usize, table: Vec<u16>) -> Result<Self> {
        for j in 0..n {
            if table[j] as usize != j || table[j * n] as usize != j {
                return Err(Error::IdentityNotFirst(format!(
                    "row/column 0 is not the identity at position {j}"
                )));
            }
        }
        let mut seen = vec![0u32; n];
        for i in 0..n {
            let stamp = i as u32 + 1;
            for j in 0..n {
                let v = table[i * n + j] as usize;
                if seen[v] == stamp {
                    return Err(Error::NotLatinSquare(format!("row {i} repeats {v}")));
                }
                seen[v] = stamp;
            }
        }
        seen.iter_mut().for_each(|s| *s = 0);
        for j in 0..n {
            let stamp = j as u32 + 1;
            for i in 0..n {
                let v = table[i * n + j] as usize;
                if seen[v] == stamp {
                    return Err(Error::NotLatinSquare(format!("column {j} repeats {v}")));
                }
                seen[v] = stamp;
            }
        }
        let mul = |a: usize, b: usize| table[a * n + b] as usize;
        if n <= FULL_ASSOC_CHECK_MAX {
            for a in 0..n {
                for b in 0..n {
                    let ab = mul(a, b);
                    for c in 0..n {
                        if mul(ab, c) != mul(a, mul(b, c)) {
                            return Err(Error::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..10 * n * n {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                    return Err(Error::NotAssociative(a, b, c));
                }
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| mul(a, b) == 0).expect("latin square row has 0");
        }
        Ok(FiniteGroup {
            name,
            order: n,
            table,
            inverse,
            labels: default_labels(n),
            implicit_only: false,
        })
    }

    /// Closes a set of permutations of `0..degree` under composition.
    ///
    /// Elements are ordered identity first, then by image sequence in
    /// lexicographic order. The product is composition `(p·q)(x) = p(q(x))`.
    pub fn from_permutations(
        name: impl Into<String>,
        degree: usize,
        generators: &[Vec<usize>],
        max_order: usize,
    ) -> Result<Self> {
        for (k, g) in generators.iter().enumerate() {
            if g.len() != degree {
                return Err(Error::Malformed(format!(
                    "generator {k} has {} images, expected {degree}",
                    g.len()
                )));
            }
            let distinct: BTreeSet<_> = g.iter().copied().collect();
            if distinct.len() != degree || g.iter().any(|&x| x >= degree) {
                return Err(Error::Malformed(format!("generator {k} is not a permutation")));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&x| p[x]).collect() };
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(identity.clone());
        let mut queue = VecDeque::from([identity.clone()]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q = compose(g, &p);
                if !seen.contains(&q) {
                    if seen.len() >= max_order {
                        return Err(Error::OrderCapExceeded(max_order));
                    }
                    seen.insert(q.clone());
                    queue.push_back(q);
                }
            }
        }
        // identity is lexicographically smallest, so BTreeSet order is canonical
        let elems: Vec<Vec<usize>> = seen.into_iter().collect();
        Self::from_elements(name, &elems, |p, q| compose(p, q))
    }

    /// Builds a group from an explicit ordered list of elements (identity
    /// first) and a multiplication on them.
    pub fn from_elements<T: Clone + Eq + std::hash::Hash>(
        name: impl Into<String>,
        elems: &[T],
        mul: impl Fn(&T, &T) -> T,
    ) -> Result<Self> {
        let index: HashMap<&T, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        if index.len() != elems.len() {
            return Err(Error::Malformed("duplicate elements".into()));
        }
        let n = elems.len();
        let mut flat = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                let c = mul(a, b);
                let k = *index
                    .get(&c)
                    .ok_or_else(|| Error::Malformed("element set not closed".into()))?;
                flat.push(k as u16);
            }
        }
        Self::from_flat(name.into(), n, flat)
    }

    pub fn from_cayley_json(j: &CayleyJson) -> Result<Self> {
        if j.order != j.table.len() {
            return Err(Error::Malformed(format!(
                "order {} does not match table size {}",
                j.order,
                j.table.len()
            )));
        }
        Self::from_table(j.name.clone(), &j.table)
    }

    pub fn from_permutation_json(j: &PermutationJson, max_order: usize) -> Result<Self> {
        Self::from_permutations(j.name.clone(), j.degree, &j.generators, max_order)
    }

    /// Parses either JSON input format, told apart by their keys.
    pub fn from_json_str(s: &str, max_order: usize) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        if v.get("table").is_some() {
            let j: CayleyJson =
                serde_json::from_value(v).map_err(|e| Error::Malformed(e.to_string()))?;
            Self::from_cayley_json(&j)
        } else if v.get("generators").is_some() {
            let j: PermutationJson =
                serde_json::from_value(v).map_err(|e| Error::Malformed(e.to_string()))?;
            Self::from_permutation_json(&j, max_order)
        } else {
            Err(Error::Malformed(
                "expected a \"table\" or \"generators\" key".into(),
            ))
        }
    }

    pub fn to_cayley_json(&self) -> CayleyJson {
        CayleyJson {
            name: self.name.clone(),
            order: self.order,
            table: (0..self.order)
                .map(|i| (0..self.order).map(|j| self.mul(i, j)).collect())
                .collect(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order);
        self.labels = labels;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn mark_implicit_only(mut self) -> Self {
        self.implicit_only = true;
        self
    }

    /// Catalog groups that are only ever handled through the implicit
    /// lattice view.
    pub fn implicit_only(&self) -> bool {
        self.implicit_only
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Looks an element up by label or by decimal index.
    pub fn element_by_label(&self, s: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == s)
            .or_else(|| s.parse::<usize>().ok().filter(|&i| i < self.order))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `a ▷ b = a·b·a⁻¹`.
    #[inline]
    pub fn conj(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inverse[a])
    }

    #[inline]
    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.commute(a, b)))
    }

    /// Orbits of the conjugation action.
    pub fn conjugacy_classes(&self) -> ConjugacyClassDecomposition {
        let n = self.order;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members: Vec<usize> = (0..n).map(|g| self.conj(g, x)).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(members);
        }
        ConjugacyClassDecomposition { classes, class_of }
    }

    /// Fails unless every element index fits an [`ElemSet`].
    pub fn require_small(&self) -> Result<()> {
        if self.order > MAX_ELEMS {
            Err(Error::TooLarge {
                got: self.order,
                max: MAX_ELEMS,
            })
        } else {
            Ok(())
        }
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.order)
    }
}
