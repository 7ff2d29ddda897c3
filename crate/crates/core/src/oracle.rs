//! Direct group-theoretic computations.
//!
//! Nothing here looks at a subrack lattice; these are the ground truth that
//! every lattice-derived answer is compared against.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::group::{default_labels, FiniteGroup};

/// A subgroup, recorded by its member set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subgroup {
    pub members: ElemSet,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }
}

/// Nilpotence class, or the lack of one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nilpotence {
    Class(usize),
    NotNilpotent,
}

/// `G/N` together with the projection `G → G/N`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// `projection[g]` is the coset index of `g`; cosets are numbered by
    /// their smallest member, so `N` itself is coset 0.
    pub projection: Vec<usize>,
    /// Cosets as member sets of `G`, in coset-index order.
    pub cosets: Vec<ElemSet>,
}

pub fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Distinct prime divisors, ascending.
pub fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `(p^k, k)` for the exact power of `p` dividing `n`.
pub fn p_part(n: usize, p: usize) -> (usize, u32) {
    let (mut pk, mut k, mut m) = (1, 0, n);
    while m % p == 0 {
        m /= p;
        pk *= p;
        k += 1;
    }
    (pk, k)
}

/// Group-theoretic queries over one group, with the subgroup list cached.
pub struct Oracle<'g> {
    g: &'g FiniteGroup,
    subgroups: OnceLock<Vec<Subgroup>>,
}

impl<'g> Oracle<'g> {
    pub fn new(g: &'g FiniteGroup) -> Result<Self> {
        g.require_small()?;
        Ok(Oracle {
            g,
            subgroups: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &'g FiniteGroup {
        self.g
    }

    pub fn center(&self) -> ElemSet {
        self.centralizer(self.g.all())
    }

    /// Elements commuting with every member of `s`.
    pub fn centralizer(&self, s: ElemSet) -> ElemSet {
        (0..self.g.order())
            .filter(|&x| s.iter().all(|y| self.g.commute(x, y)))
            .collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.g.element_order(a)
    }

    pub fn subgroup_generated(&self, s: ElemSet) -> Subgroup {
        let mut members = ElemSet::singleton(0) | s;
        let mut frontier: Vec<usize> = members.iter().collect();
        while let Some(x) = frontier.pop() {
            for y in members.iter().collect::<Vec<_>>() {
                for z in [self.g.mul(x, y), self.g.mul(y, x)] {
                    if members.insert(z) {
                        frontier.push(z);
                    }
                }
            }
        }
        Subgroup { members }
    }

    pub fn is_subgroup(&self, s: ElemSet) -> bool {
        s.contains(0)
            && s.iter()
                .all(|x| s.iter().all(|y| s.contains(self.g.mul(x, y))))
    }

    pub fn is_normal(&self, h: ElemSet) -> bool {
        self.is_subgroup(h)
            && (0..self.g.order()).all(|g| h.iter().all(|x| h.contains(self.g.conj(g, x))))
    }

    /// All subgroups, sorted. Built upward from cyclic subgroups: every
    /// subgroup is a join of cyclic ones.
    pub fn subgroups(&self) -> &[Subgroup] {
        self.subgroups.get_or_init(|| {
            let n = self.g.order();
            let mut cyclic: Vec<ElemSet> = (0..n)
                .map(|a| self.subgroup_generated(ElemSet::singleton(a)).members)
                .collect();
            cyclic.sort();
            cyclic.dedup();
            let mut all: std::collections::BTreeSet<ElemSet> = cyclic.iter().copied().collect();
            let mut frontier: Vec<ElemSet> = cyclic.clone();
            while let Some(h) = frontier.pop() {
                for &c in &cyclic {
                    if c.is_subset(h) {
                        continue;
                    }
                    let j = self.subgroup_generated(h | c).members;
                    if all.insert(j) {
                        frontier.push(j);
                    }
                }
            }
            all.into_iter().map(|members| Subgroup { members }).collect()
        })
    }

    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        self.subgroups()
            .iter()
            .filter(|h| self.is_normal(h.members))
            .copied()
            .collect()
    }

    pub fn maximal_subgroups(&self) -> Vec<Subgroup> {
        let all = self.g.all();
        let proper: Vec<ElemSet> = self
            .subgroups()
            .iter()
            .map(|h| h.members)
            .filter(|&h| h != all)
            .collect();
        maximal_sets(&proper)
            .into_iter()
            .map(|members| Subgroup { members })
            .collect()
    }

    /// `Z_0 = 1 < Z_1 = Z(G) < ...` up to and including the first repeat.
    pub fn upper_central_series(&self) -> Vec<ElemSet> {
        let n = self.g.order();
        let mut series = vec![ElemSet::singleton(0)];
        loop {
            let cur = *series.last().unwrap();
            let next: ElemSet = (0..n)
                .filter(|&x| {
                    (0..n).all(|y| {
                        let comm = self.g.mul(
                            self.g.mul(x, y),
                            self.g.mul(self.g.inv(x), self.g.inv(y)),
                        );
                        cur.contains(comm)
                    })
                })
                .collect();
            if next == cur {
                return series;
            }
            series.push(next);
        }
    }

    pub fn hypercenter(&self) -> ElemSet {
        *self.upper_central_series().last().unwrap()
    }

    pub fn nilpotence(&self) -> Nilpotence {
        let series = self.upper_central_series();
        if *series.last().unwrap() == self.g.all() {
            Nilpotence::Class(series.len() - 1)
        } else {
            Nilpotence::NotNilpotent
        }
    }

    /// `G/N`, cosets relabeled by smallest member.
    pub fn quotient_group(&self, n: ElemSet) -> Result<Quotient> {
        if !self.is_normal(n) {
            return Err(Error::NotNormal);
        }
        quotient_by_normal(self.g, n)
    }

    pub fn sylow_subgroup(&self, p: usize) -> Result<Subgroup> {
        let (pk, _) = self.check_prime(p)?;
        Ok(*self
            .subgroups()
            .iter()
            .find(|h| h.order() == pk)
            .expect("Sylow's theorem"))
    }

    /// Whether some normal subgroup has order `|G|/p^k`; such a subgroup
    /// meets every Sylow `p`-subgroup trivially.
    pub fn has_normal_p_complement(&self, p: usize) -> Result<bool> {
        let (pk, _) = self.check_prime(p)?;
        let target = self.g.order() / pk;
        Ok(self
            .subgroups()
            .iter()
            .any(|h| h.order() == target && self.is_normal(h.members)))
    }

    fn check_prime(&self, p: usize) -> Result<(usize, u32)> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !self.g.order().is_multiple_of(p) {
            return Err(Error::PrimeNotDivisor {
                p,
                order: self.g.order(),
            });
        }
        Ok(p_part(self.g.order(), p))
    }

    fn is_abelian_set(&self, s: ElemSet) -> bool {
        s.iter().all(|x| s.iter().all(|y| self.g.commute(x, y)))
    }

    pub fn maximal_abelian_subgroups(&self) -> Vec<Subgroup> {
        let abelian: Vec<ElemSet> = self
            .subgroups()
            .iter()
            .map(|h| h.members)
            .filter(|&h| self.is_abelian_set(h))
            .collect();
        maximal_sets(&abelian)
            .into_iter()
            .map(|members| Subgroup { members })
            .collect()
    }

    pub fn maximal_normal_abelian_subgroups(&self) -> Vec<Subgroup> {
        let sets: Vec<ElemSet> = self
            .normal_subgroups()
            .iter()
            .map(|h| h.members)
            .filter(|&h| self.is_abelian_set(h))
            .collect();
        maximal_sets(&sets)
            .into_iter()
            .map(|members| Subgroup { members })
            .collect()
    }

    /// Cycle decomposition of `x ↦ a x a⁻¹`, as member sets of the cycles.
    pub fn inner_cycles(&self, a: usize) -> Vec<ElemSet> {
        let n = self.g.order();
        let mut seen = ElemSet::EMPTY;
        let mut out = Vec::new();
        for x in 0..n {
            if seen.contains(x) {
                continue;
            }
            let mut cyc = ElemSet::EMPTY;
            let mut y = x;
            while cyc.insert(y) {
                y = self.g.conj(a, y);
            }
            seen |= cyc;
            out.push(cyc);
        }
        out
    }

    /// Bundles the headline oracle values for one group.
    pub fn report(&self) -> OracleReport {
        let g = self.g;
        let classes = g.conjugacy_classes();
        let primes = prime_divisors(g.order());
        OracleReport {
            name: g.name().to_string(),
            order: g.order(),
            class_sizes: classes.sizes(),
            center: self.center(),
            upper_central_series: self.upper_central_series(),
            nilpotence: self.nilpotence(),
            maximal_subgroups: self.maximal_subgroups().iter().map(|h| h.members).collect(),
            maximal_abelian_subgroups: self
                .maximal_abelian_subgroups()
                .iter()
                .map(|h| h.members)
                .collect(),
            maximal_normal_abelian_subgroups: self
                .maximal_normal_abelian_subgroups()
                .iter()
                .map(|h| h.members)
                .collect(),
            normal_p_complement: primes
                .iter()
                .map(|&p| (p, self.has_normal_p_complement(p).unwrap()))
                .collect(),
        }
    }
}

/// Summary of the oracle values of a group.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub order: usize,
    pub class_sizes: Vec<usize>,
    pub center: ElemSet,
    pub upper_central_series: Vec<ElemSet>,
    pub nilpotence: Nilpotence,
    pub maximal_subgroups: Vec<ElemSet>,
    pub maximal_abelian_subgroups: Vec<ElemSet>,
    pub maximal_normal_abelian_subgroups: Vec<ElemSet>,
    pub normal_p_complement: Vec<(usize, bool)>,
}

/// Convenience wrapper: the oracle report of `g`.
pub fn oracle_suite(g: &FiniteGroup) -> Result<OracleReport> {
    Ok(Oracle::new(g)?.report())
}

/// `G/N` for a subgroup already known to be normal.
pub(crate) fn quotient_by_normal(g: &FiniteGroup, n: ElemSet) -> Result<Quotient> {
    let order = g.order();
    let mut projection = vec![usize::MAX; order];
    let mut cosets = Vec::new();
    let mut reps = Vec::new();
    for x in 0..order {
        if projection[x] != usize::MAX {
            continue;
        }
        let coset: ElemSet = n.iter().map(|m| g.mul(x, m)).collect();
        for y in coset {
            projection[y] = cosets.len();
        }
        cosets.push(coset);
        reps.push(x);
    }
    let k = cosets.len();
    let group = FiniteGroup::from_fn(format!("{}/N{}", g.name(), n.len()), k, |i, j| {
        projection[g.mul(reps[i], reps[j])]
    })?
    .with_labels(default_labels(k));
    Ok(Quotient {
        group,
        projection,
        cosets,
    })
}

/// Inclusion-maximal members of a family, sorted.
pub fn maximal_sets(family: &[ElemSet]) -> Vec<ElemSet> {
    let mut out: Vec<ElemSet> = family
        .iter()
        .copied()
        .filter(|&s| !family.iter().any(|&t| t != s && s.is_subset(t)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Inclusion-minimal members of a family, sorted.
pub fn minimal_sets(family: &[ElemSet]) -> Vec<ElemSet> {
    let mut out: Vec<ElemSet> = family
        .iter()
        .copied()
        .filter(|&s| !family.iter().any(|&t| t != s && t.is_subset(s)))
        .collect();
    out.sort();
    out.dedup();
    out
}
