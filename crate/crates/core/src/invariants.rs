//! Invariants read off a subrack lattice with the atoms treated as opaque
//! labels.
//!
//! The M-set conditions quantify over the whole lattice. They are checked
//! through single-atom extensions instead:
//!
//! * "every `T > S` lies above `cl(S)`" holds iff `cl(S) ≤ S ∨ x` for each
//!   atom `x ≰ S`, because every such `T` lies above some `S ∨ x`;
//! * "every `T ≥ cl(S)` is closed" holds iff `cl(x) ≤ cl(S) ∨ x` for each
//!   atom `x`, because a `T` containing all those joins is a union of
//!   closures of atoms.
//!
//! The first condition also forces `S` to be a coatom of `[∅, cl(S)]`, so
//! the implicit search only looks at those.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::lattice::{LatticeMode, SubrackLattice, INTERVAL_RACK_CAP};
use crate::oracle::maximal_sets;

/// Class size → number of classes of that size.
pub type ClassSizeFrequency = BTreeMap<usize, usize>;

pub fn class_size_frequency(l: &SubrackLattice) -> ClassSizeFrequency {
    let n = l.size();
    let mut w = BTreeMap::new();
    for c in l.coatoms() {
        *w.entry(n - c.len()).or_insert(0) += 1;
    }
    w
}

/// `x` and `y` commute iff their join holds no atoms besides them.
pub fn atoms_commute(x: usize, y: usize, l: &SubrackLattice) -> bool {
    let j = l.join(ElemSet::singleton(x), ElemSet::singleton(y));
    j.len() == if x == y { 1 } else { 2 }
}

/// `rel[x]` is the set of atoms commuting with `x`.
pub fn commuting_relation(l: &SubrackLattice) -> Vec<ElemSet> {
    let n = l.size();
    let mut rel = vec![ElemSet::EMPTY; n];
    for x in 0..n {
        rel[x].insert(x);
        for y in x + 1..n {
            if atoms_commute(x, y, l) {
                rel[x].insert(y);
                rel[y].insert(x);
            }
        }
    }
    rel
}

pub fn center_atoms(l: &SubrackLattice) -> ElemSet {
    centralizer_in(&commuting_relation(l), l.top(), l.top())
}

pub fn centralizer_atoms(s: ElemSet, l: &SubrackLattice) -> ElemSet {
    centralizer_in(&commuting_relation(l), s, l.top())
}

fn centralizer_in(rel: &[ElemSet], s: ElemSet, top: ElemSet) -> ElemSet {
    s.iter().fold(top, |acc, x| acc & rel[x])
}

/// Either the abelian signal or a family of lattice elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianFamily {
    /// The whole lattice is Boolean, so the group is abelian.
    pub abelian: bool,
    pub sets: Vec<ElemSet>,
}

/// Maximal cliques of the commuting relation, i.e. the maximal `A` with
/// `[∅, A]` Boolean.
pub fn maximal_abelian_a(l: &SubrackLattice) -> Result<AbelianFamily> {
    let rel = commuting_relation(l);
    if l.is_boolean_interval(l.top()) {
        return Ok(AbelianFamily {
            abelian: true,
            sets: vec![l.top()],
        });
    }
    let nbrs: Vec<ElemSet> = rel.iter().enumerate().map(|(x, &r)| r.without(x)).collect();
    let mut cliques = Vec::new();
    bron_kerbosch(&nbrs, ElemSet::EMPTY, l.top(), ElemSet::EMPTY, &mut cliques);
    for &c in &cliques {
        if !l.is_element(c) {
            return Err(Error::Internal(format!("commuting clique {c:?} is not a subrack")));
        }
    }
    cliques.sort_unstable();
    Ok(AbelianFamily {
        abelian: false,
        sets: cliques,
    })
}

fn bron_kerbosch(nbrs: &[ElemSet], r: ElemSet, mut p: ElemSet, mut x: ElemSet, out: &mut Vec<ElemSet>) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = (p | x)
        .iter()
        .max_by_key(|&u| (nbrs[u] & p).len())
        .expect("p ∪ x nonempty");
    for v in p - nbrs[pivot] {
        bron_kerbosch(nbrs, r.with(v), p & nbrs[v], x & nbrs[v], out);
        p.remove(v);
        x.insert(v);
    }
}

/// For each `A ∈ A(G)` the atoms whose closure stays inside `A`; the
/// inclusion-maximal results.
pub fn maximal_normal_abelian_n(l: &SubrackLattice) -> Result<AbelianFamily> {
    let a = maximal_abelian_a(l)?;
    if a.abelian {
        return Ok(a);
    }
    let cores: Vec<ElemSet> = a.sets.iter().map(|&s| class_core(l, s)).collect();
    let mut sets = maximal_sets(&cores);
    sets.sort_unstable();
    Ok(AbelianFamily {
        abelian: false,
        sets,
    })
}

/// Union of the closed atoms-closures inside `s`.
pub fn class_core(l: &SubrackLattice, s: ElemSet) -> ElemSet {
    s.iter()
        .filter(|&x| l.closure_unchecked(ElemSet::singleton(x)).is_subset(s))
        .collect()
}

pub fn has_noncentral_abelian_normal(l: &SubrackLattice) -> Result<bool> {
    let n = maximal_normal_abelian_n(l)?;
    if n.abelian {
        return Ok(false);
    }
    let z = center_atoms(l);
    Ok(n.sets.iter().any(|&s| z.is_subset(s) && s != z))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSet {
    pub members: Vec<ElemSet>,
    /// Closures `cl(S)` whose interval was too large to test for
    /// Booleanness; candidates below them are left out of `members`.
    pub undecided: Vec<ElemSet>,
}

/// M-set, dispatched on the lattice mode.
pub fn m_set(l: &SubrackLattice) -> Result<MSet> {
    match l.mode() {
        LatticeMode::Explicit => m_set_explicit(l),
        LatticeMode::Implicit => m_set_implicit(l),
    }
}

/// Every proper `T ⊇ k` is closed.
fn upper_closed(l: &SubrackLattice, k: ElemSet) -> bool {
    (0..l.size()).all(|x| {
        let cx = l.closure_unchecked(ElemSet::singleton(x));
        cx.is_subset(l.join(k, ElemSet::singleton(x)))
    })
}

/// Every `T ⊋ s` contains `k`.
fn covers_reach(l: &SubrackLattice, s: ElemSet, k: ElemSet) -> bool {
    (l.top() - s)
        .iter()
        .all(|x| k.is_subset(l.join(s, ElemSet::singleton(x))))
}

fn int_is_boolean(coatoms: &[ElemSet], top: ElemSet) -> bool {
    let mut seen = std::collections::HashSet::from([top]);
    for &c in coatoms {
        let next: Vec<ElemSet> = seen.iter().map(|&x| x & c).collect();
        seen.extend(next);
    }
    coatoms.len() < 64 && seen.len() as u128 == 1u128 << coatoms.len()
}

/// Checks each closed `K` and the coatoms of `[∅, K]` whose closure is `K`.
pub fn m_set_implicit(l: &SubrackLattice) -> Result<MSet> {
    let top = l.top();
    let closed: Vec<ElemSet> = l
        .int_poset()
        .elements
        .into_iter()
        .filter(|&k| k != top && !k.is_empty())
        .collect();
    let results: Vec<Result<(Vec<ElemSet>, Option<ElemSet>)>> = closed
        .par_iter()
        .map(|&k| {
            // A Boolean interval has a Boolean Int.
            if l.is_boolean_interval(k) || !upper_closed(l, k) {
                return Ok((vec![], None));
            }
            if k.len() > INTERVAL_RACK_CAP {
                return Ok((vec![], Some(k)));
            }
            let sub = l.restricted_lattice(k)?;
            if sub.int_poset().is_boolean {
                return Ok((vec![], None));
            }
            let found = sub
                .coatoms()
                .iter()
                .map(|&c| sub.lift(c))
                .filter(|&s| l.closure_unchecked(s) == k && covers_reach(l, s, k))
                .collect();
            Ok((found, None))
        })
        .collect();
    let mut out = MSet::default();
    for r in results {
        let (found, undecided) = r?;
        out.members.extend(found);
        out.undecided.extend(undecided);
    }
    out.members.sort_unstable();
    out.undecided.sort_unstable();
    Ok(out)
}

/// Loops over every element with the single-atom reformulations.
pub fn m_set_explicit(l: &SubrackLattice) -> Result<MSet> {
    let elements = l.elements()?;
    let int_not_boolean = |k: ElemSet| -> bool {
        let below: Vec<ElemSet> = elements.iter().copied().filter(|e| e.is_subset(k)).collect();
        let coatoms: Vec<ElemSet> = below
            .iter()
            .copied()
            .filter(|&s| s != k && (k - s).iter().all(|x| l.join(s, ElemSet::singleton(x)) == k))
            .collect();
        !int_is_boolean(&coatoms, k)
    };
    let mut by_closure: BTreeMap<ElemSet, Vec<ElemSet>> = BTreeMap::new();
    for &s in elements {
        let k = l.closure_unchecked(s);
        if k != s {
            by_closure.entry(k).or_default().push(s);
        }
    }
    let results: Vec<Vec<ElemSet>> = by_closure
        .par_iter()
        .map(|(&k, cands)| {
            if !upper_closed(l, k) {
                return vec![];
            }
            let hits: Vec<ElemSet> = cands.iter().copied().filter(|&s| covers_reach(l, s, k)).collect();
            if hits.is_empty() || !int_not_boolean(k) {
                return vec![];
            }
            hits
        })
        .collect();
    let mut members: Vec<ElemSet> = results.into_iter().flatten().collect();
    members.sort_unstable();
    Ok(MSet {
        members,
        undecided: vec![],
    })
}

/// The four conditions quantified over all lattice elements as written.
/// Quadratic in the element count; for tests.
pub fn m_set_literal(l: &SubrackLattice) -> Result<MSet> {
    let elements = l.elements()?;
    let closed = |t: ElemSet| l.closure_unchecked(t) == t;
    let mut members = Vec::new();
    for &s in elements {
        let k = l.closure_unchecked(s);
        if closed(s) {
            continue;
        }
        let c2 = elements
            .iter()
            .filter(|&&t| s.is_subset(t) && !k.is_subset(t))
            .all(|&t| t == s);
        let c3 = elements
            .iter()
            .filter(|&&t| k.is_subset(t))
            .all(|&t| closed(t));
        if !(c2 && c3) {
            continue;
        }
        let sub = l.interval(ElemSet::EMPTY, k)?;
        if !sub.int_poset().is_boolean {
            members.push(s);
        }
    }
    Ok(MSet {
        members,
        undecided: vec![],
    })
}

/// All lattice invariants of one lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub w: ClassSizeFrequency,
    pub center: ElemSet,
    #[serde(rename = "A")]
    pub a: Vec<ElemSet>,
    #[serde(rename = "N")]
    pub n: Vec<ElemSet>,
    #[serde(rename = "M")]
    pub m: Vec<ElemSet>,
    pub noncentral_abelian_normal: bool,
    pub abelian: bool,
    #[serde(rename = "M_undecided")]
    pub m_undecided: Vec<ElemSet>,
}

pub fn invariant_report(l: &SubrackLattice) -> Result<InvariantReport> {
    let a = maximal_abelian_a(l)?;
    let n = maximal_normal_abelian_n(l)?;
    let m = m_set(l)?;
    Ok(InvariantReport {
        w: class_size_frequency(l),
        center: center_atoms(l),
        a: a.sets,
        n: n.sets,
        m: m.members,
        noncentral_abelian_normal: has_noncentral_abelian_normal(l)?,
        abelian: a.abelian,
        m_undecided: m.undecided,
    })
}
