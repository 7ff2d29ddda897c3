//! Cycle forms of inner automorphisms, read off the subrack lattice of a
//! centerless group, and the p-nilpotence test built on them.
//!
//! Atoms stand for group elements. For an atom `a` the pseudo cycle form
//! groups the atoms by which sets `B(a, g)` contain them; the refined form
//! further splits blocks by fixed-point sets of atoms commuting with `a`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::invariants::{commuting_relation, m_set};
use crate::lattice::{SubrackLattice, INTERVAL_RACK_CAP};
use crate::nilpotence::{class_swap, hypercenter_quotient, power_exponent, shaped_swaps, SWAP_CANDIDATE_CAP};
use crate::oracle::{is_prime, p_part, prime_divisors};

/// How "the atom count is a multiple p^k" is read during Sylow descent.
pub const SYLOW_SIZE_READING: &str = "candidate atom count is a multiple of p^k";

/// A partition of the atoms with per-block cycle-part marks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomPartition {
    /// Sorted by smallest atom.
    pub blocks: Vec<ElemSet>,
    pub marks: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleFormJson {
    pub atom: usize,
    pub blocks: Vec<Vec<usize>>,
    pub marked: Vec<bool>,
}

impl AtomPartition {
    pub fn unmarked(mut blocks: Vec<ElemSet>) -> Self {
        blocks.sort_by_key(|b| b.first());
        let marks = vec![false; blocks.len()];
        AtomPartition { blocks, marks }
    }

    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = ElemSet::EMPTY;
        for &b in &self.blocks {
            if b.is_empty() || !b.is_disjoint(seen) {
                return false;
            }
            seen |= b;
        }
        seen == ElemSet::full(n)
    }

    /// Every block of `other` is a union of blocks of `self`.
    pub fn refines(&self, other: &AtomPartition) -> bool {
        self.blocks
            .iter()
            .all(|&b| other.blocks.iter().any(|&c| b.is_subset(c)))
    }

    pub fn same_blocks(&self, other: &AtomPartition) -> bool {
        self.blocks == other.blocks
    }

    pub fn block_of(&self, x: usize) -> Option<ElemSet> {
        self.blocks.iter().copied().find(|b| b.contains(x))
    }

    pub fn marked_blocks(&self) -> impl Iterator<Item = ElemSet> + '_ {
        self.blocks
            .iter()
            .zip(&self.marks)
            .filter(|(_, &m)| m)
            .map(|(&b, _)| b)
    }

    /// `[[a]] [[b]] [[c,d]] [e,f,g,h]`: double brackets on marked blocks.
    pub fn render(&self, labels: &[String]) -> String {
        self.blocks
            .iter()
            .zip(&self.marks)
            .map(|(b, &m)| {
                let inner: Vec<&str> = b.iter().map(|i| labels[i].as_str()).collect();
                if m {
                    format!("[[{}]]", inner.join(","))
                } else {
                    format!("[{}]", inner.join(","))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self, atom: usize) -> CycleFormJson {
        CycleFormJson {
            atom,
            blocks: self.blocks.iter().map(|b| b.to_vec()).collect(),
            marked: self.marks.clone(),
        }
    }
}

/// `p ≤ q`: `p` refines `q`.
pub fn partition_leq(p: &AtomPartition, q: &AtomPartition) -> bool {
    p.refines(q)
}

/// `B(S, T) = (S ∨ T) ∩ cl(T)`.
pub fn b_set(s: ElemSet, t: ElemSet, l: &SubrackLattice) -> Result<ElemSet> {
    if !l.is_element(s) || !l.is_element(t) {
        return Err(Error::NotSubrack);
    }
    Ok(l.join(s, t) & l.closure(t)?)
}

/// The identity atom of a centerless lattice.
pub fn identity_atom(l: &SubrackLattice) -> Result<usize> {
    let rel = commuting_relation(l);
    let z: ElemSet = (0..l.size()).filter(|&x| rel[x] == l.top()).collect();
    match (z.len(), z.first()) {
        (1, Some(e)) => Ok(e),
        _ => Err(Error::NotCenterless),
    }
}

fn split_by_signature(n: usize, signature: impl Fn(usize) -> ElemSet) -> Vec<ElemSet> {
    let mut groups: BTreeMap<ElemSet, ElemSet> = BTreeMap::new();
    for x in 0..n {
        groups.entry(signature(x)).or_default().insert(x);
    }
    groups.into_values().collect()
}

fn pairwise_commuting(b: ElemSet, rel: &[ElemSet]) -> bool {
    b.iter().all(|x| b.is_subset(rel[x]))
}

fn marks_for(blocks: &[ElemSet], rel: &[ElemSet], refined: &[ElemSet]) -> Vec<bool> {
    blocks
        .iter()
        .map(|&b| b.len() == 1 || pairwise_commuting(b, rel) || (is_prime(b.len()) && refined.contains(&b)))
        .collect()
}

fn refine(mut blocks: Vec<ElemSet>, a: usize, rel: &[ElemSet]) -> Vec<ElemSet> {
    loop {
        let mut changed = false;
        for x in rel[a].iter() {
            let fixed = rel[x];
            let mut next = Vec::with_capacity(blocks.len());
            for &p in &blocks {
                let f = p & fixed;
                if f.len() > 1 && f != p {
                    next.push(f);
                    next.push(p - f);
                    changed = true;
                } else {
                    next.push(p);
                }
            }
            blocks = next;
        }
        if !changed {
            blocks.sort_by_key(|b| b.first());
            return blocks;
        }
    }
}

/// All pseudo and refined cycle forms of a centerless lattice.
#[derive(Clone, Debug)]
pub struct CycleForms {
    identity: usize,
    commuting: Vec<ElemSet>,
    pseudo: Vec<AtomPartition>,
    refined: Vec<AtomPartition>,
}

impl CycleForms {
    pub fn compute(l: &SubrackLattice) -> Result<Self> {
        let identity = identity_atom(l)?;
        let n = l.size();
        let rel = commuting_relation(l);
        let classes: Vec<ElemSet> = (0..n)
            .map(|g| l.closure(ElemSet::singleton(g)))
            .collect::<Result<_>>()?;
        let forms: Vec<(AtomPartition, AtomPartition)> = (0..n)
            .into_par_iter()
            .map(|a| {
                let bs: Vec<ElemSet> = (0..n)
                    .map(|g| l.join(ElemSet::singleton(a), ElemSet::singleton(g)) & classes[g])
                    .collect();
                let pseudo = split_by_signature(n, |x| (0..n).filter(|&g| bs[g].contains(x)).collect());
                let refined = refine(pseudo.clone(), a, &rel);
                let mut p = AtomPartition::unmarked(pseudo);
                let mut r = AtomPartition::unmarked(refined);
                p.marks = marks_for(&p.blocks, &rel, &r.blocks);
                r.marks = marks_for(&r.blocks, &rel, &r.blocks);
                (p, r)
            })
            .collect();
        let (pseudo, refined) = forms.into_iter().unzip();
        Ok(CycleForms {
            identity,
            commuting: rel,
            pseudo,
            refined,
        })
    }

    pub fn size(&self) -> usize {
        self.pseudo.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn pseudo(&self, a: usize) -> &AtomPartition {
        &self.pseudo[a]
    }

    pub fn refined(&self, a: usize) -> &AtomPartition {
        &self.refined[a]
    }

    pub fn commuting(&self, a: usize) -> ElemSet {
        self.commuting[a]
    }

    /// Atoms whose pseudo form refines that of `a`.
    pub fn associated_abelian(&self, a: usize) -> ElemSet {
        (0..self.size())
            .filter(|&x| self.pseudo[x].refines(&self.pseudo[a]))
            .collect()
    }

    /// Pairs `a < b` with identical refined forms.
    pub fn tied_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.refined[a].same_blocks(&self.refined[b]))
            .collect()
    }
}

pub fn pseudo_cycle_form(a: usize, l: &SubrackLattice) -> Result<AtomPartition> {
    Ok(CycleForms::compute(l)?.pseudo[a].clone())
}

pub fn refine_to_cycle_form(a: usize, l: &SubrackLattice) -> Result<AtomPartition> {
    Ok(CycleForms::compute(l)?.refined[a].clone())
}

pub fn associated_abelian(a: usize, l: &SubrackLattice) -> Result<ElemSet> {
    Ok(CycleForms::compute(l)?.associated_abelian(a))
}

/// Oracle verdict on one block of `[φ_a]` built from blocks of `[φ_x]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartVerdict {
    pub part: ElemSet,
    /// Lengths of the `φ_x` cycles inside the part, deduplicated.
    pub cycle_lengths: Vec<usize>,
    /// The common length divides every `[φ_x]` block inside the part.
    pub divides_blocks: bool,
}

impl PartVerdict {
    pub fn holds(&self) -> bool {
        self.cycle_lengths.len() == 1 && self.divides_blocks
    }
}

/// Checks cycle lengths of `φ_x` against the parts of `[φ_a]` with the
/// oracle. Needs `x` in the associated abelian subgroup of `a`.
pub fn equal_cycle_length_check(x: usize, a: usize, l: &SubrackLattice, g: &FiniteGroup) -> Result<Vec<PartVerdict>> {
    let forms = CycleForms::compute(l)?;
    equal_cycle_length_with(&forms, x, a, g)
}

pub fn equal_cycle_length_with(forms: &CycleForms, x: usize, a: usize, g: &FiniteGroup) -> Result<Vec<PartVerdict>> {
    if !forms.associated_abelian(a).contains(x) {
        return Err(Error::Precondition(format!(
            "{} is not in the associated abelian subgroup of {}",
            g.label(x),
            g.label(a)
        )));
    }
    let cycles = crate::oracle::Oracle::new(g)?.inner_cycles(x);
    let fx = &forms.refined[x];
    Ok(forms.refined[a]
        .blocks
        .iter()
        .filter(|&&p| {
            let inside: ElemSet = fx.blocks.iter().filter(|b| b.is_subset(p)).fold(ElemSet::EMPTY, |u, &b| u | b);
            inside == p
        })
        .map(|&p| {
            let mut lengths: Vec<usize> = cycles.iter().filter(|c| c.is_subset(p)).map(|c| c.len()).collect();
            lengths.sort_unstable();
            lengths.dedup();
            let divides_blocks = lengths.len() == 1
                && fx
                    .blocks
                    .iter()
                    .filter(|b| b.is_subset(p))
                    .all(|b| b.len() % lengths[0] == 0);
            PartVerdict {
                part: p,
                cycle_lengths: lengths,
                divides_blocks,
            }
        })
        .collect())
}

/// How a tied pair was separated by a lattice automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapSource {
    PowerMap,
    Conjugator,
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TiedPair {
    pub a: usize,
    pub b: usize,
    pub found_by: Option<SwapSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleFormCondition {
    pub holds: bool,
    /// Order of the centerless quotient the condition was tested on.
    pub quotient_order: usize,
    pub tied_pairs: Vec<TiedPair>,
}

fn has_swap_shape(perm: &[usize], a: usize, b: usize, ka: ElemSet, kb: ElemSet) -> bool {
    let moved = ka | kb;
    perm[a] == b
        && perm[b] == a
        && ka.map(|x| perm[x]) == kb
        && kb.map(|x| perm[x]) == ka
        && (0..perm.len()).all(|x| moved.contains(x) || perm[x] == x)
}

/// `g a g⁻¹ ↦ g b g⁻¹`, if well defined on `K(a)`.
fn conjugator_map(g: &FiniteGroup, a: usize, b: usize) -> Option<HashMap<usize, usize>> {
    let mut f = HashMap::new();
    for h in 0..g.order() {
        let (x, y) = (g.conj(h, a), g.conj(h, b));
        if *f.entry(x).or_insert(y) != y {
            return None;
        }
    }
    Some(f)
}

fn find_swap(l: &SubrackLattice, g: &FiniteGroup, a: usize, b: usize, seed: u64) -> Result<Option<SwapSource>> {
    let n = l.size();
    let ka = l.closure(ElemSet::singleton(a))?;
    let kb = l.closure(ElemSet::singleton(b))?;
    let works = |perm: &[usize]| has_swap_shape(perm, a, b, ka, kb) && l.is_automorphism(perm, seed);
    if let Some(k) = power_exponent(g, a, b) {
        if let Some(perm) = class_swap(n, ka, kb, |x| g.pow(x, k)) {
            if works(&perm) {
                return Ok(Some(SwapSource::PowerMap));
            }
        }
    }
    if let Some(f) = conjugator_map(g, a, b) {
        if let Some(perm) = class_swap(n, ka, kb, |x| f[&x]) {
            if works(&perm) {
                return Ok(Some(SwapSource::Conjugator));
            }
        }
    }
    let found = shaped_swaps(l, a, b, SWAP_CANDIDATE_CAP)
        .into_par_iter()
        .any(|perm| works(&perm));
    Ok(found.then_some(SwapSource::Search))
}

/// Tests the condition on a centerless lattice.
pub fn cycle_form_condition_centerless(
    l: &SubrackLattice,
    g: &FiniteGroup,
    forms: &CycleForms,
    seed: u64,
) -> Result<CycleFormCondition> {
    let tied = forms
        .tied_pairs()
        .into_iter()
        .map(|(a, b)| {
            Ok(TiedPair {
                a,
                b,
                found_by: find_swap(l, g, a, b, seed)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CycleFormCondition {
        holds: tied.iter().all(|t| t.found_by.is_some()),
        quotient_order: l.size(),
        tied_pairs: tied,
    })
}

/// Tests the condition on the hypercenter quotient of `g`.
pub fn cycle_form_condition(l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<CycleFormCondition> {
    let (ql, qg) = hypercenter_quotient(l, g, seed)?;
    if qg.order() == 1 {
        return Ok(CycleFormCondition {
            holds: true,
            quotient_order: 1,
            tied_pairs: vec![],
        });
    }
    let forms = CycleForms::compute(&ql)?;
    cycle_form_condition_centerless(&ql, &qg, &forms, seed)
}

/// Non-identity atom → prime set.
pub type PrimeAssignment = BTreeMap<usize, Vec<usize>>;

/// How many elements of an abelian group of order `n` have order with
/// prime support exactly `support`.
fn abelian_support_counts(n: usize) -> BTreeMap<Vec<usize>, usize> {
    let primes = prime_divisors(n);
    let mut out = BTreeMap::new();
    for mask in 1u32..1 << primes.len() {
        let support: Vec<usize> = (0..primes.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
        let count = support.iter().map(|&p| p_part(n, p).0 - 1).product();
        out.insert(support, count);
    }
    out
}

/// Primes that may divide the order of `x`: every one divides a block size
/// of the refined form, and a marked block's size divides the order.
fn admissible(forms: &CycleForms, x: usize, support: &[usize]) -> bool {
    let form = &forms.refined[x];
    let from_blocks = |p: usize| form.blocks.iter().any(|b| b.len() % p == 0);
    support.iter().all(|&p| from_blocks(p))
        && form
            .marked_blocks()
            .all(|b| prime_divisors(b.len()).iter().all(|q| support.contains(q)))
}

fn assign_values(
    forms: &CycleForms,
    atoms: &[usize],
    pool: &mut BTreeMap<Vec<usize>, usize>,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    let Some((&x, rest)) = atoms.split_first() else {
        return true;
    };
    let choices: Vec<Vec<usize>> = pool.iter().filter(|(_, &c)| c > 0).map(|(s, _)| s.clone()).collect();
    for s in choices {
        if !admissible(forms, x, &s) {
            continue;
        }
        *pool.get_mut(&s).expect("listed") -= 1;
        out.push(s.clone());
        if assign_values(forms, rest, pool, out) {
            return true;
        }
        out.pop();
        *pool.get_mut(&s).expect("listed") += 1;
    }
    false
}

/// ϑ from the associated abelian subgroups, smallest first.
pub fn theta_from_forms(forms: &CycleForms) -> Result<PrimeAssignment> {
    let id = forms.identity();
    let mut groups: Vec<ElemSet> = (0..forms.size())
        .filter(|&a| a != id)
        .map(|a| forms.associated_abelian(a))
        .collect();
    groups.sort_by_key(|s| (s.len(), s.first(), *s));
    groups.dedup();
    let mut theta = PrimeAssignment::new();
    for ab in groups {
        let mut pool = abelian_support_counts(ab.len());
        let mut fresh = Vec::new();
        for x in ab.without(id) {
            match theta.get(&x) {
                Some(s) => match pool.get_mut(s) {
                    Some(c) if *c > 0 => *c -= 1,
                    _ => {
                        return Err(Error::Internal(format!(
                            "prime sets inside an abelian subrack of size {} overflow",
                            ab.len()
                        )))
                    }
                },
                None => fresh.push(x),
            }
        }
        let mut values = Vec::new();
        if !assign_values(forms, &fresh, &mut pool, &mut values) {
            return Err(Error::Internal(format!(
                "no consistent prime sets for an abelian subrack of size {}",
                ab.len()
            )));
        }
        theta.extend(fresh.into_iter().zip(values));
    }
    Ok(theta)
}

/// ϑ on a centerless lattice, refused unless the cycle form condition
/// holds.
pub fn theta_assignment(l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<PrimeAssignment> {
    if l.size() == 1 {
        return Ok(PrimeAssignment::new());
    }
    let forms = CycleForms::compute(l)?;
    if !cycle_form_condition_centerless(l, g, &forms, seed)?.holds {
        return Err(Error::ConditionNotMet);
    }
    theta_from_forms(&forms)
}

fn prime_factor_count(mut n: usize) -> usize {
    let mut k = 0;
    for p in prime_divisors(n) {
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
    }
    k
}

/// A subrack standing for a Sylow `p`-subgroup, in atoms of `l`.
pub fn locate_sylow_subrack(p: usize, theta: &PrimeAssignment, l: &SubrackLattice) -> Result<ElemSet> {
    let n = l.size();
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !n.is_multiple_of(p) {
        return Err(Error::PrimeNotDivisor { p, order: n });
    }
    let id = identity_atom(l)?;
    let pk = p_part(n, p).0;
    let p_atoms: ElemSet = (0..n)
        .filter(|&x| x == id || theta.get(&x).is_some_and(|s| s[..] == [p]))
        .collect();
    if p_atoms.len() == pk {
        return Ok(p_atoms);
    }
    let mut skipped = None;
    match descend(l, pk, p_atoms, prime_factor_count(n), &mut skipped)? {
        Some(s) => Ok(s),
        None => Err(match skipped {
            Some(got) => Error::IntervalTooLarge {
                got,
                cap: INTERVAL_RACK_CAP,
            },
            None => Error::Internal(format!("no Sylow {p}-subrack found")),
        }),
    }
}

fn descend(
    lat: &SubrackLattice,
    pk: usize,
    p_atoms: ElemSet,
    depth: usize,
    skipped: &mut Option<usize>,
) -> Result<Option<ElemSet>> {
    if depth == 0 {
        return Ok(None);
    }
    let m = m_set(lat)?;
    if let Some(k) = m.undecided.first() {
        skipped.get_or_insert(k.len());
    }
    let mut cands: Vec<ElemSet> = m
        .members
        .into_iter()
        .map(|s| lat.lift(s))
        .filter(|s| s.len() % pk == 0)
        .collect();
    cands.sort_by_key(|s| (std::cmp::Reverse(s.len()), *s));
    for s in cands {
        let inside = s & p_atoms;
        if inside.len() == pk {
            return Ok(Some(inside));
        }
        let sub = lat.restricted_lattice(lat.lower(s))?;
        if let Some(found) = descend(&sub, pk, p_atoms, depth - 1, skipped)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Result of the p-nilpotence pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PNilpotence {
    pub p: usize,
    /// `None` when the cycle form condition fails.
    pub verdict: Option<bool>,
    pub quotient_order: usize,
    /// Sylow subrack, in atoms of the quotient.
    pub sylow: Option<ElemSet>,
    pub theta: Option<PrimeAssignment>,
}

/// Whether `G` has a normal `p`-complement, from the lattice.
///
/// Works on the hypercenter quotient. Each class of the Sylow subrack `P`
/// (closure inside `[∅, P]`) is compared with the quotient class of the
/// same atom cut down to `P`.
pub fn p_nilpotent_from_lattice(p: usize, l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<PNilpotence> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !g.order().is_multiple_of(p) {
        return Err(Error::PrimeNotDivisor { p, order: g.order() });
    }
    let (ql, qg) = hypercenter_quotient(l, g, seed)?;
    let mut out = PNilpotence {
        p,
        verdict: Some(true),
        quotient_order: qg.order(),
        sylow: None,
        theta: None,
    };
    if qg.order() % p != 0 {
        return Ok(out);
    }
    let forms = CycleForms::compute(&ql)?;
    if !cycle_form_condition_centerless(&ql, &qg, &forms, seed)?.holds {
        out.verdict = None;
        return Ok(out);
    }
    let theta = theta_from_forms(&forms)?;
    let sylow = locate_sylow_subrack(p, &theta, &ql)?;
    let inner = ql.restricted_lattice(sylow)?;
    let mut controls_fusion = true;
    for x in 0..inner.size() {
        let in_p = inner.lift(inner.closure(ElemSet::singleton(x))?);
        let root = inner.lift(ElemSet::singleton(x));
        if in_p != ql.closure(root)? & sylow {
            controls_fusion = false;
            break;
        }
    }
    out.verdict = Some(controls_fusion);
    out.sylow = Some(sylow);
    out.theta = Some(theta);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::oracle::Oracle;

    fn s3() -> (FiniteGroup, SubrackLattice) {
        let g = catalog("S3").unwrap();
        let l = SubrackLattice::explicit(&g).unwrap();
        (g, l)
    }

    fn set(g: &FiniteGroup, labels: &str) -> ElemSet {
        labels
            .chars()
            .map(|c| g.element_by_label(&c.to_string()).unwrap())
            .collect()
    }

    fn at(g: &FiniteGroup, label: &str) -> usize {
        g.element_by_label(label).unwrap()
    }

    /// Centerless catalog groups and the centerless quotients reached from
    /// the rest of the catalog up to order 24.
    fn centerless() -> Vec<(FiniteGroup, SubrackLattice)> {
        ["S3", "D5", "A4", "S4"]
            .iter()
            .map(|n| {
                let g = catalog(n).unwrap();
                let l = SubrackLattice::explicit(&g).unwrap();
                (g, l)
            })
            .collect()
    }

    #[test]
    fn s3_b_sets() {
        let (g, l) = s3();
        let b = |s: &str, t: &str| b_set(set(&g, s), set(&g, t), &l).unwrap();
        assert_eq!(b("b", "b"), set(&g, "b"));
        assert_eq!(b("b", "c"), set(&g, "bcd"));
        assert_eq!(b("b", "d"), set(&g, "bcd"));
        assert_eq!(b("b", "e"), set(&g, "ef"));
        assert_eq!(b("b", "f"), set(&g, "ef"));
        for t in ["b", "c", "d"] {
            assert_eq!(b("e", t), set(&g, "bcd"));
            assert_eq!(b("f", t), set(&g, "bcd"));
        }
        assert_eq!(b_set(set(&g, "bc"), set(&g, "b"), &l), Err(Error::NotSubrack));
    }

    #[test]
    fn s3_pseudo_forms() {
        let (g, l) = s3();
        let forms = CycleForms::compute(&l).unwrap();
        let show = |x: &str| forms.pseudo(at(&g, x)).render(g.labels());
        assert_eq!(show("b"), "[[a]] [[b]] [[c,d]] [[e,f]]");
        assert_eq!(show("c"), "[[a]] [[b,d]] [[c]] [[e,f]]");
        assert_eq!(show("d"), "[[a]] [[b,c]] [[d]] [[e,f]]");
        assert_eq!(show("e"), "[[a]] [[b,c,d]] [[e]] [[f]]");
        assert_eq!(show("f"), "[[a]] [[b,c,d]] [[e]] [[f]]");
        assert_eq!(show("a"), "[[a]] [[b]] [[c]] [[d]] [[e]] [[f]]");
        for x in 0..6 {
            assert_eq!(forms.refined(x), forms.pseudo(x));
        }
        let j = forms.pseudo(at(&g, "b")).to_json(1);
        assert_eq!(j.blocks, vec![vec![0], vec![1], vec![2, 3], vec![4, 5]]);
        assert_eq!(j.marked, vec![true; 4]);
    }

    #[test]
    fn partition_order() {
        let (g, l) = s3();
        let forms = CycleForms::compute(&l).unwrap();
        let (b, e) = (forms.pseudo(at(&g, "b")), forms.pseudo(at(&g, "e")));
        let finest = forms.pseudo(at(&g, "a"));
        assert!(partition_leq(finest, b) && partition_leq(finest, e));
        assert!(partition_leq(e, e));
        assert!(!partition_leq(b, e));
        assert!(!partition_leq(e, b));
    }

    #[test]
    fn s3_associated_abelian() {
        let (g, l) = s3();
        let forms = CycleForms::compute(&l).unwrap();
        assert_eq!(forms.associated_abelian(at(&g, "e")), set(&g, "aef"));
        assert_eq!(forms.associated_abelian(at(&g, "b")), set(&g, "ab"));
        assert_eq!(forms.associated_abelian(at(&g, "a")), set(&g, "a"));
        assert_eq!(forms.tied_pairs(), vec![(at(&g, "e"), at(&g, "f"))]);
    }

    #[test]
    fn centered_groups_refused() {
        let g = catalog("Q8").unwrap();
        let l = SubrackLattice::explicit(&g).unwrap();
        assert_eq!(CycleForms::compute(&l).unwrap_err(), Error::NotCenterless);
    }

    #[test]
    fn equal_lengths_examples() {
        let (g, l) = s3();
        let e = at(&g, "e");
        let v = equal_cycle_length_check(e, e, &l, &g).unwrap();
        let bcd = v.iter().find(|p| p.part == set(&g, "bcd")).unwrap();
        assert_eq!(bcd.cycle_lengths, vec![3]);
        assert!(v.iter().all(PartVerdict::holds));
        let v = equal_cycle_length_check(0, e, &l, &g).unwrap();
        assert!(v.iter().all(|p| p.cycle_lengths == vec![1]));
        assert!(equal_cycle_length_check(at(&g, "b"), e, &l, &g).is_err());
    }

    #[test]
    fn condition_examples() {
        let (g, l) = s3();
        let c = cycle_form_condition(&l, &g, 1).unwrap();
        assert!(c.holds);
        assert_eq!(c.tied_pairs.len(), 1);
        for name in ["Z6", "Q8", "D4"] {
            let g = catalog(name).unwrap();
            let l = SubrackLattice::explicit(&g).unwrap();
            let c = cycle_form_condition(&l, &g, 1).unwrap();
            assert!(c.holds && c.quotient_order == 1 && c.tied_pairs.is_empty());
        }
    }

    #[test]
    fn theta_examples() {
        let (g, l) = s3();
        let theta = theta_assignment(&l, &g, 1).unwrap();
        for x in ["b", "c", "d"] {
            assert_eq!(theta[&at(&g, x)], vec![2]);
        }
        for x in ["e", "f"] {
            assert_eq!(theta[&at(&g, x)], vec![3]);
        }
        assert!(!theta.contains_key(&0));

        let g = catalog("A4").unwrap();
        let l = SubrackLattice::explicit(&g).unwrap();
        let theta = theta_assignment(&l, &g, 1).unwrap();
        for (x, s) in &theta {
            let want = if g.element_order(*x) == 2 { vec![2] } else { vec![3] };
            assert_eq!(s, &want, "{}", g.label(*x));
        }
        assert_eq!(theta.len(), 11);
    }

    #[test]
    fn sylow_examples() {
        let (g, l) = s3();
        let theta = theta_assignment(&l, &g, 1).unwrap();
        assert_eq!(locate_sylow_subrack(3, &theta, &l).unwrap(), set(&g, "aef"));
        let two = locate_sylow_subrack(2, &theta, &l).unwrap();
        assert_eq!(two.len(), 2);
        assert!(Oracle::new(&g).unwrap().is_subgroup(two));
        assert_eq!(
            locate_sylow_subrack(5, &theta, &l),
            Err(Error::PrimeNotDivisor { p: 5, order: 6 })
        );
    }

    #[test]
    fn p_nilpotence_examples() {
        let cases = [("S3", 2, true), ("S3", 3, false), ("A4", 3, true), ("A4", 2, false)];
        for (name, p, want) in cases {
            let g = catalog(name).unwrap();
            let l = SubrackLattice::explicit(&g).unwrap();
            let r = p_nilpotent_from_lattice(p, &l, &g, 3).unwrap();
            assert_eq!(r.verdict, Some(want), "{name} {p}");
        }
        let g = catalog("S3").unwrap();
        let l = SubrackLattice::explicit(&g).unwrap();
        assert_eq!(p_nilpotent_from_lattice(4, &l, &g, 0).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn forms_are_unions_of_cycles() {
        for (g, l) in centerless() {
            let forms = CycleForms::compute(&l).unwrap();
            let o = Oracle::new(&g).unwrap();
            for a in 0..g.order() {
                let cycles = o.inner_cycles(a);
                for form in [forms.pseudo(a), forms.refined(a)] {
                    assert!(form.is_partition_of(g.order()));
                    for &b in &form.blocks {
                        assert!(
                            cycles.iter().all(|c| c.is_subset(b) || c.is_disjoint(b)),
                            "{} {}",
                            g.name(),
                            g.label(a)
                        );
                    }
                    for b in form.marked_blocks() {
                        assert!(cycles.contains(&b), "{} {} marked {:?}", g.name(), g.label(a), b);
                    }
                }
            }
        }
    }

    #[test]
    fn order_monotone_and_abelian() {
        for (g, l) in centerless() {
            let forms = CycleForms::compute(&l).unwrap();
            let o = Oracle::new(&g).unwrap();
            let n = g.order();
            for u in 0..n {
                for v in 0..n {
                    if forms.pseudo(v).refines(forms.pseudo(u)) {
                        assert!(forms.refined(v).refines(forms.refined(u)), "{}", g.name());
                    }
                }
                let ab = forms.associated_abelian(u);
                assert!(ab.contains(u));
                assert!(o.is_subgroup(ab), "{} {}", g.name(), g.label(u));
                assert!(ab.iter().all(|x| ab.iter().all(|y| g.commute(x, y))));
                let zc = o.centralizer(o.centralizer(ElemSet::singleton(u)));
                let cu = o.centralizer(ElemSet::singleton(u));
                assert!(ab.is_subset(zc & cu));
                assert_eq!(ab.len() % g.element_order(u), 0);
                for x in ab {
                    let v = equal_cycle_length_with(&forms, x, u, &g).unwrap();
                    assert!(v.iter().all(PartVerdict::holds), "{} x={} a={}", g.name(), g.label(x), g.label(u));
                }
            }
        }
    }

    #[test]
    fn theta_multisets_match_orders() {
        for (g, l) in centerless() {
            let theta = theta_assignment(&l, &g, 5).unwrap();
            let mut got: Vec<Vec<usize>> = theta.values().cloned().collect();
            let mut want: Vec<Vec<usize>> = (1..g.order()).map(|x| prime_divisors(g.element_order(x))).collect();
            got.sort();
            want.sort();
            assert_eq!(got, want, "{}", g.name());
        }
    }

    #[test]
    fn p_nilpotence_matches_oracle() {
        for g in crate::catalog::catalog_up_to(24) {
            let l = SubrackLattice::explicit(&g).unwrap();
            let o = Oracle::new(&g).unwrap();
            let cond = cycle_form_condition(&l, &g, 2).unwrap();
            for p in prime_divisors(g.order()) {
                let r = p_nilpotent_from_lattice(p, &l, &g, 2).unwrap();
                if cond.holds {
                    assert_eq!(r.verdict, Some(o.has_normal_p_complement(p).unwrap()), "{} {p}", g.name());
                } else {
                    assert_eq!(r.verdict, None);
                }
            }
        }
    }
}
