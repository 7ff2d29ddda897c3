//! Nilpotence class from the lattice: class-swapping automorphisms, central
//! partitions, the block-union poset `J(C)`, and iterated quotients.
//!
//! The group is consulted only to propose witnesses (the center cosets and
//! the next quotient). Every property a witness is used for is re-checked
//! through lattice queries before the iteration continues.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::invariants::center_atoms;
use crate::lattice::{
    enumerate_closure_system, enumerate_lattice, LatticeMode, ModeChoice, SubrackLattice,
    DEFAULT_CAP,
};
use crate::oracle::{Nilpotence, Oracle};
use crate::rack::Rack;

/// Upper bound on brute-force swap candidates for one pair.
pub const SWAP_CANDIDATE_CAP: usize = 50_000;

/// Block count up to which condition (ii) is checked on every subset.
pub const EXHAUSTIVE_JOIN_BLOCKS: usize = 16;

/// Random block subsets tried for condition (ii) above that.
pub const SAMPLED_JOIN_SUBSETS: usize = 1000;

/// Group order up to which every candidate partition is examined.
pub const EXHAUSTIVE_PARTITION_MAX_ORDER: usize = 12;

const PARTITION_CAP: usize = 500_000;

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// The permutation sending `x ↦ f(x)` on `ka` and back on `kb`, fixing the
/// rest. `None` unless `f` maps `ka` bijectively onto `kb` and the classes
/// are equal or disjoint.
pub fn class_swap(n: usize, ka: ElemSet, kb: ElemSet, f: impl Fn(usize) -> usize) -> Option<Vec<usize>> {
    let mut perm = identity(n);
    if ka.len() != kb.len() || (ka != kb && !ka.is_disjoint(kb)) {
        return None;
    }
    let img: ElemSet = ka.iter().map(&f).collect();
    if img != kb {
        return None;
    }
    for x in ka {
        perm[x] = f(x);
        if ka != kb {
            perm[f(x)] = x;
        }
    }
    Some(perm)
}

fn closure_of_atom(l: &SubrackLattice, x: usize) -> ElemSet {
    l.closure_unchecked(ElemSet::singleton(x))
}

/// Swap for `b = a·z` with `z` in the center located in the lattice.
pub fn central_swap(l: &SubrackLattice, g: &FiniteGroup, a: usize, b: usize, seed: u64) -> Result<Vec<usize>> {
    let z = g.mul(g.inv(a), b);
    if !center_atoms(l).contains(z) {
        return Err(Error::Precondition(format!(
            "{} and {} are not in a common central coset",
            g.label(a),
            g.label(b)
        )));
    }
    if a == b {
        return Ok(identity(g.order()));
    }
    let perm = class_swap(g.order(), closure_of_atom(l, a), closure_of_atom(l, b), |x| g.mul(x, z))
        .ok_or_else(|| Error::Internal("central translate is not a class bijection".into()))?;
    if !l.is_automorphism(&perm, seed) {
        return Err(Error::Internal(format!("central swap {a} ↔ {b} is not a lattice automorphism")));
    }
    Ok(perm)
}

/// Swap for `⟨a⟩ = ⟨b⟩`, sending `x ↦ x^k` where `b = a^k`.
pub fn power_swap(l: &SubrackLattice, g: &FiniteGroup, a: usize, b: usize, seed: u64) -> Result<Vec<usize>> {
    let k = power_exponent(g, a, b).ok_or_else(|| {
        Error::Precondition(format!("{} and {} generate different subgroups", g.label(a), g.label(b)))
    })?;
    if a == b {
        return Ok(identity(g.order()));
    }
    let perm = class_swap(g.order(), closure_of_atom(l, a), closure_of_atom(l, b), |x| g.pow(x, k))
        .ok_or_else(|| Error::Internal("power map is not a class bijection".into()))?;
    if !l.is_automorphism(&perm, seed) {
        return Err(Error::Internal(format!("power swap {a} ↔ {b} is not a lattice automorphism")));
    }
    Ok(perm)
}

/// `k` with `a^k = b`, provided `a` is also a power of `b`.
pub fn power_exponent(g: &FiniteGroup, a: usize, b: usize) -> Option<usize> {
    let o = g.element_order(a);
    if g.element_order(b) != o {
        return None;
    }
    (1..=o).find(|&k| g.pow(a, k) == b)
}

/// Every permutation of the required shape: `a ↔ b`, `K(a) ↔ K(b)` as
/// sets, identity elsewhere. At most `cap` are produced.
pub fn shaped_swaps(l: &SubrackLattice, a: usize, b: usize, cap: usize) -> Vec<Vec<usize>> {
    shaped_swaps_with(l.size(), a, b, closure_of_atom(l, a), closure_of_atom(l, b), cap)
}

/// [`shaped_swaps`] with the two classes given.
pub fn shaped_swaps_with(n: usize, a: usize, b: usize, ka: ElemSet, kb: ElemSet, cap: usize) -> Vec<Vec<usize>> {
    if a == b {
        return vec![identity(n)];
    }
    if ka.len() != kb.len() || (ka != kb && !ka.is_disjoint(kb)) {
        return vec![];
    }
    let (dom, cod): (Vec<usize>, Vec<usize>) = if ka == kb {
        let rest = (ka - ElemSet::singleton(a) - ElemSet::singleton(b)).to_vec();
        (rest.clone(), rest)
    } else {
        ((ka.without(a)).to_vec(), (kb.without(b)).to_vec())
    };
    let mut out = Vec::new();
    let mut chosen = vec![usize::MAX; dom.len()];
    let mut used = vec![false; cod.len()];
    fn rec(
        i: usize,
        dom: &[usize],
        cod: &[usize],
        chosen: &mut [usize],
        used: &mut [bool],
        emit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == dom.len() {
            return emit(chosen);
        }
        for j in 0..cod.len() {
            if !used[j] {
                used[j] = true;
                chosen[i] = cod[j];
                let go_on = rec(i + 1, dom, cod, chosen, used, emit);
                used[j] = false;
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
    let same = ka == kb;
    let mut emit = |images: &[usize]| {
        let mut perm = identity(n);
        perm[a] = b;
        perm[b] = a;
        for (&x, &y) in dom.iter().zip(images) {
            perm[x] = y;
            if !same {
                perm[y] = x;
            }
        }
        out.push(perm);
        out.len() < cap
    };
    rec(0, &dom, &cod, &mut chosen, &mut used, &mut emit);
    out
}

/// Cosets of the normal subgroup `n`, sorted by smallest member, each
/// confirmed to be a subrack.
pub fn coset_subracks(n: ElemSet, g: &FiniteGroup) -> Result<Vec<ElemSet>> {
    let o = Oracle::new(g)?;
    if !o.is_normal(n) {
        return Err(Error::NotNormal);
    }
    let q = o.quotient_group(n)?;
    let r = Rack::conjugation(g)?;
    if let Some(bad) = q.cosets.iter().find(|&&c| !r.is_subrack(c)) {
        return Err(Error::Internal(format!("coset {bad:?} is not a subrack")));
    }
    Ok(q.cosets)
}

/// For every set of cosets (every pair when there are many), the join of
/// the cosets is the union of cosets meeting the subrack generated by
/// their smallest members.
pub fn coset_join_law_holds(n: ElemSet, g: &FiniteGroup) -> Result<bool> {
    let cosets = coset_subracks(n, g)?;
    let r = Rack::conjugation(g)?;
    let reps: Vec<usize> = cosets.iter().map(|c| c.first().expect("cosets are nonempty")).collect();
    let check = |pick: ElemSet| {
        let union = pick.iter().fold(ElemSet::EMPTY, |acc, i| acc | cosets[i]);
        let gen = r.subrack_generated(pick.iter().map(|i| reps[i]).collect());
        let saturated = cosets
            .iter()
            .filter(|c| !c.is_disjoint(gen))
            .fold(ElemSet::EMPTY, |acc, &c| acc | c);
        r.subrack_generated(union) == saturated
    };
    let m = cosets.len();
    if m <= EXHAUSTIVE_JOIN_BLOCKS {
        Ok((1u64..1 << m).all(|bits| check(ElemSet(bits))))
    } else {
        Ok((0..m).all(|i| (i..m).all(|j| check(ElemSet::singleton(i).with(j)))))
    }
}

/// A partition of the atoms into blocks of equal size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralPartition {
    /// Sorted by smallest atom.
    pub blocks: Vec<ElemSet>,
    pub block_size: usize,
}

impl CentralPartition {
    pub fn new(mut blocks: Vec<ElemSet>) -> Self {
        blocks.sort_by_key(|b| b.first());
        let block_size = blocks.first().map_or(0, |b| b.len());
        CentralPartition { blocks, block_size }
    }

    pub fn block_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for x in *b {
                out[x] = i;
            }
        }
        out
    }

    fn union(&self, pick: ElemSet) -> ElemSet {
        pick.iter().fold(ElemSet::EMPTY, |acc, i| acc | self.blocks[i])
    }

    /// Blocks meeting `s`.
    fn touched(&self, s: ElemSet) -> ElemSet {
        (0..self.blocks.len()).filter(|&i| !self.blocks[i].is_disjoint(s)).collect()
    }

    fn is_saturated(&self, s: ElemSet) -> bool {
        self.union(self.touched(s)) == s
    }

    /// `perm` sends every block onto a block.
    pub fn preserved_by(&self, perm: &[usize]) -> bool {
        self.blocks.iter().all(|&b| {
            let img = b.map(|x| perm[x]);
            self.blocks.contains(&img)
        })
    }
}

/// Outcome of checking conditions (i)–(iii) on a partition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub sizes: bool,
    /// Every block is itself a subrack, so that it is an element of `J(C)`.
    pub blocks_are_subracks: bool,
    pub joins: bool,
    pub joins_exhaustive: bool,
    pub swaps: bool,
    /// Pairs for which only a swap with `π(a) = b` (not an interchange)
    /// was found; see [`build_central_partition`].
    pub relaxed_swaps: usize,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.sizes && self.blocks_are_subracks && self.joins && self.swaps
    }
}

/// Condition (ii).
fn joins_are_unions(l: &SubrackLattice, c: &CentralPartition, seed: u64) -> (bool, bool) {
    let m = c.blocks.len();
    let check = |pick: ElemSet| c.is_saturated(l.generated(c.union(pick)));
    if m <= EXHAUSTIVE_JOIN_BLOCKS {
        let ok = (1u64..1 << m).into_par_iter().all(|bits| check(ElemSet(bits)));
        return (ok, true);
    }
    let pairs = (0..m).all(|i| (i..m).all(|j| check(ElemSet::singleton(i).with(j))));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = ElemSet::full(m).bits();
    let sampled = (0..SAMPLED_JOIN_SUBSETS).all(|_| check(ElemSet(rng.gen::<u64>() & mask)));
    (pairs && sampled, false)
}

/// Center cosets as the witness partition, with (i)–(iii) checked in the
/// lattice. Pairs sharing a class whose connecting central element has
/// order above 2 have no translation that interchanges them; for those a
/// shaped interchange is searched for, and failing that the translation
/// (which sends `a` to `b`) is accepted and counted in `relaxed_swaps`.
pub fn build_central_partition(
    l: &SubrackLattice,
    g: &FiniteGroup,
    seed: u64,
) -> Result<(CentralPartition, ConditionReport)> {
    let z = center_atoms(l);
    let o = Oracle::new(g)?;
    if !o.is_normal(z) || !o.is_subgroup(z) {
        return Err(Error::Internal("located center is not a normal subgroup".into()));
    }
    let c = CentralPartition::new(o.quotient_group(z)?.cosets);
    let report = check_conditions(l, &c, z.len(), seed, |a, b| {
        let t = g.mul(g.inv(a), b);
        class_swap(g.order(), closure_of_atom(l, a), closure_of_atom(l, b), |x| g.mul(x, t))
    });
    if !report.all_hold() {
        return Err(Error::Internal(format!("center-coset partition fails its conditions: {report:?}")));
    }
    Ok((c, report))
}

/// (i)–(iii) for `c`, trying `suggest(a, b)` before a shaped search.
fn check_conditions(
    l: &SubrackLattice,
    c: &CentralPartition,
    center_size: usize,
    seed: u64,
    suggest: impl Fn(usize, usize) -> Option<Vec<usize>> + Sync,
) -> ConditionReport {
    let sizes = c.blocks.iter().all(|b| b.len() == center_size);
    let blocks_are_subracks = c.blocks.iter().all(|&b| l.is_element(b));
    let (joins, joins_exhaustive) = joins_are_unions(l, c, seed);
    let pairs: Vec<(usize, usize)> = c
        .blocks
        .iter()
        .flat_map(|b| {
            let v = b.to_vec();
            let mut out = Vec::new();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    out.push((v[i], v[j]));
                }
            }
            out
        })
        .collect();
    let verdicts: Vec<Option<bool>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let good = |p: &[usize]| c.preserved_by(p) && l.is_automorphism(p, seed);
            let hint = suggest(a, b);
            if let Some(p) = &hint {
                if p[a] == b && p[b] == a && good(p) {
                    return Some(false);
                }
            }
            if shaped_swaps(l, a, b, SWAP_CANDIDATE_CAP).iter().any(|p| good(p)) {
                return Some(false);
            }
            match hint {
                Some(p) if p[a] == b && good(&p) => Some(true),
                _ => None,
            }
        })
        .collect();
    ConditionReport {
        sizes,
        blocks_are_subracks,
        joins,
        joins_exhaustive,
        swaps: verdicts.iter().all(Option::is_some),
        relaxed_swaps: verdicts.iter().filter(|v| **v == Some(true)).count(),
    }
}

/// `J(C)`: the nonempty block-union subracks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientPoset {
    /// Atom sets, canonical order.
    pub elements: Vec<ElemSet>,
    /// The same elements as sets of block indices.
    pub block_sets: Vec<ElemSet>,
    /// Lowest atom of each block.
    pub transversal: Vec<usize>,
}

impl QuotientPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn quotient_poset(c: &CentralPartition, l: &SubrackLattice) -> Result<QuotientPoset> {
    let m = c.blocks.len();
    let extend = |s: ElemSet, i: usize| {
        let mut u = c.union(s.with(i));
        loop {
            let w = c.union(c.touched(l.generated(u)));
            if w == u {
                return c.touched(u);
            }
            u = w;
        }
    };
    let mut block_sets = enumerate_closure_system(m, ElemSet::EMPTY, &extend, DEFAULT_CAP)?;
    block_sets.retain(|s| !s.is_empty());
    let mut pairs: Vec<(ElemSet, ElemSet)> = block_sets.iter().map(|&s| (c.union(s), s)).collect();
    pairs.sort_unstable();
    Ok(QuotientPoset {
        elements: pairs.iter().map(|p| p.0).collect(),
        block_sets: pairs.iter().map(|p| p.1).collect(),
        transversal: c.blocks.iter().map(|b| b.first().expect("blocks are nonempty")).collect(),
    })
}

/// Whether two set families are isomorphic as posets under inclusion.
pub fn posets_isomorphic(a: &[ElemSet], b: &[ElemSet]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let rel = |f: &[ElemSet]| -> Vec<Vec<bool>> {
        f.iter().map(|&x| f.iter().map(|&y| x.is_subset(y)).collect()).collect()
    };
    let (ra, rb) = (rel(a), rel(b));
    let sig = |r: &[Vec<bool>], i: usize| {
        let up = r[i].iter().filter(|&&v| v).count();
        let down = r.iter().filter(|row| row[i]).count();
        (down, up)
    };
    let sa: Vec<(usize, usize)> = (0..n).map(|i| sig(&ra, i)).collect();
    let sb: Vec<(usize, usize)> = (0..n).map(|i| sig(&rb, i)).collect();
    let (mut xa, mut xb) = (sa.clone(), sb.clone());
    xa.sort_unstable();
    xb.sort_unstable();
    if xa != xb {
        return false;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| sa[i]);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        k: usize,
        order: &[usize],
        ra: &[Vec<bool>],
        rb: &[Vec<bool>],
        sa: &[(usize, usize)],
        sb: &[(usize, usize)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let i = order[k];
        for j in 0..sb.len() {
            if used[j] || sb[j] != sa[i] {
                continue;
            }
            let consistent = order[..k].iter().all(|&p| {
                let q = map[p];
                ra[p][i] == rb[q][j] && ra[i][p] == rb[j][q]
            });
            if consistent {
                map[i] = j;
                used[j] = true;
                if go(k + 1, order, ra, rb, sa, sb, map, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, &order, &ra, &rb, &sa, &sb, &mut map, &mut used)
}

/// One round of the iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilStep {
    pub group_order: usize,
    pub center_size: usize,
    pub blocks: usize,
    /// `|J(C)|`; absent on the final round when the center is trivial.
    pub poset_size: Option<usize>,
    pub relaxed_swaps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilpotenceTrace {
    pub verdict: Nilpotence,
    pub steps: Vec<NilStep>,
}

fn mode_choice(l: &SubrackLattice) -> ModeChoice {
    match l.mode() {
        LatticeMode::Explicit => ModeChoice::Explicit,
        LatticeMode::Implicit => ModeChoice::Implicit,
    }
}

struct Iteration {
    trace: NilpotenceTrace,
    group: FiniteGroup,
    lattice: SubrackLattice,
}

fn iterate_quotients(l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<Iteration> {
    let mut steps = Vec::new();
    let mut group = g.clone();
    let mut lattice = l.clone();
    loop {
        if group.order() == 1 {
            let verdict = Nilpotence::Class(steps.len());
            return Ok(Iteration {
                trace: NilpotenceTrace { verdict, steps },
                group,
                lattice,
            });
        }
        let z = center_atoms(&lattice);
        if z.len() == 1 {
            steps.push(NilStep {
                group_order: group.order(),
                center_size: 1,
                blocks: group.order(),
                poset_size: None,
                relaxed_swaps: 0,
            });
            return Ok(Iteration {
                trace: NilpotenceTrace {
                    verdict: Nilpotence::NotNilpotent,
                    steps,
                },
                group,
                lattice,
            });
        }
        let (c, report) = build_central_partition(&lattice, &group, seed)?;
        let j = quotient_poset(&c, &lattice)?;
        let q = Oracle::new(&group)?.quotient_group(z)?;
        let mapped: Vec<ElemSet> = {
            let mut v: Vec<ElemSet> = j
                .block_sets
                .iter()
                .map(|s| s.iter().map(|i| q.projection[j.transversal[i]]).collect())
                .collect();
            v.sort_unstable();
            v
        };
        let qrack = Rack::conjugation(&q.group)?;
        let expected: Vec<ElemSet> = enumerate_lattice(&qrack, DEFAULT_CAP)?
            .elements()?
            .iter()
            .copied()
            .filter(|s| !s.is_empty())
            .collect();
        if mapped != expected {
            return Err(Error::Internal(format!(
                "J(C) of {} does not match the quotient lattice",
                group.name()
            )));
        }
        steps.push(NilStep {
            group_order: group.order(),
            center_size: z.len(),
            blocks: c.blocks.len(),
            poset_size: Some(j.len()),
            relaxed_swaps: report.relaxed_swaps,
        });
        lattice = SubrackLattice::of_group(&q.group, mode_choice(&lattice), DEFAULT_CAP)?;
        group = q.group;
    }
}

/// Nilpotence class from the lattice, with one trace entry per quotient.
pub fn nilpotence_class_from_lattice(l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<NilpotenceTrace> {
    Ok(iterate_quotients(l, g, seed)?.trace)
}

/// `G/Z_∞` and its lattice, reached by dividing out centers until the
/// center is trivial.
pub fn hypercenter_quotient(l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<(SubrackLattice, FiniteGroup)> {
    let it = iterate_quotients(l, g, seed)?;
    Ok((it.lattice, it.group))
}

/// A lattice given by its element family over atoms `0..n`, with meet
/// `∩`. Used to carry the iteration past the first quotient without any
/// group at hand.
#[derive(Clone, Debug)]
struct SetLattice {
    n: usize,
    /// Sorted by (cardinality, canonical order).
    elements: Vec<ElemSet>,
    members: std::collections::HashSet<u64>,
}

impl SetLattice {
    fn new(n: usize, mut elements: Vec<ElemSet>) -> Self {
        elements.sort_by_key(|e| (e.len(), *e));
        let members = elements.iter().map(|e| e.bits()).collect();
        SetLattice { n, elements, members }
    }

    fn top(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    fn is_element(&self, s: ElemSet) -> bool {
        self.members.contains(&s.bits())
    }

    fn join(&self, u: ElemSet) -> ElemSet {
        *self.elements.iter().find(|e| u.is_subset(**e)).expect("top is an element")
    }

    fn coatoms(&self) -> Vec<ElemSet> {
        let top = self.top();
        self.elements
            .iter()
            .copied()
            .filter(|&e| e != top && (top - e).iter().all(|x| self.join(e.with(x)) == top))
            .collect()
    }

    fn atom_closures(&self) -> Vec<ElemSet> {
        let coatoms = self.coatoms();
        (0..self.n)
            .map(|x| {
                coatoms
                    .iter()
                    .filter(|c| c.contains(x))
                    .fold(self.top(), |acc, &c| acc & c)
            })
            .collect()
    }

    fn center(&self) -> ElemSet {
        (0..self.n)
            .filter(|&x| (0..self.n).all(|y| x == y || self.join(ElemSet::singleton(x).with(y)).len() == 2))
            .collect()
    }

    fn is_automorphism(&self, perm: &[usize]) -> bool {
        self.elements
            .iter()
            .all(|&e| self.is_element(e.map(|x| perm[x])))
    }

    fn joins_are_unions(&self, c: &CentralPartition) -> bool {
        let m = c.blocks.len();
        (1u64..1 << m).all(|bits| c.is_saturated(self.join(c.union(ElemSet(bits)))))
    }

    /// `J(C) ∪ {∅}` over block indices.
    fn quotient(&self, c: &CentralPartition) -> (Vec<ElemSet>, SetLattice) {
        let j: Vec<ElemSet> = self
            .elements
            .iter()
            .copied()
            .filter(|&e| !e.is_empty() && c.is_saturated(e))
            .collect();
        let mut family: Vec<ElemSet> = j.iter().map(|&e| c.touched(e)).collect();
        family.push(ElemSet::EMPTY);
        (j, SetLattice::new(c.blocks.len(), family))
    }
}

/// How one partition fares against the conditions.
struct Verdict {
    weak: bool,
    literal: bool,
    full: bool,
    blocks: CentralPartition,
}

fn judge_partitions(lat: &SetLattice, z: ElemSet) -> Result<Vec<Verdict>> {
    let n = lat.n;
    let partitions = all_partitions(n, z.len());
    if partitions.len() > PARTITION_CAP {
        return Err(Error::CapExceeded(PARTITION_CAP));
    }
    let closures = lat.atom_closures();
    let mut swaps: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
    for x in 0..n {
        for y in x + 1..n {
            let found = shaped_swaps_with(n, x, y, closures[x], closures[y], SWAP_CANDIDATE_CAP)
                .into_iter()
                .filter(|p| lat.is_automorphism(p))
                .collect();
            swaps.insert((x, y), found);
        }
    }
    Ok(partitions
        .into_par_iter()
        .map(|blocks| {
            let c = CentralPartition::new(blocks);
            let joins = lat.joins_are_unions(&c);
            let subracks = c.blocks.iter().all(|&b| lat.is_element(b));
            let literal = joins
                && c.blocks.iter().all(|b| {
                    let v = b.to_vec();
                    (0..v.len()).all(|i| {
                        (i + 1..v.len()).all(|j| swaps[&(v[i], v[j])].iter().any(|p| c.preserved_by(p)))
                    })
                });
            Verdict {
                weak: joins && subracks && c.blocks.contains(&z),
                literal,
                full: literal && subracks,
                blocks: c,
            }
        })
        .collect())
}

/// Every class value reachable by iterating over all qualifying
/// partitions, starting `depth` quotients deep.
fn terminal_answers(lat: &SetLattice, depth: usize, out: &mut std::collections::BTreeSet<Nilpotence>) -> Result<()> {
    if lat.n == 1 {
        out.insert(Nilpotence::Class(depth));
        return Ok(());
    }
    let z = lat.center();
    if z.len() <= 1 {
        out.insert(Nilpotence::NotNilpotent);
        return Ok(());
    }
    for v in judge_partitions(lat, z)? {
        if v.full {
            terminal_answers(&lat.quotient(&v.blocks).1, depth + 1, out)?;
        }
    }
    Ok(())
}

/// Result of examining every partition of the atoms into blocks of the
/// center's size.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExhaustiveReport {
    pub partitions: usize,
    /// Blocks are subracks, the center is a block, and (ii) holds.
    pub weak_premises: usize,
    /// (i)–(iii) hold as worded, without asking blocks to be subracks.
    pub literal_conditions: usize,
    /// (i)–(iii) hold and every block is a subrack.
    pub satisfying: usize,
    /// Class values reached by iterating from every partition counted in
    /// `satisfying`, and again at every later quotient.
    pub terminal_answers: Vec<Nilpotence>,
    /// Every partition counted in `satisfying` gives `J(C)` isomorphic to
    /// the center-coset one. Not implied by the conditions.
    pub all_isomorphic: bool,
    /// Partitions counted in `satisfying` whose `J(C)` is not isomorphic to
    /// the center-coset one.
    pub non_isomorphic: Vec<Vec<ElemSet>>,
    /// Partitions meeting the weak premises, but not (iii), whose `J(C)` is
    /// not isomorphic to the center-coset one.
    pub weak_premise_breaks: Vec<Vec<ElemSet>>,
    /// Partitions meeting (i)–(iii) as worded, with some block not a
    /// subrack, whose `J(C)` is not isomorphic to the center-coset one.
    pub literal_breaks: Vec<Vec<ElemSet>>,
}

impl ExhaustiveReport {
    /// All iterations agree on one class value.
    pub fn well_defined(&self) -> bool {
        self.terminal_answers.len() == 1
    }
}

/// Examines every partition of the atoms into blocks of size `|Z|`, then
/// iterates from each qualifying one using the lattice alone.
pub fn exhaustive_partition_check(l: &SubrackLattice, g: &FiniteGroup, seed: u64) -> Result<ExhaustiveReport> {
    let n = l.size();
    if n > EXHAUSTIVE_PARTITION_MAX_ORDER {
        return Err(Error::Precondition(format!(
            "exhaustive partition mode needs at most {EXHAUSTIVE_PARTITION_MAX_ORDER} atoms"
        )));
    }
    let elements = match l.elements() {
        Ok(e) => e.to_vec(),
        Err(_) => enumerate_lattice(l.rack(), DEFAULT_CAP)?.elements()?.to_vec(),
    };
    let lat = SetLattice::new(n, elements);
    let z = lat.center();
    let (witness, _) = build_central_partition(l, g, seed)?;
    let (reference, _) = lat.quotient(&witness);
    let mut report = ExhaustiveReport {
        all_isomorphic: true,
        ..Default::default()
    };
    let mut answers = std::collections::BTreeSet::new();
    if n == 1 || z.len() <= 1 {
        terminal_answers(&lat, 0, &mut answers)?;
    }
    if n > 1 && z.len() > 1 {
        let verdicts = judge_partitions(&lat, z)?;
        report.partitions = verdicts.len();
        for v in verdicts {
            report.weak_premises += v.weak as usize;
            report.literal_conditions += v.literal as usize;
            report.satisfying += v.full as usize;
            if !(v.weak || v.literal) {
                continue;
            }
            let (j, next) = lat.quotient(&v.blocks);
            let iso = posets_isomorphic(&j, &reference);
            if v.full {
                terminal_answers(&next, 1, &mut answers)?;
                if !iso {
                    report.all_isomorphic = false;
                    report.non_isomorphic.push(v.blocks.blocks);
                }
            } else if !iso && v.literal {
                report.literal_breaks.push(v.blocks.blocks);
            } else if !iso {
                report.weak_premise_breaks.push(v.blocks.blocks);
            }
        }
    } else {
        report.partitions = 1;
        report.weak_premises = 1;
        report.literal_conditions = 1;
        report.satisfying = 1;
    }
    report.terminal_answers = answers.into_iter().collect();
    Ok(report)
}

/// Partitions of `0..n` into blocks of size `k`.
fn all_partitions(n: usize, k: usize) -> Vec<Vec<ElemSet>> {
    if k == 0 || !n.is_multiple_of(k) {
        return vec![];
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(left: ElemSet, k: usize, current: &mut Vec<ElemSet>, out: &mut Vec<Vec<ElemSet>>) {
        let Some(first) = left.first() else {
            out.push(current.clone());
            return;
        };
        let rest = left.without(first).to_vec();
        let mut pick = Vec::with_capacity(k - 1);
        fn choose(
            start: usize,
            rest: &[usize],
            need: usize,
            pick: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if need == 0 {
                f(pick);
                return;
            }
            for i in start..rest.len() {
                if rest.len() - i < need {
                    break;
                }
                pick.push(rest[i]);
                choose(i + 1, rest, need - 1, pick, f);
                pick.pop();
            }
        }
        choose(0, &rest, k - 1, &mut pick, &mut |mates| {
            let block: ElemSet = mates.iter().copied().collect::<ElemSet>().with(first);
            current.push(block);
            rec(left - block, k, current, out);
            current.pop();
        });
    }
    rec(ElemSet::full(n), k, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, catalog_up_to};

    fn set(v: &[usize]) -> ElemSet {
        v.iter().copied().collect()
    }

    fn lat(g: &FiniteGroup) -> SubrackLattice {
        SubrackLattice::explicit(g).unwrap()
    }

    #[test]
    fn central_swap_examples() {
        let q8 = catalog("Q8").unwrap();
        let l = lat(&q8);
        assert_eq!(central_swap(&l, &q8, 3, 3, 0).unwrap(), identity(8));
        let z = 2; // a² in the dicyclic ordering
        assert_eq!(center_atoms(&l), set(&[0, z]));
        let p = central_swap(&l, &q8, 1, q8.mul(1, z), 0).unwrap();
        assert_eq!(p[1], q8.mul(1, z));
        assert!(central_swap(&l, &q8, 1, 4, 0).is_err());
        let s3 = catalog("S3").unwrap();
        assert!(matches!(central_swap(&lat(&s3), &s3, 1, 2, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn power_swap_examples() {
        let s3 = catalog("S3").unwrap();
        let l = lat(&s3);
        assert_eq!(power_swap(&l, &s3, 4, 5, 0).unwrap(), vec![0, 1, 2, 3, 5, 4]);
        assert_eq!(power_swap(&l, &s3, 4, 4, 0).unwrap(), identity(6));
        assert!(power_swap(&l, &s3, 1, 2, 0).is_err());
        let z5 = catalog("Z5").unwrap();
        let p = power_swap(&lat(&z5), &z5, 1, 3, 0).unwrap();
        assert_eq!((p[1], p[3]), (3, 1));
    }

    #[test]
    fn coset_examples() {
        let s3 = catalog("S3").unwrap();
        assert_eq!(coset_subracks(s3.all(), &s3).unwrap(), vec![s3.all()]);
        assert_eq!(coset_subracks(set(&[0, 4, 5]), &s3).unwrap(), vec![set(&[0, 4, 5]), set(&[1, 2, 3])]);
        let r = Rack::conjugation(&s3).unwrap();
        assert_eq!(r.subrack_generated(s3.all()), s3.all());
        assert!(matches!(coset_subracks(set(&[0, 1]), &s3), Err(Error::NotNormal)));
        for g in catalog_up_to(16) {
            let o = Oracle::new(&g).unwrap();
            for h in o.normal_subgroups() {
                assert!(coset_join_law_holds(h.members, &g).unwrap(), "{} {:?}", g.name(), h.members);
            }
        }
    }

    #[test]
    fn central_partition_examples() {
        let s3 = catalog("S3").unwrap();
        let (c, r) = build_central_partition(&lat(&s3), &s3, 0).unwrap();
        assert_eq!(c.blocks.len(), 6);
        assert!(r.all_hold());
        let j = quotient_poset(&c, &lat(&s3)).unwrap();
        assert_eq!(j.len(), 17);

        let q8 = catalog("Q8").unwrap();
        let (c, _) = build_central_partition(&lat(&q8), &q8, 0).unwrap();
        assert_eq!(c.blocks.len(), 4);
        assert_eq!(c.block_size, 2);
        let j = quotient_poset(&c, &lat(&q8)).unwrap();
        assert_eq!(j.len(), 15);

        let z6 = catalog("Z6").unwrap();
        let (c, _) = build_central_partition(&lat(&z6), &z6, 0).unwrap();
        assert_eq!(c.blocks, vec![z6.all()]);
        assert_eq!(quotient_poset(&c, &lat(&z6)).unwrap().len(), 1);
    }

    #[test]
    fn quotient_posets_match_quotient_lattices() {
        for g in catalog_up_to(16) {
            let l = lat(&g);
            let (c, _) = build_central_partition(&l, &g, 1).unwrap();
            let j = quotient_poset(&c, &l).unwrap();
            let o = Oracle::new(&g).unwrap();
            let q = o.quotient_group(o.center()).unwrap();
            let ql = lat(&q.group);
            let expected: Vec<ElemSet> =
                ql.elements().unwrap().iter().copied().filter(|s| !s.is_empty()).collect();
            assert!(posets_isomorphic(&j.elements, &expected), "{}", g.name());
        }
    }

    #[test]
    fn nilpotence_examples() {
        let class = |name: &str| {
            let g = catalog(name).unwrap();
            nilpotence_class_from_lattice(&lat(&g), &g, 3).unwrap().verdict
        };
        assert_eq!(class("Z4"), Nilpotence::Class(1));
        assert_eq!(class("Z1"), Nilpotence::Class(0));
        assert_eq!(class("Q8"), Nilpotence::Class(2));
        assert_eq!(class("D4"), Nilpotence::Class(2));
        assert_eq!(class("D8"), Nilpotence::Class(3));
        assert_eq!(class("S3"), Nilpotence::NotNilpotent);
        let g = catalog("Q8").unwrap();
        let t = nilpotence_class_from_lattice(&lat(&g), &g, 3).unwrap();
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.steps[0].blocks, 4);
        assert_eq!(t.steps[0].poset_size, Some(15));
    }

    #[test]
    fn nilpotence_matches_oracle() {
        for g in catalog_up_to(24) {
            for l in [SubrackLattice::explicit(&g).unwrap(), SubrackLattice::implicit(&g).unwrap()] {
                let t = nilpotence_class_from_lattice(&l, &g, 5).unwrap();
                assert_eq!(t.verdict, Oracle::new(&g).unwrap().nilpotence(), "{}", g.name());
            }
        }
    }

    #[test]
    fn hypercenter_examples() {
        let d4 = catalog("D4").unwrap();
        let (_, q) = hypercenter_quotient(&lat(&d4), &d4, 0).unwrap();
        assert_eq!(q.order(), 1);
        let s3 = catalog("S3").unwrap();
        let (l, q) = hypercenter_quotient(&lat(&s3), &s3, 0).unwrap();
        assert_eq!(q.order(), 6);
        assert_eq!(l.elements().unwrap().len(), 18);
        let s3z2 = catalog("S3xZ2").unwrap();
        let (l, q) = hypercenter_quotient(&lat(&s3z2), &s3z2, 0).unwrap();
        assert_eq!(q.order(), 6);
        assert!(posets_isomorphic(l.elements().unwrap(), lat(&s3).elements().unwrap()));
        assert_eq!(center_atoms(&l).len(), 1);
    }

    #[test]
    fn partitions_are_counted_right() {
        assert_eq!(all_partitions(6, 2).len(), 15);
        assert_eq!(all_partitions(6, 3).len(), 10);
        assert_eq!(all_partitions(4, 4).len(), 1);
        assert_eq!(all_partitions(5, 2).len(), 0);
    }

    #[test]
    fn poset_isomorphism() {
        let chain = [set(&[0]), set(&[0, 1]), set(&[0, 1, 2])];
        let fork = [set(&[0]), set(&[0, 1]), set(&[0, 2])];
        assert!(!posets_isomorphic(&chain, &fork));
        let fork2 = [set(&[5]), set(&[5, 6]), set(&[5, 7])];
        assert!(posets_isomorphic(&fork, &fork2));
    }

    #[test]
    fn exhaustive_partitions_small() {
        for name in ["D4", "Q8", "S3", "Z4"] {
            let g = catalog(name).unwrap();
            let r = exhaustive_partition_check(&lat(&g), &g, 9).unwrap();
            assert!(r.satisfying >= 1, "{name}");
            assert_eq!(r.terminal_answers, vec![Oracle::new(&g).unwrap().nilpotence()], "{name}");
        }
    }
}

