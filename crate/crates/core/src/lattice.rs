//! The subrack lattice: explicit enumeration for small racks, an implicit
//! query view otherwise, and the order-theoretic helpers built on top.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::ElemSet;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::oracle::maximal_sets;
use crate::rack::Rack;

/// Default bound on materialized lattice elements.
pub const DEFAULT_CAP: usize = 1 << 20;

/// Largest interval rack whose own lattice is enumerated on demand.
pub const INTERVAL_RACK_CAP: usize = 24;

/// Random subracks tried when checking an automorphism without the full
/// element list.
pub const AUTOMORPHISM_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeMode {
    Explicit,
    Implicit,
}

/// How a group lattice should be built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Auto,
    Explicit,
    Implicit,
}

#[derive(Clone, Debug)]
struct ExplicitStore {
    elements: Vec<ElemSet>,
    index: HashMap<u64, u32>,
    /// Element indices sorted by (cardinality, canonical order).
    by_size: Vec<u32>,
    /// `by_size[size_start[k]..]` begins the elements of cardinality `k`.
    size_start: Vec<usize>,
    hasse: OnceLock<Vec<(u32, u32)>>,
}

impl ExplicitStore {
    fn new(elements: Vec<ElemSet>, n: usize) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.bits(), i as u32))
            .collect();
        let mut by_size: Vec<u32> = (0..elements.len() as u32).collect();
        by_size.sort_by_key(|&i| (elements[i as usize].len(), i));
        let mut size_start = vec![by_size.len(); n + 2];
        for (pos, &i) in by_size.iter().enumerate().rev() {
            size_start[elements[i as usize].len()] = pos;
        }
        for k in (0..=n).rev() {
            size_start[k] = size_start[k].min(size_start[k + 1]);
        }
        ExplicitStore {
            elements,
            index,
            by_size,
            size_start,
            hasse: OnceLock::new(),
        }
    }
}

/// `R(R)` for a rack `R`, or an interval `[bottom, top]` of one.
///
/// Sets are given in the indices of [`SubrackLattice::rack`]. Lattices
/// produced by [`SubrackLattice::interval`] live over the restricted rack
/// and carry an embedding back to the parent indices.
#[derive(Clone, Debug)]
pub struct SubrackLattice {
    rack: Rack,
    name: String,
    labels: Vec<String>,
    classes: Option<Vec<ElemSet>>,
    bottom: ElemSet,
    embedding: Option<Vec<usize>>,
    store: Option<ExplicitStore>,
    coatoms: OnceLock<Vec<ElemSet>>,
}

/// `Int(L)`: the meets of coatom subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPoset {
    /// Canonical order.
    pub elements: Vec<ElemSet>,
    pub coatoms: Vec<ElemSet>,
    pub is_boolean: bool,
}

impl IntPoset {
    /// Minimal elements of `Int` above its least element.
    pub fn atoms(&self) -> Vec<ElemSet> {
        let bottom = self.elements.iter().fold(self.top(), |acc, &s| acc & s);
        let above: Vec<ElemSet> = self.elements.iter().copied().filter(|&s| s != bottom).collect();
        crate::oracle::minimal_sets(&above)
    }

    fn top(&self) -> ElemSet {
        self.elements.iter().fold(ElemSet::EMPTY, |acc, &s| acc | s)
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct LatticeJson {
    pub atoms: usize,
    pub elements: Vec<Vec<usize>>,
    pub hasse: Vec<[usize; 2]>,
}

/// Every subrack of `r`, by the closed-set search.
pub fn enumerate_lattice(r: &Rack, cap: usize) -> Result<SubrackLattice> {
    let elements = enumerate_closed(r, ElemSet::EMPTY, cap)?;
    Ok(SubrackLattice::assemble(
        r.clone(),
        format!("rack{}", r.size()),
        (0..r.size()).map(|i| i.to_string()).collect(),
        None,
        ElemSet::EMPTY,
        None,
        Some(elements),
    ))
}

/// A lattice over `r` that never materializes its elements.
pub fn implicit_view(r: &Rack) -> SubrackLattice {
    SubrackLattice::assemble(
        r.clone(),
        format!("rack{}", r.size()),
        (0..r.size()).map(|i| i.to_string()).collect(),
        None,
        ElemSet::EMPTY,
        None,
        None,
    )
}

/// Coatoms of `R(G)`: the complements of the conjugacy classes, in class
/// order.
pub fn maximal_subracks(g: &FiniteGroup) -> Vec<ElemSet> {
    let all = g.all();
    g.conjugacy_classes()
        .class_sets()
        .into_iter()
        .map(|k| all - k)
        .collect()
}

/// All subracks of `r` by testing every subset. Only for tiny racks.
pub fn brute_force_subracks(r: &Rack) -> Vec<ElemSet> {
    assert!(r.size() <= 24, "brute force over 2^{} subsets", r.size());
    (0u64..1 << r.size())
        .map(ElemSet)
        .filter(|&s| r.is_subrack(s))
        .collect()
}

/// Closed sets of `r` containing `base`, in canonical order.
fn enumerate_closed(r: &Rack, base: ElemSet, cap: usize) -> Result<Vec<ElemSet>> {
    let root = r.subrack_generated(base);
    enumerate_closure_system(r.size(), root, &|s, i| r.close_from(s, ElemSet::singleton(i)), cap)
}

/// Closed sets of a closure system on `0..n` above the closed set `root`.
///
/// `extend(S, i)` must return the closure of `S ∪ {i}` for closed `S`.
/// Each closed set `T ≠ root` has exactly one parent `S` with
/// `T = extend(S, i)`, `i > core(S)` and `T ∩ [0,i) = S ∩ [0,i)`.
pub fn enumerate_closure_system(
    n: usize,
    root: ElemSet,
    extend: &(dyn Fn(ElemSet, usize) -> ElemSet + Sync),
    cap: usize,
) -> Result<Vec<ElemSet>> {
    let count = AtomicUsize::new(1);
    let abort = AtomicBool::new(false);
    let ctx = Dfs {
        n,
        extend,
        cap,
        count: &count,
        abort: &abort,
    };
    let mut out = ctx.subtree(root, None, 0);
    if abort.load(Ordering::Relaxed) || cap == 0 {
        return Err(Error::CapExceeded(cap));
    }
    out.push(root);
    out.sort_unstable();
    Ok(out)
}

struct Dfs<'a> {
    n: usize,
    extend: &'a (dyn Fn(ElemSet, usize) -> ElemSet + Sync),
    cap: usize,
    count: &'a AtomicUsize,
    abort: &'a AtomicBool,
}

const PARALLEL_DEPTH: usize = 2;

impl Dfs<'_> {
    fn children(&self, s: ElemSet, core: Option<usize>) -> Vec<(ElemSet, usize)> {
        let start = core.map_or(0, |c| c + 1);
        let mut kids = Vec::new();
        for i in start..self.n {
            if s.contains(i) {
                continue;
            }
            let t = (self.extend)(s, i);
            if t.below(i) == s.below(i) {
                kids.push((t, i));
            }
        }
        kids
    }

    fn subtree(&self, s: ElemSet, core: Option<usize>, depth: usize) -> Vec<ElemSet> {
        if self.abort.load(Ordering::Relaxed) {
            return Vec::new();
        }
        let kids = self.children(s, core);
        if self.count.fetch_add(kids.len(), Ordering::Relaxed) + kids.len() > self.cap {
            self.abort.store(true, Ordering::Relaxed);
            return Vec::new();
        }
        if depth < PARALLEL_DEPTH {
            kids.into_par_iter()
                .flat_map_iter(|(t, i)| {
                    let mut v = self.subtree(t, Some(i), depth + 1);
                    v.push(t);
                    v
                })
                .collect()
        } else {
            let mut out = Vec::new();
            let mut stack = kids;
            while let Some((t, i)) = stack.pop() {
                out.push(t);
                let more = self.children(t, Some(i));
                if self.count.fetch_add(more.len(), Ordering::Relaxed) + more.len() > self.cap {
                    self.abort.store(true, Ordering::Relaxed);
                    return Vec::new();
                }
                stack.extend(more);
            }
            out
        }
    }
}

/// Rough upper estimate of `|R(G)|` used by [`ModeChoice::Auto`].
pub fn predicted_subrack_count(g: &FiniteGroup) -> f64 {
    if g.is_abelian() {
        return 2f64.powi(g.order() as i32);
    }
    let classes = g.conjugacy_classes();
    let central = classes.classes.iter().filter(|k| k.len() == 1).count();
    let spread: usize = classes
        .classes
        .iter()
        .filter(|k| k.len() > 1)
        .map(|k| k.len().div_ceil(2))
        .sum();
    2f64.powi((central + spread) as i32)
}

impl SubrackLattice {
    fn assemble(
        rack: Rack,
        name: String,
        labels: Vec<String>,
        classes: Option<Vec<ElemSet>>,
        bottom: ElemSet,
        embedding: Option<Vec<usize>>,
        elements: Option<Vec<ElemSet>>,
    ) -> Self {
        let n = rack.size();
        SubrackLattice {
            rack,
            name,
            labels,
            classes,
            bottom,
            embedding,
            store: elements.map(|e| ExplicitStore::new(e, n)),
            coatoms: OnceLock::new(),
        }
    }

    /// `R(G)` for the conjugation quandle of `g`.
    pub fn of_group(g: &FiniteGroup, choice: ModeChoice, cap: usize) -> Result<Self> {
        let rack = Rack::conjugation(g)?;
        let classes = Some(g.conjugacy_classes().class_sets());
        let build = |elements| {
            SubrackLattice::assemble(
                rack.clone(),
                g.name().to_string(),
                g.labels().to_vec(),
                classes.clone(),
                ElemSet::EMPTY,
                None,
                elements,
            )
        };
        match choice {
            ModeChoice::Implicit => Ok(build(None)),
            ModeChoice::Explicit => {
                if g.implicit_only() {
                    return Err(Error::ImplicitOnly(g.name().to_string()));
                }
                Ok(build(Some(enumerate_closed(&rack, ElemSet::EMPTY, cap)?)))
            }
            ModeChoice::Auto => {
                if g.implicit_only() || predicted_subrack_count(g) > cap as f64 {
                    return Ok(build(None));
                }
                match enumerate_closed(&rack, ElemSet::EMPTY, cap) {
                    Ok(e) => Ok(build(Some(e))),
                    Err(Error::CapExceeded(_)) => Ok(build(None)),
                    Err(e) => Err(e),
                }
            }
        }
    }

    pub fn explicit(g: &FiniteGroup) -> Result<Self> {
        Self::of_group(g, ModeChoice::Explicit, DEFAULT_CAP)
    }

    pub fn implicit(g: &FiniteGroup) -> Result<Self> {
        Self::of_group(g, ModeChoice::Implicit, DEFAULT_CAP)
    }

    /// Same lattice without its element list.
    pub fn to_implicit(&self) -> Self {
        let mut l = self.clone();
        l.store = None;
        l.coatoms = OnceLock::new();
        l
    }

    pub fn mode(&self) -> LatticeMode {
        if self.store.is_some() {
            LatticeMode::Explicit
        } else {
            LatticeMode::Implicit
        }
    }

    pub fn rack(&self) -> &Rack {
        &self.rack
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of rack elements.
    pub fn size(&self) -> usize {
        self.rack.size()
    }

    pub fn top(&self) -> ElemSet {
        self.rack.all()
    }

    pub fn bottom(&self) -> ElemSet {
        self.bottom
    }

    pub fn is_group_backed(&self) -> bool {
        self.classes.is_some()
    }

    /// Conjugacy classes, for group lattices. Used only to take the
    /// coatom shortcut; every other query goes through the lattice.
    pub fn classes(&self) -> Option<&[ElemSet]> {
        self.classes.as_deref()
    }

    /// Local index → parent index, for intervals.
    pub fn embedding(&self) -> Option<&[usize]> {
        self.embedding.as_deref()
    }

    pub fn lift(&self, s: ElemSet) -> ElemSet {
        match &self.embedding {
            Some(e) => s.lift(e),
            None => s,
        }
    }

    pub fn lower(&self, s: ElemSet) -> ElemSet {
        match &self.embedding {
            Some(e) => s.lower(e),
            None => s,
        }
    }

    /// Materialized elements in canonical order.
    pub fn elements(&self) -> Result<&[ElemSet]> {
        self.store
            .as_ref()
            .map(|s| s.elements.as_slice())
            .ok_or_else(|| Error::ImplicitOnly(self.name.clone()))
    }

    /// Element count; implicit lattices are counted by enumeration.
    pub fn count(&self) -> Result<usize> {
        match &self.store {
            Some(s) => Ok(s.elements.len()),
            None => Ok(enumerate_closed(&self.rack, self.bottom, DEFAULT_CAP)?.len()),
        }
    }

    pub fn index_of(&self, s: ElemSet) -> Option<usize> {
        self.store
            .as_ref()
            .and_then(|st| st.index.get(&s.bits()).map(|&i| i as usize))
    }

    pub fn is_element(&self, s: ElemSet) -> bool {
        match &self.store {
            Some(st) => st.index.contains_key(&s.bits()),
            None => s.is_subset(self.top()) && self.bottom.is_subset(s) && self.rack.is_subrack(s),
        }
    }

    pub fn meet(&self, s: ElemSet, t: ElemSet) -> ElemSet {
        s & t
    }

    /// `⟨s ∪ t⟩`. Explicit lattices answer from the element list.
    pub fn join(&self, s: ElemSet, t: ElemSet) -> ElemSet {
        match &self.store {
            Some(_) => self.join_by_scan(s | t).expect("top is an element"),
            None => self.generated(s | t),
        }
    }

    /// Least subrack containing `s` and the bottom, by closing.
    pub fn generated(&self, s: ElemSet) -> ElemSet {
        self.rack.close_from(self.bottom, s)
    }

    /// Least listed element containing `u`.
    fn join_by_scan(&self, u: ElemSet) -> Option<ElemSet> {
        let st = self.store.as_ref()?;
        let start = st.size_start[u.len().min(st.size_start.len() - 1)];
        st.by_size[start..]
            .iter()
            .map(|&i| st.elements[i as usize])
            .find(|&e| u.is_subset(e))
    }

    /// Minimal elements above the bottom.
    pub fn atoms(&self) -> Vec<ElemSet> {
        let cands: BTreeSet<ElemSet> = (self.top() - self.bottom)
            .iter()
            .map(|x| self.rack.close_from(self.bottom, ElemSet::singleton(x)))
            .collect();
        crate::oracle::minimal_sets(&cands.into_iter().collect::<Vec<_>>())
    }

    /// Maximal elements below the top, in canonical order.
    ///
    /// Group lattices use the class complements; explicit lattices read the
    /// element list; other implicit lattices enumerate.
    pub fn coatoms(&self) -> &[ElemSet] {
        self.coatoms.get_or_init(|| {
            let mut out = match (&self.store, &self.classes) {
                (None, Some(classes)) if self.bottom.is_empty() => {
                    classes.iter().map(|&k| self.top() - k).collect()
                }
                (Some(st), _) => self.coatoms_from(&st.elements),
                (None, _) => {
                    let all = enumerate_closed(&self.rack, self.bottom, DEFAULT_CAP)
                        .expect("implicit coatom enumeration within cap");
                    self.coatoms_from(&all)
                }
            };
            out.sort_unstable();
            out
        })
    }

    fn coatoms_from(&self, elements: &[ElemSet]) -> Vec<ElemSet> {
        let top = self.top();
        elements
            .par_iter()
            .copied()
            .filter(|&s| {
                s != top
                    && (top - s)
                        .iter()
                        .all(|x| self.rack.close_from(s, ElemSet::singleton(x)) == top)
            })
            .collect()
    }

    /// Meet of the coatoms containing `s`.
    pub fn closure(&self, s: ElemSet) -> Result<ElemSet> {
        if !self.is_element(s) {
            return Err(Error::NotSubrack);
        }
        Ok(self.closure_unchecked(s))
    }

    pub(crate) fn closure_unchecked(&self, s: ElemSet) -> ElemSet {
        self.coatoms()
            .iter()
            .filter(|c| s.is_subset(**c))
            .fold(self.top(), |acc, &c| acc & c)
    }

    pub fn is_closed(&self, s: ElemSet) -> Result<bool> {
        Ok(self.closure(s)? == s)
    }

    pub fn int_poset(&self) -> IntPoset {
        let coatoms = self.coatoms().to_vec();
        let mut seen: HashSet<ElemSet> = HashSet::from([self.top()]);
        for &c in &coatoms {
            let next: Vec<ElemSet> = seen.iter().map(|&x| x & c).collect();
            seen.extend(next);
        }
        let mut elements: Vec<ElemSet> = seen.into_iter().collect();
        elements.sort_unstable();
        // A Boolean Int has exactly one meet per coatom subset.
        let is_boolean = coatoms.len() < 64 && elements.len() as u128 == 1u128 << coatoms.len();
        IntPoset {
            elements,
            coatoms,
            is_boolean,
        }
    }

    /// `[s, t]` as an explicit lattice over the rack `t`.
    pub fn interval(&self, s: ElemSet, t: ElemSet) -> Result<SubrackLattice> {
        self.interval_with_cap(s, t, DEFAULT_CAP)
    }

    pub fn interval_with_cap(&self, s: ElemSet, t: ElemSet, cap: usize) -> Result<SubrackLattice> {
        if !s.is_subset(t) {
            return Err(Error::Precondition("interval needs s ⊆ t".into()));
        }
        if !self.is_element(s) || !self.is_element(t) {
            return Err(Error::NotSubrack);
        }
        let (sub, emb) = self.rack.restrict(t)?;
        let base = s.lower(&emb);
        let elements = enumerate_closed(&sub, base, cap)?;
        let labels = emb.iter().map(|&p| self.labels[p].clone()).collect();
        let embedding = match &self.embedding {
            Some(outer) => emb.iter().map(|&p| outer[p]).collect(),
            None => emb,
        };
        Ok(SubrackLattice::assemble(
            sub,
            format!("{}[{}]", self.name, t.len()),
            labels,
            None,
            base,
            Some(embedding),
            Some(elements),
        ))
    }

    /// `[∅, t]`, refusing racks above [`INTERVAL_RACK_CAP`].
    pub fn restricted_lattice(&self, t: ElemSet) -> Result<SubrackLattice> {
        if t.len() > INTERVAL_RACK_CAP {
            return Err(Error::IntervalTooLarge {
                got: t.len(),
                cap: INTERVAL_RACK_CAP,
            });
        }
        self.interval(self.bottom, t)
    }

    /// Every subset of `a` is a subrack iff all pairs of `a` commute.
    pub fn is_boolean_interval(&self, a: ElemSet) -> bool {
        a.iter().all(|x| a.iter().all(|y| self.rack.op(x, y) == y))
    }

    /// Cover pairs `(lower, upper)` as element indices, sorted.
    pub fn hasse(&self) -> Result<&[(u32, u32)]> {
        let st = self
            .store
            .as_ref()
            .ok_or_else(|| Error::ImplicitOnly(self.name.clone()))?;
        Ok(st.hasse.get_or_init(|| {
            let top = self.top();
            let mut edges: Vec<(u32, u32)> = st
                .elements
                .par_iter()
                .enumerate()
                .flat_map_iter(|(i, &s)| {
                    let ups: Vec<ElemSet> = (top - s)
                        .iter()
                        .map(|x| self.rack.close_from(s, ElemSet::singleton(x)))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    crate::oracle::minimal_sets(&ups)
                        .into_iter()
                        .map(move |u| (i as u32, st.index[&u.bits()]))
                        .collect::<Vec<_>>()
                })
                .collect();
            edges.sort_unstable();
            edges
        }))
    }

    /// Whether the atom permutation `perm` induces a lattice automorphism.
    ///
    /// Explicit lattices are checked on every element. Otherwise joins of
    /// atom pairs are checked exactly and [`AUTOMORPHISM_SAMPLES`] random
    /// subracks drawn from `seed` are checked for being mapped onto
    /// subracks.
    pub fn is_automorphism(&self, perm: &[usize], seed: u64) -> bool {
        let n = self.size();
        if perm.len() != n || perm.iter().copied().collect::<ElemSet>() != self.top() {
            return false;
        }
        let image = |s: ElemSet| s.map(|x| perm[x]);
        if let Some(st) = &self.store {
            return st
                .elements
                .iter()
                .all(|&s| st.index.contains_key(&image(s).bits()));
        }
        for x in 0..n {
            for y in x..n {
                let j = self.generated(ElemSet::singleton(x).with(y));
                let jp = self.generated(ElemSet::singleton(perm[x]).with(perm[y]));
                if image(j) != jp {
                    return false;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = self.top().bits();
        for _ in 0..AUTOMORPHISM_SAMPLES {
            let k = rng.gen_range(1..=3u32);
            let mut bits = mask;
            for _ in 0..k {
                bits &= rng.gen::<u64>();
            }
            let s = ElemSet(bits);
            let c = self.generated(s);
            if self.generated(image(s)) != image(c) || !self.rack.is_subrack(image(c)) {
                return false;
            }
        }
        true
    }

    pub fn set_label(&self, s: ElemSet) -> String {
        if s.is_empty() {
            return "∅".to_string();
        }
        let parts: Vec<&str> = s.iter().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn to_json(&self) -> Result<LatticeJson> {
        let elements = self.elements()?;
        let hasse = self.hasse()?;
        Ok(LatticeJson {
            atoms: self.atoms().len(),
            elements: elements.iter().map(|s| s.to_vec()).collect(),
            hasse: hasse
                .iter()
                .map(|&(a, b)| [a as usize, b as usize])
                .collect(),
        })
    }

    pub fn to_dot(&self) -> Result<String> {
        let elements = self.elements()?;
        let hasse = self.hasse()?;
        let mut out = String::new();
        writeln!(out, "digraph \"{}\" {{", self.name).unwrap();
        writeln!(out, "  rankdir=BT;").unwrap();
        writeln!(out, "  node [shape=box];").unwrap();
        for (i, &s) in elements.iter().enumerate() {
            writeln!(out, "  n{i} [label=\"{}\"];", self.set_label(s)).unwrap();
        }
        for &(a, b) in hasse {
            writeln!(out, "  n{a} -> n{b};").unwrap();
        }
        out.push_str("}\n");
        Ok(out)
    }

    /// Maximal sets of `family` that are lattice elements, a convenience
    /// for callers filtering candidate families.
    pub fn maximal_elements(&self, family: &[ElemSet]) -> Vec<ElemSet> {
        let f: Vec<ElemSet> = family.iter().copied().filter(|&s| self.is_element(s)).collect();
        maximal_sets(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, catalog_up_to};
    use crate::oracle::Oracle;
    use crate::rack::class_closure;
    use proptest::prelude::*;
    use rand::Rng;

    fn set(v: &[usize]) -> ElemSet {
        v.iter().copied().collect()
    }

    fn s3(choice: ModeChoice) -> SubrackLattice {
        SubrackLattice::of_group(&catalog("S3").unwrap(), choice, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let l = SubrackLattice::explicit(&catalog("Z4").unwrap()).unwrap();
        assert_eq!(l.elements().unwrap().len(), 16);
        let l = SubrackLattice::explicit(&catalog("Z1").unwrap()).unwrap();
        assert_eq!(l.elements().unwrap(), &[ElemSet::EMPTY, set(&[0])]);
        let g = catalog("S3").unwrap();
        let r = Rack::conjugation(&g).unwrap();
        assert_eq!(enumerate_lattice(&r, DEFAULT_CAP).unwrap().elements().unwrap(), brute_force_subracks(&r));
        assert_eq!(brute_force_subracks(&r).len(), 18);
    }

    #[test]
    fn known_counts() {
        for (name, n) in [("S3", 18), ("A4", 52), ("S4", 212)] {
            let g = catalog(name).unwrap();
            let l = SubrackLattice::explicit(&g).unwrap();
            assert_eq!(l.elements().unwrap().len(), n, "{name}");
            assert_eq!(l.count().unwrap(), l.to_implicit().count().unwrap());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = catalog("Z8").unwrap();
        assert_eq!(
            SubrackLattice::of_group(&g, ModeChoice::Explicit, 100).unwrap_err(),
            Error::CapExceeded(100)
        );
        let l = SubrackLattice::of_group(&g, ModeChoice::Auto, 100).unwrap();
        assert_eq!(l.mode(), LatticeMode::Implicit);
        let a5 = catalog("A5").unwrap();
        assert!(matches!(SubrackLattice::explicit(&a5), Err(Error::ImplicitOnly(_))));
        assert_eq!(
            SubrackLattice::of_group(&a5, ModeChoice::Auto, DEFAULT_CAP).unwrap().mode(),
            LatticeMode::Implicit
        );
    }

    #[test]
    fn implicit_view_examples() {
        let l = s3(ModeChoice::Implicit);
        assert_eq!(l.join(set(&[1]), set(&[2])), set(&[1, 2, 3]));
        assert_eq!(l.meet(set(&[0, 1, 2, 3]), set(&[0, 4, 5])), set(&[0]));
        assert!(l.is_element(l.top()));
        let r = Rack::conjugation(&catalog("S3").unwrap()).unwrap();
        assert_eq!(implicit_view(&r).atoms().len(), 6);
    }

    #[test]
    fn maximal_subracks_examples() {
        let g = catalog("S3").unwrap();
        assert_eq!(
            maximal_subracks(&g),
            vec![set(&[1, 2, 3, 4, 5]), set(&[0, 4, 5]), set(&[0, 1, 2, 3])]
        );
        assert_eq!(maximal_subracks(&catalog("D4").unwrap()).len(), 5);
        let z = maximal_subracks(&catalog("Z5").unwrap());
        assert_eq!(z.len(), 5);
        assert!(z.iter().all(|c| c.len() == 4));
    }

    #[test]
    fn closure_examples() {
        for l in [s3(ModeChoice::Explicit), s3(ModeChoice::Implicit)] {
            assert_eq!(l.closure(set(&[1])).unwrap(), set(&[1, 2, 3]));
            assert_eq!(l.closure(set(&[0, 1])).unwrap(), set(&[0, 1, 2, 3]));
            assert!(l.is_closed(set(&[0, 4, 5])).unwrap());
            assert_eq!(l.closure(set(&[1, 2])), Err(Error::NotSubrack));
        }
    }

    #[test]
    fn int_poset_examples() {
        let p = s3(ModeChoice::Explicit).int_poset();
        assert_eq!(p.elements.len(), 8);
        assert!(p.is_boolean);
        assert_eq!(p.atoms().len(), 3);
        let l = s3(ModeChoice::Explicit);
        let chain = l.interval(ElemSet::EMPTY, set(&[1])).unwrap().int_poset();
        assert_eq!(chain.elements.len(), 2);
        assert!(chain.is_boolean);
        let v = SubrackLattice::explicit(&catalog("Z2xZ2").unwrap()).unwrap().int_poset();
        assert_eq!(v.elements.len(), 16);
        assert!(v.is_boolean);
        // [∅, {b,c,d}] has three coatoms {b},{c},{d} meeting in ∅ only.
        let t = l.interval(ElemSet::EMPTY, set(&[1, 2, 3])).unwrap().int_poset();
        assert_eq!(t.elements.len(), 5);
        assert!(!t.is_boolean);
    }

    #[test]
    fn interval_examples() {
        let l = s3(ModeChoice::Explicit);
        let ef = l.interval(ElemSet::EMPTY, set(&[4, 5])).unwrap();
        assert_eq!(ef.elements().unwrap().len(), 4);
        let one = l.interval(set(&[1]), set(&[1])).unwrap();
        assert_eq!(one.elements().unwrap().len(), 1);
        let bcd = l.interval(ElemSet::EMPTY, set(&[1, 2, 3])).unwrap();
        assert_eq!(bcd.elements().unwrap().len(), 5);
        assert_eq!(bcd.lift(bcd.top()), set(&[1, 2, 3]));
        let upper = l.interval(set(&[0]), l.top()).unwrap();
        let expected = l.elements().unwrap().iter().filter(|s| s.contains(0)).count();
        assert_eq!(upper.elements().unwrap().len(), expected);
        assert!(l.interval(set(&[1, 2, 3]), set(&[1])).is_err());
    }

    #[test]
    fn boolean_interval_examples() {
        let l = s3(ModeChoice::Implicit);
        assert!(l.is_boolean_interval(set(&[0, 4, 5])));
        assert!(!l.is_boolean_interval(set(&[1, 2])));
        assert!(l.is_boolean_interval(ElemSet::EMPTY));
        assert!(l.is_boolean_interval(set(&[3])));
    }

    #[test]
    fn boolean_shortcut_matches_enumeration() {
        let l = SubrackLattice::explicit(&catalog("D4").unwrap()).unwrap();
        for &a in l.elements().unwrap() {
            let n = l.interval(ElemSet::EMPTY, a).unwrap().elements().unwrap().len();
            assert_eq!(l.is_boolean_interval(a), n == 1 << a.len(), "{a:?}");
        }
    }

    #[test]
    fn hasse_of_s3() {
        let l = s3(ModeChoice::Explicit);
        let h = l.hasse().unwrap();
        let e = l.elements().unwrap();
        for &(a, b) in h {
            let (lo, hi) = (e[a as usize], e[b as usize]);
            assert!(lo.is_subset(hi) && lo != hi);
            assert!(!e.iter().any(|&m| lo.is_subset(m) && m.is_subset(hi) && m != lo && m != hi));
        }
        // Every non-bottom element covers something.
        for i in 1..e.len() {
            assert!(h.iter().any(|&(_, b)| b as usize == i));
        }
    }

    #[test]
    fn hasse_matches_pairwise_reduction() {
        for name in ["Q8", "A4", "Z2xZ2"] {
            let l = SubrackLattice::explicit(&catalog(name).unwrap()).unwrap();
            let e = l.elements().unwrap();
            let mut naive = Vec::new();
            for (i, &lo) in e.iter().enumerate() {
                for (j, &hi) in e.iter().enumerate() {
                    if lo.is_subset(hi)
                        && lo != hi
                        && !e.iter().any(|&m| lo.is_subset(m) && m.is_subset(hi) && m != lo && m != hi)
                    {
                        naive.push((i as u32, j as u32));
                    }
                }
            }
            assert_eq!(l.hasse().unwrap(), naive.as_slice(), "{name}");
        }
    }

    #[test]
    fn exports() {
        let l = s3(ModeChoice::Explicit);
        let j = l.to_json().unwrap();
        assert_eq!(j.atoms, 6);
        assert_eq!(j.elements.len(), 18);
        assert_eq!(j.elements[0], Vec::<usize>::new());
        let text = serde_json::to_string(&j).unwrap();
        let back: LatticeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        let dot = l.to_dot().unwrap();
        assert!(dot.starts_with("digraph \"S3\" {\n  rankdir=BT;"));
        assert!(dot.contains("n0 [label=\"∅\"]"));
        assert!(matches!(s3(ModeChoice::Implicit).to_dot(), Err(Error::ImplicitOnly(_))));
    }

    #[test]
    fn automorphisms() {
        for l in [s3(ModeChoice::Explicit), s3(ModeChoice::Implicit)] {
            assert!(l.is_automorphism(&[0, 1, 3, 2, 5, 4], 7));
            // The lattice cannot tell e from f.
            assert!(l.is_automorphism(&[0, 1, 2, 3, 5, 4], 7));
            assert!(!l.is_automorphism(&[4, 1, 2, 3, 0, 5], 7));
            // a ↔ b breaks the lattice.
            assert!(!l.is_automorphism(&[1, 0, 2, 3, 4, 5], 7));
        }
    }

    #[test]
    fn coatom_count_is_class_count() {
        for g in catalog_up_to(16) {
            let l = SubrackLattice::explicit(&g).unwrap();
            let classes = g.conjugacy_classes();
            assert_eq!(l.coatoms().len(), classes.len(), "{}", g.name());
            assert_eq!(l.coatoms(), l.to_implicit().coatoms(), "{}", g.name());
        }
    }

    #[test]
    fn closure_is_class_closure_and_subgroups_embed() {
        for g in catalog_up_to(16) {
            let l = SubrackLattice::explicit(&g).unwrap();
            for &s in l.elements().unwrap() {
                assert_eq!(l.closure(s).unwrap(), class_closure(s, &g));
            }
            for h in Oracle::new(&g).unwrap().subgroups() {
                assert!(l.is_element(h.members));
            }
        }
    }

    #[test]
    fn modes_agree_exhaustively_up_to_order_8() {
        for g in catalog_up_to(8) {
            let e = SubrackLattice::explicit(&g).unwrap();
            let i = e.to_implicit();
            let n = g.order();
            for s in (0u64..1 << n).map(ElemSet) {
                assert_eq!(e.is_element(s), i.is_element(s));
                if e.is_element(s) {
                    assert_eq!(e.closure(s), i.closure(s));
                }
            }
            let els = e.elements().unwrap();
            for &s in els {
                for &t in els {
                    assert_eq!(e.meet(s, t), i.meet(s, t));
                    assert_eq!(e.join(s, t), i.join(s, t));
                }
            }
        }
    }

    #[test]
    fn modes_agree_on_random_subsets_up_to_order_16() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in catalog_up_to(16).into_iter().filter(|g| g.order() > 8) {
            let e = SubrackLattice::explicit(&g).unwrap();
            let i = e.to_implicit();
            let mask = g.all().bits();
            for _ in 0..10_000 {
                let (s, t) = (ElemSet(rng.gen::<u64>() & mask), ElemSet(rng.gen::<u64>() & mask));
                assert_eq!(e.is_element(s), i.is_element(s));
                assert_eq!(e.join(s, t), i.join(s, t), "{}", g.name());
                let (cs, ct) = (i.generated(s), i.generated(t));
                assert!(e.is_element(e.meet(cs, ct)));
                assert_eq!(e.closure(cs), i.closure(cs));
            }
        }
    }

    #[test]
    fn lattice_rebuilt_from_pair_joins() {
        for g in catalog_up_to(8) {
            let l = SubrackLattice::explicit(&g).unwrap();
            let n = g.order();
            let pair: Vec<Vec<ElemSet>> = (0..n)
                .map(|x| (0..n).map(|y| l.join(ElemSet::singleton(x), ElemSet::singleton(y))).collect())
                .collect();
            let rebuilt: Vec<ElemSet> = (0u64..1 << n)
                .map(ElemSet)
                .filter(|s| s.iter().all(|x| s.iter().all(|y| pair[x][y].is_subset(*s))))
                .collect();
            assert_eq!(rebuilt, l.elements().unwrap(), "{}", g.name());
        }
    }

    proptest! {
        #[test]
        fn join_is_least_upper_bound(bits1 in any::<u64>(), bits2 in any::<u64>(), which in 0usize..4) {
            let name = ["S3", "D4", "Q8", "A4"][which];
            let l = SubrackLattice::explicit(&catalog(name).unwrap()).unwrap();
            let (s, t) = (l.generated(ElemSet(bits1) & l.top()), l.generated(ElemSet(bits2) & l.top()));
            let j = l.join(s, t);
            prop_assert!(s.is_subset(j) && t.is_subset(j));
            for &u in l.elements().unwrap() {
                if s.is_subset(u) && t.is_subset(u) {
                    prop_assert!(j.is_subset(u));
                }
            }
            prop_assert!(l.is_element(l.meet(s, t)));
        }

        #[test]
        fn closure_is_extensive_monotone_idempotent(bits1 in any::<u64>(), bits2 in any::<u64>()) {
            let l = SubrackLattice::implicit(&catalog("S4").unwrap()).unwrap();
            let s = l.generated(ElemSet(bits1) & l.top());
            let t = l.generated(s | (ElemSet(bits2) & l.top()));
            let cs = l.closure(s).unwrap();
            prop_assert!(s.is_subset(cs));
            prop_assert!(cs.is_subset(l.closure(t).unwrap()));
            prop_assert_eq!(l.closure(cs).unwrap(), cs);
        }
    }
}
