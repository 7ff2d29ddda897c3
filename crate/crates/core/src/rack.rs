//! Racks given by operation tables, with the conjugation quandle of a group
//! as the main instance.

use std::collections::HashMap;

use crate::bitset::{ElemSet, MAX_ELEMS};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Where a rack's operation table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RackBacking {
    /// `a ▷ b = a·b·a⁻¹` over a group.
    Conjugation,
    /// An explicit table, e.g. a subrack re-indexed as a rack of its own.
    Abstract,
}

/// A finite rack on `0..size`; `op(a, b) = a ▷ b`.
#[derive(Clone, Debug)]
pub struct Rack {
    size: usize,
    op: Vec<u8>,
    backing: RackBacking,
}

impl Rack {
    /// The conjugation quandle of `g`.
    pub fn conjugation(g: &FiniteGroup) -> Result<Self> {
        g.require_small()?;
        let n = g.order();
        let mut op = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                op.push(g.conj(a, b) as u8);
            }
        }
        Ok(Rack {
            size: n,
            op,
            backing: RackBacking::Conjugation,
        })
    }

    /// A rack from an explicit table; axioms A1 and A2 are checked.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n > MAX_ELEMS {
            return Err(Error::TooLarge {
                got: n,
                max: MAX_ELEMS,
            });
        }
        let mut op = Vec::with_capacity(n * n);
        for row in table {
            if row.len() != n || row.iter().any(|&v| v >= n) {
                return Err(Error::Malformed("rack table must be square over 0..n".into()));
            }
            op.extend(row.iter().map(|&v| v as u8));
        }
        let r = Rack {
            size: n,
            op,
            backing: RackBacking::Abstract,
        };
        r.check_axioms()?;
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn backing(&self) -> RackBacking {
        self.backing
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.size)
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.op[a * self.size + b] as usize
    }

    /// A1 (self-distributivity) and A2 (left translations are bijections).
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.size;
        for a in 0..n {
            let row: ElemSet = (0..n).map(|b| self.op(a, b)).collect();
            if row.len() != n {
                return Err(Error::RackAxiom("A2"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.op(a, b);
                for c in 0..n {
                    if self.op(a, self.op(b, c)) != self.op(ab, self.op(a, c)) {
                        return Err(Error::RackAxiom("A1"));
                    }
                }
            }
        }
        Ok(())
    }

    /// A3: `a ▷ a = a` for all `a`.
    pub fn is_quandle(&self) -> bool {
        (0..self.size).all(|a| self.op(a, a) == a)
    }

    /// `S ▷ T = { s ▷ t : s ∈ S, t ∈ T }`.
    pub fn set_conjugate(&self, s: ElemSet, t: ElemSet) -> ElemSet {
        let mut out = ElemSet::EMPTY;
        for x in s {
            for y in t {
                out.insert(self.op(x, y));
            }
        }
        out
    }

    /// `S ▷ S ⊆ S`. On a finite rack this already forces equality, since
    /// each left translation restricted to `S` is injective.
    pub fn is_subrack(&self, s: ElemSet) -> bool {
        s.iter().all(|x| s.iter().all(|y| s.contains(self.op(x, y))))
    }

    /// Least subrack containing `s`.
    pub fn subrack_generated(&self, s: ElemSet) -> ElemSet {
        self.close_from(ElemSet::EMPTY, s)
    }

    /// Least subrack containing `base ∪ extra`, where `base` is already a
    /// subrack. Only pairs involving a new element are examined.
    pub fn close_from(&self, base: ElemSet, extra: ElemSet) -> ElemSet {
        let mut set = base;
        let mut work: Vec<usize> = Vec::with_capacity(self.size);
        for x in extra - base {
            set.insert(x);
            work.push(x);
        }
        while let Some(x) = work.pop() {
            for y in set {
                let z = self.op(x, y);
                if set.insert(z) {
                    work.push(z);
                }
                let w = self.op(y, x);
                if set.insert(w) {
                    work.push(w);
                }
            }
        }
        set
    }

    /// The subrack `t` as a rack in its own right, indexed `0..|t|` in
    /// increasing parent order. Returns the rack and the embedding
    /// (local index → parent index).
    pub fn restrict(&self, t: ElemSet) -> Result<(Rack, Vec<usize>)> {
        if !self.is_subrack(t) {
            return Err(Error::NotSubrack);
        }
        let emb: Vec<usize> = t.to_vec();
        let mut local = vec![usize::MAX; self.size];
        for (i, &p) in emb.iter().enumerate() {
            local[p] = i;
        }
        let m = emb.len();
        let mut op = Vec::with_capacity(m * m);
        for &a in &emb {
            for &b in &emb {
                op.push(local[self.op(a, b)] as u8);
            }
        }
        Ok((
            Rack {
                size: m,
                op,
                backing: RackBacking::Abstract,
            },
            emb,
        ))
    }

    /// `b ↦ a ▷ b` as an image array.
    pub fn left_translation(&self, a: usize) -> InnerPermutation {
        InnerPermutation {
            source: a,
            images: (0..self.size).map(|b| self.op(a, b)).collect(),
        }
    }

    /// Orbits of the group generated by all left translations.
    pub fn inner_orbits(&self) -> Vec<ElemSet> {
        let mut seen = ElemSet::EMPTY;
        let mut out = Vec::new();
        for x in 0..self.size {
            if seen.contains(x) {
                continue;
            }
            let mut orbit = ElemSet::singleton(x);
            let mut work = vec![x];
            while let Some(y) = work.pop() {
                for a in 0..self.size {
                    let z = self.op(a, y);
                    if orbit.insert(z) {
                        work.push(z);
                    }
                }
            }
            seen |= orbit;
            out.push(orbit);
        }
        out
    }
}

/// `K_G(S)`: union of the conjugacy classes meeting `s`.
pub fn class_closure(s: ElemSet, g: &FiniteGroup) -> ElemSet {
    let mut out = ElemSet::EMPTY;
    for x in s {
        for y in 0..g.order() {
            out.insert(g.conj(y, x));
        }
    }
    out
}

/// The permutation `φ_a : b ↦ a ▷ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerPermutation {
    pub source: usize,
    pub images: Vec<usize>,
}

impl InnerPermutation {
    pub fn is_permutation(&self) -> bool {
        let s: ElemSet = self.images.iter().copied().collect();
        s.len() == self.images.len()
    }

    /// `φ(x ▷ y) = φ(x) ▷ φ(y)` for all `x, y`.
    pub fn is_automorphism_of(&self, r: &Rack) -> bool {
        let n = r.size();
        (0..n).all(|x| {
            (0..n).all(|y| self.images[r.op(x, y)] == r.op(self.images[x], self.images[y]))
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// `Φ : G → Sym(G)`, `a ↦ φ_a`, with its image and fibers.
#[derive(Clone, Debug)]
pub struct InnerMap {
    pub perms: Vec<InnerPermutation>,
    /// Distinct permutations in order of first appearance; `Φ(G)`.
    pub image: Vec<Vec<usize>>,
    /// `fiber[a]` is the index in `image` of `φ_a`.
    pub fiber: Vec<usize>,
}

impl InnerMap {
    /// Elements sent to the identity permutation.
    pub fn kernel(&self) -> ElemSet {
        self.perms
            .iter()
            .filter(|p| p.is_identity())
            .map(|p| p.source)
            .collect()
    }

    pub fn image_order(&self) -> usize {
        self.image.len()
    }
}

pub fn inner_map(g: &FiniteGroup) -> Result<InnerMap> {
    let r = Rack::conjugation(g)?;
    let perms: Vec<InnerPermutation> = (0..g.order()).map(|a| r.left_translation(a)).collect();
    let mut index: HashMap<&[usize], usize> = HashMap::new();
    let mut image: Vec<Vec<usize>> = Vec::new();
    let mut fiber = Vec::with_capacity(perms.len());
    for p in &perms {
        let next = index.len();
        let id = *index.entry(p.images.as_slice()).or_insert(next);
        if id == image.len() {
            image.push(p.images.clone());
        }
        fiber.push(id);
    }
    Ok(InnerMap {
        perms,
        image,
        fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::oracle::Oracle;
    use proptest::prelude::*;

    fn s3() -> (FiniteGroup, Rack) {
        let g = catalog("S3").unwrap();
        let r = Rack::conjugation(&g).unwrap();
        (g, r)
    }

    fn set(v: &[usize]) -> ElemSet {
        v.iter().copied().collect()
    }

    // S3 labels: a=0 b=1 c=2 d=3 e=4 f=5

    #[test]
    fn conjugation_quandle_examples() {
        let (_, r) = s3();
        assert!(r.is_quandle());
        r.check_axioms().unwrap();
        assert_eq!(r.op(1, 2), 3);
        assert_eq!(r.op(4, 5), 5);
        let z = Rack::conjugation(&catalog("Z5").unwrap()).unwrap();
        assert!((0..5).all(|a| (0..5).all(|b| z.op(a, b) == b)));
    }

    #[test]
    fn set_conjugate_examples() {
        let (_, r) = s3();
        assert_eq!(r.set_conjugate(ElemSet::EMPTY, set(&[1, 2])), ElemSet::EMPTY);
        assert_eq!(r.set_conjugate(set(&[1, 2, 3]), set(&[1, 2, 3])), set(&[1, 2, 3]));
        assert_eq!(r.set_conjugate(set(&[1]), set(&[4])), set(&[5]));
    }

    #[test]
    fn subrack_membership_and_generation() {
        let (g, r) = s3();
        assert!(!r.is_subrack(set(&[1, 2])));
        assert!(r.is_subrack(ElemSet::EMPTY));
        assert!(r.is_subrack(r.all()));
        for h in Oracle::new(&g).unwrap().subgroups() {
            assert!(r.is_subrack(h.members));
        }
        assert_eq!(r.subrack_generated(set(&[1])), set(&[1]));
        assert_eq!(r.subrack_generated(set(&[1, 2])), set(&[1, 2, 3]));
        assert_eq!(r.subrack_generated(set(&[1, 4])), set(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn class_closure_examples() {
        let (g, _) = s3();
        assert_eq!(class_closure(set(&[1]), &g), set(&[1, 2, 3]));
        assert_eq!(class_closure(set(&[0]), &g), set(&[0]));
        assert_eq!(class_closure(set(&[0, 4]), &g), set(&[0, 4, 5]));
    }

    #[test]
    fn inner_map_examples() {
        let im = inner_map(&catalog("Z6").unwrap()).unwrap();
        assert_eq!(im.image_order(), 1);
        let im = inner_map(&catalog("S3").unwrap()).unwrap();
        assert_eq!(im.image_order(), 6);
        let im = inner_map(&catalog("Q8").unwrap()).unwrap();
        assert_eq!(im.image_order(), 4);
    }

    #[test]
    fn inner_map_is_homomorphism_with_central_kernel() {
        for name in ["S3", "Q8", "D4", "A4", "Dic3", "M16", "S4"] {
            let g = catalog(name).unwrap();
            let r = Rack::conjugation(&g).unwrap();
            let im = inner_map(&g).unwrap();
            assert_eq!(im.kernel(), Oracle::new(&g).unwrap().center(), "{name}");
            for a in 0..g.order() {
                assert!(im.perms[a].is_permutation());
                assert!(im.perms[a].is_automorphism_of(&r));
                for b in 0..g.order() {
                    let ab = g.mul(a, b);
                    let composed: Vec<usize> =
                        (0..g.order()).map(|x| im.perms[a].images[im.perms[b].images[x]]).collect();
                    assert_eq!(im.perms[ab].images, composed);
                }
            }
        }
    }

    #[test]
    fn abstract_tables_are_checked() {
        // Not A2: a constant row.
        assert_eq!(
            Rack::from_table(&[vec![0, 0], vec![0, 1]]).unwrap_err(),
            Error::RackAxiom("A2")
        );
        // Trivial rack on 3 points passes; the cyclic shift rack is a rack
        // but not a quandle.
        let shift = Rack::from_table(&[vec![1, 2, 0], vec![1, 2, 0], vec![1, 2, 0]]).unwrap();
        assert!(!shift.is_quandle());
        // a ▷ b = 2a - b mod 3 (dihedral quandle) is a quandle.
        let t: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| (2 * a + 3 - b) % 3).collect()).collect();
        assert!(Rack::from_table(&t).unwrap().is_quandle());
    }

    #[test]
    fn restrict_reindexes() {
        let (_, r) = s3();
        let (sub, emb) = r.restrict(set(&[1, 2, 3])).unwrap();
        assert_eq!(emb, vec![1, 2, 3]);
        assert_eq!(sub.op(0, 1), 2);
        assert!(r.restrict(set(&[1, 2])).is_err());
    }

    fn group_strategy() -> impl Strategy<Value = &'static str> {
        prop::sample::select(vec!["S3", "D4", "Q8", "D5", "A4", "Dic3", "S4", "M16"])
    }

    proptest! {
        #[test]
        fn conjugation_composes(name in group_strategy(), seed in any::<u64>()) {
            let g = catalog(name).unwrap();
            let r = Rack::conjugation(&g).unwrap();
            let n = g.order() as u64;
            let (a, b, c) = ((seed % n) as usize, ((seed / n) % n) as usize, ((seed / n / n) % n) as usize);
            prop_assert_eq!(r.op(a, r.op(b, c)), r.op(g.mul(a, b), c));
        }

        #[test]
        fn subrack_iff_pairs_generate_inside(name in group_strategy(), bits in any::<u64>()) {
            let g = catalog(name).unwrap();
            let r = Rack::conjugation(&g).unwrap();
            let s = ElemSet(bits) & r.all();
            let pairs_inside = s.iter().all(|x| s.iter().all(|y| {
                r.subrack_generated(ElemSet::singleton(x).with(y)).is_subset(s)
            }));
            prop_assert_eq!(r.is_subrack(s), pairs_inside);
        }

        #[test]
        fn generation_is_a_closure_operator(name in group_strategy(), b1 in any::<u64>(), b2 in any::<u64>()) {
            let g = catalog(name).unwrap();
            let r = Rack::conjugation(&g).unwrap();
            let s = ElemSet(b1) & r.all();
            let t = s | (ElemSet(b2) & r.all());
            let cs = r.subrack_generated(s);
            prop_assert!(s.is_subset(cs));
            prop_assert!(cs.is_subset(r.subrack_generated(t)));
            prop_assert_eq!(r.subrack_generated(cs), cs);
            prop_assert!(r.is_subrack(cs));
        }
    }
}
