//! Catalog sweep comparing every lattice-derived answer with the oracle.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::ElemSet;
use crate::catalog::catalog_up_to;
use crate::cycle_forms::{
    cycle_form_condition_centerless, equal_cycle_length_with, p_nilpotent_from_lattice, theta_from_forms, CycleForms,
};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::invariants::{
    centralizer_atoms, class_size_frequency, commuting_relation, center_atoms, m_set, maximal_abelian_a,
    maximal_normal_abelian_n,
};
use crate::lattice::{brute_force_subracks, enumerate_lattice, LatticeMode, ModeChoice, SubrackLattice, DEFAULT_CAP};
use crate::nilpotence::{exhaustive_partition_check, hypercenter_quotient, nilpotence_class_from_lattice, EXHAUSTIVE_PARTITION_MAX_ORDER};
use crate::oracle::{prime_divisors, Oracle};
use crate::rack::Rack;

/// Groups up to this order are swept in explicit mode, larger ones in
/// implicit mode.
pub const EXPLICIT_SWEEP_MAX_ORDER: usize = 8;

/// Brute-force subset enumeration runs up to this order.
pub const BRUTE_FORCE_MAX_ORDER: usize = 8;

/// Abelian groups have their `2^n` count checked up to this order.
pub const ABELIAN_COUNT_MAX_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Outcome,
    pub millis: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub group: String,
    pub order: usize,
    pub mode: LatticeMode,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub max_order: usize,
    pub groups: Vec<GroupReport>,
}

impl VerificationReport {
    fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.groups.iter().flat_map(|g| g.checks.iter().map(|c| &c.outcome))
    }

    pub fn failures(&self) -> usize {
        self.outcomes().filter(|o| matches!(o, Outcome::Fail(_))).count()
    }

    pub fn skips(&self) -> usize {
        self.outcomes().filter(|o| matches!(o, Outcome::Skipped(_))).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for g in &self.groups {
            for c in &g.checks {
                let (tag, why) = match &c.outcome {
                    Outcome::Pass => ("PASS", String::new()),
                    Outcome::Fail(r) => ("FAIL", format!(" ({r})")),
                    Outcome::Skipped(r) => ("SKIP", format!(" ({r})")),
                };
                out.push_str(&format!("{tag} {} {}{why}\n", g.group, c.name));
            }
        }
        out.push_str(&format!(
            "{} groups, {} failures, {} skipped\n",
            self.groups.len(),
            self.failures(),
            self.skips()
        ));
        out
    }
}

type Check = std::result::Result<(), String>;

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Check {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn is_cap(e: &Error) -> bool {
    matches!(
        e,
        Error::CapExceeded(_) | Error::IntervalTooLarge { .. } | Error::ImplicitOnly(_) | Error::TooLarge { .. }
    )
}

fn run(name: &'static str, f: impl FnOnce() -> Result<Check>) -> CheckResult {
    let t = Instant::now();
    let outcome = match f() {
        Ok(Ok(())) => Outcome::Pass,
        Ok(Err(why)) => Outcome::Fail(why),
        Err(e) if is_cap(&e) => Outcome::Skipped(e.to_string()),
        Err(e) => Outcome::Fail(e.to_string()),
    };
    CheckResult {
        name,
        outcome,
        millis: t.elapsed().as_secs_f64() * 1e3,
    }
}

/// Enumerator against the brute-force subset filter.
pub fn check_enumeration(g: &FiniteGroup) -> Result<Check> {
    let r = Rack::conjugation(g)?;
    let dfs = enumerate_lattice(&r, DEFAULT_CAP)?;
    let mut brute = brute_force_subracks(&r);
    brute.sort_unstable();
    Ok(expect("subracks", dfs.elements()?.to_vec(), brute))
}

pub fn check_abelian_count(g: &FiniteGroup) -> Result<Check> {
    let l = enumerate_lattice(&Rack::conjugation(g)?, DEFAULT_CAP)?;
    Ok(expect("subrack count", l.count()?, 1usize << g.order()))
}

pub fn check_class_sizes(l: &SubrackLattice, g: &FiniteGroup) -> Result<Check> {
    let mut want = std::collections::BTreeMap::new();
    for s in g.conjugacy_classes().sizes() {
        *want.entry(s).or_insert(0usize) += 1;
    }
    Ok(expect("w", class_size_frequency(l), want))
}

pub fn check_commuting(l: &SubrackLattice, g: &FiniteGroup) -> Result<Check> {
    let n = g.order();
    let want: Vec<ElemSet> = (0..n).map(|x| (0..n).filter(|&y| g.commute(x, y)).collect()).collect();
    Ok(expect("commuting", commuting_relation(l), want))
}

pub fn check_center(l: &SubrackLattice, o: &Oracle) -> Result<Check> {
    Ok(expect("center", center_atoms(l), o.center()))
}

/// Centralizers of every atom and every class.
pub fn check_centralizers(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle) -> Result<Check> {
    let sets = (0..g.order())
        .map(ElemSet::singleton)
        .chain(g.conjugacy_classes().class_sets());
    for s in sets {
        if let Err(e) = expect("centralizer", centralizer_atoms(s, l), o.centralizer(s)) {
            return Ok(Err(e));
        }
    }
    Ok(Ok(()))
}

pub fn check_maximal_abelian(l: &SubrackLattice, o: &Oracle) -> Result<Check> {
    let mut want: Vec<ElemSet> = o.maximal_abelian_subgroups().iter().map(|h| h.members).collect();
    want.sort_unstable();
    Ok(expect("A(G)", maximal_abelian_a(l)?.sets, want))
}

pub fn check_maximal_normal_abelian(l: &SubrackLattice, o: &Oracle) -> Result<Check> {
    let mut want: Vec<ElemSet> = o.maximal_normal_abelian_subgroups().iter().map(|h| h.members).collect();
    want.sort_unstable();
    Ok(expect("N(G)", maximal_normal_abelian_n(l)?.sets, want))
}

/// Members are non-normal subgroups, non-normal maximal subgroups are
/// members, and nothing is left undecided.
pub fn check_m_set(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle) -> Result<Check> {
    let m = m_set(l)?;
    if !m.undecided.is_empty() {
        return Ok(Err(format!("{} undecided entries", m.undecided.len())));
    }
    for &s in &m.members {
        if !o.is_subgroup(s) || o.is_normal(s) {
            return Ok(Err(format!("member {} is not a non-normal subgroup", l.set_label(s))));
        }
    }
    for h in o.maximal_subgroups() {
        if !o.is_normal(h.members) && !m.members.contains(&h.members) {
            return Ok(Err(format!(
                "non-normal maximal subgroup {} missing from {}",
                l.set_label(h.members),
                g.name()
            )));
        }
    }
    Ok(Ok(()))
}

pub fn check_nilpotence(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle, seed: u64) -> Result<Check> {
    Ok(expect("class", nilpotence_class_from_lattice(l, g, seed)?.verdict, o.nilpotence()))
}

pub fn check_hypercenter(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle, seed: u64) -> Result<Check> {
    let (_, q) = hypercenter_quotient(l, g, seed)?;
    Ok(expect("quotient order", q.order(), g.order() / o.hypercenter().len()))
}

pub fn check_exhaustive_partitions(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle, seed: u64) -> Result<Check> {
    let r = exhaustive_partition_check(l, g, seed)?;
    Ok(expect("terminal answers", r.terminal_answers, vec![o.nilpotence()]))
}

/// The lattice verdict matches the oracle whenever the condition holds.
pub fn check_p_nilpotence(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle, seed: u64) -> Result<Check> {
    for p in prime_divisors(g.order()) {
        let r = p_nilpotent_from_lattice(p, l, g, seed)?;
        if let Some(v) = r.verdict {
            if let Err(e) = expect(&format!("p = {p}"), v, o.has_normal_p_complement(p)?) {
                return Ok(Err(e));
            }
        }
    }
    Ok(Ok(()))
}

/// Cycle-form properties on a centerless group.
pub fn check_cycle_forms(l: &SubrackLattice, g: &FiniteGroup, o: &Oracle, seed: u64) -> Result<Check> {
    let forms = CycleForms::compute(l)?;
    let n = g.order();
    for a in 0..n {
        let cycles = o.inner_cycles(a);
        for form in [forms.pseudo(a), forms.refined(a)] {
            if let Some(b) = form
                .blocks
                .iter()
                .find(|b| cycles.iter().any(|c| !c.is_subset(**b) && !c.is_disjoint(**b)))
            {
                return Ok(Err(format!("block {} of {} cuts a cycle", l.set_label(*b), g.label(a))));
            }
            if let Some(b) = form.marked_blocks().find(|b| !cycles.contains(b)) {
                return Ok(Err(format!("marked block {} of {} is not one cycle", l.set_label(b), g.label(a))));
            }
        }
        for v in 0..n {
            if forms.pseudo(v).refines(forms.pseudo(a)) && !forms.refined(v).refines(forms.refined(a)) {
                return Ok(Err(format!("refinement order fails for {} ≤ {}", g.label(v), g.label(a))));
            }
        }
        let ab = forms.associated_abelian(a);
        let ca = o.centralizer(ElemSet::singleton(a));
        let abelian = ab.iter().all(|x| ab.iter().all(|y| g.commute(x, y)));
        if !o.is_subgroup(ab) || !abelian || !ab.is_subset(o.centralizer(ca) & ca) || ab.len() % g.element_order(a) != 0 {
            return Ok(Err(format!("associated abelian set of {} is {}", g.label(a), l.set_label(ab))));
        }
        for x in ab {
            if !equal_cycle_length_with(&forms, x, a, g)?.iter().all(|p| p.holds()) {
                return Ok(Err(format!("cycle lengths differ for x = {}, a = {}", g.label(x), g.label(a))));
            }
        }
    }
    if cycle_form_condition_centerless(l, g, &forms, seed)?.holds {
        let mut got: Vec<Vec<usize>> = theta_from_forms(&forms)?.into_values().collect();
        let mut want: Vec<Vec<usize>> = (1..n).map(|x| prime_divisors(g.element_order(x))).collect();
        got.sort();
        want.sort();
        return Ok(expect("prime sets", got, want));
    }
    Ok(Ok(()))
}

fn sweep_mode(g: &FiniteGroup) -> ModeChoice {
    if g.order() <= EXPLICIT_SWEEP_MAX_ORDER && !g.implicit_only() {
        ModeChoice::Explicit
    } else {
        ModeChoice::Implicit
    }
}

/// Runs every applicable check on one group.
pub fn verify_group(g: &FiniteGroup, seed: u64) -> Result<GroupReport> {
    let l = SubrackLattice::of_group(g, sweep_mode(g), DEFAULT_CAP)?;
    let o = Oracle::new(g)?;
    let n = g.order();
    let mut checks = Vec::new();
    if n <= BRUTE_FORCE_MAX_ORDER {
        checks.push(run("enumeration_matches_brute_force", || check_enumeration(g)));
    }
    if g.is_abelian() && n <= ABELIAN_COUNT_MAX_ORDER {
        checks.push(run("abelian_count", || check_abelian_count(g)));
    }
    checks.push(run("class_size_frequency", || check_class_sizes(&l, g)));
    checks.push(run("commuting_relation", || check_commuting(&l, g)));
    checks.push(run("center", || check_center(&l, &o)));
    checks.push(run("centralizers", || check_centralizers(&l, g, &o)));
    checks.push(run("maximal_abelian", || check_maximal_abelian(&l, &o)));
    checks.push(run("maximal_normal_abelian", || check_maximal_normal_abelian(&l, &o)));
    checks.push(run("m_set", || check_m_set(&l, g, &o)));
    checks.push(run("nilpotence_class", || check_nilpotence(&l, g, &o, seed)));
    checks.push(run("hypercenter_quotient", || check_hypercenter(&l, g, &o, seed)));
    if n <= EXHAUSTIVE_PARTITION_MAX_ORDER {
        checks.push(run("exhaustive_partitions", || check_exhaustive_partitions(&l, g, &o, seed)));
    }
    if n > 1 {
        checks.push(run("p_nilpotence", || check_p_nilpotence(&l, g, &o, seed)));
    }
    if n > 1 && o.center().len() == 1 {
        checks.push(run("cycle_forms", || check_cycle_forms(&l, g, &o, seed)));
    }
    Ok(GroupReport {
        group: g.name().to_string(),
        order: n,
        mode: l.mode(),
        checks,
    })
}

/// Sweeps the catalog up to `max_order`, in catalog order.
pub fn verify_catalog(max_order: usize, seed: u64) -> Result<VerificationReport> {
    let groups = catalog_up_to(max_order)
        .par_iter()
        .map(|g| verify_group(g, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport { max_order, groups })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group_sweep() {
        let r = verify_catalog(1, 0).unwrap();
        assert_eq!(r.groups.len(), 1);
        assert!(r.passed() && r.skips() == 0);
        let z1 = crate::catalog::catalog("Z1").unwrap();
        let l = SubrackLattice::explicit(&z1).unwrap();
        assert_eq!(l.count().unwrap(), 2);
    }

    #[test]
    fn sweep_to_order_eight() {
        let r = verify_catalog(8, 0).unwrap();
        assert!(r.passed(), "{}", r.render_text());
        assert_eq!(r.skips(), 0);
        let names: Vec<&str> = r.groups.iter().map(|g| g.group.as_str()).collect();
        assert_eq!(names, ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z2xZ2", "Z2xZ4", "Z2xZ2xZ2", "S3", "D4", "Q8"]);
        for g in &r.groups {
            let mut names: Vec<&str> = g.checks.iter().map(|c| c.name).collect();
            let len = names.len();
            names.dedup();
            assert_eq!(names.len(), len);
        }
    }
}
