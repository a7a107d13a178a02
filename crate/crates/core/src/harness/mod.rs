//! Exhaustive checks over the two-element field.
//!
//! For a cycle type `C`, the harness builds the flag pair `(V, V')`,
//! enumerates every isometry `g` with `g V_i = V'_i`, keeps the unipotent
//! ones (and, for a quadratic form, those in the identity component), and
//! collects their class labels. These are the classes *adapted* to the pair
//! that have a prime-field witness. The checks then compare the adapted set
//! against `Φ(C)` in the closure order.
//!
//! Labels are `Is(V)`-level in the orthogonal case: a class of the full
//! isometry group that splits into two classes of the identity component is
//! reported once.

mod cache;
mod search;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use cache::ReportCache;
pub use search::IsometrySearch;

use crate::class_labels::{closure_leq, phi_of_elliptic, CycleType, FormKind, SpLabel};
use crate::error::Result;
use crate::flags::{build_flag_pair, FlagPair};
use crate::gf2::{dickson_invariant, is_unipotent, sp_label_of, BitMatrix};

/// Prefix count the search tree is split into before work is handed out.
/// Independent of the thread count so task boundaries never affect output.
const MIN_TASKS: usize = 256;

/// How the enumeration is scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Spread tasks over the global rayon pool. Falls back to sequential
    /// when built without the `parallel` feature.
    #[default]
    Parallel,
    /// Like `Parallel`, on a dedicated pool of `threads` workers.
    ParallelWith {
        threads: usize,
    },
}

impl Execution {
    pub fn with_threads(threads: usize) -> Self {
        if threads <= 1 {
            Execution::Sequential
        } else {
            Execution::ParallelWith { threads }
        }
    }
}

/// Runs `job` on every task prefix and returns the results in task order.
pub fn run_tasks<T, F>(search: &IsometrySearch, exec: Execution, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&IsometrySearch, &[u64]) -> T + Sync + Send,
{
    let tasks = search.split(MIN_TASKS);
    match exec {
        Execution::Sequential => tasks.iter().map(|p| job(search, p)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            tasks.par_iter().map(|p| job(search, p)).collect()
        }
        #[cfg(feature = "parallel")]
        Execution::ParallelWith { threads } => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(|| tasks.par_iter().map(|p| job(search, p)).collect()),
                Err(_) => tasks.iter().map(|p| job(search, p)).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        _ => tasks.iter().map(|p| job(search, p)).collect(),
    }
}

/// Every isometry `g` over the two-element field with `g V_i = V'_i`, in
/// deterministic search order.
pub fn enumerate_coset(pair: &FlagPair) -> Result<Vec<BitMatrix>> {
    let search = IsometrySearch::coset(pair)?;
    let mut out = Vec::new();
    search.for_each(&mut |images| out.push(search.to_matrix(images)));
    Ok(out)
}

/// Every isometry of `space` (small dimensions only).
pub fn enumerate_isometries(space: &crate::gf2::FormedSpace) -> Result<Vec<BitMatrix>> {
    let search = IsometrySearch::whole_group(space)?;
    let mut out = Vec::new();
    search.for_each(&mut |images| out.push(search.to_matrix(images)));
    Ok(out)
}

/// Number of elements in the coset, without classifying them.
pub fn coset_size(pair: &FlagPair, exec: Execution) -> Result<u64> {
    let search = IsometrySearch::coset(pair)?;
    let counts = run_tasks(&search, exec, |s, prefix| {
        let mut count = 0u64;
        s.walk_from(prefix, &mut |_| count += 1);
        count
    });
    Ok(counts.into_iter().sum())
}

/// The unipotent classes adapted to the flag pair of a cycle type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedReport {
    pub cycle_type: CycleType,
    pub form: FormKind,
    /// Field the witnesses were enumerated over.
    pub field: String,
    pub coset_size: u64,
    /// Unipotent coset elements in the identity component.
    pub unipotent_count: u64,
    /// Unipotent coset elements outside the identity component (orthogonal case only).
    pub outside_identity_component: u64,
    pub adapted_labels: Vec<SpLabel>,
    pub phi_label: SpLabel,
}

#[derive(Default)]
struct Partial {
    coset: u64,
    unipotent: u64,
    outside: u64,
    labels: BTreeSet<SpLabel>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.coset += other.coset;
        self.unipotent += other.unipotent;
        self.outside += other.outside;
        self.labels.extend(other.labels);
        self
    }
}

fn classify_subtree(search: &IsometrySearch, prefix: &[u64], pair: &FlagPair) -> Result<Partial> {
    let space = pair.space();
    let mut partial = Partial::default();
    let mut failure = None;
    search.walk_from(prefix, &mut |images| {
        if failure.is_some() {
            return;
        }
        partial.coset += 1;
        let g = search.to_matrix(images);
        let step = (|| -> Result<()> {
            if !is_unipotent(&g)? {
                return Ok(());
            }
            if space.has_quadratic_form() && dickson_invariant(&g, space)? == 1 {
                partial.outside += 1;
                return Ok(());
            }
            partial.unipotent += 1;
            partial.labels.insert(sp_label_of(&g, space)?);
            Ok(())
        })();
        if let Err(e) = step {
            failure = Some(e);
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(partial),
    }
}

/// Builds the flag pair for `ct`, enumerates its coset and classifies the
/// unipotent elements.
pub fn adapted_classes(ct: &CycleType, form: FormKind, exec: Execution) -> Result<AdaptedReport> {
    let pair = build_flag_pair(ct, form.has_quadratic_form())?;
    adapted_classes_for_pair(&pair, form, exec)
}

pub fn adapted_classes_for_pair(pair: &FlagPair, form: FormKind, exec: Execution) -> Result<AdaptedReport> {
    let search = IsometrySearch::coset(pair)?;
    let partials = run_tasks(&search, exec, |s, prefix| classify_subtree(s, prefix, pair));
    let mut total = Partial::default();
    for p in partials {
        total = total.merge(p?);
    }
    Ok(AdaptedReport {
        cycle_type: pair.cycle_type.clone(),
        form,
        field: "GF(2)".into(),
        coset_size: total.coset,
        unipotent_count: total.unipotent,
        outside_identity_component: total.outside,
        adapted_labels: total.labels.into_iter().collect(),
        phi_label: phi_of_elliptic(&pair.cycle_type),
    })
}

/// Outcome of the closure-minimality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub holds: bool,
    pub phi_adapted: bool,
    /// Adapted labels whose closure does not contain `Φ(C)`.
    pub violations: Vec<SpLabel>,
}

/// `Φ(C)` is adapted and lies in the closure of every adapted class.
pub fn theorem_verdict(report: &AdaptedReport) -> Result<TheoremVerdict> {
    let phi = &report.phi_label;
    let phi_adapted = report.adapted_labels.contains(phi);
    let mut violations = Vec::new();
    for x in &report.adapted_labels {
        if !closure_leq(phi, x)? {
            violations.push(x.clone());
        }
    }
    Ok(TheoremVerdict { holds: phi_adapted && violations.is_empty(), phi_adapted, violations })
}

/// `Φ(C)` is the unique minimum of the adapted labels under the closure order.
pub fn unique_min(report: &AdaptedReport) -> Result<bool> {
    let labels = &report.adapted_labels;
    let mut minima = Vec::new();
    for x in labels {
        let mut below_all = true;
        for y in labels {
            if !closure_leq(x, y)? {
                below_all = false;
                break;
            }
        }
        if below_all {
            minima.push(x);
        }
    }
    Ok(minima.len() == 1 && *minima[0] == report.phi_label)
}

/// For every adapted `(c', ε')` and every `i` with `μ_i(c) > 0` (where `c` is
/// the Jordan type of `Φ(C)`) and equal conjugate prefix sums
/// `Σ_{j≤i} c*_j = Σ_{j≤i} c'*_j`, checks `ε'(i) = 1`.
pub fn eps_forced_at_equal_sums(report: &AdaptedReport) -> bool {
    let c = report.phi_label.jordan();
    report.adapted_labels.iter().all(|x| {
        let c2 = x.jordan();
        (1..=c.largest()).all(|i| {
            let applies = c.multiplicity(i) > 0 && c.conjugate_prefix_sum(i) == c2.conjugate_prefix_sum(i);
            !applies || x.extended_epsilon(i) == 1
        })
    })
}

/// Jordan type of `Φ(C)` is dominated by the Jordan type of every adapted class.
pub fn dominance_holds(report: &AdaptedReport) -> Result<bool> {
    let c = report.phi_label.jordan();
    for x in &report.adapted_labels {
        if !c.dominance_leq(x.jordan())? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub theorem: TheoremVerdict,
    pub unique_min: bool,
    pub dominance: bool,
    /// Only evaluated for symplectic runs.
    pub eps_forced_at_equal_sums: Option<bool>,
}

impl Verdicts {
    pub fn all_hold(&self) -> bool {
        self.theorem.holds && self.unique_min && self.dominance && self.eps_forced_at_equal_sums.unwrap_or(true)
    }
}

/// Report plus every verdict; the unit persisted by [`ReportCache`] and
/// printed by the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    #[serde(flatten)]
    pub report: AdaptedReport,
    pub verdicts: Verdicts,
}

pub fn evaluate(report: AdaptedReport) -> Result<VerificationReport> {
    let verdicts = Verdicts {
        theorem: theorem_verdict(&report)?,
        unique_min: unique_min(&report)?,
        dominance: dominance_holds(&report)?,
        eps_forced_at_equal_sums: (report.form == FormKind::Symplectic).then(|| eps_forced_at_equal_sums(&report)),
    };
    Ok(VerificationReport { version: env!("CARGO_PKG_VERSION").to_string(), report, verdicts })
}

pub fn verify(ct: &CycleType, form: FormKind, exec: Execution) -> Result<VerificationReport> {
    evaluate(adapted_classes(ct, form, exec)?)
}

pub fn verify_theorem(ct: &CycleType, form: FormKind, exec: Execution) -> Result<TheoremVerdict> {
    theorem_verdict(&adapted_classes(ct, form, exec)?)
}

pub fn verify_unique_min(ct: &CycleType, form: FormKind, exec: Execution) -> Result<bool> {
    unique_min(&adapted_classes(ct, form, exec)?)
}

pub fn eps_forced_check(ct: &CycleType, exec: Execution) -> Result<bool> {
    Ok(eps_forced_at_equal_sums(&adapted_classes(ct, FormKind::Symplectic, exec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{preserves_forms, FormedSpace};

    fn ct(s: &str) -> CycleType {
        CycleType::parse(s).unwrap()
    }

    fn label(s: &str) -> SpLabel {
        serde_json::from_str(s).unwrap()
    }

    /// Brute-force oracle: all 2^16 matrices of size 4, filtered by the
    /// defining conditions.
    fn brute_force_coset_n2(pair: &FlagPair) -> Vec<BitMatrix> {
        let space = pair.space();
        let mut out = Vec::new();
        for bits in 0u32..(1 << 16) {
            let rows: Vec<Vec<u8>> =
                (0..4).map(|r| (0..4).map(|c| ((bits >> (4 * r + c)) & 1) as u8).collect()).collect();
            let g = BitMatrix::from_bit_rows(&rows).unwrap();
            if !preserves_forms(&g, space).unwrap() {
                continue;
            }
            if (0..=4).all(|i| pair.a.step(i).image_under(&g).unwrap() == *pair.b.step(i)) {
                out.push(g);
            }
        }
        out
    }

    #[test]
    fn coset_matches_brute_force_at_n2() {
        for (cycles, with_q, expected) in [("2", false, 16), ("1,1", false, 16), ("1,1", true, 4)] {
            let pair = build_flag_pair(&ct(cycles), with_q).unwrap();
            let mut fast = enumerate_coset(&pair).unwrap();
            let mut slow = brute_force_coset_n2(&pair);
            assert_eq!(fast.len(), expected, "{cycles} q={with_q}");
            fast.sort_by_key(|m| m.to_bit_rows());
            slow.sort_by_key(|m| m.to_bit_rows());
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn coset_elements_map_flags() {
        let pair = build_flag_pair(&ct("2,1"), false).unwrap();
        let coset = enumerate_coset(&pair).unwrap();
        assert_eq!(coset.len(), 512);
        for g in &coset {
            assert!(preserves_forms(g, pair.space()).unwrap());
            for i in 0..=6 {
                assert_eq!(&pair.a.step(i).image_under(g).unwrap(), pair.b.step(i));
            }
        }
    }

    #[test]
    fn whole_group_orders() {
        assert_eq!(enumerate_isometries(&FormedSpace::standard(1, false)).unwrap().len(), 6);
        assert_eq!(enumerate_isometries(&FormedSpace::standard(2, false)).unwrap().len(), 720);
        assert_eq!(enumerate_isometries(&FormedSpace::standard(2, true)).unwrap().len(), 72);
    }

    #[test]
    fn small_reports() {
        let r = adapted_classes(&ct("1,1"), FormKind::Symplectic, Execution::Sequential).unwrap();
        assert_eq!(r.phi_label, label(r#"{"jordan":[2,2],"eps":{"2":1}}"#));
        assert!(r.adapted_labels.contains(&r.phi_label));
        assert!(r.adapted_labels.iter().all(SpLabel::is_valid));

        let r = adapted_classes(&ct("2"), FormKind::Symplectic, Execution::Sequential).unwrap();
        assert!(r.adapted_labels.contains(&label(r#"{"jordan":[4],"eps":{"4":1}}"#)));
        assert!(unique_min(&r).unwrap());
    }

    #[test]
    fn verdict_reports_violations() {
        let mut r = adapted_classes(&ct("1,1"), FormKind::Symplectic, Execution::Sequential).unwrap();
        r.adapted_labels.push(label(r#"{"jordan":[1,1,1,1]}"#));
        let v = theorem_verdict(&r).unwrap();
        assert!(!v.holds);
        assert_eq!(v.violations, vec![label(r#"{"jordan":[1,1,1,1]}"#)]);
        assert!(!unique_min(&r).unwrap());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = ct("2,1");
        let seq = adapted_classes(&c, FormKind::Symplectic, Execution::Sequential).unwrap();
        let par = adapted_classes(&c, FormKind::Symplectic, Execution::ParallelWith { threads: 3 }).unwrap();
        assert_eq!(seq, par);
    }
}
