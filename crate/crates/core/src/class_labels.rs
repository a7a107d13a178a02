//! Labels `(c, ε)` for unipotent classes of the symplectic group in
//! characteristic 2, their closure order, and the elliptic map `Φ`.
//!
//! A label pairs a Jordan type `c` (a partition of `2n` in which every odd
//! part has even multiplicity) with a `{0,1}`-valued function `ε` defined on
//! the even parts of `c`; `ε(i)` is forced to 1 when `i` has odd multiplicity.
//!
//! The closure order is decided by three combinatorial conditions: dominance
//! of Jordan types, an ε-corrected inequality between conjugate prefix sums,
//! and a parity condition at indices where those prefix sums agree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, Partition};

/// Which forms the ambient space carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormKind {
    /// Symplectic form only (`Q = 0`).
    #[serde(rename = "sp")]
    Symplectic,
    /// Split quadratic form whose polarization is the symplectic form.
    #[serde(rename = "so")]
    Orthogonal,
}

impl FormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FormKind::Symplectic => "sp",
            FormKind::Orthogonal => "so",
        }
    }

    pub fn has_quadratic_form(self) -> bool {
        self == FormKind::Orthogonal
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" => Ok(FormKind::Symplectic),
            "so" => Ok(FormKind::Orthogonal),
            other => Err(Error::Parse(format!("unknown form kind {other:?} (expected sp or so)"))),
        }
    }
}

/// Cycle type `p_1 ≥ … ≥ p_σ` of an elliptic Weyl group class; a partition of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType {
    cycles: Partition,
}

impl CycleType {
    pub fn new(cycles: Partition) -> Result<Self> {
        if cycles.is_empty() {
            return Err(Error::InvalidCycleType("empty cycle type".into()));
        }
        Ok(CycleType { cycles })
    }

    /// Parses `"2,1,1"`; parts may come in any order.
    pub fn parse(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<u32>()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| Error::InvalidCycleType(format!("bad cycle length {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(Partition::from_unsorted(parts)?)
    }

    pub fn cycles(&self) -> &Partition {
        &self.cycles
    }

    /// `n = p_1 + … + p_σ`.
    pub fn n(&self) -> u32 {
        self.cycles.total()
    }

    /// `σ`, the number of cycles.
    pub fn sigma(&self) -> usize {
        self.cycles.len()
    }

    /// `p_r` for `r ∈ [1, σ]`.
    pub fn p(&self, r: usize) -> u32 {
        self.cycles.part(r)
    }

    /// `p_{<r}`.
    pub fn before(&self, r: usize) -> u32 {
        self.cycles.prefix_sum(r - 1)
    }

    /// `p_{≤r}`.
    pub fn through(&self, r: usize) -> u32 {
        self.cycles.prefix_sum(r)
    }

    /// Checks the constraints the form kind places on the cycle type.
    pub fn check_for(&self, form: FormKind) -> Result<()> {
        if self.n() < 2 {
            return Err(Error::InvalidCycleType(format!("n = {} < 2", self.n())));
        }
        if form == FormKind::Orthogonal && !self.sigma().is_multiple_of(2) {
            return Err(Error::InvalidCycleType(format!(
                "{} has an odd number of cycles; the orthogonal case needs σ even",
                self.cycles
            )));
        }
        Ok(())
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cycles.parts().iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// All cycle types of `n` valid for `form`, in decreasing lexicographic order.
pub fn enumerate_cycle_types(n: u32, form: FormKind) -> Vec<CycleType> {
    enumerate_partitions(n)
        .into_iter()
        .filter_map(|c| CycleType::new(c).ok())
        .filter(|ct| ct.check_for(form).is_ok())
        .collect()
}

/// A pair `(c, ε)` naming a unipotent class of `Sp_{2n}` in characteristic 2.
///
/// `ε` is kept as an explicit finite map so that [`SpLabel::is_valid`] can
/// detect domain errors; use [`SpLabel::checked`] to build only valid labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpLabel {
    jordan: Partition,
    eps: BTreeMap<u32, u8>,
}

impl SpLabel {
    /// Builds a label without validating it.
    pub fn new(jordan: Partition, eps: BTreeMap<u32, u8>) -> Self {
        SpLabel { jordan, eps }
    }

    pub fn checked(jordan: Partition, eps: BTreeMap<u32, u8>) -> Result<Self> {
        let label = SpLabel { jordan, eps };
        match label.invalidity() {
            None => Ok(label),
            Some(why) => Err(Error::InvalidLabel(why)),
        }
    }

    /// Convenience constructor from slices, e.g. `SpLabel::from_parts(&[4, 2], &[(4, 1), (2, 1)])`.
    pub fn from_parts(jordan: &[u32], eps: &[(u32, u8)]) -> Result<Self> {
        Self::checked(Partition::new(jordan.to_vec())?, eps.iter().copied().collect())
    }

    pub fn jordan(&self) -> &Partition {
        &self.jordan
    }

    pub fn eps(&self) -> &BTreeMap<u32, u8> {
        &self.eps
    }

    /// The dimension `2n` of the underlying space.
    pub fn total(&self) -> u32 {
        self.jordan.total()
    }

    pub fn is_valid(&self) -> bool {
        self.invalidity().is_none()
    }

    fn invalidity(&self) -> Option<String> {
        let c = &self.jordan;
        for (value, mult) in c.multiplicities() {
            if value % 2 == 1 && mult % 2 == 1 {
                return Some(format!("odd part {value} of {c} has odd multiplicity {mult}"));
            }
            if value % 2 == 0 {
                match self.eps.get(&value) {
                    None => return Some(format!("ε missing at even part {value}")),
                    Some(&e) if e > 1 => return Some(format!("ε({value}) = {e} is not 0 or 1")),
                    Some(0) if mult % 2 == 1 => {
                        return Some(format!("ε({value}) must be 1: multiplicity {mult} is odd"))
                    }
                    _ => {}
                }
            }
        }
        if let Some(&i) = self.eps.keys().find(|&&i| i % 2 == 1 || c.multiplicity(i) == 0) {
            return Some(format!("ε defined at {i}, which is not an even part of {c}"));
        }
        None
    }

    /// `ε` extended to all `i ≥ 1`: −1 when `i` is odd or not a part.
    pub fn extended_epsilon(&self, i: u32) -> i8 {
        if i % 2 == 1 || self.jordan.multiplicity(i) == 0 {
            return -1;
        }
        self.eps.get(&i).map_or(-1, |&e| e as i8)
    }
}

impl Ord for SpLabel {
    /// Jordan types in decreasing lexicographic order, then ε values read in
    /// increasing `i`.
    fn cmp(&self, other: &Self) -> Ordering {
        other.jordan.cmp(&self.jordan).then_with(|| self.eps.iter().cmp(other.eps.iter()))
    }
}

impl PartialOrd for SpLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SpLabel {
    /// `[4,2] ε{4:1,2:1}`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ε{{", self.jordan)?;
        for (k, (i, e)) in self.eps.iter().rev().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}:{e}")?;
        }
        write!(f, "}}")
    }
}

struct EpsMap<'a>(&'a BTreeMap<u32, u8>);

impl Serialize for EpsMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // same order as the Jordan parts: largest first
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (i, e) in self.0.iter().rev() {
            map.serialize_entry(&i.to_string(), e)?;
        }
        map.end()
    }
}

impl Serialize for SpLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("jordan", &self.jordan)?;
        map.serialize_entry("eps", &EpsMap(&self.eps))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for SpLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            jordan: Partition,
            #[serde(default)]
            eps: BTreeMap<String, u8>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let eps = raw
            .eps
            .into_iter()
            .map(|(k, v)| {
                k.parse::<u32>()
                    .map(|i| (i, v))
                    .map_err(|_| D::Error::custom(format!("eps key {k:?} is not an integer")))
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(SpLabel::new(raw.jordan, eps))
    }
}

/// All valid labels with Jordan type a partition of `nn`, ordered as by [`Ord`] on [`SpLabel`].
pub fn enumerate_sp_labels(nn: u32) -> Vec<SpLabel> {
    let mut out = Vec::new();
    for jordan in enumerate_partitions(nn) {
        let groups = jordan.multiplicities();
        if groups.iter().any(|&(v, m)| v % 2 == 1 && m % 2 == 1) {
            continue;
        }
        // even parts in increasing order; `None` marks a free choice
        let even: Vec<(u32, Option<u8>)> = groups
            .iter()
            .rev()
            .filter(|(v, _)| v % 2 == 0)
            .map(|&(v, m)| (v, if m % 2 == 1 { Some(1) } else { None }))
            .collect();
        let free = even.iter().filter(|(_, forced)| forced.is_none()).count();
        for choice in 0u32..(1 << free) {
            let mut bit = free;
            let eps = even
                .iter()
                .map(|&(v, forced)| {
                    let e = forced.unwrap_or_else(|| {
                        // first free index is the most significant bit
                        bit -= 1;
                        ((choice >> bit) & 1) as u8
                    });
                    (v, e)
                })
                .collect();
            out.push(SpLabel::new(jordan.clone(), eps));
        }
    }
    out
}

fn check_pair(a: &SpLabel, b: &SpLabel) -> Result<()> {
    let (left, right) = (a.total(), b.total());
    if left != right {
        return Err(Error::TotalMismatch { left, right });
    }
    for l in [a, b] {
        if let Some(why) = l.invalidity() {
            return Err(Error::InvalidLabel(format!("{l}: {why}")));
        }
    }
    Ok(())
}

/// Whether the class of `a` lies in the closure of the class of `b`.
///
/// Conditions (b) and (c) are checked for `i` up to the largest part of
/// either Jordan type plus one; past that all conjugate parts vanish, both
/// sides of (b) equal `2n`, and the parity hypothesis of (c) is never met.
pub fn closure_leq(a: &SpLabel, b: &SpLabel) -> Result<bool> {
    let bound = a.jordan.largest().max(b.jordan.largest()) + 1;
    closure_leq_up_to(a, b, bound)
}

/// [`closure_leq`] with an explicit cutoff for the index `i` in conditions (b), (c).
pub fn closure_leq_up_to(a: &SpLabel, b: &SpLabel, max_i: u32) -> Result<bool> {
    check_pair(a, b)?;
    let (c, c2) = (&a.jordan, &b.jordan);
    if !c.dominance_leq(c2)? {
        return Ok(false);
    }
    for i in 1..=max_i {
        let s = c.conjugate_prefix_sum(i) as i64;
        let s2 = c2.conjugate_prefix_sum(i) as i64;
        let e = a.extended_epsilon(i).max(0) as i64;
        let e2 = b.extended_epsilon(i).max(0) as i64;
        if s - e < s2 - e2 {
            return Ok(false);
        }
        let parity = (c.conjugate_part(i + 1) as i64 - c2.conjugate_part(i + 1) as i64).rem_euclid(2);
        if s == s2 && parity == 1 && b.extended_epsilon(i) == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Φ(C)` for the elliptic class with cycle type `ct`: Jordan blocks
/// `2p_1, …, 2p_σ` with `ε ≡ 1` on every even part.
pub fn phi_of_elliptic(ct: &CycleType) -> SpLabel {
    let jordan = ct.cycles().scaled(2);
    let eps = jordan.multiplicities().into_iter().map(|(v, _)| (v, 1)).collect();
    SpLabel::new(jordan, eps)
}

/// Covering relation of the closure order on a set of labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub nodes: Vec<SpLabel>,
    /// `(lower, upper)` index pairs into `nodes`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl HasseDiagram {
    /// Graphviz rendering; edges point from the smaller class to the larger.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph closure {\n  rankdir=BT;\n");
        for (k, label) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  n{k} [label=\"{label}\"];\n"));
        }
        for &(lo, hi) in &self.edges {
            out.push_str(&format!("  n{lo} -> n{hi};\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn covers(&self) -> impl Iterator<Item = (&SpLabel, &SpLabel)> {
        self.edges.iter().map(|&(lo, hi)| (&self.nodes[lo], &self.nodes[hi]))
    }
}

/// Transitive reduction of [`closure_leq`] restricted to `labels`.
pub fn hasse_diagram(labels: &[SpLabel]) -> Result<HasseDiagram> {
    let n = labels.len();
    let mut leq = vec![vec![false; n]; n];
    for (x, a) in labels.iter().enumerate() {
        for (y, b) in labels.iter().enumerate() {
            leq[x][y] = closure_leq(a, b)?;
        }
    }
    let lt = |x: usize, y: usize| x != y && leq[x][y];
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y)) {
                edges.push((x, y));
            }
        }
    }
    Ok(HasseDiagram { nodes: labels.to_vec(), edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(jordan: &[u32], eps: &[(u32, u8)]) -> SpLabel {
        SpLabel::new(Partition::new(jordan.to_vec()).unwrap(), eps.iter().copied().collect())
    }

    #[test]
    fn validate_examples() {
        assert!(label(&[2, 2], &[(2, 0)]).is_valid());
        assert!(!label(&[3, 1], &[]).is_valid());
        assert!(!label(&[3, 1], &[(2, 1)]).is_valid());
        assert!(!label(&[4, 2], &[(4, 0), (2, 1)]).is_valid());
        assert!(label(&[4, 2], &[(4, 1), (2, 1)]).is_valid());
        // domain errors
        assert!(!label(&[2, 2], &[]).is_valid());
        assert!(!label(&[2, 2], &[(2, 1), (4, 1)]).is_valid());
        assert!(!label(&[1, 1], &[(1, 1)]).is_valid());
        assert!(!label(&[2, 2], &[(2, 2)]).is_valid());
    }

    #[test]
    fn extended_epsilon_examples() {
        let l = label(&[2, 2], &[(2, 1)]);
        assert_eq!(l.extended_epsilon(3), -1);
        assert_eq!(l.extended_epsilon(4), -1);
        assert_eq!(l.extended_epsilon(2), 1);
        assert_eq!(label(&[2, 2], &[(2, 0)]).extended_epsilon(2), 0);
    }

    /// Brute force: every partition, every assignment of {0,1} to every even
    /// part, kept when valid.
    fn brute_force_labels(nn: u32) -> Vec<SpLabel> {
        let mut out = Vec::new();
        for c in enumerate_partitions(nn) {
            let evens: Vec<u32> = c.multiplicities().into_iter().map(|(v, _)| v).filter(|v| v % 2 == 0).collect();
            for bits in 0u32..(1 << evens.len()) {
                let eps = evens.iter().enumerate().map(|(k, &v)| (v, ((bits >> k) & 1) as u8)).collect();
                let l = SpLabel::new(c.clone(), eps);
                if l.is_valid() {
                    out.push(l);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        assert_eq!(enumerate_sp_labels(2).len(), 2);
        assert_eq!(enumerate_sp_labels(4).len(), 5);
        assert_eq!(enumerate_sp_labels(6).len(), 9);
        for nn in (2..=14).step_by(2) {
            let fast = enumerate_sp_labels(nn);
            assert!(fast.windows(2).all(|w| w[0] < w[1]), "sorted and distinct at {nn}");
            assert_eq!(fast, brute_force_labels(nn), "nn = {nn}");
        }
    }

    #[test]
    fn nn4_labels_in_documented_order() {
        let got: Vec<String> = enumerate_sp_labels(4).iter().map(|l| l.to_string()).collect();
        assert_eq!(got, ["[4] ε{4:1}", "[2,2] ε{2:0}", "[2,2] ε{2:1}", "[2,1,1] ε{2:1}", "[1,1,1,1] ε{}"]);
    }

    #[test]
    fn closure_examples() {
        let e0 = label(&[2, 2], &[(2, 0)]);
        let e1 = label(&[2, 2], &[(2, 1)]);
        let t = label(&[2, 1, 1], &[(2, 1)]);
        assert!(closure_leq(&e0, &e0).unwrap());
        assert!(closure_leq(&e0, &e1).unwrap());
        assert!(!closure_leq(&e1, &e0).unwrap());
        assert!(!closure_leq(&t, &e0).unwrap());
        assert!(!closure_leq(&e0, &t).unwrap());
        assert!(closure_leq(&t, &e1).unwrap());
    }

    #[test]
    fn closure_rejects_bad_input() {
        let a = label(&[2, 2], &[(2, 0)]);
        let b = label(&[2], &[(2, 1)]);
        assert!(matches!(closure_leq(&a, &b), Err(Error::TotalMismatch { .. })));
        let bad = label(&[3, 1], &[]);
        assert!(matches!(closure_leq(&bad, &bad), Err(Error::InvalidLabel(_))));
    }

    #[test]
    fn truncation_bound_is_enough() {
        for nn in (2..=12).step_by(2) {
            let labels = enumerate_sp_labels(nn);
            for a in &labels {
                for b in &labels {
                    assert_eq!(closure_leq(a, b).unwrap(), closure_leq_up_to(a, b, 3 * nn + 5).unwrap(), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        let ct = |s: &str| CycleType::parse(s).unwrap();
        assert_eq!(phi_of_elliptic(&ct("2")), label(&[4], &[(4, 1)]));
        assert_eq!(phi_of_elliptic(&ct("1,1")), label(&[2, 2], &[(2, 1)]));
        assert_eq!(phi_of_elliptic(&ct("2,1")), label(&[4, 2], &[(4, 1), (2, 1)]));
        for n in 1..=8 {
            for ct in enumerate_cycle_types(n, FormKind::Symplectic) {
                assert!(phi_of_elliptic(&ct).is_valid());
            }
        }
    }

    #[test]
    fn cycle_type_parsing_and_checks() {
        let ct = CycleType::parse("1, 2,1").unwrap();
        assert_eq!(ct.cycles().parts(), &[2, 1, 1]);
        assert_eq!((ct.n(), ct.sigma()), (4, 3));
        assert_eq!((ct.before(2), ct.through(2)), (2, 3));
        assert!(ct.check_for(FormKind::Symplectic).is_ok());
        assert!(ct.check_for(FormKind::Orthogonal).is_err());
        assert!(CycleType::parse("1").unwrap().check_for(FormKind::Symplectic).is_err());
        assert!(CycleType::parse("1,x").is_err());
        assert!(CycleType::parse("0,2").is_err());
        assert_eq!(enumerate_cycle_types(4, FormKind::Orthogonal).len(), 3);
    }

    #[test]
    fn hasse_examples() {
        let single = hasse_diagram(&enumerate_sp_labels(4)[..1]).unwrap();
        assert!(single.edges.is_empty());

        let h2 = hasse_diagram(&enumerate_sp_labels(2)).unwrap();
        let covers: Vec<_> = h2.covers().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(covers, [("[1,1] ε{}".to_string(), "[2] ε{2:1}".to_string())]);

        let h4 = hasse_diagram(&enumerate_sp_labels(4)).unwrap();
        assert_eq!(h4.nodes.len(), 5);
        // a chain except for the incomparable pair (2,2)ε0, (2,1,1)ε1
        let e0 = label(&[2, 2], &[(2, 0)]);
        let t = label(&[2, 1, 1], &[(2, 1)]);
        assert!(!closure_leq(&e0, &t).unwrap() && !closure_leq(&t, &e0).unwrap());
        assert_eq!(h4.edges.len(), 5);
        let dot = h4.to_dot();
        assert!(dot.contains("[4] ε{4:1}"));
        assert_eq!(dot.matches("->").count(), 5);
    }

    #[test]
    fn json_schema() {
        let l = label(&[4, 2], &[(4, 1), (2, 1)]);
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"jordan":[4,2],"eps":{"4":1,"2":1}}"#);
        let back: SpLabel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        let empty: SpLabel = serde_json::from_str(r#"{"jordan":[1,1]}"#).unwrap();
        assert!(empty.is_valid());
        assert!(serde_json::from_str::<SpLabel>(r#"{"jordan":[2],"eps":{"x":1}}"#).is_err());
    }
}
