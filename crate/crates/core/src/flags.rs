//! Complete isotropic flags and the flag pair attached to an elliptic cycle type.
//!
//! A flag `V_0 ⊂ V_1 ⊂ … ⊂ V_{2n}` has `dim V_i = i`, `Q|_{V_i} = 0` and
//! `V_i^⊥ = V_{2n−i}` for `i ≤ n`. Only the lower half is ever chosen; the
//! upper half is always derived by taking perps.
//!
//! For a cycle type `p_1 ≥ … ≥ p_σ` the pair `(V, V')` must satisfy, for each
//! `r ∈ [1, σ]` (writing `p_{<r}`, `p_{≤r}` for partial sums):
//!
//! - for `i ∈ [1, p_r − 1]`: `dim(V'_{p_{<r}+i} ∩ V_{p_{<r}+i}) = p_{<r}+i−r` and
//!   `dim(V'_{p_{<r}+i} ∩ V_{p_{<r}+i+1}) = p_{<r}+i−r+1`;
//! - `dim(V'_{p_{≤r}} ∩ V_{2n−p_{<r}−1}) = p_{≤r}−r` and
//!   `dim(V'_{p_{≤r}} ∩ V_{2n−p_{<r}}) = p_{≤r}−r+1`.

use serde::Serialize;

use crate::class_labels::{CycleType, FormKind};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, FormedSpace, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    space: FormedSpace,
    steps: Vec<Subspace>,
}

impl Flag {
    /// Completes `V_0 ⊂ … ⊂ V_n` by `V_{2n−i} = V_i^⊥` and validates the result.
    pub fn from_lower_half(space: FormedSpace, lower: Vec<Subspace>) -> Result<Self> {
        let dim = space.dim();
        let n = dim / 2;
        if lower.len() != n + 1 {
            return Err(Error::InvalidFlag(format!("expected {} lower steps, got {}", n + 1, lower.len())));
        }
        let mut steps = lower;
        for i in (0..n).rev() {
            let upper = steps[i].perp(&space)?;
            steps.push(upper);
        }
        let flag = Flag { space, steps };
        flag.validate()?;
        Ok(flag)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.space.dim();
        let n = dim / 2;
        if self.steps.len() != dim + 1 {
            return Err(Error::InvalidFlag(format!("{} steps for dimension {dim}", self.steps.len())));
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.ambient() != dim || s.dim() != i {
                return Err(Error::InvalidFlag(format!("step {i} has dimension {}", s.dim())));
            }
            if i > 0 && !self.steps[i - 1].is_subspace_of(s) {
                return Err(Error::InvalidFlag(format!("step {} is not contained in step {i}", i - 1)));
            }
        }
        for i in 0..=n {
            let isotropic = if self.space.has_quadratic_form() {
                self.steps[i].q_restriction_zero(&self.space)?
            } else {
                self.steps[i].is_totally_isotropic(&self.space)
            };
            if !isotropic {
                return Err(Error::InvalidFlag(format!("step {i} is not isotropic")));
            }
            if self.steps[i].perp(&self.space)? != self.steps[dim - i] {
                return Err(Error::InvalidFlag(format!("perp of step {i} is not step {}", dim - i)));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &FormedSpace {
        &self.space
    }

    /// `V_i` for `i ∈ [0, 2n]`.
    pub fn step(&self, i: usize) -> &Subspace {
        &self.steps[i]
    }

    pub fn steps(&self) -> &[Subspace] {
        &self.steps
    }

    /// Vectors `w_0, …, w_{2n−1}` with `V_{j+1} = V_j + ⟨w_j⟩`.
    pub fn adapted_basis(&self) -> Vec<BitVector> {
        self.steps
            .windows(2)
            .map(|w| {
                w[1].basis()
                    .iter()
                    .find(|b| !w[0].contains(b))
                    .expect("consecutive steps differ by one dimension")
                    .clone()
            })
            .collect()
    }
}

/// `V_i = ⟨first i basis vectors⟩`, which is isotropic for `i ≤ n` and
/// already closed under the perp duality for the hyperbolic basis.
pub fn standard_flag(space: &FormedSpace) -> Result<Flag> {
    let dim = space.dim();
    let lower = (0..=dim / 2).map(|i| Subspace::coordinate(dim, &(0..i).collect::<Vec<_>>())).collect();
    Flag::from_lower_half(space.clone(), lower)
}

/// One required intersection dimension `dim(V'_{prime} ∩ V_{base}) = dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Incidence {
    pub prime: usize,
    pub base: usize,
    pub dim: usize,
}

/// The incidence equalities the pair must satisfy for `ct` in dimension `2n`.
pub fn incidence_conditions(ct: &CycleType) -> Vec<Incidence> {
    let nn = 2 * ct.n() as usize;
    let mut out = Vec::new();
    for r in 1..=ct.sigma() {
        let before = ct.before(r) as usize;
        let through = ct.through(r) as usize;
        for i in 1..ct.p(r) as usize {
            let j = before + i;
            out.push(Incidence { prime: j, base: j, dim: j - r });
            out.push(Incidence { prime: j, base: j + 1, dim: j + 1 - r });
        }
        out.push(Incidence { prime: through, base: nn - before - 1, dim: through - r });
        out.push(Incidence { prime: through, base: nn - before, dim: through - r + 1 });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagPair {
    /// Plays `V_*`.
    pub a: Flag,
    /// Plays `V'_*`.
    pub b: Flag,
    pub cycle_type: CycleType,
}

impl FlagPair {
    pub fn space(&self) -> &FormedSpace {
        self.a.space()
    }

    /// `dims[j][i] = dim(V'_j ∩ V_i)`.
    pub fn intersection_dims(&self) -> Vec<Vec<usize>> {
        self.b
            .steps()
            .iter()
            .map(|vj| self.a.steps().iter().map(|vi| vj.intersect(vi).expect("same ambient").dim()).collect())
            .collect()
    }
}

/// Whether every incidence equality holds for the pair's cycle type.
pub fn check_flag_conditions(pair: &FlagPair) -> bool {
    let nn = pair.space().dim();
    if pair.a.space() != pair.b.space() || pair.cycle_type.n() as usize * 2 != nn {
        return false;
    }
    incidence_conditions(&pair.cycle_type)
        .iter()
        .all(|c| pair.b.step(c.prime).intersect(pair.a.step(c.base)).map(|s| s.dim()).ok() == Some(c.dim))
}

/// Builds `(V, V')` for `ct`: `V` is the standard flag and `V'` a coordinate
/// flag found by backtracking over signed orderings of the hyperbolic basis,
/// pruned by the incidence equalities as soon as their `V'` step is fixed.
pub fn build_flag_pair(ct: &CycleType, with_q: bool) -> Result<FlagPair> {
    let form = if with_q { FormKind::Orthogonal } else { FormKind::Symplectic };
    ct.check_for(form)?;
    let n = ct.n() as usize;
    let dim = 2 * n;
    let space = FormedSpace::standard(n, with_q);
    let a = standard_flag(&space)?;

    let mut by_prime: Vec<Vec<Incidence>> = vec![Vec::new(); n + 1];
    for c in incidence_conditions(ct) {
        by_prime[c.prime].push(c);
    }

    struct Search<'a> {
        space: &'a FormedSpace,
        a: &'a Flag,
        by_prime: &'a [Vec<Incidence>],
        chosen: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn step_ok(&self) -> Result<bool> {
            let dim = self.space.dim();
            let j = self.chosen.len();
            let vj = Subspace::coordinate(dim, &self.chosen);
            if self.space.has_quadratic_form() && !vj.q_restriction_zero(self.space)? {
                return Ok(false);
            }
            for c in &self.by_prime[j] {
                if vj.intersect(self.a.step(c.base))?.dim() != c.dim {
                    return Ok(false);
                }
            }
            Ok(true)
        }

        fn run(&mut self) -> Result<bool> {
            let dim = self.space.dim();
            if self.chosen.len() == dim / 2 {
                return Ok(true);
            }
            for k in 0..dim {
                let pair = k.min(dim - 1 - k);
                if self.used[pair] {
                    continue;
                }
                self.used[pair] = true;
                self.chosen.push(k);
                if self.step_ok()? && self.run()? {
                    return Ok(true);
                }
                self.chosen.pop();
                self.used[pair] = false;
            }
            Ok(false)
        }
    }

    let mut search = Search { space: &space, a: &a, by_prime: &by_prime, chosen: Vec::new(), used: vec![false; n] };
    if !search.run()? {
        return Err(Error::FlagSearchExhausted(ct.to_string()));
    }
    let lower = (0..=n).map(|j| Subspace::coordinate(dim, &search.chosen[..j])).collect();
    let b = Flag::from_lower_half(space, lower)?;
    let pair = FlagPair { a, b, cycle_type: ct.clone() };
    debug_assert!(check_flag_conditions(&pair));
    Ok(pair)
}

/// Names of the hyperbolic basis vectors in coordinate order: `e1 … en fn … f1`.
pub fn basis_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).chain((1..=n).rev().map(|i| format!("f{i}"))).collect()
}

/// Audit view of a flag pair, for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct FlagPairSummary {
    pub cycle_type: CycleType,
    pub form: FormKind,
    pub basis: Vec<String>,
    /// Basis indices spanning each step of `V_*`, or `None` for a non-coordinate step.
    pub a_steps: Vec<Option<Vec<usize>>>,
    pub b_steps: Vec<Option<Vec<usize>>>,
    /// `intersection_dims[j][i] = dim(V'_j ∩ V_i)`.
    pub intersection_dims: Vec<Vec<usize>>,
    pub conditions_hold: bool,
}

fn coordinate_indices(s: &Subspace) -> Option<Vec<usize>> {
    s.basis().iter().map(|b| (b.count_ones() == 1).then(|| b.first_one().unwrap())).collect()
}

impl FlagPairSummary {
    pub fn new(pair: &FlagPair) -> Self {
        let form = if pair.space().has_quadratic_form() { FormKind::Orthogonal } else { FormKind::Symplectic };
        FlagPairSummary {
            cycle_type: pair.cycle_type.clone(),
            form,
            basis: basis_names(pair.space().dim() / 2),
            a_steps: pair.a.steps().iter().map(coordinate_indices).collect(),
            b_steps: pair.b.steps().iter().map(coordinate_indices).collect(),
            intersection_dims: pair.intersection_dims(),
            conditions_hold: check_flag_conditions(pair),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_labels::enumerate_cycle_types;

    fn ct(s: &str) -> CycleType {
        CycleType::parse(s).unwrap()
    }

    #[test]
    fn standard_flag_steps() {
        let s = FormedSpace::standard(2, false);
        let f = standard_flag(&s).unwrap();
        assert_eq!(f.step(1), &Subspace::coordinate(4, &[0]));
        assert_eq!(f.step(3), &f.step(1).perp(&s).unwrap());
        assert_eq!(f.step(3), &Subspace::coordinate(4, &[0, 1, 2]));
        for n in 1..=5 {
            for with_q in [false, true] {
                assert!(standard_flag(&FormedSpace::standard(n, with_q)).unwrap().validate().is_ok());
            }
        }
    }

    #[test]
    fn rejects_non_isotropic_lower_half() {
        let s = FormedSpace::standard(2, false);
        let lower = vec![Subspace::zero(4), Subspace::coordinate(4, &[0]), Subspace::coordinate(4, &[0, 3])];
        assert!(Flag::from_lower_half(s, lower).is_err());
    }

    #[test]
    fn conditions_for_one_one() {
        let conds = incidence_conditions(&ct("1,1"));
        assert!(conds.contains(&Incidence { prime: 1, base: 3, dim: 0 }));
        assert!(conds.contains(&Incidence { prime: 1, base: 4, dim: 1 }));
        assert_eq!(conds.len(), 4);
    }

    #[test]
    fn equal_flags_fail_for_single_cycle() {
        for n in 2..=4 {
            let s = FormedSpace::standard(n, false);
            let f = standard_flag(&s).unwrap();
            let pair = FlagPair { a: f.clone(), b: f, cycle_type: ct(&n.to_string()) };
            assert!(!check_flag_conditions(&pair));
            // dim(V'_n ∩ V_{2n-1}) is n, not n - 1
            assert_eq!(pair.intersection_dims()[n][2 * n - 1], n);
        }
    }

    #[test]
    fn built_pairs_pass_for_small_ranks() {
        for n in 2..=5 {
            for form in [FormKind::Symplectic, FormKind::Orthogonal] {
                for c in enumerate_cycle_types(n, form) {
                    let pair = build_flag_pair(&c, form.has_quadratic_form()).unwrap();
                    assert!(check_flag_conditions(&pair), "{c} {form}");
                    pair.a.validate().unwrap();
                    pair.b.validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn known_small_pairs() {
        // cycles (2): V'_1 = <e2>, V'_2 = <e2, f1>
        let p = build_flag_pair(&ct("2"), false).unwrap();
        assert_eq!(p.b.step(1), &Subspace::coordinate(4, &[1]));
        assert_eq!(p.b.step(2), &Subspace::coordinate(4, &[1, 3]));
        // cycles (1,1): V' is opposite to V
        let p = build_flag_pair(&ct("1,1"), false).unwrap();
        assert_eq!(p.b.step(2), &Subspace::coordinate(4, &[2, 3]));
        assert!(p.intersection_dims()[2][2] == 0);
    }

    #[test]
    fn intersection_pattern_is_monotone_with_unit_steps() {
        for c in enumerate_cycle_types(4, FormKind::Symplectic) {
            let dims = build_flag_pair(&c, false).unwrap().intersection_dims();
            for j in 0..dims.len() {
                for i in 0..dims.len() {
                    if i + 1 < dims.len() {
                        assert!(dims[j][i + 1] - dims[j][i] <= 1);
                    }
                    if j + 1 < dims.len() {
                        assert!(dims[j + 1][i] - dims[j][i] <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonal_needs_even_sigma() {
        assert!(build_flag_pair(&ct("2,1,1"), true).is_err());
    }

    #[test]
    fn summary_is_coordinate() {
        let p = build_flag_pair(&ct("2,1"), false).unwrap();
        let s = FlagPairSummary::new(&p);
        assert!(s.conditions_hold);
        assert!(s.b_steps.iter().all(Option::is_some));
        assert_eq!(s.basis, ["e1", "e2", "e3", "f3", "f2", "f1"]);
    }
}
