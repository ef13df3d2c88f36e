//! End-to-end runs: grid to homology, and the move checks with their
//! homology comparisons.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::GradedComplex;
use crate::cover::build_lifted;
use crate::error::{Error, Result};
use crate::grid::{Axis, GridDiagram};
use crate::homology::{compare, homology_f2, homology_z, BigradedHomology, Ring};
use crate::maps::commutation::{identify_with_commuted, CommutationSurface};
use crate::maps::cyclic::check_cyclic;
use crate::maps::sparse::{compose, mod2};
use crate::maps::stabilization::{StabilizationPair, SUPPORTED};
use crate::signs::{
    build_constraints, gauge_equivalent, gauge_transform, signed_differential, solve_signs,
    squares_to_zero, SignAssignment, VariableOrder,
};

pub struct Computation {
    pub complex: GradedComplex,
    pub signs: Option<SignAssignment>,
    pub homology: BigradedHomology,
}

/// Builds the lifted complex, checks that the differential squares to zero
/// over `ring`, and computes its homology.
pub fn compute(g: &GridDiagram, m: usize, ring: Ring) -> Result<Computation> {
    let complex = GradedComplex::build(&build_lifted(g, m))?;
    match ring {
        Ring::F2 => {
            let d: Vec<(u32, u32, i64)> = complex
                .differential_f2()
                .into_iter()
                .map(|(a, b)| (a, b, 1))
                .collect();
            if !mod2(&compose(&d, &d)).is_empty() {
                return Err(Error::CheckFailed(
                    "the differential does not square to zero mod 2".into(),
                ));
            }
            let homology = homology_f2(&complex)?;
            Ok(Computation {
                complex,
                signs: None,
                homology,
            })
        }
        Ring::Z => {
            let (signs, d) = signed(&complex, VariableOrder::Canonical)?;
            if !squares_to_zero(complex.len(), &d) {
                return Err(Error::CheckFailed(
                    "the signed differential does not square to zero".into(),
                ));
            }
            let homology = homology_z(&complex, &d)?;
            Ok(Computation {
                complex,
                signs: Some(signs),
                homology,
            })
        }
    }
}

pub fn signed(
    c: &GradedComplex,
    order: VariableOrder,
) -> Result<(SignAssignment, Vec<(u32, u32, i64)>)> {
    let s = solve_signs(c, &build_constraints(c)?, order)?;
    let d = signed_differential(c, &s);
    Ok((s, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaugeReport {
    /// a gauge carries the canonical solution to the reversed one
    pub witness: bool,
    /// the witness transforms one signed differential into the other exactly
    pub transforms: bool,
    pub same_homology: bool,
}

impl GaugeReport {
    pub fn all(&self) -> bool {
        self.witness && self.transforms && self.same_homology
    }
}

/// Solves the sign system twice with different variable orders and compares.
pub fn verify_gauge(c: &GradedComplex) -> Result<GaugeReport> {
    let (s1, d1) = signed(c, VariableOrder::Canonical)?;
    let (s2, d2) = signed(c, VariableOrder::Reversed)?;
    let u = gauge_equivalent(c, &s1, &s2)?;
    let transforms = u
        .as_ref()
        .is_some_and(|u| signed_differential(c, &gauge_transform(c, &s1, u)) == d2);
    let same_homology = homology_z(c, &d1)? == homology_z(c, &d2)?;
    Ok(GaugeReport {
        witness: u.is_some(),
        transforms,
        same_homology,
    })
}

/// Free rank, or dimension over F2, per Alexander grading.
fn ranks(h: &BigradedHomology) -> BTreeMap<Ratio<i64>, usize> {
    h.rank_by_alexander()
}

/// `rank_a H(stabilized) = rank_a H(base) + rank_{a+1} H(base)` for every `a`.
pub fn rank_relation(base: &BigradedHomology, stabilized: &BigradedHomology) -> bool {
    let (b, s) = (ranks(base), ranks(stabilized));
    let one = Ratio::one();
    let mut grades: Vec<Ratio<i64>> = s.keys().copied().collect();
    grades.extend(b.keys().flat_map(|&a| [a, a - one]));
    grades.iter().all(|a| {
        s.get(a).copied().unwrap_or(0)
            == b.get(a).copied().unwrap_or(0) + b.get(&(a + one)).copied().unwrap_or(0)
    })
}

/// Universal coefficients: in every block and level, the F2 dimension is the
/// free rank plus the number of 2-primary torsion summands at that level and
/// one level above it (the differential lowers the level by one).
pub fn universal_coefficients_hold(f2: &BigradedHomology, z: &BigradedHomology) -> bool {
    let key = |a: Ratio<i64>, c: u32, l: i32| (a, c, l);
    let mut dim = BTreeMap::new();
    for e in &f2.entries {
        dim.insert(key(e.alexander, e.component, e.level), e.rank);
    }
    let mut free = BTreeMap::new();
    let mut two = BTreeMap::new();
    for e in &z.entries {
        free.insert(key(e.alexander, e.component, e.level), e.rank);
        two.insert(
            key(e.alexander, e.component, e.level),
            e.torsion.iter().filter(|&&t| t.is_power_of_two()).count(),
        );
    }
    let mut places: Vec<_> = dim.keys().copied().collect();
    for &(a, c, l) in free.keys().chain(two.keys()) {
        places.extend([(a, c, l), (a, c, l - 1)]);
    }
    places.iter().all(|&(a, c, l)| {
        let get = |t: &BTreeMap<_, usize>, l: i32| t.get(&(a, c, l)).copied().unwrap_or(0);
        get(&dim, l) == get(&free, l) + get(&two, l) + get(&two, l + 1)
    })
}

/// One named check of a move report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// whether the move is reported as failed when this check fails
    pub required: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveReport {
    #[serde(rename = "move")]
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub ring: String,
    pub checks: Vec<Check>,
    /// rows of a generator pair where a failing identity breaks
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
}

impl MoveReport {
    fn new(kind: &str, g: &GridDiagram, m: usize, ring: Ring) -> Self {
        MoveReport {
            kind: kind.to_string(),
            n: g.n(),
            m,
            ring: ring.to_string(),
            checks: Vec::new(),
            counterexample: None,
        }
    }

    fn push(&mut self, name: &str, passed: bool, required: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            required,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.required)
    }
}

pub fn verify_cyclic(
    g: &GridDiagram,
    m: usize,
    ring: Ring,
    axis: Axis,
    shift: i64,
) -> Result<MoveReport> {
    let mut r = MoveReport::new("cyclic", g, m, ring);
    let c = check_cyclic(g, m, axis, shift)?;
    r.push("bijection on generators", c.bijective, true);
    r.push("Alexander grading preserved", c.alexander_preserved, true);
    r.push("chain isomorphism over F2", c.f2_isomorphism, true);
    if ring == Ring::Z {
        r.push(
            "chain isomorphism over Z up to gauge",
            c.z_isomorphism,
            true,
        );
    }
    let same = compare(
        &compute(g, m, ring)?.homology,
        &compute(&g.cyclic_permute(axis, shift), m, ring)?.homology,
        Ratio::zero(),
    );
    r.push("homology unchanged", same, true);
    Ok(r)
}

pub fn verify_commute(g: &GridDiagram, m: usize, ring: Ring, column: usize) -> Result<MoveReport> {
    let mut r = MoveReport::new("commute", g, m, ring);
    let cs = CommutationSurface::new(g, column, m)?;
    for t in 0..m {
        let st = cs.step(t)?;
        let c = match ring {
            Ring::F2 => st.check_f2(),
            Ring::Z => st.check_z()?.0,
        };
        r.push(
            &format!("step {t}: pentagon map is a chain map"),
            c.forward_chain_map,
            true,
        );
        r.push(
            &format!("step {t}: inverse pentagon map is a chain map"),
            c.backward_chain_map,
            true,
        );
        r.push(
            &format!("step {t}: hexagon homotopy before"),
            c.homotopy_before,
            true,
        );
        r.push(
            &format!("step {t}: hexagon homotopy after"),
            c.homotopy_after,
            true,
        );
    }
    r.push(
        "final diagram is the commuted grid",
        identify_with_commuted(&cs)?.1,
        true,
    );
    let same = compare(
        &compute(g, m, ring)?.homology,
        &compute(&cs.moved, m, ring)?.homology,
        Ratio::zero(),
    );
    r.push("homology unchanged", same, true);
    Ok(r)
}

/// The rank relation and the left map are required; the right map is
/// reported but not required.
pub fn verify_stabilize(g: &GridDiagram, m: usize, ring: Ring, row: usize) -> Result<MoveReport> {
    let mut r = MoveReport::new("stabilize", g, m, ring);
    let p = StabilizationPair::new(g, row, SUPPORTED, m)?;
    let c = p.check(ring)?;
    r.push(
        "Alexander shift of the identification",
        c.alexander_shift,
        true,
    );
    r.push("maps are filtered", c.filtered, true);
    r.push("F^L is a chain map", c.left_chain_map, true);
    r.push("F^L is onto in homology", c.left_surjective, true);
    r.push("F^R is a chain map", c.right_chain_map, false);
    r.push("cone of F is acyclic", c.quasi_isomorphism, false);
    let related = rank_relation(
        &compute(g, m, ring)?.homology,
        &compute(&p.stabilization.result, m, ring)?.homology,
    );
    r.push("rank relation", related, true);
    if !c.left_chain_map {
        r.counterexample = p.counterexample(true);
    } else if !c.right_chain_map {
        r.counterexample = p.counterexample(false);
    }
    Ok(r)
}
