//! Exact desk-scale convex geometry.
//!
//! Vertex and facet enumeration run through the double description method
//! on a pointed cone, with exact rational arithmetic, lexicographic
//! insertion order and the rank-based adjacency test. Polytopes are
//! handled through homogenization (vertices) and polarity (facets); the
//! affine hull is carried as explicit equalities, so inputs and outputs
//! are plain behavior/expression vectors.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::corr::BellExpression;
use crate::ineq::{canonicalize_with_forms, constraint_forms, CanonMode, ScaleConvention};
use crate::ratlin::{
    dot, kernel_basis, primitive_integer_form, rank, RatMatrix, RatVector, Rational,
};
use crate::scenario::{PartyCard, Scenario};
use crate::stochmap::{apply_to_expression, LocalTransformation, PartyMap};
use crate::{Error, Result};

/// Halfspace representation: `eq_a x = eq_b` and `ineq_a x <= ineq_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub eq_a: RatMatrix,
    pub eq_b: RatVector,
    pub ineq_a: RatMatrix,
    pub ineq_c: RatVector,
}

impl HRep {
    pub fn new(eq_a: RatMatrix, eq_b: RatVector, ineq_a: RatMatrix, ineq_c: RatVector) -> Self {
        assert_eq!(eq_a.rows(), eq_b.len(), "equality sides mismatch");
        assert_eq!(ineq_a.rows(), ineq_c.len(), "inequality sides mismatch");
        if eq_a.rows() > 0 && ineq_a.rows() > 0 {
            assert_eq!(eq_a.cols(), ineq_a.cols(), "ambient dimension mismatch");
        }
        HRep {
            eq_a,
            eq_b,
            ineq_a,
            ineq_c,
        }
    }

    pub fn dim(&self) -> usize {
        if self.eq_a.rows() > 0 || self.eq_a.cols() > 0 {
            self.eq_a.cols()
        } else {
            self.ineq_a.cols()
        }
    }

    /// Dimension of the affine hull cut out by the equalities.
    pub fn affine_dim(&self) -> usize {
        self.dim() - rank(&self.eq_a)
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rational]) -> bool {
        for r in 0..self.eq_a.rows() {
            if dot(self.eq_a.row(r), x) != self.eq_b[r] {
                return false;
            }
        }
        for r in 0..self.ineq_a.rows() {
            if dot(self.ineq_a.row(r), x) > self.ineq_c[r] {
                return false;
            }
        }
        true
    }
}

/// Vertex representation; the polytopes here are bounded, so vertices are
/// the whole story.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRep {
    pub vertices: Vec<RatVector>,
}

/// Size limits for the double description runs.
#[derive(Clone, Copy, Debug)]
pub struct DdLimits {
    pub max_dim: usize,
    pub max_rays: usize,
    pub max_outputs: usize,
}

impl Default for DdLimits {
    fn default() -> Self {
        DdLimits {
            max_dim: 40,
            max_rays: 200_000,
            max_outputs: 10_000,
        }
    }
}

/// One ray of the working cone: primitive integer coordinates plus the set
/// of processed constraint rows it is tight on.
#[derive(Clone, Debug)]
struct Ray {
    coords: RatVector,
    tight: Vec<u64>,
}

fn bit_get(mask: &[u64], i: usize) -> bool {
    mask[i / 64] >> (i % 64) & 1 == 1
}

fn bit_set(mask: &mut [u64], i: usize) {
    mask[i / 64] |= 1 << (i % 64);
}

fn popcount(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

/// `a` subset of `b`, as bitsets.
fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Machine-integer rank via fraction-free elimination with row gcd
/// reduction; `None` when an intermediate value overflows i128.
fn rank_i128(rows: &[&[i128]]) -> Option<usize> {
    let Some(first) = rows.first() else {
        return Some(0);
    };
    let cols = first.len();
    let mut work: Vec<Vec<i128>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot_at) = (rank..work.len()).find(|&r| work[r][col] != 0) else {
            continue;
        };
        work.swap(rank, pivot_at);
        let pivot = work[rank][col];
        for r in rank + 1..work.len() {
            let factor = work[r][col];
            if factor == 0 {
                continue;
            }
            let mut g: i128 = 0;
            for c in col..cols {
                let lhs = pivot.checked_mul(work[r][c])?;
                let rhs = factor.checked_mul(work[rank][c])?;
                let v = lhs.checked_sub(rhs)?;
                work[r][c] = v;
                g = gcd_i128(g, v);
            }
            if g > 1 {
                for c in col..cols {
                    work[r][c] /= g;
                }
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    Some(rank.min(cols))
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rows of the constraint matrix in both exact and (when they fit)
/// machine-integer form.
struct ConstraintRows {
    exact: Vec<RatVector>,
    ints: Option<Vec<Vec<i128>>>,
}

impl ConstraintRows {
    fn new(b: &RatMatrix) -> Self {
        let exact: Vec<RatVector> = b.iter_rows().map(primitive_integer_form).collect();
        let ints: Option<Vec<Vec<i128>>> = exact
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        debug_assert!(v.denom().is_one());
                        i128::try_from(v.numer().clone()).ok()
                    })
                    .collect()
            })
            .collect();
        ConstraintRows { exact, ints }
    }

    /// Exact rank of the rows selected by `mask`.
    fn masked_rank(&self, mask: &[u64]) -> usize {
        if let Some(ints) = &self.ints {
            let selected: Vec<&[i128]> = (0..self.exact.len())
                .filter(|&i| bit_get(mask, i))
                .map(|i| ints[i].as_slice())
                .collect();
            if let Some(r) = rank_i128(&selected) {
                return r;
            }
        }
        let selected: Vec<RatVector> = (0..self.exact.len())
            .filter(|&i| bit_get(mask, i))
            .map(|i| self.exact[i].clone())
            .collect();
        if selected.is_empty() {
            return 0;
        }
        rank(&RatMatrix::from_rows(selected))
    }
}

/// Extreme rays of the pointed cone `{ t : B t >= 0 }`; requires
/// `rank(B) = cols(B)`. Rows are inserted in the given order after a
/// greedy initial independent set; output rays are primitive integer
/// vectors in lexicographic order.
///
/// Adjacency of a candidate pair is decided in three exact layers: a
/// tight-set cardinality bound, the combinatorial domination test (no
/// third ray is tight wherever both are), and the rank test on the common
/// tight rows, which is the authoritative criterion for every ray that is
/// actually created.
fn extreme_rays(b: &RatMatrix, limits: &DdLimits) -> Result<Vec<RatVector>> {
    let k = b.cols();
    let m = b.rows();
    if k > limits.max_dim {
        return Err(Error::DdLimitExceeded(format!(
            "cone dimension {k} exceeds the limit {}",
            limits.max_dim
        )));
    }
    if rank(b) != k {
        return Err(Error::InvalidInput(
            "double description needs a pointed cone (full-rank constraint matrix)".into(),
        ));
    }
    let rows = ConstraintRows::new(b);

    // greedy initial independent set in row order
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..m {
        if chosen.len() == k {
            break;
        }
        let mut trial: Vec<RatVector> = chosen.iter().map(|&j| rows.exact[j].clone()).collect();
        trial.push(rows.exact[i].clone());
        if rank(&RatMatrix::from_rows(trial)) == chosen.len() + 1 {
            chosen.push(i);
        }
    }
    debug_assert_eq!(chosen.len(), k);

    let b0 = RatMatrix::from_rows(chosen.iter().map(|&i| rows.exact[i].clone()).collect());
    let b0_inv = crate::ratlin::inverse(&b0);

    let words = m.div_ceil(64);
    let mut rays: Vec<Ray> = (0..k)
        .map(|j| {
            let coords = primitive_integer_form(&b0_inv.col_vec(j));
            let mut tight = vec![0u64; words];
            for (slot, &row) in chosen.iter().enumerate() {
                if slot != j {
                    bit_set(&mut tight, row);
                }
            }
            Ray { coords, tight }
        })
        .collect();

    for next in 0..m {
        if chosen.contains(&next) {
            continue;
        }
        let row = &rows.exact[next];
        let values: Vec<Rational> = rays.par_iter().map(|r| dot(row, &r.coords)).collect();
        let mut keep: Vec<Ray> = Vec::new();
        let mut plus: Vec<usize> = Vec::new();
        let mut minus: Vec<usize> = Vec::new();
        for (i, v) in values.iter().enumerate() {
            if v.is_zero() {
                let mut r = rays[i].clone();
                bit_set(&mut r.tight, next);
                keep.push(r);
            } else if v.is_positive() {
                plus.push(i);
            } else {
                minus.push(i);
            }
        }
        for &i in &plus {
            keep.push(rays[i].clone());
        }
        if minus.is_empty() || plus.is_empty() {
            // nothing to cut or everything cut away
            rays = keep;
            continue;
        }

        let needed = k.saturating_sub(2);
        let pairs: Vec<(usize, usize)> = plus
            .iter()
            .flat_map(|&p| minus.iter().map(move |&n| (p, n)))
            .collect();
        let new_rays: Vec<Ray> = pairs
            .par_iter()
            .filter_map(|&(p, n)| {
                let common: Vec<u64> = rays[p]
                    .tight
                    .iter()
                    .zip(&rays[n].tight)
                    .map(|(a, bb)| a & bb)
                    .collect();
                if popcount(&common) < needed {
                    return None;
                }
                // combinatorial domination: a third ray tight on the whole
                // common set means the pair spans a face of dimension > 2
                for (t, other) in rays.iter().enumerate() {
                    if t != p && t != n && is_subset(&common, &other.tight) {
                        return None;
                    }
                }
                // rank-based adjacency on the common tight rows
                if rows.masked_rank(&common) != needed {
                    return None;
                }
                let vp = &values[p];
                let vn = &values[n];
                // positive combination vanishing on the new row
                let combo: RatVector = rays[p]
                    .coords
                    .iter()
                    .zip(&rays[n].coords)
                    .map(|(cp, cn)| cn * vp - cp * vn)
                    .collect();
                let coords = primitive_integer_form(&combo);
                let mut tight = common;
                bit_set(&mut tight, next);
                Some(Ray { coords, tight })
            })
            .collect();
        keep.extend(new_rays);
        if keep.len() > limits.max_rays {
            return Err(Error::DdLimitExceeded(format!(
                "intermediate ray count {} exceeds the limit {}",
                keep.len(),
                limits.max_rays
            )));
        }
        rays = keep;
    }

    let mut out: Vec<RatVector> = rays.into_iter().map(|r| r.coords).collect();
    out.sort();
    let before = out.len();
    out.dedup();
    debug_assert_eq!(
        before,
        out.len(),
        "double description produced a duplicate ray"
    );
    if out.len() > limits.max_outputs {
        return Err(Error::DdLimitExceeded(format!(
            "output count {} exceeds the limit {}",
            out.len(),
            limits.max_outputs
        )));
    }
    Ok(out)
}

/// Vertices of a bounded polytope given in halfspace form. Errors when the
/// polytope is unbounded or a size limit trips.
pub fn dd_vertices(h: &HRep, limits: &DdLimits) -> Result<VRep> {
    let n = h.dim();
    // homogenize: y = (x0, x); equalities become E y = 0, inequalities
    // rows (c, -a) >= 0, plus x0 >= 0
    let eq_rows: Vec<RatVector> = (0..h.eq_a.rows())
        .map(|r| {
            let mut row = Vec::with_capacity(n + 1);
            row.push(-h.eq_b[r].clone());
            row.extend_from_slice(h.eq_a.row(r));
            row
        })
        .collect();
    let kernel: Vec<RatVector> = if eq_rows.is_empty() {
        (0..=n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n + 1];
                v[i] = Rational::one();
                v
            })
            .collect()
    } else {
        kernel_basis(&RatMatrix::from_rows(eq_rows))
    };
    if kernel.is_empty() {
        return Ok(VRep { vertices: vec![] });
    }
    // columns of K are the kernel basis vectors
    let kmat = RatMatrix::from_rows(kernel).transpose();
    let q = kmat.cols();

    let mut b_rows: Vec<RatVector> = Vec::with_capacity(h.ineq_a.rows() + 1);
    {
        // x0 >= 0 row: (1, 0, ..., 0) . K
        let mut x0 = vec![Rational::zero(); n + 1];
        x0[0] = Rational::one();
        b_rows.push(kmat.row_mul(&x0));
    }
    for r in 0..h.ineq_a.rows() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(h.ineq_c[r].clone());
        row.extend(h.ineq_a.row(r).iter().map(|v| -v.clone()));
        b_rows.push(kmat.row_mul(&row));
    }
    let b = RatMatrix::from_rows(b_rows);
    if rank(&b) != q {
        return Err(Error::InvalidInput(
            "polytope is unbounded or contains a line; vertex enumeration needs a bounded one"
                .into(),
        ));
    }
    let rays = extreme_rays(&b, limits)?;
    let mut vertices = Vec::with_capacity(rays.len());
    for r in rays {
        let y = kmat.mul_vec(&r);
        if y[0].is_zero() {
            return Err(Error::InvalidInput(
                "polytope is unbounded (ray at infinity)".into(),
            ));
        }
        debug_assert!(y[0].is_positive(), "x0 >= 0 is a constraint");
        let v: RatVector = y[1..].iter().map(|c| c / &y[0]).collect();
        vertices.push(v);
    }
    vertices.sort();
    vertices.dedup();
    Ok(VRep { vertices })
}

/// Facets (and affine hull) of the convex hull of a vertex set: the
/// extreme rays of the polar cone modulo its lineality space.
pub fn dd_facets(v: &VRep, limits: &DdLimits) -> Result<HRep> {
    if v.vertices.is_empty() {
        return Err(Error::InvalidInput(
            "facet enumeration needs at least one vertex".into(),
        ));
    }
    let n = v.vertices[0].len();
    // dual cone rows (1, v_i)
    let m_rows: Vec<RatVector> = v
        .vertices
        .iter()
        .map(|vert| {
            let mut row = Vec::with_capacity(n + 1);
            row.push(Rational::one());
            row.extend_from_slice(vert);
            row
        })
        .collect();
    let m = RatMatrix::from_rows(m_rows.clone());
    // lineality: affine forms vanishing on every vertex -> equalities
    let lineality = kernel_basis(&m);
    let mut eq_rows: Vec<RatVector> = Vec::new();
    let mut eq_b: RatVector = Vec::new();
    for z in &lineality {
        let prim = primitive_integer_form(z);
        eq_rows.push(prim[1..].to_vec());
        eq_b.push(-prim[0].clone());
    }
    // pointed part: restrict to the orthogonal complement of the lineality
    let wmat = if lineality.is_empty() {
        RatMatrix::identity(n + 1)
    } else {
        RatMatrix::from_rows(kernel_basis(&RatMatrix::from_rows(lineality))).transpose()
    };
    let b_rows: Vec<RatVector> = m_rows.iter().map(|r| wmat.row_mul(r)).collect();
    let b = RatMatrix::from_rows(b_rows);
    let rays = extreme_rays(&b, limits)?;
    let mut ineq_rows: Vec<RatVector> = Vec::new();
    let mut ineq_c: RatVector = Vec::new();
    for r in rays {
        let y = primitive_integer_form(&wmat.mul_vec(&r));
        // ray (y0, y) means y0 + y . x >= 0 on the hull: facet -y . x <= y0
        ineq_rows.push(y[1..].iter().map(|c| -c.clone()).collect());
        ineq_c.push(y[0].clone());
    }
    let eq_a = if eq_rows.is_empty() {
        RatMatrix::zeros(0, n)
    } else {
        RatMatrix::from_rows(eq_rows)
    };
    let ineq_a = if ineq_rows.is_empty() {
        RatMatrix::zeros(0, n)
    } else {
        RatMatrix::from_rows(ineq_rows)
    };
    Ok(HRep::new(eq_a, eq_b, ineq_a, ineq_c))
}

/// The behavior polytope of a scenario in halfspace form: normalization
/// and forbidden-component equalities plus coefficientwise nonnegativity.
pub fn ns_hrep(scenario: &Scenario) -> HRep {
    let forms = constraint_forms(scenario);
    let d = scenario.dim();
    let mut eq_rows = vec![forms.tau.clone()];
    let mut eq_b = vec![Rational::one()];
    for mu in &forms.mu {
        eq_rows.push(mu.clone());
        eq_b.push(Rational::zero());
    }
    let ineq_a = RatMatrix::identity(d).scale(&-Rational::one());
    let ineq_c = vec![Rational::zero(); d];
    HRep::new(RatMatrix::from_rows(eq_rows), eq_b, ineq_a, ineq_c)
}

/// Exact extremality of a feasible point: the tight inequality rows
/// stacked on all equality rows must have full column rank.
pub fn extremal(point: &[Rational], h: &HRep) -> Result<bool> {
    if !h.contains(point) {
        return Err(Error::InvalidInput(
            "extremality test needs a feasible point".into(),
        ));
    }
    let mut rows: Vec<RatVector> = h.eq_a.iter_rows().map(<[Rational]>::to_vec).collect();
    for r in 0..h.ineq_a.rows() {
        if dot(h.ineq_a.row(r), point) == h.ineq_c[r] {
            rows.push(h.ineq_a.row(r).to_vec());
        }
    }
    if rows.is_empty() {
        return Ok(h.dim() == 0);
    }
    Ok(rank(&RatMatrix::from_rows(rows)) == h.dim())
}

/// All deterministic one-way causal behaviors of a two-party scenario:
/// A-before-B strategies `a = f(x), b = g(x, y)` union B-before-A
/// strategies, deduplicated. These are the vertices of the causal
/// polytope.
pub fn causal_vertices(card_a: &PartyCard, card_b: &PartyCard) -> VRep {
    let scenario = Scenario::fully_signaling(vec![card_a.clone(), card_b.clone()]);
    let mut set: BTreeSet<RatVector> = BTreeSet::new();
    enumerate_one_way(&scenario, card_a, card_b, false, &mut set);
    enumerate_one_way(&scenario, card_a, card_b, true, &mut set);
    VRep {
        vertices: set.into_iter().collect(),
    }
}

/// Adds all deterministic strategies where the `flipped` party acts first.
fn enumerate_one_way(
    scenario: &Scenario,
    card_a: &PartyCard,
    card_b: &PartyCard,
    flipped: bool,
    out: &mut BTreeSet<RatVector>,
) {
    let (first, second) = if flipped {
        (card_b, card_a)
    } else {
        (card_a, card_b)
    };
    // f: first party's output per own input
    let mut fs: Vec<Vec<usize>> = vec![vec![]];
    for x in 1..=first.num_inputs() {
        let mut next = Vec::new();
        for f in &fs {
            for a in 1..=first.num_outputs(x) {
                let mut g = f.clone();
                g.push(a);
                next.push(g);
            }
        }
        fs = next;
    }
    // g: second party's output per (first input, own input)
    let pair_count = first.num_inputs() * second.num_inputs();
    let mut gs: Vec<Vec<usize>> = vec![vec![]];
    for slot in 0..pair_count {
        let y = slot % second.num_inputs() + 1;
        let mut next = Vec::new();
        for g in &gs {
            for b in 1..=second.num_outputs(y) {
                let mut h = g.clone();
                h.push(b);
                next.push(h);
            }
        }
        gs = next;
    }
    let d = scenario.dim();
    for f in &fs {
        for g in &gs {
            let mut coeffs = vec![Rational::zero(); d];
            for x in 1..=card_a.num_inputs() {
                for y in 1..=card_b.num_inputs() {
                    let (a, b) = if flipped {
                        let first_in = y;
                        let b_val = f[first_in - 1];
                        let a_val = g[(first_in - 1) * card_a.num_inputs() + (x - 1)];
                        (a_val, b_val)
                    } else {
                        let a_val = f[x - 1];
                        let b_val = g[(x - 1) * card_b.num_inputs() + (y - 1)];
                        (a_val, b_val)
                    };
                    let idx = scenario.tensor_index(&[(a, x), (b, y)]).expect("valid");
                    coeffs[idx] = Rational::one();
                }
            }
            out.insert(coeffs);
        }
    }
}

/// One orbit of facets under the scenario's relabeling group.
#[derive(Clone, Debug)]
pub struct FacetClass {
    /// Lexicographically least canonical form in the orbit, as a
    /// K-inequality.
    pub representative: BellExpression,
    pub orbit_size: usize,
    /// Indices into the facet list of the classified H-representation.
    pub members: Vec<usize>,
}

/// Groups the facets of `h` under per-party relabelings (invertible
/// deterministic maps of equal cardinality), comparing zero-bound
/// canonical forms.
pub fn classify_facets(h: &HRep, scenario: &Scenario) -> Result<Vec<FacetClass>> {
    use crate::detmap::InvertibilityClass;
    let forms = constraint_forms(scenario);
    let canon_of = |coeffs: &[Rational], bound: Rational| -> Result<RatVector> {
        let expr = BellExpression::new(scenario.clone(), coeffs.to_vec(), Some(bound))?;
        let canon = canonicalize_with_forms(
            &expr,
            CanonMode::ZeroBound,
            ScaleConvention::PrimitiveIntegers,
            &forms,
        )?;
        Ok(canon.coeffs)
    };

    let keys: Vec<RatVector> = (0..h.ineq_a.rows())
        .map(|r| canon_of(h.ineq_a.row(r), h.ineq_c[r].clone()))
        .collect::<Result<_>>()?;

    // per-party relabelings
    let relabelings: Vec<Vec<LocalTransformation>> = scenario
        .parties()
        .iter()
        .map(|card| {
            crate::detmap::enumerate(card, card, Some(InvertibilityClass::Relabeling), None)
                .map(|it| it.map(|m| LocalTransformation::from_detmap(&m)).collect())
        })
        .collect::<Result<_>>()?;
    let mut group: Vec<Vec<PartyMap>> = vec![vec![]];
    for party_maps in &relabelings {
        let mut next = Vec::new();
        for prefix in &group {
            for m in party_maps {
                let mut g = prefix.clone();
                g.push(PartyMap::Map(m.clone()));
                next.push(g);
            }
        }
        group = next;
    }

    let mut class_of: Vec<Option<usize>> = vec![None; keys.len()];
    let mut classes: Vec<FacetClass> = Vec::new();
    for i in 0..keys.len() {
        if class_of[i].is_some() {
            continue;
        }
        let class_id = classes.len();
        let expr = BellExpression::new(
            scenario.clone(),
            h.ineq_a.row(i).to_vec(),
            Some(h.ineq_c[i].clone()),
        )?;
        let orbit_keys: BTreeSet<RatVector> = group
            .par_iter()
            .map(|g| {
                let image = apply_to_expression(&expr, g).expect("relabelings fit the scenario");
                canon_of(
                    image.coeffs(),
                    image.bound().cloned().expect("bound carried"),
                )
                .expect("canonicalizable")
            })
            .collect();
        let mut members = Vec::new();
        for (j, key) in keys.iter().enumerate() {
            if orbit_keys.contains(key) {
                debug_assert!(class_of[j].is_none(), "facet orbits must not overlap");
                class_of[j] = Some(class_id);
                members.push(j);
            }
        }
        // lexicographically least canonical member as representative
        let best = members
            .iter()
            .map(|&j| keys[j].clone())
            .min()
            .expect("orbit contains the seed facet");
        let representative = BellExpression::new(scenario.clone(), best, Some(Rational::zero()))?;
        classes.push(FacetClass {
            representative,
            orbit_size: members.len(),
            members,
        });
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::pr_box;
    use crate::ratlin::rat_int;
    use crate::scenario::chsh_scenario;

    fn card(outputs: &[usize]) -> PartyCard {
        PartyCard::from_slice(outputs)
    }

    fn cube_hrep(n: usize) -> HRep {
        // -1 <= x_i <= 1
        let mut rows = Vec::new();
        let mut c = Vec::new();
        for i in 0..n {
            let mut up = vec![Rational::zero(); n];
            up[i] = Rational::one();
            rows.push(up.clone());
            c.push(Rational::one());
            let mut down = vec![Rational::zero(); n];
            down[i] = -Rational::one();
            rows.push(down);
            c.push(Rational::one());
        }
        HRep::new(
            RatMatrix::zeros(0, n),
            vec![],
            RatMatrix::from_rows(rows),
            c,
        )
    }

    #[test]
    fn cube_vertices_and_facets() {
        let h = cube_hrep(3);
        let v = dd_vertices(&h, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices.len(), 8);
        for vert in &v.vertices {
            assert!(vert.iter().all(|c| c.abs().is_one()));
            assert!(extremal(vert, &h).unwrap());
        }
        let h2 = dd_facets(&v, &DdLimits::default()).unwrap();
        assert_eq!(h2.eq_a.rows(), 0);
        assert_eq!(h2.ineq_a.rows(), 6);
        // round trip: same polytope
        let v2 = dd_vertices(&h2, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices, v2.vertices);
    }

    #[test]
    fn cross_polytope_round_trip() {
        // |x| + |y| + |z| <= 1: 8 facets, 6 vertices
        let n = 3;
        let mut rows = Vec::new();
        let mut c = Vec::new();
        for signs in 0..8u32 {
            let row: RatVector = (0..n)
                .map(|i| {
                    if signs >> i & 1 == 1 {
                        -Rational::one()
                    } else {
                        Rational::one()
                    }
                })
                .collect();
            rows.push(row);
            c.push(Rational::one());
        }
        let h = HRep::new(
            RatMatrix::zeros(0, n),
            vec![],
            RatMatrix::from_rows(rows),
            c,
        );
        let v = dd_vertices(&h, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices.len(), 6);
        let h2 = dd_facets(&v, &DdLimits::default()).unwrap();
        assert_eq!(h2.ineq_a.rows(), 8);
        let v2 = dd_vertices(&h2, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices, v2.vertices);
    }

    #[test]
    fn lower_dimensional_polytope_carries_equalities() {
        // segment x + y = 1, x, y >= 0 in the plane
        let h = HRep::new(
            RatMatrix::from_i64_rows(&[&[1, 1]]),
            vec![rat_int(1)],
            RatMatrix::from_i64_rows(&[&[-1, 0], &[0, -1]]),
            vec![Rational::zero(), Rational::zero()],
        );
        let v = dd_vertices(&h, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices.len(), 2);
        let h2 = dd_facets(&v, &DdLimits::default()).unwrap();
        assert_eq!(h2.eq_a.rows(), 1);
        assert_eq!(h2.affine_dim(), 1);
        let v2 = dd_vertices(&h2, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices, v2.vertices);
    }

    #[test]
    fn stacked_constraint_kernel_has_eight_freedoms() {
        // normalization plus nonsignaling leave 8 degrees of freedom in
        // the binary two-party scenario
        let h = ns_hrep(&chsh_scenario());
        assert_eq!(crate::ratlin::kernel_basis(&h.eq_a).len(), 8);
    }

    #[test]
    fn affine_dimensions_of_behavior_polytopes() {
        assert_eq!(ns_hrep(&chsh_scenario()).affine_dim(), 8);
        let s = Scenario::nonsignaling(vec![card(&[3, 3, 3]), card(&[2, 2])]);
        assert_eq!(ns_hrep(&s).affine_dim(), 20);
        let single = Scenario::nonsignaling(vec![card(&[2, 2])]);
        assert_eq!(ns_hrep(&single).affine_dim(), 2);
    }

    #[test]
    fn chsh_ns_polytope_has_24_vertices() {
        let h = ns_hrep(&chsh_scenario());
        let v = dd_vertices(&h, &DdLimits::default()).unwrap();
        assert_eq!(v.vertices.len(), 24);
        // 16 deterministic boxes plus the 8-element PR orbit
        let boxes = crate::corr::enumerate_deterministic(&chsh_scenario());
        for b in &boxes {
            assert!(v.vertices.contains(&b.coeffs().to_vec()));
        }
        assert!(v.vertices.contains(&pr_box().coeffs().to_vec()));
        // all extremal, none interior
        for vert in &v.vertices {
            assert!(extremal(vert, &h).unwrap());
        }
        let u = crate::corr::uniform_behavior(&chsh_scenario());
        assert!(!extremal(u.coeffs(), &h).unwrap());
    }

    #[test]
    fn deterministic_boxes_are_extremal() {
        let s = chsh_scenario();
        let h = ns_hrep(&s);
        for b in crate::corr::enumerate_deterministic(&s) {
            assert!(extremal(b.coeffs(), &h).unwrap());
        }
    }

    #[test]
    fn causal_vertices_counts() {
        // binary/binary: 64 + 64 - 16 = 112 distinct strategies
        let v = causal_vertices(&card(&[2, 2]), &card(&[2, 2]));
        assert_eq!(v.vertices.len(), 112);
        // (2,2) x (3,3): 324 + 144 - 36 = 432
        let v = causal_vertices(&card(&[2, 2]), &card(&[3, 3]));
        assert_eq!(v.vertices.len(), 432);
    }

    #[test]
    fn causal_vertices_satisfy_gyni() {
        let phi = crate::corr::gyni();
        let v = causal_vertices(&card(&[2, 2]), &card(&[2, 2]));
        let s = phi.scenario();
        let mut max = rat_int(-10);
        for vert in &v.vertices {
            let p = crate::corr::Behavior::new(s.clone(), vert.clone()).unwrap();
            let val = phi.evaluate(&p).unwrap();
            assert!(val <= rat_int(2));
            if val > max {
                max = val;
            }
        }
        assert_eq!(max, rat_int(2));
    }

    #[test]
    fn chsh_local_polytope_facets_classify() {
        // the local polytope of the CHSH scenario: 16 deterministic boxes;
        // facets split into 16 positivity facets and the 8 CHSH facets
        let s = chsh_scenario();
        let boxes = crate::corr::enumerate_deterministic(&s);
        let v = VRep {
            vertices: boxes.iter().map(|b| b.coeffs().to_vec()).collect(),
        };
        let h = dd_facets(&v, &DdLimits::default()).unwrap();
        assert_eq!(h.ineq_a.rows(), 24);
        assert_eq!(h.affine_dim(), 8);
        let classes = classify_facets(&h, &s).unwrap();
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.orbit_size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![8, 16]);
        // the CHSH orbit contains the canonical CHSH facet
        let forms = constraint_forms(&s);
        let chsh_key = canonicalize_with_forms(
            &crate::corr::chsh(),
            CanonMode::ZeroBound,
            ScaleConvention::PrimitiveIntegers,
            &forms,
        )
        .unwrap()
        .coeffs;
        let mut found = false;
        for (i, class) in classes.iter().enumerate() {
            if class.orbit_size == 8 {
                for &j in &class.members {
                    let key = canonicalize_with_forms(
                        &BellExpression::new(
                            s.clone(),
                            h.ineq_a.row(j).to_vec(),
                            Some(h.ineq_c[j].clone()),
                        )
                        .unwrap(),
                        CanonMode::ZeroBound,
                        ScaleConvention::PrimitiveIntegers,
                        &forms,
                    )
                    .unwrap()
                    .coeffs;
                    if key == chsh_key {
                        found = true;
                    }
                }
                let _ = i;
            }
        }
        assert!(found, "CHSH must appear among the size-8 orbit");
    }

    #[test]
    fn facet_tightness_counts() {
        // every facet of the CHSH local polytope is tight on at least
        // dim-many affinely independent vertices
        let s = chsh_scenario();
        let boxes = crate::corr::enumerate_deterministic(&s);
        let v = VRep {
            vertices: boxes.iter().map(|b| b.coeffs().to_vec()).collect(),
        };
        let h = dd_facets(&v, &DdLimits::default()).unwrap();
        let affine_dim = h.affine_dim();
        for r in 0..h.ineq_a.rows() {
            let tight: Vec<RatVector> = v
                .vertices
                .iter()
                .filter(|vert| dot(h.ineq_a.row(r), vert) == h.ineq_c[r])
                .map(|vert| {
                    let mut hom = vec![Rational::one()];
                    hom.extend_from_slice(vert);
                    hom
                })
                .collect();
            assert!(rank(&RatMatrix::from_rows(tight)) >= affine_dim);
        }
    }

    #[test]
    fn dd_dimension_limit_refusal() {
        let h = cube_hrep(41);
        assert!(matches!(
            dd_vertices(&h, &DdLimits::default()),
            Err(Error::DdLimitExceeded(_))
        ));
    }

    #[test]
    fn unbounded_input_is_rejected() {
        // half-space x >= 0 in one dimension
        let h = HRep::new(
            RatMatrix::zeros(0, 1),
            vec![],
            RatMatrix::from_i64_rows(&[&[-1]]),
            vec![Rational::zero()],
        );
        assert!(dd_vertices(&h, &DdLimits::default()).is_err());
    }
}
