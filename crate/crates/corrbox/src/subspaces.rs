//! Invariant subspaces of local transformations.
//!
//! The coefficient space of one party splits into three pieces that local
//! maps respect: the correlation subspace C (zero block sums), the
//! normalization direction Z (the uniformly random behavior), and the
//! signaling directions S (imbalance between input blocks). The chain
//! `0 < C < C+Z < C+Z+S` is invariant under every local map, and the dual
//! chain `0 < S* < S*+Z* < S*+Z*+C*` is invariant on expressions.
//!
//! For several parties the 3^n tensor combinations of these pieces
//! classify into normalization, nonsignaling and signaling components,
//! depending on the scenario's allowed directions. The module also builds
//! the Collins-Gisin change of basis for the C+Z part.

use num_traits::{One, Zero};

use crate::corr::Behavior;
use crate::ratlin::{rat, rat_int, RatMatrix, RatVector, Rational};
use crate::scenario::{PartyCard, Scenario};
use crate::{Error, Result};

/// Primal basis of one party's coefficient space: the uniform behavior,
/// the correlation vectors `C^(i|x)` and the signaling vectors `S^k`.
#[derive(Clone, Debug)]
pub struct PartyBasis {
    card: PartyCard,
    pub uniform: RatVector,
    /// `C^(i|x) = (e_(i|x) - e_(A_x|x)) / A_x`, ordered by `x` then `i`.
    pub correlation: Vec<RatVector>,
    /// `S^k = (X/A_k) sum_a e_(a|k) - sum_(x,a) e_(a|x)/A_x`, `k < X`.
    pub signaling: Vec<RatVector>,
}

/// Dual basis: trace-out `tau`, block sums `Sigma^x`, normalization checks
/// `Omega^k` and generalized correlators `chi^(i|x)`.
#[derive(Clone, Debug)]
pub struct PartyDualBasis {
    card: PartyCard,
    pub traceout: RatVector,
    /// `Sigma^x = sum_a e*_(a|x)`.
    pub block_sums: Vec<RatVector>,
    /// `Omega^k = (Sigma^k - Sigma^X) / X`, `k < X`.
    pub omegas: Vec<RatVector>,
    /// `chi^(i|x) = A_x e*_(i|x) - sum_a e*_(a|x)`, ordered by `x` then `i`.
    pub correlators: Vec<RatVector>,
}

/// Pairs `(i, x)` indexing correlation directions, in basis order.
pub fn correlation_indices(card: &PartyCard) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 1..=card.num_inputs() {
        for i in 1..card.num_outputs(x) {
            out.push((i, x));
        }
    }
    out
}

/// Builds the primal basis vectors of a cardinality.
pub fn party_basis(card: &PartyCard) -> PartyBasis {
    let d = card.dim();
    let x_count = card.num_inputs();

    let mut uniform = vec![Rational::zero(); d];
    for (a, x) in card.iter_pairs() {
        uniform[card.flatten(a, x).unwrap()] = rat(1, card.num_outputs(x) as i64);
    }

    let mut correlation = Vec::new();
    for (i, x) in correlation_indices(card) {
        let a_x = card.num_outputs(x) as i64;
        let mut v = vec![Rational::zero(); d];
        v[card.flatten(i, x).unwrap()] = rat(1, a_x);
        v[card.flatten(card.num_outputs(x), x).unwrap()] = rat(-1, a_x);
        correlation.push(v);
    }

    let mut signaling = Vec::new();
    for k in 1..x_count {
        let mut v = vec![Rational::zero(); d];
        for (a, x) in card.iter_pairs() {
            let mut c = -rat(1, card.num_outputs(x) as i64);
            if x == k {
                c += rat(x_count as i64, card.num_outputs(k) as i64);
            }
            v[card.flatten(a, x).unwrap()] = c;
        }
        signaling.push(v);
    }

    PartyBasis {
        card: card.clone(),
        uniform,
        correlation,
        signaling,
    }
}

/// Builds the dual basis forms of a cardinality.
pub fn party_dual_basis(card: &PartyCard) -> PartyDualBasis {
    let d = card.dim();
    let x_count = card.num_inputs() as i64;

    let mut block_sums = Vec::new();
    for x in 1..=card.num_inputs() {
        let mut v = vec![Rational::zero(); d];
        for a in 1..=card.num_outputs(x) {
            v[card.flatten(a, x).unwrap()] = Rational::one();
        }
        block_sums.push(v);
    }

    let mut traceout = vec![Rational::zero(); d];
    for sigma in &block_sums {
        for (slot, c) in traceout.iter_mut().zip(sigma) {
            *slot += c / rat_int(x_count);
        }
    }

    let last = block_sums.last().expect("at least one input").clone();
    let mut omegas = Vec::new();
    for sigma in &block_sums[..block_sums.len() - 1] {
        let v: RatVector = sigma
            .iter()
            .zip(&last)
            .map(|(a, b)| (a - b) / rat_int(x_count))
            .collect();
        omegas.push(v);
    }

    let mut correlators = Vec::new();
    for (i, x) in correlation_indices(card) {
        let a_x = card.num_outputs(x) as i64;
        let mut v = vec![Rational::zero(); d];
        for a in 1..=card.num_outputs(x) {
            v[card.flatten(a, x).unwrap()] = -Rational::one();
        }
        v[card.flatten(i, x).unwrap()] += rat_int(a_x);
        correlators.push(v);
    }

    PartyDualBasis {
        card: card.clone(),
        traceout,
        block_sums,
        omegas,
        correlators,
    }
}

impl PartyBasis {
    pub fn card(&self) -> &PartyCard {
        &self.card
    }
}

impl PartyDualBasis {
    pub fn card(&self) -> &PartyCard {
        &self.card
    }
}

/// The projectors onto Z, C and S: `Pi_Z = uniform . tau`,
/// `Pi_C = sum C^(i|x) . chi^(i|x)`, `Pi_S = sum S^k . Omega^k`.
/// They are idempotent and sum to the identity.
pub fn projectors(card: &PartyCard) -> (RatMatrix, RatMatrix, RatMatrix) {
    let basis = party_basis(card);
    let dual = party_dual_basis(card);
    let pi_z = RatMatrix::outer(&basis.uniform, &dual.traceout);
    let mut pi_c = RatMatrix::zeros(card.dim(), card.dim());
    for (v, f) in basis.correlation.iter().zip(&dual.correlators) {
        pi_c = pi_c.add(&RatMatrix::outer(v, f));
    }
    let mut pi_s = RatMatrix::zeros(card.dim(), card.dim());
    for (v, f) in basis.signaling.iter().zip(&dual.omegas) {
        pi_s = pi_s.add(&RatMatrix::outer(v, f));
    }
    (pi_z, pi_c, pi_s)
}

/// One of the three invariant pieces of a single party's space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SubspaceKind {
    Z,
    C,
    S,
}

impl SubspaceKind {
    pub const ALL: [SubspaceKind; 3] = [SubspaceKind::Z, SubspaceKind::C, SubspaceKind::S];

    pub fn letter(self) -> char {
        match self {
            SubspaceKind::Z => 'Z',
            SubspaceKind::C => 'C',
            SubspaceKind::S => 'S',
        }
    }

    pub fn from_letter(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'Z' => Ok(SubspaceKind::Z),
            'C' => Ok(SubspaceKind::C),
            'S' => Ok(SubspaceKind::S),
            other => Err(Error::Parse(format!("unknown subspace letter {other:?}"))),
        }
    }
}

/// One tensor component: a subspace kind per party.
pub type SubspaceLabel = Vec<SubspaceKind>;

/// All 3^n labels of a scenario, first party slowest.
pub fn all_labels(num_parties: usize) -> Vec<SubspaceLabel> {
    let mut out: Vec<SubspaceLabel> = vec![vec![]];
    for _ in 0..num_parties {
        let mut next = Vec::new();
        for prefix in &out {
            for kind in SubspaceKind::ALL {
                let mut v = prefix.clone();
                v.push(kind);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Physical role of one tensor component in a given scenario.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ComponentClass {
    /// All-Z: fixed to the uniform product for normalized behaviors.
    NormalizationFixed,
    /// No C but some S: must vanish for normalized behaviors.
    NormalizationForbidden,
    /// Some C, no S: nonsignaling correlation data.
    Nonsignaling,
    /// S and C present, and some S-party may signal to some C-party.
    SignalingAllowed,
    /// S and C present, but no S-party may signal to any C-party: must
    /// vanish for behaviors of the scenario.
    SignalingForbidden,
}

impl ComponentClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentClass::NormalizationFixed => "normalization-fixed",
            ComponentClass::NormalizationForbidden => "normalization-forbidden",
            ComponentClass::Nonsignaling => "nonsignaling",
            ComponentClass::SignalingAllowed => "signaling-allowed",
            ComponentClass::SignalingForbidden => "signaling-forbidden",
        }
    }

    /// Components that normalized behaviors of the scenario cannot touch
    /// (beyond the fixed all-Z part).
    pub fn is_forbidden(self) -> bool {
        matches!(
            self,
            ComponentClass::NormalizationForbidden | ComponentClass::SignalingForbidden
        )
    }
}

/// Classifies one label according to the counts of C and S parties and the
/// scenario's signaling directions.
pub fn classify_component(scenario: &Scenario, label: &SubspaceLabel) -> ComponentClass {
    assert_eq!(label.len(), scenario.num_parties(), "label length mismatch");
    let n_c = label.iter().filter(|&&k| k == SubspaceKind::C).count();
    let n_s = label.iter().filter(|&&k| k == SubspaceKind::S).count();
    match (n_c, n_s) {
        (0, 0) => ComponentClass::NormalizationFixed,
        (0, _) => ComponentClass::NormalizationForbidden,
        (_, 0) => ComponentClass::Nonsignaling,
        _ => {
            let s_parties = label
                .iter()
                .enumerate()
                .filter(|(_, &k)| k == SubspaceKind::S)
                .map(|(p, _)| p);
            let c_parties: Vec<usize> = label
                .iter()
                .enumerate()
                .filter(|(_, &k)| k == SubspaceKind::C)
                .map(|(p, _)| p)
                .collect();
            let mut s_parties = s_parties;
            let some_allowed =
                s_parties.any(|s| c_parties.iter().any(|&c| scenario.signaling_allowed(s, c)));
            if some_allowed {
                ComponentClass::SignalingAllowed
            } else {
                ComponentClass::SignalingForbidden
            }
        }
    }
}

/// Applies a per-party matrix to one tensor factor of a flat coefficient
/// vector. The matrix maps the party's old flat dimension to a new one.
pub fn apply_to_party(
    dims: &[usize],
    party: usize,
    matrix: &RatMatrix,
    coeffs: &[Rational],
) -> RatVector {
    assert_eq!(
        matrix.cols(),
        dims[party],
        "matrix does not fit party dimension"
    );
    let suffix: usize = dims[party + 1..].iter().product();
    let prefix: usize = dims[..party].iter().product();
    let d_old = dims[party];
    let d_new = matrix.rows();
    assert_eq!(
        coeffs.len(),
        prefix * d_old * suffix,
        "coefficient length mismatch"
    );
    let mut out = vec![Rational::zero(); prefix * d_new * suffix];
    for p in 0..prefix {
        for j in 0..d_new {
            for s in 0..suffix {
                let mut acc = Rational::zero();
                for i in 0..d_old {
                    let m = matrix.get(j, i);
                    if !m.is_zero() {
                        let c = &coeffs[(p * d_old + i) * suffix + s];
                        if !c.is_zero() {
                            acc += m * c;
                        }
                    }
                }
                out[(p * d_new + j) * suffix + s] = acc;
            }
        }
    }
    out
}

/// One component of a behavior decomposition.
#[derive(Clone, Debug)]
pub struct Component {
    pub label: SubspaceLabel,
    pub class: ComponentClass,
    pub vector: RatVector,
}

/// Splits a behavior into its 3^n tensor components. The components sum to
/// the behavior exactly; callers regroup them per scenario as needed.
pub fn decompose_behavior(p: &Behavior) -> Vec<Component> {
    let scenario = p.scenario();
    let dims: Vec<usize> = scenario.parties().iter().map(PartyCard::dim).collect();
    let per_party: Vec<(RatMatrix, RatMatrix, RatMatrix)> =
        scenario.parties().iter().map(projectors).collect();
    let mut out = Vec::new();
    for label in all_labels(scenario.num_parties()) {
        let mut vector = p.coeffs().to_vec();
        for (party, kind) in label.iter().enumerate() {
            let (pi_z, pi_c, pi_s) = &per_party[party];
            let pi = match kind {
                SubspaceKind::Z => pi_z,
                SubspaceKind::C => pi_c,
                SubspaceKind::S => pi_s,
            };
            vector = apply_to_party(&dims, party, pi, &vector);
        }
        let class = classify_component(scenario, &label);
        out.push(Component {
            label,
            class,
            vector,
        });
    }
    out
}

/// The Collins-Gisin reconstruction matrix `G` and its prescribed
/// pseudoinverse `G+` for one party.
///
/// `G` maps the `d - X + 1` Collins-Gisin coordinates
/// `(1, P(1|1)..P(A_1-1|1), P(1|2), ...)` back to the full space;
/// `G+ G = 1`, and `G G+` is exactly the projector on C + Z.
pub fn cg_matrices(card: &PartyCard) -> (RatMatrix, RatMatrix) {
    let d = card.dim();
    let x_count = card.num_inputs();
    let cg_dim = d - x_count + 1;

    let mut g = RatMatrix::zeros(d, cg_dim);
    // column 0: the f_x blocks (1 at the last output of each input)
    for x in 1..=x_count {
        g.set(
            card.flatten(card.num_outputs(x), x).unwrap(),
            0,
            Rational::one(),
        );
    }
    // K_x blocks: identity on the first A_x - 1 outputs, -1 row below
    let mut col = 1;
    for x in 1..=x_count {
        for i in 1..card.num_outputs(x) {
            g.set(card.flatten(i, x).unwrap(), col, Rational::one());
            g.set(
                card.flatten(card.num_outputs(x), x).unwrap(),
                col,
                -Rational::one(),
            );
            col += 1;
        }
    }

    let mut g_plus = RatMatrix::zeros(cg_dim, d);
    for c in 0..d {
        g_plus.set(0, c, rat(1, x_count as i64));
    }
    // H blocks, row group i and column group j:
    // H_ii = [ 1 - mu_i J | -mu_i 1 ], H_ij = nu_i J, with
    // mu_i = (X-1)/(X A_i) and nu_i = 1/(X A_i).
    let mut row = 1;
    for i in 1..=x_count {
        let a_i = card.num_outputs(i) as i64;
        let mu = rat(x_count as i64 - 1, x_count as i64 * a_i);
        let nu = rat(1, x_count as i64 * a_i);
        for out_i in 1..card.num_outputs(i) {
            for j in 1..=x_count {
                for a in 1..=card.num_outputs(j) {
                    let col = card.flatten(a, j).unwrap();
                    let v = if i == j {
                        if a == out_i {
                            Rational::one() - &mu
                        } else {
                            -mu.clone()
                        }
                    } else {
                        nu.clone()
                    };
                    g_plus.set(row, col, v);
                }
            }
            row += 1;
        }
    }
    (g, g_plus)
}

/// Collins-Gisin coordinates of a behavior: per-party application of `G+`.
/// Lossless exactly on the C + Z part, i.e. on normalized nonsignaling
/// behaviors.
pub fn to_cg(p: &Behavior) -> RatVector {
    let scenario = p.scenario();
    let dims: Vec<usize> = scenario.parties().iter().map(PartyCard::dim).collect();
    let mut coeffs = p.coeffs().to_vec();
    let mut cur_dims = dims;
    for party in 0..scenario.num_parties() {
        let (_, g_plus) = cg_matrices(scenario.party(party));
        coeffs = apply_to_party(&cur_dims, party, &g_plus, &coeffs);
        cur_dims[party] = g_plus.rows();
    }
    coeffs
}

/// Rebuilds a behavior from Collins-Gisin coordinates via per-party `G`.
/// The leading (all-constant) slot must be 1.
pub fn from_cg(scenario: &Scenario, cg: &[Rational]) -> Result<Behavior> {
    let cg_dims: Vec<usize> = scenario
        .parties()
        .iter()
        .map(|c| c.dim() - c.num_inputs() + 1)
        .collect();
    let expected: usize = cg_dims.iter().product();
    if cg.len() != expected {
        return Err(Error::ScenarioMismatch(format!(
            "Collins-Gisin vector has {} slots, scenario needs {expected}",
            cg.len()
        )));
    }
    if !cg[0].is_one() {
        return Err(Error::InvalidInput(
            "Collins-Gisin constant slot must be 1".into(),
        ));
    }
    let mut coeffs = cg.to_vec();
    let mut cur_dims = cg_dims;
    for party in 0..scenario.num_parties() {
        let (g, _) = cg_matrices(scenario.party(party));
        coeffs = apply_to_party(&cur_dims, party, &g, &coeffs);
        cur_dims[party] = g.rows();
    }
    Behavior::new(scenario.clone(), coeffs)
}
