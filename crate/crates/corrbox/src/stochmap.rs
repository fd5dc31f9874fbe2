//! General (stochastic) local transformations.
//!
//! A matrix is a valid local transformation exactly when it has the causal
//! form: nonnegative entries, block column sums independent of the source
//! output (so an input-preprocessing kernel `P(x|x')` exists), and those
//! sums normalized per target input. Equivalently, the map is completely
//! positive: it preserves proper joint behaviors even when applied to one
//! part of a signaling partner. Both routes are implemented; their
//! agreement is itself a tested fact.
//!
//! Every valid transformation decomposes as an exact convex mixture of
//! deterministic local maps, recovered here by greedy peeling.

use num_traits::{One, Signed, Zero};

use crate::corr::{Behavior, BellExpression};
use crate::detmap::DetMap;
use crate::ratlin::{RatMatrix, Rational};
use crate::scenario::{PartyCard, Scenario};
use crate::subspaces::apply_to_party;
use crate::{Error, Result};

/// A validated stochastic local transformation between cardinalities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalTransformation {
    source: PartyCard,
    target: PartyCard,
    matrix: RatMatrix,
}

/// Why a matrix fails the causal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Entry at (target pair, source pair) is negative.
    NegativeEntry {
        row: (usize, usize),
        col: (usize, usize),
    },
    /// Block column sums depend on the source output: `P(x|x')` does not
    /// exist.
    BlockSumDependsOnOutput {
        target_input: usize,
        source_input: usize,
    },
    /// The induced input distribution `P(.|x')` does not sum to 1.
    InputKernelNotNormalized {
        target_input: usize,
        total: Rational,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NegativeEntry { row, col } => {
                write!(f, "negative entry at (a'={},x'={}) <- (a={},x={})", row.0, row.1, col.0, col.1)
            }
            Violation::BlockSumDependsOnOutput { target_input, source_input } => write!(
                f,
                "column sums of block (x'={target_input}, x={source_input}) depend on the source output"
            ),
            Violation::InputKernelNotNormalized { target_input, total } => {
                write!(f, "input kernel at x'={target_input} sums to {total}, not 1")
            }
        }
    }
}

/// Checks the causal form and wraps the matrix on success; on failure all
/// violated conditions are reported.
pub fn validate(
    matrix: RatMatrix,
    source: &PartyCard,
    target: &PartyCard,
) -> std::result::Result<LocalTransformation, Vec<Violation>> {
    assert_eq!(
        matrix.rows(),
        target.dim(),
        "matrix rows must match target dimension"
    );
    assert_eq!(
        matrix.cols(),
        source.dim(),
        "matrix cols must match source dimension"
    );
    let mut violations = Vec::new();
    for (a_tgt, x_tgt) in target.iter_pairs() {
        let r = target.flatten(a_tgt, x_tgt).unwrap();
        for (a_src, x_src) in source.iter_pairs() {
            let c = source.flatten(a_src, x_src).unwrap();
            if matrix.get(r, c).is_negative() {
                violations.push(Violation::NegativeEntry {
                    row: (a_tgt, x_tgt),
                    col: (a_src, x_src),
                });
            }
        }
    }
    for x_tgt in 1..=target.num_inputs() {
        let mut kernel_total = Rational::zero();
        for x_src in 1..=source.num_inputs() {
            let mut first: Option<Rational> = None;
            let mut consistent = true;
            for a_src in 1..=source.num_outputs(x_src) {
                let c = source.flatten(a_src, x_src).unwrap();
                let mut sum = Rational::zero();
                for a_tgt in 1..=target.num_outputs(x_tgt) {
                    sum += matrix.get(target.flatten(a_tgt, x_tgt).unwrap(), c);
                }
                match &first {
                    None => first = Some(sum),
                    Some(f) if *f != sum => consistent = false,
                    _ => {}
                }
            }
            if !consistent {
                violations.push(Violation::BlockSumDependsOnOutput {
                    target_input: x_tgt,
                    source_input: x_src,
                });
            } else if let Some(f) = first {
                kernel_total += f;
            }
        }
        if !kernel_total.is_one() {
            violations.push(Violation::InputKernelNotNormalized {
                target_input: x_tgt,
                total: kernel_total,
            });
        }
    }
    if violations.is_empty() {
        Ok(LocalTransformation {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    } else {
        Err(violations)
    }
}

impl LocalTransformation {
    pub fn source(&self) -> &PartyCard {
        &self.source
    }

    pub fn target(&self) -> &PartyCard {
        &self.target
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn identity(card: &PartyCard) -> Self {
        LocalTransformation {
            source: card.clone(),
            target: card.clone(),
            matrix: RatMatrix::identity(card.dim()),
        }
    }

    pub fn from_detmap(m: &DetMap) -> Self {
        LocalTransformation {
            source: m.source().clone(),
            target: m.target().clone(),
            matrix: m.to_matrix(),
        }
    }

    /// The input-preprocessing kernel `P(x|x') = c_(x',x)`.
    pub fn input_kernel(&self, x_tgt: usize, x_src: usize) -> Rational {
        let c = self.source.flatten(1, x_src).unwrap();
        let mut sum = Rational::zero();
        for a_tgt in 1..=self.target.num_outputs(x_tgt) {
            sum += self
                .matrix
                .get(self.target.flatten(a_tgt, x_tgt).unwrap(), c);
        }
        sum
    }
}

/// Outcome of the complete-positivity test.
#[derive(Clone, Debug)]
pub struct CpResult {
    pub is_cp: bool,
    pub witness: Option<CpWitness>,
}

/// Concrete evidence that a map is not completely positive.
#[derive(Clone, Debug)]
pub enum CpWitness {
    /// Applying the map to the swap partner produced a negative
    /// coefficient at this flat index of the joint space.
    NegativeJointCoefficient { index: usize, value: Rational },
    /// Applying the map to the swap partner broke normalization at this
    /// joint input.
    JointBlockNotNormalized {
        inputs: (usize, usize),
        total: Rational,
    },
    /// A deterministic single-party probe behavior lost normalization at
    /// this target input.
    ProbeNotNormalized {
        probe_input: usize,
        probe_outputs: (usize, usize),
        target_input: usize,
        total: Rational,
    },
}

/// The swap partner behavior used in the completely-positive test: device
/// B echoes A's input (`b = x`) while its own input drives A's output
/// (`a = ((y-1) mod A_x) + 1`). B gets `max(X, max_x A_x)` inputs and the
/// same number of outputs per input so that every matrix entry is probed
/// and the device stays normalized for any source cardinality.
pub fn swap_partner(card: &PartyCard) -> Behavior {
    let x_count = card.num_inputs();
    let side = x_count.max((1..=x_count).map(|x| card.num_outputs(x)).max().unwrap());
    let partner = PartyCard::from_slice(&vec![side; side]);
    let scenario = Scenario::fully_signaling(vec![card.clone(), partner.clone()]);
    let mut coeffs = vec![Rational::zero(); scenario.dim()];
    for x in 1..=x_count {
        for y in 1..=side {
            let a = ((y - 1) % card.num_outputs(x)) + 1;
            let b = x; // b <= X <= side
            let idx = scenario.tensor_index(&[(a, x), (b, y)]).unwrap();
            coeffs[idx] = Rational::one();
        }
    }
    Behavior::new(scenario, coeffs).unwrap()
}

/// Executable complete positivity: applies the map to one side of the swap
/// partner and checks the image stays a proper behavior, plus the
/// deterministic single-party probes that pin down normalization
/// preservation. Agrees exactly with [`validate`].
pub fn is_completely_positive(
    matrix: &RatMatrix,
    source: &PartyCard,
    target: &PartyCard,
) -> CpResult {
    assert_eq!(
        matrix.rows(),
        target.dim(),
        "matrix rows must match target dimension"
    );
    assert_eq!(
        matrix.cols(),
        source.dim(),
        "matrix cols must match source dimension"
    );

    // single-party probes: P(a|x) = delta(x,x0) delta(a,a0)
    //                             + (1 - delta(x,x0)) delta(a,a+)
    // preservation of their normalization forces the block column sums to
    // be independent of the source output
    for x0 in 1..=source.num_inputs() {
        for a0 in 1..=source.num_outputs(x0) {
            for a_plus in 1..=source.num_outputs(1) {
                let mut probe = vec![Rational::zero(); source.dim()];
                for x in 1..=source.num_inputs() {
                    let a = if x == x0 {
                        a0
                    } else {
                        a_plus.min(source.num_outputs(x))
                    };
                    probe[source.flatten(a, x).unwrap()] = Rational::one();
                }
                let image = matrix.mul_vec(&probe);
                for x_tgt in 1..=target.num_inputs() {
                    let mut sum = Rational::zero();
                    for a_tgt in 1..=target.num_outputs(x_tgt) {
                        sum += &image[target.flatten(a_tgt, x_tgt).unwrap()];
                    }
                    if !sum.is_one() {
                        return CpResult {
                            is_cp: false,
                            witness: Some(CpWitness::ProbeNotNormalized {
                                probe_input: x0,
                                probe_outputs: (a0, a_plus),
                                target_input: x_tgt,
                                total: sum,
                            }),
                        };
                    }
                }
            }
        }
    }

    // swap partner: every matrix entry appears as a coefficient of the
    // transformed joint behavior, so nonnegativity is probed pointwise
    let partner = swap_partner(source);
    let joint = partner.scenario();
    let dims: Vec<usize> = joint.parties().iter().map(PartyCard::dim).collect();
    let image = apply_to_party(&dims, 0, matrix, partner.coeffs());
    let out_scenario = joint.with_party(0, target.clone());
    for (idx, v) in image.iter().enumerate() {
        if v.is_negative() {
            return CpResult {
                is_cp: false,
                witness: Some(CpWitness::NegativeJointCoefficient {
                    index: idx,
                    value: v.clone(),
                }),
            };
        }
    }
    let image_b = Behavior::new(out_scenario.clone(), image).unwrap();
    for inputs in out_scenario.joint_inputs() {
        let mut total = Rational::zero();
        for outputs in out_scenario.joint_outputs(&inputs) {
            let pairs: Vec<_> = outputs.iter().zip(&inputs).map(|(&a, &x)| (a, x)).collect();
            total += image_b.coeff(&pairs).unwrap();
        }
        if !total.is_one() {
            return CpResult {
                is_cp: false,
                witness: Some(CpWitness::JointBlockNotNormalized {
                    inputs: (inputs[0], inputs[1]),
                    total,
                }),
            };
        }
    }
    CpResult {
        is_cp: true,
        witness: None,
    }
}

/// Exact convex mixture of deterministic maps.
#[derive(Clone, Debug)]
pub struct ConvexDecomposition {
    pub terms: Vec<(Rational, DetMap)>,
}

impl ConvexDecomposition {
    /// Recombines the mixture into a matrix.
    pub fn recombine(&self, source: &PartyCard, target: &PartyCard) -> RatMatrix {
        let mut acc = RatMatrix::zeros(target.dim(), source.dim());
        for (w, m) in &self.terms {
            acc = acc.add(&m.to_matrix().scale(w));
        }
        acc
    }
}

/// Greedy peeling of a valid transformation into deterministic maps.
///
/// Each round selects, independently per target input, the source input
/// and output assignment with the largest removable weight (smallest
/// entry along the selected positions), lexicographically least among
/// maxima, removes that weight and repeats. Every round zeroes at least
/// one matrix entry, so at most `d' * d` terms appear and the weighted sum
/// reconstructs the matrix exactly.
pub fn decompose(t: &LocalTransformation) -> ConvexDecomposition {
    let source = &t.source;
    let target = &t.target;
    let mut rest = t.matrix.clone();
    let mut terms: Vec<(Rational, DetMap)> = Vec::new();
    loop {
        // remaining mass, read off the first target input's kernel row
        let mut remaining = Rational::zero();
        for x in 1..=source.num_inputs() {
            let c = source.flatten(1, x).unwrap();
            for a_tgt in 1..=target.num_outputs(1) {
                remaining += rest.get(target.flatten(a_tgt, 1).unwrap(), c);
            }
        }
        if remaining.is_zero() {
            break;
        }
        // per target input: best (source input, assignment)
        let mut xi = Vec::with_capacity(target.num_inputs());
        let mut alphas = Vec::with_capacity(target.num_inputs());
        let mut weight: Option<Rational> = None;
        for z in 1..=target.num_inputs() {
            let mut best: Option<(Rational, usize, Vec<usize>)> = None;
            for x in 1..=source.num_inputs() {
                // per source output, the largest entry in this block column
                let mut assignment = Vec::with_capacity(source.num_outputs(x));
                let mut w_block: Option<Rational> = None;
                for a in 1..=source.num_outputs(x) {
                    let col = source.flatten(a, x).unwrap();
                    let mut best_val = Rational::zero();
                    let mut best_out = 1usize;
                    for a_tgt in 1..=target.num_outputs(z) {
                        let v = rest.get(target.flatten(a_tgt, z).unwrap(), col);
                        if *v > best_val {
                            best_val = v.clone();
                            best_out = a_tgt;
                        }
                    }
                    assignment.push(best_out);
                    w_block = Some(match w_block {
                        None => best_val,
                        Some(w) => w.min(best_val),
                    });
                }
                let w_block = w_block.expect("at least one source output");
                let better = match &best {
                    None => true,
                    Some((w, _, _)) => w_block > *w,
                };
                if better {
                    best = Some((w_block, x, assignment));
                }
            }
            let (w, x, assignment) = best.expect("at least one source input");
            weight = Some(match weight {
                None => w,
                Some(total) => total.min(w),
            });
            xi.push(x);
            alphas.push(assignment);
        }
        let w = weight.expect("at least one target input");
        debug_assert!(w > Rational::zero(), "removable weight must be positive");
        let m = DetMap::new(source.clone(), target.clone(), xi, alphas).expect("valid peel");
        rest = rest.sub(&m.to_matrix().scale(&w));
        terms.push((w, m));
    }
    ConvexDecomposition { terms }
}

/// One per-party slot of a tensor transformation.
#[derive(Clone, Debug)]
pub enum PartyMap {
    Identity,
    Map(LocalTransformation),
}

impl PartyMap {
    fn check_source(&self, card: &PartyCard) -> Result<()> {
        match self {
            PartyMap::Identity => Ok(()),
            PartyMap::Map(t) if t.source() == card => Ok(()),
            PartyMap::Map(t) => Err(Error::ScenarioMismatch(format!(
                "party map expects source {}, scenario has {}",
                t.source(),
                card
            ))),
        }
    }
}

/// Applies one transformation (or identity) per party to a behavior:
/// `P' = (L_A x L_B x ...) P`.
pub fn apply_to_behavior(parts: &[PartyMap], p: &Behavior) -> Result<Behavior> {
    let scenario = p.scenario();
    if parts.len() != scenario.num_parties() {
        return Err(Error::ScenarioMismatch(
            "one party map per party required".into(),
        ));
    }
    for (k, part) in parts.iter().enumerate() {
        part.check_source(scenario.party(k))?;
    }
    let mut dims: Vec<usize> = scenario.parties().iter().map(PartyCard::dim).collect();
    let mut coeffs = p.coeffs().to_vec();
    let mut out_scenario = scenario.clone();
    for (k, part) in parts.iter().enumerate() {
        if let PartyMap::Map(t) = part {
            coeffs = apply_to_party(&dims, k, t.matrix(), &coeffs);
            dims[k] = t.target().dim();
            out_scenario = out_scenario.with_party(k, t.target().clone());
        }
    }
    Behavior::new(out_scenario, coeffs)
}

/// Pulls an expression back along per-party transformations:
/// `phi' = phi (L_A x L_B x ...)`, with the bound carried unchanged. The
/// party maps go from the *new* scenario to the expression's scenario.
pub fn apply_to_expression(phi: &BellExpression, parts: &[PartyMap]) -> Result<BellExpression> {
    let scenario = phi.scenario();
    if parts.len() != scenario.num_parties() {
        return Err(Error::ScenarioMismatch(
            "one party map per party required".into(),
        ));
    }
    for (k, part) in parts.iter().enumerate() {
        if let PartyMap::Map(t) = part {
            if t.target() != scenario.party(k) {
                return Err(Error::ScenarioMismatch(format!(
                    "party map lands in {}, expression expects {}",
                    t.target(),
                    scenario.party(k)
                )));
            }
        }
    }
    let mut dims: Vec<usize> = scenario.parties().iter().map(PartyCard::dim).collect();
    let mut coeffs = phi.coeffs().to_vec();
    let mut out_scenario = scenario.clone();
    for (k, part) in parts.iter().enumerate() {
        if let PartyMap::Map(t) = part {
            // row-vector action: contract along the matrix rows
            coeffs = apply_to_party(&dims, k, &t.matrix().transpose(), &coeffs);
            dims[k] = t.source().dim();
            out_scenario = out_scenario.with_party(k, t.source().clone());
        }
    }
    BellExpression::new(out_scenario, coeffs, phi.bound().cloned())
}
