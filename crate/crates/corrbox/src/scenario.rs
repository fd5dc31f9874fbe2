//! Scenarios and index arithmetic.
//!
//! A scenario is the list of party cardinalities together with the set `E`
//! of allowed signaling directions. This module owns every conversion
//! between `(output, input)` pairs and flat vector positions, and the
//! tensor (Kronecker) convention for multi-party coefficient vectors:
//! within a party the output index increments first, then the input; across
//! parties the first party is slowest.
//!
//! Inputs and outputs are 1-based in the API, mirroring the conventions the
//! formulas are written in; flat positions are 0-based. Party indices are
//! 0-based everywhere.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// Output cardinalities of one party, per input: `(A_1, ..., A_X)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PartyCard {
    outputs: Vec<usize>,
}

impl PartyCard {
    pub fn new(outputs: Vec<usize>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::InvalidInput(
                "a party needs at least one input".into(),
            ));
        }
        if outputs.contains(&0) {
            return Err(Error::InvalidInput(
                "every input needs at least one output".into(),
            ));
        }
        Ok(PartyCard { outputs })
    }

    /// Convenience constructor for literal cardinalities like `(3, 2)`.
    pub fn from_slice(outputs: &[usize]) -> Self {
        Self::new(outputs.to_vec()).expect("valid cardinality literal")
    }

    /// Number of inputs `X`.
    pub fn num_inputs(&self) -> usize {
        self.outputs.len()
    }

    /// Number of outputs `A_x` for the 1-based input `x`.
    pub fn num_outputs(&self, x: usize) -> usize {
        self.outputs[x - 1]
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Flat dimension `d = sum_x A_x`.
    pub fn dim(&self) -> usize {
        self.outputs.iter().sum()
    }

    /// Any input with a single output. Such inputs never reveal anything,
    /// which makes some algebraically non-invertible maps indistinguishable
    /// from invertible ones on behaviors; callers can surface this.
    pub fn has_single_output_input(&self) -> bool {
        self.outputs.contains(&1)
    }

    /// Flat position of `(a, x)`: outputs increment first, then inputs.
    pub fn flatten(&self, a: usize, x: usize) -> Result<usize> {
        if x < 1 || x > self.num_inputs() || a < 1 || a > self.num_outputs(x) {
            return Err(Error::IndexOutOfRange(format!(
                "(a={a}, x={x}) out of range for cardinality {self}"
            )));
        }
        Ok(self.outputs[..x - 1].iter().sum::<usize>() + (a - 1))
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn unflatten(&self, mut pos: usize) -> (usize, usize) {
        assert!(pos < self.dim(), "flat position out of range");
        for (i, &a_x) in self.outputs.iter().enumerate() {
            if pos < a_x {
                return (pos + 1, i + 1);
            }
            pos -= a_x;
        }
        unreachable!()
    }

    /// All `(a, x)` pairs in flat order.
    pub fn iter_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.num_inputs()).flat_map(move |x| (1..=self.num_outputs(x)).map(move |a| (a, x)))
    }
}

impl fmt::Display for PartyCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.outputs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// One `(a, x)` coordinate of one party.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FlatIndex {
    pub party: usize,
    pub input: usize,
    pub output: usize,
}

/// Party cardinalities plus the signaling directions `E`.
///
/// `(s, s)` is in `E` for every party by convention; constructors enforce
/// this.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scenario {
    parties: Vec<PartyCard>,
    signaling: BTreeSet<(usize, usize)>,
}

impl Scenario {
    /// Scenario with an explicit signaling set; the diagonal is added.
    pub fn new(parties: Vec<PartyCard>, signaling: &[(usize, usize)]) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidInput(
                "a scenario needs at least one party".into(),
            ));
        }
        let n = parties.len();
        let mut set = BTreeSet::new();
        for s in 0..n {
            set.insert((s, s));
        }
        for &(s, t) in signaling {
            if s >= n || t >= n {
                return Err(Error::IndexOutOfRange(format!(
                    "signaling pair ({s},{t}) references a missing party"
                )));
            }
            set.insert((s, t));
        }
        Ok(Scenario {
            parties,
            signaling: set,
        })
    }

    /// Scenario with no signaling between distinct parties.
    pub fn nonsignaling(parties: Vec<PartyCard>) -> Self {
        Self::new(parties, &[]).expect("nonsignaling scenario")
    }

    /// Scenario where every party may signal to every other.
    pub fn fully_signaling(parties: Vec<PartyCard>) -> Self {
        let n = parties.len();
        let pairs: Vec<_> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        Self::new(parties, &pairs).expect("fully signaling scenario")
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn party(&self, k: usize) -> &PartyCard {
        &self.parties[k]
    }

    pub fn parties(&self) -> &[PartyCard] {
        &self.parties
    }

    pub fn signaling_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.signaling
    }

    /// True iff `from` is allowed to signal to `to`.
    pub fn signaling_allowed(&self, from: usize, to: usize) -> bool {
        self.signaling.contains(&(from, to))
    }

    /// True when `E` is the diagonal only.
    pub fn is_nonsignaling(&self) -> bool {
        self.signaling.iter().all(|&(s, t)| s == t)
    }

    /// Parties whose input may influence party `t`: `{p : (p, t) in E}`,
    /// always including `t` itself. Sorted by party index.
    pub fn influencers(&self, t: usize) -> Vec<usize> {
        (0..self.num_parties())
            .filter(|&p| self.signaling_allowed(p, t))
            .collect()
    }

    /// Total coefficient dimension `prod_k d_k`.
    pub fn dim(&self) -> usize {
        self.parties.iter().map(PartyCard::dim).product()
    }

    /// Row-major strides of the per-party flat indices.
    pub fn strides(&self) -> Vec<usize> {
        let dims: Vec<usize> = self.parties.iter().map(PartyCard::dim).collect();
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        strides
    }

    /// Tensor position of one `(a, x)` pair per party, consistent with the
    /// Kronecker product order (first party slowest).
    pub fn tensor_index(&self, pairs: &[(usize, usize)]) -> Result<usize> {
        if pairs.len() != self.num_parties() {
            return Err(Error::InvalidInput(format!(
                "expected one (a,x) pair per party, got {} for {} parties",
                pairs.len(),
                self.num_parties()
            )));
        }
        let strides = self.strides();
        let mut pos = 0;
        for (k, &(a, x)) in pairs.iter().enumerate() {
            pos += self.parties[k].flatten(a, x)? * strides[k];
        }
        Ok(pos)
    }

    /// Per-party `(a, x)` pairs of a tensor position.
    pub fn tensor_unindex(&self, mut pos: usize) -> Vec<(usize, usize)> {
        assert!(pos < self.dim(), "tensor position out of range");
        let strides = self.strides();
        let mut out = Vec::with_capacity(self.num_parties());
        for (k, stride) in strides.iter().enumerate() {
            let flat = pos / stride;
            pos %= stride;
            out.push(self.parties[k].unflatten(flat));
        }
        out
    }

    /// Iterates over all joint inputs, one input per party, first party
    /// slowest.
    pub fn joint_inputs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for card in &self.parties {
            let mut next = Vec::new();
            for prefix in &out {
                for x in 1..=card.num_inputs() {
                    let mut v = prefix.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Iterates over all joint outputs compatible with the joint input.
    pub fn joint_outputs(&self, inputs: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for (k, card) in self.parties.iter().enumerate() {
            let mut next = Vec::new();
            for prefix in &out {
                for a in 1..=card.num_outputs(inputs[k]) {
                    let mut v = prefix.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Replaces one party's cardinality, keeping `E`.
    pub fn with_party(&self, k: usize, card: PartyCard) -> Scenario {
        let mut parties = self.parties.clone();
        parties[k] = card;
        Scenario {
            parties,
            signaling: self.signaling.clone(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parties.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{p}")?;
        }
        let extra: Vec<_> = self.signaling.iter().filter(|&&(s, t)| s != t).collect();
        if !extra.is_empty() {
            write!(f, " E+{extra:?}")?;
        }
        Ok(())
    }
}

/// The CHSH scenario: two nonsignaling parties with binary inputs/outputs.
pub fn chsh_scenario() -> Scenario {
    Scenario::nonsignaling(vec![
        PartyCard::from_slice(&[2, 2]),
        PartyCard::from_slice(&[2, 2]),
    ])
}

/// Two binary parties with both signaling directions allowed, as used for
/// causal inequalities.
pub fn causal_scenario_2222() -> Scenario {
    Scenario::fully_signaling(vec![
        PartyCard::from_slice(&[2, 2]),
        PartyCard::from_slice(&[2, 2]),
    ])
}
