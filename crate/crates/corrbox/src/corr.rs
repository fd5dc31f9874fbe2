//! Behaviors and Bell expressions over a scenario.
//!
//! A behavior is a column vector of conditional probabilities in the tensor
//! coefficient order fixed by [`crate::scenario`]; a Bell expression is the
//! dual row vector, optionally paired with an upper bound to form a
//! K-inequality. The two are distinct types on purpose: they do not
//! transform alike, and keeping them apart catches dual/primal mixups at
//! the type level.

use num_traits::{One, Zero};

use crate::ratlin::{dot, rat, rat_int, RatVector, Rational};
use crate::scenario::{PartyCard, Scenario};
use crate::{Error, Result};

/// Coefficient vector of a (possibly improper) joint conditional
/// distribution. No sign or normalization constraint is imposed at the type
/// level: the ambient vector space contains improper vectors too.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Behavior {
    scenario: Scenario,
    coeffs: RatVector,
}

impl Behavior {
    pub fn new(scenario: Scenario, coeffs: RatVector) -> Result<Self> {
        if coeffs.len() != scenario.dim() {
            return Err(Error::ScenarioMismatch(format!(
                "behavior has {} coefficients, scenario {} needs {}",
                coeffs.len(),
                scenario,
                scenario.dim()
            )));
        }
        Ok(Behavior { scenario, coeffs })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> RatVector {
        self.coeffs
    }

    /// Coefficient at one `(a, x)` pair per party.
    pub fn coeff(&self, pairs: &[(usize, usize)]) -> Result<&Rational> {
        Ok(&self.coeffs[self.scenario.tensor_index(pairs)?])
    }

    /// True iff every coefficient is >= 0.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// True iff every joint-input block sums to one.
    pub fn is_normalized(&self) -> bool {
        for inputs in self.scenario.joint_inputs() {
            let mut sum = Rational::zero();
            for outputs in self.scenario.joint_outputs(&inputs) {
                let pairs: Vec<_> = outputs.iter().zip(&inputs).map(|(&a, &x)| (a, x)).collect();
                sum += self.coeff(&pairs).expect("index in range");
            }
            if !sum.is_one() {
                return false;
            }
        }
        true
    }
}

use num_traits::Signed;

/// A violated nonsignaling constraint: the marginal of `targets` changed
/// when the inputs of `sources` changed from `source_inputs_a` to
/// `source_inputs_b`, at fixed `other_inputs`/`target_inputs` and target
/// outputs `target_outputs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsViolation {
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
    /// Inputs of the source parties, in `sources` order, for both sides.
    pub source_inputs_a: Vec<usize>,
    pub source_inputs_b: Vec<usize>,
    /// Inputs of every non-source party, in party order.
    pub fixed_inputs: Vec<(usize, usize)>,
    /// Outputs of the target parties, in `targets` order.
    pub target_outputs: Vec<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Behavior {
    /// Marginal sum over the outputs of every party not in `targets`, at
    /// the given joint input.
    fn marginal(&self, targets: &[usize], target_outputs: &[usize], inputs: &[usize]) -> Rational {
        let n = self.scenario.num_parties();
        let free: Vec<usize> = (0..n).filter(|p| !targets.contains(p)).collect();
        let mut choices: Vec<Vec<usize>> = vec![vec![]];
        for &p in &free {
            let a_p = self.scenario.party(p).num_outputs(inputs[p]);
            let mut next = Vec::new();
            for c in &choices {
                for a in 1..=a_p {
                    let mut v = c.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            choices = next;
        }
        let mut sum = Rational::zero();
        for choice in choices {
            let mut pairs = vec![(0usize, 0usize); n];
            for (slot, &p) in free.iter().enumerate() {
                pairs[p] = (choice[slot], inputs[p]);
            }
            for (slot, &p) in targets.iter().enumerate() {
                pairs[p] = (target_outputs[slot], inputs[p]);
            }
            sum += self.coeff(&pairs).expect("index in range");
        }
        sum
    }

    /// Checks the nonsignaling constraints of the scenario's `E`.
    ///
    /// By default one constraint family per single source party is checked
    /// (source `s`, targets = all parties `s` may not signal to); in fully
    /// nonsignaling scenarios these imply all grouped constraints. With
    /// `exhaustive`, every disjoint (source set, target set) pair with no
    /// allowed signaling from any source to any target is checked, which
    /// matters in partial-signaling scenarios where grouped constraints are
    /// not implied.
    pub fn check_nonsignaling(&self, exhaustive: bool) -> Result<Vec<NsViolation>> {
        if !self.is_normalized() {
            return Err(Error::InvalidInput(
                "nonsignaling check requires a normalized behavior".into(),
            ));
        }
        let n = self.scenario.num_parties();
        let mut pairs: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        if exhaustive {
            // all ordered pairs of disjoint nonempty subsets with no allowed
            // source -> target signaling
            for smask in 1u32..(1 << n) {
                for tmask in 1u32..(1 << n) {
                    if smask & tmask != 0 {
                        continue;
                    }
                    let sources: Vec<usize> = (0..n).filter(|p| smask >> p & 1 == 1).collect();
                    let targets: Vec<usize> = (0..n).filter(|p| tmask >> p & 1 == 1).collect();
                    let blocked = sources.iter().all(|&s| {
                        targets
                            .iter()
                            .all(|&t| !self.scenario.signaling_allowed(s, t))
                    });
                    if blocked {
                        pairs.push((sources, targets));
                    }
                }
            }
        } else {
            for s in 0..n {
                let targets: Vec<usize> = (0..n)
                    .filter(|&t| t != s && !self.scenario.signaling_allowed(s, t))
                    .collect();
                if !targets.is_empty() {
                    pairs.push((vec![s], targets));
                }
            }
        }

        let mut violations = Vec::new();
        for (sources, targets) in pairs {
            violations.extend(self.check_ns_pair(&sources, &targets));
        }
        Ok(violations)
    }

    fn check_ns_pair(&self, sources: &[usize], targets: &[usize]) -> Vec<NsViolation> {
        let n = self.scenario.num_parties();
        let others: Vec<usize> = (0..n).filter(|p| !sources.contains(p)).collect();

        // joint inputs over non-source parties
        let mut base_inputs: Vec<Vec<usize>> = vec![vec![]];
        for &p in &others {
            let xp = self.scenario.party(p).num_inputs();
            let mut next = Vec::new();
            for c in &base_inputs {
                for x in 1..=xp {
                    let mut v = c.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            base_inputs = next;
        }
        // joint inputs over source parties
        let mut source_inputs: Vec<Vec<usize>> = vec![vec![]];
        for &p in sources {
            let xp = self.scenario.party(p).num_inputs();
            let mut next = Vec::new();
            for c in &source_inputs {
                for x in 1..=xp {
                    let mut v = c.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            source_inputs = next;
        }

        let mut violations = Vec::new();
        for base in &base_inputs {
            // outputs of target parties depend only on fixed target inputs
            let target_inputs: Vec<usize> = targets
                .iter()
                .map(|&t| base[others.iter().position(|&p| p == t).unwrap()])
                .collect();
            let mut target_choices: Vec<Vec<usize>> = vec![vec![]];
            for (slot, &t) in targets.iter().enumerate() {
                let a_t = self.scenario.party(t).num_outputs(target_inputs[slot]);
                let mut next = Vec::new();
                for c in &target_choices {
                    for a in 1..=a_t {
                        let mut v = c.clone();
                        v.push(a);
                        next.push(v);
                    }
                }
                target_choices = next;
            }
            for target_outputs in &target_choices {
                let reference = &source_inputs[0];
                let mut inputs_ref = vec![0usize; n];
                for (slot, &p) in others.iter().enumerate() {
                    inputs_ref[p] = base[slot];
                }
                for (slot, &p) in sources.iter().enumerate() {
                    inputs_ref[p] = reference[slot];
                }
                let lhs = self.marginal(targets, target_outputs, &inputs_ref);
                for alt in &source_inputs[1..] {
                    let mut inputs_alt = inputs_ref.clone();
                    for (slot, &p) in sources.iter().enumerate() {
                        inputs_alt[p] = alt[slot];
                    }
                    let rhs = self.marginal(targets, target_outputs, &inputs_alt);
                    if lhs != rhs {
                        violations.push(NsViolation {
                            sources: sources.to_vec(),
                            targets: targets.to_vec(),
                            source_inputs_a: reference.clone(),
                            source_inputs_b: alt.clone(),
                            fixed_inputs: others.iter().map(|&p| (p, inputs_ref[p])).collect(),
                            target_outputs: target_outputs.clone(),
                            lhs: lhs.clone(),
                            rhs,
                        });
                    }
                }
            }
        }
        violations
    }
}

/// A linear form on behaviors (row-vector semantics), optionally with an
/// upper bound `u`, forming a K-inequality `phi . P <= u`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BellExpression {
    scenario: Scenario,
    coeffs: RatVector,
    bound: Option<Rational>,
}

impl BellExpression {
    pub fn new(scenario: Scenario, coeffs: RatVector, bound: Option<Rational>) -> Result<Self> {
        if coeffs.len() != scenario.dim() {
            return Err(Error::ScenarioMismatch(format!(
                "expression has {} coefficients, scenario {} needs {}",
                coeffs.len(),
                scenario,
                scenario.dim()
            )));
        }
        Ok(BellExpression {
            scenario,
            coeffs,
            bound,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn bound(&self) -> Option<&Rational> {
        self.bound.as_ref()
    }

    pub fn with_bound(mut self, bound: Rational) -> Self {
        self.bound = Some(bound);
        self
    }

    /// Exact contraction `phi . P`.
    pub fn evaluate(&self, p: &Behavior) -> Result<Rational> {
        if self.scenario != *p.scenario() {
            return Err(Error::ScenarioMismatch(
                "expression and behavior live in different scenarios".into(),
            ));
        }
        Ok(dot(&self.coeffs, p.coeffs()))
    }
}

/// Per-party response functions defining a deterministic behavior.
///
/// Party `t` answers as a function of the inputs of the parties allowed to
/// signal to it (itself included); the response table is indexed by those
/// inputs in mixed-radix order, influencer party index slowest.
#[derive(Clone, Debug)]
pub struct DetBehaviorSpec {
    /// `responses[t][idx]` is the 1-based output of party `t` for the
    /// mixed-radix input combination `idx` over `influencers(t)`.
    pub responses: Vec<Vec<usize>>,
}

impl DetBehaviorSpec {
    fn table_len(scenario: &Scenario, t: usize) -> usize {
        scenario
            .influencers(t)
            .iter()
            .map(|&p| scenario.party(p).num_inputs())
            .product()
    }

    fn response(&self, scenario: &Scenario, t: usize, inputs: &[usize]) -> usize {
        let influencers = scenario.influencers(t);
        let mut idx = 0usize;
        for &p in &influencers {
            idx = idx * scenario.party(p).num_inputs() + (inputs[p] - 1);
        }
        self.responses[t][idx]
    }
}

/// Builds the 0/1 behavior of a deterministic response assignment.
pub fn deterministic_behavior(scenario: &Scenario, spec: &DetBehaviorSpec) -> Result<Behavior> {
    let n = scenario.num_parties();
    if spec.responses.len() != n {
        return Err(Error::InvalidInput(
            "one response table per party required".into(),
        ));
    }
    for t in 0..n {
        if spec.responses[t].len() != DetBehaviorSpec::table_len(scenario, t) {
            return Err(Error::InvalidInput(format!(
                "party {t}: response table length {} does not match its input domain {}",
                spec.responses[t].len(),
                DetBehaviorSpec::table_len(scenario, t)
            )));
        }
    }
    let mut coeffs = vec![Rational::zero(); scenario.dim()];
    for inputs in scenario.joint_inputs() {
        let mut pairs = Vec::with_capacity(n);
        let mut ok = true;
        for t in 0..n {
            let a = spec.response(scenario, t, &inputs);
            if a < 1 || a > scenario.party(t).num_outputs(inputs[t]) {
                ok = false;
                break;
            }
            pairs.push((a, inputs[t]));
        }
        if !ok {
            return Err(Error::IndexOutOfRange(
                "response value outside output range".into(),
            ));
        }
        coeffs[scenario.tensor_index(&pairs)?] = Rational::one();
    }
    Behavior::new(scenario.clone(), coeffs)
}

/// Enumerates every deterministic behavior of the scenario, in lexicographic
/// response-table order.
pub fn enumerate_deterministic(scenario: &Scenario) -> Vec<Behavior> {
    let n = scenario.num_parties();
    // all response tables per party
    let mut per_party: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for t in 0..n {
        let len = DetBehaviorSpec::table_len(scenario, t);
        // outputs may depend on the party's own input; the valid range for
        // slot `idx` is the output count at the own-input component of idx
        let influencers = scenario.influencers(t);
        let radices: Vec<usize> = influencers
            .iter()
            .map(|&p| scenario.party(p).num_inputs())
            .collect();
        let own_slot = influencers
            .iter()
            .position(|&p| p == t)
            .expect("(t,t) in E");
        let own_input_of = |mut idx: usize| -> usize {
            let mut digits = vec![0usize; radices.len()];
            for (slot, &r) in radices.iter().enumerate().rev() {
                digits[slot] = idx % r;
                idx /= r;
            }
            digits[own_slot] + 1
        };
        let mut tables: Vec<Vec<usize>> = vec![vec![]];
        for idx in 0..len {
            let a_max = scenario.party(t).num_outputs(own_input_of(idx));
            let mut next = Vec::new();
            for tbl in &tables {
                for a in 1..=a_max {
                    let mut v = tbl.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            tables = next;
        }
        per_party.push(tables);
    }
    let mut specs: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for tables in per_party {
        let mut next = Vec::new();
        for s in &specs {
            for t in &tables {
                let mut v = s.clone();
                v.push(t.clone());
                next.push(v);
            }
        }
        specs = next;
    }
    specs
        .into_iter()
        .map(|responses| {
            deterministic_behavior(scenario, &DetBehaviorSpec { responses })
                .expect("enumerated spec is valid")
        })
        .collect()
}

/// The PR box: `a xor b = x y` (0-based), uniformly at 1/2, in the CHSH
/// scenario.
pub fn pr_box() -> Behavior {
    let s = crate::scenario::chsh_scenario();
    let mut coeffs = vec![Rational::zero(); 16];
    for x in 1..=2usize {
        for a in 1..=2usize {
            for y in 1..=2usize {
                for b in 1..=2usize {
                    if (a - 1) ^ (b - 1) == (x - 1) * (y - 1) {
                        coeffs[s.tensor_index(&[(a, x), (b, y)]).unwrap()] = rat(1, 2);
                    }
                }
            }
        }
    }
    Behavior::new(s, coeffs).unwrap()
}

/// The CHSH expression with local bound 2.
pub fn chsh() -> BellExpression {
    let s = crate::scenario::chsh_scenario();
    let mut coeffs = vec![Rational::zero(); 16];
    for x in 1..=2usize {
        for a in 1..=2usize {
            for y in 1..=2usize {
                for b in 1..=2usize {
                    let sign = (a - 1) + (b - 1) + (x - 1) * (y - 1);
                    let v = if sign % 2 == 0 {
                        rat_int(1)
                    } else {
                        rat_int(-1)
                    };
                    coeffs[s.tensor_index(&[(a, x), (b, y)]).unwrap()] = v;
                }
            }
        }
    }
    BellExpression::new(s, coeffs, Some(rat_int(2))).unwrap()
}

/// Guess Your Neighbour's Input: `phi(a,b,x,y) = 1` iff `a = y` and
/// `b = x`, bound 2 for causal behaviors, in the two-way signaling binary
/// scenario.
pub fn gyni() -> BellExpression {
    let s = crate::scenario::causal_scenario_2222();
    let mut coeffs = vec![Rational::zero(); 16];
    for x in 1..=2usize {
        for a in 1..=2usize {
            for y in 1..=2usize {
                for b in 1..=2usize {
                    if a == y && b == x {
                        coeffs[s.tensor_index(&[(a, x), (b, y)]).unwrap()] = Rational::one();
                    }
                }
            }
        }
    }
    BellExpression::new(s, coeffs, Some(rat_int(2))).unwrap()
}

/// Lazy GYNI: each party guesses the other's input only when its own input
/// is the first one (0-based: `x (a xor y) = 0` and `y (b xor x) = 0`),
/// bound 3 for causal behaviors.
pub fn lgyni() -> BellExpression {
    let s = crate::scenario::causal_scenario_2222();
    let mut coeffs = vec![Rational::zero(); 16];
    for x in 0..2usize {
        for a in 0..2usize {
            for y in 0..2usize {
                for b in 0..2usize {
                    if x * (a ^ y) == 0 && y * (b ^ x) == 0 {
                        coeffs[s.tensor_index(&[(a + 1, x + 1), (b + 1, y + 1)]).unwrap()] =
                            Rational::one();
                    }
                }
            }
        }
    }
    BellExpression::new(s, coeffs, Some(rat_int(3))).unwrap()
}

/// Stock behaviors and expressions by name.
pub enum Stock {
    Behavior(Behavior),
    Expression(BellExpression),
}

/// Looks up a stock object: `pr`, `chsh`, `gyni` or `lgyni`.
pub fn stock(name: &str) -> Result<Stock> {
    match name.to_ascii_lowercase().as_str() {
        "pr" => Ok(Stock::Behavior(pr_box())),
        "chsh" => Ok(Stock::Expression(chsh())),
        "gyni" => Ok(Stock::Expression(gyni())),
        "lgyni" => Ok(Stock::Expression(lgyni())),
        other => Err(Error::InvalidInput(format!(
            "unknown stock object {other:?} (expected pr, chsh, gyni or lgyni)"
        ))),
    }
}

/// The behavior `b = x` of a two-party scenario where A signals to B:
/// A has binary inputs with a single output each, B has one input with two
/// outputs.
pub fn signaling_b_equals_x() -> Behavior {
    let s = Scenario::new(
        vec![PartyCard::from_slice(&[1, 1]), PartyCard::from_slice(&[2])],
        &[(0, 1)],
    )
    .unwrap();
    let mut coeffs = vec![Rational::zero(); 4];
    for x in 1..=2usize {
        for b in 1..=2usize {
            if b == x {
                coeffs[s.tensor_index(&[(1, x), (b, 1)]).unwrap()] = Rational::one();
            }
        }
    }
    Behavior::new(s, coeffs).unwrap()
}

/// The uniformly random behavior of a scenario.
pub fn uniform_behavior(scenario: &Scenario) -> Behavior {
    let mut coeffs = vec![Rational::zero(); scenario.dim()];
    for (i, coeff) in coeffs.iter_mut().enumerate() {
        let pairs = scenario.tensor_unindex(i);
        let mut v = Rational::one();
        for (k, &(_a, x)) in pairs.iter().enumerate() {
            v /= rat_int(scenario.party(k).num_outputs(x) as i64);
        }
        *coeff = v;
    }
    Behavior::new(scenario.clone(), coeffs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::chsh_scenario;

    #[test]
    fn pr_box_is_a_proper_nonsignaling_behavior() {
        let pr = pr_box();
        assert!(pr.is_nonnegative());
        assert!(pr.is_normalized());
        assert!(pr.check_nonsignaling(true).unwrap().is_empty());
    }

    #[test]
    fn nonnegativity_examples() {
        let s = chsh_scenario();
        let zero = Behavior::new(s.clone(), vec![Rational::zero(); 16]).unwrap();
        assert!(zero.is_nonnegative());
        let mut coeffs = vec![Rational::zero(); 16];
        coeffs[5] = rat_int(-1);
        let neg = Behavior::new(s, coeffs).unwrap();
        assert!(!neg.is_nonnegative());
    }

    #[test]
    fn normalization_examples() {
        let s = chsh_scenario();
        assert!(uniform_behavior(&s).is_normalized());
        let double: RatVector = pr_box().coeffs().iter().map(|c| c * rat_int(2)).collect();
        let double = Behavior::new(s, double).unwrap();
        assert!(!double.is_normalized());
    }

    #[test]
    fn chsh_on_pr_is_four() {
        assert_eq!(chsh().evaluate(&pr_box()).unwrap(), rat_int(4));
    }

    #[test]
    fn evaluation_on_zero_behavior() {
        let s = chsh_scenario();
        let zero = Behavior::new(s, vec![Rational::zero(); 16]).unwrap();
        assert_eq!(chsh().evaluate(&zero).unwrap(), Rational::zero());
    }

    #[test]
    fn gyni_on_uniform_behavior() {
        let s = crate::scenario::causal_scenario_2222();
        let u = uniform_behavior(&s);
        assert_eq!(gyni().evaluate(&u).unwrap(), rat_int(1));
    }

    #[test]
    fn signaling_behavior_violates_a_to_b() {
        let p = signaling_b_equals_x();
        assert!(p.is_normalized());
        // its own scenario allows A -> B, so no violation there
        assert!(p.check_nonsignaling(true).unwrap().is_empty());
        // in the nonsignaling scenario the A -> B constraint breaks
        let ns = Scenario::nonsignaling(vec![
            PartyCard::from_slice(&[1, 1]),
            PartyCard::from_slice(&[2]),
        ]);
        let p_ns = Behavior::new(ns, p.coeffs().to_vec()).unwrap();
        let violations = p_ns.check_nonsignaling(false).unwrap();
        assert!(!violations.is_empty());
        assert_eq!(violations[0].sources, vec![0]);
        assert_eq!(violations[0].targets, vec![1]);
    }

    #[test]
    fn product_behaviors_are_nonsignaling() {
        let s = Scenario::nonsignaling(vec![
            PartyCard::from_slice(&[3, 2]),
            PartyCard::from_slice(&[2, 2]),
        ]);
        let u = uniform_behavior(&s);
        assert!(u.check_nonsignaling(true).unwrap().is_empty());
    }

    #[test]
    fn deterministic_behavior_constant_outputs() {
        let s = chsh_scenario();
        let spec = DetBehaviorSpec {
            responses: vec![vec![1, 1], vec![1, 1]],
        };
        let p = deterministic_behavior(&s, &spec).unwrap();
        assert!(p.is_nonnegative() && p.is_normalized());
        assert!(p.check_nonsignaling(true).unwrap().is_empty());
        assert_eq!(p.coeff(&[(1, 1), (1, 1)]).unwrap(), &Rational::one());
        assert_eq!(p.coeff(&[(2, 1), (1, 1)]).unwrap(), &Rational::zero());
    }

    #[test]
    fn deterministic_b_equals_x_matches_signaling_behavior() {
        let s = Scenario::new(
            vec![PartyCard::from_slice(&[1, 1]), PartyCard::from_slice(&[2])],
            &[(0, 1)],
        )
        .unwrap();
        // B sees (x, y); responds b = x. Influencers of B are [0, 1] with
        // radices [2, 1]; index order: x slowest.
        let spec = DetBehaviorSpec {
            responses: vec![vec![1, 1], vec![1, 2]],
        };
        let p = deterministic_behavior(&s, &spec).unwrap();
        assert_eq!(p, signaling_b_equals_x());
    }

    #[test]
    fn deterministic_census_3333_2222() {
        let s = Scenario::nonsignaling(vec![
            PartyCard::from_slice(&[3, 3, 3]),
            PartyCard::from_slice(&[2, 2]),
        ]);
        let all = enumerate_deterministic(&s);
        assert_eq!(all.len(), 108);
        for p in &all {
            assert!(p.is_nonnegative() && p.is_normalized());
        }
    }

    #[test]
    fn chsh_local_bound_over_deterministic_boxes() {
        let s = chsh_scenario();
        let phi = chsh();
        let boxes = enumerate_deterministic(&s);
        assert_eq!(boxes.len(), 16);
        let mut max = rat_int(-100);
        for p in &boxes {
            let v = phi.evaluate(p).unwrap();
            assert!(v <= rat_int(2));
            if v > max {
                max = v;
            }
        }
        assert_eq!(max, rat_int(2));
    }

    #[test]
    fn evaluate_is_bilinear() {
        let s = chsh_scenario();
        let phi = chsh();
        let psi = BellExpression::new(
            s.clone(),
            (0..16).map(|i| rat(i as i64 % 5 - 2, 3)).collect(),
            None,
        )
        .unwrap();
        let p = pr_box();
        let (alpha, beta) = (rat(2, 3), rat(-7, 5));
        let combined = BellExpression::new(
            s,
            phi.coeffs()
                .iter()
                .zip(psi.coeffs())
                .map(|(a, b)| &alpha * a + &beta * b)
                .collect(),
            None,
        )
        .unwrap();
        assert_eq!(
            combined.evaluate(&p).unwrap(),
            alpha * phi.evaluate(&p).unwrap() + beta * psi.evaluate(&p).unwrap()
        );
    }

    #[test]
    fn lgyni_has_causal_bound_three() {
        // every deterministic A-before-B strategy satisfies lazy GYNI <= 3,
        // by direct enumeration
        let phi = lgyni();
        assert_eq!(phi.bound().unwrap(), &rat_int(3));
        let count: usize = phi.coeffs().iter().filter(|c| c.is_one()).count();
        assert_eq!(count, 9); // 16 - 7 excluded cells
    }
}
