//! The monoid of deterministic local maps.
//!
//! A deterministic local map from cardinality `(A_1..A_X)` to
//! `(A'_1..A'_{X'})` is a pair `(xi, alphas)`: an input mapping
//! `xi : x' -> x` going *backwards* from target inputs to source inputs,
//! and per target input an output mapping `alpha_{x'} : a -> a'`. These are
//! the atoms of all local transformations; general stochastic maps are
//! convex mixtures of them.
//!
//! Invertibility is meant inside the monoid: a left (right) inverse must
//! itself be a deterministic local map. Left-invertible maps lift
//! behaviors, right-invertible maps lift expressions, and maps invertible
//! on both sides are relabelings (equal cardinality) or reorderings
//! (permuted cardinality).

use num_traits::{One, Zero};

use crate::ratlin::{RatMatrix, Rational};
use crate::scenario::PartyCard;
use crate::{Error, Result};

/// Deterministic local map `(xi, alphas)` between party cardinalities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DetMap {
    source: PartyCard,
    target: PartyCard,
    /// `xi[z-1]` is the source input fed to target input `z` (1-based).
    xi: Vec<usize>,
    /// `alphas[z-1][a-1]` is the target output for source output `a` at
    /// target input `z` (1-based).
    alphas: Vec<Vec<usize>>,
}

impl DetMap {
    pub fn new(
        source: PartyCard,
        target: PartyCard,
        xi: Vec<usize>,
        alphas: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let x_src = source.num_inputs();
        let x_tgt = target.num_inputs();
        if xi.len() != x_tgt || alphas.len() != x_tgt {
            return Err(Error::InvalidInput(format!(
                "map needs one xi value and one alpha table per target input ({x_tgt})"
            )));
        }
        for (z0, &x) in xi.iter().enumerate() {
            if x < 1 || x > x_src {
                return Err(Error::IndexOutOfRange(format!(
                    "xi({}) = {x} outside source inputs 1..={x_src}",
                    z0 + 1
                )));
            }
            let dom = source.num_outputs(x);
            let ran = target.num_outputs(z0 + 1);
            if alphas[z0].len() != dom {
                return Err(Error::InvalidInput(format!(
                    "alpha_{} must be total on the {dom} outputs of source input {x}",
                    z0 + 1
                )));
            }
            if alphas[z0].iter().any(|&a| a < 1 || a > ran) {
                return Err(Error::IndexOutOfRange(format!(
                    "alpha_{} takes a value outside 1..={ran}",
                    z0 + 1
                )));
            }
        }
        Ok(DetMap {
            source,
            target,
            xi,
            alphas,
        })
    }

    /// The identity map on a cardinality.
    pub fn identity(card: PartyCard) -> Self {
        let xi = (1..=card.num_inputs()).collect();
        let alphas = (1..=card.num_inputs())
            .map(|x| (1..=card.num_outputs(x)).collect())
            .collect();
        DetMap {
            source: card.clone(),
            target: card,
            xi,
            alphas,
        }
    }

    pub fn source(&self) -> &PartyCard {
        &self.source
    }

    pub fn target(&self) -> &PartyCard {
        &self.target
    }

    pub fn xi(&self) -> &[usize] {
        &self.xi
    }

    pub fn alphas(&self) -> &[Vec<usize>] {
        &self.alphas
    }

    /// The 0/1 matrix realization: rows indexed by target `(a', x')`,
    /// columns by source `(a, x)`. Block row `x'` is nonzero only in block
    /// column `xi(x')` (row-stochastic block sparsity), and each nonzero
    /// block is column-stochastic.
    pub fn to_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.target.dim(), self.source.dim());
        for z in 1..=self.target.num_inputs() {
            let x = self.xi[z - 1];
            for a in 1..=self.source.num_outputs(x) {
                let a_tgt = self.alphas[z - 1][a - 1];
                let row = self.target.flatten(a_tgt, z).expect("valid map");
                let col = self.source.flatten(a, x).expect("valid map");
                m.set(row, col, Rational::one());
            }
        }
        m
    }

    /// Composition `t . s` (apply `s` first); the middle cardinality must
    /// match. Input maps compose the other way around:
    /// `zeta = xi_s . psi_t` and `gamma_z = beta_z . alpha_{psi(z)}`.
    pub fn compose(t: &DetMap, s: &DetMap) -> Result<DetMap> {
        if s.target != t.source {
            return Err(Error::ScenarioMismatch(format!(
                "cannot compose: middle cardinalities differ ({} vs {})",
                s.target, t.source
            )));
        }
        let xi: Vec<usize> = t.xi.iter().map(|&z_mid| s.xi[z_mid - 1]).collect();
        let mut alphas = Vec::with_capacity(t.target.num_inputs());
        for z in 1..=t.target.num_inputs() {
            let z_mid = t.xi[z - 1];
            let alpha_s = &s.alphas[z_mid - 1];
            let beta_t = &t.alphas[z - 1];
            alphas.push(alpha_s.iter().map(|&b| beta_t[b - 1]).collect());
        }
        DetMap::new(s.source.clone(), t.target.clone(), xi, alphas)
    }

    /// Factors into a pure input map (all outputs untouched) followed by a
    /// pure output map (inputs untouched).
    pub fn factor_pure(&self) -> (DetMap, DetMap) {
        // middle cardinality: one slot per target input, carrying the
        // outputs of its source input
        let mid = PartyCard::from_slice(
            &self
                .xi
                .iter()
                .map(|&x| self.source.num_outputs(x))
                .collect::<Vec<_>>(),
        );
        let pure_input = DetMap::new(
            self.source.clone(),
            mid.clone(),
            self.xi.clone(),
            self.xi
                .iter()
                .map(|&x| (1..=self.source.num_outputs(x)).collect())
                .collect(),
        )
        .expect("pure input map");
        let pure_output = DetMap::new(
            mid,
            self.target.clone(),
            (1..=self.target.num_inputs()).collect(),
            self.alphas.clone(),
        )
        .expect("pure output map");
        (pure_input, pure_output)
    }

    fn xi_surjective(&self) -> bool {
        let mut hit = vec![false; self.source.num_inputs()];
        for &x in &self.xi {
            hit[x - 1] = true;
        }
        hit.into_iter().all(|b| b)
    }

    fn xi_injective(&self) -> bool {
        let mut hit = vec![false; self.source.num_inputs()];
        for &x in &self.xi {
            if hit[x - 1] {
                return false;
            }
            hit[x - 1] = true;
        }
        true
    }

    fn alpha_injective(&self, z: usize) -> bool {
        let mut hit = vec![false; self.target.num_outputs(z)];
        for &a in &self.alphas[z - 1] {
            if hit[a - 1] {
                return false;
            }
            hit[a - 1] = true;
        }
        true
    }

    fn alpha_surjective(&self, z: usize) -> bool {
        let mut hit = vec![false; self.target.num_outputs(z)];
        for &a in &self.alphas[z - 1] {
            hit[a - 1] = true;
        }
        hit.into_iter().all(|b| b)
    }

    /// True iff some deterministic map `g` satisfies `g . self = id`:
    /// `xi` surjective, and every source input has a target clone with an
    /// injective output map.
    pub fn has_left_inverse(&self) -> bool {
        self.xi_surjective()
            && (1..=self.source.num_inputs()).all(|x| {
                (1..=self.target.num_inputs())
                    .any(|z| self.xi[z - 1] == x && self.alpha_injective(z))
            })
    }

    /// True iff some deterministic map `g` satisfies `self . g = id`:
    /// `xi` injective and every output map surjective.
    pub fn has_right_inverse(&self) -> bool {
        self.xi_injective() && (1..=self.target.num_inputs()).all(|z| self.alpha_surjective(z))
    }

    /// Single-output inputs make some algebraically non-invertible maps
    /// indistinguishable from invertible ones on behaviors; classification
    /// stays algebraic, and this advisory surfaces the caveat.
    pub fn degenerate_input_advisory(&self) -> bool {
        self.source.has_single_output_input() || self.target.has_single_output_input()
    }

    pub fn classify(&self) -> InvertibilityClass {
        match (self.has_left_inverse(), self.has_right_inverse()) {
            (true, true) => {
                if self.source.outputs() == self.target.outputs() {
                    InvertibilityClass::Relabeling
                } else {
                    InvertibilityClass::Reordering
                }
            }
            (true, false) => InvertibilityClass::LeftInvertible,
            (false, true) => InvertibilityClass::RightInvertible,
            (false, false) => InvertibilityClass::Neither,
        }
    }

    /// The lexicographically least left inverse. Left inverses are not
    /// unique in general; lexicographic order on `(xi, alphas)` fixes the
    /// returned one.
    pub fn find_left_inverse(&self) -> Result<DetMap> {
        if !self.has_left_inverse() {
            return Err(Error::NotInvertible { side: "left" });
        }
        let mut zeta = Vec::with_capacity(self.source.num_inputs());
        let mut gammas = Vec::with_capacity(self.source.num_inputs());
        for x in 1..=self.source.num_inputs() {
            let z = (1..=self.target.num_inputs())
                .find(|&z| self.xi[z - 1] == x && self.alpha_injective(z))
                .expect("left-invertible");
            zeta.push(z);
            // invert alpha_z on its image; off-image outputs go to 1
            let mut gamma = vec![1usize; self.target.num_outputs(z)];
            for (a0, &a_tgt) in self.alphas[z - 1].iter().enumerate() {
                gamma[a_tgt - 1] = a0 + 1;
            }
            gammas.push(gamma);
        }
        DetMap::new(self.target.clone(), self.source.clone(), zeta, gammas)
    }

    /// The lexicographically least right inverse.
    pub fn find_right_inverse(&self) -> Result<DetMap> {
        if !self.has_right_inverse() {
            return Err(Error::NotInvertible { side: "right" });
        }
        let mut zeta = Vec::with_capacity(self.source.num_inputs());
        let mut gammas = Vec::with_capacity(self.source.num_inputs());
        for x in 1..=self.source.num_inputs() {
            // xi is injective, so x has at most one preimage
            match (1..=self.target.num_inputs()).find(|&z| self.xi[z - 1] == x) {
                Some(z) => {
                    zeta.push(z);
                    // least preimage of each target output under alpha_z
                    let gamma: Vec<usize> = (1..=self.target.num_outputs(z))
                        .map(|c| {
                            self.alphas[z - 1]
                                .iter()
                                .position(|&v| v == c)
                                .expect("surjective")
                                + 1
                        })
                        .collect();
                    gammas.push(gamma);
                }
                None => {
                    // source input never used: anything composes to identity
                    zeta.push(1);
                    gammas.push(vec![1usize; self.target.num_outputs(1)]);
                }
            }
        }
        DetMap::new(self.target.clone(), self.source.clone(), zeta, gammas)
    }
}

/// Invertibility classification inside the monoid of deterministic maps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InvertibilityClass {
    /// Invertible with equal cardinality: input/output permutations.
    Relabeling,
    /// Invertible with permuted cardinality.
    Reordering,
    /// Has a left inverse only (behavior lifting).
    LeftInvertible,
    /// Has a right inverse only (expression lifting).
    RightInvertible,
    Neither,
}

impl std::fmt::Display for InvertibilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InvertibilityClass::Relabeling => "relabeling",
            InvertibilityClass::Reordering => "reordering",
            InvertibilityClass::LeftInvertible => "left-invertible",
            InvertibilityClass::RightInvertible => "right-invertible",
            InvertibilityClass::Neither => "neither",
        };
        f.write_str(s)
    }
}

/// Exact number of deterministic maps between two cardinalities:
/// independently per target input `z`, a source input `x` and a total
/// function `[A_x] -> [A'_z]`, so `prod_z sum_x (A'_z)^(A_x)`.
pub fn count_maps(source: &PartyCard, target: &PartyCard) -> u128 {
    let mut total: u128 = 1;
    for z in 1..=target.num_inputs() {
        let mut per_z: u128 = 0;
        for x in 1..=source.num_inputs() {
            per_z += (target.num_outputs(z) as u128).pow(source.num_outputs(x) as u32);
        }
        total = total.saturating_mul(per_z);
    }
    total
}

/// Streams every deterministic map from `source` to `target` in
/// lexicographic `(xi, alphas)` order, optionally keeping only one
/// invertibility class. Refuses when the total count exceeds `cap`
/// (default 10^7).
pub fn enumerate(
    source: &PartyCard,
    target: &PartyCard,
    filter: Option<InvertibilityClass>,
    cap: Option<u128>,
) -> Result<DetMapIter> {
    let cap = cap.unwrap_or(10_000_000);
    let needed = count_maps(source, target);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(DetMapIter {
        source: source.clone(),
        target: target.clone(),
        xi: vec![1; target.num_inputs()],
        alphas: None,
        filter,
        done: false,
    })
}

/// Iterator over deterministic maps in lexicographic `(xi, alphas)` order;
/// within `alphas`, earlier target inputs are more significant.
pub struct DetMapIter {
    source: PartyCard,
    target: PartyCard,
    xi: Vec<usize>,
    alphas: Option<Vec<Vec<usize>>>,
    filter: Option<InvertibilityClass>,
    done: bool,
}

impl DetMapIter {
    fn first_alphas(&self) -> Vec<Vec<usize>> {
        self.xi
            .iter()
            .map(|&x| vec![1usize; self.source.num_outputs(x)])
            .collect()
    }

    /// Mixed-radix increment of `alphas`; false on wrap-around.
    fn advance_alphas(&mut self) -> bool {
        let alphas = self.alphas.as_mut().expect("initialized");
        for z in (0..alphas.len()).rev() {
            let ran = self.target.num_outputs(z + 1);
            let table = &mut alphas[z];
            for slot in (0..table.len()).rev() {
                if table[slot] < ran {
                    table[slot] += 1;
                    return true;
                }
                table[slot] = 1;
            }
        }
        false
    }

    /// Mixed-radix increment of `xi`; false on wrap-around.
    fn advance_xi(&mut self) -> bool {
        for z in (0..self.xi.len()).rev() {
            if self.xi[z] < self.source.num_inputs() {
                self.xi[z] += 1;
                return true;
            }
            self.xi[z] = 1;
        }
        false
    }

    fn advance(&mut self) {
        if self.advance_alphas() {
            return;
        }
        if self.advance_xi() {
            self.alphas = Some(self.first_alphas());
            return;
        }
        self.done = true;
    }
}

impl Iterator for DetMapIter {
    type Item = DetMap;

    fn next(&mut self) -> Option<DetMap> {
        loop {
            if self.done {
                return None;
            }
            if self.alphas.is_none() {
                self.alphas = Some(self.first_alphas());
            } else {
                self.advance();
                if self.done {
                    return None;
                }
            }
            let m = DetMap {
                source: self.source.clone(),
                target: self.target.clone(),
                xi: self.xi.clone(),
                alphas: self.alphas.clone().expect("initialized"),
            };
            match self.filter {
                None => return Some(m),
                Some(class) if m.classify() == class => return Some(m),
                Some(_) => continue,
            }
        }
    }
}

/// The input-flip map `Lambda^IF` on a two-input cardinality with equal
/// output counts.
pub fn input_flip(card: &PartyCard) -> DetMap {
    assert_eq!(card.num_inputs(), 2, "input flip needs two inputs");
    assert_eq!(
        card.num_outputs(1),
        card.num_outputs(2),
        "inputs must have equal outputs"
    );
    DetMap::new(
        card.clone(),
        card.clone(),
        vec![2, 1],
        vec![
            (1..=card.num_outputs(2)).collect(),
            (1..=card.num_outputs(1)).collect(),
        ],
    )
    .unwrap()
}

/// Constructs the deterministic map that sends a nonzero vector with zero
/// block sums to a nonzero multiple of the correlation basis vector
/// `C^(i|j)`: all target inputs read the first source input with a nonzero
/// block, outputs with positive coefficients go to `i`, the rest to the
/// last output of `j`. This is the constructive irreducibility witness for
/// the correlation subspace.
pub fn concentrate_correlation(
    card: &PartyCard,
    vector: &[Rational],
    i: usize,
    j: usize,
) -> Result<DetMap> {
    assert_eq!(vector.len(), card.dim(), "vector length mismatch");
    if j < 1 || j > card.num_inputs() || i < 1 || i >= card.num_outputs(j) {
        return Err(Error::IndexOutOfRange(format!(
            "C^({i}|{j}) is not a correlation direction of {card}"
        )));
    }
    let pivot = (1..=card.num_inputs()).find(|&x| {
        (1..=card.num_outputs(x)).any(|a| !vector[card.flatten(a, x).unwrap()].is_zero())
    });
    let Some(nu) = pivot else {
        return Err(Error::InvalidInput("vector is zero".into()));
    };
    let xi = vec![nu; card.num_inputs()];
    let mut alphas = Vec::with_capacity(card.num_inputs());
    for z in 1..=card.num_inputs() {
        let table: Vec<usize> = (1..=card.num_outputs(nu))
            .map(|a| {
                if z != j {
                    1
                } else if vector[card.flatten(a, nu).unwrap()] > Rational::zero() {
                    i
                } else {
                    card.num_outputs(j)
                }
            })
            .collect();
        alphas.push(table);
    }
    DetMap::new(card.clone(), card.clone(), xi, alphas)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ratlin::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn card(outputs: &[usize]) -> PartyCard {
        PartyCard::from_slice(outputs)
    }

    pub(crate) fn random_card(
        rng: &mut ChaCha8Rng,
        max_inputs: usize,
        max_outputs: usize,
    ) -> PartyCard {
        let x = rng.gen_range(1..=max_inputs);
        card(
            &(0..x)
                .map(|_| rng.gen_range(1..=max_outputs))
                .collect::<Vec<_>>(),
        )
    }

    pub(crate) fn random_map(
        rng: &mut ChaCha8Rng,
        source: &PartyCard,
        target: &PartyCard,
    ) -> DetMap {
        let xi: Vec<usize> = (0..target.num_inputs())
            .map(|_| rng.gen_range(1..=source.num_inputs()))
            .collect();
        let alphas: Vec<Vec<usize>> = xi
            .iter()
            .enumerate()
            .map(|(z0, &x)| {
                (0..source.num_outputs(x))
                    .map(|_| rng.gen_range(1..=target.num_outputs(z0 + 1)))
                    .collect()
            })
            .collect();
        DetMap::new(source.clone(), target.clone(), xi, alphas).unwrap()
    }

    #[test]
    fn identity_matrix() {
        let m = DetMap::identity(card(&[3, 2]));
        assert_eq!(m.to_matrix(), RatMatrix::identity(5));
    }

    #[test]
    fn input_flip_matrix() {
        let m = input_flip(&card(&[2, 2]));
        let expected =
            RatMatrix::from_i64_rows(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert_eq!(m.to_matrix(), expected);
        let twice = DetMap::compose(&m, &m).unwrap();
        assert_eq!(twice, DetMap::identity(card(&[2, 2])));
    }

    /// The (3,2) -> (2,2,2) block-matrix example: xi = (1,1,2),
    /// alpha_1 = (1,2,2), alpha_2 = (1,1,2), alpha_3 = (2,1).
    fn block_example_map() -> DetMap {
        DetMap::new(
            card(&[3, 2]),
            card(&[2, 2, 2]),
            vec![1, 1, 2],
            vec![vec![1, 2, 2], vec![1, 1, 2], vec![2, 1]],
        )
        .unwrap()
    }

    #[test]
    fn block_matrix_example() {
        let expected = RatMatrix::from_i64_rows(&[
            &[1, 0, 0, 0, 0],
            &[0, 1, 1, 0, 0],
            &[1, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 0, 1],
            &[0, 0, 0, 1, 0],
        ]);
        assert_eq!(block_example_map().to_matrix(), expected);
    }

    #[test]
    fn factor_pure_on_block_example() {
        let m = block_example_map();
        let (input, output) = m.factor_pure();
        // the pure input map clones source input 1
        let expected_input = RatMatrix::from_i64_rows(&[
            &[1, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[1, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 0],
            &[0, 0, 0, 0, 1],
        ]);
        assert_eq!(input.to_matrix(), expected_input);
        assert!(output.xi().iter().enumerate().all(|(z0, &x)| x == z0 + 1));
        assert_eq!(DetMap::compose(&output, &input).unwrap(), m);
    }

    #[test]
    fn composition_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = card(&[3, 2]);
        let b = card(&[2, 2, 2]);
        let c = card(&[2, 2]);
        for _ in 0..50 {
            let s = random_map(&mut rng, &a, &b);
            let t = random_map(&mut rng, &b, &c);
            let u = DetMap::compose(&t, &s).unwrap();
            assert_eq!(u.to_matrix(), t.to_matrix().mul(&s.to_matrix()));
        }
    }

    #[test]
    fn composition_is_associative_and_unital() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let a = random_card(&mut rng, 3, 3);
            let b = random_card(&mut rng, 3, 3);
            let c = random_card(&mut rng, 3, 3);
            let d = random_card(&mut rng, 3, 3);
            let f = random_map(&mut rng, &a, &b);
            let g = random_map(&mut rng, &b, &c);
            let h = random_map(&mut rng, &c, &d);
            let left = DetMap::compose(&h, &DetMap::compose(&g, &f).unwrap()).unwrap();
            let right = DetMap::compose(&DetMap::compose(&h, &g).unwrap(), &f).unwrap();
            assert_eq!(left, right);
            assert_eq!(
                DetMap::compose(&DetMap::identity(b.clone()), &f).unwrap(),
                f
            );
            assert_eq!(
                DetMap::compose(&f, &DetMap::identity(a.clone())).unwrap(),
                f
            );
        }
    }

    #[test]
    fn factor_pure_recomposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = random_card(&mut rng, 3, 3);
            let b = random_card(&mut rng, 3, 3);
            let m = random_map(&mut rng, &a, &b);
            let (input, output) = m.factor_pure();
            assert!(input
                .alphas()
                .iter()
                .all(|t| t.iter().enumerate().all(|(i, &v)| v == i + 1)));
            assert!(output.xi().iter().enumerate().all(|(z0, &x)| x == z0 + 1));
            assert_eq!(DetMap::compose(&output, &input).unwrap(), m);
        }
        let id = DetMap::identity(card(&[2, 2]));
        let (i, o) = id.factor_pure();
        assert_eq!(i, id);
        assert_eq!(o, id);
    }

    #[test]
    fn classify_examples() {
        let fine = DetMap::new(card(&[2]), card(&[3]), vec![1], vec![vec![1, 3]]).unwrap();
        assert_eq!(fine.classify(), InvertibilityClass::LeftInvertible);
        let coarse = DetMap::new(card(&[3]), card(&[2]), vec![1], vec![vec![1, 2, 2]]).unwrap();
        assert_eq!(coarse.classify(), InvertibilityClass::RightInvertible);
        let flip = input_flip(&card(&[2, 2]));
        assert_eq!(flip.classify(), InvertibilityClass::Relabeling);
        let reorder = DetMap::new(
            card(&[3, 2]),
            card(&[2, 3]),
            vec![2, 1],
            vec![vec![1, 2], vec![1, 2, 3]],
        )
        .unwrap();
        assert_eq!(reorder.classify(), InvertibilityClass::Reordering);
        let lossy = DetMap::new(card(&[2, 2]), card(&[2]), vec![1], vec![vec![1, 1]]).unwrap();
        assert_eq!(lossy.classify(), InvertibilityClass::Neither);
    }

    #[test]
    fn census_2222_to_333() {
        let src = card(&[2, 2]);
        let tgt = card(&[3, 3, 3]);
        assert_eq!(count_maps(&src, &tgt), 5832);
        let all: Vec<DetMap> = enumerate(&src, &tgt, None, None).unwrap().collect();
        assert_eq!(all.len(), 5832);
        let left = all.iter().filter(|m| m.has_left_inverse()).count();
        assert_eq!(left, 2592);
    }

    #[test]
    fn enumeration_matches_nested_loop_oracle() {
        // (2,2) -> (2,2): independent nested-loop construction of all maps
        let c = card(&[2, 2]);
        let mut oracle = Vec::new();
        for x1 in 1..=2usize {
            for x2 in 1..=2usize {
                for a11 in 1..=2usize {
                    for a12 in 1..=2usize {
                        for a21 in 1..=2usize {
                            for a22 in 1..=2usize {
                                oracle.push(
                                    DetMap::new(
                                        c.clone(),
                                        c.clone(),
                                        vec![x1, x2],
                                        vec![vec![a11, a12], vec![a21, a22]],
                                    )
                                    .unwrap(),
                                );
                            }
                        }
                    }
                }
            }
        }
        oracle.sort();
        let mut enumerated: Vec<DetMap> = enumerate(&c, &c, None, None).unwrap().collect();
        assert_eq!(enumerated.len(), 64);
        // enumeration is already lexicographic and duplicate-free
        let mut sorted = enumerated.clone();
        sorted.sort();
        assert_eq!(sorted, enumerated);
        enumerated.dedup();
        assert_eq!(enumerated.len(), 64);
        assert_eq!(sorted, oracle);
    }

    #[test]
    fn enumeration_degenerate() {
        let c = card(&[1]);
        let all: Vec<DetMap> = enumerate(&c, &c, None, None).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], DetMap::identity(c));
    }

    #[test]
    fn enumeration_cap_refusal() {
        let src = card(&[4, 4, 4]);
        let tgt = card(&[4, 4, 4, 4]);
        assert!(matches!(
            enumerate(&src, &tgt, None, Some(1000)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn left_inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut found = 0;
        while found < 30 {
            let a = random_card(&mut rng, 3, 3);
            let b = random_card(&mut rng, 3, 4);
            let m = random_map(&mut rng, &a, &b);
            if !m.has_left_inverse() {
                continue;
            }
            found += 1;
            let inv = m.find_left_inverse().unwrap();
            assert_eq!(
                DetMap::compose(&inv, &m).unwrap(),
                DetMap::identity(a.clone())
            );
            assert_eq!(
                inv.to_matrix().mul(&m.to_matrix()),
                RatMatrix::identity(a.dim())
            );
        }
    }

    #[test]
    fn right_inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut found = 0;
        while found < 30 {
            let a = random_card(&mut rng, 3, 4);
            let b = random_card(&mut rng, 3, 3);
            let m = random_map(&mut rng, &a, &b);
            if !m.has_right_inverse() {
                continue;
            }
            found += 1;
            let inv = m.find_right_inverse().unwrap();
            assert_eq!(
                DetMap::compose(&m, &inv).unwrap(),
                DetMap::identity(b.clone())
            );
        }
    }

    #[test]
    fn relabeling_has_unique_inverse() {
        let flip = input_flip(&card(&[2, 2]));
        let left = flip.find_left_inverse().unwrap();
        let right = flip.find_right_inverse().unwrap();
        assert_eq!(left, right);
        assert_eq!(left, flip); // the flip is an involution
    }

    #[test]
    fn fine_coarse_inverse_pair() {
        // Lambda_C fine-grains outputs (2,2) -> (3,2); Lambda_E coarse
        // grains back, and Lambda_E . Lambda_C = identity.
        let lambda_c = DetMap::new(
            card(&[2, 2]),
            card(&[3, 2]),
            vec![1, 2],
            vec![vec![1, 2], vec![1, 2]],
        )
        .unwrap();
        let lambda_e = DetMap::new(
            card(&[3, 2]),
            card(&[2, 2]),
            vec![1, 2],
            vec![vec![1, 2, 2], vec![1, 2]],
        )
        .unwrap();
        let expected_c = RatMatrix::from_i64_rows(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
        ]);
        let expected_e = RatMatrix::from_i64_rows(&[
            &[1, 0, 0, 0, 0],
            &[0, 1, 1, 0, 0],
            &[0, 0, 0, 1, 0],
            &[0, 0, 0, 0, 1],
        ]);
        assert_eq!(lambda_c.to_matrix(), expected_c);
        assert_eq!(lambda_e.to_matrix(), expected_e);
        assert_eq!(
            DetMap::compose(&lambda_e, &lambda_c).unwrap(),
            DetMap::identity(card(&[2, 2]))
        );
    }

    #[test]
    fn classify_agrees_with_exhaustive_inverse_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let a = random_card(&mut rng, 2, 3);
            let b = random_card(&mut rng, 2, 3);
            let m = random_map(&mut rng, &a, &b);
            let left_oracle = enumerate(&b, &a, None, None)
                .unwrap()
                .any(|g| DetMap::compose(&g, &m).unwrap() == DetMap::identity(a.clone()));
            let right_oracle = enumerate(&b, &a, None, None)
                .unwrap()
                .any(|g| DetMap::compose(&m, &g).unwrap() == DetMap::identity(b.clone()));
            assert_eq!(m.has_left_inverse(), left_oracle, "left: {m:?}");
            assert_eq!(m.has_right_inverse(), right_oracle, "right: {m:?}");
        }
    }

    #[test]
    fn maps_send_deterministic_blocks_to_deterministic_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let a = random_card(&mut rng, 3, 3);
            let b = random_card(&mut rng, 3, 3);
            let m = random_map(&mut rng, &a, &b).to_matrix();
            let mut v = vec![Rational::zero(); a.dim()];
            for x in 1..=a.num_inputs() {
                let out = rng.gen_range(1..=a.num_outputs(x));
                v[a.flatten(out, x).unwrap()] = Rational::one();
            }
            let img = m.mul_vec(&v);
            for z in 1..=b.num_inputs() {
                let block: Vec<_> = (1..=b.num_outputs(z))
                    .map(|c| img[b.flatten(c, z).unwrap()].clone())
                    .collect();
                assert_eq!(block.iter().filter(|v| v.is_one()).count(), 1);
                assert!(block.iter().all(|v| v.is_one() || v.is_zero()));
            }
        }
    }

    #[test]
    fn concentrate_correlation_hits_basis_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cards = [card(&[3, 2]), card(&[2, 2]), card(&[4, 3, 2])];
        for c in &cards {
            for _ in 0..20 {
                // random vector with zero block sums
                let mut v = vec![Rational::zero(); c.dim()];
                for x in 1..=c.num_inputs() {
                    let a_x = c.num_outputs(x);
                    if a_x == 1 {
                        continue;
                    }
                    let mut sum = Rational::zero();
                    for a in 1..a_x {
                        let val = rat(rng.gen_range(-3i64..=3), 1);
                        sum += &val;
                        v[c.flatten(a, x).unwrap()] = val;
                    }
                    v[c.flatten(a_x, x).unwrap()] = -sum;
                }
                if v.iter().all(Rational::is_zero) {
                    continue;
                }
                let j = (1..=c.num_inputs())
                    .find(|&x| c.num_outputs(x) > 1)
                    .unwrap();
                let i = 1usize;
                let map = concentrate_correlation(c, &v, i, j).unwrap();
                let img = map.to_matrix().mul_vec(&v);
                // expected: nonzero multiple of C^(i|j) = (e_i - e_last)/A_j
                let a_j = c.num_outputs(j);
                let mut basis = vec![Rational::zero(); c.dim()];
                basis[c.flatten(i, j).unwrap()] = rat(1, a_j as i64);
                basis[c.flatten(a_j, j).unwrap()] = rat(-1, a_j as i64);
                let w_slot = c.flatten(i, j).unwrap();
                let w = &img[w_slot] / &basis[w_slot];
                assert!(!w.is_zero(), "witness must be a nonzero multiple");
                let scaled: Vec<Rational> = basis.iter().map(|b| b * &w).collect();
                assert_eq!(img, scaled);
            }
        }
    }
}
