//! Liftings of behaviors and expressions, payoff maximization and
//! censuses.
//!
//! A left-invertible deterministic map applied to one party produces an
//! equivalent behavior in a larger scenario; a right-invertible one pulls
//! a Bell expression into a larger scenario without changing what it
//! tests. The common currency for "equivalent" is the maximal average
//! payoff: the best value of an expression over all deterministic local
//! postprocessings of a behavior.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::corr::{Behavior, BellExpression};
use crate::detmap::{count_maps, enumerate, DetMap};
use crate::ratlin::{RatVector, Rational};
use crate::scenario::PartyCard;
use crate::stochmap::{apply_to_behavior, apply_to_expression, LocalTransformation, PartyMap};
use crate::{Error, Result};

/// Result of a maximal-average-payoff search: the exact optimum and the
/// lexicographically least optimizer tuple.
#[derive(Clone, Debug)]
pub struct PayoffResult {
    pub value: Rational,
    pub maps: Vec<DetMap>,
}

/// Default cap on the product of per-party deterministic map counts.
pub const DEFAULT_PAYOFF_CAP: u128 = 10_000_000;

/// Maximal average payoff of `p` under `phi`: exhaustive maximization of
/// `phi((L_1 x ... x L_n) p)` over per-party deterministic maps from `p`'s
/// cardinalities into `phi`'s. Refuses when the search space exceeds the
/// cap.
pub fn max_payoff(phi: &BellExpression, p: &Behavior, cap: Option<u128>) -> Result<PayoffResult> {
    let cap = cap.unwrap_or(DEFAULT_PAYOFF_CAP);
    let s_phi = phi.scenario();
    let s_p = p.scenario();
    if s_phi.num_parties() != s_p.num_parties() {
        return Err(Error::ScenarioMismatch(
            "payoff needs the same number of parties on both sides".into(),
        ));
    }
    let n = s_p.num_parties();
    let mut total: u128 = 1;
    for k in 0..n {
        total = total.saturating_mul(count_maps(s_p.party(k), s_phi.party(k)));
    }
    if total > cap {
        return Err(Error::CapExceeded { needed: total, cap });
    }

    let per_party: Vec<Vec<DetMap>> = (0..n)
        .map(|k| {
            enumerate(s_p.party(k), s_phi.party(k), None, Some(cap))
                .map(|it| it.collect::<Vec<_>>())
        })
        .collect::<Result<_>>()?;

    // parallelize over the first party's maps; reduce in index order to
    // keep the lexicographically least optimizer deterministic
    let candidates: Vec<(Rational, Vec<usize>)> = per_party[0]
        .par_iter()
        .enumerate()
        .map(|(i0, first)| {
            let mut best: Option<(Rational, Vec<usize>)> = None;
            let mut indices = vec![0usize; n];
            indices[0] = i0;
            loop {
                let parts: Vec<PartyMap> = indices
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| {
                        let m = if k == 0 { first } else { &per_party[k][i] };
                        PartyMap::Map(LocalTransformation::from_detmap(m))
                    })
                    .collect();
                let image = apply_to_behavior(&parts, p).expect("cardinalities match");
                let value = phi.evaluate(&image).expect("scenario matches");
                let better = match &best {
                    None => true,
                    Some((v, _)) => value > *v,
                };
                if better {
                    best = Some((value, indices.clone()));
                }
                // advance indices 1..n in mixed radix
                let mut k = n;
                loop {
                    if k == 1 {
                        break;
                    }
                    k -= 1;
                    indices[k] += 1;
                    if indices[k] < per_party[k].len() {
                        break;
                    }
                    indices[k] = 0;
                }
                if n == 1 || indices[1..].iter().all(|&i| i == 0) {
                    break;
                }
            }
            best.expect("at least one map tuple")
        })
        .collect();

    let mut best: Option<(Rational, Vec<usize>)> = None;
    for cand in candidates {
        let better = match &best {
            None => true,
            Some((v, idx)) => cand.0 > *v || (cand.0 == *v && cand.1 < *idx),
        };
        if better {
            best = Some(cand);
        }
    }
    let (value, indices) = best.expect("nonempty search space");
    let maps = indices
        .iter()
        .enumerate()
        .map(|(k, &i)| per_party[k][i].clone())
        .collect();
    Ok(PayoffResult { value, maps })
}

/// Lifts a behavior on one party through a left-invertible deterministic
/// map (relabelings and reorderings included); the original is recovered
/// exactly through any left inverse.
pub fn lift_behavior(p: &Behavior, party: usize, m: &DetMap) -> Result<Behavior> {
    if !m.has_left_inverse() {
        return Err(Error::NotInvertible { side: "left" });
    }
    let mut parts = vec![PartyMap::Identity; p.scenario().num_parties()];
    parts[party] = PartyMap::Map(LocalTransformation::from_detmap(m));
    apply_to_behavior(&parts, p)
}

/// Lifts a K-inequality on one party through a right-invertible map; the
/// bound is unchanged and the original is recovered through any right
/// inverse.
pub fn lift_expression(phi: &BellExpression, party: usize, m: &DetMap) -> Result<BellExpression> {
    if !m.has_right_inverse() {
        return Err(Error::NotInvertible { side: "right" });
    }
    let mut parts = vec![PartyMap::Identity; phi.scenario().num_parties()];
    parts[party] = PartyMap::Map(LocalTransformation::from_detmap(m));
    apply_to_expression(phi, &parts)
}

/// Census of the liftings of one behavior on one party into a target
/// cardinality.
#[derive(Clone, Debug)]
pub struct LiftCensus {
    pub total_maps: u64,
    pub invertible_count: u64,
    pub unique_images: u64,
    pub images: Vec<Behavior>,
}

/// Enumerates all deterministic maps from `p`'s party cardinality into
/// `target`, applies the left-invertible ones and deduplicates the images
/// exactly. Image order is the lexicographic order of their coefficient
/// vectors.
pub fn census_lift(
    p: &Behavior,
    party: usize,
    target: &PartyCard,
    cap: Option<u128>,
) -> Result<LiftCensus> {
    let source = p.scenario().party(party);
    let mut total = 0u64;
    let mut invertible = Vec::new();
    for m in enumerate(source, target, None, cap)? {
        total += 1;
        if m.has_left_inverse() {
            invertible.push(m);
        }
    }
    let images: Vec<RatVector> = invertible
        .par_iter()
        .map(|m| {
            let mut parts = vec![PartyMap::Identity; p.scenario().num_parties()];
            parts[party] = PartyMap::Map(LocalTransformation::from_detmap(m));
            apply_to_behavior(&parts, p)
                .expect("cardinalities match")
                .into_coeffs()
        })
        .collect();
    let unique: BTreeSet<RatVector> = images.into_iter().collect();
    let out_scenario = p.scenario().with_party(party, target.clone());
    let images: Vec<Behavior> = unique
        .into_iter()
        .map(|coeffs| Behavior::new(out_scenario.clone(), coeffs).expect("dimension matches"))
        .collect();
    Ok(LiftCensus {
        total_maps: total,
        invertible_count: invertible.len() as u64,
        unique_images: images.len() as u64,
        images,
    })
}

/// Census of PR-box liftings into a target cardinality for Alice.
pub fn census_lift_pr(target: &PartyCard, cap: Option<u128>) -> Result<LiftCensus> {
    census_lift(&crate::corr::pr_box(), 0, target, cap)
}

/// Witnesses of interconvertibility: maps taking `p1` to `p2` and back.
#[derive(Clone, Debug)]
pub struct Interconversion {
    pub forward: Vec<DetMap>,
    pub backward: Vec<DetMap>,
}

/// Exhaustive two-directional search for deterministic per-party maps
/// converting each behavior into the other; the lexicographically first
/// witness is returned for each direction.
pub fn interconvertible(
    p1: &Behavior,
    p2: &Behavior,
    cap: Option<u128>,
) -> Result<Option<Interconversion>> {
    let Some(forward) = convert_search(p1, p2, cap)? else {
        return Ok(None);
    };
    let Some(backward) = convert_search(p2, p1, cap)? else {
        return Ok(None);
    };
    Ok(Some(Interconversion { forward, backward }))
}

fn convert_search(
    from: &Behavior,
    to: &Behavior,
    cap: Option<u128>,
) -> Result<Option<Vec<DetMap>>> {
    let cap = cap.unwrap_or(DEFAULT_PAYOFF_CAP);
    let s_from = from.scenario();
    let s_to = to.scenario();
    if s_from.num_parties() != s_to.num_parties() {
        return Err(Error::ScenarioMismatch(
            "interconvertibility needs the same number of parties".into(),
        ));
    }
    let n = s_from.num_parties();
    let mut total: u128 = 1;
    for k in 0..n {
        total = total.saturating_mul(count_maps(s_from.party(k), s_to.party(k)));
    }
    if total > cap {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    let per_party: Vec<Vec<DetMap>> = (0..n)
        .map(|k| {
            enumerate(s_from.party(k), s_to.party(k), None, Some(cap))
                .map(|it| it.collect::<Vec<_>>())
        })
        .collect::<Result<_>>()?;
    let mut indices = vec![0usize; n];
    loop {
        let parts: Vec<PartyMap> = indices
            .iter()
            .enumerate()
            .map(|(k, &i)| PartyMap::Map(LocalTransformation::from_detmap(&per_party[k][i])))
            .collect();
        let image = apply_to_behavior(&parts, from).expect("cardinalities match");
        if image.coeffs() == to.coeffs() {
            let maps = indices
                .iter()
                .enumerate()
                .map(|(k, &i)| per_party[k][i].clone())
                .collect();
            return Ok(Some(maps));
        }
        // mixed-radix advance
        let mut k = n;
        let mut done = true;
        while k > 0 {
            k -= 1;
            indices[k] += 1;
            if indices[k] < per_party[k].len() {
                done = false;
                break;
            }
            indices[k] = 0;
        }
        if done {
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::{chsh, pr_box, uniform_behavior};
    use crate::detmap::input_flip;
    use crate::ratlin::{rat, rat_int};
    use crate::scenario::{chsh_scenario, Scenario};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn card(outputs: &[usize]) -> PartyCard {
        PartyCard::from_slice(outputs)
    }

    #[test]
    fn chsh_payoff_of_pr_is_four() {
        let result = max_payoff(&chsh(), &pr_box(), None).unwrap();
        assert_eq!(result.value, rat_int(4));
        // the recorded optimizers reproduce the value
        let parts: Vec<PartyMap> = result
            .maps
            .iter()
            .map(|m| PartyMap::Map(LocalTransformation::from_detmap(m)))
            .collect();
        let image = apply_to_behavior(&parts, &pr_box()).unwrap();
        assert_eq!(chsh().evaluate(&image).unwrap(), rat_int(4));
    }

    #[test]
    fn chsh_payoff_of_deterministic_box_is_two() {
        let s = chsh_scenario();
        let spec = crate::corr::DetBehaviorSpec {
            responses: vec![vec![1, 1], vec![1, 1]],
        };
        let det = crate::corr::deterministic_behavior(&s, &spec).unwrap();
        let result = max_payoff(&chsh(), &det, None).unwrap();
        assert_eq!(result.value, rat_int(2));
    }

    #[test]
    fn chsh_payoff_of_uniform_box_is_two() {
        let result = max_payoff(&chsh(), &uniform_behavior(&chsh_scenario()), None).unwrap();
        assert_eq!(result.value, rat_int(2));
    }

    #[test]
    fn payoff_cap_refusal() {
        let err = max_payoff(&chsh(), &pr_box(), Some(10)).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn identity_lift_keeps_behavior() {
        let pr = pr_box();
        let id = DetMap::identity(card(&[2, 2]));
        assert_eq!(lift_behavior(&pr, 0, &id).unwrap(), pr);
        let phi = chsh();
        assert_eq!(lift_expression(&phi, 0, &id).unwrap(), phi);
    }

    #[test]
    fn lift_round_trip_on_random_ns_behaviors() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let s = chsh_scenario();
        let boxes = crate::corr::enumerate_deterministic(&s);
        let mut found = 0;
        while found < 20 {
            let a = card(&[2, 2]);
            let b = crate::detmap::tests::random_card(&mut rng, 3, 3);
            let m = crate::detmap::tests::random_map(&mut rng, &a, &b);
            if !m.has_left_inverse() {
                continue;
            }
            found += 1;
            // random nonsignaling behavior: mixture of deterministic boxes
            let i = rng.gen_range(0..boxes.len());
            let j = rng.gen_range(0..boxes.len());
            let lam = rat(rng.gen_range(0i64..=4), 4);
            let coeffs: RatVector = boxes[i]
                .coeffs()
                .iter()
                .zip(boxes[j].coeffs())
                .map(|(x, y)| &lam * x + (rat_int(1) - &lam) * y)
                .collect();
            let p = Behavior::new(s.clone(), coeffs).unwrap();
            let lifted = lift_behavior(&p, 0, &m).unwrap();
            let inv = m.find_left_inverse().unwrap();
            let back = apply_to_behavior(
                &[
                    PartyMap::Map(LocalTransformation::from_detmap(&inv)),
                    PartyMap::Identity,
                ],
                &lifted,
            )
            .unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn pr_census_into_333() {
        let census = census_lift_pr(&card(&[3, 3, 3]), None).unwrap();
        assert_eq!(census.total_maps, 5832);
        assert_eq!(census.invertible_count, 2592);
        assert_eq!(census.unique_images, 1944);
        for p in census.images.iter().take(20) {
            assert!(p.is_nonnegative());
            assert!(p.is_normalized());
            assert!(p.check_nonsignaling(true).unwrap().is_empty());
        }
    }

    #[test]
    fn pr_census_square_matches_relabeling_orbit() {
        // (2,2) -> (2,2): the left-invertible square maps are the 8
        // relabelings (2 input permutations x 2 output permutations per
        // input), giving the free 8-element PR orbit; every image keeps
        // CHSH payoff 4
        let census = census_lift_pr(&card(&[2, 2]), None).unwrap();
        assert_eq!(census.total_maps, 64);
        // cross-check the count by exhaustive inverse search
        let c = card(&[2, 2]);
        let oracle = enumerate(&c, &c, None, None)
            .unwrap()
            .filter(|m| {
                enumerate(&c, &c, None, None)
                    .unwrap()
                    .any(|g| DetMap::compose(&g, m).unwrap() == DetMap::identity(c.clone()))
            })
            .count() as u64;
        assert_eq!(oracle, 8);
        assert_eq!(census.invertible_count, oracle);
        assert_eq!(census.unique_images, 8);
        for image in &census.images {
            let payoff = max_payoff(&chsh(), image, None).unwrap();
            assert_eq!(payoff.value, rat_int(4));
        }
    }

    #[test]
    fn pr_census_into_222_matches_oracle() {
        // independent brute force over all maps into (2,2,2)
        let target = card(&[2, 2, 2]);
        let census = census_lift_pr(&target, None).unwrap();
        let source = card(&[2, 2]);
        let mut total = 0u64;
        let mut invertible = 0u64;
        let mut images: BTreeSet<RatVector> = BTreeSet::new();
        let pr = pr_box();
        for m in enumerate(&source, &target, None, None).unwrap() {
            total += 1;
            // oracle invertibility: search inverses exhaustively
            let has_inverse = enumerate(&target, &source, None, None)
                .unwrap()
                .any(|g| DetMap::compose(&g, &m).unwrap() == DetMap::identity(source.clone()));
            if has_inverse {
                invertible += 1;
                let lifted = lift_behavior(&pr, 0, &m).unwrap();
                images.insert(lifted.coeffs().to_vec());
            }
        }
        assert_eq!(census.total_maps, total);
        assert_eq!(census.invertible_count, invertible);
        assert_eq!(census.unique_images, images.len() as u64);
    }

    #[test]
    fn payoff_monotone_under_transformation() {
        // payoff of a transformed behavior never exceeds the original
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let s = chsh_scenario();
        let boxes = crate::corr::enumerate_deterministic(&s);
        for _ in 0..10 {
            let i = rng.gen_range(0..boxes.len());
            let lam = rat(rng.gen_range(0i64..=4), 4);
            let coeffs: RatVector = boxes[i]
                .coeffs()
                .iter()
                .zip(pr_box().coeffs())
                .map(|(x, y)| &lam * x + (rat_int(1) - &lam) * y)
                .collect();
            let p = Behavior::new(s.clone(), coeffs).unwrap();
            let m = crate::detmap::tests::random_map(&mut rng, &card(&[2, 2]), &card(&[2, 2]));
            let transformed = apply_to_behavior(
                &[
                    PartyMap::Map(LocalTransformation::from_detmap(&m)),
                    PartyMap::Identity,
                ],
                &p,
            )
            .unwrap();
            let before = max_payoff(&chsh(), &p, None).unwrap().value;
            let after = max_payoff(&chsh(), &transformed, None).unwrap().value;
            assert!(after <= before);
        }
    }

    #[test]
    fn lifted_expression_keeps_payoff() {
        // interconvertible expressions are equivalent: same payoff on any
        // behavior
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let phi = chsh();
        // Bob's expression slot gains an output via a right-invertible map
        let m = DetMap::new(
            card(&[3, 3]),
            card(&[2, 2]),
            vec![1, 2],
            vec![vec![1, 2, 2], vec![1, 1, 2]],
        )
        .unwrap();
        let lifted = lift_expression(&phi, 1, &m).unwrap();
        assert_eq!(lifted.bound(), phi.bound());
        let s = chsh_scenario();
        let boxes = crate::corr::enumerate_deterministic(&s);
        for _ in 0..5 {
            let i = rng.gen_range(0..boxes.len());
            let lam = rat(rng.gen_range(0i64..=4), 4);
            let coeffs: RatVector = boxes[i]
                .coeffs()
                .iter()
                .zip(pr_box().coeffs())
                .map(|(x, y)| &lam * x + (rat_int(1) - &lam) * y)
                .collect();
            let p = Behavior::new(s.clone(), coeffs).unwrap();
            let v1 = max_payoff(&phi, &p, None).unwrap().value;
            let v2 = max_payoff(&lifted, &p, None).unwrap().value;
            assert_eq!(v1, v2);
        }
    }

    #[test]
    fn gyni_lift_via_paper_map_matches_clauses() {
        let phi = crate::corr::gyni();
        let m = DetMap::new(
            card(&[3, 3]),
            card(&[2, 2]),
            vec![1, 2],
            vec![vec![1, 2, 2], vec![1, 2, 2]],
        )
        .unwrap();
        let lifted = lift_expression(&phi, 1, &m).unwrap();
        let s = lifted.scenario();
        // phi'(a,b,x,y) = 1 for (a=y and b=x) or (a=y and x=2 and b=3)
        for x in 1..=2usize {
            for a in 1..=2usize {
                for y in 1..=2usize {
                    for b in 1..=3usize {
                        let expected = usize::from(a == y && (b == x || (x == 2 && b == 3)));
                        let idx = s.tensor_index(&[(a, x), (b, y)]).unwrap();
                        assert_eq!(lifted.coeffs()[idx], rat_int(expected as i64));
                    }
                }
            }
        }
        // pull back through the right inverse recovers GYNI
        let inv = m.find_right_inverse().unwrap();
        let back = apply_to_expression(
            &lifted,
            &[
                PartyMap::Identity,
                PartyMap::Map(LocalTransformation::from_detmap(&inv)),
            ],
        )
        .unwrap();
        assert_eq!(back.coeffs(), phi.coeffs());
    }

    #[test]
    fn interconvertibility_examples() {
        // relabeled PR is interconvertible with PR
        let pr = pr_box();
        let flip = input_flip(&card(&[2, 2]));
        let relabeled = lift_behavior(&pr, 0, &flip).unwrap();
        let witness = interconvertible(&pr, &relabeled, None).unwrap();
        assert!(witness.is_some());

        // PR is interconvertible with a lifted PR in a larger scenario
        let m = DetMap::new(
            card(&[2, 2]),
            card(&[2, 2, 2]),
            vec![1, 1, 2],
            vec![vec![1, 2], vec![1, 2], vec![1, 2]],
        )
        .unwrap();
        assert!(m.has_left_inverse());
        let lifted = lift_behavior(&pr, 0, &m).unwrap();
        let witness = interconvertible(&pr, &lifted, None).unwrap();
        assert!(witness.is_some());

        // PR is not interconvertible with a deterministic box
        let s = chsh_scenario();
        let spec = crate::corr::DetBehaviorSpec {
            responses: vec![vec![1, 1], vec![1, 1]],
        };
        let det = crate::corr::deterministic_behavior(&s, &spec).unwrap();
        assert!(interconvertible(&pr, &det, None).unwrap().is_none());
    }

    #[test]
    fn payoff_value_attained_by_recorded_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let s = chsh_scenario();
        for _ in 0..5 {
            let coeffs: RatVector = (0..16)
                .map(|_| rat(rng.gen_range(-2i64..=2), rng.gen_range(1..=2)))
                .collect();
            let phi = BellExpression::new(s.clone(), coeffs, None).unwrap();
            let result = max_payoff(&phi, &pr_box(), None).unwrap();
            let parts: Vec<PartyMap> = result
                .maps
                .iter()
                .map(|m| PartyMap::Map(LocalTransformation::from_detmap(m)))
                .collect();
            let image = apply_to_behavior(&parts, &pr_box()).unwrap();
            assert_eq!(phi.evaluate(&image).unwrap(), result.value);
        }
    }

    #[test]
    fn payoff_works_across_cardinalities() {
        // evaluating CHSH on a behavior with ternary outputs
        let s3 = Scenario::nonsignaling(vec![card(&[3, 3]), card(&[2, 2])]);
        let u = uniform_behavior(&s3);
        let result = max_payoff(&chsh(), &u, None).unwrap();
        assert_eq!(result.value, rat_int(2));
    }
}
