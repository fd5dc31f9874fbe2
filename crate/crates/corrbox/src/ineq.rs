//! Affine equivalence and canonicalization of Bell-like expressions, and
//! variance-optimal estimators.
//!
//! Normalized behaviors of a scenario satisfy `tau . P = 1` and
//! `mu_i . P = 0` for a basis `{mu_i}` of the forbidden dual components.
//! Two K-inequalities are affine equivalent when they define the same
//! halfspace on that affine subspace, i.e. differ by a positive scale, a
//! `tau` shift absorbed into the bound, and `mu` terms. Canonical
//! representatives are obtained by projecting those directions away and
//! fixing the scale.
//!
//! The same `mu` directions parametrize all estimators of a Bell value
//! from finite statistics; the variance-optimal representative solves an
//! exact normal equation in those directions.

use num_traits::{One, Signed, Zero};

use crate::corr::BellExpression;
use crate::ratlin::{
    dot, kernel_basis, kron_vec, primitive_integer_form, pseudo_inverse, solve, RatMatrix,
    RatVector, Rational,
};
use crate::scenario::Scenario;
use crate::subspaces::{
    all_labels, classify_component, party_basis, party_dual_basis, projectors, SubspaceKind,
};
use crate::{Error, Result};

/// Constraint forms and projectors of one scenario, assembled once.
pub struct ScenarioForms {
    scenario: Scenario,
    /// `tau = tau_A x tau_B x ...`: value 1 on normalized behaviors.
    pub tau: RatVector,
    /// Basis of the forbidden dual components: value 0 on all behaviors of
    /// the scenario.
    pub mu: Vec<RatVector>,
    /// Projector onto the all-Z component.
    pub pi_z: RatMatrix,
    /// Projector onto the allowed correlation components (everything
    /// normalized behaviors can carry beyond the all-Z part).
    pub pi_gamma: RatMatrix,
    /// Projector onto the forbidden components.
    pub pi_omega: RatMatrix,
    /// The product of per-party uniform behaviors.
    pub uniform: RatVector,
}

/// Assembles `tau`, the `mu` basis and the Z/Gamma/Omega projectors of a
/// scenario.
pub fn constraint_forms(scenario: &Scenario) -> ScenarioForms {
    let n = scenario.num_parties();
    let bases: Vec<_> = scenario.parties().iter().map(party_basis).collect();
    let duals: Vec<_> = scenario.parties().iter().map(party_dual_basis).collect();
    let projs: Vec<_> = scenario.parties().iter().map(projectors).collect();

    let mut tau = vec![Rational::one()];
    let mut uniform = vec![Rational::one()];
    for k in 0..n {
        tau = kron_vec(&tau, &duals[k].traceout);
        uniform = kron_vec(&uniform, &bases[k].uniform);
    }

    let d = scenario.dim();
    let mut pi_z = RatMatrix::identity(1);
    for (z, _, _) in &projs {
        pi_z = pi_z.kron(z);
    }
    let mut pi_gamma = RatMatrix::zeros(d, d);
    let mut pi_omega = RatMatrix::zeros(d, d);
    let mut mu = Vec::new();

    for label in all_labels(n) {
        if label.iter().all(|&k| k == SubspaceKind::Z) {
            continue;
        }
        let class = classify_component(scenario, &label);
        let mut pi = RatMatrix::identity(1);
        for (k, kind) in label.iter().enumerate() {
            let (z, c, s) = &projs[k];
            pi = pi.kron(match kind {
                SubspaceKind::Z => z,
                SubspaceKind::C => c,
                SubspaceKind::S => s,
            });
        }
        if class.is_forbidden() {
            pi_omega = pi_omega.add(&pi);
            // dual basis of the component: tensor the per-party forms
            let mut forms: Vec<RatVector> = vec![vec![Rational::one()]];
            for (k, kind) in label.iter().enumerate() {
                let party_forms: Vec<&RatVector> = match kind {
                    SubspaceKind::Z => vec![&duals[k].traceout],
                    SubspaceKind::S => duals[k].omegas.iter().collect(),
                    SubspaceKind::C => duals[k].correlators.iter().collect(),
                };
                let mut next = Vec::new();
                for prefix in &forms {
                    for f in &party_forms {
                        next.push(kron_vec(prefix, f));
                    }
                }
                forms = next;
            }
            mu.extend(forms);
        } else {
            pi_gamma = pi_gamma.add(&pi);
        }
    }

    ScenarioForms {
        scenario: scenario.clone(),
        tau,
        mu,
        pi_z,
        pi_gamma,
        pi_omega,
        uniform,
    }
}

impl ScenarioForms {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// `1 - Pi_Omega = Pi_Z + Pi_Gamma`.
    pub fn pi_omega_bar(&self) -> RatMatrix {
        RatMatrix::identity(self.scenario.dim()).sub(&self.pi_omega)
    }
}

/// Exact certificate that `phi2 = s (phi1 + t tau + sum_i w_i mu_i)` with
/// `u2 = s (u1 + t)` and `s > 0`.
#[derive(Clone, Debug)]
pub struct EquivalenceCertificate {
    pub s: Rational,
    pub t: Rational,
    pub w: Vec<Rational>,
}

/// Decides affine equivalence of two K-inequalities over the same
/// scenario; both must carry bounds.
pub fn affine_equivalent(
    phi1: &BellExpression,
    phi2: &BellExpression,
) -> Result<Option<EquivalenceCertificate>> {
    if phi1.scenario() != phi2.scenario() {
        return Err(Error::ScenarioMismatch(
            "affine equivalence is defined within one scenario".into(),
        ));
    }
    let (Some(u1), Some(u2)) = (phi1.bound(), phi2.bound()) else {
        return Err(Error::InvalidInput(
            "affine equivalence needs K-inequality bounds".into(),
        ));
    };
    let forms = constraint_forms(phi1.scenario());
    // unknowns: s, p = s*t, q_i = s*w_i; rows: d coefficients + the bound
    let d = phi1.scenario().dim();
    let cols = 2 + forms.mu.len();
    let mut m = RatMatrix::zeros(d + 1, cols);
    for r in 0..d {
        m.set(r, 0, phi1.coeffs()[r].clone());
        m.set(r, 1, forms.tau[r].clone());
        for (i, mu) in forms.mu.iter().enumerate() {
            m.set(r, 2 + i, mu[r].clone());
        }
    }
    m.set(d, 0, u1.clone());
    m.set(d, 1, Rational::one());
    let mut rhs: RatVector = phi2.coeffs().to_vec();
    rhs.push(u2.clone());

    let Some(mut x) = solve(&m, &rhs) else {
        return Ok(None);
    };
    if !x[0].is_positive() {
        // look for kernel freedom in the s coordinate
        let mut adjusted = false;
        for k in kernel_basis(&m) {
            if !k[0].is_zero() {
                let lambda = (Rational::one() - &x[0]) / &k[0];
                for (xi, ki) in x.iter_mut().zip(&k) {
                    *xi += &lambda * ki;
                }
                adjusted = true;
                break;
            }
        }
        if !adjusted || !x[0].is_positive() {
            return Ok(None);
        }
    }
    let s = x[0].clone();
    let t = &x[1] / &s;
    let w = x[2..].iter().map(|q| q / &s).collect();
    Ok(Some(EquivalenceCertificate { s, t, w }))
}

/// Which projection defines the canonical representative.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CanonMode {
    /// `phi' = phi Pi_Gamma`, `u' = u - phi . (uniform x uniform ...)`.
    GammaProjected,
    /// `phi' = phi (Pi_Z + Pi_Gamma) - u tau`, `u' = 0`.
    ZeroBound,
}

/// How the remaining positive scale is fixed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ScaleConvention {
    /// Relatively prime integer coefficients (exact for rational data).
    PrimitiveIntegers,
    /// Unit 1-norm.
    OneNorm,
}

/// A canonical representative of an affine equivalence class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CanonicalForm {
    pub mode: CanonMode,
    pub scale: ScaleConvention,
    pub coeffs: RatVector,
    pub bound: Rational,
}

/// Canonicalizes a K-inequality; affine-equivalent inputs collapse to
/// identical output. The expression must carry a bound.
pub fn canonicalize(
    phi: &BellExpression,
    mode: CanonMode,
    scale: ScaleConvention,
) -> Result<CanonicalForm> {
    let forms = constraint_forms(phi.scenario());
    canonicalize_with_forms(phi, mode, scale, &forms)
}

/// [`canonicalize`] with the scenario's forms supplied by the caller;
/// avoids rebuilding projectors when canonicalizing many expressions of
/// one scenario.
pub fn canonicalize_with_forms(
    phi: &BellExpression,
    mode: CanonMode,
    scale: ScaleConvention,
    forms: &ScenarioForms,
) -> Result<CanonicalForm> {
    let Some(u) = phi.bound() else {
        return Err(Error::InvalidInput(
            "canonicalization needs a K-inequality bound".into(),
        ));
    };
    let (coeffs, bound) = match mode {
        CanonMode::GammaProjected => {
            let projected = forms.pi_gamma.row_mul(phi.coeffs());
            let shift = dot(phi.coeffs(), &forms.uniform);
            (projected, u - shift)
        }
        CanonMode::ZeroBound => {
            let kept = forms.pi_omega_bar().row_mul(phi.coeffs());
            let shifted: RatVector = kept
                .iter()
                .zip(&forms.tau)
                .map(|(c, t)| c - u * t)
                .collect();
            (shifted, Rational::zero())
        }
    };
    let (coeffs, bound) = apply_scale(coeffs, bound, scale);
    Ok(CanonicalForm {
        mode,
        scale,
        coeffs,
        bound,
    })
}

fn apply_scale(
    coeffs: RatVector,
    bound: Rational,
    scale: ScaleConvention,
) -> (RatVector, Rational) {
    if coeffs.iter().all(Rational::is_zero) {
        // only the bound can fix the scale; keep its sign
        let bound = if bound.is_zero() {
            bound
        } else if bound.is_positive() {
            Rational::one()
        } else {
            -Rational::one()
        };
        return (coeffs, bound);
    }
    match scale {
        ScaleConvention::PrimitiveIntegers => {
            let prim = primitive_integer_form(&coeffs);
            let pivot = coeffs.iter().position(|c| !c.is_zero()).expect("nonzero");
            let s = &prim[pivot] / &coeffs[pivot];
            let bound = bound * &s;
            (prim, bound)
        }
        ScaleConvention::OneNorm => {
            let norm: Rational = coeffs.iter().map(|c| c.abs()).sum();
            let s = norm.recip();
            (coeffs.iter().map(|c| c * &s).collect(), bound * &s)
        }
    }
}

/// Covariance of an empirical behavior estimate: block diagonal per joint
/// input in the full coefficient index.
#[derive(Clone, Debug)]
pub struct CovarianceModel {
    scenario: Scenario,
    matrix: RatMatrix,
}

impl CovarianceModel {
    /// Wraps an explicit covariance matrix, checking symmetry and the
    /// block structure (entries across different joint inputs vanish).
    pub fn new(scenario: Scenario, matrix: RatMatrix) -> Result<Self> {
        let d = scenario.dim();
        assert_eq!(
            (matrix.rows(), matrix.cols()),
            (d, d),
            "covariance shape mismatch"
        );
        for r in 0..d {
            for c in 0..r {
                if matrix.get(r, c) != matrix.get(c, r) {
                    return Err(Error::InvalidInput("covariance must be symmetric".into()));
                }
            }
        }
        for r in 0..d {
            let rx: Vec<usize> = scenario.tensor_unindex(r).iter().map(|&(_, x)| x).collect();
            for c in 0..d {
                let cx: Vec<usize> = scenario.tensor_unindex(c).iter().map(|&(_, x)| x).collect();
                if rx != cx && !matrix.get(r, c).is_zero() {
                    return Err(Error::InvalidInput(
                        "covariance must be block diagonal per joint input".into(),
                    ));
                }
            }
        }
        Ok(CovarianceModel { scenario, matrix })
    }

    pub fn zero(scenario: &Scenario) -> Self {
        CovarianceModel {
            scenario: scenario.clone(),
            matrix: RatMatrix::zeros(scenario.dim(), scenario.dim()),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// The exact variance of the estimator `phi . P_run`.
    pub fn variance(&self, coeffs: &[Rational]) -> Rational {
        dot(coeffs, &self.matrix.mul_vec(coeffs))
    }
}

/// Event counts per joint input, in the scenario's output order for that
/// input.
pub type Counts = Vec<(Vec<usize>, Vec<u64>)>;

/// Multinomial covariance of the relative frequencies
/// `P_run(a..|x..) = N / sum N`: per joint-input block
/// `(diag(p) - p p^T) / N_total`, independent across blocks.
pub fn covariance_from_counts(scenario: &Scenario, counts: &Counts) -> Result<CovarianceModel> {
    let d = scenario.dim();
    let mut matrix = RatMatrix::zeros(d, d);
    let expected_blocks = scenario.joint_inputs().len();
    if counts.len() != expected_blocks {
        return Err(Error::InvalidInput(format!(
            "need counts for all {expected_blocks} joint inputs, got {}",
            counts.len()
        )));
    }
    for (inputs, block) in counts {
        let outputs = scenario.joint_outputs(inputs);
        if block.len() != outputs.len() {
            return Err(Error::InvalidInput(format!(
                "input block {inputs:?} needs {} counts, got {}",
                outputs.len(),
                block.len()
            )));
        }
        let total: u64 = block.iter().sum();
        if total == 0 {
            return Err(Error::InvalidInput(format!(
                "input block {inputs:?} has no events"
            )));
        }
        let total_r = Rational::from_integer((total as i64).into());
        let p: Vec<Rational> = block
            .iter()
            .map(|&n| Rational::from_integer((n as i64).into()) / &total_r)
            .collect();
        let idx: Vec<usize> = outputs
            .iter()
            .map(|outs| {
                let pairs: Vec<_> = outs.iter().zip(inputs).map(|(&a, &x)| (a, x)).collect();
                scenario.tensor_index(&pairs).expect("valid index")
            })
            .collect();
        for (i, &ri) in idx.iter().enumerate() {
            for (j, &rj) in idx.iter().enumerate() {
                let mut v = -(&p[i] * &p[j]);
                if i == j {
                    v += &p[i];
                }
                matrix.set(ri, rj, v / &total_r);
            }
        }
    }
    Ok(CovarianceModel {
        scenario: scenario.clone(),
        matrix,
    })
}

/// The variance-optimal representative of `phi`'s equivalence class.
///
/// The optimum keeps the allowed component `phi (1 - Pi_Omega)` and picks
/// the forbidden component by the exact normal equation
/// `Pi_Omega Sigma psi^T = 0`; the pseudoinverse handles singular
/// covariances. The result is affine equivalent to `phi` (difference in
/// the span of the `mu_i`) and stationary along every `mu_i` direction.
pub fn variance_optimal(phi: &BellExpression, cov: &CovarianceModel) -> Result<BellExpression> {
    if phi.scenario() != cov.scenario() {
        return Err(Error::ScenarioMismatch(
            "expression and covariance live in different scenarios".into(),
        ));
    }
    let forms = constraint_forms(phi.scenario());
    let base = forms.pi_omega_bar().row_mul(phi.coeffs());
    let sigma = cov.matrix();
    // normal equation A z = -b with A = Pi Sigma Pi^T, b = Pi Sigma base^T
    let b = forms.pi_omega.mul_vec(&sigma.mul_vec(&base));
    let a = forms.pi_omega.mul(sigma).mul(&forms.pi_omega.transpose());
    let z = pseudo_inverse(&a).mul_vec(&b);
    let eta = forms.pi_omega.row_mul(&z);
    let coeffs: RatVector = base.iter().zip(&eta).map(|(c, e)| c - e).collect();
    BellExpression::new(phi.scenario().clone(), coeffs, phi.bound().cloned())
}
