//! File formats: JSON schemas for every domain object and plain-text
//! `.ext`/`.ine` tables compatible with the usual polyhedra tools.
//!
//! Rationals serialize as the string `p/q`, or `p` when the denominator is
//! one, in every format. Scenario party indices are 0-based in JSON;
//! inputs, outputs and deterministic-map tables are 1-based.

use serde::{Deserialize, Serialize};

use crate::corr::{Behavior, BellExpression};
use crate::detmap::DetMap;
use crate::polytope::{HRep, VRep};
use crate::ratlin::{format_rational, parse_rational, RatMatrix, RatVector, Rational};
use crate::scenario::{PartyCard, Scenario};
use crate::stochmap::{validate, LocalTransformation};
use crate::subspaces::{Component, SubspaceKind};
use crate::{Error, Result};

/// `{"parties":[[3,2],[2,2]],"signaling":[[0,0],[1,1]]}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ScenarioJson {
    pub parties: Vec<Vec<usize>>,
    #[serde(default)]
    pub signaling: Vec<[usize; 2]>,
}

impl ScenarioJson {
    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioJson {
            parties: s.parties().iter().map(|p| p.outputs().to_vec()).collect(),
            signaling: s.signaling_pairs().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        let parties = self
            .parties
            .into_iter()
            .map(PartyCard::new)
            .collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(usize, usize)> = self.signaling.iter().map(|&[a, b]| (a, b)).collect();
        Scenario::new(parties, &pairs)
    }
}

fn format_vec(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn parse_vec(v: &[String]) -> Result<RatVector> {
    v.iter().map(|s| parse_rational(s)).collect()
}

/// `{"scenario":{...},"coeffs":["1/2","0",...]}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BehaviorJson {
    pub scenario: ScenarioJson,
    pub coeffs: Vec<String>,
}

impl BehaviorJson {
    pub fn from_behavior(p: &Behavior) -> Self {
        BehaviorJson {
            scenario: ScenarioJson::from_scenario(p.scenario()),
            coeffs: format_vec(p.coeffs()),
        }
    }

    pub fn into_behavior(self) -> Result<Behavior> {
        Behavior::new(self.scenario.into_scenario()?, parse_vec(&self.coeffs)?)
    }
}

/// `{"scenario":{...},"coeffs":[...],"bound":"2"}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ExpressionJson {
    pub scenario: ScenarioJson,
    pub coeffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
}

impl ExpressionJson {
    pub fn from_expression(phi: &BellExpression) -> Self {
        ExpressionJson {
            scenario: ScenarioJson::from_scenario(phi.scenario()),
            coeffs: format_vec(phi.coeffs()),
            bound: phi.bound().map(format_rational),
        }
    }

    pub fn into_expression(self) -> Result<BellExpression> {
        let bound = self.bound.as_deref().map(parse_rational).transpose()?;
        BellExpression::new(
            self.scenario.into_scenario()?,
            parse_vec(&self.coeffs)?,
            bound,
        )
    }
}

/// `{"source":[2,2],"target":[3,3,3],"xi":[1,1,2],"alphas":[[1,2,2],...]}`
///
/// Values are 1-based; a CLI label-base of 0 shifts them on input.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DetMapJson {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub xi: Vec<usize>,
    pub alphas: Vec<Vec<usize>>,
}

impl DetMapJson {
    pub fn from_map(m: &DetMap) -> Self {
        DetMapJson {
            source: m.source().outputs().to_vec(),
            target: m.target().outputs().to_vec(),
            xi: m.xi().to_vec(),
            alphas: m.alphas().to_vec(),
        }
    }

    /// `label_base` 0 shifts all xi/alpha values up by one.
    pub fn into_map(self, label_base: usize) -> Result<DetMap> {
        let shift = match label_base {
            0 => 1,
            1 => 0,
            other => {
                return Err(Error::InvalidInput(format!(
                    "label base must be 0 or 1, got {other}"
                )))
            }
        };
        DetMap::new(
            PartyCard::new(self.source)?,
            PartyCard::new(self.target)?,
            self.xi.iter().map(|&x| x + shift).collect(),
            self.alphas
                .iter()
                .map(|t| t.iter().map(|&a| a + shift).collect())
                .collect(),
        )
    }
}

/// `{"source":[2,2],"target":[2,2],"matrix":[["0","0","1","0"],...]}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TransformationJson {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub matrix: Vec<Vec<String>>,
}

impl TransformationJson {
    pub fn from_transformation(t: &LocalTransformation) -> Self {
        TransformationJson {
            source: t.source().outputs().to_vec(),
            target: t.target().outputs().to_vec(),
            matrix: t.matrix().iter_rows().map(format_vec).collect(),
        }
    }

    pub fn matrix(&self) -> Result<(RatMatrix, PartyCard, PartyCard)> {
        let source = PartyCard::new(self.source.clone())?;
        let target = PartyCard::new(self.target.clone())?;
        let rows = self
            .matrix
            .iter()
            .map(|r| parse_vec(r))
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != target.dim() || rows.iter().any(|r| r.len() != source.dim()) {
            return Err(Error::InvalidInput(format!(
                "matrix must be {} x {} for {} -> {}",
                target.dim(),
                source.dim(),
                source,
                target
            )));
        }
        Ok((RatMatrix::from_rows(rows), source, target))
    }

    /// Parses and validates the causal form.
    pub fn into_transformation(self) -> Result<LocalTransformation> {
        let (matrix, source, target) = self.matrix()?;
        validate(matrix, &source, &target).map_err(|violations| {
            let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Error::InvalidInput(format!(
                "not a causal local transformation: {}",
                lines.join("; ")
            ))
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct LinearSystemJson {
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<String>>,
    #[serde(default)]
    pub b: Vec<String>,
}

/// `{"equalities":{"A":[...],"b":[...]},"inequalities":{"A":[...],"c":[...]}}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct HRepJson {
    pub equalities: LinearSystemJson,
    pub inequalities: InequalitySystemJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct InequalitySystemJson {
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<String>>,
    #[serde(default)]
    pub c: Vec<String>,
}

impl HRepJson {
    pub fn from_hrep(h: &HRep) -> Self {
        HRepJson {
            equalities: LinearSystemJson {
                a: h.eq_a.iter_rows().map(format_vec).collect(),
                b: format_vec(&h.eq_b),
            },
            inequalities: InequalitySystemJson {
                a: h.ineq_a.iter_rows().map(format_vec).collect(),
                c: format_vec(&h.ineq_c),
            },
        }
    }

    pub fn into_hrep(self) -> Result<HRep> {
        let eq_rows = self
            .equalities
            .a
            .iter()
            .map(|r| parse_vec(r))
            .collect::<Result<Vec<_>>>()?;
        let ineq_rows = self
            .inequalities
            .a
            .iter()
            .map(|r| parse_vec(r))
            .collect::<Result<Vec<_>>>()?;
        let dim = eq_rows
            .first()
            .map(Vec::len)
            .or_else(|| ineq_rows.first().map(Vec::len))
            .ok_or_else(|| Error::InvalidInput("H-representation has no rows".into()))?;
        let eq_a = if eq_rows.is_empty() {
            RatMatrix::zeros(0, dim)
        } else {
            RatMatrix::from_rows(eq_rows)
        };
        let ineq_a = if ineq_rows.is_empty() {
            RatMatrix::zeros(0, dim)
        } else {
            RatMatrix::from_rows(ineq_rows)
        };
        Ok(HRep::new(
            eq_a,
            parse_vec(&self.equalities.b)?,
            ineq_a,
            parse_vec(&self.inequalities.c)?,
        ))
    }
}

/// `{"vertices":[["1","0"],...]}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VRepJson {
    pub vertices: Vec<Vec<String>>,
}

impl VRepJson {
    pub fn from_vrep(v: &VRep) -> Self {
        VRepJson {
            vertices: v.vertices.iter().map(|vv| format_vec(vv)).collect(),
        }
    }

    pub fn into_vrep(self) -> Result<VRep> {
        Ok(VRep {
            vertices: self
                .vertices
                .iter()
                .map(|r| parse_vec(r))
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

/// `{"scenario":{...},"cg_coeffs":["1","1/2",...]}`
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CgJson {
    pub scenario: ScenarioJson,
    pub cg_coeffs: Vec<String>,
}

/// One entry of a subspace decomposition report.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ComponentJson {
    pub label: Vec<String>,
    pub class: String,
    pub vector: Vec<String>,
}

impl ComponentJson {
    pub fn from_component(c: &Component) -> Self {
        ComponentJson {
            label: c.label.iter().map(|k| k.letter().to_string()).collect(),
            class: c.class.as_str().to_string(),
            vector: format_vec(&c.vector),
        }
    }
}

/// Parses a label like `["Z","C"]`.
pub fn parse_label(parts: &[String]) -> Result<Vec<SubspaceKind>> {
    parts
        .iter()
        .map(|p| {
            let mut chars = p.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => SubspaceKind::from_letter(c),
                _ => Err(Error::Parse(format!("bad subspace label {p:?}"))),
            }
        })
        .collect()
}

/// Writes an H-representation in the cdd `.ine` layout: rows `b -A` for
/// `A x <= b`, equality rows listed under `linearity`.
pub fn write_ine(h: &HRep) -> String {
    let mut out = String::from("H-representation\n");
    let eq_count = h.eq_a.rows();
    if eq_count > 0 {
        out.push_str("linearity ");
        out.push_str(&eq_count.to_string());
        for i in 0..eq_count {
            out.push(' ');
            out.push_str(&(i + 1).to_string());
        }
        out.push('\n');
    }
    out.push_str("begin\n");
    let rows = eq_count + h.ineq_a.rows();
    out.push_str(&format!(" {} {} rational\n", rows, h.dim() + 1));
    for r in 0..eq_count {
        push_ine_row(&mut out, &h.eq_b[r], h.eq_a.row(r));
    }
    for r in 0..h.ineq_a.rows() {
        push_ine_row(&mut out, &h.ineq_c[r], h.ineq_a.row(r));
    }
    out.push_str("end\n");
    out
}

fn push_ine_row(out: &mut String, rhs: &Rational, row: &[Rational]) {
    out.push(' ');
    out.push_str(&format_rational(rhs));
    for v in row {
        out.push(' ');
        out.push_str(&format_rational(&-v.clone()));
    }
    out.push('\n');
}

/// Writes a V-representation in the cdd `.ext` layout: vertex rows start
/// with 1.
pub fn write_ext(v: &VRep) -> String {
    let dim = v.vertices.first().map_or(0, Vec::len);
    let mut out = String::from("V-representation\nbegin\n");
    out.push_str(&format!(" {} {} rational\n", v.vertices.len(), dim + 1));
    for vert in &v.vertices {
        out.push_str(" 1");
        for c in vert {
            out.push(' ');
            out.push_str(&format_rational(c));
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

struct PolyFile {
    linearity: Vec<usize>,
    rows: Vec<RatVector>,
}

fn parse_poly_file(text: &str, kind: &str) -> Result<PolyFile> {
    let mut linearity = Vec::new();
    let mut rows = Vec::new();
    let mut counts: Option<(usize, usize)> = None;
    let mut in_body = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        if line.eq_ignore_ascii_case("begin") {
            in_body = true;
            continue;
        }
        if line.eq_ignore_ascii_case("end") {
            break;
        }
        if !in_body {
            if let Some(rest) = line.strip_prefix("linearity") {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad linearity token {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                if nums.is_empty() {
                    return Err(Error::Parse("empty linearity line".into()));
                }
                linearity = nums[1..].to_vec();
            }
            // representation tag lines are informative only
            continue;
        }
        if counts.is_none() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(Error::Parse(format!("bad {kind} size line {line:?}")));
            }
            let m = toks[0]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad row count {:?}", toks[0])))?;
            let n = toks[1]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad column count {:?}", toks[1])))?;
            counts = Some((m, n));
            continue;
        }
        let row: RatVector = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<_>>()?;
        let (_, n) = counts.expect("counts parsed");
        if row.len() != n {
            return Err(Error::Parse(format!(
                "{kind} row has {} entries, expected {n}",
                row.len()
            )));
        }
        rows.push(row);
    }
    let Some((m, _)) = counts else {
        return Err(Error::Parse(format!("missing begin/size in {kind} file")));
    };
    if rows.len() != m {
        return Err(Error::Parse(format!(
            "{kind} file promises {m} rows, has {}",
            rows.len()
        )));
    }
    Ok(PolyFile { linearity, rows })
}

/// Reads a cdd-style `.ine` file into an H-representation.
pub fn read_ine(text: &str) -> Result<HRep> {
    let parsed = parse_poly_file(text, ".ine")?;
    let dim = parsed.rows.first().map(Vec::len).unwrap_or(1) - 1;
    let mut eq_rows = Vec::new();
    let mut eq_b = Vec::new();
    let mut ineq_rows = Vec::new();
    let mut ineq_c = Vec::new();
    for (i, row) in parsed.rows.iter().enumerate() {
        let rhs = row[0].clone();
        let coeffs: RatVector = row[1..].iter().map(|v| -v.clone()).collect();
        if parsed.linearity.contains(&(i + 1)) {
            eq_rows.push(coeffs);
            eq_b.push(rhs);
        } else {
            ineq_rows.push(coeffs);
            ineq_c.push(rhs);
        }
    }
    let eq_a = if eq_rows.is_empty() {
        RatMatrix::zeros(0, dim)
    } else {
        RatMatrix::from_rows(eq_rows)
    };
    let ineq_a = if ineq_rows.is_empty() {
        RatMatrix::zeros(0, dim)
    } else {
        RatMatrix::from_rows(ineq_rows)
    };
    Ok(HRep::new(eq_a, eq_b, ineq_a, ineq_c))
}

/// Reads a cdd-style `.ext` file into a V-representation; rays (leading 0)
/// are rejected since all polytopes here are bounded.
pub fn read_ext(text: &str) -> Result<VRep> {
    let parsed = parse_poly_file(text, ".ext")?;
    let mut vertices = Vec::new();
    for row in parsed.rows {
        if !row[0].eq(&Rational::from_integer(1.into())) {
            return Err(Error::Parse(
                "only bounded polytopes are supported (.ext rows must start with 1)".into(),
            ));
        }
        vertices.push(row[1..].to_vec());
    }
    Ok(VRep { vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::{chsh, pr_box};
    use crate::polytope::{dd_vertices, ns_hrep, DdLimits};
    use crate::scenario::chsh_scenario;

    #[test]
    fn behavior_json_round_trip() {
        let pr = pr_box();
        let json = serde_json::to_string(&BehaviorJson::from_behavior(&pr)).unwrap();
        let back: BehaviorJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_behavior().unwrap(), pr);
    }

    #[test]
    fn expression_json_round_trip() {
        let phi = chsh();
        let json = serde_json::to_string(&ExpressionJson::from_expression(&phi)).unwrap();
        let back: ExpressionJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_expression().unwrap(), phi);
    }

    #[test]
    fn scenario_json_shape() {
        let s: ScenarioJson =
            serde_json::from_str(r#"{"parties":[[3,2],[2,2]],"signaling":[[0,0],[1,1]]}"#).unwrap();
        let scenario = s.into_scenario().unwrap();
        assert_eq!(scenario.dim(), 20);
        assert!(scenario.is_nonsignaling());
    }

    #[test]
    fn detmap_json_label_bases() {
        // the (3,2) -> (2,2,2) block-matrix example map
        let json =
            r#"{"source":[3,2],"target":[2,2,2],"xi":[1,1,2],"alphas":[[1,2,2],[1,1,2],[2,1]]}"#;
        let m: DetMapJson = serde_json::from_str(json).unwrap();
        let map = m.clone().into_map(1).unwrap();
        assert_eq!(map.xi(), &[1, 1, 2]);
        let zero_based = DetMapJson {
            xi: vec![0, 0, 1],
            alphas: vec![vec![0, 1, 1], vec![0, 0, 1], vec![1, 0]],
            ..m
        };
        assert_eq!(zero_based.into_map(0).unwrap(), map);
    }

    #[test]
    fn hrep_ine_round_trip() {
        let h = ns_hrep(&chsh_scenario());
        let text = write_ine(&h);
        let back = read_ine(&text).unwrap();
        assert_eq!(back, h);
        // byte-stable after one round trip
        assert_eq!(write_ine(&back), text);
    }

    #[test]
    fn vrep_ext_round_trip() {
        let h = ns_hrep(&chsh_scenario());
        let v = dd_vertices(&h, &DdLimits::default()).unwrap();
        let text = write_ext(&v);
        let back = read_ext(&text).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn transformation_json_validates() {
        let json = r#"{"source":[1,1],"target":[1,1],"matrix":[["2","-1"],["-1","2"]]}"#;
        let t: TransformationJson = serde_json::from_str(json).unwrap();
        assert!(t.into_transformation().is_err());
    }
}
