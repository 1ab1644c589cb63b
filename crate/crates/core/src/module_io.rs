//! JSON exchange format for LLV modules and its validator.
//!
//! A module file carries the quadratic space, the graded dimensions, one
//! Lefschetz operator per basis vector of `H²`, the grading operator and,
//! optionally, dual Lefschetz operators and a Hodge frame. Keys are written
//! in sorted order and rationals as `"p/q"` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RationalMatrix, Rational};
use crate::llv::{
    dual_from_lefschetz, fmt_vec, greedy_anisotropic_basis, random_anisotropic_basis, GradedOperator, HodgeFrame,
    LinearLambda, LlvModule,
};
use crate::quadratic::QuadraticSpace;
use crate::verbitsky::GradedAlgebra;

pub const MODULE_SCHEMA_VERSION: u32 = 1;

/// Seed of the second anisotropic basis used for the linearity check.
pub const SECOND_BASIS_SEED: u64 = 0x5eed;

/// Dual Lefschetz operators `Λ_x` for a list of classes `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaActions {
    pub classes: Vec<Vec<Rational>>,
    pub operators: Vec<GradedOperator>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlvModuleSpec {
    pub n: usize,
    pub space: QuadraticSpace,
    pub degrees: Vec<usize>,
    pub l_actions: Vec<GradedOperator>,
    pub h_action: GradedOperator,
    pub lambda_actions: Option<LambdaActions>,
    pub frame: Option<HodgeFrame>,
    pub description: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaWire {
    classes: Vec<Vec<Rational>>,
    operators: Vec<Vec<RationalMatrix>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameWire {
    s: Vec<Rational>,
    sbar: Vec<Rational>,
    beta: Vec<Rational>,
    eta: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleWire {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    n: usize,
    space: QuadraticSpace,
    degrees: Vec<usize>,
    #[serde(rename = "L_actions")]
    l_actions: Vec<Vec<RationalMatrix>>,
    h_action: Vec<RationalMatrix>,
    #[serde(rename = "Lambda_actions", default, skip_serializing_if = "Option::is_none")]
    lambda_actions: Option<LambdaWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<FrameWire>,
}

impl LlvModuleSpec {
    /// Spec of a module; `h` is the standard grading.
    pub fn from_module(module: &LlvModule) -> Self {
        LlvModuleSpec {
            n: module.n(),
            space: module.space().clone(),
            degrees: module.dims().to_vec(),
            l_actions: module.lefschetz_basis().to_vec(),
            h_action: module.grading(),
            lambda_actions: None,
            frame: None,
            description: None,
        }
    }

    /// Shape-checked module view; validation is separate.
    pub fn to_module(&self) -> Result<LlvModule> {
        LlvModule::new(self.n, self.space.clone(), self.degrees.clone(), self.l_actions.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = ModuleWire {
            schema_version: MODULE_SCHEMA_VERSION,
            description: self.description.clone(),
            n: self.n,
            space: self.space.clone(),
            degrees: self.degrees.clone(),
            l_actions: self.l_actions.iter().map(|l| l.blocks().to_vec()).collect(),
            h_action: self.h_action.blocks().to_vec(),
            lambda_actions: self.lambda_actions.as_ref().map(|la| LambdaWire {
                classes: la.classes.clone(),
                operators: la.operators.iter().map(|o| o.blocks().to_vec()).collect(),
            }),
            frame: self.frame.as_ref().map(|f| FrameWire {
                s: f.s.clone(),
                sbar: f.sbar.clone(),
                beta: f.beta.clone(),
                eta: f.eta.clone(),
            }),
        };
        // a Value round trip sorts every object's keys
        let value = serde_json::to_value(&wire)?;
        let mut out = serde_json::to_string_pretty(&value)?;
        out.push('\n');
        Ok(out)
    }
}

fn schema(e: impl std::fmt::Display) -> Error {
    Error::Schema(e.to_string())
}

pub fn load_module(json: &str) -> Result<LlvModuleSpec> {
    let w: ModuleWire = serde_json::from_str(json).map_err(schema)?;
    if w.schema_version != MODULE_SCHEMA_VERSION {
        return Err(Error::Schema(format!("schema_version {} (supported: {MODULE_SCHEMA_VERSION})", w.schema_version)));
    }
    if w.n == 0 || w.degrees.len() != 4 * w.n + 1 {
        return Err(Error::Schema(format!("degrees must list 4n+1 dimensions for n >= 1 (n = {}, got {})", w.n, w.degrees.len())));
    }
    if w.l_actions.len() != w.space.dim() {
        return Err(Error::Schema(format!("{} L_actions for b2 = {}", w.l_actions.len(), w.space.dim())));
    }
    let op = |blocks: Vec<RationalMatrix>, offset: i32| GradedOperator::from_blocks(&w.degrees, offset, blocks).map_err(schema);
    let l_actions = w.l_actions.into_iter().map(|b| op(b, 2)).collect::<Result<Vec<_>>>()?;
    let h_action = op(w.h_action, 0)?;
    let lambda_actions = match w.lambda_actions {
        None => None,
        Some(la) => {
            if la.classes.len() != la.operators.len() || la.classes.iter().any(|c| c.len() != w.space.dim()) {
                return Err(Error::Schema("Lambda_actions: classes and operators do not match".into()));
            }
            let operators = la.operators.into_iter().map(|b| op(b, -2)).collect::<Result<Vec<_>>>()?;
            Some(LambdaActions { classes: la.classes, operators })
        }
    };
    let frame = match w.frame {
        None => None,
        Some(f) => Some(HodgeFrame::new(&w.space, f.s, f.sbar, f.beta, f.eta).map_err(schema)?),
    };
    Ok(LlvModuleSpec {
        n: w.n,
        space: w.space,
        degrees: w.degrees,
        l_actions,
        h_action,
        lambda_actions,
        frame,
        description: w.description,
    })
}

/// The exported form of a built `SH`: Lefschetz operators, grading, `Λ_x` on the
/// greedy anisotropic basis and the frame.
pub fn export_module(alg: &GradedAlgebra, frame: &HodgeFrame) -> Result<String> {
    let module = LlvModule::from_algebra(alg)?;
    let mut spec = LlvModuleSpec::from_module(&module);
    let classes = greedy_anisotropic_basis(module.space())?;
    let operators = classes.iter().map(|x| module.dual_lefschetz(x)).collect::<Result<Vec<_>>>()?;
    spec.lambda_actions = Some(LambdaActions { classes, operators });
    spec.frame = Some(frame.clone());
    spec.description = Some(format!("Verbitsky component SH, n = {}, b2 = {}", alg.n(), alg.b2()));
    spec.to_json()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, name: &str, witness: Option<String>) {
        self.checks.push(ValidationCheck { name: name.into(), passed: witness.is_none(), witness });
    }

    pub fn render_text(&self) -> String {
        self.checks
            .iter()
            .map(|c| match &c.witness {
                None => format!("PASS {}\n", c.name),
                Some(w) => format!("FAIL {}: {w}\n", c.name),
            })
            .collect()
    }
}

fn first_bad_degree(a: &GradedOperator, b: &GradedOperator) -> Option<usize> {
    (0..a.dims().len()).find(|&d| a.block(d) != b.block(d))
}

/// Runs every structural check; failures are recorded with witnesses.
pub fn validate(spec: &LlvModuleSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let dims = &spec.degrees;
    let n2 = 2 * spec.n as i64;

    let h = GradedOperator::diagonal(dims, |d| Rational::from_int(d as i64 - n2));
    report.push(
        "h_eigenvalues",
        first_bad_degree(&spec.h_action, &h).map(|d| format!("h on H^{d} is not ({d} - 2n)·id = {}·id", d as i64 - n2)),
    );

    let mut witness = None;
    for (i, l) in spec.l_actions.iter().enumerate() {
        let lhs = spec.h_action.commutator(l).expect("same graded space");
        if let Some(d) = first_bad_degree(&lhs, &l.scale(&Rational::from_int(2))) {
            witness = Some(format!("[h, L_e{i}] ≠ 2 L_e{i} on H^{d}"));
            break;
        }
    }
    report.push("h_L_commutation", witness);

    let mut witness = None;
    'outer: for i in 0..spec.l_actions.len() {
        for j in i + 1..spec.l_actions.len() {
            let c = spec.l_actions[i].commutator(&spec.l_actions[j]).expect("same graded space");
            if let Some(d) = (0..dims.len()).find(|&d| !c.block(d).is_zero()) {
                witness = Some(format!("[L_e{i}, L_e{j}] ≠ 0 on H^{d}"));
                break 'outer;
            }
        }
    }
    report.push("L_commute", witness);

    let module = spec.to_module();
    let completions = module.as_ref().map_err(|e| e.to_string()).and_then(|m| {
        let basis = greedy_anisotropic_basis(m.space()).map_err(|e| e.to_string())?;
        let lam = LinearLambda::new(m, &basis).map_err(|e| e.to_string())?;
        Ok((m, basis, lam))
    });
    match completions {
        Err(e) => {
            report.push("lambda_completion", Some(e));
            report.push("lambda_linearity", Some("no completion to compare".into()));
            report.push("h_Lambda_commutation", Some("no completion to check".into()));
        }
        Ok((m, basis, lam)) => {
            report.push("lambda_completion", None);
            let second = random_anisotropic_basis(m.space(), SECOND_BASIS_SEED)
                .and_then(|b| LinearLambda::new(m, &b))
                .and_then(|other| lam.agrees_with(&other));
            report.push(
                "lambda_linearity",
                match second {
                    Ok(None) => None,
                    Ok(Some(i)) => Some(format!("the two bases disagree on Λ of e{i}")),
                    Err(e) => Some(e.to_string()),
                },
            );
            let mut witness = None;
            for x in &basis {
                let l = m.dual_lefschetz(x).expect("completion succeeded above");
                let lhs = spec.h_action.commutator(&l).expect("same graded space");
                if let Some(d) = first_bad_degree(&lhs, &l.scale(&Rational::from_int(-2))) {
                    witness = Some(format!("[h, Λ_x] ≠ -2 Λ_x on H^{d} for x = {}", fmt_vec(x)));
                    break;
                }
            }
            report.push("h_Lambda_commutation", witness);
        }
    }

    if let Some(la) = &spec.lambda_actions {
        let mut witness = None;
        for (x, lam) in la.classes.iter().zip(&la.operators) {
            let ok = spec
                .to_module()
                .and_then(|m| m.lefschetz(x))
                .and_then(|l| Ok(l.commutator(lam)? == spec.h_action && spec.h_action.commutator(lam)? == lam.scale(&Rational::from_int(-2))));
            if !matches!(ok, Ok(true)) {
                witness = Some(format!("declared Λ for x = {} is not an sl2 partner of L_x", fmt_vec(x)));
                break;
            }
        }
        report.push("declared_Lambda", witness);
    }

    if let Some(f) = &spec.frame {
        report.push("frame", f.validate(&spec.space).err().map(|e| e.to_string()));
    }
    report
}

/// `dual_from_lefschetz` for a single class of a spec.
pub fn lambda_for(spec: &LlvModuleSpec, x: &[Rational]) -> Result<GradedOperator> {
    dual_from_lefschetz(&spec.to_module()?.lefschetz(x)?, spec.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llv::build_frame;
    use crate::quadratic::{default_tail, make_standard_space};
    use crate::verbitsky::{build_verbitsky, DEFAULT_BUDGET};

    fn sh(n: usize, b2: usize) -> GradedAlgebra {
        let s = make_standard_space(b2, &default_tail(b2)).unwrap();
        build_verbitsky(&s, n, DEFAULT_BUDGET, 0).unwrap()
    }

    #[test]
    fn export_round_trip_and_validate() {
        let alg = sh(2, 5);
        let frame = build_frame(alg.space(), 0).unwrap();
        let js = export_module(&alg, &frame).unwrap();
        let spec = load_module(&js).unwrap();
        assert_eq!(spec.to_json().unwrap(), js);
        let report = validate(&spec);
        assert!(report.all_passed(), "{}", report.render_text());
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn truncated_file_is_a_schema_error() {
        let alg = sh(1, 4);
        let js = export_module(&alg, &build_frame(alg.space(), 0).unwrap()).unwrap();
        assert!(matches!(load_module(&js[..js.len() / 2]), Err(Error::Schema(_))));
        let bumped = js.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(load_module(&bumped), Err(Error::Schema(_))));
    }

    #[test]
    fn minimal_ladder_module() {
        // a single sl2 ladder 1 -> x -> x², with H² one-dimensional
        let js = r#"{
            "schema_version": 1, "n": 1,
            "space": {"dim": 1, "gram": [["2"]]},
            "degrees": [1, 0, 1, 0, 1],
            "L_actions": [[
                {"rows": 0, "cols": 1, "entries": []},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 1, "cols": 1, "entries": [["1"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 0, "cols": 1, "entries": []}
            ]],
            "h_action": [
                {"rows": 1, "cols": 1, "entries": [["-2"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 1, "cols": 1, "entries": [["0"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 1, "cols": 1, "entries": [["2"]]}
            ]
        }"#;
        // the degree-0 block of L must map H^0 into H^2
        assert!(load_module(js).is_err());
        let good = r#"{
            "schema_version": 1, "n": 1,
            "space": {"dim": 1, "gram": [["2"]]},
            "degrees": [1, 0, 1, 0, 1],
            "L_actions": [[
                {"rows": 1, "cols": 1, "entries": [["1"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 1, "cols": 1, "entries": [["1"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 0, "cols": 1, "entries": []}
            ]],
            "h_action": [
                {"rows": 1, "cols": 1, "entries": [["-2"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 1, "cols": 1, "entries": [["0"]]},
                {"rows": 0, "cols": 0, "entries": []},
                {"rows": 1, "cols": 1, "entries": [["2"]]}
            ]
        }"#;
        let spec = load_module(good).unwrap();
        let report = validate(&spec);
        assert!(report.all_passed(), "{}", report.render_text());
        let lam = lambda_for(&spec, &[Rational::one()]).unwrap();
        assert_eq!(lam.block(2), &RationalMatrix::from_i64_rows(&[&[2]]));
    }
}
