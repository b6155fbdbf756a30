//! Code-table entries: parameters plus enough to rebuild the code.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distance::DistanceReport;
use crate::error::{Error, Result};
use crate::evalcode::{eval_code_build, EvalSpec, Projection};
use crate::galois::Field;
use crate::io::{format_code, format_root, matrix_order, parse_code, parse_root};
use crate::matring::Matrix;
use crate::qbch::{qbch_build, PrimitiveRoot, Provenance, QbchSpec};
use crate::qccore::LinearCode;

/// How to construct a code. Root matrices are stored in the text root format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Qbch { q: u32, delta: usize, root: String },
    Eval { k: usize, points: Vec<usize>, projection: String, root: String },
    Generator { code: String },
}

fn parse_primitive_root(text: &str) -> Result<PrimitiveRoot> {
    let (_, a) = parse_root(text, None)?;
    let m = matrix_order(&a).ok_or_else(|| Error::InvalidParameters("root matrix is singular".into()))?;
    PrimitiveRoot::new(a, m, Provenance::Verbatim)
}

/// Lowercase hex SHA-256 of the canonical root text.
pub fn root_hash(a: &Matrix) -> String {
    let digest = Sha256::digest(format_root(a).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Recipe {
    pub fn qbch(spec: &QbchSpec) -> Self {
        Recipe::Qbch { q: spec.q(), delta: spec.delta(), root: format_root(spec.root().matrix()) }
    }

    pub fn eval(spec: &EvalSpec) -> Self {
        Recipe::Eval {
            k: spec.k(),
            points: spec.points().to_vec(),
            projection: spec.projection().to_string(),
            root: format_root(spec.root().matrix()),
        }
    }

    pub fn generator(code: &LinearCode) -> Self {
        Recipe::Generator { code: format_code(code) }
    }

    pub fn build(&self) -> Result<LinearCode> {
        match self {
            Recipe::Qbch { q, delta, root } => {
                let spec = QbchSpec::new(&Field::of_order(*q)?, parse_primitive_root(root)?, *delta)?;
                qbch_build(&spec)
            }
            Recipe::Eval { k, points, projection, root } => {
                let proj: Projection = projection.parse()?;
                let spec = EvalSpec::with_points(parse_primitive_root(root)?, *k, points.clone(), proj)?;
                Ok(eval_code_build(&spec)?.code)
            }
            Recipe::Generator { code } => parse_code(code),
        }
    }

    pub fn root_hash(&self) -> Result<Option<String>> {
        match self {
            Recipe::Qbch { root, .. } | Recipe::Eval { root, .. } => Ok(Some(root_hash(&parse_root(root, None)?.1))),
            Recipe::Generator { .. } => Ok(None),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeTableEntry {
    /// `[n,k,d]_q`
    pub parameters: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: u32,
    pub block_distance: Option<usize>,
    pub recipe: Recipe,
    pub root_hash: Option<String>,
    pub seed: Option<u64>,
}

/// Fails on the zero code, on a bound instead of an exact distance, and
/// when the recipe does not rebuild `code`.
pub fn export(code: &LinearCode, report: &DistanceReport, recipe: Recipe, seed: Option<u64>) -> Result<CodeTableEntry> {
    if code.dimension() == 0 {
        return Err(Error::InvalidParameters("the zero code has no table entry".into()));
    }
    let d = report
        .distance()
        .ok_or_else(|| Error::InvalidParameters(format!("distance is only bounded: {}", report.parameters())))?;
    if report.n != code.length() || report.k != code.dimension() || report.q != code.field().order() {
        return Err(Error::DimensionMismatch(format!("report {} is for another code", report.parameters())));
    }
    if recipe.build()? != *code {
        return Err(Error::InvalidParameters("recipe does not rebuild the code".into()));
    }
    Ok(CodeTableEntry {
        parameters: report.parameters(),
        n: code.length(),
        k: code.dimension(),
        d,
        q: code.field().order(),
        block_distance: report.block_distance,
        root_hash: recipe.root_hash()?,
        recipe,
        seed,
    })
}
