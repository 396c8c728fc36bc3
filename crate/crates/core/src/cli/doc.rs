//! JSON documents read and written by the command line.
//!
//! Polynomials and series are ascending coefficient lists; each coefficient is the
//! coordinate tuple of a field element in the power basis of the defining polynomial.

use serde::{Deserialize, Serialize};

use crate::algebra::{EpsilonModel, Field, FieldParams, Mat, PolyRing, PolySeries, RamRing, RamSeries};
use crate::error::{Error, Result};
use crate::kisin::UTKisinModule;
use crate::phigamma::TauMatrix;
use crate::rootsys::{ClosedSet, Perm};
use crate::shape::{DiagCode, ShapeReport};

pub const SCHEMA_VERSION: u32 = 1;

pub type CoeffList = Vec<Vec<u32>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldParamsDoc {
    pub p: u32,
    pub f: usize,
    pub defining_poly: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub d: usize,
    pub r: u32,
    /// Row-major, `d²` polynomials in `u`.
    #[serde(rename = "A_phi")]
    pub a_phi: Vec<CoeffList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauDoc {
    pub d: usize,
    /// Entries are known modulo `x^N`.
    #[serde(rename = "N")]
    pub n: usize,
    /// Row-major, `d²` series in `x`.
    pub entries: Vec<CoeffList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub schema_version: u32,
    pub field_params: FieldParamsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauDoc>,
}

impl InputDocument {
    /// Parse and check the schema version; messages carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("line {} column {}: {e}", e.line(), e.column())))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Input(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn field(&self) -> Result<Field> {
        let fp = &self.field_params;
        Ok(Field::new(FieldParams::new(fp.p, fp.f, fp.defining_poly.clone())?))
    }

    fn module_doc(&self) -> Result<&ModuleDoc> {
        self.module.as_ref().ok_or_else(|| Error::Input("document has no \"module\"".into()))
    }

    /// The Frobenius matrix without any structural validation.
    pub fn raw_matrix(&self, field: &Field) -> Result<(Mat<PolySeries>, u32)> {
        let m = self.module_doc()?;
        let polys = PolyRing::new(field.clone());
        let entries = m
            .a_phi
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                decode_coeffs(field, c)
                    .map(|v| polys.from_coeffs(v))
                    .map_err(|e| Error::Input(format!("module.A_phi[{idx}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((Mat::from_flat(m.d, entries)?, m.r))
    }

    pub fn kisin_module(&self, field: &Field) -> Result<UTKisinModule> {
        let (a, r) = self.raw_matrix(field)?;
        UTKisinModule::new(field.clone(), a, r)
    }

    /// The `τ`-matrix and a series ring of precision `precision` (or the document's `N`).
    pub fn tau_matrix(&self, field: &Field, precision: Option<usize>, eps: EpsilonModel) -> Result<Option<(RamRing, TauMatrix)>> {
        let Some(t) = &self.tau else { return Ok(None) };
        let n = precision.unwrap_or(t.n);
        let ring = RamRing::new(field.clone(), n, eps)?;
        let entries = t
            .entries
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                decode_coeffs(field, c)
                    .map(|v| ring.truncated(v, t.n.min(n)))
                    .map_err(|e| Error::Input(format!("tau.entries[{idx}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((ring, TauMatrix::new(Mat::from_flat(t.d, entries)?))))
    }

    pub fn from_module(m: &UTKisinModule) -> Self {
        let k = m.field();
        let params = k.params();
        Self {
            schema_version: SCHEMA_VERSION,
            field_params: FieldParamsDoc { p: params.p(), f: params.f(), defining_poly: params.defining_poly().to_vec() },
            module: Some(ModuleDoc { d: m.dim(), r: m.height(), a_phi: encode_matrix(k, m.a_phi()) }),
            tau: None,
        }
    }

    pub fn with_tau(mut self, k: &Field, tau: &TauMatrix) -> Self {
        self.tau = Some(TauDoc {
            d: tau.dim(),
            n: tau.precision(),
            entries: tau.entries().entries().iter().map(|s| encode_series(k, s)).collect(),
        });
        self
    }
}

fn decode_coeffs(field: &Field, c: &CoeffList) -> Result<Vec<crate::algebra::FieldElem>> {
    c.iter().map(|coords| field.from_coords(coords)).collect()
}

/// Canonical form: trailing zero coefficients dropped, tuples of length `f`.
pub fn encode_poly(k: &Field, a: &PolySeries) -> CoeffList {
    a.coeffs().iter().map(|&c| k.coords(c)).collect()
}

pub fn encode_matrix(k: &Field, a: &Mat<PolySeries>) -> Vec<CoeffList> {
    a.entries().iter().map(|e| encode_poly(k, e)).collect()
}

pub fn encode_series(k: &Field, a: &RamSeries) -> CoeffList {
    a.coeffs().iter().map(|&c| k.coords(c)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticDoc {
    pub code: DiagCode,
    /// 1-based `[row, col]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<[usize; 2]>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShapeReportDoc {
    pub schema_version: u32,
    pub weights: Vec<u32>,
    pub units: Vec<Vec<u32>>,
    #[serde(rename = "tilde_A_phi", skip_serializing_if = "Option::is_none")]
    pub tilde_a_phi: Option<Vec<CoeffList>>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n_matrix: Option<Vec<CoeffList>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_set: Option<ClosedSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Perm>,
    #[serde(rename = "conjugated_A_phi", skip_serializing_if = "Option::is_none")]
    pub conjugated_a_phi: Option<Vec<CoeffList>>,
    pub diagnostics: Vec<DiagnosticDoc>,
}

impl ShapeReportDoc {
    pub fn new(k: &Field, r: &ShapeReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            weights: r.weights.clone(),
            units: r.units.iter().map(|&u| k.coords(u)).collect(),
            tilde_a_phi: r.tilde_a_phi.as_ref().map(|a| encode_matrix(k, a)),
            n_matrix: r.n_matrix.as_ref().map(|a| encode_matrix(k, a)),
            closed_set: r.closed_set.clone(),
            sigma: r.sigma.clone(),
            conjugated_a_phi: r.conjugated_a_phi.as_ref().map(|a| encode_matrix(k, a)),
            diagnostics: r
                .diagnostics
                .iter()
                .map(|d| DiagnosticDoc {
                    code: d.code,
                    position: d.position.map(|(i, j)| [i + 1, j + 1]),
                    message: d.message.clone(),
                })
                .collect(),
        }
    }
}
