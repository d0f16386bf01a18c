//! Structured input documents (`.twv`): a JSON schema describing a link-group
//! presentation, its abelianization exponents, one 2×2 complex matrix per
//! generator, and optional signs and run settings.
//!
//! Matrix entries are decimal strings so a document fixes its own precision:
//! the same file resolves to binary64 or double-double images depending on the
//! scalar it is resolved at. Emission is canonical (fixed field order, pretty
//! JSON, trailing newline), so emit → parse → emit is byte-identical.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::CMatrix;
use crate::rep::{RepError, SignAssignment, Sl2Rep};
use crate::scalar::{Complex, Real};
use crate::words::{parse_presentation, AlphaMap, Generator, Presentation, WordError};

/// Errors from parsing or resolving an input document.
#[derive(Debug, Error)]
pub enum DocumentError {
    /// The text was not valid JSON for the document schema.
    #[error("document does not match the schema: {0}")]
    Schema(String),
    /// A relator or word failed to parse against the generators.
    #[error(transparent)]
    Word(#[from] WordError),
    /// The representation data was structurally invalid.
    #[error(transparent)]
    Rep(#[from] RepError),
    /// A matrix was declared for a name not in the generator list.
    #[error("matrix declared for unknown generator `{0}`")]
    UnknownMatrixGenerator(String),
    /// A generator has no matrix.
    #[error("generator `{0}` has no matrix")]
    MissingMatrix(String),
    /// A generator has more than one matrix.
    #[error("generator `{0}` has more than one matrix")]
    DuplicateMatrix(String),
    /// A matrix entry was not a plain decimal literal.
    #[error("matrix for `{generator}`, entry ({row},{col}): `{text}` is not a decimal literal")]
    BadNumber {
        /// Generator whose matrix is malformed.
        generator: String,
        /// Row of the offending entry.
        row: usize,
        /// Column of the offending entry.
        col: usize,
        /// The text that failed to parse.
        text: String,
    },
    /// The sign string covers a different number of components.
    #[error("sign string `{signs}` covers {got} components, presentation has {expected}")]
    SignLength {
        /// Sign string from the document.
        signs: String,
        /// Components in the presentation.
        expected: usize,
        /// Characters in the sign string.
        got: usize,
    },
}

/// One generator declaration: a name and the link component it belongs to.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    /// Generator name as used in words.
    pub name: String,
    /// Zero-based link-component index.
    pub component: usize,
}

/// One 2×2 matrix, attached to a generator by name.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    /// Name of the generator this matrix is the image of.
    pub generator: String,
    /// Row-major 2×2 entries; each entry is `[re, im]` as decimal strings.
    pub entries: [[[String; 2]; 2]; 2],
}

/// Optional run settings carried by a document; command-line flags win.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Largest lift degree for series runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Degree parity filter: `even`, `odd`, or `both`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    /// Value-extraction mode: `ratio`, `plain`, or `tilde`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Evaluation point, e.g. `1` or `-1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    /// Scalar backend: `auto`, `f64`, or `dd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
}

/// A parsed `.twv` document: presentation, α exponents, matrices, and options.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    /// Display name of the example or input.
    pub name: String,
    /// Generator declarations, in presentation order.
    pub generators: Vec<GeneratorEntry>,
    /// Relator words (a bare word, or `lhs = rhs`).
    pub relators: Vec<String>,
    /// Abelianization exponent a(ℓ) per link component.
    pub alpha: Vec<i64>,
    /// Generator images, one per generator, in any order.
    pub matrices: Vec<MatrixEntry>,
    /// Per-component lift signs, e.g. `"+-"`; all `+` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<String>,
    /// Optional run settings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

/// A document resolved at scalar precision `R`, ready for the pipeline.
#[derive(Clone, Debug)]
pub struct ResolvedDocument<R> {
    /// The group presentation.
    pub presentation: Presentation,
    /// Warnings from relator parsing (e.g. relators that reduce to identity).
    pub warnings: Vec<String>,
    /// The abelianization map.
    pub alpha: AlphaMap,
    /// Generator images at precision `R`, in presentation order.
    pub rep: Sl2Rep<R>,
    /// Lift signs (all `+` when the document gives none).
    pub signs: SignAssignment,
}

impl InputDocument {
    /// Parses document text; schema violations carry the JSON error message.
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Schema(e.to_string()))
    }

    /// Emits the canonical form: pretty JSON plus a trailing newline.
    pub fn emit(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serializes");
        out.push('\n');
        out
    }

    /// Resolves the document at scalar precision `R`.
    ///
    /// This checks everything structural — generator/matrix pairing, decimal
    /// entries, relator words, α exponent count, sign length — but does not
    /// judge numerical quality (unimodularity, relator residuals); that is
    /// representation verification, a separate step with its own report.
    pub fn resolve<R: Real>(&self) -> Result<ResolvedDocument<R>, DocumentError> {
        let generators: Vec<Generator> = self
            .generators
            .iter()
            .map(|g| Generator {
                name: g.name.clone(),
                component: g.component,
            })
            .collect();
        let (presentation, warnings) = parse_presentation(generators, &self.relators)?;
        let alpha = AlphaMap::new(&presentation, self.alpha.clone())?;
        let images = self.images::<R>(&presentation)?;
        let rep = Sl2Rep::new(images)?;
        let signs = match &self.signs {
            None => SignAssignment::all_plus(presentation.component_count),
            Some(s) => {
                let parsed = SignAssignment::parse(s)?;
                if parsed.len() != presentation.component_count {
                    return Err(DocumentError::SignLength {
                        signs: s.clone(),
                        expected: presentation.component_count,
                        got: parsed.len(),
                    });
                }
                parsed
            }
        };
        Ok(ResolvedDocument {
            presentation,
            warnings,
            alpha,
            rep,
            signs,
        })
    }

    /// Parses the matrices into images ordered like the presentation.
    fn images<R: Real>(&self, p: &Presentation) -> Result<Vec<CMatrix<R>>, DocumentError> {
        let mut slots: Vec<Option<&MatrixEntry>> = vec![None; p.generators.len()];
        for m in &self.matrices {
            let g = p
                .generator_index(&m.generator)
                .ok_or_else(|| DocumentError::UnknownMatrixGenerator(m.generator.clone()))?;
            if slots[g].is_some() {
                return Err(DocumentError::DuplicateMatrix(m.generator.clone()));
            }
            slots[g] = Some(m);
        }
        let mut images = Vec::with_capacity(slots.len());
        for (g, slot) in slots.iter().enumerate() {
            let entry = slot.ok_or_else(|| {
                DocumentError::MissingMatrix(p.generators[g].name.clone())
            })?;
            let mut mat = CMatrix::zeros(2);
            for (i, row) in entry.entries.iter().enumerate() {
                for (j, pair) in row.iter().enumerate() {
                    let re = parse_entry::<R>(entry, i, j, &pair[0])?;
                    let im = parse_entry::<R>(entry, i, j, &pair[1])?;
                    mat.set(i, j, Complex::new(re, im));
                }
            }
            images.push(mat);
        }
        Ok(images)
    }
}

fn parse_entry<R: Real>(
    entry: &MatrixEntry,
    row: usize,
    col: usize,
    text: &str,
) -> Result<R, DocumentError> {
    R::parse_decimal(text).ok_or_else(|| DocumentError::BadNumber {
        generator: entry.generator.clone(),
        row,
        col,
        text: text.to_string(),
    })
}

/// Formats a complex number as the `[re, im]` decimal-string pair used in
/// documents, at the full precision of `R`.
pub fn entry_pair<R: Real>(z: Complex<R>) -> [String; 2] {
    [z.re.format_decimal(), z.im.format_decimal()]
}
