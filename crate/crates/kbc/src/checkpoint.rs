//! Binary parameter checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "KBCPARAM" | u32 version | u8 kind | u8 literal_complex
//! | u8 has_layout | u64 scalars | u64 pairs | u64 dim
//! | u64 entities | u64 relations | f64 × entity table | f64 × relation table
//! ```

use std::fs;
use std::path::Path;

use kbc_core::{BlockLayout, ModelKind, ModelOptions, ModelParams, ModelSpec, Scorer, TransNorm};

use crate::error::{FormatError, Result};

const MAGIC: &[u8; 8] = b"KBCPARAM";
const VERSION: u32 = 1;

fn kind_code(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::Rescal => 0,
        ModelKind::TransE(TransNorm::L1) => 1,
        ModelKind::TransE(TransNorm::L2) => 2,
        ModelKind::DistMult => 3,
        ModelKind::ComplEx => 4,
        ModelKind::Analogy => 5,
    }
}

fn kind_from_code(code: u8) -> Option<ModelKind> {
    ModelKind::ALL.into_iter().find(|&k| kind_code(k) == code)
}

pub fn to_bytes(params: &ModelParams) -> Vec<u8> {
    let spec = params.spec();
    let (ents, rels) = (params.entity_table(), params.relation_table());
    let mut out = Vec::with_capacity(64 + 8 * (ents.len() + rels.len()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind_code(spec.kind));
    out.push(spec.options.literal_complex as u8);
    let layout = spec.options.layout;
    out.push(layout.is_some() as u8);
    let l = layout.unwrap_or(BlockLayout { scalars: 0, pairs: 0 });
    for v in [l.scalars, l.pairs, spec.dim, params.num_entities(), params.num_relations()] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    for v in ents.iter().chain(rels) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        if self.buf.len() < n {
            return Err("truncated checkpoint".into());
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> std::result::Result<u8, String> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> std::result::Result<usize, String> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| format!("size {v} does not fit in memory"))
    }

    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        let bytes = n.checked_mul(8).ok_or("table size overflows")?;
        Ok(self.take(bytes)?.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

fn decode(bytes: &[u8]) -> std::result::Result<ModelParams, String> {
    let mut r = Reader { buf: bytes };
    if r.take(8)? != MAGIC {
        return Err("not a parameter checkpoint".into());
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(format!("unsupported checkpoint version {version}"));
    }
    let code = r.u8()?;
    let kind = kind_from_code(code).ok_or_else(|| format!("unknown model code {code}"))?;
    let literal_complex = r.u8()? != 0;
    let has_layout = r.u8()? != 0;
    let (scalars, pairs, dim, ne, nr) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?, r.u64()?);
    let layout = has_layout.then_some(BlockLayout { scalars, pairs });
    let spec = ModelSpec::new(kind, dim).with_options(ModelOptions { layout, literal_complex });
    spec.validate().map_err(|e| e.to_string())?;
    let ew = ne.checked_mul(spec.entity_width()).ok_or("table size overflows")?;
    let rw = nr.checked_mul(spec.relation_width()).ok_or("table size overflows")?;
    let ents = r.f64s(ew)?;
    let rels = r.f64s(rw)?;
    if !r.buf.is_empty() {
        return Err(format!("{} trailing bytes", r.buf.len()));
    }
    ModelParams::from_parts(spec, ne, nr, ents, rels).map_err(|e| e.to_string())
}

pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<ModelParams> {
    decode(bytes).map_err(|message| FormatError::Checkpoint { path: path.to_path_buf(), message })
}

pub fn save(path: &Path, params: &ModelParams) -> Result<()> {
    fs::write(path, to_bytes(params)).map_err(|e| FormatError::io(path, e))
}

pub fn load(path: &Path) -> Result<ModelParams> {
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    from_bytes(&bytes, path)
}
