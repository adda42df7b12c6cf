//! Versioned binary layout shared by index files and analysis caches:
//! a four-byte magic, a `u32` version, then `kind u8, len u32, payload`
//! records. Integers are little-endian and floats are stored as raw bits.

use std::collections::BTreeMap;

use crate::lexdb::{PartOfSpeech, SynsetId};
use crate::weighting::{
    CollectionStats, DocAnalysis, IndexUnit, Scheme, SimMode, TfMode, ThresholdMode, UnitStats, WeightingConfig,
};

use super::{EngineError, Representation};

pub const FORMAT_VERSION: u32 = 1;

pub(crate) const REC_CONFIG: u8 = 1;
pub(crate) const REC_STATS: u8 = 2;
pub(crate) const REC_ANALYSIS: u8 = 3;
pub(crate) const REC_VECTOR: u8 = 4;
pub(crate) const REC_END: u8 = 0xff;

#[derive(Default)]
pub(crate) struct Writer {
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 4]) -> Self {
        let mut w = Writer::default();
        w.buf.extend_from_slice(magic);
        w.u32(FORMAT_VERSION);
        w
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_bits().to_le_bytes());
    }

    pub fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn record(&mut self, kind: u8, f: impl FnOnce(&mut Writer)) {
        let mut inner = Writer::default();
        f(&mut inner);
        self.u8(kind);
        self.u32(inner.buf.len() as u32);
        self.buf.extend_from_slice(&inner.buf);
    }

    pub fn unit(&mut self, u: &IndexUnit) {
        match u {
            IndexUnit::Concept(id) => {
                self.u8(0);
                self.u8(pos_code(id.pos));
                self.u32(id.offset);
            }
            IndexUnit::Orphan(w) => {
                self.u8(1);
                self.str(w);
            }
        }
    }

    pub fn config(&mut self, cfg: &WeightingConfig, rep: Representation) {
        self.f64(cfg.alpha);
        match cfg.threshold {
            ThresholdMode::CollectionMean => {
                self.u8(0);
                self.f64(0.0);
            }
            ThresholdMode::Absolute(s) => {
                self.u8(1);
                self.f64(s);
            }
        }
        self.u8(match cfg.scheme {
            Scheme::CcIdc => 0,
            Scheme::TfIdf => 1,
            Scheme::Bm25 => 2,
        });
        self.f64(cfg.bm25_k1);
        self.f64(cfg.bm25_b);
        self.u8(match cfg.tf_mode {
            TfMode::MaxNormalized => 0,
            TfMode::Raw => 1,
        });
        self.u8(match cfg.sim_mode {
            SimMode::Mean => 0,
            SimMode::RawSum => 1,
        });
        self.u8(match rep {
            Representation::Semantic => 0,
            Representation::Classic => 1,
        });
    }

    pub fn stats(&mut self, s: &CollectionStats) {
        self.u32(s.n_docs);
        self.f64(s.avg_doclen);
        self.f64(s.mean_cc);
        self.f64(s.threshold);
        for map in [&s.df, &s.n_central] {
            self.u32(map.len() as u32);
            for (u, n) in map {
                self.unit(u);
                self.u32(*n);
            }
        }
        self.u32(s.doclen.len() as u32);
        for (id, len) in &s.doclen {
            self.str(id);
            self.f64(*len);
        }
    }

    pub fn analysis(&mut self, a: &DocAnalysis) {
        self.str(&a.doc_id);
        self.u32(a.units.len() as u32);
        for u in &a.units {
            self.unit(&u.unit);
            self.u32(u.tf_raw);
            self.f64(u.sim_norm_sum);
            self.f64(u.sim_raw_sum);
            self.u32(u.n_other);
        }
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    /// Absolute position of `buf[0]` within the file.
    base: usize,
}

impl<'a> Reader<'a> {
    /// Checks magic and version, leaving the reader at the first record.
    pub fn open(buf: &'a [u8], magic: &[u8; 4]) -> Result<Self, EngineError> {
        if buf.len() < 8 || &buf[..4] != magic {
            return Err(EngineError::CorruptIndex(0));
        }
        let mut r = Reader { buf, pos: 4, base: 0 };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(EngineError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        Ok(r)
    }

    /// Absolute position of the next unread byte.
    pub fn offset(&self) -> usize {
        self.base + self.pos
    }

    fn corrupt(&self) -> EngineError {
        EngineError::CorruptIndex(self.base + self.pos)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], EngineError> {
        if self.buf.len() - self.pos < n {
            return Err(self.corrupt());
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, EngineError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, EngineError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }

    pub fn f64(&mut self) -> Result<f64, EngineError> {
        let bits = u64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes"));
        Ok(f64::from_bits(bits))
    }

    pub fn str(&mut self) -> Result<String, EngineError> {
        let at = self.pos;
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| EngineError::CorruptIndex(self.base + at))
    }

    /// Next `(kind, payload reader)`; `None` once the end record is read.
    pub fn record(&mut self) -> Result<Option<(u8, Reader<'a>)>, EngineError> {
        let kind = self.u8()?;
        let len = self.u32()? as usize;
        let start = self.pos;
        let payload = self.take(len)?;
        if kind == REC_END {
            return Ok(None);
        }
        Ok(Some((
            kind,
            Reader {
                buf: payload,
                pos: 0,
                base: self.base + start,
            },
        )))
    }

    pub fn finish(&self) -> Result<(), EngineError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(self.corrupt())
        }
    }

    pub fn unit(&mut self) -> Result<IndexUnit, EngineError> {
        let at = self.pos;
        match self.u8()? {
            0 => {
                let pos = pos_from_code(self.u8()?).ok_or(EngineError::CorruptIndex(self.base + at))?;
                Ok(IndexUnit::Concept(SynsetId::new(pos, self.u32()?)))
            }
            1 => Ok(IndexUnit::Orphan(self.str()?)),
            _ => Err(EngineError::CorruptIndex(self.base + at)),
        }
    }

    pub fn config(&mut self) -> Result<(WeightingConfig, Representation), EngineError> {
        let at = self.base + self.pos;
        let bad = || EngineError::CorruptIndex(at);
        let alpha = self.f64()?;
        let threshold = match (self.u8()?, self.f64()?) {
            (0, _) => ThresholdMode::CollectionMean,
            (1, s) => ThresholdMode::Absolute(s),
            _ => return Err(bad()),
        };
        let scheme = match self.u8()? {
            0 => Scheme::CcIdc,
            1 => Scheme::TfIdf,
            2 => Scheme::Bm25,
            _ => return Err(bad()),
        };
        let bm25_k1 = self.f64()?;
        let bm25_b = self.f64()?;
        let tf_mode = match self.u8()? {
            0 => TfMode::MaxNormalized,
            1 => TfMode::Raw,
            _ => return Err(bad()),
        };
        let sim_mode = match self.u8()? {
            0 => SimMode::Mean,
            1 => SimMode::RawSum,
            _ => return Err(bad()),
        };
        let rep = match self.u8()? {
            0 => Representation::Semantic,
            1 => Representation::Classic,
            _ => return Err(bad()),
        };
        Ok((
            WeightingConfig {
                alpha,
                threshold,
                scheme,
                bm25_k1,
                bm25_b,
                tf_mode,
                sim_mode,
            },
            rep,
        ))
    }

    pub fn stats(&mut self) -> Result<CollectionStats, EngineError> {
        let n_docs = self.u32()?;
        let avg_doclen = self.f64()?;
        let mean_cc = self.f64()?;
        let threshold = self.f64()?;
        let mut maps: [BTreeMap<IndexUnit, u32>; 2] = Default::default();
        for map in maps.iter_mut() {
            for _ in 0..self.u32()? {
                let u = self.unit()?;
                map.insert(u, self.u32()?);
            }
        }
        let [df, n_central] = maps;
        let mut doclen = BTreeMap::new();
        for _ in 0..self.u32()? {
            let id = self.str()?;
            doclen.insert(id, self.f64()?);
        }
        Ok(CollectionStats {
            n_docs,
            df,
            n_central,
            doclen,
            avg_doclen,
            mean_cc,
            threshold,
        })
    }

    pub fn analysis(&mut self) -> Result<DocAnalysis, EngineError> {
        let doc_id = self.str()?;
        let n = self.u32()?;
        let mut units = Vec::with_capacity(n.min(1 << 16) as usize);
        for _ in 0..n {
            units.push(UnitStats {
                unit: self.unit()?,
                tf_raw: self.u32()?,
                sim_norm_sum: self.f64()?,
                sim_raw_sum: self.f64()?,
                n_other: self.u32()?,
            });
        }
        Ok(DocAnalysis { doc_id, units })
    }
}

fn pos_code(p: PartOfSpeech) -> u8 {
    p as u8
}

fn pos_from_code(c: u8) -> Option<PartOfSpeech> {
    PartOfSpeech::ALL.get(c as usize).copied()
}

const CACHE_MAGIC: &[u8; 4] = b"CANL";

/// Serializes disambiguated analyses for reuse across weighting runs.
pub fn write_analyses(docs: &[DocAnalysis], key: &str) -> Vec<u8> {
    let mut w = Writer::new(CACHE_MAGIC);
    w.record(REC_CONFIG, |w| w.str(key));
    for d in docs {
        w.record(REC_ANALYSIS, |w| w.analysis(d));
    }
    w.record(REC_END, |_| {});
    w.buf
}

/// Reads a cache written by [`write_analyses`]; `Ok(None)` when its key differs.
pub fn read_analyses(bytes: &[u8], key: &str) -> Result<Option<Vec<DocAnalysis>>, EngineError> {
    let mut r = Reader::open(bytes, CACHE_MAGIC)?;
    let mut docs = Vec::new();
    let mut key_ok = false;
    while let Some((kind, mut rec)) = r.record()? {
        match kind {
            REC_CONFIG => key_ok = rec.str()? == key,
            REC_ANALYSIS => docs.push(rec.analysis()?),
            _ => return Err(rec.corrupt()),
        }
        rec.finish()?;
    }
    r.finish()?;
    Ok(key_ok.then_some(docs))
}
