//! Versioned binary envelope and per-type codecs.
//!
//! Every file the CLI reads or writes is an envelope: magic `CEFE`, a
//! little-endian `u16` version, a four-byte type tag, a `u64` payload
//! length, and the payload. Unknown tags are rejected with the tag echoed.
//!
//! Quantum registers serialize as bit-packed stabilizer tableaus behind a
//! SIMULATION flag byte: file-based transport of "quantum" state is a
//! modeling convenience of the simulator and is marked as such in the very
//! bytes.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::base::{LweCiphertext, LweParams, LwePublicKey, LweSecretKey, SkeCiphertext, SkeKey};
use crate::bits::BitVec;
use crate::cd::css::{CssCert, CssCiphertext, CssClassicalBlock, CssProfile, CssVk, CssVkBlock};
use crate::cd::onetime::CdKey;
use crate::cd::qrom::{QromCiphertext, QromProfile, QromVk};
use crate::cd::BackendCiphertext;
use crate::fe::adaptive::{FeadCiphertext, FeadCert, FeadMpk, FeadMsk, FeadSkF, FeadVk};
use crate::fe::bounded::{FeqCert, FeqCiphertext, FeqMpk, FeqMsk, FeqParams, FeqSkC, FeqVk};
use crate::fe::one_bounded::{Fe1Cert, Fe1Ciphertext, Fe1Mpk, Fe1Msk, Fe1Profile, Fe1SkF, Fe1Vk};
use crate::field::FieldElem;
use crate::garble::scheme::{
    GarbledCircuit, GarbledGate, GarbledRow, GateVk, GcCert, GcProfile, GcVk, LabelSet, OutputMap,
};
use crate::garble::Topology;
use crate::gf2::{BitMatrix, CssPair, LinearCode};
use crate::qsim::{QuantumRegister, TableauSnapshot};
use crate::rnce::{RnceCert, RnceCiphertext, RnceMsk, RncePk, RnceProfile, RnceSk, RnceVk};

pub const MAGIC: [u8; 4] = *b"CEFE";
pub const VERSION: u16 = 1;
/// Flag byte ahead of every serialized tableau.
pub const SIMULATION_FLAG: u8 = b'S';

#[derive(Debug, Error)]
pub enum WireError {
    #[error("bad magic (not a CEFE envelope)")]
    BadMagic,
    #[error("unsupported envelope version {0}")]
    BadVersion(u16),
    #[error("unknown type tag {0:?}")]
    UnknownTag(String),
    #[error("tag mismatch: expected {want}, found {got}")]
    TagMismatch { want: String, got: String },
    #[error("truncated envelope")]
    Truncated,
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("register: {0}")]
    Qsim(#[from] crate::qsim::QsimError),
}

macro_rules! type_tags {
    ($($name:ident = $lit:literal),* $(,)?) => {
        /// Envelope type tags; one per serializable artifact kind.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum TypeTag {
            $($name,)*
        }

        impl TypeTag {
            pub const ALL: &'static [TypeTag] = &[$(TypeTag::$name,)*];

            pub fn bytes(self) -> [u8; 4] {
                match self {
                    $(TypeTag::$name => *$lit,)*
                }
            }

            pub fn from_bytes(b: [u8; 4]) -> Option<Self> {
                match &b {
                    $($lit => Some(TypeTag::$name),)*
                    _ => None,
                }
            }

            pub fn as_str(self) -> &'static str {
                std::str::from_utf8(match self {
                    $(TypeTag::$name => $lit,)*
                })
                .unwrap()
            }
        }
    };
}

type_tags! {
    SkeKey = b"SKKY",
    LwePk = b"LWPK",
    LweSk = b"LWSK",
    CeSke = b"CESK",
    CePke = b"CEPK",
    CeVk = b"CEVK",
    CeCert = b"CECT",
    RncePk = b"RNPK",
    RnceMsk = b"RNMS",
    RnceSk = b"RNSK",
    RnceCt = b"RNCE",
    RnceVk = b"RNVK",
    RnceCert = b"RNCT",
    Labels = b"GCLB",
    Garbled = b"GCIR",
    GcVk = b"GCVK",
    GcCert = b"GCCT",
    Fe1Mpk = b"F1PK",
    Fe1Msk = b"F1MS",
    Fe1Sk = b"F1SK",
    Fe1Ct = b"FE1C",
    Fe1Vk = b"F1VK",
    Fe1Cert = b"F1CT",
    FeadMpk = b"FAPK",
    FeadMsk = b"FAMS",
    FeadSk = b"FASK",
    FeadCt = b"FEAD",
    FeadVk = b"FAVK",
    FeadCert = b"FACT",
    FeqMpk = b"FQPK",
    FeqMsk = b"FQMS",
    FeqSk = b"FQSK",
    FeqCt = b"FEQC",
    FeqVk = b"FQVK",
    FeqCert = b"FQCT",
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub tag: TypeTag,
    pub payload: Vec<u8>,
}

impl Envelope {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.payload.len() + 18);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.tag.bytes());
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, WireError> {
        if data.len() < 18 {
            return Err(WireError::Truncated);
        }
        if data[0..4] != MAGIC {
            return Err(WireError::BadMagic);
        }
        let version = u16::from_le_bytes([data[4], data[5]]);
        if version != VERSION {
            return Err(WireError::BadVersion(version));
        }
        let raw_tag = [data[6], data[7], data[8], data[9]];
        let tag = TypeTag::from_bytes(raw_tag)
            .ok_or_else(|| WireError::UnknownTag(String::from_utf8_lossy(&raw_tag).into_owned()))?;
        let len = u64::from_le_bytes(data[10..18].try_into().unwrap()) as usize;
        if data.len() != 18 + len {
            return Err(WireError::Truncated);
        }
        Ok(Envelope {
            tag,
            payload: data[18..].to_vec(),
        })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), WireError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, WireError> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn expect(self, tag: TypeTag) -> Result<Vec<u8>, WireError> {
        if self.tag != tag {
            return Err(WireError::TagMismatch {
                want: tag.as_str().into(),
                got: self.tag.as_str().into(),
            });
        }
        Ok(self.payload)
    }
}

// ---------------------------------------------------------------------------
// primitive writer/reader

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn bool(&mut self, v: bool) {
        self.buf.push(u8::from(v));
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    pub fn bytes(&mut self, v: &[u8]) {
        self.usize(v.len());
        self.buf.extend_from_slice(v);
    }

    pub fn bitvec(&mut self, v: &BitVec) {
        self.usize(v.len());
        self.buf.extend_from_slice(&v.to_bytes());
    }
}

pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.pos + n > self.data.len() {
            return Err(WireError::Truncated);
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn done(&self) -> Result<(), WireError> {
        if self.pos == self.data.len() {
            Ok(())
        } else {
            Err(WireError::Malformed(format!(
                "{} trailing bytes",
                self.data.len() - self.pos
            )))
        }
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn bool(&mut self) -> Result<bool, WireError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(WireError::Malformed(format!("bad bool byte {v}"))),
        }
    }

    pub fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn usize(&mut self) -> Result<usize, WireError> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| WireError::Malformed("length overflow".into()))
    }

    pub fn bounded_len(&mut self, per_item: usize) -> Result<usize, WireError> {
        let n = self.usize()?;
        if per_item > 0 && n > self.data.len().saturating_sub(self.pos) / per_item + 1 {
            return Err(WireError::Malformed("implausible length".into()));
        }
        Ok(n)
    }

    pub fn bytes(&mut self) -> Result<Vec<u8>, WireError> {
        let n = self.bounded_len(1)?;
        Ok(self.take(n)?.to_vec())
    }

    pub fn bitvec(&mut self) -> Result<BitVec, WireError> {
        let bits = self.usize()?;
        let bytes = bits.div_ceil(8);
        Ok(BitVec::from_bytes(self.take(bytes)?, bits))
    }
}

fn write_vec<T>(w: &mut Writer, items: &[T], f: impl Fn(&mut Writer, &T)) {
    w.usize(items.len());
    for it in items {
        f(w, it);
    }
}

fn read_vec<T>(
    r: &mut Reader,
    f: impl Fn(&mut Reader) -> Result<T, WireError>,
) -> Result<Vec<T>, WireError> {
    let n = r.bounded_len(1)?;
    let mut out = Vec::with_capacity(n.min(1 << 16));
    for _ in 0..n {
        out.push(f(r)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// qsim

pub fn write_register(w: &mut Writer, reg: &QuantumRegister) -> Result<(), WireError> {
    let snap = reg.export()?;
    w.u8(SIMULATION_FLAG);
    w.usize(snap.n);
    write_vec(w, &snap.x, |w, v| w.u64(*v));
    write_vec(w, &snap.z, |w, v| w.u64(*v));
    w.bytes(&snap.r);
    write_vec(w, &snap.order, |w, v| w.usize(*v));
    Ok(())
}

pub fn read_register(r: &mut Reader) -> Result<QuantumRegister, WireError> {
    let flag = r.u8()?;
    if flag != SIMULATION_FLAG {
        return Err(WireError::Malformed("missing simulation flag".into()));
    }
    let n = r.usize()?;
    let x = read_vec(r, |r| r.u64())?;
    let z = read_vec(r, |r| r.u64())?;
    let phases = r.bytes()?;
    let order = read_vec(r, |r| r.usize())?;
    Ok(QuantumRegister::import(TableauSnapshot {
        n,
        x,
        z,
        r: phases,
        order,
    })?)
}

// ---------------------------------------------------------------------------
// base

pub fn write_ske_key(w: &mut Writer, k: &SkeKey) {
    w.bytes(&k.0);
}

pub fn read_ske_key(r: &mut Reader) -> Result<SkeKey, WireError> {
    Ok(SkeKey(r.bytes()?))
}

pub fn write_ske_ct(w: &mut Writer, ct: &SkeCiphertext) {
    w.buf_extend(&ct.nonce);
    w.bytes(&ct.masked);
}

impl Writer {
    fn buf_extend(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }
}

pub fn read_ske_ct(r: &mut Reader) -> Result<SkeCiphertext, WireError> {
    let nonce: [u8; 16] = r.take(16)?.try_into().unwrap();
    Ok(SkeCiphertext {
        nonce,
        masked: r.bytes()?,
    })
}

pub fn write_lwe_params(w: &mut Writer, p: &LweParams) {
    w.usize(p.n);
    w.u64(p.q);
    w.usize(p.m);
    w.u64(p.beta);
}

pub fn read_lwe_params(r: &mut Reader) -> Result<LweParams, WireError> {
    Ok(LweParams {
        n: r.usize()?,
        q: r.u64()?,
        m: r.usize()?,
        beta: r.u64()?,
    })
}

pub fn write_lwe_pk(w: &mut Writer, pk: &LwePublicKey) {
    write_lwe_params(w, &pk.params);
    w.buf_extend(&pk.a_seed);
    write_vec(w, &pk.b, |w, v| w.u64(*v));
}

pub fn read_lwe_pk(r: &mut Reader) -> Result<LwePublicKey, WireError> {
    let params = read_lwe_params(r)?;
    let a_seed: [u8; 32] = r.take(32)?.try_into().unwrap();
    let b = read_vec(r, |r| r.u64())?;
    Ok(LwePublicKey { params, a_seed, b })
}

pub fn write_lwe_sk(w: &mut Writer, sk: &LweSecretKey) {
    write_lwe_params(w, &sk.params);
    write_vec(w, &sk.s, |w, v| w.u64(*v));
}

pub fn read_lwe_sk(r: &mut Reader) -> Result<LweSecretKey, WireError> {
    Ok(LweSecretKey {
        params: read_lwe_params(r)?,
        s: read_vec(r, |r| r.u64())?,
    })
}

fn write_lwe_ct(w: &mut Writer, ct: &LweCiphertext) {
    write_vec(w, &ct.u, |w, v| w.u64(*v));
    w.u64(ct.c);
}

fn read_lwe_ct(r: &mut Reader) -> Result<LweCiphertext, WireError> {
    Ok(LweCiphertext {
        u: read_vec(r, |r| r.u64())?,
        c: r.u64()?,
    })
}

// ---------------------------------------------------------------------------
// cd

pub fn write_cd_key(w: &mut Writer, k: &CdKey) {
    w.usize(k.n());
    w.usize(k.w());
    w.bytes(&k.to_bytes());
}

pub fn read_cd_key(r: &mut Reader) -> Result<CdKey, WireError> {
    let n = r.usize()?;
    let weight = r.usize()?;
    let bytes = r.bytes()?;
    CdKey::from_bytes(n, weight, &bytes)
        .ok_or_else(|| WireError::Malformed("invalid certified-deletion key".into()))
}

fn write_backend_ct(w: &mut Writer, ct: &BackendCiphertext) {
    match ct {
        BackendCiphertext::Ske(c) => {
            w.u8(0);
            write_ske_ct(w, c);
        }
        BackendCiphertext::Pke(cs) => {
            w.u8(1);
            write_vec(w, cs, write_lwe_ct);
        }
    }
}

fn read_backend_ct(r: &mut Reader) -> Result<BackendCiphertext, WireError> {
    match r.u8()? {
        0 => Ok(BackendCiphertext::Ske(read_ske_ct(r)?)),
        1 => Ok(BackendCiphertext::Pke(read_vec(r, read_lwe_ct)?)),
        v => Err(WireError::Malformed(format!("bad backend kind {v}"))),
    }
}

pub fn write_qrom_profile(w: &mut Writer, p: &QromProfile) {
    w.usize(p.w);
    w.usize(p.r_bytes);
}

pub fn read_qrom_profile(r: &mut Reader) -> Result<QromProfile, WireError> {
    Ok(QromProfile {
        w: r.usize()?,
        r_bytes: r.usize()?,
    })
}

pub fn write_qrom_vk(w: &mut Writer, vk: &QromVk) {
    write_cd_key(w, &vk.cd_key);
}

pub fn read_qrom_vk(r: &mut Reader) -> Result<QromVk, WireError> {
    Ok(QromVk {
        cd_key: read_cd_key(r)?,
    })
}

pub fn write_qrom_ct(w: &mut Writer, ct: &QromCiphertext) -> Result<(), WireError> {
    write_qrom_profile(w, &ct.profile);
    w.bytes(&ct.h);
    write_backend_ct(w, &ct.backend);
    write_register(w, &ct.quantum)
}

pub fn read_qrom_ct(r: &mut Reader) -> Result<QromCiphertext, WireError> {
    Ok(QromCiphertext {
        profile: read_qrom_profile(r)?,
        h: r.bytes()?,
        backend: read_backend_ct(r)?,
        quantum: read_register(r)?,
    })
}

fn write_linear_code(w: &mut Writer, c: &LinearCode) {
    w.usize(c.length());
    w.usize(c.dimension());
    for i in 0..c.dimension() {
        w.bitvec(c.generator().row(i));
    }
}

fn read_linear_code(r: &mut Reader) -> Result<LinearCode, WireError> {
    let length = r.usize()?;
    let dim = r.bounded_len(1)?;
    let mut rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        let row = r.bitvec()?;
        if row.len() != length {
            return Err(WireError::Malformed("generator row length".into()));
        }
        rows.push(row);
    }
    LinearCode::from_generator(BitMatrix::from_rows(rows))
        .map_err(|e| WireError::Malformed(e.to_string()))
}

pub fn write_css_profile(w: &mut Writer, p: &CssProfile) {
    write_linear_code(w, p.pair.c1());
    write_linear_code(w, p.pair.c2());
    w.usize(p.pair.t());
    w.bool(p.pair.distance_verified());
    w.usize(p.p);
}

pub fn read_css_profile(r: &mut Reader) -> Result<CssProfile, WireError> {
    let c1 = read_linear_code(r)?;
    let c2 = read_linear_code(r)?;
    let t = r.usize()?;
    let verified = r.bool()?;
    let p = r.usize()?;
    let pair = if verified {
        CssPair::verified(c1, c2, t)
    } else {
        CssPair::with_asserted_distance(c1, c2, t)
    }
    .map_err(|e| WireError::Malformed(e.to_string()))?;
    Ok(CssProfile { pair, p })
}

pub fn write_css_vk(w: &mut Writer, vk: &CssVk) {
    write_vec(w, &vk.blocks, |w, b| {
        w.bitvec(&b.b_mask);
        write_vec(w, &b.q_set, |w, v| w.usize(*v));
        w.bitvec(&b.r);
    });
}

pub fn read_css_vk(r: &mut Reader) -> Result<CssVk, WireError> {
    let blocks = read_vec(r, |r| {
        Ok(CssVkBlock {
            b_mask: r.bitvec()?,
            q_set: read_vec(r, |r| r.usize())?,
            r: r.bitvec()?,
        })
    })?;
    Ok(CssVk { blocks })
}

pub fn write_css_ct(w: &mut Writer, ct: &CssCiphertext) -> Result<(), WireError> {
    w.usize(ct.p);
    w.usize(ct.code_len);
    write_vec(w, &ct.blocks, |w, b| {
        write_backend_ct(w, &b.backend);
        w.bitvec(&b.u);
        w.bitvec(&b.h);
    });
    write_register(w, &ct.quantum)
}

pub fn read_css_ct(r: &mut Reader) -> Result<CssCiphertext, WireError> {
    let p = r.usize()?;
    let code_len = r.usize()?;
    let blocks = read_vec(r, |r| {
        Ok(CssClassicalBlock {
            backend: read_backend_ct(r)?,
            u: r.bitvec()?,
            h: r.bitvec()?,
        })
    })?;
    let quantum = read_register(r)?;
    Ok(CssCiphertext {
        blocks,
        quantum,
        p,
        code_len,
    })
}

pub fn write_css_cert(w: &mut Writer, cert: &CssCert) -> Result<(), WireError> {
    write_register(w, &cert.quantum)
}

pub fn read_css_cert(r: &mut Reader) -> Result<CssCert, WireError> {
    Ok(CssCert {
        quantum: read_register(r)?,
    })
}

// ---------------------------------------------------------------------------
// rnce

pub fn write_rnce_profile(w: &mut Writer, p: &RnceProfile) {
    write_lwe_params(w, &p.lwe);
    write_qrom_profile(w, &p.qrom);
}

pub fn read_rnce_profile(r: &mut Reader) -> Result<RnceProfile, WireError> {
    Ok(RnceProfile {
        lwe: read_lwe_params(r)?,
        qrom: read_qrom_profile(r)?,
    })
}

pub fn write_rnce_pk(w: &mut Writer, pk: &RncePk) {
    write_rnce_profile(w, &pk.profile);
    write_vec(w, &pk.columns, |w, [a, b]| {
        write_lwe_pk(w, a);
        write_lwe_pk(w, b);
    });
}

pub fn read_rnce_pk(r: &mut Reader) -> Result<RncePk, WireError> {
    Ok(RncePk {
        profile: read_rnce_profile(r)?,
        columns: read_vec(r, |r| Ok([read_lwe_pk(r)?, read_lwe_pk(r)?]))?,
    })
}

pub fn write_rnce_msk(w: &mut Writer, msk: &RnceMsk) {
    write_vec(w, &msk.columns, |w, [a, b]| {
        write_lwe_sk(w, a);
        write_lwe_sk(w, b);
    });
}

pub fn read_rnce_msk(r: &mut Reader) -> Result<RnceMsk, WireError> {
    Ok(RnceMsk {
        columns: read_vec(r, |r| Ok([read_lwe_sk(r)?, read_lwe_sk(r)?]))?,
    })
}

pub fn write_rnce_sk(w: &mut Writer, sk: &RnceSk) {
    w.bitvec(&sk.selector);
    write_vec(w, &sk.keys, write_lwe_sk);
}

pub fn read_rnce_sk(r: &mut Reader) -> Result<RnceSk, WireError> {
    Ok(RnceSk {
        selector: r.bitvec()?,
        keys: read_vec(r, read_lwe_sk)?,
    })
}

pub fn write_rnce_vk(w: &mut Writer, vk: &RnceVk) {
    write_vec(w, &vk.components, write_qrom_vk);
}

pub fn read_rnce_vk(r: &mut Reader) -> Result<RnceVk, WireError> {
    Ok(RnceVk {
        components: read_vec(r, read_qrom_vk)?,
    })
}

pub fn write_rnce_ct(w: &mut Writer, ct: &RnceCiphertext) -> Result<(), WireError> {
    w.usize(ct.components.len());
    for c in &ct.components {
        write_qrom_ct(w, c)?;
    }
    Ok(())
}

pub fn read_rnce_ct(r: &mut Reader) -> Result<RnceCiphertext, WireError> {
    Ok(RnceCiphertext {
        components: read_vec(r, read_qrom_ct)?,
    })
}

pub fn write_rnce_cert(w: &mut Writer, cert: &RnceCert) {
    write_vec(w, &cert.components, |w, c| w.bitvec(c));
}

pub fn read_rnce_cert(r: &mut Reader) -> Result<RnceCert, WireError> {
    Ok(RnceCert {
        components: read_vec(r, |r| r.bitvec())?,
    })
}

// ---------------------------------------------------------------------------
// garble

pub fn write_gc_profile(w: &mut Writer, p: &GcProfile) {
    w.usize(p.key_bytes);
    write_qrom_profile(w, &p.qrom);
}

pub fn read_gc_profile(r: &mut Reader) -> Result<GcProfile, WireError> {
    Ok(GcProfile {
        key_bytes: r.usize()?,
        qrom: read_qrom_profile(r)?,
    })
}

fn write_topology(w: &mut Writer, t: &Topology) {
    w.usize(t.inputs);
    w.usize(t.wires);
    write_vec(w, &t.gates, |w, &(level, a, b, c)| {
        w.u64(level as u64);
        w.usize(a);
        w.usize(b);
        w.usize(c);
    });
    write_vec(w, &t.outputs, |w, v| w.usize(*v));
}

fn read_topology(r: &mut Reader) -> Result<Topology, WireError> {
    Ok(Topology {
        inputs: r.usize()?,
        wires: r.usize()?,
        gates: read_vec(r, |r| {
            Ok((r.u64()? as u32, r.usize()?, r.usize()?, r.usize()?))
        })?,
        outputs: read_vec(r, |r| r.usize())?,
    })
}

pub fn write_labels(w: &mut Writer, l: &LabelSet) {
    write_vec(w, &l.pairs, |w, [a, b]| {
        write_ske_key(w, a);
        write_ske_key(w, b);
    });
}

pub fn read_labels(r: &mut Reader) -> Result<LabelSet, WireError> {
    Ok(LabelSet {
        pairs: read_vec(r, |r| Ok([read_ske_key(r)?, read_ske_key(r)?]))?,
    })
}

pub fn write_garbled(w: &mut Writer, gc: &GarbledCircuit) -> Result<(), WireError> {
    write_gc_profile(w, &gc.profile);
    write_topology(w, &gc.topology);
    w.usize(gc.gates.len());
    for gate in &gc.gates {
        w.usize(gate.rows.len());
        for row in &gate.rows {
            write_qrom_ct(w, &row.ct_a)?;
            write_qrom_ct(w, &row.ct_b)?;
        }
    }
    write_vec(w, &gc.outputs, |w, o| {
        for (k, bit) in &o.entries {
            write_ske_key(w, k);
            w.bool(*bit);
        }
    });
    Ok(())
}

pub fn read_garbled(r: &mut Reader) -> Result<GarbledCircuit, WireError> {
    let profile = read_gc_profile(r)?;
    let topology = read_topology(r)?;
    let gates = read_vec(r, |r| {
        let rows = read_vec(r, |r| {
            Ok(GarbledRow {
                ct_a: read_qrom_ct(r)?,
                ct_b: read_qrom_ct(r)?,
            })
        })?;
        Ok(GarbledGate { rows })
    })?;
    let outputs = read_vec(r, |r| {
        let k0 = read_ske_key(r)?;
        let b0 = r.bool()?;
        let k1 = read_ske_key(r)?;
        let b1 = r.bool()?;
        Ok(OutputMap {
            entries: [(k0, b0), (k1, b1)],
        })
    })?;
    Ok(GarbledCircuit {
        topology,
        gates,
        outputs,
        profile,
    })
}

pub fn write_gc_vk(w: &mut Writer, vk: &GcVk) {
    write_vec(w, &vk.gates, |w, g| {
        write_vec(w, &g.rows, |w, (a, b)| {
            write_qrom_vk(w, a);
            write_qrom_vk(w, b);
        });
    });
}

pub fn read_gc_vk(r: &mut Reader) -> Result<GcVk, WireError> {
    Ok(GcVk {
        gates: read_vec(r, |r| {
            Ok(GateVk {
                rows: read_vec(r, |r| Ok((read_qrom_vk(r)?, read_qrom_vk(r)?)))?,
            })
        })?,
    })
}

pub fn write_gc_cert(w: &mut Writer, cert: &GcCert) {
    write_vec(w, &cert.gates, |w, rows| {
        write_vec(w, rows, |w, (a, b)| {
            w.bitvec(a);
            w.bitvec(b);
        });
    });
}

pub fn read_gc_cert(r: &mut Reader) -> Result<GcCert, WireError> {
    Ok(GcCert {
        gates: read_vec(r, |r| read_vec(r, |r| Ok((r.bitvec()?, r.bitvec()?))))?,
    })
}

// ---------------------------------------------------------------------------
// fe

pub fn write_fe1_profile(w: &mut Writer, p: &Fe1Profile) {
    write_gc_profile(w, &p.gc);
    write_lwe_params(w, &p.lwe);
}

pub fn read_fe1_profile(r: &mut Reader) -> Result<Fe1Profile, WireError> {
    Ok(Fe1Profile {
        gc: read_gc_profile(r)?,
        lwe: read_lwe_params(r)?,
    })
}

pub fn write_fe1_mpk(w: &mut Writer, mpk: &Fe1Mpk) {
    write_vec(w, &mpk.columns, |w, [a, b]| {
        write_lwe_pk(w, a);
        write_lwe_pk(w, b);
    });
}

pub fn read_fe1_mpk(r: &mut Reader) -> Result<Fe1Mpk, WireError> {
    Ok(Fe1Mpk {
        columns: read_vec(r, |r| Ok([read_lwe_pk(r)?, read_lwe_pk(r)?]))?,
    })
}

pub fn write_fe1_msk(w: &mut Writer, msk: &Fe1Msk) {
    write_vec(w, &msk.columns, |w, [a, b]| {
        write_lwe_sk(w, a);
        write_lwe_sk(w, b);
    });
}

pub fn read_fe1_msk(r: &mut Reader) -> Result<Fe1Msk, WireError> {
    Ok(Fe1Msk {
        columns: read_vec(r, |r| Ok([read_lwe_sk(r)?, read_lwe_sk(r)?]))?,
    })
}

pub fn write_fe1_sk(w: &mut Writer, sk: &Fe1SkF) {
    w.bitvec(&sk.f_bits);
    write_vec(w, &sk.keys, write_lwe_sk);
}

pub fn read_fe1_sk(r: &mut Reader) -> Result<Fe1SkF, WireError> {
    Ok(Fe1SkF {
        f_bits: r.bitvec()?,
        keys: read_vec(r, read_lwe_sk)?,
    })
}

pub fn write_fe1_ct(w: &mut Writer, ct: &Fe1Ciphertext) -> Result<(), WireError> {
    write_garbled(w, &ct.gc)?;
    w.usize(ct.label_cts.len());
    for c in &ct.label_cts {
        write_qrom_ct(w, c)?;
    }
    Ok(())
}

pub fn read_fe1_ct(r: &mut Reader) -> Result<Fe1Ciphertext, WireError> {
    Ok(Fe1Ciphertext {
        gc: read_garbled(r)?,
        label_cts: read_vec(r, read_qrom_ct)?,
    })
}

pub fn write_fe1_vk(w: &mut Writer, vk: &Fe1Vk) {
    write_gc_vk(w, &vk.gc_vk);
    write_vec(w, &vk.label_vks, write_qrom_vk);
}

pub fn read_fe1_vk(r: &mut Reader) -> Result<Fe1Vk, WireError> {
    Ok(Fe1Vk {
        gc_vk: read_gc_vk(r)?,
        label_vks: read_vec(r, read_qrom_vk)?,
    })
}

pub fn write_fe1_cert(w: &mut Writer, c: &Fe1Cert) {
    write_gc_cert(w, &c.gc_cert);
    write_vec(w, &c.label_certs, |w, v| w.bitvec(v));
}

pub fn read_fe1_cert(r: &mut Reader) -> Result<Fe1Cert, WireError> {
    Ok(Fe1Cert {
        gc_cert: read_gc_cert(r)?,
        label_certs: read_vec(r, |r| r.bitvec())?,
    })
}

pub fn write_fead_mpk(w: &mut Writer, mpk: &FeadMpk) {
    write_fe1_mpk(w, &mpk.nad);
    write_rnce_pk(w, &mpk.nce);
}

pub fn read_fead_mpk(r: &mut Reader) -> Result<FeadMpk, WireError> {
    Ok(FeadMpk {
        nad: read_fe1_mpk(r)?,
        nce: read_rnce_pk(r)?,
    })
}

pub fn write_fead_msk(w: &mut Writer, msk: &FeadMsk) {
    write_fe1_msk(w, &msk.nad);
    write_rnce_msk(w, &msk.nce);
}

pub fn read_fead_msk(r: &mut Reader) -> Result<FeadMsk, WireError> {
    Ok(FeadMsk {
        nad: read_fe1_msk(r)?,
        nce: read_rnce_msk(r)?,
    })
}

pub fn write_fead_sk(w: &mut Writer, sk: &FeadSkF) {
    write_fe1_sk(w, &sk.nad);
    write_rnce_sk(w, &sk.nce);
}

pub fn read_fead_sk(r: &mut Reader) -> Result<FeadSkF, WireError> {
    Ok(FeadSkF {
        nad: read_fe1_sk(r)?,
        nce: read_rnce_sk(r)?,
    })
}

pub fn write_fead_ct(w: &mut Writer, ct: &FeadCiphertext) -> Result<(), WireError> {
    write_fe1_ct(w, &ct.nad)?;
    write_rnce_ct(w, &ct.nce)
}

pub fn read_fead_ct(r: &mut Reader) -> Result<FeadCiphertext, WireError> {
    Ok(FeadCiphertext {
        nad: read_fe1_ct(r)?,
        nce: read_rnce_ct(r)?,
    })
}

pub fn write_fead_vk(w: &mut Writer, vk: &FeadVk) {
    write_fe1_vk(w, &vk.nad);
    write_rnce_vk(w, &vk.nce);
    w.bitvec(&vk.x_mask);
    w.bitvec(&vk.z_mask);
}

pub fn read_fead_vk(r: &mut Reader) -> Result<FeadVk, WireError> {
    Ok(FeadVk {
        nad: read_fe1_vk(r)?,
        nce: read_rnce_vk(r)?,
        x_mask: r.bitvec()?,
        z_mask: r.bitvec()?,
    })
}

pub fn write_fead_cert(w: &mut Writer, c: &FeadCert) {
    write_fe1_cert(w, &c.nad);
    write_rnce_cert(w, &c.nce);
}

pub fn read_fead_cert(r: &mut Reader) -> Result<FeadCert, WireError> {
    Ok(FeadCert {
        nad: read_fe1_cert(r)?,
        nce: read_rnce_cert(r)?,
    })
}

pub fn write_feq_params(w: &mut Writer, p: &FeqParams) {
    w.usize(p.q_bound);
    w.usize(p.lambda_desk);
    w.usize(p.degree_d);
    w.usize(p.ell);
    w.usize(p.t);
    w.usize(p.n_instances);
    w.usize(p.v);
    w.usize(p.s_pads);
    w.u8(p.field_k);
}

pub fn read_feq_params(r: &mut Reader) -> Result<FeqParams, WireError> {
    Ok(FeqParams {
        q_bound: r.usize()?,
        lambda_desk: r.usize()?,
        degree_d: r.usize()?,
        ell: r.usize()?,
        t: r.usize()?,
        n_instances: r.usize()?,
        v: r.usize()?,
        s_pads: r.usize()?,
        field_k: r.u8()?,
    })
}

pub fn write_feq_mpk(w: &mut Writer, mpk: &FeqMpk) {
    write_vec(w, &mpk.instances, write_fe1_mpk);
}

pub fn read_feq_mpk(r: &mut Reader) -> Result<FeqMpk, WireError> {
    Ok(FeqMpk {
        instances: read_vec(r, read_fe1_mpk)?,
    })
}

pub fn write_feq_msk(w: &mut Writer, msk: &FeqMsk) {
    write_vec(w, &msk.instances, write_fe1_msk);
}

pub fn read_feq_msk(r: &mut Reader) -> Result<FeqMsk, WireError> {
    Ok(FeqMsk {
        instances: read_vec(r, read_fe1_msk)?,
    })
}

pub fn write_feq_sk(w: &mut Writer, sk: &FeqSkC) {
    write_vec(w, &sk.gamma, |w, v| w.usize(*v));
    let delta: Vec<usize> = sk.delta.iter().copied().collect();
    write_vec(w, &delta, |w, v| w.usize(*v));
    write_vec(w, &sk.keys, write_fe1_sk);
}

pub fn read_feq_sk(r: &mut Reader) -> Result<FeqSkC, WireError> {
    let gamma = read_vec(r, |r| r.usize())?;
    let delta: BTreeSet<usize> = read_vec(r, |r| r.usize())?.into_iter().collect();
    let keys = read_vec(r, read_fe1_sk)?;
    Ok(FeqSkC { gamma, delta, keys })
}

pub fn write_feq_ct(w: &mut Writer, ct: &FeqCiphertext) -> Result<(), WireError> {
    w.usize(ct.instances.len());
    for c in &ct.instances {
        write_fe1_ct(w, c)?;
    }
    Ok(())
}

pub fn read_feq_ct(r: &mut Reader) -> Result<FeqCiphertext, WireError> {
    Ok(FeqCiphertext {
        instances: read_vec(r, read_fe1_ct)?,
    })
}

pub fn write_feq_vk(w: &mut Writer, vk: &FeqVk) {
    write_vec(w, &vk.instances, write_fe1_vk);
}

pub fn read_feq_vk(r: &mut Reader) -> Result<FeqVk, WireError> {
    Ok(FeqVk {
        instances: read_vec(r, read_fe1_vk)?,
    })
}

pub fn write_feq_cert(w: &mut Writer, c: &FeqCert) {
    write_vec(w, &c.instances, write_fe1_cert);
}

pub fn read_feq_cert(r: &mut Reader) -> Result<FeqCert, WireError> {
    Ok(FeqCert {
        instances: read_vec(r, read_fe1_cert)?,
    })
}

/// Field elements serialize as `(k, value)`.
pub fn write_field_elem(w: &mut Writer, v: &FieldElem) {
    w.u8(v.k());
    w.u16(v.value());
}

pub fn read_field_elem(r: &mut Reader) -> Result<FieldElem, WireError> {
    let k = r.u8()?;
    let value = r.u16()?;
    FieldElem::new(k, value).map_err(|e| WireError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn envelope_roundtrip_every_tag() {
        for &tag in TypeTag::ALL {
            let env = Envelope {
                tag,
                payload: vec![1, 2, 3, 4, 5],
            };
            let bytes = env.to_bytes();
            let back = Envelope::from_bytes(&bytes).unwrap();
            assert_eq!(back, env);
            assert_eq!(back.to_bytes(), bytes);
        }
    }

    #[test]
    fn envelope_rejects_garbage() {
        assert!(matches!(
            Envelope::from_bytes(b"nope"),
            Err(WireError::Truncated)
        ));
        let mut bytes = Envelope {
            tag: TypeTag::SkeKey,
            payload: vec![0; 8],
        }
        .to_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            Envelope::from_bytes(&bytes),
            Err(WireError::BadMagic)
        ));
        // Unknown tag echoed back.
        let mut bytes = Envelope {
            tag: TypeTag::SkeKey,
            payload: vec![],
        }
        .to_bytes();
        bytes[6..10].copy_from_slice(b"ZZZZ");
        match Envelope::from_bytes(&bytes) {
            Err(WireError::UnknownTag(t)) => assert_eq!(t, "ZZZZ"),
            other => panic!("expected UnknownTag, got {other:?}"),
        }
        // Truncated payload.
        let full = Envelope {
            tag: TypeTag::SkeKey,
            payload: vec![9; 40],
        }
        .to_bytes();
        assert!(matches!(
            Envelope::from_bytes(&full[..full.len() - 3]),
            Err(WireError::Truncated)
        ));
    }

    #[test]
    fn register_payload_roundtrip() {
        let mut r = ChaCha12Rng::seed_from_u64(1);
        let reg = QuantumRegister::random_stabilizer(6, &mut r).unwrap();
        crate::qsim::harness::allow_duplication(true);
        let reference = reg.duplicate_for_test().unwrap();
        crate::qsim::harness::allow_duplication(false);
        let mut w = Writer::new();
        write_register(&mut w, &reg).unwrap();
        let bytes = w.finish();
        let mut rd = Reader::new(&bytes);
        let back = read_register(&mut rd).unwrap();
        rd.done().unwrap();
        assert!(QuantumRegister::canonical_equal(&reference, &back).unwrap());
        // Byte-stable: re-encoding the decoded register is the identity.
        let mut w2 = Writer::new();
        write_register(&mut w2, &back).unwrap();
        assert_eq!(w2.finish(), bytes);
    }

    #[test]
    fn simulation_flag_enforced() {
        let mut r = ChaCha12Rng::seed_from_u64(2);
        let reg = QuantumRegister::random_stabilizer(2, &mut r).unwrap();
        let mut w = Writer::new();
        write_register(&mut w, &reg).unwrap();
        let mut bytes = w.finish();
        bytes[0] = b'X';
        assert!(read_register(&mut Reader::new(&bytes)).is_err());
    }
}
