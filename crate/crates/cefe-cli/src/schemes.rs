//! The per-scheme `keygen/enc/dec/del/vrfy` commands over envelope files.
//!
//! Every artifact is self-contained: ciphertexts and keys embed the
//! profile data needed to reconstruct the scheme at decryption time. The
//! random oracle for file-based flows is the shared keyed oracle (override
//! the key with --oracle).

use std::path::Path;

use cefe::base::Qrom;
use cefe::cd::{css, qrom, BackendDecKey, BackendEncKey};
use cefe::fe::adaptive::FeadScheme;
use cefe::fe::bounded::{FeqParams, FeqScheme};
use cefe::fe::one_bounded::Fe1Scheme;
use cefe::field::FieldElem;
use cefe::garble::{scheme as gc, LeveledCircuit, MuxFamily};
use cefe::rnce;
use cefe::wire::{self, Envelope, Reader, TypeTag, Writer};

use crate::profiles::ProfileKind;
use crate::util::{parse_bits, rng_from_args, Args, CliResult, Failure};

const DEFAULT_ORACLE_KEY: &str = "cefe-shared-oracle-v1";

/// Oracle sized generously enough for every profile in one place.
fn oracle_from_args(args: &Args) -> Qrom {
    let key = args.flag("oracle").unwrap_or(DEFAULT_ORACLE_KEY);
    Qrom::keyed(128, key.as_bytes())
}

fn write_env(path: &str, tag: TypeTag, payload: Vec<u8>) -> CliResult<()> {
    Envelope { tag, payload }.write_file(Path::new(path))?;
    println!("wrote {} ({})", path, tag.as_str());
    Ok(())
}

fn read_env(path: &str, tag: TypeTag) -> CliResult<Vec<u8>> {
    Ok(Envelope::read_file(Path::new(path))?.expect(tag)?)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CeVariant {
    Qrom,
    Css,
}

impl CeVariant {
    fn from_args(args: &Args) -> CliResult<Self> {
        match args.flag("variant") {
            None | Some("qrom") => Ok(Self::Qrom),
            Some("css") => Ok(Self::Css),
            Some(other) => Err(Failure::usage(format!(
                "unknown variant {other:?} (expected qrom or css)"
            ))),
        }
    }

    fn byte(self) -> u8 {
        match self {
            Self::Qrom => 0,
            Self::Css => 1,
        }
    }

    fn from_byte(b: u8) -> CliResult<Self> {
        match b {
            0 => Ok(Self::Qrom),
            1 => Ok(Self::Css),
            v => Err(Failure::envelope(format!("unknown variant byte {v}"))),
        }
    }
}

fn css_profile_from_args(args: &Args, profile: ProfileKind) -> CliResult<css::CssProfile> {
    match (args.flag("c1"), args.flag("c2")) {
        (Some(p1), Some(p2)) => {
            let c1 = cefe::gf2::parse_code_file(&std::fs::read_to_string(p1).map_err(|e| {
                Failure::usage(format!("cannot read code file {p1}: {e}"))
            })?)?;
            let c2 = cefe::gf2::parse_code_file(&std::fs::read_to_string(p2).map_err(|e| {
                Failure::usage(format!("cannot read code file {p2}: {e}"))
            })?)?;
            let t: usize = args.parse_flag("t", 1)?;
            let p: usize = args.parse_flag("p", c1.length())?;
            let pair = if c1.length() <= cefe::gf2::DISTANCE_ENUM_LIMIT {
                cefe::gf2::CssPair::verified(c1, c2, t)?
            } else {
                cefe::gf2::CssPair::with_asserted_distance(c1, c2, t)?
            };
            Ok(css::CssProfile { pair, p })
        }
        (None, None) => Ok(profile.css()),
        _ => Err(Failure::usage("--c1 and --c2 must be given together")),
    }
}

// ---------------------------------------------------------------------------
// certified everlasting SKE / PKE

pub fn cmd_ske(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    match verb {
        "keygen" => {
            let key = cefe::base::ske_keygen(16, &mut rng);
            let mut w = Writer::new();
            wire::write_ske_key(&mut w, &key);
            write_env(args.require("out")?, TypeTag::SkeKey, w.finish())
        }
        "enc" => {
            let key_bytes = read_env(args.require("key")?, TypeTag::SkeKey)?;
            let mut r = Reader::new(&key_bytes);
            let key = wire::read_ske_key(&mut r)?;
            let m = parse_bits(args.require("message")?)?;
            let variant = CeVariant::from_args(args)?;
            let (vk_payload, ct_payload) = match variant {
                CeVariant::Qrom => {
                    let (vk, ct) = qrom::enc(
                        BackendEncKey::Ske(&key),
                        profile.qrom(),
                        &m,
                        &mut oracle,
                        &mut rng,
                    )?;
                    let mut wv = Writer::new();
                    wv.u8(variant.byte());
                    wire::write_qrom_vk(&mut wv, &vk);
                    let mut wc = Writer::new();
                    wc.u8(variant.byte());
                    wire::write_qrom_ct(&mut wc, &ct)?;
                    (wv.finish(), wc.finish())
                }
                CeVariant::Css => {
                    let cssp = css_profile_from_args(args, profile)?;
                    let (vk, ct) = css::enc(BackendEncKey::Ske(&key), &cssp, &m, &mut rng)?;
                    let mut wv = Writer::new();
                    wv.u8(variant.byte());
                    wire::write_css_profile(&mut wv, &cssp);
                    wire::write_css_vk(&mut wv, &vk);
                    let mut wc = Writer::new();
                    wc.u8(variant.byte());
                    wire::write_css_profile(&mut wc, &cssp);
                    wire::write_css_ct(&mut wc, &ct)?;
                    (wv.finish(), wc.finish())
                }
            };
            write_env(args.require("vk")?, TypeTag::CeVk, vk_payload)?;
            write_env(args.require("ct")?, TypeTag::CeSke, ct_payload)
        }
        "dec" => {
            let key_bytes = read_env(args.require("key")?, TypeTag::SkeKey)?;
            let mut r = Reader::new(&key_bytes);
            let key = wire::read_ske_key(&mut r)?;
            let ct_bytes = read_env(args.require("ct")?, TypeTag::CeSke)?;
            let mut r = Reader::new(&ct_bytes);
            let m = match CeVariant::from_byte(r.u8().map_err(Failure::from)?)? {
                CeVariant::Qrom => {
                    let mut ct = wire::read_qrom_ct(&mut r)?;
                    qrom::dec(BackendDecKey::Ske(&key), &mut ct, &mut oracle, &mut rng)?
                }
                CeVariant::Css => {
                    let cssp = wire::read_css_profile(&mut r)?;
                    let mut ct = wire::read_css_ct(&mut r)?;
                    css::dec(BackendDecKey::Ske(&key), &cssp, &mut ct, &mut rng)?
                }
            };
            match m {
                Some(bits) => {
                    println!("{bits}");
                    Ok(())
                }
                None => Err(Failure::protocol("decryption returned bot")),
            }
        }
        "del" => ce_del(args, TypeTag::CeSke, &mut rng),
        "vrfy" => ce_vrfy(args, &mut rng),
        other => Err(Failure::usage(format!("unknown ske verb {other:?}"))),
    }
}

fn ce_del(args: &Args, ct_tag: TypeTag, rng: &mut impl rand::Rng) -> CliResult<()> {
    let ct_bytes = read_env(args.require("ct")?, ct_tag)?;
    let mut r = Reader::new(&ct_bytes);
    let variant = CeVariant::from_byte(r.u8().map_err(Failure::from)?)?;
    let mut w = Writer::new();
    w.u8(variant.byte());
    match variant {
        CeVariant::Qrom => {
            let ct = wire::read_qrom_ct(&mut r)?;
            let cert = qrom::del(ct, rng)?;
            w.bitvec(&cert);
        }
        CeVariant::Css => {
            let _p = wire::read_css_profile(&mut r)?;
            let ct = wire::read_css_ct(&mut r)?;
            let cert = css::del(ct);
            wire::write_css_cert(&mut w, &cert)?;
        }
    }
    write_env(args.require("cert")?, TypeTag::CeCert, w.finish())
}

fn ce_vrfy(args: &Args, rng: &mut impl rand::Rng) -> CliResult<()> {
    let vk_bytes = read_env(args.require("vk")?, TypeTag::CeVk)?;
    let cert_bytes = read_env(args.require("cert")?, TypeTag::CeCert)?;
    let mut rv = Reader::new(&vk_bytes);
    let mut rc = Reader::new(&cert_bytes);
    let variant = CeVariant::from_byte(rv.u8().map_err(Failure::from)?)?;
    let cert_variant = CeVariant::from_byte(rc.u8().map_err(Failure::from)?)?;
    if variant != cert_variant {
        return Err(Failure::envelope("vk/cert variant mismatch"));
    }
    let ok = match variant {
        CeVariant::Qrom => {
            let vk = wire::read_qrom_vk(&mut rv)?;
            let cert = rc.bitvec().map_err(Failure::from)?;
            qrom::vrfy(&vk, &cert)?
        }
        CeVariant::Css => {
            let _p = wire::read_css_profile(&mut rv)?;
            let vk = wire::read_css_vk(&mut rv)?;
            let cert = wire::read_css_cert(&mut rc)?;
            css::vrfy(&vk, cert, rng)?
        }
    };
    if ok {
        println!("verification: accepted");
        Ok(())
    } else {
        Err(Failure::protocol("verification: rejected"))
    }
}

pub fn cmd_pke(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    match verb {
        "keygen" => {
            let (pk, sk) = cefe::base::lwe_keygen(profile.lwe(), &mut rng)?;
            let mut w = Writer::new();
            wire::write_lwe_pk(&mut w, &pk);
            write_env(args.require("pk")?, TypeTag::LwePk, w.finish())?;
            let mut w = Writer::new();
            wire::write_lwe_sk(&mut w, &sk);
            write_env(args.require("sk")?, TypeTag::LweSk, w.finish())
        }
        "enc" => {
            let pk_bytes = read_env(args.require("pk")?, TypeTag::LwePk)?;
            let mut r = Reader::new(&pk_bytes);
            let pk = wire::read_lwe_pk(&mut r)?;
            let m = parse_bits(args.require("message")?)?;
            let variant = CeVariant::from_args(args)?;
            let (vk_payload, ct_payload) = match variant {
                CeVariant::Qrom => {
                    let (vk, ct) = qrom::enc(
                        BackendEncKey::Pke(&pk),
                        profile.qrom(),
                        &m,
                        &mut oracle,
                        &mut rng,
                    )?;
                    let mut wv = Writer::new();
                    wv.u8(variant.byte());
                    wire::write_qrom_vk(&mut wv, &vk);
                    let mut wc = Writer::new();
                    wc.u8(variant.byte());
                    wire::write_qrom_ct(&mut wc, &ct)?;
                    (wv.finish(), wc.finish())
                }
                CeVariant::Css => {
                    let cssp = css_profile_from_args(args, profile)?;
                    let (vk, ct) = css::enc(BackendEncKey::Pke(&pk), &cssp, &m, &mut rng)?;
                    let mut wv = Writer::new();
                    wv.u8(variant.byte());
                    wire::write_css_profile(&mut wv, &cssp);
                    wire::write_css_vk(&mut wv, &vk);
                    let mut wc = Writer::new();
                    wc.u8(variant.byte());
                    wire::write_css_profile(&mut wc, &cssp);
                    wire::write_css_ct(&mut wc, &ct)?;
                    (wv.finish(), wc.finish())
                }
            };
            write_env(args.require("vk")?, TypeTag::CeVk, vk_payload)?;
            write_env(args.require("ct")?, TypeTag::CePke, ct_payload)
        }
        "dec" => {
            let sk_bytes = read_env(args.require("sk")?, TypeTag::LweSk)?;
            let mut r = Reader::new(&sk_bytes);
            let sk = wire::read_lwe_sk(&mut r)?;
            let ct_bytes = read_env(args.require("ct")?, TypeTag::CePke)?;
            let mut r = Reader::new(&ct_bytes);
            let m = match CeVariant::from_byte(r.u8().map_err(Failure::from)?)? {
                CeVariant::Qrom => {
                    let mut ct = wire::read_qrom_ct(&mut r)?;
                    qrom::dec(BackendDecKey::Pke(&sk), &mut ct, &mut oracle, &mut rng)?
                }
                CeVariant::Css => {
                    let cssp = wire::read_css_profile(&mut r)?;
                    let mut ct = wire::read_css_ct(&mut r)?;
                    css::dec(BackendDecKey::Pke(&sk), &cssp, &mut ct, &mut rng)?
                }
            };
            match m {
                Some(bits) => {
                    println!("{bits}");
                    Ok(())
                }
                None => Err(Failure::protocol("decryption returned bot")),
            }
        }
        "del" => ce_del(args, TypeTag::CePke, &mut rng),
        "vrfy" => ce_vrfy(args, &mut rng),
        other => Err(Failure::usage(format!("unknown pke verb {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// rnce

pub fn cmd_rnce(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    match verb {
        "keygen" => {
            let n: usize = args.parse_flag("bits", 8)?;
            let (pk, msk) = rnce::setup(n, profile.rnce(), &mut rng)?;
            let sk = rnce::keygen(&msk, &mut rng);
            let mut w = Writer::new();
            wire::write_rnce_pk(&mut w, &pk);
            write_env(args.require("pk")?, TypeTag::RncePk, w.finish())?;
            let mut w = Writer::new();
            wire::write_rnce_msk(&mut w, &msk);
            write_env(args.require("msk")?, TypeTag::RnceMsk, w.finish())?;
            let mut w = Writer::new();
            wire::write_rnce_sk(&mut w, &sk);
            write_env(args.require("sk")?, TypeTag::RnceSk, w.finish())
        }
        "enc" => {
            let pk_bytes = read_env(args.require("pk")?, TypeTag::RncePk)?;
            let pk = wire::read_rnce_pk(&mut Reader::new(&pk_bytes))?;
            let m = parse_bits(args.require("message")?)?;
            let (vk, ct) = rnce::enc(&pk, &m, &mut oracle, &mut rng)?;
            let mut w = Writer::new();
            wire::write_rnce_vk(&mut w, &vk);
            write_env(args.require("vk")?, TypeTag::RnceVk, w.finish())?;
            let mut w = Writer::new();
            wire::write_rnce_ct(&mut w, &ct)?;
            write_env(args.require("ct")?, TypeTag::RnceCt, w.finish())
        }
        "dec" => {
            let sk_bytes = read_env(args.require("sk")?, TypeTag::RnceSk)?;
            let sk = wire::read_rnce_sk(&mut Reader::new(&sk_bytes))?;
            let ct_bytes = read_env(args.require("ct")?, TypeTag::RnceCt)?;
            let mut ct = wire::read_rnce_ct(&mut Reader::new(&ct_bytes))?;
            match rnce::dec(&sk, &mut ct, &mut oracle, &mut rng)? {
                Some(m) => {
                    println!("{m}");
                    Ok(())
                }
                None => Err(Failure::protocol("decryption returned bot")),
            }
        }
        "del" => {
            let ct_bytes = read_env(args.require("ct")?, TypeTag::RnceCt)?;
            let ct = wire::read_rnce_ct(&mut Reader::new(&ct_bytes))?;
            let cert = rnce::del(ct, &mut rng)?;
            let mut w = Writer::new();
            wire::write_rnce_cert(&mut w, &cert);
            write_env(args.require("cert")?, TypeTag::RnceCert, w.finish())
        }
        "vrfy" => {
            let vk_bytes = read_env(args.require("vk")?, TypeTag::RnceVk)?;
            let vk = wire::read_rnce_vk(&mut Reader::new(&vk_bytes))?;
            let cert_bytes = read_env(args.require("cert")?, TypeTag::RnceCert)?;
            let cert = wire::read_rnce_cert(&mut Reader::new(&cert_bytes))?;
            if rnce::vrfy(&vk, &cert)? {
                println!("verification: accepted");
                Ok(())
            } else {
                Err(Failure::protocol("verification: rejected"))
            }
        }
        other => Err(Failure::usage(format!("unknown rnce verb {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// garble

fn load_circuit(args: &Args) -> CliResult<LeveledCircuit> {
    let path = args.require("circuit")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read circuit {path}: {e}")))?;
    Ok(LeveledCircuit::from_text(&text)?)
}

pub fn cmd_garble(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    match verb {
        "keygen" => {
            let circuit = load_circuit(args)?;
            let labels = gc::samp(circuit.inputs, profile.gc(), &mut rng);
            let mut w = Writer::new();
            wire::write_gc_profile(&mut w, &profile.gc());
            wire::write_labels(&mut w, &labels);
            write_env(args.require("out")?, TypeTag::Labels, w.finish())
        }
        "enc" => {
            let circuit = load_circuit(args)?;
            let label_bytes = read_env(args.require("labels")?, TypeTag::Labels)?;
            let mut r = Reader::new(&label_bytes);
            let gc_profile = wire::read_gc_profile(&mut r)?;
            let labels = wire::read_labels(&mut r)?;
            let (garbled, vk) = gc::grbl(&circuit, &labels, gc_profile, &mut oracle, &mut rng)?;
            let mut w = Writer::new();
            wire::write_garbled(&mut w, &garbled)?;
            write_env(args.require("ct")?, TypeTag::Garbled, w.finish())?;
            let mut w = Writer::new();
            wire::write_gc_vk(&mut w, &vk);
            write_env(args.require("vk")?, TypeTag::GcVk, w.finish())
        }
        "dec" => {
            let garbled_bytes = read_env(args.require("ct")?, TypeTag::Garbled)?;
            let mut garbled = wire::read_garbled(&mut Reader::new(&garbled_bytes))?;
            let label_bytes = read_env(args.require("labels")?, TypeTag::Labels)?;
            let mut r = Reader::new(&label_bytes);
            let _profile = wire::read_gc_profile(&mut r)?;
            let labels = wire::read_labels(&mut r)?;
            let x = parse_bits(args.require("input")?)?;
            if x.len() != labels.pairs.len() {
                return Err(Failure::usage("input length mismatch"));
            }
            match gc::eval(&mut garbled, &labels.select(&x), &mut oracle, &mut rng)? {
                Some(y) => {
                    println!("{y}");
                    Ok(())
                }
                None => Err(Failure::protocol("evaluation returned bot")),
            }
        }
        "del" => {
            let garbled_bytes = read_env(args.require("ct")?, TypeTag::Garbled)?;
            let garbled = wire::read_garbled(&mut Reader::new(&garbled_bytes))?;
            let cert = gc::del(garbled, &mut rng)?;
            let mut w = Writer::new();
            wire::write_gc_cert(&mut w, &cert);
            write_env(args.require("cert")?, TypeTag::GcCert, w.finish())
        }
        "vrfy" => {
            let vk_bytes = read_env(args.require("vk")?, TypeTag::GcVk)?;
            let vk = wire::read_gc_vk(&mut Reader::new(&vk_bytes))?;
            let cert_bytes = read_env(args.require("cert")?, TypeTag::GcCert)?;
            let cert = wire::read_gc_cert(&mut Reader::new(&cert_bytes))?;
            if gc::vrfy(&vk, &cert)? {
                println!("verification: accepted");
                Ok(())
            } else {
                Err(Failure::protocol("verification: rejected"))
            }
        }
        other => Err(Failure::usage(format!("unknown garble verb {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// fe1 / fead (mux family)

fn mux_fe1(args: &Args, profile: ProfileKind) -> CliResult<(usize, Fe1Scheme<MuxFamily>)> {
    let k: usize = args.parse_flag("k", 2)?;
    Ok((k, Fe1Scheme::new(MuxFamily::new(k)?, profile.fe1())))
}

pub fn cmd_fe1(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    let (k, scheme) = mux_fe1(args, profile)?;
    match verb {
        "keygen" => {
            let (mpk, msk) = scheme.setup(&mut rng)?;
            let mut w = Writer::new();
            w.usize(k);
            wire::write_fe1_profile(&mut w, &scheme.profile);
            wire::write_fe1_mpk(&mut w, &mpk);
            write_env(args.require("mpk")?, TypeTag::Fe1Mpk, w.finish())?;
            let mut w = Writer::new();
            w.usize(k);
            wire::write_fe1_profile(&mut w, &scheme.profile);
            wire::write_fe1_msk(&mut w, &msk);
            write_env(args.require("msk")?, TypeTag::Fe1Msk, w.finish())?;
            if let Some(fstr) = args.flag("function") {
                let f = parse_bits(fstr)?;
                let skf = scheme.keygen(&msk, &f)?;
                let mut w = Writer::new();
                w.usize(k);
                wire::write_fe1_profile(&mut w, &scheme.profile);
                wire::write_fe1_sk(&mut w, &skf);
                write_env(args.require("sk")?, TypeTag::Fe1Sk, w.finish())?;
            }
            Ok(())
        }
        "enc" => {
            let mpk_bytes = read_env(args.require("mpk")?, TypeTag::Fe1Mpk)?;
            let mut r = Reader::new(&mpk_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let file_profile = wire::read_fe1_profile(&mut r)?;
            let scheme = Fe1Scheme::new(MuxFamily::new(file_k)?, file_profile);
            let mpk = wire::read_fe1_mpk(&mut r)?;
            let m = parse_bits(args.require("message")?)?;
            let (vk, ct) = scheme.enc(&mpk, &m, &mut oracle, &mut rng)?;
            let mut w = Writer::new();
            wire::write_fe1_vk(&mut w, &vk);
            write_env(args.require("vk")?, TypeTag::Fe1Vk, w.finish())?;
            let mut w = Writer::new();
            w.usize(file_k);
            wire::write_fe1_profile(&mut w, &scheme.profile);
            wire::write_fe1_ct(&mut w, &ct)?;
            write_env(args.require("ct")?, TypeTag::Fe1Ct, w.finish())
        }
        "dec" => {
            let sk_bytes = read_env(args.require("sk")?, TypeTag::Fe1Sk)?;
            let mut r = Reader::new(&sk_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let file_profile = wire::read_fe1_profile(&mut r)?;
            let scheme = Fe1Scheme::new(MuxFamily::new(file_k)?, file_profile);
            let skf = wire::read_fe1_sk(&mut r)?;
            let ct_bytes = read_env(args.require("ct")?, TypeTag::Fe1Ct)?;
            let mut r = Reader::new(&ct_bytes);
            let _ct_k = r.usize().map_err(Failure::from)?;
            let _ct_profile = wire::read_fe1_profile(&mut r)?;
            let mut ct = wire::read_fe1_ct(&mut r)?;
            match scheme.dec(&skf, &mut ct, &mut oracle, &mut rng)? {
                Some(y) => {
                    println!("{y}");
                    Ok(())
                }
                None => Err(Failure::protocol("decryption returned bot")),
            }
        }
        "del" => {
            let ct_bytes = read_env(args.require("ct")?, TypeTag::Fe1Ct)?;
            let mut r = Reader::new(&ct_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let file_profile = wire::read_fe1_profile(&mut r)?;
            let scheme = Fe1Scheme::new(MuxFamily::new(file_k)?, file_profile);
            let ct = wire::read_fe1_ct(&mut r)?;
            let cert = scheme.del(ct, &mut rng)?;
            let mut w = Writer::new();
            w.usize(file_k);
            wire::write_fe1_profile(&mut w, &scheme.profile);
            wire::write_fe1_cert(&mut w, &cert);
            write_env(args.require("cert")?, TypeTag::Fe1Cert, w.finish())
        }
        "vrfy" => {
            let vk_bytes = read_env(args.require("vk")?, TypeTag::Fe1Vk)?;
            let vk = wire::read_fe1_vk(&mut Reader::new(&vk_bytes))?;
            let cert_bytes = read_env(args.require("cert")?, TypeTag::Fe1Cert)?;
            let mut r = Reader::new(&cert_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let file_profile = wire::read_fe1_profile(&mut r)?;
            let scheme = Fe1Scheme::new(MuxFamily::new(file_k)?, file_profile);
            let cert = wire::read_fe1_cert(&mut r)?;
            if scheme.vrfy(&vk, &cert)? {
                println!("verification: accepted");
                Ok(())
            } else {
                Err(Failure::protocol("verification: rejected"))
            }
        }
        other => Err(Failure::usage(format!("unknown fe1 verb {other:?}"))),
    }
}

fn fead_scheme(k: usize, profile: ProfileKind) -> CliResult<FeadScheme<MuxFamily>> {
    Ok(FeadScheme::new(
        Fe1Scheme::new(MuxFamily::new(k)?, profile.fe1()),
        profile.rnce(),
    ))
}

pub fn cmd_fead(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    let k: usize = args.parse_flag("k", 2)?;
    let scheme = fead_scheme(k, profile)?;
    match verb {
        "keygen" => {
            let (mpk, msk) = scheme.setup(&mut rng)?;
            let mut w = Writer::new();
            w.usize(k);
            wire::write_fe1_profile(&mut w, &scheme.nad.profile);
            wire::write_fead_mpk(&mut w, &mpk);
            write_env(args.require("mpk")?, TypeTag::FeadMpk, w.finish())?;
            let mut w = Writer::new();
            w.usize(k);
            wire::write_fe1_profile(&mut w, &scheme.nad.profile);
            wire::write_fead_msk(&mut w, &msk);
            write_env(args.require("msk")?, TypeTag::FeadMsk, w.finish())?;
            if let Some(fstr) = args.flag("function") {
                let f = parse_bits(fstr)?;
                let skf = scheme.keygen(&msk, &f, &mut rng)?;
                let mut w = Writer::new();
                w.usize(k);
                wire::write_fe1_profile(&mut w, &scheme.nad.profile);
                wire::write_fead_sk(&mut w, &skf);
                write_env(args.require("sk")?, TypeTag::FeadSk, w.finish())?;
            }
            Ok(())
        }
        "enc" => {
            let mpk_bytes = read_env(args.require("mpk")?, TypeTag::FeadMpk)?;
            let mut r = Reader::new(&mpk_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let _fp = wire::read_fe1_profile(&mut r)?;
            let mpk = wire::read_fead_mpk(&mut r)?;
            let scheme = FeadScheme::new(
                Fe1Scheme::new(MuxFamily::new(file_k)?, _fp),
                mpk.nce.profile,
            );
            let m = parse_bits(args.require("message")?)?;
            let (vk, ct) = scheme.enc(&mpk, &m, &mut oracle, &mut rng)?;
            let mut w = Writer::new();
            wire::write_fead_vk(&mut w, &vk);
            write_env(args.require("vk")?, TypeTag::FeadVk, w.finish())?;
            let mut w = Writer::new();
            w.usize(file_k);
            wire::write_fe1_profile(&mut w, &scheme.nad.profile);
            wire::write_rnce_profile(&mut w, &scheme.rnce_profile);
            wire::write_fead_ct(&mut w, &ct)?;
            write_env(args.require("ct")?, TypeTag::FeadCt, w.finish())
        }
        "dec" => {
            let sk_bytes = read_env(args.require("sk")?, TypeTag::FeadSk)?;
            let mut r = Reader::new(&sk_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let skf = wire::read_fead_sk(&mut r)?;
            let ct_bytes = read_env(args.require("ct")?, TypeTag::FeadCt)?;
            let mut r = Reader::new(&ct_bytes);
            let _k2 = r.usize().map_err(Failure::from)?;
            let _fp2 = wire::read_fe1_profile(&mut r)?;
            let rp = wire::read_rnce_profile(&mut r)?;
            let mut ct = wire::read_fead_ct(&mut r)?;
            let scheme = FeadScheme::new(Fe1Scheme::new(MuxFamily::new(file_k)?, fp), rp);
            match scheme.dec(&skf, &mut ct, &mut oracle, &mut rng)? {
                Some(y) => {
                    println!("{y}");
                    Ok(())
                }
                None => Err(Failure::protocol("decryption returned bot")),
            }
        }
        "del" => {
            let ct_bytes = read_env(args.require("ct")?, TypeTag::FeadCt)?;
            let mut r = Reader::new(&ct_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let rp = wire::read_rnce_profile(&mut r)?;
            let ct = wire::read_fead_ct(&mut r)?;
            let scheme = FeadScheme::new(Fe1Scheme::new(MuxFamily::new(file_k)?, fp), rp);
            let cert = scheme.del(ct, &mut rng)?;
            let mut w = Writer::new();
            w.usize(file_k);
            wire::write_fe1_profile(&mut w, &scheme.nad.profile);
            wire::write_fead_cert(&mut w, &cert);
            write_env(args.require("cert")?, TypeTag::FeadCert, w.finish())
        }
        "vrfy" => {
            let vk_bytes = read_env(args.require("vk")?, TypeTag::FeadVk)?;
            let vk = wire::read_fead_vk(&mut Reader::new(&vk_bytes))?;
            let cert_bytes = read_env(args.require("cert")?, TypeTag::FeadCert)?;
            let mut r = Reader::new(&cert_bytes);
            let file_k = r.usize().map_err(Failure::from)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let cert = wire::read_fead_cert(&mut r)?;
            // Verification never touches the RNCE profile (the component
            // verdicts come entirely from vk and cert), so any value works.
            let scheme = FeadScheme::new(
                Fe1Scheme::new(MuxFamily::new(file_k)?, fp),
                ProfileKind::Desk.rnce(),
            );
            if scheme.vrfy(&vk, &cert)? {
                println!("verification: accepted");
                Ok(())
            } else {
                Err(Failure::protocol("verification: rejected"))
            }
        }
        other => Err(Failure::usage(format!("unknown fead verb {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// feq

fn feq_params_from_args(args: &Args) -> CliResult<FeqParams> {
    match args.flag("params") {
        None => Ok(FeqParams::desk_profile()),
        Some("desk") => Ok(FeqParams::desk_profile()),
        Some("micro") => Ok(FeqParams::micro_profile()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read params {path}: {e}")))?;
            FeqParams::parse(&text).map_err(|e| Failure::params(e.to_string()))
        }
    }
}

fn parse_field_list(s: &str, k: u8) -> CliResult<Vec<FieldElem>> {
    s.split(',')
        .map(|tok| {
            let v: u16 = tok
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("bad field element {tok:?}")))?;
            FieldElem::new(k, v).map_err(|e| Failure::usage(e.to_string()))
        })
        .collect()
}

pub fn cmd_feq(verb: &str, args: &Args) -> CliResult<()> {
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = oracle_from_args(args);
    match verb {
        "keygen" => {
            let params = feq_params_from_args(args)?;
            let scheme = FeqScheme::new(params, profile.fe1())?;
            let (mpk, msk) = scheme.setup(&mut rng)?;
            let mut w = Writer::new();
            wire::write_feq_params(&mut w, &params);
            wire::write_fe1_profile(&mut w, &scheme.one.profile);
            wire::write_feq_mpk(&mut w, &mpk);
            write_env(args.require("mpk")?, TypeTag::FeqMpk, w.finish())?;
            let mut w = Writer::new();
            wire::write_feq_params(&mut w, &params);
            wire::write_fe1_profile(&mut w, &scheme.one.profile);
            wire::write_feq_msk(&mut w, &msk);
            write_env(args.require("msk")?, TypeTag::FeqMsk, w.finish())?;
            if let Some(coeff_str) = args.flag("coeffs") {
                let coeffs = parse_field_list(coeff_str, params.field_k)?;
                let sk = scheme.keygen(&msk, &coeffs, &mut rng)?;
                let mut w = Writer::new();
                wire::write_feq_params(&mut w, &params);
                wire::write_fe1_profile(&mut w, &scheme.one.profile);
                wire::write_feq_sk(&mut w, &sk);
                write_env(args.require("sk")?, TypeTag::FeqSk, w.finish())?;
            }
            Ok(())
        }
        "enc" => {
            let mpk_bytes = read_env(args.require("mpk")?, TypeTag::FeqMpk)?;
            let mut r = Reader::new(&mpk_bytes);
            let params = wire::read_feq_params(&mut r)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let scheme = FeqScheme::new(params, fp)?;
            let mpk = wire::read_feq_mpk(&mut r)?;
            let x = parse_field_list(args.require("input")?, params.field_k)?;
            let (vk, ct) = scheme.enc(&mpk, &x, &mut oracle, &mut rng)?;
            let mut w = Writer::new();
            wire::write_feq_vk(&mut w, &vk);
            write_env(args.require("vk")?, TypeTag::FeqVk, w.finish())?;
            let mut w = Writer::new();
            wire::write_feq_params(&mut w, &params);
            wire::write_fe1_profile(&mut w, &scheme.one.profile);
            wire::write_feq_ct(&mut w, &ct)?;
            write_env(args.require("ct")?, TypeTag::FeqCt, w.finish())
        }
        "dec" => {
            let sk_bytes = read_env(args.require("sk")?, TypeTag::FeqSk)?;
            let mut r = Reader::new(&sk_bytes);
            let params = wire::read_feq_params(&mut r)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let scheme = FeqScheme::new(params, fp)?;
            let sk = wire::read_feq_sk(&mut r)?;
            let ct_bytes = read_env(args.require("ct")?, TypeTag::FeqCt)?;
            let mut r = Reader::new(&ct_bytes);
            let _params2 = wire::read_feq_params(&mut r)?;
            let _fp2 = wire::read_fe1_profile(&mut r)?;
            let mut ct = wire::read_feq_ct(&mut r)?;
            match scheme.dec(&sk, &mut ct, &mut oracle, &mut rng)? {
                Some(y) => {
                    println!("{}", y.value());
                    Ok(())
                }
                None => Err(Failure::protocol("decryption returned bot")),
            }
        }
        "del" => {
            let ct_bytes = read_env(args.require("ct")?, TypeTag::FeqCt)?;
            let mut r = Reader::new(&ct_bytes);
            let params = wire::read_feq_params(&mut r)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let scheme = FeqScheme::new(params, fp)?;
            let ct = wire::read_feq_ct(&mut r)?;
            let cert = scheme.del(ct, &mut rng)?;
            let mut w = Writer::new();
            wire::write_feq_params(&mut w, &params);
            wire::write_fe1_profile(&mut w, &scheme.one.profile);
            wire::write_feq_cert(&mut w, &cert);
            write_env(args.require("cert")?, TypeTag::FeqCert, w.finish())
        }
        "vrfy" => {
            let vk_bytes = read_env(args.require("vk")?, TypeTag::FeqVk)?;
            let vk = wire::read_feq_vk(&mut Reader::new(&vk_bytes))?;
            let cert_bytes = read_env(args.require("cert")?, TypeTag::FeqCert)?;
            let mut r = Reader::new(&cert_bytes);
            let params = wire::read_feq_params(&mut r)?;
            let fp = wire::read_fe1_profile(&mut r)?;
            let scheme = FeqScheme::new(params, fp)?;
            let cert = wire::read_feq_cert(&mut r)?;
            if scheme.vrfy(&vk, &cert)? {
                println!("verification: accepted");
                Ok(())
            } else {
                Err(Failure::protocol("verification: rejected"))
            }
        }
        other => Err(Failure::usage(format!("unknown feq verb {other:?}"))),
    }
}
