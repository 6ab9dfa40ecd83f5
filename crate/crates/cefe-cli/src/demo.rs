//! `demo <scheme>`: scripted end-to-end flows with a printed transcript.

use rand::Rng;

use cefe::base::{lwe_keygen, ske_keygen, Qrom};
use cefe::bits::BitVec;
use cefe::cd::{css, qrom, BackendDecKey, BackendEncKey};
use cefe::fe::adaptive::FeadScheme;
use cefe::fe::bounded::{FeqParams, FeqScheme};
use cefe::fe::one_bounded::Fe1Scheme;
use cefe::field::FieldElem;
use cefe::garble::{circuit::random_circuit, scheme as gc, MuxFamily};
use cefe::rnce;

use crate::profiles::ProfileKind;
use crate::util::{rng_from_args, Args, CliResult, Failure};

pub fn cmd_demo(args: &Args) -> CliResult<()> {
    let which = args
        .positional
        .first()
        .ok_or_else(|| Failure::usage("demo needs a scheme argument"))?
        .clone();
    let profile = ProfileKind::from_args(args)?;
    let mut rng = rng_from_args(args)?;
    let mut oracle = Qrom::new(128, 0xDE40);
    match which.as_str() {
        "ske" => demo_ske(profile, &mut oracle, &mut rng),
        "pke" => demo_pke(profile, &mut oracle, &mut rng),
        "css" => demo_css(profile, &mut rng),
        "rnce" => demo_rnce(profile, &mut oracle, &mut rng),
        "garble" => demo_garble(profile, &mut oracle, &mut rng),
        "fe1" => demo_fe1(profile, &mut oracle, &mut rng),
        "fead" => demo_fead(profile, &mut oracle, &mut rng),
        "feq" => demo_feq(profile, &mut oracle, &mut rng),
        other => Err(Failure::usage(format!("unknown demo {other:?}"))),
    }
}

fn demo_ske(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: certified everlasting SKE (random-oracle variant)");
    let sk = ske_keygen(16, rng);
    let m = BitVec::random(16, rng);
    println!("  message: {m}");
    let (vk, mut ct) = qrom::enc(BackendEncKey::Ske(&sk), profile.qrom(), &m, oracle, rng)?;
    println!("  encrypted: {} qubits + classical part", ct.quantum.n());
    let out = qrom::dec(BackendDecKey::Ske(&sk), &mut ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    println!("  decrypted: {out}");
    let cert = qrom::del(ct, rng)?;
    let ok = qrom::vrfy(&vk, &cert)?;
    println!("  deleted; verification: {}", if ok { "accepted" } else { "rejected" });
    if out == m && ok {
        println!("dec = m and deletion verified: OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_pke(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: certified everlasting PKE (random-oracle variant)");
    let (pk, sk) = lwe_keygen(profile.lwe(), rng)?;
    let m = BitVec::random(16, rng);
    println!("  message: {m}");
    let (vk, mut ct) = qrom::enc(BackendEncKey::Pke(&pk), profile.qrom(), &m, oracle, rng)?;
    let out = qrom::dec(BackendDecKey::Pke(&sk), &mut ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    println!("  decrypted: {out}");
    let cert = qrom::del(ct, rng)?;
    let ok = qrom::vrfy(&vk, &cert)?;
    println!("  deleted; verification: {}", if ok { "accepted" } else { "rejected" });
    if out == m && ok {
        println!("dec = m and deletion verified: OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_css(profile: ProfileKind, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: certified everlasting SKE (CSS variant, Steane pair)");
    let cssp = profile.css();
    let sk = ske_keygen(16, rng);
    let m = BitVec::random(3, rng);
    println!("  message: {m} (three parallel one-bit blocks)");
    let (vk, mut ct) = css::enc(BackendEncKey::Ske(&sk), &cssp, &m, rng)?;
    println!("  encrypted: {} qubits across {} blocks", ct.quantum.n(), vk.blocks.len());
    let out = css::dec(BackendDecKey::Ske(&sk), &cssp, &mut ct, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    println!("  decrypted: {out}");
    let ok = css::vrfy(&vk, css::del(ct), rng)?;
    println!("  deleted; verification: {}", if ok { "accepted" } else { "rejected" });
    if out == m && ok {
        println!("dec = m and deletion verified: OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_rnce(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: certified everlasting receiver non-committing encryption");
    let (pk, msk) = rnce::setup(8, profile.rnce(), rng)?;
    let m = BitVec::random(8, rng);
    println!("  message: {m}");
    let (_vk, mut ct) = rnce::enc(&pk, &m, oracle, rng)?;
    let sk = rnce::keygen(&msk, rng);
    let real = rnce::dec(&sk, &mut ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    println!("  real path decrypts: {real}");
    let (_fvk, mut fake_ct, aux) = rnce::fake(&pk, oracle, rng)?;
    let fake_sk = rnce::reveal(&msk, &aux, &m)?;
    let faked = rnce::dec(&fake_sk, &mut fake_ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("fake decryption returned bot"))?;
    println!("  fake ciphertext opened to: {faked}");
    if real == m && faked == m {
        println!("real and equivocated paths agree: OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_garble(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: certified everlasting garbling");
    let circuit = random_circuit(3, 8, 2, rng);
    let x = BitVec::random(3, rng);
    let want = circuit.eval(&x)?;
    println!("  random 8-gate circuit over 3 inputs, x = {x}, C(x) = {want}");
    let labels = gc::samp(circuit.inputs, profile.gc(), rng);
    let (mut garbled, vk) = gc::grbl(&circuit, &labels, profile.gc(), oracle, rng)?;
    let got = gc::eval(&mut garbled, &labels.select(&x), oracle, rng)?
        .ok_or_else(|| Failure::protocol("evaluation returned bot"))?;
    println!("  garbled evaluation: {got}");
    let cert = gc::del(garbled, rng)?;
    let ok = gc::vrfy(&vk, &cert)?;
    println!("  deleted; verification: {}", if ok { "accepted" } else { "rejected" });
    if got == want && ok {
        println!("eval = C(x) and deletion verified: OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_fe1(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: 1-bounded certified everlasting functional encryption");
    let scheme = Fe1Scheme::new(MuxFamily::new(3)?, profile.fe1());
    let (mpk, msk) = scheme.setup(rng)?;
    let f = BitVec::random(8, rng);
    let m = BitVec::random(3, rng);
    println!("  function table: {f}");
    println!("  message:        {m}");
    let skf = scheme.keygen(&msk, &f)?;
    let (vk, mut ct) = scheme.enc(&mpk, &m, oracle, rng)?;
    let got = scheme
        .dec(&skf, &mut ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    let want = f.get(scheme.family.index_of(&m));
    println!("  decryption: {got} (expected f(m) = {})", u8::from(want));
    let cert = scheme.del(ct, rng)?;
    let ok = scheme.vrfy(&vk, &cert)?;
    println!("  deleted; verification: {}", if ok { "accepted" } else { "rejected" });
    if got.get(0) == want && ok {
        println!("dec = f(m): OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_fead(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: adaptive 1-bounded FE (Pauli twirl + RNCE)");
    let scheme = FeadScheme::new(Fe1Scheme::new(MuxFamily::new(2)?, profile.fe1()), profile.rnce());
    let (mpk, msk) = scheme.setup(rng)?;
    let f = BitVec::random(4, rng);
    let m = BitVec::random(2, rng);
    println!("  function table: {f}");
    println!("  message:        {m}");
    let skf = scheme.keygen(&msk, &f, rng)?;
    let (vk, mut ct) = scheme.enc(&mpk, &m, oracle, rng)?;
    let got = scheme
        .dec(&skf, &mut ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    let want = f.get(scheme.nad.family.index_of(&m));
    println!("  decryption: {got} (expected f(m) = {})", u8::from(want));
    let cert = scheme.del(ct, rng)?;
    let ok = scheme.vrfy(&vk, &cert)?;
    println!(
        "  deleted; verification (with Modify routing): {}",
        if ok { "accepted" } else { "rejected" }
    );
    if got.get(0) == want && ok {
        println!("dec = f(m): OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}

fn demo_feq(profile: ProfileKind, oracle: &mut Qrom, rng: &mut impl Rng) -> CliResult<()> {
    println!("demo: q-bounded certified everlasting FE over GF(64)");
    let params = FeqParams::desk_profile();
    let scheme = FeqScheme::new(params, profile.fe1())?;
    let (mpk, msk) = scheme.setup(rng)?;
    let coeffs: Vec<FieldElem> = (0..scheme.monomial_count())
        .map(|_| FieldElem::random(params.field_k, rng).unwrap())
        .collect();
    let x: Vec<FieldElem> = (0..params.ell)
        .map(|_| FieldElem::random(params.field_k, rng).unwrap())
        .collect();
    println!(
        "  degree-2 polynomial with coefficients {:?}",
        coeffs.iter().map(|c| c.value()).collect::<Vec<_>>()
    );
    println!(
        "  input x = {:?}",
        x.iter().map(|c| c.value()).collect::<Vec<_>>()
    );
    let sk = scheme.keygen(&msk, &coeffs, rng)?;
    let (vk, mut ct) = scheme.enc(&mpk, &x, oracle, rng)?;
    let got = scheme
        .dec(&sk, &mut ct, oracle, rng)?
        .ok_or_else(|| Failure::protocol("decryption returned bot"))?;
    let want = scheme.eval_function(&coeffs, &x)?;
    println!("  decryption: {} (expected C(x) = {})", got.value(), want.value());
    let cert = scheme.del(ct, rng)?;
    let ok = scheme.vrfy(&vk, &cert)?;
    println!("  deleted; verification: {}", if ok { "accepted" } else { "rejected" });
    if got == want && ok {
        println!("dec = C(x): OK");
        Ok(())
    } else {
        Err(Failure::protocol("demo flow failed"))
    }
}
