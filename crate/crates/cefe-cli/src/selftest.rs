//! `selftest`: a fast property battery across every layer, one PASS/FAIL
//! line per check.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use cefe::base::{ske_dec, ske_enc, ske_keygen, Qrom};
use cefe::bits::BitVec;
use cefe::cd::{onetime, qrom, BackendDecKey, BackendEncKey};
use cefe::fe::one_bounded::{Fe1Profile, Fe1Scheme};
use cefe::field::{fe_mul, FieldElem};
use cefe::garble::{circuit::random_circuit, scheme as gc, GcProfile, MuxFamily};
use cefe::gf2::steane_pair;
use cefe::qsim::{MeasureBasis, PauliMask, QuantumRegister};
use cefe::wire::{Envelope, TypeTag};

use crate::util::{CliResult, Failure};

struct Battery {
    failures: usize,
}

impl Battery {
    fn check(&mut self, name: &str, ok: bool) {
        if ok {
            println!("PASS {name}");
        } else {
            println!("FAIL {name}");
            self.failures += 1;
        }
    }
}

pub fn cmd_selftest() -> CliResult<()> {
    let mut b = Battery { failures: 0 };
    let mut rng = ChaCha12Rng::seed_from_u64(0x5E1F);

    // gf2: mod-C laws on the Steane pair.
    let pair = steane_pair();
    let mut ok = true;
    for _ in 0..200 {
        let x = BitVec::random(7, &mut rng);
        let c = pair.c1().random_codeword(&mut rng);
        let rep = pair.c1().mod_c(&x).unwrap();
        ok &= pair.c1().mod_c(&x.xor(&c)).unwrap() == rep;
        ok &= pair.c1().mod_c(&rep).unwrap() == rep;
    }
    b.check("gf2 mod-C laws (Steane)", ok);

    // field: GF(64) axioms spot check.
    let mut ok = true;
    for _ in 0..500 {
        let a = FieldElem::random(6, &mut rng).unwrap();
        let x = FieldElem::random(6, &mut rng).unwrap();
        let y = FieldElem::random(6, &mut rng).unwrap();
        let lhs = fe_mul(&a, &x.add(&y).unwrap()).unwrap();
        let rhs = fe_mul(&a, &x).unwrap().add(&fe_mul(&a, &y).unwrap()).unwrap();
        ok &= lhs == rhs;
    }
    b.check("field distributivity GF(64)", ok);

    // qsim: Pauli involution + Bell correlation.
    let mut ok = true;
    for _ in 0..50 {
        let (mut h1, mut h2) = QuantumRegister::make_bell_pairs(1).unwrap();
        let o1 = h1.measure(&[0], &[MeasureBasis::Computational], &mut rng).unwrap();
        let o2 = h2.measure(&[0], &[MeasureBasis::Computational], &mut rng).unwrap();
        ok &= o1 == o2;
    }
    b.check("qsim Bell correlations", ok);

    // base: SKE special correctness.
    let mut ok = true;
    for _ in 0..2000 {
        let k1 = ske_keygen(16, &mut rng);
        let k2 = ske_keygen(16, &mut rng);
        let ct = ske_enc(&k1, b"check", &mut rng);
        ok &= ske_dec(&k2, &ct).is_none();
        ok &= ske_dec(&k1, &ct).as_deref() == Some(b"check");
    }
    b.check("base SKE special correctness", ok);

    // cd: honest roundtrip + modification correctness.
    let mut ok = true;
    for _ in 0..300 {
        let key = onetime::keygen(12, 4, &mut rng).unwrap();
        let m = BitVec::random(8, &mut rng);
        let mut ct = onetime::enc(&key, &m).unwrap();
        ok &= onetime::dec(&key, &mut ct, &mut rng).unwrap() == m;
        let mask = PauliMask::random(12, &mut rng);
        ct.apply_pauli(&mask).unwrap();
        let cert = onetime::del(ct, &mut rng).unwrap();
        ok &= onetime::vrfy(&key, &onetime::modify(&mask, &cert).unwrap()).unwrap();
    }
    b.check("cd roundtrip + modification correctness", ok);

    // ce-qrom over both backends.
    let mut oracle = Qrom::new(64, 0x5E1F);
    let mut ok = true;
    for _ in 0..100 {
        let sk = ske_keygen(16, &mut rng);
        let m = BitVec::random(8, &mut rng);
        let profile = cefe::cd::qrom::QromProfile::test_profile();
        let (vk, mut ct) =
            qrom::enc(BackendEncKey::Ske(&sk), profile, &m, &mut oracle, &mut rng).unwrap();
        ok &= qrom::dec(BackendDecKey::Ske(&sk), &mut ct, &mut oracle, &mut rng).unwrap()
            == Some(m);
        let cert = qrom::del(ct, &mut rng).unwrap();
        ok &= qrom::vrfy(&vk, &cert).unwrap();
    }
    b.check("ce-ske (qrom) roundtrip + deletion", ok);

    // garble: random circuits agree with plain evaluation.
    let profile = GcProfile::test_profile();
    let mut gc_oracle = Qrom::new(profile.oracle_bytes(), 77);
    let mut ok = true;
    for _ in 0..40 {
        let inputs = rng.gen_range(1..5);
        let c = random_circuit(inputs, rng.gen_range(1..16), 1, &mut rng);
        let x = BitVec::random(inputs, &mut rng);
        let labels = gc::samp(inputs, profile, &mut rng);
        let (mut garbled, _vk) = gc::grbl(&c, &labels, profile, &mut gc_oracle, &mut rng).unwrap();
        let got = gc::eval(&mut garbled, &labels.select(&x), &mut gc_oracle, &mut rng).unwrap();
        ok &= got == Some(c.eval(&x).unwrap());
    }
    b.check("garble eval = plain eval", ok);

    // fe1 mux: dec = f(m).
    let scheme = Fe1Scheme::new(MuxFamily::new(2).unwrap(), Fe1Profile::test_profile());
    let mut fe_oracle = Qrom::new(scheme.profile.oracle_bytes(), 78);
    let (mpk, msk) = scheme.setup(&mut rng).unwrap();
    let mut ok = true;
    for _ in 0..20 {
        let f = BitVec::random(4, &mut rng);
        let m = BitVec::random(2, &mut rng);
        let skf = scheme.keygen(&msk, &f).unwrap();
        let (_vk, mut ct) = scheme.enc(&mpk, &m, &mut fe_oracle, &mut rng).unwrap();
        let got = scheme.dec(&skf, &mut ct, &mut fe_oracle, &mut rng).unwrap();
        ok &= got.map(|y| y.get(0)) == Some(f.get(scheme.family.index_of(&m)));
    }
    b.check("fe1 (mux) dec = f(m)", ok);

    // wire: envelope identity across every tag.
    let mut ok = true;
    for &tag in TypeTag::ALL {
        let env = Envelope {
            tag,
            payload: vec![0xAB; 9],
        };
        ok &= Envelope::from_bytes(&env.to_bytes()).map(|e| e == env).unwrap_or(false);
    }
    b.check("wire envelope identity (all tags)", ok);

    // attack sanity: honest deletion always passes.
    let rate = crate::attack::honest_pass_rate("cd", 300, 9)?;
    b.check("honest deletion rate = 100%", rate == 1.0);

    if b.failures == 0 {
        println!("selftest: all checks passed");
        Ok(())
    } else {
        Err(Failure::protocol(format!("{} selftest checks failed", b.failures)))
    }
}
