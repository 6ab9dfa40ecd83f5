//! Leveled boolean circuits, circuit builders, and the certified
//! everlasting garbling scheme with its simulators.

use thiserror::Error;

use crate::cd::CdError;

pub mod circuit;
pub mod family;
pub mod scheme;

pub use circuit::{CircuitBuilder, Gate, LeveledCircuit, Topology};
pub use family::{FunctionFamily, LinearFunction, LinearGf2kFamily, MuxFamily};
pub use scheme::{GarbledCircuit, GcCert, GcProfile, GcVk, LabelSet};

#[derive(Debug, Error)]
pub enum GarbleError {
    #[error("circuit is not leveled or malformed: {0}")]
    Malformed(String),
    #[error("input length {got}, expected {want}")]
    InputLength { want: usize, got: usize },
    #[error("layout length {got}, expected {want}")]
    LayoutLength { want: usize, got: usize },
    #[error("domain bound exceeded: {0}")]
    DomainBound(String),
    #[error(transparent)]
    Cd(#[from] CdError),
}

#[cfg(test)]
mod tests {
    use super::circuit::{random_circuit, CircuitBuilder, LeveledCircuit, TABLE_AND};
    use super::scheme::{self, GcProfile};
    use crate::base::Qrom;
    use crate::bits::BitVec;
    use crate::qsim::PauliMask;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn oracle(profile: GcProfile, seed: u64) -> Qrom {
        Qrom::new(profile.oracle_bytes(), seed)
    }

    fn garble_and_eval(
        circuit: &LeveledCircuit,
        x: &BitVec,
        seed: u64,
    ) -> (Option<BitVec>, BitVec) {
        let profile = GcProfile::test_profile();
        let mut r = rng(seed);
        let mut h = oracle(profile, seed ^ 0xABCD);
        let labels = scheme::samp(circuit.inputs, profile, &mut r);
        let (mut gc, _vk) = scheme::grbl(circuit, &labels, profile, &mut h, &mut r).unwrap();
        let got = scheme::eval(&mut gc, &labels.select(x), &mut h, &mut r).unwrap();
        let want = circuit.eval(x).unwrap();
        (got, want)
    }

    #[test]
    fn single_and_gate_all_inputs() {
        let mut b = CircuitBuilder::new(2);
        let g = b.gate(TABLE_AND, 0, 1);
        let c = b.finish(vec![g]).unwrap();
        for bits in 0..4u64 {
            let x = BitVec::from_u64(bits, 2);
            let (got, want) = garble_and_eval(&c, &x, 100 + bits);
            assert_eq!(got, Some(want));
        }
    }

    #[test]
    fn exhaustive_two_gate_topologies_two_inputs() {
        // All two-gate leveled topologies over two inputs: second gate reads
        // the first gate's output and a lifted input copy, or two copies.
        // Exhaust all 16 x 16 table pairs on a fixed representative wiring
        // and all inputs.
        let mut seed = 0u64;
        for t1 in 0..16u8 {
            for t2 in 0..16u8 {
                let mut b = CircuitBuilder::new(2);
                let g1 = b.gate(t1, 0, 1);
                let lifted0 = b.lift(0, 1);
                let g2 = b.gate(t2, g1, lifted0);
                let c = b.finish(vec![g1, g2]).unwrap();
                for bits in 0..4u64 {
                    let x = BitVec::from_u64(bits, 2);
                    seed += 1;
                    let (got, want) = garble_and_eval(&c, &x, 7000 + seed);
                    assert_eq!(got, Some(want), "t1={t1:04b} t2={t2:04b} x={x}");
                }
            }
        }
    }

    #[test]
    fn random_circuits_match_plain_evaluation() {
        // 500 random leveled circuits up to 32 gates.
        let mut r = rng(1);
        for i in 0..500 {
            let inputs = r.gen_range(1..6);
            let c = random_circuit(inputs, r.gen_range(1..33), r.gen_range(1..4), &mut r);
            let x = BitVec::random(inputs, &mut r);
            let (got, want) = garble_and_eval(&c, &x, 9000 + i);
            assert_eq!(got, Some(want));
        }
    }

    #[test]
    fn inputs_differing_in_one_bit() {
        let mut r = rng(2);
        let c = random_circuit(4, 16, 2, &mut r);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 77);
        for flip in 0..4 {
            let x = BitVec::random(4, &mut r);
            let mut x2 = x.clone();
            x2.flip(flip);
            let labels = scheme::samp(4, profile, &mut r);
            let (mut gc1, _) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
            let (mut gc2, _) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
            let y1 = scheme::eval(&mut gc1, &labels.select(&x), &mut h, &mut r).unwrap();
            let y2 = scheme::eval(&mut gc2, &labels.select(&x2), &mut h, &mut r).unwrap();
            assert_eq!(y1, Some(c.eval(&x).unwrap()));
            assert_eq!(y2, Some(c.eval(&x2).unwrap()));
        }
    }

    #[test]
    fn foreign_label_gives_bot() {
        let mut r = rng(3);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 42);
        let c = random_circuit(3, 8, 1, &mut r);
        for _ in 0..50 {
            let labels = scheme::samp(3, profile, &mut r);
            let (mut gc, _) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
            let x = BitVec::random(3, &mut r);
            let mut held = labels.select(&x);
            held[1] = crate::base::ske_keygen(profile.key_bytes, &mut r);
            assert_eq!(scheme::eval(&mut gc, &held, &mut h, &mut r).unwrap(), None);
        }
    }

    #[test]
    fn deletion_and_verification() {
        let mut r = rng(4);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 5);
        let c = random_circuit(3, 10, 2, &mut r);
        let labels = scheme::samp(3, profile, &mut r);
        let (gc, vk) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
        let cert = scheme::del(gc, &mut r).unwrap();
        assert!(scheme::vrfy(&vk, &cert).unwrap());
        // One flipped bit at a checked position refuses.
        let mut bad = cert.clone();
        let vk0 = &vk.gates[0].rows[0].0;
        let checked = (0..bad.gates[0][0].0.len())
            .find(|&i| vk0.cd_key.theta().get(i))
            .unwrap();
        bad.gates[0][0].0.flip(checked);
        assert!(!scheme::vrfy(&vk, &bad).unwrap());
    }

    #[test]
    fn eval_then_delete_still_verifies() {
        // Honest evaluation only performs deterministic measurements, so the
        // evaluated circuit still deletes cleanly.
        let mut r = rng(5);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 6);
        let c = random_circuit(3, 6, 1, &mut r);
        let labels = scheme::samp(3, profile, &mut r);
        let (mut gc, vk) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
        let x = BitVec::random(3, &mut r);
        let y = scheme::eval(&mut gc, &labels.select(&x), &mut h, &mut r).unwrap();
        assert_eq!(y, Some(c.eval(&x).unwrap()));
        let cert = scheme::del(gc, &mut r).unwrap();
        assert!(scheme::vrfy(&vk, &cert).unwrap());
    }

    #[test]
    fn global_twirl_modify_roundtrip() {
        // Global random Pauli layer, delete, modify with the same mask,
        // verify; over random circuits.
        let mut r = rng(6);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 7);
        for _ in 0..60 {
            let c = random_circuit(2, r.gen_range(1..8), 1, &mut r);
            let labels = scheme::samp(2, profile, &mut r);
            let (mut gc, vk) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
            let qlen = scheme::quantum_len(&gc);
            let mask = PauliMask::random(qlen, &mut r);
            scheme::apply_pauli_layout(&mut gc, &mask).unwrap();
            let cert = scheme::del(gc, &mut r).unwrap();
            let fixed = scheme::modify(&mask, &cert, profile.component_qubits()).unwrap();
            assert!(scheme::vrfy(&vk, &fixed).unwrap());
        }
    }

    #[test]
    fn simulator_output_evaluates_to_y() {
        // The functional content of the simulation claim: Sim's output
        // evaluates to C(x) on the provided labels; 500 random (C, x).
        let mut r = rng(7);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 8);
        for _ in 0..500 {
            let inputs = r.gen_range(1..5);
            let c = random_circuit(inputs, r.gen_range(1..16), r.gen_range(1..3), &mut r);
            let x = BitVec::random(inputs, &mut r);
            let y = c.eval(&x).unwrap();
            let labels_x: Vec<crate::base::SkeKey> = (0..inputs)
                .map(|_| crate::base::ske_keygen(profile.key_bytes, &mut r))
                .collect();
            let (mut sgc, svk) =
                scheme::sim(&c.topology(), &y, &labels_x, profile, &mut h, &mut r).unwrap();
            let got = scheme::eval(&mut sgc, &labels_x, &mut h, &mut r).unwrap();
            assert_eq!(got, Some(y));
            // Structural shape matches honest output: same component counts.
            assert_eq!(sgc.gates.len(), c.gates.len());
            assert_eq!(svk.gates.len(), c.gates.len());
            assert!(sgc.gates.iter().all(|g| g.rows.len() == 4));
        }
    }

    #[test]
    fn inputdep_hybrids_agree_with_plain_eval() {
        // j = 0 is the honest garbler; j = q is the fully input-dependent
        // hybrid; everything in between evaluates to C(x) too.
        let mut r = rng(8);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 9);
        for _ in 0..200 {
            let inputs = r.gen_range(1..4);
            let c = random_circuit(inputs, r.gen_range(1..10), 1, &mut r);
            let x = BitVec::random(inputs, &mut r);
            let want = c.eval(&x).unwrap();
            let labels = scheme::samp(inputs, profile, &mut r);
            let held = labels.select(&x);
            for j in [0, c.gates.len() / 2, c.gates.len()] {
                let (mut gc, _vk) =
                    scheme::inputdep_sim(j, &c, &x, &held, profile, &mut h, &mut r).unwrap();
                let got = scheme::eval(&mut gc, &held, &mut h, &mut r).unwrap();
                assert_eq!(got, Some(want.clone()), "hybrid j = {j}");
            }
        }
    }

    #[test]
    fn row_shuffle_never_affects_eval() {
        // The shuffle is already random per gate; check repeated garblings
        // of one circuit under fixed labels always agree.
        let mut r = rng(9);
        let profile = GcProfile::test_profile();
        let mut h = oracle(profile, 10);
        let c = random_circuit(3, 12, 2, &mut r);
        let labels = scheme::samp(3, profile, &mut r);
        let x = BitVec::random(3, &mut r);
        let want = c.eval(&x).unwrap();
        for _ in 0..30 {
            let (mut gc, _) = scheme::grbl(&c, &labels, profile, &mut h, &mut r).unwrap();
            let got = scheme::eval(&mut gc, &labels.select(&x), &mut h, &mut r).unwrap();
            assert_eq!(got, Some(want.clone()));
        }
    }
}
