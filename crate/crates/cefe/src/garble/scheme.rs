//! The certified everlasting garbling scheme.
//!
//! Per gate and input combination `(σa, σb)`, two ciphertexts XOR-share the
//! outgoing key: `ct_a` encrypts a fresh pad under the a-wire key and
//! `ct_b` encrypts `pad ⊕ sk_c^{g(σa,σb)}` under the b-wire key, with the
//! four rows shuffled by a random permutation. Evaluation relies on special
//! correctness: exactly one row opens under the held keys. Deletion,
//! verification and Pauli-mask routing delegate componentwise in a fixed
//! layout: gate-major, stored row order, a-ciphertext before b-ciphertext.

use rand::Rng;

use crate::base::{ske_keygen, Qrom, SkeKey};
use crate::bits::BitVec;
use crate::cd::qrom::{self, QromCiphertext, QromProfile, QromVk};
use crate::cd::BackendEncKey;
use crate::qsim::PauliMask;

use super::circuit::{LeveledCircuit, Topology};
use super::GarbleError;

/// Garbling profile: label width in bytes plus the wrapped scheme's knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GcProfile {
    pub key_bytes: usize,
    pub qrom: QromProfile,
}

impl GcProfile {
    pub fn default_lambda128() -> Self {
        Self {
            key_bytes: 16,
            qrom: QromProfile::default_lambda128(),
        }
    }

    /// Desk profile: 32-bit labels keep key collisions negligible while the
    /// 32-bit redundancy tag still pins row identification.
    pub fn test_profile() -> Self {
        Self {
            key_bytes: 4,
            qrom: QromProfile::test_profile(),
        }
    }

    /// Qubits in one row component.
    pub fn component_qubits(&self) -> usize {
        self.qrom.cd_n(self.key_bytes * 8)
    }

    pub fn oracle_bytes(&self) -> usize {
        self.qrom.oracle_bytes(self.key_bytes * 8)
    }
}

/// Input-wire key pairs from `Samp`.
pub struct LabelSet {
    pub pairs: Vec<[SkeKey; 2]>,
}

impl LabelSet {
    /// Labels selecting input `x`.
    pub fn select(&self, x: &BitVec) -> Vec<SkeKey> {
        assert_eq!(x.len(), self.pairs.len());
        (0..x.len())
            .map(|i| self.pairs[i][usize::from(x.get(i))].clone())
            .collect()
    }
}

pub fn samp<R: Rng + ?Sized>(n: usize, profile: GcProfile, rng: &mut R) -> LabelSet {
    LabelSet {
        pairs: (0..n)
            .map(|_| [ske_keygen(profile.key_bytes, rng), ske_keygen(profile.key_bytes, rng)])
            .collect(),
    }
}

pub struct GarbledRow {
    pub ct_a: QromCiphertext,
    pub ct_b: QromCiphertext,
}

pub struct GarbledGate {
    pub rows: Vec<GarbledRow>,
}

/// Output map `d`: the two out-wire keys bound to their bit values.
#[derive(Clone)]
pub struct OutputMap {
    pub entries: [(SkeKey, bool); 2],
}

pub struct GarbledCircuit {
    pub topology: Topology,
    pub gates: Vec<GarbledGate>,
    pub outputs: Vec<OutputMap>,
    pub profile: GcProfile,
}

#[derive(Clone)]
pub struct GateVk {
    /// Stored row order, `(vk_a, vk_b)` per row.
    pub rows: Vec<(QromVk, QromVk)>,
}

#[derive(Clone)]
pub struct GcVk {
    pub gates: Vec<GateVk>,
}

/// Deletion certificate in the canonical layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcCert {
    /// Per gate, stored row order, `(cert_a, cert_b)`.
    pub gates: Vec<Vec<(BitVec, BitVec)>>,
}

fn key_to_bits(k: &SkeKey) -> BitVec {
    BitVec::from_bytes(&k.0, k.0.len() * 8)
}

fn bits_to_key(b: &BitVec) -> SkeKey {
    SkeKey(b.to_bytes())
}

fn garble_gate<R: Rng + ?Sized>(
    table: u8,
    keys_a: &[SkeKey; 2],
    keys_b: &[SkeKey; 2],
    keys_c: &[SkeKey; 2],
    profile: GcProfile,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(GateVk, GarbledGate), GarbleError> {
    // Outgoing-key selector per row: the gate's own truth table. The
    // simulators reuse this routine with a constant selector instead.
    let selector = |sa: usize, sb: usize| -> usize { (table as usize >> ((sa << 1) | sb)) & 1 };
    garble_gate_with(keys_a, keys_b, keys_c, selector, profile, oracle, rng)
}

fn garble_gate_with<R: Rng + ?Sized>(
    keys_a: &[SkeKey; 2],
    keys_b: &[SkeKey; 2],
    keys_c: &[SkeKey; 2],
    select_c: impl Fn(usize, usize) -> usize,
    profile: GcProfile,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(GateVk, GarbledGate), GarbleError> {
    let mut rows = Vec::with_capacity(4);
    let mut vks = Vec::with_capacity(4);
    for sa in 0..2usize {
        for sb in 0..2usize {
            let pad = ske_keygen(profile.key_bytes, rng);
            let share_b = pad.xor(&keys_c[select_c(sa, sb)]);
            let (vk_a, ct_a) = qrom::enc(
                BackendEncKey::Ske(&keys_a[sa]),
                profile.qrom,
                &key_to_bits(&pad),
                oracle,
                rng,
            )?;
            let (vk_b, ct_b) = qrom::enc(
                BackendEncKey::Ske(&keys_b[sb]),
                profile.qrom,
                &key_to_bits(&share_b),
                oracle,
                rng,
            )?;
            rows.push(GarbledRow { ct_a, ct_b });
            vks.push((vk_a, vk_b));
        }
    }
    // Row shuffle gamma from S4, applied identically to gate and vk.
    for i in (1..4usize).rev() {
        let j = rng.gen_range(0..=i);
        rows.swap(i, j);
        vks.swap(i, j);
    }
    Ok((GateVk { rows: vks }, GarbledGate { rows }))
}

/// Garble a leveled circuit under the given input labels.
pub fn grbl<R: Rng + ?Sized>(
    circuit: &LeveledCircuit,
    labels: &LabelSet,
    profile: GcProfile,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(GarbledCircuit, GcVk), GarbleError> {
    circuit.validate()?;
    if labels.pairs.len() != circuit.inputs {
        return Err(GarbleError::InputLength {
            want: circuit.inputs,
            got: labels.pairs.len(),
        });
    }
    let mut wire_keys: Vec<Option<[SkeKey; 2]>> = vec![None; circuit.wires];
    for (i, pair) in labels.pairs.iter().enumerate() {
        wire_keys[i] = Some(pair.clone());
    }
    for slot in wire_keys.iter_mut().take(circuit.wires).skip(circuit.inputs) {
        *slot = Some([
            ske_keygen(profile.key_bytes, rng),
            ske_keygen(profile.key_bytes, rng),
        ]);
    }
    let mut gates = Vec::with_capacity(circuit.gates.len());
    let mut vks = Vec::with_capacity(circuit.gates.len());
    for g in &circuit.gates {
        let ka = wire_keys[g.a].clone().unwrap();
        let kb = wire_keys[g.b].clone().unwrap();
        let kc = wire_keys[g.c].clone().unwrap();
        let (vk, gg) = garble_gate(g.table, &ka, &kb, &kc, profile, oracle, rng)?;
        gates.push(gg);
        vks.push(vk);
    }
    let outputs = circuit
        .outputs
        .iter()
        .map(|&o| {
            let pair = wire_keys[o].clone().unwrap();
            OutputMap {
                entries: [(pair[0].clone(), false), (pair[1].clone(), true)],
            }
        })
        .collect();
    Ok((
        GarbledCircuit {
            topology: circuit.topology(),
            gates,
            outputs,
            profile,
        },
        GcVk { gates: vks },
    ))
}

/// Evaluate under one label per input wire. `None` is ⊥: no row opened, or
/// more than one did (the unique-pair clause), or an output key matched
/// neither map entry. Honest evaluations measure only deterministic
/// outcomes, so the garbled circuit remains deletable afterwards.
pub fn eval<R: Rng + ?Sized>(
    gc: &mut GarbledCircuit,
    input_labels: &[SkeKey],
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<Option<BitVec>, GarbleError> {
    let topo = gc.topology.clone();
    if input_labels.len() != topo.inputs {
        return Err(GarbleError::InputLength {
            want: topo.inputs,
            got: input_labels.len(),
        });
    }
    let mut held: Vec<Option<SkeKey>> = vec![None; topo.wires];
    for (i, k) in input_labels.iter().enumerate() {
        held[i] = Some(k.clone());
    }
    for (gi, &(_, a, b, c)) in topo.gates.iter().enumerate() {
        let (Some(ka), Some(kb)) = (held[a].clone(), held[b].clone()) else {
            return Err(GarbleError::Malformed(format!(
                "gate {gi}: inputs unavailable"
            )));
        };
        let mut opened: Option<SkeKey> = None;
        let mut openings = 0usize;
        for row in gc.gates[gi].rows.iter_mut() {
            let qa = qrom::dec(
                crate::cd::BackendDecKey::Ske(&ka),
                &mut row.ct_a,
                oracle,
                rng,
            )?;
            let Some(share_a) = qa else { continue };
            let qb = qrom::dec(
                crate::cd::BackendDecKey::Ske(&kb),
                &mut row.ct_b,
                oracle,
                rng,
            )?;
            let Some(share_b) = qb else { continue };
            openings += 1;
            opened = Some(bits_to_key(&share_a.xor(&share_b)));
        }
        if openings != 1 {
            return Ok(None);
        }
        held[c] = opened;
    }
    let mut out = BitVec::zeros(topo.outputs.len());
    for (i, &o) in topo.outputs.iter().enumerate() {
        let Some(k) = &held[o] else {
            return Ok(None);
        };
        let map = &gc.outputs[i];
        if *k == map.entries[0].0 {
            out.set(i, map.entries[0].1);
        } else if *k == map.entries[1].0 {
            out.set(i, map.entries[1].1);
        } else {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

/// Delete every component, gate-major, stored row order, a then b.
pub fn del<R: Rng + ?Sized>(gc: GarbledCircuit, rng: &mut R) -> Result<GcCert, GarbleError> {
    let mut gates = Vec::with_capacity(gc.gates.len());
    for gate in gc.gates {
        let mut rows = Vec::with_capacity(4);
        for row in gate.rows {
            let ca = qrom::del(row.ct_a, rng)?;
            let cb = qrom::del(row.ct_b, rng)?;
            rows.push((ca, cb));
        }
        gates.push(rows);
    }
    Ok(GcCert { gates })
}

/// Conjunction over all `8q` component verdicts.
pub fn vrfy(vk: &GcVk, cert: &GcCert) -> Result<bool, GarbleError> {
    if vk.gates.len() != cert.gates.len() {
        return Err(GarbleError::LayoutLength {
            want: vk.gates.len(),
            got: cert.gates.len(),
        });
    }
    for (gvk, gcert) in vk.gates.iter().zip(&cert.gates) {
        if gvk.rows.len() != gcert.len() {
            return Err(GarbleError::LayoutLength {
                want: gvk.rows.len(),
                got: gcert.len(),
            });
        }
        for ((va, vb), (ca, cb)) in gvk.rows.iter().zip(gcert) {
            if !qrom::vrfy(va, ca)? || !qrom::vrfy(vb, cb)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Total qubits in the garbled circuit's quantum layout.
pub fn quantum_len(gc: &GarbledCircuit) -> usize {
    gc.gates.len() * 8 * gc.profile.component_qubits()
}

/// Apply a Pauli layer across the full quantum layout (used by the
/// adaptive-FE twirl).
pub fn apply_pauli_layout(gc: &mut GarbledCircuit, mask: &PauliMask) -> Result<(), GarbleError> {
    let comp = gc.profile.component_qubits();
    if mask.len() != quantum_len(gc) {
        return Err(GarbleError::LayoutLength {
            want: quantum_len(gc),
            got: mask.len(),
        });
    }
    let mut off = 0usize;
    for gate in gc.gates.iter_mut() {
        for row in gate.rows.iter_mut() {
            for reg in [&mut row.ct_a.quantum, &mut row.ct_b.quantum] {
                let sub = PauliMask::new(
                    mask.x_bits.slice(off, comp),
                    mask.z_bits.slice(off, comp),
                );
                reg.apply_pauli(&sub).map_err(crate::cd::CdError::from)?;
                off += comp;
            }
        }
    }
    Ok(())
}

/// Slice a full-layout Pauli mask onto every certificate component.
pub fn modify(mask: &PauliMask, cert: &GcCert, component_qubits: usize) -> Result<GcCert, GarbleError> {
    let total: usize = cert.gates.len() * 8 * component_qubits;
    if mask.len() != total {
        return Err(GarbleError::LayoutLength {
            want: total,
            got: mask.len(),
        });
    }
    let mut off = 0usize;
    let mut out = Vec::with_capacity(cert.gates.len());
    for gate in &cert.gates {
        let mut rows = Vec::with_capacity(gate.len());
        for (ca, cb) in gate {
            let sub_a = PauliMask::new(
                mask.x_bits.slice(off, component_qubits),
                mask.z_bits.slice(off, component_qubits),
            );
            off += component_qubits;
            let sub_b = PauliMask::new(
                mask.x_bits.slice(off, component_qubits),
                mask.z_bits.slice(off, component_qubits),
            );
            off += component_qubits;
            rows.push((qrom::modify(&sub_a, ca)?, qrom::modify(&sub_b, cb)?));
        }
        out.push(rows);
    }
    Ok(GcCert { gates: out })
}

/// Simulator: builds a garbled circuit from the topology and the output
/// value alone. Every row encrypts the index-0 outgoing key, and the output
/// maps bind `sk^0` to `y_i`; evaluation on the provided labels therefore
/// returns `y`.
pub fn sim<R: Rng + ?Sized>(
    topology: &Topology,
    y: &BitVec,
    input_labels: &[SkeKey],
    profile: GcProfile,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(GarbledCircuit, GcVk), GarbleError> {
    if input_labels.len() != topology.inputs {
        return Err(GarbleError::InputLength {
            want: topology.inputs,
            got: input_labels.len(),
        });
    }
    if y.len() != topology.outputs.len() {
        return Err(GarbleError::InputLength {
            want: topology.outputs.len(),
            got: y.len(),
        });
    }
    let mut wire_keys: Vec<Option<[SkeKey; 2]>> = vec![None; topology.wires];
    for (i, given) in input_labels.iter().enumerate() {
        wire_keys[i] = Some([given.clone(), ske_keygen(profile.key_bytes, rng)]);
    }
    for slot in wire_keys.iter_mut().take(topology.wires).skip(topology.inputs) {
        *slot = Some([
            ske_keygen(profile.key_bytes, rng),
            ske_keygen(profile.key_bytes, rng),
        ]);
    }
    let mut gates = Vec::with_capacity(topology.gates.len());
    let mut vks = Vec::with_capacity(topology.gates.len());
    for &(_, a, b, c) in &topology.gates {
        let ka = wire_keys[a].clone().unwrap();
        let kb = wire_keys[b].clone().unwrap();
        let kc = wire_keys[c].clone().unwrap();
        let (vk, gg) = garble_gate_with(&ka, &kb, &kc, |_, _| 0, profile, oracle, rng)?;
        gates.push(gg);
        vks.push(vk);
    }
    let outputs = topology
        .outputs
        .iter()
        .enumerate()
        .map(|(i, &o)| {
            let pair = wire_keys[o].clone().unwrap();
            OutputMap {
                entries: [(pair[0].clone(), y.get(i)), (pair[1].clone(), !y.get(i))],
            }
        })
        .collect();
    Ok((
        GarbledCircuit {
            topology: topology.clone(),
            gates,
            outputs,
            profile,
        },
        GcVk { gates: vks },
    ))
}

/// Hybrid simulator: gates `0..j` garble input-dependently (every row
/// encrypts the key of the wire value realized under `x`), the rest
/// honestly; output maps are honest. `j = 0` reproduces `grbl` exactly.
pub fn inputdep_sim<R: Rng + ?Sized>(
    j: usize,
    circuit: &LeveledCircuit,
    x: &BitVec,
    input_labels_for_x: &[SkeKey],
    profile: GcProfile,
    oracle: &mut Qrom,
    rng: &mut R,
) -> Result<(GarbledCircuit, GcVk), GarbleError> {
    circuit.validate()?;
    if j > circuit.gates.len() {
        return Err(GarbleError::Malformed(format!(
            "hybrid index {j} exceeds gate count {}",
            circuit.gates.len()
        )));
    }
    let (values, _) = circuit.trace(x)?;
    let mut wire_keys: Vec<Option<[SkeKey; 2]>> = vec![None; circuit.wires];
    for (i, given) in input_labels_for_x.iter().enumerate() {
        let mut pair = [given.clone(), ske_keygen(profile.key_bytes, rng)];
        if x.get(i) {
            pair.swap(0, 1);
        }
        wire_keys[i] = Some(pair);
    }
    for slot in wire_keys.iter_mut().take(circuit.wires).skip(circuit.inputs) {
        *slot = Some([
            ske_keygen(profile.key_bytes, rng),
            ske_keygen(profile.key_bytes, rng),
        ]);
    }
    let mut gates = Vec::with_capacity(circuit.gates.len());
    let mut vks = Vec::with_capacity(circuit.gates.len());
    for (gi, g) in circuit.gates.iter().enumerate() {
        let ka = wire_keys[g.a].clone().unwrap();
        let kb = wire_keys[g.b].clone().unwrap();
        let kc = wire_keys[g.c].clone().unwrap();
        let (vk, gg) = if gi < j {
            let v_c = usize::from(values[g.c]);
            garble_gate_with(&ka, &kb, &kc, |_, _| v_c, profile, oracle, rng)?
        } else {
            garble_gate(g.table, &ka, &kb, &kc, profile, oracle, rng)?
        };
        gates.push(gg);
        vks.push(vk);
    }
    let outputs = circuit
        .outputs
        .iter()
        .map(|&o| {
            let pair = wire_keys[o].clone().unwrap();
            OutputMap {
                entries: [(pair[0].clone(), false), (pair[1].clone(), true)],
            }
        })
        .collect();
    Ok((
        GarbledCircuit {
            topology: circuit.topology(),
            gates,
            outputs,
            profile,
        },
        GcVk { gates: vks },
    ))
}
