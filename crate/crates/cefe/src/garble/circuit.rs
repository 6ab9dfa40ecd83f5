//! Leveled boolean circuit IR.
//!
//! Wires `0..n` are inputs at level 0; every gate produces exactly one new
//! wire. The circuit is strictly leveled: a gate at level `l` reads only
//! wires produced at level `l - 1`, so values never skip levels; builders
//! insert pass-through gates where needed.

use crate::bits::BitVec;

use super::GarbleError;

/// Truth-table gate tables, bit `(a << 1) | b` holding `g(a, b)`.
pub const TABLE_XOR: u8 = 0b0110;
pub const TABLE_AND: u8 = 0b1000;
pub const TABLE_COPY_A: u8 = 0b1100;
pub const TABLE_CONST0: u8 = 0b0000;
pub const TABLE_CONST1: u8 = 0b1111;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub level: u32,
    pub table: u8,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Gate {
    #[inline]
    pub fn eval(&self, va: bool, vb: bool) -> bool {
        let idx = (usize::from(va) << 1) | usize::from(vb);
        self.table >> idx & 1 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeveledCircuit {
    pub inputs: usize,
    pub wires: usize,
    pub gates: Vec<Gate>,
    pub outputs: Vec<usize>,
}

/// Gate connectivity without truth tables, as handed to the simulator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub inputs: usize,
    pub wires: usize,
    pub gates: Vec<(u32, usize, usize, usize)>,
    pub outputs: Vec<usize>,
}

impl LeveledCircuit {
    /// Check the leveled-circuit invariants.
    pub fn validate(&self) -> Result<(), GarbleError> {
        if self.wires != self.inputs + self.gates.len() {
            return Err(GarbleError::Malformed(format!(
                "wire count {} != inputs {} + gates {}",
                self.wires,
                self.inputs,
                self.gates.len()
            )));
        }
        let mut level = vec![None::<u32>; self.wires];
        for slot in level.iter_mut().take(self.inputs) {
            *slot = Some(0);
        }
        let mut last_level = 1u32;
        for (gi, g) in self.gates.iter().enumerate() {
            if g.table > 0x0F {
                return Err(GarbleError::Malformed(format!("gate {gi}: bad table")));
            }
            if g.level < last_level {
                return Err(GarbleError::Malformed(format!(
                    "gate {gi}: levels must be ascending"
                )));
            }
            last_level = g.level;
            if g.a >= self.wires || g.b >= self.wires || g.c >= self.wires {
                return Err(GarbleError::Malformed(format!(
                    "gate {gi}: wire out of range"
                )));
            }
            for (name, w) in [("a", g.a), ("b", g.b)] {
                match level[w] {
                    Some(l) if l + 1 == g.level => {}
                    Some(l) => {
                        return Err(GarbleError::Malformed(format!(
                            "gate {gi}: input {name} at level {l}, gate at {}",
                            g.level
                        )))
                    }
                    None => {
                        return Err(GarbleError::Malformed(format!(
                            "gate {gi}: input {name} not yet produced"
                        )))
                    }
                }
            }
            if level[g.c].is_some() {
                return Err(GarbleError::Malformed(format!(
                    "gate {gi}: wire {} written twice",
                    g.c
                )));
            }
            level[g.c] = Some(g.level);
        }
        for &o in &self.outputs {
            if o >= self.wires || level[o].is_none() {
                return Err(GarbleError::Malformed(format!("output wire {o} undefined")));
            }
        }
        Ok(())
    }

    /// Plain evaluation on the IR: the oracle every garbled path is
    /// checked against.
    pub fn eval(&self, x: &BitVec) -> Result<BitVec, GarbleError> {
        if x.len() != self.inputs {
            return Err(GarbleError::InputLength {
                want: self.inputs,
                got: x.len(),
            });
        }
        Ok(self.trace(x)?.1)
    }

    /// Evaluate and return all wire values plus the outputs.
    pub fn trace(&self, x: &BitVec) -> Result<(Vec<bool>, BitVec), GarbleError> {
        if x.len() != self.inputs {
            return Err(GarbleError::InputLength {
                want: self.inputs,
                got: x.len(),
            });
        }
        let mut values = vec![false; self.wires];
        for (i, slot) in values.iter_mut().enumerate().take(self.inputs) {
            *slot = x.get(i);
        }
        for g in &self.gates {
            values[g.c] = g.eval(values[g.a], values[g.b]);
        }
        let out = BitVec::from_bools(&self.outputs.iter().map(|&o| values[o]).collect::<Vec<_>>());
        Ok((values, out))
    }

    pub fn topology(&self) -> Topology {
        Topology {
            inputs: self.inputs,
            wires: self.wires,
            gates: self
                .gates
                .iter()
                .map(|g| (g.level, g.a, g.b, g.c))
                .collect(),
            outputs: self.outputs.clone(),
        }
    }

    /// Circuit text format: header `n m p q`, one line per gate
    /// `level g4bits wa wb wc` (table chars in order g00 g01 g10 g11),
    /// then the output wires on one line.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.inputs,
            self.outputs.len(),
            self.wires,
            self.gates.len()
        );
        for g in &self.gates {
            let tbl: String = (0..4).map(|i| if g.table >> i & 1 == 1 { '1' } else { '0' }).collect();
            s.push_str(&format!("{} {} {} {} {}\n", g.level, tbl, g.a, g.b, g.c));
        }
        let outs: Vec<String> = self.outputs.iter().map(|o| o.to_string()).collect();
        s.push_str(&outs.join(" "));
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GarbleError> {
        let bad = |m: &str| GarbleError::Malformed(format!("circuit text: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad header")))
            .collect::<Result<_, _>>()?;
        if h.len() != 4 {
            return Err(bad("header needs n m p q"));
        }
        let (n, m, p, q) = (h[0], h[1], h[2], h[3]);
        let mut gates = Vec::with_capacity(q);
        for _ in 0..q {
            let line = lines.next().ok_or_else(|| bad("missing gate line"))?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 5 {
                return Err(bad("gate line needs 5 fields"));
            }
            let level: u32 = t[0].parse().map_err(|_| bad("bad level"))?;
            if t[1].len() != 4 {
                return Err(bad("table needs 4 bits"));
            }
            let mut table = 0u8;
            for (i, ch) in t[1].chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => table |= 1 << i,
                    _ => return Err(bad("table bits must be 0/1")),
                }
            }
            let a: usize = t[2].parse().map_err(|_| bad("bad wire"))?;
            let b: usize = t[3].parse().map_err(|_| bad("bad wire"))?;
            let c: usize = t[4].parse().map_err(|_| bad("bad wire"))?;
            gates.push(Gate {
                level,
                table,
                a,
                b,
                c,
            });
        }
        let out_line = lines.next().ok_or_else(|| bad("missing outputs"))?;
        let outputs: Vec<usize> = out_line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad output wire")))
            .collect::<Result<_, _>>()?;
        if outputs.len() != m {
            return Err(bad("output count mismatch"));
        }
        let c = LeveledCircuit {
            inputs: n,
            wires: p,
            gates,
            outputs,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Incremental builder that maintains strict leveling by inserting
/// pass-through gates.
pub struct CircuitBuilder {
    inputs: usize,
    gates: Vec<Gate>,
    wire_level: Vec<u32>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        Self {
            inputs,
            gates: Vec::new(),
            wire_level: vec![0; inputs],
        }
    }

    pub fn level_of(&self, wire: usize) -> u32 {
        self.wire_level[wire]
    }

    fn push_gate(&mut self, level: u32, table: u8, a: usize, b: usize) -> usize {
        let c = self.wire_level.len();
        self.wire_level.push(level);
        self.gates.push(Gate {
            level,
            table,
            a,
            b,
            c,
        });
        c
    }

    /// Chain pass-through gates until `wire` reaches `level`.
    pub fn lift(&mut self, mut wire: usize, level: u32) -> usize {
        while self.wire_level[wire] < level {
            let l = self.wire_level[wire] + 1;
            wire = self.push_gate(l, TABLE_COPY_A, wire, wire);
        }
        wire
    }

    /// Binary gate; operands are lifted to a common level first.
    pub fn gate(&mut self, table: u8, a: usize, b: usize) -> usize {
        let target = self.wire_level[a].max(self.wire_level[b]) + 1;
        let a = self.lift(a, target - 1);
        let b = self.lift(b, target - 1);
        self.push_gate(target, table, a, b)
    }

    /// A constant wire at level 1 (reads input 0, ignores it).
    pub fn constant(&mut self, value: bool) -> usize {
        assert!(self.inputs > 0, "constants need a donor input wire");
        let table = if value { TABLE_CONST1 } else { TABLE_CONST0 };
        self.push_gate(1, table, 0, 0)
    }

    /// `wire AND constant`: pass-through when the constant is 1, a fresh
    /// constant-0 gate otherwise (reading `wire` keeps the shape uniform).
    pub fn and_const(&mut self, wire: usize, constant: bool) -> usize {
        let level = self.wire_level[wire] + 1;
        let table = if constant { TABLE_COPY_A } else { TABLE_CONST0 };
        self.push_gate(level, table, wire, wire)
    }

    /// Balanced XOR tree; an empty list yields a constant 0.
    pub fn xor_many(&mut self, wires: &[usize]) -> usize {
        if wires.is_empty() {
            return self.constant(false);
        }
        let mut layer: Vec<usize> = wires.to_vec();
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            let mut it = layer.chunks(2);
            for pair in &mut it {
                match pair {
                    [a, b] => next.push(self.gate(TABLE_XOR, *a, *b)),
                    [a] => next.push(*a),
                    _ => unreachable!(),
                }
            }
            layer = next;
        }
        layer[0]
    }

    pub fn finish(self, outputs: Vec<usize>) -> Result<LeveledCircuit, GarbleError> {
        let mut gates = self.gates;
        gates.sort_by_key(|g| g.level);
        let c = LeveledCircuit {
            inputs: self.inputs,
            wires: self.wire_level.len(),
            gates,
            outputs,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Uniform random leveled circuit for property tests.
pub fn random_circuit<R: rand::Rng + ?Sized>(
    inputs: usize,
    gate_count: usize,
    outputs: usize,
    rng: &mut R,
) -> LeveledCircuit {
    assert!(inputs >= 1);
    let mut b = CircuitBuilder::new(inputs);
    let mut pool: Vec<usize> = (0..inputs).collect();
    for _ in 0..gate_count {
        let a = pool[rng.gen_range(0..pool.len())];
        let bw = pool[rng.gen_range(0..pool.len())];
        let table = rng.gen_range(0..16) as u8;
        let c = b.gate(table, a, bw);
        pool.push(c);
    }
    let outs: Vec<usize> = (0..outputs)
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect();
    b.finish(outs).expect("builder output is always leveled")
}
