use std::collections::HashMap;

use crate::error::Result;

use super::ast::{BinaryOp, Expr, UnaryOp};
use super::jet::Jet3;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Var(usize),
    Const(f64),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
    PowConst(usize, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Var(usize),
    Const(u64),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
    PowConst(usize, u64),
}

/// Several expressions flattened into one instruction sequence with shared
/// subexpressions evaluated once.
#[derive(Debug, Clone)]
pub struct Tape {
    dimension: usize,
    instrs: Vec<Instr>,
    outputs: Vec<usize>,
}

impl Tape {
    pub fn compile(dimension: usize, exprs: &[Expr]) -> Tape {
        let mut builder = Builder {
            instrs: Vec::new(),
            index: HashMap::new(),
        };
        let outputs = exprs.iter().map(|e| builder.push(e)).collect();
        Tape {
            dimension,
            instrs: builder.instrs,
            outputs,
        }
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    /// Jets of every output expression at `p`.
    pub fn eval_jets(&self, p: &[f64]) -> Result<Vec<Jet3>> {
        debug_assert_eq!(p.len(), self.dimension);
        let n = self.dimension;
        let mut regs: Vec<Jet3> = Vec::with_capacity(self.instrs.len());
        for instr in &self.instrs {
            let jet = match *instr {
                Instr::Var(i) => Jet3::variable(n, i, p[i]),
                Instr::Const(c) => Jet3::constant(n, c),
                Instr::Unary(op, a) => regs[a].unary(op)?,
                Instr::Binary(op, a, b) => regs[a].binary(op, &regs[b])?,
                Instr::PowConst(a, c) => regs[a].pow_const(c)?,
            };
            regs.push(jet);
        }
        Ok(self.outputs.iter().map(|&o| regs[o].clone()).collect())
    }
}

struct Builder {
    instrs: Vec<Instr>,
    index: HashMap<Key, usize>,
}

impl Builder {
    fn intern(&mut self, key: Key, instr: Instr) -> usize {
        if let Some(&slot) = self.index.get(&key) {
            return slot;
        }
        let slot = self.instrs.len();
        self.instrs.push(instr);
        self.index.insert(key, slot);
        slot
    }

    fn push(&mut self, e: &Expr) -> usize {
        match e {
            Expr::Var(i) => self.intern(Key::Var(*i), Instr::Var(*i)),
            Expr::Const(c) => self.intern(Key::Const(c.to_bits()), Instr::Const(*c)),
            Expr::Unary(op, a) => {
                let a = self.push(a);
                self.intern(Key::Unary(*op, a), Instr::Unary(*op, a))
            }
            Expr::Binary(BinaryOp::Pow, a, b) => {
                let a = self.push(a);
                match b.constant_value() {
                    Some(c) => self.intern(Key::PowConst(a, c.to_bits()), Instr::PowConst(a, c)),
                    None => {
                        let b = self.push(b);
                        self.intern(
                            Key::Binary(BinaryOp::Pow, a, b),
                            Instr::Binary(BinaryOp::Pow, a, b),
                        )
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let a = self.push(a);
                let b = self.push(b);
                self.intern(Key::Binary(*op, a, b), Instr::Binary(*op, a, b))
            }
        }
    }
}
