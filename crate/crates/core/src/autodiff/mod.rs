//! Reverse-mode automatic differentiation over scalars.
//!
//! All quantities that depend on network parameters are [`Var`]s recorded on
//! a [`Tape`]. Arithmetic on `Var`s appends nodes; [`Tape::backward`] runs a
//! single reverse sweep that accumulates adjoints for every node, in
//! particular for the parameter leaves. Local partials are derived from the
//! stored node values during the sweep, so the tape only keeps values,
//! operation kinds and parent indices.
//!
//! Second derivatives with respect to the scalar input are handled by
//! [`Jet2`], a (value, d/dt, d²/dt²) triple whose components are themselves
//! `Var`s, so losses built from first- and second-order input derivatives
//! stay differentiable with respect to the parameters.

mod jet;

pub use jet::Jet2;

use std::cell::RefCell;

/// Integer power by square-and-multiply with a fixed operation order.
///
/// `f64::powi` may lower to either a multiply chain or a `pow` call
/// depending on codegen context, which breaks bit-exact replay; this
/// helper is used on every path that must agree bitwise.
pub fn powi_det(x: f64, n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi_det(x, -n);
    }
    let mut result = 1.0;
    let mut base = x;
    let mut e = n as u32;
    while e > 0 {
        if e & 1 == 1 {
            result *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    result
}

/// Node operation kinds. Variable-arity kinds (`Sum`, `Dot`, `Affine`) get
/// their parent count from the recorded edge range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum OpKind {
    Leaf,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    AddConst(f64),
    MulConst(f64),
    PowInt(i32),
    Sin,
    Cos,
    Tanh,
    Square,
    /// `1 - x²`, the tanh derivative expressed in the tanh value.
    OneMinusSquare,
    /// `a·b + c`.
    Fma,
    /// `a·b·c`.
    Mul3,
    /// Plain sum of all parents.
    Sum,
    /// Pairwise dot product: parents `[a0, b0, a1, b1, ...]`, accumulated
    /// left to right.
    Dot,
    /// Dot product plus a trailing bias parent.
    Affine,
}

#[derive(Default)]
struct TapeInner {
    ops: Vec<OpKind>,
    first_edge: Vec<u32>,
    num_edges: Vec<u32>,
    values: Vec<f64>,
    parents: Vec<u32>,
}

impl TapeInner {
    fn push(&mut self, value: f64, op: OpKind, parents: &[u32]) -> u32 {
        let index = self.ops.len() as u32;
        self.ops.push(op);
        self.first_edge.push(self.parents.len() as u32);
        self.num_edges.push(parents.len() as u32);
        self.values.push(value);
        self.parents.extend_from_slice(parents);
        index
    }
}

/// Append-only recording of a scalar computation.
///
/// Nodes are topologically ordered by construction: every node's parents
/// were recorded before it. One tape is built per training epoch and
/// cleared for the next; `Var`s must never outlive or cross tapes.
#[derive(Default)]
pub struct Tape {
    inner: RefCell<TapeInner>,
}

/// A differentiable scalar: a handle to one tape node.
///
/// Immutable once created; arithmetic on `Var`s appends new nodes. Mixing
/// operands from different tapes is a structural bug and panics.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    index: u32,
    value: f64,
}

/// Adjoints of every node with respect to one backward root.
///
/// The adjoint of the root itself is exactly 1; nodes the root does not
/// depend on keep adjoint exactly 0.
#[derive(Default)]
pub struct Gradient {
    adjoints: Vec<f64>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of nodes currently recorded.
    pub fn len(&self) -> usize {
        self.inner.borrow().ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drop all recorded nodes, keeping allocated capacity for reuse.
    pub fn clear(&self) {
        let mut inner = self.inner.borrow_mut();
        let inner = &mut *inner;
        inner.ops.clear();
        inner.first_edge.clear();
        inner.num_edges.clear();
        inner.values.clear();
        inner.parents.clear();
    }

    /// Record a leaf (parameter, input or constant).
    pub fn leaf(&self, value: f64) -> Var<'_> {
        let index = self.inner.borrow_mut().push(value, OpKind::Leaf, &[]);
        Var {
            tape: self,
            index,
            value,
        }
    }

    /// Alias of [`Tape::leaf`] for values that are constants of the problem.
    pub fn constant(&self, value: f64) -> Var<'_> {
        self.leaf(value)
    }

    fn push(&self, value: f64, op: OpKind, parents: &[u32]) -> Var<'_> {
        let index = self.inner.borrow_mut().push(value, op, parents);
        Var {
            tape: self,
            index,
            value,
        }
    }

    fn check_same_tape(&self, other: &Tape) {
        assert!(
            std::ptr::eq(self, other),
            "operands belong to different tapes"
        );
    }

    /// `a·b + c` as a single node.
    pub fn fma<'t>(&'t self, a: Var<'t>, b: Var<'t>, c: Var<'t>) -> Var<'t> {
        self.check_same_tape(a.tape);
        self.check_same_tape(b.tape);
        self.check_same_tape(c.tape);
        self.push(
            a.value * b.value + c.value,
            OpKind::Fma,
            &[a.index, b.index, c.index],
        )
    }

    /// `a·b·c` as a single node.
    pub fn mul3<'t>(&'t self, a: Var<'t>, b: Var<'t>, c: Var<'t>) -> Var<'t> {
        self.check_same_tape(a.tape);
        self.check_same_tape(b.tape);
        self.check_same_tape(c.tape);
        self.push(
            a.value * b.value * c.value,
            OpKind::Mul3,
            &[a.index, b.index, c.index],
        )
    }

    /// Sum of an arbitrary number of variables. Empty input yields a zero leaf.
    pub fn sum<'t>(&'t self, terms: &[Var<'t>]) -> Var<'t> {
        if terms.is_empty() {
            return self.leaf(0.0);
        }
        let mut value = 0.0;
        for v in terms {
            self.check_same_tape(v.tape);
            value += v.value;
        }
        let mut inner = self.inner.borrow_mut();
        let inner = &mut *inner;
        let index = inner.ops.len() as u32;
        inner.ops.push(OpKind::Sum);
        inner.first_edge.push(inner.parents.len() as u32);
        inner.num_edges.push(terms.len() as u32);
        inner.values.push(value);
        for v in terms {
            inner.parents.push(v.index);
        }
        Var {
            tape: self,
            index,
            value,
        }
    }

    /// Dot product `Σ aᵢ·bᵢ` recorded as a single node.
    pub fn dot<'t>(&'t self, a: &[Var<'t>], b: &[Var<'t>]) -> Var<'t> {
        assert_eq!(a.len(), b.len(), "dot operands must have equal length");
        if a.is_empty() {
            return self.leaf(0.0);
        }
        let mut value = 0.0;
        for (x, y) in a.iter().zip(b) {
            self.check_same_tape(x.tape);
            self.check_same_tape(y.tape);
            value += x.value * y.value;
        }
        let mut inner = self.inner.borrow_mut();
        let inner = &mut *inner;
        let index = inner.ops.len() as u32;
        inner.ops.push(OpKind::Dot);
        inner.first_edge.push(inner.parents.len() as u32);
        inner.num_edges.push(2 * a.len() as u32);
        inner.values.push(value);
        for (x, y) in a.iter().zip(b) {
            inner.parents.push(x.index);
            inner.parents.push(y.index);
        }
        Var {
            tape: self,
            index,
            value,
        }
    }

    /// `Σ wᵢ·xᵢ + bias` as a single node: the dense-layer primitive.
    pub fn affine<'t>(&'t self, w: &[Var<'t>], x: &[Var<'t>], bias: Var<'t>) -> Var<'t> {
        assert_eq!(w.len(), x.len(), "affine operands must have equal length");
        self.check_same_tape(bias.tape);
        let mut value = 0.0;
        for (a, b) in w.iter().zip(x) {
            self.check_same_tape(a.tape);
            self.check_same_tape(b.tape);
            value += a.value * b.value;
        }
        value += bias.value;
        let mut inner = self.inner.borrow_mut();
        let inner = &mut *inner;
        let index = inner.ops.len() as u32;
        inner.ops.push(OpKind::Affine);
        inner.first_edge.push(inner.parents.len() as u32);
        inner.num_edges.push(2 * w.len() as u32 + 1);
        inner.values.push(value);
        for (a, b) in w.iter().zip(x) {
            inner.parents.push(a.index);
            inner.parents.push(b.index);
        }
        inner.parents.push(bias.index);
        Var {
            tape: self,
            index,
            value,
        }
    }

    /// Affine combination of jets in one borrow session: value component
    /// `Σ wᵢ·uᵢ + bias`, derivative components `Σ wᵢ·duᵢ` and `Σ wᵢ·dduᵢ`.
    pub fn affine_jets<'t>(
        &'t self,
        w: &[Var<'t>],
        jets: &[Jet2<'t>],
        bias: Var<'t>,
    ) -> Jet2<'t> {
        assert_eq!(w.len(), jets.len(), "affine operands must have equal length");
        assert!(!w.is_empty(), "affine combination of nothing");
        self.check_same_tape(bias.tape);
        let mut u_val = 0.0;
        let mut du_val = 0.0;
        let mut ddu_val = 0.0;
        for (a, j) in w.iter().zip(jets) {
            self.check_same_tape(a.tape);
            self.check_same_tape(j.u.tape);
            u_val += a.value * j.u.value;
            du_val += a.value * j.du.value;
            ddu_val += a.value * j.ddu.value;
        }
        u_val += bias.value;

        let mut inner = self.inner.borrow_mut();
        let inner = &mut *inner;
        let u_index = inner.ops.len() as u32;
        inner.ops.push(OpKind::Affine);
        inner.first_edge.push(inner.parents.len() as u32);
        inner.num_edges.push(2 * w.len() as u32 + 1);
        inner.values.push(u_val);
        for (a, j) in w.iter().zip(jets) {
            inner.parents.push(a.index);
            inner.parents.push(j.u.index);
        }
        inner.parents.push(bias.index);

        let du_index = inner.ops.len() as u32;
        inner.ops.push(OpKind::Dot);
        inner.first_edge.push(inner.parents.len() as u32);
        inner.num_edges.push(2 * w.len() as u32);
        inner.values.push(du_val);
        for (a, j) in w.iter().zip(jets) {
            inner.parents.push(a.index);
            inner.parents.push(j.du.index);
        }

        let ddu_index = inner.ops.len() as u32;
        inner.ops.push(OpKind::Dot);
        inner.first_edge.push(inner.parents.len() as u32);
        inner.num_edges.push(2 * w.len() as u32);
        inner.values.push(ddu_val);
        for (a, j) in w.iter().zip(jets) {
            inner.parents.push(a.index);
            inner.parents.push(j.ddu.index);
        }

        Jet2 {
            u: Var {
                tape: self,
                index: u_index,
                value: u_val,
            },
            du: Var {
                tape: self,
                index: du_index,
                value: du_val,
            },
            ddu: Var {
                tape: self,
                index: ddu_index,
                value: ddu_val,
            },
        }
    }

    /// Reverse sweep from `root`, allocating a fresh adjoint buffer.
    pub fn backward(&self, root: Var<'_>) -> Gradient {
        let mut grad = Gradient::default();
        self.backward_into(root, &mut grad);
        grad
    }

    /// Reverse sweep from `root`, reusing the buffer inside `grad`.
    ///
    /// Local partials are reconstructed from the stored node values.
    /// Accumulation is serial in fixed reverse-topological order so that
    /// results are bit-identical run to run.
    pub fn backward_into(&self, root: Var<'_>, grad: &mut Gradient) {
        self.check_same_tape(root.tape);
        let inner = self.inner.borrow();
        let n = root.index as usize + 1;
        assert!(n <= inner.ops.len(), "root is not on this tape");

        let values = &inner.values;
        let parents = &inner.parents;
        let adj = &mut grad.adjoints;
        adj.clear();
        adj.resize(n, 0.0);
        adj[n - 1] = 1.0;

        for i in (0..n).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            let e = inner.first_edge[i] as usize;
            match inner.ops[i] {
                OpKind::Leaf => {}
                OpKind::Add => {
                    adj[parents[e] as usize] += g;
                    adj[parents[e + 1] as usize] += g;
                }
                OpKind::Sub => {
                    adj[parents[e] as usize] += g;
                    adj[parents[e + 1] as usize] -= g;
                }
                OpKind::Mul => {
                    let a = parents[e] as usize;
                    let b = parents[e + 1] as usize;
                    adj[a] += g * values[b];
                    adj[b] += g * values[a];
                }
                OpKind::Div => {
                    let a = parents[e] as usize;
                    let b = parents[e + 1] as usize;
                    adj[a] += g / values[b];
                    adj[b] -= g * values[a] / (values[b] * values[b]);
                }
                OpKind::Neg => adj[parents[e] as usize] -= g,
                OpKind::AddConst(_) => adj[parents[e] as usize] += g,
                OpKind::MulConst(c) => adj[parents[e] as usize] += g * c,
                OpKind::PowInt(k) => {
                    let a = parents[e] as usize;
                    adj[a] += g * f64::from(k) * powi_det(values[a], k - 1);
                }
                OpKind::Sin => {
                    let a = parents[e] as usize;
                    adj[a] += g * values[a].cos();
                }
                OpKind::Cos => {
                    let a = parents[e] as usize;
                    adj[a] -= g * values[a].sin();
                }
                OpKind::Tanh => {
                    let a = parents[e] as usize;
                    let u = values[i];
                    adj[a] += g * (1.0 - u * u);
                }
                OpKind::Square => {
                    let a = parents[e] as usize;
                    adj[a] += g * 2.0 * values[a];
                }
                OpKind::OneMinusSquare => {
                    let a = parents[e] as usize;
                    adj[a] -= g * 2.0 * values[a];
                }
                OpKind::Fma => {
                    let a = parents[e] as usize;
                    let b = parents[e + 1] as usize;
                    let c = parents[e + 2] as usize;
                    adj[a] += g * values[b];
                    adj[b] += g * values[a];
                    adj[c] += g;
                }
                OpKind::Mul3 => {
                    let a = parents[e] as usize;
                    let b = parents[e + 1] as usize;
                    let c = parents[e + 2] as usize;
                    adj[a] += g * values[b] * values[c];
                    adj[b] += g * values[a] * values[c];
                    adj[c] += g * values[a] * values[b];
                }
                OpKind::Sum => {
                    for k in 0..inner.num_edges[i] as usize {
                        adj[parents[e + k] as usize] += g;
                    }
                }
                OpKind::Dot => {
                    let mut k = 0;
                    let n_edges = inner.num_edges[i] as usize;
                    while k < n_edges {
                        let a = parents[e + k] as usize;
                        let b = parents[e + k + 1] as usize;
                        adj[a] += g * values[b];
                        adj[b] += g * values[a];
                        k += 2;
                    }
                }
                OpKind::Affine => {
                    let n_edges = inner.num_edges[i] as usize;
                    let mut k = 0;
                    while k < n_edges - 1 {
                        let a = parents[e + k] as usize;
                        let b = parents[e + k + 1] as usize;
                        adj[a] += g * values[b];
                        adj[b] += g * values[a];
                        k += 2;
                    }
                    adj[parents[e + n_edges - 1] as usize] += g;
                }
            }
        }
    }

    /// Recompute every node value from the leaves.
    ///
    /// Used by tests to check the stored forward values are reproducible
    /// bit-exactly from the recorded operations.
    pub fn replay_values(&self) -> Vec<f64> {
        let inner = self.inner.borrow();
        let parents = &inner.parents;
        let mut vals: Vec<f64> = Vec::with_capacity(inner.ops.len());
        for i in 0..inner.ops.len() {
            let e = inner.first_edge[i] as usize;
            let p = |k: usize| -> f64 { vals[parents[e + k] as usize] };
            let v = match inner.ops[i] {
                OpKind::Leaf => inner.values[i],
                OpKind::Add => p(0) + p(1),
                OpKind::Sub => p(0) - p(1),
                OpKind::Mul => p(0) * p(1),
                OpKind::Div => p(0) / p(1),
                OpKind::Neg => -p(0),
                OpKind::AddConst(c) => p(0) + c,
                OpKind::MulConst(c) => p(0) * c,
                OpKind::PowInt(k) => powi_det(p(0), k),
                OpKind::Sin => p(0).sin(),
                OpKind::Cos => p(0).cos(),
                OpKind::Tanh => p(0).tanh(),
                OpKind::Square => p(0) * p(0),
                OpKind::OneMinusSquare => 1.0 - p(0) * p(0),
                OpKind::Fma => p(0) * p(1) + p(2),
                OpKind::Mul3 => p(0) * p(1) * p(2),
                OpKind::Sum => {
                    let mut acc = 0.0;
                    for k in 0..inner.num_edges[i] as usize {
                        acc += p(k);
                    }
                    acc
                }
                OpKind::Dot => {
                    let mut acc = 0.0;
                    let mut k = 0;
                    while k < inner.num_edges[i] as usize {
                        acc += p(k) * p(k + 1);
                        k += 2;
                    }
                    acc
                }
                OpKind::Affine => {
                    let n_edges = inner.num_edges[i] as usize;
                    let mut acc = 0.0;
                    let mut k = 0;
                    while k < n_edges - 1 {
                        acc += p(k) * p(k + 1);
                        k += 2;
                    }
                    acc + p(n_edges - 1)
                }
            };
            vals.push(v);
        }
        vals
    }

    /// Stored forward values, for the replay check.
    pub fn stored_values(&self) -> Vec<f64> {
        self.inner.borrow().values.clone()
    }
}

impl Gradient {
    /// Adjoint of the backward root with respect to `v`.
    ///
    /// Zero for any node the root does not depend on, including nodes
    /// recorded after the root.
    pub fn wrt(&self, v: Var<'_>) -> f64 {
        self.adjoints
            .get(v.index as usize)
            .copied()
            .unwrap_or(0.0)
    }
}

impl<'t> Var<'t> {
    pub fn value(self) -> f64 {
        self.value
    }

    pub(crate) fn tape(self) -> &'t Tape {
        self.tape
    }

    fn unary(self, value: f64, op: OpKind) -> Var<'t> {
        self.tape.push(value, op, &[self.index])
    }

    fn binary(self, rhs: Var<'t>, value: f64, op: OpKind) -> Var<'t> {
        self.tape.check_same_tape(rhs.tape);
        self.tape.push(value, op, &[self.index, rhs.index])
    }

    pub fn sin(self) -> Var<'t> {
        self.unary(self.value.sin(), OpKind::Sin)
    }

    pub fn cos(self) -> Var<'t> {
        self.unary(self.value.cos(), OpKind::Cos)
    }

    pub fn tanh(self) -> Var<'t> {
        self.unary(self.value.tanh(), OpKind::Tanh)
    }

    pub fn square(self) -> Var<'t> {
        self.unary(self.value * self.value, OpKind::Square)
    }

    /// `1 - x²` as one node (the tanh derivative pattern).
    pub fn one_minus_square(self) -> Var<'t> {
        self.unary(1.0 - self.value * self.value, OpKind::OneMinusSquare)
    }

    /// Integer power `xᵏ` with local partial `k·xᵏ⁻¹`.
    pub fn powi(self, k: i32) -> Var<'t> {
        self.unary(powi_det(self.value, k), OpKind::PowInt(k))
    }

    pub fn add_const(self, c: f64) -> Var<'t> {
        self.unary(self.value + c, OpKind::AddConst(c))
    }

    pub fn mul_const(self, c: f64) -> Var<'t> {
        self.unary(self.value * c, OpKind::MulConst(c))
    }
}

impl std::ops::Add for Var<'_> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.binary(rhs, self.value + rhs.value, OpKind::Add)
    }
}

impl std::ops::Sub for Var<'_> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.binary(rhs, self.value - rhs.value, OpKind::Sub)
    }
}

impl std::ops::Mul for Var<'_> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.binary(rhs, self.value * rhs.value, OpKind::Mul)
    }
}

impl std::ops::Div for Var<'_> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.value != 0.0, "division by zero");
        self.binary(rhs, self.value / rhs.value, OpKind::Div)
    }
}

impl std::ops::Neg for Var<'_> {
    type Output = Self;
    fn neg(self) -> Self {
        self.unary(-self.value, OpKind::Neg)
    }
}

impl std::ops::Add<f64> for Var<'_> {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        self.add_const(c)
    }
}

impl std::ops::Sub<f64> for Var<'_> {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        self.add_const(-c)
    }
}

impl std::ops::Mul<f64> for Var<'_> {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        self.mul_const(c)
    }
}

impl<'t> std::ops::Mul<Var<'t>> for f64 {
    type Output = Var<'t>;
    fn mul(self, v: Var<'t>) -> Var<'t> {
        v.mul_const(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::{central_diff, rel_err};

    #[test]
    fn tanh_at_origin() {
        let tape = Tape::new();
        let x = tape.leaf(0.0);
        let y = x.tanh();
        assert_eq!(y.value(), 0.0);
        let g = tape.backward(y);
        assert_eq!(g.wrt(x), 1.0);
    }

    #[test]
    fn mul_partials_are_operand_values() {
        let tape = Tape::new();
        let a = tape.leaf(3.0);
        let b = tape.leaf(4.0);
        let y = a * b;
        assert_eq!(y.value(), 12.0);
        let g = tape.backward(y);
        assert_eq!(g.wrt(a), 4.0);
        assert_eq!(g.wrt(b), 3.0);
    }

    #[test]
    fn tanh_of_square_matches_finite_difference() {
        let f = |x: f64| (x * x).tanh();
        let tape = Tape::new();
        let x = tape.leaf(0.7);
        let y = x.square().tanh();
        let g = tape.backward(y);
        let fd = central_diff(f, 0.7, 1e-6);
        assert!(rel_err(g.wrt(x), fd) <= 1e-6);
    }

    #[test]
    fn power_rule() {
        let tape = Tape::new();
        let x = tape.leaf(3.0);
        let y = x.square();
        let g = tape.backward(y);
        assert_eq!(g.wrt(x), 6.0);
    }

    #[test]
    fn sin_cos_product_at_zero() {
        // d/dx [sin x · cos x] = cos 2x = 1 at x = 0.
        let tape = Tape::new();
        let x = tape.leaf(0.0);
        let y = x.sin() * x.cos();
        let g = tape.backward(y);
        assert_eq!(g.wrt(x), 1.0);
    }

    #[test]
    fn fan_out_accumulates_additively() {
        // y = x·x + x: dy/dx = 2x + 1.
        let tape = Tape::new();
        let x = tape.leaf(1.5);
        let y = x * x + x;
        let g = tape.backward(y);
        assert_eq!(g.wrt(x), 4.0);
    }

    #[test]
    fn root_adjoint_is_one_and_unreachable_is_zero() {
        let tape = Tape::new();
        let x = tape.leaf(2.0);
        let unused = tape.leaf(5.0);
        let y = x.square();
        let after = tape.leaf(7.0);
        let g = tape.backward(y);
        assert_eq!(g.wrt(y), 1.0);
        assert_eq!(g.wrt(unused), 0.0);
        assert_eq!(g.wrt(after), 0.0);
    }

    #[test]
    fn dot_matches_elementwise() {
        let tape = Tape::new();
        let a: Vec<_> = [1.0, -2.0, 0.5].iter().map(|&v| tape.leaf(v)).collect();
        let b: Vec<_> = [3.0, 0.25, -4.0].iter().map(|&v| tape.leaf(v)).collect();
        let d = tape.dot(&a, &b);
        assert_eq!(d.value(), 1.0 * 3.0 + (-2.0) * 0.25 + 0.5 * (-4.0));
        let g = tape.backward(d);
        for i in 0..3 {
            assert_eq!(g.wrt(a[i]), b[i].value());
            assert_eq!(g.wrt(b[i]), a[i].value());
        }
    }

    #[test]
    fn affine_adds_bias_with_unit_partial() {
        let tape = Tape::new();
        let w: Vec<_> = [2.0, -1.0].iter().map(|&v| tape.leaf(v)).collect();
        let x: Vec<_> = [0.5, 3.0].iter().map(|&v| tape.leaf(v)).collect();
        let bias = tape.leaf(0.25);
        let y = tape.affine(&w, &x, bias);
        assert_eq!(y.value(), 2.0 * 0.5 + (-1.0) * 3.0 + 0.25);
        let g = tape.backward(y);
        assert_eq!(g.wrt(bias), 1.0);
        assert_eq!(g.wrt(w[1]), 3.0);
        assert_eq!(g.wrt(x[0]), 2.0);
    }

    #[test]
    fn fused_ops_match_their_compositions() {
        let tape = Tape::new();
        let a = tape.leaf(1.3);
        let b = tape.leaf(-0.7);
        let c = tape.leaf(2.1);

        let fma = tape.fma(a, b, c);
        let composed = a * b + c;
        assert_eq!(fma.value().to_bits(), composed.value().to_bits());
        let g = tape.backward(fma);
        assert_eq!(g.wrt(a), b.value());
        assert_eq!(g.wrt(c), 1.0);

        let m3 = tape.mul3(a, b, c);
        assert_eq!(m3.value().to_bits(), (a.value() * b.value() * c.value()).to_bits());
        let g = tape.backward(m3);
        assert!(rel_err(g.wrt(b), a.value() * c.value()) < 1e-15);

        let oms = a.one_minus_square();
        assert_eq!(oms.value(), 1.0 - 1.3 * 1.3);
        let g = tape.backward(oms);
        assert_eq!(g.wrt(a), -2.0 * 1.3);
    }

    #[test]
    fn replay_reproduces_values_bit_exactly() {
        let tape = Tape::new();
        let x = tape.leaf(0.3);
        let y = tape.leaf(-1.2);
        let a = (x * y + 2.5).tanh();
        let b = a.sin() * x.cos() - y.powi(3);
        let c = b / (x.square() + 1.0);
        let d = tape.fma(a, b, c);
        let e = tape.mul3(a, c, d) + x.one_minus_square();
        let w = vec![a, b];
        let xs = vec![c, d];
        let f = tape.affine(&w, &xs, e);
        let _ = tape.sum(&[a, b, c, d, e, f]);
        let replayed = tape.replay_values();
        let stored = tape.stored_values();
        assert_eq!(replayed.len(), stored.len());
        for (i, (r, s)) in replayed.iter().zip(&stored).enumerate() {
            assert_eq!(r.to_bits(), s.to_bits(), "node {i}: replay {r:e} vs stored {s:e}");
        }
    }

    #[test]
    fn identical_inputs_produce_identical_tapes() {
        let build = || {
            let tape = Tape::new();
            let x = tape.leaf(0.77);
            let y = ((x.sin() * x + 0.1).tanh() - x.square() * 0.3).powi(2);
            let g = tape.backward(y);
            (y.value(), g.wrt(x), tape.len())
        };
        let (v1, g1, n1) = build();
        let (v2, g2, n2) = build();
        assert_eq!(v1.to_bits(), v2.to_bits());
        assert_eq!(g1.to_bits(), g2.to_bits());
        assert_eq!(n1, n2);
    }

    #[test]
    #[should_panic(expected = "different tapes")]
    fn cross_tape_operands_panic() {
        let t1 = Tape::new();
        let t2 = Tape::new();
        let a = t1.leaf(1.0);
        let b = t2.leaf(2.0);
        let _ = a + b;
    }

    #[test]
    #[should_panic(expected = "division by zero")]
    fn division_by_zero_panics() {
        let tape = Tape::new();
        let a = tape.leaf(1.0);
        let b = tape.leaf(0.0);
        let _ = a / b;
    }

    #[test]
    fn clear_keeps_tape_usable() {
        let tape = Tape::new();
        let x = tape.leaf(1.0);
        let _ = x.square();
        assert_eq!(tape.len(), 2);
        tape.clear();
        assert!(tape.is_empty());
        let y = tape.leaf(3.0);
        let g = tape.backward(y.square());
        assert_eq!(g.wrt(y), 6.0);
    }
}
