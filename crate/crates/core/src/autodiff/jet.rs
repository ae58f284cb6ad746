//! Second-order forward jets over reverse-mode variables.
//!
//! A [`Jet2`] carries `(u, du/dt, d²u/dt²)` as three [`Var`]s on one tape.
//! Propagating jets through the network exposes the input derivatives needed
//! by equation residuals, while the components remain ordinary tape nodes, so
//! one reverse sweep still yields parameter gradients of any loss built from
//! them.

use super::{Tape, Var};

/// (value, first, second) derivative triple with respect to the scalar input.
#[derive(Clone, Copy)]
pub struct Jet2<'t> {
    pub u: Var<'t>,
    pub du: Var<'t>,
    pub ddu: Var<'t>,
}

impl<'t> Jet2<'t> {
    /// Lift the input coordinate: `(t, 1, 0)`.
    ///
    /// The derivative components are constants, not parameters.
    pub fn lift_input(tape: &'t Tape, t: f64) -> Self {
        Jet2 {
            u: tape.leaf(t),
            du: tape.leaf(1.0),
            ddu: tape.leaf(0.0),
        }
    }

    /// A value with no input dependence: `(c, 0, 0)`.
    pub fn constant(tape: &'t Tape, c: f64) -> Self {
        Jet2 {
            u: tape.leaf(c),
            du: tape.leaf(0.0),
            ddu: tape.leaf(0.0),
        }
    }

    /// Treat an existing variable (e.g. a parameter) as input-independent.
    pub fn from_var(v: Var<'t>) -> Self {
        let tape = v.tape();
        Jet2 {
            u: v,
            du: tape.leaf(0.0),
            ddu: tape.leaf(0.0),
        }
    }

    fn tape(self) -> &'t Tape {
        self.u.tape()
    }

    pub fn scale(self, c: f64) -> Self {
        Jet2 {
            u: self.u.mul_const(c),
            du: self.du.mul_const(c),
            ddu: self.ddu.mul_const(c),
        }
    }

    /// Multiply by an input-independent variable (a parameter).
    pub fn mul_var(self, w: Var<'t>) -> Self {
        Jet2 {
            u: self.u * w,
            du: self.du * w,
            ddu: self.ddu * w,
        }
    }

    pub fn tanh(self) -> Self {
        // u = tanh(z): u' = (1 - u²)·z', u'' = (1 - u²)·z'' - 2·u·u'·z'.
        let tape = self.tape();
        let u = self.u.tanh();
        let s = u.one_minus_square();
        let du = s * self.du;
        let correction = tape.mul3(u, du, self.du).mul_const(-2.0);
        let ddu = tape.fma(s, self.ddu, correction);
        Jet2 { u, du, ddu }
    }

    pub fn sin(self) -> Self {
        let u = self.u.sin();
        let c = self.u.cos();
        let du = c * self.du;
        let ddu = c * self.ddu - u * self.du.square();
        Jet2 { u, du, ddu }
    }

    pub fn cos(self) -> Self {
        let u = self.u.cos();
        let s = self.u.sin();
        let du = -(s * self.du);
        let ddu = -(s * self.ddu) - u * self.du.square();
        Jet2 { u, du, ddu }
    }

    /// Integer power by truncated Taylor arithmetic:
    /// `(zᵏ)'' = k·zᵏ⁻¹·z'' + k(k-1)·zᵏ⁻²·(z')²`.
    pub fn powi(self, k: i32) -> Self {
        let u = self.u.powi(k);
        let zk1 = self.u.powi(k - 1);
        let du = zk1.mul_const(f64::from(k)) * self.du;
        let zk2 = self.u.powi(k - 2);
        let ddu = zk1.mul_const(f64::from(k)) * self.ddu
            + (zk2 * self.du.square()).mul_const(f64::from(k) * f64::from(k - 1));
        Jet2 { u, du, ddu }
    }

    /// Dot product of input-independent weights with jets, plus optional bias:
    /// the dense-layer primitive. Records one fused node per component.
    pub fn affine(weights: &[Var<'t>], inputs: &[Jet2<'t>], bias: Option<Var<'t>>) -> Self {
        assert!(!weights.is_empty(), "affine combination of nothing");
        let tape = inputs[0].tape();
        let bias = bias.unwrap_or_else(|| tape.leaf(0.0));
        tape.affine_jets(weights, inputs, bias)
    }
}

impl<'t> std::ops::Add for Jet2<'t> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Jet2 {
            u: self.u + rhs.u,
            du: self.du + rhs.du,
            ddu: self.ddu + rhs.ddu,
        }
    }
}

impl<'t> std::ops::Sub for Jet2<'t> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Jet2 {
            u: self.u - rhs.u,
            du: self.du - rhs.du,
            ddu: self.ddu - rhs.ddu,
        }
    }
}

impl<'t> std::ops::Mul for Jet2<'t> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // Leibniz to second order: (fg)'' = f''g + 2f'g' + fg''.
        Jet2 {
            u: self.u * rhs.u,
            du: self.du * rhs.u + self.u * rhs.du,
            ddu: self.ddu * rhs.u
                + (self.du * rhs.du).mul_const(2.0)
                + self.u * rhs.ddu,
        }
    }
}

impl<'t> std::ops::Neg for Jet2<'t> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}
