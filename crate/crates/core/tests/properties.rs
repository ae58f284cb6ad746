//! Property tests over the differentiation, network and sampling
//! invariants.

use proptest::prelude::*;

use pinn_ode::autodiff::Tape;
use pinn_ode::bench::mse_between;
use pinn_ode::fd::rel_err;
use pinn_ode::integrators::uniform_grid;
use pinn_ode::network::{Mlp, MlpConfig};

/// A small expression language for random tapes.
#[derive(Debug, Clone)]
enum Expr {
    Leaf(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    GuardedDiv(Box<Expr>, Box<Expr>),
    Tanh(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Square(Box<Expr>),
    Scale(Box<Expr>, f64),
}

fn expr_strategy(n_leaves: usize) -> impl Strategy<Value = Expr> {
    let leaf = (0..n_leaves).prop_map(Expr::Leaf);
    leaf.prop_recursive(5, 64, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(a.into(), b.into())),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::GuardedDiv(a.into(), b.into())),
            inner.clone().prop_map(|a| Expr::Tanh(a.into())),
            inner.clone().prop_map(|a| Expr::Sin(a.into())),
            inner.clone().prop_map(|a| Expr::Cos(a.into())),
            inner.clone().prop_map(|a| Expr::Square(a.into())),
            (inner, -2.0..2.0).prop_map(|(a, c)| Expr::Scale(a.into(), c)),
        ]
    })
}

fn eval_expr<'t>(
    e: &Expr,
    leaves: &[pinn_ode::autodiff::Var<'t>],
) -> pinn_ode::autodiff::Var<'t> {
    match e {
        Expr::Leaf(k) => leaves[*k],
        Expr::Add(a, b) => eval_expr(a, leaves) + eval_expr(b, leaves),
        Expr::Sub(a, b) => eval_expr(a, leaves) - eval_expr(b, leaves),
        Expr::Mul(a, b) => {
            let x = eval_expr(a, leaves).tanh();
            let y = eval_expr(b, leaves).tanh();
            x * y
        }
        Expr::GuardedDiv(a, b) => {
            let x = eval_expr(a, leaves);
            let y = eval_expr(b, leaves);
            x / (y.square() + 1.0)
        }
        Expr::Tanh(a) => eval_expr(a, leaves).tanh(),
        Expr::Sin(a) => eval_expr(a, leaves).sin(),
        Expr::Cos(a) => eval_expr(a, leaves).cos(),
        Expr::Square(a) => eval_expr(a, leaves).tanh().square(),
        Expr::Scale(a, c) => eval_expr(a, leaves).mul_const(*c),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Reverse-mode gradients of arbitrary composites match central
    /// finite differences.
    #[test]
    fn gradient_matches_finite_differences(
        expr in expr_strategy(3),
        values in proptest::array::uniform3(-1.2f64..1.2),
    ) {
        let f = |vals: &[f64]| {
            let tape = Tape::new();
            let leaves: Vec<_> = vals.iter().map(|&v| tape.leaf(v)).collect();
            eval_expr(&expr, &leaves).value()
        };
        let tape = Tape::new();
        let leaves: Vec<_> = values.iter().map(|&v| tape.leaf(v)).collect();
        let root = eval_expr(&expr, &leaves);
        let grad = tape.backward(root);
        for k in 0..3 {
            let h = 1e-6 * values[k].abs().max(1.0);
            let mut plus = values;
            plus[k] += h;
            let mut minus = values;
            minus[k] -= h;
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            let ad = grad.wrt(leaves[k]);
            if ad.abs() > 1e-8 || fd.abs() > 1e-6 {
                prop_assert!(
                    rel_err(ad, fd) <= 1e-5,
                    "leaf {}: ad {} vs fd {}", k, ad, fd
                );
            }
        }
    }

    /// Replaying any recorded tape reproduces the stored values bitwise.
    #[test]
    fn tape_replay_is_bit_exact(
        expr in expr_strategy(3),
        values in proptest::array::uniform3(-2.0f64..2.0),
    ) {
        let tape = Tape::new();
        let leaves: Vec<_> = values.iter().map(|&v| tape.leaf(v)).collect();
        let _ = eval_expr(&expr, &leaves);
        let replayed = tape.replay_values();
        let stored = tape.stored_values();
        for (r, s) in replayed.iter().zip(&stored) {
            prop_assert_eq!(r.to_bits(), s.to_bits());
        }
    }

    /// Canonical flatten/assign is a bitwise round trip for any shape.
    #[test]
    fn params_round_trip(
        hidden in 1usize..4,
        neurons in 1usize..12,
        out_dim in 1usize..3,
        seed in any::<u64>(),
    ) {
        let a = Mlp::init(MlpConfig {
            input_dim: 1,
            hidden_layers: hidden,
            neurons_per_layer: neurons,
            output_dim: out_dim,
            seed,
        }).unwrap();
        let flat = a.params_flatten();
        prop_assert_eq!(flat.len(), a.config().param_count());
        let mut b = Mlp::init(*a.config()).unwrap();
        b.params_assign(&flat).unwrap();
        prop_assert_eq!(a.params_flatten(), b.params_flatten());
        let t = 0.37;
        prop_assert_eq!(a.eval(t)[0].to_bits(), b.eval(t)[0].to_bits());
    }

    /// The evaluation MSE is symmetric in its two functions.
    #[test]
    fn mse_is_oracle_symmetric(a in -2.0f64..2.0, b in -2.0f64..2.0, n in 2usize..50) {
        let ts = uniform_grid(n, (0.0, 1.0));
        let f = move |t: f64| vec![(a * t).sin(), a * t];
        let g = move |t: f64| vec![b * t * t, (b * t).cos()];
        let x = mse_between(f, g, &ts);
        let y = mse_between(g, f, &ts);
        prop_assert_eq!(x.to_bits(), y.to_bits());
    }

    /// Uniform grids include both endpoints, are sorted, and are
    /// reproducible.
    #[test]
    fn uniform_grid_contract(n in 1usize..200, lo in -5.0f64..5.0, span in 0.1f64..20.0) {
        let hi = lo + span;
        let g = uniform_grid(n, (lo, hi));
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g[0], lo);
        if n > 1 {
            prop_assert_eq!(*g.last().unwrap(), hi);
        }
        for w in g.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        prop_assert_eq!(&g, &uniform_grid(n, (lo, hi)));
    }
}
