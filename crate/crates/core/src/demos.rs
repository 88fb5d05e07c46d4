//! Ready-made functions for the worked examples: foreign-stock P&L and a
//! shared utility bill.

use crate::coords::Dimension;
use crate::expr::{BinOp, Expr, Expression, Func, FunctionHandle};

/// P&L of a foreign stock in home currency:
/// `F(x₁, x₂) = (x₁ + s₀)(x₂ + c₀) − s₀c₀`, with `x₁` the stock move and `x₂`
/// the exchange-rate move.
pub fn stock_fx_pnl(s0: f64, c0: f64) -> FunctionHandle {
    stock_fx_pnl_in(s0, c0, Dimension::new(2).expect("d = 2"))
}

/// [`stock_fx_pnl`] embedded in `d ≥ 2` dimensions; `x₃, …` are ignored.
pub(crate) fn stock_fx_pnl_in(s0: f64, c0: f64, d: Dimension) -> FunctionHandle {
    let e = Expr::bin(
        BinOp::Sub,
        Expr::bin(
            BinOp::Mul,
            Expr::bin(BinOp::Add, Expr::var(0), Expr::num(s0)),
            Expr::bin(BinOp::Add, Expr::var(1), Expr::num(c0)),
        ),
        Expr::num(s0 * c0),
    );
    Expression::new(e, d).expect("uses x1, x2 only").into_handle()
}

/// Closed-form AS split of [`stock_fx_pnl`]:
/// `G₁ = x₁x₂/2 + x₁c₀`, `G₂ = x₁x₂/2 + x₂s₀`.
pub fn stock_fx_closed_form(s0: f64, c0: f64, x: [f64; 2]) -> [f64; 2] {
    let cross = x[0] * x[1] / 2.0;
    [cross + x[0] * c0, cross + x[1] * s0]
}

/// Utility bill as a function of total consumption: a fixed charge, a unit
/// rate, and an optional discounted rate above a volume threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tariff {
    pub fixed: f64,
    pub rate: f64,
    /// `(threshold, discounted rate)`.
    pub discount: Option<(f64, f64)>,
}

impl Tariff {
    pub fn linear(fixed: f64, rate: f64) -> Self {
        Self { fixed, rate, discount: None }
    }

    pub fn cost(&self, consumption: f64) -> f64 {
        match self.discount {
            None => self.fixed + self.rate * consumption,
            Some((k, r2)) => self.fixed + self.rate * consumption.min(k) + r2 * (consumption - k).max(0.0),
        }
    }

    fn expr(&self, t: Expr) -> Expr {
        let fixed = Expr::num(self.fixed);
        match self.discount {
            None => Expr::bin(BinOp::Add, fixed, Expr::bin(BinOp::Mul, Expr::num(self.rate), t)),
            Some((k, r2)) => {
                let base = Expr::bin(BinOp::Mul, Expr::num(self.rate), Expr::call(Func::Min, vec![t.clone(), Expr::num(k)]));
                let above = Expr::call(
                    Func::Max,
                    vec![Expr::bin(BinOp::Sub, t, Expr::num(k)), Expr::num(0.0)],
                );
                let extra = Expr::bin(BinOp::Mul, Expr::num(r2), above);
                Expr::bin(BinOp::Add, Expr::bin(BinOp::Add, fixed, base), extra)
            }
        }
    }
}

/// `F(x) = f(x₁ + ⋯ + x_d)` for a tariff `f`.
pub fn shared_bill(tariff: Tariff, d: Dimension) -> FunctionHandle {
    shared_bill_in(tariff, d.get(), d)
}

/// The bill of the first `users` coordinates, embedded in `d` dimensions.
pub(crate) fn shared_bill_in(tariff: Tariff, users: usize, d: Dimension) -> FunctionHandle {
    let total = (1..users).fold(Expr::var(0), |acc, i| Expr::bin(BinOp::Add, acc, Expr::var(i)));
    Expression::new(tariff.expr(total), d).expect("variables within d").into_handle()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::Point;
    use crate::decomp::delta_star;

    #[test]
    fn stock_fx_matches_closed_form() {
        let f = stock_fx_pnl(2.0, 3.0);
        let x = Point::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(f.eval(&x).unwrap(), 6.0);
        assert_eq!(stock_fx_closed_form(2.0, 3.0, [1.0, 1.0]), [3.5, 2.5]);
        assert_eq!(delta_star(&f, &x).unwrap().contributions, vec![3.5, 2.5]);
    }

    #[test]
    fn bill_fixed_cost_is_split_evenly() {
        let d = Dimension::new(3).unwrap();
        let f = shared_bill(Tariff::linear(10.0, 2.0), d);
        let x = Point::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.eval(&x).unwrap(), 22.0);
        let g = delta_star(&f, &x).unwrap().contributions;
        let want = [10.0 / 3.0 + 2.0, 10.0 / 3.0 + 4.0, 10.0 / 3.0 + 6.0];
        for (a, b) in g.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn discounted_tariff() {
        let t = Tariff { fixed: 5.0, rate: 2.0, discount: Some((10.0, 1.0)) };
        assert_eq!(t.cost(4.0), 13.0);
        assert_eq!(t.cost(15.0), 30.0);
        let f = shared_bill(t, Dimension::new(2).unwrap());
        assert_eq!(f.eval(&Point::new(vec![7.0, 8.0]).unwrap()).unwrap(), 30.0);
    }
}
