use proptest::prelude::*;
use valstrat::expr::Scalar;
use valstrat::{FieldElement, RationalExpr};

/// A polynomial in `x1, x2` with small coefficients, some of them in `ε`.
fn poly_src() -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2, 0u32..=1), 1..=4).prop_map(|terms| {
        terms
            .iter()
            .map(|(c, i, j, k)| format!("({c})*t^{k}*x1^{i}*x2^{j}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn expr(src: &str) -> RationalExpr {
    RationalExpr::parse(src, Some(2)).unwrap()
}

/// A polynomial that does not vanish identically.
fn nonzero_poly() -> impl Strategy<Value = RationalExpr> {
    poly_src().prop_map(|s| expr(&format!("1 + t*x1^2 + {s}"))).prop_filter("nonzero", |e| !e.is_zero())
}

fn point() -> impl Strategy<Value = Vec<FieldElement>> {
    prop::collection::vec((-5i64..=5, -2i64..=2), 2).prop_map(|v| {
        v.iter()
            .map(|&(a, b)| &FieldElement::from_int(a) + &(&FieldElement::from_int(b) * &FieldElement::eps()))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_rule(f in poly_src(), g in poly_src(), i in 1usize..=2) {
        let (f, g) = (expr(&f), expr(&g));
        let lhs = f.mul(&g).partial(i);
        let rhs = f.partial(i).mul(&g).add(&f.mul(&g.partial(i)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quotient_rule(f in poly_src(), g in nonzero_poly(), i in 1usize..=2) {
        let f = expr(&f);
        let lhs = f.div(&g).unwrap().partial(i).mul(&g.mul(&g));
        let rhs = f.partial(i).mul(&g).sub(&f.mul(&g.partial(i)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chain_rule(f in poly_src(), g1 in poly_src(), g2 in poly_src(), i in 1usize..=2) {
        let (f, g) = (expr(&f), [expr(&g1), expr(&g2)]);
        let lhs = f.compose(&g).unwrap().partial(i);
        let mut rhs = RationalExpr::zero(2);
        for (j, gj) in g.iter().enumerate() {
            rhs = rhs.add(&f.partial(j + 1).compose(&g).unwrap().mul(&gj.partial(i)));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_commutes_with_composition(f in poly_src(), g1 in poly_src(), g2 in poly_src(), p in point()) {
        let (f, g) = (expr(&f), [expr(&g1), expr(&g2)]);
        let inner: Vec<FieldElement> = g.iter().map(|e| e.eval(&p).unwrap()).collect();
        prop_assert_eq!(f.compose(&g).unwrap().eval(&p).unwrap(), f.eval(&inner).unwrap());
    }

    /// `d/dx Σ c_k x^k = Σ k c_k x^(k-1)`, evaluated at a point.
    #[test]
    fn derivative_matches_coefficient_shift(cs in prop::collection::vec(-4i64..=4, 1..=5), p in point()) {
        let src: Vec<String> = cs.iter().enumerate().map(|(k, c)| format!("({c})*x1^{k}")).collect();
        let f = RationalExpr::parse(&src.join(" + "), Some(1)).unwrap();
        let x = &p[0];
        let mut want = FieldElement::zero();
        for (k, &c) in cs.iter().enumerate().skip(1) {
            let term = &FieldElement::from_int(c * k as i64) * &x.pow(k as i64 - 1).unwrap();
            want = &want + &term;
        }
        prop_assert_eq!(f.partial(1).eval(std::slice::from_ref(x)).unwrap(), want);
    }

    #[test]
    fn print_then_parse_is_the_identity(f in poly_src(), g in nonzero_poly()) {
        let e = expr(&f).div(&g).unwrap();
        prop_assert_eq!(RationalExpr::parse(&e.to_string(), Some(2)).unwrap(), e);
    }
}
