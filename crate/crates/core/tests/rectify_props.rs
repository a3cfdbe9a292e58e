use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use valstrat::chains::classify_valchain;
use valstrat::expr::Scalar;
use valstrat::linalg::valuation_of;
use valstrat::rectify::{
    catalog_sequences, check_chain_lifts, check_rho_contraction, check_sedated, cone_chart, sample_ball,
    sample_base_points, zeta_sigma, Rectification, SedationContext, SedationVersion,
};
use valstrat::strat::load_catalog;
use valstrat::{ExtendedValuation, FieldElement, RationalExpr};

use ExtendedValuation::Finite;

/// On the plain chains `a⁰ → origin` of the flat line and the parabola,
/// the rectified base point `ā♭` satisfies
/// `v(pr_{>e_2}(ā♭)) ≥ λ_1 ≥ v(ζ_1(ā♭))` and `v(σ_2(ā♭)) = 0`, where `ζ_1`
/// is the distance to the boundary of the half line.
#[test]
fn lambda_bounds_on_plain_chains() {
    let ctx = SedationContext::from_json(r#"{"dims": [1, 0], "domain": [{"positive": "x1"}], "zeta": [["x1"], ["1"]]}"#)
        .unwrap();
    for name in ["flat-line", "parabola"] {
        let entry = load_catalog(name).unwrap();
        let c = entry.chain("plain").unwrap();
        let chain = classify_valchain(&c.points, &c.dims, &entry.strat).unwrap().chain().unwrap();
        let (_, seq) = catalog_sequences(name).unwrap().into_iter().find(|(n, _)| n == "plain").unwrap();
        let flat = seq
            .rectilinearize(Rectification::Partial(0), &chain.points[0][..seq.dim(0)])
            .unwrap();
        let (zetas, sigmas) = zeta_sigma(&ctx, &flat).unwrap();
        let lambda = chain.lambda(1);
        assert!(valuation_of(&flat[ctx.dim(2)..]) >= lambda, "{name}");
        assert!(lambda >= zetas[0], "{name}");
        assert_eq!(sigmas, vec![Finite(0)], "{name}");
        assert!(check_chain_lifts(&seq, &chain).unwrap().iter().all(|v| v.status.is_ok()), "{name}");
    }
}

#[test]
fn sampled_cone_chart_points_have_gl_o_jacobians() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let seq = cone_chart().unwrap();
    for x in sample_base_points(&seq, &mut rng, 30).unwrap() {
        for l in 0..=seq.m() {
            assert!(seq.jacobian_in_gl_o(l, &x).unwrap(), "{x:?} at level {l}");
        }
    }
}

#[test]
fn cone_chart_ruling_contracts_on_sampled_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let seq = cone_chart().unwrap();
    for center in ["1", "t", "1/t", "3 + t"] {
        let c: FieldElement = center.parse().unwrap();
        let radius = c.ord().unwrap() + 1;
        let pairs = sample_ball(&mut rng, &[c], radius, 20);
        let out = check_rho_contraction(&seq, 1, &pairs).unwrap();
        assert!(out.iter().all(|v| v.status.is_ok()), "center {center}");
    }
}

fn half_line() -> SedationContext {
    SedationContext::from_json(r#"{"dims": [1], "domain": [{"positive": "x1"}], "zeta": [["x1"]]}"#).unwrap()
}

fn expr(src: &str) -> RationalExpr {
    RationalExpr::parse(src, Some(1)).unwrap()
}

/// A positive sample `c·ε^j` with `j ≥ 0`.
fn sample() -> impl Strategy<Value = FieldElement> {
    (1i64..=5, 0i64..=3).prop_map(|(c, j)| &FieldElement::from_int(c) * &FieldElement::eps_pow(j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `ψ(x) = x + x²` translates by a c2-sedated map, and the sedation
    /// verdicts of `f` at `ψ(y)` match those of `f ∘ ψ` at `y`.
    #[test]
    fn rectification_preserves_sedation_verdicts(y in sample(), f in 0usize..4, version in 0usize..2) {
        let ctx = half_line();
        let psi = expr("x1 + x1^2");
        let shift = expr("x1^2");
        let jets = check_sedated(&[shift], SedationVersion::C2, &ctx, &[vec![y.clone()]]).unwrap();
        prop_assert!(jets.iter().all(|v| v.status.is_ok()));

        let f = expr(["x1", "x1^3", "1/x1^2", "x1/(1 + x1)"][f]);
        let version = [SedationVersion::A, SedationVersion::C][version];
        let moved = psi.eval(std::slice::from_ref(&y)).unwrap();
        let direct = check_sedated(std::slice::from_ref(&f), version, &ctx, &[vec![moved]]).unwrap();
        let composed = f.compose(std::slice::from_ref(&psi)).unwrap();
        let pulled = check_sedated(&[composed], version, &ctx, &[vec![y]]).unwrap();
        let statuses = |vs: &[valstrat::verdict::Verdict]| vs.iter().map(|v| v.status).collect::<Vec<_>>();
        prop_assert_eq!(statuses(&direct), statuses(&pulled));
    }

    #[test]
    fn composition_with_the_identity_is_neutral(y in sample()) {
        let f = expr("1/x1^2").add(&expr("x1"));
        let id = expr("x1");
        prop_assert_eq!(f.compose(std::slice::from_ref(&id)).unwrap(), f.clone());
        prop_assert_eq!(
            f.eval(std::slice::from_ref(&y)).unwrap(),
            f.compose(&[id]).unwrap().eval(&[y]).unwrap()
        );
    }
}
