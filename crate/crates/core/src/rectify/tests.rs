use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::chains::classify_valchain;
use crate::expr::parse_vector;
use crate::strat::load_catalog;

use ExtendedValuation::Finite;

fn v(src: &str) -> Vector {
    parse_vector(src).unwrap()
}

fn seq_named(catalog: &str, name: &str) -> StrataSeq {
    catalog_sequences(catalog)
        .unwrap()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap()
        .1
}

fn parabola_chain(name: &str) -> ValChain {
    let entry = load_catalog("parabola").unwrap();
    let c = entry.chain(name).unwrap();
    classify_valchain(&c.points, &c.dims, &entry.strat).unwrap().chain().unwrap()
}

#[test]
fn partial_rectilinearization_straightens_the_branch() {
    let seq = parabola_plane().unwrap();
    let x = v("(t, t^2)");
    let y = seq.rectilinearize(Rectification::Partial(0), &x).unwrap();
    assert_eq!(y, v("(t, 0)"));
    assert_eq!(seq.rectilinearize_inverse(Rectification::Partial(0), &y).unwrap(), x);
    assert_eq!(seq.rectilinearize(Rectification::Full(0), &x).unwrap(), y);
    // φ_m is the identity on the empty group.
    assert!(seq.rectilinearize(Rectification::Partial(2), &[]).unwrap().is_empty());
}

#[test]
fn map_exprs_match_pointwise_evaluation() {
    let seq = cone_chart().unwrap();
    let x = v("(1 + t, 1/5, 3)");
    for mode in [Rectification::Full(0), Rectification::Full(1), Rectification::Partial(1)] {
        let arity = match mode {
            Rectification::Partial(l) => seq.dim(l),
            Rectification::Full(_) => 3,
        };
        let exprs = seq.map_exprs(mode).unwrap();
        let direct = seq.rectilinearize(mode, &x[..arity]).unwrap();
        let via: Vector = exprs.iter().map(|e| e.eval(&x[..arity]).unwrap()).collect();
        assert_eq!(direct, via, "{mode:?}");
    }
}

#[test]
fn leaving_the_base_is_reported() {
    let seq = parabola_plane().unwrap();
    let err = seq.rectilinearize(Rectification::Partial(0), &v("(-t, 1)")).unwrap_err();
    assert!(matches!(err, Error::OutsideBase { .. }));
}

#[test]
fn candidate_subspace_follows_the_tangent() {
    let seq = seq_named("parabola", "augmented");
    let got = candidate_subspace(&seq, &v("(t, t^2)")).unwrap();
    assert_eq!(got, "span[(1, 2*t)]".parse().unwrap());
}

#[test]
fn isometry_on_a_small_pair() {
    let seq = parabola_plane().unwrap();
    let pairs = vec![(v("(t, t^2)"), v("(2*t, 4*t^2)"))];
    let out = check_isometry(&seq, 0, &v("(t, t^2)"), Finite(0), &pairs).unwrap();
    assert_eq!(out.len(), 1);
    assert!(out[0].status.is_ok());
    assert_eq!(out[0].lhs.as_deref(), Some("1"));
}

#[test]
fn pairs_outside_the_ball_are_rejected() {
    let seq = parabola_plane().unwrap();
    let pairs = vec![(v("(t, t^2)"), v("(2, 1)"))];
    let err = check_isometry(&seq, 0, &v("(t, t^2)"), Finite(0), &pairs).unwrap_err();
    assert_eq!(err, Error::OutsideBall { index: 0 });
}

#[test]
fn sampled_rectilinearizations_are_in_gl_o_and_invert() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seq in [parabola_plane().unwrap(), cone_chart().unwrap()] {
        for x in sample_base_points(&seq, &mut rng, 25).unwrap() {
            for l in 0..=seq.m() {
                assert!(seq.aligned_at(l, &x).unwrap());
                assert!(seq.jacobian_in_gl_o(l, &x).unwrap());
                let xl = &x[..seq.dim(l)];
                let y = seq.rectilinearize(Rectification::Partial(l), xl).unwrap();
                assert_eq!(seq.rectilinearize_inverse(Rectification::Partial(l), &y).unwrap(), xl);
            }
        }
    }
}

#[test]
fn sampled_isometry_on_a_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let seq = parabola_plane().unwrap();
    let center = v("(1, 1)");
    let pairs = sample_ball(&mut rng, &center, 0, 100);
    let out = check_isometry(&seq, 0, &center, Finite(0), &pairs).unwrap();
    assert!(out.iter().all(|r| r.status.is_ok()));
}

#[test]
fn derivative_gap_on_the_augmented_parabola_chain() {
    let seq = seq_named("parabola", "augmented");
    let chain = parabola_chain("augmented");
    let out = check_derivative_gap(&seq, &chain).unwrap();
    assert_eq!(out.len(), 1);
    assert!(out[0].status.is_ok());
    assert_eq!(out[0].lhs.as_deref(), Some("2"));
    assert_eq!(out[0].required.as_deref(), Some("1"));
}

#[test]
fn chain_lifts_and_offsets() {
    for name in ["plain", "augmented"] {
        let seq = seq_named("parabola", name);
        let chain = parabola_chain(name);
        assert!(check_chain_lifts(&seq, &chain).unwrap().iter().all(|r| r.status.is_ok()), "{name}");
        assert!(check_flat_offsets(&seq, &chain).unwrap().iter().all(|r| r.status.is_ok()), "{name}");
    }
}

#[test]
fn rho_contracts_on_aligned_strata() {
    let seq = cone_chart().unwrap();
    let pairs = vec![(v("(1)"), v("(1 + t)")), (v("(t)"), v("(t + t^3)"))];
    let out = check_rho_contraction(&seq, 1, &pairs).unwrap();
    assert!(out.iter().all(|r| r.status.is_ok()));
}

#[test]
fn sequences_round_trip_through_json() {
    for seq in [parabola_plane().unwrap(), cone_chart().unwrap()] {
        assert_eq!(StrataSeq::from_json(&seq.to_json()).unwrap(), seq);
    }
}

#[test]
fn bad_dimension_orders_are_rejected() {
    let seq = parabola_plane().unwrap();
    let strata = vec![seq.stratum(2).clone(), seq.stratum(1).clone()];
    assert!(StrataSeq::new(2, strata).is_err());
}

fn square_context() -> SedationContext {
    SedationContext::from_json(
        r#"{
            "dims": [2, 1],
            "domain": [{"positive": "x1"}, {"positive": "1 - x1"}, {"positive": "x2"}, {"positive": "1 - x2"}],
            "zeta": [["x1", "1 - x1", "x2", "1 - x2"], ["x1", "1 - x1"]]
        }"#,
    )
    .unwrap()
}

#[test]
fn zeta_and_sigma_on_the_square() {
    let ctx = square_context();
    let (z, s) = zeta_sigma(&ctx, &v("(t, 1/2)")).unwrap();
    assert_eq!(z, vec![Finite(1), Finite(1)]);
    assert_eq!(s, vec![Finite(-1)]);
    let (z, s) = zeta_sigma(&ctx, &v("(1/2, 1/2)")).unwrap();
    assert_eq!(z, vec![Finite(0), Finite(0)]);
    assert_eq!(s, vec![Finite(0)]);
    let (_, s) = zeta_sigma(&ctx, &v("(1/2, t)")).unwrap();
    assert_eq!(s, vec![Finite(0)]);
    assert!(zeta_sigma(&ctx, &v("(2, 1/2)")).is_err());
}

fn interval_context() -> SedationContext {
    SedationContext::from_json(r#"{"dims": [1], "domain": [{"positive": "x1"}], "zeta": [["x1"]]}"#).unwrap()
}

#[test]
fn sedated_examples() {
    let ctx = interval_context();
    let samples = vec![v("(t)")];
    let f = |s: &str| RationalExpr::parse(s, Some(1)).unwrap();
    let out = check_sedated(&[f("x1")], SedationVersion::A, &ctx, &samples).unwrap();
    assert!(out[0].status.is_ok());
    assert_eq!((out[0].lhs.as_deref(), out[0].required.as_deref()), (Some("0"), Some("0")));
    let out = check_sedated(&[f("0")], SedationVersion::A, &ctx, &samples).unwrap();
    assert!(out[0].status.is_ok());
    let out = check_sedated(&[f("x1^2")], SedationVersion::C, &ctx, &samples).unwrap();
    assert_eq!((out[0].lhs.as_deref(), out[0].required.as_deref()), (Some("1"), Some("-1")));
    // 1/x1^2 blows up faster than the boundary allows.
    let out = check_sedated(&[f("1/x1^2")], SedationVersion::C, &ctx, &samples).unwrap();
    assert!(!out[0].status.is_ok());
    assert!(check_sedated(&[f("x1")], SedationVersion::B, &ctx, &samples).is_err());
}

#[test]
fn sedation_input_round_trips() {
    let input = SedationInput {
        context: square_context(),
        functions: vec![RationalExpr::parse("x1*x2", Some(2)).unwrap()],
        version: SedationVersion::C2,
        samples: vec![v("(t, 1/2)")],
    };
    let back = SedationInput::from_json(&input.to_json()).unwrap();
    assert_eq!(back.context, input.context);
    assert_eq!(back.run().unwrap(), input.run().unwrap());
}

#[test]
fn gradient_bound_examples() {
    let f = |s: &str| RationalExpr::parse(s, Some(1)).unwrap();
    let zero = vec![v("(0)")];
    let samples = vec![v("(t)")];
    let out = check_gradient_bound(&f("x1^2"), ExceptionalSet::Points(&zero), &samples).unwrap();
    assert_eq!((out[0].lhs.as_deref(), out[0].required.as_deref()), (Some("1"), Some("1")));
    let out = check_gradient_bound(&f("x1"), ExceptionalSet::Points(&zero), &samples).unwrap();
    assert_eq!((out[0].lhs.as_deref(), out[0].required.as_deref()), (Some("0"), Some("0")));
    let out = check_gradient_bound(&f("3"), ExceptionalSet::Empty, &samples).unwrap();
    assert!(out[0].status.is_ok());
    assert_eq!(out[0].lhs.as_deref(), Some("+inf"));
    assert!(check_gradient_bound(&f("x1"), ExceptionalSet::Points(&zero), &zero).is_err());
}
