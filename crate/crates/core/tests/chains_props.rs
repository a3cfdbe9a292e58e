use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use valstrat::chains::{check_valuative_mostowski, classify_valchain, ChainFile, ChainKind, Classification, ValChain};
use valstrat::flags::{build_flags, verify_flag_family, FlagBuild, FlagFamily};
use valstrat::grassmann::Subspace;
use valstrat::linalg::{valuation_of, vec_sub, FracMatrix};
use valstrat::strat::{load_catalog, CatalogEntry, Condition, Stratum};
use valstrat::suites::random_full_rank;
use valstrat::{ExtendedValuation, FieldElement, RationalExpr};

const CATALOG: [&str; 4] = ["cone", "cone:1/2", "flat-line", "parabola"];

fn chains(entry: &CatalogEntry) -> Vec<(String, ValChain)> {
    entry
        .chains
        .iter()
        .filter_map(|c| {
            let ch = classify_valchain(&c.points, &c.dims, &entry.strat).unwrap().chain()?;
            Some((c.name.clone(), ch))
        })
        .collect()
}

#[test]
fn every_bundled_chain_classifies() {
    for name in CATALOG {
        let entry = load_catalog(name).unwrap();
        assert_eq!(chains(&entry).len(), entry.chains.len(), "{name}");
    }
}

#[test]
fn suffixes_of_chains_are_plain_chains() {
    for name in CATALOG {
        let entry = load_catalog(name).unwrap();
        for (label, ch) in chains(&entry) {
            for k in 1..=ch.m() {
                let sub = classify_valchain(&ch.points[k..], &ch.dims[k..], &entry.strat).unwrap();
                let Classification::Chain(sub) = sub else {
                    panic!("{name}/{label}: suffix {k} is not a chain");
                };
                assert_eq!(sub.kind, ChainKind::Plain, "{name}/{label}: suffix {k}");
            }
        }
    }
}

#[test]
fn distances_decrease_along_chains() {
    for name in CATALOG {
        let entry = load_catalog(name).unwrap();
        for (label, ch) in chains(&entry) {
            for w in ch.lambdas.windows(2) {
                if ch.kind.is_weak() {
                    assert!(w[0] >= w[1], "{name}/{label}");
                } else {
                    assert!(w[0] > w[1], "{name}/{label}");
                }
            }
        }
    }
}

#[test]
fn catalog_flags_match_the_mostowski_verdicts() {
    for name in CATALOG {
        let entry = load_catalog(name).unwrap();
        let all_hold = chains(&entry)
            .iter()
            .all(|(_, ch)| check_valuative_mostowski(ch, &entry.strat).unwrap().holds());
        if entry.valuative_lipschitz {
            assert!(all_hold, "{name}");
        }
    }
    let cone = load_catalog("cone").unwrap();
    let witness = cone.chain("augmented").unwrap();
    let ch = classify_valchain(&witness.points, &witness.dims, &cone.strat).unwrap().chain().unwrap();
    assert!(!check_valuative_mostowski(&ch, &cone.strat).unwrap().holds());
}

fn family_passes(f: &FlagFamily) -> bool {
    verify_flag_family(f).iter().all(|v| v.status.is_ok())
}

#[test]
fn chains_passing_mostowski_give_passing_flags() {
    for name in CATALOG {
        let entry = load_catalog(name).unwrap();
        for (label, ch) in chains(&entry) {
            let suffixes_hold = (0..=ch.m()).all(|k| {
                classify_valchain(&ch.points[k..], &ch.dims[k..], &entry.strat)
                    .unwrap()
                    .chain()
                    .is_some_and(|sub| check_valuative_mostowski(&sub, &entry.strat).unwrap().holds())
            });
            let flags_pass = match build_flags(&ch, &entry.strat).unwrap() {
                FlagBuild::Family(f) => family_passes(&f),
                FlagBuild::RankDrop(_) => false,
            };
            if suffixes_hold {
                assert!(flags_pass, "{name}/{label}");
            }
            if name == "cone" && label == "augmented" {
                assert!(!suffixes_hold && !flags_pass);
            }
        }
    }
}

#[test]
fn graph_and_implicit_tangent_spaces_agree_on_the_parabola() {
    let x = |i| RationalExpr::var(2, i);
    let eq = RationalExpr::parse("x2 - x1^2", Some(2)).unwrap();
    let implicit = Stratum::implicit("branch+", 2, 1, vec![eq], vec![Condition::Positive(x(1))]).unwrap();
    let entry = load_catalog("parabola").unwrap();
    let graph = entry.strat.stratum("branch+").unwrap();
    for src in ["t", "1", "3/2", "1/t", "2 + t"] {
        let a: FieldElement = src.parse().unwrap();
        let p = vec![a.clone(), a.square()];
        assert_eq!(graph.tangent_space(&p).unwrap(), implicit.tangent_space(&p).unwrap(), "x1 = {src}");
    }
}

fn parse_file(src: &str) -> ChainFile {
    ChainFile::from_json(src).unwrap()
}

#[test]
fn chain_files_print_and_parse_back() {
    let file = parse_file(r#"{"catalog": "parabola", "points": [["t", "t^2"], ["0", "0"]], "dims": [1, 0]}"#);
    let back = parse_file(&serde_json::to_string(&file).unwrap());
    assert_eq!(serde_json::to_value(&back).unwrap(), serde_json::to_value(&file).unwrap());
    let (a, b) = (file.resolve().unwrap(), back.resolve().unwrap());
    assert_eq!((a.points, a.dims), (b.points, b.dims));
}

#[test]
fn flag_files_print_and_parse_back() {
    let cone = load_catalog("cone").unwrap();
    let witness = cone.chain("augmented").unwrap();
    let ch = classify_valchain(&witness.points, &witness.dims, &cone.strat).unwrap().chain().unwrap();
    let FlagBuild::Family(f) = build_flags(&ch, &cone.strat).unwrap() else {
        panic!("no family");
    };
    let back = FlagFamily::from_json(&f.to_json()).unwrap();
    assert_eq!(back.to_json(), f.to_json());
    assert_eq!(back, f);
}

fn random_projection(rng: &mut ChaCha8Rng, n: usize) -> FracMatrix {
    let d = rng.gen_range(0..=n);
    Subspace::column_span(&random_full_rank(rng, n, d, 1)).projection_frac()
}

/// A point `c·ε^μ` of valuation `μ` on the positive axis.
fn base_point() -> impl Strategy<Value = (FieldElement, i64)> {
    (1i64..=5, -2i64..=2, -3i64..=3).prop_map(|(c, d, mu)| {
        let e = FieldElement::eps();
        (&(&FieldElement::from_int(c) + &(&FieldElement::from_int(d) * &e)) * &FieldElement::eps_pow(mu), mu)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn splitting_through_a_projection_is_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let (q, p, q2) = (random_projection(&mut rng, n), random_projection(&mut rng, n), random_projection(&mut rng, n));
        let qp = q.try_mul(&p).unwrap().try_mul(&q2).unwrap();
        let qc = q.try_mul(&p.complement()).unwrap().try_mul(&q2).unwrap();
        prop_assert!(qp.try_add(&qc).unwrap().same_as(&q.try_mul(&q2).unwrap()));
    }

    /// On a ball of radius `r > μ` around a point of valuation `μ`, the
    /// parabola's graph map satisfies `v(ρ(a) - ρ(b)) ≥ v(a - b) + μ`.
    #[test]
    fn parabola_graph_map_is_valuatively_lipschitz(
        (c, mu) in base_point(),
        d1 in -3i64..=3,
        d2 in -3i64..=3,
        gap in 1i64..=3,
    ) {
        let entry = load_catalog("parabola").unwrap();
        let rho = &entry.strat.stratum("branch+").unwrap().rho().unwrap()[0];
        let shift = FieldElement::eps_pow(mu + gap);
        let a = &c + &(&FieldElement::from_int(d1) * &shift);
        let b = &c + &(&FieldElement::from_int(d2) * &shift);
        let diff = (&rho.eval(std::slice::from_ref(&a)).unwrap() - &rho.eval(std::slice::from_ref(&b)).unwrap()).valuation();
        let bound = valuation_of(&vec_sub(&[a], &[b])).add(ExtendedValuation::Finite(mu));
        prop_assert!(diff >= bound, "{} < {}", diff, bound);
    }
}
