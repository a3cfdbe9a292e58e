//! Seeded random generators and the exact suites built on them. The
//! self-test command runs small instances; the acceptance tests run the
//! full sizes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::{check_valuative_mostowski, classify_valchain, minimal_third_constant, Classification};
use crate::error::Result;
use crate::field::{ExtendedValuation, FieldElement};
use crate::flags::{build_flags, lemma_flags_hold, lemma_hypothesis_holds, random_flag_family, verify_flag_family, FlagBuild, FlagGenParams};
use crate::grassmann::{delta, Subspace};
use crate::field::Poly;
use crate::linalg::{clear_denominators, is_gl_o, projection_from_polys, FracMatrix, Matrix};
use crate::rectify::{
    catalog_sequences, check_derivative_gap, check_isometry, cone_chart, parabola_plane, sample_ball,
    sample_base_points, Rectification, StrataSeq,
};
use crate::strat::load_catalog;
use crate::verdict::{Status, Verdict};

use ExtendedValuation::Finite;

/// Outcome of one suite: how many cases ran and which failed.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn verdict(&self) -> Verdict {
        let note = match self.failures.first() {
            Some(f) => format!("{} of {} cases failed, first: {f}", self.failures.len(), self.cases),
            None => format!("{} cases", self.cases),
        };
        Verdict::new(self.name, Status::from_bool(self.passed())).with_note(note)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> FieldElement {
    FieldElement::from_int(rng.gen_range(lo..=hi))
}

fn nonzero_int<R: Rng>(rng: &mut R, bound: i64) -> FieldElement {
    loop {
        let k = rng.gen_range(-bound..=bound);
        if k != 0 {
            return FieldElement::from_int(k);
        }
    }
}

fn poly(coeffs: &[FieldElement]) -> FieldElement {
    coeffs
        .iter()
        .enumerate()
        .fold(FieldElement::zero(), |acc, (i, c)| &acc + &(c * &FieldElement::eps_pow(i as i64)))
}

/// A rational function `ε^s · p / q` with `deg p, deg q ≤ max_deg`,
/// `q(0) = 1` and `s ∈ min_shift..=1`; zero with small probability.
pub fn random_element<R: Rng>(rng: &mut R, max_deg: usize, min_shift: i64) -> FieldElement {
    if rng.gen_ratio(1, 8) {
        return FieldElement::zero();
    }
    let mut num: Vec<FieldElement> = (0..=max_deg).map(|_| int(rng, -3, 3)).collect();
    num[0] = nonzero_int(rng, 3);
    let p = poly(&num);
    let q = if rng.gen_bool(0.5) {
        let mut den: Vec<FieldElement> = (0..=max_deg).map(|_| int(rng, -2, 2)).collect();
        den[0] = FieldElement::one();
        poly(&den)
    } else {
        FieldElement::one()
    };
    let s = rng.gen_range(min_shift..=1.max(min_shift));
    &p.checked_div(&q).expect("q(0) = 1") * &FieldElement::eps_pow(s)
}

/// `ε^s · p` with `deg p ≤ max_deg`, `p(0) ≠ 0` and `s ∈ min_shift..=1`;
/// zero with small probability.
pub fn random_poly_element<R: Rng>(rng: &mut R, max_deg: usize, min_shift: i64) -> FieldElement {
    if rng.gen_ratio(1, 8) {
        return FieldElement::zero();
    }
    let mut cs: Vec<FieldElement> = (0..=max_deg).map(|_| int(rng, -3, 3)).collect();
    cs[0] = nonzero_int(rng, 3);
    let s = rng.gen_range(min_shift..=1.max(min_shift));
    &poly(&cs) * &FieldElement::eps_pow(s)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_deg: usize) -> Matrix {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| random_element(rng, max_deg, -1)).collect())
        .collect();
    Matrix::from_rows(rows, cols, data).expect("shape")
}

/// `L·U·P` with `L` unit lower triangular, `U` upper triangular with unit
/// diagonal in O, both with entries in O, and `P` a permutation.
pub fn random_gl_o<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i > j {
                l.set(i, j, random_poly_element(rng, 1, 0));
            } else if i < j {
                u.set(i, j, random_poly_element(rng, 1, 0));
            } else {
                let unit = &nonzero_int(rng, 3) + &(&int(rng, -2, 2) * &FieldElement::eps());
                u.set(i, i, unit);
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = Matrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p.set(i, j, FieldElement::one());
    }
    &(&l * &u) * &p
}

/// An `n × d` matrix of rank `d` with polynomial entries.
pub fn random_full_rank<R: Rng>(rng: &mut R, n: usize, d: usize, max_deg: usize) -> Matrix {
    loop {
        let data = (0..n)
            .map(|_| (0..d).map(|_| random_poly_element(rng, max_deg, -1)).collect())
            .collect();
        let m = Matrix::from_rows(n, d, data).expect("shape");
        if m.rank() == d {
            return m;
        }
    }
}

pub fn random_subspace<R: Rng>(rng: &mut R, n: usize, d: usize) -> Subspace {
    Subspace::column_span(&random_full_rank(rng, n, d, 1))
}

/// `v(MN) ≥ v(M) + v(N)` on random products, and `v(MN) = v(N)` when
/// `M ∈ GL(O)`.
pub fn vvm_suite(seed: u64, products: usize, gl_pairs: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut r = SuiteReport::new("vvm");
    for i in 0..products {
        let (a, b, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
        let m = random_matrix(&mut rng, a, b, 3);
        let n = random_matrix(&mut rng, b, c, 3);
        let lhs = (&m * &n).valuation();
        let rhs = m.valuation().add(n.valuation());
        r.record(lhs >= rhs, || format!("product {i}: v(MN) = {lhs} < {rhs}"));
    }
    for i in 0..gl_pairs {
        let k = rng.gen_range(1..=4);
        let m = random_gl_o(&mut rng, k);
        let cols = rng.gen_range(1..=4);
        let n = random_matrix(&mut rng, k, cols, 3);
        let ok = is_gl_o(&m).unwrap_or(false) && (&m * &n).valuation() == n.valuation();
        r.record(ok, || format!("GL(O) pair {i}"));
    }
    r
}

/// `P² = P`, `Pᵀ = P` and `PA = A` for the projection onto the column
/// span of a random full-rank `A`, compared as fractions over one
/// denominator.
pub fn projection_suite(seed: u64, count: usize, max_n: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut r = SuiteReport::new("projection");
    for i in 0..count {
        let n = rng.gen_range(1..=max_n);
        let d = rng.gen_range(1..=n);
        let a = random_full_rank(&mut rng, n, d, 1);
        let cols: Vec<Vec<Poly>> = a.columns().iter().map(|c| clear_denominators(c)).collect();
        let fa = FracMatrix::from_matrix(&a);
        let ok = match projection_from_polys(n, &cols) {
            Ok(p) => {
                p.try_mul(&p).is_ok_and(|pp| pp.same_as(&p))
                    && p.transpose().same_as(&p)
                    && p.try_mul(&fa).is_ok_and(|pa| pa.same_as(&fa))
            }
            Err(_) => false,
        };
        r.record(ok, || format!("basis {i}: {a}"));
    }
    r
}

/// `Δ(MW₁, MW₂) = Δ(W₁, W₂)` for `M ∈ GL(O)`.
pub fn delta_invariance_suite(seed: u64, count: usize, max_n: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut r = SuiteReport::new("delta-invariance");
    for i in 0..count {
        let n = rng.gen_range(1..=max_n);
        let d = rng.gen_range(0..=n);
        let (w1, w2) = (random_subspace(&mut rng, n, d), random_subspace(&mut rng, n, d));
        // Half the pairs start close so that finite positive distances occur.
        let w2 = if i % 2 == 0 && d > 0 {
            let k = rng.gen_range(2..=4);
            let shift = random_full_rank(&mut rng, n, n, 1).scale(&FieldElement::eps_pow(k));
            let near = &Matrix::identity(n) + &shift;
            w1.apply(&near).ok().filter(|w| w.dim() == d).unwrap_or(w2)
        } else {
            w2
        };
        let m = random_gl_o(&mut rng, n);
        let ok = (|| -> Result<bool> { Ok(delta(&w1.apply(&m)?, &w2.apply(&m)?)? == delta(&w1, &w2)?) })();
        r.record(ok.unwrap_or(false), || format!("pair {i}: {w1} vs {w2}"));
    }
    r
}

/// Random families satisfying the hypothesis of the flags lemma meet its
/// conclusions and the intermediate inequalities.
pub fn flags_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut r = SuiteReport::new("flags");
    let params = FlagGenParams::default();
    for i in 0..count {
        let f = random_flag_family(&mut rng, &params);
        let hyp = lemma_hypothesis_holds(&f);
        let (concl, diag) = lemma_flags_hold(&f);
        r.record(hyp && concl && diag, || {
            format!("family {i}: hypothesis {hyp}, conclusions {concl}, diagnostics {diag}")
        });
    }
    r
}

/// Bundled chains that pass the valuative Mostowski checks give flag
/// families passing every check; the cone chain's family fails the
/// `(0,1)` distance bound with `Δ = 0 < 1`.
pub fn catalog_flags_suite() -> SuiteReport {
    let mut r = SuiteReport::new("catalog-flags");
    for name in ["flat-line", "parabola", "cone"] {
        let entry = match load_catalog(name) {
            Ok(e) => e,
            Err(e) => {
                r.record(false, || format!("{name}: {e}"));
                continue;
            }
        };
        for c in &entry.chains {
            let res = (|| -> Result<Option<Vec<Verdict>>> {
                let Classification::Chain(ch) = classify_valchain(&c.points, &c.dims, &entry.strat)? else {
                    return Ok(None);
                };
                if name != "cone" && !check_valuative_mostowski(&ch, &entry.strat)?.holds() {
                    return Ok(None);
                }
                Ok(match build_flags(&ch, &entry.strat)? {
                    FlagBuild::Family(f) => Some(verify_flag_family(&f)),
                    FlagBuild::RankDrop(_) => Some(vec![Verdict::new("rank", Status::Fails)]),
                })
            })();
            let ok = match (&res, name, c.name.as_str()) {
                (Ok(Some(vs)), "cone", "augmented") => vs.iter().any(|v| {
                    v.label == "dist(0,1)"
                        && v.status == Status::Fails
                        && v.lhs.as_deref() == Some("0")
                        && v.required.as_deref() == Some("1")
                }),
                (Ok(Some(vs)), "cone", _) => !vs.is_empty(),
                (Ok(Some(vs)), _, _) => vs.iter().all(|v| v.status == Status::Holds),
                (Ok(None), _, _) => true,
                (Err(_), _, _) => false,
            };
            r.record(ok, || format!("{name}/{}: {res:?}", c.name));
        }
    }
    r
}

/// The cone chain classifies as augmented with `λ = (1, 0)`, fails vm2
/// with `0 < 1`, and needs a classical constant of valuation `-2`.
pub fn cone_suite() -> SuiteReport {
    let mut r = SuiteReport::new("cone");
    let res = (|| -> Result<(bool, bool)> {
        let e = load_catalog("cone")?;
        let c = e.chain("augmented").expect("bundled");
        let Classification::Chain(ch) = classify_valchain(&c.points, &c.dims, &e.strat)? else {
            return Ok((false, false));
        };
        let vm = check_valuative_mostowski(&ch, &e.strat)?;
        let vm_ok = ch.kind.is_augmented()
            && ch.lambdas == [Finite(1), Finite(0)]
            && vm.verdict().to_string() == "vm2: FAILS lhs=0 required=1";
        let (_, v) = minimal_third_constant(&c.points, &c.dims, &e.strat)?;
        Ok((vm_ok, v == Finite(-2)))
    })();
    let (vm, k) = res.clone().unwrap_or((false, false));
    r.record(vm, || format!("vm2 at the cone chain: {res:?}"));
    r.record(k, || format!("minimal third constant: {res:?}"));
    r
}

/// The sequences checked by [`rectify_suite`], one group per catalog
/// entry.
fn rectify_sequences() -> Result<Vec<(String, StrataSeq)>> {
    let mut out = vec![("cone/chart".to_string(), cone_chart()?)];
    for name in ["flat-line", "parabola"] {
        for (chain, seq) in catalog_sequences(name)? {
            out.push((format!("{name}/{chain}"), seq));
        }
    }
    out.push(("parabola/plane".into(), parabola_plane()?));
    Ok(out)
}

/// `Jac φ_l ∈ GL(O)` and exact inverse round trips at sampled base
/// points, and the isometry property on pairs in a ball for the parabola
/// plane.
pub fn rectify_suite(seed: u64, points: usize, pairs: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut r = SuiteReport::new("rectify");
    let seqs = match rectify_sequences() {
        Ok(s) => s,
        Err(e) => {
            r.record(false, || e.to_string());
            return r;
        }
    };
    for (name, seq) in &seqs {
        let samples = match sample_base_points(seq, &mut rng, points) {
            Ok(s) => s,
            Err(e) => {
                r.record(false, || format!("{name}: {e}"));
                continue;
            }
        };
        for (i, x) in samples.iter().enumerate() {
            let ok = (|| -> Result<bool> {
                for l in 0..=seq.m() {
                    let xl = &x[..seq.dim(l)];
                    let mode = Rectification::Partial(l);
                    let back = seq.rectilinearize_inverse(mode, &seq.rectilinearize(mode, xl)?)?;
                    if !seq.jacobian_in_gl_o(l, x)? || back != xl {
                        return Ok(false);
                    }
                }
                let full = seq.lift(0, x)?;
                let mode = Rectification::Full(0);
                Ok(seq.rectilinearize_inverse(mode, &seq.rectilinearize(mode, &full)?)? == full)
            })();
            r.record(ok.clone().unwrap_or(false), || format!("{name} sample {i}: {ok:?}"));
        }
    }
    let res = (|| -> Result<bool> {
        let seq = parabola_plane()?;
        let center = vec![FieldElement::one(), FieldElement::one()];
        let ps = sample_ball(&mut rng, &center, 0, pairs);
        let out = check_isometry(&seq, 0, &center, Finite(0), &ps)?;
        Ok(out.len() == pairs && out.iter().all(|v| v.status == Status::Holds))
    })();
    r.record(res.clone().unwrap_or(false), || format!("isometry: {res:?}"));
    r
}

/// The derivative gap of the key lemma on the augmented parabola chain:
/// `2 ≥ 1`.
pub fn key_lemma_suite() -> SuiteReport {
    let mut r = SuiteReport::new("key-lemma");
    let res = (|| -> Result<Vec<Verdict>> {
        let e = load_catalog("parabola")?;
        let c = e.chain("augmented").expect("bundled");
        let seq = StrataSeq::from_chain(&e.strat, &c.points, &c.dims)?;
        let Classification::Chain(ch) = classify_valchain(&c.points, &c.dims, &e.strat)? else {
            return Ok(vec![]);
        };
        check_derivative_gap(&seq, &ch)
    })();
    let ok = matches!(&res, Ok(vs) if vs.len() == 1 && vs[0].to_string() == "gap(1): HOLDS lhs=2 required=1");
    r.record(ok, || format!("{res:?}"));
    r
}

/// Printing then parsing random elements is the identity.
pub fn element_roundtrip_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut r = SuiteReport::new("element-roundtrip");
    for _ in 0..count {
        let x = random_element(&mut rng, 3, -2);
        let s = x.to_string();
        let back: Result<FieldElement> = s.parse();
        r.record(back.as_ref() == Ok(&x), || format!("{s} -> {back:?}"));
    }
    r
}

/// The suites of the self-test command, at small sizes.
pub fn selftest() -> Vec<SuiteReport> {
    vec![
        cone_suite(),
        vvm_suite(1, 60, 30),
        projection_suite(2, 30, 4),
        delta_invariance_suite(3, 20, 4),
        flags_suite(4, 20),
        catalog_flags_suite(),
        rectify_suite(5, 10, 20),
        key_lemma_suite(),
        element_roundtrip_suite(6, 100),
    ]
}
