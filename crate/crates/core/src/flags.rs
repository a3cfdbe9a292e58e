//! Families of partial flags `V_{k,l}` (`0 ≤ k ≤ l ≤ m`): construction
//! from val-chains, hypothesis checks, and the conclusions of the flags
//! lemma with its intermediate inequalities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chains::ValChain;
use crate::error::{Error, Result};
use crate::field::{ExtendedValuation, FieldElement};
use crate::grassmann::{delta, Subspace};
use crate::linalg::{is_gl_o, FracMatrix, Matrix, SeriesMatrix};
use crate::strat::Stratification;
use crate::verdict::{Status, Verdict};

/// `V_{k,l}` together with the distances `λ_1..λ_{m+1}`.
///
/// Row `k` of the JSON form lists `V_{k,k}, V_{k,k+1}, ..., V_{k,m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagFamily {
    pub dims: Vec<usize>,
    pub lambdas: Vec<ExtendedValuation>,
    pub rows: Vec<Vec<Subspace>>,
}

impl FlagFamily {
    pub fn new(dims: Vec<usize>, lambdas: Vec<ExtendedValuation>, rows: Vec<Vec<Subspace>>) -> Result<Self> {
        let f = FlagFamily { dims, lambdas, rows };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let m1 = self.rows.len();
        if m1 == 0 || self.dims.len() != m1 || self.lambdas.len() != m1 {
            return Err(Error::invalid("a flag family needs m + 1 rows, dims and distances"));
        }
        for (k, row) in self.rows.iter().enumerate() {
            if row.len() != m1 - k {
                return Err(Error::invalid(format!("row {k} must hold {} spaces", m1 - k)));
            }
        }
        let n = self.ambient_dim();
        if self.rows.iter().flatten().any(|v| v.ambient_dim() != n) {
            return Err(Error::dims("flag spaces live in different ambient spaces"));
        }
        Ok(())
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let f: FlagFamily = serde_json::from_str(src)?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn m(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows[0][0].ambient_dim()
    }

    pub fn space(&self, k: usize, l: usize) -> &Subspace {
        &self.rows[k][l - k]
    }

    pub fn projection(&self, k: usize, l: usize) -> FracMatrix {
        self.space(k, l).projection_frac()
    }

    /// `λ_l`, 1-based.
    pub fn lambda(&self, l: usize) -> ExtendedValuation {
        self.lambdas[l - 1]
    }
}

/// A valuation inequality `lhs ≥ required`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub label: String,
    pub lhs: ExtendedValuation,
    pub required: ExtendedValuation,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lhs >= self.required
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(self.label.clone(), Status::from_bool(self.holds())).with_sides(self.lhs, self.required)
    }
}

/// `(k, l)` where the projection product lost rank.
#[derive(Clone, Debug, PartialEq)]
pub struct RankDropReport {
    pub k: usize,
    pub l: usize,
    pub rank: usize,
    pub expected: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlagBuild {
    Family(FlagFamily),
    RankDrop(RankDropReport),
}

/// `V_{k,l} = im Q_{k,l}` with `Q_{k,l} = P_k P_{k+1} ⋯ P_l`, or
/// `P_0 P_2 ⋯ P_l` for `k = 0, l ≥ 1` when the chain is augmented.
pub fn build_flags(chain: &ValChain, strat: &Stratification) -> Result<FlagBuild> {
    let ps = chain.projections(strat)?;
    let m = chain.m();
    let augmented = chain.kind.is_augmented();
    let mut rows = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let mut row = Vec::with_capacity(m + 1 - k);
        for l in k..=m {
            let q = if augmented && k == 0 && l >= 1 {
                FracMatrix::product(std::iter::once(&ps[0]).chain(&ps[2..=l])).expect("nonempty")
            } else {
                FracMatrix::product(&ps[k..=l]).expect("nonempty")
            };
            let v = Subspace::column_span(&q.numerator_matrix());
            if v.dim() < chain.dims[l] {
                return Ok(FlagBuild::RankDrop(RankDropReport {
                    k,
                    l,
                    rank: v.dim(),
                    expected: chain.dims[l],
                }));
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(FlagBuild::Family(FlagFamily {
        dims: chain.dims.clone(),
        lambdas: chain.lambdas.clone(),
        rows,
    }))
}

/// Inclusions, dimensions and distance lower bounds, one verdict each.
pub fn verify_flag_family(f: &FlagFamily) -> Vec<Verdict> {
    let m = f.m();
    let mut out = Vec::new();
    for k in 0..=m {
        for l in k + 1..=m {
            let ok = f.space(k, l).is_subspace_of(f.space(k, l - 1));
            out.push(Verdict::new(format!("inc({k},{l})"), Status::from_bool(ok)));
        }
    }
    for k in 0..=m {
        for l in k..=m {
            let d = f.space(k, l).dim();
            out.push(Verdict::new(format!("dim({k},{l})"), Status::from_bool(d == f.dims[l])).with_sides(d, f.dims[l]));
        }
    }
    for k in 0..m {
        for l in k + 1..=m {
            let required = f.lambda(k + 1).sub(f.lambda(l + 1));
            let label = format!("dist({k},{l})");
            out.push(match delta(f.space(k, l), f.space(k + 1, l)) {
                Ok(d) => Inequality { label, lhs: d, required }.verdict(),
                Err(_) => Verdict::new(label, Status::Fails).with_note("dimensions differ"),
            });
        }
    }
    out
}

/// Whether the hypothesis of the flags lemma holds: flag inclusions and
/// the distance bounds (which include equal dimensions down each column).
/// Agrees with [`verify_flag_family`] but reads distances off truncations.
pub fn lemma_hypothesis_holds(f: &FlagFamily) -> bool {
    let m = f.m();
    let inclusions = (0..=m).all(|k| (k + 1..=m).all(|l| f.space(k, l).is_subspace_of(f.space(k, l - 1))));
    if !inclusions {
        return false;
    }
    let prec = (1..=m + 1)
        .filter_map(|l| match f.lambda(1).sub(f.lambda(l)) {
            ExtendedValuation::Finite(r) if r > 0 => Some(r as usize),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let mut ps = Projections::new(f, prec);
    (0..m).all(|k| {
        (k + 1..=m).all(|l| {
            if f.space(k, l).dim() != f.space(k + 1, l).dim() {
                return false;
            }
            if f.space(k, l) == f.space(k + 1, l) {
                return true;
            }
            let required = f.lambda(k + 1).sub(f.lambda(l + 1));
            match required {
                ExtendedValuation::NegInf => true,
                ExtendedValuation::Finite(r) if r <= 0 => true,
                ExtendedValuation::Finite(r) if (r as usize) <= prec => {
                    match ps.series(k, l).zip(ps.series(k + 1, l)) {
                        Some((a, b)) => a.sub(&b).valuation().is_none_or(|v| v >= r),
                        None => delta(f.space(k, l), f.space(k + 1, l)).is_ok_and(|d| d >= required),
                    }
                }
                _ => delta(f.space(k, l), f.space(k + 1, l)).is_ok_and(|d| d >= required),
            }
        })
    })
}

/// Precision for the first, truncated attempt at an exact valuation.
const SERIES_PREC: usize = 12;

/// The left factor of a lemma inequality; the right factor is always the
/// diagonal tail `P_{from,from} ⋯ P_{m,m}`.
#[derive(Clone, Copy)]
enum Head {
    /// `1 - P_{k,k}`.
    Complement(usize),
    /// `P_{k,i} - P_{k,i+1}`.
    Step(usize, usize),
    /// `P_{0,0} - P_{1,1}`.
    Diagonal,
}

struct Term {
    label: String,
    head: Head,
    from: usize,
    required: ExtendedValuation,
}

/// The conclusions (first) and the induction diagnostics of the lemma.
fn lemma_terms(f: &FlagFamily) -> (Vec<Term>, Vec<Term>) {
    let m = f.m();
    let total = if m == 0 {
        ExtendedValuation::Finite(0)
    } else {
        f.lambda(1).sub(f.lambda(m + 1))
    };
    let mut conclusions = vec![Term {
        label: "flags1".into(),
        head: Head::Complement(0),
        from: 1,
        required: total,
    }];
    if m >= 1 && f.space(1, 1).dim() == f.space(0, 0).dim() {
        conclusions.push(Term {
            label: "flags2".into(),
            head: Head::Diagonal,
            from: 2,
            required: total,
        });
    }
    let mut diagnostics = Vec::new();
    for k in 0..=m {
        diagnostics.push(Term {
            label: format!("no-ind({k})"),
            head: Head::Complement(k),
            from: k + 1,
            required: f.lambda(k + 1).sub(f.lambda(m + 1)),
        });
        for i in k..m {
            diagnostics.push(Term {
                label: format!("ind({k},{i})"),
                head: Head::Step(k, i),
                from: k + 1,
                required: f.lambda(i + 1).sub(f.lambda(m + 1)),
            });
        }
    }
    (conclusions, diagnostics)
}

/// Projections of a family, computed on demand, with truncations.
struct Projections<'a> {
    f: &'a FlagFamily,
    prec: usize,
    exact: Vec<Vec<Option<FracMatrix>>>,
    series: Vec<Vec<Option<Option<SeriesMatrix>>>>,
}

impl<'a> Projections<'a> {
    fn new(f: &'a FlagFamily, prec: usize) -> Self {
        let m = f.m();
        Projections {
            f,
            prec,
            exact: vec![vec![None; m + 1]; m + 1],
            series: vec![vec![None; m + 1]; m + 1],
        }
    }

    fn exact(&mut self, k: usize, l: usize) -> FracMatrix {
        let f = self.f;
        self.exact[k][l].get_or_insert_with(|| f.projection(k, l)).clone()
    }

    /// `None` only if the projection has an entry outside O, which cannot
    /// happen for a true orthogonal projection.
    fn series(&mut self, k: usize, l: usize) -> Option<SeriesMatrix> {
        if self.series[k][l].is_none() {
            let p = self.exact(k, l);
            self.series[k][l] = Some(SeriesMatrix::from_frac(&p, self.prec));
        }
        self.series[k][l].clone().flatten()
    }

    fn head_exact(&mut self, h: Head) -> FracMatrix {
        match h {
            Head::Complement(k) => self.exact(k, k).complement(),
            Head::Step(k, i) => self.exact(k, i).try_sub(&self.exact(k, i + 1)).expect("same shape"),
            Head::Diagonal => self.exact(0, 0).try_sub(&self.exact(1, 1)).expect("same shape"),
        }
    }

    fn head_series(&mut self, h: Head) -> Option<SeriesMatrix> {
        Some(match h {
            Head::Complement(k) => self.series(k, k)?.complement(),
            Head::Step(k, i) => self.series(k, i)?.sub(&self.series(k, i + 1)?),
            Head::Diagonal => self.series(0, 0)?.sub(&self.series(1, 1)?),
        })
    }

    /// The truncated product, or `None` if some factor is not in O.
    fn truncated(&mut self, t: &Term) -> Option<SeriesMatrix> {
        let mut q = self.head_series(t.head)?;
        for j in t.from..=self.f.m() {
            q = q.try_mul(&self.series(j, j)?);
        }
        Some(q)
    }

    fn exact_valuation(&mut self, t: &Term) -> ExtendedValuation {
        let mut q = self.head_exact(t.head);
        for j in t.from..=self.f.m() {
            if q.is_zero() {
                break;
            }
            q = q.try_mul(&self.exact(j, j)).expect("conformable");
        }
        q.valuation()
    }

    /// Exact `lhs`: truncated first, exact when the truncation vanishes.
    fn inequality(&mut self, t: Term) -> Inequality {
        let lhs = match self.truncated(&t).and_then(|q| q.valuation()) {
            Some(k) => ExtendedValuation::Finite(k),
            None => self.exact_valuation(&t),
        };
        Inequality {
            label: t.label,
            lhs,
            required: t.required,
        }
    }

    /// Whether `lhs ≥ required`, reading only the coefficients below
    /// `required`. Products of projections lie in O, so requirements
    /// `≤ 0` hold outright.
    fn holds(&mut self, t: &Term) -> bool {
        match t.required {
            ExtendedValuation::NegInf => true,
            ExtendedValuation::Finite(r) if r <= 0 => true,
            ExtendedValuation::Finite(r) if (r as usize) <= self.prec => match self.truncated(t) {
                Some(q) => q.valuation().is_none_or(|k| k >= r),
                None => self.exact_valuation(t) >= t.required,
            },
            _ => self.exact_valuation(t) >= t.required,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagsConclusions {
    pub flags1: Inequality,
    /// Present when `dim V_{1,1} = dim V_{0,0}`.
    pub flags2: Option<Inequality>,
}

/// Exact evaluation of both conclusions.
pub fn lemma_flags_conclusions(f: &FlagFamily) -> FlagsConclusions {
    let mut ps = Projections::new(f, SERIES_PREC);
    let mut it = lemma_terms(f).0.into_iter().map(|t| ps.inequality(t));
    let flags1 = it.next().expect("flags1 is always present");
    FlagsConclusions { flags1, flags2: it.next() }
}

/// The intermediate inequalities of the lemma's induction:
/// `no-ind(k)` for `0 ≤ k ≤ m` and `ind(k,i)` for `0 ≤ k ≤ i < m`.
pub fn lemma_flags_diagnostics(f: &FlagFamily) -> Vec<Inequality> {
    let mut ps = Projections::new(f, SERIES_PREC);
    lemma_terms(f).1.into_iter().map(|t| ps.inequality(t)).collect()
}

/// Pass/fail of the conclusions and of the diagnostics, without exact
/// left sides. Much cheaper than the exact versions on large families.
pub fn lemma_flags_hold(f: &FlagFamily) -> (bool, bool) {
    let (concl, diag) = lemma_terms(f);
    let prec = concl
        .iter()
        .chain(&diag)
        .filter_map(|t| match t.required {
            ExtendedValuation::Finite(r) if r > 0 => Some(r as usize),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let mut ps = Projections::new(f, prec);
    (concl.iter().all(|t| ps.holds(t)), diag.iter().all(|t| ps.holds(t)))
}

/// Parameters of the random family generator.
#[derive(Clone, Debug)]
pub struct FlagGenParams {
    pub max_n: usize,
    pub max_m: usize,
    /// Allow repeated distances (weak chains).
    pub allow_weak: bool,
}

impl Default for FlagGenParams {
    fn default() -> Self {
        FlagGenParams {
            max_n: 5,
            max_m: 3,
            allow_weak: true,
        }
    }
}

fn random_rational_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<FieldElement> {
    (0..n).map(|_| FieldElement::from_int(rng.gen_range(-3..=3))).collect()
}

/// Random perturbation vector with every entry of valuation `≥ mu`.
fn random_perturbation<R: Rng>(rng: &mut R, n: usize, mu: i64) -> Vec<FieldElement> {
    (0..n)
        .map(|_| {
            let lead = FieldElement::from_int(rng.gen_range(-2..=2));
            let next = FieldElement::from_int(rng.gen_range(-1..=1));
            let e = FieldElement::eps_pow(mu);
            &(&lead * &e) + &(&next * &(&e * &FieldElement::eps()))
        })
        .collect()
}

/// A family satisfying the lemma's hypothesis by construction: a rational
/// adapted basis for row 0, then each next row perturbs the previous
/// basis vector `b_j` by valuation `≥ λ_{k+1} - λ_{l(j)+1}`, where `l(j)`
/// is the last column whose space contains `b_j`.
pub fn random_flag_family<R: Rng>(rng: &mut R, params: &FlagGenParams) -> FlagFamily {
    let n = rng.gen_range(1..=params.max_n);
    let m = rng.gen_range(1..=params.max_m);
    // nonincreasing dims within 0..=n
    let mut dims: Vec<usize> = (0..=m).map(|_| rng.gen_range(0..=n)).collect();
    dims.sort_unstable_by(|a, b| b.cmp(a));
    // nonincreasing distances in -3..=6
    let lambdas: Vec<i64> = loop {
        let mut ls: Vec<i64> = (0..=m).map(|_| rng.gen_range(-3..=6)).collect();
        ls.sort_unstable_by(|a, b| b.cmp(a));
        if params.allow_weak || ls.windows(2).all(|w| w[0] > w[1]) {
            break ls;
        }
    };
    let lambdas: Vec<ExtendedValuation> = lambdas.into_iter().map(ExtendedValuation::Finite).collect();

    let d0 = dims[0];
    let mut basis: Vec<Vec<FieldElement>> = loop {
        let b: Vec<_> = (0..d0).map(|_| random_rational_vector(rng, n)).collect();
        if gram_in_gl_o(n, &b) {
            break b;
        }
    };
    let last_col = |j: usize| (0..=m).rev().find(|&l| j < dims[l]).unwrap_or(0);
    let lam = |l: usize| match lambdas[l - 1] {
        ExtendedValuation::Finite(x) => x,
        _ => unreachable!("finite by construction"),
    };
    let mut rows = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k > 0 {
            basis = loop {
                let next: Vec<_> = (0..dims[k])
                    .map(|j| {
                        let mu = lam(k) - lam(last_col(j) + 1);
                        let p = random_perturbation(rng, n, mu);
                        basis[j].iter().zip(&p).map(|(a, b)| a + b).collect::<Vec<_>>()
                    })
                    .collect();
                if gram_in_gl_o(n, &next) {
                    break next;
                }
            };
        }
        let row = (k..=m)
            .map(|l| Subspace::span(n, &basis[..dims[l]]).expect("lengths match"))
            .collect();
        rows.push(row);
    }
    FlagFamily { dims, lambdas, rows }
}

/// Basis vectors in `O^n` whose Gram matrix is invertible over `O`.
fn gram_in_gl_o(n: usize, b: &[Vec<FieldElement>]) -> bool {
    if b.is_empty() {
        return true;
    }
    if b.iter().flatten().any(|x| !x.in_valuation_ring()) {
        return false;
    }
    let m = Matrix::from_columns(n, b).expect("lengths match");
    is_gl_o(&(&m.transpose() * &m)).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{classify_valchain, Classification};
    use crate::strat::load_catalog;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use ExtendedValuation::{Finite, PosInf};

    fn sp(s: &str) -> Subspace {
        s.parse().unwrap()
    }

    fn chain(entry: &str, name: &str) -> (ValChain, Stratification) {
        let e = load_catalog(entry).unwrap();
        let c = e.chain(name).unwrap();
        let Classification::Chain(ch) = classify_valchain(&c.points, &c.dims, &e.strat).unwrap() else {
            panic!("not a chain")
        };
        (ch, e.strat)
    }

    fn example_family() -> FlagFamily {
        FlagFamily::new(
            vec![1, 1],
            vec![Finite(1), Finite(0)],
            vec![vec![sp("span[(1,0)]"), sp("span[(1,0)]")], vec![sp("span[(1,t)]")]],
        )
        .unwrap()
    }

    #[test]
    fn build_examples() {
        let (single, s) = chain("cone", "single");
        let FlagBuild::Family(f) = build_flags(&single, &s).unwrap() else { panic!() };
        assert_eq!(f.m(), 0);
        assert_eq!(f.space(0, 0), &s.tangent_space(&single.points[0], 2).unwrap());

        let (aug, s) = chain("cone", "augmented");
        let FlagBuild::Family(f) = build_flags(&aug, &s).unwrap() else { panic!() };
        assert_eq!(f.space(0, 1), f.space(0, 0));
        let v = verify_flag_family(&f);
        let dist = v.iter().find(|v| v.label == "dist(0,1)").unwrap();
        assert_eq!(dist.to_string(), "dist(0,1): FAILS lhs=0 required=1");

        let (plain, s) = chain("flat-line", "plain");
        let FlagBuild::Family(f) = build_flags(&plain, &s).unwrap() else { panic!() };
        assert_eq!(f.space(0, 1).dim(), 0);
        assert!(verify_flag_family(&f).iter().all(|v| v.status.is_ok()));
    }

    #[test]
    fn verify_examples() {
        let f = example_family();
        assert!(verify_flag_family(&f).iter().all(|v| v.status.is_ok()));
        let line = FlagFamily::new(
            vec![1, 1],
            vec![Finite(3), Finite(-2)],
            vec![vec![sp("span[(1,1)]"), sp("span[(1,1)]")], vec![sp("span[(1,1)]")]],
        )
        .unwrap();
        assert!(verify_flag_family(&line).iter().all(|v| v.status.is_ok()));
    }

    #[test]
    fn conclusion_examples() {
        let c = lemma_flags_conclusions(&example_family());
        assert_eq!((c.flags1.lhs, c.flags1.required), (Finite(1), Finite(1)));
        assert!(c.flags1.holds());
        assert!(c.flags2.unwrap().holds());

        let full = FlagFamily::new(
            vec![2, 1],
            vec![Finite(2), Finite(0)],
            vec![vec![Subspace::full(2), sp("span[(1,0)]")], vec![sp("span[(1,t)]")]],
        )
        .unwrap();
        let c = lemma_flags_conclusions(&full);
        assert_eq!(c.flags1.lhs, PosInf);
        assert!(c.flags2.is_none());
    }

    #[test]
    fn json_round_trip() {
        let f = example_family();
        assert_eq!(FlagFamily::from_json(&f.to_json()).unwrap(), f);
        assert!(FlagFamily::from_json(r#"{"dims":[1],"lambdas":[0],"rows":[]}"#).is_err());
    }

    #[test]
    fn generated_families_satisfy_hypothesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_flag_family(&mut rng, &FlagGenParams::default());
            assert!(lemma_hypothesis_holds(&f), "{}", f.to_json());
        }
    }

    #[test]
    fn truncated_checks_agree_with_exact() {
        let params = FlagGenParams {
            max_n: 3,
            max_m: 2,
            allow_weak: true,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let f = random_flag_family(&mut rng, &params);
            let exact_hyp = verify_flag_family(&f)
                .iter()
                .filter(|v| !v.label.starts_with("dim"))
                .all(|v| v.status.is_ok());
            assert_eq!(lemma_hypothesis_holds(&f), exact_hyp);
            let c = lemma_flags_conclusions(&f);
            let exact_concl = c.flags1.holds() && c.flags2.as_ref().is_none_or(Inequality::holds);
            let exact_diag = lemma_flags_diagnostics(&f).iter().all(Inequality::holds);
            assert_eq!(lemma_flags_hold(&f), (exact_concl, exact_diag));
        }
        // A family violating the distance bound.
        let bad = FlagFamily::new(
            vec![1, 1],
            vec![Finite(3), Finite(0)],
            vec![vec![sp("span[(1,0)]"), sp("span[(1,0)]")], vec![sp("span[(1,t)]")]],
        )
        .unwrap();
        assert!(!lemma_hypothesis_holds(&bad));
    }
}
